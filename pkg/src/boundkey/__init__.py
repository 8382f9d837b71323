"""Unambiguous tripartite distributions and the private bound-entangled states they lift to."""
from boundkey.dist import (
    YUZZ,
    Diagram,
    JointDistribution3,
    MarginalDistribution,
    NoisyChannel,
    apply_channel,
    entropy,
    eve_symbol,
    from_diagram,
    marginal,
    mutual_information,
    validate_unambiguous,
)
from boundkey.keyrate import advantage, f_structured, noisy_bound
from boundkey.quantum import (
    coherent_information,
    lift_state,
    partial_transpose,
    pt_invariance_combinatorial,
    pt_report,
    reduce_to_AB,
)

__version__ = "0.1.0"
