"""Exact distribution-level simulation of public-discussion key-agreement protocols.

A protocol is a list of public messages followed by optional noisy processing
and one-way error correction plus privacy amplification (EC+PA).  The state
is the joint pmf over (a, b, e, m_1, ..., m_k); every message is public, so
each party's composite variable is (own symbol, m_1, ..., m_k).  Composite
indices are row-major in that order.

The simulator cannot certify that public discussion alone yields no key: that
certificate comes only from PT-invariance of the lifted state.  What it does
check exactly is that messages keep the distribution unambiguous and that
each message map commutes with the entrywise square root.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from boundkey.dist import (
    LOAD_TOL,
    ZERO_TOL,
    JointDistribution3,
    NoisyChannel,
    UnambiguityReport,
    entropy_of,
)
from boundkey.errors import DimensionMismatch, LoadError, NotIsometry
from boundkey.keyrate import KeyRateReport, advantage, noisy_bound

MAX_MESSAGES = 8
MAX_STEPS = 4
MAX_IID = 3
MAX_DENSE = 5_000_000


@dataclass(frozen=True, eq=False)
class ProtocolStep:
    """Public message drawn from ``q[m, local, h_1, ..., h_{i-1}]``.

    ``local`` is the speaker's own symbol and ``h_j`` the earlier messages;
    each column ``q[:, local, h...]`` is a distribution over messages.
    """

    speaker: str
    q: np.ndarray

    def __post_init__(self):
        speaker = self.speaker.upper()
        if speaker not in ("A", "B"):
            raise LoadError(f"speaker must be 'A' or 'B', got {self.speaker!r}")
        q = np.array(self.q, dtype=float)
        if q.ndim < 2:
            raise LoadError("message map needs at least a message axis and a local axis")
        if q.shape[0] > MAX_MESSAGES:
            raise LoadError(f"message alphabet {q.shape[0]} exceeds {MAX_MESSAGES}")
        if not np.all(np.isfinite(q)) or np.any(q < 0):
            raise LoadError("message probabilities must be finite and nonnegative")
        cols = q.sum(axis=0)
        if np.any(np.abs(cols - 1.0) > LOAD_TOL):
            raise LoadError("each message distribution must sum to 1")
        q = q / cols
        q.setflags(write=False)
        object.__setattr__(self, "speaker", speaker)
        object.__setattr__(self, "q", q)

    @property
    def n_messages(self) -> int:
        return self.q.shape[0]

    def to_json(self) -> dict:
        return {"speaker": self.speaker, "q": self.q.tolist()}


@dataclass(frozen=True, eq=False)
class TranscriptState:
    p: np.ndarray  # axes (a, b, e, m_1, ..., m_k)
    unambiguity: tuple[bool, ...] = ()

    @classmethod
    def initial(cls, P: JointDistribution3) -> "TranscriptState":
        return cls(P.p.copy(), (check_unambiguous(P.p).ok,))

    @property
    def history(self) -> tuple[int, ...]:
        return self.p.shape[3:]

    @property
    def n_history(self) -> int:
        return int(np.prod(self.history, dtype=int))

    def flat(self) -> np.ndarray:
        """Array indexed (a, b, e, h) with the message history flattened."""
        d_A, d_B, d_E = self.p.shape[:3]
        return self.p.reshape(d_A, d_B, d_E, self.n_history)

    def joint(self) -> JointDistribution3:
        """Dense distribution over the three composite variables."""
        f = self.flat()
        d_A, d_B, d_E, H = f.shape
        if (d_A * H) * (d_B * H) * (d_E * H) > MAX_DENSE:
            raise DimensionMismatch("composite alphabets too large for a dense joint distribution")
        out = np.zeros((d_A, H, d_B, H, d_E, H))
        h = np.arange(H)
        out[:, h, :, h, :, h] = np.moveaxis(f, 3, 0)
        return JointDistribution3(out.reshape(d_A * H, d_B * H, d_E * H))

    def advantage(self, from_party: str = "A") -> float:
        f = self.flat()
        if from_party.upper() == "B":
            f = f.transpose(1, 0, 2, 3)
        return _composite_advantage(f)


def check_unambiguous(p: np.ndarray, tol: float = ZERO_TOL) -> UnambiguityReport:
    """Unambiguity of the composite variables of a transcript array.

    Messages are shared, so two entries with different histories never
    collide and the check runs history slice by history slice.
    """
    nz = np.asarray(p) > tol
    cA = nz.sum(axis=0) > 1
    cB = nz.sum(axis=1) > 1
    cE = nz.sum(axis=2) > 1
    viol = []
    for name, c in (("A", cA), ("B", cB), ("E", cE)):
        for idx in np.argwhere(c):
            viol.append((name, *map(int, idx)))
    return UnambiguityReport(not cA.any(), not cB.any(), not cE.any(), tuple(viol))


def _check_step(state: TranscriptState, step: ProtocolStep):
    if len(state.history) >= MAX_STEPS:
        raise DimensionMismatch(f"at most {MAX_STEPS} messages are simulated")
    local = state.p.shape[0] if step.speaker == "A" else state.p.shape[1]
    expected = (local, *state.history)
    if step.q.shape[1:] != expected:
        raise DimensionMismatch(f"message map has shape {step.q.shape[1:]} after the message axis, expected {expected}")


def public_message_step(state: TranscriptState, step: ProtocolStep) -> TranscriptState:
    """p'(a, b, e, h, m) = p(a, b, e, h) q(m | speaker's symbol, h)."""
    _check_step(state, step)
    p = state.p
    k = len(state.history)
    q = np.moveaxis(step.q, 0, -1)  # (local, h..., m)
    if step.speaker == "A":
        q = q.reshape(q.shape[0], 1, 1, *q.shape[1:])
    else:
        q = q.reshape(1, q.shape[0], 1, *q.shape[1:])
    new = p[..., None] * q
    assert new.ndim == 4 + k
    return TranscriptState(new, state.unambiguity + (check_unambiguous(new).ok,))


def message_map(state: TranscriptState, step: ProtocolStep) -> sp.csr_matrix:
    """The step as a sparse stochastic matrix from flattened p to flattened p'."""
    _check_step(state, step)
    shape = state.p.shape
    n_in = int(np.prod(shape))
    M = step.n_messages
    idx = np.arange(n_in)
    coords = np.unravel_index(idx, shape)
    local = coords[0] if step.speaker == "A" else coords[1]
    hist = coords[3:]
    rows, cols, vals = [], [], []
    for m in range(M):
        rows.append(idx * M + m)
        cols.append(idx)
        vals.append(step.q[(m, local, *hist)])
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n_in * M, n_in)
    )


def check_sqrt_lift(M, Q, tol: float = 0.0) -> float:
    """max |sqrt(M) sqrt(q) - sqrt(M q)| for a map whose columns have disjoint supports.

    ``M`` is a dense or sparse column-stochastic matrix and ``Q`` a
    distribution (any shape, flattened row-major).
    """
    q = Q.p if isinstance(Q, JointDistribution3) else np.asarray(Q, dtype=float)
    q = q.ravel()
    Ms = sp.csr_matrix(M)
    if Ms.shape[1] != q.size:
        raise DimensionMismatch(f"map acts on {Ms.shape[1]} entries, distribution has {q.size}")
    support = Ms.copy()
    support.data = (np.abs(support.data) > tol).astype(float)
    support.eliminate_zeros()
    per_row = np.diff(support.indptr)
    if np.any(per_row > 1):
        raise NotIsometry(f"output {int(np.argmax(per_row > 1))} is reachable from more than one input")
    lhs = Ms.sqrt() @ np.sqrt(q)
    rhs = np.sqrt(Ms @ q)
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def _composite_advantage(f: np.ndarray) -> float:
    """I(F';G') - I(F';E') for f indexed (f, g, e, h) with F' = (f, h) etc."""
    return (
        entropy_of(f.sum(axis=(0, 2)))
        - entropy_of(f.sum(axis=2))
        - entropy_of(f.sum(axis=(0, 1)))
        + entropy_of(f.sum(axis=1))
    )


def _noisy_composite(f: np.ndarray, ch: NoisyChannel) -> float:
    """Rate after passing the sender's composite (f, h) through ``ch``; X keeps nothing else."""
    d_F, d_G, d_E, H = f.shape
    if ch.d_A != d_F * H:
        raise DimensionMismatch(f"channel input size {ch.d_A} != sender composite size {d_F * H}")
    q = ch.q.reshape(ch.d_X, d_F, H)
    r = np.einsum("xfh,fgeh->xgeh", q, f)
    # I(X; G,h) - I(X; E,h) = H(G,h) - H(X,G,h) - H(E,h) + H(X,E,h)
    return (
        entropy_of(r.sum(axis=(0, 2)))
        - entropy_of(r.sum(axis=2))
        - entropy_of(r.sum(axis=(0, 1)))
        + entropy_of(r.sum(axis=1))
    )


def run_pipeline(
    P: JointDistribution3,
    steps=(),
    final_channel: NoisyChannel | None = None,
    direction: str = "A->B",
) -> KeyRateReport:
    """Public messages, optional noisy processing by the sender, then EC+PA.

    The reported rate is the advantage of the final distribution in the given
    direction; with no channel it equals the plain advantage.
    """
    sender = _sender(direction)
    steps = list(steps)
    if not steps:
        adv = advantage(P, sender)
        rate = adv if final_channel is None else noisy_bound(P, final_channel, sender)
        return KeyRateReport(adv, rate, final_channel, direction)
    state = TranscriptState.initial(P)
    for step in steps:
        state = public_message_step(state, step)
    f = state.flat()
    if sender == "B":
        f = f.transpose(1, 0, 2, 3)
    adv = _composite_advantage(f)
    rate = adv if final_channel is None else _noisy_composite(f, final_channel)
    return KeyRateReport(adv, rate, final_channel, direction)


def _sender(direction: str) -> str:
    d = direction.replace(" ", "").upper()
    if d in ("A->B", "A"):
        return "A"
    if d in ("B->A", "B"):
        return "B"
    raise ValueError(f"direction must be 'A->B' or 'B->A', got {direction!r}")


def iid_power(P: JointDistribution3, n: int) -> JointDistribution3:
    """n independent copies, each party holding the tuple of its n symbols."""
    if not 1 <= n <= MAX_IID:
        raise ValueError(f"n must be between 1 and {MAX_IID}")
    p = P.p
    out = p
    for _ in range(n - 1):
        out = np.einsum("abe,xyz->axbyez", out, p).reshape(
            out.shape[0] * p.shape[0], out.shape[1] * p.shape[1], out.shape[2] * p.shape[2]
        )
    return JointDistribution3(out)


def steps_from_json(obj) -> tuple[list[ProtocolStep], NoisyChannel | None, str]:
    """Parse a protocol file: a list of steps, or an object with "steps",
    optional "final_channel" and "direction"."""
    if isinstance(obj, list):
        obj = {"steps": obj}
    steps = [ProtocolStep(s["speaker"], s["q"]) for s in obj.get("steps", [])]
    ch = obj.get("final_channel")
    channel = None
    if ch is not None:
        channel = NoisyChannel(ch["q"] if isinstance(ch, dict) else ch)
    return steps, channel, obj.get("direction", "A->B")
