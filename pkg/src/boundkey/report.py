"""Reproduction report over the published fixtures."""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, fields

from boundkey.dist import FIXTURE_TOL, from_diagram, validate_unambiguous
from boundkey.fixtures import Fixture, all_fixtures
from boundkey.keyrate import advantage, noisy_bound
from boundkey.optimize import OptConfig, constraint_residuals, maximize_keyrate, snap_to_constraints
from boundkey.quantum import lift_state, pt_invariance_combinatorial, pt_report, reduce_to_AB

# 6-decimal rounding of the printed matrices limits how PT-invariant they can be
PT_TOL = 5e-5


@dataclass(frozen=True)
class FixtureRow:
    name: str
    d_A: int
    d_B: int
    d_E: int
    cliques: int
    unambiguous: bool
    pt_deviation: float
    max_cross_det: float
    min_eig_pt: float
    pt_invariant: bool
    ppt: bool
    key_rate: float
    advantage_A: float
    advantage_B: float
    snapped_min_eig_pt: float
    snapped_key_rate: float
    optimized_rate: float | None = None

    @property
    def ok(self) -> bool:
        return self.unambiguous and self.pt_invariant and self.ppt and self.key_rate > 0


@dataclass(frozen=True)
class ReproductionReport:
    rows: tuple[FixtureRow, ...]
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_json(self) -> dict:
        return {
            "pt_tolerance": PT_TOL,
            "seed": self.seed,
            "all_checks_pass": self.ok,
            "fixtures": [asdict(r) for r in self.rows],
        }

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = [f.name for f in fields(FixtureRow)]
        w.writerow(names)
        for r in self.rows:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in (getattr(r, n) for n in names)])
        return buf.getvalue()

    def table(self) -> str:
        head = (
            f"{'d_A x d_B':>9}  {'d_E':>3}  {'bits of private key':>19}  {'unambig':>7}  "
            f"{'max|PT-rho|':>11}  {'min eig PT':>11}  {'PPT':>3}"
        )
        if any(r.optimized_rate is not None for r in self.rows):
            head += f"  {'optimized':>12}"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            line = (
                f"{r.d_A:>3} x {r.d_B:<3}  {r.d_E:>3}  {r.key_rate:>19.10f}  {'yes' if r.unambiguous else 'no':>7}  "
                f"{r.pt_deviation:>11.3e}  {r.min_eig_pt:>11.3e}  {'yes' if r.ppt else 'no':>3}"
            )
            if r.optimized_rate is not None:
                line += f"  {r.optimized_rate:>12.10f}"
            lines.append(line)
        lines.append("")
        lines.append(f"PT-invariance and PPT checked at tolerance {PT_TOL:g}; key rate = I(X;B) - I(X;E) with the printed Q.")
        return "\n".join(lines) + "\n"


def fixture_row(fx: Fixture, cfg: OptConfig | None = None) -> FixtureRow:
    P = fx.distribution()
    rho = reduce_to_AB(lift_state(P))
    rep = pt_report(rho, PT_TOL)
    _, dets = constraint_residuals(fx.P_AB, fx.diagram)
    snapped = from_diagram(fx.diagram, snap_to_constraints(fx.P_AB, fx.diagram))
    snapped_rep = pt_report(reduce_to_AB(lift_state(snapped)), PT_TOL)
    combinatorial = pt_invariance_combinatorial(P, FIXTURE_TOL)
    opt = None
    if cfg is not None:
        opt = maximize_keyrate(fx.diagram, cfg).best_rate
    return FixtureRow(
        name=fx.name,
        d_A=P.d_A,
        d_B=P.d_B,
        d_E=fx.d_E,
        cliques=fx.diagram.d_E,
        unambiguous=validate_unambiguous(P).ok,
        pt_deviation=rep.max_abs_deviation,
        max_cross_det=max(dets),
        min_eig_pt=rep.min_eig_pt,
        pt_invariant=rep.is_pt_invariant and combinatorial.ok,
        ppt=rep.is_ppt,
        key_rate=noisy_bound(P, fx.channel),
        advantage_A=advantage(P, "A"),
        advantage_B=advantage(P, "B"),
        snapped_min_eig_pt=snapped_rep.min_eig_pt,
        snapped_key_rate=noisy_bound(snapped, fx.channel),
        optimized_rate=opt,
    )


def reproduce(reinfer: bool = False, cfg: OptConfig | None = None) -> ReproductionReport:
    rows = tuple(fixture_row(fx, cfg) for fx in all_fixtures(reinfer))
    return ReproductionReport(rows, None if cfg is None else cfg.seed)
