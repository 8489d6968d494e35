"""J-class decisions for holomorphic images of weighted backward shifts.

An operator built from a weight sequence w (radii r1 >= r3 >= r2) and a map
f is J-class exactly when the image of the annulus {r2 <= |z| <= r1} under
f stays outside the closed unit disk (condition A) and the image of the
open disk of radius r2 covers the closed unit disk (condition B).  Two
independent decision routes are implemented:

  * the geometric route certifies A with a grid lower bound for min |f| on
    the annulus and B with a single winding number around 0 (sound because
    under A the image curve misses the closed unit disk, so the preimage
    count is constant across it);
  * the moduli route checks that the certified annulus minimum (the
    asymptotic injectivity modulus of the adjoint side) exceeds 1 and that
    the map has a root inside the eigenvalue disk of radius r3, which
    exhibits an eigenvector for the eigenvalue 0.

Certified verdicts from the two routes can never contradict each other;
near thresholds both abstain (UNDECIDED) rather than encode grid noise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .budget import Budget
from .holo import (
    CERTIFIED,
    UNDECIDED,
    CertifiedBound,
    CoverageResult,
    HoloMap,
    Polynomial,
    Series,
    covers_closed_unit_disk,
    winding_number,
)
from .spectra import (
    KERNEL_FALSE,
    KERNEL_TRUE,
    KernelReport,
    OperatorSpec,
    UnsupportedMapError,
    i_of_adjoint,
    kernel_nontrivial,
)
from .weights import (
    ConstantTail,
    PeriodicTail,
    SpectralProfile,
    TwoValueDoublingBlocks,
    WeightSequence,
)

__all__ = [
    "JCLASS",
    "NOT_JCLASS",
    "VERDICT_UNDECIDED",
    "Verdict",
    "ConsistencyReport",
    "StabilityReport",
    "ProductReport",
    "decide_geometric",
    "decide_moduli",
    "decide_unweighted",
    "decide",
    "cross_check",
    "perturbation_stability",
    "product_preserves_jclass",
]

JCLASS = "JCLASS"
NOT_JCLASS = "NOT_JCLASS"
VERDICT_UNDECIDED = "UNDECIDED"

GEOMETRIC = "GEOMETRIC"
MODULI = "MODULI"
CLOSED_FORM = "CLOSED_FORM"


@dataclass(frozen=True)
class Verdict:
    """Decision with its certificates.

    JCLASS carries a certified annulus bound > 1 (condition A) and a valid
    winding >= 1 or kernel witness (condition B); NOT_JCLASS carries either
    an annulus point with |f| <= 1, a certified winding 0, or a certified
    root-free spectral disk.  ``margin`` is the certified clearance of the
    binding condition from its threshold (0 for UNDECIDED).
    """

    decision: str
    route: str
    margin: float
    profile: SpectralProfile
    condition_a: CertifiedBound | None = None
    condition_b: CoverageResult | None = None
    kernel: KernelReport | None = None
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "decision": self.decision,
            "route": self.route,
            "margin": self.margin,
            "profile": self.profile.to_dict(),
            "conditionA": self.condition_a.to_dict() if self.condition_a else None,
            "conditionB": self.condition_b.to_dict() if self.condition_b else None,
            "kernel": self.kernel.to_dict() if self.kernel else None,
            "notes": self.notes,
        }

    @property
    def certification_width(self) -> float:
        if self.condition_a is not None:
            return self.condition_a.width
        return 0.0


def decide_geometric(op: OperatorSpec, budget: Budget | None = None) -> Verdict:
    """Decide via the annulus-avoidance and disk-coverage certificates."""
    budget = budget or Budget()
    prof = op.check_validity()
    cert_a = i_of_adjoint(op, budget)
    route = CLOSED_FORM if op.map.monomial_form() is not None else GEOMETRIC

    if cert_a.certifies_violation:
        return Verdict(
            decision=NOT_JCLASS,
            route=route,
            margin=max(0.0, 1.0 - cert_a.min_sampled),
            profile=prof,
            condition_a=cert_a,
            notes="annulus image meets the closed unit disk",
        )

    if cert_a.certifies_above:
        cover = covers_closed_unit_disk(op.map, prof.r2, cert_a, budget)
        if cover.status == UNDECIDED:
            return Verdict(
                decision=VERDICT_UNDECIDED,
                route=route,
                margin=0.0,
                profile=prof,
                condition_a=cert_a,
                condition_b=cover,
                notes="winding sampling budget exhausted",
            )
        if cover.covers:
            # clearance of both certificates: the annulus bound over 1 and
            # the winding curve's certified distance to the closed unit disk
            margin = min(
                cert_a.lower_bound - 1.0,
                cover.winding.min_distance - 1.0,
            )
            return Verdict(
                decision=JCLASS,
                route=route,
                margin=margin,
                profile=prof,
                condition_a=cert_a,
                condition_b=cover,
            )
        return Verdict(
            decision=NOT_JCLASS,
            route=route,
            margin=cert_a.lower_bound - 1.0,
            profile=prof,
            condition_a=cert_a,
            condition_b=cover,
            notes="unit disk not covered (winding 0 about the origin)",
        )

    # Condition A is open, but a valid winding 0 about the origin alone
    # already refutes coverage: the origin then has no preimage in the
    # inner disk, and it lies in the closed unit disk.
    wr = winding_number(op.map, prof.r2, 0j, budget)
    if wr.valid and wr.winding == 0:
        return Verdict(
            decision=NOT_JCLASS,
            route=route,
            margin=0.0,
            profile=prof,
            condition_a=cert_a,
            condition_b=CoverageResult(False, CERTIFIED, wr),
            notes="coverage refuted while the annulus bound stayed open",
        )
    return Verdict(
        decision=VERDICT_UNDECIDED,
        route=route,
        margin=0.0,
        profile=prof,
        condition_a=cert_a,
        notes="annulus minimum within certification width of 1",
    )


def decide_moduli(op: OperatorSpec, budget: Budget | None = None) -> Verdict:
    """Decide via the adjoint modulus bound and the kernel witness."""
    budget = budget or Budget()
    if not isinstance(op.map, Polynomial):
        raise UnsupportedMapError("the moduli route needs a polynomial map")
    prof = op.check_validity()
    bound = i_of_adjoint(op, budget)

    if bound.certifies_violation:
        return Verdict(
            decision=NOT_JCLASS,
            route=MODULI,
            margin=max(0.0, 1.0 - bound.min_sampled),
            profile=prof,
            condition_a=bound,
            notes="adjoint modulus not above 1",
        )

    ker = kernel_nontrivial(op)
    if ker.status == KERNEL_FALSE:
        # a root-free spectral disk refutes the eigenvalue condition on its
        # own, no matter where the modulus bound landed
        return Verdict(
            decision=NOT_JCLASS,
            route=MODULI,
            margin=bound.lower_bound - 1.0 if bound.certifies_above else 0.0,
            profile=prof,
            condition_a=bound,
            kernel=ker,
            notes="no eigenvalue 0: every root clears the spectral disk",
        )
    if not bound.certifies_above:
        return Verdict(
            decision=VERDICT_UNDECIDED,
            route=MODULI,
            margin=0.0,
            profile=prof,
            condition_a=bound,
            kernel=ker,
            notes="adjoint modulus within certification width of 1",
        )
    if ker.status == KERNEL_TRUE:
        return Verdict(
            decision=JCLASS,
            route=MODULI,
            margin=bound.lower_bound - 1.0,
            profile=prof,
            condition_a=bound,
            kernel=ker,
        )
    return Verdict(
        decision=VERDICT_UNDECIDED,
        route=MODULI,
        margin=0.0,
        profile=prof,
        condition_a=bound,
        kernel=ker,
        notes="kernel question open for roots between r3 and r1",
    )


def decide_unweighted(f: HoloMap, budget: Budget | None = None) -> Verdict:
    """Decision for the plain backward shift (all radii equal to 1)."""
    if isinstance(f, Series) and f.validity_radius <= 1.0:
        raise ValueError("map must be holomorphic beyond the closed unit disk")
    op = OperatorSpec(WeightSequence.constant(1.0), f)
    return decide_geometric(op, budget)


def decide(op: OperatorSpec, route: str = "geometric", budget: Budget | None = None):
    if route == "geometric":
        return decide_geometric(op, budget), None
    if route == "moduli":
        return decide_moduli(op, budget), None
    if route == "both":
        report = cross_check(op, budget)
        return report.geometric, report
    raise ValueError(f"unknown route {route!r}")


@dataclass(frozen=True)
class ConsistencyReport:
    geometric: Verdict
    moduli: Verdict
    consistent: bool
    detail: str

    def to_dict(self) -> dict:
        return {
            "consistent": self.consistent,
            "detail": self.detail,
            "geometric": self.geometric.to_dict(),
            "moduli": self.moduli.to_dict(),
        }


def cross_check(op: OperatorSpec, budget: Budget | None = None) -> ConsistencyReport:
    """Run both routes and compare.

    PASS when the decisions agree, or when one is UNDECIDED and the other
    sits near its threshold (margin below twice its certification width);
    a certified contradiction or a confident verdict against an abstention
    is a FAIL.
    """
    g = decide_geometric(op, budget)
    m = decide_moduli(op, budget)
    if g.decision == m.decision:
        return ConsistencyReport(g, m, True, "decisions agree")
    undecided, decided = (g, m) if g.decision == VERDICT_UNDECIDED else (m, g)
    if undecided.decision == VERDICT_UNDECIDED:
        near = decided.margin < 2.0 * max(decided.certification_width, 1e-15)
        detail = (
            "one route abstained near the threshold"
            if near
            else "abstention against a confident verdict"
        )
        return ConsistencyReport(g, m, near, detail)
    return ConsistencyReport(g, m, False, "certified contradiction")


def _perturbed_weights(w: WeightSequence, rel_delta: float, rng) -> WeightSequence:
    def jitter(v: float) -> float:
        return v * (1.0 + rng.uniform(-rel_delta, rel_delta))

    prefix = tuple(jitter(v) for v in w.prefix)
    t = w.tail
    if isinstance(t, ConstantTail):
        tail = ConstantTail(jitter(t.value))
    elif isinstance(t, PeriodicTail):
        tail = PeriodicTail(tuple(jitter(v) for v in t.values))
    else:
        tail = TwoValueDoublingBlocks(jitter(t.a), jitter(t.b))
    return WeightSequence(prefix, tail)


@dataclass(frozen=True)
class StabilityReport:
    base: Verdict
    rel_delta: float
    trials: int
    flips: tuple
    stable: bool

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "relDelta": self.rel_delta,
            "trials": self.trials,
            "flips": [
                {"trial": t, "decision": d, "weights": wd} for t, d, wd in self.flips
            ],
            "stable": self.stable,
        }


def perturbation_stability(
    op: OperatorSpec,
    rel_delta: float,
    trials: int,
    seed: int = 0,
    budget: Budget | None = None,
) -> StabilityReport:
    """Re-decide under independent multiplicative weight noise.

    The J-class set is open, so verdicts with margin m survive noise small
    relative to m; every flip is reported with the offending weights.
    """
    base = decide_geometric(op, budget)
    rng = np.random.default_rng(seed)
    flips = []
    for t in range(trials):
        wp = _perturbed_weights(op.weights, rel_delta, rng)
        v = decide_geometric(OperatorSpec(wp, op.map), budget)
        if v.decision != base.decision:
            flips.append((t, v.decision, wp.to_dict()))
    return StabilityReport(base, rel_delta, trials, tuple(flips), not flips)


@dataclass(frozen=True)
class ProductReport:
    factor_verdicts: tuple[Verdict, Verdict]
    product_verdict: Verdict
    bound_product: float
    bound_of_product: float
    bound_check: bool
    jclass_preserved: bool

    def to_dict(self) -> dict:
        return {
            "factors": [v.to_dict() for v in self.factor_verdicts],
            "product": self.product_verdict.to_dict(),
            "boundProduct": self.bound_product,
            "boundOfProduct": self.bound_of_product,
            "boundCheck": self.bound_check,
            "jclassPreserved": self.jclass_preserved,
        }


def product_preserves_jclass(
    op1: OperatorSpec,
    op2: OperatorSpec,
    budget: Budget | None = None,
) -> ProductReport:
    """Check that the product of two commuting J-class images stays J-class.

    The factors share the weight sequence, so their images commute and the
    product operator is the image under the coefficient-convolution product
    of the maps.  The certified annulus bound is supermultiplicative:
    min |fg| >= (min |f|)(min |g|), checked here within certification
    widths.
    """
    if op1.weights != op2.weights:
        raise ValueError("product check needs a shared weight sequence")
    if not (isinstance(op1.map, Polynomial) and isinstance(op2.map, Polynomial)):
        raise UnsupportedMapError("product check needs polynomial maps")
    v1 = decide_geometric(op1, budget)
    v2 = decide_geometric(op2, budget)
    if not (v1.decision == JCLASS and v2.decision == JCLASS):
        raise ValueError("both factors must be certified JCLASS")
    prod_op = OperatorSpec(op1.weights, op1.map * op2.map)
    vp = decide_geometric(prod_op, budget)
    lb1, lb2 = v1.condition_a.lower_bound, v2.condition_a.lower_bound
    lbp = vp.condition_a.lower_bound
    width = vp.condition_a.width
    ok = lbp >= lb1 * lb2 - width - 1e-9
    return ProductReport(
        factor_verdicts=(v1, v2),
        product_verdict=vp,
        bound_product=lb1 * lb2,
        bound_of_product=lbp,
        bound_check=ok,
        jclass_preserved=vp.decision == JCLASS,
    )
