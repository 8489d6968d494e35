import math

import numpy as np
import pytest

from conftest import random_instance
from shiftspec.budget import Budget
from shiftspec.holo import CERTIFIED, Polynomial, Series, identity_map
from shiftspec.jclass import (
    JCLASS,
    NOT_JCLASS,
    VERDICT_UNDECIDED,
    cross_check,
    decide,
    decide_geometric,
    decide_moduli,
    decide_unweighted,
    perturbation_stability,
    product_preserves_jclass,
)
from shiftspec.spectra import OperatorSpec, UnsupportedMapError
from shiftspec.weights import WeightSequence


def P(*coeffs):
    return Polynomial(tuple(coeffs))


def const_op(c, f=None):
    return OperatorSpec(WeightSequence.constant(c), f or identity_map())


def one_plus_zm(m):
    coeffs = [0.0] * (m + 1)
    coeffs[0] = 1.0
    coeffs[m] = 1.0
    return P(*coeffs)


# -- geometric route ------------------------------------------------------


def test_plain_shift_threshold():
    assert decide_geometric(const_op(2.0)).decision == JCLASS
    v = decide_geometric(const_op(1.0))
    assert v.decision == NOT_JCLASS
    assert v.condition_a.min_sampled <= 1.0  # witness on the annulus circle


def test_one_plus_z2_threshold():
    # flips exactly as the constant weight crosses sqrt(2)
    assert decide_geometric(const_op(1.5, one_plus_zm(2))).decision == JCLASS
    assert decide_geometric(const_op(1.4, one_plus_zm(2))).decision == NOT_JCLASS


def test_jclass_carries_both_certificates():
    v = decide_geometric(const_op(1.5, one_plus_zm(2)))
    assert v.condition_a.status == CERTIFIED and v.condition_a.lower_bound > 1
    assert v.condition_b.winding.valid and v.condition_b.winding.winding >= 1
    assert v.margin > 0


def test_not_jclass_by_coverage():
    v = decide_geometric(const_op(2.0, P(3, 1)))
    assert v.decision == NOT_JCLASS
    assert v.condition_b is not None and v.condition_b.covers is False


def test_series_map_geometric_route():
    # near-monomial series still runs through the numeric grid + winding path
    s = Series((0, 0, 3.0), tail_bound=1e-12, tail_ratio=0.1, validity_radius=8.0)
    v = decide_geometric(const_op(1.2, s))
    assert v.decision == JCLASS
    assert v.condition_b.winding.winding == 2

    # roots of 3 + z^2 sit outside the inner disk: coverage fails
    s2 = Series((3.0, 0, 1.0), tail_bound=1e-12, tail_ratio=0.1, validity_radius=8.0)
    v2 = decide_geometric(const_op(1.2, s2))
    assert v2.decision == NOT_JCLASS
    assert v2.condition_b.covers is False


def test_series_validity_radius_enforced():
    s = Series((3.0, 1.0), 0.1, 0.4, 1.5)
    with pytest.raises(ValueError):
        decide_geometric(const_op(2.0, s))


# -- unweighted shift images -------------------------------------------------


def test_unweighted_examples():
    assert decide_unweighted(P(0, 2)).decision == JCLASS
    v = decide_unweighted(P(3, 1))
    assert v.decision == NOT_JCLASS
    assert v.condition_a.lower_bound > 1
    assert v.condition_b.winding.winding == 0
    # |2 z^2| = 2 on the boundary circle and the double cover winds twice
    assert decide_unweighted(P(0, 0, 2)).decision == JCLASS


# -- moduli route -----------------------------------------------------------


def test_moduli_examples():
    assert decide_moduli(const_op(2.0)).decision == JCLASS
    assert decide_moduli(const_op(1.0)).decision == NOT_JCLASS
    v = decide_moduli(const_op(2.0, P(3, 1)))
    assert v.decision == NOT_JCLASS  # refuted by the root-free spectral disk
    assert v.kernel.status == "FALSE"


def test_moduli_rejects_series():
    s = Series((0, 1), 0.1, 0.3, 3.0)
    with pytest.raises(UnsupportedMapError):
        decide_moduli(OperatorSpec(WeightSequence.constant(2.0), s))


def test_moduli_root_in_annulus_is_violation():
    # a root between r3 and r1 lies inside the annulus, so the modulus bound
    # itself certifies the violation before the kernel question matters
    w = WeightSequence.doubling_blocks(2.9, 2.5)  # r2 = 2.5, r3 ~ 2.63, r1 = 2.9
    v = decide_moduli(OperatorSpec(w, P(-2.8, 1)))
    assert v.decision == NOT_JCLASS
    assert v.condition_a.certifies_violation


def test_moduli_undecided_near_threshold():
    # at the exact flip point the modulus bound abstains while the kernel
    # witness alone cannot decide
    c = math.sqrt(2)
    v = decide_moduli(const_op(c, one_plus_zm(2)))
    assert v.decision == VERDICT_UNDECIDED
    assert v.kernel.status == "TRUE"  # roots +-i lie safely inside


# -- near-threshold abstention ----------------------------------------------


@pytest.mark.parametrize("m", [1, 2, 3])
def test_near_exact_threshold_undecided(m):
    c = 2.0 ** (1.0 / m)
    assert decide_geometric(const_op(c, one_plus_zm(m))).decision == VERDICT_UNDECIDED


# -- cross checking ----------------------------------------------------------


def test_cross_check_agreement_examples():
    rep = cross_check(const_op(2.0, one_plus_zm(2)))
    assert rep.consistent
    assert rep.geometric.decision == JCLASS and rep.moduli.decision == JCLASS

    rep = cross_check(const_op(1.2, P(1, 1)))
    assert rep.consistent
    assert rep.geometric.decision == NOT_JCLASS and rep.moduli.decision == NOT_JCLASS


def test_cross_check_randomized(rng):
    for _ in range(15):
        rep = cross_check(random_instance(rng))
        assert rep.consistent, rep.detail


def test_route_dispatcher():
    v, rep = decide(const_op(2.0), route="both")
    assert v.decision == JCLASS and rep.consistent
    with pytest.raises(ValueError):
        decide(const_op(2.0), route="psychic")


# -- invariants ---------------------------------------------------------------


def test_monotone_in_weight_scaling(rng):
    # scaling all weights up never turns a JCLASS identity-map verdict around
    for _ in range(10):
        c = rng.uniform(1.05, 2.5)
        base = decide_geometric(const_op(c))
        assert base.decision == JCLASS
        for t in (1.0, 1.5, 3.0):
            assert decide_geometric(const_op(c * t)).decision == JCLASS


def test_jclass_certificates_always_present(rng):
    # every JCLASS verdict exhibits both certified facts: the annulus image
    # avoids the closed unit disk and the inner-disk image covers it
    for _ in range(20):
        op = random_instance(rng)
        v = decide_geometric(op)
        if v.decision == JCLASS:
            assert v.condition_a.certifies_above
            b = v.condition_b
            assert b.status == CERTIFIED and b.covers and b.winding.winding >= 1


# -- perturbation stability ----------------------------------------------------


def test_stability_within_margin():
    rep = perturbation_stability(const_op(2.0), rel_delta=0.05, trials=20, seed=1)
    assert rep.stable
    assert rep.base.decision == JCLASS


def test_stability_small_margin_instance():
    # 1.45 * 0.99 = 1.4355 still clears sqrt(2)
    rep = perturbation_stability(const_op(1.45, one_plus_zm(2)), 0.01, trials=20, seed=2)
    assert rep.stable


def test_stability_reports_flips_outside_radius():
    rep = perturbation_stability(const_op(2.0), rel_delta=0.6, trials=40, seed=3)
    assert not rep.stable
    assert len(rep.flips) > 0
    trial, decision, weights = rep.flips[0]
    assert decision != JCLASS and "tail" in weights


# -- products -------------------------------------------------------------------


def test_product_examples():
    w1 = WeightSequence.constant(1.0)
    rep = product_preserves_jclass(
        OperatorSpec(w1, P(0, 2)), OperatorSpec(w1, P(0, 2))
    )
    assert rep.jclass_preserved and rep.bound_check
    assert rep.bound_of_product == pytest.approx(4.0)
    assert rep.product_verdict.profile.r1 == 1.0

    w15 = WeightSequence.constant(1.5)
    rep = product_preserves_jclass(
        OperatorSpec(w15, P(0, 2)), OperatorSpec(w15, one_plus_zm(2))
    )
    assert rep.jclass_preserved and rep.bound_check

    rep = product_preserves_jclass(
        OperatorSpec(w1, P(0, 3)), OperatorSpec(w1, P(0, 3))
    )
    assert rep.jclass_preserved
    assert rep.bound_of_product == pytest.approx(9.0)


def test_product_requires_shared_weights_and_jclass():
    w1, w2 = WeightSequence.constant(1.5), WeightSequence.constant(2.0)
    with pytest.raises(ValueError):
        product_preserves_jclass(
            OperatorSpec(w1, P(0, 2)), OperatorSpec(w2, P(0, 2))
        )
    with pytest.raises(ValueError):
        product_preserves_jclass(
            OperatorSpec(w1, P(0, 0.1)), OperatorSpec(w1, P(0, 2))
        )


def test_verdict_serialization(rng):
    v = decide_geometric(const_op(1.5, one_plus_zm(2)))
    d = v.to_dict()
    assert d["decision"] == JCLASS
    assert d["conditionA"]["lowerBound"] > 1
    assert d["conditionB"]["winding"]["winding"] == 2


def test_constant_maps_never_jclass():
    # a constant operator has no eigenvalue 0 (unless it is the zero map),
    # and its inner-disk image is a single point, so coverage always fails
    for a0 in (0.0, 0.5, 3.0, -2 + 2j):
        v = decide_geometric(const_op(2.0, P(a0)))
        assert v.decision == NOT_JCLASS
        m = decide_moduli(const_op(2.0, P(a0)))
        assert m.decision == NOT_JCLASS


def test_winding_budget_exhaustion_propagates_undecided():
    # high-degree map: the annulus bound certifies easily (|f| in
    # [1.05, 1.95] on the circle) but the image curve winds so fast that
    # 256 contour samples cannot validate the argument increments
    coeffs = [1.5] + [0.0] * 111 + [0.45]
    op = const_op(1.0, P(*coeffs))
    v = decide_geometric(op, Budget(winding_max=256))
    assert v.decision == VERDICT_UNDECIDED
    assert v.condition_a.certifies_above
    assert not v.condition_b.winding.valid
    # with the default contour budget the same instance resolves
    assert decide_geometric(op).decision == NOT_JCLASS
