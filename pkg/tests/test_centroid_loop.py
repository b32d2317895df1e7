"""Centroid stabilizers, untwisting, and the kind dichotomy."""

from __future__ import annotations

from fractions import Fraction

import pytest

from helpers import restricted_stabilizer_span
from loomalg.centroid_loop import (
    FIRST_KIND_ISO_ADVISORY,
    StrangeRingData,
    centroid_action,
    centroid_tower,
    first_kind_iso_hint,
    kind_classify,
    multiloop_centroid_check,
    psi_check,
    stabilizer_in_box,
    stabilizes,
    strange_ring_audit,
    untwist_check,
    window_span,
)
from loomalg.errors import HypothesisNotMet, LoomError
from loomalg.exactnum import CycloField
from loomalg.findim import centroid_algebra, zero_algebra
from loomalg.fixtures import (
    hermitian_orbit_count,
    hermitian_tower,
    quantum_torus_tower,
    swap_sum_fixture,
    synthetic_kind_towers,
)
from loomalg.grading import FiniteOrderAuto
from loomalg.linalg import SpanSolver
from loomalg.loops import (
    DegreeBox,
    LaurentElement,
    LoopTower,
    ToralMonomialAuto,
    TowerStage,
    box_coordinates,
    laurent_multiply,
)

F1 = CycloField(1)


def scalar_monomial(field, degree):
    return LaurentElement.monomial(field, 2, 1, degree, (field.one,))


# -- stabilizer windows -----------------------------------------------------


def test_quantum_torus_stabilizer_is_the_sublattice():
    qt = quantum_torus_tower(2)
    tower, field = qt["tower"], qt["field"]
    box = DegreeBox((4, 4))
    check = multiloop_centroid_check(tower, box)
    assert check["ok"] is True
    assert check["stabilizer_dim"] == 25
    assert check["expected_count"] == 25
    assert check["generators"] == ["z1^2", "z2^2"]
    assert check["dims_by_degree"] == {
        -4: 5, -3: 0, -2: 5, -1: 0, 0: 5, 1: 0, 2: 5, 3: 0, 4: 5
    }


def test_multiloop_centroid_check_rejects_twisted_towers():
    herm = hermitian_tower(1)
    with pytest.raises(HypothesisNotMet):
        multiloop_centroid_check(herm["tower"], DegreeBox((2, 2)))


def test_hermitian_stabilizer_matches_orbit_oracle():
    herm = hermitian_tower(1)
    stab = stabilizer_in_box(herm["tower"], DegreeBox((4, 4)))
    assert stab.dim == hermitian_orbit_count((4, 4))
    assert stab.dims_by_degree == {
        -4: 3, -3: 2, -2: 3, -1: 2, 0: 3, 1: 2, 2: 3, 3: 2, 4: 3
    }


def test_hermitian_rejects_bare_lattice_monomials():
    # z1^2 z2^j alone does not stabilize; only symmetrized combinations do
    herm = hermitian_tower(1)
    tower, field = herm["tower"], herm["field"]
    calg, maps = centroid_algebra(tower.base)
    window = DegreeBox((4, 4))
    for j in (0, 1):
        assert not stabilizes(tower, maps, scalar_monomial(field, (2, j)),
                              window)
    sym = scalar_monomial(field, (2, 0)).add(scalar_monomial(field, (-2, 0)))
    assert stabilizes(tower, maps, sym, window)


def test_stabilizer_requires_pfgc_base():
    field = CycloField(2)
    dead = zero_algebra(1, field)
    ident = FiniteOrderAuto.identity(dead)
    twist = ToralMonomialAuto(ident, (), (), field.one)
    tower = LoopTower(dead, [TowerStage(twist, 2, field.zeta)])
    with pytest.raises(HypothesisNotMet):
        stabilizer_in_box(tower, DegreeBox((2,)))


def test_stabilizer_box_arity_must_match():
    qt = quantum_torus_tower(2)
    with pytest.raises(LoomError):
        stabilizer_in_box(qt["tower"], DegreeBox((2,)))


# -- stabilizer invariants --------------------------------------------------


def test_stabilizer_closure_under_products():
    qt = quantum_torus_tower(2)
    tower, field, base = qt["tower"], qt["field"], qt["base"]
    calg, maps = centroid_algebra(base)
    small = stabilizer_in_box(tower, DegreeBox((2, 2)))
    big = stabilizer_in_box(tower, DegreeBox((4, 4)))
    big_box = DegreeBox((4, 4))
    big_span = window_span(big.elements, big_box, field, 1)
    for a in small.elements:
        for b in small.elements:
            prod = laurent_multiply(calg, a, b)
            assert stabilizes(tower, maps, prod, DegreeBox((2, 2)))
            assert big_span.contains(box_coordinates(prod, big_box))


def test_stabilizer_action_is_faithful_on_window():
    # distinct stabilizer basis vectors act by independent transformations
    for fix in (quantum_torus_tower(2), hermitian_tower(1)):
        tower, field = fix["tower"], fix["field"]
        calg, maps = centroid_algebra(tower.base)
        box = DegreeBox((2, 2))
        stab = stabilizer_in_box(tower, box)
        window = tower.basis_in_box(box)
        image_box = DegreeBox((4, 4))
        solver = SpanSolver(
            field, image_box.volume() * tower.base.dim * len(window)
        )
        for u in stab.elements:
            action_flat = []
            for x in window:
                ux = centroid_action(maps, u, x)
                action_flat.extend(box_coordinates(ux, image_box))
            assert solver.add(tuple(action_flat)), (
                "stabilizer element acted dependently"
            )


def test_box_growth_stability_quantum_torus():
    qt = quantum_torus_tower(2)
    small = DegreeBox((1, 1))
    at_d = restricted_stabilizer_span(qt["tower"], (2, 2), small)
    at_2d = restricted_stabilizer_span(qt["tower"], (4, 4), small)
    assert at_d == at_2d


def test_centroid_tower_matches_stabilizer_window():
    for fix in (quantum_torus_tower(2), hermitian_tower(1)):
        tower, field = fix["tower"], fix["field"]
        box = DegreeBox((4, 4))
        stab = stabilizer_in_box(tower, box)
        ctower, calg, maps = centroid_tower(tower)
        got = window_span(stab.elements, box, field, calg.dim)
        want = window_span(ctower.basis_in_box(box), box, field, calg.dim)
        assert got == want


# -- psi comparison ---------------------------------------------------------


def test_psi_check_on_swap_fixture():
    fix = swap_sum_fixture()
    out = psi_check(fix["algebra"], fix["grading"], DegreeBox((2,)))
    assert out["ok"] is True
    assert out["into_stabilizer"] and out["product_rule"] and out["span_match"]
    assert out["dims_stabilizer_by_degree"] == (
        out["dims_loop_of_centroid_by_degree"]
    )


def test_psi_check_needs_one_step_box():
    fix = swap_sum_fixture()
    with pytest.raises(LoomError):
        psi_check(fix["algebra"], fix["grading"], DegreeBox((2, 2)))


# -- untwisting -------------------------------------------------------------


def test_untwist_quantum_torus():
    qt = quantum_torus_tower(2)
    out = untwist_check(qt["tower"], DegreeBox((2, 2)))
    assert out["ok"] is True
    assert out["rank"] == 4
    assert sorted(out["sections"]) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert out["base_vectors_checked"] == 25 * 4
    assert out["stabilizer_dim"] == 9


def test_untwist_hermitian():
    herm = hermitian_tower(1)
    out = untwist_check(herm["tower"], DegreeBox((2, 2)))
    assert out["ok"] is True
    assert out["rank"] == 4


# -- kind dichotomy ---------------------------------------------------------


def test_kind_first_on_quantum_torus():
    qt = quantum_torus_tower(2)
    verdict = kind_classify(qt["tower"])
    assert verdict.kind == "First"
    det = verdict.details
    assert det["rho_prime"] == qt["field"].one
    assert det["t1_degree"] == (2, 0)
    assert det["t2_degree"] == (0, 2)
    assert det["isomorphism_advisory"] == FIRST_KIND_ISO_ADVISORY
    t1, t2 = verdict.witness
    assert t1.degrees() == [(2, 0)]
    assert t2.degrees() == [(0, 2)]


def test_kind_second_on_hermitian():
    herm = hermitian_tower(1)
    verdict = kind_classify(herm["tower"])
    assert verdict.kind == "Second"
    assert verdict.details["rho"] == herm["field"].one
    assert verdict.details["relation"] == "w^2 = (u1^2 - 4 rho) u2"
    data = verdict.witness
    assert isinstance(data, StrangeRingData)
    # the defining relation, re-verified here from the witnesses
    field = herm["field"]
    from loomalg.findim import matrix_algebra

    scalar = matrix_algebra(1, field)
    lhs = laurent_multiply(scalar, data.w, data.w)
    u1sq = laurent_multiply(scalar, data.u1, data.u1)
    four_rho = scalar_monomial(field, (0, 0)).scale(data.rho * 4)
    rhs = laurent_multiply(scalar, u1sq.sub(four_rho), data.u2)
    assert lhs == rhs


def test_kind_first_witnesses_span_stabilizer_window():
    qt = quantum_torus_tower(2)
    tower, field = qt["tower"], qt["field"]
    verdict = kind_classify(tower)
    t1, t2 = verdict.witness
    (d1,) = t1.degrees()
    (d2,) = t2.degrees()
    box = DegreeBox((4, 4))
    monos = []
    for a in range(-2, 3):
        for b in range(-2, 3):
            deg = (a * d1[0] + b * d2[0], a * d1[1] + b * d2[1])
            if box.contains(deg):
                monos.append(scalar_monomial(field, deg))
    stab = stabilizer_in_box(tower, box)
    assert window_span(monos, box, field, 1) == window_span(
        stab.elements, box, field, 1
    )


def test_kind_dichotomy_on_synthetics():
    for fix in synthetic_kind_towers():
        verdict = kind_classify(fix["tower"])
        assert verdict.kind == fix["expected_kind"], fix["name"]


def test_kind_requires_two_steps():
    qt = quantum_torus_tower(2)
    with pytest.raises(HypothesisNotMet):
        kind_classify(qt["tower"].prefix(1))


def test_kind_requires_central_simple_base():
    fix = swap_sum_fixture()
    field = fix["field"]
    ident = FiniteOrderAuto.identity(fix["algebra"])
    twist = ToralMonomialAuto(ident, (), (), field.one)
    stages = [
        TowerStage(twist, 1, field.one),
        TowerStage(
            ToralMonomialAuto(
                FiniteOrderAuto.identity(fix["algebra"]),
                ((1,),), (0,), field.one
            ),
            1, field.one,
        ),
    ]
    tower = LoopTower(fix["algebra"], stages)
    with pytest.raises(HypothesisNotMet):
        kind_classify(tower)


# -- strange ring audit -----------------------------------------------------


def test_strange_ring_audit_on_hermitian_witnesses():
    herm = hermitian_tower(1)
    data = kind_classify(herm["tower"]).witness
    out = strange_ring_audit(data, 2)
    assert out["relation_ok"] is True
    assert out["independence"]["ok"] is True
    assert out["independence"]["rank"] == out["independence"]["expected"]
    assert out["norm_multiplicative"] is True


def test_strange_ring_audit_on_synthetic_rho_two():
    # direct construction with rho = 2 over the rationals: u1 = z1 + 2/z1,
    # u2 = z2^2, w = (z1 - 2/z1) z2; the relation w^2 = (u1^2 - 8) u2 holds
    rho = F1.from_rational(Fraction(2))
    u1 = scalar_monomial(F1, (1, 0)).add(
        scalar_monomial(F1, (-1, 0)).scale(rho)
    )
    u2 = scalar_monomial(F1, (0, 2))
    u2_inv = scalar_monomial(F1, (0, -2))
    w = scalar_monomial(F1, (1, 1)).sub(
        scalar_monomial(F1, (-1, 1)).scale(rho)
    )
    data = StrangeRingData(rho, u1, u2, u2_inv, w)
    out = strange_ring_audit(data, 2)
    assert out["relation_ok"] is True
    assert out["independence"]["ok"] is True
    assert out["norm_multiplicative"] is True


def test_strange_ring_audit_rejects_broken_relation():
    rho = F1.from_rational(Fraction(2))
    u1 = scalar_monomial(F1, (1, 0))
    u2 = scalar_monomial(F1, (0, 2))
    u2_inv = scalar_monomial(F1, (0, -2))
    w = scalar_monomial(F1, (1, 1))
    data = StrangeRingData(rho, u1, u2, u2_inv, w)
    with pytest.raises(LoomError):
        strange_ring_audit(data, 2)


# -- first kind isomorphism advisory ----------------------------------------


def test_first_kind_iso_hint_square_and_nonsquare():
    field = CycloField(12)
    z = field.zeta
    hit = first_kind_iso_hint(field, z**2, z**4)
    assert hit["square_in_field"] is True
    assert hit["square_root"] is not None
    assert hit["square_root"] * hit["square_root"] == hit["ratio"]
    assert hit["advisory"] == FIRST_KIND_ISO_ADVISORY
    miss = first_kind_iso_hint(field, z, field.one)
    assert miss["square_in_field"] is False
    assert miss["square_root"] is None


def test_first_kind_iso_hint_rejects_zero_divisor():
    field = CycloField(2)
    with pytest.raises(LoomError):
        first_kind_iso_hint(field, field.one, field.zero)
