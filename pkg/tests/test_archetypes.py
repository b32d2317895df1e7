"""Absolute type classifiers and the archetype registry."""

from __future__ import annotations

import random

import pytest

from loomalg.archetypes import (
    Archetype,
    RootSystemData,
    associative_type,
    lie_split_type,
    registry_label_valid,
    tower_type,
)
from loomalg.errors import HypothesisNotMet, NotLie, NotSimple, NotSplit
from loomalg.exactnum import CycloField
from loomalg.findim import (
    change_basis,
    direct_sum,
    matrix_algebra,
    sl_algebra,
    zero_algebra,
)
from loomalg.fixtures import (
    fixture_registry,
    hermitian_tower,
    quantum_torus_tower,
    quaternion_algebra,
)
from loomalg.linalg import Subspace, unit_vector


# -- registry ---------------------------------------------------------------


def test_registry_accepts_the_closed_label_set():
    good = [
        ("Lie", "A1"), ("Lie", "A7"), ("Lie", "B2"), ("Lie", "C3"),
        ("Lie", "D4"), ("Lie", "E6"), ("Lie", "E7"), ("Lie", "E8"),
        ("Lie", "F4"), ("Lie", "G2"),
        ("Associative", "Mat1"), ("Associative", "Mat12"),
        ("CommAssociative", "Unit"),
        ("Jordan", "anything"), ("Alternative", "Oct"),
    ]
    for variety, label in good:
        assert registry_label_valid(variety, label), (variety, label)


def test_registry_rejects_out_of_range_labels():
    bad = [
        ("Lie", "A0"), ("Lie", "B1"), ("Lie", "C2"), ("Lie", "D3"),
        ("Lie", "E9"), ("Lie", "X4"), ("Lie", "A"), ("Lie", "Ax"),
        ("Associative", "Mat0"), ("Associative", "Mat"),
        ("CommAssociative", "Field"),
        ("NoSuchVariety", "A1"),
    ]
    for variety, label in bad:
        assert not registry_label_valid(variety, label), (variety, label)


def test_archetype_constructor_validates():
    a = Archetype("Lie", "A1", provenance="by permanence", steps=2)
    rep = a.as_report()
    assert rep == {
        "variety": "Lie", "label": "A1",
        "provenance": "by permanence", "steps": 2,
    }
    with pytest.raises(ValueError):
        Archetype("Lie", "B1")
    with pytest.raises(ValueError):
        Archetype("Monoid", "A1")


# -- Lie classification -----------------------------------------------------


@pytest.mark.parametrize("n,label", [(2, "A1"), (3, "A2"), (4, "A3")])
def test_special_linear_gets_a_series(n, label):
    field = CycloField(4)
    a = sl_algebra(n, field)
    arch = lie_split_type(a)
    assert arch.variety == "Lie"
    assert arch.label == label
    data = arch.data
    assert isinstance(data, RootSystemData)
    assert data.rank == n - 1
    assert a.dim == data.rank + len(data.roots)
    assert len(data.simple_roots) == data.rank


def test_a2_diagram_and_cartan_matrix():
    field = CycloField(1)
    arch = lie_split_type(sl_algebra(3, field))
    data = arch.data
    assert data.cartan_matrix in (
        ((2, -1), (-1, 2)),
    )
    assert data.diagram == ((0, 1, 1),)


def test_label_survives_change_of_basis():
    field = CycloField(4)
    a = sl_algebra(2, field)
    rng = random.Random(99)
    for _ in range(3):
        while True:
            cols = [
                [field.from_rational(rng.randint(-2, 2)) for _ in range(a.dim)]
                for _ in range(a.dim)
            ]
            try:
                b = change_basis(a, cols)
                break
            except Exception:
                continue
        assert lie_split_type(b).label == "A1"


def test_cartan_hint_is_honoured():
    field = CycloField(1)
    a = sl_algebra(2, field)
    hint = Subspace(field, 3, [unit_vector(field, 3, 2)])  # span of H1
    arch = lie_split_type(a, cartan_hint=hint)
    assert arch.label == "A1"
    assert arch.data.cartan == hint


def test_lie_classifier_rejects_non_lie_and_non_simple():
    field = CycloField(1)
    with pytest.raises(NotLie):
        lie_split_type(matrix_algebra(2, field))
    with pytest.raises(NotSimple):
        lie_split_type(direct_sum(sl_algebra(2, field), sl_algebra(2, field)))


def test_seed_determinism():
    field = CycloField(4)
    a = sl_algebra(3, field)
    first = lie_split_type(a, seed=7)
    second = lie_split_type(a, seed=7)
    assert first.as_report() == second.as_report()
    assert first.data.cartan_matrix == second.data.cartan_matrix


# -- associative classification ---------------------------------------------


@pytest.mark.parametrize("n", [2, 3])
def test_matrix_algebra_is_mat_n(n):
    field = CycloField(1)
    arch = associative_type(matrix_algebra(n, field))
    assert arch.variety == "Associative"
    assert arch.label == f"Mat{n}"


def test_quaternions_are_refused_as_not_split():
    with pytest.raises(NotSplit) as err:
        associative_type(quaternion_algebra())
    assert "central simple, not split" in str(err.value)


def test_associative_classifier_checks_hypotheses():
    field = CycloField(1)
    with pytest.raises(HypothesisNotMet):
        associative_type(sl_algebra(2, field))  # not associative
    with pytest.raises(HypothesisNotMet):
        associative_type(
            direct_sum(matrix_algebra(2, field), matrix_algebra(2, field))
        )  # not simple


# -- towers by permanence ---------------------------------------------------


def test_tower_type_quantum_torus():
    qt = quantum_torus_tower(2)
    arch = tower_type(qt["tower"])
    assert arch.variety == "Associative"
    assert arch.label == "Mat2"
    assert arch.steps == 2
    assert arch.provenance == "by permanence"


def test_tower_type_hermitian():
    herm = hermitian_tower(1)
    arch = tower_type(herm["tower"])
    assert arch.variety == "Lie"
    assert arch.label == "A1"
    assert arch.steps == 2


def test_tower_type_everywhere_in_registry():
    # permanence: every fixture tower reports its base's archetype
    for name, fix in fixture_registry().items():
        tower = fix["tower"]
        arch = tower_type(tower)
        assert arch.steps == tower.n, name
        assert arch.provenance == "by permanence", name
        base = tower.base
        if name.startswith("synthetic"):
            assert (arch.variety, arch.label) == ("CommAssociative", "Unit")
        elif name.startswith("quantum-torus"):
            ell = fix["ell"]
            assert (arch.variety, arch.label) == ("Associative", f"Mat{ell}")
        else:
            ell = fix["ell"]
            assert (arch.variety, arch.label) == ("Lie", f"A{ell}")
        assert registry_label_valid(arch.variety, arch.label)


def test_tower_type_needs_a_good_base():
    from loomalg.grading import FiniteOrderAuto
    from loomalg.loops import LoopTower, ToralMonomialAuto, TowerStage

    field = CycloField(2)
    dead = zero_algebra(2, field)
    twist = ToralMonomialAuto(FiniteOrderAuto.identity(dead), (), (),
                              field.one)
    tower = LoopTower(dead, [TowerStage(twist, 2, field.zeta)])
    with pytest.raises(HypothesisNotMet):
        tower_type(tower)
