"""Exact linear algebra against sympy oracles and structural invariants."""

from __future__ import annotations

import random
from fractions import Fraction

import sympy

from loomalg.exactnum import CycloField
from loomalg.linalg import (
    SpanSolver,
    SparseEchelon,
    Subspace,
    charpoly,
    identity_matrix,
    kernel_basis,
    mat_apply,
    mat_mul,
    rref,
    solve_matvec,
    trace,
    transpose,
    unit_vector,
    vec_add,
    vec_is_zero,
    vec_scale,
    zero_vector,
)

F1 = CycloField(1)
F4 = CycloField(4)

SEED = 20260214


def rand_matrix(rng, field, rows, cols, span=5):
    return tuple(
        tuple(
            field.from_rational(Fraction(rng.randint(-span, span)))
            for _ in range(cols)
        )
        for _ in range(rows)
    )


def to_sympy_rational(m):
    return sympy.Matrix([[x.coeffs[0] for x in row] for row in m])


def to_sympy_gauss(m):
    # F4 element a + b*zeta maps to a + b*I
    return sympy.Matrix(
        [[x.coeffs[0] + x.coeffs[1] * sympy.I for x in row] for row in m]
    )


# -- rref / rank / kernel ---------------------------------------------------


def test_rref_rank_matches_sympy():
    rng = random.Random(SEED)
    for _ in range(15):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        m = rand_matrix(rng, F1, rows, cols, span=3)
        reduced, pivots = rref(m)
        assert len(reduced) == len(pivots)
        assert len(pivots) == to_sympy_rational(m).rank()
        # pivot columns carry unit vectors
        for k, p in enumerate(pivots):
            col = [row[p] for row in reduced]
            assert col[k] == F1.one
            assert all(not col[i] for i in range(len(reduced)) if i != k)


def test_rref_is_idempotent():
    rng = random.Random(SEED + 1)
    m = rand_matrix(rng, F4, 4, 6, span=2)
    reduced, pivots = rref(m)
    again, pivots2 = rref(reduced)
    assert again == reduced and pivots2 == pivots


def test_kernel_basis_matches_sympy_nullity():
    rng = random.Random(SEED + 2)
    for _ in range(15):
        rows, cols = rng.randint(1, 4), rng.randint(1, 5)
        m = rand_matrix(rng, F1, rows, cols, span=2)
        ker = kernel_basis(m, cols, F1)
        assert len(ker) == cols - to_sympy_rational(m).rank()
        for v in ker:
            assert vec_is_zero(mat_apply(m, v))


def test_kernel_of_identity_is_trivial():
    assert kernel_basis(identity_matrix(F4, 3), 3, F4) == []


# -- solve ------------------------------------------------------------------


def test_solve_matvec_round_trip():
    rng = random.Random(SEED + 3)
    for _ in range(10):
        n = rng.randint(1, 4)
        m = rand_matrix(rng, F4, n, n, span=2)
        x = tuple(F4.from_rational(Fraction(rng.randint(-3, 3))) for _ in range(n))
        b = mat_apply(m, x)
        sol = solve_matvec(m, b, F4)
        assert sol is not None
        assert mat_apply(m, sol) == b


def test_solve_matvec_detects_inconsistency():
    m = ((F1.one, F1.one), (F1.one, F1.one))
    b = (F1.one, F1.zero)
    assert solve_matvec(m, b, F1) is None


# -- charpoly ---------------------------------------------------------------


def test_charpoly_matches_sympy_over_rationals():
    rng = random.Random(SEED + 4)
    lam = sympy.symbols("lam")
    for _ in range(8):
        n = rng.randint(1, 4)
        m = rand_matrix(rng, F1, n, n, span=3)
        ours = charpoly(m, F1)
        want = sympy.Poly(
            to_sympy_rational(m).charpoly(lam).as_expr(), lam
        ).all_coeffs()
        assert [c.coeffs[0] for c in reversed(ours)] == [
            Fraction(str(w)) for w in want
        ]


def test_charpoly_matches_sympy_over_gaussians():
    rng = random.Random(SEED + 5)
    lam = sympy.symbols("lam")
    for _ in range(5):
        n = rng.randint(1, 3)
        m = tuple(
            tuple(
                F4.from_coeffs([rng.randint(-2, 2), rng.randint(-2, 2)])
                for _ in range(n)
            )
            for _ in range(n)
        )
        ours = charpoly(m, F4)
        want = sympy.Poly(
            to_sympy_gauss(m).charpoly(lam).as_expr(), lam
        ).all_coeffs()
        for c, w in zip(reversed(ours), want):
            w = sympy.expand(w)
            assert c.coeffs[0] == Fraction(str(sympy.re(w)))
            assert c.coeffs[1] == Fraction(str(sympy.im(w)))


# -- matrix helpers ---------------------------------------------------------


def test_mat_mul_transpose_trace_against_sympy():
    rng = random.Random(SEED + 6)
    a = rand_matrix(rng, F1, 3, 4, span=3)
    b = rand_matrix(rng, F1, 4, 2, span=3)
    assert to_sympy_rational(mat_mul(a, b)) == (
        to_sympy_rational(a) * to_sympy_rational(b)
    )
    assert to_sympy_rational(transpose(a)) == to_sympy_rational(a).T
    sq = rand_matrix(rng, F1, 3, 3, span=3)
    assert trace(sq).coeffs[0] == to_sympy_rational(sq).trace()


def test_vector_helpers():
    v = unit_vector(F4, 3, 1)
    assert v == (F4.zero, F4.one, F4.zero)
    assert vec_is_zero(zero_vector(F4, 3))
    w = vec_add(v, vec_scale(F4.zeta, v))
    assert w[1] == F4.one + F4.zeta


# -- Subspace ---------------------------------------------------------------


def test_subspace_canonical_equality():
    # two spanning sets of the same plane give identical canonical bases
    rng = random.Random(SEED + 7)
    v1 = tuple(F1.from_rational(Fraction(x)) for x in (1, 2, 0, 1))
    v2 = tuple(F1.from_rational(Fraction(x)) for x in (0, 1, 1, -1))
    s = Subspace(F1, 4, [v1, v2])
    mixed = [
        vec_add(vec_scale(F1.from_rational(Fraction(3)), v1), v2),
        vec_sub_helper(v1, v2),
    ]
    t = Subspace(F1, 4, mixed)
    assert s == t
    assert s.dim == 2
    assert s.contains(v1) and s.contains(v2)
    assert not s.contains(unit_vector(F1, 4, 3))


def vec_sub_helper(a, b):
    return tuple(x - y for x, y in zip(a, b))


def test_subspace_sum_and_intersection():
    e = [unit_vector(F1, 3, i) for i in range(3)]
    xy = Subspace(F1, 3, [e[0], e[1]])
    yz = Subspace(F1, 3, [e[1], e[2]])
    assert xy.sum_with(yz).dim == 3
    meet = xy.intersect(yz)
    assert meet.dim == 1
    assert meet.contains(e[1])
    assert xy.is_subspace_of(xy.sum_with(yz))


# -- SpanSolver -------------------------------------------------------------


def test_span_solver_express_certificates():
    rng = random.Random(SEED + 8)
    solver = SpanSolver(F4, 5)
    gens = [rand_matrix(rng, F4, 1, 5, span=3)[0] for _ in range(4)]
    for g in gens:
        solver.add(g)
    # an honest combination must be certified and re-evaluate exactly
    combo_vec = vec_add(gens[0], vec_scale(F4.zeta, gens[2]))
    coords = solver.express(combo_vec)
    assert coords is not None
    rebuilt = zero_vector(F4, 5)
    for g, c in coords.items():
        rebuilt = vec_add(rebuilt, vec_scale(c, gens[g]))
    assert rebuilt == combo_vec


def test_span_solver_rejects_outside_vectors():
    solver = SpanSolver(F1, 3)
    solver.add(unit_vector(F1, 3, 0))
    assert solver.express(unit_vector(F1, 3, 2)) is None
    assert not solver.contains(unit_vector(F1, 3, 2))
    assert solver.dim == 1


def test_span_solver_dependent_add_returns_false():
    solver = SpanSolver(F1, 2)
    assert solver.add(unit_vector(F1, 2, 0))
    assert not solver.add(vec_scale(F1.from_rational(Fraction(5)),
                                    unit_vector(F1, 2, 0)))


# -- SparseEchelon ----------------------------------------------------------


def test_sparse_echelon_kernel_agrees_with_dense():
    rng = random.Random(SEED + 9)
    for _ in range(8):
        rows, cols = rng.randint(1, 4), rng.randint(2, 5)
        m = rand_matrix(rng, F4, rows, cols, span=2)
        dense = kernel_basis(m, cols, F4)
        ech = SparseEchelon()
        for row in m:
            ech.add_row({j: v for j, v in enumerate(row) if v})
        sparse = ech.kernel(list(range(cols)), F4)
        got = Subspace(
            F4, cols,
            [tuple(s.get(j, F4.zero) for j in range(cols)) for s in sparse],
        )
        want = Subspace(F4, cols, dense)
        assert got == want


def test_sparse_echelon_rank_and_reduce():
    ech = SparseEchelon()
    one = F1.one
    assert ech.add_row({("a", 0): one, ("b", 1): one}) is not None
    assert ech.add_row({("a", 0): one + one}) is not None
    # dependent row reduces to nothing
    assert ech.add_row({("b", 1): one}) is None
    assert ech.rank == 2
    assert ech.reduce_vector({("a", 0): one}) == {}
    res = ech.reduce_vector({("c", 2): one})
    assert list(res) == [("c", 2)]
