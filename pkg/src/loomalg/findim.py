"""Finite-dimensional nonassociative algebras given by structure constants.

An algebra is a coordinate space with a bilinear product: e_i * e_j =
sum_k c[i][j][k] e_k over a fixed cyclotomic field.  No identities are
assumed; Lie, associative and commutative cases are all detected, never
presumed.  All decision procedures here are exact.
"""

from __future__ import annotations

import random

from .errors import DimensionMismatch, Undecided
from .exactnum import CycloField
from .linalg import (
    SpanSolver,
    SparseEchelon,
    Subspace,
    charpoly,
    identity_matrix,
    kernel_basis,
    mat_apply,
    mat_mul,
    transpose,
    unit_vector,
    vec_add,
    vec_is_zero,
    zero_vector,
)
from . import polyfactor


class LinearMap:
    """A linear endomorphism of a coordinate space; column j is the image of e_j."""

    __slots__ = ("field", "matrix")

    def __init__(self, field: CycloField, matrix):
        self.field = field
        self.matrix = tuple(tuple(row) for row in matrix)

    @classmethod
    def identity(cls, field: CycloField, n: int):
        return cls(field, identity_matrix(field, n))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def apply(self, vec):
        return mat_apply(self.matrix, vec)

    def compose(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.field, mat_mul(self.matrix, other.matrix))

    def flat(self):
        return tuple(c for row in self.matrix for c in row)

    def __eq__(self, other):
        if not isinstance(other, LinearMap):
            return NotImplemented
        return self.field is other.field and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.field.order, self.matrix))

    def __repr__(self):
        return f"<LinearMap dim {self.dim}>"


class StructureAlgebra:
    """dim, structure constants, optional unit and basis labels."""

    def __init__(self, field: CycloField, constants, unit=None, labels=None):
        self.field = field
        self.dim = len(constants)
        table = []
        for i, row in enumerate(constants):
            if len(row) != self.dim:
                raise DimensionMismatch("structure constant table is not square")
            tr = []
            for j, vec in enumerate(row):
                v = tuple(vec)
                if len(v) != self.dim:
                    raise DimensionMismatch(
                        f"product vector e{i}*e{j} has wrong length"
                    )
                tr.append(v)
            table.append(tuple(tr))
        self.table = tuple(table)
        self.unit = tuple(unit) if unit is not None else None
        if labels is not None and len(labels) != self.dim:
            raise DimensionMismatch("label count does not match dimension")
        self.labels = tuple(labels) if labels is not None else None
        if self.unit is not None:
            for j in range(self.dim):
                e = unit_vector(field, self.dim, j)
                if self.multiply(self.unit, e) != e or self.multiply(e, self.unit) != e:
                    raise DimensionMismatch("declared unit is not a two-sided unit")
        self._left_cache: dict = {}
        self._right_cache: dict = {}

    def zero(self):
        return zero_vector(self.field, self.dim)

    def basis_vector(self, i: int):
        return unit_vector(self.field, self.dim, i)

    def basis(self):
        return [self.basis_vector(i) for i in range(self.dim)]

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else f"e{i}"

    def multiply(self, x, y):
        acc = list(self.zero())
        for i, xi in enumerate(x):
            if not xi:
                continue
            row = self.table[i]
            for j, yj in enumerate(y):
                if not yj:
                    continue
                c = xi * yj
                prod = row[j]
                for k, pk in enumerate(prod):
                    if pk:
                        acc[k] = acc[k] + c * pk
        return tuple(acc)

    def left_mult_matrix(self, i: int):
        """Matrix of left multiplication by basis vector i."""
        m = self._left_cache.get(i)
        if m is None:
            cols = [self.table[i][j] for j in range(self.dim)]
            m = tuple(zip(*cols))
            self._left_cache[i] = m
        return m

    def right_mult_matrix(self, i: int):
        m = self._right_cache.get(i)
        if m is None:
            cols = [self.table[j][i] for j in range(self.dim)]
            m = tuple(zip(*cols))
            self._right_cache[i] = m
        return m

    def left_mult(self, x):
        cols = [self.multiply(x, e) for e in self.basis()]
        return LinearMap(self.field, tuple(zip(*cols)))

    def right_mult(self, x):
        cols = [self.multiply(e, x) for e in self.basis()]
        return LinearMap(self.field, tuple(zip(*cols)))

    def element_str(self, vec) -> str:
        from .exactnum import cyclo_str

        parts = []
        for i, c in enumerate(vec):
            if not c:
                continue
            if c == 1:
                parts.append(self.label(i))
            else:
                cs = cyclo_str(c)
                if " + " in cs:
                    cs = f"({cs})"
                parts.append(f"{cs}*{self.label(i)}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"<StructureAlgebra dim {self.dim} over Q(zeta_{self.field.order})>"


# ---------------------------------------------------------------------------
# constructors


def matrix_algebra(n: int, field: CycloField) -> StructureAlgebra:
    """Full associative matrix algebra with the E_ij basis."""
    idx = {(a, b): a * n + b for a in range(n) for b in range(n)}
    dim = n * n
    constants = []
    for (a, b) in sorted(idx, key=idx.get):
        row = []
        for (c, d) in sorted(idx, key=idx.get):
            vec = [field.zero] * dim
            if b == c:
                vec[idx[(a, d)]] = field.one
            row.append(tuple(vec))
        constants.append(row)
    unit = [field.zero] * dim
    for a in range(n):
        unit[idx[(a, a)]] = field.one
    labels = [f"E{a + 1}{b + 1}" for (a, b) in sorted(idx, key=idx.get)]
    return StructureAlgebra(field, constants, unit=unit, labels=labels)


def _matrix_units_to_vec(field, n, entries):
    vec = [field.zero] * (n * n)
    for (a, b), c in entries.items():
        vec[a * n + b] = vec[a * n + b] + c
    return vec


def gl_algebra(n: int, field: CycloField) -> StructureAlgebra:
    """All n x n matrices as a Lie algebra under the commutator."""
    mat = matrix_algebra(n, field)
    dim = n * n
    constants = []
    for i in range(dim):
        row = []
        ei = mat.basis_vector(i)
        for j in range(dim):
            ej = mat.basis_vector(j)
            vec = tuple(
                a - b
                for a, b in zip(mat.multiply(ei, ej), mat.multiply(ej, ei))
            )
            row.append(vec)
        constants.append(row)
    return StructureAlgebra(field, constants, labels=mat.labels)


def sl_algebra(n: int, field: CycloField) -> StructureAlgebra:
    """Traceless n x n matrices under the commutator.

    Basis: the off-diagonal matrix units E_ab, then H_k = E_kk - E_(k+1)(k+1).
    """
    if n < 2:
        raise ValueError("sl(n) needs n >= 2")
    basis_mats = []
    labels = []
    for a in range(n):
        for b in range(n):
            if a != b:
                basis_mats.append({(a, b): field.one})
                labels.append(f"E{a + 1}{b + 1}")
    for k in range(n - 1):
        basis_mats.append({(k, k): field.one, (k + 1, k + 1): -field.one})
        labels.append(f"H{k + 1}")
    mat = matrix_algebra(n, field)
    vecs = [_matrix_units_to_vec(field, n, bm) for bm in basis_mats]
    solver = SpanSolver(field, n * n)
    for v in vecs:
        solver.add(v)
    dim = len(vecs)
    constants = []
    for i in range(dim):
        row = []
        for j in range(dim):
            comm = tuple(
                a - b
                for a, b in zip(
                    mat.multiply(vecs[i], vecs[j]), mat.multiply(vecs[j], vecs[i])
                )
            )
            coords = solver.express(comm)
            assert coords is not None, "commutator left the traceless span"
            vec = [field.zero] * dim
            for g, c in coords.items():
                vec[g] = c
            row.append(tuple(vec))
        constants.append(row)
    return StructureAlgebra(field, constants, labels=labels)


def zero_algebra(n: int, field: CycloField) -> StructureAlgebra:
    z = tuple(zero_vector(field, n) for _ in range(n))
    return StructureAlgebra(field, tuple(z for _ in range(n)))


def direct_sum(a: StructureAlgebra, b: StructureAlgebra) -> StructureAlgebra:
    if a.field is not b.field:
        raise DimensionMismatch("direct summands live over different fields")
    field = a.field
    dim = a.dim + b.dim
    constants = []
    for i in range(dim):
        row = []
        for j in range(dim):
            vec = [field.zero] * dim
            if i < a.dim and j < a.dim:
                prod = a.table[i][j]
                for k, c in enumerate(prod):
                    vec[k] = c
            elif i >= a.dim and j >= a.dim:
                prod = b.table[i - a.dim][j - a.dim]
                for k, c in enumerate(prod):
                    vec[a.dim + k] = c
            row.append(tuple(vec))
        constants.append(row)
    unit = None
    if a.unit is not None and b.unit is not None:
        unit = tuple(a.unit) + tuple(b.unit)
    labels = None
    if a.labels is not None and b.labels is not None:
        labels = tuple(f"0:{l}" for l in a.labels) + tuple(f"1:{l}" for l in b.labels)
    return StructureAlgebra(field, constants, unit=unit, labels=labels)


def change_basis(a: StructureAlgebra, columns) -> StructureAlgebra:
    """The same algebra written on the basis given by the columns (old coords)."""
    field = a.field
    n = a.dim
    cols = [tuple(col) for col in columns]
    if len(cols) != n:
        raise DimensionMismatch("basis change needs dim many columns")
    solver = SpanSolver(field, n)
    for col in cols:
        if not solver.add(col):
            raise DimensionMismatch("proposed basis is linearly dependent")
    constants = []
    for i in range(n):
        row = []
        for j in range(n):
            prod = a.multiply(cols[i], cols[j])
            coords = solver.express(prod)
            vec = [field.zero] * n
            for g, c in coords.items():
                vec[g] = c
            row.append(tuple(vec))
        constants.append(row)
    unit = solver.express(a.unit) if a.unit is not None else None
    if unit is not None:
        uv = [field.zero] * n
        for g, c in unit.items():
            uv[g] = c
        unit = tuple(uv)
    return StructureAlgebra(field, constants, unit=unit)


# ---------------------------------------------------------------------------
# structural predicates


def is_commutative(a: StructureAlgebra) -> bool:
    return all(
        a.table[i][j] == a.table[j][i]
        for i in range(a.dim)
        for j in range(i + 1, a.dim)
    )


def is_anticommutative(a: StructureAlgebra) -> bool:
    for i in range(a.dim):
        if not vec_is_zero(a.table[i][i]):
            return False
        for j in range(i + 1, a.dim):
            if any(x + y for x, y in zip(a.table[i][j], a.table[j][i])):
                return False
    return True


def is_associative(a: StructureAlgebra) -> bool:
    basis = a.basis()
    for x in basis:
        for y in basis:
            xy = a.multiply(x, y)
            for z in basis:
                if a.multiply(xy, z) != a.multiply(x, a.multiply(y, z)):
                    return False
    return True


def satisfies_jacobi(a: StructureAlgebra) -> bool:
    basis = a.basis()
    for i, x in enumerate(basis):
        for j in range(i + 1, a.dim):
            y = basis[j]
            for k in range(j + 1, a.dim):
                z = basis[k]
                s = vec_add(
                    vec_add(
                        a.multiply(a.multiply(x, y), z),
                        a.multiply(a.multiply(y, z), x),
                    ),
                    a.multiply(a.multiply(z, x), y),
                )
                if not vec_is_zero(s):
                    return False
    return True


def is_lie(a: StructureAlgebra) -> bool:
    return is_anticommutative(a) and satisfies_jacobi(a)


def is_perfect(a: StructureAlgebra) -> bool:
    """Whether the span of all products is the whole algebra."""
    solver = SpanSolver(a.field, a.dim)
    for i in range(a.dim):
        for j in range(a.dim):
            if solver.add(a.table[i][j]) and solver.dim == a.dim:
                return True
    return solver.dim == a.dim


def product_span(a: StructureAlgebra) -> Subspace:
    return Subspace(
        a.field, a.dim, [a.table[i][j] for i in range(a.dim) for j in range(a.dim)]
    )


def mult_module_closure(a: StructureAlgebra, vectors) -> Subspace:
    """Smallest subspace containing the vectors and stable under all
    left and right multiplications (the ideal generated by them)."""
    solver = SpanSolver(a.field, a.dim)
    queue = []
    for v in vectors:
        if solver.add(v):
            queue.append(v)
    while queue:
        w = queue.pop()
        for i in range(a.dim):
            for m in (a.left_mult_matrix(i), a.right_mult_matrix(i)):
                u = mat_apply(m, w)
                if solver.add(u):
                    queue.append(u)
    return Subspace(a.field, a.dim, [row for row, _ in solver.rows])


def ideal_generated(a: StructureAlgebra, x) -> Subspace:
    return mult_module_closure(a, [x])


def centre(a: StructureAlgebra) -> Subspace:
    """Elements commuting and associating with everything."""
    n = a.dim
    rows = []
    basis = a.basis()
    # z*e_i - e_i*z = 0
    for i in range(n):
        li = a.left_mult_matrix(i)
        ri = a.right_mult_matrix(i)
        for k in range(n):
            rows.append(tuple(ri[k][t] - li[k][t] for t in range(n)))
    # (z x) y - z (x y) and (x z) y - x (z y) and (x y) z - x (y z)
    for i in range(n):
        for j in range(n):
            xy = a.multiply(basis[i], basis[j])
            l_xy = a.left_mult(xy).matrix
            r_xy = a.right_mult(xy).matrix
            ri_mat = a.right_mult_matrix(i)
            li_mat = a.left_mult_matrix(i)
            rj = a.right_mult_matrix(j)
            lj = a.left_mult_matrix(j)
            m1 = mat_mul(rj, ri_mat)  # z -> (z e_i) e_j
            for k in range(n):
                rows.append(tuple(m1[k][t] - r_xy[k][t] for t in range(n)))
            m2 = mat_mul(rj, li_mat)  # z -> (e_i z) e_j
            m2b = mat_mul(li_mat, rj)  # z -> e_i (z e_j)
            for k in range(n):
                rows.append(tuple(m2[k][t] - m2b[k][t] for t in range(n)))
            m3 = mat_mul(li_mat, lj)  # z -> e_i (e_j z)
            for k in range(n):
                rows.append(tuple(l_xy[k][t] - m3[k][t] for t in range(n)))
    return Subspace(a.field, n, kernel_basis(rows, n, a.field))


def centroid(a: StructureAlgebra) -> list[LinearMap]:
    """Canonical basis of the maps chi with chi(xy) = chi(x)y = x chi(y)."""
    n = a.dim
    ech = SparseEchelon()
    for i in range(n):
        for j in range(n):
            p = a.table[i][j]
            for k in range(n):
                # chi(e_i e_j)_k - (chi(e_i) e_j)_k = 0
                row = {}
                for r in range(n):
                    if p[r]:
                        row[(k, r)] = p[r]
                for s in range(n):
                    c = a.table[s][j][k]
                    if c:
                        row[(s, i)] = row.get((s, i), a.field.zero) - c
                ech.add_row({key: v for key, v in row.items() if v})
                # chi(e_i e_j)_k - (e_i chi(e_j))_k = 0
                row = {}
                for r in range(n):
                    if p[r]:
                        row[(k, r)] = p[r]
                for s in range(n):
                    c = a.table[i][s][k]
                    if c:
                        row[(s, j)] = row.get((s, j), a.field.zero) - c
                ech.add_row({key: v for key, v in row.items() if v})
    keys = [(r, c) for r in range(n) for c in range(n)]
    sols = ech.kernel(keys, a.field)
    maps = []
    for sol in sols:
        m = [[a.field.zero] * n for _ in range(n)]
        for (r, c), v in sol.items():
            m[r][c] = v
        maps.append(LinearMap(a.field, m))
    # the identity must lie in the span
    flat = [mp.flat() for mp in maps]
    probe = Subspace(a.field, n * n, flat)
    assert probe.contains(LinearMap.identity(a.field, n).flat()), (
        "centroid span lost the identity map"
    )
    return maps


def is_central(a: StructureAlgebra) -> bool:
    return len(centroid(a)) == 1


def centroid_algebra(a: StructureAlgebra):
    """The centroid as a unital associative StructureAlgebra.

    Returns (algebra, basis_maps); coordinates of the algebra are taken in
    the canonical centroid basis.
    """
    maps = centroid(a)
    field = a.field
    r = len(maps)
    solver = SpanSolver(field, a.dim * a.dim)
    for mp in maps:
        solver.add(mp.flat())
    constants = []
    for i in range(r):
        row = []
        for j in range(r):
            comp = maps[i].compose(maps[j])
            coords = solver.express(comp.flat())
            assert coords is not None, "centroid is not closed under composition"
            vec = [field.zero] * r
            for g, c in coords.items():
                vec[g] = c
            row.append(tuple(vec))
        constants.append(row)
    ident = solver.express(LinearMap.identity(field, a.dim).flat())
    unit = [field.zero] * r
    for g, c in ident.items():
        unit[g] = c
    labels = [f"c{i}" for i in range(r)]
    alg = StructureAlgebra(field, constants, unit=tuple(unit), labels=labels)
    return alg, maps


def is_pfgc_findim(a: StructureAlgebra) -> bool:
    """Nonzero, perfect, and finitely generated over the centroid; the last
    condition is automatic in finite dimension over a field."""
    return a.dim > 0 and is_perfect(a)


# ---------------------------------------------------------------------------
# simplicity


def mult_algebra_basis(a: StructureAlgebra):
    """Basis of the multiplication algebra: the unital associative algebra of
    endomorphisms generated by all left and right multiplications."""
    n = a.dim
    field = a.field
    gens = [a.left_mult_matrix(i) for i in range(n)]
    gens += [a.right_mult_matrix(i) for i in range(n)]
    ident = identity_matrix(field, n)
    ech = SparseEchelon()
    basis = []

    def sparse(m):
        return {
            (i, j): m[i][j]
            for i in range(n)
            for j in range(n)
            if m[i][j]
        }

    queue = [ident]
    ech.add_row(sparse(ident))
    basis.append(ident)
    while queue:
        m = queue.pop()
        for g in gens:
            prod = mat_mul(m, g)
            if ech.add_row(sparse(prod)) is not None:
                basis.append(prod)
                queue.append(prod)
    return basis


def _module_span(matrices, v, field, n) -> Subspace:
    # the matrices span a unital algebra, so one application is enough
    return Subspace(field, n, [mat_apply(m, v) for m in matrices])


def is_simple(a: StructureAlgebra, seed: int = 20260214, trials: int = 25) -> bool:
    """Exact simplicity test: nonzero product and no proper ideal.

    Proper ideals are hunted by spinning basis vectors and kernel vectors of
    factored characteristic polynomials of seeded pseudo-random elements of
    the multiplication algebra; irreducibility is certified through a factor
    of multiplicity one by spinning one kernel vector in the module and one
    in the transpose module.
    """
    n = a.dim
    if n == 0:
        return False
    if all(
        vec_is_zero(a.table[i][j]) for i in range(n) for j in range(n)
    ):
        return False
    field = a.field
    basis_mats = mult_algebra_basis(a)
    tbasis = [transpose(m) for m in basis_mats]

    for i in range(n):
        d = _module_span(basis_mats, a.basis_vector(i), field, n).dim
        if d < n:
            return False

    rng = random.Random(seed)
    candidates = []
    for _ in range(trials):
        hi = min(4, len(basis_mats))
        terms = rng.randint(min(2, hi), hi)
        picks = rng.sample(range(len(basis_mats)), terms)
        m = None
        for p in picks:
            c = field.from_rational(rng.randint(-2, 2))
            scaled = tuple(
                tuple(c * x for x in row) for row in basis_mats[p]
            )
            m = scaled if m is None else tuple(
                tuple(x + y for x, y in zip(r1, r2)) for r1, r2 in zip(m, scaled)
            )
        candidates.append(m)
    for i in range(n):
        candidates.append(a.left_mult_matrix(i))
        candidates.append(a.right_mult_matrix(i))

    for theta in candidates:
        cp = charpoly(theta, field)
        factors = polyfactor.factor(cp, field)
        for f, mult in factors:
            ftheta = _matrix_poly(f, theta, field)
            ker = kernel_basis(ftheta, n, field)
            for v in ker:
                d = _module_span(basis_mats, v, field, n).dim
                if 0 < d < n:
                    return False
            if mult == 1 and len(ker) == polyfactor.pdeg(f):
                # multiplicity-one factor: one spin each way settles it
                if _module_span(basis_mats, ker[0], field, n).dim < n:
                    return False
                tker = kernel_basis(_matrix_poly(f, transpose(theta), field), n, field)
                if _module_span(tbasis, tker[0], field, n).dim < n:
                    return False
                return True
    raise Undecided(
        "simplicity search exhausted without a certifying element; "
        f"multiplication algebra dimension {len(basis_mats)} over module dimension {n}"
    )


def _matrix_poly(coeffs, m, field):
    n = len(m)
    acc = tuple(tuple(field.zero for _ in range(n)) for _ in range(n))
    for c in reversed(coeffs):
        acc = mat_mul(acc, m)
        if c:
            acc = tuple(
                tuple(acc[i][j] + (c if i == j else field.zero) for j in range(n))
                for i in range(n)
            )
    return acc


def property_report(a: StructureAlgebra, include_simple: bool = True) -> dict:
    """Structural flags with provenance labels for reporting."""
    report = {}

    def put(name, value, provenance, note=None):
        entry = {"value": value, "provenance": provenance}
        if note:
            entry["note"] = note
        report[name] = entry

    put("nonzero", a.dim > 0, "verified")
    put("perfect", is_perfect(a), "verified")
    put("unital", a.unit is not None, "verified")
    put("commutative", is_commutative(a), "verified")
    put("associative", is_associative(a), "verified")
    put("lie", is_lie(a), "verified")
    put("pfgc", is_pfgc_findim(a), "verified",
        note="finite generation over the centroid is automatic in finite dimension")
    if include_simple:
        simple = is_simple(a)
        put("simple", simple, "verified")
        put("central", is_central(a), "verified")
        put("prime", True if simple else None, "derived-by-theorem",
            note="simple implies prime; no independent primality decision is run")
    return report
