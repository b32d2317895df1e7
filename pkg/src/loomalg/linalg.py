"""Exact linear algebra over a cyclotomic field.

Vectors are tuples of CycloNumber and matrices are tuples of rows.  Every
elimination produces reduced row echelon form with leftmost pivots, so each
subspace has exactly one stored basis and subspace equality is equality of
representations.  Nothing here is ever numeric: all pivots are exact.
"""

from __future__ import annotations

from .exactnum import CycloField, CycloNumber


def zero_vector(field: CycloField, n: int) -> tuple:
    return (field.zero,) * n


def unit_vector(field: CycloField, n: int, i: int) -> tuple:
    return tuple(field.one if j == i else field.zero for j in range(n))


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(c, a):
    return tuple(c * x for x in a)


def vec_is_zero(a) -> bool:
    return all(x.is_zero() for x in a)


def mat_apply(m, v):
    """Matrix times column vector; column j of m is the image of basis vector j."""
    return tuple(
        sum((row[j] * v[j] for j in range(len(v)) if v[j]), start=row[0].field.zero)
        for row in m
    )


def mat_mul(a, b):
    n, k, p = len(a), len(b), len(b[0]) if b else 0
    zero = a[0][0].field.zero
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(p):
            acc = zero
            for t in range(k):
                if ai[t] and b[t][j]:
                    acc = acc + ai[t] * b[t][j]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def identity_matrix(field: CycloField, n: int):
    return tuple(unit_vector(field, n, i) for i in range(n))


def transpose(m):
    return tuple(zip(*m))


def trace(m):
    return sum((m[i][i] for i in range(len(m))), start=m[0][0].field.zero)


def rref(rows):
    """Reduced row echelon form.

    Returns (reduced_rows, pivot_columns); zero rows are dropped and pivots
    are the lexicographically first possible set (leftmost column first).
    """
    work = [list(r) for r in rows if not vec_is_zero(r)]
    if not work:
        return (), ()
    ncols = len(work[0])
    pivots = []
    r = 0
    for col in range(ncols):
        sel = None
        for i in range(r, len(work)):
            if work[i][col]:
                sel = i
                break
        if sel is None:
            continue
        work[r], work[sel] = work[sel], work[r]
        lead = work[r][col]
        if lead != 1:
            inv = lead.inverse()
            work[r] = [inv * x for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][col]:
                c = work[i][col]
                work[i] = [a - c * b for a, b in zip(work[i], work[r])]
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    reduced = tuple(tuple(row) for row in work[:r])
    return reduced, tuple(pivots)


def kernel_basis(rows, ncols, field):
    """Canonical basis of the right kernel of the matrix given by rows."""
    reduced, pivots = rref(rows)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for k, p in enumerate(pivots):
            c = reduced[k][f]
            if c:
                v[p] = -c
        basis.append(tuple(v))
    return basis


def solve_matvec(m, b, field):
    """One solution x of m x = b, or None when inconsistent."""
    ncols = len(m[0]) if m else 0
    aug = [tuple(row) + (bv,) for row, bv in zip(m, b)]
    reduced, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [field.zero] * ncols
    for k, p in enumerate(pivots):
        x[p] = reduced[k][ncols]
    return tuple(x)


def charpoly(m, field: CycloField):
    """Characteristic polynomial of a square matrix, low degree first, monic."""
    n = len(m)
    coeffs = [field.zero] * (n + 1)
    coeffs[n] = field.one
    ak = m
    ck = field.one
    for k in range(1, n + 1):
        if k > 1:
            shifted = tuple(
                tuple(ak[i][j] + (ck if i == j else field.zero) for j in range(n))
                for i in range(n)
            )
            ak = mat_mul(m, shifted)
        ck = -(trace(ak) / k)
        coeffs[n - k] = ck
    return coeffs


class Subspace:
    """A subspace of a fixed coordinate space, held in canonical reduced form."""

    __slots__ = ("field", "ambient", "basis", "pivots")

    def __init__(self, field: CycloField, ambient: int, vectors=()):
        self.field = field
        self.ambient = ambient
        self.basis, self.pivots = rref(vectors) if vectors else ((), ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def residual(self, vec):
        """vec minus its projection on the span; zero iff vec belongs."""
        v = list(vec)
        for row, p in zip(self.basis, self.pivots):
            c = v[p]
            if c:
                v = [a - c * b for a, b in zip(v, row)]
        return tuple(v)

    def contains(self, vec) -> bool:
        return vec_is_zero(self.residual(vec))

    def contains_all(self, vectors) -> bool:
        return all(self.contains(v) for v in vectors)

    def sum_with(self, other: "Subspace") -> "Subspace":
        return Subspace(self.field, self.ambient, self.basis + other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        if not self.basis or not other.basis:
            return Subspace(self.field, self.ambient)
        # coefficient solutions of B1^T a - B2^T b = 0 give the common vectors
        rows = []
        na, nb = len(self.basis), len(other.basis)
        for coord in range(self.ambient):
            row = [self.basis[i][coord] for i in range(na)]
            row += [-other.basis[j][coord] for j in range(nb)]
            rows.append(tuple(row))
        vectors = []
        for sol in kernel_basis(rows, na + nb, self.field):
            v = zero_vector(self.field, self.ambient)
            for i in range(na):
                if sol[i]:
                    v = vec_add(v, vec_scale(sol[i], self.basis[i]))
            vectors.append(v)
        return Subspace(self.field, self.ambient, vectors)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return other.contains_all(self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.field is other.field
            and self.ambient == other.ambient
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.field.order, self.ambient, self.basis))

    def __repr__(self):
        return f"<Subspace dim {self.dim} of {self.ambient}>"


class SpanSolver:
    """Incremental span with coordinate certificates.

    Generators are added one at a time; express() rewrites a vector as a
    combination of the generators actually added (by index), or returns None
    when the vector lies outside the span.
    """

    def __init__(self, field: CycloField, ambient: int):
        self.field = field
        self.ambient = ambient
        self.rows = []  # (reduced vector, combo dict over generator indices)
        self.pivot_of_row = []
        self.count = 0

    @property
    def dim(self) -> int:
        return len(self.rows)

    def _reduce(self, vec):
        v = list(vec)
        combo = {}
        for (row, rcombo), p in zip(self.rows, self.pivot_of_row):
            c = v[p]
            if c:
                v = [a - c * b for a, b in zip(v, row)]
                for g, coeff in rcombo.items():
                    combo[g] = combo.get(g, self.field.zero) - c * coeff
        return v, combo

    def add(self, vec) -> bool:
        """Add a generator; True when it enlarged the span."""
        idx = self.count
        self.count += 1
        v, combo = self._reduce(vec)
        pivot = next((i for i, x in enumerate(v) if x), None)
        if pivot is None:
            return False
        inv = v[pivot].inverse()
        v = [inv * x for x in v]
        combo = {g: inv * c for g, c in combo.items()}
        combo[idx] = combo.get(idx, self.field.zero) + inv
        # keep rows ordered by pivot so reduction stays canonical
        pos = 0
        while pos < len(self.pivot_of_row) and self.pivot_of_row[pos] < pivot:
            pos += 1
        self.rows.insert(pos, (v, combo))
        self.pivot_of_row.insert(pos, pivot)
        return True

    def contains(self, vec) -> bool:
        v, _ = self._reduce(vec)
        return all(x.is_zero() for x in v)

    def express(self, vec):
        """Combination dict {generator index: coefficient} with vec = sum, or None."""
        v, combo = self._reduce(vec)
        if not all(x.is_zero() for x in v):
            return None
        return {g: -c for g, c in combo.items() if c}


class SparseEchelon:
    """Row echelon accumulator over arbitrary orderable column keys.

    Rows are sparse dicts; the pivot of a row is its smallest key.  Used for
    the large homogeneous constraint systems where columns are indexed by
    (degree, component) pairs rather than flat integers.
    """

    def __init__(self):
        self.rows: dict = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def add_row(self, row: dict):
        """Reduce and insert; returns the new pivot key or None if dependent."""
        work = {k: v for k, v in row.items() if v}
        while work:
            k = min(work)
            piv = self.rows.get(k)
            if piv is None:
                c = work[k].inverse()
                self.rows[k] = {kk: c * vv for kk, vv in work.items()}
                return k
            c = work.pop(k)
            for kk, vv in piv.items():
                if kk == k:
                    continue
                cur = work.get(kk)
                nv = (cur - c * vv) if cur is not None else -(c * vv)
                if nv:
                    work[kk] = nv
                else:
                    work.pop(kk, None)
        return None

    def reduce_vector(self, row: dict) -> dict:
        """Residual of a vector against the accumulated row space."""
        work = {k: v for k, v in row.items() if v}
        out = {}
        while work:
            k = min(work)
            piv = self.rows.get(k)
            c = work.pop(k)
            if piv is None:
                out[k] = c
                continue
            for kk, vv in piv.items():
                if kk == k:
                    continue
                cur = work.get(kk)
                nv = (cur - c * vv) if cur is not None else -(c * vv)
                if nv:
                    work[kk] = nv
                else:
                    work.pop(kk, None)
        return out

    def _back_eliminate(self):
        for p in sorted(self.rows, reverse=True):
            row = self.rows[p]
            hits = [q for q in row if q != p and q in self.rows]
            while hits:
                for q in hits:
                    c = row.pop(q)
                    for kk, vv in self.rows[q].items():
                        if kk == q:
                            continue
                        cur = row.get(kk)
                        nv = (cur - c * vv) if cur is not None else -(c * vv)
                        if nv:
                            row[kk] = nv
                        else:
                            row.pop(kk, None)
                hits = [q for q in row if q != p and q in self.rows]

    def kernel(self, keys, field: CycloField):
        """Canonical kernel basis over the full ordered key list.

        Returns a list of sparse dicts, one per free key, in key order.
        """
        self._back_eliminate()
        pivot_set = set(self.rows)
        out = []
        for f in keys:
            if f in pivot_set:
                continue
            vec = {f: field.one}
            for p, row in self.rows.items():
                c = row.get(f)
                if c:
                    vec[p] = -c
            out.append(vec)
        return out
