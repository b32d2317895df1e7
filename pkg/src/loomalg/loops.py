"""Iterated loop constructions over Laurent polynomial coefficients.

An n-step tower refines a base structure algebra through n graded-loop
stages.  Elements are stored sparsely as multidegree -> coefficient-vector
maps; nothing is ever truncated silently.  Every infinite-dimensional claim
(twist stabilization, twist period) is verified on an explicit finite degree
window and reported as such.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iter_product

from .errors import (
    DimensionMismatch,
    HypothesisNotMet,
    InvalidGrading,
    NotAnAutomorphism,
)
from .exactnum import CycloNumber, root_of_unity_order
from .findim import StructureAlgebra, is_associative, property_report
from .grading import FiniteOrderAuto
from .linalg import (
    SparseEchelon,
    kernel_basis,
    mat_mul,
    vec_add,
    vec_is_zero,
    vec_scale,
)

_MATRIX_ORDER_CAP = 4096


class DegreeBox:
    """A finite symmetric window of multidegrees: |d_i| <= radius_i."""

    def __init__(self, radius):
        self.radius = tuple(int(r) for r in radius)
        if any(r < 0 for r in self.radius):
            raise ValueError("box radii must be nonnegative")

    @property
    def arity(self) -> int:
        return len(self.radius)

    def contains(self, degree) -> bool:
        return len(degree) == self.arity and all(
            -r <= d <= r for d, r in zip(degree, self.radius)
        )

    def degrees(self):
        """All multidegrees in the window, lexicographically sorted."""
        ranges = [range(-r, r + 1) for r in self.radius]
        return list(iter_product(*ranges))

    def prefix(self) -> "DegreeBox":
        return DegreeBox(self.radius[:-1])

    def doubled(self) -> "DegreeBox":
        return DegreeBox(tuple(2 * r for r in self.radius))

    def halved(self) -> "DegreeBox":
        return DegreeBox(tuple(r // 2 for r in self.radius))

    def volume(self) -> int:
        v = 1
        for r in self.radius:
            v *= 2 * r + 1
        return v

    def __eq__(self, other):
        return isinstance(other, DegreeBox) and self.radius == other.radius

    def __hash__(self):
        return hash(self.radius)

    def __repr__(self):
        return f"DegreeBox{self.radius}"


class LaurentElement:
    """A base-algebra-valued Laurent polynomial in `arity` variables.

    support maps multidegree tuples to nonzero coefficient vectors; an
    arity-0 element is a plain vector wrapped with the empty degree ().
    """

    __slots__ = ("field", "arity", "base_dim", "support")

    def __init__(self, field, arity: int, base_dim: int, support=None):
        self.field = field
        self.arity = arity
        self.base_dim = base_dim
        clean = {}
        if support:
            for deg, vec in support.items():
                deg = tuple(int(d) for d in deg)
                if len(deg) != arity:
                    raise DimensionMismatch(
                        f"degree {deg} has arity {len(deg)}, expected {arity}"
                    )
                vec = tuple(vec)
                if len(vec) != base_dim:
                    raise DimensionMismatch(
                        f"coefficient length {len(vec)}, expected {base_dim}"
                    )
                if not vec_is_zero(vec):
                    clean[deg] = vec
        self.support = clean

    @classmethod
    def zero(cls, field, arity, base_dim):
        return cls(field, arity, base_dim, {})

    @classmethod
    def monomial(cls, field, arity, base_dim, degree, vec):
        return cls(field, arity, base_dim, {tuple(degree): tuple(vec)})

    @classmethod
    def from_vector(cls, field, vec):
        vec = tuple(vec)
        return cls(field, 0, len(vec), {(): vec})

    def is_zero(self) -> bool:
        return not self.support

    def degrees(self):
        return sorted(self.support)

    def coefficient(self, degree):
        degree = tuple(degree)
        vec = self.support.get(degree)
        if vec is None:
            return tuple(self.field.zero for _ in range(self.base_dim))
        return vec

    def _check_compatible(self, other: "LaurentElement"):
        if (
            self.field is not other.field
            or self.arity != other.arity
            or self.base_dim != other.base_dim
        ):
            raise DimensionMismatch("laurent elements live in different spaces")

    def add(self, other: "LaurentElement") -> "LaurentElement":
        self._check_compatible(other)
        support = dict(self.support)
        for deg, vec in other.support.items():
            cur = support.get(deg)
            support[deg] = vec if cur is None else vec_add(cur, vec)
        return LaurentElement(self.field, self.arity, self.base_dim, support)

    def sub(self, other: "LaurentElement") -> "LaurentElement":
        return self.add(other.scale(-1))

    def scale(self, c) -> "LaurentElement":
        if not isinstance(c, CycloNumber):
            c = self.field.from_rational(Fraction(c))
        if c.is_zero():
            return LaurentElement.zero(self.field, self.arity, self.base_dim)
        support = {deg: vec_scale(c, vec) for deg, vec in self.support.items()}
        return LaurentElement(self.field, self.arity, self.base_dim, support)

    def shift(self, offset) -> "LaurentElement":
        """Multiply by the monomial z^offset (degree translation)."""
        offset = tuple(int(d) for d in offset)
        if len(offset) != self.arity:
            raise DimensionMismatch("shift arity mismatch")
        support = {
            tuple(d + o for d, o in zip(deg, offset)): vec
            for deg, vec in self.support.items()
        }
        return LaurentElement(self.field, self.arity, self.base_dim, support)

    def last_degrees(self):
        """Sorted distinct exponents of the last variable."""
        return sorted({deg[-1] for deg in self.support})

    def slice_last(self, j: int) -> "LaurentElement":
        """Coefficient of z_p^j, as an element one variable shorter."""
        if self.arity == 0:
            raise DimensionMismatch("arity-0 element has no variables to slice")
        support = {
            deg[:-1]: vec for deg, vec in self.support.items() if deg[-1] == j
        }
        return LaurentElement(self.field, self.arity - 1, self.base_dim, support)

    def tensor_last(self, j: int) -> "LaurentElement":
        """Append one variable, placing everything in exponent j."""
        support = {deg + (int(j),): vec for deg, vec in self.support.items()}
        return LaurentElement(self.field, self.arity + 1, self.base_dim, support)

    def as_vector(self):
        if self.arity != 0:
            raise DimensionMismatch("not an arity-0 element")
        return self.coefficient(())

    def in_box(self, box: DegreeBox) -> bool:
        return all(box.contains(deg) for deg in self.support)

    def sparse_items(self):
        """(degree, coordinate) -> scalar view, for echelon bookkeeping."""
        out = {}
        for deg, vec in self.support.items():
            for i, v in enumerate(vec):
                if v:
                    out[(deg, i)] = v
        return out

    def __eq__(self, other):
        if not isinstance(other, LaurentElement):
            return NotImplemented
        return (
            self.field is other.field
            and self.arity == other.arity
            and self.base_dim == other.base_dim
            and self.support == other.support
        )

    def __hash__(self):
        return hash(
            (self.arity, self.base_dim, tuple(sorted(self.support.items())))
        )

    def __repr__(self):
        if self.is_zero():
            return "<LaurentElement 0>"
        return f"<LaurentElement arity {self.arity}, {len(self.support)} terms>"


def laurent_str(algebra: StructureAlgebra, x: LaurentElement) -> str:
    """Readable rendering with base-algebra labels and z1..zp monomials."""
    if x.is_zero():
        return "0"
    terms = []
    for deg in x.degrees():
        coeff = algebra.element_str(x.support[deg])
        mono = " ".join(
            f"z{k + 1}^{d}" if d != 1 else f"z{k + 1}"
            for k, d in enumerate(deg)
            if d != 0
        )
        if not mono:
            terms.append(f"({coeff})")
        else:
            terms.append(f"({coeff}) (x) {mono}")
    return " + ".join(terms)


def laurent_multiply(
    algebra: StructureAlgebra, x: LaurentElement, y: LaurentElement
) -> LaurentElement:
    """Convolution product: degrees add, coefficients multiply in the base."""
    x._check_compatible(y)
    if algebra.dim != x.base_dim:
        raise DimensionMismatch("algebra dimension does not match coefficients")
    support = {}
    for d1, v1 in x.support.items():
        for d2, v2 in y.support.items():
            prod = algebra.multiply(v1, v2)
            if vec_is_zero(prod):
                continue
            deg = tuple(a + b for a, b in zip(d1, d2))
            cur = support.get(deg)
            support[deg] = prod if cur is None else vec_add(cur, prod)
    return LaurentElement(x.field, x.arity, x.base_dim, support)


def box_coordinates(x: LaurentElement, box: DegreeBox):
    """Flatten a window element over (degree, coordinate) positions."""
    if not x.in_box(box):
        raise DimensionMismatch("element has support outside the box")
    field = x.field
    out = []
    for deg in box.degrees():
        vec = x.support.get(deg)
        if vec is None:
            out.extend(field.zero for _ in range(x.base_dim))
        else:
            out.extend(vec)
    return tuple(out)


def element_from_box_coordinates(field, base_dim, box: DegreeBox, flat):
    support = {}
    degs = box.degrees()
    if len(flat) != len(degs) * base_dim:
        raise DimensionMismatch("flat vector does not match the box")
    for k, deg in enumerate(degs):
        vec = tuple(flat[k * base_dim : (k + 1) * base_dim])
        if not vec_is_zero(vec):
            support[deg] = vec
    return LaurentElement(field, box.arity, base_dim, support)


def _int_matrix_det(m):
    n = len(m)
    if n == 0:
        return 1
    rows = [[Fraction(v) for v in row] for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        det *= rows[col][col]
        inv = 1 / rows[col][col]
        for r in range(col + 1, n):
            f = rows[r][col] * inv
            if f:
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    assert det.denominator == 1
    return int(det)


def _int_mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def _int_identity(n):
    return tuple(
        tuple(1 if i == j else 0 for j in range(n)) for i in range(n)
    )


class ToralMonomialAuto:
    """Twist of the form  a (x) z^j  ->  zeta^<c, j> theta(a) (x) z^(M j).

    theta acts on base coefficients, the integer matrix M (a unit, of finite
    order) remaps the Laurent degrees, and the character <c, .> twists by a
    root of unity.  Finitely presentable, closed under composition, and wide
    enough for every tower built here.
    """

    def __init__(self, theta: FiniteOrderAuto, m_matrix, c_vector,
                 zeta: CycloNumber):
        self.theta = theta
        self.field = theta.field
        self.m_matrix = tuple(tuple(int(v) for v in row) for row in m_matrix)
        self.c_vector = tuple(int(v) for v in c_vector)
        p = len(self.m_matrix)
        if any(len(row) != p for row in self.m_matrix):
            raise DimensionMismatch("degree matrix must be square")
        if len(self.c_vector) != p:
            raise DimensionMismatch("character vector length mismatch")
        det = _int_matrix_det(self.m_matrix)
        if det not in (1, -1):
            raise NotAnAutomorphism(
                f"degree matrix determinant {det} is not a unit"
            )
        self.zeta = zeta
        order = root_of_unity_order(zeta)
        if order is None:
            raise NotAnAutomorphism("character root is not a root of unity")
        self.root_order = order
        m_order = None
        ident = _int_identity(p)
        power = self.m_matrix if p else ident
        for k in range(1, _MATRIX_ORDER_CAP + 1):
            if power == ident:
                m_order = k
                break
            power = _int_mat_mul(power, self.m_matrix)
        if m_order is None:
            raise NotAnAutomorphism("degree matrix does not have finite order")
        self.m_order = m_order
        self.period = self._compute_period()

    @property
    def arity(self) -> int:
        return len(self.m_matrix)

    def degree_image(self, degree):
        return tuple(
            sum(row[k] * degree[k] for k in range(self.arity))
            for row in self.m_matrix
        )

    def character_value(self, degree) -> CycloNumber:
        e = sum(c * d for c, d in zip(self.c_vector, degree))
        return self.zeta**e

    def apply(self, x: LaurentElement) -> LaurentElement:
        if x.arity != self.arity:
            raise DimensionMismatch(
                f"twist expects arity {self.arity}, element has {x.arity}"
            )
        support = {}
        for deg, vec in x.support.items():
            img = vec_scale(self.character_value(deg), self.theta.apply(vec))
            ndeg = self.degree_image(deg)
            cur = support.get(ndeg)
            support[ndeg] = img if cur is None else vec_add(cur, img)
        return LaurentElement(x.field, x.arity, x.base_dim, support)

    def apply_power(self, k: int, x: LaurentElement) -> LaurentElement:
        k %= self.period
        for _ in range(k):
            x = self.apply(x)
        return x

    def _compute_period(self) -> int:
        """Exact order: needs M^k = 1, theta^k = 1, and the accumulated
        character c^T (1 + M + ... + M^(k-1)) to vanish mod the root order."""
        p = self.arity
        bound = self.m_order * self.theta.period * self.root_order
        ident = _int_identity(p)
        power = ident
        acc = tuple(0 for _ in range(p))
        for k in range(1, bound + 1):
            acc = tuple(
                acc[j] + sum(self.c_vector[i] * power[i][j] for i in range(p))
                for j in range(p)
            )
            power = _int_mat_mul(power, self.m_matrix) if p else ident
            if (
                power == ident
                and k % self.theta.period == 0
                and all(v % self.root_order == 0 for v in acc)
            ):
                return k
        raise NotAnAutomorphism("twist period exceeds its algebraic bound")

    def __repr__(self):
        return f"<ToralMonomialAuto arity {self.arity}, period {self.period}>"


class TowerStage:
    __slots__ = ("twist", "modulus", "zeta", "actual_period")

    def __init__(self, twist: ToralMonomialAuto, modulus: int,
                 zeta: CycloNumber, actual_period=None):
        self.twist = twist
        self.modulus = modulus
        self.zeta = zeta
        self.actual_period = actual_period


class LoopTower:
    """n nested loop stages over a finite-dimensional base.

    Validation happens once at construction: roots are checked primitive,
    each twist is checked to stabilize the previous stage and to satisfy
    sigma^m = id, both on an explicit degree window whose radii are recorded
    in validation_boxes.  Towers are immutable afterwards.
    """

    def __init__(self, base: StructureAlgebra, stages):
        self.base = base
        self.field = base.field
        self.stages = tuple(
            s if isinstance(s, TowerStage) else TowerStage(*s) for s in stages
        )
        self.n = len(self.stages)
        self._prefix_cache = {}
        self._window_cache = {}
        self._eigen_cache = {}
        self._proj_memo = {}
        self._canon_memo = {}
        self.validation_boxes = []
        for p in range(1, self.n + 1):
            self._validate_stage(p)

    # -- construction-time checks ------------------------------------------

    def _validate_stage(self, p: int):
        stage = self.stages[p - 1]
        twist, m, zeta = stage.twist, stage.modulus, stage.zeta
        if m < 1:
            raise InvalidGrading(f"stage {p} modulus must be positive")
        if twist.arity != p - 1:
            raise InvalidGrading(
                f"stage {p} twist has arity {twist.arity}, expected {p - 1}"
            )
        if twist.theta.algebra is not self.base:
            raise InvalidGrading(
                f"stage {p} twist coefficients act on a different base"
            )
        order = root_of_unity_order(zeta)
        if order != m:
            raise InvalidGrading(
                f"stage {p} root has order {order}, expected {m}"
            )
        box = DegreeBox(tuple(2 * self.stages[k].modulus for k in range(p - 1)))
        prev = self.prefix(p - 1)
        basis = prev.basis_in_box(box)
        for b in basis:
            if not tower_membership(prev, twist.apply(b)):
                raise InvalidGrading(
                    f"stage {p} twist does not stabilize the previous stage "
                    f"(checked on box {box.radius})"
                )
        actual = None
        for k in sorted(d for d in range(1, m + 1) if m % d == 0):
            if all(twist.apply_power(k, b) == b for b in basis):
                actual = k
                break
        if actual is None:
            raise InvalidGrading(
                f"stage {p} twist does not satisfy sigma^{m} = id "
                f"(checked on box {box.radius})"
            )
        stage.actual_period = actual
        self.validation_boxes.append(box.radius)

    # -- structure ---------------------------------------------------------

    def moduli(self):
        return tuple(s.modulus for s in self.stages)

    def index_classes(self):
        """The canonical-form index set: the product of range(m_p)."""
        return list(iter_product(*(range(s.modulus) for s in self.stages)))

    def prefix(self, p: int) -> "LoopTower":
        if p == self.n:
            return self
        if p > self.n:
            raise DimensionMismatch("prefix longer than the tower")
        got = self._prefix_cache.get(p)
        if got is None:
            got = LoopTower.__new__(LoopTower)
            got.base = self.base
            got.field = self.field
            got.stages = self.stages[:p]
            got.n = p
            got._prefix_cache = self._prefix_cache
            got._window_cache = {}
            got._eigen_cache = {}
            got._proj_memo = {}
            got._canon_memo = {}
            got.validation_boxes = self.validation_boxes[:p]
            self._prefix_cache[p] = got
        return got

    def default_box(self) -> DegreeBox:
        return DegreeBox(tuple(2 * s.modulus for s in self.stages))

    # -- window bases ------------------------------------------------------

    def basis_in_box(self, box: DegreeBox):
        """Basis of the members supported inside the box.

        Recursive: a window basis of the previous stage feeds per-residue
        eigenspace solves for the last twist; each eigenvector is tensored
        onto every admissible exponent of the last variable."""
        if box.arity != self.n:
            raise DimensionMismatch(
                f"box arity {box.arity}, tower has {self.n} stages"
            )
        cached = self._window_cache.get(box.radius)
        if cached is not None:
            return cached
        if self.n == 0:
            out = [
                LaurentElement.from_vector(self.field, self.base.basis_vector(i))
                for i in range(self.base.dim)
            ]
            self._window_cache[box.radius] = out
            return out
        stage = self.stages[-1]
        prev = self.prefix(self.n - 1)
        window = prev.basis_in_box(box.prefix())
        eigen = self._eigenspaces(box.prefix(), window, stage)
        out = []
        r_last = box.radius[-1]
        for j in range(-r_last, r_last + 1):
            for vec in eigen[j % stage.modulus]:
                out.append(vec.tensor_last(j))
        self._window_cache[box.radius] = out
        return out

    def _eigenspaces(self, prefix_box, window, stage):
        """Per-residue eigenbases of the stage twist inside span(window).

        The twist equation is evaluated on full supports (including degrees
        the twist pushes outside the window), so no spurious eigenvectors
        appear; generators are clustered by support interaction to keep each
        kernel solve small."""
        cached = self._eigen_cache.get(prefix_box.radius)
        if cached is not None:
            return cached
        twist, m, zeta = stage.twist, stage.modulus, stage.zeta
        field = self.field
        images = [twist.apply(b) for b in window]
        parent = {}

        def find(d):
            root = d
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(d, d) != d:
                parent[d], d = root, parent[d]
            return root

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        for b, img in zip(window, images):
            degs = list(b.support) + list(img.support)
            for d in degs[1:]:
                union(degs[0], d)
        clusters = {}
        for t, b in enumerate(window):
            rep = find(next(iter(b.support)))
            clusters.setdefault(rep, []).append(t)
        result = {}
        for ell in range(m):
            lam = zeta**ell
            basis_ell = []
            for members in clusters.values():
                diffs = [images[t].sub(window[t].scale(lam)) for t in members]
                degrees = sorted({d for df in diffs for d in df.support})
                rows = []
                for d in degrees:
                    cols = [df.coefficient(d) for df in diffs]
                    for coord in range(self.base.dim):
                        row = tuple(c[coord] for c in cols)
                        if any(row):
                            rows.append(row)
                if rows:
                    sols = kernel_basis(rows, len(members), field)
                else:
                    sols = [
                        tuple(
                            field.one if i == t else field.zero
                            for i in range(len(members))
                        )
                        for t in range(len(members))
                    ]
                for sol in sols:
                    acc = LaurentElement.zero(field, self.n - 1, self.base.dim)
                    for coeff, t in zip(sol, members):
                        if coeff:
                            acc = acc.add(window[t].scale(coeff))
                    if not acc.is_zero():
                        basis_ell.append(acc)
            result[ell] = basis_ell
        self._eigen_cache[prefix_box.radius] = result
        return result

    def __repr__(self):
        return (
            f"<LoopTower {self.n} stages, moduli {self.moduli()}, "
            f"base dim {self.base.dim}>"
        )


def tower_membership(tower: LoopTower, x: LaurentElement) -> bool:
    """Recursive eigenvalue test; exact, no window involved."""
    if x.arity != tower.n:
        raise DimensionMismatch(
            f"element arity {x.arity}, tower has {tower.n} stages"
        )
    if tower.n == 0:
        return True
    stage = tower.stages[-1]
    prev = tower.prefix(tower.n - 1)
    for j in x.last_degrees():
        piece = x.slice_last(j)
        if not tower_membership(prev, piece):
            return False
        if stage.twist.apply(piece) != piece.scale(stage.zeta**j):
            return False
    return True


def member_projection(tower: LoopTower, y: LaurentElement) -> LaurentElement:
    """Linear idempotent projection whose fixed points are the members.

    Recursively projects each outer-variable slice into the previous stage,
    then onto the twist eigenspace its exponent demands.  The image always
    lies in the tower (twists stabilize earlier stages), so y is a member
    exactly when member_projection(tower, y) == y; the defect y - P(y) is
    linear in y, which turns membership of unknown linear combinations into
    kernel systems.  Single-monomial projections are memoized per tower."""
    if y.arity != tower.n:
        raise DimensionMismatch(
            f"element arity {y.arity}, tower has {tower.n} stages"
        )
    if tower.n == 0:
        return y
    field = tower.field
    d = tower.base.dim
    out = LaurentElement.zero(field, tower.n, d)
    memo = tower._proj_memo
    for g, vec in y.support.items():
        for i, c in enumerate(vec):
            if not c:
                continue
            cached = memo.get((g, i))
            if cached is None:
                mono = LaurentElement.monomial(
                    field, tower.n, d, g,
                    tuple(field.one if q == i else field.zero
                          for q in range(d)),
                )
                cached = _project_once(tower, mono)
                memo[(g, i)] = cached
            if not cached.is_zero():
                out = out.add(cached.scale(c))
    return out


def _project_once(tower: LoopTower, y: LaurentElement) -> LaurentElement:
    stage = tower.stages[-1]
    twist, m, zeta = stage.twist, stage.modulus, stage.zeta
    prev = tower.prefix(tower.n - 1)
    inv_m = tower.field.from_rational(Fraction(1, m))
    out = LaurentElement.zero(tower.field, tower.n, tower.base.dim)
    for j in y.last_degrees():
        piece = member_projection(prev, y.slice_last(j))
        if piece.is_zero():
            continue
        comp = LaurentElement.zero(tower.field, tower.n - 1, tower.base.dim)
        cur = piece
        for t in range(m):
            if t:
                cur = twist.apply(cur)
            comp = comp.add(cur.scale(zeta ** (-j * t)))
        comp = comp.scale(inv_m)
        if not comp.is_zero():
            out = out.add(comp.tensor_last(j))
    return out


def canonical_form(tower: LoopTower, y: LaurentElement):
    """Unique decomposition y = sum over residue classes of z^i . x_i.

    Returns a dict keyed by every index class of the tower; each value is a
    verified member.  Works outermost variable first: slice it, recurse on
    the prefix, then split each prefix piece into twist eigencomponents and
    pull the outer exponent back into its residue class."""
    if y.arity != tower.n:
        raise DimensionMismatch(
            f"element arity {y.arity}, tower has {tower.n} stages"
        )
    out = {
        idx: LaurentElement.zero(tower.field, tower.n, tower.base.dim)
        for idx in tower.index_classes()
    }
    if tower.n == 0:
        out[()] = y
        return out
    field = tower.field
    d = tower.base.dim
    memo = tower._canon_memo
    for g, vec in y.support.items():
        for i, c in enumerate(vec):
            if not c:
                continue
            fam = memo.get((g, i))
            if fam is None:
                mono = LaurentElement.monomial(
                    field, tower.n, d, g,
                    tuple(field.one if q == i else field.zero
                          for q in range(d)),
                )
                fam = _canonical_once(tower, mono)
                memo[(g, i)] = fam
            for idx, x in fam.items():
                if not x.is_zero():
                    out[idx] = out[idx].add(x.scale(c))
    return out


def _canonical_once(tower: LoopTower, y: LaurentElement):
    out = {
        idx: LaurentElement.zero(tower.field, tower.n, tower.base.dim)
        for idx in tower.index_classes()
    }
    stage = tower.stages[-1]
    twist, m, zeta = stage.twist, stage.modulus, stage.zeta
    prev = tower.prefix(tower.n - 1)
    inv_m = tower.field.from_rational(Fraction(1, m))
    for j in y.last_degrees():
        prefix_family = canonical_form(prev, y.slice_last(j))
        for iprime, xpp in prefix_family.items():
            if xpp.is_zero():
                continue
            orbit = [xpp]
            for _ in range(m - 1):
                orbit.append(twist.apply(orbit[-1]))
            for ell in range(m):
                comp = LaurentElement.zero(
                    tower.field, tower.n - 1, tower.base.dim
                )
                for t in range(m):
                    comp = comp.add(orbit[t].scale(zeta ** (-ell * t)))
                comp = comp.scale(inv_m)
                if comp.is_zero():
                    continue
                i_last = (j - ell) % m
                key = iprime + (i_last,)
                out[key] = out[key].add(comp.tensor_last(j - i_last))
    for idx, x in out.items():
        if not x.is_zero():
            assert tower_membership(tower, x), (
                f"canonical piece at {idx} is not a member"
            )
    return out


def canonical_reconstruct(tower: LoopTower, family) -> LaurentElement:
    """Sum of z^i . x_i over the family; inverse of canonical_form."""
    acc = LaurentElement.zero(tower.field, tower.n, tower.base.dim)
    for idx, x in family.items():
        acc = acc.add(x.shift(idx))
    return acc


def multiloop(base: StructureAlgebra, autos, zetas) -> LoopTower:
    """Tower of commuting base automorphisms, trivial on the variables."""
    autos = list(autos)
    zetas = list(zetas)
    if len(autos) != len(zetas):
        raise DimensionMismatch("need one root per automorphism")
    for i in range(len(autos)):
        for j in range(i + 1, len(autos)):
            if mat_mul(autos[i].matrix, autos[j].matrix) != mat_mul(
                autos[j].matrix, autos[i].matrix
            ):
                raise InvalidGrading(f"automorphisms {i} and {j} do not commute")
    stages = []
    field = base.field
    for p, (auto, zeta) in enumerate(zip(autos, zetas), start=1):
        m = auto.period
        order = root_of_unity_order(zeta)
        if order != m:
            raise InvalidGrading(
                f"root for automorphism {p} has order {order}, "
                f"expected the automorphism period {m}"
            )
        twist = ToralMonomialAuto(
            auto, _int_identity(p - 1), (0,) * (p - 1), field.one
        )
        stages.append(TowerStage(twist, m, zeta))
    tower = LoopTower(base, stages)
    for stage in tower.stages:
        if stage.actual_period != stage.modulus:
            raise InvalidGrading(
                "multiloop stage period dropped below its declared modulus"
            )
    return tower


def free_basis_check(tower: LoopTower, box: DegreeBox):
    """Free-module verification over the monomial sections 1 (x) z^i.

    For a unital associative base, every window member must equal
    sum_i x_i . (1 (x) z^i) with x_i the canonical pieces, and the pieces
    must be reproducible; the rank is the product of the stage moduli."""
    base = tower.base
    if base.unit is None:
        raise HypothesisNotMet("free module check requires a unital base")
    if not is_associative(base):
        raise HypothesisNotMet("free module check requires an associative base")
    rank = 1
    for s in tower.stages:
        rank *= s.modulus
    checked = 0
    for y in tower.basis_in_box(box):
        family = canonical_form(tower, y)
        acc = LaurentElement.zero(tower.field, tower.n, base.dim)
        for idx, x in family.items():
            section = LaurentElement.monomial(
                tower.field, tower.n, base.dim, idx, base.unit
            )
            acc = acc.add(laurent_multiply(base, x, section))
        if acc != y:
            return {"ok": False, "rank": rank, "checked": checked}
        redo = canonical_form(tower, y)
        if any(redo[idx] != family[idx] for idx in family):
            return {
                "ok": False,
                "rank": rank,
                "checked": checked,
                "reason": "decomposition not unique",
            }
        checked += 1
    return {
        "ok": True,
        "rank": rank,
        "checked": checked,
        "box": box.radius,
        "sections": tower.index_classes(),
    }


def inherited_flags(tower: LoopTower, box: DegreeBox | None = None):
    """Base properties carried to the loop by the permanence theorem.

    Each loop flag records its provenance; nonzeroness and perfectness are
    additionally certified inside a finite window when they hold there."""
    base_report = property_report(tower.base)
    base = tower.base

    def derived(value):
        return {"value": value, "source": "derived-by-theorem"}

    loop_flags = {"nonzero": derived(base.dim > 0)}
    for name in ("perfect", "pfgc", "unital", "commutative", "associative"):
        loop_flags[name] = derived(base_report[name]["value"])
    prime_val = base_report["prime"]["value"]
    loop_flags["prime"] = derived(True if prime_val else None)
    if base.dim == 0:
        for flag in loop_flags.values():
            flag["value"] = None
            flag["source"] = "not applicable: zero base"
        return {"base": base_report, "loop": loop_flags}
    if box is None:
        box = DegreeBox(tuple(s.modulus for s in tower.stages))
    window = tower.basis_in_box(box)
    if window:
        loop_flags["nonzero"] = {"value": True, "source": "verified-in-box"}
    if base_report["perfect"]["value"]:
        # span of pairwise window products must cover an inner window;
        # products of members stay members, so this certifies perfectness
        # of everything the inner window sees
        ech = SparseEchelon()
        for a in window:
            for b in window:
                prod = laurent_multiply(base, a, b)
                if not prod.is_zero():
                    ech.add_row(prod.sparse_items())
        ok = all(
            not ech.reduce_vector(y.sparse_items())
            for y in tower.basis_in_box(box.halved())
        )
        if ok:
            loop_flags["perfect"] = {"value": True, "source": "verified-in-box"}
    return {"base": base_report, "loop": loop_flags, "box": box.radius}
