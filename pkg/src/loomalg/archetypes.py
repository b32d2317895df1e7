"""Absolute type detection: archetype registry and classifiers.

An archetype names the isomorphism class an algebra acquires after scalars
are extended to a big field: Dynkin labels for split simple Lie algebras,
Mat_l for split central simple associative algebras, Unit for the ground
field.  Towers inherit their base's archetype (permanence), with the number
of loop steps carried along as a second invariant.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from . import polyfactor
from .errors import HypothesisNotMet, NotLie, NotSimple, NotSplit, Undecided
from .exactnum import CycloNumber
from .findim import (
    StructureAlgebra,
    is_associative,
    is_central,
    is_commutative,
    is_lie,
    is_pfgc_findim,
    is_simple,
)
from .linalg import (
    SpanSolver,
    Subspace,
    charpoly,
    kernel_basis,
    mat_apply,
    mat_mul,
    solve_matvec,
    vec_add,
    vec_is_zero,
    vec_scale,
    zero_vector,
)
from .loops import LoopTower

_SEED = 20260214


# ---------------------------------------------------------------------------
# registry

EXCEPTIONAL_LABELS = ("E6", "E7", "E8", "F4", "G2")

# Varieties with label-only registration carry no classifier; they exist so
# the registry states the full taxonomy.
LABEL_ONLY_VARIETIES = ("Jordan", "Alternative")

VARIETIES = ("Lie", "Associative", "CommAssociative") + LABEL_ONLY_VARIETIES


def registry_label_valid(variety: str, label: str) -> bool:
    """Membership in the closed label registry."""
    if variety == "Lie":
        if label in EXCEPTIONAL_LABELS:
            return True
        if len(label) < 2 or label[0] not in "ABCD":
            return False
        if not label[1:].isdigit():
            return False
        rank = int(label[1:])
        floor = {"A": 1, "B": 2, "C": 3, "D": 4}[label[0]]
        return rank >= floor
    if variety == "Associative":
        return label.startswith("Mat") and label[3:].isdigit() and int(label[3:]) >= 1
    if variety == "CommAssociative":
        return label == "Unit"
    if variety in LABEL_ONLY_VARIETIES:
        return True
    return False


class Archetype:
    """A registry entry: variety plus label, with optional provenance."""

    __slots__ = ("variety", "label", "provenance", "data", "steps")

    def __init__(self, variety, label, provenance=None, data=None, steps=None):
        if variety not in VARIETIES:
            raise ValueError(f"unknown variety {variety!r}")
        if not registry_label_valid(variety, label):
            raise ValueError(f"label {label!r} is not in the {variety} registry")
        self.variety = variety
        self.label = label
        self.provenance = provenance
        self.data = data
        self.steps = steps

    def as_report(self) -> dict:
        out = {"variety": self.variety, "label": self.label}
        if self.provenance:
            out["provenance"] = self.provenance
        if self.steps is not None:
            out["steps"] = self.steps
        return out

    def __repr__(self):
        extra = f" steps {self.steps}" if self.steps is not None else ""
        return f"<Archetype {self.variety} {self.label}{extra}>"


class RootSystemData:
    """Split Cartan subalgebra with its root decomposition.

    roots are weight tuples (values on the Cartan basis); diagram is the
    edge list (i, j, bonds) over simple-root indices."""

    __slots__ = ("cartan", "roots", "simple_roots", "cartan_matrix", "diagram")

    def __init__(self, cartan, roots, simple_roots, cartan_matrix, diagram):
        self.cartan = cartan
        self.roots = list(roots)
        self.simple_roots = list(simple_roots)
        self.cartan_matrix = tuple(tuple(r) for r in cartan_matrix)
        self.diagram = tuple(diagram)

    @property
    def rank(self) -> int:
        return len(self.cartan_matrix)

    def __repr__(self):
        return f"<RootSystemData rank {self.rank}, {len(self.roots)} roots>"


# ---------------------------------------------------------------------------
# split-diagonalizability helpers

def _rational_value(c: CycloNumber):
    if any(c.coeffs[1:]):
        return None
    return c.coeffs[0]


def _split_spectrum(m, field):
    """Distinct eigenvalues when m is diagonalizable with all eigenvalues in
    the field; None otherwise."""
    cp = charpoly(m, field)
    factors = polyfactor.factor(cp, field)
    if any(polyfactor.pdeg(f) != 1 for f, _ in factors):
        return None
    lams = [-f[0] for f, _ in factors]
    n = len(m)
    prod = None
    for lam in lams:
        shifted = tuple(
            tuple(m[i][j] - (lam if i == j else field.zero) for j in range(n))
            for i in range(n)
        )
        prod = shifted if prod is None else mat_mul(prod, shifted)
    if any(v for row in prod for v in row):
        return None
    return lams


def _restricted_matrix(op, block, field):
    """Matrix of op on the span of block, in block coordinates; None if the
    span is not invariant."""
    ambient = len(block[0])
    solver = SpanSolver(field, ambient)
    for b in block:
        solver.add(b)
    cols = []
    for b in block:
        img = mat_apply(op, b)
        coords = solver.express(img)
        if coords is None:
            return None
        cols.append(tuple(
            coords.get(i, field.zero) for i in range(len(block))
        ))
    return tuple(zip(*cols))


# ---------------------------------------------------------------------------
# Lie classification

def _find_cartan(a: StructureAlgebra, cartan_hint, seed: int):
    field = a.field
    n = a.dim
    if cartan_hint is not None:
        family = [tuple(v) for v in cartan_hint.basis]
        for h in family:
            if _split_spectrum(a.left_mult(h).matrix, field) is None:
                raise NotSplit(
                    "cartan_hint contains an element whose adjoint action "
                    "does not diagonalize over the session field"
                )
        for i, h in enumerate(family):
            for g in family[i + 1:]:
                if not vec_is_zero(a.multiply(h, g)):
                    raise NotSplit("cartan_hint is not commutative")
        return family

    rng = random.Random(seed)

    def candidate_stream():
        for i in range(n):
            yield a.basis_vector(i)
        while True:
            vec = list(zero_vector(field, n))
            for _ in range(rng.randint(2, 3)):
                i = rng.randrange(n)
                c = rng.randint(-2, 2)
                if c:
                    vec[i] = vec[i] + field.from_rational(c)
            yield tuple(vec)

    family = []
    span = SpanSolver(field, n)
    budget = 6 * n + 60
    while True:
        if family:
            rows = []
            for h in family:
                rows.extend(a.left_mult(h).matrix)
            cent = kernel_basis(rows, n, field)
        else:
            cent = [a.basis_vector(i) for i in range(n)]
        if len(cent) == len(family):
            return family
        found = None
        tried = 0
        for z in _centralizer_candidates(cent, field, rng):
            tried += 1
            if tried > budget:
                break
            if span.contains(z):
                continue
            if _split_spectrum(a.left_mult(z).matrix, field) is not None:
                found = z
                break
        if found is None:
            raise NotSplit(
                "no split toral extension found within the retry budget; "
                "supply cartan_hint"
            )
        family.append(found)
        span.add(found)


def _centralizer_candidates(cent, field, rng):
    for z in cent:
        yield z
    dim = len(cent)
    ambient = len(cent[0])
    while True:
        vec = list(zero_vector(field, ambient))
        for _ in range(min(dim, 3)):
            i = rng.randrange(dim)
            c = rng.randint(-2, 2)
            if c:
                vec = [
                    x + field.from_rational(c) * y
                    for x, y in zip(vec, cent[i])
                ]
        yield tuple(vec)


def _joint_eigenspaces(a: StructureAlgebra, family):
    """Refine the whole space into joint eigenspaces of the adjoint family.

    Returns a list of (weight tuple, block basis); raises NotSplit when an
    adjoint restriction fails to split into eigenspaces over the field."""
    field = a.field
    n = a.dim
    blocks = [((), [a.basis_vector(i) for i in range(n)])]
    for h in family:
        op = a.left_mult(h).matrix
        refined = []
        for weight, block in blocks:
            r = _restricted_matrix(op, block, field)
            if r is None:
                raise NotSplit("adjoint action does not preserve a block")
            cp = charpoly(r, field)
            total = 0
            for lam, _mult in polyfactor.roots_in_field(cp, field):
                k = len(block)
                shifted = tuple(
                    tuple(
                        r[i][j] - (lam if i == j else field.zero)
                        for j in range(k)
                    )
                    for i in range(k)
                )
                for sol in kernel_basis(shifted, k, field):
                    v = zero_vector(field, n)
                    for c, b in zip(sol, block):
                        if c:
                            v = vec_add(v, vec_scale(c, b))
                    refined.append((weight + (lam,), [v]))
                    total += 1
            if total != len(block):
                raise NotSplit(
                    "adjoint action has eigenvalues outside the session field"
                )
        merged = {}
        for weight, vecs in refined:
            merged.setdefault(weight, []).extend(vecs)
        blocks = sorted(merged.items(), key=lambda t: _weight_key(t[0]))
    return blocks


def _weight_key(weight):
    return tuple(c.coeffs for c in weight)


def _rational_root_coordinates(roots, field):
    """Coordinates of every root over a maximal independent subset; all
    entries must be rational."""
    rank_solver = SpanSolver(field, len(roots[0]))
    gamma = []
    for alpha in roots:
        if rank_solver.add(alpha):
            gamma.append(alpha)
    r = len(gamma)
    matrix = tuple(
        tuple(gamma[k][i] for k in range(r)) for i in range(len(roots[0]))
    )
    coords = []
    for beta in roots:
        sol = solve_matvec(matrix, beta, field)
        if sol is None:
            raise Undecided("root fell outside the root span")
        rat = []
        for c in sol:
            q = _rational_value(c)
            if q is None:
                raise NotSplit(
                    "root coordinates are irrational over the session field"
                )
            rat.append(q)
        coords.append(tuple(rat))
    return coords


def _root_string_integer(alpha, beta, root_set, field):
    """p - q for the alpha-string through beta."""
    def step(base, direction, k):
        return tuple(
            b + direction * k * x for b, x in zip(base, alpha)
        )
    p = 0
    while step(beta, -1, p + 1) in root_set:
        p += 1
    q = 0
    while step(beta, 1, q + 1) in root_set:
        q += 1
    return p - q


def _classify_diagram(cartan_matrix):
    """Dynkin label of a connected generalized Cartan matrix."""
    r = len(cartan_matrix)
    if r == 1:
        return "A1"
    bonds = {}
    adj = {i: set() for i in range(r)}
    for i in range(r):
        for j in range(i + 1, r):
            b = cartan_matrix[i][j] * cartan_matrix[j][i]
            if b:
                bonds[(i, j)] = b
                adj[i].add(j)
                adj[j].add(i)
    seen = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    if len(seen) != r:
        raise Undecided("diagram is disconnected")
    if any(b == 3 for b in bonds.values()):
        if r == 2 and len(bonds) == 1:
            return "G2"
        raise Undecided("triple bond outside rank 2")
    doubles = [e for e, b in bonds.items() if b == 2]
    degrees = {i: len(adj[i]) for i in range(r)}
    if not doubles:
        branch_nodes = [i for i, d in degrees.items() if d > 2]
        if not branch_nodes:
            return f"A{r}"
        if len(branch_nodes) > 1 or degrees[branch_nodes[0]] != 3:
            raise Undecided("diagram is not in the registry")
        center = branch_nodes[0]
        lengths = sorted(
            _branch_length(adj, center, first) for first in adj[center]
        )
        if lengths[0] == 1 and lengths[1] == 1:
            return f"D{r}"
        if lengths == [1, 2, 2]:
            return "E6"
        if lengths == [1, 2, 3]:
            return "E7"
        if lengths == [1, 2, 4]:
            return "E8"
        raise Undecided("diagram is not in the registry")
    if len(doubles) != 1 or any(d > 2 for d in degrees.values()):
        raise Undecided("diagram is not in the registry")
    if r == 2:
        return "B2"
    i, j = doubles[0]
    if degrees[i] == 2 and degrees[j] == 2:
        if r == 4:
            return "F4"
        raise Undecided("interior double bond outside rank 4")
    end = i if degrees[i] == 1 else j
    other = j if end == i else i
    # entry -2 in row k means alpha_k is the short root of the pair
    end_short = cartan_matrix[end][other] == -2
    return f"B{r}" if end_short else f"C{r}"


def _branch_length(adj, center, first):
    length = 1
    prev, cur = center, first
    while True:
        nxt = [x for x in adj[cur] if x != prev]
        if not nxt:
            return length
        if len(nxt) > 1:
            raise Undecided("nested branch point in diagram")
        prev, cur = cur, nxt[0]
        length += 1


def lie_split_type(a: StructureAlgebra, cartan_hint: Subspace | None = None,
                   seed: int = _SEED) -> Archetype:
    """Dynkin label of a split simple Lie algebra over the session field.

    Finds a split Cartan subalgebra (seeded search, or the hint), decomposes
    the algebra into root spaces, reads Cartan integers off root strings,
    and matches the diagram against the registry."""
    if not is_lie(a):
        raise NotLie("algebra is not Lie (anticommutativity or Jacobi fails)")
    if not is_simple(a):
        raise NotSimple("algebra is not simple")
    field = a.field
    family = _find_cartan(a, cartan_hint, seed)
    r = len(family)
    blocks = _joint_eigenspaces(a, family)
    zero_weight = tuple(field.zero for _ in range(r))
    roots = []
    for weight, vecs in blocks:
        if weight == zero_weight:
            if len(vecs) != r:
                raise NotSplit(
                    "zero weight space exceeds the toral subalgebra; "
                    "supply cartan_hint"
                )
            continue
        if len(vecs) != 1:
            raise NotSplit("a root space has dimension above one")
        roots.append(weight)
    if len(roots) + r != a.dim:
        raise NotSplit("root decomposition does not fill the algebra")
    root_set = set(roots)
    for alpha in roots:
        if tuple(-c for c in alpha) not in root_set:
            raise NotSplit("roots do not come in opposite pairs")
    coords = _rational_root_coordinates(roots, field)
    positive = [
        alpha for alpha, q in zip(roots, coords)
        if q > tuple(Fraction(0) for _ in q)
    ]
    positive_set = set(positive)
    simple = []
    for alpha in positive:
        decomposable = any(
            tuple(x - y for x, y in zip(alpha, beta)) in positive_set
            for beta in positive
            if beta != alpha
        )
        if not decomposable:
            simple.append(alpha)
    if len(simple) != r:
        raise Undecided(
            f"found {len(simple)} simple roots at rank {r}"
        )
    coord_of = dict(zip(roots, coords))
    simple.sort(key=lambda alp: coord_of[alp])
    cartan_matrix = tuple(
        tuple(
            2 if i == j else _root_string_integer(
                simple[i], simple[j], root_set, field
            )
            for j in range(r)
        )
        for i in range(r)
    )
    for i in range(r):
        for j in range(r):
            if i != j and cartan_matrix[i][j] not in (0, -1, -2, -3):
                raise Undecided("Cartan integer outside the valid range")
            if i != j and (cartan_matrix[i][j] == 0) != (
                cartan_matrix[j][i] == 0
            ):
                raise Undecided("Cartan matrix zero pattern is asymmetric")
    label = _classify_diagram(cartan_matrix)
    diagram = tuple(
        (i, j, cartan_matrix[i][j] * cartan_matrix[j][i])
        for i in range(r) for j in range(i + 1, r)
        if cartan_matrix[i][j]
    )
    data = RootSystemData(
        Subspace(field, a.dim, family), roots, simple, cartan_matrix, diagram
    )
    return Archetype("Lie", label, data=data)


# ---------------------------------------------------------------------------
# associative classification

def _left_ideal(a: StructureAlgebra, v) -> Subspace:
    return Subspace(
        a.field, a.dim,
        [a.multiply(a.basis_vector(i), v) for i in range(a.dim)],
    )


def _charpoly_sections(a: StructureAlgebra, x):
    """Elements h(x) for h = charpoly of left-mult with one irreducible
    factor struck; singular for split semisimple x, so they seed proper
    left ideals."""
    field = a.field
    lx = a.left_mult(x).matrix
    factors = polyfactor.factor(charpoly(lx, field), field)
    if len(factors) < 2:
        return []
    out = []
    unit = a.unit
    if unit is None:
        return []
    for skip in range(len(factors)):
        h = [field.one]
        for k, (f, mult) in enumerate(factors):
            if k == skip:
                continue
            for _ in range(mult):
                h = polyfactor.pmul(h, f)
        acc = zero_vector(field, a.dim)
        power = tuple(unit)
        for c in h:
            if c:
                acc = vec_add(acc, vec_scale(c, power))
            power = mat_apply(lx, power)
        if not vec_is_zero(acc):
            out.append(acc)
    return out


def associative_type(a: StructureAlgebra, seed: int = _SEED) -> Archetype:
    """Mat_l label for a split central simple associative algebra.

    Splitness is certified by exhibiting a left ideal of dimension exactly
    sqrt(dim); a division algebra like the rational quaternions has no such
    ideal and is refused."""
    if not is_associative(a):
        raise HypothesisNotMet("algebra is not associative")
    if not is_simple(a):
        raise HypothesisNotMet("algebra is not simple")
    if not is_central(a):
        raise HypothesisNotMet("algebra is not central over the session field")
    ell = math.isqrt(a.dim)
    if ell * ell != a.dim:
        raise NotSplit(
            f"dimension {a.dim} is not a perfect square; "
            "not split over the session field"
        )
    field = a.field
    rng = random.Random(seed)
    candidates = [a.basis_vector(i) for i in range(a.dim)]
    for _ in range(3):
        vec = list(zero_vector(field, a.dim))
        for _ in range(3):
            i = rng.randrange(a.dim)
            c = rng.randint(-2, 2)
            if c:
                vec[i] = vec[i] + field.from_rational(c)
        x = tuple(vec)
        candidates.extend(_charpoly_sections(a, x))
    best = None
    for v in candidates:
        if vec_is_zero(v):
            continue
        ideal = _left_ideal(a, v)
        d = ideal.dim
        if d == ell:
            return Archetype("Associative", f"Mat{ell}")
        if ell < d < a.dim and (best is None or d < best.dim):
            best = ideal
    # shrink inside a proper ideal if one appeared
    while best is not None:
        shrunk = None
        for u in best.basis:
            d = _left_ideal(a, u).dim
            if d == ell:
                return Archetype("Associative", f"Mat{ell}")
            if ell < d < best.dim:
                shrunk = u
                break
        if shrunk is None:
            break
        best = _left_ideal(a, shrunk)
    raise NotSplit(
        "central simple, not split: no left ideal of dimension "
        f"{ell} was found"
    )


# ---------------------------------------------------------------------------
# towers

def tower_type(tower: LoopTower, cartan_hint=None, seed: int = _SEED) -> Archetype:
    """Archetype of a tower: the base's archetype, by permanence, with the
    step count attached."""
    base = tower.base
    missing = []
    if not is_pfgc_findim(base):
        missing.append("perfect and nonzero")
    if not is_simple(base):
        missing.append("prime (certified via simple)")
    if missing:
        raise HypothesisNotMet(
            "tower typing needs flags the base does not have: "
            + ", ".join(missing)
        )
    if is_lie(base):
        inner = lie_split_type(base, cartan_hint=cartan_hint, seed=seed)
    elif is_associative(base):
        if base.dim == 1 and is_commutative(base):
            inner = Archetype("CommAssociative", "Unit")
        else:
            inner = associative_type(base, seed=seed)
    else:
        raise HypothesisNotMet("no registered variety matches the base")
    return Archetype(
        inner.variety, inner.label,
        provenance="by permanence",
        data=inner.data,
        steps=tower.n,
    )
