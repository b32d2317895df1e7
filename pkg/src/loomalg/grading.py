"""Z/m-gradings of structure algebras and their determining automorphisms.

A grading is stored with its modulus and an explicit primitive root zeta of
that order; the components are eigenspace-canonical subspaces.  The root is
always passed around explicitly, never inferred from context, so a grading
over a field with several roots of the same order is unambiguous.
"""

from __future__ import annotations

from .errors import InvalidGrading, NotAnAutomorphism
from .exactnum import CycloNumber, root_of_unity_order
from .findim import LinearMap, StructureAlgebra, centroid, centroid_algebra
from .linalg import (
    SpanSolver,
    Subspace,
    identity_matrix,
    kernel_basis,
    mat_apply,
    mat_mul,
    rref,
    vec_add,
    vec_scale,
    zero_vector,
)

_ORDER_SEARCH_CAP = 4096


class FiniteOrderAuto:
    """An algebra automorphism of verified finite multiplicative order."""

    def __init__(self, algebra: StructureAlgebra, matrix, expected_period=None):
        self.algebra = algebra
        self.field = algebra.field
        self.matrix = tuple(tuple(row) for row in matrix)
        n = algebra.dim
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise NotAnAutomorphism("matrix shape does not match the algebra")
        _, pivots = rref(self.matrix)
        if len(pivots) != n:
            raise NotAnAutomorphism("matrix is singular")
        basis = algebra.basis()
        images = [mat_apply(self.matrix, e) for e in basis]
        for i in range(n):
            for j in range(n):
                lhs = mat_apply(self.matrix, algebra.multiply(basis[i], basis[j]))
                rhs = algebra.multiply(images[i], images[j])
                if lhs != rhs:
                    raise NotAnAutomorphism(
                        f"does not preserve the product on basis pair ({i}, {j})"
                    )
        self._powers = [identity_matrix(self.field, n)]
        power = self.matrix
        order = None
        for k in range(1, _ORDER_SEARCH_CAP + 1):
            self._powers.append(power)
            if power == self._powers[0]:
                order = k
                self._powers.pop()
                break
            power = mat_mul(power, self.matrix)
        if order is None:
            raise NotAnAutomorphism(
                f"no finite order found within {_ORDER_SEARCH_CAP} iterations"
            )
        self.period = order
        if expected_period is not None and expected_period != order:
            raise NotAnAutomorphism(
                f"declared period {expected_period} but actual order is {order}"
            )

    @classmethod
    def identity(cls, algebra: StructureAlgebra):
        return cls(algebra, identity_matrix(algebra.field, algebra.dim))

    def apply(self, vec):
        return mat_apply(self.matrix, vec)

    def power_matrix(self, k: int):
        return self._powers[k % self.period]

    def apply_power(self, k: int, vec):
        return mat_apply(self._powers[k % self.period], vec)

    def inverse_matrix(self):
        return self._powers[(self.period - 1) % self.period]

    def __repr__(self):
        return f"<FiniteOrderAuto period {self.period} on dim {self.algebra.dim}>"


class ModGrading:
    """A Z/m-grading: modulus, explicit root, and m component subspaces.

    Components may be zero; the declared modulus is kept either way.
    """

    def __init__(self, algebra: StructureAlgebra, modulus: int,
                 zeta: CycloNumber, components):
        self.algebra = algebra
        self.modulus = modulus
        self.zeta = zeta
        comps = tuple(components)
        if len(comps) != modulus:
            raise InvalidGrading(
                f"expected {modulus} components, got {len(comps)}"
            )
        self.components = comps

    def component(self, i: int) -> Subspace:
        return self.components[i % self.modulus]

    def dims(self):
        return tuple(c.dim for c in self.components)

    def homogeneous_decomposition(self, vec):
        """Split a vector into its graded parts, indexed by degree class."""
        solver = SpanSolver(self.algebra.field, self.algebra.dim)
        tags = []
        for i, comp in enumerate(self.components):
            for b in comp.basis:
                solver.add(b)
                tags.append(i)
        coords = solver.express(vec)
        if coords is None:
            raise InvalidGrading("vector is outside the component sum")
        parts = {}
        for g, c in coords.items():
            i = tags[g]
            scaled = vec_scale(c, self._gen_vector(g))
            cur = parts.get(i)
            parts[i] = scaled if cur is None else vec_add(cur, scaled)
        return parts

    def _gen_vector(self, g):
        seen = 0
        for comp in self.components:
            for b in comp.basis:
                if seen == g:
                    return b
                seen += 1
        raise IndexError(g)

    def __eq__(self, other):
        if not isinstance(other, ModGrading):
            return NotImplemented
        return (
            self.algebra is other.algebra
            and self.modulus == other.modulus
            and self.zeta == other.zeta
            and self.components == other.components
        )

    def __repr__(self):
        return f"<ModGrading mod {self.modulus} dims {self.dims()}>"


def grading_from_auto(auto: FiniteOrderAuto, zeta: CycloNumber) -> ModGrading:
    """Eigenspace grading of a finite-order automorphism.

    The modulus is the order of zeta; the automorphism's period must divide
    it (strictly smaller periods give legal gradings with empty components).
    """
    m = root_of_unity_order(zeta)
    if m is None:
        raise InvalidGrading("grading root is not a root of unity")
    if auto.period == 0 or m % auto.period != 0:
        raise InvalidGrading(
            f"automorphism period {auto.period} does not divide modulus {m}"
        )
    algebra = auto.algebra
    n = algebra.dim
    field = algebra.field
    comps = []
    total = 0
    for i in range(m):
        lam = zeta**i
        rows = [
            tuple(auto.matrix[r][c] - (lam if r == c else field.zero)
                  for c in range(n))
            for r in range(n)
        ]
        comp = Subspace(field, n, kernel_basis(rows, n, field))
        comps.append(comp)
        total += comp.dim
    assert total == n, "eigenspaces failed to fill the algebra"
    return ModGrading(algebra, m, zeta, comps)


def auto_from_grading(grading: ModGrading) -> FiniteOrderAuto:
    """The automorphism acting by zeta^i on component i."""
    algebra = grading.algebra
    field = algebra.field
    n = algebra.dim
    solver = SpanSolver(field, n)
    gen_info = []
    for i, comp in enumerate(grading.components):
        for b in comp.basis:
            if not solver.add(b):
                raise InvalidGrading("components are not independent")
            gen_info.append((i, b))
    if solver.dim != n:
        raise InvalidGrading("components do not span the algebra")
    cols = []
    for j in range(n):
        e = algebra.basis_vector(j)
        coords = solver.express(e)
        img = zero_vector(field, n)
        for g, c in coords.items():
            i, b = gen_info[g]
            img = vec_add(img, vec_scale(c * grading.zeta**i, b))
        cols.append(img)
    matrix = tuple(zip(*cols))
    return FiniteOrderAuto(algebra, matrix)


def validate_grading(grading: ModGrading) -> list[str]:
    """All violations of the grading axioms; empty list means valid."""
    violations = []
    algebra = grading.algebra
    m = grading.modulus
    order = root_of_unity_order(grading.zeta)
    if order != m:
        violations.append(
            f"declared root has order {order}, expected {m}"
        )
    solver = SpanSolver(algebra.field, algebra.dim)
    independent = True
    for comp in grading.components:
        for b in comp.basis:
            if not solver.add(b):
                independent = False
    if not independent:
        violations.append("components are not linearly independent")
    if solver.dim != algebra.dim:
        violations.append(
            f"components span dimension {solver.dim} of {algebra.dim}"
        )
    for i, ci in enumerate(grading.components):
        for j, cj in enumerate(grading.components):
            target = grading.component(i + j)
            for x in ci.basis:
                for y in cj.basis:
                    p = algebra.multiply(x, y)
                    if not target.contains(p):
                        violations.append(
                            f"product A_{i} * A_{j} leaves A_{(i + j) % m}"
                        )
                        break
                else:
                    continue
                break
    return violations


class CentroidGrading:
    """The induced grading of the centroid of a graded algebra.

    Component lambda collects the centroid maps sending A_j into A_(lambda+j)
    for every j.  Exposed both as lists of LinearMaps and as a coordinate
    grading of the centroid algebra, ready to be looped."""

    def __init__(self, base_grading: ModGrading, algebra: StructureAlgebra,
                 maps, component_maps, coordinate_grading: ModGrading):
        self.base_grading = base_grading
        self.algebra = algebra  # the centroid as a StructureAlgebra
        self.maps = maps        # canonical centroid basis of the base algebra
        self.component_maps = component_maps
        self.coordinate_grading = coordinate_grading

    @property
    def modulus(self):
        return self.base_grading.modulus

    def dims(self):
        return tuple(len(c) for c in self.component_maps)


def centroid_grading(grading: ModGrading) -> CentroidGrading:
    """Grade the centroid by shift degree against a graded algebra."""
    algebra = grading.algebra
    field = algebra.field
    calg, maps = centroid_algebra(algebra)
    r = len(maps)
    m = grading.modulus
    component_maps = []
    coord_subspaces = []
    for lam in range(m):
        # chi in the span of maps with chi(A_j) inside A_(lam+j) for all j
        rows = []
        for j, comp in enumerate(grading.components):
            target = grading.component(lam + j)
            for b in comp.basis:
                images = [mp.apply(b) for mp in maps]
                residuals = [target.residual(img) for img in images]
                for coord in range(algebra.dim):
                    row = tuple(residuals[s][coord] for s in range(r))
                    if any(row):
                        rows.append(row)
        sols = kernel_basis(rows, r, field) if rows else [
            tuple(field.one if t == s else field.zero for t in range(r))
            for s in range(r)
        ]
        comp_maps = []
        for sol in sols:
            mat = [[field.zero] * algebra.dim for _ in range(algebra.dim)]
            for s, c in enumerate(sol):
                if c:
                    for a in range(algebra.dim):
                        for bcol in range(algebra.dim):
                            if maps[s].matrix[a][bcol]:
                                mat[a][bcol] = mat[a][bcol] + c * maps[s].matrix[a][bcol]
            comp_maps.append(LinearMap(field, mat))
        component_maps.append(tuple(comp_maps))
        coord_subspaces.append(Subspace(field, r, sols))
    total = sum(len(c) for c in component_maps)
    assert total == r, "centroid grading failed to fill the centroid"
    coord_grading = ModGrading(calg, m, grading.zeta, coord_subspaces)
    return CentroidGrading(grading, calg, maps, tuple(component_maps), coord_grading)
