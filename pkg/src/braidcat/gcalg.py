"""Operator algebras carrying a quantum-group action, and their morphisms.

An action of G on a unital *-subalgebra X of B(K) is a unital injective
*-homomorphism rho: X -> X (x) A that is coassociative with Delta and
satisfies the Podles span condition rho(X)(I (x) A) = X (x) A (span equality;
finite dimension collapses the closure).  Morphisms are unital
*-homomorphisms intertwining the actions.
"""

from __future__ import annotations

import math

import numpy as np

from .fqg import FiniteQuantumGroup, GroupError, InvariantViolation, matrix_from_json
from .linalg import (
    EQUALITY_TOL,
    LegSpace,
    LinearMap,
    OperatorSubspace,
    dagger,
    hs_norm,
    kron,
    rel_residual,
    span_close,
    star_hom_residual,
    subspace_equal,
    tensor_subspace,
)
from .report import CheckRecord, all_passed, record

ACTION_TOL = 1e-9
INJECTIVITY_RATIO = 1e-9


class OperatorAlgebra:
    """A unital *-closed matrix subalgebra with an orthonormal basis."""

    def __init__(self, space: LegSpace, subspace: OperatorSubspace,
                 name: str = "X", validate: bool = True):
        if subspace.space.dims != space.dims:
            raise ValueError("subspace does not live on the given carrier")
        self.space = space
        self.subspace = subspace
        self.name = name
        if validate:
            rec = record(f"{name}: unital *-closed algebra",
                         "operator-algebra-closure",
                         self.closure_defect(), 1e-10)
            if not rec.passed:
                raise InvariantViolation(rec)

    @classmethod
    def from_span(cls, mats, space: LegSpace, name: str = "X") -> "OperatorAlgebra":
        return cls(space, span_close(list(mats), space), name=name)

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def basis(self):
        return self.subspace.basis

    def unit(self):
        return self.space.identity()

    def closure_defect(self) -> float:
        s = self.subspace
        worst = s.residual_of(self.unit() / math.sqrt(self.space.dim))
        for a in s.basis:
            worst = max(worst, s.residual_of(dagger(a)))
            for b in s.basis:
                p = a @ b
                if hs_norm(p) > 1e-12:
                    worst = max(worst, s.residual_of(p))
        return worst

    def center(self) -> OperatorSubspace:
        """Elements of the algebra commuting with the whole algebra."""
        rows = []
        for b in self.subspace.basis:
            block = np.array([(b @ x - x @ b).reshape(-1)
                              for x in self.subspace.basis])
            rows.append(block.reshape(-1))
        m = np.array(rows).T  # columns indexed by basis
        _, sv, vh = np.linalg.svd(m) if m.size else (None, np.array([]), None)
        if sv.size == 0:
            return self.subspace
        k = int(np.sum(sv <= 1e-10 * max(sv[0], 1.0)))
        coeffs = vh[len(sv) - k:].conj() if k else np.zeros((0, self.dim))
        mats = [self.subspace.from_coords(c) for c in coeffs]
        if not mats:
            d = self.space.dim
            return OperatorSubspace(self.space, np.zeros((0, d, d), complex))
        return span_close(mats, self.space)

    def __repr__(self):
        return f"<OperatorAlgebra {self.name}: dim {self.dim} on {self.space.dims}>"


class GAlgebra:
    """An operator algebra together with an action of a finite quantum group."""

    def __init__(self, alg: OperatorAlgebra, G: FiniteQuantumGroup,
                 rho: LinearMap, name: str | None = None, validate: bool = True):
        self.alg = alg
        self.G = G
        self.rho = rho
        self.name = name or alg.name
        self.records: list[CheckRecord] = []
        if validate:
            self.records = self.validate()
            bad = [r for r in self.records if not r.passed]
            if bad:
                raise InvariantViolation(bad[0])

    @property
    def carrier(self) -> LegSpace:
        return self.alg.space

    @property
    def dim(self) -> int:
        return self.alg.dim

    @property
    def basis(self):
        return self.alg.basis

    def action_space(self) -> LegSpace:
        return self.carrier.join(self.G.H)

    def validate(self, tol: float = ACTION_TOL) -> list[CheckRecord]:
        name = self.name
        recs = [record(f"{name}: rho unital *-homomorphism", "action-star-hom",
                       star_hom_residual(self.rho, unit=self.alg.unit()), tol)]
        # coassociativity: (rho (x) id) rho = (id (x) Delta) rho
        worst = 0.0
        ksp = self.action_space()
        xlegs = list(range(1, self.carrier.nlegs + 1))
        for x in self.basis:
            w = self.rho(x)
            lhs, _ = self.rho.apply_to_legs(w, xlegs, ksp)
            rhs, _ = self.G.delta.apply_to_legs(w, [ksp.nlegs], ksp)
            worst = max(worst, rel_residual(lhs, rhs))
        recs.append(record(f"{name}: rho coassociative", "action-coassociativity",
                           worst, tol))
        ratio = self.rho.min_singular_ratio()
        recs.append(CheckRecord(
            f"{name}: rho injective", "action-injectivity",
            ratio, INJECTIVITY_RATIO, ratio >= INJECTIVITY_RATIO,
            {"min_over_max_singular_value": ratio}))
        recs.append(record(f"{name}: Podles span condition", "action-podles",
                           self.podles_defect(), tol))
        return recs

    def podles_defect(self) -> float:
        """Mutual projection residual of span(rho(X)(I (x) A)) vs X (x) A."""
        ksp = self.action_space()
        eye = self.carrier.identity()
        prods = [self.rho(x) @ ksp.embed(a, [ksp.nlegs])
                 for x in self.basis for a in self.G.A.basis]
        lhs = span_close(prods, ksp)
        rhs = tensor_subspace(self.alg.subspace, self.G.A)
        return subspace_equal(lhs, rhs).residual

    def is_trivial_action(self, tol: float = EQUALITY_TOL) -> bool:
        ksp = self.action_space()
        return all(
            rel_residual(self.rho(x), ksp.embed(x, list(range(1, self.carrier.nlegs + 1))))
            <= tol
            for x in self.basis)

    def __repr__(self):
        return (f"<GAlgebra {self.name}: dim {self.dim} over {self.G.name}>")


class GMorphism:
    """A unital *-homomorphism between G-algebras intertwining the actions."""

    def __init__(self, source: GAlgebra, target: GAlgebra, mapping: LinearMap,
                 name: str = "phi", validate: bool = True):
        self.source = source
        self.target = target
        self.map = mapping
        self.name = name
        self.records: list[CheckRecord] = []
        if validate:
            self.records = self.validate()
            bad = [r for r in self.records if not r.passed]
            if bad:
                raise InvariantViolation(bad[0])

    def __call__(self, x):
        return self.map(x)

    def validate(self, tol: float = ACTION_TOL) -> list[CheckRecord]:
        recs = [record(
            f"{self.name}: unital *-homomorphism", "morphism-star-hom",
            star_hom_residual(self.map, basis=self.source.basis,
                              unit=self.source.alg.unit()), tol),
            record(f"{self.name}: intertwines the actions", "morphism-intertwining",
                   self.intertwining_defect(), tol)]
        return recs

    def intertwining_defect(self) -> float:
        """(map (x) id_A) . rho_source vs rho_target . map on the basis."""
        worst = 0.0
        ssp = self.source.action_space()
        xlegs = list(range(1, self.source.carrier.nlegs + 1))
        for x in self.source.basis:
            lhs, _ = self.map.apply_to_legs(self.source.rho(x), xlegs, ssp)
            rhs = self.target.rho(self.map(x))
            worst = max(worst, rel_residual(lhs, rhs))
        return worst

    def injectivity_ratio(self) -> float:
        return self.map.min_singular_ratio()

    def compose(self, inner: "GMorphism") -> "GMorphism":
        if inner.target is not self.source:
            # tolerate structurally equal targets (same carrier and span)
            if inner.target.carrier.dims != self.source.carrier.dims:
                raise ValueError("morphisms are not composable")
        return GMorphism(inner.source, self.target, self.map.compose(inner.map),
                         name=f"{self.name}.{inner.name}")

    def __repr__(self):
        return f"<GMorphism {self.name}: {self.source.name} -> {self.target.name}>"


def identity_morphism(X: GAlgebra) -> GMorphism:
    mapping = LinearMap(X.alg.subspace, X.basis.copy(), X.carrier)
    return GMorphism(X, X, mapping, name=f"id_{X.name}")


def unit_morphism(G: FiniteQuantumGroup, X: GAlgebra) -> GMorphism:
    """1_X: C -> X, lambda -> lambda I (the only morphism out of C)."""
    C = trivial_action(full_matrix_algebra(1, name="C"), G)
    mapping = LinearMap(C.alg.subspace, np.array([X.alg.unit()]), X.carrier)
    return GMorphism(C, X, mapping, name=f"1_{X.name}")


# -- stock objects ------------------------------------------------------------

def full_matrix_algebra(n: int, name: str | None = None) -> OperatorAlgebra:
    space = LegSpace([n])
    units = np.zeros((n * n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            units[i * n + j, i, j] = 1.0
    return OperatorAlgebra(space, OperatorSubspace(space, units),
                           name=name or (f"M{n}" if n > 1 else "C"))


def diagonal_algebra(n: int, name: str | None = None) -> OperatorAlgebra:
    space = LegSpace([n])
    units = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        units[i, i, i] = 1.0
    return OperatorAlgebra(space, OperatorSubspace(space, units),
                           name=name or f"diag{n}")


def trivial_action(X: OperatorAlgebra, G: FiniteQuantumGroup,
                   name: str | None = None) -> GAlgebra:
    """X with rho(x) = x (x) I_A."""
    I = G.H.identity()
    imgs = np.array([kron(x, I) for x in X.basis])
    rho = LinearMap(X.subspace, imgs, X.space.join(G.H))
    return GAlgebra(X, G, rho, name=name or f"{X.name}_tr")


def delta_action(G: FiniteQuantumGroup) -> GAlgebra:
    """The distinguished object: A acting on itself by the comultiplication."""
    alg = OperatorAlgebra(G.H, G.A, name=f"A[{G.name}]")
    return GAlgebra(alg, G, G.delta, name=f"(A,Delta)[{G.name}]")


def tensor_pair(X: GAlgebra, Y: GAlgebra, name: str | None = None) -> GAlgebra:
    """X (x) Y with the action through the second factor only:
    x (x) y -> x_1 rho_Y(y)_23."""
    if X.G is not Y.G:
        raise ValueError("objects live over different quantum groups")
    carrier = X.carrier.join(Y.carrier)
    sub = tensor_subspace(X.alg.subspace, Y.alg.subspace)
    alg = OperatorAlgebra(carrier, sub, name=name or f"{X.name}(x){Y.name}")
    imgs = np.array([kron(x, Y.rho(y)) for x in X.basis for y in Y.basis])
    rho = LinearMap(sub, imgs, carrier.join(Y.G.H))
    return GAlgebra(alg, X.G, rho, name=alg.name)


def tensor_with_A(X: GAlgebra) -> tuple[GAlgebra, GMorphism]:
    """The object X (x) A with action id (x) Delta, and rho^X viewed as an
    equivariant morphism X -> X (x) A (its intertwining check is exactly the
    coassociativity square)."""
    G = X.G
    carrier = X.carrier.join(G.H)
    sub = tensor_subspace(X.alg.subspace, G.A)
    alg = OperatorAlgebra(carrier, sub, name=f"{X.name}(x)A")
    imgs = np.array([kron(x, G.delta(a)) for x in X.basis for a in G.A.basis])
    obj = GAlgebra(alg, G, LinearMap(sub, imgs, carrier.join(G.H)), name=alg.name)
    rho_mor = GMorphism(X, obj, X.rho, name=f"rho_{X.name}")
    return obj, rho_mor


def clifford1_graded(G: FiniteQuantumGroup) -> GAlgebra:
    """The rank-one Clifford algebra C[c]/(c^2=1), c*=c, graded by Z2:
    rho(c) = c (x) (d_0 - d_1).  Defined over the two-element group."""
    if G.table is None or G.n != 2:
        raise GroupError("clifford1_graded is defined over the Z2 group")
    space = LegSpace([2])
    I = np.eye(2, dtype=complex)
    c = np.diag([1.0, -1.0]).astype(complex)
    sub = OperatorSubspace(space, np.array([I, c]) / math.sqrt(2))
    alg = OperatorAlgebra(space, sub, name="Cl1")
    sign = G.A_units[0] - G.A_units[1]
    imgs = np.array([kron(I, G.H.identity()), kron(c, sign)]) / math.sqrt(2)
    rho = LinearMap(sub, imgs, space.join(G.H))
    return GAlgebra(alg, G, rho, name="Cl1")


def invariant_subspace(X: GAlgebra) -> OperatorSubspace:
    """Kernel of x -> rho(x) - x (x) I, an operator subspace of the carrier.

    Always contains the unit; computed from the singular values of the defect
    map in the coordinates of X."""
    ksp = X.action_space()
    xlegs = list(range(1, X.carrier.nlegs + 1))
    cols = np.array([(X.rho(x) - ksp.embed(x, xlegs)).reshape(-1)
                     for x in X.basis]).T
    _, sv, vh = np.linalg.svd(cols, full_matrices=True)
    scale = max(float(sv[0]) if sv.size else 0.0, 1.0)
    null = [vh[i].conj() for i in range(X.dim)
            if i >= sv.size or sv[i] <= 1e-10 * scale]
    if not null:
        d = X.carrier.dim
        return OperatorSubspace(X.carrier, np.zeros((0, d, d), complex))
    mats = [X.alg.subspace.from_coords(c) for c in null]
    return span_close(mats, X.carrier)


def scalar_coefficient_check(X: GAlgebra, u, tol: float = ACTION_TOL):
    """If rho(u) = I (x) a for some a, certify that u is a multiple of the
    identity and return the scalar; otherwise return None.

    Raises if u is not in X.
    """
    u = np.asarray(u, dtype=complex)
    if not X.alg.subspace.contains(u):
        raise ValueError("u does not lie in the algebra")
    ksp = X.action_space()
    w = X.rho(u)
    kd = X.carrier.dim
    a = ksp.partial_trace(w, list(range(1, X.carrier.nlegs + 1))) / kd
    defect = rel_residual(w, ksp.embed(a, [ksp.nlegs]))
    if defect > tol:
        return None
    lam = complex(np.trace(u) / kd)
    if rel_residual(u, lam * X.carrier.identity()) > tol:
        raise InvariantViolation(record(
            f"{X.name}: invariant-slice scalar", "invariant-scalar",
            rel_residual(u, lam * X.carrier.identity()), tol))
    return lam


# -- registry and JSON --------------------------------------------------------

BUILTIN_OBJECTS = ("delta_action", "clifford1_graded", "D", "trivial:<n>")


def builtin_object(name: str, G: FiniteQuantumGroup) -> GAlgebra:
    if name == "delta_action":
        return delta_action(G)
    if name == "clifford1_graded":
        return clifford1_graded(G)
    if name == "D":
        return trivial_action(diagonal_algebra(2, name="D"), G, name="D")
    if name.startswith("trivial:"):
        n = int(name.split(":", 1)[1])
        if n < 1:
            raise ValueError("trivial:<n> needs n >= 1")
        return trivial_action(full_matrix_algebra(n), G)
    raise ValueError(f"unknown builtin object {name!r}; "
                     f"choose from {', '.join(BUILTIN_OBJECTS)}")


def galgebra_from_spec(G: FiniteQuantumGroup, spec) -> GAlgebra:
    """Load a G-algebra from JSON: a named builtin, or explicit data

        {"algebra": {"carrier_dim": n, "basis": [matrix, ...]},
         "action": [coords, ...]}

    where ``action[i][j][g]`` is the coefficient of basis[j] (x) A-basis[g]
    in rho(basis[i]); all invariants are verified at load."""
    if isinstance(spec, str):
        return builtin_object(spec, G)
    adesc = spec["algebra"]
    n = int(adesc["carrier_dim"])
    space = LegSpace([n])
    basis = np.array([matrix_from_json(m) for m in adesc["basis"]])
    sub = OperatorSubspace(space, basis)
    alg = OperatorAlgebra(space, sub, name=spec.get("name", "X"))
    coords = spec["action"]
    imgs = []
    for row in coords:
        m = np.zeros((n * G.n, n * G.n), dtype=complex)
        for j, per_basis in enumerate(row):
            for g, cval in enumerate(per_basis):
                m += _as_complex(cval) * kron(basis[j], G.A.basis[g])
        imgs.append(m)
    rho = LinearMap(sub, np.array(imgs), space.join(G.H))
    return GAlgebra(alg, G, rho, name=alg.name)


def _as_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    return complex(float(v[0]), float(v[1]))
