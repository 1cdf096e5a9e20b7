"""Finite quantum groups as concrete matrix data.

A finite quantum group is stored as a pair of unital *-subalgebras of B(H) --
the function algebra A and its dual A_hat -- together with both
comultiplications and the duality bicharacter V in A_hat (x) A.  For a finite
group G the regular realization is

    H = l2(G),   A = diagonal algebra span{d_g},
    A_hat = translation algebra span{t_g}   (t_g e_x = e_{x g^-1}),
    Delta(d_g)  = sum_{hk=g} d_h (x) d_k,
    Dhat(t_g)   = t_g (x) t_g,
    V           = sum_g t_g (x) d_g.

With these conventions V is a bicharacter and the identity inclusions form a
Heisenberg pair, i.e. Delta(a) = V (a (x) I) V* for every a in A, for every
(also nonabelian) group table.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .linalg import (
    EQUALITY_TOL,
    LegSpace,
    LinalgError,
    LinearMap,
    OperatorSubspace,
    dagger,
    flip_tensor,
    hs_norm,
    kron,
    rel_residual,
    span_close,
    star_hom_residual,
    subspace_equal,
    tensor_subspace,
)
from .report import CheckRecord, record

ALGEBRA_TOL = 1e-10   # closure under product/adjoint, hom and coassoc defects
UNITARITY_TOL = 1e-10
BICHARACTER_TOL = 1e-9
HEISENBERG_TOL = 1e-9


class GroupError(ValueError):
    """Invalid multiplication table."""


class InvariantViolation(ValueError):
    """A constructed object failed one of its defining equations."""

    def __init__(self, rec: CheckRecord):
        self.record = rec
        super().__init__(
            f"{rec.name} ({rec.law}): residual {rec.residual:.3e} "
            f"exceeds {rec.tolerance:.1e}"
        )


def _require(rec: CheckRecord):
    if not rec.passed:
        raise InvariantViolation(rec)
    return rec


class GroupTable:
    """Multiplication table of a finite group, with the axioms verified."""

    def __init__(self, table):
        t = np.asarray(table, dtype=int)
        n = t.shape[0]
        if t.shape != (n, n) or n == 0:
            raise GroupError("table must be a nonempty square matrix")
        if t.min() < 0 or t.max() >= n:
            raise GroupError("table entries must index group elements")
        ident = None
        for e in range(n):
            if all(t[e][h] == h and t[h][e] == h for h in range(n)):
                ident = e
                break
        if ident is None:
            raise GroupError("table has no identity element")
        inv = [None] * n
        for g in range(n):
            for h in range(n):
                if t[g][h] == ident and t[h][g] == ident:
                    inv[g] = h
            if inv[g] is None:
                raise GroupError(f"element {g} has no inverse")
        for g in range(n):
            for h in range(n):
                for k in range(n):
                    if t[t[g][h]][k] != t[g][t[h][k]]:
                        raise GroupError(f"associativity fails at ({g},{h},{k})")
        self.table = t
        self.table.setflags(write=False)
        self.n = n
        self.identity = ident
        self.inverse = tuple(inv)

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g][h])

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def opposite(self) -> "GroupTable":
        return GroupTable(self.table.T)

    def order_of(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.mul(x, g)
            k += 1
        return k

    @classmethod
    def cyclic(cls, n: int) -> "GroupTable":
        return cls([[(a + b) % n for b in range(n)] for a in range(n)])

    @classmethod
    def from_factors(cls, factors) -> "GroupTable":
        """Direct product of cyclic groups; elements enumerated in mixed radix."""
        factors = [int(f) for f in factors]
        if not factors:
            factors = [1]
        if any(f < 1 for f in factors):
            raise GroupError("invariant factors must be >= 1")
        els = list(itertools.product(*[range(f) for f in factors]))
        idx = {e: i for i, e in enumerate(els)}
        table = [
            [idx[tuple((a + b) % f for a, b, f in zip(x, y, factors))] for y in els]
            for x in els
        ]
        return cls(table)


class AbelianStructure:
    """Invariant-factor data of an abelian group table: generators with
    nonincreasing orders n_1 >= n_2 >= ..., coordinates of every element, and
    the character table chi_x(g) = prod_i w_i^(x_i a_i(g))."""

    def __init__(self, group: GroupTable, factors, generators):
        self.group = group
        self.factors = tuple(int(f) for f in factors)
        self.generators = tuple(int(g) for g in generators)
        coords = {}
        for exps in itertools.product(*[range(f) for f in self.factors]):
            g = group.identity
            for gen, e in zip(self.generators, exps):
                for _ in range(e):
                    g = group.mul(g, gen)
            coords[g] = exps
        if len(coords) != group.n:
            raise GroupError("generators do not decompose the group")
        self.coords = [coords[g] for g in range(group.n)]

    def character(self, x) -> np.ndarray:
        """Value table of the character with exponent tuple ``x``."""
        vals = np.empty(self.group.n, dtype=complex)
        for g in range(self.group.n):
            phase = sum(
                xe * a / f for xe, a, f in zip(x, self.coords[g], self.factors)
            )
            vals[g] = np.exp(2j * np.pi * phase)
        return vals

    def character_exponents(self):
        return list(itertools.product(*[range(f) for f in self.factors]))

    @classmethod
    def from_table(cls, group: GroupTable) -> "AbelianStructure":
        """Decompose an abelian table into cyclic factors of nonincreasing
        order (backtracking over direct extensions; desk-scale sizes only)."""
        if not group.is_abelian:
            raise GroupError("group is not abelian")
        n = group.n
        orders = [group.order_of(g) for g in range(n)]
        by_order = sorted(range(n), key=lambda g: -orders[g])

        def closure(current: frozenset, h: int):
            new = set(current)
            powers = [group.identity]
            x = h
            while x != group.identity:
                powers.append(x)
                x = group.mul(x, h)
            for a in current:
                for p in powers:
                    new.add(group.mul(a, p))
            return frozenset(new), len(powers)

        def extend(gens, span: frozenset, max_order: int):
            if len(span) == n:
                return gens
            for h in by_order:
                o = orders[h]
                if h in span or o > max_order:
                    continue
                new_span, o2 = closure(span, h)
                if len(new_span) == len(span) * o2:
                    found = extend(gens + [h], new_span, o)
                    if found is not None:
                        return found
            return None

        if n == 1:
            return cls(group, [1], [group.identity])
        gens = extend([], frozenset([group.identity]), max(orders))
        if gens is None:
            raise GroupError("failed to decompose abelian group")
        return cls(group, [orders[g] for g in gens], gens)


class FiniteQuantumGroup:
    """Algebras A, A_hat on a common H, comultiplications, and bicharacter V.

    ``delta`` and ``delta_hat`` are linear maps stored on the orthonormal
    bases of A and A_hat; ``V_hat`` is flip(V*).  Table-backed instances keep
    the natural unit families (``A_units`` = minimal diagonal projections,
    ``A_hat_units`` = translation unitaries) and the inversion permutation J.
    """

    def __init__(self, H: LegSpace, A: OperatorSubspace, A_hat: OperatorSubspace,
                 delta: LinearMap, delta_hat: LinearMap, V: np.ndarray,
                 name: str = "custom", table: GroupTable | None = None,
                 abelian: AbelianStructure | None = None,
                 A_units=None, A_hat_units=None, validate: bool = True):
        self.H = H
        self.n = H.dim
        self.HH = H.join(H)
        self.A = A
        self.A_hat = A_hat
        self.delta = delta
        self.delta_hat = delta_hat
        self.V = np.asarray(V, dtype=complex)
        self.V.setflags(write=False)
        self.V_hat = flip_tensor(dagger(self.V), self.n, self.n)
        self.name = name
        self.table = table
        self.abelian = abelian
        self.A_units = list(A_units) if A_units is not None else list(A.basis)
        self.A_hat_units = (list(A_hat_units) if A_hat_units is not None
                            else list(A_hat.basis))
        if validate:
            for rec in self.validate():
                _require(rec)

    # -- invariants ---------------------------------------------------------

    def validate(self) -> list[CheckRecord]:
        recs = []
        recs.append(record(
            f"{self.name}: A unital *-closed algebra", "operator-algebra-closure",
            _algebra_closure_defect(self.A), ALGEBRA_TOL))
        recs.append(record(
            f"{self.name}: A_hat unital *-closed algebra", "operator-algebra-closure",
            _algebra_closure_defect(self.A_hat), ALGEBRA_TOL))
        recs.append(record(
            f"{self.name}: V unitary", "bicharacter-unitarity",
            rel_residual(dagger(self.V) @ self.V, self.HH.identity()),
            UNITARITY_TOL))
        recs.append(record(
            f"{self.name}: V in A_hat(x)A", "bicharacter-membership",
            tensor_subspace(self.A_hat, self.A).residual_of(self.V),
            EQUALITY_TOL))
        recs.extend(check_bicharacter(self))
        recs.append(heisenberg_check(self))
        recs.append(record(
            f"{self.name}: Delta *-homomorphism", "comultiplication-star-hom",
            star_hom_residual(self.delta, basis=self.A_units,
                              unit=self.H.identity()),
            ALGEBRA_TOL))
        recs.append(record(
            f"{self.name}: Dhat *-homomorphism", "dual-comultiplication-star-hom",
            star_hom_residual(self.delta_hat, basis=self.A_hat_units,
                              unit=self.H.identity()),
            ALGEBRA_TOL))
        recs.append(record(
            f"{self.name}: Delta coassociative", "comultiplication-coassociativity",
            self._coassociativity(self.delta, self.A_units), ALGEBRA_TOL))
        recs.append(record(
            f"{self.name}: Dhat coassociative", "dual-comultiplication-coassociativity",
            self._coassociativity(self.delta_hat, self.A_hat_units), ALGEBRA_TOL))
        return recs

    def _coassociativity(self, comul: LinearMap, units) -> float:
        worst = 0.0
        for a in units:
            w = comul(a)
            lhs, _ = comul.apply_to_legs(w, [1], self.HH)
            rhs, _ = comul.apply_to_legs(w, [2], self.HH)
            worst = max(worst, rel_residual(lhs, rhs))
        return worst

    def regularity_defect(self) -> tuple[int, int]:
        """Dimension of span(A . A_hat) against dim B(H)."""
        prods = [a @ b for a in self.A.basis for b in self.A_hat.basis]
        return span_close(prods, self.H).dim, self.n * self.n

    # -- convenience --------------------------------------------------------

    def inversion_permutation(self) -> np.ndarray:
        if self.table is None:
            raise GroupError("inversion permutation needs a group table")
        J = np.zeros((self.n, self.n), dtype=complex)
        for g in range(self.n):
            J[self.table.inverse[g], g] = 1.0
        return J

    def __repr__(self):
        return f"<FiniteQuantumGroup {self.name}: dim H = {self.n}>"


def _algebra_closure_defect(s: OperatorSubspace) -> float:
    worst = s.residual_of(s.space.identity() / math.sqrt(s.space.dim))
    for a in s.basis:
        worst = max(worst, s.residual_of(dagger(a)))
        for b in s.basis:
            p = a @ b
            if hs_norm(p) > 1e-12:
                worst = max(worst, s.residual_of(p))
    return worst


def build_function_algebra(table, name: str | None = None,
                           abelian: AbelianStructure | None = None) -> FiniteQuantumGroup:
    """Regular realization of the function algebra of a finite group.

    Raises :class:`GroupError` for invalid tables and
    :class:`InvariantViolation` if any defining equation fails (it cannot, for
    a valid table; the check runs regardless).
    """
    if not isinstance(table, GroupTable):
        table = GroupTable(table)
    n = table.n
    H = LegSpace([n])
    d_units = []
    for g in range(n):
        m = np.zeros((n, n), dtype=complex)
        m[g, g] = 1.0
        d_units.append(m)
    t_units = []
    for g in range(n):
        m = np.zeros((n, n), dtype=complex)
        gi = table.inverse[g]
        for x in range(n):
            m[table.mul(x, gi), x] = 1.0
        t_units.append(m)
    A = OperatorSubspace(H, np.array(d_units))
    A_hat = OperatorSubspace(H, np.array(t_units) / math.sqrt(n))
    delta_imgs = np.array([
        sum(kron(d_units[h], d_units[k])
            for h in range(n) for k in range(n) if table.mul(h, k) == g)
        for g in range(n)
    ])
    dhat_imgs = np.array([kron(t_units[g], t_units[g]) / math.sqrt(n)
                          for g in range(n)])
    HH = H.join(H)
    delta = LinearMap(A, delta_imgs, HH)
    delta_hat = LinearMap(A_hat, dhat_imgs, HH)
    V = sum(kron(t_units[g], d_units[g]) for g in range(n))
    if abelian is None and table.is_abelian:
        abelian = AbelianStructure.from_table(table)
    if name is None:
        name = f"group[{n}]"
    G = FiniteQuantumGroup(H, A, A_hat, delta, delta_hat, V, name=name,
                           table=table, abelian=abelian,
                           A_units=d_units, A_hat_units=t_units)
    dim, full = G.regularity_defect()
    _require(record(f"{name}: A.A_hat spans B(H)", "heisenberg-regularity",
                    0.0 if dim == full else 1.0, 0.5, span_dim=dim, full_dim=full))
    return G


def check_bicharacter(G: FiniteQuantumGroup,
                      tol: float = BICHARACTER_TOL) -> list[CheckRecord]:
    """Residuals of (id (x) Delta)V = V12 V13 and (Dhat (x) id)V = V23 V13."""
    n = G.n
    HHH = LegSpace([n, n, n])
    lhs1, _ = G.delta.apply_to_legs(G.V, [2], G.HH)
    rhs1 = HHH.embed(G.V, [1, 2]) @ HHH.embed(G.V, [1, 3])
    lhs2, _ = G.delta_hat.apply_to_legs(G.V, [1], G.HH)
    rhs2 = HHH.embed(G.V, [2, 3]) @ HHH.embed(G.V, [1, 3])
    return [
        record(f"{G.name}: (id(x)Delta)V = V12 V13", "bicharacter-right",
               rel_residual(lhs1, rhs1), tol),
        record(f"{G.name}: (Dhat(x)id)V = V23 V13", "bicharacter-left",
               rel_residual(lhs2, rhs2), tol),
    ]


def heisenberg_check(G: FiniteQuantumGroup,
                     tol: float = HEISENBERG_TOL) -> CheckRecord:
    """Delta(a) = V (a (x) I) V* over the basis of A (identity inclusions)."""
    worst = 0.0
    I = G.H.identity()
    for a in G.A_units:
        worst = max(worst, rel_residual(G.delta(a), G.V @ kron(a, I) @ dagger(G.V)))
    return record(f"{G.name}: Delta(a) = V(a(x)I)V*", "heisenberg-pair",
                  worst, tol)


def opposite_group(G: FiniteQuantumGroup) -> FiniteQuantumGroup:
    """The quantum group with reversed comultiplications.

    Built from the transposed group table, so all invariants hold on the nose;
    its bicharacter agrees with (J (x) I) V* (J (x) I) where J is the
    inversion permutation.  For abelian groups the result coincides with G
    elementwise.
    """
    if G.table is None:
        raise GroupError(
            "opposite_group is defined for table-backed quantum groups")
    return build_function_algebra(G.table.opposite(), name=f"{G.name}^opp")


# -- built-ins and JSON specs -------------------------------------------------

BUILTIN_GROUPS = ("trivial", "Z2", "Z3", "Z4", "Z2xZ2")

_BUILTIN_FACTORS = {
    "trivial": [1],
    "Z2": [2],
    "Z3": [3],
    "Z4": [4],
    "Z2xZ2": [2, 2],
}


def builtin_group(name: str) -> FiniteQuantumGroup:
    if name not in _BUILTIN_FACTORS:
        raise GroupError(f"unknown builtin group {name!r}; "
                         f"choose from {', '.join(BUILTIN_GROUPS)}")
    factors = _BUILTIN_FACTORS[name]
    table = GroupTable.from_factors(factors)
    return build_function_algebra(table, name=name)


def _complex_scalar(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise LinalgError(f"expected [re, im] pair, got {v!r}")


def matrix_from_json(rows) -> np.ndarray:
    return np.array([[_complex_scalar(v) for v in row] for row in rows],
                    dtype=complex)


def matrix_to_json(m) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m)]


def group_from_spec(spec) -> FiniteQuantumGroup:
    """Build a quantum group from its JSON description.

    Kinds: ``finite_abelian`` (invariant factors), ``group_table``,
    ``opposite_of`` (wrapping another spec), and ``custom`` (explicit
    matrices, validated at load)."""
    if isinstance(spec, str):
        return builtin_group(spec)
    kind = spec.get("kind")
    if kind == "finite_abelian":
        factors = [int(f) for f in spec["factors"]]
        if any(f < 2 for f in factors):
            raise GroupError("finite_abelian invariant factors must be >= 2")
        name = spec.get("name", "x".join(f"Z{f}" for f in factors))
        return build_function_algebra(GroupTable.from_factors(factors), name=name)
    if kind == "group_table":
        return build_function_algebra(GroupTable(spec["table"]),
                                      name=spec.get("name", "table-group"))
    if kind == "opposite_of":
        return opposite_group(group_from_spec(spec["of"]))
    if kind == "custom":
        n = int(spec["H_dim"])
        H = LegSpace([n])
        A = OperatorSubspace(H, np.array([matrix_from_json(m)
                                          for m in spec["A_basis"]]))
        A_hat = OperatorSubspace(H, np.array([matrix_from_json(m)
                                              for m in spec["A_hat_basis"]]))
        HH = H.join(H)
        delta = LinearMap(A, np.array([matrix_from_json(m)
                                       for m in spec["delta"]]), HH)
        delta_hat = LinearMap(A_hat, np.array([matrix_from_json(m)
                                               for m in spec["delta_hat"]]), HH)
        V = matrix_from_json(spec["V"])
        return FiniteQuantumGroup(H, A, A_hat, delta, delta_hat, V,
                                  name=spec.get("name", "custom"))
    raise GroupError(f"unknown group spec kind {kind!r}")
