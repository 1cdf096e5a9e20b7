"""Unitary R-matrices and the derived comultiplication Delta_R.

A unitary R in A_hat (x) A_hat is an R-matrix when

    (id (x) Dhat) R = R12 R13,
    (Dhat (x) id) R = R23 R13,
    R12 V13 V23    = V23 V13 R12.

Rhat = flip(R*) is then a bicharacter of the dual, and Delta_R is the unique
morphism A -> A (x) A_hat with (id (x) Delta_R) V = V12 Rhat13; in finite
dimension that defining equation is a full-rank linear system whenever the
first-leg slices of V span A, so Delta_R is found by a solve rather than a
closed formula.
"""

from __future__ import annotations

import math

import numpy as np

from .fqg import AbelianStructure, FiniteQuantumGroup, GroupError, opposite_group
from .linalg import (
    EQUALITY_TOL,
    LegSpace,
    LinearMap,
    OperatorSubspace,
    dagger,
    flip_tensor,
    kron,
    rel_residual,
    solve_linear_map,
    star_hom_residual,
    tensor_subspace,
)
from .report import CheckRecord, all_passed, record

RMATRIX_TOL = 1e-9
UNITARITY_TOL = 1e-10
DELTA_R_TOL = 1e-9
DELTA_R_SOLVE_TOL = 1e-8


class RMatrixError(ValueError):
    pass


class DeltaRSolveError(ValueError):
    """The defining equation for Delta_R has no consistent solution."""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


class RMatrix:
    """A candidate R-matrix bound to its quantum group.

    ``validate=True`` (the default) runs :func:`check_rmatrix` and raises
    :class:`RMatrixError` if any axiom fails.
    """

    def __init__(self, G: FiniteQuantumGroup, R, label: str = "custom",
                 validate: bool = True):
        self.G = G
        self.R = np.asarray(R, dtype=complex)
        if self.R.shape != (G.n * G.n, G.n * G.n):
            raise RMatrixError(f"R must act on H(x)H, got shape {self.R.shape}")
        self.R.setflags(write=False)
        self.R_hat = flip_tensor(dagger(self.R), G.n, G.n)
        self.label = label
        self.records = check_rmatrix(G, self.R, label=label) if validate else []
        if validate and not all_passed(self.records):
            bad = [r for r in self.records if not r.passed]
            raise RMatrixError(
                f"R-matrix {label!r} fails: "
                + "; ".join(f"{r.law} residual {r.residual:.3e}" for r in bad))

    def __repr__(self):
        return f"<RMatrix {self.label!r} over {self.G.name}>"


def check_rmatrix(G: FiniteQuantumGroup, R, label: str = "R",
                  tol: float = RMATRIX_TOL) -> list[CheckRecord]:
    """All R-matrix axioms plus unitarity and A_hat(x)A_hat membership."""
    R = np.asarray(R, dtype=complex)
    n = G.n
    if R.shape != (n * n, n * n):
        raise RMatrixError(f"R must act on H(x)H, got shape {R.shape}")
    HHH = LegSpace([n, n, n])
    name = f"{G.name}/{label}"
    recs = [
        record(f"{name}: R unitary", "rmatrix-unitarity",
               rel_residual(dagger(R) @ R, G.HH.identity()), UNITARITY_TOL),
        record(f"{name}: R in A_hat(x)A_hat", "rmatrix-membership",
               tensor_subspace(G.A_hat, G.A_hat).residual_of(R), EQUALITY_TOL),
    ]
    # the comultiplication legs only make sense for members; project first
    dual2 = tensor_subspace(G.A_hat, G.A_hat)
    Rproj = dual2.project(R)
    lhs1, _ = G.delta_hat.apply_to_legs(Rproj, [2], G.HH)
    rhs1 = HHH.embed(R, [1, 2]) @ HHH.embed(R, [1, 3])
    recs.append(record(f"{name}: (id(x)Dhat)R = R12 R13", "rmatrix-comul-right",
                       rel_residual(lhs1, rhs1), tol))
    lhs2, _ = G.delta_hat.apply_to_legs(Rproj, [1], G.HH)
    rhs2 = HHH.embed(R, [2, 3]) @ HHH.embed(R, [1, 3])
    recs.append(record(f"{name}: (Dhat(x)id)R = R23 R13", "rmatrix-comul-left",
                       rel_residual(lhs2, rhs2), tol))
    lhs3 = HHH.embed(R, [1, 2]) @ HHH.embed(G.V, [1, 3]) @ HHH.embed(G.V, [2, 3])
    rhs3 = HHH.embed(G.V, [2, 3]) @ HHH.embed(G.V, [1, 3]) @ HHH.embed(R, [1, 2])
    recs.append(record(f"{name}: R12 V13 V23 = V23 V13 R12", "rmatrix-v-exchange",
                       rel_residual(lhs3, rhs3), tol))
    return recs


def _minimal_projections(G: FiniteQuantumGroup):
    """Minimal projections of the commutative dual algebra, one per character."""
    ab = G.abelian
    n = G.n
    projs = []
    for x in ab.character_exponents():
        chi = ab.character(x)
        projs.append(sum(np.conj(chi[g]) * G.A_hat_units[g] for g in range(n)) / n)
    return projs


def _require_abelian(G: FiniteQuantumGroup) -> AbelianStructure:
    if G.abelian is None:
        raise GroupError(
            f"{G.name} is not an abelian-group function algebra; "
            "bicharacter R-matrices need the dual character theory")
    return G.abelian


def enumerate_bicharacter_rmatrices(G: FiniteQuantumGroup) -> list[RMatrix]:
    """The diagonal bicharacter family for an abelian group.

    With invariant factors n_1, ..., n_k the family is indexed by exponent
    tuples m in Z_{n_1} x ... x Z_{n_k}:

        R_m = sum_{x,y} b_m(x, y) q_x (x) q_y,
        b_m(x, y) = prod_i exp(2 pi i m_i x_i y_i / n_i),

    over the minimal projections q_x of A_hat.  The family has exactly |G|
    members and every member passes :func:`check_rmatrix`; arbitrary exponent
    matrices are available through :func:`rmatrix_from_exponents`.
    """
    ab = _require_abelian(G)
    out = []
    for m in ab.character_exponents():
        mat = np.diag([float(v) for v in m]) if m else np.zeros((0, 0))
        label = "trivial" if all(v == 0 for v in m) else (
            "bicharacter:" + ",".join(str(v) for v in m))
        out.append(rmatrix_from_exponents(G, mat, label=label))
    return out


def rmatrix_from_exponents(G: FiniteQuantumGroup, exponents,
                           label: str | None = None) -> RMatrix:
    """R-matrix of an arbitrary dual bicharacter given by an exponent matrix.

    ``exponents[i][j]`` multiplies x_i y_j / gcd(n_i, n_j) in the phase, which
    parametrizes every bicharacter of the dual character group.
    """
    ab = _require_abelian(G)
    k = len(ab.factors)
    M = np.asarray(exponents, dtype=float)
    if M.shape != (k, k):
        raise RMatrixError(f"exponent matrix must be {k}x{k}, got {M.shape}")
    projs = _minimal_projections(G)
    exps = ab.character_exponents()
    R = np.zeros((G.n * G.n, G.n * G.n), dtype=complex)
    for ix, x in enumerate(exps):
        for iy, y in enumerate(exps):
            phase = 0.0
            for i in range(k):
                for j in range(k):
                    phase += M[i, j] * x[i] * y[j] / math.gcd(ab.factors[i],
                                                              ab.factors[j])
            R += np.exp(2j * np.pi * phase) * kron(projs[ix], projs[iy])
    if label is None:
        label = "bicharacter-matrix"
    return RMatrix(G, R, label=label)


def trivial_rmatrix(G: FiniteQuantumGroup) -> RMatrix:
    return RMatrix(G, G.HH.identity(), label="trivial")


def sign_rmatrix(G: FiniteQuantumGroup) -> RMatrix:
    """The order-two diagonal bicharacter (m_i = n_i / 2); needs even factors."""
    ab = _require_abelian(G)
    if any(f % 2 for f in ab.factors):
        raise RMatrixError(f"{G.name} has odd invariant factors; no sign bicharacter")
    m = np.diag([f // 2 for f in ab.factors]).astype(float)
    return rmatrix_from_exponents(G, m, label="sign")


def rmatrix_from_spec(G: FiniteQuantumGroup, spec) -> RMatrix:
    """Resolve an R-matrix description: ``"trivial"``, ``"sign"``,
    ``"bicharacter:m1,...,mk"`` (diagonal exponents), ``{"bicharacter": [[...]]}``
    (full exponent matrix) or ``{"custom": [[re,im], ...]}``."""
    from .fqg import matrix_from_json

    if isinstance(spec, str):
        if spec == "trivial":
            return trivial_rmatrix(G)
        if spec == "sign":
            return sign_rmatrix(G)
        if spec.startswith("bicharacter:"):
            ab = _require_abelian(G)
            m = [int(v) for v in spec.split(":", 1)[1].split(",")]
            if len(m) != len(ab.factors):
                raise RMatrixError(
                    f"need {len(ab.factors)} diagonal exponents, got {len(m)}")
            return rmatrix_from_exponents(G, np.diag([float(v) for v in m]),
                                          label=spec)
        raise RMatrixError(f"unknown R-matrix name {spec!r}")
    if "bicharacter" in spec:
        return rmatrix_from_exponents(G, np.asarray(spec["bicharacter"], float))
    if "custom" in spec:
        return RMatrix(G, matrix_from_json(spec["custom"]), label="custom")
    raise RMatrixError(f"unintelligible R-matrix spec {spec!r}")


class DeltaR:
    """The morphism A -> A (x) A_hat solving (id (x) Delta_R) V = V12 Rhat13."""

    def __init__(self, G: FiniteQuantumGroup, R: RMatrix, mapping: LinearMap,
                 records: list[CheckRecord]):
        self.G = G
        self.R = R
        self.map = mapping
        self.records = records

    def __call__(self, a):
        return self.map(a)


def solve_delta_r(G: FiniteQuantumGroup, R: RMatrix,
                  tol: float = DELTA_R_TOL) -> DeltaR:
    """Solve the defining equation of Delta_R and certify the result.

    The slices of V along an orthonormal basis of the first leg give pairs
    (slice of V, slice of V12 Rhat13); Delta_R is the least-squares map
    matching them.  Uniqueness requires the V-slices to span A (asserted).
    Verifies afterwards: the defining equation by reconstruction, the unital
    *-homomorphism property, and that the image lies in A (x) A_hat.
    """
    n = G.n
    HHH = LegSpace([n, n, n])
    W = HHH.embed(G.V, [1, 2]) @ HHH.embed(R.R_hat, [1, 3])
    # slice V and W along the first leg with the same dual-basis functionals
    vt = G.V.reshape(n, n, n, n)          # (leg1 row, leg2 row, leg1 col, leg2 col)
    wt = W.reshape(n, n * n, n, n * n)
    v_slices, w_slices = [], []
    for e in G.A_hat.basis:
        v_slices.append(np.einsum("ab,aibj->ij", e.conj(), vt))
        w_slices.append(np.einsum("ab,aibj->ij", e.conj(), wt))
    dom = OperatorSubspace(G.H, G.A.basis)
    slice_span = np.array([s.reshape(-1) for s in v_slices])
    rank = np.linalg.matrix_rank(slice_span, tol=1e-10 * n)
    if rank < G.A.dim:
        raise DeltaRSolveError(
            f"V slices span only {rank} of {G.A.dim} dimensions of A; "
            "Delta_R is not determined", 1.0)
    sol = solve_linear_map(v_slices, w_slices, G.H, G.HH)
    if sol.residual > DELTA_R_SOLVE_TOL:
        raise DeltaRSolveError(
            "defining equation for Delta_R is inconsistent", sol.residual)
    mapping = LinearMap(dom, np.array([sol(a) for a in G.A.basis]), G.HH,
                        residual=sol.residual)
    recon, _ = mapping.apply_to_legs(G.V, [2], G.HH)
    name = f"{G.name}/{R.label}"
    target = tensor_subspace(G.A, G.A_hat)
    recs = [
        record(f"{name}: (id(x)Delta_R)V = V12 Rhat13", "delta-r-defining",
               rel_residual(recon, W), tol, solve_residual=sol.residual),
        record(f"{name}: Delta_R *-homomorphism", "delta-r-star-hom",
               star_hom_residual(mapping, basis=G.A_units,
                                 unit=G.H.identity()), tol),
        record(f"{name}: Delta_R(A) in A(x)A_hat", "delta-r-membership",
               max(target.residual_of(m) for m in mapping.images), tol),
    ]
    for r in recs:
        if not r.passed:
            raise DeltaRSolveError(f"Delta_R fails {r.law}", r.residual)
    return DeltaR(G, R, mapping, recs)


def opposite_rmatrix(R: RMatrix) -> RMatrix:
    """R* transported to the opposite group.

    Concretely (J (x) J) R* (J (x) J) with J the inversion permutation, which
    is the identification carrying the dual algebra onto the opposite group's
    dual; for abelian groups this is exactly R*.  The result is revalidated
    against the opposite group's comultiplications and bicharacter.
    """
    Gopp = opposite_group(R.G)
    J = R.G.inversion_permutation()
    JJ = kron(J, J)
    Ropp = JJ @ dagger(R.R) @ JJ
    return RMatrix(Gopp, Ropp, label=f"{R.label}^opp")
