import numpy as np
import pytest

from braidcat.fqg import GroupError, InvariantViolation
from braidcat.gcalg import (
    GAlgebra,
    GMorphism,
    OperatorAlgebra,
    builtin_object,
    clifford1_graded,
    delta_action,
    diagonal_algebra,
    full_matrix_algebra,
    galgebra_from_spec,
    identity_morphism,
    invariant_subspace,
    scalar_coefficient_check,
    tensor_pair,
    tensor_with_A,
    trivial_action,
    unit_morphism,
)
from braidcat.linalg import LegSpace, OperatorSubspace, kron, rel_residual, span_close
from braidcat.report import all_passed
from conftest import I2, SZ


class TestOperatorAlgebra:
    def test_full_matrix_algebra(self):
        alg = full_matrix_algebra(2)
        assert alg.dim == 4
        assert alg.closure_defect() < 1e-12

    def test_non_closed_span_rejected(self):
        space = LegSpace([2])
        # span{I, E01} is not *-closed
        e01 = np.zeros((2, 2), complex)
        e01[0, 1] = 1.0
        sub = span_close([np.eye(2), e01], space)
        with pytest.raises(InvariantViolation):
            OperatorAlgebra(space, sub)

    def test_center_of_full_algebra(self):
        assert full_matrix_algebra(2).center().dim == 1

    def test_center_of_diagonal_algebra(self):
        assert diagonal_algebra(3).center().dim == 3


class TestTrivialAction:
    def test_scalars(self, z2):
        X = trivial_action(full_matrix_algebra(1), z2)
        assert X.dim == 1 and all_passed(X.records)

    def test_d_object(self, z2):
        D = builtin_object("D", z2)
        assert D.dim == 2 and D.is_trivial_action()

    def test_m2_podles_rank_oracle(self, z2):
        X = trivial_action(full_matrix_algebra(2), z2)
        # oracle: rank of the raw product family equals dim(X (x) A)
        rows = [(X.rho(x) @ kron(np.eye(2), a)).reshape(-1)
                for x in X.basis for a in z2.A.basis]
        assert np.linalg.matrix_rank(np.array(rows), tol=1e-10) == 8
        assert X.podles_defect() < 1e-12


class TestDeltaAction:
    @pytest.mark.parametrize("name,span_dim", [("Z2", 4), ("Z3", 9)])
    def test_podles_span_dimension(self, groups, name, span_dim):
        X = delta_action(groups[name])
        G = groups[name]
        rows = [(X.rho(x) @ kron(np.eye(G.n), a)).reshape(-1)
                for x in X.basis for a in G.A.basis]
        assert np.linalg.matrix_rank(np.array(rows), tol=1e-10) == span_dim
        assert all_passed(X.records)

    def test_trivial_group(self, groups):
        X = delta_action(groups["trivial"])
        assert X.dim == 1 and X.is_trivial_action()


class TestTensorConstructions:
    def test_tensor_with_a_unit_object(self, z2):
        C = trivial_action(full_matrix_algebra(1), z2)
        obj, mor = tensor_with_A(C)
        assert obj.dim == 2
        assert mor.intertwining_defect() < 1e-12

    def test_tensor_with_a_for_delta_action(self, z2):
        X = delta_action(z2)
        obj, mor = tensor_with_A(X)
        assert all_passed(obj.records)
        assert mor.intertwining_defect() < 1e-12      # coassociativity square

    def test_tensor_pair_with_scalars(self, z2):
        X = delta_action(z2)
        C = trivial_action(full_matrix_algebra(1), z2)
        XC = tensor_pair(X, C)
        assert XC.is_trivial_action()                 # action of Y = C is trivial
        CX = tensor_pair(C, X)
        for b in CX.basis:
            assert rel_residual(CX.rho(b)[0:, 0:], kron(np.eye(1), X.rho(b[0:1, 0:1] * 0 + b))) >= 0
        assert all_passed(CX.records)

    def test_tensor_pair_of_delta_actions(self, z2):
        X = delta_action(z2)
        XX = tensor_pair(X, X)
        assert XX.dim == 4
        assert all_passed(XX.records)


class TestInvariants:
    def test_trivial_action_everything_invariant(self, z2):
        X = trivial_action(full_matrix_algebra(2), z2)
        assert invariant_subspace(X).dim == 4

    @pytest.mark.parametrize("name", ["Z2", "Z3"])
    def test_delta_action_only_scalars(self, groups, name):
        G = groups[name]
        X = delta_action(G)
        inv = invariant_subspace(X)
        # oracle: kernel rank of the defect matrix via Gram eigenvalues
        cols = np.array([(X.rho(x) - kron(x, np.eye(G.n))).reshape(-1)
                         for x in X.basis])
        gram = cols.conj() @ cols.T
        ev = np.linalg.eigvalsh(gram)
        assert int(np.sum(ev < 1e-10 * max(ev.max(), 1))) == 1
        assert inv.dim == 1
        assert inv.residual_of(np.eye(G.n) / np.sqrt(G.n)) < 1e-10

    def test_clifford_invariants(self, z2):
        X = clifford1_graded(z2)
        inv = invariant_subspace(X)
        assert inv.dim == 1                       # the odd part is not invariant

    def test_invariant_subspace_is_a_unital_star_algebra(self, z2):
        X = delta_action(z2)
        inv = invariant_subspace(X)
        alg = OperatorAlgebra(X.carrier, inv, name="inv", validate=True)
        assert alg.closure_defect() < 1e-9


class TestScalarCoefficient:
    def test_multiple_of_identity(self, z2):
        X = delta_action(z2)
        assert abs(scalar_coefficient_check(X, 3.0 * np.eye(2)) - 3.0) < 1e-12
        assert abs(scalar_coefficient_check(X, np.eye(2)) - 1.0) < 1e-12

    def test_non_invariant_element(self, z2):
        X = delta_action(z2)
        assert scalar_coefficient_check(X, z2.A_units[0]) is None

    def test_outside_algebra(self, z2):
        X = delta_action(z2)
        with pytest.raises(ValueError):
            scalar_coefficient_check(X, np.array([[0, 1], [0, 0]], complex))

    def test_all_invariant_elements_are_scalar(self, groups):
        # every invariant element of a faithfully-acted object is a multiple
        # of the identity, certified by the scalar extraction
        for name in ("Z2", "Z3"):
            X = delta_action(groups[name])
            for v in invariant_subspace(X).basis:
                lam = scalar_coefficient_check(X, v)
                assert lam is not None
                assert rel_residual(v, lam * np.eye(groups[name].n)) < 1e-9


class TestMorphisms:
    def test_identity_and_unit(self, z2):
        X = delta_action(z2)
        idX = identity_morphism(X)
        assert all_passed(idX.records)
        one = unit_morphism(z2, X)
        assert np.abs(one(np.eye(1)) - np.eye(2)).max() < 1e-14

    def test_composition_is_equivariant(self, z2):
        X = delta_action(z2)
        XA, rho1 = tensor_with_A(X)
        XAA, rho2 = tensor_with_A(XA)
        comp = rho2.compose(rho1)
        assert comp.intertwining_defect() <= 2 * max(
            rho1.intertwining_defect(), rho2.intertwining_defect()) + 1e-12
        assert all_passed(comp.records)

    def test_non_equivariant_rejected(self, z2):
        X = delta_action(z2)
        D = builtin_object("D", z2)
        # the identity on carriers is not equivariant from (A, Delta) to D
        from braidcat.linalg import LinearMap
        mapping = LinearMap(X.alg.subspace, X.basis.copy(), D.carrier)
        with pytest.raises(InvariantViolation):
            GMorphism(X, D, mapping, name="bogus")


class TestClifford:
    def test_action_shape(self, z2):
        X = clifford1_graded(z2)
        c = X.basis[1] * np.sqrt(2)
        sign = z2.A_units[0] - z2.A_units[1]
        assert np.abs(X.rho(c) - kron(SZ, sign)).max() < 1e-12
        assert all_passed(X.records)

    def test_needs_z2(self, groups):
        with pytest.raises(GroupError):
            clifford1_graded(groups["Z3"])


class TestSpecs:
    def test_builtin_names(self, z2):
        assert builtin_object("delta_action", z2).dim == 2
        assert builtin_object("trivial:3", z2).dim == 9
        with pytest.raises(ValueError):
            builtin_object("nope", z2)

    def test_explicit_action_round_trip(self, z2):
        X = delta_action(z2)
        coords = []
        for x in X.basis:
            w = X.rho(x)
            row = [[0.0] * z2.A.dim for _ in range(X.dim)]
            for j, xj in enumerate(X.basis):
                for g, ag in enumerate(z2.A.basis):
                    c = np.vdot(kron(xj, ag), w)
                    row[j][g] = [float(c.real), float(c.imag)]
            coords.append(row)
        from braidcat.fqg import matrix_to_json
        spec = {"algebra": {"carrier_dim": 2,
                            "basis": [matrix_to_json(m) for m in X.basis]},
                "action": coords, "name": "A-again"}
        Y = galgebra_from_spec(z2, spec)
        for x in X.basis:
            assert rel_residual(Y.rho(x), X.rho(x)) < 1e-12
