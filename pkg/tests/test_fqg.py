import itertools

import numpy as np
import pytest

from braidcat.fqg import (
    AbelianStructure,
    FiniteQuantumGroup,
    GroupError,
    GroupTable,
    InvariantViolation,
    build_function_algebra,
    builtin_group,
    check_bicharacter,
    group_from_spec,
    heisenberg_check,
    opposite_group,
)
from braidcat.linalg import kron, rel_residual
from braidcat.report import all_passed
from conftest import I2, SX


def s3_table():
    els = list(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(els)}

    def mul(p, q):
        return tuple(p[q[i]] for i in range(3))

    return [[idx[mul(p, q)] for q in els] for p in els]


class TestGroupTable:
    def test_cyclic_properties(self):
        t = GroupTable.cyclic(4)
        assert t.identity == 0
        assert t.inverse == (0, 3, 2, 1)
        assert t.is_abelian

    def test_s3_is_a_group(self):
        t = GroupTable(s3_table())
        assert not t.is_abelian
        assert t.n == 6

    def test_invalid_tables(self):
        with pytest.raises(GroupError):
            GroupTable([[0, 1], [0, 1]])     # no inverses for element 1
        with pytest.raises(GroupError):
            GroupTable([[1, 0], [1, 0]])     # no identity
        # associativity failure: a "multiplication" that is not a group
        with pytest.raises(GroupError):
            GroupTable([[0, 1, 2], [1, 0, 0], [2, 0, 1]])

    def test_opposite_transposes(self):
        t = GroupTable(s3_table())
        topp = t.opposite()
        assert topp.mul(1, 2) == t.mul(2, 1)


class TestAbelianStructure:
    def test_cyclic(self):
        ab = AbelianStructure.from_table(GroupTable.cyclic(6))
        assert sorted(ab.factors, reverse=True) == [6]

    def test_z2xz4_invariant_factors(self):
        ab = AbelianStructure.from_table(GroupTable.from_factors([2, 4]))
        assert sorted(ab.factors, reverse=True) == [4, 2]

    def test_characters_are_homomorphisms(self):
        g = GroupTable.from_factors([2, 2])
        ab = AbelianStructure.from_table(g)
        for x in ab.character_exponents():
            chi = ab.character(x)
            for a in range(4):
                for b in range(4):
                    assert abs(chi[g.mul(a, b)] - chi[a] * chi[b]) < 1e-12

    def test_nonabelian_rejected(self):
        with pytest.raises(GroupError):
            AbelianStructure.from_table(GroupTable(s3_table()))


class TestBuiltins:
    def test_trivial_group(self, groups):
        G = groups["trivial"]
        assert G.n == 1
        assert np.array_equal(G.V, np.ones((1, 1)))
        for r in check_bicharacter(G):
            assert r.residual == 0.0

    def test_z2_bicharacter_matrix_frozen(self, z2):
        d0, d1 = z2.A_units
        assert np.array_equal(z2.V, kron(I2, d0) + kron(SX, d1))

    def test_z2_bicharacter_against_group_sum_oracle(self, z2):
        # oracle: (id (x) Delta)V = sum_{h,k} t_{hk} (x) d_h (x) d_k, and
        # V12 V13 by raw kron arithmetic
        t = z2.A_hat_units
        d = z2.A_units
        lhs = sum(kron(t[(h + k) % 2], d[h], d[k]) for h in range(2) for k in range(2))
        v12 = sum(kron(t[g], d[g], I2) for g in range(2))
        v13 = sum(kron(t[g], I2, d[g]) for g in range(2))
        assert np.linalg.norm(lhs - v12 @ v13) < 1e-14
        lhs2 = sum(kron(t[g], t[g], d[g]) for g in range(2))
        v23 = sum(kron(I2, t[g], d[g]) for g in range(2))
        assert np.linalg.norm(lhs2 - v23 @ v13) < 1e-14
        assert all_passed(check_bicharacter(z2))

    @pytest.mark.parametrize("name", ["Z3", "Z4", "Z2xZ2"])
    def test_builtin_invariants_tight(self, groups, name):
        G = groups[name]
        for rec in G.validate():
            assert rec.residual < 1e-12, rec.name

    def test_z4_heisenberg_conjugation_oracle(self, groups):
        G = groups["Z4"]
        V = G.V
        for g in range(4):
            lhs = G.delta(G.A_units[g])
            rhs = V @ kron(G.A_units[g], np.eye(4)) @ V.conj().T
            assert np.linalg.norm(lhs - rhs) < 1e-13
        assert heisenberg_check(G).passed

    def test_regularity(self, groups):
        for G in groups.values():
            dim, full = G.regularity_defect()
            assert dim == full

    def test_unknown_builtin(self):
        with pytest.raises(GroupError):
            builtin_group("Z17")


class TestCorruption:
    def test_sign_flip_detected(self, z2):
        bad = np.array(z2.V)
        bad[0, 0] = -bad[0, 0]
        broken = FiniteQuantumGroup(
            z2.H, z2.A, z2.A_hat, z2.delta, z2.delta_hat, bad,
            name="Z2-corrupt", table=z2.table, abelian=z2.abelian,
            A_units=z2.A_units, A_hat_units=z2.A_hat_units, validate=False)
        worst = max(r.residual for r in check_bicharacter(broken))
        assert worst >= 1.0

    def test_validation_raises(self, z2):
        bad = np.array(z2.V)
        bad[0, 0] = -bad[0, 0]
        with pytest.raises(InvariantViolation):
            FiniteQuantumGroup(
                z2.H, z2.A, z2.A_hat, z2.delta, z2.delta_hat, bad,
                name="Z2-corrupt", table=z2.table, abelian=z2.abelian,
                A_units=z2.A_units, A_hat_units=z2.A_hat_units)


class TestNonabelian:
    def test_s3_full_invariants(self):
        G = build_function_algebra(s3_table(), name="S3")
        assert all_passed(G.validate())
        assert G.abelian is None

    def test_s3_opposite_passes_and_identification(self):
        G = build_function_algebra(s3_table(), name="S3")
        Gopp = opposite_group(G)
        assert all_passed(check_bicharacter(Gopp))
        # the opposite comultiplication is the flipped one
        for a in G.A_units:
            flipped = G.HH.permute(G.delta(a), [2, 1])
            assert rel_residual(Gopp.delta(a), flipped) < 1e-13
        # bicharacter identification: V_opp = (J (x) I) V* (J (x) I)
        J = G.inversion_permutation()
        eye = np.eye(6)
        expected = kron(J, eye) @ G.V.conj().T @ kron(J, eye)
        assert np.linalg.norm(Gopp.V - expected) < 1e-13


class TestOpposite:
    def test_abelian_opposite_is_itself(self, groups):
        for name in ("Z2", "Z3", "Z2xZ2"):
            G = groups[name]
            Gopp = opposite_group(G)
            assert np.array_equal(Gopp.V, G.V)
            for a in G.A_units:
                assert np.array_equal(Gopp.delta(a), G.delta(a))

    def test_involution(self, groups):
        G = groups["Z4"]
        back = opposite_group(opposite_group(G))
        assert np.abs(back.V - G.V).max() < 1e-12

    def test_needs_table(self, z2):
        spec = _custom_spec_of(z2)
        custom = group_from_spec(spec)
        with pytest.raises(GroupError):
            opposite_group(custom)


def _custom_spec_of(G):
    from braidcat.fqg import matrix_to_json
    return {
        "kind": "custom",
        "H_dim": G.n,
        "name": "custom-z2",
        "A_basis": [matrix_to_json(m) for m in G.A.basis],
        "A_hat_basis": [matrix_to_json(m) for m in G.A_hat.basis],
        "V": matrix_to_json(G.V),
        "delta": [matrix_to_json(G.delta(m)) for m in G.A.basis],
        "delta_hat": [matrix_to_json(G.delta_hat(m)) for m in G.A_hat.basis],
    }


class TestSpecs:
    def test_finite_abelian(self):
        G = group_from_spec({"kind": "finite_abelian", "factors": [2, 2]})
        assert G.n == 4
        assert tuple(sorted(G.abelian.factors)) == (2, 2)

    def test_factor_validation(self):
        with pytest.raises(GroupError):
            group_from_spec({"kind": "finite_abelian", "factors": [1, 2]})

    def test_group_table_spec(self):
        G = group_from_spec({"kind": "group_table",
                             "table": [[0, 1], [1, 0]], "name": "Z2t"})
        assert all_passed(G.validate())

    def test_opposite_of_spec(self):
        G = group_from_spec({"kind": "opposite_of", "of": "Z3"})
        assert G.n == 3

    def test_custom_round_trip(self, z2):
        G = group_from_spec(_custom_spec_of(z2))
        assert np.abs(G.V - z2.V).max() < 1e-12
        assert all_passed(G.validate())

    def test_custom_invalid_rejected(self, z2):
        spec = _custom_spec_of(z2)
        spec["V"][0][0] = [-1.0, 0.0]
        with pytest.raises(InvariantViolation):
            group_from_spec(spec)
