import itertools

import numpy as np
import pytest

from braidcat.linalg import kron, rel_residual
from braidcat.report import all_passed
from braidcat.rmatrix import (
    DeltaRSolveError,
    RMatrix,
    RMatrixError,
    check_rmatrix,
    enumerate_bicharacter_rmatrices,
    opposite_rmatrix,
    rmatrix_from_exponents,
    rmatrix_from_spec,
    sign_rmatrix,
    solve_delta_r,
    trivial_rmatrix,
)
from conftest import I2, SX, SZ


def q_plus_minus():
    return (I2 + SX) / 2, (I2 - SX) / 2


class TestCheckRMatrix:
    def test_identity_on_z2(self, z2):
        assert all_passed(check_rmatrix(z2, np.eye(4)))

    def test_sign_matrix_frozen(self, z2, z2_sign):
        _, qm = q_plus_minus()
        assert np.abs(z2_sign.R - (np.eye(4) - 2 * kron(qm, qm))).max() < 1e-12

    def test_sign_axioms_against_character_sum_oracle(self, z2, z2_sign):
        # oracle: build all three axiom sides from explicit character sums
        qp, qm = q_plus_minus()
        q = [qp, qm]
        b = lambda x, y: (-1) ** (x * y)
        R = sum(b(x, y) * kron(q[x], q[y]) for x in range(2) for y in range(2))
        assert np.abs(R - z2_sign.R).max() < 1e-12
        # (id x Dhat) R where Dhat q_y = sum_{y1 y2 = y} q_y1 x q_y2
        lhs1 = sum(b(x, (y1 + y2) % 2) * kron(q[x], q[y1], q[y2])
                   for x in range(2) for y1 in range(2) for y2 in range(2))
        rhs1 = sum(b(x, y1) * b(x, y2) * kron(q[x], q[y1], q[y2])
                   for x in range(2) for y1 in range(2) for y2 in range(2))
        assert np.linalg.norm(lhs1 - rhs1) < 1e-14
        d = z2.A_units
        t = z2.A_hat_units
        v13 = sum(kron(t[g], I2, d[g]) for g in range(2))
        v23 = sum(kron(I2, t[g], d[g]) for g in range(2))
        r12 = kron(R, I2)
        assert np.linalg.norm(r12 @ v13 @ v23 - v23 @ v13 @ r12) < 1e-13
        assert all_passed(check_rmatrix(z2, R))

    def test_membership_violation(self, z2):
        recs = check_rmatrix(z2, kron(SZ, I2))
        bad = {r.law: r for r in recs}["rmatrix-membership"]
        assert not bad.passed and bad.residual > 1e-3

    def test_shape_check(self, z2):
        with pytest.raises(RMatrixError):
            check_rmatrix(z2, np.eye(2))


def brute_force_bicharacters(n):
    """All functions b: Z_n x Z_n -> mu_n with both multiplicativity laws,
    found by exhaustive filtering (independent of the shipped family)."""
    w = np.exp(2j * np.pi / n)
    found = []
    for exps in itertools.product(range(n), repeat=(n - 1) ** 2):
        b = np.ones((n, n), dtype=complex)
        for x in range(1, n):
            for y in range(1, n):
                b[x, y] = w ** exps[(x - 1) * (n - 1) + (y - 1)]
        ok = all(
            abs(b[(x1 + x2) % n, y] - b[x1, y] * b[x2, y]) < 1e-9
            for x1 in range(n) for x2 in range(n) for y in range(n)
        ) and all(
            abs(b[x, (y1 + y2) % n] - b[x, y1] * b[x, y2]) < 1e-9
            for x in range(n) for y1 in range(n) for y2 in range(n)
        )
        if ok:
            found.append(b)
    return found


class TestEnumeration:
    def test_counts(self, rfamilies):
        expected = {"trivial": 1, "Z2": 2, "Z3": 3, "Z4": 4, "Z2xZ2": 4}
        for name, fam in rfamilies.items():
            assert len(fam) == expected[name]

    def test_every_member_validates(self, rfamilies):
        for fam in rfamilies.values():
            for R in fam:
                assert all_passed(R.records)

    @pytest.mark.parametrize("name,n", [("Z2", 2), ("Z3", 3)])
    def test_cyclic_family_complete_by_brute_force(self, groups, rfamilies,
                                                   name, n):
        # oracle: for cyclic groups the diagonal family exhausts all
        # bicharacters of the dual character group
        brute = brute_force_bicharacters(n)
        assert len(brute) == n
        fam_mats = [R.R for R in rfamilies[name]]
        G = groups[name]
        from braidcat.rmatrix import _minimal_projections
        q = _minimal_projections(G)
        for b in brute:
            R = sum(b[x, y] * kron(q[x], q[y]) for x in range(n) for y in range(n))
            assert min(np.abs(R - m).max() for m in fam_mats) < 1e-10

    def test_offdiagonal_exponent_matrix_on_z2xz2(self, groups):
        G = groups["Z2xZ2"]
        R = rmatrix_from_exponents(G, [[0.0, 1.0], [0.0, 0.0]])
        assert all_passed(R.records)
        fam = enumerate_bicharacter_rmatrices(G)
        assert all(np.abs(R.R - F.R).max() > 1e-6 for F in fam)

    def test_nonabelian_rejected(self):
        from braidcat.fqg import build_function_algebra
        from test_fqg import s3_table
        G = build_function_algebra(s3_table(), name="S3")
        with pytest.raises(Exception):
            enumerate_bicharacter_rmatrices(G)


class TestRhatBicharacter:
    def test_rhat_satisfies_dual_bicharacter_laws(self, all_pairs):
        from braidcat.linalg import LegSpace
        for G, R in all_pairs:
            n = G.n
            HHH = LegSpace([n, n, n])
            lhs1, _ = G.delta_hat.apply_to_legs(R.R_hat, [2], G.HH)
            rhs1 = HHH.embed(R.R_hat, [1, 2]) @ HHH.embed(R.R_hat, [1, 3])
            assert rel_residual(lhs1, rhs1) < 1e-9
            lhs2, _ = G.delta_hat.apply_to_legs(R.R_hat, [1], G.HH)
            rhs2 = HHH.embed(R.R_hat, [2, 3]) @ HHH.embed(R.R_hat, [1, 3])
            assert rel_residual(lhs2, rhs2) < 1e-9


class TestSolveDeltaR:
    def test_trivial_r_gives_tensor_unit(self, all_pairs):
        for G, R in all_pairs:
            if R.label != "trivial":
                continue
            dr = solve_delta_r(G, R)
            for a in G.A.basis:
                assert np.abs(dr(a) - kron(a, np.eye(G.n))).max() < 1e-12

    def test_sign_solution_frozen_oracle(self, z2, z2_sign):
        # hand-derived: Delta_R(d_g) = d_g (x) q+ + d_{g+1} (x) q-
        dr = solve_delta_r(z2, z2_sign)
        qp, qm = q_plus_minus()
        d = z2.A_units
        for g in range(2):
            expect = kron(d[g], qp) + kron(d[(g + 1) % 2], qm)
            assert np.abs(dr(d[g]) - expect).max() < 1e-12
        assert all_passed(dr.records)

    def test_deterministic(self, z2, z2_sign):
        a = solve_delta_r(z2, z2_sign)
        b = solve_delta_r(z2, z2_sign)
        assert np.array_equal(a.map.images, b.map.images)

    def test_corrupted_r_rejected(self, z2, z2_sign):
        bad = np.array(z2_sign.R)
        bad[0, 1] += 0.25
        broken = RMatrix(z2, bad, label="broken", validate=False)
        with pytest.raises(DeltaRSolveError) as err:
            solve_delta_r(z2, broken)
        assert err.value.residual > 1e-8


class TestOpposite:
    def test_trivial(self, groups):
        R = trivial_rmatrix(groups["Z3"])
        Ropp = opposite_rmatrix(R)
        assert np.abs(Ropp.R - np.eye(9)).max() < 1e-12

    def test_sign_self_adjoint_revalidates(self, z2, z2_sign):
        Ropp = opposite_rmatrix(z2_sign)
        assert np.abs(Ropp.R - z2_sign.R).max() < 1e-12
        assert all_passed(Ropp.records)

    def test_involution(self, groups, rfamilies):
        R = rfamilies["Z3"][1]
        back = opposite_rmatrix(opposite_rmatrix(R))
        assert np.abs(back.R - R.R).max() < 1e-12

    def test_adjoint_for_abelian(self, groups, rfamilies):
        for name in ("Z3", "Z4", "Z2xZ2"):
            for R in rfamilies[name]:
                assert np.abs(opposite_rmatrix(R).R - R.R.conj().T).max() < 1e-12


class TestSpecs:
    def test_names(self, z2):
        assert rmatrix_from_spec(z2, "trivial").label == "trivial"
        assert np.abs(rmatrix_from_spec(z2, "sign").R
                      - sign_rmatrix(z2).R).max() < 1e-14
        R = rmatrix_from_spec(z2, "bicharacter:1")
        assert np.abs(R.R - sign_rmatrix(z2).R).max() < 1e-12

    def test_sign_needs_even_factors(self, groups):
        with pytest.raises(RMatrixError):
            sign_rmatrix(groups["Z3"])

    def test_custom_json(self, z2, z2_sign):
        from braidcat.fqg import matrix_to_json
        R = rmatrix_from_spec(z2, {"custom": matrix_to_json(z2_sign.R)})
        assert all_passed(R.records)

    def test_bad_name(self, z2):
        with pytest.raises(RMatrixError):
            rmatrix_from_spec(z2, "frobenius")
