import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from braidcat.linalg import (
    LegSpace,
    LinalgError,
    OperatorSubspace,
    embed_legs,
    kron,
    solve_linear_map,
    span_close,
    subspace_equal,
    subspace_intersect,
)
from conftest import I2, SX, SZ


def random_matrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


class TestKron:
    def test_identity_case(self):
        assert np.array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_defining_formula(self):
        rng = np.random.default_rng(0)
        a, b = random_matrix(rng, 2), random_matrix(rng, 3)
        k = kron(a, b)
        for i in range(2):
            for j in range(3):
                for p in range(2):
                    for q in range(3):
                        assert abs(k[3 * i + j, 3 * p + q]
                                   - a[i, p] * b[j, q]) < 1e-15

    def test_pauli_square_against_direct_multiplication(self):
        # oracle: multiply the explicit 4x4 matrix entry by entry
        m = kron(SX, SX)
        direct = np.zeros((4, 4), dtype=complex)
        for i in range(4):
            for j in range(4):
                direct[i, j] = sum(m[i, k] * m[k, j] for k in range(4))
        assert np.abs(direct - np.eye(4)).max() < 1e-15
        assert np.abs(m @ m - np.eye(4)).max() < 1e-15

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2 ** 31 - 1), st.integers(2, 3), st.integers(2, 3))
    def test_mixed_product_property(self, seed, n, m):
        rng = np.random.default_rng(seed)
        a, ap = random_matrix(rng, n), random_matrix(rng, n)
        b, bp = random_matrix(rng, m), random_matrix(rng, m)
        lhs = kron(a, b) @ kron(ap, bp)
        rhs = kron(a @ ap, b @ bp)
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)


class TestEmbedLegs:
    def test_identity(self):
        sp = LegSpace([2, 2])
        assert np.array_equal(embed_legs(np.eye(2), [1], sp), np.eye(4))

    def test_second_leg(self):
        sp = LegSpace([2, 2])
        assert np.array_equal(embed_legs(SX, [2], sp), kron(I2, SX))

    def test_exact_rearrangement(self):
        # every entry of the result is an entry of m or exactly zero
        rng = np.random.default_rng(1)
        m = random_matrix(rng, 2)
        out = embed_legs(m, [2], LegSpace([3, 2]))
        vals = set(np.round(out.reshape(-1), 14)) - {0j}
        assert vals <= set(np.round(m.reshape(-1), 14))

    def test_nonadjacent_legs_squared_vs_permutation_oracle(self):
        rng = np.random.default_rng(2)
        v = random_matrix(rng, 4)
        sp = LegSpace([2, 2, 2])
        emb = embed_legs(v, [1, 3], sp)
        assert np.linalg.norm(emb @ emb - embed_legs(v @ v, [1, 3], sp)) < 1e-12
        # oracle: conjugate kron(v, I) by the permutation (1,2,3) -> (1,3,2)
        perm = np.zeros((8, 8))
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    perm[4 * i + 2 * j + k, 4 * i + 2 * k + j] = 1.0
        assert np.linalg.norm(emb - perm @ kron(v, I2) @ perm.T) < 1e-13

    def test_dimension_mismatch(self):
        with pytest.raises(LinalgError):
            embed_legs(np.eye(3), [1], LegSpace([2, 2]))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2 ** 31 - 1))
    def test_multiplicative(self, seed):
        rng = np.random.default_rng(seed)
        sp = LegSpace([2, 3, 2])
        m, n = random_matrix(rng, 4), random_matrix(rng, 4)
        lhs = embed_legs(m @ n, [1, 3], sp)
        rhs = embed_legs(m, [1, 3], sp) @ embed_legs(n, [1, 3], sp)
        assert np.linalg.norm(lhs - rhs) <= 1e-13 * max(np.linalg.norm(rhs), 1)


class TestLegSpaceOps:
    def test_permute_round_trip(self):
        rng = np.random.default_rng(3)
        sp = LegSpace([2, 3])
        m = random_matrix(rng, 6)
        back = LegSpace([3, 2]).permute(sp.permute(m, [2, 1]), [2, 1])
        assert np.array_equal(back, m)

    def test_partial_trace(self):
        rng = np.random.default_rng(4)
        a, b = random_matrix(rng, 2), random_matrix(rng, 3)
        sp = LegSpace([2, 3])
        out = sp.partial_trace(kron(a, b), [2])
        assert np.linalg.norm(out - np.trace(b) * a) < 1e-13


class TestSpanClose:
    def test_collinear(self):
        sp = LegSpace([2])
        s = span_close([np.eye(2), 2 * np.eye(2)], sp)
        assert s.dim == 1

    def test_diagonal_units(self):
        sp = LegSpace([2])
        s = span_close([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], sp)
        assert s.dim == 2

    def test_rank_via_gram_eigenvalues(self):
        # oracle: the rank equals the number of nonzero Gram eigenvalues
        gens = [I2, SX, SX @ SX]
        rows = np.array([g.reshape(-1) for g in gens])
        gram = rows.conj() @ rows.T
        ev = np.linalg.eigvalsh(gram)
        rank = int(np.sum(ev > 1e-10 * ev.max()))
        assert rank == 2
        assert span_close(gens, LegSpace([2])).dim == 2

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        sp = LegSpace([3])
        s = span_close([random_matrix(rng, 3) for _ in range(5)], sp)
        again = span_close(list(s.basis), sp)
        assert again.dim == s.dim

    def test_empty_rejected(self):
        with pytest.raises(LinalgError):
            span_close([], LegSpace([2]))


class TestSubspaceEqual:
    def test_self(self):
        s = span_close([I2, SX], LegSpace([2]))
        cmp = subspace_equal(s, s)
        assert cmp.equal and cmp.residual < 1e-14

    def test_orthogonal_spans(self):
        sp = LegSpace([2])
        s1 = span_close([I2], sp)
        s2 = span_close([SZ], sp)
        assert not subspace_equal(s1, s2).equal

    def test_podles_span_of_comultiplication_action(self, z2):
        # oracle: explicit 4x4 span computation for the self-action of C(Z2)
        d0, d1 = z2.A_units
        delta = {0: kron(d0, d0) + kron(d1, d1), 1: kron(d0, d1) + kron(d1, d0)}
        lhs = [delta[g] @ kron(I2, dh) for g in (0, 1) for dh in (d0, d1)]
        rhs = [kron(dg, dh) for dg in (d0, d1) for dh in (d0, d1)]
        sp = LegSpace([2, 2])
        cmp = subspace_equal(span_close(lhs, sp), span_close(rhs, sp))
        assert cmp.equal and cmp.dims == (4, 4)

    def test_ambient_mismatch(self):
        with pytest.raises(LinalgError):
            subspace_equal(span_close([I2], LegSpace([2])),
                           span_close([np.eye(4)], LegSpace([4])))


class TestSubspaceIntersect:
    def test_self_intersection(self):
        s = span_close([I2, SX], LegSpace([2]))
        assert subspace_intersect(s, s).dim == s.dim

    def test_two_planes_meet_in_identity(self):
        sp = LegSpace([2])
        s1 = span_close([I2, SX], sp)
        s2 = span_close([I2, SZ], sp)
        meet = subspace_intersect(s1, s2)
        assert meet.dim == 1
        assert meet.residual_of(I2) < 1e-10
        # oracle: common elements = null space of the two orthocomplement
        # projectors stacked
        p1 = np.eye(4) - s1.flat.T @ s1.flat.conj()
        p2 = np.eye(4) - s2.flat.T @ s2.flat.conj()
        null_dim = 4 - np.linalg.matrix_rank(np.vstack([p1, p2]), tol=1e-10)
        assert null_dim == 1

    def test_orthogonal(self):
        sp = LegSpace([2])
        assert subspace_intersect(span_close([SX], sp),
                                  span_close([SZ], sp)).dim == 0

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2 ** 31 - 1))
    def test_contained_in_both(self, seed):
        rng = np.random.default_rng(seed)
        sp = LegSpace([2, 2])
        s1 = span_close([random_matrix(rng, 4) for _ in range(6)], sp)
        s2 = span_close([random_matrix(rng, 4) for _ in range(6)], sp)
        meet = subspace_intersect(s1, s2)
        for v in meet.basis:
            assert s1.residual_of(v) < 1e-9
            assert s2.residual_of(v) < 1e-9


class TestSolveLinearMap:
    def test_identity(self):
        sp = LegSpace([2])
        mats = [I2, SX, SZ]
        sol = solve_linear_map(mats, mats, sp, sp)
        assert sol.residual < 1e-14
        assert np.linalg.norm(sol(SX) - SX) < 1e-13

    def test_inconsistent_assignment(self):
        sp = LegSpace([2])
        # I and 2I are collinear but are sent to independent targets
        sol = solve_linear_map([I2, 2 * I2], [SX, SZ], sp, sp)
        assert sol.residual > 1e-2

    def test_respects_linear_relations(self):
        sp = LegSpace([2])
        sol = solve_linear_map([I2, SX, I2 + SX], [SZ, SX, SZ + SX], sp, sp)
        assert sol.residual < 1e-14
