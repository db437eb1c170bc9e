import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import unitary_group

from conftest import bell_vector, schmidt_vector
from qmonogamy.entropies import majorizes
from qmonogamy.errors import BadRank, DimensionMismatch, NotHermitian, NotNormalized, NotPositive
from qmonogamy.qcore import (
    BipartiteSplit,
    DensityMatrix,
    Spectrum,
    hermitian_spectrum,
    partial_trace,
    partial_transpose,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    reduce_subsystems,
    symmetric_three_qubit_pure,
    tensor,
)

seeds = st.integers(0, 2**32 - 1)


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]))

    def test_rejects_bad_trace(self):
        with pytest.raises(NotNormalized):
            DensityMatrix(np.eye(2))

    def test_rejects_negative(self):
        with pytest.raises(NotPositive):
            DensityMatrix(np.diag([1.1, -0.1]))

    def test_tolerates_roundoff(self):
        DensityMatrix(np.diag([1 + 5e-11, -5e-11]))

    def test_factor_product_checked(self):
        with pytest.raises(DimensionMismatch):
            DensityMatrix(np.eye(4) / 4, (2, 3))

    def test_data_read_only(self):
        rho = DensityMatrix(np.eye(2) / 2)
        with pytest.raises(ValueError):
            rho.data[0, 0] = 1


class TestSpectrum:
    def test_identity_half(self):
        assert np.allclose(hermitian_spectrum(np.eye(2) / 2).probs, [0.5, 0.5])

    def test_diagonal(self):
        assert np.allclose(hermitian_spectrum(np.diag([0.3, 0.7])).probs, [0.7, 0.3])

    def test_bell_projector(self):
        psi = bell_vector()
        assert np.allclose(hermitian_spectrum(np.outer(psi, psi.conj())).probs, [1, 0, 0, 0], atol=1e-12)

    def test_clamps_small_negatives(self):
        s = Spectrum.from_values([0.6, 0.4 + 5e-11, -5e-11])
        assert s.probs[-1] == 0.0
        assert abs(s.probs.sum() - 1) < 1e-15

    def test_non_hermitian_rejected(self):
        with pytest.raises(NotHermitian):
            hermitian_spectrum(np.array([[0.5, 1e-6], [0, 0.5]]))

    def test_descending(self, rng):
        p = hermitian_spectrum(random_density_matrix(5, rng=rng)).probs
        assert np.all(np.diff(p) <= 0)


class TestPartialTrace:
    def test_bell_keep_a(self):
        red = partial_trace(DensityMatrix.from_vector(bell_vector(), (2, 2)))
        assert np.allclose(red.data, np.eye(2) / 2, atol=1e-15)

    def test_schmidt_keep_a(self):
        red = partial_trace(DensityMatrix.from_vector(schmidt_vector(0.8), (2, 2)))
        assert np.allclose(red.data, np.diag([0.8, 0.2]), atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            partial_trace(np.eye(6) / 6, BipartiteSplit(2, 2))

    @given(seeds, st.sampled_from([(2, 2), (2, 3), (3, 4), (4, 2)]))
    def test_product_keeps_factor(self, seed, dims):
        rng = np.random.default_rng(seed)
        r1 = random_density_matrix(dims[0], rng=rng)
        r2 = random_density_matrix(dims[1], rng=rng)
        prod = tensor(r1, r2)
        assert np.max(np.abs(partial_trace(prod, keep="A").data - r1.data)) < 1e-12
        assert np.max(np.abs(partial_trace(prod, keep="B").data - r2.data)) < 1e-12

    def test_against_explicit_sum(self, rng):
        # independent reduction by summing over an explicit basis of B
        rho = random_density_matrix(6, rng=rng, factors=(2, 3)).data
        expect = np.zeros((2, 2), dtype=complex)
        for j in range(3):
            e = np.zeros(3)
            e[j] = 1
            proj = np.kron(np.eye(2), e[None, :])
            expect += proj @ rho @ proj.T
        assert np.allclose(partial_trace(rho, BipartiteSplit(2, 3)).data, expect, atol=1e-14)

    def test_reduce_subsystems_matches_bipartite(self, rng):
        rho = random_density_matrix(12, rng=rng).data
        assert np.allclose(reduce_subsystems(rho, (2, 3, 2), (0, 1)),
                           partial_trace(rho, BipartiteSplit(6, 2)).data, atol=1e-14)
        assert np.allclose(reduce_subsystems(rho, (2, 3, 2), (1, 2)),
                           partial_trace(rho, BipartiteSplit(2, 6), "B").data, atol=1e-14)


class TestPartialTranspose:
    def test_bell_spectrum(self):
        pt = partial_transpose(DensityMatrix.from_vector(bell_vector(), (2, 2)))
        assert np.allclose(np.sort(np.linalg.eigvalsh(pt)), [-0.5, 0.5, 0.5, 0.5])

    def test_product_unchanged_spectrum(self, rng):
        prod = tensor(random_density_matrix(2, rng=rng), random_density_matrix(3, rng=rng))
        assert np.allclose(np.linalg.eigvalsh(partial_transpose(prod)), np.linalg.eigvalsh(prod.data))

    def test_matches_explicit_definition(self, rng):
        m = random_density_matrix(6, rng=rng).data
        t = partial_transpose(m, BipartiteSplit(2, 3))
        for i in range(2):
            for j in range(3):
                for k in range(2):
                    for l in range(3):
                        assert t[3 * i + j, 3 * k + l] == m[3 * i + l, 3 * k + j]

    @given(seeds, st.sampled_from([(2, 2), (2, 3), (3, 3), (2, 4)]), st.sampled_from(["A", "B"]))
    def test_involution_and_trace(self, seed, dims, side):
        rho = random_density_matrix(dims[0] * dims[1], rng=np.random.default_rng(seed))
        split = BipartiteSplit(*dims)
        once = partial_transpose(rho, split, side)
        assert abs(np.trace(once) - 1) < 1e-12
        assert np.array_equal(partial_transpose(once, split, side), rho.data)


class TestSampling:
    def test_dim_one(self):
        assert np.allclose(random_pure_state(1, 0).data, [[1]])

    def test_pure_state_purity(self):
        rho = random_pure_state(2, 7)
        assert abs(np.trace(rho.data) - 1) < 1e-12 and abs(rho.purity() - 1) < 1e-12

    def test_haar_reduced_purity_against_scipy_sampler(self):
        # mean tr(rho_A^2) for Haar states on 2x2 is (dA + dB)/(dA dB + 1) = 4/5
        n = 10_000
        ours = np.array([partial_trace(random_pure_state(4, s, (2, 2))).purity() for s in range(n)])
        cols = unitary_group.rvs(4, size=n, random_state=99)[:, :, 0]
        theirs = np.array([partial_trace(np.outer(c, c.conj()), BipartiteSplit(2, 2)).purity() for c in cols])
        se = np.hypot(ours.std() / np.sqrt(n), theirs.std() / np.sqrt(n))
        assert abs(ours.mean() - theirs.mean()) < 3 * se
        assert abs(ours.mean() - 0.8) < 3 * ours.std() / np.sqrt(n)

    def test_rank(self, rng):
        lam = np.linalg.eigvalsh(random_density_matrix(3, 2, rng).data)
        assert lam[0] < 1e-12 and lam[1] > 1e-12

    def test_rank_one_is_pure(self, rng):
        assert abs(random_density_matrix(4, 1, rng).purity() - 1) < 1e-12

    def test_bad_rank(self):
        with pytest.raises(BadRank):
            random_density_matrix(2, 3)

    @given(seeds, st.integers(1, 6))
    def test_unitary(self, seed, d):
        u = random_unitary(d, seed)
        assert np.max(np.abs(u.conj().T @ u - np.eye(d))) < 1e-10
        assert abs(abs(np.linalg.det(u)) - 1) < 1e-10
        assert np.max(np.abs(u @ (np.eye(d) / d) @ u.conj().T - np.eye(d) / d)) < 1e-12

    @given(seeds, st.integers(2, 5))
    def test_spectrum_unitarily_invariant(self, seed, d):
        rng = np.random.default_rng(seed)
        rho = random_density_matrix(d, rng=rng)
        rot = rho.conjugate_by(random_unitary(d, rng))
        assert np.max(np.abs(rot.spectrum().probs - rho.spectrum().probs)) < 1e-10

    @given(seeds, st.integers(2, 5), st.floats(0, 1))
    def test_ky_fan(self, seed, d, tau):
        rng = np.random.default_rng(seed)
        a, b = random_density_matrix(d, rng=rng), random_density_matrix(d, rng=rng)
        mixed_spec = hermitian_spectrum(tau * a.data + (1 - tau) * b.data).probs
        combo = tau * a.spectrum().probs + (1 - tau) * b.spectrum().probs
        assert majorizes(combo, mixed_spec)


class TestSymmetric:
    def _swap_invariant(self, m):
        t = m.reshape([2] * 6)
        for perm in [(1, 0, 2), (0, 2, 1), (2, 1, 0)]:
            p = t.transpose(list(perm) + [3 + k for k in perm]).reshape(8, 8)
            assert np.max(np.abs(p - m)) < 1e-10

    def test_000(self):
        rho = symmetric_three_qubit_pure([1, 0, 0, 0])
        assert rho.data[0, 0] == 1 and abs(rho.purity() - 1) < 1e-14

    def test_w_reductions_identical(self):
        m = symmetric_three_qubit_pure([0, 1, 0, 0]).data
        self._swap_invariant(m)
        dims = (2, 2, 2)
        r01, r02, r12 = (reduce_subsystems(m, dims, k) for k in [(0, 1), (0, 2), (1, 2)])
        assert np.allclose(r01, r02) and np.allclose(r01, r12)

    def test_ghz_single_qubit(self):
        m = symmetric_three_qubit_pure(np.array([1, 0, 0, 1]) / np.sqrt(2)).data
        assert np.allclose(reduce_subsystems(m, (2, 2, 2), (0,)), np.eye(2) / 2)

    @given(seeds)
    def test_random_coeffs_symmetric(self, seed):
        rng = np.random.default_rng(seed)
        c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        self._swap_invariant(symmetric_three_qubit_pure(c / np.linalg.norm(c)).data)

    def test_unnormalized(self):
        with pytest.raises(NotNormalized):
            symmetric_three_qubit_pure([1, 1, 0, 0])
