import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import bell_vector, schmidt_vector
from qmonogamy.entropies import EntropyKind, binary_entropy
from qmonogamy.errors import DimensionMismatch, OutOfRange, Unsupported, UnsupportedDStar
from qmonogamy.gbound import OrbitConfig
from qmonogamy.measures import (
    MeasureDescriptor,
    max_negativity_state,
    neg_spectrum_G,
    negativity,
    rotated_qubit_basis,
)
from qmonogamy.monogamy import (
    MonogamyReport,
    check_combined_n_party,
    check_entanglement_monogamy,
    check_negativity_g,
    check_resource_monogamy,
    check_usual_monogamy,
    default_entanglement,
    find_crossover,
    pure_extension,
    saturate_resource,
    symmetric_family_scan,
    symmetric_grid,
    three_qubit_bounds,
)
from qmonogamy.qcore import (
    BipartiteSplit,
    DensityMatrix,
    partial_trace,
    random_density_matrix,
    random_pure_state,
    random_pure_vector,
    random_unitary,
    reduce_subsystems,
    symmetric_three_qubit_vector,
)

seeds = st.integers(0, 2**32 - 1)
LN2 = np.log(2)
Q = BipartiteSplit(2, 2)
GHZ = np.array([1, 0, 0, 0, 0, 0, 0, 1]) / np.sqrt(2)
W = symmetric_three_qubit_vector([0, 1, 0, 0])


def pure(psi, dims):
    return DensityMatrix.from_vector(psi, dims)


def max_entangled(d):
    return np.eye(d).ravel() / np.sqrt(d)


class TestResource:
    def test_product(self):
        psi = np.kron(np.array([1, 1]) / np.sqrt(2), [1, 0])
        r = check_resource_monogamy(pure(psi, (2, 2)), Q, MeasureDescriptor.coherence(dim=2))
        assert r.lhs == pytest.approx(LN2, abs=1e-14) and not r.violated

    def test_dephasing_computational_basis(self):
        r = check_resource_monogamy(pure(schmidt_vector(0.8), (2, 2)), Q, MeasureDescriptor.coherence(dim=2))
        assert r.lhs == pytest.approx(binary_entropy(0.8), abs=1e-14)
        assert r.rhs == pytest.approx(LN2)

    def test_dephasing_rotated_basis_saturates(self):
        m = MeasureDescriptor.coherence(rotated_qubit_basis(np.pi / 4))
        r = check_resource_monogamy(pure(schmidt_vector(0.8), (2, 2)), Q, m)
        assert r.slack == pytest.approx(0, abs=1e-14) and not r.violated

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            check_resource_monogamy(pure(schmidt_vector(0.8), (2, 2)), Q, MeasureDescriptor.coherence(dim=3))

    def test_tsallis_weight_saturation(self):
        # maximally entangled: R(rho_A) = 0 and d^(q-1) S_T(uniform) = R_sup
        m = MeasureDescriptor.nonuniformity(3, EntropyKind.tsallis(2))
        r = check_resource_monogamy(pure(max_entangled(3), (3, 3)), BipartiteSplit(3, 3), m)
        assert r.slack == pytest.approx(0, abs=1e-12)

    def test_mixed_uses_convex_roof(self, rng):
        rho = random_density_matrix(4, 2, rng, (2, 2))
        r = check_resource_monogamy(rho, Q, MeasureDescriptor.coherence(dim=2))
        assert r.evaluator == "convexroof" and r.approximate and r.tol == 1e-4
        assert not r.violated

    def test_custom_evaluator(self):
        r = check_resource_monogamy(pure(schmidt_vector(0.8), (2, 2)), Q, MeasureDescriptor.coherence(dim=2),
                                    ent=lambda rho: 10.0)
        assert r.violated and r.evaluator == "custom"

    @given(seeds, st.sampled_from([(2, 2), (3, 2), (3, 4), (4, 4)]))
    def test_random_pure_nonuniformity(self, seed, dims):
        rng = np.random.default_rng(seed)
        rho = random_pure_state(dims[0] * dims[1], rng, dims)
        for kind in (EntropyKind(), EntropyKind.renyi(2), EntropyKind.tsallis(0.5), EntropyKind.tsallis(3)):
            m = MeasureDescriptor.nonuniformity(dims[0], kind)
            assert not check_resource_monogamy(rho, BipartiteSplit(*dims), m).violated

    @given(seeds)
    def test_entanglement_local_unitary_invariant(self, seed):
        rng = np.random.default_rng(seed)
        rho = random_pure_state(12, rng, (3, 4))
        u = np.kron(random_unitary(3, rng), random_unitary(4, rng))
        for m in (MeasureDescriptor.coherence(dim=3), MeasureDescriptor.nonuniformity(3, EntropyKind.renyi(2))):
            ent = default_entanglement(m, BipartiteSplit(3, 4))
            assert abs(ent(rho)[0] - ent(rho.conjugate_by(u))[0]) < 1e-9


class TestEntanglement:
    def test_bell_times_pure_b(self):
        psi = np.kron(bell_vector(), [1, 0, 0, 0])
        r = check_entanglement_monogamy(pure(psi, (2, 2, 4)))
        assert r.lhs == pytest.approx(0.5, abs=1e-12) and r.slack == pytest.approx(0, abs=1e-12)

    def test_maximally_mixed_reduction(self):
        r = check_entanglement_monogamy(pure(max_entangled(4), (2, 2, 4)))
        assert r.lhs == pytest.approx(0.5, abs=1e-12)

    def test_dims_checked(self):
        with pytest.raises(DimensionMismatch):
            check_entanglement_monogamy(pure(random_pure_vector(18, 0), (3, 2, 3)))

    def test_random(self):
        rng = np.random.default_rng(8)
        for _ in range(500):
            assert not check_entanglement_monogamy(random_pure_state(16, rng, (2, 2, 4))).violated

    def test_local_unitary_invariance(self, rng):
        rho = random_pure_state(16, rng, (2, 2, 4))
        u = np.kron(np.kron(random_unitary(2, rng), random_unitary(2, rng)), random_unitary(4, rng))
        a = check_entanglement_monogamy(rho)
        b = check_entanglement_monogamy(rho.conjugate_by(u))
        assert abs(a.lhs - b.lhs) < 1e-9

    def test_mixed_flagged(self, rng):
        r = check_entanglement_monogamy(random_density_matrix(8, 2, rng, (2, 2, 2)))
        assert r.approximate and r.tol == 1e-4 and not r.violated


class TestNegativityG:
    def test_maximal_ab(self):
        r = check_negativity_g(pure(max_entangled(4), (2, 2, 4)))
        assert r.lhs == pytest.approx(0.5, abs=1e-12) and not r.violated

    def test_product(self):
        psi = np.kron(bell_vector(), [0, 1, 0])
        r = check_negativity_g(pure(psi, (2, 2, 3)))
        assert r.lhs == pytest.approx(0.5, abs=1e-12) and not r.violated

    def test_unsupported(self):
        with pytest.raises(UnsupportedDStar):
            check_negativity_g(pure(bell_vector(), (2, 2, 1)))

    @pytest.mark.parametrize("d_b", [2, 3, 4, 5])
    def test_random(self, d_b):
        rng = np.random.default_rng(d_b)
        for _ in range(300):
            assert not check_negativity_g(random_pure_state(4 * d_b, rng, (2, 2, d_b))).violated

    def test_d3_closed_form_counterexample(self):
        # rho_A at maximal negativity on its orbit, purified into a qutrit
        p = np.array([0.47860975, 0.28653804, 0.23485221, 0.0])
        rho_a = max_negativity_state(p)
        w, v = np.linalg.eigh(rho_a)
        psi = sum(np.sqrt(max(w[i], 0)) * np.kron(v[:, i], np.eye(3)[k])
                  for k, i in enumerate(np.argsort(w)[::-1][:3]))
        rho = pure(psi / np.linalg.norm(psi), (2, 2, 3))
        assert negativity(rho_a, Q) == pytest.approx(neg_spectrum_G(p), abs=1e-14)
        analytic = check_negativity_g(rho, g="analytic")
        numeric = check_negativity_g(rho, g="numeric")
        assert analytic.violated and analytic.lhs == pytest.approx(0.50265, abs=2e-5)
        assert not numeric.violated


class TestUsual:
    def test_ghz(self):
        r = check_usual_monogamy(pure(GHZ, (2, 2, 2)))
        assert r.lhs == pytest.approx(0, abs=1e-14) and r.rhs == pytest.approx(0.25, abs=1e-12)

    def test_w(self):
        r = check_usual_monogamy(pure(W, (2, 2, 2)))
        e12 = (np.sqrt(5) - 1) / 6
        assert r.lhs == pytest.approx(2 * e12**2, abs=1e-12)
        assert r.rhs == pytest.approx(2 / 9, abs=1e-12)
        assert not r.violated

    def test_product(self):
        psi = np.zeros(8)
        psi[0] = 1
        r = check_usual_monogamy(pure(psi, (2, 2, 2)))
        assert r.lhs == 0 and r.rhs == 0 and not r.violated

    def test_dims(self):
        with pytest.raises(DimensionMismatch):
            check_usual_monogamy(np.eye(4) / 4)

    def test_mixed_out_of_domain(self, rng):
        assert not check_usual_monogamy(random_density_matrix(8, 3, rng)).in_domain


class TestCombined:
    def test_ghz_product_b(self):
        a, b = check_combined_n_party(pure(np.kron(GHZ, [1, 0]), (2, 2, 2, 2)))
        assert a.lhs == pytest.approx(0, abs=1e-14) and b.lhs == pytest.approx(0, abs=1e-14)
        assert not a.in_domain and not b.in_domain

    def test_product_b_leaves_pairwise_terms(self, rng):
        psi_a = random_pure_vector(8, rng)
        a, b = check_combined_n_party(pure(np.kron(psi_a, [0, 1]), (2, 2, 2, 2)))
        assert a.evaluator == "closed-form"
        # E(A:B) = 0, so the first report is the sum of the A1 pair negativities
        m = np.outer(psi_a, psi_a.conj())
        pairs = [negativity(reduce_subsystems(m, (2, 2, 2), kl), Q) for kl in [(0, 1), (0, 2)]]
        assert a.lhs == pytest.approx(sum(pairs), abs=1e-12)

    def test_unsupported(self):
        with pytest.raises(Unsupported):
            check_combined_n_party(pure(np.eye(16)[0], (2, 2, 2, 2)), dims=(4, 2, 2))

    def test_large_environment_uses_search(self, rng):
        rho = random_pure_state(32, rng, (2, 2, 2, 4))
        a, _ = check_combined_n_party(rho, orbit_cfg=OrbitConfig(restarts=2, strict=False, max_evals=2000))
        assert a.evaluator == "orbit-search" and a.approximate


class TestThreeQubit:
    def test_bounds_zero(self):
        assert three_qubit_bounds(0) == (0.0, 0.5)

    def test_bounds_half(self):
        uem, mei = three_qubit_bounds(0.5)
        assert uem == pytest.approx(np.sqrt(2) / 4) and mei == pytest.approx((np.sqrt(0.5) - 0.5) / 2)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            three_qubit_bounds(0.6)

    def test_bracket(self):
        assert three_qubit_bounds(0.3)[0] < three_qubit_bounds(0.3)[1]
        assert three_qubit_bounds(0.45)[0] > three_qubit_bounds(0.45)[1]

    def test_crossover(self):
        x = find_crossover()
        assert 0.414 <= x <= 0.416
        uem, mei = three_qubit_bounds(x)
        assert abs(uem - mei) < 1e-8

    def test_w_saturates_entropy_bound(self):
        (row,) = symmetric_family_scan([[0, 1, 0, 0]])
        assert row.E2 == pytest.approx(np.sqrt(2) / 3, abs=1e-12)
        assert row.E1 == pytest.approx((np.sqrt(5) - 1) / 6, abs=1e-12)
        assert row.mei_bound == pytest.approx(row.E1, abs=1e-12)
        assert row.ok

    def test_ghz_and_000(self):
        ghz, zero = symmetric_family_scan([[1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)], [1, 0, 0, 0]])
        assert ghz.E2 == pytest.approx(0.5) and ghz.E1 == pytest.approx(0, abs=1e-14)
        assert ghz.tighter == "mei"
        assert zero.E1 == 0 and zero.E2 == 0

    def test_grid_scan(self):
        rows = symmetric_family_scan(symmetric_grid(7))
        assert all(r.ok for r in rows)

    @given(seeds)
    def test_random_symmetric(self, seed):
        rng = np.random.default_rng(seed)
        c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert symmetric_family_scan([c / np.linalg.norm(c)])[0].ok


class TestSaturation:
    def test_pure_extension_marginal(self):
        p = np.array([0.5, 0.3, 0.2])
        psi = pure_extension(p)
        m = np.outer(psi, psi.conj())
        assert np.allclose(partial_trace(m, BipartiteSplit(3, 3)).data, np.diag(p))

    def test_reaches_bound(self):
        s = saturate_resource(np.array([0.5, 0.3, 0.15, 0.05]), MeasureDescriptor.coherence(dim=4), rng=1)
        assert s.rhs - s.lhs < 1e-6
        assert s.sampled_lhs <= s.lhs


class TestReport:
    def test_violation_rule(self):
        r = MonogamyReport.build("usual", 1.0, 1.0 - 2e-9, np.eye(2) / 2, 1e-9)
        assert r.violated and r.slack == pytest.approx(-2e-9)
        r = MonogamyReport.build("usual", 1.0, 1.0 - 5e-10, np.eye(2) / 2, 1e-9)
        assert not r.violated

    def test_fingerprint_stable(self):
        a = pure(bell_vector(), (2, 2))
        b = pure(bell_vector(), (2, 2))
        assert a.fingerprint() == b.fingerprint()
