import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmonogamy.entropies import (
    VON_NEUMANN,
    EntropyKind,
    binary_entropy,
    entropy,
    majorizes,
    mix_toward_uniform,
)
from qmonogamy.errors import BadOrder, OutOfRange

KINDS = [VON_NEUMANN, EntropyKind.renyi(0.5), EntropyKind.renyi(2), EntropyKind.renyi(3.5),
         EntropyKind.tsallis(0.5), EntropyKind.tsallis(1.5), EntropyKind.tsallis(2), EntropyKind.tsallis(3)]


def random_probs(seed, d):
    p = np.random.default_rng(seed).dirichlet(np.ones(d) * 0.7)
    return np.sort(p)[::-1]


def test_examples():
    assert entropy([1, 0]) == 0
    assert entropy([0.5, 0.5]) == pytest.approx(np.log(2), abs=1e-15)
    assert entropy([0.5, 0.5], EntropyKind.tsallis(2)) == pytest.approx(0.5, abs=1e-15)


def test_order_one_collapses():
    assert EntropyKind.renyi(1) == VON_NEUMANN
    assert EntropyKind.tsallis(1.0) == VON_NEUMANN


@pytest.mark.parametrize("kind,order", [("renyi", 0), ("tsallis", -1), ("renyi", None)])
def test_bad_order(kind, order):
    with pytest.raises(BadOrder):
        EntropyKind(kind, order)


def test_binary():
    assert binary_entropy(0) == 0 and binary_entropy(1) == 0
    assert binary_entropy(0.5) == pytest.approx(np.log(2))
    # -0.8 ln 0.8 - 0.2 ln 0.2 by hand
    assert binary_entropy(0.8) == pytest.approx(0.8 * 0.22314355131420976 + 0.2 * 1.6094379124341003,
                                                abs=1e-15)
    with pytest.raises(OutOfRange):
        binary_entropy(1.2)


def test_majorization_examples():
    assert majorizes([1, 0], [0.5, 0.5])
    assert not majorizes([0.5, 0.5], [1, 0])
    assert majorizes([0.6, 0.4], [0.5, 0.3, 0.2])


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.label())
def test_pure_zero_uniform_max(kind):
    for d in (2, 3, 4):
        pure = np.eye(d)[0]
        uni = np.full(d, 1 / d)
        assert entropy(pure, kind) == pytest.approx(0, abs=1e-15)
        for seed in range(20):
            assert entropy(random_probs(seed, d), kind) <= entropy(uni, kind) + 1e-12


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.label())
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 6), t=st.floats(0, 1))
def test_schur_concave(kind, seed, d, t):
    p = random_probs(seed, d)
    q = mix_toward_uniform(p, t)
    assert majorizes(p, q)
    assert entropy(p, kind) <= entropy(q, kind) + 1e-12


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.label())
def test_zero_padding_invariant(kind):
    p = random_probs(3, 4)
    assert entropy(np.pad(p, (0, 3)), kind) == pytest.approx(entropy(p, kind), abs=1e-14)


def test_order_one_limit():
    # the deviation is first order in (a - 1): slopes -Var(ln p)/2 (Renyi) and -E[ln^2 p]/2 (Tsallis)
    p = random_probs(11, 5)
    lnp = np.log(p)
    h = entropy(p)
    slope_r = -0.5 * np.sum(p * (lnp + h) ** 2)
    slope_t = -0.5 * np.sum(p * lnp**2)
    for eps in (-1e-4, 1e-4):
        assert abs(entropy(p, EntropyKind.renyi(1 + eps)) - h - slope_r * eps) < 1e-7
        assert abs(entropy(p, EntropyKind.tsallis(1 + eps)) - h - slope_t * eps) < 1e-7
    for eps in (-1e-7, 1e-7):
        assert abs(entropy(p, EntropyKind.renyi(1 + eps)) - h) < 1e-6
        assert abs(entropy(p, EntropyKind.tsallis(1 + eps)) - h) < 1e-6


def test_order_one_limit_near_uniform():
    # with Var(ln p) small the stated 1e-6 window at 1 +- 1e-4 is met
    p = mix_toward_uniform(random_probs(11, 4), 0.9)
    for a in (1 - 1e-4, 1 + 1e-4):
        assert abs(entropy(p, EntropyKind.renyi(a)) - entropy(p)) < 1e-6
