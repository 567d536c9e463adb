import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from floqsim.errors import DivergenceError
from floqsim.stats import (
    Binning,
    ProbSampleSet,
    bin_scaled_probs,
    ensemble_density,
    haar_state,
    kl_discrete,
    kl_to_pt,
    pt_bin_masses,
    pt_density,
    pt_entropy,
    shannon_entropy,
    spacing_ratios,
)


def normalized_exponential_rows(rng, D, N):
    """Rows of i.i.d. exponentials normalized to probability vectors; their
    scaled values N*p follow the Porter-Thomas law up to O(1/N)."""
    e = rng.exponential(size=(D, N))
    return e / e.sum(axis=1, keepdims=True)


def test_pt_density_values():
    assert pt_density(0.0) == pytest.approx(1.0)
    assert pt_density(np.log(2.0)) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        pt_density(-0.1)


def test_pt_window_mass():
    # integral of exp(-x) over the default window
    assert pt_bin_masses(Binning()).sum() == pytest.approx(1 - np.exp(-12.0), abs=1e-12)
    assert pt_bin_masses(Binning()).sum() == pytest.approx(0.9999939, abs=1e-6)


def test_kl_discrete_examples():
    assert kl_discrete([0.5, 0.5], [0.5, 0.5]) == pytest.approx(0.0)
    assert kl_discrete([1.0, 0.0], [0.5, 0.5]) == pytest.approx(np.log(2.0))


def test_kl_discrete_errors():
    with pytest.raises(ValueError):
        kl_discrete([0.7, 0.7], [0.5, 0.5])
    with pytest.raises(ValueError):
        kl_discrete([1.0], [0.5, 0.5])
    with pytest.raises(DivergenceError):
        kl_discrete([0.5, 0.5], [1.0, 0.0])


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 30))
def test_kl_discrete_nonnegative(seed, n):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(n))
    q = rng.dirichlet(np.ones(n)) + 1e-12
    q /= q.sum()
    assert kl_discrete(p, q) >= -1e-12


def test_prob_sample_set_validation(rng):
    with pytest.raises(ValueError):
        ProbSampleSet(np.array([[0.5, 0.4]]))
    with pytest.raises(ValueError):
        ProbSampleSet(np.array([[1.5, -0.5]]))
    good = ProbSampleSet(normalized_exponential_rows(rng, 3, 16))
    assert good.D == 3 and good.N == 16 and good.values.size == 48


def test_kl_to_pt_self_consistency(rng):
    probs = normalized_exponential_rows(rng, 256, 4096)
    est = kl_to_pt(ProbSampleSet(probs))
    assert not est.undersampled
    assert est.value < 0.002


def test_kl_to_pt_uniform_state_far():
    N = 512
    probs = np.full((1, N), 1.0 / N)
    est = kl_to_pt(ProbSampleSet(probs))
    assert est.value > 1.0


def test_kl_to_pt_localized_state_far_and_flagging():
    probs = np.zeros((1, 512))
    probs[0, 0] = 1.0
    est = kl_to_pt(ProbSampleSet(probs))
    assert est.value > 1.0
    assert not est.undersampled  # 512 samples over 48 bins
    small = np.zeros((1, 32))
    small[0, 0] = 1.0
    assert kl_to_pt(ProbSampleSet(small)).undersampled


def test_kl_to_pt_order_invariance(rng):
    probs = normalized_exponential_rows(rng, 40, 64)
    a = kl_to_pt(ProbSampleSet(probs)).value
    b = kl_to_pt(ProbSampleSet(probs[rng.permutation(40)])).value
    shuffled = probs.copy()
    for row in shuffled:
        rng.shuffle(row)
    c = kl_to_pt(ProbSampleSet(shuffled)).value
    assert a == pytest.approx(b, abs=1e-14)
    assert a == pytest.approx(c, abs=1e-14)


def test_binned_masses_sum_to_captured_fraction():
    probs = np.zeros((1, 64))
    probs[0, 0] = 1.0  # x = 64 falls outside the window
    binned = bin_scaled_probs(ProbSampleSet(probs))
    assert binned.masses.sum() == pytest.approx(63 / 64)


def test_spacing_ratios_equal_spacing():
    phases = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    np.testing.assert_allclose(spacing_ratios(phases), 1.0, atol=1e-12)


def test_spacing_ratios_hand_example():
    r = spacing_ratios(np.array([0.0, np.pi / 2, 3 * np.pi / 2]))
    np.testing.assert_allclose(np.sort(r), [0.5, 0.5, 1.0], atol=1e-12)


def test_spacing_ratios_degenerate_rules():
    # two zero gaps meet -> ratio 1; a zero gap next to a finite one -> 0
    r = spacing_ratios(np.array([0.0, 0.0, 0.0, np.pi]))
    assert r.min() == 0.0
    assert np.sum(r == 1.0) >= 1
    with pytest.raises(ValueError):
        spacing_ratios(np.array([0.1, 0.2]))


def test_spacing_ratios_poisson_mean(rng):
    phases = rng.uniform(0, 2 * np.pi, 10_000)
    mean = spacing_ratios(phases).mean()
    assert mean == pytest.approx(0.386, abs=0.01)


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 64))
@settings(max_examples=40)
def test_spacing_ratios_bounds(seed, n):
    rng = np.random.default_rng(seed)
    r = spacing_ratios(rng.uniform(0, 2 * np.pi, n))
    assert r.shape == (n,)
    assert np.all(r >= 0) and np.all(r <= 1)


def test_ensemble_density_values():
    assert ensemble_density("POI", 0.0) == pytest.approx(2.0)
    assert ensemble_density("POI", 1.0) == pytest.approx(0.5)
    assert ensemble_density("COE", 0.0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        ensemble_density("GUE", 0.5)


def test_ensemble_densities_normalized_on_unit_interval():
    for kind in ("COE", "POI", "GOE"):
        total, _ = quad(lambda r: ensemble_density(kind, r), 0, 1, limit=200)
        assert total == pytest.approx(1.0, abs=1e-6), kind


def test_ensemble_mean_ratios():
    means = {
        kind: quad(lambda r: r * ensemble_density(kind, r), 0, 1, limit=200)[0]
        for kind in ("COE", "POI", "GOE")
    }
    assert means["COE"] == pytest.approx(0.527, abs=0.003)
    assert means["POI"] == pytest.approx(2 * np.log(2) - 1, abs=1e-9)
    assert means["GOE"] == pytest.approx(0.536, abs=0.003)


def test_coe_density_continuous_at_small_r():
    # the series branch below r = 1e-6 must join the direct formula smoothly
    left = ensemble_density("COE", 9.9e-7) / 9.9e-7
    right = ensemble_density("COE", 1.1e-6) / 1.1e-6
    assert left == pytest.approx(right, rel=1e-3)


def test_shannon_entropy_values():
    assert shannon_entropy([1.0, 0.0]) == pytest.approx(0.0)
    assert shannon_entropy(np.full(8, 1 / 8)) == pytest.approx(np.log(8.0))
    assert shannon_entropy([0.5, 0.5, 0.0, 0.0]) == pytest.approx(np.log(2.0))
    with pytest.raises(ValueError):
        shannon_entropy([0.5, 0.4])


def test_pt_entropy_formula():
    assert pt_entropy(9) == pytest.approx(5.8155, abs=2e-4)
    assert pt_entropy(1) == pytest.approx(0.2704, abs=2e-4)
    values = [pt_entropy(L) for L in range(1, 12)]
    assert all(b > a for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        pt_entropy(0)


def test_pt_entropy_matches_haar_average(rng):
    # large-N asymptotic: check against sampled Haar states at L = 7
    L, n_states = 7, 3000
    ent = []
    for _ in range(n_states):
        p = np.abs(haar_state(1 << L, rng)) ** 2
        ent.append(shannon_entropy(p / p.sum()))
    assert np.mean(ent) == pytest.approx(pt_entropy(L), abs=0.02)


def test_haar_state_norm_and_mean_weight(rng):
    N = 32
    draws = 100_000
    v = rng.normal(size=(draws, N)) + 1j * rng.normal(size=(draws, N))
    p0 = np.abs(v[:, 0]) ** 2 / np.sum(np.abs(v) ** 2, axis=1)
    sigma = p0.std(ddof=1) / np.sqrt(draws)
    assert abs(p0.mean() - 1 / N) < 3 * sigma
    single = haar_state(N, rng)
    assert abs(np.linalg.norm(single) - 1) < 1e-12
    with pytest.raises(ValueError):
        haar_state(1, rng)


def test_haar_states_follow_porter_thomas(rng):
    N, D = 512, 2000
    v = rng.normal(size=(D, N)) + 1j * rng.normal(size=(D, N))
    probs = np.abs(v) ** 2
    probs /= probs.sum(axis=1, keepdims=True)
    est = kl_to_pt(ProbSampleSet(probs))
    assert est.value < 0.002


def test_haar_ensemble_infinite_temperature_smoke(rng):
    # small version of the ensemble check: diagonal ~ 1/N, off-diagonal ~ 0
    N, D = 8, 4000
    states = np.array([haar_state(N, rng) for _ in range(D)])
    rho = np.einsum("di,dj->ij", states, states.conj()) / D
    assert np.abs(np.diag(rho).real - 1 / N).max() < 5 * np.sqrt(1 / (N**2 * D)) * np.sqrt(N - 1)
    off = rho - np.diag(np.diag(rho))
    assert np.abs(off).max() < 5 / (N * np.sqrt(D))
