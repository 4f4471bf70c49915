"""Sounding-based recovery of spreading coefficients on a declared support."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import tfcomm.identification as ident


def plant(n, support, seed):
    """Random coefficients on the support and the resulting observation."""
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(len(support)) + 1j * rng.standard_normal(len(support))
    return coeffs


# ---------------------------------------------------------------------------
# probes and supports


def test_dirac_train_samples():
    x = ident.dirac_train(12, 3)
    assert np.linalg.norm(x) == pytest.approx(1.0)
    assert np.all(x[::3] == 1 / 2.0)
    mask = np.ones(12, dtype=bool)
    mask[::3] = False
    assert np.abs(x[mask]).max() == 0.0


def test_dirac_train_weights():
    w = np.exp(1j * np.array([0.1, 2.0, -1.0, 0.5]))
    x = ident.dirac_train(16, 4, weights=w)
    assert np.abs(x[::4] - w / 2.0).max() <= 1e-15
    with pytest.raises(ValueError):
        ident.dirac_train(16, 4, weights=[2.0, 1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        ident.dirac_train(16, 4, weights=np.ones(3))
    with pytest.raises(ValueError):
        ident.dirac_train(16, 5)


def test_centered_rect_support_layout():
    assert ident.centered_rect_support(1, 1) == ((0, 0),)
    cells = ident.centered_rect_support(2, 3)
    assert set(cells) == {(m, l) for m in (-1, 0) for l in (-1, 0, 1)}
    assert len(ident.centered_rect_support(4, 4)) == 16
    with pytest.raises(ValueError):
        ident.centered_rect_support(0, 2)


def test_support_validation():
    with pytest.raises(ValueError):
        ident.build_sounding_matrix(np.ones(8), [(0, 0), (0, 0)], 8)
    with pytest.raises(ValueError):
        ident.build_sounding_matrix(np.ones(8), [(0.5, 0)], 8)
    with pytest.raises(ValueError):
        ident.build_sounding_matrix(np.ones(8), [(0, 7)], 8)  # centered range [-3, 4]
    with pytest.raises(ValueError):
        ident.build_sounding_matrix(np.ones(8), [], 8)


def test_sounding_problem_container():
    prob = ident.SoundingProblem(8, np.ones(8), [(0, 0), (1, -1)])
    assert prob.n_unknowns == 2
    assert prob.support == ((0, 0), (1, -1))
    with pytest.raises(ValueError):
        ident.SoundingProblem(8, np.ones(4), [(0, 0)])
    with pytest.raises(ValueError):
        ident.SoundingProblem(8, np.ones(8), [(0, 0)], observation=np.ones(5))


def test_sounding_matrix_against_loop():
    n = 10
    rng = np.random.default_rng(2)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    support = [(0, 0), (2, -1), (-3, 4)]
    mat = ident.build_sounding_matrix(x, support, n)
    for j, (m, l) in enumerate(support):
        col = np.exp(-2j * np.pi * l * np.arange(n) / n) * np.roll(x, m)
        assert np.abs(mat[:, j] - col).max() <= 1e-15


# ---------------------------------------------------------------------------
# recovery


def test_exact_recovery_matched_train():
    n = 32
    x = ident.dirac_train(n, 4)
    support = ident.centered_rect_support(4, 4)
    coeffs = plant(n, support, 0)
    y = ident.build_sounding_matrix(x, support, n) @ coeffs
    result = ident.identify(y, x, support)
    assert np.abs(result.estimate - coeffs).max() <= 1e-12
    assert result.residual <= 1e-12
    assert result.condition_number == pytest.approx(1.0, abs=1e-9)


def test_exact_recovery_with_phase_weights():
    n = 32
    rng = np.random.default_rng(4)
    x = ident.dirac_train(n, 4, weights=np.exp(2j * np.pi * rng.random(8)))
    support = ident.centered_rect_support(4, 8)  # |S| = N
    coeffs = plant(n, support, 1)
    y = ident.build_sounding_matrix(x, support, n) @ coeffs
    result = ident.identify(y, x, support)
    assert np.abs(result.estimate - coeffs).max() <= 1e-10
    assert result.condition_number == pytest.approx(1.0, abs=1e-9)


def test_full_dimension_support_is_identifiable():
    n = 32
    x = ident.dirac_train(n, 4)
    support = ident.centered_rect_support(4, 8)  # 32 unknowns in dimension 32
    coeffs = plant(n, support, 2)
    y = ident.build_sounding_matrix(x, support, n) @ coeffs
    result = ident.identify(y, x, support)
    assert np.abs(result.estimate - coeffs).max() <= 1e-10


def test_overspread_support_raises():
    n = 32
    x = ident.dirac_train(n, 4)
    support = ident.centered_rect_support(5, 8)  # 40 > 32 unknowns
    with pytest.raises(ident.IdentifiabilityError) as exc:
        ident.identify(np.zeros(n), x, support)
    assert exc.value.n_unknowns == 40
    assert exc.value.numerical_rank <= n


def test_bad_probe_raises_even_when_underspread():
    """A flat probe cannot separate two pure delays: duplicate columns."""
    n = 16
    flat = np.ones(n, dtype=complex) / 4.0
    with pytest.raises(ident.IdentifiabilityError) as exc:
        ident.identify(np.zeros(n), flat, [(0, 0), (1, 0)])
    assert exc.value.n_unknowns == 2
    assert exc.value.numerical_rank == 1


def test_noisy_recovery_residual_tracks_noise():
    n = 64
    x = ident.dirac_train(n, 8)
    support = ident.centered_rect_support(4, 4)
    coeffs = plant(n, support, 3)
    rng = np.random.default_rng(9)
    noise = 1e-3 * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
    y = ident.build_sounding_matrix(x, support, n) @ coeffs + noise
    result = ident.identify(y, x, support)
    assert np.abs(result.estimate - coeffs).max() <= 1e-2
    assert result.residual <= np.linalg.norm(noise) + 1e-12
    assert result.residual > 0.0


def test_identify_validates_lengths():
    with pytest.raises(ValueError):
        ident.identify(np.zeros(8), np.ones(6), [(0, 0)])


# ---------------------------------------------------------------------------
# probe quality


def test_matched_train_quality_is_perfect():
    n = 64
    x = ident.dirac_train(n, 8)
    support = ident.centered_rect_support(8, 8)
    condition, worst_amb = ident.sounding_quality(x, support)
    assert condition == pytest.approx(1.0, abs=1e-9)
    assert worst_amb <= 1e-12


def test_flat_probe_quality_is_poor():
    n = 16
    condition, worst_amb = ident.sounding_quality(np.ones(n) / 4.0, [(0, 0), (1, 0)])
    assert condition == np.inf or condition > 1e9
    assert worst_amb == pytest.approx(1.0, abs=1e-12)


def test_quality_predicts_conditioning():
    """Lower worst-case ambiguity comes with a smaller condition number."""
    n = 32
    support = ident.centered_rect_support(3, 3)
    rng = np.random.default_rng(12)
    noiselike = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    noiselike /= np.linalg.norm(noiselike)
    cond_train, amb_train = ident.sounding_quality(ident.dirac_train(n, 4), support)
    cond_noise, amb_noise = ident.sounding_quality(noiselike, support)
    assert amb_train < amb_noise
    assert cond_train < cond_noise


# ---------------------------------------------------------------------------
# property: recovery and rank reporting are a strict dichotomy


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**31), st.integers(min_value=1, max_value=40))
def test_identify_dichotomy_property(seed, n_cells):
    n = 16
    rng = np.random.default_rng(seed)
    x = ident.dirac_train(n, 4)
    lo = -((n - 1) // 2)
    all_cells = [(m, l) for m in range(lo, lo + n) for l in range(lo, lo + n)]
    pick = rng.choice(len(all_cells), size=min(n_cells, len(all_cells)), replace=False)
    support = [all_cells[j] for j in pick]
    coeffs = rng.standard_normal(len(support)) + 1j * rng.standard_normal(len(support))
    y = ident.build_sounding_matrix(x, support, n) @ coeffs
    try:
        result = ident.identify(y, x, support)
    except ident.IdentifiabilityError as exc:
        assert exc.numerical_rank < exc.n_unknowns
        return
    assert len(support) <= n
    assert result.residual <= 1e-9 * max(1.0, np.linalg.norm(y))
    # forward error grows with conditioning; the rank gate caps it at ~1e10
    tol = result.condition_number * 1e-12 * max(1.0, np.abs(coeffs).max())
    assert np.abs(result.estimate - coeffs).max() <= max(tol, 1e-10)
