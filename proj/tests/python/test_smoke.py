import math

import numpy as np
import pytest

import dickedim as dd


def test_ground_energy():
    assert dd.classical_ground_energy(dd.ModelParams(j=10)) == pytest.approx(-2.125, abs=1e-9)


def test_bad_params_rejected():
    with pytest.raises(ValueError):
        dd.ModelParams(j=0.3)


def test_shell_points_lie_on_shell():
    p = dd.ModelParams(j=50)
    s = dd.sample_shell(-0.5, 2e4, 3, p)
    pts = s.points
    assert pts.shape[1] == 4 and pts.shape[0] == s.weights.shape[0]
    for row in pts[:50]:
        assert dd.h_cl(dd.PhasePoint(*row), p) == pytest.approx(-0.5, abs=1e-9)


def test_effective_dimension_j100():
    e = dd.effective_dimension(-0.5, dd.ModelParams(j=100), 2e5, 1)
    assert e.sigma_bar.value == pytest.approx(0.1389, abs=0.003)
    assert e.value.value == pytest.approx(4201, rel=0.03)
    # same seed, same numbers
    assert dd.effective_dimension(-0.5, dd.ModelParams(j=100), 2e5, 1).value.value == e.value.value


def test_closed_forms_order():
    s = dd.sample_shell(-0.5, 5e4, 2, dd.ModelParams(j=100))
    assert dd.dimensionality_rect_closed(0.1, s).value > dd.dimensionality_gauss_closed(0.1, s).value


def test_small_spectrum():
    dec = dd.diagonalize_converged(dd.ModelParams(j=3), 40, 50, eps_max=0.0)
    assert dec.converged_count > 0
    assert np.all(np.diff(dec.energies) >= 0)
    assert set(dec.parities) <= {-1, 1}
    v = dec.vectors[:, 0]
    assert np.linalg.norm(v) == pytest.approx(1.0)


def test_participation_ratio():
    assert dd.participation_ratio(np.ones(16, dtype=complex)) == pytest.approx(16.0)
    e = np.zeros(5, dtype=complex)
    e[2] = 1j
    assert dd.participation_ratio(e) == pytest.approx(1.0)


def test_haar():
    est = dd.haar_overlap_average(8, 20000, 5)
    assert abs(est.value - 1 / 8) < 3 * est.error
    assert math.isfinite(est.error)
