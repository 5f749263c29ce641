import math

import pytest

import exitmoments as em


def test_interval_moments_match_closed_form():
    ball = em.GeodesicBall(em.ModelSpace.euclidean(1), 0.5)
    moments = em.ball_moments(ball, 3)
    assert moments.volume == pytest.approx(1.0)
    # T_1 = 1/12 on the unit interval
    assert moments[1] == pytest.approx(1.0 / 12.0, rel=1e-9)
    radii, profiles = em.ball_profiles(ball, 2, 65)
    assert len(radii) == 65 and len(profiles) == 2
    assert profiles[0][-1] == pytest.approx(0.0, abs=1e-12)


def test_comparison_radius_golden_ratio():
    r = em.comparison_radius(curvature=0.0, dimension=2, diameter=1.0)
    assert r == pytest.approx(0.80901699437494734, rel=1e-12)


def test_spectrum_dictionary_and_bounds():
    pairs = [((k * math.pi) ** 2, 8.0 / (k * math.pi) ** 2) for k in range(1, 400, 2)]
    spectrum = em.SpectralData(1.0, pairs)
    moments, tail = em.moments_from_spectrum(spectrum, 4)
    exact = em.ball_moments(em.GeodesicBall(em.ModelSpace.euclidean(1), 0.5), 4)
    for n in range(1, 5):
        assert moments[n] <= exact[n] * (1 + 1e-12)
        assert exact[n] <= moments[n] + tail[n - 1] + 1e-12 * exact[n]
    assert 0.0 < em.volume_partition_defect(spectrum) < 1e-2
    # short-time expansion: Vol - |boundary| * 2 sqrt(t / pi)
    assert em.heat_content(spectrum, 0.01) == pytest.approx(1 - 4 * math.sqrt(0.01 / math.pi), abs=1e-4)

    bound = em.eigenvalue_bound_tail(spectrum, 1, 6, 1e3)
    assert bound["bound"] >= math.pi ** 2
    recovered = em.recover_spectrum(em.ball_moments(em.GeodesicBall(em.ModelSpace.euclidean(1), 0.5), 12), 1)
    assert recovered["pairs"][0]["nu"] == pytest.approx(math.pi ** 2, rel=1e-6)


def test_grid_band_eigenvalue_and_moments():
    surface = em.ClosedSurface.flat_torus(1.0, 1.0, 64, 64)
    domain = em.build_domain(surface, em.MaskSpec.rectangle(0.25, 0.75, 0.0, 1.0))
    assert domain.size() > 0
    moments, fields = em.grid_moments(domain, 2)
    assert len(fields) == 2
    assert moments[1] == pytest.approx(1.0 / 96.0, rel=2e-2)
    eig = em.dirichlet_eigenpairs(domain, 3)
    assert eig["eigenvalues"][0] == pytest.approx(4 * math.pi ** 2, rel=2e-3)


def test_comparison_checks_return_reports():
    surface = em.ClosedSurface.flat_torus(1.0, 1.0, 64, 64)
    mask = em.MaskSpec.rectangle(0.0, 0.5, 0.0, 0.5)
    report = em.moment_comparison_report(surface, mask, 3)
    assert report["all_pass"]
    pde = em.pde_comparison_check(surface, mask, lambda a, b: 1.0)
    assert pde["pass"]


def test_symmetrization_of_constant():
    ball = em.symmetrized_ball(2 * math.pi, 4 * math.pi, em.ModelSpace.sphere(1.0, 2))
    assert ball.radius == pytest.approx(math.pi / 2)
    radii, f_star = em.spherical_symmetrization([2.0] * 10, [0.2 * math.pi] * 10, 4 * math.pi, ball, 33)
    assert all(v == pytest.approx(2.0) for v in f_star)


def test_invalid_input_raises_value_error():
    with pytest.raises(ValueError):
        em.GeodesicBall(em.ModelSpace.euclidean(2), -1.0).volume()
    with pytest.raises(ValueError):
        em.MomentSequence(1.0, [-1.0])
