import pytest

from cliquealg import planner


def balance_residual(a, b, curve, gamma):
    f, g = planner._balance_functions(a, b, curve)
    return abs(f(gamma) - g(gamma))


def test_maincond_square_case():
    curve = planner.OmegaCurve.trivial()
    gamma = planner.solve_maincond(0.0, 1.0, curve)
    assert abs(gamma - 1.0) < 1e-6
    assert balance_residual(0.0, 1.0, curve, gamma) <= 1e-9


def test_maincond_residual_everywhere():
    curve = planner.OmegaCurve.trivial()
    for a in (0.0, 0.25, 0.5, 0.9):
        for frac in (0.05, 0.3, 0.7, 0.95):
            b = (1 + a) / 2 + frac * ((2 - a) - (1 + a) / 2) * 0.999
            gamma = planner.solve_maincond(a, b, curve)
            assert balance_residual(a, b, curve, gamma) <= 1e-9


def test_maincond_regime_error():
    curve = planner.OmegaCurve.trivial()
    with pytest.raises(planner.RegimeError):
        planner.solve_maincond(0.0, 0.3, curve)
    with pytest.raises(planner.RegimeError):
        planner.solve_maincond(0.0, 2.1, curve)


def test_theorem1_cases():
    curve = planner.OmegaCurve.trivial()
    small = planner.theorem1_exponent(0.0, 0.5, curve)
    assert small.regime == "small-m" and small.exponent == 0.0
    mid = planner.theorem1_exponent(0.0, 1.0, curve)
    assert mid.regime == "medium-m" and abs(mid.exponent - 1 / 3) < 1e-6
    big = planner.theorem1_exponent(0.0, 2.0, curve)
    assert big.regime == "large-m" and abs(big.exponent - 1.0) < 1e-12
    lin = planner.theorem1_exponent(1.0, 0.8, curve)
    assert lin.exponent == 1.0


def test_theorem1_fast_omega_headline():
    est = planner.theorem1_exponent(0.0, 1.0, planner.OmegaCurve.constant(2.3729))
    assert 0.1570 < est.exponent < 0.1572


def test_theorem1_continuity_across_boundaries():
    curve = planner.OmegaCurve.trivial()
    for a in (0.0, 0.3, 0.6):
        for boundary in ((1 + a) / 2, 2 - a):
            lo = planner.theorem1_exponent(a, boundary - 1e-6, curve).exponent
            hi = planner.theorem1_exponent(a, boundary + 1e-6, curve).exponent
            at = planner.theorem1_exponent(a, boundary, curve).exponent
            assert abs(lo - at) < 1e-3 and abs(hi - at) < 1e-3


def test_zwick_trivial_curve():
    sigma, exponent = planner.zwick_exponent(planner.OmegaCurve.trivial())
    assert abs(exponent - 1 / 3) <= 1e-4


def test_zwick_omega_two():
    sigma, exponent = planner.zwick_exponent(planner.OmegaCurve.constant(2.0))
    assert abs(sigma - 0.2) <= 1e-4
    assert abs(exponent - 0.2) <= 1e-4


def test_zwick_bundled_figure_curves():
    sigma, exponent = planner.zwick_exponent(planner.bundled_zwick_curves())
    assert abs(sigma - 0.1857) <= 0.002
    assert abs(exponent - 0.2095) <= 0.002


def test_zwick_never_beats_one_third():
    for curve in (planner.OmegaCurve.trivial(), planner.OmegaCurve.constant(2.0),
                  planner.OmegaCurve.constant(2.3729), planner.OmegaCurve.strassen()):
        _, exponent = planner.zwick_exponent(curve)
        assert exponent <= 1 / 3 + 1e-4


def test_sampled_curve_validation_and_interpolation():
    curve = planner.OmegaCurve.from_samples([(0.0, 2.0), (1.0, 2.5), (2.0, 3.2)])
    assert curve(0.0) == 2.0
    assert abs(curve(0.5) - 2.25) < 1e-12
    assert curve(3.0) >= 4.0  # slope-one extrapolation keeps omega >= 1 + gamma
    with pytest.raises(ValueError):
        planner.OmegaCurve.from_samples([(0.0, 2.5), (1.0, 2.0)])
    with pytest.raises(ValueError):
        planner.OmegaCurve.from_samples([(2.0, 2.0)])  # below 1 + gamma


def test_curve_files_roundtrip(tmp_path):
    path = tmp_path / "curve.txt"
    path.write_text("# gamma omega\n0.0 2.0\n1.0 2.4\n")
    curve = planner.load_curve_file(path)
    assert abs(curve(0.5) - 2.2) < 1e-12
    cost_path = tmp_path / "cost.txt"
    cost_path.write_text("0.0 0.3\n1.0 0.1\n")
    cost = planner.load_cost_file(cost_path)
    assert abs(cost(0.5) - 0.2) < 1e-12
    with pytest.raises(ValueError):
        planner.load_curve_file(tmp_path / "bad.txt") if False else \
            planner._read_pairs(_write(tmp_path / "bad.txt", "1 2 3\n"))


def _write(path, text):
    path.write_text(text)
    return path


def test_theorem1_matches_measured_regimes():
    # boundary consistency: exponent zero up to b = 1/2 at a = 0
    curve = planner.OmegaCurve.trivial()
    for b in (0.0, 0.2, 0.5):
        assert planner.theorem1_exponent(0.0, b, curve).exponent == 0.0
