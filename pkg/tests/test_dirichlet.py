import numpy as np
import pytest

from caylex.cayley import build_ball
from caylex.dirichlet import (EnergyProblem, NullSequenceError,
                              capacity, harmonic_extension,
                              maximum_principle_check, null_sequence,
                              parabolicity_scan, royden_source, royden_split,
                              solve, solve_descent_only, trend_verdict)
from caylex.funcspace import BallFunction
from caylex.groups import make_group

Z1 = make_group("Z^1")


def _z1_two_point_problem(R, p):
    ball = build_ball(Z1, R)
    lo = ball.index[(-R,)]
    hi = ball.index[(R,)]
    return ball, EnergyProblem(ball, p, {lo: 0.0, hi: 1.0}, "ball")


def test_harmonic_extension_z1_linear():
    R = 6
    ball, problem = _z1_two_point_problem(R, 2.0)
    rep = harmonic_extension(problem)
    for i, x in enumerate(ball.elements):
        assert rep.minimizer.values[i] == pytest.approx((x[0] + R) / (2 * R),
                                                        abs=1e-10)
    assert rep.energy == pytest.approx(1.0 / R)
    assert rep.solver == "direct-linear"
    assert rep.residual <= 1e-10


def test_harmonic_extension_z1_p3_still_linear():
    # equal increments minimize sum |du|^3 with a fixed total rise
    R = 5
    ball, problem = _z1_two_point_problem(R, 3.0)
    rep = harmonic_extension(problem)
    for i, x in enumerate(ball.elements):
        assert rep.minimizer.values[i] == pytest.approx((x[0] + R) / (2 * R),
                                                        abs=1e-6)
    assert rep.solver == "iterative-convex"


def test_constant_boundary_data_extends_constantly():
    ball = build_ball(make_group("Z^2"), 4)
    constraints = {int(i): 2.5 for i in ball.sphere_indices(4)}
    rep = harmonic_extension(EnergyProblem(ball, 2.0, constraints, "ball"))
    assert np.allclose(rep.minimizer.values, 2.5, atol=1e-9)
    assert rep.energy == pytest.approx(0.0, abs=1e-12)


def test_harmonic_extension_needs_full_sphere():
    ball = build_ball(Z1, 4)
    with pytest.raises(ValueError):
        harmonic_extension(EnergyProblem(ball, 2.0, {0: 1.0}, "ball"))


def test_p_must_exceed_one():
    ball = build_ball(Z1, 3)
    with pytest.raises(ValueError):
        EnergyProblem(ball, 1.0, {0: 1.0})


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("R", [4, 8, 16, 32])
def test_capacity_closed_form_z1(p, R):
    cap, minimizer, rep = capacity(Z1, p, R)
    assert cap == pytest.approx(4.0 * R ** (1.0 - p), rel=1e-9)
    # the minimizer is the tent 1 - |x|/R
    ball = minimizer.ball
    for i, x in enumerate(ball.elements):
        assert minimizer.values[i] == pytest.approx(1.0 - abs(x[0]) / R,
                                                    abs=1e-6)


def test_capacity_radius_one_is_2S():
    for spec in ["Z^1", "Z^2", "F_2", "H3"]:
        group = make_group(spec)
        cap, _, _ = capacity(group, 2.0, 1)
        assert cap == pytest.approx(2.0 * len(group.generators), rel=1e-9)


def test_capacity_monotone_in_radius():
    group = make_group("Z^2")
    caps = [capacity(group, 2.0, R)[0] for R in (2, 4, 8, 16)]
    assert all(b <= a + 1e-12 for a, b in zip(caps, caps[1:]))


def test_capacity_minimizer_range():
    _, m, _ = capacity(make_group("Z^2"), 3.0, 6)
    assert m.values.min() >= -1e-10
    assert m.values.max() <= 1.0 + 1e-10
    assert m.values[0] == 1.0


def test_energy_scaling_quadratic():
    """Scaling the boundary data by c scales the p=2 energy by c^2."""
    ball = build_ball(make_group("Z^2"), 4)
    rng = np.random.default_rng(0)
    data = {int(i): float(rng.normal()) for i in ball.sphere_indices(4)}
    e1 = harmonic_extension(EnergyProblem(ball, 2.0, data, "ball")).energy
    scaled = {i: 3.0 * v for i, v in data.items()}
    e2 = harmonic_extension(EnergyProblem(ball, 2.0, scaled, "ball")).energy
    assert e2 == pytest.approx(9.0 * e1, rel=1e-10)


def test_descent_agrees_with_linear_solver():
    ball = build_ball(make_group("Z^2"), 4)
    rng = np.random.default_rng(1)
    data = {int(i): float(rng.normal()) for i in ball.sphere_indices(4)}
    problem = EnergyProblem(ball, 2.0, data, "ball")
    direct = solve(problem)
    descent = solve_descent_only(problem)
    assert direct.solver == "direct-linear"
    assert descent.solver == "iterative-convex"
    assert np.allclose(direct.minimizer.values, descent.minimizer.values,
                       atol=1e-7)


def test_trend_verdicts():
    assert trend_verdict([4, 8, 16, 32], [1.0, 0.1, 0.04, 0.02]) == \
        "parabolic-trend"
    # still above the smallness threshold: no verdict yet
    assert trend_verdict([4, 8, 16, 32], [1.0, 0.5, 0.25, 0.125]) == \
        "inconclusive"
    assert trend_verdict([4, 8, 16], [8.0, 7.0, 6.99]) == "non-parabolic-trend"
    assert trend_verdict([4], [1.0]) == "inconclusive"


def test_parabolicity_scan_z1():
    scan = parabolicity_scan(Z1, 2.0, [4, 8, 16, 32, 64, 128])
    assert scan.capacities == pytest.approx([4.0 / R for R in scan.radii],
                                            rel=1e-9)
    assert scan.verdict == "parabolic-trend"
    with pytest.raises(ValueError):
        parabolicity_scan(Z1, 2.0, [8, 4])


def test_null_sequence_z1():
    scan = parabolicity_scan(Z1, 2.0, [4, 8, 16, 32, 64, 128, 256, 512])
    terms = null_sequence(scan)
    # ||alpha_R||_D(2) = 2/sqrt(R) needs R > 4 n^4
    assert [t.n for t in terms] == [1, 2, 3]
    for t in terms:
        assert t.beta_seminorm < 1.0 / t.n
        assert t.alpha_seminorm < 1.0 / t.n ** 2
        assert t.beta(Z1.identity()) == pytest.approx(t.n)
    short = parabolicity_scan(Z1, 2.0, [2, 3])
    with pytest.raises(NullSequenceError):
        null_sequence(short)


def test_royden_sources():
    f = royden_source(make_group("Z^3"), "green-like")
    assert f((0, 0, 0)) == 1.0
    assert f((3, -1, 2)) == pytest.approx(1.0 / 3.0)
    g = royden_source(make_group("Z^2"), "coordinate")
    assert g((4, -7)) == 4.0
    h = royden_source(make_group("F_2"), "end-separating")
    assert h(()) == 0.0
    assert h((1, 1)) == pytest.approx(0.75)
    assert h((-1,)) == pytest.approx(-0.5)
    assert h((2, 1)) == 0.0
    with pytest.raises(ValueError):
        royden_source(make_group("F_2"), "green-like")
    with pytest.raises(ValueError):
        royden_source(Z1, "nope")


def test_royden_constant_source_vanishes():
    rep = royden_split(make_group("Z^2"), "constant", [3, 4, 5])
    assert rep.verdict == "harmonic-part-vanishing"
    assert all(e.energy <= 1e-10 for e in rep.entries)


def test_royden_coordinate_diverges():
    rep = royden_split(make_group("Z^2"), "coordinate", [3, 5, 8])
    energies = [e.energy for e in rep.entries]
    assert energies[-1] > energies[0]
    assert rep.verdict == "energy-divergent"


def test_royden_p_restriction():
    with pytest.raises(ValueError):
        royden_split(make_group("Z^2"), "constant", [3, 4], p=3.0)


def test_maximum_principle():
    ball = build_ball(make_group("Z^2"), 4)
    rng = np.random.default_rng(2)
    data = {int(i): float(rng.normal()) for i in ball.sphere_indices(4)}
    rep = harmonic_extension(EnergyProblem(ball, 2.0, data, "ball"))
    res = maximum_principle_check(ball, rep.minimizer, tol=1e-7)
    assert res.applicable and res.passed
    # delta at the center is not harmonic: inapplicable, not a failure
    vals = np.zeros(ball.n_vertices)
    vals[0] = 1.0
    res2 = maximum_principle_check(ball, BallFunction(ball, vals, "ball"))
    assert not res2.applicable
