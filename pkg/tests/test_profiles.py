import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from windwaves.errors import (
    DegenerateShear,
    EndpointCritical,
    OrderUnavailable,
    OutOfDomain,
)
from windwaves.profiles import (
    AnalyticProfile,
    ConstantProfile,
    LinearShearProfile,
    PiecewiseLinearProfile,
    TabulatedProfile,
    TanhProfile,
    evaluate,
    find_critical_points,
    load_tabulated,
)

from oracles import bisect_root


def parabola_profile(h=2.0):
    # U = 4 x (1 - x/2): zero at both ends, maximum 2 at x = 1
    return AnalyticProfile(
        f=lambda x: 4.0 * x * (1.0 - 0.5 * x),
        df=lambda x: 4.0 - 4.0 * x,
        d2f=lambda x: -4.0,
        d3f=lambda x: 0.0,
        d4f=lambda x: 0.0,
        h_plus=h,
        name="parabola",
    )


class TestEvaluate:
    def test_constant(self):
        assert evaluate(ConstantProfile(5.0), 0.3, 0) == 5.0

    def test_linear_slope(self):
        assert evaluate(LinearShearProfile(0.0, 2.0), 0.7, 1) == 2.0

    def test_tanh_curvature_at_origin(self):
        assert evaluate(TanhProfile(10.0, 1.0, 5.0), 0.0, 2) == 0.0

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            evaluate(TanhProfile(10.0, 1.0, 5.0), 5.5, 0)
        with pytest.raises(OutOfDomain):
            evaluate(TanhProfile(10.0, 1.0, 5.0), -0.1, 0)

    def test_pwl_second_derivative_refused(self):
        pwl = PiecewiseLinearProfile.ramp(2.0, 1.0, h_plus=4.0)
        with pytest.raises(OrderUnavailable):
            evaluate(pwl, 0.5, 2)

    def test_bad_order(self):
        with pytest.raises(OrderUnavailable):
            evaluate(ConstantProfile(1.0), 0.0, 3)


class TestDerivatives:
    def test_tanh_derivatives_match_finite_differences(self):
        prof = TanhProfile(10.0, 0.7, 5.0)
        h = 1e-4  # second differences lose ~eps/h^2 to roundoff
        for x in (0.3, 1.1, 2.4):
            fd1 = (prof.value(x + h) - prof.value(x - h)) / (2 * h)
            fd2 = (prof.value(x + h) - 2 * prof.value(x) + prof.value(x - h)) / h**2
            fd3 = (prof.slope(x + h) - 2 * prof.slope(x) + prof.slope(x - h)) / h**2
            fd4 = (prof.curvature(x + h) - 2 * prof.curvature(x)
                   + prof.curvature(x - h)) / h**2
            assert prof.slope(x) == pytest.approx(fd1, rel=1e-7)
            assert prof.curvature(x) == pytest.approx(fd2, rel=1e-6, abs=1e-7)
            assert prof.derivative3(x) == pytest.approx(fd3, rel=1e-6, abs=1e-7)
            assert prof.derivative4(x) == pytest.approx(fd4, rel=1e-5, abs=1e-5)

    def test_generic_fd_fallback(self):
        prof = AnalyticProfile(
            f=lambda x: math.sin(x),
            df=lambda x: math.cos(x),
            d2f=lambda x: -math.sin(x),
            h_plus=3.0,
        )
        assert prof.derivative3(1.0) == pytest.approx(-math.cos(1.0), rel=1e-6)
        assert prof.derivative4(1.0) == pytest.approx(math.sin(1.0), rel=1e-4, abs=1e-5)


class TestPiecewiseLinear:
    def test_ramp_values(self):
        pwl = PiecewiseLinearProfile.ramp(2.0, 1.5, h_plus=math.inf)
        assert pwl.value(0.0) == 0.0
        assert pwl.value(1.0) == 2.0
        assert pwl.value(1.5) == 3.0
        assert pwl.value(10.0) == 3.0
        assert pwl.slope(0.2) == 2.0
        assert pwl.slope(2.0) == 0.0
        assert pwl.kinks() == [(1.5, -2.0)]

    def test_validation(self):
        with pytest.raises(ValueError):
            PiecewiseLinearProfile([0.5], [1.0])
        with pytest.raises(ValueError):
            PiecewiseLinearProfile([0.0, 1.0], [1.0])
        with pytest.raises(ValueError):
            PiecewiseLinearProfile([0.0, 2.0], [1.0, 0.0], h_plus=2.0)


class TestTabulated:
    def test_reproduces_nodes_and_is_c2(self):
        xs = np.linspace(0.0, 5.0, 17)
        us = 10.0 * np.tanh(xs)
        prof = TabulatedProfile(xs, us)
        for x, u in zip(xs, us):
            assert prof.value(float(x)) == pytest.approx(float(u), abs=1e-13)
        # second derivative continuous across interior nodes
        eps = 1e-7
        for x in xs[1:-1]:
            left = prof.curvature(float(x) - eps)
            right = prof.curvature(float(x) + eps)
            assert left == pytest.approx(right, abs=1e-4)

    def test_requires_four_samples(self):
        with pytest.raises(ValueError):
            TabulatedProfile([0.0, 1.0, 2.0], [0.0, 1.0, 2.0])

    def test_requires_increasing(self):
        with pytest.raises(ValueError):
            TabulatedProfile([0.0, 1.0, 1.0, 2.0], [0.0, 1.0, 2.0, 3.0])

    def test_file_roundtrip(self, tmp_path):
        path = tmp_path / "wind.txt"
        path.write_text(
            "# altitude [m]   speed [m/s]\n"
            "0.0  0.0\n"
            "1.0  4.0   # inline comment\n"
            "2.0  6.0\n"
            "3.0  7.0\n"
            "4.5  7.5\n"
        )
        prof = load_tabulated(path)
        assert prof.h_plus == 4.5
        assert prof.value(2.0) == pytest.approx(6.0, abs=1e-12)

    def test_file_rejects_bad_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0 0\n1 2 3\n2 4\n3 5\n")
        with pytest.raises(ValueError):
            load_tabulated(path)


class TestCriticalPoints:
    def test_tanh_single_layer(self):
        prof = TanhProfile(10.0, 1.0, 5.0)
        target = 10.0 * math.tanh(1.0)
        layers = find_critical_points(prof, target)
        assert len(layers) == 1
        assert layers.layers[0].position == pytest.approx(1.0, abs=1e-10)

    def test_linear_out_of_range(self):
        prof = LinearShearProfile(0.0, 2.0, h_plus=3.0)
        assert len(find_critical_points(prof, 7.0)) == 0

    def test_parabola_two_layers_vs_bisection_oracle(self):
        prof = parabola_profile()
        c_r = 1.5
        f = lambda x: 4.0 * x * (1.0 - 0.5 * x) - c_r
        s1 = bisect_root(f, 0.0, 1.0)
        s2 = bisect_root(f, 1.0, 2.0)
        layers = find_critical_points(prof, c_r)
        assert len(layers) == 2
        assert layers.positions[0] == pytest.approx(s1, abs=1e-12)
        assert layers.positions[1] == pytest.approx(s2, abs=1e-12)
        assert layers.layers[0].u_prime == pytest.approx(4.0 - 4.0 * s1, rel=1e-10)
        assert layers.layers[1].u_double_prime == -4.0

    def test_endpoint_critical(self):
        prof = TanhProfile(10.0, 1.0, 5.0)
        with pytest.raises(EndpointCritical):
            find_critical_points(prof, 0.0)
        with pytest.raises(EndpointCritical):
            find_critical_points(prof, 10.0 * math.tanh(5.0))

    def test_degenerate_at_parabola_max(self):
        with pytest.raises(DegenerateShear):
            find_critical_points(parabola_profile(), 2.0)

    def test_constant_profile_cases(self):
        assert len(find_critical_points(ConstantProfile(5.0), 7.0)) == 0
        with pytest.raises(DegenerateShear):
            find_critical_points(ConstantProfile(5.0), 5.0)

    def test_unbounded_linear(self):
        prof = LinearShearProfile(1.0, 2.0)
        layers = find_critical_points(prof, 7.0)
        assert layers.positions == (3.0,)

    @given(
        u_max=st.floats(2.0, 50.0),
        d=st.floats(0.3, 3.0),
        frac=st.floats(0.05, 0.95),
    )
    @settings(max_examples=60, deadline=None)
    def test_layer_tolerance_invariant(self, u_max, d, frac):
        prof = TanhProfile(u_max, d, 5.0)
        c_r = frac * u_max * math.tanh(5.0 / d)
        try:
            layers = find_critical_points(prof, c_r)
        except (EndpointCritical, DegenerateShear):
            return
        for layer in layers:
            assert abs(prof.value(layer.position) - c_r) <= 1e-12 * max(1.0, abs(c_r))

    def test_roots_sorted_distinct(self):
        prof = parabola_profile()
        layers = find_critical_points(prof, 1.0)
        pos = layers.positions
        assert list(pos) == sorted(pos)
        assert all(b - a > 2.0 / 4096 for a, b in zip(pos, pos[1:]))
