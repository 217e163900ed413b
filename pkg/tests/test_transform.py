import math

import numpy as np
import pytest

from lgfronts.errors import DegenerateInterval, GridTooSmall
from lgfronts.transform import (
    FrontState,
    boundary_gradient,
    coeffs,
    front_speeds,
    map_x_to_y,
    map_y_to_x,
)


def test_maps_are_inverse():
    f = FrontState(g=-1.5, h=4.0)
    y = np.linspace(-1.0, 1.0, 11)
    x = map_y_to_x(y, f)
    assert x[0] == pytest.approx(-1.5) and x[-1] == pytest.approx(4.0)
    back = map_x_to_y(x, f)
    assert np.allclose(back, y, atol=1e-14)


def test_coeffs_on_a_degenerate_interval():
    with pytest.raises(DegenerateInterval):
        coeffs(FrontState(g=1.0, h=1.0))


def test_rho_is_inverse_square_of_half_span():
    c = coeffs(FrontState(g=-2.0, h=2.0))
    assert c.rho == pytest.approx(0.25, rel=1e-15)


def test_boundary_gradient_exact_on_quadratics():
    # the 3-point one-sided rule fits a parabola, so any quadratic is exact
    dy = 0.1
    y = np.array([1.0 - 2 * dy, 1.0 - dy, 1.0])
    z = 3.0 * y ** 2 - 2.0 * y + 0.5
    got = boundary_gradient(z, dy, "right")
    assert got == pytest.approx(6.0 * 1.0 - 2.0, rel=1e-12)
    yl = np.array([-1.0, -1.0 + dy, -1.0 + 2 * dy])
    zl = 3.0 * yl ** 2 - 2.0 * yl + 0.5
    got = boundary_gradient(zl, dy, "left")
    assert got == pytest.approx(6.0 * -1.0 - 2.0, rel=1e-12)


def test_boundary_gradient_second_order_on_sine():
    # half-sine eigenmode: slope -pi/2 at the right end
    for n, tol in ((101, 2e-3), (201, 5e-4)):
        y = np.linspace(-1.0, 1.0, n)
        z = np.sin(math.pi * (y + 1.0) / 2.0)
        dy = 2.0 / (n - 1)
        got = boundary_gradient(z, dy, "right")
        assert got == pytest.approx(-math.pi / 2.0, abs=tol)


def test_boundary_gradient_needs_three_nodes():
    with pytest.raises(GridTooSmall):
        boundary_gradient(np.array([0.0, 1.0]), 0.5, "right")


def test_front_speeds_signs_and_scale():
    # eigenmode on (-2, 2): slope at y = +-1 is -+pi/2, span factor 2/4
    n = 401
    y = np.linspace(-1.0, 1.0, n)
    z = np.cos(math.pi * y / 2.0)
    f = FrontState(g=-2.0, h=2.0)
    gdot, hdot = front_speeds(z, 2.0 / (n - 1), f, beta=3.0)
    expected = 3.0 * (2.0 / 4.0) * (math.pi / 2.0)
    assert hdot == pytest.approx(expected, abs=1e-4)
    assert gdot == pytest.approx(-expected, abs=1e-4)
    assert gdot < 0.0 < hdot
