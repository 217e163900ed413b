"""Front-fixing change of variables and front-speed extraction.

The moving interval (g(t), h(t)) is mapped onto the fixed reference
interval [-1, 1] by

    y = (2 x - g - h) / (h - g)

under which the predator equation picks up a rescaled diffusion
coefficient rho(t) = 4 / (h - g)^2 and an affine advection speed

    zeta(t, y) = (h' + g') / (h - g) + y (h' - g') / (h - g).

The Stefan conditions become

    g' = -beta * (2 / (h - g)) * z_y(t, -1)
    h' = -beta * (2 / (h - g)) * z_y(t, +1)

with z the predator density in reference coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInterval, GridTooSmall

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class FrontState:
    """Front positions and speeds at one instant; requires g < h."""

    g: float
    h: float
    gdot: float = 0.0
    hdot: float = 0.0

    @property
    def span(self) -> float:
        return self.h - self.g


@dataclass(frozen=True)
class TransformCoeffs:
    """Coefficients of the reference-interval predator equation.

    rho:   4 / (h - g)^2, multiplies the diffusion term.
    zeta0: (hdot + gdot) / (h - g), constant part of the advection.
    zeta1: (hdot - gdot) / (h - g), linear-in-y part of the advection.
    """

    rho: float
    zeta0: float
    zeta1: float


def coeffs(front: FrontState) -> TransformCoeffs:
    span = front.h - front.g
    if span <= 0.0:
        raise DegenerateInterval(f"front interval has width {span:g}")
    return TransformCoeffs(
        rho=4.0 / (span * span),
        zeta0=(front.hdot + front.gdot) / span,
        zeta1=(front.hdot - front.gdot) / span,
    )


def map_y_to_x(y, front: FrontState):
    """Reference coordinate(s) y in [-1, 1] to physical x in [g, h]."""
    if front.h - front.g <= 0.0:
        raise DegenerateInterval("cannot map on a degenerate interval")
    y = np.asarray(y, dtype=float)
    x = 0.5 * ((front.h - front.g) * y + front.g + front.h)
    return float(x) if x.ndim == 0 else x


def map_x_to_y(x, front: FrontState):
    """Physical x in [g, h] to reference y in [-1, 1]."""
    span = front.h - front.g
    if span <= 0.0:
        raise DegenerateInterval("cannot map on a degenerate interval")
    x = np.asarray(x, dtype=float)
    y = (2.0 * x - front.g - front.h) / span
    return float(y) if y.ndim == 0 else y


def boundary_gradient(z: np.ndarray, dy: float, side: str) -> float:
    """One-sided second-order gradient of z at a boundary of [-1, 1].

    Uses the three nodes nearest the boundary; with uniform spacing dy
    the right-boundary formula is

        z_y(+1) ~= (3 z[n] - 4 z[n-1] + z[n-2]) / (2 dy)

    and the left one is its mirror image.  Exact on quadratics.  The
    boundary sample is expected to be zero (Dirichlet) but the formula
    does not require it.
    """
    z = np.asarray(z, dtype=float)
    if z.size < 3:
        raise GridTooSmall(f"gradient stencil needs >= 3 nodes, got {z.size}")
    if side == RIGHT:
        return float((3.0 * z[-1] - 4.0 * z[-2] + z[-3]) / (2.0 * dy))
    if side == LEFT:
        return float((-3.0 * z[0] + 4.0 * z[1] - z[2]) / (2.0 * dy))
    raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}, got {side!r}")


def front_speeds(z: np.ndarray, dy: float, front: FrontState, beta: float) -> tuple[float, float]:
    """(gdot, hdot) from the discrete Stefan conditions.

    Linear in beta and in z; with z >= 0 inside and zero at the
    boundaries the smooth-profile signs are gdot <= 0, hdot >= 0.
    """
    span = front.h - front.g
    if span <= 0.0:
        raise DegenerateInterval("cannot form speeds on a degenerate interval")
    fac = -beta * 2.0 / span
    gdot = fac * boundary_gradient(z, dy, LEFT)
    hdot = fac * boundary_gradient(z, dy, RIGHT)
    return (gdot, hdot)
