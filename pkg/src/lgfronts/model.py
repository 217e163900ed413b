"""Model parameters, initial profiles, and analytic constants.

The system couples a prey density u on the whole line with a predator
density v that lives on a moving interval (g(t), h(t)) and is zero
outside it.  Both fronts obey a one-phase Stefan condition with
coefficient beta.  Two reaction kernels are supported:

    leslie-gower:    f_u = u (a - u) - b u v
    holling-tanner:  f_u = u (a - u) - b u v / (m + u)

and in both cases the predator grows as f_v = mu v (1 - v / u), i.e.
the prey density acts as the predator's carrying capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    INITIAL_PROFILE,
    NONPOSITIVE_PARAMETER,
    ConstraintViolation,
    NoPositiveEquilibrium,
    Violation,
)

LESLIE_GOWER = "leslie-gower"
HOLLING_TANNER = "holling-tanner"

#: relative scale of the default prey floor used inside f_v denominators
DEFAULT_FLOOR_FRACTION = 1e-8


@dataclass(frozen=True)
class ReactionKernel:
    """Which prey reaction to use; ``m`` is the saturation constant and
    is required (and only meaningful) for the holling-tanner variant."""

    variant: str = LESLIE_GOWER
    m: float | None = None


@dataclass(frozen=True)
class ModelParams:
    """Positive model parameters.

    a:    prey intrinsic growth rate (also the prey carrying capacity)
    b:    predation strength
    d:    predator diffusivity (prey diffusivity is normalized to 1)
    mu:   predator intrinsic growth rate
    beta: front response coefficient in the Stefan conditions
    h0:   initial predator half-length, fronts start at (-h0, h0)
    """

    a: float
    b: float
    d: float
    mu: float
    beta: float
    h0: float
    kernel: ReactionKernel = field(default_factory=ReactionKernel)


# ----------------------------------------------------------------------
# initial profiles


@dataclass(frozen=True)
class ConstantProfile:
    """Spatially uniform profile."""

    value: float = 1.0


@dataclass(frozen=True)
class CosineProfile:
    """v0(x) = amplitude * cos(pi x / (2 h0)); vanishes exactly at +-h0."""

    amplitude: float = 1.0


@dataclass(frozen=True)
class TableProfile:
    """Piecewise-linear profile through (x, values) samples.

    Outside the tabulated range the profile is extended by its end
    values.  x must be strictly increasing.
    """

    x: tuple[float, ...]
    values: tuple[float, ...]


Profile = ConstantProfile | CosineProfile | TableProfile


@dataclass(frozen=True)
class InitialData:
    """Initial profiles together with the induced initial front speeds.

    gstar = -beta * v0'(-h0) <= 0 and hstar = -beta * v0'(h0) >= 0 are
    the exact speeds the Stefan conditions assign at t = 0.
    """

    u0: Profile
    v0: Profile
    gstar: float
    hstar: float


@dataclass(frozen=True)
class DerivedConstants:
    """Analytic quantities used by the classifier and the tests.

    span_crit: pi * sqrt(d / mu); a predator range wider than this is
               incompatible with extinction.
    h0_crit:   (pi / 2) * sqrt(d / mu); starting at or above it forces
               spreading for every beta.
    lambda1:   d * pi^2 / (4 h0^2), principal Dirichlet eigenvalue of
               -d (d/dx)^2 on the initial interval.
    A:         sup bound for u, max(a, max u0).
    B:         sup bound for v, max(A, max v0).
    coexistence: (u*, v*) interior equilibrium of the reaction kernel.
    """

    span_crit: float
    h0_crit: float
    lambda1: float
    A: float
    B: float
    coexistence: tuple[float, float]


@dataclass(frozen=True)
class ValidatedModel:
    """Bundle returned by validate_params: parameters plus everything
    derived from them that downstream stages need."""

    params: ModelParams
    init: InitialData
    constants: DerivedConstants
    warnings: tuple[str, ...] = ()


# ----------------------------------------------------------------------
# profile evaluation


def sample_u0(profile: Profile, x: np.ndarray) -> np.ndarray:
    """Evaluate a prey initial profile on physical nodes x."""
    if isinstance(profile, ConstantProfile):
        return np.full_like(x, float(profile.value))
    if isinstance(profile, TableProfile):
        return np.interp(x, np.asarray(profile.x), np.asarray(profile.values))
    raise TypeError(f"profile kind not valid for u0: {type(profile).__name__}")


def sample_v0(profile: Profile, x: np.ndarray, h0: float) -> np.ndarray:
    """Evaluate a predator initial profile on physical nodes x in [-h0, h0]."""
    if isinstance(profile, CosineProfile):
        return profile.amplitude * np.cos(np.pi * x / (2.0 * h0))
    if isinstance(profile, TableProfile):
        return np.interp(x, np.asarray(profile.x), np.asarray(profile.values))
    raise TypeError(f"profile kind not valid for v0: {type(profile).__name__}")


def profile_max(profile: Profile, h0: float) -> float:
    """Supremum of a profile over its support (exact for the closed forms)."""
    if isinstance(profile, ConstantProfile):
        return float(profile.value)
    if isinstance(profile, CosineProfile):
        return float(profile.amplitude)
    return float(max(profile.values))


def _one_sided_slope(x0: float, x1: float, x2: float,
                     f0: float, f1: float, f2: float) -> float:
    # Derivative of the quadratic through three points, evaluated at x0.
    # Exact on quadratics, second order on smooth data.
    return (f0 * (2.0 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2))
            + f1 * (x0 - x2) / ((x1 - x0) * (x1 - x2))
            + f2 * (x0 - x1) / ((x2 - x0) * (x2 - x1)))


def v0_edge_slopes(profile: Profile, h0: float) -> tuple[float, float]:
    """(v0'(-h0), v0'(h0)); analytic for the cosine, one-sided 3-point
    quadratic fit for tables."""
    if isinstance(profile, CosineProfile):
        s = profile.amplitude * np.pi / (2.0 * h0)
        # v0'(x) = -V pi/(2 h0) sin(pi x/(2 h0))
        return (+s, -s)
    if isinstance(profile, TableProfile):
        x = profile.x
        f = profile.values
        if len(x) < 3:
            raise ConstraintViolation([Violation(
                INITIAL_PROFILE, "v0",
                "table needs at least 3 samples to define edge slopes")])
        left = _one_sided_slope(x[0], x[1], x[2], f[0], f[1], f[2])
        right = _one_sided_slope(x[-1], x[-2], x[-3], f[-1], f[-2], f[-3])
        return (left, right)
    raise TypeError(f"profile kind not valid for v0: {type(profile).__name__}")


# ----------------------------------------------------------------------
# validation


def _positive(violations: list[Violation], name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0.0):
        violations.append(Violation(
            NONPOSITIVE_PARAMETER, name, f"must be a finite positive number, got {value!r}"))


def validate_params(params: ModelParams,
                    u0: Profile | None = None,
                    v0: Profile | None = None) -> ValidatedModel:
    """Check every constraint and return the validated bundle.

    All violations are collected before raising so the caller sees the
    complete list.  b >= 1 is allowed (the solver runs fine) but the
    dichotomy guarantees assume b < 1, so it produces a warning and is
    echoed on classifications via the theory_valid flag.
    """
    if u0 is None:
        u0 = ConstantProfile(1.0)
    if v0 is None:
        v0 = CosineProfile(1.0)

    violations: list[Violation] = []
    for name in ("a", "b", "d", "mu", "beta", "h0"):
        _positive(violations, name, getattr(params, name))

    kern = params.kernel
    if kern.variant not in (LESLIE_GOWER, HOLLING_TANNER):
        violations.append(Violation(
            NONPOSITIVE_PARAMETER, "kernel",
            f"unknown kernel variant {kern.variant!r}"))
    if kern.variant == HOLLING_TANNER:
        if kern.m is None:
            violations.append(Violation(
                NONPOSITIVE_PARAMETER, "kernel.m",
                "holling-tanner requires a saturation constant m"))
        else:
            _positive(violations, "kernel.m", kern.m)
    elif kern.m is not None:
        violations.append(Violation(
            NONPOSITIVE_PARAMETER, "kernel.m",
            "m is only meaningful for the holling-tanner kernel"))

    # Profiles.  Checked only when the parameters they depend on are sane.
    h0_ok = isinstance(params.h0, (int, float)) and math.isfinite(params.h0) and params.h0 > 0
    violations.extend(_validate_u0(u0))
    if h0_ok:
        violations.extend(_validate_v0(v0, params.h0))

    gstar = hstar = 0.0
    if h0_ok and not violations:
        sl, sr = v0_edge_slopes(v0, params.h0)
        gstar = -params.beta * sl
        hstar = -params.beta * sr
        scale = params.beta * profile_max(v0, params.h0) / params.h0
        tol = 1e-12 * max(scale, 1.0)
        if gstar > tol:
            violations.append(Violation(
                INITIAL_PROFILE, "v0",
                f"edge slope at -h0 implies an initially advancing left front (gstar={gstar:g} > 0)"))
        if hstar < -tol:
            violations.append(Violation(
                INITIAL_PROFILE, "v0",
                f"edge slope at +h0 implies an initially retreating right front (hstar={hstar:g} < 0)"))

    if violations:
        raise ConstraintViolation(violations)

    warnings: list[str] = []
    if params.b >= 1.0:
        warnings.append(
            "b >= 1: the solver runs, but the spreading/vanishing limits and "
            "the squeeze bounds are only guaranteed for b < 1")

    constants = derived_constants(params, u0, v0)
    init = InitialData(u0=u0, v0=v0, gstar=min(gstar, 0.0), hstar=max(hstar, 0.0))
    return ValidatedModel(params=params, init=init, constants=constants,
                          warnings=tuple(warnings))


def _validate_u0(u0: Profile) -> list[Violation]:
    out: list[Violation] = []
    if isinstance(u0, ConstantProfile):
        if not (math.isfinite(u0.value) and u0.value > 0.0):
            out.append(Violation(INITIAL_PROFILE, "u0", "constant value must be positive"))
    elif isinstance(u0, TableProfile):
        out.extend(_validate_table(u0, "u0"))
        if not out and min(u0.values) <= 0.0:
            out.append(Violation(INITIAL_PROFILE, "u0", "table values must all be positive"))
    elif isinstance(u0, CosineProfile):
        out.append(Violation(INITIAL_PROFILE, "u0",
                             "cosine profile is a predator shape; u0 must stay positive"))
    else:
        out.append(Violation(INITIAL_PROFILE, "u0", f"unknown profile {type(u0).__name__}"))
    return out


def _validate_v0(v0: Profile, h0: float) -> list[Violation]:
    out: list[Violation] = []
    if isinstance(v0, CosineProfile):
        if not (math.isfinite(v0.amplitude) and v0.amplitude > 0.0):
            out.append(Violation(INITIAL_PROFILE, "v0", "cosine amplitude must be positive"))
    elif isinstance(v0, TableProfile):
        out.extend(_validate_table(v0, "v0"))
        if out:
            return out
        x = v0.x
        vals = v0.values
        if abs(x[0] + h0) > 1e-12 * h0 or abs(x[-1] - h0) > 1e-12 * h0:
            out.append(Violation(INITIAL_PROFILE, "v0",
                                 f"table must span [-h0, h0] = [{-h0:g}, {h0:g}] exactly"))
        if vals[0] != 0.0 or vals[-1] != 0.0:
            out.append(Violation(INITIAL_PROFILE, "v0",
                                 "v0 must vanish exactly at the initial fronts +-h0"))
        if len(vals) > 2 and min(vals[1:-1]) <= 0.0:
            out.append(Violation(INITIAL_PROFILE, "v0",
                                 "v0 must be positive strictly inside (-h0, h0)"))
    else:
        out.append(Violation(INITIAL_PROFILE, "v0", f"profile kind not valid for v0: {type(v0).__name__}"))
    return out


def _validate_table(t: TableProfile, name: str) -> list[Violation]:
    out: list[Violation] = []
    if len(t.x) != len(t.values):
        out.append(Violation(INITIAL_PROFILE, name, "table x and values lengths differ"))
        return out
    if len(t.x) < 2:
        out.append(Violation(INITIAL_PROFILE, name, "table needs at least 2 samples"))
        return out
    xs = np.asarray(t.x, dtype=float)
    vs = np.asarray(t.values, dtype=float)
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(vs))):
        out.append(Violation(INITIAL_PROFILE, name, "table has non-finite entries"))
        return out
    if np.any(np.diff(xs) <= 0.0):
        out.append(Violation(INITIAL_PROFILE, name, "table x must be strictly increasing"))
    return out


# ----------------------------------------------------------------------
# reactions and constants


def reaction_rates(u, v, params: ModelParams, u_floor: float | None = None):
    """Pointwise reaction terms (f_u, f_v); accepts scalars or arrays.

    The predator logistic divides by u, so u is floored at u_floor in
    that denominator only.  Callers that care about floor activations
    count them themselves; this function just applies the floor.
    """
    if u_floor is None:
        u_floor = DEFAULT_FLOOR_FRACTION * params.a
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    kern = params.kernel
    if kern.variant == HOLLING_TANNER:
        f_u = u * (params.a - u) - params.b * u * v / (kern.m + u)
    else:
        f_u = u * (params.a - u) - params.b * u * v
    w = np.maximum(u, u_floor)
    f_v = params.mu * v * (1.0 - v / w)
    if f_u.ndim == 0:
        return float(f_u), float(f_v)
    return f_u, f_v


def coexistence_state(params: ModelParams) -> tuple[float, float]:
    """Interior equilibrium (u*, v*) of the reaction kernel.

    leslie-gower: u* = v* = a / (1 + b).
    holling-tanner: v* = u* with u* the positive root of
    (a - u)(m + u) = b u, i.e. u^2 + (m - a + b) u - a m = 0.
    """
    kern = params.kernel
    if kern.variant == HOLLING_TANNER:
        m = float(kern.m)
        p = m - params.a + params.b
        disc = p * p + 4.0 * params.a * m
        if disc < 0.0:
            raise NoPositiveEquilibrium("saturating kernel has no real equilibrium")
        u = 0.5 * (-p + math.sqrt(disc))
        if u <= 0.0:
            raise NoPositiveEquilibrium("saturating kernel root is not positive")
        return (u, u)
    c = params.a / (1.0 + params.b)
    return (c, c)


def derived_constants(params: ModelParams,
                      u0: Profile | None = None,
                      v0: Profile | None = None) -> DerivedConstants:
    """Compute the analytic constants for a parameter set."""
    if u0 is None:
        u0 = ConstantProfile(1.0)
    if v0 is None:
        v0 = CosineProfile(1.0)
    ratio = math.sqrt(params.d / params.mu)
    span_crit = math.pi * ratio
    h0_crit = 0.5 * math.pi * ratio
    lambda1 = params.d * math.pi ** 2 / (4.0 * params.h0 ** 2)
    A = float(max(params.a, profile_max(u0, params.h0)))
    B = float(max(A, profile_max(v0, params.h0)))
    return DerivedConstants(span_crit=span_crit, h0_crit=h0_crit,
                            lambda1=lambda1, A=A, B=B,
                            coexistence=coexistence_state(params))
