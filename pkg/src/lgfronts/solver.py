"""Coupled time integration of prey, predator, and fronts.

The prey lives on a fixed uniform grid over [-L, L] with homogeneous
Neumann ends (L is a truncation of the whole line; doubling L is the
standard insensitivity check).  The predator lives on [-1, 1] in
front-fixed coordinates.  Each step treats diffusion implicitly
(unconditionally stable tridiagonal solves) and advection plus reaction
explicitly, which leaves only the mild advection bound

    dt <= cfl_safety * dy / max|zeta|

as a stability constraint.  Fronts advance by a Heun predictor and
corrector so the front error does not dominate at first order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .errors import (
    BoundBlowup,
    CflViolation,
    DegenerateInterval,
    DomainTooSmall,
    FrontNearTruncation,
    NonmonotoneFronts,
)
from .model import (
    DEFAULT_FLOOR_FRACTION,
    HOLLING_TANNER,
    ValidatedModel,
    sample_u0,
    sample_v0,
)
from .transform import FrontState, front_speeds

#: constant in the stencil-error speed tolerance
#:     eps_stencil = C * dy^2 * max|z| * 2 beta / (h - g);
#: C = 4 conservatively covers smooth profiles, whose normalized third
#: derivative stays a few times max|z| (pi/2)^3 / 3 ~ 1.3 at worst for
#: the fundamental mode.
C_STENCIL = 4.0


@dataclass(frozen=True)
class Discretization:
    """Grid, step, and guard settings.  None means "derive a default":
    Nx = ceil(L Ny / 2) keeps the prey spacing at 2 dy in physical
    units, dt = 0.5 / Ny sits well inside the advection bound for
    order-one front speeds, u_floor = 1e-8 * a.
    """

    L: float = 60.0
    Nx: int | None = None
    Ny: int = 400
    dt: float | None = None
    t_end: float = 200.0
    cfl_safety: float = 0.9
    u_floor: float | None = None
    front_margin: float = 5.0
    core_window: float = 5.0


def resolve_disc(disc: Discretization, a: float) -> Discretization:
    """Fill derived defaults and validate ranges; a is the prey growth
    rate (needed for the default floor)."""
    if not (disc.L > 0.0 and math.isfinite(disc.L)):
        raise ValueError(f"L must be positive, got {disc.L!r}")
    ny = int(disc.Ny)
    nx = int(disc.Nx) if disc.Nx is not None else math.ceil(disc.L * ny / 2.0)
    if nx < 8 or ny < 8:
        raise ValueError(f"Nx and Ny must be at least 8, got Nx={nx}, Ny={ny}")
    dt = float(disc.dt) if disc.dt is not None else 0.5 / ny
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if not (0.0 < disc.cfl_safety <= 1.0):
        raise ValueError(f"cfl_safety must lie in (0, 1], got {disc.cfl_safety!r}")
    if disc.t_end < 0.0:
        raise ValueError(f"t_end must be nonnegative, got {disc.t_end!r}")
    if disc.front_margin <= 0.0:
        raise ValueError(f"front_margin must be positive, got {disc.front_margin!r}")
    u_floor = float(disc.u_floor) if disc.u_floor is not None else DEFAULT_FLOOR_FRACTION * a
    if u_floor <= 0.0:
        raise ValueError(f"u_floor must be positive, got {u_floor!r}")
    if disc.core_window <= 0.0 or disc.core_window > disc.L:
        raise ValueError(f"core_window must lie in (0, L], got {disc.core_window!r}")
    return replace(disc, Nx=nx, Ny=ny, dt=dt, u_floor=u_floor)


@dataclass
class SimState:
    """Full solver state at one instant.

    u has Nx+1 prey samples on [-L, L]; z has Ny+1 predator samples on
    the reference interval with z[0] = z[-1] = 0 exactly.
    """

    t: float
    u: np.ndarray
    z: np.ndarray
    front: FrontState
    floor_hits: int = 0
    step_count: int = 0


@dataclass(frozen=True)
class SeriesRecord:
    """One row of the per-run time series."""

    t: float
    g: float
    h: float
    gdot: float
    hdot: float
    span: float
    max_v: float
    min_u_core: float
    max_u: float
    floor_hits: int


SERIES_COLUMNS = ("t", "g", "h", "gdot", "hdot", "span",
                  "max_v", "min_u_core", "max_u", "floor_hits")


@dataclass(frozen=True)
class HealthReport:
    """Per-run numerical health summary."""

    floor_hits: int
    wrong_sign_speed_steps: int
    max_u_excess: float          # max over run of max(0, max u / A - 1)
    max_v_excess: float
    min_u_core_overall: float    # inf over all steps of min u on the window
    stefan_max_imbalance: float  # worst relative gap in the mass balance
    dt_requested: float
    dt_used: float
    steps: int
    stop_reason: str             # "t_end" | "front_near_truncation" | "verdict:..."
    backend: str
    stencil_coeff: float


class SimResult(NamedTuple):
    series: list[SeriesRecord]
    final: SimState
    health: HealthReport


# ----------------------------------------------------------------------


def init_state(vm: ValidatedModel, disc: Discretization) -> SimState:
    """Sample the initial profiles onto the grids.

    z(0, y) = v0(h0 y); the boundary samples are forced to exactly zero
    so the Dirichlet invariant holds bit-for-bit from the start.
    """
    p = vm.params
    disc = resolve_disc(disc, p.a)
    if disc.L <= p.h0 + disc.front_margin:
        raise DomainTooSmall(
            f"L = {disc.L:g} must exceed h0 + front_margin = "
            f"{p.h0 + disc.front_margin:g}")
    x = np.linspace(-disc.L, disc.L, disc.Nx + 1)
    u = sample_u0(vm.init.u0, x).astype(float)
    y = np.linspace(-1.0, 1.0, disc.Ny + 1)
    z = sample_v0(vm.init.v0, p.h0 * y, p.h0).astype(float)
    z[0] = 0.0
    z[-1] = 0.0
    np.maximum(z, 0.0, out=z)
    front = FrontState(g=-p.h0, h=p.h0, gdot=vm.init.gstar, hdot=vm.init.hstar)
    return SimState(t=0.0, u=u, z=z, front=front)


class _Ctx:
    """Shared per-run arrays and scalars handed to the kernels."""

    def __init__(self, vm: ValidatedModel, disc: Discretization, dt: float):
        p = vm.params
        self.disc = disc
        self.dt = dt
        self.dx = 2.0 * disc.L / disc.Nx
        self.dy = 2.0 / disc.Ny
        self.m_sat = float(p.kernel.m) if p.kernel.variant == HOLLING_TANNER else -1.0
        self.A = vm.constants.A
        self.B = vm.constants.B
        self.plo, self.pdi, self.pup = kernels.prey_bands(disc.Nx, dt / self.dx ** 2)
        x = np.linspace(-disc.L, disc.L, disc.Nx + 1)
        w = disc.core_window
        self.iw_lo = int(np.searchsorted(x, -w, side="left"))
        self.iw_hi = int(np.searchsorted(x, w, side="right")) - 1

    def call(self, u, z, scal, acc, n_steps):
        p_args = self.p_args
        return kernels.advance_chunk(
            u, z, scal, acc, self.plo, self.pdi, self.pup,
            n_steps, self.dt, self.dx, self.dy, self.disc.L,
            p_args[0], p_args[1], p_args[2], p_args[3], p_args[4], self.m_sat,
            self.disc.u_floor, self.A, self.B,
            self.disc.cfl_safety, self.disc.front_margin, C_STENCIL,
            self.iw_lo, self.iw_hi)


def _make_ctx(vm: ValidatedModel, disc: Discretization, dt: float) -> _Ctx:
    ctx = _Ctx(vm, disc, dt)
    p = vm.params
    ctx.p_args = (p.a, p.b, p.d, p.mu, p.beta)
    return ctx


_STATUS_ERRORS = {
    kernels.STATUS_CFL: (CflViolation, "time step exceeds the advection stability bound"),
    kernels.STATUS_BLOWUP: (BoundBlowup, "a field left its a priori sup bound"),
    kernels.STATUS_NONMONOTONE: (NonmonotoneFronts,
                                 "front speed has the wrong sign beyond stencil tolerance"),
    kernels.STATUS_DEGENERATE: (DegenerateInterval, "front interval collapsed"),
}


def _raise_status(status: int, t: float) -> None:
    exc, msg = _STATUS_ERRORS[status]
    raise exc(f"{msg} at t = {t:g}")


def step(state: SimState, vm: ValidatedModel, disc: Discretization) -> SimState:
    """Advance one step of size disc.dt and return the new state.

    Raises CflViolation, FrontNearTruncation, BoundBlowup,
    NonmonotoneFronts, or DegenerateInterval; the input state is never
    mutated.
    """
    disc = resolve_disc(disc, vm.params.a)
    ctx = _make_ctx(vm, disc, disc.dt)
    u = state.u.copy()
    z = state.z.copy()
    scal = np.array([state.front.g, state.front.h, state.t, float(z.max())])
    acc = np.array([float(state.floor_hits), 0.0, 0.0, 0.0, np.inf, 0.0])
    status, done = ctx.call(u, z, scal, acc, 1)
    if status == kernels.STATUS_TRUNCATION:
        raise FrontNearTruncation(
            f"a front reached the margin band at t = {state.t:g}")
    if status != kernels.STATUS_OK:
        _raise_status(status, state.t)
    gdot, hdot = front_speeds(z, ctx.dy, FrontState(scal[0], scal[1]), vm.params.beta)
    return SimState(t=state.t + disc.dt, u=u, z=z,
                    front=FrontState(scal[0], scal[1], gdot, hdot),
                    floor_hits=int(acc[0]), step_count=state.step_count + 1)


def _pick_dt(vm: ValidatedModel, disc: Discretization,
             record_every: float) -> tuple[float, int]:
    """Requested dt, tightened if the known speed scales already violate
    the advection bound, then snapped to divide the record cadence.

    The speed budget is the larger of the initial Stefan speeds and the
    classical rate 2 sqrt(d mu), which caps the asymptotic front speed.
    """
    p = vm.params
    dy = 2.0 / disc.Ny
    c_ref = 2.0 * math.sqrt(p.d * p.mu)
    budget = max(abs(vm.init.gstar), vm.init.hstar, c_ref) / p.h0
    dt = disc.dt
    if budget > 0.0:
        dt = min(dt, disc.cfl_safety * dy / budget)
    n_per = max(1, math.ceil(record_every / dt - 1e-9))
    return record_every / n_per, n_per


def _mass(z: np.ndarray, span: float, dy: float) -> float:
    # trapezoid in physical measure; boundary samples are zero
    return float(z[1:-1].sum()) * dy * 0.5 * span


def simulate(vm: ValidatedModel, disc: Discretization,
             record_every: float = 0.5,
             on_record: Callable[[SimState], None] | None = None,
             stop_rule: Callable[[SeriesRecord], str | None] | None = None,
             ) -> SimResult:
    """Run until t_end, a front reaching the margin band, or an error.

    Records are appended at t = 0, every record_every, and at the stop
    time.  ``on_record`` receives a snapshot SimState at each record.
    ``stop_rule``, when given, maps a record to a verdict string or
    None; the run stops at the first record with a verdict (used to cut
    sweeps short once a classification is locked in).
    """
    if record_every <= 0.0:
        raise ValueError(f"record_every must be positive, got {record_every!r}")
    p = vm.params
    disc = resolve_disc(disc, p.a)
    state0 = init_state(vm, disc)
    dt, n_per = _pick_dt(vm, disc, record_every)
    ctx = _make_ctx(vm, disc, dt)

    u = state0.u.copy()
    z = state0.z.copy()
    scal = np.array([state0.front.g, state0.front.h, 0.0, float(z.max())])
    acc = np.zeros(6)
    acc[4] = float(u[ctx.iw_lo:ctx.iw_hi + 1].min())

    def record_at(t: float, front: FrontState) -> SeriesRecord:
        return SeriesRecord(
            t=t, g=front.g, h=front.h, gdot=front.gdot, hdot=front.hdot,
            span=front.span, max_v=float(z.max()),
            min_u_core=float(u[ctx.iw_lo:ctx.iw_hi + 1].min()),
            max_u=float(u.max()), floor_hits=int(acc[0]))

    def snapshot(t: float, front: FrontState, steps: int) -> SimState:
        return SimState(t=t, u=u.copy(), z=z.copy(), front=front,
                        floor_hits=int(acc[0]), step_count=steps)

    series = [record_at(0.0, state0.front)]
    last_front = state0.front
    if on_record is not None:
        on_record(snapshot(0.0, state0.front, 0))
    stop_reason = "t_end"
    verdict = stop_rule(series[0]) if stop_rule is not None else None
    if verdict:
        stop_reason = f"verdict:{verdict}"

    total_steps = int(round(disc.t_end / dt))
    done = 0
    stefan_max = 0.0
    while not verdict and done < total_steps:
        n = min(n_per, total_steps - done)
        span0 = scal[1] - scal[0]
        m0 = _mass(z, span0, ctx.dy)
        acc[5] = 0.0
        status, ksteps = ctx.call(u, z, scal, acc, n)
        done += ksteps
        t_now = done * dt
        if ksteps > 0:
            span1 = scal[1] - scal[0]
            m1 = _mass(z, span1, ctx.dy)
            gap = abs((m1 - m0) - acc[5] + (p.d / p.beta) * (span1 - span0))
            stefan_max = max(stefan_max, gap / max(m0, m1, 1e-300))
            gdot, hdot = front_speeds(z, ctx.dy, FrontState(scal[0], scal[1]), p.beta)
            last_front = FrontState(scal[0], scal[1], gdot, hdot)
            series.append(record_at(t_now, last_front))
            if on_record is not None:
                on_record(snapshot(t_now, last_front, done))
            if stop_rule is not None:
                verdict = stop_rule(series[-1])
                if verdict:
                    stop_reason = f"verdict:{verdict}"
                    break
        if status == kernels.STATUS_TRUNCATION:
            stop_reason = "front_near_truncation"
            break
        if status != kernels.STATUS_OK:
            _raise_status(status, t_now)

    t_final = done * dt
    final = snapshot(t_final, last_front, done)
    health = HealthReport(
        floor_hits=int(acc[0]),
        wrong_sign_speed_steps=int(acc[1]),
        max_u_excess=float(max(acc[2], 0.0)),
        max_v_excess=float(max(acc[3], 0.0)),
        min_u_core_overall=float(acc[4]),
        stefan_max_imbalance=float(stefan_max),
        dt_requested=float(disc.dt),
        dt_used=float(dt),
        steps=done,
        stop_reason=stop_reason,
        backend=kernels.BACKEND,
        stencil_coeff=C_STENCIL,
    )
    return SimResult(series=series, final=final, health=health)


# ----------------------------------------------------------------------
# grid refinement


@dataclass(frozen=True)
class RefinementReport:
    """Richardson-style observed orders for the front positions.

    values maps field name to the per-level values at t_compare;
    orders maps field name to log2 ratios of successive differences
    (one fewer than levels minus one).  undefined is set when some
    difference vanishes and the ratio is meaningless.
    """

    t_compare: float
    values: dict[str, tuple[float, ...]]
    orders: dict[str, tuple[float, ...]]
    undefined: bool
    notes: tuple[str, ...]


def refine_check(vm: ValidatedModel, disc: Discretization, levels: int = 3,
                 t_compare: float | None = None,
                 record_every: float = 0.5) -> RefinementReport:
    """Rerun at halved dt and doubled Nx, Ny per level and report the
    observed convergence order of g, h, and the span at t_compare."""
    if levels < 3:
        raise ValueError(f"refinement needs at least 3 levels, got {levels}")
    base = resolve_disc(disc, vm.params.a)
    if t_compare is None:
        t_compare = base.t_end
    notes: list[str] = []
    picked: dict[str, list[float]] = {"g": [], "h": [], "span": []}
    for lev in range(levels):
        d_l = replace(base, Nx=base.Nx * 2 ** lev, Ny=base.Ny * 2 ** lev,
                      dt=base.dt / 2 ** lev)
        res = simulate(vm, d_l, record_every=record_every)
        if res.health.dt_used != d_l.dt:
            notes.append(
                f"level {lev}: dt tightened from {d_l.dt:g} to "
                f"{res.health.dt_used:g}; halving pattern broken")
        rec = min(res.series, key=lambda r: abs(r.t - t_compare))
        if abs(rec.t - t_compare) > 0.51 * record_every:
            raise ValueError(
                f"level {lev} has no record near t = {t_compare:g} "
                f"(run stopped at t = {res.series[-1].t:g})")
        picked["g"].append(rec.g)
        picked["h"].append(rec.h)
        picked["span"].append(rec.span)

    orders: dict[str, tuple[float, ...]] = {}
    undefined = False
    for name, vals in picked.items():
        diffs = [vals[i + 1] - vals[i] for i in range(levels - 1)]
        scale = max(abs(v) for v in vals) + 1e-300
        ods: list[float] = []
        for i in range(levels - 2):
            if abs(diffs[i]) < 1e-14 * scale or abs(diffs[i + 1]) < 1e-14 * scale:
                undefined = True
                notes.append(f"{name}: difference at level {i} is at roundoff; "
                             "order undefined")
                continue
            ods.append(math.log2(abs(diffs[i]) / abs(diffs[i + 1])))
        orders[name] = tuple(ods)
    return RefinementReport(
        t_compare=float(t_compare),
        values={k: tuple(v) for k, v in picked.items()},
        orders=orders, undefined=undefined, notes=tuple(notes))
