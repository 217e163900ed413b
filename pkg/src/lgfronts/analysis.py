"""Verdicts and analytic cross-checks for completed runs.

The dichotomy this module operationalizes: either the predator range
stays bounded by the critical span pi sqrt(d/mu) and the predator dies
out (u -> a), or the range grows without bound and both densities
approach the coexistence state.  A recorded span strictly above the
critical value is therefore already conclusive, because the span never
shrinks; extinction is only called once the predator maximum and both
front speeds have collapsed while the span is still subcritical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AssumptionViolated,
    IncomparableRuns,
    WindowOutsideFronts,
    WitnessInvalid,
)
from .model import DerivedConstants, ValidatedModel, sample_v0
from .solver import (
    C_STENCIL,
    Discretization,
    SeriesRecord,
    SimResult,
    SimState,
    resolve_disc,
    simulate,
)

SPREADING = "spreading"
VANISHING = "vanishing"
UNDECIDED = "undecided"

RULE_SPAN = "span-exceeds-critical"
RULE_COLLAPSE = "collapse-below-thresholds"


@dataclass(frozen=True)
class ClassifyCriteria:
    """Thresholds for the verdict rules.

    eps_v:     absolute predator-extinction threshold (default 1e-6 B)
    eps_speed: absolute front-speed threshold (default 1e-6 beta B / h0)
    tol_span:  relative slack on the critical span (default 0.02)
    theory_valid: whether b < 1, echoed on classifications
    """

    eps_v: float
    eps_speed: float
    tol_span: float = 0.02
    theory_valid: bool = True

    @classmethod
    def for_model(cls, vm: ValidatedModel, tol_span: float = 0.02,
                  eps_v: float | None = None,
                  eps_speed: float | None = None) -> "ClassifyCriteria":
        p = vm.params
        B = vm.constants.B
        return cls(
            eps_v=eps_v if eps_v is not None else 1e-6 * B,
            eps_speed=eps_speed if eps_speed is not None else 1e-6 * p.beta * B / p.h0,
            tol_span=tol_span,
            theory_valid=p.b < 1.0,
        )


@dataclass(frozen=True)
class Classification:
    """Verdict plus the record evidence it was based on."""

    verdict: str
    rule: str | None
    decided_at: float | None
    span: float
    max_v: float
    speed_sum: float
    span_crit: float
    theory_valid: bool


def _rule_fired(rec: SeriesRecord, span_crit: float,
                crit: ClassifyCriteria) -> str | None:
    span_lim = span_crit * (1.0 + crit.tol_span)
    if rec.span > span_lim:
        return SPREADING
    if (rec.max_v < crit.eps_v and rec.span <= span_lim
            and abs(rec.gdot) + abs(rec.hdot) < crit.eps_speed):
        return VANISHING
    return None


def make_stop_rule(constants: DerivedConstants, crit: ClassifyCriteria):
    """Record-level early-stop predicate for simulate()."""
    def rule(rec: SeriesRecord) -> str | None:
        return _rule_fired(rec, constants.span_crit, crit)
    return rule


def classify(series: list[SeriesRecord], constants: DerivedConstants,
             crit: ClassifyCriteria) -> Classification:
    """Earliest-record classification of a recorded run.

    Monotone in the series prefix: whatever verdict fires at some
    record also fires when the series is extended, because the walk
    stops at the first firing record.
    """
    if not series:
        raise ValueError("cannot classify an empty series")
    for rec in series:
        verdict = _rule_fired(rec, constants.span_crit, crit)
        if verdict is not None:
            return Classification(
                verdict=verdict,
                rule=RULE_SPAN if verdict == SPREADING else RULE_COLLAPSE,
                decided_at=rec.t, span=rec.span, max_v=rec.max_v,
                speed_sum=abs(rec.gdot) + abs(rec.hdot),
                span_crit=constants.span_crit,
                theory_valid=crit.theory_valid)
    last = series[-1]
    return Classification(
        verdict=UNDECIDED, rule=None, decided_at=None,
        span=last.span, max_v=last.max_v,
        speed_sum=abs(last.gdot) + abs(last.hdot),
        span_crit=constants.span_crit,
        theory_valid=crit.theory_valid)


# ----------------------------------------------------------------------
# iterative squeeze bounds


@dataclass(frozen=True)
class BoundSequence:
    """Interleaved prey bounds a_lower[i] < a/(1+b) < a_upper[i].

    lower[i-1] and upper[i-1] hold the i-th terms of

        lower_1 = a - b a,   upper_i = a - b lower_i,
        lower_{i+1} = a - b upper_i,

    which telescope to the alternating geometric partial sums
    lower_i = a (1 - b + ... - b^(2i-1)), upper_i = a (1 - ... + b^(2i)).
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    limit: float


def bound_sequences(a: float, b: float, i_max: int) -> BoundSequence:
    """Recursive bounds cross-checked against the closed forms.

    Requires 0 < b < 1 (AssumptionViolated otherwise).  The recursion
    and the geometric-sum closed forms must agree to 1e-12 relative;
    any disagreement is a hard error since both are exact formulas.
    """
    if not (0.0 < b < 1.0):
        raise AssumptionViolated(f"squeeze bounds need 0 < b < 1, got b = {b!r}")
    if a <= 0.0:
        raise AssumptionViolated(f"squeeze bounds need a > 0, got a = {a!r}")
    if i_max < 1:
        raise ValueError(f"i_max must be at least 1, got {i_max}")
    lower: list[float] = []
    upper: list[float] = []
    lo = a - b * a
    for i in range(1, i_max + 1):
        up = a - b * lo
        # closed forms: partial sums of the alternating geometric series
        lo_closed = a * (1.0 - (-b) ** (2 * i)) / (1.0 + b)
        up_closed = a * (1.0 - (-b) ** (2 * i + 1)) / (1.0 + b)
        if abs(lo - lo_closed) > 1e-12 * a or abs(up - up_closed) > 1e-12 * a:
            raise AssertionError(
                f"recursion and closed form disagree at i = {i}: "
                f"{lo!r} vs {lo_closed!r}, {up!r} vs {up_closed!r}")
        lower.append(lo)
        upper.append(up)
        lo = a - b * up
    return BoundSequence(lower=tuple(lower), upper=tuple(upper),
                         limit=a / (1.0 + b))


# ----------------------------------------------------------------------
# long-time limits


@dataclass(frozen=True)
class AsymptoticReport:
    """Relative sup distances from the predicted long-time state.

    For a spreading run u_err and v_err are relative to the coexistence
    values; for a vanishing run u_err is relative to a and v_err is
    max_v / B.
    """

    verdict: str
    u_err: float
    v_err: float
    window: float


def asymptotic_check(final: SimState, vm: ValidatedModel, disc: Discretization,
                     verdict: str, window: float | None = None) -> AsymptoticReport:
    """Measure the final state against the verdict's predicted limit
    over [-window, window]."""
    p = vm.params
    disc = resolve_disc(disc, p.a)
    if window is None:
        window = disc.core_window
    x = np.linspace(-disc.L, disc.L, disc.Nx + 1)
    sel = np.abs(x) <= window + 1e-12
    u_win = final.u[sel]
    if verdict == SPREADING:
        if not (final.front.g < -window and window < final.front.h):
            raise WindowOutsideFronts(
                f"window [+-{window:g}] is not inside the predator range "
                f"({final.front.g:g}, {final.front.h:g})")
        ustar, vstar = vm.constants.coexistence
        y = np.linspace(-1.0, 1.0, disc.Ny + 1)
        yq = (2.0 * x[sel] - final.front.g - final.front.h) / final.front.span
        v_win = np.interp(yq, y, final.z)
        return AsymptoticReport(
            verdict=verdict,
            u_err=float(np.max(np.abs(u_win - ustar)) / ustar),
            v_err=float(np.max(np.abs(v_win - vstar)) / vstar),
            window=float(window))
    if verdict == VANISHING:
        return AsymptoticReport(
            verdict=verdict,
            u_err=float(np.max(np.abs(u_win - p.a)) / p.a),
            v_err=float(final.z.max() / vm.constants.B),
            window=float(window))
    raise ValueError(f"no long-time prediction for verdict {verdict!r}")


# ----------------------------------------------------------------------
# decay witness (small beta, subcritical interval)


@dataclass(frozen=True)
class SupersolutionWitness:
    """Separable decaying barrier on a slowly inflating interval.

    With phi the principal eigenfunction of the initial interval,

        s(t)   = 1 + 2 eps - eps exp(-rho_dec t)
        eta(t) = h0 s(t)
        w(t,x) = K exp(-rho_dec t) phi(x / s(t))

    dominates the predator and confines the fronts to +-eta(t) provided
    the usual smallness conditions hold; they are reported as analytic
    margins by supersolution_check.
    """

    h0: float
    eps: float
    rho_dec: float
    K: float

    def s(self, t):
        return 1.0 + 2.0 * self.eps - self.eps * np.exp(-self.rho_dec * np.asarray(t, float))

    def eta(self, t):
        return self.h0 * self.s(t)

    def phi(self, xi):
        return np.sin(np.pi * (np.asarray(xi, float) + self.h0) / (2.0 * self.h0))

    def w(self, t, x):
        return self.K * np.exp(-self.rho_dec * t) * self.phi(np.asarray(x, float) / self.s(t))


def fit_witness_amplitude(vm: ValidatedModel, eps: float,
                          safety: float = 1.05, n: int = 4001) -> float:
    """Smallest K (times a safety factor) with K phi(x/(1+eps)) >= v0.

    Scans a dense grid strictly inside (-h0, h0); the ratio tends to
    zero at the endpoints because phi stays positive there while v0
    vanishes.
    """
    h0 = vm.params.h0
    x = np.linspace(-h0, h0, n)[1:-1]
    v0 = sample_v0(vm.init.v0, x, h0)
    wit = SupersolutionWitness(h0=h0, eps=eps, rho_dec=1.0, K=1.0)
    denom = wit.phi(x / (1.0 + eps))
    return float(safety * np.max(v0 / denom))


@dataclass(frozen=True)
class DominationReport:
    """Outcome of the decay-witness comparison.

    min_field_margin is the worst of w - v over all records and nodes;
    min_front_margin the worst of eta - h and g + eta.  The analytic
    margins are the slack in the sufficient conditions: pde_margin =
    lambda1 / (1+2 eps)^2 - mu - rho_dec must be positive for w to be a
    barrier, front_margin_coeff = h0 eps rho_dec (1+eps) - beta K pi/(2 h0)
    positive for the inflating interval to outrun the fronts.
    """

    holds: bool
    min_field_margin: float
    min_front_margin: float
    first_violation_time: float | None
    pde_margin: float
    front_margin_coeff: float


def supersolution_check(vm: ValidatedModel, disc: Discretization,
                        witness: SupersolutionWitness,
                        record_every: float = 0.5) -> DominationReport:
    """Run the solver and test domination by the witness at every record.

    Preconditions: h0 below the critical half-length (AssumptionViolated)
    and K large enough to dominate v0 on the grid (WitnessInvalid).
    """
    p = vm.params
    if p.h0 >= vm.constants.h0_crit:
        raise AssumptionViolated(
            f"decay witness needs h0 < (pi/2) sqrt(d/mu) = "
            f"{vm.constants.h0_crit:g}, got h0 = {p.h0:g}")
    disc = resolve_disc(disc, p.a)

    y = np.linspace(-1.0, 1.0, disc.Ny + 1)
    x0 = p.h0 * y
    v0 = sample_v0(vm.init.v0, x0, p.h0)
    w0 = witness.w(0.0, x0)
    if np.any(w0 < v0 * (1.0 - 1e-12)):
        raise WitnessInvalid(
            "witness does not dominate v0 at t = 0; raise K "
            f"(worst deficit {float(np.max(v0 - w0)):g})")

    state = {"field": math.inf, "front": math.inf, "first_bad": None}

    def observe(s: SimState) -> None:
        xs = 0.5 * (s.front.span * y + s.front.g + s.front.h)
        margin_f = float(np.min(witness.w(s.t, xs) - s.z))
        eta = float(witness.eta(s.t))
        margin_g = min(eta - s.front.h, s.front.g + eta)
        state["field"] = min(state["field"], margin_f)
        state["front"] = min(state["front"], margin_g)
        if (margin_f < 0.0 or margin_g < 0.0) and state["first_bad"] is None:
            state["first_bad"] = s.t

    simulate(vm, disc, record_every=record_every, on_record=observe)

    lam1 = vm.constants.lambda1
    pde_margin = lam1 / (1.0 + 2.0 * witness.eps) ** 2 - p.mu - witness.rho_dec
    front_coeff = (p.h0 * witness.eps * witness.rho_dec
                   - p.beta * witness.K * math.pi / (2.0 * p.h0 * (1.0 + witness.eps)))
    return DominationReport(
        holds=state["first_bad"] is None,
        min_field_margin=state["field"],
        min_front_margin=state["front"],
        first_violation_time=state["first_bad"],
        pde_margin=pde_margin,
        front_margin_coeff=front_coeff)


# ----------------------------------------------------------------------
# ordering of comparable runs


@dataclass(frozen=True)
class OrderingReport:
    """Nesting check for two runs ordered by their initial predator.

    Violations are measured against the accumulated stencil-error
    allowance 2 eps_stencil t per record.
    """

    holds: bool
    max_violation: float
    max_allowed: float
    first_violation_time: float | None
    records_compared: int


def comparison_check(vm_small: ValidatedModel, res_small: SimResult,
                     vm_big: ValidatedModel, res_big: SimResult,
                     disc: Discretization) -> OrderingReport:
    """Check g_small >= g_big and h_small <= h_big at every common record.

    The runs must share every model parameter and u0, and v0_small must
    not exceed v0_big anywhere (IncomparableRuns otherwise).
    """
    ps, pb = vm_small.params, vm_big.params
    for name in ("a", "b", "d", "mu", "beta", "h0", "kernel"):
        if getattr(ps, name) != getattr(pb, name):
            raise IncomparableRuns(f"parameter {name} differs between the runs")
    if vm_small.init.u0 != vm_big.init.u0:
        raise IncomparableRuns("u0 differs between the runs")
    xx = np.linspace(-ps.h0, ps.h0, 4001)
    vs = sample_v0(vm_small.init.v0, xx, ps.h0)
    vb = sample_v0(vm_big.init.v0, xx, ps.h0)
    if np.any(vs > vb * (1.0 + 1e-12) + 1e-300):
        raise IncomparableRuns("v0 of the small run exceeds v0 of the big run somewhere")

    disc = resolve_disc(disc, ps.a)
    dy = 2.0 / disc.Ny
    worst = 0.0
    worst_allowed = 0.0
    first_bad = None
    n = 0
    for rs, rb in zip(res_small.series, res_big.series):
        if abs(rs.t - rb.t) > 1e-9 * max(1.0, rs.t):
            break
        n += 1
        viol = max(0.0, rb.g - rs.g, rs.h - rb.h)
        eps_rec = (C_STENCIL * dy * dy * max(rs.max_v, rb.max_v)
                   * 2.0 * ps.beta / min(rs.span, rb.span))
        allowed = 2.0 * eps_rec * rs.t
        if viol > worst:
            worst = viol
            worst_allowed = allowed
        if viol > allowed and first_bad is None:
            first_bad = rs.t
    return OrderingReport(
        holds=first_bad is None,
        max_violation=worst,
        max_allowed=worst_allowed,
        first_violation_time=first_bad,
        records_compared=n)
