"""Threshold location and parameter sweeps built on classified runs."""

from __future__ import annotations

import dataclasses
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .analysis import (
    SPREADING,
    UNDECIDED,
    VANISHING,
    Classification,
    ClassifyCriteria,
    classify,
    make_stop_rule,
)
from .errors import LGFrontsError, NoBracket, RunCapExceeded
from .model import ValidatedModel, validate_params
from .solver import Discretization, simulate

BRACKET_CONVERGED = "converged"
BRACKET_UNDECIDED = "undecided"

# expansion factor and attempt cap when an endpoint verdict is wrong
_EXPAND = 4.0
_MAX_EXPAND = 8


def _with_overrides(vm: ValidatedModel, **overrides: float) -> ValidatedModel:
    params = dataclasses.replace(vm.params, **overrides)
    return validate_params(params, vm.init.u0, vm.init.v0)


def _probe(vm: ValidatedModel, disc: Discretization, crit: ClassifyCriteria,
           record_every: float) -> Classification:
    stop = make_stop_rule(vm.constants, crit)
    res = simulate(vm, disc, record_every=record_every, stop_rule=stop)
    return classify(res.series, vm.constants, crit)


@dataclass(frozen=True)
class BetaBracket:
    """Interval [lo, hi] with a vanishing run at lo and a spreading run
    at hi, bisected until hi - lo <= width_tol (status "converged"), or
    the probe that came back undecided (status "undecided")."""

    lo: float
    hi: float
    width: float
    runs: int
    status: str
    undecided_beta: float | None
    history: tuple[tuple[float, str], ...]


def bisect_beta(vm: ValidatedModel, disc: Discretization,
                beta_lo: float, beta_hi: float, width_tol: float = 0.05,
                crit: ClassifyCriteria | None = None,
                record_every: float = 0.5, run_cap: int = 64) -> BetaBracket:
    """Bracket the expansion-rate threshold between dying out and
    spreading.

    The endpoints must classify as vanishing (lo) and spreading (hi);
    a wrong endpoint is pushed geometrically (factor 4, at most 8
    times) before giving up with NoBracket.  An undecided probe stops
    the search and is reported rather than guessed at.
    """
    if not (0.0 < beta_lo < beta_hi):
        raise ValueError(f"need 0 < beta_lo < beta_hi, got [{beta_lo!r}, {beta_hi!r}]")
    if width_tol <= 0.0:
        raise ValueError(f"width_tol must be positive, got {width_tol!r}")
    history: list[tuple[float, str]] = []
    runs = 0

    def verdict_at(beta: float) -> str:
        nonlocal runs
        runs += 1
        if runs > run_cap:
            raise RunCapExceeded(f"bisection exceeded the cap of {run_cap} runs")
        vmb = _with_overrides(vm, beta=beta)
        c = crit if crit is not None else ClassifyCriteria.for_model(vmb)
        v = _probe(vmb, disc, c, record_every).verdict
        history.append((beta, v))
        return v

    def finish(lo: float, hi: float, status: str,
               undecided: float | None) -> BetaBracket:
        return BetaBracket(lo=lo, hi=hi, width=hi - lo, runs=runs,
                           status=status, undecided_beta=undecided,
                           history=tuple(history))

    lo, hi = float(beta_lo), float(beta_hi)
    v_lo = verdict_at(lo)
    for _ in range(_MAX_EXPAND):
        if v_lo == VANISHING:
            break
        if v_lo == UNDECIDED:
            return finish(lo, hi, BRACKET_UNDECIDED, lo)
        lo /= _EXPAND
        v_lo = verdict_at(lo)
    else:
        raise NoBracket(
            f"no vanishing run found down to beta = {lo:g}; the interval "
            "may be supercritical for every expansion rate")
    v_hi = verdict_at(hi)
    for _ in range(_MAX_EXPAND):
        if v_hi == SPREADING:
            break
        if v_hi == UNDECIDED:
            return finish(lo, hi, BRACKET_UNDECIDED, hi)
        hi *= _EXPAND
        v_hi = verdict_at(hi)
    else:
        raise NoBracket(
            f"no spreading run found up to beta = {hi:g}; the interval "
            "may be subcritical for every expansion rate")

    while hi - lo > width_tol:
        mid = 0.5 * (lo + hi)
        v = verdict_at(mid)
        if v == SPREADING:
            hi = mid
        elif v == VANISHING:
            lo = mid
        else:
            return finish(lo, hi, BRACKET_UNDECIDED, mid)
    return finish(lo, hi, BRACKET_CONVERGED, None)


# ----------------------------------------------------------------------
# cartesian parameter grids

_AXES = ("a", "b", "d", "mu", "beta", "h0")


@dataclass(frozen=True)
class GridRow:
    values: tuple[float, ...]
    verdict: str
    decided_at: float | None
    span: float
    max_v: float
    error: str | None = None


@dataclass(frozen=True)
class GridResult:
    axis_names: tuple[str, ...]
    rows: tuple[GridRow, ...]
    anomalies: tuple[str, ...]


def run_grid(vm: ValidatedModel, disc: Discretization,
             axes: dict[str, list[float]],
             crit: ClassifyCriteria | None = None,
             record_every: float = 0.5, run_cap: int = 256,
             workers: int = 1) -> GridResult:
    """Classify every point of the cartesian product of the axes.

    Rows come out in lexicographic order of the axes as given.  A row
    that fails keeps its place with verdict "error" instead of killing
    the sweep.  With workers > 1 rows run on a thread pool but the
    output order is unchanged.
    """
    for name in axes:
        if name not in _AXES:
            raise ValueError(f"unknown sweep axis {name!r}; choose from {_AXES}")
        if not axes[name]:
            raise ValueError(f"sweep axis {name!r} is empty")
    names = tuple(axes)
    points = list(itertools.product(*(axes[n] for n in names)))
    if len(points) > run_cap:
        raise RunCapExceeded(
            f"grid has {len(points)} points, more than the cap of {run_cap}")

    def one(point: tuple[float, ...]) -> GridRow:
        try:
            vmp = _with_overrides(vm, **dict(zip(names, point)))
            c = crit if crit is not None else ClassifyCriteria.for_model(vmp)
            cls = _probe(vmp, disc, c, record_every)
            return GridRow(values=point, verdict=cls.verdict,
                           decided_at=cls.decided_at, span=cls.span,
                           max_v=cls.max_v)
        except (LGFrontsError, ValueError) as exc:
            return GridRow(values=point, verdict="error", decided_at=None,
                           span=float("nan"), max_v=float("nan"),
                           error=f"{type(exc).__name__}: {exc}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(one, points))
    else:
        rows = tuple(one(pt) for pt in points)
    return GridResult(axis_names=names, rows=rows,
                      anomalies=tuple(_beta_anomalies(names, rows)))


def _beta_anomalies(names: tuple[str, ...],
                    rows: tuple[GridRow, ...]) -> list[str]:
    """Spreading at some beta but vanishing at a larger one, with all
    other axes fixed, contradicts monotonicity in the expansion rate."""
    if "beta" not in names:
        return []
    bi = names.index("beta")
    groups: dict[tuple[float, ...], list[tuple[float, str]]] = {}
    for row in rows:
        key = row.values[:bi] + row.values[bi + 1:]
        groups.setdefault(key, []).append((row.values[bi], row.verdict))
    out = []
    for key, pairs in groups.items():
        pairs.sort()
        seen_spreading_at = None
        for beta, verdict in pairs:
            if verdict == SPREADING and seen_spreading_at is None:
                seen_spreading_at = beta
            elif verdict == VANISHING and seen_spreading_at is not None:
                out.append(
                    f"vanishing at beta = {beta:g} above spreading at "
                    f"beta = {seen_spreading_at:g} (other axes {key})")
                break
    return out
