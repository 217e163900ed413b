"""Acceptance gate: ten end-to-end checks of the advertised behavior.

Each test drives the public API at desk scale, prints one pass/fail
line (shown with -s; the pytest verdict carries the same result), and
asserts the stated tolerance.  Tolerances are part of the contract;
nothing here is tuned to make a failing property look green.
"""

import math

import numpy as np
import pytest

import lgfronts as lg
from conftest import make_model, report
from lgfronts.analysis import SPREADING, VANISHING


def test_criterion_01_spreading_run_reaches_coexistence():
    # wide initial range: fronts run away and the core settles on the
    # coexistence state within 5% (relative, sup over |x| <= 5)
    vm = make_model(h0=2.0)
    disc = lg.Discretization(L=40.0, Ny=300, t_end=200.0)
    res = lg.simulate(vm, disc)
    cls = lg.classify(res.series, vm.constants,
                      lg.ClassifyCriteria.for_model(vm))
    rep = lg.asymptotic_check(res.final, vm, disc, SPREADING)
    ok = (cls.verdict == SPREADING and rep.u_err <= 0.05 and rep.v_err <= 0.05)
    report(1, ok, "spreading run reaches coexistence",
           f"verdict={cls.verdict} u_err={rep.u_err:.2e} "
           f"v_err={rep.v_err:.2e} tol=0.05")
    assert ok


def test_criterion_02_vanishing_run_releases_the_prey():
    # weak expansion on a subcritical range: predator below 1e-6 B,
    # prey back to carrying capacity within 2% on the core window
    vm = make_model(beta=0.1, h0=1.0)
    disc = lg.Discretization(L=12.0, Ny=200, t_end=80.0)
    res = lg.simulate(vm, disc)
    cls = lg.classify(res.series, vm.constants,
                      lg.ClassifyCriteria.for_model(vm))
    rep = lg.asymptotic_check(res.final, vm, disc, VANISHING)
    ok = (cls.verdict == VANISHING and rep.u_err <= 0.02 and rep.v_err <= 1e-6)
    report(2, ok, "vanishing run releases the prey",
           f"verdict={cls.verdict} u_err={rep.u_err:.2e} tol=0.02 "
           f"max_v/B={rep.v_err:.2e} tol=1e-6")
    assert ok


def test_criterion_03_supercritical_range_spreads_for_every_rate():
    # span(0) = 4 exceeds pi sqrt(d/mu): spreading no matter how small
    # or large the expansion rate is
    verdicts = {}
    for beta in (0.05, 1.0, 10.0):
        vm = make_model(beta=beta, h0=2.0)
        crit = lg.ClassifyCriteria.for_model(vm)
        res = lg.simulate(vm, lg.Discretization(L=15.0, Ny=100, t_end=20.0),
                          stop_rule=lg.make_stop_rule(vm.constants, crit))
        verdicts[beta] = lg.classify(res.series, vm.constants, crit).verdict
    ok = all(v == SPREADING for v in verdicts.values())
    report(3, ok, "supercritical range spreads for every rate",
           " ".join(f"beta={b:g}:{v}" for b, v in verdicts.items()))
    assert ok


def test_criterion_04_threshold_bracket_narrows_to_five_hundredths():
    vm = make_model(h0=0.5)
    disc = lg.Discretization(L=25.0, Ny=150, t_end=400.0)
    br = lg.bisect_beta(vm, disc, 0.001, 2.0, width_tol=0.05)
    verdicts = dict(br.history)
    ok = (br.status == "converged" and br.width <= 0.05
          and verdicts[br.lo] == VANISHING and verdicts[br.hi] == SPREADING)
    report(4, ok, "expansion-rate threshold bracketed",
           f"[{br.lo:.4f}, {br.hi:.4f}] width={br.width:.4f} "
           f"runs={br.runs} status={br.status}")
    assert ok


def test_criterion_05_refinement_orders_reach_one():
    vm = make_model(h0=2.0)
    disc = lg.Discretization(L=20.0, Ny=80, t_end=8.0)
    rep = lg.refine_check(vm, disc, levels=3, t_compare=8.0)
    orders = {k: rep.orders[k] for k in ("g", "h", "span")}
    ok = (not rep.undefined
          and all(o >= 1.0 for seq in orders.values() for o in seq))
    report(5, ok, "front positions converge under refinement",
           " ".join(f"{k}:{seq[0]:.2f}" for k, seq in orders.items())
           + " (need >= 1)")
    assert ok


def test_criterion_06_squeeze_bounds_match_closed_forms():
    bs = lg.bound_sequences(1.0, 0.5, 50)  # constructor checks 1e-12
    first = (bs.lower[0], bs.upper[0], bs.lower[1], bs.upper[1])
    exact = (0.5, 0.75, 0.625, 0.6875)
    for b in (0.1, 0.9):
        lg.bound_sequences(1.0, b, 50)
    rem = lg.bound_sequences(2.0, 0.9, 20)
    remainder = rem.upper[19] - rem.limit
    expected = 2.0 * 0.9 ** 41 / 1.9
    ok = (first == exact
          and bs.limit == pytest.approx(2.0 / 3.0, abs=1e-15)
          and remainder == pytest.approx(expected, rel=1e-9))
    report(6, ok, "iterative prey bounds match the geometric forms",
           f"first terms {first}, limit {bs.limit:.12f}, "
           f"tail {remainder:.3e} vs {expected:.3e}")
    assert ok


def test_criterion_07_larger_initial_predator_nests_the_fronts():
    rng = np.random.default_rng(20250817)
    disc = lg.Discretization(L=12.0, Ny=150, t_end=5.0)
    worst = 0.0
    failures = 0
    for _ in range(10):
        base = float(rng.uniform(0.3, 0.8))
        factor = float(rng.uniform(1.1, 2.0))
        p = lg.ModelParams(a=1.0, b=0.5, d=1.0, mu=1.0,
                           beta=float(rng.uniform(0.3, 0.6)), h0=1.0)
        vm_s = lg.validate_params(p, v0=lg.CosineProfile(base))
        vm_b = lg.validate_params(p, v0=lg.CosineProfile(base * factor))
        rs = lg.simulate(vm_s, disc, record_every=0.25)
        rb = lg.simulate(vm_b, disc, record_every=0.25)
        rep = lg.comparison_check(vm_s, rs, vm_b, rb, disc)
        worst = max(worst, rep.max_violation)
        failures += 0 if rep.holds else 1
    ok = failures == 0
    report(7, ok, "ordered initial data keeps the fronts nested",
           f"pairs=10 failures={failures} worst_violation={worst:.2e}")
    assert ok


def test_criterion_08_decaying_barrier_confines_small_rates():
    vm = make_model(beta=1e-3, h0=1.0)
    K = lg.fit_witness_amplitude(vm, 0.05)
    wit = lg.SupersolutionWitness(h0=1.0, eps=0.05, rho_dec=0.05, K=K)
    disc = lg.Discretization(L=15.0, Ny=150, t_end=50.0)
    rep = lg.supersolution_check(vm, disc, wit)
    ok = (rep.holds and rep.min_field_margin >= 0.0
          and rep.min_front_margin >= 0.0
          and rep.pde_margin > 0.0 and rep.front_margin_coeff > 0.0)
    report(8, ok, "decaying barrier dominates a small expansion rate",
           f"field_margin={rep.min_field_margin:.3e} "
           f"front_margin={rep.min_front_margin:.3e} "
           f"analytic margins {rep.pde_margin:.2f}/{rep.front_margin_coeff:.1e}")
    assert ok


def test_criterion_09_doubling_the_domain_changes_nothing():
    vm = make_model(h0=2.0)
    r1 = lg.simulate(vm, lg.Discretization(L=60.0, Ny=150, t_end=200.0))
    r2 = lg.simulate(vm, lg.Discretization(L=120.0, Ny=150, t_end=200.0))
    t1 = {rec.t for rec in r1.series}
    common = [rec.t for rec in r2.series if rec.t in t1]
    tc = max(common)
    h1 = next(rec.h for rec in r1.series if rec.t == tc)
    h2 = next(rec.h for rec in r2.series if rec.t == tc)
    rel = abs(h1 - h2) / h1
    ok = rel <= 1e-3
    report(9, ok, "doubling the truncation half-width changes nothing",
           f"t={tc:g} h(L=60)={h1:.6f} h(L=120)={h2:.6f} rel={rel:.2e} tol=1e-3")
    assert ok


def test_criterion_10_saturating_kernel_variant_behaves():
    # independent oracle: bisect (a - u)(m + u) - b u on (0, a)
    a, b, m = 1.0, 0.5, 1.0
    lo, hi = 0.0, a
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (a - mid) * (m + mid) - b * mid > 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)

    k = lg.ReactionKernel(variant=lg.HOLLING_TANNER, m=m)
    vm = make_model(h0=2.0, kernel=k)
    ustar, vstar = vm.constants.coexistence
    disc = lg.Discretization(L=25.0, Ny=150, t_end=40.0)
    res = lg.simulate(vm, disc)
    cls = lg.classify(res.series, vm.constants,
                      lg.ClassifyCriteria.for_model(vm))
    rep = lg.asymptotic_check(res.final, vm, disc, SPREADING)
    ok = (abs(ustar - root) <= 1e-12 and vstar == ustar
          and cls.verdict == SPREADING
          and rep.u_err <= 0.05 and rep.v_err <= 0.05)
    report(10, ok, "saturating kernel variant behaves",
           f"u*={ustar:.15f} oracle={root:.15f} verdict={cls.verdict} "
           f"u_err={rep.u_err:.2e} v_err={rep.v_err:.2e}")
    assert ok
