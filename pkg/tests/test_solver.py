import dataclasses
import math

import numpy as np
import pytest

import lgfronts as lg
from lgfronts import kernels
from lgfronts.errors import (
    CflViolation,
    DomainTooSmall,
    FrontNearTruncation,
)
from lgfronts.solver import SERIES_COLUMNS, SeriesRecord, init_state


def model(**kw):
    base = dict(a=1.0, b=0.5, d=1.0, mu=1.0, beta=1.0, h0=1.0)
    base.update(kw)
    return lg.validate_params(lg.ModelParams(**base))


def test_series_columns_match_the_record_fields():
    assert SERIES_COLUMNS == tuple(f.name for f in dataclasses.fields(SeriesRecord))


def test_resolve_disc_fills_defaults():
    d = lg.resolve_disc(lg.Discretization(L=20.0, Ny=100), 1.0)
    assert d.Nx == 1000
    assert d.dt == pytest.approx(0.5 / 100)
    assert d.u_floor == pytest.approx(1e-8)


def test_resolve_disc_rejects_bad_values():
    with pytest.raises(ValueError):
        lg.resolve_disc(lg.Discretization(Ny=4), 1.0)
    with pytest.raises(ValueError):
        lg.resolve_disc(lg.Discretization(cfl_safety=0.0), 1.0)
    with pytest.raises(ValueError):
        lg.resolve_disc(lg.Discretization(t_end=-1.0), 1.0)


def test_domain_must_clear_the_front_margin():
    with pytest.raises(DomainTooSmall):
        lg.simulate(model(h0=2.0), lg.Discretization(L=7.0, Ny=64, t_end=1.0))


def test_initial_state_layout():
    vm = model(h0=2.0)
    disc = lg.resolve_disc(lg.Discretization(L=15.0, Ny=100, t_end=1.0), 1.0)
    st = init_state(vm, disc)
    assert st.t == 0.0
    assert st.z[0] == 0.0 and st.z[-1] == 0.0
    assert st.z.max() == pytest.approx(1.0, rel=1e-12)
    assert st.u.shape == (disc.Nx + 1,)
    assert st.front.g == -2.0 and st.front.h == 2.0
    assert st.front.hdot == pytest.approx(math.pi / 4.0, rel=1e-12)


def test_step_advances_without_mutating_the_input():
    vm = model()
    disc = lg.resolve_disc(lg.Discretization(L=10.0, Ny=100, t_end=1.0), 1.0)
    st = init_state(vm, disc)
    z_before = st.z.copy()
    st2 = lg.step(st, vm, disc)
    assert st2.t == pytest.approx(disc.dt)
    assert st2.front.h > st.front.h
    assert st2.front.g < st.front.g
    assert np.array_equal(st.z, z_before)
    assert st2.step_count == 1


def test_step_reports_cfl_violation_honestly():
    # fast fronts with a coarse step: advection stability fails at once
    vm = model(beta=10.0)
    disc = lg.resolve_disc(lg.Discretization(L=10.0, Ny=200, dt=0.01, t_end=1.0), 1.0)
    with pytest.raises(CflViolation):
        lg.step(init_state(vm, disc), vm, disc)


def test_simulate_tightens_dt_instead():
    vm = model(beta=10.0)
    res = lg.simulate(vm, lg.Discretization(L=10.0, Ny=200, dt=0.01, t_end=0.5))
    assert res.health.dt_used < res.health.dt_requested
    assert res.health.stop_reason == "t_end"


def test_zero_horizon_returns_the_initial_record():
    res = lg.simulate(model(), lg.Discretization(L=10.0, Ny=64, t_end=0.0))
    assert len(res.series) == 1
    assert res.series[0].t == 0.0
    assert res.health.steps == 0


def test_predator_endpoints_stay_exactly_zero():
    res = lg.simulate(model(), lg.Discretization(L=10.0, Ny=80, t_end=1.0))
    assert res.final.z[0] == 0.0
    assert res.final.z[-1] == 0.0


def test_fronts_are_monotone_and_speeds_signed():
    res = lg.simulate(model(h0=2.0), lg.Discretization(L=15.0, Ny=100, t_end=3.0))
    g = [r.g for r in res.series]
    h = [r.h for r in res.series]
    assert all(g2 <= g1 + 1e-12 for g1, g2 in zip(g, g[1:]))
    assert all(h2 >= h1 - 1e-12 for h1, h2 in zip(h, h[1:]))
    assert res.health.wrong_sign_speed_steps == 0
    for rec in res.series:
        assert rec.gdot <= 1e-9 and rec.hdot >= -1e-9


def test_sup_bounds_hold_at_every_record():
    vm = model(h0=2.0)
    res = lg.simulate(vm, lg.Discretization(L=15.0, Ny=100, t_end=3.0))
    A, B = vm.constants.A, vm.constants.B
    tol = 1e-6
    for rec in res.series:
        assert rec.max_u <= A * (1.0 + tol)
        assert rec.max_v <= B * (1.0 + tol)
    assert res.health.max_u_excess <= tol * A
    assert res.health.max_v_excess <= tol * B


def test_record_cadence_and_final_time():
    res = lg.simulate(model(), lg.Discretization(L=10.0, Ny=80, t_end=2.0),
                      record_every=0.5)
    times = [r.t for r in res.series]
    assert times == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0], abs=1e-12)


def test_mass_budget_closes_at_first_order():
    # d/dt int v = int reaction - (d/beta) d/dt span, so the recorded
    # per-chunk imbalance must shrink with the step, not accumulate
    res = lg.simulate(model(h0=2.0), lg.Discretization(L=15.0, Ny=150, t_end=2.0))
    assert res.health.stefan_max_imbalance < 5e-3


def test_truncation_stops_simulate_gracefully():
    vm = model(beta=3.0, h0=1.0)
    res = lg.simulate(vm, lg.Discretization(L=7.0, Ny=80, t_end=50.0))
    assert res.health.stop_reason == "front_near_truncation"
    assert res.final.front.h <= 7.0 - 5.0 + 0.1
    assert res.series[-1].t < 50.0


def test_truncation_raises_in_single_step_mode():
    vm = model(beta=3.0, h0=1.0)
    disc = lg.resolve_disc(
        lg.Discretization(L=7.0, Ny=80, dt=2e-3, t_end=50.0), 1.0)
    st = init_state(vm, disc)
    with pytest.raises(FrontNearTruncation):
        for _ in range(100000):
            st = lg.step(st, vm, disc)


def test_prey_fixed_point_with_negligible_predator():
    # u0 = a and a vanishing-scale predator: u must stay at carrying
    # capacity to roundoff and the fronts must stay put
    vm = lg.validate_params(model().params, lg.ConstantProfile(1.0),
                            lg.CosineProfile(1e-30))
    res = lg.simulate(vm, lg.Discretization(L=10.0, Ny=80, t_end=1.0))
    assert np.max(np.abs(res.final.u - 1.0)) < 1e-12
    assert res.final.front.span == pytest.approx(2.0, abs=1e-12)


def test_early_stop_rule_short_circuits():
    vm = model(h0=2.0)  # span 4 is already past the critical 3.14
    crit = lg.ClassifyCriteria.for_model(vm)
    rule = lg.make_stop_rule(vm.constants, crit)
    res = lg.simulate(vm, lg.Discretization(L=15.0, Ny=100, t_end=50.0),
                      stop_rule=rule)
    assert res.health.stop_reason == "verdict:spreading"
    assert len(res.series) == 1
    assert res.health.steps == 0


@pytest.mark.skipif(getattr(kernels, "advance_chunk_numba", None) is None,
                    reason="numba backend unavailable")
def test_backends_agree_to_high_precision(monkeypatch):
    vm = model(h0=2.0)
    disc = lg.Discretization(L=15.0, Ny=120, t_end=2.0)
    outs = {}
    for name in ("advance_chunk_numba", "advance_chunk_numpy"):
        monkeypatch.setattr(kernels, "advance_chunk", getattr(kernels, name))
        res = lg.simulate(vm, disc)
        outs[name] = res
    a, b = outs["advance_chunk_numba"], outs["advance_chunk_numpy"]
    assert a.final.front.g == pytest.approx(b.final.front.g, rel=1e-9)
    assert a.final.front.h == pytest.approx(b.final.front.h, rel=1e-9)
    assert np.allclose(a.final.u, b.final.u, rtol=1e-9, atol=1e-12)
    assert np.allclose(a.final.z, b.final.z, rtol=1e-9, atol=1e-12)


def test_numpy_backend_exists_regardless_of_numba():
    assert callable(kernels.advance_chunk_numpy)
    assert kernels.BACKEND in ("numba", "numpy")


def test_refine_check_orders_indicate_convergence():
    vm = model(h0=2.0)
    disc = lg.Discretization(L=15.0, Ny=60, t_end=4.0)
    rep = lg.refine_check(vm, disc, levels=3, t_compare=4.0)
    assert rep.t_compare == pytest.approx(4.0)
    for key in ("g", "h", "span"):
        assert not rep.undefined
        for order in rep.orders[key]:
            assert order > 1.0


def test_refine_check_needs_three_levels():
    with pytest.raises(ValueError):
        lg.refine_check(model(), lg.Discretization(t_end=1.0), levels=2)
