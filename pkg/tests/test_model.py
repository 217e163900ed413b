import math

import numpy as np
import pytest

import lgfronts as lg
from lgfronts.errors import ConstraintViolation, NoPositiveEquilibrium
from lgfronts.model import (
    coexistence_state,
    profile_max,
    sample_u0,
    sample_v0,
    v0_edge_slopes,
)


def params(**kw):
    base = dict(a=1.0, b=0.5, d=1.0, mu=1.0, beta=1.0, h0=1.0)
    base.update(kw)
    return lg.ModelParams(**base)


def test_validate_accepts_defaults():
    vm = lg.validate_params(params())
    assert vm.warnings == ()
    assert vm.init.u0 == lg.ConstantProfile(1.0)
    assert vm.init.v0 == lg.CosineProfile(1.0)


def test_validate_collects_every_violation():
    with pytest.raises(ConstraintViolation) as err:
        lg.validate_params(params(a=0.0, d=-1.0, beta=0.0, h0=-2.0))
    fields = sorted(v.field for v in err.value.violations)
    assert fields == ["a", "beta", "d", "h0"]
    assert all(v.kind == "NonPositiveParameter" for v in err.value.violations)


def test_b_at_one_is_warned_not_rejected():
    vm = lg.validate_params(params(b=1.0))
    assert len(vm.warnings) == 1
    assert "b" in vm.warnings[0]


def test_v0_must_vanish_at_the_range_ends():
    bad = lg.TableProfile(x=(-1.0, 0.0, 1.0), values=(0.1, 1.0, 0.0))
    with pytest.raises(ConstraintViolation) as err:
        lg.validate_params(params(), v0=bad)
    assert any(v.kind == "InitialProfileViolation" for v in err.value.violations)


def test_v0_table_must_cover_the_whole_range():
    short = lg.TableProfile(x=(-0.5, 0.0, 0.5), values=(0.0, 1.0, 0.0))
    with pytest.raises(ConstraintViolation):
        lg.validate_params(params(), v0=short)


def test_u0_must_be_positive():
    bad = lg.TableProfile(x=(-1.0, 0.0, 1.0), values=(1.0, -0.5, 1.0))
    with pytest.raises(ConstraintViolation):
        lg.validate_params(params(), u0=bad)


def test_coexistence_balances_both_reactions():
    p = params()
    ustar, vstar = coexistence_state(p)
    assert ustar == pytest.approx(2.0 / 3.0, abs=1e-15)
    fu, fv = lg.reaction_rates(ustar, vstar, p)
    assert abs(fu) < 1e-12 and abs(fv) < 1e-12


def test_saturating_coexistence_matches_root():
    # root of u^2 + (m - a + b) u - a m on (0, a), found independently
    # by bisection when the oracle value was frozen
    k = lg.ReactionKernel(variant=lg.HOLLING_TANNER, m=1.0)
    p = params(kernel=k)
    ustar, vstar = coexistence_state(p)
    assert ustar == pytest.approx(0.7807764064044151, abs=1e-14)
    assert vstar == ustar
    fu, fv = lg.reaction_rates(ustar, vstar, p)
    assert abs(fu) < 1e-12 and abs(fv) < 1e-12


def test_no_positive_equilibrium_for_degenerate_inputs():
    # a = 0 collapses the saturating root to zero; the plain kernel
    # keeps a positive balance point for every positive a, b
    k = lg.ReactionKernel(variant=lg.HOLLING_TANNER, m=1.0)
    with pytest.raises(NoPositiveEquilibrium):
        coexistence_state(params(a=0.0, kernel=k))
    ustar, _ = coexistence_state(params(b=5.0))
    assert ustar > 0.0


def test_reaction_rates_floor_only_affects_the_ratio():
    p = params()
    fu, fv = lg.reaction_rates(0.0, 0.5, p, u_floor=1e-8)
    assert math.isfinite(fv) and fv < 0.0
    assert fu == 0.0


def test_reaction_rates_vectorized():
    p = params()
    u = np.array([0.2, 0.5, 1.0])
    v = np.array([0.1, 0.5, 0.9])
    fu, fv = lg.reaction_rates(u, v, p)
    for i in range(3):
        fui, fvi = lg.reaction_rates(float(u[i]), float(v[i]), p)
        assert fu[i] == pytest.approx(fui, rel=1e-15)
        assert fv[i] == pytest.approx(fvi, rel=1e-15)


def test_derived_constants_against_fixed_values():
    vm = lg.validate_params(params(d=2.0, mu=0.5, h0=2.0))
    c = vm.constants
    assert c.span_crit == pytest.approx(math.pi * 2.0, rel=1e-15)
    assert c.h0_crit == pytest.approx(math.pi, rel=1e-15)
    assert c.lambda1 == pytest.approx(2.0 * math.pi ** 2 / 16.0, rel=1e-15)
    assert c.A == 1.0 and c.B == 1.0


def test_sup_bounds_track_initial_data():
    vm = lg.validate_params(params(a=0.5),
                            u0=lg.ConstantProfile(2.0),
                            v0=lg.CosineProfile(3.0))
    assert vm.constants.A == 2.0
    assert vm.constants.B == 3.0


def test_initial_front_speeds_match_the_cosine_slope():
    # v0 = V cos(pi x / (2 h0)) has slope -V pi / (2 h0) at x = h0
    vm = lg.validate_params(params(beta=2.0, h0=2.0), v0=lg.CosineProfile(1.5))
    expected = 2.0 * 1.5 * math.pi / (2.0 * 2.0)
    assert vm.init.hstar == pytest.approx(expected, rel=1e-12)
    assert vm.init.gstar == pytest.approx(-expected, rel=1e-12)


def test_edge_slopes_numeric_table_close_to_analytic():
    h0 = 1.0
    x = np.linspace(-h0, h0, 2001)
    vals = np.cos(np.pi * x / (2.0 * h0))
    vals[0] = vals[-1] = 0.0
    table = lg.TableProfile(x=tuple(x), values=tuple(vals))
    sl, sr = v0_edge_slopes(table, h0)
    assert sr == pytest.approx(-math.pi / 2.0, abs=1e-3)
    assert sl == pytest.approx(math.pi / 2.0, abs=1e-3)


def test_sampling_helpers():
    h0 = 2.0
    x = np.linspace(-h0, h0, 5)
    assert np.all(sample_u0(lg.ConstantProfile(0.7), x) == 0.7)
    v = sample_v0(lg.CosineProfile(2.0), x, h0)
    assert v[0] == pytest.approx(0.0, abs=1e-15)
    assert v[2] == pytest.approx(2.0, rel=1e-15)
    assert profile_max(lg.CosineProfile(2.0), h0) == 2.0
