import numpy as np
import pytest

from sobolev_wlab import (
    QuadratureSpec,
    hat_1d_field,
    lift_difference_quotient,
    norm_full,
    norm_lpaa_2n,
    norm_lpstar_a,
    seminorm_general,
    seminorm_wspa,
    smooth_bump_field,
    validate_general_weights,
    validate_params,
    zero_field,
)
from sobolev_wlab.fields import scale_values
from sobolev_wlab.quadrature import FLAG_UNRELIABLE


def test_bridge_identity_bit_exact(params1d, fast_spec):
    u = smooth_bump_field(1.0)
    semi = seminorm_wspa(u, params1d, fast_spec)
    pair = norm_lpaa_2n(lift_difference_quotient(u, params1d), params1d, fast_spec)
    assert semi.value == pair.value
    assert semi.stderr == pair.stderr


def test_zero_field_norms(params1d, fast_spec):
    z = zero_field()
    rep = norm_full(z, params1d, fast_spec)
    assert rep.seminorm.value == 0.0
    assert rep.lpstar.value == 0.0
    assert rep.full == 0.0


def test_homogeneity_crn(params1d, fast_spec):
    """||c*u|| = |c| * ||u|| exactly under common random numbers."""
    u = smooth_bump_field(1.0)
    base = seminorm_wspa(u, params1d, fast_spec)
    scaled = seminorm_wspa(scale_values(u, -3.0), params1d, fast_spec)
    assert scaled.value == pytest.approx(3.0 * base.value, rel=1e-12)
    lp_base = norm_lpstar_a(u, params1d, fast_spec)
    lp_scaled = norm_lpstar_a(scale_values(u, -3.0), params1d, fast_spec)
    assert lp_scaled.value == pytest.approx(3.0 * lp_base.value, rel=1e-12)


def test_mc_agrees_with_oracle(params1d, oracle_spec):
    u = smooth_bump_field(1.0)
    mc = QuadratureSpec(samples=256000, seed=11)
    for fn in (seminorm_wspa, norm_lpstar_a):
        em = fn(u, params1d, mc)
        eo = fn(u, params1d, oracle_spec)
        assert abs(em.value - eo.value) <= 4 * (em.stderr + eo.stderr)


def test_seminorm_oracle_against_scipy_reference(params1d, oracle_spec):
    # adaptive-quadrature reference computed independently for
    # u = smooth_bump(1), n=1, s=0.3, p=2, a=0.1
    u = smooth_bump_field(1.0)
    est = seminorm_wspa(u, params1d, oracle_spec)
    assert est.value == pytest.approx(1.1623243, abs=2e-4)


def test_seminorm_general_symmetric_in_swapped_weights(params1d, fast_spec):
    u = smooth_bump_field(1.0)
    gw1 = validate_general_weights(params1d, -0.3, 0.5)
    gw2 = validate_general_weights(params1d, 0.5, -0.3)
    e1 = seminorm_general(u, params1d, gw1, fast_spec)
    e2 = seminorm_general(u, params1d, gw2, fast_spec)
    # the energy is symmetric under (alpha, beta) swap for symmetric kernels
    assert abs(e1.value - e2.value) <= 4 * (e1.stderr + e2.stderr)


def test_general_seminorm_matches_pair_norm_at_a(params1d, fast_spec):
    """At alpha = beta = a the general energy equals the seminorm^p."""
    u = hat_1d_field()
    gw = validate_general_weights(params1d, params1d.a, params1d.a)
    raw = seminorm_general(u, params1d, gw, fast_spec)
    semi = seminorm_wspa(u, params1d, fast_spec)
    assert raw.value == pytest.approx(semi.value ** params1d.p, rel=1e-10)


def test_unreliable_flag_propagates(params1d):
    # absurdly small budget on a spiky integrand tends to be flagged;
    # here just check the flag logic via a hand-built case
    from sobolev_wlab.norms import _root
    from sobolev_wlab.quadrature import Estimate

    noisy = Estimate(value=1.0, stderr=0.9, samples_used=10, spec_digest="d")
    rooted = _root(noisy, 2.0)
    assert FLAG_UNRELIABLE in rooted.flags
    clean = _root(Estimate(value=1.0, stderr=0.01, samples_used=10, spec_digest="d"), 2.0)
    assert FLAG_UNRELIABLE not in clean.flags


def test_norm_report_shape(params1d, fast_spec):
    u = smooth_bump_field(1.0)
    rep = norm_full(u, params1d, fast_spec)
    assert rep.full == rep.seminorm.value + rep.lpstar.value
    d = rep.as_dict()
    assert set(d) == {"seminorm", "lpstar", "full", "params", "field_id"}


def test_hat_lpstar_against_closed_form():
    # unweighted case a=0: int_{-1}^{1} (1-|x|)^{p*} dx = 2/(p*+1)
    params = validate_params(1, 0.3, 2.0, 0.0)
    u = hat_1d_field()
    est = norm_lpstar_a(u, params, QuadratureSpec(samples=256000, seed=13))
    exact = (2.0 / (params.p_star + 1.0)) ** (1.0 / params.p_star)
    assert abs(est.value - exact) <= 4 * est.stderr + 1e-4
