"""Every norm and seminorm of the space, as compositions of field + quadrature.

The seminorm is computed literally as the weighted pair norm of the
difference-quotient lift, so the bridge identity between the two holds
bit-exactly under common random numbers (same spec, same seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import PairField, ScalarField, lift_difference_quotient
from .params import GeneralWeightParams, SpaceParams
from .quadrature import (
    Estimate,
    FLAG_UNRELIABLE,
    METHOD_TENSOR_ORACLE,
    QuadratureSpec,
    estimate_pair_integral_singular,
    estimate_weighted_integral_Rn,
    oracle_pair_integral_1d,
    oracle_weighted_integral_1d,
    resolve_outer_radius,
    tensor_oracle_1d_available,
)


@dataclass(frozen=True)
class NormReport:
    seminorm: Estimate
    lpstar: Estimate
    full: float
    params: SpaceParams
    field_id: str

    def as_dict(self) -> dict:
        return {
            "seminorm": self.seminorm.as_dict(),
            "lpstar": self.lpstar.as_dict(),
            "full": self.full,
            "params": self.params.as_dict(),
            "field_id": self.field_id,
        }


def _root(est: Estimate, power: float) -> Estimate:
    """x -> x^(1/power) with first-order delta-method error propagation."""
    inv = 1.0 / power
    raw = max(est.value, 0.0)
    value = raw**inv
    flags = est.flags
    if raw == 0.0:
        stderr = est.stderr**inv
    else:
        stderr = est.stderr * inv * raw ** (inv - 1.0)
        if est.stderr > 0.5 * raw:
            flags = tuple(set(flags) | {FLAG_UNRELIABLE})
    return Estimate(
        value=float(value),
        stderr=float(stderr),
        samples_used=est.samples_used,
        spec_digest=est.spec_digest,
        tail_truncation_bound=est.tail_truncation_bound,
        flags=flags,
    )


def _pair_power_integral(v: PairField, params: SpaceParams, alpha: float, beta: float,
                         spec: QuadratureSpec) -> Estimate:
    """Raw integral iint |v|^p |x|^(-alpha) |y|^(-beta) dx dy."""
    p = params.p

    def g(x, y):
        return np.abs(v(x, y)) ** p

    if spec.method == METHOD_TENSOR_ORACLE:
        tensor_oracle_1d_available(params.n)
        x_max = resolve_outer_radius(spec, v.x_support_radius)
        return oracle_pair_integral_1d(
            g, alpha, beta, x_max=x_max, z_max=2.0 * x_max,
            grid_points=spec.grid_points, label=f"|{v.label}|^{p}", spec=spec,
        )
    kappa = spec.near_exponent if spec.near_exponent is not None else params.p * (1.0 - params.s)
    return estimate_pair_integral_singular(
        g, n=params.n, alpha=alpha, beta=beta, sp=params.sp, spec=spec,
        x_support_radius=v.x_support_radius, kappa=kappa, label=f"|{v.label}|^{p}",
    )


def norm_lpaa_2n(v: PairField, params: SpaceParams, spec: QuadratureSpec) -> Estimate:
    """(iint |v|^p |x|^(-a) |y|^(-a) dx dy)^(1/p)."""
    raw = _pair_power_integral(v, params, params.a, params.a, spec)
    return _root(raw, params.p)


def seminorm_wspa(u: ScalarField, params: SpaceParams, spec: QuadratureSpec) -> Estimate:
    """The weighted Gagliardo seminorm, to the power 1/p."""
    return norm_lpaa_2n(lift_difference_quotient(u, params), params, spec)


def seminorm_general(
    u: ScalarField,
    params: SpaceParams,
    gw: GeneralWeightParams,
    spec: QuadratureSpec,
) -> Estimate:
    """Two-weight seminorm energy (the raw double integral, no 1/p root)."""
    p, n, sp = params.p, params.n, params.sp
    kernel_exp = n + sp

    def g(x, y):
        d = np.linalg.norm(x - y, axis=-1)
        off = d > 0.0
        dd = np.where(off, d, 1.0)
        vals = np.abs(u(x) - u(y)) ** p * dd ** (-kernel_exp)
        return np.where(off, vals, 0.0)

    if spec.method == METHOD_TENSOR_ORACLE:
        tensor_oracle_1d_available(n)
        x_max = resolve_outer_radius(spec, u.support_radius)
        return oracle_pair_integral_1d(
            g, gw.alpha, gw.beta, x_max=x_max, z_max=2.0 * x_max,
            grid_points=spec.grid_points, label=f"general[{u.label}]", spec=spec,
        )
    kappa = spec.near_exponent if spec.near_exponent is not None else p * (1.0 - params.s)
    return estimate_pair_integral_singular(
        g, n=n, alpha=gw.alpha, beta=gw.beta, sp=sp, spec=spec,
        x_support_radius=u.support_radius, kappa=kappa, label=f"general[{u.label}]",
    )


def norm_lpstar_a(u: ScalarField, params: SpaceParams, spec: QuadratureSpec) -> Estimate:
    """(int |u|^{p_star} |x|^(-b) dx)^(1/p_star)."""
    pstar, b, n = params.p_star, params.b, params.n

    def f(x):
        return np.abs(u(x)) ** pstar

    if spec.method == METHOD_TENSOR_ORACLE:
        tensor_oracle_1d_available(n)
        x_max = resolve_outer_radius(spec, u.support_radius)
        raw = oracle_weighted_integral_1d(
            f, b, x_max=x_max, grid_points=spec.grid_points,
            label=f"lpstar[{u.label}]", spec=spec,
        )
    else:
        rspec = spec if spec.outer_radius is not None else QuadratureSpec(
            method=spec.method, samples=spec.samples, grid_points=spec.grid_points,
            seed=spec.seed, outer_radius=resolve_outer_radius(spec, u.support_radius),
            tail_exponent=spec.tail_exponent, near_exponent=spec.near_exponent,
        )
        raw = estimate_weighted_integral_Rn(f, n=n, weight_exponent=b, spec=rspec,
                                            label=f"lpstar[{u.label}]")
    return _root(raw, pstar)


def norm_full(u: ScalarField, params: SpaceParams, spec: QuadratureSpec) -> NormReport:
    semi = seminorm_wspa(u, params, spec)
    lp = norm_lpstar_a(u, params, spec)
    return NormReport(
        seminorm=semi,
        lpstar=lp,
        full=semi.value + lp.value,
        params=params,
        field_id=u.label,
    )
