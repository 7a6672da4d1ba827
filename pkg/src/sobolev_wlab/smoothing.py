"""Approximation operators: truncation, mollification, diagonal-shift
convolution, and the cutoff-then-mollify pipeline.

Convolutions are deterministic quadrature (graded radial grid times an
angular rule), not Monte Carlo: their output is re-integrated by the norm
estimators, so pointwise noise must be negligible.  The discrete mollifier
weights are normalized to total mass exactly 1, which makes reproduction
of constants exact and keeps the unit-mass contract independent of the
grid resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ParameterOutOfRange, QuadratureFailure
from .fields import (
    CutoffProfile,
    MollifierProfile,
    PairField,
    ScalarField,
    cutoff_tau_j,
    multiply_cutoff,
)

DEFAULT_CONV_GRID = 256


@dataclass(frozen=True)
class SmoothingConfig:
    conv_grid: int = DEFAULT_CONV_GRID
    j: float = 1.0
    epsilon: float = 0.1

    def __post_init__(self):
        if self.conv_grid < 32:
            raise ParameterOutOfRange("convolution grid must have at least 32 radial points")
        if self.j <= 0 or self.epsilon <= 0:
            raise ParameterOutOfRange("pipeline scales j and epsilon must be positive")


def truncate(u: ScalarField, j: float, profile: CutoffProfile) -> ScalarField:
    """tau_j * u: equals u on B_j, vanishes outside B_{2j}."""
    return multiply_cutoff(u, cutoff_tau_j(profile, j))


def _radial_cells(epsilon: float, m: int):
    """Mildly graded radial cells on (0, epsilon] (finer toward 0)."""
    floor = 1e-6 * epsilon
    q = max((floor / epsilon) ** (1.0 / m), 1.0 / 1.15)
    bounds = epsilon * q ** np.arange(m, -1, -1)
    mids = 0.5 * (bounds[:-1] + bounds[1:])
    widths = np.diff(bounds)
    mids = np.concatenate([[0.5 * bounds[0]], mids])
    widths = np.concatenate([[bounds[0]], widths])
    return mids, widths


_node_cache: dict = {}


def conv_nodes(profile: MollifierProfile, epsilon: float, n: int, m: int):
    """Quadrature nodes Z (K, n) and weights W (K,) for integration against
    eta_eps over B_eps, with sum(W) == 1 exactly."""
    key = (id(profile), float(epsilon), n, m)
    if key in _node_cache:
        return _node_cache[key]
    if n != profile.n:
        raise ParameterOutOfRange(f"profile normalized for n={profile.n}, requested n={n}")
    r, wr = _radial_cells(epsilon, m)
    eta_vals = profile.eta_radial(r / epsilon)  # eps^-n absorbed by normalization below
    if n == 1:
        z = np.concatenate([r, -r])[:, None]
        w = np.concatenate([wr * eta_vals, wr * eta_vals])
    elif n == 2:
        angles = 2.0 * np.pi * (np.arange(64) + 0.5) / 64.0
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)  # (64, 2)
        z = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 2)
        w = (wr * r * eta_vals)[:, None].repeat(64, axis=1).reshape(-1)
    elif n == 3:
        mu, wmu = leggauss(8)
        phi = 2.0 * np.pi * (np.arange(16) + 0.5) / 16.0
        sin_t = np.sqrt(1.0 - mu**2)
        dirs = np.stack(
            [
                np.outer(sin_t, np.cos(phi)).ravel(),
                np.outer(sin_t, np.sin(phi)).ravel(),
                np.repeat(mu, 16),
            ],
            axis=1,
        )  # (128, 3)
        wdir = np.repeat(wmu, 16) / 16.0  # angular weights, total 2 over mu x full phi
        z = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
        w = ((wr * r**2 * eta_vals)[:, None] * wdir[None, :]).reshape(-1)
    else:
        raise ParameterOutOfRange(
            f"deterministic convolution is implemented for n <= 3, got n={n}"
        )
    w = w / np.sum(w)  # exact unit mass
    _node_cache[key] = (z, w)
    return z, w


def convolve(
    u: ScalarField,
    epsilon: float,
    profile: MollifierProfile,
    x: np.ndarray,
    conv_grid: int = DEFAULT_CONV_GRID,
) -> np.ndarray:
    """(u * eta_eps)(x) for an array of points x of shape (m, n).

    Exact 0 whenever dist(x, supp u) > eps (short-circuited by radius)."""
    if epsilon <= 0:
        raise ParameterOutOfRange(f"epsilon must be positive, got {epsilon}")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n = x.shape[-1]
    z, w = conv_nodes(profile, epsilon, n, conv_grid)
    out = np.zeros(x.shape[0])
    active = np.linalg.norm(x, axis=1) <= u.support_radius + epsilon
    if np.any(active):
        pts = x[active][:, None, :] - z[None, :, :]  # (ma, K, n)
        vals = u(pts.reshape(-1, n)).reshape(-1, z.shape[0])
        out[active] = vals @ w
    return out


def convolve_field(
    u: ScalarField,
    epsilon: float,
    profile: MollifierProfile,
    conv_grid: int = DEFAULT_CONV_GRID,
) -> ScalarField:
    """u * eta_eps as a ScalarField (smooth, support enlarged by eps)."""
    return ScalarField(
        label=f"conv(eps={epsilon},{u.label})",
        evaluator=lambda x, _u=u, _e=float(epsilon), _p=profile, _m=conv_grid: convolve(
            _u, _e, _p, x, _m
        ),
        support_radius=u.support_radius + epsilon,
        smoothness="smooth",
        lipschitz_bound=u.lipschitz_bound,
        sup_bound=u.sup_bound,
    )


def star_convolve(
    v: PairField,
    profile: MollifierProfile,
    epsilon: float,
    x: np.ndarray,
    y: np.ndarray,
    conv_grid: int = DEFAULT_CONV_GRID,
) -> np.ndarray:
    """Diagonal-shift convolution: int v(x - z, y - z) eta_eps(z) dz."""
    if epsilon <= 0:
        raise ParameterOutOfRange(f"epsilon must be positive, got {epsilon}")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    n = x.shape[-1]
    z, w = conv_nodes(profile, epsilon, n, conv_grid)
    px = (x[:, None, :] - z[None, :, :]).reshape(-1, n)
    py = (y[:, None, :] - z[None, :, :]).reshape(-1, n)
    vals = v(px, py).reshape(-1, z.shape[0])
    return vals @ w


def star_convolve_field(
    v: PairField,
    profile: MollifierProfile,
    epsilon: float,
    conv_grid: int = DEFAULT_CONV_GRID,
) -> PairField:
    return PairField(
        label=f"star(eps={epsilon},{v.label})",
        evaluator=lambda x, y, _v=v, _p=profile, _e=float(epsilon), _m=conv_grid: star_convolve(
            _v, _p, _e, x, y, _m
        ),
        support_radius=v.support_radius + epsilon,
        sup_bound=v.sup_bound,
        x_support_radius=v.x_support_radius + epsilon,
    )


def check_convolution_stability(
    u: ScalarField,
    epsilon: float,
    profile: MollifierProfile,
    probes: np.ndarray,
    conv_grid: int = DEFAULT_CONV_GRID,
    rel_tol: float = 1e-4,
) -> float:
    """Compare conv_grid against conv_grid//2 at probe points; raise
    QuadratureFailure if the relative deviation exceeds rel_tol."""
    fine = convolve(u, epsilon, profile, probes, conv_grid)
    half = convolve(u, epsilon, profile, probes, conv_grid // 2)
    scale = max(float(np.max(np.abs(fine))), 1e-300)
    dev = float(np.max(np.abs(fine - half))) / scale
    if dev > rel_tol:
        raise QuadratureFailure(
            f"convolution did not stabilize: relative deviation {dev} > {rel_tol}"
        )
    return dev


def pipeline_rho(
    u: ScalarField,
    j: float,
    epsilon: float,
    cutoff: CutoffProfile,
    mollifier: MollifierProfile,
    conv_grid: int = DEFAULT_CONV_GRID,
) -> ScalarField:
    """rho_eps = (tau_j u) * eta_eps: smooth with compact support.

    Evaluation short-circuits by a distance check, so points outside
    min(2j, supp u) + eps return exactly 0."""
    truncated = truncate(u, j, cutoff)
    support = min(2.0 * j, u.support_radius) + epsilon

    def ev(x: np.ndarray) -> np.ndarray:
        return convolve(truncated, epsilon, mollifier, x, conv_grid)

    return ScalarField(
        label=f"rho(j={j},eps={epsilon},{u.label})",
        evaluator=ev,
        support_radius=support,
        smoothness="smooth",
        lipschitz_bound=truncated.lipschitz_bound,
        sup_bound=u.sup_bound,
    )
