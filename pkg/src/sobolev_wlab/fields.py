"""Closed-form test fields, cutoff and mollifier profiles, and field algebra.

All scalar evaluators are vectorized: they take an array of shape (m, n)
and return an array of shape (m,).  Pair evaluators take two such arrays
(the x and y blocks) and return (m,).  Fields carry analytic metadata
(support radius, smoothness class, Lipschitz and sup bounds) as trusted
ground truth for the verification experiments; nothing is inferred
numerically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .errors import ParameterOutOfRange, UnknownCatalogId
from .params import SpaceParams

# max slope of exp(-1/(1-t^2)) on (0,1); frozen from a fine 1-d scan
_BUMP_PROFILE_LIP = 0.7984297518335549
# max slope of the smoothstep h(2-r)/(h(2-r)+h(r-1)) with h(t)=exp(-1/t)
_CUTOFF_PROFILE_LIP = 2.0


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    from scipy.special import gamma

    return 2.0 * np.pi ** (n / 2.0) / gamma(n / 2.0)


def ball_volume(n: int) -> float:
    return sphere_area(n) / n


@dataclass(frozen=True)
class ScalarField:
    label: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    support_radius: float  # np.inf for global support, 0.0 for the zero field
    smoothness: str  # "smooth" | "continuous" | "measurable"
    lipschitz_bound: Optional[float] = None
    sup_bound: Optional[float] = None

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.evaluator(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class PairField:
    label: str
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    support_radius: float  # radius in R^{2n}
    sup_bound: Optional[float] = None
    # radius such that the field vanishes when both blocks are outside it;
    # used to pick sampling truncation radii
    x_support_radius: float = np.inf

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.evaluator(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


def _radii(x: np.ndarray) -> np.ndarray:
    return np.linalg.norm(x, axis=-1)


def _bump_profile(t: np.ndarray) -> np.ndarray:
    """exp(-1/(1-t^2)) for |t| < 1, 0 beyond."""
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1.0
    tt = np.where(inside, t, 0.0)
    with np.errstate(over="ignore"):
        vals = np.exp(-1.0 / (1.0 - tt * tt))
    return np.where(inside, vals, 0.0)


def _bump_profile_deriv(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1.0
    tt = np.where(inside, t, 0.0)
    one = 1.0 - tt * tt
    vals = np.exp(-1.0 / one) * (-2.0 * tt / (one * one))
    return np.where(inside, vals, 0.0)


# ---------------------------------------------------------------------------
# catalog


def zero_field() -> ScalarField:
    return ScalarField(
        label="zero",
        evaluator=lambda x: np.zeros(x.shape[:-1]),
        support_radius=0.0,
        smoothness="smooth",
        lipschitz_bound=0.0,
        sup_bound=0.0,
    )


def constant_field(c: float) -> ScalarField:
    """Internal fixture: constant on all of R^n (not a member of the space)."""
    return ScalarField(
        label=f"constant(c={c})",
        evaluator=lambda x: np.full(x.shape[:-1], float(c)),
        support_radius=np.inf,
        smoothness="smooth",
        lipschitz_bound=0.0,
        sup_bound=abs(float(c)),
    )


def gaussian_field() -> ScalarField:
    return ScalarField(
        label="gaussian",
        evaluator=lambda x: np.exp(-np.sum(x * x, axis=-1)),
        support_radius=np.inf,
        smoothness="smooth",
        lipschitz_bound=np.sqrt(2.0) * np.exp(-0.5),
        sup_bound=1.0,
    )


def smooth_bump_field(R: float = 1.0) -> ScalarField:
    if R <= 0:
        raise ParameterOutOfRange(f"smooth_bump radius must be positive, got {R}")
    return ScalarField(
        label=f"smooth_bump(R={R})",
        evaluator=lambda x: _bump_profile(_radii(x) / R),
        support_radius=float(R),
        smoothness="smooth",
        lipschitz_bound=_BUMP_PROFILE_LIP / R,
        sup_bound=float(np.exp(-1.0)),
    )


def hat_1d_field() -> ScalarField:
    def ev(x: np.ndarray) -> np.ndarray:
        if x.shape[-1] != 1:
            raise ParameterOutOfRange("hat_1d is only defined in dimension 1")
        return np.maximum(0.0, 1.0 - np.abs(x[..., 0]))

    return ScalarField(
        label="hat_1d",
        evaluator=ev,
        support_radius=1.0,
        smoothness="continuous",
        lipschitz_bound=1.0,
        sup_bound=1.0,
    )


def polynomial_tail_field(gamma: float) -> ScalarField:
    if gamma <= 0:
        raise ParameterOutOfRange(f"polynomial_tail needs gamma > 0, got {gamma}")
    lip = (
        gamma
        / np.sqrt(gamma + 1.0)
        * (1.0 + 1.0 / (gamma + 1.0)) ** (-(gamma + 2.0) / 2.0)
    )
    return ScalarField(
        label=f"polynomial_tail(gamma={gamma})",
        evaluator=lambda x: (1.0 + np.sum(x * x, axis=-1)) ** (-gamma / 2.0),
        support_radius=np.inf,
        smoothness="smooth",
        lipschitz_bound=float(lip),
        sup_bound=1.0,
    )


def singular_spike_field(gamma: float, R: float, space: SpaceParams) -> ScalarField:
    """|x|^(-gamma) * bump(x/R): unbounded at the origin, compactly supported.

    gamma is capped at (n + b) / p_star so the weighted critical norm of the
    field stays finite and the field is a genuine member of the space.
    """
    if gamma <= 0:
        raise ParameterOutOfRange(f"singular_spike needs gamma > 0, got {gamma}")
    if R <= 0:
        raise ParameterOutOfRange(f"singular_spike needs R > 0, got {R}")
    cap = (space.n + space.b) / space.p_star
    if gamma >= cap:
        raise ParameterOutOfRange(
            f"singular_spike exponent gamma={gamma} must be below (n + b)/p_star = {cap}"
        )

    def ev(x: np.ndarray) -> np.ndarray:
        r = _radii(x)
        bump = _bump_profile(r / R)
        with np.errstate(divide="ignore", over="ignore"):
            spike = np.where(r > 0.0, r, 1.0) ** (-gamma)
        return np.where(r > 0.0, spike * bump, np.inf) * (bump > 0.0)

    return ScalarField(
        label=f"singular_spike(gamma={gamma},R={R})",
        evaluator=ev,
        support_radius=float(R),
        smoothness="measurable",
        lipschitz_bound=None,
        sup_bound=None,
    )


_CATALOG_IDS = ("zero", "gaussian", "smooth_bump", "hat_1d", "polynomial_tail", "singular_spike")

_FIELD_SPEC_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*$")


def parse_field_spec(text: str) -> tuple[str, dict]:
    """Parse 'name' or 'name(key=1.0, key2=2)' into (name, {key: float})."""
    m = _FIELD_SPEC_RE.match(text)
    if not m:
        raise UnknownCatalogId(f"cannot parse field spec {text!r}")
    name, args = m.group(1), m.group(2)
    kwargs: dict = {}
    if args and args.strip():
        for part in args.split(","):
            if "=" not in part:
                raise UnknownCatalogId(f"malformed parameter {part!r} in {text!r}")
            key, val = part.split("=", 1)
            try:
                kwargs[key.strip()] = float(val)
            except ValueError as exc:
                raise UnknownCatalogId(f"non-numeric parameter in {text!r}") from exc
    return name, kwargs


def make_field(name: str, space: Optional[SpaceParams] = None, **kwargs) -> ScalarField:
    """Construct a catalog field by id.  ``space`` is required for singular_spike."""
    if name == "zero":
        return zero_field()
    if name == "gaussian":
        return gaussian_field()
    if name == "smooth_bump":
        return smooth_bump_field(R=kwargs.pop("R", 1.0))
    if name == "hat_1d":
        return hat_1d_field()
    if name == "polynomial_tail":
        return polynomial_tail_field(gamma=kwargs.pop("gamma"))
    if name == "singular_spike":
        if space is None:
            raise ParameterOutOfRange("singular_spike needs space parameters for its exponent cap")
        return singular_spike_field(kwargs.pop("gamma"), kwargs.pop("R", 1.0), space)
    raise UnknownCatalogId(f"unknown catalog id {name!r} (known: {', '.join(_CATALOG_IDS)})")


def field_from_spec(text: str, space: Optional[SpaceParams] = None) -> ScalarField:
    name, kwargs = parse_field_spec(text)
    return make_field(name, space=space, **kwargs)


# ---------------------------------------------------------------------------
# field algebra


def scale_values(u: ScalarField, c: float) -> ScalarField:
    return ScalarField(
        label=f"scale({c},{u.label})",
        evaluator=lambda x, _u=u, _c=c: _c * _u(x),
        support_radius=u.support_radius if c != 0 else 0.0,
        smoothness=u.smoothness,
        lipschitz_bound=None if u.lipschitz_bound is None else abs(c) * u.lipschitz_bound,
        sup_bound=None if u.sup_bound is None else abs(c) * u.sup_bound,
    )


def dilate(u: ScalarField, lam: float) -> ScalarField:
    """x -> u(lam * x)."""
    if lam <= 0:
        raise ParameterOutOfRange(f"dilation factor must be positive, got {lam}")
    return ScalarField(
        label=f"dilate({lam},{u.label})",
        evaluator=lambda x, _u=u, _l=lam: _u(_l * x),
        support_radius=u.support_radius / lam,
        smoothness=u.smoothness,
        lipschitz_bound=None if u.lipschitz_bound is None else lam * u.lipschitz_bound,
        sup_bound=u.sup_bound,
    )


def subtract(u: ScalarField, w: ScalarField) -> ScalarField:
    lip = None
    if u.lipschitz_bound is not None and w.lipschitz_bound is not None:
        lip = u.lipschitz_bound + w.lipschitz_bound
    sup = None
    if u.sup_bound is not None and w.sup_bound is not None:
        sup = u.sup_bound + w.sup_bound
    order = {"smooth": 0, "continuous": 1, "measurable": 2}
    smoothness = max(u.smoothness, w.smoothness, key=lambda s: order[s])
    return ScalarField(
        label=f"sub({u.label},{w.label})",
        evaluator=lambda x, _u=u, _w=w: _u(x) - _w(x),
        support_radius=max(u.support_radius, w.support_radius),
        smoothness=smoothness,
        lipschitz_bound=lip,
        sup_bound=sup,
    )


def pair_constant(c: float) -> PairField:
    return PairField(
        label=f"pair_constant(c={c})",
        evaluator=lambda x, y: np.full(x.shape[:-1], float(c)),
        support_radius=np.inf,
        sup_bound=abs(float(c)),
    )


def pair_subtract(v: PairField, w: PairField) -> PairField:
    sup = None
    if v.sup_bound is not None and w.sup_bound is not None:
        sup = v.sup_bound + w.sup_bound
    return PairField(
        label=f"sub({v.label},{w.label})",
        evaluator=lambda x, y, _v=v, _w=w: _v(x, y) - _w(x, y),
        support_radius=max(v.support_radius, w.support_radius),
        sup_bound=sup,
        x_support_radius=max(v.x_support_radius, w.x_support_radius),
    )


def lift_difference_quotient(u: ScalarField, params: SpaceParams) -> PairField:
    """(u(x) - u(y)) / |x-y|^(n/p + s), with value 0 on the exact diagonal.

    The diagonal convention is for totality only: the samplers never emit
    z = 0, and the diagonal has measure zero.
    """
    exponent = params.n / params.p + params.s

    def ev(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        d = np.linalg.norm(x - y, axis=-1)
        off = d > 0.0
        dd = np.where(off, d, 1.0)
        vals = (u(x) - u(y)) * dd ** (-exponent)
        return np.where(off, vals, 0.0)

    return PairField(
        label=f"lift({u.label};n/p+s={exponent})",
        evaluator=ev,
        support_radius=np.inf,
        sup_bound=None,
        x_support_radius=u.support_radius,
    )


def clip_to_level(v: PairField, M: float) -> PairField:
    if M <= 0:
        raise ParameterOutOfRange(f"clip level must be positive, got {M}")
    sup = float(M) if v.sup_bound is None else min(float(M), v.sup_bound)
    return PairField(
        label=f"clip({M},{v.label})",
        evaluator=lambda x, y, _v=v, _m=float(M): np.clip(_v(x, y), -_m, _m),
        support_radius=v.support_radius,
        sup_bound=sup,
        x_support_radius=v.x_support_radius,
    )


# ---------------------------------------------------------------------------
# cutoff and mollifier profiles


@dataclass(frozen=True)
class CutoffProfile:
    """Smooth radial profile with value 1 on B_1 and 0 outside B_2."""

    radial: Callable[[np.ndarray], np.ndarray]
    lipschitz_bound: float

    def base(self, x: np.ndarray) -> np.ndarray:
        return self.radial(_radii(np.asarray(x, dtype=float)))


def default_cutoff() -> CutoffProfile:
    def radial(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        lo = r <= 1.0
        hi = r >= 2.0
        mid = ~(lo | hi)
        rr = np.where(mid, r, 1.5)
        ha = np.exp(-1.0 / (2.0 - rr))
        hb = np.exp(-1.0 / (rr - 1.0))
        vals = ha / (ha + hb)
        return np.where(lo, 1.0, np.where(hi, 0.0, vals))

    return CutoffProfile(radial=radial, lipschitz_bound=_CUTOFF_PROFILE_LIP)


def cutoff_tau_j(profile: CutoffProfile, j: float) -> ScalarField:
    """Rescaled cutoff: 1 on B_j, 0 outside B_{2j}, values in [0,1]."""
    if j <= 0:
        raise ParameterOutOfRange(f"cutoff scale j must be positive, got {j}")
    return ScalarField(
        label=f"tau_j(j={j})",
        evaluator=lambda x, _p=profile, _j=float(j): _p.radial(_radii(x) / _j),
        support_radius=2.0 * float(j),
        smoothness="smooth",
        lipschitz_bound=profile.lipschitz_bound / float(j),
        sup_bound=1.0,
    )


def multiply_cutoff(u: ScalarField, tau: ScalarField) -> ScalarField:
    """Pointwise product tau * u (the truncation operator)."""
    lip = None
    if u.lipschitz_bound is not None and u.sup_bound is not None and tau.lipschitz_bound is not None:
        lip = u.lipschitz_bound + u.sup_bound * tau.lipschitz_bound
    order = {"smooth": 0, "continuous": 1, "measurable": 2}
    return ScalarField(
        label=f"mul({tau.label},{u.label})",
        evaluator=lambda x, _u=u, _t=tau: _u(x) * _t(x),
        support_radius=min(u.support_radius, tau.support_radius),
        smoothness=max(u.smoothness, tau.smoothness, key=lambda s: order[s]),
        lipschitz_bound=lip,
        sup_bound=u.sup_bound,
    )


@dataclass(frozen=True)
class MollifierProfile:
    """Radial unit-mass profile supported in B_1, for a fixed dimension n.

    ``radial_profile`` and ``derivative`` are the *unnormalized* shape g and
    g'; the normalized density is normalization_constant * g(|x|).
    """

    n: int
    radial_profile: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    normalization_constant: float

    def eta(self, x: np.ndarray) -> np.ndarray:
        """Normalized density at points of R^n."""
        return self.normalization_constant * self.radial_profile(_radii(np.asarray(x, float)))

    def eta_radial(self, r: np.ndarray) -> np.ndarray:
        return self.normalization_constant * self.radial_profile(np.asarray(r, float))


def _profile_from_shape(n: int, g, gp) -> MollifierProfile:
    radial_mass, err = quad(lambda r: r ** (n - 1) * float(g(np.array([r]))[0]), 0.0, 1.0, epsrel=1e-10)
    const = 1.0 / (sphere_area(n) * radial_mass)
    return MollifierProfile(n=n, radial_profile=g, derivative=gp, normalization_constant=const)


def default_mollifier(n: int) -> MollifierProfile:
    """Smooth radially decreasing bump exp(-1/(1-r^2)), normalized for R^n."""
    return _profile_from_shape(n, _bump_profile, _bump_profile_deriv)


def wiggle_mollifier(n: int) -> MollifierProfile:
    """Non-monotone but nonnegative profile vanishing at r=1 (negative control)."""

    def g(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return _bump_profile(r) * (1.0 + 0.5 * np.sin(6.0 * np.pi * r))

    def gp(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return _bump_profile_deriv(r) * (1.0 + 0.5 * np.sin(6.0 * np.pi * r)) + _bump_profile(
            r
        ) * 3.0 * np.pi * np.cos(6.0 * np.pi * r)

    return _profile_from_shape(n, g, gp)


def mollifier_eta(profile: MollifierProfile, epsilon: float, n: int) -> ScalarField:
    """The rescaled mollifier eta_eps(x) = eps^(-n) eta(x/eps) as a field."""
    if epsilon <= 0:
        raise ParameterOutOfRange(f"mollifier scale must be positive, got {epsilon}")
    if n != profile.n:
        raise ParameterOutOfRange(f"profile was normalized for n={profile.n}, requested n={n}")
    scale = epsilon ** (-n)
    return ScalarField(
        label=f"eta_eps(eps={epsilon},n={n})",
        evaluator=lambda x, _p=profile, _e=float(epsilon), _s=scale: _s * _p.eta(x / _e),
        support_radius=float(epsilon),
        smoothness="smooth",
        lipschitz_bound=None,
        sup_bound=float(scale * profile.normalization_constant * np.exp(-1.0)),
    )


def eta_derivative_identity_check(profile: MollifierProfile, n: int, resolution: int) -> float:
    """Residual of the radial integration-by-parts identity of the profile.

    Compares -int_0^1 r^n g'(r) dr against n * int_0^1 r^(n-1) g(r) dr by
    composite midpoint quadrature at the given resolution.  For radially
    decreasing profiles -g' = |g'|; the signed form is used so that the
    identity also holds for non-monotone profiles with g(1) = 0.
    """
    if resolution < 16:
        raise ParameterOutOfRange("resolution must be at least 16")
    h = 1.0 / resolution
    r = (np.arange(resolution) + 0.5) * h
    lhs = -np.sum(r**n * profile.derivative(r)) * h
    rhs = n * np.sum(r ** (n - 1) * profile.radial_profile(r)) * h
    return float(abs(lhs - rhs))
