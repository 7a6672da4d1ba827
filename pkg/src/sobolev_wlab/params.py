"""Space parameters, admissibility checks and the power weights.

The admissible parameter tuple is (n, s, p, a) with s in (0,1), p in
(1,inf), s*p < n and 0 <= a < (n - s*p)/2.  The derived exponents

    p_star = n*p / (n - s*p)        (critical integrability exponent)
    b      = 2*a*p_star / p         (weight exponent on the point norm)

are computed once at validation time and carried around, so every
downstream formula reads them from a single source.

Range checks are strict: boundary inputs are rejected with no epsilon
slack, because the estimates degenerate exactly at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import RangeViolation


@dataclass(frozen=True)
class SpaceParams:
    n: int
    s: float
    p: float
    a: float
    p_star: float
    b: float

    @property
    def sp(self) -> float:
        return self.s * self.p

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "s": self.s,
            "p": self.p,
            "a": self.a,
            "p_star": self.p_star,
            "b": self.b,
        }


@dataclass(frozen=True)
class GeneralWeightParams:
    alpha: float
    beta: float


class WeightKind(Enum):
    """The two concrete instantiations of the abstract weight Theta.

    PAIR acts on R^{2n} with Theta(x, y) = |x|^a |y|^a and diagonal shift
    map z -> (z, z); POINT acts on R^n with Theta(x) = |x|^b and identity
    shift map.
    """

    PAIR = "pair"
    POINT = "point"


def validate_params(n: int, s: float, p: float, a: float) -> SpaceParams:
    """Check (n, s, p, a) and return them with derived exponents attached."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise RangeViolation("n >= 1", f"dimension must be a positive integer, got {n!r}")
    if not (0.0 < s < 1.0):
        raise RangeViolation("0 < s < 1", f"fractional order s={s}")
    if not (p > 1.0):
        raise RangeViolation("p > 1", f"integrability exponent p={p}")
    if not (s * p < n):
        raise RangeViolation("s*p < n", f"s*p = {s * p} must be strictly below n = {n}")
    half_gap = (n - s * p) / 2.0
    if not (0.0 <= a < half_gap):
        raise RangeViolation(
            "0 <= a < (n - s*p)/2",
            f"a={a} outside [0, {half_gap})",
        )
    p_star = n * p / (n - s * p)
    b = 2.0 * a * p_star / p
    return SpaceParams(n=int(n), s=float(s), p=float(p), a=float(a), p_star=p_star, b=b)


def validate_general_weights(params: SpaceParams, alpha: float, beta: float) -> GeneralWeightParams:
    """Check the two-weight exponents: -s*p < alpha, beta < n and alpha + beta < n."""
    sp = params.sp
    if not (-sp < alpha < params.n):
        raise RangeViolation("-s*p < alpha < n", f"alpha={alpha} outside ({-sp}, {params.n})")
    if not (-sp < beta < params.n):
        raise RangeViolation("-s*p < beta < n", f"beta={beta} outside ({-sp}, {params.n})")
    if not (alpha + beta < params.n):
        raise RangeViolation("alpha + beta < n", f"alpha+beta={alpha + beta} >= n={params.n}")
    return GeneralWeightParams(alpha=float(alpha), beta=float(beta))


def weight_value(kind: WeightKind, params: SpaceParams, point: np.ndarray) -> np.ndarray:
    """Evaluate Theta at points of R^N (N = 2n for PAIR, N = n for POINT).

    Total on R^N with extended-real codomain: at a point where a weighted
    coordinate block is exactly zero and the exponent is positive, the
    value is +inf by convention (so the reciprocal, which is what the
    integrands use, is 0 there).  Zero exponents give identically 1.

    ``point`` may be a single vector of length N or an array of shape
    (..., N); the result has the leading shape.
    """
    pt = np.asarray(point, dtype=float)
    n = params.n
    if kind is WeightKind.PAIR:
        if pt.shape[-1] != 2 * n:
            raise ValueError(f"expected last axis of size {2 * n}, got {pt.shape}")
        rx = np.linalg.norm(pt[..., :n], axis=-1)
        ry = np.linalg.norm(pt[..., n:], axis=-1)
        return _pow_weight(rx, params.a) * _pow_weight(ry, params.a)
    if pt.shape[-1] != n:
        raise ValueError(f"expected last axis of size {n}, got {pt.shape}")
    r = np.linalg.norm(pt, axis=-1)
    return _pow_weight(r, params.b)


def _pow_weight(r: np.ndarray, exponent: float) -> np.ndarray:
    if exponent == 0.0:
        return np.ones_like(r)
    with np.errstate(divide="ignore"):
        out = np.where(r > 0.0, r, 1.0) ** exponent
    return np.where(r > 0.0, out, np.inf)
