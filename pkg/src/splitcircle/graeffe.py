"""
Graeffe root squaring and the certified root-modulus estimators built on it.

All estimators follow the same pattern: normalise the polynomial so its
k-th root modulus is known to within a factor polynomial in n, round it as
coarsely as the perturbation bounds allow, square the roots with one Graeffe
step and repeat until the accumulated bracket is tighter than requested.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence

import mpmath

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import PrecisionExhausted
from .numeric import (
    TOL,
    Poly,
    Precision,
    bits_for,
    dilate,
    l1_norm,
    multiply,
    reciprocal,
    round_rel,
    subtract,
    tolerance,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnvelopeScaling:
    """
    Corners ell < k <= h of the coefficient envelope and the power-of-two
    dilation 2**beta that levels them.
    """

    ell: int
    h: int
    beta: int

    @property
    def rho(self) -> Any:
        return TOL.ldexp(1, self.beta)


@dataclass(frozen=True)
class ModulusEstimate:
    """
    Certified bracket value*e^-tau <= modulus <= value*e^tau.
    """

    value: Any
    tau: Any

    @property
    def lower(self) -> Any:
        return self.value * TOL.exp(-self.tau)

    @property
    def upper(self) -> Any:
        return self.value * TOL.exp(self.tau)

    def brackets(self, modulus: Any) -> bool:
        return self.lower <= modulus <= self.upper


def working_precision(degree: int, smallest_eps: Any, config: SolverConfig) -> Precision:
    """
    Width needed to carry perturbations of relative size ``smallest_eps`` through
    Graeffe steps, which can amplify relative error by 2**(2n).
    """
    bits = bits_for(smallest_eps) + 2 * degree + config.guard_bits
    ceiling = config.precision_ceiling(degree)
    if bits > ceiling:
        raise PrecisionExhausted(bits=bits, ceiling=ceiling)
    return Precision.covering(bits, config.precision_bits)


def graeffe(poly: Poly, prec: Optional[Precision] = None) -> Poly:
    """
    One root-squaring step: Q = (-1)^n (A^2 - z B^2) where P(x) = A(x^2) + x B(x^2),
    so that Q(x^2) = (-1)^n P(x) P(-x) and Q is monic whenever P is.
    """
    if poly.degree < 1:
        raise ValueError("graeffe needs a polynomial of degree at least 1")
    prec = prec or poly.precision
    ctx = prec.context
    even = Poly(poly.coeffs[0::2], prec.bits)
    odd = Poly(poly.coeffs[1::2], prec.bits)
    even_sq = multiply(even, even, prec)
    odd_sq = multiply(odd, odd, prec)
    shifted = Poly((ctx.mpc(0),) + odd_sq.coeffs, prec.bits)
    if poly.degree % 2:
        return subtract(shifted, even_sq, prec)
    return subtract(even_sq, shifted, prec)


def _nrd_tolerance(degree: int, tau: Any) -> Any:
    return TOL.ldexp(1, -4 * degree) * tau**degree * TOL.exp(-3 * degree * tau / 2)


def nrd(poly: Poly, radius: Any, tau: Any, config: Optional[SolverConfig] = None) -> int:
    """
    Number of roots in the disk |z| < radius, up to a multiplicative slack e^tau.

    Returns k with rho_k * e^-tau < radius < rho_{k+1} * e^tau, where rho_j is
    the j-th smallest root modulus (rho_0 = 0, rho_{n+1} = infinity).
    """
    config = config or DEFAULT_CONFIG
    n = poly.degree
    if n < 1:
        raise ValueError("nrd needs a polynomial of degree at least 1")
    radius, tau = tolerance(radius), tolerance(tau)
    if radius <= 0 or tau <= 0:
        raise ValueError("radius and tau must be positive")
    if n == 1:
        root = abs(poly.coeff(0)) / abs(poly.coeff(1))
        return 1 if root < radius else 0

    taus = [tau]
    limit = TOL.log(2 * n)
    while 3 * taus[-1] / 4 < limit:
        taus.append(taus[-1] * 3 / 2)
    epsilons = [_nrd_tolerance(n, t) for t in taus]
    prec = working_precision(n, min(epsilons), config)

    current = round_rel(dilate(poly, radius, prec), epsilons[0] / 2, prec)
    for eps in epsilons[1:]:
        current = round_rel(graeffe(current, prec), eps / 2, prec)

    magnitudes = [abs(c) for c in current.coeffs]
    count = max(range(len(magnitudes)), key=magnitudes.__getitem__)
    logger.debug(
        "nrd: degree %d radius %s tau %s -> %d roots (%d Graeffe steps, %d bits)",
        n,
        mpmath.nstr(radius, 6),
        mpmath.nstr(tau, 4),
        count,
        len(taus) - 1,
        prec.bits,
    )
    return count


def lower_convex_envelope(points: Iterable[tuple[int, Any]]) -> list[int]:
    """
    Corner indices of the envelope of (j, y_j) lying on or above every point,
    i.e. the Newton polygon of -log|a_j|. Points with y_j = -inf never become
    corners, neither do points lying on a segment between two corners.
    """
    finite = sorted(
        ((j, y) for j, y in points if y is not None and mpmath.isfinite(y)),
        key=lambda point: point[0],
    )
    if not finite:
        raise ValueError("at least one finite point is required")
    hull: list[tuple[int, Any]] = []
    for j, y in finite:
        while len(hull) >= 2:
            (j0, y0), (j1, y1) = hull[-2], hull[-1]
            if (j1 - j0) * (y - y0) - (j - j0) * (y1 - y0) >= 0:
                hull.pop()
            else:
                break
        hull.append((j, y))
    return [j for j, _ in hull]


def envelope_scaling(poly: Poly, k: int) -> EnvelopeScaling:
    """
    Pick adjacent envelope corners ell < k <= h and the dilation 2**beta making
    |a_ell| and |a_h| nearly equal; afterwards 1/(3n) < rho_k < 3n.
    """
    ctx = poly.precision.context
    heights = [(j, ctx.log(abs(c), 2)) for j, c in enumerate(poly.coeffs) if c != 0]
    corners = lower_convex_envelope(heights)
    below = [c for c in corners if c < k]
    above = [c for c in corners if c >= k]
    if not below or not above:
        raise ValueError(f"no envelope corners around index {k}")
    ell, h = below[-1], above[0]
    log_ratio = ctx.log(abs(poly.coeff(ell)) / abs(poly.coeff(h)), 2)
    beta = int(ctx.floor(log_ratio / (h - ell) + ctx.mpf(1) / 2))
    return EnvelopeScaling(ell=ell, h=h, beta=beta)


def _iterations(degree_term: Any, tau: Any) -> int:
    """Smallest M >= 0 with 2**-M * degree_term < tau/2."""
    m = 0
    while TOL.ldexp(degree_term, -m) >= tau / 2:
        m += 1
    return m


def _linear_modulus(poly: Poly, tau: Any) -> ModulusEstimate:
    return ModulusEstimate(TOL.mpf(abs(poly.coeff(0)) / abs(poly.coeff(1))), tau)


def mod_k(poly: Poly, k: int, tau: Any, config: Optional[SolverConfig] = None) -> ModulusEstimate:
    """
    Estimate the k-th smallest root modulus within a factor e^tau.
    """
    config = config or DEFAULT_CONFIG
    n = poly.degree
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}, got {k}")
    tau = tolerance(tau)
    if tau <= 0:
        raise ValueError("tau must be positive")
    if all(poly.coeff(j) == 0 for j in range(k)):
        return ModulusEstimate(TOL.mpf(0), tau)
    if n == 1:
        return _linear_modulus(poly, tau)

    steps = _iterations(TOL.log(3 * n), tau)
    taus = [tau / 8 * TOL.mpf(1.5) ** m for m in range(steps)]
    epsilons = [
        TOL.ldexp(1, -(n + 1)) * TOL.mpf(3 * n) ** (-n) * t**n * TOL.exp(-3 * n * t / 2) for t in taus
    ]
    prec = working_precision(n, min(epsilons) if epsilons else TOL.mpf(1), config)

    log2_value = TOL.mpf(0)
    current = Poly(poly.coeffs, prec.bits)
    for m in range(steps + 1):
        scaling = envelope_scaling(current, k)
        log2_value += TOL.ldexp(scaling.beta, -m)
        current = dilate(current, scaling.rho, prec)
        if m == steps:
            break
        current = graeffe(round_rel(current, epsilons[m] / 2, prec), prec)

    value = TOL.power(2, log2_value)
    logger.debug("mod_k: k=%d of degree %d -> %s (%d steps)", k, n, mpmath.nstr(value, 8), steps)
    return ModulusEstimate(value, tau)


def binomial_scaling(poly: Poly) -> int:
    """
    Exponent beta such that P(2**beta x) satisfies
    |a_{n-j}| <= 2**j C(n,j) |a_n| for all j and |a_{n-h}| >= C(n,h) |a_n| for some h,
    which places the largest root modulus in [1, 4n].
    """
    ctx = poly.precision.context
    n = poly.degree
    lead = abs(poly.leading)
    best = None
    for j in range(1, n + 1):
        a = poly.coeff(n - j)
        if a == 0:
            continue
        slope = ctx.log(abs(a) / (lead * math.comb(n, j)), 2) / j
        if best is None or slope > best:
            best = slope
    beta = int(ctx.floor(best))

    for _ in range(8):
        scaled = [(j, ctx.ldexp(abs(poly.coeff(n - j)), -j * beta)) for j in range(1, n + 1)]
        upper_ok = all(size <= ctx.ldexp(math.comb(n, j) * lead, j) for j, size in scaled)
        lower_ok = any(size >= math.comb(n, j) * lead for j, size in scaled)
        if upper_ok and lower_ok:
            break
        beta += -1 if upper_ok else 1
    return beta


def mod_max(poly: Poly, tau: Any, config: Optional[SolverConfig] = None) -> ModulusEstimate:
    """
    Estimate the largest root modulus within a factor e^tau.
    """
    config = config or DEFAULT_CONFIG
    n = poly.degree
    if n < 1:
        raise ValueError("mod_max needs a polynomial of degree at least 1")
    tau = tolerance(tau)
    if tau <= 0:
        raise ValueError("tau must be positive")
    if all(poly.coeff(j) == 0 for j in range(n)):
        return ModulusEstimate(TOL.mpf(0), tau)
    if n == 1:
        return _linear_modulus(poly, tau)

    steps = _iterations(TOL.log(4 * n), tau)
    taus = [tau / 8 * TOL.mpf(1.5) ** m for m in range(steps)]
    # |P~| <= 3^n |lead| after binomial scaling, so this bounds the relative tolerance.
    floors = [TOL.mpf(3) ** (-n) * t**n * TOL.exp(-n * t) / 2 for t in taus]
    prec = working_precision(n, min(floors) if floors else TOL.mpf(1), config)

    log2_value = TOL.mpf(0)
    current = Poly(poly.coeffs, prec.bits)
    for m in range(steps + 1):
        beta = binomial_scaling(current)
        log2_value += TOL.ldexp(beta, -m)
        current = dilate(current, TOL.ldexp(1, beta), prec)
        if m == steps:
            break
        t = taus[m]
        absolute = abs(current.leading) * t**n * TOL.exp(-n * t)
        current = graeffe(round_rel(current, absolute / (2 * l1_norm(current)), prec), prec)

    value = TOL.power(2, log2_value)
    logger.debug("mod_max: degree %d -> %s (%d steps)", n, mpmath.nstr(value, 8), steps)
    return ModulusEstimate(value, tau)


def mod_min(poly: Poly, tau: Any, config: Optional[SolverConfig] = None) -> ModulusEstimate:
    """
    Estimate the smallest root modulus within a factor e^tau (0 when a_0 = 0).
    """
    if poly.degree < 1:
        raise ValueError("mod_min needs a polynomial of degree at least 1")
    tau = tolerance(tau)
    if poly.coeff(0) == 0:
        return ModulusEstimate(TOL.mpf(0), tau)
    largest = mod_max(reciprocal(poly), tau, config)
    return ModulusEstimate(1 / largest.value, tau)
