"""
Factor extraction from a unit splitting circle.

Given P with exactly k roots inside the unit circle and none in the annulus
e^-delta < |z| < e^delta, discretised contour integrals give the power sums of
the inside roots (hence an initial factor F0 via Newton's identities) and an
initial auxiliary polynomial H0 with H0*G0 = 1 mod F0. Newton-Schoenhage steps
then refine F0 until |P - F*G| < eps*|P|.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, Optional, Sequence

import mpmath

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import PrecisionExhausted, SampleSingular, SplitFailed
from .numeric import (
    TOL,
    Poly,
    Precision,
    add,
    bits_for,
    derivative,
    divrem,
    fft,
    l1_norm,
    mod,
    mulmod,
    relative_residual,
    subtract,
    tolerance,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FactorPair:
    """
    Approximate factors with the relative residual |P - F*G|/|P| they were verified at.
    """

    F: Poly
    G: Poly
    residual: Any


@dataclass(frozen=True)
class ContourSums:
    """
    W[m-1] approximates the m-th power sum of the inside roots, U[m-1] the
    m-th contour moment of 1/P, for m = 1..k, from N samples on |z| = 1.
    """

    W: tuple
    U: tuple
    N: int


@dataclass(frozen=True)
class AuxState:
    H: Poly
    defect: Any


def fft_length(degree: int) -> int:
    """Power of two L with degree < L <= 2*degree."""
    return 1 << degree.bit_length()


def sample_count(degree: int, delta: Any) -> int:
    """Initial N = K*L with K = max(ceil(1/(2*delta)), 2)."""
    delta = tolerance(delta)
    passes = max(int(TOL.ceil(1 / (2 * delta))), 2)
    return passes * fft_length(degree)


def contour_sums(
    poly: Poly,
    k: int,
    samples: int,
    prec: Optional[Precision] = None,
    phase: Fraction = Fraction(0),
) -> ContourSums:
    """
    Trapezoidal contour sums over the N points e^{2*pi*i*(j + phase)/N}, evaluated
    as K passes of length-L FFTs over twisted coefficient vectors.
    """
    n = poly.degree
    if not 1 <= k < n:
        raise ValueError(f"k must lie in 1..{n - 1}, got {k}")
    length = fft_length(n)
    if samples < length or samples % length:
        raise ValueError(f"N must be a positive multiple of {length}, got {samples}")
    passes = samples // length
    prec = prec or poly.precision
    ctx = prec.context
    zero = ctx.mpc(0)
    coeffs = [ctx.convert(c) for c in poly.coeffs] + [zero] * (length - n - 1)
    slopes = [ctx.convert(c) for c in derivative(poly, prec).coeffs] + [zero] * (length - n)
    threshold = ctx.ldexp(l1_norm(poly, prec), -(prec.bits // 2))
    offset = ctx.mpf(phase.numerator) / phase.denominator

    power_sums = [zero] * (k + 1)
    moments = [zero] * (k + 1)
    for u in range(passes):
        angle = 2 * (u + offset) / samples
        step = ctx.mpc(ctx.cospi(angle), ctx.sinpi(angle))
        twist = [ctx.mpc(1)]
        for _ in range(length - 1):
            twist.append(twist[-1] * step)

        values = fft([c * t for c, t in zip(coeffs, twist)], prec=prec)
        slopes_at = fft([c * t for c, t in zip(slopes, twist)], prec=prec)
        for v, value in enumerate(values):
            if abs(value) < threshold:
                raise SampleSingular(f"sample singular at point {u + v * passes} of {samples}")
        inverses = [1 / value for value in values]
        x = fft(inverses, prec=prec)
        y = fft([s * g for s, g in zip(slopes_at, inverses)], prec=prec)
        for m in range(1, k + 1):
            moments[m] += x[m] * twist[m]
            power_sums[m] += y[m + 1] * twist[m + 1]

    return ContourSums(
        W=tuple(w / samples for w in power_sums[1:]),
        U=tuple(v / samples for v in moments[1:]),
        N=samples,
    )


def _elementary(power_sums: Sequence[Any], ctx: mpmath.MPContext) -> list:
    """phi_0..phi_k from power sums via Newton's identities."""
    phi = [ctx.mpc(1)]
    for m in range(1, len(power_sums) + 1):
        total = ctx.fsum(ctx.convert(power_sums[i - 1]) * phi[m - i] for i in range(1, m + 1))
        phi.append(-total / m)
    return phi


def newton_identities(power_sums: Sequence[Any], prec: Optional[Precision] = None) -> Poly:
    """
    Monic polynomial whose roots have the given power sums W_1..W_k.
    """
    prec = prec or Precision()
    phi = _elementary(power_sums, prec.context)
    return Poly(tuple(reversed(phi)), prec.bits)


def res(
    poly: Poly,
    k: int,
    samples: int,
    prec: Optional[Precision] = None,
    phase: Fraction = Fraction(0),
) -> tuple[Poly, Poly]:
    """
    Initial factor F0 (monic, degree k) and auxiliary polynomial H0 (degree < k).
    """
    prec = prec or poly.precision
    ctx = prec.context
    sums = contour_sums(poly, k, samples, prec, phase)
    phi = _elementary(sums.W, ctx)
    factor = Poly(tuple(reversed(phi)), prec.bits)
    aux_coeffs = [
        ctx.fsum(phi[k - m] * sums.U[m - ell - 1] for m in range(ell + 1, k + 1)) for ell in range(k)
    ]
    return factor, Poly(tuple(aux_coeffs), prec.bits)


def aux_steps(f0: Poly, g0: Poly, h0: Poly, prec: Optional[Precision] = None) -> Iterator[AuxState]:
    """
    Yield H_m with its defect |D_m|, where H_m*G0 = 1 - D_m mod F0, using
    H_{m+1} = H_m*(1 + D_m) mod F0 (so D_{m+1} = D_m^2 mod F0).
    """
    prec = prec or Precision(max(f0.bits, g0.bits, h0.bits))
    one = Poly.from_values([1], prec)
    reduced = mod(g0, f0, prec)
    h = mod(h0, f0, prec)
    while True:
        defect = subtract(one, mulmod(h, reduced, f0, prec), prec)
        yield AuxState(h, l1_norm(defect, prec))
        h = mulmod(h, add(one, defect, prec), f0, prec)


def aux(
    f0: Poly,
    g0: Poly,
    h0: Poly,
    eps: Any,
    prec: Optional[Precision] = None,
    config: Optional[SolverConfig] = None,
) -> Optional[Poly]:
    """
    Refine H0 until |1 - H*G0 mod F0| < eps. Returns None when the defect
    exceeds 1, stops shrinking, or the step limit is reached.
    """
    config = config or DEFAULT_CONFIG
    eps = tolerance(eps)
    previous = None
    for step, state in enumerate(aux_steps(f0, g0, h0, prec)):
        if state.defect < eps:
            return state.H
        if state.defect > 1 or step >= config.max_aux_steps:
            return None
        if previous is not None and state.defect >= previous:
            return None
        previous = state.defect
    return None


def ns(
    poly: Poly,
    f0: Poly,
    h0: Poly,
    eps: Any,
    prec: Optional[Precision] = None,
    config: Optional[SolverConfig] = None,
) -> Optional[FactorPair]:
    """
    Newton-Schoenhage refinement of an approximate factor F0 of P. Returns
    None when the residual exceeds 1 or stops decreasing.
    """
    config = config or DEFAULT_CONFIG
    eps = tolerance(eps)
    prec = prec or poly.precision
    if not 1 <= f0.degree < poly.degree:
        raise ValueError("initial factor must have degree between 1 and n-1")
    factor, helper = f0, h0
    previous = None
    for step in range(config.max_newton_steps):
        cofactor, remainder = divrem(poly, factor, prec)
        residual = relative_residual(poly, [factor, cofactor], prec)
        logger.debug("ns step %d: residual %s", step, mpmath.nstr(residual, 5))
        if residual < eps:
            verified = relative_residual(poly, [factor, cofactor], prec.doubled())
            if verified < eps:
                return FactorPair(factor, cofactor, verified)
        if residual > 1:
            return None
        if previous is not None and residual >= previous:
            return None
        helper = aux(factor, cofactor, helper, residual, prec, config)
        if helper is None:
            return None
        factor = add(factor, mulmod(helper, remainder, factor, prec), prec)
        previous = residual
    return None


def fcs(poly: Poly, k: int, delta: Any, eps: Any, config: Optional[SolverConfig] = None) -> FactorPair:
    """
    Split P along the unit circle into F (degree k, roots inside) and G.

    N starts at K*L and doubles after every failed attempt, together with
    ``guard_bits`` more working precision, until N passes sample_ceiling*L.
    """
    config = config or DEFAULT_CONFIG
    n = poly.degree
    if not 1 <= k < n:
        raise ValueError(f"k must lie in 1..{n - 1}, got {k}")
    delta, eps = tolerance(delta), tolerance(eps)
    if delta <= 0 or not 0 < eps < 1:
        raise ValueError("delta must be positive and eps must lie in (0, 1)")

    samples = sample_count(n, delta)
    limit = config.sample_ceiling * fft_length(n)
    bits = max(config.precision_bits, 2 * n + bits_for(eps) + config.guard_bits)
    ceiling = config.precision_ceiling(n)
    phase = Fraction(0)
    while samples <= limit:
        if bits > ceiling:
            raise PrecisionExhausted(bits=bits, ceiling=ceiling)
        prec = Precision.covering(bits)
        try:
            f0, h0 = res(poly, k, samples, prec, phase)
            pair = ns(poly, f0, h0, eps, prec, config)
            singular = False
        except SampleSingular as exc:
            logger.debug("fcs: %s", exc)
            pair, singular = None, True
        if pair is not None:
            logger.debug("fcs: split degree %d into %d + %d with N=%d", n, k, n - k, samples)
            return pair
        logger.debug("fcs: N=%d insufficient for degree %d, doubling", samples, n)
        samples *= 2
        bits += config.guard_bits
        # The doubled grid contains every old point; move it half a step off after a singular sample.
        phase = (2 * phase + (Fraction(1, 2) if singular else 0)) % 1
    raise SplitFailed(f"split failed: N would exceed {limit} samples for degree {n}")
