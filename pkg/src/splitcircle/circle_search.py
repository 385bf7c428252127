"""
Locating a splitting circle.

``rad`` narrows a certified root-free annulus down to a circle with a usable
margin, ``hom`` factors through that circle after dilating it onto |z| = 1,
``ctr`` moves the origin so that such a circle is guaranteed to exist and
``ctr0`` routes a general polynomial to one of the above.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

import mpmath

from .circle_split import FactorPair, fcs
from .config import DEFAULT_CONFIG, SolverConfig
from .errors import SplitFailed
from .graeffe import mod_k, mod_max, mod_min, nrd, working_precision
from .numeric import (
    TOL,
    Poly,
    Precision,
    dilate,
    l1_norm,
    reciprocal,
    relative_residual,
    round_rel,
    scale,
    shift,
    tolerance,
)

__all__ = [
    "Annulus",
    "CenterChoice",
    "CenterPlan",
    "FactorPair",
    "SplitCircle",
    "choose_center",
    "ctr",
    "ctr0",
    "hom",
    "plan_center",
    "rad",
]

logger = logging.getLogger(__name__)

# Radius and tolerance used by ctr0 to decide whether all roots are small or large.
PROBE_RADIUS = 1.9
PROBE_TAU = 0.05
# Tolerance for the modulus estimates in ctr.
CENTER_TAU = 0.01
# ln(648) / ln(2), rounded up: bits lost along the ctr tolerance chain per degree.
_CENTER_BITS_PER_DEGREE = 10


@dataclass(frozen=True)
class Annulus:
    """
    Certified annulus inner < |z| < outer: at most i roots lie inside ``inner``
    and at most n - j roots outside ``outer``.
    """

    inner: Any
    outer: Any
    i: int
    j: int

    def __post_init__(self) -> None:
        if not 1 <= self.i <= self.j:
            raise ValueError(f"annulus needs 1 <= i <= j, got i={self.i}, j={self.j}")
        if not 0 < self.inner < self.outer:
            raise ValueError("annulus radii must satisfy 0 < inner < outer")

    @property
    def width(self) -> Any:
        return TOL.log(tolerance(self.outer) / tolerance(self.inner))


@dataclass(frozen=True)
class SplitCircle:
    """
    |z| = rho with k roots inside and none in rho*e^-delta < |z| < rho*e^delta.
    """

    rho: Any
    k: int
    delta: Any


@dataclass(frozen=True)
class CenterChoice:
    index: int
    center: complex
    inner: Any
    outer: Any
    poly: Poly
    ratios: tuple


@dataclass(frozen=True)
class CenterPlan:
    """
    Intermediate polynomials and tolerances of ``ctr``. ``degenerate`` marks the
    case where the recentred constant term is negligible and z splits off directly.
    """

    center: Any
    shifted: Poly
    eps0: Any
    degenerate: bool
    precision: Precision
    radius: Any = None
    scaled: Optional[Poly] = None
    eps1: Any = None
    choice: Optional[CenterChoice] = None
    eps2: Any = None


def _check_eps(eps: Any) -> Any:
    eps = tolerance(eps)
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {mpmath.nstr(eps, 5)}")
    return eps


def rad(poly: Poly, annulus: Annulus, config: Optional[SolverConfig] = None) -> SplitCircle:
    """
    Bisect the annulus in log-radius until a single index i = j remains,
    then place the circle between the i-th and (i+1)-th root moduli.
    """
    config = config or DEFAULT_CONFIG
    n = poly.degree
    if annulus.j > n - 1:
        raise ValueError(f"annulus index j={annulus.j} exceeds n-1={n - 1}")
    current = annulus
    while current.i < current.j:
        inner, outer = tolerance(current.inner), tolerance(current.outer)
        rho = TOL.sqrt(inner * outer)
        delta = current.width / (8 * (current.j - current.i))
        k = nrd(poly, rho, delta, config)
        middle = Fraction(current.i + current.j, 2)
        logger.debug("rad: [%d, %d] at rho=%s -> k=%d", current.i, current.j, mpmath.nstr(rho, 8), k)
        if k < middle or (k == middle and k < Fraction(n, 2)):
            current = Annulus(inner, rho * TOL.exp(-delta), current.i, k)
        else:
            current = Annulus(rho * TOL.exp(delta), outer, k, current.j)

    width = current.width
    low = mod_k(poly, current.i, width / 8, config).value
    high = mod_k(poly, current.i + 1, width / 8, config).value
    # Roots at the origin carry no modulus information; any lower radius works.
    low = max(low, tolerance(current.inner) * TOL.exp(-width))
    delta = TOL.log(high / low) / 2 - width / 8
    if delta <= 0:
        raise SplitFailed(f"split failed: no root-free margin around index {current.i}")
    return SplitCircle(TOL.sqrt(low * high), current.i, delta)


def hom(poly: Poly, annulus: Annulus, eps: Any, config: Optional[SolverConfig] = None) -> FactorPair:
    """
    Factor P along the circle found by ``rad``, working on P(rho*z).
    """
    config = config or DEFAULT_CONFIG
    eps = _check_eps(eps)
    n = poly.degree
    circle = rad(poly, annulus, config)
    rho = circle.rho
    eps_prime = min(rho ** (-n), rho**n) * eps / 4
    eps_second = TOL.ldexp(eps, -(n + 4)) / n
    prec = working_precision(n, min(eps_prime / n, eps_second), config)
    ctx = prec.context

    dilated = round_rel(dilate(poly, rho, prec), eps_prime / n, prec)
    pair = fcs(dilated, circle.k, circle.delta, eps_prime, config)
    inverse = 1 / ctx.convert(rho)
    factor = round_rel(dilate(pair.F, inverse, prec), eps_second, prec)
    cofactor = round_rel(dilate(pair.G, inverse, prec), eps_second, prec)

    residual = relative_residual(poly, [factor, cofactor], prec.doubled())
    if not residual < eps:
        raise SplitFailed(f"split failed: residual {mpmath.nstr(residual, 5)} after undoing the dilation")
    return FactorPair(factor, cofactor, residual)


def choose_center(poly: Poly, config: Optional[SolverConfig] = None) -> CenterChoice:
    """
    Evaluate the candidate centres 2, 2i, -2, -2i for a polynomial with all roots
    in the unit disk and keep the one whose root moduli spread the most.
    """
    centers = (2, 2j, -2, -2j)
    best = None
    ratios = []
    for index, center in enumerate(centers):
        moved = shift(poly, center)
        outer = mod_max(moved, CENTER_TAU, config).value
        inner = mod_min(moved, CENTER_TAU, config).value
        ratio = outer / inner
        ratios.append(ratio)
        if best is None or ratio > ratios[best[0]]:
            best = (index, center, inner, outer, moved)
    index, center, inner, outer, moved = best
    logger.debug("ctr: centre %s with ratio %s", center, mpmath.nstr(ratios[index], 6))
    return CenterChoice(index, center, inner, outer, moved, tuple(ratios))


def _center_precision(n: int, eps: Any, config: SolverConfig) -> Precision:
    return working_precision(n, TOL.ldexp(eps, -(_CENTER_BITS_PER_DEGREE * n + 6)), config)


def plan_center(poly: Poly, eps: Any, config: Optional[SolverConfig] = None) -> CenterPlan:
    """
    Recentre P at its root centroid and rescale it into the unit disk,
    tracking the tolerances handed down to ``hom``.
    """
    config = config or DEFAULT_CONFIG
    eps = _check_eps(eps)
    n = poly.degree
    if n < 2:
        raise ValueError("ctr needs a polynomial of degree at least 2")
    prec = _center_precision(n, eps, config)
    ctx = prec.context

    center = -ctx.convert(poly.coeff(n - 1)) / (n * ctx.convert(poly.leading))
    eps0_prime = eps / 4 * (1 + tolerance(abs(center))) ** (-n)
    moved = shift(poly, center, prec)
    shifted = round_rel(moved, eps0_prime, prec)
    eps0 = eps0_prime * l1_norm(poly) / l1_norm(moved)

    if abs(shifted.coeff(0)) < eps0 * l1_norm(shifted):
        return CenterPlan(center, shifted, eps0, True, prec)

    radius = mod_max(shifted, CENTER_TAU, config).value * TOL.exp(CENTER_TAU)
    if radius >= 4:
        logger.warning("ctr: recentred root radius %s exceeds 4", mpmath.nstr(radius, 6))
    eps1 = eps0 / 4 * max(TOL.mpf(1), radius) ** (-n)
    scaled = scale(dilate(shifted, radius, prec), ctx.convert(radius) ** (-n), prec)
    scaled = round_rel(scaled, eps1 / n, prec)

    choice = choose_center(scaled, config)
    eps2 = eps1 * l1_norm(shifted) / l1_norm(choice.poly) * TOL.mpf(3) ** (-n)
    return CenterPlan(center, shifted, eps0, False, prec, radius, scaled, eps1, choice, eps2)


def ctr(poly: Poly, eps: Any, config: Optional[SolverConfig] = None) -> FactorPair:
    """
    Split a polynomial whose roots all lie in |z| <= 2.
    """
    config = config or DEFAULT_CONFIG
    eps = _check_eps(eps)
    n = poly.degree
    plan = plan_center(poly, eps, config)
    prec = plan.precision
    ctx = prec.context

    if plan.degenerate:
        factor = Poly.from_values([0, 1], prec)
        cofactor = Poly(plan.shifted.coeffs[1:], prec.bits)
    else:
        choice = plan.choice
        annulus = Annulus(
            choice.inner * TOL.exp(CENTER_TAU),
            choice.outer * TOL.exp(-CENTER_TAU),
            1,
            n - 1,
        )
        pair = hom(choice.poly, annulus, plan.eps2, config)
        back_f = shift(pair.F, -choice.center, prec)
        back_g = shift(pair.G, -choice.center, prec)
        radius = ctx.convert(plan.radius)
        k = back_f.degree
        eps_undo = TOL.ldexp(plan.eps0, -(n + 4)) / n
        factor = round_rel(scale(dilate(back_f, 1 / radius, prec), radius**k, prec), eps_undo, prec)
        cofactor = round_rel(scale(dilate(back_g, 1 / radius, prec), radius ** (n - k), prec), eps_undo, prec)

    eps_final = TOL.ldexp(eps, -(n + 4)) / n
    factor = round_rel(shift(factor, -plan.center, prec), eps_final, prec)
    cofactor = round_rel(shift(cofactor, -plan.center, prec), eps_final, prec)
    residual = relative_residual(poly, [factor, cofactor], prec.doubled())
    if not residual < eps:
        raise SplitFailed(f"split failed: residual {mpmath.nstr(residual, 5)} after recentring")
    return FactorPair(factor, cofactor, residual)


def ctr0(poly: Poly, eps: Any, config: Optional[SolverConfig] = None) -> FactorPair:
    """
    Split P into two nontrivial factors with |P - F*G| < eps*|P|.
    """
    config = config or DEFAULT_CONFIG
    eps = _check_eps(eps)
    n = poly.degree
    if n < 2:
        raise ValueError("ctr0 needs a polynomial of degree at least 2")

    if abs(poly.coeff(0)) < eps * l1_norm(poly):
        factor = Poly.from_values([0, 1], poly.precision)
        cofactor = Poly(poly.coeffs[1:], poly.bits)
        residual = relative_residual(poly, [factor, cofactor], poly.precision.doubled())
        return FactorPair(factor, cofactor, residual)

    inside = nrd(poly, PROBE_RADIUS, PROBE_TAU, config)
    if inside == n:
        logger.debug("ctr0: all %d roots within %s", n, PROBE_RADIUS)
        return ctr(poly, eps, config)

    flipped = reciprocal(poly)
    outside = nrd(flipped, PROBE_RADIUS, PROBE_TAU, config)
    if outside == n:
        logger.debug("ctr0: all %d roots beyond %s", n, 1 / PROBE_RADIUS)
        pair = ctr(flipped, eps, config)
        factor, cofactor = reciprocal(pair.F), reciprocal(pair.G)
        residual = relative_residual(poly, [factor, cofactor], factor.precision.doubled())
        if not residual < eps:
            raise SplitFailed(f"split failed: residual {mpmath.nstr(residual, 5)} after reversal")
        return FactorPair(factor, cofactor, residual)

    margin = TOL.exp(PROBE_TAU)
    probe = tolerance(PROBE_RADIUS)
    annulus = Annulus(margin / probe, probe / margin, n - outside, inside)
    return hom(poly, annulus, eps, config)
