"""
Complete factorisation into linear factors by repeated circle splitting.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import mpmath

from .circle_search import ctr0
from .config import DEFAULT_CONFIG, SolverConfig
from .errors import SplitCircleError, SplitFailed
from .numeric import TOL, Poly, Precision, monic, relative_residual, scale, tolerance

logger = logging.getLogger(__name__)

# Called with the current factor list (finished and pending) after every split.
Observer = Callable[[Sequence[Poly]], None]


@dataclass(frozen=True)
class FactorList:
    """
    Linear factors whose product approximates P, with the certified residual.
    ``leading`` is the product of the factors' leading coefficients.
    """

    factors: tuple
    residual: Any
    leading: Any

    @property
    def roots(self) -> "RootList":
        return RootList(tuple(_root_of(f) for f in self.factors))

    def __len__(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class RootList:
    roots: tuple

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _root_of(linear: Poly) -> Any:
    ctx = linear.precision.context
    return -ctx.convert(linear.coeff(0)) / ctx.convert(linear.coeff(1))


def _sort_key(linear: Poly) -> tuple:
    root = _root_of(linear)
    return (root.real, root.imag)


def verify_residual(poly: Poly, factors: Sequence[Poly], bits: Optional[int] = None) -> Any:
    """
    |P - prod(factors)| / |P| at twice the widest precision involved (or 2*bits).
    """
    widest = max([poly.bits, *(f.bits for f in factors)])
    if bits is not None:
        widest = max(widest, bits)
    return relative_residual(poly, factors, Precision(2 * widest))


def fact(
    poly: Poly,
    eps: Any,
    config: Optional[SolverConfig] = None,
    observer: Optional[Observer] = None,
) -> FactorList:
    """
    Factor P into degree-one polynomials with |P - L1*...*Ln| < eps*|P|.

    Every split runs at tolerance 2**-n * eps / n for the degree n of P, so the
    errors of all n - 1 splits add up to less than eps.
    """
    config = config or DEFAULT_CONFIG
    eps = tolerance(eps)
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {mpmath.nstr(eps, 5)}")
    n = poly.degree
    if n < 1:
        raise ValueError("cannot factor a constant polynomial")

    lead = poly.leading
    if n == 1:
        return FactorList((poly,), verify_residual(poly, [poly], config.precision_bits), lead)

    split_eps = TOL.ldexp(eps, -n) / n
    pending = [monic(poly, Precision.covering(poly.bits, config.precision_bits))]
    done: list[Poly] = []
    while pending:
        current = pending.pop()
        if current.degree == 1:
            done.append(current)
            continue
        try:
            pair = ctr0(current, split_eps, config)
        except SplitCircleError as exc:
            raise type(exc)(f"{exc} (degree {current.degree} subproblem of degree {n} input)") from exc
        logger.debug(
            "fact: split degree %d into %d + %d (residual %s)",
            current.degree,
            pair.F.degree,
            pair.G.degree,
            mpmath.nstr(pair.residual, 5),
        )
        # Fold the cofactor's leading scalar into F so every pending factor stays monic.
        ctx = pair.G.precision.context
        g_lead = ctx.convert(pair.G.leading)
        pending.append(monic(pair.G))
        pending.append(scale(pair.F, g_lead, Precision.covering(pair.F.bits, pair.G.bits)))
        if observer is not None:
            observer(tuple(done) + tuple(pending))

    factors = sorted((monic(f) for f in done), key=_sort_key)
    ctx = Precision.covering(poly.bits, *(f.bits for f in done)).context
    scalar = ctx.convert(lead)
    for f in done:
        scalar *= ctx.convert(f.leading)
    # All factors are monic except the first, which carries the overall scalar.
    factors[0] = scale(factors[0], scalar)
    residual = verify_residual(poly, factors, config.precision_bits)
    if not residual < eps:
        raise SplitFailed(
            f"split failed: residual {mpmath.nstr(residual, 5)} of the degree {n} factorisation "
            f"exceeds eps {mpmath.nstr(eps, 5)}"
        )
    return FactorList(tuple(factors), residual, factors[0].leading)


def roots(poly: Poly, eps: Any, config: Optional[SolverConfig] = None) -> RootList:
    """Roots of P read off the linear factors of ``fact``."""
    return fact(poly, eps, config).roots
