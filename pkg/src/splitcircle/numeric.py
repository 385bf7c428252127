"""
Arbitrary-precision complex polynomial arithmetic.

Coefficients are stored in ascending order (index j holds the coefficient of
x^j) as mpmath complex values. Every operation runs inside an explicit
Precision scope whose mpmath context belongs to that width alone; the global
``mpmath.mp`` precision is never touched, so all functions here are safe to
call from several threads at once.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence

import mpmath
from mpmath import libmp

from .config import DEFAULT_BITS, DIRECT_SHIFT_MAX_DEGREE, FFT_MULTIPLY_MIN_LENGTH, MIN_BITS
from .errors import NumericOverflow, ZeroPolynomialError

# Any value mpmath can convert: int, float, complex, decimal string, mpf, mpc.
Number = Any
# Complex scalar; mpc instances from any private context qualify.
BigComplex = Any


@functools.lru_cache(maxsize=256)
def _context(bits: int) -> mpmath.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


# Context used for tolerances and other bookkeeping reals.
TOL = _context(64)


def tolerance(value: Number) -> Any:
    """
    Convert a tolerance, radius or similar positive real to a bookkeeping mpf.
    """
    return TOL.mpf(value)


def bits_for(eps: Number) -> int:
    """
    Number of bits b with 2**-b <= eps.
    """
    eps = tolerance(eps)
    if eps <= 0:
        raise ValueError("tolerance must be positive")
    if eps >= 1:
        return 0
    return int(TOL.ceil(-TOL.log(eps, 2)))


@dataclass(frozen=True, order=True)
class Precision:
    """
    Mantissa width for all arithmetic in a scope.
    """

    bits: int = DEFAULT_BITS

    def __post_init__(self) -> None:
        if int(self.bits) != self.bits or self.bits < MIN_BITS:
            raise ValueError(f"precision must be an integer of at least {MIN_BITS} bits, got {self.bits}")
        object.__setattr__(self, "bits", int(self.bits))

    @property
    def context(self) -> mpmath.MPContext:
        return _context(self.bits)

    def raised(self, extra: int) -> "Precision":
        return Precision(self.bits + max(0, int(extra)))

    def doubled(self) -> "Precision":
        return Precision(2 * self.bits)

    @classmethod
    def covering(cls, *widths: int) -> "Precision":
        """
        Smallest width (rounded up to a multiple of 16) that covers every given width.
        """
        bits = max([MIN_BITS, *(int(w) for w in widths)])
        return cls(-(-bits // 16) * 16)


def _complex(ctx: mpmath.MPContext, value: Number) -> BigComplex:
    """Lossless conversion into ``ctx``; real values become complex."""
    value = ctx.convert(value)
    if hasattr(value, "_mpc_"):
        return value
    return ctx.make_mpc((value._mpf_, libmp.fzero))


def _rounded(ctx: mpmath.MPContext, value: BigComplex, bits: int) -> BigComplex:
    """Round real and imaginary parts separately to ``bits`` (round to nearest)."""
    re, im = value._mpc_
    return ctx.make_mpc(
        (
            libmp.mpf_pos(re, bits, libmp.round_nearest),
            libmp.mpf_pos(im, bits, libmp.round_nearest),
        )
    )


def _pow2_scaled(ctx: mpmath.MPContext, value: BigComplex, exponent: int) -> BigComplex:
    re, im = value._mpc_
    return ctx.make_mpc((libmp.mpf_shift(re, exponent), libmp.mpf_shift(im, exponent)))


def ensure_finite(value: BigComplex) -> BigComplex:
    if not mpmath.isfinite(value):
        raise NumericOverflow(f"non-finite value {value}")
    return value


@dataclass(frozen=True)
class Poly:
    """
    Polynomial with ascending coefficients; the zero polynomial is empty.

    ``bits`` records the working width the coefficients were produced at.
    Trailing zero coefficients are stripped so the leading coefficient is
    always nonzero.
    """

    coeffs: tuple = ()
    bits: int = DEFAULT_BITS

    def __post_init__(self) -> None:
        coeffs = tuple(self.coeffs)
        end = len(coeffs)
        while end and coeffs[end - 1] == 0:
            end -= 1
        object.__setattr__(self, "coeffs", coeffs[:end])

    @classmethod
    def zero(cls, bits: int = DEFAULT_BITS) -> "Poly":
        return cls((), bits)

    @classmethod
    def from_values(cls, values: Iterable[Number], prec: Optional[Precision] = None) -> "Poly":
        """
        Build a polynomial from ascending coefficients given as any mpmath-convertible values.
        """
        prec = prec or Precision()
        ctx = prec.context
        coeffs = tuple(ensure_finite(_rounded(ctx, _complex(ctx, v), prec.bits)) for v in values)
        return cls(coeffs, prec.bits)

    @classmethod
    def from_roots(cls, roots: Iterable[Number], lead: Number = 1, prec: Optional[Precision] = None) -> "Poly":
        """
        Build lead * prod(x - r) at the given precision.
        """
        prec = prec or Precision()
        ctx = prec.context
        coeffs = [_complex(ctx, lead)]
        for root in roots:
            root = _complex(ctx, root)
            shifted = [ctx.mpc(0)] + coeffs
            for j, c in enumerate(coeffs):
                shifted[j] -= root * c
            coeffs = shifted
        return cls(tuple(coeffs), prec.bits)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> BigComplex:
        if not self.coeffs:
            return _context(self.bits).mpc(0)
        return self.coeffs[-1]

    @property
    def precision(self) -> Precision:
        return Precision(max(self.bits, MIN_BITS))

    def coeff(self, j: int) -> BigComplex:
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return _context(self.bits).mpc(0)

    def __iter__(self):
        return iter(self.coeffs)

    def __call__(self, z: Number) -> BigComplex:
        return evaluate(self, z)

    def __neg__(self) -> "Poly":
        return scale(self, -1)

    def __add__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        return subtract(self, other)

    def __mul__(self, other: Any) -> "Poly":
        if isinstance(other, Poly):
            return multiply(self, other)
        return scale(self, other)

    def __rmul__(self, other: Any) -> "Poly":
        return scale(self, other)

    def __repr__(self) -> str:
        shown = ", ".join(mpmath.nstr(c, 8) for c in self.coeffs)
        return f"Poly([{shown}], bits={self.bits})"


def _scope(prec: Optional[Precision], *polys: Poly) -> Precision:
    if prec is not None:
        return prec
    return Precision(max([MIN_BITS, *(p.bits for p in polys)]))


def _lift(ctx: mpmath.MPContext, poly: Poly) -> list:
    return [_complex(ctx, c) for c in poly.coeffs]


def _finish(ctx: mpmath.MPContext, values: Iterable[BigComplex], prec: Precision) -> Poly:
    """Round computed values to the scope width and wrap them."""
    return Poly(tuple(_rounded(ctx, v, prec.bits) for v in values), prec.bits)


def l1_norm(poly: Poly, prec: Optional[Precision] = None) -> Any:
    """
    Sum of coefficient moduli, rounded upward so the result bounds the true norm.
    """
    prec = _scope(prec, poly)
    total = libmp.fzero
    for c in poly.coeffs:
        modulus = libmp.mpc_abs(c._mpc_, prec.bits, libmp.round_ceiling)
        total = libmp.mpf_add(total, modulus, prec.bits, libmp.round_ceiling)
    return prec.context.make_mpf(total)


def evaluate(poly: Poly, z: Number, prec: Optional[Precision] = None) -> BigComplex:
    """
    Horner evaluation; the zero polynomial evaluates to 0.
    """
    prec = _scope(prec, poly)
    ctx = prec.context
    z = _complex(ctx, z)
    acc = ctx.mpc(0)
    for c in reversed(poly.coeffs):
        acc = acc * z + c
    return acc


def add(a: Poly, b: Poly, prec: Optional[Precision] = None) -> Poly:
    prec = _scope(prec, a, b)
    ctx = prec.context
    x, y = _lift(ctx, a), _lift(ctx, b)
    if len(x) < len(y):
        x, y = y, x
    return Poly(tuple(x[j] + y[j] if j < len(y) else x[j] for j in range(len(x))), prec.bits)


def subtract(a: Poly, b: Poly, prec: Optional[Precision] = None) -> Poly:
    return add(a, scale(b, -1, prec), prec)


def scale(poly: Poly, factor: Number, prec: Optional[Precision] = None) -> Poly:
    prec = _scope(prec, poly)
    ctx = prec.context
    factor = _complex(ctx, factor)
    return Poly(tuple(factor * c for c in _lift(ctx, poly)), prec.bits)


def monic(poly: Poly, prec: Optional[Precision] = None) -> Poly:
    if poly.is_zero:
        raise ZeroPolynomialError("the zero polynomial has no monic form")
    prec = _scope(prec, poly)
    ctx = prec.context
    inverse = 1 / _complex(ctx, poly.leading)
    scaled = [c * inverse for c in _lift(ctx, poly)]
    scaled[-1] = ctx.mpc(1)
    return Poly(tuple(scaled), prec.bits)


def derivative(poly: Poly, prec: Optional[Precision] = None) -> Poly:
    prec = _scope(prec, poly)
    ctx = prec.context
    return Poly(tuple(j * c for j, c in enumerate(_lift(ctx, poly)) if j), prec.bits)


def _convolve(ctx: mpmath.MPContext, x: Sequence, y: Sequence) -> list:
    """Schoolbook product; each output coefficient is one correctly summed dot product."""
    size = len(x) + len(y) - 1
    out = []
    for k in range(size):
        lo, hi = max(0, k - len(y) + 1), min(k, len(x) - 1)
        out.append(_complex(ctx, ctx.fdot((x[i], y[k - i]) for i in range(lo, hi + 1))))
    return out


def _fft_convolve(ctx: mpmath.MPContext, x: Sequence, y: Sequence, bits: int) -> list:
    size = len(x) + len(y) - 1
    length = 1 << (size - 1).bit_length()
    work = Precision(bits + 2 * length.bit_length() + 16)
    zero = work.context.mpc(0)
    fx = fft(list(x) + [zero] * (length - len(x)), prec=work)
    fy = fft(list(y) + [zero] * (length - len(y)), prec=work)
    product = fft([u * v for u, v in zip(fx, fy)], inverse=True, prec=work)
    return [_complex(ctx, v) for v in product[:size]]


def multiply(a: Poly, b: Poly, prec: Optional[Precision] = None) -> Poly:
    """
    Product of two polynomials: schoolbook for short inputs, FFT convolution above the threshold.
    """
    prec = _scope(prec, a, b)
    if a.is_zero or b.is_zero:
        return Poly.zero(prec.bits)
    ctx = prec.context
    x, y = _lift(ctx, a), _lift(ctx, b)
    if min(len(x), len(y)) > 1 and len(x) + len(y) - 1 >= FFT_MULTIPLY_MIN_LENGTH:
        return _finish(ctx, _fft_convolve(ctx, x, y, prec.bits), prec)
    return Poly(tuple(_convolve(ctx, x, y)), prec.bits)


def _shift_direct(ctx: mpmath.MPContext, coeffs: Sequence, u: BigComplex) -> list:
    n = len(coeffs) - 1
    powers = [ctx.mpc(1)]
    for _ in range(n):
        powers.append(powers[-1] * u)
    return [
        _complex(ctx, ctx.fdot((coeffs[j] * math.comb(j, k), powers[j - k]) for j in range(k, n + 1)))
        for k in range(n + 1)
    ]


def _shift_split(ctx: mpmath.MPContext, coeffs: Sequence, u: BigComplex) -> list:
    n = len(coeffs) - 1
    if n <= DIRECT_SHIFT_MAX_DEGREE:
        return _shift_direct(ctx, coeffs, u)
    m = (n + 1) // 2
    low = _shift_split(ctx, coeffs[:m], u)
    high = _shift_split(ctx, coeffs[m:], u)
    binomial = [math.comb(m, i) * u ** (m - i) for i in range(m + 1)]
    if len(high) + len(binomial) - 1 >= FFT_MULTIPLY_MIN_LENGTH:
        combined = _fft_convolve(ctx, high, binomial, ctx.prec)
    else:
        combined = _convolve(ctx, high, binomial)
    for j, c in enumerate(low):
        combined[j] += c
    return combined


def shift(poly: Poly, u: Number, prec: Optional[Precision] = None) -> Poly:
    """
    Taylor shift: returns Q with Q(z) = P(z + u).

    Computed with ceil(n*log2(1 + |u|)) + 16 guard bits and rounded back to the
    scope width, so shift(shift(P, u), -u) reproduces P up to a relative error
    of about 2**-bits * (1 + |u|)**(2n).
    """
    prec = _scope(prec, poly)
    ctx = prec.context
    u = _complex(ctx, u)
    n = poly.degree
    if n <= 0 or u == 0:
        return Poly(poly.coeffs, prec.bits)
    guard = int(TOL.ceil(n * TOL.log(1 + abs(u), 2))) + 16
    work = prec.raised(guard).context
    shifted = _shift_split(work, _lift(work, poly), _complex(work, u))
    return _finish(ctx, shifted, prec)


def dilate(poly: Poly, rho: Number, prec: Optional[Precision] = None) -> Poly:
    """
    Returns P(rho * z): coefficient j is multiplied by rho**j, roots are divided by rho.
    Powers of two are applied exactly.
    """
    prec = _scope(prec, poly)
    ctx = prec.context
    rho = ctx.mpf(rho)
    if rho <= 0:
        raise ValueError("dilation factor must be positive")
    coeffs = _lift(ctx, poly)
    if rho == 1 or not coeffs:
        return Poly(tuple(coeffs), prec.bits)
    sign, man, exp, _ = rho._mpf_
    if man == 1:
        return Poly(tuple(_pow2_scaled(ctx, c, j * exp) for j, c in enumerate(coeffs)), prec.bits)
    work = prec.raised(len(coeffs).bit_length() + 8).context
    power = work.mpf(1)
    rho = work.convert(rho)
    out = []
    for c in coeffs:
        out.append(_complex(work, c) * power)
        power *= rho
    return _finish(ctx, out, prec)


def reciprocal(poly: Poly) -> Poly:
    """
    x^n * P(1/x): the reversed coefficients with any new leading zeros stripped.
    """
    return Poly(tuple(reversed(poly.coeffs)), poly.bits)


def relative_gap(a: Poly, b: Poly, prec: Optional[Precision] = None) -> Any:
    """
    |a - b| / |b| in the l1 norm; infinite when b is zero and a is not.
    """
    prec = _scope(prec, a, b)
    gap = l1_norm(subtract(a, b, prec), prec)
    base = l1_norm(b, prec)
    if base == 0:
        return prec.context.mpf(0) if gap == 0 else prec.context.inf
    return gap / base


def round_rel(poly: Poly, eps: Number, prec: Optional[Precision] = None) -> Poly:
    """
    Round every coefficient to the fewest bits (never below 53) such that
    |P - P_hat| < eps * |P_hat|. The bound is re-checked at doubled precision.
    """
    if poly.is_zero:
        raise ValueError("cannot round the zero polynomial")
    prec = _scope(prec, poly)
    ctx = prec.context
    eps = tolerance(eps)
    width = max(MIN_BITS, bits_for(eps / (2 * (poly.degree + 1))) + 1)
    check = prec.doubled()
    while True:
        rounded = Poly(tuple(_rounded(ctx, c, width) for c in poly.coeffs), prec.bits)
        if relative_gap(poly, rounded, check) < eps:
            return rounded
        width += 8


def divrem(a: Poly, b: Poly, prec: Optional[Precision] = None) -> tuple[Poly, Poly]:
    """
    Euclidean division: a = q*b + r with deg r < deg b.
    """
    if b.is_zero:
        raise ZeroPolynomialError()
    prec = _scope(prec, a, b)
    ctx = prec.context
    if a.degree < b.degree:
        return Poly.zero(prec.bits), Poly(a.coeffs, prec.bits)
    rem = _lift(ctx, a)
    divisor = _lift(ctx, b)
    lead = divisor[-1]
    db = b.degree
    quotient = [ctx.mpc(0)] * (a.degree - db + 1)
    for i in range(a.degree - db, -1, -1):
        q = rem[i + db] / lead
        quotient[i] = q
        if q != 0:
            for j in range(db):
                rem[i + j] -= q * divisor[j]
    return Poly(tuple(quotient), prec.bits), Poly(tuple(rem[:db]), prec.bits)


def mod(a: Poly, f: Poly, prec: Optional[Precision] = None) -> Poly:
    if a.degree < f.degree:
        return Poly(a.coeffs, _scope(prec, a, f).bits)
    return divrem(a, f, prec)[1]


def mulmod(a: Poly, b: Poly, f: Poly, prec: Optional[Precision] = None) -> Poly:
    """
    (a*b) mod f, reducing both operands first.
    """
    if f.degree < 1:
        raise ValueError("modulus must have degree at least 1")
    prec = _scope(prec, a, b, f)
    return mod(multiply(mod(a, f, prec), mod(b, f, prec), prec), f, prec)


@functools.lru_cache(maxsize=64)
def _unit_roots(length: int, bits: int) -> tuple:
    """e^{2*pi*i*k/length} for k < length/2; immutable, shared between threads."""
    ctx = _context(bits)
    roots = []
    for k in range(length // 2):
        t = ctx.mpf(2 * k) / length
        roots.append(ctx.mpc(ctx.cospi(t), ctx.sinpi(t)))
    return tuple(roots)


def fft(values: Sequence[Number], inverse: bool = False, prec: Optional[Precision] = None) -> list:
    """
    Radix-2 DFT with omega = e^{2*pi*i/L}; the inverse uses the conjugate root and scales by 1/L.
    """
    length = len(values)
    if length == 0 or length & (length - 1):
        raise ValueError(f"FFT length must be a power of two, got {length}")
    prec = prec or Precision()
    ctx = prec.context
    data = [_complex(ctx, v) for v in values]

    j = 0
    for i in range(1, length):
        bit = length >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            data[i], data[j] = data[j], data[i]

    roots = _unit_roots(length, prec.bits)
    if inverse:
        roots = tuple(w.conjugate() for w in roots)
    size = 2
    while size <= length:
        half = size // 2
        stride = length // size
        for start in range(0, length, size):
            for k in range(half):
                t = roots[k * stride] * data[start + k + half]
                u = data[start + k]
                data[start + k] = u + t
                data[start + k + half] = u - t
        size <<= 1

    if inverse:
        exponent = length.bit_length() - 1
        data = [_pow2_scaled(ctx, v, -exponent) for v in data]
    return data


def relative_residual(poly: Poly, factors: Sequence[Poly], prec: Optional[Precision] = None) -> Any:
    """
    |P - prod(factors)| / |P| computed at the given precision.
    """
    prec = _scope(prec, poly, *factors)
    product = Poly.from_values([1], prec)
    for factor in factors:
        product = multiply(product, factor, prec)
    return relative_gap(product, poly, prec)
