import os
import random
import sys
import unittest
from pathlib import Path

# Ensure the src directory is importable when running `python -m unittest`.
REPO_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = REPO_ROOT / "src"
if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from splitcircle import numeric  # noqa: E402  # Imported after sys.path adjustment.
from splitcircle.errors import ZeroPolynomialError  # noqa: E402
from splitcircle.numeric import Poly, Precision  # noqa: E402

SLOW = os.environ.get("SPLITCIRCLE_SLOW_TESTS") == "1"


def _random_poly(rng, degree, prec=None):
    return Poly.from_values(
        [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(degree + 1)], prec
    )


def _wide_random_poly(rng, degree, prec):
    """Random coefficients in the unit square using every mantissa bit of ``prec``."""
    ctx = prec.context

    def part():
        return ctx.ldexp(ctx.mpf(rng.getrandbits(prec.bits)), 1 - prec.bits) - 1

    return Poly.from_values([ctx.mpc(part(), part()) for _ in range(degree + 1)], prec)


class TestPrecision(unittest.TestCase):
    def test_rejects_narrow_widths(self):
        with self.assertRaises(ValueError):
            Precision(52)

    def test_covering_rounds_up_to_sixteen(self):
        self.assertEqual(Precision.covering(100).bits, 112)
        self.assertEqual(Precision.covering(10).bits, 64)
        self.assertEqual(Precision.covering(128, 200).bits, 208)

    def test_doubled_and_raised(self):
        self.assertEqual(Precision(64).doubled().bits, 128)
        self.assertEqual(Precision(64).raised(8).bits, 72)
        self.assertEqual(Precision(64).context.prec, 64)

    def test_bits_for(self):
        self.assertEqual(numeric.bits_for(0.5), 1)
        self.assertEqual(numeric.bits_for("1e-10"), 34)
        self.assertEqual(numeric.bits_for(2), 0)
        with self.assertRaises(ValueError):
            numeric.bits_for(0)


class TestPoly(unittest.TestCase):
    def test_trailing_zeros_are_stripped(self):
        poly = Poly.from_values([1, 2, 0, 0])
        self.assertEqual(poly.degree, 1)
        self.assertEqual(poly.leading, 2)
        self.assertTrue(Poly.from_values([0, 0]).is_zero)
        self.assertEqual(Poly.zero().degree, -1)

    def test_from_roots(self):
        poly = Poly.from_roots([1, 2], lead=3)
        self.assertEqual(list(poly.coeffs), [6, -9, 3])
        self.assertEqual(poly(2), 0)
        self.assertEqual(poly.coeff(5), 0)

    def test_operators(self):
        a = Poly.from_values([1, 1])
        b = Poly.from_values([-1, 1])
        self.assertEqual(list((a * b).coeffs), [-1, 0, 1])
        self.assertEqual(list((a + b).coeffs), [0, 2])
        self.assertEqual(list((a - b).coeffs), [2])
        self.assertEqual(list((2 * a).coeffs), [2, 2])
        self.assertEqual(list((-a).coeffs), [-1, -1])

    def test_evaluate_matches_horner(self):
        poly = Poly.from_values([1, -3, 0, 2])
        self.assertEqual(numeric.evaluate(poly, 2), 11)
        self.assertEqual(numeric.evaluate(Poly.zero(), 5), 0)

    def test_l1_norm(self):
        poly = Poly.from_values([3 + 4j, -1, 0.5j])
        self.assertEqual(numeric.l1_norm(poly), 6.5)

    def test_monic_and_derivative(self):
        poly = Poly.from_values([2, 4, 2])
        self.assertEqual(list(numeric.monic(poly).coeffs), [1, 2, 1])
        self.assertEqual(list(numeric.derivative(poly).coeffs), [4, 4])
        with self.assertRaises(ZeroPolynomialError):
            numeric.monic(Poly.zero())


class TestTransforms(unittest.TestCase):
    def test_shift_small(self):
        shifted = numeric.shift(Poly.from_values([0, 0, 1]), 1)
        self.assertEqual(list(shifted.coeffs), [1, 2, 1])

    def test_shift_matches_evaluation(self):
        rng = random.Random(7)
        wide = Precision(256)
        ctx = wide.context
        for degree in (5, 40):
            poly = _random_poly(rng, degree)
            u = complex(0.3, -0.7)
            shifted = numeric.shift(poly, u)
            for _ in range(3):
                z = ctx.mpc(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)))
                expected = numeric.evaluate(poly, z + ctx.mpc(u), wide)
                got = numeric.evaluate(shifted, z, wide)
                self.assertLess(abs(got - expected), 1e-25 * numeric.l1_norm(shifted))

    def test_dilate_by_power_of_two_is_exact(self):
        poly = Poly.from_values([1, 1, 1, 1])
        self.assertEqual(list(numeric.dilate(poly, 2).coeffs), [1, 2, 4, 8])
        self.assertEqual(list(numeric.dilate(poly, 0.5).coeffs), [1, 0.5, 0.25, 0.125])
        with self.assertRaises(ValueError):
            numeric.dilate(poly, 0)

    def test_dilate_moves_roots(self):
        poly = Poly.from_roots([3, -1.5j])
        dilated = numeric.dilate(poly, 3)
        self.assertLess(abs(numeric.evaluate(dilated, 1)), 1e-30)
        self.assertLess(abs(numeric.evaluate(dilated, -0.5j)), 1e-30)

    def test_reciprocal(self):
        poly = Poly.from_values([0, 1, 2])
        self.assertEqual(list(numeric.reciprocal(poly).coeffs), [2, 1])

    def test_shift_round_trip(self):
        # Relative error stays within 2**(8 - bits) * (1 + |u|)**(2n).
        rng = random.Random(19)
        prec = Precision(128)
        for degree in (5, 20, 40):
            poly = _wide_random_poly(rng, degree, prec)
            for u in (0.5, complex(-0.3, 0.7)):
                back = numeric.shift(numeric.shift(poly, u), -u)
                bound = 2.0 ** (8 - prec.bits) * (1 + abs(u)) ** (2 * degree)
                self.assertLess(numeric.relative_gap(back, poly, Precision(256)), bound, f"degree {degree}")

    def test_dilate_round_trip(self):
        rng = random.Random(23)
        prec = Precision(128)
        ctx = prec.context
        for degree in (5, 30):
            poly = _wide_random_poly(rng, degree, prec)
            for rho in ("3", "0.7", "1.3"):
                back = numeric.dilate(numeric.dilate(poly, rho), 1 / ctx.mpf(rho))
                gap = numeric.relative_gap(back, poly, Precision(256))
                self.assertLess(gap, 2.0 ** (8 - prec.bits), f"degree {degree} rho {rho}")


class TestNorms(unittest.TestCase):
    def test_submultiplicative(self):
        rng = random.Random(29)
        for _ in range(40):
            a = _random_poly(rng, rng.randint(1, 40))
            b = _random_poly(rng, rng.randint(1, 40))
            product = numeric.multiply(a, b)
            self.assertLessEqual(numeric.l1_norm(product), numeric.l1_norm(a) * numeric.l1_norm(b))

    def test_factor_norms_bounded_by_product(self):
        rng = random.Random(31)
        for _ in range(40):
            f = numeric.monic(_random_poly(rng, rng.randint(1, 8)))
            g = numeric.monic(_random_poly(rng, rng.randint(1, 8)))
            product = numeric.multiply(f, g)
            bound = 2 ** (product.degree - 1) * numeric.l1_norm(product)
            self.assertLessEqual(numeric.l1_norm(f) * numeric.l1_norm(g), bound)


class TestRounding(unittest.TestCase):
    def test_round_rel_respects_bound(self):
        rng = random.Random(11)
        poly = _random_poly(rng, 8, Precision(512))
        for eps in ("1e-20", "1e-60"):
            rounded = numeric.round_rel(poly, eps)
            self.assertLess(numeric.relative_gap(poly, rounded, Precision(1024)), numeric.tolerance(eps))

    def _check_random_rounding(self, count, seed):
        rng = random.Random(seed)
        prec = Precision(256)
        for case in range(count):
            poly = _wide_random_poly(rng, rng.randint(1, 10), prec)
            eps = 10.0 ** -rng.uniform(1, 60)
            rounded = numeric.round_rel(poly, eps)
            gap = numeric.relative_gap(poly, rounded, prec.doubled())
            self.assertLess(gap, numeric.tolerance(eps), f"case {case}")

    def test_round_rel_on_random_polynomials(self):
        self._check_random_rounding(100, 37)

    @unittest.skipUnless(SLOW, "set SPLITCIRCLE_SLOW_TESTS=1 to run the full rounding corpus")
    def test_round_rel_full_corpus(self):
        self._check_random_rounding(1000, 41)

    def test_round_rel_keeps_double_precision(self):
        poly = Poly.from_values(["0.1", "0.3"], Precision(256))
        rounded = numeric.round_rel(poly, 0.25)
        self.assertLess(abs(rounded.coeff(0) - poly.coeff(0)), 1e-15)

    def test_round_rel_rejects_zero(self):
        with self.assertRaises(ValueError):
            numeric.round_rel(Poly.zero(), 0.1)


class TestDivision(unittest.TestCase):
    def test_divrem_identity(self):
        rng = random.Random(3)
        a = _random_poly(rng, 7)
        b = _random_poly(rng, 3)
        q, r = numeric.divrem(a, b)
        self.assertLess(r.degree, 3)
        rebuilt = numeric.add(numeric.multiply(q, b), r)
        self.assertLess(numeric.relative_gap(rebuilt, a), 1e-30)

    def test_divrem_short_dividend(self):
        q, r = numeric.divrem(Poly.from_values([1, 2]), Poly.from_values([0, 0, 1]))
        self.assertTrue(q.is_zero)
        self.assertEqual(list(r.coeffs), [1, 2])

    def test_divide_by_zero(self):
        with self.assertRaises(ZeroPolynomialError):
            numeric.divrem(Poly.from_values([1, 1]), Poly.zero())

    def test_mulmod(self):
        f = Poly.from_values([-2, 0, 1])  # x^2 = 2
        result = numeric.mulmod(Poly.from_values([0, 1]), Poly.from_values([0, 1]), f)
        self.assertEqual(list(result.coeffs), [2])
        with self.assertRaises(ValueError):
            numeric.mulmod(f, f, Poly.from_values([3]))


class TestMultiplyAndFFT(unittest.TestCase):
    def test_fft_of_impulses(self):
        ones = numeric.fft([1, 0, 0, 0])
        self.assertTrue(all(v == 1 for v in ones))
        twiddles = numeric.fft([0, 1, 0, 0])
        for v, value in enumerate(twiddles):
            self.assertLess(abs(value - 1j**v), 1e-35)

    def test_inverse_fft(self):
        rng = random.Random(5)
        values = [complex(rng.random(), rng.random()) for _ in range(16)]
        back = numeric.fft(numeric.fft(values), inverse=True)
        for got, expected in zip(back, values):
            self.assertLess(abs(got - expected), 1e-30)

    def test_inverse_fft_at_every_length(self):
        rng = random.Random(43)
        for exponent in range(1, 11):
            values = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(1 << exponent)]
            back = numeric.fft(numeric.fft(values), inverse=True)
            worst = max(abs(got - expected) for got, expected in zip(back, values))
            self.assertLess(worst, 1e-30, f"length {1 << exponent}")

    def test_fft_rejects_bad_length(self):
        with self.assertRaises(ValueError):
            numeric.fft([1, 2, 3])

    def test_fft_multiply_matches_schoolbook(self):
        rng = random.Random(13)
        a = _random_poly(rng, 40)
        b = _random_poly(rng, 35)
        product = numeric.multiply(a, b)
        self.assertEqual(product.degree, 75)
        for _ in range(3):
            z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            expected = numeric.evaluate(a, z) * numeric.evaluate(b, z)
            self.assertLess(abs(numeric.evaluate(product, z) - expected), 1e-30 * numeric.l1_norm(product))

    def test_relative_residual_of_exact_factors(self):
        factors = [Poly.from_roots([r]) for r in (1, -2, 3)]
        poly = Poly.from_roots([1, -2, 3])
        self.assertEqual(numeric.relative_residual(poly, factors), 0)


if __name__ == "__main__":
    unittest.main()
