import cmath
import math
import os
import random
import sys
import unittest
from itertools import permutations
from pathlib import Path
from unittest import mock

# Ensure the src directory is importable when running `python -m unittest`.
REPO_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = REPO_ROOT / "src"
if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from splitcircle import factorizer  # noqa: E402  # Imported after sys.path adjustment.
from splitcircle.config import SolverConfig  # noqa: E402
from splitcircle.errors import SplitFailed  # noqa: E402
from splitcircle.numeric import Poly, monic, relative_residual  # noqa: E402

SLOW = os.environ.get("SPLITCIRCLE_SLOW_TESTS") == "1"


def _match_error(found, expected):
    """Largest distance under the best one-to-one assignment (small inputs only)."""
    found = [complex(r) for r in found]
    best = math.inf
    for order in permutations(range(len(found))):
        worst = max(abs(found[i] - e) for i, e in zip(order, expected))
        best = min(best, worst)
    return best


def _greedy_match_error(found, expected):
    remaining = [complex(r) for r in found]
    worst = 0.0
    for e in expected:
        nearest = min(remaining, key=lambda r: abs(r - e))
        remaining.remove(nearest)
        worst = max(worst, abs(nearest - e))
    return worst


class TestFact(unittest.TestCase):
    def test_linear_input_is_returned(self):
        poly = Poly.from_values([-6, 3])
        result = factorizer.fact(poly, 1e-10)
        self.assertEqual(len(result), 1)
        self.assertIs(result.factors[0], poly)
        self.assertEqual(result.residual, 0)
        self.assertEqual(complex(result.roots.roots[0]), 2)

    def test_cubic(self):
        poly = Poly.from_values([0, -1, 0, 1])
        result = factorizer.fact(poly, 1e-10)
        self.assertEqual(len(result), 3)
        self.assertTrue(all(f.degree == 1 for f in result.factors))
        self.assertLess(result.residual, 1e-10)
        self.assertLess(_match_error(result.roots, [-1, 0, 1]), 1e-8)

    def test_factors_are_sorted_by_root(self):
        result = factorizer.fact(Poly.from_roots([2, -1, 0.5j]), 1e-10)
        keys = [(float(r.real), float(r.imag)) for r in result.roots]
        self.assertEqual(keys, sorted(keys))

    def test_non_monic_keeps_leading_coefficient(self):
        poly = Poly.from_roots([1, -0.5, 0.25j], lead=2)
        eps = 1e-12
        result = factorizer.fact(poly, eps)
        self.assertLess(result.residual, eps)
        self.assertLess(abs(result.leading - 2), 2 * eps * 3)
        for factor in result.factors[1:]:
            self.assertEqual(factor.leading, 1)
        self.assertLess(_match_error(result.roots, [1, -0.5, 0.25j]), 1e-9)

    def test_small_grid(self):
        expected = [j / 8 for j in range(1, 7)]
        result = factorizer.fact(Poly.from_roots(expected), 1e-12)
        self.assertLess(result.residual, 1e-12)
        self.assertLess(_greedy_match_error(result.roots, expected), 1e-4)

    def test_split_tolerance_budget(self):
        poly = Poly.from_roots([0.3, -0.7j, 1.5, -2 + 1j])
        eps = 1e-10
        target = monic(poly)
        snapshots = []
        factorizer.fact(poly, eps, observer=lambda factors: snapshots.append(list(factors)))
        self.assertEqual(len(snapshots), 3)
        for factors in snapshots:
            share = len(factors) / poly.degree
            self.assertLess(relative_residual(target, factors, target.precision.doubled()), share * eps)

    def test_failure_names_subproblem(self):
        poly = Poly.from_roots([0.5, 1.5, -3])
        with self.assertRaises(SplitFailed) as caught:
            factorizer.fact(poly, 1e-10, SolverConfig(sample_ceiling=1))
        self.assertIn("degree 3", str(caught.exception))

    def test_final_residual_is_checked(self):
        poly = Poly.from_values([0, -1, 0, 1])
        with mock.patch.object(factorizer, "verify_residual", return_value=0.5):
            with self.assertRaises(SplitFailed) as caught:
                factorizer.fact(poly, 1e-10)
        self.assertIn("degree 3", str(caught.exception))

    def test_rejects_bad_arguments(self):
        with self.assertRaises(ValueError):
            factorizer.fact(Poly.from_values([1]), 1e-10)
        with self.assertRaises(ValueError):
            factorizer.fact(Poly.from_values([1, 1]), 0)


class TestRoots(unittest.TestCase):
    def test_imaginary_pair(self):
        found = factorizer.roots(Poly.from_values([1, 0, 1]), 1e-12)
        self.assertEqual(len(found), 2)
        self.assertLess(_match_error(found, [1j, -1j]), 1e-10)

    def test_double_root_cluster(self):
        eps = 1e-16
        result = factorizer.fact(Poly.from_roots([1, 1]), eps)
        self.assertLess(result.residual, eps)
        for root in result.roots:
            self.assertLess(abs(complex(root) - 1), 1e-6)

    def test_root_at_origin(self):
        found = factorizer.roots(Poly.from_values([0, 1]), 0.1)
        self.assertEqual([complex(r) for r in found], [0])


class TestVerifyResidual(unittest.TestCase):
    def test_exact_factors(self):
        poly = Poly.from_roots([1, 2, 3])
        factors = [Poly.from_roots([r]) for r in (1, 2, 3)]
        self.assertEqual(factorizer.verify_residual(poly, factors), 0)

    def test_perturbed_factor(self):
        poly = Poly.from_values([0, -1, 0, 1])
        result = factorizer.fact(poly, 1e-10)
        self.assertLess(factorizer.verify_residual(poly, result.factors), 1e-10)
        shifted_root = -complex(result.factors[0].coeff(0)) / complex(result.factors[0].coeff(1)) + 1e-3
        perturbed = [Poly.from_roots([shifted_root])] + list(result.factors[1:])
        self.assertGreater(factorizer.verify_residual(poly, perturbed), 1e-4)


@unittest.skipUnless(SLOW, "set SPLITCIRCLE_SLOW_TESTS=1 to run acceptance-scale factorisations")
class TestAcceptance(unittest.TestCase):
    def test_random_annulus_roots(self):
        """Fifty polynomials per degree; every intermediate factor list stays within its share of eps."""
        rng = random.Random(1)
        eps = 1e-20
        for degree in (2, 4, 8, 16, 32):
            for case in range(50):
                roots = [
                    math.exp(rng.uniform(math.log(0.1), math.log(10))) * cmath.exp(2j * math.pi * rng.random())
                    for _ in range(degree)
                ]
                poly = Poly.from_roots(roots)
                snapshots = []
                result = factorizer.fact(poly, eps, observer=lambda factors: snapshots.append(list(factors)))
                self.assertEqual(len(result), degree)
                self.assertLess(factorizer.verify_residual(poly, result.factors), eps, f"degree {degree} case {case}")
                self.assertEqual(len(snapshots), degree - 1)
                for factors in snapshots:
                    share = len(factors) / degree
                    residual = relative_residual(poly, factors, poly.precision.doubled())
                    self.assertLess(residual, share * eps, f"degree {degree} case {case}")

    def test_wilkinson_sixteen(self):
        expected = [j / 16 for j in range(1, 17)]
        eps = 1e-30
        result = factorizer.fact(Poly.from_roots(expected), eps)
        self.assertLess(result.residual, eps)
        self.assertLess(_greedy_match_error(result.roots, expected), 1e-20)


if __name__ == "__main__":
    unittest.main()
