import math
import unittest

import numpy as np

import natanzon.errors as nzerr
from natanzon.oracle import Grid, compare_spectrum
from natanzon.potential import NatanzonParams, SpecialCase
from natanzon.spectrum import (quantization_residual, quartic_coefficients, solve_level, spectrum,
                               closed_form_spectrum, branch_admissible)

def oscillator(g1=0.0, g2=1.0, sigma1=1.0, eta=0.25):
    return NatanzonParams(g1=g1, g2=g2, sigma1=sigma1, sigma2=0.0, c0=0.0, eta=eta)

def coulomb(g1=-2.0, g2=0.0, sigma2=1.0, eta=1.0):
    return NatanzonParams(g1=g1, g2=g2, sigma1=0.0, sigma2=sigma2, c0=0.0, eta=eta)

def morse(g1=-6.0, g2=1.0, c0=1.0, eta=0.0):
    return NatanzonParams(g1=g1, g2=g2, sigma1=0.0, sigma2=0.0, c0=c0, eta=eta)

def random_general(rng):
    """Full quartic: sigma2, sigma1 and c0 all non-zero, R > 0 on h > 0."""
    return NatanzonParams(g1=rng.uniform(-30.0, -10.0), g2=rng.uniform(0.5, 3.0), sigma1=rng.uniform(0.1, 1.0),
                          sigma2=rng.uniform(0.5, 1.5), c0=rng.uniform(1.0, 2.0), eta=rng.uniform(0.5, 3.0))

def continuum_edge(params):
    return min(params.g2 / params.sigma2, params.eta / params.c0)

# R(h) = h + 1: Morse-like for h -> 0, oscillator-like for h -> infinity
GENERAL = NatanzonParams(g1=-20.0, g2=1.0, sigma1=1.0, sigma2=0.0, c0=1.0, eta=0.0)

class TestResidual(unittest.TestCase):

    def test_values(self):
        self.assertEqual(quantization_residual(oscillator(), 3.0, 0), 0.0)
        self.assertAlmostEqual(quantization_residual(oscillator(), 4.0, 0), -0.5, places=15)
        self.assertAlmostEqual(quantization_residual(coulomb(), -0.25, 0), 0.0, places=15)
        self.assertAlmostEqual(quantization_residual(morse(), -4.0, 0), 0.0, places=15)

    def test_radicands(self):
        with self.assertRaises(nzerr.RadicandError):
            quantization_residual(coulomb(), 0.5, 0)
        with self.assertRaises(nzerr.RadicandError):
            quantization_residual(morse(), 0.5, 0)
        self.assertTrue(branch_admissible(morse(), 0.0))
        self.assertFalse(branch_admissible(morse(), 1e-3))

class TestQuartic(unittest.TestCase):

    def test_oscillator_is_linear(self):
        self.assertEqual(quartic_coefficients(oscillator(), 0), [0.0, 0.0, 0.0, -1.0, 3.0])

    def test_general_is_quartic(self):
        params = NatanzonParams(g1=-1.0, g2=2.0, sigma1=0.5, sigma2=0.3, c0=0.2, eta=1.5)
        coeffs = quartic_coefficients(params, 1)
        self.assertEqual(len(coeffs), 5)
        self.assertNotEqual(coeffs[0], 0.0)

    def test_level_is_a_root(self):
        for params in (oscillator(eta=2.25), coulomb(eta=0.5), morse(g1=-10.0), GENERAL):
            for level in spectrum(params, 3):
                value = np.polyval(quartic_coefficients(params, level.n), level.epsilon)
                scale = np.polyval(np.abs(quartic_coefficients(params, level.n)), abs(level.epsilon))
                self.assertLessEqual(abs(value), 1e-9 * scale)

class TestLevels(unittest.TestCase):

    def test_oscillator(self):
        levels = spectrum(oscillator(), 3)
        self.assertEqual([lv.n for lv in levels], [0, 1, 2, 3])
        for lv, expected in zip(levels, [3.0, 7.0, 11.0, 15.0]):
            self.assertAlmostEqual(lv.epsilon, expected, places=12)
            self.assertLessEqual(lv.residual, 1e-9)
            self.assertFalse(lv.threshold)

    def test_coulomb(self):
        levels = spectrum(coulomb(), 4)
        for lv in levels:
            self.assertAlmostEqual(lv.epsilon, -1.0 / (2 * lv.n + 2) ** 2, places=13)
        self.assertEqual(len(levels), 5)

    def test_morse(self):
        levels = spectrum(morse(), 5)
        self.assertEqual(len(levels), 2)
        self.assertAlmostEqual(levels[0].epsilon, -4.0, places=12)
        self.assertFalse(levels[0].threshold)
        self.assertAlmostEqual(levels[1].epsilon, 0.0, places=12)
        self.assertTrue(levels[1].threshold)

    def test_eta_zero_is_not_threshold(self):
        # With c0 = 0 a vanishing eta is a constant radicand, the levels are ordinary bound states
        for lv, expected in zip(spectrum(oscillator(eta=0.0), 2), [2.0, 6.0, 10.0]):
            self.assertAlmostEqual(lv.epsilon, expected, places=12)
            self.assertFalse(lv.threshold)
        levels = spectrum(coulomb(eta=0.0), 2)
        self.assertEqual(len(levels), 3)
        for lv in levels:
            self.assertAlmostEqual(lv.epsilon, -1.0 / (2 * lv.n + 1) ** 2, places=13)
            self.assertFalse(lv.threshold)

    def test_general(self):
        # sqrt(-e) = s with s^2/2 + s - (10 - (2n+1)) = 0
        levels = spectrum(GENERAL, 8)
        self.assertEqual(len(levels), 5)
        for lv in levels:
            s = -1.0 + math.sqrt(1.0 + 2.0 * (9 - 2 * lv.n))
            self.assertAlmostEqual(lv.epsilon, -s * s, places=11)

    def test_general_random(self):
        rng = np.random.default_rng(11)
        checked = 0
        for _ in range(200):
            params = random_general(rng)
            levels = spectrum(params, 30)
            if not levels:
                continue
            eps = [lv.epsilon for lv in levels]
            self.assertTrue(all(a < b for a, b in zip(eps, eps[1:])), str(params))
            for lv in levels:
                self.assertLessEqual(lv.residual, 1e-9)
                self.assertLess(lv.epsilon, continuum_edge(params) + 1e-9)
                coeffs = quartic_coefficients(params, lv.n)
                scale = np.polyval(np.abs(coeffs), abs(lv.epsilon))
                self.assertLessEqual(abs(np.polyval(coeffs, lv.epsilon)), 1e-9 * scale)
            checked += 1
            if checked == 50:
                break
        self.assertEqual(checked, 50)

    def test_no_level(self):
        self.assertIsNone(solve_level(morse(g1=2.0), 0))
        self.assertEqual(spectrum(morse(g1=2.0), 3), [])

    def test_negative_n(self):
        with self.assertRaises(nzerr.PreconditionError):
            solve_level(oscillator(), -1)
        with self.assertRaises(nzerr.PreconditionError):
            spectrum(oscillator(), -1)

    def test_increasing(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            params = NatanzonParams(g1=rng.uniform(-3, 3), g2=rng.uniform(0.5, 3), sigma1=rng.uniform(0.5, 2),
                                    sigma2=0.0, c0=0.0, eta=rng.uniform(0, 3))
            eps = [lv.epsilon for lv in spectrum(params, 6)]
            self.assertEqual(len(eps), 7)
            self.assertTrue(all(a < b for a, b in zip(eps, eps[1:])))

class TestClosedForm(unittest.TestCase):

    def test_agreement(self):
        cases = [(SpecialCase.OSCILLATOR, oscillator(g1=0.7, g2=2.0, sigma1=1.5, eta=1.3)),
                 (SpecialCase.COULOMB, coulomb(g1=-3.0, g2=0.4, sigma2=2.0, eta=0.6)),
                 (SpecialCase.MORSE, morse(g1=-12.0, g2=1.5, c0=2.0, eta=0.7))]
        for kind, params in cases:
            for lv in spectrum(params, 5):
                expected = closed_form_spectrum(kind, params, lv.n)
                self.assertLessEqual(abs(lv.epsilon - expected), 1e-10 * max(1.0, abs(expected)),
                                     f"{kind} n={lv.n}")

    def test_wrong_kind(self):
        with self.assertRaises(nzerr.PreconditionError):
            closed_form_spectrum(SpecialCase.COULOMB, oscillator(), 0)
        with self.assertRaises(nzerr.PreconditionError):
            closed_form_spectrum(SpecialCase.GENERAL, GENERAL, 0)

    def test_missing_morse_level(self):
        with self.assertRaises(nzerr.DomainError):
            closed_form_spectrum(SpecialCase.MORSE, morse(), 2)

class TestFiniteDifferences(unittest.TestCase):

    def test_random_general(self):
        # Only levels at least 1 below the continuum, so the box (-20, 30) holds them
        rng = np.random.default_rng(5)
        grid = Grid(-20.0, 30.0, 5000)
        compared = 0
        for _ in range(200):
            params = random_general(rng)
            deep = [lv for lv in spectrum(params, 30) if continuum_edge(params) - lv.epsilon >= 1.0]
            if not deep:
                continue
            report = compare_spectrum(params, len(deep) - 1, grid)
            self.assertEqual(len(report.rows), len(deep))
            self.assertTrue(report.ok, [str(r) for r in report.rows])
            for row in report.rows:
                self.assertLess(row.diff, 1e-3, str(params))
            compared += 1
            if compared == 10:
                break
        self.assertEqual(compared, 10)

    def test_general(self):
        report = compare_spectrum(GENERAL, 1, Grid(-10.0, 8.0, 3000))
        self.assertEqual(len(report.rows), 2)
        self.assertTrue(report.ok, [str(r) for r in report.rows])
        for row in report.rows:
            self.assertLess(row.diff, 1e-3)

if __name__ == '__main__':
    unittest.main()
