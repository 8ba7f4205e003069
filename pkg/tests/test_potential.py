import math
import unittest

import numpy as np

import natanzon.errors as nzerr
from natanzon.potential import (NatanzonParams, SpecialCase, MapConfig, R_of_h, V_of_h, V_of_r, r_of_h,
                                h_of_r, positive_intervals, build_change_of_variable, classify_special_case,
                                closed_form_h, potential_values)

def oscillator(g1=0.0, g2=1.0, sigma1=1.0, eta=0.25):
    return NatanzonParams(g1=g1, g2=g2, sigma1=sigma1, sigma2=0.0, c0=0.0, eta=eta)

def coulomb(g1=-2.0, g2=0.0, sigma2=1.0, eta=1.0):
    return NatanzonParams(g1=g1, g2=g2, sigma1=0.0, sigma2=sigma2, c0=0.0, eta=eta)

def morse(g1=-6.0, g2=1.0, c0=1.0, eta=0.0):
    return NatanzonParams(g1=g1, g2=g2, sigma1=0.0, sigma2=0.0, c0=c0, eta=eta)

class TestParams(unittest.TestCase):

    def test_delta(self):
        p = NatanzonParams(g1=1, g2=2, sigma1=3, sigma2=2, c0=1, eta=0)
        self.assertEqual(p.delta, 9 - 8)

    def test_all_zero_is_invalid(self):
        with self.assertRaises(nzerr.InvalidParams):
            NatanzonParams(g1=1, g2=1, sigma1=0, sigma2=0, c0=0, eta=1)

    def test_invalid_params_is_domain_error(self):
        self.assertEqual(nzerr.InvalidParams().exit_code, 2)

    def test_immutable(self):
        p = oscillator()
        with self.assertRaises(AttributeError):
            p.g1 = 3.0

    def test_equality(self):
        self.assertEqual(oscillator(), oscillator())
        self.assertNotEqual(oscillator(), oscillator(eta=1.0))

    def test_classify(self):
        self.assertEqual(classify_special_case(oscillator()), SpecialCase.OSCILLATOR)
        self.assertEqual(classify_special_case(coulomb()), SpecialCase.COULOMB)
        self.assertEqual(classify_special_case(morse()), SpecialCase.MORSE)
        general = NatanzonParams(g1=0, g2=1, sigma1=1, sigma2=1, c0=1, eta=0)
        self.assertEqual(classify_special_case(general), SpecialCase.GENERAL)
        self.assertEqual(str(SpecialCase.MORSE), "Morse")

class TestR(unittest.TestCase):

    def test_R_of_h(self):
        self.assertEqual(R_of_h(NatanzonParams(0, 0, 1, 0, 0, 0), 4.0), 4.0)
        self.assertEqual(R_of_h(NatanzonParams(0, 0, 0, 1, 0, 0), 3.0), 9.0)
        self.assertEqual(R_of_h(NatanzonParams(0, 0, -3, 2, 1, 0), 1.0), 0.0)

    def test_positive_intervals(self):
        p = NatanzonParams(g1=0, g2=1, sigma1=-3, sigma2=1, c0=1, eta=0)
        small, large = (3 - math.sqrt(5)) / 2, (3 + math.sqrt(5)) / 2
        intervals = positive_intervals(p)
        self.assertEqual(len(intervals), 2)
        self.assertEqual(intervals[0][0], 0.0)
        self.assertAlmostEqual(intervals[0][1], small, places=14)
        self.assertAlmostEqual(intervals[1][0], large, places=14)
        self.assertEqual(intervals[1][1], math.inf)

    def test_positive_intervals_none(self):
        p = NatanzonParams(g1=0, g2=1, sigma1=0, sigma2=-1, c0=-1, eta=0)
        self.assertEqual(positive_intervals(p), [])
        with self.assertRaises(nzerr.DomainError):
            build_change_of_variable(p)

    def test_interior_positive(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            s1, s2, c0 = rng.uniform(-3, 3, 3)
            p = NatanzonParams(g1=0, g2=1, sigma1=s1, sigma2=s2, c0=c0, eta=0)
            for lo, hi in positive_intervals(p):
                top = hi if math.isfinite(hi) else lo + 100.0
                for t in np.linspace(lo, top, 12)[1:-1]:
                    self.assertGreater(R_of_h(p, t), 0.0)

class TestRofH(unittest.TestCase):

    def test_oscillator(self):
        self.assertAlmostEqual(r_of_h(oscillator(), 4.0, (0.0, 0.0)), 2.0, places=12)

    def test_coulomb(self):
        p = coulomb(sigma2=4.0)
        self.assertAlmostEqual(r_of_h(p, 3.0, (0.0, 0.0)), 3.0, places=12)

    def test_morse_anchor(self):
        self.assertEqual(r_of_h(morse(), 1.0, (1.0, 0.0)), 0.0)
        self.assertAlmostEqual(r_of_h(morse(), math.e, (1.0, 0.0)), 0.5, places=12)

    def test_divergent_anchor(self):
        with self.assertRaises(nzerr.DomainError):
            r_of_h(morse(), 2.0, (0.0, 0.0))

    def test_path_leaves_domain(self):
        p = NatanzonParams(g1=0, g2=1, sigma1=-3, sigma2=1, c0=1, eta=0)
        with self.assertRaises(nzerr.DomainError):
            r_of_h(p, 0.1, (5.0, 0.0))

class TestCoordinateMap(unittest.TestCase):

    def test_oscillator_domains(self):
        cmap = build_change_of_variable(oscillator())
        self.assertEqual(cmap.h_domain, (0.0, math.inf))
        self.assertEqual(cmap.r_domain, (0.0, math.inf))
        self.assertGreaterEqual(len(cmap.nodes), 512)

    def test_morse_domains(self):
        cmap = build_change_of_variable(morse())
        self.assertEqual(cmap.h_domain, (0.0, math.inf))
        self.assertEqual(cmap.r_domain, (-math.inf, math.inf))
        self.assertEqual(cmap.anchor, (1.0, 0.0))

    def test_anchored_domain(self):
        p = NatanzonParams(g1=0, g2=1, sigma1=-3, sigma2=1, c0=1, eta=0)
        cmap = build_change_of_variable(p, MapConfig(anchor=(5.0, 0.0)))
        self.assertAlmostEqual(cmap.h_domain[0], (3 + math.sqrt(5)) / 2, places=14)
        self.assertEqual(cmap.h_domain[1], math.inf)
        self.assertTrue(math.isfinite(cmap.r_domain[0]))
        self.assertLess(cmap.r_domain[0], 0.0)
        self.assertAlmostEqual(cmap.h_of_r(0.0), 5.0, places=9)

    def test_anchor_outside_positive_region(self):
        p = NatanzonParams(g1=0, g2=1, sigma1=-3, sigma2=1, c0=1, eta=0)
        with self.assertRaises(nzerr.DomainError):
            build_change_of_variable(p, MapConfig(anchor=(1.0, 0.0)))

    def test_nodes_increasing(self):
        p = NatanzonParams(g1=-10, g2=1, sigma1=1, sigma2=1, c0=1, eta=1)
        cmap = build_change_of_variable(p)
        self.assertTrue(np.all(np.diff(cmap.h_nodes) > 0))
        self.assertTrue(np.all(np.diff(cmap.r_nodes) > 0))

    def test_table_rows(self):
        cases = [(SpecialCase.OSCILLATOR, oscillator(sigma1=2.0), [0.1, 0.5, 1.0, 2.0, 4.0]),
                 (SpecialCase.COULOMB, coulomb(sigma2=4.0), [0.01, 0.5, 3.0, 10.0, 50.0]),
                 (SpecialCase.MORSE, morse(c0=2.0), [-5.0, -1.0, 0.0, 1.0, 5.0])]
        for kind, p, rs in cases:
            cmap = build_change_of_variable(p)
            for r in rs:
                expected = closed_form_h(kind, p, r)
                self.assertLessEqual(abs(h_of_r(cmap, r) - expected), 1e-10 * expected, f"{kind} r={r}")

    def test_spec_examples(self):
        self.assertAlmostEqual(build_change_of_variable(oscillator()).h_of_r(2.0), 4.0, places=12)
        self.assertAlmostEqual(build_change_of_variable(coulomb(sigma2=4.0)).h_of_r(3.0), 3.0, places=12)
        self.assertAlmostEqual(build_change_of_variable(morse()).h_of_r(0.0), 1.0, places=14)

    def test_closed_form_h_general(self):
        p = NatanzonParams(g1=0, g2=1, sigma1=1, sigma2=1, c0=1, eta=0)
        with self.assertRaises(nzerr.DomainError):
            closed_form_h(SpecialCase.GENERAL, p, 1.0)

    def test_derivative(self):
        rng = np.random.default_rng(11)
        for p in [oscillator(), coulomb(), morse(),
                  NatanzonParams(g1=-10, g2=1, sigma1=1, sigma2=1, c0=1, eta=1),
                  NatanzonParams(g1=-3, g2=2, sigma1=0.5, sigma2=0.3, c0=0, eta=1)]:
            cmap = build_change_of_variable(p)
            lo = max(cmap.r_domain[0], -6.0)
            for r in rng.uniform(lo + 0.05, 6.0, 100):
                step = 1e-5 * max(1.0, abs(r))
                dh = (cmap.h_of_r(r + step) - cmap.h_of_r(r - step)) / (2 * step)
                h = cmap.h_of_r(r)
                expected = 2 * h / math.sqrt(R_of_h(p, h))
                self.assertLessEqual(abs(dh - expected), 1e-6 * abs(expected), f"{p} r={r}")

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        p = NatanzonParams(g1=-10, g2=1, sigma1=1, sigma2=1, c0=1, eta=1)
        cmap = build_change_of_variable(p)
        for h in np.exp(rng.uniform(-8, 8, 100)):
            r = cmap.r_of_h(h)
            self.assertLessEqual(abs(cmap.h_of_r(r) - h), cmap.tolerance * max(1.0, h))

    def test_many_matches_scalar(self):
        cmap = build_change_of_variable(morse())
        rs = np.linspace(-7.5, 3.5, 57)
        many = cmap.h_of_r_many(rs)
        for r, h in zip(rs, many):
            self.assertLessEqual(abs(h - cmap.h_of_r(r)), 1e-12 * h)

    def test_many_beyond_table(self):
        cmap = build_change_of_variable(oscillator())
        rs = np.array([1e-9, 1e-7, 1.0])
        np.testing.assert_allclose(cmap.h_of_r_many(rs), rs ** 2, rtol=1e-10)
        # The stored table is not modified by the extension
        self.assertGreater(cmap.r_nodes[0], 1e-7)

    def test_out_of_domain(self):
        cmap = build_change_of_variable(oscillator())
        with self.assertRaises(nzerr.OutOfDomain):
            cmap.h_of_r(-1.0)
        with self.assertRaises(nzerr.DomainError):
            cmap.h_of_r_many([1.0, -1.0])

class TestPotential(unittest.TestCase):

    def test_oscillator_values(self):
        p = oscillator()
        cmap = build_change_of_variable(p)
        self.assertAlmostEqual(V_of_r(p, cmap, 1.0), 1.0, places=12)
        self.assertAlmostEqual(V_of_r(p, cmap, 2.0), 4.0, places=12)

    def test_coulomb_value(self):
        p = coulomb()
        cmap = build_change_of_variable(p)
        self.assertAlmostEqual(V_of_r(p, cmap, 2.0), -0.5, places=12)

    def test_morse_value(self):
        p = morse()
        cmap = build_change_of_variable(p)
        self.assertAlmostEqual(V_of_r(p, cmap, 0.0), -5.0, places=12)

    def test_table_potentials(self):
        rs = np.linspace(0.3, 6.0, 20)
        p = oscillator(g1=0.7, g2=2.0, sigma1=1.5, eta=2.0)
        cmap = build_change_of_variable(p)
        expected = p.g1 / p.sigma1 + p.g2 / p.sigma1 ** 2 * rs ** 2 + (p.eta - 0.25) / rs ** 2
        np.testing.assert_allclose(potential_values(p, cmap, rs), expected, rtol=1e-10)

        p = coulomb(g1=-3.0, g2=0.5, sigma2=2.0, eta=3.0)
        cmap = build_change_of_variable(p)
        expected = (p.g2 / p.sigma2 + p.g1 / (2 * math.sqrt(p.sigma2) * rs)
                    + (p.eta - 1) / (4 * rs ** 2))
        np.testing.assert_allclose(potential_values(p, cmap, rs), expected, rtol=1e-10)

        rs = np.linspace(-3.0, 2.0, 20)
        p = morse(g1=-6.0, g2=1.0, c0=2.0, eta=0.5)
        cmap = build_change_of_variable(p)
        h = np.exp(2 * rs / math.sqrt(p.c0))
        expected = (p.g2 * h ** 2 + p.g1 * h + p.eta) / p.c0
        np.testing.assert_allclose(potential_values(p, cmap, rs), expected, rtol=1e-10)

    def test_V_of_h_vectorized(self):
        p = NatanzonParams(g1=-10, g2=1, sigma1=1, sigma2=1, c0=1, eta=1)
        hs = np.array([0.5, 1.0, 2.0])
        np.testing.assert_array_equal(V_of_h(p, hs), [V_of_h(p, h) for h in hs])

    def test_map_for_other_params(self):
        cmap = build_change_of_variable(oscillator())
        with self.assertRaises(nzerr.PreconditionError):
            V_of_r(oscillator(eta=1.0), cmap, 1.0)

if __name__ == '__main__':
    unittest.main()
