import contextlib
import csv
import io
import json
import unittest

from natanzon.pipeline.cli import main

def run_cli(argv: list[str]) -> tuple[int, str]:
    out = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
        code = main(argv)
    return code, out.getvalue()

OSCILLATOR_FLAGS = ['--g1', '0', '--g2', '1', '--sigma1', '1', '--sigma2', '0', '--c0', '0', '--eta', '0.25']

class TestCli(unittest.TestCase):

    def test_spectrum(self):
        code, out = run_cli(['spectrum', '-c', 'tests/pipeline/oscillator.yaml'])
        self.assertEqual(code, 0)
        rows = list(csv.DictReader(io.StringIO(out)))
        self.assertEqual([int(r["n"]) for r in rows], [0, 1, 2, 3])
        for row, expected in zip(rows, [3.0, 7.0, 11.0, 15.0]):
            self.assertAlmostEqual(float(row["epsilon"]), expected, places=12)
            self.assertEqual(row["threshold_flag"], "false")

    def test_morse_threshold(self):
        code, out = run_cli(['spectrum', '-c', 'tests/pipeline/morse.yaml'])
        self.assertEqual(code, 0)
        rows = json.loads(out)["rows"]
        self.assertEqual(len(rows), 2)
        self.assertTrue(rows[1]["threshold_flag"])

    def test_flags_win_over_file(self):
        code, out = run_cli(['spectrum', '-c', 'tests/pipeline/oscillator.yaml', '--n-max', '0', '--g1', '1'])
        self.assertEqual(code, 0)
        rows = list(csv.DictReader(io.StringIO(out)))
        self.assertEqual(len(rows), 1)
        self.assertAlmostEqual(float(rows[0]["epsilon"]), 4.0, places=12)

    def test_deterministic(self):
        argv = ['potential', *OSCILLATOR_FLAGS, '--r', '0.5', '1', '2']
        self.assertEqual(run_cli(argv), run_cli(argv))

    def test_json_matches_csv(self):
        argv = ['green', '-c', 'tests/pipeline/oscillator.yaml']
        code_csv, out_csv = run_cli(argv)
        code_json, out_json = run_cli(argv + ['--format', 'json'])
        self.assertEqual((code_csv, code_json), (0, 0))
        rows_csv = list(csv.DictReader(io.StringIO(out_csv)))
        rows_json = json.loads(out_json)["rows"]
        self.assertEqual(len(rows_csv), 2)
        for a, b in zip(rows_csv, rows_json):
            for column in ("r", "r_prime", "epsilon", "re", "im"):
                self.assertEqual(float(a[column]), b[column])
            self.assertGreater(-float(a["im"]), 0.0)

    def test_potential(self):
        code, out = run_cli(['potential', *OSCILLATOR_FLAGS, '--r', '1', '2'])
        self.assertEqual(code, 0)
        rows = list(csv.DictReader(io.StringIO(out)))
        self.assertAlmostEqual(float(rows[0]["h"]), 1.0, places=10)
        self.assertAlmostEqual(float(rows[1]["V"]), 4.0, places=9)

    def test_green_far_below_spectrum(self):
        for fmt in ("csv", "json"):
            code, out = run_cli(['green', *OSCILLATOR_FLAGS, '--r', '1', '--r-prime', '1.5',
                                 '--epsilon', '-700', '--format', fmt])
            self.assertEqual(code, 0)
            self.assertNotIn("nan", out)
        im = json.loads(out)["rows"][0]["im"]
        self.assertTrue(-1e-7 < im < 0.0)

    def test_usage_errors(self):
        self.assertEqual(run_cli([])[0], 1)
        self.assertEqual(run_cli(['spectrum', '--bogus'])[0], 1)
        self.assertEqual(run_cli(['spectrum', '-c', 'tests/pipeline/unknown_key.yaml'])[0], 1)
        self.assertEqual(run_cli(['spectrum', '--g1', '0'])[0], 1)

    def test_domain_errors(self):
        # epsilon = 3 is the ground state, where G has a pole
        self.assertEqual(run_cli(['green', *OSCILLATOR_FLAGS, '--r', '1', '--r-prime', '1.5',
                                  '--epsilon', '3'])[0], 2)
        self.assertEqual(run_cli(['potential', *OSCILLATOR_FLAGS, '--r', '-1'])[0], 2)

    def test_verify(self):
        code, out = run_cli(['verify'])
        self.assertEqual(code, 0, out)
        summary = json.loads(out)
        self.assertTrue(summary["passed"])
        self.assertTrue(all(c["passed"] for c in summary["checks"]))

    def test_verify_negative_control(self):
        code, out = run_cli(['verify', '--bch-a-scale', '1.01'])
        self.assertEqual(code, 3)
        failed = [c["name"] for c in json.loads(out)["checks"] if not c["passed"]]
        self.assertEqual(failed, ["disentangling 1"])

if __name__ == '__main__':
    unittest.main()
