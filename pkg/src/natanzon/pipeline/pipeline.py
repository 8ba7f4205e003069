import logging
import math

import numpy as np

import natanzon.errors as nzerr
from natanzon.algebra import bch_check_1, bch_check_2, commutator_check
from natanzon.csv import Table
from natanzon.green import green_function, green_jump, kernel_identity_check, pole_check
from natanzon.oracle import Grid, compare_spectrum, convergence_order
from natanzon.pipeline.config import RunConfig
from natanzon.potential import (NatanzonParams, CoordinateMap, SpecialCase, build_change_of_variable,
                                closed_form_h, potential_values, V_of_r, MapConfig)
from natanzon.spectrum import spectrum, closed_form_spectrum

logger = logging.getLogger(__name__)

# Reference members of the three solvable sub-families
OSCILLATOR = NatanzonParams(g1=0.0, g2=1.0, sigma1=1.0, sigma2=0.0, c0=0.0, eta=0.25)
COULOMB = NatanzonParams(g1=-2.0, g2=0.0, sigma1=0.0, sigma2=1.0, c0=0.0, eta=1.0)
MORSE = NatanzonParams(g1=-6.0, g2=1.0, sigma1=0.0, sigma2=0.0, c0=1.0, eta=0.0)
CANONICAL = {SpecialCase.OSCILLATOR: OSCILLATOR,
             SpecialCase.COULOMB: COULOMB,
             SpecialCase.MORSE: MORSE}

# Energies between the two lowest levels
MID_GAP = {SpecialCase.OSCILLATOR: (5.0, 1.5),
           SpecialCase.COULOMB: (-0.12, 2.0)}

FD_GRIDS = {SpecialCase.OSCILLATOR: (Grid(1e-8, 12.0, 2000), 2),
            SpecialCase.COULOMB: (Grid(1e-4, 120.0, 4000), 1),
            SpecialCase.MORSE: (Grid(-8.0, 4.0, 2000), 1)}

# Points away from r' where -G'' + (V - e) G must vanish
HOMOGENEOUS_POINTS = {SpecialCase.OSCILLATOR: [0.8, 2.5],
                      SpecialCase.COULOMB: [1.0, 4.0]}

# Full quartic R; lowest levels near -3.8 and -1.6, continuum from 4/3
GENERAL = NatanzonParams(g1=-20.0, g2=2.0, sigma1=0.5, sigma2=1.0, c0=1.5, eta=2.0)
GENERAL_FD = (Grid(-20.0, 30.0, 5000), 1)

MAP_SAMPLES = {SpecialCase.OSCILLATOR: [0.5, 1.0, 2.0, 3.0],
               SpecialCase.COULOMB: [0.5, 1.0, 5.0, 20.0],
               SpecialCase.MORSE: [-2.0, -0.5, 0.5, 2.0]}

SEED = 20240611

class Check():
    def __init__(self, name: str, value: float, tolerance: float):
        self.name = name
        self.value = value
        self.tolerance = tolerance
        self.passed = math.isfinite(value) and value <= tolerance

    def as_dict(self) -> dict[str, any]:
        return {"name": self.name,
                "passed": self.passed,
                "value": self.value if math.isfinite(self.value) else None,
                "tolerance": self.tolerance}

def _rel_err(x: float, ref: float) -> float:
    return abs(x - ref) / abs(ref) if ref != 0 else abs(x)

class Pipeline():
    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self._params: NatanzonParams = None
        self._map: CoordinateMap = None

    @property
    def params(self) -> NatanzonParams:
        if self._params is None:
            self._params = self.config.params
        return self._params

    @property
    def coordinate_map(self) -> CoordinateMap:
        if self._map is None:
            self._map = build_change_of_variable(self.params, self.config.map)
        return self._map

    def potential_table(self) -> Table:
        """Rows (r, h(r), V(r)) in the configured order."""
        rs = np.array(self.config.potential.points(), dtype=float)
        hs = self.coordinate_map.h_of_r_many(rs)
        vs = potential_values(self.params, self.coordinate_map, rs)
        return Table(["r", "h", "V"], [[float(r), float(h), float(v)] for r, h, v in zip(rs, hs, vs)])

    def spectrum_table(self) -> Table:
        table = Table(["n", "epsilon", "residual", "threshold_flag"])
        for level in spectrum(self.params, self.config.n_max):
            table.append([level.n, level.epsilon, level.residual, level.threshold])
        return table

    def green_table(self) -> Table:
        g = self.config.green
        if g.epsilon is None:
            raise nzerr.MissingRequiredKey("epsilon")
        if not g.r_values or not g.r_prime_values:
            raise nzerr.UsageError("No points: give at least one r and one r prime")
        table = Table(["r", "r_prime", "epsilon", "re", "im"])
        for r_prime in g.r_prime_values:
            for r in g.r_values:
                v = green_function(self.params, self.coordinate_map, r, r_prime, g.epsilon).value
                table.append([r, r_prime, g.epsilon, v.real, v.imag])
        return table

    def verify(self) -> dict[str, any]:
        """Run every built-in check on the reference potentials.

        Returns {"passed": bool, "checks": [...]}; the caller decides what failure means."""
        factor = self.config.verify.tolerance_factor
        checks = []
        for step in (self._check_maps, self._check_closed_forms, self._check_poles,
                     self._check_fd, self._check_convergence, self._check_jump,
                     self._check_homogeneous, self._check_kernel_identity, self._check_algebra):
            for name, value, tolerance in step():
                check = Check(name, value, tolerance * factor)
                logger.info(f"{name}: {value!r} (tolerance {check.tolerance!r}) "
                            f"{'ok' if check.passed else 'FAILED'}")
                checks.append(check)
        return {"passed": all(c.passed for c in checks),
                "checks": [c.as_dict() for c in checks]}

    def _check_maps(self):
        for kind, params in CANONICAL.items():
            cmap = build_change_of_variable(params, MapConfig())
            err = max(_rel_err(cmap.h_of_r(r), closed_form_h(kind, params, r)) for r in MAP_SAMPLES[kind])
            yield f"map {kind}", err, 1e-10

    def _check_closed_forms(self):
        for kind, params in CANONICAL.items():
            err = 0.0
            for level in spectrum(params, 5):
                err = max(err, _rel_err(level.epsilon, closed_form_spectrum(kind, params, level.n)))
            yield f"closed form {kind}", err, 1e-10

    def _check_poles(self):
        for kind, params in CANONICAL.items():
            worst = max(pole_check(params, level) for level in spectrum(params, 5))
            yield f"pole alignment {kind}", worst, 1e-8

    def _check_fd(self):
        cases = [(f"{kind}", CANONICAL[kind], grid, n_max) for kind, (grid, n_max) in FD_GRIDS.items()]
        cases.append(("general", GENERAL, *GENERAL_FD))
        for name, params, grid, n_max in cases:
            report = compare_spectrum(params, n_max, grid)
            # An empty comparison fails
            yield f"finite differences {name}", max((r.diff for r in report.rows), default=math.inf), 1e-3

    def _check_convergence(self):
        params = NatanzonParams(g1=0.0, g2=1.0, sigma1=1.0, sigma2=0.0, c0=0.0, eta=2.25)
        cmap = build_change_of_variable(params)
        order = convergence_order(params, cmap, Grid(0.0, 10.0, 399), 0, refinements=2)
        yield "finite difference order", abs(order - 2.0), 0.3

    def _check_jump(self):
        for kind, (epsilon, r_prime) in MID_GAP.items():
            params = CANONICAL[kind]
            cmap = build_change_of_variable(params)
            jump = green_jump(params, cmap, r_prime, epsilon)
            yield f"derivative jump {kind}", abs(jump - 1j), 1e-4

    def _check_homogeneous(self):
        step = 1e-3
        for kind, (epsilon, r_prime) in MID_GAP.items():
            params = CANONICAL[kind]
            cmap = build_change_of_variable(params)
            G = lambda r: (1j * green_function(params, cmap, r, r_prime, epsilon).value).real
            samples = {r: (G(r - step), G(r), G(r + step)) for r in HOMOGENEOUS_POINTS[kind]}
            scale = max(abs(v) for triple in samples.values() for v in triple)
            worst = 0.0
            for r, (below, centre, above) in samples.items():
                second = (above - 2.0 * centre + below) / (step * step)
                residual = -second + (V_of_r(params, cmap, r) - epsilon) * centre
                worst = max(worst, abs(residual) / scale)
            yield f"homogeneous equation {kind}", worst, 1e-4

    def _check_kernel_identity(self):
        worst = 0.0
        for x in (0.2, 0.5, 1.0):
            for dy in (0.5, 1.0):
                for gamma in (0.4, 0.75, 1.2):
                    for p in (0.3, 1.0, 2.0):
                        worst = max(worst, kernel_identity_check(x, x + dy, gamma, p)["rel_err"])
        yield "kernel identity", worst, 1e-8

    def _check_algebra(self):
        yield "commutators", max(commutator_check()), 1e-14
        a_scale = self.config.verify.bch_a_scale
        worst = 0.0
        for omega in np.linspace(0.2, 2.0, 10):
            for S in np.linspace(0.0, 1.4 / omega, 10):
                worst = max(worst, bch_check_1(float(omega), float(S), a_scale))
        yield "disentangling 1", worst, 1e-12
        rng = np.random.default_rng(SEED)
        worst = 0.0
        for _ in range(100):
            tau = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
            worst = max(worst, bch_check_2(tau, float(rng.uniform(-1.0, 1.0))))
        yield "disentangling 2", worst, 1e-12
