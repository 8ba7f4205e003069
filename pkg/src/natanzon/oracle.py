"""Finite-difference reference solver for -d^2/dr^2 + V(r).

Second-order central differences on a uniform grid with Dirichlet
boundaries; eigenvalues by Sturm-sequence bisection (LAPACK stebz)."""
import logging

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal, solve_banded

import natanzon.errors as nzerr
from natanzon.potential import NatanzonParams, CoordinateMap, build_change_of_variable, potential_values
from natanzon.spectrum import spectrum

logger = logging.getLogger(__name__)

MIN_POINTS = 200
BISECTION_TOL = 1e-10
ANALYTIC_TOL = 1e-9

class Grid():
    """Uniform interior grid r_min + i*spacing, i = 1..n_points; the wavefunction vanishes at r_min and r_max."""
    def __init__(self, r_min: float, r_max: float, n_points: int):
        if n_points < MIN_POINTS:
            raise nzerr.InvalidValue("n_points", n_points, f"Need at least {MIN_POINTS} grid points.")
        if not r_min < r_max:
            raise nzerr.InvalidValue("r_max", r_max, f"Must exceed r_min = {r_min!r}.")
        self.r_min = float(r_min)
        self.r_max = float(r_max)
        self.n_points = int(n_points)
        self.spacing = (self.r_max - self.r_min) / (self.n_points + 1)

    def __str__(self):
        return f"Grid({self.r_min!r}, {self.r_max!r}, {self.n_points})"

    @property
    def points(self) -> np.ndarray:
        return self.r_min + self.spacing * np.arange(1, self.n_points + 1)

    def refined(self) -> 'Grid':
        """Same box with half the spacing."""
        return Grid(self.r_min, self.r_max, 2 * self.n_points + 1)

class TridiagonalSystem():
    def __init__(self, diagonal: np.ndarray, off_diagonal: np.ndarray, spacing: float):
        if len(off_diagonal) != len(diagonal) - 1:
            raise nzerr.NumericalError("Off-diagonal must have one entry fewer than the diagonal")
        self.diagonal = diagonal
        self.off_diagonal = off_diagonal
        self.spacing = spacing
        self.diagonal.flags.writeable = False
        self.off_diagonal.flags.writeable = False

    def __len__(self):
        return len(self.diagonal)

def discretize(potential_values: np.ndarray, grid: Grid) -> TridiagonalSystem:
    """Diagonal 2/dr^2 + V(r_i), off-diagonal -1/dr^2."""
    v = np.asarray(potential_values, dtype=float)
    if v.shape != (grid.n_points,):
        raise nzerr.PreconditionError("discretize", f"{grid.n_points} potential values, got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise nzerr.NumericalError("Potential is not finite on the grid")
    inv = 1.0 / (grid.spacing * grid.spacing)
    return TridiagonalSystem(2.0 * inv + v, np.full(grid.n_points - 1, -inv), grid.spacing)

def fd_hamiltonian(params: NatanzonParams, cmap: CoordinateMap, grid: Grid) -> TridiagonalSystem:
    lo, hi = cmap.r_domain
    if grid.r_min < lo or grid.r_max > hi:
        raise nzerr.OutOfDomain("grid", (grid.r_min, grid.r_max), cmap.r_domain)
    return discretize(potential_values(params, cmap, grid.points), grid)

def lowest_eigenvalues(system: TridiagonalSystem, k: int, tol: float = BISECTION_TOL) -> list[float]:
    if k < 1:
        raise nzerr.PreconditionError("lowest_eigenvalues", f"k >= 1, got {k}")
    k = min(k, len(system))
    w = eigvalsh_tridiagonal(system.diagonal, system.off_diagonal, select='i',
                             select_range=(0, k - 1), lapack_driver='stebz', tol=tol)
    return [float(x) for x in w]

def wall_shift(system: TridiagonalSystem, grid: Grid, r_domain: tuple[float, float], k: int,
               tol: float = BISECTION_TOL) -> list[float]:
    """First-order rise of the lowest k eigenvalues from the Dirichlet walls.

    A wall at r_min above a finite lower end of the domain lifts a level by
    psi'(r_min)^2 (r_min - lo), and likewise at r_max. The slope comes from
    the normalized eigenvector: psi' ~ v_1 / dr^(3/2). Infinite ends give 0."""
    lo, hi = r_domain
    gaps = (grid.r_min - lo if np.isfinite(lo) else 0.0, hi - grid.r_max if np.isfinite(hi) else 0.0)
    if gaps == (0.0, 0.0):
        return [0.0] * min(k, len(system))
    k = min(k, len(system))
    _, v = eigh_tridiagonal(system.diagonal, system.off_diagonal, select='i',
                            select_range=(0, k - 1), lapack_driver='stebz', tol=tol)
    cube = system.spacing ** 3
    return [float((v[0, j] ** 2 * gaps[0] + v[-1, j] ** 2 * gaps[1]) / cube) for j in range(k)]

def count_below(system: TridiagonalSystem, threshold: float) -> int:
    """Number of eigenvalues strictly below threshold (Sturm count)."""
    off = np.abs(system.off_diagonal)
    radius = np.concatenate([off, [0.0]]) + np.concatenate([[0.0], off])
    lower = float(np.min(system.diagonal - radius)) - 1.0
    if threshold <= lower:
        return 0
    w = eigvalsh_tridiagonal(system.diagonal, system.off_diagonal, select='v',
                             select_range=(lower, threshold), lapack_driver='stebz', tol=BISECTION_TOL)
    # select='v' counts (lower, threshold]
    return int(np.count_nonzero(w < threshold))

def resolvent_column(system: TridiagonalSystem, epsilon: float, index: int) -> np.ndarray:
    """g(r_i, r_index) = [(H - epsilon)^-1]_{i,index} / dr, the discrete kernel of (H - epsilon)^-1."""
    n = len(system)
    if not 0 <= index < n:
        raise nzerr.PreconditionError("resolvent_column", f"0 <= index < {n}, got {index}")
    ab = np.zeros((3, n))
    ab[0, 1:] = system.off_diagonal
    ab[1, :] = system.diagonal - epsilon
    ab[2, :-1] = system.off_diagonal
    rhs = np.zeros(n)
    rhs[index] = 1.0 / system.spacing
    try:
        return solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as e:
        raise nzerr.NumericalError(f"Resolvent is singular at epsilon = {epsilon!r}") from e

class ComparisonRow():
    def __init__(self, n: int, epsilon: float, epsilon_fd: float, estimate: float, extrapolated: float,
                 boundary: float = 0.0):
        """epsilon_fd: eigenvalue on the finer grid
        estimate: (4/3)|eps_h - eps_h/2|, a bound on the discretization error
        extrapolated: Richardson value eps_h/2 + (eps_h/2 - eps_h)/3
        boundary: shift from walls placed inside the domain, see wall_shift"""
        self.n = n
        self.epsilon = epsilon
        self.epsilon_fd = epsilon_fd
        self.diff = abs(epsilon_fd - epsilon)
        self.estimate = estimate
        self.extrapolated = extrapolated
        self.boundary = boundary
        self.mismatch = self.diff > ANALYTIC_TOL + 2.0 * (estimate + boundary)

    def __str__(self):
        return (f"n={self.n} quartic={self.epsilon!r} fd={self.epsilon_fd!r} "
                f"diff={self.diff!r} estimate={self.estimate!r} boundary={self.boundary!r}")

class SpectrumComparison():
    def __init__(self, grid: Grid, rows: list[ComparisonRow], skipped: list[int]):
        self.grid = grid
        self.rows = rows
        self.skipped = skipped

    @property
    def ok(self) -> bool:
        # Nothing compared is not a pass
        return bool(self.rows) and all(not r.mismatch for r in self.rows)

def compare_spectrum(params: NatanzonParams, n_max: int, grid: Grid,
                     cmap: CoordinateMap = None) -> SpectrumComparison:
    """Quartic levels against FD eigenvalues on grid and on its refinement.

    Threshold levels are not normalizable and are skipped."""
    if cmap is None:
        cmap = build_change_of_variable(params)
    levels = spectrum(params, n_max)
    bound = [lv for lv in levels if not lv.threshold]
    skipped = [lv.n for lv in levels if lv.threshold]
    if not bound:
        return SpectrumComparison(grid, [], skipped)
    k = len(bound)
    coarse = lowest_eigenvalues(fd_hamiltonian(params, cmap, grid), k)
    fine_grid = grid.refined()
    fine_system = fd_hamiltonian(params, cmap, fine_grid)
    fine = lowest_eigenvalues(fine_system, k)
    walls = wall_shift(fine_system, fine_grid, cmap.r_domain, k)
    rows = []
    for lv, e_h, e_h2, shift in zip(bound, coarse, fine, walls):
        row = ComparisonRow(lv.n, lv.epsilon, e_h2, 4.0 / 3.0 * abs(e_h - e_h2), e_h2 + (e_h2 - e_h) / 3.0, shift)
        logger.debug(str(row))
        rows.append(row)
    return SpectrumComparison(grid, rows, skipped)

def convergence_order(params: NatanzonParams, cmap: CoordinateMap, grid: Grid, n: int,
                      refinements: int = 3) -> float:
    """Log-log slope of |eps_FD - eps_n| against the spacing over successive halvings."""
    levels = spectrum(params, n)
    if len(levels) <= n:
        raise nzerr.PreconditionError("convergence_order", f"an existing level n = {n}")
    exact = levels[n].epsilon
    spacings, errors = [], []
    g = grid
    for _ in range(refinements + 1):
        e = lowest_eigenvalues(fd_hamiltonian(params, cmap, g), n + 1)[n]
        spacings.append(g.spacing)
        errors.append(abs(e - exact))
        g = g.refined()
    slope = np.polyfit(np.log(spacings), np.log(errors), 1)[0]
    logger.debug(f"convergence order {slope!r} from errors {errors}")
    return float(slope)
