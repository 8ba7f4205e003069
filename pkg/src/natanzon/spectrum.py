"""Bound-state energies from the quantization condition

    (g1 - sigma1*e)/(2 sqrt(g2 - sigma2*e)) + sqrt(eta - c0*e) + (2n + 1) = 0

with principal square roots. Squaring away the radicals gives a polynomial
of degree at most four whose real roots are filtered back through the
condition itself."""
import logging
import math

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

import natanzon.errors as nzerr
from natanzon.potential import NatanzonParams, SpecialCase, classify_special_case

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9
IMAG_TOL = 1e-7
POLISH_WIDTH = 1e-7
THRESHOLD_TOL = 1e-12

class EnergyLevel():
    def __init__(self, n: int, epsilon: float, residual: float, valid: bool,
                 branch_data: tuple[float, float], threshold: bool = False):
        """branch_data: (sqrt(g2 - sigma2*epsilon), sqrt(eta - c0*epsilon))
        threshold: True when epsilon sits at the continuum edge eta/c0 (c0 != 0, marginally bound)"""
        self.n = n
        self.epsilon = epsilon
        self.residual = residual
        self.valid = valid
        self.branch_data = branch_data
        self.threshold = threshold

    def __str__(self):
        flag = " (threshold)" if self.threshold else ""
        return f"n={self.n} epsilon={self.epsilon!r} residual={self.residual!r}{flag}"

    __repr__ = __str__

def _radicands(params: NatanzonParams, epsilon: float) -> tuple[float, float, float]:
    A = params.g1 - params.sigma1 * epsilon
    B = params.g2 - params.sigma2 * epsilon
    C = params.eta - params.c0 * epsilon
    return A, B, C

def _threshold_scale(params: NatanzonParams, epsilon: float) -> float:
    return THRESHOLD_TOL * max(1.0, abs(params.eta), abs(params.c0 * epsilon))

def branch_admissible(params: NatanzonParams, epsilon: float) -> bool:
    """Both radicands of the quantization condition admissible."""
    _, B, C = _radicands(params, epsilon)
    return B > 0 and C >= 0

def quantization_residual(params: NatanzonParams, epsilon: float, n: int) -> float:
    """(g1 - sigma1*e)/(2 sqrt(g2 - sigma2*e)) + sqrt(eta - c0*e) + (2n+1)."""
    A, B, C = _radicands(params, epsilon)
    if not B > 0:
        raise nzerr.RadicandError("g2 - sigma2*epsilon", B, epsilon)
    if C < 0:
        raise nzerr.RadicandError("eta - c0*epsilon", C, epsilon)
    return A / (2.0 * math.sqrt(B)) + math.sqrt(C) + (2 * n + 1)

def _clamped_residual(params: NatanzonParams, epsilon: float, n: int) -> float:
    # Slightly negative eta - c0*e from rounding is read as a threshold root
    A, B, C = _radicands(params, epsilon)
    if C < 0 and C >= -_threshold_scale(params, epsilon):
        C = 0.0
    if not B > 0 or C < 0:
        raise nzerr.RadicandError("radicand", min(B, C), epsilon)
    return A / (2.0 * math.sqrt(B)) + math.sqrt(C) + (2 * n + 1)

def quartic_coefficients(params: NatanzonParams, n: int) -> list[float]:
    """Coefficients [c4, c3, c2, c1, c0] (highest degree first) of a polynomial in
    epsilon vanishing at every solution of the quantization condition.

    Degenerate cases keep one radical constant and are squared fewer times,
    so the leading coefficients are exact zeros."""
    k = 2 * n + 1
    A = Polynomial([params.g1, -params.sigma1])
    B = Polynomial([params.g2, -params.sigma2])
    C = Polynomial([params.eta, -params.c0])
    if params.c0 == 0 and params.sigma2 == 0 and params.g2 > 0 and params.eta >= 0:
        # Oscillator-like: A/(2 sqrt(g2)) = -(k + sqrt(eta)) is already linear
        poly = A + 2.0 * math.sqrt(params.g2) * (k + math.sqrt(params.eta))
    elif params.c0 == 0 and params.eta >= 0:
        poly = A * A - 4.0 * B * (k + math.sqrt(params.eta)) ** 2
    elif params.sigma2 == 0 and params.g2 > 0:
        poly = (A / (2.0 * math.sqrt(params.g2)) + k) ** 2 - C
    else:
        inner = A * A - 4.0 * B * (k * k + C)
        poly = inner * inner - 64.0 * k * k * B * B * C
    coef = list(poly.coef) + [0.0] * (5 - len(poly.coef))
    return [float(c) for c in coef[:5][::-1]]

def _real_candidates(coeffs: list[float]) -> list[float]:
    c = np.trim_zeros(np.array(coeffs, dtype=float), 'f')
    if len(c) <= 1:
        return []
    roots = np.roots(c)
    reals = [float(z.real) for z in roots if abs(z.imag) <= IMAG_TOL * max(1.0, abs(z))]
    return sorted(reals)

def _polish(params: NatanzonParams, epsilon: float, n: int) -> float:
    """Refine a candidate with brentq on the residual when a sign change brackets it."""
    width = POLISH_WIDTH * max(1.0, abs(epsilon))
    lo, hi = epsilon - width, epsilon + width
    if not (branch_admissible(params, lo) and branch_admissible(params, hi)):
        return epsilon
    f_lo = quantization_residual(params, lo, n)
    f_hi = quantization_residual(params, hi, n)
    if f_lo * f_hi > 0:
        return epsilon
    try:
        return brentq(lambda e: quantization_residual(params, e, n), lo, hi,
                      xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    except RuntimeError as e:
        raise nzerr.ConvergenceError(f"root polishing for n = {n}", str(e)) from e

def solve_level(params: NatanzonParams, n: int) -> EnergyLevel | None:
    """The level with quantum number n, or None when the condition has no admissible root."""
    if n < 0:
        raise nzerr.PreconditionError("solve_level", f"n >= 0, got {n}")
    accepted = []
    for candidate in _real_candidates(quartic_coefficients(params, n)):
        A, B, C = _radicands(params, candidate)
        if not B > 0 or C < -_threshold_scale(params, candidate):
            logger.debug(f"n={n}: discarded {candidate!r} (inadmissible branch)")
            continue
        epsilon = _polish(params, candidate, n)
        residual = abs(_clamped_residual(params, epsilon, n))
        if residual > RESIDUAL_TOL:
            logger.debug(f"n={n}: discarded {candidate!r} (residual {residual!r})")
            continue
        if any(abs(epsilon - e) <= RESIDUAL_TOL * max(1.0, abs(e)) for e, _ in accepted):
            continue
        accepted.append((epsilon, residual))

    if not accepted:
        return None
    if len(accepted) > 1:
        raise nzerr.MultipleRootsError(n, [e for e, _ in accepted])
    epsilon, residual = accepted[0]
    _, B, C = _radicands(params, epsilon)
    # With c0 = 0 the radicand eta is constant and never marks a continuum edge
    threshold = params.c0 != 0 and C <= _threshold_scale(params, epsilon)
    return EnergyLevel(n, epsilon, residual, True,
                       (math.sqrt(B), math.sqrt(max(C, 0.0))), threshold)

def spectrum(params: NatanzonParams, n_max: int) -> list[EnergyLevel]:
    """Levels n = 0..n_max, stopping at the first absent level."""
    if n_max < 0:
        raise nzerr.PreconditionError("spectrum", f"n_max >= 0, got {n_max}")
    levels = []
    for n in range(n_max + 1):
        level = solve_level(params, n)
        if level is None:
            logger.info(f"no bound level for n = {n}, spectrum stops at {len(levels)} levels")
            break
        if levels and not level.epsilon > levels[-1].epsilon:
            raise nzerr.NumericalError(
                f"Levels are not increasing: {levels[-1].epsilon!r} then {level.epsilon!r} at n = {n}")
        levels.append(level)
    return levels

def closed_form_spectrum(kind: SpecialCase, params: NatanzonParams, n: int) -> float:
    """Energy of level n for the oscillator, Coulomb and Morse cases."""
    if kind == SpecialCase.GENERAL or kind != classify_special_case(params):
        raise nzerr.PreconditionError("closed_form_spectrum", f"parameters of kind {kind}")
    k = 2 * n + 1
    if kind == SpecialCase.OSCILLATOR:
        if not (params.g2 > 0 and params.eta >= 0):
            raise nzerr.DomainError("Oscillator levels need g2 > 0 and eta >= 0")
        return (params.g1 + 2.0 * math.sqrt(params.g2) * (k + math.sqrt(params.eta))) / params.sigma1
    if kind == SpecialCase.COULOMB:
        if not (params.g1 < 0 and params.eta >= 0):
            raise nzerr.DomainError("Coulomb levels need g1 < 0 and eta >= 0")
        return params.g2 / params.sigma2 - params.g1 ** 2 / (4.0 * params.sigma2 * (k + math.sqrt(params.eta)) ** 2)
    if not params.g2 > 0:
        raise nzerr.DomainError("Morse levels need g2 > 0")
    t = k + params.g1 / (2.0 * math.sqrt(params.g2))
    if t > 0:
        raise nzerr.DomainError(f"Morse level n = {n} does not exist: 2n+1+g1/(2 sqrt(g2)) = {t!r} > 0")
    return (params.eta - t * t) / params.c0
