"""so(2,1) generators in the 2x2 representation and numerical checks of the
commutation relations and of the two disentangling (BCH) formulas used to
build the propagator."""
import logging
import math

import numpy as np

import natanzon.errors as nzerr

logger = logging.getLogger(__name__)

Mat2C = np.ndarray  # complex, shape (2, 2)

BCH1_MARGIN = 0.01
BCH2_MARGIN = 1e-6

def pauli_generators() -> tuple[Mat2C, Mat2C, Mat2C]:
    """T1 = (s1 - i s2)/(2 sqrt 2), T2 = -i s3/2, T3 = (s1 + i s2)/(2 sqrt 2)."""
    s1 = np.array([[0, 1], [1, 0]], dtype=complex)
    s2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
    s3 = np.array([[1, 0], [0, -1]], dtype=complex)
    t1 = (s1 - 1j * s2) / (2.0 * math.sqrt(2.0))
    t2 = -1j * s3 / 2.0
    t3 = (s1 + 1j * s2) / (2.0 * math.sqrt(2.0))
    return t1, t2, t3

def _sinhc(s: complex) -> complex:
    # sinh(s)/s is even in s, so the branch of the square root is irrelevant
    return np.sinh(s) / s if s != 0 else 1.0

def matrix_exp_2x2(m: Mat2C) -> Mat2C:
    """exp(M) = e^t (cosh(s) I + sinh(s)/s (M - t I)) with t = tr(M)/2, s^2 = t^2 - det(M)."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        raise nzerr.PreconditionError("matrix_exp_2x2", "a finite 2x2 matrix")
    t = 0.5 * (m[0, 0] + m[1, 1])
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    s = np.emath.sqrt(t * t - det)
    traceless = m - t * np.eye(2)
    return np.exp(t) * (np.cosh(s) * np.eye(2) + _sinhc(s) * traceless)

def commutator(a: Mat2C, b: Mat2C) -> Mat2C:
    return a @ b - b @ a

def commutator_check(scale: float = 1.0) -> list[float]:
    """Frobenius norms of [T1,T2] + iT1, [T2,T3] + iT3 and [T1,T3] + iT2.

    scale multiplies every generator; any scale other than 1 breaks the algebra."""
    t1, t2, t3 = (scale * t for t in pauli_generators())
    return [float(np.linalg.norm(commutator(t1, t2) + 1j * t1)),
            float(np.linalg.norm(commutator(t2, t3) + 1j * t3)),
            float(np.linalg.norm(commutator(t1, t3) + 1j * t2))]

def bch_coefficients_1(omega: float, S: float) -> tuple[float, float, float]:
    """a = 2 omega tan(omega S), b = 2 ln cos(omega S), c = tan(omega S)/omega."""
    if not abs(omega * S) < math.pi / 2 - BCH1_MARGIN:
        raise nzerr.DomainError(f"|omega*S| = {abs(omega * S)!r} too close to pi/2")
    tan = math.tan(omega * S)
    c = tan / omega if omega != 0 else S
    return 2.0 * omega * tan, 2.0 * math.log(math.cos(omega * S)), c

def bch_check_1(omega: float, S: float, a_scale: float = 1.0) -> float:
    """|| exp(-iS(T1 + 2 omega^2 T3)) - exp(-iaT3) exp(-ibT2) exp(-icT1) ||_F

    a_scale perturbs the coefficient a and is only meant for negative controls."""
    t1, t2, t3 = pauli_generators()
    a, b, c = bch_coefficients_1(omega, S)
    a *= a_scale
    lhs = matrix_exp_2x2(-1j * S * (t1 + 2.0 * omega * omega * t3))
    rhs = matrix_exp_2x2(-1j * a * t3) @ matrix_exp_2x2(-1j * b * t2) @ matrix_exp_2x2(-1j * c * t1)
    return float(np.linalg.norm(lhs - rhs))

def bch_coefficients_2(tau: complex, c: float) -> tuple[complex, complex, complex]:
    """alpha = i tau/D, beta = 2 log D, gamma = c/D with D = 1 - i tau c/2 (principal log)."""
    d = 1.0 - 0.5j * tau * c
    if not abs(d) > BCH2_MARGIN:
        raise nzerr.DomainError(f"1 - i*tau*c/2 = {d!r} is too close to zero")
    return 1j * tau / d, 2.0 * np.log(d), c / d

def bch_check_2(tau: complex, c: float) -> float:
    """|| exp(-i alpha T3) exp(-i beta T2) exp(-i gamma T1) - exp(-icT1) exp(tau T3) ||_F"""
    t1, t2, t3 = pauli_generators()
    alpha, beta, gamma = bch_coefficients_2(tau, c)
    lhs = (matrix_exp_2x2(-1j * alpha * t3) @ matrix_exp_2x2(-1j * beta * t2)
           @ matrix_exp_2x2(-1j * gamma * t1))
    rhs = matrix_exp_2x2(-1j * c * t1) @ matrix_exp_2x2(tau * t3)
    return float(np.linalg.norm(lhs - rhs))
