"""Closed-form Green's function of the confluent Natanzon potentials.

G(r, r') is normalized by (H - E) G = (1/i) delta(r - r'), so i*G is the
resolvent kernel of H - E and the derivative of G jumps by +i across r = r'."""
import logging
import math

from scipy.integrate import quad
from scipy import special

import natanzon.errors as nzerr
from natanzon.potential import NatanzonParams, CoordinateMap, R_of_h
from natanzon.spectrum import EnergyLevel
from natanzon.specfun import AccuracyBudget, DEFAULT_BUDGET, scaled_whittaker_product, log_bessel_I

logger = logging.getLogger(__name__)

POLE_GUARD = 1e-12
IDENTITY_TARGET = 1e-8
KERNEL_LOG_SWITCH_Q = 0.05
KERNEL_LOG_SWITCH_ARG = 500.0

class ReducedIndices():
    def __init__(self, p: float, mu: float, omega_arg: float):
        self.p = p
        self.mu = mu
        self.omega_arg = omega_arg

    @property
    def gamma_index(self) -> float:
        return self.mu / 2.0 - 0.25

    def __str__(self):
        return (f"ReducedIndices(p={self.p!r}, mu={self.mu!r}, omega_arg={self.omega_arg!r}, "
                f"gamma_index={self.gamma_index!r})")

class GreensValue():
    def __init__(self, r: float, r_prime: float, epsilon: float, value: complex, indices: ReducedIndices):
        self.r = r
        self.r_prime = r_prime
        self.epsilon = epsilon
        self.value = value
        self.indices = indices

    def __str__(self):
        return f"G({self.r!r}, {self.r_prime!r}; {self.epsilon!r}) = {self.value!r}"

def reduced_indices(params: NatanzonParams, epsilon: float) -> ReducedIndices:
    """p = (g1 - sigma1*e)/(4 sqrt(g2 - sigma2*e)), mu = 1/2 + sqrt(eta - c0*e)."""
    B = params.g2 - params.sigma2 * epsilon
    C = params.eta - params.c0 * epsilon
    if not B > 0:
        raise nzerr.RadicandError("g2 - sigma2*epsilon", B, epsilon)
    if C < 0:
        raise nzerr.RadicandError("eta - c0*epsilon", C, epsilon)
    omega_arg = math.sqrt(B)
    p = (params.g1 - params.sigma1 * epsilon) / (4.0 * omega_arg)
    return ReducedIndices(p, 0.5 + math.sqrt(C), omega_arg)

def gamma_argument(params: NatanzonParams, epsilon: float) -> float:
    """p + mu/2 + 1/4, equal to -n at the level with quantum number n."""
    ind = reduced_indices(params, epsilon)
    return ind.p + ind.mu / 2.0 + 0.25

def _near_pole(a: float) -> bool:
    nearest = round(a)
    return nearest <= 0 and abs(a - nearest) < POLE_GUARD

def green_function(params: NatanzonParams, cmap: CoordinateMap, r: float, r_prime: float,
                   epsilon: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> GreensValue:
    """Gamma(a)/(4i w Gamma(mu+1/2)) [sqrt(R(h>)R(h<))/(h> h<)]^(1/2) M_{-p,g}(2w h<) W_{-p,g}(2w h>)

    with a = p + mu/2 + 1/4, w = omega_arg/2 and h<, h> the images of min(r, r') and max(r, r')."""
    ind = reduced_indices(params, epsilon)
    a = ind.p + ind.mu / 2.0 + 0.25
    if _near_pole(a):
        raise nzerr.PoleError(a)
    r_small, r_big = min(r, r_prime), max(r, r_prime)
    h_small = cmap.h_of_r(r_small)
    h_big = h_small if r_big == r_small else cmap.h_of_r(r_big)
    geometric = math.sqrt(math.sqrt(R_of_h(params, h_big) * R_of_h(params, h_small)) / (h_big * h_small))
    kappa = -ind.p
    g = ind.gamma_index
    # Gamma(a) overflows and M W underflows far below the spectrum, only their product is finite
    scaled = scaled_whittaker_product(a, ind.mu + 0.5, kappa, g, ind.omega_arg * h_small,
                                      ind.omega_arg * h_big, budget)
    value = scaled * geometric / (4j * (ind.omega_arg / 2.0))
    return GreensValue(r, r_prime, epsilon, complex(value), ind)

def green_jump(params: NatanzonParams, cmap: CoordinateMap, r_prime: float, epsilon: float,
               step: float = 1e-4, budget: AccuracyBudget = DEFAULT_BUDGET) -> complex:
    """d/dr G(r, r') at r = r'+ minus r = r'-, from one-sided second-order differences."""
    G = lambda r: green_function(params, cmap, r, r_prime, epsilon, budget).value
    g0 = G(r_prime)
    right = (-3.0 * g0 + 4.0 * G(r_prime + step) - G(r_prime + 2 * step)) / (2.0 * step)
    left = (3.0 * g0 - 4.0 * G(r_prime - step) + G(r_prime - 2 * step)) / (2.0 * step)
    return right - left

def pole_check(params: NatanzonParams, level: EnergyLevel) -> float:
    """|gamma_argument(epsilon_n) + n|"""
    if not level.valid:
        raise nzerr.PreconditionError("pole_check", "a valid energy level")
    return abs(gamma_argument(params, level.epsilon) + level.n)

def _log_sinh(q: float) -> float:
    return q + math.log(-math.expm1(-2.0 * q)) - math.log(2.0)

def _check_kernel_args(x: float, x_prime: float, q: float, mu: float) -> None:
    if not (q > 0 and x > 0 and x_prime > 0 and mu >= 0.5):
        raise nzerr.PreconditionError(
            "euclidean_kernel", f"q > 0, x, x' > 0 and mu >= 1/2; got x={x!r}, x'={x_prime!r}, q={q!r}, mu={mu!r}")

def log_euclidean_kernel(x: float, x_prime: float, q: float, mu: float) -> float:
    """log of exp(-(x+x')/2 coth q) I_{mu-1/2}(sqrt(x x')/sinh q) / sinh q."""
    _check_kernel_args(x, x_prime, q, mu)
    log_sinh = _log_sinh(q)
    w = math.sqrt(x * x_prime) * math.exp(-log_sinh)
    coth = 1.0 / math.tanh(q)
    return -log_sinh - 0.5 * (x + x_prime) * coth + log_bessel_I(mu - 0.5, w)

def euclidean_kernel(x: float, x_prime: float, q: float, mu: float) -> float:
    """The radial propagator kernel on the imaginary-time ray."""
    _check_kernel_args(x, x_prime, q, mu)
    if q < KERNEL_LOG_SWITCH_Q or q > KERNEL_LOG_SWITCH_ARG:
        return math.exp(log_euclidean_kernel(x, x_prime, q, mu))
    sinh = math.sinh(q)
    w = math.sqrt(x * x_prime) / sinh
    damping = 0.5 * (x + x_prime) / math.tanh(q)
    if w > KERNEL_LOG_SWITCH_ARG or damping > KERNEL_LOG_SWITCH_ARG:
        return math.exp(log_euclidean_kernel(x, x_prime, q, mu))
    return float(special.iv(mu - 0.5, w)) / sinh * math.exp(-damping)

def kernel_identity_check(x: float, y: float, gamma: float, p: float,
                          budget: AccuracyBudget = DEFAULT_BUDGET) -> dict[str, float]:
    """Compare

        int_0^inf exp(-2pq)/sinh q exp(-(x+y)/2 coth q) I_{2g}(sqrt(xy)/sinh q) dq

    with Gamma(p+g+1/2)/(Gamma(2g+1) sqrt(xy)) M_{-p,g}(x) W_{-p,g}(y)."""
    if not p + gamma + 0.5 > 0:
        raise nzerr.PreconditionError("kernel_identity_check", f"p + gamma + 1/2 > 0, got {p + gamma + 0.5!r}")
    if not gamma > 0:
        raise nzerr.PreconditionError("kernel_identity_check", f"gamma > 0, got {gamma!r}")
    if not y > x > 0:
        raise nzerr.PreconditionError("kernel_identity_check", f"y > x > 0, got x={x!r}, y={y!r}")
    mu = 2.0 * gamma + 0.5

    def integrand(q):
        return math.exp(-2.0 * p * q + log_euclidean_kernel(x, y, q, mu))

    head, err_head = quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    tail, err_tail = quad(integrand, 1.0, math.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    lhs = head + tail
    estimate = err_head + err_tail
    logger.debug(f"identity quadrature x={x!r} y={y!r}: {lhs!r} +- {estimate!r}")
    if estimate > IDENTITY_TARGET * abs(lhs):
        raise nzerr.QuadratureError(estimate, IDENTITY_TARGET * abs(lhs))

    rhs = scaled_whittaker_product(p + gamma + 0.5, 2.0 * gamma + 1.0, -p, gamma, x, y, budget) / math.sqrt(x * y)
    return {"lhs": lhs, "rhs": rhs, "rel_err": abs(lhs - rhs) / abs(rhs)}
