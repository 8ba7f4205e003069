"""Real special functions needed by the Green's function.

Gamma and the modified Bessel function come from scipy.special. The
confluent hypergeometric functions go through mpmath at a working precision
derived from the accuracy budget, then are rounded back to double."""
import functools
import logging
import math

import mpmath
from mpmath.libmp import NoConvergence
import numpy as np
from scipy import special

import natanzon.errors as nzerr

logger = logging.getLogger(__name__)

NEAR_INTEGER = 1e-6

class AccuracyBudget():
    def __init__(self, abs_tol: float = 0.0, rel_tol: float = 1e-13, max_terms: int = 20000):
        """abs_tol, rel_tol: target accuracy of a single evaluation
        max_terms: number of series terms allowed before giving up"""
        if not rel_tol >= 100 * np.finfo(float).eps:
            raise nzerr.InvalidValue("rel_tol", rel_tol, "Must be at least 100 machine epsilons.")
        if abs_tol < 0:
            raise nzerr.InvalidValue("abs_tol", abs_tol, "Must be non-negative.")
        if max_terms < 1:
            raise nzerr.InvalidValue("max_terms", max_terms, "Must be at least 1.")
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol
        self.max_terms = int(max_terms)

    @property
    def dps(self) -> int:
        """Working decimal digits: the target digits plus guard digits for cancellation."""
        return max(15, math.ceil(-math.log10(self.rel_tol))) + 10

DEFAULT_BUDGET = AccuracyBudget()

@functools.lru_cache(maxsize=None)
def _context(dps: int) -> mpmath.MPContext:
    # A private context per precision, the global mpmath.mp is left untouched
    ctx = mpmath.MPContext()
    ctx.dps = dps
    return ctx

def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)

def _to_float(ctx, v, what: str) -> float:
    x = float(ctx.re(v))
    if not math.isfinite(x):
        raise nzerr.ConvergenceError(what, f"non-finite result {x!r}")
    return x

def gamma_real(x: float) -> float:
    """Gamma function of a real argument."""
    if _is_nonpositive_integer(x):
        raise nzerr.PoleError(x)
    return float(special.gamma(x))

def kummer_M(a: float, b: float, z: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """Kummer's function 1F1(a; b; z)."""
    if _is_nonpositive_integer(b):
        raise nzerr.DegenerateParameterError(b)
    ctx = _context(budget.dps)
    try:
        v = ctx.hyp1f1(a, b, z, maxterms=budget.max_terms)
    except NoConvergence as e:
        raise nzerr.ConvergenceError(f"M({a!r}, {b!r}, {z!r})", str(e)) from e
    return _to_float(ctx, v, "Kummer M")

def tricomi_U(a: float, b: float, z: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """Tricomi's confluent hypergeometric function U(a; b; z), z > 0.

    Integer b is handled by mpmath's limiting procedure."""
    if not z > 0:
        raise nzerr.PreconditionError("tricomi_U", f"z > 0, got {z!r}")
    if abs(b - round(b)) < NEAR_INTEGER:
        logger.debug(f"U({a!r}, {b!r}, {z!r}): b is within {NEAR_INTEGER} of an integer")
    ctx = _context(budget.dps)
    try:
        v = ctx.hyperu(a, b, z, maxterms=budget.max_terms)
    except NoConvergence as e:
        raise nzerr.ConvergenceError(f"U({a!r}, {b!r}, {z!r})", str(e)) from e
    return _to_float(ctx, v, "Tricomi U")

def _whittaker_M_mp(ctx, kappa: float, mu: float, z: float, budget: AccuracyBudget):
    if not z > 0:
        raise nzerr.PreconditionError("whittaker_M", f"z > 0, got {z!r}")
    b = 1.0 + 2.0 * mu
    if _is_nonpositive_integer(b):
        raise nzerr.DegenerateParameterError(b)
    try:
        return (ctx.exp(-ctx.mpf(z) / 2) * ctx.power(z, ctx.mpf(mu) + 0.5)
                * ctx.hyp1f1(mu - kappa + 0.5, b, z, maxterms=budget.max_terms))
    except NoConvergence as e:
        raise nzerr.ConvergenceError(f"M_{{{kappa!r},{mu!r}}}({z!r})", str(e)) from e

def _whittaker_W_mp(ctx, kappa: float, mu: float, z: float, budget: AccuracyBudget):
    if not z > 0:
        raise nzerr.PreconditionError("whittaker_W", f"z > 0, got {z!r}")
    b = 1.0 + 2.0 * mu
    if abs(b - round(b)) < NEAR_INTEGER:
        logger.debug(f"W_{{{kappa!r},{mu!r}}}: b = {b!r} is near an integer")
    try:
        return (ctx.exp(-ctx.mpf(z) / 2) * ctx.power(z, ctx.mpf(mu) + 0.5)
                * ctx.hyperu(mu - kappa + 0.5, b, z, maxterms=budget.max_terms))
    except NoConvergence as e:
        raise nzerr.ConvergenceError(f"W_{{{kappa!r},{mu!r}}}({z!r})", str(e)) from e

def whittaker_M(kappa: float, mu: float, z: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """M_{kappa,mu}(z) = exp(-z/2) z^(mu+1/2) M(mu-kappa+1/2, 1+2mu, z)."""
    ctx = _context(budget.dps)
    return _to_float(ctx, _whittaker_M_mp(ctx, kappa, mu, z, budget), "Whittaker M")

def whittaker_W(kappa: float, mu: float, z: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """W_{kappa,mu}(z) = exp(-z/2) z^(mu+1/2) U(mu-kappa+1/2, 1+2mu, z)."""
    ctx = _context(budget.dps)
    return _to_float(ctx, _whittaker_W_mp(ctx, kappa, mu, z, budget), "Whittaker W")

def scaled_whittaker_product(a: float, c: float, kappa: float, mu: float, x: float, y: float,
                             budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """Gamma(a)/Gamma(c) M_{kappa,mu}(x) W_{kappa,mu}(y).

    The factors over- and underflow separately for large a; only the
    product is rounded to double."""
    for x_ in (a, c):
        if _is_nonpositive_integer(x_):
            raise nzerr.PoleError(x_)
    ctx = _context(budget.dps)
    v = (ctx.gamma(a) / ctx.gamma(c) * _whittaker_M_mp(ctx, kappa, mu, x, budget)
         * _whittaker_W_mp(ctx, kappa, mu, y, budget))
    return _to_float(ctx, v, "Gamma-scaled Whittaker product")

def bessel_I(nu: float, x: float) -> float:
    """Modified Bessel function of the first kind, nu >= 0 and x >= 0."""
    if nu < 0 or x < 0:
        raise nzerr.PreconditionError("bessel_I", f"nu >= 0 and x >= 0, got nu={nu!r}, x={x!r}")
    v = float(special.iv(nu, x))
    if not math.isfinite(v):
        raise nzerr.ConvergenceError(f"I_{nu!r}({x!r})", "overflow")
    return v

def log_bessel_I(nu: float, x: float) -> float:
    """log I_nu(x) without overflow, from the exponentially scaled ive."""
    if nu < 0 or x < 0:
        raise nzerr.PreconditionError("log_bessel_I", f"nu >= 0 and x >= 0, got nu={nu!r}, x={x!r}")
    if x < 1e-8:
        # Leading series term
        if x == 0:
            return 0.0 if nu == 0 else -math.inf
        return nu * math.log(0.5 * x) - float(special.gammaln(nu + 1.0))
    scaled = float(special.ive(nu, x))
    if not scaled > 0:
        raise nzerr.ConvergenceError(f"log I_{nu!r}({x!r})", "underflow in scaled Bessel function")
    return math.log(scaled) + x
