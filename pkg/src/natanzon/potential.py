"""Confluent Natanzon potentials.

The potential is written in terms of an auxiliary coordinate h(r) defined by
dh/dr = 2h/sqrt(R(h)) with R(h) = sigma2*h^2 + sigma1*h + c0. The map is
tabulated in the explicit direction r(h) = r0 + int_{h0}^{h} sqrt(R(t))/(2t) dt
and inverted by bracketed root finding.

Units: hbar = 1 and m = 1/2, so the Hamiltonian is -d^2/dr^2 + V(r) and the
energy E equals the dimensionless epsilon.
"""
import logging
import math
from enum import Enum

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.optimize import brentq

import natanzon.errors as nzerr

logger = logging.getLogger(__name__)

# Node placement relative to the reference point of the table
NODE_SPAN_FINITE = 1e-10
NODE_SPAN_INFINITE = 1e8
# Growth factor used when a query falls outside the node table
EXTENSION_FACTOR = 4.0
MAX_EXTENSION_STEPS = 4000

QUAD_EPSABS = 1e-15
QUAD_EPSREL = 1e-13
QUAD_LIMIT = 200

_GL_X, _GL_W = leggauss(24)
_NEWTON_STEPS = 30

class SpecialCase(Enum):
    OSCILLATOR = 1
    COULOMB = 2
    MORSE = 3
    GENERAL = 4

    def __str__(self):
        # Capitalize the first letter
        return self.name[0] + self.name[1:].lower()

class NatanzonParams():
    """The six dimensionless parameters of a confluent Natanzon potential.

    Instances are immutable. delta = sigma1^2 - 4*sigma2*c0 is always
    recomputed from the stored parameters."""

    __slots__ = ("g1", "g2", "sigma1", "sigma2", "c0", "eta")

    def __init__(self, g1: float, g2: float, sigma1: float, sigma2: float,
                 c0: float, eta: float):
        values = dict(g1=g1, g2=g2, sigma1=sigma1, sigma2=sigma2, c0=c0, eta=eta)
        for name, value in values.items():
            value = float(value)
            if not math.isfinite(value):
                raise nzerr.InvalidValue(name, value, "Parameters must be finite.")
            object.__setattr__(self, name, value)
        if self.sigma1 == 0 and self.sigma2 == 0 and self.c0 == 0:
            raise nzerr.InvalidParams()

    def __setattr__(self, name, value):
        raise AttributeError("NatanzonParams is immutable")

    @property
    def delta(self) -> float:
        return self.sigma1 * self.sigma1 - 4.0 * self.sigma2 * self.c0

    def as_dict(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in self.__slots__}

    def __str__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.as_dict().items())
        return f"NatanzonParams({inner})"

    __repr__ = __str__

    def __eq__(self, other: 'NatanzonParams'):
        if not isinstance(other, NatanzonParams):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __hash__(self):
        return hash(tuple(self.as_dict().values()))

def R_of_h(params: NatanzonParams, h):
    """R(h) = sigma2*h^2 + sigma1*h + c0. Accepts scalars or arrays."""
    return (params.sigma2 * h + params.sigma1) * h + params.c0

def V_of_h(params: NatanzonParams, h):
    """The potential expressed in the h coordinate. Accepts scalars or arrays."""
    R = R_of_h(params, h)
    h2 = h * h
    return ((params.g2 * h2 + params.g1 * h + params.eta) / R
            + (params.sigma1 * h - params.sigma2 * h2) / (R * R)
            - 1.25 * params.delta * h2 / (R * R * R))

def classify_special_case(params: NatanzonParams) -> SpecialCase:
    if params.sigma2 == 0 and params.c0 == 0:
        return SpecialCase.OSCILLATOR
    if params.sigma1 == 0 and params.c0 == 0:
        return SpecialCase.COULOMB
    if params.sigma1 == 0 and params.sigma2 == 0:
        return SpecialCase.MORSE
    return SpecialCase.GENERAL

def closed_form_h(kind: SpecialCase, params: NatanzonParams, r: float) -> float:
    """h(r) for the special cases, with the default anchors of build_change_of_variable.

    The Morse row uses the increasing branch h = exp(2r/sqrt(c0))."""
    if kind != classify_special_case(params) or kind == SpecialCase.GENERAL:
        raise nzerr.PreconditionError("closed_form_h", f"parameters of kind {kind}")
    if kind == SpecialCase.OSCILLATOR:
        return r * r / params.sigma1
    if kind == SpecialCase.COULOMB:
        return 2.0 * r / math.sqrt(params.sigma2)
    return math.exp(2.0 * r / math.sqrt(params.c0))

def _positive_roots(params: NatanzonParams) -> list[float]:
    """Sorted distinct roots of R in (0, inf)."""
    s2, s1, c0 = params.sigma2, params.sigma1, params.c0
    roots = []
    if s2 != 0:
        disc = params.delta
        if disc > 0:
            q = -0.5 * (s1 + math.copysign(math.sqrt(disc), s1))
            roots = [q / s2, c0 / q] if q != 0 else [0.0]
        elif disc == 0:
            roots = [-s1 / (2.0 * s2)]
    elif s1 != 0:
        roots = [-c0 / s1]
    return sorted(set(x for x in roots if x > 0))

def positive_intervals(params: NatanzonParams) -> list[tuple[float, float]]:
    """Maximal sub-intervals of (0, inf) on which R > 0."""
    breaks = [0.0] + _positive_roots(params) + [math.inf]
    intervals = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if R_of_h(params, _interior_point(lo, hi)) > 0:
            intervals.append((lo, hi))
    return intervals

def _interior_point(lo: float, hi: float) -> float:
    if lo < 1.0 < hi:
        return 1.0
    if math.isinf(hi):
        return 2.0 * lo if lo > 0 else 1.0
    return math.sqrt(lo * hi) if lo > 0 else 0.5 * hi

def _segment(params: NatanzonParams, a: float, b: float) -> float:
    """int_a^b sqrt(R(t))/(2t) dt by adaptive quadrature.

    With c0 = 0 the substitution t = s^2 removes the 1/sqrt(t) endpoint
    singularity; otherwise t = exp(u) makes the integrand smooth over
    geometric ranges."""
    if a == b:
        return 0.0
    if params.c0 == 0:
        s2, s1 = params.sigma2, params.sigma1
        f = lambda s: math.sqrt(max(s2 * s * s + s1, 0.0))
        lo, hi = math.sqrt(a), math.sqrt(b)
    else:
        f = lambda u: 0.5 * math.sqrt(max(R_of_h(params, math.exp(u)), 0.0))
        lo, hi = math.log(a), math.log(b)
    value, abserr = quad(f, lo, hi, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    logger.debug(f"segment [{a!r}, {b!r}] = {value!r} (error estimate {abserr!r})")
    return value

def _containing_interval(params: NatanzonParams, h: float) -> tuple[float, float]:
    """The interval of positive_intervals holding h.

    h = 0 is accepted as the limit anchor when c0 = 0 and the interval
    starts at 0, since the integral converges there."""
    for lo, hi in positive_intervals(params):
        if lo < h < hi:
            return lo, hi
        if h == 0 and lo == 0 and params.c0 == 0:
            return lo, hi
    raise nzerr.DomainError(f"R(h) <= 0 at h = {h!r}: no admissible interval contains it")

def r_of_h(params: NatanzonParams, h: float, anchor: tuple[float, float]) -> float:
    """r(h) = r0 + int_{h0}^{h} sqrt(R(t))/(2t) dt."""
    h0, r0 = anchor
    if h <= 0:
        raise nzerr.OutOfDomain("h", h, (0.0, math.inf))
    if h0 == 0 and params.c0 != 0:
        raise nzerr.DomainError("The integral of sqrt(R)/(2t) diverges at t = 0 when c0 != 0")
    lo, hi = _containing_interval(params, h0)
    if not lo < h < hi:
        raise nzerr.DomainError(f"The path from h0 = {h0!r} to h = {h!r} leaves the region R > 0")
    return r0 + _segment(params, h0, h)

class MapConfig():
    def __init__(self, tolerance: float = 1e-10, min_nodes: int = 512, max_nodes: int = 8192,
                 anchor: tuple[float, float] = None):
        """tolerance: round trip tolerance of the map
        min_nodes, max_nodes: size range of the node table
        anchor: (h0, r0) fixing the integration constant. None selects the default anchor."""
        if not tolerance > 0:
            raise nzerr.InvalidValue("tolerance", tolerance, "Must be positive.")
        if min_nodes < 512 or max_nodes < min_nodes:
            raise nzerr.InvalidValue("max nodes", max_nodes, "Node table needs at least 512 nodes.")
        self.tolerance = tolerance
        self.min_nodes = min_nodes
        self.max_nodes = max_nodes
        self.anchor = anchor

class CoordinateMap():
    """Tabulated monotone map between r and h."""

    def __init__(self, params: NatanzonParams,
                 h_domain: tuple[float, float],
                 r_domain: tuple[float, float],
                 anchor: tuple[float, float],
                 h_nodes: np.ndarray,
                 r_nodes: np.ndarray,
                 tolerance: float):
        self.params = params
        self.h_domain = h_domain
        self.r_domain = r_domain
        self.anchor = anchor
        self.h_nodes = h_nodes
        self.r_nodes = r_nodes
        self.tolerance = tolerance
        self.h_nodes.flags.writeable = False
        self.r_nodes.flags.writeable = False

    def __str__(self):
        return f"CoordinateMap(h in {self.h_domain}, r in {self.r_domain}, {len(self.h_nodes)} nodes)"

    @property
    def nodes(self) -> np.ndarray:
        """The (h, r) table, one row per node."""
        return np.column_stack([self.h_nodes, self.r_nodes])

    def contains_r(self, r: float) -> bool:
        return self.r_domain[0] < r < self.r_domain[1]

    def contains_h(self, h: float) -> bool:
        return self.h_domain[0] < h < self.h_domain[1]

    def r_of_h(self, h: float) -> float:
        """r(h) integrated from the nearest table node below h."""
        if not self.contains_h(h):
            raise nzerr.OutOfDomain("h", h, self.h_domain)
        j = int(np.searchsorted(self.h_nodes, h, side='right')) - 1
        j = min(max(j, 0), len(self.h_nodes) - 1)
        return float(self.r_nodes[j]) + _segment(self.params, float(self.h_nodes[j]), h)

    def h_of_r(self, r: float) -> float:
        """h(r) by bracketed root finding between two table nodes."""
        if not self.contains_r(r):
            raise nzerr.OutOfDomain("r", r, self.r_domain)
        h_nodes, r_nodes = self._covering_nodes(r, r)
        j = int(np.searchsorted(r_nodes, r, side='right')) - 1
        j = min(max(j, 0), len(r_nodes) - 2)
        a, b = float(h_nodes[j]), float(h_nodes[j + 1])
        ra, rb = float(r_nodes[j]), float(r_nodes[j + 1])
        if r == ra:
            return a
        if r >= rb:
            return b
        f = lambda h: ra + _segment(self.params, a, h) - r
        if f(b) <= 0:
            return b
        try:
            return brentq(f, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
        except RuntimeError as e:
            raise nzerr.ConvergenceError("h(r) inversion", str(e)) from e

    def h_of_r_many(self, rs) -> np.ndarray:
        """Vectorized h(r) for grids.

        Seeds from the node table, polishes with safeguarded Newton steps
        (dr/dh = sqrt(R)/(2h)) and falls back on h_of_r for stragglers."""
        rs = np.asarray(rs, dtype=float)
        shape = rs.shape
        rs = rs.ravel()
        if rs.size == 0:
            return rs.reshape(shape)
        for r in rs:
            if not self.contains_r(r):
                raise nzerr.OutOfDomain("r", float(r), self.r_domain)
        h_nodes, r_nodes = self._covering_nodes(float(rs.min()), float(rs.max()))
        j = np.clip(np.searchsorted(r_nodes, rs, side='right') - 1, 0, len(r_nodes) - 2)
        a, b = h_nodes[j], h_nodes[j + 1]
        ra, rb = r_nodes[j], r_nodes[j + 1]

        # Seed by interpolating log(h) linearly in r
        w = np.clip((rs - ra) / (rb - ra), 0.0, 1.0)
        h = np.exp(np.log(a) + w * (np.log(b) - np.log(a)))
        lo, hi = a.copy(), b.copy()
        active = np.ones(rs.shape, dtype=bool)
        F = np.zeros_like(rs)
        for _ in range(_NEWTON_STEPS):
            idx = np.nonzero(active)[0]
            if idx.size == 0:
                break
            F_i = ra[idx] + self._panel(a[idx], h[idx]) - rs[idx]
            F[idx] = F_i
            h_i = h[idx]
            hi[idx] = np.where(F_i > 0, h_i, hi[idx])
            lo[idx] = np.where(F_i < 0, h_i, lo[idx])
            step = F_i / self._rate(h_i)
            h_new = h_i - step
            outside = ~((h_new > lo[idx]) & (h_new < hi[idx]))
            h_new = np.where(outside, 0.5 * (lo[idx] + hi[idx]), h_new)
            h[idx] = h_new
            eps = np.finfo(float).eps
            noise = 8 * eps * np.maximum(np.abs(rs[idx]), np.abs(ra[idx]))
            done = (np.abs(F_i) <= noise) | (np.abs(h_new - h_i) <= 4 * eps * h_new)
            active[idx[done]] = False

        F = ra + self._panel(a, h) - rs
        bad = np.nonzero(active | (np.abs(F) > self.tolerance * np.maximum(1.0, np.abs(rs))))[0]
        if bad.size:
            logger.debug(f"{bad.size} points fall back on bracketed inversion")
            for k in bad:
                h[k] = self.h_of_r(float(rs[k]))
        return h.reshape(shape)

    def _rate(self, h: np.ndarray) -> np.ndarray:
        return np.sqrt(np.maximum(R_of_h(self.params, h), 0.0)) / (2.0 * h)

    def _panel(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """int_a^b sqrt(R(t))/(2t) dt for arrays of short intervals (fixed Gauss-Legendre)."""
        p = self.params
        if p.c0 == 0:
            lo, hi = np.sqrt(a), np.sqrt(b)
            f = lambda s: np.sqrt(np.maximum(p.sigma2 * s * s + p.sigma1, 0.0))
        else:
            lo, hi = np.log(a), np.log(b)
            f = lambda u: 0.5 * np.sqrt(np.maximum(R_of_h(p, np.exp(u)), 0.0))
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        pts = mid[:, None] + half[:, None] * _GL_X[None, :]
        return half * (f(pts) @ _GL_W)

    def _covering_nodes(self, r_min: float, r_max: float) -> tuple[np.ndarray, np.ndarray]:
        """Node table, extended if needed so that it brackets [r_min, r_max]."""
        h_nodes, r_nodes = self.h_nodes, self.r_nodes
        if r_nodes[0] <= r_min and r_max <= r_nodes[-1]:
            return h_nodes, r_nodes
        lo, hi = self.h_domain
        hs, rs = list(h_nodes), list(r_nodes)
        steps = 0
        while rs[-1] < r_max:
            h_last = hs[-1]
            h_next = h_last * EXTENSION_FACTOR if math.isinf(hi) else hi - (hi - h_last) / EXTENSION_FACTOR
            if not h_last < h_next < hi:
                raise nzerr.ConvergenceError("node table extension", f"stalled at h = {h_last!r}")
            rs.append(rs[-1] + _segment(self.params, h_last, h_next))
            hs.append(h_next)
            steps += 1
            if steps > MAX_EXTENSION_STEPS:
                raise nzerr.ConvergenceError("node table extension", f"r = {r_max!r} not reached")
        head_h, head_r = [], []
        h_first, r_first = hs[0], rs[0]
        while r_first > r_min:
            h_prev = lo + (h_first - lo) / EXTENSION_FACTOR
            if not lo < h_prev < h_first:
                raise nzerr.ConvergenceError("node table extension", f"stalled at h = {h_first!r}")
            r_first = r_first - _segment(self.params, h_prev, h_first)
            h_first = h_prev
            head_h.append(h_first)
            head_r.append(r_first)
            steps += 1
            if steps > MAX_EXTENSION_STEPS:
                raise nzerr.ConvergenceError("node table extension", f"r = {r_min!r} not reached")
        logger.debug(f"node table extended by {steps} nodes")
        return (np.array(head_h[::-1] + hs), np.array(head_r[::-1] + rs))

    def _round_trip_ok(self) -> bool:
        """Invert r at the geometric midpoints of the table and compare."""
        a, b = self.h_nodes[:-1], self.h_nodes[1:]
        mids = np.sqrt(a * b)
        r_mid = self.r_nodes[:-1] + self._panel(a, mids)
        back = self.h_of_r_many(r_mid)
        err = np.abs(back - mids) / np.maximum(1.0, mids)
        worst = float(err.max())
        logger.debug(f"round trip error {worst!r} over {mids.size} midpoints")
        return worst <= self.tolerance

def _node_abscissae(lo: float, hi: float, h_ref: float, n: int) -> np.ndarray:
    """Strictly increasing nodes in (lo, hi), geometric towards both endpoints."""
    m = n // 2 + 1
    left = lo + (h_ref - lo) * np.geomspace(NODE_SPAN_FINITE, 1.0, m)
    if math.isinf(hi):
        right = h_ref * np.geomspace(1.0, NODE_SPAN_INFINITE, m)
    else:
        right = hi - (hi - h_ref) * np.geomspace(1.0, NODE_SPAN_FINITE, m)
    left[-1] = h_ref
    right[0] = h_ref
    nodes = np.unique(np.concatenate([left, right]))
    return nodes[(nodes > lo) & (nodes < hi)]

def _integrate_nodes(params: NatanzonParams, h_nodes: np.ndarray, h_ref: float, r_ref: float) -> np.ndarray:
    """r at every node, accumulated outward from h_ref."""
    r_nodes = np.empty_like(h_nodes)
    k = int(np.searchsorted(h_nodes, h_ref))
    r_nodes[k] = r_ref
    for i in range(k, len(h_nodes) - 1):
        r_nodes[i + 1] = r_nodes[i] + _segment(params, h_nodes[i], h_nodes[i + 1])
    for i in range(k, 0, -1):
        r_nodes[i - 1] = r_nodes[i] - _segment(params, h_nodes[i - 1], h_nodes[i])
    return r_nodes

def _default_anchor(params: NatanzonParams,
                    intervals: list[tuple[float, float]]) -> tuple[tuple[float, float], float]:
    """Pick the working interval and h0 (r0 = 0).

    c0 = 0 with the interval starting at 0: anchor at the h -> 0+ limit.
    Otherwise h0 = 1 when admissible, else an interior point."""
    chosen = None
    for lo, hi in intervals:
        if lo < 1.0 < hi:
            chosen = (lo, hi)
    if chosen is None:
        unbounded = [iv for iv in intervals if math.isinf(iv[1])]
        chosen = unbounded[0] if unbounded else intervals[0]
    lo, hi = chosen
    if lo == 0 and params.c0 == 0:
        return chosen, 0.0
    return chosen, _interior_point(lo, hi)

def build_change_of_variable(params: NatanzonParams, config: MapConfig = None) -> CoordinateMap:
    """Tabulate r(h) on the maximal interval of (0, inf) containing the anchor where R > 0."""
    if config is None:
        config = MapConfig()
    intervals = positive_intervals(params)
    if not intervals:
        raise nzerr.DomainError("R(h) <= 0 everywhere on (0, inf)")

    if config.anchor is not None:
        h0, r0 = float(config.anchor[0]), float(config.anchor[1])
        if h0 < 0 or (h0 > 0 and R_of_h(params, h0) <= 0):
            raise nzerr.DomainError(f"R(h0) <= 0 at the anchor h0 = {h0!r}")
        if h0 == 0 and params.c0 != 0:
            raise nzerr.DomainError("Anchor h0 = 0 requires c0 = 0")
        lo, hi = _containing_interval(params, h0)
    else:
        (lo, hi), h0 = _default_anchor(params, intervals)
        r0 = 0.0

    h_ref = h0 if h0 > 0 else _interior_point(lo, hi)
    r_ref = r0 + _segment(params, h0, h_ref)

    if lo == 0:
        r_lo = r0 - _segment(params, 0.0, h0) if params.c0 == 0 else -math.inf
    else:
        r_lo = r0 - _segment(params, lo, h0)
    r_hi = math.inf if math.isinf(hi) else r0 + _segment(params, h0, hi)

    n = config.min_nodes
    while True:
        h_nodes = _node_abscissae(lo, hi, h_ref, n)
        r_nodes = _integrate_nodes(params, h_nodes, h_ref, r_ref)
        if not (np.all(np.diff(h_nodes) > 0) and np.all(np.diff(r_nodes) > 0)):
            raise nzerr.NumericalError("Node table is not strictly increasing")
        cmap = CoordinateMap(params, (lo, hi), (r_lo, r_hi), (h0, r0),
                             h_nodes, r_nodes, config.tolerance)
        if cmap._round_trip_ok():
            logger.debug(f"built {cmap}")
            return cmap
        if 2 * n > config.max_nodes:
            raise nzerr.ConvergenceError("coordinate map", f"round trip tolerance not met with {n} nodes")
        n *= 2
        logger.debug(f"refining node table to {n} nodes")

def h_of_r(cmap: CoordinateMap, r: float) -> float:
    return cmap.h_of_r(r)

def V_of_r(params: NatanzonParams, cmap: CoordinateMap, r: float) -> float:
    """V(r) = (g2 h^2 + g1 h + eta)/R + (sigma1 h - sigma2 h^2)/R^2 - (5/4) delta h^2/R^3 at h = h(r)."""
    if cmap.params != params:
        raise nzerr.PreconditionError("V_of_r", "a coordinate map built for the same parameters")
    return float(V_of_h(params, cmap.h_of_r(r)))

def potential_values(params: NatanzonParams, cmap: CoordinateMap, rs) -> np.ndarray:
    """V on an array of r values."""
    if cmap.params != params:
        raise nzerr.PreconditionError("potential_values", "a coordinate map built for the same parameters")
    return V_of_h(params, cmap.h_of_r_many(rs))
