"""Approximation of points by nodal sets: events, exponents, convergence sums.

For separable modes the distance from a point to the nodal set is exact and
closed-form (min over axes of the distance to the nearest factor zero), so
scans over hundreds of thousands of modes vectorize over the mode list's
columns. Records of the running minimum distance drive per-point approximation
exponents; exact tube volumes drive the convergence (Borel-Cantelli style)
sums, since the radii shrink below any fixed grid.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .spectrum import (
    DomainSpec,
    EigenMode,
    ModeList,
    enumerate_modes,
    nodal_distance_exact,
)

METRICS = ("euclidean", "max")


def nearest_nodal_distance(point, mode: EigenMode, metric: str = "euclidean") -> float:
    """Exact distance from a point to the mode's nodal set (no grid).

    The nodal set is a union of axis-perpendicular hyperplanes, so the
    Euclidean and max-coordinate metrics give the same value; the metric
    argument is accepted for reporting symmetry.
    """
    if metric not in METRICS:
        raise ValidationError(f"metric must be one of {METRICS}")
    return float(nodal_distance_exact(mode, np.asarray(point, dtype=float)))


def modes_nodal_distance(point, modes: ModeList, metric: str = "euclidean") -> np.ndarray:
    """Exact nodal distances from one point to every mode in the list."""
    if metric not in METRICS:
        raise ValidationError(f"metric must be one of {METRICS}")
    dom = modes.domain
    point = np.asarray(point, dtype=float)
    if point.shape != (dom.n,):
        raise ValidationError(f"point must have {dom.n} coordinates")
    dist = np.full(modes.m.shape[0], np.inf)
    for j in range(dom.n):
        mj = modes.m[:, j]
        active = mj > 0
        if not active.any():
            continue
        spacing = math.pi / (mj[active] * dom.alpha[j])
        # kind code 0 = cos: zeros sit half a spacing off the sin lattice
        offs = np.where(modes.kind_codes[active, j] == 0, 0.5 * spacing, 0.0)
        r = np.mod(point[j] - offs, spacing)
        d = np.minimum(r, spacing - r)
        dist[active] = np.minimum(dist[active], d)
    if not np.isfinite(dist).all():
        raise ValidationError("a mode in the list has an empty nodal set")
    return dist


@dataclass(frozen=True)
class ApproxEvent:
    """One mode's nodal set at distance `dist` from the point."""

    point: tuple[float, ...]
    k: int
    mu: float
    dist: float

    def hit(self, b: float, C: float) -> bool:
        return self.dist < C / self.mu**b


def approx_events(point, modes: ModeList, b: float, C: float) -> list[ApproxEvent]:
    """All modes (in mu order) whose nodal set passes within C/mu^b of the point."""
    if C <= 0:
        raise ValidationError("C must be positive")
    if modes.m.shape[0] == 0:
        raise ValidationError("mode list is empty")
    dist = modes_nodal_distance(point, modes)
    hits = np.nonzero(dist < C / modes.mu**b)[0]
    pt = tuple(float(v) for v in np.atleast_1d(np.asarray(point, dtype=float)))
    return [ApproxEvent(pt, int(k), float(modes.mu[k]), float(dist[k])) for k in hits]


def events_to_csv(events: list[ApproxEvent]) -> str:
    """Render approximation events as CSV: point coords, mode index, mu, dist."""
    if not events:
        return "k,mu,dist\r\n"
    n = len(events[0].point)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow([f"x{j}" for j in range(n)] + ["k", "mu", "dist"])
    for ev in events:
        writer.writerow([repr(v) for v in ev.point] + [ev.k, repr(ev.mu), repr(ev.dist)])
    return buf.getvalue()


@dataclass(frozen=True)
class ExponentEstimate:
    """Record-event regression estimate of a point's approximation exponent."""

    point: tuple[float, ...]
    exponent: float
    n_records: int
    residual: float
    mu_range: tuple[float, float]
    low_confidence: bool
    exact_hit: bool
    metric: str = "euclidean"


def estimate_exponent(
    point,
    modes: ModeList,
    mu_min: float = 3.0,
    mu_max: float | None = None,
    metric: str = "euclidean",
) -> ExponentEstimate:
    """Fit -log(best distance so far) against log(mu) at its record events.

    Records are the modes that strictly improve the running minimum of the
    scale-free proxy mu * dist. Raw-distance records also admit long ramps of
    intermediate denominators between genuine approximation events; those
    ramps concentrate regression weight at one end of the window and spoil
    the fitted slope. The proxy keeps only second-kind best approximations
    (convergent denominators of x/pi on the interval), and every such record
    improves the raw distance as well, so the fitted quantity is unchanged.
    A point lying exactly on some nodal set gets an infinite exponent and the
    exact_hit flag; fewer than five records flag low confidence.
    """
    if len(modes) == 0:
        raise ValidationError("mode list is empty")
    dist = modes_nodal_distance(point, modes, metric)
    mu = modes.mu
    hi = float(mu[-1]) if mu_max is None else float(mu_max)
    if not mu_min < hi:
        raise ValidationError("empty fit window")
    pt = tuple(float(v) for v in np.atleast_1d(np.asarray(point, dtype=float)))
    zero = dist == 0.0
    if zero.any():
        hit_mu = float(mu[zero][0])
        return ExponentEstimate(pt, math.inf, 0, 0.0, (mu_min, hit_mu), False, True, metric)
    proxy = mu * dist
    running = np.minimum.accumulate(proxy)
    prev = np.concatenate([[np.inf], running[:-1]])
    rec = (proxy < prev) & (mu >= mu_min) & (mu <= hi)
    idx = np.nonzero(rec)[0]
    n_rec = int(idx.size)
    if n_rec < 2:
        return ExponentEstimate(pt, math.nan, n_rec, math.nan, (mu_min, hi), True, False, metric)
    X = np.log(mu[idx])
    Y = -np.log(dist[idx])
    slope, intercept = np.polyfit(X, Y, 1)
    resid = float(np.sqrt(np.mean((Y - slope * X - intercept) ** 2)))
    return ExponentEstimate(pt, float(slope), n_rec, resid, (mu_min, hi), n_rec < 5, False, metric)


@dataclass
class KhinchinResult:
    """Per-point counts of q <= q_max with ||q x|| below psi(q)."""

    points: np.ndarray
    counts: np.ndarray
    largest_q: np.ndarray
    q_max: int


def khinchin_check(psi, points, q_max: int, chunk: int | None = None) -> KhinchinResult:
    """Count solutions of ||q x|| < psi(q) for each sampled x.

    psi maps an integer array q to nonnegative thresholds; ||.|| is the
    distance to the nearest integer. Work is chunked over q so the
    points-by-q product matrix stays within a fixed memory budget.
    """
    points = np.atleast_1d(np.asarray(points, dtype=float))
    if q_max < 1:
        raise ValidationError("q_max must be >= 1")
    if chunk is None:
        chunk = max(1, 5_000_000 // points.size)
    counts = np.zeros(points.size, dtype=np.int64)
    largest = np.zeros(points.size, dtype=np.int64)
    for start in range(1, q_max + 1, chunk):
        q = np.arange(start, min(start + chunk, q_max + 1), dtype=np.int64)
        thresholds = np.asarray(psi(q), dtype=float)
        if thresholds.shape != q.shape:
            raise ValidationError("psi must return one threshold per q")
        if np.any(thresholds < 0):
            raise ValidationError("psi must be nonnegative")
        prod = q[None, :] * points[:, None]
        dist = np.abs(prod - np.round(prod))
        sol = dist < thresholds[None, :]
        counts += sol.sum(axis=1)
        any_sol = sol.any(axis=1)
        if any_sol.any():
            rows = sol[any_sol]
            last_idx = rows.shape[1] - 1 - np.argmax(rows[:, ::-1], axis=1)
            largest[any_sol] = np.maximum(largest[any_sol], q[last_idx])
    return KhinchinResult(points, counts, largest, int(q_max))


@dataclass
class BorelCantelliSums:
    """Partial sums of exact tube volumes at shrinking radii C/mu^(n+1+eps)."""

    mu: np.ndarray
    volumes: np.ndarray     # per-mode exact tube volume
    partial: np.ndarray     # S_K = cumulative sum of volumes
    comparison: np.ndarray  # cumulative sum of C * mu^-(n+eps)

    def cauchy_gap(self, K: int) -> float:
        """S_2K - S_K, the tail mass between K and 2K terms."""
        if 2 * K > self.partial.size:
            raise ValidationError(f"need {2 * K} terms, have {self.partial.size}")
        return float(self.partial[2 * K - 1] - self.partial[K - 1])


def borel_cantelli_sum(
    domain: DomainSpec, C: float, eps: float, k_max: int, mu_cap: float | None = None
) -> BorelCantelliSums:
    """Sum exact tube volumes Vol(T_{mu_k, C/mu_k^{n+1+eps}}) over the spectrum.

    Volumes come from the exact strip inclusion-exclusion oracle, never a grid:
    the radii shrink like mu^-(n+1+eps), below any fixed resolution. Also
    returns the analytic comparison series C * mu^-(n+eps) (up to the nodal
    measure constant), whose convergence the partial sums must track.
    """
    if eps <= 0:
        raise ValidationError("eps must be positive")
    if C <= 0:
        raise ValidationError("C must be positive")
    if k_max < 1:
        raise ValidationError("k_max must be >= 1")
    from .spectrum import tube_volume_exact

    n = domain.n
    if mu_cap is None:
        # Weyl-style guess, grown until enough modes exist
        mu_cap = 4.0 * max(domain.alpha) * (k_max ** (1.0 / n) + 2.0)
    modes = enumerate_modes(domain, mu_cap)
    while modes.m.shape[0] < k_max:
        mu_cap *= 1.5
        modes = enumerate_modes(domain, mu_cap)
    vols = np.empty(k_max)
    mu = modes.mu[:k_max].copy()
    for k in range(k_max):
        delta = C / mu[k] ** (n + 1 + eps)
        vols[k] = tube_volume_exact(modes[k], delta)
    comparison = C * mu ** (-(n + eps))
    return BorelCantelliSums(mu, vols, np.cumsum(vols), np.cumsum(comparison))
