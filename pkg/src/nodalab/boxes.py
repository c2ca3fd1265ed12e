"""Box subdivisions and per-box statistics of eigenfunction mass.

The domain is tiled by equal axis intervals with side strictly between delta
and 2*delta. Local averages of phi^2 over a box and over its starred union
(the box plus its <= 3^n - 1 touching neighbors) drive the exceptional-set
mask: a grid point is exceptional when phi^2 there deviates from the starred
average of its box by more than the comparability factor A. Per-box masses of
that mask classify boxes as good or bad; boxes meeting the nodal set are
flagged separately.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ResolutionError, ValidationError
from .grid import GridSample
from .nodal import NodalApprox
from .spectrum import nodal_distance_exact


def unit_ball_volume(n: int) -> float:
    """Volume of the n-dimensional unit ball (2, pi, 4 pi/3, ...)."""
    if n < 1:
        raise ValidationError("dimension must be >= 1")
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def goodness_threshold(n: int) -> float:
    """Default exceptional-mass fraction below which a box counts as good."""
    return unit_ball_volume(n) * 10.0 ** (-2 * n)


@dataclass(frozen=True)
class Subdivision:
    """Equal-interval tiling of an axis-aligned cube, every side in (delta, 2*delta)."""

    origin: tuple[float, ...]
    lengths: tuple[float, ...]
    delta: float
    counts: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.lengths)

    @property
    def sides(self) -> tuple[float, ...]:
        return tuple(L / c for L, c in zip(self.lengths, self.counts))

    @property
    def n_boxes(self) -> int:
        return math.prod(self.counts)

    @property
    def box_volume(self) -> float:
        return math.prod(self.sides)

    def edges(self, axis: int) -> np.ndarray:
        c = self.counts[axis]
        return self.origin[axis] + self.lengths[axis] * np.arange(c + 1) / c


def _axis_count(L: float, delta: float) -> int:
    if L <= delta:
        raise ValidationError(f"axis length {L:g} must exceed delta={delta:g}")
    N = max(1, math.floor(L / (1.5 * delta)))
    for cand in (N, N - 1, N + 1):
        if cand >= 1 and delta < L / cand < 2 * delta:
            return cand
    raise ValidationError(f"no box count puts side of axis length {L:g} in ({delta:g}, {2*delta:g})")


def subdivide(lengths, delta: float, origin=None) -> Subdivision:
    """Tile a cube with equal intervals per axis, each side strictly in (delta, 2*delta)."""
    if delta <= 0:
        raise ValidationError("delta must be positive")
    lengths = tuple(float(L) for L in lengths)
    if origin is None:
        origin = (0.0,) * len(lengths)
    counts = tuple(_axis_count(L, delta) for L in lengths)
    return Subdivision(tuple(float(o) for o in origin), lengths, float(delta), counts)


def _check_alignment(sample: GridSample, sub: Subdivision):
    if sub.n != sample.n:
        raise ValidationError("subdivision and sample dimensions differ")
    lengths = sample.domain.lengths
    for j in range(sub.n):
        if abs(sub.origin[j]) > 1e-12 or abs(sub.lengths[j] - lengths[j]) > 1e-9:
            raise ValidationError("subdivision must tile the sample's full domain")
    for j in range(sub.n):
        if sub.sides[j] / sample.h[j] < 8.0 - 1e-9:
            raise ResolutionError(
                f"axis {j}: {sub.sides[j] / sample.h[j]:.2f} grid points per box side (need >= 8)"
            )


def _grid_box_ids(sample: GridSample, sub: Subdivision) -> np.ndarray:
    """Flat box index of every grid point, shaped like the sample."""
    per_axis = []
    for j in range(sub.n):
        x = np.arange(sample.shape[j]) * sample.h[j]
        b = np.floor(x * sub.counts[j] / sub.lengths[j]).astype(np.int64)
        per_axis.append(np.clip(b, 0, sub.counts[j] - 1))
    flat = per_axis[0]
    for j in range(1, sub.n):
        flat = flat[..., None] * sub.counts[j] + per_axis[j]
    return flat


def _box_sum(flat_ids: np.ndarray, weights: np.ndarray | None, sub: Subdivision) -> np.ndarray:
    w = None if weights is None else weights.ravel()
    out = np.bincount(flat_ids.ravel(), weights=w, minlength=sub.n_boxes)
    return out.reshape(sub.counts)


def _star_sum(arr: np.ndarray, periodic: bool) -> np.ndarray:
    """Sum over the 3^n star of boxes, separably one axis at a time."""
    out = arr
    for axis in range(arr.ndim):
        if periodic:
            out = out + np.roll(out, 1, axis=axis) + np.roll(out, -1, axis=axis)
        else:
            acc = out.copy()
            lo = [slice(None)] * arr.ndim
            hi = [slice(None)] * arr.ndim
            lo[axis] = slice(0, -1)
            hi[axis] = slice(1, None)
            acc[tuple(lo)] += out[tuple(hi)]
            acc[tuple(hi)] += out[tuple(lo)]
            out = acc
    return out


def comparability_set(sample: GridSample, sub: Subdivision, A: float):
    """Exceptional grid points: phi^2 off its starred box average by factor > A.

    Returns (mask, volume): a boolean array over the sample grid marking points
    where phi^2 / Av_{R*}(phi^2) leaves [1/A, A], and its volume, marked count
    times the grid cell volume. This is the minimal exceptional set for the
    given A; any valid choice contains it.
    """
    if A <= 1:
        raise ValidationError("comparability factor A must exceed 1")
    _check_alignment(sample, sub)
    F = sample.values**2
    ids = _grid_box_ids(sample, sub)
    sums = _box_sum(ids, F, sub)
    cnts = _box_sum(ids, None, sub)
    star_avg = _star_sum(sums, sample.periodic) / _star_sum(cnts.astype(float), sample.periodic)
    if not np.all(star_avg > 0):
        raise ValidationError("a starred box average is zero (sample vanishes there)")
    local = star_avg.reshape(-1)[ids]
    ratio = F / local
    mask = (ratio < 1.0 / A) | (ratio > A)
    volume = float(mask.sum()) * float(np.prod(np.asarray(sample.h)))
    return mask, volume


@dataclass
class BoxStats:
    """Per-box statistics: phi^2 averages, exceptional mass, flags, sign fractions."""

    sub: Subdivision
    A: float
    avg: np.ndarray
    star_avg: np.ndarray
    e_frac: np.ndarray
    e_volume: float
    nodal: np.ndarray
    pos_frac: np.ndarray
    neg_frac: np.ndarray
    good: np.ndarray | None = None

    @property
    def e_mass(self) -> np.ndarray:
        return self.e_frac * self.sub.box_volume


SIGN_EPS = 1e-12


def compute_box_stats(
    sample: GridSample,
    sub: Subdivision,
    A: float,
    nodal: NodalApprox | None = None,
) -> BoxStats:
    """Box averages of phi^2, exceptional-set fractions, sign fractions, nodal flags."""
    _check_alignment(sample, sub)
    F = sample.values**2
    ids = _grid_box_ids(sample, sub)
    sums = _box_sum(ids, F, sub)
    cnts = _box_sum(ids, None, sub).astype(float)
    avg = sums / cnts
    star_avg = _star_sum(sums, sample.periodic) / _star_sum(cnts, sample.periodic)
    if not np.all(star_avg > 0):
        raise ValidationError("a starred box average is zero (sample vanishes there)")
    mask, e_volume = comparability_set(sample, sub, A)
    e_frac = _box_sum(ids, mask.astype(float), sub) / cnts
    pos = _box_sum(ids, (sample.values > SIGN_EPS).astype(float), sub) / cnts
    neg = _box_sum(ids, (sample.values < -SIGN_EPS).astype(float), sub) / cnts
    if nodal is not None:
        nodal_mask = nodal_box_count(sub, nodal).mask
    else:
        nodal_mask = np.zeros(sub.counts, dtype=bool)
    return BoxStats(sub, float(A), avg, star_avg, e_frac, e_volume, nodal_mask, pos, neg)


def classify_boxes(stats: BoxStats, threshold: float | None = None) -> np.ndarray:
    """Flag boxes good when their exceptional fraction is below the threshold.

    The default threshold is the unit-ball volume times 10^(-2n).
    """
    if threshold is None:
        threshold = goodness_threshold(stats.sub.n)
    good = stats.e_frac < threshold
    stats.good = good
    return good


def bad_proportion(stats: BoxStats) -> float:
    """Fraction of boxes classified bad (classifies with defaults if needed)."""
    good = stats.good if stats.good is not None else classify_boxes(stats)
    return float((~good).sum() / good.size)


@dataclass
class NodalBoxes:
    """Boxes meeting the nodal set: count, mask, and starred-union volume."""

    count: int
    mask: np.ndarray
    star_volume: float


def nodal_box_count(sub: Subdivision, nodal: NodalApprox) -> NodalBoxes:
    """Boxes containing a nodal vertex or overlapping a sign-change cell.

    The starred-union volume covers every flagged box plus its touching
    neighbors (the union of R_nu*), which contains the delta-tube when the
    grid resolves delta.
    """
    sample = nodal.sample
    _check_alignment(sample, sub)
    mask = np.zeros(sub.counts, dtype=bool)
    counts = np.asarray(sub.counts)
    lengths = np.asarray(sub.lengths)

    def mark(points: np.ndarray):
        if points.shape[0] == 0:
            return
        b = np.floor(points * counts / lengths).astype(np.int64)
        if sample.periodic:
            b %= counts
        else:
            b = np.clip(b, 0, counts - 1)
        mask[tuple(b.T)] = True

    mark(nodal.vertices)
    if nodal.cells.shape[0] != 0:
        h = np.asarray(sample.h)

        def box_of(points: np.ndarray) -> np.ndarray:
            b = np.floor(points * counts / lengths).astype(np.int64)
            if sample.periodic:
                return b % counts
            return np.clip(b, 0, counts - 1)

        # a cell counts only when it lies inside a single box; straddling
        # cells are represented by their crossing vertices instead
        lo = box_of(nodal.cells * h)
        hi = box_of((nodal.cells + 1) * h)
        inside = np.all(lo == hi, axis=1)
        if inside.any():
            mask[tuple(lo[inside].T)] = True
    star = _star_sum(mask.astype(np.int64), sample.periodic) > 0
    return NodalBoxes(int(mask.sum()), mask, float(star.sum()) * sub.box_volume)


@dataclass
class SignBallStats:
    """Grid-counted sign split of a ball around a nodal point."""

    ratio: float
    pos_frac: float
    neg_frac: float
    points: int


def sign_ratio(sample: GridSample, center, radius: float) -> SignBallStats:
    """Vol(B+)/Vol(B-) for the ball at a nodal point, by grid counting.

    The center must lie on the nodal set (within twice the grid spacing) and
    the ball must fit inside the domain; on the torus it wraps but must not
    self-overlap. An empty negative part yields an infinite ratio.
    """
    center = np.asarray(center, dtype=float)
    if center.shape != (sample.n,):
        raise ValidationError(f"center must have {sample.n} coordinates")
    if radius <= 0:
        raise ValidationError("radius must be positive")
    lengths = sample.domain.lengths
    if sample.periodic:
        if 2 * radius > min(lengths):
            raise ValidationError("ball self-overlaps around the torus")
    else:
        for j in range(sample.n):
            if center[j] - radius < 0 or center[j] + radius > lengths[j]:
                raise ValidationError("ball leaves the domain")
    d0 = float(nodal_distance_exact(sample.mode, center))
    if d0 > 2 * max(sample.h):
        raise ValidationError(
            f"center is {d0:g} from the nodal set (allowed 2*max(h) = {2 * max(sample.h):g})"
        )
    r2 = np.zeros(sample.shape)
    for j in range(sample.n):
        x = np.arange(sample.shape[j]) * sample.h[j]
        diff = np.abs(x - center[j])
        if sample.periodic:
            diff = np.minimum(diff, lengths[j] - diff)
        shape = [1] * sample.n
        shape[j] = -1
        r2 = r2 + (diff**2).reshape(shape)
    inside = r2 < radius**2
    total = int(inside.sum())
    if total == 0:
        raise ResolutionError("ball contains no grid points")
    v = sample.values[inside]
    npos = int((v > SIGN_EPS).sum())
    nneg = int((v < -SIGN_EPS).sum())
    ratio = math.inf if nneg == 0 else npos / nneg
    return SignBallStats(ratio, npos / total, nneg / total, total)


def ball_mass_ratio(sample: GridSample, center, radius: float) -> float:
    """Grid-quadrature ratio of phi^2 mass in B(center, r) to B(center, 2r)."""
    center = np.asarray(center, dtype=float)
    lengths = sample.domain.lengths
    r2 = np.zeros(sample.shape)
    for j in range(sample.n):
        x = np.arange(sample.shape[j]) * sample.h[j]
        diff = np.abs(x - center[j])
        if sample.periodic:
            diff = np.minimum(diff, lengths[j] - diff)
        shape = [1] * sample.n
        shape[j] = -1
        r2 = r2 + (diff**2).reshape(shape)
    F = sample.values**2
    outer = float(F[r2 < (2 * radius) ** 2].sum())
    if outer <= 0:
        raise ValidationError("no phi^2 mass in the doubled ball")
    return float(F[r2 < radius**2].sum()) / outer


def stats_to_csv(stats: BoxStats, path):
    """One CSV row per box: index, averages, exceptional fraction, flags, sign split."""
    good = stats.good if stats.good is not None else classify_boxes(stats)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["nu", "avg", "star_avg", "e_frac", "good", "nodal", "pos_frac", "neg_frac"])
        for flat in range(stats.sub.n_boxes):
            nu = np.unravel_index(flat, stats.sub.counts)
            w.writerow(
                [
                    "x".join(str(i) for i in nu),
                    repr(float(stats.avg[nu])),
                    repr(float(stats.star_avg[nu])),
                    repr(float(stats.e_frac[nu])),
                    int(good[nu]),
                    int(stats.nodal[nu]),
                    repr(float(stats.pos_frac[nu])),
                    repr(float(stats.neg_frac[nu])),
                ]
            )
