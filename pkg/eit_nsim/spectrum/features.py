"""
Peaks and dips of a recorded spectrum.

The reference level at each point is the upper convex hull of the spectrum over a window of
SMOOTHING_LINEWIDTHS natural linewidths on either side. A dip is a local maximum of the depth below
that hull whose half-depth width stays under half the window; smooth curvature only ever produces a
sag as wide as the window itself. Broad peaks are located on the spectrum with the accepted dips
bridged over, and a narrow maximum sitting deep inside a pair of dips is reported as a narrow peak
(an inverted, absorption-enhanced feature).
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.signal import find_peaks, peak_widths
from scipy.spatial import ConvexHull, QhullError

import config
from eit_nsim.errors import InputValidationError
from eit_nsim.spectrum.scan import SpectrumResult


@dataclass(frozen=True)
class Feature:
    kind: str                  # "peak" | "dip"
    position: float            # axis units
    fwhm: float                # axis units, nan when unresolved
    contrast: float            # dips: (envelope - minimum) / envelope; peaks: prominence / height
    resolved: bool = True
    narrow: bool = False

    def as_row(self) -> Dict[str, object]:
        return {"kind": self.kind, "position": self.position, "fwhm": self.fwhm,
                "contrast": self.contrast, "resolved": self.resolved, "narrow": self.narrow}


def upper_envelope(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Upper convex hull of the points (x, y), evaluated on x"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    span = float(np.ptp(y)) if y.size else 0.0
    if y.size < 3 or span == 0.0:
        return y.copy()
    pts = np.column_stack([(x - x[0]) / (x[-1] - x[0]), (y - y.min()) / span])
    try:
        verts = ConvexHull(pts).vertices
    except QhullError:
        # collinear to working precision
        return np.maximum(y, np.interp(x, x[[0, -1]], y[[0, -1]]))
    # vertices run counter-clockwise, so rightmost -> leftmost is the upper chain
    verts = np.roll(verts, -int(np.argmax(pts[verts, 0])))
    chain = verts[:int(np.argmin(pts[verts, 0])) + 1][::-1]
    return np.maximum(y, np.interp(x, x[chain], y[chain]))


def segments(x: np.ndarray) -> List[slice]:
    """Contiguous runs of an ascending grid; a gap wider than 1.5 steps starts a new run"""
    if len(x) < 2:
        return [slice(0, len(x))]
    dx = np.diff(x)
    step = float(np.min(dx[dx > 0])) if np.any(dx > 0) else 1.0
    cuts = np.flatnonzero(dx > 1.5 * step) + 1
    bounds = [0, *cuts.tolist(), len(x)]
    return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]


@dataclass(frozen=True)
class _Dip:
    index: int
    position: float
    depth: float
    level: float               # envelope at the minimum
    fwhm: float
    left: int                  # hull vertices bridging the dip
    right: int
    bridge: np.ndarray         # envelope over [left, right]


def _window(n: int, i: int, half: int) -> slice:
    return slice(max(0, i - half), min(n, i + half + 1))


def _depth_profile(x: np.ndarray, y: np.ndarray, half: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per point, the depth below and the level of the envelope of the window centred there"""
    depth = np.zeros_like(y)
    level = y.copy()
    for i in range(len(y)):
        w = _window(len(y), i, half)
        env = upper_envelope(x[w], y[w])
        level[i] = env[i - w.start]
        depth[i] = level[i] - y[i]
    return depth, level


def _crossing(x: np.ndarray, d: np.ndarray, k: int, half_depth: float, direction: int) -> float:
    """Walk from k until d falls to half_depth, linearly interpolated; a rise in d (the next
    feature) or the window edge ends the walk early"""
    j = k
    while 0 <= j + direction < len(d):
        nxt = j + direction
        if d[nxt] <= half_depth:
            t = (d[j] - half_depth) / (d[j] - d[nxt])
            return float(x[j] + t * (x[nxt] - x[j]))
        if d[nxt] > d[j]:
            return float(x[j])
        j = nxt
    return float(x[j])


def _vertex_shift(a: float, b: float, c: float) -> float:
    """Offset in grid steps of the apex of the parabola through three equally spaced samples"""
    denom = a - 2.0 * b + c
    if denom == 0.0:
        return 0.0
    return float(np.clip(0.5 * (a - c) / denom, -0.5, 0.5))


def _dips(x: np.ndarray, y: np.ndarray, half: int, max_width: float) -> List[_Dip]:
    n = len(y)
    depth, level = _depth_profile(x, y, half)
    scale = np.where(np.abs(level) > 0, np.abs(level), 1.0)
    idx, _ = find_peaks(depth / scale, height=config.DIP_MIN_CONTRAST)

    found: Dict[int, _Dip] = {}
    for i in idx:
        w = _window(n, int(i), half)
        xs, env = x[w], upper_envelope(x[w], y[w])
        d = env - y[w]
        k = int(i) - w.start
        while True:
            # climb to the apex of this window's own depth profile
            nbrs = [j for j in (k - 1, k + 1) if 0 <= j < len(d) and d[j] > d[k]]
            if not nbrs:
                break
            k = max(nbrs, key=lambda j: d[j])
        centre = w.start + k
        if centre in found or d[k] <= 0.0:
            continue
        if abs(env[k]) > 0 and d[k] / abs(env[k]) < config.DIP_MIN_CONTRAST:
            continue
        xl = _crossing(xs, d, k, 0.5 * d[k], -1)
        xr = _crossing(xs, d, k, 0.5 * d[k], +1)
        if xr - xl > max_width:
            continue
        on_hull = np.flatnonzero(d <= 1e-12 * max(abs(env[k]), 1e-300))
        left = int(on_hull[on_hull < k].max()) if np.any(on_hull < k) else 0
        right = int(on_hull[on_hull > k].min()) if np.any(on_hull > k) else len(d) - 1
        shift = _vertex_shift(d[k - 1], d[k], d[k + 1]) if 0 < k < len(d) - 1 else 0.0
        step = 0.5 * (xs[min(k + 1, len(xs) - 1)] - xs[max(k - 1, 0)])
        found[centre] = _Dip(centre, float(xs[k] + shift * step), float(d[k]), float(env[k]), xr - xl,
                             w.start + left, w.start + right, env[left:right + 1].copy())
    return [found[c] for c in sorted(found)]


def _inverted_peaks(x: np.ndarray, y: np.ndarray, dips: Sequence[_Dip], max_gap: float,
                    step: float) -> List[Feature]:
    out: List[Feature] = []
    for a, b in zip(dips[:-1], dips[1:]):
        if b.position - a.position > max_gap or b.index - a.index < 2:
            continue
        p = a.index + 1 + int(np.argmax(y[a.index + 1:b.index]))
        floor = max(y[a.index], y[b.index])
        prominence = y[p] - floor
        if not abs(y[p]) > 0 or prominence / abs(y[p]) < config.DIP_MIN_CONTRAST:
            continue
        # only a maximum in the lower half of the surrounding dips counts as inverted
        lo, hi = min(a.left, b.left), max(a.right, b.right)
        bridge = np.interp(x[p], x[[lo, hi]], y[[lo, hi]])
        if bridge - y[p] < 0.5 * min(a.depth, b.depth):
            continue
        seg = y[a.index:b.index + 1] - floor
        k = p - a.index
        half = 0.5 * prominence
        xs = x[a.index:b.index + 1]
        width = _crossing(xs, seg, k, half, +1) - _crossing(xs, seg, k, half, -1)
        ok = width >= config.MIN_POINTS_PER_FEATURE * step
        shift = _vertex_shift(y[p - 1], y[p], y[p + 1])
        out.append(Feature("peak", float(x[p] + shift * step), float(width) if ok else float("nan"),
                           float(prominence / abs(y[p])), bool(ok), True))
    return out


def _peak_position(x: np.ndarray, y: np.ndarray, masked: np.ndarray, filled: np.ndarray, i: int) -> float:
    """Apex of a quadratic through the unmasked samples of the top quarter of a broad peak"""
    _, _, lo, hi = peak_widths(filled, [i], rel_height=0.25)
    sel = np.arange(int(np.ceil(lo[0])), int(np.floor(hi[0])) + 1)
    sel = sel[~masked[sel]]
    if len(sel) < 3:
        return float(x[i])
    a, b, _ = np.polyfit(x[sel] - x[i], y[sel], 2)
    if not a < 0:
        return float(x[i])
    apex = x[i] - 0.5 * b / a
    return float(apex) if x[sel[0]] <= apex <= x[sel[-1]] else float(x[i])


def _segment_features(x: np.ndarray, y: np.ndarray, gamma: float) -> List[Feature]:
    if len(x) < 3:
        return []
    step = float(np.median(np.diff(x)))
    window = max(int(round(config.SMOOTHING_LINEWIDTHS * gamma / step)), 3)
    max_width = 0.5 * window * step
    dips = _dips(x, y, window, max_width)

    out: List[Feature] = []
    for d in dips:
        ok = d.fwhm >= config.MIN_POINTS_PER_FEATURE * step
        contrast = d.depth / abs(d.level) if abs(d.level) > 0 else 0.0
        out.append(Feature("dip", d.position, float(d.fwhm) if ok else float("nan"), float(contrast), bool(ok), True))
    out += _inverted_peaks(x, y, dips, window * step, step)

    # broad peaks with the dips bridged over
    filled = y.copy()
    masked = np.zeros(len(y), dtype=bool)
    for d in dips:
        filled[d.left:d.right + 1] = np.maximum(filled[d.left:d.right + 1], d.bridge)
        masked[d.left + 1:d.right] = True
    span = float(filled.max() - filled.min())
    if span > 1e-9 * max(float(np.max(np.abs(filled))), 1e-300):
        idx, props = find_peaks(filled, prominence=config.PEAK_MIN_PROMINENCE * span)
        for i, p in zip(idx, props["prominences"]):
            w = peak_widths(filled, [i], rel_height=0.5)[0][0]
            ok = w >= config.MIN_POINTS_PER_FEATURE
            height = abs(filled[i]) if filled[i] != 0 else 1.0
            out.append(Feature("peak", _peak_position(x, y, masked, filled, int(i)),
                               float(w * step) if ok else float("nan"), float(p / height), bool(ok), False))
    return out


def dip_metrics(result: SpectrumResult, gamma: float = config.GAMMA_MHZ,
                laser: str = "laser1") -> List[Feature]:
    """Peaks and dips of one laser's absorbed fraction, ordered by position"""
    if laser not in ("laser1", "laser2"):
        raise InputValidationError(f"laser must be 'laser1' or 'laser2', got {laser!r}")
    y = np.asarray(result.absorption_laser1 if laser == "laser1" else result.absorption_laser2, dtype=float)
    return find_features(np.asarray(result.values, dtype=float), y, gamma)


def find_features(x: np.ndarray, y: np.ndarray, gamma: float = config.GAMMA_MHZ) -> List[Feature]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise InputValidationError(f"axis has {x.size} points, signal has {y.size}")
    if not np.all(np.isfinite(y)):
        raise InputValidationError("spectrum contains non-finite values")
    if x.size > 1 and np.any(np.diff(x) <= 0):
        raise InputValidationError("axis values must be strictly ascending")
    feats = [f for s in segments(x) for f in _segment_features(x[s], y[s], gamma)]
    return sorted(feats, key=lambda f: (f.position, f.kind))


def features_frame(features: Sequence[Feature]) -> pd.DataFrame:
    return pd.DataFrame([f.as_row() for f in features],
                        columns=["kind", "position", "fwhm", "contrast", "resolved", "narrow"])


@dataclass
class SideDipTracking:
    table: pd.DataFrame                      # one row per outer value
    slope_left: float                        # d(position - main)/df, nan with fewer than two points
    slope_right: float
    vanished_left: List[float] = field(default_factory=list)   # outer values without a left dip
    vanished_right: List[float] = field(default_factory=list)


def _nearest_dip(dips: Sequence[Feature], target: float, tol: float) -> Optional[Feature]:
    near = [d for d in dips if abs(d.position - target) <= tol]
    return min(near, key=lambda d: (abs(d.position - target), d.position)) if near else None


def _slope(f: np.ndarray, d: np.ndarray) -> float:
    ok = np.isfinite(d)
    if ok.sum() < 2 or np.ptp(f[ok]) == 0:
        return float("nan")
    return float(np.polyfit(f[ok], d[ok], 1)[0])


def track_side_dips(sweep: Sequence[Tuple[float, SpectrumResult]], main_position: Optional[float] = None,
                    frequency: Optional[float] = None, gamma: float = config.GAMMA_MHZ) -> SideDipTracking:
    """Main dip and the two dips near main -/+ f for every spectrum of a sweep.

    f is the outer value when the sweep runs over the generator frequency, otherwise `frequency` or the
    modulation frequency recorded with each spectrum. Without main_position the deepest dip of the first
    spectrum is taken."""
    if not sweep:
        raise InputValidationError("empty sweep")
    rows = []
    for value, result in sweep:
        dips = [d for d in dip_metrics(result, gamma) if d.kind == "dip"]
        if result.metadata.get("outer_axis") == "GeneratorFrequency":
            f = float(value)
        else:
            f = frequency if frequency is not None else result.metadata.get("modulation_frequency")
        if f is None:
            raise InputValidationError("side-dip tracking needs a modulation frequency")
        if main_position is None:
            if not dips:
                raise InputValidationError("no dip in the first spectrum to take as the main dip")
            main_position = max(dips, key=lambda d: (d.contrast, -d.position)).position
        step = float(np.min(np.diff(result.values))) if len(result) > 1 else 0.0
        tol = max(3.0 * step, 0.5 * config.SMOOTHING_LINEWIDTHS * gamma)
        main = _nearest_dip(dips, main_position, tol)
        centre = main.position if main is not None else main_position
        left = _nearest_dip(dips, centre - f, tol)
        right = _nearest_dip(dips, centre + f, tol)
        rows.append({
            "outer": float(value),
            "frequency": float(f),
            "main_position": main.position if main else np.nan,
            "main_contrast": main.contrast if main else 0.0,
            "left_position": left.position if left else np.nan,
            "left_contrast": left.contrast if left else 0.0,
            "right_position": right.position if right else np.nan,
            "right_contrast": right.contrast if right else 0.0,
        })
    table = pd.DataFrame(rows)
    f = table["frequency"].to_numpy()
    left_d = (table["left_position"] - table["main_position"]).to_numpy()
    right_d = (table["right_position"] - table["main_position"]).to_numpy()
    return SideDipTracking(
        table=table,
        slope_left=_slope(f, left_d),
        slope_right=_slope(f, right_d),
        vanished_left=table.loc[table["left_position"].isna(), "outer"].tolist(),
        vanished_right=table.loc[table["right_position"].isna(), "outer"].tolist(),
    )
