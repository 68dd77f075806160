"""Analytic Biot-Savart evaluation over finite straight filaments.

The field of one filament uses the closed form

    B = (mu0 I / 4 pi) * (|r1| + |r2|) * (r1 x r2)
        / ( |r1| |r2| ( |r1| |r2| + r1.r2 ) )

with r1, r2 the vectors from the segment ends to the field point.  This is
exact for a finite straight wire, vanishes identically on the collinear
extension, and is singular only on the segment itself.  Points within
EPS_SING of a filament raise SingularPoint rather than returning garbage;
the samplers convert that into explicit NaN gaps.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptySample, InvalidInput, SingularPoint
from .geometry import Segment, SegmentList

MU_0 = 4.0 * math.pi * 1e-7  # T m / A, exact by convention here
EPS_SING = 1e-7              # m: singular tube radius around each filament

CSV_HEADER = "x_m,y_m,z_m,Bx_T,By_T,Bz_T,Bmag_G"


@dataclass(frozen=True)
class FieldSample:
    position: np.ndarray  # m
    B: np.ndarray         # tesla; NaN components mark a singular gap


def _distance_to_segments(p, starts, ends):
    line = ends - starts
    r1 = p - starts
    t = np.einsum("ij,ij->i", r1, line) / np.einsum("ij,ij->i", line, line)
    t = np.clip(t, 0.0, 1.0)
    closest = starts + t[:, None] * line
    return np.linalg.norm(p - closest, axis=1)


def segment_field(seg: Segment, p) -> np.ndarray:
    """Exact field of one finite straight filament at point p (tesla)."""
    p = np.asarray(p, dtype=float)
    sl = SegmentList([seg.a], [seg.b], [seg.current], ["_"])
    return field_at(sl, p)


def field_at(segments: SegmentList, p) -> np.ndarray:
    """Superposed field of all segments at point p (tesla).

    Summation runs in stored segment order for bitwise reproducibility.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (3,):
        raise InvalidInput("field point must be a 3-vector")
    dist = _distance_to_segments(p, segments.starts, segments.ends)
    if np.any(dist < EPS_SING):
        idx = int(np.argmin(dist))
        raise SingularPoint(
            f"point {p.tolist()} within {EPS_SING:g} m of segment {idx}",
            segment_index=idx)
    r1 = p - segments.starts
    r2 = p - segments.ends
    n1 = np.linalg.norm(r1, axis=1)
    n2 = np.linalg.norm(r2, axis=1)
    cross = np.cross(r1, r2)
    denom = n1 * n2 * (n1 * n2 + np.einsum("ij,ij->i", r1, r2))
    # collinear-outside points: cross == 0 while denom > 0; keep the 0/denom
    coef = MU_0 / (4.0 * math.pi) * segments.currents * (n1 + n2) / denom
    return (coef[:, None] * cross).sum(axis=0)


def evaluate_points(segments: SegmentList, points, threads: int = 1):
    """Field at many points; singular points become NaN rows.

    Points are independent, so the result does not depend on thread count.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))

    def one(p):
        try:
            return field_at(segments, p)
        except SingularPoint:
            return np.full(3, np.nan)

    if threads and threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, points))
    else:
        rows = [one(p) for p in points]
    return np.asarray(rows)


@dataclass(frozen=True)
class FieldMap:
    """Samples of B over a line or grid, row-major in `positions`."""

    positions: np.ndarray  # (N, 3) m
    B: np.ndarray          # (N, 3) tesla, NaN rows are singular gaps
    shape: tuple           # (n,) for lines, (n1, n2) for planes

    @property
    def magnitude(self) -> np.ndarray:
        return np.linalg.norm(self.B, axis=1)

    @property
    def samples(self):
        return [FieldSample(p, b) for p, b in zip(self.positions, self.B)]


def _finish_map(segments, positions, shape, threads):
    B = evaluate_points(segments, positions, threads=threads)
    if np.all(np.isnan(B[:, 0])):
        raise EmptySample("every sample point is singular")
    return FieldMap(positions=positions, B=B, shape=shape)


def sample_line(segments: SegmentList, origin, direction, half_range, n,
                threads: int = 1) -> FieldMap:
    """n equally spaced samples on origin +- half_range * direction."""
    if n < 1:
        raise InvalidInput("need at least one sample")
    origin = np.asarray(origin, dtype=float)
    d = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(d)
    if norm == 0:
        raise InvalidInput("direction must be non-zero")
    d = d / norm
    s = np.linspace(-half_range, half_range, n) if n > 1 else np.array([0.0])
    positions = origin + s[:, None] * d
    return _finish_map(segments, positions, (n,), threads)


def sample_plane(segments: SegmentList, center, axis1, axis2, half_ranges,
                 n1, n2, threads: int = 1) -> FieldMap:
    """Row-major n1 x n2 grid over center + u*axis1 + v*axis2."""
    if n1 < 1 or n2 < 1:
        raise InvalidInput("need at least one sample per axis")
    center = np.asarray(center, dtype=float)
    a1 = np.asarray(axis1, dtype=float)
    a2 = np.asarray(axis2, dtype=float)
    if np.linalg.norm(a1) == 0 or np.linalg.norm(a2) == 0:
        raise InvalidInput("plane axes must be non-zero")
    a1 = a1 / np.linalg.norm(a1)
    a2 = a2 / np.linalg.norm(a2)
    h1, h2 = half_ranges if np.iterable(half_ranges) else (half_ranges, half_ranges)
    u = np.linspace(-h1, h1, n1) if n1 > 1 else np.array([0.0])
    v = np.linspace(-h2, h2, n2) if n2 > 1 else np.array([0.0])
    positions = (center
                 + u[:, None, None] * a1
                 + v[None, :, None] * a2).reshape(-1, 3)
    return _finish_map(segments, positions, (n1, n2), threads)


def field_map_csv(fmap: FieldMap) -> str:
    """CSV rendering: x_m,y_m,z_m,Bx_T,By_T,Bz_T,Bmag_G (gaps as nan)."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    mag_gauss = fmap.magnitude * 1e4
    for (x, y, z), (bx, by, bz), bm in zip(fmap.positions, fmap.B, mag_gauss):
        buf.write(f"{x:.9e},{y:.9e},{z:.9e},{bx:.9e},{by:.9e},{bz:.9e},{bm:.9e}\n")
    return buf.getvalue()
