"""Conductor geometries as bundles of straight current filaments.

Every generator returns a :class:`SegmentList`: oriented straight segments,
each carrying a signed current, tagged with the physical conductor (group)
it belongs to.  Volumetric conductors are approximated by filament bundles
with uniform current sharing; cross-sections used for resistance come from
the declared solid dimensions, not the filament count.

Internal units are strict SI (metre, ampere).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ClearanceError, InvalidGeometry, InvalidInput

CHAIN_TOL = 1e-9  # max endpoint gap for closed groups [m]


# ---------------------------------------------------------------------------
# core containers


@dataclass(frozen=True)
class Segment:
    """One straight filament from a to b carrying `current` (positive a->b)."""

    a: np.ndarray
    b: np.ndarray
    current: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and math.isfinite(self.current)):
            raise InvalidGeometry("segment has non-finite data")
        if np.linalg.norm(b - a) <= 0.0:
            raise InvalidGeometry("zero-length segment")

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))


class SegmentList:
    """Ordered collection of filament segments with per-segment group ids.

    Groups listed in `closed_groups` must chain head-to-tail (gap < 1 nm);
    open groups (bars/arms with external terminals) are exempt.
    """

    def __init__(self, starts, ends, currents, group_ids, closed_groups=()):
        starts = np.atleast_2d(np.asarray(starts, dtype=float))
        ends = np.atleast_2d(np.asarray(ends, dtype=float))
        currents = np.atleast_1d(np.asarray(currents, dtype=float))
        group_ids = list(group_ids)
        n = starts.shape[0]
        if n == 0:
            raise InvalidGeometry("empty segment list")
        if ends.shape != starts.shape or currents.shape[0] != n or len(group_ids) != n:
            raise InvalidGeometry("inconsistent segment array shapes")
        if not (np.all(np.isfinite(starts)) and np.all(np.isfinite(ends)) and np.all(np.isfinite(currents))):
            raise InvalidGeometry("non-finite segment data")
        lengths = np.linalg.norm(ends - starts, axis=1)
        if np.any(lengths <= 0.0):
            raise InvalidGeometry("zero-length segment")
        self.starts = starts
        self.ends = ends
        self.currents = currents
        self.group_ids = group_ids
        self.closed_groups = frozenset(closed_groups)
        self._check_chaining()

    # -- construction helpers

    @classmethod
    def from_polyline(cls, points, current, group_id="path", closed=False):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[0] < 2:
            raise InvalidGeometry("polyline needs at least two points")
        if closed:
            pts = np.vstack([pts, pts[:1]])
        starts, ends = pts[:-1], pts[1:]
        n = starts.shape[0]
        return cls(starts, ends, np.full(n, float(current)), [group_id] * n,
                   closed_groups=(group_id,) if closed else ())

    @classmethod
    def from_segments(cls, segments, group_id="path", closed=False):
        segs = list(segments)
        starts = [s.a for s in segs]
        ends = [s.b for s in segs]
        currents = [s.current for s in segs]
        return cls(starts, ends, currents, [group_id] * len(segs),
                   closed_groups=(group_id,) if closed else ())

    def __len__(self):
        return self.starts.shape[0]

    def __add__(self, other: "SegmentList") -> "SegmentList":
        return SegmentList(
            np.vstack([self.starts, other.starts]),
            np.vstack([self.ends, other.ends]),
            np.concatenate([self.currents, other.currents]),
            self.group_ids + other.group_ids,
            closed_groups=self.closed_groups | other.closed_groups,
        )

    # -- group access

    def groups(self):
        seen = {}
        for g in self.group_ids:
            seen.setdefault(g, None)
        return list(seen)

    def group_mask(self, group_id) -> np.ndarray:
        return np.array([g == group_id for g in self.group_ids], dtype=bool)

    def group(self, group_id) -> "SegmentList":
        m = self.group_mask(group_id)
        if not m.any():
            raise InvalidInput(f"no such group: {group_id!r}")
        return SegmentList(self.starts[m], self.ends[m], self.currents[m],
                           [group_id] * int(m.sum()),
                           closed_groups=self.closed_groups & {group_id})

    def segment(self, i: int) -> Segment:
        return Segment(self.starts[i], self.ends[i], float(self.currents[i]))

    @property
    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self.ends - self.starts, axis=1)

    # -- geometric transforms (handy for symmetry tests and scaling)

    def translated(self, offset) -> "SegmentList":
        off = np.asarray(offset, dtype=float)
        return SegmentList(self.starts + off, self.ends + off, self.currents,
                           list(self.group_ids), self.closed_groups)

    def transformed(self, matrix) -> "SegmentList":
        m = np.asarray(matrix, dtype=float)
        return SegmentList(self.starts @ m.T, self.ends @ m.T, self.currents,
                           list(self.group_ids), self.closed_groups)

    def scaled(self, k: float) -> "SegmentList":
        if k <= 0:
            raise InvalidInput("scale factor must be positive")
        return SegmentList(self.starts * k, self.ends * k, self.currents,
                           list(self.group_ids), self.closed_groups)

    def with_currents_scaled(self, k: float) -> "SegmentList":
        return SegmentList(self.starts, self.ends, self.currents * k,
                           list(self.group_ids), self.closed_groups)

    def max_chain_gap(self, group_id) -> float:
        """Largest endpoint gap along the stored segment order of a group."""
        m = self.group_mask(group_id)
        s, e = self.starts[m], self.ends[m]
        gaps = np.linalg.norm(s[1:] - e[:-1], axis=1)
        wrap = np.linalg.norm(s[0] - e[-1])
        return float(max(gaps.max(initial=0.0), wrap))

    def _check_chaining(self):
        for g in self.closed_groups:
            gap = self.max_chain_gap(g)
            if gap >= CHAIN_TOL:
                raise InvalidGeometry(f"closed group {g!r} has endpoint gap {gap:.3e} m")


def path_length(group: SegmentList) -> float:
    """Total conductor path length of a segment group."""
    return float(group.lengths.sum())


# ---------------------------------------------------------------------------
# materials


@dataclass(frozen=True)
class Material:
    name: str
    resistivity: float  # ohm * m

    def __post_init__(self):
        if self.resistivity <= 0:
            raise InvalidInput("resistivity must be positive")


COPPER = Material("copper", 1.68e-8)
# titanium / nickel print alloys: ~10x copper resistivity
TITANIUM_LIKE = Material("titanium-like", 1.68e-7)

MATERIALS = {m.name: m for m in (COPPER, TITANIUM_LIKE)}


# ---------------------------------------------------------------------------
# parametric specifications


@dataclass(frozen=True)
class Discretization:
    segments_per_turn: int = 360
    bundle_filaments: int = 7   # round bars: centre + hexagon
    arm_grid: int = 3           # n x n filament grid for rectangular sections

    def __post_init__(self):
        if self.segments_per_turn < 8:
            raise InvalidInput("segments_per_turn must be >= 8")
        if self.bundle_filaments < 1 or self.arm_grid < 1:
            raise InvalidInput("filament counts must be >= 1")


VARIANTS = ("AntiHelmholtz", "IoffePritchard", "TwistedCage", "CompactFour",
            "TwoPiece", "FreePath")

# parameter names and which of them are lengths (mm in JSON, m internally)
_VARIANT_PARAMS = {
    "AntiHelmholtz": {"radius": True, "separation": True, "current": False,
                      "wire_diameter": True},
    "IoffePritchard": {"bar_length": True, "bar_radius": True, "bar_current": False,
                       "coil_radius": True, "coil_separation": True,
                       "coil_current": False, "wire_diameter": True},
    "TwistedCage": {"height": True, "outer_width": True, "bar_diameter": True,
                    "twist_angle": False, "current": False},
    "CompactFour": {"height": True, "width": True, "hole_diameter": True,
                    "gap": True, "current_per_conductor": False},
    "TwoPiece": {"height": True, "outer_diameter": True, "arm_width": True,
                 "hole_diameter": True, "gap": True, "current_per_conductor": False,
                 "arm_depth": True},
    "FreePath": {"points": True, "current": False, "closed": False},
}

_VARIANT_DEFAULTS = {
    "AntiHelmholtz": {"radius": 0.050, "separation": 0.050, "current": 100.0,
                      "wire_diameter": 0.001},
    "IoffePritchard": {"bar_length": 0.110, "bar_radius": 0.0225, "bar_current": 100.0,
                       "coil_radius": 0.030, "coil_separation": 0.080,
                       "coil_current": 100.0, "wire_diameter": 0.001},
    # reference design: 110 mm tall, 55 mm outer width, 10 mm bars, 100 A
    "TwistedCage": {"height": 0.110, "outer_width": 0.055, "bar_diameter": 0.010,
                    "twist_angle": 0.5, "current": 100.0},
    # reference design: 45 mm tall, 24 mm wide, 15 mm holes, 0.5 mm gaps, 40 A
    "CompactFour": {"height": 0.045, "width": 0.024, "hole_diameter": 0.015,
                    "gap": 0.0005, "current_per_conductor": 40.0},
    # reference design: 38 mm tall, 26 mm outer diameter, 3.1 mm arms, 25 A
    "TwoPiece": {"height": 0.038, "outer_diameter": 0.026, "arm_width": 0.0031,
                 "hole_diameter": 0.015, "gap": 0.0005, "current_per_conductor": 25.0,
                 "arm_depth": 0.0016},
    "FreePath": {"points": (), "current": 1.0, "closed": False},
}


@dataclass(frozen=True)
class GeometrySpec:
    """Parametric description of one trap family (SI units internally)."""

    variant: str
    parameters: dict = field(default_factory=dict)
    discretization: Discretization = field(default_factory=Discretization)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidInput(f"unknown variant {self.variant!r}")
        known = _VARIANT_PARAMS[self.variant]
        merged = dict(_VARIANT_DEFAULTS[self.variant])
        for key, value in self.parameters.items():
            if key not in known:
                raise InvalidInput(f"unknown parameter {key!r} for {self.variant}")
            merged[key] = value
        for key, is_length in known.items():
            if is_length and key != "points":
                if not (isinstance(merged[key], (int, float)) and merged[key] > 0):
                    raise InvalidInput(f"parameter {key!r} must be a positive length")
        object.__setattr__(self, "parameters", merged)

    def replace_parameters(self, **updates) -> "GeometrySpec":
        params = dict(self.parameters)
        params.update(updates)
        return replace(self, parameters=params)

    def scaled(self, k: float) -> "GeometrySpec":
        """Scale every length parameter by k (currents untouched)."""
        if k <= 0:
            raise InvalidInput("scale factor must be positive")
        params = {}
        for key, value in self.parameters.items():
            if key == "points":
                params[key] = tuple(tuple(k * c for c in p) for p in value)
            elif _VARIANT_PARAMS[self.variant][key]:
                params[key] = value * k
            else:
                params[key] = value
        return replace(self, parameters=params)

    # -- JSON round trip.  Lengths are millimetres on the wire (matching the
    # conventional units of trap drawings); currents in amperes.

    def to_json_dict(self) -> dict:
        params = {}
        for key, value in self.parameters.items():
            if key == "points":
                params[key] = [[c * 1e3 for c in p] for p in value]
            elif _VARIANT_PARAMS[self.variant][key]:
                params[key] = value * 1e3
            else:
                params[key] = value
        return {
            "variant": self.variant,
            "parameters": params,
            "discretization": {
                "segments_per_turn": self.discretization.segments_per_turn,
                "bundle_filaments": self.discretization.bundle_filaments,
                "arm_grid": self.discretization.arm_grid,
            },
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "GeometrySpec":
        if not isinstance(doc, dict):
            raise InvalidInput("geometry document must be a JSON object")
        allowed = {"variant", "parameters", "discretization"}
        unknown = set(doc) - allowed
        if unknown:
            raise InvalidInput(f"unknown geometry keys: {sorted(unknown)}")
        variant = doc.get("variant")
        if variant not in VARIANTS:
            raise InvalidInput(f"unknown variant {variant!r}")
        raw = doc.get("parameters", {})
        if not isinstance(raw, dict):
            raise InvalidInput("parameters must be an object")
        known = _VARIANT_PARAMS[variant]
        params = {}
        for key, value in raw.items():
            if key not in known:
                raise InvalidInput(f"unknown parameter {key!r} for {variant}")
            if key == "points":
                params[key] = tuple(tuple(c * 1e-3 for c in p) for p in value)
            elif known[key]:
                params[key] = float(value) * 1e-3
            else:
                params[key] = value if key == "closed" else float(value)
        disc_doc = doc.get("discretization", {})
        unknown = set(disc_doc) - {"segments_per_turn", "bundle_filaments", "arm_grid"}
        if unknown:
            raise InvalidInput(f"unknown discretization keys: {sorted(unknown)}")
        disc = Discretization(**{k: int(v) for k, v in disc_doc.items()})
        return cls(variant=variant, parameters=params, discretization=disc)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GeometrySpec":
        return cls.from_json_dict(json.loads(text))


# ---------------------------------------------------------------------------
# elementary builders


def _frame(normal):
    n = np.asarray(normal, dtype=float)
    norm = np.linalg.norm(n)
    if not np.all(np.isfinite(n)) or norm < 1e-12:
        raise InvalidGeometry("degenerate loop normal")
    n = n / norm
    ref = np.array([1.0, 0.0, 0.0])
    if abs(n @ ref) > 0.9:
        ref = np.array([0.0, 1.0, 0.0])
    u = np.cross(ref, n)
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    return u, v, n


def make_loop(center, radius, normal, current, n_segments, group_id="loop") -> SegmentList:
    """Regular n-gon inscribed in a circle; current sign follows the
    right-hand rule about `normal`."""
    if radius <= 0:
        raise InvalidGeometry("loop radius must be positive")
    if n_segments < 3:
        raise InvalidGeometry("need at least 3 segments for a loop")
    u, v, _ = _frame(normal)
    center = np.asarray(center, dtype=float)
    theta = 2.0 * np.pi * np.arange(n_segments) / n_segments
    pts = center + radius * (np.outer(np.cos(theta), u) + np.outer(np.sin(theta), v))
    return SegmentList.from_polyline(pts, current, group_id=group_id, closed=True)


def make_anti_helmholtz(radius, separation, current, n_segments=360) -> SegmentList:
    """Coaxial loop pair at z = +-separation/2 with opposite currents."""
    if radius <= 0 or separation <= 0:
        raise InvalidGeometry("radius and separation must be positive")
    z = separation / 2.0
    top = make_loop((0, 0, +z), radius, (0, 0, 1), +current, n_segments, "coil_top")
    bottom = make_loop((0, 0, -z), radius, (0, 0, 1), -current, n_segments, "coil_bottom")
    return top + bottom


def make_free_path(points, current, closed=False, group_id="path") -> SegmentList:
    return SegmentList.from_polyline(points, current, group_id=group_id, closed=closed)


# ---------------------------------------------------------------------------
# bundle helpers


def _hex_offsets(radius_xsec, n_filaments):
    """Filament offsets (2D) over a circular cross-section: centre + rings."""
    if n_filaments <= 1:
        return np.zeros((1, 2))
    offs = [(0.0, 0.0)]
    ring = n_filaments - 1
    r = radius_xsec * 2.0 / 3.0
    for i in range(ring):
        a = 2.0 * np.pi * i / ring
        offs.append((r * np.cos(a), r * np.sin(a)))
    return np.asarray(offs)


def _grid_offsets(half_u, half_v, n):
    """n x n filament offsets over a rectangular cross-section."""
    if n <= 1:
        return np.zeros((1, 2))
    u = np.linspace(-half_u, half_u, n)
    v = np.linspace(-half_v, half_v, n)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    return np.column_stack([uu.ravel(), vv.ravel()])


def _cyl(r, phi, z):
    return np.array([r * np.cos(phi), r * np.sin(phi), z])


def _arc_points(radius, z, phi0, phi1, n):
    phi = np.linspace(phi0, phi1, n + 1)
    return np.column_stack([radius * np.cos(phi), radius * np.sin(phi),
                            np.full(n + 1, z)])


def _offset_point(radius, phi, z, d_tangential=0.0):
    e_r = np.array([math.cos(phi), math.sin(phi), 0.0])
    e_t = np.array([-math.sin(phi), math.cos(phi), 0.0])
    return radius * e_r + d_tangential * e_t + np.array([0.0, 0.0, z])


def _connector_points(p0, p1, segments_per_turn):
    """Bridge p0 -> p1 with a polyline interpolated in cylindrical coords."""
    r0 = math.hypot(p0[0], p0[1])
    r1 = math.hypot(p1[0], p1[1])
    phi0 = math.atan2(p0[1], p0[0])
    phi1 = math.atan2(p1[1], p1[0])
    dphi = (phi1 - phi0 + math.pi) % (2.0 * math.pi) - math.pi
    n = max(2, int(math.ceil(abs(dphi) / (2.0 * math.pi) * segments_per_turn)))
    t = np.linspace(0.0, 1.0, n + 1)
    r = r0 + (r1 - r0) * t
    phi = phi0 + dphi * t
    z = p0[2] + (p1[2] - p0[2]) * t
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    pts[0], pts[-1] = p0, p1
    return pts


def _closed_circuit(blocks, current, segments_per_turn):
    """Chain (points, group_id) blocks into one closed filament loop.

    Gaps between consecutive blocks (and from the last block back to the
    first) are bridged by connector polylines, so every filament carries its
    current around a closed path and the summed field stays curl-free away
    from the conductors.
    """
    starts, ends, gids = [], [], []

    def add(pts, g):
        pts = np.asarray(pts, dtype=float)
        for a, b in zip(pts[:-1], pts[1:]):
            if np.linalg.norm(b - a) > 1e-12:
                starts.append(a)
                ends.append(b)
                gids.append(g)

    m = len(blocks)
    for i, (pts, g) in enumerate(blocks):
        pts = np.asarray(pts, dtype=float)
        add(pts, g)
        nxt = np.asarray(blocks[(i + 1) % m][0], dtype=float)[0]
        if np.linalg.norm(nxt - pts[-1]) > 1e-12:
            add(_connector_points(pts[-1], nxt, segments_per_turn), g)
    return SegmentList(starts, ends, np.full(len(starts), float(current)), gids)


def _inversion_image(segments: SegmentList, group_map) -> SegmentList:
    """Point-inversion image with reversed currents (field is odd under it)."""
    return SegmentList(-segments.starts, -segments.ends, -segments.currents,
                       [group_map.get(g, g) for g in segments.group_ids])


# ---------------------------------------------------------------------------
# trap assemblies


# The cylinder-style builders below assemble their conductors about a local
# z symmetry axis and then rotate into the lab frame, where the symmetry axis
# lies along y and the strong-gradient axis along z.  The rotation is the
# cyclic permutation x->z, y->x, z->y (a proper rotation), so the beam holes
# remain aligned with the lab x, y and z axes.
_CYL_TO_LAB = np.array([[0.0, 1.0, 0.0],
                        [0.0, 0.0, 1.0],
                        [1.0, 0.0, 0.0]])


def make_twisted_cage(height, outer_width, bar_diameter, twist_angle, current,
                      discretization=Discretization()) -> SegmentList:
    """Four-bar cage with bars twisting about the z-axis.

    Bar centrelines follow r(t) = (R cos(theta0 + phi(z)), R sin(...), z) with
    theta0 in {0, 90, 180, 270} deg; the finished cage is rotated 45 deg about
    z so the horizontal beam axes pass midway between the bars.  The twist
    profile is an even profile phi(z) = s * twist_angle * (2z/h)^2 whose
    handedness s follows the bar's current sign.  That makes the net azimuthal
    current odd in z (zero at the mid-plane, circulating oppositely above and
    below), which produces an axial gradient while keeping the field zero at
    the centre: a common (same-handed) twist would cancel the azimuthal
    currents pairwise and give no axial gradient at all.  Opposite-handed
    bars converge towards the ends, so twist_angle is capped by the bar
    collision check below (about 0.56 rad at the default dimensions).
    Adjacent bar pairs close into series circuits through end arcs standing
    in for the physical end contacts, keeping every filament loop closed.
    """
    if min(height, outer_width, bar_diameter) <= 0:
        raise InvalidGeometry("cage dimensions must be positive")
    r_bar = bar_diameter / 2.0
    r0 = outer_width / 2.0 - r_bar
    if r0 <= 0:
        raise InvalidGeometry("bar diameter exceeds cage width")
    n_pts = max(33, discretization.segments_per_turn // 4 + 1)
    t = np.linspace(-0.5, 0.5, n_pts)
    z = t * height
    centrelines = []
    filaments = []   # filaments[k][j] = point array of filament j of bar k
    for k in range(4):
        sign = 1.0 if k % 2 == 0 else -1.0
        phi = k * np.pi / 2.0 + sign * twist_angle * (2.0 * z / height) ** 2
        centre = np.column_stack([r0 * np.cos(phi), r0 * np.sin(phi), z])
        centrelines.append(centre)
        # local transverse frame along the bar
        tang = np.gradient(centre, axis=0)
        tang /= np.linalg.norm(tang, axis=1)[:, None]
        e_r = np.column_stack([np.cos(phi), np.sin(phi), np.zeros_like(phi)])
        e1 = e_r - (np.sum(e_r * tang, axis=1))[:, None] * tang
        e1 /= np.linalg.norm(e1, axis=1)[:, None]
        e2 = np.cross(tang, e1)
        filaments.append([centre + du * e1 + dv * e2
                          for du, dv in _hex_offsets(r_bar, discretization.bundle_filaments)])
    # bar paths must not touch
    for i in range(4):
        for j in range(i + 1, 4):
            d = np.linalg.norm(centrelines[i][:, None, :] - centrelines[j][None, :, :], axis=2)
            if d.min() <= bar_diameter:
                raise InvalidGeometry(f"bars {i} and {j} intersect")
    # each up-bar pairs with the next down-bar into one closed circuit, the
    # joining end arcs standing in for the physical end-ring contacts
    share = current / discretization.bundle_filaments
    spt = discretization.segments_per_turn
    out = None
    for k_up in (0, 2):
        k_dn = k_up + 1
        for j in range(discretization.bundle_filaments):
            circuit = _closed_circuit(
                [(filaments[k_up][j], f"bar{k_up}"),
                 (filaments[k_dn][j][::-1], f"bar{k_dn}")], share, spt)
            out = circuit if out is None else out + circuit
    c = math.cos(math.pi / 4.0)
    rot45 = np.array([[c, -c, 0.0], [c, c, 0.0], [0.0, 0.0, 1.0]])
    return out.transformed(rot45)


def make_compact_four(height, width, hole_diameter, gap, current_per_conductor,
                      discretization=Discretization()) -> SegmentList:
    """Four-piece trap: one straight prong plus one ring arc per piece.

    Prongs sit on the diagonals between the beam holes and span just the
    inter-hole region; the current then fans into the ring material, modelled
    as an arc sheet just above the beam holes that hugs the outer wall.  The
    filaments of each series loop are chained into closed circuits through
    short connectors, so the summed field is curl-free off the conductors.
    The top arcs
    share one circulation sense and the bottom arcs the opposite, giving the
    axial gradient, while the alternating prong currents shape the transverse
    field.  The assembly is odd under point inversion with current reversal,
    so the field vanishes at the centre exactly.
    """
    if hole_diameter + 2.0 * gap >= width:
        raise ClearanceError("hole plus gaps exceeds conductor width")
    r_out = width / 2.0
    r_hole = hole_diameter / 2.0
    margin = 0.2e-3
    grid_n = discretization.arm_grid
    i_cond = current_per_conductor

    # prong band: wedged between the two horizontal beam cylinders
    half_t = 0.3e-3
    r_hi = r_out - 0.3e-3
    # inner radius so the innermost tangential corner clears the beams
    delta = half_t / r_hi
    r_lo_min = (r_hole + margin) / math.sin(math.pi / 4.0 - delta)
    if r_lo_min >= r_hi:
        raise ClearanceError("no room for prongs between beams and outer wall")
    r_lo = max(r_lo_min, r_hi - 0.4e-3)   # current hugs the outer prong face
    r_prong = 0.5 * (r_lo + r_hi)
    half_r = 0.5 * (r_hi - r_lo)

    # arc band: the ring material above/below the horizontal holes; the
    # effective current sheet sits just above the holes and hugs the outer
    # wall, which reproduces the measured gradient pattern of the solid part
    z_lo = r_hole + margin
    z_hi = height / 2.0 - margin
    if z_lo >= z_hi:
        raise ClearanceError("trap too short for ring sections above the beam holes")
    r_arc_out = r_out - margin
    arc_r = (r_arc_out - 0.35 * (r_arc_out - (r_hole + margin)), r_arc_out)
    z_top = z_lo + 0.1 * (z_hi - z_lo)
    n_arc = max(16, int(round(discretization.segments_per_turn / 4.0)))
    gamma = (gap / 2.0 + half_t) / r_prong  # angular stand-off at the contacts

    offs_arc = _grid_offsets(0.5 * (arc_r[1] - arc_r[0]),
                             0.5 * (z_top - z_lo), grid_n)
    offs_prong = _grid_offsets(half_r, half_t, grid_n)
    nf = offs_arc.shape[0]
    r_arc_mid = 0.5 * (arc_r[0] + arc_r[1])
    z_arc_mid = 0.5 * (z_lo + z_top)
    spt = discretization.segments_per_turn

    # the pieces chain into two closed series loops: top arc of an up piece,
    # down its prong, around the preceding piece's bottom arc and back up
    # that piece's prong
    out = None
    for k_up in (0, 2):
        k_dn = (k_up + 3) % 4
        phi_u = math.pi / 4.0 + k_up * math.pi / 2.0
        phi_d = phi_u - math.pi / 2.0
        g_up, g_dn = f"conductor{k_up}", f"conductor{k_dn}"
        for j in range(nf):
            dr_a, dz_a = offs_arc[j]
            dr_p, dt_p = offs_prong[j]
            top_arc = _arc_points(r_arc_mid + dr_a, z_arc_mid + dz_a,
                                  phi_u - math.pi / 2.0 + gamma, phi_u - gamma,
                                  n_arc)
            prong_u = [_offset_point(r_prong + dr_p, phi_u, z_lo, dt_p),
                       _offset_point(r_prong + dr_p, phi_u, -z_lo, dt_p)]
            bot_arc = _arc_points(r_arc_mid + dr_a, -(z_arc_mid + dz_a),
                                  phi_d + math.pi / 2.0 - gamma, phi_d + gamma,
                                  n_arc)
            prong_d = [_offset_point(r_prong + dr_p, phi_d, -z_lo, dt_p),
                       _offset_point(r_prong + dr_p, phi_d, z_lo, dt_p)]
            circuit = _closed_circuit(
                [(top_arc, g_up), (prong_u, g_up),
                 (bot_arc, g_dn), (prong_d, g_dn)], i_cond / nf, spt)
            out = circuit if out is None else out + circuit
    return out.transformed(_CYL_TO_LAB)


def make_two_piece(height, outer_diameter, arm_width, hole_diameter, gap,
                   current_per_conductor, arm_depth=0.0016,
                   discretization=Discretization()) -> SegmentList:
    """Two nesting conductors: two straight arms joined by a ~270 deg ring arc.

    Piece A: current enters the top of one arm, runs down to the bottom ring,
    three quarters of the way around, and back up the adjacent arm; the
    circuit closes through vertical feed leads that rejoin well above the
    trap, so every filament forms a closed loop.  Piece B is the
    point-inversion image with the current sense reversed (its ring sits at
    the top).  The pair is odd under inversion + current reversal, so B = 0
    at the centre exactly; the opposed ring circulations give the axial
    gradient.
    """
    if hole_diameter + 2.0 * gap >= outer_diameter:
        raise ClearanceError("hole plus gaps exceeds conductor diameter")
    r_out = outer_diameter / 2.0
    r_hole = hole_diameter / 2.0
    margin = 0.2e-3
    grid_n = discretization.arm_grid
    i_cond = current_per_conductor

    half_t = arm_width / 2.0 * 0.4      # filament spread, not the solid width
    half_r = arm_depth / 2.0 * 0.6
    r_arm = r_out - margin - arm_depth / 2.0
    delta = (half_t) / (r_arm - half_r)
    if (r_arm - half_r) * math.sin(math.pi / 4.0 - delta) < r_hole:
        raise ClearanceError("arms intrude into the beam volume")

    z_lo = r_hole + margin
    z_hi = height / 2.0 - margin
    if z_lo >= z_hi:
        raise ClearanceError("trap too short for ring sections above the beam holes")
    ring_r = (r_hole + margin, r_out - margin)
    z_ring = 0.5 * (z_lo + z_hi)
    n_arc = max(32, int(round(discretization.segments_per_turn * 0.75)))
    r_ring_mid = 0.5 * (ring_r[0] + ring_r[1])
    gamma = (gap / 2.0 + half_t) / r_ring_mid
    z_far = 0.25   # feed leads rejoin well above the trap

    p45, p135 = math.pi / 4.0, 3 * math.pi / 4.0
    offs_arm = _grid_offsets(half_r, half_t, grid_n)
    offs_ring = _grid_offsets(0.5 * (ring_r[1] - ring_r[0]),
                              0.5 * (z_hi - z_lo), grid_n)
    nf = offs_arm.shape[0]
    spt = discretization.segments_per_turn

    # piece A: down the 45 deg arm, 270 deg clockwise around the bottom ring
    # (via 315/225 deg), up the 135 deg arm; the circuit closes through
    # vertical feed leads joined far above the trap
    a = None
    for j in range(nf):
        dr, dt = offs_arm[j]
        drr, dzr = offs_ring[j]
        arm1 = [_offset_point(r_arm + dr, p45, height / 2.0, dt),
                _offset_point(r_arm + dr, p45, -z_ring, dt)]
        ring = _arc_points(r_ring_mid + drr, -z_ring - dzr, p45 - gamma,
                           p135 - 2.0 * math.pi + gamma, n_arc)
        arm2 = [_offset_point(r_arm + dr, p135, -z_ring, dt),
                _offset_point(r_arm + dr, p135, height / 2.0, dt)]
        leads = [np.array([arm2[1][0], arm2[1][1], z_far]),
                 np.array([arm1[0][0], arm1[0][1], z_far])]
        circuit = _closed_circuit(
            [(arm1, "piece_a"), (ring, "piece_a"),
             (arm2, "piece_a"), (leads, "piece_a")], i_cond / nf, spt)
        a = circuit if a is None else a + circuit

    # piece B: point-inversion image with the current sense reversed (its
    # ring sits at the top); the pair is odd under inversion + reversal
    b = _inversion_image(a, {"piece_a": "piece_b"})
    return (a + b).transformed(_CYL_TO_LAB)


def make_ioffe_pritchard(bar_length, bar_radius, bar_current, coil_radius,
                         coil_separation, coil_current,
                         discretization=Discretization()) -> SegmentList:
    """Classic Ioffe-Pritchard trap: four alternating bars plus a coil pair
    carrying parallel currents."""
    if min(bar_length, bar_radius, coil_radius, coil_separation) <= 0:
        raise InvalidGeometry("dimensions must be positive")
    out = None
    spt = discretization.segments_per_turn
    for k_up in (0, 2):
        phi_u = math.pi / 4.0 + k_up * math.pi / 2.0
        phi_d = phi_u + math.pi / 2.0
        bar_u = [_offset_point(bar_radius, phi_u, -bar_length / 2.0),
                 _offset_point(bar_radius, phi_u, bar_length / 2.0)]
        bar_d = [_offset_point(bar_radius, phi_d, bar_length / 2.0),
                 _offset_point(bar_radius, phi_d, -bar_length / 2.0)]
        # adjacent bars with opposite currents close through end arcs,
        # standing in for the physical end contacts
        circuit = _closed_circuit([(bar_u, f"bar{k_up}"),
                                   (bar_d, f"bar{k_up + 1}")], bar_current, spt)
        out = circuit if out is None else out + circuit
    n = discretization.segments_per_turn
    out = out + make_loop((0, 0, +coil_separation / 2.0), coil_radius, (0, 0, 1),
                          coil_current, n, "coil_top")
    out = out + make_loop((0, 0, -coil_separation / 2.0), coil_radius, (0, 0, 1),
                          coil_current, n, "coil_bottom")
    return out


# ---------------------------------------------------------------------------
# dispatch


def build(spec: GeometrySpec) -> SegmentList:
    """Realise a GeometrySpec as a filament SegmentList."""
    p = spec.parameters
    d = spec.discretization
    if spec.variant == "AntiHelmholtz":
        return make_anti_helmholtz(p["radius"], p["separation"], p["current"],
                                   d.segments_per_turn)
    if spec.variant == "IoffePritchard":
        return make_ioffe_pritchard(p["bar_length"], p["bar_radius"], p["bar_current"],
                                    p["coil_radius"], p["coil_separation"],
                                    p["coil_current"], d)
    if spec.variant == "TwistedCage":
        return make_twisted_cage(p["height"], p["outer_width"], p["bar_diameter"],
                                 p["twist_angle"], p["current"], d)
    if spec.variant == "CompactFour":
        return make_compact_four(p["height"], p["width"], p["hole_diameter"],
                                 p["gap"], p["current_per_conductor"], d)
    if spec.variant == "TwoPiece":
        return make_two_piece(p["height"], p["outer_diameter"], p["arm_width"],
                              p["hole_diameter"], p["gap"],
                              p["current_per_conductor"], p["arm_depth"], d)
    if spec.variant == "FreePath":
        return make_free_path(p["points"], p["current"], bool(p["closed"]))
    raise InvalidInput(f"unknown variant {spec.variant!r}")


# ---------------------------------------------------------------------------
# laser clearance


_BEAM_AXES = (np.array([1.0, 0.0, 0.0]),
              np.array([0.0, 1.0, 0.0]),
              np.array([0.0, 0.0, 1.0]))


def _segment_line_distance(starts, ends, axis):
    """Distance from each segment to an infinite line through the origin."""
    d = axis / np.linalg.norm(axis)
    # sample each segment densely; exact segment/line distance adds little
    # over this for short segments
    ts = np.linspace(0.0, 1.0, 9)
    pts = starts[:, None, :] + ts[None, :, None] * (ends - starts)[:, None, :]
    perp = pts - (pts @ d)[..., None] * d
    return np.linalg.norm(perp, axis=2).min(axis=1)


def clearance_check(segments: SegmentList, beam_diameter: float,
                    beam_axes=_BEAM_AXES, center=(0.0, 0.0, 0.0)):
    """True iff no filament point lies inside any of the beam cylinders.

    Returns (ok, min_clearance): min_clearance is the smallest distance from
    any conductor point to any beam surface (negative when intruding).
    """
    if beam_diameter <= 0:
        raise InvalidInput("beam diameter must be positive")
    c = np.asarray(center, dtype=float)
    starts = segments.starts - c
    ends = segments.ends - c
    min_clear = math.inf
    for axis in beam_axes:
        dist = _segment_line_distance(starts, ends, np.asarray(axis, float))
        min_clear = min(min_clear, float(dist.min()) - beam_diameter / 2.0)
    return (min_clear >= 0.0), min_clear


# ---------------------------------------------------------------------------
# solid cross-sections for the power budget


@dataclass(frozen=True)
class ConductorSection:
    group_id: str
    label: str
    length: float        # m
    area: float          # m^2 (declared solid cross-section)
    current: float       # A carried by the physical conductor


def conductor_sections(spec: GeometrySpec):
    """Per-conductor path sections (length, solid cross-section, current).

    Resistance models the printed solid, so areas come from the declared
    dimensions rather than filament counts.
    """
    p = spec.parameters
    if spec.variant == "AntiHelmholtz":
        area = math.pi * (p["wire_diameter"] / 2.0) ** 2
        length = 2.0 * math.pi * p["radius"]
        return [ConductorSection("coil_top", "winding", length, area, p["current"]),
                ConductorSection("coil_bottom", "winding", length, area, p["current"])]
    if spec.variant == "IoffePritchard":
        area = math.pi * (p["wire_diameter"] / 2.0) ** 2
        out = [ConductorSection(f"bar{k}", "bar", p["bar_length"], area,
                                p["bar_current"]) for k in range(4)]
        out += [ConductorSection(g, "winding", 2.0 * math.pi * p["coil_radius"],
                                 area, p["coil_current"])
                for g in ("coil_top", "coil_bottom")]
        return out
    if spec.variant == "TwistedCage":
        area = math.pi * (p["bar_diameter"] / 2.0) ** 2
        # arc length of the twisted centreline
        segs = build(replace(spec, discretization=Discretization(64, 1, 1)))
        out = []
        for k in range(4):
            length = path_length(segs.group(f"bar{k}"))
            out.append(ConductorSection(f"bar{k}", "bar", length, area, p["current"]))
        return out
    if spec.variant == "CompactFour":
        r_out = p["width"] / 2.0
        r_hole = p["hole_diameter"] / 2.0
        prong_len = p["hole_diameter"] + (p["height"] / 2.0 - r_hole)  # to arc mid
        prong_area = 2.0e-6  # slim wedge between the beam holes
        arc_len = (math.pi / 2.0) * 0.5 * (r_out + r_hole)
        arc_area = (r_out - r_hole) * (p["height"] / 2.0 - r_hole)
        out = []
        for k in range(4):
            g = f"conductor{k}"
            out.append(ConductorSection(g, "prong", prong_len, prong_area,
                                        p["current_per_conductor"]))
            out.append(ConductorSection(g, "arc", arc_len, arc_area,
                                        p["current_per_conductor"]))
        return out
    if spec.variant == "TwoPiece":
        r_out = p["outer_diameter"] / 2.0
        r_hole = p["hole_diameter"] / 2.0
        z_ring = 0.5 * (r_hole + p["height"] / 2.0)
        arm_len = p["height"] / 2.0 + z_ring
        arm_area = p["arm_width"] * p["arm_depth"]
        ring_len = 1.5 * math.pi * 0.5 * (r_out + r_hole)  # 270 deg sweep
        ring_area = (r_out - r_hole) * (p["height"] / 2.0 - r_hole)
        out = []
        for g in ("piece_a", "piece_b"):
            out.append(ConductorSection(g, "arm", arm_len, arm_area,
                                        p["current_per_conductor"]))
            out.append(ConductorSection(g, "arm", arm_len, arm_area,
                                        p["current_per_conductor"]))
            out.append(ConductorSection(g, "ring", ring_len, ring_area,
                                        p["current_per_conductor"]))
        return out
    if spec.variant == "FreePath":
        segs = build(spec)
        area = math.pi * (0.5e-3) ** 2  # nominal 1 mm wire
        return [ConductorSection("path", "wire", path_length(segs), area,
                                 p["current"])]
    raise InvalidInput(f"unknown variant {spec.variant!r}")
