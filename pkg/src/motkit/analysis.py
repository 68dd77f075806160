"""Field-zero location, gradient fits, and MOT suitability checks.

Accepts either a SegmentList or any callable p -> B (tesla); the callable
form is what the synthetic-field tests use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DegenerateFit, InvalidInput, SingularPoint, ZeroNotBracketed
from .field import field_at
from .geometry import SegmentList

GAUSS_PER_TESLA = 1.0e4
GCM_PER_TPM = 100.0           # 1 T/m = 100 G/cm

DEFAULT_WINDOW = 2.0e-3       # m
DEFAULT_SAMPLES = 41
DEFAULT_STENCIL = 1.0e-4      # m


def as_field(source):
    """Normalise a SegmentList or callable into a p -> B function."""
    if isinstance(source, SegmentList):
        return lambda p: field_at(source, np.asarray(p, dtype=float))
    if callable(source):
        return lambda p: np.asarray(source(np.asarray(p, dtype=float)), dtype=float)
    raise InvalidInput("expected a SegmentList or a field callable")


@dataclass(frozen=True)
class GradientReport:
    zero_position: np.ndarray          # m
    g: np.ndarray                      # (gx, gy, gz) in G/cm
    sigma_g: np.ndarray                # per-axis slope uncertainty, G/cm
    ratio: np.ndarray                  # g / gx
    linear_window: float               # m
    residual_rms: float                # G

    def to_json_dict(self) -> dict:
        return {
            "zero_mm": [v * 1e3 for v in self.zero_position.tolist()],
            "g_Gcm": self.g.tolist(),
            "sigma_Gcm": self.sigma_g.tolist(),
            "ratio": self.ratio.tolist(),
            "window_mm": self.linear_window * 1e3,
            "residual_G": self.residual_rms,
        }


def find_field_zero(source, search_center=(0.0, 0.0, 0.0), search_radius=5.0e-3,
                    grid_n: int = 11) -> np.ndarray:
    """|B| minimum: coarse grid scan, then Newton steps on B = 0.

    Near a quadrupole zero B is linear, so Newton on the vector field is the
    quadratic-convergence refinement of the |B|^2 descent.
    """
    if search_radius <= 0:
        raise InvalidInput("search radius must be positive")
    f = as_field(source)
    c = np.asarray(search_center, dtype=float)
    axis = np.linspace(-search_radius, search_radius, grid_n)
    best_p, best_m = None, math.inf
    boundary_best = False
    for i, x in enumerate(axis):
        for j, y in enumerate(axis):
            for k, z in enumerate(axis):
                p = c + np.array([x, y, z])
                try:
                    m = float(np.linalg.norm(f(p)))
                except SingularPoint:
                    continue
                # ties resolved towards the lexicographically smallest point
                if best_p is None or m < best_m * (1.0 - 1e-12):
                    best_m, best_p = m, p
                    boundary_best = i in (0, grid_n - 1) or j in (0, grid_n - 1) \
                        or k in (0, grid_n - 1)
    if best_p is None:
        raise ZeroNotBracketed("no non-singular point in the search region")
    if boundary_best:
        raise ZeroNotBracketed("|B| minimum lies on the search-region boundary")

    p = best_p.copy()
    h = max(search_radius / 200.0, 1e-6)
    for _ in range(60):
        b = f(p)
        if np.linalg.norm(b) == 0.0:
            break
        J = jacobian_at(f, p, h)
        try:
            step = np.linalg.solve(J, b)
        except np.linalg.LinAlgError:
            break
        norm = np.linalg.norm(step)
        cap = search_radius / 4.0
        if norm > cap:
            step *= cap / norm
        p = p - step
        if np.linalg.norm(p - c) > search_radius * math.sqrt(3.0):
            raise ZeroNotBracketed("zero refinement left the search region")
        if norm < 1e-13:
            break
    if float(np.linalg.norm(f(p))) <= best_m:
        return p
    return best_p


def jacobian_at(source, p, h: float = DEFAULT_STENCIL) -> np.ndarray:
    """Central-difference Jacobian dB_i/dx_j (T/m); column j is d/dx_j."""
    if h <= 0:
        raise InvalidInput("stencil step must be positive")
    f = as_field(source)
    p = np.asarray(p, dtype=float)
    J = np.empty((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        J[:, j] = (f(p + e) - f(p - e)) / (2.0 * h)
    return J


def _fit_line(x, y):
    """Least-squares slope with its standard error and residuals."""
    n = x.size
    if n < 3 or np.ptp(x) == 0.0:
        raise DegenerateFit("not enough distinct abscissae for a slope fit")
    xm = x - x.mean()
    sxx = float(xm @ xm)
    if sxx == 0.0:
        raise DegenerateFit("degenerate abscissae")
    slope = float(xm @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    var = float(resid @ resid) / (n - 2)
    sigma = math.sqrt(max(var, 0.0) / sxx)
    return slope, sigma, resid


def fit_gradients(source, zero, window: float = DEFAULT_WINDOW,
                  n: int = DEFAULT_SAMPLES) -> GradientReport:
    """Per-axis linear fit of the signed on-axis component over +-window.

    The signed component (B_x along x, ...) is fitted rather than |B|, which
    is non-differentiable at the zero; slope magnitudes agree on each
    half-axis.
    """
    if window <= 0:
        raise InvalidInput("fit window must be positive")
    if n < 5:
        raise InvalidInput("need at least 5 samples per axis")
    f = as_field(source)
    zero = np.asarray(zero, dtype=float)
    s = np.linspace(-window, window, n)
    g = np.empty(3)
    sigma = np.empty(3)
    residuals = []
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = 1.0
        comp = np.array([f(zero + si * e)[axis] for si in s])
        slope, err, resid = _fit_line(s, comp)
        g[axis] = slope * GCM_PER_TPM
        sigma[axis] = err * GCM_PER_TPM
        residuals.append(resid)
    if g[0] == 0.0:
        raise DegenerateFit("x-gradient is zero; ratio undefined")
    resid_all = np.concatenate(residuals)
    return GradientReport(
        zero_position=zero,
        g=g,
        sigma_g=sigma,
        ratio=g / g[0],
        linear_window=window,
        residual_rms=float(np.sqrt(np.mean(resid_all ** 2))) * GAUSS_PER_TESLA,
    )


@dataclass(frozen=True)
class SuitabilityTargets:
    gradient_low: float = 5.0        # G/cm
    gradient_high: float = 25.0      # G/cm
    ratio_tolerance: float = 0.25    # relative, about (1, 1, -2)
    linearity_max: float = 0.1       # residual_rms / (|g| * window)
    target_ratio: tuple = (1.0, 1.0, -2.0)


@dataclass(frozen=True)
class SuitabilityVerdict:
    magnitude_ok: bool
    ratio_ok: bool
    linearity_ok: bool
    details: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.magnitude_ok and self.ratio_ok and self.linearity_ok

    def to_json_dict(self) -> dict:
        return {"magnitude_ok": self.magnitude_ok, "ratio_ok": self.ratio_ok,
                "linearity_ok": self.linearity_ok, "passed": self.passed,
                "details": self.details}


def mot_suitability(report: GradientReport,
                    targets: SuitabilityTargets = SuitabilityTargets()) -> SuitabilityVerdict:
    """Check gradient magnitude, ratio against 1:1:-2, and fit linearity."""
    gmin = float(np.min(np.abs(report.g)))
    magnitude_ok = targets.gradient_low <= gmin <= targets.gradient_high
    ratio_ok = True
    for r, t in zip(report.ratio, targets.target_ratio):
        if abs(r - t) > targets.ratio_tolerance * abs(t):
            ratio_ok = False
    window_cm = report.linear_window * 100.0
    linearity = report.residual_rms / max(gmin * window_cm, 1e-30)
    linearity_ok = linearity < targets.linearity_max
    return SuitabilityVerdict(
        magnitude_ok=magnitude_ok, ratio_ok=ratio_ok, linearity_ok=linearity_ok,
        details={"min_gradient_Gcm": gmin, "linearity": linearity,
                 "ratio": report.ratio.tolist()})
