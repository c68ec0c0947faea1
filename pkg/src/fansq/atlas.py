"""Parameter-space exploration: grids, boundaries, intersections, profiles.

Produces plottable survey data: squeeze-parameter scans over
(xi^2, eta^2), squeezing-region boundary tracing, the crossing points
of the isotropic term against the leading harmonic magnitude, polar
profiles of the moment, and the ridge of maximal squeezing.  Nodes
where the series fails are marked, never fatal to a whole scan.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._optimize import bisect_root, golden_min
from .errors import (
    DomainError,
    EmptyBoundary,
    SeriesNotConverged,
    SingularNonlinearity,
)
from .fanstate import (
    DEFAULT_CONTROL,
    FanConfig,
    Identity,
    NonlinearModel,
    SeriesControl,
    TrappedIon,
)
from .squeeze import SqueezeCoeffs, coefficients, squeeze_parameter, vacuum_benchmark

STATUS_OK = "OK"
STATUS_SINGULAR = "Singular"
STATUS_NOT_CONVERGED = "NotConverged"


@dataclass(frozen=True)
class AxisRange:
    """Inclusive numeric axis: count evenly spaced values from min to max."""

    min: float
    max: float
    count: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise DomainError("axis endpoints must be finite")
        if not self.min < self.max:
            raise DomainError(f"axis needs min < max, got [{self.min}, {self.max}]")
        if self.count < 2:
            raise DomainError(f"axis count must be >= 2, got {self.count}")

    def values(self) -> list[float]:
        step = (self.max - self.min) / (self.count - 1)
        return [self.min + i * step for i in range(self.count)]


@dataclass(frozen=True)
class GridSpec:
    """Two-axis grid plus the squeeze-evaluation parameters."""

    xi_sq: AxisRange
    eta_sq: AxisRange
    k: int
    N: int
    phi: float

    def __post_init__(self) -> None:
        if self.k < 1:
            raise DomainError(f"fan order must be >= 1, got {self.k}")
        if self.N < 2 or self.N % 2 != 0:
            raise DomainError(f"moment order must be even and >= 2, got {self.N}")
        if self.xi_sq.min < 0:
            raise DomainError("xi_sq axis must be nonnegative")


@dataclass
class PhaseDiagram:
    """Grid of squeeze-parameter values; rows index eta_sq, columns xi_sq."""

    grid: GridSpec
    values: np.ndarray
    status: list[list[str]]


def _model_for(kind: str, k: int, eta_sq: float) -> NonlinearModel:
    if kind == "identity":
        return Identity()
    if kind == "trapped-ion":
        return TrappedIon(eta_sq=eta_sq, quantum_order=2 * k)
    raise DomainError(f"unknown model kind {kind!r}")


def _node_value(
    kind: str, k: int, N: int, phi: float, xi_sq: float, eta_sq: float, ctl: SeriesControl
) -> tuple[float, str]:
    try:
        cfg = FanConfig.from_xi_sq(k, xi_sq, _model_for(kind, k, eta_sq))
        s = squeeze_parameter(coefficients(cfg, N, ctl), phi)
        return s, STATUS_OK
    except SingularNonlinearity:
        return math.nan, STATUS_SINGULAR
    except SeriesNotConverged:
        return math.nan, STATUS_NOT_CONVERGED


def scan(
    grid: GridSpec,
    model_kind: str = "trapped-ion",
    ctl: SeriesControl = DEFAULT_CONTROL,
    threads: Optional[int] = None,
) -> PhaseDiagram:
    """Evaluate the squeeze parameter at every grid node.

    Row order (eta_sq outer, xi_sq inner) is fixed and independent of
    the thread count, so outputs are reproducible byte for byte.
    """
    xi_vals = grid.xi_sq.values()
    eta_vals = grid.eta_sq.values()

    def one_row(eta_sq: float) -> tuple[list[float], list[str]]:
        row_vals: list[float] = []
        row_status: list[str] = []
        for xi_sq in xi_vals:
            s, st = _node_value(model_kind, grid.k, grid.N, grid.phi, xi_sq, eta_sq, ctl)
            row_vals.append(s)
            row_status.append(st)
        return row_vals, row_status

    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one_row, eta_vals))
    else:
        rows = [one_row(e) for e in eta_vals]

    values = np.array([r[0] for r in rows], dtype=float)
    status = [r[1] for r in rows]
    return PhaseDiagram(grid=grid, values=values, status=status)


def _refine_crossing(
    kind: str,
    grid: GridSpec,
    ctl: SeriesControl,
    fixed: float,
    lo: float,
    hi: float,
    s_lo: float,
    s_hi: float,
    vary: str,
) -> Optional[tuple[float, float, float]]:
    """Bisect one sign change of S along a grid line; None if it fails."""

    def s_of(x: float) -> float:
        if vary == "xi_sq":
            xi_sq, eta_sq = x, fixed
        else:
            xi_sq, eta_sq = fixed, x
        cfg = FanConfig.from_xi_sq(grid.k, xi_sq, _model_for(kind, grid.k, eta_sq))
        return squeeze_parameter(coefficients(cfg, grid.N, ctl), grid.phi)

    try:
        root = bisect_root(s_of, lo, hi, 1e-12, fa=s_lo, fb=s_hi)
        s_root = s_of(root)
    except (SingularNonlinearity, SeriesNotConverged):
        return None
    if vary == "xi_sq":
        return root, fixed, s_root
    return fixed, root, s_root


def trace_boundary(
    grid: GridSpec,
    model_kind: str = "trapped-ion",
    ctl: SeriesControl = DEFAULT_CONTROL,
    threads: Optional[int] = None,
) -> list[tuple[float, float]]:
    """Points where S = 0, refined along every grid row and column.

    Returns the crossing points ordered by angle around their centroid,
    approximating the closed boundary curve of the squeezing region.
    Raises EmptyBoundary when the scan shows no sign change at all.
    """
    diagram = scan(grid, model_kind, ctl, threads)
    xi_vals = grid.xi_sq.values()
    eta_vals = grid.eta_sq.values()
    vals = diagram.values
    status = diagram.status
    points: list[tuple[float, float]] = []

    for i, eta_sq in enumerate(eta_vals):
        for j in range(len(xi_vals) - 1):
            if status[i][j] != STATUS_OK or status[i][j + 1] != STATUS_OK:
                continue
            a, b = vals[i, j], vals[i, j + 1]
            if a == 0.0 or (a > 0) == (b > 0):
                continue
            hit = _refine_crossing(
                model_kind, grid, ctl, eta_sq, xi_vals[j], xi_vals[j + 1], a, b, "xi_sq"
            )
            if hit is not None:
                points.append((hit[0], hit[1]))
    for j, xi_sq in enumerate(xi_vals):
        for i in range(len(eta_vals) - 1):
            if status[i][j] != STATUS_OK or status[i + 1][j] != STATUS_OK:
                continue
            a, b = vals[i, j], vals[i + 1, j]
            if a == 0.0 or (a > 0) == (b > 0):
                continue
            hit = _refine_crossing(
                model_kind, grid, ctl, xi_sq, eta_vals[i], eta_vals[i + 1], a, b, "eta_sq"
            )
            if hit is not None:
                points.append((hit[0], hit[1]))

    if not points:
        raise EmptyBoundary("no sign change of the squeeze parameter on the grid")

    cx = sum(p[0] for p in points) / len(points)
    cy = sum(p[1] for p in points) / len(points)
    points.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
    return points


@dataclass(frozen=True)
class IntersectionSet:
    """Crossings of the isotropic term with the leading harmonic size.

    roots: eta_sq values where constant = |harmonics[0]|, ascending.
    signs: sign of the leading harmonic on each inter-root interval.
    kinds: "crossing" for a sign change of constant - |harmonic|,
           "tangent" for a harmonic sign flip where both terms vanish
           together (the state degenerates toward vacuum there).
    skipped: (eta_sq, status) for grid nodes that failed to evaluate.
    """

    xi_sq: float
    k: int
    N: int
    roots: tuple[float, ...]
    signs: tuple[int, ...]
    kinds: tuple[str, ...]
    skipped: tuple[tuple[float, str], ...]


def find_intersections(
    xi_sq: float,
    k: int,
    N: int,
    eta_range: AxisRange,
    ctl: SeriesControl = DEFAULT_CONTROL,
    xtol: float = 1e-9,
    tangent_tol: float = 1e-8,
    model_kind: str = "trapped-ion",
) -> IntersectionSet:
    """Locate where the isotropic term equals the leading harmonic.

    Transversal roots are sign changes of gap = constant - |harmonic|.
    A tangential root hides where the harmonic flips sign without the
    gap changing sign: there the nonlinearity has a pole, the state
    collapses toward vacuum, and both terms reach zero together.  Such
    a root is pinned by bisecting the harmonic itself and accepted only
    if the gap at that point is within tangent_tol of zero.
    """
    if N < 4 * k:
        raise DomainError(f"need N >= 4k for a harmonic term, got N={N}, k={k}")

    def coeffs_at(eta_sq: float) -> SqueezeCoeffs:
        cfg = FanConfig.from_xi_sq(k, xi_sq, _model_for(model_kind, k, eta_sq))
        return coefficients(cfg, N, ctl)

    def gap_at(eta_sq: float) -> float:
        c = coeffs_at(eta_sq)
        return c.constant - abs(c.harmonics[0])

    def harmonic_at(eta_sq: float) -> float:
        return coeffs_at(eta_sq).harmonics[0]

    nodes = eta_range.values()
    gaps: list[Optional[float]] = []
    harms: list[Optional[float]] = []
    skipped: list[tuple[float, str]] = []
    for e in nodes:
        try:
            c = coeffs_at(e)
            gaps.append(c.constant - abs(c.harmonics[0]))
            harms.append(c.harmonics[0])
        except SingularNonlinearity:
            gaps.append(None)
            harms.append(None)
            skipped.append((e, STATUS_SINGULAR))
        except SeriesNotConverged:
            gaps.append(None)
            harms.append(None)
            skipped.append((e, STATUS_NOT_CONVERGED))

    found: list[tuple[float, str]] = []
    for i in range(len(nodes) - 1):
        g0, g1 = gaps[i], gaps[i + 1]
        h0, h1 = harms[i], harms[i + 1]
        if g0 is None or g1 is None:
            continue
        if g0 == 0.0:
            found.append((nodes[i], "crossing"))
            continue
        if (g0 > 0) != (g1 > 0):
            root = bisect_root(gap_at, nodes[i], nodes[i + 1], xtol, fa=g0, fb=g1)
            found.append((root, "crossing"))
        elif h0 is not None and h1 is not None and h0 != 0.0 and (h0 > 0) != (h1 > 0):
            pole = bisect_root(harmonic_at, nodes[i], nodes[i + 1], xtol, fa=h0, fb=h1)
            try:
                touch = abs(gap_at(pole))
            except (SingularNonlinearity, SeriesNotConverged):
                touch = math.inf
            if touch <= tangent_tol:
                found.append((pole, "tangent"))

    found.sort(key=lambda t: t[0])
    roots = tuple(r for r, _ in found)
    kinds = tuple(kind for _, kind in found)
    signs: list[int] = []
    for a, b in zip(roots, roots[1:]):
        try:
            h = harmonic_at(0.5 * (a + b))
            signs.append(0 if h == 0.0 else (1 if h > 0 else -1))
        except (SingularNonlinearity, SeriesNotConverged):
            signs.append(0)
    return IntersectionSet(
        xi_sq=xi_sq,
        k=k,
        N=N,
        roots=roots,
        signs=tuple(signs),
        kinds=kinds,
        skipped=tuple(skipped),
    )


@dataclass(frozen=True)
class PolarProfile:
    """Uniformly sampled moment profile around the full circle."""

    points: tuple[tuple[float, float, float], ...]  # (phi, squeeze, raw moment)
    benchmark: float


def polar_profile(
    cfg: FanConfig,
    N: int,
    samples: int,
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> PolarProfile:
    """Sample (phi, S, S + benchmark) on a uniform phi grid over [0, 2 pi)."""
    if samples < 8 * cfg.k:
        raise DomainError(f"need at least {8 * cfg.k} samples for k={cfg.k}, got {samples}")
    coeffs = coefficients(cfg, N, ctl)
    bench = vacuum_benchmark(N)
    pts = []
    for i in range(samples):
        phi = 2 * math.pi * i / samples
        s = squeeze_parameter(coeffs, phi)
        pts.append((phi, s, s + bench))
    return PolarProfile(points=tuple(pts), benchmark=bench)


def max_squeeze_curve(
    grid: GridSpec,
    model_kind: str = "trapped-ion",
    ctl: SeriesControl = DEFAULT_CONTROL,
    threads: Optional[int] = None,
    xtol: float = 1e-6,
) -> list[tuple[float, float, float]]:
    """Ridge of deepest squeezing: per xi_sq column, the minimizing eta_sq.

    Columns whose scan shows no negative squeeze parameter are omitted;
    raises EmptyBoundary when every column is empty.
    """
    diagram = scan(grid, model_kind, ctl, threads)
    xi_vals = grid.xi_sq.values()
    eta_vals = grid.eta_sq.values()
    out: list[tuple[float, float, float]] = []

    for j, xi_sq in enumerate(xi_vals):
        column = diagram.values[:, j]
        best_i = None
        best = 0.0
        for i in range(len(eta_vals)):
            if diagram.status[i][j] == STATUS_OK and column[i] < best:
                best = column[i]
                best_i = i
        if best_i is None:
            continue

        def s_of(eta_sq: float) -> float:
            cfg = FanConfig.from_xi_sq(
                grid.k, xi_sq, _model_for(model_kind, grid.k, eta_sq)
            )
            return squeeze_parameter(coefficients(cfg, grid.N, ctl), grid.phi)

        lo = eta_vals[max(0, best_i - 1)]
        hi = eta_vals[min(len(eta_vals) - 1, best_i + 1)]
        try:
            if lo < hi:
                e_min, s_min = golden_min(s_of, lo, hi, xtol)
            else:
                e_min, s_min = eta_vals[best_i], best
        except (SingularNonlinearity, SeriesNotConverged):
            e_min, s_min = eta_vals[best_i], best
        out.append((xi_sq, e_min, s_min))

    if not out:
        raise EmptyBoundary("no negative squeeze parameter anywhere on the grid")
    return out
