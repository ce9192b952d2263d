"""Shear velocity profiles U(x2) on the air column [0, h_plus].

Every profile exposes the wind speed and its first two derivatives plus
critical-point queries (altitudes where U equals a given phase speed).
Profiles are immutable after construction and safe to share between
concurrent solves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    DegenerateShear,
    EndpointCritical,
    OrderUnavailable,
    OutOfDomain,
)

__all__ = [
    "ShearProfile",
    "ConstantProfile",
    "LinearShearProfile",
    "PiecewiseLinearProfile",
    "TanhProfile",
    "AnalyticProfile",
    "TabulatedProfile",
    "CriticalLayer",
    "CriticalLayerSet",
    "evaluate",
    "find_critical_points",
    "load_tabulated",
]

#: default number of grid cells used when scanning for critical points
ROOT_SCAN_GRID = 4096

#: |U'(s)| must exceed this multiple of (max U - min U)/h_plus at every root
DEGENERACY_FACTOR = 1e-8


class ShearProfile:
    """Base class: a wind profile on [0, h_plus].

    Subclasses set ``kind``, ``smoothness_class`` and ``h_plus`` and implement
    ``value``, ``slope`` and ``curvature``.  ``h_plus = inf`` is permitted only
    for uniform and constant-shear profiles.
    """

    kind: str = "abstract"
    smoothness_class: str = "C2"
    h_plus: float = math.inf
    #: True when U'' vanishes identically (uniform or constant shear)
    zero_curvature: bool = False

    def value(self, x2: float) -> float:
        raise NotImplementedError

    def slope(self, x2: float) -> float:
        raise NotImplementedError

    def curvature(self, x2: float) -> float:
        raise NotImplementedError

    # Third and fourth derivatives feed the local series at critical layers.
    # Central differences on the curvature are accurate enough by default;
    # analytic families override.
    def derivative3(self, x2: float) -> float:
        h = self._fd_step()
        lo, hi = max(0.0, x2 - h), min(self.h_plus, x2 + h)
        return (self.curvature(hi) - self.curvature(lo)) / (hi - lo)

    def derivative4(self, x2: float) -> float:
        h = self._fd_step()
        lo, hi = max(0.0, x2 - h), min(self.h_plus, x2 + h)
        mid = 0.5 * (lo + hi)
        return (self.curvature(hi) - 2.0 * self.curvature(mid) + self.curvature(lo)) / (
            (0.5 * (hi - lo)) ** 2
        )

    def _fd_step(self) -> float:
        span = self.h_plus if math.isfinite(self.h_plus) else 1.0
        return 1e-4 * max(span, 1.0)

    def u_bounds(self, n: int = ROOT_SCAN_GRID + 1) -> tuple[float, float]:
        """Sampled (min U, max U) over the column; exact for unbounded kinds."""
        if not math.isfinite(self.h_plus):
            raise OutOfDomain("cannot sample an unbounded profile")
        xs = np.linspace(0.0, self.h_plus, n)
        us = np.array([self.value(float(x)) for x in xs])
        return float(us.min()), float(us.max())

    def _check_domain(self, x2: float) -> None:
        if not (0.0 <= x2 <= self.h_plus):
            raise OutOfDomain(
                f"x2={x2!r} outside [0, {self.h_plus!r}] for {self.kind} profile"
            )


@dataclass(frozen=True)
class ConstantProfile(ShearProfile):
    """Uniform wind U(x2) = u0."""

    u0: float
    h_plus: float = math.inf
    kind = "constant"
    smoothness_class = "C4"
    zero_curvature = True

    def value(self, x2):
        return self.u0

    def slope(self, x2):
        return 0.0

    def curvature(self, x2):
        return 0.0

    def derivative3(self, x2):
        return 0.0

    def derivative4(self, x2):
        return 0.0

    def u_bounds(self, n: int = 0) -> tuple[float, float]:
        return self.u0, self.u0


@dataclass(frozen=True)
class LinearShearProfile(ShearProfile):
    """Constant shear U(x2) = u0 + mu * x2."""

    u0: float
    mu: float
    h_plus: float = math.inf
    kind = "linear"
    smoothness_class = "C4"
    zero_curvature = True

    def value(self, x2):
        return self.u0 + self.mu * x2

    def slope(self, x2):
        return self.mu

    def curvature(self, x2):
        return 0.0

    def derivative3(self, x2):
        return 0.0

    def derivative4(self, x2):
        return 0.0

    def u_bounds(self, n: int = 0) -> tuple[float, float]:
        if not math.isfinite(self.h_plus):
            raise OutOfDomain("cannot bound a constant-shear profile on [0, inf)")
        ends = (self.u0, self.u0 + self.mu * self.h_plus)
        return min(ends), max(ends)


class PiecewiseLinearProfile(ShearProfile):
    """Continuous piecewise-linear wind profile.

    ``nodes`` lists the kink altitudes starting at 0; segment ``i`` spans
    ``[nodes[i], nodes[i+1]]`` (the last segment extends to ``h_plus``, which
    may be infinite) and carries shear rate ``slopes[i]``.  U'' exists only as
    point masses at the interior nodes, so curvature evaluation is refused;
    the derivative jump data is exposed through :meth:`kinks` instead.
    """

    kind = "piecewise_linear"
    smoothness_class = "C0_1"
    zero_curvature = False

    def __init__(self, nodes: Sequence[float], slopes: Sequence[float], u0: float = 0.0,
                 h_plus: float = math.inf):
        nodes = [float(x) for x in nodes]
        slopes = [float(s) for s in slopes]
        if len(nodes) < 1 or len(slopes) != len(nodes):
            raise ValueError("need one slope per segment (len(slopes) == len(nodes))")
        if nodes[0] != 0.0:
            raise ValueError("first node must be 0")
        if any(b >= c for b, c in zip(nodes, nodes[1:])):
            raise ValueError("nodes must be strictly increasing")
        if nodes[-1] >= h_plus:
            raise ValueError("all nodes must lie below h_plus")
        self.nodes = tuple(nodes)
        self.slopes = tuple(slopes)
        self.u0 = float(u0)
        self.h_plus = float(h_plus)
        # cumulative values at the nodes
        vals = [self.u0]
        for i in range(1, len(nodes)):
            vals.append(vals[-1] + slopes[i - 1] * (nodes[i] - nodes[i - 1]))
        self._node_values = tuple(vals)

    @classmethod
    def ramp(cls, mu: float, x2_star: float, h_plus: float = math.inf
             ) -> "PiecewiseLinearProfile":
        """Shear mu up to the kink altitude x2_star, uniform above."""
        return cls([0.0, x2_star], [mu, 0.0], u0=0.0, h_plus=h_plus)

    def _segment(self, x2: float) -> int:
        i = len(self.nodes) - 1
        while i > 0 and x2 < self.nodes[i]:
            i -= 1
        return i

    def value(self, x2):
        self._check_domain(x2)
        i = self._segment(x2)
        return self._node_values[i] + self.slopes[i] * (x2 - self.nodes[i])

    def slope(self, x2):
        self._check_domain(x2)
        return self.slopes[self._segment(x2)]

    def curvature(self, x2):
        raise OrderUnavailable(
            "U'' of a piecewise-linear profile is a sum of point masses; "
            "use the kink jump conditions instead"
        )

    def kinks(self) -> list[tuple[float, float]]:
        """Interior kink altitudes with the U' jump (above minus below)."""
        return [
            (self.nodes[i], self.slopes[i] - self.slopes[i - 1])
            for i in range(1, len(self.nodes))
        ]

    def u_bounds(self, n: int = 0) -> tuple[float, float]:
        if not math.isfinite(self.h_plus):
            raise OutOfDomain("cannot bound an unbounded piecewise profile")
        vals = list(self._node_values) + [self.value(self.h_plus)]
        return min(vals), max(vals)

    def __repr__(self):
        return (f"PiecewiseLinearProfile(nodes={self.nodes}, slopes={self.slopes}, "
                f"u0={self.u0}, h_plus={self.h_plus})")


@dataclass(frozen=True)
class TanhProfile(ShearProfile):
    """Boundary-layer style wind U(x2) = u_max * tanh(x2 / d)."""

    u_max: float
    d: float
    h_plus: float
    kind = "tanh"
    smoothness_class = "C4"

    def value(self, x2):
        self._check_domain(x2)
        return self.u_max * math.tanh(x2 / self.d)

    def slope(self, x2):
        self._check_domain(x2)
        return self.u_max / self.d / math.cosh(x2 / self.d) ** 2

    def curvature(self, x2):
        self._check_domain(x2)
        t = math.tanh(x2 / self.d)
        return -2.0 * self.u_max / self.d**2 * t * (1.0 - t * t)

    def derivative3(self, x2):
        t = math.tanh(x2 / self.d)
        s2 = 1.0 - t * t
        return -2.0 * self.u_max / self.d**3 * (s2 * s2 - 2.0 * s2 * t * t)

    def derivative4(self, x2):
        t = math.tanh(x2 / self.d)
        s2 = 1.0 - t * t
        return 8.0 * self.u_max / self.d**4 * s2 * t * (2.0 * s2 - t * t)

    def u_bounds(self, n: int = 0) -> tuple[float, float]:
        ends = (0.0, self.u_max * math.tanh(self.h_plus / self.d))
        return min(ends), max(ends)


class AnalyticProfile(ShearProfile):
    """Wind profile defined by user-supplied callables.

    Parameters
    ----------
    f, df, d2f : callable
        U, U' and U'' as functions of altitude.
    h_plus : float
        Top of the air column (finite).
    d3f, d4f : callable, optional
        Higher derivatives; finite differences of ``d2f`` are used otherwise.
    name : str
        Label used in reprs and serialized metadata.
    """

    kind = "analytic"
    smoothness_class = "C4"

    def __init__(self, f: Callable[[float], float], df, d2f, h_plus: float,
                 d3f=None, d4f=None, name: str = "analytic",
                 smoothness_class: str = "C4"):
        if not math.isfinite(h_plus):
            raise ValueError("AnalyticProfile requires a finite h_plus")
        self._f, self._df, self._d2f = f, df, d2f
        self._d3f, self._d4f = d3f, d4f
        self.h_plus = float(h_plus)
        self.name = name
        self.smoothness_class = smoothness_class

    def value(self, x2):
        self._check_domain(x2)
        return self._f(x2)

    def slope(self, x2):
        self._check_domain(x2)
        return self._df(x2)

    def curvature(self, x2):
        self._check_domain(x2)
        return self._d2f(x2)

    def derivative3(self, x2):
        if self._d3f is not None:
            return self._d3f(x2)
        return super().derivative3(x2)

    def derivative4(self, x2):
        if self._d4f is not None:
            return self._d4f(x2)
        return super().derivative4(x2)

    def __repr__(self):
        return f"AnalyticProfile(name={self.name!r}, h_plus={self.h_plus})"


class TabulatedProfile(ShearProfile):
    """Measured wind samples interpolated by a C2 cubic spline.

    Not-a-knot end conditions avoid injecting artificial curvature at the
    endpoints.  Needs at least 4 strictly increasing sample altitudes starting
    at 0.
    """

    kind = "tabulated"
    smoothness_class = "C2"

    def __init__(self, x2: Sequence[float], u: Sequence[float]):
        x2 = np.asarray(x2, dtype=float)
        u = np.asarray(u, dtype=float)
        if x2.ndim != 1 or x2.shape != u.shape:
            raise ValueError("x2 and u must be 1-d arrays of equal length")
        if x2.size < 4:
            raise ValueError("need at least 4 samples for a C2 interpolant")
        if np.any(np.diff(x2) <= 0.0):
            raise ValueError("sample altitudes must be strictly increasing")
        if abs(x2[0]) > 1e-12 * max(1.0, abs(x2[-1])):
            raise ValueError("samples must start at the interface x2 = 0")
        self.x2 = x2
        self.u = u
        self.h_plus = float(x2[-1])
        self._spline = CubicSpline(x2, u, bc_type="not-a-knot")
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)
        self._d3 = self._spline.derivative(3)

    def value(self, x2):
        self._check_domain(x2)
        return float(self._spline(x2))

    def slope(self, x2):
        self._check_domain(x2)
        return float(self._d1(x2))

    def curvature(self, x2):
        self._check_domain(x2)
        return float(self._d2(x2))

    def derivative3(self, x2):
        return float(self._d3(x2))

    def derivative4(self, x2):
        return 0.0  # cubic pieces

    def __repr__(self):
        return f"TabulatedProfile(n={self.x2.size}, h_plus={self.h_plus})"


def load_tabulated(path) -> TabulatedProfile:
    """Read a profile table: one "x2 value" pair per line, '#' comments."""
    xs, us = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'x2 value', got {raw!r}")
            xs.append(float(parts[0]))
            us.append(float(parts[1]))
    return TabulatedProfile(xs, us)


def evaluate(profile: ShearProfile, x2: float, order: int = 0) -> float:
    """Evaluate U (order 0), U' (order 1) or U'' (order 2) at x2.

    Raises
    ------
    OutOfDomain
        If x2 lies outside [0, h_plus].
    OrderUnavailable
        If order=2 on a piecewise-linear profile, or order not in {0, 1, 2}.
    """
    profile._check_domain(x2)
    if order == 0:
        return profile.value(x2)
    if order == 1:
        return profile.slope(x2)
    if order == 2:
        return profile.curvature(x2)
    raise OrderUnavailable(f"order must be 0, 1 or 2, got {order}")


@dataclass(frozen=True)
class CriticalLayer:
    """One critical altitude: U(position) = target phase speed."""

    position: float
    u_prime: float
    u_double_prime: float


@dataclass(frozen=True)
class CriticalLayerSet:
    """All interior critical layers for one real phase speed."""

    layers: tuple[CriticalLayer, ...]
    target: float

    def __len__(self):
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)

    def __bool__(self):
        return bool(self.layers)

    @property
    def positions(self) -> tuple[float, ...]:
        return tuple(layer.position for layer in self.layers)


def _bisect(f, a: float, b: float, fa: float, fb: float) -> float:
    # plain bisection; f(a) and f(b) have opposite signs
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fa < 0.0) != (fm < 0.0):
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def _curvature_or_zero(profile: ShearProfile, s: float) -> float:
    try:
        return evaluate(profile, s, 2)
    except OrderUnavailable:
        return 0.0  # interior of a linear segment


def find_critical_points(profile: ShearProfile, c_r: float, *,
                         grid_n: int = ROOT_SCAN_GRID,
                         degeneracy_factor: float = DEGENERACY_FACTOR,
                         endpoint_rtol: float = 1e-10) -> CriticalLayerSet:
    """Locate all interior altitudes where U equals the real phase speed c_r.

    Roots are bracketed by a sign scan on a dense grid, tightened by bisection
    and polished with two guarded Newton steps, then annotated with U' and U''.

    Raises
    ------
    EndpointCritical
        If c_r matches U(0) or U(h_plus) to within tolerance.
    DegenerateShear
        If |U'(s)| at any root falls below the regular-value threshold.
    """
    if not math.isfinite(c_r):
        raise ValueError("c_r must be finite")

    if isinstance(profile, ConstantProfile) or (
        not math.isfinite(profile.h_plus) and profile.zero_curvature
    ):
        return _critical_points_unbounded(profile, c_r, endpoint_rtol)

    h = profile.h_plus
    if not math.isfinite(h):
        raise OutOfDomain("root scan requires a finite air column")

    xs = np.linspace(0.0, h, grid_n + 1)
    fs = np.array([profile.value(float(x)) - c_r for x in xs])
    umin, umax = float(min(fs) + c_r), float(max(fs) + c_r)
    speed_scale = max(1.0, abs(c_r), umax - umin)

    if abs(fs[0]) <= endpoint_rtol * speed_scale or abs(fs[-1]) <= endpoint_rtol * speed_scale:
        raise EndpointCritical(
            f"c_r={c_r} equals U at an endpoint (U(0)={fs[0]+c_r}, U(h+)={fs[-1]+c_r})"
        )

    f = lambda x: profile.value(x) - c_r
    roots: list[float] = []
    for i in range(grid_n):
        a, b, fa, fb = float(xs[i]), float(xs[i + 1]), float(fs[i]), float(fs[i + 1])
        if fa == 0.0:
            # exact node hit; tangencies are caught by the slope threshold below
            roots.append(a)
            continue
        if fb == 0.0 or (fa < 0.0) == (fb < 0.0):
            continue
        roots.append(_bisect(f, a, b, fa, fb))

    # Newton polish, guarded to stay inside the column
    polished = []
    for s in roots:
        for _ in range(3):
            ds = profile.slope(s)
            if ds == 0.0:
                break
            step = f(s) / ds
            s_new = s - step
            if 0.0 < s_new < h:
                s = s_new
        polished.append(s)

    # de-duplicate (clustered brackets around one root) and sort
    polished.sort()
    spacing = h / grid_n
    unique: list[float] = []
    for s in polished:
        if not unique or s - unique[-1] > spacing:
            unique.append(s)

    threshold = degeneracy_factor * max(umax - umin, 1e-300) / h
    layers = []
    for s in unique:
        if not (0.0 < s < h):
            raise EndpointCritical(f"critical point at column endpoint x2={s}")
        up = profile.slope(s)
        if abs(up) <= threshold:
            raise DegenerateShear(
                f"|U'({s})| = {abs(up):g} below regular-value threshold {threshold:g}"
            )
        layers.append(CriticalLayer(s, up, _curvature_or_zero(profile, s)))

    for layer in layers:
        resid = abs(profile.value(layer.position) - c_r)
        if resid > 1e-12 * max(1.0, abs(c_r)):
            raise DegenerateShear(
                f"root polish stalled at x2={layer.position} (residual {resid:g})"
            )
    return CriticalLayerSet(tuple(layers), c_r)


def _critical_points_unbounded(profile: ShearProfile, c_r: float,
                               endpoint_rtol: float) -> CriticalLayerSet:
    # closed-form roots for the two kinds that may live on [0, inf)
    scale = max(1.0, abs(c_r))
    if isinstance(profile, ConstantProfile):
        if abs(profile.u0 - c_r) <= endpoint_rtol * scale:
            raise DegenerateShear("uniform wind equal to c_r: every altitude critical")
        return CriticalLayerSet((), c_r)
    if isinstance(profile, LinearShearProfile):
        if profile.mu == 0.0:
            if abs(profile.u0 - c_r) <= endpoint_rtol * scale:
                raise DegenerateShear("degenerate zero-shear profile at c_r")
            return CriticalLayerSet((), c_r)
        s = (c_r - profile.u0) / profile.mu
        if s < 0.0 or s > profile.h_plus:
            return CriticalLayerSet((), c_r)
        if abs(s) <= endpoint_rtol * max(1.0, profile.h_plus if math.isfinite(profile.h_plus) else 1.0) \
                or (math.isfinite(profile.h_plus) and abs(s - profile.h_plus) <= endpoint_rtol * profile.h_plus):
            raise EndpointCritical(f"critical point at column endpoint x2={s}")
        return CriticalLayerSet((CriticalLayer(s, profile.mu, 0.0),), c_r)
    raise OutOfDomain("unbounded domain supported only for uniform/constant-shear")
