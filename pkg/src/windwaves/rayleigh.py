"""Rayleigh-equation solvers on the air column.

The second-order problem

    -y'' + (U''/(U - c) + k^2) y = 0 on (0, h_plus),   y(h_plus) = 0

is integrated from the lid down to the interface with initial data
y(h_plus) = 0, y'(h_plus) = 1.  The single output consumed by the dispersion
relations is the interface impedance y'(0)/y(0), which is invariant under
rescaling of the initial data.

Three regimes are covered:

* ``integrate_rayleigh``: Im c != 0, or real c with no critical layer.
* ``integrate_wronskian``: the real 4-vector (|y|^2, Re y'conj(y), |y'|^2,
  Im y'conj(y)) whose last component carries the destabilizing phase.
* ``limiting_solution``: the Im c -> 0 limit across critical layers, crossed
  with local log-series patches and the explicit derivative jump
  i sign(c_I) pi U''(s)/|U'(s)| y(s).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    DegenerateAtInterface,
    InfiniteDomain,
    NearSingularCoefficient,
    OrderUnavailable,
    SeriesRadiusTooSmall,
)
from .profiles import (
    CriticalLayerSet,
    PiecewiseLinearProfile,
    ShearProfile,
    find_critical_points,
)

__all__ = [
    "RayleighSolution",
    "RayleighTrace",
    "WronskianPath",
    "LayerJump",
    "LimitSolution",
    "ConvergenceReport",
    "integrate_rayleigh",
    "integrate_wronskian",
    "limiting_solution",
    "impedance_limit_check",
    "interface_impedance",
    "uniform_flow_impedance",
    "pwl_impedance_cascade",
]

#: direct integration requires |Im c| >= SWITCH_FACTOR * speed scale when
#: critical layers exist at Re c (below that, use limiting_solution)
SWITCH_FACTOR = 1e-7

#: relative floor on |y(0)| below which the interface normalization fails
INTERFACE_FLOOR = 1e-12

_DEFAULT_TOL = 1e-10


def _speed_scale(profile: ShearProfile, c: complex) -> float:
    try:
        umin, umax = profile.u_bounds(513)
        span = umax - umin
    except Exception:
        span = abs(profile.value(0.0))
    return max(1.0, span, abs(c.real))


def _has_layers(profile: ShearProfile, c_r: float) -> bool:
    # cheap range test first; exact scan only if c_r is inside the range
    try:
        umin, umax = profile.u_bounds(513)
    except Exception:
        return False
    if c_r < umin - 1e-12 or c_r > umax + 1e-12:
        return False
    return True


@dataclass
class RayleighTrace:
    """Sampled (x2, y, y') path of one solve, ordered by increasing x2."""

    x2: np.ndarray
    y: np.ndarray
    yp: np.ndarray

    def write_csv(self, path) -> None:
        """Dump the trace with the derived Wronskian quantities."""
        u1 = np.abs(self.y) ** 2
        u2 = np.real(self.yp * np.conj(self.y))
        u3 = np.abs(self.yp) ** 2
        w = np.imag(self.yp * np.conj(self.y))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("x2,re_y,im_y,re_yp,im_yp,u1,u2,u3,w\n")
            for i in range(self.x2.size):
                row = (self.x2[i], self.y[i].real, self.y[i].imag,
                       self.yp[i].real, self.yp[i].imag,
                       u1[i], u2[i], u3[i], w[i])
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


@dataclass
class RayleighSolution:
    """Interface data of one direct Rayleigh solve."""

    c: complex
    k: float
    y0: complex
    yp0: complex
    impedance: complex
    method: str = "direct"
    n_steps: int = 0
    trace: Optional[RayleighTrace] = None


def uniform_flow_impedance(k: float, h_plus: float) -> float:
    """y'(0)/y(0) for profiles with U'' = 0: -|k| coth(|k| h+), -> -|k| at inf."""
    ak = abs(k)
    if math.isinf(h_plus):
        return -ak
    return -ak / math.tanh(ak * h_plus)


def _segment_bounds(profile: ShearProfile) -> list[float]:
    """Integration breakpoints, descending from h_plus to 0."""
    pts = [profile.h_plus, 0.0]
    if isinstance(profile, PiecewiseLinearProfile):
        pts.extend(x for x, _ in profile.kinks() if 0.0 < x < profile.h_plus)
    return sorted(set(pts), reverse=True)


def _kink_jump_map(profile: ShearProfile) -> dict[float, float]:
    if isinstance(profile, PiecewiseLinearProfile):
        return dict(profile.kinks())
    return {}


def integrate_rayleigh(profile: ShearProfile, k: float, c: complex,
                       tol: float = _DEFAULT_TOL, *,
                       init: tuple[complex, complex] = (0.0, 1.0),
                       want_trace: bool = False,
                       trace_points: int = 257) -> RayleighSolution:
    """Integrate the Rayleigh equation from the lid down to the interface.

    Parameters
    ----------
    profile : ShearProfile
        Wind profile on a finite column.
    k : float
        Wavenumber (nonzero).
    c : complex
        Wave speed.  Im c may vanish only when Re c has no critical layer.
    tol : float
        Relative tolerance of the adaptive integrator.
    init : pair of complex
        Initial data (y, y') at the lid; the default (0, 1) matches the
        normalization used throughout.  The impedance does not depend on it.

    Returns
    -------
    RayleighSolution

    Raises
    ------
    InfiniteDomain
        If h_plus is not finite.
    NearSingularCoefficient
        If |Im c| is below the direct/limiting switch threshold while Re c is
        a critical value, or the coefficient becomes near-singular en route.
    DegenerateAtInterface
        If |y(0)| < 1e-12 * sup |y| (channel-type eigenfunction).
    """
    if k == 0.0:
        raise ValueError("wavenumber k must be nonzero")
    h = profile.h_plus
    if not math.isfinite(h):
        raise InfiniteDomain("direct integration needs a finite air column; "
                             "uniform-vorticity impedances have closed forms")

    scale = _speed_scale(profile, c)
    ci = c.imag
    # Zero-curvature coefficients are identically k^2 and piecewise-linear
    # ones are regular inside every segment (only the kink speeds are
    # dangerous, and those are guarded at the jumps below); elsewhere a
    # critical layer at Re c makes the coefficient singular.
    if not (profile.zero_curvature or isinstance(profile, PiecewiseLinearProfile)) \
            and abs(ci) < SWITCH_FACTOR * scale * (1.0 - 1e-9):
        if abs(ci) > 0.0 and _has_layers(profile, c.real):
            raise NearSingularCoefficient(
                f"|Im c|={abs(ci):g} below switch threshold "
                f"{SWITCH_FACTOR * scale:g}; use limiting_solution")
        if ci == 0.0 and len(find_critical_points(profile, c.real)) > 0:
            raise NearSingularCoefficient(
                "real wave speed with critical layers; use limiting_solution")

    jumps = _kink_jump_map(profile)
    bounds = _segment_bounds(profile)

    if isinstance(profile, PiecewiseLinearProfile):
        def q(x: float) -> complex:
            return k * k  # U'' = 0 inside every segment
    else:
        def q(x: float) -> complex:
            return profile.curvature(x) / (profile.value(x) - c) + k * k

    def rhs(x, y):
        qq = q(x)
        return [y[1], qq * y[0]]

    state = np.array(init, dtype=complex)
    sup_y = abs(state[0])
    min_coeff_dist = math.inf
    n_steps = 0
    tx, ty, typ = [], [], []

    for top, bot in zip(bounds, bounds[1:]):
        sol = solve_ivp(rhs, (top, bot), state, method="DOP853",
                        rtol=tol, atol=tol * 1e-3,
                        dense_output=want_trace)
        if not sol.success:  # pragma: no cover - DOP853 rarely fails here
            raise NearSingularCoefficient(f"integration failed: {sol.message}")
        n_steps += sol.t.size
        sup_y = max(sup_y, float(np.max(np.abs(sol.y[0]))))
        if not profile.zero_curvature:
            dist = min(abs(profile.value(float(x)) - c) for x in sol.t)
            min_coeff_dist = min(min_coeff_dist, dist)
        if want_trace:
            xs = np.linspace(top, bot, trace_points)
            vals = sol.sol(xs)
            tx.append(xs)
            ty.append(vals[0])
            typ.append(vals[1])
        state = sol.y[:, -1].copy()
        if bot in jumps:
            du = jumps[bot]
            denom = profile.value(bot) - c
            if abs(denom) < 1e-12 * scale:
                raise NearSingularCoefficient(
                    f"wave speed equals the kink speed U({bot})")
            # y'(x-) = y'(x+) - [U'] y / (U - c), [U'] = above minus below
            state[1] = state[1] - du * state[0] / denom

    if min_coeff_dist < 1e-10 * scale:
        raise NearSingularCoefficient(
            f"min |U - c| = {min_coeff_dist:g} along the path")

    y0, yp0 = complex(state[0]), complex(state[1])
    if abs(y0) < INTERFACE_FLOOR * max(sup_y, abs(yp0)):
        raise DegenerateAtInterface(
            f"|y(0)| = {abs(y0):g} vs sup |y| = {sup_y:g}: channel-type mode")

    trace = None
    if want_trace:
        x2 = np.concatenate(tx)[::-1]
        order = np.argsort(x2, kind="stable")
        x2 = x2[order]
        trace = RayleighTrace(x2=x2,
                              y=np.concatenate(ty)[::-1][order],
                              yp=np.concatenate(typ)[::-1][order])

    return RayleighSolution(c=c, k=k, y0=y0, yp0=yp0, impedance=yp0 / y0,
                            method="direct", n_steps=n_steps, trace=trace)


def pwl_impedance_cascade(profile: PiecewiseLinearProfile, k: float,
                          c: complex) -> complex:
    """Closed-form impedance of a piecewise-linear profile.

    Each segment solves y'' = k^2 y exactly; interior kinks contribute the
    derivative jump -[U'] y / (U - c).  Works on unbounded columns, where the
    topmost segment carries the decaying solution e^{-|k| x2}.
    """
    ak = abs(k)
    kinks = sorted(((x, j) for x, j in profile.kinks()
                    if 0.0 < x < profile.h_plus), reverse=True)
    if math.isinf(profile.h_plus):
        if not kinks:
            return -ak
        x_top = kinks[0][0]
        y, yp = 1.0 + 0.0j, -ak + 0.0j
        start = x_top
    else:
        y, yp = 0.0j, 1.0 + 0.0j
        start = profile.h_plus

    def propagate(y, yp, x_from, x_to):
        dx = x_to - x_from  # negative going down
        ch, sh = math.cosh(ak * dx), math.sinh(ak * dx)
        return y * ch + yp * sh / ak, y * ak * sh + yp * ch

    x_cur = start
    for x_kink, du in kinks:
        if x_kink < x_cur:
            y, yp = propagate(y, yp, x_cur, x_kink)
            x_cur = x_kink
        denom = profile.value(x_kink) - c
        if denom == 0.0:
            raise NearSingularCoefficient("wave speed equals a kink speed")
        yp = yp - du * y / denom
        m = max(abs(y), abs(yp))
        if m > 1e100:  # impedance is scale-invariant
            y, yp = y / m, yp / m
    y, yp = propagate(y, yp, x_cur, 0.0)
    if y == 0.0:
        raise DegenerateAtInterface("y(0) = 0 in the piecewise cascade")
    return yp / y


def interface_impedance(profile: ShearProfile, k: float, c: complex,
                        tol: float = _DEFAULT_TOL) -> complex:
    """Dispatch y'(0)/y(0): closed forms where exact, the ODE otherwise."""
    if profile.zero_curvature:
        return complex(uniform_flow_impedance(k, profile.h_plus))
    if isinstance(profile, PiecewiseLinearProfile) and math.isinf(profile.h_plus):
        return pwl_impedance_cascade(profile, k, c)
    return integrate_rayleigh(profile, k, c, tol).impedance


# ---------------------------------------------------------------------------
# Wronskian 4-vector system
# ---------------------------------------------------------------------------

@dataclass
class WronskianPath:
    """Sampled solution of the (u1, u2, u3, W) system, ascending in x2."""

    c: complex
    k: float
    x2: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    w: np.ndarray
    dense: object = field(default=None, repr=False)

    def conservation_defect(self) -> float:
        """max |u2^2 + W^2 - u1 u3 - (initial value)| over the samples."""
        inv = self.u2**2 + self.w**2 - self.u1 * self.u3
        return float(np.max(np.abs(inv - inv[-1])))

    def state_sup(self) -> float:
        return float(max(np.max(np.abs(self.u1)), np.max(np.abs(self.u2)),
                         np.max(np.abs(self.u3)), np.max(np.abs(self.w))))

    def at(self, x: float) -> np.ndarray:
        """Dense-output evaluation (u1, u2, u3, W) at altitude x."""
        return self.dense(x)


def integrate_wronskian(profile: ShearProfile, k: float, c: complex,
                        tol: float = _DEFAULT_TOL, *,
                        init: Sequence[float] = (0.0, 0.0, 1.0, 0.0),
                        n_samples: int = 1025) -> WronskianPath:
    """Integrate the real geometric system for (|y|^2, dot, |y'|^2, cross).

    The initial data (0, 0, 1, 0) at the lid matches y = 0, y' = 1.  Along any
    solution u2^2 + W^2 - u1 u3 is conserved (zero for the standard data).
    """
    if isinstance(profile, PiecewiseLinearProfile):
        raise OrderUnavailable(
            "the Wronskian system needs pointwise U''; piecewise-linear "
            "profiles only support the derivative-jump formulation")
    h = profile.h_plus
    if not math.isfinite(h):
        raise InfiniteDomain("Wronskian integration needs a finite air column")

    scale = _speed_scale(profile, c)
    cr, ci = c.real, c.imag
    if abs(ci) < SWITCH_FACTOR * scale * (1.0 - 1e-9) and _has_layers(profile, cr):
        if ci != 0.0 or len(find_critical_points(profile, cr)) > 0:
            raise NearSingularCoefficient(
                "wave speed too close to the critical-layer singularity")

    def rhs(x, u):
        du = profile.value(x) - cr
        denom = du * du + ci * ci
        upp = profile.curvature(x)
        a = k * k + upp * du / denom
        b = ci * upp / denom
        return [2.0 * u[1], a * u[0] + u[2], 2.0 * a * u[1] + 2.0 * b * u[3],
                b * u[0]]

    sol = solve_ivp(rhs, (h, 0.0), np.asarray(init, dtype=float),
                    method="DOP853", rtol=tol, atol=tol * 1e-3,
                    dense_output=True)
    if not sol.success:  # pragma: no cover
        raise NearSingularCoefficient(f"integration failed: {sol.message}")

    xs = np.unique(np.concatenate([np.linspace(0.0, h, n_samples), sol.t]))
    vals = sol.sol(xs)
    return WronskianPath(c=c, k=k, x2=xs, u1=vals[0], u2=vals[1],
                         u3=vals[2], w=vals[3], dense=sol.sol)


# ---------------------------------------------------------------------------
# Limiting solution across critical layers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _SeriesPatch:
    """Local Frobenius basis at a regular singular point of the equation.

    phi1 = t + c2 t^2 + c3 t^3 (analytic, index 1) and
    phi2 = 1 + d2 t^2 + d3 t^3 + b_{-1} phi1 log|t| (index 0), where
    t = x2 - s and b_{-1} = U''(s)/U'(s).  Truncation error at the patch edge
    is O((b t)^4 log t) with b the coefficient scale.
    """

    s: float
    u_prime: float
    u_double_prime: float
    bm1: float
    c2: float
    c3: float
    d2: float
    d3: float
    delta: float

    def phi1(self, t: float) -> float:
        return t * (1.0 + t * (self.c2 + t * self.c3))

    def dphi1(self, t: float) -> float:
        return 1.0 + t * (2.0 * self.c2 + 3.0 * self.c3 * t)

    def phi2(self, t: float) -> float:
        return (1.0 + t * t * (self.d2 + self.d3 * t)
                + self.bm1 * self.phi1(t) * math.log(abs(t)))

    def dphi2(self, t: float) -> float:
        lg = math.log(abs(t))
        return (t * (2.0 * self.d2 + 3.0 * self.d3 * t)
                + self.bm1 * (self.dphi1(t) * lg + self.phi1(t) / t))

    def matrix(self, t: float) -> np.ndarray:
        return np.array([[self.phi1(t), self.phi2(t)],
                         [self.dphi1(t), self.dphi2(t)]], dtype=complex)


def _build_patch(profile: ShearProfile, s: float, k: float,
                 delta_cap: float) -> _SeriesPatch:
    u1 = profile.slope(s)
    u2 = profile.curvature(s)
    u3 = profile.derivative3(s)
    u4 = profile.derivative4(s)
    a1 = u2 / (2.0 * u1)
    a2 = u3 / (6.0 * u1)
    bm1 = u2 / u1
    b0 = (u3 - u2 * a1) / u1 + k * k
    b1 = (0.5 * u4 - u3 * a1 + u2 * (a1 * a1 - a2)) / u1
    c2 = 0.5 * bm1
    c3 = (bm1 * c2 + b0) / 6.0
    d2 = 0.5 * (b0 - 3.0 * bm1 * c2)
    d3 = (b1 + bm1 * d2 - 5.0 * bm1 * c3) / 6.0
    # shrink the patch until the quartic tail of the series is negligible
    bscale = max(abs(bm1), abs(b0) ** 0.5, abs(b1) ** (1.0 / 3.0), abs(k),
                 1.0 / profile.h_plus)
    delta = min(delta_cap, 7e-4 / bscale)
    return _SeriesPatch(s=s, u_prime=u1, u_double_prime=u2, bm1=bm1,
                        c2=c2, c3=c3, d2=d2, d3=d3, delta=delta)


@dataclass(frozen=True)
class LayerJump:
    """Per-layer record of the limiting solution (y*(0) = 1 normalization)."""

    position: float
    y_value: complex
    delta_yprime: complex
    u1: float
    w_above: float
    w_below: float


@dataclass
class LimitSolution:
    """The Im c -> 0 limit of the Rayleigh solution with layer jump data."""

    c_r: float
    sign_ci: int
    k: float
    layers: CriticalLayerSet
    impedance: complex
    y0: complex
    yp0: complex
    jumps: tuple[LayerJump, ...]
    n_steps: int = 0
    method: str = "limiting"

    @property
    def u1_at_layers(self) -> tuple[float, ...]:
        return tuple(j.u1 for j in self.jumps)

    def w_jump_defects(self) -> tuple[float, ...]:
        """Relative defect of W*(s+) - W*(s-) against the jump formula."""
        out = []
        for j, layer in zip(self.jumps, self.layers):
            formula = (self.sign_ci * math.pi * layer.u_double_prime * j.u1
                       / abs(layer.u_prime))
            measured = j.w_above - j.w_below
            denom = max(abs(formula), abs(measured), 1e-300)
            out.append(abs(measured - formula) / denom)
        return tuple(out)


def limiting_solution(profile: ShearProfile, k: float, c_r: float,
                      sign_ci: int, tol: float = _DEFAULT_TOL, *,
                      delta_loc: float | None = None) -> LimitSolution:
    """Solve the Rayleigh equation in the limiting sense for real c_r.

    Away from critical layers the real-coefficient equation is integrated
    directly; each layer s_j is crossed on [s_j - delta, s_j + delta] with the
    two-solution Frobenius log-series, the branch fixed so that y' jumps by
    i sign_ci pi U''(s_j)/|U'(s_j)| y(s_j).  The result is normalized to
    y*(0) = 1, so ``impedance`` equals y*'(0).

    Raises
    ------
    SeriesRadiusTooSmall
        If the series patches of adjacent layers would overlap.
    DegenerateAtInterface
        If the unnormalized solution vanishes at the interface.
    """
    if sign_ci not in (-1, 1):
        raise ValueError("sign_ci must be +1 or -1")
    if k == 0.0:
        raise ValueError("wavenumber k must be nonzero")
    h = profile.h_plus
    if not math.isfinite(h):
        raise InfiniteDomain("limiting solver needs a finite air column")

    layers = find_critical_points(profile, c_r)
    if len(layers) == 0:
        sol = integrate_rayleigh(profile, k, complex(c_r), tol)
        return LimitSolution(c_r=c_r, sign_ci=sign_ci, k=k, layers=layers,
                             impedance=sol.impedance, y0=1.0 + 0.0j,
                             yp0=sol.impedance, jumps=(),
                             n_steps=sol.n_steps)

    positions = list(layers.positions)
    gaps = [positions[0]] + [b - a for a, b in zip(positions, positions[1:])] \
        + [h - positions[-1]]
    min_gap = min(gaps)

    patches = []
    for layer in layers:
        cap = min(0.05 * h, 0.25 * min_gap)
        patch = _build_patch(profile, layer.position, k, cap)
        if delta_loc is not None:
            patch = replace(patch, delta=float(delta_loc))
        if patch.delta <= 1e-12 * h:
            raise SeriesRadiusTooSmall(
                f"series radius {patch.delta:g} collapsed at layer {layer.position}")
        if 2.0 * patch.delta >= min_gap:
            raise SeriesRadiusTooSmall(
                f"patches of half-width {patch.delta:g} overlap (min gap {min_gap:g})")
        patches.append(patch)

    def rhs(x, y):
        qq = profile.curvature(x) / (profile.value(x) - c_r) + k * k
        return [y[1], qq * y[0]]

    n_steps = 0
    log_scale = 0.0  # true state = stored state * exp(log_scale)

    def rescale(state):
        nonlocal log_scale
        m = max(abs(state[0]), abs(state[1]))
        if m > 1e6 or (0.0 < m < 1e-6):
            state = state / m
            log_scale += math.log(m)
        return state

    def run(x_from, x_to, state):
        # chunk long spans: the solution grows like e^{|k| span} and must be
        # renormalized before it overflows
        nonlocal n_steps
        span = abs(x_from - x_to)
        n_chunks = max(1, int(math.ceil(abs(k) * span / 300.0)))
        edges = np.linspace(x_from, x_to, n_chunks + 1)
        for a, b in zip(edges, edges[1:]):
            sol = solve_ivp(rhs, (a, b), state, method="DOP853",
                            rtol=tol, atol=tol * 1e-3)
            if not sol.success:  # pragma: no cover
                raise NearSingularCoefficient(f"integration failed: {sol.message}")
            n_steps += sol.t.size
            state = rescale(sol.y[:, -1].copy())
        return state

    state = np.array([0.0, 1.0], dtype=complex)
    x_cur = h
    raw_jumps = []  # per-layer records with the scale at recording time

    for patch, layer in zip(reversed(patches), reversed(list(layers))):
        s, delta = patch.s, patch.delta
        state = run(x_cur, s + delta, state)
        w_above = float(np.imag(state[1] * np.conj(state[0])))
        # match (A+, B) on the upper edge, jump the analytic amplitude,
        # re-emit the state on the lower edge
        a_plus, b_coef = np.linalg.solve(patch.matrix(delta), state)
        a_minus = a_plus - 1j * sign_ci * math.pi * (
            patch.u_double_prime / abs(patch.u_prime)) * b_coef
        state = patch.matrix(-delta) @ np.array([a_minus, b_coef])
        w_below = float(np.imag(state[1] * np.conj(state[0])))
        raw_jumps.append((patch, b_coef, w_above, w_below, log_scale))
        state = rescale(state)
        x_cur = s - delta

    state = run(x_cur, 0.0, state)

    y0, yp0 = complex(state[0]), complex(state[1])
    if abs(y0) < INTERFACE_FLOOR * max(1.0, abs(yp0)):
        raise DegenerateAtInterface("limiting solution vanishes at the interface")

    jumps = []
    for patch, b_coef, w_above, w_below, lsc in reversed(raw_jumps):
        # restore the recording-time scale relative to the interface value
        rel = math.exp(min(lsc - log_scale, 300.0))
        y_val = (b_coef / y0) * rel
        dyp = 1j * sign_ci * math.pi * (
            patch.u_double_prime / abs(patch.u_prime)) * y_val
        rel2 = rel * rel / abs(y0) ** 2
        jumps.append(LayerJump(position=patch.s, y_value=y_val,
                               delta_yprime=dyp,
                               u1=abs(b_coef) ** 2 * rel2,
                               w_above=w_above * rel2,
                               w_below=w_below * rel2))

    return LimitSolution(c_r=c_r, sign_ci=sign_ci, k=k, layers=layers,
                         impedance=yp0 / y0, y0=1.0 + 0.0j, yp0=yp0 / y0,
                         jumps=tuple(jumps), n_steps=n_steps)


@dataclass
class ConvergenceReport:
    """Impedance convergence onto the limiting value as Im c -> 0."""

    c_r: float
    sign_ci: int
    k: float
    impedance_limit: complex
    ci_values: tuple[float, ...]
    impedances: tuple[complex, ...]
    errors: tuple[float, ...]
    slope: Optional[float]

    @property
    def monotone(self) -> bool:
        return all(a > b for a, b in zip(self.errors, self.errors[1:]))


def impedance_limit_check(profile: ShearProfile, k: float, c_r: float,
                          sign_ci: int, ci_sequence: Sequence[float],
                          tol: float = _DEFAULT_TOL) -> ConvergenceReport:
    """Compare direct impedances at c_r + i c_I against the limiting value.

    ``ci_sequence`` must be positive and decreasing.  The fitted slope is the
    least-squares log-log rate; it is omitted when fewer than two points are
    supplied.
    """
    cis = [float(v) for v in ci_sequence]
    if any(v <= 0.0 for v in cis):
        raise ValueError("ci_sequence must be positive")
    if any(a <= b for a, b in zip(cis, cis[1:])):
        raise ValueError("ci_sequence must be decreasing")

    limit = limiting_solution(profile, k, c_r, sign_ci, tol)
    imps, errs = [], []
    for ci in cis:
        sol = integrate_rayleigh(profile, k, complex(c_r, sign_ci * ci), tol)
        imps.append(sol.impedance)
        errs.append(abs(sol.impedance - limit.impedance))

    slope = None
    if len(cis) >= 2:
        lx = np.log(np.array(cis))
        ly = np.log(np.maximum(np.array(errs), 1e-300))
        slope = float(np.polyfit(lx, ly, 1)[0])

    return ConvergenceReport(c_r=c_r, sign_ci=sign_ci, k=k,
                             impedance_limit=limit.impedance,
                             ci_values=tuple(cis), impedances=tuple(imps),
                             errors=tuple(errs), slope=slope)
