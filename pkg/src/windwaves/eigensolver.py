"""Complex root location for dispersion residuals.

Residual evaluations typically cost an ODE solve, so the local iteration is
derivative-free (Muller's three-point method) and the global counting tool is
an argument-principle winding number with adaptive boundary refinement.
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import (
    BoundaryZero,
    BranchLost,
    NoConvergence,
    PhaseJumpUnresolved,
    WindwavesError,
)

__all__ = [
    "EigenResult",
    "GrowthCurve",
    "GrowthEntry",
    "ScanStrategy",
    "find_root",
    "count_roots",
    "multistart_roots",
    "continue_in_epsilon",
    "scan_k",
]

UNSTABLE = "Unstable"
NEUTRAL = "NeutralOrStable"
DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class EigenResult:
    """One converged (or classified) complex wave speed."""

    c: complex
    residual_norm: float
    iterations: int
    classification: str
    k: Optional[float] = None

    @property
    def growth_rate(self) -> Optional[float]:
        """Temporal growth k * Im c of the mode e^{ik(x1 - c t)}."""
        if self.k is None:
            return None
        return self.k * self.c.imag


def _classify(c: complex, unstable_tol: float) -> str:
    return UNSTABLE if c.imag > unstable_tol * max(1.0, abs(c.real)) else NEUTRAL


def find_root(residual: Callable[[complex], complex], c_init: complex, *,
              tol: float = 1e-11, max_iter: int = 50, scale: float = 1.0,
              k: Optional[float] = None, unstable_tol: float = 1e-8,
              spread: float = 1e-4) -> EigenResult:
    """Muller iteration in the complex plane from a single seed.

    Convergence requires |residual| <= tol * scale together with a relative
    step below 1e-12 (or a residual at rounding level).  ``scale`` carries the
    dimensional normalization, typically g.

    Raises
    ------
    NoConvergence
        After max_iter Muller steps.
    """
    floor = tol * scale
    h0 = spread * max(abs(c_init), 1.0)
    xs = [c_init + h0, c_init - h0, c_init]
    fs = [residual(x) for x in xs]

    for x, f in zip(xs, fs):
        if f == 0.0:
            return EigenResult(c=x, residual_norm=0.0, iterations=0,
                               classification=_classify(x, unstable_tol), k=k)

    n_iter = 0
    while n_iter < max_iter:
        n_iter += 1
        x0, x1, x2 = xs
        f0, f1, f2 = fs
        h1, h2 = x1 - x0, x2 - x1
        if h1 == 0.0 or h2 == 0.0:
            break
        d1 = (f1 - f0) / h1
        d2 = (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = cmath.sqrt(b * b - 4.0 * f2 * a)
        den = b + disc if abs(b + disc) > abs(b - disc) else b - disc
        if den == 0.0:
            step = -f2 / d2 if d2 != 0.0 else h2
        else:
            step = -2.0 * f2 / den
        x3 = x2 + step
        f3 = residual(x3)
        xs = [x1, x2, x3]
        fs = [f1, f2, f3]
        if abs(f3) <= floor and (abs(step) <= 1e-12 * max(abs(x3), 1e-30)
                                 or abs(f3) <= 1e-3 * floor):
            return EigenResult(c=x3, residual_norm=abs(f3) / scale,
                               iterations=n_iter,
                               classification=_classify(x3, unstable_tol), k=k)

    # accept a stagnated iterate whose residual still meets the tolerance
    best = min(zip(xs, fs), key=lambda t: abs(t[1]))
    if abs(best[1]) <= floor:
        return EigenResult(c=best[0], residual_norm=abs(best[1]) / scale,
                           iterations=n_iter,
                           classification=_classify(best[0], unstable_tol), k=k)
    raise NoConvergence(
        f"no root after {n_iter} Muller steps from {c_init} "
        f"(best |residual|/scale = {abs(best[1]) / scale:g})")


def multistart_roots(residual: Callable[[complex], complex],
                     rectangle: tuple[float, float, float, float],
                     grid: int = 5, *, tol: float = 1e-11, scale: float = 1.0,
                     max_iter: int = 40) -> list[complex]:
    """Distinct converged roots inside a rectangle from a seed grid.

    Cross-check companion of :func:`count_roots`: on well-separated zero sets
    the number of distinct roots found from a grid x grid seed array equals
    the winding-number count.
    """
    re0, re1, im0, im1 = rectangle
    found: list[complex] = []
    sep = 1e-6 * max(re1 - re0, im1 - im0)
    for i in range(grid):
        for j in range(grid):
            seed = complex(re0 + (re1 - re0) * (i + 0.5) / grid,
                           im0 + (im1 - im0) * (j + 0.5) / grid)
            try:
                res = find_root(residual, seed, tol=tol, scale=scale,
                                max_iter=max_iter)
            except WindwavesError:
                continue
            c = res.c
            if not (re0 <= c.real <= re1 and im0 <= c.imag <= im1):
                continue
            if all(abs(c - other) > sep for other in found):
                found.append(c)
    return found


def count_roots(residual: Callable[[complex], complex],
                rectangle: tuple[float, float, float, float],
                n_boundary: int = 64, *, max_levels: int = 48,
                zero_floor_rel: float = 1e-13) -> int:
    """Winding number of the residual around a rectangle (root count inside).

    ``rectangle`` is (re_min, re_max, im_min, im_max).  The boundary is walked
    counterclockwise with n_boundary samples per side; any adjacent pair whose
    phase difference exceeds pi/2 is bisected, up to ``max_levels`` of local
    refinement.

    Raises
    ------
    BoundaryZero
        If |residual| at a boundary point falls below the relative floor.
    PhaseJumpUnresolved
        If refinement cannot bring all phase jumps under pi/2.
    """
    re0, re1, im0, im1 = rectangle
    if not (re1 > re0 and im1 > im0):
        raise ValueError("rectangle must have positive extent")

    corners = [complex(re0, im0), complex(re1, im0),
               complex(re1, im1), complex(re0, im1)]
    pts: list[complex] = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        for j in range(n_boundary):
            pts.append(a + (b - a) * (j / n_boundary))
    vals = [residual(z) for z in pts]

    floor = zero_floor_rel * max(abs(v) for v in vals)
    for z, v in zip(pts, vals):
        if abs(v) <= floor:
            raise BoundaryZero(f"|residual({z})| = {abs(v):g} on the contour")

    def phase_jump(u: complex, v: complex) -> float:
        return cmath.phase(v / u)

    total = 0.0
    n = len(pts)
    for i in range(n):
        z0, f0 = pts[i], vals[i]
        z1, f1 = pts[(i + 1) % n], vals[(i + 1) % n]
        stack = [(z0, f0, z1, f1, 0)]
        while stack:
            a, fa, b, fb, depth = stack.pop()
            dphi = phase_jump(fa, fb)
            if abs(dphi) <= 0.5 * math.pi:
                total += dphi
                continue
            if depth >= max_levels:
                raise PhaseJumpUnresolved(
                    f"phase jump {dphi:.3f} rad between {a} and {b} "
                    f"unresolved after {max_levels} levels")
            m = 0.5 * (a + b)
            fm = residual(m)
            if abs(fm) <= floor:
                raise BoundaryZero(f"|residual({m})| = {abs(fm):g} on the contour")
            stack.append((m, fm, b, fb, depth + 1))
            stack.append((a, fa, m, fm, depth + 1))

    winding = total / (2.0 * math.pi)
    count = round(winding)
    if abs(winding - count) > 0.15:
        raise PhaseJumpUnresolved(
            f"non-integer winding number {winding:.4f}")
    return int(count)


def continue_in_epsilon(residual_family: Callable[[float], Callable[[complex], complex]],
                        eps_list: Sequence[float], c_seed: complex, *,
                        tol: float = 1e-11, max_iter: int = 50,
                        scale: float = 1.0, k: Optional[float] = None,
                        dc_deps: Optional[complex] = None) -> list[EigenResult]:
    """Track one eigenvalue branch along an ascending epsilon list.

    The predictor is the asymptotic slope ``dc_deps`` for the first step when
    supplied, then secant extrapolation from the two previous roots; the
    corrector is :func:`find_root`.

    Raises
    ------
    BranchLost
        If the corrector diverges or the branch degenerates.
    """
    eps_list = [float(e) for e in eps_list]
    if any(b <= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly ascending")

    results: list[EigenResult] = []
    roots: list[complex] = []
    guess = c_seed
    for i, eps in enumerate(eps_list):
        if i >= 2:
            slope = (roots[-1] - roots[-2]) / (eps_list[i - 1] - eps_list[i - 2])
            guess = roots[-1] + slope * (eps - eps_list[i - 1])
        elif i == 1:
            base = dc_deps if dc_deps is not None else 0.0
            guess = roots[-1] + base * (eps - eps_list[0])
        try:
            res = find_root(residual_family(eps), guess, tol=tol,
                            max_iter=max_iter, scale=scale, k=k)
        except WindwavesError as exc:
            raise BranchLost(
                f"branch lost at eps={eps:g} (seed {guess}): {exc}") from exc
        if res.classification == DEGENERATE:
            raise BranchLost(f"branch degenerated at eps={eps:g}")
        results.append(res)
        roots.append(res.c)
    return results


@dataclass(frozen=True)
class ScanStrategy:
    """Knobs of a wavenumber sweep."""

    branch: int = +1
    tol: float = 1e-11
    max_iter: int = 60
    rayleigh_tol: float = 1e-10
    #: imaginary seed offset as a multiple of eps * c_sharp (when available)
    seed_fraction: float = 1.0


@dataclass(frozen=True)
class GrowthEntry:
    k: float
    c: complex
    growth_rate: float
    residual_norm: float
    converged: bool
    classification: str
    message: str = ""


@dataclass
class GrowthCurve:
    """Per-wavenumber eigenvalues of one profile + parameter snapshot."""

    entries: list[GrowthEntry]
    metadata: dict = field(default_factory=dict)

    def unstable_ks(self) -> list[float]:
        return [e.k for e in self.entries
                if e.converged and e.classification == UNSTABLE]


def scan_k(profile, params, k_list: Sequence[float],
           strategy: ScanStrategy = ScanStrategy(), *,
           jobs: int = 1) -> GrowthCurve:
    """Solve the quiescent-ocean dispersion relation at every wavenumber.

    Each entry seeds Muller at c_k plus the asymptotic growth offset
    i eps c_sharp when a critical layer exists; failures are recorded in the
    curve without aborting the sweep.  Entries are independent, so they may be
    solved concurrently (``jobs``).
    """
    from .asymptotics import miles_c_sharp
    from .dispersion import ck, make_miles_residual

    ks = [float(k) for k in k_list]
    if not ks or any(k <= 0.0 for k in ks):
        raise ValueError("k_list must be nonempty and positive")

    def solve_one(k: float) -> GrowthEntry:
        try:
            c_k = ck(params, k, strategy.branch)
            seed = complex(c_k)
            try:
                asym = miles_c_sharp(profile, params, k, strategy.branch,
                                     tol=strategy.rayleigh_tol)
                seed = c_k + 1j * strategy.seed_fraction * params.epsilon * \
                    max(asym.c_sharp, 0.0)
            except WindwavesError:
                pass  # no layer or degenerate: seed on the real axis
            residual = make_miles_residual(profile, params, k,
                                           tol=strategy.rayleigh_tol)
            res = find_root(residual, seed, tol=strategy.tol,
                            max_iter=strategy.max_iter, scale=params.g, k=k)
            c = res.c
            if c.imag < 0.0:
                c = c.conjugate()  # report the upper-half representative
            cls = _classify(c, 1e-8)
            return GrowthEntry(k=k, c=c, growth_rate=k * c.imag,
                               residual_norm=res.residual_norm, converged=True,
                               classification=cls)
        except WindwavesError as exc:
            return GrowthEntry(k=k, c=complex("nan"), growth_rate=float("nan"),
                               residual_norm=float("nan"), converged=False,
                               classification=DEGENERATE, message=str(exc))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(solve_one, ks))
    else:
        entries = [solve_one(k) for k in ks]

    order = sorted(range(len(ks)), key=lambda i: ks[i])
    entries = [entries[i] for i in order]
    metadata = {"profile": repr(profile), "params": repr(params),
                "branch": strategy.branch}
    return GrowthCurve(entries=entries, metadata=metadata)
