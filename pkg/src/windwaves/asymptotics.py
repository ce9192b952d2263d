"""Small density-ratio expansion of the unstable wave speed.

Near eps = rho+/rho- = 0, the relevant root of the dispersion relation has the
structure c = c_k + O(eps) + i eps c_sharp + o(eps), where the growth constant
c_sharp collects the critical-layer contributions of the limiting Rayleigh
solution:

    c_sharp = -pi f_I(0) sum_j U''(s_j) u1(s_j) / |U'(s_j)|,
    f_I(0)  = (U+(0) - c_k)^2 / (2 c_k |k| tanh(|k| h-)),

with u1 normalized to 1 at the interface.  c_sharp > 0 is the instability
predicate; layers at inflection points contribute nothing.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .dispersion import FluidParams, ck, make_miles_residual
from .eigensolver import count_roots
from .errors import HypothesisViolated, NoCriticalLayer, WindwavesError
from .profiles import CriticalLayerSet, ShearProfile, find_critical_points
from .rayleigh import limiting_solution

__all__ = [
    "MilesAsymptotics",
    "LayerContribution",
    "StabilityCertificate",
    "f_I0",
    "miles_c_sharp",
    "unstable_band",
    "necessity_certificate",
]


def f_I0(profile: ShearProfile, params: FluidParams, k: float,
         branch: int = +1) -> float:
    """Leading derivative of the wave speed w.r.t. the scaled impedance.

    Equals (U+(0) - c_k)^2 / (2 c_k |k| tanh(|k| h-)); odd in the c_k branch.
    """
    c_k = ck(params, k, branch)
    u0 = profile.value(0.0)
    return (u0 - c_k) ** 2 / (2.0 * c_k * abs(k) * params.tanh_minus(k))


@dataclass(frozen=True)
class LayerContribution:
    position: float
    u_prime: float
    u_double_prime: float
    u1: float
    term: float  # -pi f_I0 U'' u1 / |U'|


@dataclass(frozen=True)
class MilesAsymptotics:
    """Growth-constant report for one (profile, params, k, branch)."""

    k: float
    branch: int
    c_k: float
    f_i0: float
    c_sharp: float
    layers: tuple[LayerContribution, ...]
    #: the bracket -c_k sum_j U'' u1 / |U'| whose sign decides instability
    predicate_bracket: float
    sufficient_signs_hold: bool

    @property
    def unstable(self) -> bool:
        return self.c_sharp > 0.0

    def predicted_c(self, eps: float) -> complex:
        """Leading-order unstable wave speed c_k + i eps c_sharp."""
        return self.c_k + 1j * eps * self.c_sharp


def _sufficient_signs_hold(c_k: float, layers: CriticalLayerSet) -> bool:
    m = len(layers)
    vals = [c_k * layer.u_double_prime for layer in layers]
    if any(v > 0.0 for v in vals):
        return False
    strict = [j for j, v in enumerate(vals) if v < 0.0]
    return any(j >= m - 2 for j in strict)


def miles_c_sharp(profile: ShearProfile, params: FluidParams, k: float,
                  branch: int = +1, tol: float = 1e-10) -> MilesAsymptotics:
    """Assemble the growth constant from the limiting Rayleigh solution.

    Runs the limiting solver at c_R = c_k with sign(Im c) = +1, normalizes
    |y|^2 to 1 at the interface and sums the per-layer terms.  When the
    sufficient sign hypotheses (c_k U''(s_j) <= 0, strict at one of the top
    two layers) fail, a warning is issued and the sign of the assembled
    bracket remains the authoritative predicate.

    Raises
    ------
    NoCriticalLayer
        If c_k is outside the range of the wind profile; no unstable speed
        can then bifurcate from c_k at small eps.
    """
    c_k = ck(params, k, branch)
    layers = find_critical_points(profile, c_k)
    if len(layers) == 0:
        raise NoCriticalLayer(
            f"c_k = {c_k:g} outside the range of U: provably no bifurcation "
            "from c_k for small density ratio")

    if not _sufficient_signs_hold(c_k, layers):
        warnings.warn(
            "sufficient sign hypotheses on c_k U'' fail; the assembled "
            "bracket still decides instability", stacklevel=2)

    limit = limiting_solution(profile, k, c_k, +1, tol)
    fi0 = f_I0(profile, params, k, branch)

    contribs = []
    bracket = 0.0
    c_sharp = 0.0
    for layer, jump in zip(layers, limit.jumps):
        base = layer.u_double_prime * jump.u1 / abs(layer.u_prime)
        term = -math.pi * fi0 * base
        bracket += -c_k * base
        c_sharp += term
        contribs.append(LayerContribution(
            position=layer.position, u_prime=layer.u_prime,
            u_double_prime=layer.u_double_prime, u1=jump.u1, term=term))

    return MilesAsymptotics(k=k, branch=branch, c_k=c_k, f_i0=fi0,
                            c_sharp=c_sharp, layers=tuple(contribs),
                            predicate_bracket=bracket,
                            sufficient_signs_hold=_sufficient_signs_hold(c_k, layers))


def unstable_band(profile: ShearProfile, params: FluidParams,
                  k_range: tuple[float, float], n_samples: int = 64,
                  branch: int = +1, tol: float = 1e-10,
                  refine_rel: float = 1e-3) -> list[tuple[float, float]]:
    """Maximal k-intervals where the growth constant is positive.

    Samples c_sharp on a log grid over ``k_range``; a sample where c_k leaves
    the range of U (or the solver fails) counts as stable.  Sign changes are
    bracketed by bisection to relative width ``refine_rel``.
    """
    k_lo, k_hi = k_range
    if not (0.0 < k_lo < k_hi):
        raise ValueError("k_range must be positive and increasing")

    def sharp(k: float) -> float:
        try:
            return miles_c_sharp(profile, params, k, branch, tol).c_sharp
        except WindwavesError:
            return -math.inf

    ks = [k_lo * (k_hi / k_lo) ** (i / (n_samples - 1)) for i in range(n_samples)]
    vals = [sharp(k) for k in ks]

    def refine(a: float, b: float) -> float:
        # bisect the predicate boundary between unstable a and stable b (or
        # vice versa)
        pa = sharp(a) > 0.0
        while (b - a) > refine_rel * a:
            m = math.sqrt(a * b)
            if (sharp(m) > 0.0) == pa:
                a = m
            else:
                b = m
        return math.sqrt(a * b)

    bands: list[tuple[float, float]] = []
    start: Optional[float] = None
    for i, (k, v) in enumerate(zip(ks, vals)):
        pos = v > 0.0
        if pos and start is None:
            start = refine(ks[i - 1], k) if i > 0 else k
        elif not pos and start is not None:
            bands.append((start, refine(ks[i - 1], k)))
            start = None
    if start is not None:
        bands.append((start, ks[-1]))
    return bands


@dataclass(frozen=True)
class StabilityCertificate:
    """Off-axis root count near c_k for a profile without a critical layer."""

    k: float
    epsilon: float
    c_k: float
    margin: float
    search_radius: float
    count_upper: int
    count_lower: int

    @property
    def certified_stable_near_ck(self) -> bool:
        return self.count_upper == 0 and self.count_lower == 0


def necessity_certificate(profile: ShearProfile, params: FluidParams, k: float,
                          epsilon: float, search_radius: float, *,
                          branch: int = +1, n_boundary: int = 48,
                          im_floor: float = 1e-10,
                          rayleigh_tol: float = 1e-10) -> StabilityCertificate:
    """Certify that no off-axis eigenvalue sits near c_k at the given eps.

    Requires c_k outside the range of U, with the search radius capped at a
    quarter of the margin min |c_k - U| (the regime where real-axis
    confinement of nearby eigenvalues is guaranteed).  The certificate runs
    the winding-number count over the two rectangles

        |Re c - c_k| <= radius,  im_floor <= +/- Im c <= radius.

    Raises
    ------
    HypothesisViolated
        If c_k lies in the range of U, or the radius exceeds the margin bound.
    """
    c_k = ck(params, k, branch)
    umin, umax = profile.u_bounds()
    if umin - 1e-12 <= c_k <= umax + 1e-12:
        raise HypothesisViolated(
            f"c_k = {c_k:g} lies in the range of U = [{umin:g}, {umax:g}]")
    margin = min(abs(c_k - umin), abs(c_k - umax))
    # the margin is attained at a range endpoint since c_k is outside [umin, umax]
    if search_radius > 0.25 * margin * (1.0 + 1e-12):
        raise HypothesisViolated(
            f"search radius {search_radius:g} exceeds margin/4 = {0.25 * margin:g}")
    if search_radius <= im_floor:
        raise ValueError("search radius must exceed the imaginary floor")

    scaled = FluidParams(rho_plus=epsilon * params.rho_minus,
                         rho_minus=params.rho_minus, g=params.g,
                         sigma=params.sigma, h_plus=params.h_plus,
                         h_minus=params.h_minus)
    residual = make_miles_residual(profile, scaled, k, tol=rayleigh_tol)

    upper = count_roots(residual, (c_k - search_radius, c_k + search_radius,
                                   im_floor, search_radius), n_boundary)
    lower = count_roots(residual, (c_k - search_radius, c_k + search_radius,
                                   -search_radius, -im_floor), n_boundary)
    return StabilityCertificate(k=k, epsilon=epsilon, c_k=c_k, margin=margin,
                                search_radius=search_radius,
                                count_upper=upper, count_lower=lower)
