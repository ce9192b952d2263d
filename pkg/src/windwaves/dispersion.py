"""Dispersion-relation residuals whose zeros are eigenvalues -ikc.

Three routes are provided:

* ``residual_miles``: the quiescent-ocean relation coupling the interface
  impedance y'(0)/y(0) of the air column to the wave speed,

      g(1-eps) + sigma k^2/rho-  =  -eps (U+(0)-c)^2 y'(0)
          + c^2 |k| tanh(|k| h-) + eps U+'(0)(U+(0)-c)
          + eps c |k| U+(0)(1-tanh^2(|k| h-)) / (tanh(|k| h+) + eps tanh(|k| h-)).

* ``residual_general``: the full two-fluid single-mode relation allowing a
  vortex sheet (U+(0) != U-(0)), a moving ocean and surface tension, under the
  normalization ik z = 1.  Both fluid columns reduce to homogeneous Rayleigh
  solves after absorbing the harmonic sheet potential.

* closed forms: the uniform-stream (Kelvin-Helmholtz) quadratic with its onset
  threshold, the constant-shear quadratic, and the piecewise-linear cubic with
  its rational impedance -k (c-alpha)/(c-beta).

All residuals are returned dimensional; root finders divide by g to make the
tolerance dimensionless.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import IncompatibleDepths, RequiresSurfaceTension
from .profiles import PiecewiseLinearProfile, ShearProfile
from .rayleigh import interface_impedance

__all__ = [
    "FluidParams",
    "KhThreshold",
    "ShearRoots",
    "PwlClosedForm",
    "dn_symbol",
    "ck",
    "residual_miles",
    "make_miles_residual",
    "residual_general",
    "make_general_residual",
    "kh_threshold",
    "closed_form_shear_roots",
    "pwl_dispersion",
]


@dataclass(frozen=True)
class FluidParams:
    """Densities, gravity, surface tension and the two column depths (SI).

    ``tanh(|k| h)`` is taken as 1 for an unbounded column.  The derived ratio
    ``epsilon`` = rho_plus / rho_minus must lie in (0, 1): the air is lighter
    than the water.
    """

    rho_plus: float
    rho_minus: float
    g: float
    sigma: float = 0.0
    h_plus: float = math.inf
    h_minus: float = math.inf

    def __post_init__(self):
        if not (0.0 < self.rho_plus < self.rho_minus):
            raise ValueError("need 0 < rho_plus < rho_minus")
        if self.sigma < 0.0:
            raise ValueError("surface tension must be nonnegative")
        if self.g <= 0.0:
            raise ValueError("gravity must be positive")
        if self.h_plus <= 0.0 or self.h_minus <= 0.0:
            raise ValueError("depths must be positive (inf allowed)")

    @property
    def epsilon(self) -> float:
        return self.rho_plus / self.rho_minus

    def tanh_plus(self, k: float) -> float:
        return 1.0 if math.isinf(self.h_plus) else math.tanh(abs(k) * self.h_plus)

    def tanh_minus(self, k: float) -> float:
        return 1.0 if math.isinf(self.h_minus) else math.tanh(abs(k) * self.h_minus)


def dn_symbol(params: FluidParams, k: float, side: str = "combined") -> float:
    """Dirichlet-Neumann symbol |k| tanh(|k| h) per side, or the rho-weighted sum."""
    if k == 0.0:
        raise ValueError("wavenumber k must be nonzero")
    ak = abs(k)
    if side == "+":
        return ak * params.tanh_plus(k)
    if side == "-":
        return ak * params.tanh_minus(k)
    if side == "combined":
        return (ak * params.tanh_plus(k) / params.rho_plus
                + ak * params.tanh_minus(k) / params.rho_minus)
    raise ValueError("side must be '+', '-' or 'combined'")


def ck(params: FluidParams, k: float, branch: int = +1) -> float:
    """Phase speed of the capillary-gravity wave beneath vacuum (eps = 0)."""
    if k == 0.0:
        raise ValueError("wavenumber k must be nonzero")
    if branch not in (+1, -1):
        raise ValueError("branch must be +1 or -1")
    ak = abs(k)
    val = math.sqrt((params.g + params.sigma * k * k / params.rho_minus)
                    / (ak * params.tanh_minus(k)))
    return branch * val


def residual_miles(c: complex, impedance: complex, params: FluidParams,
                   k: float, u0: float, up0: float) -> complex:
    """Quiescent-ocean dispersion residual; zero iff -ikc is an eigenvalue.

    Parameters
    ----------
    c : complex
        Trial wave speed.
    impedance : complex
        y'(0) of the air column under the normalization y(0) = 1.
    u0, up0 : float
        Wind speed and shear at the interface, U+(0) and U+'(0).
    """
    eps = params.epsilon
    ak = abs(k)
    tm = params.tanh_minus(k)
    tp = params.tanh_plus(k)
    return (params.g * (1.0 - eps) + params.sigma * k * k / params.rho_minus
            + eps * (u0 - c) ** 2 * impedance
            - c * c * ak * tm
            - eps * up0 * (u0 - c)
            - eps * c * ak * u0 * (1.0 - tm * tm) / (tp + eps * tm))


def _check_depth_consistency(profile: ShearProfile, params: FluidParams) -> None:
    hp, ha = params.h_plus, profile.h_plus
    if math.isinf(hp) != math.isinf(ha) or (
            math.isfinite(hp) and abs(hp - ha) > 1e-9 * max(1.0, hp)):
        raise ValueError(
            f"air depth mismatch: params.h_plus={hp} vs profile.h_plus={ha}")


def make_miles_residual(profile: ShearProfile, params: FluidParams, k: float,
                        tol: float = 1e-10,
                        impedance_fn: Optional[Callable[[complex], complex]] = None,
                        ) -> Callable[[complex], complex]:
    """Wire the air-column impedance into the quiescent-ocean residual.

    ``impedance_fn`` overrides the default dispatch (closed forms for
    vorticity-free and unbounded piecewise profiles, the ODE otherwise).
    """
    _check_depth_consistency(profile, params)
    u0 = profile.value(0.0)
    up0 = profile.slope(0.0)
    if impedance_fn is None:
        impedance_fn = lambda c: interface_impedance(profile, k, c, tol)

    def residual(c: complex) -> complex:
        return residual_miles(c, impedance_fn(c), params, k, u0, up0)

    return residual


# ---------------------------------------------------------------------------
# General two-fluid residual (vortex sheet + moving ocean)
# ---------------------------------------------------------------------------

def residual_general(c: complex, params: FluidParams, k: float,
                     u_plus: ShearProfile,
                     u_minus: Optional[ShearProfile] = None,
                     tol: float = 1e-10) -> complex:
    """Full single-mode residual of the linearized two-fluid problem.

    The interface amplitude is normalized to ik z = 1.  ``u_minus`` follows
    the mirrored-column convention: it is a profile of the water speed as a
    function of depth below the interface (so the physical shear at the
    interface is -u_minus.slope(0)).  ``None`` means quiescent water.

    The sheet potential gamma is harmonic, so adding its vertical derivative
    to Y2 homogenizes both column problems; each column then needs only the
    standard Rayleigh solve from its wall:

        Y2'(0)|air   = imp_air  * (U+(0) - c) - k^2 gamma+(0)
        Y2'(0)|water = imp_water* (U-(0) - c) - k^2 gamma-(0)

    with imp_water = |k| tanh(|k| h-) for vorticity-free water (the explicit
    column solution) and a mirrored two-parameter shoot otherwise.

    Raises
    ------
    IncompatibleDepths
        If a column with interior vorticity is unbounded (no wall to shoot
        from).
    """
    _check_depth_consistency(u_plus, params)
    if u_minus is not None and not u_minus.zero_curvature:
        hm = u_minus.h_plus
        if math.isinf(hm) != math.isinf(params.h_minus) or (
                math.isfinite(hm) and abs(hm - params.h_minus) > 1e-9 * max(1.0, hm)):
            raise ValueError("water depth mismatch between profile and params")

    ak = abs(k)
    rp, rm = params.rho_plus, params.rho_minus
    tp, tm = params.tanh_plus(k), params.tanh_minus(k)
    u0p = u_plus.value(0.0)
    up0p = u_plus.slope(0.0)
    u0m = u_minus.value(0.0) if u_minus is not None else 0.0
    # mirrored convention: d/dx2 = -d/d(depth) at the interface
    up0m = -u_minus.slope(0.0) if u_minus is not None else 0.0

    denom = rm * tp + rp * tm
    gamma0_p = rm * (u0m - u0p) / (ak * denom)
    gamma0_m = rp * (u0m - u0p) / (ak * denom)
    dgamma0_p = -ak * tp * gamma0_p
    dgamma0_m = ak * tm * gamma0_m
    mean_u = (rp * u0p * tm + rm * u0m * tp) / denom
    y2_0 = mean_u - c

    # air column
    if not math.isfinite(params.h_plus) and not (
            u_plus.zero_curvature
            or isinstance(u_plus, PiecewiseLinearProfile)):
        raise IncompatibleDepths("unbounded air column with interior vorticity")
    imp_air = interface_impedance(u_plus, k, c, tol)
    y2p_air = imp_air * (u0p - c) - k * k * gamma0_p

    # water column
    if u_minus is None or u_minus.zero_curvature:
        y2p_water = ak * tm * y2_0
    else:
        if not math.isfinite(params.h_minus):
            raise IncompatibleDepths("unbounded water column with interior vorticity")
        y2p_water = _sheared_water_flux(u_minus, params, k, c, gamma0_m, y2_0, tol)

    bracket = (-(rp * (u0p - c) * y2p_air - rm * (u0m - c) * y2p_water)
               + (rp * up0p - rm * up0m) * y2_0
               - k * k * (u0p - u0m) * rp * gamma0_p
               + rp * up0p * dgamma0_p - rm * up0m * dgamma0_m)
    return params.g * (rm - rp) + params.sigma * k * k - bracket


def _sheared_water_flux(w: ShearProfile, params: FluidParams, k: float,
                        c: complex, gamma0_m: complex, y2_0: complex,
                        tol: float) -> complex:
    """Y2'(0) for a sheared water column by a mirrored homogeneous shoot.

    In the depth variable xi = -x2 the auxiliary field W = Y2 + dgamma/dx2
    solves the Rayleigh equation with profile w(xi); the wall data combine the
    bottom condition on Y2 with the sheet potential's wall trace.
    """
    from scipy.integrate import solve_ivp

    hm = w.h_plus
    ak = abs(k)
    sech = 0.0 if math.isinf(params.h_minus) else 1.0 / math.cosh(ak * params.h_minus)
    gamma_wall = gamma0_m * sech

    def rhs(xi, v):
        q = w.curvature(xi) / (w.value(xi) - c) + k * k
        return [v[1], q * v[0]]

    # basis solutions with wall data (1, 0) and (0, 1) in the xi variable
    sol = solve_ivp(rhs, (hm, 0.0), np.array([1.0, 0.0], dtype=complex),
                    method="DOP853", rtol=tol, atol=tol * 1e-3)
    v1 = sol.y[:, -1]
    sol = solve_ivp(rhs, (hm, 0.0), np.array([0.0, 1.0], dtype=complex),
                    method="DOP853", rtol=tol, atol=tol * 1e-3)
    v2 = sol.y[:, -1]

    # wall data in xi: W(hm) = A (unknown), dW/dxi(hm) = +k^2 gamma_wall
    # (Y2' = 0 at the wall in x2, and d/dx2 = -d/dxi)
    wp_wall = -(k * k) * gamma_wall  # in xi variable: dW/dxi = -dW/dx2
    w_from_A = v1
    w_fixed = wp_wall * v2
    # interface value in x2: W(0) = Y2(0) + dgamma/dx2(0) = y2_0 + |k| tm gamma0_m
    target = y2_0 + ak * params.tanh_minus(k) * gamma0_m
    a_coef = (target - w_fixed[0]) / w_from_A[0]
    w_xi0 = a_coef * w_from_A[1] + w_fixed[1]
    # back to x2: dW/dx2 = -dW/dxi; Y2'(0) = W'(0)|x2 - k^2 gamma-(0)
    return -w_xi0 - k * k * gamma0_m


def make_general_residual(params: FluidParams, k: float, u_plus: ShearProfile,
                          u_minus: Optional[ShearProfile] = None,
                          tol: float = 1e-10) -> Callable[[complex], complex]:
    return lambda c: residual_general(c, params, k, u_plus, u_minus, tol)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KhThreshold:
    """Kelvin-Helmholtz onset: the slowest unstable uniform wind."""

    u0_min: float
    k_crit: float

    @property
    def wavelength(self) -> float:
        return 2.0 * math.pi / self.k_crit


def kh_threshold(params: FluidParams, k_lo: float = 1e-3, k_hi: float = 1e6,
                 iters: int = 200) -> KhThreshold:
    """Minimize over k the uniform wind speed at marginal KH stability.

    The marginal curve is U0^2(k) = (rho+ + rho-)/(rho+ rho-) *
    [g (rho- - rho+)/k + sigma k], unimodal in k for sigma > 0; the minimum is
    located by golden-section search on log k.
    """
    if params.sigma <= 0.0:
        raise RequiresSurfaceTension(
            "sigma = 0: every positive wind is unstable at large k")

    rp, rm = params.rho_plus, params.rho_minus
    pref = (rp + rm) / (rp * rm)

    def u0_sq(lk: float) -> float:
        kk = math.exp(lk)
        return pref * (params.g * (rm - rp) / kk + params.sigma * kk)

    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = math.log(k_lo), math.log(k_hi)
    c1 = b - phi * (b - a)
    c2 = a + phi * (b - a)
    f1, f2 = u0_sq(c1), u0_sq(c2)
    for _ in range(iters):
        if b - a < 1e-14:
            break
        if f1 < f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - phi * (b - a)
            f1 = u0_sq(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + phi * (b - a)
            f2 = u0_sq(c2)
    lk = 0.5 * (a + b)
    return KhThreshold(u0_min=math.sqrt(u0_sq(lk)), k_crit=math.exp(lk))


@dataclass(frozen=True)
class ShearRoots:
    """Roots of the constant-shear (vortex sheet + uniform vorticity) quadratic."""

    c_plus: complex
    c_minus: complex
    stable: bool

    def __iter__(self):
        return iter((self.c_plus, self.c_minus))


def closed_form_shear_roots(u0: float, mu: float, params: FluidParams,
                            k: float, im_tol: float = 1e-12) -> ShearRoots:
    """Wave speeds for U+ = u0 + mu x2 over quiescent deep water (h = inf).

        g(1-eps) + sigma k^2/rho- = eps (u0-c)^2 |k| + eps mu (u0-c) + c^2 |k|

    Stability holds iff both roots are real.
    """
    eps = params.epsilon
    ak = abs(k)
    a = (1.0 + eps) * ak
    b = -2.0 * eps * ak * u0 - eps * mu
    c0 = (eps * ak * u0 * u0 + eps * mu * u0
          - params.g * (1.0 - eps) - params.sigma * k * k / params.rho_minus)
    disc = b * b - 4.0 * a * c0
    sq = cmath.sqrt(complex(disc))
    r1 = (-b + sq) / (2.0 * a)
    r2 = (-b - sq) / (2.0 * a)
    if r1.real < r2.real:
        r1, r2 = r2, r1
    stable = abs(r1.imag) <= im_tol and abs(r2.imag) <= im_tol
    return ShearRoots(c_plus=r1, c_minus=r2, stable=stable)


@dataclass(frozen=True)
class PwlClosedForm:
    """Cubic dispersion polynomial of the shear-then-uniform wind ramp.

    With sigma = 0 and both columns unbounded, the ramp's rational impedance
    y'(0) = -k (c-alpha)/(c-beta) turns the dispersion relation into

        f(c, eps) = (c - sqrt(g/k)) (c^2 - eps mu c / k - g(1-eps)/k)
                    + eps c^2 (c - alpha) = 0.
    """

    mu: float
    x2_star: float
    k: float
    g: float
    epsilon: float
    u_star: float
    alpha: float
    beta: float
    #: cubic coefficients, highest power first
    coeffs: tuple[float, float, float, float]

    def f(self, c: complex, eps: Optional[float] = None) -> complex:
        eps = self.epsilon if eps is None else eps
        gamma0 = math.sqrt(self.g / self.k)
        return ((c - gamma0) * (c * c - eps * self.mu * c / self.k
                                - self.g * (1.0 - eps) / self.k)
                + eps * c * c * (c - self.alpha))

    def impedance(self, c: complex) -> complex:
        return -self.k * (c - self.alpha) / (c - self.beta)


@dataclass(frozen=True)
class PwlDispersion:
    cubic: PwlClosedForm
    roots: tuple[complex, complex, complex]

    @property
    def impedance_fn(self) -> Callable[[complex], complex]:
        return self.cubic.impedance


def pwl_dispersion(mu: float, x2_star: float, params: FluidParams, k: float,
                   epsilon: Optional[float] = None) -> PwlDispersion:
    """Cubic analysis of the piecewise-linear ramp profile.

    Requires sigma = 0 and unbounded columns.  Roots come from the companion
    matrix of the cubic, polished by two Newton steps (robust near the eps = 0
    double root at sqrt(g/k)).
    """
    if params.sigma != 0.0:
        raise ValueError("the ramp closed form requires sigma = 0")
    if not (math.isinf(params.h_plus) and math.isinf(params.h_minus)):
        raise ValueError("the ramp closed form requires unbounded columns")
    if mu <= 0.0 or x2_star <= 0.0:
        raise ValueError("need mu > 0 and x2_star > 0")
    eps = params.epsilon if epsilon is None else float(epsilon)

    ak = abs(k)
    u_star = mu * x2_star
    e2 = math.exp(-2.0 * ak * x2_star)
    alpha = u_star - mu / (2.0 * ak) * (1.0 + e2)
    beta = u_star - mu / (2.0 * ak) * (1.0 - e2)
    gamma0 = math.sqrt(params.g / ak)
    gk = params.g / ak

    a3 = 1.0 + eps
    a2 = -(eps * mu / ak + gamma0 + eps * alpha)
    a1 = -gk * (1.0 - eps) + gamma0 * eps * mu / ak
    a0 = gamma0 * gk * (1.0 - eps)
    coeffs = (a3, a2, a1, a0)

    closed = PwlClosedForm(mu=mu, x2_star=x2_star, k=ak, g=params.g,
                           epsilon=eps, u_star=u_star, alpha=alpha, beta=beta,
                           coeffs=coeffs)

    roots = np.roots(coeffs)
    dpoly = np.polyder(np.array(coeffs))
    polished = []
    for r in roots:
        for _ in range(2):
            fp = np.polyval(dpoly, r)
            if fp != 0.0:
                r = r - np.polyval(np.array(coeffs), r) / fp
        polished.append(complex(r))
    polished.sort(key=lambda z: (round(z.real, 12), z.imag))
    return PwlDispersion(cubic=closed, roots=tuple(polished))
