"""Linear stability of wind-over-water shear flows.

Computes complex wave speeds of the linearized two-phase interface problem:
Rayleigh-equation impedances (including the singular critical-layer limit),
dispersion-relation residuals, complex root finding, and the small
density-ratio growth asymptotics.
"""

from . import errors
from .errors import *  # noqa: F401,F403
from .profiles import (
    AnalyticProfile,
    ConstantProfile,
    CriticalLayer,
    CriticalLayerSet,
    LinearShearProfile,
    PiecewiseLinearProfile,
    ShearProfile,
    TabulatedProfile,
    TanhProfile,
    evaluate,
    find_critical_points,
    load_tabulated,
)
from .rayleigh import (
    ConvergenceReport,
    LayerJump,
    LimitSolution,
    RayleighSolution,
    RayleighTrace,
    WronskianPath,
    impedance_limit_check,
    integrate_rayleigh,
    integrate_wronskian,
    interface_impedance,
    limiting_solution,
    pwl_impedance_cascade,
    uniform_flow_impedance,
)
from .dispersion import (
    FluidParams,
    KhThreshold,
    PwlClosedForm,
    ShearRoots,
    ck,
    closed_form_shear_roots,
    dn_symbol,
    kh_threshold,
    make_general_residual,
    make_miles_residual,
    pwl_dispersion,
    residual_general,
    residual_miles,
)
from .eigensolver import (
    EigenResult,
    GrowthCurve,
    GrowthEntry,
    ScanStrategy,
    continue_in_epsilon,
    count_roots,
    find_root,
    multistart_roots,
    scan_k,
)
from .asymptotics import (
    LayerContribution,
    MilesAsymptotics,
    StabilityCertificate,
    f_I0,
    miles_c_sharp,
    necessity_certificate,
    unstable_band,
)

__version__ = "0.1.0"
