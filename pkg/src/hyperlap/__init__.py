"""Heat kernels, Green functions and maximal operators on hyperbolic spaces and H-type AN groups."""

from .quadrature import DEFAULT_QUAD, QuadratureError, QuadratureSpec
from .special_fn import (LegendreParams, ball_volume, legendre_q, log_gamma, odd_double_factorial,
                         sphere_area)
from .geometry import (ANPoint, BallSpec, HnPoint, HTypeDescriptor, HTypePoint, an_distance, an_mul,
                       an_volume, ball_contains, hn_distance, hn_volume, hn_volume_sandwich, htype_dilate,
                       htype_mul, kappa, region_volume, vc_volume)
from .kernels import RadialKernelExpr, ckj_table, hc_heat, hn_heat, k2_direct, sl_kernel
from .green import green_hc, green_hn, green_hn_oracle, resolvent_apply_radial, s_epsilon_radial, theta
from .inequalities import f_beta, phi, s_o_solve, thresholds
from .maximal import HalfSpaceGrid, empirical_opnorm, hn_discrete_maximal, lp_norm, maximal_all
from .verify import SUITES, VerificationReport, run_suite

__version__ = "0.1.0"
