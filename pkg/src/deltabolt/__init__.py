"""Velocity-grid Boltzmann solver with an angle-concentrated collision kernel.

The kernel couples scattering angle to relative speed, so each collision
pair contributes a single circle of outcomes; the package provides the
collision geometry, the gain/loss operators on a cubic velocity grid, the
weak Landau comparison, randomized inequality verification suites, and a
positivity-preserving time integrator, all behind one CLI.
"""

from .collision import QuadratureSpec, q_gain, q_loss, q_total, weak_form_q, weak_form_q_batch
from .geometry import CollisionPair, ScatteringFrame, azimuthal_moments, frame_of, post_collision, sigma_of, u_plus_minus
from .grid import (
    Distribution,
    GridSpec,
    MomentReport,
    boundary_mass,
    interpolate,
    llogl_norm,
    lp_norm,
    matched_maxwellian,
    maxwellian,
    moments,
    truncate_ball,
)
from .integrator import MonitorBreach, SimulationConfig, TimeSeriesRecord, conservation_correct, lp_ceiling, run, step
from .kernel import KernelParams, beta_k_closed, m_eps, mu_eps, theta_eps, total_rate
from .landau import GrazingGapRecord, fit_gap_slope, grazing_gap, weak_form_ql, weak_form_ql_parts
from .bounds import (
    RadialProfile,
    VerificationRecord,
    check_convolution_bound,
    check_lloglsplit,
    check_radial_gain_bound,
    check_young,
    radial_rearrangement,
    run_suite,
)
from .snapshot import read_snapshot, write_snapshot

__version__ = "0.1.0"
