"""Conservative semi-Lagrangian advection toolkit.

Kernels for Vlasov-type transport in flux form: PSM and LAG face-value
reconstructions expressed through a single Hermite flux formula, four flux
limiters, RK2 predictor-corrector time stepping, and a reduced drift-kinetic
plasma scenario with conservation diagnostics.
"""

from .diagnostics import (
    CSV_COLUMNS,
    DiagnosticsRecord,
    DiagnosticsWriter,
    energies,
    entropy,
    l2_norm,
    mass_4d,
    quality_factor,
    tv_norm_1d,
    tv_norm_plane,
)
from .fields import (
    AdvectionField4D,
    Potential3D,
    build_advection_field,
    discrete_divergence,
    guiding_center_velocities,
    parallel_acceleration,
)
from .flux import (
    CflViolation,
    Displacements,
    FluxVector,
    Scheme,
    advect_profile,
    characteristic_feet,
    hermite_flux,
    primitive_update_oracle,
    sweep,
)
from .limiters import (
    LimiterConfig,
    LimiterKind,
    ent_limit,
    osl_face_values_pair,
    sls_flux,
    umeda_flux,
)
from .mesh import (
    AXIS_NAMES,
    Boundary,
    CellProfile,
    FaceField,
    Field4D,
    Grid1D,
    Grid4D,
    build_grid1d,
    extract_pencils,
    read_snapshot,
    write_snapshot,
)
from .quasineutrality import (
    EquilibriumProfiles,
    QNSolver,
    ion_density,
    make_equilibrium,
    maxwellian_equilibrium,
    qn_solve,
    tanh_profile,
)
from .reconstruction import (
    ParabolaCoefficients,
    TridiagonalFactorization,
    lag_face_values,
    parabola,
    psm_face_values,
)
from .scenarios import (
    ConfigError,
    RunResult,
    ScenarioConfig,
    parse_config,
    run_drift_kinetic_4d,
    run_guiding_center_2d,
    run_scenario,
    run_step1d,
)
from .timestepping import (
    AllVelocitiesZero,
    StepControl,
    compute_dt,
    predictor_corrector_step,
)

__version__ = "0.1.0"
