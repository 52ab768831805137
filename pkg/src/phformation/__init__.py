"""Distance-based formation control with collision avoidance for
port-Hamiltonian multi-agent systems: graph construction, barrier-potential
controllers, a guarded RK4 simulator, and verification tooling."""

from .backend import active_backend
from .controllers import (
    CONTROLLERS,
    BarrierViolation,
    EdgeGains,
    SafetyParams,
    VelocityTrackingGains,
    barrier_gradient,
    barrier_potential,
    baseline_quadratic_input,
    closed_loop_hamiltonian,
    combined_input,
    edge_error,
    edge_error_rate,
    formation_input,
    velocity_tracking_input,
)
from .dynamics import (
    AgentParams,
    AgentState,
    SystemState,
    agent_hamiltonian,
    momentum_gradient,
    open_loop_vector_field,
    total_kinetic_energy,
)
from .graph import (
    FormationGraph,
    IncidenceMatrix,
    build_tournament_graph,
    custom_graph,
    edge_endpoints,
    incidence_matrix,
    matrix_rank,
    verify_full_column_rank,
)
from .integrator import IntegratorConfig, SimulationAbort, integrate, rk4_step
from .scenario import (
    Scenario,
    ScenarioError,
    bundled_config_names,
    load_bundled_scenario,
    load_scenario,
    load_scenario_file,
)
from .sim import (
    RunReport,
    SweepReport,
    compute_metrics,
    randomized_safety_sweep,
    run,
    verify_energy_decay,
)
from .trajectory import TrajectoryLog

__version__ = "0.1.0"
