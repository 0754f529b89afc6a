"""Projected ensembles of charge-conserving qubit dynamics.

Simulates U(1)-symmetric brickwork circuits, builds projected ensembles
under configurable measurement bases, constructs the universal target
ensembles they converge to (Haar, direct-sum, Scrooge, generalized
Scrooge), and quantifies convergence by moment-operator trace distances.
"""
from .sectors import (
    ChargeDistribution,
    SectorTable,
    alternating_excitation_probs,
    bath_charge_distribution,
    binary_entropy_base2,
    binary_entropy_nats,
    binomial,
    delta_distribution,
    equilibrium_distribution,
    posterior_charge_distribution,
    product_state_charge_distribution,
    sector_prior,
    sector_table,
)
from .simulator import (
    StateVector,
    U1Gate,
    apply_single_qubit_gate,
    apply_two_qubit_gate,
    brickwork_step,
    charge_distribution_of_state,
    frame_unitary,
    haar_random_sector_state,
    haar_unitary,
    prepare_bitstring_state,
    prepare_theta_state,
    random_u1_gate,
    rotate_measurement_frame,
)
from .ensembles import (
    MomentOperator,
    ProjectedEnsemble,
    conditional_variance,
    moment,
    project,
    reduced_density_matrix,
)
from .targets import (
    TargetSpec,
    direct_sum_moment,
    finite_n_rho,
    gse_moment_analytic,
    gse_moment_exact,
    gse_moment_mc,
    gse_rho_bar,
    haar_moment,
    scrooge_moment_exact,
    scrooge_moment_mc,
    scrooge_sample,
    scrooge_states,
    sector_haar_moment,
    symmetric_projector,
    type_vectors,
    type_weight_exact,
    type_weight_mc,
    type_weight_replica_x,
    type_weight_replica_z,
    xbasis_scrooge_rho,
)
from .metrics import TimeSeries, exponential_fit, plateau_average, power_fit, trace_distance
from .harness import (
    ExperimentConfig,
    run_experiment,
    run_scaling_sweep,
    verify_replica,
    verify_theorem1,
)

__version__ = "0.1.0"
