"""Hyperbolic n-body scattering in blown-up coordinates."""

from ._core import (  # noqa: F401
    BlowupState,
    ChazyParameters,
    CollisionError,
    Direction,
    EquilibriumPoint,
    IntegrateOptions,
    InvalidStateError,
    KeplerOrbit,
    KeplerScattering,
    KernelReport,
    ManifoldParams,
    MassSystem,
    OrbitParameter,
    ScatterOptions,
    ScatterStatus,
    ScatteringDiagnostics,
    ScatteringResult,
    Termination,
    ToleranceSet,
    Trajectory,
    TrajectorySample,
    blowup_energy,
    build_dbar,
    build_dbar_planar,
    chazy_from_manifold,
    dbar_kernel,
    delta_A,
    delta_A_planar,
    detect_equilibrium,
    energy,
    eta_nonplanar,
    extract_manifold_params,
    from_blowup,
    grad_potential,
    hessian_blocks,
    infinity_flow,
    infinity_scattering,
    integrate,
    kepler_embed,
    kepler_scattering,
    kepler_state,
    kepler_system,
    kepler_time,
    linearization_matrix,
    linearized_flow_exact,
    manifold_from_parameter,
    min_pair_distance,
    orbit_parameter,
    perp,
    potential,
    ray_distance,
    run_acceptance_suite,
    scattering_map,
    seed_state,
    series_predict,
    t_from_tau,
    tangential_grad,
    tau_from_t,
    time_reverse_params,
    to_blowup,
    vector_field,
)

__all__ = [name for name in dir() if not name.startswith("_")]
