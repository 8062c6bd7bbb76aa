"""Simulator for non-classical light in SSH photonic lattices with movable
topological domain walls."""

__version__ = "0.1.0"

from .lattice import (BendProfile, CouplingSchedule, DistanceModel, LatticeSpec,
                      apply_disorder, bend_profile, build_ssh,
                      calibrate_distance_model, coupling_from_distance,
                      merge_split_schedule, move_schedule, solve_profile_params,
                      wall_sites)
from .spectral import SpectralResult, band_sweep, diagonalize, locate_gap_states
from .states import (CorrelationTensor, GaussianMoments, InitialState,
                     init_coherent, init_single_photon, init_sq_vacuum,
                     init_two_mode_sq, wick_g2)
from .evolution import (ObservablePlan, Propagator, QuadratureRequest, Trajectory,
                        evolve_g2, evolve_moments, run, step_unitary)
from .observables import (g2_entry, min_variance_phase, photon_number,
                          quadrature_variance, squeezing_db, transmission,
                          two_mode_quadrature_variance)
from .config import ExperimentConfig, load_config, preset
from .protocols import (beamsplitter_experiment, disorder_ensemble,
                        optimize_slope, transport_experiment)

__all__ = [name for name in dir() if not name.startswith("_")]
