"""Continuous-time quantum walk toolkit for Markov chain hitting, search,
sampling and mixing, with random-graph spectral statistics."""

__version__ = "0.1.0"

from .algorithms import (CostModel, QSSampOutcome, SearchOutcome, cost_total,
                         qssamp_prepare, spatial_search)
from .chains import (Discriminant, ErgodicityReport, InterpolatedChain,
                     MarkedSet, StationaryDistribution, StochasticMatrix,
                     UMSplit, check_ergodic_reversible, critical_interpolation,
                     discriminant, discriminant_of, interpolate, make_lazy,
                     require_ergodic_reversible, stationary_distribution,
                     stationary_of_interpolated, time_reversal, u_m_split)
from .errors import (ChainStructureError, IllConditionedError,
                     PostSelectionError, QwmixError, StepBudgetExceeded,
                     ValidationError)
from .generators import (lazy_complete_graph, lazy_cycle,
                         random_reversible_chain, rng_from, two_block_chain)
from .gnp import (GnpSample, MixingExponentResult, RmtReport, SemicircleModel,
                  SigmaScalingResult, classical_locations,
                  ks_distance_to_semicircle, mixing_exponent_experiment,
                  rmt_report, sample_gnp, semicircle_cdf, semicircle_pdf,
                  sigma_scaling_experiment)
from .hamiltonian import (EdgeWalkHamiltonian, FullHamiltonian, build_effective,
                          build_full, node_embedding)
from .hitting import (ClassicalMixingReport, ExtendedHittingTimeReport,
                      HittingTimeReport, classical_mixing_time,
                      extended_hitting_time, hitting_time_montecarlo,
                      hitting_time_spectral, interpolated_hitting_time, tv_trace)
from .mixing import (GapMapReport, GapStatistics, LimitingDistribution,
                     MixingTrace, TimeAveragedDistribution,
                     edge_walk_gap_map, edge_walk_limiting_distribution,
                     gap_statistics, limiting_distribution, mixing_time_bound,
                     mixing_trace, phase_average_kernel,
                     time_averaged_distribution)
from .pointer import (CompositeState, PointerConfig, PostSelection,
                      evolve_block, gamma_diagnostics, pointer_zero_amplitude,
                      project_pointer_zero, run_blocks_postselect,
                      uniform_momentum_state)
from .policy import POLICY, NumericPolicy
from .spectral import SpectralDecomposition
