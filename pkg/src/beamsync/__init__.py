"""Beam-swept multi-transmitter synchronization bursts: synthesis under
strong co-channel interference, least-squares channel/scaling estimation,
separate and cross-preamble ML CFO estimation, estimation bounds and an
iterative interference-cancelling joint algorithm, plus a deterministic
Monte-Carlo harness."""

from .baselines import (CpWrapConfig, autocorr_split_burst, autocorr_split_cfo,
                        cp_blind_cfo, cp_wrap_preamble, synthesize_cp_burst,
                        weighted_average_cfo)
from .bounds import CrlbReport, aggregate_sinr, crlb_cfo, fisher_numeric, lemma_mean_fn
from .burstio import load_burst, save_burst
from .errors import (BeamsyncError, BurstIOError, ConfigError,
                     DegenerateStatisticError, ParameterError,
                     RankDeficiencyError, StepInstabilityError, WindowError)
from .estimators import (CorrelationGrid, DesignMatrix, build_design_matrix,
                         compute_grid, correlation_statistic,
                         cross_preamble_cfo, estimate_channel, estimate_mu,
                         log_likelihood, matched_statistic_mean,
                         noise_variance, noise_variance_grid,
                         profiled_log_likelihood, scenario_sigma_c,
                         separate_cfo)
from .harness import (MetricsRow, SweepSpec, crlb_rows, emit_csv,
                      read_csv_rows, run_sweep, run_trial)
from .joint import EstimationResult, joint_estimate, sic_residual, zero_estimates
from .kernels import backend_name
from .sequences import (TrainingSequence, autocorrelation, cross_correlate,
                        default_family, dirichlet_magnitude, estimate_sigma_c,
                        generate_zc, matched_correlation_model)
from .synthesis import (GroundTruth, PreambleSpec, ReceivedBurst,
                        ScenarioConfig, assemble_preamble, calibrate_sinr,
                        draw_ground_truth, fig2_default, substream,
                        synthesize_burst)

__version__ = "0.1.0"
