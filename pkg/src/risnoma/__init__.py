"""Link-level simulator and analytic outage toolkit for a two-user uplink
NOMA system enabled over-the-air by a hybrid active/passive RIS."""

__version__ = "0.1.0"

from ._kernels import active_backend
from .analytic import (AccuracyError, QfComponent, QuadFormSpec, TermStats,
                       analytic_outage, build_quadform, cf_eval,
                       gil_pelaez_cdf, stats_a, stats_b, stats_c, stats_d,
                       term_statistics)
from .channel import (ChannelRealization, LinkVariances, RandomStream,
                      channel_variance, draw_realization, link_variances,
                      path_loss_db)
from .config import (ConfigError, ConfigWarning, SystemConfig,
                     apply_overrides, db_to_linear, dbm_to_watt, linear_to_db,
                     load_config, parse_config_text, validate, watt_to_dbm)
from .montecarlo import (GammaFit, OutageResult, empirical_moments,
                         estimate_outage, estimate_outage_pair, fit_gamma,
                         rate_to_threshold, sample_link_terms, sample_sinr)
from .optimizer import (OptimizationOutcome, OptimizerSettings, objective_gap,
                        optimize)
from .ris import (HybridRisState, align_phases, alpha_from_power,
                  amplifier_gain, element_output_power, pa_consumption,
                  resolve_alpha, ris_state)
from .sinr import LinkTerms, SinrPair, compute_link_terms, sinr, synthesize_received
from .sweep import (PresetVariant, ResultRow, SweepSpec, determinism_signature,
                    parse_values, preset, run_point, run_preset, run_sweep)
