"""Link-level simulator and beamforming optimizer for a two-phase
leader-based relaying protocol in industrial wireless cells.

Phase I: the base station multicasts each group's payload; users that
decode become leaders. Phase II: leaders re-transmit device-to-device so
the remaining users can combine their signals. Beams are designed by
sparse optimization encouraging at least one leader per group.
"""

from .core import (ScaOptions, SinrTarget, SystemConfig, dbm_to_watts,
                   default_config, load_config, min_sinr_target,
                   validate_config, watts_to_dbm)
from .radio import (ChannelSet, Topology, dump_realization, generate_topology,
                    load_realization, sample_channels, sample_interference,
                    sample_realization)
from .conic import ConicProgram, ConicSolution, SocConstraint, check_kkt, solve
from .beamform import (BeamformerSet, ScaTrace, build_subproblem,
                       linearize_penalty, linearize_quadratic, penalty,
                       run_sca, run_sca_single_beam, solve_broadcast)
from .protocol import (PhaseOutcome, broadcast_targets, evaluate_one_phase,
                       evaluate_tdma, evaluate_two_phase,
                       occupy_cow_phase1_target, occupy_cow_phase2_target,
                       one_phase_multicast_targets, phase1_group_targets,
                       phase1_sinr, phase2_group_targets,
                       phase2_sinr_coherent, phase2_sinr_selection,
                       tdma_targets)
from .harness import (ReliabilityReport, SchemeId, SchemeStats, TrialOutcome,
                      run_campaign, run_trial, sweep_message_size,
                      wilson_interval)

__version__ = "0.1.0"
