"""Interference alignment toolkit for single-antenna X networks."""

from .alignment import (SubspacePair, build_subspace_pair, check_containment, lemma1_matrix,
                        numeric_rank)
from .channel import ChannelProcess, ExtendedChannel, extend, random_extension, sample_channel
from .delay import DelaySchedule, simulate, throughput, validate_delays
from .estimators import PartialAlignment, PerfectAlignment
from .exceptions import (ConfigError, DegeneracyError, HorizonError, InputError, ParameterError,
                         RankFailureError, ScheduleError, StateError, XNetError)
from .link import LinkTrial, dof_slope, rate_curve, sum_rate, transmit_receive, zf_decode
from .outerbound import (DofRegionSpec, LinearProgram, max_total_dof, mimo_innerbound_formula,
                         region_constraints, solve_lp, total_dof_bound)
from .relay import RelayTopology, compose_two_hop, relay_dof
from .schemes import (AlignmentReport, BeamformingPlan, achieved_dof, build_2xm_reciprocal,
                      build_general, build_mx2, compute_zero_forcing, verify_plan)

__version__ = "0.1.0"
