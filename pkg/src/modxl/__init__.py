"""Modular XL-array beam patterns, near-field channels and user grouping."""

from .beamforming import (CSI, BeamformerSpec, GroupSinrReport, Scheme,
                          beamform, combiner, correlation, perfect_csi_sinr,
                          sinr, sum_rate)
from .channel import (DiskLayout, LineLayout, PathParams, ScenarioConfig,
                      UserChannel, los_gain, nlos_gain, sample_paths,
                      sample_scenario, synth_channels)
from .config import RunConfig, load_run_config
from .errors import ConfigError, DegenerateGeometryError, DomainError
from .geometry import (ApertureMetrics, ArrayGeometry, FieldRegion,
                       PolarLocation, aperture_metrics, classify_region,
                       element_distance, element_position, module_angle_sine,
                       module_distance)
from .beampattern import (PatternVariant, ResolutionReport, distance_pattern,
                      distance_resolution, find_half_power,
                      grating_lobe_directions, half_power_distance,
                      pattern, pattern_ff_ff, pattern_nf_ff, pattern_nf_nf,
                      resolution_report)
from .response import (ArrayResponse, ResponseModel, SteeringKernel, kernel_b,
                       kernel_e, kernel_p, response_nusw,
                       response_subarray_common, response_subarray_distinct,
                       response_upw, response_usw)
from .scheduler import (GroupingAssignment, brute_force_grouping,
                        evaluate_grouping, greedy_grouping, random_grouping)
from .special import dirichlet_kernel, fresnel

__version__ = "0.1.0"
