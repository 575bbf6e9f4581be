"""Hybrid analog/digital precoder designs under low-resolution phase
shifters and fronthaul-quantized digital precoders, with sphere-decoded
discrete steps, plus the Monte Carlo harness that compares them."""

__version__ = "0.1.0"

from .alphabets import (
    PhaseAlphabet,
    QuantLabelSet,
    build_phase_alphabet,
    build_quant_labels,
    calibrate_delta,
    nearest_label,
    nearest_phase,
)
from .altmin import AltminTrace, analog_step, digital_step, init_analog, run_altmin
from .baselines import SCHEMES, np1_analog_step, np_digital_quantize, run_scheme
from .channel import (
    ChannelTensor,
    FadingParams,
    SystemConfig,
    array_response,
    gen_channel,
    noise_power_dbm,
    pathloss_db,
)
from .fronthaul import (
    FronthaulTrace,
    bisect_mu,
    quantized_digital_step,
    run_fronthaul_altmin,
    subcarrier_power,
)
from .harness import (
    ExperimentSpec,
    ResultRow,
    convergence_trace,
    desk_scale_spec,
    load_spec,
    paper_scale_spec,
    run_experiment,
    write_outputs,
)
from .rates import HybridPrecoder, RateReport, sinr, sum_rate, sum_rate_hybrid
from .sesd import SesdProblem, SesdResult, brute_force_solve, reduce_to_triangular, sesd_solve
from .wmmse import WmmseResult, wmmse_solve

__all__ = [
    "AltminTrace",
    "ChannelTensor",
    "ExperimentSpec",
    "FadingParams",
    "FronthaulTrace",
    "HybridPrecoder",
    "PhaseAlphabet",
    "QuantLabelSet",
    "RateReport",
    "ResultRow",
    "SCHEMES",
    "SesdProblem",
    "SesdResult",
    "SystemConfig",
    "WmmseResult",
    "analog_step",
    "array_response",
    "bisect_mu",
    "brute_force_solve",
    "build_phase_alphabet",
    "build_quant_labels",
    "calibrate_delta",
    "convergence_trace",
    "desk_scale_spec",
    "digital_step",
    "gen_channel",
    "init_analog",
    "load_spec",
    "nearest_label",
    "nearest_phase",
    "noise_power_dbm",
    "np1_analog_step",
    "np_digital_quantize",
    "paper_scale_spec",
    "pathloss_db",
    "quantized_digital_step",
    "reduce_to_triangular",
    "run_altmin",
    "run_experiment",
    "run_fronthaul_altmin",
    "run_scheme",
    "sesd_solve",
    "sinr",
    "subcarrier_power",
    "sum_rate",
    "sum_rate_hybrid",
    "wmmse_solve",
    "write_outputs",
]
