"""adaptfft: a self-optimizing FFT library and experiment harness.

Problems are loops of DFTs over strided buffers; a dynamic-programming
planner composes plan nodes (generated codelets, Cooley-Tukey steps,
Rader, Bluestein, loops, copies) and picks the cheapest by a cost model
or by measurement.
"""

from .estimator import FFTTransformer
from .oracle import FORWARD, naive_dft, naive_dft_reference, reference_dft, rel_l2_error, tolerance
from .planner import Planner, PlannerConfig, WisdomError, fft, ifft
from .plans import ExecContext, PlanError, apply, estimate_cost, instantiate
from .problem import BACKWARD, DftProblem, IoDim, Signature, contiguous_problem, problem_normalize
from .selftest import SelfTestReport, self_test

__version__ = "0.1.0"

__all__ = [
    "BACKWARD",
    "FORWARD",
    "DftProblem",
    "ExecContext",
    "FFTTransformer",
    "IoDim",
    "PlanError",
    "Planner",
    "PlannerConfig",
    "SelfTestReport",
    "Signature",
    "WisdomError",
    "apply",
    "contiguous_problem",
    "estimate_cost",
    "fft",
    "ifft",
    "instantiate",
    "naive_dft",
    "naive_dft_reference",
    "problem_normalize",
    "reference_dft",
    "rel_l2_error",
    "self_test",
    "tolerance",
]
