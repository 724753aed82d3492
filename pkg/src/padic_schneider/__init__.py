"""The p-adic Schneider continued-fraction map and its Lyapunov spectrum."""

from .errors import DomainError, PrecisionExhausted
from .padic_core import PadicInt, Prime, from_rational, haar_sample, rational_valuation, valuation
from .schneider import Convergent, DigitPair, Expansion, Status, convergents, expand, step_padic, step_rational
from .thermo import GibbsSpec, SpectrumPoint, gibbs_weights, spectrum, spectrum_full, spectrum_truncated
from .montecarlo import ExperimentConfig, ExperimentReport, run

__all__ = [
    "Convergent", "DigitPair", "DomainError", "Expansion", "ExperimentConfig", "ExperimentReport",
    "GibbsSpec", "PadicInt", "PrecisionExhausted", "Prime", "SpectrumPoint", "Status",
    "convergents", "expand", "from_rational", "gibbs_weights", "haar_sample", "rational_valuation",
    "run", "spectrum", "spectrum_full", "spectrum_truncated", "step_padic", "step_rational", "valuation",
]
