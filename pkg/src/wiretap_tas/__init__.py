"""Stepwise transmit antenna selection and power control for MIMO wiretap channels."""

from .metrics import SecrecyReport, SinrTerms, secrecy_rate, sinr_eve, sinr_main, sinr_terms
from .model import (
    ChannelPair,
    DegenerateChannelError,
    InvalidSelectionError,
    Precoder,
    ShapeError,
    SystemParams,
    WiretapError,
    generate_channels,
    generate_rayleigh,
    mrt_precoder,
    select_rows,
)
from .selector import (
    RunTrace,
    SelectorConfig,
    init_antenna,
    optimize_power,
    run_exhaustive,
    run_random,
    run_stepwise,
)
from .stepwise import (
    GrowthEval,
    SelectionState,
    alpha_factor,
    eval_candidate,
    extend_state,
    init_state,
)

__version__ = "0.1.0"
