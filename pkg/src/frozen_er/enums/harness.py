from enum import StrEnum


class ExperimentName(StrEnum):
    THEOREM1 = "theorem1"
    STATIONARITY_P0 = "stationarity-p0"
    DISCRETE_LIMIT = "discrete-limit"
    COUPLING_P1 = "coupling-p1"
    LYAPUNOV = "lyapunov"
    LEMMA_SUITE = "lemma-suite"
    SPECIAL_ACCURACY = "special-accuracy"
    MARTINGALE = "martingale"
    LIMIT_INVARIANTS = "limit-invariants"
    COALESCENT_RATES = "coalescent-rates"


class KernelFunction(StrEnum):
    """Functions exposed by the `eval` subcommand."""

    P1 = "p1"
    LOG_P1 = "log-p1"
    RATIO = "ratio"
    I1 = "i1"
    I2 = "i2"
    I3 = "i3"
    I1_TRUNC = "i1trunc"
    XMAX = "xmax"
    ORACLE = "oracle"
