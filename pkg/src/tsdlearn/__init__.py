"""Discrete-time spiking network simulation with the triple-spike-driven
online supervised learning rule and baseline rules."""

from .intervals import (
    IntervalKind,
    TripleUnit,
    classify_atis,
    label_input_spikes,
    resolve_prev_boundary,
    select_window,
    window_stream,
)
from .rules import (
    OfflineWhRule,
    ResumeParams,
    ResumeRule,
    StdpParams,
    StdpRule,
    TsdParams,
    TsdRule,
    TstdpParams,
    TstdpRule,
    alpha_sign,
    make_rule,
    offline_wh_epoch,
    resume_update,
    stdp_pair,
    tsd_update,
    tstdp_triplet,
)
from .spikes import (
    KernelSpec,
    SpikeTrain,
    TimeGrid,
    correlation_c,
    filter_train,
    generate_poisson_train,
    kernel_eval,
)
from .srm import InputDrive, Network, SimTrace, SrmParams, potential_at, simulate
from .trainer import BestTracker, EpochRecord, ExperimentConfig, ExperimentResult, run_epoch, train, tune_lr

__version__ = "0.1.0"
