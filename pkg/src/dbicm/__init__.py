"""Link-level simulation of delayed bit-interleaved coded modulation.

The package covers the full chain: LDPC codes (alist I/O, PEG
construction, belief propagation), Gray QAM and DVB-S2 32APSK mappings,
delay-scheme framing, a-priori-aided soft demapping, the windowed
decoding schedule with forward/backward recursions, and Monte Carlo
BER/FER sweeps with deterministic CSV output. A FastAPI service exposes
the sweep engine over HTTP; the CLI runs locally or as a thin client.
"""

from .channel import awgn, ebn0_to_noise_var, trial_rng
from .constellation import (
    Constellation,
    build_apsk32_dvbs2,
    build_gray_qam,
    map_symbols,
)
from .demapper import demap_no_prior, demap_positions, demap_with_priors
from .framing import (
    DelayScheme,
    TransmissionPlan,
    TransmissionResult,
    spectral_efficiency,
    transmit_stream,
)
from .ldpc import (
    LdpcCode,
    LdpcDecoder,
    bp_decode,
    encode,
    load_alist,
    peg_construct,
    save_alist,
    syndrome,
)
from .schedulers import (
    OpCounters,
    ReceiverConfig,
    SchedulerResult,
    run_bicm,
    run_dbicm_conventional,
    run_dbicm_id,
    run_dbicm_windowed,
    run_genie_bound,
)
from .sweep import (
    SimConfig,
    SweepRecord,
    build_context,
    emit_csv,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Constellation",
    "build_gray_qam",
    "build_apsk32_dvbs2",
    "map_symbols",
    "demap_positions",
    "demap_no_prior",
    "demap_with_priors",
    "LdpcCode",
    "LdpcDecoder",
    "bp_decode",
    "encode",
    "syndrome",
    "load_alist",
    "save_alist",
    "peg_construct",
    "DelayScheme",
    "TransmissionPlan",
    "TransmissionResult",
    "transmit_stream",
    "spectral_efficiency",
    "awgn",
    "ebn0_to_noise_var",
    "trial_rng",
    "OpCounters",
    "ReceiverConfig",
    "SchedulerResult",
    "run_bicm",
    "run_dbicm_conventional",
    "run_dbicm_windowed",
    "run_dbicm_id",
    "run_genie_bound",
    "SimConfig",
    "SweepRecord",
    "build_context",
    "run_sweep",
    "emit_csv",
    "__version__",
]
