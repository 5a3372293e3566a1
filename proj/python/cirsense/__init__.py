"""CIR-domain WiFi sensing."""

from ._cirsense import (
    AlignmentResult,
    Channel,
    CirSeries,
    CirsenseError,
    DominoResult,
    SystemConfig,
    clean_channel,
    read_trace,
    recover_cir,
    respiration_rate,
    run,
    synthesize,
    target_distance,
    write_synthetic,
)

__all__ = [
    "AlignmentResult",
    "Channel",
    "CirSeries",
    "CirsenseError",
    "DominoResult",
    "SystemConfig",
    "clean_channel",
    "read_trace",
    "recover_cir",
    "respiration_rate",
    "run",
    "synthesize",
    "target_distance",
    "write_synthetic",
]
