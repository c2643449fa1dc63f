"""Neural-activation-prior OOD scoring (C++ core)."""

from ._napood import (
    ArgumentError,
    DataError,
    FormatError,
    IoError,
    NapoodError,
    ash_score,
    auroc,
    channel_max,
    channel_mean,
    combine_geometric,
    combine_multilayer,
    energy_score,
    fpr_at_tpr,
    load_manifest,
    msp_score,
    nap_former_score,
    nap_score,
    react_score,
    read_tensor,
    reference_weight,
    roc_curve,
    run_cli,
    synth,
    tune_w,
    write_tensor,
)

__version__ = "0.1.0"
