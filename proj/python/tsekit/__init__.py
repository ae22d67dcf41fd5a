"""Target-speech-extraction scoring toolkit.

Thin Python surface over the C++ core: training losses with analytic
gradients, active/inactive-speaker classifiers with DET/EER, speaker
embeddings and BSS-eval-style SDR metrics.
"""

from tsekit._core import (
    __version__,
    active_loss,
    attenuation_db,
    classify,
    cosine_similarity,
    det_curve,
    embed,
    inactive_loss,
    sdr_db,
    sdri_db,
    si_snr_loss,
)

__all__ = [
    "__version__",
    "active_loss",
    "attenuation_db",
    "classify",
    "cosine_similarity",
    "det_curve",
    "embed",
    "inactive_loss",
    "sdr_db",
    "sdri_db",
    "si_snr_loss",
]
