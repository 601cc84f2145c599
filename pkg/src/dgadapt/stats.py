"""Two-sample statistics driving the feature-weighted alignment.

Per-feature two-sample Kolmogorov-Smirnov statistics quantify how much each
hybrid-ratio feature shifted between source and target. The K-S vector is
itself GAF-encoded and rescaled into a 9x9 weight matrix whose entries say
how important it is to align each feature pair. An average-KL divergence
diagnostic and pooled pixel-intensity histograms summarize the overall
domain gap.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .preprocess import FEATURE_NAMES, N_FEATURES, gaf_encode

DEFAULT_EPSILON = 1e-3
DEFAULT_AKLD_BINS = 20
DEFAULT_HIST_BINS = 20


@dataclass(frozen=True)
class HistogramReport:
    """Shared-edge pixel-intensity histograms for two image sets.

    Masses are normalized counts (each column sums to 1).
    """

    edges: np.ndarray        # (bins + 1,)
    source_mass: np.ndarray  # (bins,)
    target_mass: np.ndarray  # (bins,)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["bin_lo", "bin_hi", "source_mass", "target_mass"])
            for i in range(len(self.source_mass)):
                writer.writerow(
                    [
                        f"{self.edges[i]:.17g}",
                        f"{self.edges[i + 1]:.17g}",
                        f"{self.source_mass[i]:.17g}",
                        f"{self.target_mass[i]:.17g}",
                    ]
                )


def read_histogram_csv(path) -> HistogramReport:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["bin_lo", "bin_hi", "source_mass", "target_mass"]:
        raise ValueError(f"unexpected histogram header in {path}: {rows[0]}")
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    edges = np.concatenate([data[:, 0], data[-1:, 1]])
    return HistogramReport(edges=edges, source_mass=data[:, 2], target_mass=data[:, 3])


def ks_statistic(a, b) -> float:
    """Two-sample K-S statistic: sup_t |ECDF_a(t) - ECDF_b(t)|.

    The supremum over all reals is attained at a sample value, so it is
    evaluated at the union of both samples. Result is in [0, 1].
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("ks_statistic requires two non-empty samples")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def ks_feature_vector(source: list[np.ndarray], target: list[np.ndarray]) -> np.ndarray:
    """Per-feature K-S statistics between two feature-vector sets (length 9)."""
    if len(source) == 0 or len(target) == 0:
        raise ValueError("ks_feature_vector requires non-empty feature lists")
    src = np.asarray(source, dtype=float)
    tgt = np.asarray(target, dtype=float)
    return np.array(
        [ks_statistic(src[:, k], tgt[:, k]) for k in range(N_FEATURES)]
    )


def build_weight_matrix(ks: np.ndarray, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Turn a per-feature K-S vector into the 9x9 alignment weight matrix.

    Steps: (1) min-max scale the K-S vector to [-1, 1]; (2) GAF-encode it
    with the same summation-field convention used for data images;
    (3) min-max normalize the image to [0, 1] and add epsilon, so entries
    lie in [epsilon, 1 + epsilon] with larger weights marking feature pairs
    with larger domain shift. A constant K-S vector carries no discrepancy
    signal, in which case the all-ones matrix (plain unweighted alignment)
    is returned.
    """
    ks = np.asarray(ks, dtype=float)
    if ks.shape != (N_FEATURES,):
        raise ValueError(f"expected a K-S vector of length {N_FEATURES}")
    if np.any(ks < 0) or np.any(ks > 1):
        raise ValueError("K-S entries must lie in [0, 1]")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")

    lo, hi = ks.min(), ks.max()
    if hi == lo:
        return np.ones((N_FEATURES, N_FEATURES))
    scaled = 2.0 * (ks - lo) / (hi - lo) - 1.0
    img = gaf_encode(scaled)
    img_lo, img_hi = img.min(), img.max()
    if img_hi == img_lo:  # unreachable for a non-constant vector; keep total
        return np.ones((N_FEATURES, N_FEATURES))
    return (img - img_lo) / (img_hi - img_lo) + epsilon


def akld(source: list[np.ndarray], target: list[np.ndarray], bins: int = DEFAULT_AKLD_BINS) -> float:
    """Average per-feature KL divergence KL(source || target).

    Each feature's marginals are histogrammed over the combined range with
    add-one count smoothing before normalizing, which keeps every bin
    probability positive and the divergence finite.
    """
    if len(source) == 0 or len(target) == 0:
        raise ValueError("akld requires non-empty feature lists")
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    src = np.asarray(source, dtype=float)
    tgt = np.asarray(target, dtype=float)

    kl_sum = 0.0
    for k in range(N_FEATURES):
        s, t = src[:, k], tgt[:, k]
        lo = min(s.min(), t.min())
        hi = max(s.max(), t.max())
        if hi == lo:
            lo, hi = lo - 0.5, hi + 0.5
        counts_s, _ = np.histogram(s, bins=bins, range=(lo, hi))
        counts_t, _ = np.histogram(t, bins=bins, range=(lo, hi))
        p = (counts_s + 1.0) / (counts_s.sum() + bins)
        q = (counts_t + 1.0) / (counts_t.sum() + bins)
        kl_sum += float(np.sum(p * np.log(p / q)))
    return kl_sum / N_FEATURES


def pixel_intensity_histogram(
    images_a, images_b, bins: int = DEFAULT_HIST_BINS
) -> HistogramReport:
    """Pooled pixel-value histograms of two GAF image sets over [-1, 1]."""
    a = np.asarray(images_a, dtype=float)
    b = np.asarray(images_b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("pixel_intensity_histogram requires non-empty image lists")
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    edges = np.linspace(-1.0, 1.0, bins + 1)
    counts_a, _ = np.histogram(a.ravel(), bins=edges)
    counts_b, _ = np.histogram(b.ravel(), bins=edges)
    return HistogramReport(
        edges=edges,
        source_mass=counts_a / counts_a.sum(),
        target_mass=counts_b / counts_b.sum(),
    )


def ks_vector_rows(ks: np.ndarray) -> list[tuple[str, float]]:
    """Pair each K-S entry with its feature name, in canonical order."""
    return list(zip(FEATURE_NAMES, ks.tolist()))
