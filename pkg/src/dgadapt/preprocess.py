"""DGA preprocessing: hybrid ratio features and Gramian angular field images.

A raw oil measurement carries five combustible-gas concentrations in ppm
(H2, CH4, C2H2, C2H4, C2H6). Each sample is converted to a 9-dimensional
hybrid feature vector: the five percentage shares of the measured gases
plus natural logs of Roger's four diagnostic ratios. Feature vectors are
then min-max scaled to [-1, 1] and encoded as 9x9 summation-field Gramian
angular images, which a CNN consumes downstream.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

# Minimum concentration substituted before forming ratios. Below typical
# DGA detection limits, so flooring never distorts a real reading while
# guaranteeing every log ratio is finite.
GAS_FLOOR_PPM = 0.1

GAS_NAMES = ("h2", "ch4", "c2h2", "c2h4", "c2h6")

FEATURE_NAMES = (
    "h2_pct",
    "ch4_pct",
    "c2h2_pct",
    "c2h4_pct",
    "c2h6_pct",
    "ln_ch4_h2",
    "ln_c2h6_ch4",
    "ln_c2h4_c2h6",
    "ln_c2h2_c2h4",
)

N_FEATURES = 9


class FaultLabel(IntEnum):
    """Five transformer fault classes, fixed canonical ordering."""

    PD = 0      # partial discharge
    D1 = 1      # low energy discharge
    D2 = 2      # high energy discharge
    T1T2 = 3    # low and medium thermal fault
    T3 = 4      # high thermal fault

    @classmethod
    def from_code(cls, code: str) -> "FaultLabel":
        try:
            return cls[code]
        except KeyError:
            raise ValueError(
                f"unknown fault label {code!r}; expected one of "
                f"{', '.join(m.name for m in cls)}"
            ) from None


N_CLASSES = len(FaultLabel)


@dataclass(frozen=True)
class GasSample:
    """One transformer oil measurement: five gas concentrations in ppm."""

    h2: float
    ch4: float
    c2h2: float
    c2h4: float
    c2h6: float
    label: FaultLabel | None = None

    def __post_init__(self):
        for name in GAS_NAMES:
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} concentration must be finite, got {value!r}")
            if value < 0:
                raise ValueError(f"{name} concentration must be >= 0, got {value!r}")

    def gases(self) -> np.ndarray:
        return np.array([self.h2, self.ch4, self.c2h2, self.c2h4, self.c2h6], dtype=float)


@dataclass(frozen=True)
class FeatureScaler:
    """Per-feature min/max recorded from a fitting set.

    Degenerate features (min == max on the fitting set) are widened by
    +-0.5 so the affine map to [-1, 1] stays defined.
    """

    lo: np.ndarray  # (9,)
    hi: np.ndarray  # (9,)

    def __post_init__(self):
        if self.lo.shape != (N_FEATURES,) or self.hi.shape != (N_FEATURES,):
            raise ValueError("scaler bounds must each have 9 entries")
        if np.any(self.hi < self.lo):
            raise ValueError("scaler max must be >= min for every feature")


def compute_hybrid_ratios(sample: GasSample) -> np.ndarray:
    """Convert a gas sample into the 9 hybrid DGA ratio features.

    Every concentration is floored at GAS_FLOOR_PPM first. Entries 0-4 are
    each gas's share of the floored five-gas total (they sum to 1); entries
    5-8 are ln(CH4/H2), ln(C2H6/CH4), ln(C2H4/C2H6), ln(C2H2/C2H4) on the
    floored values, so all logs are finite.
    """
    g = np.maximum(sample.gases(), GAS_FLOOR_PPM)
    h2, ch4, c2h2, c2h4, c2h6 = g
    pct = g / g.sum()
    logs = np.log([ch4 / h2, c2h6 / ch4, c2h4 / c2h6, c2h2 / c2h4])
    return np.concatenate([pct, logs])


def fit_feature_scaler(features: list[np.ndarray]) -> FeatureScaler:
    """Record per-feature min/max over a non-empty list of feature vectors."""
    if len(features) == 0:
        raise ValueError("cannot fit a scaler on an empty feature list")
    mat = np.asarray(features, dtype=float)
    if mat.ndim != 2 or mat.shape[1] != N_FEATURES:
        raise ValueError(f"expected feature vectors of length {N_FEATURES}")
    lo = mat.min(axis=0)
    hi = mat.max(axis=0)
    flat = hi == lo
    lo = np.where(flat, lo - 0.5, lo)
    hi = np.where(flat, hi + 0.5, hi)
    return FeatureScaler(lo=lo, hi=hi)


def scale_features(v: np.ndarray, scaler: FeatureScaler) -> np.ndarray:
    """Affinely map a feature vector into [-1, 1], clamping out-of-range values.

    Clamping (rather than erroring) keeps the encoding total: target-domain
    values outside the fitted source range saturate at the boundary.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (N_FEATURES,):
        raise ValueError(f"expected a feature vector of length {N_FEATURES}")
    x = 2.0 * (v - scaler.lo) / (scaler.hi - scaler.lo) - 1.0
    return np.clip(x, -1.0, 1.0)


def gaf_encode(x: np.ndarray) -> np.ndarray:
    """Encode a scaled vector as a 9x9 summation-field Gramian angular image.

    G[i, j] = x_i * x_j - sqrt(1 - x_i^2) * sqrt(1 - x_j^2), which equals
    cos(phi_i + phi_j) for phi = arccos(x). The result is symmetric with
    every entry in [-1, 1] and diagonal 2 * x_i^2 - 1.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0) or not np.all(np.isfinite(x)):
        raise ValueError("gaf_encode requires all components in [-1, 1]")
    comp = np.sqrt(1.0 - x * x)
    img = np.outer(x, x) - np.outer(comp, comp)
    # cos(phi_i + phi_j) is in [-1, 1] exactly; clip the ~1 ulp float spill.
    return np.clip(img, -1.0, 1.0)


def encode_samples(samples, scaler: FeatureScaler) -> np.ndarray:
    """Feature-extract, scale, and GAF-encode a list of GasSamples.

    Returns an (n, 9, 9) array.
    """
    return np.stack(
        [gaf_encode(scale_features(compute_hybrid_ratios(s), scaler)) for s in samples]
    )
