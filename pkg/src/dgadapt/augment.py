"""Class-balancing augmentation of GAF images.

Five mild perturbations (Gaussian blur, Gaussian noise, salt-and-pepper
noise, brightening, darkening) generate extra training images for
underrepresented classes. Augmented images stay symmetric and inside
[-1, 1]; they need not be exact Gramian matrices.
"""

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .preprocess import FaultLabel
from .seeding import derive_seed


class AugmentKind(Enum):
    GAUSSIAN_BLUR = "gaussian_blur"
    GAUSSIAN_NOISE = "gaussian_noise"
    SALT_PEPPER = "salt_pepper"
    BRIGHTEN = "brighten"
    DARKEN = "darken"


# Cycling order used by balance_augment.
AUGMENT_ORDER = (
    AugmentKind.GAUSSIAN_BLUR,
    AugmentKind.GAUSSIAN_NOISE,
    AugmentKind.SALT_PEPPER,
    AugmentKind.BRIGHTEN,
    AugmentKind.DARKEN,
)


@dataclass(frozen=True)
class AugmentParams:
    """Perturbation magnitudes, kept small relative to the [-1, 1] range."""

    blur_sigma: float = 0.8
    noise_std: float = 0.05
    sp_density: float = 0.02
    brightness_delta: float = 0.1

    def __post_init__(self):
        if self.blur_sigma < 0:
            raise ValueError(f"blur_sigma must be >= 0, got {self.blur_sigma}")
        if self.noise_std < 0:
            raise ValueError(f"noise_std must be >= 0, got {self.noise_std}")
        if not 0.0 <= self.sp_density <= 1.0:
            raise ValueError(f"sp_density must be in [0, 1], got {self.sp_density}")


@dataclass(frozen=True)
class LabeledImage:
    image: np.ndarray  # (9, 9)
    label: FaultLabel
    augmented: bool = False


def _gaussian_kernel3(sigma: float) -> np.ndarray:
    if sigma == 0.0:
        k = np.zeros((3, 3))
        k[1, 1] = 1.0
        return k
    d = np.array([-1.0, 0.0, 1.0])
    g = np.exp(-(d[:, None] ** 2 + d[None, :] ** 2) / (2.0 * sigma**2))
    return g / g.sum()


def _blur3(image: np.ndarray, sigma: float) -> np.ndarray:
    kern = _gaussian_kernel3(sigma)
    padded = np.pad(image, 1, mode="edge")
    out = np.zeros_like(image)
    for di in range(3):
        for dj in range(3):
            out += kern[di, dj] * padded[di : di + image.shape[0], dj : dj + image.shape[1]]
    return out


def _symmetric_salt_pepper(image: np.ndarray, density: float, rng) -> np.ndarray:
    # Corruption is drawn on the upper triangle and mirrored, so the result
    # is symmetric without averaging (averaging +1 against -1 would wash the
    # corruption out to 0).
    n = image.shape[0]
    hit = rng.random((n, n)) < density
    salt = np.where(rng.random((n, n)) < 0.5, 1.0, -1.0)
    upper = np.triu(np.ones((n, n), dtype=bool))
    hit = np.where(upper, hit, hit.T)
    salt = np.where(upper, salt, salt.T)
    return np.where(hit, salt, image)


def apply_augmentation(
    image: np.ndarray,
    kind: AugmentKind,
    seed: int,
    params: AugmentParams = AugmentParams(),
) -> np.ndarray:
    """Apply one perturbation; result is symmetrized and clamped to [-1, 1].

    Deterministic for a fixed (image, kind, seed, params).
    """
    image = np.asarray(image, dtype=float)
    rng = np.random.default_rng(seed)
    if kind is AugmentKind.GAUSSIAN_BLUR:
        out = _blur3(image, params.blur_sigma)
    elif kind is AugmentKind.GAUSSIAN_NOISE:
        out = image + rng.normal(0.0, params.noise_std, size=image.shape)
    elif kind is AugmentKind.SALT_PEPPER:
        out = _symmetric_salt_pepper(image, params.sp_density, rng)
    elif kind is AugmentKind.BRIGHTEN:
        out = image + params.brightness_delta
    elif kind is AugmentKind.DARKEN:
        out = image - params.brightness_delta
    else:
        raise ValueError(f"unknown augmentation kind: {kind}")
    out = 0.5 * (out + out.T)
    return np.clip(out, -1.0, 1.0)


def balance_augment(
    data: list[LabeledImage],
    target_per_class: int,
    seed: int,
    params: AugmentParams = AugmentParams(),
    classes=None,
) -> list[LabeledImage]:
    """Top classes up to target_per_class items by cycling augmentations.

    Originals are always retained unchanged; classes already at or above the
    target pass through. Generated item i for a class reuses original
    i % n_originals with augmentation kind AUGMENT_ORDER[(i // n_originals) % 5],
    i.e. each kind sweeps all originals before the next kind starts. Each
    item's randomness is derived from (seed, class, i), so the output is
    deterministic and independent of generation order.

    `classes` names the class universe to balance (default: the classes
    present in `data`); a requested class with zero originals is an error.
    """
    if target_per_class < 1:
        raise ValueError(f"target_per_class must be >= 1, got {target_per_class}")
    by_class: dict[FaultLabel, list[LabeledImage]] = {}
    for item in data:
        by_class.setdefault(item.label, []).append(item)
    if classes is None:
        classes = sorted(by_class)

    out = list(data)
    for label in sorted(classes):
        originals = by_class.get(label, [])
        n = len(originals)
        if n == 0:
            raise ValueError(f"class {label.name} has no original samples")
        for i in range(max(0, target_per_class - n)):
            base = originals[i % n]
            kind = AUGMENT_ORDER[(i // n) % len(AUGMENT_ORDER)]
            item_seed = derive_seed(seed, "augment", int(label), i)
            out.append(
                replace(
                    base,
                    image=apply_augmentation(base.image, kind, item_seed, params),
                    augmented=True,
                )
            )
    return out
