"""Weighted domain-alignment losses: MMD, CORAL, and their combination.

Feature weighting is realized as per-coordinate scaling: each flattened
image coordinate j is multiplied by sqrt(w_flat[j]), where w_flat is the
row-major flattening of the 9x9 weight matrix. Under this scaling,
weighted MMD is plain MMD on the scaled features, and weighted CORAL
equals the covariance-difference Frobenius loss with the element-wise
weight sqrt(w_i * w_j) applied to each covariance entry.

The total training objective mixes mean cross-entropy with the domain
losses:

    total = alpha * cls + (1 - alpha) * (beta * mmd + (1 - beta) * coral)
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LossWeights:
    """Mixing weights: alpha trades classification vs domain alignment,
    beta trades MMD vs CORAL inside the domain term."""

    alpha: float = 0.5
    beta: float = 0.7

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")


@dataclass(frozen=True)
class KernelConfig:
    """Gaussian kernel bandwidth; sigma=None selects the median heuristic.

    Median heuristic: sigma^2 = (median of pairwise squared distances over
    distinct unordered pairs in the joint batch) / 2, falling back to
    sigma = 1 when that median is zero. The bandwidth is treated as a
    constant (no gradient flows through it).
    """

    sigma: float | None = None

    def __post_init__(self):
        if self.sigma is not None and self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")


def weight_features(batch: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Scale column j of the batch by sqrt(w_flat[j])."""
    batch = np.asarray(batch, dtype=float)
    w_flat = np.asarray(w, dtype=float).ravel()
    if batch.ndim != 2 or batch.shape[1] != w_flat.size:
        raise ValueError(
            f"batch width {batch.shape} does not match weight size {w_flat.size}"
        )
    return batch * np.sqrt(w_flat)[None, :]


def _pairwise_sq_dists(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    xx = np.sum(x * x, axis=1)
    yy = np.sum(y * y, axis=1)
    d2 = xx[:, None] + yy[None, :] - 2.0 * (x @ y.T)
    return np.maximum(d2, 0.0)


def resolve_sigma(xs: np.ndarray, xt: np.ndarray, kernel: KernelConfig) -> float:
    """Bandwidth for a batch pair, applying the median heuristic if needed."""
    if kernel.sigma is not None:
        return float(kernel.sigma)
    joint = np.vstack([xs, xt])
    d2 = _pairwise_sq_dists(joint, joint)
    iu = np.triu_indices(joint.shape[0], k=1)
    if iu[0].size == 0:
        return 1.0
    med = float(np.median(d2[iu]))
    if med == 0.0:
        return 1.0
    return float(np.sqrt(med / 2.0))


def mmd_squared(xs: np.ndarray, xt: np.ndarray, kernel: KernelConfig = KernelConfig()) -> float:
    """Squared maximum mean discrepancy with a Gaussian kernel.

    (1/n^2) sum k(xs_i, xs_j) + (1/m^2) sum k(xt_i, xt_j)
    - (2/nm) sum k(xs_i, xt_j),  k(x, y) = exp(-||x - y||^2 / (2 sigma^2)).

    Zero (up to float error) for identical multisets; always >= -1e-12.
    """
    xs, xt = _check_batch_pair(xs, xt, min_rows=1)
    sigma = resolve_sigma(xs, xt, kernel)
    gamma = 1.0 / (2.0 * sigma * sigma)
    k_ss = np.exp(-gamma * _pairwise_sq_dists(xs, xs))
    k_tt = np.exp(-gamma * _pairwise_sq_dists(xt, xt))
    k_st = np.exp(-gamma * _pairwise_sq_dists(xs, xt))
    n, m = xs.shape[0], xt.shape[0]
    return float(k_ss.sum() / n**2 + k_tt.sum() / m**2 - 2.0 * k_st.sum() / (n * m))


def mmd_squared_grad(
    xs: np.ndarray, xt: np.ndarray, kernel: KernelConfig = KernelConfig()
) -> tuple[float, np.ndarray, np.ndarray]:
    """mmd_squared plus its gradients w.r.t. the batch entries.

    The bandwidth (explicit or median-heuristic) is held fixed during
    differentiation.
    """
    xs, xt = _check_batch_pair(xs, xt, min_rows=1)
    sigma = resolve_sigma(xs, xt, kernel)
    gamma = 1.0 / (2.0 * sigma * sigma)
    n, m = xs.shape[0], xt.shape[0]

    k_ss = np.exp(-gamma * _pairwise_sq_dists(xs, xs))
    k_tt = np.exp(-gamma * _pairwise_sq_dists(xt, xt))
    k_st = np.exp(-gamma * _pairwise_sq_dists(xs, xt))
    value = float(k_ss.sum() / n**2 + k_tt.sum() / m**2 - 2.0 * k_st.sum() / (n * m))

    # d k(x, y) / dx = -2 gamma (x - y) k(x, y); accumulate coefficient sums.
    def _pair_grad(x, y, k, coeff):
        # gradient w.r.t. x of coeff * sum_ij k(x_i, y_j)
        row = k.sum(axis=1)
        return coeff * (-2.0 * gamma) * (row[:, None] * x - k @ y)

    g_xs = 2.0 * _pair_grad(xs, xs, k_ss, 1.0 / n**2)  # both arguments move
    g_xs += _pair_grad(xs, xt, k_st, -2.0 / (n * m))
    g_xt = 2.0 * _pair_grad(xt, xt, k_tt, 1.0 / m**2)
    g_xt += _pair_grad(xt, xs, k_st.T, -2.0 / (n * m))
    return value, g_xs, g_xt


def coral_loss(xs: np.ndarray, xt: np.ndarray) -> float:
    """Squared Frobenius distance between the two batch covariance matrices.

    Covariances use the unbiased 1/(n-1) normalization, so each batch needs
    at least two rows.
    """
    xs, xt = _check_batch_pair(xs, xt, min_rows=2)
    return float(np.sum((_cov(xs) - _cov(xt)) ** 2))


def coral_loss_grad(
    xs: np.ndarray, xt: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray]:
    """coral_loss plus its gradients w.r.t. the batch entries."""
    xs, xt = _check_batch_pair(xs, xt, min_rows=2)
    diff = _cov(xs) - _cov(xt)
    value = float(np.sum(diff**2))
    g_xs = _coral_grad_one(xs, diff, +1.0)
    g_xt = _coral_grad_one(xt, diff, -1.0)
    return value, g_xs, g_xt


def combined_loss(cls: float, mmd: float, coral: float, w: LossWeights) -> float:
    """alpha * cls + (1 - alpha) * (beta * mmd + (1 - beta) * coral)."""
    for name, v in (("cls", cls), ("mmd", mmd), ("coral", coral)):
        if not np.isfinite(v):
            raise ValueError(f"{name} loss must be finite, got {v}")
    return w.alpha * cls + (1.0 - w.alpha) * (w.beta * mmd + (1.0 - w.beta) * coral)


def _cov(x: np.ndarray) -> np.ndarray:
    xc = x - x.mean(axis=0, keepdims=True)
    return (xc.T @ xc) / (x.shape[0] - 1)


def _coral_grad_one(x: np.ndarray, diff: np.ndarray, sign: float) -> np.ndarray:
    # d ||C_s - C_t||_F^2 / dX = 4/(n-1) * Xc @ (C_s - C_t), re-centered
    # because the mean depends on every row.
    n = x.shape[0]
    xc = x - x.mean(axis=0, keepdims=True)
    g = sign * (4.0 / (n - 1)) * (xc @ diff)
    return g - g.mean(axis=0, keepdims=True)


def _check_batch_pair(xs, xt, min_rows: int) -> tuple[np.ndarray, np.ndarray]:
    xs = np.asarray(xs, dtype=float)
    xt = np.asarray(xt, dtype=float)
    if xs.ndim != 2 or xt.ndim != 2:
        raise ValueError("batches must be 2-D (rows x features)")
    if xs.shape[1] != xt.shape[1]:
        raise ValueError(
            f"feature dimensions differ: {xs.shape[1]} vs {xt.shape[1]}"
        )
    if xs.shape[0] < min_rows or xt.shape[0] < min_rows:
        raise ValueError(f"each batch needs at least {min_rows} rows")
    return xs, xt
