"""Exploration and prediction quality metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .errors import GridMismatch, NoFreeCells, TooSmall
from .grids import FREE, UNCERTAIN, TrinaryGrid

PSNR_CAP = 99.0  # sentinel for identical images

SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_L = 255.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5


def coverage(observed: TrinaryGrid, truth: TrinaryGrid) -> float:
    """Fraction of ground-truth free cells already observed free."""
    if observed.cells.shape != truth.cells.shape:
        raise GridMismatch(f"{observed.cells.shape} vs {truth.cells.shape}")
    truth_free = truth.cells == FREE
    total = int(truth_free.sum())
    if total == 0:
        raise NoFreeCells("ground truth has no free cells")
    seen = int(((observed.cells == FREE) & truth_free).sum())
    return seen / total


def accuracy(pred: TrinaryGrid, truth: TrinaryGrid) -> float:
    """Agreement on classified cells; vacuously 1.0 if nothing classified."""
    if pred.cells.shape != truth.cells.shape:
        raise GridMismatch(f"{pred.cells.shape} vs {truth.cells.shape}")
    classified = pred.cells != UNCERTAIN
    total = int(classified.sum())
    if total == 0:
        return 1.0
    return int((pred.cells[classified] == truth.cells[classified]).sum()) / total


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio between two 8-bit images, in dB.

    Identical images return the 99.0 dB cap.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise GridMismatch(f"{a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return float(10.0 * np.log10(255.0**2 / mse))


def _gaussian_kernel(size=SSIM_WINDOW, sigma=SSIM_SIGMA) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-(coords**2) / (2.0 * sigma**2))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Single-scale SSIM with the standard 11x11 Gaussian window (sigma 1.5),
    K1=0.01, K2=0.03, L=255, averaged over the valid window positions."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise GridMismatch(f"{a.shape} vs {b.shape}")
    if min(a.shape) < SSIM_WINDOW:
        raise TooSmall(f"images must be at least {SSIM_WINDOW} pixels per side")
    c1 = (SSIM_K1 * SSIM_L) ** 2
    c2 = (SSIM_K2 * SSIM_L) ** 2
    kernel = _gaussian_kernel()

    mu_a = convolve2d(a, kernel, mode="valid")
    mu_b = convolve2d(b, kernel, mode="valid")
    mu_aa = mu_a * mu_a
    mu_bb = mu_b * mu_b
    mu_ab = mu_a * mu_b
    sigma_aa = convolve2d(a * a, kernel, mode="valid") - mu_aa
    sigma_bb = convolve2d(b * b, kernel, mode="valid") - mu_bb
    sigma_ab = convolve2d(a * b, kernel, mode="valid") - mu_ab

    ssim_map = ((2 * mu_ab + c1) * (2 * sigma_ab + c2)) / (
        (mu_aa + mu_bb + c1) * (sigma_aa + sigma_bb + c2)
    )
    return float(ssim_map.mean())


@dataclass(frozen=True)
class ObjectiveWeights:
    theta1: float = 0.0  # predictor parameter count
    theta2: float = 1.0  # exploration time (ticks)
    theta3: float = 0.0  # final map L1 error
    rho: int = 0  # parameter count of the active predictor

    def __post_init__(self):
        if self.theta1 < 0 or self.theta2 < 0 or self.theta3 < 0:
            raise ValueError("objective weights must be >= 0")


def objective(weights: ObjectiveWeights, ticks: int, l1_map_error: float) -> float:
    """Scalar exploration objective: weighted model size, time and map error.

    The L1 term is the mean absolute difference between the truth lift and
    the final fused probability grid; reported for comparison, never
    optimized by the runner.
    """
    return (
        weights.theta1 * weights.rho + weights.theta2 * ticks + weights.theta3 * l1_map_error
    )
