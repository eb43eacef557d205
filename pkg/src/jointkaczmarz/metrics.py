"""Reconstruction quality metrics and convergence-rate fitting."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ContractError


def l2_error(c, c_ref):
    c = np.asarray(c, dtype=np.float64)
    c_ref = np.asarray(c_ref, dtype=np.float64)
    if c.shape != c_ref.shape:
        raise ContractError(f"length mismatch: {c.shape} vs {c_ref.shape}")
    return float(np.linalg.norm(c - c_ref))


@dataclass(frozen=True)
class SsimOptions:
    """1-D SSIM settings.

    ``dynamic_range`` defaults to the peak-to-peak range of the reference
    signal. Window statistics use the unbiased (N - 1) normalization.
    """

    window_len: int = 7
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: Optional[float] = None

    def __post_init__(self):
        if self.window_len < 3 or self.window_len % 2 == 0:
            raise ContractError(f"window_len must be odd and >= 3, got {self.window_len}")


def ssim_1d(c, c_ref, opts=SsimOptions()):
    """Mean SSIM over all full-length sliding windows of two 1-D signals."""
    x = np.asarray(c, dtype=np.float64)
    y = np.asarray(c_ref, dtype=np.float64)
    w = opts.window_len
    if x.shape != y.shape or x.ndim != 1:
        raise ContractError(f"signals must be 1-D of equal length: {x.shape} vs {y.shape}")
    if x.size < w:
        raise ContractError(f"signal length {x.size} is shorter than the window {w}")
    L = float(np.ptp(y)) if opts.dynamic_range is None else float(opts.dynamic_range)
    if not L > 0:
        raise ContractError(f"dynamic range must be > 0, got {L}")
    C1 = (opts.k1 * L) ** 2
    C2 = (opts.k2 * L) ** 2

    xw = sliding_window_view(x, w)
    yw = sliding_window_view(y, w)
    mx = xw.mean(axis=1)
    my = yw.mean(axis=1)
    dx = xw - mx[:, None]
    dy = yw - my[:, None]
    vx = np.sum(dx * dx, axis=1) / (w - 1)
    vy = np.sum(dy * dy, axis=1) / (w - 1)
    cxy = np.sum(dx * dy, axis=1) / (w - 1)
    s = ((2 * mx * my + C1) * (2 * cxy + C2)) / ((mx ** 2 + my ** 2 + C1) * (vx + vy + C2))
    return float(s.mean())


def data_residual(S, c, u):
    """``|S c - u|_2``."""
    S = np.asarray(S)
    c = np.asarray(c)
    u = np.asarray(u)
    if S.ndim != 2 or S.shape != (u.shape[0], c.shape[0]):
        raise ContractError(f"inconsistent shapes: S {S.shape}, c {c.shape}, u {u.shape}")
    return float(np.linalg.norm(S @ c - u))


def empirical_rate(levels):
    """Least-squares slope of log(discrepancy) against log(noise magnitude).

    Args:
        levels: sequence of ``(noise_magnitude, discrepancy)`` pairs, at
            least three, all positive.
    """
    pts = np.asarray(levels, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ContractError("need at least three (noise, discrepancy) pairs")
    if not np.all(np.isfinite(pts)) or np.any(pts <= 0):
        raise ContractError("noise magnitudes and discrepancies must be positive")
    lx = np.log(pts[:, 0])
    ly = np.log(pts[:, 1])
    lx = lx - lx.mean()
    if not np.any(lx):
        raise ContractError("noise magnitudes must not all be equal")
    return float(np.dot(lx, ly - ly.mean()) / np.dot(lx, lx))
