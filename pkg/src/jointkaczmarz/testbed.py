"""Synthetic integral-operator test problems.

The true operator is the cumulative-sum matrix (lower triangular ones),
the calibration map sums pairs of neighbouring columns, and both the
modeled operator and the measurement carry i.i.d. Gaussian noise.

Noise is generated from numpy's PCG64 bit generator: uniforms from
``Generator.random`` are turned into normals with the Box-Muller
transform, pairwise ``(sqrt(-2 ln(1 - u1)) cos(2 pi u2),
sqrt(-2 ln(1 - u1)) sin(2 pi u2))``, consumed in row-major order of the
target. Complex targets get a (real, imaginary) pair per entry.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ContractError
from .model import ProblemInstance, ProjectionMap
from .operators import apply_forward, apply_projection

PHANTOM_VERSION = 1


def build_true_operator(M):
    """Lower triangular M x M matrix of ones."""
    if int(M) != M or M < 1:
        raise ContractError(f"M must be a positive integer, got {M}")
    return np.tril(np.ones((int(M), int(M))))


def build_projection_map(M):
    """Map summing columns ``2n`` and ``2n + 1`` into calibration column ``n``."""
    if int(M) != M or M < 2 or M % 2:
        raise ContractError(f"M must be an even integer >= 2, got {M}")
    M = int(M)
    N = M // 2
    return ProjectionMap((M, N), indptr=np.arange(0, M + 1, 2), indices=np.arange(M),
                         data=np.ones(M))


@dataclass(frozen=True)
class PhantomSpec:
    """Piecewise-constant phantom.

    The default ``two_blocks_and_spike`` layout is defined on a 50-sample
    grid (samples 10-19 at 1.0, 30-34 at 0.5, 42 at 1.5) and rescaled
    proportionally for other sizes. ``custom`` uses half-open
    ``[breakpoints[i], breakpoints[i + 1])`` intervals with the given heights.
    """

    M: int = 50
    kind: str = "two_blocks_and_spike"
    breakpoints: Optional[Sequence[int]] = None
    heights: Optional[Sequence[float]] = None


_DEFAULT_BLOCKS = ((10, 20, 1.0), (30, 35, 0.5), (42, 43, 1.5))


def make_phantom(spec=PhantomSpec()):
    M = int(spec.M)
    c = np.zeros(M)
    if spec.kind == "two_blocks_and_spike":
        if M < 8:
            raise ContractError(f"default phantom needs M >= 8, got {M}")
        for lo, hi, h in _DEFAULT_BLOCKS:
            a = lo * M // 50
            b = max(hi * M // 50, a + 1)
            c[a:b] = h
    elif spec.kind == "custom":
        bp = list(spec.breakpoints or ())
        heights = list(spec.heights or ())
        if len(bp) != len(heights) + 1:
            raise ContractError("custom phantom needs len(breakpoints) == len(heights) + 1")
        if any(h < 0 for h in heights):
            raise ContractError("phantom heights must be nonnegative")
        if bp != sorted(bp) or bp[0] < 0 or bp[-1] > M:
            raise ContractError("breakpoints must be sorted and lie in [0, M]")
        for lo, hi, h in zip(bp[:-1], bp[1:], heights):
            c[lo:hi] = h
    else:
        raise ContractError(f"unknown phantom kind {spec.kind!r}")
    if not np.any(c > 0):
        raise ContractError("phantom is identically zero")
    return c


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float
    seed: int
    generator: str = "PCG64"
    transform: str = "box-muller"


def standard_normals(n, seed):
    """``n`` standard normal draws from PCG64(seed) via Box-Muller."""
    n = int(n)
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    pairs = (n + 1) // 2
    r = rng.random(2 * pairs)
    radius = np.sqrt(-2.0 * np.log1p(-r[0::2]))
    theta = 2.0 * np.pi * r[1::2]
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(theta)
    z[1::2] = radius * np.sin(theta)
    return z[:n]


def perturb_gaussian(target, noise):
    """Add i.i.d. N(0, sigma^2) noise entrywise (row-major draw order)."""
    if not noise.sigma >= 0:
        raise ContractError(f"sigma must be >= 0, got {noise.sigma}")
    target = np.asarray(target)
    if noise.sigma == 0:
        return target.copy()
    if np.iscomplexobj(target):
        z = standard_normals(2 * target.size, noise.seed).reshape(target.shape + (2,))
        return target + noise.sigma * (z[..., 0] + 1j * z[..., 1])
    z = standard_normals(target.size, noise.seed).reshape(target.shape)
    return target.astype(np.float64) + noise.sigma * z


def sub_seeds(seed, n=2):
    """Derive ``n`` independent 64-bit seeds from ``seed``."""
    children = np.random.SeedSequence(int(seed)).spawn(n)
    return [int(ch.generate_state(1, np.uint64)[0]) for ch in children]


def generate_instance(M=50, sigma=0.05, seed=1, phantom=None):
    """Build the academic instance with noisy model and data, exact calibration.

    The operator noise and the measurement noise use independent seeds
    derived from ``seed``.
    """
    phantom = PhantomSpec(M=M) if phantom is None else phantom
    if phantom.M != M:
        raise ContractError(f"phantom size {phantom.M} differs from M={M}")
    s_true = build_true_operator(M)
    q = build_projection_map(M)
    c_true = make_phantom(phantom)
    seed_op, seed_data = sub_seeds(seed)
    s_mod = perturb_gaussian(s_true, NoiseSpec(sigma, seed_op))
    u = perturb_gaussian(apply_forward(s_true, c_true), NoiseSpec(sigma, seed_data))
    return ProblemInstance(s_mod=s_mod, s_calib=apply_projection(s_true, q), q=q, u=u,
                           s_true=s_true, c_true=c_true, sigma=sigma, seed=seed)
