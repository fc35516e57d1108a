"""Sample-set selection: uniform at random or greedy on the leading eigenvectors."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import InvalidParameterError

logger = logging.getLogger(__name__)

SAMPLING_STRATEGIES = ("uniform", "greedy")

_ALIASES = {"greedy_spectral": "greedy"}

#: Candidates whose score is within this relative distance of the best tie.
TIE_RTOL = 1e-12

#: Smallest singular value below which perfect recovery is not guaranteed.
RANK_TOL = 1e-10

_CHUNK = 256

Seed = Union[int, np.random.SeedSequence, np.random.Generator, None]


@dataclass(frozen=True)
class SamplingConfig:
    strategy: str = "uniform"
    r: int = 1
    K: Optional[int] = None
    seed: int = 0

    def __post_init__(self) -> None:
        strategy = _ALIASES.get(self.strategy, self.strategy)
        if strategy not in SAMPLING_STRATEGIES:
            raise InvalidParameterError(
                f"Unknown sampling strategy '{self.strategy}', expected one of "
                f"{', '.join(SAMPLING_STRATEGIES)}"
            )
        object.__setattr__(self, "strategy", strategy)
        if self.r < 1:
            raise InvalidParameterError(f"Sample count must be >= 1, got {self.r}")
        if strategy == "greedy":
            if self.K is None or self.K < 1:
                raise InvalidParameterError("Greedy sampling needs a bandwidth K >= 1")
            if self.K > self.r:
                raise InvalidParameterError(
                    f"Greedy sampling needs K <= r (got K={self.K}, r={self.r})"
                )


def _check_count(n: int, r: int) -> None:
    if r < 1 or r > n:
        raise InvalidParameterError(f"Sample count must be in 1..{n}, got {r}")


def uniform_sample(n: int, r: int, seed: Seed = 0) -> np.ndarray:
    """``r`` distinct nodes drawn uniformly without replacement, sorted."""
    _check_count(n, r)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=r, replace=False)).astype(np.int64)


def _min_singular_values(rows: np.ndarray) -> np.ndarray:
    """Smallest singular value of each matrix in a ``(c, t, K)`` stack."""
    return np.linalg.svd(rows, compute_uv=False)[:, -1]


def greedy_spectral_sample(basis, K: int, r: int) -> np.ndarray:
    """Greedily maximize ``sigma_min`` of the sampled ``K`` leading eigenvectors.

    Each step adds the node whose row gives the largest smallest singular
    value of ``V[M + {v}, :K]``; near-ties go to the lowest index. Returns
    the chosen nodes sorted.
    """
    vectors = basis.eigenvectors
    n, width = vectors.shape
    if K < 1 or K > min(n, width):
        raise InvalidParameterError(
            f"Bandwidth K must satisfy 1 <= K <= {min(n, width)}, got {K}"
        )
    _check_count(n, r)
    if r < K:
        raise InvalidParameterError(f"Greedy sampling needs K <= r (got K={K}, r={r})")

    lead = vectors[:, :K]
    chosen = []
    available = np.ones(n, dtype=bool)
    score = 0.0
    for _ in range(r):
        candidates = np.flatnonzero(available)
        scores = np.empty(candidates.size)
        base = lead[chosen]
        for start in range(0, candidates.size, _CHUNK):
            batch = candidates[start : start + _CHUNK]
            shared = np.broadcast_to(base, (batch.size,) + base.shape)
            stack = np.concatenate([shared, lead[batch, None, :]], axis=1)
            scores[start : start + batch.size] = _min_singular_values(stack)
        best = scores.max()
        ties = np.flatnonzero(scores >= best - TIE_RTOL * max(abs(best), 1e-300))
        pick = int(candidates[ties[0]])
        chosen.append(pick)
        available[pick] = False
        score = float(best)

    if score <= RANK_TOL:
        logger.warning(
            f"Greedy sample set has sigma_min={score:.3e}; the sampled "
            f"eigenvector block is numerically singular"
        )
    logger.debug(f"greedy_spectral_sample: order={chosen}, sigma_min={score:.6g}")
    return np.sort(np.asarray(chosen, dtype=np.int64))


def sampled_sigma_min(basis, M, K: int) -> float:
    """``sigma_min`` of the ``K`` leading eigenvectors restricted to ``M``."""
    rows = basis.eigenvectors[np.asarray(M, dtype=np.int64), :K]
    return float(np.linalg.svd(rows, compute_uv=False)[-1])


def select_samples(
    config: SamplingConfig, n: int, basis=None, seed: Seed = None
) -> np.ndarray:
    """Apply ``config``; ``seed`` overrides ``config.seed`` for uniform draws."""
    if config.strategy == "uniform":
        return uniform_sample(n, config.r, config.seed if seed is None else seed)
    if basis is None:
        raise InvalidParameterError("Greedy sampling needs a spectral basis")
    return greedy_spectral_sample(basis, config.K, config.r)


__all__ = [
    "SAMPLING_STRATEGIES",
    "SamplingConfig",
    "uniform_sample",
    "greedy_spectral_sample",
    "sampled_sigma_min",
    "select_samples",
]
