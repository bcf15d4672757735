"""Parameter sweeps dispatched to a process pool.

Points are split into fixed-size chunks in input order.  Chunk boundaries
depend only on the sweep itself, never on the worker count, so results are
bit-identical for any ``workers`` value.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Optional, Sequence

import numpy as np

from .analysis import rwa_fidelity_batch
from .hamiltonians import ModelParams
from .hilbert import HilbertDims

SWEEPABLE = ("omega_c", "g", "xi", "nu")


def default_workers() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # pragma: no cover - non-Linux
        return max(1, os.cpu_count() or 1)


def map_chunks(fn: Callable, chunks: Sequence, workers: Optional[int] = None) -> list:
    """``[fn(c) for c in chunks]``, in order, optionally on a process pool."""
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ProcessPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
        return list(pool.map(fn, chunks))


def grid_points(base: ModelParams, axes: Sequence[tuple]) -> list:
    """Cartesian product of ``(name, values)`` axes; the last axis varies fastest."""
    for name, _ in axes:
        if name not in SWEEPABLE:
            raise ValueError(f"cannot sweep {name!r}; choose from {SWEEPABLE}")
    names = [a[0] for a in axes]
    return [base.replace(**dict(zip(names, combo))) for combo in itertools.product(*(a[1] for a in axes))]


def _fidelity_chunk(job):
    params, cutoff, alpha, t = job
    return rwa_fidelity_batch(params, t, dims=HilbertDims(cutoff), alpha=alpha).tolist()


def fidelity_sweep(
    points: Sequence[ModelParams],
    *,
    cutoff: int = 20,
    alpha: complex = 0.1,
    t: Optional[float] = None,
    chunk_size: int = 50,
    workers: Optional[int] = None,
) -> np.ndarray:
    """``F(t)`` (default ``t_s``) for every point, in input order."""
    chunks = [list(points[i : i + chunk_size]) for i in range(0, len(points), chunk_size)]
    jobs = [(c, cutoff, alpha, t) for c in chunks]
    results = map_chunks(_fidelity_chunk, jobs, workers)
    return np.array(list(itertools.chain.from_iterable(results)))
