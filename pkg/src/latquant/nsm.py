"""Monte Carlo estimation of the normalized second moment.

A point x = u G with u uniform on [0,1)^n is uniform modulo the lattice, so
the mean of ||x - Q(x)||^2 over the fundamental parallelepiped equals the
second moment of the Voronoi region. The dimensionless estimate reported is

    NSM = mean ||x - Q(x)||^2 / (n * V^(2/n))

with V the fundamental volume. The variance of the mean is the unbiased
sample variance of the per-sample values divided by the sample count.

Sampling is split into fixed-size chunks, each drawn from its own
counter-based substream keyed by (seed, chunk index), so results are
bit-identical for any worker count.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cvp import ClosestPointSolver
from .lattices import GeneratorMatrix, volume

CHUNK = 8192


@dataclass(frozen=True)
class NsmEstimate:
    mean: float
    var_of_mean: float
    n_samples: int
    seed: int

    @property
    def std_of_mean(self) -> float:
        return float(np.sqrt(self.var_of_mean))


def confidence_interval(e: NsmEstimate, z_score: float):
    """Symmetric CLT interval mean +/- z * std_of_mean."""
    half = z_score * e.std_of_mean
    return (e.mean - half, e.mean + half)


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    """Counter-based substream for one sampling chunk."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk_index,))
    return np.random.Generator(np.random.Philox(ss))


def sample_uniform_mod_lattice(G: GeneratorMatrix, rng: np.random.Generator):
    """One point x = u G, u uniform on [0,1)^n."""
    return rng.random(G.dim) @ G.rows


def _chunk_bounds(n_samples: int):
    starts = range(0, n_samples, CHUNK)
    return [(i // CHUNK, min(CHUNK, n_samples - i)) for i in starts]


def _chunk_dists(solver: ClosestPointSolver, seed: int, chunk_index: int, count: int):
    rng = chunk_rng(seed, chunk_index)
    u = rng.random((count, solver.G.dim))
    _, dists = solver.closest_batch(u @ solver.G.rows)
    return dists


def _moments(d):
    """(count, mean, sum of squared deviations) for one chunk."""
    m = float(d.mean())
    return len(d), m, float(((d - m) ** 2).sum())


def _merge_moments(a, b):
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def _chunk_stats(args):
    rows, seed, chunk_index, count = args
    solver = ClosestPointSolver(GeneratorMatrix(rows))
    return _moments(_chunk_dists(solver, seed, chunk_index, count))


def estimate_nsm(G: GeneratorMatrix, n_samples: int, seed: int,
                 workers: int = 1) -> NsmEstimate:
    """Monte Carlo NSM with unbiased variance of the mean.

    Deterministic for a given seed regardless of ``workers``.
    """
    if n_samples < 2:
        raise ValueError("need at least 2 samples for a variance estimate")
    n = G.dim
    norm = 1.0 / (n * volume(G) ** (2.0 / n))
    chunks = _chunk_bounds(n_samples)

    if workers <= 1 or len(chunks) == 1:
        solver = ClosestPointSolver(G)
        partials = [_local_stats(solver, seed, ci, cnt) for ci, cnt in chunks]
    else:
        args = [(G.rows, seed, ci, cnt) for ci, cnt in chunks]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_chunk_stats, args))

    # combine in fixed chunk order (worker-count independent)
    total = partials[0]
    for part in partials[1:]:
        total = _merge_moments(total, part)
    count, mean_d, m2 = total
    var_d = m2 / (count - 1)
    return NsmEstimate(
        mean=mean_d * norm,
        var_of_mean=var_d * norm * norm / n_samples,
        n_samples=n_samples,
        seed=seed,
    )


def _local_stats(solver, seed, chunk_index, count):
    return _moments(_chunk_dists(solver, seed, chunk_index, count))


def per_sample_dist_sq(G: GeneratorMatrix, n_samples: int, seed: int):
    """Raw squared CVP distances for the deterministic sample stream.

    Test hook: the values feeding :func:`estimate_nsm`, in stream order.
    """
    solver = ClosestPointSolver(G)
    out = [
        _chunk_dists(solver, seed, ci, cnt)
        for ci, cnt in _chunk_bounds(n_samples)
    ]
    return np.concatenate(out)


def per_sample_normalized(G: GeneratorMatrix, n_samples: int, seed: int):
    """Per-sample normalized values y_i whose mean is the NSM estimate."""
    n = G.dim
    norm = 1.0 / (n * volume(G) ** (2.0 / n))
    return per_sample_dist_sq(G, n_samples, seed) * norm


def csv_header() -> str:
    return "lattice_id,n,n_samples,seed,mean,std_of_mean,ci_lo,ci_hi,wall_time_sec"


def csv_row(lattice_id: str, n: int, e: NsmEstimate, wall_time_sec: float,
            z_score: float = 2.0) -> str:
    lo, hi = confidence_interval(e, z_score)
    return (f"{lattice_id},{n},{e.n_samples},{e.seed},{e.mean!r},"
            f"{e.std_of_mean!r},{lo!r},{hi!r},{wall_time_sec:.3f}")
