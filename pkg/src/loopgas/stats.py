"""Reproducible Monte Carlo estimation of the mean loop count.

Sample i of a run with seed s is generated from the substream key
derive_key(s, i), so estimates are bit-identical for any worker count and
any chunking of the index range.  Loop counts are integers; the harness
accumulates exact integer sums of k and k**2 (per-block int64, merged to
Python ints), so the only floating-point step is the final division.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .errors import (CapacityError, SeriesError, SizeError, StatisticsError,
                     StructuralError)
from .rng import derive_key

_MAX_CHUNK = 1 << 16


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo mean of k at one size; variance is the unbiased
    second-cumulant estimate and stderr = sqrt(variance / samples)."""

    p: int
    samples: int
    mean: float
    stderr: float
    variance: float


@dataclass(frozen=True)
class USeries:
    """Entries (ell, u, err) with u_ell = 2*mean_ell - mean_{ell+1}."""

    entries: list[tuple[int, float, float]]


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("LOOPGAS_THREADS")
        threads = int(env) if env else 1
    if threads < 1:
        raise ValueError("thread count must be >= 1")
    return threads


def _chunk_size(p: int) -> int:
    # keep int64 block accumulators exact: chunk * p**2 stays far below 2**63
    return max(1, min(_MAX_CHUNK, (1 << 22) // (p + 1)))


def monte_carlo(p: int, n_samples: int, seed: int,
                threads: int | None = None) -> Estimate:
    """Estimate mean and variance of k from n_samples uniform maps.

    Deterministic given (p, n_samples, seed) regardless of thread count.
    """
    if p < 1:
        raise SizeError("p must be >= 1")
    if n_samples < 2:
        raise StatisticsError("need at least 2 samples for a variance")
    threads = resolve_threads(threads)
    base = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    chunk = _chunk_size(p)
    bounds = list(range(0, n_samples, chunk)) + [n_samples]
    blocks = list(zip(bounds[:-1], bounds[1:]))

    def run(block):
        i0, i1 = block
        return _k.mc_block(p, base, i0, i1)

    try:
        if threads == 1:
            results = [run(b) for b in blocks]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(run, blocks))
    except MemoryError as exc:
        raise CapacityError(f"p={p} exceeds available memory") from exc

    sum_k = 0
    sum_k2 = 0
    k_min = p + 1
    k_max = -1
    for status, sk, sk2, kmin, kmax in results:
        if status != 0:
            raise StructuralError(f"sampling kernel failed (code {status})")
        sum_k += int(sk)
        sum_k2 += int(sk2)
        k_min = min(k_min, int(kmin))
        k_max = max(k_max, int(kmax))
    if k_min < 0 or k_max > p:
        raise StructuralError("loop count outside [0, p]")

    n = n_samples
    mean = sum_k / n
    # unbiased: (1/(N-1)) sum k^2 - (1/(N(N-1))) (sum k)^2, computed from
    # exact integer sums
    var_num = n * sum_k2 - sum_k * sum_k
    variance = var_num / (n * (n - 1))
    stderr = math.sqrt(variance / n) if variance > 0 else 0.0
    return Estimate(p=p, samples=n, mean=mean, stderr=stderr,
                    variance=variance)


def default_sample_count(ell: int, budget: int = 1 << 26) -> int:
    """Default N(ell): min(10**6, budget / 2**ell), at least 2."""
    return max(2, min(10**6, budget >> ell))


def size_sweep(ell_min: int, ell_max: int, n_samples=None, *, seed: int,
               threads: int | None = None,
               budget: int = 1 << 26) -> list[Estimate]:
    """One Estimate per ell in [ell_min, ell_max] at p = 2**ell.

    The per-ell run uses substream ell of the base seed; n_samples may be
    an int, a callable of ell, or None for the budget default.
    """
    if not (1 <= ell_min <= ell_max):
        raise SizeError("need 1 <= ell_min <= ell_max")
    out = []
    for ell in range(ell_min, ell_max + 1):
        if n_samples is None:
            n = default_sample_count(ell, budget)
        elif callable(n_samples):
            n = int(n_samples(ell))
        else:
            n = int(n_samples)
        out.append(monte_carlo(2**ell, n, derive_key(seed, ell),
                               threads=threads))
    return out


def _ell_of(p: int) -> int:
    ell = p.bit_length() - 1
    if 2**ell != p:
        raise SeriesError(f"p={p} is not a power of two")
    return ell


def u_series(estimates: list[Estimate]) -> USeries:
    """u_ell = 2 k_ell - k_{ell+1}, err = sqrt(4 err_ell^2 + err_{ell+1}^2).

    Under the growth law sigma' p + gamma' log p + kappa', u_ell is affine
    in ell with slope gamma' log 2, so the series is a model-free
    diagnostic of the log coefficient.
    """
    by_ell = {}
    for e in estimates:
        by_ell[_ell_of(e.p)] = e
    ells = sorted(by_ell)
    if not ells:
        raise SeriesError("no estimates")
    if ells != list(range(ells[0], ells[-1] + 1)):
        raise SeriesError("size series has gaps")
    entries = []
    for ell in ells[:-1]:
        a, b = by_ell[ell], by_ell[ell + 1]
        u = 2.0 * a.mean - b.mean
        err = math.sqrt(4.0 * a.stderr**2 + b.stderr**2)
        entries.append((ell, u, err))
    return USeries(entries=entries)


# ---------------------------------------------------------------------------
# CSV output (17 significant digits, '#' metadata comments)
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_estimates_csv(estimates, fh, comments=()) -> None:
    for line in comments:
        fh.write(f"# {line}\n")
    fh.write("ell,p,N,mean,stderr,variance\n")
    for e in estimates:
        ell = e.p.bit_length() - 1 if 2 ** (e.p.bit_length() - 1) == e.p else ""
        fh.write(f"{ell},{e.p},{e.samples},{_fmt(e.mean)},{_fmt(e.stderr)},"
                 f"{_fmt(e.variance)}\n")


def write_useries_csv(series: USeries, fh, comments=()) -> None:
    for line in comments:
        fh.write(f"# {line}\n")
    fh.write("ell,u,err\n")
    for ell, u, err in series.entries:
        fh.write(f"{ell},{_fmt(u)},{_fmt(err)}\n")
