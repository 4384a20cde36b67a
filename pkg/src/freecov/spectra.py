"""Sample covariance matrices, normalized trace moments and Monte Carlo estimates."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ensembles import EnsembleSpec, derive_rng, sample_vectors
from .partitions import SetPartition, is_noncrossing

__all__ = [
    "ExperimentError",
    "MomentEstimate",
    "PartitionContribution",
    "assemble",
    "check_covariance",
    "spectrum",
    "trace_moments",
    "trace_moments_oracle",
    "mc_moments",
    "falling_factorial",
    "partition_contribution",
    "esd_histogram",
]

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class MomentEstimate:
    p: int
    mean: float
    std_error: float
    trials: int
    aborted: int = 0


@dataclass(frozen=True)
class PartitionContribution:
    partition: SetPartition
    estimate: float
    std_error: float
    crossing: bool
    imag: float = 0.0
    imag_std_error: float = 0.0
    trials: int = 0


def assemble(vectors: np.ndarray) -> np.ndarray:
    """S = sum_j f_j f_j^* for the rows f_j of ``vectors``."""
    F = np.asarray(vectors)
    if F.ndim != 2:
        raise ValueError(f"expected an (N, n) array of vectors, got shape {F.shape}")
    S = F.T @ F.conj()
    return (S + S.conj().T) / 2


def check_covariance(S: np.ndarray) -> None:
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"not a square matrix: {S.shape}")
    if np.max(np.abs(S - S.conj().T), initial=0.0) > HERMITIAN_TOL * max(1.0, np.max(np.abs(S), initial=0.0)):
        raise ValueError("matrix is not Hermitian")
    ev = np.linalg.eigvalsh(S)
    if ev.size and ev[0] < -PSD_TOL * max(ev[-1], 0.0) - 1e-300:
        raise ValueError(f"matrix is not positive semidefinite (smallest eigenvalue {ev[0]:.3g})")


def spectrum(S: np.ndarray) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    return np.linalg.eigvalsh(S)


def _moments_from_eigenvalues(ev: np.ndarray, n: int, p_max: int) -> list[float]:
    top = float(ev.max(initial=0.0))
    ev = np.where(ev < 0, np.where(ev >= -PSD_TOL * top, 0.0, ev), ev)
    out = []
    power = np.ones_like(ev)
    for _ in range(p_max):
        power = power * ev
        out.append(math.fsum(power) / n)
    return out


def trace_moments(S: np.ndarray, p_max: int) -> list[float]:
    """(1/n) tr S^p for p = 1..p_max, from one eigendecomposition."""
    if p_max < 1:
        raise ValueError("p_max must be at least 1")
    return _moments_from_eigenvalues(spectrum(S), S.shape[0], p_max)


def trace_moments_oracle(S: np.ndarray, p_max: int) -> list[float]:
    """(1/n) tr S^p by repeated matrix multiplication."""
    n = S.shape[0]
    out = []
    power = np.eye(n, dtype=S.dtype)
    for _ in range(p_max):
        power = power @ S
        out.append(float(np.real(np.trace(power))) / n)
    return out


def _trial_moments(spec: EnsembleSpec, n: int, N: int, p_max: int, seed, trial: int) -> list[float]:
    F = sample_vectors(spec, n, N, derive_rng(seed, trial))
    # the N x N Gram matrix shares the nonzero spectrum of S
    G = F.conj() @ F.T if N < n else F.T @ F.conj()
    diag = np.diagonal(G)
    if np.count_nonzero(G) == np.count_nonzero(diag):
        ev = np.sort(diag.real)  # exactly diagonal, e.g. canonical-basis vectors
    else:
        ev = np.linalg.eigvalsh((G + G.conj().T) / 2)
    return _moments_from_eigenvalues(ev, n, p_max)


def _mean_and_se(values: Sequence[float]) -> tuple[float, float]:
    k = len(values)
    mean = math.fsum(values) / k
    if k < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (k - 1)
    return mean, math.sqrt(var / k)


def mc_moments(
    spec: EnsembleSpec, n: int, N: int, p_max: int, trials: int, seed, workers: int = 1
) -> list[MomentEstimate]:
    """Monte Carlo estimates of E tr S^p, p = 1..p_max.

    Trial t draws its vectors from the stream ``(seed, t)``, so results do not
    depend on ``workers`` or on execution order.
    """
    if trials < 2:
        raise ValueError("trials must be at least 2")
    if p_max < 1:
        raise ValueError("p_max must be at least 1")

    def run(t: int):
        try:
            return _trial_moments(spec, n, N, p_max, seed, t)
        except np.linalg.LinAlgError:
            return None

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, range(trials)))
    else:
        results = [run(t) for t in range(trials)]
    good = [r for r in results if r is not None]
    aborted = trials - len(good)
    if aborted > 0.01 * trials or len(good) < 2:
        raise ExperimentError(f"{aborted} of {trials} trials aborted on numerical errors")
    out = []
    for p in range(1, p_max + 1):
        mean, se = _mean_and_se([r[p - 1] for r in good])
        out.append(MomentEstimate(p, mean, se, len(good), aborted))
    return out


def falling_factorial(N: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= N - i
    return out


def _chain_values(g: np.ndarray, labels: Sequence[int]) -> np.ndarray:
    """tr of prod_i g_{b(i)} g_{b(i)}^* for a batch ``g`` of shape (trials, blocks, n).

    The trace collapses to prod_i g_{b(i)}^* g_{b(i+1)} (indices cyclic),
    i.e. prod_i <g_{b(i+1)}, g_{b(i)}>.
    """
    p = len(labels)
    out = np.ones(g.shape[0], dtype=complex)
    for i in range(p):
        u = g[:, labels[i], :]
        v = g[:, labels[(i + 1) % p], :]
        out *= np.sum(u.conj() * v, axis=1)
    return out


def partition_contribution(
    spec: EnsembleSpec, pi: SetPartition, n: int, N: int, trials: int, seed
) -> PartitionContribution:
    """Estimate the sum over words j with ker j = pi of E tr prod_i f_{j(i)} f_{j(i)}^*.

    For i.i.d. vectors every such word has the same expectation, and there
    are (N)_{|pi|} of them, so one trial needs only |pi| fresh vectors.
    """
    if len(pi) > N:
        raise ValueError(f"partition has {len(pi)} blocks but only N = {N} vectors")
    if trials < 2:
        raise ValueError("trials must be at least 2")
    labels = pi.block_labels()
    b = len(pi)
    values = []
    batch = max(1, (1 << 20) // (b * n))
    for i, start in enumerate(range(0, trials, batch)):
        size = min(batch, trials - start)
        g = sample_vectors(spec, n, size * b, derive_rng(seed, i)).reshape(size, b, n)
        values.append(_chain_values(g, labels))
    chain = np.concatenate(values)
    scale = falling_factorial(N, b) / n
    re_mean, re_se = _mean_and_se(chain.real.tolist())
    im_mean, im_se = _mean_and_se(chain.imag.tolist())
    return PartitionContribution(
        partition=pi,
        estimate=scale * re_mean,
        std_error=scale * re_se,
        crossing=not is_noncrossing(pi),
        imag=scale * im_mean,
        imag_std_error=scale * im_se,
        trials=trials,
    )


def esd_histogram(S_or_eigenvalues: np.ndarray, bins: int, value_range: tuple[float, float]) -> list[int]:
    """Counts of eigenvalues in ``bins`` equal bins over ``value_range``.

    Accepts a matrix or a 1-d array of eigenvalues.  Out-of-range eigenvalues
    are dropped.
    """
    if bins < 1:
        raise ValueError("bins must be at least 1")
    lo, hi = value_range
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise ValueError(f"degenerate range {value_range}")
    arr = np.asarray(S_or_eigenvalues)
    ev = spectrum(arr) if arr.ndim == 2 else arr
    counts, _ = np.histogram(ev, bins=bins, range=(lo, hi))
    return [int(c) for c in counts]
