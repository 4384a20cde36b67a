"""Random-vector ensembles and estimators for the convergence hypotheses.

Every generator returns an ``(N, n)`` array whose rows are the vectors
f_1..f_N.  Vectors are i.i.d. across rows.  Complex vectors use the
convention ``<u, v> = sum(u * conj(v))`` so that ``f (x) f = f f^*``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
import numpy as np

__all__ = [
    "Kind",
    "EnsembleSpec",
    "HypothesisReport",
    "UnsupportedConfiguration",
    "derive_rng",
    "sample_vectors",
    "predicted_cumulants",
    "estimate_l4_constant",
    "estimate_norm_moments",
    "estimate_cumulant_deviation",
    "hypothesis_report",
]

# rows per batch in the streaming estimators; keeps peak memory modest
_CHUNK_ELEMENTS = 1 << 21


class UnsupportedConfiguration(ValueError):
    pass


class Kind(str, Enum):
    UNIT_SPHERE = "UnitSphere"
    CANONICAL_BASIS = "CanonicalBasis"
    GAUSSIAN_SCALED = "GaussianScaled"
    RADIAL_MIXTURE = "RadialMixture"

    @classmethod
    def parse(cls, name: str) -> "Kind":
        key = name.replace("-", "").replace("_", "").lower()
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        raise ValueError(f"unknown ensemble {name!r}; choose from {[k.value for k in cls]}")


@dataclass(frozen=True)
class EnsembleSpec:
    kind: Kind
    field: str = "complex"
    radii: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind.parse(self.kind) if isinstance(self.kind, str) else self.kind)
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        object.__setattr__(self, "probs", tuple(float(q) for q in self.probs))
        if self.field not in ("real", "complex"):
            raise ValueError(f"field must be 'real' or 'complex', got {self.field!r}")
        if self.kind is Kind.RADIAL_MIXTURE:
            if not self.radii or len(self.radii) != len(self.probs):
                raise ValueError("RadialMixture needs matching radii and probs")
            if any(r <= 0 or not math.isfinite(r) for r in self.radii):
                raise ValueError("radii must be positive and finite")
            if any(q < 0 for q in self.probs) or abs(sum(self.probs) - 1.0) > 1e-12:
                raise ValueError("probs must be nonnegative and sum to 1")
        elif self.radii or self.probs:
            raise ValueError(f"{self.kind.value} takes no radial parameters")

    @property
    def dtype(self):
        return np.complex128 if self.field == "complex" else np.float64

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "field": self.field}
        if self.kind is Kind.RADIAL_MIXTURE:
            out["radii"] = list(self.radii)
            out["probs"] = list(self.probs)
        return out


def derive_rng(seed, *keys: int) -> np.random.Generator:
    """Counter-based stream: the same (seed, keys) always gives the same draws."""
    if isinstance(seed, np.random.Generator):
        if keys:
            raise TypeError("cannot derive keyed streams from a Generator")
        return seed
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(keys)))


def _gaussian(rng: np.random.Generator, shape, field: str) -> np.ndarray:
    if field == "complex":
        z = rng.standard_normal(shape + (2,))
        return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)
    return rng.standard_normal(shape)


def _sphere(rng, shape, field) -> np.ndarray:
    g = _gaussian(rng, shape, field)
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def sample_vectors(spec: EnsembleSpec, n: int, N: int, seed) -> np.ndarray:
    if n < 1 or N < 1:
        raise ValueError("need n >= 1 and N >= 1")
    rng = derive_rng(seed)
    if spec.kind is Kind.UNIT_SPHERE:
        return _sphere(rng, (N, n), spec.field)
    if spec.kind is Kind.GAUSSIAN_SCALED:
        return _gaussian(rng, (N, n), spec.field) / math.sqrt(n)
    if spec.kind is Kind.CANONICAL_BASIS:
        out = np.zeros((N, n), dtype=spec.dtype)
        out[np.arange(N), rng.integers(n, size=N)] = 1.0
        return out
    if spec.kind is Kind.RADIAL_MIXTURE:
        u = _sphere(rng, (N, n), spec.field)
        r = rng.choice(np.asarray(spec.radii), size=N, p=np.asarray(spec.probs))
        return u * r[:, None]
    raise AssertionError(spec.kind)


def predicted_cumulants(spec: EnsembleSpec, lam: float, k_max: int) -> tuple[float, ...]:
    """Limiting free cumulants a_1..a_{k_max} at aspect ratio ``lam = n / N``.

    For every shipped ensemble ``E ||f||^(2k-2) f f^* = c_k I / n`` (exactly,
    or in the limit for GaussianScaled), so summing N copies gives
    ``a_k = c_k / lam``.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    ks = range(1, k_max + 1)
    if spec.kind in (Kind.UNIT_SPHERE, Kind.GAUSSIAN_SCALED):
        return tuple(1.0 / lam for _ in ks)
    if spec.kind is Kind.CANONICAL_BASIS:
        if not math.isclose(lam, 1.0, rel_tol=0, abs_tol=1e-12):
            raise UnsupportedConfiguration("CanonicalBasis is only defined with N = n (lambda = 1)")
        return tuple(1.0 for _ in ks)
    if spec.kind is Kind.RADIAL_MIXTURE:
        return tuple(
            math.fsum(q * r ** (2 * k) for r, q in zip(spec.radii, spec.probs)) / lam for k in ks
        )
    raise AssertionError(spec.kind)


def _chunks(total: int, n: int):
    size = max(1, _CHUNK_ELEMENTS // max(n, 1))
    start = 0
    while start < total:
        stop = min(total, start + size)
        yield start, stop
        start = stop


def _random_directions(rng, count: int, n: int, field: str) -> np.ndarray:
    if count == 0:
        return np.zeros((0, n))
    return _sphere(rng, (count, n), field)


def estimate_l4_constant(spec: EnsembleSpec, n: int, n_directions: int, samples: int, seed) -> float:
    """``n**2`` times the largest sample mean of ``|<f, x>|**4`` over test directions.

    Directions are the n canonical basis vectors plus ``n_directions`` random
    unit vectors.  Since the true supremum is over the whole sphere, the
    returned value is a lower bound for the best constant.
    """
    if samples < 100:
        raise ValueError("samples must be at least 100")
    dirs = _random_directions(derive_rng(seed, 1), n_directions, n, spec.field)
    canon = np.zeros(n)
    rand = np.zeros(n_directions)
    for i, (lo, hi) in enumerate(_chunks(samples, n + n_directions)):
        f = sample_vectors(spec, n, hi - lo, derive_rng(seed, 2, i))
        canon += np.sum(np.abs(f) ** 4, axis=0)
        if n_directions:
            rand += np.sum(np.abs(f @ dirs.conj().T) ** 4, axis=0)
    means = np.concatenate([canon, rand]) / samples
    return float(n**2 * means.max())


def estimate_norm_moments(spec: EnsembleSpec, n: int, k_max: int, samples: int, seed) -> list[float]:
    if samples < 100:
        raise ValueError("samples must be at least 100")
    sums = np.zeros(k_max)
    ks = np.arange(1, k_max + 1)
    for i, (lo, hi) in enumerate(_chunks(samples, n)):
        norms = np.linalg.norm(sample_vectors(spec, n, hi - lo, derive_rng(seed, i)), axis=1)
        sums += np.sum(norms[:, None] ** ks[None, :], axis=0)
    return [float(v) for v in sums / samples]


def estimate_cumulant_deviation(spec: EnsembleSpec, n: int, N: int, k: int, samples: int, seed) -> float:
    """Operator norm of the Monte Carlo estimate of sum_j E||f_j||^(2k-2) f_j f_j^* - a_k I.

    ``a_k`` comes from :func:`predicted_cumulants` at ``lam = n / N``.  With
    i.i.d. rows, ``samples`` draws of the N-vector family pool into
    ``samples * N`` vectors.
    """
    if samples < 50:
        raise ValueError("samples must be at least 50")
    a_k = predicted_cumulants(spec, n / N, k)[k - 1]
    acc = np.zeros((n, n), dtype=spec.dtype)
    for i, (lo, hi) in enumerate(_chunks(samples * N, n)):
        f = sample_vectors(spec, n, hi - lo, derive_rng(seed, i))
        w = np.sum(np.abs(f) ** 2, axis=1) ** (k - 1)
        acc += (f * w[:, None]).T @ f.conj()
    dev = acc / samples - a_k * np.eye(n)
    dev = (dev + dev.conj().T) / 2
    return float(np.max(np.abs(np.linalg.eigvalsh(dev))))


@dataclass
class HypothesisReport:
    ensemble: dict
    n: int
    N: int
    l4_constant: float
    norm_moment_bounds: list[float]
    cumulant_deviations: list[float]
    samples: dict = field(default_factory=dict)
    seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def hypothesis_report(
    spec: EnsembleSpec,
    n: int,
    N: int,
    k_max: int,
    seed: int,
    samples: int = 2000,
    n_directions: int = 64,
    deviation_samples: int = 50,
) -> HypothesisReport:
    return HypothesisReport(
        ensemble=spec.to_dict(),
        n=n,
        N=N,
        l4_constant=estimate_l4_constant(spec, n, n_directions, samples, (seed, 0)),
        norm_moment_bounds=estimate_norm_moments(spec, n, k_max, samples, (seed, 1)),
        cumulant_deviations=[
            estimate_cumulant_deviation(spec, n, N, k, deviation_samples, (seed, 2, k)) for k in range(1, k_max + 1)
        ],
        samples={"l4": samples, "norm": samples, "deviation": deviation_samples, "directions": n_directions},
        seed=seed,
    )
