"""Heavy-tailed degree sequences, P(X=k) proportional to (k+mu)^-alpha on [k_min, k_max]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import SamplingFailed, UnreachableMean
from .realization import erdos_gallai

MU_FLOOR = -1.0 + 1e-12


@dataclass(frozen=True)
class PowerLawSpec:
    alpha: float
    mu: float
    n: int
    k_min: int = 1
    k_max: int | None = None

    def __post_init__(self):
        if self.alpha <= 1:
            raise ValueError("alpha must exceed 1")
        if self.k_max is None:
            object.__setattr__(self, "k_max", self.n - 1)
        if self.mu + self.k_min <= 0:
            raise ValueError("k_min + mu must be positive")

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1, dtype=np.int64)

    def pmf(self) -> np.ndarray:
        return _weights(self.alpha, self.mu, self.support.astype(float))

    def cdf(self) -> np.ndarray:
        c = np.cumsum(self.pmf())
        return c / c[-1]

    def mean(self) -> float:
        return float(np.dot(self.support, self.pmf()))

    def std(self) -> float:
        k = self.support.astype(float)
        w = self.pmf()
        mu1 = np.dot(k, w)
        return float(np.sqrt(max(np.dot(k * k, w) - mu1 * mu1, 0.0)))


def _weights(alpha: float, mu: float, k: np.ndarray) -> np.ndarray:
    logw = -alpha * np.log(k + mu)
    w = np.exp(logw - logw.max())
    return w / w.sum()


def expected_degree(alpha: float, mu: float, n: int, k_min: int = 1) -> float:
    k = np.arange(k_min, n, dtype=float)
    return float(np.dot(k, _weights(alpha, mu, k)))


def tune_mu(alpha: float, z_target: float, n: int, k_min: int = 1) -> float:
    """Shift mu giving mean degree ``z_target`` on support [k_min, n-1].

    The mean grows with mu, from k_min (mu -> -k_min) to about n/2 (mu -> inf),
    so the root is bracketed and found with Brent's method.
    """
    lo = MU_FLOOR - (k_min - 1)
    if n - 1 < k_min:
        raise UnreachableMean(f"empty support for n={n}")
    if z_target <= expected_degree(alpha, lo, n, k_min):
        raise UnreachableMean(f"mean {z_target} is below the reachable range (> {k_min})")
    hi = 1.0
    while expected_degree(alpha, hi, n, k_min) < z_target:
        hi *= 2
        if hi > 1e12:
            raise UnreachableMean(f"mean {z_target} is above the reachable range (< {(n - 1 + k_min) / 2})")

    def gap(mu):
        return expected_degree(alpha, mu, n, k_min) - z_target

    return float(brentq(gap, lo, hi, xtol=1e-14, rtol=1e-12, maxiter=500))


def power_law(alpha: float, z: float, n: int) -> PowerLawSpec:
    """Spec with mu tuned so that the mean degree is ``z``."""
    return PowerLawSpec(alpha, tune_mu(alpha, z, n), n)


def _inverse_cdf(cdf: np.ndarray, k_min: int, size: int, rng) -> np.ndarray:
    idx = np.searchsorted(cdf, rng.random(size), side="right")
    return k_min + np.minimum(idx, len(cdf) - 1)


def draw_degrees(spec: PowerLawSpec, size: int, rng) -> np.ndarray:
    """i.i.d. draws by inverse CDF, no parity or realizability repair."""
    return _inverse_cdf(spec.cdf(), spec.k_min, size, rng)


def sample_sequence(spec: PowerLawSpec, rng, connectable: bool = False,
                    retries: int = 100) -> np.ndarray:
    """Realizable degree sequence of length ``spec.n``.

    An odd total is fixed by redrawing one uniformly chosen entry until the
    total turns even; a non-graphical draw (or, with ``connectable``, one with
    fewer than n-1 edges) is discarded and the whole sequence redrawn.
    """
    if spec.n < 2 or spec.k_max < spec.k_min:
        raise SamplingFailed(f"no degree sequence with min degree {spec.k_min} on {spec.n} vertices")
    cdf = spec.cdf()
    for _ in range(retries):
        d = _inverse_cdf(cdf, spec.k_min, spec.n, rng)
        if d.sum() % 2:
            if spec.k_max == spec.k_min:
                continue
            i = int(rng.integers(spec.n))
            old = d[i]
            while True:
                new = int(_inverse_cdf(cdf, spec.k_min, 1, rng)[0])
                if (new - old) % 2:
                    d[i] = new
                    break
        if connectable and d.sum() < 2 * (spec.n - 1):
            continue
        if erdos_gallai(d):
            return d
    raise SamplingFailed(f"no acceptable sequence after {retries} attempts")
