"""Message compression operators.

Two RandK flavours ship side by side: ``randk_scaled`` multiplies the kept
coordinates by n/k and is unbiased with E|Q(z) - z|^2 = (n/k - 1)|z|^2,
``randk_plain`` keeps them as they are and is a contraction with
E|Q(z) - z|^2 = (1 - k/n)|z|^2.  TopK is a deterministic contraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "Compressor",
    "top_k",
    "rand_k",
    "simplex_vertex",
    "message_cost",
    "compress",
    "KINDS",
]

KINDS = ("identity", "topk", "randk_scaled", "randk_plain", "simplex_vertex")


def _check_k(n, k):
    if not 1 <= k <= n:
        raise ConfigurationError(f"need 1 <= k <= n, got k={k}, n={n}")


def top_k(z, k: int) -> np.ndarray:
    """Keep the ``k`` largest-magnitude entries; ties go to the lower index."""
    z = np.asarray(z, dtype=float)
    _check_k(z.size, k)
    keep = np.argsort(-np.abs(z), kind="stable")[:k]
    out = np.zeros_like(z)
    out[keep] = z[keep]
    return out


def rand_k(z, k: int, rng, scaled: bool = True) -> np.ndarray:
    """Keep a uniformly random ``k``-subset, optionally rescaled by ``n/k``."""
    z = np.asarray(z, dtype=float)
    n = z.size
    _check_k(n, k)
    if k == n:
        return z.copy()
    keep = rng.choice(n, size=k, replace=False)
    out = np.zeros_like(z)
    out[keep] = z[keep] * (n / k) if scaled else z[keep]
    return out


def simplex_vertex(p, rng, tol: float = 1e-9, one_hot: bool = True):
    """Sample a vertex ``e_i`` of the simplex with probability ``p_i``.

    ``p`` is renormalized after the tolerance check.  Returns the one-hot
    vector, or the index when ``one_hot`` is false.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < -tol):
        raise ConfigurationError("probability vector has negative entries")
    if abs(p.sum() - 1.0) > tol:
        raise ConfigurationError(f"probabilities sum to {p.sum()}, not 1")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    i = int(rng.choice(p.size, p=p))
    if not one_hot:
        return i
    out = np.zeros_like(p)
    out[i] = 1.0
    return out


@dataclass(frozen=True)
class Compressor:
    """A named compression operator.  ``k`` is ignored for identity and simplex."""

    kind: str = "identity"
    k: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown compressor {self.kind!r}")
        if self.kind in ("topk", "randk_scaled", "randk_plain") and (self.k is None or self.k < 1):
            raise ConfigurationError(f"{self.kind} needs k >= 1")

    @property
    def unbiased(self) -> bool:
        return self.kind in ("identity", "randk_scaled", "simplex_vertex")

    def q(self, n: int) -> float:
        """Declared contraction parameter ``q = k/n`` (1 for identity)."""
        if self.kind == "identity":
            return 1.0
        if self.kind == "simplex_vertex":
            return 1.0 / n
        _check_k(n, self.k)
        return self.k / n

    def omega(self, n: int) -> float:
        """Variance factor of an unbiased operator: E|Q(z) - z|^2 <= omega |z|^2."""
        if self.kind == "identity":
            return 0.0
        if self.kind == "randk_scaled":
            _check_k(n, self.k)
            return n / self.k - 1.0
        if self.kind == "simplex_vertex":
            # signed-vertex sampling: E|Q(z)|^2 = |z|_1^2 <= n |z|^2
            return n - 1.0
        raise ConfigurationError(f"{self.kind} is biased")

    def __call__(self, z, rng=None):
        return compress(self, z, rng)


def compress(comp: Compressor, z, rng=None) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if comp.kind == "identity":
        return z
    if comp.kind == "topk":
        return top_k(z, comp.k)
    if comp.kind in ("randk_scaled", "randk_plain"):
        return rand_k(z, comp.k, rng, scaled=comp.kind == "randk_scaled")
    # simplex_vertex on an arbitrary vector: sample i ~ |z_i|/|z|_1 and send
    # |z|_1 sign(z_i) e_i, which is unbiased and equals the plain vertex
    # sampling when z is a probability vector
    norm1 = np.abs(z).sum()
    out = np.zeros_like(z)
    if norm1 == 0:
        return out
    i = simplex_vertex(np.abs(z) / norm1, rng, one_hot=False)
    out[i] = norm1 * np.sign(z[i])
    return out


def message_cost(comp: Compressor, n: int) -> int:
    """Numbers transmitted for one compressed n-vector (values plus indices)."""
    if comp.kind == "identity":
        return n
    if comp.kind == "simplex_vertex":
        return 1
    _check_k(n, comp.k)
    return 2 * comp.k
