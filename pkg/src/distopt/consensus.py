"""Averaging protocols: plain gossip and Chebyshev-accelerated gossip.

Both operate on a node matrix ``X`` whose row ``k`` is node ``k``'s
vector.  One multiplication by ``W`` is one communication round.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BudgetExceeded, ConfigurationError, UnsupportedCombination
from .topology import GossipMatrix, Schedule

__all__ = [
    "consensus_error",
    "gossip_round",
    "plain_consensus",
    "chebyshev_consensus",
    "ChebyshevIteration",
    "chebyshev_to_tolerance",
    "chebyshev_depth",
    "plain_depth",
]


def consensus_error(X) -> float:
    """Largest distance of a row from the row mean."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return float(np.linalg.norm(X - X.mean(axis=0), axis=1).max())


def _as_matrix(X):
    X = np.asarray(X, dtype=float)
    return X[:, None] if X.ndim == 1 else X


def _charge(ledger, gm, X):
    if ledger is not None:
        # every node sends its vector to each neighbour
        ledger.communicate(1, 2 * gm.edges * X.shape[1])


def gossip_round(W, X, ledger=None):
    """One round ``X' = W X``."""
    gm = W if isinstance(W, GossipMatrix) else None
    mat = gm.W if gm is not None else np.asarray(W, dtype=float)
    squeeze = np.ndim(X) == 1
    X = _as_matrix(X)
    if mat.shape[1] != X.shape[0]:
        raise ConfigurationError(f"W is {mat.shape}, X has {X.shape[0]} rows")
    out = mat @ X
    if ledger is not None:
        edges = gm.edges if gm is not None else int((np.count_nonzero(mat) - mat.shape[0]) // 2)
        ledger.communicate(1, 2 * edges * X.shape[1])
    return out[:, 0] if squeeze else out


def plain_consensus(schedule, X, tol: float, max_rounds: int = 1_000_000, ledger=None, start_round: int = 0):
    """Gossip until the consensus error drops by a factor ``tol``.

    Returns ``(X', rounds)``.  ``schedule`` may be a :class:`Schedule`, a
    :class:`GossipMatrix` or a plain matrix.
    """
    if not 0 < tol < 1:
        raise ConfigurationError("tol must lie in (0, 1)")
    squeeze = np.ndim(X) == 1
    X = _as_matrix(X).copy()
    target = tol * consensus_error(X)
    rounds = 0
    while consensus_error(X) > target:
        if rounds >= max_rounds:
            raise BudgetExceeded(f"consensus not reached in {max_rounds} rounds", partial=X)
        W = schedule(start_round + rounds) if isinstance(schedule, Schedule) else schedule
        X = gossip_round(W, X, ledger)
        rounds += 1
    return (X[:, 0] if squeeze else X), rounds


def _interval(gm: GossipMatrix):
    # non-consensus eigenvalues of W lie in [lo, hi]
    return gm.smallest_eigenvalue, gm.second_eigenvalue


class ChebyshevIteration:
    """Three-term recurrence for p_k(W) X with p_k(1) = 1.

    p_k(w) = T_k(alpha w - beta) / T_k(alpha - beta), where the affine map
    sends the non-consensus interval onto [-1, 1].  The ratios
    c_{k-1}/c_k are propagated instead of T_k(alpha - beta) itself, which
    would overflow for deep recurrences.
    """

    def __init__(self, gm: GossipMatrix, X, ledger=None):
        self.gm, self.ledger = gm, ledger
        lo, hi = _interval(gm)
        self.exact = hi - lo <= 1e-14
        if not self.exact:
            self.alpha = 2.0 / (hi - lo)
            self.beta = (hi + lo) / (hi - lo)
            self.gamma = self.alpha - self.beta
        self.prev = None
        self.cur = X
        self.ratio = None
        self.k = 0

    def _apply(self, Y):
        _charge(self.ledger, self.gm, Y)
        return self.gm.W @ Y

    def step(self):
        if self.exact:
            # the non-consensus spectrum is {0}: one round averages exactly
            self.prev, self.cur = self.cur, self._apply(self.cur)
        elif self.k == 0:
            self.ratio = 1.0 / self.gamma
            nxt = self.ratio * (self.alpha * self._apply(self.cur) - self.beta * self.cur)
            self.prev, self.cur = self.cur, nxt
        else:
            ratio = 1.0 / (2.0 * self.gamma - self.ratio)
            Y = self.alpha * self._apply(self.cur) - self.beta * self.cur
            nxt = 2.0 * ratio * Y - ratio * self.ratio * self.prev
            self.prev, self.cur, self.ratio = self.cur, nxt, ratio
        self.k += 1
        return self.cur


def chebyshev_consensus(gm, X, rounds: int, ledger=None):
    """Apply the degree-``rounds`` Chebyshev averaging polynomial to ``X``.

    Column means are preserved; every non-consensus eigencomponent is
    damped by at most ``1/T_rounds(alpha - beta) ~ 2 exp(-2 rounds/sqrt(chi))``.
    """
    if isinstance(gm, Schedule):
        if not gm.is_static:
            raise UnsupportedCombination("Chebyshev consensus needs a static topology; use plain gossip")
        gm = gm.static_matrix
    if rounds < 0:
        raise ConfigurationError("rounds must be non-negative")
    squeeze = np.ndim(X) == 1
    X = _as_matrix(X)
    if X.shape[0] != gm.m:
        raise ConfigurationError(f"X has {X.shape[0]} rows for {gm.m} nodes")
    cheb = ChebyshevIteration(gm, X, ledger)
    for _ in range(rounds):
        cheb.step()
    out = cheb.cur
    return out[:, 0] if squeeze else out


def chebyshev_to_tolerance(gm, X, tol: float, max_rounds: int = 1_000_000, ledger=None):
    """Run the recurrence until the consensus error drops by ``tol``; returns ``(X', rounds)``."""
    if isinstance(gm, Schedule):
        if not gm.is_static:
            raise UnsupportedCombination("Chebyshev consensus needs a static topology")
        gm = gm.static_matrix
    if not 0 < tol < 1:
        raise ConfigurationError("tol must lie in (0, 1)")
    squeeze = np.ndim(X) == 1
    X = _as_matrix(X)
    target = tol * consensus_error(X)
    cheb = ChebyshevIteration(gm, X, ledger)
    while consensus_error(cheb.cur) > target:
        if cheb.k >= max_rounds:
            raise BudgetExceeded(f"consensus not reached in {max_rounds} rounds", partial=cheb.cur)
        cheb.step()
    out = cheb.cur
    return (out[:, 0] if squeeze else out), cheb.k


def chebyshev_depth(chi: float, delta: float) -> int:
    """Rounds per optimizer iteration: ``ceil(sqrt(chi) ln(max(chi, 10)/delta))``."""
    if delta <= 0:
        raise ConfigurationError("delta must be positive")
    return max(1, math.ceil(math.sqrt(chi) * math.log(max(chi, 10.0) / delta)))


def plain_depth(chi: float, delta: float) -> int:
    """Plain-gossip counterpart of :func:`chebyshev_depth` (chi instead of sqrt(chi))."""
    if delta <= 0:
        raise ConfigurationError("delta must be positive")
    return max(1, math.ceil(chi * math.log(max(chi, 10.0) / delta)))
