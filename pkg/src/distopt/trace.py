"""Run traces, budgets and step-size schedules shared by all optimizers."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ConfigurationError

__all__ = ["TraceRecord", "RunTrace", "RunBudget", "StepSchedule", "Recorder", "CSV_COLUMNS"]

CSV_COLUMNS = (
    "round",
    "comm_rounds",
    "sent_numbers",
    "calls_full",
    "calls_stoch",
    "calls_comp",
    "calls_value",
    "subopt",
    "consensus_err",
    "wall_ms",
)

_CALL_COLUMNS = {"calls_full": "full", "calls_stoch": "stochastic", "calls_comp": "component", "calls_value": "value"}


@dataclass(frozen=True)
class TraceRecord:
    round: int
    comm_rounds: int
    sent_numbers: int
    calls: dict
    subopt: float
    consensus_err: float = 0.0
    wall_ms: float = 0.0

    def row(self) -> dict:
        """Flat CSV row; per-node call counts collapse to their maximum."""
        out = {
            "round": self.round,
            "comm_rounds": self.comm_rounds,
            "sent_numbers": self.sent_numbers,
            "subopt": self.subopt,
            "consensus_err": self.consensus_err,
            "wall_ms": self.wall_ms,
        }
        for col, kind in _CALL_COLUMNS.items():
            out[col] = max(self.calls[kind])
        return {c: out[c] for c in CSV_COLUMNS}

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "comm_rounds": self.comm_rounds,
            "sent_numbers": self.sent_numbers,
            "calls": {k: list(v) for k, v in self.calls.items()},
            "subopt": self.subopt,
            "consensus_err": self.consensus_err,
            "wall_ms": self.wall_ms,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            round=d["round"],
            comm_rounds=d["comm_rounds"],
            sent_numbers=d["sent_numbers"],
            calls={k: tuple(v) for k, v in d["calls"].items()},
            subopt=d["subopt"],
            consensus_err=d["consensus_err"],
            wall_ms=d["wall_ms"],
        )


@dataclass
class RunTrace:
    """Audited log of a run.

    ``records`` are appended in round order; ``meta`` carries algorithm
    parameters and derived quantities (chi, depth, batch size, ...);
    ``x`` is the returned iterate.
    """

    algorithm: str
    records: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    x: np.ndarray | None = None

    def append(self, record: TraceRecord):
        if self.records:
            last = self.records[-1]
            if record.round <= last.round:
                raise ValueError("round index must increase strictly")
            if record.comm_rounds < last.comm_rounds or record.sent_numbers < last.sent_numbers:
                raise ValueError("communication counters must not decrease")
            for kind, vals in record.calls.items():
                if any(a < b for a, b in zip(vals, last.calls[kind])):
                    raise ValueError(f"{kind} counters must not decrease")
        if not math.isfinite(record.subopt):
            raise ValueError("suboptimality must be finite")
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    @property
    def final(self) -> TraceRecord:
        return self.records[-1]

    def column(self, name: str) -> np.ndarray:
        if name in _CALL_COLUMNS:
            return np.array([max(r.calls[_CALL_COLUMNS[name]]) for r in self.records])
        return np.array([getattr(r, name) for r in self.records])

    def calls(self, kind: str) -> np.ndarray:
        """Per-node counts of the final record."""
        return np.array(self.final.calls[kind])

    def best_subopt(self) -> np.ndarray:
        """Running minimum of the recorded suboptimality."""
        return np.minimum.accumulate(self.column("subopt"))

    def first_reaching(self, eps: float, column: str = "round"):
        """Value of ``column`` at the first record with subopt <= eps, or None."""
        for rec in self.records:
            if rec.subopt <= eps:
                if column in _CALL_COLUMNS:
                    return max(rec.calls[_CALL_COLUMNS[column]])
                return getattr(rec, column)
        return None


@dataclass(frozen=True)
class RunBudget:
    """Stopping rules; at least one must be finite.

    ``max_iterations`` bounds the round index (outer iterations),
    ``max_rounds`` the communication rounds, ``max_oracle_calls`` the
    worst per-node oracle count of any kind.
    """

    max_iterations: int | None = None
    max_rounds: int | None = None
    max_oracle_calls: int | None = None
    target_eps: float | None = None

    def __post_init__(self):
        if all(v is None for v in (self.max_iterations, self.max_rounds, self.max_oracle_calls, self.target_eps)):
            raise ConfigurationError("budget needs at least one finite bound")
        for name in ("max_iterations", "max_rounds", "max_oracle_calls"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ConfigurationError(f"{name} must be non-negative")

    def iterations(self, default: int = 10**9) -> int:
        return default if self.max_iterations is None else self.max_iterations

    def spent(self, iteration: int, ledger) -> bool:
        if self.max_iterations is not None and iteration >= self.max_iterations:
            return True
        if self.max_rounds is not None and ledger.comm_rounds >= self.max_rounds:
            return True
        if self.max_oracle_calls is not None:
            worst = max(int(ledger.full.max()), int(ledger.stochastic.max()), int(ledger.component.max()), int(ledger.value.max()))
            if worst >= self.max_oracle_calls:
                return True
        return False

    def reached(self, subopt: float) -> bool:
        return self.target_eps is not None and subopt <= self.target_eps


@dataclass(frozen=True)
class StepSchedule:
    """Step sizes h_k.

    ``constant``: h_k = h.  ``inverse_mu``: h_k = 1/(mu (k+1)).
    ``fixed_horizon``: h = min{1/L, R/(M sqrt(N))}.
    """

    kind: str = "constant"
    h: float | None = None
    mu: float | None = None
    L: float | None = None
    R: float | None = None
    M: float | None = None
    horizon: int | None = None

    def __post_init__(self):
        if self.kind == "constant":
            if self.h is None or self.h <= 0:
                raise ConfigurationError("constant schedule needs h > 0")
        elif self.kind == "inverse_mu":
            if self.mu is None or self.mu <= 0:
                raise ConfigurationError("inverse_mu schedule needs mu > 0")
        elif self.kind == "fixed_horizon":
            if None in (self.L, self.R, self.M, self.horizon) or self.L <= 0 or self.R <= 0 or self.horizon < 1:
                raise ConfigurationError("fixed_horizon needs L, R, M and horizon")
        else:
            raise ConfigurationError(f"unknown step schedule {self.kind!r}")

    def __call__(self, k: int) -> float:
        if self.kind == "constant":
            return self.h
        if self.kind == "inverse_mu":
            return 1.0 / (self.mu * (k + 1))
        if self.M == 0:
            return 1.0 / self.L
        return min(1.0 / self.L, self.R / (self.M * math.sqrt(self.horizon)))

    def steps(self, count: int) -> np.ndarray:
        if self.kind == "inverse_mu":
            return 1.0 / (self.mu * np.arange(1, count + 1, dtype=float))
        return np.full(count, self(0))

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


class Recorder:
    """Appends ledger snapshots to a trace at selected rounds.

    ``every`` may be None (every round), an int stride, or an iterable of
    round indices.  Round 0 is always recorded, and :meth:`close` records
    the last round if it was skipped.  ``subopt`` may be a zero-argument
    callable, evaluated only when the record is actually written.
    """

    def __init__(self, trace: RunTrace, problem, every=None, timing: bool = False):
        self.trace, self.problem = trace, problem
        self.timing = timing
        self._t0 = time.perf_counter()
        self._set = None
        self._stride = 1
        if isinstance(every, int):
            if every < 1:
                raise ConfigurationError("record stride must be >= 1")
            self._stride = every
        elif isinstance(every, Iterable):
            self._set = {int(r) for r in every}
        self._pending = None

    def wants(self, k: int) -> bool:
        if k == 0:
            return True
        if self._set is not None:
            return k in self._set
        return k % self._stride == 0

    def _make(self, k, subopt, consensus_err):
        ledger = self.problem.ledger
        if callable(subopt):
            subopt = subopt()
        return TraceRecord(
            round=k,
            comm_rounds=ledger.comm_rounds,
            sent_numbers=ledger.sent_numbers,
            calls={
                "full": tuple(int(v) for v in ledger.full),
                "stochastic": tuple(int(v) for v in ledger.stochastic),
                "component": tuple(int(v) for v in ledger.component),
                "value": tuple(int(v) for v in ledger.value),
            },
            subopt=float(subopt),
            consensus_err=float(consensus_err),
            wall_ms=(time.perf_counter() - self._t0) * 1e3 if self.timing else 0.0,
        )

    def __call__(self, k: int, subopt: float, consensus_err: float = 0.0, force: bool = False):
        if force or self.wants(k):
            self.trace.append(self._make(k, subopt, consensus_err))
            self._pending = None
        else:
            # the ledger is read at close(), which must follow the last call
            self._pending = (k, subopt, consensus_err)

    def close(self):
        if self._pending is not None:
            self.trace.append(self._make(*self._pending))
            self._pending = None
        return self.trace
