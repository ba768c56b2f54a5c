"""Simulated sixfold-coincidence acquisition and the estimators applied to it.

Error model: counts are multinomial given the number of events ``N``.  For a
+/-1 valued statistic with mean ``E`` the standard error is
``sqrt((1 - E**2) / N)``; for a general per-outcome score ``f`` it is
``sqrt((<f^2> - <f>^2) / N)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .optics import AnalyzerSetting, BASIS_PAULI, settings_for
from .qstate import n_qubits, outcome_distribution, outcome_labels, parity_signs
from .witness import PauliObservable


@dataclass(frozen=True)
class CountTable:
    settings: tuple[AnalyzerSetting, ...]
    counts: np.ndarray
    duration_hours: float | None = None
    rate_per_hour: float | None = None
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "settings", tuple(self.settings))
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (2 ** len(self.settings),):
            raise ValueError(f"expected {2 ** len(self.settings)} counts, got shape {counts.shape}")
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def basis(self) -> str | None:
        names = {s.basis for s in self.settings}
        return names.pop() if len(names) == 1 else None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        basis = self.basis or ""
        w.writerow(["# basis", basis, "events", self.total, "duration_hours", _blank(self.duration_hours),
                    "rate_per_hour", _blank(self.rate_per_hour), "seed", _blank(self.seed)])
        for label, c in zip(outcome_labels(self.settings), self.counts):
            w.writerow([label, int(c)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CountTable":
        """Parse :meth:`to_csv` output; errors name the offending line."""
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or not rows[0] or rows[0][0] != "# basis":
            raise ValueError("line 1: missing '# basis' metadata header")
        head = rows[0]
        meta = dict(zip(head[2::2], head[3::2]))
        basis = head[1]
        body = [(i, r) for i, r in enumerate(rows[1:], start=2) if r]
        n = int(round(math.log2(len(body)))) if body else 0
        if not body or 2**n != len(body):
            raise ValueError(f"line {len(rows)}: expected 2**n count rows, got {len(body)}")
        settings = settings_for(basis, n) if basis else [AnalyzerSetting()] * n
        expected = outcome_labels(settings)
        counts = []
        for (lineno, row), lab in zip(body, expected):
            if len(row) != 2:
                raise ValueError(f"line {lineno}: expected 'label,count'")
            if basis and row[0] != lab:
                raise ValueError(f"line {lineno}: expected label {lab}, got {row[0]}")
            try:
                c = int(row[1])
            except ValueError:
                raise ValueError(f"line {lineno}: count {row[1]!r} is not an integer") from None
            if c < 0:
                raise ValueError(f"line {lineno}: negative count")
            counts.append(c)

        def num(key, cast=float):
            val = meta.get(key, "")
            return cast(val) if val not in ("", None) else None

        return cls(settings, np.array(counts), num("duration_hours"), num("rate_per_hour"), num("seed", int))


def _blank(x):
    return "" if x is None else x


@dataclass(frozen=True)
class Estimate:
    value: float
    standard_error: float
    sample_size: int

    def __str__(self):
        return f"{self.value:+.3f} +/- {self.standard_error:.3f} (N={self.sample_size})"


def sample_counts(
    state: np.ndarray,
    settings: Sequence[AnalyzerSetting],
    events: int | None = None,
    duration_hours: float | None = None,
    rate_per_hour: float | None = None,
    seed: int | None = None,
) -> CountTable:
    """Multinomial draw of ``events`` outcomes, or of ``Poisson(duration * rate)`` outcomes."""
    rng = np.random.default_rng(seed)
    if events is None:
        if duration_hours is None or rate_per_hour is None:
            raise ValueError("give either events or both duration_hours and rate_per_hour")
        if duration_hours < 0 or rate_per_hour < 0:
            raise ValueError("duration and rate must be non-negative")
        events = int(rng.poisson(duration_hours * rate_per_hour))
    if events < 0:
        raise ValueError("events must be non-negative")
    probs = outcome_distribution(state, settings)
    probs = probs / probs.sum()
    counts = rng.multinomial(events, probs)
    return CountTable(tuple(settings), counts, duration_hours, rate_per_hour, seed)


def _score_estimate(table: CountTable, score: np.ndarray) -> Estimate:
    n = table.total
    if n == 0:
        raise ValueError("no events in count table")
    freq = table.counts / n
    mean = float(score @ freq)
    var = max(float((score**2) @ freq) - mean**2, 0.0)
    return Estimate(mean, math.sqrt(var / n), n)


def estimate_correlation(table: CountTable) -> Estimate:
    """Parity average with multinomial standard error ``sqrt((1 - E^2) / N)``."""
    return _score_estimate(table, parity_signs(len(table.settings)).astype(float))


def estimate_probabilities(table: CountTable) -> tuple[np.ndarray, np.ndarray]:
    """Relative frequencies and their binomial standard errors."""
    n = table.total
    if n == 0:
        raise ValueError("no events in count table")
    p = table.counts / n
    return p, np.sqrt(p * (1 - p) / n)


def noise_residual_correlation(measured: Sequence[float | Estimate], p_hat: float, ideal: Sequence[float]) -> list[float]:
    """``(E_i - p_hat * ideal_i) / (1 - p_hat)``: the correlation left for the noise part."""
    if not 0 <= p_hat < 1:
        raise ValueError("p_hat must lie in [0, 1)")
    vals = [m.value if isinstance(m, Estimate) else float(m) for m in measured]
    return [(e - p_hat * t) / (1 - p_hat) for e, t in zip(vals, ideal)]


def setting_scores(obs: PauliObservable, letter: str) -> np.ndarray:
    """Per-outcome score of all words of ``obs`` using only ``letter``, measured in that basis."""
    n = obs.n
    idx = np.arange(2**n)
    score = np.zeros(2**n)
    for word, c in obs.terms.items():
        letters = set(word) - {"I"}
        if letters != {letter}:
            continue
        pop = np.zeros_like(idx)
        for q, ch in enumerate(word):
            if ch != "I":
                pop += (idx >> (n - 1 - q)) & 1
        score += c * (1 - 2 * (pop & 1))
    return score


def estimate_witness(obs: PauliObservable, tables: Mapping[str, CountTable]) -> Estimate:
    """Expectation of a single-type witness from one table per named basis.

    ``tables`` maps basis names ("HV", "DA", "LR") to count tables; errors of
    the independent settings add in quadrature.
    """
    if not obs.single_type():
        raise ValueError("witness mixes Pauli letters within a word; three settings do not suffice")
    value, var = obs.identity_coefficient, 0.0
    by_letter = {BASIS_PAULI[b]: t for b, t in tables.items()}
    for letter in sorted(obs.settings_needed()):
        if letter not in by_letter:
            raise KeyError(f"no count table for the {letter} setting")
        est = _score_estimate(by_letter[letter], setting_scores(obs, letter))
        value += est.value
        var += est.standard_error**2
    return Estimate(value, math.sqrt(var), min(t.total for t in tables.values()))


def expected_events(duration_hours: float, rate_per_hour: float) -> float:
    return duration_hours * rate_per_hour
