"""Aesthetic fitness from mean intensity, plus the rank-correlation tooling
used to pick a computable proxy out of the metric battery.

The fitness is a piecewise-linear hat over mean intensity: zero at or below
``mu_min``, rising to 1 at ``gamma``, falling back to zero at ``mu_max``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import stdtr

from .metrics import MetricVector


@dataclass(frozen=True)
class FitnessConfig:
    mu_min: float = 0.05
    mu_max: float = 0.95
    gamma: float = 0.75

    def __post_init__(self):
        if not 0.0 <= self.mu_min < self.gamma < self.mu_max <= 1.0:
            raise ValueError(
                "fitness config needs 0 <= mu_min < gamma < mu_max <= 1, got "
                f"({self.mu_min}, {self.gamma}, {self.mu_max})"
            )

    @classmethod
    def from_config(cls, cfg: dict | None) -> "FitnessConfig":
        if not cfg:
            return cls()
        return cls(
            mu_min=float(cfg.get("mu_min", 0.05)),
            mu_max=float(cfg.get("mu_max", 0.95)),
            gamma=float(cfg.get("gamma", 0.75)),
        )


def hat_fitness(mu, cfg: FitnessConfig = FitnessConfig()):
    """Evaluate the hat on one or many mean-intensity values."""
    mu = np.asarray(mu, dtype=np.float64)
    rising = (mu - cfg.mu_min) / (cfg.gamma - cfg.mu_min)
    falling = (cfg.mu_max - mu) / (cfg.mu_max - cfg.gamma)
    out = np.where(mu <= cfg.gamma, rising, falling)
    out = np.where((mu <= cfg.mu_min) | (mu >= cfg.mu_max), 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def fitness(img: np.ndarray, cfg: FitnessConfig = FitnessConfig()) -> float:
    """Fitness of a grayscale image: the hat applied to its mean intensity."""
    img = np.asarray(img, dtype=np.float64)
    if img.size == 0:
        raise ValueError("empty image")
    return float(hat_fitness(float(img.mean()), cfg))


def rank_with_ties(values) -> np.ndarray:
    """1-based ranks, ties sharing their average rank."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> tuple[float, float]:
    """Tie-aware Spearman rank correlation with a t-approximation p-value."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1-D and the same length")
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 observations")
    rx = rank_with_ties(x)
    ry = rank_with_ties(y)
    sx = rx - rx.mean()
    sy = ry - ry.mean()
    denom = np.sqrt((sx @ sx) * (sy @ sy))
    if denom == 0.0:
        raise ValueError("constant input has no rank correlation")
    rho = float(np.clip((sx @ sy) / denom, -1.0, 1.0))
    if abs(rho) == 1.0:
        return rho, 0.0
    t = rho * np.sqrt((n - 2) / (1.0 - rho * rho))
    p = float(2.0 * stdtr(n - 2, -abs(t)))
    return rho, p


@dataclass(frozen=True)
class CorrelationEntry:
    metric: str
    target: str  # "score" or "glicko"
    rho: float
    p_value: float
    n: int


@dataclass(frozen=True)
class CorrelationReport:
    entries: tuple[CorrelationEntry, ...]
    agreement: CorrelationEntry | None  # direct score vs glicko rating
    skipped: tuple[str, ...]            # constant or too-small columns
    missing_ids: tuple[str, ...]        # ids lacking a metric or target value

    def top_metric(self, target: str | None = None) -> str:
        for e in self.entries:
            if target is None or e.target == target:
                return e.metric
        raise ValueError("empty correlation report")

    def to_text(self) -> str:
        lines = ["metric          target   rho       p-value     n"]
        for e in self.entries:
            lines.append(
                f"{e.metric:<15} {e.target:<8} {e.rho:+.4f}   {e.p_value:.3g}   {e.n}"
            )
        if self.agreement is not None:
            a = self.agreement
            lines.append("")
            lines.append(
                f"ranking-method agreement (score vs glicko): "
                f"rho={a.rho:+.4f} p={a.p_value:.3g} n={a.n}"
            )
        if self.skipped:
            lines.append(f"skipped columns: {', '.join(self.skipped)}")
        if self.missing_ids:
            lines.append(f"ids missing from an input: {len(self.missing_ids)}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["metric", "target", "rho", "p_value", "n"])
            for e in self.entries:
                writer.writerow([e.metric, e.target, f"{e.rho:.12g}",
                                 f"{e.p_value:.12g}", e.n])
            if self.agreement is not None:
                a = self.agreement
                writer.writerow([a.metric, a.target, f"{a.rho:.12g}",
                                 f"{a.p_value:.12g}", a.n])


def proxy_selection(
    metrics: dict[str, MetricVector],
    scores: dict[str, float] | None = None,
    ratings: dict[str, float] | None = None,
) -> CorrelationReport:
    """Correlate every metric column with the artist rankings.

    Entries are sorted by |rho| descending, so the first row is the metric
    best aligned with the artist's judgment. Requires at least one of
    ``scores`` (direct 0-5) or ``ratings`` (pairwise-tournament ratings).
    """
    targets: list[tuple[str, dict[str, float]]] = []
    if scores:
        targets.append(("score", scores))
    if ratings:
        targets.append(("glicko", ratings))
    if not targets:
        raise ValueError("need direct scores and/or tournament ratings")

    entries: list[CorrelationEntry] = []
    skipped: list[str] = []
    missing: set[str] = set()
    for target_name, target in targets:
        shared = sorted(set(metrics) & set(target))
        missing |= (set(metrics) ^ set(target))
        if len(shared) < 3:
            raise ValueError(
                f"only {len(shared)} shared ids between metrics and {target_name}"
            )
        t_vals = np.array([target[i] for i in shared])
        for name in MetricVector.names:
            m_vals = np.array([getattr(metrics[i], name) for i in shared])
            try:
                rho, p = spearman(m_vals, t_vals)
            except ValueError:
                skipped.append(f"{name}/{target_name}")
                continue
            entries.append(CorrelationEntry(name, target_name, rho, p, len(shared)))

    agreement = None
    if scores and ratings:
        shared = sorted(set(scores) & set(ratings))
        if len(shared) >= 3:
            rho, p = spearman(
                np.array([scores[i] for i in shared]),
                np.array([ratings[i] for i in shared]),
            )
            agreement = CorrelationEntry("score", "glicko", rho, p, len(shared))

    entries.sort(key=lambda e: (-abs(e.rho), e.metric, e.target))
    return CorrelationReport(
        entries=tuple(entries),
        agreement=agreement,
        skipped=tuple(skipped),
        missing_ids=tuple(sorted(missing)),
    )
