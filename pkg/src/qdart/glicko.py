"""Glicko ratings for pairwise image tournaments.

Each image is a player with a rating and a rating deviation (RD); RD only
shrinks as outcomes accrue, and a session is complete once every image's RD
falls under the stopping threshold. Outcomes are kept in an append-only
line-JSON log whose replay reproduces the ratings bit for bit.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

INITIAL_RATING = 1500.0
INITIAL_RD = 350.0
RD_STOP_THRESHOLD = 250.0
_Q = math.log(10.0) / 400.0

RESULTS = ("a", "b", "draw")


@dataclass(frozen=True)
class RatedImage:
    image_id: str
    rating: float = INITIAL_RATING
    rd: float = INITIAL_RD
    games: int = 0
    direct_score: float | None = None

    def __post_init__(self):
        if not 0.0 < self.rd <= INITIAL_RD:
            raise ValueError(f"rd must be in (0, {INITIAL_RD}]: {self.rd!r}")
        if self.games < 0:
            raise ValueError("games must be >= 0")
        if self.direct_score is not None and not 0.0 <= self.direct_score <= 5.0:
            raise ValueError(f"direct score out of [0, 5]: {self.direct_score!r}")


@dataclass(frozen=True)
class Outcome:
    a: str
    b: str
    result: str  # "a", "b" or "draw"
    ts: float

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("an image cannot play itself")
        if self.result not in RESULTS:
            raise ValueError(f"result must be one of {RESULTS}: {self.result!r}")


def g_factor(rd: float) -> float:
    return 1.0 / math.sqrt(1.0 + 3.0 * _Q * _Q * rd * rd / (math.pi * math.pi))


def expected_score(rating: float, opp_rating: float, opp_rd: float) -> float:
    return 1.0 / (1.0 + 10.0 ** (-g_factor(opp_rd) * (rating - opp_rating) / 400.0))


def glicko_update(
    player: RatedImage,
    opponents: Sequence[tuple[float, float, float]],
) -> RatedImage:
    """Apply one rating period of ``(rating, rd, score)`` results.

    Scores are 1 for a win, 0 for a loss, 0.5 for a draw. The update always
    shrinks RD for a non-empty opponent list; an empty list is rejected so a
    silent no-op cannot hide a lost outcome.
    """
    if not opponents:
        raise ValueError("empty opponent list; nothing to update")
    d2_inv = 0.0
    delta = 0.0
    for opp_rating, opp_rd, score in opponents:
        if score not in (0.0, 0.5, 1.0):
            raise ValueError(f"score must be 0, 0.5 or 1: {score!r}")
        g = g_factor(opp_rd)
        e = expected_score(player.rating, opp_rating, opp_rd)
        d2_inv += _Q * _Q * g * g * e * (1.0 - e)
        delta += g * (score - e)
    denom = 1.0 / (player.rd * player.rd) + d2_inv
    new_rating = player.rating + (_Q / denom) * delta
    new_rd = math.sqrt(1.0 / denom)
    return replace(
        player,
        rating=new_rating,
        rd=new_rd,
        games=player.games + len(opponents),
    )


def apply_outcome(pool: dict[str, RatedImage], outcome: Outcome) -> None:
    """Update both players from their pre-game states."""
    a = pool[outcome.a]
    b = pool[outcome.b]
    score_a = {"a": 1.0, "b": 0.0, "draw": 0.5}[outcome.result]
    pool[outcome.a] = glicko_update(a, [(b.rating, b.rd, score_a)])
    pool[outcome.b] = glicko_update(b, [(a.rating, a.rd, 1.0 - score_a)])


def replay_outcomes(
    image_ids: Iterable[str],
    outcomes: Iterable[Outcome],
) -> dict[str, RatedImage]:
    """Fold an outcome log over a fresh pool; deterministic and bit-stable."""
    pool = {image_id: RatedImage(image_id) for image_id in image_ids}
    for outcome in outcomes:
        apply_outcome(pool, outcome)
    return pool


def next_pair(
    pool: Sequence[RatedImage],
    rng_seed: int,
    recent: Iterable[frozenset] | None = None,
    nearest: int = 10,
) -> tuple[str, str]:
    """Pick the next comparison: the highest-RD image against an opponent
    sampled from its ``nearest`` rating neighbours, skipping recently played
    pairs when another choice exists."""
    if len(pool) < 2:
        raise ValueError("need at least 2 images to pair")
    recent_set = set(recent or ())
    focus = min(pool, key=lambda r: (-r.rd, r.image_id))
    others = [r for r in pool if r.image_id != focus.image_id]
    others.sort(key=lambda r: (abs(r.rating - focus.rating), -r.rd, r.image_id))
    candidates = others[:nearest]
    fresh = [
        r for r in candidates
        if frozenset((focus.image_id, r.image_id)) not in recent_set
    ]
    if fresh:
        candidates = fresh
    rng = np.random.default_rng(rng_seed)
    pick = candidates[int(rng.integers(len(candidates)))]
    return focus.image_id, pick.image_id


def session_complete(pool: Iterable[RatedImage], rd_threshold: float = RD_STOP_THRESHOLD) -> bool:
    return all(r.rd < rd_threshold for r in pool)


def max_rd(pool: Iterable[RatedImage]) -> float:
    rds = [r.rd for r in pool]
    return max(rds) if rds else 0.0


def outcome_to_json(outcome: Outcome) -> str:
    return json.dumps(
        {"a": outcome.a, "b": outcome.b, "result": outcome.result, "ts": outcome.ts},
        separators=(",", ":"),
    )


def outcome_from_json(line: str) -> Outcome:
    rec = json.loads(line)
    return Outcome(a=rec["a"], b=rec["b"], result=rec["result"], ts=float(rec["ts"]))


def read_outcome_log(path) -> list[Outcome]:
    outcomes = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                outcomes.append(outcome_from_json(line))
    return outcomes


def append_outcome(path, outcome: Outcome) -> None:
    with open(path, "a") as fh:
        fh.write(outcome_to_json(outcome) + "\n")


def make_outcome(a: str, b: str, result: str, ts: float | None = None) -> Outcome:
    return Outcome(a=a, b=b, result=result, ts=time.time() if ts is None else ts)


def write_ratings_csv(pool: Iterable[RatedImage], path) -> None:
    """Export ``id,rating,rd,games,direct_score`` sorted by rating."""
    import csv

    ranked = sorted(pool, key=lambda r: (-r.rating, r.image_id))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "rating", "rd", "games", "direct_score"])
        for r in ranked:
            score = "" if r.direct_score is None else f"{r.direct_score:.12g}"
            writer.writerow([r.image_id, f"{r.rating:.12g}", f"{r.rd:.12g}",
                             r.games, score])
