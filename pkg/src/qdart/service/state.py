"""Server-side session state: the rating pool, its append-only logs and the
asset index.

Ratings are never stored directly; the outcome and score logs are the
source of truth and are replayed at startup, so killing the server loses
nothing and a restart reproduces identical ratings.
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path

from .. import glicko
from ..corpus import corpus_ids
from ..glicko import Outcome, RatedImage

OUTCOME_LOG = "outcomes.ndjson"
SCORE_LOG = "scores.ndjson"
RUNS_DIR = "runs"


class BusyError(RuntimeError):
    """A different client already owns the single-rater session."""


class SessionStore:
    """Single-writer rating session over an image corpus directory."""

    def __init__(self, corpus_dir, rd_threshold: float = glicko.RD_STOP_THRESHOLD,
                 base_seed: int = 0):
        self.corpus_dir = Path(corpus_dir)
        if not self.corpus_dir.is_dir():
            raise FileNotFoundError(f"corpus directory not found: {self.corpus_dir}")
        self.rd_threshold = float(rd_threshold)
        self.base_seed = int(base_seed)
        self._lock = threading.Lock()
        self._active_client: str | None = None

        ids = corpus_ids(self.corpus_dir)
        if not ids:
            raise ValueError(f"no images found in corpus {self.corpus_dir}")
        for image_id in ids:
            if not (self.corpus_dir / f"{image_id}.png").exists():
                raise FileNotFoundError(
                    f"corpus manifest names {image_id} but {image_id}.png is missing"
                )
        self.ids = ids

        self.outcomes: list[Outcome] = []
        outcome_path = self.corpus_dir / OUTCOME_LOG
        if outcome_path.exists():
            self.outcomes = glicko.read_outcome_log(outcome_path)
        self.pool = glicko.replay_outcomes(ids, self.outcomes)

        score_path = self.corpus_dir / SCORE_LOG
        if score_path.exists():
            with open(score_path) as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    self._set_score(rec["id"], float(rec["score"]))

    def _set_score(self, image_id: str, score: float) -> None:
        rated = self.pool[image_id]
        self.pool[image_id] = glicko.RatedImage(
            image_id=rated.image_id, rating=rated.rating, rd=rated.rd,
            games=rated.games, direct_score=score,
        )

    def _check_client(self, client: str | None) -> None:
        if client is None:
            return
        if self._active_client is None:
            self._active_client = client
        elif self._active_client != client:
            raise BusyError(
                "another rater owns this session; single-artist sessions only"
            )

    def next_pair(self) -> tuple[str, str]:
        with self._lock:
            recent = [
                frozenset((o.a, o.b))
                for o in self.outcomes[-len(self.ids):]
            ]
            return glicko.next_pair(
                list(self.pool.values()),
                rng_seed=self.base_seed + len(self.outcomes),
                recent=recent,
            )

    def record_outcome(self, a: str, b: str, result: str,
                       client: str | None = None) -> tuple[RatedImage, RatedImage]:
        if a not in self.pool or b not in self.pool:
            missing = a if a not in self.pool else b
            raise KeyError(missing)
        outcome = Outcome(a=a, b=b, result=result, ts=time.time())
        with self._lock:
            self._check_client(client)
            glicko.apply_outcome(self.pool, outcome)
            self.outcomes.append(outcome)
            glicko.append_outcome(self.corpus_dir / OUTCOME_LOG, outcome)
        return self.pool[a], self.pool[b]

    def record_score(self, image_id: str, score: float,
                     client: str | None = None) -> None:
        if image_id not in self.pool:
            raise KeyError(image_id)
        with self._lock:
            self._check_client(client)
            self._set_score(image_id, score)
            with open(self.corpus_dir / SCORE_LOG, "a") as fh:
                fh.write(json.dumps({"id": image_id, "score": score},
                                    separators=(",", ":")) + "\n")

    def ratings(self) -> list[RatedImage]:
        with self._lock:
            return sorted(self.pool.values(), key=lambda r: (-r.rating, r.image_id))

    def complete(self) -> bool:
        return glicko.session_complete(self.pool.values(), self.rd_threshold)

    def max_rd(self) -> float:
        return glicko.max_rd(self.pool.values())

    def comparisons(self) -> int:
        return len(self.outcomes)


class AssetIndex:
    """Resolves image ids to PNG/SVG files in the corpus and in run outputs."""

    def __init__(self, corpus_dir, runs_dir=None):
        self.corpus_dir = Path(corpus_dir)
        self.runs_dir = Path(runs_dir) if runs_dir else self.corpus_dir / RUNS_DIR

    def resolve(self, image_id: str, suffix: str) -> Path | None:
        candidate = self.corpus_dir / f"{image_id}{suffix}"
        if candidate.exists():
            return candidate
        if self.runs_dir.is_dir():
            for run_dir in sorted(self.runs_dir.iterdir()):
                candidate = run_dir / "images" / f"{image_id}{suffix}"
                if candidate.exists():
                    return candidate
        return None

    def run_ids(self) -> list[str]:
        if not self.runs_dir.is_dir():
            return []
        return sorted(p.name for p in self.runs_dir.iterdir() if p.is_dir())

    def run_dir(self, run_id: str) -> Path | None:
        if "/" in run_id or "\\" in run_id or run_id in (".", ".."):
            return None
        candidate = self.runs_dir / run_id
        return candidate if candidate.is_dir() else None
