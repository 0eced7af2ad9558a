"""Census of Markov-label multiplicities over coprime sector pairs."""

from __future__ import annotations

import heapq
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .arith import RealEnclosure, enclose_exp, enclose_log
from .markov import labelled_nodes

log = logging.getLogger(__name__)

# above this bound labels are spilled to disk in sorted runs
STREAM_THRESHOLD = 2000


@dataclass
class CensusReport:
    max_q: int
    label_index: dict[int, list[tuple[int, int]]]
    max_multiplicity: int
    petrov_curve: list[tuple[int, RealEnclosure]] = field(default_factory=list)
    pair_count: int = 0

    @property
    def collisions(self) -> list[tuple[int, list[tuple[int, int]]]]:
        return [(m, pts) for m, pts in sorted(self.label_index.items()) if len(pts) > 1]

    def to_dict(self) -> dict:
        return {
            "max_q": self.max_q,
            "max_multiplicity": self.max_multiplicity,
            "pair_count": self.pair_count,
            "collisions": [
                {"label": str(m), "pairs": [list(pt) for pt in pts]} for m, pts in self.collisions
            ],
            "petrov_curve": [
                {"n": str(n), "lo": e.to_strings()[0], "hi": e.to_strings()[1]} for n, e in self.petrov_curve
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _labelled_pairs(max_q: int) -> Iterator[tuple[int, tuple[int, int]]]:
    if max_q >= 1:
        yield 1, (1, 0)
        yield 2, (1, 1)
    for node in labelled_nodes(max_q):
        yield node.label, (node.fraction.q, node.fraction.p)


def petrov_value(n: int, precision_bits: int = 128) -> RealEnclosure:
    """``(log n)^(2/3)`` for ``n >= 2``."""
    ln = enclose_log(n, precision_bits + 16)
    return enclose_exp(enclose_log(ln, precision_bits + 16) * Fraction(2, 3), precision_bits)


def petrov_bound(n: int) -> int:
    """``max(1, ceil((log n)^(2/3)))``, rounded up when the enclosure straddles an integer."""
    if n < 2:
        return 1
    e = petrov_value(n)
    return max(1, -(-e.hi // 1))


def collision_census(
    max_q: int,
    samples: int = 12,
    stream_threshold: int = STREAM_THRESHOLD,
    run_size: int = 200_000,
) -> CensusReport:
    """Bucket every coprime pair with ``q <= max_q`` by its exact Markov number.

    Any bucket with more than one pair contradicts Markov uniqueness and is
    logged at error level.  Above ``stream_threshold`` the pairs are sorted
    on disk in runs and merged; the returned index then holds only the
    buckets with more than one pair.
    """
    if max_q < 1:
        raise ValueError("max_q must be at least 1")
    if max_q > stream_threshold:
        index, count, max_mult, labels = _streamed_census(max_q, run_size, samples)
    else:
        index: dict[int, list[tuple[int, int]]] = {}
        count = 0
        for m, pt in _labelled_pairs(max_q):
            index.setdefault(m, []).append(pt)
            count += 1
        max_mult = max(len(v) for v in index.values())
        labels = sorted(index)
    report = CensusReport(max_q, index, max_mult, pair_count=count)
    for m, pts in report.collisions:
        log.error("Markov label %d shared by %s: counterexample to uniqueness", m, pts)
    big = [n for n in labels if n >= 2]
    if big:
        step = max(1, len(big) // samples)
        picks = big[::step][:samples]
        if big[-1] not in picks:
            picks.append(big[-1])
        report.petrov_curve = [(n, petrov_value(n)) for n in picks]
    return report


def _streamed_census(max_q: int, run_size: int, samples: int):
    runs: list[str] = []
    buf: list[tuple[int, int, int]] = []
    count = 0
    tmpdir = tempfile.mkdtemp(prefix="markov-census-")

    def flush():
        buf.sort()
        fd, path = tempfile.mkstemp(dir=tmpdir, suffix=".run")
        with os.fdopen(fd, "w") as fh:
            for m, q, p in buf:
                fh.write(f"{m} {q} {p}\n")
        runs.append(path)
        buf.clear()

    for m, (q, p) in _labelled_pairs(max_q):
        buf.append((m, q, p))
        count += 1
        if len(buf) >= run_size:
            flush()
    if buf:
        flush()

    def read(path):
        with open(path) as fh:
            for line in fh:
                m, q, p = line.split()
                yield int(m), int(q), int(p)

    repeats: dict[int, list[tuple[int, int]]] = {}
    stride = max(1, count // (4 * samples))
    labels: list[int] = []
    max_mult = 0
    current, bucket, seen = None, [], 0
    try:
        for m, q, p in heapq.merge(*(read(r) for r in runs)):
            if m != current:
                if len(bucket) > 1:
                    repeats[current] = bucket
                if current is not None:
                    max_mult = max(max_mult, len(bucket))
                    if seen % stride == 0:
                        labels.append(current)
                    seen += 1
                current, bucket = m, []
            bucket.append((q, p))
        if current is not None:
            max_mult = max(max_mult, len(bucket))
            labels.append(current)
            if len(bucket) > 1:
                repeats[current] = bucket
    finally:
        for r in runs:
            os.remove(r)
        os.rmdir(tmpdir)
    return repeats, count, max_mult, labels


def multiplicities_within_petrov(report: CensusReport) -> bool:
    return all(len(pts) <= petrov_bound(n) for n, pts in report.label_index.items())
