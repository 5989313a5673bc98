"""Fixture generators and a bounded-height exhaustive search.

The search enumerates lattice points (p/q, (r/q') * sqrt(k)) with bounded
numerators and denominators, extends partial sets one grid point at a time,
and discards a branch the moment any pairwise squared distance fails to be
a rational square.  Complete sets are filtered by the requested
general-position predicate, mapped to a canonical representative of their
similarity class (first two points at (0,0) and (1,0), lexicographically
minimal point order, reflection resolved by the embedding's sign rule), and
deduplicated on the sorted multiset of canonical squared distances with
exact comparison on collision.

Work is partitioned by the index of the first grid point, which is also the
checkpoint granularity: checkpoints record exhausted index ranges plus the
finds so far, merges are set unions, and resuming yields bit-identical
results.  Workers share nothing; the RDS_THREADS environment variable caps
parallelism.
"""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd

from .exactnum import is_squarefree, rational_sqrt
from .planeset import (
    Configuration,
    DistanceMatrix,
    LatticePoint,
    audit_general_position,
    distance_matrix,
    embed_from_distances,
    squared_distance,
)


class SearchgenError(ValueError):
    """Base class for domain errors raised by this module."""


class Requirement(str, Enum):
    ANY = "any"
    STRONG = "strong_general_position"
    LITERAL = "literal_general_position"


@dataclass(frozen=True)
class SearchSpec:
    k: int
    numerator_bound: int
    denominator_bound: int
    target_size: int
    require: Requirement = Requirement.ANY

    def __post_init__(self) -> None:
        object.__setattr__(self, "require", Requirement(self.require))
        if self.numerator_bound < 1 or self.denominator_bound < 1:
            raise SearchgenError("bounds must be positive")
        if self.target_size < 3:
            raise SearchgenError("target size must be at least 3")
        if self.k < 1 or not is_squarefree(self.k):
            raise SearchgenError(f"k must be a positive squarefree integer, got {self.k}")

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "numerator_bound": self.numerator_bound,
            "denominator_bound": self.denominator_bound,
            "target_size": self.target_size,
            "require": self.require.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SearchSpec":
        return cls(
            int(d["k"]),
            int(d["numerator_bound"]),
            int(d["denominator_bound"]),
            int(d["target_size"]),
            Requirement(d.get("require", "any")),
        )


@dataclass(frozen=True)
class SearchCheckpoint:
    spec: SearchSpec
    frontier: tuple[Configuration, ...]
    found: tuple[Configuration, ...]
    exhausted_ranges: tuple[tuple[int, int], ...]

    def complete(self) -> bool:
        return not self.frontier

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "frontier": [c.to_dict() for c in self.frontier],
            "found": [c.to_dict() for c in self.found],
            "exhausted_ranges": [list(r) for r in self.exhausted_ranges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SearchCheckpoint":
        return cls(
            SearchSpec.from_dict(d["spec"]),
            tuple(Configuration.from_dict(c) for c in d["frontier"]),
            tuple(Configuration.from_dict(c) for c in d["found"]),
            tuple((int(lo), int(hi)) for lo, hi in d["exhausted_ranges"]),
        )


# ---------------------------------------------------------------------------
# generators


def generate_line_rds(n: int, offsets: "list[Fraction | int]") -> Configuration:
    """Collinear fixture: points (offset_i, 0) with k = 1; always an RDS."""
    offs = [Fraction(o) for o in offsets]
    if len(offs) != n:
        raise SearchgenError(f"expected {n} offsets, got {len(offs)}")
    if len(set(offs)) != len(offs):
        raise SearchgenError("offsets must be distinct")
    return Configuration(
        1, tuple(LatticePoint(o, Fraction(0)) for o in offs), provenance="line-rds"
    )


def _primitive_triples(limit: int):
    # Euclid parametrization: odd leg m^2 - n^2, even leg 2mn, hypotenuse
    # m^2 + n^2, primitive iff gcd(m, n) = 1 with m - n odd.
    for m in range(2, limit + 1):
        for n in range(1, m):
            if (m - n) % 2 == 1 and gcd(m, n) == 1:
                yield m * m - n * n, 2 * m * n, m * m + n * n


def generate_circle_rds(n: int, parameter_bound: int = 200) -> Configuration:
    """Concyclic fixture: n points on the unit circle with rational chords.

    Uses angles 2*theta with (cos theta, sin theta) = (odd leg, even leg)
    over the hypotenuse of distinct primitive right triangles, plus the
    anchor (1, 0); every chord is 2*|sin(theta_i - theta_j)|, a rational.
    """
    if n < 1:
        raise SearchgenError("need at least one point")
    points: list[LatticePoint] = [LatticePoint(Fraction(1), Fraction(0))]
    for a, b, c in _primitive_triples(parameter_bound):
        if len(points) == n:
            break
        cos_t = Fraction(a, c)
        sin_t = Fraction(b, c)
        points.append(LatticePoint(1 - 2 * sin_t * sin_t, 2 * sin_t * cos_t))
    if len(points) < n:
        raise SearchgenError(
            f"not enough primitive triples with parameter <= {parameter_bound} "
            f"for {n} points; raise parameter_bound"
        )
    return Configuration(1, tuple(points[:n]), provenance="circle-rds")


# ---------------------------------------------------------------------------
# canonical forms


def grid_points(spec: SearchSpec) -> tuple[LatticePoint, ...]:
    """The search grid in a deterministic (sorted) order."""
    values = sorted(
        {
            Fraction(p, q)
            for q in range(1, spec.denominator_bound + 1)
            for p in range(-spec.numerator_bound, spec.numerator_bound + 1)
        }
    )
    return tuple(
        LatticePoint(x, y) for x in values for y in values
    )


def canonical_form(c: Configuration) -> Configuration:
    """Lexicographically minimal normalized representative of a similarity class.

    Minimizes the embedded point tuple over all orderings of the points
    (factorial cost: meant for the small configurations this search emits).
    """
    if c.n < 2:
        raise SearchgenError("canonical form needs at least two points")
    m = distance_matrix(c)
    best: Configuration | None = None
    best_key = None
    for perm in itertools.permutations(range(c.n)):
        entries = tuple(tuple(m.entries[i][j] for j in perm) for i in perm)
        cand = embed_from_distances(DistanceMatrix(entries), provenance="canonical")
        key = (cand.k, tuple((p.x, p.yc) for p in cand.points))
        if best_key is None or key < best_key:
            best, best_key = cand, key
    assert best is not None
    return best


def _dedup_key(c: Configuration) -> tuple:
    m = distance_matrix(c)
    return tuple(
        sorted(m.entries[i][j] for i in range(c.n) for j in range(i + 1, c.n))
    )


def _config_sort_key(c: Configuration) -> tuple:
    return (c.k, tuple((p.x, p.yc) for p in c.points))


# ---------------------------------------------------------------------------
# search proper


def _satisfies(c: Configuration, require: Requirement) -> bool:
    if require is Requirement.ANY:
        return True
    report = audit_general_position(c)
    return report.strong_ok if require is Requirement.STRONG else report.literal_ok


def _search_one_cell(
    spec: SearchSpec, grid: tuple[LatticePoint, ...], cell: int
) -> list[Configuration]:
    k = spec.k
    target = spec.target_size
    out: list[Configuration] = []

    def extend(chosen: list[LatticePoint], start: int) -> None:
        if len(chosen) == target:
            cfg = Configuration(k, tuple(chosen))
            if _satisfies(cfg, spec.require):
                out.append(canonical_form(cfg))
            return
        for idx in range(start, len(grid)):
            q = grid[idx]
            if all(
                rational_sqrt(squared_distance(p, q, k)) is not None for p in chosen
            ):
                chosen.append(q)
                extend(chosen, idx + 1)
                chosen.pop()

    extend([grid[cell]], cell + 1)
    return out


def _run_cells_job(spec_json: str, cells: tuple[int, ...]) -> list[dict]:
    # module-level so process pools can pickle it
    spec = SearchSpec.from_dict(json.loads(spec_json))
    grid = grid_points(spec)
    out = []
    for cell in cells:
        out.extend(c.to_dict() for c in _search_one_cell(spec, grid, cell))
    return out


def _merge_ranges(cells) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for cell in sorted(set(cells)):
        if out and out[-1][1] == cell:
            out[-1][1] = cell + 1
        else:
            out.append([cell, cell + 1])
    return tuple((lo, hi) for lo, hi in out)


def _cells_of_ranges(ranges) -> set[int]:
    out: set[int] = set()
    for lo, hi in ranges:
        out.update(range(lo, hi))
    return out


def search(
    spec: SearchSpec | None = None,
    checkpoint: SearchCheckpoint | None = None,
    workers: int = 1,
    max_cells: int | None = None,
    progress=None,
) -> SearchCheckpoint:
    """Exhaust the bounded grid (or the checkpoint's remaining cells).

    Deterministic for a given spec regardless of worker count or where the
    run is split; ``max_cells`` bounds how many first-point cells this call
    processes so long runs can checkpoint and resume.  ``progress`` is an
    optional callable receiving one dict per processed cell batch.
    """
    if spec is None and checkpoint is None:
        raise SearchgenError("either a spec or a checkpoint is required")
    if checkpoint is not None:
        if spec is not None and spec != checkpoint.spec:
            raise SearchgenError("checkpoint was produced by a different spec")
        spec = checkpoint.spec
    assert spec is not None

    grid = grid_points(spec)
    exhausted = _cells_of_ranges(checkpoint.exhausted_ranges) if checkpoint else set()
    pending = [c for c in range(len(grid)) if c not in exhausted]
    todo = pending if max_cells is None else pending[:max_cells]

    found: dict[tuple, dict[tuple, Configuration]] = {}

    def absorb(cfg: Configuration) -> None:
        bucket = found.setdefault(_dedup_key(cfg), {})
        bucket.setdefault(_config_sort_key(cfg), cfg)

    if checkpoint:
        for cfg in checkpoint.found:
            absorb(cfg)

    env_cap = os.environ.get("RDS_THREADS")
    if env_cap is not None:
        try:
            cap = int(env_cap)
        except ValueError:
            raise SearchgenError(f"RDS_THREADS must be a positive integer, got {env_cap!r}")
        if cap < 1:
            raise SearchgenError(f"RDS_THREADS must be a positive integer, got {cap}")
        workers = min(workers, cap)
    workers = max(1, min(workers, len(todo) or 1))

    if workers == 1:
        for cell in todo:
            for cfg in _search_one_cell(spec, grid, cell):
                absorb(cfg)
            if progress is not None:
                progress({"event": "cell", "cell": cell, "classes": sum(map(len, found.values()))})
    else:
        spec_json = json.dumps(spec.to_dict())
        chunks = [tuple(todo[i::workers]) for i in range(workers)]
        chunks = [ch for ch in chunks if ch]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            for chunk, results in zip(chunks, pool.map(_run_cells_job, itertools.repeat(spec_json), chunks)):
                for item in results:
                    absorb(Configuration.from_dict(item))
                if progress is not None:
                    progress({"event": "chunk", "cells": len(chunk), "classes": sum(map(len, found.values()))})

    done_cells = exhausted | set(todo)
    remaining = [c for c in range(len(grid)) if c not in done_cells]
    all_found = sorted(
        (cfg for bucket in found.values() for cfg in bucket.values()),
        key=_config_sort_key,
    )
    return SearchCheckpoint(
        spec=spec,
        frontier=tuple(
            Configuration(spec.k, (grid[c],), provenance=f"cell:{c}") for c in remaining
        ),
        found=tuple(all_found),
        exhausted_ranges=_merge_ranges(done_cells),
    )


