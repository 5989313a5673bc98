"""Planar point sets with exact rational-distance structure.

A configuration stores points in lattice form: the pair (x, yc) stands for
the real point (x, yc*sqrt(k)) for the configuration's shared squarefree
k >= 1.  In these coordinates every squared distance is the rational
(dx)^2 + k*(dyc)^2, which is what makes exact verification, normalization,
unit-circle inversion, and the collinearity/concyclicity audits possible
without any floating point.

Configurations are immutable; every operation returns fresh values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .exactnum import (
    format_rational,
    is_squarefree,
    parse_rational,
    rational_sqrt,
    squarefree_part,
)


class PlanesetError(ValueError):
    """Base class for domain errors raised by this module."""


class NotRdsMatrixError(PlanesetError):
    """A squared-distance entry is not the square of a rational."""


class MixedFieldError(PlanesetError):
    """Coordinates require incompatible squarefree parts k."""


class NotPlanarError(PlanesetError):
    """No planar point set reproduces the distance matrix."""


@dataclass(frozen=True, order=True)
class LatticePoint:
    """The point (x, yc*sqrt(k)); k is carried by the configuration."""

    x: Fraction
    yc: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "yc", Fraction(self.yc))

    def to_dict(self) -> dict:
        return {"x": format_rational(self.x), "yc": format_rational(self.yc)}

    @classmethod
    def from_dict(cls, d: dict) -> "LatticePoint":
        return cls(parse_rational(d["x"]), parse_rational(d["yc"]))


@dataclass(frozen=True)
class Configuration:
    k: int
    points: tuple[LatticePoint, ...]
    provenance: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        if self.k < 1:
            raise PlanesetError(f"k must be a positive integer, got {self.k}")
        if not is_squarefree(self.k):
            raise PlanesetError(f"k must be squarefree, got {self.k}")
        if len(set(self.points)) != len(self.points):
            raise PlanesetError("configuration points must be pairwise distinct")

    @property
    def n(self) -> int:
        return len(self.points)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "points": [p.to_dict() for p in self.points],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Configuration":
        return cls(
            int(d["k"]),
            tuple(LatticePoint.from_dict(p) for p in d["points"]),
            str(d.get("provenance", "")),
        )


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric matrix of squared distances, zero diagonal."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.entries)
        rows = tuple(tuple(Fraction(e) for e in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise PlanesetError("distance matrix must be square")
            if row[i] != 0:
                raise PlanesetError("distance matrix diagonal must be zero")
            for j in range(n):
                if rows[i][j] != rows[j][i]:
                    raise PlanesetError("distance matrix must be symmetric")
                if i != j and rows[i][j] <= 0:
                    raise PlanesetError("off-diagonal squared distances must be positive")

    @property
    def n(self) -> int:
        return len(self.entries)

    def to_dict(self) -> dict:
        return {"squared": [[format_rational(e) for e in row] for row in self.entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "DistanceMatrix":
        return cls(tuple(tuple(parse_rational(e) for e in row) for row in d["squared"]))


@dataclass(frozen=True)
class VerifyReport:
    is_rds: bool
    failing_pairs: tuple[tuple[int, int, Fraction], ...]
    distances: tuple[tuple[Fraction | None, ...], ...]

    def to_dict(self) -> dict:
        return {
            "is_rds": self.is_rds,
            "failing_pairs": [
                {"i": i, "j": j, "squared": format_rational(sq)}
                for i, j, sq in self.failing_pairs
            ],
            "distances": [
                [None if e is None else format_rational(e) for e in row]
                for row in self.distances
            ],
        }


@dataclass(frozen=True)
class AuditReport:
    n: int
    line_threshold: int
    circle_threshold: int
    max_collinear: int
    max_concyclic: int
    literal_ok: bool
    strong_ok: bool
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "line_threshold": self.line_threshold,
            "circle_threshold": self.circle_threshold,
            "max_collinear": self.max_collinear,
            "max_concyclic": self.max_concyclic,
            "literal_ok": self.literal_ok,
            "strong_ok": self.strong_ok,
            "witnesses": {key: list(val) for key, val in self.witnesses.items()},
        }


def squared_distance(p: LatticePoint, q: LatticePoint, k: int) -> Fraction:
    dx = p.x - q.x
    dy = p.yc - q.yc
    return dx * dx + k * dy * dy


def distance_matrix(c: Configuration) -> DistanceMatrix:
    pts = c.points
    rows = tuple(
        tuple(squared_distance(p, q, c.k) for q in pts) for p in pts
    )
    return DistanceMatrix(rows)


def verify_rds(c: Configuration) -> VerifyReport:
    """Check that every pairwise distance is rational; report failures."""
    n = c.n
    dist: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    failing: list[tuple[int, int, Fraction]] = []
    for i in range(n):
        dist[i][i] = Fraction(0)
        for j in range(i + 1, n):
            sq = squared_distance(c.points[i], c.points[j], c.k)
            r = rational_sqrt(sq)
            if r is None:
                failing.append((i, j, sq))
            else:
                dist[i][j] = dist[j][i] = r
    return VerifyReport(
        is_rds=not failing,
        failing_pairs=tuple(failing),
        distances=tuple(tuple(row) for row in dist),
    )


def embed_from_distances(m: DistanceMatrix, provenance: str = "embed_from_distances") -> Configuration:
    """Realize a squared-distance matrix as a lattice configuration.

    The first two points land at (0,0) and (1,0) after rescaling every
    distance by 1/d(0,1); the shared k is the common squarefree part of the
    leftover vertical components.  Signs are resolved greedily (first
    nonzero yc positive, later signs matched against one cross distance
    each) and the whole matrix is re-verified at the end.
    """
    n = m.n
    if n < 2:
        raise PlanesetError("embedding needs at least two points")
    for i in range(n):
        for j in range(i + 1, n):
            if rational_sqrt(m.entries[i][j]) is None:
                raise NotRdsMatrixError(
                    f"not an RDS matrix: entry ({i},{j}) = {m.entries[i][j]} is not a rational square"
                )
    scale = m.entries[0][1]  # squared distances scale by 1/d(0,1)^2
    sq = [[e / scale for e in row] for row in m.entries]

    xs: list[Fraction] = []
    verticals: list[Fraction] = []  # squared vertical component per point
    for p in range(n):
        x = (sq[0][p] + 1 - sq[1][p]) / 2
        t = sq[0][p] - x * x
        if t < 0:
            raise NotPlanarError(
                f"not planar: point {p} has negative squared vertical component {t}"
            )
        xs.append(x)
        verticals.append(t)

    parts = {squarefree_part(t)[0] for t in verticals if t != 0}
    if len(parts) > 1:
        raise MixedFieldError(f"mixed field: squarefree parts {sorted(parts)} all occur")
    k = parts.pop() if parts else 1
    roots: list[Fraction] = []
    for t in verticals:
        # t = k * yc^2 exactly, so t/k is a rational square by construction
        root = rational_sqrt(t / k) if t != 0 else Fraction(0)
        assert root is not None
        roots.append(root)

    ycs: list[Fraction] = [Fraction(0)] * n
    anchor: int | None = None
    for p in range(n):
        if roots[p] == 0:
            continue
        if anchor is None:
            ycs[p] = roots[p]  # first nonzero vertical takes the positive sign
            anchor = p
            continue
        picked = False
        for sign in (1, -1):
            cand = sign * roots[p]
            dx = xs[p] - xs[anchor]
            dy = cand - ycs[anchor]
            if dx * dx + k * dy * dy == sq[anchor][p]:
                ycs[p] = cand
                picked = True
                break
        if not picked:
            raise NotPlanarError(
                f"not planar: no sign of point {p} matches its distance to point {anchor}"
            )

    pts = tuple(LatticePoint(xs[p], ycs[p]) for p in range(n))
    for i in range(n):
        for j in range(i + 1, n):
            got = squared_distance(pts[i], pts[j], k)
            if got != sq[i][j]:
                raise NotPlanarError(
                    f"not planar: embedded distance ({i},{j}) is {got}, expected {sq[i][j]}"
                )
    return Configuration(k, pts, provenance)


def normalize(c: Configuration) -> Configuration:
    """Canonical lattice form: first two points to (0,0), (1,0); idempotent."""
    if c.n < 2:
        raise PlanesetError("normalization needs at least two points")
    report = verify_rds(c)
    if not report.is_rds:
        raise PlanesetError(
            f"not an RDS: {len(report.failing_pairs)} pairwise distances are irrational"
        )
    out = embed_from_distances(distance_matrix(c), provenance=c.provenance)
    return out


def collinear(p1: LatticePoint, p2: LatticePoint, p3: LatticePoint) -> bool:
    """Exact 3x3 determinant test in lattice coordinates.

    With y = yc*sqrt(k) the true determinant is sqrt(k) times the lattice
    one, so vanishing is k-independent.
    """
    det = (p2.x - p1.x) * (p3.yc - p1.yc) - (p3.x - p1.x) * (p2.yc - p1.yc)
    return det == 0


def concyclic(
    p1: LatticePoint, p2: LatticePoint, p3: LatticePoint, p4: LatticePoint, k: int
) -> bool:
    """True iff the four points lie on a common circle or line.

    4x4 determinant with leading column x^2 + k*yc^2; combine with
    ``collinear`` to separate genuine circles from lines.
    """
    pts = (p1, p2, p3, p4)
    if len(set(pts)) != 4:
        raise PlanesetError("concyclic test requires four distinct points")
    rows = [(p.x * p.x + k * p.yc * p.yc, p.x, p.yc, Fraction(1)) for p in pts]
    top = rows[0]
    reduced = [
        [rows[i][c] - top[c] for c in range(4)] for i in range(1, 4)
    ]
    det = (
        reduced[0][0] * (reduced[1][1] * reduced[2][2] - reduced[1][2] * reduced[2][1])
        - reduced[0][1] * (reduced[1][0] * reduced[2][2] - reduced[1][2] * reduced[2][0])
        + reduced[0][2] * (reduced[1][0] * reduced[2][1] - reduced[1][1] * reduced[2][0])
    )
    return det == 0


def _max_collinear(c: Configuration) -> tuple[int, tuple[int, ...]]:
    n = c.n
    if n <= 2:
        return n, tuple(range(n))
    best, witness = 2, (0, 1)
    for i, j in itertools.combinations(range(n), 2):
        members = [i, j]
        for p in range(n):
            if p != i and p != j and collinear(c.points[i], c.points[j], c.points[p]):
                members.append(p)
        if len(members) > best:
            best, witness = len(members), tuple(sorted(members))
    return best, witness


def _max_concyclic(c: Configuration) -> tuple[int, tuple[int, ...]]:
    # Genuine circles only: seed with non-collinear triples, then test the
    # rest against the circle-or-line determinant (the seed rules out lines).
    n = c.n
    if n <= 2:
        return n, tuple(range(n))
    best, witness = 2, (0, 1)
    for i, j, l in itertools.combinations(range(n), 3):
        if collinear(c.points[i], c.points[j], c.points[l]):
            continue
        members = [i, j, l]
        for p in range(n):
            if p in (i, j, l):
                continue
            if concyclic(c.points[i], c.points[j], c.points[l], c.points[p], c.k):
                members.append(p)
        if len(members) > best:
            best, witness = len(members), tuple(sorted(members))
    return best, witness


def audit_general_position(c: Configuration) -> AuditReport:
    """Exhaustive exact audit of collinear and concyclic subset sizes.

    literal_ok follows the cardinality-(n-4)/(n-3) reading with vacuous
    containment counting (the empty subset lies on every line, so n = 4 can
    never pass literally); strong_ok is the no-3-collinear, no-4-concyclic
    predicate.
    """
    n = c.n
    max_col, wit_col = _max_collinear(c)
    max_cyc, wit_cyc = _max_concyclic(c)
    line_violated = n >= 4 and max_col >= n - 4
    circle_violated = n >= 3 and max_cyc >= n - 3
    witnesses: dict = {}
    if max_col >= 3:
        witnesses["collinear"] = wit_col
    if max_cyc >= 4:
        witnesses["concyclic"] = wit_cyc
    return AuditReport(
        n=n,
        line_threshold=n - 4,
        circle_threshold=n - 3,
        max_collinear=max_col,
        max_concyclic=max_cyc,
        literal_ok=not (line_violated or circle_violated),
        strong_ok=max_col <= 2 and max_cyc <= 3,
        witnesses=witnesses,
    )


def invert(c: Configuration, center_index: int) -> Configuration:
    """Inversion in the unit circle centered at points[center_index].

    The center is kept fixed and excluded from the mapping; every other
    point A maps to P + (A-P)/|A-P|^2, which stays in the lattice because
    |A-P|^2 is rational.  Applied twice at the same center this is the
    identity, and it preserves the rational-distance property.
    """
    if not 0 <= center_index < c.n:
        raise PlanesetError(f"center index {center_index} out of range")
    report = verify_rds(c)
    if not report.is_rds:
        raise PlanesetError("inversion requires a rational distance set")
    center = c.points[center_index]
    out = []
    for idx, p in enumerate(c.points):
        if idx == center_index:
            out.append(p)
            continue
        rho = squared_distance(p, center, c.k)
        out.append(
            LatticePoint(
                center.x + (p.x - center.x) / rho,
                center.yc + (p.yc - center.yc) / rho,
            )
        )
    return Configuration(c.k, tuple(out), c.provenance)
