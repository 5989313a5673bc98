"""Plane curves, isotropic lines, and the double-cover construction.

This module works in lattice coordinates: a configuration point (a, b)
stands for the real point (a, b*sqrt(k)), curves are homogeneous rational
polynomials f(x, y, z), and the distance form is (dx)^2 + k*(dy)^2.  The
isotropic line through P = (a, b) is (x - az) + omega*(y - bz) = 0 with
omega^2 = -k; it passes through the circular point Q = (-omega, 1, 0), and
its conjugate uses -omega.  Restricting f to the parametrization
(a - omega*t, b + t, 1) turns intersection counting into exact univariate
root-multiplicity bookkeeping over Q(omega).

The selection routine picks a triple of base points whose six isotropic
lines meet the curve transversely at enough points for the double cover
w^2 = q1*q2*q3 on f = 0 to have the expected ramification; the cover's
genus is reported exactly when the branch points can be certified affine,
simple, and unshared, and as the generic interval otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .exactnum import (
    ImQuadElement,
    ImQuadPoly,
    format_rational,
    omega,
    parse_rational,
    squarefree_decomposition,
)
from .planeset import Configuration, LatticePoint


class CurveliftError(ValueError):
    """Base class for domain errors raised by this module."""


class UseInversionFirstError(CurveliftError):
    """Degree-2 curves are handled by inverting the configuration first."""


class LineIsComponentError(CurveliftError):
    """The isotropic line is contained in the curve."""


class IrrationalReflectionError(CurveliftError):
    """No affine reflection exists in the lattice for this line."""


class ThresholdError(CurveliftError):
    """Too few candidate points for the requested degree."""


class HypothesisViolationError(CurveliftError):
    """Greedy selection could not reach the transverse-count bound."""

    def __init__(self, message: str, transcript: tuple = ()) -> None:
        super().__init__(message)
        self.transcript = transcript


# ---------------------------------------------------------------------------
# trivariate polynomial helpers (exponent-triple -> coefficient dicts)


def _poly_norm(items) -> dict:
    out: dict[tuple[int, int, int], Fraction] = {}
    for (i, j, l), c in items:
        c = Fraction(c)
        if c == 0:
            continue
        key = (i, j, l)
        acc = out.get(key, Fraction(0)) + c
        if acc == 0:
            out.pop(key, None)
        else:
            out[key] = acc
    return out


def _poly_mul(p: dict, q: dict) -> dict:
    return _poly_norm(
        ((ip + iq, jp + jq, lp + lq), cp * cq)
        for (ip, jp, lp), cp in p.items()
        for (iq, jq, lq), cq in q.items()
    )


def _poly_diff(p: dict, axis: int) -> dict:
    out = []
    for exps, c in p.items():
        e = exps[axis]
        if e == 0:
            continue
        new = list(exps)
        new[axis] = e - 1
        out.append((tuple(new), c * e))
    return _poly_norm(out)


def _poly_eval(p: dict, x, y, z):
    acc = None
    for (i, j, l), c in p.items():
        term = c * x**i * y**j * z**l
        acc = term if acc is None else acc + term
    if acc is None:
        return Fraction(0)
    return acc


def quadric_polynomial(base: LatticePoint, k: int) -> dict:
    """The distance quadric (x - az)^2 + k*(y - bz)^2 through (a, b)."""
    a, b = base.x, base.yc
    return _poly_norm(
        [
            ((2, 0, 0), Fraction(1)),
            ((1, 0, 1), -2 * a),
            ((0, 2, 0), Fraction(k)),
            ((0, 1, 1), -2 * k * b),
            ((0, 0, 2), a * a + k * b * b),
        ]
    )


@dataclass(frozen=True)
class PlaneCurve:
    """Homogeneous rational curve f(x, y, z) = 0 of degree d.

    Irreducibility (and smoothness) are caller-asserted metadata; the type
    enforces homogeneity and nonzeroness only.
    """

    monomials: tuple[tuple[int, int, int, Fraction], ...]
    degree: int

    @classmethod
    def from_coeffs(cls, coeffs: dict) -> "PlaneCurve":
        norm = _poly_norm(coeffs.items())
        if not norm:
            raise CurveliftError("curve polynomial must be nonzero")
        degrees = {i + j + l for (i, j, l) in norm}
        if len(degrees) != 1:
            raise CurveliftError(f"curve polynomial must be homogeneous, degrees {sorted(degrees)}")
        mono = tuple(sorted((i, j, l, c) for (i, j, l), c in norm.items()))
        return cls(mono, degrees.pop())

    @property
    def coeffs(self) -> dict:
        return {(i, j, l): c for i, j, l, c in self.monomials}

    def evaluate(self, x, y, z):
        return _poly_eval(self.coeffs, x, y, z)

    def contains(self, p: LatticePoint) -> bool:
        return self.evaluate(p.x, p.yc, Fraction(1)) == 0

    def partials(self) -> tuple[dict, dict, dict]:
        c = self.coeffs
        return _poly_diff(c, 0), _poly_diff(c, 1), _poly_diff(c, 2)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "monomials": [
                {"i": i, "j": j, "k": l, "c": format_rational(c)}
                for i, j, l, c in self.monomials
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlaneCurve":
        coeffs = {
            (int(m["i"]), int(m["j"]), int(m["k"])): parse_rational(m["c"])
            for m in d["monomials"]
        }
        curve = cls.from_coeffs(coeffs)
        if "degree" in d and int(d["degree"]) != curve.degree:
            raise CurveliftError(
                f"declared degree {d['degree']} does not match monomials of degree {curve.degree}"
            )
        return curve


def line_curve(alpha, beta, gamma) -> PlaneCurve:
    """The rational line alpha*x + beta*y + gamma*z = 0."""
    return PlaneCurve.from_coeffs(
        {(1, 0, 0): Fraction(alpha), (0, 1, 0): Fraction(beta), (0, 0, 1): Fraction(gamma)}
    )


def point_is_smooth(curve: PlaneCurve, p: LatticePoint) -> bool:
    """Exact smoothness test of the curve at an on-curve lattice point."""
    if not curve.contains(p):
        raise CurveliftError("smoothness test requires a point on the curve")
    return any(
        _poly_eval(part, p.x, p.yc, Fraction(1)) != 0 for part in curve.partials()
    )


@dataclass(frozen=True)
class IsotropicLine:
    """The line (x - az) + s*omega*(y - bz) = 0, s = -1 for the conjugate."""

    base: LatticePoint
    k: int
    conjugate: bool = False

    def direction(self) -> ImQuadElement:
        w = omega(self.k)
        return -w if self.conjugate else w

    def parameter_of(self, x0: ImQuadElement, y0: ImQuadElement) -> ImQuadElement | None:
        """Parameter t with (a - s*omega*t, b + t) = (x0, y0), if on the line."""
        t = y0 - ImQuadElement.from_rational(self.base.yc, self.k)
        expected_x = ImQuadElement.from_rational(self.base.x, self.k) - self.direction() * t
        return t if expected_x == x0 else None

    def conjugated(self) -> "IsotropicLine":
        return IsotropicLine(self.base, self.k, not self.conjugate)


def threshold(d: int) -> Fraction:
    """Candidate-count requirement per curve degree.

    d = 1 wants five points off the curve; d >= 3 wants
    d(d-1) + (5/2)d + 1 points on it.  Degree 2 is not handled directly:
    invert the configuration at a point of the conic first.
    """
    if d < 1:
        raise CurveliftError(f"degree must be positive, got {d}")
    if d == 2:
        raise UseInversionFirstError("degree 2: use inversion first (planeset.invert)")
    if d == 1:
        return Fraction(5)
    return Fraction(d * (d - 1)) + Fraction(5, 2) * d + 1


def substitute_line(curve: PlaneCurve, line: IsotropicLine) -> ImQuadPoly:
    """Restrict the curve to the line's parametrization (a - s*w*t, b + t, 1)."""
    k = line.k
    a = ImQuadElement.from_rational(line.base.x, k)
    b = ImQuadElement.from_rational(line.base.yc, k)
    x_lin = ImQuadPoly.from_coeffs([a, -line.direction()], k)
    y_lin = ImQuadPoly.from_coeffs([b, ImQuadElement.from_rational(1, k)], k)
    one = ImQuadPoly.constant(1, k)
    d = curve.degree
    x_pow = [one]
    y_pow = [one]
    for _ in range(d):
        x_pow.append(x_pow[-1] * x_lin)
        y_pow.append(y_pow[-1] * y_lin)
    acc = ImQuadPoly.zero(k)
    for i, j, _l, c in curve.monomials:
        acc = acc + (x_pow[i] * y_pow[j]).scale(c)
    return acc


@dataclass(frozen=True)
class TransversalityReport:
    """Root bookkeeping for one curve/line pair.

    ``multiplicities`` lists (multiplicity, number of roots) from the
    squarefree decomposition; ``simple_roots`` counts multiplicity-one
    roots minus any that hit a caller-supplied excluded point (a point
    shared with another selected line does not count as transverse).
    ``degree_drop`` is the intersection multiplicity absorbed at the
    circular point Q, an upper bound for the curve's multiplicity mu at Q;
    mu_lower_bound is 1 exactly when Q lies on the curve.
    """

    simple_roots: int
    multiplicities: tuple[tuple[int, int], ...]
    degree_drop: int
    mu_lower_bound: int


def transversality_report(
    curve: PlaneCurve,
    line: IsotropicLine,
    exclusions: tuple = (),
) -> TransversalityReport:
    p = substitute_line(curve, line)
    if p.is_zero():
        raise LineIsComponentError("line is a component of the curve")
    decomp = squarefree_decomposition(p)
    by_mult: dict[int, int] = {}
    for factor, mult in decomp:
        by_mult[mult] = by_mult.get(mult, 0) + factor.degree
    simple = by_mult.get(1, 0)
    if simple and exclusions:
        dp = p.derivative()
        seen: set = set()
        for x0, y0 in exclusions:
            t0 = line.parameter_of(x0, y0)
            if t0 is None or t0 in seen:
                continue
            seen.add(t0)
            if p.evaluate(t0).is_zero() and not dp.evaluate(t0).is_zero():
                simple -= 1
    return TransversalityReport(
        simple_roots=simple,
        multiplicities=tuple(sorted(by_mult.items())),
        degree_drop=curve.degree - p.degree,
        mu_lower_bound=min(curve.degree - p.degree, 1),
    )


def line_intersection(
    l1: IsotropicLine, l2: IsotropicLine
) -> tuple[ImQuadElement, ImQuadElement]:
    """Affine meeting point of a line and a conjugate-family line.

    Two lines of the same family only meet at the circular point at
    infinity, which has no affine representative.
    """
    if l1.k != l2.k:
        raise CurveliftError("lines live over different field parameters")
    if l1.conjugate == l2.conjugate:
        raise CurveliftError("same-family isotropic lines meet only at infinity")
    if l1.conjugate:
        l1, l2 = l2, l1
    k = l1.k
    w = omega(k)
    a, b = l1.base.x, l1.base.yc
    ap, bp = l2.base.x, l2.base.yc
    half = Fraction(1, 2)
    x = ImQuadElement(half * (a + ap), half * (b - bp), k)
    y = ImQuadElement(half * (b + bp), Fraction(0), k) - w * ImQuadElement.from_rational(
        Fraction(a - ap, 2 * k), k
    )
    return x, y


def reflection_across_line(
    p: LatticePoint, line: PlaneCurve, k: int = 1
) -> LatticePoint:
    """Euclidean reflection of a lattice point across a rational line.

    Lattice coordinates carry the weighted metric dx^2 + k*dy^2, under
    which the reflection of a rational point across a rational affine line
    is again rational.  Only the line at infinity (no affine locus) has no
    reflection.
    """
    if line.degree != 1:
        raise CurveliftError("reflection needs a degree-1 curve")
    c = line.coeffs
    alpha = c.get((1, 0, 0), Fraction(0))
    beta = c.get((0, 1, 0), Fraction(0))
    gamma = c.get((0, 0, 1), Fraction(0))
    if alpha == 0 and beta == 0:
        raise IrrationalReflectionError(
            "line at infinity has no affine reflection in the lattice"
        )
    u = alpha * p.x + beta * p.yc + gamma
    n = k * alpha * alpha + beta * beta
    return LatticePoint(p.x - 2 * u * k * alpha / n, p.yc - 2 * u * beta / n)


@dataclass(frozen=True)
class TripleSelection:
    """Outcome of the greedy triple search, with its audit trail."""

    triple: tuple[LatticePoint, LatticePoint, LatticePoint]
    k: int
    transverse_points: int
    required_points: int
    transcript: tuple[dict, ...]

    def lines(self) -> tuple[IsotropicLine, ...]:
        return six_lines(self.triple, self.k)


def six_lines(
    triple: tuple[LatticePoint, LatticePoint, LatticePoint], k: int
) -> tuple[IsotropicLine, ...]:
    out = []
    for p in triple:
        out.append(IsotropicLine(p, k, conjugate=False))
        out.append(IsotropicLine(p, k, conjugate=True))
    return tuple(out)


def _shared_curve_points(
    curve: PlaneCurve, lines: tuple[IsotropicLine, ...]
) -> list[list[tuple[ImQuadElement, ImQuadElement]]]:
    # Per line: affine points shared with another line that also lie on the
    # curve.  Same-family pairs only meet at infinity and are skipped.
    k = lines[0].k
    one = ImQuadElement.from_rational(1, k)
    shared: list[list[tuple[ImQuadElement, ImQuadElement]]] = [[] for _ in lines]
    for i, j in itertools.combinations(range(len(lines)), 2):
        if lines[i].conjugate == lines[j].conjugate:
            continue
        x0, y0 = line_intersection(lines[i], lines[j])
        if curve.evaluate(x0, y0, one).is_zero():
            shared[i].append((x0, y0))
            shared[j].append((x0, y0))
    return shared


def count_transverse_union(
    curve: PlaneCurve, triple: tuple[LatticePoint, LatticePoint, LatticePoint], k: int
) -> tuple[int, tuple[TransversalityReport, ...]]:
    """Transverse count of the curve against the six-line union.

    Points on two of the six lines are excluded (the union is singular
    there, so the intersection with the curve cannot be transverse).
    """
    lines = six_lines(triple, k)
    shared = _shared_curve_points(curve, lines)
    reports = tuple(
        transversality_report(curve, line, exclusions=tuple(shared[i]))
        for i, line in enumerate(lines)
    )
    return sum(r.simple_roots for r in reports), reports


def _cross_clear(curve: PlaneCurve, a: LatticePoint, b: LatticePoint, k: int) -> bool:
    # True when neither mixed-family intersection of the lines of a and b
    # lands on the curve.
    one = ImQuadElement.from_rational(1, k)
    for l1, l2 in (
        (IsotropicLine(a, k), IsotropicLine(b, k, conjugate=True)),
        (IsotropicLine(b, k), IsotropicLine(a, k, conjugate=True)),
    ):
        x0, y0 = line_intersection(l1, l2)
        if curve.evaluate(x0, y0, one).is_zero():
            return False
    return True


def choose_transverse_triple(
    curve: PlaneCurve, candidates: Configuration
) -> TripleSelection:
    """Greedy selection of three base points with certified transversality.

    Degree 1 picks points off the curve and skips earlier picks and their
    reflections; degree >= 3 restricts to on-curve points whose own line is
    simple everywhere and minimally tangent at the circular point, then
    keeps the pairwise line crossings off the curve.  The returned count is
    re-verified on all six lines with mutual exclusions, so a returned
    selection is sound independently of the greedy heuristics.
    """
    d = curve.degree
    if d == 2:
        raise UseInversionFirstError("degree 2: use inversion first (planeset.invert)")
    k = candidates.k
    need = threshold(d)
    transcript: list[dict] = []

    if d == 1:
        pool = [p for p in candidates.points if not curve.contains(p)]
        if len(pool) < need:
            raise ThresholdError(
                f"need at least {need} points off the curve, have {len(pool)}"
            )
        chosen: list[LatticePoint] = []
        excluded: set[LatticePoint] = set()
        use_reflections = True
        try:
            reflection_across_line(pool[0], curve, k)
        except IrrationalReflectionError:
            use_reflections = False
            transcript.append(
                {"step": "reflection-fallback", "reason": "no affine reflection"}
            )
        for p in pool:
            if len(chosen) == 3:
                break
            if use_reflections:
                if p in excluded:
                    transcript.append({"step": "skip", "point": p.to_dict()})
                    continue
                chosen.append(p)
                excluded.add(p)
                excluded.add(reflection_across_line(p, curve, k))
            else:
                if p in chosen or not all(_cross_clear(curve, c, p, k) for c in chosen):
                    transcript.append({"step": "skip", "point": p.to_dict()})
                    continue
                chosen.append(p)
            transcript.append({"step": "pick", "point": p.to_dict()})
        if len(chosen) < 3:
            raise HypothesisViolationError(
                "hypothesis violation: fewer than three admissible off-curve points",
                tuple(transcript),
            )
    else:
        pool = [p for p in candidates.points if curve.contains(p)]
        if len(pool) < need:
            raise ThresholdError(
                f"need at least {need} points on the curve, have {len(pool)}"
            )
        good: list[LatticePoint] = []
        drops: dict[LatticePoint, int] = {}
        for p in pool:
            try:
                report = transversality_report(curve, IsotropicLine(p, k))
            except LineIsComponentError:
                transcript.append({"step": "reject", "point": p.to_dict(), "reason": "line in curve"})
                continue
            if any(mult > 1 for mult, _ in report.multiplicities):
                transcript.append(
                    {"step": "reject", "point": p.to_dict(), "reason": "multiple root"}
                )
                continue
            good.append(p)
            drops[p] = report.degree_drop
        if not good:
            raise HypothesisViolationError(
                "hypothesis violation: no candidate line meets the curve simply",
                tuple(transcript),
            )
        mu_est = min(drops[p] for p in good)
        good = [p for p in good if drops[p] == mu_est]
        transcript.append({"step": "good-set", "size": len(good), "mu_estimate": mu_est})
        chosen = []
        for p in good:
            if len(chosen) == 3:
                break
            if all(_cross_clear(curve, c, p, k) for c in chosen):
                chosen.append(p)
                transcript.append({"step": "pick", "point": p.to_dict()})
            else:
                transcript.append({"step": "skip", "point": p.to_dict()})
        if len(chosen) < 3:
            raise HypothesisViolationError(
                "hypothesis violation: could not keep the six delta-sets disjoint",
                tuple(transcript),
            )

    triple = (chosen[0], chosen[1], chosen[2])
    required = max(3 * (d - 2), 6)
    count, _reports = count_transverse_union(curve, triple, k)
    transcript.append({"step": "verify", "transverse_points": count, "required": required})
    if count < required:
        raise HypothesisViolationError(
            f"hypothesis violation: {count} transverse points, need {required}",
            tuple(transcript),
        )
    return TripleSelection(triple, k, count, required, tuple(transcript))


@dataclass(frozen=True)
class DoubleCoverCurve:
    """The curve w^2 = q1*q2*q3 over f = 0 in P(1,1,1,3).

    ``r`` and ``genus`` are exact integers when the ramification could be
    counted (all branch points affine, on a single line each, with the base
    curve smooth), and inclusive interval bounds otherwise.
    """

    base: PlaneCurve
    triple: tuple[LatticePoint, LatticePoint, LatticePoint]
    k: int
    branch_sextic: tuple[tuple[int, int, int, Fraction], ...]
    r: int | tuple[int, int]
    genus: int | tuple[int, int]
    exact: bool

    def to_dict(self) -> dict:
        def enc(v):
            return v if isinstance(v, int) else list(v)

        return {
            "degree": self.base.degree,
            "curve": self.base.to_dict(),
            "k": self.k,
            "triple": [p.to_dict() for p in self.triple],
            "cover_relation": "w^2 = q1*q2*q3 on f = 0",
            "branch_sextic": [
                {"i": i, "j": j, "k": l, "c": format_rational(c)}
                for i, j, l, c in self.branch_sextic
            ],
            "r": enc(self.r),
            "genus": enc(self.genus),
            "exact": self.exact,
        }


def build_double_cover(
    curve: PlaneCurve,
    triple: "TripleSelection | tuple[LatticePoint, LatticePoint, LatticePoint]",
    k: int | None = None,
    smooth_curve: bool | None = None,
) -> DoubleCoverCurve:
    """Assemble the double cover and compute its ramification when possible.

    Exact mode needs every intersection of the six lines with the curve to
    be affine (no degree drop), every pairwise line crossing off the curve,
    and the curve smooth (automatic for degree 1, caller-asserted above).
    Anything else falls back to the interval bounds r in [6, 6d] and genus
    in [2, d^2 + 1].
    """
    if isinstance(triple, TripleSelection):
        if k is not None and k != triple.k:
            raise CurveliftError("conflicting field parameters for the cover")
        k = triple.k
        triple = triple.triple
    if k is None:
        raise CurveliftError("field parameter k is required with a bare triple")
    if len(set(triple)) != 3:
        raise CurveliftError("cover needs three distinct base points")
    d = curve.degree
    if d == 2:
        raise UseInversionFirstError("degree 2: use inversion first (planeset.invert)")

    sextic = quadric_polynomial(triple[0], k)
    for p in triple[1:]:
        sextic = _poly_mul(sextic, quadric_polynomial(p, k))
    sextic_mono = tuple(sorted((i, j, l, c) for (i, j, l), c in sextic.items()))

    lines = six_lines(triple, k)
    exact = smooth_curve is True or d == 1
    r_exact = 0
    if exact:
        try:
            substituted = [substitute_line(curve, line) for line in lines]
        except Exception:
            substituted = None
            exact = False
        if substituted is not None:
            for p in substituted:
                if p.is_zero() or p.degree != d:
                    exact = False
                    break
    if exact:
        shared = _shared_curve_points(curve, lines)
        if any(shared_pts for shared_pts in shared):
            exact = False
    if exact:
        for p in substituted:
            for factor, mult in squarefree_decomposition(p):
                if mult % 2 == 1:
                    r_exact += factor.degree
        if r_exact % 2 == 1 or not 6 <= r_exact <= 6 * d:
            exact = False

    if exact:
        g_c = (d - 1) * (d - 2) // 2
        r: int | tuple[int, int] = r_exact
        genus: int | tuple[int, int] = 2 * g_c - 1 + r_exact // 2
    else:
        r = (6, 6 * d)
        genus = (2, d * d + 1)
    return DoubleCoverCurve(curve, tuple(triple), k, sextic_mono, r, genus, exact)
