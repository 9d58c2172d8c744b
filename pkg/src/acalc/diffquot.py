"""Deleted difference quotients: derivatives as limits over unit offsets.

The quotient (f(p+h) - f(p)) * h^{-1} is only defined when the offset h is a
unit of the algebra; the probe samples it over unit directions and shrinking
radii and reports numerical evidence at the configured scales, not a proof:
converges, diverges or inconclusive.  On semisimple commutative algebras the
limit matches the Jacobian-based derivative wherever it converges.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .algebra import AElement, Algebra, Kind, classify, invert, mul, norm
from .errors import NotAUnit
from .expr import ExprFn

__all__ = ["D2Options", "D2Probe", "d2_probe", "deleted_quotient", "unit_directions"]


@dataclass(frozen=True)
class D2Options:
    n_directions: int = 16
    radii: tuple[float, ...] = tuple(2.0 ** -m for m in range(2, 17))
    tol: float = 1e-4             # spread tolerance, scaled by quotient size
    growth_factor: float = 2.0    # per-step magnitude growth that flags divergence
    growth_window: int = 4        # number of trailing radii inspected for growth
    seed: int = 0


@dataclass(frozen=True)
class D2Probe:
    point: AElement
    directions: tuple[AElement, ...]
    radii: tuple[float, ...]
    quotients: tuple[tuple[AElement, ...], ...]  # [direction][radius]
    verdict: str                                 # converges | diverges | inconclusive
    limit: AElement | None = None                # present iff verdict == converges


def deleted_quotient(f: ExprFn, p: AElement, h: AElement) -> AElement:
    """(f(p+h) - f(p)) * h^{-1}; raises :class:`NotAUnit` for non-unit h.

    The inverse is applied on the right; on the commutative algebras this
    probe targets, left and right quotients agree.
    """
    c = classify(h)
    if c.kind is not Kind.UNIT:
        raise NotAUnit(f"offset is {c.kind.value}; quotient needs a unit", classification=c)
    return mul(f(p + h) - f(p), c.inverse)


def unit_directions(algebra: Algebra, count: int, seed: int = 0) -> list[AElement]:
    """Deterministic unit-norm directions that are units of the algebra.

    Axis directions and normalized two-axis diagonals come first (in +/-
    pairs, so means over the set cancel first-order terms); seeded random
    +/- pairs fill up to ``count``.  Zero-divisor directions are dropped.
    """
    n = algebra.dim
    candidates: list[np.ndarray] = []
    eye = np.eye(n)
    for i in range(n):
        candidates.append(eye[i])
        candidates.append(-eye[i])
    for i, j in combinations(range(n), 2):
        d = (eye[i] + eye[j]) / np.sqrt(2.0)
        candidates.append(d)
        candidates.append(-d)
    rng = np.random.default_rng(seed)
    while len(candidates) < 4 * count:
        d = rng.normal(size=n)
        d /= np.linalg.norm(d)
        candidates.append(d)
        candidates.append(-d)
    out: list[AElement] = []
    for c in candidates:
        el = algebra.element(c)
        if classify(el).kind is Kind.UNIT:
            out.append(el)
        if len(out) == count:
            break
    return out


def d2_probe(f: ExprFn, p, opts: D2Options | None = None) -> D2Probe:
    """Sample deleted quotients over unit directions and shrinking radii.

    Diverges when quotient magnitudes grow by the configured factor at every
    step across the trailing radii in some direction, or when the
    direction-dependent values at the smallest radius disagree wildly.
    Converges when the final-ring values agree to tolerance and the last
    radius step moved them by no more than the tolerance.  Anything else is
    inconclusive.
    """
    opts = opts or D2Options()
    algebra = f.algebra
    point = p if isinstance(p, AElement) else algebra.element(p)
    directions = unit_directions(algebra, opts.n_directions, seed=opts.seed)
    inverses = [invert(d) for d in directions]

    table: list[tuple[AElement, ...]] = []
    for d, d_inv in zip(directions, inverses):
        row = []
        for r in opts.radii:
            h = r * d
            q = mul(f(point + h) - f(point), (1.0 / r) * d_inv)
            row.append(q)
        table.append(tuple(row))

    final = [row[-1] for row in table]
    spread = max(
        (norm(a - b) for a in final for b in final),
        default=0.0,
    )
    mean = algebra.element(np.mean([q.coords for q in final], axis=0))
    scale = 1.0 + norm(mean)

    w = opts.growth_window
    grows = False
    for row in table:
        mags = [norm(q) for q in row[-w:]]
        if len(mags) >= 2 and all(
            b >= opts.growth_factor * a and a > 0 for a, b in zip(mags, mags[1:])
        ):
            grows = True
            break

    if grows or spread > 100.0 * opts.tol * scale:
        verdict, limit = "diverges", None
    else:
        last_step = max(norm(row[-1] - row[-2]) for row in table)
        if spread <= opts.tol * scale and last_step <= opts.tol * scale:
            verdict, limit = "converges", mean
        else:
            verdict, limit = "inconclusive", None
    return D2Probe(
        point=point,
        directions=tuple(directions),
        radii=opts.radii,
        quotients=tuple(table),
        verdict=verdict,
        limit=limit,
    )
