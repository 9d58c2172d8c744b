"""Real-linear maps between algebras and isomorphism verification.

A verified isomorphism preserves unity, products on all basis pairs, and is
invertible; functions and derivatives can then be transported between the
two algebras by conjugation with the map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .algebra import AElement, Algebra, mul
from .errors import DimensionMismatch, NotAnIsomorphism
from .fixtures import direct_product, get_algebra, real_algebra, wave_algebra

__all__ = [
    "IsoReport",
    "LinMap",
    "load_linmap",
    "pairs_to_hyperbolic",
    "save_linmap",
    "transfer_function",
    "verify_isomorphism",
    "wave_isomorphism",
]

MULT_TOL = 1e-10


@dataclass
class LinMap:
    """Linear map given by its matrix; column j is the image of source v_j."""

    source: Algebra
    target: Algebra
    matrix: np.ndarray
    verified_isomorphism: bool = field(default=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise DimensionMismatch(
                f"matrix must be {self.target.dim}x{self.source.dim}, got {self.matrix.shape}"
            )

    def __call__(self, x: AElement) -> AElement:
        return self.target.element(self.matrix @ x.coords)

    def inverse_apply(self, y: AElement) -> AElement:
        return self.source.element(np.linalg.solve(self.matrix, y.coords))


@dataclass(frozen=True)
class IsoReport:
    invertible: bool
    unity_preserved: bool
    max_mult_residual: float
    ok: bool

    def lines(self) -> list[str]:
        return [
            f"invertible:          {self.invertible}",
            f"unity preserved:     {self.unity_preserved}",
            f"max product residual:{self.max_mult_residual: .3e}",
            f"isomorphism:         {self.ok}",
        ]


def verify_isomorphism(m: LinMap, tol: float = MULT_TOL) -> IsoReport:
    """Check invertibility, unity preservation and multiplicativity on all
    basis pairs (bilinearity makes the basis check complete); records the
    outcome on the map."""
    if m.source.dim != m.target.dim:
        raise DimensionMismatch("an isomorphism needs equal dimensions")
    s = np.linalg.svd(m.matrix, compute_uv=False)
    invertible = bool(s[-1] > 1e-12 * max(1.0, s[0]))
    unity_ok = bool(
        np.max(np.abs(m.matrix @ m.source.unity - m.target.unity)) <= tol
    )
    worst = 0.0
    for i in range(m.source.dim):
        vi = m.source.basis_element(i)
        for j in range(m.source.dim):
            vj = m.source.basis_element(j)
            lhs = m(mul(vi, vj))
            rhs = mul(m(vi), m(vj))
            worst = max(worst, float(np.max(np.abs(lhs.coords - rhs.coords))))
    ok = invertible and unity_ok and worst <= tol
    m.verified_isomorphism = ok
    return IsoReport(
        invertible=invertible,
        unity_preserved=unity_ok,
        max_mult_residual=worst,
        ok=ok,
    )


def transfer_function(m: LinMap, f):
    """Conjugate a function on the source into one on the target.

    Returns ``g = m o f o m^{-1}`` as a callable on target elements;
    differentiability carries over, with g' obtained the same way.
    Refuses maps that do not verify as isomorphisms.
    """
    if not m.verified_isomorphism:
        verify_isomorphism(m)
    if not m.verified_isomorphism:
        raise NotAnIsomorphism("transfer needs a verified isomorphism")

    def g(y: AElement) -> AElement:
        return m(f(m.inverse_apply(y)))

    return g


def wave_isomorphism(c: float = 1.0) -> LinMap:
    """Verified map from the speed-c wave algebra onto R x R sending
    x + k t to (x + c t, x - c t)."""
    source = wave_algebra(c)
    r = real_algebra()
    target = direct_product(r, r, name="RxR")
    m = LinMap(source=source, target=target, matrix=np.array([[1.0, c], [1.0, -c]]))
    report = verify_isomorphism(m)
    if not report.ok:
        raise NotAnIsomorphism("wave map failed verification")
    return m


def pairs_to_hyperbolic() -> LinMap:
    """Verified map R x R -> H sending (a, b) to a(1+j)/2 + b(1-j)/2."""
    r = real_algebra()
    source = direct_product(r, r, name="RxR")
    target = get_algebra("H")
    m = LinMap(source=source, target=target, matrix=np.array([[0.5, 0.5], [0.5, -0.5]]))
    report = verify_isomorphism(m)
    if not report.ok:
        raise NotAnIsomorphism("hyperbolic splitting map failed verification")
    return m


def dalembert_solution(c: float, f1_src: str = "sin(s)", f2_src: str = "s^2"):
    """Pull a componentwise function (F1(a), F2(b)) on R x R back through the
    wave map: the result on the wave algebra has first component
    (F1(x + c t) + F2(x - c t)) / 2, the classical traveling-wave form.

    F1, F2 are one-variable expressions in ``s``.  Returns (function, map).
    """
    from .expr import ExprFn, add, lit, mul as emul, parse, substitute, var

    iso = wave_isomorphism(c)
    phi = iso.matrix
    f_sources = (f1_src, f2_src)
    n = iso.source.dim
    # component i of F(phi(x, t)) with phi rows as linear expressions
    composed = []
    for i in range(n):
        row = lit(0.0)
        for m_idx in range(n):
            row = add(row, emul(lit(phi[i, m_idx]), var(m_idx)))
        composed.append(substitute(parse(f_sources[i], 1, names={"s": 0}), {0: row}))
    inv = np.linalg.inv(phi)
    components = []
    for k in range(n):
        acc = lit(0.0)
        for i in range(n):
            acc = add(acc, emul(lit(inv[k, i]), composed[i]))
        components.append(acc)
    return ExprFn(iso.source, tuple(components)), iso


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

def load_linmap(path: str) -> LinMap:
    """Load a map file: source/target algebra names plus the matrix entries."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return LinMap(
        source=get_algebra(doc["source"]),
        target=get_algebra(doc["target"]),
        matrix=np.asarray(doc["matrix"], dtype=float),
    )


def save_linmap(m: LinMap, path: str) -> None:
    doc = {
        "source": m.source.name,
        "target": m.target.name,
        "matrix": m.matrix.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
