"""Bundled algebras and the algebra definition file format.

The cyclic constructor covers every one-generator algebra R[g]/(g^n - value):
complex numbers (g^2 = -1), hyperbolic numbers (g^2 = 1), dual numbers of any
order (g^n = 0), n-hyperbolic numbers (g^n = 1) and the wave algebra
(g^2 = c^2).  Direct products, quaternions, the 2x2 matrix algebra and a
six-dimensional noncommutative triangular algebra round out the set.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .algebra import Algebra, make_algebra
from .errors import DimensionMismatch

__all__ = [
    "bundled_algebras",
    "complex_algebra",
    "cyclic_algebra",
    "direct_product",
    "dual_numbers",
    "get_algebra",
    "hyperbolic",
    "load_algebra",
    "mat2",
    "n_hyperbolic",
    "quaternions",
    "real_algebra",
    "save_algebra",
    "triangular6",
    "wave_algebra",
]


def cyclic_algebra(n: int, power_value, name: str, labels=None) -> Algebra:
    """R[g]/(g^n - v): basis 1, g, ..., g^(n-1) with g^n = v (coords of v given)."""
    power_value = np.asarray(power_value, dtype=float)
    if power_value.shape != (n,):
        raise DimensionMismatch(f"power value needs {n} coordinates")
    # coords of g^m for m = 0 .. 2n-2, reducing g^n -> power_value
    reps = [np.eye(n)[m] for m in range(n)]
    for m in range(n, 2 * n - 1):
        coords = np.zeros(n)
        for k, c in enumerate(power_value):
            if c != 0.0:
                coords += c * reps[m - n + k]
        reps.append(coords)
    C = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            C[i, j] = reps[i + j]
    unity = np.eye(n)[0]
    if labels is None:
        labels = ["1"] + [f"g{m}" if m > 1 else "g" for m in range(1, n)]
    return make_algebra(n, C, unity, labels=labels, name=name)


def direct_product(a: Algebra, b: Algebra, name: str | None = None) -> Algebra:
    """Componentwise product algebra A x B."""
    n, m = a.dim, b.dim
    C = np.zeros((n + m, n + m, n + m))
    C[:n, :n, :n] = a.structure
    C[n:, n:, n:] = b.structure
    unity = np.concatenate([a.unity, b.unity])
    labels = tuple(f"{s}'" for s in a.basis_labels) + tuple(f"{s}''" for s in b.basis_labels)
    return make_algebra(n + m, C, unity, labels=labels, name=name or f"{a.name}x{b.name}")


def real_algebra() -> Algebra:
    return cyclic_algebra(1, [1.0], "R", labels=["1"])


def complex_algebra() -> Algebra:
    return cyclic_algebra(2, [-1.0, 0.0], "C", labels=["1", "i"])


def hyperbolic() -> Algebra:
    return cyclic_algebra(2, [1.0, 0.0], "H", labels=["1", "j"])


def dual_numbers(order: int = 2) -> Algebra:
    labels = ["1", "eps"] + [f"eps{m}" for m in range(2, order)]
    name = "dual" if order == 2 else f"dual{order}"
    return cyclic_algebra(order, np.zeros(order), name, labels=labels)


def n_hyperbolic(n: int) -> Algebra:
    value = np.zeros(n)
    value[0] = 1.0
    labels = ["1", "j"] + [f"j{m}" for m in range(2, n)]
    return cyclic_algebra(n, value, f"{n}-hyperbolic", labels=labels)


def wave_algebra(c: float = 1.0) -> Algebra:
    """Two-dimensional algebra x + k t with k^2 = c^2; its second-order
    equation is the speed-c wave equation."""
    if c <= 0:
        raise ValueError("wave speed must be positive")
    return cyclic_algebra(2, [c * c, 0.0], f"wave(c={c:g})", labels=["1", "k"])


def quaternions() -> Algebra:
    table = {
        (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
        (1, 0): (1, 1), (1, 1): (0, -1), (1, 2): (3, 1), (1, 3): (2, -1),
        (2, 0): (2, 1), (2, 1): (3, -1), (2, 2): (0, -1), (2, 3): (1, 1),
        (3, 0): (3, 1), (3, 1): (2, 1), (3, 2): (1, -1), (3, 3): (0, -1),
    }
    C = np.zeros((4, 4, 4))
    for (i, j), (k, sign) in table.items():
        C[i, j, k] = sign
    return make_algebra(4, C, [1, 0, 0, 0], labels=["1", "i", "j", "k"], name="quaternions")


def mat2() -> Algebra:
    """2x2 real matrices on the basis E11, E12, E21, E22 (unity not a basis vector)."""
    def idx(a, b):
        return 2 * a + b

    C = np.zeros((4, 4, 4))
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    if b == c:
                        C[idx(a, b), idx(c, d), idx(a, d)] = 1.0
    unity = np.array([1.0, 0.0, 0.0, 1.0])
    return make_algebra(4, C, unity, labels=["E11", "E12", "E21", "E22"], name="mat2")


def triangular6() -> Algebra:
    """Six-dimensional noncommutative algebra isomorphic to upper-triangular
    3x3 matrices; product (a,b,c,d,e,f)*(x,y,z,u,v,w) =
    (ax, by, cz, au+dy, bv+ez, aw+dv+fz)."""
    def product(p, q):
        a, b, c, d, e, f = p
        x, y, z, u, v, w = q
        return np.array([a * x, b * y, c * z, a * u + d * y, b * v + e * z, a * w + d * v + f * z])

    C = np.zeros((6, 6, 6))
    eye = np.eye(6)
    for i in range(6):
        for j in range(6):
            C[i, j] = product(eye[i], eye[j])
    unity = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    return make_algebra(6, C, unity, labels=[f"e{i+1}" for i in range(6)], name="triangular6")


def bundled_algebras() -> dict[str, Algebra]:
    """All fixture algebras keyed by canonical name."""
    R = real_algebra()
    C = complex_algebra()
    H = hyperbolic()
    fixtures = {
        "R": R,
        "C": C,
        "H": H,
        "dual": dual_numbers(2),
        "dual3": dual_numbers(3),
        "dual4": dual_numbers(4),
        "3-hyperbolic": n_hyperbolic(3),
        "4-hyperbolic": n_hyperbolic(4),
        "RxR": direct_product(R, R, name="RxR"),
        "RxRxR": direct_product(direct_product(R, R), R, name="RxRxR"),
        "CxC": direct_product(C, C, name="CxC"),
        "quaternions": quaternions(),
        "mat2": mat2(),
        "triangular6": triangular6(),
        "wave": wave_algebra(1.0),
        "wave2": wave_algebra(2.0),
    }
    return fixtures


_ALIASES = {
    "complex": "C",
    "hyperbolic": "H",
    "trihyperbolic": "3-hyperbolic",
    "quadhyperbolic": "4-hyperbolic",
    "quat": "quaternions",
    "wave1": "wave",
}


def get_algebra(name: str) -> Algebra:
    """Resolve a fixture name (with aliases, e.g. ``wave:2.5``) or a file path."""
    if os.sep in name or name.endswith(".json"):
        return load_algebra(name)
    if name.startswith("wave:"):
        return wave_algebra(float(name.split(":", 1)[1]))
    key = _ALIASES.get(name, name)
    fixtures = bundled_algebras()
    if key not in fixtures:
        raise KeyError(f"unknown algebra {name!r}; known: {', '.join(sorted(fixtures))}")
    return fixtures[key]


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

def load_algebra(path: str) -> Algebra:
    """Load one algebra from a JSON document.

    Fields: ``name``, ``dim``, ``labels``, ``unity`` and either a full
    ``table`` (table[i][j] = coordinates of v_i * v_j) or a cyclic
    ``relations`` shorthand {"generator_power": n, "value": [...]}.
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return algebra_from_dict(doc)


def algebra_from_dict(doc: dict) -> Algebra:
    name = doc.get("name", "algebra")
    dim = int(doc["dim"])
    labels = doc.get("labels")
    if "relations" in doc:
        rel = doc["relations"]
        power = int(rel["generator_power"])
        if power != dim:
            raise DimensionMismatch("generator power must equal the dimension")
        return cyclic_algebra(dim, rel["value"], name, labels=labels)
    table = np.asarray(doc["table"], dtype=float)
    if table.shape != (dim, dim, dim):
        raise DimensionMismatch(f"table must be {dim}x{dim} vectors of length {dim}")
    unity = doc["unity"]
    return make_algebra(dim, table, unity, labels=labels, name=name)


def save_algebra(algebra: Algebra, path: str) -> None:
    doc = {
        "name": algebra.name,
        "dim": algebra.dim,
        "labels": list(algebra.basis_labels),
        "unity": algebra.unity.tolist(),
        "table": algebra.structure.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
