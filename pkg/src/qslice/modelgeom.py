"""Exact linear algebra of the two Darboux frames over a point of the leaf.

A leaf point is ``(s_1..s_l; t_1..t_l)``.  Vectors of the position block are
``(x; y)`` with ``x, y`` of length ``l`` and the form is
``omega((x; y), (x'; y')) = x.y' - y.x'``.

Frames are ordered ``(e.s, w^1..w^{l-1}, v^{l-1}..v^1, u)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .exact import to_rational

Matrix = linalg.Matrix


@dataclass(frozen=True)
class LeafPoint:
    s: tuple[Fraction, ...]
    t: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        s = tuple(to_rational(x) for x in self.s)
        t = tuple(to_rational(x) for x in self.t)
        if len(s) != len(t) or len(s) < 2:
            raise ValueError("need s and t of equal length >= 2")
        if not any(s) and not any(t):
            raise ValueError("a leaf point has a nonzero difference vector")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)

    @classmethod
    def from_flat(cls, values: Sequence) -> "LeafPoint":
        values = list(values)
        if len(values) % 2:
            raise ValueError("expected 2*ell entries")
        half = len(values) // 2
        return cls(tuple(values[:half]), tuple(values[half:]))

    @property
    def ell(self) -> int:
        return len(self.s)

    @property
    def in_I(self) -> bool:
        return self.s[0] != 0

    @property
    def in_J(self) -> bool:
        return self.s[1] != 0

    def flat(self) -> tuple[Fraction, ...]:
        return self.s + self.t


Frame = list[list[Fraction]]  # list of column vectors


def symplectic_form(ell: int) -> Matrix:
    if ell < 1:
        raise ValueError("ell must be positive")
    m = linalg.zeros(2 * ell)
    for k in range(ell):
        m[k][ell + k] = Fraction(1)
        m[ell + k][k] = Fraction(-1)
    return m


def omega(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    ell = len(a) // 2
    return sum((a[k] * b[ell + k] - a[ell + k] * b[k] for k in range(ell)), Fraction(0))


def _vec(ell: int, x: dict[int, Fraction] = {}, y: dict[int, Fraction] = {}) -> list[Fraction]:
    out = [Fraction(0)] * (2 * ell)
    for k, v in x.items():
        out[k] = Fraction(v)
    for k, v in y.items():
        out[ell + k] = Fraction(v)
    return out


def _frame(p: LeafPoint, a: int, b: int, sign: int) -> Frame:
    """Frame adapted to the coordinate ``s_{a+1}``; ``b`` is the partner index.

    ``sign`` is ``+1`` for the I-frame and ``-1`` for the J-frame, whose
    first ``v`` carries the extra minus sign that keeps ``w^1`` common."""
    ell = p.ell
    s, t = p.s, p.t
    sa = s[a]
    es = list(s) + list(t)
    u = _vec(ell, y={a: 1 / sa})
    w = [_vec(ell, y={0: -s[1], 1: s[0]})]
    for k in range(2, ell):
        w.append(_vec(ell, y={a: -s[k] / sa, k: 1}))
    v = [_vec(ell, x={b: sign / sa}, y={a: sign * t[b] / sa ** 2})]
    for k in range(2, ell):
        v.append(_vec(ell, x={k: 1}, y={a: t[k] / sa}))
    return [es] + w + list(reversed(v)) + [u]


def frame_I(p: LeafPoint) -> Frame:
    if not p.in_I:
        raise ValueError("frame_I needs s_1 != 0")
    return _frame(p, 0, 1, 1)


def frame_J(p: LeafPoint) -> Frame:
    if not p.in_J:
        raise ValueError("frame_J needs s_2 != 0")
    return _frame(p, 1, 0, -1)


def gram(frame: Frame) -> Matrix:
    return [[omega(a, b) for b in frame] for a in frame]


def darboux_gram(ell: int) -> Matrix:
    """Expected Gram matrix: ``e.s`` pairs with ``u``, ``v^k`` with ``w^k``."""
    size = 2 * ell
    g = linalg.zeros(size)
    g[0][size - 1] = Fraction(1)
    g[size - 1][0] = Fraction(-1)
    for k in range(1, ell):
        wi = k  # w^k position
        vi = size - 1 - k  # v^k position
        g[vi][wi] = Fraction(1)
        g[wi][vi] = Fraction(-1)
    return g


def is_darboux(frame: Frame) -> bool:
    return gram(frame) == darboux_gram(len(frame) // 2)


def transition_matrix(p: LeafPoint) -> Matrix:
    """Coordinates of the J-frame vectors in the I-frame (column ``c`` is the
    ``c``-th J vector)."""
    if not (p.in_I and p.in_J):
        raise ValueError("transition_matrix needs s_1 != 0 and s_2 != 0")
    fi = linalg.columns_to_matrix(frame_I(p))
    fj = linalg.columns_to_matrix(frame_J(p))
    return linalg.solve(fi, fj)


def closed_form(p: LeafPoint) -> Matrix:
    """The transition matrix written out entry by entry (1-based in comments)."""
    if not (p.in_I and p.in_J):
        raise ValueError("closed form needs s_1 != 0 and s_2 != 0")
    ell = p.ell
    s, t = p.s, p.t
    size = 2 * ell
    d = s[0] * s[1]
    m = linalg.identity(size)
    pen = size - 2  # column of v^1
    # row 1: e.s coefficient of v_J^1
    m[0][pen] = -1 / d
    # row 2: w^1 coefficients
    for k in range(2, ell):
        m[1][k] = -s[k] / d  # columns w^2..w^{l-1}
    for k in range(2, ell):
        m[1][size - 1 - k] = t[k] / d  # columns v^{l-1}..v^2
    m[1][pen] = (t[1] / s[0] - t[0] / s[1]) / d
    m[1][size - 1] = 1 / d
    # rows w^k, k >= 2
    for k in range(2, ell):
        m[k][pen] = t[k] / d
    # rows v^k, k >= 2
    for k in range(2, ell):
        m[size - 1 - k][pen] = s[k] / d
    return m


def is_unipotent(m: Matrix) -> bool:
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("square matrix expected")
    nil = linalg.sub(m, linalg.identity(n))
    return linalg.is_zero(linalg.matpow(nil, n))


def is_strictly_upper(m: Matrix) -> bool:
    """``m - I`` is strictly upper triangular."""
    n = len(m)
    return all(m[i][i] == 1 for i in range(n)) and all(m[i][j] == 0 for i in range(n) for j in range(i))


def random_leaf_point(ell: int, rng: random.Random, bound: int = 9, den: int = 5) -> LeafPoint:
    """Random rational point of both affine opens."""
    while True:
        vals = [Fraction(rng.randint(-bound, bound), rng.randint(1, den)) for _ in range(2 * ell)]
        p = LeafPoint.from_flat(vals)
        if p.s[0] != 0 and p.s[1] != 0:
            return p


@dataclass(frozen=True)
class ModelCheck:
    ell: int
    samples: int
    seed: int
    unipotent: int
    darboux: int
    closed_form: int

    @property
    def ok(self) -> bool:
        return self.unipotent == self.darboux == self.closed_form == self.samples

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "samples": self.samples,
            "seed": self.seed,
            "unipotent": self.unipotent,
            "darboux": self.darboux,
            "closed_form": self.closed_form,
            "ok": self.ok,
        }

    def summary(self) -> str:
        n = self.samples
        return f"unipotent: {self.unipotent}/{n}, darboux: {self.darboux}/{n}, closed_form: {self.closed_form}/{n}"


def modelcheck(ell: int, samples: int, seed: int) -> ModelCheck:
    rng = random.Random(seed)
    uni = dar = cf = 0
    for _ in range(samples):
        p = random_leaf_point(ell, rng)
        m = transition_matrix(p)
        uni += is_unipotent(m) and is_strictly_upper(m)
        dar += is_darboux(frame_I(p)) and is_darboux(frame_J(p))
        cf += m == closed_form(p)
    return ModelCheck(ell, samples, seed, uni, dar, cf)


__all__ = [
    "LeafPoint",
    "ModelCheck",
    "closed_form",
    "darboux_gram",
    "frame_I",
    "frame_J",
    "gram",
    "is_darboux",
    "is_strictly_upper",
    "is_unipotent",
    "modelcheck",
    "omega",
    "random_leaf_point",
    "symplectic_form",
    "transition_matrix",
]
