"""Quivers with loops, the Tits form, and positive-root membership.

Roots follow the Kac convention extended to loops: real roots are the Weyl
orbit of simple roots at loop-free vertices, imaginary roots the orbit of
the fundamental set.  Orientation never matters here.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .exact import fmt, to_rational

INFINITY = "inf"


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str], ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        verts = tuple(str(v) for v in self.vertices)
        arrows = tuple((str(t), str(h)) for t, h in self.arrows)
        if len(set(verts)) != len(verts):
            raise ValueError("duplicate vertex labels")
        known = set(verts)
        for t, h in arrows:
            if t not in known or h not in known:
                raise ValueError(f"arrow ({t}, {h}) has an undeclared endpoint")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "arrows", arrows)
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(verts)})

    def index(self, vertex: str) -> int:
        try:
            return self._index[str(vertex)]
        except KeyError:
            raise KeyError(f"unknown vertex {vertex!r}") from None

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Symmetric count matrix: loops on the diagonal, n_ij + n_ji off it."""
        return _adjacency(self)

    def loops_at(self, vertex: str) -> int:
        i = self.index(vertex)
        return self.adjacency[i][i]

    def between(self, a: str, b: str) -> int:
        if a == b:
            raise ValueError("use loops_at for a single vertex")
        return self.adjacency[self.index(a)][self.index(b)]

    @property
    def loop_free(self) -> tuple[int, ...]:
        adj = self.adjacency
        return tuple(i for i in range(len(self)) if adj[i][i] == 0)

    @classmethod
    def flower(cls, loops: int, label: str = "0") -> "Quiver":
        return cls((label,), tuple((label, label) for _ in range(loops)))

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "arrows": [list(a) for a in self.arrows]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Quiver":
        return cls(tuple(data["vertices"]), tuple(tuple(a) for a in data.get("arrows", ())))


@lru_cache(maxsize=None)
def _adjacency(q: Quiver) -> tuple[tuple[int, ...], ...]:
    k = len(q)
    adj = [[0] * k for _ in range(k)]
    for t, h in q.arrows:
        i, j = q.index(t), q.index(h)
        if i == j:
            adj[i][i] += 1
        else:
            adj[i][j] += 1
            adj[j][i] += 1
    return tuple(tuple(r) for r in adj)


@dataclass(frozen=True, order=True)
class DimVector:
    """Nonnegative integer vector on a fixed, ordered vertex set."""

    vertices: tuple[str, ...]
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) != len(self.values):
            raise ValueError("vertex/value length mismatch")
        vals = tuple(int(v) for v in self.values)
        if any(v < 0 for v in vals):
            raise ValueError("dimension vectors are nonnegative")
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "values", vals)

    @classmethod
    def on(cls, q: Quiver, data: Mapping[str, int] | Sequence[int]) -> "DimVector":
        if isinstance(data, Mapping):
            extra = set(map(str, data)) - set(q.vertices)
            if extra:
                raise ValueError(f"unknown vertices {sorted(extra)}")
            return cls(q.vertices, tuple(int(data.get(v, 0)) for v in q.vertices))
        return cls(q.vertices, tuple(data))

    @classmethod
    def zero(cls, q: Quiver) -> "DimVector":
        return cls(q.vertices, (0,) * len(q))

    @classmethod
    def simple(cls, q: Quiver, vertex: str, times: int = 1) -> "DimVector":
        vals = [0] * len(q)
        vals[q.index(vertex)] = times
        return cls(q.vertices, tuple(vals))

    def __getitem__(self, vertex: str) -> int:
        return self.values[self.vertices.index(vertex)]

    def __add__(self, other: "DimVector") -> "DimVector":
        _same(self, other)
        return DimVector(self.vertices, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "DimVector") -> "DimVector":
        _same(self, other)
        return DimVector(self.vertices, tuple(a - b for a, b in zip(self.values, other.values)))

    def __mul__(self, k: int) -> "DimVector":
        return DimVector(self.vertices, tuple(k * a for a in self.values))

    __rmul__ = __mul__

    def leq(self, other: "DimVector") -> bool:
        _same(self, other)
        return all(a <= b for a, b in zip(self.values, other.values))

    def is_zero(self) -> bool:
        return not any(self.values)

    @property
    def height(self) -> int:
        return sum(self.values)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.vertices, self.values))

    def __str__(self) -> str:
        return "(" + ", ".join(f"{v}:{x}" for v, x in zip(self.vertices, self.values)) + ")"


@dataclass(frozen=True)
class Character:
    vertices: tuple[str, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) != len(self.values):
            raise ValueError("vertex/value length mismatch")
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "values", tuple(to_rational(v) for v in self.values))

    @classmethod
    def on(cls, q: Quiver, data: Mapping[str, object] | Sequence[object]) -> "Character":
        if isinstance(data, Mapping):
            extra = set(map(str, data)) - set(q.vertices)
            if extra:
                raise ValueError(f"unknown vertices {sorted(extra)}")
            return cls(q.vertices, tuple(to_rational(data.get(v, 0)) for v in q.vertices))
        return cls(q.vertices, tuple(data))

    @classmethod
    def zero(cls, q: Quiver) -> "Character":
        return cls(q.vertices, (Fraction(0),) * len(q))

    def __getitem__(self, vertex: str) -> Fraction:
        return self.values[self.vertices.index(vertex)]

    def pair(self, v: DimVector) -> Fraction:
        _same(self, v)
        return sum((a * b for a, b in zip(self.values, v.values)), Fraction(0))

    def as_dict(self) -> dict[str, str]:
        return {k: fmt(x) for k, x in zip(self.vertices, self.values)}


@dataclass(frozen=True)
class FramedSetting:
    quiver: Quiver
    v: DimVector
    w: DimVector

    def __post_init__(self) -> None:
        if self.v.vertices != self.quiver.vertices or self.w.vertices != self.quiver.vertices:
            raise ValueError("v and w must live on the quiver's vertex set")

    @classmethod
    def flower(cls, loops: int, n: int, w: int) -> "FramedSetting":
        q = Quiver.flower(loops)
        return cls(q, DimVector.on(q, [n]), DimVector.on(q, [w]))


def _same(a, b) -> None:
    if a.vertices != b.vertices:
        raise ValueError(f"vertex sets differ: {a.vertices} vs {b.vertices}")


def _check_on(q: Quiver, *vs) -> None:
    for v in vs:
        if v.vertices != q.vertices:
            raise ValueError(f"vector on {v.vertices} does not match quiver vertices {q.vertices}")


def _form(adj, a: Sequence[int], b: Sequence[int]) -> int:
    total = 0
    k = len(adj)
    for i in range(k):
        if a[i] == 0:
            continue
        row = adj[i]
        for j in range(k):
            if b[j] == 0:
                continue
            if i == j:
                total += a[i] * b[i] * (2 - 2 * row[i])
            else:
                # row[j] counts both directions, each ordered pair once
                total -= a[i] * b[j] * row[j]
    return total


def tits_form(q: Quiver, a: DimVector, b: DimVector) -> int:
    _check_on(q, a, b)
    return _form(q.adjacency, a.values, b.values)


def p_form(q: Quiver, v: DimVector) -> int:
    vv = tits_form(q, v, v)
    # (v, v) is always even: the diagonal terms carry a factor 2
    return 1 - vv // 2


def extend(s: FramedSetting) -> tuple[Quiver, DimVector]:
    """Extended quiver: a new vertex ``inf`` with w_i arrows i -> inf."""
    q = s.quiver
    if INFINITY in q.vertices:
        raise ValueError("quiver already has a vertex named 'inf'")
    arrows = list(q.arrows)
    for vertex, wi in zip(q.vertices, s.w.values):
        arrows.extend([(vertex, INFINITY)] * wi)
    qx = Quiver(q.vertices + (INFINITY,), tuple(arrows))
    return qx, DimVector(qx.vertices, s.v.values + (1,))


def _support_connected(adj, x: Sequence[int]) -> bool:
    support = [i for i, xi in enumerate(x) if xi]
    if not support:
        return False
    seen = {support[0]}
    stack = [support[0]]
    while stack:
        i = stack.pop()
        for j in support:
            if j not in seen and adj[i][j]:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(support)


@lru_cache(maxsize=None)
def _is_root(q: Quiver, beta: tuple[int, ...]) -> bool:
    adj = q.adjacency
    loop_free = q.loop_free
    x = list(beta)
    k = len(x)
    while True:
        if sum(x) == 1:
            # simple roots are roots whether or not the vertex carries loops
            return True
        for i in loop_free:
            e = [0] * k
            e[i] = 1
            c = _form(adj, x, e)
            if c > 0:
                x[i] -= c
                break
        else:
            return _support_connected(adj, x)
        if x[i] < 0:
            return False


def is_positive_root(q: Quiver, beta: DimVector) -> bool:
    _check_on(q, beta)
    if beta.is_zero():
        raise ValueError("the zero vector is not a candidate root")
    return _is_root(q, beta.values)


def _box(bound: Sequence[int]) -> Iterable[tuple[int, ...]]:
    return itertools.product(*(range(b + 1) for b in bound))


@lru_cache(maxsize=None)
def _roots_below(q: Quiver, bound: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    return tuple(x for x in _box(bound) if any(x) and _is_root(q, x))


def positive_roots_below(q: Quiver, bound: DimVector) -> list[DimVector]:
    _check_on(q, bound)
    return [DimVector(q.vertices, x) for x in _roots_below(q, bound.values)]


def is_generic(q: Quiver, theta: Character, lam: Character, v: DimVector) -> bool:
    """No positive root strictly below ``v`` is killed by both ``theta`` and ``lam``."""
    _check_on(q, theta, lam, v)
    for root in positive_roots_below(q, v):
        if root == v:
            continue
        if theta.pair(root) == 0 and lam.pair(root) == 0:
            return False
    return True

