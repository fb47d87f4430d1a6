"""Finite discrete distributions over three variables and their marginals.

Distributions are dense numpy tensors paired with ordered alphabets. Values
are immutable once built: the backing arrays are flagged read-only and every
operation returns a new object.

Variables are named by single letters. A three-way system uses ``"x"``,
``"y"`` and ``"z"`` for axes 0, 1 and 2; variable sets are written as strings
such as ``"xz"``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateCondition,
    EmptyInput,
    NegativeProbability,
    NotNormalized,
    ShapeMismatch,
    UnknownLabel,
)

TOL_NORM = 1e-9

VARS3 = ("x", "y", "z")

Label = Hashable


def _freeze(p: np.ndarray) -> np.ndarray:
    p = np.array(p, dtype=np.float64, copy=True)
    p.setflags(write=False)
    return p


def _canon_label(label):
    # JSON lists come back as lists; tuples keep product labels hashable
    if isinstance(label, (list, tuple)):
        return tuple(_canon_label(v) for v in label)
    return str(label)


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct outcome labels.

    Labels are strings, or tuples of labels for product alphabets.
    """

    labels: tuple

    def __post_init__(self):
        labels = tuple(_canon_label(v) for v in self.labels)
        if not labels:
            raise ShapeMismatch("alphabet must contain at least one label")
        if len(set(labels)) != len(labels):
            raise ShapeMismatch(f"alphabet labels are not unique: {labels!r}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(labels)})

    @classmethod
    def range(cls, n: int) -> "Alphabet":
        return cls(tuple(str(i) for i in range(n)))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: Label) -> int:
        try:
            return self._index[_canon_label(label)]
        except KeyError:
            raise UnknownLabel(f"label {label!r} not in alphabet {self.labels!r}") from None

    def pair(self, other: "Alphabet") -> "Alphabet":
        return Alphabet(tuple((a, b) for a in self.labels for b in other.labels))


@dataclass(frozen=True, eq=False)
class Dist1:
    a: Alphabet
    p: np.ndarray
    var: str = "z"

    def __post_init__(self):
        object.__setattr__(self, "p", _freeze(self.p))

    def prob(self, label: Label) -> float:
        return float(self.p[self.a.index(label)])


@dataclass(frozen=True, eq=False)
class JointDist2:
    a1: Alphabet
    a2: Alphabet
    p: np.ndarray
    vars: tuple = ("x", "z")

    def __post_init__(self):
        object.__setattr__(self, "p", _freeze(self.p))
        object.__setattr__(self, "vars", tuple(self.vars))

    @property
    def alphabets(self) -> tuple:
        return (self.a1, self.a2)


@dataclass(frozen=True, eq=False)
class JointDist3:
    """The joint distribution of (X, Y, Z), indexed ``p[x, y, z]``.

    Build through :func:`validate` when the tensor comes from outside; the
    direct constructor trusts its input.
    """

    ax: Alphabet
    ay: Alphabet
    az: Alphabet
    p: np.ndarray
    norm_residual: float = 0.0
    vars: tuple = field(default=VARS3, init=False)

    def __post_init__(self):
        object.__setattr__(self, "p", _freeze(self.p))

    @property
    def shape(self) -> tuple:
        return self.p.shape

    @property
    def alphabets(self) -> tuple:
        return (self.ax, self.ay, self.az)

    def prob(self, x: Label, y: Label, z: Label) -> float:
        return float(self.p[self.ax.index(x), self.ay.index(y), self.az.index(z)])


@dataclass(frozen=True)
class SampleTable:
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(_canon_label(v) for v in r) for r in self.rows)
        for r in rows:
            if len(r) != 3:
                raise ShapeMismatch(f"sample row {r!r} does not have three fields")
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)


def fsum_total(p: np.ndarray) -> float:
    """Compensated sum in x-major order."""
    return math.fsum(np.ravel(p, order="C").tolist())


def _fsum_keep(p: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    keep = sorted(keep)
    drop = [a for a in range(p.ndim) if a not in keep]
    if not drop:
        return np.array(p, copy=True)
    moved = np.moveaxis(p, drop, list(range(len(keep), p.ndim)))
    out_shape = moved.shape[: len(keep)]
    flat = moved.reshape(int(np.prod(out_shape, dtype=int)), -1)
    return np.array([math.fsum(row) for row in flat.tolist()]).reshape(out_shape)


def validate(p, ax: Alphabet, ay: Alphabet, az: Alphabet) -> JointDist3:
    """Check a raw tensor and return it as a normalized :class:`JointDist3`.

    The tensor is divided by its compensated sum, so the stored distribution
    is normalized to rounding regardless of the input slack. The slack itself
    is kept as ``norm_residual``.

    Raises
    ------
    ShapeMismatch
        Tensor shape disagrees with the alphabet sizes.
    NegativeProbability
        Any entry below zero.
    NotNormalized
        Total differs from one by more than ``TOL_NORM``, or non-finite entries.
    """
    arr = np.asarray(p, dtype=np.float64)
    expected = (len(ax), len(ay), len(az))
    if arr.shape != expected:
        raise ShapeMismatch(f"tensor shape {arr.shape} does not match alphabets {expected}")
    if not np.all(np.isfinite(arr)):
        raise NotNormalized("tensor contains non-finite entries")
    if np.any(arr < 0):
        idx = tuple(int(i) for i in np.argwhere(arr < 0)[0])
        raise NegativeProbability(f"negative probability {arr[idx]!r} at index {idx}")
    total = fsum_total(arr)
    resid = abs(total - 1.0)
    if resid > TOL_NORM:
        raise NotNormalized(f"probabilities sum to {total!r}, not 1")
    return JointDist3(ax, ay, az, arr / total, norm_residual=resid)


def from_array(p, labels: Sequence[Sequence] | None = None) -> JointDist3:
    """Validate ``p`` with integer-string alphabets unless labels are given."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 3:
        raise ShapeMismatch(f"expected a 3-d tensor, got shape {arr.shape}")
    if labels is None:
        alph = [Alphabet.range(n) for n in arr.shape]
    else:
        alph = [Alphabet(tuple(l)) for l in labels]
    return validate(arr, *alph)


def _axes_of(d, vars: Iterable[str]) -> list[int]:
    names = d.vars
    out = []
    for v in vars:
        if v not in names:
            raise ShapeMismatch(f"variable {v!r} not among {names!r}")
        out.append(names.index(v))
    if len(set(out)) != len(out):
        raise ShapeMismatch(f"repeated variable in {vars!r}")
    return sorted(out)


def marginal(d, vars: str | Iterable[str]):
    """Sum out every axis not named in ``vars``.

    Works on :class:`JointDist3` and :class:`JointDist2`. Returns a
    :class:`Dist1` for one kept variable and a :class:`JointDist2` for two,
    with axes in the distribution's own order.
    """
    keep = _axes_of(d, vars)
    if not keep or len(keep) >= d.p.ndim:
        raise ShapeMismatch("marginal needs a nonempty proper subset of variables")
    p = _fsum_keep(d.p, keep)
    alph = d.alphabets
    if len(keep) == 1:
        return Dist1(alph[keep[0]], p, var=d.vars[keep[0]])
    return JointDist2(alph[keep[0]], alph[keep[1]], p, vars=(d.vars[keep[0]], d.vars[keep[1]]))


def conditional(d, given: str, value: Label, target: str | None = None):
    """Distribution of the remaining variables given ``given == value``.

    With ``target`` set, the result is the :class:`Dist1` of that single
    variable; otherwise it is the joint of everything except ``given``.
    """
    (g,) = _axes_of(d, given)
    i = d.alphabets[g].index(value)
    slab = np.take(d.p, i, axis=g)
    mass = fsum_total(slab)
    if mass <= 0.0:
        raise DegenerateCondition(f"Pr({given}={value!r}) = 0")
    rest = [v for v in d.vars if v != given]
    rest_alph = [a for k, a in enumerate(d.alphabets) if k != g]
    if target is not None and len(rest) > 1:
        (t,) = _axes_of(d, target)
        t_rest = rest.index(d.vars[t])
        slab = _fsum_keep(slab, [t_rest])
        return Dist1(rest_alph[t_rest], slab / mass, var=d.vars[t])
    if len(rest) == 1:
        return Dist1(rest_alph[0], slab / mass, var=rest[0])
    return JointDist2(rest_alph[0], rest_alph[1], slab / mass, vars=tuple(rest))


def product(d1: JointDist3, d2: JointDist3) -> JointDist3:
    """Joint system of two independent systems, outcomes paired per variable."""
    p = np.einsum("abc,def->adbecf", d1.p, d2.p)
    nx, ny, nz = (d1.shape[k] * d2.shape[k] for k in range(3))
    return JointDist3(
        d1.ax.pair(d2.ax),
        d1.ay.pair(d2.ay),
        d1.az.pair(d2.az),
        p.reshape(nx, ny, nz),
    )


def point_mass(ax: Alphabet, ay: Alphabet, az: Alphabet, at=(0, 0, 0)) -> JointDist3:
    p = np.zeros((len(ax), len(ay), len(az)))
    p[at] = 1.0
    return JointDist3(ax, ay, az, p)


def estimate_from_samples(
    t: SampleTable,
    ax: Alphabet,
    ay: Alphabet,
    az: Alphabet,
    smoothing_alpha: float = 0.0,
) -> JointDist3:
    """Additively smoothed empirical distribution of the sample rows."""
    if smoothing_alpha < 0:
        raise ValueError(f"smoothing_alpha must be nonnegative, got {smoothing_alpha}")
    if len(t) == 0 and smoothing_alpha == 0:
        raise EmptyInput("no sample rows and no smoothing")
    counts = np.zeros((len(ax), len(ay), len(az)))
    for (x, y, z), c in Counter(t.rows).items():
        counts[ax.index(x), ay.index(y), az.index(z)] = c
    denom = len(t) + smoothing_alpha * counts.size
    return JointDist3(ax, ay, az, (counts + smoothing_alpha) / denom)
