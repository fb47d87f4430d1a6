"""The do-operation and the constructions built on it.

``do_operation(d, c)`` rescales every z-slice of ``d`` so that the Z marginal
becomes ``c`` while the conditional law of (X, Y) given Z is untouched::

    Pr(A, B, C = x, y, z) = Pr(X, Y, Z = x, y, z) * Pr(C = z) / Pr(Z = z)

(zero where Pr(Z = z) = 0). Conditioning on each source value and applying
the operation with target ``D_{Z | Y=y}`` gives the conditioned family;
stacking the family's source marginals row by row gives the aggregated
source.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, SupportMismatch
from .prob import Dist1, JointDist2, JointDist3, conditional, fsum_total, marginal


@dataclass(frozen=True, eq=False)
class DoResult:
    dist: JointDist3
    target: Dist1


@dataclass(frozen=True, eq=False)
class ConditionedFamily:
    """One do-operation output per condition value of positive probability.

    ``direction`` names the conditioned source: ``"y"`` gives the family
    (A_y, B_y, C_y) used for Un(X -> Z | Y); ``"x"`` gives (A_x, B_x, C_x)
    for Un(Y -> Z | X).
    """

    source: JointDist3
    direction: str
    members: dict
    weights: dict

    @property
    def source_axis(self) -> int:
        return 0 if self.direction == "y" else 1

    @property
    def condition_axis(self) -> int:
        return 1 if self.direction == "y" else 0


@dataclass(frozen=True, eq=False)
class AggregatedSource:
    """Joint law of the aggregated source with the conditioning variable.

    For direction ``"y"`` this is D_{A_{Z|Y}, Y} over (X-alphabet, Y); for
    ``"x"`` it is D_{X, B_{Z|X}} over (X, Y-alphabet).
    """

    joint: JointDist2
    direction: str


def do_operation(d: JointDist3, target: Dist1) -> DoResult:
    """Reset the Z marginal of ``d`` to ``target``.

    The target's support must lie inside the support of Pr(Z); identical
    supports are not required.

    Raises
    ------
    ShapeMismatch
        ``target`` is not over an alphabet of Z's size.
    SupportMismatch
        ``target`` puts mass on a z with Pr(Z=z) = 0.
    """
    c = np.asarray(target.p, dtype=np.float64)
    if c.shape != (d.shape[2],):
        raise ShapeMismatch(f"target has {c.shape[0]} outcomes, Z has {d.shape[2]}")
    pz = marginal(d, "z").p
    bad = (c > 0) & (pz <= 0.0)
    if np.any(bad):
        z = d.az.labels[int(np.argmax(bad))]
        raise SupportMismatch(f"target puts mass on z={z!r} where Pr(Z=z) = 0")
    out = JointDist3(d.ax, d.ay, d.az, rescale_z(d.p, c, pz))
    return DoResult(out, Dist1(d.az, c, var="z"))


def rescale_z(p: np.ndarray, c: np.ndarray, pz: np.ndarray) -> np.ndarray:
    """``p[..., z] * c[z] / pz[z]``, zero where ``pz`` is zero.

    The ratio ``c / pz`` overflows when ``pz`` is subnormal; those slices are
    computed as ``(p / pz) * c`` instead, which is bounded because
    ``p <= pz`` on every z-slice.
    """
    scale = np.zeros_like(pz)
    with np.errstate(over="ignore", invalid="ignore"):
        np.divide(c, pz, out=scale, where=pz > 0.0)
        out = p * scale
    big = np.isinf(scale)
    if big.any():
        out[..., big] = p[..., big] / pz[big] * c[big]
    return out


def conditioned_family(d: JointDist3, direction: str = "y") -> ConditionedFamily:
    if direction not in ("x", "y"):
        raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")
    cond = marginal(d, direction)
    members, weights = {}, {}
    for label, w in zip(cond.a.labels, cond.p.tolist()):
        if w <= 0.0:
            continue
        members[label] = do_operation(d, conditional(d, direction, label, target="z"))
        weights[label] = w
    return ConditionedFamily(d, direction, members, weights)


def member_source(f: ConditionedFamily, label) -> Dist1:
    """Marginal of the non-conditioned source in one family member."""
    var = "x" if f.direction == "y" else "y"
    return marginal(f.members[label].dist, var)


def aggregate_source(f: ConditionedFamily) -> AggregatedSource:
    d = f.source
    cond_alph = d.ay if f.direction == "y" else d.ax
    if f.direction == "y":
        joint = np.zeros((d.shape[0], d.shape[1]))
        for label, w in f.weights.items():
            joint[:, cond_alph.index(label)] = w * member_source(f, label).p
        return AggregatedSource(JointDist2(d.ax, d.ay, joint, vars=("a", "y")), "y")
    joint = np.zeros((d.shape[0], d.shape[1]))
    for label, w in f.weights.items():
        joint[cond_alph.index(label), :] = w * member_source(f, label).p
    return AggregatedSource(JointDist2(d.ax, d.ay, joint, vars=("x", "b")), "x")


def distribution_residual(d) -> float:
    """Worst violation of nonnegativity or unit total; 0 for an exact distribution."""
    return max(0.0, -float(d.p.min()), abs(fsum_total(d.p) - 1.0))
