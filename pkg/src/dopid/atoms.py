"""Unique, redundant and synergistic information atoms.

Unique information from X to Z given Y is the probability-weighted mutual
information inside the conditioned family::

    Un(X -> Z | Y) = sum_y Pr(Y=y) I(A_y; C_y)

and the remaining atoms follow from the Shannon bookkeeping::

    Red = I(X; Z) - Un(X -> Z | Y)
    Syn = I(X; Z | Y) - Un(X -> Z | Y)

The single-quantity functions here build the family explicitly through
:mod:`dopid.do_op`. :func:`decompose` runs the fused kernel instead and is the
one to call in bulk.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from . import do_op, kernel, measures
from .prob import JointDist3

TOL = 1e-9

_OTHER = {"x": "y", "y": "x"}


def _direction(direction: str) -> str:
    # "x" means Un(X -> Z | Y), "y" means Un(Y -> Z | X)
    if direction not in _OTHER:
        raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")
    return direction


def unique_information(d: JointDist3, direction: str = "x", base=2) -> float:
    """Un(source -> Z | other source) from the conditioned family."""
    src = _direction(direction)
    fam = do_op.conditioned_family(d, _OTHER[src])
    terms = [
        w * measures.mutual_information(fam.members[label].dist, src, "z", base)
        for label, w in fam.weights.items()
    ]
    return math.fsum(terms)


def unique_information_alt(d: JointDist3, direction: str = "x", base=2) -> float:
    """Un as the mean member source entropy minus H(source | Z)."""
    src = _direction(direction)
    fam = do_op.conditioned_family(d, _OTHER[src])
    avg = math.fsum(
        w * measures.entropy(do_op.member_source(fam, label), base)
        for label, w in fam.weights.items()
    )
    return avg - measures.conditional_entropy(d, src, "z", base)


def redundant_information(d: JointDist3, base=2, order: str = "xy") -> float:
    """Red in the given source order: I(first; Z) - Un(first -> Z | second)."""
    first = order[0]
    return measures.mutual_information(d, first, "z", base) - unique_information(d, first, base)


def redundant_information_alt(d: JointDist3, base=2, order: str = "xy") -> float:
    """Red as the mutual information of the aggregated source with its condition.

    ``order="xy"`` gives I(A_{Z|Y}; Y), ``order="yx"`` gives I(X; B_{Z|X}).
    """
    cond = _OTHER[order[0]]
    agg = do_op.aggregate_source(do_op.conditioned_family(d, cond))
    return measures.mutual_information(agg.joint, base=base)


def synergistic_information(d: JointDist3, base=2) -> float:
    return measures.conditional_mutual_information(d, "x", "z", "y", base) - unique_information(
        d, "x", base
    )


@dataclass(frozen=True)
class PidResult:
    """All four atoms with the Shannon quantities they must reconcile with.

    ``red`` is the (X, Y)-order value; ``red_swapped`` the (Y, X)-order one.
    Neither is averaged into the other.
    """

    un_x_z_given_y: float
    un_y_z_given_x: float
    red: float
    syn: float
    i_xz: float
    i_yz: float
    i_xyz: float
    i_xz_given_y: float
    i_yz_given_x: float
    h_z_given_xy: float
    red_alt: float
    red_swapped: float
    un_x_alt: float
    un_y_alt: float
    red_swapped_alt: float
    base: str = "2"
    closed_system: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "closed_system", self.h_z_given_xy <= TOL)

    @property
    def atoms(self) -> tuple:
        """(Un_X, Un_Y, Red, Syn)."""
        return (self.un_x_z_given_y, self.un_y_z_given_x, self.red, self.syn)

    @property
    def residuals(self) -> dict:
        return {
            "atoms_sum": abs(self.i_xyz - (self.red + self.syn + self.un_x_z_given_y + self.un_y_z_given_x)),
            "red_alt": abs(self.red - self.red_alt),
            "red_swapped": abs(self.red - self.red_swapped),
            "un_x_alt": abs(self.un_x_z_given_y - self.un_x_alt),
            "un_y_alt": abs(self.un_y_z_given_x - self.un_y_alt),
        }

    def to_json(self) -> dict:
        out = asdict(self)
        out["closed_system"] = self.closed_system
        out["residuals"] = self.residuals
        return out


def _base_name(base) -> str:
    ln = measures.log_base(base)
    return {math.log(2.0): "2", 1.0: "e", math.log(10.0): "10"}[ln]


def result_from_terms(t: kernel.KernelTerms, base=2) -> PidResult:
    k = kernel
    un_x = t.x[k.UN]
    un_y = t.y[k.UN]
    i_xz = t.x[k.I_SRC_Z]
    i_yz = t.y[k.I_SRC_Z]
    i_xz_y = t.shannon[k.I_XZ_GIVEN_Y]
    return PidResult(
        un_x_z_given_y=float(un_x),
        un_y_z_given_x=float(un_y),
        red=float(i_xz - un_x),
        syn=float(i_xz_y - un_x),
        i_xz=float(i_xz),
        i_yz=float(i_yz),
        i_xyz=float(t.shannon[k.I_XYZ]),
        i_xz_given_y=float(i_xz_y),
        i_yz_given_x=float(t.shannon[k.I_YZ_GIVEN_X]),
        h_z_given_xy=float(t.shannon[k.H_Z_GIVEN_XY]),
        red_alt=float(t.x[k.I_AGG]),
        red_swapped=float(i_yz - un_y),
        un_x_alt=float(t.x[k.AVG_H] - t.x[k.H_SRC_GIVEN_Z]),
        un_y_alt=float(t.y[k.AVG_H] - t.y[k.H_SRC_GIVEN_Z]),
        red_swapped_alt=float(t.y[k.I_AGG]),
        base=_base_name(base),
    )


def decompose(d: JointDist3, base=2, backend: str | None = None) -> PidResult:
    """Full decomposition of ``d`` with both alternate routes and the swapped Red."""
    t = kernel.compute_terms(d.p, measures.log_base(base), backend)
    return result_from_terms(t, base)
