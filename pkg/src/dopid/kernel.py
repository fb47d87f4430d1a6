"""Backend selection for the decomposition kernel.

The compiled ``_ckernel`` extension is used when it imports; otherwise the
numpy implementation in ``_pykernel`` takes over. Set ``DOPID_PURE_PYTHON=1``
to force the fallback.

Kernel slots (nats) returned by ``source_terms`` for the source on axis 0,
with the family conditioned on axis 1:

====  =======================================================
0     unique information, mean of I(A_y; C_y)
1     mean of H(A_y)
2     mean of H(A_y | C_y)
3     H(source)
4     H(source | Z)
5     I(source; Z)
6     H(Z | condition)
7     entropy of the aggregated source marginal
8     I(aggregated source; condition)
9     worst |total - 1| over family members
10    worst |member Z marginal - target|
11    smallest member entry
12    worst |aggregated source marginal - source marginal|
13    worst |row entropy of aggregate - H(A_y)|
14    worst |aggregate condition marginal - condition marginal|
====  =======================================================
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _pykernel

try:
    if os.environ.get("DOPID_PURE_PYTHON"):
        raise ImportError("pure python requested")
    from . import _ckernel
except ImportError:
    _ckernel = None

BACKENDS = {"python": _pykernel}
if _ckernel is not None:
    BACKENDS["cython"] = _ckernel

BACKEND = "cython" if _ckernel is not None else "python"

(UN, AVG_H, AVG_H_GIVEN_C, H_SRC, H_SRC_GIVEN_Z, I_SRC_Z, H_Z_GIVEN_COND, H_AGG, I_AGG,
 DO_TOTAL, DO_MARGIN, DO_MIN, AGG_SRC_MARGIN, AGG_ROW_ENTROPY, AGG_COND_MARGIN) = range(15)

I_XYZ, I_XZ_GIVEN_Y, I_YZ_GIVEN_X, H_Z_GIVEN_XY, H_Z = range(5)


def get_backend(name: str | None = None):
    if name is None or name == "auto":
        return BACKENDS[BACKEND]
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None


@dataclass(frozen=True)
class KernelTerms:
    """Raw kernel output for both directions, converted to the chosen base.

    ``x`` holds the X-source terms (family conditioned on Y), ``y`` the
    Y-source terms (family conditioned on X). Residual slots stay
    unconverted since they are probabilities, not information.
    """

    x: np.ndarray
    y: np.ndarray
    shannon: np.ndarray
    joint_a_y: np.ndarray
    joint_x_b: np.ndarray
    backend: str


_INFO_SLOTS = [UN, AVG_H, AVG_H_GIVEN_C, H_SRC, H_SRC_GIVEN_Z, I_SRC_Z, H_Z_GIVEN_COND, H_AGG, I_AGG]


def compute_terms(p: np.ndarray, ln_base: float = math.log(2.0), backend: str | None = None) -> KernelTerms:
    impl = get_backend(backend)
    p = np.ascontiguousarray(p, dtype=np.float64)
    tx, jx = impl.source_terms(p)
    ty, jy = impl.source_terms(np.ascontiguousarray(p.transpose(1, 0, 2)))
    sh = impl.shannon_terms(p)
    tx = np.array(tx)
    ty = np.array(ty)
    tx[_INFO_SLOTS] /= ln_base
    ty[_INFO_SLOTS] /= ln_base
    sh = np.array(sh) / ln_base
    name = backend if backend not in (None, "auto") else BACKEND
    # jy is indexed [y, x]: the joint of B_{Z|X} with X, transposed back
    return KernelTerms(tx, ty, sh, np.asarray(jx), np.asarray(jy).T.copy(), name)
