"""Shannon entropy and mutual information on discrete distributions.

All functions take a distribution object from :mod:`dopid.prob` and variable
names (``"x"``, ``"xy"``, ...). Sums are compensated (``math.fsum``) and zero
probabilities are skipped outright, so ``0 log 0`` never reaches ``log``.
"""
from __future__ import annotations

import math

import numpy as np

from .prob import _axes_of, _fsum_keep

_BASES = {"2": 2.0, "e": math.e, "10": 10.0}


def log_base(base=2) -> float:
    """Resolve a log base given as 2, 10, ``"e"`` or a number; returns ln(base)."""
    if isinstance(base, str):
        key = base.strip().lower()
        if key not in _BASES:
            raise ValueError(f"unsupported log base {base!r}; use 2, e or 10")
        base = _BASES[key]
    base = float(base)
    if base not in (2.0, math.e, 10.0):
        raise ValueError(f"unsupported log base {base!r}; use 2, e or 10")
    return math.log(base)


def _h(p, ln_base: float) -> float:
    # p need not sum to one: conditional slices are passed unnormalized
    return -math.fsum(v * math.log(v) for v in np.ravel(p).tolist() if v > 0.0) / ln_base


def entropy(d, base=2) -> float:
    """Entropy of the full distribution ``d`` (any arity)."""
    p = d.p if hasattr(d, "p") else np.asarray(d)
    return _h(p, log_base(base))


def _cond_entropy_array(p: np.ndarray, n_given: int, ln_base: float) -> float:
    # p has the given axes first, flattened to (n_given_cells, n_target_cells)
    rows = p.reshape(n_given, -1).tolist()
    terms = []
    for row in rows:
        pg = math.fsum(row)
        if pg > 0.0:
            terms.append(pg * _h([v / pg for v in row], 1.0))
    return math.fsum(terms) / ln_base


def _arranged(d, first: str, second: str) -> tuple[np.ndarray, int]:
    ga = _axes_of(d, first)
    ta = _axes_of(d, second)
    if set(ga) & set(ta):
        raise ValueError(f"variable sets {first!r} and {second!r} overlap")
    keep = sorted(ga + ta)
    m = _fsum_keep(d.p, keep)
    order = [keep.index(a) for a in ga] + [keep.index(a) for a in ta]
    m = np.transpose(m, order)
    n_first = int(np.prod([d.p.shape[a] for a in ga]))
    return m, n_first


def conditional_entropy(d, target: str, given: str, base=2) -> float:
    """H(target | given) as the probability-weighted entropy of each slice."""
    if not given:
        return entropy(marginal_array(d, target), base)
    m, n_given = _arranged(d, given, target)
    return _cond_entropy_array(m, n_given, log_base(base))


def marginal_array(d, vars: str) -> np.ndarray:
    return _fsum_keep(d.p, _axes_of(d, vars))


def mutual_information(d, a: str | None = None, b: str | None = None, base=2) -> float:
    """I(a; b) = H(a) - H(a | b).

    For a two-variable distribution the variables may be omitted.
    """
    if a is None and b is None:
        a, b = d.vars[0], d.vars[1]
    return entropy(marginal_array(d, a), base) - conditional_entropy(d, a, b, base)


def conditional_mutual_information(d, a: str, b: str, given: str, base=2) -> float:
    """I(a; b | given), averaged over slices of positive probability."""
    m, n_given = _arranged(d, given, a + b)
    ln_b = log_base(base)
    na = int(np.prod([d.p.shape[k] for k in _axes_of(d, a)]))
    terms = []
    for slab in m.reshape(n_given, na, -1):
        pg = math.fsum(slab.ravel().tolist())
        if pg <= 0.0:
            continue
        s = slab / pg
        pa = [math.fsum(r) for r in s.tolist()]
        h_a = _h(pa, 1.0)
        h_a_given_b = _cond_entropy_array(s.T.copy(), s.shape[1], 1.0)
        terms.append(pg * (h_a - h_a_given_b))
    return math.fsum(terms) / ln_b


def joint_mutual_information(d, base=2) -> float:
    """I(X,Y; Z) for a three-variable system."""
    return entropy(marginal_array(d, "z"), base) - conditional_entropy(d, "z", "xy", base)
