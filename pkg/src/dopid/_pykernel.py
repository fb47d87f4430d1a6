"""Pure numpy implementation of the decomposition kernel.

Mirrors ``_ckernel.pyx`` term for term. All values are in nats; slot
meanings are listed in :mod:`dopid.kernel`.
"""
import numpy as np

from .do_op import rescale_z

N_SOURCE_TERMS = 15
N_SHANNON_TERMS = 5


def _neg_plogp(p):
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = -p[pos] * np.log(p[pos])
    return out


def _plog_ratio(p, *den, num=()):
    """Sum of p * log(p * prod(num) / prod(den)) over cells with p > 0.

    Every factor is logged separately: products of small marginals can
    underflow to zero even though each factor is positive wherever p is.
    """
    pos = p > 0
    lg = np.log(p[pos])
    for q in num:
        lg += np.log(np.broadcast_to(q, p.shape)[pos])
    for q in den:
        lg -= np.log(np.broadcast_to(q, p.shape)[pos])
    return float(np.sum(p[pos] * lg))


def source_terms(p):
    """Terms for the X-source direction: family conditioned on axis 1."""
    p = np.ascontiguousarray(p, dtype=np.float64)
    nx, ny, nz = p.shape
    out = np.zeros(N_SOURCE_TERMS)
    joint = np.zeros((nx, ny))

    pxz = p.sum(axis=1)
    pyz = p.sum(axis=0)
    px = pxz.sum(axis=1)
    py = pyz.sum(axis=1)
    pz = pxz.sum(axis=0)

    h_x = float(_neg_plogp(px).sum())
    h_x_given_z = -_plog_ratio(pxz, pz[None, :])
    i_xz = _plog_ratio(pxz, px[:, None], pz[None, :])

    un = avg_h = avg_h_given_c = h_z_given_y = 0.0
    do_total = do_margin = 0.0
    do_min = np.inf
    row_h = np.zeros(ny)
    for y in range(ny):
        w = py[y]
        if w <= 0:
            continue
        c = pyz[y] / w
        m = rescale_z(p, c, pz)
        do_total = max(do_total, abs(m.sum() - 1.0))
        do_min = min(do_min, float(m.min()))
        mxz = m.sum(axis=1)
        cm = mxz.sum(axis=0)
        do_margin = max(do_margin, float(np.max(np.abs(cm - c))))
        a = mxz.sum(axis=1)
        h_a = float(_neg_plogp(a).sum())
        h_a_given_c = -_plog_ratio(mxz, cm[None, :])
        i_ac = _plog_ratio(mxz, a[:, None], cm[None, :])
        un += w * i_ac
        avg_h += w * h_a
        avg_h_given_c += w * h_a_given_c
        h_z_given_y += w * float(_neg_plogp(c).sum())
        joint[:, y] = w * a
        row_h[y] = h_a

    agg_x = joint.sum(axis=1)
    agg_y = joint.sum(axis=0)
    row_resid = 0.0
    for y in range(ny):
        if py[y] > 0:
            r = joint[:, y] / agg_y[y]
            row_resid = max(row_resid, abs(float(_neg_plogp(r).sum()) - row_h[y]))

    out[0] = un
    out[1] = avg_h
    out[2] = avg_h_given_c
    out[3] = h_x
    out[4] = h_x_given_z
    out[5] = i_xz
    out[6] = h_z_given_y
    out[7] = float(_neg_plogp(agg_x).sum())
    out[8] = _plog_ratio(joint, agg_x[:, None], agg_y[None, :])
    out[9] = do_total
    out[10] = do_margin
    out[11] = do_min if np.isfinite(do_min) else 0.0
    out[12] = float(np.max(np.abs(agg_x - px)))
    out[13] = row_resid
    out[14] = float(np.max(np.abs(agg_y - py)))
    return out, joint


def shannon_terms(p):
    p = np.ascontiguousarray(p, dtype=np.float64)
    pxy = p.sum(axis=2)
    pxz = p.sum(axis=1)
    pyz = p.sum(axis=0)
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    pz = pxz.sum(axis=0)
    out = np.zeros(N_SHANNON_TERMS)
    out[0] = _plog_ratio(p, pxy[:, :, None], pz[None, None, :])
    out[1] = _plog_ratio(p, pxy[:, :, None], pyz[None, :, :], num=(py[None, :, None],))
    out[2] = _plog_ratio(p, pxy[:, :, None], pxz[:, None, :], num=(px[:, None, None],))
    out[3] = -_plog_ratio(p, pxy[:, :, None])
    out[4] = float(_neg_plogp(pz).sum())
    return out
