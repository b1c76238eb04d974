"""Pure-Python reference kernels, API-identical to the compiled extension.

Both backends consume the same flattened layout so callers never branch:

* cycle storage: ``cyc_ptr``/``cyc_edge``/``cyc_coef`` in CSR style;
* subspace membership: ``sub_ptr``/``sub_cyc`` listing cycle ids per block;
* prefactorized local systems: ``fac_ptr`` into ``fac_data`` holding, per
  block, either a row-major lower Cholesky factor (``fac_kind == 0``) or a
  dense pseudo-inverse (``fac_kind == 1``), each ``d x d`` flattened.

The sequential sweeps here are the honest fallback; the hot loops live in
``_kernels.pyx``.
"""

import numpy as np
from scipy.linalg import cho_solve

__all__ = ["schwarz_sweep_kernel", "gauss_seidel_kernel"]


def schwarz_sweep_kernel(
    r,
    tau0,
    alpha_total,
    inv_w,
    cyc_ptr,
    cyc_edge,
    cyc_coef,
    sub_ptr,
    sub_cyc,
    fac_ptr,
    fac_data,
    fac_kind,
    order,
    b_buf,
    alpha_buf,
):
    """One multiplicative sweep over the blocks listed in ``order``.

    Updates ``r``, ``tau0`` and the running per-cycle coefficients in place;
    returns the exact decrease of the squared weighted residual objective
    accumulated over all block solves.
    """
    decrease = 0.0
    for j in order:
        lo, hi = sub_ptr[j], sub_ptr[j + 1]
        d = hi - lo
        if d == 0:
            continue
        b = b_buf[:d]
        for t in range(d):
            c = sub_cyc[lo + t]
            sl = slice(cyc_ptr[c], cyc_ptr[c + 1])
            e = cyc_edge[sl]
            b[t] = np.dot(r[e] * inv_w[e], cyc_coef[sl])
        base = fac_ptr[j]
        fac = fac_data[base : base + d * d].reshape(d, d)
        if fac_kind[j] == 0:
            alpha = cho_solve((fac, True), b, check_finite=False)
        else:
            alpha = fac @ b
        alpha_buf[:d] = alpha
        decrease += float(np.dot(b, alpha))
        for t in range(d):
            a = alpha[t]
            if a == 0.0:
                continue
            c = sub_cyc[lo + t]
            alpha_total[c] += a
            sl = slice(cyc_ptr[c], cyc_ptr[c + 1])
            e = cyc_edge[sl]
            upd = a * cyc_coef[sl]
            # in-place fancy updates: cycles inside one block may share edges,
            # but each cycle's own edges are distinct, so plain -= is safe here
            r[e] -= upd
            tau0[e] += upd
    return decrease


def gauss_seidel_kernel(v, f, adj_ptr, adj_other, adj_weight, wdeg):
    """One forward Gauss-Seidel sweep in natural vertex order, in place."""
    for i in range(v.shape[0]):
        lo, hi = adj_ptr[i], adj_ptr[i + 1]
        s = f[i]
        for k in range(lo, hi):
            s += adj_weight[k] * v[adj_other[k]]
        v[i] = s / wdeg[i]
