"""Compiled iteration loops for dense linear operators.

Mirrors ``algorithms._run_python`` row for row; the Halpern baselines need
millions of iterations on the 2x2 reference problem, which an interpreted
loop cannot deliver in reasonable time.  Rows are produced in chunks so the
buffers never exceed what a run actually uses.
"""

import numpy as np
from numba import njit

from .exceptions import Divergence

_CODES = {"ins": 0, "ipa": 1, "hppa": 2, "ohm": 3}
_REASONS = {1: "target-tol", 2: "residual-tol", 3: "max-iter"}
_CHUNK = 1 << 16


@njit(cache=True)
def _lu_solve(lu, piv, b, out):
    d = b.shape[0]
    for i in range(d):
        out[i] = b[i]
    for i in range(d):
        p = piv[i]
        if p != i:
            t = out[i]
            out[i] = out[p]
            out[p] = t
    for i in range(d):
        s = out[i]
        for j in range(i):
            s -= lu[i, j] * out[j]
        out[i] = s
    for i in range(d - 1, -1, -1):
        s = out[i]
        for j in range(i + 1, d):
            s -= lu[i, j] * out[j]
        out[i] = s / lu[i, i]


@njit(cache=True)
def _loop(code, lu, piv, par, xp, x, yp, anchor, xs, has_star, energy_ok,
          tols, n, rows_done, max_iter, last_res, has_last,
          err, dif, yos, jump, energy, omega, xbuf, carry):
    alpha, beta, gamma, eta, theta = par[0], par[1], par[2], par[3], par[4]
    d = x.shape[0]
    dv = np.empty(d)
    z = np.empty(d)
    jz = np.empty(d)
    res = np.empty(d)
    nxt = np.empty(d)
    carry[0] = np.nan
    cap = err.shape[0]
    for i in range(cap):
        for k in range(d):
            dv[k] = x[k] - xp[k]
        if code == 0:
            for k in range(d):
                z[k] = x[k] + (n / gamma) * dv[k]
            _lu_solve(lu, piv, z, jz)
            for k in range(d):
                res[k] = (z[k] - jz[k]) / eta
        elif code == 1:
            for k in range(d):
                z[k] = x[k] + (1.0 - alpha / n) * dv[k] + (1.0 - beta / n) * (yp[k] - x[k])
            _lu_solve(lu, piv, z, jz)
            for k in range(d):
                res[k] = (z[k] - jz[k]) / (eta + 1.0)
        else:
            _lu_solve(lu, piv, x, jz)
            for k in range(d):
                res[k] = (x[k] - jz[k]) / eta

        e2 = 0.0
        d2 = 0.0
        r2 = 0.0
        j2 = 0.0
        o2 = 0.0
        ee = 0.0
        for k in range(d):
            d2 += dv[k] * dv[k]
            r2 += res[k] * res[k]
            j2 += (res[k] - last_res[k]) ** 2
        if has_star:
            for k in range(d):
                e2 += (x[k] - xs[k]) ** 2
            err[i] = np.sqrt(e2)
        else:
            err[i] = np.nan
        dif[i] = np.sqrt(d2)
        yos[i] = np.sqrt(r2)
        if has_last:
            if i == 0:
                carry[0] = np.sqrt(j2)
            else:
                jump[i - 1] = np.sqrt(j2)
        has_last = True
        for k in range(d):
            last_res[k] = res[k]
            xbuf[i, k] = x[k]
        if code == 0:
            if energy_ok:
                v2 = 0.0
                for k in range(d):
                    ek = x[k] - xs[k]
                    vk = gamma * ek + (n - alpha) * dv[k]
                    v2 += vk * vk
                    ee += ek * ek
                energy[i] = (0.5 * v2 + 0.5 * gamma * (alpha - 1.0 - gamma) * ee
                             + 0.5 * (2.0 * alpha - 1.0 - gamma) * n * d2)
            else:
                energy[i] = np.nan
            for k in range(d):
                ok = (alpha - 1.0 - gamma) * dv[k] + beta * res[k]
                o2 += ok * ok
            omega[i] = np.sqrt(o2)
        else:
            energy[i] = np.nan
            omega[i] = np.nan

        finite = np.isfinite(yos[i])
        for k in range(d):
            finite = finite and np.isfinite(x[k])
        if not finite:
            return i + 1, 4, n
        rows_done += 1
        if has_star and tols[0] >= 0.0 and err[i] <= tols[0]:
            return i + 1, 1, n
        if tols[1] >= 0.0 and yos[i] <= tols[1]:
            return i + 1, 2, n
        if rows_done >= max_iter:
            return i + 1, 3, n

        if code == 0:
            for k in range(d):
                nxt[k] = x[k] + (1.0 - alpha / n) * dv[k] - (beta / n) * res[k]
        elif code == 1:
            w = 1.0 / (eta + 1.0)
            for k in range(d):
                nxt[k] = (1.0 - w) * z[k] + w * jz[k]
                yp[k] = z[k]
        elif code == 2:
            a = 1.0 / (n + 1)
            for k in range(d):
                nxt[k] = a * anchor[k] + (1.0 - a) * jz[k]
        else:
            a = 1.0 / (n + 1)
            for k in range(d):
                nxt[k] = a * anchor[k] + (1.0 - a) * (x[k] + (jz[k] - x[k]) / theta)
        for k in range(d):
            xp[k] = x[k]
            x[k] = nxt[k]
        n += 1
    return cap, 0, n


def run_dense(method, op, params, x0, rule, x_star, anchor, store_iterates):
    from .algorithms import ohm_theta

    code = _CODES[method]
    index = params.eta + 1.0 if method == "ipa" else params.eta
    lu, piv = op.factor(index)
    lu = np.ascontiguousarray(lu)
    piv = piv.astype(np.int64)
    theta = ohm_theta(params.eta, op.rho) if method == "ohm" else 1.0
    par = np.array([params.alpha, params.beta, params.gamma, params.eta, theta])
    dim = op.dim
    xp = x0.copy()
    x = x0.copy()
    yp = x0.copy()
    has_star = x_star is not None
    xs = np.asarray(x_star, dtype=float) if has_star else np.zeros(dim)
    energy_ok = has_star and 0.0 <= params.gamma <= params.alpha - 1.0
    tols = np.array([
        -1.0 if rule.target_tol is None else rule.target_tol,
        -1.0 if rule.residual_tol is None else rule.residual_tol,
    ])
    last_res = np.zeros(dim)
    carry = np.zeros(1)
    names = ("err", "diff", "yosida", "yosida_jump", "energy", "omega_norm")
    chunks = {k: [] for k in names}
    xchunks = []
    n = 1
    rows = 0
    code_out = 0
    while code_out == 0:
        size = int(min(_CHUNK, rule.max_iter - rows))
        bufs = [np.empty(size) for _ in names]
        bufs[3][:] = np.nan
        xbuf = np.empty((size, dim))
        filled, code_out, n = _loop(
            code, lu, piv, par, xp, x, yp, anchor, xs, has_star, energy_ok,
            tols, n, rows, rule.max_iter, last_res, rows > 0,
            *bufs, xbuf, carry,
        )
        if rows > 0:
            chunks["yosida_jump"][-1][-1] = carry[0]
        rows += filled
        for k, b in zip(names, bufs):
            chunks[k].append(b[:filled])
        if store_iterates:
            xchunks.append(xbuf[:filled])
        x_last = xbuf[filled - 1].copy()
    out = {k: np.concatenate(v) for k, v in chunks.items()}
    if code_out == 4:
        raise Divergence(f"{method}: non-finite iterate at n={n}")
    out["n"] = np.arange(1, rows + 1, dtype=np.int64)
    out["iterates"] = np.concatenate(xchunks) if store_iterates else None
    return out, x_last, _REASONS[code_out], rows
