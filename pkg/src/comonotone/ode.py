"""Adaptive Dormand-Prince 5(4) integrator with dense output.

Step-size selection uses the PI controller of Hairer, Norsett & Wanner
(Solving ODEs I, sec. II.4) with the usual DOPRI5 constants; the dense
output is the 4th-order continuous extension of the method.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import StepSizeUnderflow

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = B5 - B4

# continuous extension: y(t + s h) = y + h * K^T (P @ [s, s^2, s^3, s^4])
P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 10.0
PI_BETA = 0.04
PI_EXPO = 0.2 - 0.75 * PI_BETA
UNDERFLOW = 1e-14


@dataclass
class OdeSolution:
    t: np.ndarray
    y: np.ndarray
    accepted_steps: int
    rejected_steps: int
    evaluations: int


def _error_norm(err, y_old, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(f, t0, y0, f0, rtol, atol, max_step, direction_span):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step, direction_span)
    f1 = f(t0 + h0, y0 + h0 * f0)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, max_step, direction_span)


def dopri5(f, t0, y0, t_end, t_eval, rtol=1e-6, atol=1e-9, max_step=np.inf,
           first_step=None):
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end > t0``.

    Parameters
    ----------
    f : callable
        ``f(t, y) -> ndarray`` on flat state vectors.
    t_eval : array_like
        Increasing sample times inside ``[t0, t_end]``; the solution is
        reported there through the dense output.
    rtol, atol : float
        Componentwise tolerances of the error norm
        ``rms(err / (atol + rtol * max(|y_old|, |y_new|)))``.

    Raises
    ------
    StepSizeUnderflow
        If the controller asks for a step below ``1e-14 * |t|``.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    if not t_end > t0:
        raise ValueError("t_end must exceed t0")
    if t_eval.size and (t_eval[0] < t0 or t_eval[-1] > t_end or np.any(np.diff(t_eval) <= 0)):
        raise ValueError("t_eval must be increasing inside [t0, t_end]")
    y = np.array(y0, dtype=float)
    t = float(t0)
    k = np.empty((7, y.size))
    k[0] = f(t, y)
    nfev = 1
    if first_step is None:
        h = _initial_step(f, t, y, k[0], rtol, atol, max_step, t_end - t0)
        nfev += 1
    else:
        h = min(first_step, max_step, t_end - t0)
    out = np.empty((t_eval.size, y.size))
    j = 0
    while j < t_eval.size and t_eval[j] <= t:
        out[j] = y
        j += 1
    accepted = rejected = 0
    err_old = 1e-4
    just_rejected = False
    while t < t_end:
        if h < UNDERFLOW * abs(t):
            raise StepSizeUnderflow(f"step size {h:.3e} underflow at t={t:.6g}")
        last = t + h >= t_end
        if last:
            h = t_end - t
        for s in range(1, 7):
            k[s] = f(t + C[s] * h, y + h * (A[s] @ k[:s]))
        nfev += 6
        y_new = y + h * (B5 @ k)
        err = _error_norm(h * (E @ k), y, y_new, rtol, atol)
        fac11 = err ** PI_EXPO
        if err <= 1.0:
            growth = FAC_MAX if err == 0.0 else SAFETY * err_old**PI_BETA / fac11
            growth = min(FAC_MAX, max(FAC_MIN, growth))
            if just_rejected:
                growth = min(growth, 1.0)
            err_old = max(err, 1e-4)
            t_new = t_end if last else t + h
            q = k.T @ P
            while j < t_eval.size and t_eval[j] <= t_new:
                s_ = (t_eval[j] - t) / h
                out[j] = y + h * (q @ np.array([s_, s_**2, s_**3, s_**4]))
                j += 1
            t, y = t_new, y_new
            k[0] = k[6]
            accepted += 1
            just_rejected = False
            h = min(h * growth, max_step)
        else:
            rejected += 1
            just_rejected = True
            h = h * max(FAC_MIN, SAFETY / fac11)
    return OdeSolution(t_eval.copy(), out, accepted, rejected, nfev)
