"""Pure-NumPy versions of the compiled kernels (same arguments, same results)."""

import numpy as np


def quad_sgd(H, b, x, s, steps, noise, marks):
    """Run ``x <- x - h_t (H x - b + noise_t)`` in place.

    ``s`` accumulates the iterates (prefix sum).  For every ``t`` listed in
    the sorted array ``marks`` the state after step ``t`` is copied out.
    Returns ``(out_x, out_s)`` of shape ``(len(marks), n)``.
    """
    n = x.shape[0]
    out_x = np.empty((len(marks), n))
    out_s = np.empty((len(marks), n))
    noisy = noise.shape[0] > 0
    c = 0
    for t in range(steps.shape[0]):
        g = H @ x - b
        if noisy:
            g += noise[t]
        x -= steps[t] * g
        s += x
        while c < len(marks) and marks[c] == t:
            out_x[c] = x
            out_s[c] = s
            c += 1
    return out_x, out_s


def sliding_l1(g, x, beta, T, weight, dirs, tau):
    """Inner prox-sliding loop for the nonsmooth term ``weight * |u|_1``.

    With an empty ``dirs`` the exact subgradient ``weight * sign(u)`` is
    used; otherwise step ``t`` uses the two-point estimate along
    ``dirs[t-1]`` with radius ``tau``.  Returns ``(u_T, averaged u_T)``.
    """
    n = x.shape[0]
    zo = dirs.shape[0] > 0
    u = np.array(x, dtype=float)
    ut = u.copy()
    for t in range(1, T + 1):
        p = 0.5 * t
        theta = 2.0 * (t + 1) / (t * (t + 3.0))
        if zo:
            e = dirs[t - 1]
            diff = np.abs(u + tau * e).sum() - np.abs(u - tau * e).sum()
            sub = (n / (2.0 * tau) * weight * diff) * e
        else:
            sub = weight * np.sign(u)
        u = (beta * x + beta * p * u - g - sub) / (beta * (1.0 + p))
        ut = (1.0 - theta) * ut + theta * u
    return u, ut
