"""Pure-numpy fallback for the monodromy kernel.

Large batches of spectral parameters are vectorised over lambda with the
loop over integration steps in Python.  Small batches (root polishing asks
for one lambda at a time) are vectorised over the steps instead: all step
matrices are formed at once and multiplied by a pairwise product tree, or
by a log-depth prefix scan when the intermediate states are needed.  Must
produce the same numbers as ``_kernel.pyx`` up to rounding.
"""

import numpy as np

_SQRT3_12 = np.sqrt(3.0) / 12.0


def _expm_coeffs(delta):
    """C, S with exp(W) = C*I + S*W for a traceless 2x2 W, W @ W = delta*I."""
    r = np.sqrt(np.abs(delta))
    small = np.abs(delta) < 1e-4
    pos = delta > 0.0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        c = np.where(pos, np.cosh(r), np.cos(r))
        s = np.where(pos, np.sinh(r), np.sin(r)) / r
    d = delta
    c_ser = 1.0 + d / 2.0 + d * d / 24.0 + d * d * d / 720.0
    s_ser = 1.0 + d / 6.0 + d * d / 120.0 + d * d * d / 5040.0
    return np.where(small, c_ser, c), np.where(small, s_ser, s)


def _side(u, du):
    return (u > 0.0) | ((u == 0.0) & (du > 0.0))


def _angle(u, du, crossings):
    # the Pruefer angle only passes k*pi upwards (there u = 0 and the angle
    # increases at rate 1), so it is pi * crossings plus atan2 reduced mod pi
    phi = np.arctan2(u, du)
    phi = np.where(phi < 0.0, phi + np.pi, np.where(phi >= np.pi, phi - np.pi, phi))
    return np.pi * crossings + phi


# below this many lambdas the step-parallel path is used
_STEP_PARALLEL_MAX = 32
# elements per (steps x lambdas) block in the step-parallel path
_BLOCK = 1 << 20


def _step_matrices(h, q1, q2, lam):
    """Entries of the Magnus step exponentials, each of shape (steps, lambdas)."""
    h = h[:, None]
    v1 = q1[:, None] - lam[None, :]
    v2 = q2[:, None] - lam[None, :]
    vbar = 0.5 * (v1 + v2)
    k = _SQRT3_12 * h * h * (v1 - v2)
    cc, ss = _expm_coeffs(k * k + h * h * vbar)
    return cc + ss * k, ss * h, ss * h * vbar, cc - ss * k


def _mul(x, y):
    """Entrywise 2x2 product x @ y of stacked matrices given as 4-tuples."""
    a, b, c, d = x
    e, f, g, k = y
    return a * e + b * g, a * f + b * k, c * e + d * g, c * f + d * k


def _tree_product(mats):
    """E_n ... E_2 E_1 for stacked step matrices (later steps on the left)."""
    while mats[0].shape[0] > 1:
        n = mats[0].shape[0]
        if n % 2:
            one = np.ones_like(mats[0][:1])
            zero = np.zeros_like(one)
            mats = tuple(np.concatenate([m, pad]) for m, pad in zip(mats, (one, zero, zero, one)))
        early = tuple(m[0::2] for m in mats)
        late = tuple(m[1::2] for m in mats)
        mats = _mul(late, early)
    return tuple(m[0] for m in mats)


def _prefix_products(mats):
    """P_i = E_i ... E_1 for every i (Hillis-Steele scan)."""
    mats = tuple(m.copy() for m in mats)
    n = mats[0].shape[0]
    shift = 1
    while shift < n:
        prod = _mul(tuple(m[shift:] for m in mats), tuple(m[:-shift] for m in mats))
        for m, p in zip(mats, prod):
            m[shift:] = p
        shift *= 2
    return mats


def _crossings(u, du):
    side = _side(u, du)
    # both fundamental solutions start on the positive side
    return (side[0] != True).astype(float) + np.count_nonzero(side[1:] != side[:-1], axis=0)


def _transfer_steps(h, q1, q2, lam, angles):
    n, m = h.shape[0], lam.shape[0]
    out = np.empty((m, 6))
    chunk = max(1, _BLOCK // max(n, 1))
    for lo in range(0, m, chunk):
        part = lam[lo : lo + chunk]
        mats = _step_matrices(h, q1, q2, part)
        if angles:
            a, b, c, d = _prefix_products(mats)
            zc, zs = _crossings(a, c), _crossings(b, d)
            a, b, c, d = a[-1], b[-1], c[-1], d[-1]
            psi_c, psi_s = _angle(a, c, zc), _angle(b, d, zs)
        else:
            a, b, c, d = _tree_product(mats)
            psi_c = psi_s = np.full(part.shape[0], np.nan)
        out[lo : lo + chunk] = np.column_stack([a, c, b, d, psi_c, psi_s])
    return out


def magnus_transfer(h, q1, q2, lams, angles=True):
    """Propagate (u, u') across all steps for every lambda.

    Parameters
    ----------
    h, q1, q2 : 1-D arrays of equal length
        Step lengths and the potential at the two Gauss nodes of each step.
    lams : 1-D array
        Spectral parameters.
    angles : bool
        Track the Pruefer angles; when False the last two columns are NaN.

    Returns
    -------
    ndarray, shape (len(lams), 6)
        Columns c(1), c'(1), s(1), s'(1) and the unwrapped Pruefer angles
        atan2(c, c') and atan2(s, s') at x = 1.
    """
    h = np.asarray(h, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    lam = np.asarray(lams, dtype=float)
    m = lam.shape[0]
    if 0 < m <= _STEP_PARALLEL_MAX and h.shape[0] > 4 * m:
        return _transfer_steps(h, q1, q2, lam, angles)
    c, cp = np.ones(m), np.zeros(m)
    s, sp = np.zeros(m), np.ones(m)
    zc = np.zeros(m)
    zs = np.zeros(m)
    side_c = np.ones(m, dtype=bool)
    side_s = np.ones(m, dtype=bool)
    for i in range(h.shape[0]):
        hi = h[i]
        v1 = q1[i] - lam
        v2 = q2[i] - lam
        vbar = 0.5 * (v1 + v2)
        k = _SQRT3_12 * hi * hi * (v1 - v2)
        cc, ss = _expm_coeffs(k * k + hi * hi * vbar)
        e11 = cc + ss * k
        e12 = ss * hi
        e21 = ss * hi * vbar
        e22 = cc - ss * k
        c, cp = e11 * c + e12 * cp, e21 * c + e22 * cp
        s, sp = e11 * s + e12 * sp, e21 * s + e22 * sp
        if not angles:
            continue
        new = _side(c, cp)
        zc += new != side_c
        side_c = new
        new = _side(s, sp)
        zs += new != side_s
        side_s = new
    if angles:
        psi_c, psi_s = _angle(c, cp, zc), _angle(s, sp, zs)
    else:
        psi_c = psi_s = np.full(m, np.nan)
    return np.column_stack([c, cp, s, sp, psi_c, psi_s])


def magnus_path(h, q1, q2, lam):
    """Fundamental matrix after every step for a single lambda.

    Returns an array of shape (len(h) + 1, 4) with rows (c, c', s, s'),
    starting from the identity at x = 0.
    """
    h = np.asarray(h, dtype=float)
    out = np.empty((h.shape[0] + 1, 4))
    out[0] = 1.0, 0.0, 0.0, 1.0
    if h.shape[0]:
        lam = np.array([float(lam)])
        a, b, c, d = _prefix_products(_step_matrices(h, np.asarray(q1, float), np.asarray(q2, float), lam))
        out[1:] = np.column_stack([a[:, 0], c[:, 0], b[:, 0], d[:, 0]])
    return out
