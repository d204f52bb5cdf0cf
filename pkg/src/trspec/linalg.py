"""Dense complex linear algebra for small matrices.

Eigenvalues come from a Householder reduction to upper Hessenberg form
followed by single-shift complex QR iterations (Wilkinson shift, Givens
rotations, deflation at the bottom of the active block).  The matrix
exponential uses scaling and squaring around a truncated Taylor series.

Both kernels are vectorised over a leading batch axis so that a whole
window of mode matrices is processed in one call.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_scalar, check_square
from .errors import NoConvergenceError, OrderTooLargeError

_EPS = np.finfo(float).eps
_TAYLOR_DEGREE = 18
_SCALED_NORM = 0.5


@dataclass(frozen=True)
class EigenSet:
    """Eigenvalues with multiplicity and a backward-error estimate for each.

    ``residuals[i]`` is the smallest singular value of ``m - values[i] * I``,
    i.e. the 2-norm of the smallest perturbation making ``values[i]`` exact.
    """

    values: np.ndarray
    residuals: np.ndarray

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def _hessenberg_stack(a):
    """Reduce each matrix of a ``(m, n, n)`` stack to upper Hessenberg form in place."""
    n = a.shape[-1]
    for j in range(n - 2):
        x = a[:, j + 1:, j]
        alpha = np.linalg.norm(x, axis=1)
        x0 = x[:, 0]
        mag = np.abs(x0)
        safe = np.where(mag > 0, mag, 1.0)
        phase = np.where(mag > 0, x0.real / safe + 1j * (x0.imag / safe), 1.0)
        v = x.copy()
        v[:, 0] += phase * alpha
        vnorm = np.linalg.norm(v, axis=1)
        live = vnorm > 0
        v[live] /= vnorm[live, None]
        v[~live] = 0.0
        # H = I - 2 v v^H applied from both sides
        left = np.einsum("bi,bij->bj", v.conj(), a[:, j + 1:, :])
        a[:, j + 1:, :] -= 2.0 * v[:, :, None] * left[:, None, :]
        right = np.einsum("bij,bj->bi", a[:, :, j + 1:], v)
        a[:, :, j + 1:] -= 2.0 * right[:, :, None] * v.conj()[:, None, :]
        a[:, j + 2:, j] = 0.0
    return a


def _wilkinson_shift(h, hi):
    a = h[:, hi - 2, hi - 2]
    b = h[:, hi - 2, hi - 1]
    c = h[:, hi - 1, hi - 2]
    d = h[:, hi - 1, hi - 1]
    p = 0.5 * (a - d)
    bc = b * c
    disc = np.sqrt(p * p + bc)
    flip = (p.conj() * disc).real < 0
    disc = np.where(flip, -disc, disc)
    denom = p + disc
    safe = np.abs(denom) > 0
    return np.where(safe, d - bc / np.where(safe, denom, 1.0), d)


def _qr_sweep(h, hi, mu):
    """One shifted QR step ``H - mu = QR, H <- RQ + mu`` on the leading hi x hi block."""
    idx = np.arange(hi)
    h[:, idx, idx] -= mu[:, None]
    cs = []
    for i in range(hi - 1):
        x = h[:, i, i]
        y = h[:, i + 1, i]
        r = np.sqrt(np.abs(x) ** 2 + np.abs(y) ** 2)
        ok = r > 0
        rr = np.where(ok, r, 1.0)
        c = np.where(ok, x / rr, 1.0)
        s = np.where(ok, y / rr, 0.0)
        row_i = h[:, i, i:hi].copy()
        row_j = h[:, i + 1, i:hi]
        h[:, i, i:hi] = c.conj()[:, None] * row_i + s.conj()[:, None] * row_j
        h[:, i + 1, i:hi] = -s[:, None] * row_i + c[:, None] * row_j
        cs.append((c, s))
    for i, (c, s) in enumerate(cs):
        top = min(i + 2, hi)
        col_i = h[:, :top, i].copy()
        col_j = h[:, :top, i + 1]
        h[:, :top, i] = col_i * c[:, None] + col_j * s[:, None]
        h[:, :top, i + 1] = -col_i * s.conj()[:, None] + col_j * c.conj()[:, None]
    h[:, idx, idx] += mu[:, None]


def _negligible(h, i):
    """Mask of matrices whose subdiagonal entry (i, i-1) can be set to zero."""
    sub = np.abs(h[:, i, i - 1])
    diag = np.abs(h[:, i, i]) + np.abs(h[:, i - 1, i - 1])
    full = np.abs(h).max(axis=(1, 2))
    scale = np.where(diag > 0, diag, full)
    # second test: entries far below the matrix norm are noise even when the
    # local diagonal is tiny too (the shift computation would underflow there)
    return (sub <= _EPS * scale) | (sub <= _EPS ** 2 * full)


def eigvals_stack(stack):
    """Eigenvalues of every matrix in a ``(m, n, n)`` stack; returns ``(m, n)``.

    Raises NoConvergenceError after ``100 * n`` QR sweeps.
    """
    h = np.array(stack, dtype=complex, copy=True)
    if h.ndim == 2:
        h = h[None]
    m, n, _ = h.shape
    if n == 1:
        return h[:, :, 0].copy()
    # power-of-two scaling keeps tiny or huge matrices away from under/overflow
    big = np.abs(h).max(axis=(1, 2))
    expo = np.where(big > 0, np.frexp(np.where(big > 0, big, 1.0))[1], 0)
    expo = np.clip(expo, -1000, 1000)
    factor = np.ldexp(1.0, -expo)[:, None, None]
    h.real *= factor
    h.imag *= factor
    scale = np.ldexp(1.0, expo)
    _hessenberg_stack(h)
    cap = 100 * n
    sweeps = 0
    hi = n
    stalled = 0
    while hi > 1:
        for i in range(1, hi):
            tiny = _negligible(h, i)
            h[tiny, i, i - 1] = 0.0
        if np.all(h[:, hi - 1, hi - 2] == 0):
            hi -= 1
            stalled = 0
            continue
        if sweeps >= cap:
            raise NoConvergenceError(
                f"QR iteration did not converge within {cap} sweeps (order {n})"
            )
        stalled += 1
        if stalled % 11 == 10:
            mu = h[:, hi - 1, hi - 1] + 1.5 * np.abs(h[:, hi - 1, hi - 2])
        else:
            mu = _wilkinson_shift(h, hi)
        _qr_sweep(h, hi, mu)
        sweeps += 1
    return np.diagonal(h, axis1=1, axis2=2) * scale[:, None]


def backward_errors(m, values):
    """Smallest singular value of ``m - lam I`` for each ``lam`` in ``values``."""
    a = np.asarray(m, dtype=complex)
    eye = np.eye(a.shape[0])
    shifted = a[None, :, :] - np.asarray(values)[:, None, None] * eye[None]
    return np.linalg.svd(shifted, compute_uv=False)[:, -1]


def eigenvalues(m):
    """All eigenvalues of a square complex matrix, repeated by multiplicity.

    >>> sorted(round(float(x), 12) + 0.0 for x in eigenvalues([[-1, 1], [1, -1]]).values.real)
    [-2.0, 0.0]
    """
    a = check_square(m)
    values = eigvals_stack(a[None])[0]
    return EigenSet(values=values, residuals=backward_errors(a, values))


def expm_stack(stack, t=1.0):
    """``exp(t * A)`` for each ``A`` in a ``(m, n, n)`` stack.

    ``t`` is a scalar or an array broadcastable against the batch axis.
    Each matrix is scaled by its own power of two so that its 1-norm is at
    most 0.5, expanded to degree 18, and squared back.
    """
    a = np.asarray(stack, dtype=complex)
    if a.ndim == 2:
        a = a[None]
    tt = np.broadcast_to(np.asarray(t, dtype=float), a.shape[:1])
    a = a * tt[:, None, None]
    n = a.shape[-1]
    norms = np.abs(a).sum(axis=1).max(axis=1)
    with np.errstate(divide="ignore"):
        s = np.where(norms > _SCALED_NORM, np.ceil(np.log2(norms / _SCALED_NORM)), 0.0)
    s = s.astype(int)
    a = a / (2.0 ** s)[:, None, None]
    eye = np.broadcast_to(np.eye(n, dtype=complex), a.shape)
    result = eye.copy()
    term = eye.copy()
    for j in range(1, _TAYLOR_DEGREE + 1):
        term = term @ a / j
        result = result + term
    for r in range(int(s.max(initial=0))):
        sel = s > r
        result[sel] = result[sel] @ result[sel]
    return result


def expm(m, t=1.0):
    """Matrix exponential ``exp(t * m)``.

    >>> expm([[0, 1], [0, 0]]).real
    array([[1., 1.],
           [0., 1.]])
    """
    a = check_square(m)
    t = check_scalar(t, "t")
    return expm_stack(a[None], t)[0]


def char_poly(m):
    """Monic characteristic polynomial, highest degree first (Leverrier-Faddeev).

    Orders above 8 are refused: the recursion loses accuracy quickly.
    """
    a = check_square(m)
    n = a.shape[0]
    if n > 8:
        raise OrderTooLargeError(f"char_poly supports order <= 8, got {n}")
    coeffs = [1.0 + 0j]
    mk = np.zeros_like(a)
    eye = np.eye(n, dtype=complex)
    c = 1.0 + 0j
    for k in range(1, n + 1):
        mk = a @ mk + c * eye
        c = -np.trace(a @ mk) / k
        coeffs.append(c)
    out = np.array(coeffs)
    if not np.iscomplexobj(m) and np.all(np.isreal(np.asarray(m))):
        return out.real
    return out


def hermitian_part_bounds(m):
    """Extreme eigenvalues of ``(m + m^H) / 2``: a strip containing every Re(lambda)."""
    a = check_square(m)
    w = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    return float(w[0]), float(w[-1])
