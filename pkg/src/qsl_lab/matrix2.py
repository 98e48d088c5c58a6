"""Closed-form linear algebra for complex 2x2 matrices.

Matrices are numpy arrays of shape ``(..., 2, 2)``; every function broadcasts
over the leading axes so a whole time grid of states is handled in one call.
Nothing here calls ``numpy.linalg``: singular values, eigensystems and the
exponential all use the explicit 2x2 formulas.

Arithmetic is plain numpy (``+``, ``-``, ``@``, scalar ``*``). No function
mutates its input.
"""

from __future__ import annotations

import numpy as np

from .errors import NotHermitian

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

# below this |q| the exponential uses the sinh(q)/q series
SINHC_SERIES_CUTOFF = 1e-4
HERMITIAN_ATOL = 1e-10

for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z, IDENTITY):
    _m.setflags(write=False)


def mat(a11, a12, a21, a22) -> np.ndarray:
    """Build a 2x2 complex matrix (or a stack of them) from its entries."""
    a11, a12, a21, a22 = np.broadcast_arrays(
        *(np.asarray(x, dtype=complex) for x in (a11, a12, a21, a22))
    )
    out = np.empty(a11.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = a11
    out[..., 0, 1] = a12
    out[..., 1, 0] = a21
    out[..., 1, 1] = a22
    return out


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape[-2:] != (2, 2):
        raise ValueError(f"expected trailing shape (2, 2), got {m.shape}")
    return m


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def trace(m: np.ndarray):
    return m[..., 0, 0] + m[..., 1, 1]


def det(m: np.ndarray):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def frobenius_sq(m: np.ndarray):
    return np.sum(np.abs(m) ** 2, axis=(-2, -1))


def max_entry(m: np.ndarray):
    """Largest entry modulus, the distance used for all matrix tolerances."""
    return np.max(np.abs(m), axis=(-2, -1))


def singular_values(m: np.ndarray) -> np.ndarray:
    """Singular values in descending order, last axis of length 2.

    sigma^2 = (F +- sqrt(F^2 - 4|det|^2)) / 2 with F the squared Frobenius
    norm. The radicand is evaluated as the discriminant of M^dag M,
    (|a|^2 + |c|^2 - |b|^2 - |d|^2)^2 + 4|conj(a) b + conj(c) d|^2, a sum of
    squares that stays accurate when sigma1 ~ sigma2. The smaller value is
    taken as |det| / sigma1, which avoids cancellation when sigma2 << sigma1.
    """
    m = as_matrix(m)
    a, b = m[..., 0, 0], m[..., 0, 1]
    c, d = m[..., 1, 0], m[..., 1, 1]
    col1 = np.abs(a) ** 2 + np.abs(c) ** 2
    col2 = np.abs(b) ** 2 + np.abs(d) ** 2
    f = col1 + col2
    cross = np.conj(a) * b + np.conj(c) * d
    disc = (col1 - col2) ** 2 + 4.0 * np.abs(cross) ** 2
    s1 = np.sqrt(0.5 * (f + np.sqrt(disc)))
    det_abs = np.abs(det(m))
    with np.errstate(divide="ignore", invalid="ignore"):
        s2 = np.where(s1 > 0.0, det_abs / np.where(s1 > 0.0, s1, 1.0), 0.0)
    s2 = np.minimum(s2, s1)
    return np.stack([s1, s2], axis=-1)


def schatten_norm(m: np.ndarray, p) -> np.ndarray | float:
    """Schatten p-norm for p in {1, 2, inf}."""
    s = singular_values(m)
    if p == 1:
        return s[..., 0] + s[..., 1]
    if p == 2:
        return np.sqrt(s[..., 0] ** 2 + s[..., 1] ** 2)
    if p in (np.inf, "inf"):
        return s[..., 0]
    raise ValueError(f"unsupported Schatten index {p!r}; use 1, 2 or inf")


def is_hermitian(m: np.ndarray, atol: float = HERMITIAN_ATOL):
    return max_entry(m - adjoint(m)) <= atol


def hermitian_eigensystem(h: np.ndarray, atol: float = HERMITIAN_ATOL):
    """Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix.

    Returns ``(values, vectors)`` with ``values[..., k]`` belonging to the
    column ``vectors[..., :, k]``.

    Raises:
        NotHermitian: if any matrix differs from its adjoint by more than
            ``atol`` in some entry.
    """
    h = as_matrix(h)
    if not np.all(is_hermitian(h, atol)):
        raise NotHermitian("matrix is not Hermitian within %.1e" % atol)
    a = h[..., 0, 0].real
    d = h[..., 1, 1].real
    b = 0.5 * (h[..., 0, 1] + np.conj(h[..., 1, 0]))
    half = 0.5 * (a - d)
    r = np.hypot(half, np.abs(b))
    mean = 0.5 * (a + d)
    values = np.stack([mean + r, mean - r], axis=-1)

    # (lam1 - d, conj b) and (b, lam1 - a) both solve (H - lam1) v = 0; pick
    # whichever has the larger leading component to avoid cancellation.
    top = half >= 0.0
    x = np.where(top, half + r, b)
    y = np.where(top, np.conj(b), r - half)
    norm = np.sqrt(np.abs(x) ** 2 + np.abs(y) ** 2)
    degenerate = norm == 0.0
    safe = np.where(degenerate, 1.0, norm)
    x = np.where(degenerate, 1.0, x / safe)
    y = np.where(degenerate, 0.0, y / safe)
    vectors = mat(x, -np.conj(y), y, np.conj(x))
    return values, vectors


def _sinhc(q):
    """sinh(q)/q for complex q, with the series branch near zero."""
    q = np.asarray(q, dtype=complex)
    small = np.abs(q) < SINHC_SERIES_CUTOFF
    safe = np.where(small, 1.0, q)
    q2 = q * q
    return np.where(small, 1.0 + q2 / 6.0 + q2 * q2 / 120.0, np.sinh(safe) / safe)


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential by the 2x2 closed form.

    exp(M) = e^s (cosh(q) I + sinh(q)/q (M - s I)) with s = tr(M)/2 and
    q = sqrt(s^2 - det M). The defective case q = 0 goes through the series
    branch of sinh(q)/q.
    """
    m = as_matrix(m)
    s = 0.5 * trace(m)
    q = np.sqrt(s * s - det(m))
    c = np.cosh(q)
    k = _sinhc(q)
    es = np.exp(s)
    shifted = m - s[..., None, None] * IDENTITY
    return es[..., None, None] * (c[..., None, None] * IDENTITY + k[..., None, None] * shifted)
