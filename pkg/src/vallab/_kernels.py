"""Hot numeric kernels with a numba path and a pure-numpy path.

The numba path is used when numba imports cleanly and the environment
variable ``VALLAB_DISABLE_JIT`` is unset (or ``0``).  Both implementations
are always importable under explicit names (``*_numpy`` / ``*_numba``) so
tests and the benchmark can compare them directly.
"""
import os

import numpy as np

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

JIT_ENABLED = HAS_NUMBA and os.environ.get("VALLAB_DISABLE_JIT", "0") in ("", "0")


def _njit(func):
    if HAS_NUMBA:
        return numba.njit(cache=True)(func)
    return func


# --------------------------------------------------------------------------
# permanent (Ryser)
# --------------------------------------------------------------------------

def permanent_numpy(a):
    """Ryser's formula evaluated over all column subsets at once."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if n == 0:
        return 1.0
    idx = np.arange(1, 2 ** n)
    masks = ((idx[:, None] >> np.arange(n)) & 1).astype(float)
    row_sums = masks @ a.T
    sizes = masks.sum(axis=1)
    signs = np.where((n - sizes) % 2 == 0, 1.0, -1.0)
    return float(np.sum(signs * np.prod(row_sums, axis=1)))


@_njit
def _permanent_gray(a):
    # Ryser with Gray-code subset enumeration: O(2^n n)
    n = a.shape[0]
    if n == 0:
        return 1.0
    row_sums = np.zeros(n)
    total = 0.0
    prev = 0
    for i in range(1, 2 ** n):
        gray = i ^ (i >> 1)
        diff = gray ^ prev
        j = 0
        while (diff >> j) & 1 == 0:
            j += 1
        if gray & diff:
            for r in range(n):
                row_sums[r] += a[r, j]
        else:
            for r in range(n):
                row_sums[r] -= a[r, j]
        prev = gray
        prod = 1.0
        for r in range(n):
            prod *= row_sums[r]
        bits = 0
        g = gray
        while g:
            bits += g & 1
            g >>= 1
        if (n - bits) % 2 == 0:
            total += prod
        else:
            total -= prod
    return total


def permanent_numba(a):
    return float(_permanent_gray(np.ascontiguousarray(a, dtype=np.float64)))


# --------------------------------------------------------------------------
# batched |det| of small real matrices
# --------------------------------------------------------------------------

def abs_det_numpy(m):
    return np.abs(np.linalg.det(m))


@_njit
def _abs_det_loop(m):
    count, k = m.shape[0], m.shape[1]
    out = np.empty(count)
    work = np.empty((k, k))
    for s in range(count):
        for i in range(k):
            for j in range(k):
                work[i, j] = m[s, i, j]
        det = 1.0
        for c in range(k):
            piv = c
            best = abs(work[c, c])
            for r in range(c + 1, k):
                if abs(work[r, c]) > best:
                    best = abs(work[r, c])
                    piv = r
            if best == 0.0:
                det = 0.0
                break
            if piv != c:
                for j in range(k):
                    tmp = work[c, j]
                    work[c, j] = work[piv, j]
                    work[piv, j] = tmp
            det *= work[c, c]
            for r in range(c + 1, k):
                f = work[r, c] / work[c, c]
                for j in range(c, k):
                    work[r, j] -= f * work[c, j]
        out[s] = abs(det)
    return out


def abs_det_numba(m):
    m = np.ascontiguousarray(m, dtype=np.float64)
    flat = m.reshape((-1,) + m.shape[-2:])
    return _abs_det_loop(flat).reshape(m.shape[:-2])


# --------------------------------------------------------------------------
# highest-weight vectors on stacked frames
# --------------------------------------------------------------------------

def hw_values_numpy(frames, exponents, conj_last):
    """Evaluate prod_l det(A[l] A[l]^t)^exponents[l-1] on stacked frames.

    ``frames`` has shape (N, n, k); A[l] is built from the first 2l rows.
    """
    k = frames.shape[-1]
    z = frames[:, 0:2 * k:2, :] + 1j * frames[:, 1:2 * k:2, :]
    gram = np.einsum("sij,slj->sil", z, z)
    out = np.ones(frames.shape[0], dtype=complex)
    for l in range(1, k + 1):
        e = int(exponents[l - 1])
        if e == 0:
            continue
        minor = np.linalg.det(gram[:, :l, :l])
        if l == k and conj_last:
            minor = np.conj(minor)
        out *= minor ** e
    return out


@_njit
def _hw_loop(frames, exponents, conj_last):
    count, k = frames.shape[0], frames.shape[2]
    out = np.empty(count, dtype=np.complex128)
    z = np.empty((k, k), dtype=np.complex128)
    gram = np.empty((k, k), dtype=np.complex128)
    work = np.empty((k, k), dtype=np.complex128)
    for s in range(count):
        for r in range(k):
            for c in range(k):
                z[r, c] = frames[s, 2 * r, c] + 1j * frames[s, 2 * r + 1, c]
        for i in range(k):
            for j in range(k):
                acc = 0.0 + 0.0j
                for c in range(k):
                    acc += z[i, c] * z[j, c]
                gram[i, j] = acc
        value = 1.0 + 0.0j
        for l in range(1, k + 1):
            e = exponents[l - 1]
            if e == 0:
                continue
            for i in range(l):
                for j in range(l):
                    work[i, j] = gram[i, j]
            det = 1.0 + 0.0j
            for c in range(l):
                piv = c
                best = abs(work[c, c])
                for r in range(c + 1, l):
                    if abs(work[r, c]) > best:
                        best = abs(work[r, c])
                        piv = r
                if best == 0.0:
                    det = 0.0 + 0.0j
                    break
                if piv != c:
                    det = -det
                    for j in range(l):
                        tmp = work[c, j]
                        work[c, j] = work[piv, j]
                        work[piv, j] = tmp
                det *= work[c, c]
                for r in range(c + 1, l):
                    f = work[r, c] / work[c, c]
                    for j in range(c, l):
                        work[r, j] -= f * work[c, j]
            if l == k and conj_last:
                det = det.conjugate()
            p = 1.0 + 0.0j
            for _ in range(e):
                p *= det
            value *= p
        out[s] = value
    return out


def hw_values_numba(frames, exponents, conj_last):
    frames = np.ascontiguousarray(frames, dtype=np.float64)
    exps = np.ascontiguousarray(exponents, dtype=np.int64)
    return _hw_loop(frames, exps, bool(conj_last))


if JIT_ENABLED:
    permanent = permanent_numba
    abs_det = abs_det_numba
    hw_values = hw_values_numba
else:
    permanent = permanent_numpy
    abs_det = abs_det_numpy
    hw_values = hw_values_numpy
