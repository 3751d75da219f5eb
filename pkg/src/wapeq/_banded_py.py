"""Pure-Python banded Gaussian elimination with partial pivoting.

Reference twin of ``_banded.pyx``; used when the compiled extension is not
available.  Both run the same column-oriented elimination (the unblocked
LAPACK ``gbtf2``/``gbtrs`` pair), so their results agree to rounding.

Input layout: ``diags[kl + d, i] = A[i, i + d]`` for ``d = -kl..ku``.  Entries
that fall outside the matrix are ignored.
"""

import numpy as np


def solve_banded(diags, kl, ku, rhs, tiny=1e-14):
    """Solve ``A x = rhs``.

    Returns ``(x, info)``: ``info`` is -1 on success, otherwise the column at
    which the best available pivot fell below ``tiny`` times the scale
    (largest original entry) of its row, in which case ``x`` is None.
    """
    n = len(rhs)
    kv = kl + ku
    # ab[kv + i - j][j] = A[i, j]; rows 0..kl-1 absorb pivoting fill
    ab = [[0j] * n for _ in range(2 * kl + ku + 1)]
    scale = [0.0] * n
    dl = diags.tolist()
    for d in range(-kl, ku + 1):
        src = dl[kl + d]
        dst = ab[kv - d]
        for i in range(max(0, -d), min(n, n - d)):
            v = complex(src[i])
            dst[i + d] = v
            if abs(v) > scale[i]:
                scale[i] = abs(v)
    b = [complex(v) for v in rhs]
    ipiv = [0] * n

    ju = 0
    for j in range(n):
        km = min(kl, n - 1 - j)
        jp = 0
        best = abs(ab[kv][j])
        for i in range(1, km + 1):
            a = abs(ab[kv + i][j])
            if a > best:
                best, jp = a, i
        ipiv[j] = j + jp
        s = scale[j + jp]
        if s == 0.0 or best < tiny * s:
            return None, j
        ju = max(ju, min(j + ku + jp, n - 1))
        if jp:
            for c in range(j, ju + 1):
                r1 = ab[kv + j - c]
                r2 = ab[kv + j + jp - c]
                r1[c], r2[c] = r2[c], r1[c]
            scale[j], scale[j + jp] = scale[j + jp], scale[j]
        if km:
            pivot = ab[kv][j]
            for i in range(1, km + 1):
                ab[kv + i][j] /= pivot
            for c in range(j + 1, ju + 1):
                t = ab[kv + j - c][c]
                if t != 0:
                    for i in range(1, km + 1):
                        ab[kv + j + i - c][c] -= ab[kv + i][j] * t

    for j in range(n - 1):
        l = ipiv[j]
        if l != j:
            b[l], b[j] = b[j], b[l]
        bj = b[j]
        for i in range(1, min(kl, n - 1 - j) + 1):
            b[j + i] -= ab[kv + i][j] * bj
    for j in range(n - 1, -1, -1):
        b[j] /= ab[kv][j]
        bj = b[j]
        for i in range(max(0, j - kv), j):
            b[i] -= ab[kv + i - j][j] * bj
    return np.array(b, dtype=complex), -1
