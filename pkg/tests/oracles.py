"""Independent integer-lattice oracles built on sympy's Smith normal form.

These helpers deliberately avoid the engine's own HNF/kernel code so they
can check it: every subgroup question is answered through a Smith
decomposition ``S = U A V`` with unimodular ``U``, ``V``.
"""

from __future__ import annotations

from math import gcd

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp


def _snf(rows):
    A = Matrix(rows)
    S, U, V = smith_normal_decomp(A, domain=ZZ)
    diag = [int(S[i, i]) for i in range(min(S.shape)) if S[i, i] != 0]
    return diag, U, V


def contains(rows, v) -> bool:
    """Whether ``v`` lies in the row span of ``rows`` over Z."""
    if not any(v):
        return True
    rows = [r for r in rows if any(r)]
    if not rows:
        return False
    diag, U, V = _snf(rows)
    w = Matrix([list(v)]) * V  # x U^-1 S = v V
    for i, x in enumerate(w):
        if i < len(diag):
            if x % diag[i]:
                return False
        elif x != 0:
            return False
    return True


def same_span(a, b) -> bool:
    return all(contains(b, v) for v in a) and all(contains(a, v) for v in b)


def saturation(rows, n: int) -> list:
    """Row basis of ``Q rows intersected with Z^n``."""
    rows = [r for r in rows if any(r)]
    if not rows:
        return []
    diag, U, V = _snf(rows)
    Vi = V.inv()
    return [[int(x) for x in Vi.row(i)] for i in range(len(diag))]


def kernel(M, n: int) -> list:
    """Row basis of ``{x in Z^n : M x = 0}``."""
    if not M:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    diag, U, V = _snf(M)
    return [[int(V[i, j]) for i in range(n)] for j in range(len(diag), n)]


def monodromy(n: int, m: int) -> list:
    """``T_n (x) T_m`` on cycles ``(uu, uv, vu, vv)`` with ``T_k = [[1, k], [0, 1]]``."""
    T = lambda k: [[1, k], [0, 1]]
    A, B = T(n), T(m)
    return [[A[i // 2][j // 2] * B[i % 2][j % 2] for j in range(4)] for i in range(4)]


def _minus_identity(T):
    return [[T[i][j] - (i == j) for j in range(4)] for i in range(4)]


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(4)) for j in range(4)] for i in range(4)]


def columns(A) -> list:
    return [[A[i][j] for i in range(len(A))] for j in range(len(A[0]))]


def vc_x(n: int, m: int) -> list:
    """Vanishing cycles of the singular fiber product, case by case.

    ``nm != 0``: ``ker (T-1)^2``; otherwise ``ker (T-1)``.
    """
    A = _minus_identity(monodromy(n, m))
    M = _matmul(A, A) if n * m else A
    return kernel(M, 4)


def vc_xhat(n: int, m: int) -> list:
    """Vanishing cycles of the small resolution: ``Z uu + Z (n uv + m vu)`` for
    ``nm != 0``, and the same as for the singular model when ``{n, m} = {0, 1}``."""
    if n * m:
        return [[1, 0, 0, 0], [0, n, m, 0]]
    return vc_x(n, m)


def image_minus_identity(n: int, m: int) -> list:
    return columns(_minus_identity(monodromy(n, m)))


def supported(n: int, m: int) -> bool:
    return n * m != 0 or {n, m} == {0, 1}


def strict_chain_expected(n: int, m: int) -> bool:
    return n * m != 0 and gcd(n, m) != 1
