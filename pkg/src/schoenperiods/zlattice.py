"""Exact integer linear algebra and period lattices.

* :class:`Subgroup` -- subgroups of ``Z^n`` in row Hermite normal form;
  kernels, images, sums and saturations.
* Vanishing-cycle subgroups at a singular point of the fiber product with
  local fiber types ``(I_n, I_m)``: ``ker (T-1)^(1+rank (T-1)^2)`` for the
  singular threefold ``X`` and ``im(T-1) + sat(im (T-1)^2)`` for its small
  resolution ``X^``, ``T`` the local monodromy acting on cycle coordinates.
* Assembly of the period module: cycles are tuples of local vanishing
  cycles summing to zero; their periods are sums of partial results.
* Recovery of a Z-basis of the additive group generated by complex numbers
  through integer relations found with an exact integral LLL reduction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath as mp

from .errors import (
    ConsistencyFailure,
    InvalidParameter,
    NotASublattice,
    NotLocalModel,
    OutsideSchoenHypotheses,
    PrecisionExhausted,
)

#: Relations with a larger coefficient are treated as numerical noise.
RELATION_COEFFICIENT_BOUND = 10**10

IntMatrix = list  # list of rows of Python ints


# ---------------------------------------------------------------------------
# elementary integer matrix routines
# ---------------------------------------------------------------------------


def _copy(A) -> list:
    return [list(map(int, r)) for r in A]


def identity(n: int) -> list:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B) -> list:
    if not A:
        return []
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(cols)] for i in range(len(A))]


def transpose(A) -> list:
    return [list(r) for r in zip(*A)] if A else []


def mat_sub_identity(A) -> list:
    return [[A[i][j] - (i == j) for j in range(len(A))] for i in range(len(A))]


def mat_power(A, k: int) -> list:
    R = identity(len(A))
    for _ in range(k):
        R = matmul(R, A)
    return R


def determinant(A) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = _copy(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank(A) -> int:
    """Rank over Q."""
    rows = [[Fraction(x) for x in r] for r in A]
    if not rows:
        return 0
    n = len(rows[0])
    rk = 0
    for c in range(n):
        piv = next((i for i in range(rk, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        for i in range(len(rows)):
            if i != rk and rows[i][c] != 0:
                f = rows[i][c] / rows[rk][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rk])]
        rk += 1
    return rk


def echelon_with_transform(A) -> tuple:
    """Integer row echelon form ``E = U A`` with ``U`` unimodular.

    Returns ``(E, U, r)`` where the first ``r`` rows of ``E`` are nonzero and
    the remaining rows are zero.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    E = _copy(A)
    U = identity(m)
    r = 0
    for c in range(n):
        if r >= m:
            break
        # Euclid on column c among rows r..m-1
        while True:
            nz = [i for i in range(r, m) if E[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(E[i][c]))
            E[r], E[p] = E[p], E[r]
            U[r], U[p] = U[p], U[r]
            done = True
            for i in range(r + 1, m):
                if E[i][c]:
                    q = E[i][c] // E[r][c]
                    E[i] = [a - q * b for a, b in zip(E[i], E[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                    if E[i][c]:
                        done = False
            if done:
                break
        if r < m and E[r][c] != 0:
            r += 1
    return E, U, r


def hnf_rows(rows: Iterable[Sequence[int]], n: int | None = None) -> tuple:
    """Row Hermite normal form of the subgroup generated by ``rows``.

    Pivots are positive, entries above a pivot reduced into ``[0, pivot)``,
    zero rows removed.  Equal subgroups give identical output.
    """
    A = [list(map(int, r)) for r in rows]
    if not A:
        return ()
    E, _, r = echelon_with_transform(A)
    E = E[:r]
    ncols = len(E[0]) if E else (n or 0)
    pivots = []
    for i, row in enumerate(E):
        c = next(j for j in range(ncols) if row[j] != 0)
        if row[c] < 0:
            E[i] = row = [-x for x in row]
        pivots.append(c)
    for i in range(len(E)):
        c = pivots[i]
        for k in range(i):
            q = E[k][c] // E[i][c]
            if q:
                E[k] = [a - q * b for a, b in zip(E[k], E[i])]
    return tuple(tuple(r) for r in E)


def inverse_unimodular(A) -> list:
    """Exact inverse of a unimodular integer matrix."""
    n = len(A)
    aug = [[Fraction(x) for x in A[i]] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            raise InvalidParameter("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    inv = [[aug[i][n + j] for j in range(n)] for i in range(n)]
    if any(x.denominator != 1 for r in inv for x in r):
        raise InvalidParameter("matrix is not unimodular")
    return [[int(x) for x in r] for r in inv]


def elementary_divisors(A) -> list:
    """Invariant factors of an integer matrix (determinantal divisors)."""
    m = len(A)
    n = len(A[0]) if m else 0
    out = []
    prev = 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = math.gcd(g, determinant([[A[i][j] for j in cols] for i in rows]))
                if g == 1 and prev == 1:
                    break
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    """Subgroup of ``Z^ambient`` with a canonical HNF row basis."""

    ambient: int
    basis: tuple

    @classmethod
    def span(cls, ambient: int, rows: Iterable[Sequence[int]]) -> "Subgroup":
        rows = [r for r in rows if any(r)]
        for r in rows:
            if len(r) != ambient:
                raise InvalidParameter("vector length differs from ambient rank")
        return cls(ambient, hnf_rows(rows, ambient))

    @classmethod
    def zero(cls, ambient: int) -> "Subgroup":
        return cls(ambient, ())

    @classmethod
    def full(cls, ambient: int) -> "Subgroup":
        return cls.span(ambient, identity(ambient))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __add__(self, other: "Subgroup") -> "Subgroup":
        return Subgroup.span(self.ambient, list(self.basis) + list(other.basis))

    def contains_vector(self, v: Sequence[int]) -> bool:
        if not any(v):
            return True
        return Subgroup.span(self.ambient, list(self.basis) + [list(v)]) == self

    def __le__(self, other: "Subgroup") -> bool:
        return all(other.contains_vector(v) for v in self.basis)

    def __lt__(self, other: "Subgroup") -> bool:
        return self <= other and self != other

    def index_in(self, other: "Subgroup") -> int:
        """``[other : self]`` for subgroups of equal rank with ``self <= other``."""
        if not self <= other or self.rank != other.rank:
            raise NotASublattice("not a finite-index subgroup")
        # both HNF with the same pivot columns: index is the product of pivot ratios
        idx = Fraction(1)
        for a, b in zip(self.basis, other.basis):
            c = next(j for j in range(self.ambient) if a[j] != 0)
            idx *= Fraction(a[c], b[c])
        return int(idx)

    def transformed(self, A) -> "Subgroup":
        """Image under ``v -> A v`` (column-vector convention)."""
        return Subgroup.span(self.ambient, [[sum(A[i][k] * v[k] for k in range(len(v))) for i in range(len(A))] for v in self.basis])

    def to_record(self) -> dict:
        return {"ambient": self.ambient, "basis": [list(r) for r in self.basis]}


def hnf_kernel(M) -> Subgroup:
    """Integer kernel ``{x : M x = 0}`` in HNF (a saturated subgroup)."""
    M = [list(map(int, r)) for r in M]
    n = len(M[0]) if M else 0
    if not M:
        return Subgroup.full(n)
    # U M^T = E; rows of U matching zero rows of E are kernel vectors
    E, U, r = echelon_with_transform(transpose(M))
    return Subgroup.span(n, U[r:])


def image(A) -> Subgroup:
    """Column space ``A Z^n`` as a subgroup of ``Z^rows``."""
    return Subgroup.span(len(A), transpose(A))


def saturate(H: Subgroup) -> Subgroup:
    """``{g : k g in H for some k != 0}`` (rational span intersected with Z^n).

    Computed as the kernel of the kernel: the orthogonal complement of the
    orthogonal complement of ``H``.
    """
    if H.rank == 0:
        return H
    perp = hnf_kernel([list(r) for r in H.basis])
    if perp.rank == 0:
        return Subgroup.full(H.ambient)
    return hnf_kernel([list(r) for r in perp.basis])


# ---------------------------------------------------------------------------
# local vanishing cycles
# ---------------------------------------------------------------------------


def local_model(n: int, m: int) -> list:
    """Local monodromy on cycles ``(uu, uv, vu, vv)`` at a point of type ``(I_n, I_m)``."""
    return [[1, m, n, n * m], [0, 1, 0, n], [0, 0, 1, m], [0, 0, 0, 1]]


def _model_invariants(theta) -> tuple:
    A = mat_sub_identity(theta)
    A2 = matmul(A, A)
    A3 = matmul(A2, A)
    return (tuple(elementary_divisors(A)), tuple(elementary_divisors(A2)), any(any(r) for r in A3))


def check_local_model(theta, n: int, m: int) -> None:
    """Raise :class:`NotLocalModel` unless ``theta`` has the invariants of the
    ``(n, m)`` model (unipotent of the same Jordan shape and the same
    elementary divisors of ``T - 1`` and ``(T - 1)^2``)."""
    if len(theta) != 4 or any(len(r) != 4 for r in theta):
        raise NotLocalModel("monodromy must be 4x4")
    if abs(determinant(theta)) != 1:
        raise NotLocalModel("monodromy is not invertible over Z")
    got = _model_invariants(theta)
    want = _model_invariants(local_model(n, m))
    if got != want:
        raise NotLocalModel(
            "monodromy is not conjugate to the local model", n=n, m=m, invariants=str(got), expected=str(want)
        )


def kronecker_factors(N) -> tuple | None:
    """Integer ``(B1, B2)`` (2x2) with ``N = B1 (x) B2``, or ``None``."""
    for (i, j) in itertools.product(range(2), range(2)):
        block = [[N[2 * i + a][2 * j + b] for b in range(2)] for a in range(2)]
        g = 0
        for r in block:
            for x in r:
                g = math.gcd(g, x)
        if g == 0:
            continue
        B2 = [[x // g for x in r] for r in block]
        # B1[k][l] from the (k,l) block relative to B2
        B1 = [[0, 0], [0, 0]]
        a0, b0 = next((a, b) for a in range(2) for b in range(2) if B2[a][b] != 0)
        for k in range(2):
            for l in range(2):
                v = N[2 * k + a0][2 * l + b0]
                if v % B2[a0][b0]:
                    return None
                B1[k][l] = v // B2[a0][b0]
        if all(N[2 * k + a][2 * l + b] == B1[k][l] * B2[a][b] for k in range(2) for l in range(2) for a in range(2) for b in range(2)):
            if B1[0][0] + B1[1][1] < 0:  # fix the sign ambiguity: unipotent factors
                B1 = [[-x for x in r] for r in B1]
                B2 = [[-x for x in r] for r in B2]
            return B1, B2
    return None


def fiber_type_of(B) -> int:
    """``n`` for a unipotent 2x2 integer matrix conjugate to ``[[1, n], [0, 1]]``."""
    if determinant(B) != 1 or B[0][0] + B[1][1] != 2:
        raise NotLocalModel("factor is not unipotent", factor=str(B))
    A = mat_sub_identity(B)
    return math.gcd(math.gcd(A[0][0], A[0][1]), math.gcd(A[1][0], A[1][1]))


def vanishing_cycles_X(theta, n: int, m: int) -> Subgroup:
    """``ker (T - 1)^(1 + rank (T - 1)^2)`` for the singular threefold."""
    check_local_model(theta, n, m)
    A = mat_sub_identity(theta)
    k = 1 + rank(matmul(A, A))
    return hnf_kernel(mat_power(A, k))


def vanishing_cycles_Xhat(theta, n: int, m: int) -> Subgroup:
    """``im(T - 1) + sat(im (T - 1)^2)`` for the small resolution."""
    if not (n * m != 0 or {n, m} == {0, 1}):
        raise OutsideSchoenHypotheses("small resolution needs nm != 0 or {n, m} = {0, 1}", n=n, m=m)
    check_local_model(theta, n, m)
    A = mat_sub_identity(theta)
    return image(A) + saturate(image(matmul(A, A)))


def vanishing_cycles(theta, n: int, m: int, target: str) -> Subgroup:
    if target == "x":
        return vanishing_cycles_X(theta, n, m)
    if target == "xhat":
        return vanishing_cycles_Xhat(theta, n, m)
    raise InvalidParameter("target must be 'x' or 'xhat'", target=target)


# ---------------------------------------------------------------------------
# period module assembly
# ---------------------------------------------------------------------------


def assemble_period_module(prs, vcs: Sequence[Subgroup], base: int = 0) -> list:
    """Spanning values of the period module.

    ``vcs[i]`` is the vanishing-cycle subgroup at ``prs.points[i]`` in the
    adapted basis (cycle coordinates).  Cycles are tuples ``(l_s)`` with
    ``l_s`` in ``vcs[s]`` and ``sum l_s = 0``; their period is
    ``sum_s l_s . q^{a s}`` with ``q^{a s}`` the sum of adapted partial
    results from the base point to ``s``.  ``base`` selects the base point
    (the result does not depend on it).
    """
    n = len(prs.points)
    if len(vcs) != n:
        raise InvalidParameter("one subgroup per singular point required")
    dim = len(prs.r[0])
    # q^{a s_i}, adapted to interval 0, starting at points[base]
    partial = [[mp.mpc(0)] * dim for _ in range(n)]
    acc = [mp.mpc(0)] * dim
    for step in range(1, n):
        i = (base + step) % n
        prev_interval = (i - 1) % n
        acc = [acc[a] + prs.r[prev_interval][a] for a in range(dim)]
        partial[i] = list(acc)
    gens = []  # (point index, vector)
    for i, sg in enumerate(vcs):
        for v in sg.basis:
            gens.append((i, v))
    if not gens:
        return []
    # map (coefficients) -> sum of vectors
    M = [[gens[k][1][a] for k in range(len(gens))] for a in range(dim)]
    K = hnf_kernel(M)
    values = []
    for c in K.basis:
        total = mp.mpc(0)
        for k, ck in enumerate(c):
            if ck:
                i, v = gens[k]
                total += ck * sum(v[a] * partial[i][a] for a in range(dim))
        values.append(total)
    return values


# ---------------------------------------------------------------------------
# integral LLL
# ---------------------------------------------------------------------------


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> list:
    """LLL-reduced basis of an integer lattice (exact integral algorithm).

    Rows must be linearly independent.  Uses integer Gram-Schmidt data
    (``d_i`` and ``lambda_ij``) so no rational arithmetic is needed.
    """
    b = [list(map(int, r)) for r in basis]
    k_max = len(b)
    if k_max <= 1:
        return b

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    n = k_max
    d = [0] * (n + 1)
    lam = [[0] * n for _ in range(n)]
    d[0] = 1
    # incremental Gram-Schmidt
    def gs_row(k):
        for j in range(k + 1):
            u = dot(b[k], b[j])
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            else:
                if u == 0:
                    raise InvalidParameter("LLL input rows are linearly dependent")
                d[k + 1] = u

    gs_row(0)
    kmax = 0
    k = 1
    dn, dd = delta.numerator, delta.denominator

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        B = (d[k - 1] * d[k + 1] + lm * lm) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lm * t) // d[k]
            lam[i][k - 1] = (B * t + lm * lam[i][k]) // d[k + 1]
        d[k] = B

    while k < n:
        if k > kmax:
            kmax = k
            gs_row(k)
        red(k, k - 1)
        # Lovasz: d_{k+1} d_{k-1} >= (delta d_k^2 - lam^2)  (integral form)
        if dd * d[k + 1] * d[k - 1] < dn * d[k] * d[k] - dd * lam[k][k - 1] ** 2:
            swap(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return b


# ---------------------------------------------------------------------------
# lattices of complex numbers
# ---------------------------------------------------------------------------


@dataclass
class PeriodLattice:
    """Z-basis of the additive group generated by complex numbers."""

    rank: int
    basis: list
    provenance: dict = field(default_factory=dict)
    digits: int = 0

    def to_record(self) -> dict:
        dps = max(self.digits, 15)
        return {
            "rank": self.rank,
            "basis": [[mp.nstr(mp.re(v), dps), mp.nstr(mp.im(v), dps)] for v in self.basis],
            "provenance": dict(self.provenance),
            "digits": self.digits,
        }

    @classmethod
    def from_record(cls, rec) -> "PeriodLattice":
        return cls(
            int(rec["rank"]),
            [mp.mpc(mp.mpf(re_), mp.mpf(im_)) for re_, im_ in rec["basis"]],
            dict(rec.get("provenance", {})),
            int(rec.get("digits", 0)),
        )


def integer_relations(values: Sequence, digits: int, bound: int = RELATION_COEFFICIENT_BOUND) -> Subgroup:
    """Saturated module of ``x in Z^k`` with ``sum x_i v_i = 0`` at ``digits``.

    The embedding ``e_i -> (e_i, C Re v_i, C Im v_i)`` with ``C = 10^digits``
    is LLL-reduced; reduced rows with coefficients below ``bound`` and a
    residual below ``10^(-digits/2)`` (relative) are relations.

    With ``k`` values and two real constraints, LLL also produces chance
    near-relations of size about ``10^(2 digits / k)``; the coefficient
    bound is therefore capped at ``10^(digits / k)`` so they are rejected.
    """
    k = len(values)
    bound = min(bound, 10 ** max(2, digits // max(k, 1)))
    if k == 0:
        return Subgroup.zero(0)
    scale = max(abs(v) for v in values)
    if scale == 0:
        return Subgroup.full(k)
    with mp.workdps(digits + 30):
        C = mp.mpf(10) ** digits / scale
        rows = []
        for i, v in enumerate(values):
            v = mp.mpc(v)
            row = [int(i == j) for j in range(k)]
            row += [int(mp.nint(C * mp.re(v))), int(mp.nint(C * mp.im(v)))]
            rows.append(row)
        red = lll_reduce(rows)
        tol = mp.mpf(10) ** (-(digits // 2)) * scale
        rel = []
        for row in red:
            x = row[:k]
            if max(abs(t) for t in x) > bound:
                continue
            s = sum(xi * mp.mpc(v) for xi, v in zip(x, values))
            if abs(s) <= tol:
                rel.append(x)
    return saturate(Subgroup.span(k, rel)) if rel else Subgroup.zero(k)


def common_relations(vectors: Sequence[Sequence], digits: int, bound: int = RELATION_COEFFICIENT_BOUND) -> Subgroup:
    """Saturated module of ``x in Z^k`` with ``sum_i x_i vectors[i] = 0`` (all coordinates).

    The vector analogue of :func:`integer_relations`: each generator carries
    ``m`` complex coordinates, so every relation must hold for ``2m`` real
    constraints at once and chance near-relations are much larger
    (about ``10^(2 m digits / k)``).
    """
    k = len(vectors)
    if k == 0:
        return Subgroup.zero(0)
    m = len(vectors[0])
    scale = max(abs(x) for v in vectors for x in v)
    if scale == 0:
        return Subgroup.full(k)
    bound = min(bound, 10 ** max(2, (m * digits) // max(k, 1)))
    with mp.workdps(digits + 30):
        C = mp.mpf(10) ** digits / scale
        rows = []
        for i, v in enumerate(vectors):
            row = [int(i == j) for j in range(k)]
            for x in v:
                x = mp.mpc(x)
                row += [int(mp.nint(C * mp.re(x))), int(mp.nint(C * mp.im(x)))]
            rows.append(row)
        red = lll_reduce(rows)
        tol = mp.mpf(10) ** (-(digits // 2)) * scale
        rel = []
        for row in red:
            x = row[:k]
            if not any(x) or max(abs(t) for t in x) > bound:
                continue
            if all(abs(sum(xi * mp.mpc(v[c]) for xi, v in zip(x, vectors))) <= tol for c in range(m)):
                rel.append(x)
    return saturate(Subgroup.span(k, rel)) if rel else Subgroup.zero(k)


def quotient_generators(vectors: Sequence[Sequence], digits: int) -> tuple:
    """Independent generators of the group spanned by ``vectors`` modulo common relations.

    Returns ``(new_vectors, rows)`` where ``new_vectors[j] = sum_i rows[j][i] vectors[i]``
    and the ``new_vectors`` form a Z-basis of the group generated by ``vectors``.
    """
    k = len(vectors)
    if k == 0:
        return [], []
    rel = common_relations(vectors, digits)
    R = [list(r) for r in rel.basis]
    if not R:
        return [list(v) for v in vectors], identity(k)
    E, U, r = echelon_with_transform(transpose(R))
    W = transpose(inverse_unimodular(U))
    rows = W[r:]
    m = len(vectors[0])
    new = [[sum(c * mp.mpc(v[col]) for c, v in zip(row, vectors)) for col in range(m)] for row in rows]
    return new, rows


def _group_basis(values: Sequence, relations: Subgroup) -> list:
    """Basis of ``Z^k / R`` mapped to values, ``R`` the (saturated) relations."""
    k = len(values)
    R = [list(r) for r in relations.basis]
    if not R:
        return [mp.mpc(v) for v in values], identity(k)
    # U R^T = E, last k - rank rows of E vanish; new generators w = (U^T)^{-1} v
    E, U, r = echelon_with_transform(transpose(R))
    W = transpose(inverse_unimodular(U))
    rows = W[r:]
    return [sum(c * mp.mpc(v) for c, v in zip(row, values)) for row in rows], rows


def _canonical_order(basis: list) -> list:
    def key(v):
        v = mp.mpc(v)
        return (float(abs(v)), float(mp.arg(v)) if v != 0 else 0.0)

    out = []
    for v in basis:
        v = mp.mpc(v)
        # representative with argument in (-pi/2, pi/2]
        if mp.re(v) < 0 or (mp.re(v) == 0 and mp.im(v) < 0):
            v = -v
        out.append(v)
    return sorted(out, key=key)


def reduce_basis(basis: list, digits: int) -> list:
    """Shorten a basis by LLL on its real embedding when it is discrete (rank <= 2),
    otherwise on a balanced coefficient/embedding lattice."""
    r = len(basis)
    if r == 0:
        return []
    scale = max(abs(v) for v in basis)
    with mp.workdps(digits + 30):
        if r <= 2:
            C = mp.mpf(10) ** min(digits, 40) / scale
            rows = [[int(mp.nint(C * mp.re(v))), int(mp.nint(C * mp.im(v)))] for v in basis]
            if r == 2 and rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0] == 0:
                return _canonical_order(basis)
            if r == 2:
                # Gauss reduction on the embedded rows keeps track of integer combinations
                aug = [row + [int(i == j) for j in range(r)] for i, row in enumerate(rows)]
                red = lll_reduce(aug, Fraction(99, 100))
                out = [sum(c * basis[j] for j, c in enumerate(row[2:])) for row in red]
                return _canonical_order(out)
            return _canonical_order(basis)
        # rank > 2: the image is not discrete; minimize coefficients and modulus jointly
        C = mp.mpf(10) ** 2 / scale
        rows = []
        for i, v in enumerate(basis):
            rows.append([int(i == j) for j in range(r)] + [int(mp.nint(C * mp.re(v))), int(mp.nint(C * mp.im(v)))])
        red = lll_reduce(rows, Fraction(99, 100))
        out = [sum(c * basis[j] for j, c in enumerate(row[:r])) for row in red]
        return _canonical_order(out)


def lattice_from_values(values: Sequence, digits: int, provenance: dict | None = None) -> PeriodLattice:
    """Rank and Z-basis of the group generated by ``values`` (accurate to ``digits``).

    Relations are detected at ``digits`` and at a reduced precision
    (``digits - max(10, digits // 5)``); the relation modules must agree,
    otherwise :class:`PrecisionExhausted`.
    """
    vals = [mp.mpc(v) for v in values]
    nz = [v for v in vals if abs(v) > mp.mpf(10) ** (-(digits // 2)) * max([abs(x) for x in vals] + [mp.mpf(1)])]
    if not nz:
        return PeriodLattice(0, [], dict(provenance or {}), digits)
    rel_full = integer_relations(nz, digits)
    rel_half = integer_relations(nz, max(digits - max(10, digits // 5), 10))
    if rel_full != rel_half:
        raise PrecisionExhausted(
            "integer relations differ between precisions",
            rank_full=len(nz) - rel_full.rank,
            rank_reduced=len(nz) - rel_half.rank,
        )
    basis, _ = _group_basis(nz, rel_full)
    basis = reduce_basis(basis, digits)
    return PeriodLattice(len(basis), basis, dict(provenance or {}), digits)


def express_in_basis(v, basis: Sequence, digits: int) -> list:
    """Integer coordinates of ``v`` in ``basis``; :class:`NotASublattice` if none."""
    vals = [mp.mpc(b) for b in basis] + [mp.mpc(v)]
    rel = integer_relations(vals, digits)
    k = len(basis)
    for row in rel.basis:
        if abs(row[k]) == 1:
            s = -row[k]
            coords = [s * x for x in row[:k]]
            if rel.rank != 1:
                raise NotASublattice("basis is not independent at this precision")
            return coords
    raise NotASublattice("value is not an integer combination of the basis", value=mp.nstr(mp.mpc(v), 15))


def lattice_index(sub: PeriodLattice, sup: PeriodLattice, digits: int | None = None) -> int:
    """``[sup : sub]`` for lattices of equal rank with ``sub`` contained in ``sup``."""
    if sub.rank != sup.rank:
        raise NotASublattice("lattices have different ranks", sub=sub.rank, sup=sup.rank)
    if sub.rank == 0:
        return 1
    dg = digits or min(sub.digits or 30, sup.digits or 30)
    X = [express_in_basis(v, sup.basis, dg) for v in sub.basis]
    return abs(determinant(X))


def same_module(a: Sequence, b: Sequence, digits: int, up_to_sign: bool = True) -> bool:
    """Whether two bases generate the same Z-module (compared at ``digits``)."""
    if len(a) != len(b):
        return False
    try:
        X = [express_in_basis(v, b, digits) for v in a]
    except NotASublattice:
        return False
    return abs(determinant(X)) == 1


def self_product_index_bound(fiber_orders: Sequence[int], rank_: int) -> int:
    """``(2d)^r`` with ``d = lcm`` of the fiber orders of a self-product.

    For ``E1 = E2`` the symmetrisation ``l -> n (l + l_bar)`` maps the
    vanishing cycles of the singular model into those of the resolution,
    so ``2d * I(X)`` lies in ``I(X^)`` and the index divides ``(2d)^r``.
    """
    d = 1
    for n in fiber_orders:
        if n:
            d = math.lcm(d, int(n))
    return (2 * d) ** rank_
