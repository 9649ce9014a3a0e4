"""Lattice intersection by pi-digit peeling, and basis extraction.

The solution module ``{x : A x integral}`` is searched inside
``pi^-N * (o_L[z]_{<D})^s`` modulo ``pi^N``.  Writing ``x = pi^-N y`` with
``y`` a vector of residue-field digits ``y[k, j, i]`` (pi^k z^j e_i), every
coefficient of ``A y`` below pi^N is an l-linear form in the digits, so the
whole problem is one l-linear kernel computation.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import NotFree, PrecisionExhausted, RankDeficient, TruncationUnsound
from .linalg import Mat, adjugate, det, is_tate_unit
from .series import INF, BiSeries, RingTag, poly_divmod, tate_divmod


def ell_kernel(M: np.ndarray, field) -> np.ndarray:
    """Basis (rows) of the right kernel of a matrix of field codes."""
    M = np.array(M, dtype=np.int64) % field.order
    rows, cols = M.shape
    add, mul, neg, inv = field.add_table, field.mul_table, field.neg_table, field.inv_table
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        M[[r, p]] = M[[p, r]]
        M[r] = mul[inv[M[r, c]], M[r]]
        f = M[:, c].copy()
        f[r] = 0
        others = np.flatnonzero(f)
        if others.size:
            M[others] = add[M[others], neg[mul[f[others, None], M[r][None, :]]]]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for t, fc in enumerate(free):
        basis[t, fc] = 1
        for i, pc in enumerate(pivots):
            basis[t, pc] = neg[M[i, fc]]
    return basis


def _digit_index(k, j, i, D, s):
    return (k * D + j) * s + i


def digit_constraints(A: Mat, N: int, D: int) -> np.ndarray:
    """Matrix of the l-linear map digits(y) -> coefficients of (A y) below pi^N."""
    field = A.cfg.field
    s_out, s = A.shape
    degA = max(x.nz for r in A.entries for x in r)
    T = D + max(degA - 1, 0)
    nrows = s_out * 2 * N * T
    M = np.zeros((max(nrows, 1), 2 * N * D * s), dtype=np.int64)
    for r in range(s_out):
        for i in range(s):
            for m_exp, t_exp, code in A[r, i].terms():
                for k in range(2 * N):
                    mu = m_exp + k
                    if mu >= N:
                        continue
                    if mu < -N:
                        raise PrecisionExhausted("pi^N * A is not integral")
                    for j in range(D):
                        row = (r * 2 * N + (mu + N)) * T + t_exp + j
                        M[row, _digit_index(k, j, i, D, s)] = code
    return M


def digits_to_vector(cfg, digits, N, D, s, prec, tag=RingTag.TATE_GEN):
    """Turn a digit vector into the column pi^-N * y."""
    out = []
    for i in range(s):
        terms = {}
        for k in range(2 * N):
            for j in range(D):
                c = int(digits[_digit_index(k, j, i, D, s)])
                if c:
                    terms[(k - N, j)] = c
        out.append(BiSeries.from_terms(cfg, terms, prec, None, tag))
    return out


def _check_kernel_inputs(A: Mat, N: int, acknowledge_truncation: bool):
    if N < 0:
        raise ValueError("N must be nonnegative")
    if not A.z_exact and not acknowledge_truncation:
        raise TruncationUnsound("A is not certified z-exact")
    if 2 * N >= A.prec:
        raise PrecisionExhausted(f"2N = {2 * N} exceeds pi-precision {A.prec}")
    if A.min_valuation < -N:
        raise PrecisionExhausted("pi^N * A is not integral")


def pi_digit_kernel(A: Mat, N: int, D: int, acknowledge_truncation: bool = False) -> list:
    """Generators of ``{x in pi^-N (o_L<z>)^s : A x integral}`` with z-degree < D.

    Returns columns (lists of BiSeries) spanning the module over o_L<z> up
    to z-degree D: the lifted kernel digits plus ``pi^N e_i``.
    """
    _check_kernel_inputs(A, N, acknowledge_truncation)
    A = A.as_exact()
    cfg = A.cfg
    s = A.cols
    prec = A.prec
    gens = []
    if N > 0:
        K = ell_kernel(digit_constraints(A, N, D), cfg.field)
        gens = [digits_to_vector(cfg, v, N, D, s, prec) for v in K]
    one = BiSeries.monomial(cfg, N, 0, 1, prec, RingTag.TATE_GEN)
    zero = BiSeries.zero(cfg, prec, None, RingTag.TATE_GEN)
    gens += [[one if r == i else zero for r in range(s)] for i in range(s)]
    return gens


def kernel_digit_space(A: Mat, N: int, D: int) -> set:
    """All digit vectors (as tuples) in the l-span of the computed kernel."""
    field = A.cfg.field
    K = ell_kernel(digit_constraints(A.as_exact(), N, D), field)
    span = set()
    width = 2 * N * D * A.cols
    for coeffs in itertools.product(range(field.order), repeat=len(K)):
        v = np.zeros(width, dtype=np.int64)
        for c, row in zip(coeffs, K):
            if c:
                v = field.add_table[v, field.mul_table[c, row]]
        span.add(tuple(int(x) for x in v))
    return span


def brute_force_digit_space(A: Mat, N: int, D: int) -> set:
    """Exhaustive oracle: digit vectors y with pi^-N * A * y integral,
    checked by direct series multiplication."""
    cfg = A.cfg
    A = A.as_exact()
    s = A.cols
    width = 2 * N * D * s
    prec = max(A.prec, 2 * N + 1)
    found = set()
    for digits in itertools.product(range(cfg.field.order), repeat=width):
        x = digits_to_vector(cfg, digits, N, D, s, prec)
        ok = True
        for r in range(A.rows):
            acc = A[r, 0] * x[0]
            for i in range(1, s):
                acc = acc + A[r, i] * x[i]
            if acc.lo < 0:
                ok = False
                break
        if ok:
            found.add(tuple(digits))
    return found


# ---------------------------------------------------------------------------
# basis extraction over o_L<z>


def _lift(x: BiSeries, prec: int, tag) -> BiSeries:
    """Reinterpret a residue polynomial as an exact-digit element."""
    return BiSeries(x.cfg, x.data, x.lo, prec, None, tag)


def _level(x: BiSeries, k: int) -> BiSeries:
    return x.pi_shift(-k).with_prec(1).as_exact()


def column_reduce_to_basis(generators, expected_rank: int):
    """Extract an o_L<z>-basis from generators with z-exact integral entries.

    ``generators`` is a list of columns (or a Mat).  Returns ``(B, X)`` with
    ``B = G * X`` square and X integral.  Each pivot is pi^k times a Tate
    unit; Euclid on the residue polynomials at level k produces it.  The
    result is verified by double inclusion: ``B = G X`` by construction and
    ``adj(B) G`` is divisible by ``det(B)`` in o_L<z>.
    """
    if isinstance(generators, Mat):
        cols = generators.columns()
    else:
        cols = [list(c) for c in generators]
    if not cols:
        raise RankDeficient("no generators")
    cfg = cols[0][0].cfg
    tag = RingTag.TATE_INT
    s = len(cols[0])
    g = len(cols)
    for c in cols:
        for x in c:
            if x.zprec is not None:
                raise TruncationUnsound("generators must be z-exact")
            if x.lo < 0:
                raise ValueError("generators must be integral")
    prec = min(x.prec for c in cols for x in c)
    cols = [[x.retag(tag) for x in c] for c in cols]
    one = BiSeries.one(cfg, prec, tag)
    zero = BiSeries.zero(cfg, prec, None, tag)
    X = [[one if r == j else zero for r in range(g)] for j in range(g)]

    def combine(dst, src, f):
        cols[dst] = [a - f * b for a, b in zip(cols[dst], cols[src])]
        X[dst] = [a - f * b for a, b in zip(X[dst], X[src])]

    active = list(range(g))
    pivots = {}
    pending = list(range(s))
    while pending:
        progress = False
        for row in list(pending):
            live = [j for j in active if not cols[j][row].is_zero()]
            if not live:
                continue
            k = min(cols[j][row].lo for j in live)
            while True:
                at_k = [j for j in active if not cols[j][row].is_zero() and cols[j][row].lo == k]
                if len(at_k) <= 1:
                    break
                reds = {j: _level(cols[j][row], k) for j in at_k}
                best = min(at_k, key=lambda j: (reds[j].degree, j))
                for j in at_k:
                    if j != best:
                        q, _ = poly_divmod(reds[j], reds[best])
                        combine(j, best, _lift(q, prec, tag))
            piv = at_k[0]
            if _level(cols[piv][row], k).degree != 0:
                continue
            inv = cols[piv][row].pi_shift(-k).invert()
            for j in active:
                if j != piv and not cols[j][row].is_zero():
                    f = cols[j][row].pi_shift(-k) * inv
                    combine(j, piv, f.retag(tag))
            pivots[row] = piv
            active.remove(piv)
            pending.remove(row)
            progress = True
            break
        if not progress:
            # as many independent columns left as rows: they finish a basis
            live = [j for j in active if any(not x.is_zero() for x in cols[j])]
            if len(live) == len(pending):
                for r, j in zip(sorted(pending), live):
                    pivots[r] = j
                    active.remove(j)
                pending = []
                break
            if any(any(not cols[j][r].is_zero() for j in active) for r in pending):
                raise NotFree("span has no basis over o_L<z> (non-principal pivot ideal)")
            raise RankDeficient(f"span rank {s - len(pending)} < expected {expected_rank}")
    leftovers = [j for j in active if any(not x.is_zero() for x in cols[j])]
    if leftovers:
        raise PrecisionExhausted("generators not fully reduced at working precision")
    if len(pivots) < expected_rank:
        raise RankDeficient(f"span rank {len(pivots)} < expected {expected_rank}")
    order = [pivots[r] for r in range(s)]
    B = Mat.from_columns([cols[j] for j in order], tag)
    Xm = Mat.from_columns([X[j] for j in order], tag)
    if det(B).is_zero():
        raise RankDeficient("basis candidates are linearly dependent")
    G = Mat.from_columns([[x.retag(tag) for x in c] for c in _original(generators)], tag)
    if not G * Xm == B:
        raise PrecisionExhausted("transform check failed")
    if not contains_columns(B, G):
        raise PrecisionExhausted("double inclusion failed at working precision")
    return B, Xm


def _original(generators):
    if isinstance(generators, Mat):
        return generators.columns()
    return [list(c) for c in generators]


def contains_columns(B: Mat, G: Mat) -> bool:
    """Whether every column of G lies in the o_L<z>-span of the columns of B."""
    d = det(B)
    adjB = adjugate(B) * G if B.rows > 1 else G
    for r in adjB.entries:
        for x in r:
            if x.is_zero():
                continue
            Q, R = tate_divmod(x.as_exact(), d.as_exact())
            if not R.is_zero() or Q.lo < 0:
                return False
    return True


def minimal_N(A: Mat) -> int:
    """Smallest N >= 0 with pi^N A and pi^N A^-1 integral (A over l[[pi,z]][1/pi])."""
    d = det(A)
    a = d.lo
    if d.is_zero() or d.pi_shift(-a).coeff(0, 0) == 0:
        raise ValueError("A is not invertible over l[[pi, z]][1/pi]")
    adj_val = adjugate(A).min_valuation if A.rows > 1 else 0
    n1 = -A.min_valuation
    n2 = a - adj_val
    return int(max(0, n1, n2))


__all__ = [
    "ell_kernel", "digit_constraints", "pi_digit_kernel", "kernel_digit_space",
    "brute_force_digit_space", "column_reduce_to_basis", "contains_columns", "minimal_N",
    "is_tate_unit", "INF",
]
