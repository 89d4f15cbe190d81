"""Rank, full rank decomposition, quaternion SVD, and the free-block {1}-inverse.

Two computational routes are kept genuinely separate throughout:

* ``direct`` — native quaternion arithmetic on the Cayley-Dickson component
  pair (Householder bidiagonalization + a real implicit-shift QR kernel for
  the SVD; quaternion row operations for the elimination).
* ``crep``  — complex structure-preserving arithmetic on the doubled complex
  representation (one complex SVD / GEMM of doubled size, followed by exact
  restoration of the quaternion block structure).

Both must agree to rounding; the test suite enforces this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import (
    QMatrix,
    conj_transpose,
    crep_mul,
    fro_norm,
    mat_mul,
    to_crep,
)

__all__ = [
    "FullRankFactorization",
    "QSvdResult",
    "rank",
    "qsvd",
    "full_rank_decompose",
    "one_inverse",
    "random_free_blocks",
]

_EPS = np.finfo(float).eps


def _rank_threshold(sigma: np.ndarray, m: int, n: int) -> float:
    # sigma: deduplicated quaternion singular values, nonincreasing
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0.0
    return max(m, n) * _EPS * float(sigma[0])


def _crep_singular_values(a: QMatrix) -> np.ndarray:
    """Quaternion singular values = pairwise-deduplicated spectrum of A^C."""
    s = np.linalg.svd(to_crep(a).data, compute_uv=False)
    return 0.5 * (s[0::2] + s[1::2])


def rank(a: QMatrix) -> int:
    """Numerical rank of a quaternion matrix: half the rank of A^C."""
    m, n = a.shape
    if m == 0 or n == 0:
        return 0
    sig = _crep_singular_values(a)
    return int(np.count_nonzero(sig > _rank_threshold(sig, m, n)))


# =========================================================== quaternion SVD


@dataclass(frozen=True)
class QSvdResult:
    """SVD ``A = U diag(sigma) V*`` with unitary quaternion U (m,m), V (n,n)."""

    u: QMatrix
    sigma: np.ndarray
    v: QMatrix
    rank: int

    def reconstruct(self) -> QMatrix:
        k = self.sigma.size
        us1 = self.u.q1[:, :k] * self.sigma
        us2 = self.u.q2[:, :k] * self.sigma
        vk = QMatrix(self.v.q1[:, :k], self.v.q2[:, :k])
        return mat_mul(QMatrix(us1, us2), conj_transpose(vk))


def qsvd(a: QMatrix, method: str = "crep") -> QSvdResult:
    """Quaternion SVD by the selected realization.

    Parameters
    ----------
    a : QMatrix
    method : {"crep", "direct"}
        "crep": complex SVD of A^C with symplectic structure restoration.
        "direct": quaternion Householder bidiagonalization followed by a real
        implicit-shift QR sweep on the bidiagonal.
    """
    m, n = a.shape
    if m == 0 or n == 0:
        return QSvdResult(QMatrix.eye(m), np.zeros(0), QMatrix.eye(n), 0)
    if method == "crep":
        return _qsvd_crep(a)
    if method == "direct":
        return _qsvd_direct(a)
    raise ValueError(f"unknown qsvd method {method!r}")


def _psi_partner(w: np.ndarray, half: int) -> np.ndarray:
    # -J conj(w): the forced partner column of a symplectic block basis
    out = np.empty_like(w)
    out[:half] = -np.conj(w[half:])
    out[half:] = np.conj(w[:half])
    return out


def _greedy_pairs(columns: np.ndarray, svals: np.ndarray, half: int,
                  want: int, basis0=None):
    """Walk `columns` in order, keeping one representative per antiunitary pair.

    Each kept column w is orthonormalized against everything kept so far and
    against the forced partners -J conj(w); a column that deflates to (near)
    nothing is the partner of an earlier keep and is skipped.  Returns the
    kept representatives, their associated singular values, and the full
    orthonormal basis (keeps + partners) for later completion.
    """
    dim = columns.shape[0]
    basis = np.zeros((dim, 0), dtype=complex) if basis0 is None else basis0
    reps, sigs = [], []
    for idx in range(columns.shape[1]):
        if len(reps) == want:
            break
        v = columns[:, idx].astype(complex)
        if basis.shape[1]:
            v = v - basis @ (basis.conj().T @ v)
        nrm = np.linalg.norm(v)
        if nrm <= math.sqrt(0.5):
            continue  # partner of an earlier keep
        w = v / nrm
        reps.append(w)
        sigs.append(float(svals[idx]))
        basis = np.column_stack([basis, w, _psi_partner(w, half)])
    return reps, sigs, basis


def _complete_pairs(basis: np.ndarray, half: int, count: int):
    """Extend a symplectic orthonormal set by `count` more pair representatives."""
    reps = []
    if count <= 0:
        return reps, basis
    cands = np.eye(2 * half, dtype=complex)
    for _ in range(count):
        resid = cands - basis @ (basis.conj().T @ cands)
        norms = np.linalg.norm(resid, axis=0)
        t = int(np.argmax(norms))
        w = resid[:, t] / norms[t]
        reps.append(w)
        basis = np.column_stack([basis, w, _psi_partner(w, half)])
    return reps, basis


def _qsvd_crep(a: QMatrix) -> QSvdResult:
    m, n = a.shape
    c = to_crep(a).data  # exactly symplectic by construction
    _, shat, vhat_h = np.linalg.svd(c, full_matrices=True)
    vhat = vhat_h.conj().T
    svals = np.zeros(2 * n)
    svals[: shat.size] = shat

    # right singular pairs
    w_reps, w_sigs, _ = _greedy_pairs(vhat, svals, n, n)
    if len(w_reps) < n:  # near-tie fallback; normally unreachable
        basis = np.column_stack(
            [np.column_stack([w, _psi_partner(w, n)]) for w in w_reps]
        ) if w_reps else np.zeros((2 * n, 0), dtype=complex)
        extra, _ = _complete_pairs(basis, n, n - len(w_reps))
        w_reps += extra
        w_sigs += [0.0] * len(extra)

    order = np.argsort(-np.asarray(w_sigs), kind="stable")
    w_cols = np.column_stack([w_reps[t] for t in order])
    sigma = np.asarray(w_sigs)[order][: min(m, n)]
    r = int(np.count_nonzero(sigma > _rank_threshold(sigma, m, n)))

    # left vectors: u_c = C w_c / sigma_c above the rank cut, then re-paired
    # to restore exact orthonormality, then symplectic completion
    u_basis = np.zeros((2 * m, 0), dtype=complex)
    u_reps = []
    if r:
        raw = c @ w_cols[:, :r] / sigma[:r]
        u_reps, _, u_basis = _greedy_pairs(raw, sigma[:r], m, r)
        if len(u_reps) < r:  # pathological; keep count honest
            extra, u_basis = _complete_pairs(u_basis, m, r - len(u_reps))
            u_reps += extra
    extra, _ = _complete_pairs(u_basis, m, m - len(u_reps))
    u_cols = np.column_stack(u_reps + extra)

    u = QMatrix(u_cols[:m, :], -np.conj(u_cols[m:, :]))
    v = QMatrix(w_cols[:n, :], -np.conj(w_cols[n:, :]))
    return QSvdResult(u, sigma, v, r)


# ---------------------------------------------------- direct route kernels
#
# Pair arithmetic on (X1, X2) complex arrays, X = X1 + X2*j.  Scalars are
# (s1, s2) pairs.


def _pair_mm(a1, a2, b1, b2):
    return (a1 @ b1 - a2 @ np.conj(b2), a1 @ b2 + a2 @ np.conj(b1))


def _scalar_times(s1, s2, x1, x2):
    # quaternion scalar (s1,s2) left-multiplying entries of (x1,x2)
    return s1 * x1 - s2 * np.conj(x2), s1 * x2 + s2 * np.conj(x1)


def _times_scalar(x1, x2, s1, s2):
    # entries of (x1,x2) right-multiplied by quaternion scalar (s1,s2)
    return x1 * s1 - x2 * np.conj(s2), x1 * s2 + x2 * np.conj(s1)


def _reflector(x1, x2):
    """Householder data (v, ||v||^2, beta) sending x to -mu*beta*e1.

    mu = x_1/|x_1| (1 if x_1 = 0) and beta = ||x||, so the reflected vector's
    leading entry has the magnitude of x and the rest vanish.
    """
    beta = math.sqrt(float(np.sum(np.abs(x1) ** 2 + np.abs(x2) ** 2)))
    if beta == 0.0:
        return None
    h1 = abs(complex(x1[0])) ** 2 + abs(complex(x2[0])) ** 2
    habs = math.sqrt(h1)
    if habs == 0.0:
        mu1, mu2 = 1.0 + 0j, 0j
    else:
        mu1, mu2 = x1[0] / habs, x2[0] / habs
    v1 = x1.astype(complex).copy()
    v2 = x2.astype(complex).copy()
    v1[0] += mu1 * beta
    v2[0] += mu2 * beta
    vn2 = float(np.sum(np.abs(v1) ** 2 + np.abs(v2) ** 2))
    return v1, v2, vn2


def _apply_reflector_left(b1, b2, v1, v2, vn2):
    # B := (I - (2/vn2) v v*) B  in place on the given views
    vc1, vc2 = np.conj(v1), -v2  # v* entries
    w1, w2 = _pair_mm(vc1[None, :], vc2[None, :], b1, b2)
    u1, u2 = _pair_mm(v1[:, None], v2[:, None], w1, w2)
    b1 -= (2.0 / vn2) * u1
    b2 -= (2.0 / vn2) * u2


def _apply_reflector_right(b1, b2, v1, v2, vn2):
    # B := B (I - (2/vn2) v v*) in place
    t1, t2 = _pair_mm(b1, b2, v1[:, None], v2[:, None])
    vc1, vc2 = np.conj(v1), -v2
    u1, u2 = _pair_mm(t1, t2, vc1[None, :], vc2[None, :])
    b1 -= (2.0 / vn2) * u1
    b2 -= (2.0 / vn2) * u2


def _bidiagonalize(a: QMatrix):
    """Reduce A (m >= n) to real upper bidiagonal B = U* A V by quaternion
    Householder reflectors with unit-quaternion phase normalization."""
    m, n = a.shape
    b1, b2 = a.q1.copy(), a.q2.copy()
    u1 = np.eye(m, dtype=complex)
    u2 = np.zeros((m, m), dtype=complex)
    v1 = np.eye(n, dtype=complex)
    v2 = np.zeros((n, n), dtype=complex)

    for c in range(n):
        ref = _reflector(b1[c:, c], b2[c:, c])
        if ref is not None:
            rv1, rv2, vn2 = ref
            _apply_reflector_left(b1[c:, c:], b2[c:, c:], rv1, rv2, vn2)
            # U := U H (same reflector, applied from the right)
            _apply_reflector_right(u1[:, c:], u2[:, c:], rv1, rv2, vn2)
        # make the diagonal entry real nonnegative: row *= d, U col *= conj(d)
        pa = math.sqrt(abs(complex(b1[c, c])) ** 2 + abs(complex(b2[c, c])) ** 2)
        if pa > 0.0:
            d1, d2 = np.conj(b1[c, c]) / pa, -b2[c, c] / pa
            b1[c, c:], b2[c, c:] = _scalar_times(d1, d2, b1[c, c:], b2[c, c:])
            u1[:, c], u2[:, c] = _times_scalar(
                u1[:, c], u2[:, c], np.conj(d1), -d2)
            b1[c, c] = b1[c, c].real
            b2[c, c] = 0.0
        if c + 1 < n:
            # right reflector built from the conjugated row tail
            y1, y2 = np.conj(b1[c, c + 1:]), -b2[c, c + 1:]
            ref = _reflector(y1, y2)
            if ref is not None:
                rv1, rv2, vn2 = ref
                _apply_reflector_right(b1[c:, c + 1:], b2[c:, c + 1:],
                                       rv1, rv2, vn2)
                _apply_reflector_right(v1[:, c + 1:], v2[:, c + 1:],
                                       rv1, rv2, vn2)
            pa = math.sqrt(abs(complex(b1[c, c + 1])) ** 2
                           + abs(complex(b2[c, c + 1])) ** 2)
            if pa > 0.0:
                q1c, q2c = b1[c, c + 1], b2[c, c + 1]
                e1, e2 = np.conj(q1c) / pa, -q2c / pa
                b1[c:, c + 1], b2[c:, c + 1] = _times_scalar(
                    b1[c:, c + 1], b2[c:, c + 1], e1, e2)
                v1[:, c + 1], v2[:, c + 1] = _times_scalar(
                    v1[:, c + 1], v2[:, c + 1], e1, e2)
                b1[c, c + 1] = b1[c, c + 1].real
                b2[c, c + 1] = 0.0
    d = np.array([b1[t, t].real for t in range(n)])
    e = np.array([b1[t, t + 1].real for t in range(n - 1)])
    return QMatrix(u1, u2), d, e, QMatrix(v1, v2)


def _golub_reinsch(d: np.ndarray, e: np.ndarray, max_its: int = 60):
    """Implicit-shift QR diagonalization of a real upper bidiagonal matrix.

    Returns orthogonal (U, V) and nonincreasing nonnegative w with
    ``bidiag(d, e) = U @ diag(w) @ V.T``.
    """
    n = d.size
    w = d.astype(float).copy()
    rv1 = np.zeros(n)
    rv1[1:] = e.astype(float)
    U = np.eye(n)
    V = np.eye(n)
    anorm = float(np.max(np.abs(w) + np.abs(rv1))) if n else 0.0
    for k in range(n - 1, -1, -1):
        for its in range(max_its):
            flag = True
            l = k
            nm = l - 1
            while l >= 0:
                nm = l - 1
                if abs(rv1[l]) <= _EPS * anorm:
                    flag = False
                    break
                if abs(w[nm]) <= _EPS * anorm:
                    break
                l -= 1
            if flag:
                # w[nm] negligible: rotate rv1[l] out through the U columns
                c, s = 0.0, 1.0
                for i in range(l, k + 1):
                    f = s * rv1[i]
                    rv1[i] = c * rv1[i]
                    if abs(f) <= _EPS * anorm:
                        break
                    g = w[i]
                    h = math.hypot(f, g)
                    w[i] = h
                    h = 1.0 / h
                    c = g * h
                    s = -f * h
                    y = U[:, nm].copy()
                    z = U[:, i].copy()
                    U[:, nm] = y * c + z * s
                    U[:, i] = z * c - y * s
            z = w[k]
            if l == k:
                if z < 0.0:
                    w[k] = -z
                    V[:, k] = -V[:, k]
                break
            if its == max_its - 1:
                raise RuntimeError("bidiagonal QR failed to converge")
            # Wilkinson-style shift from the trailing 2x2 of B^T B
            x = w[l]
            nm = k - 1
            y = w[nm]
            g = rv1[nm]
            h = rv1[k]
            f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y)
            g = math.hypot(f, 1.0)
            f = ((x - z) * (x + z) + h * (y / (f + math.copysign(g, f)) - h)) / x
            c = s = 1.0
            for j in range(l, nm + 1):
                i = j + 1
                g = rv1[i]
                y = w[i]
                h = s * g
                g = c * g
                z = math.hypot(f, h)
                rv1[j] = z
                c = f / z
                s = h / z
                f = x * c + g * s
                g = g * c - x * s
                h = y * s
                y *= c
                yy = V[:, j].copy()
                zz = V[:, i].copy()
                V[:, j] = yy * c + zz * s
                V[:, i] = zz * c - yy * s
                z = math.hypot(f, h)
                w[j] = z
                if z != 0.0:
                    z = 1.0 / z
                    c = f * z
                    s = h * z
                f = c * g + s * y
                x = c * y - s * g
                yy = U[:, j].copy()
                zz = U[:, i].copy()
                U[:, j] = yy * c + zz * s
                U[:, i] = zz * c - yy * s
            rv1[l] = 0.0
            rv1[k] = f
            w[k] = x
    order = np.argsort(-w, kind="stable")
    return U[:, order], w[order], V[:, order]


def _qsvd_direct(a: QMatrix) -> QSvdResult:
    m, n = a.shape
    if m < n:
        res = _qsvd_direct(conj_transpose(a))
        return QSvdResult(res.v, res.sigma, res.u, res.rank)
    u0, d, e, v0 = _bidiagonalize(a)
    ur, sigma, vr = _golub_reinsch(d, e)
    # real rotations mix quaternion columns componentwise
    u1 = u0.q1.copy()
    u2 = u0.q2.copy()
    u1[:, :n] = u0.q1[:, :n] @ ur
    u2[:, :n] = u0.q2[:, :n] @ ur
    v = QMatrix(v0.q1 @ vr, v0.q2 @ vr)
    r = int(np.count_nonzero(sigma > _rank_threshold(sigma, m, n)))
    return QSvdResult(QMatrix(u1, u2), sigma, v, r)


# ================================================= full rank decomposition


@dataclass(frozen=True)
class FullRankFactorization:
    """A = F @ G with F (m, r) full column rank and G (r, n) full row rank.

    ``r == 0`` designates the empty factorization of the zero matrix; callers
    must check :attr:`is_empty` before dividing by anything.
    """

    f: QMatrix
    g: QMatrix
    r: int

    @property
    def is_empty(self) -> bool:
        return self.r == 0


def _elim_tol(a: QMatrix) -> float:
    m, n = a.shape
    big = math.sqrt(float(a.abs2().max())) if m and n else 0.0
    return max(m, n) * _EPS * big


def _rref_direct(a: QMatrix, tol: float):
    """Reduced row echelon form by quaternion row operations on the pair."""
    a1, a2 = a.q1.copy(), a.q2.copy()
    m, n = a1.shape
    piv_cols = []
    row = 0
    # rejection threshold must follow element growth, or leftover rounding
    # noise in a rank-deficient tail can masquerade as one more pivot
    big = 0.0
    for c in range(n):
        if row == m:
            break
        big = max(big, math.sqrt(float((np.abs(a1) ** 2
                                        + np.abs(a2) ** 2).max())))
        tol_c = max(tol, max(m, n) * _EPS * big)
        width = np.abs(a1[row:, c]) ** 2 + np.abs(a2[row:, c]) ** 2
        imax = row + int(np.argmax(width))
        if math.sqrt(float(width[imax - row])) <= tol_c:
            continue
        if imax != row:
            a1[[row, imax]] = a1[[imax, row]]
            a2[[row, imax]] = a2[[imax, row]]
        p1, p2 = complex(a1[row, c]), complex(a2[row, c])
        n2 = abs(p1) ** 2 + abs(p2) ** 2
        s1, s2 = np.conj(p1) / n2, -p2 / n2  # p^{-1}
        a1[row], a2[row] = _scalar_times(s1, s2, a1[row], a2[row])
        a1[row, c] = 1.0
        a2[row, c] = 0.0
        q1 = a1[:, c].copy()
        q2 = a2[:, c].copy()
        q1[row] = 0.0
        q2[row] = 0.0
        # rows -= q * pivot_row (quaternion outer update)
        a1 -= q1[:, None] * a1[row][None, :] - q2[:, None] * np.conj(a2[row])[None, :]
        a2 -= q1[:, None] * a2[row][None, :] + q2[:, None] * np.conj(a1[row])[None, :]
        a1[:, c] = 0.0
        a2[:, c] = 0.0
        a1[row, c] = 1.0
        piv_cols.append(c)
        row += 1
    return QMatrix(a1[:row], a2[:row]), piv_cols


def _rref_crep(a: QMatrix, tol: float):
    """Same elimination, carried out on the doubled complex representation
    with paired block rows (complex structure preserving)."""
    m, n = a.shape
    d = to_crep(a).data.copy()
    piv_cols = []
    row = 0
    # growth-aware threshold, mirroring _rref_direct (quaternion magnitudes
    # read off the representative top block row pair)
    big = 0.0
    for c in range(n):
        if row == m:
            break
        big = max(big, math.sqrt(float((np.abs(d[:m, :n]) ** 2
                                        + np.abs(d[:m, n:]) ** 2).max())))
        tol_c = max(tol, max(m, n) * _EPS * big)
        width = np.abs(d[row:m, c]) ** 2 + np.abs(d[row:m, c + n]) ** 2
        imax = row + int(np.argmax(width))
        if math.sqrt(float(width[imax - row])) <= tol_c:
            continue
        if imax != row:
            d[[row, imax]] = d[[imax, row]]
            d[[m + row, m + imax]] = d[[m + imax, m + row]]
        p1, p2 = complex(d[row, c]), complex(d[row, c + n])
        n2 = abs(p1) ** 2 + abs(p2) ** 2
        s1, s2 = np.conj(p1) / n2, -p2 / n2
        sb = np.array([[s1, s2], [-np.conj(s2), np.conj(s1)]])
        d[[row, m + row], :] = sb @ d[[row, m + row], :]
        q1 = d[:m, c].copy()
        q2 = d[:m, c + n].copy()
        q1[row] = 0.0
        q2[row] = 0.0
        top = d[row, :].copy()
        bot = d[m + row, :].copy()
        d[:m, :] -= q1[:, None] * top[None, :] + q2[:, None] * bot[None, :]
        d[m:, :] -= (-np.conj(q2)[:, None] * top[None, :]
                     + np.conj(q1)[:, None] * bot[None, :])
        for cc in (c, c + n):
            d[:, cc] = 0.0
        d[row, c] = 1.0
        d[m + row, c + n] = 1.0
        piv_cols.append(c)
        row += 1
    return QMatrix(d[:row, :n], d[:row, n:]), piv_cols


def full_rank_decompose(a: QMatrix, side: str = "column-form",
                        route: str = "direct") -> FullRankFactorization:
    """Full rank decomposition A = F G by column-pivoted elimination.

    Parameters
    ----------
    a : QMatrix
    side : {"column-form", "row-form"}
        "column-form": F is built from the pivot columns of A and G from the
        reduced rows.  "row-form": the mirrored construction from the pivot
        rows (the elimination runs on A* and the factors are conjugate-
        transposed back), so the row factor inherits A's left spaces.
    route : {"direct", "crep"}
        Arithmetic realization of the elimination.
    """
    kind = side.split("-")[0]
    if kind == "row":
        fact = full_rank_decompose(conj_transpose(a), side="column-form",
                                   route=route)
        return FullRankFactorization(
            conj_transpose(fact.g), conj_transpose(fact.f), fact.r)
    if kind != "column":
        raise ValueError(f"unknown side {side!r}")
    if route == "direct":
        g, piv = _rref_direct(a, _elim_tol(a))
    elif route == "crep":
        g, piv = _rref_crep(a, _elim_tol(a))
    else:
        raise ValueError(f"unknown route {route!r}")
    f = QMatrix(a.q1[:, piv], a.q2[:, piv])
    return FullRankFactorization(f, g, len(piv))


# ========================================================== {1}-inverse


def random_free_blocks(q: int, p: int, s: int, rng: np.random.Generator):
    """Uniform-[0,1) free blocks (K, L, M) for a rank-s q-by-p input."""
    from .qcore import random_qmat

    return (random_qmat(s, q - s, rng),
            random_qmat(p - s, s, rng),
            random_qmat(p - s, q - s, rng))


def one_inverse(w: QMatrix, k: QMatrix | None = None,
                l: QMatrix | None = None, m: QMatrix | None = None,
                method: str = "crep") -> QMatrix:
    """A {1}-inverse of w from its SVD and arbitrary free blocks.

    With ``w = U diag(sigma) V*`` of rank s, every choice of K (s, q-s),
    L (p-s, s), M (p-s, q-s) gives

        w^(1) = V [[diag(sigma_{1..s})^{-1}, K], [L, M]] U*

    and ``w @ w^(1) @ w == w`` holds for all of them.  Zero blocks (the
    default) give the Moore-Penrose inverse of w.
    """
    qdim, pdim = w.shape
    res = qsvd(w, method=method)
    s = res.rank
    if k is None:
        k = QMatrix.zeros(s, qdim - s)
    if l is None:
        l = QMatrix.zeros(pdim - s, s)
    if m is None:
        m = QMatrix.zeros(pdim - s, qdim - s)
    for name, blk, want in (("K", k, (s, qdim - s)),
                            ("L", l, (pdim - s, s)),
                            ("M", m, (pdim - s, qdim - s))):
        if blk.shape != want:
            raise ValueError(
                f"free block {name} has shape {blk.shape}, expected {want}")
    mid1 = np.zeros((pdim, qdim), dtype=complex)
    mid2 = np.zeros((pdim, qdim), dtype=complex)
    if s:
        mid1[:s, :s] = np.diag(1.0 / res.sigma[:s])
    mid1[:s, s:] = k.q1
    mid2[:s, s:] = k.q2
    mid1[s:, :s] = l.q1
    mid2[s:, :s] = l.q2
    mid1[s:, s:] = m.q1
    mid2[s:, s:] = m.q2
    mid = QMatrix(mid1, mid2)
    mm = mat_mul if method == "direct" else crep_mul
    return mm(mm(res.v, mid), conj_transpose(res.u))
