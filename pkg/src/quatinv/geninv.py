"""Generalized inverses of quaternion matrices with prescribed subspaces.

Constructors for outer ({2}-) inverses, {1,2}-inverses, and the classical
special cases (Moore-Penrose, Drazin, group inverse).  The Urquhart-type
expression

    X = S (T A S)^(1) T

is an outer inverse with right range R_r(S) exactly when
rank(TAS) = rank(S), and right null space N_r(T) exactly when
rank(TAS) = rank(T); it is a {1}-inverse exactly when rank(TAS) = rank(A).
Every constructor therefore returns an :class:`InverseReport` carrying the
computed matrix together with the four ranks, the flags they imply, and the
defining residuals, rather than a bare matrix.

The W-prescribed variants factor a single matrix W = F G by full rank
decomposition and invert the small matrix G A F; they fail (reported, not
raised) when that matrix is singular, since the target inverse then does not
exist.

Every constructor takes ``route`` in {"direct", "crep"}: native quaternion
arithmetic versus complex-representation arithmetic end to end.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .factor import full_rank_decompose, one_inverse, qsvd, random_free_blocks, rank
from .qcore import (
    QMatrix,
    conj_transpose,
    crep_mul,
    fro_norm,
    from_crep,
    hstack_q,
    mat_mul,
    symmetrize_crep,
    to_crep,
    vstack_q,
)

__all__ = [
    "InverseExistenceError",
    "InverseReport",
    "outer_right",
    "outer_left",
    "outer_both",
    "outer_w_right",
    "outer_w_left",
    "pinv",
    "pinv_solve",
    "pinv_report",
    "penrose_residuals",
    "mat_index",
    "drazin",
    "group_inverse",
    "right_range_equal",
    "right_null_equal",
    "left_range_equal",
    "left_null_equal",
]


class InverseExistenceError(Exception):
    """The requested inverse does not exist for this input."""


@dataclass(frozen=True)
class InverseReport:
    """Result of an inverse constructor.

    x              -- the computed matrix (all zeros when exists is False)
    exists         -- False only when a required small matrix was singular
    reason         -- diagnostic for exists=False, else ""
    classification -- rank-condition flags: is_one_inverse, is_outer,
                      range_matches, nullspace_matches, is_12_unique
                      (both-sided constructors add per-side variants)
    residuals      -- absolute Frobenius defining residuals
    ranks          -- nu = rank(A), s = rank(S), t = rank(T), w = rank(TAS)
    side           -- which subspaces are prescribed: right / left / both
    route          -- arithmetic used to build x
    """

    x: QMatrix
    exists: bool
    reason: str
    classification: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    ranks: dict = field(default_factory=dict)
    side: str = "right"
    route: str = "direct"


def _mm(route):
    if route == "direct":
        return mat_mul
    if route == "crep":
        return crep_mul
    raise ValueError(f"unknown route {route!r}")


def _classify(nu, s_rank, t_rank, w_rank):
    range_matches = w_rank == s_rank
    null_matches = w_rank == t_rank
    is_one = w_rank == nu
    return {
        "is_one_inverse": is_one,
        "is_outer": range_matches or null_matches,
        "range_matches": range_matches,
        "nullspace_matches": null_matches,
        "is_12_unique": range_matches and null_matches and is_one,
    }


def _defining_residuals(a, x):
    xax = mat_mul(mat_mul(x, a), x)
    axa = mat_mul(mat_mul(a, x), a)
    return {"outer": fro_norm(xax - x), "one": fro_norm(axa - a)}


def _resolve_free_blocks(free_blocks, w, s):
    if free_blocks is None:
        return None, None, None
    if isinstance(free_blocks, np.random.Generator):
        qdim, pdim = w.shape
        return random_free_blocks(qdim, pdim, s, free_blocks)
    k, l, m = free_blocks
    return k, l, m


def outer_right(a: QMatrix, s1: QMatrix, t1: QMatrix, route: str = "direct",
                free_blocks=None) -> InverseReport:
    """Outer inverse with prescribed right range R_r(S1) / null space N_r(T1).

    Builds X = S1 (T1 A S1)^(1) T1 and classifies it by the rank of T1*A*S1
    against rank(S1), rank(T1), and rank(A).  ``free_blocks`` feeds the
    {1}-inverse: None for zero blocks, a (K, L, M) triple, or a Generator to
    draw them at random (the classification is invariant to the choice).
    """
    m, n = a.shape
    if s1.nrows != n:
        raise ValueError(f"S1 has {s1.nrows} rows, expected {n}")
    if t1.ncols != m:
        raise ValueError(f"T1 has {t1.ncols} columns, expected {m}")
    mm = _mm(route)
    w = mm(mm(t1, a), s1)
    ranks = {"nu": rank(a), "s": rank(s1), "t": rank(t1), "w": rank(w)}
    k, l, mb = _resolve_free_blocks(free_blocks, w, ranks["w"])
    method = "direct" if route == "direct" else "crep"
    w1 = one_inverse(w, k, l, mb, method=method)
    x = mm(mm(s1, w1), t1)
    return InverseReport(
        x=x, exists=True, reason="",
        classification=_classify(ranks["nu"], ranks["s"], ranks["t"], ranks["w"]),
        residuals=_defining_residuals(a, x),
        ranks=ranks, side="right", route=route)


def outer_left(a: QMatrix, s2: QMatrix, t2: QMatrix, route: str = "direct",
               free_blocks=None) -> InverseReport:
    """Outer inverse with prescribed left range R_l(S2) / null space N_l(T2).

    Mirror of :func:`outer_right`: X = T2 (S2 A T2)^(1) S2, classified by
    rank(S2 A T2) against rank(S2), rank(T2), rank(A).
    """
    m, n = a.shape
    if s2.ncols != m:
        raise ValueError(f"S2 has {s2.ncols} columns, expected {m}")
    if t2.nrows != n:
        raise ValueError(f"T2 has {t2.nrows} rows, expected {n}")
    mm = _mm(route)
    w = mm(mm(s2, a), t2)
    ranks = {"nu": rank(a), "s": rank(s2), "t": rank(t2), "w": rank(w)}
    k, l, mb = _resolve_free_blocks(free_blocks, w, ranks["w"])
    method = "direct" if route == "direct" else "crep"
    w1 = one_inverse(w, k, l, mb, method=method)
    x = mm(mm(t2, w1), s2)
    return InverseReport(
        x=x, exists=True, reason="",
        classification=_classify(ranks["nu"], ranks["s"], ranks["t"], ranks["w"]),
        residuals=_defining_residuals(a, x),
        ranks=ranks, side="left", route=route)


def outer_both(a: QMatrix, s: QMatrix, t: QMatrix, route: str = "direct",
               free_blocks=None) -> InverseReport:
    """Outer inverse prescribing right spaces from (S, T) and left from (T, S).

    Same expression X = S (TAS)^(1) T; the right-side conditions compare
    rank(TAS) with (rank S, rank T), the left-side conditions with the pair
    swapped.  When rank(TAS) = rank(S) = rank(T) both sides match and X is
    the unique outer inverse with all four prescribed spaces; the combined
    flags report each side plus their conjunction, and ``sides_disagree``
    marks the asymmetric cases.
    """
    m, n = a.shape
    if s.shape != (n, m):
        raise ValueError(f"S has shape {s.shape}, expected {(n, m)}")
    if t.shape != (n, m):
        raise ValueError(f"T has shape {t.shape}, expected {(n, m)}")
    mm = _mm(route)
    w = mm(mm(t, a), s)
    ranks = {"nu": rank(a), "s": rank(s), "t": rank(t), "w": rank(w)}
    k, l, mb = _resolve_free_blocks(free_blocks, w, ranks["w"])
    method = "direct" if route == "direct" else "crep"
    w1 = one_inverse(w, k, l, mb, method=method)
    x = mm(mm(s, w1), t)
    right = _classify(ranks["nu"], ranks["s"], ranks["t"], ranks["w"])
    left = _classify(ranks["nu"], ranks["t"], ranks["s"], ranks["w"])
    cls = {
        "is_one_inverse": right["is_one_inverse"],
        "is_outer": right["is_outer"] or left["is_outer"],
        "range_matches": right["range_matches"] and left["range_matches"],
        "nullspace_matches":
            right["nullspace_matches"] and left["nullspace_matches"],
        "is_12_unique": right["is_12_unique"] and left["is_12_unique"],
        "right_range_matches": right["range_matches"],
        "right_nullspace_matches": right["nullspace_matches"],
        "left_range_matches": left["range_matches"],
        "left_nullspace_matches": left["nullspace_matches"],
        "sides_disagree": right["range_matches"] != right["nullspace_matches"],
    }
    return InverseReport(
        x=x, exists=True, reason="", classification=cls,
        residuals=_defining_residuals(a, x),
        ranks=ranks, side="both", route=route)


def _invert_full_rank(r_mat: QMatrix, route: str) -> QMatrix:
    # invert a (numerically verified) nonsingular small matrix per route
    if route == "direct":
        return one_inverse(r_mat, method="direct")
    c = np.linalg.inv(to_crep(r_mat).data)
    n = r_mat.nrows
    return from_crep(symmetrize_crep(c, n, n))


def _w_report(a, side, route, fact):
    # both W-variants invert the same small matrix G A F; they differ in the
    # factorization form and in which spaces (right vs left) the factors pin
    mm = _mm(route)
    r_small = mm(mm(fact.g, a), fact.f)
    ranks = {"nu": rank(a), "s": fact.r, "t": fact.r, "w": rank(r_small)}
    if ranks["w"] < fact.r:
        zero = QMatrix.zeros(a.ncols, a.nrows)
        return InverseReport(
            x=zero, exists=False,
            reason="prescribed-space inverse does not exist: "
                   f"G*A*F is singular (rank {ranks['w']} < {fact.r})",
            classification={k: False for k in
                            ("is_one_inverse", "is_outer", "range_matches",
                             "nullspace_matches", "is_12_unique")},
            residuals=_defining_residuals(a, zero),
            ranks=ranks, side=side, route=route)
    inv = _invert_full_rank(r_small, route) if fact.r else QMatrix.zeros(0, 0)
    x = mm(mm(fact.f, inv), fact.g)
    return InverseReport(
        x=x, exists=True, reason="",
        classification=_classify(ranks["nu"], ranks["s"], ranks["t"], ranks["w"]),
        residuals=_defining_residuals(a, x),
        ranks=ranks, side=side, route=route)


def outer_w_right(a: QMatrix, w1: QMatrix, route: str = "direct") -> InverseReport:
    """Outer inverse with right range and null space prescribed by one matrix.

    Factors W1 = S1 T1 (column-form full rank decomposition, so
    R_r(W1) = R_r(S1) and N_r(W1) = N_r(T1)) and returns
    X = S1 (T1 A S1)^{-1} T1 when the small matrix is invertible.  A singular
    small matrix means no outer inverse with those spaces exists; the report
    carries ``exists=False`` instead of raising.
    """
    m, n = a.shape
    if w1.shape != (n, m):
        raise ValueError(f"W1 has shape {w1.shape}, expected {(n, m)}")
    fact = full_rank_decompose(w1, side="column-form", route=route)
    return _w_report(a, "right", route, fact)


def outer_w_left(a: QMatrix, w2: QMatrix, route: str = "direct") -> InverseReport:
    """Left-space mirror of :func:`outer_w_right`.

    Uses the row-form full rank decomposition W2 = T2 S2 (so
    R_l(W2) = R_l(S2), N_l(W2) = N_l(T2)) and returns
    X = T2 (S2 A T2)^{-1} S2 when the small matrix is invertible.
    """
    m, n = a.shape
    if w2.shape != (n, m):
        raise ValueError(f"W2 has shape {w2.shape}, expected {(n, m)}")
    fact = full_rank_decompose(w2, side="row-form", route=route)
    return _w_report(a, "left", route, fact)


# ======================================================= classical inverses


def penrose_residuals(a: QMatrix, x: QMatrix) -> dict:
    """Absolute Frobenius residuals of the four Penrose conditions."""
    ax = mat_mul(a, x)
    xa = mat_mul(x, a)
    return {
        "one": fro_norm(mat_mul(ax, a) - a),
        "outer": fro_norm(mat_mul(xa, x) - x),
        "p3": fro_norm(conj_transpose(ax) - ax),
        "p4": fro_norm(conj_transpose(xa) - xa),
    }


def pinv_report(a: QMatrix, method: str = "svd",
                route: str = "direct") -> InverseReport:
    """Moore-Penrose inverse with the full report and Penrose residuals.

    method selects the formula realization: "svd" evaluates
    A* (A*AA*)^(1) A* through the SVD-based {1}-inverse; "frd" factors A*
    and inverts the small matrix (the W-prescribed construction with
    W = A*).  Combined with route this gives four realizations.
    """
    astar = conj_transpose(a)
    if method == "svd":
        rep = outer_right(a, astar, astar, route=route)
    elif method == "frd":
        rep = outer_w_right(a, astar, route=route)
    else:
        raise ValueError(f"unknown pinv method {method!r}")
    residuals = dict(rep.residuals)
    residuals.update(penrose_residuals(a, rep.x))
    return InverseReport(x=rep.x, exists=rep.exists, reason=rep.reason,
                         classification=rep.classification,
                         residuals=residuals, ranks=rep.ranks,
                         side=rep.side, route=rep.route)


def pinv(a: QMatrix, method: str = "svd", route: str = "direct") -> QMatrix:
    """Moore-Penrose inverse of a quaternion matrix (zero maps to zero)."""
    return pinv_report(a, method=method, route=route).x


def pinv_solve(a: QMatrix, b: QMatrix, route: str = "direct") -> QMatrix:
    """Minimum-norm least-squares solution pinv(A) @ B, applied via the SVD.

    Unlike the composed generator formula A*(A*AA*)^(1)A* — whose middle
    matrix cubes the spectrum of A and loses small singular values of
    ill-conditioned systems — this applies V diag(1/sigma) U* directly from
    the rank-revealing SVD of A itself, so accuracy degrades only with
    cond(A).  Use this for solving linear systems; use :func:`pinv` when the
    inverse matrix itself is the object of study.
    """
    if a.shape[0] != b.shape[0]:
        raise ValueError(
            f"dimension mismatch: A is {a.shape}, B is {b.shape}")
    sv = qsvd(a, method=route)
    r = sv.rank
    if r == 0:
        return QMatrix.zeros(a.shape[1], b.shape[1])
    u_r = QMatrix(sv.u.q1[:, :r], sv.u.q2[:, :r])
    v_r = QMatrix(sv.v.q1[:, :r], sv.v.q2[:, :r])
    y = mat_mul(conj_transpose(u_r), b)
    inv_s = (1.0 / sv.sigma[:r])[:, None]
    return mat_mul(v_r, QMatrix(inv_s * y.q1, inv_s * y.q2))


def mat_index(a: QMatrix) -> int:
    """Smallest k >= 0 with rank(A^{k+1}) = rank(A^k) (A square).

    Powers are renormalized by their Frobenius norm at every step; positive
    real scaling is central, so ranks are unaffected.
    """
    m, n = a.shape
    if m != n:
        raise ValueError(f"index needs a square matrix, got {a.shape}")
    if n == 0:
        return 0
    b = a * (1.0 / max(1.0, fro_norm(a)))
    p = QMatrix.eye(n)
    prev = n  # rank(A^0)
    for j in range(1, n + 2):
        p = mat_mul(p, b)
        nrm = fro_norm(p)
        if nrm > 0.0:
            p = p * (1.0 / nrm)
        r = rank(p)
        if r == prev:
            return j - 1
        prev = r
    raise RuntimeError("rank sequence failed to stabilize")  # unreachable


def _normalized_power(a: QMatrix, k: int) -> QMatrix:
    n = a.nrows
    b = a * (1.0 / max(1.0, fro_norm(a)))
    p = QMatrix.eye(n)
    for _ in range(k):
        p = mat_mul(p, b)
        nrm = fro_norm(p)
        if nrm > 0.0:
            p = p * (1.0 / nrm)
    return p


def drazin(a: QMatrix, route: str = "direct") -> QMatrix:
    """Drazin inverse: the outer inverse prescribed by W = A^k, k = Ind(A).

    The W-construction only sees the spaces of A^k, which positive real
    rescaling leaves untouched, so normalized powers feed it directly.
    Satisfies A^{k+1} X = A^k, XAX = X, AX = XA.
    """
    m, n = a.shape
    if m != n:
        raise ValueError(f"Drazin inverse needs a square matrix, got {a.shape}")
    k = mat_index(a)
    rep = outer_w_right(a, _normalized_power(a, k), route=route)
    if not rep.exists:  # mathematically impossible; numerically defensive
        raise InverseExistenceError(rep.reason)
    return rep.x


def group_inverse(a: QMatrix, route: str = "direct") -> QMatrix:
    """Group inverse: Drazin inverse restricted to Ind(A) <= 1.

    Invertible inputs (index 0) return the ordinary inverse; index >= 2
    raises :class:`InverseExistenceError` since the group inverse requires
    rank(A^2) = rank(A).
    """
    m, n = a.shape
    if m != n:
        raise ValueError(f"group inverse needs a square matrix, got {a.shape}")
    k = mat_index(a)
    if k > 1:
        raise InverseExistenceError(
            f"group inverse does not exist: Ind(A) = {k} > 1")
    rep = outer_w_right(a, a, route=route)
    if not rep.exists:
        raise InverseExistenceError(rep.reason)
    return rep.x


# ==================================================== subspace equality


def right_range_equal(x: QMatrix, s: QMatrix) -> bool:
    """R_r(X) == R_r(S): column concatenation adds no rank on either side."""
    if x.nrows != s.nrows:
        raise ValueError(f"row counts differ: {x.nrows} vs {s.nrows}")
    rx, rs = rank(x), rank(s)
    return rx == rs == rank(hstack_q([s, x]))


def right_null_equal(x: QMatrix, t: QMatrix) -> bool:
    """N_r(X) == N_r(T): equivalent to equal row spans, checked by stacking."""
    if x.ncols != t.ncols:
        raise ValueError(f"column counts differ: {x.ncols} vs {t.ncols}")
    rx, rt = rank(x), rank(t)
    return rx == rt == rank(vstack_q([t, x]))


def left_range_equal(x: QMatrix, s: QMatrix) -> bool:
    """R_l(X) == R_l(S): the left (row-type) ranges, checked by stacking."""
    if x.ncols != s.ncols:
        raise ValueError(f"column counts differ: {x.ncols} vs {s.ncols}")
    rx, rs = rank(x), rank(s)
    return rx == rs == rank(vstack_q([s, x]))


def left_null_equal(x: QMatrix, t: QMatrix) -> bool:
    """N_l(X) == N_l(T): equal column spans, checked by concatenation."""
    if x.nrows != t.nrows:
        raise ValueError(f"row counts differ: {x.nrows} vs {t.nrows}")
    rx, rt = rank(x), rank(t)
    return rx == rt == rank(hstack_q([t, x]))
