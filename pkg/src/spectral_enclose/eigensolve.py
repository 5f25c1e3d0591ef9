"""Dense symmetric and symmetric-definite generalized eigensolvers.

Two interchangeable engines for the standard problem:

* ``"lapack"`` (default): LAPACK ``dsyev`` through SciPy, i.e. Householder
  tridiagonalization followed by implicit-shift QL/QR.
* ``"native"``: the same algorithm written out here in NumPy. It is slow for
  large N and serves as an independent cross-check on small problems.

The generalized problem M v = theta B v is reduced with an explicit Cholesky
factor B = L L^T to the standard problem for L^-1 M L^-T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import ConvergenceError, InvalidArgumentError, NotPositiveDefiniteError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray | None
    b_norm: bool = False


def _check_square(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise InvalidArgumentError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    return M


def definiteness_tol(B: np.ndarray) -> float:
    return B.shape[0] * EPS * float(np.max(np.diag(B)))


def cholesky(B) -> np.ndarray:
    """Lower Cholesky factor of ``B``.

    A pivot (squared diagonal of the factor) at or below ``N * eps * max(diag B)``
    is treated as a definiteness failure.
    """
    B = _check_square(B, "B")
    tol = definiteness_tol(B)
    c, info = lapack.dpotrf(B, lower=1, clean=1)
    if info > 0:
        k = info - 1
        raise NotPositiveDefiniteError(k)
    if info < 0:
        raise InvalidArgumentError(f"dpotrf rejected argument {-info}")
    pivots = np.diag(c) ** 2
    bad = np.flatnonzero(pivots <= tol)
    if bad.size:
        k = int(bad[0])
        raise NotPositiveDefiniteError(k, float(pivots[k]))
    return c


def tridiagonalize(M: np.ndarray):
    """Householder reduction M = Q T Q^T; returns (diag, offdiag, Q)."""
    A = np.array(M, dtype=float)
    N = A.shape[0]
    Q = np.eye(N)
    for k in range(N - 2):
        x = A[k + 1 :, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        if x[0] > 0:
            alpha = -alpha
        v = x
        v[0] -= alpha
        vnorm2 = float(v @ v)
        if vnorm2 == 0.0:
            continue
        beta = 2.0 / vnorm2
        S = A[k + 1 :, k + 1 :]
        p = beta * (S @ v)
        K = 0.5 * beta * float(p @ v)
        w = p - K * v
        S -= np.outer(v, w) + np.outer(w, v)
        A[k + 1, k] = A[k, k + 1] = alpha
        A[k + 2 :, k] = 0.0
        A[k, k + 2 :] = 0.0
        Q[:, k + 1 :] -= beta * np.outer(Q[:, k + 1 :] @ v, v)
    d = np.diag(A).copy()
    e = np.append(np.diag(A, 1), 0.0)
    return d, e, Q


def tridiagonal_ql(d, e, Z=None, max_sweeps=None):
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    ``e[i]`` couples ``d[i]`` and ``d[i+1]``. Rotations are accumulated into the
    columns of ``Z`` when given. Returns unsorted (d, Z).
    """
    d = np.array(d, dtype=float)
    e = np.array(e, dtype=float)
    n = d.size
    if e.size < n:
        e = np.append(e, np.zeros(n - e.size))
    e[n - 1] = 0.0
    ZT = None if Z is None else np.array(Z, dtype=float).T.copy()
    cap = 30 * n if max_sweeps is None else max_sweeps
    sweeps = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= EPS * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > cap:
                raise ConvergenceError(f"QL iteration exceeded {cap} sweeps")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if ZT is not None:
                    zi = ZT[i].copy()
                    zi1 = ZT[i + 1]
                    ZT[i] = c * zi - s * zi1
                    ZT[i + 1] = s * zi + c * zi1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, (None if ZT is None else ZT.T)


def _native_eig(M, vectors):
    d, e, Q = tridiagonalize(M)
    vals, Z = tridiagonal_ql(d, e, Q if vectors else None)
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    if vectors:
        Z = Z[:, order]
    return vals, Z


def eig_sym(M, vectors: bool = True, method: str = "lapack") -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix, values ascending."""
    M = _check_square(M, "M")
    if method == "lapack":
        try:
            if vectors:
                vals, V = scipy.linalg.eigh(M, driver="ev", check_finite=True)
            else:
                vals = scipy.linalg.eigh(M, eigvals_only=True, driver="ev", check_finite=True)
                V = None
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(str(exc)) from exc
        except ValueError as exc:
            raise InvalidArgumentError(str(exc)) from exc
    elif method == "native":
        if not np.all(np.isfinite(M)):
            raise InvalidArgumentError("matrix contains non-finite entries")
        vals, V = _native_eig(M, vectors)
    else:
        raise InvalidArgumentError(f"unknown eigensolver method {method!r}")
    return EigenDecomposition(values=np.asarray(vals), vectors=V, b_norm=False)


def eig_gsym(M, B, vectors: bool = True, method: str = "lapack") -> EigenDecomposition:
    """Eigenpairs of the pencil M v = theta B v with B symmetric positive definite."""
    M = _check_square(M, "M")
    B = _check_square(B, "B")
    if M.shape != B.shape:
        raise InvalidArgumentError(f"pencil dimensions differ: {M.shape} vs {B.shape}")
    L = cholesky(B)
    X = scipy.linalg.solve_triangular(L, M, lower=True)
    C = scipy.linalg.solve_triangular(L, X.T, lower=True)
    C = 0.5 * (C + C.T)
    dec = eig_sym(C, vectors=vectors, method=method)
    V = None
    if vectors:
        V = scipy.linalg.solve_triangular(L, dec.vectors, lower=True, trans="T")
    return EigenDecomposition(values=dec.values, vectors=V, b_norm=vectors)
