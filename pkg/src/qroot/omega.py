"""The omega embedding of quaternion matrices into 2n x 2n complex matrices.

omega(A) = [[A1, conj(A2)], [-A2, conj(A1)]] for A = A1 + j*A2.  Its image
Omega_2n is exactly the set of M with M K = K conj(M), where
K = [[0, I], [-I, 0]]; the antilinear map chi(v) = K conj(v) plays the role
of right multiplication by j and drives every structure-preserving step in
the canonicalization.
"""

from __future__ import annotations

import numpy as np

from .errors import (DimensionMismatch, NotHermitian, NotInOmega,
                     OddDimension, ParseError, Singular)
from .quaternion import QuatMatrix

MEMBERSHIP_FACTOR = 1e-10  # default tau_Omega = factor * max(1, inf-norm)


class OmegaMatrix:
    """2n x 2n complex matrix constrained to the quaternionic subalgebra."""

    __slots__ = ("array",)

    def __init__(self, array: np.ndarray, check: bool = True, tol: float | None = None):
        array = np.asarray(array, dtype=complex)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise DimensionMismatch("OmegaMatrix expects a square array")
        if array.shape[0] % 2:
            raise OddDimension("OmegaMatrix dimension must be even")
        if check:
            res = omega_membership(array)
            if tol is None:
                tol = membership_tolerance(array)
            if res > tol:
                raise NotInOmega(f"membership residual {res:.3e} exceeds {tol:.3e}")
        self.array = array

    @property
    def half_n(self) -> int:
        return self.array.shape[0] // 2

    @property
    def dim(self) -> int:
        return self.array.shape[0]

    def to_json(self) -> dict:
        return complex_to_json(self.array)

    @staticmethod
    def from_json(obj: dict) -> "OmegaMatrix":
        return OmegaMatrix(complex_from_json(obj))

    def __repr__(self) -> str:
        return f"OmegaMatrix(2n={self.dim})"


def complex_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "dim": m.shape[0],
        "re": [float(v) for v in m.real.ravel()],
        "im": [float(v) for v in m.imag.ravel()],
    }


def complex_from_json(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad complex matrix JSON: {exc}") from exc
    if re.size != dim * dim or im.size != dim * dim:
        raise ParseError("complex matrix JSON needs dim*dim re and im values")
    return (re + 1j * im).reshape(dim, dim)


def membership_tolerance(m: np.ndarray, factor: float = MEMBERSHIP_FACTOR) -> float:
    m = np.asarray(m)
    scale = np.max(np.abs(m)) if m.size else 0.0
    return factor * max(1.0, float(scale))


def omega_embed(a: QuatMatrix) -> OmegaMatrix:
    """Map A = A1 + j*A2 to [[A1, conj(A2)], [-A2, conj(A1)]]."""
    if a.n_rows != a.n_cols:
        raise DimensionMismatch("omega_embed expects a square matrix")
    a1, a2 = a.a1, a.a2
    top = np.hstack([a1, np.conj(a2)])
    bot = np.hstack([-a2, np.conj(a1)])
    return OmegaMatrix(np.vstack([top, bot]), check=False)


def _blocks(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n = m.shape[0] // 2
    return m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:]


def _nearest_member(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Average the two determining blocks of each of A1 and A2."""
    b11, b12, b21, b22 = _blocks(m)
    a1 = 0.5 * (b11 + np.conj(b22))
    a2 = 0.5 * (np.conj(b12) - b21)
    return a1, a2


def omega_membership(m: np.ndarray) -> float:
    """Max entrywise deviation from the nearest matrix in Omega_2n."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch("omega_membership expects a square matrix")
    if m.shape[0] % 2:
        raise OddDimension("omega_membership needs even dimension")
    a1, a2 = _nearest_member(m)
    top = np.hstack([a1, np.conj(a2)])
    bot = np.hstack([-a2, np.conj(a1)])
    nearest = np.vstack([top, bot])
    return float(np.max(np.abs(m - nearest))) if m.size else 0.0


def omega_extract(m, tol: float | None = None) -> QuatMatrix:
    """Inverse of omega_embed; symmetrizes roundoff inside the tolerance."""
    arr = m.array if isinstance(m, OmegaMatrix) else np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch("omega_extract expects a square matrix")
    if arr.shape[0] % 2:
        raise OddDimension("omega_extract needs even dimension")
    if tol is None:
        tol = membership_tolerance(arr)
    res = omega_membership(arr)
    if res > tol:
        raise NotInOmega(f"membership residual {res:.3e} exceeds {tol:.3e}")
    a1, a2 = _nearest_member(arr)
    return QuatMatrix.from_complex_pair(a1, a2)


def selfadjoint_residual(h, a, cond_threshold: float = 1e12) -> float:
    """||HA - A*H||_F / max(1, ||H||_F * ||A||_F) for Hermitian invertible H."""
    h = h.array if isinstance(h, OmegaMatrix) else np.asarray(h, dtype=complex)
    a = a.array if isinstance(a, OmegaMatrix) else np.asarray(a, dtype=complex)
    if h.shape != a.shape or h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch("H and A must be square with equal shape")
    hn = np.linalg.norm(h)
    if np.linalg.norm(h - h.conj().T) > 1e-10 * max(1.0, hn):
        raise NotHermitian("H is not Hermitian at working tolerance")
    sv = np.linalg.svd(h, compute_uv=False)
    if sv[-1] * cond_threshold <= max(1.0, sv[0]):
        raise Singular("H condition estimate beyond threshold")
    num = np.linalg.norm(h @ a - a.conj().T @ h)
    return float(num / max(1.0, hn * np.linalg.norm(a)))


# -- quaternionic structure helpers (used by the canonicalization) -----------

def structure_matrix(half_n: int) -> np.ndarray:
    """K = [[0, I], [-I, 0]]; M is in Omega_2n iff M K = K conj(M)."""
    k = np.zeros((2 * half_n, 2 * half_n))
    k[:half_n, half_n:] = np.eye(half_n)
    k[half_n:, :half_n] = -np.eye(half_n)
    return k


def chi(v: np.ndarray, k: np.ndarray | None = None) -> np.ndarray:
    """Antilinear partner map chi(v) = K conj(v); chi(chi(v)) = -v."""
    v = np.asarray(v, dtype=complex)
    if k is None:
        k = structure_matrix(v.shape[0] // 2)
    return k @ np.conj(v)


# Quaternion scalars as complex pairs (q1, q2) meaning q1 + j*q2.

def qs_mul(p: tuple[complex, complex], q: tuple[complex, complex]) -> tuple[complex, complex]:
    p1, p2 = p
    q1, q2 = q
    return (p1 * q1 - np.conj(p2) * q2, np.conj(p1) * q2 + p2 * q1)


def qs_conj(q: tuple[complex, complex]) -> tuple[complex, complex]:
    return (np.conj(q[0]), -q[1])


def qs_abs(q: tuple[complex, complex]) -> float:
    return float(np.sqrt(abs(q[0]) ** 2 + abs(q[1]) ** 2))


def qs_inv(q: tuple[complex, complex]) -> tuple[complex, complex]:
    n2 = abs(q[0]) ** 2 + abs(q[1]) ** 2
    c = qs_conj(q)
    return (c[0] / n2, c[1] / n2)
