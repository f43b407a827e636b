"""Dense complex linear algebra on Z/2-graded spaces.

Everything is plain numpy in double precision.  Helpers never mutate their
arguments; returned arrays are fresh.  The grading convention throughout is
diag(+1, ..., +1, -1, ..., -1) with the even block first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "DEFAULT_TOL",
    "GradedSpace",
    "NonHermitianError",
    "Parity",
    "ParityError",
    "as_matrix",
    "frob",
    "graded_right_factor",
    "hermitian_eigen",
    "kron",
    "kron_all",
    "matrix_from_json",
    "matrix_to_json",
    "opnorm",
    "parity_of",
    "supertrace",
]

DEFAULT_TOL = 1e-10
PARITY_TOL = 1e-12


class NonHermitianError(ValueError):
    """The operation requires a Hermitian matrix and the input is not one."""


class ParityError(ValueError):
    """A matrix fails a required evenness or oddness constraint."""


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    MIXED = "mixed"


def as_matrix(m) -> np.ndarray:
    """Coerce to a 2-d complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {a.shape}")
    return a


def frob(m) -> float:
    return float(np.linalg.norm(m))


def opnorm(m) -> float:
    """Operator (largest singular value) norm."""
    return float(np.linalg.norm(as_matrix(m), 2))


@dataclass(frozen=True)
class GradedSpace:
    """Finite-dimensional graded Hilbert space C^{p|q}, even vectors first."""

    dim_even: int
    dim_odd: int

    def __post_init__(self):
        if self.dim_even < 0 or self.dim_odd < 0:
            raise ValueError("dimensions must be non-negative")
        if self.dim_even + self.dim_odd == 0:
            raise ValueError("total dimension must be positive")

    @property
    def dim(self) -> int:
        return self.dim_even + self.dim_odd

    @cached_property
    def gamma_diag(self) -> np.ndarray:
        g = np.ones(self.dim)
        g[self.dim_even:] = -1.0
        g.setflags(write=False)
        return g

    @cached_property
    def gamma(self) -> np.ndarray:
        g = np.diag(self.gamma_diag).astype(np.complex128)
        g.setflags(write=False)
        return g

    def supertrace(self, x) -> complex:
        return supertrace(x, self.gamma_diag)


def _gamma_diag_of(space_or_gamma) -> np.ndarray:
    if isinstance(space_or_gamma, GradedSpace):
        return space_or_gamma.gamma_diag
    g = np.asarray(space_or_gamma)
    if g.ndim == 2:
        return np.real(np.diagonal(g))
    return np.real(g)


def supertrace(x, gamma) -> complex:
    """trace(gamma @ x) for a grading operator given as matrix or diagonal."""
    a = as_matrix(x)
    g = _gamma_diag_of(gamma)
    if g.size != a.shape[0]:
        raise ValueError("grading and matrix dimensions disagree")
    return complex(np.sum(g * np.diagonal(a)))


def parity_of(m, space_or_gamma, tol: float = PARITY_TOL) -> Parity:
    """Classify a matrix as even, odd, or mixed for the given grading."""
    a = as_matrix(m)
    g = _gamma_diag_of(space_or_gamma)
    conj = g[:, None] * a * g[None, :]
    scale = max(1.0, frob(a))
    if frob(conj - a) <= tol * scale:
        return Parity.EVEN
    if frob(conj + a) <= tol * scale:
        return Parity.ODD
    return Parity.MIXED


def hermitian_eigen(m, tol: float = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Returns (w, u) with m reconstructed by u @ diag(w) @ u^*.  Raises
    NonHermitianError when the anti-Hermitian part exceeds tol relative to
    the matrix norm.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if frob(a - a.conj().T) > tol * frob(a):
        raise NonHermitianError("matrix is not Hermitian within tolerance")
    w, u = np.linalg.eigh((a + a.conj().T) / 2.0)
    return w, u


def kron(a, b) -> np.ndarray:
    """Kronecker product, row-major block convention: (A (x) B)(C (x) D) = AC (x) BD."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats) -> np.ndarray:
    """Left-associated iterated Kronecker product.

    Fixing the association order makes repeated evaluation bitwise
    reproducible, so iterated products can be compared exactly.
    """
    mats = list(mats)
    if not mats:
        raise ValueError("need at least one factor")
    out = as_matrix(mats[0])
    for m in mats[1:]:
        out = np.kron(out, as_matrix(m))
    return out


def graded_right_factor(gamma1, x, gamma2=None, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Matrix realization of (1 tensor X) for an odd operator X on the right factor.

    The Koszul sign of the graded tensor product is absorbed into the first
    slot: the realization is kron(gamma1, X).  With this convention
    (Y tensor 1)(1 tensor X) picks up the correct anticommutation signs for
    odd Y on the left factor.  When gamma2 is supplied, X is checked to be
    odd for it.
    """
    g1 = _gamma_diag_of(gamma1)
    xm = as_matrix(x)
    if gamma2 is not None and parity_of(xm, gamma2, tol) is not Parity.ODD:
        raise ParityError("right tensor factor must be odd for its grading")
    return np.kron(np.diag(g1).astype(np.complex128), xm)


def matrix_to_json(m) -> dict:
    """Wire format: row-major list of [re, im] pairs plus explicit shape."""
    a = as_matrix(m)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in a.ravel(order="C")],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if rows < 0 or cols < 0 or len(data) != rows * cols:
        raise ValueError("matrix data length disagrees with declared shape")
    try:
        flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix entries: {exc}") from exc
    return flat.reshape(rows, cols)
