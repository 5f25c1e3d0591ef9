"""Form matrices of A = -d^2/dx^2 + V(x) over the global Hermite basis.

A0[j, k] = <b_j, b_k>, A1[j, k] = <A b_j, b_k>, A2[j, k] = <A b_j, A b_k>.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, UnsupportedDegreeError
from .mesh import MAX_QUADRATURE_DEGREE, HermiteElement, Mesh, gauss_rule

BANDWIDTH = 3

NAMED_POTENTIALS = {
    "harmonic": (0.0, 0.0, 1.0),
    "anharmonic": (0.0, 0.0, 0.0, 0.0, 1.0),
    "free": (0.0,),
}


@dataclass(frozen=True)
class Potential:
    """Polynomial potential with ascending-power ``coefficients``."""

    coefficients: tuple[float, ...]
    lower_bound_hint: float | None = None
    name: str | None = None

    def __post_init__(self):
        c = tuple(float(v) for v in self.coefficients)
        if not c:
            c = (0.0,)
        if not all(np.isfinite(c)):
            raise InvalidArgumentError("potential coefficients must be finite")
        # strip trailing zeros so degree is the last non-zero index
        while len(c) > 1 and c[-1] == 0.0:
            c = c[:-1]
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_spec(cls, spec) -> Potential:
        """Build from a name ("harmonic", "anharmonic", "free") or a coefficient list."""
        if isinstance(spec, Potential):
            return spec
        if isinstance(spec, str):
            key = spec.strip().lower()
            if key in NAMED_POTENTIALS:
                # all named potentials are non-negative
                return cls(NAMED_POTENTIALS[key], lower_bound_hint=0.0, name=key)
            try:
                coeffs = [float(v) for v in key.split(",") if v.strip()]
            except ValueError:
                raise InvalidArgumentError(
                    f"unknown potential {spec!r}; use harmonic, anharmonic or a coefficient list"
                ) from None
            return cls(tuple(coeffs))
        return cls(tuple(spec))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c in reversed(self.coefficients):
            out = out * x + c
        return out

    def label(self) -> str:
        return self.name or ",".join(repr(c) for c in self.coefficients)


@dataclass(frozen=True)
class FormMatrices:
    A0: np.ndarray = field(repr=False)
    A1: np.ndarray = field(repr=False)
    A2: np.ndarray = field(repr=False)
    mesh: Mesh | None = None
    potential: Potential | None = None

    @property
    def N(self) -> int:
        return self.A0.shape[0]


@dataclass(frozen=True)
class ShiftedForms:
    t: float
    A1t: np.ndarray = field(repr=False)
    A2t: np.ndarray = field(repr=False)


def quadrature_degree(potential: Potential) -> int:
    # V^2 * u * v with cubic u, v dominates the integrand degree
    return 6 + 2 * potential.degree


def _symmetrize(M):
    return 0.5 * (M + M.T)


def element_matrices(potential: Potential, mesh: Mesh):
    """Local 4x4 matrices for every element, each of shape (n, 4, 4)."""
    deg = quadrature_degree(potential)
    if deg > MAX_QUADRATURE_DEGREE:
        raise UnsupportedDegreeError(
            f"potential of degree {potential.degree} needs quadrature degree {deg} "
            f"(max {MAX_QUADRATURE_DEGREE})"
        )
    rule = gauss_rule(deg)
    el = HermiteElement(mesh.h)
    B0 = el.basis(rule.points, 0)
    B1 = el.basis(rule.points, 1)
    B2 = el.basis(rule.points, 2)
    w = rule.weights * mesh.h

    x = mesh.nodes[:-1, None] + mesh.h * rule.points[None, :]
    V = potential(x)

    m00 = np.einsum("q,qa,qb->ab", w, B0, B0)
    m11 = np.einsum("q,qa,qb->ab", w, B1, B1)
    m22 = np.einsum("q,qa,qb->ab", w, B2, B2)
    v00 = np.einsum("eq,q,qa,qb->eab", V, w, B0, B0)
    vv00 = np.einsum("eq,q,qa,qb->eab", V * V, w, B0, B0)
    v20 = np.einsum("eq,q,qa,qb->eab", V, w, B2, B0)

    K0 = np.broadcast_to(m00, (mesh.n, 4, 4))
    K1 = m11[None] + v00
    K2 = m22[None] - (v20 + v20.transpose(0, 2, 1)) + vv00
    return K0, K1, K2


def _scatter(mesh: Mesh, local: np.ndarray) -> np.ndarray:
    N = mesh.ndof
    M = np.zeros((N, N))
    # fixed left-to-right element order keeps summation deterministic
    for l in range(mesh.n):
        dofs = mesh.element_dofs(l)
        keep = [a for a, d in enumerate(dofs) if d >= 0]
        idx = [dofs[a] for a in keep]
        M[np.ix_(idx, idx)] += local[l][np.ix_(keep, keep)]
    return M


def assemble(potential, mesh: Mesh) -> FormMatrices:
    potential = Potential.from_spec(potential)
    K0, K1, K2 = element_matrices(potential, mesh)
    A0 = _symmetrize(_scatter(mesh, K0))
    A1 = _symmetrize(_scatter(mesh, K1))
    A2 = _symmetrize(_scatter(mesh, K2))
    return FormMatrices(A0=A0, A1=A1, A2=A2, mesh=mesh, potential=potential)


def shift(forms: FormMatrices, t: float) -> ShiftedForms:
    t = float(t)
    A1t = forms.A1 - t * forms.A0
    A2t = forms.A2 - 2.0 * t * forms.A1 + (t * t) * forms.A0
    return ShiftedForms(t=t, A1t=_symmetrize(A1t), A2t=_symmetrize(A2t))


def write_matrix(path, M: np.ndarray) -> None:
    """Sparse text dump: header "N N nnz", then 1-based "row col value" lines, row-major."""
    M = np.asarray(M)
    rows, cols = np.nonzero(M)
    with open(path, "w") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]} {len(rows)}\n")
        for r, c in zip(rows, cols):
            fh.write(f"{r + 1} {c + 1} {M[r, c]:.17g}\n")


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        nr, nc, nnz = (int(v) for v in fh.readline().split())
        M = np.zeros((nr, nc))
        for _ in range(nnz):
            r, c, v = fh.readline().split()
            M[int(r) - 1, int(c) - 1] = float(v)
    return M
