"""Uniform meshes, cubic Hermite elements and Gauss-Legendre rules on [0, 1]."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, UnsupportedDegreeError

MAX_QUADRATURE_DEGREE = 30


@dataclass(frozen=True)
class Mesh:
    """Equispaced partition of [-L, L] into ``n`` elements.

    Global dofs are numbered node by node, (value, slope) per node. The value
    dofs at x = +-L are always dropped (Dirichlet condition). The slope dofs
    there are kept unless ``boundary_slopes`` is false, in which case the trial
    space also forces u'(+-L) = 0.
    """

    L: float
    n: int
    h: float
    nodes: np.ndarray = field(repr=False)
    boundary_slopes: bool = True

    @property
    def ndof(self) -> int:
        return 2 * self.n if self.boundary_slopes else 2 * (self.n - 1)

    def node_dofs(self, node: int) -> list[int]:
        """(value, slope) global indices at ``node``; -1 marks a dropped dof."""
        if self.boundary_slopes:
            if node == 0:
                return [-1, 0]
            if node == self.n:
                return [-1, 2 * self.n - 1]
            return [2 * node - 1, 2 * node]
        if node == 0 or node == self.n:
            return [-1, -1]
        return [2 * (node - 1), 2 * (node - 1) + 1]

    def element_dofs(self, l: int) -> list[int]:
        """Global dof indices of element ``l`` (0-based), local order (v0, s0, v1, s1)."""
        return self.node_dofs(l) + self.node_dofs(l + 1)


def make_mesh(L: float, n: int, boundary_slopes: bool = True) -> Mesh:
    if not np.isfinite(L) or L <= 0:
        raise InvalidArgumentError(f"box half-length must be positive, got {L!r}")
    if int(n) != n or n < 2:
        raise InvalidArgumentError(f"element count must be an integer >= 2, got {n!r}")
    n = int(n)
    L = float(L)
    h = 2.0 * L / n
    nodes = -L + h * np.arange(n + 1, dtype=float)
    nodes[-1] = L
    nodes.setflags(write=False)
    return Mesh(L=L, n=n, h=h, nodes=nodes, boundary_slopes=bool(boundary_slopes))


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.points)))


def gauss_rule(exact_degree: int) -> QuadratureRule:
    """Gauss-Legendre rule on [0, 1] exact for polynomials of degree ``exact_degree``."""
    if int(exact_degree) != exact_degree or exact_degree < 0:
        raise InvalidArgumentError(f"exact degree must be a non-negative integer, got {exact_degree!r}")
    if exact_degree > MAX_QUADRATURE_DEGREE:
        raise UnsupportedDegreeError(
            f"quadrature of exact degree {exact_degree} requested; "
            f"at most {MAX_QUADRATURE_DEGREE} is supported"
        )
    npts = (int(exact_degree) + 2) // 2
    x, w = np.polynomial.legendre.leggauss(npts)
    points = 0.5 * (x + 1.0)
    weights = 0.5 * w
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(points=points, weights=weights, exact_degree=int(exact_degree))


@dataclass(frozen=True)
class HermiteElement:
    """C1 cubic Hermite element of width ``h``.

    Local dofs are ordered (value left, slope left, value right, slope right).
    Slopes are physical derivatives, so H2 and H4 carry a factor ``h``.
    """

    h: float

    def basis(self, s, derivative_order: int = 0) -> np.ndarray:
        """Shape functions (or x-derivatives) at ``s``; shape ``s.shape + (4,)``."""
        s = np.asarray(s, dtype=float)
        h = self.h
        if derivative_order == 0:
            s2, s3 = s * s, s * s * s
            cols = (1 - 3 * s2 + 2 * s3, h * (s - 2 * s2 + s3), 3 * s2 - 2 * s3, h * (s3 - s2))
        elif derivative_order == 1:
            s2 = s * s
            cols = (
                (-6 * s + 6 * s2) / h,
                1 - 4 * s + 3 * s2,
                (6 * s - 6 * s2) / h,
                3 * s2 - 2 * s,
            )
        elif derivative_order == 2:
            cols = (
                (-6 + 12 * s) / h**2,
                (-4 + 6 * s) / h,
                (6 - 12 * s) / h**2,
                (6 * s - 2) / h,
            )
        else:
            raise InvalidArgumentError(f"derivative order must be 0, 1 or 2, got {derivative_order!r}")
        return np.stack(np.broadcast_arrays(*cols), axis=-1)


def eval_basis(element: HermiteElement, s: float, derivative_order: int = 0) -> np.ndarray:
    if not 0.0 <= s <= 1.0:
        raise InvalidArgumentError(f"reference coordinate must lie in [0, 1], got {s!r}")
    return element.basis(s, derivative_order)


def evaluate(mesh: Mesh, coeffs: np.ndarray, x, derivative_order: int = 0, side: str = "right") -> np.ndarray:
    """Evaluate the global Hermite function with dof vector ``coeffs`` at points ``x``.

    At a node, ``side`` picks the element on which the point is evaluated
    ("left" uses the element ending there), so one-sided limits can be compared.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    coeffs = np.asarray(coeffs, dtype=float)
    full = np.concatenate([coeffs, [0.0]])  # index -1 -> dropped dof -> 0
    el = HermiteElement(mesh.h)
    pos = (x + mesh.L) / mesh.h
    if side == "left":
        idx = np.ceil(pos).astype(int) - 1
    else:
        idx = np.floor(pos).astype(int)
    idx = np.clip(idx, 0, mesh.n - 1)
    s = pos - idx
    # snap points that sit on a node so endpoint values are exact
    on_node = np.abs(pos - np.round(pos)) < 1e-10
    s[on_node] = (np.round(pos) - idx)[on_node]
    vals = el.basis(s, derivative_order)
    dofs = np.array([mesh.element_dofs(l) for l in idx]).reshape(len(idx), 4)
    return np.einsum("ij,ij->i", vals, full[dofs])
