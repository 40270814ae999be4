"""Composite Gauss-Legendre quadrature and a banded direct solver.

The time-stepping system is 2N x 2N but, with the unknowns interleaved as
(r_1, r_2, d_2, r_3, d_3, ..., r_N, d_N, r_{N+1}), its bandwidth is 3 on
each side, so a banded LU factorization solves each step in O(N).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import SingularSystemError

__all__ = ["QuadratureRule", "integrate", "BandedSystem", "solve"]


# Nodes/weights on (-1, 1), 20 significant digits, small fixed rules only.
_GAUSS_TABLE = {
    1: ([0.0], [2.0]),
    2: (
        [-0.57735026918962576451, 0.57735026918962576451],
        [1.0, 1.0],
    ),
    3: (
        [-0.77459666924148337704, 0.0, 0.77459666924148337704],
        [0.55555555555555555556, 0.88888888888888888889, 0.55555555555555555556],
    ),
    4: (
        [
            -0.86113631159405257522,
            -0.33998104358485626480,
            0.33998104358485626480,
            0.86113631159405257522,
        ],
        [
            0.34785484513745385737,
            0.65214515486254614263,
            0.65214515486254614263,
            0.34785484513745385737,
        ],
    ),
    5: (
        [
            -0.90617984593866399280,
            -0.53846931010568309104,
            0.0,
            0.53846931010568309104,
            0.90617984593866399280,
        ],
        [
            0.23692688505618908751,
            0.47862867049936646804,
            0.56888888888888888889,
            0.47862867049936646804,
            0.23692688505618908751,
        ],
    ),
}


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on the reference interval (-1, 1)."""

    points_per_interval: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @classmethod
    def gauss_legendre(cls, points_per_interval: int) -> "QuadratureRule":
        n = int(points_per_interval)
        if n < 1:
            raise ValueError("need at least one quadrature point")
        if n in _GAUSS_TABLE:
            x, w = _GAUSS_TABLE[n]
            nodes = np.array(x, dtype=float)
            weights = np.array(w, dtype=float)
        else:
            nodes, weights = np.polynomial.legendre.leggauss(n)
        nodes.flags.writeable = False
        weights.flags.writeable = False
        return cls(n, nodes, weights)

    def mapped_points(self, breakpoints):
        """Quadrature abscissae and weights for the composite rule.

        Returns flat arrays (z, w) such that sum(w * f(z)) approximates the
        integral of f over [breakpoints[0], breakpoints[-1]].
        """
        bp = np.asarray(breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2 or np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        half = 0.5 * np.diff(bp)
        mid = 0.5 * (bp[:-1] + bp[1:])
        z = mid[:, None] + half[:, None] * self.nodes[None, :]
        w = half[:, None] * self.weights[None, :]
        return z.ravel(), w.ravel()


def integrate(rule: QuadratureRule, f, breakpoints) -> float:
    """Composite Gauss-Legendre integral of ``f`` over the breakpoints.

    ``f`` must accept a numpy array of abscissae.  np.sum uses pairwise
    summation, which keeps the accumulated rounding benign.
    """
    z, w = rule.mapped_points(breakpoints)
    return float(np.sum(w * np.asarray(f(z), dtype=float)))


@dataclass
class BandedSystem:
    """Square banded linear system in LAPACK ``ab`` storage.

    ``ab[u + i - j, j]`` holds the matrix entry ``(i, j)``; ``lower`` and
    ``upper`` are the sub-/super-diagonal counts.
    """

    dimension: int
    lower: int
    upper: int
    ab: np.ndarray
    rhs: np.ndarray

    @classmethod
    def zeros(cls, dimension: int, lower: int, upper: int) -> "BandedSystem":
        return cls(
            dimension,
            lower,
            upper,
            np.zeros((lower + upper + 1, dimension)),
            np.zeros(dimension),
        )

    def to_dense(self) -> np.ndarray:
        n = self.dimension
        dense = np.zeros((n, n))
        for d in range(-self.lower, self.upper + 1):
            row = self.upper - d
            if d >= 0:
                idx = np.arange(n - d)
                dense[idx, idx + d] = self.ab[row, d:]
            else:
                idx = np.arange(-d, n)
                dense[idx, idx + d] = self.ab[row, : n + d]
        return dense

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        n = self.dimension
        y = np.zeros(n)
        for d in range(-self.lower, self.upper + 1):
            row = self.upper - d
            if d >= 0:
                y[: n - d] += self.ab[row, d:] * x[d:]
            else:
                y[-d:] += self.ab[row, : n + d] * x[: n + d]
        return y


def solve(system: BandedSystem, check_residual: bool = True) -> np.ndarray:
    """Direct banded LU solve with a max-norm residual verification."""
    try:
        x = scipy.linalg.solve_banded(
            (system.lower, system.upper), system.ab, system.rhs
        )
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise SingularSystemError(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("solver produced non-finite values")
    if check_residual:
        resid = np.max(np.abs(system.matvec(x) - system.rhs))
        scale = max(np.max(np.abs(system.rhs)), 1e-300)
        if resid / scale > 1e-10:
            raise SingularSystemError(
                f"relative residual {resid / scale:.3e} exceeds 1e-10"
            )
    return x
