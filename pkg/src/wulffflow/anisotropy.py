"""Surface energy density and the curvatures of its equilibrium shape.

The energy density is the one-parameter family ``gamma(nu3) = 1 + epsilon * nu3**2``
where ``nu3`` is the vertical component of the unit surface normal.  The
equilibrium (Wulff) shape of such a density is a convex surface of revolution;
its two principal curvatures ``mu1`` (meridian direction) and ``mu2``
(azimuthal direction) are the weights that enter the weighted mean curvature
of the evolving drop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AnisotropyModel",
    "gamma",
    "gamma_d1",
    "gamma_d2",
    "mu1",
    "mu2",
    "check_convexity",
    "check_curvature_condition",
    "cahn_hoffman",
]

# Open interval of epsilon for which both reciprocal curvatures
# 1/mu2 = 1 - eps*nu3^2 and 1/mu1 = 1 + 2*eps - 3*eps*nu3^2 stay positive
# on nu3 in [-1, 1].
_EPS_MIN = -0.5
_EPS_MAX = 1.0


@dataclass(frozen=True)
class AnisotropyModel:
    """Quadratic-in-normal surface energy density with strength ``epsilon``.

    ``epsilon = 0`` is the isotropic case (spherical equilibrium shape).
    The constructor rejects ``epsilon`` outside ``(-1/2, 1)``: beyond that
    open interval the equilibrium shape loses uniform convexity and the
    implicit operator of the flow scheme loses ellipticity.
    """

    epsilon: float

    def __post_init__(self):
        eps = float(self.epsilon)
        if not (_EPS_MIN < eps < _EPS_MAX):
            raise ValueError(
                f"epsilon={eps} outside the uniformly convex range "
                f"({_EPS_MIN}, {_EPS_MAX})"
            )
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def isotropic(cls) -> "AnisotropyModel":
        return cls(0.0)


def _checked_nu3(nu3):
    arr = np.asarray(nu3, dtype=float)
    if np.any(np.abs(arr) > 1.0 + 1e-12):
        raise ValueError("nu3 must lie in [-1, 1]")
    return arr


def _scalar_like(result, nu3):
    if np.isscalar(nu3) or np.ndim(nu3) == 0:
        return float(result)
    return result


def gamma(model: AnisotropyModel, nu3):
    """Energy density ``1 + epsilon * nu3**2``."""
    v = _checked_nu3(nu3)
    return _scalar_like(1.0 + model.epsilon * v * v, nu3)


def gamma_d1(model: AnisotropyModel, nu3):
    """First derivative of the density with respect to ``nu3``."""
    v = _checked_nu3(nu3)
    return _scalar_like(2.0 * model.epsilon * v, nu3)


def gamma_d2(model: AnisotropyModel, nu3):
    """Second derivative of the density with respect to ``nu3`` (constant)."""
    v = _checked_nu3(nu3)
    return _scalar_like(2.0 * model.epsilon * np.ones_like(v), nu3)


def mu2(model: AnisotropyModel, nu3):
    """Azimuthal principal curvature of the equilibrium shape.

    Computed from ``1/mu2 = gamma - nu3 * gamma'``, which for the quadratic
    family reduces to ``1/(1 - epsilon * nu3**2)``.
    """
    v = _checked_nu3(nu3)
    inv = gamma(model, v) - v * gamma_d1(model, v)
    return _scalar_like(1.0 / inv, nu3)


def mu1(model: AnisotropyModel, nu3):
    """Meridian principal curvature of the equilibrium shape.

    Computed from ``1/mu1 = (1 - nu3**2) * gamma'' + 1/mu2``, which reduces
    to ``1/(1 + 2*epsilon - 3*epsilon*nu3**2)``.
    """
    v = _checked_nu3(nu3)
    inv = (1.0 - v * v) * gamma_d2(model, v) + (
        gamma(model, v) - v * gamma_d1(model, v)
    )
    return _scalar_like(1.0 / inv, nu3)


def check_convexity(epsilon: float, samples: int = 2001) -> bool:
    """Whether both reciprocal curvatures stay strictly positive.

    Scans ``nu3`` on a uniform grid including both endpoints; accepts a raw
    ``epsilon`` (possibly outside the constructible range) so it can be used
    as the admissibility test itself.
    """
    v = np.linspace(-1.0, 1.0, samples)
    inv_mu2 = 1.0 - epsilon * v * v
    inv_mu1 = inv_mu2 + 2.0 * epsilon * (1.0 - v * v)
    return bool(inv_mu2.min() > 0.0 and inv_mu1.min() > 0.0)


def check_curvature_condition(epsilon: float, samples: int = 2001) -> bool:
    """Whether ``nu3 * d(mu1)/d(nu3) >= 0`` everywhere on the convex model.

    This is the monotone-curvature condition on the upper half of the
    equilibrium shape.  Checked numerically on a grid; for the quadratic
    family it is equivalent to ``epsilon >= 0``.
    """
    if not check_convexity(epsilon):
        raise ValueError(f"epsilon={epsilon} is not uniformly convex")
    model = AnisotropyModel(epsilon) if _EPS_MIN < epsilon < _EPS_MAX else None
    v = np.linspace(-1.0, 1.0, samples)
    if model is None:  # pragma: no cover - convexity already guarantees range
        return False
    m1 = mu1(model, v)
    dm1 = np.gradient(m1, v)
    return bool(np.min(v * dm1) >= -1e-10)


def cahn_hoffman(model: AnisotropyModel, nu) -> np.ndarray:
    """Position on the equilibrium shape associated with a unit normal ``nu``.

    Returns ``(1/mu2) * nu + gamma'(nu3) * e3``.  Diagnostic use only; the
    dot product with ``nu`` recovers the energy density (support function
    property).
    """
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (3,):
        raise ValueError("nu must be a 3-vector")
    if abs(np.linalg.norm(nu) - 1.0) > 1e-10:
        raise ValueError("nu must be a unit vector")
    nu3 = nu[2]
    out = nu / mu2(model, nu3)
    out[2] += gamma_d1(model, nu3)
    return out
