"""Biholomorphic geometry of the operator ball.

The open unit ball of n_plus x n_minus matrices carries a transitive action
by fractional-linear maps coming from J-unitary operators; the Mobius maps
``mu_A`` (with ``mu_A(0) = A``) generate that action together with the
block-diagonal unitaries, and ``rho(A, B) = atanh ||mu_{-A}(B)||`` is the
invariant hyperbolic distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spaces import IndefiniteSpace, operator_norm, _mat

__all__ = [
    "BoundaryError",
    "MapUndefinedError",
    "MobiusNormBounds",
    "mobius_apply",
    "mobius_matrix",
    "fractional_linear",
    "hyperbolic_distance",
    "mobius_norm",
    "radius_from_norm",
]

#: Centers this close to the unit sphere are rejected rather than regularized.
BOUNDARY_MARGIN = 1e-8

#: Floor below which eigenvalues of I - A^H A indicate a boundary point.
SQRT_EIG_FLOOR = 1e-14

#: Condition-number guard for the fractional-linear denominator.
DENOM_COND_LIMIT = 1e12


class BoundaryError(ValueError):
    """Raised when a strict-ball operation receives a point on/near the sphere."""


class MapUndefinedError(ValueError):
    """Raised when the fractional-linear denominator is singular."""


def _check_ball_shape(space: IndefiniteSpace, w, name: str) -> np.ndarray:
    m = _mat(w)
    expected = (space.n_plus, space.n_minus)
    if m.shape != expected:
        raise ValueError(f"{name} must be {expected}, got {m.shape}")
    return m


def _check_strict(space: IndefiniteSpace, w, name: str) -> np.ndarray:
    m = _check_ball_shape(space, w, name)
    if operator_norm(m) >= 1.0 - BOUNDARY_MARGIN:
        raise BoundaryError(
            f"{name} has norm {operator_norm(m):.8g}; needs to stay inside the open ball"
        )
    return m


def _herm_power(h: np.ndarray, power: float) -> np.ndarray:
    """Power of a Hermitian PD matrix via eigendecomposition, with a floor guard."""
    if h.shape[0] == 0:
        return h.copy()
    sym = (h + h.conj().T) / 2.0
    eigs, vecs = np.linalg.eigh(sym)
    if np.min(eigs) < SQRT_EIG_FLOOR:
        raise BoundaryError("matrix power undefined: factor is not safely positive")
    return (vecs * eigs**power) @ vecs.conj().T


def mobius_apply(space: IndefiniteSpace, center, x) -> np.ndarray:
    """mu_A(X) = (I - AA^H)^{-1/2} (A + X) (I + A^H X)^{-1} (I - A^H A)^{1/2}.

    Both arguments must lie strictly inside the ball; then ``I + A^H X`` is
    invertible and the image stays strictly inside.
    """
    a = _check_strict(space, center, "center")
    xm = _check_ball_shape(space, x, "argument")
    if operator_norm(xm) >= 1.0:
        raise BoundaryError(
            f"argument has norm {operator_norm(xm):.8g}; needs to stay inside the open ball"
        )
    k_minus = np.eye(space.n_minus, dtype=complex)
    k_plus = np.eye(space.n_plus, dtype=complex)
    left = _herm_power(k_plus - a @ a.conj().T, -0.5)
    right = _herm_power(k_minus - a.conj().T @ a, 0.5)
    denom = k_minus + a.conj().T @ xm
    return left @ (a + xm) @ np.linalg.solve(denom, right)


def mobius_matrix(space: IndefiniteSpace, center) -> np.ndarray:
    """The J-unitary block matrix M_A generating mu_A, in (H-, H+) order.

    ``M_A = [[(I - A^H A)^{-1/2}, A^H (I - A A^H)^{-1/2}],
             [A (I - A^H A)^{-1/2}, (I - A A^H)^{-1/2}]]``
    """
    a = _check_strict(space, center, "center")
    s = _herm_power(np.eye(space.n_minus, dtype=complex) - a.conj().T @ a, -0.5)
    t = _herm_power(np.eye(space.n_plus, dtype=complex) - a @ a.conj().T, -0.5)
    return space.assemble(s, a.conj().T @ t, a @ s, t)


def fractional_linear(space: IndefiniteSpace, u, w) -> np.ndarray:
    """phi_U(W) = (U21 + U22 W)(U11 + U12 W)^{-1}.

    Defined whenever the denominator is well conditioned; for J-unitary U it
    maps the closed ball into itself.
    """
    wm = _check_ball_shape(space, w, "argument")
    u11, u12, u21, u22 = space.blocks(u)
    denom = u11 + u12 @ wm
    if space.n_minus > 0 and np.linalg.cond(denom) > DENOM_COND_LIMIT:
        raise MapUndefinedError("map undefined at W: singular denominator block")
    numer = u21 + u22 @ wm
    if space.n_minus == 0:
        return np.zeros((space.n_plus, 0), dtype=complex)
    return np.linalg.solve(denom.T, numer.T).T


def hyperbolic_distance(space: IndefiniteSpace, a, b) -> float:
    """rho(A, B) = atanh ||mu_{-A}(B)||, the invariant (Caratheodory) distance."""
    am = _check_strict(space, a, "first point")
    bm = _check_strict(space, b, "second point")
    gap = operator_norm(mobius_apply(space, -am, bm))
    gap = min(gap, 1.0 - 1e-16)
    return float(np.arctanh(gap))


@dataclass(frozen=True)
class MobiusNormBounds:
    """||M_A|| together with its closed-form lower and upper bounds."""

    norm: float
    lower_bound: float
    upper_bound: float


def mobius_norm(space: IndefiniteSpace, center) -> MobiusNormBounds:
    """Spectral norm of M_A sandwiched by its closed-form bounds.

    With r = ||A||: sqrt((1 + r^2)/(1 - r^2)) <= ||M_A|| <= sqrt((1 + r)/(1 - r)).
    """
    a = _check_strict(space, center, "center")
    r = operator_norm(a)
    norm = operator_norm(mobius_matrix(space, a))
    lower = float(np.sqrt((1.0 + r * r) / (1.0 - r * r)))
    upper = float(np.sqrt((1.0 + r) / (1.0 - r)))
    return MobiusNormBounds(norm=norm, lower_bound=lower, upper_bound=upper)


def radius_from_norm(c: float) -> float:
    """sqrt((C^2 - 1)/(C^2 + 1)): how far from 0 a J-unitary of norm C can move it."""
    c = float(c)
    if c < 1.0:
        raise ValueError("operator norm of a J-unitary is at least 1")
    return float(np.sqrt((c * c - 1.0) / (c * c + 1.0)))
