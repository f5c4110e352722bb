"""Invariant maximal non-positive subspaces of J-dissipative matrices.

The solver follows the finite-dimensional route: perturb the operator to
``A + itJ`` so that it becomes strongly J-dissipative (the imaginary parts
of all eigenvalues then stay at distance >= t from the real axis), take the
spectral subspace for the open lower half-plane (which is negative, hence a
graph over H-), and shrink t geometrically until the graph operator
certifies against the *original* matrix.  The certificate -- not the
sequence of iterates -- is the contract.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .spaces import (
    IndefiniteSpace,
    Inertia,
    NotAGraphError,
    PREDICATE_TOL,
    Subspace,
    _mat,
    dissipativity_form,
    graph_from_subspace,
    graph_of,
    invariance_residual,
    operator_norm,
    subspace_signature,
)

__all__ = [
    "NotDissipativeError",
    "SpectrumOnAxisError",
    "MnpsReport",
    "LadderLevel",
    "LadderReport",
    "VerifyReport",
    "strongify",
    "spectral_split",
    "mnps_strong",
    "mnps",
    "approximation_ladder",
    "verify_mnps",
]

#: Relative half-width of the spectral exclusion strip around the real axis.
AXIS_RTOL = 1e-12

#: Defaults for the regularization ladder.
DEFAULT_T0_SCALE = 1e-2
DEFAULT_SHRINK = 0.5
DEFAULT_TOL_RES = 1e-9
DEFAULT_MAX_ITER = 40


class NotDissipativeError(ValueError):
    """Raised when an operator fails the (strong) J-dissipativity precondition."""


class SpectrumOnAxisError(RuntimeError):
    """Raised when eigenvalues sit on the real axis and the split is undefined."""


@dataclass(frozen=True)
class MnpsReport:
    """Certificate for one invariant-MNPS computation.

    ``residual`` is always measured against the original input matrix.
    """

    w: np.ndarray
    residual: float
    w_norm: float
    subspace_inertia: Inertia
    regularization_t: float
    iterations: int
    certified: bool
    message: str = ""

    def as_dict(self) -> dict:
        from .serialization import matrix_to_json

        return {
            "w": matrix_to_json(self.w),
            "residual": self.residual,
            "w_norm": self.w_norm,
            "subspace_inertia": {
                "n_pos": self.subspace_inertia.n_pos,
                "n_neg": self.subspace_inertia.n_neg,
                "n_null": self.subspace_inertia.n_null,
            },
            "regularization_t": self.regularization_t,
            "iterations": self.iterations,
            "certified": self.certified,
            "message": self.message,
        }


@dataclass(frozen=True)
class LadderLevel:
    k_minus: int
    k_plus: int
    w_embedded: np.ndarray
    residual: float
    certified: bool
    delta_to_previous: float | None

    def as_dict(self) -> dict:
        return {
            "k_minus": self.k_minus,
            "k_plus": self.k_plus,
            "residual": self.residual,
            "certified": self.certified,
            "delta_to_previous": self.delta_to_previous,
        }


@dataclass(frozen=True)
class LadderReport:
    levels: tuple[LadderLevel, ...]
    final_w: np.ndarray
    final_report: MnpsReport

    @property
    def all_certified(self) -> bool:
        return all(lv.certified for lv in self.levels)

    def as_dict(self) -> dict:
        from .serialization import matrix_to_json

        return {
            "levels": [lv.as_dict() for lv in self.levels],
            "final_w": matrix_to_json(self.final_w),
            "final": self.final_report.as_dict(),
        }


@dataclass(frozen=True)
class VerifyReport:
    maximal_nonpositive: bool
    invariant: bool
    residual: float
    inertia: Inertia


def _dissipativity_margin(space: IndefiniteSpace, m: np.ndarray) -> float:
    return float(np.min(np.linalg.eigvalsh(dissipativity_form(space, m))))


def strongify(space: IndefiniteSpace, a, t: float) -> np.ndarray:
    """B = A + itJ; adds t to the smallest eigenvalue of the dissipativity form."""
    m = _mat(a)
    if t <= 0:
        raise ValueError("regularization parameter t must be positive")
    margin = _dissipativity_margin(space, m)
    if margin < -PREDICATE_TOL * max(1.0, operator_norm(m)):
        raise NotDissipativeError(
            f"operator is not J-dissipative (form margin {margin:.3e})"
        )
    return m + 1j * t * space.j


def _half_plane_basis(
    m: np.ndarray, lower: bool, tol_axis: float
) -> np.ndarray:
    """Orthonormal basis of the invariant subspace for Im(lambda) < 0 (or > 0)."""
    try:
        if lower:
            t, z, sdim = sla.schur(m, output="complex", sort=lambda lam: lam.imag < 0.0)
        else:
            t, z, sdim = sla.schur(m, output="complex", sort=lambda lam: lam.imag > 0.0)
    except sla.LinAlgError as exc:  # reordering failed: eigenvalues too entangled
        raise SpectrumOnAxisError(
            "spectrum could not be separated across the real axis; "
            "increase regularization"
        ) from exc
    eigs = np.diag(t)
    if eigs.size and np.min(np.abs(eigs.imag)) <= tol_axis:
        raise SpectrumOnAxisError(
            "spectrum touches real axis; increase regularization"
        )
    return z[:, :sdim]


def spectral_split(
    space: IndefiniteSpace, a, tol_axis: float | None = None
) -> tuple[Subspace, Subspace]:
    """Invariant subspaces for the lower / upper open half-planes.

    Fails with :class:`SpectrumOnAxisError` when some eigenvalue is within
    ``tol_axis`` of the real axis.
    """
    m = _mat(a)
    if m.shape != (space.n, space.n):
        raise ValueError(f"operator must be {space.n}x{space.n}, got {m.shape}")
    if tol_axis is None:
        tol_axis = AXIS_RTOL * max(1.0, operator_norm(m))
    z_minus = _half_plane_basis(m, True, tol_axis)
    z_plus = _half_plane_basis(m, False, tol_axis)
    if z_minus.shape[1] + z_plus.shape[1] != space.n:
        raise SpectrumOnAxisError(
            "spectrum touches real axis; increase regularization"
        )
    return Subspace(space, z_minus), Subspace(space, z_plus)


def _report_for(
    space: IndefiniteSpace, original, w, t, iterations, tol_res, scale=None
) -> MnpsReport:
    m = _mat(original)
    if scale is None:
        scale = max(1.0, operator_norm(m))
    res = invariance_residual(space, m, w)
    inertia = subspace_signature(space, graph_of(space, w))
    certified = res <= tol_res * scale and operator_norm(w) <= 1.0 + 1e-8
    return MnpsReport(
        w=w,
        residual=res,
        w_norm=operator_norm(w),
        subspace_inertia=inertia,
        regularization_t=t,
        iterations=iterations,
        certified=certified,
    )


def _trivial_mnps(space: IndefiniteSpace) -> np.ndarray | None:
    """For definite spaces the MNPS is forced; return its graph operator."""
    if space.n_minus == 0 or space.n_plus == 0:
        return np.zeros((space.n_plus, space.n_minus), dtype=complex)
    return None


def _lower_graph(space: IndefiniteSpace, m: np.ndarray, tol_axis: float) -> np.ndarray:
    """Graph operator of the lower half-plane spectral subspace (one Schur pass)."""
    z_minus = _half_plane_basis(m, True, tol_axis)
    if z_minus.shape[1] != space.n_minus:
        raise SpectrumOnAxisError(
            f"lower half-plane subspace has dimension {z_minus.shape[1]}, "
            f"expected {space.n_minus}"
        )
    return graph_from_subspace(space, z_minus)


def mnps_strong(space: IndefiniteSpace, a, tol_res: float = DEFAULT_TOL_RES) -> MnpsReport:
    """Invariant MNPS of a strongly J-dissipative matrix via the spectral split."""
    m = _mat(a)
    w = _trivial_mnps(space)
    if w is not None:
        return _report_for(space, m, w, 0.0, 0, tol_res)
    scale = max(1.0, operator_norm(m))
    margin = _dissipativity_margin(space, m)
    if margin <= PREDICATE_TOL * scale:
        raise NotDissipativeError(
            f"operator is not strongly J-dissipative (margin {margin:.3e})"
        )
    w = _lower_graph(space, m, AXIS_RTOL * scale)
    return _report_for(space, m, w, 0.0, 1, tol_res)


def mnps(
    space: IndefiniteSpace,
    a,
    t0: float | None = None,
    shrink: float = DEFAULT_SHRINK,
    tol_res: float = DEFAULT_TOL_RES,
    max_iter: int = DEFAULT_MAX_ITER,
) -> MnpsReport:
    """Invariant MNPS of a J-dissipative matrix, certified against the input.

    Solves the strongly-dissipative problem for ``A + i t J`` with
    ``t = t0 * shrink**j`` until the graph operator's invariance residual
    against the original A drops below ``tol_res * max(1, ||A||)``.  When the
    budget runs out the best iterate is returned flagged uncertified.
    """
    m = _mat(a)
    scale = max(1.0, operator_norm(m))
    margin = _dissipativity_margin(space, m)
    if margin < -PREDICATE_TOL * scale:
        raise NotDissipativeError(
            f"operator is not J-dissipative (form margin {margin:.3e})"
        )
    w = _trivial_mnps(space)
    if w is not None:
        return _report_for(space, m, w, 0.0, 0, tol_res)

    if t0 is None:
        t0 = DEFAULT_T0_SCALE * scale
    schedule = []
    if margin > PREDICATE_TOL * scale:
        schedule.append(0.0)
    schedule.extend(t0 * shrink**j for j in range(max_iter))

    best: MnpsReport | None = None
    for i, t in enumerate(schedule):
        b = m + 1j * t * space.j
        try:
            w = _lower_graph(space, b, AXIS_RTOL * scale)
        except (SpectrumOnAxisError, NotAGraphError):
            continue
        report = _report_for(space, m, w, t, i + 1, tol_res, scale=scale)
        if best is None or report.residual < best.residual:
            best = report
        if report.certified:
            return report

    if best is not None:
        return MnpsReport(
            w=best.w,
            residual=best.residual,
            w_norm=best.w_norm,
            subspace_inertia=best.subspace_inertia,
            regularization_t=best.regularization_t,
            iterations=len(schedule),
            certified=False,
            message="failed to certify; spectrum may be degenerate near real axis",
        )
    w = np.zeros((space.n_plus, space.n_minus), dtype=complex)
    fallback = _report_for(space, m, w, schedule[-1], len(schedule), tol_res)
    if fallback.certified:
        return fallback
    return MnpsReport(
        w=w,
        residual=fallback.residual,
        w_norm=0.0,
        subspace_inertia=fallback.subspace_inertia,
        regularization_t=schedule[-1],
        iterations=len(schedule),
        certified=False,
        message="failed to certify; spectrum may be degenerate near real axis",
    )


def _level_indices(space: IndefiniteSpace, k_minus: int, k_plus: int) -> np.ndarray:
    return np.r_[np.arange(k_minus), space.n_minus + np.arange(k_plus)]


def approximation_ladder(
    space: IndefiniteSpace,
    a,
    levels,
    max_workers: int | None = None,
    **solver_opts,
) -> LadderReport:
    """Solve the MNPS problem along a ladder of coordinate truncations.

    Each level (k-, k+) compresses A onto the first k- negative and first k+
    positive coordinates (which preserves J-dissipativity since J is
    diagonal); residuals are measured against the truncated operator.  The
    last level must be the full problem.
    """
    m = _mat(a)
    levels = [(int(km), int(kp)) for km, kp in levels]
    if not levels:
        raise ValueError("at least one ladder level is required")
    for (km0, kp0), (km1, kp1) in zip(levels, levels[1:]):
        if km1 < km0 or kp1 < kp0 or (km1, kp1) == (km0, kp0):
            raise ValueError("ladder levels must increase")
    for km, kp in levels:
        if km < 0 or kp < 0 or km > space.n_minus or kp > space.n_plus or km + kp == 0:
            raise ValueError(f"level ({km}, {kp}) is out of range for the space")
    if levels[-1] != (space.n_minus, space.n_plus):
        raise ValueError("last ladder level must equal the full signature")

    def solve(level: tuple[int, int]) -> MnpsReport:
        km, kp = level
        idx = _level_indices(space, km, kp)
        sub = m[np.ix_(idx, idx)]
        return mnps(IndefiniteSpace(km, kp), sub, **solver_opts)

    if max_workers is not None and max_workers > 1 and len(levels) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as pool:
            reports = list(pool.map(solve, levels))
    else:
        reports = [solve(level) for level in levels]

    out: list[LadderLevel] = []
    prev_w: np.ndarray | None = None
    for (km, kp), rep in zip(levels, reports):
        w_full = np.zeros((space.n_plus, space.n_minus), dtype=complex)
        w_full[:kp, :km] = rep.w
        delta = None if prev_w is None else operator_norm(w_full - prev_w)
        out.append(
            LadderLevel(
                k_minus=km,
                k_plus=kp,
                w_embedded=w_full,
                residual=rep.residual,
                certified=rep.certified,
                delta_to_previous=delta,
            )
        )
        prev_w = w_full
    return LadderReport(levels=tuple(out), final_w=out[-1].w_embedded, final_report=reports[-1])


def verify_mnps(space: IndefiniteSpace, a, w, tol: float = 1e-8) -> VerifyReport:
    """Check that W parametrizes an MNPS and that its graph is A-invariant."""
    m = _mat(a)
    wm = _mat(w)
    res = invariance_residual(space, m, wm)
    inertia = subspace_signature(space, graph_of(space, wm))
    return VerifyReport(
        maximal_nonpositive=operator_norm(wm) <= 1.0 + tol,
        invariant=res <= tol * max(1.0, operator_norm(m)),
        residual=res,
        inertia=inertia,
    )
