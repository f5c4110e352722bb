"""Common fixed points of bounded groups of fractional-linear maps.

A bounded group of J-unitary matrices admits an invariant maximal negative
subspace; its graph operator K is then a common fixed point of all the
induced ball maps, and conjugating by the Mobius matrix of K turns the whole
representation unitary with condition number at most ``2 ||pi||^2 + 1``.

The fixed point is found constructively: average the Euclidean Gram metric
over the group to get an invariant positive matrix B, then take the negative
eigenspace of the Hermitian definite pencil ``J v = lambda B v``.  Since
``B^{-1} J`` commutes with every representation matrix, that eigenspace is
invariant; since B is positive it is maximal negative.  Every claim is
re-checked numerically and reported as a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .ball import fractional_linear, mobius_matrix, radius_from_norm
from .groups import FiniteGroup
from .spaces import (
    IndefiniteSpace,
    Subspace,
    classify_operator,
    graph_from_subspace,
    graph_of,
    operator_norm,
)

__all__ = [
    "DegeneratePencilError",
    "GroupRep",
    "RepDiagnostics",
    "FixedPointReport",
    "UnitarizationReport",
    "rep_validate",
    "orbit_radius",
    "group_average_metric",
    "word_average_metric",
    "common_fixed_point",
    "common_fixed_point_words",
    "invariant_dual_pair",
    "unitarize",
    "fixture_conjugated_rep",
    "fixture_double_rep",
    "doubled_form_matrix",
]

#: Residual threshold below which fixed points / unitarizations certify.
CERT_TOL = 1e-8

#: Pencil eigenvalues this close to zero flag a neutral invariant direction.
PENCIL_ZERO_RTOL = 1e-10

#: Default word-length cap for finitely generated (word-averaged) mode.
DEFAULT_WORD_CAP = 12


class DegeneratePencilError(RuntimeError):
    """Raised when the averaged pencil has a (near-)neutral direction."""


@dataclass(frozen=True)
class GroupRep:
    """Per-element matrices of a finite-group representation on a J-space."""

    group: FiniteGroup
    space: IndefiniteSpace
    matrices: np.ndarray  # shape (order, n, n)

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=complex)
        n = self.space.n
        if mats.shape != (self.group.order, n, n):
            raise ValueError(
                f"expected {self.group.order} matrices of size {n}x{n}, got {mats.shape}"
            )
        object.__setattr__(self, "matrices", mats)

    def __getitem__(self, g: int) -> np.ndarray:
        return self.matrices[g]

    @property
    def norm(self) -> float:
        """The boundedness constant max_g ||pi(g)||."""
        return max(operator_norm(m) for m in self.matrices)


@dataclass(frozen=True)
class RepDiagnostics:
    homomorphism_defect: float
    identity_defect: float
    j_unitarity_defect: float

    def ok(self, tol: float) -> bool:
        return (
            self.homomorphism_defect <= tol
            and self.identity_defect <= tol
            and self.j_unitarity_defect <= tol
        )


@dataclass(frozen=True)
class FixedPointReport:
    """Common fixed point K plus every certificate the run is judged by."""

    k: np.ndarray
    k_norm: float
    max_map_residual: float
    orbit_radius: float
    radius_bound: float
    rep_norm: float
    certified: bool

    def as_dict(self) -> dict:
        from .serialization import matrix_to_json

        return {
            "k": matrix_to_json(self.k),
            "k_norm": self.k_norm,
            "max_map_residual": self.max_map_residual,
            "orbit_radius": self.orbit_radius,
            "radius_bound": self.radius_bound,
            "rep_norm": self.rep_norm,
            "certified": self.certified,
        }


@dataclass(frozen=True)
class UnitarizationReport:
    """Similarity to a unitary representation with condition-number bounds."""

    v: np.ndarray
    v_inv: np.ndarray
    unitaries: np.ndarray
    max_unitarity_defect: float
    cond: float
    sharp_bound: float
    bound: float
    certified: bool

    def as_dict(self) -> dict:
        from .serialization import matrix_to_json

        return {
            "v": matrix_to_json(self.v),
            "v_inv": matrix_to_json(self.v_inv),
            "max_unitarity_defect": self.max_unitarity_defect,
            "cond": self.cond,
            "sharp_bound": self.sharp_bound,
            "bound": self.bound,
            "certified": self.certified,
        }


def rep_validate(rep: GroupRep, tol: float = 1e-9) -> RepDiagnostics:
    """Worst homomorphism, identity, and J-unitarity defects of the rep."""
    group, mats = rep.group, rep.matrices
    m = group.order
    hom = 0.0
    if m <= 64:
        pairs = ((i, j) for i in range(m) for j in range(m))
    else:
        rng = np.random.default_rng(0)
        pairs = zip(rng.integers(0, m, 4096), rng.integers(0, m, 4096))
    for i, j in pairs:
        hom = max(hom, operator_norm(mats[group.mult(i, j)] - mats[i] @ mats[j]))
    ident = operator_norm(mats[group.identity] - np.eye(rep.space.n))
    junit = max(
        classify_operator(rep.space, mats[g]).unitarity_defect for g in range(m)
    )
    return RepDiagnostics(
        homomorphism_defect=hom, identity_defect=ident, j_unitarity_defect=junit
    )


def orbit_radius(rep: GroupRep) -> float:
    """max_g ||phi_{pi(g)}(0)||, checked against the norm bound for J-unitaries."""
    zero = np.zeros((rep.space.n_plus, rep.space.n_minus), dtype=complex)
    radius = max(
        operator_norm(fractional_linear(rep.space, mat, zero)) for mat in rep.matrices
    )
    bound = radius_from_norm(max(rep.norm, 1.0))
    if radius > bound + 1e-9:
        raise ValueError(
            f"orbit radius {radius:.6g} exceeds the J-unitary bound {bound:.6g}; "
            "the representation is not J-unitary"
        )
    return radius


def group_average_metric(rep: GroupRep, check: bool = True) -> np.ndarray:
    """B = (1/m) sum_g pi(g)^H pi(g); positive, and invariant under the group."""
    mats = rep.matrices
    b = sum(m.conj().T @ m for m in mats) / len(mats)
    b = (b + b.conj().T) / 2.0
    if check:
        defect = max(operator_norm(m.conj().T @ b @ m - b) for m in mats)
        if defect > 1e-10 * max(1.0, rep.norm**2) * max(1.0, operator_norm(b)):
            raise ValueError(
                f"averaged metric is not group-invariant (defect {defect:.3e}); "
                "input is probably not a representation"
            )
    return b


def word_average_metric(
    space: IndefiniteSpace, generators, length_cap: int = DEFAULT_WORD_CAP
) -> tuple[np.ndarray, float]:
    """Average the metric over all distinct words of bounded length.

    For finitely generated bounded groups that are too large to enumerate;
    returns (B, invariance defect).  The defect is reported, never asserted.
    """
    gens = [np.asarray(g, dtype=complex) for g in generators]
    alphabet = gens + [np.linalg.inv(g) for g in gens]
    seen: dict[bytes, np.ndarray] = {}

    def key(mat: np.ndarray) -> bytes:
        rounded = np.round(mat, 9) + 0.0  # adding 0.0 folds -0.0 into +0.0
        return rounded.tobytes()

    eye = np.eye(space.n, dtype=complex)
    seen[key(eye)] = eye
    frontier = [eye]
    for _ in range(length_cap):
        nxt = []
        for word in frontier:
            for letter in alphabet:
                prod = word @ letter
                k = key(prod)
                if k not in seen:
                    seen[k] = prod
                    nxt.append(prod)
        if not nxt:
            break
        frontier = nxt

    words = list(seen.values())
    b = sum(w.conj().T @ w for w in words) / len(words)
    b = (b + b.conj().T) / 2.0
    defect = max(operator_norm(g.conj().T @ b @ g - b) for g in gens)
    return b, defect


def _pencil_negative_basis(space: IndefiniteSpace, b: np.ndarray) -> np.ndarray:
    """Negative eigenvectors of J v = lambda B v (B positive definite)."""
    lam, vec = sla.eigh(space.j, b)
    b_inv_norm = 1.0 / float(np.min(np.linalg.eigvalsh(b)))
    if np.min(np.abs(lam)) <= PENCIL_ZERO_RTOL * b_inv_norm:
        raise DegeneratePencilError(
            "averaged pencil has a neutral invariant direction"
        )
    neg = lam < 0.0
    if int(np.sum(neg)) != space.n_minus:
        raise DegeneratePencilError(
            f"pencil inertia {int(np.sum(neg))} does not match n_minus = {space.n_minus}"
        )
    return vec[:, neg]


def _fixed_point_report(
    rep: GroupRep, k: np.ndarray, cert_tol: float
) -> FixedPointReport:
    space = rep.space
    residual = 0.0
    for mat in rep.matrices:
        residual = max(
            residual, operator_norm(fractional_linear(space, mat, k) - k)
        )
    rep_norm = max(rep.norm, 1.0)
    bound = radius_from_norm(rep_norm)
    k_norm = operator_norm(k)
    return FixedPointReport(
        k=k,
        k_norm=k_norm,
        max_map_residual=residual,
        orbit_radius=orbit_radius(rep),
        radius_bound=bound,
        rep_norm=rep_norm,
        certified=residual <= cert_tol and k_norm <= bound + CERT_TOL,
    )


def common_fixed_point(rep: GroupRep, cert_tol: float = CERT_TOL) -> FixedPointReport:
    """Common fixed point of all phi_{pi(g)} via the averaged-metric pencil."""
    space = rep.space
    if space.n_minus == 0 or space.n_plus == 0:
        k = np.zeros((space.n_plus, space.n_minus), dtype=complex)
        return _fixed_point_report(rep, k, cert_tol)
    b = group_average_metric(rep)
    z = _pencil_negative_basis(space, b)
    k = graph_from_subspace(space, z)
    return _fixed_point_report(rep, k, cert_tol)


def common_fixed_point_words(
    rep: GroupRep,
    generators,
    length_cap: int = DEFAULT_WORD_CAP,
    cert_tol: float = CERT_TOL,
) -> FixedPointReport:
    """Word-averaged variant for generator sets; certified by residual only."""
    space = rep.space
    if space.n_minus == 0 or space.n_plus == 0:
        k = np.zeros((space.n_plus, space.n_minus), dtype=complex)
        return _fixed_point_report(rep, k, cert_tol)
    b, _ = word_average_metric(space, generators, length_cap)
    z = _pencil_negative_basis(space, b)
    k = graph_from_subspace(space, z)
    return _fixed_point_report(rep, k, cert_tol)


def invariant_dual_pair(
    rep: GroupRep, report: FixedPointReport | None = None
) -> tuple[Subspace, Subspace]:
    """Invariant (positive, negative) dual pair: graph of K and its J-complement."""
    if report is None:
        report = common_fixed_point(rep)
    space = rep.space
    negative = graph_of(space, report.k)
    if space.n_plus == 0:
        pos_basis = np.zeros((space.n, 0), dtype=complex)
    else:
        pos_basis = sla.null_space(negative.basis.conj().T @ space.j)
    positive = Subspace(space, pos_basis)
    return positive, negative


def unitarize(
    rep: GroupRep,
    report: FixedPointReport | None = None,
    cert_tol: float = CERT_TOL,
) -> UnitarizationReport:
    """Conjugate the representation to a unitary one through the fixed point.

    With V = M_{-K}, the operators ``U(g) = V pi(g) V^{-1}`` fix the zero of
    the ball, hence are block-diagonal J-unitaries, hence unitary.  The
    condition number ``||V|| ||V^{-1}||`` is exactly (1+||K||)/(1-||K||) and
    is certified against the group bound ``2 ||pi||^2 + 1``.
    """
    if report is None:
        report = common_fixed_point(rep, cert_tol=cert_tol)
    space = rep.space
    k = report.k
    if operator_norm(k) >= 1.0 - 1e-8:
        raise ValueError("fixed point sits on the boundary; cannot form its Mobius matrix")
    v = mobius_matrix(space, -k)
    v_inv = mobius_matrix(space, k)
    eye = np.eye(space.n)
    unitaries = np.array([v @ mat @ v_inv for mat in rep.matrices])
    defect = max(operator_norm(u.conj().T @ u - eye) for u in unitaries)
    cond = operator_norm(v) * operator_norm(v_inv)
    r = operator_norm(k)
    sharp = (1.0 + r) / (1.0 - r)
    bound = 2.0 * rep.norm**2 + 1.0
    certified = (
        report.certified
        and defect <= cert_tol
        and cond <= sharp + CERT_TOL
        and cond <= bound + CERT_TOL
    )
    return UnitarizationReport(
        v=v,
        v_inv=v_inv,
        unitaries=unitaries,
        max_unitarity_defect=defect,
        cond=cond,
        sharp_bound=sharp,
        bound=bound,
        certified=certified,
    )


def fixture_conjugated_rep(
    group: FiniteGroup, u_minus, u_plus, center
) -> GroupRep:
    """Test rep pi(g) = M_A diag(u_minus(g), u_plus(g)) M_{-A}.

    ``u_minus`` / ``u_plus`` are per-element unitary blocks on H- / H+ and
    ``center`` is a strict ball point; the result is J-unitary with
    ``||pi|| <= ||M_A||^2``.
    """
    um = np.asarray(u_minus, dtype=complex)
    up = np.asarray(u_plus, dtype=complex)
    if um.shape[0] != group.order or up.shape[0] != group.order:
        raise ValueError("need one unitary block per group element")
    space = IndefiniteSpace(um.shape[1], up.shape[1])
    a = np.asarray(center, dtype=complex)
    m_a = mobius_matrix(space, a)
    m_a_inv = mobius_matrix(space, -a)
    z12 = np.zeros((space.n_minus, space.n_plus))
    z21 = np.zeros((space.n_plus, space.n_minus))
    mats = np.array(
        [m_a @ space.assemble(um[g], z12, z21, up[g]) @ m_a_inv
         for g in range(group.order)]
    )
    return GroupRep(group, space, mats)


def doubled_form_matrix(n: int) -> np.ndarray:
    """The pairing [x1+y1, x2+y2] = (x1, y2) + (y1, x2) on C^n + C^n."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [eye, zero]]).astype(complex)


def fixture_double_rep(rep: GroupRep) -> GroupRep:
    """Doubling trick: tau(g) = diag(pi(g), pi(g^{-1})^H) on H + H.

    ``tau`` preserves the skew pairing of :func:`doubled_form_matrix` for any
    invertible pi; in the coordinates diagonalizing that pairing (difference
    vectors first, sum vectors last) it becomes J-unitary for the equal-split
    signature (n, n).
    """
    group = rep.group
    n = rep.space.n
    basis = np.block(
        [[np.eye(n), np.eye(n)], [-np.eye(n), np.eye(n)]]
    ).astype(complex) / np.sqrt(2.0)
    mats = []
    for g in range(group.order):
        pig = rep.matrices[g]
        pig_inv_star = rep.matrices[group.inv(g)].conj().T
        tau = np.block(
            [[pig, np.zeros((n, n))], [np.zeros((n, n)), pig_inv_star]]
        )
        mats.append(basis.conj().T @ tau @ basis)
    return GroupRep(group, IndefiniteSpace(n, n), np.array(mats))
