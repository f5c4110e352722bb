"""Seeded random generators for test corpora and the CLI ``gen`` command.

Generators are specified by certificate, not by formula: every draw is
checked against the relevant predicate before it is returned.
"""

from __future__ import annotations

import numpy as np

import numpy.linalg as nla

from .ball import mobius_matrix
from .fixpoint import GroupRep, fixture_conjugated_rep
from .groups import FiniteGroup
from .qpd import GroupFunction
from .spaces import IndefiniteSpace, classify_operator, dissipativity_form, operator_norm

__all__ = [
    "random_complex",
    "random_unitary",
    "random_hermitian",
    "random_j_selfadjoint",
    "random_j_dissipative",
    "random_strongly_j_dissipative",
    "random_ball_point",
    "random_j_unitary",
    "corner_decay_fixture",
    "random_unitary_rep",
    "cyclic_character_rep",
    "random_conjugated_rep",
    "random_qpd_function",
]


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish unitary from the QR of a Gaussian matrix."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    q, r = np.linalg.qr(random_complex(rng, (n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    h = random_complex(rng, (n, n))
    return (h + h.conj().T) / 2.0


def random_j_selfadjoint(space: IndefiniteSpace, rng: np.random.Generator) -> np.ndarray:
    """J times a Hermitian matrix: the dissipativity form vanishes."""
    return space.j @ random_hermitian(rng, space.n)


def random_j_dissipative(
    space: IndefiniteSpace,
    rng: np.random.Generator,
    margin: float | None = None,
    rank_deficient: bool = False,
) -> np.ndarray:
    """Random A with PSD dissipativity form; checked before returning.

    ``A = J (S + iP)`` with S Hermitian and P >= 0 has dissipativity form
    exactly P.  ``margin`` adds margin * I to P; ``rank_deficient`` makes P
    singular so the operator is dissipative but not strongly so.
    """
    n = space.n
    s = random_hermitian(rng, n)
    c = random_complex(rng, (n, max(1, n - 2) if rank_deficient else n))
    p = c @ c.conj().T / n
    if margin is not None:
        p = p + margin * np.eye(n)
    a = space.j @ (s + 1j * p)
    # accept only draws certified dissipative (same margin classify_operator uses)
    form_min = float(np.min(nla.eigvalsh(dissipativity_form(space, a))))
    if form_min < -1e-12 * max(1.0, operator_norm(a)):
        raise AssertionError("generator produced a non-dissipative matrix")
    return a


def random_strongly_j_dissipative(
    space: IndefiniteSpace, rng: np.random.Generator, margin: float = 0.1
) -> np.ndarray:
    a = random_j_dissipative(space, rng, margin=margin)
    form_min = float(np.min(nla.eigvalsh(dissipativity_form(space, a))))
    if form_min <= 1e-9 * max(1.0, operator_norm(a)):
        raise AssertionError("generator produced a non-strongly-dissipative matrix")
    return a


def random_ball_point(
    space: IndefiniteSpace, rng: np.random.Generator, norm: float = 0.5
) -> np.ndarray:
    """A ball point with spectral norm exactly ``norm``."""
    g = random_complex(rng, (space.n_plus, space.n_minus))
    top = operator_norm(g)
    if top == 0.0:
        return g
    return g * (norm / top)


def random_j_unitary(
    space: IndefiniteSpace, rng: np.random.Generator, center_norm: float = 0.6
) -> np.ndarray:
    """M_A times a block-diagonal unitary; every J-unitary has this form."""
    a = random_ball_point(space, rng, norm=center_norm * rng.uniform(0.2, 1.0))
    block = space.assemble(
        random_unitary(rng, space.n_minus),
        np.zeros((space.n_minus, space.n_plus)),
        np.zeros((space.n_plus, space.n_minus)),
        random_unitary(rng, space.n_plus),
    )
    u = mobius_matrix(space, a) @ block
    if classify_operator(space, u).unitarity_defect > 1e-8:
        raise AssertionError("generator produced a non-J-unitary matrix")
    return u


def corner_decay_fixture(
    space: IndefiniteSpace,
    rng: np.random.Generator,
    decay: float = 0.95,
    margin: float = 1.0,
) -> np.ndarray:
    """Strongly J-dissipative matrix whose far H+ coordinates decouple geometrically.

    H- block dense, H+ block diagonal with spread entries, corner entries
    scaled by decay**j along the H+ index.  The graph operator of the full
    problem then has rows falling off like decay**j, so coordinate
    truncations converge in norm with geometric inter-level deltas.  The
    anti-Hermitian part is diagonal-plus-block and keeps the dissipativity
    margin at ``margin``.
    """
    k, n = space.n_minus, space.n
    s = np.zeros((n, n), dtype=complex)
    s[:k, :k] = random_hermitian(rng, k)
    weights = decay ** np.arange(space.n_plus)
    corner = random_complex(rng, (k, space.n_plus)) * weights[None, :]
    s[:k, k:] = corner
    s[k:, :k] = corner.conj().T
    s[k:, k:] = np.diag(rng.uniform(1.0, 3.0, space.n_plus))
    c1 = random_complex(rng, (k, k))
    p = np.zeros((n, n), dtype=complex)
    p[:k, :k] = c1 @ c1.conj().T / max(1, k) + margin * np.eye(k)
    p[k:, k:] = np.diag(margin * rng.uniform(1.0, 2.0, space.n_plus))
    a = space.j @ (s + 1j * p)
    if not classify_operator(space, a).strongly_j_dissipative:
        raise AssertionError("decay fixture lost strong dissipativity")
    return a


def _invariant_clusters(group: FiniteGroup, rng: np.random.Generator) -> list[np.ndarray]:
    """Orthonormal bases of invariant subspaces of the regular representation.

    Eigenspaces of a generic group-averaged Hermitian matrix; cluster sizes
    equal the dimensions of the irreducible representations.
    """
    m = group.order
    perms = [group.left_translation(g) for g in range(m)]
    h = random_hermitian(rng, m)
    c = sum(p @ h @ p.T for p in perms) / m
    eigs, vecs = np.linalg.eigh((c + c.conj().T) / 2.0)
    gap = 1e-6 * max(1.0, float(np.max(np.abs(eigs))))
    clusters = []
    start = 0
    for i in range(1, m + 1):
        if i == m or eigs[i] - eigs[i - 1] > gap:
            clusters.append(vecs[:, start:i])
            start = i
    return clusters


def random_unitary_rep(
    group: FiniteGroup, dim: int, rng: np.random.Generator
) -> np.ndarray:
    """A random ``dim``-dimensional unitary representation of the group.

    Direct sum (with repetition) of compressions of the regular
    representation onto invariant subspaces, conjugated by a random unitary.
    """
    if dim == 0:
        return np.zeros((group.order, 0, 0), dtype=complex)
    clusters = _invariant_clusters(group, rng)
    pieces: list[np.ndarray] = []
    total = 0
    while total < dim:
        options = [c for c in clusters if c.shape[1] <= dim - total]
        choice = options[rng.integers(0, len(options))]
        pieces.append(choice)
        total += choice.shape[1]
    perms = [group.left_translation(g) for g in range(group.order)]
    q = random_unitary(rng, dim)
    mats = np.empty((group.order, dim, dim), dtype=complex)
    for g in range(group.order):
        blocks = [v.conj().T @ perms[g] @ v for v in pieces]
        full = np.zeros((dim, dim), dtype=complex)
        at = 0
        for b in blocks:
            d = b.shape[0]
            full[at : at + d, at : at + d] = b
            at += d
        mats[g] = q @ full @ q.conj().T
    return mats


def cyclic_character_rep(group: FiniteGroup, exponents) -> np.ndarray:
    """Diagonal character rep of a cyclic group built from integer labels.

    ``exponents`` lists one integer per diagonal entry; element labelled j
    acts as diag(exp(2 pi i a j / m)).  Distinct exponents make the rep
    multiplicity-free, so its only invariant subspaces are coordinate spans.
    """
    m = group.order
    js = np.array([int(label) for label in group.elements])
    exps = np.asarray(exponents, dtype=int)
    mats = np.zeros((m, len(exps), len(exps)), dtype=complex)
    for g in range(m):
        mats[g] = np.diag(np.exp(2j * np.pi * exps * js[g] / m))
    return mats


def random_conjugated_rep(
    group: FiniteGroup,
    space: IndefiniteSpace,
    rng: np.random.Generator,
    center_norm: float = 0.5,
) -> tuple[GroupRep, np.ndarray]:
    """Conjugated-block fixture; returns the rep and the conjugation center."""
    u_minus = random_unitary_rep(group, space.n_minus, rng)
    u_plus = random_unitary_rep(group, space.n_plus, rng)
    a = random_ball_point(space, rng, norm=center_norm)
    return fixture_conjugated_rep(group, u_minus, u_plus, a), a


def random_qpd_function(
    group: FiniteGroup, rng: np.random.Generator, k: int = 1
) -> tuple[GroupFunction, GroupFunction, GroupFunction]:
    """phi = phi_pd - c * phi_ft with phi_ft of rank <= k.

    The PD part is a matrix element of the regular representation plus a
    multiple of the delta at the identity; the finite-type part is a matrix
    element of a k'-dimensional invariant compression (k' <= k), scaled so
    the difference really has negative squares.
    Returns (phi, phi_pd, scaled finite-type part).
    """
    m = group.order
    perms = [group.left_translation(g) for g in range(m)]
    x = random_complex(rng, m)
    pd_vals = np.array([np.vdot(x, p @ x) for p in perms])
    delta = np.zeros(m)
    delta[group.identity] = rng.uniform(0.5, 1.5) * float(np.abs(pd_vals).max())
    pd_vals = pd_vals + delta

    clusters = _invariant_clusters(group, rng)
    rng.shuffle(clusters)
    picked: list[np.ndarray] = []
    total = 0
    for c in clusters:
        if total + c.shape[1] <= k:
            picked.append(c)
            total += c.shape[1]
        if total == k:
            break
    if not picked:
        picked = [min(clusters, key=lambda c: c.shape[1])]
        total = picked[0].shape[1]
    v = np.hstack(picked)
    y = random_complex(rng, total)
    ft_vals = np.array([np.vdot(y, v.conj().T @ p @ v @ y) for p in perms])
    scale = 2.0 * float(np.abs(pd_vals).max()) / max(float(np.abs(ft_vals).max()), 1e-12)
    ft_vals = scale * rng.uniform(1.0, 2.0) * ft_vals

    phi_pd = GroupFunction(group, pd_vals)
    phi_ft = GroupFunction(group, ft_vals)
    phi = GroupFunction(group, pd_vals - ft_vals)
    return phi, phi_pd, phi_ft
