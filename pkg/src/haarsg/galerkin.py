"""Galerkin tensors, spectral transforms and closed-form nonlinear gPC operations.

Every Haar-type basis shares one constant eigenvector frame Hn, so the
Galerkin matrix of any mode vector u is P(u) = Hn diag(d) Hn.T where the
spectrum d depends linearly on u.  For piecewise-constant bases d holds the
realizations of the expansion on the stochastic cells; all nonlinear
operations reduce to entrywise maps on d followed by the inverse transform.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .basis import BasisKind, HaarTypeBasis
from .errors import AdmissibilityError, BasisError

COMMUTATION_TOL = 1e-10
#: spectrum values above this (tiny negative) threshold count as nonnegative
SEMI_POSITIVE_TOL = -1e-13

PROJECT_PANELS = 8
PROJECT_GAUSS_POINTS = 5


class Admissibility(Enum):
    STRICTLY_POSITIVE = "strictly-positive"
    SEMI_POSITIVE = "semi-positive"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class GalerkinTensor:
    """Precomputed triple-product matrices and the shared eigenvector frame.

    ``M[k]`` is the symmetric matrix of triple products of wavelet k with all
    pairs; ``Hn`` the orthogonal eigenvector matrix; ``eig_map`` the linear
    map modes -> spectrum (eigenvalues of P, indexed by stochastic cell) and
    ``eig_inv`` its closed-form inverse.
    """

    basis: HaarTypeBasis
    M: np.ndarray
    Hn: np.ndarray
    eig_map: np.ndarray
    eig_inv: np.ndarray

    @property
    def size(self) -> int:
        return self.basis.size


def build_tensors(basis: HaarTypeBasis) -> GalerkinTensor:
    """Assemble the Galerkin tensors of a basis.

    Piecewise-constant kinds use the exact cell sums
    M_k[i,j] = (1/(K+1)) sum_l H[i,l] H[j,l] H[k,l]; the piecewise-linear
    kind uses the exact closed-form block integrals.  A custom basis is
    additionally validated by the commutation check.
    """
    n = basis.size
    if basis.is_piecewise_constant:
        H = basis.H
        M = np.einsum("il,jl,kl->kij", H, H, H) / n
        M[0] = np.eye(n)  # exact: row 0 is all ones and rows are orthogonal
        eig_map = H.T.copy()
        eig_inv = H.copy() / n
    else:
        nsub = basis.subdomains
        root = np.sqrt(float(nsub))
        m0 = root * np.eye(2)
        m1 = root * np.array([[0.0, 1.0], [1.0, 0.0]])
        M = np.zeros((n, n, n))
        eig_map = np.zeros((n, n))
        block_map = root * np.array([[1.0, 1.0], [1.0, -1.0]])
        for b in range(nsub):
            s = slice(2 * b, 2 * b + 2)
            M[2 * b][s, s] = m0
            M[2 * b + 1][s, s] = m1
            eig_map[s, s] = block_map
        eig_inv = np.kron(np.eye(nsub), np.array([[1.0, 1.0], [1.0, -1.0]]) / (2.0 * root))
    for a in (M, eig_map, eig_inv):
        a.setflags(write=False)
    tensors = GalerkinTensor(basis, M, basis.normalized, eig_map, eig_inv)
    if basis.kind is BasisKind.CUSTOM:
        ok, worst = check_commuting(tensors)
        if not ok:
            raise BasisError(f"custom basis tensors do not commute (worst pair {worst:.3e})")
    return tensors


def check_commuting(tensors: GalerkinTensor | np.ndarray,
                    tol: float = COMMUTATION_TOL) -> tuple[bool, float]:
    """Pairwise commutator check of the precomputed matrices M_k.

    Returns (all pairs commute within ``tol``, worst max-norm found).
    """
    M = tensors.M if isinstance(tensors, GalerkinTensor) else np.asarray(tensors)
    worst = 0.0
    for i in range(len(M) - 1):
        rest = M[i + 1:]
        comm = M[i] @ rest - rest @ M[i]
        worst = max(worst, float(np.abs(comm).max()))
    return worst < tol, worst


# ---------------------------------------------------------------------------
# spectral transforms

def to_spectrum(t: GalerkinTensor, modes: np.ndarray) -> np.ndarray:
    """Diagonal of Hn.T P(u) Hn, applied along the last axis."""
    return np.asarray(modes) @ t.eig_map.T


def from_spectrum(t: GalerkinTensor, spectrum: np.ndarray) -> np.ndarray:
    """Exact inverse of :func:`to_spectrum`, applied along the last axis."""
    return np.asarray(spectrum) @ t.eig_inv.T


def galerkin_matrix(t: GalerkinTensor, modes: np.ndarray) -> np.ndarray:
    """P(u) = sum_k u_k M_k."""
    return np.einsum("k,kij->ij", np.asarray(modes, dtype=float), t.M)


def galerkin_product(t: GalerkinTensor, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Galerkin product a * b, evaluated through the shared eigenframe.

    The spectral route makes the symmetry in the arguments exact.
    """
    return from_spectrum(t, to_spectrum(t, a) * to_spectrum(t, b))


# ---------------------------------------------------------------------------
# projection

def _cell_quadrature(a: float, b: float, breakpoints) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss nodes/weights on [a, b], panels split at breakpoints."""
    xg, wg = leggauss(PROJECT_GAUSS_POINTS)
    edges = [a]
    for brk in sorted(breakpoints):
        if a < brk < b and brk - edges[-1] > 1e-15:
            edges.append(brk)
    edges.append(b)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        panel_edges = np.linspace(lo, hi, PROJECT_PANELS + 1)
        for p0, p1 in zip(panel_edges[:-1], panel_edges[1:]):
            half = 0.5 * (p1 - p0)
            nodes.append(half * xg + 0.5 * (p0 + p1))
            weights.append(half * wg)
    return np.concatenate(nodes), np.concatenate(weights)


def project(t: GalerkinTensor, f: Callable[[np.ndarray], np.ndarray],
            breakpoints: Sequence[float] = ()) -> np.ndarray:
    """gPC modes of a function of xi: u_k = <f, phi_k> under the uniform law.

    Cell integrals use composite 5-point Gauss-Legendre with 8 panels per
    stochastic cell; ``breakpoints`` splits panels exactly at known
    discontinuities of ``f`` so piecewise-smooth data projects exactly.
    """
    basis = t.basis
    ncell = basis.size if basis.is_piecewise_constant else basis.subdomains
    modes = np.zeros(basis.size)
    for c in range(ncell):
        a, b = c / ncell, (c + 1) / ncell
        nodes, weights = _cell_quadrature(a, b, breakpoints)
        vals = np.asarray(f(nodes), dtype=float)
        if vals.shape != nodes.shape:
            vals = np.broadcast_to(vals, nodes.shape)
        if not np.all(np.isfinite(vals)):
            raise ValueError("projected function returned non-finite values")
        if basis.is_piecewise_constant:
            modes += basis.H[:, c] * np.sum(weights * vals)
        else:
            n = basis.subdomains
            p0 = np.sqrt(n) * np.ones_like(nodes)
            p1 = np.sqrt(3 * n) * (2 * n * nodes - 2 * c - 1)
            modes[2 * c] = np.sum(weights * vals * p0)
            modes[2 * c + 1] = np.sum(weights * vals * p1)
    return modes


# ---------------------------------------------------------------------------
# closed-form nonlinear operations

def _require_nonnegative(d: np.ndarray, what: str) -> np.ndarray:
    bad = np.flatnonzero(d < SEMI_POSITIVE_TOL)
    if bad.size:
        i = int(bad[np.argmin(d[bad])])
        raise AdmissibilityError(
            f"{what}: negative spectrum value {d[i]:.6e} in stochastic cell {i}", index=i)
    return np.maximum(d, 0.0)


def _require_positive(d: np.ndarray, what: str) -> np.ndarray:
    bad = np.flatnonzero(d <= 0.0)
    if bad.size:
        i = int(bad[np.argmin(d[bad])])
        raise AdmissibilityError(
            f"{what}: non-positive spectrum value {d[i]:.6e} in stochastic cell {i}", index=i)
    return d


def _conjugate(t: GalerkinTensor, diag: np.ndarray) -> np.ndarray:
    """Hn diag(d) Hn.T."""
    return (t.Hn * diag) @ t.Hn.T


def power_modes(t: GalerkinTensor, u: np.ndarray, gamma: float) -> np.ndarray:
    """Modes of u^gamma for gamma >= 1 and a nonnegative expansion."""
    d = _require_nonnegative(to_spectrum(t, u), f"power_modes(gamma={gamma})")
    return from_spectrum(t, d ** gamma)


def jacobian_power(t: GalerkinTensor, u: np.ndarray, gamma: float) -> np.ndarray:
    """Jacobian gamma Hn D^(gamma-1) Hn.T of :func:`power_modes`."""
    d = to_spectrum(t, u)
    if gamma < 1.0:
        d = _require_positive(d, f"jacobian_power(gamma={gamma})")
    else:
        d = _require_nonnegative(d, f"jacobian_power(gamma={gamma})")
    return gamma * _conjugate(t, d ** (gamma - 1.0))


def sign_modes(t: GalerkinTensor, u: np.ndarray) -> np.ndarray:
    """Modes of sign(u), with sign(0) := 0."""
    return from_spectrum(t, np.sign(to_spectrum(t, u)))


def abs_modes(t: GalerkinTensor, u: np.ndarray) -> np.ndarray:
    """Modes of |u|; coincides with sign_modes(u) * u."""
    return from_spectrum(t, np.abs(to_spectrum(t, u)))


def jacobian_abs(t: GalerkinTensor, u: np.ndarray) -> np.ndarray:
    """Generalized Jacobian Hn sign(D) Hn.T of :func:`abs_modes`."""
    return _conjugate(t, np.sign(to_spectrum(t, u)))


def pnorm_modes(t: GalerkinTensor, components: Sequence[np.ndarray], p: float) -> np.ndarray:
    """Modes of the p-norm of a vector-valued expansion, p >= 1."""
    if len(components) < 1:
        raise ValueError("pnorm_modes needs at least one component")
    if p < 1.0:
        raise ValueError(f"p-norm exponent must be >= 1, got {p}")
    spectra = np.stack([to_spectrum(t, c) for c in components])
    if len(components) == 1:
        return from_spectrum(t, np.abs(spectra[0]))
    if p == 2.0:
        norm = np.sqrt(np.sum(spectra * spectra, axis=0))
    else:
        norm = np.sum(np.abs(spectra) ** p, axis=0) ** (1.0 / p)
    return from_spectrum(t, norm)


def jacobian_pnorm(t: GalerkinTensor, components: Sequence[np.ndarray], p: float,
                   i: int) -> np.ndarray:
    """Jacobian of the p-norm modes with respect to component ``i``."""
    spectra = np.stack([to_spectrum(t, c) for c in components])
    c = np.sum(np.abs(spectra) ** p, axis=0)
    c = _require_positive(c, "jacobian_pnorm")
    entries = c ** (1.0 / p - 1.0) * np.abs(spectra[i]) ** (p - 1.0) * np.sign(spectra[i])
    return _conjugate(t, entries)


def nth_root_modes(t: GalerkinTensor, rho: np.ndarray, n: int) -> np.ndarray:
    """Modes of the n-th root of a nonnegative expansion, n >= 2."""
    if n < 2:
        raise ValueError(f"root order must be >= 2, got {n}")
    d = _require_nonnegative(to_spectrum(t, rho), f"nth_root_modes(n={n})")
    return from_spectrum(t, d ** (1.0 / n))


def convex_root_objective(t: GalerkinTensor, rho: np.ndarray, alpha: np.ndarray,
                          n: int) -> tuple[float, np.ndarray]:
    """Value and gradient of the convex n-th-root objective.

    eta(alpha) = e1.T P^{n+1}(alpha) e1 / (n+1) - rho.T alpha, with gradient
    P^n(alpha) e1 - rho.  For Haar-type bases the eigenvector-derivative
    error term vanishes; the gradient must be zero at nth_root_modes(rho, n).
    """
    d = to_spectrum(t, alpha)
    value = float(from_spectrum(t, d ** (n + 1))[0] / (n + 1) - np.dot(rho, alpha))
    gradient = from_spectrum(t, d ** n) - np.asarray(rho, dtype=float)
    return value, gradient


def moment_modes(t: GalerkinTensor, u: np.ndarray, m: int) -> np.ndarray:
    """Modes of the m-th Galerkin moment P^m(u) e1."""
    if m < 1:
        raise ValueError(f"moment order must be >= 1, got {m}")
    return from_spectrum(t, to_spectrum(t, u) ** m)


def is_admissible(t: GalerkinTensor, u: np.ndarray) -> tuple[Admissibility, float]:
    """Classify u by the minimum spectrum value of P(u)."""
    dmin = float(to_spectrum(t, u).min())
    if dmin > 0.0:
        return Admissibility.STRICTLY_POSITIVE, dmin
    if dmin >= SEMI_POSITIVE_TOL:
        return Admissibility.SEMI_POSITIVE, dmin
    return Admissibility.INDEFINITE, dmin


def eigen_derivative_check(t: GalerkinTensor, u: np.ndarray, q: np.ndarray,
                           step: float = 1e-6) -> float:
    """Residual of the eigenvalue-derivative identity, a pure test utility.

    The left side differentiates alpha -> D(alpha) (Hn.T q) by central finite
    differences per coordinate; the right side is Hn.T P(q) exactly.
    """
    u = np.asarray(u, dtype=float)
    q = np.asarray(q, dtype=float)
    w = t.Hn.T @ q
    n = t.size
    lhs = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = step
        lhs[:, j] = (to_spectrum(t, u + e) - to_spectrum(t, u - e)) / (2.0 * step) * w
    rhs = t.Hn.T @ galerkin_matrix(t, q)
    return float(np.abs(lhs - rhs).max())
