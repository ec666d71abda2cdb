"""Material models for the two half-spaces and derived wave speeds.

The upper half-space is an inviscid acoustic fluid.  The lower half-space is
a poroelastic solid in the zero-viscosity (lossless) limit, described by its
grain, fluid and frame constants.  All derived quantities follow from the
standard closed-system constitutive matrices: a density matrix built from the
bulk and apparent fluid densities and a stiffness matrix built from the
P-wave modulus, the effective-stress coefficient and the fluid storage
modulus.  The two compressional speeds are the square roots of the
eigenvalues of (density)^-1 (stiffness); the shear speed only involves the
densities and the frame shear modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPhysical


@dataclass(frozen=True)
class AcousticMedium:
    rho_plus: float  # fluid density, kg/m^3
    v_plus: float    # sound speed, m/s


@dataclass(frozen=True)
class PoroelasticParams:
    """Primitive constants of the porous half-space (lossless limit)."""

    rho_s: float  # solid grain density, kg/m^3
    rho_f: float  # pore fluid density, kg/m^3
    phi: float    # porosity, dimensionless, strictly between 0 and 1
    a: float      # tortuosity, dimensionless, >= 1
    k_s: float    # grain bulk modulus, Pa
    k_f: float    # pore fluid bulk modulus, Pa
    k_b: float    # drained frame bulk modulus, Pa
    mu: float     # frame shear modulus, Pa


@dataclass(frozen=True, eq=False)
class PoroelasticDerived:
    """Constants derived from :class:`PoroelasticParams`.

    ``p_mat`` holds the compressional eigenvectors column-wise, normalized so
    the first (solid) component equals one; column 0 belongs to the fast wave.
    """

    params: PoroelasticParams
    rho: float       # bulk density, kg/m^3
    rho_w: float     # apparent fluid density a*rho_f/phi, kg/m^3
    beta: float      # effective stress coefficient 1 - K_b/K_s
    m: float         # fluid storage modulus, Pa
    lam: float       # frame Lame parameter K_b - 2*mu/3, Pa
    alpha: float     # closed-system P-wave modulus lam + 2*mu + m*beta^2, Pa
    a_mat: np.ndarray = field(repr=False)  # 2x2 density matrix, kg/m^3
    b_mat: np.ndarray = field(repr=False)  # 2x2 stiffness matrix, Pa
    p_mat: np.ndarray = field(repr=False)  # 2x2 eigenvector matrix, first row ones
    v_pf: float      # fast compressional speed, m/s
    v_ps: float      # slow compressional speed, m/s
    v_s: float       # shear speed, m/s


def validate(acoustic: AcousticMedium, params: PoroelasticParams) -> list[str]:
    """Return a list of human-readable violations, empty when admissible."""
    bad = []
    if not acoustic.rho_plus > 0.0:
        bad.append(f"acoustic density must be positive, got {acoustic.rho_plus}")
    if not acoustic.v_plus > 0.0:
        bad.append(f"acoustic sound speed must be positive, got {acoustic.v_plus}")
    bad.extend(_validate_poroelastic(params))
    return bad


def _validate_poroelastic(p: PoroelasticParams) -> list[str]:
    bad = []
    if not p.rho_s > 0.0:
        bad.append(f"grain density must be positive, got {p.rho_s}")
    if not p.rho_f > 0.0:
        bad.append(f"pore fluid density must be positive, got {p.rho_f}")
    if not 0.0 < p.phi < 1.0:
        bad.append(f"porosity must lie strictly between 0 and 1, got {p.phi}")
    if not p.a >= 1.0:
        bad.append(f"tortuosity must be at least 1, got {p.a}")
    for name, value in (("grain bulk modulus", p.k_s), ("fluid bulk modulus", p.k_f),
                        ("frame bulk modulus", p.k_b), ("frame shear modulus", p.mu)):
        if not value > 0.0:
            bad.append(f"{name} must be positive, got {value}")
    if p.k_s > 0.0 and p.k_b > 0.0 and not p.k_b < p.k_s:
        bad.append(
            f"frame bulk modulus must stay below the grain modulus so that the "
            f"effective stress coefficient beta = 1 - K_b/K_s is positive, got "
            f"K_b={p.k_b} >= K_s={p.k_s}"
        )
    return bad


def derive_poroelastic(params: PoroelasticParams) -> PoroelasticDerived:
    """Compute all derived constants and wave speeds of the porous side.

    Raises
    ------
    NonPhysical
        If the primitive constants are inadmissible or lead to non-real or
        non-positive wave speeds.
    """
    bad = _validate_poroelastic(params)
    if bad:
        raise NonPhysical("; ".join(bad))

    rho = params.phi * params.rho_f + (1.0 - params.phi) * params.rho_s
    rho_w = params.a * params.rho_f / params.phi
    beta = 1.0 - params.k_b / params.k_s
    storage_inv = params.phi / params.k_f + (beta - params.phi) / params.k_s
    if not storage_inv > 0.0:
        raise NonPhysical(
            f"fluid storage modulus is not positive (1/m = {storage_inv})"
        )
    m = 1.0 / storage_inv
    lam = params.k_b - 2.0 * params.mu / 3.0
    alpha = lam + 2.0 * params.mu + m * beta * beta

    a_mat = np.array([[rho, params.rho_f], [params.rho_f, rho_w]])
    b_mat = np.array([[alpha, m * beta], [m * beta, m]])

    det_a = rho * rho_w - params.rho_f ** 2
    if not det_a > 0.0:
        raise NonPhysical(f"density matrix is not positive definite (det = {det_a})")
    v_s = math.sqrt(params.mu * rho_w / det_a)

    # Eigenvalues of the 2x2 matrix A^-1 B are the squared compressional speeds.
    m11 = (rho_w * alpha - params.rho_f * m * beta) / det_a
    m12 = (rho_w * m * beta - params.rho_f * m) / det_a
    m21 = (rho * m * beta - params.rho_f * alpha) / det_a
    m22 = (rho * m - params.rho_f * m * beta) / det_a
    tr = m11 + m22
    det = m11 * m22 - m12 * m21
    disc = tr * tr - 4.0 * det
    if not disc > 0.0:
        raise NonPhysical(
            f"compressional eigenproblem is degenerate or complex (disc = {disc})"
        )
    root = math.sqrt(disc)
    eig_fast = 0.5 * (tr + root)
    eig_slow = 0.5 * (tr - root)
    if not eig_slow > 0.0:
        raise NonPhysical(
            f"squared compressional speeds must be positive, got {eig_fast}, {eig_slow}"
        )

    p_mat = np.empty((2, 2))
    scale = abs(tr) + root
    for col, eig in enumerate((eig_fast, eig_slow)):
        # Eigenvector with solid component normalized to one.  Use whichever
        # row gives the better-conditioned division.
        if abs(m12) >= abs(eig - m22):
            denom, numer = m12, eig - m11
        else:
            denom, numer = eig - m22, m21
        if abs(denom) <= 1e-300 * scale:
            raise NonPhysical(
                "compressional eigenvector has no solid component and cannot "
                "be normalized"
            )
        p_mat[0, col] = 1.0
        p_mat[1, col] = numer / denom

    return PoroelasticDerived(
        params=params,
        rho=rho,
        rho_w=rho_w,
        beta=beta,
        m=m,
        lam=lam,
        alpha=alpha,
        a_mat=a_mat,
        b_mat=b_mat,
        p_mat=p_mat,
        v_pf=math.sqrt(eig_fast),
        v_ps=math.sqrt(eig_slow),
        v_s=v_s,
    )
