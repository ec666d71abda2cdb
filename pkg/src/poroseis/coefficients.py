"""Reflection and transmission coefficients of the fluid/porous interface.

A unit compressional point load in the fluid produces one reflected acoustic
wave and three transmitted waves (fast compressional, slow compressional,
shear).  Their amplitudes solve a 4x4 linear system expressing, row by row:

1. continuity of vertical displacement, with the open-pore relative fluid
   flow entering through the shear potential,
2. continuity of fluid pressure with pore pressure,
3. vanishing tangential stress on the porous side,
4. normal (total) stress balance against the fluid pressure.

The system is assembled per horizontal slowness (q_x, q_y); entries depend on
q_x and q_y only through q_x^2 + q_y^2 and the vertical slownesses, which is
what makes the transverse-slowness reduction of the 3-D problem work.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .branch_math import kappa
from .errors import SingularSystem
from .media import AcousticMedium, PoroelasticDerived

# A pivot below this fraction of the matrix norm counts as singular.
_PIVOT_FLOOR = 1e-14
# Verified relative residual bound for every solve.
_RESIDUAL_BOUND = 1e-10


@dataclass(frozen=True)
class InterfaceCoefficients:
    r: complex     # reflected acoustic potential amplitude
    t_pf: complex  # transmitted fast compressional amplitude
    t_ps: complex  # transmitted slow compressional amplitude
    t_s: complex   # transmitted shear potential amplitude


def assemble_system(acoustic: AcousticMedium, poro: PoroelasticDerived,
                    q_x, q_y) -> tuple[np.ndarray, np.ndarray]:
    """Build the 4x4 system matrix and right-hand side at one slowness pair."""
    k_plus = kappa(acoustic.v_plus, q_x, q_y)
    k_pf = kappa(poro.v_pf, q_x, q_y)
    k_ps = kappa(poro.v_ps, q_x, q_y)
    k_s = kappa(poro.v_s, q_x, q_y)
    qq = complex(q_x) ** 2 + complex(q_y) ** 2
    a, b = _assemble_batch(
        acoustic, poro,
        np.atleast_1d(qq),
        np.atleast_1d(k_plus), np.atleast_1d(k_pf),
        np.atleast_1d(k_ps), np.atleast_1d(k_s),
    )
    return a[0], b[0]


def solve_coefficients(acoustic: AcousticMedium, poro: PoroelasticDerived,
                       q_x, q_y) -> InterfaceCoefficients:
    """Solve the interface system at one slowness pair."""
    a, b = assemble_system(acoustic, poro, q_x, q_y)
    x = _solve_batch(a[np.newaxis], b[np.newaxis],
                     np.atleast_1d(q_x), np.atleast_1d(q_y))[0]
    return InterfaceCoefficients(r=complex(x[0]), t_pf=complex(x[1]),
                                 t_ps=complex(x[2]), t_s=complex(x[3]))


def _assemble_batch(acoustic, poro, qq, k_plus, k_pf, k_ps, k_s):
    """Assemble (m, 4, 4) matrices and (m, 4) right-hand sides.

    The vertical slownesses are passed in rather than recomputed so that the
    caller controls the branch (deformed contours evaluate them on a specific
    rim of the cut).  Their squares are branch-free and are rebuilt from qq.
    """
    p11, p12 = poro.p_mat[0, 0], poro.p_mat[0, 1]
    p21, p22 = poro.p_mat[1, 0], poro.p_mat[1, 1]
    rho_plus = acoustic.rho_plus
    v_plus = acoustic.v_plus
    m_mod = poro.m
    beta = poro.beta
    mu = poro.params.mu
    rho_f = poro.params.rho_f

    qq = np.asarray(qq)
    dtype = np.result_type(qq, k_plus, k_pf, k_ps, k_s, np.complex128)
    n = qq.shape[0]
    a = np.zeros((n, 4, 4), dtype=dtype)
    b = np.zeros((n, 4), dtype=dtype)

    k_pf_sq = 1.0 / poro.v_pf ** 2 + qq
    k_ps_sq = 1.0 / poro.v_ps ** 2 + qq
    k_s_sq = 1.0 / poro.v_s ** 2 + qq

    # Vertical displacement continuity (solid frame plus relative flow).
    a[:, 0, 0] = -k_plus / rho_plus
    a[:, 0, 1] = (p11 + p21) * k_pf
    a[:, 0, 2] = (p12 + p22) * k_ps
    a[:, 0, 3] = (1.0 - rho_f / poro.rho_w) * qq
    # Fluid pressure equals pore pressure.
    a[:, 1, 0] = 1.0
    a[:, 1, 1] = m_mod * (beta * p11 + p21) / poro.v_pf ** 2
    a[:, 1, 2] = m_mod * (beta * p12 + p22) / poro.v_ps ** 2
    # Tangential stress vanishes on the porous side.
    a[:, 2, 1] = 2.0 * p11 * k_pf
    a[:, 2, 2] = 2.0 * p12 * k_ps
    a[:, 2, 3] = k_s_sq + qq
    # Normal stress balances the fluid pressure.
    lam_c = poro.lam + m_mod * beta * beta
    a[:, 3, 0] = 1.0
    a[:, 3, 1] = (lam_c * p11 + m_mod * beta * p21) / poro.v_pf ** 2 \
        + 2.0 * mu * k_pf_sq * p11
    a[:, 3, 2] = (lam_c * p12 + m_mod * beta * p22) / poro.v_ps ** 2 \
        + 2.0 * mu * k_ps_sq * p12
    a[:, 3, 3] = 2.0 * mu * qq * k_s

    src = -1.0 / (2.0 * k_plus * v_plus ** 2)
    b[:, 0] = src * k_plus / rho_plus
    b[:, 1] = src
    b[:, 3] = src
    return a, b


def _solve_batch(a, b, q_x, q_y):
    """Solve a batch of 4x4 systems by Gaussian elimination.

    Partial pivoting with an explicit singularity threshold: a pivot at or
    below 1e-14 times the row-sum norm of its matrix raises SingularSystem
    identifying the offending slowness pair.  Every solution is verified
    against a relative residual bound of 1e-10.

    Parameters are the stacked systems (m, 4, 4), (m, 4) and the slowness
    arrays used only for error reporting (q_y may be scalar).
    """
    a0 = a
    b0 = b
    a = np.array(a, dtype=np.result_type(a, np.complex128))
    b = np.array(b, dtype=a.dtype)
    m = a.shape[0]
    rows = np.arange(m)
    norm_a = np.max(np.sum(np.abs(a), axis=2), axis=1)
    q_y = np.broadcast_to(np.asarray(q_y), np.asarray(q_x).shape)

    for col in range(4):
        sub = np.abs(a[:, col:, col])
        rel = np.argmax(sub, axis=1)
        piv_rows = rel + col
        piv = np.abs(a[rows, piv_rows, col])
        small = piv <= _PIVOT_FLOOR * norm_a
        if np.any(small):
            i = int(np.argmax(small))
            raise SingularSystem(q_x[i], q_y[i],
                                 f"pivot {piv[i]:.3e} below threshold")
        need = piv_rows != col
        if np.any(need):
            tmp = a[rows, piv_rows].copy()
            a[rows, piv_rows] = a[rows, col]
            a[rows, col] = tmp
            tmp_b = b[rows, piv_rows].copy()
            b[rows, piv_rows] = b[rows, col]
            b[rows, col] = tmp_b
        if col < 3:
            factor = a[:, col + 1:, col] / a[:, col, col][:, None]
            a[:, col + 1:, col:] -= factor[:, :, None] * a[:, None, col, col:]
            b[:, col + 1:] -= factor * b[:, col][:, None]

    x = np.zeros_like(b)
    for col in range(3, -1, -1):
        acc = b[:, col].copy()
        if col < 3:
            acc -= np.sum(a[:, col, col + 1:] * x[:, col + 1:], axis=1)
        x[:, col] = acc / a[:, col, col]

    resid = np.max(np.abs(np.einsum("mij,mj->mi", a0, x) - b0), axis=1)
    scale = np.maximum(np.max(np.abs(b0), axis=1),
                       norm_a * np.max(np.abs(x), axis=1))
    bad = ~(resid <= _RESIDUAL_BOUND * scale)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SingularSystem(q_x[i], q_y[i],
                             f"relative residual {resid[i] / scale[i]:.3e}")
    return x
