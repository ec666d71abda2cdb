"""Material derivation: bulk constants, wave speeds, eigen structure."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poroseis.errors import NonPhysical
from poroseis.media import (AcousticMedium, PoroelasticParams,
                            derive_poroelastic, validate)

# Frozen derived constants for the validation material (water over a stiff
# porous frame).  Computed once from the closed-form composition rules and
# cross-checked against numpy.linalg.eig on the density-stiffness pencil
# before freezing.
RHO_BULK = 1908.0
RHO_W = 5100.0
BETA = 0.3771565952888125
M_MODULUS = 5784722056.841113
LAMBDA = 3577720000.0
ALPHA = 23667419921.67699
V_PF = 3677.326536571565
V_PS = 1060.4264904616412
V_S = 2377.691210598581
P21 = -0.18377995968396874
P22 = -20.79906390791119


def test_bulk_constants(poro):
    assert poro.rho == pytest.approx(RHO_BULK, rel=1e-13)
    assert poro.rho_w == pytest.approx(RHO_W, rel=1e-13)
    assert poro.beta == pytest.approx(BETA, rel=1e-13)
    assert poro.m == pytest.approx(M_MODULUS, rel=1e-13)
    assert poro.lam == pytest.approx(LAMBDA, rel=1e-13)
    assert poro.alpha == pytest.approx(ALPHA, rel=1e-13)


def test_wave_speeds(poro):
    assert poro.v_pf == pytest.approx(V_PF, rel=1e-13)
    assert poro.v_ps == pytest.approx(V_PS, rel=1e-13)
    assert poro.v_s == pytest.approx(V_S, rel=1e-13)
    assert poro.v_pf > poro.v_s > poro.v_ps


def test_eigenvector_matrix(poro):
    p = poro.p_mat
    assert p.shape == (2, 2)
    np.testing.assert_allclose(p[0], [1.0, 1.0], rtol=0.0, atol=0.0)
    assert p[1, 0] == pytest.approx(P21, rel=1e-10)
    assert p[1, 1] == pytest.approx(P22, rel=1e-10)


def test_eigen_residual(poro):
    """The speed/eigenvector pairs must satisfy the propagation pencil."""
    a = poro.a_mat
    b = poro.b_mat
    m = np.linalg.solve(a, b)
    scale = np.linalg.norm(m)
    for j, v in enumerate((poro.v_pf, poro.v_ps)):
        col = poro.p_mat[:, j]
        resid = m @ col - col * v ** 2
        assert np.linalg.norm(resid) <= 1e-12 * scale


def test_matches_numpy_eig(poro):
    vals = np.linalg.eigvals(np.linalg.solve(poro.a_mat, poro.b_mat))
    speeds = np.sort(np.sqrt(vals.real))
    assert speeds[0] == pytest.approx(poro.v_ps, rel=1e-12)
    assert speeds[1] == pytest.approx(poro.v_pf, rel=1e-12)


def test_validate_accepts_fixture(acoustic, poro_params):
    assert validate(acoustic, poro_params) == []


def test_validate_flags_porosity(acoustic, poro_params):
    bad = PoroelasticParams(**{**poro_params.__dict__, "phi": 1.2})
    messages = validate(acoustic, bad)
    assert any("porosity" in m for m in messages)


def test_validate_flags_frame_stiffer_than_grains(acoustic, poro_params):
    bad = PoroelasticParams(**{**poro_params.__dict__, "k_b": 17e9})
    messages = validate(acoustic, bad)
    assert messages


def test_validate_flags_nonpositive(acoustic, poro_params):
    for field in ("rho_s", "rho_f", "k_s", "k_f", "mu"):
        bad = PoroelasticParams(**{**poro_params.__dict__, field: -1.0})
        assert validate(acoustic, bad), field


def test_tortuosity_below_one_rejected(acoustic, poro_params):
    bad = PoroelasticParams(**{**poro_params.__dict__, "a": 0.5})
    assert validate(acoustic, bad)


@settings(max_examples=40, deadline=None)
@given(mod_scale=st.floats(0.2, 5.0), den_scale=st.floats(0.2, 5.0))
def test_speed_scaling(poro_params, mod_scale, den_scale):
    """Speeds scale as sqrt(modulus/density) under joint rescaling."""
    base = derive_poroelastic(poro_params)
    scaled = derive_poroelastic(PoroelasticParams(
        rho_s=poro_params.rho_s * den_scale,
        rho_f=poro_params.rho_f * den_scale,
        phi=poro_params.phi,
        a=poro_params.a,
        k_s=poro_params.k_s * mod_scale,
        k_f=poro_params.k_f * mod_scale,
        k_b=poro_params.k_b * mod_scale,
        mu=poro_params.mu * mod_scale,
    ))
    factor = np.sqrt(mod_scale / den_scale)
    assert scaled.v_pf == pytest.approx(base.v_pf * factor, rel=1e-10)
    assert scaled.v_ps == pytest.approx(base.v_ps * factor, rel=1e-10)
    assert scaled.v_s == pytest.approx(base.v_s * factor, rel=1e-10)


def test_coincident_roots_raise():
    """A porous medium whose two compressional roots coincide is rejected."""
    with pytest.raises((NonPhysical, ValueError)):
        # Zero fluid density collapses the pencil to a defective system.
        derive_poroelastic(PoroelasticParams(
            rho_s=2500.0, rho_f=0.0, phi=0.4, a=2.0,
            k_s=16.0554e9, k_f=0.0, k_b=10e9, mu=9.63342e9))
