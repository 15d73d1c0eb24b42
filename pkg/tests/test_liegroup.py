"""Matrix groups in exponential charts and their canonical forms."""

import math

import numpy as np
import pytest

from diracgeo import liegroup as lg
from diracgeo.jets import value_of


def vals(seq):
    return np.array([value_of(c) for c in seq])


def rand_alg(rng, d, scale=0.6):
    return list(rng.uniform(-scale, scale, d))


# -- chart-level group laws -------------------------------------------------

@pytest.mark.parametrize("name", ["so3", "su2", "torus2"])
def test_group_axioms_in_chart(name):
    Gp = lg.GROUPS[name]()
    rng = np.random.default_rng(10)
    for _ in range(6):
        u, v, w = (rand_alg(rng, Gp.dim) for _ in range(3))
        e = Gp.identity()
        assert np.allclose(vals(Gp.mul(u, e)), u, atol=1e-12)
        assert np.allclose(vals(Gp.mul(e, u)), u, atol=1e-12)
        assert np.allclose(vals(Gp.mul(u, Gp.inv(u))), e, atol=1e-12)
        ab_c = Gp.mul(Gp.mul(u, v), w)
        a_bc = Gp.mul(u, Gp.mul(v, w))
        assert np.allclose(vals(ab_c), vals(a_bc), atol=1e-10)


@pytest.mark.parametrize("name", ["so3", "su2"])
def test_chart_mul_matches_matrix_embedding(name):
    Gp = lg.GROUPS[name]()
    rng = np.random.default_rng(11)
    for _ in range(5):
        u, v = rand_alg(rng, 3), rand_alg(rng, 3)
        Mu = np.array([[value_of(c) for c in row] for row in Gp.embed(u)])
        Mv = np.array([[value_of(c) for c in row] for row in Gp.embed(v)])
        w = Gp.mul(u, v)
        Mw = np.array([[value_of(c) for c in row] for row in Gp.embed(w)])
        assert np.allclose(Mu @ Mv, Mw, atol=1e-10)


def test_so3_embed_is_rotation():
    Gp = lg.so3()
    u = [0.0, 0.0, 0.5]
    R = np.array([[value_of(c) for c in row] for row in Gp.embed(u)])
    c, s = math.cos(0.5), math.sin(0.5)
    assert np.allclose(R, [[c, -s, 0], [s, c, 0], [0, 0, 1]], atol=1e-12)
    assert np.allclose(R @ R.T, np.eye(3), atol=1e-12)


def test_chart_radius_guard():
    Gp = lg.so3()
    with pytest.raises(lg.ChartRadiusError):
        Gp.check_radius([3.0, 1.0, 0.0])
    Gp.check_radius([0.5, 0.5, 0.5])
    lg.torus(1).check_radius([10.0])


# -- Maurer-Cartan, adjoint, translations -----------------------------------

@pytest.mark.parametrize("name", ["so3", "su2"])
def test_adjoint_is_orthogonal_algebra_morphism(name):
    Gp = lg.GROUPS[name]()
    rng = np.random.default_rng(12)
    for _ in range(5):
        u = rand_alg(rng, 3)
        A = Gp.Ad_matrix(u)
        assert np.allclose(A @ A.T, np.eye(3), atol=1e-10)
        v, w = rand_alg(rng, 3), rand_alg(rng, 3)
        lhs = vals(Gp.bracket(Gp.Ad(u, v), Gp.Ad(u, w)))
        rhs = vals(Gp.Ad(u, Gp.bracket(v, w)))
        assert np.allclose(lhs, rhs, atol=1e-10)


def test_translations_relate_by_adjoint():
    # v_r at u equals (Ad_u v)_l at u
    Gp = lg.so3()
    rng = np.random.default_rng(13)
    for _ in range(5):
        u, v = rand_alg(rng, 3), rand_alg(rng, 3)
        vr = vals(Gp.right_translate(u, v))
        vl = vals(Gp.left_translate(u, [value_of(c) for c in Gp.Ad(Gp.inv(u), v)]))
        assert np.allclose(vr, vl, atol=1e-10)


def test_lam_inverts_left_translate():
    Gp = lg.su2()
    rng = np.random.default_rng(14)
    for _ in range(5):
        u, v = rand_alg(rng, 3), rand_alg(rng, 3)
        V = [value_of(c) for c in Gp.left_translate(u, v)]
        assert np.allclose(vals(Gp.lam(u, V)), v, atol=1e-10)
        W = [value_of(c) for c in Gp.right_translate(u, v)]
        assert np.allclose(vals(Gp.lam_bar(u, W)), v, atol=1e-10)


def test_metric_is_bi_invariant():
    Gp = lg.so3()
    rng = np.random.default_rng(15)
    for _ in range(4):
        u, v, w = (rand_alg(rng, 3) for _ in range(3))
        # ad-invariance: <[u,v], w> + <v, [u,w]> = 0
        s = (value_of(Gp.inner(Gp.bracket(u, v), w))
             + value_of(Gp.inner(v, Gp.bracket(u, w))))
        assert abs(s) < 1e-12


# -- Cartan 3-form and Cartan-Dirac structure -------------------------------

def test_cartan_form_closed_and_bi_invariant():
    Gp = lg.so3()
    phi = lg.cartan_form(Gp)
    from diracgeo.geometry import ext_d
    rng = np.random.default_rng(16)
    p = rand_alg(rng, 3, 0.5)
    for _ in range(3):
        u, v, w, z = rng.standard_normal((4, 3))
        assert value_of(ext_d(phi)(p, u, v, w, z)) == pytest.approx(0.0, abs=1e-10)
    # value at the identity is the structure-constant 3-form
    e = np.eye(3)
    assert phi([0.0] * 3, e[0], e[1], e[2]) == pytest.approx(
        0.5 * value_of(Gp.inner(e[0], Gp.bracket(e[1], e[2]))))


def test_torus_cartan_form_vanishes():
    Gp = lg.torus(2)
    phi = lg.cartan_form(Gp)
    rng = np.random.default_rng(17)
    for _ in range(3):
        u, v, w = rng.standard_normal((3, 2))
        assert phi([0.3, -0.4], u, v, w) == 0.0


def test_cartan_dirac_at_identity_is_cotangent():
    # at e: v_r - v_l = 0 and (v_r+v_l)/2 = v, so L_e = {0} + T*_e
    from diracgeo import linear
    Gp = lg.so3()
    L = lg.cartan_dirac(Gp, [0.0, 0.0, 0.0])
    Tstar = linear.LinearDirac.from_span(
        np.vstack([np.zeros((3, 3)), np.eye(3)]))
    assert L == Tstar


def test_cartan_dirac_field_integrable_against_cartan_form():
    # sampled frame-bracket residual of the Cartan-Dirac structure vanishes
    # against the Cartan 3-form
    from diracgeo.courant import integrability_residual
    from diracgeo.courant import Section
    from diracgeo.geometry import Chart, Form, VectorField
    from diracgeo.courant import AlmostDiracField
    Gp = lg.so3()
    ch = Chart(Gp.chart_names())
    Gm = lg.chart_metric
    frame = []
    for e in np.eye(3):
        def Xev(p, e=e):
            vr = Gp.right_translate(p, list(e))
            vl = Gp.left_translate(p, list(e))
            return [a - b for a, b in zip(vr, vl)]

        def xiev(p, vs, e=e):
            vr = Gp.right_translate(p, list(e))
            vl = Gp.left_translate(p, list(e))
            half = [(a + b) / 2.0 for a, b in zip(vr, vl)]
            lam_half = Gp.lam(p, half)
            lam_v = Gp.lam(p, vs[0])
            return Gp.inner(lam_half, lam_v)

        frame.append(Section(VectorField(ch, Xev), Form(ch, 1, xiev)))
    L = AlmostDiracField(frame)
    phi = lg.cartan_form(Gp)
    rng = np.random.default_rng(18)
    pts = [rand_alg(rng, 3, 0.5) for _ in range(4)]
    assert integrability_residual(L, phi, pts) < 1e-9


def test_cartan_dirac_field_wrapper():
    T = lg.cartan_dirac_field(lg.su2())
    assert T.chart_dim == 3
    L = T.dirac_at([0.2, -0.1, 0.3])
    assert L.dim == 3


# -- AMM and coadjoint forms ------------------------------------------------

def test_amm_omega_equals_general_action_form():
    Gp = lg.so3()
    omega = lg.amm_omega(Gp)
    rho = lg.action_generators(Gp, lg.conjugation_action(Gp))
    built = lg.general_action_form(Gp, 3, lg.conjugation_action(Gp),
                                   rho, lg.amm_rho_star(Gp))
    rng = np.random.default_rng(19)
    for _ in range(5):
        p = rand_alg(rng, 6, 0.4)
        u, v = rng.standard_normal((2, 6))
        assert value_of(omega(p, u, v)) == pytest.approx(
            value_of(built(p, u, v)), abs=1e-12)


def test_coadjoint_form_is_canonical_symplectic():
    Gp = lg.so3()
    _, F = lg.coadjoint_groupoid(Gp)
    can = lg.canonical_cotangent_form(Gp)
    rng = np.random.default_rng(20)
    for _ in range(5):
        p = list(rng.uniform(-0.4, 0.4, 3)) + list(rng.uniform(-1, 1, 3))
        u, v = rng.standard_normal((2, 6))
        assert value_of(F.omega(p, u, v)) == pytest.approx(
            value_of(can(p, u, v)), abs=1e-12)


def test_coadjoint_action_preserves_pairing():
    Gp = lg.so3()
    act = lg.coadjoint_action(Gp)
    rng = np.random.default_rng(21)
    u = rand_alg(rng, 3)
    xi = rand_alg(rng, 3, 1.0)
    v = rand_alg(rng, 3, 1.0)
    lhs = np.dot(vals(act(u, xi)), vals(Gp.Ad(u, v)))
    assert lhs == pytest.approx(np.dot(xi, v), abs=1e-10)
