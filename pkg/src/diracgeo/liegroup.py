"""Compact matrix groups in exponential charts: SO(3), SU(2) (real 4x4
quaternion embedding), and tori; Maurer-Cartan forms, adjoint action, the
bi-invariant Cartan 3-form, the Cartan-Dirac structure, and the conjugation
(AMM) groupoid with its multiplicative 2-form.

SO(3) and SU(2) share structure constants [e_i, e_j] = e_k (cyclic), so
their chart-level group operations coincide (the covering is a local
isomorphism); they differ in the matrix embedding and in global topology,
neither of which the local checks see.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import jets, linear
from .jets import sin, cos, sqrt, atan2, value_of
from .geometry import Chart, Form, chart
from .groupoid import ChartGroupoid, GroupoidForm


class ChartRadiusError(ValueError):
    """Point outside the safe exponential-chart radius."""


# -- quaternion helpers (generic over jets) --------------------------------

def _qmul(a, b):
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return [w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2]


def _half_sinc(s):
    """sin(sqrt(s)/2)/sqrt(s), analytic in s = |u|^2."""
    if value_of(s) < 1e-10:
        return 0.5 - s / 48.0 + s * s / 3840.0
    r = sqrt(s)
    return sin(r / 2.0) / r


def _qexp(u):
    """Unit quaternion exp for algebra coordinates u (half-angle |u|/2)."""
    s = u[0] * u[0] + u[1] * u[1] + u[2] * u[2]
    f = _half_sinc(s)
    if value_of(s) < 1e-10:
        w = 1.0 - s / 8.0 + s * s / 384.0
    else:
        w = cos(sqrt(s) / 2.0)
    return [w, u[0] * f, u[1] * f, u[2] * f]


def _qlog(q):
    """Inverse of _qexp on the branch |u| < 2*pi (w > -1)."""
    w, x, y, z = q
    s = x * x + y * y + z * z
    if value_of(s) < 1e-14:
        # atan2(r, w)/r ~ (1/w)(1 - s/(3w^2) + ...)
        f = (1.0 / w) * (1.0 - s / (3.0 * w * w))
    else:
        r = sqrt(s)
        f = atan2(r, w) / r
    return [2.0 * x * f, 2.0 * y * f, 2.0 * z * f]


# -- group fixtures --------------------------------------------------------

@dataclass
class MatrixGroup:
    """A compact group in one exponential chart at the identity."""

    name: str
    dim: int
    struct: np.ndarray   # [i, j, k] coefficient of e_k in [e_i, e_j]
    metric: np.ndarray   # invariant inner product in the algebra basis
    chart_cap: float = 1.0

    # chart-level multiplication; set by the constructors below
    def mul(self, u, v):
        raise NotImplementedError

    def inv(self, u):
        return [-c for c in u]

    def identity(self):
        return [0.0] * self.dim

    def chart_names(self):
        return tuple(f"u{i+1}" for i in range(self.dim))

    def bracket(self, a, b):
        out = [0.0] * self.dim
        for i in range(self.dim):
            for j in range(self.dim):
                c = a[i] * b[j]
                for k in range(self.dim):
                    if self.struct[i, j, k]:
                        out[k] = out[k] + self.struct[i, j, k] * c
        return out

    def inner(self, a, b):
        total = 0.0
        for i in range(self.dim):
            for j in range(self.dim):
                if self.metric[i, j]:
                    total = total + self.metric[i, j] * a[i] * b[j]
        return total

    def check_radius(self, u):
        r2 = sum(value_of(c) ** 2 for c in u)
        if r2 > (0.9 * math.pi) ** 2 and self.name != "torus":
            raise ChartRadiusError(
                f"|u| = {math.sqrt(r2):.3f} outside the exp-chart radius")

    # Maurer-Cartan forms and adjoint, via chart curves
    def lam(self, u, V):
        """Left Maurer-Cartan: algebra coords of g^{-1} (d/ds)(exp(u + sV))."""
        return jets.directional(
            lambda s: self.mul(self.inv(u), [ui + s[0] * vi
                                             for ui, vi in zip(u, V)]),
            [0.0], [1.0])

    def lam_bar(self, u, V):
        """Right Maurer-Cartan: algebra coords of (d/ds)(exp(u + sV)) g^{-1}."""
        return jets.directional(
            lambda s: self.mul([ui + s[0] * vi for ui, vi in zip(u, V)],
                               self.inv(u)),
            [0.0], [1.0])

    def Ad(self, u, v):
        """Adjoint action of exp(u) on the algebra element v."""
        return jets.directional(
            lambda s: self.mul(self.mul(u, [s[0] * vi for vi in v]),
                               self.inv(u)),
            [0.0], [1.0])

    def Ad_matrix(self, u):
        cols = [self.Ad(u, list(e)) for e in np.eye(self.dim)]
        return np.array([[value_of(c[i]) for c in cols]
                         for i in range(self.dim)])

    def left_translate(self, u, v):
        """Tangent of s -> u * exp(s v): the left-invariant field v_l at u."""
        return jets.directional(
            lambda s: self.mul(u, [s[0] * vi for vi in v]), [0.0], [1.0])

    def right_translate(self, u, v):
        """Tangent of s -> exp(s v) * u: the right-invariant field v_r at u."""
        return jets.directional(
            lambda s: self.mul([s[0] * vi for vi in v], u), [0.0], [1.0])

    def embed(self, u):
        """Matrix of exp(u) in the defining representation."""
        raise NotImplementedError


class _QuaternionChartGroup(MatrixGroup):
    def mul(self, u, v):
        return _qlog(_qmul(_qexp(u), _qexp(v)))


class _SO3(_QuaternionChartGroup):
    def embed(self, u):
        """Rodrigues rotation matrix of exp(u)."""
        th2 = sum(c * c for c in u)
        K = np.array([[0.0, -u[2], u[1]],
                      [u[2], 0.0, -u[0]],
                      [-u[1], u[0], 0.0]], dtype=object)
        if value_of(th2) < 1e-12:
            a = 1.0 - th2 / 6.0
            b = 0.5 - th2 / 24.0
        else:
            th = sqrt(th2)
            a = sin(th) / th
            b = (1.0 - cos(th)) / th2
        return np.eye(3) + a * K + b * (K @ K)


class _SU2(_QuaternionChartGroup):
    def embed(self, u):
        """Real 4x4 left-multiplication matrix of the quaternion exp(u)."""
        w, x, y, z = _qexp([c / 1.0 for c in u])
        return np.array([[w, -x, -y, -z],
                         [x, w, -z, y],
                         [y, z, w, -x],
                         [z, -y, x, w]], dtype=object)


class _Torus(MatrixGroup):
    def mul(self, u, v):
        return [a + b for a, b in zip(u, v)]

    def embed(self, u):
        blocks = []
        d = self.dim
        M = np.zeros((2 * d, 2 * d), dtype=object)
        for i in range(d):
            M[2 * i, 2 * i] = cos(u[i])
            M[2 * i, 2 * i + 1] = -sin(u[i])
            M[2 * i + 1, 2 * i] = sin(u[i])
            M[2 * i + 1, 2 * i + 1] = cos(u[i])
        return M


def _eps_struct():
    c = np.zeros((3, 3, 3))
    c[0, 1, 2] = c[1, 2, 0] = c[2, 0, 1] = 1.0
    c[1, 0, 2] = c[2, 1, 0] = c[0, 2, 1] = -1.0
    return c


def so3():
    return _SO3("so3", 3, _eps_struct(), np.eye(3))


def su2():
    return _SU2("su2", 3, _eps_struct(), np.eye(3))


def torus(d=2):
    return _Torus("torus", d, np.zeros((d, d, d)), np.eye(d))


GROUPS = {"so3": so3, "su2": su2, "torus2": lambda: torus(2),
          "torus1": lambda: torus(1)}


# -- Cartan form and Cartan-Dirac structure --------------------------------

def cartan_form(Gp):
    """The bi-invariant 3-form: phi(V1,V2,V3) = (1/2)(lam V1, [lam V2, lam V3])."""
    ch = Chart(Gp.chart_names())

    def ev(p, vs):
        Gp.check_radius(p)
        a = Gp.lam(p, vs[0])
        b = Gp.lam(p, vs[1])
        c = Gp.lam(p, vs[2])
        return 0.5 * Gp.inner(a, Gp.bracket(b, c))

    return Form(ch, 3, ev)


def chart_metric(Gp, u):
    """Matrix of the bi-invariant metric in chart coordinates at u."""
    d = Gp.dim
    lam_cols = [Gp.lam(u, list(e)) for e in np.eye(d)]
    M = np.zeros((d, d))
    for i in range(d):
        for j in range(d):
            M[i, j] = value_of(Gp.inner(lam_cols[i], lam_cols[j]))
    return M


def cartan_dirac(Gp, u, tol=linear.DEFAULT_TOL):
    """L_g = span of (v_r - v_l, ((v_r + v_l)/2)-flat) over the algebra basis."""
    d = Gp.dim
    Gm = chart_metric(Gp, u)
    cols = []
    for e in np.eye(d):
        vr = np.array([value_of(c) for c in Gp.right_translate(u, list(e))])
        vl = np.array([value_of(c) for c in Gp.left_translate(u, list(e))])
        x = vr - vl
        xi = Gm @ (0.5 * (vr + vl))
        cols.append(np.concatenate([x, xi]))
    return linear.LinearDirac.from_span(np.array(cols).T, tol)


def cartan_dirac_field(Gp):
    """The Cartan-Dirac structure as target data: dirac_at plus the 3-form."""

    class _Target:
        chart_dim = Gp.dim
        phi = cartan_form(Gp)

        @staticmethod
        def dirac_at(y):
            return cartan_dirac(Gp, [float(c) for c in y])

    return _Target()


# -- conjugation (AMM) groupoid --------------------------------------------

def conjugate(Gp, u, x):
    """Chart coordinates of exp(u) exp(x) exp(-u)."""
    return Gp.mul(Gp.mul(u, x), Gp.inv(u))


def amm_omega(Gp):
    """The multiplicative 2-form on the conjugation groupoid H x H:
    omega_(g,x) = 1/2 ((Ad_x p_g* lam, p_g* lam) + (p_g* lam, p_x*(lam + lam_bar)))."""
    d = Gp.dim
    names = tuple(f"g{i+1}" for i in range(d)) + tuple(f"x{i+1}" for i in range(d))
    ch = Chart(names)

    def ev(p, vs):
        u, x = p[:d], p[d:]
        V, W = vs
        a = Gp.lam(u, V[:d])
        b = Gp.lam(u, W[:d])
        cV = [s + t for s, t in zip(Gp.lam(x, V[d:]), Gp.lam_bar(x, V[d:]))]
        cW = [s + t for s, t in zip(Gp.lam(x, W[d:]), Gp.lam_bar(x, W[d:]))]
        Adx_a = Gp.Ad(x, a)
        Adx_b = Gp.Ad(x, b)
        return 0.5 * (Gp.inner(Adx_a, b) - Gp.inner(Adx_b, a)
                      + Gp.inner(a, cW) - Gp.inner(b, cV))

    return Form(ch, 2, ev)


def amm_groupoid(Gp, cap_g=0.7, cap_x=0.7):
    """The conjugation groupoid H x H with the AMM form and Cartan 3-form."""
    d = Gp.dim

    def s(p):
        return p[d:]

    def t(p):
        return conjugate(Gp, p[:d], p[d:])

    def unit(x):
        return [0.0] * d + list(x)

    def inv(p):
        return Gp.inv(p[:d]) + conjugate(Gp, p[:d], p[d:])

    def mul(g, h):
        return Gp.mul(g[:d], h[:d]) + list(h[d:])

    def sample_unit(rng):
        return list(rng.uniform(-cap_x, cap_x, d) * 0.5)

    def sample_arrow(rng):
        return list(rng.uniform(-cap_g, cap_g, d) * 0.5) + \
               list(rng.uniform(-cap_x, cap_x, d) * 0.5)

    def sample_pair(rng):
        g2 = sample_arrow(rng)
        u1 = list(rng.uniform(-cap_g, cap_g, d) * 0.5)
        return u1 + t(g2), g2

    def sample_triple(rng):
        g3 = sample_arrow(rng)
        u2 = list(rng.uniform(-cap_g, cap_g, d) * 0.4)
        g2 = u2 + t(g3)
        u1 = list(rng.uniform(-cap_g, cap_g, d) * 0.4)
        return u1 + t(g2), g2, g3

    G = ChartGroupoid(2 * d, d, s, t, unit, inv, mul,
                      sample_unit, sample_arrow, sample_pair, sample_triple)
    phi = cartan_form(Gp)
    return G, GroupoidForm(amm_omega(Gp), phi)


# -- general action form (degree-3 equivariant data -> 2-form) -------------

def general_action_form(Gp, base_dim, action, rho, rho_star):
    """The multiplicative 2-form on the action groupoid H x M determined by
    (rho*, phi):  omega_(g,x)((V,X),(V',X')) =
    <rho*_x(lam_g V), rho_x(lam_g V')> + <rho*_x(lam_g V), X'>
    - <rho*_x(lam_g V'), X>.

    rho(x, v) and rho_star(x, v) are evaluators returning tangent/cotangent
    component lists on the base chart.
    """
    d = Gp.dim
    names = tuple(f"g{i+1}" for i in range(d)) + \
            tuple(f"x{i+1}" for i in range(base_dim))
    ch = Chart(names)

    def dot(cov, vec):
        total = 0.0
        for a, b in zip(cov, vec):
            total = total + a * b
        return total

    def ev(p, vs):
        u, x = p[:d], p[d:]
        V, W = vs
        a = Gp.lam(u, V[:d])
        b = Gp.lam(u, W[:d])
        ra = rho_star(x, a)
        rb = rho_star(x, b)
        return (dot(ra, rho(x, b)) + dot(ra, W[d:]) - dot(rb, V[d:]))

    return Form(ch, 2, ev)


def action_generators(Gp, action):
    """Infinitesimal generators of a left action: rho(x, v) via jets."""

    def rho(x, v):
        return jets.directional(
            lambda s: action([s[0] * vi for vi in v], x), [0.0], [1.0])

    return rho


def amm_rho_star(Gp):
    """rho*_x(v) = the covector (1/2)((lam + lam_bar)(.), v) on the base chart."""
    d = Gp.dim

    def rho_star(x, v):
        out = []
        for e in np.eye(d):
            w = [s + t for s, t in zip(Gp.lam(x, list(e)),
                                       Gp.lam_bar(x, list(e)))]
            out.append(0.5 * Gp.inner(w, v))
        return out

    return rho_star


def conjugation_action(Gp):
    return lambda u, x: conjugate(Gp, u, x)


# -- coadjoint groupoid ----------------------------------------------------

def coadjoint_action(Gp):
    """Left coadjoint action on algebra-dual coordinates:
    (g . xi)(v) = xi(Ad_{g^{-1}} v)."""

    def act(u, xi):
        Ainv_cols = [Gp.Ad(Gp.inv(u), list(e)) for e in np.eye(Gp.dim)]
        return [sum(xi[a] * Ainv_cols[b][a] for a in range(Gp.dim))
                for b in range(Gp.dim)]

    return act


def coadjoint_groupoid(Gp, cap=0.8):
    """T*H presented as the action groupoid H x h* with the canonical form."""
    d = Gp.dim
    act = coadjoint_action(Gp)

    def s(p):
        return p[d:]

    def t(p):
        return act(p[:d], p[d:])

    def unit(x):
        return [0.0] * d + list(x)

    def inv(p):
        return Gp.inv(p[:d]) + act(p[:d], p[d:])

    def mul(g, h):
        return Gp.mul(g[:d], h[:d]) + list(h[d:])

    def sample_unit(rng):
        return list(rng.uniform(-1.0, 1.0, d))

    def sample_arrow(rng):
        return list(rng.uniform(-cap, cap, d) * 0.5) + \
               list(rng.uniform(-1.0, 1.0, d))

    def sample_pair(rng):
        g2 = sample_arrow(rng)
        u1 = list(rng.uniform(-cap, cap, d) * 0.5)
        return u1 + t(g2), g2

    def sample_triple(rng):
        g3 = sample_arrow(rng)
        g2 = list(rng.uniform(-cap, cap, d) * 0.4) + t(g3)
        g1 = list(rng.uniform(-cap, cap, d) * 0.4) + t(g2)
        return g1, g2, g3

    G = ChartGroupoid(2 * d, d, s, t, unit, inv, mul,
                      sample_unit, sample_arrow, sample_pair, sample_triple)
    rho = action_generators(Gp, act)
    omega = general_action_form(Gp, d, act, rho, lambda x, v: list(v))
    return G, GroupoidForm(omega, None)


def canonical_cotangent_form(Gp):
    """-d sigma with sigma_(g,xi)(V, Xi) = <xi, lam_g V>: the canonical
    symplectic form of T*H in the left trivialization chart."""
    from .geometry import ext_d
    d = Gp.dim
    names = tuple(f"g{i+1}" for i in range(d)) + \
            tuple(f"x{i+1}" for i in range(d))
    ch = Chart(names)

    def sigma_ev(p, vs):
        u, xi = p[:d], p[d:]
        lamV = Gp.lam(u, vs[0][:d])
        total = 0.0
        for a, b in zip(xi, lamV):
            total = total + a * b
        return total

    sigma = Form(ch, 1, sigma_ev)
    return -ext_d(sigma)
