"""Coordinate foliations on R^n: leafwise de Rham calculus, the transverse
two-form invariant of a leafwise presymplectic family, and the fiberwise
pair groupoid over the conormal bundle with its canonical form."""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import jets, linear
from .courant import Section, courant_bracket
from .expr import ScalarExpr, parse
from .geometry import Chart, Form, VectorField, ext_d
from .groupoid import ChartGroupoid, GroupoidForm


@dataclass(frozen=True)
class CoordFoliation:
    """F = span of the first k coordinate fields on R^n; the transverse
    directions are the last n - k coordinates."""

    n: int
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError("need 0 <= k <= n")

    @property
    def chart(self):
        return Chart(tuple(f"x{i+1}" for i in range(self.n)))

    @property
    def leaf(self):
        return tuple(range(self.k))

    @property
    def transverse(self):
        return tuple(range(self.k, self.n))


def _coeff_fn(e, ch):
    if callable(e) and not isinstance(e, ScalarExpr):
        return e
    if isinstance(e, (int, float)):
        v = float(e)
        return lambda p: v
    if isinstance(e, str):
        e = parse(e, ch.names)
    return lambda p: e(p)


@dataclass
class FoliatedForm:
    """Leafwise p-form with coefficients over the whole chart.

    Scalar-valued coefficients are keyed by strictly increasing tuples of
    leaf indices; conormal-valued ones add a transverse index m.
    """

    fol: CoordFoliation
    degree: int
    coeffs: dict
    nu_valued: bool = False

    def __post_init__(self):
        ch = self.fol.chart
        table = {}
        for key, e in self.coeffs.items():
            if self.nu_valued:
                idx, m = tuple(key[0]), key[1]
                if m not in self.fol.transverse:
                    raise ValueError(f"transverse index {m} out of range")
            else:
                idx = tuple(key)
                m = None
            if list(idx) != sorted(set(idx)):
                raise ValueError(f"indices must be strictly increasing: {idx}")
            if len(idx) != self.degree:
                raise ValueError(f"index {idx} has wrong length")
            if any(i not in self.fol.leaf for i in idx):
                raise ValueError(f"non-leaf index in {idx}")
            table[(idx, m) if self.nu_valued else idx] = _coeff_fn(e, ch)
        self.table = table

    def keys(self):
        if self.nu_valued:
            return [(idx, m)
                    for idx in combinations(self.fol.leaf, self.degree)
                    for m in self.fol.transverse]
        return list(combinations(self.fol.leaf, self.degree))

    def coeff(self, key, p):
        fn = self.table.get(key)
        return 0.0 if fn is None else fn(p)

    def __sub__(self, other):
        if (self.fol, self.degree, self.nu_valued) != \
                (other.fol, other.degree, other.nu_valued):
            raise ValueError("foliated-form mismatch")
        out = {}
        for key in self.keys():
            out[key] = (lambda p, k=key:
                        self.coeff(k, p) - other.coeff(k, p))
        return FoliatedForm(self.fol, self.degree, out, self.nu_valued)

    def max_abs(self, samples):
        worst = 0.0
        for p in samples:
            for key in self.keys():
                worst = max(worst, abs(jets.value_of(self.coeff(key, p))))
        return worst


def d_F(w):
    """Leafwise exterior derivative; for conormal-valued forms this is the
    flat partial-derivative connection of a coordinate foliation (the
    curvature vanishes identically)."""
    fol = w.fol
    if w.degree >= fol.k:
        raise ValueError("degree overflow along the leaves")
    out = {}

    def coefficient(J, m):
        def fn(p):
            total = 0.0
            for pos, i in enumerate(J):
                rest = tuple(x for x in J if x != i)
                key = (rest, m) if w.nu_valued else rest
                e = [1.0 if j == i else 0.0 for j in range(fol.n)]
                der = jets.directional(lambda q: w.coeff(key, q), p, e)
                total = total + (der if pos % 2 == 0 else -der)
            return total
        return fn

    for J in combinations(fol.leaf, w.degree + 1):
        if w.nu_valued:
            for m in fol.transverse:
                out[(J, m)] = coefficient(J, m)
        else:
            out[J] = coefficient(J, None)
    return FoliatedForm(fol, w.degree + 1, out, w.nu_valued)


def restriction_residual(fol, theta, extension, samples):
    """Max defect of the extension against theta on leaf directions."""
    E = np.eye(fol.n)
    worst = 0.0
    for p in samples:
        for (i, j) in combinations(fol.leaf, 2):
            val = extension(p, list(E[i]), list(E[j])) - theta.coeff((i, j), p)
            worst = max(worst, abs(jets.value_of(val)))
    return worst


def d_nu(theta, extension, samples=None, tol=1e-10):
    """Transverse derivative of a d_F-closed leafwise 2-form: contract the
    exterior derivative of an extension with two leaf directions and one
    transverse direction.

    When samples are given, the extension is validated: it must restrict
    to theta on the leaves, and its exterior derivative must vanish on
    purely-leafwise triples.
    """
    fol = theta.fol
    E = np.eye(fol.n)
    dext = ext_d(extension)
    if samples is not None:
        r = restriction_residual(fol, theta, extension, samples)
        if r > 1e-12:
            raise ValueError(f"extension does not restrict to theta: {r:.2e}")
        for p in samples:
            for (i, j, l) in combinations(fol.leaf, 3):
                v = dext(p, list(E[i]), list(E[j]), list(E[l]))
                if abs(jets.value_of(v)) > tol:
                    raise ValueError("extension is not leafwise closed")
    out = {}
    for (i, j) in combinations(fol.leaf, 2):
        for m in fol.transverse:
            out[((i, j), m)] = (
                lambda p, i=i, j=j, m=m:
                dext(p, list(E[i]), list(E[j]), list(E[m])))
    return FoliatedForm(fol, 2, out, nu_valued=True)


def splitting_sections(fol, extension):
    """sigma(d_i) = (d_i, i_{d_i} theta-extension) as sections over the
    full chart, one per leaf direction."""
    ch = fol.chart
    out = []
    for i in fol.leaf:
        e = [1.0 if j == i else 0.0 for j in range(fol.n)]
        X = VectorField(ch, lambda p, e=e: list(e))
        xi = Form(ch, 1, lambda p, vs, e=e: extension.func(p, [e] + vs))
        out.append(Section(X, xi))
    return out


def classifying_rep(fol, extension, phi=None):
    """The conormal-valued curvature of the splitting: transverse
    components of the (twisted) bracket defect of the lifted leaf frame.
    Leaf coordinate fields commute, so the defect is just the bracket of
    the lifted sections."""
    secs = splitting_sections(fol, extension)
    E = np.eye(fol.n)
    out = {}
    for (i, j) in combinations(fol.leaf, 2):
        br = courant_bracket(secs[i], secs[j], phi)
        for m in fol.transverse:
            out[((i, j), m)] = (
                lambda p, br=br, m=m: br.xi(p, list(E[m])))
    return FoliatedForm(fol, 2, out, nu_valued=True)


def phi_bar(fol, phi):
    """Conormal restriction of a 3-form: two leaf slots, one transverse."""
    E = np.eye(fol.n)
    out = {}
    for (i, j) in combinations(fol.leaf, 2):
        for m in fol.transverse:
            out[((i, j), m)] = (
                lambda p, i=i, j=j, m=m:
                phi(p, list(E[i]), list(E[j]), list(E[m])))
    return FoliatedForm(fol, 2, out, nu_valued=True)


def twisted_shift_residual(fol, extension, phi, samples):
    """|classifying_rep with twist - classifying_rep - phi_bar|."""
    twisted = classifying_rep(fol, extension, phi)
    plain = classifying_rep(fol, extension)
    bar = phi_bar(fol, phi)
    worst = 0.0
    for p in samples:
        for key in twisted.keys():
            val = twisted.coeff(key, p) - plain.coeff(key, p) \
                - bar.coeff(key, p)
            worst = max(worst, abs(jets.value_of(val)))
    return worst


# -- groupoid fixtures ------------------------------------------------------

def foliation_groupoid(n, k):
    """The fiberwise pair groupoid of the foliation acting on the conormal
    bundle: coordinates (y, x, q, v) with y, x leafwise, q transverse, and
    v conormal; multiplication (y,z,q,v).(z,x,q,w) = (y,x,q,v+w).

    The holonomy slot is trivial for planar leaves, so the conormal part
    just adds.  The attached form is sum_m dv_m ^ dq_m.
    """
    fol = CoordFoliation(n, k)
    m = n - k
    names = tuple(f"y{i+1}" for i in range(k)) + \
        tuple(f"x{i+1}" for i in range(k)) + \
        tuple(f"q{i+1}" for i in range(m)) + \
        tuple(f"v{i+1}" for i in range(m))
    ch = Chart(names)

    def s(p):
        return list(p[k:2 * k]) + list(p[2 * k:2 * k + m])

    def t(p):
        return list(p[:k]) + list(p[2 * k:2 * k + m])

    def unit(b):
        return list(b[:k]) + list(b[:k]) + list(b[k:]) + [0.0] * m

    def inv(p):
        return list(p[k:2 * k]) + list(p[:k]) + list(p[2 * k:2 * k + m]) \
            + [-c for c in p[2 * k + m:]]

    def mul(g, h):
        # holonomy action on the conormal slot is trivial here, so the
        # slots simply add
        return list(g[:k]) + list(h[k:2 * k]) + list(h[2 * k:2 * k + m]) \
            + [a + b for a, b in zip(g[2 * k + m:], h[2 * k + m:])]

    def sample_unit(rng):
        return list(rng.uniform(-1.0, 1.0, n))

    def sample_arrow(rng):
        return list(rng.uniform(-1.0, 1.0, 2 * n))

    def sample_pair(rng):
        g2 = sample_arrow(rng)
        y = list(rng.uniform(-1.0, 1.0, k))
        v = list(rng.uniform(-1.0, 1.0, m))
        g1 = y + list(g2[:k]) + list(g2[2 * k:2 * k + m]) + v
        return g1, g2

    def sample_triple(rng):
        g2, g3 = sample_pair(rng)
        y = list(rng.uniform(-1.0, 1.0, k))
        v = list(rng.uniform(-1.0, 1.0, m))
        g1 = y + list(g2[:k]) + list(g2[2 * k:2 * k + m]) + v
        return g1, g2, g3

    def omega_ev(p, vs):
        V, W = vs
        total = 0.0
        for i in range(m):
            total = total + (V[2 * k + m + i] * W[2 * k + i]
                             - V[2 * k + i] * W[2 * k + m + i])
        return total

    G = ChartGroupoid(2 * n, n, s, t, unit, inv, mul,
                      sample_unit, sample_arrow, sample_pair, sample_triple)
    return G, GroupoidForm(Form(ch, 2, omega_ev), None)


def leaf_conormal_dirac(n, k, tol=linear.DEFAULT_TOL):
    """The Dirac space F + conormal(F) on R^n."""
    span = np.zeros((2 * n, n))
    for i in range(k):
        span[i, i] = 1.0
    for m in range(k, n):
        span[n + m, m] = 1.0
    return linear.LinearDirac.from_span(span, tol)


def monodromy_groupoid(n, k):
    """The fiberwise pair groupoid of the foliation itself: coordinates
    (y, x, q) with multiplication (y,z,q).(z,x,q) = (y,x,q)."""
    m = n - k
    names = tuple(f"y{i+1}" for i in range(k)) + \
        tuple(f"x{i+1}" for i in range(k)) + \
        tuple(f"q{i+1}" for i in range(m))
    ch = Chart(names)

    def s(p):
        return list(p[k:2 * k]) + list(p[2 * k:])

    def t(p):
        return list(p[:k]) + list(p[2 * k:])

    def unit(b):
        return list(b[:k]) + list(b[:k]) + list(b[k:])

    def inv(p):
        return list(p[k:2 * k]) + list(p[:k]) + list(p[2 * k:])

    def mul(g, h):
        return list(g[:k]) + list(h[k:2 * k]) + list(h[2 * k:])

    def sample_unit(rng):
        return list(rng.uniform(-1.0, 1.0, n))

    def sample_arrow(rng):
        return list(rng.uniform(-1.0, 1.0, k + n))

    def sample_pair(rng):
        g2 = sample_arrow(rng)
        y = list(rng.uniform(-1.0, 1.0, k))
        return y + list(g2[:k]) + list(g2[2 * k:]), g2

    def sample_triple(rng):
        g2, g3 = sample_pair(rng)
        y = list(rng.uniform(-1.0, 1.0, k))
        return y + list(g2[:k]) + list(g2[2 * k:]), g2, g3

    return ChartGroupoid(k + n, n, s, t, unit, inv, mul,
                         sample_unit, sample_arrow, sample_pair,
                         sample_triple), ch


def exact_multiplicative_form(n, k, sigma):
    """omega = d(t* sigma - s* sigma) on the monodromy groupoid, for a
    1-form sigma on the base."""
    from .geometry import ChartMap, pullback
    G, ch = monodromy_groupoid(n, k)
    bch = sigma.chart
    tmap = ChartMap(ch, bch, G.t)
    smap = ChartMap(ch, bch, G.s)
    omega = ext_d(pullback(tmap, sigma) - pullback(smap, sigma))
    return G, GroupoidForm(omega, None)


def c_omega(G, F, fol, x):
    """The leafwise 2-form c[i, j] = <rho*_omega(a_i), d_j> at the base
    point x of a multiplicative form on the monodromy groupoid, where a_i
    is the algebroid element anchored to the leaf direction d_i."""
    from .groupoid import extract_rho_star
    sp = extract_rho_star(G, F, x)
    out = np.zeros((fol.k, fol.k))
    for i in fol.leaf:
        e = np.zeros(fol.n)
        e[i] = 1.0
        coeff, res, *_ = np.linalg.lstsq(sp.rho, e, rcond=None)
        cov = coeff @ sp.rho_star
        for j in fol.leaf:
            out[i, j] = cov[j]
    return out
