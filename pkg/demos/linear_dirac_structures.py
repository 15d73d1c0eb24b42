"""Linear Dirac structures: graphs, images, and induced data.

Builds the two extreme structures (tangent and cotangent), the graph of a
symplectic form, pushes it through a linear map, and reads back the
induced 2-form and bivector.
"""

import numpy as np

from diracgeo import linear


def main():
    rng = np.random.default_rng(0)
    n = 3

    theta = rng.standard_normal((n, n))
    theta = theta - theta.T
    L = linear.from_form(theta)
    print("graph of a random skew form, dim =", L.dim)

    data = linear.induced(L)
    print("induced theta matches input:",
          np.allclose(data.theta, theta, atol=1e-12))
    print("anchor range dimension:", data.range.shape[1])

    psi = rng.standard_normal((n, n)) + 2 * np.eye(n)
    pushed = linear.push_forward(psi, L)
    inv = np.linalg.inv(psi)
    print("push-forward equals graph of psi^-T theta psi^-1:",
          pushed == linear.from_form(inv.T @ theta @ inv))

    back = linear.pull_back(psi, pushed)
    print("round trip recovers L:", back == L)

    # a degenerate example: the projection to the first coordinate
    f = np.zeros((n, n))
    f[0, 0] = 1.0
    TstarM = linear.LinearDirac.from_span(
        np.vstack([np.zeros((n, n)), np.eye(n)]))
    mixed = linear.pull_back(f, TstarM)
    d = linear.induced(mixed)
    print("pull-back along a collapse: kernel dim =", d.kernel.shape[1],
          " range dim =", d.range.shape[1])


if __name__ == "__main__":
    main()
