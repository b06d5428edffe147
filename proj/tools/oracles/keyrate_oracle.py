"""Heterodyne reverse-reconciliation key rate from the covariance matrix.

Written independently of the library: I_AB comes from the conditional
variances of the prepare-and-measure data model, chi_BE from a numeric
Williamson spectrum and the heterodyne-conditioned Schur complement.
"""
import numpy as np


def h(nu):
    x = (nu - 1.0) / 2.0
    return 0.0 if x <= 0 else (x + 1) * np.log2(x + 1) - x * np.log2(x)


def spectrum(g):
    m = g.shape[0] // 2
    om = np.kron(np.eye(m), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    ev = np.linalg.eigvals(1j * om @ g)
    return np.sort(np.abs(ev.real))[::2]


def rate(t, xi, v, beta):
    va = v - 1.0
    # Per coordinate: Var(y) = T Va/2 + 1 + T xi/2, Var(y|x) = 1 + T xi/2.
    var_y = t * va / 2 + 1 + t * xi / 2
    var_y_x = 1 + t * xi / 2
    i_ab = 2 * 0.5 * np.log2(var_y / var_y_x)
    vb = t * (va + xi) + 1
    c = np.sqrt(t * (v * v - 1))
    z = np.diag([1.0, -1.0])
    g = np.block([[v * np.eye(2), c * z], [c * z, vb * np.eye(2)]])
    nus = spectrum(g)
    ga, gb, s = g[:2, :2], g[2:, 2:], g[:2, 2:]
    cond = ga - s @ np.linalg.inv(gb + np.eye(2)) @ s.T
    nu3 = np.sqrt(np.linalg.det(cond))
    chi = sum(h(n) for n in nus) - h(nu3)
    return i_ab, chi, beta * i_ab - chi, list(nus) + [nu3]


if __name__ == "__main__":
    for args in [(0.9, 0.01, 11.0, 0.95), (0.5, 0.05, 5.0, 0.95), (0.2, 0.02, 21.0, 0.98), (1.0, 0.0, 5.0, 1.0)]:
        i_ab, chi, r, nus = rate(*args)
        print(args, f"i_ab={i_ab:.15g} chi={chi:.15g} rate={r:.15g}", [f"{n:.15g}" for n in nus])
