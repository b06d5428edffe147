"""Quadrature values of the L1 distance between N(0, s1^2) and N(0, s2^2).

Independent of the library's closed form; used to freeze test constants.
"""
import numpy as np
from scipy import integrate, stats


def l1(s1, s2):
    f = lambda x: abs(stats.norm.pdf(x, scale=s1) - stats.norm.pdf(x, scale=s2))
    hi = 40.0 * max(s1, s2)
    # The integrand has kinks at +-x*, so split there.
    xs = np.sqrt(np.log(s2 / s1) * 2 * s1**2 * s2**2 / (s2**2 - s1**2)) if s1 != s2 else 0.0
    parts = [(0.0, xs), (xs, hi)]
    return 2.0 * sum(integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=500)[0] for a, b in parts)


if __name__ == "__main__":
    for s1, s2 in [(1, 2), (1, 1.01), (0.5, 3), (1, 10), (2, 2.5), (0.1, 0.35), (1, 1.1), (3, 7)]:
        print(f"{{{s1}, {s2}, {l1(s1, s2):.15g}}},")
    d = 0.01
    print("first order s1=1 d=0.01:", d * np.sqrt(8 / (np.e * np.pi)))
