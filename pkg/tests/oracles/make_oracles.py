"""Regenerate the frozen oracle values used by the test suite.

Nothing here imports the package. Each value comes from a method that
shares no code with the library: adaptive quadrature of the Gauss double
integral (scipy, mpmath at 50 digits), the triangle solid-angle formula
evaluated in 50-digit arithmetic, and a plain-Python crossing count.

Run ``python tests/oracles/make_oracles.py`` and paste the printed values
into the tests if a fixture changes.
"""

import math

import mpmath as mp
import numpy as np
from scipy import integrate

mp.mp.dps = 50


def gauss_integrand(s, t, p1, p2, p3, p4):
    d1 = p2 - p1
    d2 = p4 - p3
    r = (p1 + s * d1) - (p3 + t * d2)
    return float(r @ np.cross(d1, d2) / np.linalg.norm(r) ** 3)


def gauss_scipy(p1, p2, p3, p4):
    p1, p2, p3, p4 = (np.asarray(p, dtype=float) for p in (p1, p2, p3, p4))
    val, err = integrate.dblquad(
        lambda t, s: gauss_integrand(s, t, p1, p2, p3, p4), 0.0, 1.0,
        0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    return val, err


def _mpv(p):
    return [mp.mpf(x) for x in p]


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]]


def _sub(a, b):
    return [x - y for x, y in zip(a, b)]


def _norm(a):
    return mp.sqrt(_dot(a, a))


def _triangle(o, a, b, c):
    """Signed solid angle of triangle abc seen from o (50 digits)."""
    r1, r2, r3 = _sub(a, o), _sub(b, o), _sub(c, o)
    n1, n2, n3 = _norm(r1), _norm(r2), _norm(r3)
    num = _dot(r1, _cross(r2, r3))
    den = n1 * n2 * n3 + _dot(r1, r2) * n3 + _dot(r1, r3) * n2 + \
        _dot(r2, r3) * n1
    return 2 * mp.atan2(num, den)


def gauss_mp_quad(p1, p2, p3, p4):
    """Gauss double integral by 50-digit tanh-sinh quadrature."""
    p1, p2, p3, p4 = (_mpv(p) for p in (p1, p2, p3, p4))
    d1, d2 = _sub(p2, p1), _sub(p4, p3)
    c = _cross(d1, d2)

    def f(s, t):
        r = [p1[k] + s * d1[k] - p3[k] - t * d2[k] for k in range(3)]
        return _dot(r, c) / _norm(r) ** 3
    return mp.quad(f, [0, 1], [0, 1])


def gauss_mp_solid(p1, p2, p3, p4):
    """Minus the solid angle that the parallelogram of differences
    ``x - y`` (x on the first edge, y on the second) subtends at the origin,
    split into two triangles and evaluated in 50 digits."""
    p1, p2, p3, p4 = (_mpv(p) for p in (p1, p2, p3, p4))
    a = _sub(p1, p3)
    b = _sub(p2, p3)
    c = _sub(p2, p4)
    d = _sub(p1, p4)
    o = [mp.mpf(0)] * 3
    return -(_triangle(o, a, b, c) + _triangle(o, a, c, d))


def crossings_brute(vertices, nu):
    """Signed crossing count of a closed polygon seen from +nu, in plain
    Python floats."""
    nu = np.asarray(nu, dtype=float)
    nu = nu / np.linalg.norm(nu)
    helper = np.array([1.0, 0.0, 0.0]) if abs(nu[0]) < 0.9 else \
        np.array([0.0, 1.0, 0.0])
    e1 = np.cross(nu, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(nu, e1)
    V = np.asarray(vertices, dtype=float)
    P = [(float(v @ e1), float(v @ e2), float(v @ nu)) for v in V]
    n = len(P)
    total = 0
    for i in range(n):
        a0, a1 = P[i], P[(i + 1) % n]
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            b0, b1 = P[j], P[(j + 1) % n]
            dx1, dy1 = a1[0] - a0[0], a1[1] - a0[1]
            dx2, dy2 = b1[0] - b0[0], b1[1] - b0[1]
            den = dx1 * dy2 - dy1 * dx2
            if den == 0.0:
                continue
            rx, ry = b0[0] - a0[0], b0[1] - a0[1]
            s = (rx * dy2 - ry * dx2) / den
            t = (rx * dy1 - ry * dx1) / den
            if not (0.0 < s < 1.0 and 0.0 < t < 1.0):
                continue
            za = a0[2] + s * (a1[2] - a0[2])
            zb = b0[2] + t * (b1[2] - b0[2])
            cr = dx1 * dy2 - dy1 * dx2
            if za < zb:
                cr = -cr
            total += 1 if cr > 0 else -1
    return total


def trefoil_vertices(n=512, R=2.0, r=0.5):
    t = 2 * np.pi * np.arange(n) / n
    return np.column_stack([(R + r * np.cos(3 * t)) * np.cos(2 * t),
                            (R + r * np.cos(3 * t)) * np.sin(2 * t),
                            r * np.sin(3 * t)])


NEAR_COPLANAR = {
    # name: (p1, p2, p3, p4)
    "tilt_1e-12": ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0),
                   (0.3, 0.5, 1e-12), (0.7, 1.5, -1e-12)),
    "tilt_1e-14": ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0),
                   (-0.2, 0.1, 1e-14), (1.3, 0.4, 0.0)),
    "parallel_gap_1e-4": ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0),
                          (1.0, 1e-4, 1e-6), (0.0, 1e-4, -1e-6)),
    "crossing_gap_1e-3": ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0),
                          (0.5, -0.5, 1e-3), (0.5, 0.5, 1e-3)),
}


if __name__ == "__main__":
    skew = ((0, 0, 0), (1, 0, 0), (0, 0, 1), (0, 1, 1))
    print("skew scipy", gauss_scipy(*skew), "mp", gauss_mp_quad(*skew),
          "solid", gauss_mp_solid(*skew), "-pi/6", -math.pi / 6)
    for name, pts in NEAR_COPLANAR.items():
        print(name, mp.nstr(gauss_mp_solid(*pts), 20))
    print("trefoil crossings z", crossings_brute(trefoil_vertices(),
                                                  (1e-7, 2e-7, 1.0)))
    print("trefoil crossings generic",
          crossings_brute(trefoil_vertices(), (0.31, -0.22, 0.9)))
