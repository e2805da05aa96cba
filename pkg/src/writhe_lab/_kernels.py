"""Compiled O(n^2) kernels: edge-pair solid angles, projected crossings,
segment distances.

Every double sum is reduced with compensated summation in a fixed row-major
order over the upper triangle of the edge-pair matrix, so the serial and the
parallel variants return bit-identical results.
"""

import numpy as np
from numba import njit, prange

# Gauss-Legendre rule for the near-coplanar fallback; fixed so results are
# reproducible.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)
GL_NODES = 0.5 * (_GL_X + 1.0)
GL_WEIGHTS = 0.5 * _GL_W

COPLANAR_REL = 1e-13
TOUCH_REL = 1e-12
NEAR_REL = 1e-2
PARALLEL_REL = 0.1

# Degeneracy codes returned by the crossing kernels.
OK = 0
DEG_EDGE = 1
DEG_ENDPOINT = 2
DEG_COINCIDENT = 3
DEG_OVERLAP = 4
DEG_INTERSECT = 5
DEG_CAPACITY = 6


@njit(cache=True)
def _lex_less(a0, a1, a2, b0, b1, b2):
    if a0 != b0:
        return a0 < b0
    if a1 != b1:
        return a1 < b1
    return a2 < b2


@njit(cache=True)
def _same(p, q):
    return p[0] == q[0] and p[1] == q[1] and p[2] == q[2]


@njit(cache=True)
def _norm(x, y, z):
    return np.sqrt(x * x + y * y + z * z)


@njit(cache=True)
def _tri_solid_angle(ax, ay, az, bx, by, bz, cx, cy, cz):
    # Van Oosterom-Strackee, signed by the orientation of (a, b, c).
    la = _norm(ax, ay, az)
    lb = _norm(bx, by, bz)
    lc = _norm(cx, cy, cz)
    det = (ax * (by * cz - bz * cy)
           - ay * (bx * cz - bz * cx)
           + az * (bx * cy - by * cx))
    ab = ax * bx + ay * by + az * bz
    bc = bx * cx + by * cy + bz * cz
    ca = cx * ax + cy * ay + cz * az
    den = la * lb * lc + ab * lc + bc * la + ca * lb
    return 2.0 * np.arctan2(det, den)


@njit(cache=True)
def _seg_dist(p1x, p1y, p1z, d1x, d1y, d1z, p3x, p3y, p3z, d2x, d2y, d2z):
    rx = p1x - p3x
    ry = p1y - p3y
    rz = p1z - p3z
    a = d1x * d1x + d1y * d1y + d1z * d1z
    e = d2x * d2x + d2y * d2y + d2z * d2z
    f = d2x * rx + d2y * ry + d2z * rz
    c = d1x * rx + d1y * ry + d1z * rz
    b = d1x * d2x + d1y * d2y + d1z * d2z
    denom = a * e - b * b
    if denom > 1e-300 * a * e and denom > 0.0:
        s = (b * f - c * e) / denom
        s = min(max(s, 0.0), 1.0)
    else:
        s = 0.0
    t = (b * s + f) / e
    if t < 0.0:
        t = 0.0
        s = min(max(-c / a, 0.0), 1.0)
    elif t > 1.0:
        t = 1.0
        s = min(max((b - c) / a, 0.0), 1.0)
    return _norm(rx + s * d1x - t * d2x, ry + s * d1y - t * d2y,
                 rz + s * d1z - t * d2z)


@njit(cache=True)
def segment_distance(p1, p2, p3, p4):
    """Minimum distance between segments p1-p2 and p3-p4."""
    return _seg_dist(p1[0], p1[1], p1[2], p2[0] - p1[0], p2[1] - p1[1],
                     p2[2] - p1[2], p3[0], p3[1], p3[2], p4[0] - p3[0],
                     p4[1] - p3[1], p4[2] - p3[2])


@njit(cache=True)
def _point_seg_dist(rx, ry, rz, dx, dy, dz):
    # Distance from the origin offset r to the segment {s d : 0 <= s <= 1}.
    dd = dx * dx + dy * dy + dz * dz
    s = 0.0
    if dd > 0.0:
        s = min(max((rx * dx + ry * dy + rz * dz) / dd, 0.0), 1.0)
    return _norm(rx - s * dx, ry - s * dy, rz - s * dz)


@njit(cache=True)
def sweep_min_distance(a_starts, a_ends, b_starts, b_ends, v, steps):
    """Smallest distance between A and ``B + (k / steps) v`` for
    ``k = 0 .. steps - 1``.

    Pairs are skipped when a capsule bound over the whole sweep cannot beat
    the running minimum; the sweep is visited from its far end, where the
    minimum usually lies.
    """
    na = a_starts.shape[0]
    nb = b_starts.shape[0]
    best = np.inf
    bi = -1
    bj = -1
    bk = -1
    vx, vy, vz = v[0], v[1], v[2]
    for i in range(na):
        p = a_starts[i]
        q = a_ends[i]
        cax = 0.5 * (p[0] + q[0])
        cay = 0.5 * (p[1] + q[1])
        caz = 0.5 * (p[2] + q[2])
        ra = 0.5 * _norm(q[0] - p[0], q[1] - p[1], q[2] - p[2])
        for j in range(nb):
            r = b_starts[j]
            w = b_ends[j]
            cbx = 0.5 * (r[0] + w[0])
            cby = 0.5 * (r[1] + w[1])
            cbz = 0.5 * (r[2] + w[2])
            rb = 0.5 * _norm(w[0] - r[0], w[1] - r[1], w[2] - r[2])
            # Distance from A's midpoint to the path of B's midpoint.
            lb = _point_seg_dist(cax - cbx, cay - cby, caz - cbz, vx, vy, vz)
            if lb - ra - rb >= best:
                continue
            for kk in range(steps):
                k = steps - 1 - kk
                f = k / steps
                d = _seg_dist(p[0], p[1], p[2], q[0] - p[0], q[1] - p[1],
                              q[2] - p[2], r[0] + f * vx, r[1] + f * vy,
                              r[2] + f * vz, w[0] - r[0], w[1] - r[1],
                              w[2] - r[2])
                if d < best:
                    best = d
                    bi = i
                    bj = j
                    bk = k
    return best, bi, bj, bk


@njit(cache=True)
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True)
def _split(a):
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


@njit(cache=True)
def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@njit(cache=True)
def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    e += al + bl
    return _two_sum(s, e)


@njit(cache=True)
def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e += ah * bl + al * bh
    return _two_sum(p, e)


@njit(cache=True)
def _dd_diff(x, y):
    return _two_sum(x, -y)


@njit(cache=True)
def triple_product_dd(p1, p2, p3, p4):
    """(p1 - p3) . ((p2 - p1) x (p4 - p3)) in double-double arithmetic.

    Plain evaluation loses every significant digit for nearly parallel,
    nearly coplanar edges, exactly where the quadrature fallback runs.
    """
    ax, axl = _dd_diff(p2[0], p1[0])
    ay, ayl = _dd_diff(p2[1], p1[1])
    az, azl = _dd_diff(p2[2], p1[2])
    bx, bxl = _dd_diff(p4[0], p3[0])
    by, byl = _dd_diff(p4[1], p3[1])
    bz, bzl = _dd_diff(p4[2], p3[2])
    wx, wxl = _dd_diff(p1[0], p3[0])
    wy, wyl = _dd_diff(p1[1], p3[1])
    wz, wzl = _dd_diff(p1[2], p3[2])
    h1, l1 = _dd_mul(ay, ayl, bz, bzl)
    h2, l2 = _dd_mul(az, azl, by, byl)
    cx, cxl = _dd_add(h1, l1, -h2, -l2)
    h1, l1 = _dd_mul(az, azl, bx, bxl)
    h2, l2 = _dd_mul(ax, axl, bz, bzl)
    cy, cyl = _dd_add(h1, l1, -h2, -l2)
    h1, l1 = _dd_mul(ax, axl, by, byl)
    h2, l2 = _dd_mul(ay, ayl, bx, bxl)
    cz, czl = _dd_add(h1, l1, -h2, -l2)
    sh, sl = _dd_mul(wx, wxl, cx, cxl)
    h1, l1 = _dd_mul(wy, wyl, cy, cyl)
    sh, sl = _dd_add(sh, sl, h1, l1)
    h1, l1 = _dd_mul(wz, wzl, cz, czl)
    sh, sl = _dd_add(sh, sl, h1, l1)
    return sh + sl


@njit(cache=True)
def _line_integral(qx, qy, qz, d2x, d2y, d2z, a):
    """Integral of |q - t d2|^-3 over t in [0, 1], free of cancellation
    when q lies close to the line of d2 but away from the segment."""
    qd = qx * d2x + qy * d2y + qz * d2z
    ts = qd / a
    u0 = -ts
    u1 = 1.0 - ts
    r0 = _norm(qx, qy, qz)
    r1 = _norm(qx - d2x, qy - d2y, qz - d2z)
    if u0 >= 0.0 or u1 <= 0.0:
        # Foot of the perpendicular outside the segment: both terms of the
        # antiderivative have one sign, so rationalize their difference.
        return (u1 + u0) / (r0 * r1 * (u1 * r0 + u0 * r1))
    cx = qy * d2z - qz * d2y
    cy = qz * d2x - qx * d2z
    cz = qx * d2y - qy * d2x
    h2 = (cx * cx + cy * cy + cz * cz) / a
    return (u1 / r1 - u0 / r0) / h2


@njit(cache=True)
def _clip_param(p, o, d, dd):
    s = ((p[0] - o[0]) * d[0] + (p[1] - o[1]) * d[1]
         + (p[2] - o[2]) * d[2]) / dd
    return min(max(s, 0.0), 1.0)


@njit(cache=True)
def gauss_pair_quadrature(p1, p2, p3, p4, nodes, weights):
    """Gauss double integral of the edge pair by quadrature.

    The inner integral along the second edge is done in closed form. The
    outer one uses Gauss-Legendre panels graded geometrically towards the
    places where the integrand can be sharp (edge ends, projections of the
    other edge's endpoints, crossing of the two lines), starting at the
    scale of the segment distance. This keeps nearly touching, nearly
    coplanar pairs accurate.
    """
    d1 = p2 - p1
    d2 = p4 - p3
    cx = d1[1] * d2[2] - d1[2] * d2[1]
    cy = d1[2] * d2[0] - d1[0] * d2[2]
    cz = d1[0] * d2[1] - d1[1] * d2[0]
    # (x - y) . (dx x dy) is constant over the pair.
    w0 = p1 - p3
    numer = triple_product_dd(p1, p2, p3, p4)
    if numer == 0.0:
        return 0.0
    dd1 = d1[0] * d1[0] + d1[1] * d1[1] + d1[2] * d1[2]
    a = d2[0] * d2[0] + d2[1] * d2[1] + d2[2] * d2[2]
    dist = segment_distance(p1, p2, p3, p4)
    h0 = max(0.5 * dist / np.sqrt(dd1), 1e-18)

    anchors = np.empty(5)
    na = 0
    anchors[na] = 0.0
    na += 1
    anchors[na] = 1.0
    na += 1
    anchors[na] = _clip_param(p3, p1, d1, dd1)
    na += 1
    anchors[na] = _clip_param(p4, p1, d1, dd1)
    na += 1
    cc = cx * cx + cy * cy + cz * cz
    if cc > 1e-24 * dd1 * a:
        # Parameter on the first line closest to the second line.
        ex = w0[1] * d2[2] - w0[2] * d2[1]
        ey = w0[2] * d2[0] - w0[0] * d2[2]
        ez = w0[0] * d2[1] - w0[1] * d2[0]
        sx = -(ex * cx + ey * cy + ez * cz) / cc
        if 0.0 < sx < 1.0:
            anchors[na] = sx
            na += 1

    pts = np.empty(na * 132 + 2)
    m = 0
    for k in range(na):
        b = anchors[k]
        pts[m] = b
        m += 1
        off = h0
        while off < 1.0 and m < pts.shape[0] - 2:
            if b - off > 0.0:
                pts[m] = b - off
                m += 1
            if b + off < 1.0:
                pts[m] = b + off
                m += 1
            off *= 2.0
    grid = np.sort(pts[:m])

    acc = 0.0
    for k in range(m - 1):
        lo = grid[k]
        hi = grid[k + 1]
        if hi <= lo:
            continue
        width = hi - lo
        for g in range(nodes.shape[0]):
            s = lo + width * nodes[g]
            acc += width * weights[g] * _line_integral(
                w0[0] + s * d1[0], w0[1] + s * d1[1], w0[2] + s * d1[2],
                d2[0], d2[1], d2[2], a)
    return numer * acc


@njit(cache=True)
def omega(p1, p2, p3, p4, nodes, weights):
    """Signed solid angle of the edge pair (p1->p2, p3->p4).

    Returns NaN when the segments intersect away from a shared endpoint.
    """
    sign = 1.0
    # Canonical endpoint order makes reversal antisymmetry and pair
    # exchange symmetry exact in floating point.
    if _lex_less(p2[0], p2[1], p2[2], p1[0], p1[1], p1[2]):
        p1, p2 = p2, p1
        sign = -sign
    if _lex_less(p4[0], p4[1], p4[2], p3[0], p3[1], p3[2]):
        p3, p4 = p4, p3
        sign = -sign
    if _lex_less(p3[0], p3[1], p3[2], p1[0], p1[1], p1[2]) or (
            _same(p1, p3) and _lex_less(p4[0], p4[1], p4[2],
                                        p2[0], p2[1], p2[2])):
        p1, p3 = p3, p1
        p2, p4 = p4, p2
    if _same(p1, p3) or _same(p1, p4) or _same(p2, p3) or _same(p2, p4):
        return 0.0

    x1, y1, z1 = p1[0], p1[1], p1[2]
    x2, y2, z2 = p2[0], p2[1], p2[2]
    x3, y3, z3 = p3[0], p3[1], p3[2]
    x4, y4, z4 = p4[0], p4[1], p4[2]
    d1x, d1y, d1z = x2 - x1, y2 - y1, z2 - z1
    d2x, d2y, d2z = x4 - x3, y4 - y3, z4 - z3
    r13x, r13y, r13z = x3 - x1, y3 - y1, z3 - z1
    cx = d1y * d2z - d1z * d2y
    cy = d1z * d2x - d1x * d2z
    cz = d1x * d2y - d1y * d2x
    triple = cx * r13x + cy * r13y + cz * r13z
    scale = max(_norm(d1x, d1y, d1z), _norm(d2x, d2y, d2z),
                _norm(r13x, r13y, r13z))
    near = abs(triple) < COPLANAR_REL * scale * scale * scale
    if not near:
        # The closed form is ill-conditioned for nearly parallel edges that
        # nearly touch, even when they are clearly non-coplanar.
        cc = _norm(cx, cy, cz)
        if cc < PARALLEL_REL * _norm(d1x, d1y, d1z) * _norm(d2x, d2y, d2z):
            near = _seg_dist(x1, y1, z1, d1x, d1y, d1z, x3, y3, z3, d2x,
                             d2y, d2z) < NEAR_REL * scale
    if near:
        dist = segment_distance(p1, p2, p3, p4)
        if dist <= TOUCH_REL * scale:
            return np.nan
        return sign * gauss_pair_quadrature(p1, p2, p3, p4, nodes, weights)
    return -sign * closed_form_pair(p1, p2, p3, p4)


@njit(cache=True)
def closed_form_pair(p1, p2, p3, p4):
    """Solid angle of the quadrilateral of endpoint differences, as the sum
    of two Van Oosterom-Strackee triangle terms."""
    r13x, r13y, r13z = p3[0] - p1[0], p3[1] - p1[1], p3[2] - p1[2]
    r14x, r14y, r14z = p4[0] - p1[0], p4[1] - p1[1], p4[2] - p1[2]
    r23x, r23y, r23z = p3[0] - p2[0], p3[1] - p2[1], p3[2] - p2[2]
    r24x, r24y, r24z = p4[0] - p2[0], p4[1] - p2[1], p4[2] - p2[2]
    # Orientation: the negated value equals the Gauss double integral of
    # (x - y) . (dx x dy) / |x - y|^3.
    return (_tri_solid_angle(r13x, r13y, r13z, r14x, r14y, r14z,
                             r24x, r24y, r24z)
            + _tri_solid_angle(r13x, r13y, r13z, r24x, r24y, r24z,
                               r23x, r23y, r23z))


@njit(cache=True)
def _neumaier(s, c, x):
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


@njit(cache=True)
def _fill_rows(starts, ends, r0, r1, out, nodes, weights):
    n = starts.shape[0]
    for i in range(r0, r1):
        row = out[i - r0]
        for j in range(i + 1, n):
            row[j] = omega(starts[i], ends[i], starts[j], ends[j],
                           nodes, weights)


@njit(parallel=True, cache=True)
def _fill_rows_parallel(starts, ends, r0, r1, out, nodes, weights):
    n = starts.shape[0]
    for k in prange(r1 - r0):
        i = r0 + k
        row = out[k]
        for j in range(i + 1, n):
            row[j] = omega(starts[i], ends[i], starts[j], ends[j],
                           nodes, weights)


@njit(cache=True)
def _accumulate_rows(block, r0, r1, comp, acc_s, acc_c, tot):
    n = comp.shape[0]
    bad = -1
    for i in range(r0, r1):
        row = block[i - r0]
        ci = comp[i]
        for j in range(i + 1, n):
            w = row[j]
            if np.isnan(w):
                if bad < 0:
                    bad = i * n + j
                continue
            cj = comp[j]
            s, c = _neumaier(acc_s[ci, cj], acc_c[ci, cj], w)
            acc_s[ci, cj] = s
            acc_c[ci, cj] = c
            s, c = _neumaier(tot[0], tot[1], w)
            tot[0] = s
            tot[1] = c
    return bad


def pair_sums(starts, ends, comp, ncomp, parallel=False, chunk=256):
    """Compensated upper-triangle sums of omega over all edge pairs.

    Returns
    -------
    total : float
        Sum over all pairs i < j.
    blocks : ndarray, shape (ncomp, ncomp)
        ``blocks[k, l]`` sums pairs whose lower-index edge lies in component
        ``k`` and higher-index edge in ``l``.
    bad : tuple or None
        ``(i, j)`` of the first intersecting edge pair, if any.
    """
    n = starts.shape[0]
    acc_s = np.zeros((ncomp, ncomp))
    acc_c = np.zeros((ncomp, ncomp))
    tot = np.zeros(2)
    block = np.zeros((min(chunk, max(n, 1)), n))
    fill = _fill_rows_parallel if parallel else _fill_rows
    bad = -1
    for r0 in range(0, n, chunk):
        r1 = min(n, r0 + chunk)
        fill(starts, ends, r0, r1, block, GL_NODES, GL_WEIGHTS)
        b = _accumulate_rows(block, r0, r1, comp, acc_s, acc_c, tot)
        if b >= 0 and bad < 0:
            bad = b
    blocks = acc_s + acc_c
    return tot[0] + tot[1], blocks, (None if bad < 0 else divmod(bad, n))


@njit(cache=True)
def cross_sum(a_starts, a_ends, b_starts, b_ends, nodes, weights):
    """Compensated sum of omega over the full rectangle A x B, row-major."""
    s = 0.0
    c = 0.0
    for i in range(a_starts.shape[0]):
        for j in range(b_starts.shape[0]):
            w = omega(a_starts[i], a_ends[i], b_starts[j], b_ends[j],
                      nodes, weights)
            if np.isnan(w):
                return np.nan, i, j
            s, c = _neumaier(s, c, w)
    return s + c, -1, -1


@njit(cache=True)
def min_distance(a_starts, a_ends, b_starts, b_ends):
    """Minimum distance between two edge sets and the closest pair."""
    best = np.inf
    bi = -1
    bj = -1
    for i in range(a_starts.shape[0]):
        for j in range(b_starts.shape[0]):
            d = segment_distance(a_starts[i], a_ends[i],
                                 b_starts[j], b_ends[j])
            if d < best:
                best = d
                bi = i
                bj = j
    return best, bi, bj


@njit(cache=True)
def self_min_distance(starts, ends, skip_adjacent_closed):
    """Minimum distance between non-adjacent edges of one chain."""
    n = starts.shape[0]
    best = np.inf
    bi = -1
    bj = -1
    for i in range(n):
        for j in range(i + 2, n):
            if skip_adjacent_closed and i == 0 and j == n - 1:
                continue
            d = segment_distance(starts[i], ends[i], starts[j], ends[j])
            if d < best:
                best = d
                bi = i
                bj = j
    return best, bi, bj


# ---------------------------------------------------------------------------
# Projection crossings


@njit(cache=True)
def projection_basis(nu):
    """Components of ``e1, e2`` with ``e1 x e2 = nu``."""
    if abs(nu[0]) < 0.9:
        ax, ay, az = 1.0, 0.0, 0.0
    else:
        ax, ay, az = 0.0, 1.0, 0.0
    # e1 = nu x a, normalised; e2 = nu x e1.
    e1x = nu[1] * az - nu[2] * ay
    e1y = nu[2] * ax - nu[0] * az
    e1z = nu[0] * ay - nu[1] * ax
    l = _norm(e1x, e1y, e1z)
    e1x /= l
    e1y /= l
    e1z /= l
    e2x = nu[1] * e1z - nu[2] * e1y
    e2y = nu[2] * e1x - nu[0] * e1z
    e2z = nu[0] * e1y - nu[1] * e1x
    return e1x, e1y, e1z, e2x, e2y, e2z


@njit(cache=True)
def _sort_by_key(key, order, bucket, counts, n):
    """Fill ``order[:n]`` with indices sorting ``key`` ascending.

    Bucket pass followed by insertion sort; no allocation, linear time for
    evenly spread keys.
    """
    mn = key[0]
    mx = key[0]
    for i in range(1, n):
        v = key[i]
        if v < mn:
            mn = v
        elif v > mx:
            mx = v
    span = mx - mn
    for b in range(n + 1):
        counts[b] = 0
    for i in range(n):
        b = 0
        if span > 0.0:
            b = int((key[i] - mn) / span * (n - 1))
            if b > n - 1:
                b = n - 1
        bucket[i] = b
        counts[b + 1] += 1
    for b in range(n):
        counts[b + 1] += counts[b]
    for i in range(n):
        b = bucket[i]
        order[counts[b]] = i
        counts[b] += 1
    for a in range(1, n):
        x = order[a]
        v = key[x]
        b = a - 1
        while b >= 0 and key[order[b]] > v:
            order[b + 1] = order[b]
            b -= 1
        order[b + 1] = x


@njit(cache=True)
def crossings_kernel(starts, ends, comp, local, sizes, closed, nu, diam,
                     rel_tol, param_tol, out_i, out_j, out_s, out_t,
                     out_sign, out_over, out_x, out_y):
    """Enumerate transversal crossings of the projection along ``nu``.

    Broad phase sorts projected edges by their minimum first coordinate and
    sweeps; narrow phase solves the 2-D segment intersection. Returns
    ``(count, status, feat_a, feat_b)``.
    """
    work = np.empty((16, starts.shape[0]))
    iwork = np.empty((3, starts.shape[0] + 1), dtype=np.int64)
    return _crossings(starts, ends, comp, local, sizes, closed, nu, diam,
                      rel_tol, param_tol, out_i, out_j, out_s, out_t,
                      out_sign, out_over, out_x, out_y, work, iwork)


@njit(cache=True)
def _crossings(starts, ends, comp, local, sizes, closed, nu, diam, rel_tol,
               param_tol, out_i, out_j, out_s, out_t, out_sign, out_over,
               out_x, out_y, work, iwork):
    n = starts.shape[0]
    e1x, e1y, e1z, e2x, e2y, e2z = projection_basis(nu)
    ax = work[0]
    ay = work[1]
    bx = work[2]
    by = work[3]
    az = work[4]
    bz = work[5]
    lo = work[6]
    hi = work[7]
    dx = work[8]
    dy = work[9]
    ln = work[10]
    ylo = work[11]
    yhi = work[12]
    tol_len = rel_tol * diam
    for i in range(n):
        p = starts[i]
        q = ends[i]
        ax[i] = p[0] * e1x + p[1] * e1y + p[2] * e1z
        ay[i] = p[0] * e2x + p[1] * e2y + p[2] * e2z
        az[i] = p[0] * nu[0] + p[1] * nu[1] + p[2] * nu[2]
        bx[i] = q[0] * e1x + q[1] * e1y + q[2] * e1z
        by[i] = q[0] * e2x + q[1] * e2y + q[2] * e2z
        bz[i] = q[0] * nu[0] + q[1] * nu[1] + q[2] * nu[2]
        dx[i] = bx[i] - ax[i]
        dy[i] = by[i] - ay[i]
        ln[i] = np.sqrt(dx[i] * dx[i] + dy[i] * dy[i])
        if ln[i] < tol_len:
            return 0, DEG_EDGE, i, -1
        lo[i] = min(ax[i], bx[i])
        hi[i] = max(ax[i], bx[i])
        ylo[i] = min(ay[i], by[i])
        yhi[i] = max(ay[i], by[i])
    order = iwork[0]
    _sort_by_key(lo, order, iwork[1], iwork[2], n)
    # Sorted copies keep the inner loop on contiguous memory.
    slo = work[13]
    sylo = work[14]
    syhi = work[15]
    for oi in range(n):
        k = order[oi]
        slo[oi] = lo[k]
        sylo[oi] = ylo[k]
        syhi[oi] = yhi[k]
    cap = out_i.shape[0]
    count = 0
    for oi in range(n):
        i = order[oi]
        reach = hi[i] + tol_len
        ylo_i = ylo[i] - tol_len
        yhi_i = yhi[i] + tol_len
        d1x = dx[i]
        d1y = dy[i]
        l1 = ln[i]
        comp_i = comp[i]
        local_i = local[i]
        size_i = sizes[comp_i]
        closed_i = closed[comp_i]
        for oj in range(oi + 1, n):
            if slo[oj] > reach:
                break
            if syhi[oj] < ylo_i or sylo[oj] > yhi_i:
                continue
            j = order[oj]
            # Inlined neighbour test; a call per pair costs more than the
            # rest of the narrow phase.
            if comp_i == comp[j]:
                gap = abs(local_i - local[j])
                if gap == 1 or (closed_i and gap == size_i - 1):
                    continue
            d2x = dx[j]
            d2y = dy[j]
            den = d1x * d2y - d1y * d2x
            rx = ax[j] - ax[i]
            ry = ay[j] - ay[i]
            l2 = ln[j]
            if abs(den) <= 1e-12 * l1 * l2:
                # Parallel in projection: degenerate only if collinear and
                # overlapping.
                off = abs(rx * d1y - ry * d1x) / l1
                if off < tol_len:
                    u0 = (rx * d1x + ry * d1y) / (l1 * l1)
                    u1 = ((bx[j] - ax[i]) * d1x + (by[j] - ay[i]) * d1y) \
                        / (l1 * l1)
                    if max(u0, u1) >= -param_tol and \
                            min(u0, u1) <= 1.0 + param_tol:
                        return count, DEG_OVERLAP, i, j
                continue
            s = (rx * d2y - ry * d2x) / den
            t = (rx * d1y - ry * d1x) / den
            if s < -param_tol or s > 1.0 + param_tol or \
                    t < -param_tol or t > 1.0 + param_tol:
                continue
            if s <= param_tol or s >= 1.0 - param_tol or \
                    t <= param_tol or t >= 1.0 - param_tol:
                return count, DEG_ENDPOINT, i, j
            zi = az[i] + s * (bz[i] - az[i])
            zj = az[j] + t * (bz[j] - az[j])
            if abs(zi - zj) < tol_len:
                return count, DEG_INTERSECT, i, j
            if count >= cap:
                return count, DEG_CAPACITY, i, j
            # Over strand is nearer the viewer at +nu; sign of
            # (t_over x t_under) . nu.
            if zi > zj:
                cr = d1x * d2y - d1y * d2x
                over = 0
            else:
                cr = d2x * d1y - d2y * d1x
                over = 1
            out_i[count] = i
            out_j[count] = j
            out_s[count] = s
            out_t[count] = t
            out_sign[count] = 1 if cr > 0 else -1
            out_over[count] = over
            out_x[count] = ax[i] + s * d1x
            out_y[count] = ay[i] + s * d1y
            count += 1
    for a in range(count):
        for b in range(a + 1, count):
            if _norm(out_x[a] - out_x[b], out_y[a] - out_y[b], 0.0) < tol_len:
                return count, DEG_COINCIDENT, a, b
    return count, OK, -1, -1


@njit(cache=True)
def directional_writhe_batch(starts, ends, comp, local, sizes, closed,
                             directions, diam, rel_tol, param_tol, cap):
    """Signed crossing totals for many directions; status per direction."""
    m = directions.shape[0]
    values = np.zeros(m, dtype=np.int64)
    status = np.zeros(m, dtype=np.int64)
    oi = np.empty(cap, dtype=np.int64)
    oj = np.empty(cap, dtype=np.int64)
    os_ = np.empty(cap)
    ot = np.empty(cap)
    osg = np.empty(cap, dtype=np.int64)
    oov = np.empty(cap, dtype=np.int64)
    ox = np.empty(cap)
    oy = np.empty(cap)
    work = np.empty((16, starts.shape[0]))
    iwork = np.empty((3, starts.shape[0] + 1), dtype=np.int64)
    for k in range(m):
        count, st, _, _ = _crossings(
            starts, ends, comp, local, sizes, closed, directions[k], diam,
            rel_tol, param_tol, oi, oj, os_, ot, osg, oov, ox, oy, work,
            iwork)
        status[k] = st
        tot = 0
        for c in range(count):
            tot += osg[c]
        values[k] = tot
    return values, status
