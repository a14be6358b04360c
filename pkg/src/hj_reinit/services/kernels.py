"""numba-Kerne fuer die Abstandsorakel.

Normen werden als (kind, p, a) uebergeben: kind 0 = p-Norm mit Exponent p
(``inf`` fuer die Maximumsnorm), kind 1 = ellipsoidal mit 2x2-Matrix a. 1D-Normen
werden vom Aufrufer auf 2D aufgefuellt, die Kerne rechnen immer mit (vx, vy).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

NORM_P = 0
NORM_ELLIPSOIDAL = 1

GOLDEN_TOL = 1e-10
GOLDEN_MAX_ITER = 200

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@njit(cache=True)
def norm2(vx: float, vy: float, kind: int, p: float, a: np.ndarray) -> float:
    if kind == NORM_ELLIPSOIDAL:
        quad = a[0, 0] * vx * vx + 2.0 * a[0, 1] * vx * vy + a[1, 1] * vy * vy
        return math.sqrt(max(quad, 0.0))
    ax = abs(vx)
    ay = abs(vy)
    if math.isinf(p):
        return max(ax, ay)
    if p == 1.0:
        return ax + ay
    if p == 2.0:
        return math.sqrt(ax * ax + ay * ay)
    big = max(ax, ay)
    if big == 0.0:
        return 0.0
    return big * ((ax / big) ** p + (ay / big) ** p) ** (1.0 / p)


@njit(cache=True)
def euclid_point_segment(px: float, py: float, ax: float, ay: float, bx: float, by: float) -> float:
    dx = bx - ax
    dy = by - ay
    length2 = dx * dx + dy * dy
    t = 0.0
    if length2 > 0.0:
        t = ((px - ax) * dx + (py - ay) * dy) / length2
        t = min(1.0, max(0.0, t))
    ex = px - (ax + t * dx)
    ey = py - (ay + t * dy)
    return math.sqrt(ex * ex + ey * ey)


@njit(parallel=True, cache=True)
def euclid_mesh_kernel(points: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Euklidischer Abstand jedes Punktes zum naechsten Element."""
    n = points.shape[0]
    out = np.empty(n)
    for i in prange(n):
        best = np.inf
        for s in range(starts.shape[0]):
            e = euclid_point_segment(points[i, 0], points[i, 1], starts[s, 0], starts[s, 1], ends[s, 0], ends[s, 1])
            if e < best:
                best = e
        out[i] = best
    return out


@njit(cache=True)
def segment_distance(
    px: float, py: float, ax: float, ay: float, bx: float, by: float,
    kind: int, p: float, a: np.ndarray, tol: float, max_iter: int,
) -> float:
    """min_t ||x - (a + t(b - a))|| per Goldenem Schnitt (konvex in t)."""
    dx = bx - ax
    dy = by - ay
    g0 = norm2(px - ax, py - ay, kind, p, a)
    if dx == 0.0 and dy == 0.0:
        return g0
    g1 = norm2(px - bx, py - by, kind, p, a)
    lo = 0.0
    hi = 1.0
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc = norm2(px - (ax + c * dx), py - (ay + c * dy), kind, p, a)
    fd = norm2(px - (ax + d * dx), py - (ay + d * dy), kind, p, a)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if fc <= fd:
            hi = d
            d = c
            fd = fc
            c = hi - _INVPHI * (hi - lo)
            fc = norm2(px - (ax + c * dx), py - (ay + c * dy), kind, p, a)
        else:
            lo = c
            c = d
            fc = fd
            d = lo + _INVPHI * (hi - lo)
            fd = norm2(px - (ax + d * dx), py - (ay + d * dy), kind, p, a)
    mid = 0.5 * (lo + hi)
    gm = norm2(px - (ax + mid * dx), py - (ay + mid * dy), kind, p, a)
    return min(gm, min(fc, fd), min(g0, g1))


@njit(parallel=True, cache=True)
def brute_force_kernel(
    points: np.ndarray, starts: np.ndarray, ends: np.ndarray,
    kind: int, p: float, a: np.ndarray, lower: float, upper: float,
    tol: float, max_iter: int,
) -> np.ndarray:
    """Minimaler Normabstand jedes Punktes zu allen Strecken.

    Strecken, deren euklidische Untergrenze ``lower * d2`` ueber der besten
    Obergrenze ``upper * d2`` liegt, werden ohne Goldenen Schnitt verworfen.
    """
    n = points.shape[0]
    k = starts.shape[0]
    out = np.empty(n)
    for i in prange(n):
        px = points[i, 0]
        py = points[i, 1]
        eu = np.empty(k)
        threshold = np.inf
        for s in range(k):
            e = euclid_point_segment(px, py, starts[s, 0], starts[s, 1], ends[s, 0], ends[s, 1])
            eu[s] = e
            if upper * e < threshold:
                threshold = upper * e
        best = np.inf
        for s in range(k):
            if lower * eu[s] > min(threshold, best):
                continue
            dist = segment_distance(
                px, py, starts[s, 0], starts[s, 1], ends[s, 0], ends[s, 1], kind, p, a, tol, max_iter
            )
            if dist < best:
                best = dist
        out[i] = best
    return out


@njit(cache=True)
def simplex_value(
    v1: float, v2: float, dx: float, dy: float,
    kind: int, p: float, a: np.ndarray, tol: float, max_iter: int,
) -> float:
    """Tsitsiklis-Wert ueber dem Simplex aus x, x + (dx, 0), x + (0, dy).

    Minimiert (1-t) v1 + t v2 + ||((1-t) dx, t dy)|| ueber t in [0, 1].
    """
    if math.isinf(v1) and math.isinf(v2):
        return np.inf
    if math.isinf(v2):
        return v1 + norm2(dx, 0.0, kind, p, a)
    if math.isinf(v1):
        return v2 + norm2(0.0, dy, kind, p, a)
    g0 = v1 + norm2(dx, 0.0, kind, p, a)
    g1 = v2 + norm2(0.0, dy, kind, p, a)
    lo = 0.0
    hi = 1.0
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc = (1.0 - c) * v1 + c * v2 + norm2((1.0 - c) * dx, c * dy, kind, p, a)
    fd = (1.0 - d) * v1 + d * v2 + norm2((1.0 - d) * dx, d * dy, kind, p, a)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if fc <= fd:
            hi = d
            d = c
            fd = fc
            c = hi - _INVPHI * (hi - lo)
            fc = (1.0 - c) * v1 + c * v2 + norm2((1.0 - c) * dx, c * dy, kind, p, a)
        else:
            lo = c
            c = d
            fc = fd
            d = lo + _INVPHI * (hi - lo)
            fd = (1.0 - d) * v1 + d * v2 + norm2((1.0 - d) * dx, d * dy, kind, p, a)
    return min(min(fc, fd), min(g0, g1))


@njit(cache=True)
def local_update(
    phi: np.ndarray, j: int, i: int, hx: float, hy: float,
    kind: int, p: float, a: np.ndarray, tol: float, max_iter: int,
) -> float:
    ny, nx = phi.shape
    best = np.inf
    for sx in (-1, 1):
        i1 = i + sx
        v1 = phi[j, i1] if 0 <= i1 < nx else np.inf
        for sy in (-1, 1):
            j1 = j + sy
            v2 = phi[j1, i] if 0 <= j1 < ny else np.inf
            cand = simplex_value(v1, v2, sx * hx, sy * hy, kind, p, a, tol, max_iter)
            if cand < best:
                best = cand
    return best


@njit(cache=True)
def fast_sweep_kernel(
    phi: np.ndarray, frozen: np.ndarray, hx: float, hy: float,
    kind: int, p: float, a: np.ndarray, conv_tol: float, max_sweeps: int,
    tol: float, max_iter: int,
) -> tuple[int, float]:
    """Gauss-Seidel in den vier Durchlaufrichtungen, ``phi`` wird in-place aktualisiert.

    Returns:
        (Anzahl Durchlaeufe, letzte maximale Aenderung); -1 Durchlaeufe bei
        Nichtkonvergenz.
    """
    ny, nx = phi.shape
    max_change = np.inf
    for sweep in range(max_sweeps):
        order = sweep % 4
        max_change = 0.0
        for jj in range(ny):
            j = jj if order < 2 else ny - 1 - jj
            for ii in range(nx):
                i = ii if (order == 0 or order == 3) else nx - 1 - ii
                if frozen[j, i]:
                    continue
                cand = local_update(phi, j, i, hx, hy, kind, p, a, tol, max_iter)
                old = phi[j, i]
                if cand < old:
                    change = np.inf if math.isinf(old) else old - cand
                    phi[j, i] = cand
                    if change > max_change:
                        max_change = change
        if max_change < conv_tol:
            return sweep + 1, max_change
    return -1, max_change
