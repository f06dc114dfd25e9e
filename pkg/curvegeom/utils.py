"""
Vectorised helpers for closed polylines: orientation tests, segment
intersection, ray-crossing interiority and point-to-edge distances.

All functions take the vertex array of an implicitly closed polyline
(shape ``(N, 2)``, closing vertex not repeated).
"""

from typing import Optional, Tuple

import numpy as np


def cross2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """z-component of the cross product of two (batches of) planar vectors"""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def orient(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Twice the signed area of triangle (p, q, r); > 0 when r is left of p->q"""
    return cross2(q - p, r - p)


def edge_vectors(points: np.ndarray) -> np.ndarray:
    """Edge i runs from vertex i to vertex i+1 (mod N)"""
    return np.roll(points, -1, axis=0) - points


def spacing_variation(edge_lengths: np.ndarray) -> float:
    """(max - min) / mean of the edge lengths"""
    mean = float(np.mean(edge_lengths))
    if mean <= 0.0:
        return float("inf")
    return float((np.max(edge_lengths) - np.min(edge_lengths)) / mean)


def _on_segment(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    """True where r lies inside the bounding box of segment p-q"""
    lo = np.minimum(p, q)
    hi = np.maximum(p, q)
    return np.all((r >= lo) & (r <= hi), axis=-1)


def find_self_intersection(
    points: np.ndarray, block: int = 256
) -> Optional[Tuple[int, int]]:
    """
    Find the first pair of non-adjacent edges that intersect

    Edges are compared all-pairs with exact orientation signs; collinear
    touching counts as an intersection. Adjacent edges (sharing a vertex)
    are skipped.

    Args:
        points: Vertex array of shape (N, 2)
        block: Number of edges compared per vectorised batch

    Returns:
        (i, j) edge indices with i < j, or None when the polyline is simple
    """
    n = len(points)
    a = points
    b = np.roll(points, -1, axis=0)
    idx = np.arange(n)

    for start in range(0, n, block):
        rows = idx[start : start + block]
        ai = a[rows][:, None, :]
        bi = b[rows][:, None, :]
        aj = a[None, :, :]
        bj = b[None, :, :]

        d1 = orient(ai, bi, aj)
        d2 = orient(ai, bi, bj)
        d3 = orient(aj, bj, ai)
        d4 = orient(aj, bj, bi)

        proper = (d1 * d2 < 0) & (d3 * d4 < 0)
        touch = (
            ((d1 == 0) & _on_segment(ai, bi, aj))
            | ((d2 == 0) & _on_segment(ai, bi, bj))
            | ((d3 == 0) & _on_segment(aj, bj, ai))
            | ((d4 == 0) & _on_segment(aj, bj, bi))
        )

        ii = rows[:, None]
        jj = idx[None, :]
        valid = (jj > ii + 1) & ~((ii == 0) & (jj == n - 1))
        hit = (proper | touch) & valid

        if hit.any():
            r, c = np.argwhere(hit)[0]
            return int(rows[r]), int(c)

    return None


def points_inside(points: np.ndarray, query: np.ndarray, block: int = 1024) -> np.ndarray:
    """
    Even-odd ray-crossing test for arbitrary query points

    Args:
        points: Polygon vertices, shape (N, 2)
        query: Points to classify, shape (M, 2)
        block: Query points per vectorised batch

    Returns:
        Boolean array of shape (M,)
    """
    query = np.atleast_2d(np.asarray(query, dtype=float))
    a = points[None, :, :]
    b = np.roll(points, -1, axis=0)[None, :, :]
    out = np.zeros(len(query), dtype=bool)

    for start in range(0, len(query), block):
        q = query[start : start + block]
        x = q[:, 0:1]
        y = q[:, 1:2]
        crosses = (a[..., 1] <= y) != (b[..., 1] <= y)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = a[..., 0] + (y - a[..., 1]) * (b[..., 0] - a[..., 0]) / (
                b[..., 1] - a[..., 1]
            )
        left = crosses & (x_cross < x)
        out[start : start + block] = (left.sum(axis=1) % 2) == 1

    return out


def grid_inside_mask(points: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """
    Scanline ray-crossing interiority for a rectangular grid

    One horizontal line per grid row: edge crossings are sorted once and
    every grid x is classified by how many crossings lie to its left.

    Returns:
        Boolean mask of shape (len(ys), len(xs))
    """
    a = points
    b = np.roll(points, -1, axis=0)
    mask = np.zeros((len(ys), len(xs)), dtype=bool)

    for row, y in enumerate(ys):
        crosses = (a[:, 1] <= y) != (b[:, 1] <= y)
        if not crosses.any():
            continue
        xa, ya = a[crosses, 0], a[crosses, 1]
        xb, yb = b[crosses, 0], b[crosses, 1]
        x_cross = np.sort(xa + (y - ya) * (xb - xa) / (yb - ya))
        left_count = np.searchsorted(x_cross, xs, side="left")
        mask[row] = (left_count % 2) == 1

    return mask


def distances_to_edges(points: np.ndarray, query: np.ndarray, block: int = 512) -> np.ndarray:
    """
    Euclidean distance from each query point to the nearest polyline edge

    Args:
        points: Polyline vertices, shape (N, 2)
        query: Points, shape (M, 2)
        block: Query points per vectorised batch

    Returns:
        Array of shape (M,)
    """
    query = np.atleast_2d(np.asarray(query, dtype=float))
    e = edge_vectors(points)
    ee = np.einsum("ij,ij->i", e, e)
    out = np.empty(len(query))

    for start in range(0, len(query), block):
        q = query[start : start + block][:, None, :]
        w = q - points[None, :, :]
        t = np.clip(np.einsum("mij,ij->mi", w, e) / ee[None, :], 0.0, 1.0)
        d = w - t[..., None] * e[None, :, :]
        out[start : start + block] = np.sqrt(np.einsum("mij,mij->mi", d, d).min(axis=1))

    return out
