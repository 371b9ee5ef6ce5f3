"""Marching squares on a masked scalar grid."""

from __future__ import annotations

import numpy as np

__all__ = ["marching_squares"]

# edges: 0 bottom (i,j)-(i+1,j), 1 right (i+1,j)-(i+1,j+1), 2 top (i,j+1)-(i+1,j+1), 3 left (i,j)-(i,j+1)
# corner bits: 1 = (i,j), 2 = (i+1,j), 4 = (i+1,j+1), 8 = (i,j+1)
_SEGMENTS = {
    0: (), 15: (),
    1: ((3, 0),), 14: ((0, 3),),
    2: ((0, 1),), 13: ((1, 0),),
    3: ((3, 1),), 12: ((1, 3),),
    4: ((1, 2),), 11: ((2, 1),),
    6: ((0, 2),), 9: ((2, 0),),
    7: ((3, 2),), 8: ((2, 3),),
}

# corner offsets counter-clockwise; edge k joins corner k to corner k + 1
_CORNERS = ((0, 0), (1, 0), (1, 1), (0, 1))


def _edge_key(i, j, e):
    # canonical key shared by the two cells adjacent to an edge
    if e == 0:
        return ("h", i, j)
    if e == 2:
        return ("h", i, j + 1)
    if e == 3:
        return ("v", i, j)
    return ("v", i + 1, j)


def marching_squares(xs, ys, values, level: float, cuts: dict | None = None) -> list[np.ndarray]:
    """Polylines of ``values == level`` for ``values[i, j]`` sampled at ``(xs[i], ys[j])``.

    NaN nodes are masked.  A cell with masked corners is contoured on the
    polygon of its finite corners plus, where ``cuts`` supplies them, the last
    evaluable point on each half-masked edge (``cuts[edge_key] = ((x, y), value)``).
    Polylines are returned as ``(k, 2)`` arrays, closed ones repeating their
    first point at the end.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    z = np.asarray(values, dtype=float) - level
    nx, ny = z.shape
    cuts = cuts or {}
    points: dict = {}

    def point(i, j, e):
        key = _edge_key(i, j, e)
        if key not in points:
            kind, a, b = key
            if kind == "h":
                z0, z1 = z[a, b], z[a + 1, b]
                s = z0 / (z0 - z1) if z0 != z1 else 0.5
                points[key] = (xs[a] + s * (xs[a + 1] - xs[a]), ys[b])
            else:
                z0, z1 = z[a, b], z[a, b + 1]
                s = z0 / (z0 - z1) if z0 != z1 else 0.5
                points[key] = (xs[a], ys[b] + s * (ys[b + 1] - ys[b]))
        return key

    links: dict = {}

    def connect(a, b):
        if a == b:
            return
        links.setdefault(a, []).append(b)
        links.setdefault(b, []).append(a)

    def polygon(i, j, c):
        # ring of (position, value, tag) where tag names the segment to the next vertex:
        # ("full", e) along a whole cell edge, ("half", key) along part of one, None across the cell
        ring = []
        for k in range(4):
            n = (k + 1) % 4
            key = _edge_key(i, j, k)
            cut = cuts.get(key) if np.isnan(c[k]) != np.isnan(c[n]) else None
            if not np.isnan(c[k]):
                di, dj = _CORNERS[k]
                if not np.isnan(c[n]):
                    tag = ("full", k)
                else:
                    tag = ("half", key) if cut else None
                ring.append(((xs[i + di], ys[j + dj]), c[k], tag))
            if cut:
                pos, val = cut
                ring.append((pos, val - level, ("half", key) if np.isnan(c[k]) else None))
        if len(ring) < 3:
            return
        hits = []
        for m, (pa, va, key) in enumerate(ring):
            pb, vb, _ = ring[(m + 1) % len(ring)]
            if (va > 0) == (vb > 0):
                continue
            if key is None:
                hk = ("c", i, j, m)
            elif key[0] == "full":
                hits.append((m, point(i, j, key[1])))
                continue
            else:
                hk = ("e",) + key[1]
            if hk not in points:
                s = va / (va - vb)
                points[hk] = (pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1]))
            hits.append((m, hk))
        if len(hits) == 2:
            connect(hits[0][1], hits[1][1])
        elif len(hits) >= 4:
            # pair crossings so the minority sign is cut off, like the saddle rule
            positive = np.mean([v for _, v, _ in ring]) > 0
            first_sign = ring[(hits[0][0] + 1) % len(ring)][1] > 0
            start = 0 if first_sign != positive else 1
            order = hits[start:] + hits[:start]
            for a in range(0, len(order) - 1, 2):
                connect(order[a][1], order[a + 1][1])

    for i in range(nx - 1):
        for j in range(ny - 1):
            c = (z[i, j], z[i + 1, j], z[i + 1, j + 1], z[i, j + 1])
            if any(np.isnan(v) for v in c):
                polygon(i, j, c)
                continue
            idx = (c[0] > 0) | (c[1] > 0) << 1 | (c[2] > 0) << 2 | (c[3] > 0) << 3
            if idx in (5, 10):
                centre = 0.25 * sum(c) > 0
                if (idx == 5) == centre:
                    segs = ((3, 2), (1, 0))
                else:
                    segs = ((3, 0), (1, 2))
            else:
                segs = _SEGMENTS[idx]
            for e0, e1 in segs:
                connect(point(i, j, e0), point(i, j, e1))

    lines = []
    seen = set()
    # open chains first (start at degree-1 nodes), then closed loops
    starts = sorted((k for k, v in links.items() if len(v) == 1), key=str)
    starts += sorted((k for k, v in links.items() if len(v) != 1), key=str)
    for start in starts:
        if start in seen:
            continue
        chain = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            nxt = [n for n in links[cur] if n != prev and n not in seen]
            if not nxt:
                if len(chain) > 2 and start in links[cur] and prev is not None:
                    chain.append(start)
                break
            prev, cur = cur, nxt[0]
            chain.append(cur)
            seen.add(cur)
        if len(chain) >= 2:
            lines.append(np.array([points[k] for k in chain]))
    return lines
