"""Geometric authoring of tangles.

A sketch places vertices at plane coordinates and routes named strands
through them as polylines; boundary ends sit on a circle at given angles.
Slot numbering (counterclockwise), over-axes, and crossing signs are derived
from the geometry, which keeps hand-authored catalog data honest: the
resulting tangle is validated, so a drawing mistake surfaces as a planarity
or orientation violation instead of silently wrong data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .diagram import CROSSING, SINGULAR, Tangle, Vertex, bport, derived_sign, require_valid, vport

_RADIUS = 10.0


def bpt(angle_deg: float):
    """A strand end on the boundary circle at the given angle (degrees)."""
    return ("bpt", float(angle_deg) % 360.0)


def _pos_of(way, vertices):
    if isinstance(way, tuple) and way and way[0] == "bpt":
        a = math.radians(way[1])
        return (_RADIUS * math.cos(a), _RADIUS * math.sin(a))
    if isinstance(way, str):
        return vertices[way][0]
    return (float(way[0]), float(way[1]))


def _angle(frm, to) -> float:
    return math.degrees(math.atan2(to[1] - frm[1], to[0] - frm[0])) % 360.0


@dataclass
class _Visit:
    strand: str
    seq: int  # visit order within the whole sketch, for determinism
    in_angle: float
    out_angle: float
    in_slot: int = -1
    out_slot: int = -1


@dataclass
class Built:
    tangle: Tangle
    strand_order: tuple
    endpoint_of: dict  # (strand, "start"|"end") -> boundary index
    vertex_ids: dict  # vertex name -> vid


class TangleSketch:
    def __init__(self):
        self._vertices = {}  # name -> (pos, kind, over_strand)
        self._vorder = []
        self._strands = []  # (name, waypoints)

    def vertex(self, name, pos, kind=CROSSING, over=None):
        if kind == CROSSING and over is None:
            raise ValueError(f"crossing {name!r} needs over=<strand name>")
        self._vertices[name] = ((float(pos[0]), float(pos[1])), kind, over)
        self._vorder.append(name)
        return self

    def strand(self, name, waypoints):
        if len(waypoints) < 2:
            raise ValueError("strand needs at least start and end")
        for w in (waypoints[0], waypoints[-1]):
            if not (isinstance(w, tuple) and w and w[0] == "bpt"):
                raise ValueError("strand must start and end on the boundary")
        self._strands.append((name, list(waypoints)))
        return self

    def build(self) -> Built:
        vpos = {n: v[0] for n, v in self._vertices.items()}

        # Boundary points in counterclockwise order.
        ends = []  # (angle, strand, which)
        for sname, ways in self._strands:
            ends.append((ways[0][1], sname, "start"))
            ends.append((ways[-1][1], sname, "end"))
        ends.sort()
        angles = [a for a, _, _ in ends]
        if len(set(angles)) != len(angles):
            raise ValueError("boundary angles collide")
        endpoint_of = {}
        flags = []
        for i, (_, sname, which) in enumerate(ends):
            endpoint_of[(sname, which)] = i
            flags.append("in" if which == "start" else "out")

        # Collect visits per vertex with approach/departure angles.
        visits = {n: [] for n in self._vertices}
        seq = 0
        for sname, ways in self._strands:
            for j, w in enumerate(ways):
                if isinstance(w, str):
                    prev = _pos_of(ways[j - 1], self._vertices)
                    nxt = _pos_of(ways[j + 1], self._vertices)
                    here = vpos[w]
                    visits[w].append(
                        _Visit(sname, seq, _angle(here, prev), _angle(here, nxt))
                    )
                    seq += 1

        vertex_ids = {}
        verts = {}
        for vid, name in enumerate(self._vorder):
            vertex_ids[name] = vid
            vs = visits[name]
            if len(vs) != 2:
                raise ValueError(f"vertex {name!r} has {len(vs)} strand visits, wants 2")
            darts = []  # (angle, visit, "in"|"out")
            for v in vs:
                darts.append((v.in_angle, v, "in"))
                darts.append((v.out_angle, v, "out"))
            if len({round(a, 6) for a, _, _ in darts}) != 4:
                raise ValueError(f"vertex {name!r}: dart angles collide")
            darts.sort(key=lambda d: d[0])
            owners = [id(v) for _, v, _ in darts]
            if owners[0] != owners[2] or owners[1] != owners[3] or owners[0] == owners[1]:
                raise ValueError(f"vertex {name!r}: strands do not interleave (not transverse)")
            for slot, (_, v, side) in enumerate(darts):
                if side == "in":
                    v.in_slot = slot
                else:
                    v.out_slot = slot

            _, kind, over = self._vertices[name]
            if kind == SINGULAR:
                verts[vid] = Vertex(SINGULAR)
            else:
                # over names a strand, or (strand, visit index) for self-crossings
                if isinstance(over, tuple):
                    over_name, over_ix = over
                    pool = sorted((v for v in vs if v.strand == over_name), key=lambda v: v.seq)
                    over_visits = [pool[over_ix]]
                else:
                    over_visits = [v for v in vs if v.strand == over]
                if len(over_visits) != 1:
                    raise ValueError(f"vertex {name!r}: over strand {over!r} ambiguous")
                verts[vid] = Vertex(CROSSING, 0, over_visits[0].in_slot % 2)

        # Edges along each strand.
        visit_iters = {n: sorted(visits[n], key=lambda v: v.seq) for n in visits}
        taken = {}
        edges = []
        for sname, ways in self._strands:
            prev_port = bport(endpoint_of[(sname, "start")])
            for w in ways:
                if isinstance(w, str):
                    pool = [v for v in visit_iters[w] if v.strand == sname]
                    key = (w, sname)
                    v = pool[taken.get(key, 0)]
                    taken[key] = taken.get(key, 0) + 1
                    vid = vertex_ids[w]
                    edges.append((prev_port, vport(vid, v.in_slot)))
                    prev_port = vport(vid, v.out_slot)
            edges.append((prev_port, bport(endpoint_of[(sname, "end")])))

        t = Tangle(flags, verts, edges)
        # Fill in derived crossing signs, then validate for real.
        fixed = {}
        for vid, v in t.vertices.items():
            if v.is_crossing():
                sign = derived_sign(t, vid)
                if sign is None:
                    raise ValueError(f"vertex {vid}: cannot derive sign")
                fixed[vid] = Vertex(CROSSING, sign, v.over_axis)
            else:
                fixed[vid] = v
        t = Tangle(flags, fixed, edges)
        require_valid(t)
        return Built(t, tuple(n for n, _ in self._strands), endpoint_of, vertex_ids)
