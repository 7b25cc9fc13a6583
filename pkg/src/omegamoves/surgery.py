"""Embeddings of move sides in host tangles, region extraction, and splicing.

An embedding matches a pattern tangle inside a host.  Vertexful patterns are
matched by rotation-preserving vertex correspondence (every internal pattern
face must be an actual host face).  Vertex-free patterns (one or two disjoint
arcs) are matched as pieces of host edges joined through a face corridor,
which is how crossing-increasing steps grab strands.

The cut of an embedding assigns each pattern boundary point a cut point on a
host edge; splicing replaces the enclosed material with a replacement tangle
that has the same boundary interface.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import (
    Tangle,
    Vertex,
    bport,
    canonical_labeling,
    is_bport,
    trace_faces,
    validate,
    vport,
)


class MatchError(ValueError):
    pass


class RegionError(ValueError):
    pass


class SpliceError(ValueError):
    pass


class InterfaceError(ValueError):
    pass


@dataclass(frozen=True)
class CutRegion:
    """A disk subregion of a host, delimited by cut points on host edges.

    ``edge_cuts`` maps host edge index -> ordered tokens (pattern boundary
    indices) from the edge source to its destination.  ``inside_pieces`` holds
    (edge, piece_index) pairs: cutting an edge at k tokens makes k+1 pieces
    numbered from the source.  ``corridors`` counts face bands that join
    otherwise separate pieces (arc-pattern matches).
    """

    endpoints: tuple  # interface flags, one per cut token
    inside_vertices: frozenset
    edge_cuts: tuple  # ((edge_index, (token, ...)), ...)
    inside_pieces: frozenset  # (edge_index, piece_index)
    interior_edges: frozenset  # edge indices fully inside
    corridors: int = 0

    def cut_map(self):
        return dict(self.edge_cuts)


@dataclass(frozen=True)
class Embedding:
    """A match of a pattern in a host, with its cut region."""

    kind: str  # "vertex" | "arcs"
    pattern_endpoints: tuple
    vmap: tuple  # ((pattern vid, host vid, rot), ...) sorted by pattern vid
    region: CutRegion
    sort_key: tuple = ()

    def host_vertex(self, pvid: int):
        for p, h, r in self.vmap:
            if p == pvid:
                return h, r
        raise KeyError(pvid)


# ---------------------------------------------------------------------------
# Vertexful matching


def _pattern_shape(pattern: Tangle):
    """Classify a pattern: 'vertex' (all strands meet vertices) or 'arcs'."""
    arcs = [
        (src, dst) for src, dst in pattern.edges if is_bport(src) and is_bport(dst)
    ]
    if not pattern.vertices:
        return "arcs", arcs
    if arcs:
        raise MatchError("patterns mixing free arcs and vertices are not supported")
    return "vertex", []


def _internal_faces(pattern: Tangle):
    faces = []
    for face in trace_faces(pattern):
        ok = True
        for dart in face:
            kind, k, end = dart
            if kind != "e":
                ok = False
                break
            node = pattern.edges[k][end]
            if is_bport(node):
                ok = False
                break
        if ok:
            faces.append(face)
    return faces


def _host_face_index(host: Tangle):
    dart_face = {}
    lengths = {}
    for fid, face in enumerate(trace_faces(host)):
        lengths[fid] = len(face)
        for dart in face:
            dart_face[dart] = fid
    return dart_face, lengths


def _match_vertexful(pattern: Tangle, host: Tangle):
    pverts = sorted(pattern.vertices)
    anchor = pverts[0]
    host_dart_face, _ = _host_face_index(host)
    pattern_internal = _internal_faces(pattern)
    results = []

    # Pattern edges grouped for propagation.
    vv_edges = []  # (k, (p1, s1), (p2, s2))
    bv_edges = []  # (k, b index, (p, s), enters_region: bool)
    for k, (src, dst) in enumerate(pattern.edges):
        if not is_bport(src) and not is_bport(dst):
            vv_edges.append((k, (src[1], src[2]), (dst[1], dst[2])))
        elif is_bport(src):
            bv_edges.append((k, src[1], (dst[1], dst[2]), True))
        else:
            bv_edges.append((k, dst[1], (src[1], src[2]), False))

    def try_anchor(hvid, rot):
        amap = {anchor: (hvid, rot)}
        queue = [anchor]
        pedge_to_hedge = {}
        while queue:
            p = queue.pop()
            h, r = amap[p]
            pv, hv = pattern.vertices[p], host.vertices[h]
            if pv.kind != hv.kind:
                return None
            if pv.is_crossing():
                if hv.over_axis != (pv.over_axis + r) % 2 or hv.sign != pv.sign:
                    return None
            for k, (p1, s1), (p2, s2) in vv_edges:
                ends = []
                if p1 == p:
                    ends.append(0)
                if p2 == p:
                    ends.append(1)
                if not ends:
                    continue
                hs1 = (s1 + amap[p1][1]) % 4 if p1 in amap else None
                hs2 = (s2 + amap[p2][1]) % 4 if p2 in amap else None
                if p1 in amap:
                    hk, end = host.port_use(vport(amap[p1][0], hs1))
                    if end != "src":
                        return None
                else:
                    hk, end = host.port_use(vport(amap[p2][0], hs2))
                    if end != "dst":
                        return None
                hsrc, hdst = host.edges[hk]
                if is_bport(hsrc) or is_bport(hdst):
                    return None
                if k in pedge_to_hedge and pedge_to_hedge[k] != hk:
                    return None
                pedge_to_hedge[k] = hk
                for (pp, ss), hport, want_end in (
                    ((p1, s1), hsrc, "src"),
                    ((p2, s2), hdst, "dst"),
                ):
                    hv2, hslot2 = hport[1], hport[2]
                    rot2 = (hslot2 - ss) % 4
                    if pp in amap:
                        if amap[pp] != (hv2, rot2):
                            return None
                    else:
                        amap[pp] = (hv2, rot2)
                        queue.append(pp)
        if len(amap) != len(pverts):
            raise MatchError("pattern is not connected")
        if len({h for h, _ in amap.values()}) != len(amap):
            return None

        # Boundary-adjacent pattern edges: locate host cut edges.
        cuts = {}  # b index -> (host edge, "src"|"dst" end that is matched)
        for k, b, (p, s), enters in bv_edges:
            h, r = amap[p]
            hk, end = host.port_use(vport(h, (s + r) % 4))
            # enters: strand flows from b into the region, so the matched
            # vertex port must be the host edge destination.
            if enters and end != "dst":
                return None
            if not enters and end != "src":
                return None
            cuts[b] = (hk, "dst" if enters else "src")

        # Internal pattern faces must be host faces.
        for face in pattern_internal:
            mapped = []
            for kind, k, end in face:
                hk = pedge_to_hedge.get(k)
                if hk is None:
                    return None
                mapped.append(("e", hk, end))
            fids = {host_dart_face.get(d) for d in mapped}
            if len(fids) != 1 or None in fids:
                return None
            fid = fids.pop()
            host_face_darts = [d for d, f in host_dart_face.items() if f == fid]
            if len(host_face_darts) != len(mapped):
                return None
        return amap, pedge_to_hedge, cuts

    for hvid in sorted(host.vertices):
        hv = host.vertices[hvid]
        pv = pattern.vertices[anchor]
        if hv.kind != pv.kind:
            continue
        for rot in range(4):
            got = try_anchor(hvid, rot)
            if got is None:
                continue
            amap, pedge_to_hedge, cuts = got
            interior = frozenset(pedge_to_hedge.values())
            edge_cuts = {}
            for b, (hk, end) in sorted(cuts.items()):
                edge_cuts.setdefault(hk, {})[end] = b
            ec = []
            inside = set()
            for hk, ends in sorted(edge_cuts.items()):
                tokens = []
                if "src" in ends:
                    tokens.append(ends["src"])
                if "dst" in ends:
                    tokens.append(ends["dst"])
                ec.append((hk, tuple(tokens)))
                # Piece adjacent to a matched port is inside the region.
                if "src" in ends:
                    inside.add((hk, 0))
                if "dst" in ends:
                    inside.add((hk, len(tokens)))
            region = CutRegion(
                endpoints=pattern.endpoints,
                inside_vertices=frozenset(h for h, _ in amap.values()),
                edge_cuts=tuple(ec),
                inside_pieces=frozenset(inside),
                interior_edges=interior,
            )
            results.append(
                Embedding(
                    "vertex",
                    pattern.endpoints,
                    tuple((p, amap[p][0], amap[p][1]) for p in pverts),
                    region,
                )
            )
    return results


# ---------------------------------------------------------------------------
# Arc (vertex-free) matching


def _face_walks(host: Tangle):
    """Inner faces as walks of strand-edge darts: lists of (edge, end)."""
    outer_dart = ("a", 0, 0) if host.n_endpoints else None
    walks = []
    for face in trace_faces(host):
        if outer_dart is not None and outer_dart in face:
            continue
        walk = [(k, end) for kind, k, end in face if kind == "e"]
        if walk:
            walks.append(walk)
    return walks


def _match_arcs(pattern: Tangle, arcs, host: Tangle):
    n = pattern.n_endpoints
    results = []
    if len(arcs) == 1:
        (src, dst) = arcs[0]
        for hk in range(len(host.edges)):
            tokens = (src[1], dst[1])
            region = CutRegion(
                endpoints=pattern.endpoints,
                inside_vertices=frozenset(),
                edge_cuts=((hk, tokens),),
                inside_pieces=frozenset({(hk, 1)}),
                interior_edges=frozenset(),
            )
            results.append(Embedding("arcs", pattern.endpoints, (), region))
        return results
    if len(arcs) != 2:
        raise MatchError("only 1- and 2-arc vertex-free patterns are supported")

    # Pattern arc structure: boundary index -> (arc id, "in"|"out").
    arc_of = {}
    for aid, (src, dst) in enumerate(arcs):
        arc_of[src[1]] = (aid, "in")
        arc_of[dst[1]] = (aid, "out")

    seen = set()
    for walk in _face_walks(host):
        m = len(walk)
        for i in range(m):
            for j in range(m):
                ki, endi = walk[i]
                kj, endj = walk[j]
                if i == j:
                    # One dart carries both pieces; both linear orders coincide
                    # after alignment, enumerate both to be safe.
                    orders = [(0, 1), (1, 0)]
                elif ki == kj:
                    orders = [(0, 1), (1, 0)]
                else:
                    orders = [(0, 1)]
                # Region interface, counterclockwise: piece of dart i then
                # piece of dart j, each contributing travel-OUT then travel-IN.
                # With the strand direction: travel-IN is the strand-IN cut
                # when the walk travels the edge forward (end == 0).
                for order in orders:
                    # order controls, when both pieces lie on one edge, which
                    # piece sits closer to the edge source.
                    iface = []  # (piece tag, strand flag) CCW
                    for tag, (k, end) in (("P", walk[i]), ("Q", walk[j])):
                        if end == 0:
                            iface.append((tag, "out"))
                            iface.append((tag, "in"))
                        else:
                            iface.append((tag, "in"))
                            iface.append((tag, "out"))
                    # iface currently: [P cuts CCW..., Q cuts CCW...]
                    for rot in range(4):
                        assign = {}
                        ok = True
                        for pos, (tag, flg) in enumerate(iface):
                            b = (pos + rot) % 4
                            want = pattern.endpoints[b]
                            if (flg == "in") != (want == "in"):
                                ok = False
                                break
                            assign[(tag, flg)] = b
                        if not ok:
                            continue
                        # Pieces must realize the pattern arcs: the in/out cut
                        # of one piece must be one pattern arc's endpoints.
                        pa = arc_of.get(assign[("P", "in")])
                        pb = arc_of.get(assign[("P", "out")])
                        qa = arc_of.get(assign[("Q", "in")])
                        qb = arc_of.get(assign[("Q", "out")])
                        if None in (pa, pb, qa, qb):
                            continue
                        if pa[0] != pb[0] or pa[1] != "in" or pb[1] != "out":
                            continue
                        if qa[0] != qb[0] or qa[1] != "in" or qb[1] != "out":
                            continue
                        if pa[0] == qa[0]:
                            continue
                        # Tokens along each host edge from src to dst: the
                        # strand enters each piece at its src-ward cut, so the
                        # in-token always comes first regardless of walk side.
                        piece_tokens = {}
                        for tag in ("P", "Q"):
                            piece_tokens[tag] = (assign[(tag, "in")], assign[(tag, "out")])
                        per_edge = {}
                        if ki == kj:
                            first, second = ("P", "Q") if order == (0, 1) else ("Q", "P")
                            per_edge[ki] = piece_tokens[first] + piece_tokens[second]
                            inside = frozenset({(ki, 1), (ki, 3)})
                        else:
                            per_edge[ki] = piece_tokens["P"]
                            per_edge[kj] = piece_tokens["Q"]
                            inside = frozenset({(ki, 1), (kj, 1)})
                        region = CutRegion(
                            endpoints=pattern.endpoints,
                            inside_vertices=frozenset(),
                            edge_cuts=tuple(sorted(per_edge.items())),
                            inside_pieces=inside,
                            interior_edges=frozenset(),
                            corridors=1,
                        )
                        emb = Embedding("arcs", pattern.endpoints, (), region)
                        key = (region.edge_cuts, region.inside_pieces)
                        if key in seen:
                            continue
                        seen.add(key)
                        results.append(emb)
    return results


def find_embeddings(pattern: Tangle, host: Tangle):
    """All embeddings of ``pattern`` in ``host``, deterministically ordered."""
    shape, arcs = _pattern_shape(pattern)
    if shape == "vertex":
        found = _match_vertexful(pattern, host)
    else:
        found = _match_arcs(pattern, arcs, host)

    assign, _ = canonical_labeling(host)
    vcanon = {vid: cid for vid, (cid, _) in assign.items()}

    def canon_edge_key(k):
        src, dst = host.edges[k]

        def cp(p):
            if is_bport(p):
                return (0, p[1], 0)
            cid, rot = assign[p[1]]
            return (1, cid, (p[2] - rot) % 4)

        return (cp(src), cp(dst))

    def key(emb: Embedding):
        if emb.kind == "vertex":
            main = tuple((p, vcanon[h], r) for p, h, r in emb.vmap)
        else:
            main = tuple(
                (canon_edge_key(k), tokens) for k, tokens in emb.region.edge_cuts
            ) + tuple(sorted((canon_edge_key(k), i) for k, i in emb.region.inside_pieces))
        return (emb.kind, main)

    found.sort(key=key)
    out = []
    for emb in found:
        out.append(
            Embedding(emb.kind, emb.pattern_endpoints, emb.vmap, emb.region, key(emb))
        )
    return out


# ---------------------------------------------------------------------------
# Region extraction


def region_is_disk(host: Tangle, region: CutRegion) -> bool:
    """Euler-characteristic disk test for the cut region."""
    ncuts = sum(len(tokens) for _, tokens in region.edge_cuts)
    npieces = len(region.inside_pieces)
    v = len(region.inside_vertices) + ncuts
    e = len(region.interior_edges) + npieces
    f = 0
    interior = region.interior_edges
    inside_v = region.inside_vertices
    for face in trace_faces(host):
        good = True
        for dart in face:
            kind, k, end = dart
            if kind != "e" or k not in interior:
                good = False
                break
            node = host.edges[k][end]
            if is_bport(node) or node[1] not in inside_v:
                good = False
                break
        if good and face:
            f += 1
    return v - e + f - region.corridors == 1


def whole_host_region(host: Tangle) -> CutRegion:
    """The identity region: cut every boundary edge next to its endpoint."""
    edge_cuts = {}
    inside = set()
    for i in range(host.n_endpoints):
        k, end = host.port_use(bport(i))
        edge_cuts.setdefault(k, []).append((i, end))
    ec = []
    for k, cuts in sorted(edge_cuts.items()):
        # src-end cut (strand enters from boundary) comes first along the edge.
        tokens = [b for b, end in cuts if end == "src"] + [
            b for b, end in cuts if end == "dst"
        ]
        ec.append((k, tuple(tokens)))
        if len(tokens) == 2:
            inside.add((k, 1))
        else:
            b, end = cuts[0]
            inside.add((k, 1 if end == "src" else 0))
    return CutRegion(
        endpoints=host.endpoints,
        inside_vertices=frozenset(host.vertices),
        edge_cuts=tuple(ec),
        inside_pieces=frozenset(inside),
        interior_edges=frozenset(
            k
            for k in range(len(host.edges))
            if k not in dict(ec)
        ),
    )


def extract_region(host: Tangle, region: CutRegion) -> Tangle:
    """The enclosed subtangle, boundary points induced by the cut tokens."""
    for k in region.interior_edges:
        src, dst = host.edges[k]
        for p in (src, dst):
            if is_bport(p) or p[1] not in region.inside_vertices:
                raise RegionError(f"interior edge {k} leaves the region")
    if not region_is_disk(host, region):
        raise RegionError("region is not a disk")

    verts = {vid: host.vertices[vid] for vid in region.inside_vertices}
    edges = []
    for k in sorted(region.interior_edges):
        edges.append(host.edges[k])
    for k, tokens in region.edge_cuts:
        src, dst = host.edges[k]
        nodes = [src] + [bport(t) for t in tokens] + [dst]
        for piece in range(len(tokens) + 1):
            if (k, piece) not in region.inside_pieces:
                continue
            a, b = nodes[piece], nodes[piece + 1]
            for p, here in ((a, piece > 0), (b, piece < len(tokens))):
                if not here and (is_bport(p) or p[1] not in region.inside_vertices):
                    raise RegionError(f"inside piece {(k, piece)} leaks outside")
            edges.append((a, b))
    t = Tangle(region.endpoints, verts, edges)
    bad = validate(t)
    if bad:
        raise RegionError("extracted region is not a valid tangle: " + "; ".join(map(str, bad)))
    return t


# ---------------------------------------------------------------------------
# Splicing


def splice(host: Tangle, region: CutRegion, replacement: Tangle) -> Tangle:
    """Replace the region's interior with ``replacement`` (same interface)."""
    if replacement.endpoints != region.endpoints:
        raise InterfaceError(
            f"replacement interface {replacement.endpoints} != region {region.endpoints}"
        )
    cut_edges = region.cut_map()

    # Fresh ids for replacement vertices.
    base = max(host.vertices, default=-1) + 1
    rmap = {vid: base + i for i, vid in enumerate(sorted(replacement.vertices))}
    verts = {
        vid: v for vid, v in host.vertices.items() if vid not in region.inside_vertices
    }
    for vid, v in replacement.vertices.items():
        verts[rmap[vid]] = v

    # Segments: (src descriptor, dst descriptor); descriptors are real ports
    # or ("join", token).  Each cut token joins exactly one host-side end to
    # exactly one replacement-side end.
    segments = []
    for k, (src, dst) in enumerate(host.edges):
        if k in region.interior_edges:
            continue
        tokens = cut_edges.get(k)
        if tokens is None:
            segments.append((src, dst))
            continue
        nodes = [src] + [("join", t) for t in tokens] + [dst]
        for piece in range(len(tokens) + 1):
            if (k, piece) in region.inside_pieces:
                continue
            segments.append((nodes[piece], nodes[piece + 1]))
    for src, dst in replacement.edges:

        def conv(p):
            if is_bport(p):
                return ("join", p[1])
            return vport(rmap[p[1]], p[2])

        segments.append((conv(src), conv(dst)))

    # Join segments at matching tokens.
    by_start = {}
    by_end = {}
    plain = []
    for seg in segments:
        s, d = seg
        s_join = isinstance(s, tuple) and s[0] == "join"
        d_join = isinstance(d, tuple) and d[0] == "join"
        if s_join:
            if s[1] in by_start:
                raise SpliceError(f"cut token {s[1]} joined twice")
            by_start[s[1]] = seg
        if d_join:
            if d[1] in by_end:
                raise SpliceError(f"cut token {d[1]} joined twice")
            by_end[d[1]] = seg
        if not s_join and not d_join:
            plain.append(seg)

    if set(by_start) != set(by_end):
        raise SpliceError("cut tokens do not pair up")

    edges = list(plain)
    used = set()
    for token, seg in sorted(by_start.items()):
        if id(seg) in used:
            continue
        # Walk backwards to the real source.
        back_guard = 0
        cur = seg
        while isinstance(cur[0], tuple) and cur[0][0] == "join":
            cur = by_end.get(cur[0][1])
            if cur is None:
                raise SpliceError("dangling cut token")
            back_guard += 1
            if back_guard > len(segments) + 1:
                raise SpliceError("splice would create a closed loop")
        start_seg = cur
        if id(start_seg) in used:
            continue
        src = start_seg[0]
        used.add(id(start_seg))
        cur = start_seg
        guard = 0
        while isinstance(cur[1], tuple) and cur[1][0] == "join":
            nxt = by_start.get(cur[1][1])
            if nxt is None:
                raise SpliceError("dangling cut token")
            if id(nxt) in used:
                raise SpliceError("splice would create a closed loop")
            used.add(id(nxt))
            cur = nxt
            guard += 1
            if guard > len(segments) + 1:
                raise SpliceError("splice would create a closed loop")
        edges.append((src, cur[1]))
    for seg in segments:
        s, d = seg
        s_join = isinstance(s, tuple) and s[0] == "join"
        d_join = isinstance(d, tuple) and d[0] == "join"
        if (s_join or d_join) and id(seg) not in used:
            raise SpliceError("splice would create a closed loop")

    return Tangle(host.endpoints, verts, sorted(edges))
