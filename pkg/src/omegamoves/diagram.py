"""Local oriented singular knot diagrams as planar combinatorial maps.

A tangle lives in a disk: boundary points ``b0..b(n-1)`` in counterclockwise
order, 4-valent vertices (crossings or singular points) with counterclockwise
slot order ``0..3``, and directed edges between ports.  Slots ``{0, 2}`` carry
one through-strand, ``{1, 3}`` the other.  Equality of tangles is
combinatorial-map isomorphism fixing every boundary point, decided through a
canonical code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

CROSSING = "crossing"
SINGULAR = "singular"

# Ports are tuples: ("b", i) for boundary point i, ("v", vid, slot) for a
# vertex slot.  Edges are directed along the strand: (src_port, dst_port).
Port = tuple


def bport(i: int) -> Port:
    return ("b", i)


def vport(vid: int, slot: int) -> Port:
    return ("v", vid, slot)


def is_bport(p: Port) -> bool:
    return p[0] == "b"


def slot_axis(slot: int) -> int:
    return slot % 2


def slot_partner(slot: int) -> int:
    return (slot + 2) % 4


@dataclass(frozen=True)
class Vertex:
    """A 4-valent diagram vertex.

    ``sign`` and ``over_axis`` are meaningful for crossings only.  ``over_axis``
    names the through-strand that passes over: 0 for slots {0, 2}, 1 for
    slots {1, 3}.
    """

    kind: str
    sign: int = 0
    over_axis: int = -1

    def is_crossing(self) -> bool:
        return self.kind == CROSSING


@dataclass(frozen=True)
class Violation:
    invariant: str
    element: str

    def __str__(self) -> str:
        return f"{self.invariant}: {self.element}"


class Tangle:
    """Immutable local diagram.  Mutating the underlying dicts is not supported."""

    __slots__ = ("endpoints", "vertices", "edges", "_port_index", "_canonical")

    def __init__(self, endpoints, vertices, edges):
        self.endpoints = tuple(endpoints)  # "in" / "out" per boundary point
        self.vertices = dict(vertices)  # vid -> Vertex
        self.edges = tuple((tuple(src), tuple(dst)) for src, dst in edges)
        self._port_index = None
        self._canonical = None

    # -- basic accessors ---------------------------------------------------

    @property
    def n_endpoints(self) -> int:
        return len(self.endpoints)

    def crossing_count(self) -> int:
        return sum(1 for v in self.vertices.values() if v.is_crossing())

    def singular_count(self) -> int:
        return sum(1 for v in self.vertices.values() if not v.is_crossing())

    def port_index(self):
        """Map port -> (edge index, 'src'|'dst'), built lazily."""
        if self._port_index is None:
            idx = {}
            for k, (src, dst) in enumerate(self.edges):
                idx.setdefault(src, []).append((k, "src"))
                idx.setdefault(dst, []).append((k, "dst"))
            self._port_index = idx
        return self._port_index

    def port_use(self, port: Port):
        uses = self.port_index().get(port, [])
        if len(uses) != 1:
            raise KeyError(f"port {port} used {len(uses)} times")
        return uses[0]

    def interface(self) -> tuple:
        return self.endpoints

    def copy(self) -> "Tangle":
        return Tangle(self.endpoints, self.vertices, self.edges)

    def __repr__(self) -> str:
        return (
            f"Tangle(endpoints={len(self.endpoints)}, vertices={len(self.vertices)},"
            f" edges={len(self.edges)})"
        )


# ---------------------------------------------------------------------------
# Validation


def derived_sign(t: Tangle, vid: int) -> Optional[int]:
    """Crossing sign from orientations and rotation.

    The out-slot approximates the strand's travel direction (slot k points at
    angle 90k degrees).  The crossing is positive when the under strand's
    direction is the over strand's rotated 90 degrees counterclockwise.
    """
    v = t.vertices[vid]
    if not v.is_crossing() or v.over_axis not in (0, 1):
        return None
    idx = t.port_index()
    out_slot = {}
    for axis in (0, 1):
        for slot in (axis, axis + 2):
            uses = idx.get(vport(vid, slot), [])
            if len(uses) == 1 and uses[0][1] == "src":
                out_slot[axis] = slot
    if len(out_slot) != 2:
        return None
    over_out = out_slot[v.over_axis]
    under_out = out_slot[1 - v.over_axis]
    return 1 if (under_out - over_out) % 4 == 1 else -1


def validate(t: Tangle) -> list:
    """Return all invariant violations (empty list iff the tangle is valid)."""
    out = []
    idx = {}
    for k, (src, dst) in enumerate(t.edges):
        idx.setdefault(src, []).append((k, "src"))
        idx.setdefault(dst, []).append((k, "dst"))

    for port, uses in idx.items():
        if len(uses) > 1:
            out.append(Violation("port used more than once", f"{port}"))

    n_in = sum(1 for f in t.endpoints if f == "in")
    n_out = len(t.endpoints) - n_in
    if n_in != n_out:
        out.append(Violation("inbound/outbound endpoint counts differ", f"{n_in} vs {n_out}"))

    for i, flag in enumerate(t.endpoints):
        if flag not in ("in", "out"):
            out.append(Violation("endpoint flag", f"b{i}={flag!r}"))
            continue
        uses = idx.get(bport(i), [])
        if len(uses) != 1:
            out.append(Violation("boundary point degree", f"b{i} has {len(uses)} edge ends"))
            continue
        _, end = uses[0]
        # An inbound endpoint is where a strand enters the disk: an edge source.
        want = "src" if flag == "in" else "dst"
        if end != want:
            out.append(Violation("endpoint direction", f"b{i} flagged {flag}"))

    for vid, v in sorted(t.vertices.items()):
        if v.kind not in (CROSSING, SINGULAR):
            out.append(Violation("vertex kind", f"vertex {vid}: {v.kind!r}"))
            continue
        if v.is_crossing():
            if v.over_axis not in (0, 1):
                out.append(Violation("crossing over-axis", f"vertex {vid}"))
            if v.sign not in (-1, 1):
                out.append(Violation("crossing sign", f"vertex {vid}"))
        slot_dirs = {}
        ok = True
        for slot in range(4):
            uses = idx.get(vport(vid, slot), [])
            if len(uses) != 1:
                out.append(Violation("vertex slot degree", f"vertex {vid} slot {slot}"))
                ok = False
            else:
                slot_dirs[slot] = uses[0][1]
        if not ok:
            continue
        for axis in (0, 1):
            a, b = slot_dirs[axis], slot_dirs[axis + 2]
            if {a, b} != {"src", "dst"}:
                out.append(Violation("strand orientation at vertex", f"vertex {vid} axis {axis}"))
        if v.is_crossing() and v.over_axis in (0, 1) and v.sign in (-1, 1):
            want = derived_sign(t, vid)
            if want is not None and want != v.sign:
                out.append(
                    Violation("crossing sign inconsistent with rotation", f"vertex {vid}")
                )

    if out:
        return out

    # Every component must reach the boundary (closed diagrams are unsupported).
    reach = set()
    stack = [bport(i) for i in range(t.n_endpoints)]
    seen_ports = set(stack)
    while stack:
        p = stack.pop()
        uses = idx.get(p, [])
        for k, _ in uses:
            src, dst = t.edges[k]
            for q in (src, dst):
                if q in seen_ports:
                    continue
                seen_ports.add(q)
                stack.append(q)
                if not is_bport(q):
                    reach.add(q[1])
                    for slot in range(4):
                        qq = vport(q[1], slot)
                        if qq not in seen_ports:
                            seen_ports.add(qq)
                            stack.append(qq)
    for vid in t.vertices:
        if vid not in reach:
            out.append(Violation("component without boundary", f"vertex {vid}"))
    if out:
        return out

    if t.n_endpoints == 0:
        # Only the empty tangle survives the reachability check with n == 0.
        return out

    faces = trace_faces(t)
    want_faces = 2 + len(t.edges) - len(t.vertices)
    if len(faces) != want_faces:
        out.append(
            Violation(
                "rotation system is not planar",
                f"{len(faces)} faces, expected {want_faces}",
            )
        )
    return out


class InvalidTangle(ValueError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


def require_valid(t: Tangle) -> Tangle:
    violations = validate(t)
    if violations:
        raise InvalidTangle(violations)
    return t


# ---------------------------------------------------------------------------
# Faces
#
# The disk is closed to a sphere: the boundary circle contributes n arc edges
# (arc i joins b_i to b_{i+1}) and one outer face.  Darts are edge ends:
# ("e", k, 0|1) for strand edges (0 = src end), ("a", i, 0|1) for circle arcs
# (0 = the end at b_i).  Rotation at a vertex is the CCW slot order; at a
# boundary point it is (arc toward next, strand edge, arc toward previous).
# Faces are orbits of sigma . alpha and keep the face on the right of travel.


def _build_rotation(t: Tangle):
    n = t.n_endpoints
    idx = t.port_index()
    rot = {}  # dart -> next dart CCW at the same node
    for vid in t.vertices:
        darts = []
        for slot in range(4):
            k, end = t.port_use(vport(vid, slot))
            darts.append(("e", k, 0 if end == "src" else 1))
        for a, b in zip(darts, darts[1:] + darts[:1]):
            rot[a] = b
    for i in range(n):
        k, end = t.port_use(bport(i))
        strand = ("e", k, 0 if end == "src" else 1)
        to_next = ("a", i, 0)
        to_prev = ("a", (i - 1) % n, 1)
        rot[to_next] = strand
        rot[strand] = to_prev
        rot[to_prev] = to_next
    return rot


def _alpha(dart):
    kind, k, end = dart
    return (kind, k, 1 - end)


def trace_faces(t: Tangle) -> list:
    """All faces of the sphere closure, as lists of darts in walk order."""
    rot = _build_rotation(t)
    seen = set()
    faces = []
    for start in rot:
        if start in seen:
            continue
        face = []
        d = start
        while True:
            face.append(d)
            seen.add(d)
            d = rot[_alpha(d)]
            if d == start:
                break
            if d in seen:
                raise AssertionError("face tracing revisited a dart mid-orbit")
        faces.append(face)
    return faces


def inner_faces(t: Tangle) -> list:
    """Faces inside the disk: every face except the one outside the circle."""
    outer_dart = ("a", 0, 0) if t.n_endpoints else None
    out = []
    for face in trace_faces(t):
        if outer_dart is not None and outer_dart in face:
            continue
        out.append(face)
    return out


# ---------------------------------------------------------------------------
# Strand traversal


@dataclass(frozen=True)
class Passage:
    """One pass of a strand through a vertex (enter in_slot, leave out_slot)."""

    vid: int
    in_slot: int
    out_slot: int


def strands(t: Tangle) -> list:
    """Directed strands, each a pair (boundary entry, [Passage...], boundary exit).

    Returned in order of the inbound boundary point.
    """
    out = []
    for i, flag in enumerate(t.endpoints):
        if flag != "in":
            continue
        passages = []
        k, end = t.port_use(bport(i))
        assert end == "src"
        guard = 0
        while True:
            guard += 1
            if guard > 4 * len(t.vertices) + 2:
                raise AssertionError("strand traversal did not terminate")
            dst = t.edges[k][1]
            if is_bport(dst):
                out.append((i, tuple(passages), dst[1]))
                break
            _, vid, slot = dst
            exit_slot = slot_partner(slot)
            passages.append(Passage(vid, slot, exit_slot))
            k, end = t.port_use(vport(vid, exit_slot))
            assert end == "src"
    return out


# ---------------------------------------------------------------------------
# Canonical codes


def canonical_labeling(t: Tangle):
    """Deterministic relabeling fixing the boundary pointwise.

    Returns (vid -> (canonical id, rotation), ordered edge list in canonical
    port form).  The traversal is a breadth-first walk seeded at b0, b1, ...;
    when a vertex is first reached through slot s, that slot becomes canonical
    slot 0.  The result is invariant under vertex renaming and slot rotation.
    """
    idx = t.port_index()
    assign = {}  # vid -> (cid, rot)
    queue = []  # darts to walk, FIFO: (edge index, end we stand at)
    head = 0

    def visit_port(port):
        if is_bport(port):
            return
        _, vid, slot = port
        if vid in assign:
            return
        assign[vid] = (len(assign), slot)
        for off in range(4):
            s = (slot + off) % 4
            k, _ = t.port_use(vport(vid, s))
            queue.append(k)

    for i in range(t.n_endpoints):
        uses = idx.get(bport(i), [])
        if len(uses) == 1:
            queue.append(uses[0][0])
    seen_edges = set()
    while head < len(queue):
        k = queue[head]
        head += 1
        if k in seen_edges:
            continue
        seen_edges.add(k)
        src, dst = t.edges[k]
        visit_port(src)
        visit_port(dst)

    if len(assign) != len(t.vertices):
        raise InvalidTangle([Violation("component without boundary", "canonical labeling")])

    def canon_port(port):
        if is_bport(port):
            return ("b", port[1])
        _, vid, slot = port
        cid, rot = assign[vid]
        return ("v", cid, (slot - rot) % 4)

    canon_edges = sorted(
        (canon_port(src), canon_port(dst)) for src, dst in t.edges
    )
    return assign, canon_edges


def canonical_tangle(t: Tangle) -> Tangle:
    """The canonically relabeled copy of ``t``."""
    assign, canon_edges = canonical_labeling(t)
    verts = {}
    for vid, v in t.vertices.items():
        cid, rot = assign[vid]
        if v.is_crossing():
            verts[cid] = Vertex(CROSSING, v.sign, (v.over_axis + rot) % 2)
        else:
            verts[cid] = Vertex(SINGULAR)
    return Tangle(t.endpoints, verts, canon_edges)


def canonical_code(t: Tangle) -> bytes:
    """Byte string equal for two tangles iff they are isomorphic rel boundary."""
    if t._canonical is None:
        ct = canonical_tangle(t)
        parts = ["T", ",".join(f[0] for f in ct.endpoints), "|"]
        for vid in range(len(ct.vertices)):
            v = ct.vertices[vid]
            if v.is_crossing():
                parts.append(f"x{'+' if v.sign > 0 else '-'}{v.over_axis};")
            else:
                parts.append("s;")
        parts.append("|")
        for (sk, sa, *srest), (dk, da, *drest) in ct.edges:
            s = f"b{sa}" if sk == "b" else f"{sa}.{srest[0]}"
            d = f"b{da}" if dk == "b" else f"{da}.{drest[0]}"
            parts.append(f"{s}>{d};")
        t._canonical = "".join(parts).encode()
    return t._canonical


class InterfaceMismatch(ValueError):
    pass


def equals(a: Tangle, b: Tangle) -> bool:
    """Isomorphism rel boundary.  Raises on interface mismatch."""
    if a.endpoints != b.endpoints:
        raise InterfaceMismatch(f"{a.endpoints} vs {b.endpoints}")
    return canonical_code(a) == canonical_code(b)


# ---------------------------------------------------------------------------
# Text format
#
#   tangle <name>
#   endpoints <n> <in|out> ... (n flags)
#   vertex <id> crossing <+|-> over=<02|13>
#   vertex <id> singular
#   edge <src> <dst>          with src/dst in {b<i>, <vid>.<slot>}


class FormatError(ValueError):
    pass


def _parse_port(tok: str) -> Port:
    tok = tok.strip()
    if tok.startswith("b") and tok[1:].isdigit():
        return bport(int(tok[1:]))
    if "." in tok:
        vid, slot = tok.split(".", 1)
        if vid.isdigit() and slot.isdigit():
            return vport(int(vid), int(slot))
    raise FormatError(f"bad port {tok!r}")


def _port_str(port: Port) -> str:
    if is_bport(port):
        return f"b{port[1]}"
    return f"{port[1]}.{port[2]}"


def parse_tangles(text: str, source: str = "<str>") -> dict:
    """Parse named tangle blocks; returns an ordered dict name -> Tangle."""
    out = {}
    name = None
    endpoints = None
    vertices = {}
    edges = []

    def flush():
        nonlocal name, endpoints, vertices, edges
        if name is None:
            return
        if endpoints is None:
            raise FormatError(f"{source}: tangle {name!r} has no endpoints line")
        out[name] = Tangle(endpoints, vertices, edges)
        name, endpoints, vertices, edges = None, None, {}, []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            if toks[0] == "tangle":
                flush()
                name = toks[1]
            elif toks[0] == "endpoints":
                n = int(toks[1])
                flags = toks[2 : 2 + n]
                if len(flags) != n or any(f not in ("in", "out") for f in flags):
                    raise FormatError("endpoint flags")
                endpoints = tuple(flags)
            elif toks[0] == "vertex":
                vid = int(toks[1])
                if toks[2] == "singular":
                    vertices[vid] = Vertex(SINGULAR)
                elif toks[2] == "crossing":
                    sign = {"+": 1, "-": -1}[toks[3]]
                    over = toks[4]
                    if not over.startswith("over="):
                        raise FormatError("crossing over= field")
                    axis = {"02": 0, "13": 1}[over[5:]]
                    vertices[vid] = Vertex(CROSSING, sign, axis)
                else:
                    raise FormatError(f"vertex kind {toks[2]!r}")
            elif toks[0] == "edge":
                edges.append((_parse_port(toks[1]), _parse_port(toks[2])))
            else:
                raise FormatError(f"unknown directive {toks[0]!r}")
        except (IndexError, KeyError, ValueError) as exc:
            raise FormatError(f"{source}:{lineno}: {raw.strip()!r}: {exc}") from exc
    flush()
    return out


def format_tangle(t: Tangle, name: str) -> str:
    lines = [f"tangle {name}", f"endpoints {t.n_endpoints} " + " ".join(t.endpoints)]
    for vid in sorted(t.vertices):
        v = t.vertices[vid]
        if v.is_crossing():
            lines.append(
                f"vertex {vid} crossing {'+' if v.sign > 0 else '-'}"
                f" over={'02' if v.over_axis == 0 else '13'}"
            )
        else:
            lines.append(f"vertex {vid} singular")
    for src, dst in sorted(t.edges):
        lines.append(f"edge {_port_str(src)} {_port_str(dst)}")
    return "\n".join(lines) + "\n"
