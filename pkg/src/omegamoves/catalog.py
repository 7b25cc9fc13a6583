"""The 30 oriented move variants as data-driven rewrite rules.

Families: O1 (kink, 4 variants), O2 (poke, 4), O3 (triangle slide, 8),
O4 (strand past a singular point, 8), O5 (crossing past a singular point, 6).
Moves are loaded from a text catalog and validated structurally: boundary
interfaces of the two sides must agree, and each family has a fixed census of
crossings, singular vertices, and endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import (
    FormatError,
    Tangle,
    Vertex,
    CROSSING,
    SINGULAR,
    equals,
    format_tangle,
    validate,
    _parse_port,
)

FAMILIES = ("O1", "O2", "O3", "O4", "O5")

# crossings per side, singular vertices per side, endpoints
_CENSUS = {
    "O1": (((1, 0), (0, 0)), 2),
    "O2": (((2, 0), (0, 0)), 4),
    "O3": (((3, 0), (3, 0)), 6),
    "O4": (((2, 1), (2, 1)), 6),
    "O5": (((1, 1), (1, 1)), 4),
}

ROLES = ("moving", "tangency-1", "tangency-2", "crossing-1", "crossing-2")


def normalize_name(name: str) -> str:
    return name.replace("Ω", "O").replace("ω", "O")


@dataclass(frozen=True)
class MoveVariant:
    name: str
    family: str
    lhs: Tangle
    rhs: Tangle
    roles: tuple = ()  # ((strand id, role), ...); strand id = "s<inbound b index>"
    provenance: str = ""

    def side(self, which: str) -> Tangle:
        return self.lhs if which == "lhs" else self.rhs

    def role_of(self, strand_id: str):
        for sid, role in self.roles:
            if sid == strand_id:
                return role
        return None


def inverse(m: MoveVariant) -> MoveVariant:
    """The same rewrite read right-to-left; name gains a ``~`` suffix."""
    name = m.name[:-1] if m.name.endswith("~") else m.name + "~"
    return MoveVariant(name, m.family, m.rhs, m.lhs, m.roles, m.provenance)


def variant_defects(m: MoveVariant) -> list:
    out = []
    if m.family not in _CENSUS:
        return [f"{m.name}: unknown family {m.family}"]
    for side, t in (("lhs", m.lhs), ("rhs", m.rhs)):
        for v in validate(t):
            out.append(f"{m.name}.{side}: {v}")
    if out:
        return out
    if m.lhs.endpoints != m.rhs.endpoints:
        out.append(f"{m.name}: boundary interface mismatch")
    (census_lr, endpoints) = _CENSUS[m.family]
    sides = ((m.lhs, "lhs"), (m.rhs, "rhs"))
    seen = tuple((t.crossing_count(), t.singular_count()) for t, _ in sides)
    if set(seen) != set(census_lr) or (
        census_lr[0] != census_lr[1] and seen != census_lr
    ):
        out.append(f"{m.name}: vertex census {seen} != {census_lr}")
    if m.lhs.n_endpoints != endpoints:
        out.append(f"{m.name}: {m.lhs.n_endpoints} endpoints, family wants {endpoints}")
    if not out:
        try:
            if equals(m.lhs, m.rhs):
                out.append(f"{m.name}: lhs equals rhs (no-op move)")
        except ValueError:
            pass
    return out


class Catalog:
    def __init__(self, moves):
        self.moves = {m.name: m for m in moves}
        if len(self.moves) != len(moves):
            raise FormatError("duplicate move name")

    def __getitem__(self, name: str) -> MoveVariant:
        return self.moves[normalize_name(name)]

    def __contains__(self, name) -> bool:
        return normalize_name(name) in self.moves

    def __iter__(self):
        return iter(sorted(self.moves))

    def __len__(self):
        return len(self.moves)

    def family(self, fam: str):
        return [self.moves[n] for n in sorted(self.moves) if self.moves[n].family == fam]

    def names(self):
        return sorted(self.moves)


def validate_catalog(cat: Catalog) -> dict:
    """Structural report: per-family counts and all defects."""
    defects = []
    counts = {f: 0 for f in FAMILIES}
    for name in cat:
        m = cat[name]
        counts[m.family] = counts.get(m.family, 0) + 1
        defects.extend(variant_defects(m))
    want = {"O1": 4, "O2": 4, "O3": 8, "O4": 8, "O5": 6}
    for fam, n in want.items():
        if counts.get(fam, 0) != n:
            defects.append(f"family {fam}: {counts.get(fam, 0)} entries, expected {n}")
    return {"counts": counts, "defects": defects}


# ---------------------------------------------------------------------------
# Catalog text format


def parse_catalog(text: str, source: str = "<catalog>") -> Catalog:
    moves = []
    name = family = None
    roles = []
    provenance = []
    side = None
    tang = {"lhs": None, "rhs": None}
    cur_endpoints = None
    cur_vertices = {}
    cur_edges = []

    def flush_side():
        nonlocal cur_endpoints, cur_vertices, cur_edges
        if side is not None:
            if cur_endpoints is None:
                raise FormatError(f"{source}: {name}.{side} missing endpoints")
            tang[side] = Tangle(cur_endpoints, cur_vertices, cur_edges)
        cur_endpoints, cur_vertices, cur_edges = None, {}, []

    def flush_move():
        nonlocal name, family, roles, provenance, side, tang
        if name is None:
            return
        flush_side()
        if tang["lhs"] is None or tang["rhs"] is None:
            raise FormatError(f"{source}: move {name} missing lhs or rhs")
        moves.append(
            MoveVariant(
                name, family, tang["lhs"], tang["rhs"], tuple(roles), " ".join(provenance)
            )
        )
        name, family, roles, provenance, side = None, None, [], [], None
        tang = {"lhs": None, "rhs": None}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            if toks[0] == "move":
                flush_move()
                name = normalize_name(toks[1])
                if toks[2] != "family":
                    raise FormatError("expected 'family'")
                family = normalize_name(toks[3])
            elif toks[0] == "provenance":
                provenance.append(" ".join(toks[1:]))
            elif toks[0] == "role":
                if toks[2] not in ROLES:
                    raise FormatError(f"unknown role {toks[2]!r}")
                roles.append((toks[1], toks[2]))
            elif toks[0] in ("lhs", "rhs"):
                flush_side()
                side = toks[0]
            elif toks[0] == "endpoints":
                n = int(toks[1])
                flags = toks[2 : 2 + n]
                if len(flags) != n or any(f not in ("in", "out") for f in flags):
                    raise FormatError("endpoint flags")
                cur_endpoints = tuple(flags)
            elif toks[0] == "vertex":
                vid = int(toks[1])
                if toks[2] == "singular":
                    cur_vertices[vid] = Vertex(SINGULAR)
                else:
                    sign = {"+": 1, "-": -1}[toks[3]]
                    axis = {"02": 0, "13": 1}[toks[4][5:]]
                    cur_vertices[vid] = Vertex(CROSSING, sign, axis)
            elif toks[0] == "edge":
                cur_edges.append((_parse_port(toks[1]), _parse_port(toks[2])))
            else:
                raise FormatError(f"unknown directive {toks[0]!r}")
        except (IndexError, KeyError, ValueError) as exc:
            raise FormatError(f"{source}:{lineno}: {raw.strip()!r}: {exc}") from exc
    flush_move()
    if not moves:
        raise FormatError(f"{source}: no entries")
    return Catalog(moves)


def format_catalog(cat: Catalog) -> str:
    chunks = []
    for name in cat:
        m = cat[name]
        lines = [f"move {m.name} family {m.family}"]
        if m.provenance:
            lines.append(f"provenance {m.provenance}")
        for sid, role in m.roles:
            lines.append(f"role {sid} {role}")
        for side in ("lhs", "rhs"):
            t = m.side(side)
            body = format_tangle(t, "x").splitlines()[1:]  # drop the tangle header
            lines.append(side)
            lines.extend(body)
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + "\n"


def load_catalog(path) -> Catalog:
    """Load and fully validate a catalog file; defects raise FormatError."""
    with open(path, "r", encoding="utf-8") as fh:
        cat = parse_catalog(fh.read(), str(path))
    report = validate_catalog(cat)
    if report["defects"]:
        raise FormatError(
            f"{path}: catalog defects: " + "; ".join(report["defects"])
        )
    return cat
