"""Finite direction-sector model of Legendrian front realizability.

Tangent directions are quantized into N sectors (N divisible by 4).  Strands
are broken into segments at their feature passages; segments carry several
sector variables (sub-segments) so strands can turn, with a per-gap turning
budget.  The first and last sector of a strand are shared between the two
sides of the move: nothing changes outside the disk.

Structural facts extracted from the diagrams anchor the system:

* Turning lift: by Whitney's formula the turning number of a strand, relative
  to its fixed boundary directions, is determined by the traversal signs of
  its self-crossings.  A move matches turning lifts iff each strand has equal
  self-crossing traversal sign sums on the two sides; a kink changes the sum
  by one full turn, which is the first-move obstruction.
* Singular points present as direct tangencies.  The four branch ends of a
  singular vertex are re-drawn in a tangency order (two chiralities); the
  internal faces of the re-drawn diagram must admit planar windings.
* At every crossing the four branch directions wind once counterclockwise in
  slot order, and internal faces satisfy the discrete Gauss-Bonnet relation:
  walked with the face on the right, edge turning plus corner turning closes
  a single clockwise turn.

A move is front-realizable iff a chirality choice admits a satisfiable
system.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..catalog import MoveVariant
from ..diagram import Tangle, strands as strand_paths, trace_faces, vport


@dataclass(frozen=True)
class FrontConfig:
    budget_div: int = 4  # per-gap turn bound N / budget_div
    bigon_tol_div: int = 8  # bigon chord tolerance N / bigon_tol_div (min 1)
    cusp_tol_div: int = 8  # tangency cusp opening bound N / cusp_tol_div (min 2)
    over_is_larger: bool = True
    wedge_ccw: bool = True


@dataclass(frozen=True)
class Constraint:
    kind: str
    scope: tuple
    uses_chart: bool
    pred: object  # callable(assignment list, chart) -> bool
    label: str = ""


@dataclass
class LiftSystem:
    move: str
    resolution: int
    n_vars: int
    var_names: tuple
    has_chart: bool
    constraints: list
    strand_chains: dict
    chirality: tuple = ()  # chosen tangency chirality per singular vertex

    def kinds(self):
        return sorted({c.kind for c in self.constraints})

    def domain_size(self) -> int:
        return self.resolution ** self.n_vars * (
            self.resolution if self.has_chart else 1
        )


def centered(d: int, n: int) -> int:
    return (d + n // 2) % n - n // 2


class _Union:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


# ---------------------------------------------------------------------------
# Structural extraction


def _bigon_pairs(paths):
    """Strand pairs traversing the same two vertices: (a, b, co-oriented)."""
    out = []
    by_b = {in_b: passages for in_b, passages, _ in paths}
    keys = sorted(by_b)
    for i, a in enumerate(keys):
        for b in keys[i + 1 :]:
            va = [p.vid for p in by_b[a]]
            vb = [p.vid for p in by_b[b]]
            common = [v for v in va if v in vb]
            if len(common) == 2 and len(va) == len(set(va)) and len(vb) == len(set(vb)):
                ca = [v for v in va if v in common]
                cb = [v for v in vb if v in common]
                out.append((a, b, ca == cb))
    return out


def tangency_class(m: MoveVariant) -> str:
    """direct / inverse self-tangency of the poke event (O2 moves only)."""
    if m.family != "O2":
        raise ValueError(f"tangency_class is defined for O2 moves, not {m.family}")
    pairs = _bigon_pairs(strand_paths(m.lhs))
    if len(pairs) != 1:
        raise ValueError("poke side should contain exactly one bigon")
    return "direct" if pairs[0][2] else "inverse"


def whitney_sign_sum(passages) -> int:
    """Sum of traversal signs over the strand's self-crossings.

    At a self-crossing the frame (first-visit direction, second-visit
    direction) is positively oriented iff the second out-slot immediately
    follows the first counterclockwise.
    """
    total = 0
    seen = {}
    for p in passages:
        if p.vid in seen:
            first = seen[p.vid]
            total += 1 if (p.out_slot - first.out_slot) % 4 == 1 else -1
        else:
            seen[p.vid] = p
    return total


def bport_(i):
    return ("b", i)


# ---------------------------------------------------------------------------
# Side data


class _SideData:
    def __init__(self, tag, tangle):
        self.tag = tag
        self.tangle = tangle
        self.paths = strand_paths(tangle)
        self.chains = {}
        self.seg_subs = {}
        self.loops = []
        for in_b, passages, _ in self.paths:
            chain = []
            nseg = len(passages) + 1

            def singular(i):
                return not tangle.vertices[passages[i].vid].is_crossing()

            for seg in range(nseg):
                # A segment turns where it must: tangency contacts force the
                # direction to converge, so singular-adjacent segments get an
                # extra sector; kink loops need room for a full turn; a
                # vertex-free arc turns between its fixed ends.
                if nseg == 1:
                    subs = 3
                elif seg == 0:
                    subs = 2 if singular(0) else 1
                elif seg == nseg - 1:
                    subs = 2 if singular(nseg - 2) else 1
                elif passages[seg - 1].vid == passages[seg].vid:
                    subs = 4
                    self.loops.append((in_b, seg))
                else:
                    subs = 2 if (singular(seg - 1) or singular(seg)) else 1
                keys = [(tag, in_b, seg, j) for j in range(subs)]
                self.seg_subs[(in_b, seg)] = keys
                chain.extend(keys)
            self.chains[in_b] = chain
        self.vertex_passages = {}
        for in_b, passages, _ in self.paths:
            for i, p in enumerate(passages):
                self.vertex_passages.setdefault(p.vid, []).append((in_b, i))
        # Edge index -> (strand, segment index): for face winding.
        self.edge_seg = {}
        for in_b, passages, _ in self.paths:
            k, _ = tangle.port_use(bport_(in_b))
            self.edge_seg[k] = (in_b, 0)
            for i, p in enumerate(passages):
                k2, _ = tangle.port_use(vport(p.vid, p.out_slot))
                self.edge_seg[k2] = (in_b, i + 1)
        # Dart (pointing away from its node) -> direction (sub key, offset),
        # offset None meaning +N/2.  The source dart of an edge points along
        # the motion at the segment start; the destination dart points back.
        self.dart_dir = {}
        for k, (in_b, seg) in self.edge_seg.items():
            subs = self.seg_subs[(in_b, seg)]
            self.dart_dir[("e", k, 0)] = (subs[0], 0)
            self.dart_dir[("e", k, 1)] = (subs[-1], None)

    def arr_key(self, in_b, i):
        return self.seg_subs[(in_b, i)][-1]

    def dep_key(self, in_b, i):
        return self.seg_subs[(in_b, i + 1)][0]

    def passage(self, in_b, i):
        for b2, ps, _ in self.paths:
            if b2 == in_b:
                return ps[i]
        raise KeyError(in_b)


# ---------------------------------------------------------------------------
# System construction


def build_constraints(m: MoveVariant, n: int, config: FrontConfig = FrontConfig()) -> LiftSystem:
    """The finite constraint system whose satisfiability decides realizability."""
    if n % 4 != 0:
        raise ValueError("resolution must be divisible by 4")
    return _build_one(m, n, config)


def _build_one(m, n, config):
    budget = n // config.budget_div
    tol = max(1, n // config.bigon_tol_div)
    cusp_tol = max(2, n // config.cusp_tol_div)

    sides = {"lhs": _SideData("lhs", m.lhs), "rhs": _SideData("rhs", m.rhs)}

    # The front is an epsilon-perturbation of the transverse diagram, so the
    # diagram's own faces are the planarity scaffold; corners at singular
    # vertices may pinch to zero angle (the tangency).
    face_data = {}
    for tag, side in sides.items():
        faces = trace_faces(side.tangle)
        sing = {vid for vid, v in side.tangle.vertices.items() if not v.is_crossing()}
        face_data[tag] = (faces, sing)

    uf = _Union()
    for side in sides.values():
        for chain in side.chains.values():
            for key in chain:
                uf.find(key)
    for in_b in sides["lhs"].chains:
        lc, rc = sides["lhs"].chains[in_b], sides["rhs"].chains[in_b]
        uf.union(lc[0], rc[0])
        uf.union(lc[-1], rc[-1])

    reps = sorted({uf.find(k) for k in list(uf.parent)})
    rep_index = {rep: i for i, rep in enumerate(reps)}
    var_of = {key: rep_index[uf.find(key)] for key in list(uf.parent)}
    names = tuple(":".join(map(str, rep)) for rep in reps)
    nv = len(reps)

    constraints = []
    roles = {int(sid[1:]): role for sid, role in m.roles}

    def add(kind, scope, uses_chart, pred, label):
        constraints.append(
            Constraint(kind, tuple(sorted(set(scope))), uses_chart, pred, label)
        )

    # Turning lifts: Whitney sign sums must agree strand by strand.
    chains = {}
    for in_b, passages, _ in sides["lhs"].paths:
        lhs_sum = whitney_sign_sum(passages)
        rhs_passages = next(ps for ib, ps, _ in sides["rhs"].paths if ib == in_b)
        rhs_sum = whitney_sign_sum(rhs_passages)
        ok = lhs_sum == rhs_sum
        add(
            "turning-match",
            (),
            False,
            (lambda vals, r, ok=ok: ok),
            f"s{in_b}:whitney {lhs_sum} vs {rhs_sum}",
        )

    # Boundary anchoring: endpoints sit at fixed circle positions (evenly
    # spaced); strands enter pointing into the disk and exit pointing out.
    # This pins the global rotation gauge, making orientation variants
    # genuinely different systems.
    n_ends = m.lhs.n_endpoints
    for in_b, passages, out_b in sides["lhs"].paths:
        chain_keys = sides["lhs"].chains[in_b]
        entry_var = var_of[chain_keys[0]]
        exit_var = var_of[chain_keys[-1]]
        phi_in = round(in_b * n / n_ends) % n
        phi_out = round(out_b * n / n_ends) % n

        def inward_pred(vals, r, v=entry_var, phi=phi_in):
            return 0 < (vals[v] - phi - n // 4) % n < n // 2

        def outward_pred(vals, r, v=exit_var, phi=phi_out):
            return 0 < (vals[v] - phi + n // 4) % n < n // 2

        add("boundary-anchor", (entry_var,), False, inward_pred, f"s{in_b}:entry")
        add("boundary-anchor", (exit_var,), False, outward_pred, f"s{in_b}:exit")

    for tag, side in sides.items():
        for in_b, chain_keys in side.chains.items():
            chain = [var_of[k] for k in chain_keys]
            chains.setdefault(f"s{in_b}", {})[tag] = chain
            for k in range(len(chain) - 1):
                a, b = chain[k], chain[k + 1]

                def budget_pred(vals, r, a=a, b=b):
                    return abs(centered(vals[b] - vals[a], n)) <= budget

                add("turn-budget", (a, b), False, budget_pred, f"{tag}:s{in_b}:gap{k}")

        for in_b, seg in side.loops:
            subs = [var_of[k] for k in side.seg_subs[(in_b, seg)]]

            def loop_pred(vals, r, subs=tuple(subs)):
                total = 0
                for i in range(len(subs) - 1):
                    total += centered(vals[subs[i + 1]] - vals[subs[i]], n)
                return abs(total) > n // 2

            add("loop-turn", tuple(subs), False, loop_pred, f"{tag}:s{in_b}:loop")

        for vid in sorted(side.vertex_passages):
            v = side.tangle.vertices[vid]
            incid = side.vertex_passages[vid]
            (sa, ia), (sb, ib) = incid
            pa, pb = side.passage(sa, ia), side.passage(sb, ib)
            aa, ab = var_of[side.arr_key(sa, ia)], var_of[side.arr_key(sb, ib)]
            da, db = var_of[side.dep_key(sa, ia)], var_of[side.dep_key(sb, ib)]
            if v.is_crossing():
                def transverse_pred(vals, r, da=da, db=db):
                    return (vals[da] - vals[db]) % (n // 2) != 0

                add("transverse-tangent", (da, db), False, transverse_pred, f"{tag}:v{vid}")

                over_first = (pa.in_slot % 2) == v.over_axis
                do, du = (da, db) if over_first else (db, da)

                def over_pred(vals, r, do=do, du=du):
                    lo = (vals[do] - r) % n
                    lu = (vals[du] - r) % n
                    if lo == 0 or lu == 0:
                        return False
                    return (lo > lu) == config.over_is_larger

                add("over-under", (do, du), True, over_pred, f"{tag}:v{vid}")

                slot_dirs = []
                for slot in range(4):
                    if slot == pa.in_slot:
                        slot_dirs.append((aa, n // 2))
                    elif slot == pa.out_slot:
                        slot_dirs.append((da, 0))
                    elif slot == pb.in_slot:
                        slot_dirs.append((ab, n // 2))
                    else:
                        slot_dirs.append((db, 0))

                def winding_pred(vals, r, slot_dirs=tuple(slot_dirs)):
                    ds = [(vals[v0] + off) % n for v0, off in slot_dirs]
                    total = 0
                    for i in range(4):
                        g = (ds[(i + 1) % 4] - ds[i]) % n
                        if g == 0:
                            return False
                        total += g
                    return total == n

                add("vertex-winding", (aa, ab, da, db), False, winding_pred, f"{tag}:v{vid}")
            else:
                def equal_pred(vals, r, aa=aa, ab=ab):
                    return (vals[aa] - vals[ab]) % n == 0

                add("equal-direction", (aa, ab), False, equal_pred, f"{tag}:v{vid}")

                # The branches separate within the cusp opening: departures
                # stay near the common contact direction.
                for dep_v, arr_v in ((da, ab), (db, aa)):

                    def cusp_pred(vals, r, dep_v=dep_v, arr_v=arr_v):
                        return abs(centered(vals[dep_v] - vals[arr_v], n)) <= cusp_tol

                    add("cusp-angle", (dep_v, arr_v), False, cusp_pred, f"{tag}:v{vid}")

                if m.family == "O4":
                    mover = [b2 for b2, role in roles.items() if role == "moving"]
                    if len(mover) != 1:
                        raise ValueError("O4 move needs a moving strand role")
                    mv = mover[0]
                    mids = tuple(var_of[k] for k in side.seg_subs[(mv, 1)])

                    def wedge_pred(vals, r, da=da, db=db, mids=mids):
                        # Strictly inside the short arc between the outgoing
                        # branch directions, whichever way it opens.
                        w1 = (vals[db] - vals[da]) % n
                        w2 = (vals[da] - vals[db]) % n
                        for a_var_val, width in ((vals[da], w1), (vals[db], w2)):
                            if width <= n // 2 and all(
                                0 < (vals[mid] - a_var_val) % n < width for mid in mids
                            ):
                                return True
                        return False

                    add("wedge", (da, db) + mids, False, wedge_pred, f"{tag}:v{vid}")

        for sa, sb, co in _bigon_pairs(side.paths):
            subs_a = [var_of[k] for k in side.seg_subs[(sa, 1)]]
            subs_b = [var_of[k] for k in side.seg_subs[(sb, 1)]]
            if not co:
                subs_b = list(reversed(subs_b))
            off = 0 if co else n // 2
            for ma, mb in zip(subs_a, subs_b):

                def bigon_pred(vals, r, ma=ma, mb=mb, off=off):
                    return abs(centered(vals[mb] + off - vals[ma], n)) <= tol

                add("bigon-orientation", (ma, mb), False, bigon_pred, f"{tag}:s{sa}s{sb}")

            if m.family == "O2" and tag == "lhs":
                add(
                    "no-direct-tangency",
                    (),
                    False,
                    (lambda vals, r, ok=not co: ok),
                    f"{tag}:s{sa}s{sb}",
                )

        # Internal faces: discrete Gauss-Bonnet.
        faces, sing_vids = face_data[tag]
        for face in faces:
            if any(d[0] != "e" for d in face):
                continue
            nodes = []
            ok = True
            for d in face:
                node = side.tangle.edges[d[1]][d[2]]
                if node[0] == "b":
                    ok = False
                    break
                nodes.append(node)
            if not ok or not face:
                continue
            # Walk the face: each dart d is traversed from node(d) along edge.
            terms = []  # (kind, payload)
            corner_pairs = []
            for i, d in enumerate(face):
                kind, k, end = d
                in_b, seg = side.edge_seg[k]
                subs = [var_of[x] for x in side.seg_subs[(in_b, seg)]]
                sign = 1 if end == 0 else -1
                terms.append(("edge", tuple(subs), sign))
                nxt = face[(i + 1) % len(face)]
                arrive_dart = (kind, k, 1 - end)  # dart at the node we reach
                corner_pairs.append((arrive_dart, nxt))

            corner_exprs = []
            for d_a, d_b in corner_pairs:
                ka, oa = side.dart_dir[d_a]
                kb, ob = side.dart_dir[d_b]
                va, vb = var_of[ka], var_of[kb]
                offa = n // 2 if oa is None else oa
                offb = n // 2 if ob is None else ob
                node = side.tangle.edges[d_a[1]][d_a[2]]
                is_cusp = node[0] == "v" and node[1] in sing_vids
                corner_exprs.append((va, offa, vb, offb, is_cusp))

            scope = set()
            for _, subs, _ in terms:
                scope.update(subs)
            for va, _, vb, _, _ in corner_exprs:
                scope.add(va)
                scope.add(vb)

            def face_pred(vals, r, terms=tuple(terms), corners=tuple(corner_exprs)):
                total = 0
                for _, subs, sign in terms:
                    t = 0
                    for i in range(len(subs) - 1):
                        t += centered(vals[subs[i + 1]] - vals[subs[i]], n)
                    total += sign * t
                for va, offa, vb, offb, is_cusp in corners:
                    lam = ((vals[vb] + offb) - (vals[va] + offa)) % n
                    if lam == 0 and not is_cusp:
                        return False
                    total += lam - n // 2
                return total == -n

            add(
                "face-winding",
                tuple(scope),
                False,
                face_pred,
                f"{tag}:face{len(face)}",
            )

    has_chart = any(c.uses_chart for c in constraints)
    return LiftSystem(m.name, n, nv, names, has_chart, constraints, chains)
