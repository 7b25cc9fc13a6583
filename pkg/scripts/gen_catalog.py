#!/usr/bin/env python3
"""Generate the move catalog (and later the certificate corpus).

Stage 1: enumerate raw oriented variants per family from geometric sketches,
dedupe by move equivalence (isomorphism rel boundary up to cyclic boundary
rotation and side swap), and check the family counts: 4, 4, 8, 8, 6.

Run from the repository root:  python scripts/gen_catalog.py [--stage N]
"""

import argparse
import itertools
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from omegamoves.diagram import Tangle, bport, canonical_code, is_bport, vport
from omegamoves.sketch import TangleSketch, bpt


def rotate_boundary(t: Tangle, k: int) -> Tangle:
    """Relabel boundary point i as (i - k) mod n (rotate the disk by k slots)."""
    n = t.n_endpoints
    if n == 0 or k % n == 0:
        return t
    flags = tuple(t.endpoints[(i + k) % n] for i in range(n))

    def mp(p):
        if is_bport(p):
            return bport((p[1] - k) % n)
        return p

    return Tangle(flags, t.vertices, [(mp(s), mp(d)) for s, d in t.edges])


def move_class_key(lhs: Tangle, rhs: Tangle):
    """Canonical key of the move up to boundary rotation and side swap."""
    n = lhs.n_endpoints
    best = None
    for k in range(n):
        for a, b in ((lhs, rhs), (rhs, lhs)):
            key = (
                canonical_code(rotate_boundary(a, k)),
                canonical_code(rotate_boundary(b, k)),
            )
            if best is None or key < best:
                best = key
    return best


def pair_key(lhs: Tangle, rhs: Tangle):
    return (canonical_code(lhs), canonical_code(rhs))


# ---------------------------------------------------------------------------
# Raw variant sketches.  Strand reversal = reversed waypoint list.


def _strand(sk, name, ways, reverse):
    sk.strand(name, list(reversed(ways)) if reverse else ways)


def gen_O1():
    """Kinks: loop chirality x over-passage choice."""
    out = []
    for mirror, over_ix in itertools.product((False, True), (0, 1)):
        m = -1 if mirror else 1
        sk = TangleSketch()
        sk.vertex("X", (0, 0), over=("A", over_ix))
        sk.strand(
            "A",
            [
                bpt(270),
                "X",
                (m * 2.2, 0.8),
                (m * 2.9, -0.8),
                (m * 1.5, -0.55),
                "X",
                bpt(90),
            ],
        )
        lhs = sk.build()
        rhs_sk = TangleSketch()
        rhs_sk.strand("A", [bpt(270), bpt(90)])
        rhs = rhs_sk.build()
        params = {"mirror": mirror, "over_ix": over_ix}
        out.append(("O1", lhs, rhs, {"A": "moving"}, params))
    return out


def gen_O2():
    """Pokes: strand orientations x which strand is over (both crossings)."""
    out = []
    for rev_l, rev_r, over in itertools.product((False, True), (False, True), ("L", "R")):
        sk = TangleSketch()
        sk.vertex("X1", (0, -1), over=over)
        sk.vertex("X2", (0, 1), over=over)
        _strand(sk, "L", [bpt(235), "X1", (0.8, 0), "X2", bpt(125)], rev_l)
        _strand(sk, "R", [bpt(305), "X1", (-0.8, 0), "X2", bpt(55)], rev_r)
        lhs = sk.build()
        rsk = TangleSketch()
        _strand(rsk, "L", [bpt(235), bpt(125)], rev_l)
        _strand(rsk, "R", [bpt(305), bpt(55)], rev_r)
        rhs = rsk.build()
        params = {"rev": (rev_l, rev_r), "over": over}
        out.append(("O2", lhs, rhs, {"L": "crossing-1", "R": "crossing-2"}, params))
    return out


def _tri_points(y):
    """Crossing positions of the horizontal mover with the / and \\ strands."""
    x = abs(y) / (3 ** 0.5) * (1 if True else 1)
    return x


def gen_O3():
    """Triangle slides: strand orientations x consistent height orders.

    The classical oriented variants carry a global top/middle/bottom order of
    the three strands (cyclic over-patterns are not part of the move family).
    """
    out = []
    xb = 0.8 / (3 ** 0.5)
    for revs, order in itertools.product(
        itertools.product((False, True), repeat=3),
        itertools.permutations("ABC"),
    ):
        rev_a, rev_b, rev_c = revs
        rank = {s: i for i, s in enumerate(order)}  # 0 = highest

        def over_of(s1, s2):
            return s1 if rank[s1] < rank[s2] else s2

        sk = TangleSketch()
        sk.vertex("XAB", (-xb, -0.8), over=over_of("A", "B"))
        sk.vertex("XAC", (xb, -0.8), over=over_of("A", "C"))
        sk.vertex("XBC", (0, 0), over=over_of("B", "C"))
        _strand(sk, "A", [bpt(180), (-2, -0.8), "XAB", "XAC", (2, -0.8), bpt(0)], rev_a)
        _strand(sk, "B", [bpt(240), "XAB", "XBC", bpt(60)], rev_b)
        _strand(sk, "C", [bpt(120), "XBC", "XAC", bpt(300)], rev_c)
        lhs = sk.build()

        rk = TangleSketch()
        rk.vertex("XAC", (-xb, 0.8), over=over_of("A", "C"))
        rk.vertex("XAB", (xb, 0.8), over=over_of("A", "B"))
        rk.vertex("XBC", (0, 0), over=over_of("B", "C"))
        _strand(rk, "A", [bpt(180), (-2, 0.8), "XAC", "XAB", (2, 0.8), bpt(0)], rev_a)
        _strand(rk, "B", [bpt(240), "XBC", "XAB", bpt(60)], rev_b)
        _strand(rk, "C", [bpt(120), "XAC", "XBC", bpt(300)], rev_c)
        rhs = rk.build()
        params = {"rev": revs, "order": "".join(order)}
        out.append(
            ("O3", lhs, rhs, {"A": "moving", "B": "crossing-1", "C": "crossing-2"}, params)
        )
    return out


def gen_O4():
    """Strand past a singular point: mover height x orientations."""
    out = []
    xb = 0.8 / (3 ** 0.5)
    for rev_m, rev_u, rev_v, m_over in itertools.product(
        (False, True), (False, True), (False, True), (False, True)
    ):
        over_u = "M" if m_over else "U"
        over_v = "M" if m_over else "V"
        sk = TangleSketch()
        sk.vertex("XU", (-xb, -0.8), over=over_u)
        sk.vertex("XV", (xb, -0.8), over=over_v)
        sk.vertex("S", (0, 0), kind="singular")
        _strand(sk, "M", [bpt(180), (-2, -0.8), "XU", "XV", (2, -0.8), bpt(0)], rev_m)
        _strand(sk, "U", [bpt(240), "XU", "S", bpt(60)], rev_u)
        _strand(sk, "V", [bpt(300), "XV", "S", bpt(120)], rev_v)
        lhs = sk.build()

        rk = TangleSketch()
        rk.vertex("XV", (-xb, 0.8), over=over_v)
        rk.vertex("XU", (xb, 0.8), over=over_u)
        rk.vertex("S", (0, 0), kind="singular")
        _strand(rk, "M", [bpt(180), (-2, 0.8), "XV", "XU", (2, 0.8), bpt(0)], rev_m)
        _strand(rk, "U", [bpt(240), "S", "XU", bpt(60)], rev_u)
        _strand(rk, "V", [bpt(300), "S", "XV", bpt(120)], rev_v)
        rhs = rk.build()
        params = {"rev": (rev_m, rev_u, rev_v), "m_over": m_over}
        out.append(
            (
                "O4",
                lhs,
                rhs,
                {"M": "moving", "U": "tangency-1", "V": "tangency-2"},
                params,
            )
        )
    return out


def gen_O5():
    """Crossing past a singular point: orientations x over strand."""
    out = []
    for rev_u, rev_v, over in itertools.product((False, True), (False, True), ("U", "V")):
        sk = TangleSketch()
        sk.vertex("X", (0, -1), over=over)
        sk.vertex("S", (0, 1), kind="singular")
        _strand(sk, "U", [bpt(215), "X", (0.5, 0), "S", bpt(135)], rev_u)
        _strand(sk, "V", [bpt(325), "X", (-0.5, 0), "S", bpt(45)], rev_v)
        lhs = sk.build()
        rk = TangleSketch()
        rk.vertex("S", (0, -1), kind="singular")
        rk.vertex("X", (0, 1), over=over)
        _strand(rk, "U", [bpt(215), "S", (0.5, 0), "X", bpt(135)], rev_u)
        _strand(rk, "V", [bpt(325), "S", (-0.5, 0), "X", bpt(45)], rev_v)
        rhs = rk.build()
        params = {"rev": (rev_u, rev_v), "over": over}
        out.append(("O5", lhs, rhs, {"U": "tangency-1", "V": "tangency-2"}, params))
    return out


def behavioral_classes(raw):
    """Group raw variants by move equivalence (rotation + side swap)."""
    classes = {}
    for entry in raw:
        fam, lhs, rhs, roles, params = entry
        key = move_class_key(lhs.tangle, rhs.tangle)
        classes.setdefault(key, []).append(entry)
    out = []
    for key, members in classes.items():
        members.sort(key=lambda m: pair_key(m[1].tangle, m[2].tangle))
        # Drop members whose plain canonical pair coincides (true duplicates).
        seen = set()
        uniq = []
        for m in members:
            pk = pair_key(m[1].tangle, m[2].tangle)
            if pk not in seen:
                seen.add(pk)
                uniq.append(m)
        out.append((key, uniq))
    out.sort(key=lambda r: r[0])
    return out


def stage1(verbose=True):
    fams = {}
    for gen in (gen_O1, gen_O2, gen_O3, gen_O4, gen_O5):
        raw = gen()
        fam = raw[0][0]
        classes = behavioral_classes(raw)
        fams[fam] = classes
        if verbose:
            sizes = [len(m) for _, m in classes]
            print(f"{fam}: {len(raw)} raw -> {len(classes)} classes (distinct sizes {sizes})")
            for key, members in classes:
                print("   class: " + " | ".join(str(m[4]) for m in members))
    return fams


def select_entries(fams):
    """Pick catalog entries: one representative per class, except O5 where the
    anti-oriented classes ship both presentations (census 2 + 4 = 6)."""
    selection = {}
    for fam, classes in fams.items():
        picks = []
        for key, members in classes:
            if fam == "O5":
                co = members[0][4]["rev"] in ((False, False), (True, True))
                chosen = members[:1] if co else members[:2]
                if not co and len(members) < 2:
                    raise AssertionError("anti O5 class with one presentation")
            else:
                chosen = members[:1]
            picks.extend(chosen)
        picks.sort(key=lambda m: pair_key(m[1].tangle, m[2].tangle))
        selection[fam] = picks
    return selection


def provisional_catalog():
    """Catalog with provisional names <fam>.<i>; returns (catalog, params map)."""
    from omegamoves.catalog import Catalog, MoveVariant

    fams = stage1(verbose=False)
    selection = select_entries(fams)
    moves = []
    params_of = {}
    for fam in ("O1", "O2", "O3", "O4", "O5"):
        for i, (f, lhs, rhs, roles, params) in enumerate(selection[fam]):
            name = f"{fam}.{i}"
            role_items = tuple(
                (f"s{lhs.endpoint_of[(sname, 'start')]}", role)
                for sname, role in sorted(roles.items())
            )
            moves.append(MoveVariant(name, fam, lhs.tangle, rhs.tangle, role_items))
            params_of[name] = params
    return Catalog(moves), params_of


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--stage", type=int, default=1)
    args = ap.parse_args()
    if args.stage == 1:
        stage1()
    else:
        cat, params = provisional_catalog()
        from omegamoves.catalog import validate_catalog

        rep = validate_catalog(cat)
        print("counts:", rep["counts"])
        for d in rep["defects"]:
            print("DEFECT:", d)
        for n in cat:
            print(n, params[n])


if __name__ == "__main__":
    main()
