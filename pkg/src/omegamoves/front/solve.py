"""Solvers for the sector constraint systems.

The central engine is a backtracker that maintains arc consistency over
binary constraints (and filters any constraint down to its last unassigned
variable), with exact coverage accounting: every assignment of the full
N^vars x N domain is either visited or excluded by a recorded violation on a
prefix, so the coverage counter (a Python integer) ends at exactly the domain
size for an exhaustive run; obstructed verdicts assert that.  Excluded blocks
are tallied against the constraint enforced when they were cut off.

``solve_first`` runs the engine with static lexicographic ordering and
returns the first solution in lexicographic order over (vars, chart).
``literal_sweep`` enumerates the domain without pruning; it cross-checks the
engine on small systems and is the package's hot kernel (a compiled version
is selected when available).
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import LiftSystem


@dataclass
class SweepStats:
    domain_size: int
    covered: int
    satisfiable: bool
    n_solutions: int
    exclusion_tally: dict
    first_solution: tuple | None  # (assignment tuple, chart or None)
    method: str = "propagating-sweep"


class _Engine:
    def __init__(self, system: LiftSystem, disabled=()):
        self.sys = system
        self.n = system.resolution
        self.nv = system.n_vars
        self.chart_var = self.nv if system.has_chart else None
        self.m = self.nv + (1 if system.has_chart else 0)
        self.constraints = [c for c in system.constraints if c.kind not in disabled]
        self.incident = [[] for _ in range(self.m)]
        self.binary = [[] for _ in range(self.m)]  # var -> [(constraint, other)]
        self.const_false = []
        for c in self.constraints:
            scope = set(c.scope)
            if c.uses_chart and self.chart_var is not None:
                scope.add(self.chart_var)
            scope = tuple(sorted(scope))
            if not scope:
                self.const_false.append(c)
                continue
            for v in scope:
                self.incident[v].append((c, scope))
            if len(scope) == 2:
                a, b = scope
                self.binary[a].append((c, b))
                self.binary[b].append((c, a))

    def _pred(self, c, vals, chart):
        return c.pred(vals, chart if chart is not None else 0)

    def run(self, order_policy="dynamic", stop_at_first=True):
        n, m = self.n, self.m
        sys = self.sys
        vals = [None] * self.nv
        chart_box = [None]
        alive = [[True] * n for _ in range(m)]
        removed_by = [[None] * n for _ in range(m)]
        alive_count = [n] * m
        assigned = [False] * m
        trail = []
        tally = {}
        covered = 0
        solutions = 0
        first = None
        power = [n ** k for k in range(m + 2)]

        for c in self.const_false:
            if not self._pred(c, vals, 0):
                dom = power[m]
                return SweepStats(dom, dom, False, 0, {c.kind: dom}, None)

        def val_get(v):
            return chart_box[0] if v == self.chart_var else vals[v]

        def val_set(v, x):
            if v == self.chart_var:
                chart_box[0] = x
            else:
                vals[v] = x

        def remove(v, x, kind):
            alive[v][x] = False
            removed_by[v][x] = kind
            alive_count[v] -= 1
            trail.append((v, x))

        def restore(mark):
            while len(trail) > mark:
                v, x = trail.pop()
                alive[v][x] = True
                removed_by[v][x] = None
                alive_count[v] += 1

        def check_full(c, scope):
            return self._pred(c, vals, chart_box[0])

        def filter_last(c, scope, target):
            """All scope vars but ``target`` assigned: prune its domain."""
            hit = False
            for x in range(n):
                if not alive[target][x]:
                    continue
                val_set(target, x)
                ok = self._pred(c, vals, chart_box[0])
                val_set(target, None)
                if not ok:
                    remove(target, x, c.kind)
                    hit = True
            return hit

        def revise(c, target, other):
            """Binary arc revision: keep target values with some support."""
            hit = False
            for x in range(n):
                if not alive[target][x]:
                    continue
                val_set(target, x)
                support = False
                for y in range(n):
                    if not alive[other][y]:
                        continue
                    val_set(other, y)
                    if self._pred(c, vals, chart_box[0]):
                        support = True
                        break
                val_set(other, None)
                val_set(target, None)
                if not support:
                    remove(target, x, c.kind)
                    hit = True
            return hit

        def propagate(start_vars):
            """AC over binaries + last-variable filtering.  Returns the kind
            that wiped a domain, or None."""
            queue = list(start_vars)
            qi = 0
            while qi < len(queue):
                v = queue[qi]
                qi += 1
                for c, scope in self.incident[v]:
                    unassigned = [u for u in scope if not assigned[u]]
                    if not unassigned:
                        if not check_full(c, scope):
                            return c.kind
                        continue
                    if len(unassigned) == 1:
                        t = unassigned[0]
                        if filter_last(c, scope, t):
                            if alive_count[t] == 0:
                                return c.kind
                            queue.append(t)
                    elif len(scope) == 2:
                        t = unassigned[0] if unassigned[1] == v else (
                            unassigned[1] if unassigned[0] == v else None
                        )
                        if t is None and len(unassigned) == 2:
                            # v assigned: both others... cannot happen for binary
                            continue
                        if t is not None and revise(c, t, v):
                            if alive_count[t] == 0:
                                return c.kind
                            queue.append(t)
            return None

        def pick():
            if order_policy == "lex":
                for v in range(m):
                    if not assigned[v]:
                        return v
                return None
            best = None
            best_key = None
            for v in range(m):
                if assigned[v]:
                    continue
                key = (alive_count[v], -len(self.incident[v]), v)
                if best_key is None or key < best_key:
                    best, best_key = v, key
            return best

        # Root propagation over binary constraints.
        root_kind = propagate(list(range(m)))
        if root_kind is not None:
            dom = power[m]
            return SweepStats(dom, dom, False, 0, {root_kind: dom}, None)

        def rec(depth):
            nonlocal covered, solutions, first
            if depth == m:
                covered += 1
                solutions += 1
                if first is None:
                    first = (tuple(vals), chart_box[0] if sys.has_chart else None)
                return stop_at_first
            v = pick()
            block = power[m - depth - 1]
            for x in range(n):
                if not alive[v][x]:
                    kind = removed_by[v][x] or "pruned"
                    tally[kind] = tally.get(kind, 0) + block
                    covered += block
                    continue
                mark = len(trail)
                val_set(v, x)
                assigned[v] = True
                # Narrow v's domain to {x} for propagation (siblings are
                # accounted by this loop, so the removals carry no kind).
                for y in range(n):
                    if y != x and alive[v][y]:
                        remove(v, y, "sibling")
                bad = propagate([v])
                if bad is not None:
                    tally[bad] = tally.get(bad, 0) + block
                    covered += block
                else:
                    if rec(depth + 1):
                        assigned[v] = False
                        val_set(v, None)
                        restore(mark)
                        return True
                assigned[v] = False
                val_set(v, None)
                restore(mark)
            return False

        stopped = rec(0)
        dom = power[m]
        if not stopped:
            assert covered == dom, (covered, dom)
        return SweepStats(dom, covered, solutions > 0, solutions, tally, first)


def sweep_exhaust(system: LiftSystem, disabled=(), stop_at_first=False) -> SweepStats:
    """Exhaust the domain (or stop at the first solution if asked)."""
    return _Engine(system, disabled).run("dynamic", stop_at_first=stop_at_first)


def solve_first(system: LiftSystem):
    """First solution in lexicographic order over (vars, chart), or None."""
    stats = _Engine(system).run("lex", stop_at_first=True)
    return stats.first_solution


def removal_sat(system: LiftSystem, kind: str) -> bool:
    """Satisfiable once every constraint of ``kind`` is dropped?"""
    stats = _Engine(system, disabled=(kind,)).run("dynamic", stop_at_first=True)
    return stats.satisfiable


def count_solutions(system: LiftSystem) -> int:
    """Exact number of satisfying assignments over the full domain."""
    stats = _Engine(system).run("dynamic", stop_at_first=False)
    return stats.n_solutions


def literal_sweep(system: LiftSystem, use_kernel: bool = True) -> SweepStats:
    """Unpruned enumeration of the entire domain (cross-check / benchmark)."""
    from .. import kernels

    n = system.resolution
    if use_kernel and kernels.HAVE_SPEEDUPS:
        compiled = kernels.compile_system(system)
        if compiled is not None:
            return kernels.literal_sweep_compiled(system, compiled)
    charts = range(n) if system.has_chart else (0,)
    vals = [0] * system.n_vars
    dom = system.domain_size()
    tally = {}
    solutions = 0
    first = None
    covered = 0

    def rec(v):
        nonlocal solutions, first, covered
        if v == system.n_vars:
            for r in charts:
                covered += 1
                bad = None
                for c in system.constraints:
                    if not c.pred(vals, r):
                        bad = c
                        break
                if bad is None:
                    solutions += 1
                    if first is None:
                        first = (tuple(vals), r if system.has_chart else None)
                else:
                    tally[bad.kind] = tally.get(bad.kind, 0) + 1
            return
        for value in range(n):
            vals[v] = value
            rec(v + 1)

    rec(0)
    assert covered == dom
    return SweepStats(dom, covered, solutions > 0, solutions, tally, first, "literal")
