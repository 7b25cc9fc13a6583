"""Bounded breadth-first derivation search.

The state space is the set of canonical codes of tangles reachable from the
target's left side by applying allowed rules in both directions.  Expansion
order is deterministic (sorted rule names, LtoR before RtoL, ascending
anchors), so repeated runs return the identical certificate.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
import time

from .catalog import Catalog, MoveVariant
from .diagram import Tangle, canonical_code
from .rewrite import Certificate, RewriteStep, apply_step, RewriteError
from .surgery import find_embeddings


@dataclass(frozen=True)
class SearchLimits:
    max_vertices: int = 8
    max_steps: int = 8
    wall_clock: float | None = None

    def check(self):
        if self.max_vertices <= 0 or self.max_steps <= 0:
            raise ValueError("search limits must be positive")
        if self.wall_clock is not None and self.wall_clock <= 0:
            raise ValueError("search limits must be positive")


@dataclass(frozen=True)
class Exhausted:
    limits: SearchLimits
    explored: int

    def __bool__(self) -> bool:
        return False


def _delta_feasible(delta: int, remaining: int, deltas) -> bool:
    """Can a sum of ``remaining`` step deltas (each from ``deltas``) reach ``delta``?"""
    if remaining < 0:
        return False
    big = max((abs(d) for d in deltas), default=0)
    if abs(delta) > big * remaining:
        return False
    if all(d % 2 == 0 for d in deltas) and delta % 2 != 0:
        return False
    return True


def bounded_search(
    target: MoveVariant, allowed, catalog: Catalog, limits: SearchLimits = SearchLimits()
):
    """BFS for a replay-valid certificate deriving ``target`` from ``allowed``.

    Returns a Certificate, or Exhausted(limits) when no derivation exists
    within the limits.
    """
    limits.check()
    allowed = sorted(set(allowed))
    for name in allowed:
        if name not in catalog:
            raise KeyError(f"unknown move name {name!r}")
    t0 = time.monotonic()

    goal = canonical_code(target.rhs)
    start = target.lhs
    start_code = canonical_code(start)

    # Per-rule step deltas available, for pruning.
    rule_deltas = set()
    for name in allowed:
        m = catalog[name]
        d = m.rhs.crossing_count() - m.lhs.crossing_count()
        rule_deltas.update({d, -d})
    goal_crossings = target.rhs.crossing_count()

    seen = {start_code: (None, None, start)}  # code -> (parent code, step, tangle)

    def reconstruct(code):
        steps = []
        while True:
            parent, step, _ = seen[code]
            if parent is None:
                break
            steps.append(step)
            code = parent
        steps.reverse()
        return Certificate(
            f"search:{target.name}",
            target.name,
            frozenset(allowed),
            tuple(steps),
            "search-discovered",
        )

    if start_code == goal:
        return reconstruct(start_code)

    queue = deque([(start_code, 0)])
    explored = 0
    while queue:
        code, depth = queue.popleft()
        if depth >= limits.max_steps:
            continue
        if limits.wall_clock is not None and time.monotonic() - t0 > limits.wall_clock:
            break
        _, _, host = seen[code]
        explored += 1
        remaining = limits.max_steps - depth
        for name in allowed:
            move = catalog[name]
            for direction in ("LtoR", "RtoL"):
                pattern = move.lhs if direction == "LtoR" else move.rhs
                replacement = move.rhs if direction == "LtoR" else move.lhs
                d = replacement.crossing_count() - pattern.crossing_count()
                new_cross = host.crossing_count() + d
                if not _delta_feasible(goal_crossings - new_cross, remaining - 1, rule_deltas):
                    continue
                if (
                    new_cross + host.singular_count() > limits.max_vertices
                    and d > 0
                ):
                    continue
                try:
                    embs = find_embeddings(pattern, host)
                except ValueError:
                    continue
                for anchor in range(len(embs)):
                    step = RewriteStep(name, direction, anchor)
                    try:
                        nxt = apply_step(host, step, catalog)
                    except RewriteError:
                        continue
                    if len(nxt.vertices) > limits.max_vertices:
                        continue
                    ncode = canonical_code(nxt)
                    if ncode in seen:
                        continue
                    seen[ncode] = (code, step, nxt)
                    if ncode == goal:
                        return reconstruct(ncode)
                    queue.append((ncode, depth + 1))
    return Exhausted(limits, explored)
