"""Per-move front realizability verdicts and the full classification table."""

from __future__ import annotations

from dataclasses import dataclass

from .model import FrontConfig, LiftSystem, build_constraints
from .solve import removal_sat, solve_first, sweep_exhaust

# Obstruction names, keyed by the constraint kind whose removal unblocks.
_OBSTRUCTION_OF_KIND = {
    "turning-match": "turning-mismatch",
    "turn-budget": "turning-mismatch",
    "loop-turn": "turning-mismatch",
    "no-direct-tangency": "forbidden-direct-tangency",
    "equal-direction": "forbidden-direct-tangency",
    "bigon-orientation": "forbidden-direct-tangency",
    "cusp-angle": "forbidden-direct-tangency",
    "transverse-tangent": "forbidden-direct-tangency",
    "wedge": "no-common-quadrant",
    "vertex-winding": "no-common-quadrant",
    "face-winding": "no-common-quadrant",
    "over-under": "over-under-inconsistent",
    "boundary-anchor": "no-common-quadrant",
}

_PRIORITY = (
    "turning-match",
    "no-direct-tangency",
    "wedge",
    "equal-direction",
    "face-winding",
    "over-under",
    "bigon-orientation",
    "cusp-angle",
    "vertex-winding",
    "transverse-tangent",
    "loop-turn",
    "turn-budget",
    "boundary-anchor",
)


@dataclass(frozen=True)
class RealizabilityVerdict:
    move: str
    realizable: bool
    obstruction: str | None
    blocking_kinds: tuple  # kinds whose removal unblocks some chirality
    witness: tuple | None  # (assignment, chart, chirality) when realizable
    domain_sizes: tuple  # per chirality system
    swept: tuple  # coverage counters per chirality system
    exclusion_tally: dict

    def witness_assignment(self):
        return self.witness


def _systems(move, n, config):
    built = build_constraints(move, n, config)
    if isinstance(built, LiftSystem):
        return [built]
    return built


def classify_move(move, n: int, config: FrontConfig = FrontConfig()) -> RealizabilityVerdict:
    systems = _systems(move, n, config)
    # Realizable iff some chirality admits a solution.
    for system in systems:
        stats = sweep_exhaust(system, stop_at_first=True)
        if stats.satisfiable:
            witness = solve_first(system)
            assert witness is not None
            vals, chart = witness
            for c in system.constraints:
                assert c.pred(list(vals), chart or 0), f"witness fails {c.kind} {c.label}"
            return RealizabilityVerdict(
                move.name,
                True,
                None,
                (),
                (vals, chart, system.chirality),
                tuple(s.domain_size() for s in systems),
                (stats.covered,),
                {},
            )
    # Obstructed: every chirality swept in full.
    tally = {}
    swept = []
    domains = []
    blocking = set()
    for system in systems:
        full = sweep_exhaust(system, stop_at_first=False)
        assert not full.satisfiable
        assert full.covered == system.domain_size()
        swept.append(full.covered)
        domains.append(system.domain_size())
        for k, v in full.exclusion_tally.items():
            tally[k] = tally.get(k, 0) + v
        for kind in system.kinds():
            if removal_sat(system, kind):
                blocking.add(kind)
    name = None
    for kind in _PRIORITY:
        if kind in blocking:
            name = _OBSTRUCTION_OF_KIND[kind]
            break
    if name is None and tally:
        kind = max(tally, key=lambda k: (tally[k], k))
        name = _OBSTRUCTION_OF_KIND.get(kind, "over-under-inconsistent")
    return RealizabilityVerdict(
        move.name,
        False,
        name,
        tuple(sorted(blocking)),
        None,
        tuple(domains),
        tuple(swept),
        tally,
    )


def classify_all(catalog, n: int, config: FrontConfig = FrontConfig()) -> dict:
    """Verdicts for every catalog move, merged deterministically by name."""
    out = {}
    for name in catalog:
        out[name] = classify_move(catalog[name], n, config)
    return out


def realizable_set(verdicts: dict) -> frozenset:
    return frozenset(n for n, v in verdicts.items() if v.realizable)
