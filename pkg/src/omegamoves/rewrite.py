"""Rewrite steps, derivation certificates, and certificate replay.

A step names a rule, a direction, and an anchor: the index of the chosen
embedding in the deterministically sorted embedding list of the relevant move
side.  Anchors survive arbitrary relabeling of intermediate tangles because
the embedding order is keyed to canonical labels.
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import Catalog, MoveVariant, normalize_name
from .diagram import InterfaceMismatch, Tangle, canonical_code, equals, validate
from .surgery import find_embeddings, splice


class RewriteError(ValueError):
    pass


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    direction: str  # "LtoR" | "RtoL"
    anchor: int

    def inverted(self) -> "RewriteStep":
        return RewriteStep(
            self.rule, "RtoL" if self.direction == "LtoR" else "LtoR", self.anchor
        )

    def __str__(self) -> str:
        return f"{self.rule} {self.direction} @{self.anchor}"


@dataclass(frozen=True)
class Certificate:
    name: str
    target: str
    allowed: frozenset
    steps: tuple
    provenance: str = ""


@dataclass(frozen=True)
class ReplayResult:
    valid: bool
    reason: str
    trace: tuple  # tangles, starting at target.lhs

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class DerivationRecord:
    derived: str
    requires: frozenset
    certificate: str


def apply_step(host: Tangle, step: RewriteStep, catalog: Catalog) -> Tangle:
    if step.rule not in catalog:
        raise RewriteError(f"unknown rule {step.rule!r}")
    move = catalog[step.rule]
    pattern = move.lhs if step.direction == "LtoR" else move.rhs
    replacement = move.rhs if step.direction == "LtoR" else move.lhs
    embs = find_embeddings(pattern, host)
    if not embs:
        raise RewriteError(f"no embeddings of {step.rule}.{step.direction} in host")
    if not 0 <= step.anchor < len(embs):
        raise RewriteError(
            f"anchor {step.anchor} out of range ({len(embs)} embeddings of"
            f" {step.rule}.{step.direction})"
        )
    result = splice(host, embs[step.anchor].region, replacement)
    bad = validate(result)
    if bad:
        raise RewriteError(
            "rewrite produced an invalid tangle: " + "; ".join(map(str, bad))
        )
    return result


def step_delta(step: RewriteStep, catalog: Catalog) -> int:
    """Crossing-count change of the step (Omega1: +-1, Omega2: +-2, else 0)."""
    move = catalog[step.rule]
    d = move.rhs.crossing_count() - move.lhs.crossing_count()
    return d if step.direction == "LtoR" else -d


def replay_certificate(cert: Certificate, catalog: Catalog) -> ReplayResult:
    if cert.target not in catalog:
        return ReplayResult(False, f"unknown target {cert.target!r}", ())
    target = catalog[cert.target]
    trace = [target.lhs]
    for i, step in enumerate(cert.steps):
        if step.rule not in cert.allowed:
            return ReplayResult(
                False, f"step {i}: disallowed rule {step.rule!r}", tuple(trace)
            )
        try:
            trace.append(apply_step(trace[-1], step, catalog))
        except RewriteError as exc:
            return ReplayResult(False, f"step {i}: anchor failure: {exc}", tuple(trace))
    try:
        ok = equals(trace[-1], target.rhs)
    except InterfaceMismatch:
        ok = False
    if not ok:
        return ReplayResult(False, "terminal mismatch", tuple(trace))
    return ReplayResult(True, "", tuple(trace))


def reversed_certificate(cert: Certificate) -> Certificate:
    """Steps inverted and reversed: replays target.rhs back to target.lhs.

    The anchors of the inverted steps are recomputed at replay positions, so
    they must be re-resolved; this helper only works when each inverted step's
    embedding index matches, which replay verifies.  Use
    ``reanchor_reversed`` for the general construction.
    """
    steps = tuple(s.inverted() for s in reversed(cert.steps))
    return Certificate(cert.name + ".rev", cert.target, cert.allowed, steps, cert.provenance)


def reanchor_reversed(cert: Certificate, catalog: Catalog):
    """Replay ``cert``, then build the reverse derivation with correct anchors.

    Returns (reverse steps, trace) where the steps transform target.rhs into
    target.lhs.  Each inverted step must undo its forward step, so its anchor
    is located by searching the embedding list for the unique embedding whose
    splice restores the earlier trace element.
    """
    res = replay_certificate(cert, catalog)
    if not res.valid:
        raise RewriteError(f"cannot reverse invalid certificate: {res.reason}")
    trace = res.trace
    rev = []
    for i in range(len(cert.steps) - 1, -1, -1):
        fwd = cert.steps[i]
        before, after = trace[i], trace[i + 1]
        inv = fwd.inverted()
        move = catalog[inv.rule]
        pattern = move.lhs if inv.direction == "LtoR" else move.rhs
        replacement = move.rhs if inv.direction == "LtoR" else move.lhs
        embs = find_embeddings(pattern, after)
        anchor = None
        for j, emb in enumerate(embs):
            try:
                cand = splice(after, emb.region, replacement)
            except ValueError:
                continue
            if validate(cand):
                continue
            if canonical_code(cand) == canonical_code(before):
                anchor = j
                break
        if anchor is None:
            raise RewriteError(f"no undoing anchor for step {i} ({fwd})")
        rev.append(RewriteStep(inv.rule, inv.direction, anchor))
    return tuple(rev)


def check_derivation(target: MoveVariant, allowed, cert: Certificate, catalog: Catalog):
    """Package a replay into closure evidence.

    Returns a DerivationRecord on success; raises RewriteError with the named
    failure otherwise.
    """
    if normalize_name(cert.target) != target.name:
        raise RewriteError(
            f"certificate targets {cert.target!r}, expected {target.name!r}"
        )
    allowed = frozenset(normalize_name(a) for a in allowed)
    if not cert.allowed <= allowed:
        raise RewriteError(
            f"certificate allows {sorted(cert.allowed - allowed)} beyond the granted set"
        )
    res = replay_certificate(cert, catalog)
    if not res.valid:
        raise RewriteError(res.reason)
    used = frozenset(s.rule for s in cert.steps)
    return DerivationRecord(target.name, used & allowed, cert.name)


# ---------------------------------------------------------------------------
# Certificate text format
#
#   certificate <name>
#   target <move>
#   allow <move,...>
#   step <i> rule=<move> dir=<LtoR|RtoL> anchor=<k>


def parse_certificates(text: str, source: str = "<cert>") -> list:
    from .diagram import FormatError

    out = []
    name = target = None
    allowed = frozenset()
    steps = {}
    provenance = []

    def flush():
        nonlocal name, target, allowed, steps, provenance
        if name is None:
            return
        ordered = tuple(steps[i] for i in sorted(steps))
        if list(sorted(steps)) != list(range(len(steps))):
            raise FormatError(f"{source}: certificate {name}: step indices not 0..k")
        out.append(Certificate(name, target, allowed, ordered, " ".join(provenance)))
        name, target, allowed, steps, provenance = None, None, frozenset(), {}, []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            if toks[0] == "certificate":
                flush()
                name = toks[1]
            elif toks[0] == "target":
                target = normalize_name(toks[1])
            elif toks[0] == "allow":
                names = " ".join(toks[1:]).replace(",", " ").split()
                allowed = frozenset(normalize_name(n) for n in names)
            elif toks[0] == "provenance":
                provenance.append(" ".join(toks[1:]))
            elif toks[0] == "step":
                i = int(toks[1])
                fields = dict(tok.split("=", 1) for tok in toks[2:])
                steps[i] = RewriteStep(
                    normalize_name(fields["rule"]), fields["dir"], int(fields["anchor"])
                )
            else:
                raise FormatError(f"unknown directive {toks[0]!r}")
        except (IndexError, KeyError, ValueError) as exc:
            raise FormatError(f"{source}:{lineno}: {raw.strip()!r}: {exc}") from exc
    flush()
    return out


def format_certificate(cert: Certificate) -> str:
    lines = [f"certificate {cert.name}", f"target {cert.target}"]
    if cert.provenance:
        lines.append(f"provenance {cert.provenance}")
    lines.append("allow " + ",".join(sorted(cert.allowed)))
    for i, s in enumerate(cert.steps):
        lines.append(f"step {i} rule={s.rule} dir={s.direction} anchor={s.anchor}")
    return "\n".join(lines) + "\n"
