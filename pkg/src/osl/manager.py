"""Insert, propagate, detect, resolve, re-sweep: the integrated update path."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .belief_base import BeliefBase, BeliefRecord, Literal
from .contradiction import ContradictionComponent, ResolutionReport, joined_conflicts, mcc, resolve
from .propagation import AffectedSet, Notify, SweepReport, full_sweep, propagate


@dataclass
class UpdateReport:
    record: BeliefRecord
    affected: AffectedSet
    components: list[ContradictionComponent] = field(default_factory=list)
    resolution: Optional[ResolutionReport] = None
    joined: list[ContradictionComponent] = field(default_factory=list)
    joined_resolution: Optional[ResolutionReport] = None
    resweep: Optional[SweepReport] = None

    def to_dict(self, carrier=None) -> dict:
        rec = self.record
        rec_d = {"id": rec.id, "atom": rec.literal.atom, "negated": rec.literal.negated,
                 "node": rec.node, "weight": rec.weight}
        if carrier is not None:
            rec_d["observer"], rec_d["situation"] = carrier.labels_of(rec.node)
        return {
            "record": rec_d,
            "affected": list(self.affected.nodes),
            "visited": self.affected.visited,
            "components": [c.to_dict() for c in self.components],
            "resolution": self.resolution.to_dict() if self.resolution is not None else None,
            "joined": [c.to_dict() for c in self.joined],
            "joined_resolution": (None if self.joined_resolution is None
                                  else self.joined_resolution.to_dict()),
            "resweep": (None if self.resweep is None else
                        {"iterations": self.resweep.iterations, "deltas": self.resweep.deltas}),
        }

    def to_json(self, carrier=None) -> str:
        return json.dumps(self.to_dict(carrier), sort_keys=True)


@dataclass
class SatReport:
    satisfiable: bool
    witness: dict[str, bool] = field(default_factory=dict)
    conflict_atom: Optional[str] = None

    def to_dict(self) -> dict:
        return {"satisfiable": self.satisfiable,
                "witness": dict(sorted(self.witness.items())),
                "conflict_atom": self.conflict_atom}


CONSISTENCY_MODES = ("joined", "comparable")


def assert_belief(base: BeliefBase, literal: Literal, node: int, weight: float, *,
                  detect: bool = True, propagate_update: bool = True,
                  consistency: str = "joined", notify: Notify | None = None) -> UpdateReport:
    """Insert a belief and restore a consistent, correctly cached base.

    Contradiction detection is scoped to the inserted atom: only records that
    share it can gain a new edge. Comparable clashes are decomposed and
    resolved first. In ``"joined"`` mode (default) a second pass then resolves
    clashes between incomparable records, since their join inherits both and
    would otherwise support an atom in both polarities. ``"comparable"`` stops
    after the first pass. Literals that lose records get their cache rows
    rebuilt by one full sweep.

    ``detect=False`` skips detection and resolution; ``propagate_update=False``
    writes the cache at the insertion node only. Both exist for ablation runs
    and break the consistency guarantees.
    """
    if consistency not in CONSISTENCY_MODES:
        raise ValueError(f"consistency must be one of {CONSISTENCY_MODES}")
    record = base.insert_raw(literal, node, weight)
    if propagate_update:
        affected = propagate(base, record, notify)
    else:
        row = base.cache.writable_row(literal)
        hit = row[record.node] < record.weight
        if hit:
            row[record.node] = record.weight
        base.cache.drop_if_empty(literal)
        affected = AffectedSet((record.node,) if hit else (), 1, record)
    report = UpdateReport(record, affected)
    if not detect:
        return report
    removed: list[int] = []
    comps = mcc(base, atoms=[literal.atom])
    if comps:
        report.components = comps
        report.resolution = resolve(base, comps)
        removed += report.resolution.removed
    if consistency == "joined":
        joined = joined_conflicts(base, atoms=[literal.atom])
        if joined:
            report.joined = joined
            report.joined_resolution = resolve(base, joined, relation="joined")
            removed += report.joined_resolution.removed
    if removed:
        removed_lits = {base.record(r).literal for r in removed}
        if propagate_update:
            report.resweep = full_sweep(base, literals=removed_lits)
        else:
            _rebuild_exact(base, removed_lits)
    return report
    comps = mcc(base, atoms=[literal.atom])
    if comps:
        report.components = comps
        report.resolution = resolve(base, comps)
        removed_lits = {base.record(r).literal for r in report.resolution.removed}
        if propagate_update:
            report.resweep = full_sweep(base, literals=removed_lits)
        else:
            _rebuild_exact(base, removed_lits)
    return report


def _rebuild_exact(base: BeliefBase, literals) -> None:
    # no-propagation mode: each record only ever reaches its own node
    for lit in literals:
        row = np.zeros(base.carrier.n, dtype=np.float64)
        for r in base.literal_records(lit):
            if r.weight > row[r.node]:
                row[r.node] = r.weight
        base.cache.set_row(lit, row)


def query(base: BeliefBase, literal: Literal, observer: str, situation: str) -> float:
    """Credibility of ``literal`` at the node named by the two labels."""
    return base.cred(literal, base.carrier.node_of(observer, situation))


def check_soundness(base: BeliefBase, node: int) -> SatReport:
    """Satisfiability of the supported theory at ``node``.

    For literal theories a model exists iff no atom is supported in both
    polarities; the witness sets each supported atom to its supported polarity.
    Atoms outside the theory are implicitly false.
    """
    theory = base.supported_theory(node)
    witness: dict[str, bool] = {}
    conflict = None
    for lit in sorted(theory):
        want = not lit.negated
        if lit.atom in witness and witness[lit.atom] != want:
            conflict = lit.atom
            break
        witness[lit.atom] = want
    if conflict is not None:
        return SatReport(False, {}, conflict)
    return SatReport(True, witness, None)


def soundness_table(base: BeliefBase) -> np.ndarray:
    """Vectorised check at every node at once; True where the theory is satisfiable.

    Builds the polarity witness per node and evaluates every supported literal
    against it, so a True entry is backed by an evaluated model.
    """
    n = base.carrier.n
    rows = base.cache.rows
    ok = np.ones(n, dtype=np.bool_)
    for atom in sorted({lit.atom for lit in rows}):
        pos = rows.get(Literal(atom, False))
        neg = rows.get(Literal(atom, True))
        value = pos > 0 if pos is not None else np.zeros(n, dtype=np.bool_)
        # supported positive literals hold by construction of the witness
        if neg is not None:
            ok &= ~((neg > 0) & value)
    return ok
