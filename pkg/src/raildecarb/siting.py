"""Minimum-cardinality facility siting so selected paths are traversable.

A path is covered when a locomotive of the given range can run it end to
end: some open facility within half the range of the origin, one within
half the range of the destination, and consecutive open facilities along
the path at most one range apart.

The solver encodes that predicate as covering clauses. Augment each path
with virtual anchors half a range before the origin and after the
destination; the predicate holds iff every consecutive gap in the
augmented open set is at most the range. That is equivalent to the finite
clause system

* origin window: at least one candidate within range/2 of the origin, and
* one window per on-path candidate whose position leaves the virtual end
  out of reach: at least one candidate strictly beyond it and within one
  range of it,

plus the (implied, but kept for the greedy heuristic) destination window.
An empty window is an unbridgeable gap: the path is infeasible at this
range no matter which facilities open.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .routing import Path
from .validation import ValidationError, check_positive

DEFAULT_EXHAUSTIVE_LIMIT = 24


class SitingInfeasibleError(ValidationError):
    """Some path cannot be covered at the given range."""

    def __init__(self, details: list[str]):
        self.details = details
        super().__init__("; ".join(details))


@dataclass(frozen=True)
class SitingInstance:
    paths: tuple[Path, ...]
    candidates: frozenset[str]
    range_miles: float

    def __init__(self, paths, candidates, range_miles):
        object.__setattr__(self, "paths", tuple(paths))
        object.__setattr__(self, "candidates", frozenset(candidates))
        object.__setattr__(self, "range_miles", check_positive("range_miles", range_miles))
        for p in self.paths:
            for endpoint in (p.nodes[0], p.nodes[-1]):
                if endpoint not in self.candidates:
                    raise ValidationError(
                        f"path endpoint {endpoint!r} is not a candidate node"
                    )


@dataclass
class FacilitySet:
    facilities: list[str]
    path_feasible: list[bool]
    infeasible_details: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "facilities": list(self.facilities),
            "infeasible_paths": list(self.infeasible_details),
        }


def coverage_predicate(path: Path, open_ids: set[str], range_miles: float) -> bool:
    """True iff the open facilities make the path traversable at this range."""
    half = range_miles / 2.0
    positions = [m for n, m in zip(path.nodes, path.cum_miles) if n in open_ids]
    augmented = [-half] + positions + [path.total_miles + half]
    return all(b - a <= range_miles for a, b in zip(augmented, augmented[1:]))


def path_clauses(
    path: Path, candidates: frozenset[str], range_miles: float
) -> tuple[list[frozenset[str]], str | None]:
    """Covering clauses for one path, or the reason it is infeasible."""
    half = range_miles / 2.0
    total = path.total_miles
    on_path = [(n, m) for n, m in zip(path.nodes, path.cum_miles) if n in candidates]

    clauses: list[frozenset[str]] = []
    origin = frozenset(n for n, m in on_path if m <= half)
    if not origin:
        return [], (
            f"path {path.nodes[0]}->{path.nodes[-1]}: no candidate within "
            f"{half:g} mi of the origin"
        )
    clauses.append(origin)

    destination = frozenset(n for n, m in on_path if total - m <= half)
    if not destination:
        return [], (
            f"path {path.nodes[0]}->{path.nodes[-1]}: no candidate within "
            f"{half:g} mi of the destination"
        )
    clauses.append(destination)

    for anchor, pos in on_path:
        if pos + range_miles >= total + half:
            continue
        window = frozenset(n for n, m in on_path if pos < m <= pos + range_miles)
        if not window:
            nxt = min((m for _, m in on_path if m > pos), default=total)
            return [], (
                f"path {path.nodes[0]}->{path.nodes[-1]}: candidate gap after "
                f"{anchor} ({nxt - pos:g} mi) exceeds range {range_miles:g}"
            )
        clauses.append(window)
    return clauses, None


def _build_clauses(
    inst: SitingInstance,
) -> tuple[list[frozenset[str]], list[int], list[str], list[list[int]]]:
    """All clauses, infeasible path indexes and reasons, clause ids per path."""
    clauses: list[frozenset[str]] = []
    infeasible: list[int] = []
    reasons: list[str] = []
    per_path: list[list[int]] = []
    for i, path in enumerate(inst.paths):
        cl, reason = path_clauses(path, inst.candidates, inst.range_miles)
        if reason is not None:
            infeasible.append(i)
            reasons.append(reason)
            per_path.append([])
            continue
        ids = []
        for c in cl:
            ids.append(len(clauses))
            clauses.append(c)
        per_path.append(ids)
    return clauses, infeasible, reasons, per_path


def _covers(mask_by_candidate: dict[str, int], chosen: tuple[str, ...], full: int) -> bool:
    got = 0
    for c in chosen:
        got |= mask_by_candidate[c]
        if got == full:
            return True
    return got == full


def _clause_masks(
    clauses: list[frozenset[str]], universe: list[str]
) -> tuple[dict[str, int], int]:
    mask: dict[str, int] = {c: 0 for c in universe}
    for bit, clause in enumerate(clauses):
        for c in clause:
            mask[c] |= 1 << bit
    return mask, (1 << len(clauses)) - 1


def _solve_enumeration(
    universe: list[str], mask: dict[str, int], full: int
) -> list[str]:
    """First (lexicographically smallest) cover of minimum cardinality."""
    if full == 0:
        return []
    for k in range(1, len(universe) + 1):
        for combo in itertools.combinations(universe, k):
            if _covers(mask, combo, full):
                return list(combo)
    raise AssertionError("instance with nonempty clauses must have a cover")


def _greedy_cover(universe: list[str], mask: dict[str, int], full: int) -> list[str]:
    chosen: list[str] = []
    covered = 0
    while covered != full:
        best, best_gain = None, -1
        for c in universe:
            gain = bin(mask[c] & ~covered).count("1")
            if gain > best_gain:
                best, best_gain = c, gain
        if best_gain == 0:
            raise AssertionError("uncoverable clause slipped past feasibility check")
        chosen.append(best)
        covered |= mask[best]
    return chosen


def _exists_cover(
    universe: list[str], mask: dict[str, int], need: int, budget: int
) -> bool:
    """Branch-and-bound feasibility: cover `need` with at most `budget` picks."""
    if need == 0:
        return True
    if budget <= 0:
        return False
    # Branch on a clause (lowest set bit of `need`) over candidates that hit it.
    bit = need & -need
    options = [c for c in universe if mask[c] & bit]
    if not options:
        return False
    # Order by marginal coverage so promising branches come first.
    options.sort(key=lambda c: -bin(mask[c] & need).count("1"))
    for c in options:
        if _exists_cover([u for u in universe if u != c], mask, need & ~mask[c], budget - 1):
            return True
    return False


def _solve_branch_and_bound(
    universe: list[str], mask: dict[str, int], full: int
) -> list[str]:
    if full == 0:
        return []
    upper = len(_greedy_cover(universe, mask, full))
    optimum = upper
    for budget in range(upper - 1, 0, -1):
        if _exists_cover(universe, mask, full, budget):
            optimum = budget
        else:
            break
    # Lexicographically smallest cover of optimum size, by prefix extension.
    chosen: list[str] = []
    covered = 0
    remaining = list(universe)
    while covered != full:
        for idx, c in enumerate(remaining):
            take_mask = covered | mask[c]
            tail = remaining[idx + 1:]
            if _exists_cover(tail, mask, full & ~take_mask, optimum - len(chosen) - 1):
                chosen.append(c)
                covered = take_mask
                remaining = tail
                break
            if take_mask == full and len(chosen) + 1 <= optimum:
                chosen.append(c)
                covered = take_mask
                remaining = tail
                break
        else:
            raise AssertionError("optimum-size cover must extend")
    return chosen


def _prepare(
    inst: SitingInstance, on_infeasible: str
) -> tuple[list[frozenset[str]], list[bool], list[str]]:
    if on_infeasible not in ("raise", "drop"):
        raise ValidationError(f"on_infeasible must be 'raise' or 'drop', got {on_infeasible!r}")
    clauses, infeasible, reasons, _ = _build_clauses(inst)
    if infeasible and on_infeasible == "raise":
        raise SitingInfeasibleError(reasons)
    feasible_flags = [i not in infeasible for i in range(len(inst.paths))]
    return clauses, feasible_flags, reasons


def _resolve_preopened(inst: SitingInstance, already_open) -> frozenset[str]:
    opened = frozenset(already_open or ())
    stray = opened - inst.candidates
    if stray:
        raise ValidationError(f"already_open contains non-candidates: {sorted(stray)}")
    return opened


def solve_exact(
    inst: SitingInstance,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    on_infeasible: str = "raise",
    already_open: frozenset[str] | set[str] | None = None,
) -> FacilitySet:
    """Minimum-cardinality facility set covering every (coverable) path.

    Ties break to the lexicographically smallest sorted id list. Instances
    whose useful candidate count is at most ``exhaustive_limit`` are solved
    by cardinality-ordered enumeration; larger ones by branch and bound
    with a lexicographic reconstruction pass.

    ``already_open`` facilities stay open (roll-out growth): the solver
    minimizes the additional openings and returns the combined set.
    """
    clauses, flags, reasons = _prepare(inst, on_infeasible)
    opened = _resolve_preopened(inst, already_open)
    clauses = [c for c in clauses if not (c & opened)]
    universe = sorted({c for clause in clauses for c in clause} - opened)
    mask, full = _clause_masks(clauses, universe)
    if len(universe) <= exhaustive_limit:
        chosen = _solve_enumeration(universe, mask, full)
    else:
        chosen = _solve_branch_and_bound(universe, mask, full)
    return FacilitySet(sorted(opened | set(chosen)), flags, reasons)


def solve_greedy(
    inst: SitingInstance,
    on_infeasible: str = "raise",
    already_open: frozenset[str] | set[str] | None = None,
) -> FacilitySet:
    """Feasible facility set: repeatedly open the candidate repairing the most
    violated clauses (ties: smallest id)."""
    clauses, flags, reasons = _prepare(inst, on_infeasible)
    opened = _resolve_preopened(inst, already_open)
    clauses = [c for c in clauses if not (c & opened)]
    universe = sorted({c for clause in clauses for c in clause} - opened)
    mask, full = _clause_masks(clauses, universe)
    chosen = _greedy_cover(universe, mask, full)
    return FacilitySet(sorted(opened | set(chosen)), flags, reasons)
