"""Well-formedness and permutation-based normalization.

A positional production is well-formed when every entering interface of its
lhs is related (through the closure of the shares relation) to some
interface of the leftmost element. Normalization searches rhs orderings:
first one ordering per production (simple permutations), then extra copies
(duplicated permutations) by iterative deepening on the number of copies.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .errors import BudgetError, NormalizationError, TranslationError
from .grammar import Hrg, Production
from .positional import (
    InterfaceClasses,
    PositionalGrammar,
    PositionalProduction,
    translate_grammar,
    translate_production,
)

MAX_RHS_EDGES = 8
DEFAULT_SEARCH_BUDGET = 20_000


def search_budget() -> int:
    return int(os.environ.get("HRG2PG_SEARCH_BUDGET", DEFAULT_SEARCH_BUDGET))


@dataclass(frozen=True)
class WellFormedness:
    ok: bool
    failing: tuple[int, ...] = ()
    diagnostic: str = ""

    def __bool__(self):
        return self.ok


def is_well_formed(pp: PositionalProduction, entering: Iterable[int]) -> WellFormedness:
    entering = sorted(set(entering))
    arity = len(pp.external_map)
    for i in entering:
        if not 1 <= i <= arity:
            raise ValueError(f"entering interface {i} outside 1..{arity} of {pp.lhs}")
    uf = InterfaceClasses.of(pp)
    leftmost = {uf.find((0, k)) for k in range(1, pp.elements[0].arity + 1)}
    failing = tuple(i for i in entering if uf.find(pp.external_map[i - 1]) not in leftmost)
    if not failing:
        return WellFormedness(True)
    label = pp.elements[0].label
    diagnostic = "; ".join(f"entering interface {i} not tied to leftmost symbol {label}"
                           for i in failing)
    return WellFormedness(False, failing, diagnostic)


def rhs_orderings(n: int) -> Iterator[tuple[int, ...]]:
    """All orderings of ``n`` rhs edges, 1-based, in lexicographic order."""
    return itertools.permutations(range(1, n + 1))


def simple_permute(p: Production, perm: Sequence[int], name: Optional[str] = None) -> Production:
    """``p`` with rhs edges listed as ``perm`` (1-based positions of the old order)."""
    perm = tuple(perm)
    if sorted(perm) != list(range(1, len(p.rhs.edges) + 1)):
        raise ValueError(f"{perm} is not a bijection on {len(p.rhs.edges)} rhs edges")
    return Production(name or p.name, p.lhs, p.rhs.reordered(i - 1 for i in perm))


@dataclass
class PermutationPlan:
    """Chosen rhs orderings per production; more than one means duplicated copies."""

    orderings: dict[str, tuple[tuple[int, ...], ...]] = field(default_factory=dict)

    @property
    def cost(self) -> int:
        return sum(len(o) - 1 for o in self.orderings.values())

    def kind(self, name: str) -> str:
        chosen = self.orderings[name]
        if len(chosen) > 1:
            return "duplicated"
        return "identity" if chosen[0] == tuple(range(1, len(chosen[0]) + 1)) else "simple"

    def apply(self, g: Hrg) -> Hrg:
        productions = []
        for p in g.productions:
            for n, perm in enumerate(self.orderings.get(p.name, (tuple(range(1, len(p.rhs.edges) + 1)),))):
                productions.append(simple_permute(p, perm, p.name if n == 0 else f"{p.name}#{n + 1}"))
        return g.replace_productions(productions)

    def format(self) -> str:
        lines = []
        for name, chosen in self.orderings.items():
            perms = " ".join("(" + ",".join(map(str, o)) + ")" for o in chosen)
            lines.append(f"{name}: {self.kind(name)} {perms}")
        lines.append(f"cost: {self.cost}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "cost": self.cost,
            "productions": [{"name": name, "kind": self.kind(name), "orderings": [list(o) for o in chosen]}
                            for name, chosen in self.orderings.items()],
        }


@dataclass
class NormalizationResult:
    grammar: Hrg
    positional: PositionalGrammar
    plan: PermutationPlan
    table: object = None  # ParseTable when the table-aware search ran
    tables_built: int = 0


def candidate_orderings(p: Production, g: Hrg) -> tuple[list[tuple[int, ...]], str]:
    """Chain-connected, well-formed orderings of ``p`` plus a diagnostic if none exist."""
    n = len(p.rhs.edges)
    if n > MAX_RHS_EDGES:
        raise BudgetError(f"{p.name}: {n} rhs edges exceeds the exhaustive-search limit "
                          f"of {MAX_RHS_EDGES}")
    good, reasons = [], []
    for perm in rhs_orderings(n):
        try:
            pp = translate_production(simple_permute(p, perm), g.labels)
        except TranslationError as exc:
            reasons.append(str(exc))
            continue
        wf = is_well_formed(pp, g.entering[p.lhs])
        if wf.ok:
            good.append(perm)
        else:
            reasons.append(wf.diagnostic)
    why = "" if good else f"{p.name}: no well-formed ordering ({reasons[0] if reasons else 'empty rhs'})"
    return good, why


def _plans_with_copies(candidates: list[list[tuple]], extra: int):
    """Assignments of ordering sets with exactly ``extra`` copies in total."""

    def rec(i: int, left: int):
        if i == len(candidates):
            if left == 0:
                yield ()
            return
        for e in range(0, min(left, len(candidates[i]) - 1) + 1):
            for combo in itertools.combinations(candidates[i], e + 1):
                for rest in rec(i + 1, left - e):
                    yield (combo,) + rest

    return rec(0, extra)


def normalize(g: Hrg, max_duplicates: int = 0, wf_only: bool = False,
              budget: Optional[int] = None) -> NormalizationResult:
    """Find a minimal-cost permutation plan making ``g`` well-formed.

    Without ``wf_only`` the plan must also yield a conflict-free pLR table.
    Plans are tried in lexicographic order of orderings, cheapest first.
    """
    from .plr import build_table

    limit = search_budget() if budget is None else budget
    names = [p.name for p in g.productions]
    candidates, unfixable = [], []
    for p in g.productions:
        good, why = candidate_orderings(p, g)
        candidates.append(good)
        if why:
            unfixable.append(why)
    if unfixable:
        raise NormalizationError("no well-formed ordering for some productions",
                                 {"unfixable": unfixable})

    def plan_for(assignment) -> PermutationPlan:
        return PermutationPlan(dict(zip(names, assignment)))

    if wf_only:
        plan = plan_for([(c[0],) for c in candidates])
        normalized = plan.apply(g)
        return NormalizationResult(normalized, translate_grammar(normalized), plan)

    built = 0
    best = None
    for extra in range(0, max_duplicates + 1):
        if extra == 0:
            assignments = (tuple((o,) for o in combo) for combo in itertools.product(*candidates))
        else:
            assignments = _plans_with_copies(candidates, extra)
        for assignment in assignments:
            built += 1
            if built > limit:
                raise BudgetError(f"normalization budget of {limit} tables exhausted")
            plan = plan_for(assignment)
            normalized = plan.apply(g)
            pg = translate_grammar(normalized)
            table = build_table(pg)
            if not table.conflicts:
                return NormalizationResult(normalized, pg, plan, table, built)
            if best is None or len(table.conflicts) < len(best[1].conflicts):
                best = (plan, table)
    diagnostic = {"conflicts": [str(c) for c in best[1].conflicts], "best_plan": best[0].to_json()} \
        if best else {}
    raise NormalizationError(f"no conflict-free plan with at most {max_duplicates} duplicated "
                             f"copies", diagnostic)
