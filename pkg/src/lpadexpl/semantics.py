"""Exact probability semantics by world enumeration and by event evaluation.

A *selection* picks one head for every probabilistic ground instance; its
*world* keeps the chosen heads (a ``none`` head contributes nothing) plus all
derived clauses, and its probability is the product of the chosen heads'
annotations.  Queries are checked in a world bottom-up, stratum by stratum —
deliberately independent of the resolution engine, so the two can be compared.

``success_prob`` offers both routes: ``oracle`` sums the probabilities of the
worlds satisfying the query; ``engine`` evaluates the disjunction of the
resolution tree's success-leaf expressions with ``event_prob``, which
enumerates head assignments only over the instances the expression mentions
(independence marginalizes out the rest).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .choice_algebra import (
    AtomicChoice,
    ChoiceExpr,
    assignments_over,
    disj,
    eval_expr,
    mentioned_instances,
)
from .errors import EnumerationLimitError
from .grounder import GroundProgram, ThetaKey
from .slpdnf import DEFAULT_DEPTH_LIMIT, Derivation, success_expressions
from .syntax import Atom, Clause, NONE_PREDICATE, Query

DEFAULT_SELECTION_LIMIT = 1_000_000
DEFAULT_ASSIGNMENT_LIMIT = 1_000_000
TOTAL_PROB_LIMIT = 50_000_000

#: A selection as a value: one atomic choice per instance.
Selection = frozenset[AtomicChoice]


def enumerate_selections(
    g: GroundProgram, limit: int = DEFAULT_SELECTION_LIMIT
):
    """Yield every selection (instance order, ascending head index)."""
    count = g.selection_count()
    if count > limit:
        raise EnumerationLimitError(
            f"{count} selections exceed the enumeration limit {limit}"
        )
    for indices in _index_tuples(g):
        yield frozenset(
            AtomicChoice(inst.cid, inst.key, i)
            for inst, i in zip(g.instances, indices)
        )


def _index_tuples(g: GroundProgram):
    return itertools.product(*(range(1, inst.n_heads + 1) for inst in g.instances))


@dataclass(slots=True)
class World:
    """A ground normal program induced by one selection."""

    clauses: tuple[Clause, ...]
    selection: Selection
    strata: dict[tuple[str, int], int]
    _model: set[Atom] | None = None

    def model(self) -> set[Atom]:
        if self._model is None:
            self._model = _least_model(self.clauses, self.strata)
        return self._model


def world_of(selection: Selection, g: GroundProgram) -> World:
    chosen: dict[tuple[str, ThetaKey], int] = {}
    for ac in selection:
        chosen[(ac.cid, ac.key)] = ac.index
    clauses: list[Clause] = []
    for inst in g.instances:
        index = chosen.get((inst.cid, inst.key))
        if index is None:
            raise EnumerationLimitError(
                f"selection does not cover instance {inst.cid} {inst.values_str()}"
            )
        head = inst.head_atom(index)
        if head.predicate != NONE_PREDICATE:
            clauses.append(Clause(head, inst.body))
    clauses.extend(g.derived)
    return World(tuple(clauses), selection, g.strata)


def world_prob(selection: Selection, g: GroundProgram) -> float:
    p = 1.0
    for ac in selection:
        p *= g.instance(ac.cid, ac.key).prob(ac.index)
    return p


def _least_model(clauses: tuple[Clause, ...], strata: dict[tuple[str, int], int]) -> set[Atom]:
    """Bottom-up evaluation, one stratum at a time.

    Within a stratum, positive dependencies iterate to a fixpoint; negative
    body literals always refer to strictly lower strata, already final.
    """
    true: set[Atom] = set()
    by_stratum: dict[int, list[Clause]] = {}
    for c in clauses:
        by_stratum.setdefault(strata.get(c.head.pred, 0), []).append(c)
    for level in sorted(by_stratum):
        changed = True
        while changed:
            changed = False
            for c in by_stratum[level]:
                if c.head in true:
                    continue
                if all(
                    (lit.atom in true) == lit.positive for lit in c.body
                ):
                    true.add(c.head)
                    changed = True
    return true


def model_check(w: World, q: Query) -> bool:
    """Truth of a ground query in a world (independent of the engine)."""
    model = w.model()
    return all((lit.atom in model) == lit.positive for lit in q)


# ---------------------------------------------------------------------------
# Probabilities
# ---------------------------------------------------------------------------


def event_prob(
    e: ChoiceExpr, g: GroundProgram, limit: int = DEFAULT_ASSIGNMENT_LIMIT
) -> float:
    """The probability mass of the worlds satisfying an expression.

    Enumerates head assignments of the mentioned instances only; terms are
    summed compensated, so ⊤ gives exactly 1.0 and ⊥ exactly 0.0.
    """
    keys = mentioned_instances(e)
    insts = sorted(
        (g.instance(cid, key) for cid, key in keys), key=lambda i: (i.cid, i.key)
    )
    count = math.prod(inst.n_heads for inst in insts)
    if count > limit:
        raise EnumerationLimitError(
            f"{count} head assignments exceed the enumeration limit {limit}"
        )
    terms: list[float] = []
    for assignment in assignments_over(insts):
        if eval_expr(e, assignment):
            p = 1.0
            for inst in insts:
                p *= inst.prob(assignment[(inst.cid, inst.key)])
            terms.append(p)
    return math.fsum(terms)


def derivation_prob(
    d: Derivation, g: GroundProgram, limit: int = DEFAULT_ASSIGNMENT_LIMIT
) -> float:
    """The probability of one proof: the mass of its leaf expression."""
    return event_prob(d.expr, g, limit)


def success_prob(
    q: Query,
    g: GroundProgram,
    method: str = "engine",
    limit: int | None = None,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
) -> float:
    """The probability that a ground query holds.

    ``engine`` (default) evaluates the disjunction of the resolution tree's
    success-leaf expressions; ``oracle`` enumerates every selection and sums
    the satisfying worlds' probabilities.  The two agree to within 1e-9.
    """
    if method == "engine":
        exprs = success_expressions(q, g, depth_limit)
        if not exprs:
            return 0.0
        return event_prob(disj(exprs), g, limit or DEFAULT_ASSIGNMENT_LIMIT)
    if method == "oracle":
        terms: list[float] = []
        cap = limit or DEFAULT_SELECTION_LIMIT
        count = g.selection_count()
        if count > cap:
            raise EnumerationLimitError(
                f"{count} selections exceed the enumeration limit {cap}"
            )
        for indices in _index_tuples(g):
            selection = frozenset(
                AtomicChoice(inst.cid, inst.key, i)
                for inst, i in zip(g.instances, indices)
            )
            w = world_of(selection, g)
            if model_check(w, q):
                p = 1.0
                for inst, i in zip(g.instances, indices):
                    p *= inst.prob(i)
                terms.append(p)
        return math.fsum(terms)
    raise ValueError(f"unknown method {method!r} (expected 'engine' or 'oracle')")


def total_world_prob(g: GroundProgram) -> float:
    """The summed probability of every selection — 1.0 up to rounding.

    Materializes the full product distribution as a flat array (meaningful
    check: every world's probability is computed and summed, rather than
    relying on per-instance normalization), so it is capped by array size.
    """
    count = g.selection_count()
    if count > TOTAL_PROB_LIMIT:
        raise EnumerationLimitError(
            f"{count} selections exceed the materialization limit {TOTAL_PROB_LIMIT}"
        )
    acc = np.ones(1, dtype=np.float64)
    for inst in g.instances:
        acc = np.multiply.outer(acc, np.array(inst.probs, dtype=np.float64)).ravel()
    return float(np.sum(acc))


def worlds_table(
    g: GroundProgram,
    queries: list[Query] | None = None,
    limit: int = 10_000,
):
    """Rows of (selection, probability, query truth values), in selection

    order, for the CLI's world listing."""
    queries = queries or []
    count = g.selection_count()
    if count > limit:
        raise EnumerationLimitError(f"{count} worlds exceed the limit {limit}")
    for indices in _index_tuples(g):
        selection = frozenset(
            AtomicChoice(inst.cid, inst.key, i)
            for inst, i in zip(g.instances, indices)
        )
        p = 1.0
        for inst, i in zip(g.instances, indices):
            p *= inst.prob(i)
        w = world_of(selection, g)
        truths = [model_check(w, q) for q in queries]
        yield selection, p, truths
