"""The algebra of choice expressions.

An *atomic choice* ``(c, θ, i)`` says: the ground instance of probabilistic
clause ``c`` under θ takes its ``i``-th head (1-based; the implicit ``none``
head counts).  A *composite choice* is a consistent set of atomic choices; a
*selection* picks a head for every instance; the worlds of a composite choice
are those of the selections extending it.

Choice expressions close atomic choices under ¬, ∧, ∨ (with ⊥ and ⊤).  The
meaning ``gamma(C)`` is a set of composite choices whose worlds are the
worlds satisfying ``C``; negation goes through ``duals`` (minimal hitting
sets of the complemented composite choices).  Up to world equivalence the
expressions form a Boolean algebra, which is what makes the rewrite rules in
``simplify``/``dnf`` sound.

Everything here is deterministic: ∧/∨ keep their children as canonically
sorted, duplicate-free tuples (so associativity, commutativity, and
idempotence hold structurally), and set-valued results are produced in a
canonical order.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .errors import EnumerationLimitError, LpadError
from .grounder import GroundProbClause, GroundProgram, ThetaKey
from .syntax import NONE_PREDICATE

EQUIV_INSTANCE_LIMIT = 20

#: Fallback iteration bound multiplier for simplify (rule applications can
#: only shrink the expression, so the bound is never hit in practice).
SIMPLIFY_ROUNDS_PER_NODE = 10


class ChoiceExpr:
    """Base class for choice expressions; leaves are atomic choices."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class _Bottom(ChoiceExpr):
    def __str__(self) -> str:
        return "bot"


@dataclass(frozen=True, slots=True)
class _Top(ChoiceExpr):
    def __str__(self) -> str:
        return "top"


BOT = _Bottom()
TOP = _Top()


def _natural(text: str) -> tuple:
    """Sort key treating digit runs numerically, so c2 < c10."""
    return tuple(
        int(part) if part.isdigit() else part
        for part in re.split(r"(\d+)", text)
        if part
    )


@dataclass(frozen=True, slots=True)
class AtomicChoice(ChoiceExpr):
    cid: str
    key: ThetaKey
    index: int

    def sort_key(self) -> tuple:
        return (_natural(self.cid), self.key, self.index)

    def __str__(self) -> str:
        theta = ",".join(f"{v}/{c}" for v, c in self.key)
        return f"({self.cid},{{{theta}}},{self.index})"


@dataclass(frozen=True, slots=True)
class Not(ChoiceExpr):
    child: ChoiceExpr

    def __str__(self) -> str:
        return f"~{self.child}"


@dataclass(frozen=True, slots=True)
class And(ChoiceExpr):
    children: tuple[ChoiceExpr, ...]

    def __str__(self) -> str:
        return " & ".join(
            f"({c})" if isinstance(c, Or) else str(c) for c in self.children
        )


@dataclass(frozen=True, slots=True)
class Or(ChoiceExpr):
    children: tuple[ChoiceExpr, ...]

    def __str__(self) -> str:
        return " | ".join(str(c) for c in self.children)


#: A composite choice.
CompositeChoice = frozenset[AtomicChoice]


# ---------------------------------------------------------------------------
# Canonical ordering and constructors
# ---------------------------------------------------------------------------

_KIND_RANK = {_Bottom: 0, _Top: 1, AtomicChoice: 2, Not: 3, And: 4, Or: 5}


def expr_key(e: ChoiceExpr) -> tuple:
    """Canonical total order: units, then literals by (clause id, θ, head

    index, sign), then compound nodes by kind and structure."""
    if isinstance(e, AtomicChoice):
        return (1, e.sort_key(), 0, ())
    if isinstance(e, Not) and isinstance(e.child, AtomicChoice):
        return (1, e.child.sort_key(), 1, ())
    if isinstance(e, (_Bottom, _Top)):
        return (0, _UNIT_RANK[type(e)], 0, ())
    if isinstance(e, Not):
        return (2, _KIND_RANK[Not], 0, (expr_key(e.child),))
    return (2, _KIND_RANK[type(e)], 0, tuple(expr_key(c) for c in e.children))


_UNIT_RANK = {_Bottom: 0, _Top: 1}


def conj(children) -> ChoiceExpr:
    """∧ with flattening, canonical order, and structural idempotence."""
    flat: list[ChoiceExpr] = []
    for c in children:
        if isinstance(c, And):
            flat.extend(c.children)
        else:
            flat.append(c)
    unique = sorted(set(flat), key=expr_key)
    if not unique:
        return TOP
    if len(unique) == 1:
        return unique[0]
    return And(tuple(unique))


def disj(children) -> ChoiceExpr:
    """∨ with flattening, canonical order, and structural idempotence."""
    flat: list[ChoiceExpr] = []
    for c in children:
        if isinstance(c, Or):
            flat.extend(c.children)
        else:
            flat.append(c)
    unique = sorted(set(flat), key=expr_key)
    if not unique:
        return BOT
    if len(unique) == 1:
        return unique[0]
    return Or(tuple(unique))


def neg(c: ChoiceExpr) -> ChoiceExpr:
    return Not(c)


def node_count(e: ChoiceExpr) -> int:
    if isinstance(e, Not):
        return 1 + node_count(e.child)
    if isinstance(e, (And, Or)):
        return 1 + sum(node_count(c) for c in e.children)
    return 1


def mentioned_instances(e: ChoiceExpr) -> set[tuple[str, ThetaKey]]:
    """The ground instances whose choices the expression mentions."""
    out: set[tuple[str, ThetaKey]] = set()

    def walk(x: ChoiceExpr) -> None:
        if isinstance(x, AtomicChoice):
            out.add((x.cid, x.key))
        elif isinstance(x, Not):
            walk(x.child)
        elif isinstance(x, (And, Or)):
            for c in x.children:
                walk(c)

    walk(e)
    return out


# ---------------------------------------------------------------------------
# Sets of composite choices: complement, consistency, hits, mins, otimes
# ---------------------------------------------------------------------------


def complement_atomic(ac: AtomicChoice, g: GroundProgram) -> CompositeChoice:
    """All sibling choices of the same instance: {(c,θ,j) | j ≠ i}."""
    inst = g.instance(ac.cid, ac.key)
    if not 1 <= ac.index <= inst.n_heads:
        raise LpadError(
            f"atomic choice index {ac.index} out of range for {ac.cid} "
            f"(instance has {inst.n_heads} heads)"
        )
    return frozenset(
        AtomicChoice(ac.cid, ac.key, j)
        for j in range(1, inst.n_heads + 1)
        if j != ac.index
    )


def is_consistent(kappa) -> bool:
    """No two atomic choices pick different heads of the same instance."""
    chosen: dict[tuple[str, ThetaKey], int] = {}
    for ac in kappa:
        prev = chosen.setdefault((ac.cid, ac.key), ac.index)
        if prev != ac.index:
            return False
    return True


def composite_key(kappa: CompositeChoice) -> tuple:
    return tuple(sorted(ac.sort_key() for ac in kappa))


def sort_composites(ks) -> list[CompositeChoice]:
    return sorted(ks, key=composite_key)


def hits(sets) -> list[CompositeChoice]:
    """Every way of picking one element from each of the given sets.

    Returns one set per pick tuple, in deterministic order, duplicates
    preserved (picks from overlapping inputs can collapse to the same set).
    ``hits([])`` is ``[∅]``: the empty pick.
    """
    ordered = [sorted(s, key=lambda ac: ac.sort_key()) for s in sets]
    return [frozenset(pick) for pick in itertools.product(*ordered)]


def mins_set(ks) -> frozenset[CompositeChoice]:
    """The consistent, subset-minimal elements of a collection of sets."""
    consistent = sorted({k for k in ks if is_consistent(k)}, key=len)
    minimal: list[CompositeChoice] = []
    for k in consistent:
        if not any(m < k for m in minimal):
            minimal.append(k)
    return frozenset(minimal)


def otimes(k1, k2) -> frozenset[CompositeChoice]:
    """Pairwise unions, reduced to their consistent minimal elements."""
    return mins_set(a | b for a in k1 for b in k2)


def duals(ks, g: GroundProgram) -> frozenset[CompositeChoice]:
    """The minimal composite choices covering exactly the selections *not*

    covered by ``ks``: minimal hitting sets of the elementwise complements.
    """
    complements = [
        frozenset().union(*(complement_atomic(ac, g) for ac in k)) if k else frozenset()
        for k in ks
    ]
    return mins_set(hits(complements))


# ---------------------------------------------------------------------------
# Meaning: gamma
# ---------------------------------------------------------------------------


def gamma(e: ChoiceExpr, g: GroundProgram) -> frozenset[CompositeChoice]:
    """The set of composite choices denoted by an expression."""
    if isinstance(e, _Bottom):
        return frozenset()
    if isinstance(e, _Top):
        return frozenset([frozenset()])
    if isinstance(e, AtomicChoice):
        return frozenset([frozenset([e])])
    if isinstance(e, Not):
        return duals(gamma(e.child, g), g)
    if isinstance(e, And):
        result = frozenset([frozenset()])
        for c in e.children:
            result = mins_set(otimes(result, gamma(c, g)))
        return result
    if isinstance(e, Or):
        units: set[CompositeChoice] = set()
        for c in e.children:
            units |= gamma(c, g)
        return mins_set(units)
    raise TypeError(f"not a choice expression: {e!r}")


# ---------------------------------------------------------------------------
# Rewriting: simplify and dnf
# ---------------------------------------------------------------------------


def _same_instance(a: AtomicChoice, b: AtomicChoice) -> bool:
    return a.cid == b.cid and a.key == b.key


def _conjunct_parts(e: ChoiceExpr) -> frozenset[ChoiceExpr]:
    return frozenset(e.children) if isinstance(e, And) else frozenset([e])


def _simplify_once(e: ChoiceExpr) -> ChoiceExpr:
    if isinstance(e, Not):
        return Not(_simplify_once(e.child))
    if isinstance(e, And):
        children = [_simplify_once(c) for c in e.children]
        merged = conj(children)
        if not isinstance(merged, And):
            return merged
        kids = list(merged.children)
        if any(isinstance(c, _Bottom) for c in kids):
            return BOT
        kids = [c for c in kids if not isinstance(c, _Top)]
        kid_set = set(kids)
        # Contradictory or complementary siblings.
        choices = [c for c in kids if isinstance(c, AtomicChoice)]
        for a, b in itertools.combinations(choices, 2):
            if _same_instance(a, b) and a.index != b.index:
                return BOT
        for c in kids:
            if Not(c) in kid_set:
                return BOT
        # A positive choice subsumes a negated sibling of the same instance.
        drop: set[ChoiceExpr] = set()
        for c in kids:
            if isinstance(c, Not) and isinstance(c.child, AtomicChoice):
                if any(
                    _same_instance(a, c.child) and a.index != c.child.index
                    for a in choices
                ):
                    drop.add(c)
        kids = [c for c in kids if c not in drop]
        return conj(kids)
    if isinstance(e, Or):
        children = [_simplify_once(c) for c in e.children]
        merged = disj(children)
        if not isinstance(merged, Or):
            return merged
        kids = list(merged.children)
        if any(isinstance(c, _Top) for c in kids):
            return TOP
        kids = [c for c in kids if not isinstance(c, _Bottom)]
        # Absorption: drop any disjunct whose conjunct set contains another's
        # (children are already deduplicated, so containment is strict).
        parts = [_conjunct_parts(c) for c in kids]
        keep = [
            c
            for i, c in enumerate(kids)
            if not any(parts[j] < parts[i] for j in range(len(kids)))
        ]
        return disj(keep)
    return e


def simplify(e: ChoiceExpr, g: GroundProgram | None = None) -> ChoiceExpr:
    """Fixpoint of the world-preserving shrink rules.

    Unit laws (C∧⊤→C, C∧⊥→⊥, C∨⊤→⊤, C∨⊥→C), contradictory sibling choices
    (α∧α'→⊥ for different heads of one instance), complement collapse
    (C∧¬C→⊥), redundant negated siblings (α∧¬α'→α), absorption
    (C∨(C∧D)→C), and idempotence (structural).  Never grows the expression.
    """
    bound = max(4, SIMPLIFY_ROUNDS_PER_NODE * node_count(e))
    cur = e
    for _ in range(bound):
        nxt = _simplify_once(cur)
        if nxt == cur:
            return cur
        cur = nxt
    return cur


def _nnf(e: ChoiceExpr) -> ChoiceExpr:
    """Negation-normal form: ¬ pushed to the leaves, units resolved."""
    if isinstance(e, Not):
        c = e.child
        if isinstance(c, Not):
            return _nnf(c.child)
        if isinstance(c, _Top):
            return BOT
        if isinstance(c, _Bottom):
            return TOP
        if isinstance(c, And):
            return disj(_nnf(Not(x)) for x in c.children)
        if isinstance(c, Or):
            return conj(_nnf(Not(x)) for x in c.children)
        return e
    if isinstance(e, And):
        return conj(_nnf(c) for c in e.children)
    if isinstance(e, Or):
        return disj(_nnf(c) for c in e.children)
    return e


class _Conjunct:
    """A consistent set of ±atomic-choice literals under construction."""

    __slots__ = ("chosen", "banned")

    def __init__(self):
        self.chosen: dict[tuple[str, ThetaKey], int] = {}
        self.banned: set[tuple[str, ThetaKey, int]] = set()

    def clone(self) -> "_Conjunct":
        c = _Conjunct()
        c.chosen = dict(self.chosen)
        c.banned = set(self.banned)
        return c

    def add_positive(self, ac: AtomicChoice) -> bool:
        inst = (ac.cid, ac.key)
        if (ac.cid, ac.key, ac.index) in self.banned:
            return False
        prev = self.chosen.setdefault(inst, ac.index)
        return prev == ac.index

    def add_negative(self, ac: AtomicChoice) -> bool:
        inst = (ac.cid, ac.key)
        if inst in self.chosen:
            # A chosen head makes ¬(other head) redundant, ¬(same head) false.
            return self.chosen[inst] != ac.index
        self.banned.add((ac.cid, ac.key, ac.index))
        return True

    def literals(self) -> list[ChoiceExpr]:
        lits: list[ChoiceExpr] = [
            AtomicChoice(cid, key, i) for (cid, key), i in self.chosen.items()
        ]
        lits.extend(
            Not(AtomicChoice(cid, key, i))
            for (cid, key, i) in self.banned
            if (cid, key) not in self.chosen
        )
        return lits


def _dnf_conjuncts(e: ChoiceExpr) -> list[_Conjunct]:
    """The disjuncts of an NNF expression, pruned for consistency on the fly."""
    if isinstance(e, _Bottom):
        return []
    if isinstance(e, _Top):
        return [_Conjunct()]
    if isinstance(e, AtomicChoice):
        c = _Conjunct()
        c.add_positive(e)
        return [c]
    if isinstance(e, Not):  # NNF: child is atomic
        c = _Conjunct()
        c.add_negative(e.child)
        return [c]
    if isinstance(e, Or):
        out: list[_Conjunct] = []
        for child in e.children:
            out.extend(_dnf_conjuncts(child))
        return out
    if isinstance(e, And):
        acc = [_Conjunct()]
        for child in e.children:
            branches = _dnf_conjuncts(child)
            nxt: list[_Conjunct] = []
            for a in acc:
                for b in branches:
                    merged = a.clone()
                    ok = all(
                        merged.add_positive(AtomicChoice(cid, key, i))
                        for (cid, key), i in b.chosen.items()
                    ) and all(
                        merged.add_negative(AtomicChoice(cid, key, i))
                        for (cid, key, i) in b.banned
                    )
                    if ok:
                        nxt.append(merged)
            acc = nxt
        return acc
    raise TypeError(f"not a choice expression: {e!r}")


def dnf(e: ChoiceExpr, g: GroundProgram | None = None) -> ChoiceExpr:
    """Canonical disjunctive normal form.

    Pushes negation to the leaves, distributes ∧ over ∨ with on-the-fly
    consistency pruning, then simplifies (absorption, redundant literals) —
    the result is ⊥, ⊤, a literal, a conjunction of literals, or a
    disjunction of such conjunctions, in canonical child order.  Idempotent.
    """
    conjuncts = _dnf_conjuncts(_nnf(e))
    return simplify(disj(conj(c.literals()) for c in conjuncts))


def is_dnf(e: ChoiceExpr) -> bool:
    def is_literal(x: ChoiceExpr) -> bool:
        return isinstance(x, AtomicChoice) or (
            isinstance(x, Not) and isinstance(x.child, AtomicChoice)
        )

    def is_conjunct(x: ChoiceExpr) -> bool:
        return is_literal(x) or (
            isinstance(x, And) and all(is_literal(c) for c in x.children)
        )

    if isinstance(e, (_Bottom, _Top)):
        return True
    if isinstance(e, Or):
        return all(is_conjunct(c) for c in e.children)
    return is_conjunct(e)


# ---------------------------------------------------------------------------
# Evaluation and equivalence
# ---------------------------------------------------------------------------


def eval_expr(e: ChoiceExpr, assignment: dict[tuple[str, ThetaKey], int]) -> bool:
    """Truth of an expression under a head assignment for its instances."""
    if isinstance(e, _Bottom):
        return False
    if isinstance(e, _Top):
        return True
    if isinstance(e, AtomicChoice):
        return assignment[(e.cid, e.key)] == e.index
    if isinstance(e, Not):
        return not eval_expr(e.child, assignment)
    if isinstance(e, And):
        return all(eval_expr(c, assignment) for c in e.children)
    if isinstance(e, Or):
        return any(eval_expr(c, assignment) for c in e.children)
    raise TypeError(f"not a choice expression: {e!r}")


def _instances_of(
    keys: set[tuple[str, ThetaKey]], g: GroundProgram
) -> list[GroundProbClause]:
    insts = [g.instance(cid, key) for cid, key in keys]
    return sorted(insts, key=lambda i: (_natural(i.cid), i.key))


def assignments_over(insts: list[GroundProbClause]):
    """All head assignments for the given instances."""
    ranges = [range(1, inst.n_heads + 1) for inst in insts]
    keys = [(inst.cid, inst.key) for inst in insts]
    for combo in itertools.product(*ranges):
        yield dict(zip(keys, combo))


def equiv(c1: ChoiceExpr, c2: ChoiceExpr, g: GroundProgram) -> bool:
    """World equivalence, decided by enumerating head assignments over the

    instances the two expressions mention (unmentioned instances cannot
    distinguish them).  Errors out above ``EQUIV_INSTANCE_LIMIT`` instances.
    """
    keys = mentioned_instances(c1) | mentioned_instances(c2)
    if len(keys) > EQUIV_INSTANCE_LIMIT:
        raise EnumerationLimitError(
            f"equivalence check over {len(keys)} ground instances "
            f"(limit {EQUIV_INSTANCE_LIMIT})"
        )
    for assignment in assignments_over(_instances_of(keys, g)):
        if eval_expr(c1, assignment) != eval_expr(c2, assignment):
            return False
    return True


# ---------------------------------------------------------------------------
# External text form
# ---------------------------------------------------------------------------


def render_atomic(ac: AtomicChoice, g: GroundProgram) -> str:
    inst = g.instance(ac.cid, ac.key)
    return f"({ac.cid},{inst.values_str()},{ac.index})"


def render_expr(e: ChoiceExpr, g: GroundProgram) -> str:
    """Debug syntax: ``(c2,[p1,p2],1) & ~(c3,[p1],1) | top`` (& binds

    tighter than |; ~ tightest)."""
    if isinstance(e, _Bottom):
        return "bot"
    if isinstance(e, _Top):
        return "top"
    if isinstance(e, AtomicChoice):
        return render_atomic(e, g)
    if isinstance(e, Not):
        inner = render_expr(e.child, g)
        if isinstance(e.child, (And, Or)):
            return f"~({inner})"
        return f"~{inner}"
    if isinstance(e, And):
        return " & ".join(
            f"({render_expr(c, g)})" if isinstance(c, Or) else render_expr(c, g)
            for c in e.children
        )
    if isinstance(e, Or):
        return " | ".join(render_expr(c, g) for c in e.children)
    raise TypeError(f"not a choice expression: {e!r}")


def render_composite(k: CompositeChoice, g: GroundProgram) -> str:
    acs = sorted(k, key=lambda ac: ac.sort_key())
    return "{" + ",".join(render_atomic(ac, g) for ac in acs) + "}"


def render_composite_set(ks, g: GroundProgram) -> str:
    return "{" + ",".join(render_composite(k, g) for k in sort_composites(ks)) + "}"


_EXPR_TOKEN_RE = re.compile(
    r"\s*(?:(?P<triple>\(\s*[a-z][A-Za-z0-9_]*\s*,\s*\[[A-Za-z0-9_,]*\]\s*,\s*\d+\s*\))"
    r"|(?P<word>top|bot)"
    r"|(?P<op>[~&|(){},]))"
)

_TRIPLE_RE = re.compile(
    r"\(\s*(?P<cid>[a-z][A-Za-z0-9_]*)\s*,\s*\[(?P<vals>[A-Za-z0-9_,]*)\]\s*,\s*(?P<idx>\d+)\s*\)"
)


class _ExprParser:
    """Parses the debug syntax for expressions and composite-choice sets."""

    def __init__(self, text: str, g: GroundProgram):
        self.g = g
        self.tokens: list[str] = []
        pos = 0
        while pos < len(text):
            m = _EXPR_TOKEN_RE.match(text, pos)
            if m is None:
                rest = text[pos:].strip()
                if not rest:
                    break
                raise LpadError(f"cannot parse choice expression at {rest[:20]!r}")
            self.tokens.append(m.group().strip())
            pos = m.end()
        self.i = 0

    @property
    def cur(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def advance(self) -> str:
        t = self.cur
        if t is None:
            raise LpadError("unexpected end of choice expression")
        self.i += 1
        return t

    def expect(self, token: str) -> None:
        t = self.advance()
        if t != token:
            raise LpadError(f"expected {token!r}, found {t!r}")

    def atomic(self, text: str) -> AtomicChoice:
        m = _TRIPLE_RE.match(text)
        if m is None:
            raise LpadError(f"expected an atomic choice (cid,[values],i), found {text!r}")
        vals = tuple(v for v in m.group("vals").split(",") if v)
        inst = self.g.instance_by_values(m.group("cid"), vals)
        idx = int(m.group("idx"))
        if not 1 <= idx <= inst.n_heads:
            raise LpadError(
                f"head index {idx} out of range for {inst.cid} "
                f"(instance has {inst.n_heads} heads)"
            )
        return AtomicChoice(inst.cid, inst.key, idx)

    # expression grammar: disjunction of conjunctions of unary-negated atoms
    def parse_expr(self) -> ChoiceExpr:
        parts = [self.parse_conj()]
        while self.cur == "|":
            self.advance()
            parts.append(self.parse_conj())
        return disj(parts) if len(parts) > 1 else parts[0]

    def parse_conj(self) -> ChoiceExpr:
        parts = [self.parse_unary()]
        while self.cur == "&":
            self.advance()
            parts.append(self.parse_unary())
        return conj(parts) if len(parts) > 1 else parts[0]

    def parse_unary(self) -> ChoiceExpr:
        t = self.advance()
        if t == "~":
            return Not(self.parse_unary())
        if t == "(":
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if t == "top":
            return TOP
        if t == "bot":
            return BOT
        if _TRIPLE_RE.match(t):
            return self.atomic(t)
        raise LpadError(f"unexpected token {t!r} in choice expression")

    def parse_composite_set(self) -> frozenset[CompositeChoice]:
        self.expect("{")
        out: set[CompositeChoice] = set()
        if self.cur == "}":
            self.advance()
            return frozenset(out)
        while True:
            out.add(self.parse_composite())
            if self.cur == ",":
                self.advance()
                continue
            self.expect("}")
            return frozenset(out)

    def parse_composite(self) -> CompositeChoice:
        self.expect("{")
        acs: set[AtomicChoice] = set()
        if self.cur == "}":
            self.advance()
            return frozenset(acs)
        while True:
            acs.add(self.atomic(self.advance()))
            if self.cur == ",":
                self.advance()
                continue
            self.expect("}")
            return frozenset(acs)


def parse_expr_text(text: str, g: GroundProgram) -> ChoiceExpr:
    p = _ExprParser(text, g)
    e = p.parse_expr()
    if p.cur is not None:
        raise LpadError(f"trailing text in choice expression: {p.cur!r}")
    return e


def parse_composite_set_text(text: str, g: GroundProgram) -> frozenset[CompositeChoice]:
    p = _ExprParser(text, g)
    ks = p.parse_composite_set()
    if p.cur is not None:
        raise LpadError(f"trailing text in composite-choice set: {p.cur!r}")
    return ks


def head_label(ac: AtomicChoice, g: GroundProgram) -> str:
    """The chosen head as text; the implicit empty head renders as 'none'."""
    atom = g.instance(ac.cid, ac.key).head_atom(ac.index)
    return NONE_PREDICATE if atom.predicate == NONE_PREDICATE else str(atom)
