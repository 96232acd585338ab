"""Human-readable explanations.

A successful derivation is replayed into an *and-tree*: each node is the
ground literal it proved, its children the body literals of the clause that
resolved it (facts close branches; the atomic choice of a probabilistic step
is implicit in the chosen clause head, so the edge needs no label).  A ground
negative literal gets a single closing child, with the step's choice
expression translated from atomic choices to the head atoms they pick
(``chq``), pruned of the vacuous "¬a" occurrences inside a's own
explanation — the part a reader already knows.

Three renderers share the tree: indented text (one literal per line, ``;``
between alternative reasons), natural language driven by ``%!read``
annotation templates, and a DOT graph.  Explanations are ranked by their
probability, ties keeping leaf order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .choice_algebra import (
    And,
    AtomicChoice,
    ChoiceExpr,
    Not,
    Or,
    TOP,
    head_label,
)
from .errors import ProgramError
from .grounder import GroundProgram, ground
from .semantics import DEFAULT_ASSIGNMENT_LIMIT, derivation_prob
from .slpdnf import (
    DEFAULT_DEPTH_LIMIT,
    Derivation,
    SlpdnfNode,
    build_tree,
    derivations,
)
from .syntax import (
    Annotation,
    Atom,
    Clause,
    Literal,
    Program,
    Query,
    Variable,
    apply_query,
    is_ground_query,
    query_str,
    query_vars,
)

import re

INDENT = "   "
BOX = "□"


# ---------------------------------------------------------------------------
# Readable expressions (choice expressions over head atoms)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class RLit:
    """±(head atom); ``atom`` is None for the implicit 'none' head.

    ``alternatives`` lists the sibling heads of the same instance, for the
    optional alternatives display."""

    negated: bool
    atom: Atom | None
    alternatives: tuple[str, ...] = ()

    @property
    def text(self) -> str:
        return "none" if self.atom is None else str(self.atom)


@dataclass(frozen=True, slots=True)
class RAnd:
    children: tuple[RLit, ...]


@dataclass(frozen=True, slots=True)
class ROr:
    children: tuple[RAnd, ...]


#: A readable expression: trivially true, or a disjunction of conjunctions.
ReadableExpr = None | ROr

_TRIVIAL: ReadableExpr = None


def _expr_literals(e: ChoiceExpr) -> list[tuple[bool, AtomicChoice]]:
    """The ±literals of one DNF conjunct."""
    parts = e.children if isinstance(e, And) else (e,)
    out: list[tuple[bool, AtomicChoice]] = []
    for p in parts:
        if isinstance(p, AtomicChoice):
            out.append((False, p))
        elif isinstance(p, Not) and isinstance(p.child, AtomicChoice):
            out.append((True, p.child))
        else:
            raise ProgramError(f"expression is not in normal form: {p}")
    return out


def _readable_lit(negated: bool, ac: AtomicChoice, g: GroundProgram) -> RLit:
    inst = g.instance(ac.cid, ac.key)
    atom = inst.head_atom(ac.index)
    alternatives = tuple(
        head_label(AtomicChoice(ac.cid, ac.key, j), g)
        for j in range(1, inst.n_heads + 1)
        if j != ac.index
    )
    return RLit(negated, None if atom.predicate == "none" else atom, alternatives)


def chq(e: ChoiceExpr, g: GroundProgram, negated_atom: Atom | None = None) -> ReadableExpr:
    """Translate a DNF choice expression to head atoms.

    Occurrences of ¬``negated_atom`` are pruned (inside the explanation of
    why ``negated_atom`` fails they carry no information); a conjunct pruned
    empty makes the whole expression trivially true, returned as None.
    """
    if e == TOP:
        return _TRIVIAL
    disjuncts = e.children if isinstance(e, Or) else (e,)
    out: list[RAnd] = []
    for d in disjuncts:
        lits: list[RLit] = []
        emptied = True
        for negated, ac in _expr_literals(d):
            rlit = _readable_lit(negated, ac, g)
            if negated and rlit.atom is not None and rlit.atom == negated_atom:
                continue
            lits.append(rlit)
        emptied = not lits
        if emptied:
            return _TRIVIAL
        conj_ = RAnd(tuple(lits))
        if conj_ not in out:
            out.append(conj_)
    return ROr(tuple(out))


# ---------------------------------------------------------------------------
# And-trees
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class AndTree:
    """A proof tree node; ``literal`` is None for the closing □ of a

    negative literal, whose parent carries the readable expression."""

    literal: Literal | None
    children: list["AndTree"] = field(default_factory=list)
    expr: ReadableExpr = None
    has_expr: bool = False

    def visible_children(self) -> list["AndTree"]:
        return [c for c in self.children if c.literal is not None]


def backpropagate(d: Derivation) -> Derivation:
    """A copy of the derivation with every goal grounded by the composed

    answer substitution."""
    sigma = d.substitution()
    nodes = []
    for n in d.nodes:
        q = apply_query(sigma, n.query)
        nodes.append(SlpdnfNode(q, n.expr, n.marking))
    if any(not is_ground_query(n.query) for n in nodes):
        raise ProgramError(
            "internal error: derivation does not ground its goals"
        )
    return Derivation(tuple(nodes), d.edges)


def and_tree(d: Derivation, g: GroundProgram) -> AndTree:
    """Replay a grounded derivation into a proof tree.

    The derivation must start from a single-literal goal (``explain`` wraps
    other queries first).
    """
    queries = [n.query for n in d.nodes]
    if len(queries[0]) != 1:
        raise ProgramError(
            f"proof trees need an atomic goal, got {query_str(queries[0])}"
        )
    root = AndTree(queries[0][0])
    pending: list[AndTree] = [root]
    for k, edge in enumerate(d.edges):
        node = pending.pop(0)
        child_query = queries[k + 1]
        if edge.kind in ("derived", "prob"):
            body_len = len(child_query) - (len(queries[k]) - 1)
            children = [AndTree(child_query[i]) for i in range(body_len)]
            node.children = children
            pending = children + pending
        else:  # negative literal: closing child plus readable expression
            node.children = [AndTree(None)]
            node.expr = chq(edge.expr, g, node.literal.atom)
            node.has_expr = True
    return root


@dataclass(frozen=True, slots=True)
class Explanation:
    tree: AndTree
    prob: float
    derivation: Derivation


def _wrap_query(q: Query, g: GroundProgram) -> tuple[Query, GroundProgram]:
    """For a non-atomic or negative goal, add ``main(vars) :- q`` and reground."""
    taken = {name for name, _ in g.source.prob_predicates()}
    taken |= {name for name, _ in g.source.derived_predicates()}
    name = "main"
    k = 0
    while name in taken:
        k += 1
        name = f"main_{k}"
    head = Atom(name, tuple(query_vars(q)))
    program = Program(
        g.source.prob_clauses,
        g.source.derived_clauses + (Clause(head, q),),
        g.source.annotations,
    )
    g2 = ground(program, list(g.constants), g.restriction)
    return (Literal(True, head),), g2


def explain(
    q: Query,
    g: GroundProgram,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    limit: int = DEFAULT_ASSIGNMENT_LIMIT,
) -> list[Explanation]:
    """All proofs of ``q`` as trees with probabilities, most probable first

    (ties keep left-to-right proof order)."""
    if len(q) != 1 or not q[0].positive:
        q, g = _wrap_query(q, g)
    tree = build_tree(q, g, depth_limit)
    items = [
        Explanation(and_tree(backpropagate(d), g), derivation_prob(d, g, limit), d)
        for d in derivations(tree)
    ]
    return sorted(items, key=lambda e: e.prob, reverse=True)


# ---------------------------------------------------------------------------
# Annotation matching
# ---------------------------------------------------------------------------


def _match_atom(pattern: Atom, ground: Atom) -> dict[str, str] | None:
    if pattern.pred != ground.pred:
        return None
    bind: dict[str, str] = {}
    for pt, gt in zip(pattern.args, ground.args):
        if isinstance(pt, Variable):
            if bind.setdefault(pt.name, gt.name) != gt.name:
                return None
        elif pt != gt:
            return None
    return bind


def _fill(template: str, bind: dict[str, str]) -> str:
    out = template
    for name, value in bind.items():
        out = re.sub(rf"\b{re.escape(name)}\b", value, out)
    return out


def phrase_for(lit: Literal, annotations: tuple[Annotation, ...]) -> str:
    """The display phrase for a ground literal: the first matching annotation

    of the same sign; else, for negative literals, "not " plus the first
    positive match; else the literal's syntax."""
    for ann in annotations:
        if ann.pattern.positive == lit.positive:
            bind = _match_atom(ann.pattern.atom, lit.atom)
            if bind is not None:
                return _fill(ann.template, bind)
    if not lit.positive:
        for ann in annotations:
            if ann.pattern.positive:
                bind = _match_atom(ann.pattern.atom, lit.atom)
                if bind is not None:
                    return "not " + _fill(ann.template, bind)
    return str(lit)


def _rlit_phrase(r: RLit, annotations: tuple[Annotation, ...]) -> str:
    if r.atom is None:
        return "none"
    return phrase_for(Literal(not r.negated, r.atom), annotations)


# ---------------------------------------------------------------------------
# Renderers
# ---------------------------------------------------------------------------


def _lit_text(lit: Literal) -> str:
    return str(lit)


def _alts_suffix(r: RLit, alternatives: bool) -> str:
    if alternatives and r.negated and r.alternatives:
        return " {" + ", ".join(r.alternatives) + "}"
    return ""


def render_text(
    tree: AndTree,
    depth_limit: int | None = None,
    alternatives: bool = False,
) -> str:
    """Indented text: one literal per line, three spaces per level, a lone

    ``;`` between the alternative reasons of a negative literal.  With a
    depth limit, nodes at the cut with hidden content end in " ..."."""
    lines: list[str] = []

    def emit(node: AndTree, depth: int) -> None:
        visible = node.visible_children()
        hidden = bool(visible) or node.expr is not None
        folded = depth_limit is not None and depth >= depth_limit and hidden
        lines.append(INDENT * depth + _lit_text(node.literal) + (" ..." if folded else ""))
        if folded:
            return
        if node.expr is not None:
            for i, conj_ in enumerate(node.expr.children):
                if i:
                    lines.append(INDENT * (depth + 1) + ";")
                for r in conj_.children:
                    text = ("¬" if r.negated else "") + r.text
                    lines.append(INDENT * (depth + 1) + text + _alts_suffix(r, alternatives))
        for child in visible:
            emit(child, depth + 1)

    emit(tree, 0)
    return "\n".join(lines) + "\n"


def render_nl(
    tree: AndTree,
    annotations: tuple[Annotation, ...],
    depth_limit: int | None = None,
    alternatives: bool = False,
) -> str:
    """Natural language: each node becomes a phrase line; nodes with visible

    content end in " because", non-first siblings start with "and ", and the
    alternative reasons of a negative literal are joined by "or because"."""
    lines: list[str] = []

    def emit(node: AndTree, depth: int, follows_sibling: bool) -> None:
        visible = node.visible_children()
        hidden = bool(visible) or node.expr is not None
        folded = depth_limit is not None and depth >= depth_limit and hidden
        phrase = phrase_for(node.literal, annotations)
        prefix = "and " if follows_sibling else ""
        if folded:
            lines.append(INDENT * depth + prefix + phrase + " ...")
            return
        suffix = " because" if hidden else ""
        lines.append(INDENT * depth + prefix + phrase + suffix)
        if node.expr is not None:
            for i, conj_ in enumerate(node.expr.children):
                if i:
                    lines.append(INDENT * (depth + 1) + "or because")
                for j, r in enumerate(conj_.children):
                    text = ("and " if j else "") + _rlit_phrase(r, annotations)
                    lines.append(INDENT * (depth + 1) + text + _alts_suffix(r, alternatives))
        for j, child in enumerate(visible):
            emit(child, depth + 1, j > 0)

    emit(tree, 0, False)
    return "\n".join(lines) + "\n"


def _expr_inline(e: ReadableExpr, alternatives: bool = False) -> str:
    parts = []
    for conj_ in e.children:
        lits = [
            ("¬" if r.negated else "") + r.text + _alts_suffix(r, alternatives)
            for r in conj_.children
        ]
        joined = " ∧ ".join(lits)
        parts.append(f"({joined})" if len(lits) > 1 and len(e.children) > 1 else joined)
    return " ∨ ".join(parts)


def render_graph(trees: list[AndTree] | AndTree, alternatives: bool = False) -> str:
    """A DOT digraph; several trees render as disconnected components.

    Node ids follow preorder; the closing node of a negative literal is □,
    its edge labeled with the readable expression (omitted when trivial).
    """
    if isinstance(trees, AndTree):
        trees = [trees]
    decls: list[str] = []
    edges: list[str] = []
    ids: dict[int, int] = {}

    def escape(text: str) -> str:
        return text.replace("\\", "\\\\").replace('"', '\\"')

    def declare(node: AndTree) -> None:
        nid = len(ids)
        ids[id(node)] = nid
        label = BOX if node.literal is None else _lit_text(node.literal)
        decls.append(f'  n{nid} [label="{escape(label)}"];')
        for child in node.children:
            declare(child)

    def connect(node: AndTree) -> None:
        nid = ids[id(node)]
        for child in node.children:
            cid = ids[id(child)]
            if child.literal is None and node.expr is not None:
                expr_text = escape(_expr_inline(node.expr, alternatives))
                edges.append(f'  n{nid} -> n{cid} [label="{expr_text}"];')
            else:
                edges.append(f"  n{nid} -> n{cid};")
            connect(child)

    for t in trees:
        declare(t)
    for t in trees:
        connect(t)
    return "digraph proof {\n" + "\n".join(decls + edges) + "\n}\n"


def to_record(tree: AndTree, alternatives: bool = False) -> dict:
    """A JSON-ready nested record of one proof tree."""
    record: dict = {"literal": BOX if tree.literal is None else _lit_text(tree.literal)}
    if tree.has_expr:
        record["expression"] = _expr_record(tree.expr, alternatives)
    record["children"] = [to_record(c, alternatives) for c in tree.children]
    return record


def _expr_record(e: ReadableExpr, alternatives: bool) -> dict:
    if e is None:
        return {"op": "true"}
    return {
        "op": "or",
        "args": [
            {
                "op": "and",
                "args": [_rlit_record(r, alternatives) for r in conj_.children],
            }
            for conj_ in e.children
        ],
    }


def _rlit_record(r: RLit, alternatives: bool) -> dict:
    record: dict = {"op": "lit", "text": r.text, "negated": r.negated}
    if alternatives and r.negated:
        record["alternatives"] = list(r.alternatives)
    return record
