"""Constraints on book embeddings: positions, interval markers and page colors.

Items referenced by constraints are node ids (``int``) or marker names
(``str``). A marker is a point on the circle between two adjacent nodes; it has
no edges.

Every interval names an arc of the circle explicitly via :class:`Arc`: either
the arc between ``a`` and ``b`` that avoids ``excluding``, or (``excluding is
None``) the arc traversed going forward from ``a`` to ``b``. Forward arcs and
:class:`Before` depend on the orientation of the circle, so solvers must not
identify mirror images when they occur.

Constraints compile into :class:`Atom` checks. An atom depends on a fixed set
of items (and at most one edge color), so it can be evaluated as soon as those
items are placed -- this is what both :func:`check` and the solver's
incremental pruning use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

from .embedding import BookEmbedding, in_arc
from .graph import Graph, edge_key

Item = Union[int, str]


class MissingMarker(KeyError):
    pass


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class Arc:
    a: Item
    b: Item
    excluding: Item | None = None

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ConstraintError(f"degenerate arc ({self.a!r},{self.b!r})")
        if self.excluding is not None and self.excluding in (self.a, self.b):
            raise ConstraintError("excluded item must differ from the arc endpoints")

    @property
    def forward(self) -> bool:
        return self.excluding is None

    def items(self) -> tuple[Item, ...]:
        return (self.a, self.b) if self.excluding is None else (self.a, self.b, self.excluding)


@dataclass(frozen=True)
class Interval:
    arc: Arc
    closed: tuple[bool, bool] = (False, False)


@dataclass(frozen=True)
class Before:
    """Going forward from ``anchor``, ``x`` is met before ``y``."""

    x: Item
    y: Item
    anchor: Item


@dataclass(frozen=True)
class InOpenInterval:
    x: Item
    arc: Arc


@dataclass(frozen=True)
class OutsideClosedInterval:
    x: Item
    arc: Arc


@dataclass(frozen=True)
class EdgeColorIs:
    edge: tuple[int, int]
    color: int


@dataclass(frozen=True)
class EdgeColorNot:
    edge: tuple[int, int]
    color: int


@dataclass(frozen=True)
class CondColorFrom:
    """Every edge ``(source, x)`` with ``x`` in ``interval`` is on page ``color``."""

    source: int
    interval: Interval
    color: int


@dataclass(frozen=True)
class ExitColored:
    """Every edge exiting ``arc`` with neither end in ``exempt`` is on page ``color``."""

    arc: Arc
    exempt: frozenset[int]
    color: int


Constraint = Union[
    Before, InOpenInterval, OutsideClosedInterval, EdgeColorIs, EdgeColorNot, CondColorFrom, ExitColored
]
COLOR_TYPES = (EdgeColorIs, EdgeColorNot, CondColorFrom, ExitColored)


def _items_of(c: Constraint) -> tuple[Item, ...]:
    if isinstance(c, Before):
        return (c.x, c.y, c.anchor)
    if isinstance(c, (InOpenInterval, OutsideClosedInterval)):
        return (c.x,) + c.arc.items()
    if isinstance(c, (EdgeColorIs, EdgeColorNot)):
        return tuple(c.edge)
    if isinstance(c, CondColorFrom):
        return (c.source,) + c.interval.arc.items()
    if isinstance(c, ExitColored):
        return c.arc.items() + tuple(sorted(c.exempt))
    raise TypeError(f"not a constraint: {c!r}")


def _orientation_dependent(c: Constraint) -> bool:
    if isinstance(c, Before):
        return True
    arc = getattr(c, "arc", None) or getattr(getattr(c, "interval", None), "arc", None)
    return arc is not None and arc.forward


def _colors_of(c: Constraint) -> tuple[int, ...]:
    return (c.color,) if isinstance(c, COLOR_TYPES) else ()


@dataclass(frozen=True)
class ConstraintSet:
    constraints: tuple[Constraint, ...] = ()

    def __init__(self, constraints: Iterable[Constraint] = ()) -> None:
        object.__setattr__(self, "constraints", tuple(constraints))

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self) -> int:
        return len(self.constraints)

    def __add__(self, other: ConstraintSet | Iterable[Constraint]) -> ConstraintSet:
        return ConstraintSet(self.constraints + tuple(other))

    def markers(self) -> list[str]:
        seen: dict[str, None] = {}
        for c in self.constraints:
            for it in _items_of(c):
                if isinstance(it, str):
                    seen.setdefault(it, None)
        return sorted(seen)

    @property
    def orientation_dependent(self) -> bool:
        return any(_orientation_dependent(c) for c in self.constraints)

    @property
    def has_color_constraints(self) -> bool:
        return any(isinstance(c, COLOR_TYPES) for c in self.constraints)

    def validate(self, graph: Graph, k: int | None = None) -> None:
        for c in self.constraints:
            for it in _items_of(c):
                if isinstance(it, int) and not (0 <= it < graph.n):
                    raise ConstraintError(f"{type(c).__name__} references unknown node {it}")
            if isinstance(c, (EdgeColorIs, EdgeColorNot)) and not graph.has_edge(*c.edge):
                raise ConstraintError(f"{type(c).__name__} references missing edge {c.edge}")
            if k is not None:
                for col in _colors_of(c):
                    if not (1 <= col <= k):
                        raise ConstraintError(f"{type(c).__name__} color {col} outside 1..{k}")


# -- compilation into atoms ---------------------------------------------------

# An atom's test gets (pos, length, colors): ``pos`` indexable by item index,
# ``length`` the circle length for forward arcs, ``colors`` mapping edge -> page.
Test = Callable[[Sequence[float], float, Mapping[tuple[int, int], int]], bool]


@dataclass(frozen=True)
class Atom:
    items: frozenset[int]
    edge: tuple[int, int] | None
    test: Test = field(compare=False)
    constraint: Constraint
    detail: str


@dataclass(frozen=True)
class Violation:
    constraint: Constraint
    detail: str

    def __str__(self) -> str:
        return f"{type(self.constraint).__name__}: {self.detail}"


def item_index(graph_n: int, markers: Sequence[str]) -> Callable[[Item], int]:
    offset = {name: graph_n + i for i, name in enumerate(markers)}

    def idx(it: Item) -> int:
        if isinstance(it, str):
            return offset[it]
        return int(it)

    return idx


def _membership(x: int, arc: Arc, closed: tuple[bool, bool], idx: Callable[[Item], int]):
    """Static bool, or (items, fn(pos, length) -> bool) for a dynamic test."""
    a, b = idx(arc.a), idx(arc.b)
    e = None if arc.excluding is None else idx(arc.excluding)
    if x == a:
        return closed[0]
    if x == b:
        return closed[1]
    if x == e:
        return False
    if e is None:
        return frozenset((x, a, b)), lambda pos, n: in_arc(pos[x], pos[a], pos[b], n)
    return frozenset((x, a, b, e)), lambda pos, n: in_arc(pos[x], pos[a], pos[b], n, pos[e])


def _dyn(m):
    return (frozenset(), (lambda pos, n, v=m: v)) if isinstance(m, bool) else m


def compile_atoms(graph: Graph, cs: ConstraintSet, markers: Sequence[str] | None = None) -> list[Atom]:
    """Translate constraints to atoms over item indices (markers follow nodes)."""
    markers = cs.markers() if markers is None else list(markers)
    idx = item_index(graph.n, markers)
    atoms: list[Atom] = []
    for c in cs:
        if isinstance(c, Before):
            x, y, an = idx(c.x), idx(c.y), idx(c.anchor)

            def before(pos, n, _c, x=x, y=y, an=an):
                return (pos[x] - pos[an]) % n < (pos[y] - pos[an]) % n

            atoms.append(Atom(frozenset((x, y, an)), None, before, c, f"{c.x!r} before {c.y!r} from {c.anchor!r}"))
        elif isinstance(c, (InOpenInterval, OutsideClosedInterval)):
            want_inside = isinstance(c, InOpenInterval)
            x = idx(c.x)
            closed = (False, False) if want_inside else (True, True)
            m = _membership(x, c.arc, closed, idx)
            items, fn = _dyn(m)

            def pos_test(pos, n, _c, fn=fn, want=want_inside):
                return fn(pos, n) == want

            where = "inside" if want_inside else "outside"
            atoms.append(Atom(items, None, pos_test, c, f"{c.x!r} must be {where} {c.arc}"))
        elif isinstance(c, (EdgeColorIs, EdgeColorNot)):
            e = edge_key(*c.edge)
            want = isinstance(c, EdgeColorIs)

            def col_test(pos, n, colors, e=e, want=want, col=c.color):
                return (colors[e] == col) == want

            rel = "==" if want else "!="
            atoms.append(Atom(frozenset(e), e, col_test, c, f"page{e} {rel} {c.color}"))
        elif isinstance(c, CondColorFrom):
            s = idx(c.source)
            for x in sorted(graph.neighbors(s)):
                e = edge_key(s, x)
                m = _membership(x, c.interval.arc, c.interval.closed, idx)
                if m is False:
                    continue
                items, fn = _dyn(m)

                def cond_test(pos, n, colors, fn=fn, e=e, col=c.color):
                    return colors[e] == col or not fn(pos, n)

                atoms.append(Atom(items | frozenset(e), e, cond_test, c, f"edge {e} into interval needs page {c.color}"))
        elif isinstance(c, ExitColored):
            exempt = {idx(v) for v in c.exempt}
            ends = {idx(c.arc.a), idx(c.arc.b)}
            for x, y in graph.edges():
                if x in exempt or y in exempt:
                    continue
                mx = _membership(x, c.arc, (False, False), idx)
                my = _membership(y, c.arc, (False, False), idx)
                if mx is False and my is False:
                    continue
                ix, fx = _dyn(mx)
                iy, fy = _dyn(my)

                def exit_test(pos, n, colors, fx=fx, fy=fy, x=x, y=y, e=(x, y), col=c.color):
                    if colors[e] == col:
                        return True
                    inx, iny = fx(pos, n), fy(pos, n)
                    if inx and not iny and y not in ends:
                        return False
                    if iny and not inx and x not in ends:
                        return False
                    return True

                atoms.append(Atom(ix | iy | frozenset((x, y)), (x, y), exit_test, c, f"edge {(x, y)} exits and needs page {c.color}"))
        else:
            raise TypeError(f"unsupported constraint {c!r}")
    return atoms


def resolve_marker_positions(n: int, markers: Sequence[str], positions: Mapping[str, float]) -> list[float]:
    out = []
    for name in markers:
        if name not in positions:
            raise MissingMarker(f"no position given for marker {name!r}")
        p = float(positions[name])
        if not (0 <= p < n) or p == int(p):
            raise ConstraintError(f"marker {name!r} position {p} is not a cut between slots of 0..{n - 1}")
        out.append(p)
    return out


def check(
    graph: Graph,
    emb: BookEmbedding,
    cs: ConstraintSet,
    marker_positions: Mapping[str, float] | None = None,
) -> list[Violation]:
    """All violated constraint atoms of a complete embedding (empty iff it satisfies ``cs``)."""
    markers = cs.markers()
    positions = emb.markers if marker_positions is None else marker_positions
    pos = [float(p) for p in emb.layout.pos] + resolve_marker_positions(graph.n, markers, positions)
    out = []
    for atom in compile_atoms(graph, cs, markers):
        if not atom.test(pos, graph.n, emb.pages):
            out.append(Violation(atom.constraint, atom.detail))
    return out


# -- partial-state propagation -----------------------------------------------


@dataclass
class PartialState:
    """A cyclic sequence of placed items (node ids and marker names) plus the
    pages chosen so far."""

    placed: Sequence[Item]
    colors: Mapping[tuple[int, int], int] = field(default_factory=dict)


FEASIBLE = "feasible"
PRUNED = "pruned"


def propagate(graph: Graph, state: PartialState, cs: ConstraintSet) -> str:
    """``pruned`` iff some constraint is already decided false in ``state``.

    Only atoms whose items are all placed (and whose edge is colored) are
    evaluated, so a pruned state has no satisfying completion.
    """
    markers = cs.markers()
    idx = item_index(graph.n, markers)
    total = graph.n + len(markers)
    pos: list[float] = [0.0] * total
    placed = set()
    for r, it in enumerate(state.placed):
        i = idx(it)
        pos[i] = float(r)
        placed.add(i)
    colors = {edge_key(*e): c for e, c in state.colors.items()}
    for atom in compile_atoms(graph, cs, markers):
        if not atom.items <= placed:
            continue
        if atom.edge is not None and atom.edge not in colors:
            continue
        if not atom.test(pos, len(state.placed), colors):
            return PRUNED
    return FEASIBLE
