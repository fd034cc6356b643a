"""Finite-alphabet subshifts over Z^d given by local rules.

Exact pattern enumeration (backtracking with forward checking), exact big
integer counting (transfer matrices on 1-d interval windows, row-profile
dynamic programming on 2-d boxes, backtracking elsewhere), projections of
paired alphabets and fiber statistics.

Pattern legality on a window checks the rules that fit entirely inside the
window (free boundary).  For the shipped rule classes this either matches the
projection of globally legal configurations or over-counts by a boundary
factor that vanishes per site; `projection_count_interval` gives the exact
projection count for 1-d nearest-neighbor rules so the gap can be reported.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence
import json

from .groups import GroupSpec, GroupWindow

DEFAULT_PATTERN_CAP = 10**6


class PatternCapExceeded(RuntimeError):
    def __init__(self, cap):
        super().__init__(f"pattern enumeration exceeds cap {cap}")
        self.cap = cap


@dataclass(frozen=True)
class Alphabet:
    """Symbols 0..size-1, optionally structured as pairs A x B with size = a*b."""

    size: int
    pair: tuple | None = None  # (a, b)

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("alphabet must have at least one symbol")
        if self.pair is not None:
            a, b = self.pair
            if a * b != self.size:
                raise ValueError("paired alphabet needs size = a*b")

    @property
    def is_paired(self) -> bool:
        return self.pair is not None

    @property
    def a(self) -> int:
        return self.pair[0]

    @property
    def b(self) -> int:
        return self.pair[1]

    def pair_index(self, u: int, v: int) -> int:
        return u * self.b + v

    def components(self, s: int) -> tuple:
        return divmod(s, self.b)


@dataclass(frozen=True)
class Rule:
    """Composite local rule: cellwise symbol set, per-axis adjacency, forbidden patterns.

    axis_allowed maps an axis to a k x k boolean matrix M with M[s][t] true
    when symbol s at cell c and symbol t at cell c + e_axis may co-occur.
    Forbidden patterns are (offsets, symbols) pairs banned at every translate.
    """

    size: int
    allowed_symbols: frozenset | None = None
    axis_allowed: tuple = ()  # tuple of (axis, matrix-as-tuple-of-tuples)
    forbidden: tuple = ()     # tuple of (offsets tuple, symbols tuple)

    @staticmethod
    def full(size: int) -> "Rule":
        return Rule(size=size)

    @staticmethod
    def cellwise(size: int, allowed: Iterable[int]) -> "Rule":
        return Rule(size=size, allowed_symbols=frozenset(allowed))

    @staticmethod
    def nearest_neighbor(size: int, forbidden_pairs: Mapping[int, Iterable[tuple]]) -> "Rule":
        mats = []
        for axis, pairs in sorted(forbidden_pairs.items()):
            banned = set(tuple(p) for p in pairs)
            mat = tuple(tuple((s, t) not in banned for t in range(size))
                        for s in range(size))
            mats.append((axis, mat))
        return Rule(size=size, axis_allowed=tuple(mats))

    @staticmethod
    def forbidden_patterns(size: int, patterns: Iterable[tuple]) -> "Rule":
        pats = tuple((tuple(tuple(o) for o in offs), tuple(syms))
                     for offs, syms in patterns)
        return Rule(size=size, forbidden=pats)

    def matrix_for_axis(self, axis: int):
        for ax, mat in self.axis_allowed:
            if ax == axis:
                return mat
        return None

    def symbol_ok(self, s: int) -> bool:
        return self.allowed_symbols is None or s in self.allowed_symbols

    @property
    def symbols(self) -> list[int]:
        if self.allowed_symbols is None:
            return list(range(self.size))
        return sorted(self.allowed_symbols)


@dataclass(frozen=True)
class SubshiftSpec:
    rank: int
    alphabet: Alphabet
    rule: Rule
    name: str = ""

    def __post_init__(self):
        if self.rule.size != self.alphabet.size:
            raise ValueError("rule and alphabet sizes disagree")
        if self.alphabet.size > 256:
            raise ValueError("patterns store one byte per cell; 256 symbols max")

    @property
    def group(self) -> GroupSpec:
        return GroupSpec(self.rank)


@dataclass(frozen=True)
class PatternSet:
    """Enumerated legal assignments window -> alphabet, in deterministic order."""

    spec: SubshiftSpec
    window: GroupWindow
    patterns: tuple  # tuple of bytes, one byte per cell in window order

    @property
    def count(self) -> int:
        return len(self.patterns)


@dataclass(frozen=True)
class FiberTable:
    """Map from projected B-pattern v to the fiber count t(v)."""

    spec: SubshiftSpec
    window: GroupWindow
    entries: Mapping  # bytes -> int

    @property
    def total(self) -> int:
        return sum(self.entries.values())

    def counts(self) -> list[int]:
        return [self.entries[v] for v in sorted(self.entries)]


# ---------------------------------------------------------------------------
# construction helpers for the shipped systems

def full_shift(size, rank: int = 1, name: str = "") -> SubshiftSpec:
    if isinstance(size, tuple):
        a, b = size
        alpha = Alphabet(a * b, pair=(a, b))
    else:
        alpha = Alphabet(size)
    return SubshiftSpec(rank, alpha, Rule.full(alpha.size), name or "full")


def golden_mean(rank: int = 1, name: str = "golden-mean") -> SubshiftSpec:
    """Binary shift forbidding adjacent (1,1) along every axis."""
    forb = {axis: [(1, 1)] for axis in range(rank)}
    return SubshiftSpec(rank, Alphabet(2), Rule.nearest_neighbor(2, forb), name)


def hard_square(rank: int = 2) -> SubshiftSpec:
    return golden_mean(rank=rank, name="hard-square")


def cellwise_pair_shift(a: int, b: int, pairs: Iterable[tuple], rank: int = 1,
                        name: str = "cellwise") -> SubshiftSpec:
    alpha = Alphabet(a * b, pair=(a, b))
    allowed = [alpha.pair_index(u, v) for u, v in pairs]
    return SubshiftSpec(rank, alpha, Rule.cellwise(alpha.size, allowed), name)


def mcmullen_shift() -> SubshiftSpec:
    """a=4, b=2 cellwise shift with allowed pairs {(0,0),(1,0),(0,1)}."""
    return cellwise_pair_shift(4, 2, [(0, 0), (1, 0), (0, 1)], name="mcmullen")


def pair_shift_with_b_rule(a: int, b_spec: SubshiftSpec, name: str = "") -> SubshiftSpec:
    """Paired shift: the B component follows b_spec's NN rule, A is free."""
    b = b_spec.alphabet.size
    alpha = Alphabet(a * b, pair=(a, b))
    mats = []
    for axis, bmat in b_spec.rule.axis_allowed:
        mat = tuple(tuple(bmat[s % b][t % b] for t in range(alpha.size))
                    for s in range(alpha.size))
        mats.append((axis, mat))
    allowed = None
    if b_spec.rule.allowed_symbols is not None:
        allowed = frozenset(u * b + v for u in range(a)
                            for v in b_spec.rule.allowed_symbols)
    rule = Rule(size=alpha.size, allowed_symbols=allowed, axis_allowed=tuple(mats))
    return SubshiftSpec(b_spec.rank, alpha, rule, name or f"{b_spec.name}-on-B")


def projected_spec(spec: SubshiftSpec) -> SubshiftSpec | None:
    """The induced subshift on the B component, when derivable from the rule.

    Derivable for full or cellwise rules and for NN rules whose matrices
    factor through the B component (A free); returns None otherwise.
    """
    alpha = spec.alphabet
    if not alpha.is_paired:
        raise ValueError("projection needs a paired alphabet")
    a, b = alpha.pair
    rule = spec.rule
    if not rule.forbidden and not rule.axis_allowed:
        bset = sorted({s % b for s in rule.symbols})
        if len(bset) == b:
            return SubshiftSpec(spec.rank, Alphabet(b), Rule.full(b),
                                spec.name + "-proj")
        return SubshiftSpec(spec.rank, Alphabet(b),
                            Rule.cellwise(b, bset), spec.name + "-proj")
    if not rule.forbidden and rule.axis_allowed:
        mats = []
        for axis, mat in rule.axis_allowed:
            bmat = [[False] * b for _ in range(b)]
            for s in rule.symbols:
                for t in rule.symbols:
                    if mat[s][t]:
                        bmat[s % b][t % b] = True
            # factorization check: lifted matrix must reproduce mat
            for s in rule.symbols:
                for t in rule.symbols:
                    if mat[s][t] != bmat[s % b][t % b]:
                        return None
            mats.append((axis, tuple(tuple(r) for r in bmat)))
        bset = sorted({s % b for s in rule.symbols})
        allowed = None if len(bset) == b else frozenset(bset)
        return SubshiftSpec(spec.rank, Alphabet(b),
                            Rule(size=b, allowed_symbols=allowed,
                                 axis_allowed=tuple(mats)),
                            spec.name + "-proj")
    return None


# ---------------------------------------------------------------------------
# backtracking enumeration / counting

def _neighbor_constraints(spec: SubshiftSpec, window: GroupWindow):
    """Per cell: adjacency checks against earlier cells, and forbidden-pattern
    instances triggered when the cell is the last of the instance assigned."""
    rule = spec.rule
    pos = window.position_map
    n = len(window)
    adj = [[] for _ in range(n)]   # (earlier_pos, matrix, earlier_is_source)
    for axis, mat in rule.axis_allowed:
        e = [0] * spec.rank
        e[axis] = 1
        e = tuple(e)
        for i, c in enumerate(window.elements):
            nb = tuple(x + y for x, y in zip(c, e))
            j = pos.get(nb)
            if j is None:
                continue
            # edge c -> c+e_axis with matrix[s_c][s_nb]
            if j < i:
                adj[i].append((j, mat, False))   # check mat[s_i][s_j]
            else:
                adj[j].append((i, mat, True))    # check mat[s_i_earlier][s_j]
    trig = [[] for _ in range(n)]  # (positions tuple, symbols tuple)
    if rule.forbidden:
        cells = window.elements
        for offs, syms in rule.forbidden:
            base = offs[0]
            for c in cells:
                try:
                    inst = [pos[tuple(x - b0 + o for x, b0, o in zip(c, base, off))]
                            for off in offs]
                except KeyError:
                    continue
                trig[max(inst)].append((tuple(inst), tuple(syms)))
    return adj, trig


def _iter_patterns(spec: SubshiftSpec, window: GroupWindow):
    """Depth-first over cells in window order; deterministic symbol order."""
    rule = spec.rule
    n = len(window)
    if n == 0:
        yield b""
        return
    adj, trig = _neighbor_constraints(spec, window)
    symbols = rule.symbols
    assign = bytearray(n)

    def ok(i: int, s: int) -> bool:
        for j, mat, earlier_is_source in adj[i]:
            if earlier_is_source:
                if not mat[assign[j]][s]:
                    return False
            elif not mat[s][assign[j]]:
                return False
        for positions, syms in trig[i]:
            hit = True
            for p, forced in zip(positions, syms):
                got = s if p == i else assign[p]
                if got != forced:
                    hit = False
                    break
            if hit:
                return False
        return True

    def rec(i: int):
        if i == n:
            yield bytes(assign)
            return
        for s in symbols:
            if ok(i, s):
                assign[i] = s
                yield from rec(i + 1)

    yield from rec(0)


def enumerate_patterns(spec: SubshiftSpec, window: GroupWindow,
                       cap: int = DEFAULT_PATTERN_CAP) -> PatternSet:
    out = []
    for p in _iter_patterns(spec, window):
        out.append(p)
        if len(out) > cap:
            raise PatternCapExceeded(cap)
    return PatternSet(spec=spec, window=window, patterns=tuple(out))


def _interval_axis(window: GroupWindow, rank: int):
    """Axis along which the window is a contiguous line, or None."""
    cells = window.elements
    if len(cells) == 1:
        return 0, [0]
    for axis in range(rank):
        others = {tuple(c[:axis] + c[axis + 1:]) for c in cells}
        if len(others) != 1:
            continue
        vals = sorted(c[axis] for c in cells)
        if vals == list(range(vals[0], vals[0] + len(vals))):
            order = sorted(range(len(cells)), key=lambda i: cells[i][axis])
            return axis, order
    return None


def _transfer_count(rule: Rule, axis: int, length: int) -> int:
    symbols = rule.symbols
    mat = rule.matrix_for_axis(axis)
    if mat is None:
        return len(symbols) ** length
    vec = {s: 1 for s in symbols}
    for _ in range(length - 1):
        nxt = {t: 0 for t in symbols}
        for s, cnt in vec.items():
            if not cnt:
                continue
            row = mat[s]
            for t in symbols:
                if row[t]:
                    nxt[t] += cnt
        vec = nxt
    return sum(vec.values())


def _box_profile_count(spec: SubshiftSpec, n: int, cap: int = 4096) -> int | None:
    """Exact count on the 2-d box [0,n)^2 by row-profile DP; None if gated off."""
    if spec.rank != 2 or spec.rule.forbidden:
        return None
    if spec.alphabet.size ** n > cap:
        return None
    row_spec = SubshiftSpec(1, Alphabet(spec.alphabet.size),
                            Rule(size=spec.rule.size,
                                 allowed_symbols=spec.rule.allowed_symbols,
                                 axis_allowed=((0, spec.rule.matrix_for_axis(0)),)
                                 if spec.rule.matrix_for_axis(0) else ()))
    rows = [tuple(p) for p in _iter_patterns(row_spec, _line_window(n))]
    vmat = spec.rule.matrix_for_axis(1)
    counts = {r: 1 for r in rows}
    for _ in range(n - 1):
        nxt = {r: 0 for r in rows}
        for r, cnt in counts.items():
            if not cnt:
                continue
            for t in rows:
                if vmat is None or all(vmat[a][b] for a, b in zip(r, t)):
                    nxt[t] += cnt
        counts = nxt
    return sum(counts.values())


def _line_window(n: int) -> GroupWindow:
    return GroupWindow(spec=GroupSpec(1), elements=tuple((x,) for x in range(n)),
                       kind="explicit")


def count_patterns(spec: SubshiftSpec, window: GroupWindow) -> int:
    """Exact number of free-boundary legal patterns on the window."""
    rule = spec.rule
    n = len(window)
    if n == 0:
        return 1
    if not rule.axis_allowed and not rule.forbidden:
        return len(rule.symbols) ** n
    if not rule.forbidden:
        hit = _interval_axis(window, spec.rank)
        if hit is not None:
            axis, _ = hit
            # a line only sees the adjacency along its own axis
            return _transfer_count(rule, axis, n)
        if window.kind == "box" and spec.rank == 2:
            c = _box_profile_count(spec, window.index)
            if c is not None:
                return c
    total = 0
    for _ in _iter_patterns(spec, window):
        total += 1
    return total


def extensible_symbols(rule: Rule, axis: int) -> tuple:
    """(backward-extensible, forward-extensible) symbol sets for a 1-d NN rule."""
    symbols = set(rule.symbols)
    mat = rule.matrix_for_axis(axis)
    if mat is None:
        return frozenset(symbols), frozenset(symbols)
    fwd = set(symbols)
    while True:
        keep = {s for s in fwd if any(mat[s][t] for t in fwd)}
        if keep == fwd:
            break
        fwd = keep
    bwd = set(symbols)
    while True:
        keep = {t for t in bwd if any(mat[s][t] for s in bwd)}
        if keep == bwd:
            break
        bwd = keep
    return frozenset(bwd), frozenset(fwd)


def projection_count_interval(spec: SubshiftSpec, window: GroupWindow) -> int:
    """Exact count of globally extendable patterns on a 1-d interval window.

    Valid for rank-1 nearest-neighbor rules: a legal word extends to a
    bi-infinite configuration iff its first symbol extends backward forever
    and its last forward forever.
    """
    if spec.rank != 1 or spec.rule.forbidden:
        raise ValueError("projection counts implemented for 1-d NN rules")
    hit = _interval_axis(window, 1)
    if hit is None:
        raise ValueError("window is not an interval")
    n = len(window)
    rule = spec.rule
    bwd, fwd = extensible_symbols(rule, 0)
    mat = rule.matrix_for_axis(0)
    if mat is None:
        return len(set(rule.symbols) & bwd & fwd) ** n
    vec = {s: 1 if s in bwd else 0 for s in rule.symbols}
    for _ in range(n - 1):
        nxt = {t: 0 for t in rule.symbols}
        for s, cnt in vec.items():
            if not cnt:
                continue
            for t in rule.symbols:
                if mat[s][t]:
                    nxt[t] += cnt
        vec = nxt
    return sum(cnt for s, cnt in vec.items() if s in fwd)


# ---------------------------------------------------------------------------
# projections and fibers

def project(ps: PatternSet) -> PatternSet:
    """Image of the patterns under the B-component projection, deduplicated."""
    alpha = ps.spec.alphabet
    if not alpha.is_paired:
        raise ValueError("projection needs a paired alphabet")
    b = alpha.b
    seen = {}
    for p in ps.patterns:
        v = bytes(s % b for s in p)
        seen.setdefault(v, None)
    pspec = projected_spec(ps.spec)
    if pspec is None:
        pspec = SubshiftSpec(ps.spec.rank, Alphabet(b), Rule.full(b),
                             ps.spec.name + "-proj")
    return PatternSet(spec=pspec, window=ps.window, patterns=tuple(seen))


def fiber_counts(ps: PatternSet) -> FiberTable:
    """Group patterns by their B projection; sums back to the total count."""
    alpha = ps.spec.alphabet
    if not alpha.is_paired:
        raise ValueError("fiber counts need a paired alphabet")
    b = alpha.b
    entries: dict = {}
    for p in ps.patterns:
        v = bytes(s % b for s in p)
        entries[v] = entries.get(v, 0) + 1
    return FiberTable(spec=ps.spec, window=ps.window, entries=entries)


def fiber_table(spec: SubshiftSpec, window: GroupWindow,
                cap: int = DEFAULT_PATTERN_CAP) -> FiberTable:
    """Fiber counts without storing the full pattern list."""
    alpha = spec.alphabet
    if not alpha.is_paired:
        raise ValueError("fiber counts need a paired alphabet")
    b = alpha.b
    entries: dict = {}
    total = 0
    for p in _iter_patterns(spec, window):
        v = bytes(s % b for s in p)
        entries[v] = entries.get(v, 0) + 1
        total += 1
        if total > cap:
            raise PatternCapExceeded(cap)
    return FiberTable(spec=spec, window=window, entries=entries)


# ---------------------------------------------------------------------------
# JSON interface

def spec_from_json(doc) -> SubshiftSpec:
    """Parse {"rank", "alphabet": {"k"}|{"a","b"}, "rule": {"type", ...}}."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    rank = int(doc.get("rank", 1))
    alpha_doc = doc["alphabet"]
    if "k" in alpha_doc:
        alpha = Alphabet(int(alpha_doc["k"]))
    else:
        a, b = int(alpha_doc["a"]), int(alpha_doc["b"])
        alpha = Alphabet(a * b, pair=(a, b))
    rdoc = doc["rule"]
    rtype = rdoc["type"]
    if rtype == "full":
        rule = Rule.full(alpha.size)
    elif rtype == "cellwise":
        if alpha.is_paired:
            allowed = [alpha.pair_index(u, v) for u, v in rdoc["allowed"]]
        else:
            allowed = [int(s) for s in rdoc["allowed"]]
        rule = Rule.cellwise(alpha.size, allowed)
    elif rtype == "nearest_neighbor":
        forb = {int(ax): [tuple(p) for p in pairs]
                for ax, pairs in rdoc["axis_forbidden"].items()}
        rule = Rule.nearest_neighbor(alpha.size, forb)
    elif rtype == "forbidden_patterns":
        pats = [(tuple(tuple(o) for o in p["offsets"]), tuple(p["symbols"]))
                for p in rdoc["patterns"]]
        rule = Rule.forbidden_patterns(alpha.size, pats)
    else:
        raise ValueError(f"unknown rule type {rtype!r}")
    return SubshiftSpec(rank, alpha, rule, doc.get("name", rtype))


def counts_to_csv(rows: Sequence[tuple]) -> str:
    """CSV export (window_index, count) with exact integers."""
    lines = ["window_index,count"]
    for idx, cnt in rows:
        lines.append(f"{idx},{cnt}")
    return "\n".join(lines) + "\n"
