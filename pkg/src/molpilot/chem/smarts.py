"""Substructure query language: a practical SMARTS subset.

Supports the primitives used by the shipped parameter tables: wildcards
``* A a``, elements (``C`` aliphatic / ``c`` aromatic / ``#n`` by number),
``H X D v R r`` with optional counts, charge, logical operators
``! & , ;`` at standard precedence, recursive ``$(...)`` sub-patterns,
branches, pattern ring closures, and the bond primitives
``- = # : ~ @`` with negation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .graph import AROMATIC, ATOMIC_NUMBERS, DOUBLE, SINGLE, TRIPLE, MolecularGraph

_TWO_LETTER = [s for s in ATOMIC_NUMBERS if len(s) == 2]
_AROMATIC_SHORT = {"c": "C", "n": "N", "o": "O", "p": "P", "s": "S",
                   "se": "Se", "as": "As", "b": "B"}


class SmartsError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


# ---------------------------------------------------------------------------
# expression tree

@dataclass(frozen=True)
class _Prim:
    kind: str
    arg: object = None


@dataclass(frozen=True)
class _Not:
    inner: object


@dataclass(frozen=True)
class _And:
    parts: tuple


@dataclass(frozen=True)
class _Or:
    parts: tuple


@dataclass
class PatternAtom:
    expr: object


@dataclass
class PatternBond:
    a: int
    b: int
    expr: object  # None = default single-or-aromatic


@dataclass
class Pattern:
    atoms: list[PatternAtom] = field(default_factory=list)
    bonds: list[PatternBond] = field(default_factory=list)
    source: str = ""

    def neighbor_plan(self) -> list[tuple[int, int, object]]:
        """(pattern atom, earlier anchor atom, bond expr) in match order,
        plus extra closure constraints appended as (-1, ...) entries."""
        plan: list[tuple[int, int, object]] = []
        placed = {0}
        pending = list(range(len(self.bonds)))
        progress = True
        while pending and progress:
            progress = False
            for idx in list(pending):
                bond = self.bonds[idx]
                if bond.a in placed and bond.b in placed:
                    plan.append((-1, idx, None))  # ring-closure constraint
                    pending.remove(idx)
                    progress = True
                elif bond.a in placed:
                    plan.append((bond.b, bond.a, idx))
                    placed.add(bond.b)
                    pending.remove(idx)
                    progress = True
                elif bond.b in placed:
                    plan.append((bond.a, bond.b, idx))
                    placed.add(bond.a)
                    pending.remove(idx)
                    progress = True
        if pending:
            raise SmartsError(f"disconnected pattern {self.source!r}", 0)
        return plan


# ---------------------------------------------------------------------------
# parsing

class _Reader:
    def __init__(self, text: str, pos: int = 0):
        self.text = text
        self.pos = pos

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def digits(self) -> Optional[int]:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return int(self.text[start:self.pos]) if self.pos > start else None


def parse_smarts(text: str) -> Pattern:
    reader = _Reader(text)
    pattern = Pattern(source=text)
    _parse_chain(reader, pattern, stop_at=None)
    if reader.pos != len(text):
        raise SmartsError(f"unexpected character {reader.peek()!r}", reader.pos)
    if not pattern.atoms:
        raise SmartsError("empty pattern", 0)
    return pattern


def _parse_chain(reader: _Reader, pattern: Pattern, stop_at: Optional[str]) -> None:
    prev: Optional[int] = None
    stack: list[Optional[int]] = []
    ring_open: dict[int, tuple[int, object]] = {}
    pending_bond: object = None
    pending_set = False
    while True:
        ch = reader.peek()
        if ch == "" or (ch == stop_at and not stack):
            if ch == "" and stack:
                raise SmartsError("unbalanced parentheses in pattern", reader.pos)
            if ring_open:
                raise SmartsError("unmatched ring closure in pattern", reader.pos)
            return
        if ch == "(":
            reader.take()
            if prev is None:
                raise SmartsError("branch before any atom", reader.pos - 1)
            stack.append(prev)
            continue
        if ch == ")":
            reader.take()
            if not stack:
                raise SmartsError("unbalanced parentheses in pattern", reader.pos - 1)
            prev = stack.pop()
            continue
        if ch in "-=#:~@!/\\":
            pending_bond = _parse_bond_expr(reader)
            pending_set = True
            continue
        if ch.isdigit() or ch == "%":
            if ch == "%":
                reader.take()
                num = (reader.digits() or 0)
            else:
                num = int(reader.take())
            if prev is None:
                raise SmartsError("ring closure before any atom", reader.pos - 1)
            if num in ring_open:
                other, expr0 = ring_open.pop(num)
                pattern.bonds.append(PatternBond(other, prev,
                                                 pending_bond if pending_set else expr0))
            else:
                ring_open[num] = (prev, pending_bond if pending_set else None)
            pending_bond, pending_set = None, False
            continue
        expr = _parse_atom(reader)
        pattern.atoms.append(PatternAtom(expr))
        idx = len(pattern.atoms) - 1
        if prev is not None:
            pattern.bonds.append(PatternBond(prev, idx, pending_bond if pending_set else None))
        prev = idx
        pending_bond, pending_set = None, False


def _parse_bond_expr(reader: _Reader):
    prims = []
    negate_next = False
    while True:
        ch = reader.peek()
        if ch == "!":
            reader.take()
            negate_next = True
            continue
        if ch == "&":
            reader.take()
            continue
        mapping = {"-": "single", "=": "double", "#": "triple", ":": "aromatic",
                   "~": "anybond", "@": "ringbond", "/": "single", "\\": "single"}
        if ch in mapping:
            reader.take()
            prim = _Prim(mapping[ch])
            prims.append(_Not(prim) if negate_next else prim)
            negate_next = False
            continue
        break
    if negate_next:
        raise SmartsError("dangling '!' in bond expression", reader.pos)
    if not prims:
        return None
    return _And(tuple(prims))


def _parse_atom(reader: _Reader):
    ch = reader.peek()
    if ch == "[":
        reader.take()
        expr = _parse_expr(reader)
        if reader.peek() != "]":
            raise SmartsError("unterminated bracket expression", reader.pos)
        reader.take()
        return expr
    # shorthand atoms outside brackets
    two = reader.text[reader.pos:reader.pos + 2]
    if two in _TWO_LETTER:
        reader.pos += 2
        return _Prim("elem", (two, False))
    if ch == "*":
        reader.take()
        return _Prim("any")
    if ch == "A":
        reader.take()
        return _Prim("aliphatic")
    if ch == "a":
        reader.take()
        return _Prim("aromatic")
    if ch in "BCNOPSFI":
        reader.take()
        return _Prim("elem", (ch, False))
    if ch in "bcnops":
        reader.take()
        return _Prim("elem", (_AROMATIC_SHORT[ch], True))
    raise SmartsError(f"unexpected atom character {ch!r}", reader.pos)


def _parse_expr(reader: _Reader):
    groups = [_parse_or(reader)]
    while reader.peek() == ";":
        reader.take()
        groups.append(_parse_or(reader))
    return groups[0] if len(groups) == 1 else _And(tuple(groups))


def _parse_or(reader: _Reader):
    terms = [_parse_and(reader)]
    while reader.peek() == ",":
        reader.take()
        terms.append(_parse_and(reader))
    return terms[0] if len(terms) == 1 else _Or(tuple(terms))


def _parse_and(reader: _Reader):
    factors = [_parse_factor(reader)]
    while True:
        ch = reader.peek()
        if ch == "&":
            reader.take()
            factors.append(_parse_factor(reader))
        elif ch and ch not in ",;]()":
            factors.append(_parse_factor(reader))
        else:
            break
    return factors[0] if len(factors) == 1 else _And(tuple(factors))


def _parse_factor(reader: _Reader):
    ch = reader.peek()
    if ch == "!":
        reader.take()
        return _Not(_parse_factor(reader))
    if ch == "$":
        reader.take()
        if reader.peek() != "(":
            raise SmartsError("'$' requires '('", reader.pos)
        reader.take()
        sub = Pattern(source="$recursive")
        _parse_chain(reader, sub, stop_at=")")
        if reader.peek() != ")":
            raise SmartsError("unterminated recursive pattern", reader.pos)
        reader.take()
        if not sub.atoms:
            raise SmartsError("empty recursive pattern", reader.pos)
        return _Prim("recursive", sub)
    if ch == "#":
        reader.take()
        num = reader.digits()
        if num is None:
            raise SmartsError("'#' requires digits", reader.pos)
        return _Prim("num", num)
    if ch == "*":
        reader.take()
        return _Prim("any")
    if ch == "A":
        reader.take()
        return _Prim("aliphatic")
    if ch == "a":
        reader.take()
        return _Prim("aromatic")
    if ch in "+-":
        reader.take()
        sign = 1 if ch == "+" else -1
        num = reader.digits()
        if num is None:
            num = 1
            while reader.peek() == ch:
                reader.take()
                num += 1
        return _Prim("charge", sign * num)
    if ch == "H":
        reader.take()
        num = reader.digits()
        return _Prim("hcount", 1 if num is None else num)
    if ch == "X":
        reader.take()
        num = reader.digits()
        return _Prim("connectivity", 1 if num is None else num)
    if ch == "D":
        reader.take()
        num = reader.digits()
        return _Prim("degree", 1 if num is None else num)
    if ch == "v":
        reader.take()
        num = reader.digits()
        return _Prim("valence", 1 if num is None else num)
    if ch == "R":
        reader.take()
        num = reader.digits()
        return _Prim("inring") if num is None else _Prim("ringcount", num)
    if ch == "r":
        reader.take()
        num = reader.digits()
        return _Prim("inring") if num is None else _Prim("ringsize", num)
    two = reader.text[reader.pos:reader.pos + 2]
    if two in _TWO_LETTER:
        reader.pos += 2
        return _Prim("elem", (two, False))
    if two in ("se", "as"):
        reader.pos += 2
        return _Prim("elem", (_AROMATIC_SHORT[two], True))
    if ch.isupper():
        reader.take()
        return _Prim("elem", (ch, False))
    if ch in "bcnops":
        reader.take()
        return _Prim("elem", (_AROMATIC_SHORT[ch], True))
    raise SmartsError(f"unexpected primitive {ch!r}", reader.pos)


# ---------------------------------------------------------------------------
# evaluation

def _atom_valence(g: MolecularGraph, idx: int) -> float:
    total = float(g.atoms[idx].h_count)
    for _, bidx in g.neighbors(idx):
        order = g.bonds[bidx].order
        total += 1.5 if order == AROMATIC else order
    return total


def _eval_atom(expr, g: MolecularGraph, idx: int) -> bool:
    if isinstance(expr, _And):
        return all(_eval_atom(p, g, idx) for p in expr.parts)
    if isinstance(expr, _Or):
        return any(_eval_atom(p, g, idx) for p in expr.parts)
    if isinstance(expr, _Not):
        return not _eval_atom(expr.inner, g, idx)
    atom = g.atoms[idx]
    kind, arg = expr.kind, expr.arg
    if kind == "any":
        return True
    if kind == "aliphatic":
        return not atom.aromatic
    if kind == "aromatic":
        return atom.aromatic
    if kind == "elem":
        symbol, needs_aromatic = arg
        return atom.symbol == symbol and atom.aromatic == needs_aromatic
    if kind == "num":
        return atom.atomic_number == arg
    if kind == "hcount":
        return atom.h_count == arg
    if kind == "connectivity":
        return g.degree(idx) + atom.h_count == arg
    if kind == "degree":
        return g.degree(idx) == arg
    if kind == "valence":
        return _atom_valence(g, idx) == arg
    if kind == "charge":
        return atom.charge == arg
    if kind == "inring":
        return g.in_ring(idx)
    if kind == "ringcount":
        return g.ring_count(idx) == arg
    if kind == "ringsize":
        return arg in g.ring_sizes(idx)
    if kind == "recursive":
        return match_at(arg, g, idx)
    raise AssertionError(f"unknown primitive {kind}")


def _eval_bond(expr, g: MolecularGraph, bond_idx: int) -> bool:
    if expr is None:  # default: single or aromatic
        order = g.bonds[bond_idx].order
        return order in (SINGLE, AROMATIC)
    if isinstance(expr, _And):
        return all(_eval_bond(p, g, bond_idx) for p in expr.parts)
    if isinstance(expr, _Or):
        return any(_eval_bond(p, g, bond_idx) for p in expr.parts)
    if isinstance(expr, _Not):
        return not _eval_bond(expr.inner, g, bond_idx)
    order = g.bonds[bond_idx].order
    kind = expr.kind
    if kind == "single":
        return order == SINGLE
    if kind == "double":
        return order == DOUBLE
    if kind == "triple":
        return order == TRIPLE
    if kind == "aromatic":
        return order == AROMATIC
    if kind == "anybond":
        return True
    if kind == "ringbond":
        return g.bond_in_ring(bond_idx)
    raise AssertionError(f"unknown bond primitive {kind}")


def match_at(pattern: Pattern, g: MolecularGraph, anchor: int) -> bool:
    """True when the pattern matches with its first atom mapped to anchor."""
    if not _eval_atom(pattern.atoms[0].expr, g, anchor):
        return False
    plan = pattern.neighbor_plan()
    mapping: dict[int, int] = {0: anchor}
    used = {anchor}

    def backtrack(step: int) -> bool:
        if step == len(plan):
            return True
        patom, anchor_or_bond, bond_idx = plan[step]
        if patom == -1:
            bond = pattern.bonds[anchor_or_bond]
            ga, gb = mapping[bond.a], mapping[bond.b]
            gbond = g.bond_between(ga, gb)
            if gbond is None:
                return False
            gbidx = next(bi for nbr, bi in g.neighbors(ga) if nbr == gb)
            if not _eval_bond(bond.expr, g, gbidx):
                return False
            return backtrack(step + 1)
        parent = mapping[anchor_or_bond]
        bond_expr = pattern.bonds[bond_idx].expr
        for nbr, gbidx in g.neighbors(parent):
            if nbr in used:
                continue
            if not _eval_bond(bond_expr, g, gbidx):
                continue
            if not _eval_atom(pattern.atoms[patom].expr, g, nbr):
                continue
            mapping[patom] = nbr
            used.add(nbr)
            if backtrack(step + 1):
                used.discard(nbr)
                del mapping[patom]
                return True
            used.discard(nbr)
            del mapping[patom]
        return False

    return backtrack(0)


def has_match(pattern: Pattern, g: MolecularGraph) -> bool:
    return any(match_at(pattern, g, i) for i in range(len(g.atoms)))


def matching_atoms(pattern: Pattern, g: MolecularGraph) -> list[int]:
    """Atoms where the pattern matches anchored at its first pattern atom."""
    return [i for i in range(len(g.atoms)) if match_at(pattern, g, i)]


_COMPILE_CACHE: dict[str, Pattern] = {}


def compile_smarts(text: str) -> Pattern:
    pattern = _COMPILE_CACHE.get(text)
    if pattern is None:
        pattern = parse_smarts(text)
        _COMPILE_CACHE[text] = pattern
    return pattern
