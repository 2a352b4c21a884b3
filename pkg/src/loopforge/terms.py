"""Loop terms, equations, and the propagation check.

An equation E(x1..xn) propagates in a loop L when every tuple satisfying E
generates a subloop on which E holds for all n-tuples.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

from .loopcore import FiniteLoop, LoopError, SizeLimitError, _close_mask

# Refuse |L|^n above this many tuple evaluations. Override with LOOPFORGE_BUDGET.
BUDGET = int(os.environ.get("LOOPFORGE_BUDGET", str(10 ** 8)))
_CHUNK = 1 << 18

VAR_NAMES = "xyzuvw"


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class LDiv:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class RDiv:
    left: "Term"
    right: "Term"


Term = Union[Var, Identity, Mul, LDiv, RDiv]
_OPS = {Mul: "*", LDiv: "\\", RDiv: "/"}
_NODES = {"*": Mul, "\\": LDiv, "/": RDiv}


def max_var(t: Term) -> int:
    if isinstance(t, Var):
        return t.index
    if isinstance(t, Identity):
        return -1
    return max(max_var(t.left), max_var(t.right))


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term
    nvars: int
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.nvars < max(max_var(self.lhs), max_var(self.rhs)) + 1:
            raise LoopError("equation uses more variables than nvars")

    def __str__(self) -> str:
        return format_equation(self)


def format_term(t: Term, top: bool = True) -> str:
    if isinstance(t, Var):
        return VAR_NAMES[t.index] if t.index < len(VAR_NAMES) else f"x{t.index}"
    if isinstance(t, Identity):
        return "e"
    s = f"{format_term(t.left, False)}{_OPS[type(t)]}{format_term(t.right, False)}"
    return s if top else f"({s})"


def format_equation(E: Equation) -> str:
    return f"{format_term(E.lhs)} = {format_term(E.rhs)}"


# -- parsing ------------------------------------------------------------------

class ParseError(LoopError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.vars: dict[str, int] = {}

    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _take(self, ch: str) -> None:
        if self._peek() != ch:
            raise ParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def operand(self) -> Term:
        c = self._peek()
        if c == "(":
            self.pos += 1
            t = self.binary()
            self._take(")")
            return t
        if c == "e":
            self.pos += 1
            return Identity()
        if c and c in VAR_NAMES:
            self.pos += 1
            return Var(self.vars.setdefault(c, len(self.vars)))
        raise ParseError(f"unexpected {c!r}" if c else "unexpected end of input", self.pos)

    def binary(self) -> Term:
        left = self.operand()
        op = self._peek()
        if op not in _NODES:
            raise ParseError("expected an operator", self.pos)
        self.pos += 1
        return _NODES[op](left, self.operand())

    def side(self) -> Term:
        left = self.operand()
        op = self._peek()
        if op in _NODES:
            self.pos += 1
            return _NODES[op](left, self.operand())
        return left


def parse_equation(text: str, name: str | None = None) -> Equation:
    """Parse ``"x*(y*z) = (x*y)*z"``-style text.

    Variables are x, y, z, u, v, w, numbered by first appearance; ``e`` is the
    identity. Every binary application needs parentheses except one at the
    top of each side.
    """
    p = _Parser(text)
    lhs = p.side()
    p._take("=")
    rhs = p.side()
    p._skip()
    if p.pos != len(text):
        raise ParseError("trailing input", p.pos)
    return Equation(lhs, rhs, max(len(p.vars), 1), name=name)


BUILTIN_EQUATIONS = {
    "assoc": "x*(y*z) = (x*y)*z",
    "comm": "x*y = y*x",
    "cube": "(x*x)*x = e",
    "steiner": "x*(x*y) = y",
    "moufang": "((x*y)*x)*z = x*(y*(x*z))",
    "rajah": "(x*z)*(((x*y)*z)*(y*z)) = ((x*z)*((x*y)*z))*(y*z)",
}


def builtin_equation(name: str) -> Equation:
    try:
        return parse_equation(BUILTIN_EQUATIONS[name], name=name)
    except KeyError:
        raise LoopError(f"unknown equation {name!r}; known: {', '.join(BUILTIN_EQUATIONS)}") from None


def equation_from_text(text: str) -> Equation:
    """A builtin name or equation text."""
    return builtin_equation(text) if text in BUILTIN_EQUATIONS else parse_equation(text)


# -- evaluation ---------------------------------------------------------------

def eval_term(t: Term, L: FiniteLoop, assignment: Sequence[int]) -> int:
    if isinstance(t, Var):
        if t.index >= len(assignment):
            raise LoopError(f"unbound variable {format_term(t)}")
        return int(assignment[t.index])
    if isinstance(t, Identity):
        return 0
    a = eval_term(t.left, L, assignment)
    b = eval_term(t.right, L, assignment)
    if isinstance(t, Mul):
        return L.mul(a, b)
    if isinstance(t, LDiv):
        return L.ldiv(a, b)
    return L.rdiv(a, b)


def _eval_columns(t: Term, L: FiniteLoop, cols: Sequence[np.ndarray]) -> np.ndarray:
    if isinstance(t, Var):
        return cols[t.index]
    if isinstance(t, Identity):
        return np.zeros_like(cols[0])
    a = _eval_columns(t.left, L, cols)
    b = _eval_columns(t.right, L, cols)
    if isinstance(t, Mul):
        return L.table[a, b]
    if isinstance(t, LDiv):
        return L.ldiv_table[a, b]
    return L.rdiv_table[a, b]


def _tuple_blocks(elements: np.ndarray, n: int) -> Iterator[np.ndarray]:
    """All n-tuples over ``elements`` in lexicographic order, as (k, n) blocks."""
    m = len(elements)
    total = m ** n
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        digits = np.empty((len(idx), n), dtype=np.int64)
        for j in range(n - 1, -1, -1):
            digits[:, j] = idx % m
            idx = idx // m
        yield elements[digits]


def _check_budget(m: int, n: int, budget: int | None) -> None:
    budget = BUDGET if budget is None else budget
    if m ** n > budget:
        raise SizeLimitError(f"{m}^{n} tuples exceed the evaluation budget {budget}")


def _satisfied(E: Equation, L: FiniteLoop, block: np.ndarray) -> np.ndarray:
    cols = [block[:, j] for j in range(E.nvars)]
    return _eval_columns(E.lhs, L, cols) == _eval_columns(E.rhs, L, cols)


def satisfying_tuples(E: Equation, L: FiniteLoop, budget: int | None = None) -> Iterator[tuple[int, ...]]:
    _check_budget(L.order, E.nvars, budget)
    for block in _tuple_blocks(np.arange(L.order), E.nvars):
        for row in block[_satisfied(E, L, block)]:
            yield tuple(int(v) for v in row)


def first_violation(E: Equation, L: FiniteLoop, elements=None,
                    budget: int | None = None) -> tuple[int, ...] | None:
    """Lexicographically first tuple over ``elements`` violating E, if any."""
    els = np.arange(L.order) if elements is None else np.asarray(sorted(elements))
    _check_budget(len(els), E.nvars, budget)
    for block in _tuple_blocks(els, E.nvars):
        bad = np.flatnonzero(~_satisfied(E, L, block))
        if bad.size:
            return tuple(int(v) for v in block[bad[0]])
    return None


def holds(E: Equation, L: FiniteLoop, budget: int | None = None) -> bool:
    return first_violation(E, L, budget=budget) is None


# -- propagation -------------------------------------------------------------

@dataclass(frozen=True)
class PropagationReport:
    result: bool
    witness: tuple[int, ...] | None = None
    failure: tuple[int, ...] | None = None
    subloop_size: int | None = None
    satisfying: int = 0
    subloops_checked: int = 0


def propagates(E: Equation, L: FiniteLoop, budget: int | None = None) -> PropagationReport:
    """Decide whether E propagates in L.

    Satisfying tuples are scanned in lexicographic order and the first one
    generating a subloop on which E fails is reported, together with the first
    violating tuple inside that subloop. Holding on a subloop passes down to
    its subsets, so a tuple contained in an already verified subloop is
    skipped without computing its closure.
    """
    n = E.nvars
    _check_budget(L.order, n, budget)
    good = np.zeros((0, L.order), dtype=bool)  # verified subloops, one mask per row
    satisfying = 0
    for block in _tuple_blocks(np.arange(L.order), n):
        sat = block[_satisfied(E, L, block)]
        satisfying += len(sat)
        if len(good) and len(sat):
            inside = good[:, sat[:, 0]]
            for j in range(1, n):
                inside &= good[:, sat[:, j]]
            sat = sat[~inside.any(axis=0)]
        alive = np.ones(len(sat), dtype=bool)
        i = 0
        while True:
            ahead = np.flatnonzero(alive[i:])
            if not ahead.size:
                break
            i += int(ahead[0])
            x = sat[i]
            mask = _close_mask(L.table, _gen_mask(L.order, x))
            els = np.flatnonzero(mask)
            bad = first_violation(E, L, els, budget=budget)
            if bad is not None:
                return PropagationReport(False, tuple(int(v) for v in x), bad, len(els),
                                         satisfying, len(good) + 1)
            good = np.vstack([good, mask[None, :]])
            alive &= ~mask[sat].all(axis=1)
    return PropagationReport(True, satisfying=satisfying, subloops_checked=len(good))


def _gen_mask(n: int, gens) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    m[list(gens)] = True
    return m
