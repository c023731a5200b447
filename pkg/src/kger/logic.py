"""First-order formulas over a knowledge graph and a brute-force model checker.

The checker enumerates assignments over the active domain of the graph. It is
exponential in the number of variables and exists as a test reference for the
specialised evaluators in ``patterns`` and ``validator``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .core import Diagnostic, KgerError, KnowledgeGraph, sort_key


@dataclass(frozen=True)
class Atom:
    """Binary atom ``pred(left, right)`` for attributes and roles."""
    pred: str
    left: str
    right: str

    def render(self):
        return f"{self.pred}({self.left}, {self.right})"


@dataclass(frozen=True)
class ClassAtom:
    """Unary atom ``E(x)`` or ``R(x)``."""
    pred: str
    var: str

    def render(self):
        return f"{self.pred}({self.var})"


@dataclass(frozen=True)
class Eq:
    left: str
    right: str

    def render(self):
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class And:
    parts: tuple

    def render(self):
        if not self.parts:
            return "true"
        return " ∧ ".join(_wrap(p) for p in self.parts)


@dataclass(frozen=True)
class Or:
    parts: tuple

    def render(self):
        if not self.parts:
            return "false"
        return " ∨ ".join(_wrap(p) for p in self.parts)


@dataclass(frozen=True)
class Implies:
    premise: object
    conclusion: object

    def render(self):
        return f"{_wrap(self.premise)} ⇒ {_wrap(self.conclusion)}"


@dataclass(frozen=True)
class Exists:
    vars: tuple
    body: object

    def render(self):
        return f"∃{', '.join(self.vars)}. {_wrap(self.body)}"


@dataclass(frozen=True)
class Forall:
    vars: tuple
    body: object

    def render(self):
        return f"∀{', '.join(self.vars)}. {self.body.render()}"


TRUE = And(())
FALSE = Or(())

Formula = Union[Atom, ClassAtom, Eq, And, Or, Implies, Exists, Forall]


def _wrap(f) -> str:
    if isinstance(f, (Atom, ClassAtom, Eq)) or f in (TRUE, FALSE):
        return f.render()
    if isinstance(f, (And, Or)) and len(f.parts) == 1:
        return _wrap(f.parts[0])
    return f"({f.render()})"


def conj(*parts) -> Formula:
    flat = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, And) else [p])
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def exists(vars: Iterable[str], body) -> Formula:
    vars = tuple(vars)
    return Exists(vars, body) if vars else body


def forall(vars: Iterable[str], body) -> Formula:
    vars = tuple(vars)
    return Forall(vars, body) if vars else body


def free_vars(f) -> frozenset:
    if isinstance(f, Atom):
        return frozenset({f.left, f.right})
    if isinstance(f, ClassAtom):
        return frozenset({f.var})
    if isinstance(f, Eq):
        return frozenset({f.left, f.right})
    if isinstance(f, (And, Or)):
        return frozenset().union(*(free_vars(p) for p in f.parts))
    if isinstance(f, Implies):
        return free_vars(f.premise) | free_vars(f.conclusion)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - set(f.vars)
    raise _unsupported(f)


def _unsupported(f) -> KgerError:
    return KgerError([Diagnostic("UNSUPPORTED-FORMULA", type(f).__name__,
                                 "formula outside the supported fragment")])


class _Model:
    def __init__(self, graph: KnowledgeGraph):
        self.graph = graph
        self.binary = {(i, a, v) for i, a, v in graph.attr_facts}
        self.binary |= {(r, b, e) for r, b, e in graph.role_facts}
        self.domain = sorted(graph.domain(), key=sort_key)

    def holds(self, f, env: Mapping[str, object]) -> bool:
        if isinstance(f, Atom):
            return (env[f.left], f.pred, env[f.right]) in self.binary
        if isinstance(f, ClassAtom):
            return f.pred in self.graph.types_of(env[f.var])
        if isinstance(f, Eq):
            return env[f.left] == env[f.right]
        if isinstance(f, And):
            return all(self.holds(p, env) for p in f.parts)
        if isinstance(f, Or):
            return any(self.holds(p, env) for p in f.parts)
        if isinstance(f, Implies):
            return not self.holds(f.premise, env) or self.holds(f.conclusion, env)
        if isinstance(f, Exists):
            return any(self.holds(f.body, {**env, **dict(zip(f.vars, vals))})
                       for vals in itertools.product(self.domain, repeat=len(f.vars)))
        if isinstance(f, Forall):
            return all(self.holds(f.body, {**env, **dict(zip(f.vars, vals))})
                       for vals in itertools.product(self.domain, repeat=len(f.vars)))
        raise _unsupported(f)


def eval_formula(graph: KnowledgeGraph, f, binding: Mapping[str, object] | None = None) -> list[dict]:
    """All total assignments of the free variables of ``f`` that extend ``binding``
    and satisfy ``f`` in ``graph``. A closed formula yields ``[binding]`` or ``[]``."""
    binding = dict(binding or {})
    model = _Model(graph)
    open_vars = sorted(free_vars(f) - binding.keys())
    out = []
    for vals in itertools.product(model.domain, repeat=len(open_vars)):
        env = {**binding, **dict(zip(open_vars, vals))}
        if model.holds(f, env):
            out.append(env)
    return out


def holds(graph: KnowledgeGraph, f) -> bool:
    """Truth of a closed formula."""
    return bool(eval_formula(graph, f))
