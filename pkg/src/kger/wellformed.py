"""Well-formedness conditions WF1-WF9 on schemas."""
from __future__ import annotations

from .core import (Attribute, Cover, Diagnostic, Disjoint, Identity, Isa, Key,
                   MandatoryAttr, MandatoryRole, Role, Schema, SingleAttr,
                   SingleRole, ancestors_of, roots_of)
from .patterns import _rooted, is_ground, pattern_names

WF_CODES = ("WF1", "WF2", "WF3", "WF4", "WF5", "WF6", "WF7", "WF8", "WF9")


def _diag(code, stmt, message, *witnesses):
    return Diagnostic(code, str(stmt), message, tuple(witnesses))


def isa_cycles(schema: Schema) -> list[list[str]]:
    """Strongly connected Isa components that contain a cycle (Tarjan)."""
    index, low, on_stack, stack, out = {}, {}, set(), [], []
    names = list(dict.fromkeys([*schema.entities,
                                *(n for s in schema.of_kind(Isa) for n in (s.sub, s.sup))]))

    def visit(v):
        index[v] = low[v] = len(index)
        stack.append(v)
        on_stack.add(v)
        for w in schema.supertypes(v):
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            if len(comp) > 1 or v in schema.supertypes(v):
                out.append(sorted(comp))

    for v in names:
        if v not in index:
            visit(v)
    return sorted(out)


def _declared_attr(schema: Schema, owner: str, attr: str) -> bool:
    if Attribute(owner, attr) in schema.shape:
        return True
    if schema.is_entity(owner):
        return schema.owner_of_attr.get(attr) in ancestors_of(schema, owner)
    return False


def _declared_role(schema: Schema, entity: str, role: str, rel: str) -> bool:
    if Role(rel, role, entity) in schema.shape:
        return True
    if schema.is_entity(entity) and schema.owner_of_role.get(role, (None,))[0] == rel:
        return schema.role_entity(role) in ancestors_of(schema, entity)
    return False


def check_well_formed(schema: Schema) -> list[Diagnostic]:
    """All violated well-formedness conditions, in statement order within each code."""
    out: list[Diagnostic] = []
    entities, rels = set(schema.entities), set(schema.relationships)

    # WF1: shape statements only use declared entities and relationships
    for s in schema.shape:
        if isinstance(s, Attribute) and s.owner not in entities | rels:
            out.append(_diag("WF1", s, f"{s.owner!r} is not a declared entity or relationship", s.owner))
        elif isinstance(s, Role):
            if s.relationship not in rels:
                out.append(_diag("WF1", s, f"{s.relationship!r} is not a declared relationship", s.relationship))
            if s.entity not in entities:
                out.append(_diag("WF1", s, f"{s.entity!r} is not a declared entity", s.entity))
    for s in schema.constraints:
        if isinstance(s, (Isa, Disjoint, Cover)):
            named = ([s.sub, s.sup] if isinstance(s, Isa) else
                     [s.first, s.second] if isinstance(s, Disjoint) else
                     [*sorted(s.members), s.entity])
            for n in named:
                if n not in entities:
                    out.append(_diag("WF1", s, f"{n!r} is not a declared entity", n))

    # WF2: participation constraints refer to declared attributes / roles
    for s in schema.constraints:
        if isinstance(s, (MandatoryAttr, SingleAttr)) and not _declared_attr(schema, s.owner, s.attribute):
            out.append(_diag("WF2", s, f"no Attribute({s.owner}, {s.attribute}) in the shape graph"))
        elif isinstance(s, (MandatoryRole, SingleRole)) and not _declared_role(schema, s.entity, s.role, s.relationship):
            out.append(_diag("WF2", s, f"no Role({s.relationship}, {s.role}, {s.entity}) in the shape graph"))

    # WF3: identity keys use ground patterns only
    for s in schema.of_kind(Identity):
        for p in s.patterns:
            if not is_ground(p):
                out.append(_diag("WF3", s, f"identity pattern {p} is not ground", str(p)))

    # WF4: every relationship has an identity key
    identified = {s.owner for s in schema.of_kind(Identity)}
    for r in schema.relationships:
        if r not in identified:
            out.append(_diag("WF4", f"Relationship({r})", f"relationship {r!r} has no Identity constraint", r))

    # WF5: the Isa hierarchy is acyclic
    cycles = isa_cycles(schema)
    for comp in cycles:
        out.append(_diag("WF5", "Isa", "Isa cycle through " + ", ".join(comp), *comp))

    # WF6: roots of the hierarchy carry a directly declared identity key
    for e in schema.entities:
        if e in roots_of(schema) and e not in identified:
            out.append(_diag("WF6", f"Entity({e})", f"root entity {e!r} has no Identity constraint", e))

    # WF7: explicit disjointness only between entities with a common ancestor
    for s in schema.of_kind(Disjoint):
        if s.first in entities and s.second in entities:
            if not ancestors_of(schema, s.first) & ancestors_of(schema, s.second):
                out.append(_diag("WF7", s, f"{s.first!r} and {s.second!r} have no common Isa-ancestor",
                                 s.first, s.second))

    # WF8: cover members are proper Isa-descendants of the covered entity
    for s in schema.of_kind(Cover):
        for m in sorted(s.members):
            if m in entities and s.entity in entities:
                if m == s.entity or s.entity not in ancestors_of(schema, m):
                    out.append(_diag("WF8", s, f"{m!r} is not a descendant of {s.entity!r}", m))

    # WF9: key patterns are rooted at their subject
    for s in schema.of_kind(Key, Identity):
        if s.owner not in entities | rels:
            out.append(_diag("WF9", s, f"{s.owner!r} is not a declared entity or relationship", s.owner))
            continue
        for p in s.patterns:
            known = all(n in schema.owner_of_attr or n in schema.owner_of_role for n in pattern_names(p))
            if not known or not _rooted(schema, p, s.owner):
                out.append(_diag("WF9", s, f"pattern {p} is not rooted at {s.owner}", str(p)))
    return out


def is_well_formed(schema: Schema) -> bool:
    return not check_well_formed(schema)
