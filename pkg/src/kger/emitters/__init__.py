"""Compilers from KG-ER schemas to other schema formalisms."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core import (Cover, Diagnostic, Disjoint, Identity, Isa, Key, MandatoryAttr,
                    MandatoryRole, Schema, SingleAttr, SingleRole)
from ..patterns import AttrLeaf, RoleNode


@dataclass
class EmitterOutput:
    artifact: str
    unexpressed: list = field(default_factory=list)
    # statements the artifact encodes; used by coverage audits
    expressed: list = field(default_factory=list)


class Coverage:
    """Tracks, per constraint statement, whether the target encodes it."""

    def __init__(self):
        self.expressed: list[str] = []
        self.unexpressed: list[Diagnostic] = []

    def ok(self, stmt) -> None:
        if str(stmt) not in self.expressed:
            self.expressed.append(str(stmt))

    def gap(self, stmt, reason: str) -> None:
        if all(d.subject != str(stmt) for d in self.unexpressed):
            self.unexpressed.append(Diagnostic("UNEXPRESSED", str(stmt), reason, severity="warning"))

    def output(self, artifact: str) -> EmitterOutput:
        gaps = {d.subject for d in self.unexpressed}
        return EmitterOutput(artifact, list(self.unexpressed),
                             [s for s in self.expressed if s not in gaps])


HIERARCHY = (Isa, Disjoint, Cover)


def hierarchy_gaps(schema: Schema, cov: Coverage) -> None:
    for s in schema.of_kind(*HIERARCHY):
        cov.gap(s, "type hierarchies are not translated; entities are emitted flat")


def identity_attrs(schema: Schema, owner: str) -> set:
    """Local attributes used as top-level identity patterns of ``owner``.

    Such attributes hold exactly one value for every instance.
    """
    return {p.name for s in schema.of_kind(Identity) if s.owner == owner
            for p in s.patterns if isinstance(p, AttrLeaf) and schema.owner_of_attr.get(p.name) == owner}


def is_single(schema: Schema, owner: str, attr: str) -> bool:
    return SingleAttr(owner, attr) in schema.constraints or attr in identity_attrs(schema, owner)


def is_mandatory(schema: Schema, owner: str, attr: str) -> bool:
    return MandatoryAttr(owner, attr) in schema.constraints or attr in identity_attrs(schema, owner)


def role_bounds(schema: Schema, entity: str, role: str, rel: str) -> tuple:
    """(min, max) participation of ``entity`` through ``role``; max None is unbounded."""
    lo = 1 if MandatoryRole(entity, role, rel) in schema.constraints else 0
    hi = 1 if SingleRole(entity, role, rel) in schema.constraints else None
    return lo, hi


def attr_bounds(schema: Schema, owner: str, attr: str) -> tuple:
    return (1 if is_mandatory(schema, owner, attr) else 0,
            1 if is_single(schema, owner, attr) else None)


def other_role(schema: Schema, rel: str, role: str):
    roles = schema.roles_of(rel)
    if len(roles) != 2 or role not in roles:
        return None
    return roles[1] if roles[0] == role else roles[0]


def identifying_relationships(schema: Schema) -> dict:
    """Binary relationships without attributes that identify a dependent entity.

    Maps relationship -> (dependent entity, its role, the other role). The
    dependent must participate exactly once and use the role in an identity key.
    """
    out = {}
    for s in schema.of_kind(Identity):
        X = s.owner
        if not schema.is_entity(X):
            continue
        for p in s.patterns:
            if not isinstance(p, RoleNode) or p.name not in schema.owner_of_role:
                continue
            rel, ent = schema.owner_of_role[p.name]
            other = other_role(schema, rel, p.name)
            if (ent == X and other is not None and rel not in out
                    and not schema.attrs_of(rel)
                    and role_bounds(schema, X, p.name, rel) == (1, 1)):
                out[rel] = (X, p.name, other)
    return out


def cap(name: str) -> str:
    return name[:1].upper() + name[1:]


def lower_first(name: str) -> str:
    return name[:1].lower() + name[1:]


def constraint_kinds():
    return (MandatoryAttr, SingleAttr, MandatoryRole, SingleRole, Key, Identity) + HIERARCHY


from .dot import emit_dot  # noqa: E402
from .pgschema import emit_pgschema  # noqa: E402
from .shacl import emit_shacl, emit_shex  # noqa: E402
from .sql import emit_sql  # noqa: E402
from .verbalize import parse_verbalization, verbalize  # noqa: E402

TARGETS = {
    "sql": emit_sql,
    "shacl": emit_shacl,
    "shex": emit_shex,
    "pgschema": emit_pgschema,
}
