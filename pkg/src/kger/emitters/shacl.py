"""KG-ER to SHACL core (Turtle) and ShEx (compact syntax).

Both targets share one RDF reading of a knowledge graph: instances are typed
with ``ex:<Name>``, attribute values are literals reached by ``ex:<attr>``, and
relationship instances point to their participants by ``ex:<role>``. A binary
relationship that identifies a weak entity is flattened into a direct property
from the dependent entity to its parent.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core import (Cover, Disjoint, Identity, Isa, Key, MandatoryAttr, MandatoryRole,
                    Schema, SingleAttr, SingleRole)
from ..patterns import AttrLeaf
from . import Coverage, EmitterOutput, attr_bounds, cap, identifying_relationships, role_bounds

EX = "http://example.org/"


@dataclass
class Prop:
    path: str
    inverse: bool = False
    datatype: bool = False
    cls: str = ""    # sh:class / @<cls>Shape
    node: str = ""   # sh:node / @<node>
    min: int = 0
    max: int | None = None
    note: str = ""


@dataclass
class Shape:
    name: str
    target: str
    comment: str
    props: list = field(default_factory=list)

    def prop(self, path, inverse=False) -> Prop | None:
        return next((p for p in self.props if p.path == path and p.inverse == inverse), None)


@dataclass
class _Model:
    shapes: list
    key_shapes: list          # (shape name, attribute)
    key_stmts: list           # keys realised by key_shapes
    flattened: dict
    cov: Coverage


def rel_shape_name(rel: str) -> str:
    return f"{cap(rel)}RelShape"


def _model(schema: Schema, target: str = "SHACL core") -> _Model:
    s, cov = schema, Coverage()
    flat = identifying_relationships(s)
    shapes: dict[str, Shape] = {}

    for X in s.entities:
        shapes[X] = Shape(f"{X}Shape", X, f"Entity: {X}")
    for R in s.relationships:
        if R in flat:
            continue
        shapes[R] = Shape(rel_shape_name(R), R, f"Relationship: {R}")

    def attr_prop(owner, a):
        sh = shapes[owner]
        if sh.prop(a) is None:
            lo, hi = attr_bounds(s, owner, a)
            sh.props.append(Prop(a, datatype=True, min=lo, max=hi))

    def role_prop(entity, role, rel):
        sh = shapes[entity]
        lo, hi = role_bounds(s, entity, role, rel)
        if rel in flat:
            dep, own, parent_role = flat[rel]
            if role == own:
                if sh.prop(parent_role) is None:
                    sh.props.append(Prop(parent_role, cls=s.role_entity(parent_role), min=1, max=1,
                                         note=f"derived from identifying relationship {rel}"))
                return
            if sh.prop(role, inverse=True) is None:
                sh.props.append(Prop(role, inverse=True, node=f"{dep}Shape", min=lo, max=hi,
                                     note=f"{rel} instances"))
            return
        if sh.prop(role, inverse=True) is None:
            sh.props.append(Prop(role, inverse=True, node=rel_shape_name(rel), min=lo, max=hi,
                                 note=f"{rel} instances"))

    for X in s.entities:
        for a in s.attrs_of(X):
            attr_prop(X, a)
        for rel, role in s.participations(X):
            role_prop(X, role, rel)
    for R in s.relationships:
        if R in flat:
            continue
        for a in s.attrs_of(R):
            attr_prop(R, a)
        idents = {p.name for c in s.of_kind(Identity) if c.owner == R for p in c.patterns}
        for b in s.roles_of(R):
            shapes[R].props.append(Prop(b, cls=s.role_entity(b), min=1 if b in idents else 0, max=1))

    key_shapes, key_stmts = [], []
    for c in s.constraints:
        if isinstance(c, (Isa, Disjoint, Cover)):
            cov.gap(c, "type hierarchies are not translated; entities are emitted flat")
        elif isinstance(c, (MandatoryAttr, SingleAttr)):
            if c.owner in shapes and c.attribute in s.owner_of_attr:
                attr_prop(c.owner, c.attribute)
                cov.ok(c)
            else:
                cov.gap(c, "owner is not mapped to a node shape")
        elif isinstance(c, (MandatoryRole, SingleRole)):
            if c.entity in shapes and c.role in s.owner_of_role and s.is_entity(c.entity):
                role_prop(c.entity, c.role, c.relationship)
                cov.ok(c)
            else:
                cov.gap(c, "entity is not mapped to a node shape")
        elif isinstance(c, (Key, Identity)):
            p = c.patterns[0]
            if len(c.patterns) == 1 and isinstance(p, AttrLeaf) and s.owner_of_attr.get(p.name) == c.owner:
                # attribute names are global, so every subject of ex:a is an owner instance
                if p.name not in [a for _, a in key_shapes]:
                    key_shapes.append((f"{cap(p.name)}TargetShape", p.name))
                key_stmts.append(c)
                cov.ok(c)
            elif len(c.patterns) > 1:
                cov.gap(c, f"cannot express composite unique keys in {target}")
            else:
                cov.gap(c, f"cannot express keys over navigation patterns in {target}")
    return _Model(list(shapes.values()), key_shapes, key_stmts, flat, cov)


# ---------------------------------------------------------------------------
# SHACL

def _shacl_prop(p: Prop) -> list[str]:
    path = f"[ sh:inversePath ex:{p.path} ]" if p.inverse else f"ex:{p.path}"
    out = [f"        sh:path {path} ;"]
    if p.datatype:
        out.append("        sh:datatype xsd:string ;")
    if p.cls:
        out.append(f"        sh:class ex:{p.cls} ;")
    if p.node:
        out.append(f"        sh:node ex:{p.node} ;")
    out.append(f"        sh:minCount {p.min} ;")
    if p.max is not None:
        out.append(f"        sh:maxCount {p.max} ;")
    return out


def _banner(text: str) -> str:
    return f"# {'-' * 60}\n# {text}\n# {'-' * 60}"


def emit_shacl(schema: Schema) -> EmitterOutput:
    m = _model(schema)
    blocks = ["@prefix sh: <http://www.w3.org/ns/shacl#> .\n"
              "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n"
              f"@prefix ex: <{EX}> ."]
    for sh in m.shapes:
        lines = [_banner(sh.comment), f"ex:{sh.name}", "    a sh:NodeShape ;",
                 f"    sh:targetClass ex:{sh.target}"]
        for p in sh.props:
            lines[-1] += " ;"
            lines += ["    sh:property ["] + _shacl_prop(p) + ["    ]"]
        lines[-1] += " ."
        blocks.append("\n".join(lines))
    for name, attr in m.key_shapes:
        blocks.append("\n".join([
            _banner(f"Unicity of {attr} values"), f"ex:{name}", "    a sh:NodeShape ;",
            f"    sh:targetObjectsOf ex:{attr} ;", "    sh:property [",
            f"        sh:path [ sh:inversePath ex:{attr} ] ;", "        sh:maxCount 1 ;", "    ] ."]))
    if m.cov.unexpressed:
        blocks.append("\n".join(f"# UNEXPRESSED: {d.subject}: {d.message}" for d in m.cov.unexpressed))
    return m.cov.output("\n\n".join(blocks) + "\n")


# ---------------------------------------------------------------------------
# ShEx

CARD = {(1, 1): "", (0, 1): "?", (1, None): "+", (0, None): "*"}


def _shex_prop(p: Prop) -> str:
    path = f"^ex:{p.path}" if p.inverse else f"ex:{p.path}"
    if p.datatype:
        value = "xsd:string"
    elif p.cls:
        value = f"@ex:{p.cls}Shape"
    else:
        value = f"@ex:{p.node}"
    return f"{path} {value}{CARD[(min(p.min, 1), p.max)]}"


def emit_shex(schema: Schema) -> EmitterOutput:
    m = _model(schema, "ShEx")
    cov = Coverage()
    keys = {str(k) for k in m.key_stmts}
    cov.expressed = [e for e in m.cov.expressed if e not in keys]
    for c in schema.constraints:
        if isinstance(c, (Key, Identity)):
            cov.gap(c, "ShEx has no unique key constraints")
    cov.unexpressed += [d for d in m.cov.unexpressed if d.subject not in {u.subject for u in cov.unexpressed}]
    blocks = [f"PREFIX ex: <{EX}>\nPREFIX xsd: <http://www.w3.org/2001/XMLSchema#>"]
    for sh in m.shapes:
        body = " ;\n".join(f"  {_shex_prop(p)}" for p in sh.props)
        blocks.append(_banner(sh.comment) + f"\nex:{sh.name} {{\n" + (body + "\n" if body else "") + "}")
    if cov.unexpressed:
        blocks.append("\n".join(f"# UNEXPRESSED: {d.subject}: {d.message}" for d in cov.unexpressed))
    return cov.output("\n\n".join(blocks) + "\n")
