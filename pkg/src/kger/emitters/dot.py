"""Graphviz rendering of the shape graph plus Isa edges."""
from __future__ import annotations

from ..core import Isa, Schema


def _q(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(schema: Schema) -> str:
    """Entities are boxes, attributes ellipses, relationships hexagons.

    Attribute nodes are keyed ``owner.attr`` but labelled with the attribute name.
    Node order follows declaration order, so output is deterministic.
    """
    nodes, edges = [], []
    owners = [*schema.entities, *schema.relationships]
    for E in schema.entities:
        nodes.append(f"  {_q(E)} [shape=box];")
    for R in schema.relationships:
        nodes.append(f"  {_q(R)} [shape=hexagon];")
    for X in owners:
        for a in schema.attrs_of(X):
            node = _q(f"{X}.{a}")
            nodes.append(f"  {node} [shape=ellipse, label={_q(a)}];")
            edges.append(f"  {_q(X)} -> {node} [arrowhead=none];")
    for R in schema.relationships:
        for b in schema.roles_of(R):
            edges.append(f"  {_q(R)} -> {_q(schema.role_entity(b))} [label={_q(b)}];")
    for s in schema.of_kind(Isa):
        edges.append(f"  {_q(s.sub)} -> {_q(s.sup)} [style=dashed];")
    return "digraph schema {\n" + "".join(line + "\n" for line in nodes + edges) + "}\n"
