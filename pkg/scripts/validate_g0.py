"""Validate the bundled fixture graph and a few seeded violations of it.

    python3 scripts/validate_g0.py
"""
from importlib.resources import files

from kger import Value, load_graph, parse_schema
from kger.validator import validate_core

data = files("kger").joinpath("data")
schema = parse_schema(data.joinpath("running_example.kger").read_text())
g0 = load_graph(data.joinpath("g0.json").read_text(), schema)

variants = {
    "G0": g0,
    "duplicate person": g0.replace(
        entity_membership={**g0.entity_membership, "pC": {"Person"}},
        attr_facts=g0.attr_facts | {("pC", "fname", Value.of("Ada")), ("pC", "lname", Value.of("Lovelace"))}),
    "missing date": g0.replace(attr_facts=g0.attr_facts - {("m1", "date", Value.of("2024-01-01"))}),
    "second author": g0.replace(role_facts=g0.role_facts | {("w1", "author", "pB")}),
}
for name, graph in variants.items():
    print(f"== {name}")
    print(validate_core(schema, graph).render())
