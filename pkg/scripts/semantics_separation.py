"""Search random (schema, graph) pairs for cases where the core semantics accepts a
graph that implicit disjointness rejects, and print the smallest one found.

    python3 scripts/semantics_separation.py [--trials N] [--seed S]
"""
import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from generators import GraphConfig, SchemaConfig, random_graph, random_schema  # noqa: E402
from kger import dump_graph, serialize_schema  # noqa: E402
from kger.validator import validate_core, validate_implicit_disjointness  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    conforming = separating = 0
    best = None
    for _ in range(args.trials):
        schema = random_schema(rng, SchemaConfig(constraint_probability=0.15))
        graph = random_graph(rng, schema, GraphConfig(extra_type_probability=0.4))
        core = validate_core(schema, graph)
        implicit = validate_implicit_disjointness(schema, graph)
        if implicit.conforms and not core.conforms:
            raise SystemExit("containment violated")
        conforming += core.conforms
        if core.conforms and not implicit.conforms:
            separating += 1
            if best is None or len(schema) + graph.size() < len(best[0]) + best[1].size():
                best = (schema, graph, implicit)
    print(f"{args.trials} pairs: {conforming} conform under core, {separating} rejected only under implicit")
    if best:
        schema, graph, report = best
        print("\nschema:\n" + serialize_schema(schema))
        print("graph:\n" + dump_graph(graph))
        print(report.render())


if __name__ == "__main__":
    main()
