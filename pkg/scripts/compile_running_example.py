"""Compile the bundled running example to every target and report coverage gaps.

    python3 scripts/compile_running_example.py [--out DIR]
"""
import argparse
from importlib.resources import files
from pathlib import Path

from kger import check_well_formed, emit_dot, parse_schema, verbalize
from kger.emitters import TARGETS

SUFFIX = {"sql": "sql", "shacl": "ttl", "shex": "shex", "pgschema": "pgs"}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="build/running_example")
    args = ap.parse_args()

    schema = parse_schema(files("kger").joinpath("data/running_example.kger").read_text())
    assert not check_well_formed(schema)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for target, emit in TARGETS.items():
        result = emit(schema)
        (out / f"schema.{SUFFIX[target]}").write_text(result.artifact)
        print(f"{target:9} expressed={len(result.expressed):2} unexpressed={len(result.unexpressed)}")
        for d in result.unexpressed:
            print(f"          {d.subject}: {d.message}")
    (out / "schema.dot").write_text(emit_dot(schema))
    (out / "schema.txt").write_text(verbalize(schema))
    print(f"wrote {out}/")


if __name__ == "__main__":
    main()
