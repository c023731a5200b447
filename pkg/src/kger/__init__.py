"""KG-ER: conceptual schemas for knowledge graphs.

Parsing, well-formedness checking, tree-pattern evaluation, graph validation
and translation to SQL, SHACL, ShEx, PG-Schema, DOT and English.
"""
from .core import (Attribute, Cover, Diagnostic, Disjoint, Entity, Identity, Isa, Key,
                   KgerError, KnowledgeGraph, MandatoryAttr, MandatoryRole, Relationship,
                   Role, Schema, SchemaError, SingleAttr, SingleRole, Value, ancestors_of,
                   build_schema, roots_of)
from .emitters import (EmitterOutput, emit_dot, emit_pgschema, emit_shacl, emit_shex,
                       emit_sql, parse_verbalization, verbalize)
from .logic import eval_formula, holds
from .patterns import (AttrLeaf, RoleLeaf, RoleNode, eval_pattern, is_ground, is_rooted_at,
                       pattern_arity, translate_pattern)
from .textformat import (ParseError, SchemaSyntaxError, dump_graph, load_graph, parse_pattern,
                         parse_schema, serialize_schema)
from .validator import (ValidationReport, check_data_model, validate, validate_core,
                        validate_implicit_disjointness)
from .wellformed import check_well_formed, is_well_formed

__all__ = [name for name in dir() if not name.startswith("_")]
