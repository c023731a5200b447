"""English verbalization of schemas, one sentence per line, and its inverse."""
from __future__ import annotations

import re

from ..core import (Attribute, Cover, Disjoint, Entity, Identity, Isa, Key, MandatoryAttr,
                    MandatoryRole, Relationship, Role, Schema, SingleAttr, SingleRole,
                    build_schema)

PARTICIPATION = {
    (True, True): "exactly one instance",
    (True, False): "one or more instances",
    (False, True): "at most one instance",
    (False, False): "zero or more instances",
}


def _kind(schema: Schema, name: str) -> str:
    return "relationship" if schema.is_relationship(name) else "entity"


def _patterns(patterns) -> str:
    return "[" + ", ".join(map(str, patterns)) + "]"


def _sentence(schema: Schema, s) -> str:
    if isinstance(s, MandatoryAttr):
        return (f"Every instance of the {_kind(schema, s.owner)} '{s.owner}' must have an "
                f"attribute value for '{s.attribute}'.")
    if isinstance(s, SingleAttr):
        return (f"Every instance of the {_kind(schema, s.owner)} '{s.owner}' must have at most "
                f"one attribute value of '{s.attribute}'.")
    if isinstance(s, MandatoryRole):
        return (f"Every instance of the entity '{s.entity}' must participate in an instance of "
                f"the relationship '{s.relationship}' through the role '{s.role}'.")
    if isinstance(s, SingleRole):
        return (f"Every instance of the entity '{s.entity}' can participate in at most one "
                f"instance of the relationship '{s.relationship}' through the role '{s.role}'.")
    if isinstance(s, Key):
        return (f"No two instances of the {_kind(schema, s.owner)} '{s.owner}' may have the same "
                f"key values obtained with {_patterns(s.patterns)}.")
    if isinstance(s, Identity):
        k = _kind(schema, s.owner)
        return (f"Every instance of the {k} '{s.owner}' must have precisely one tuple of key "
                f"values obtained with {_patterns(s.patterns)}, and no two instances of the "
                f"{k} '{s.owner}' may have the same key values.")
    if isinstance(s, Isa):
        return (f"'{s.sub}' is a subclass of '{s.sup}'; in particular, '{s.sub}' inherits all "
                f"attributes, relationships, and constraints of '{s.sup}'.")
    if isinstance(s, Disjoint):
        return (f"No instance of the entity '{s.first}' is an instance of the entity "
                f"'{s.second}' and vice versa.")
    if isinstance(s, Cover):
        members = ", ".join(f"'{m}'" for m in sorted(s.members))
        return f"Any instance of the entity '{s.entity}' is an instance of at least one of {members}."
    raise TypeError(f"no template for {s!r}")


def verbalize(schema: Schema) -> str:
    """Entities with their attributes, then relationships with theirs, then roles
    (fused with their participation constraints), then the remaining constraints."""
    lines = []
    for E in schema.entities:
        lines.append(f"'{E}' is an entity.")
        lines += [f"'{a}' is an attribute of the entity '{E}'." for a in schema.attrs_of(E)]
    for R in schema.relationships:
        # the article is kept as in the reference prompts
        lines.append(f"'{R}' is an relationship.")
        lines += [f"'{a}' is an attribute of the relationship '{R}'." for a in schema.attrs_of(R)]
    fused = set()
    for s in schema.of_kind(Role):
        mand = MandatoryRole(s.entity, s.name, s.relationship)
        single = SingleRole(s.entity, s.name, s.relationship)
        key = (schema.has(mand), schema.has(single))
        fused.update(c for c, on in zip((mand, single), key) if on)
        lines.append(f"Every instance of the entity '{s.entity}' participates in {PARTICIPATION[key]} "
                     f"of the relationship '{s.relationship}' through the role '{s.name}'.")
    # attributes declared on undeclared owners still need a sentence
    for s in schema.of_kind(Attribute):
        if not (schema.is_entity(s.owner) or schema.is_relationship(s.owner)):
            lines.append(f"'{s.name}' is an attribute of the entity '{s.owner}'.")
    for s in schema.constraints:
        if s not in fused:
            lines.append(_sentence(schema, s))
    return "".join(line + "\n" for line in lines)


# ---------------------------------------------------------------------------
# inverse

Q = r"'([A-Za-z_][A-Za-z0-9_]*)'"
KIND = r"(entity|relationship)"

_SHAPE = [
    (re.compile(rf"{Q} is an entity\."), lambda m: Entity(m[1])),
    (re.compile(rf"{Q} is an relationship\."), lambda m: Relationship(m[1])),
    (re.compile(rf"{Q} is an attribute of the {KIND} {Q}\."), lambda m: Attribute(m[3], m[1])),
]
_ROLE = re.compile(rf"Every instance of the entity {Q} participates in "
                   rf"(exactly one instance|one or more instances|at most one instance|zero or more instances) "
                   rf"of the relationship {Q} through the role {Q}\.")
_CONSTRAINT = [
    (re.compile(rf"Every instance of the {KIND} {Q} must have an attribute value for {Q}\."),
     lambda m, P: MandatoryAttr(m[2], m[3])),
    (re.compile(rf"Every instance of the {KIND} {Q} must have at most one attribute value of {Q}\."),
     lambda m, P: SingleAttr(m[2], m[3])),
    (re.compile(rf"Every instance of the entity {Q} must participate in an instance of the "
                rf"relationship {Q} through the role {Q}\."),
     lambda m, P: MandatoryRole(m[1], m[3], m[2])),
    (re.compile(rf"Every instance of the entity {Q} can participate in at most one instance of the "
                rf"relationship {Q} through the role {Q}\."),
     lambda m, P: SingleRole(m[1], m[3], m[2])),
    (re.compile(rf"No two instances of the {KIND} {Q} may have the same key values obtained with "
                r"\[(.*)\]\."),
     lambda m, P: Key(m[2], P(m[3]))),
    (re.compile(rf"Every instance of the {KIND} {Q} must have precisely one tuple of key values "
                rf"obtained with \[(.*)\], and no two instances of the {KIND} {Q} may have the same "
                r"key values\."),
     lambda m, P: Identity(m[2], P(m[3]))),
    (re.compile(rf"{Q} is a subclass of {Q}; in particular, {Q} inherits all attributes, "
                rf"relationships, and constraints of {Q}\."),
     lambda m, P: Isa(m[1], m[2])),
    (re.compile(rf"No instance of the entity {Q} is an instance of the entity {Q} and vice versa\."),
     lambda m, P: Disjoint(m[1], m[2])),
    (re.compile(rf"Any instance of the entity {Q} is an instance of at least one of (.*)\."),
     lambda m, P: Cover(frozenset(re.findall(Q, m[2])), m[1])),
]


def _sentences(text: str) -> list[str]:
    # sentences may be wrapped over several lines; each starts on a fresh line
    # and ends with a period at end of line
    out, cur = [], []
    for line in text.splitlines():
        if not line.strip():
            continue
        cur.append(line.strip())
        if line.rstrip().endswith("."):
            out.append(" ".join(cur))
            cur = []
    if cur:
        out.append(" ".join(cur))
    return out


def parse_verbalization(text: str) -> list:
    """Statements recovered from ``verbalize`` output, in sentence order."""
    from ..textformat import parse_pattern

    sentences = _sentences(text)
    shape, rest = [], []
    for sent in sentences:
        for rx, make in _SHAPE:
            m = rx.fullmatch(sent)
            if m:
                shape.append(make(m))
                break
        else:
            m = _ROLE.fullmatch(sent)
            if m:
                entity, phrase, rel, role = m.groups()
                shape.append(Role(rel, role, entity))
                mand, single = next(k for k, v in PARTICIPATION.items() if v == phrase)
                if mand:
                    rest.append(MandatoryRole(entity, role, rel))
                if single:
                    rest.append(SingleRole(entity, role, rel))
            else:
                rest.append(sent)
    vocab = build_schema(shape)

    def patterns(src):
        return [parse_pattern(p, vocab) for p in _split_top(src)]

    out = list(shape)
    for item in rest:
        if not isinstance(item, str):
            out.append(item)
            continue
        for rx, make in _CONSTRAINT:
            m = rx.fullmatch(item)
            if m:
                out.append(make(m, patterns))
                break
        else:
            raise ValueError(f"unrecognised sentence: {item!r}")
    return out


def _split_top(src: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in src:
        if ch == "," and depth == 0:
            parts.append(cur.strip())
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        parts.append(cur.strip())
    return parts
