"""KG-ER to relational DDL.

Entities become tables keyed by an attribute-only identity, or by the parent
key plus local attributes for weak entities. Multi-valued attributes get their
own tables, and relationships get a table unless they identify a weak entity,
in which case they are absorbed into it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core import (Cover, Disjoint, Identity, Isa, Key, MandatoryAttr, MandatoryRole,
                    Schema, SingleAttr, SingleRole)
from ..patterns import AttrLeaf, RoleLeaf, RoleNode
from . import Coverage, EmitterOutput, cap, is_single, other_role, role_bounds

# DDL keywords and the column type; other names are left as they are
RESERVED = frozenset({
    "text", "create", "table", "primary", "foreign", "key", "references", "unique",
    "not", "null", "constraint", "check", "default", "select", "from", "where",
    "order", "group", "by", "and", "or", "as", "on", "index", "insert", "update",
    "delete", "values", "into", "join", "union", "all", "distinct", "having",
})


@dataclass
class Table:
    name: str
    columns: list = field(default_factory=list)
    not_null: set = field(default_factory=set)
    fks: list = field(default_factory=list)
    pk: list = field(default_factory=list)
    uniques: list = field(default_factory=list)

    def add_unique(self, cols):
        cols = list(cols)
        if cols != self.pk and cols not in self.uniques:
            self.uniques.append(cols)

    def render(self) -> str:
        lines = [f"    {c} text" + (" NOT NULL" if c in self.not_null and c not in self.pk else "")
                 for c in self.columns]
        lines += [f"    FOREIGN KEY ({', '.join(cols)}) REFERENCES {ref}({', '.join(refcols)})"
                  for cols, ref, refcols in self.fks]
        if self.pk:
            lines.append(f"    PRIMARY KEY ({', '.join(self.pk)})")
        lines += [f"    UNIQUE ({', '.join(u)})" for u in self.uniques]
        return f"CREATE TABLE {_quote(self.name)}(\n" + ",\n".join(lines) + "\n);"


def _quote(name: str) -> str:
    return f'"{name}"' if name.lower() in RESERVED else name


def _unique_names(names: list) -> list:
    seen, out = set(), []
    for n in names:
        m, i = n, 2
        while m in seen:
            m, i = f"{n}_{i}", i + 1
        seen.add(m)
        out.append(m)
    return out


def role_prefix(role: str, entity: str) -> str:
    """Column prefix for a role: a role abbreviating its entity name uses the entity name."""
    low = entity.lower()
    return low if low != role and low.startswith(role) else role


@dataclass
class _Key:
    cols: list
    identity: object = None  # statement providing the key; None for a surrogate


@dataclass
class _Weak:
    rel: str
    own_role: str
    parent_role: str
    parent: str
    fk_cols: list


class _Builder:
    def __init__(self, schema: Schema):
        self.s = schema
        self.cov = Coverage()
        self.keys: dict[str, _Key] = {}
        self.weak: dict[str, _Weak] = {}
        self.absorbed: dict[str, str] = {}
        self.tables: dict[str, Table] = {}
        self.attr_tables: dict[str, Table] = {}
        self.role_cols: dict[str, list] = {}
        self.order: list[Table] = []

    # -- naming
    def col(self, owner: str, attr: str) -> str:
        if attr.lower() not in RESERVED:
            return attr
        w = self.weak.get(owner)
        return f"{w.own_role if w else owner.lower()}_{attr}"

    def local_single(self, owner: str, attr: str) -> bool:
        return self.s.owner_of_attr.get(attr) == owner and is_single(self.s, owner, attr)

    # -- keys
    def entity_key(self, X: str, visiting=frozenset()) -> _Key:
        if X in self.keys:
            return self.keys[X]
        key = None
        for stmt in self.s.of_kind(Identity):
            if stmt.owner != X:
                continue
            pats = stmt.patterns
            if not all(self.local_single(X, p.name) for p in pats if isinstance(p, AttrLeaf)):
                continue
            nav = [p for p in pats if not isinstance(p, AttrLeaf)]
            if not nav:
                key = _Key([self.col(X, p.name) for p in pats], stmt)
                break
            weak = self.weak_shape(X, nav, visiting | {X}) if len(nav) == 1 else None
            if weak is not None:
                self.weak[X] = weak
                self.absorbed[weak.rel] = X
                cols = []
                for p in pats:
                    cols += weak.fk_cols if p is nav[0] else [self.col(X, p.name)]
                key = _Key(cols, stmt)
                break
        if key is None:
            key = _Key([f"{X.lower()}_id"])
        self.keys[X] = key
        return key

    def weak_shape(self, X, nav, visiting):
        p = nav[0]
        if not (isinstance(p, RoleNode) and len(p.children) == 1 and isinstance(p.children[0], RoleNode)):
            return None
        inner = p.children[0]
        rel, ent = self.s.owner_of_role.get(p.name, (None, None))
        if ent != X or rel in self.absorbed or self.s.attrs_of(rel):
            return None
        if other_role(self.s, rel, p.name) != inner.name or role_bounds(self.s, X, p.name, rel) != (1, 1):
            return None
        parent = self.s.role_entity(inner.name)
        if parent in visiting:
            return None
        pkey = self.entity_key(parent, visiting)
        if pkey.identity is None or _pattern_set(inner.children) != _pattern_set(pkey.identity.patterns):
            return None
        prefix = role_prefix(inner.name, parent)
        return _Weak(rel, p.name, inner.name, parent, [f"{prefix}_{c}" for c in pkey.cols])

    # -- tables
    def build(self) -> EmitterOutput:
        for X in self.s.entities:
            self.entity_key(X)
        for X in self.s.entities:
            self.entity_table(X)
            self.multi_valued_tables(X)
        for R in self.s.relationships:
            if R not in self.absorbed:
                self.relationship_table(R)
                self.multi_valued_tables(R)
        self.constraints()
        text = "\n\n".join(t.render() for t in self.order)
        gaps = [f"-- UNEXPRESSED: {d.subject}: {d.message}" for d in self.cov.unexpressed]
        parts = [p for p in (text, "\n".join(gaps)) if p]
        return self.cov.output("\n\n".join(parts) + "\n" if parts else "")

    def new_table(self, owner: str, name: str) -> Table:
        taken = {t.name.lower() for t in self.order}
        base, i = name, 2
        while name.lower() in taken:
            name, i = f"{base}_{i}", i + 1
        t = Table(name)
        self.order.append(t)
        return t

    def entity_table(self, X):
        t = self.tables[X] = self.new_table(X, X)
        key = self.keys[X]
        cols = [self.col(X, a) for a in self.s.attrs_of(X) if self.local_single(X, a)]
        t.columns = _unique_names(key.cols + [c for c in cols if c not in key.cols])
        t.pk = list(key.cols)
        w = self.weak.get(X)
        if w is not None:
            t.fks.append((w.fk_cols, self.tables_name(w.parent), self.keys[w.parent].cols))

    def tables_name(self, owner):
        # parents are declared entities whose tables exist once all entities are emitted;
        # a weak entity may be declared before its parent
        if owner in self.tables:
            return _quote(self.tables[owner].name)
        return _quote(owner)

    def multi_valued_tables(self, owner):
        okey = self.table_key(owner)
        for a in self.s.attrs_of(owner):
            if self.local_single(owner, a):
                continue
            t = self.attr_tables[a] = self.new_table(owner, cap(a) + "s")
            value = self.col(owner, a)
            t.columns = _unique_names([value] + okey)
            t.fks.append((t.columns[1:], _quote(self.tables[owner].name), okey))
            t.pk = list(t.columns)

    def table_key(self, owner):
        return self.keys[owner].cols

    def relationship_table(self, R):
        t = self.tables[R] = self.new_table(R, cap(R))
        roles = self.s.roles_of(R)
        prefixes = [role_prefix(b, self.s.role_entity(b)) for b in roles]
        if len(set(prefixes)) < len(prefixes):
            prefixes = list(roles)
        for b, pre in zip(roles, prefixes):
            ent = self.s.role_entity(b)
            self.role_cols[b] = [f"{pre}_{c}" for c in self.keys[ent].cols]
        attrs = [self.col(R, a) for a in self.s.attrs_of(R) if self.local_single(R, a)]
        natural = [c for b in roles for c in self.role_cols[b]] + attrs
        key = None
        for stmt in self.s.of_kind(Identity):
            if stmt.owner == R:
                key = self.key_columns(R, stmt.patterns)
                if key is not None:
                    self.keys[R] = _Key(key, stmt)
                    break
        if key is None:
            self.keys[R] = _Key([f"{R.lower()}_id"])
            natural = self.keys[R].cols + natural
        pk = self.keys[R].cols
        t.columns = pk + [c for c in natural if c not in pk]
        t.pk = list(pk)
        fks = [(self.role_cols[b], self.tables_name(self.s.role_entity(b)),
                self.keys[self.s.role_entity(b)].cols) for b in roles]
        t.fks = sorted(fks, key=lambda fk: t.columns.index(fk[0][0]))

    # -- pattern to column mapping
    def key_columns(self, owner, patterns):
        cols = []
        for p in patterns:
            c = self.pattern_columns(owner, p)
            if c is None:
                return None
            cols += [x for x in c if x not in cols]
        return cols

    def pattern_columns(self, owner, p):
        s = self.s
        if owner in self.absorbed:
            X = self.absorbed[owner]
            w = self.weak[X]
            if p.name == w.parent_role:
                if isinstance(p, RoleLeaf) or (isinstance(p, RoleNode) and _pattern_set(p.children)
                                               == _pattern_set(self.keys[w.parent].identity.patterns)):
                    return list(w.fk_cols)
            elif p.name == w.own_role:
                if isinstance(p, RoleLeaf):
                    return list(self.keys[X].cols)
                if isinstance(p, RoleNode) and all(isinstance(c, AttrLeaf) and self.local_single(X, c.name)
                                                   for c in p.children):
                    return [self.col(X, c.name) for c in p.children]
            return None
        if isinstance(p, AttrLeaf):
            return [self.col(owner, p.name)] if self.local_single(owner, p.name) else None
        if s.is_entity(owner):
            w = self.weak.get(owner)
            if (w and isinstance(p, RoleNode) and p.name == w.own_role and len(p.children) == 1
                    and self.pattern_columns(w.rel, p.children[0]) == w.fk_cols):
                return list(w.fk_cols)
            return None
        if p.name not in self.role_cols or s.role_relationship(p.name) != owner:
            return None
        if isinstance(p, RoleLeaf):
            return list(self.role_cols[p.name])
        ident = self.keys[s.role_entity(p.name)].identity
        if ident is not None and _pattern_set(p.children) == _pattern_set(ident.patterns):
            return list(self.role_cols[p.name])
        return None

    def host(self, owner):
        return self.tables[self.absorbed.get(owner, owner)]

    # -- constraints
    def constraints(self):
        s, cov = self.s, self.cov
        for c in s.constraints:
            if isinstance(c, (Isa, Disjoint, Cover)):
                cov.gap(c, "type hierarchies are not translated; entities are emitted flat")
            elif isinstance(c, (MandatoryAttr, SingleAttr)):
                if not self.local_single(c.owner, c.attribute):
                    why = ("attribute is multi-valued; at least one value needs a trigger"
                           if s.owner_of_attr.get(c.attribute) == c.owner else "inherited attribute")
                    cov.gap(c, why)
                else:
                    if isinstance(c, MandatoryAttr):
                        self.tables[c.owner].not_null.add(self.col(c.owner, c.attribute))
                    cov.ok(c)
            elif isinstance(c, MandatoryRole):
                w = self.weak.get(c.entity)
                if w and w.rel == c.relationship and w.own_role == c.role:
                    cov.ok(c)
                else:
                    cov.gap(c, "mandatory participation needs an inclusion dependency")
            elif isinstance(c, SingleRole):
                self.single_role(c)
            elif isinstance(c, (Key, Identity)):
                self.key_constraint(c)

    def single_role(self, c):
        s = self.s
        rel, ent = s.owner_of_role.get(c.role, (None, None))
        if rel != c.relationship or ent != c.entity:
            self.cov.gap(c, "participation through an inherited role")
            return
        if rel in self.absorbed:
            X = self.absorbed[rel]
            w = self.weak[X]
            if c.role == w.parent_role:
                self.tables[X].add_unique(w.fk_cols)
            self.cov.ok(c)
            return
        self.tables[rel].add_unique(self.role_cols[c.role])
        self.cov.ok(c)

    def key_constraint(self, c):
        owner = c.owner
        if owner not in self.tables and owner not in self.absorbed:
            self.cov.gap(c, "key owner has no table")
            return
        if self.keys.get(owner) and self.keys[owner].identity == c:
            self.cov.ok(c)
            return
        if owner in self.absorbed and isinstance(c, Identity):
            # instances of the absorbed relationship are rows of the weak entity
            cols = self.key_columns(owner, c.patterns)
            if cols is not None:
                self.host(owner).add_unique(cols)
                self.cov.ok(c)
                return
        if (len(c.patterns) == 1 and isinstance(c.patterns[0], AttrLeaf) and isinstance(c, Key)
                and c.patterns[0].name in self.attr_tables
                and self.s.owner_of_attr.get(c.patterns[0].name) == owner):
            t = self.attr_tables[c.patterns[0].name]
            t.add_unique([t.columns[0]])
            self.cov.ok(c)
            return
        cols = self.key_columns(owner, c.patterns)
        if cols is None:
            self.cov.gap(c, "key patterns do not map to columns of one table; needs a trigger")
            return
        t = self.host(owner)
        t.add_unique(cols)
        if isinstance(c, Identity):
            t.not_null.update(cols)
        self.cov.ok(c)


def _pattern_set(patterns) -> frozenset:
    return frozenset(str(p) for p in patterns)


def emit_sql(schema: Schema) -> EmitterOutput:
    """Relational DDL; every column is ``text``."""
    return _Builder(schema).build()
