"""Persistent object store.

A StoreImage owns the root environment, the shared compilation table, the
display-procedure cache, and retained evaluation results.  Objects get
stable integer ids lazily, on first use; ids are never reused.  stabilize
garbage-collects (only objects reachable from the roots survive), then
writes a JSON-lines snapshot atomically: a header line, one line per
interned type representation, and one line per object in id order, so a
stabilized image rewritten unchanged is byte-identical.

Closures are serialised as their checked syntax trees plus frame and
source references.  Host-provided builtins are stored by name and rebound
when a kernel adopts the loaded image; anonymous host procedures cannot be
stored and fault the stabilize that reaches one.
"""

from __future__ import annotations

import json
import os
import tempfile
from collections import deque

from .hyperprog import (
    Binding,
    EnvLocBinding,
    FrameLocBinding,
    HyperSource,
    Region,
    StructLocBinding,
    SymbolEntry,
    TypeBinding,
    ValueBinding,
    VecLocBinding,
)
from .lang import nodes as N
from .lang.values import (
    NIL,
    AnyValue,
    BuiltinClosure,
    Cell,
    Closure,
    EnvValue,
    Frame,
    HostClosure,
    StructureValue,
    VariantValue,
    VectorValue,
    value_type,
)
from .typerep import (
    ANY,
    BOOL,
    ENV,
    INT,
    NULL,
    REAL,
    SET,
    STRING,
    TYPEREP,
    ProcType,
    SetType,
    StructureType,
    TypeRep,
    VariantType,
    VectorType,
    canonical_key,
)

MAGIC = "HPKSTORE1"
VERSION = 1


class StoreError(Exception):
    pass


class SharedTable:
    """Named bindings visible to every compilation against this store."""

    def __init__(self):
        self.bindings: dict[str, Binding] = {}

    def add(self, name: str, binding: Binding):
        if not isinstance(binding, Binding):
            raise StoreError("shared table holds bindings")
        self.bindings[name] = binding

    def remove(self, name: str):
        if name not in self.bindings:
            raise StoreError(f"no shared binding: {name}")
        del self.bindings[name]

    def get(self, name: str):
        return self.bindings.get(name)

    def names(self):
        return list(self.bindings.keys())


class StoreImage:
    def __init__(self):
        self.root = EnvValue()
        self.shared = SharedTable()
        self.display_cache: dict[tuple, object] = {}
        self.retained: list = []
        self._objs: dict[int, object] = {}
        self._ids: dict[int, int] = {}
        self.next_id = 1

    # identity

    def id_of(self, obj) -> int:
        oid = self._ids.get(id(obj))
        if oid is None:
            oid = self.next_id
            self.next_id += 1
            self._ids[id(obj)] = oid
            self._objs[oid] = obj
        return oid

    def lookup(self, oid: int):
        return self._objs.get(oid)

    def retain(self, value):
        self.retained.append(value)

    def release(self, value):
        self.retained = [v for v in self.retained if v is not value]

    def cache_display(self, type_rep: TypeRep, closure):
        self.display_cache[canonical_key(type_rep)] = (type_rep, closure)

    def cached_display(self, type_rep: TypeRep):
        got = self.display_cache.get(canonical_key(type_rep))
        return None if got is None else got[1]

    # reachability

    def _roots(self):
        roots = [self.root]
        for name in self.shared.names():
            roots.extend(_binding_children(self.shared.get(name)))
        roots.extend(closure for _, closure in self.display_cache.values())
        roots.extend(v for v in self.retained if _is_identity(v))
        return roots

    def reachable(self) -> list:
        seen = set()
        order = []
        stack = list(reversed(self._roots()))
        while stack:
            obj = stack.pop()
            if not _is_identity(obj):
                continue
            if id(obj) in seen:
                continue
            seen.add(id(obj))
            order.append(obj)
            kids = _children_of(obj)
            stack.extend(reversed(kids))
        return order

    def collect(self) -> list:
        """Drop ids of unreachable objects; returns the reachable list."""
        order = self.reachable()
        for obj in order:
            self.id_of(obj)
        keep = {id(o) for o in order}
        self._objs = {self._ids[id(o)]: o for o in order}
        self._ids = {id(o): self._ids[id(o)] for o in order}
        assert len(self._objs) == len(order)
        return order

    # snapshots

    def stabilize(self, path: str):
        text = Writer(self).render()
        directory = os.path.dirname(os.path.abspath(path)) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hpkstore-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                f.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path: str) -> "StoreImage":
        try:
            with open(path, encoding="utf-8") as f:
                lines = f.read().splitlines()
        except OSError as exc:
            raise StoreError(f"cannot read snapshot: {exc}") from exc
        return Reader(lines).build()

    def adopt_builtins(self, by_name: dict):
        """Rebind named builtins in a loaded image to live implementations."""
        for obj in list(self._objs.values()):
            if isinstance(obj, BuiltinClosure) and obj.fn is None:
                live = by_name.get(obj.name)
                if live is None:
                    raise StoreError(f"unknown builtin: {obj.name}")
                obj.proc_type = live.proc_type
                obj.fn = live.fn


def _is_identity(v) -> bool:
    from .genlib import Comparison, SetValue
    from .generator import Generator, GeneratorSource

    return isinstance(v, (EnvValue, StructureValue, VariantValue, VectorValue,
                          AnyValue, Closure, BuiltinClosure, Frame, Cell,
                          HyperSource, SetValue, Comparison, Generator,
                          GeneratorSource))


def _binding_children(b: Binding) -> list:
    if isinstance(b, ValueBinding):
        return [b.value]
    if isinstance(b, EnvLocBinding):
        return [b.env]
    if isinstance(b, (StructLocBinding, VecLocBinding)):
        return [b.container]
    if isinstance(b, FrameLocBinding):
        return [b.frame]
    return []


def _entry_children(entry: SymbolEntry) -> list:
    kids = []
    if entry.binding is not None:
        kids.extend(_binding_children(entry.binding))
    if entry.kind == "value":
        kids.append(entry.value)
    elif entry.kind == "envloc":
        live = entry.binding.env.lookup(entry.binding.name)
        if live is None or live.cell is not entry.cell:
            kids.append(entry.cell)
    elif entry.kind in ("structloc", "vecloc"):
        kids.append(entry.container)
    elif entry.kind == "frameloc":
        kids.append(entry.frame)
    return kids


def _closure_body_children(body) -> list:
    kids = []
    for node in N.walk(body):
        if isinstance(node, N.Ident) and isinstance(node.res, N.ExternalRes):
            kids.extend(_entry_children(node.res.entry))
        template = getattr(node, "template", None)
        if template is not None:
            kids.append(template.hyper)
    return kids


def _children_of(obj) -> list:
    from .genlib import Comparison, SetValue
    from .generator import Generator, GeneratorSource

    if isinstance(obj, EnvValue):
        return [b.cell.value for b in obj.bindings.values()]
    if isinstance(obj, StructureValue):
        return [c.value for c in obj.cells.values()]
    if isinstance(obj, VariantValue):
        return [obj.payload]
    if isinstance(obj, VectorValue):
        return [c.value for c in obj.cells]
    if isinstance(obj, AnyValue):
        return [obj.value]
    if isinstance(obj, Closure):
        kids = _closure_body_children(obj.body)
        if obj.frame is not None:
            kids.append(obj.frame)
        if obj.source is not None:
            kids.append(obj.source)
        return kids
    if isinstance(obj, BuiltinClosure):
        return []
    if isinstance(obj, Frame):
        kids = []
        for cell in obj.slots:
            owner = cell.owner
            if owner is not None and owner[0] == "env":
                env, name = owner[1], owner[2]
                live = env.lookup(name)
                if live is not None and live.cell is cell:
                    kids.append(env)
                else:
                    kids.append(cell)
            kids.append(cell.value)
        if obj.static_link is not None:
            kids.append(obj.static_link)
        return kids
    if isinstance(obj, Cell):
        kids = [obj.value]
        if obj.owner is not None:
            kids.append(obj.owner[1])
        return kids
    if isinstance(obj, HyperSource):
        kids = []
        for _, b in obj.substitutions:
            kids.extend(_binding_children(b))
        return kids
    if isinstance(obj, SetValue):
        kids = list(obj.elems)
        kids.append(obj.comparison)
        return kids
    if isinstance(obj, Comparison):
        kids = []
        if obj.eq_value is not None:
            kids.append(obj.eq_value)
        if obj.lt_value is not None:
            kids.append(obj.lt_value)
        return kids
    if isinstance(obj, Generator):
        kids = []
        if obj.prelude is not None:
            kids.append(obj.prelude)
        if obj.result_kind == "literal":
            kids.append(obj.result_gs)
        else:
            kids.append(obj.result_proc)
        return kids
    if isinstance(obj, GeneratorSource):
        kids = [obj.source]
        for _, g in obj.generators:
            kids.append(g)
        return kids
    return []


class Writer:
    def __init__(self, image: StoreImage):
        self.image = image
        self.types: dict[TypeRep, int] = {}
        self.type_lines: list = []

    def tid(self, t: TypeRep) -> int:
        if isinstance(t, N.TName):
            raise StoreError("unresolved type name in stored value")
        got = self.types.get(t)
        if got is not None:
            return got
        d = self._encode_type(t)
        n = len(self.type_lines) + 1
        self.types[t] = n
        self.type_lines.append(d)
        return n

    def _encode_type(self, t: TypeRep):
        if isinstance(t, StructureType):
            return {"c": "structure",
                    "f": [[n, self.tid(ft)] for n, ft in t.fields]}
        if isinstance(t, VariantType):
            return {"c": "variant",
                    "f": [[n, self.tid(bt)] for n, bt in t.branches]}
        if isinstance(t, VectorType):
            return {"c": "vector", "e": self.tid(t.elem)}
        if isinstance(t, SetType):
            return {"c": "set", "e": self.tid(t.elem)}
        if isinstance(t, ProcType):
            return {"c": "proc", "p": [self.tid(p) for p in t.params],
                    "r": None if t.result is None else self.tid(t.result)}
        for name, single in (("int", INT), ("real", REAL), ("bool", BOOL),
                             ("string", STRING), ("null", NULL), ("any", ANY),
                             ("env", ENV), ("typerep", TYPEREP)):
            if t == single:
                return {"c": name}
        raise StoreError(f"unstorable type: {t!r}")

    def ref(self, v):
        if v is NIL:
            return {"z": 1}
        if isinstance(v, bool):
            return {"b": v}
        if isinstance(v, int):
            return {"i": v}
        if isinstance(v, float):
            return {"r": v}
        if isinstance(v, str):
            return {"s": v}
        if isinstance(v, TypeRep):
            return {"t": self.tid(v)}
        if _is_identity(v):
            return {"o": self.image.id_of(v)}
        raise StoreError(f"unstorable value: {v!r}")

    def binding(self, b: Binding):
        img = self.image
        if isinstance(b, ValueBinding):
            return {"k": "v", "t": self.tid(b.type_rep), "v": self.ref(b.value)}
        if isinstance(b, EnvLocBinding):
            return {"k": "e", "o": img.id_of(b.env), "n": b.name,
                    "t": self.tid(b.type_rep)}
        if isinstance(b, StructLocBinding):
            return {"k": "s", "o": img.id_of(b.container), "f": b.field}
        if isinstance(b, VecLocBinding):
            return {"k": "x", "o": img.id_of(b.container), "i": b.index}
        if isinstance(b, FrameLocBinding):
            return {"k": "f", "o": img.id_of(b.frame), "s": b.slot,
                    "t": self.tid(b.type_rep), "el": b.is_env_loc,
                    "m": b.mutable}
        if isinstance(b, TypeBinding):
            return {"k": "t", "t": self.tid(b.type_rep)}
        raise StoreError(f"unstorable binding: {b!r}")

    def entry(self, e: SymbolEntry):
        if e.kind == "envloc":
            live = e.binding.env.lookup(e.binding.name)
            if live is None or live.cell is not e.cell:
                return {"n": e.name, "c": self.image.id_of(e.cell),
                        "nm": e.binding.name, "t": self.tid(e.type_rep),
                        "o": self.image.id_of(e.binding.env),
                        "m": e.assignable}
        binding = e.binding
        if binding is None:
            binding = ValueBinding(e.type_rep, e.value)
        return {"n": e.name, "b": self.binding(binding)}

    def node(self, n):
        cls = type(n).__name__
        if cls not in N.NODE_CLASSES:
            raise StoreError(f"unstorable syntax node: {cls}")
        fields = {}
        for name in n.__dataclass_fields__:
            fields[name] = self.node_field(getattr(n, name))
        return {"_": cls, "f": fields}

    def node_field(self, v):
        if v is None or isinstance(v, (bool, int, float, str)):
            return v
        if isinstance(v, TypeRep) and not isinstance(v, N.TName):
            return {"T": self.tid(v)}
        if isinstance(v, N.TName):
            return {"_": "TName", "f": {"name": v.name}}
        if isinstance(v, list):
            return [self.node_field(x) for x in v]
        if isinstance(v, SymbolEntry):
            return {"E": self.entry(v)}
        if isinstance(v, HyperSource):
            return {"o": self.image.id_of(v)}
        if hasattr(v, "__dataclass_fields__"):
            return self.node(v)
        raise StoreError(f"unstorable node field: {v!r}")

    def obj(self, obj):
        from .genlib import Comparison, SetValue
        from .generator import Generator, GeneratorSource

        img = self.image
        if isinstance(obj, EnvValue):
            return {"k": "env", "b": [
                [name, self.tid(b.type_rep), self.ref(b.cell.value), b.mutable]
                for name, b in obj.bindings.items()]}
        if isinstance(obj, StructureValue):
            return {"k": "struct", "t": self.tid(obj.type_rep),
                    "v": [self.ref(c.value) for c in obj.cells.values()]}
        if isinstance(obj, VariantValue):
            return {"k": "variant", "t": self.tid(obj.type_rep),
                    "br": obj.branch, "v": self.ref(obj.payload)}
        if isinstance(obj, VectorValue):
            return {"k": "vec", "t": self.tid(obj.type_rep), "lwb": obj.lwb,
                    "v": [self.ref(c.value) for c in obj.cells]}
        if isinstance(obj, AnyValue):
            return {"k": "any", "t": self.tid(obj.type_rep),
                    "v": self.ref(obj.value)}
        if isinstance(obj, HostClosure):
            raise StoreError("anonymous host procedure reached the store")
        if isinstance(obj, BuiltinClosure):
            return {"k": "builtin", "n": obj.name}
        if isinstance(obj, Closure):
            return {"k": "closure", "t": self.tid(obj.proc_type),
                    "body": self.node(obj.body),
                    "frame": None if obj.frame is None else img.id_of(obj.frame),
                    "src": None if obj.source is None else img.id_of(obj.source)}
        if isinstance(obj, Frame):
            slots = []
            for cell in obj.slots:
                owner = cell.owner
                if owner is not None and owner[0] == "env":
                    env, name = owner[1], owner[2]
                    live = env.lookup(name)
                    if live is not None and live.cell is cell:
                        slots.append({"use": [img.id_of(env), name]})
                    else:
                        slots.append({"cell": img.id_of(cell)})
                else:
                    slots.append({"v": self.ref(cell.value)})
            return {"k": "frame", "lex": obj.lex_level,
                    "static": None if obj.static_link is None
                    else img.id_of(obj.static_link),
                    "slots": slots}
        if isinstance(obj, Cell):
            d = {"k": "cell", "v": self.ref(obj.value)}
            if obj.owner is not None and obj.owner[0] == "env":
                d["own"] = [img.id_of(obj.owner[1]), obj.owner[2]]
            return d
        if isinstance(obj, HyperSource):
            return {"k": "hsrc", "code": obj.code,
                    "subs": [[r.start, r.finish, self.binding(b)]
                             for r, b in obj.substitutions]}
        if isinstance(obj, SetValue):
            return {"k": "set", "et": self.tid(obj.elem_type),
                    "cmp": img.id_of(obj.comparison),
                    "v": [self.ref(e) for e in obj.elems]}
        if isinstance(obj, Comparison):
            return {"k": "cmp", "ord": obj.ordered, "n": obj.name,
                    "eq": None if obj.eq_value is None else self.ref(obj.eq_value),
                    "lt": None if obj.lt_value is None else self.ref(obj.lt_value)}
        if isinstance(obj, Generator):
            d = {"k": "gen",
                 "p": None if obj.prelude is None else self.ref(obj.prelude),
                 "rk": obj.result_kind}
            if obj.result_kind == "literal":
                d["r"] = self.ref(obj.result_gs)
            else:
                d["r"] = self.ref(obj.result_proc)
            return d
        if isinstance(obj, GeneratorSource):
            return {"k": "gensrc", "src": self.ref(obj.source),
                    "g": [[r.start, r.finish, self.ref(g)]
                          for r, g in obj.generators]}
        raise StoreError(f"unstorable object: {obj!r}")

    def render(self) -> str:
        img = self.image
        order = img.collect()
        records = []
        for obj in order:
            records.append((img.id_of(obj), self.obj(obj)))
        header = {
            "magic": MAGIC,
            "version": VERSION,
            "next": img.next_id,
            "root": img.id_of(img.root),
            "shared": [[name, self.binding(img.shared.get(name))]
                       for name in img.shared.names()],
            "cache": [[self.tid(t), self.ref(closure)]
                      for t, closure in img.display_cache.values()],
            "retained": [self.ref(v) for v in img.retained],
        }
        lines = [json.dumps(header, sort_keys=True, ensure_ascii=False)]
        for i, d in enumerate(self.type_lines, start=1):
            lines.append(json.dumps({"tid": i, "d": d}, sort_keys=True,
                                    ensure_ascii=False))
        for oid, d in sorted(records, key=lambda p: p[0]):
            d2 = {"id": oid}
            d2.update(d)
            lines.append(json.dumps(d2, sort_keys=True, ensure_ascii=False))
        return "\n".join(lines) + "\n"


class Reader:
    def __init__(self, lines: list):
        self.lines = lines
        self.types: dict[int, TypeRep] = {}
        self.image = StoreImage.__new__(StoreImage)

    def build(self) -> StoreImage:
        if not self.lines:
            raise StoreError("corrupt snapshot: empty file")
        try:
            header = json.loads(self.lines[0])
        except json.JSONDecodeError as exc:
            raise StoreError("corrupt snapshot: bad header") from exc
        if header.get("magic") != MAGIC:
            raise StoreError("corrupt snapshot: wrong magic")
        if header.get("version") != VERSION:
            raise StoreError(f"snapshot version {header.get('version')} "
                             f"not supported")
        img = self.image
        img.display_cache = {}
        img.retained = []
        img._objs = {}
        img._ids = {}
        img.next_id = header["next"]
        records = {}
        for line in self.lines[1:]:
            if not line.strip():
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StoreError("corrupt snapshot: bad record") from exc
            if "tid" in d:
                self.types[d["tid"]] = self._decode_type(d["d"])
            else:
                records[d["id"]] = d
        self._make_shells(records)
        for oid, d in records.items():
            self._fill(self.image.lookup(oid), d)
        root_ref = header["root"]
        img.root = img.lookup(root_ref)
        if not isinstance(img.root, EnvValue):
            raise StoreError("corrupt snapshot: root is not an environment")
        img.shared = SharedTable()
        for name, b in header["shared"]:
            img.shared.add(name, self.binding(b))
        for tid, ref in header.get("cache", []):
            t = self.types[tid]
            img.display_cache[canonical_key(t)] = (t, self.ref(ref))
        img.retained = [self.ref(r) for r in header.get("retained", [])]
        return img

    def _decode_type(self, d) -> TypeRep:
        c = d["c"]
        simple = {"int": INT, "real": REAL, "bool": BOOL, "string": STRING,
                  "null": NULL, "any": ANY, "env": ENV, "typerep": TYPEREP}
        if c in simple:
            return simple[c]
        if c == "structure":
            return StructureType(tuple((n, self.types[t]) for n, t in d["f"]))
        if c == "variant":
            return VariantType(tuple((n, self.types[t]) for n, t in d["f"]))
        if c == "vector":
            return VectorType(self.types[d["e"]])
        if c == "set":
            return SetType(self.types[d["e"]])
        if c == "proc":
            return ProcType(tuple(self.types[p] for p in d["p"]),
                            None if d["r"] is None else self.types[d["r"]])
        raise StoreError(f"corrupt snapshot: unknown type {c}")

    def _make_shells(self, records):
        from .genlib import Comparison, SetValue
        from .generator import Generator, GeneratorSource

        img = self.image
        for oid, d in records.items():
            k = d["k"]
            if k == "env":
                obj = EnvValue()
            elif k == "struct":
                obj = object.__new__(StructureValue)
            elif k == "variant":
                obj = object.__new__(VariantValue)
            elif k == "vec":
                obj = object.__new__(VectorValue)
            elif k == "any":
                obj = object.__new__(AnyValue)
            elif k == "builtin":
                obj = BuiltinClosure(d["n"], None, None)
            elif k == "closure":
                obj = object.__new__(Closure)
            elif k == "frame":
                obj = object.__new__(Frame)
            elif k == "cell":
                obj = Cell(None)
            elif k == "hsrc":
                obj = object.__new__(HyperSource)
            elif k == "set":
                obj = object.__new__(SetValue)
            elif k == "cmp":
                obj = object.__new__(Comparison)
            elif k == "gen":
                obj = object.__new__(Generator)
            elif k == "gensrc":
                obj = object.__new__(GeneratorSource)
            else:
                raise StoreError(f"corrupt snapshot: unknown kind {k}")
            img._objs[oid] = obj
            img._ids[id(obj)] = oid

    def ref(self, d):
        if "z" in d:
            return NIL
        if "b" in d:
            return d["b"]
        if "i" in d:
            return d["i"]
        if "r" in d:
            return float(d["r"])
        if "s" in d:
            return d["s"]
        if "t" in d:
            return self.types[d["t"]]
        if "o" in d:
            obj = self.image.lookup(d["o"])
            if obj is None:
                raise StoreError(f"corrupt snapshot: dangling ref {d['o']}")
            return obj
        raise StoreError(f"corrupt snapshot: bad ref {d}")

    def binding(self, d) -> Binding:
        k = d["k"]
        if k == "v":
            return ValueBinding(self.types[d["t"]], self.ref(d["v"]))
        if k == "e":
            return EnvLocBinding(self.image.lookup(d["o"]), d["n"],
                                 self.types[d["t"]])
        if k == "s":
            return StructLocBinding(self.image.lookup(d["o"]), d["f"])
        if k == "x":
            return VecLocBinding(self.image.lookup(d["o"]), d["i"])
        if k == "f":
            return FrameLocBinding(self.image.lookup(d["o"]), d["s"],
                                   self.types[d["t"]], d["el"], d["m"])
        if k == "t":
            return TypeBinding(self.types[d["t"]])
        raise StoreError(f"corrupt snapshot: unknown binding {k}")

    def entry(self, d) -> SymbolEntry:
        from .hyperprog import binding_to_entry

        if "c" in d:
            cell = self.image.lookup(d["c"])
            binding = EnvLocBinding(self.image.lookup(d["o"]), d["nm"],
                                    self.types[d["t"]])
            return SymbolEntry(d["n"], "envloc", self.types[d["t"]], d["m"],
                               cell=cell, binding=binding)
        return binding_to_entry(d["n"], self.binding(d["b"]))

    def node(self, d):
        cls = N.NODE_CLASSES.get(d["_"])
        if cls is None:
            raise StoreError(f"corrupt snapshot: unknown node {d['_']}")
        fields = {name: self.node_field(v) for name, v in d["f"].items()}
        return cls(**fields)

    def node_field(self, v):
        if v is None or isinstance(v, (bool, int, float, str)):
            return v
        if isinstance(v, list):
            return [self.node_field(x) for x in v]
        if "T" in v:
            return self.types[v["T"]]
        if "E" in v:
            return self.entry(v["E"])
        if "o" in v:
            return self.ref(v)
        if "_" in v:
            return self.node(v)
        raise StoreError(f"corrupt snapshot: bad node field {v}")

    def _fill(self, obj, d):
        from .genlib import Comparison, SetValue
        from .generator import Generator, GeneratorSource

        k = d["k"]
        if k == "env":
            for name, tid, ref, mutable in d["b"]:
                obj.define(name, self.ref(ref), self.types[tid], mutable)
        elif k == "struct":
            obj.type_rep = self.types[d["t"]]
            obj.cells = {n: Cell(self.ref(r))
                         for (n, _), r in zip(obj.type_rep.fields, d["v"])}
        elif k == "variant":
            obj.type_rep = self.types[d["t"]]
            obj.branch = d["br"]
            obj.payload = self.ref(d["v"])
        elif k == "vec":
            obj.type_rep = self.types[d["t"]]
            obj.lwb = d["lwb"]
            obj.cells = [Cell(self.ref(r)) for r in d["v"]]
        elif k == "any":
            obj.type_rep = self.types[d["t"]]
            obj.value = self.ref(d["v"])
        elif k == "builtin":
            pass
        elif k == "closure":
            obj.proc_type = self.types[d["t"]]
            obj.body = self.node(d["body"])
            obj.frame = None if d["frame"] is None else self.image.lookup(d["frame"])
            obj.source = None if d["src"] is None else self.image.lookup(d["src"])
        elif k == "frame":
            obj.lex_level = d["lex"]
            obj.static_link = (None if d["static"] is None
                               else self.image.lookup(d["static"]))
            slots = []
            for s in d["slots"]:
                if "use" in s:
                    env = self.image.lookup(s["use"][0])
                    live = env.lookup(s["use"][1])
                    if live is None:
                        raise StoreError("corrupt snapshot: dangling use slot")
                    slots.append(live.cell)
                elif "cell" in s:
                    slots.append(self.image.lookup(s["cell"]))
                else:
                    slots.append(Cell(self.ref(s["v"])))
            obj.slots = slots
        elif k == "cell":
            obj.value = self.ref(d["v"])
            if "own" in d:
                obj.owner = ("env", self.image.lookup(d["own"][0]), d["own"][1])
        elif k == "hsrc":
            subs = [(Region(s, f), self.binding(b)) for s, f, b in d["subs"]]
            HyperSource.__init__(obj, d["code"], subs)
        elif k == "set":
            obj.elem_type = self.types[d["et"]]
            obj.comparison = self.image.lookup(d["cmp"])
            obj.elems = [self.ref(r) for r in d["v"]]
        elif k == "cmp":
            Comparison.__init__(obj, d["ord"], name=d["n"],
                                eq_value=None if d["eq"] is None else self.ref(d["eq"]),
                                lt_value=None if d["lt"] is None else self.ref(d["lt"]))
        elif k == "gen":
            obj.prelude = None if d["p"] is None else self.ref(d["p"])
            obj.result_kind = d["rk"]
            if d["rk"] == "literal":
                obj.result_gs = self.ref(d["r"])
                obj.result_proc = None
            else:
                obj.result_proc = self.ref(d["r"])
                obj.result_gs = None
        elif k == "gensrc":
            obj.source = self.ref(d["src"])
            obj.generators = [(Region(s, f), self.ref(g)) for s, f, g in d["g"]]
        else:
            raise StoreError(f"corrupt snapshot: unknown kind {k}")


# store paths


def parse_store_path(path: str) -> list:
    """Parse a path like /rel1.field[3]!branch into step tuples."""
    steps = []
    i = 0
    n = len(path)
    if n == 0:
        return steps
    while i < n:
        c = path[i]
        if c == "/":
            j = i + 1
            while j < n and path[j] not in "/.[!":
                j += 1
            if j == i + 1:
                raise StoreError(f"bad path near offset {i + 1}")
            steps.append(("env", path[i + 1 : j]))
            i = j
        elif c == ".":
            j = i + 1
            while j < n and path[j] not in "/.[!":
                j += 1
            if j == i + 1:
                raise StoreError(f"bad path near offset {i + 1}")
            steps.append(("field", path[i + 1 : j]))
            i = j
        elif c == "[":
            j = path.find("]", i)
            if j < 0:
                raise StoreError("unclosed index in path")
            try:
                idx = int(path[i + 1 : j])
            except ValueError as exc:
                raise StoreError("bad index in path") from exc
            steps.append(("index", idx))
            i = j + 1
        elif c == "!":
            j = i + 1
            while j < n and path[j] not in "/.[!":
                j += 1
            if j == i + 1:
                raise StoreError(f"bad path near offset {i + 1}")
            steps.append(("branch", path[i + 1 : j]))
            i = j
        else:
            raise StoreError(f"bad path near offset {i + 1}")
    return steps


def resolve_path(image: StoreImage, path: str, want: str = "value") -> Binding:
    """Resolve a textual path from the root environment to a binding.

    want is value, location, or type.
    """
    if want not in ("value", "location", "type"):
        raise StoreError(f"unknown want: {want}")
    steps = parse_store_path(path)
    if not steps:
        raise StoreError("empty path")
    current = image.root
    current_type = ENV
    last_loc = None
    for kind, arg in steps:
        if kind == "env":
            if not isinstance(current, EnvValue):
                raise StoreError(f"not an environment at /{arg}")
            b = current.lookup(arg)
            if b is None:
                raise StoreError(f"absent binding: {arg}")
            last_loc = EnvLocBinding(current, arg, b.type_rep)
            current_type = b.type_rep
            current = b.cell.value
        elif kind == "field":
            if not isinstance(current, StructureValue):
                raise StoreError(f"not a structure at .{arg}")
            if arg not in current.cells:
                raise StoreError(f"absent field: {arg}")
            last_loc = StructLocBinding(current, arg)
            current_type = current.type_rep.field_type(arg)
            current = current.cells[arg].value
        elif kind == "index":
            if not isinstance(current, VectorValue):
                raise StoreError(f"not a vector at [{arg}]")
            cell = current.cell_at(arg)
            if cell is None:
                raise StoreError(f"index out of bounds: {arg}")
            last_loc = VecLocBinding(current, arg)
            current_type = current.type_rep.elem
            current = cell.value
        else:
            if not isinstance(current, VariantValue):
                raise StoreError(f"not a variant at !{arg}")
            if current.branch != arg:
                raise StoreError(f"variant holds {current.branch}, not {arg}")
            last_loc = None
            current_type = current.type_rep.branch_type(arg)
            current = current.payload
    if want == "type":
        return TypeBinding(current_type)
    if want == "location":
        if last_loc is None:
            raise StoreError("no location at this path")
        return last_loc
    return ValueBinding(current_type, current)


def path_of(image: StoreImage, value) -> str | None:
    """Shortest textual path from the root environment to value, by identity.

    Returns None when the value is not path-reachable.  Set elements have
    no path steps, so sets are opaque to this search.
    """
    root = image.root
    if value is root:
        return ""
    seen = {id(root)}
    queue = deque([(root, "")])
    while queue:
        node, path = queue.popleft()
        if isinstance(node, EnvValue):
            children = ((b.cell.value, f"{path}/{n}")
                        for n, b in node.bindings.items())
        elif isinstance(node, StructureValue):
            children = ((c.value, f"{path}.{n}")
                        for n, c in node.cells.items())
        elif isinstance(node, VectorValue):
            children = ((c.value, f"{path}[{node.lwb + i}]")
                        for i, c in enumerate(node.cells))
        elif isinstance(node, VariantValue):
            children = ((node.payload, f"{path}!{node.branch}"),)
        else:
            continue
        for child, child_path in children:
            if child is value:
                return child_path
            if id(child) in seen:
                continue
            seen.add(id(child))
            queue.append((child, child_path))
    return None
