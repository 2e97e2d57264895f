"""Textual exchange format for hyper-source.

A hyper-source mixes code text with bindings to live store values, so it
cannot travel as plain text.  The .hsrc rendering replaces each linked
region with a numbered token and describes every binding on its own line
after a separator, naming store values by path instead of by identity.

Only store-addressable bindings survive the trip.  Frame locations are
process-local and always refused.  Other linked values must be reachable
by path from the root environment, or be builtins, scalar constants, or
writable types, which travel by name, by copy, and by text respectively.
"""

from __future__ import annotations

import json
import re

from ..hyperprog import (
    EnvLocBinding,
    FrameLocBinding,
    HyperSource,
    Region,
    StructLocBinding,
    TypeBinding,
    ValueBinding,
    VecLocBinding,
)
from ..lang import nodes as N
from ..lang.parser import ParseError, Parser
from ..lang.values import NIL, BuiltinClosure
from ..store import StoreError, path_of, resolve_path
from ..typerep import (
    BOOL,
    INT,
    NULL,
    REAL,
    STRING,
    TYPEREP,
    ProcType,
    StructureType,
    TypeRep,
    VariantType,
    VectorType,
    canonical_key,
    write_type,
)

MAGIC = "hsrc 1"
SEPARATOR = "---bindings---"
TOKEN_RE = re.compile(r"⟦(\d+)⟧")

SCALARS = {"int": INT, "real": REAL, "bool": BOOL, "string": STRING,
           "null": NULL}
_SCALAR_KEYS = {canonical_key(t): n for n, t in SCALARS.items()}


class HsrcError(Exception):
    pass


def read_type(text: str) -> TypeRep:
    """Parse a written type back into a representation.

    Only ground types round-trip; names would need a scope to resolve in.
    """
    try:
        p = Parser(text)
        t = p.parse_type_syntax()
    except ParseError as exc:
        raise HsrcError(f"bad type text: {exc}") from exc
    if p.peek().kind != "eof":
        raise HsrcError(f"trailing text after type: {text!r}")
    if not _ground(t):
        raise HsrcError(f"type text names an unknown type: {text!r}")
    return t


def _ground(t) -> bool:
    if isinstance(t, N.TName):
        return False
    if isinstance(t, VectorType):
        return _ground(t.elem)
    if isinstance(t, StructureType):
        return all(_ground(ft) for _, ft in t.fields)
    if isinstance(t, VariantType):
        return all(_ground(bt) for _, bt in t.branches)
    if isinstance(t, ProcType):
        if t.result is not None and not _ground(t.result):
            return False
        return all(_ground(pt) for pt in t.params)
    return True


def _writable(t) -> bool:
    try:
        return read_type(write_type(t)) is not None
    except HsrcError:
        return False


def render_hsrc(kernel, hs: HyperSource) -> str:
    """Render a hyper-source as exchange text."""
    code = hs.code
    if "⟦" in code or "⟧" in code:
        raise HsrcError("code already contains link tokens")
    out = []
    binding_lines = []
    pos = 1
    ordered = sorted(hs.substitutions, key=lambda rb: rb[0].start)
    for k, (region, binding) in enumerate(ordered, start=1):
        out.append(code[pos - 1:region.start - 1])
        out.append(f"⟦{k}⟧")
        label = code[region.start - 1:region.finish]
        desc = {"token": k, "label": label}
        desc.update(_describe(kernel, binding, label))
        binding_lines.append(json.dumps(desc, ensure_ascii=False,
                                        sort_keys=True))
        pos = region.finish + 1
    out.append(code[pos - 1:])
    body = "".join(out)
    if any(line == SEPARATOR for line in body.split("\n")):
        raise HsrcError("code contains the binding separator line")
    parts = [MAGIC, body, SEPARATOR]
    parts.extend(binding_lines)
    return "\n".join(parts) + "\n"


def _path_to(kernel, value, label: str) -> str:
    p = path_of(kernel.image, value)
    if p is None:
        raise HsrcError(f"no store path to the value linked at: {label}")
    return p


def _describe(kernel, binding, label: str) -> dict:
    if isinstance(binding, FrameLocBinding):
        raise HsrcError(f"frame location cannot leave the process: {label}")
    if isinstance(binding, TypeBinding):
        if not _writable(binding.type_rep):
            raise HsrcError(f"linked type is not writable: {label}")
        return {"kind": "aType", "typeText": write_type(binding.type_rep)}
    if isinstance(binding, ValueBinding):
        if isinstance(binding.value, BuiltinClosure):
            return {"kind": "value", "builtin": binding.value.name,
                    "type": write_type(binding.type_rep)}
        scalar = _SCALAR_KEYS.get(canonical_key(binding.type_rep))
        if scalar is not None:
            v = None if binding.value is NIL else binding.value
            return {"kind": "value", "scalar": scalar, "value": v}
        if canonical_key(binding.type_rep) == canonical_key(TYPEREP):
            if not _writable(binding.value):
                raise HsrcError(f"linked type is not writable: {label}")
            return {"kind": "value", "typeText": write_type(binding.value)}
        return {"kind": "value",
                "path": _path_to(kernel, binding.value, label),
                "type": write_type(binding.type_rep)}
    if isinstance(binding, EnvLocBinding):
        base = _path_to(kernel, binding.env, label)
        return {"kind": "envLocation", "path": f"{base}/{binding.name}",
                "type": write_type(binding.type_rep)}
    if isinstance(binding, StructLocBinding):
        base = _path_to(kernel, binding.container, label)
        ft = binding.container.type_rep.field_type(binding.field)
        return {"kind": "structLocation",
                "path": f"{base}.{binding.field}", "type": write_type(ft)}
    if isinstance(binding, VecLocBinding):
        base = _path_to(kernel, binding.container, label)
        return {"kind": "vectorLocation",
                "path": f"{base}[{binding.index}]",
                "type": write_type(binding.container.type_rep.elem)}
    raise HsrcError(f"unknown binding kind at: {label}")


_LOCATION_KINDS = {
    "envLocation": EnvLocBinding,
    "structLocation": StructLocBinding,
    "vectorLocation": VecLocBinding,
}


def parse_hsrc(kernel, text: str) -> HyperSource:
    """Rebuild a hyper-source from exchange text against the live store."""
    lines = text.split("\n")
    if not lines or lines[0] != MAGIC:
        raise HsrcError("not an hsrc text")
    try:
        sep = len(lines) - 1 - lines[::-1].index(SEPARATOR)
    except ValueError:
        raise HsrcError("missing binding separator") from None
    code_tokens = "\n".join(lines[1:sep])
    described = {}
    for raw in lines[sep + 1:]:
        if not raw.strip():
            continue
        try:
            d = json.loads(raw)
            k = d["token"]
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            raise HsrcError(f"bad binding line: {raw!r}") from exc
        if k in described:
            raise HsrcError(f"duplicate token: {k}")
        described[k] = d
    out = []
    length = 0
    subs = []
    pos = 0
    for m in TOKEN_RE.finditer(code_tokens):
        k = int(m.group(1))
        d = described.pop(k, None)
        if d is None:
            raise HsrcError(f"token without a binding: {k}")
        gap = code_tokens[pos:m.start()]
        out.append(gap)
        length += len(gap)
        label = d.get("label") or d.get("kind", "link")
        out.append(label)
        subs.append((Region(length + 1, length + len(label)),
                     _resolve(kernel, d)))
        length += len(label)
        pos = m.end()
    if described:
        missing = sorted(described)
        raise HsrcError(f"bindings without tokens: {missing}")
    out.append(code_tokens[pos:])
    return HyperSource("".join(out), subs)


def _resolve(kernel, d: dict):
    kind = d.get("kind")
    if kind == "aType":
        return TypeBinding(read_type(d["typeText"]))
    if kind == "value":
        return _resolve_value(kernel, d)
    cls = _LOCATION_KINDS.get(kind)
    if cls is None:
        raise HsrcError(f"unknown binding kind: {kind!r}")
    try:
        binding = resolve_path(kernel.image, d["path"], want="location")
    except StoreError as exc:
        raise HsrcError(f"path no longer resolves: {d['path']} ({exc})") \
            from exc
    if not isinstance(binding, cls):
        raise HsrcError(f"path {d['path']} is not a {kind}")
    _check_type(d, _location_type(binding))
    return binding


def _location_type(binding):
    if isinstance(binding, EnvLocBinding):
        return binding.type_rep
    if isinstance(binding, StructLocBinding):
        return binding.container.type_rep.field_type(binding.field)
    return binding.container.type_rep.elem


def _check_type(d: dict, found) -> None:
    want = d.get("type")
    if want is not None and want != write_type(found):
        raise HsrcError(
            f"type changed at {d.get('path')}: "
            f"expected {want}, found {write_type(found)}")


def _resolve_value(kernel, d: dict):
    if "builtin" in d:
        b = (kernel.builtins or {}).get(d["builtin"])
        if b is None:
            raise HsrcError(f"unknown builtin: {d['builtin']}")
        _check_type(d, b.proc_type)
        return ValueBinding(b.proc_type, b)
    if "scalar" in d:
        rep = SCALARS.get(d["scalar"])
        if rep is None:
            raise HsrcError(f"unknown scalar kind: {d['scalar']!r}")
        v = d.get("value")
        if d["scalar"] == "null":
            v = NIL
        elif d["scalar"] == "real" and isinstance(v, int):
            v = float(v)
        if not _scalar_ok(d["scalar"], v):
            raise HsrcError(f"bad {d['scalar']} constant: {v!r}")
        return ValueBinding(rep, v)
    if "typeText" in d:
        return ValueBinding(TYPEREP, read_type(d["typeText"]))
    if "path" in d:
        try:
            binding = resolve_path(kernel.image, d["path"], want="value")
        except StoreError as exc:
            raise HsrcError(
                f"path no longer resolves: {d['path']} ({exc})") from exc
        _check_type(d, binding.type_rep)
        return binding
    raise HsrcError("value binding needs builtin, scalar, typeText, or path")


def _scalar_ok(kind: str, v) -> bool:
    if kind == "int":
        return isinstance(v, int) and not isinstance(v, bool)
    if kind == "real":
        return isinstance(v, float)
    if kind == "bool":
        return isinstance(v, bool)
    if kind == "string":
        return isinstance(v, str)
    return v is NIL
