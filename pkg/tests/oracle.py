"""Independent reference models used by the test suite.

Everything in this module is deliberately written against plain Python data
(dicts, lists, tuples) with no imports from the package under test, so that
tests can compare kernel behaviour against an implementation that shares no
code with it.
"""

from __future__ import annotations


# --- relational join ---------------------------------------------------------

def join_oracle(rows1, rows2):
    """Natural join of two relations given as lists of field->value dicts.

    Untyped brute force: every pair of rows is combined when all shared
    field names carry equal values.  Result is a set of frozen item sets,
    which makes the comparison order-free and duplicate-free.
    """
    out = set()
    for t1 in rows1:
        for t2 in rows2:
            if all(t1[k] == t2[k] for k in t1.keys() & t2.keys()):
                merged = dict(t1)
                merged.update(t2)
                out.add(frozenset(merged.items()))
    return out


def join_field_names(names1, names2):
    """Field names of the join result: set union, order-free."""
    return set(names1) | set(names2)


# --- set algebra model --------------------------------------------------------

def dedupe(elems, equal):
    """Insertion-ordered list with duplicates (under `equal`) removed."""
    out = []
    for e in elems:
        if not any(equal(e, kept) for kept in out):
            out.append(e)
    return out


def model_insert(elems, x, equal):
    return elems if any(equal(x, e) for e in elems) else elems + [x]


def model_union(a, b, equal):
    out = list(a)
    for e in b:
        out = model_insert(out, e, equal)
    return out


def model_intersection(a, b, equal):
    return [e for e in a if any(equal(e, x) for x in b)]


def model_difference(a, b, equal):
    return [e for e in a if not any(equal(e, x) for x in b)]


def model_member(x, elems, equal):
    return any(equal(x, e) for e in elems)


# --- text/offset algebra -------------------------------------------------------

def token_regions(text, labels):
    """Expected 1-based inclusive regions of non-overlapping label occurrences.

    Each label must occur exactly once in `text`; used to recompute where link
    tokens should land after concatenation or substitution, without reusing
    the package's offset arithmetic.
    """
    regions = []
    for label in labels:
        first = text.find(label)
        assert first >= 0, f"label {label!r} not present"
        assert text.find(label, first + 1) < 0, f"label {label!r} ambiguous"
        regions.append((first + 1, first + len(label)))
    return regions


def splice(text, start, finish, replacement):
    """Replace the 1-based inclusive [start, finish] span of `text`."""
    return text[: start - 1] + replacement + text[finish:]


# --- structural type equivalence ----------------------------------------------

def canonical_type(term):
    """Canonical form of a neutral type term.

    Terms: ("int",) and other atoms; ("set", elem); ("vector", elem);
    ("structure", ((name, term), ...)); ("variant", ...); ("proc", params, result).
    Structure and variant fields are sorted by name so that field order never
    affects equality.  Set element types are erased (single set type).
    """
    tag = term[0]
    if tag in ("structure", "variant"):
        fields = tuple(sorted((n, canonical_type(t)) for n, t in term[1]))
        return (tag, fields)
    if tag == "vector":
        return (tag, canonical_type(term[1]))
    if tag == "set":
        return ("set",)
    if tag == "proc":
        params = tuple(canonical_type(p) for p in term[1])
        result = canonical_type(term[2]) if term[2] is not None else None
        return ("proc", params, result)
    return (tag,)


def equal_type_oracle(a, b):
    return canonical_type(a) == canonical_type(b)
