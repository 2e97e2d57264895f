"""Structural type equivalence against an independent model."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from hpk.typerep import (
    ANY,
    BOOL,
    ENV,
    INT,
    NULL,
    REAL,
    STRING,
    TYPEREP,
    DuplicateFieldError,
    NameAndType,
    ProcType,
    SetType,
    StructureType,
    VariantType,
    VectorType,
    canonical_key,
    equal_type,
    mk_structure_type,
    write_type,
)

ATOMS = [
    (INT, ("int",)),
    (REAL, ("real",)),
    (BOOL, ("bool",)),
    (STRING, ("string",)),
    (NULL, ("null",)),
    (ANY, ("any",)),
    (ENV, ("env",)),
    (TYPEREP, ("typerep",)),
]

names = st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=3,
                 unique=True)


def _fields(pairs, named):
    reps = tuple((n, p[0]) for n, p in zip(named, pairs))
    terms = tuple((n, p[1]) for n, p in zip(named, pairs))
    return reps, terms


def _extend(children):
    def mk_struct(args):
        ns, ps = args
        reps, terms = _fields(ps, ns)
        return StructureType(reps), ("structure", terms)

    def mk_variant(args):
        ns, ps = args
        reps, terms = _fields(ps, ns)
        return VariantType(reps), ("variant", terms)

    def mk_vec(p):
        return VectorType(p[0]), ("vector", p[1])

    def mk_set(p):
        return SetType(p[0]), ("set", p[1])

    def mk_proc(args):
        ps, res = args
        rep = ProcType(tuple(p[0] for p in ps),
                       None if res is None else res[0])
        term = ("proc", tuple(p[1] for p in ps),
                None if res is None else res[1])
        return rep, term

    both = st.tuples(names, st.lists(children, min_size=3, max_size=3)) \
        .map(lambda a: (a[0], a[1][: len(a[0])]))
    return st.one_of(
        both.map(mk_struct),
        both.map(mk_variant),
        children.map(mk_vec),
        children.map(mk_set),
        st.tuples(st.lists(children, max_size=2),
                  st.none() | children).map(mk_proc),
    )


type_pairs = st.recursive(st.sampled_from(ATOMS), _extend, max_leaves=6)


@given(type_pairs, type_pairs)
def test_equivalence_matches_model(a, b):
    assert equal_type(a[0], b[0]) == oracle.equal_type_oracle(a[1], b[1])


@given(type_pairs, type_pairs)
def test_canonical_key_decides_equivalence(a, b):
    assert (canonical_key(a[0]) == canonical_key(b[0])) == \
        equal_type(a[0], b[0])


def test_field_order_never_matters():
    a = StructureType((("name", STRING), ("age", INT)))
    b = StructureType((("age", INT), ("name", STRING)))
    assert equal_type(a, b)
    assert canonical_key(a) == canonical_key(b)


def test_one_set_type():
    assert equal_type(SetType(INT), SetType(STRING))


def test_vector_element_matters():
    assert not equal_type(VectorType(INT), VectorType(STRING))


def test_structure_and_variant_differ():
    fields = (("a", INT),)
    assert not equal_type(StructureType(fields), VariantType(fields))


def test_proc_shapes_write():
    assert write_type(ProcType((), None)) == "proc()"
    assert write_type(ProcType((INT,), None)) == "proc( int )"
    assert write_type(ProcType((INT,), BOOL)) == "proc( int -> bool )"
    assert write_type(ProcType((), BOOL)) == "proc( -> bool )"


def test_write_structure_in_declared_order():
    t = StructureType((("b", INT), ("a", STRING)))
    assert write_type(t) == "structure( b : int ; a : string )"


def test_duplicate_fields_rejected():
    with pytest.raises(Exception):
        StructureType((("a", INT), ("a", INT)))
    with pytest.raises(DuplicateFieldError):
        mk_structure_type([NameAndType("a", INT), NameAndType("a", STRING)])


def test_mk_structure_type_keeps_order():
    t = mk_structure_type([NameAndType("b", INT), NameAndType("a", STRING)])
    assert t.fields == (("b", INT), ("a", STRING))
