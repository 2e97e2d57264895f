"""Generated natural join versus a brute-force relational oracle."""

import pytest
from hypothesis import given, settings, strategies as st

from hpk.join import (
    JoinError,
    mk_join,
    mk_join_source,
    natural_join,
    result_type_of,
)
from hpk.kernel import Kernel
from hpk.lang.values import StructureValue, VectorValue
from hpk.typerep import BOOL, INT, REAL, STRING, StructureType, VectorType, equal_type

import oracle


def row(t, **kw):
    return StructureValue(t, [kw[n] for n, _ in t.fields])


def relation(t, dicts):
    return VectorValue(VectorType(t), 1, [row(t, **d) for d in dicts])


def as_dicts(result_set):
    out = set()
    for e in result_set.elems:
        out.add(frozenset((n, e.get(n)) for n, _ in e.type_rep.fields))
    return out


R_T = StructureType((("a", INT), ("b", STRING), ("c", REAL)))
S_T = StructureType((("a", INT), ("b", STRING), ("d", BOOL)))


def test_seeded_join_matches_oracle(kernel):
    r_rows = [dict(a=1, b="x", c=1.0), dict(a=2, b="y", c=2.0)]
    s_rows = [dict(a=1, b="x", d=True), dict(a=2, b="z", d=False)]
    got = natural_join(kernel, relation(R_T, r_rows), relation(S_T, s_rows))
    assert as_dicts(got) == oracle.join_oracle(r_rows, s_rows)
    assert as_dicts(got) == {frozenset(dict(a=1, b="x", c=1.0, d=True).items())}
    assert equal_type(got.elem_type,
                      StructureType((("a", INT), ("b", STRING),
                                     ("c", REAL), ("d", BOOL))))


def test_result_type_keeps_first_relation_order():
    t = result_type_of(R_T, S_T)
    assert [n for n, _ in t.fields] == ["a", "b", "c", "d"]
    assert set(n for n, _ in t.fields) == oracle.join_field_names(
        [n for n, _ in R_T.fields], [n for n, _ in S_T.fields])


def test_disjoint_fields_give_cartesian_product(kernel):
    t1 = StructureType((("a", INT),))
    t2 = StructureType((("z", STRING),))
    rows1 = [dict(a=1), dict(a=2)]
    rows2 = [dict(z="p"), dict(z="q"), dict(z="r")]
    got = natural_join(kernel, relation(t1, rows1), relation(t2, rows2))
    assert len(got.elems) == 6
    assert as_dicts(got) == oracle.join_oracle(rows1, rows2)


def test_duplicate_rows_collapse_in_the_result(kernel):
    t1 = StructureType((("a", INT),))
    t2 = StructureType((("a", INT), ("b", STRING)))
    rows1 = [dict(a=1), dict(a=1)]
    rows2 = [dict(a=1, b="k")]
    got = natural_join(kernel, relation(t1, rows1), relation(t2, rows2))
    assert len(got.elems) == 1
    assert as_dicts(got) == oracle.join_oracle(rows1, rows2)


def test_empty_relations_join_to_empty(kernel):
    got = natural_join(kernel, relation(R_T, []), relation(S_T, []))
    assert got.elems == []
    got = natural_join(kernel, relation(R_T, [dict(a=1, b="x", c=0.5)]),
                       relation(S_T, []))
    assert got.elems == []


def test_conflicting_field_types_are_refused(kernel):
    t1 = StructureType((("a", INT), ("b", STRING)))
    t2 = StructureType((("b", INT),))
    with pytest.raises(JoinError, match="conflicting"):
        result_type_of(t1, t2)
    from hpk.lang.interp import RuntimeFault
    with pytest.raises(RuntimeFault, match="duplicate field name: b"):
        mk_join(kernel, t1, t2)


def test_non_structure_rows_are_refused():
    with pytest.raises(JoinError, match="rows must be structures"):
        result_type_of(INT, S_T)


def test_generated_text_is_deterministic_across_kernels():
    texts = []
    for _ in range(2):
        k = Kernel()
        hs = mk_join_source(k, R_T, S_T)
        texts.append((hs.code,
                      [(r.start, r.finish, type(b).__name__)
                       for r, b in hs.substitutions]))
    assert texts[0] == texts[1]


def test_join_procedure_is_reusable(kernel):
    f = mk_join(kernel, R_T, S_T)
    r = relation(R_T, [dict(a=1, b="x", c=1.0)])
    s = relation(S_T, [dict(a=1, b="x", d=True)])
    first = kernel.call(f, [r, s])
    second = kernel.call(f, [r, s])
    assert as_dicts(first) == as_dicts(second) != set()


NAMES = ["a", "b", "c", "d", "e"]


@st.composite
def relation_pair(draw):
    n1 = draw(st.integers(1, 4))
    n2 = draw(st.integers(1, 4))
    names1 = NAMES[:n1]
    names2 = draw(st.permutations(NAMES))[:n2]
    t1 = StructureType(tuple((n, INT) for n in sorted(names1)))
    t2 = StructureType(tuple((n, INT) for n in sorted(names2)))
    small = st.integers(0, 2)
    rows1 = draw(st.lists(st.fixed_dictionaries({n: small for n in sorted(names1)}),
                          max_size=4))
    rows2 = draw(st.lists(st.fixed_dictionaries({n: small for n in sorted(names2)}),
                          max_size=4))
    return t1, t2, rows1, rows2


@settings(max_examples=30, deadline=None)
@given(relation_pair())
def test_randomized_joins_match_oracle(pair):
    kernel = Kernel()
    t1, t2, rows1, rows2 = pair
    got = natural_join(kernel, relation(t1, rows1), relation(t2, rows2))
    assert as_dicts(got) == oracle.join_oracle(rows1, rows2)
