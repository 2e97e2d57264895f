"""Generic natural join, written as a program generator family.

The join of two vectors of structures is a set of structures: every pair
of rows whose shared fields agree contributes one merged row.  No single
procedure can be given that type, so the code is generated per input type
pair and compiled at run time.

Three generator levels cooperate.  The outer generator's prelude reflects
on the two input types and leaves the derived field sets and result type
in the expansion environment; its body supplies the procedure skeleton.
The inner loop is a literal generator, and the match predicate and the
row constructor are expression generators that compose source from the
field sets left behind by the prelude.  The result type itself enters the
generated text as a link, not as text.
"""

from __future__ import annotations

from . import generator as G
from .hyperprog import Region, mk_hyper_source, mk_link
from .kernel import is_error_box
from .lang.values import AnyValue, EnvValue, VectorValue
from .typerep import TYPEREP, StructureType, VectorType

NT_TEXT = "structure( name : string ; typeRep : typerep )"


class JoinError(Exception):
    pass


# run once per kernel, against the types left in the environment

PRELUDE_SRC = f"""proc( e : env -> env ) ;
begin
use e with type1 : typerep ; type2 : typerep in
begin
let f1 = getStructureFields( type1 )
let f2 = getStructureFields( type2 )
let f2only = difference( f2, f1 )
let rf = union( f1, f2only )
in e let shared = intersection( f1, f2 )
in e let fields1 = f1
in e let fields2only = f2only
in e let resultFields = rf
in e let resultType = mkStructureType( rf )
end
e
end"""

EQ_SRC = f"""proc( e : env -> any ) ;
use e with resultType : typerep ; resultFields : set in
begin
let frags := mkEmptySet( typeOf( mkHyperSource( "" ) ), compareHyperSource )
iterate( resultFields, proc( f : any -> bool ) ;
project f as r onto
{NT_TEXT} :
begin
frags := insert( frags, mkHyperSource( "p( " ++ r( name ) ++ " ) = q( " ++ r( name ) ++ " )" ) )
true
end
default : false )
concatHyperSource( mkHyperSource( "proc( p, q : " ++ writeType( resultType ) ++ " -> bool ) ; " ), andCompose( frags ) )
end"""

RESULT_TYPE_SRC = """proc( e : env -> any ) ;
use e with resultType : typerep in mkLink( any( resultType ) )"""

MATCH_SRC = f"""proc( e : env -> any ) ;
use e with shared : set in
begin
let frags := mkEmptySet( typeOf( mkHyperSource( "" ) ), compareHyperSource )
iterate( shared, proc( f : any -> bool ) ;
project f as r onto
{NT_TEXT} :
begin
frags := insert( frags, mkHyperSource( "x( " ++ r( name ) ++ " ) = y( " ++ r( name ) ++ " )" ) )
true
end
default : false )
andCompose( frags )
end"""

ROW_SRC = f"""proc( e : env -> any ) ;
use e with fields1 : set ; fields2only : set in
begin
let recs := mkEmptySet( typeOf( any( struct( name = "" ; value = any( 0 ) ) ) ),
mkComparison( any( proc( a, b : structure( name : string ; value : any ) -> bool ) ; a( name ) = b( name ) ) ) )
let grab = proc( side : string -> proc( any -> bool ) ) ;
proc( f : any -> bool ) ;
project f as r onto
{NT_TEXT} :
begin
recs := insert( recs, any( struct( name = r( name ) ; value = mkHyperSource( side ++ "( " ++ r( name ) ++ " )" ) ) ) )
true
end
default : false
iterate( fields1, grab( "x" ) )
iterate( fields2only, grab( "y" ) )
mkStruct( recs )
end"""

VEC1_SRC = """proc( e : env -> any ) ;
use e with type1 : typerep in mkHyperSource( "*" ++ writeType( type1 ) )"""

VEC2_SRC = """proc( e : env -> any ) ;
use e with type2 : typerep in mkHyperSource( "*" ++ writeType( type2 ) )"""

JOIN_TEMPLATE = """proc( r1 : G1 ; r2 : G2 -> set )
begin
let eq = G3
let result := mkEmptySet( G4, mkComparison( any( eq ) ) )
G5
result
end"""

ONEJOIN_TEMPLATE = """for i = lwb( r1 ) to upb( r1 ) do
for j = lwb( r2 ) to upb( r2 ) do
begin
let x = r1( i )
let y = r2( j )
if K1 do result := insert( result, any( K2 ) )
end"""


def _marker_region(text: str, marker: str) -> Region:
    i = text.index(marker)
    return Region(i + 1, i + len(marker))


def _compile_value(kernel, src: str):
    box = kernel.compile_string(src)
    if is_error_box(box):
        raise JoinError(f"join support code failed to compile: {box.value}")
    return kernel.run_box(box)


def join_generator(kernel) -> G.Generator:
    """The join generator family, built once per kernel."""
    family = getattr(kernel, "_join_family", None)
    if family is not None:
        return family

    expr = lambda src: G.expression_generator(_compile_value(kernel, src))
    onejoin_gs = G.GeneratorSource(
        mk_hyper_source(ONEJOIN_TEMPLATE),
        [(_marker_region(ONEJOIN_TEMPLATE, "K1"), expr(MATCH_SRC)),
         (_marker_region(ONEJOIN_TEMPLATE, "K2"), expr(ROW_SRC))])
    join_gs = G.GeneratorSource(
        mk_hyper_source(JOIN_TEMPLATE),
        [(_marker_region(JOIN_TEMPLATE, "G1"), expr(VEC1_SRC)),
         (_marker_region(JOIN_TEMPLATE, "G2"), expr(VEC2_SRC)),
         (_marker_region(JOIN_TEMPLATE, "G3"), expr(EQ_SRC)),
         (_marker_region(JOIN_TEMPLATE, "G4"), expr(RESULT_TYPE_SRC)),
         (_marker_region(JOIN_TEMPLATE, "G5"),
          G.literal_generator(onejoin_gs))])
    family = G.literal_generator(join_gs,
                                 prelude=_compile_value(kernel, PRELUDE_SRC))
    kernel._join_family = family
    return family


def _need_structure(t, which: str) -> StructureType:
    if not isinstance(t, StructureType):
        raise JoinError(f"{which} rows must be structures")
    return t


def mk_join_source(kernel, t1, t2):
    """Expand the family for one type pair; the result is compilable text."""
    _need_structure(t1, "first")
    _need_structure(t2, "second")
    env = EnvValue()
    env.define("type1", t1, TYPEREP, mutable=False)
    env.define("type2", t2, TYPEREP, mutable=False)
    return G.expand_generator(join_generator(kernel), env, kernel)


def mk_join(kernel, t1, t2):
    """Compiled join procedure for one pair of row types."""
    hs = mk_join_source(kernel, t1, t2)
    box = kernel.compile_hyper(hs)
    if is_error_box(box):
        raise JoinError(f"generated join failed to compile: {box.value}")
    return kernel.run_box(box)


def result_type_of(t1, t2) -> StructureType:
    """Row type of the join, first relation's fields first."""
    fields = list(_need_structure(t1, "first").fields)
    names = {n for n, _ in fields}
    for n, ft in _need_structure(t2, "second").fields:
        if (n, ft) not in t1.fields:
            if n in names:
                raise JoinError(f"field {n} has conflicting types")
            fields.append((n, ft))
    return StructureType(tuple(fields))


def natural_join(kernel, vec1: VectorValue, vec2: VectorValue):
    """Join two vectors of structure rows into a set of merged rows."""
    if not isinstance(vec1, VectorValue) or not isinstance(vec2, VectorValue):
        raise JoinError("join needs two vectors")
    f = mk_join(kernel, vec1.type_rep.elem, vec2.type_rep.elem)
    return kernel.call(f, [vec1, vec2])
