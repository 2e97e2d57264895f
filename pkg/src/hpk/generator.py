"""Program generators: source that computes source.

A Generator pairs an optional prelude (an environment transformer run
before expansion) with a result definition: either a literal
GeneratorSource or an expression procedure that computes one from the
environment.  A GeneratorSource is a hyper-source with regions bound to
further generators.

Expansion proceeds one level at a time, left to right, threading the
environment through the preludes; since preludes normally extend the
environment in place, bindings made at one level remain visible when
deeper generators expand on a later pass.
"""

from __future__ import annotations

from .hyperprog import (
    HYPER_SOURCE_REP,
    HyperSource,
    Region,
    concat_hyper_source,
    substitute_region,
)
from .lang.values import AnyValue, EnvValue
from .typerep import NULL, STRING, VariantType

EXPANSION_LIMIT = 64


class GenError(Exception):
    pass


class GeneratorSource:
    """Hyper-source text with disjoint regions bound to generators."""

    __slots__ = ("source", "generators")

    def __init__(self, source: HyperSource, generators=()):
        gens = sorted(generators, key=lambda rg: rg[0].start)
        last = 0
        for region, gen in gens:
            if region.start <= last:
                raise GenError("overlapping generator regions")
            if region.finish > len(source.code):
                raise GenError("generator region outside code text")
            if not isinstance(gen, Generator):
                raise GenError("region must be bound to a generator")
            last = region.finish
        self.source = source
        self.generators = tuple(gens)

    def __repr__(self):
        return (f"<gensource {len(self.source.code)} chars, "
                f"{len(self.generators)} generators>")


class Generator:
    """prelude: procedure value env -> env, or None for the null prelude.

    result is ("literal", GeneratorSource) or ("expression", procedure
    value env -> generator source).
    """

    __slots__ = ("prelude", "result_kind", "result_gs", "result_proc")

    def __init__(self, prelude, result):
        kind, payload = result
        if kind not in ("literal", "expression"):
            raise GenError(f"unknown result kind: {kind}")
        self.prelude = prelude
        self.result_kind = kind
        self.result_gs = payload if kind == "literal" else None
        self.result_proc = payload if kind == "expression" else None

    def __repr__(self):
        return f"<generator {self.result_kind}>"


def literal_generator(gs, prelude=None) -> Generator:
    if isinstance(gs, HyperSource):
        gs = GeneratorSource(gs)
    return Generator(prelude, ("literal", gs))


def expression_generator(proc, prelude=None) -> Generator:
    return Generator(prelude, ("expression", proc))


# source algebra


def mk_generator_source(hs: HyperSource) -> GeneratorSource:
    return GeneratorSource(hs)


def concat_generator_source(a: GeneratorSource, b: GeneratorSource) -> GeneratorSource:
    delta = len(a.source.code)
    gens = list(a.generators)
    gens.extend((r.shift(delta), g) for r, g in b.generators)
    return GeneratorSource(concat_hyper_source(a.source, b.source), gens)


def extract_generator_source(gs: GeneratorSource, start: int, finish: int) -> GeneratorSource:
    from .hyperprog import extract_hyper_source

    span = Region(start, finish)
    gens = []
    for region, gen in gs.generators:
        if span.contains(region):
            gens.append((region.shift(1 - start), gen))
        elif span.overlaps(region):
            raise GenError("extract would split a generator region")
    return GeneratorSource(extract_hyper_source(gs.source, start, finish), gens)


def with_generator(gs: GeneratorSource, region: Region, gen: Generator) -> GeneratorSource:
    return GeneratorSource(gs.source, list(gs.generators) + [(region, gen)])


# expansion


def _unbox_env(v) -> EnvValue:
    if isinstance(v, EnvValue):
        return v
    if isinstance(v, AnyValue) and isinstance(v.value, EnvValue):
        return v.value
    raise GenError("prelude must produce an environment")


def _unbox_gs(v) -> GeneratorSource:
    if isinstance(v, GeneratorSource):
        return v
    if isinstance(v, HyperSource):
        return GeneratorSource(v)
    if isinstance(v, AnyValue):
        return _unbox_gs(v.value)
    raise GenError("result expression must produce source")


def expand_one(gen: Generator, envir: EnvValue, kernel):
    """Run the prelude, then produce the generator's own source."""
    env = envir
    if gen.prelude is not None:
        env = _unbox_env(kernel.call(gen.prelude, [envir]))
    if gen.result_kind == "literal":
        return gen.result_gs, env
    result = kernel.call(gen.result_proc, [env])
    return _unbox_gs(result), env


def drop_and_eval(gen: Generator, envir: EnvValue, kernel) -> GeneratorSource:
    """Expand one level: the generator itself, then each of its immediate

    sub-generators left to right, threading the environment.  Generators
    produced by the sub-results are kept, at adjusted offsets, for the
    next pass.
    """
    gs, env = expand_one(gen, envir, kernel)
    current = gs.source
    pending = []
    delta = 0
    for region, sub in gs.generators:
        sub_gs, env = expand_one(sub, env, kernel)
        placed = region.shift(delta)
        current = substitute_region(current, placed, sub_gs.source)
        for r, g in sub_gs.generators:
            pending.append((r.shift(placed.start - 1), g))
        delta += len(sub_gs.source.code) - len(region)
    return GeneratorSource(current, pending)


def expand_generator(gen: Generator, envir: EnvValue, kernel) -> HyperSource:
    """Expand to a plain hyper-source, or fail after EXPANSION_LIMIT passes."""
    gs = drop_and_eval(gen, envir, kernel)
    passes = 1
    while gs.generators:
        passes += 1
        if passes > EXPANSION_LIMIT:
            raise GenError("expansion did not terminate")
        gs = drop_and_eval(literal_generator(gs), envir, kernel)
    return gs.source


def eval_with_string(gen: Generator, text: str, kernel) -> HyperSource:
    """Expand against a fresh environment holding only stringVal."""
    env = EnvValue()
    env.define("stringVal", text, STRING, mutable=False)
    return expand_generator(gen, env, kernel)


def compile_and_process(hs: HyperSource, consumer, kernel):
    """Compile a hyper-source and hand the resulting any-box to consumer."""
    box = kernel.compile_hyper(hs)
    kernel.call(consumer, [box])


# Marker types for generator values crossing into the language.
GENERATOR_REP = VariantType((("generator-value", NULL),))
GENERATOR_SOURCE_REP = VariantType((("generator-source", NULL),))


def box_generator(gen: Generator) -> AnyValue:
    return AnyValue(GENERATOR_REP, gen)


def unbox_generator(box) -> Generator:
    if isinstance(box, AnyValue) and isinstance(box.value, Generator):
        return box.value
    if isinstance(box, Generator):
        return box
    raise GenError("expected a generator value")


def box_generator_source(gs: GeneratorSource) -> AnyValue:
    return AnyValue(GENERATOR_SOURCE_REP, gs)


def box_hyper(hs: HyperSource) -> AnyValue:
    return AnyValue(HYPER_SOURCE_REP, hs)
