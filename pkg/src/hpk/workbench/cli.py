"""Command line entry points for the workbench.

repl   read, evaluate, print against a store
eval   run one source or .hsrc file
demo   generate and run the natural join end to end
serve  expose the HTTP facade
"""

from __future__ import annotations

import argparse
import os
import sys

from .. import join as J
from ..kernel import Kernel, RuntimeFault, is_error_box
from ..lang.values import AnyValue, StructureValue, VectorValue, VOID
from ..store import StoreImage
from ..typerep import INT, STRING, StructureType, VectorType, write_type
from .browser import BrowserError, describe_value, render_text
from .hsrc import HsrcError, parse_hsrc


def open_kernel(store: str | None) -> Kernel:
    if store and os.path.exists(store):
        return Kernel(StoreImage.load(store))
    return Kernel()


def save_if_asked(kernel: Kernel, store: str | None) -> None:
    if store:
        kernel.image.stabilize(store)


def drain_output(kernel: Kernel) -> str:
    out = "".join(kernel.interp.output)
    kernel.interp.output.clear()
    return out


def show_result(kernel: Kernel, box: AnyValue, out) -> None:
    if box.value is VOID or box.type_rep is None:
        return
    try:
        model = describe_value(kernel, box)
    except BrowserError as exc:
        print(f"<{exc}>", file=out)
        return
    print(render_text(model), file=out)


def eval_and_show(kernel: Kernel, source, out, err) -> bool:
    box = kernel.compile_string(source)
    if is_error_box(box):
        print(box.value, file=err)
        return False
    try:
        value = kernel.run_box(box)
    except RuntimeFault as exc:
        sys.stdout.write(drain_output(kernel))
        print(f"fault: {exc}", file=err)
        return False
    text = drain_output(kernel)
    if text:
        out.write(text if text.endswith("\n") else text + "\n")
    result_type = box.type_rep.result
    if result_type is not None and value is not VOID:
        show_result(kernel, AnyValue(result_type, value), out)
    return True


def cmd_repl(args) -> int:
    kernel = open_kernel(args.store)
    print("workbench repl; blank line or EOF ends the session")
    while True:
        try:
            line = input("hpk> ")
        except EOFError:
            print()
            break
        if not line.strip():
            break
        eval_and_show(kernel, line, sys.stdout, sys.stderr)
    save_if_asked(kernel, args.store)
    return 0


def cmd_eval(args) -> int:
    kernel = open_kernel(args.store)
    try:
        with open(args.file, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        print(exc, file=sys.stderr)
        return 1
    if args.file.endswith(".hsrc"):
        try:
            source = parse_hsrc(kernel, text)
        except HsrcError as exc:
            print(exc, file=sys.stderr)
            return 1
    else:
        source = text
    if not eval_and_show(kernel, source, sys.stdout, sys.stderr):
        return 1
    save_if_asked(kernel, args.store)
    return 0


DEMO_T1 = StructureType((("name", STRING), ("dept", STRING)))
DEMO_T2 = StructureType((("dept", STRING), ("head", STRING)))
DEMO_ROWS1 = [("ann", "sales"), ("bob", "labs"), ("cid", "sales")]
DEMO_ROWS2 = [("sales", "dee"), ("labs", "eve"), ("ops", "fay")]


def cmd_demo(args) -> int:
    if args.what != "natural-join":
        print(f"unknown demo: {args.what}", file=sys.stderr)
        return 2
    kernel = open_kernel(args.store)
    hs = J.mk_join_source(kernel, DEMO_T1, DEMO_T2)
    print("generated join procedure:")
    print(hs.code)
    print()
    v1 = VectorValue(VectorType(DEMO_T1), 1,
                     [StructureValue(DEMO_T1, r) for r in DEMO_ROWS1])
    v2 = VectorValue(VectorType(DEMO_T2), 1,
                     [StructureValue(DEMO_T2, r) for r in DEMO_ROWS2])
    result = J.natural_join(kernel, v1, v2)
    got = sorted((e.get("name"), e.get("dept"), e.get("head"))
                 for e in result.elems)
    want = sorted((n, d1, h) for n, d1 in DEMO_ROWS1
                  for d2, h in DEMO_ROWS2 if d1 == d2)
    for name, dept, head in got:
        print(f"  {name} works in {dept} under {head}")
    ok = got == want
    print("PASS" if ok else f"FAIL: expected {want}")
    save_if_asked(kernel, args.store)
    return 0 if ok else 1


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    kernel = open_kernel(args.store)
    uvicorn.run(build_app(kernel), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hpk",
                                description="persistent kernel workbench")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("repl", help="interactive evaluation")
    r.add_argument("--store", help="store file to load and save")
    r.set_defaults(fn=cmd_repl)

    e = sub.add_parser("eval", help="evaluate a source or .hsrc file")
    e.add_argument("file")
    e.add_argument("--store", help="store file to load and save")
    e.set_defaults(fn=cmd_eval)

    d = sub.add_parser("demo", help="run a built-in demonstration")
    d.add_argument("what", choices=["natural-join"])
    d.add_argument("--store", help="store file to load and save")
    d.set_defaults(fn=cmd_demo)

    s = sub.add_parser("serve", help="serve the HTTP facade")
    s.add_argument("--store", help="store file to load")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8040)
    s.set_defaults(fn=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
