"""HTTP facade over one kernel and its store.

Every route serializes on the kernel lock, so evaluations and admin
actions never interleave.  Responses carry object ids, never live
references; a UI navigates by asking for the display model of an id.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from ..hyperprog import (
    EnvLocBinding,
    FrameLocBinding,
    LinkError,
    StructLocBinding,
    TypeBinding,
    ValueBinding,
    VecLocBinding,
)
from ..kernel import RuntimeFault, is_error_box
from ..lang.values import AnyValue, Closure, VOID
from ..store import StoreError, StoreImage, resolve_path
from ..typerep import ENV, write_type
from .browser import BrowserError, describe_object
from .hsrc import HsrcError, parse_hsrc


class EvalBody(BaseModel):
    text: str | None = None
    hsrc: str | None = None


class SharedBody(BaseModel):
    name: str
    path: str


class PathBody(BaseModel):
    path: str


def root_box(kernel) -> AnyValue:
    """Stable boxed root environment for the current image."""
    box = getattr(kernel, "_root_box", None)
    if box is None or box.value is not kernel.image.root:
        box = AnyValue(ENV, kernel.image.root)
        kernel._root_box = box
    return box


def _parse_ref(ref: str):
    try:
        return int(ref)
    except ValueError:
        return ref


def _token_target(kernel, binding) -> dict:
    image = kernel.image
    if isinstance(binding, TypeBinding):
        return {"kind": "aType", "typeText": write_type(binding.type_rep)}
    if isinstance(binding, ValueBinding):
        box = AnyValue(binding.type_rep, binding.value)
        return {"kind": "value", "targetId": image.id_of(box)}
    if isinstance(binding, EnvLocBinding):
        b = binding.env.lookup(binding.name)
        box = AnyValue(binding.type_rep, b.cell.value)
        return {"kind": "envLocation", "targetId": image.id_of(box)}
    if isinstance(binding, StructLocBinding):
        ft = binding.container.type_rep.field_type(binding.field)
        box = AnyValue(ft, binding.container.cells[binding.field].value)
        return {"kind": "structLocation", "targetId": image.id_of(box)}
    if isinstance(binding, VecLocBinding):
        et = binding.container.type_rep.elem
        box = AnyValue(et, binding.container.cell_at(binding.index).value)
        return {"kind": "vectorLocation", "targetId": image.id_of(box)}
    if isinstance(binding, FrameLocBinding):
        box = AnyValue(binding.type_rep,
                       binding.frame.slots[binding.slot].value)
        return {"kind": "frameLocation", "targetId": image.id_of(box)}
    return {"kind": "unknown"}


def proc_source_json(kernel, closure) -> dict:
    hs = kernel.get_proc_source(closure)
    if hs is None:
        raise HTTPException(404, "procedure has no recoverable source")
    tokens = []
    for region, binding in sorted(hs.substitutions, key=lambda rb: rb[0].start):
        tok = {"region": {"start": region.start, "finish": region.finish},
               "label": hs.code[region.start - 1:region.finish]}
        tok.update(_token_target(kernel, binding))
        tokens.append(tok)
    return {"text": hs.code, "tokens": tokens}


def eval_descriptor(kernel, body: EvalBody) -> dict:
    if (body.text is None) == (body.hsrc is None):
        raise HTTPException(400, "provide exactly one of text, hsrc")
    if body.hsrc is not None:
        try:
            hyper = parse_hsrc(kernel, body.hsrc)
        except HsrcError as exc:
            return {"status": "compileError", "message": str(exc)}
        box = kernel.compile_hyper(hyper)
    else:
        box = kernel.compile_string(body.text)
    if is_error_box(box):
        return {"status": "compileError", "message": box.value}
    try:
        value = kernel.run_box(box)
    except (RuntimeFault, LinkError) as exc:
        return {"status": "runtimeFault", "message": str(exc)}
    result_type = box.type_rep.result
    if result_type is None or value is VOID:
        return {"status": "ok", "id": None, "typeText": "void"}
    result = AnyValue(result_type, value)
    kernel.image.retain(result)
    return {"status": "ok", "id": kernel.image.id_of(result),
            "typeText": write_type(result_type)}


def build_app(kernel) -> FastAPI:
    app = FastAPI(title="hpk workbench")

    @app.get("/root")
    def get_root():
        with kernel.lock:
            box = root_box(kernel)
            return {"id": kernel.image.id_of(box), "typeText": "env"}

    @app.get("/object/{ref:path}/type")
    def get_object_type(ref: str):
        with kernel.lock:
            parsed = _parse_ref(ref)
            if isinstance(parsed, int):
                box = kernel.image.lookup(parsed)
                if box is None:
                    raise HTTPException(404, f"unknown object: {parsed}")
                t = box.type_rep if isinstance(box, AnyValue) else None
                if t is None:
                    from ..lang.values import value_type

                    t = value_type(box)
                return {"typeText": write_type(t)}
            try:
                b = resolve_path(kernel.image, parsed, want="type")
            except StoreError as exc:
                raise HTTPException(404, str(exc)) from exc
            return {"typeText": write_type(b.type_rep)}

    @app.get("/object/{ref:path}")
    def get_object(ref: str):
        with kernel.lock:
            try:
                model = describe_object(kernel, _parse_ref(ref))
            except (BrowserError, StoreError) as exc:
                raise HTTPException(404, str(exc)) from exc
            return model.to_json()

    @app.get("/proc/{oid}/source")
    def get_proc_source(oid: int):
        with kernel.lock:
            box = kernel.image.lookup(oid)
            if box is None:
                raise HTTPException(404, f"unknown object: {oid}")
            f = box.value if isinstance(box, AnyValue) else box
            if not isinstance(f, Closure):
                raise HTTPException(404, "not a procedure")
            return proc_source_json(kernel, f)

    @app.post("/eval")
    def post_eval(body: EvalBody):
        with kernel.lock:
            return eval_descriptor(kernel, body)

    @app.delete("/result/{oid}")
    def delete_result(oid: int):
        with kernel.lock:
            box = kernel.image.lookup(oid)
            if box is None or box not in kernel.image.retained:
                raise HTTPException(404, f"no retained result: {oid}")
            kernel.image.release(box)
            return {"released": oid}

    @app.get("/shared-table")
    def list_shared():
        with kernel.lock:
            return {"names": kernel.image.shared.names()}

    @app.post("/shared-table")
    def add_shared(body: SharedBody):
        with kernel.lock:
            try:
                binding = resolve_path(kernel.image, body.path,
                                       want="location")
            except StoreError as exc:
                raise HTTPException(404, str(exc)) from exc
            kernel.add_shared_binding(body.name, binding)
            return {"names": kernel.image.shared.names()}

    @app.delete("/shared-table/{name}")
    def remove_shared(name: str):
        with kernel.lock:
            try:
                kernel.remove_shared_binding(name)
            except StoreError as exc:
                raise HTTPException(404, str(exc)) from exc
            return {"names": kernel.image.shared.names()}

    @app.post("/admin/stabilize")
    def admin_stabilize(body: PathBody):
        with kernel.lock:
            try:
                kernel.image.stabilize(body.path)
            except (StoreError, OSError) as exc:
                raise HTTPException(400, str(exc)) from exc
            return {"path": body.path}

    @app.post("/admin/load")
    def admin_load(body: PathBody):
        with kernel.lock:
            try:
                image = StoreImage.load(body.path)
                kernel.attach_image(image)
            except (StoreError, OSError) as exc:
                raise HTTPException(400, str(exc)) from exc
            box = root_box(kernel)
            return {"path": body.path, "rootId": kernel.image.id_of(box)}

    return app
