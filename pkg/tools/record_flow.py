"""Records service traffic behind the scripted browser-client flows.

Drives the real service in process with the exact request sequences the
client emits, writing cassettes and golden artifacts for its test suite:

    frontend/testdata/flow.json              browse, link, evaluate round trip
    frontend/testdata/compose.hsrc           the artifact exported by that flow
    frontend/testdata/genflow.json           generator expansion and install
    frontend/testdata/compose_generator.txt  composed generator install text

Each step stores the request and the response verbatim; the client tests
replay the responses while asserting the requests byte for byte, and the
service tests replay the requests against a fresh kernel asserting the
responses. Regenerate with: python3 tools/record_flow.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from hpk.hyperprog import concat_all, mk_env_loc_link, mk_hyper_source
from hpk.kernel import Kernel, is_error_box
from hpk.workbench.hsrc import render_hsrc
from hpk.workbench.service import build_app

TESTDATA = Path(__file__).resolve().parent.parent / "frontend" / "testdata"

FLOW_SEEDS = [
    "in PS() let count := 0",
    'in PS() let greeting := "hello"',
]

E1_EXPECTED = (
    "hsrc 1\n"
    "in PS() let inc := proc( ) ; ⟦1⟧ := ⟦2⟧ + 1\n"
    "---bindings---\n"
    '{"kind": "envLocation", "label": "count", "path": "/count", "token": 1, "type": "int"}\n'
    '{"kind": "envLocation", "label": "count", "path": "/count", "token": 2, "type": "int"}\n'
)

E2_EXPECTED = (
    "hsrc 1\n"
    "⟦1⟧ := proc( ) ; ⟦2⟧ := ⟦3⟧ + 2\n"
    "---bindings---\n"
    '{"kind": "envLocation", "label": "inc", "path": "/inc", "token": 1, "type": "proc()"}\n'
    '{"kind": "envLocation", "label": "count", "path": "/count", "token": 2, "type": "int"}\n'
    '{"kind": "envLocation", "label": "count", "path": "/count", "token": 3, "type": "int"}\n'
)

VERIFY_TEXT = (
    "use PS() with inc : proc( ) ; count : int in begin inc() inc() count end"
)

GENERATED = "proc( x : real → real ) ; x + 1.0"

CHILD_PROGRAM = (
    'let bodyText = "x + 1.0"\n'
    "let expr = mkHyperSource( bodyText )\n"
    "expr"
)

BAD_CHILD_PROGRAM = (
    "let bodyText = 3\n"
    "let expr = mkHyperSource( bodyText )\n"
    "expr"
)

COMPOSED = (
    "in PS() let mkFun = proc( e : env -> any ) ; use e with bodyText : string in\n"
    "begin\n"
    "let expr = mkHyperSource( bodyText )\n"
    "let body = proc( expr : any -> any ) ; expr\n"
    'concatHyperSource( mkHyperSource( "proc( x : real → real ) ; " ), body( expr ) )\n'
    "end"
)

SEED_BODYTEXT = 'in PS() let bodyText = "x + 1.0"'

CALL_TEXT = "use PS() with mkFun : proc( env -> any ) in mkFun( PS() )"


class Recorder:
    def __init__(self, client):
        self.client = client
        self.steps = []

    def request(self, method, path, body=None):
        if body is None:
            res = self.client.request(method, path)
        else:
            res = self.client.request(method, path, json=body)
        self.steps.append({
            "method": method,
            "path": path,
            "body": body,
            "status": res.status_code,
            "response": res.json(),
        })
        return res.json()


def seeded_kernel(seeds):
    kernel = Kernel()
    for text in seeds:
        box = kernel.compile_string(text)
        assert not is_error_box(box), box.value
        kernel.run_box(box)
    return kernel


def entry_index(menu, prefix):
    for i, e in enumerate(menu["entries"]):
        if e["label"].startswith(prefix):
            return i
    raise AssertionError(f"no entry starting {prefix!r} in {menu}")


def record_flow():
    kernel = seeded_kernel(FLOW_SEEDS)
    root_env = kernel.image.root
    e1 = render_hsrc(kernel, concat_all([
        mk_hyper_source("in PS() let inc := proc( ) ; "),
        mk_env_loc_link(root_env, "count"),
        mk_hyper_source(" := "),
        mk_env_loc_link(root_env, "count"),
        mk_hyper_source(" + 1"),
    ]))
    assert e1 == E1_EXPECTED, f"drifted:\n{e1}"

    rec = Recorder(TestClient(build_app(kernel)))
    root = rec.request("GET", "/root")
    menu1 = rec.request("GET", f"/object/{root['id']}")
    assert entry_index(menu1, "count :") == 0
    r3 = rec.request("POST", "/eval", {"hsrc": e1})
    assert r3 == {"status": "ok", "id": None, "typeText": "void"}, r3

    e2 = render_hsrc(kernel, concat_all([
        mk_env_loc_link(root_env, "inc"),
        mk_hyper_source(" := proc( ) ; "),
        mk_env_loc_link(root_env, "count"),
        mk_hyper_source(" := "),
        mk_env_loc_link(root_env, "count"),
        mk_hyper_source(" + 2"),
    ]))
    assert e2 == E2_EXPECTED, f"drifted:\n{e2}"

    menu2 = rec.request("GET", f"/object/{root['id']}")
    inc_entry = menu2["entries"][entry_index(menu2, "inc :")]
    assert inc_entry["label"] == "inc : proc()"
    proc_menu = rec.request("GET", f"/object/{inc_entry['target']}")
    assert proc_menu["kind"] == "procMenu"
    closure_id = proc_menu["entries"][0]["target"]
    source = rec.request("GET", f"/proc/{closure_id}/source")
    assert source["text"] == "proc( ) ; count := count + 1", source
    assert [t["kind"] for t in source["tokens"]] == ["envLocation"] * 2

    r7 = rec.request("POST", "/eval", {"hsrc": e2})
    assert r7 == {"status": "ok", "id": None, "typeText": "void"}, r7
    r8 = rec.request("POST", "/eval", {"text": VERIFY_TEXT})
    assert r8["status"] == "ok" and r8["typeText"] == "int", r8
    shown = rec.request("GET", f"/object/{r8['id']}")
    assert shown == {"kind": "scalarText", "text": "4"}, shown

    return {"seeds": FLOW_SEEDS, "steps": rec.steps}, e2


def record_genflow():
    kernel = seeded_kernel([])
    rec = Recorder(TestClient(build_app(kernel)))

    g1 = rec.request("POST", "/eval", {"text": CHILD_PROGRAM})
    assert g1["status"] == "ok" and g1["typeText"] == "any", g1
    wrap = rec.request("GET", f"/object/{g1['id']}")
    assert wrap["kind"] == "menu" and wrap["title"] == "any", wrap
    inner = rec.request("GET", f"/object/{wrap['entries'][0]['target']}")
    assert inner == {"kind": "scalarText", "text": "x + 1.0"}, inner
    rec.request("DELETE", f"/result/{g1['id']}")

    g5 = rec.request("POST", "/eval", {"text": GENERATED})
    assert g5["status"] == "ok" and g5["typeText"] == "proc( real -> real )", g5
    shown = rec.request("GET", f"/object/{g5['id']}")
    assert shown["kind"] == "procMenu", shown

    g7 = rec.request("POST", "/eval", {"text": COMPOSED})
    assert g7 == {"status": "ok", "id": None, "typeText": "void"}, g7
    g8 = rec.request("POST", "/eval", {"text": SEED_BODYTEXT})
    assert g8["status"] == "ok" and g8["id"] is None, g8
    g9 = rec.request("POST", "/eval", {"text": CALL_TEXT})
    assert g9["status"] == "ok" and g9["typeText"] == "any", g9
    wrap2 = rec.request("GET", f"/object/{g9['id']}")
    assert wrap2["kind"] == "menu" and wrap2["title"] == "any", wrap2
    inner2 = rec.request("GET", f"/object/{wrap2['entries'][0]['target']}")
    assert inner2 == {"kind": "scalarText", "text": GENERATED}, inner2

    bad = rec.request("POST", "/eval", {"text": BAD_CHILD_PROGRAM})
    assert bad["status"] == "compileError", bad

    return {"seeds": [], "steps": rec.steps}


def dump(name, data):
    path = TESTDATA / name
    path.write_text(data, encoding="utf-8")
    print(f"wrote {path}")


def main():
    TESTDATA.mkdir(parents=True, exist_ok=True)
    flow, e2 = record_flow()
    dump("flow.json", json.dumps(flow, indent=1, ensure_ascii=False) + "\n")
    dump("compose.hsrc", e2)
    genflow = record_genflow()
    dump("genflow.json", json.dumps(genflow, indent=1, ensure_ascii=False) + "\n")
    dump("compose_generator.txt", COMPOSED + "\n")


if __name__ == "__main__":
    main()
