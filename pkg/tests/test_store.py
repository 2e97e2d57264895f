"""Store snapshots: identity, reachability, and byte-stable round trips."""

import pytest

from hpk.hyperprog import ValueBinding
from hpk.kernel import Kernel
from hpk.lang.values import AnyValue, BuiltinClosure, StructureValue
from hpk.store import StoreError, StoreImage, path_of, resolve_path
from hpk.typerep import INT, STRING, ProcType, StructureType
from hpk.workbench.browser import display_value


def ev(kernel, text):
    return kernel.run_box(kernel.compile_string(text))


def reload(kernel, tmp_path, name="snap.hpk"):
    p = tmp_path / name
    kernel.image.stabilize(str(p))
    return Kernel(image=StoreImage.load(str(p)))


def test_environment_values_round_trip(kernel, tmp_path):
    ev(kernel, "in PS() let a := 41")
    ev(kernel, 'in PS() let s = struct( n = 7 ; tag = "hi" )')
    ev(kernel, "in PS() let v = @1 of [ 10, 20, 30 ]")
    k2 = reload(kernel, tmp_path)
    assert ev(k2, "use PS() with a : int in a + 1") == 42
    assert ev(k2, "use PS() with s : structure( n : int ; tag : string ) in s( tag )") == "hi"
    assert ev(k2, "use PS() with v : *int in v( 2 )") == 20


def test_closure_cell_state_survives(kernel, tmp_path):
    ev(kernel, """let c := 0
in PS() let bump = proc( -> int )
begin
c := c + 1
c
end""")
    assert ev(kernel, "use PS() with bump : proc( -> int ) in bump()") == 1
    assert ev(kernel, "use PS() with bump : proc( -> int ) in bump()") == 2
    k2 = reload(kernel, tmp_path)
    assert ev(k2, "use PS() with bump : proc( -> int ) in bump()") == 3


def test_source_attachment_survives(kernel, tmp_path):
    ev(kernel, "let a := 5\nin PS() let f = proc( b : int -> int ) ; a + b")
    k2 = reload(kernel, tmp_path)
    f = resolve_path(k2.image, "/f").value
    src = k2.get_proc_source(f)
    assert src.code == "proc( b : int -> int ) ; a + b"
    (_, binding), = src.substitutions
    assert binding.frame.slots[binding.slot].value == 5
    assert k2.call(f, [2]) == 7


def test_aliases_stay_aliases(kernel, tmp_path):
    ev(kernel, "in PS() let s1 = struct( n = 1 )")
    ev(kernel, "use PS() with s1 : structure( n : int ) in in PS() let s2 = s1")
    k2 = reload(kernel, tmp_path)
    assert resolve_path(k2.image, "/s1").value is resolve_path(k2.image, "/s2").value
    got = ev(k2, """use PS() with s1 : structure( n : int ) ; s2 : structure( n : int ) in
begin
s1( n ) := 9
s2( n )
end""")
    assert got == 9


def test_snapshot_bytes_are_idempotent(kernel, tmp_path):
    ev(kernel, "in PS() let a := 41")
    ev(kernel, "let c := 0\nin PS() let bump = proc( -> int ) begin c := c + 1 c end")
    p1 = tmp_path / "one.hpk"
    p2 = tmp_path / "two.hpk"
    kernel.image.stabilize(str(p1))
    k2 = Kernel(image=StoreImage.load(str(p1)))
    k2.image.stabilize(str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_collect_drops_unreachable(kernel):
    ev(kernel, "in PS() let tmp := struct( n = 1 )")
    old = resolve_path(kernel.image, "/tmp").value
    old_id = kernel.image.id_of(old)
    ev(kernel, "use PS() with tmp : structure( n : int ) in tmp := struct( n = 2 )")
    kernel.image.collect()
    assert kernel.image.lookup(old_id) is None
    new_id = kernel.image.id_of(resolve_path(kernel.image, "/tmp").value)
    assert kernel.image.lookup(new_id) is not None


def test_retained_objects_survive_collect(kernel):
    s = StructureValue(StructureType((("n", INT),)), [3])
    oid = kernel.image.id_of(s)
    kernel.image.retain(s)
    kernel.image.collect()
    assert kernel.image.lookup(oid) is s
    kernel.image.release(s)
    kernel.image.collect()
    assert kernel.image.lookup(oid) is None


def test_shared_bindings_are_roots(kernel):
    s = StructureValue(StructureType((("n", INT),)), [4])
    kernel.add_shared_binding("keepMe", ValueBinding(s.type_rep, s))
    oid = kernel.image.id_of(s)
    kernel.image.collect()
    assert kernel.image.lookup(oid) is s
    kernel.remove_shared_binding("keepMe")
    kernel.image.collect()
    assert kernel.image.lookup(oid) is None


def test_loaded_image_refuses_unknown_builtin(kernel, tmp_path):
    ghost = BuiltinClosure("noSuchBuiltin", ProcType((), INT), lambda: 0)
    kernel.image.root.define("ghost", ghost, ghost.proc_type, mutable=False)
    p = tmp_path / "bad.hpk"
    kernel.image.stabilize(str(p))
    image = StoreImage.load(str(p))
    with pytest.raises(StoreError, match="unknown builtin: noSuchBuiltin"):
        Kernel(image=image)


def test_display_cache_survives_without_recompiles(kernel, tmp_path):
    box = ev(kernel, 'any( struct( n = 1 ; tag = "x" ) )')
    display_value(kernel, box)
    assert kernel.display_compiles == 1
    k2 = reload(kernel, tmp_path)
    box2 = ev(k2, 'any( struct( n = 2 ; tag = "y" ) )')
    display_value(k2, box2)
    assert k2.display_compiles == 0


def test_path_of_walks_containers(kernel):
    ev(kernel, 'in PS() let s = struct( n = 1 ; inner = struct( m = 2 ) )')
    ev(kernel, "in PS() let v = @3 of [ struct( k = 1 ), struct( k = 2 ) ]")
    ev(kernel, "in PS() let w = variant( variant( some : structure( q : int ) ; none : null ) ; some = struct( q = 5 ) )")
    image = kernel.image
    assert path_of(image, image.root) == ""
    s = resolve_path(image, "/s").value
    assert path_of(image, s) == "/s"
    assert path_of(image, s.get("inner")) == "/s.inner"
    v = resolve_path(image, "/v").value
    assert path_of(image, v.cells[1].value) == "/v[4]"
    w = resolve_path(image, "/w").value
    assert path_of(image, w.payload) == "/w!some"
    orphan = StructureValue(StructureType((("z", INT),)), [0])
    assert path_of(image, orphan) is None


def test_resolve_path_reports_bad_steps(kernel):
    ev(kernel, "in PS() let s = struct( n = 1 )")
    ev(kernel, "in PS() let v = @1 of [ 7 ]")
    with pytest.raises(StoreError):
        resolve_path(kernel.image, "/absent")
    with pytest.raises(StoreError):
        resolve_path(kernel.image, "/s.noField")
    with pytest.raises(StoreError):
        resolve_path(kernel.image, "/v[9]")
    with pytest.raises(StoreError):
        resolve_path(kernel.image, "/s!branch")


def test_location_resolution_and_mutability_flags(kernel):
    ev(kernel, "in PS() let fixed = 1")
    ev(kernel, "in PS() let open := 2")
    loc = resolve_path(kernel.image, "/open", want="location")
    assert loc.env is kernel.image.root and loc.name == "open"
    assert kernel.image.root.lookup("open").mutable
    assert not kernel.image.root.lookup("fixed").mutable
    t = resolve_path(kernel.image, "/open", want="type")
    assert t.type_rep is INT or t.type_rep == INT
