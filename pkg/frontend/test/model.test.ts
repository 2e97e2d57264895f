import { describe, expect, it } from "vitest";
import { DisplayJson } from "../src/api";
import { Workspace, splitLabel } from "../src/model";

const envMenu: DisplayJson = {
  kind: "menu",
  title: "env",
  entries: [
    { label: "count : int", selectable: true, target: 4 },
    { label: "inc : proc()", selectable: true, target: 6 },
  ],
};

const structMenu: DisplayJson = {
  kind: "menu",
  title: "structure",
  entries: [{ label: "name : string", selectable: true, target: 9 }],
};

const variantMenu: DisplayJson = {
  kind: "menu",
  title: "variant",
  entries: [
    { label: "some : int", selectable: true, target: 3 },
    { label: "none : null", selectable: false, target: null },
  ],
};

describe("splitLabel", () => {
  it("splits at the first separator only", () => {
    expect(splitLabel("f : proc( int -> int )")).toEqual({
      name: "f",
      typeText: "proc( int -> int )",
    });
    expect(splitLabel("bounds")).toEqual({ name: "bounds", typeText: "" });
  });
});

describe("Workspace highlight", () => {
  it("keeps at most one window or entry highlighted", () => {
    const ws = new Workspace();
    const a = ws.addWindow({ kind: "valueMenu", display: envMenu, path: "" });
    const b = ws.addWindow({ kind: "scalarOut" });
    ws.setHighlight(a.id, 0);
    expect(ws.highlight).toEqual({ windowId: a.id, entry: 0 });
    ws.setHighlight(b.id, null);
    expect(ws.highlight).toEqual({ windowId: b.id, entry: null });
    ws.setHighlight(a.id, 1);
    expect(ws.highlight).toEqual({ windowId: a.id, entry: 1 });
  });

  it("clears the highlight when its window closes", () => {
    const ws = new Workspace();
    const a = ws.addWindow({ kind: "valueMenu", display: envMenu, path: "" });
    ws.setHighlight(a.id, 0);
    ws.closeWindow(a.id);
    expect(ws.highlight).toBeNull();
    expect(ws.selection()).toBeNull();
  });
});

describe("Workspace selection", () => {
  it("derives a location from an env menu entry", () => {
    const ws = new Workspace();
    const a = ws.addWindow({ kind: "valueMenu", display: envMenu, path: "" });
    ws.setHighlight(a.id, 0);
    expect(ws.selection()).toEqual({
      sort: "location",
      windowId: a.id,
      locKind: "envLocation",
      name: "count",
      path: "/count",
      typeText: "int",
      target: 4,
    });
  });

  it("derives structure and variant paths", () => {
    const ws = new Workspace();
    const s = ws.addWindow({ kind: "valueMenu", display: structMenu, path: "/p" });
    expect(ws.entryInfo(s.id, 0).path).toBe("/p.name");
    const v = ws.addWindow({ kind: "valueMenu", display: variantMenu, path: "/q" });
    expect(ws.entryInfo(v.id, 0).path).toBe("/q!some");
    ws.setHighlight(v.id, 0);
    expect(ws.selection()).toMatchObject({ sort: "value", path: "/q!some" });
  });

  it("derives element locations from an elements menu", () => {
    const ws = new Workspace();
    const e = ws.addWindow({
      kind: "valueMenu",
      path: "/v",
      display: {
        kind: "menu",
        title: "elements",
        entries: [{ label: "element 3 : int", selectable: true, target: 12 }],
      },
    });
    ws.setHighlight(e.id, 0);
    expect(ws.selection()).toMatchObject({
      sort: "location",
      locKind: "vectorLocation",
      path: "/v[3]",
      typeText: "int",
    });
  });

  it("selects a value when a window border is highlighted", () => {
    const ws = new Workspace();
    const w = ws.addWindow({
      kind: "scalarOut",
      objectRef: 10,
      typeText: "int",
      display: { kind: "scalarText", text: "4" },
      path: null,
    });
    ws.setHighlight(w.id, null);
    expect(ws.selection()).toEqual({
      sort: "value",
      windowId: w.id,
      ref: 10,
      typeText: "int",
      scalarText: "4",
      path: null,
    });
  });

  it("selects a type from a show-type window", () => {
    const ws = new Workspace();
    const w = ws.addWindow({
      kind: "scalarOut",
      contentKind: "type",
      display: { kind: "scalarText", text: "vector int" },
    });
    ws.setHighlight(w.id, null);
    expect(ws.selection()).toEqual({
      sort: "type",
      windowId: w.id,
      typeText: "vector int",
    });
  });
});

describe("Workspace arrows and universes", () => {
  it("splits arrows into visible and stubbed", () => {
    const ws = new Workspace();
    const a = ws.addWindow({ kind: "valueMenu" });
    const b = ws.addWindow({ kind: "scalarOut" });
    const c = ws.addWindow({ kind: "scalarOut" });
    ws.addArrow(a.id, b.id);
    ws.addArrow(a.id, c.id);
    expect(ws.visibleArrows()).toHaveLength(2);
    c.visible = false;
    expect(ws.visibleArrows()).toEqual([{ from: a.id, to: b.id }]);
    expect(ws.stubbedArrows()).toEqual([{ from: a.id, to: c.id }]);
  });

  it("drops arrows with a closed end", () => {
    const ws = new Workspace();
    const a = ws.addWindow({ kind: "valueMenu" });
    const b = ws.addWindow({ kind: "scalarOut" });
    ws.addArrow(a.id, b.id);
    ws.closeWindow(b.id);
    expect(ws.arrows).toEqual([]);
  });

  it("groups windows by universe and orphans them on close", () => {
    const ws = new Workspace();
    const u = ws.addWindow({ kind: "universe" });
    const a = ws.addWindow({ kind: "valueMenu", parentUniverse: u.id });
    const b = ws.addWindow({ kind: "valueMenu", parentUniverse: null });
    expect(ws.inUniverse(u.id).map((w) => w.id)).toEqual([a.id]);
    ws.closeWindow(u.id);
    expect(ws.get(a.id).parentUniverse).toBeNull();
    expect(ws.get(b.id).parentUniverse).toBeNull();
  });

  it("raises windows to the top of the stacking order", () => {
    const ws = new Workspace();
    const a = ws.addWindow({ kind: "valueMenu" });
    const b = ws.addWindow({ kind: "valueMenu" });
    ws.raise(a.id);
    expect(ws.order).toEqual([b.id, a.id]);
  });
});
