/** Workspace model: windows, arrows, universes, and the highlight.
 *
 * At most one window or menu entry is highlighted at a time; the
 * current selection (a value, a location, or a type) is derived from
 * that highlight plus what the highlighted window displays.
 */

import { DisplayJson, EntryJson, ProcSourceJson } from "./api";
import { EditorBuffer } from "./editor";
import { ScalarKind } from "./links";

export type WindowKind =
  | "valueMenu"
  | "scalarOut"
  | "editor"
  | "generatorEditor"
  | "testPanel"
  | "universe";

export interface WindowModel {
  id: number;
  kind: WindowKind;
  title: string;
  x: number;
  y: number;
  w: number;
  h: number;
  visible: boolean;
  parentUniverse: number | null;
  /** Object id or store path this window displays, when any. */
  objectRef: number | string | null;
  /** Store path when the window was reached by named steps from root. */
  path: string | null;
  display: DisplayJson | null;
  /** Written type of the displayed object, when known. */
  typeText: string | null;
  /** Marks scalar windows holding special text. */
  contentKind: "plain" | "type" | "error";
  editor: EditorBuffer | null;
  source: ProcSourceJson | null;
}

export type Selection =
  | {
      sort: "value";
      windowId: number;
      ref: number | string | null;
      typeText: string | null;
      scalarText: string | null;
      path: string | null;
    }
  | {
      sort: "location";
      windowId: number;
      locKind: "envLocation" | "structLocation" | "vectorLocation";
      name: string;
      path: string | null;
      typeText: string;
      target: number | null;
    }
  | { sort: "type"; windowId: number; typeText: string };

export interface Arrow {
  from: number;
  to: number;
}

const SCALAR_KINDS: ScalarKind[] = ["int", "real", "bool", "string", "null"];

export function isScalarType(t: string | null): t is ScalarKind {
  return t !== null && (SCALAR_KINDS as string[]).includes(t);
}

/** Split a menu label "name : typeText" at its first separator. */
export function splitLabel(label: string): { name: string; typeText: string } {
  const i = label.indexOf(" : ");
  if (i < 0) return { name: label, typeText: "" };
  return { name: label.slice(0, i), typeText: label.slice(i + 3) };
}

function childPath(win: WindowModel, entry: EntryJson): string | null {
  if (win.path === null || win.display === null) return null;
  const d = win.display;
  if (d.kind !== "menu") return null;
  const { name } = splitLabel(entry.label);
  if (d.title === "env") return `${win.path}/${name}`;
  if (d.title === "structure") return `${win.path}.${name}`;
  if (d.title === "elements") {
    const m = /^element (-?\d+) /.exec(entry.label);
    return m ? `${win.path}[${m[1]}]` : null;
  }
  if (d.title === "variant" && entry.selectable) return `${win.path}!${name}`;
  return null;
}

function locationKind(
  title: string,
): "envLocation" | "structLocation" | "vectorLocation" | null {
  if (title === "env") return "envLocation";
  if (title === "structure") return "structLocation";
  if (title === "elements") return "vectorLocation";
  return null;
}

export class Workspace {
  private nextId = 1;
  windows = new Map<number, WindowModel>();
  order: number[] = [];
  arrows: Arrow[] = [];
  highlight: { windowId: number; entry: number | null } | null = null;
  private placeAt = { x: 24, y: 24 };

  addWindow(init: Partial<WindowModel> & { kind: WindowKind }): WindowModel {
    const win: WindowModel = {
      id: this.nextId++,
      title: "",
      x: this.placeAt.x,
      y: this.placeAt.y,
      w: 260,
      h: 180,
      visible: true,
      parentUniverse: null,
      objectRef: null,
      path: null,
      display: null,
      typeText: null,
      contentKind: "plain",
      editor: null,
      source: null,
      ...init,
    };
    this.placeAt = { x: (this.placeAt.x + 40) % 560, y: (this.placeAt.y + 32) % 400 };
    this.windows.set(win.id, win);
    this.order.push(win.id);
    return win;
  }

  get(id: number): WindowModel {
    const win = this.windows.get(id);
    if (win === undefined) throw new Error(`no window ${id}`);
    return win;
  }

  closeWindow(id: number): void {
    this.windows.delete(id);
    this.order = this.order.filter((w) => w !== id);
    this.arrows = this.arrows.filter((a) => a.from !== id && a.to !== id);
    if (this.highlight !== null && this.highlight.windowId === id) {
      this.highlight = null;
    }
    for (const win of this.windows.values()) {
      if (win.parentUniverse === id) win.parentUniverse = null;
    }
  }

  addArrow(from: number, to: number): void {
    this.arrows.push({ from, to });
  }

  /** Arrows whose two ends are both visible; others get a stub glyph. */
  visibleArrows(): Arrow[] {
    return this.arrows.filter(
      (a) => this.windows.get(a.from)?.visible && this.windows.get(a.to)?.visible,
    );
  }

  stubbedArrows(): Arrow[] {
    return this.arrows.filter(
      (a) =>
        this.windows.has(a.from) &&
        this.windows.has(a.to) &&
        !(this.windows.get(a.from)?.visible && this.windows.get(a.to)?.visible),
    );
  }

  /** Replaces any previous highlight: the invariant lives here. */
  setHighlight(windowId: number, entry: number | null): void {
    this.get(windowId);
    this.highlight = { windowId, entry };
  }

  clearHighlight(): void {
    this.highlight = null;
  }

  raise(id: number): void {
    this.order = this.order.filter((w) => w !== id);
    this.order.push(id);
  }

  inUniverse(universeId: number): WindowModel[] {
    return [...this.windows.values()].filter(
      (w) => w.parentUniverse === universeId,
    );
  }

  selection(): Selection | null {
    if (this.highlight === null) return null;
    const win = this.windows.get(this.highlight.windowId);
    if (win === undefined) return null;
    if (this.highlight.entry === null) return this.windowSelection(win);
    return this.entrySelection(win, this.highlight.entry);
  }

  private windowSelection(win: WindowModel): Selection | null {
    if (win.contentKind === "type" && win.display?.kind === "scalarText") {
      return { sort: "type", windowId: win.id, typeText: win.display.text };
    }
    const scalarText =
      win.display?.kind === "scalarText" ? win.display.text : null;
    return {
      sort: "value",
      windowId: win.id,
      ref: win.objectRef,
      typeText: win.typeText,
      scalarText,
      path: win.path,
    };
  }

  private entrySelection(win: WindowModel, index: number): Selection | null {
    const d = win.display;
    if (d === null || d.kind === "scalarText") return null;
    const entry = d.entries[index];
    if (entry === undefined) return null;
    const { name, typeText } = splitLabel(entry.label);
    if (d.kind === "menu") {
      const locKind = locationKind(d.title);
      if (locKind !== null) {
        return {
          sort: "location",
          windowId: win.id,
          locKind,
          name,
          path: childPath(win, entry),
          typeText,
          target: entry.target,
        };
      }
    }
    return {
      sort: "value",
      windowId: win.id,
      ref: entry.target,
      typeText: typeText || null,
      scalarText: null,
      path: childPath(win, entry),
    };
  }

  /** Path and type an entry's target would have, without highlighting. */
  entryInfo(
    winId: number,
    index: number,
  ): { name: string; path: string | null; typeText: string | null } {
    const win = this.get(winId);
    const d = win.display;
    if (d === null || d.kind === "scalarText") {
      return { name: "", path: null, typeText: null };
    }
    const entry = d.entries[index];
    if (entry === undefined) return { name: "", path: null, typeText: null };
    const { name, typeText } = splitLabel(entry.label);
    return { name, path: childPath(win, entry), typeText: typeText || null };
  }
}
