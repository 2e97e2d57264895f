/** Workbench controller: browsing, highlighting, linking, evaluating.
 *
 * Every mutation of the store goes through the service; windows are
 * only updated from its responses.  The link registry remembers every
 * binding composed in this session so retrieved procedure source can be
 * copied with its links intact.
 */

import {
  DisplayJson,
  EntryJson,
  EvalResult,
  ProcSourceJson,
  SourceTokenJson,
  WorkbenchApi,
} from "./api";
import { EditorBuffer } from "./editor";
import {
  Binding,
  HsrcError,
  LinkToken,
  ScalarKind,
  mkToken,
} from "./links";
import { Selection, WindowModel, Workspace, isScalarType } from "./model";

export class GestureError extends Error {}

interface RegistryEntry {
  kind: string;
  label: string;
  binding: Binding;
}

function parseScalar(kind: ScalarKind, text: string): number | string | boolean | null {
  if (kind === "int") return parseInt(text, 10);
  if (kind === "real") return parseFloat(text);
  if (kind === "bool") return text === "true";
  if (kind === "null") return null;
  return text;
}

function displayTitle(d: DisplayJson, fallback: string): string {
  if (d.kind === "menu") return d.title;
  if (d.kind === "procMenu") return "procedure";
  if (d.kind === "vectorMenu") return `vector @${d.lwb}..${d.upb}`;
  return fallback;
}

/** Container path and entry name for a location path like "/s.x". */
export function splitLocationPath(
  path: string,
): { container: string; name: string } | null {
  const m = /^(.*?)([/.!]([A-Za-z0-9_]+)|\[(-?\d+)\])$/.exec(path);
  if (m === null) return null;
  const name = m[3] !== undefined ? m[3] : `element ${m[4]}`;
  return { container: m[1] ?? "", name };
}

export class Workbench {
  ws = new Workspace();
  clipboard: ReturnType<EditorBuffer["copy"]> = [];
  registry: RegistryEntry[] = [];
  rootUniverse = 0;
  rootWindow = 0;
  status = "";

  constructor(private api: WorkbenchApi) {}

  /** Open the root universe and the root environment menu. */
  async boot(): Promise<WindowModel> {
    const root = await this.api.getRoot();
    const uni = this.ws.addWindow({ kind: "universe", title: "universe" });
    this.rootUniverse = uni.id;
    const win = await this.openObject(root.id, {
      path: "",
      typeText: root.typeText,
      parentUniverse: uni.id,
    });
    this.rootWindow = win.id;
    return win;
  }

  private async openObject(
    ref: number | string,
    opts: {
      path?: string | null;
      typeText?: string | null;
      parentUniverse?: number | null;
      arrowFrom?: number;
      title?: string;
    } = {},
  ): Promise<WindowModel> {
    const display = await this.api.getObject(ref);
    const kind = display.kind === "scalarText" ? "scalarOut" : "valueMenu";
    const win = this.ws.addWindow({
      kind,
      title: opts.title ?? displayTitle(display, opts.typeText ?? "value"),
      objectRef: ref,
      path: opts.path ?? null,
      typeText: opts.typeText ?? null,
      parentUniverse: opts.parentUniverse ?? this.rootUniverse,
      display,
    });
    if (opts.arrowFrom !== undefined) this.ws.addArrow(opts.arrowFrom, win.id);
    return win;
  }

  /** Re-fetch a window's display model in place. */
  async refresh(winId: number): Promise<void> {
    const win = this.ws.get(winId);
    if (win.objectRef === null) throw new GestureError("window has no object");
    win.display = await this.api.getObject(win.objectRef);
  }

  private entryOf(win: WindowModel, index: number): EntryJson {
    const d = win.display;
    if (d === null || d.kind === "scalarText") {
      throw new GestureError("window has no entries");
    }
    const entry = d.entries[index];
    if (entry === undefined) throw new GestureError(`no entry ${index}`);
    return entry;
  }

  /** Select a menu entry: opens its target with a connecting arrow. */
  async navigate(
    winId: number,
    index: number,
    opts: { newUniverse?: boolean } = {},
  ): Promise<WindowModel> {
    const win = this.ws.get(winId);
    const entry = this.entryOf(win, index);
    if (!entry.selectable || entry.target === null) {
      throw new GestureError(`entry is not selectable: ${entry.label}`);
    }
    const info = this.ws.entryInfo(winId, index);
    let parentUniverse = win.parentUniverse;
    if (opts.newUniverse === true) {
      const uni = this.ws.addWindow({
        kind: "universe",
        title: "universe",
        parentUniverse,
      });
      parentUniverse = uni.id;
    }
    const child = await this.openObject(entry.target, {
      path: this.childPathFor(win, entry, info.path),
      typeText: info.typeText,
      parentUniverse,
      arrowFrom: win.id,
      title: entry.label,
    });
    return child;
  }

  /** "all elements" keeps the vector's own path: element steps apply
   * to the vector, not to the entries window. */
  private childPathFor(
    win: WindowModel,
    entry: EntryJson,
    derived: string | null,
  ): string | null {
    if (win.display?.kind === "vectorMenu" && entry.label === "all elements") {
      return win.path;
    }
    return derived;
  }

  highlightEntry(winId: number, index: number): Selection | null {
    const win = this.ws.get(winId);
    this.entryOf(win, index);
    this.ws.setHighlight(winId, index);
    return this.ws.selection();
  }

  highlightWindow(winId: number): Selection | null {
    this.ws.get(winId);
    this.ws.setHighlight(winId, null);
    return this.ws.selection();
  }

  /** "show type": a type window whose highlight selects the type. */
  async showType(winId: number): Promise<WindowModel> {
    const win = this.ws.get(winId);
    if (win.objectRef === null) throw new GestureError("window has no object");
    const { typeText } = await this.api.getObjectType(win.objectRef);
    const child = this.ws.addWindow({
      kind: "scalarOut",
      title: "type",
      contentKind: "type",
      display: { kind: "scalarText", text: typeText },
      parentUniverse: win.parentUniverse,
    });
    this.ws.addArrow(win.id, child.id);
    return child;
  }

  newEditor(): WindowModel {
    return this.ws.addWindow({
      kind: "editor",
      title: "editor",
      editor: new EditorBuffer(),
      parentUniverse: this.rootUniverse,
    });
  }

  editorOf(winId: number): EditorBuffer {
    const win = this.ws.get(winId);
    if (win.editor === null) throw new GestureError("not an editor window");
    return win.editor;
  }

  canLink(): boolean {
    return this.bindingFromSelection(this.ws.selection()) !== null;
  }

  private bindingFromSelection(
    sel: Selection | null,
  ): { binding: Binding; label: string } | null {
    if (sel === null) return null;
    if (sel.sort === "type") {
      return { binding: { kind: "aType", typeText: sel.typeText }, label: "type" };
    }
    if (sel.sort === "location") {
      if (sel.path === null) return null;
      return {
        binding: { kind: sel.locKind, path: sel.path, type: sel.typeText },
        label: sel.name,
      };
    }
    if (isScalarType(sel.typeText) && sel.scalarText !== null) {
      return {
        binding: {
          kind: "value",
          scalar: sel.typeText,
          value: parseScalar(sel.typeText, sel.scalarText),
        },
        label: "value",
      };
    }
    if (sel.typeText === "typerep" && sel.scalarText !== null) {
      return {
        binding: { kind: "value", typeText: sel.scalarText },
        label: "type",
      };
    }
    if (sel.path !== null && sel.path !== "" && sel.typeText !== null) {
      return {
        binding: { kind: "value", path: sel.path, type: sel.typeText },
        label: "value",
      };
    }
    return null;
  }

  /** Press "link" with a selection active: a token appears at the caret. */
  insertLink(editorId: number): LinkToken {
    const made = this.bindingFromSelection(this.ws.selection());
    if (made === null) {
      throw new GestureError("nothing linkable is selected");
    }
    const tok = mkToken(made.label, made.binding);
    this.registry.push({
      kind: made.binding.kind,
      label: made.label,
      binding: made.binding,
    });
    this.editorOf(editorId).insertToken(tok);
    return tok;
  }

  /** Evaluate an editor buffer; results are windows, never guesses. */
  async evaluate(editorId: number): Promise<EvalResult> {
    const buf = this.editorOf(editorId);
    buf.ensureSerializable();
    const result = buf.hasLinks()
      ? await this.api.evalHsrc(buf.toHsrc())
      : await this.api.evalText(buf.text());
    if (result.status !== "ok") {
      const win = this.ws.addWindow({
        kind: "scalarOut",
        title: result.status,
        contentKind: "error",
        display: { kind: "scalarText", text: result.message },
      });
      this.ws.addArrow(editorId, win.id);
      this.status = result.message;
      return result;
    }
    if (result.id === null) {
      this.status = "void";
      return result;
    }
    const win = await this.openObject(result.id, {
      typeText: result.typeText,
      arrowFrom: editorId,
      title: `result : ${result.typeText}`,
    });
    this.status = `result ${win.id}`;
    return result;
  }

  /** Pressing a token highlights what it is linked to. */
  async pressToken(editorId: number, tokenId: number): Promise<void> {
    const buf = this.editorOf(editorId);
    const tok = buf.tokens().find((t) => t.id === tokenId);
    if (tok === undefined || tok.binding === null) return;
    const b = tok.binding;
    if (!("path" in b) || b.path === undefined) return;
    const split = splitLocationPath(b.path);
    if (split === null) return;
    const target = this.findPathWindow(split.container);
    const win =
      target ?? (split.container === ""
        ? this.ws.get(this.rootWindow)
        : await this.openObject(split.container, { path: split.container }));
    const d = win.display;
    if (d === null || d.kind === "scalarText") return;
    const index = d.entries.findIndex((e) =>
      e.label.startsWith(`${split.name} `) || e.label === split.name,
    );
    if (index >= 0) this.ws.setHighlight(win.id, index);
  }

  private findPathWindow(path: string): WindowModel | null {
    for (const win of this.ws.windows.values()) {
      if (win.path === path && win.visible) return win;
    }
    return null;
  }

  /** Open the read-only source window of a procedure. */
  async viewSource(procWinId: number): Promise<WindowModel> {
    const win = this.ws.get(procWinId);
    const d = win.display;
    if (d === null || d.kind !== "procMenu") {
      throw new GestureError("not a procedure window");
    }
    const entry = d.entries[0];
    if (entry === undefined || !entry.selectable || entry.target === null) {
      throw new GestureError("procedure has no recoverable source");
    }
    const source = await this.api.getProcSource(entry.target);
    const buf = this.bufferFromSource(source, true);
    const child = this.ws.addWindow({
      kind: "editor",
      title: "source",
      editor: buf,
      source,
      parentUniverse: win.parentUniverse,
    });
    this.ws.addArrow(win.id, child.id);
    return child;
  }

  /** Rebuild an editor buffer from retrieved source text plus tokens.
   * Bindings come from this session's registry; a token composed
   * elsewhere stays unresolved and blocks evaluation until re-linked. */
  private bufferFromSource(src: ProcSourceJson, readOnly: boolean): EditorBuffer {
    const atoms: (string | LinkToken)[] = [];
    let pos = 1;
    for (const tok of src.tokens) {
      atoms.push(src.text.slice(pos - 1, tok.region.start - 1));
      atoms.push(mkToken(tok.label, this.resolveSourceToken(tok)));
      pos = tok.region.finish + 1;
    }
    atoms.push(src.text.slice(pos - 1));
    return EditorBuffer.fromParts(atoms, readOnly);
  }

  private resolveSourceToken(tok: SourceTokenJson): Binding | null {
    if (tok.kind === "aType" && tok.typeText !== undefined) {
      return { kind: "aType", typeText: tok.typeText };
    }
    if (tok.kind === "frameLocation") return null;
    const hit = this.registry.find(
      (r) => r.kind === tok.kind && r.label === tok.label,
    );
    return hit ? hit.binding : null;
  }

  /** Copy a source window into a fresh editable editor; the copy links
   * the identical targets. */
  copySourceToEditor(sourceWinId: number): WindowModel {
    const win = this.ws.get(sourceWinId);
    if (win.editor === null) throw new GestureError("not a source window");
    const buf = new EditorBuffer();
    buf.paste(win.editor.view().slice());
    const child = this.ws.addWindow({
      kind: "editor",
      title: "editor",
      editor: buf,
      parentUniverse: win.parentUniverse,
    });
    this.ws.addArrow(win.id, child.id);
    return child;
  }

  copy(editorId: number): void {
    this.clipboard = this.editorOf(editorId).copy();
  }

  cut(editorId: number): void {
    this.clipboard = this.editorOf(editorId).cut();
  }

  paste(editorId: number): void {
    this.editorOf(editorId).paste(this.clipboard);
  }

  /** The exported artifact; exactly what evaluate sends for the buffer. */
  exportHsrc(editorId: number): string {
    const buf = this.editorOf(editorId);
    if (!buf.hasLinks()) {
      throw new HsrcError("buffer has no links; export plain text instead");
    }
    return buf.toHsrc();
  }
}
