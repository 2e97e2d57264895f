/** Editing model for hyper-program text.
 *
 * The buffer is a sequence of atoms: ordinary characters and link
 * tokens.  A token occupies one caret position, so cursor movement,
 * deletion, and clipboard work treat it exactly like a character and
 * its binding can never be half-edited.
 */

import {
  Atom,
  HsrcError,
  LinkToken,
  cloneToken,
  hasTokens,
  isToken,
  plainText,
  serializeHsrc,
} from "./links";

export class EditError extends Error {}

export class EditorBuffer {
  private atoms: Atom[] = [];
  caret = 0;
  /** Selection is [from, to) in atom positions; null when empty. */
  selection: { from: number; to: number } | null = null;
  readonly readOnly: boolean;

  constructor(readOnly = false) {
    this.readOnly = readOnly;
  }

  static fromParts(parts: Atom[] | string, readOnly = false): EditorBuffer {
    const buf = new EditorBuffer(readOnly);
    const list = typeof parts === "string" ? [parts] : parts;
    for (const p of list) {
      if (isToken(p)) buf.atoms.push(p);
      else buf.atoms.push(...p);
    }
    buf.caret = buf.atoms.length;
    return buf;
  }

  get length(): number {
    return this.atoms.length;
  }

  view(): readonly Atom[] {
    return this.atoms;
  }

  text(): string {
    return plainText(this.atoms);
  }

  tokens(): LinkToken[] {
    return this.atoms.filter(isToken);
  }

  hasLinks(): boolean {
    return hasTokens(this.atoms);
  }

  toHsrc(): string {
    return serializeHsrc(this.atoms);
  }

  private guard(): void {
    if (this.readOnly) throw new EditError("source window is read-only");
  }

  private clamp(i: number): number {
    return Math.max(0, Math.min(this.atoms.length, i));
  }

  setCaret(i: number): void {
    this.caret = this.clamp(i);
    this.selection = null;
  }

  select(from: number, to: number): void {
    const a = this.clamp(Math.min(from, to));
    const b = this.clamp(Math.max(from, to));
    this.selection = a === b ? null : { from: a, to: b };
    this.caret = b;
  }

  /** Position just after the end of the buffer. */
  end(): number {
    return this.atoms.length;
  }

  private spliceSelection(): void {
    if (this.selection !== null) {
      const { from, to } = this.selection;
      this.atoms.splice(from, to - from);
      this.caret = from;
      this.selection = null;
    }
  }

  insertText(s: string): void {
    this.guard();
    this.spliceSelection();
    this.atoms.splice(this.caret, 0, ...s);
    this.caret += s.length;
  }

  insertToken(tok: LinkToken): void {
    this.guard();
    this.spliceSelection();
    this.atoms.splice(this.caret, 0, tok);
    this.caret += 1;
  }

  backspace(): void {
    this.guard();
    if (this.selection !== null) {
      this.spliceSelection();
      return;
    }
    if (this.caret === 0) return;
    this.atoms.splice(this.caret - 1, 1);
    this.caret -= 1;
  }

  deleteForward(): void {
    this.guard();
    if (this.selection !== null) {
      this.spliceSelection();
      return;
    }
    if (this.caret >= this.atoms.length) return;
    this.atoms.splice(this.caret, 1);
  }

  /** Copy returns the selected atoms; tokens keep their binding. */
  copy(): Atom[] {
    if (this.selection === null) return [];
    const { from, to } = this.selection;
    return this.atoms.slice(from, to);
  }

  cut(): Atom[] {
    this.guard();
    const out = this.copy();
    this.spliceSelection();
    return out;
  }

  /** Paste inserts fresh token objects that share the source bindings. */
  paste(clip: Atom[]): void {
    this.guard();
    this.spliceSelection();
    const copies = clip.map((a) => (isToken(a) ? cloneToken(a) : a));
    this.atoms.splice(this.caret, 0, ...copies);
    this.caret += copies.length;
  }

  /** Relabeling never touches the binding. */
  editLabel(tokenId: number, label: string): void {
    this.guard();
    if (label.length === 0) throw new EditError("token label cannot be empty");
    const tok = this.tokens().find((t) => t.id === tokenId);
    if (tok === undefined) throw new EditError(`no token ${tokenId}`);
    tok.label = label;
  }

  tokenAt(pos: number): LinkToken | null {
    const a = this.atoms[pos];
    return a !== undefined && isToken(a) ? a : null;
  }

  /** Atom position of a token by id, or -1. */
  positionOf(tokenId: number): number {
    return this.atoms.findIndex((a) => isToken(a) && a.id === tokenId);
  }

  /** Labels of tokens a serialization would refuse. */
  unresolvedLabels(): string[] {
    return this.tokens()
      .filter((t) => t.binding === null)
      .map((t) => t.label);
  }

  ensureSerializable(): void {
    const bad = this.unresolvedLabels();
    if (bad.length > 0) {
      throw new HsrcError(`tokens without a known binding: ${bad.join(", ")}`);
    }
  }
}
