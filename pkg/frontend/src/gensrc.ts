// Generator editor model: a form describing a code generator, plus the
// operations behind its buttons. "Generate code" expands the form against
// test parameter values by evaluating code panes through the service and
// splicing the fragments client-side. "Compose" emits an installable
// program whose value is a procedure from an environment of parameters to
// a source fragment.

import type { WorkbenchApi, EvalResult } from "./api";
import type { Atom } from "./links";
import { HsrcError, hasTokens, plainText, serializeHsrc } from "./links";

export class GeneratorError extends Error {}

// Mirrors the language lexer: identifiers are a letter followed by
// letters or digits, and must not collide with a keyword.
const KEYWORDS = new Set([
  "let", "type", "is", "in", "use", "with", "proc", "begin", "end",
  "project", "as", "onto", "default", "if", "then", "else", "do",
  "for", "to", "while", "struct", "true", "false", "nil",
  "and", "or", "upb", "lwb", "of", "any",
  "int", "real", "bool", "string", "null", "env", "typerep", "set",
  "structure", "variant", "vector",
]);

export function isIdentifier(text: string): boolean {
  return /^[A-Za-z][A-Za-z0-9]*$/.test(text) && !KEYWORDS.has(text);
}

// String literal escapes use a leading quote character.
export function quoteString(text: string): string {
  const body = text
    .replace(/'/g, "''")
    .replace(/"/g, "'\"")
    .replace(/\n/g, "'n")
    .replace(/\t/g, "'t");
  return '"' + body + '"';
}

export interface GenParam {
  name: string;
  typeText: string;
}

export interface ResultRow {
  name: string;
  expr: Atom[];
}

// A G: button embedded in a literal result pane.
export interface GenButton {
  childId: number;
  label: string;
}

// Literal panes hold fixed text (one atom per character) with embedded
// buttons; links belong in the code panes, not here.
export type PieceAtom = string | GenButton;

export function isButton(a: PieceAtom): a is GenButton {
  return typeof a !== "string";
}

export interface GeneratorForm {
  name: string;
  valueParams: GenParam[];
  typeParams: string[];
  preludeBody: Atom[];
  resultRows: ResultRow[];
  outputEnv: "unchanged" | "new";
  resultMode: "literal" | "expression";
  literal: PieceAtom[];
  expression: Atom[];
  children: Map<number, GeneratorForm>;
}

export function mkForm(name: string): GeneratorForm {
  return {
    name,
    valueParams: [],
    typeParams: [],
    preludeBody: [],
    resultRows: [],
    outputEnv: "unchanged",
    resultMode: "literal",
    literal: [],
    expression: [],
    children: new Map(),
  };
}

export function literalFromText(text: string): PieceAtom[] {
  return [...text];
}

export function literalText(form: GeneratorForm): string {
  return form.literal
    .map((a) => (typeof a === "string" ? a : "⟦G:" + a.label + "⟧"))
    .join("");
}

let nextChildId = 1;

// Carves the selected text out of a literal pane, replacing it with a G:
// button wired to a fresh child form. The selection [from, to) is in atom
// positions and must cover plain text only.
export function subGeneratorSplit(
  form: GeneratorForm,
  from: number,
  to: number,
): number {
  if (form.resultMode !== "literal") {
    throw new GeneratorError("sub-generator applies to a literal result");
  }
  if (from < 0 || to > form.literal.length || from >= to) {
    throw new GeneratorError("select the text to replace first");
  }
  const slice = form.literal.slice(from, to);
  if (slice.some(isButton)) {
    throw new GeneratorError("selection already contains a sub-generator");
  }
  const label = (slice as string[]).join("").trim();
  if (!isIdentifier(label)) {
    throw new GeneratorError(
      "selected text must be a plain name to become a sub-generator",
    );
  }
  for (const child of form.children.values()) {
    if (child.name === label) {
      throw new GeneratorError(`a sub-generator named ${label} already exists`);
    }
  }
  const childId = nextChildId;
  nextChildId += 1;
  const child = mkForm(label);
  child.resultMode = "expression";
  form.children.set(childId, child);
  form.literal.splice(from, to - from, { childId, label });
  return childId;
}

// test panel

export interface TestRow {
  name: string;
  value: string;
}

export type GenResult =
  | { ok: true; text: string }
  | { ok: false; message: string };

interface EnvRow {
  name: string;
  expr: Atom[];
}

function paramNames(form: GeneratorForm): string[] {
  return [...form.valueParams.map((p) => p.name), ...form.typeParams];
}

function nonblank(atoms: Atom[]): boolean {
  return hasTokens(atoms) || plainText(atoms).trim() !== "";
}

function letRows(rows: EnvRow[]): Atom[] {
  const out: Atom[] = [];
  for (const row of rows) {
    out.push("let " + row.name + " = ", ...row.expr, "\n");
  }
  return out;
}

async function postProgram(
  api: WorkbenchApi,
  program: Atom[],
): Promise<EvalResult | { status: "compileError"; message: string }> {
  if (!hasTokens(program)) {
    return api.evalText(plainText(program));
  }
  try {
    return await api.evalHsrc(serializeHsrc(program));
  } catch (err) {
    if (err instanceof HsrcError) {
      return { status: "compileError", message: err.message };
    }
    throw err;
  }
}

async function release(api: WorkbenchApi, id: number): Promise<void> {
  try {
    await api.releaseResult(id);
  } catch {
    // the result root is service-side bookkeeping; dropping it is best effort
  }
}

async function readFragment(
  api: WorkbenchApi,
  program: Atom[],
): Promise<GenResult> {
  const res = await postProgram(api, program);
  if (res.status !== "ok") {
    return { ok: false, message: res.message };
  }
  if (res.id === null) {
    return { ok: false, message: "result definition produced no value" };
  }
  let shown = await api.getObject(res.id);
  if (shown.kind === "menu" && shown.title === "any") {
    // an any-typed result displays as a one-entry menu over its contents
    const entry = shown.entries[0];
    if (entry !== undefined && entry.selectable && entry.target !== null) {
      shown = await api.getObject(entry.target);
    }
  }
  await release(api, res.id);
  if (shown.kind !== "scalarText") {
    return { ok: false, message: "result is not a code fragment" };
  }
  return { ok: true, text: shown.text };
}

async function expandForm(
  api: WorkbenchApi,
  form: GeneratorForm,
  inherited: EnvRow[],
): Promise<GenResult> {
  const prefix = letRows(inherited);
  if (form.resultMode === "expression") {
    const program = [...prefix];
    if (nonblank(form.preludeBody)) {
      program.push(...form.preludeBody, "\n");
    }
    program.push(...letRows(form.resultRows), ...form.expression);
    return readFragment(api, program);
  }
  if (nonblank(form.preludeBody)) {
    // each expansion is a fresh program, so the prelude body runs here for
    // its effects; its value, if any, is discarded
    const res = await postProgram(api, [...prefix, ...form.preludeBody]);
    if (res.status !== "ok") {
      return { ok: false, message: res.message };
    }
    if (res.id !== null) {
      await release(api, res.id);
    }
  }
  const rows = form.resultRows.map((r) => ({ name: r.name, expr: r.expr }));
  const childEnv =
    form.outputEnv === "unchanged" ? [...inherited, ...rows] : rows;
  let text = "";
  for (const a of form.literal) {
    if (typeof a === "string") {
      text += a;
      continue;
    }
    const child = form.children.get(a.childId);
    if (child === undefined) {
      return { ok: false, message: `sub-generator ${a.label} is missing` };
    }
    const piece = await expandForm(api, child, childEnv);
    if (!piece.ok) {
      return piece;
    }
    text += piece.text;
  }
  return { ok: true, text };
}

// Expands the generator against the given parameter values. Values are
// source expressions evaluated through the service; fragments produced by
// sub-generators are spliced into the literal text client-side.
export async function generateCode(
  api: WorkbenchApi,
  form: GeneratorForm,
  rows: TestRow[],
): Promise<GenResult> {
  const inherited: EnvRow[] = [];
  for (const name of paramNames(form)) {
    const row = rows.find((r) => r.name === name);
    if (row === undefined || row.value.trim() === "") {
      return { ok: false, message: `no test value for parameter ${name}` };
    }
    inherited.push({ name, expr: [row.value] });
  }
  return expandForm(api, form, inherited);
}

// compose

function checkForm(form: GeneratorForm, names: Set<string>): void {
  for (const p of form.valueParams) {
    if (!isIdentifier(p.name)) {
      throw new GeneratorError(`parameter name ${p.name || "(empty)"} is not a plain name`);
    }
    if (p.typeText.trim() === "") {
      throw new GeneratorError(`parameter ${p.name} needs a type`);
    }
  }
  for (const t of form.typeParams) {
    if (!isIdentifier(t)) {
      throw new GeneratorError(`parameter name ${t || "(empty)"} is not a plain name`);
    }
  }
  const seen = new Set<string>();
  for (const name of paramNames(form)) {
    if (seen.has(name)) {
      throw new GeneratorError(`duplicate parameter ${name}`);
    }
    seen.add(name);
  }
  for (const row of form.resultRows) {
    if (!isIdentifier(row.name)) {
      throw new GeneratorError(`result name ${row.name || "(empty)"} is not a plain name`);
    }
  }
  if (form.resultMode === "expression") {
    if (!nonblank(form.expression)) {
      throw new GeneratorError(`generator ${form.name} has an empty result expression`);
    }
    return;
  }
  const rowNames = form.resultRows.map((r) => r.name);
  const passed =
    form.outputEnv === "unchanged"
      ? new Set([...names, ...paramNames(form), ...rowNames])
      : new Set(rowNames);
  for (const a of form.literal) {
    if (typeof a === "string") {
      continue;
    }
    const child = form.children.get(a.childId);
    if (child === undefined) {
      throw new GeneratorError(`sub-generator ${a.label} is missing`);
    }
    for (const p of paramNames(child)) {
      if (!passed.has(p)) {
        throw new GeneratorError(
          `parameter ${p} of sub-generator ${child.name} is not produced by the enclosing prelude`,
        );
      }
    }
    checkForm(child, passed);
  }
}

function paramGroups(form: GeneratorForm): string {
  const groups = [
    ...form.valueParams.map((p) => p.name + " : " + p.typeText.trim()),
    ...form.typeParams.map((t) => t + " : typerep"),
  ];
  return groups.join(" ; ");
}

function emitResult(form: GeneratorForm): Atom[] {
  if (form.resultMode === "expression") {
    return [...form.expression];
  }
  const terms: Atom[][] = [];
  let text = "";
  const flush = () => {
    if (text !== "") {
      terms.push(["mkHyperSource( " + quoteString(text) + " )"]);
      text = "";
    }
  };
  for (const a of form.literal) {
    if (typeof a === "string") {
      text += a;
      continue;
    }
    flush();
    const child = form.children.get(a.childId)!;
    const args = paramNames(child);
    terms.push([child.name + "( " + args.join(", ") + " )"]);
  }
  flush();
  if (terms.length === 0) {
    return ['mkHyperSource( "" )'];
  }
  let out = terms[0]!;
  for (const term of terms.slice(1)) {
    out = ["concatHyperSource( ", ...out, ", ", ...term, " )"];
  }
  return out;
}

function emitBody(form: GeneratorForm): Atom[] {
  const decls: Atom[] = [];
  if (nonblank(form.preludeBody)) {
    decls.push(...form.preludeBody, "\n");
  }
  decls.push(...letRows(form.resultRows));
  for (const a of form.literal) {
    if (typeof a === "string") {
      continue;
    }
    const child = form.children.get(a.childId)!;
    decls.push("let " + child.name + " = ", ...emitChild(child), "\n");
  }
  const result = emitResult(form);
  if (decls.length === 0) {
    return result;
  }
  return ["begin\n", ...decls, ...result, "\nend"];
}

function emitChild(form: GeneratorForm): Atom[] {
  const groups = paramGroups(form);
  const header = groups === "" ? "proc( -> any ) ; " : `proc( ${groups} -> any ) ; `;
  return [header, ...emitBody(form)];
}

// Emits a program that installs the generator in the store as a procedure
// from a parameter environment to a source fragment. Sub-generators become
// nested procedures taking their declared parameters. The emitted atoms may
// contain link tokens carried over from the form's code panes.
export function composeProgram(form: GeneratorForm): Atom[] {
  if (!isIdentifier(form.name)) {
    throw new GeneratorError("the generator needs a plain name");
  }
  checkForm(form, new Set());
  const groups = paramGroups(form);
  const body = emitBody(form);
  const head = `in PS() let ${form.name} = proc( e : env -> any ) ; `;
  if (groups === "") {
    return [head, ...body];
  }
  return [head + `use e with ${groups} in\n`, ...body];
}
