/** Link tokens and the .hsrc exchange rendering.
 *
 * A token stands for one binding to the store and is handled by the
 * editor as a single character.  Serialization must byte-match the
 * service's own rendering so exported text re-imports anywhere: tokens
 * are numbered in region order and each binding line is JSON with
 * sorted keys and Python's separators.
 */

export type ScalarKind = "int" | "real" | "bool" | "string" | "null";

export type Binding =
  | { kind: "value"; scalar: ScalarKind; value: number | string | boolean | null }
  | { kind: "value"; path: string; type: string }
  | { kind: "value"; builtin: string; type: string }
  | { kind: "value"; typeText: string }
  | { kind: "envLocation"; path: string; type: string }
  | { kind: "structLocation"; path: string; type: string }
  | { kind: "vectorLocation"; path: string; type: string }
  | { kind: "aType"; typeText: string };

export interface LinkToken {
  id: number;
  label: string;
  /** Null when a retrieved source token could not be matched to a
   * session binding; such a buffer cannot be evaluated or exported. */
  binding: Binding | null;
}

let nextTokenId = 1;

export function mkToken(label: string, binding: Binding | null): LinkToken {
  return { id: nextTokenId++, label, binding };
}

/** Clone for paste: a distinct token sharing the same binding. */
export function cloneToken(tok: LinkToken): LinkToken {
  return { id: nextTokenId++, label: tok.label, binding: tok.binding };
}

export function tokenPrefix(tok: LinkToken): string {
  const b = tok.binding;
  if (b === null) return "?:";
  if (b.kind === "aType") return "T:";
  const typed = "type" in b ? b.type : null;
  if (typed === "env") return "E:";
  if (b.kind === "value") return "V:";
  return "L:";
}

export type Atom = string | LinkToken;

export function isToken(a: Atom): a is LinkToken {
  return typeof a !== "string";
}

export class HsrcError extends Error {}

const MAGIC = "hsrc 1";
const SEPARATOR = "---bindings---";

/** Tags a number that must render with Python's float syntax; plain
 * String() would drop ".0" from integral doubles. */
export class PyReal {
  constructor(readonly n: number) {}
}

/** JSON rendering matching Python's json.dumps(sort_keys=True,
 * ensure_ascii=False): keys sorted, ", " and ": " separators. */
export function pyJson(value: unknown): string {
  if (value === null) return "null";
  if (typeof value === "boolean") return value ? "true" : "false";
  if (value instanceof PyReal) return pyReal(value.n);
  if (typeof value === "number") {
    if (!Number.isFinite(value)) throw new HsrcError(`not JSON-renderable: ${value}`);
    return String(value);
  }
  if (typeof value === "string") return JSON.stringify(value);
  if (Array.isArray(value)) {
    return `[${value.map(pyJson).join(", ")}]`;
  }
  const obj = value as Record<string, unknown>;
  const parts = Object.keys(obj)
    .sort()
    .map((k) => `${JSON.stringify(k)}: ${pyJson(obj[k])}`);
  return `{${parts.join(", ")}}`;
}

export function pyReal(n: number): string {
  if (!Number.isFinite(n)) throw new HsrcError(`not JSON-renderable: ${n}`);
  if (Object.is(n, -0)) return "-0.0";
  // toExponential() gives the shortest round-trip digits; re-lay them out
  // with Python's thresholds (fixed for -4 <= e < 16) and padded exponent
  const m = /^(-?)(\d)(?:\.(\d+))?e([+-]\d+)$/.exec(n.toExponential());
  if (m === null) throw new HsrcError(`not JSON-renderable: ${n}`);
  const sign = m[1]!;
  const digits = m[2]! + (m[3] ?? "");
  const exp = parseInt(m[4]!, 10);
  if (exp >= -4 && exp < 16) {
    if (exp >= digits.length - 1) {
      return sign + digits + "0".repeat(exp - (digits.length - 1)) + ".0";
    }
    if (exp >= 0) {
      return sign + digits.slice(0, exp + 1) + "." + digits.slice(exp + 1);
    }
    return sign + "0." + "0".repeat(-exp - 1) + digits;
  }
  const mant = m[3] === undefined ? m[2]! : m[2]! + "." + m[3];
  const es = String(Math.abs(exp)).padStart(2, "0");
  return sign + mant + "e" + (exp < 0 ? "-" : "+") + es;
}

function bindingLine(token: number, label: string, b: Binding): string {
  const desc: Record<string, unknown> = { token, label, kind: b.kind };
  if (b.kind === "aType") {
    desc.typeText = b.typeText;
  } else if (b.kind === "value") {
    if ("scalar" in b) {
      desc.scalar = b.scalar;
      desc.value = b.scalar === "real" && typeof b.value === "number"
        ? new PyReal(b.value)
        : b.value;
    } else if ("builtin" in b) {
      desc.builtin = b.builtin;
      desc.type = b.type;
    } else if ("path" in b) {
      desc.path = b.path;
      desc.type = b.type;
    } else {
      desc.typeText = b.typeText;
    }
  } else {
    desc.path = b.path;
    desc.type = b.type;
  }
  return pyJson(desc);
}

/** Render an editor buffer as .hsrc exchange text. */
export function serializeHsrc(atoms: Atom[]): string {
  const codeParts: string[] = [];
  const lines: string[] = [];
  let k = 0;
  for (const a of atoms) {
    if (isToken(a)) {
      if (a.binding === null) {
        throw new HsrcError(`token without a known binding: ${a.label}`);
      }
      if (a.label.length === 0) {
        throw new HsrcError("token label is empty");
      }
      k += 1;
      codeParts.push(`⟦${k}⟧`);
      lines.push(bindingLine(k, a.label, a.binding));
    } else {
      if (a.includes("⟦") || a.includes("⟧")) {
        throw new HsrcError("code already contains link tokens");
      }
      codeParts.push(a);
    }
  }
  const body = codeParts.join("");
  if (body.split("\n").some((line) => line === SEPARATOR)) {
    throw new HsrcError("code contains the binding separator line");
  }
  return [MAGIC, body, SEPARATOR, ...lines].join("\n") + "\n";
}

/** Plain text of a buffer, labels standing in for tokens. */
export function plainText(atoms: Atom[]): string {
  return atoms.map((a) => (isToken(a) ? a.label : a)).join("");
}

export function hasTokens(atoms: Atom[]): boolean {
  return atoms.some(isToken);
}
