import { describe, expect, it } from "vitest";
import { EditError, EditorBuffer } from "../src/editor";
import { Binding, mkToken } from "../src/links";

const COUNT: Binding = { kind: "envLocation", path: "/count", type: "int" };

function bufWithToken(): { buf: EditorBuffer; tokId: number } {
  const buf = new EditorBuffer();
  buf.insertText("a := ");
  const tok = mkToken("count", COUNT);
  buf.insertToken(tok);
  buf.insertText(" + 1");
  return { buf, tokId: tok.id };
}

describe("EditorBuffer", () => {
  it("treats a token as a single caret position", () => {
    const { buf, tokId } = bufWithToken();
    expect(buf.length).toBe(10);
    expect(buf.positionOf(tokId)).toBe(5);
    expect(buf.text()).toBe("a := count + 1");
    buf.setCaret(6);
    buf.backspace();
    expect(buf.tokens()).toHaveLength(0);
    expect(buf.text()).toBe("a :=  + 1");
  });

  it("deletes a selection as a unit", () => {
    const { buf } = bufWithToken();
    buf.select(2, 6);
    buf.insertText("=");
    expect(buf.text()).toBe("a = + 1");
    expect(buf.tokens()).toHaveLength(0);
  });

  it("copy and paste keep the binding, with fresh token identity", () => {
    const { buf, tokId } = bufWithToken();
    buf.select(5, 6);
    const clip = buf.copy();
    buf.setCaret(buf.end());
    buf.paste(clip);
    buf.paste(clip);
    const toks = buf.tokens();
    expect(toks).toHaveLength(3);
    expect(new Set(toks.map((t) => t.id)).size).toBe(3);
    for (const t of toks) expect(t.binding).toBe(COUNT);
    expect(toks.some((t) => t.id === tokId)).toBe(true);
  });

  it("cut removes the atoms it returns", () => {
    const { buf } = bufWithToken();
    buf.select(5, 10);
    const clip = buf.cut();
    expect(clip).toHaveLength(5);
    expect(buf.text()).toBe("a := ");
    const other = new EditorBuffer();
    other.paste(clip);
    expect(other.text()).toBe("count + 1");
    expect(other.tokens()[0]!.binding).toBe(COUNT);
  });

  it("relabeling a token never touches its binding", () => {
    const { buf, tokId } = bufWithToken();
    buf.editLabel(tokId, "theCounter");
    expect(buf.text()).toBe("a := theCounter + 1");
    expect(buf.tokens()[0]!.binding).toBe(COUNT);
    expect(() => buf.editLabel(tokId, "")).toThrow(EditError);
  });

  it("read-only buffers reject every edit", () => {
    const buf = EditorBuffer.fromParts(["frozen"], true);
    expect(() => buf.insertText("x")).toThrow(/read-only/);
    expect(() => buf.backspace()).toThrow(EditError);
    expect(() => buf.paste(["y"])).toThrow(EditError);
    expect(() => buf.cut()).toThrow(EditError);
    expect(buf.copy()).toEqual([]);
    buf.select(0, 3);
    expect(buf.copy()).toEqual(["f", "r", "o"]);
  });

  it("flags unresolved tokens before serialization", () => {
    const buf = new EditorBuffer();
    buf.insertToken(mkToken("orphan", null));
    expect(buf.unresolvedLabels()).toEqual(["orphan"]);
    expect(() => buf.ensureSerializable()).toThrow(/orphan/);
    expect(() => buf.toHsrc()).toThrow(/orphan/);
  });
});
