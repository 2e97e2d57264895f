/** Typed client for the workbench HTTP/JSON interface.
 *
 * The transport is injectable so tests can play recorded traffic; the
 * shapes here mirror the service's responses field for field.
 */

export interface EntryJson {
  label: string;
  selectable: boolean;
  target: number | null;
}

export interface ScalarTextJson {
  kind: "scalarText";
  text: string;
}

export interface MenuJson {
  kind: "menu";
  title: string;
  entries: EntryJson[];
}

export interface ProcMenuJson {
  kind: "procMenu";
  entries: EntryJson[];
}

export interface VectorMenuJson {
  kind: "vectorMenu";
  lwb: number;
  upb: number;
  entries: EntryJson[];
}

export type DisplayJson =
  | ScalarTextJson
  | MenuJson
  | ProcMenuJson
  | VectorMenuJson;

export interface EvalOk {
  status: "ok";
  id: number | null;
  typeText: string;
}

export interface EvalError {
  status: "compileError" | "runtimeFault";
  message: string;
}

export type EvalResult = EvalOk | EvalError;

export interface SourceTokenJson {
  region: { start: number; finish: number };
  label: string;
  kind: string;
  targetId?: number;
  typeText?: string;
}

export interface ProcSourceJson {
  text: string;
  tokens: SourceTokenJson[];
}

export interface Transport {
  request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<{ status: number; json: unknown }>;
}

export class HttpTransport implements Transport {
  constructor(private base: string = "") {}

  async request(method: string, path: string, body?: unknown) {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await fetch(this.base + path, init);
    let json: unknown = null;
    try {
      json = await res.json();
    } catch {
      json = null;
    }
    return { status: res.status, json };
  }
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

function detail(json: unknown): string {
  if (json && typeof json === "object" && "detail" in json) {
    return String((json as { detail: unknown }).detail);
  }
  return "request failed";
}

export class WorkbenchApi {
  constructor(private transport: Transport) {}

  private async get<T>(path: string): Promise<T> {
    const r = await this.transport.request("GET", path);
    if (r.status !== 200) throw new ApiError(detail(r.json), r.status);
    return r.json as T;
  }

  private async send<T>(method: string, path: string, body: unknown): Promise<T> {
    const r = await this.transport.request(method, path, body);
    if (r.status !== 200) throw new ApiError(detail(r.json), r.status);
    return r.json as T;
  }

  getRoot(): Promise<{ id: number; typeText: string }> {
    return this.get("/root");
  }

  getObject(ref: number | string): Promise<DisplayJson> {
    return this.get(`/object/${ref}`);
  }

  getObjectType(ref: number | string): Promise<{ typeText: string }> {
    return this.get(`/object/${ref}/type`);
  }

  getProcSource(id: number): Promise<ProcSourceJson> {
    return this.get(`/proc/${id}/source`);
  }

  async evalText(text: string): Promise<EvalResult> {
    return this.send("POST", "/eval", { text });
  }

  async evalHsrc(hsrc: string): Promise<EvalResult> {
    return this.send("POST", "/eval", { hsrc });
  }

  releaseResult(id: number): Promise<{ released: number }> {
    return this.send("DELETE", `/result/${id}`, undefined);
  }

  sharedList(): Promise<{ names: string[] }> {
    return this.get("/shared-table");
  }

  sharedAdd(name: string, path: string): Promise<{ names: string[] }> {
    return this.send("POST", "/shared-table", { name, path });
  }

  sharedRemove(name: string): Promise<{ names: string[] }> {
    return this.send("DELETE", `/shared-table/${name}`, undefined);
  }

  stabilize(path: string): Promise<{ path: string }> {
    return this.send("POST", "/admin/stabilize", { path });
  }

  load(path: string): Promise<{ path: string; rootId: number }> {
    return this.send("POST", "/admin/load", { path });
  }
}
