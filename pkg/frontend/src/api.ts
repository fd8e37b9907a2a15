import type { ApiClient, InferRequest, InferResponse, KbExport } from "./types.js";

export class HttpError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // keep the status text
    }
    throw new HttpError(resp.status, `${resp.status}: ${detail}`);
  }
  return (await resp.json()) as T;
}

export class HttpApiClient implements ApiClient {
  constructor(private base: string = "") {}

  async getKb(): Promise<KbExport> {
    return asJson(await fetch(`${this.base}/kb`));
  }

  async infer(request: InferRequest): Promise<InferResponse> {
    return asJson(
      await fetch(`${this.base}/infer`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(request),
      }),
    );
  }
}
