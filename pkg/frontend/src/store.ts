import type {
  ApiClient,
  FindingEntry,
  InferRequest,
  InferResponse,
  SessionState,
  Sex,
  TriState,
} from "./types.js";

const CYCLE: Record<TriState, TriState> = {
  unknown: "present",
  present: "absent",
  absent: "unknown",
};

export interface StoreOptions {
  debounceMs?: number;
  // injectable timer for tests
  schedule?: (fn: () => void, ms: number) => unknown;
  cancel?: (handle: unknown) => void;
}

/**
 * Session state plus the inference pipeline: every edit schedules one
 * debounced request, and a sequence counter makes sure a superseded
 * response can never overwrite a newer one.  All displayed numbers come
 * verbatim from the last applied response; the store never computes
 * probabilities itself.
 */
export class ConsultStore {
  state: SessionState;
  requestsSent: InferRequest[] = [];

  private listeners: ((state: SessionState) => void)[] = [];
  private seq = 0;
  private appliedSeq = 0;
  private timer: unknown = null;
  private readonly debounceMs: number;
  private readonly schedule: (fn: () => void, ms: number) => unknown;
  private readonly cancel: (handle: unknown) => void;

  constructor(
    private api: ApiClient,
    private symptomIds: string[],
    options: StoreOptions = {},
  ) {
    this.debounceMs = options.debounceMs ?? 200;
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.cancel = options.cancel ?? ((handle) => clearTimeout(handle as number));
    this.state = {
      patient: { age: 30, sex: "male", cycleDay: null },
      onsetTime: 24,
      findings: {},
      second: { enabled: false, time: 48, findings: {} },
      lastResponse: null,
      pending: false,
      error: null,
    };
  }

  subscribe(listener: (state: SessionState) => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  // --- edits ---------------------------------------------------------

  cycleFinding(symptomId: string, which: "first" | "second" = "first"): void {
    const current = this.getFinding(symptomId, which);
    this.setFinding(symptomId, CYCLE[current], which);
  }

  getFinding(symptomId: string, which: "first" | "second" = "first"): TriState {
    const bag = which === "first" ? this.state.findings : this.state.second.findings;
    return bag[symptomId] ?? "unknown";
  }

  setFinding(symptomId: string, value: TriState, which: "first" | "second" = "first"): void {
    if (!this.symptomIds.includes(symptomId)) {
      this.state.error = `unknown symptom: ${symptomId}`;
      this.notify();
      return;
    }
    const bag = which === "first" ? this.state.findings : this.state.second.findings;
    if (value === "unknown") {
      delete bag[symptomId];
    } else {
      bag[symptomId] = value;
    }
    this.edited();
  }

  clearFindings(): void {
    this.state.findings = {};
    this.state.second.findings = {};
    this.edited();
  }

  setAge(age: number): void {
    if (!Number.isFinite(age) || age < 0 || age > 120) return;
    this.state.patient.age = age;
    this.edited();
  }

  setSex(sex: Sex): void {
    this.state.patient.sex = sex;
    if (sex === "male") this.state.patient.cycleDay = null;
    this.edited();
  }

  setCycleDay(day: number | null): void {
    if (day !== null && (!Number.isInteger(day) || day < 1 || day > 28)) return;
    if (day !== null && this.state.patient.sex !== "female") return;
    this.state.patient.cycleDay = day;
    this.edited();
  }

  setOnsetTime(hours: number): void {
    if (!Number.isFinite(hours) || hours < 0) return;
    this.state.onsetTime = hours;
    this.edited();
  }

  setSecondEnabled(enabled: boolean): void {
    this.state.second.enabled = enabled;
    if (enabled && this.state.second.time <= this.state.onsetTime) {
      this.state.second.time = this.state.onsetTime + 24;
    }
    this.edited();
  }

  setSecondTime(hours: number): void {
    if (!Number.isFinite(hours)) return;
    if (hours <= this.state.onsetTime) {
      this.state.error = "second examination must be after the first";
      this.notify();
      return;
    }
    this.state.second.time = hours;
    this.edited();
  }

  // --- inference pipeline ---------------------------------------------

  private edited(): void {
    this.state.error = null;
    if (this.timer !== null) this.cancel(this.timer);
    this.timer = this.schedule(() => {
      this.timer = null;
      void this.sync();
    }, this.debounceMs);
    this.notify();
  }

  buildRequest(): InferRequest {
    const entries = (bag: Record<string, TriState>): FindingEntry[] =>
      Object.entries(bag).map(([symptom_id, value]) => ({ symptom_id, value }));
    const request: InferRequest = {
      patient: {
        age: this.state.patient.age,
        sex: this.state.patient.sex,
        cycle_day: this.state.patient.cycleDay,
      },
      onset_time: this.state.onsetTime,
      findings: entries(this.state.findings),
    };
    if (this.state.second.enabled) {
      request.second = {
        time: this.state.second.time,
        findings: entries(this.state.second.findings),
      };
    }
    return request;
  }

  async sync(): Promise<void> {
    const id = ++this.seq;
    const request = this.buildRequest();
    this.requestsSent.push(request);
    this.state.pending = true;
    this.notify();
    try {
      const response = await this.api.infer(request);
      if (id <= this.appliedSeq || id !== this.seq) return; // superseded
      this.appliedSeq = id;
      this.state.lastResponse = response;
      this.state.error = null;
    } catch (err) {
      if (id !== this.seq) return;
      this.state.error = err instanceof Error ? err.message : String(err);
      // previous response stays on screen; the banner is non-blocking
    } finally {
      if (id === this.seq) {
        this.state.pending = false;
        this.notify();
      }
    }
  }

  /** Flush a pending debounce immediately (initial load, tests). */
  flush(): Promise<void> {
    if (this.timer !== null) {
      this.cancel(this.timer);
      this.timer = null;
    }
    return this.sync();
  }
}
