import { HttpApiClient } from "./api.js";
import { renderBanner, renderReport, renderSymptomRow } from "./render.js";
import { ConsultStore } from "./store.js";
import type { KbExport, Sex, TriState } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const api = new HttpApiClient("");
  let kb: KbExport;
  try {
    kb = await api.getKb();
  } catch (err) {
    el("app").innerHTML = `<div class="banner error">cannot reach the service: ${String(err)}</div>`;
    return;
  }
  const labels: Record<string, string> = {};
  for (const d of kb.diseases) labels[d.id] = d.label;
  const store = new ConsultStore(api, kb.symptoms.map((s) => s.id));

  const symptomList = el("symptoms");
  const secondList = el("symptoms-second");
  const report = el("report");
  const banner = el("banner");
  const title = el("kb-title");
  title.textContent = `${kb.name} (v${kb.version})`;

  function redraw(): void {
    symptomList.innerHTML = kb.symptoms
      .map((s) => renderSymptomRow(s.id, s.label, store.getFinding(s.id, "first"), "first"))
      .join("");
    const secondPanel = el("second-panel");
    secondPanel.hidden = !store.state.second.enabled;
    if (store.state.second.enabled) {
      secondList.innerHTML = kb.symptoms
        .map((s) => renderSymptomRow(s.id, s.label, store.getFinding(s.id, "second"), "second"))
        .join("");
    }
    banner.innerHTML = renderBanner(store.state);
    if (store.state.lastResponse) {
      report.innerHTML = renderReport(store.state.lastResponse, labels);
    }
  }

  store.subscribe(redraw);

  for (const list of [symptomList, secondList]) {
    list.addEventListener("click", (event) => {
      const button = (event.target as HTMLElement).closest<HTMLElement>(".tri-state");
      if (!button) return;
      store.cycleFinding(
        button.dataset.symptom ?? "",
        (button.dataset.which as "first" | "second") ?? "first",
      );
    });
  }

  el<HTMLInputElement>("age").addEventListener("change", (e) =>
    store.setAge(Number((e.target as HTMLInputElement).value)),
  );
  el<HTMLSelectElement>("sex").addEventListener("change", (e) => {
    const sex = (e.target as HTMLSelectElement).value as Sex;
    el<HTMLInputElement>("cycle-day").disabled = sex !== "female";
    store.setSex(sex);
  });
  el<HTMLInputElement>("cycle-day").addEventListener("change", (e) => {
    const raw = (e.target as HTMLInputElement).value;
    store.setCycleDay(raw === "" ? null : Number(raw));
  });
  const onset = el<HTMLInputElement>("onset");
  const onsetValue = el("onset-value");
  onset.addEventListener("input", (e) => {
    const hours = Number((e.target as HTMLInputElement).value);
    onsetValue.textContent = `${hours} h`;
    store.setOnsetTime(hours);
  });
  el<HTMLInputElement>("second-enabled").addEventListener("change", (e) =>
    store.setSecondEnabled((e.target as HTMLInputElement).checked),
  );
  const secondTime = el<HTMLInputElement>("second-time");
  secondTime.addEventListener("change", (e) =>
    store.setSecondTime(Number((e.target as HTMLInputElement).value)),
  );
  el<HTMLButtonElement>("clear").addEventListener("click", () => store.clearFindings());

  redraw();
  void store.flush(); // initial posterior = normalized priors
}

void boot();
