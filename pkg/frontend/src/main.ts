// Browser wiring: system-builder form, sweep submission with progress
// polling, and the six linked panels driven by the flux slider.

import { ServiceClient } from "./api";
import { DEFAULT_FORM, SystemFormState, toSweepDef, validateForm } from "./form";
import { PANEL_KEYS, PanelKey } from "./panels";
import { ExplorerSession } from "./state";

const SERVICE_BASE =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8000";

const PANEL_TITLES: Record<PanelKey, string> = {
  bareSpectra: "Bare spectra",
  bareWavefunctions: "Bare wavefunctions",
  dressedSpectrum: "Dressed spectrum",
  transitions: "Transitions",
  dispersiveShift: "Dispersive shift",
  matrixElements: "Matrix elements",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text) {
    node.textContent = text;
  }
  return node;
}

function numberInput(form: HTMLElement, label: string, value: number | null): HTMLInputElement {
  const wrap = el("label", { class: "field" }, label);
  const input = el("input", { type: "number", step: "any" });
  if (value !== null) {
    input.value = String(value);
  }
  wrap.appendChild(input);
  form.appendChild(wrap);
  return input;
}

function readForm(inputs: Record<string, HTMLInputElement>): SystemFormState {
  const num = (key: string) => {
    const raw = inputs[key].value.trim();
    return raw === "" ? null : Number(raw);
  };
  return {
    ...DEFAULT_FORM,
    EJ: num("EJ"),
    EC: num("EC"),
    EL: num("EL"),
    cutoff: num("cutoff"),
    truncated_dim: num("truncated_dim"),
    E_osc: num("E_osc"),
    osc_dim: num("osc_dim"),
    g: num("g"),
    flux_start: num("flux_start") ?? DEFAULT_FORM.flux_start,
    flux_stop: num("flux_stop") ?? DEFAULT_FORM.flux_stop,
    flux_points: num("flux_points") ?? DEFAULT_FORM.flux_points,
    evals_count: num("evals_count") ?? DEFAULT_FORM.evals_count,
  };
}

async function start(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    return;
  }
  const client = new ServiceClient(SERVICE_BASE, (url, init) => fetch(url, init));

  const form = el("form", { id: "system-form" });
  const inputs: Record<string, HTMLInputElement> = {};
  for (const [key, value] of Object.entries({
    EJ: DEFAULT_FORM.EJ,
    EC: DEFAULT_FORM.EC,
    EL: DEFAULT_FORM.EL,
    cutoff: DEFAULT_FORM.cutoff,
    truncated_dim: DEFAULT_FORM.truncated_dim,
    E_osc: DEFAULT_FORM.E_osc,
    osc_dim: DEFAULT_FORM.osc_dim,
    g: DEFAULT_FORM.g,
    flux_start: DEFAULT_FORM.flux_start,
    flux_stop: DEFAULT_FORM.flux_stop,
    flux_points: DEFAULT_FORM.flux_points,
    evals_count: DEFAULT_FORM.evals_count,
  })) {
    inputs[key] = numberInput(form, key, value as number);
  }
  const submit = el("button", { type: "submit" }, "Run sweep");
  const message = el("div", { class: "message" });
  form.appendChild(submit);
  root.appendChild(form);
  root.appendChild(message);

  const validateLive = () => {
    const check = validateForm(readForm(inputs));
    submit.disabled = !check.ok;
    message.textContent = check.ok ? "" : Object.values(check.errors).join(" | ");
  };
  form.addEventListener("input", validateLive);
  validateLive();

  const panelHost = el("div", { id: "panels" });
  const panelNodes = {} as Record<PanelKey, HTMLElement>;
  for (const key of PANEL_KEYS) {
    const box = el("section", { class: "panel" });
    box.appendChild(el("h3", {}, PANEL_TITLES[key]));
    const body = el("div", { class: "panel-body" });
    box.appendChild(body);
    panelHost.appendChild(box);
    panelNodes[key] = body;
  }

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const state = readForm(inputs);
    const check = validateForm(state);
    if (!check.ok) {
      return;
    }
    message.textContent = "submitting sweep...";
    try {
      const jobId = await client.submitSweep(toSweepDef(state));
      message.textContent = `job ${jobId}: queued`;
      const poll = async (): Promise<void> => {
        const job = await client.jobState(jobId);
        message.textContent = `job ${jobId}: ${job.state} (${Math.round(job.progress * 100)}%)`;
        if (job.state === "failed") {
          message.textContent += ` - ${job.error}`;
          return;
        }
        if (job.state !== "done") {
          setTimeout(poll, 500);
          return;
        }
        mountExplorer(root, panelHost, panelNodes, jobId, job.axes[0].name, job.axes[0].values);
      };
      poll();
    } catch (error) {
      message.textContent = `submit failed: ${error}`;
    }
  });
}

function mountExplorer(
  root: HTMLElement,
  panelHost: HTMLElement,
  panelNodes: Record<PanelKey, HTMLElement>,
  jobId: string,
  axisName: string,
  axisValues: number[],
): void {
  const controls = el("div", { id: "controls" });
  const sliderLabel = el("span", {}, `${axisName} = ${axisValues[0]}`);
  const slider = el("input", {
    type: "range",
    min: "0",
    max: String(axisValues.length - 1),
    value: "0",
    step: "1",
  });
  const photon = el("select", {});
  for (const n of [1, 2, 3]) {
    photon.appendChild(el("option", { value: String(n) }, `${n}-photon`));
  }
  controls.append(sliderLabel, slider, photon);
  root.appendChild(controls);
  root.appendChild(panelHost);

  const session = new ExplorerSession({
    base: SERVICE_BASE,
    jobId,
    axisName,
    axisValues,
    fetchFn: (url, init) => fetch(url, init),
    onRender: (panel, svg) => {
      panelNodes[panel].innerHTML = svg;
    },
    onError: (panel, error) => {
      const status = (error as { status?: number }).status;
      panelNodes[panel].textContent =
        status === 410
          ? "sweep result evicted; re-submit the sweep"
          : `error: ${error}`;
    },
  });

  slider.addEventListener("input", () => {
    const index = Number(slider.value);
    sliderLabel.textContent = `${axisName} = ${axisValues[index].toPrecision(4)}`;
    session.setSlider(index);
  });
  photon.addEventListener("change", () => {
    session.setPhotonNumber(Number(photon.value));
  });

  session.refreshAll();
}

start();
