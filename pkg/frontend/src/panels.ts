// The six explorer panels.  Each panel is a pure function from a service
// payload to an SVG string, plus a query builder used by the session; the
// UI never computes physics, it only rearranges response payloads.

import { lineChart, PALETTE, Series } from "./charts";
import type { SliceQuery } from "./api";
import {
  BareEvalsView,
  CoefficientView,
  EvalsView,
  MatelemView,
  TransitionsView,
  WavefunctionView,
  energyToNumber,
} from "./types";

export type PanelKey =
  | "bareSpectra"
  | "bareWavefunctions"
  | "dressedSpectrum"
  | "transitions"
  | "dispersiveShift"
  | "matrixElements";

export const PANEL_KEYS: PanelKey[] = [
  "bareSpectra",
  "bareWavefunctions",
  "dressedSpectrum",
  "transitions",
  "dispersiveShift",
  "matrixElements",
];

export interface PanelSettings {
  markerValue: number; // slider position in axis units
  subsystem: number; // qubit selector for panels 2, 5, 6
  oscillatorIndex: number; // partner subsystem for the dispersive panel
  initial: number[]; // shared initial state for panels 4 and 6
  photonNumber: number; // shared n-photon setting for panel 4
  sidebands: boolean;
  dispersiveLevel: number; // chi level k for the selected pair
}

export function panelQuery(key: PanelKey, s: PanelSettings): SliceQuery {
  switch (key) {
    case "bareSpectra":
      return { view: "bare_evals" };
    case "bareWavefunctions":
      return {
        view: "wavefunction",
        axis: "flux",
        value: s.markerValue,
        subsystem: s.subsystem,
        which: "0,1,2",
        representation: "phase",
        mode: "abs_sqr",
      };
    case "dressedSpectrum":
      return { view: "evals" };
    case "transitions":
      return {
        view: "transitions",
        initial: s.initial.join(","),
        photon_number: s.photonNumber,
        sidebands: s.sidebands,
      };
    case "dispersiveShift":
      return { view: "chi" };
    case "matrixElements":
      return {
        view: "matelem",
        subsystem: s.subsystem,
        operator: "n_operator",
        initial_level: s.initial[s.subsystem] ?? 0,
      };
  }
}

function axisSeries(values: number[], column: (p: number) => number): { x: number; y: number }[] {
  return values.map((x, p) => ({ x, y: column(p) }));
}

export function renderBareSpectra(view: BareEvalsView, s: PanelSettings): string {
  const axis = view.axes[0];
  const series: Series[] = [];
  view.bare_evals.forEach((per, sub) => {
    const levels = per[0].length;
    for (let k = 0; k < levels; k += 1) {
      series.push({
        points: axisSeries(axis.values, (p) => per[p][k]),
        color: PALETTE[sub % PALETTE.length],
        label: k === 0 ? `subsystem ${sub}` : undefined,
      });
    }
  });
  return lineChart(series, {
    title: "1. Bare spectra",
    xLabel: axis.name,
    yLabel: `energy [${view.units}]`,
    marker: s.markerValue,
  });
}

export function renderBareWavefunctions(view: WavefunctionView): string {
  const series: Series[] = view.data.wavefunctions.map((wf, i) => ({
    points: (wf.support ?? wf.rendered.map((_, k) => k)).map((x, k) => ({
      x,
      y: wf.energy + wf.rendered[k],
    })),
    color: PALETTE[i % PALETTE.length],
    label: `level ${wf.index}`,
  }));
  return lineChart(series, {
    title: `2. Bare wavefunctions (subsystem ${view.subsystem})`,
    xLabel: "phase",
    yLabel: `energy [${view.units}]`,
  });
}

export function renderDressedSpectrum(view: EvalsView, s: PanelSettings): string {
  const axis = view.axes[0];
  const levels = view.evals[0].length;
  const series: Series[] = [];
  for (let k = 0; k < levels; k += 1) {
    series.push({
      points: axisSeries(axis.values, (p) => view.evals[p][k]),
      color: PALETTE[k % PALETTE.length],
    });
  }
  return lineChart(series, {
    title: "3. Dressed spectrum",
    xLabel: axis.name,
    yLabel: `energy [${view.units}]`,
    marker: s.markerValue,
  });
}

/** Numeric transition branches; NaN marks labeling gaps (chart gaps). */
export function transitionSeries(view: TransitionsView): { label: string; ys: number[] }[] {
  return view.branches.map((branch) => ({
    label:
      branch.final === null
        ? "plain"
        : `(${view.initial.join(",")})->(${branch.final.join(",")})`,
    ys: branch.energies.map(energyToNumber),
  }));
}

export function renderTransitions(view: TransitionsView, s: PanelSettings): string {
  const xs = view.axis.values;
  const series: Series[] = view.branches.map((branch, i) => ({
    points: xs.map((x, p) => ({ x, y: energyToNumber(branch.energies[p]) })),
    color:
      branch.kind === "plain"
        ? "#bbbbbb"
        : PALETTE[(branch.subsystem ?? i) % PALETTE.length],
    dashed: branch.kind === "sideband",
    label:
      branch.kind === "subsystem" && branch.final !== null
        ? `(${view.initial.join(",")})->(${branch.final.join(",")})`
        : undefined,
  }));
  return lineChart(series, {
    title: `4. Transitions (n=${view.photon_number})`,
    xLabel: view.axis.name,
    yLabel: `transition energy [${view.units}] / ${view.photon_number} photon(s)`,
    marker: s.markerValue,
  });
}

/** chi[j, l, k, 1] for the selected qubit/oscillator pair versus the axis. */
export function dispersiveShiftSeries(
  view: CoefficientView,
  qubit: number,
  oscillator: number,
  level: number,
): number[] {
  const values = view.values as (number | null)[][][][][];
  return values.map((point) => {
    const entry = point[qubit]?.[oscillator]?.[level]?.[1];
    return entry === null || entry === undefined ? NaN : entry;
  });
}

export function renderDispersiveShift(view: CoefficientView, s: PanelSettings): string {
  const axis = view.axes[0];
  const ys = dispersiveShiftSeries(view, s.subsystem, s.oscillatorIndex, s.dispersiveLevel);
  const series: Series[] = [
    {
      points: axis.values.map((x, p) => ({ x, y: ys[p] })),
      color: PALETTE[0],
      label: `chi[qubit ${s.subsystem}, osc ${s.oscillatorIndex}], level ${s.dispersiveLevel}`,
    },
  ];
  return lineChart(series, {
    title: `5. Dispersive shift chi (level ${s.dispersiveLevel}, one photon)`,
    xLabel: axis.name,
    yLabel: `chi [${view.units}]`,
    marker: s.markerValue,
  });
}

export function renderMatrixElements(view: MatelemView, s: PanelSettings): string {
  const xs = view.axis.values;
  const levels = view.magnitudes[0].length;
  const series: Series[] = [];
  for (let j = 0; j < levels; j += 1) {
    series.push({
      points: xs.map((x, p) => ({ x, y: view.magnitudes[p][j] })),
      color: PALETTE[j % PALETTE.length],
      label: `|<${view.initial_level}|n|${j}>|`,
    });
  }
  return lineChart(series, {
    title: `6. Charge matrix elements (subsystem ${view.subsystem})`,
    xLabel: view.axis.name,
    yLabel: "|matrix element|",
    marker: s.markerValue,
  });
}

export function renderPanel(key: PanelKey, payload: unknown, s: PanelSettings): string {
  switch (key) {
    case "bareSpectra":
      return renderBareSpectra(payload as BareEvalsView, s);
    case "bareWavefunctions":
      return renderBareWavefunctions(payload as WavefunctionView);
    case "dressedSpectrum":
      return renderDressedSpectrum(payload as EvalsView, s);
    case "transitions":
      return renderTransitions(payload as TransitionsView, s);
    case "dispersiveShift":
      return renderDispersiveShift(payload as CoefficientView, s);
    case "matrixElements":
      return renderMatrixElements(payload as MatelemView, s);
  }
}
