// Payload shapes of the qspec service API (JSON over HTTP).

export interface AxisJson {
  name: string;
  values: number[];
}

export interface QubitSpecJson {
  family: string;
  params: Record<string, unknown>;
}

export interface InteractionJson {
  type: "product";
  g: number;
  factors: { subsystem: number; operator: string }[];
  add_hc: boolean;
}

export interface HilbertSpaceJson {
  subsystems: QubitSpecJson[];
  interactions: InteractionJson[];
}

export interface SweepDefJson {
  hilbertspace: HilbertSpaceJson;
  axes: { name: string; values: number[] | { start: number; stop: number; num: number } }[];
  bindings: { subsystem: number; field: string; axis: string; scale?: number; offset?: number }[];
  evals_count: number;
  worker_count?: number;
}

export interface JobStateJson {
  id: string;
  state: "queued" | "running" | "done" | "failed";
  progress: number;
  axes: AxisJson[];
  subsystem_count: number;
  truncated_dims: number[];
  evals_count: number;
  error?: string;
}

// energy value from the canonical serializer: NaN -> null, infinities -> strings
export type Energy = number | null | "inf" | "-inf";

export interface EvalsView {
  kind: "sweep-evals";
  units: string;
  axes: AxisJson[];
  fixed: Record<string, number>;
  evals: number[][];
}

export interface BareEvalsView {
  kind: "sweep-bare-evals";
  units: string;
  axes: AxisJson[];
  fixed: Record<string, number>;
  bare_evals: number[][][]; // [subsystem][point][level]
}

export interface TransitionBranch {
  final: number[] | null;
  kind: "subsystem" | "sideband" | "plain";
  subsystem: number | null;
  energies: Energy[];
}

export interface TransitionsView {
  kind: "sweep-transitions";
  units: string;
  axis: AxisJson;
  fixed: Record<string, number>;
  initial: number[];
  photon_number: number;
  branches: TransitionBranch[];
}

export interface CoefficientView {
  kind: string;
  units: string;
  axes: AxisJson[];
  fixed: Record<string, number>;
  values: unknown[]; // nested arrays, NaN -> null
  layout: string;
}

export interface MatelemView {
  kind: "sweep-matelem";
  units: string;
  axis: AxisJson;
  fixed: Record<string, number>;
  subsystem: number;
  operator: string;
  initial_level: number;
  magnitudes: number[][]; // [point][final level]
}

export interface WavefunctionEntry {
  index: number;
  energy: number;
  support: number[] | null;
  rendered: number[];
  amplitudes: { re: number[]; im?: number[] };
}

export interface WavefunctionView {
  kind: "sweep-wavefunction";
  units: string;
  fixed: Record<string, number>;
  subsystem: number;
  data: { wavefunctions: WavefunctionEntry[] };
}

export function energyToNumber(value: Energy): number {
  if (value === null || value === "inf" || value === "-inf") {
    return NaN;
  }
  return value;
}
