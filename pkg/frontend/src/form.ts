// System-definition form: a fluxonium (or transmon) qubit coupled to a
// resonator through its charge operator.  Produces a schema-valid sweep
// definition for POST /v1/sweep; field validation mirrors the service's
// 400 semantics (findings name the offending field).

import type { SweepDefJson } from "./types";

export interface SystemFormState {
  family: "fluxonium" | "transmon";
  EJ: number | null;
  EC: number | null;
  EL: number | null; // fluxonium only
  cutoff: number | null;
  truncated_dim: number | null;
  E_osc: number | null;
  osc_dim: number | null;
  g: number | null;
  flux_start: number;
  flux_stop: number;
  flux_points: number;
  evals_count: number;
}

export const DEFAULT_FORM: SystemFormState = {
  family: "fluxonium",
  EJ: 2.55,
  EC: 0.72,
  EL: 0.12,
  cutoff: 110,
  truncated_dim: 9,
  E_osc: 4.0,
  osc_dim: 5,
  g: 0.2,
  flux_start: -0.5,
  flux_stop: 0.5,
  flux_points: 101,
  evals_count: 10,
};

export interface ValidationResult {
  ok: boolean;
  errors: Record<string, string>;
}

function requirePositive(
  errors: Record<string, string>,
  field: string,
  value: number | null,
) {
  if (value === null || Number.isNaN(value)) {
    errors[field] = `${field}: required`;
  } else if (value <= 0) {
    errors[field] = `${field}: must be positive`;
  }
}

export function validateForm(state: SystemFormState): ValidationResult {
  const errors: Record<string, string> = {};
  requirePositive(errors, "EJ", state.EJ);
  requirePositive(errors, "EC", state.EC);
  if (state.family === "fluxonium") {
    requirePositive(errors, "EL", state.EL);
    requirePositive(errors, "cutoff", state.cutoff);
  }
  requirePositive(errors, "truncated_dim", state.truncated_dim);
  requirePositive(errors, "E_osc", state.E_osc);
  requirePositive(errors, "osc_dim", state.osc_dim);
  if (state.g === null || Number.isNaN(state.g)) {
    errors.g = "g: required";
  }
  if (!(state.flux_start < state.flux_stop)) {
    errors.flux_stop = "flux_stop: scan range must satisfy start < stop";
  }
  if (!Number.isInteger(state.flux_points) || state.flux_points < 2) {
    errors.flux_points = "flux_points: need at least 2 grid points";
  }
  if (!Number.isInteger(state.evals_count) || state.evals_count < 1) {
    errors.evals_count = "evals_count: must be a positive integer";
  }
  return { ok: Object.keys(errors).length === 0, errors };
}

export function toSweepDef(state: SystemFormState): SweepDefJson {
  const check = validateForm(state);
  if (!check.ok) {
    throw new Error(`form incomplete: ${Object.values(check.errors).join("; ")}`);
  }
  const qubitParams: Record<string, unknown> =
    state.family === "fluxonium"
      ? {
          EJ: state.EJ,
          EC: state.EC,
          EL: state.EL,
          flux: 0.0,
          cutoff: state.cutoff,
          truncated_dim: state.truncated_dim,
        }
      : {
          EJ: state.EJ,
          EC: state.EC,
          ng: 0.0,
          ncut: state.cutoff ?? 30,
          truncated_dim: state.truncated_dim,
        };
  return {
    hilbertspace: {
      subsystems: [
        { family: state.family, params: qubitParams },
        {
          family: "oscillator",
          params: { E_osc: state.E_osc, truncated_dim: state.osc_dim },
        },
      ],
      interactions: [
        {
          type: "product",
          g: state.g as number,
          factors: [
            { subsystem: 0, operator: "n_operator" },
            { subsystem: 1, operator: "creation_operator" },
          ],
          add_hc: true,
        },
      ],
    },
    axes: [
      {
        name: "flux",
        values: {
          start: state.flux_start,
          stop: state.flux_stop,
          num: state.flux_points,
        },
      },
    ],
    bindings: [{ subsystem: 0, field: "flux", axis: "flux" }],
    evals_count: state.evals_count,
    worker_count: 1,
  };
}

/** Rebuild the form state from an exported sweep definition (round trip). */
export function fromSweepDef(def: SweepDefJson): SystemFormState {
  const qubit = def.hilbertspace.subsystems[0];
  const osc = def.hilbertspace.subsystems[1];
  const interaction = def.hilbertspace.interactions[0];
  const axis = def.axes[0];
  const values = axis.values;
  if (Array.isArray(values)) {
    throw new Error("expected start/stop/num axis values");
  }
  const params = qubit.params as Record<string, number>;
  return {
    family: qubit.family as "fluxonium" | "transmon",
    EJ: params.EJ ?? null,
    EC: params.EC ?? null,
    EL: params.EL ?? null,
    cutoff: (params.cutoff ?? params.ncut ?? null) as number | null,
    truncated_dim: params.truncated_dim ?? null,
    E_osc: (osc.params as Record<string, number>).E_osc ?? null,
    osc_dim: (osc.params as Record<string, number>).truncated_dim ?? null,
    g: interaction ? interaction.g : null,
    flux_start: values.start,
    flux_stop: values.stop,
    flux_points: values.num,
    evals_count: def.evals_count,
  };
}
