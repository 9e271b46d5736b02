/**
 * The run form: one control per declared parameter, in declaration order,
 * each validated against its kind. Run stays disabled until every field
 * type-checks and every path field has a staged file.
 */

import type { ApplicationManifest, ArgumentValue, ParamKindName, ParameterSpec } from "./types.js";

export type ControlType = "file-picker" | "text-field" | "integer-field" | "float-field" | "checkbox";

export const CONTROL_FOR_KIND: Record<ParamKindName, ControlType> = {
  path: "file-picker",
  string: "text-field",
  integer: "integer-field",
  float: "float-field",
  boolean: "checkbox",
};

export interface FieldModel {
  spec: ParameterSpec;
  control: ControlType;
  /** Raw user input (text for text-ish controls, boolean for checkbox,
   * staged sandbox path for file pickers; null = untouched). */
  rawInput: string | boolean | null;
  error: string | null;
}

export interface RunFormModel {
  application: ApplicationManifest;
  fields: FieldModel[];
}

const NEUTRAL_INPUT: Record<ParamKindName, string | boolean> = {
  path: "",
  string: "",
  integer: "0",
  float: "0",
  boolean: false,
};

/** Initial form state: declared defaults where present, neutral values otherwise.
 * Path fields always start unstaged. */
export function buildRunForm(application: ApplicationManifest): RunFormModel {
  const fields = application.entry_point.parameters.map((spec): FieldModel => {
    let rawInput: string | boolean | null;
    if (spec.kind === "path") {
      rawInput = null; // requires an explicit user file grant
    } else if (spec.default !== undefined) {
      rawInput = spec.kind === "boolean" ? Boolean(spec.default) : String(spec.default);
    } else {
      rawInput = NEUTRAL_INPUT[spec.kind];
    }
    return { spec, control: CONTROL_FOR_KIND[spec.kind], rawInput, error: null };
  });
  return { application, fields };
}

const INTEGER_RE = /^[+-]?\d+$/;
const FLOAT_RE = /^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$/;

function validateField(field: FieldModel): string | null {
  const { kind } = field.spec;
  if (kind === "boolean") {
    return typeof field.rawInput === "boolean" ? null : "expected a checkbox state";
  }
  if (field.rawInput === null || typeof field.rawInput !== "string") {
    return kind === "path" ? "select a file" : "required";
  }
  if (kind === "integer" && !INTEGER_RE.test(field.rawInput.trim())) {
    return "must be a whole number";
  }
  if (kind === "float" && !FLOAT_RE.test(field.rawInput.trim())) {
    return "must be a number";
  }
  if (kind === "path" && field.rawInput === "") {
    return "select a file";
  }
  return null;
}

/** Record user input for a field and revalidate it. */
export function setFieldInput(form: RunFormModel, name: string, value: string | boolean): void {
  const field = form.fields.find((f) => f.spec.name === name);
  if (!field) {
    throw new Error(`no parameter named ${name}`);
  }
  field.rawInput = value;
  field.error = validateField(field);
}

/** A cancelled file selection leaves the path argument unset. */
export function clearFieldInput(form: RunFormModel, name: string): void {
  const field = form.fields.find((f) => f.spec.name === name);
  if (!field) {
    throw new Error(`no parameter named ${name}`);
  }
  field.rawInput = field.spec.kind === "boolean" ? false : null;
  field.error = validateField(field);
}

export function runEnabled(form: RunFormModel): boolean {
  return form.fields.every((field) => validateField(field) === null);
}

/** Typed argument values in declaration order; only call when runEnabled. */
export function argumentValues(form: RunFormModel): ArgumentValue[] {
  return form.fields.map((field): ArgumentValue => {
    const { kind } = field.spec;
    if (kind === "boolean") return Boolean(field.rawInput);
    const text = String(field.rawInput ?? "");
    if (kind === "integer") return parseInt(text.trim(), 10);
    if (kind === "float") return parseFloat(text.trim());
    return text; // string and path travel as strings
  });
}
