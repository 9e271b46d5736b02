import { describe, expect, it } from "vitest";

import {
  argumentValues,
  buildRunForm,
  clearFieldInput,
  runEnabled,
  setFieldInput,
} from "../src/forms.js";
import { renderRunPage } from "../src/view.js";
import type { ApplicationManifest } from "../src/types.js";
import { hubClient } from "./helpers.js";

function manifestWith(parameters: ApplicationManifest["entry_point"]["parameters"]): ApplicationManifest {
  return {
    name: "fixture",
    version: "1.0.0",
    runtime: "python",
    short_description: "s",
    long_description: "l",
    tags: ["python"],
    source: { inline: "def run(): ..." },
    entry_point: { function: "run", returns: "html", parameters },
  };
}

describe("run form construction", () => {
  it("creates one control per parameter, of the matching type, in order", () => {
    const form = buildRunForm(
      manifestWith([
        { name: "data", kind: "path", description: "input file" },
        { name: "k", kind: "integer", description: "clusters", default: 5 },
        { name: "verbose", kind: "boolean", description: "chatty" },
      ]),
    );
    expect(form.fields.map((f) => f.control)).toEqual([
      "file-picker",
      "integer-field",
      "checkbox",
    ]);
    expect(form.fields.map((f) => f.spec.name)).toEqual(["data", "k", "verbose"]);
  });

  it("prefills declared defaults and neutral values", () => {
    const form = buildRunForm(
      manifestWith([
        { name: "k", kind: "integer", description: "x", default: 5 },
        { name: "rate", kind: "float", description: "x" },
        { name: "scale", kind: "boolean", description: "x", default: true },
        { name: "label", kind: "string", description: "x" },
      ]),
    );
    expect(form.fields.map((f) => f.rawInput)).toEqual(["5", "0", true, ""]);
    // all defaults present and no path field: runnable immediately
    expect(runEnabled(form)).toBe(true);
  });

  it("renders every seeded manifest with exactly one control per parameter", async () => {
    const { client } = hubClient();
    const summaries = await client.listApplications();
    expect(summaries.length).toBeGreaterThanOrEqual(15);
    for (const summary of summaries) {
      const manifest = await client.applicationDetail(summary.name, summary.version);
      const form = buildRunForm(manifest);
      expect(form.fields.length).toBe(manifest.entry_point.parameters.length);
      const html = renderRunPage(form);
      const controls = html.match(/<input /g) ?? [];
      expect(controls.length, summary.name).toBe(manifest.entry_point.parameters.length);
      for (const [i, parameter] of manifest.entry_point.parameters.entries()) {
        expect(form.fields[i]!.spec.name).toBe(parameter.name);
      }
    }
  });
});

describe("field validation", () => {
  it("rejects a float in an integer field and disables run", () => {
    const form = buildRunForm(manifestWith([{ name: "k", kind: "integer", description: "x" }]));
    setFieldInput(form, "k", "3.5");
    expect(form.fields[0]!.error).toBe("must be a whole number");
    expect(runEnabled(form)).toBe(false);
    setFieldInput(form, "k", "3");
    expect(form.fields[0]!.error).toBeNull();
    expect(runEnabled(form)).toBe(true);
  });

  it("accepts scientific notation for floats but not garbage", () => {
    const form = buildRunForm(manifestWith([{ name: "r", kind: "float", description: "x" }]));
    setFieldInput(form, "r", "1.5e-3");
    expect(runEnabled(form)).toBe(true);
    setFieldInput(form, "r", "fast");
    expect(runEnabled(form)).toBe(false);
  });

  it("keeps run disabled until a path argument is staged, and after cancel", () => {
    const form = buildRunForm(manifestWith([{ name: "data", kind: "path", description: "x" }]));
    expect(runEnabled(form)).toBe(false);
    setFieldInput(form, "data", "/data/input.csv");
    expect(runEnabled(form)).toBe(true);
    clearFieldInput(form, "data"); // user cancelled the picker
    expect(runEnabled(form)).toBe(false);
  });
});

describe("argument extraction", () => {
  it("produces typed values in declaration order", () => {
    const form = buildRunForm(
      manifestWith([
        { name: "data", kind: "path", description: "x" },
        { name: "k", kind: "integer", description: "x" },
        { name: "rate", kind: "float", description: "x" },
        { name: "on", kind: "boolean", description: "x" },
        { name: "label", kind: "string", description: "x" },
      ]),
    );
    setFieldInput(form, "data", "/data/in.csv");
    setFieldInput(form, "k", "7");
    setFieldInput(form, "rate", "0.25");
    setFieldInput(form, "on", true);
    setFieldInput(form, "label", "hello");
    expect(argumentValues(form)).toEqual(["/data/in.csv", 7, 0.25, true, "hello"]);
  });
});
