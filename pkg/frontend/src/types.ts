/** Wire types shared with the hub server (JSON schema of the manifest API). */

export type RuntimeName = "python" | "r" | "javascript";
export type ParamKindName = "path" | "string" | "integer" | "float" | "boolean";
export type ReturnKindName = "html" | "file";

export interface ParameterSpec {
  name: string;
  kind: ParamKindName;
  description: string;
  default?: string | number | boolean;
}

export interface EntryPointSpec {
  function: string;
  returns: ReturnKindName;
  parameters: ParameterSpec[];
}

export type SourceRef = { inline: string; url?: undefined } | { url: string; inline?: undefined };

export interface ApplicationManifest {
  name: string;
  version: string;
  runtime: RuntimeName;
  short_description: string;
  long_description: string;
  tags: string[];
  source: SourceRef;
  entry_point: EntryPointSpec;
}

export interface ApplicationSummary {
  name: string;
  version: string;
  runtime: RuntimeName;
  short_description: string;
  tags: string[];
}

export interface DatasetSummary {
  dataset_id: string;
  name: string;
  description: string;
  byte_size: number;
}

export interface ProblemDocument {
  code: string;
  message: string;
  violations?: { path: string; message: string }[];
}

export type ArgumentValue = string | number | boolean;

/** One fully-configured run: the manifest, ordered argument values, and the
 * user-granted files staged into the sandbox filesystem. */
export interface RunConfiguration {
  application: ApplicationManifest;
  argumentValues: ArgumentValue[];
  stagedFiles: Map<string, Uint8Array>;
}

export type RunOutcome =
  | { kind: "html"; html: string; diagnostics: string }
  | { kind: "file"; fileName: string; fileBytes: Uint8Array; diagnostics: string };
