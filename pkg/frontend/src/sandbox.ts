/**
 * The sandbox filesystem boundary: user-granted files are copied in, result
 * files are read back out, and nothing inside can name a file outside it.
 * The filesystem is held in memory, so very large stagings get a warning
 * before any copy happens.
 */

export const LARGE_FILE_WARNING_BYTES = 512 * 1024 * 1024;

export class SandboxFiles {
  private files = new Map<string, Uint8Array>();

  write(path: string, content: Uint8Array): void {
    this.files.set(path, content.slice());
  }

  read(path: string): Uint8Array {
    const content = this.files.get(path);
    if (content === undefined) {
      throw new Error(`no such file in sandbox: ${path}`);
    }
    return content.slice();
  }

  exists(path: string): boolean {
    return this.files.has(path);
  }

  paths(): string[] {
    return [...this.files.keys()];
  }
}

export interface StagedFile {
  sandboxPath: string;
  byteSize: number;
  /** Set when the file is large enough that an in-memory filesystem may kill
   * the run; the user should be warned before proceeding. */
  largeFileWarning: boolean;
}

/**
 * Copy one explicitly user-selected file into the sandbox filesystem and
 * return the path to pass as the corresponding path-kind argument. The
 * content never leaves the page.
 */
export function stageLocalFile(
  sandbox: SandboxFiles,
  fileName: string,
  content: Uint8Array,
): StagedFile {
  const base = fileName.split("/").pop()!.split("\\").pop()!;
  let sandboxPath = `/data/${base}`;
  let counter = 1;
  while (sandbox.exists(sandboxPath)) {
    sandboxPath = `/data/${counter++}-${base}`;
  }
  sandbox.write(sandboxPath, content);
  return {
    sandboxPath,
    byteSize: content.byteLength,
    largeFileWarning: content.byteLength >= LARGE_FILE_WARNING_BYTES,
  };
}
