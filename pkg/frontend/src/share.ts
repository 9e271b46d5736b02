/**
 * Sharing a run's result: seal in the browser, POST the opaque blob, hand
 * out a link carrying origin + token only (the token rides in the fragment,
 * keeping it out of request logs). The passphrase travels out-of-band,
 * always. Receiving needs no login: the link plus the passphrase is the
 * whole capability.
 */

import type { HubClient } from "./api.js";
import { IntegrityFailure, seal, unseal } from "./crypto.js";
import type { RunOutcome } from "./types.js";

export const UNIFORM_RECEIVE_ERROR = "wrong passphrase or corrupted data";

export interface ShareHandle {
  link: string;
  token: string;
  expiresAt: string;
}

const htmlEncoder = new TextEncoder();

export async function shareResult(
  outcome: RunOutcome,
  passphrase: string,
  client: HubClient,
): Promise<ShareHandle> {
  const [payload, fileName] =
    outcome.kind === "html"
      ? [htmlEncoder.encode(outcome.html), "result.html"]
      : [outcome.fileBytes, outcome.fileName];
  const blob = await seal(payload, fileName, passphrase);
  const { token, expires_at } = await client.storeShare(blob);
  return { link: `${client.baseUrl}/receive#${token}`, token, expiresAt: expires_at };
}

export type ReceivedResult =
  | { kind: "html"; html: string; fileName: string }
  | { kind: "file"; fileName: string; fileBytes: Uint8Array };

export async function receiveResult(
  token: string,
  passphrase: string,
  client: HubClient,
): Promise<ReceivedResult> {
  const blob = await client.fetchShare(token);
  let opened;
  try {
    opened = await unseal(blob, passphrase);
  } catch (error) {
    if (error instanceof IntegrityFailure) {
      throw new Error(UNIFORM_RECEIVE_ERROR);
    }
    throw error;
  }
  if (opened.fileName.toLowerCase().endsWith(".html")) {
    return {
      kind: "html",
      html: new TextDecoder().decode(opened.payload),
      fileName: opened.fileName,
    };
  }
  return { kind: "file", fileName: opened.fileName, fileBytes: opened.payload };
}

export function tokenFromLink(link: string): string | null {
  const hash = link.split("#")[1];
  return hash ? hash : null;
}
