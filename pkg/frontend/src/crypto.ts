/**
 * Client-side sealing, byte-compatible with the hub's reference envelope.
 *
 * Wire layout:   salt(16) || iv(16) || ciphertext
 * Plaintext:     sha256(payload)(32) || nameLength(2, big-endian) || name(utf-8) || payload
 * Key:           PBKDF2-HMAC-SHA256(passphrase, salt, 100 000 iterations) -> 32 bytes
 * Cipher:        AES-256-CBC with PKCS#7 padding (WebCrypto applies it natively)
 *
 * Everything after the structural checks fails with the single uniform
 * IntegrityFailure — wrong passphrase, flipped bits, and garbled envelopes
 * are indistinguishable to callers.
 */

export const SALT_SIZE = 16;
export const IV_SIZE = 16;
export const KDF_ITERATIONS = 100_000;
const CHECKSUM_SIZE = 32;
const NAME_LENGTH_SIZE = 2;
const MAX_NAME_BYTES = 0xffff;
const MIN_BLOB_SIZE = SALT_SIZE + IV_SIZE + 16;

const INTEGRITY_MESSAGE = "sealed data could not be opened";

export class SealingError extends Error {}
export class EmptyPassphrase extends SealingError {}
export class FileNameTooLong extends SealingError {}
export class FileNameHasSeparators extends SealingError {}
export class MalformedBlob extends SealingError {}
export class IntegrityFailure extends SealingError {
  constructor() {
    super(INTEGRITY_MESSAGE);
  }
}

const encoder = new TextEncoder();

export type RandomBytes = (length: number) => Uint8Array;

const defaultRandomBytes: RandomBytes = (length) =>
  crypto.getRandomValues(new Uint8Array(length));

export async function checksum(payload: Uint8Array): Promise<Uint8Array> {
  return new Uint8Array(await crypto.subtle.digest("SHA-256", toBuffer(payload)));
}

/** Copy into a plain ArrayBuffer-backed view (WebCrypto rejects SharedArrayBuffer views). */
function toBuffer(bytes: Uint8Array): ArrayBuffer {
  const copy = new Uint8Array(bytes.byteLength);
  copy.set(bytes);
  return copy.buffer;
}

export async function deriveKey(passphrase: string, salt: Uint8Array): Promise<CryptoKey> {
  if (passphrase.length === 0) {
    throw new EmptyPassphrase("passphrase must not be empty");
  }
  if (salt.byteLength !== SALT_SIZE) {
    throw new SealingError(`salt must be exactly ${SALT_SIZE} bytes`);
  }
  const material = await crypto.subtle.importKey(
    "raw",
    toBuffer(encoder.encode(passphrase)),
    "PBKDF2",
    false,
    ["deriveKey"],
  );
  return crypto.subtle.deriveKey(
    { name: "PBKDF2", hash: "SHA-256", salt: toBuffer(salt), iterations: KDF_ITERATIONS },
    material,
    { name: "AES-CBC", length: 256 },
    false,
    ["encrypt", "decrypt"],
  );
}

function checkFileName(fileName: string): Uint8Array {
  if (fileName.includes("/") || fileName.includes("\\")) {
    throw new FileNameHasSeparators(`file name contains a path separator: ${fileName}`);
  }
  const encoded = encoder.encode(fileName);
  if (encoded.byteLength > MAX_NAME_BYTES) {
    throw new FileNameTooLong(`file name is ${encoded.byteLength} bytes; limit is ${MAX_NAME_BYTES}`);
  }
  return encoded;
}

/** Seal payload + file name under a passphrase; returns the full wire bytes. */
export async function seal(
  payload: Uint8Array,
  fileName: string,
  passphrase: string,
  randomBytes: RandomBytes = defaultRandomBytes,
): Promise<Uint8Array> {
  if (passphrase.length === 0) {
    throw new EmptyPassphrase("passphrase must not be empty");
  }
  const name = checkFileName(fileName);
  const salt = randomBytes(SALT_SIZE);
  const iv = randomBytes(IV_SIZE);
  const key = await deriveKey(passphrase, salt);

  const digest = await checksum(payload);
  const envelope = new Uint8Array(CHECKSUM_SIZE + NAME_LENGTH_SIZE + name.byteLength + payload.byteLength);
  envelope.set(digest, 0);
  envelope[CHECKSUM_SIZE] = name.byteLength >> 8;
  envelope[CHECKSUM_SIZE + 1] = name.byteLength & 0xff;
  envelope.set(name, CHECKSUM_SIZE + NAME_LENGTH_SIZE);
  envelope.set(payload, CHECKSUM_SIZE + NAME_LENGTH_SIZE + name.byteLength);

  const ciphertext = new Uint8Array(
    await crypto.subtle.encrypt({ name: "AES-CBC", iv: toBuffer(iv) }, key, toBuffer(envelope)),
  );
  const blob = new Uint8Array(SALT_SIZE + IV_SIZE + ciphertext.byteLength);
  blob.set(salt, 0);
  blob.set(iv, SALT_SIZE);
  blob.set(ciphertext, SALT_SIZE + IV_SIZE);
  return blob;
}

export interface Unsealed {
  payload: Uint8Array;
  fileName: string;
}

export async function unseal(blob: Uint8Array, passphrase: string): Promise<Unsealed> {
  if (blob.byteLength < MIN_BLOB_SIZE || (blob.byteLength - SALT_SIZE - IV_SIZE) % 16 !== 0) {
    throw new MalformedBlob("blob fails the salt/iv/ciphertext layout checks");
  }
  const salt = blob.slice(0, SALT_SIZE);
  const iv = blob.slice(SALT_SIZE, SALT_SIZE + IV_SIZE);
  const ciphertext = blob.slice(SALT_SIZE + IV_SIZE);
  const key = await deriveKey(passphrase, salt);

  let envelope: Uint8Array;
  try {
    envelope = new Uint8Array(
      await crypto.subtle.decrypt({ name: "AES-CBC", iv: toBuffer(iv) }, key, toBuffer(ciphertext)),
    );
  } catch {
    throw new IntegrityFailure();
  }
  if (envelope.byteLength < CHECKSUM_SIZE + NAME_LENGTH_SIZE) {
    throw new IntegrityFailure();
  }
  const stored = envelope.slice(0, CHECKSUM_SIZE);
  const nameLength = (envelope[CHECKSUM_SIZE]! << 8) | envelope[CHECKSUM_SIZE + 1]!;
  if (envelope.byteLength < CHECKSUM_SIZE + NAME_LENGTH_SIZE + nameLength) {
    throw new IntegrityFailure();
  }
  const nameBytes = envelope.slice(CHECKSUM_SIZE + NAME_LENGTH_SIZE, CHECKSUM_SIZE + NAME_LENGTH_SIZE + nameLength);
  const payload = envelope.slice(CHECKSUM_SIZE + NAME_LENGTH_SIZE + nameLength);

  let fileName: string;
  try {
    fileName = new TextDecoder("utf-8", { fatal: true }).decode(nameBytes);
  } catch {
    throw new IntegrityFailure();
  }
  if (fileName.includes("/") || fileName.includes("\\")) {
    throw new IntegrityFailure();
  }
  const recomputed = await checksum(payload);
  if (!bytesEqual(stored, recomputed)) {
    throw new IntegrityFailure();
  }
  return { payload, fileName };
}

function bytesEqual(a: Uint8Array, b: Uint8Array): boolean {
  if (a.byteLength !== b.byteLength) return false;
  let diff = 0;
  for (let i = 0; i < a.byteLength; i++) diff |= a[i]! ^ b[i]!;
  return diff === 0;
}

export function blobToBase64(blob: Uint8Array): string {
  let binary = "";
  for (let i = 0; i < blob.byteLength; i++) binary += String.fromCharCode(blob[i]!);
  return btoa(binary);
}

export function blobFromBase64(text: string): Uint8Array {
  let binary: string;
  try {
    binary = atob(text);
  } catch {
    throw new MalformedBlob("invalid base64");
  }
  return Uint8Array.from(binary, (c) => c.charCodeAt(0));
}
