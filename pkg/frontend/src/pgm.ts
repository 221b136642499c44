/** Client-side decoder for the binary PGM renders the service ships. */

export interface DecodedPgm {
  width: number;
  height: number;
  maxval: number;
  samples: Uint8Array | Uint16Array;
}

const WHITESPACE = new Set([0x20, 0x09, 0x0d, 0x0a, 0x0b, 0x0c]);

function readToken(bytes: Uint8Array, pos: number): { token: string; next: number } {
  let i = pos;
  while (i < bytes.length) {
    if (WHITESPACE.has(bytes[i])) {
      i += 1;
    } else if (bytes[i] === 0x23 /* '#' */) {
      while (i < bytes.length && bytes[i] !== 0x0a) i += 1;
    } else {
      break;
    }
  }
  if (i >= bytes.length) throw new Error("truncated PGM header");
  const start = i;
  while (i < bytes.length && !WHITESPACE.has(bytes[i])) i += 1;
  return { token: String.fromCharCode(...bytes.subarray(start, i)), next: i };
}

export function decodePgm(buffer: ArrayBuffer): DecodedPgm {
  const bytes = new Uint8Array(buffer);
  if (bytes.length < 2 || bytes[0] !== 0x50 || bytes[1] !== 0x35) {
    throw new Error("not a binary PGM (P5)");
  }
  let pos = 2;
  const fields: number[] = [];
  for (let k = 0; k < 3; k += 1) {
    const { token, next } = readToken(bytes, pos);
    const value = Number(token);
    if (!Number.isInteger(value)) throw new Error(`bad PGM header field ${token}`);
    fields.push(value);
    pos = next;
  }
  const [width, height, maxval] = fields;
  if (width < 1 || height < 1) throw new Error("bad PGM dimensions");
  if (maxval !== 255 && maxval !== 65535) throw new Error(`unsupported maxval ${maxval}`);
  pos += 1; // single whitespace separator before samples

  const count = width * height;
  if (maxval === 255) {
    if (bytes.length - pos < count) throw new Error("truncated PGM samples");
    return { width, height, maxval, samples: bytes.slice(pos, pos + count) };
  }
  if (bytes.length - pos < count * 2) throw new Error("truncated PGM samples");
  const samples = new Uint16Array(count);
  for (let i = 0; i < count; i += 1) {
    samples[i] = (bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1]; // big-endian
  }
  return { width, height, maxval, samples };
}

/** Expand grayscale samples into RGBA bytes for a canvas ImageData. */
export function toRgba(pgm: DecodedPgm): Uint8ClampedArray {
  const out = new Uint8ClampedArray(pgm.width * pgm.height * 4);
  for (let i = 0; i < pgm.samples.length; i += 1) {
    const v = pgm.maxval === 255 ? pgm.samples[i] : Math.round((pgm.samples[i] / 65535) * 255);
    out[4 * i] = v;
    out[4 * i + 1] = v;
    out[4 * i + 2] = v;
    out[4 * i + 3] = 255;
  }
  return out;
}
