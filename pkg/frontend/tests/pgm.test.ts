import { describe, expect, it } from "vitest";

import { decodePgm, toRgba } from "../src/pgm.js";

function bytes(...parts: (string | number[])[]): ArrayBuffer {
  const chunks = parts.map((p) =>
    typeof p === "string" ? [...p].map((c) => c.charCodeAt(0)) : p,
  );
  return new Uint8Array(chunks.flat()).buffer;
}

describe("decodePgm", () => {
  it("decodes an 8-bit raster", () => {
    const pgm = decodePgm(bytes("P5\n3 2\n255\n", [0, 1, 2, 3, 4, 255]));
    expect(pgm.width).toBe(3);
    expect(pgm.height).toBe(2);
    expect(pgm.maxval).toBe(255);
    expect([...pgm.samples]).toEqual([0, 1, 2, 3, 4, 255]);
  });

  it("decodes 16-bit big-endian samples", () => {
    const pgm = decodePgm(bytes("P5\n2 1\n65535\n", [0x01, 0x00, 0xff, 0xff]));
    expect([...pgm.samples]).toEqual([256, 65535]);
  });

  it("skips header comments", () => {
    const pgm = decodePgm(bytes("P5\n# made by a scanner\n1 1\n255\n", [42]));
    expect([...pgm.samples]).toEqual([42]);
  });

  it("rejects ASCII P2", () => {
    expect(() => decodePgm(bytes("P2\n1 1\n255\n0"))).toThrow(/P5/);
  });

  it("rejects unsupported maxval", () => {
    expect(() => decodePgm(bytes("P5\n1 1\n1023\n", [0, 0]))).toThrow(/maxval/);
  });

  it("rejects truncated samples", () => {
    expect(() => decodePgm(bytes("P5\n2 2\n255\n", [1, 2]))).toThrow(/truncated/);
  });
});

describe("toRgba", () => {
  it("expands 8-bit grayscale to opaque RGBA", () => {
    const rgba = toRgba(decodePgm(bytes("P5\n2 1\n255\n", [0, 200])));
    expect([...rgba]).toEqual([0, 0, 0, 255, 200, 200, 200, 255]);
  });

  it("scales 16-bit values into display range", () => {
    const rgba = toRgba(decodePgm(bytes("P5\n1 1\n65535\n", [0xff, 0xff])));
    expect([...rgba]).toEqual([255, 255, 255, 255]);
  });
});
