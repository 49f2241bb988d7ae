import { describe, expect, it } from "vitest";

import { AmountError, msenToRmText, rmTextToMsen } from "../src/money.js";

describe("rmTextToMsen", () => {
  it("converts whole ringgit", () => {
    expect(rmTextToMsen("5")).toBe(500_000);
    expect(rmTextToMsen("1")).toBe(100_000);
    expect(rmTextToMsen("120")).toBe(12_000_000);
  });

  it("converts one and two decimal places", () => {
    expect(rmTextToMsen("5.00")).toBe(500_000);
    expect(rmTextToMsen("5.5")).toBe(550_000);
    expect(rmTextToMsen("5.05")).toBe(505_000);
    expect(rmTextToMsen("0.01")).toBe(1_000);
    expect(rmTextToMsen("12.34")).toBe(1_234_000);
  });

  it("tolerates surrounding whitespace", () => {
    expect(rmTextToMsen(" 5.00 ")).toBe(500_000);
  });

  it("rejects negative amounts", () => {
    expect(() => rmTextToMsen("-5")).toThrow(AmountError);
    expect(() => rmTextToMsen("-0.01")).toThrow(/positive/);
  });

  it("rejects zero", () => {
    expect(() => rmTextToMsen("0")).toThrow(/positive/);
    expect(() => rmTextToMsen("0.00")).toThrow(/positive/);
  });

  it("rejects malformed input", () => {
    for (const bad of ["", "abc", "5.", ".5", "5.005", "+5", "1e3", "5,00", "5 00", "RM5"]) {
      expect(() => rmTextToMsen(bad), bad).toThrow(AmountError);
    }
  });

  it("rejects amounts beyond safe integer range", () => {
    expect(() => rmTextToMsen("99999999999999999")).toThrow(/too large/);
  });
});

describe("msenToRmText", () => {
  it("formats exact ringgit", () => {
    expect(msenToRmText(500_000)).toBe("RM 5.00");
    expect(msenToRmText(0)).toBe("RM 0.00");
    expect(msenToRmText(12_340_000)).toBe("RM 123.40");
  });

  it("truncates sub-sen residue instead of rounding up", () => {
    expect(msenToRmText(582_500)).toBe("RM 5.82");
    expect(msenToRmText(99_999)).toBe("RM 0.99");
    expect(msenToRmText(999)).toBe("RM 0.00");
  });

  it("keeps the sign readable on negatives", () => {
    expect(msenToRmText(-1_000)).toBe("-RM 0.01");
  });

  it("round-trips operator input", () => {
    for (const text of ["5.00", "0.01", "123.45", "7.50"]) {
      const msen = rmTextToMsen(text);
      expect(msenToRmText(msen)).toBe(`RM ${text}`);
    }
  });
});
