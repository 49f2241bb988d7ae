/**
 * Currency helpers.
 *
 * The service accounts in milli-sen (RM 1.00 = 100 000 msen). Operators type
 * amounts in RM with at most two decimals; the conversion to msen happens
 * here, on the client, so the service only ever sees integers.
 */

export const MSEN_PER_RM = 100_000;
export const MSEN_PER_SEN = 1_000;

const RM_PATTERN = /^(\d+)(?:\.(\d{1,2}))?$/;

export class AmountError extends Error {}

/**
 * Parse an operator-typed RM amount ("5", "5.0", "5.00") into msen.
 *
 * Rejects anything that is not a plain positive decimal with at most two
 * places: negatives, zero, signs, exponents, grouping, trailing garbage.
 */
export function rmTextToMsen(text: string): number {
  const trimmed = text.trim();
  if (trimmed.startsWith("-")) {
    throw new AmountError("amount must be positive");
  }
  const match = RM_PATTERN.exec(trimmed);
  if (!match) {
    throw new AmountError("enter an amount in RM with at most 2 decimals");
  }
  const whole = Number(match[1]);
  const cents = Number((match[2] ?? "").padEnd(2, "0") || "0");
  const msen = whole * MSEN_PER_RM + cents * MSEN_PER_SEN;
  if (msen <= 0) {
    throw new AmountError("amount must be positive");
  }
  if (!Number.isSafeInteger(msen)) {
    throw new AmountError("amount is too large");
  }
  return msen;
}

/**
 * Render msen as an RM string for display, truncated to the sen so the
 * console never shows more credit than is actually there. The LCD mirror,
 * not this, is the authoritative display.
 */
export function msenToRmText(msen: number): string {
  const sign = msen < 0 ? "-" : "";
  const sen = Math.floor(Math.abs(msen) / MSEN_PER_SEN);
  const whole = Math.floor(sen / 100);
  const frac = sen % 100;
  return `${sign}RM ${whole}.${String(frac).padStart(2, "0")}`;
}
