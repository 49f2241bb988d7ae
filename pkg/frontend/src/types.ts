/**
 * Wire types for the metering service HTTP surface.
 *
 * Everything here mirrors the JSON the service actually sends; the console
 * never invents fields of its own on these shapes.
 */

export interface LoadView {
  name: string;
  rated_w: number;
  measured_w: number;
  switched_on: boolean;
}

export type MeterStateName = "Idle" | "Active" | "LowCredit" | "CutOff";

export interface MeterSnapshot {
  time_ms: number;
  state: MeterStateName;
  balance_msen: number;
  power_w: number;
  total_energy_j: number;
  relay_closed: boolean;
  buzzer_on: boolean;
  /** two 16-character lines, exactly as the meter renders them */
  lcd: [string, string];
  meter_id: string;
  loads: LoadView[];
}

export interface LedgerEntry {
  seq: number;
  time_ms: number;
  card_uid: string;
  kind: string;
  amount_msen: number;
  balance_after_msen: number;
}

export interface SmsMessage {
  recipient: string;
  body: string;
  submitted_ms: number;
  delivered_ms: number;
}

export type MeterEvent =
  | { seq: number; time_ms: number; type: "snapshot"; data: MeterSnapshot }
  | { seq: number; time_ms: number; type: "ledger"; data: LedgerEntry }
  | { seq: number; time_ms: number; type: "sms"; data: SmsMessage };

export interface EventBatch {
  events: MeterEvent[];
  next: number;
}

/** Vending session steps, as the service names them. "Start" means no step taken yet. */
export type WizardStep = "Start" | "WriterActive" | "Authenticated" | "BalanceRead" | "Done";

export interface TopupStepResult {
  step: WizardStep;
  balance_msen?: number;
}
