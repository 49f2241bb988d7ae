/**
 * The console store: owns the single ConsoleState, runs every action through
 * the pure reducers in state.ts, and notifies subscribers after each change.
 *
 * The gating invariant lives here: a wizard action whose button is disabled
 * returns without touching the network. The DOM disables the buttons too,
 * but this guard holds even for scripted callers.
 */

import { ServiceError, type ApiSurface } from "./api.js";
import { AmountError, rmTextToMsen } from "./money.js";
import {
  applyBatch,
  clearToast,
  enabledActions,
  initialState,
  loadSwitched,
  markStale,
  seedInbox,
  showToast,
  wizardBusy,
  wizardIgnored,
  wizardRejected,
  wizardStepped,
  type ConsoleState,
  type EnabledActions,
} from "./state.js";
import type { EventBatch, TopupStepResult } from "./types.js";

export type Listener = (state: ConsoleState) => void;

export class ConsoleStore {
  private state: ConsoleState = initialState();
  private readonly listeners: Listener[] = [];

  constructor(private readonly api: ApiSurface) {}

  getState(): ConsoleState {
    return this.state;
  }

  actions(): EnabledActions {
    return enabledActions(this.state);
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      const index = this.listeners.indexOf(listener);
      if (index >= 0) {
        this.listeners.splice(index, 1);
      }
    };
  }

  private set(next: ConsoleState): void {
    this.state = next;
    for (const listener of this.listeners) {
      listener(next);
    }
  }

  // -- event stream -------------------------------------------------------

  /** Fold one poll result in arrival order. */
  ingest(batch: EventBatch): void {
    this.set(applyBatch(this.state, batch));
  }

  pollFailed(): void {
    this.set(markStale(this.state));
  }

  cursor(): number {
    return this.state.cursor;
  }

  /** One-time catch-up for alerts delivered before the console attached. */
  async seedSms(): Promise<void> {
    try {
      const messages = await this.api.smsInbox();
      this.set(seedInbox(this.state, messages));
    } catch {
      // the poller will flag staleness; the inbox just starts empty
    }
  }

  // -- wizard actions -------------------------------------------------------

  async activateWriter(): Promise<void> {
    await this.wizardCall("activate", () => this.api.activateWriter());
  }

  async authenticate(uidHex: string, keyHex: string): Promise<void> {
    await this.wizardCall("authenticate", () => this.api.authenticate(uidHex, keyHex));
  }

  async readBalance(): Promise<void> {
    await this.wizardCall("readBalance", () => this.api.readBalance());
  }

  /** amountText is operator input in RM; conversion and validation are local. */
  async topUp(amountText: string): Promise<void> {
    if (!this.actions().topUp) {
      this.set(wizardIgnored(this.state, "topUp"));
      return;
    }
    let amountMsen: number;
    try {
      amountMsen = rmTextToMsen(amountText);
    } catch (err) {
      if (err instanceof AmountError) {
        this.set(wizardRejected(this.state, err.message));
        return;
      }
      throw err;
    }
    await this.wizardCall("topUp", () => this.api.topUp(amountMsen), true);
  }

  private async wizardCall(
    name: keyof EnabledActions,
    call: () => Promise<TopupStepResult>,
    preChecked = false,
  ): Promise<void> {
    if (!preChecked && !this.actions()[name]) {
      this.set(wizardIgnored(this.state, name));
      return;
    }
    this.set(wizardBusy(this.state));
    try {
      const result = await call();
      this.set(wizardStepped(this.state, result));
    } catch (err) {
      const message = err instanceof ServiceError ? err.message : "service unreachable";
      this.set(wizardRejected(this.state, message));
    }
  }

  // -- loads ---------------------------------------------------------------

  async switchLoad(name: string, on: boolean): Promise<void> {
    try {
      const result = await this.api.switchLoad(name, on);
      this.set(loadSwitched(this.state, result.name, result.switched_on));
    } catch (err) {
      const message = err instanceof ServiceError ? err.message : "service unreachable";
      this.set(showToast(this.state, message));
    }
  }

  dismissToast(): void {
    this.set(clearToast(this.state));
  }
}
