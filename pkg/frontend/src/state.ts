/**
 * Console view model and its reducers.
 *
 * Everything on screen is a projection of this state object, and the state
 * itself is rebuilt by pure functions: fold the service's events in arrival
 * order, mix in the wizard step, and the same history always produces the
 * same view. Nothing here touches the network or the DOM.
 */

import type {
  EventBatch,
  LoadView,
  MeterEvent,
  MeterSnapshot,
  SmsMessage,
  TopupStepResult,
  WizardStep,
} from "./types.js";
import { msenToRmText } from "./money.js";

export const LOG_LIMIT = 200;

export interface WizardState {
  step: WizardStep;
  /** request in flight; all buttons disabled while true */
  busy: boolean;
  /** inline rejection message from the last failed action, if any */
  error: string | null;
  /** card balance reported by the Read Balance step */
  lastReadMsen: number | null;
}

export interface ConsoleState {
  /** true once any poll has succeeded */
  connected: boolean;
  /** true while the last poll failed; drives the stale indicator */
  stale: boolean;
  snapshot: MeterSnapshot | null;
  wizard: WizardState;
  /** success notification after a completed top-up */
  banner: string | null;
  /** transient error toast (unknown load and the like) */
  toast: string | null;
  inbox: SmsMessage[];
  log: string[];
  /** event cursor: highest seq already folded in */
  cursor: number;
}

export function initialState(): ConsoleState {
  return {
    connected: false,
    stale: false,
    snapshot: null,
    wizard: { step: "Start", busy: false, error: null, lastReadMsen: null },
    banner: null,
    toast: null,
    inbox: [],
    log: [],
    cursor: 0,
  };
}

function pushLog(log: string[], line: string): string[] {
  const next = [...log, line];
  return next.length > LOG_LIMIT ? next.slice(next.length - LOG_LIMIT) : next;
}

function smsKey(m: SmsMessage): string {
  return `${m.recipient}|${m.submitted_ms}|${m.delivered_ms}|${m.body}`;
}

/** Fold one service event into the view. Pure; arrival order is the contract. */
export function applyEvent(state: ConsoleState, event: MeterEvent): ConsoleState {
  switch (event.type) {
    case "snapshot": {
      const prev = state.snapshot;
      let log = state.log;
      if (prev === null) {
        log = pushLog(log, `t=${event.time_ms}ms meter ${event.data.meter_id} is ${event.data.state}`);
      } else if (prev.state !== event.data.state) {
        log = pushLog(log, `t=${event.time_ms}ms state ${prev.state} -> ${event.data.state}`);
      }
      return { ...state, snapshot: event.data, log, cursor: event.seq };
    }
    case "ledger": {
      const entry = event.data;
      const log = pushLog(
        state.log,
        `t=${event.time_ms}ms ledger #${entry.seq} ${entry.kind} ` +
          `${entry.amount_msen} msen, balance ${entry.balance_after_msen} msen`,
      );
      return { ...state, log, cursor: event.seq };
    }
    case "sms": {
      const seen = new Set(state.inbox.map(smsKey));
      const inbox = seen.has(smsKey(event.data)) ? state.inbox : [...state.inbox, event.data];
      const log = pushLog(
        state.log,
        `t=${event.time_ms}ms sms to ${event.data.recipient}: ${event.data.body}`,
      );
      return { ...state, inbox, log, cursor: event.seq };
    }
  }
}

/** Fold a poll result: every event in order, then the cursor and liveness. */
export function applyBatch(state: ConsoleState, batch: EventBatch): ConsoleState {
  let next = state;
  for (const event of batch.events) {
    next = applyEvent(next, event);
  }
  return { ...next, cursor: batch.next, connected: true, stale: false };
}

/** A poll failed; the view keeps its data but flags it as possibly stale. */
export function markStale(state: ConsoleState): ConsoleState {
  return { ...state, stale: true };
}

/** Seed the inbox from GET /sms (alerts delivered before we attached). */
export function seedInbox(state: ConsoleState, messages: SmsMessage[]): ConsoleState {
  const seen = new Set(state.inbox.map(smsKey));
  const merged = [...state.inbox];
  for (const message of messages) {
    if (!seen.has(smsKey(message))) {
      seen.add(smsKey(message));
      merged.push(message);
    }
  }
  return { ...state, inbox: merged };
}

// -- wizard reducers ----------------------------------------------------------

export interface EnabledActions {
  activate: boolean;
  authenticate: boolean;
  readBalance: boolean;
  topUp: boolean;
}

/**
 * Which wizard buttons are live. Exactly the next step is enabled, with one
 * exception: Activate Writer also doubles as "start over", since the service
 * opens a fresh session on every activation. Steps beyond the current one
 * are always disabled, so out-of-order clicks cannot happen.
 */
export function enabledActions(state: ConsoleState): EnabledActions {
  if (state.wizard.busy) {
    return { activate: false, authenticate: false, readBalance: false, topUp: false };
  }
  const step = state.wizard.step;
  return {
    activate: true,
    authenticate: step === "WriterActive",
    readBalance: step === "Authenticated",
    topUp: step === "BalanceRead",
  };
}

export function wizardBusy(state: ConsoleState): ConsoleState {
  return { ...state, wizard: { ...state.wizard, busy: true } };
}

/** A wizard call succeeded; adopt the step the service reports. */
export function wizardStepped(state: ConsoleState, result: TopupStepResult): ConsoleState {
  const wizard: WizardState = {
    step: result.step,
    busy: false,
    error: null,
    lastReadMsen:
      result.step === "BalanceRead" && result.balance_msen !== undefined
        ? result.balance_msen
        : result.step === "WriterActive"
          ? null
          : state.wizard.lastReadMsen,
  };
  let banner = state.banner;
  let log = pushLog(state.log, `wizard step ${result.step}`);
  if (result.step === "Done" && result.balance_msen !== undefined) {
    banner = `Top-up complete. Card balance ${msenToRmText(result.balance_msen)}.`;
    log = pushLog(log, banner);
  }
  if (result.step === "WriterActive") {
    banner = null;
  }
  return { ...state, wizard, banner, log };
}

/** The service rejected a wizard call; step is unchanged, error is shown inline. */
export function wizardRejected(state: ConsoleState, message: string): ConsoleState {
  return {
    ...state,
    wizard: { ...state.wizard, busy: false, error: message },
    log: pushLog(state.log, `wizard rejected: ${message}`),
  };
}

/** A disabled action was invoked anyway (scripted misuse); log it, send nothing. */
export function wizardIgnored(state: ConsoleState, action: string): ConsoleState {
  return {
    ...state,
    log: pushLog(state.log, `ignored ${action}: not enabled at step ${state.wizard.step}`),
  };
}

// -- toasts and local echo ------------------------------------------------------

export function showToast(state: ConsoleState, message: string): ConsoleState {
  return { ...state, toast: message, log: pushLog(state.log, `error: ${message}`) };
}

export function clearToast(state: ConsoleState): ConsoleState {
  return state.toast === null ? state : { ...state, toast: null };
}

/**
 * Local echo for a load switch so the toggle does not lag a poll interval;
 * the next snapshot event carries the same value and simply confirms it.
 */
export function loadSwitched(state: ConsoleState, name: string, on: boolean): ConsoleState {
  if (state.snapshot === null) {
    return state;
  }
  const loads: LoadView[] = state.snapshot.loads.map((load) =>
    load.name === name ? { ...load, switched_on: on } : load,
  );
  return { ...state, snapshot: { ...state.snapshot, loads } };
}
