/**
 * Projection of ConsoleState onto the live DOM.
 *
 * One-way: render() copies the state onto elements looked up once at boot.
 * It never reads the DOM back, so the state stays the single source of
 * truth. Wizard button disabled attributes come straight from
 * enabledActions(), which is what makes out-of-order clicks impossible.
 */

import { msenToRmText } from "./money.js";
import { enabledActions, type ConsoleState } from "./state.js";

export interface ConsoleElements {
  meterId: HTMLElement;
  stateBadge: HTMLElement;
  stale: HTMLElement;
  lcd0: HTMLElement;
  lcd1: HTMLElement;
  relayLamp: HTMLElement;
  buzzerLamp: HTMLElement;
  balance: HTMLElement;
  power: HTMLElement;
  energy: HTMLElement;
  loads: HTMLElement;
  steps: HTMLElement;
  btnActivate: HTMLButtonElement;
  btnAuth: HTMLButtonElement;
  btnRead: HTMLButtonElement;
  btnTopup: HTMLButtonElement;
  cardBalance: HTMLElement;
  wizardError: HTMLElement;
  banner: HTMLElement;
  inbox: HTMLElement;
  log: HTMLElement;
  toast: HTMLElement;
}

export function lookupElements(doc: Document): ConsoleElements {
  const get = (id: string): HTMLElement => {
    const el = doc.getElementById(id);
    if (el === null) {
      throw new Error(`missing element #${id}`);
    }
    return el;
  };
  return {
    meterId: get("meter-id"),
    stateBadge: get("state-badge"),
    stale: get("stale"),
    lcd0: get("lcd0"),
    lcd1: get("lcd1"),
    relayLamp: get("relay-lamp"),
    buzzerLamp: get("buzzer-lamp"),
    balance: get("balance"),
    power: get("power"),
    energy: get("energy"),
    loads: get("loads"),
    steps: get("steps"),
    btnActivate: get("btn-activate") as HTMLButtonElement,
    btnAuth: get("btn-auth") as HTMLButtonElement,
    btnRead: get("btn-read") as HTMLButtonElement,
    btnTopup: get("btn-topup") as HTMLButtonElement,
    cardBalance: get("card-balance"),
    wizardError: get("wizard-error"),
    banner: get("banner"),
    inbox: get("inbox"),
    log: get("log"),
    toast: get("toast"),
  };
}

export function render(state: ConsoleState, el: ConsoleElements): void {
  el.stale.classList.toggle("show", state.connected && state.stale);

  const snap = state.snapshot;
  if (snap !== null) {
    el.meterId.textContent = snap.meter_id;
    el.stateBadge.textContent = snap.state;
    el.stateBadge.className = `badge state-${snap.state}`;
    // textContent on a <pre> keeps the 16 columns exactly as sent
    el.lcd0.textContent = snap.lcd[0];
    el.lcd1.textContent = snap.lcd[1];
    el.relayLamp.className = snap.relay_closed ? "lamp on-good" : "lamp on-bad";
    el.relayLamp.textContent = snap.relay_closed ? "relay closed" : "relay open";
    el.buzzerLamp.className = snap.buzzer_on ? "lamp on-warn" : "lamp";
    el.buzzerLamp.textContent = snap.buzzer_on ? "buzzer ON" : "buzzer";
    el.balance.textContent = `${msenToRmText(snap.balance_msen)} (${snap.balance_msen} msen)`;
    el.power.textContent = `${snap.power_w.toFixed(1)} W`;
    el.energy.textContent = `${snap.total_energy_j.toFixed(1)} J`;
    renderLoads(state, el.loads);
  }

  for (const item of Array.from(el.steps.children)) {
    item.classList.toggle(
      "here",
      (item as HTMLElement).dataset.step === state.wizard.step,
    );
  }
  const actions = enabledActions(state);
  el.btnActivate.disabled = !actions.activate;
  el.btnAuth.disabled = !actions.authenticate;
  el.btnRead.disabled = !actions.readBalance;
  el.btnTopup.disabled = !actions.topUp;
  el.cardBalance.textContent =
    state.wizard.lastReadMsen !== null
      ? `card holds ${msenToRmText(state.wizard.lastReadMsen)}`
      : "";
  el.wizardError.textContent = state.wizard.error ?? "";
  el.banner.textContent = state.banner ?? "";
  el.banner.classList.toggle("show", state.banner !== null);

  renderInbox(state, el.inbox);
  el.log.textContent = state.log.join("\n");
  el.log.scrollTop = el.log.scrollHeight;

  el.toast.textContent = state.toast ?? "";
  el.toast.classList.toggle("show", state.toast !== null);
}

function renderLoads(state: ConsoleState, container: HTMLElement): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  for (const load of state.snapshot?.loads ?? []) {
    const button = doc.createElement("button");
    button.dataset.name = load.name;
    button.dataset.on = String(!load.switched_on);
    button.className = load.switched_on ? "on" : "";
    const label = doc.createElement("span");
    label.textContent = `${load.name} (${load.rated_w} W rated)`;
    const reading = doc.createElement("span");
    reading.textContent = load.switched_on ? `${load.measured_w.toFixed(1)} W` : "off";
    button.append(label, reading);
    container.append(button);
  }
}

function renderInbox(state: ConsoleState, container: HTMLElement): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  if (state.inbox.length === 0) {
    const li = doc.createElement("li");
    li.textContent = "no alerts";
    container.append(li);
    return;
  }
  for (const message of state.inbox) {
    const li = doc.createElement("li");
    const body = doc.createElement("div");
    body.textContent = message.body;
    const meta = doc.createElement("div");
    meta.className = "meta";
    meta.textContent =
      `to ${message.recipient}, sent t=${message.submitted_ms}ms, ` +
      `delivered t=${message.delivered_ms}ms`;
    li.append(body, meta);
    container.append(li);
  }
}
