/**
 * Boot the console against the service that served this page.
 *
 * Wiring only: the store holds the state, the poller feeds it events, and
 * every click maps to one store action. Served by the metering service's
 * --console flag, so the API base is simply this page's own origin.
 */

import { MeterApi } from "./api.js";
import { EventPoller } from "./poller.js";
import { lookupElements, render } from "./render.js";
import { ConsoleStore } from "./store.js";

const api = new MeterApi(window.location.origin);
const store = new ConsoleStore(api);
const poller = new EventPoller(api, store);
const el = lookupElements(document);

store.subscribe((state) => render(state, el));

el.btnActivate.addEventListener("click", () => void store.activateWriter());
el.btnAuth.addEventListener("click", () => {
  const uid = (document.getElementById("uid") as HTMLInputElement).value.trim();
  const key = (document.getElementById("key") as HTMLInputElement).value.trim();
  void store.authenticate(uid, key);
});
el.btnRead.addEventListener("click", () => void store.readBalance());
el.btnTopup.addEventListener("click", () => {
  const amount = (document.getElementById("amount") as HTMLInputElement).value;
  void store.topUp(amount);
});

el.loads.addEventListener("click", (event) => {
  const button = (event.target as HTMLElement).closest("button");
  if (button?.dataset.name) {
    void store.switchLoad(button.dataset.name, button.dataset.on === "true");
  }
});

el.toast.addEventListener("click", () => store.dismissToast());

render(store.getState(), el);
void store.seedSms();
poller.start();
