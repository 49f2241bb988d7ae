import { describe, expect, it } from "vitest";

import { ServiceError, type ApiSurface } from "../src/api.js";
import { ConsoleStore } from "../src/store.js";
import type { EventBatch, MeterSnapshot, SmsMessage, TopupStepResult } from "../src/types.js";

/**
 * Scripted service double. Every call is appended to `calls`, so the tests
 * can assert not just outcomes but that disabled actions sent NOTHING.
 */
class FakeApi implements ApiSurface {
  calls: string[] = [];
  failAuthWith: ServiceError | null = null;
  cardBalance = 0;

  meterState(): Promise<MeterSnapshot> {
    this.calls.push("meterState");
    return Promise.reject(new Error("not used in these tests"));
  }

  events(since: number): Promise<EventBatch> {
    this.calls.push(`events(${since})`);
    return Promise.resolve({ events: [], next: since });
  }

  smsInbox(): Promise<SmsMessage[]> {
    this.calls.push("smsInbox");
    return Promise.resolve([]);
  }

  activateWriter(): Promise<TopupStepResult> {
    this.calls.push("activateWriter");
    return Promise.resolve({ step: "WriterActive" });
  }

  authenticate(uidHex: string, keyHex: string): Promise<TopupStepResult> {
    this.calls.push(`authenticate(${uidHex},${keyHex})`);
    if (this.failAuthWith !== null) {
      return Promise.reject(this.failAuthWith);
    }
    return Promise.resolve({ step: "Authenticated" });
  }

  readBalance(): Promise<TopupStepResult> {
    this.calls.push("readBalance");
    return Promise.resolve({ step: "BalanceRead", balance_msen: this.cardBalance });
  }

  topUp(amountMsen: number): Promise<TopupStepResult> {
    this.calls.push(`topUp(${amountMsen})`);
    this.cardBalance += amountMsen;
    return Promise.resolve({ step: "Done", balance_msen: this.cardBalance });
  }

  switchLoad(name: string, on: boolean): Promise<{ name: string; switched_on: boolean }> {
    this.calls.push(`switchLoad(${name},${on})`);
    if (name !== "bulb60") {
      return Promise.reject(new ServiceError(404, `no load named '${name}'`));
    }
    return Promise.resolve({ name, switched_on: on });
  }
}

function freshStore(): { api: FakeApi; store: ConsoleStore } {
  const api = new FakeApi();
  return { api, store: new ConsoleStore(api) };
}

describe("wizard happy path", () => {
  it("walks the four steps and raises the banner", async () => {
    const { api, store } = freshStore();
    await store.activateWriter();
    expect(store.getState().wizard.step).toBe("WriterActive");
    await store.authenticate("a1b2c3d4", "0011223344556677");
    expect(store.getState().wizard.step).toBe("Authenticated");
    await store.readBalance();
    expect(store.getState().wizard.step).toBe("BalanceRead");
    expect(store.getState().wizard.lastReadMsen).toBe(0);
    await store.topUp("5.00");
    const state = store.getState();
    expect(state.wizard.step).toBe("Done");
    expect(state.banner).toBe("Top-up complete. Card balance RM 5.00.");
    expect(api.calls).toEqual([
      "activateWriter",
      "authenticate(a1b2c3d4,0011223344556677)",
      "readBalance",
      "topUp(500000)",
    ]);
  });

  it("allows a second run after completion", async () => {
    const { store } = freshStore();
    await store.activateWriter();
    await store.authenticate("a1b2c3d4", "0011223344556677");
    await store.readBalance();
    await store.topUp("5.00");
    expect(store.actions().activate).toBe(true);
    await store.activateWriter();
    expect(store.getState().wizard.step).toBe("WriterActive");
    expect(store.getState().banner).toBeNull();
  });
});

describe("gating: disabled steps send nothing", () => {
  it("refuses topUp straight from Start", async () => {
    const { api, store } = freshStore();
    await store.topUp("5.00");
    expect(api.calls).toEqual([]);
    expect(store.getState().wizard.step).toBe("Start");
    expect(store.getState().log.at(-1)).toMatch(/ignored topUp/);
  });

  it("refuses authenticate and readBalance out of order", async () => {
    const { api, store } = freshStore();
    await store.authenticate("a1b2c3d4", "00");
    await store.readBalance();
    expect(api.calls).toEqual([]);
  });

  it("refuses readBalance after activation but before authentication", async () => {
    const { api, store } = freshStore();
    await store.activateWriter();
    await store.readBalance();
    expect(api.calls).toEqual(["activateWriter"]);
    expect(store.getState().wizard.step).toBe("WriterActive");
  });

  it("ignores clicks while a request is in flight", async () => {
    const api = new FakeApi();
    let release: (value: TopupStepResult) => void = () => {};
    api.activateWriter = () => {
      api.calls.push("activateWriter");
      return new Promise<TopupStepResult>((resolve) => {
        release = resolve;
      });
    };
    const store = new ConsoleStore(api);
    const pending = store.activateWriter();
    await store.activateWriter();
    expect(api.calls).toEqual(["activateWriter"]);
    release({ step: "WriterActive" });
    await pending;
    expect(store.getState().wizard.step).toBe("WriterActive");
  });
});

describe("rejections", () => {
  it("shows the service message inline and keeps the step on auth failure", async () => {
    const { api, store } = freshStore();
    api.failAuthWith = new ServiceError(401, "key rejected by card");
    await store.activateWriter();
    await store.authenticate("a1b2c3d4", "ffffffffffffffff");
    let state = store.getState();
    expect(state.wizard.step).toBe("WriterActive");
    expect(state.wizard.error).toBe("key rejected by card");
    expect(store.actions().authenticate).toBe(true);

    api.failAuthWith = null;
    await store.authenticate("a1b2c3d4", "0011223344556677");
    state = store.getState();
    expect(state.wizard.step).toBe("Authenticated");
    expect(state.wizard.error).toBeNull();
  });

  it("rejects a negative amount locally without any request", async () => {
    const { api, store } = freshStore();
    await store.activateWriter();
    await store.authenticate("a1b2c3d4", "0011223344556677");
    await store.readBalance();
    const before = api.calls.length;
    await store.topUp("-5");
    expect(api.calls.length).toBe(before);
    const state = store.getState();
    expect(state.wizard.step).toBe("BalanceRead");
    expect(state.wizard.error).toMatch(/positive/);
  });

  it("rejects garbage amounts locally too", async () => {
    const { api, store } = freshStore();
    await store.activateWriter();
    await store.authenticate("a1b2c3d4", "0011223344556677");
    await store.readBalance();
    await store.topUp("five ringgit");
    expect(api.calls).not.toContainEqual(expect.stringMatching(/^topUp/));
    expect(store.getState().wizard.error).toMatch(/amount/);
  });
});

describe("loads and toasts", () => {
  it("raises a toast for an unknown load", async () => {
    const { store } = freshStore();
    await store.switchLoad("heater", true);
    expect(store.getState().toast).toBe("no load named 'heater'");
    store.dismissToast();
    expect(store.getState().toast).toBeNull();
  });

  it("echoes a successful switch into the snapshot", async () => {
    const { store } = freshStore();
    store.ingest({
      events: [
        {
          seq: 1,
          time_ms: 0,
          type: "snapshot",
          data: {
            time_ms: 0,
            state: "Active",
            balance_msen: 500_000,
            power_w: 0,
            total_energy_j: 0,
            relay_closed: true,
            buzzer_on: false,
            lcd: ["Credit:RM  5.00 ", "Power:    0.0W  "],
            meter_id: "MTR-001",
            loads: [{ name: "bulb60", rated_w: 60, measured_w: 57, switched_on: false }],
          },
        },
      ],
      next: 1,
    });
    await store.switchLoad("bulb60", true);
    expect(store.getState().snapshot?.loads[0].switched_on).toBe(true);
  });
});
