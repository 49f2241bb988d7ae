/**
 * Thin fetch client for the metering service.
 *
 * One method per endpoint, nothing else: no retries, no caching, no state.
 * Non-2xx responses become ServiceError carrying the status and the
 * service's own {"error": ...} message so callers can show it verbatim.
 */

import type { EventBatch, MeterSnapshot, SmsMessage, TopupStepResult } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

/** What the store and poller need from the service; tests substitute fakes. */
export interface ApiSurface {
  meterState(): Promise<MeterSnapshot>;
  events(since: number): Promise<EventBatch>;
  smsInbox(): Promise<SmsMessage[]>;
  activateWriter(): Promise<TopupStepResult>;
  authenticate(uidHex: string, keyHex: string): Promise<TopupStepResult>;
  readBalance(): Promise<TopupStepResult>;
  topUp(amountMsen: number): Promise<TopupStepResult>;
  switchLoad(name: string, on: boolean): Promise<{ name: string; switched_on: boolean }>;
}

export class MeterApi implements ApiSurface {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/$/, "");
    // bind so a bare global fetch keeps its expected receiver
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  meterState(): Promise<MeterSnapshot> {
    return this.request("GET", "/meter/state");
  }

  events(since: number): Promise<EventBatch> {
    return this.request("GET", `/events?since=${since}`);
  }

  async smsInbox(): Promise<SmsMessage[]> {
    const body = await this.request<{ messages: SmsMessage[] }>("GET", "/sms");
    return body.messages;
  }

  activateWriter(): Promise<TopupStepResult> {
    return this.request("POST", "/topup/activate", {});
  }

  authenticate(uidHex: string, keyHex: string): Promise<TopupStepResult> {
    return this.request("POST", "/topup/authenticate", { uid: uidHex, key: keyHex });
  }

  readBalance(): Promise<TopupStepResult> {
    return this.request("GET", "/topup/balance");
  }

  topUp(amountMsen: number): Promise<TopupStepResult> {
    return this.request("POST", "/topup/amount", { amount_msen: amountMsen });
  }

  switchLoad(name: string, on: boolean): Promise<{ name: string; switched_on: boolean }> {
    return this.request("POST", `/loads/${encodeURIComponent(name)}/switch`, { on });
  }

  private async request<T>(method: string, path: string, body?: object): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    const text = await response.text();
    let parsed: unknown = null;
    try {
      parsed = text ? JSON.parse(text) : null;
    } catch {
      parsed = null;
    }
    if (!response.ok) {
      const detail =
        parsed !== null && typeof parsed === "object" && "error" in parsed
          ? String((parsed as { error: unknown }).error)
          : `HTTP ${response.status}`;
      throw new ServiceError(response.status, detail);
    }
    return parsed as T;
  }
}
