"""JSON-over-HTTP surface for one metering installation.

Endpoints:

    GET  /meter/state            current snapshot (lcd, relay, buzzer, loads)
    POST /topup/activate         vending step 1
    POST /topup/authenticate     vending step 2, body {"uid": hex, "key": hex}
    GET  /topup/balance          vending step 3
    POST /topup/amount           vending step 4, body {"amount_msen": int}
    GET  /sms                    delivered alert messages
    POST /loads/<name>/switch    body {"on": bool}
    GET  /events?since=<seq>     ordered event stream for live consumption

Errors come back as {"error": "..."} with 400 (bad input), 401 (bad
credentials), 404 (unknown path or load), or 409 (vending step out of
order). When a console directory is configured, its files are served at
/ so the operator UI shares the API's origin.
"""

from __future__ import annotations

import json
import mimetypes
import os
import re
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .meter import ForeignCardError, MeterError
from .system import MeterSystem
from .topup import TopupAuthError, TopupLinkError, WorkflowError

_LOAD_SWITCH = re.compile(r"^/loads/([A-Za-z0-9_.-]+)/switch$")


class ApiError(Exception):
    def __init__(self, status: int, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.message = message


class MeterApiHandler(BaseHTTPRequestHandler):
    server_version = "rfidmeter/0.1"
    system: MeterSystem  # injected by make_server
    console_dir: str | None = None

    # quiet: the test suite and demos drive hundreds of requests
    def log_message(self, format: str, *args) -> None:
        pass

    def do_GET(self) -> None:
        url = urlparse(self.path)
        try:
            if url.path == "/meter/state":
                self._json(200, self.system.meter_state())
            elif url.path == "/topup/balance":
                self._json(200, self._vending(self.system.topup_read_balance))
            elif url.path == "/sms":
                self._json(200, {"messages": self.system.sms_inbox()})
            elif url.path == "/events":
                since = self._since(url.query)
                self._json(200, self.system.events_since(since))
            elif self.console_dir is not None:
                self._static(url.path)
            else:
                raise ApiError(404, f"unknown path {url.path}")
        except ApiError as exc:
            self._json(exc.status, {"error": exc.message})

    def do_POST(self) -> None:
        url = urlparse(self.path)
        try:
            if url.path == "/topup/activate":
                self._json(200, self._vending(self.system.topup_activate))
            elif url.path == "/topup/authenticate":
                body = self._body()
                uid = self._hex_field(body, "uid")
                key = self._hex_field(body, "key")
                self._json(200, self._vending(self.system.topup_authenticate, uid, key))
            elif url.path == "/topup/amount":
                body = self._body()
                amount = body.get("amount_msen")
                if not isinstance(amount, int) or isinstance(amount, bool):
                    raise ApiError(400, "amount_msen must be an integer")
                self._json(200, self._vending(self.system.topup_amount, amount))
            else:
                match = _LOAD_SWITCH.match(url.path)
                if match:
                    body = self._body()
                    if not isinstance(body.get("on"), bool):
                        raise ApiError(400, "field 'on' must be a boolean")
                    try:
                        self._json(200, self.system.switch_load(match.group(1), body["on"]))
                    except KeyError as exc:
                        raise ApiError(404, str(exc.args[0])) from None
                else:
                    raise ApiError(404, f"unknown path {url.path}")
        except ApiError as exc:
            self._json(exc.status, {"error": exc.message})

    # -- helpers --------------------------------------------------------------

    def _vending(self, op, *args):
        try:
            return op(*args)
        except WorkflowError as exc:
            raise ApiError(409, str(exc)) from None
        except TopupAuthError as exc:
            raise ApiError(401, str(exc)) from None
        except (TopupLinkError, ForeignCardError, MeterError) as exc:
            raise ApiError(409, str(exc)) from None
        except ValueError as exc:
            raise ApiError(400, str(exc)) from None

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            parsed = json.loads(raw)
        except json.JSONDecodeError:
            raise ApiError(400, "request body is not valid JSON") from None
        if not isinstance(parsed, dict):
            raise ApiError(400, "request body must be a JSON object")
        return parsed

    def _hex_field(self, body: dict, name: str) -> bytes:
        value = body.get(name)
        if not isinstance(value, str):
            raise ApiError(400, f"field {name!r} must be a hex string")
        try:
            return bytes.fromhex(value)
        except ValueError:
            raise ApiError(400, f"field {name!r} is not valid hex") from None

    def _since(self, query: str) -> int:
        params = parse_qs(query)
        if "since" not in params:
            return 0
        try:
            return int(params["since"][0])
        except ValueError:
            raise ApiError(400, "since must be an integer") from None

    def _json(self, status: int, payload: dict) -> None:
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _static(self, path: str) -> None:
        assert self.console_dir is not None
        relative = path.lstrip("/") or "index.html"
        full = os.path.realpath(os.path.join(self.console_dir, relative))
        root = os.path.realpath(self.console_dir)
        if not full.startswith(root + os.sep) and full != root:
            raise ApiError(404, "not found")
        if os.path.isdir(full):
            full = os.path.join(full, "index.html")
        if not os.path.isfile(full):
            raise ApiError(404, f"not found: {path}")
        content_type = mimetypes.guess_type(full)[0] or "application/octet-stream"
        with open(full, "rb") as fh:
            data = fh.read()
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def make_server(
    system: MeterSystem,
    port: int = 0,
    host: str = "127.0.0.1",
    console_dir: str | None = None,
) -> ThreadingHTTPServer:
    """Build (but do not start) the HTTP server bound to *host*:*port*."""
    handler = type(
        "BoundMeterApiHandler",
        (MeterApiHandler,),
        {"system": system, "console_dir": console_dir},
    )
    return ThreadingHTTPServer((host, port), handler)


class ServiceRunner:
    """Server plus a wall-clock ticker, for `serve` and end-to-end tests."""

    def __init__(
        self,
        system: MeterSystem,
        port: int = 0,
        host: str = "127.0.0.1",
        console_dir: str | None = None,
        tick_ms: int = 100,
    ) -> None:
        self.system = system
        self.server = make_server(system, port, host, console_dir)
        self.tick_ms = tick_ms
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []

    @property
    def port(self) -> int:
        return self.server.server_address[1]

    def start(self) -> None:
        serve = threading.Thread(target=self.server.serve_forever, daemon=True)
        tick = threading.Thread(target=self._tick_loop, daemon=True)
        serve.start()
        tick.start()
        self._threads = [serve, tick]

    def _tick_loop(self) -> None:
        period_s = self.tick_ms / 1000.0
        while not self._stop.wait(period_s):
            self.system.advance(self.tick_ms)

    def stop(self) -> None:
        self._stop.set()
        self.server.shutdown()
        self.server.server_close()
        for thread in self._threads:
            thread.join(timeout=2.0)
        self.system.close()

    def run_forever(self) -> None:
        self.start()
        try:
            while True:
                time.sleep(3600)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()
