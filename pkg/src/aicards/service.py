"""HTTP facade: taxonomy, sessions, cards, validation, exports, dispatch.

A deliberately small stdlib server. Cards are immutable once stored, so
the store is a directory per card written with a stage-then-rename
discipline: a card is either fully present with its complete export
bundle or absent. Session mutations are serialized per session id and
guarded by a revision compare-and-set, which is what the 409 responses on
stale revisions implement.

Configuration comes from environment variables:

  AICARDS_LISTEN      listen address, default 127.0.0.1:8337
  AICARDS_DATA_DIR    storage root, default ./aicards-data
  AICARDS_DISPATCHER  email dispatcher, default "outbox"
  AICARDS_BASE_URL    public base for export links, default http://<listen>
  AICARDS_TAXONOMY    optional path to a custom taxonomy document
  AICARDS_UI_DIR      optional directory of static files served at /
"""

from __future__ import annotations

import datetime as dt
import json
import os
import re
import secrets
import shutil
import threading
from dataclasses import dataclass
from email.message import EmailMessage
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any, Callable

from . import questionnaire as q
from .codecs import FORMATS, ExportBundle, build_bundle, obj_to_card
from .errors import (
    AicardsError,
    AtFirstStepError,
    CardDecodeError,
    CardSchemaError,
    IncompleteSessionError,
    InvalidRecipientError,
    PayloadInvalidError,
    ScriptError,
    SessionFinalizedError,
    StaleRevisionError,
    StepMismatchError,
    UnknownCardError,
    UnknownTaxonomyError,
)
from .render import field_list
from .taxonomy import get_taxonomy, known_versions, load_taxonomy, register_taxonomy
from .validator import assess, report_to_dict

_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")

EMAIL_TUTORIAL = """Thank you for documenting your AI usage.

Attached are the five renderings of your AI Usage Card:

  card.tex   LaTeX fragment; \\input it into your document (needs the
             longtable, booktabs, and xcolor packages) and compile to PDF
  card.bib   BibTeX record for reference managers
  card.json  machine-readable card (lossless)
  card.xml   machine-readable card (lossless)
  card.csv   flat-table card (lossless)

Include the LaTeX card in an appendix or acknowledgment section, and
publish one of the machine-readable files alongside your artifact so the
usage stays analyzable. The card may be redistributed under CC BY-NC 4.0.
"""


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8337
    data_dir: Path = Path("aicards-data")
    dispatcher: str = "outbox"
    base_url: str | None = None
    taxonomy_path: Path | None = None
    ui_dir: Path | None = None

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> "ServiceConfig":
        env = dict(os.environ if env is None else env)
        listen = env.get("AICARDS_LISTEN", "127.0.0.1:8337")
        host, _, port = listen.rpartition(":")
        taxonomy = env.get("AICARDS_TAXONOMY")
        ui_dir = env.get("AICARDS_UI_DIR")
        return cls(
            host=host or "127.0.0.1",
            port=int(port),
            data_dir=Path(env.get("AICARDS_DATA_DIR", "aicards-data")),
            dispatcher=env.get("AICARDS_DISPATCHER", "outbox"),
            base_url=env.get("AICARDS_BASE_URL"),
            taxonomy_path=Path(taxonomy) if taxonomy else None,
            ui_dir=Path(ui_dir) if ui_dir else None,
        )

    def public_base(self) -> str:
        return (self.base_url or f"http://{self.host}:{self.port}").rstrip("/")


# -- storage --------------------------------------------------------------------

class Store:
    """Directory-backed persistence with atomic writes."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.sessions = self.root / "sessions"
        self.cards = self.root / "cards"
        self.outbox = self.root / "outbox"
        self.staging = self.root / "tmp"
        for directory in (self.sessions, self.cards, self.outbox, self.staging):
            directory.mkdir(parents=True, exist_ok=True)

    # sessions

    def save_session(self, session: q.Session) -> None:
        payload = json.dumps(q.session_to_obj(session), ensure_ascii=False, indent=2)
        tmp = self.staging / f"session-{session.id}-{secrets.token_hex(4)}.json"
        tmp.write_text(payload, encoding="utf-8")
        os.replace(tmp, self.sessions / f"{session.id}.json")

    def load_session(self, session_id: str) -> q.Session | None:
        path = self.sessions / f"{session_id}.json"
        if not _is_token(session_id) or not path.exists():
            return None
        return q.session_from_obj(json.loads(path.read_text(encoding="utf-8")))

    def session_card_id(self, session_id: str) -> str | None:
        path = self.sessions / f"{session_id}.card"
        if path.exists():
            return path.read_text(encoding="utf-8").strip()
        return None

    def link_session_card(self, session_id: str, card_id: str) -> None:
        tmp = self.staging / f"link-{session_id}.card"
        tmp.write_text(card_id, encoding="utf-8")
        os.replace(tmp, self.sessions / f"{session_id}.card")

    # cards

    def save_card(self, card_id: str, bundle: ExportBundle, meta: dict) -> None:
        stage = self.staging / f"card-{card_id}"
        stage.mkdir()
        try:
            (stage / "card.json").write_text(bundle.json, encoding="utf-8")
            (stage / "card.xml").write_text(bundle.xml, encoding="utf-8")
            (stage / "card.csv").write_text(bundle.csv, encoding="utf-8")
            (stage / "card.bib").write_text(bundle.bibtex, encoding="utf-8")
            (stage / "card.tex").write_text(bundle.latex, encoding="utf-8")
            (stage / "meta.json").write_text(
                json.dumps(meta, ensure_ascii=False, indent=2), encoding="utf-8")
            os.rename(stage, self.cards / card_id)
        except BaseException:
            shutil.rmtree(stage, ignore_errors=True)
            raise

    def card_dir(self, card_id: str) -> Path | None:
        if not _is_token(card_id):
            return None
        path = self.cards / card_id
        return path if path.is_dir() else None

    def export_bytes(self, card_id: str, format_name: str) -> bytes | None:
        directory = self.card_dir(card_id)
        if directory is None or format_name not in FORMATS:
            return None
        return (directory / f"card{FORMATS[format_name].extension}").read_bytes()


def _is_token(value: str) -> bool:
    return bool(re.fullmatch(r"[A-Za-z0-9_-]{8,64}", value))


# -- email dispatch ----------------------------------------------------------------

class OutboxDispatcher:
    """Default dispatcher: writes the full message to an outbox directory."""

    id = "outbox"

    def __init__(self, store: Store):
        self.store = store

    def send(self, message: EmailMessage) -> dict:
        stamp = dt.datetime.now(dt.timezone.utc).strftime("%Y%m%dT%H%M%S%f")
        name = f"{stamp}-{secrets.token_hex(4)}.eml"
        tmp = self.store.staging / name
        tmp.write_bytes(bytes(message))
        os.replace(tmp, self.store.outbox / name)
        return {"dispatcher": self.id, "message_file": f"outbox/{name}"}


DISPATCHERS: dict[str, Callable[[Store], Any]] = {
    "outbox": OutboxDispatcher,
}


def build_email(recipient: str, bundle: ExportBundle) -> EmailMessage:
    message = EmailMessage()
    message["From"] = "no-reply@ai-usage-cards.invalid"
    message["To"] = recipient
    message["Subject"] = "Your AI Usage Card"
    message.set_content(EMAIL_TUTORIAL)
    attachments = [
        ("card.json", bundle.json, "application", "json"),
        ("card.xml", bundle.xml, "application", "xml"),
        ("card.csv", bundle.csv, "text", "csv"),
        ("card.bib", bundle.bibtex, "application", "x-bibtex"),
        ("card.tex", bundle.latex, "application", "x-tex"),
    ]
    for filename, content, maintype, subtype in attachments:
        message.add_attachment(content.encode("utf-8"), maintype=maintype,
                               subtype=subtype, filename=filename)
    return message


# -- application -------------------------------------------------------------------

class _HttpError(Exception):
    def __init__(self, status: int, code: str, message: str, **extra):
        super().__init__(message)
        self.status = status
        self.body = {"error": {"code": code, "message": message, **extra}}


class Application:
    """Routing and handlers, independent of the socket server."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.store = Store(config.data_dir)
        self.dispatcher = DISPATCHERS[config.dispatcher](self.store)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        if config.taxonomy_path:
            register_taxonomy(load_taxonomy(
                config.taxonomy_path.read_text(encoding="utf-8")))
        self.routes: list[tuple[str, re.Pattern, Callable]] = [
            ("GET", re.compile(r"^/v1/taxonomy$"), self.get_taxonomy_versions),
            ("GET", re.compile(r"^/v1/taxonomy/(?P<version>[^/]+)$"), self.get_taxonomy),
            ("POST", re.compile(r"^/v1/sessions$"), self.create_session),
            ("GET", re.compile(r"^/v1/sessions/(?P<sid>[^/]+)$"), self.get_session),
            ("POST", re.compile(r"^/v1/sessions/(?P<sid>[^/]+)/steps$"), self.submit_step),
            ("POST", re.compile(r"^/v1/sessions/(?P<sid>[^/]+)/back$"), self.step_back),
            ("POST", re.compile(r"^/v1/sessions/(?P<sid>[^/]+)/finalize$"), self.finalize),
            ("GET", re.compile(r"^/v1/cards/(?P<cid>[^/.]+)\.(?P<fmt>[a-z]+)$"),
             self.get_export),
            ("POST", re.compile(r"^/v1/validate$"), self.validate),
            ("POST", re.compile(r"^/v1/dispatch$"), self.dispatch_email),
        ]

    # -- helpers

    def _lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def _session_or_404(self, session_id: str) -> q.Session:
        session = self.store.load_session(session_id)
        if session is None:
            raise _HttpError(404, "unknown-session", f"unknown session {session_id!r}")
        return session

    def _step_desc(self, session: q.Session) -> dict | None:
        if session.finalized:
            return None
        step = q.current_step(session)
        desc: dict[str, Any] = {
            "kind": step.kind.value,
            "prompt": step.prompt,
            "schema": dict(step.schema),
            "index": session.cursor,
        }
        if step.kind in q.PARAM_KEYS:
            desc[q.PARAM_KEYS[step.kind]] = step.param
        stored = session.answers.get(step.key)
        desc["current"] = (None if stored is None
                           else q.payload_to_wire(step.kind, stored))
        if step.kind is q.StepKind.REVIEW:
            desc["preview"] = field_list(q.build_card(session))
        return desc

    def _links(self, card_id: str) -> dict[str, str]:
        base = self.config.public_base()
        return {name: f"{base}/v1/cards/{card_id}{fmt.extension}"
                for name, fmt in FORMATS.items()}

    # -- handlers

    def get_taxonomy_versions(self, body):
        return 200, {"versions": list(known_versions())}

    def get_taxonomy(self, body, version: str):
        from .taxonomy import serialize_taxonomy
        try:
            taxonomy = get_taxonomy(version)
        except UnknownTaxonomyError as exc:
            raise _HttpError(404, exc.code, str(exc)) from None
        return 200, json.loads(serialize_taxonomy(taxonomy))

    def create_session(self, body):
        version = _field(body, "taxonomy_version", str)
        try:
            session = q.start(version)
        except UnknownTaxonomyError as exc:
            raise _HttpError(400, exc.code, str(exc)) from None
        self.store.save_session(session)
        return 201, {
            "session_id": session.id,
            "revision": session.revision,
            "created_at": session.created_at.isoformat(),
            "step": self._step_desc(session),
        }

    def get_session(self, body, sid: str):
        session = self._session_or_404(sid)
        return 200, {
            "session_id": session.id,
            "taxonomy_version": session.taxonomy_version,
            "revision": session.revision,
            "finalized": session.finalized,
            "card_id": self.store.session_card_id(sid),
            "step": self._step_desc(session),
            "preview": field_list(q.build_card(session)),
        }

    def submit_step(self, body, sid: str):
        revision = _field(body, "revision", int)
        answer_obj = _field(body, "answer", dict)
        try:
            answer = q.answer_from_obj(answer_obj)
        except ScriptError as exc:
            raise _HttpError(422, exc.code, str(exc)) from None
        with self._lock(sid):
            session = self._session_or_404(sid)
            if session.finalized:
                raise _HttpError(409, SessionFinalizedError.code,
                                 "session is finalized",
                                 card_id=self.store.session_card_id(sid))
            if revision != session.revision:
                raise _HttpError(409, StaleRevisionError.code,
                                 f"session is at revision {session.revision}, "
                                 f"request sent {revision}",
                                 revision=session.revision)
            try:
                session = q.submit_answer(session, answer)
            except StepMismatchError as exc:
                raise _HttpError(422, exc.code, str(exc)) from None
            except PayloadInvalidError as exc:
                raise _HttpError(422, exc.code, str(exc),
                                 path=str(exc.path)) from None
            self.store.save_session(session)
        return 200, {"revision": session.revision, "step": self._step_desc(session)}

    def step_back(self, body, sid: str):
        revision = _field(body, "revision", int)
        with self._lock(sid):
            session = self._session_or_404(sid)
            if session.finalized:
                raise _HttpError(409, SessionFinalizedError.code,
                                 "session is finalized",
                                 card_id=self.store.session_card_id(sid))
            if revision != session.revision:
                raise _HttpError(409, StaleRevisionError.code,
                                 f"session is at revision {session.revision}, "
                                 f"request sent {revision}",
                                 revision=session.revision)
            try:
                session = q.go_back(session)
            except AtFirstStepError as exc:
                raise _HttpError(409, exc.code, str(exc)) from None
            self.store.save_session(session)
        return 200, {"revision": session.revision, "step": self._step_desc(session)}

    def finalize(self, body, sid: str):
        with self._lock(sid):
            session = self._session_or_404(sid)
            if session.finalized:
                raise _HttpError(409, "already-finalized",
                                 "session is already finalized",
                                 card_id=self.store.session_card_id(sid))
            try:
                closed, card = q.finalize_session(session)
            except StepMismatchError as exc:
                raise _HttpError(409, exc.code, str(exc)) from None
            except IncompleteSessionError as exc:
                raise _HttpError(
                    409, exc.code, "the card is not complete yet",
                    revisit_step=exc.revisit_step,
                    missing=[{"path": str(path), "message": message}
                             for path, message in exc.problems]) from None
            report = assess(card)
            bundle = build_bundle(card)
            card_id = secrets.token_urlsafe(16)
            self.store.save_card(card_id, bundle, meta={
                "card_id": card_id,
                "session_id": sid,
                "created_at": dt.datetime.now(dt.timezone.utc).isoformat(),
                "responsible": report.responsible,
                "report": report_to_dict(report),
            })
            self.store.link_session_card(sid, card_id)
            self.store.save_session(closed)
        return 201, {
            "card_id": card_id,
            "responsible": report.responsible,
            "report": report_to_dict(report),
            "links": self._links(card_id),
        }

    def get_export(self, body, cid: str, fmt: str):
        data = self.store.export_bytes(cid, fmt)
        if data is None:
            raise _HttpError(404, "unknown-card-or-format",
                             f"no stored export {cid!r}.{fmt}")
        return 200, _Raw(data, FORMATS[fmt].media_type)

    def validate(self, body):
        try:
            card = obj_to_card(body)
        except (CardSchemaError, CardDecodeError) as exc:
            path = getattr(exc, "path", None)
            raise _HttpError(422, exc.code, str(exc),
                             **({"path": str(path)} if path else {})) from None
        return 200, report_to_dict(assess(card))

    def dispatch_email(self, body):
        recipient = _field(body, "recipient", str)
        card_id = _field(body, "card_id", str)
        if not _EMAIL_RE.match(recipient):
            raise _HttpError(422, InvalidRecipientError.code,
                             f"not a valid email address: {recipient!r}")
        directory = self.store.card_dir(card_id)
        if directory is None:
            raise _HttpError(404, UnknownCardError.code, f"unknown card {card_id!r}")
        bundle = ExportBundle(
            json=(directory / "card.json").read_text(encoding="utf-8"),
            xml=(directory / "card.xml").read_text(encoding="utf-8"),
            csv=(directory / "card.csv").read_text(encoding="utf-8"),
            bibtex=(directory / "card.bib").read_text(encoding="utf-8"),
            latex=(directory / "card.tex").read_text(encoding="utf-8"),
        )
        receipt = self.dispatcher.send(build_email(recipient, bundle))
        receipt.update({
            "recipient": recipient,
            "card_id": card_id,
            "dispatched_at": dt.datetime.now(dt.timezone.utc).isoformat(),
        })
        return 200, receipt

    # -- dispatch

    def handle(self, method: str, path: str, body: Any):
        for route_method, pattern, handler in self.routes:
            match = pattern.match(path)
            if match and route_method == method:
                return handler(body, **match.groupdict())
        raise _HttpError(404, "not-found", f"no route for {method} {path}")


@dataclass
class _Raw:
    data: bytes
    media_type: str


def _field(body: Any, key: str, kind: type):
    if not isinstance(body, dict) or key not in body:
        raise _HttpError(400, "bad-request", f"missing field {key!r}")
    value = body[key]
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise _HttpError(400, "bad-request", f"field {key!r} must be {kind.__name__}")
    return value


# -- socket server ---------------------------------------------------------------

class _Handler(BaseHTTPRequestHandler):
    app: Application = None  # type: ignore[assignment]
    protocol_version = "HTTP/1.1"

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        pass

    def _send(self, status: int, payload) -> None:
        if isinstance(payload, _Raw):
            data, media_type = payload.data, payload.media_type
        else:
            data = json.dumps(payload, ensure_ascii=False, indent=2).encode("utf-8")
            media_type = "application/json; charset=utf-8"
        self.send_response(status)
        self.send_header("Content-Type", media_type)
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _run(self, method: str) -> None:
        body = None
        if method == "POST":
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            if raw:
                try:
                    body = json.loads(raw.decode("utf-8"))
                except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                    # the validate endpoint's contract treats an unparseable
                    # card document as a schema-level 422
                    status = 422 if self.path.rstrip("/").endswith("/validate") else 400
                    self._send(status, {"error": {"code": "bad-json",
                                                  "message": f"request body: {exc}"}})
                    return
        try:
            status, payload = self.app.handle(method, self.path, body)
        except _HttpError as exc:
            self._send(exc.status, exc.body)
        except AicardsError as exc:
            self._send(500, {"error": {"code": exc.code, "message": str(exc)}})
        except Exception as exc:  # pragma: no cover - defensive
            self._send(500, {"error": {"code": "internal", "message": repr(exc)}})
        else:
            self._send(status, payload)

    def do_GET(self):
        if self.app.config.ui_dir and not self.path.startswith("/v1/"):
            if self._serve_static():
                return
        self._run("GET")

    def do_POST(self):
        self._run("POST")

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def _serve_static(self) -> bool:
        root = self.app.config.ui_dir.resolve()
        relative = self.path.split("?")[0].lstrip("/") or "index.html"
        candidate = (root / relative).resolve()
        if not candidate.is_file() or root not in candidate.parents and candidate != root:
            candidate = root / "index.html"
            if not candidate.is_file():
                return False
        media = {
            ".html": "text/html; charset=utf-8",
            ".js": "text/javascript; charset=utf-8",
            ".css": "text/css; charset=utf-8",
            ".svg": "image/svg+xml",
        }.get(candidate.suffix, "application/octet-stream")
        self._send(200, _Raw(candidate.read_bytes(), media))
        return True


def make_server(config: ServiceConfig) -> ThreadingHTTPServer:
    app = Application(config)
    handler = type("BoundHandler", (_Handler,), {"app": app})
    server = ThreadingHTTPServer((config.host, config.port), handler)
    server.app = app  # type: ignore[attr-defined]
    config.port = server.server_address[1]  # real port when 0 was requested
    return server


def serve(config: ServiceConfig | None = None) -> None:
    config = config or ServiceConfig.from_env()
    server = make_server(config)
    host, port = server.server_address[:2]
    print(f"aicards service listening on http://{host}:{port} "
          f"(data in {config.data_dir})", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


if __name__ == "__main__":
    serve()
