"""Command-line front door: ingest, schema, export, serve, fixtures."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import ENV_CONFIG, ENV_LISTEN, ENV_STORE, ConfigError, EngineConfig
from .events import LogFormatError
from .model import ModelError
from .profiles import UnknownRoleError
from .replay import ReplayError
from .store import SessionStore, UnknownSessionError

DEFAULT_STORE = "draftmarks-store"
ROLES = ("teacher", "reviewer", "general", "writer")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="draftmarks",
        description="Replay co-writing session logs and serve process schemas.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--store", help=f"store directory (default ${ENV_STORE} "
                                       f"or ./{DEFAULT_STORE})")
        p.add_argument("--config", help=f"engine config file (default ${ENV_CONFIG})")

    p_ingest = sub.add_parser("ingest", help="store a session log, print its id")
    p_ingest.add_argument("log", help="session log file, or - for stdin")
    add_common(p_ingest)

    p_schema = sub.add_parser("schema", help="write a role's schema envelope")
    p_schema.add_argument("id", help="session id")
    p_schema.add_argument("--role", required=True, choices=ROLES)
    p_schema.add_argument("-o", "--output", help="output file (default stdout)")
    add_common(p_schema)

    p_export = sub.add_parser("export", help="write a static document export")
    p_export.add_argument("id", help="session id")
    p_export.add_argument("--role", required=True, choices=ROLES)
    p_export.add_argument("-o", "--output", help="output file (default stdout)")
    add_common(p_export)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--listen", help=f"host:port (default ${ENV_LISTEN} "
                                          "or the config value)")
    add_common(p_serve)

    p_fixtures = sub.add_parser(
        "fixtures", help="write the built-in scenario session logs")
    p_fixtures.add_argument("--out", default="fixtures",
                            help="output directory (default ./fixtures)")
    return parser


def _load_config(args: argparse.Namespace) -> EngineConfig:
    if getattr(args, "config", None):
        config = EngineConfig.from_file(args.config)
    else:
        config = EngineConfig.from_env()
    listen = getattr(args, "listen", None) or os.environ.get(ENV_LISTEN)
    if listen:
        config = EngineConfig.from_dict({**config.to_dict(), "listen": listen})
    return config


def _open_store(args: argparse.Namespace, config: EngineConfig) -> SessionStore:
    root = args.store or os.environ.get(ENV_STORE) or DEFAULT_STORE
    return SessionStore(root, config=config)


def _write_output(path: str | None, data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        if not data.endswith(b"\n"):
            sys.stdout.buffer.write(b"\n")
        sys.stdout.buffer.flush()
    else:
        Path(path).write_bytes(data)


def _cmd_ingest(args) -> int:
    config = _load_config(args)
    store = _open_store(args, config)
    if args.log == "-":
        data = sys.stdin.buffer.read()
    else:
        data = Path(args.log).read_bytes()
    session_id = store.ingest(data)
    print(session_id)
    return 0


def _cmd_schema(args) -> int:
    config = _load_config(args)
    store = _open_store(args, config)
    _write_output(args.output, store.schema_envelope(args.id, args.role))
    return 0


def _cmd_export(args) -> int:
    config = _load_config(args)
    store = _open_store(args, config)
    _write_output(args.output, store.export_html(args.id, args.role).encode("utf-8"))
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    config = _load_config(args)
    store = _open_store(args, config)
    serve(store)
    return 0


def _cmd_fixtures(args) -> int:
    from .fixtures import write_fixture_logs

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, path in sorted(write_fixture_logs(out).items()):
        print(f"{name}: {path}")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "schema": _cmd_schema,
    "export": _cmd_export,
    "serve": _cmd_serve,
    "fixtures": _cmd_fixtures,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (LogFormatError, ReplayError, ModelError) as exc:
        print(f"error: invalid session log: {exc}", file=sys.stderr)
    except UnknownSessionError:
        print("error: session not found", file=sys.stderr)
    except UnknownRoleError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
