"""Command-line behavior, driven through main() with fake argv."""

import io
import json
import re

import pytest

from draftmarks.cli import main
from draftmarks.fixtures import bruce_log
from draftmarks.schema_io import parse_schema


@pytest.fixture()
def log_file(tmp_path):
    path = tmp_path / "bruce.log"
    path.write_text(bruce_log(), encoding="utf-8")
    return path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_ingest_prints_id(tmp_path, log_file, capsys):
    code, out, err = run(capsys, "ingest", str(log_file),
                         "--store", str(tmp_path / "store"))
    assert code == 0 and err == ""
    assert re.fullmatch(r"[0-9a-f]{64}\n", out)


def test_ingest_from_stdin(tmp_path, capsys, monkeypatch):
    stdin = io.TextIOWrapper(io.BytesIO(bruce_log().encode("utf-8")))
    monkeypatch.setattr("sys.stdin", stdin)
    code, out, _ = run(capsys, "ingest", "-",
                       "--store", str(tmp_path / "store"))
    assert code == 0
    assert len(out.strip()) == 64


def test_schema_and_export_to_files(tmp_path, log_file, capsys):
    store = str(tmp_path / "store")
    _, out, _ = run(capsys, "ingest", str(log_file), "--store", store)
    sid = out.strip()
    envelope_path = tmp_path / "schema.json"
    code, _, _ = run(capsys, "schema", sid, "--role", "teacher",
                     "-o", str(envelope_path), "--store", store)
    assert code == 0
    parse_schema(envelope_path.read_bytes())
    html_path = tmp_path / "doc.html"
    code, _, _ = run(capsys, "export", sid, "--role", "general",
                     "-o", str(html_path), "--store", store)
    assert code == 0
    assert html_path.read_text(encoding="utf-8").startswith("<!doctype html>")


def test_schema_to_stdout_is_the_envelope(tmp_path, log_file, capsys):
    store = str(tmp_path / "store")
    _, out, _ = run(capsys, "ingest", str(log_file), "--store", store)
    code, out, _ = run(capsys, "schema", out.strip(), "--role", "writer",
                       "--store", store)
    assert code == 0
    envelope = json.loads(out)
    assert set(envelope) == {"format_version", "checksum", "schema"}


def test_unknown_session(tmp_path, capsys):
    code, _, err = run(capsys, "schema", "a" * 64, "--role", "teacher",
                       "--store", str(tmp_path / "store"))
    assert code == 1
    assert "session not found" in err


def test_invalid_log_reports_and_fails(tmp_path, capsys):
    bad = tmp_path / "bad.log"
    bad.write_text('{"version": "1", "consent": false, "setup": "split_context"}\n')
    code, _, err = run(capsys, "ingest", str(bad),
                       "--store", str(tmp_path / "store"))
    assert code == 1
    assert err.startswith("error: invalid session log:")


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["schema", "deadbeef", "--role", "janitor"])
    assert exc.value.code == 2


def test_store_env_var_is_honored(tmp_path, log_file, capsys, monkeypatch):
    monkeypatch.setenv("DRAFTMARKS_STORE", str(tmp_path / "envstore"))
    code, out, _ = run(capsys, "ingest", str(log_file))
    assert code == 0
    assert (tmp_path / "envstore" / "sessions" / out.strip()).is_dir()


def test_config_file_changes_the_fingerprint(tmp_path, log_file, capsys):
    store = str(tmp_path / "store")
    cfg = tmp_path / "engine.json"
    cfg.write_text(json.dumps({"thresholds": {"deletion_threshold": 99}}))
    _, out, _ = run(capsys, "ingest", str(log_file), "--store", store)
    sid = out.strip()
    _, default_env, _ = run(capsys, "schema", sid, "--role", "teacher",
                            "--store", store)
    code, custom_env, _ = run(capsys, "schema", sid, "--role", "teacher",
                              "--store", store, "--config", str(cfg))
    assert code == 0
    default_fp = json.loads(default_env)["schema"]["config"]
    custom_fp = json.loads(custom_env)["schema"]["config"]
    assert default_fp != custom_fp


def test_fixtures_command_writes_logs(tmp_path, capsys):
    out_dir = tmp_path / "logs"
    code, out, _ = run(capsys, "fixtures", "--out", str(out_dir))
    assert code == 0
    assert sorted(p.name for p in out_dir.iterdir()) == [
        "bruce.log", "lavender.log", "matilda.log"]
    assert out.count(":") >= 3


def test_missing_log_file(tmp_path, capsys):
    code, _, err = run(capsys, "ingest", str(tmp_path / "absent.log"),
                       "--store", str(tmp_path / "store"))
    assert code == 1
    assert err.startswith("error:")
