from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from sandhub.cli import main
from sandhub.manifest import manifest_to_json, validate_manifest
from sandhub.store import Store

from test_manifest import valid_document


@pytest.fixture
def runner():
    return CliRunner()


class TestValidateCommand:
    def test_valid_manifest_ok(self, runner, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(valid_document()))
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == 0, result.output
        assert "ok: netANOVA 1.0.0 (r)" in result.output

    def test_invalid_manifest_exit_2_with_paths(self, runner, tmp_path):
        doc = valid_document()
        doc["entry_point"]["parameters"][0]["kind"] = "dataframe"
        path = tmp_path / "m.json"
        path.write_text(json.dumps(doc))
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == 2
        assert "entry_point.parameters[0].kind" in result.output

    def test_unparseable_exit_2(self, runner, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("{broken")
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == 2


class TestSealUnsealCommands:
    def test_round_trip_binary(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("TEST_PASSPHRASE", "open sesame")
        source = tmp_path / "result.txt"
        source.write_bytes(b"the analysis output")
        blob_path = tmp_path / "result.blob"
        sealed = runner.invoke(
            main,
            ["seal", "--in", str(source), "--out", str(blob_path), "--passphrase-env", "TEST_PASSPHRASE"],
        )
        assert sealed.exit_code == 0, sealed.output
        out_dir = tmp_path / "recovered"
        opened = runner.invoke(
            main,
            ["unseal", "--in", str(blob_path), "--out-dir", str(out_dir), "--passphrase-env", "TEST_PASSPHRASE"],
        )
        assert opened.exit_code == 0, opened.output
        assert (out_dir / "result.txt").read_bytes() == b"the analysis output"

    def test_round_trip_base64(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("TEST_PASSPHRASE", "pässwörd ✓")
        source = tmp_path / "data.bin"
        source.write_bytes(bytes(range(256)))
        blob_path = tmp_path / "data.blob.b64"
        sealed = runner.invoke(
            main,
            [
                "seal", "--in", str(source), "--out", str(blob_path),
                "--name", "renamed.bin", "--passphrase-env", "TEST_PASSPHRASE", "--base64",
            ],
        )
        assert sealed.exit_code == 0, sealed.output
        opened = runner.invoke(
            main,
            [
                "unseal", "--in", str(blob_path), "--out-dir", str(tmp_path / "out"),
                "--passphrase-env", "TEST_PASSPHRASE", "--base64",
            ],
        )
        assert opened.exit_code == 0, opened.output
        assert (tmp_path / "out" / "renamed.bin").read_bytes() == bytes(range(256))

    def test_wrong_passphrase_uniform_message(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("PW_A", "first")
        monkeypatch.setenv("PW_B", "second")
        source = tmp_path / "f.txt"
        source.write_bytes(b"x")
        blob_path = tmp_path / "f.blob"
        runner.invoke(main, ["seal", "--in", str(source), "--out", str(blob_path), "--passphrase-env", "PW_A"])
        result = runner.invoke(
            main,
            ["unseal", "--in", str(blob_path), "--out-dir", str(tmp_path), "--passphrase-env", "PW_B"],
        )
        assert result.exit_code != 0
        assert "wrong passphrase or corrupted data" in result.output

    def test_passphrase_never_echoed(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("TEST_PASSPHRASE", "big-secret-marker")
        source = tmp_path / "f.txt"
        source.write_bytes(b"x")
        result = runner.invoke(
            main,
            ["seal", "--in", str(source), "--out", str(tmp_path / "f.blob"), "--passphrase-env", "TEST_PASSPHRASE"],
        )
        assert "big-secret-marker" not in result.output


class TestSeedAndAdmin:
    def test_seed_then_grant(self, runner, tmp_path):
        db = str(tmp_path / "hub.db")
        seeded = runner.invoke(main, ["seed", "--db", db])
        assert seeded.exit_code == 0, seeded.output
        assert "seeded 17 applications" in seeded.output

        again = runner.invoke(main, ["seed", "--db", db])
        assert "17 already present" in again.output

        store = Store(db)
        try:
            store.create_user("newdev", "pw")
            granted = runner.invoke(main, ["admin", "grant", "newdev", "publish-app", "--db", db])
            assert granted.exit_code == 0, granted.output
            assert store.get_user_by_handle("newdev").can_publish_app
        finally:
            store.close()

    def test_grant_unknown_user_fails(self, runner, tmp_path):
        db = str(tmp_path / "hub.db")
        result = runner.invoke(main, ["admin", "grant", "ghost", "upload-data", "--db", db])
        assert result.exit_code != 0


class TestBenchCommands:
    def test_run_writes_expected_row_count(self, runner, tmp_path):
        out = tmp_path / "native.csv"
        result = runner.invoke(
            main,
            [
                "bench", "run", "--kind", "listsum", "--sizes", "10,20",
                "--iterations", "5", "--seed", "1", "--env-label", "native",
                "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 2 * 5

    def test_compare_reports_ratio(self, runner, tmp_path):
        from sandhub.bench import BenchmarkRecord, write_csv

        native = tmp_path / "native.csv"
        sandbox = tmp_path / "sandbox.csv"
        write_csv([BenchmarkRecord("native", "matmul", 64, i, 100) for i in range(3)], str(native))
        write_csv([BenchmarkRecord("sandbox", "matmul", 64, i, 1000) for i in range(3)], str(sandbox))
        out = tmp_path / "report.txt"
        result = runner.invoke(
            main,
            ["bench", "compare", "--native", str(native), "--sandbox", str(sandbox), "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        assert "10.00" in out.read_text()

    def test_compare_disjoint_fails(self, runner, tmp_path):
        from sandhub.bench import BenchmarkRecord, write_csv

        native = tmp_path / "native.csv"
        sandbox = tmp_path / "sandbox.csv"
        write_csv([BenchmarkRecord("native", "matmul", 64, 0, 100)], str(native))
        write_csv([BenchmarkRecord("sandbox", "matmul", 128, 0, 100)], str(sandbox))
        result = runner.invoke(
            main, ["bench", "compare", "--native", str(native), "--sandbox", str(sandbox)]
        )
        assert result.exit_code != 0


def test_manifest_json_helper_is_cli_compatible(runner, tmp_path):
    manifest = validate_manifest(valid_document())
    path = tmp_path / "emitted.json"
    path.write_text(manifest_to_json(manifest))
    result = runner.invoke(main, ["validate", str(path)])
    assert result.exit_code == 0
