"""Command-line interface: serve, seed, admin, validate, seal/unseal, bench."""

from __future__ import annotations

import getpass
import os
import sys
from pathlib import Path

import click

from . import bench as bench_mod
from . import sealing
from .config import ServerConfig
from .manifest import ValidationReport, parse_manifest
from .seeds import seed_manifests
from .store import DuplicateNameVersion, Store, UnknownUser

SEED_PUBLISHER_HANDLE = "seed-corpus"

_PERMISSION_COLUMNS = {
    "publish-app": "can_publish_app",
    "upload-data": "can_upload_data",
    "admin": "is_admin",
}


def _open_store(db: str | None, config: ServerConfig) -> Store:
    return Store(
        db or config.storage_path,
        share_ttl_seconds=config.share_ttl_hours * 3600,
        session_ttl_seconds=config.session_ttl_hours * 3600,
    )


def _read_passphrase(passphrase_env: str | None, confirm: bool = False) -> str:
    """Passphrases come from an env var or an interactive prompt, never argv."""
    if passphrase_env:
        secret = os.environ.get(passphrase_env, "")
        if not secret:
            raise click.ClickException(f"environment variable {passphrase_env} is empty or unset")
        return secret
    secret = getpass.getpass("Passphrase: ")
    if confirm and getpass.getpass("Passphrase (again): ") != secret:
        raise click.ClickException("passphrases do not match")
    if not secret:
        raise click.ClickException("passphrase must not be empty")
    return secret


@click.group()
def main() -> None:
    """Application hub: registry server, sealed shares, native benchmarks."""


@main.command()
@click.option("--host", default=None, help="Bind address (default from SANDHUB_BIND_HOST).")
@click.option("--port", default=None, type=int, help="Bind port (default from SANDHUB_BIND_PORT).")
@click.option("--db", default=None, help="Storage file path.")
def serve(host: str | None, port: int | None, db: str | None) -> None:
    """Run the hub server (plain HTTP; put TLS termination in front)."""
    import uvicorn

    from .server import create_app

    config = ServerConfig.from_env()
    store = _open_store(db, config)
    app = create_app(config, store)
    uvicorn.run(app, host=host or config.bind_host, port=port or config.bind_port)


@main.command()
@click.option("--db", default=None, help="Storage file path.")
def seed(db: str | None) -> None:
    """Load the bundled application corpus into the registry."""
    config = ServerConfig.from_env()
    store = _open_store(db, config)
    try:
        publisher = store.get_user_by_handle(SEED_PUBLISHER_HANDLE)
    except UnknownUser:
        publisher = store.create_user(
            SEED_PUBLISHER_HANDLE,
            store.token_bytes(24).hex(),  # unguessable; this account is never a login target
            can_publish_app=True,
        )
    loaded = skipped = 0
    for manifest in seed_manifests():
        try:
            store.put_application(manifest, publisher.user_id)
            loaded += 1
        except DuplicateNameVersion:
            skipped += 1
    click.echo(f"seeded {loaded} applications ({skipped} already present)")


@main.group()
def admin() -> None:
    """Local-operator administration (direct storage access)."""


@admin.command("grant")
@click.argument("handle")
@click.argument("permission", type=click.Choice(sorted(_PERMISSION_COLUMNS)))
@click.option("--db", default=None, help="Storage file path.")
def admin_grant(handle: str, permission: str, db: str | None) -> None:
    """Grant PERMISSION to the user HANDLE."""
    config = ServerConfig.from_env()
    store = _open_store(db, config)
    try:
        user = store.set_permission(handle, _PERMISSION_COLUMNS[permission])
    except UnknownUser as exc:
        raise click.ClickException(str(exc)) from None
    click.echo(
        f"{user.handle}: publish-app={user.can_publish_app}"
        f" upload-data={user.can_upload_data} admin={user.is_admin}"
    )


@main.command()
@click.argument("manifest_path", type=click.Path(exists=True, dir_okay=False))
def validate(manifest_path: str) -> None:
    """Validate an application manifest document; exit 2 when invalid."""
    text = Path(manifest_path).read_text(encoding="utf-8")
    try:
        result = parse_manifest(text)
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if isinstance(result, ValidationReport):
        for violation in result.violations:
            click.echo(f"invalid: {violation}", err=True)
        sys.exit(2)
    click.echo(f"ok: {result.name} {result.version} ({result.runtime.value})")


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--name", default=None, help="File name sealed inside the envelope (default: input name).")
@click.option("--passphrase-env", default=None, help="Environment variable holding the passphrase.")
@click.option("--base64", "as_base64", is_flag=True, help="Write the blob base64-encoded.")
def seal(in_path: str, out_path: str, name: str | None, passphrase_env: str | None, as_base64: bool) -> None:
    """Seal a file into a passphrase-locked blob."""
    passphrase = _read_passphrase(passphrase_env, confirm=passphrase_env is None)
    payload = Path(in_path).read_bytes()
    try:
        blob = sealing.seal(payload, name or Path(in_path).name, passphrase)
    except sealing.SealingError as exc:
        raise click.ClickException(str(exc)) from None
    if as_base64:
        Path(out_path).write_text(blob.to_base64() + "\n", encoding="ascii")
    else:
        Path(out_path).write_bytes(blob.to_bytes())
    click.echo(f"sealed {len(payload)} bytes -> {out_path}")


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", default=".", type=click.Path(file_okay=False))
@click.option("--passphrase-env", default=None, help="Environment variable holding the passphrase.")
@click.option("--base64", "as_base64", is_flag=True, help="Input blob is base64-encoded.")
def unseal(in_path: str, out_dir: str, passphrase_env: str | None, as_base64: bool) -> None:
    """Open a sealed blob, writing the payload under its embedded file name."""
    passphrase = _read_passphrase(passphrase_env)
    try:
        if as_base64:
            blob = sealing.SealedBlob.from_base64(Path(in_path).read_text(encoding="ascii").strip())
        else:
            blob = sealing.SealedBlob.from_bytes(Path(in_path).read_bytes())
        payload, file_name = sealing.unseal(blob, passphrase)
    except sealing.IntegrityFailure:
        raise click.ClickException("wrong passphrase or corrupted data") from None
    except sealing.SealingError as exc:
        raise click.ClickException(str(exc)) from None
    target = Path(out_dir) / file_name  # embedded names never contain separators
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    target.write_bytes(payload)
    click.echo(f"unsealed {len(payload)} bytes -> {target}")


@main.group()
def bench() -> None:
    """Timed workloads and native-vs-sandbox comparison."""


@bench.command("run")
@click.option(
    "--kind",
    required=True,
    type=click.Choice([k.value for k in bench_mod.WorkloadKind]),
)
@click.option("--sizes", default=None, help="Comma-separated sizes (default per workload).")
@click.option("--iterations", default=bench_mod.DEFAULT_ITERATIONS, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--env-label", default="native", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def bench_run(kind: str, sizes: str | None, iterations: int, seed: int, env_label: str, out_path: str) -> None:
    """Run one workload over a size sweep and write the timing CSV."""
    workload = bench_mod.WorkloadKind(kind)
    size_list = (
        [int(s) for s in sizes.split(",") if s]
        if sizes
        else list(bench_mod.DEFAULT_SIZES[workload])
    )
    try:
        records = bench_mod.run_sweep(
            workload, size_list, iterations=iterations, seed=seed, environment=env_label
        )
    except bench_mod.BenchError as exc:
        raise click.ClickException(str(exc)) from None
    bench_mod.write_csv(records, out_path)
    click.echo(bench_mod.render_summary(bench_mod.summarize(records)), nl=False)
    click.echo(f"wrote {len(records)} records -> {out_path}")


@bench.command("compare")
@click.option("--native", "native_csv", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sandbox", "sandbox_csv", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
def bench_compare(native_csv: str, sandbox_csv: str, out_path: str | None) -> None:
    """Report per-cell sandbox/native median ratios from two timing CSVs."""
    try:
        cells = bench_mod.compare_environments(native_csv, sandbox_csv)
    except bench_mod.BenchError as exc:
        raise click.ClickException(str(exc)) from None
    report = bench_mod.render_comparison(cells)
    if out_path:
        Path(out_path).write_text(report, encoding="utf-8")
        click.echo(f"wrote comparison -> {out_path}")
    else:
        click.echo(report, nl=False)


if __name__ == "__main__":
    main()
