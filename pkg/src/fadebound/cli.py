"""fadebound command line interface.

Thin client over the service layer: commands run in process by default,
or against a running fadebound server when --server is given.
"""

from __future__ import annotations

import json
import sys

import click
import httpx
from pydantic import ValidationError

from . import __version__
from .bounds import NumericError
from .channel import ChannelError
from .constellation import ConstellationError
from .sweep import (
    PRESET_NAMES,
    ConfigError,
    SweepConfig,
    build_spectrum,
    curve_from_rows,
    gap_at_level,
    parse_csv,
    preset_configs,
    run_sweep,
    write_outputs,
)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_CONFIG_ERRORS = (ConfigError, ConstellationError, ChannelError, ValidationError, ValueError)


def _fail(code: int, message: str):
    click.echo(f"fadebound: {message}", err=True)
    sys.exit(code)


def _parse_scheme(text: str) -> dict:
    """Parse scheme shorthand: qpsk, orthogonal:M, permutation:L,
    gaussian:K:M[:seed]."""
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind == "qpsk" and len(parts) == 1:
            return {"kind": "qpsk"}
        if kind == "orthogonal" and len(parts) == 2:
            return {"kind": "orthogonal", "M": int(parts[1])}
        if kind == "permutation" and len(parts) == 2:
            return {"kind": "permutation", "L": int(parts[1])}
        if kind == "gaussian" and len(parts) in (3, 4):
            seed = int(parts[3]) if len(parts) == 4 else 0
            return {"kind": "gaussian", "K": int(parts[1]), "M": int(parts[2]), "seed": seed}
    except ValueError:
        pass
    raise ConfigError(f"unrecognized scheme {text!r}")


class _RemoteError(RuntimeError):
    pass


def _post(server: str, path: str, payload: dict) -> dict:
    resp = httpx.post(server.rstrip("/") + path, json=payload, timeout=3600.0)
    if resp.status_code != 200:
        detail = resp.text
        try:
            detail = resp.json().get("detail", detail)
        except Exception:
            pass
        raise _RemoteError(f"server returned {resp.status_code}: {detail}")
    return resp.json()


@click.group()
@click.version_option(version=__version__, prog_name="fadebound")
def main():
    """Error-probability bounds and simulation over correlated Rayleigh fading."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=False))
@click.option("--out", "out_prefix", default=None, help="Output prefix (overrides config)")
@click.option("--svg/--no-svg", default=False, help="Also write an SVG chart")
@click.option("--threads", default=None, type=int, help="Worker threads (default: machine)")
@click.option("--server", default=None, help="Run the sweep on a fadebound server")
def sweep(config_path, out_prefix, svg, threads, server):
    """Run an SNR sweep from a JSON config file."""
    try:
        with open(config_path) as f:
            cfg = SweepConfig.model_validate(json.load(f))
    except OSError as e:
        _fail(EXIT_CONFIG, str(e))
    except (json.JSONDecodeError, *_CONFIG_ERRORS) as e:
        _fail(EXIT_CONFIG, f"invalid config: {e}")
    prefix = out_prefix or cfg.output_prefix
    if not prefix:
        _fail(EXIT_CONFIG, "no output prefix: set output_prefix in the config or pass --out")
    try:
        if server:
            doc = _post(server, "/api/sweep", cfg.model_dump())
            from .sweep import SweepResult, SweepRow

            rows = [SweepRow(**r) for r in doc["rows"]]
            result = SweepResult(rows=rows, metadata=doc["metadata"])
        else:
            result = run_sweep(cfg, threads=threads)
        paths = write_outputs(result, prefix, svg=svg)
    except _CONFIG_ERRORS as e:
        _fail(EXIT_CONFIG, f"invalid config: {e}")
    except (_RemoteError, NumericError, FloatingPointError) as e:
        _fail(EXIT_NUMERIC, str(e))
    for p in paths:
        click.echo(p)


@main.command()
@click.argument("figure", type=click.Choice(PRESET_NAMES))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--svg/--no-svg", default=False)
@click.option("--threads", default=None, type=int)
def reproduce(figure, out_dir, svg, threads):
    """Run a figure-reproduction preset and write its curves to OUT."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    try:
        for tag, cfg in preset_configs(figure):
            result = run_sweep(cfg, threads=threads)
            for p in write_outputs(result, os.path.join(out_dir, tag), svg=svg):
                click.echo(p)
    except _CONFIG_ERRORS as e:
        _fail(EXIT_CONFIG, f"invalid config: {e}")
    except (NumericError, FloatingPointError) as e:
        _fail(EXIT_NUMERIC, str(e))


@main.command()
@click.option("--scheme", "scheme_text", required=True, help="e.g. orthogonal:16, permutation:3, gaussian:9:10:1, qpsk")
@click.option("--server", default=None)
def spectrum(scheme_text, server):
    """Print the distance spectrum of a scheme as JSON."""
    try:
        scheme = _parse_scheme(scheme_text)
        if server:
            doc = _post(server, "/api/spectrum", {"scheme": scheme})
            click.echo(json.dumps(doc))
            return
        cfg = SweepConfig.model_validate({"scheme": scheme, "channel": {"model": "rayleigh-exp", "N": 1, "rho": 0.0}})
        spec = build_spectrum(cfg.scheme)
    except _CONFIG_ERRORS as e:
        _fail(EXIT_CONFIG, str(e))
    except _RemoteError as e:
        _fail(EXIT_NUMERIC, str(e))
    click.echo(spec.to_json())


@main.command()
@click.option("--a", "path_a", required=True, type=click.Path(exists=False), help="CSV of the first curve (union bound column)")
@click.option("--b", "path_b", required=True, type=click.Path(exists=False), help="CSV of the second curve (new bound column)")
@click.option("--level", default=1e-4, show_default=True)
@click.option("--column-a", default="union_bound", show_default=True)
@click.option("--column-b", default="new_bound", show_default=True)
@click.option("--server", default=None)
def gap(path_a, path_b, level, column_a, column_b, server):
    """SNR gap in dB between two curves at a BLER level."""
    try:
        with open(path_a) as f:
            rows_a = parse_csv(f.read())
        with open(path_b) as f:
            rows_b = parse_csv(f.read())
        curve_a = curve_from_rows(rows_a, column_a)
        curve_b = curve_from_rows(rows_b, column_b)
        if server:
            doc = _post(
                server,
                "/api/gap",
                {"curve_a": curve_a, "curve_b": curve_b, "level": level},
            )
            click.echo(repr(doc["gap_db"]))
            return
        g = gap_at_level(curve_a, curve_b, level)
    except OSError as e:
        _fail(EXIT_CONFIG, str(e))
    except _CONFIG_ERRORS as e:
        _fail(EXIT_CONFIG, str(e))
    except _RemoteError as e:
        _fail(EXIT_NUMERIC, str(e))
    click.echo(repr(g))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Start the fadebound HTTP service."""
    import uvicorn

    uvicorn.run("fadebound.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
