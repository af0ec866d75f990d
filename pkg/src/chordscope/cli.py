"""Command line front end: ``chordscope run``, ``dump-body`` and ``list-checks``.

A config is a JSON document::

    {
      "seed": 0,
      "scenarios": [
        {"name": "gz55-triangle", "check": "gz55",
         "body": {"kind": "polytope", "vertices": [[0, 0], [1, 0], [0, 1]]},
         "params": {"alphas": [2, 1, -0.5], "resolution": 256}}
      ],
      "bodies": [
        {"name": "L1-disk", "construction": "L_alpha", "alpha": 1,
         "field": {"kind": "characteristic", "body": {"kind": "ball", "center": [0, 0], "radius": 1}}}
      ]
    }

``run`` executes the scenarios and writes one JSON report per scenario plus
``summary.csv``; ``dump-body`` writes one CSV per entry of ``bodies``.
Exit status: 0 when nothing is violated, 1 when some check is violated, 2
for unreadable or invalid configs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import verifier
from .convex_bodies import ConvexBody, body_from_dict
from .mean_bodies import (
    SampledStarBody,
    default_grid,
    frac_polar_projection_body,
    l_alpha_body,
    polar_projection_body,
    r_alpha_field,
    r_infty_field,
    r_zero,
)
from .quadrature import substream
from .scalar_fields import ScalarField, characteristic, field_from_dict
from .special_functions import DomainError

BUNDLED_SUITE = "paper-suite.json"

CHECK_HELP = {
    "iso_chord": "chord power integral of K against the ball of equal volume",
    "thm1": "sigma ||f||_{n/(n+alpha)} against the min-kernel double integral, 0 < alpha < n",
    "thm2": "the same with the |L_alpha f| term in between, 0 < alpha < n",
    "thm3": "reverse chain for alpha > n",
    "thm4": "Gamma-normalised radial mean bodies of a log-concave field",
    "thm5": "c_s-normalised radial mean bodies of a cone field",
    "gz55": "c-normalised radial mean bodies of a convex body",
    "riesz": "|L_alpha f| against its Schwarz symmetral",
    "counterexample_1d": "f(x) = 2x on [0, 1] breaks the log-concave chain",
    "limits": "alpha -> -1 and alpha -> inf endpoints",
}

CONSTRUCTIONS = ("L_alpha", "R_alpha", "R_0", "R_inf", "Pi_star", "Pi_star_frac")


class ConfigError(Exception):
    """Invalid config; ``line`` points into the config text when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


# ---------------------------------------------------------------------------
# config loading and validation


def _resolve_config(path: str | None) -> tuple[str, str]:
    if path is None or (not os.path.exists(path) and os.path.basename(path) == BUNDLED_SUITE):
        text = resources.files("chordscope").joinpath("data").joinpath(BUNDLED_SUITE).read_text()
        return f"<bundled>/{BUNDLED_SUITE}", text
    try:
        return path, Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}") from exc


def _load(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno) from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object", 1)
    return data


def _line_of(text: str, name: str | None, fallback_key: str) -> int | None:
    if name is not None:
        pat = re.compile(r'"name"\s*:\s*' + re.escape(json.dumps(name)))
        for i, line in enumerate(text.splitlines(), start=1):
            if pat.search(line):
                return i
    for i, line in enumerate(text.splitlines(), start=1):
        if f'"{fallback_key}"' in line:
            return i
    return None


def _number(params: dict, key: str, default=None) -> float | None:
    if key not in params:
        return default
    v = params[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"parameter {key!r} must be a finite number")
    return float(v)


def _integer(params: dict, key: str, default=None, minimum: int = 0) -> int | None:
    if key not in params:
        return default
    v = params[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"parameter {key!r} must be an integer >= {minimum}")
    return v


def _alphas(params: dict) -> list[float]:
    if "alphas" in params:
        vals = params["alphas"]
        if not isinstance(vals, list) or not vals:
            raise ConfigError("parameter 'alphas' must be a non-empty list")
        out = [_number({"a": v}, "a") for v in vals]
    elif "alpha" in params and "beta" in params:
        out = [_number(params, "beta"), _number(params, "alpha")]
        if not out[1] < out[0]:
            raise ConfigError("need alpha < beta")
    else:
        raise ConfigError("give 'alphas' or both 'alpha' and 'beta'")
    if any(a <= -1.0 for a in out):
        raise ConfigError("every alpha must exceed -1")
    return out


def _subject(spec: dict):
    """The field or body a scenario refers to."""
    try:
        if "field" in spec:
            return field_from_dict(spec["field"])
        if "body" in spec:
            return body_from_dict(spec["body"])
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid body/field description: {exc}") from exc
    return None


def _grid_for(subject, params: dict):
    return default_grid(subject, _integer(params, "resolution", None, minimum=2))


def _prepare_scenario(spec: dict, index: int, seed: int, overrides: dict):
    """Validate one scenario and return a zero-argument job."""
    if not isinstance(spec, dict):
        raise ConfigError("scenario must be an object")
    name = spec.get("name")
    if not isinstance(name, str) or not name:
        raise ConfigError("scenario needs a non-empty 'name'")
    if not re.fullmatch(r"[A-Za-z0-9._-]+", name):
        raise ConfigError(f"scenario name {name!r} may only use letters, digits, '.', '_' and '-'")
    check = spec.get("check")
    if check not in verifier.CHECKS:
        raise ConfigError(f"unknown check {check!r}")
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("'params' must be an object")
    params = {**params, **{k: v for k, v in overrides.items() if v is not None}}
    subject = _subject(spec)
    scenario_seed = _integer(params, "seed", None)
    if scenario_seed is None:
        scenario_seed = int(substream(seed, index).integers(2**63))
    fn = verifier.CHECKS[check]

    if check == "counterexample_1d":
        return name, lambda: fn()

    if subject is None:
        raise ConfigError(f"check {check!r} needs a 'body' or 'field'")
    n = subject.dimension
    grid = _grid_for(subject, params)

    if check == "iso_chord":
        if not isinstance(subject, ConvexBody):
            raise ConfigError("iso_chord needs a 'body'")
        alpha = _number(params, "alpha")
        if alpha is None or alpha <= -1.0 or alpha == 0.0:
            raise ConfigError("iso_chord needs alpha in (-1, 0) or (0, inf)")
        return name, lambda: fn(subject, alpha, grid)

    if check in ("thm1", "thm2", "thm3"):
        alpha = _number(params, "alpha")
        if alpha is None:
            raise ConfigError(f"{check} needs 'alpha'")
        if check in ("thm1", "thm2") and not 0 < alpha < n:
            raise ConfigError(f"{check} needs 0 < alpha < n = {n}, got {alpha:g}")
        if check == "thm3" and not alpha > n:
            raise ConfigError(f"thm3 needs alpha > n = {n}, got {alpha:g}")
        samples = _integer(params, "samples", 0)
        return name, lambda: fn(subject, alpha, grid, mc_samples=samples, seed=scenario_seed)

    if check == "thm4":
        alphas = _alphas(params)
        factor = _number(params, "pi_star_factor", 2.0)
        f = subject if isinstance(subject, ScalarField) else characteristic(subject)
        if not f.is_log_concave:
            raise ConfigError("thm4 needs a log-concave field")
        return name, lambda: fn(f, alphas, grid, pi_star_factor=factor)

    if check == "thm5":
        alphas = _alphas(params)
        if not isinstance(subject, ScalarField) or subject.kind != "cone_power":
            raise ConfigError("thm5 needs a cone_power field")
        if "s" in params and _number(params, "s") != subject.profile.s:
            raise ConfigError("parameter 's' disagrees with the field's s")
        return name, lambda: fn(subject, alphas, grid)

    if check == "gz55":
        if not isinstance(subject, ConvexBody):
            raise ConfigError("gz55 needs a 'body'")
        alphas = _alphas(params)
        return name, lambda: fn(subject, alphas, grid)

    if check == "riesz":
        alpha = _number(params, "alpha")
        if alpha is None or alpha <= 0 or alpha == n:
            raise ConfigError("riesz needs alpha > 0 with alpha != n")
        regime = params.get("regime", "sub_n" if alpha < n else "super_n")
        if regime not in ("sub_n", "super_n") or (regime == "sub_n") != (alpha < n):
            raise ConfigError(f"regime {regime!r} does not match alpha = {alpha:g}, n = {n}")
        return name, lambda: fn(subject, alpha, regime, grid)

    if check == "limits":
        f = subject if isinstance(subject, ScalarField) else characteristic(subject)
        if not f.is_log_concave:
            raise ConfigError("limits needs a log-concave field")
        return name, lambda: fn(f, grid)

    raise ConfigError(f"check {check!r} has no dispatcher")  # pragma: no cover


def _prepare_body(spec: dict, overrides: dict):
    if not isinstance(spec, dict):
        raise ConfigError("body entry must be an object")
    name = spec.get("name")
    if not isinstance(name, str) or not re.fullmatch(r"[A-Za-z0-9._-]+", name or ""):
        raise ConfigError("body entry needs a 'name' made of letters, digits, '.', '_' and '-'")
    kind = spec.get("construction")
    if kind not in CONSTRUCTIONS:
        raise ConfigError(f"unknown construction {kind!r}; expected one of {', '.join(CONSTRUCTIONS)}")
    subject = _subject(spec)
    if subject is None:
        raise ConfigError("body entry needs a 'field' or 'body'")
    f = subject if isinstance(subject, ScalarField) else characteristic(subject)
    res = overrides.get("resolution")
    grid = _grid_for(f, {**spec, "resolution": res} if res is not None else spec)
    alpha = _number(spec, "alpha")

    if kind == "L_alpha":
        if alpha is None or alpha <= 0:
            raise ConfigError("L_alpha needs alpha > 0")
        return name, lambda: l_alpha_body(f, alpha, grid)
    if kind == "R_alpha":
        if alpha is None or alpha <= -1:
            raise ConfigError("R_alpha needs alpha > -1")
        if alpha == 0:
            return name, lambda: r_zero(f, grid)
        return name, lambda: r_alpha_field(f, alpha, grid)
    if kind == "R_0":
        return name, lambda: r_zero(f, grid)
    if kind == "R_inf":
        if not f.is_compact:
            raise ConfigError("R_inf of a field without compact support is all of R^n")

        def build():
            K = r_infty_field(f)
            return SampledStarBody(grid, K.radial_many(np.zeros(grid.n), grid.points), "R_inf")

        return name, build
    if kind == "Pi_star":
        return name, lambda: polar_projection_body(f, grid)
    if alpha is None or not -1 < alpha < 0:
        raise ConfigError("Pi_star_frac needs -1 < alpha < 0")
    return name, lambda: frac_polar_projection_body(f, alpha, grid)


def _output_path(spec: dict, name: str, ext: str) -> str:
    """Output file relative to --out-dir; ``output`` may be a string or {"json"/"csv": path}."""
    out = spec.get("output")
    if isinstance(out, dict):
        out = out.get(ext)
    if out is None:
        return f"{name}.{ext}"
    if not isinstance(out, str) or not out or os.path.isabs(out) or ".." in Path(out).parts:
        raise ConfigError("'output' must be a relative path inside --out-dir")
    return out


def _validate_all(text: str, data: dict, section: str, seed: int, overrides: dict | None = None):
    overrides = overrides or {}
    entries = data.get(section, [])
    if not isinstance(entries, list):
        raise ConfigError(f"'{section}' must be a list", _line_of(text, None, section))
    jobs = []
    seen = set()
    for i, spec in enumerate(entries):
        name = spec.get("name") if isinstance(spec, dict) else None
        try:
            if name in seen:
                raise ConfigError(f"duplicate name {name!r}")
            job = (
                _prepare_scenario(spec, i, seed, overrides) if section == "scenarios"
                else _prepare_body(spec, overrides)
            )
            target = _output_path(spec, name, "json" if section == "scenarios" else "csv")
        except ConfigError as exc:
            label = f"{section[:-1]} {name!r}" if name else f"{section[:-1]} #{i + 1}"
            raise ConfigError(f"{label}: {exc}", exc.line or _line_of(text, name, section)) from exc
        seen.add(name)
        jobs.append((*job, target))
    return jobs


# ---------------------------------------------------------------------------
# output


def atomic_write(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _threads(arg: int | None) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("CHORDSCOPE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"CHORDSCOPE_THREADS must be an integer, got {env!r}")
    return 1


def _run_jobs(jobs, threads: int):
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda job: job[1](), jobs))
    return [job[1]() for job in jobs]


def _fail(where: str, exc: ConfigError) -> int:
    loc = f"{where}:{exc.line}" if exc.line else where
    print(f"{loc}: error: {exc}", file=sys.stderr)
    return 2


def cmd_run(args) -> int:
    try:
        where, text = _resolve_config(args.config)
    except ConfigError as exc:
        return _fail(args.config or BUNDLED_SUITE, exc)
    try:
        data = _load(text)
        seed = args.seed if args.seed is not None else data.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError("'seed' must be a non-negative integer", _line_of(text, None, "seed"))
        overrides = {"samples": args.samples, "resolution": args.grid_resolution}
        jobs = _validate_all(text, data, "scenarios", seed, overrides)
        threads = _threads(args.threads)
    except ConfigError as exc:
        return _fail(where, exc)
    try:
        reports = _run_jobs(jobs, threads)
    except DomainError as exc:
        print(f"{where}: error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out_dir)
    for (_, _, target), rep in zip(jobs, reports):
        atomic_write(out / target, rep.to_json() + "\n")
    atomic_write(out / "summary.csv", verifier.reports_to_csv(reports))
    if args.record_timings:
        lines = ["check_id,name,runtime_ms"] + [
            f"{r.check_id},{name},{r.runtime_ms:.1f}" for (name, _, _), r in zip(jobs, reports)
        ]
        atomic_write(out / "timings.csv", "\n".join(lines) + "\n")
    violated = [name for (name, _, _), r in zip(jobs, reports) if r.status == verifier.VIOLATED]
    for (name, _, _), r in zip(jobs, reports):
        print(f"{name:40s} {r.check_id:18s} {r.status:20s} min_margin={r.min_margin:.3e}")
    if violated:
        print(f"violated: {', '.join(violated)}", file=sys.stderr)
        return 1
    return 0


def cmd_dump_body(args) -> int:
    try:
        where, text = _resolve_config(args.config)
    except ConfigError as exc:
        return _fail(args.config or BUNDLED_SUITE, exc)
    try:
        data = _load(text)
        jobs = _validate_all(text, data, "bodies", 0, {"resolution": args.grid_resolution})
        if not jobs:
            raise ConfigError("config has no 'bodies' entries", 1)
        threads = _threads(args.threads)
    except ConfigError as exc:
        return _fail(where, exc)
    try:
        bodies = _run_jobs(jobs, threads)
    except DomainError as exc:
        print(f"{where}: error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out_dir)
    for (name, _, target), body in zip(jobs, bodies):
        atomic_write(out / target, body.to_csv())
        print(f"{name}: {len(body.rho)} directions -> {out / target}")
    return 0


def cmd_list_checks(args) -> int:
    for key, text in CHECK_HELP.items():
        print(f"{key:18s} {text}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chordscope", description="Numerical checks of chord power inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_out):
        p.add_argument("--config", help=f"JSON config (default: the bundled {BUNDLED_SUITE})")
        p.add_argument("--threads", type=int, default=None, help="worker threads (env CHORDSCOPE_THREADS)")
        p.add_argument("--out-dir", default=default_out, help="directory for the outputs")
        p.add_argument("--grid-resolution", type=int, default=None, help="override every direction grid resolution")

    run = sub.add_parser("run", help="run the scenarios of a config")
    common(run, "chordscope-out")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--samples", type=int, default=None, help="override Monte Carlo sample counts")
    run.add_argument("--record-timings", action="store_true", help="also write timings.csv")
    run.set_defaults(func=cmd_run)

    dump = sub.add_parser("dump-body", help="write star-body CSV dumps")
    common(dump, "chordscope-bodies")
    dump.add_argument("--seed", type=int, default=None, help="accepted for symmetry; constructions are deterministic")
    dump.set_defaults(func=cmd_dump_body)

    lst = sub.add_parser("list-checks", help="list the available checks")
    lst.set_defaults(func=cmd_list_checks)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
