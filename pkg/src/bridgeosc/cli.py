"""Command line front end: `bridge run|list|sweep`.

Exit codes: 0 success, 1 runtime failure, 2 config/parse error,
3 precondition (parameter validation) failure. BRIDGE_OUT overrides the
default output directory.
"""
from __future__ import annotations

import argparse
import copy
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

from .errors import InvalidParameterError
from .scenarios import BUILTINS, list_builtins, run_scenario

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3


def _default_out_dir(explicit: Optional[str]) -> str:
    if explicit:
        return explicit
    return os.environ.get("BRIDGE_OUT", "out")


def _load_config(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _execute(config: dict, out_dir: str) -> int:
    try:
        result = run_scenario(config, out_dir)
    except (ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, InvalidParameterError):
            print(f"precondition violation: {exc}", file=sys.stderr)
            return EXIT_PRECONDITION
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"{result.name}: {result.summary}")
    return EXIT_OK


def _cmd_run(args) -> int:
    out_dir = _default_out_dir(args.out)
    if args.builtin:
        if args.builtin not in BUILTINS:
            print(f"unknown builtin {args.builtin!r}; see `bridge list`",
                  file=sys.stderr)
            return EXIT_PARSE
        return _execute(copy.deepcopy(BUILTINS[args.builtin]), out_dir)
    if not args.config:
        print("run needs a config path or --builtin NAME", file=sys.stderr)
        return EXIT_PARSE
    try:
        config = _load_config(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return _execute(config, out_dir)


def _cmd_list(_args) -> int:
    for name in list_builtins():
        print(name)
    return EXIT_OK


def _parse_param_spec(spec: str):
    """'k=2:4:0.1' -> ('k', [2.0, 2.1, ..., 4.0]); dotted names descend
    into the parameters object."""
    try:
        name, rng = spec.split("=", 1)
        parts = [float(v) for v in rng.split(":")]
    except ValueError as exc:
        raise ValueError(f"bad --param spec {spec!r}; expected name=a:b:step") from exc
    if len(parts) == 1:
        return name, [parts[0]]
    if len(parts) != 3:
        raise ValueError(f"bad --param spec {spec!r}; expected name=a:b:step")
    a, b, step = parts
    if step <= 0 or b < a:
        raise ValueError("sweep range must have b >= a and step > 0")
    vals = []
    k = 0
    while True:
        v = a + k * step
        if v > b + 1e-12 * max(1.0, abs(b)):
            break
        vals.append(round(v, 12))
        k += 1
    return name, vals


def _set_param(config: dict, dotted: str, value: float) -> None:
    """Set parameters[dotted.path] = value; a bare name that is absent at
    the top level is resolved against nested parameter objects when the
    match is unique."""
    node = config["parameters"]
    keys = dotted.split(".")
    if len(keys) == 1 and keys[0] not in node:
        hits = [sub for sub in node.values()
                if isinstance(sub, dict) and keys[0] in sub]
        if len(hits) == 1:
            hits[0][keys[0]] = value
            return
        raise KeyError(dotted)
    for key in keys[:-1]:
        node = node[key]
    if keys[-1] not in node:
        raise KeyError(dotted)
    node[keys[-1]] = value


def _sweep_point(payload):
    config, out_dir = payload
    return _execute(config, out_dir)


def _cmd_sweep(args) -> int:
    out_dir = _default_out_dir(args.out)
    try:
        config = _load_config(args.config)
        name, values = _parse_param_spec(args.param)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"cannot set up sweep: {exc}", file=sys.stderr)
        return EXIT_PARSE
    points = []
    base_name = config.get("name", "sweep")
    for v in values:
        pt = copy.deepcopy(config)
        try:
            _set_param(pt, name, v)
        except (KeyError, TypeError):
            print(f"parameter path {name!r} not found in config", file=sys.stderr)
            return EXIT_PARSE
        pt["name"] = f"{base_name}_{name.replace('.', '-')}={v:g}"
        points.append((pt, out_dir))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(_sweep_point, points))
    else:
        codes = [_sweep_point(pt) for pt in points]
    return max(codes) if codes else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bridge",
                                 description="Oscillating-bridge scenario runner")
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario config or builtin")
    run_p.add_argument("config", nargs="?", help="path to a scenario JSON")
    run_p.add_argument("--builtin", help="name of a builtin scenario")
    run_p.add_argument("--out", help="output directory (default: BRIDGE_OUT or ./out)")
    run_p.set_defaults(func=_cmd_run)

    list_p = sub.add_parser("list", help="list builtin scenarios")
    list_p.set_defaults(func=_cmd_list)

    sweep_p = sub.add_parser("sweep", help="run a config across a parameter range")
    sweep_p.add_argument("config", help="path to a scenario JSON")
    sweep_p.add_argument("--param", required=True,
                         help="sweep spec name=start:stop:step "
                              "(dotted names descend into parameters)")
    sweep_p.add_argument("--jobs", type=int, default=1,
                         help="parallel worker processes")
    sweep_p.add_argument("--out", help="output directory")
    sweep_p.set_defaults(func=_cmd_sweep)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
