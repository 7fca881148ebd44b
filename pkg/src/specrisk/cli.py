"""Command-line front end.

A thin client: every subcommand is a request against the HTTP service.  By
default the app is driven in process (no server needed); ``--server URL``
targets a running instance instead, and ``specrisk serve`` starts one.

``run`` options may also come from a flat key-value config file
(``key = value``, one per line); explicit flags override file values.
"""

from __future__ import annotations

import argparse
import asyncio
import sys

import httpx

_CONFIG_TYPES = {
    "data": str,
    "schema": str,
    "synthetic": str,
    "synthetic_n": int,
    "synthetic_d": int,
    "synthetic_noise": float,
    "methods": str,
    "spectrum": str,
    "spec_c": float,
    "spec_beta": float,
    "epochs": int,
    "trials": int,
    "seed": int,
    "test_fraction": float,
    "radius": float,
    "gamma": float,
    "smoothing_delta": float,
    "ancillary": str,
    "boost": bool,
    "boost_delta": float,
    "jobs": int,
    "out": str,
    "server": str,
}

_BOOL_VALUES = {
    "true": True, "yes": True, "1": True,
    "false": False, "no": False, "0": False,
}


def _parse_config_file(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(
                    f"{path}: line {lineno}: expected 'key = value', got {stripped!r}"
                )
            key, _, raw = stripped.partition("=")
            key, raw = key.strip().replace("-", "_"), raw.strip()
            if key not in _CONFIG_TYPES:
                raise ValueError(
                    f"{path}: line {lineno}: unknown option {key!r} "
                    f"(valid: {', '.join(sorted(_CONFIG_TYPES))})"
                )
            caster = _CONFIG_TYPES[key]
            if caster is bool:
                try:
                    values[key] = _BOOL_VALUES[raw.lower()]
                except KeyError:
                    raise ValueError(
                        f"{path}: line {lineno}: {key} must be true or false, got {raw!r}"
                    ) from None
            else:
                try:
                    values[key] = caster(raw)
                except ValueError:
                    raise ValueError(
                        f"{path}: line {lineno}: cannot parse {raw!r} for {key}"
                    ) from None
    return values


def _build_parser(config_defaults: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specrisk",
        description="Spectral-risk benchmark: training methods, boosting, and CSV output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the benchmark and write the CSV set")
    run.add_argument("--config", help="flat key-value option file (flags override it)")
    src = run.add_argument_group("data source (exactly one)")
    src.add_argument("--data", help="delimited dataset path")
    src.add_argument("--schema", help="column-role schema path (needed with --data)")
    src.add_argument("--synthetic", choices=["gauss2", "linabs"],
                     help="generate a synthetic dataset instead of loading one")
    run.add_argument("--synthetic-n", type=int, default=5000,
                     help="synthetic row count (default 5000)")
    run.add_argument("--synthetic-d", type=int, default=2,
                     help="synthetic feature count (default 2)")
    run.add_argument("--synthetic-noise", type=float, default=0.1,
                     help="synthetic noise scale (default 0.1)")
    run.add_argument("--methods", default="default,fast,off",
                     help="comma list from default,fast,off (default all)")
    run.add_argument("--spectrum", default="exp",
                     choices=["exp", "exponential", "cvar", "uniform"])
    run.add_argument("--spec-c", type=float, default=1.0,
                     help="exponential spectrum parameter c (default 1)")
    run.add_argument("--spec-beta", type=float, default=0.95,
                     help="cvar spectrum level beta (default 0.95)")
    run.add_argument("--epochs", type=int, default=50)
    run.add_argument("--trials", type=int, default=10)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--test-fraction", type=float, default=0.2)
    run.add_argument("--radius", type=float, default=100.0,
                     help="feasible-ball radius (default 100)")
    run.add_argument("--gamma", type=float, default=1.0,
                     help="step multiplier for the default method")
    run.add_argument("--smoothing-delta", type=float, default=0.3,
                     help="perturbation radius of the derivative-free method")
    run.add_argument("--ancillary", default="auto",
                     help="per-step CDF sample size, or 'auto' for ceil(sqrt(n))")
    run.add_argument("--boost", action="store_true",
                     help="also run the confidence-boosted driver per trial")
    run.add_argument("--delta", dest="boost_delta", type=float, default=0.05,
                     help="boosting confidence level (default 0.05)")
    run.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
    run.add_argument("--out", default="results", help="output directory")
    run.add_argument("--server", help="service URL (default: in-process)")
    run.set_defaults(func=_cmd_run)

    summ = sub.add_parser("summarize", help="aggregate a trajectories.csv into mean/std rows")
    summ.add_argument("--in", dest="input", required=True, help="trajectories.csv path")
    summ.add_argument("--out", help="summary CSV path (default: print to stdout)")
    summ.add_argument("--server", help="service URL (default: in-process)")
    summ.set_defaults(func=_cmd_summarize)

    conv = sub.add_parser("convert", help="rewrite a libsvm-format file as delimited text")
    conv.add_argument("--in", dest="input", required=True)
    conv.add_argument("--out", dest="output", required=True)
    conv.add_argument("--delimiter", default=",")
    conv.add_argument("--server", help="service URL (default: in-process)")
    conv.set_defaults(func=_cmd_convert)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_cmd_serve)

    if config_defaults:
        run.set_defaults(**config_defaults)
    return parser


def _request(server: str | None, method: str, path: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.request(method, path, json=payload)

    from .service import app

    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://specrisk", timeout=None
        ) as client:
            return await client.request(method, path, json=payload)

    return asyncio.run(go())


def _fail(resp: httpx.Response) -> int:
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    print(f"error: {detail}", file=sys.stderr)
    return 1


def _cmd_run(args) -> int:
    payload = {
        "data_path": args.data,
        "schema_path": args.schema,
        "synthetic": args.synthetic,
        "synthetic_n": args.synthetic_n,
        "synthetic_d": args.synthetic_d,
        "synthetic_noise": args.synthetic_noise,
        "methods": [m.strip() for m in args.methods.split(",") if m.strip()],
        "spectrum": args.spectrum,
        "spec_c": args.spec_c,
        "spec_beta": args.spec_beta,
        "epochs": args.epochs,
        "trials": args.trials,
        "seed": args.seed,
        "test_fraction": args.test_fraction,
        "radius": args.radius,
        "gamma": args.gamma,
        "smoothing_delta": args.smoothing_delta,
        "ancillary": str(args.ancillary),
        "boost": args.boost,
        "boost_delta": args.boost_delta,
        "jobs": args.jobs,
        "out": args.out,
    }
    resp = _request(args.server, "POST", "/experiments/run", payload)
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    print(f"wrote {body['trajectories_path']} ({body['n_rows']} rows)")
    print(f"wrote {body['summary_path']}")
    print(f"wrote {body['runlog_path']}")
    return 0


def _cmd_summarize(args) -> int:
    resp = _request(args.server, "POST", "/summaries", {"trajectories_path": args.input})
    if resp.status_code != 200:
        return _fail(resp)
    lines = ["method,epoch,split,metric,mean,std"]
    for row in resp.json():
        lines.append(
            f"{row['method']},{row['epoch']},{row['split']},{row['metric']},"
            f"{row['mean']!r},{row['std']!r}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_convert(args) -> int:
    payload = {
        "input_path": args.input,
        "output_path": args.output,
        "delimiter": args.delimiter,
    }
    resp = _request(args.server, "POST", "/datasets/convert", payload)
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    print(f"wrote {args.output} ({body['rows']} rows, {body['features']} features)")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("specrisk.service:app", host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _build_parser().parse_args(argv)
        if getattr(args, "config", None):
            defaults = _parse_config_file(args.config)
            args = _build_parser(defaults).parse_args(argv)
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
