"""Command-line front end: gen, run, compare, sweep.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path
from typing import Optional, Union

from .config import CacheConfig, ConfigError
from .engine import run as run_sim
from .metrics import MetricsReport
from .policy import POLICIES
from .trace import TraceFormatError, write_trace
from .tracegen import KINDS, WorkloadError, WorkloadSpec, generate

SWEEPABLE = ("threshold", "interval_cycles", "pc_limit")
TABLE_COLUMNS = (
    "policy", "accesses", "miss_ratio", "ipc_proxy", "mean_intra_set_variance",
    "sampled_wear_variance", "global_wear_cov", "redirected_writes",
)
RUN_KEYS = ("policy", "trace", "out_dir", "workload")


class UsageError(Exception):
    pass


def load_run_config(path: Optional[str]) -> dict:
    """Read a run config; cache keys become a CacheConfig, the rest stay as-is."""
    data = {}
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError("run config must be a JSON object")
    cache_keys = {f.name for f in fields(CacheConfig)}
    unknown = set(data) - cache_keys - set(RUN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = {k: data[k] for k in RUN_KEYS if k in data}
    out["cache"] = {k: v for k, v in data.items() if k in cache_keys}
    if "workload" in out and out["workload"] is not None:
        out["workload"] = WorkloadSpec.from_dict(out["workload"])
    return out


def _resolve(args) -> tuple[CacheConfig, Union[str, WorkloadSpec], dict]:
    rc = load_run_config(args.config)
    cache = dict(rc["cache"])
    if getattr(args, "threshold", None) is not None:
        cache["threshold"] = args.threshold
    if getattr(args, "interval", None) is not None:
        cache["interval_cycles"] = args.interval
    cfg = CacheConfig.from_dict(cache)

    trace = args.trace or rc.get("trace")
    workload = rc.get("workload")
    if trace:
        if not Path(trace).is_file():
            raise FileNotFoundError(f"trace not found: {trace}")
        source: Union[str, WorkloadSpec] = str(trace)
    elif workload is not None:
        if args.seed is not None:
            workload = WorkloadSpec.from_dict({**workload.to_dict(), "seed": args.seed})
        workload.validate(cfg)
        source = workload
    else:
        raise UsageError("no trace given: pass --trace or put 'trace'/'workload' in --config")
    rc["policy"] = getattr(args, "policy", None) or rc.get("policy") or "proposed"
    if rc["policy"] not in POLICIES:
        raise UsageError(f"unknown policy {rc['policy']!r}")
    rc["out_dir"] = args.out_dir or rc.get("out_dir") or "."
    return cfg, source, rc


def _simulate(job) -> MetricsReport:
    source, cfg, policy = job
    trace = generate(source, cfg) if isinstance(source, WorkloadSpec) else source
    return run_sim(trace, cfg, policy)


def _run_all(jobs, n_jobs: int) -> list[MetricsReport]:
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            return list(ex.map(_simulate, jobs))
    return [_simulate(j) for j in jobs]


def write_outputs(out_dir: Union[str, Path], files: dict[str, str]) -> None:
    """Write every file or none: stage in temporaries, then rename into place."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            staged.append((tmp, out_dir / name))
        for tmp, final in staged:
            os.replace(tmp, final)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)


def _row(report: MetricsReport, columns) -> list:
    return [getattr(report, c) for c in columns]


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _table(header, rows) -> str:
    cells = [[str(h) for h in header]] + [
        [f"{v:.6f}" if isinstance(v, float) else str(v) for v in r] for r in rows
    ]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


# -- subcommands -------------------------------------------------------------

def cmd_gen(args) -> int:
    cfg = CacheConfig.from_dict(load_run_config(args.config)["cache"])
    spec = WorkloadSpec(
        kind=args.kind, num_records=args.records, seed=args.seed,
        zipf_s=args.zipf_s, hot_ip_count=args.hot_ips, write_fraction=args.write_fraction,
        target_set=args.target_set, cycle_stride=args.stride, hot_blocks=args.hot_blocks,
    )
    trace = generate(spec, cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    n = write_trace(trace, buf)
    write_outputs(out.parent, {out.name: buf.getvalue()})
    print(f"wrote {n} records to {out}")
    return 0


def cmd_run(args) -> int:
    cfg, source, rc = _resolve(args)
    report = _simulate((source, cfg, rc["policy"]))
    write_outputs(rc["out_dir"], {
        "metrics.json": report.to_json(),
        "variance.csv": report.variance_csv(),
        "wear.csv": report.wear_csv(),
    })
    print(report.summary())
    return 0


def _split_list(text: str) -> list[str]:
    return [t for t in (p.strip() for p in text.split(",")) if t]


def cmd_compare(args) -> int:
    cfg, source, rc = _resolve(args)
    policies = _split_list(args.policies)
    if not policies:
        raise UsageError("--policies needs at least one policy")
    for p in policies:
        if p not in POLICIES:
            raise UsageError(f"unknown policy {p!r}")
    reports = _run_all([(source, cfg, p) for p in policies], args.jobs)
    rows = [_row(r, TABLE_COLUMNS) for r in reports]
    write_outputs(rc["out_dir"], {"compare.csv": _csv(TABLE_COLUMNS, rows)})
    print(_table(TABLE_COLUMNS, rows))
    return 0


def cmd_sweep(args) -> int:
    if args.param not in SWEEPABLE:
        raise UsageError(f"cannot sweep {args.param!r}; choose from {SWEEPABLE}")
    raw = _split_list(args.values)
    if not raw:
        raise UsageError("--values must list at least one value")
    try:
        values = [int(v) for v in raw]
    except ValueError:
        raise UsageError(f"--values must be integers, got {args.values!r}") from None
    cfg, source, rc = _resolve(args)
    cfgs = [cfg.with_(**{args.param: v}) for v in values]
    reports = _run_all([(source, c, rc["policy"]) for c in cfgs], args.jobs)
    header = (args.param,) + TABLE_COLUMNS
    rows = [[v] + _row(r, TABLE_COLUMNS) for v, r in zip(values, reports)]
    write_outputs(rc["out_dir"], {f"sweep_{args.param}.csv": _csv(header, rows)})
    print(_table(header, rows))
    return 0


# -- parser ------------------------------------------------------------------

def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wearlevel", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic trace")
    g.add_argument("--kind", required=True, choices=KINDS)
    g.add_argument("--records", type=int, required=True)
    g.add_argument("--seed", type=_u64, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--config", help="run config JSON (cache geometry is used)")
    g.add_argument("--zipf-s", type=float, default=1.0)
    g.add_argument("--hot-ips", type=int, default=4)
    g.add_argument("--write-fraction", type=float, default=0.5)
    g.add_argument("--target-set", type=int)
    g.add_argument("--stride", type=int, default=1)
    g.add_argument("--hot-blocks", type=int)
    g.set_defaults(func=cmd_gen)

    def sim_flags(sp, with_policy=True):
        sp.add_argument("--config")
        if with_policy:
            sp.add_argument("--policy", choices=sorted(POLICIES))
        sp.add_argument("--trace")
        sp.add_argument("--out-dir")
        sp.add_argument("--seed", type=_u64, help="overrides the workload seed in --config")
        sp.add_argument("--threshold", type=int)
        sp.add_argument("--interval", type=int)
        sp.add_argument("--jobs", type=int, default=1)

    r = sub.add_parser("run", help="simulate one policy")
    sim_flags(r)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="run several policies on the same trace")
    sim_flags(c, with_policy=False)
    c.add_argument("--policies", default="none,threshold,proposed")
    c.set_defaults(func=cmd_compare)

    s = sub.add_parser("sweep", help="one run per value of a parameter")
    sim_flags(s)
    s.add_argument("--param", required=True)
    s.add_argument("--values", required=True)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (OSError, ConfigError, WorkloadError, TraceFormatError, ValueError) as exc:
        print(f"wearlevel: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
