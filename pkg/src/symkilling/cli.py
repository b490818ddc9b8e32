"""Command-line front end: ``symkilling verify <suite>`` and ``symkilling invariants --algebra X``."""
from __future__ import annotations

import argparse
import json
import sys

from .suites import SUITES, CheckReport, SuiteConfig, run_suite


def _parse_tol(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, val = item.partition("=")
        if not sep or not name:
            raise argparse.ArgumentTypeError(f"--tol expects name=value, got {item!r}")
        try:
            out[name] = float(val)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad tolerance value in {item!r}") from None
    return out


def _report_dict(r: CheckReport, timing: bool) -> dict:
    d = r.to_dict(timing)
    if not timing:
        d["wall_time_ms"] = None
    return d


def emit_report(reports, fmt: str = "json", suite: str | None = None, seed: int | None = None,
                timing: bool = False) -> str:
    """Render reports as JSON ({suite, seed, checks}) or as markdown tables, one per suite."""
    reports = sorted(reports, key=lambda r: r.name)
    if fmt == "json":
        doc = {}
        if suite is not None:
            doc["suite"] = suite
        if seed is not None:
            doc["seed"] = seed
        doc["checks"] = [_report_dict(r, timing) for r in reports]
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if fmt not in ("md", "markdown"):
        raise ValueError(f"unknown format {fmt!r}")
    groups: dict[str, list[CheckReport]] = {}
    for r in reports:
        groups.setdefault(r.name.split(".", 1)[0], []).append(r)
    lines = []
    if suite is not None:
        lines += [f"# {suite} (seed {seed})", ""]
    if not reports:
        lines.append("_no checks_")
    for g, rs in groups.items():
        lines += [f"## {g}", "", "| check | value | expected | tolerance | mode | pass | ms | reference |",
                  "|---|---|---|---|---|---|---|---|"]
        for r in rs:
            d = _report_dict(r, timing)
            cells = [d["name"], _fmt(d["value"]), _fmt(d["expected"]), _fmt(d["tolerance"]), d["mode"],
                     "yes" if d["pass"] else "**no**", _fmt(d["wall_time_ms"]),
                     d["paper_ref"].replace("|", "\\|")]
            lines.append("| " + " | ".join(cells) + " |")
        lines.append("")
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symkilling",
                                description="Numerical verification of symmetric Killing tensor results.")
    p.add_argument("command", nargs="?", choices=("verify", "invariants"), default="verify")
    p.add_argument("target", nargs="?", help="suite name for 'verify'")
    p.add_argument("--suite", help="suite name (alternative to the positional)")
    p.add_argument("--model", choices=("sphere", "flat", "scaled"), default="sphere")
    p.add_argument("--n", type=int, default=2, help="manifold dimension")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--structure", choices=("sasaki", "3sasaki"))
    p.add_argument("--algebra")
    p.add_argument("--dim", type=int)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int)
    p.add_argument("--fd-step", type=float, default=1e-3)
    p.add_argument("--tol", action="append", metavar="NAME=VAL",
                   help="tolerance override; NAME may be a glob over check names")
    p.add_argument("--format", choices=("json", "md", "markdown"), default="json")
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true",
                   help="record wall times (output is then not byte-reproducible)")
    return p


def config_from_args(args) -> SuiteConfig:
    if args.command == "invariants":
        if args.target and args.target != "invariants":
            raise ValueError("'invariants' takes no positional suite")
        suite = "invariants"
        if not args.algebra:
            raise ValueError("invariants needs --algebra")
    else:
        if args.target and args.suite and args.target != args.suite:
            raise ValueError("conflicting suite names")
        suite = args.target or args.suite
        if suite is None:
            raise ValueError(f"no suite given; choose from {', '.join(SUITES + ('all',))}")
    return SuiteConfig(suite=suite, model=args.model, n=args.n, radius=args.radius,
                       structure=args.structure, dim=args.dim, algebra=args.algebra,
                       seed=args.seed, samples=args.samples, fd_step=args.fd_step,
                       tol=_parse_tol(args.tol))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValueError, argparse.ArgumentTypeError) as e:
        parser.error(str(e))
    from ._cache import enable_compilation_cache

    enable_compilation_cache()
    try:
        reports = run_suite(cfg)
    except ValueError as e:
        print(f"symkilling: {e}", file=sys.stderr)
        return 2
    text = emit_report(reports, args.format, cfg.suite, cfg.seed, args.timing)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
