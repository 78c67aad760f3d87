"""Command-line entry: run scenarios, dump hierarchies, run the verification suites.

Exit codes: 0 ok, 1 property violation, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .algebra import MAX_LADDER_N, AlgebraError, verify_identities, verify_ladder
from .scenario import Scenario, ScenarioError, dump_at, packaged, run_scenario
from .sync import SyncError, SyncNet, verify_net

OK, VIOLATION, USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 too, but keep it explicit
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, ensure_ascii=False))


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return USAGE


def _scenario_path(arg: str) -> str:
    # bare names like "blocks" resolve to the packaged scenarios
    if not Path(arg).exists() and "/" not in arg and packaged(arg).exists():
        return str(packaged(arg))
    return arg


def cmd_run(args) -> int:
    if args.ticks is not None and args.ticks < 1:
        return _fail("ticks: tick budget must be >= 1")
    try:
        scenario = Scenario.load(_scenario_path(args.scenario))
        world, summary = run_scenario(scenario, args.ticks, args.seed)
    except ScenarioError as e:
        return _fail(str(e))
    text = "\n".join(world.trace) + "\n"
    if args.trace == "-":
        sys.stdout.write(text)
    elif args.trace:
        Path(args.trace).write_text(text, encoding="utf-8")
    _emit(summary)
    return OK


def _verify_algebra(n: int) -> dict:
    report = verify_ladder(n).to_dict()
    report["identities"] = verify_identities(n) if n >= 2 else {}
    report["ok"] = report["ok"] and all(report["identities"].values())
    return report


def _packaged_nets() -> List[Path]:
    from importlib import resources

    root = Path(str(resources.files("phaseweb") / "data" / "nets"))
    return [root / "mutex.json", root / "cooccurrence.json"]


def cmd_verify(args) -> int:
    try:
        if args.suite == "algebra":
            report = _verify_algebra(args.n)
        elif args.suite == "sync":
            if not args.net:
                return _fail("verify sync needs a net file")
            report = verify_net(SyncNet.load(args.net))
        else:
            sizes = [args.n] if args.n_given else list(range(2, 7))
            report = {
                "algebra": [_verify_algebra(n) for n in sizes],
                "sync": [verify_net(SyncNet.load(p)) for p in ([args.net] if args.net else _packaged_nets())],
            }
            report["ok"] = all(r["ok"] for r in report["algebra"] + report["sync"])
    except (AlgebraError, SyncError) as e:
        return _fail(str(e))
    except (OSError, json.JSONDecodeError) as e:
        return _fail(f"net: {e}")
    _emit(report)
    return OK if report["ok"] else VIOLATION


def cmd_dump(args) -> int:
    if args.at_tick < 0:
        return _fail("at-tick must be >= 0")
    try:
        scenario = Scenario.load(_scenario_path(args.scenario))
        _emit(dump_at(scenario, args.at_tick, args.seed))
    except ScenarioError as e:
        return _fail(str(e))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="phaseweb", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run a scenario and print its summary")
    r.add_argument("scenario")
    r.add_argument("--ticks", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--trace", help="write the event trace here ('-' for stdout)")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="run the exhaustive property suites")
    v.add_argument("suite", choices=["algebra", "sync", "all"])
    v.add_argument("net", nargs="?", help="net JSON for the sync suite")
    v.add_argument("--n", type=int, default=None, help=f"dimension, 1..{MAX_LADDER_N}")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("dump-hierarchy", help="print the hierarchy after T ticks")
    d.add_argument("scenario")
    d.add_argument("--at-tick", type=int, required=True)
    d.add_argument("--seed", type=int)
    d.set_defaults(func=cmd_dump)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        args.n_given = args.n is not None
        if args.n is None:
            args.n = 4
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
