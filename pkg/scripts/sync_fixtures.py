"""Model-check the packaged synchronisation nets and print a one-line verdict for each.

    python3 scripts/sync_fixtures.py [NET.json ...]
"""
import argparse
from importlib import resources
from pathlib import Path

from phaseweb.sync import SyncNet, verify_net


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("nets", nargs="*")
    args = ap.parse_args()
    paths = args.nets or sorted(Path(str(resources.files("phaseweb") / "data" / "nets")).glob("*.json"))
    for path in paths:
        rep = verify_net(SyncNet.load(path))
        obs = rep["observed"]
        flags = " ".join(f"{k}={v}" for k, v in obs.items())
        print(f"{Path(path).stem:<14} ok={rep['ok']!s:<5} states={rep['reachable_states']:<4} {flags}")


if __name__ == "__main__":
    main()
