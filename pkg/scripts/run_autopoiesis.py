"""Run the setpoint-restoration scenario and an ablation without the morphic layer.

    python3 scripts/run_autopoiesis.py [--ticks 200] [--seed 3]
"""
import argparse
import dataclasses

from phaseweb.scenario import Scenario, packaged, setpoint_episodes
from phaseweb.world import run


def episodes(scenario, ticks, seed):
    world = scenario.build(seed)
    run(world, ticks, stop_when_quiescent=False)
    return world, setpoint_episodes(world, scenario.setpoint)


def report(label, world, eps, within):
    restored = [e for e in eps if e["latency"] is not None and e["latency"] <= within]
    print(f"{label}: {len(restored)}/{len(eps)} departures restored within {within} ticks, "
          f"{len(world.actions)} actions, {world.stats['fires']} fires")
    for e in eps:
        print(f"  t={e['tick']:>3}  restored={e['restored']}  latency={e['latency']}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ticks", type=int, default=200)
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()

    scenario = Scenario.load(packaged("autopoiesis"))
    world, eps = episodes(scenario, args.ticks, args.seed)
    report("full hierarchy", world, eps, scenario.restore_within)

    ablated = dataclasses.replace(scenario, hierarchy=[c for c in scenario.hierarchy if c.type != "morphic"])
    world, eps = episodes(ablated, args.ticks, args.seed)
    report("without morphic layer", world, eps, scenario.restore_within)


if __name__ == "__main__":
    main()
