"""Fixture tuning harness: simulate every corpus scenario with each
planner, bare and mock-supervised, and print collision/score outcomes.
Used while calibrating the bundled corpus; not part of the test suite."""

import sys
import time

from dualad.corpus import CRITICAL_SUITE, build_corpus_docs
from dualad.metrics import score_trace
from dualad.planners import IdmPlanner, LatticePlanner, SamplingPlanner
from dualad.reasoner import MockReasoner
from dualad.scenario import scenario_from_dict
from dualad.sim import SimConfig, run


def outcome(sc, planner_cls, reasoner, mode):
    cfg = SimConfig(mode=mode)
    trace = run(sc, planner_cls(), reasoner() if reasoner else None, cfg)
    card = score_trace(trace, sc)
    first_col = next((r["t"] for r in trace.records if r["collisions"]), None)
    return trace.collided, card.score, first_col


def main():
    only = sys.argv[1] if len(sys.argv) > 1 else None
    mode = sys.argv[2] if len(sys.argv) > 2 else "non_reactive"
    t0 = time.time()
    print(f"mode={mode}")
    print(f"{'scenario':<16} {'idm':<18} {'idm+mock':<18} "
          f"{'lattice':<18} {'lattice+mock':<18} crit")
    for doc in build_corpus_docs():
        if only and only not in doc["id"]:
            continue
        sc = scenario_from_dict(doc)
        cells = []
        for planner, reasoner in ((IdmPlanner, None), (IdmPlanner, MockReasoner),
                                  (LatticePlanner, None),
                                  (LatticePlanner, MockReasoner)):
            col, score, t_col = outcome(sc, planner, reasoner, mode)
            mark = f"COL@{t_col:.1f}" if col else f"ok {score:5.1f}"
            cells.append(f"{mark:<18}")
        crit = "*" if doc["id"] in CRITICAL_SUITE else ""
        print(f"{doc['id']:<16} " + " ".join(cells) + f" {crit}")
    print(f"total {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
