"""Monte-Carlo playouts as an independent check on the chain analysis.

A single seeded trace shows the familiar story: one probabilistic first
step, then deterministic best responses that either coordinate or fall
into the zero-reward loop.  A 100k-run batch classifies each playout by
the action set its tail keeps repeating and recovers the chain's reach
probabilities to Monte-Carlo accuracy.

Run: python demos/04_simulation_traces.py
"""

import math

from smcl import (
    ExploreConfig,
    SIMPLE_COORDINATION_WEIGHTS,
    analyze,
    empirical_convergence,
    explore,
    initial_state,
    simple_coordination,
    simulate,
    trace_to_csv,
)

game = simple_coordination()
learner = initial_state("fp", game, SIMPLE_COORDINATION_WEIGHTS)

trace = simulate(game, learner, iterations=12, tau0=0.01, seed=1)
print("one seeded trace:", " ".join(str(a) for a in trace.actions))
trace_to_csv(trace, game, "coordination_run0.csv")
print("written to coordination_run0.csv")
print()

chain = explore(game, learner, ExploreConfig(max_depth=100, tau0=0.01))
report = analyze(game, chain)
chain_probs = {}
for b in report.bsccs:
    chain_probs[b.actions] = chain_probs.get(b.actions, 0.0) \
        + b.reach_probability

runs = 100_000
result = empirical_convergence(
    game, learner, runs=runs, iterations=50, seed=99, tau0=0.01
)
print(f"{runs} playouts vs chain probabilities:")
for actions, p in sorted(chain_probs.items(), key=lambda kv: -kv[1]):
    freq = result.frequencies.get(actions, 0.0)
    se = math.sqrt(p * (1 - p) / runs)
    label = " ".join(str(a) for a in sorted(actions))
    print(f"  {label:<16} chain={p:.5f}  playouts={freq:.5f}  "
          f"(3se = {3 * se:.5f})")
print(f"unresolved playouts: {result.unresolved:.5f}")
