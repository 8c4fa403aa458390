"""The cyclic 3x3 game: one initialisation terminates, the generic one not.

With exactly equal initial weights both players keep hitting ties, the
smallest-index tie-break synchronises them, and the play time-shares the
diagonal: a three-state absorbing cycle with a uniform steady state.  From
generic random weights, fictitious play wanders the six off-diagonal
actions with ever longer runs; no state ever behaves like an earlier one,
so exploration runs into the depth bound and reports truncation instead of
inventing a loop.

Run: python demos/02_cyclic_game.py
"""

from smcl import (
    ExploreConfig,
    SHAPLEY_EQUAL_WEIGHTS,
    analyze,
    explore,
    initial_state,
    random_initial_weights,
    shapley,
)

game = shapley()

print("equal initial weights (1/3, 1/3, 1/3):")
learner = initial_state("fp", game, SHAPLEY_EQUAL_WEIGHTS)
chain = explore(game, learner, ExploreConfig(max_depth=60, tau0=0.01))
report = analyze(game, chain)
for b in report.bsccs:
    actions = " ".join(str(a) for a in sorted(b.actions)) or "(sink)"
    print(f"  p={b.reach_probability:.4f}  {b.classification.value:<12}"
          f" {actions}")
    if len(b.scc.members) > 1:
        print(f"    steady state: "
              f"{ {s: round(p, 6) for s, p in b.steady_state.items()} }")
print()

print("generic random weights, depth bound 200:")
weights = random_initial_weights(game, seed=[77, 0])
learner = initial_state("fp", game, weights)
chain = explore(game, learner, ExploreConfig(max_depth=200, tau0=0.01))
report = analyze(game, chain)
print(f"  truncated: {chain.truncated}  ({chain.num_states} states)")
for b in report.bsccs:
    print(f"  p={b.reach_probability:.4f}  {b.classification.value}")
print()
print("The truncation component is the honest answer here: the six-action")
print("cycle keeps stretching its runs, so its states never repeat.")
