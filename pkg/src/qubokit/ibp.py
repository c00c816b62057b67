"""Iterative belief propagation: the outer Markov-chain loop.

Each step selects one random induced sub-tree, shared by all replicas, and
exactly resamples its bits in every replica from the Boltzmann law of the
sub-problem conditioned on the frozen complement.  That is a heat-bath
block update, so at fixed beta the full Boltzmann distribution is
stationary.

`ibp_step` is the per-step reference (one replica at a time, readable);
`ibp_run` drives a vectorized kernel that performs the same arithmetic on
all replicas at once and consumes identical RNG streams, so both paths
produce the same trajectories for a given seed.
"""

from __future__ import annotations

import numpy as np

from .anneal import (
    AnnealSchedule,
    ChunkRunner,
    ReplicaEnsemble,
    RunTrace,
    StepFn,
    run_schedule,
)
from .qubo import QuboInstance
from .subtree import build_tree_problem, frozen_neighbor_arrays, select_subtree
from .treebp import bp_pass, ensemble_sample, ensemble_upward, sample_tree


def ibp_step(
    q: QuboInstance,
    ensemble: ReplicaEnsemble,
    beta: float,
    rng: np.random.Generator,
) -> int:
    """One move: resample a shared random sub-tree in every replica.

    Mutates ensemble states and cached energies in place; returns the tree
    size M for spin-update accounting.
    """
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    tree = select_subtree(q, rng)
    for r in range(ensemble.r):
        x = ensemble.states[r]
        tp = build_tree_problem(q, tree, x, beta)
        ms = bp_pass(tp)
        bits = sample_tree(tp, ms, ensemble.rngs[r])
        d = 0.0
        for p, node in enumerate(tree.nodes):
            d += tp.eff_field[p] * (bits[node] - int(x[node]))
        for p in range(1, tree.size):
            pnode = tree.nodes[int(tree.parent_pos[p])]
            node = tree.nodes[p]
            d += float(tree.edge_w[p]) * (
                bits[node] * bits[pnode] - int(x[node]) * int(x[pnode])
            )
        for node, bit in bits.items():
            x[node] = bit
        ensemble.energies[r] += d
    return tree.size


def _make_ibp_step(
    q: QuboInstance,
    ens: ReplicaEnsemble,
    chain_rng: np.random.Generator,
    run_chunks: ChunkRunner,
) -> StepFn:
    """Vectorized ibp_step over the replica axis, chunked for threading."""
    states, energies, rngs = ens.states, ens.energies, ens.rngs

    def step(beta: float) -> int:
        tree = select_subtree(q, chain_rng)
        idx, wmat = frozen_neighbor_arrays(q, tree)
        nodes = np.asarray(tree.nodes)
        hbase = q.h[nodes]
        m = tree.size

        def work(lo: int, hi: int) -> None:
            xc = states[lo:hi]
            # Frozen-neighbor fields, accumulated column by column in
            # adjacency order (padding weights are 0, so they are no-ops).
            eff = np.tile(hbase, (hi - lo, 1))
            for col in range(idx.shape[1]):
                eff += wmat[:, col] * xc[:, idx[:, col]]
            s_up = ensemble_upward(tree, eff, beta)
            u = np.stack([rngs[r].random(m) for r in range(lo, hi)])
            bits = ensemble_sample(tree, s_up, beta, u)
            old = xc[:, nodes].astype(np.float64)
            new = bits.astype(np.float64)
            d = np.zeros(hi - lo)
            for p in range(m):
                d += eff[:, p] * (new[:, p] - old[:, p])
            for p in range(1, m):
                pp = int(tree.parent_pos[p])
                d += tree.edge_w[p] * (new[:, p] * new[:, pp] - old[:, p] * old[:, pp])
            xc[:, nodes] = bits
            energies[lo:hi] += d

        run_chunks(work)
        return m

    return step


def ibp_run(
    q: QuboInstance,
    r: int,
    schedule: AnnealSchedule,
    seed: int,
    checkpoint_every: int | None = None,
    *,
    budget: int | None = None,
    threads: int = 1,
) -> RunTrace:
    """Run IBP over the schedule; spin updates count sum of tree sizes per
    replica.  See anneal.run_schedule for budget and checkpoint semantics."""
    return run_schedule(
        q, r, schedule, seed, checkpoint_every, _make_ibp_step,
        budget=budget, threads=threads,
    )
