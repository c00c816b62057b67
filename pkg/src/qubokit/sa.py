"""Simulated-annealing baseline with Metropolis single-spin updates."""

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
from .qubo import QuboInstance, delta_energy


def sa_sweep(
    q: QuboInstance, x: np.ndarray, beta: float, rng: np.random.Generator
) -> tuple[np.ndarray, int]:
    """One sweep: visit all n variables in a fresh random permutation and
    flip each with probability min(1, e^(-beta*d)).

    Mutates x in place; returns (x, accepted count).  Counts as n spin
    updates (attempts) regardless of acceptance.
    """
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    perm = rng.permutation(q.n)
    u = rng.random(q.n)
    accepted = 0
    for t in range(q.n):
        i = int(perm[t])
        d = delta_energy(q, x, i)
        if u[t] < np.exp(-beta * max(d, 0.0)):
            x[i] = 1 - x[i]
            accepted += 1
    return x, accepted


def _make_sa_step(
    q: QuboInstance,
    ens: ReplicaEnsemble,
    chain_rng: np.random.Generator,
    run_chunks: ChunkRunner,
) -> StepFn:
    """Vectorized sweep over the replica axis; chain_rng is unused (kept so
    IBP and SA runs share the seed layout)."""
    states, energies, rngs = ens.states, ens.energies, ens.rngs
    idx, wgt = q.padded_adjacency()
    n = q.n

    def step(beta: float) -> int:
        def work(lo: int, hi: int) -> None:
            rc = hi - lo
            rows = np.arange(rc)
            perms = np.stack([rngs[r].permutation(n) for r in range(lo, hi)])
            us = np.stack([rngs[r].random(n) for r in range(lo, hi)])
            xc = states[lo:hi]
            for t in range(n):
                sites = perms[:, t]
                neigh = xc[rows[:, None], idx[sites]]
                fld = q.h[sites] + (wgt[sites] * neigh).sum(axis=1)
                d = (1.0 - 2.0 * xc[rows, sites]) * fld
                acc = us[:, t] < np.exp(-beta * np.maximum(d, 0.0))
                xc[rows, sites] ^= acc.astype(np.uint8)
                energies[lo:hi] += np.where(acc, d, 0.0)

        run_chunks(work)
        return n

    return step


def sa_run(
    q: QuboInstance,
    r: int,
    schedule: AnnealSchedule,
    seed: int,
    checkpoint_every: int | None = None,
    *,
    budget: int | None = None,
    threads: int = 1,
) -> RunTrace:
    """Mirror of ibp_run with one sweep per schedule entry; spin updates
    count n per sweep per replica."""
    return run_schedule(
        q, r, schedule, seed, checkpoint_every, _make_sa_step,
        budget=budget, threads=threads,
    )
