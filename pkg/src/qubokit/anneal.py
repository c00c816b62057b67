"""Annealing schedules, the replica ensemble, and the shared run driver.

Both solvers are Markov chains over the same ensemble machinery: R replica
states with cached energies and one independent RNG stream per replica,
all derived from a single master seed.  The driver walks a beta schedule,
counts per-replica spin updates, and records (spin_updates, best, median,
p01) checkpoints.

Budget semantics: with budget=None every schedule entry gets exactly one
step (the literal reading of the algorithm's loop over betas).  With a
spin-update budget B, the schedule is progress-indexed: a step starting at
u per-replica updates runs at betas[floor(u * len(betas) / B)], and the run
stops once u >= B, overshooting by less than one step.  budget=0 performs
no steps and yields the initial checkpoint only.

Thread parallelism chunks the replica axis.  Every replica owns its RNG
stream and all arithmetic is row-local, so results are byte-identical for
any thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .qubo import QuboInstance, energy_batch


@dataclass
class AnnealSchedule:
    """Ordered positive inverse temperatures, optionally with the geometric
    descriptor (beta_start, beta_end, steps) that generated them."""

    betas: np.ndarray
    kind: tuple[float, float, int] | None = None

    def __post_init__(self) -> None:
        self.betas = np.asarray(self.betas, dtype=np.float64)
        if self.betas.ndim != 1:
            raise ValueError("betas must be a 1-d sequence")
        if self.betas.size and not (
            np.isfinite(self.betas).all() and (self.betas > 0).all()
        ):
            raise ValueError("all betas must be finite and > 0")

    def __len__(self) -> int:
        return int(self.betas.size)


def geometric_schedule(beta_start: float, beta_end: float, steps: int) -> AnnealSchedule:
    """betas[t] = beta_start * (beta_end/beta_start)^(t/(steps-1))."""
    if not (beta_start > 0 and beta_end > 0):
        raise ValueError(f"betas must be > 0, got ({beta_start}, {beta_end})")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if steps == 1:
        betas = np.array([beta_start], dtype=np.float64)
    else:
        betas = np.geomspace(beta_start, beta_end, steps)
    return AnnealSchedule(betas, kind=(float(beta_start), float(beta_end), int(steps)))


class Checkpoint(NamedTuple):
    spin_updates: int
    best: float
    median: float
    p01: float


@dataclass
class RunTrace:
    """Checkpoint series plus final and best-ever states of a run."""

    checkpoints: list[Checkpoint]
    final_states: np.ndarray
    best_state: np.ndarray
    best_energy: float


@dataclass
class ReplicaEnsemble:
    """R binary states with cached energies and per-replica RNG streams."""

    states: np.ndarray
    energies: np.ndarray
    rngs: list[np.random.Generator]

    @property
    def r(self) -> int:
        return int(self.states.shape[0])

    @classmethod
    def initialize(
        cls, q: QuboInstance, r: int, seed: int | np.random.SeedSequence
    ) -> "ReplicaEnsemble":
        """Fair-coin states, each replica drawn from its own stream."""
        if r < 1:
            raise ValueError(f"replica count must be >= 1, got {r}")
        ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        rngs = [np.random.default_rng(s) for s in ss.spawn(r)]
        states = np.stack([rng.random(q.n) < 0.5 for rng in rngs]).astype(np.uint8)
        return cls(states, energy_batch(q, states), rngs)


# A step function advances the whole ensemble at one beta and returns the
# per-replica spin-update count of that step.
StepFn = Callable[[float], int]
# A chunk runner maps fn(lo, hi) over a fixed partition of the replica axis.
ChunkRunner = Callable[[Callable[[int, int], None]], None]


def run_schedule(
    q: QuboInstance,
    r: int,
    schedule: AnnealSchedule,
    seed: int,
    checkpoint_every: int | None,
    make_step: Callable[[QuboInstance, ReplicaEnsemble, np.random.Generator, ChunkRunner], StepFn],
    *,
    budget: int | None = None,
    threads: int = 1,
) -> RunTrace:
    """Drive make_step's kernel over the schedule; see module docstring."""
    if r < 1:
        raise ValueError(f"replica count must be >= 1, got {r}")
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    if checkpoint_every is not None and checkpoint_every < 1:
        raise ValueError(f"checkpoint_every must be >= 1, got {checkpoint_every}")
    betas = schedule.betas
    if budget is not None:
        if budget < 0:
            raise ValueError(f"budget must be >= 0, got {budget}")
        if budget > 0 and betas.size == 0:
            raise ValueError("empty schedule with a nonzero budget")

    root = np.random.SeedSequence(seed)
    chain_rng = np.random.default_rng(root.spawn(1)[0])
    ens = ReplicaEnsemble.initialize(q, r, root)

    threads = min(threads, r)
    cuts = np.linspace(0, r, threads + 1).astype(int)
    bounds = [(int(cuts[t]), int(cuts[t + 1])) for t in range(threads)]
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None

    def run_chunks(fn: Callable[[int, int], None]) -> None:
        if pool is None:
            fn(0, r)
        else:
            for _ in pool.map(lambda b: fn(*b), bounds):
                pass

    try:
        step = make_step(q, ens, chain_rng, run_chunks)

        best_pos = int(np.argmin(ens.energies))
        best_e = float(ens.energies[best_pos])
        best_x = ens.states[best_pos].copy()
        checkpoints: list[Checkpoint] = []
        u = 0

        def record() -> None:
            med, p01 = np.percentile(ens.energies, [50.0, 1.0])
            checkpoints.append(Checkpoint(u, best_e, float(med), float(p01)))

        record()
        n_betas = betas.size

        def advance(beta: float) -> None:
            nonlocal u, best_e, best_x
            m = step(float(beta))
            before = u
            u += m
            cur_pos = int(np.argmin(ens.energies))
            if ens.energies[cur_pos] < best_e:
                best_e = float(ens.energies[cur_pos])
                best_x = ens.states[cur_pos].copy()
            if checkpoint_every is None:
                record()
            elif u // checkpoint_every > before // checkpoint_every:
                record()

        if budget is None:
            for beta in betas:
                advance(beta)
        else:
            while u < budget:
                idx = min(u * n_betas // budget, n_betas - 1)
                advance(betas[idx])
        if checkpoints[-1].spin_updates != u:
            record()
    finally:
        if pool is not None:
            pool.shutdown(wait=True)

    return RunTrace(checkpoints, ens.states.copy(), best_x, best_e)
