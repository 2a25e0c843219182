"""Particle swarm optimization over the unit hypercube.

The swarm minimizes a black-box fitness with the standard velocity and
position update; the cognitive coefficient, social coefficient, and
inertia weight are interpolated linearly over the run (cognitive high to
low, social low to high, inertia high to low), shifting the swarm from
exploration of personal bests toward exploitation of the global best.

Randomness is split into named streams: particle i draws its
initialization from SeedSequence(seed, spawn_key=(0, i)) and its update
at iteration k (1-based) from SeedSequence(seed, spawn_key=(k, i)).
This makes the draws independent of evaluation order, so serial and
parallel runs produce bit-identical results.
"""

from __future__ import annotations

import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .util import worker_count


@dataclass
class SwarmConfig:
    """Swarm size, budget, and coefficient schedules.

    All four schedules interpolate linearly from their start value at
    iteration 0 to their end value at the final iteration.  The velocity
    clamp shrinks over the run for the same reason the inertia does:
    wide early moves explore, small late moves let the swarm settle onto
    the best basin instead of jittering around it.
    """

    dimensions: int
    n_particles: int = 50
    iterations: int = 100
    c1_start: float = 2.5
    c1_end: float = 0.5
    c2_start: float = 0.5
    c2_end: float = 2.5
    w_start: float = 0.9
    w_end: float = 0.4
    v_max: float = 0.08
    v_max_end: float = 0.005
    seed: int = 0

    def __post_init__(self):
        if self.dimensions < 1:
            raise ValueError("dimensions must be positive")
        if self.n_particles < 1:
            raise ValueError("n_particles must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if self.c1_start < self.c1_end:
            raise ValueError("cognitive coefficient must not increase over the run")
        if self.c2_start > self.c2_end:
            raise ValueError("social coefficient must not decrease over the run")
        if self.w_start < self.w_end:
            raise ValueError("inertia weight must not increase over the run")
        if not 0.0 < self.v_max <= 1.0:
            raise ValueError(f"v_max must be in (0, 1], got {self.v_max}")
        if not 0.0 < self.v_max_end <= self.v_max:
            raise ValueError(
                f"v_max_end must be in (0, v_max], got {self.v_max_end}"
            )


@dataclass
class ParticleState:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_fitness: float


@dataclass
class SwarmResult:
    best_position: np.ndarray
    best_fitness: float
    history: list[tuple[float, float]] = field(default_factory=list)  # (gbest, mean)


def schedule(start: float, end: float, iteration: int, total: int) -> float:
    """Linear interpolation from start (iteration 0) to end (iteration total-1)."""
    if not 0 <= iteration < total:
        raise ValueError(f"iteration {iteration} outside [0, {total})")
    if total == 1:
        return start
    return start + (end - start) * iteration / (total - 1)


def _particle_rng(seed: int, iteration: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(iteration, index)))


def step(particles: Sequence[ParticleState], gbest: np.ndarray,
         c1: float, c2: float, w: float, v_max: float,
         rngs: Sequence[np.random.Generator]) -> Sequence[ParticleState]:
    """One synchronous move of the whole swarm.

    Per coordinate: v <- w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x) with
    fresh uniform draws r1, r2, then v is clamped to [-v_max, v_max] and
    x to [0, 1].  ``gbest`` is frozen for the duration of the call.
    """
    d = gbest.shape[0]
    for particle, rng in zip(particles, rngs):
        if particle.position.shape[0] != d:
            raise ValueError("particle dimension does not match gbest")
        r1 = rng.uniform(size=d)
        r2 = rng.uniform(size=d)
        velocity = (w * particle.velocity
                    + c1 * r1 * (particle.best_position - particle.position)
                    + c2 * r2 * (gbest - particle.position))
        np.clip(velocity, -v_max, v_max, out=velocity)
        particle.velocity = velocity
        particle.position = np.clip(particle.position + velocity, 0.0, 1.0)
    return particles


def _evaluate_all(fitness: Callable[[np.ndarray], float],
                  particles: Sequence[ParticleState],
                  iteration: int, workers: int) -> list[float]:
    positions = [p.position.copy() for p in particles]
    try:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(fitness, positions))
        return [fitness(x) for x in positions]
    except Exception as exc:
        raise RuntimeError(f"fitness evaluation failed at iteration {iteration}") from exc


def optimize(fitness: Callable[[np.ndarray], float], config: SwarmConfig,
             progress: bool = True) -> SwarmResult:
    """Minimize ``fitness`` over [0, 1]^d.

    Every particle is evaluated once at initialization and once per
    iteration; personal and global bests update on strict improvement
    only, and the global best used for a move is the one settled at the
    end of the previous iteration.  Fixed seed implies bit-identical
    results, regardless of worker count.
    """
    d = config.dimensions
    particles = []
    for i in range(config.n_particles):
        rng = _particle_rng(config.seed, 0, i)
        position = rng.uniform(0.0, 1.0, size=d)
        velocity = rng.uniform(-config.v_max, config.v_max, size=d)
        particles.append(ParticleState(position, velocity, position.copy(), np.inf))

    workers = min(worker_count(), config.n_particles)
    values = _evaluate_all(fitness, particles, 0, workers)
    for particle, value in zip(particles, values):
        particle.best_fitness = value
        particle.best_position = particle.position.copy()
    best_index = int(np.argmin(values))
    gbest = particles[best_index].position.copy()
    gbest_fitness = values[best_index]

    history: list[tuple[float, float]] = []
    for k in range(config.iterations):
        c1 = schedule(config.c1_start, config.c1_end, k, config.iterations)
        c2 = schedule(config.c2_start, config.c2_end, k, config.iterations)
        w = schedule(config.w_start, config.w_end, k, config.iterations)
        v_max = schedule(config.v_max, config.v_max_end, k, config.iterations)
        rngs = [_particle_rng(config.seed, k + 1, i) for i in range(config.n_particles)]
        step(particles, gbest, c1, c2, w, v_max, rngs)

        values = _evaluate_all(fitness, particles, k + 1, workers)
        for particle, value in zip(particles, values):
            if value < particle.best_fitness:
                particle.best_fitness = value
                particle.best_position = particle.position.copy()
        for particle in particles:  # reduce in particle-index order
            if particle.best_fitness < gbest_fitness:
                gbest_fitness = particle.best_fitness
                gbest = particle.best_position.copy()

        mean_fitness = float(np.mean(values))
        history.append((float(gbest_fitness), mean_fitness))
        if progress:
            print(
                f"iter={k} gbest={gbest_fitness:.6g} mean={mean_fitness:.6g} "
                f"c1={c1:.4g} c2={c2:.4g} w={w:.4g}",
                file=sys.stderr,
            )

    return SwarmResult(gbest, float(gbest_fitness), history)


def write_history_csv(result: SwarmResult, path) -> None:
    """Persist per-iteration history as iteration,gbest_fitness,mean_fitness."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("iteration,gbest_fitness,mean_fitness\n")
        for k, (gbest, mean) in enumerate(result.history):
            handle.write(f"{k},{gbest!r},{mean!r}\n")
