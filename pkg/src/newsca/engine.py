"""Synchronous lattice stepper, full-run driver, and seeded ensemble executor.

Every cell's next state is computed from a frozen snapshot of the current
grid, then all cells switch at once. Randomness comes from one seeded
numpy PCG64 generator per run; exactly one uniform draw is consumed per
adoptable cell (white / not-adopted) per step, in row-major cell order,
so seeded runs are bit-reproducible regardless of how ensembles are
scheduled.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .grid import (
    AdoptionState,
    Boundary,
    CellState,
    Grid,
    count_states,
    neighbor_counts,
    neighborhood,
    new_adoption_grid,
    new_grid,
)
from .rules import (
    InnovationRuleParams,
    NewsRuleParams,
    next_innovation_state,
    next_news_state,
)

# Recorded in output manifests; changing the generator breaks reproducibility.
GENERATOR_NAME = "numpy-pcg64"

RuleParams = NewsRuleParams | InnovationRuleParams


@dataclass(frozen=True)
class SimulationConfig:
    """Full description of one simulation; equal configs give identical runs.

    ``seed_position=None`` places the initial seed cell at the grid center.
    ``rule_params`` selects the model: NewsRuleParams for the three-state
    news automaton, InnovationRuleParams for the two-state adoption one.
    """

    width: int = 40
    height: int = 40
    seed_position: tuple[int, int] | None = None
    boundary: Boundary = Boundary.BOUNDED
    rng_seed: int = 0
    max_steps: int = 1000
    rule_params: RuleParams = field(default_factory=NewsRuleParams)
    snapshot_every: int | None = None

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.snapshot_every is not None and self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        if self.seed_position is not None:
            r, c = self.seed_position
            if not (0 <= r < self.height and 0 <= c < self.width):
                raise ValueError(f"seed position {self.seed_position} out of bounds")

    @property
    def is_news(self) -> bool:
        return isinstance(self.rule_params, NewsRuleParams)

    @property
    def field_size(self) -> int:
        return self.width * self.height

    def initial_grid(self) -> Grid:
        maker = new_grid if self.is_news else new_adoption_grid
        return maker(self.width, self.height, self.seed_position, self.boundary)


@dataclass
class Trajectory:
    """Observable record of one run.

    ``counts[t]`` holds the (white, grey, black) cell counts of step ``t``,
    starting from the initial state at ``t = 0``; every row sums to the
    field size. For innovation runs the columns carry (not adopted, 0,
    adopted). ``converged_at`` is the index of the first recorded state
    that is a fixed point (None if max_steps was exhausted first); the
    trajectory ends at that state. ``black_extinct_at`` is the first step
    with no fresh-news cells.
    """

    counts: np.ndarray
    converged_at: int | None
    black_extinct_at: int | None
    snapshots: list[tuple[int, Grid]]
    final_grid: Grid

    @property
    def converged(self) -> bool:
        return self.converged_at is not None

    @property
    def steps(self) -> int:
        return len(self.counts) - 1


@dataclass
class EnsembleResult:
    """Aggregate of independent seeded runs of one configuration.

    ``mean_fractions[t]`` is the across-run mean of (white, grey, black)
    fractions at step ``t``; runs that converge early hold their final
    fractions through the longest run's horizon. Per-run convergence steps
    are kept in full; non-converged runs are flagged, never dropped.
    """

    config: SimulationConfig
    runs: int
    run_seeds: list[int]
    mean_fractions: np.ndarray
    converged_steps: list[int | None]
    black_extinct_steps: list[int | None]
    trajectories: list[Trajectory]

    @property
    def base_seed(self) -> int:
        return self.config.rng_seed

    @property
    def unconverged(self) -> list[int]:
        return [i for i, c in enumerate(self.converged_steps) if c is None]

    def convergence_stats(self) -> tuple[float, float, float] | None:
        """(min, median, max) of converged runs' convergence steps, or None."""
        done = [c for c in self.converged_steps if c is not None]
        if not done:
            return None
        return float(min(done)), float(np.median(done)), float(max(done))


def make_rng(seed: int) -> np.random.Generator:
    """The package-wide generator: PCG64 under the numpy Generator API."""
    return np.random.Generator(np.random.PCG64(seed))


def derive_run_seeds(base_seed: int, runs: int) -> list[int]:
    """Deterministic per-run 64-bit seeds hashed from the base seed.

    Prefix-stable: run ``i`` gets the same seed regardless of ``runs``.
    """
    state = np.random.SeedSequence(base_seed).generate_state(runs, dtype=np.uint64)
    return [int(s) for s in state]


def _step_news(grid: Grid, rng: np.random.Generator, params: NewsRuleParams) -> Grid:
    cells = grid.cells
    white = cells == CellState.WHITE
    grey = cells == CellState.GREY
    black = cells == CellState.BLACK
    white_nb = neighbor_counts(white, grid.boundary)
    new = cells.copy()
    # Deterministic transitions: stale out / forget wherever no white neighbor remains.
    new[black & (white_nb == 0)] = CellState.GREY
    new[grey & (white_nb == 0)] = CellState.WHITE
    # Stochastic adoption: one draw per white cell, row-major.
    rows, cols = np.nonzero(white)
    if rows.size:
        draws = rng.random(rows.size)
        m = neighbor_counts(black, grid.boundary)[rows, cols]
        p_eff = np.where(m < params.boost_below, draws * params.boost_factor, draws)
        fires = p_eff * m > params.adoption_threshold
        new[rows[fires], cols[fires]] = CellState.BLACK
    return Grid(new, grid.boundary)


def _step_innovation(grid: Grid, rng: np.random.Generator, params: InnovationRuleParams) -> Grid:
    cells = grid.cells
    adopted = cells == AdoptionState.ADOPTED
    rows, cols = np.nonzero(~adopted)
    new = cells.copy()
    if rows.size:
        draws = rng.random(rows.size)
        m = neighbor_counts(adopted, grid.boundary)[rows, cols]
        fires = draws * m > params.threshold
        new[rows[fires], cols[fires]] = AdoptionState.ADOPTED
    return Grid(new, grid.boundary)


def step(grid: Grid, step_index: int, rng: np.random.Generator, params: RuleParams) -> Grid:
    """One synchronous update of the whole grid, computed from the old grid.

    ``step_index`` is threaded through for rules that depend on time; the
    built-in rules ignore it beyond the RNG stream position. Consumes one
    uniform draw per adoptable cell, in row-major order of those cells.
    """
    del step_index
    if isinstance(params, NewsRuleParams):
        return _step_news(grid, rng, params)
    return _step_innovation(grid, rng, params)


def step_reference(
    grid: Grid, step_index: int, rng: np.random.Generator, params: RuleParams
) -> Grid:
    """Per-cell slow path: applies the pure rule functions cell by cell.

    Kept for cross-checking the vectorized stepper; both consume the RNG
    stream identically, so results are bit-identical for equal seeds.
    """
    del step_index
    news = isinstance(params, NewsRuleParams)
    new = grid.cells.copy()
    for r in range(grid.height):
        for c in range(grid.width):
            state = int(grid.cells[r, c])
            nb = neighborhood(grid, (r, c))
            if news:
                p = rng.random() if state == CellState.WHITE else 0.0
                new[r, c] = next_news_state(CellState(state), nb, p, params)
            else:
                p = rng.random() if state == AdoptionState.NOT_ADOPTED else 0.0
                new[r, c] = next_innovation_state(AdoptionState(state), nb, p, params)
    return Grid(new, grid.boundary)


def _count_row(grid: Grid, news: bool) -> tuple[int, int, int]:
    if news:
        return count_states(grid)
    not_adopted = int(np.count_nonzero(grid.cells == AdoptionState.NOT_ADOPTED))
    return not_adopted, 0, grid.field_size - not_adopted


def _innovation_frozen(grid: Grid, params: InnovationRuleParams) -> bool:
    # No adoption can ever fire once every not-adopted cell's adopted-neighbor
    # count m satisfies m <= threshold: draws are < 1, so p*m > threshold
    # requires m strictly above it.
    adopted = grid.cells == AdoptionState.ADOPTED
    m = neighbor_counts(adopted, grid.boundary)
    return not bool(np.any(~adopted & (m > params.threshold)))


def run(config: SimulationConfig) -> Trajectory:
    """Run one simulation until it reaches a fixed point or ``max_steps``.

    News runs are declared converged at the first recorded state with no
    black cells that one further (deterministic, since adoption needs a
    black neighbor) step leaves unchanged. Innovation runs are converged
    once no remaining cell can ever adopt. Hitting ``max_steps`` with the
    grid still live is reported distinctly via ``converged_at=None``.
    """
    rng = make_rng(config.rng_seed)
    grid = config.initial_grid()
    news = config.is_news
    counts = [_count_row(grid, news)]
    snapshots: list[tuple[int, Grid]] = []
    every = config.snapshot_every
    if every is not None:
        snapshots.append((0, grid.copy()))

    converged_at: int | None = None
    black_extinct_at: int | None = 0 if news and counts[0][2] == 0 else None
    if not news and _innovation_frozen(grid, config.rule_params):
        converged_at = 0

    t = 0
    while converged_at is None and t < config.max_steps:
        nxt = step(grid, t, rng, config.rule_params)
        t += 1
        row = _count_row(nxt, news)
        if news and row[2] == 0 and nxt == grid:
            # The verification step changed nothing: state t-1 was already
            # the fixed point, so the duplicate row is not recorded.
            converged_at = t - 1
            break
        counts.append(row)
        if news and black_extinct_at is None and row[2] == 0:
            black_extinct_at = t
        if every is not None and t % every == 0:
            snapshots.append((t, nxt.copy()))
        grid = nxt
        if not news and _innovation_frozen(grid, config.rule_params):
            converged_at = t

    return Trajectory(
        counts=np.array(counts, dtype=np.int64),
        converged_at=converged_at,
        black_extinct_at=black_extinct_at,
        snapshots=snapshots,
        final_grid=grid,
    )


def run_ensemble(config: SimulationConfig, runs: int, jobs: int = 1) -> EnsembleResult:
    """Execute ``runs`` independent simulations and average their fractions.

    Per-run seeds come from :func:`derive_run_seeds` on ``config.rng_seed``;
    each run owns a private generator, and aggregation sums in run-index
    order, so the result is identical for any ``jobs`` (thread count).
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    seeds = derive_run_seeds(config.rng_seed, runs)
    configs = [replace(config, rng_seed=s) for s in seeds]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            trajectories = list(pool.map(run, configs))
    else:
        trajectories = [run(c) for c in configs]

    field_size = float(config.field_size)
    horizon = max(len(tr.counts) for tr in trajectories)
    stacked = np.empty((runs, horizon, 3), dtype=np.float64)
    for i, tr in enumerate(trajectories):
        frac = tr.counts / field_size
        stacked[i, : len(frac)] = frac
        stacked[i, len(frac):] = frac[-1]  # hold the fixed point
    mean = stacked.mean(axis=0)

    return EnsembleResult(
        config=config,
        runs=runs,
        run_seeds=seeds,
        mean_fractions=mean,
        converged_steps=[tr.converged_at for tr in trajectories],
        black_extinct_steps=[tr.black_extinct_at for tr in trajectories],
        trajectories=trajectories,
    )
