"""Mirror-orientation search.

Instead of 2 angles per mirror the search runs over a single reflected spot
``q = (x, y, h_d)`` on Bob's receive plane: every mirror is turned so that
its centre reflects the source centre onto ``q``.  The spot is optimised
with a seeded particle swarm whose first particle starts on Bob (so the
result never falls below the focus-on-Bob baseline).  Grid searches over
spots and over raw angles serve as independent oracles.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from vlcirs.errors import ValidationError
from vlcirs.geometry import OrientationGrid, mirror_centers, reflect_about_normal, unit
from vlcirs.radiometry import _receiver_terms, irs_gain, los_gain
from vlcirs.scenario import Scenario
from vlcirs.secrecy import secrecy_of_spots, secrecy_rate_lb

__all__ = [
    "FeasibleBox",
    "OptimizationResult",
    "Particle",
    "PsoParams",
    "ReflectedSpot",
    "feasible_box",
    "fob_spot",
    "grid_oracle_spot",
    "implied_spot",
    "orientation_grid_oracle",
    "pso_ii",
    "pso_step",
]


class ReflectedSpot(tuple):
    """Spot centre ``(x, y, h)`` in room coordinates."""

    __slots__ = ()

    def __new__(cls, x: float, y: float, h: float):
        return super().__new__(cls, (float(x), float(y), float(h)))

    x = property(lambda self: self[0])
    y = property(lambda self: self[1])
    h = property(lambda self: self[2])

    def __repr__(self):
        return f"ReflectedSpot(x={self[0]!r}, y={self[1]!r}, h={self[2]!r})"


@dataclass(frozen=True)
class FeasibleBox:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    h: float

    def __post_init__(self):
        if not (self.x_lo <= self.x_hi and self.y_lo <= self.y_hi):
            raise ValidationError("feasible box is empty")

    @property
    def lower(self) -> np.ndarray:
        return np.array([self.x_lo, self.y_lo, self.h])

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.x_hi, self.y_hi, self.h])

    @property
    def extent(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, q, tol: float = 1e-12) -> bool:
        q = np.asarray(q, dtype=float)
        return bool(np.all(q >= self.lower - tol) and np.all(q <= self.upper + tol))

    def clamp(self, q) -> np.ndarray:
        return np.clip(np.asarray(q, dtype=float), self.lower, self.upper)


def feasible_box(sc: Scenario) -> FeasibleBox:
    """Spots on Bob's receive plane inside the room."""
    a = sc.array
    lo = -a.wall_offset + a.offset_x
    hi = sc.room.x_r - a.wall_offset + a.offset_x
    # the source (x = 0) must lie between the side walls
    if lo > hi or lo > 0 or hi < 0:
        raise ValidationError("wall offset places the source outside the room: empty feasible box")
    return FeasibleBox(lo, hi, 0.0, sc.room.y_r, sc.bob.depth)


def fob_spot(sc: Scenario) -> ReflectedSpot:
    """Focus-on-Bob spot: Bob's own position."""
    q = ReflectedSpot(sc.bob.x, sc.bob.y, sc.bob.depth)
    if not feasible_box(sc).contains(q):
        raise ValidationError(f"Bob at {tuple(q)} lies outside the feasible box")
    return q


@dataclass(frozen=True)
class PsoParams:
    swarm_size: int = 30
    max_iterations: int = 100
    inertia: float = 0.729
    learn_personal: float = 1.49445
    learn_global: float = 1.49445
    velocity_clamp: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 1 or self.max_iterations < 1:
            raise ValidationError("swarm_size and max_iterations must be at least 1")
        if not 0 < self.inertia <= 1:
            raise ValidationError("inertia must lie in (0, 1]")
        if self.learn_personal < 0 or self.learn_global < 0:
            raise ValidationError("learning factors must be non-negative")
        if not self.velocity_clamp > 0:
            raise ValidationError("velocity_clamp must be positive")


@dataclass(frozen=True)
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_fitness: float = -math.inf


@dataclass(frozen=True)
class OptimizationResult:
    best_spot: ReflectedSpot
    best_fitness: float
    fitness_trace: tuple = field(default_factory=tuple)
    evaluations: int = 0


def pso_step(p: Particle, gbest, params: PsoParams, r1: float, r2: float, box: FeasibleBox | None = None) -> Particle:
    """One velocity/position update.

    With a ``box``, the velocity is clamped to ``velocity_clamp`` times the
    box extent, the position is clamped to the box and the velocity is zeroed
    on every clamped axis.  The height component never moves.
    """
    w = np.asarray(p.position, dtype=float)
    v = (
        params.inertia * np.asarray(p.velocity, dtype=float)
        + params.learn_personal * r1 * (np.asarray(p.best_position, dtype=float) - w)
        + params.learn_global * r2 * (np.asarray(gbest, dtype=float) - w)
    )
    v[2] = 0.0
    if box is not None:
        vmax = params.velocity_clamp * box.extent
        v = np.clip(v, -vmax, vmax)
    new = w + v
    new[2] = w[2]
    if box is not None:
        clamped = box.clamp(new)
        v = np.where(clamped != new, 0.0, v)
        new = clamped
    return replace(p, position=new, velocity=v)


def pso_ii(sc: Scenario, params: PsoParams = PsoParams(), objective=None) -> OptimizationResult:
    """Particle swarm over reflected spots, first particle seeded on Bob.

    Positions of a whole iteration are evaluated together; personal and
    global bests are then updated in particle order and only on strict
    improvement.  ``objective`` maps an ``(s, 3)`` array of spots to
    fitness values (default: the secrecy bound of ``sc``).
    """
    if objective is None:
        def objective(spots):
            return secrecy_of_spots(sc, spots)

    box = feasible_box(sc)
    rng = np.random.default_rng(params.seed)
    n = params.swarm_size
    pos = np.empty((n, 3))
    pos[0] = fob_spot(sc)
    if n > 1:
        pos[1:, 0] = rng.uniform(box.x_lo, box.x_hi, n - 1)
        pos[1:, 1] = rng.uniform(box.y_lo, box.y_hi, n - 1)
        pos[1:, 2] = box.h
    fit = np.asarray(objective(pos), dtype=float)
    evaluations = n
    particles = [Particle(pos[k].copy(), np.zeros(3), pos[k].copy(), float(fit[k])) for k in range(n)]
    g = 0
    for k in range(1, n):
        if fit[k] > fit[g]:
            g = k
    gbest, gfit = pos[g].copy(), float(fit[g])
    trace = []
    for _ in range(params.max_iterations):
        r = rng.random((n, 2))
        particles = [pso_step(p, gbest, params, r[k, 0], r[k, 1], box) for k, p in enumerate(particles)]
        fit = np.asarray(objective(np.array([p.position for p in particles])), dtype=float)
        evaluations += n
        for k, p in enumerate(particles):
            if fit[k] > p.best_fitness:
                particles[k] = replace(p, best_position=p.position.copy(), best_fitness=float(fit[k]))
            if fit[k] > gfit:
                gbest, gfit = p.position.copy(), float(fit[k])
        trace.append(gfit)
    return OptimizationResult(ReflectedSpot(*gbest), gfit, tuple(trace), evaluations)


def grid_oracle_spot(sc: Scenario, step: float) -> tuple[ReflectedSpot, float]:
    """Exhaustive search over a regular spot grid anchored at the box corner.

    Ties go to the first spot in row-major (x outer, y inner) order.
    """
    if not step > 0:
        raise ValidationError("grid step must be positive")
    box = feasible_box(sc)
    xs = box.x_lo + step * np.arange(int(math.floor((box.x_hi - box.x_lo) / step + 1e-9)) + 1)
    ys = box.y_lo + step * np.arange(int(math.floor((box.y_hi - box.y_lo) / step + 1e-9)) + 1)
    spots = np.array([(x, y, box.h) for x in xs for y in ys])
    values = secrecy_of_spots(sc, spots)
    k = int(np.argmax(values))
    return ReflectedSpot(*spots[k]), float(values[k])


def implied_spot(sc: Scenario, grid: OrientationGrid, i: int = 1, j: int = 1) -> ReflectedSpot:
    """Where mirror ``(i, j)`` (1-based) reflects the source centre onto Bob's plane."""
    center = mirror_centers(sc.array, sc.origin)[i - 1, j - 1]
    n = grid.normals()[i - 1, j - 1]
    out = reflect_about_normal(unit(sc.origin - center), n)
    h = sc.bob.depth
    t = (sc.origin[2] + h - center[2]) / out[2]
    hit = center + t * out - sc.origin
    return ReflectedSpot(hit[0], hit[1] + sc.array.offset_y, h)


def orientation_grid_oracle(
    sc: Scenario, angle_step: float, objective: str = "bob_gain", bound: float = math.pi / 2
) -> tuple[OrientationGrid, float]:
    """Brute force over (roll, yaw) per mirror for arrays of at most 2 mirrors.

    The angle grid covers ``(-bound, bound)`` in steps of ``angle_step``.
    ``objective`` is ``"bob_gain"`` (Bob's IRS gain, returned raw) or
    ``"secrecy"`` (the calibrated bound).  Mirror terms are independent, so
    the gain search runs per mirror; the secrecy search keeps the
    (Bob, Eve) Pareto front of every mirror and combines the fronts.
    """
    a = sc.array
    if a.n_mirrors > 2:
        raise ValidationError("orientation oracle is limited to 2 mirrors")
    if angle_step < math.radians(0.25) - 1e-12:
        raise ValidationError("angle_step must be at least 0.25 degrees")
    if objective not in ("bob_gain", "secrecy"):
        raise ValidationError(f"unknown objective {objective!r}")
    k = int(math.floor(bound / angle_step - 1e-9))
    angles = angle_step * np.arange(-k, k + 1)
    roll, yaw = np.meshgrid(angles, angles, indexing="ij")
    roll, yaw = roll.ravel(), yaw.ravel()
    cells = list(itertools.product(range(a.n_rows), range(a.n_cols)))
    bob_terms, eve_terms = [], []
    for i, j in cells:
        sub = replace(sc, array=replace(a, n_rows=1, n_cols=1, offset_x=a.offset_x + j * a.width,
                                        offset_z=a.offset_z + i * a.height))
        bob_terms.append(_terms_over_angles(sub, roll, yaw, sc.bob))
        eve_terms.append(_terms_over_angles(sub, roll, yaw, sc.eve) if objective == "secrecy" else None)

    def grid_of(choice):
        r = np.zeros(a.shape)
        y = np.zeros(a.shape)
        for (i, j), c in zip(cells, choice):
            r[i, j], y[i, j] = roll[c], yaw[c]
        return OrientationGrid(r, y)

    if objective == "bob_gain":
        choice = [int(np.argmax(t)) for t in bob_terms]
        grid = grid_of(choice)
        return grid, irs_gain(sc, grid, sc.bob)

    los_b, los_e = los_gain(sc, sc.bob), los_gain(sc, sc.eve)
    fronts = [_pareto(b, e) for b, e in zip(bob_terms, eve_terms)]
    best, best_choice = -math.inf, None
    for combo in itertools.product(*fronts):
        hb = los_b + sum(bob_terms[m][c] for m, c in enumerate(combo))
        he = los_e + sum(eve_terms[m][c] for m, c in enumerate(combo))
        rate = secrecy_rate_lb(sc.gain_scale * hb, sc.gain_scale * he, sc.peak, sc.noise_variance)
        if rate > best:
            best, best_choice = rate, combo
    return grid_of(best_choice), best


def _terms_over_angles(sub: Scenario, roll, yaw, user, chunk: int = 8192) -> np.ndarray:
    center = mirror_centers(sub.array, sub.origin).reshape(1, 3)
    p = sub.user_point(user)
    out = np.empty(roll.size)
    for start in range(0, roll.size, chunk):
        sl = slice(start, start + chunk)
        m = roll[sl].size
        out[sl] = _receiver_terms(sub, np.repeat(center, m, axis=0), roll[sl], yaw[sl], p)
    return out


def _pareto(bob, eve) -> list[int]:
    """Indices not dominated in (high Bob gain, low Eve gain); first index wins ties."""
    order = np.lexsort((np.arange(bob.size), eve, -bob))
    front, best_eve = [], math.inf
    for k in order:
        if eve[k] < best_eve:
            front.append(int(k))
            best_eve = eve[k]
    return front
