"""Checks for the hypotheses behind the coupled fixed point machinery.

Finite spaces are checked exhaustively, so verdicts are conclusive. Boxes are
checked on a deterministic sample (a coordinate grid plus seeded uniform
draws), so a clean pass is reported as ``undetermined-sampled``: sampling can
falsify a universally quantified hypothesis but never prove it. Two
exceptions are conclusive everywhere:

* ``check_seed`` evaluates two concrete applications, nothing more;
* a chain returned by ``find_epsilon_chain`` is a genuine certificate, valid
  in the full space even when its waypoints came from a grid.

Every violated verdict carries a witness that can be re-checked with a single
direct evaluation. Enumeration orders are fixed (lexicographic in point
indices, sample order on boxes) so witnesses are reproducible and comparable
across independent implementations.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError, SamplingError
from .mappings import CoupledMap, TableMap
from .spaces import (
    BoxSpace,
    FiniteSpace,
    Point,
    Space,
    point_jsonable,
)

HOLDS = "holds"
VIOLATED = "violated"
SAMPLED = "undetermined-sampled"

_GRID_CAP = 20000


@dataclass(frozen=True)
class SamplingPlan:
    """Deterministic sample description: grid resolution plus seeded draws."""

    grid_step: float | None = None
    random_count: int = 0
    seed: int = 0


@dataclass(frozen=True)
class HypothesisReport:
    hypothesis: str
    verdict: str
    witness: object = None
    sample_size: int | None = None
    sample_seed: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict != VIOLATED

    def as_dict(self) -> dict:
        out = {
            "hypothesis": self.hypothesis,
            "verdict": self.verdict,
            "witness": self.witness,
            "sample_seed": self.sample_seed,
            "sample_size": self.sample_size,
        }
        for key, value in self.details.items():
            if key == "chain_n":
                continue  # raw tuple-keyed table; summarized by max_n
            if key == "unreachable":
                value = [[point_jsonable(p), point_jsonable(q)] for p, q in value]
            out[key] = value
        return out


@dataclass(frozen=True)
class ContractivityReport:
    """Result of scanning admissible quadruples (x, u, y, v) with x >= u, y <= v.

    ``lambda_hat`` is the supremum of 2 d(F(x,y), F(u,v)) / (d(x,u) + d(y,v))
    over the tested quadruples when no ratio reached 1; on a violation the
    scan stops and ``witness`` is the first offending quadruple in
    enumeration order (``lambda_hat`` is then unknown and left None).
    """

    epsilon: float
    lambda_hat: float | None
    violated: bool
    witness: tuple | None
    pairs_tested: int
    mode: str  # "exhaustive" | "sampled"
    vacuous: bool = False
    sample_size: int | None = None
    sample_seed: int | None = None

    @property
    def passed(self) -> bool:
        return not self.violated

    @property
    def verdict(self) -> str:
        if self.violated:
            return VIOLATED
        return HOLDS if self.mode == "exhaustive" else SAMPLED

    def as_dict(self) -> dict:
        witness = self.witness
        if witness is not None:
            witness = [point_jsonable(p) for p in witness]
        return {
            "hypothesis": "uniform-local-contraction",
            "verdict": self.verdict,
            "epsilon": self.epsilon,
            "lambda_hat": self.lambda_hat,
            "witness": witness,
            "pairs_tested": self.pairs_tested,
            "mode": self.mode,
            "vacuous": self.vacuous,
            "sample_seed": self.sample_seed,
            "sample_size": self.sample_size,
        }


@dataclass(frozen=True)
class Chain:
    """Order-ascending chain whose consecutive gaps are all below epsilon."""

    points: tuple[Point, ...]
    epsilon: float

    @property
    def n(self) -> int:
        return len(self.points) - 1

    def validate(self, space: Space) -> None:
        if not self.points:
            raise DomainError("a chain needs at least one point")
        for a, b in zip(self.points, self.points[1:]):
            if not space.leq(a, b):
                raise DomainError(f"chain step {a!r} -> {b!r} is not ascending")
            if not space.distance(a, b) < self.epsilon:
                raise DomainError(
                    f"chain gap d({a!r}, {b!r}) is not below {self.epsilon!r}"
                )


def sample_points(space: Space, plan: SamplingPlan | None = None) -> list[Point]:
    """All points of a finite space; grid plus seeded uniforms on a box."""
    if isinstance(space, FiniteSpace):
        return list(space.points())
    plan = plan or SamplingPlan()
    pts: list[Point] = []
    if plan.grid_step is not None:
        if plan.grid_step <= 0:
            raise SamplingError(f"grid_step must be positive, got {plan.grid_step!r}")
        axes = []
        for lo, hi in zip(space.lower, space.upper):
            vals = [lo]
            k = 1
            while lo + k * plan.grid_step < hi - 1e-12:
                vals.append(lo + k * plan.grid_step)
                k += 1
            if vals[-1] != hi:
                vals.append(hi)
            axes.append(vals)
        total = 1
        for a in axes:
            total *= len(a)
        if total > _GRID_CAP:
            raise SamplingError(
                f"grid of {total} points exceeds the cap of {_GRID_CAP}"
            )
        pts.extend(tuple(c) for c in itertools.product(*axes))
    if plan.random_count:
        rng = random.Random(plan.seed)
        for _ in range(plan.random_count):
            pts.append(
                tuple(
                    lo + rng.random() * (hi - lo)
                    for lo, hi in zip(space.lower, space.upper)
                )
            )
    if not pts:
        raise SamplingError(
            "sampling plan produced no points (need grid_step or random_count)"
        )
    return list(dict.fromkeys(pts))


def _plan_fields(space, plan, pts):
    if isinstance(space, FiniteSpace):
        return None, None
    plan = plan or SamplingPlan()
    return len(pts), plan.seed


def _memo_apply(cmap: CoupledMap):
    cache: dict = {}
    def f(x, y):
        key = (x, y)
        out = cache.get(key)
        if out is None:
            out = cmap.apply(x, y)
            cache[key] = out
        return out
    return f


def check_mixed_monotone(
    cmap: CoupledMap, plan: SamplingPlan | None = None
) -> HypothesisReport:
    """Scan for a violation of mixed monotonicity.

    First branch: x1 <= x2 must give F(x1, y) <= F(x2, y) for every y.
    Second branch: y1 <= y2 must give F(x, y1) >= F(x, y2) for every x.
    """
    space = cmap.space
    if isinstance(cmap, TableMap):
        L = space.order
        T = cmap.table
        n = space.size
        for x1 in range(n):
            for x2 in range(n):
                if x1 == x2 or not L[x1][x2]:
                    continue
                for y in range(n):
                    if not L[T[x1][y]][T[x2][y]]:
                        return _monotone_violation(cmap, "first-argument", x1, x2, y)
        for x in range(n):
            for y1 in range(n):
                for y2 in range(n):
                    if y1 == y2 or not L[y1][y2]:
                        continue
                    if not L[T[x][y2]][T[x][y1]]:
                        return _monotone_violation(cmap, "second-argument", y1, y2, x)
        return HypothesisReport("mixed-monotone", HOLDS)
    pts = sample_points(space, plan)
    size, seed = _plan_fields(space, plan, pts)
    f = _memo_apply(cmap)
    leq = space.leq
    for x1 in pts:
        for x2 in pts:
            if x1 == x2 or not leq(x1, x2):
                continue
            for y in pts:
                if not leq(f(x1, y), f(x2, y)):
                    return _monotone_violation(
                        cmap, "first-argument", x1, x2, y, size, seed
                    )
    for x in pts:
        for y1 in pts:
            for y2 in pts:
                if y1 == y2 or not leq(y1, y2):
                    continue
                if not leq(f(x, y2), f(x, y1)):
                    return _monotone_violation(
                        cmap, "second-argument", y1, y2, x, size, seed
                    )
    return HypothesisReport(
        "mixed-monotone", SAMPLED, sample_size=size, sample_seed=seed
    )


def _monotone_violation(cmap, branch, a1, a2, other, size=None, seed=None):
    if branch == "first-argument":
        witness = {
            "branch": branch,
            "x1": point_jsonable(a1),
            "x2": point_jsonable(a2),
            "y": point_jsonable(other),
            "F(x1,y)": point_jsonable(cmap.apply(a1, other)),
            "F(x2,y)": point_jsonable(cmap.apply(a2, other)),
        }
    else:
        witness = {
            "branch": branch,
            "y1": point_jsonable(a1),
            "y2": point_jsonable(a2),
            "x": point_jsonable(other),
            "F(x,y1)": point_jsonable(cmap.apply(other, a1)),
            "F(x,y2)": point_jsonable(cmap.apply(other, a2)),
        }
    return HypothesisReport(
        "mixed-monotone", VIOLATED, witness, sample_size=size, sample_seed=seed
    )


def estimate_contraction(
    cmap: CoupledMap, epsilon: float, plan: SamplingPlan | None = None
) -> ContractivityReport:
    """Supremum of the contraction ratio over admissible quadruples.

    A quadruple (x, u, y, v) is admissible when x >= u, y <= v, the mean
    distance (d(x,u) + d(y,v)) / 2 is strictly below epsilon, and the
    distances are not both zero. Enumeration is lexicographic: (x, u) pairs
    ascending, then (y, v) pairs ascending, matching the exhaustive oracle,
    and the scan stops at the first ratio >= 1.
    """
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon!r}")
    space = cmap.space
    if isinstance(cmap, TableMap):
        n = space.size
        L = space.order
        D = space.dist
        T = cmap.table
        xu_pairs = [(x, u) for x in range(n) for u in range(n) if L[u][x]]
        yv_pairs = [(y, v) for y in range(n) for v in range(n) if L[y][v]]
        best = -1.0
        best_w = None
        tested = 0
        for x, u in xu_pairs:
            dxu = D[x][u]
            tx = T[x]
            tu = T[u]
            for y, v in yv_pairs:
                s = dxu + D[y][v]
                if s <= 0 or not s / 2.0 < epsilon:
                    continue
                tested += 1
                r = 2.0 * D[tx[y]][tu[v]] / s
                if r >= 1.0:
                    return ContractivityReport(
                        epsilon, None, True, (x, u, y, v), tested, "exhaustive"
                    )
                if r > best:
                    best = r
                    best_w = (x, u, y, v)
        if tested == 0:
            raise SamplingError(
                f"no admissible quadruple at epsilon={epsilon!r}: "
                "epsilon is below the resolution of the space"
            )
        return ContractivityReport(epsilon, best, False, best_w, tested, "exhaustive")
    pts = sample_points(space, plan)
    size, seed = _plan_fields(space, plan, pts)
    f = _memo_apply(cmap)
    leq = space.leq
    dist = space.distance
    xu_pairs = [(x, u) for x in pts for u in pts if leq(u, x)]
    yv_pairs = [(y, v) for y in pts for v in pts if leq(y, v)]
    best = -1.0
    best_w = None
    tested = 0
    for x, u in xu_pairs:
        dxu = dist(x, u)
        for y, v in yv_pairs:
            s = dxu + dist(y, v)
            if s <= 0 or not s / 2.0 < epsilon:
                continue
            tested += 1
            r = 2.0 * dist(f(x, y), f(u, v)) / s
            if r >= 1.0:
                return ContractivityReport(
                    epsilon, None, True, (x, u, y, v), tested, "sampled",
                    sample_size=size, sample_seed=seed,
                )
            if r > best:
                best = r
                best_w = (x, u, y, v)
    if tested == 0:
        raise SamplingError(
            f"no admissible quadruple in the sample at epsilon={epsilon!r}: "
            "epsilon is too small for the sample resolution"
        )
    return ContractivityReport(
        epsilon, best, False, best_w, tested, "sampled",
        sample_size=size, sample_seed=seed,
    )


def _candidate_list(
    space: Space,
    candidates: Optional[Sequence[Point]],
    extra: Iterable[Point] = (),
) -> list[Point]:
    if candidates is None:
        if isinstance(space, BoxSpace):
            raise DomainError("box spaces need an explicit candidate point list")
        cand = list(space.points())
    else:
        cand = list(candidates)
        for p in cand:
            space.validate_point(p)
    for p in extra:
        cand.append(p)
    return list(dict.fromkeys(cand))


def _epsilon_adjacency(space, cand, epsilon):
    # edge p -> q iff p <= q and d(p, q) < epsilon; hops of a chain
    n = len(cand)
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, p in enumerate(cand):
        for j, q in enumerate(cand):
            if i != j and space.leq(p, q) and space.distance(p, q) < epsilon:
                adj[i].append(j)
    return adj


def _bfs_hops(adj: list[list[int]], src: int) -> list[int | None]:
    hops: list[int | None] = [None] * len(adj)
    hops[src] = 0
    queue = deque([src])
    while queue:
        i = queue.popleft()
        for j in adj[i]:
            if hops[j] is None:
                hops[j] = hops[i] + 1
                queue.append(j)
    return hops


def find_epsilon_chain(
    space: Space,
    a: Point,
    b: Point,
    epsilon: float,
    candidates: Optional[Sequence[Point]] = None,
) -> Chain | None:
    """Minimum-hop ascending chain from a to b with every gap below epsilon.

    Runs a breadth-first search over the candidate points (all points of a
    finite space by default; a declared grid for boxes, with a and b always
    added), so the returned chain has minimal n over those waypoints and
    never repeats a point. Returns None when no chain exists.
    """
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon!r}")
    space.validate_point(a)
    space.validate_point(b)
    if not space.leq(a, b):
        raise DomainError("chain endpoints must satisfy a <= b")
    if a == b:
        return Chain((a,), epsilon)
    cand = _candidate_list(space, candidates, extra=(a, b))
    index = {p: i for i, p in enumerate(cand)}
    adj = _epsilon_adjacency(space, cand, epsilon)
    src, dst = index[a], index[b]
    parent: dict[int, int] = {src: src}
    queue = deque([src])
    while queue:
        i = queue.popleft()
        if i == dst:
            break
        for j in adj[i]:
            if j not in parent:
                parent[j] = i
                queue.append(j)
    if dst not in parent:
        return None
    path = [dst]
    while path[-1] != src:
        path.append(parent[path[-1]])
    path.reverse()
    return Chain(tuple(cand[i] for i in path), epsilon)


def check_epsilon_chainable(
    space: Space,
    epsilon: float,
    candidates: Optional[Sequence[Point]] = None,
) -> HypothesisReport:
    """Minimal chain length for every comparable candidate pair.

    Violated when some comparable pair admits no chain at all (the witness is
    the first such pair in index order); otherwise the report carries the
    largest minimal n, which is what the decay bound consumes. The full
    per-pair table is kept in ``details["chain_n"]``.

    On candidate sets (boxes, or an explicit list) a missing link is not
    conclusive: the space may hold waypoints the sample lacks, so the verdict
    stays ``undetermined-sampled`` with the failing pair recorded.
    """
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon!r}")
    cand = _candidate_list(space, candidates)
    adj = _epsilon_adjacency(space, cand, epsilon)
    table: dict[tuple[Point, Point], int] = {}
    unreachable: list[tuple[Point, Point]] = []
    for i, p in enumerate(cand):
        hops = _bfs_hops(adj, i)
        for j, q in enumerate(cand):
            if not space.leq(p, q):
                continue
            if hops[j] is None:
                unreachable.append((p, q))
            else:
                table[(p, q)] = hops[j]
    max_n = max(table.values(), default=0)
    exhaustive = isinstance(space, FiniteSpace) and candidates is None
    details = {
        "epsilon": epsilon,
        "max_n": max_n,
        "chain_n": table,
        "unreachable": tuple(unreachable),
        "candidates": len(cand),
    }
    if unreachable:
        p, q = unreachable[0]
        witness = [point_jsonable(p), point_jsonable(q)]
        verdict = VIOLATED if exhaustive else SAMPLED
        return HypothesisReport(
            "epsilon-chainable", verdict, witness, details=details
        )
    verdict = HOLDS if exhaustive else SAMPLED
    return HypothesisReport("epsilon-chainable", verdict, details=details)


def check_seed(cmap: CoupledMap, x0: Point, y0: Point) -> HypothesisReport:
    """Launch condition x0 <= F(x0, y0) and y0 >= F(y0, x0).

    Two concrete applications, so the verdict is conclusive on any space.
    """
    space = cmap.space
    fx = cmap.apply(x0, y0)
    fy = cmap.apply(y0, x0)
    ok_x = space.leq(x0, fx)
    ok_y = space.leq(fy, y0)
    if ok_x and ok_y:
        return HypothesisReport("seed-condition", HOLDS)
    witness = {
        "x0": point_jsonable(x0),
        "y0": point_jsonable(y0),
        "F(x0,y0)": point_jsonable(fx),
        "F(y0,x0)": point_jsonable(fy),
        "x0_leq_F(x0,y0)": ok_x,
        "F(y0,x0)_leq_y0": ok_y,
    }
    return HypothesisReport("seed-condition", VIOLATED, witness)


def _leq_matrix(space, cand) -> np.ndarray:
    s = len(cand)
    M = np.zeros((s, s), dtype=bool)
    for i, p in enumerate(cand):
        for j, q in enumerate(cand):
            M[i, j] = space.leq(p, q)
    return M


def check_common_comparable(
    space: Space, candidates: Optional[Sequence[Point]] = None
) -> HypothesisReport:
    """Every two product points must share a product point comparable to both.

    Product points are ordered pairs of candidates under the product order
    (first component ascending, second descending). Exhaustive on finite
    spaces. On box grids even a failure is reported as sampled: a missing
    grid witness says nothing about the full box.
    """
    cand = _candidate_list(space, candidates)
    s = len(cand)
    M = _leq_matrix(space, cand)
    # C[(z1,z2),(x,y)]: (z1,z2) comparable to (x,y) in the product order
    below = M[:, None, :, None] & M.T[None, :, None, :]
    above = M.T[:, None, :, None] & M[None, :, None, :]
    C = (below | above).reshape(s * s, s * s).astype(np.float32)
    linked = (C @ C) > 0  # C is symmetric: comparability is
    bad = np.argwhere(~linked)
    exhaustive = isinstance(space, FiniteSpace) and candidates is None
    if bad.size:
        p_flat, q_flat = (int(v) for v in bad[0])
        pi, pj = divmod(p_flat, s)
        qi, qj = divmod(q_flat, s)
        witness = {
            "pair1": [point_jsonable(cand[pi]), point_jsonable(cand[pj])],
            "pair2": [point_jsonable(cand[qi]), point_jsonable(cand[qj])],
        }
        verdict = VIOLATED if exhaustive else SAMPLED
        return HypothesisReport(
            "common-comparable", verdict, witness,
            sample_size=None if exhaustive else s,
        )
    verdict = HOLDS if exhaustive else SAMPLED
    return HypothesisReport(
        "common-comparable", verdict, sample_size=None if exhaustive else s
    )


def check_pair_bounds(
    space: Space, candidates: Optional[Sequence[Point]] = None
) -> HypothesisReport:
    """Every two candidate points must have a common upper or lower bound."""
    cand = _candidate_list(space, candidates)
    s = len(cand)
    M = _leq_matrix(space, cand).astype(np.float32)
    upper = (M @ M.T) > 0  # some z with p <= z and q <= z
    lower = (M.T @ M) > 0  # some z with z <= p and z <= q
    ok = upper | lower
    bad = np.argwhere(~ok)
    exhaustive = isinstance(space, FiniteSpace) and candidates is None
    if bad.size:
        i, j = (int(v) for v in bad[0])
        witness = [point_jsonable(cand[i]), point_jsonable(cand[j])]
        verdict = VIOLATED if exhaustive else SAMPLED
        return HypothesisReport(
            "pair-bounds", verdict, witness,
            sample_size=None if exhaustive else s,
        )
    verdict = HOLDS if exhaustive else SAMPLED
    return HypothesisReport(
        "pair-bounds", verdict, sample_size=None if exhaustive else s
    )
