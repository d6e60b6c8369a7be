"""Window experiments on oracle graphs.

Two observables: the residual (fraction of interior vertices the windowed
pipeline leaves unresolved) and the overlap disagreement between matchings
computed independently on two overlapping windows.
"""

from __future__ import annotations

import csv
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from statistics import median
from typing import Iterable, Sequence

from .errors import UnsupportedParameters
from .generators import OracleGraph, Window, window
from .graph import BipartiteMultigraph, FractionalMatching
from .pipeline import PARITY_CONDITION, lemma_main
from .rounding import random_sigma, sigma_round
from .trees import augment_matching

# local solver used by the overlap experiment: a few rounds on cycles through
# at most LOCAL_BRANCH branch vertices, then augmenting paths
LOCAL_BRANCH = 6
LOCAL_ROUNDS = 3


@dataclass(frozen=True)
class ResidualReport:
    window_id: str
    radius: int
    interior: int
    unresolved: int

    @property
    def residual(self) -> Fraction:
        if self.interior == 0:
            return Fraction(1)
        return Fraction(self.unresolved, self.interior)

    def row(self, experiment: str = "residual") -> dict:
        r = self.residual
        return {
            "experiment": experiment,
            "radius": self.radius,
            "center": self.window_id,
            "interior": self.interior,
            "unresolved": self.unresolved,
            "residual_num": r.numerator,
            "residual_den": r.denominator,
        }


CSV_COLUMNS = ("experiment", "radius", "center", "interior", "unresolved", "residual_num", "residual_den")


def window_matching(W: Window, seed: int) -> set[int]:
    """Matching of a window computed from the window alone.

    The uniform fractional perfect matching gets ``LOCAL_ROUNDS`` local
    cycle-alternation rounds (seeded by ``seed``), edges above 1/2 are taken,
    and the rest is completed by shortest augmenting paths with the boundary
    optional.  Every tie is broken by ids, which come from the seeded
    labelling, so two windows with the same seed break ties the same way.
    On an even grid nothing is above 1/2 after alternation along a path,
    so there everything is decided by the augmentation.
    """
    G = W.graph
    f = FractionalMatching.uniform(G, W.oracle.degree)
    f = sigma_round(f, random_sigma(seed, LOCAL_ROUNDS), max_branch=LOCAL_BRANCH)
    start = [e for e, w in f.weights.items() if 2 * w > f.denominator]
    edges, _ = augment_matching(G, start, G.boundary)
    return edges


def _center_rng(seed: int, m: int, spread: int = 1000) -> tuple[random.Random, tuple[int, ...]]:
    rng = random.Random(seed)
    return rng, tuple(rng.randrange(-spread, spread) for _ in range(m))


def residual_report(G: BipartiteMultigraph, d: int, window_id: str, radius: int) -> ResidualReport:
    """Run the full pipeline on ``G`` (k = 1) and count unresolved interior vertices."""
    interior = G.interior()
    if not interior:
        return ResidualReport(window_id, radius, 0, 0)
    out = lemma_main(FractionalMatching.uniform(G, d))
    return ResidualReport(window_id, radius, len(interior), len(out.unresolved & set(interior)))


def window_residual(O: OracleGraph, center: Sequence[int], radius: int, seed: int | None = None) -> ResidualReport:
    W = window(O, center, radius, seed)
    return residual_report(W.graph, O.degree, str(W.center), radius)


def _residual_task(args: tuple) -> list[ResidualReport]:
    O, radii, s = args
    _, c = _center_rng(s, O.m)
    return [window_residual(O, c, r, s) for r in radii]


def window_residual_experiment(
    O: OracleGraph, radii: Iterable[int], seeds: Iterable[int], k: int = 1, jobs: int = 1
) -> list[ResidualReport]:
    """One report per (seed, radius); the seed fixes both the center and the labelling."""
    if O.degree % 2 == 0 and k % 2 == 1:
        raise UnsupportedParameters(PARITY_CONDITION)
    if k != 1:
        raise UnsupportedParameters("window experiments run the perfect-matching pipeline only (k = 1)")
    radii = list(radii)
    tasks = [(O, radii, s) for s in seeds]
    return [rep for reps in _map(_residual_task, tasks, jobs) for rep in reps]


def median_residuals(reports: Iterable[ResidualReport]) -> dict[int, Fraction]:
    by_r: dict[int, list[Fraction]] = {}
    for rep in reports:
        by_r.setdefault(rep.radius, []).append(rep.residual)
    return {r: median(v) for r, v in sorted(by_r.items())}


def _partners(W: Window, edges: Iterable[int]) -> dict:
    lab = W.graph.labels
    assert lab is not None
    out = {}
    for e in edges:
        u, v = W.graph.edges[e]
        out[lab[u]] = lab[v]
        out[lab[v]] = lab[u]
    return out


def _core(W: Window, half: int) -> set:
    assert W.graph.labels is not None
    return {
        lab
        for lab in W.graph.labels.values()
        if all(abs(a - b) <= half for a, b in zip(lab[0], W.center))
    }


@dataclass(frozen=True)
class OverlapReport:
    radius: int
    centers: tuple[tuple[int, ...], tuple[int, ...]]
    core: int  # vertices in the shared core
    disagree: int  # core vertices whose partners differ
    components: int
    disagreement: float  # mean over core components of the disagreeing fraction

    def row(self) -> dict:
        r = Fraction(self.disagree, self.core) if self.core else Fraction(0)
        return {
            "experiment": "parity",
            "radius": self.radius,
            "center": f"{self.centers[0]}->{self.centers[1]}",
            "interior": self.core,
            "unresolved": self.disagree,
            "residual_num": r.numerator,
            "residual_den": r.denominator,
        }


def overlap_disagreement(O: OracleGraph, radius: int, seed: int) -> OverlapReport:
    """Solve two windows shifted by at most radius/2 and compare them on the shared core.

    The core of a window is its sub-box of radius ``radius // 2``.  Each
    connected component of the shared core (in the oracle graph) scores the
    fraction of its vertices whose partners differ; the report averages
    those scores.
    """
    rng, c1 = _center_rng(seed, O.m)
    half = radius // 2
    c2 = tuple(a + rng.randint(-half, half) for a in c1)
    W1, W2 = window(O, c1, radius, seed), window(O, c2, radius, seed)
    p1 = _partners(W1, window_matching(W1, seed))
    p2 = _partners(W2, window_matching(W2, seed))
    core = _core(W1, half) & _core(W2, half)
    scores = []
    total = 0
    seen: set = set()
    for start in sorted(core):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        i = 0
        while i < len(comp):
            p, side = comp[i]
            i += 1
            for q, s in O.neighbors(p, side):
                lab = (q, s.value)
                if lab in core and lab not in seen:
                    seen.add(lab)
                    comp.append(lab)
        bad = sum(1 for x in comp if p1.get(x) != p2.get(x))
        total += bad
        scores.append(bad / len(comp))
    mean = sum(scores) / len(scores) if scores else 0.0
    return OverlapReport(radius, (c1, c2), len(core), total, len(scores), mean)


def _overlap_task(args: tuple) -> OverlapReport:
    return overlap_disagreement(*args)


def parity_obstruction_experiment(
    O: OracleGraph, radii: Iterable[int], seeds: Iterable[int], jobs: int = 1
) -> list[OverlapReport]:
    """One overlap report per (radius, seed)."""
    seeds = list(seeds)
    return _map(_overlap_task, [(O, r, s) for r in radii for s in seeds], jobs)


def mean_disagreement(reports: Iterable[OverlapReport]) -> dict[int, float]:
    by_r: dict[int, list[float]] = {}
    for rep in reports:
        by_r.setdefault(rep.radius, []).append(rep.disagreement)
    return {r: sum(v) / len(v) for r, v in sorted(by_r.items())}


def _map(fn, tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks))


def write_csv(path: str, rows: Iterable[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow(row)
