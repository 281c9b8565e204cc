"""Deformation sweep through an avoided crossing.

Each deformation step is solved independently (optionally in parallel);
the two modes found in the wavenumber window are then labelled ``red`` and
``blue`` by a sequential pass that pairs each step with the previous one by
maximal interior-field overlap.

A crossing narrower than the step rotates the mode pair by more than 45
degrees between samples, and overlap pairing then jumps to the diabatic
branch.  When a pairing leaves a large cross-label overlap the interval is
bisected with extra solves that follow the pair continuously; those
intermediate steps enter the tracking chain but not the records.
"""
from __future__ import annotations

import functools
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bem
from .errors import BoundaryWarning, ConfigurationError, DomainError, TrackingError
from .geometry import ShapeParams, bounding_box, discretize_boundary
from .metrics import DEFAULT_ALPHAS, LocalizationReport, ProbabilityVector, report

logger = logging.getLogger(__name__)

LABELS = ("red", "blue")
#: Pairing is abandoned when both matched overlaps fall below this.
LOST_TRACK_OVERLAP = 0.3
#: A pairing whose larger cross-label overlap exceeds this is refined.
SUBSTEP_CROSS_OVERLAP = 0.35
METRICS = ("ipr", "shannon", "shannon_inv", "rms_contrast")


@dataclass(frozen=True)
class SweepConfig:
    epsilon_start: float = 0.085
    epsilon_stop: float = 0.097
    steps: int = 13
    k_window: tuple = (21.13, 21.45)
    elements: int = 300
    grid_resolution: int = bem.DEFAULT_GRID
    alphas: tuple = DEFAULT_ALPHAS
    scan_step: float = bem.DEFAULT_SCAN_STEP
    refine_tol: float = bem.DEFAULT_REFINE_TOL
    refractive_index: float = 1.0
    workers: int = 1
    #: bisection depth allowed when a pairing is ambiguous (0 disables)
    max_refinements: int = 4

    def __post_init__(self):
        if not self.epsilon_start < self.epsilon_stop:
            raise ConfigurationError("epsilon_start must be below epsilon_stop")
        if self.steps < 3:
            raise ConfigurationError(f"steps must be >= 3, got {self.steps}")
        lo, hi = self.k_window
        if not 0 < lo < hi:
            raise ConfigurationError(f"k_window must satisfy 0 < lo < hi, got {self.k_window}")
        if self.scan_step <= 0 or self.refine_tol <= 0:
            raise ConfigurationError("scan_step and refine_tol must be positive")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        if self.max_refinements < 0:
            raise ConfigurationError("max_refinements must be >= 0")
        # validates the deformation window too
        ShapeParams(self.epsilon_start, self.refractive_index)
        ShapeParams(self.epsilon_stop, self.refractive_index)

    def epsilons(self):
        return np.linspace(self.epsilon_start, self.epsilon_stop, self.steps)

    def grid(self) -> bem.GridSpec:
        """One grid shared by every step, covering the widest boundary."""
        ext = [bounding_box(ShapeParams(e)) for e in (self.epsilon_start, self.epsilon_stop)]
        half_x = max(e[0] for e in ext)
        half_y = max(e[1] for e in ext)
        return bem.GridSpec.covering(half_x, half_y, self.grid_resolution)


@dataclass
class SolvedStep:
    epsilon: float
    modes: list
    fields: list
    reports: list
    mesh: object = field(default=None, repr=False)


@dataclass
class StepRecord:
    epsilon: float
    k_red: float
    k_blue: float
    gap: float
    report_red: LocalizationReport
    report_blue: LocalizationReport
    mode_red: bem.ModeSolution = field(default=None, repr=False)
    mode_blue: bem.ModeSolution = field(default=None, repr=False)
    field_red: bem.IntensityField = field(default=None, repr=False)
    field_blue: bem.IntensityField = field(default=None, repr=False)
    #: overlaps with the previous step: [[red-red, red-blue], [blue-red, blue-blue]]
    overlaps: np.ndarray = field(default=None, repr=False)

    def report(self, label) -> LocalizationReport:
        return self.report_red if label == "red" else self.report_blue

    def k(self, label) -> float:
        return self.k_red if label == "red" else self.k_blue

    def field(self, label) -> bem.IntensityField:
        return self.field_red if label == "red" else self.field_blue


@dataclass(frozen=True)
class ChainLink:
    """One pairing of the tracking chain, between any two solved steps."""
    epsilon_from: float
    epsilon_to: float
    #: [[red-red, red-blue], [blue-red, blue-blue]] after labelling
    overlaps: np.ndarray

    @property
    def cross(self) -> float:
        return float(max(self.overlaps[0, 1], self.overlaps[1, 0]))


@dataclass
class TrackedPair:
    records: list
    chain: list = field(default_factory=list)

    @property
    def refined_epsilons(self):
        """Intermediate deformations solved only to keep the labels continuous."""
        rec = {r.epsilon for r in self.records}
        return sorted({c.epsilon_to for c in self.chain} - rec)

    @property
    def epsilons(self):
        return np.array([r.epsilon for r in self.records])

    @property
    def gaps(self):
        return np.array([r.gap for r in self.records])

    def metric(self, label, name):
        """Curve of one report field (``"renyi_2.0"`` selects a Renyi order)."""
        if name.startswith("renyi_"):
            a = float(name.split("_", 1)[1])
            return np.array([r.report(label).renyi[a] for r in self.records])
        return np.array([getattr(r.report(label), name) for r in self.records])


@dataclass
class SweepResult:
    pair: TrackedPair
    epsilon_ac: float
    min_gap: float
    config: SweepConfig = None


def solve_step(epsilon, config: SweepConfig, grid: bem.GridSpec) -> SolvedStep:
    params = ShapeParams(float(epsilon), config.refractive_index)
    mesh = discretize_boundary(params, config.elements)
    modes = bem.find_eigenvalues(mesh, config.k_window, config.scan_step, config.refine_tol)
    if len(modes) != 2:
        ks = ", ".join(f"{m.k:.6f}" for m in modes)
        raise TrackingError(
            f"expected 2 modes in k_window {tuple(config.k_window)} at epsilon={epsilon:.6g}, "
            f"found {len(modes)} [{ks}]")
    mask = bem.interior_mask(mesh, grid)
    fields = [bem.interior_field(mesh, m, grid, mask) for m in modes]
    reports = [report(ProbabilityVector(f.values), config.alphas) for f in fields]
    return SolvedStep(float(epsilon), modes, fields, reports, mesh)


def _solve_star(args):
    return solve_step(*args)


def solve_all(config: SweepConfig):
    grid = config.grid()
    jobs = [(e, config, grid) for e in config.epsilons()]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_solve_star, jobs))
    out = []
    for job in jobs:
        out.append(solve_step(*job))
        logger.info("solved epsilon=%.6f: k=%s", job[0], [round(m.k, 6) for m in out[-1].modes])
    return out


def _label_overlaps(prev, st):
    """Overlap matrix of labelled ``prev`` fields against raw ``st`` fields."""
    return np.array([[bem.mode_overlap(prev[lab], st.fields[j], common_mask=True)
                      for j in (0, 1)] for lab in LABELS])


def _pair(prev, st):
    O = _label_overlaps(prev, st)
    order = [0, 1] if O[0, 0] + O[1, 1] >= O[0, 1] + O[1, 0] else [1, 0]
    return order, O[:, order]


def track(steps, refine=None, max_refinements=4) -> TrackedPair:
    """Label the two modes of each step by overlap continuity.

    The first step is labelled in k order (``red`` is the lower mode).

    Parameters
    ----------
    steps : sequence of SolvedStep
        Steps in increasing deformation.
    refine : callable, optional
        ``refine(epsilon) -> SolvedStep``.  When given, an interval whose
        pairing leaves a cross-label overlap above
        :data:`SUBSTEP_CROSS_OVERLAP` is bisected, up to ``max_refinements``
        levels, and the labels are carried through the intermediate solves.
    max_refinements : int
        Bisection depth limit.
    """
    records = []
    chain = []

    def advance(prev, prev_eps, st, depth):
        order, O = _pair(prev, st)
        link = ChainLink(prev_eps, st.epsilon, O)
        if refine is not None and depth < max_refinements and link.cross > SUBSTEP_CROSS_OVERLAP:
            mid_eps = 0.5 * (prev_eps + st.epsilon)
            logger.info("refining pairing %.6g -> %.6g (cross overlap %.3f)",
                        prev_eps, st.epsilon, link.cross)
            mid = refine(mid_eps)
            mid_order = advance(prev, prev_eps, mid, depth + 1)
            mid_lab = {lab: mid.fields[j] for lab, j in zip(LABELS, mid_order)}
            return advance(mid_lab, mid_eps, st, depth + 1)
        if max(O[0, 0], O[1, 1]) < LOST_TRACK_OVERLAP:
            raise TrackingError(
                f"lost track at epsilon={st.epsilon:.6g}: overlaps {(O[0, 0], O[1, 1])}")
        chain.append(link)
        return order

    prev = None
    for st in steps:
        overlaps = None
        if prev is None:
            order = [0, 1] if st.modes[0].k <= st.modes[1].k else [1, 0]
        else:
            labelled = {lab: prev.field(lab) for lab in LABELS}
            order = advance(labelled, prev.epsilon, st, 0)
            overlaps = _label_overlaps(labelled, st)[:, order]
        r, b = order
        rec = StepRecord(
            epsilon=st.epsilon,
            k_red=st.modes[r].k, k_blue=st.modes[b].k,
            gap=abs(st.modes[r].k - st.modes[b].k),
            report_red=st.reports[r], report_blue=st.reports[b],
            mode_red=st.modes[r], mode_blue=st.modes[b],
            field_red=st.fields[r], field_blue=st.fields[b],
            overlaps=overlaps,
        )
        records.append(rec)
        prev = rec
    return TrackedPair(records, chain)


def label_continuity_holds(pair: TrackedPair) -> bool:
    """Same-label overlap dominates cross-label overlap along the chain.

    The chain contains every pairing made, including refinement steps; a
    pair without a chain is checked on its consecutive records.
    """
    mats = [c.overlaps for c in pair.chain] or [r.overlaps for r in pair.records[1:]]
    for O in mats:
        if O[0, 0] < O[0, 1] or O[1, 1] < O[1, 0]:
            return False
    return True


def detect_gap_minimum(series):
    """Centre of the avoided crossing from ``(epsilon, gap)`` samples.

    The discrete minimum is refined by the vertex of the parabola through it
    and its two neighbours.  A minimum at either end of the series cannot be
    refined; a :class:`BoundaryWarning` is issued and the endpoint returned.
    """
    pts = sorted((float(e), float(g)) for e, g in series)
    if len(pts) < 3:
        raise DomainError("need at least 3 samples to locate a gap minimum")
    eps = np.array([p[0] for p in pts])
    gap = np.array([p[1] for p in pts])
    i = int(np.argmin(gap))
    if i == 0 or i == len(gap) - 1:
        warnings.warn(f"gap minimum at sweep endpoint epsilon={eps[i]:.6g}; "
                      "crossing centre not bracketed", BoundaryWarning, stacklevel=2)
        return float(eps[i]), float(gap[i])
    x0, x1, x2 = eps[i - 1:i + 2]
    y0, y1, y2 = gap[i - 1:i + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    c = (x1 * x2 * (x1 - x2) * y0 + x2 * x0 * (x2 - x0) * y1 + x0 * x1 * (x0 - x1) * y2) / denom
    if a <= 0:
        return float(x1), float(y1)
    xv = -b / (2 * a)
    xv = min(max(xv, x0), x2)
    return float(xv), float(a * xv * xv + b * xv + c)


def exchange_diagnostic(pair: TrackedPair, metric: str, epsilon_ac: float = None) -> float:
    """Score in [-1, 1] for how far two labels swap a metric across the sweep.

    With ``d_same`` the summed change of each label between the first and
    last step and ``d_cross`` the summed distance of each label's final
    value from the *other* label's initial value, the score is
    ``(d_same - d_cross) / (d_same + d_cross)``: +1 for a complete exchange,
    -1 when nothing changes, 0 when both distances vanish.
    """
    eps = pair.epsilons
    if epsilon_ac is None:
        epsilon_ac, _ = detect_gap_minimum(zip(eps, pair.gaps))
    if not eps[0] < epsilon_ac < eps[-1]:
        raise DomainError(f"sweep [{eps[0]}, {eps[-1]}] does not bracket epsilon_ac={epsilon_ac}")
    red = pair.metric("red", metric)
    blue = pair.metric("blue", metric)
    d_same = abs(red[-1] - red[0]) + abs(blue[-1] - blue[0])
    d_cross = abs(red[-1] - blue[0]) + abs(blue[-1] - red[0])
    total = d_same + d_cross
    if total == 0:
        return 0.0
    return float((d_same - d_cross) / total)


def run_sweep(config: SweepConfig) -> SweepResult:
    steps = solve_all(config)
    refine = functools.partial(solve_step, config=config, grid=config.grid())
    pair = track(steps, refine=refine, max_refinements=config.max_refinements)
    eps_ac, min_gap = detect_gap_minimum(zip(pair.epsilons, pair.gaps))
    return SweepResult(pair=pair, epsilon_ac=eps_ac, min_gap=min_gap, config=config)
