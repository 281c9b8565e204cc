"""Command line entry point: ``quadloc <verb> --config <path> [--out <dir>]``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bem, io, oracle, sweep
from .config import MODES, RunConfig, load_config
from .geometry import ShapeParams, discretize_boundary
from .metrics import ProbabilityVector, report

logger = logging.getLogger("quadloc")


class _Outputs:
    """Files written during one run, removed again if the run fails."""

    def __init__(self, root: Path):
        self.root = root
        self.created = []
        self._made_root = not root.exists()
        root.mkdir(parents=True, exist_ok=True)

    def path(self, name) -> Path:
        p = self.root / name
        self.created.append(p)
        return p

    def discard(self):
        for p in self.created:
            p.unlink(missing_ok=True)
        if self._made_root and not any(self.root.iterdir()):
            self.root.rmdir()


def _report_dict(rep):
    return {"N": rep.N, "ipr": rep.ipr, "shannon": rep.shannon,
            "shannon_inv": rep.shannon_inv,
            "renyi": {str(a): v for a, v in rep.renyi.items()},
            "rms_contrast": rep.rms_contrast}


def oracle_table(cfg: RunConfig):
    """Rows ``(index, bessel, bem, fd)``; ``bessel`` is None off the circle."""
    params = ShapeParams(cfg.epsilon, cfg.refractive_index)
    mesh = discretize_boundary(params, cfg.elements)
    bem_k = [m.k for m in bem.find_eigenvalues(mesh, cfg.k_window, cfg.scan_step,
                                                cfg.refine_tol, workers=cfg.workers)]
    fd_k = oracle.fd_eigensolve(params, cfg.fd_h, cfg.fd_count)
    exact = oracle.disk_eigenvalues(cfg.fd_count) if cfg.epsilon == 0 else None
    rows = []
    for i in range(cfg.fd_count):
        rows.append((i + 1,
                     exact[i] if exact else None,
                     bem_k[i] if i < len(bem_k) else None,
                     fd_k[i]))
    return rows


def _cell(v):
    return "-" if v is None else f"{v:.6f}"


def run_oracle(cfg: RunConfig, out: _Outputs):
    print("Bessel zeros j_{m,s}")
    print("m   " + "  ".join(f"s={s:<9d}" for s in (1, 2, 3)))
    for m in range(4):
        print(f"{m:<3d} " + "  ".join(f"{z.value:<11.6f}" for z in oracle.bessel_zeros(m, 3)))
    print()
    rows = oracle_table(cfg)
    print(f"eigen-wavenumbers at epsilon={cfg.epsilon} "
          f"(BEM M={cfg.elements}, FD h={cfg.fd_h})")
    print(f"{'#':>3} {'bessel':>10} {'bem':>10} {'fd':>10} {'bem_rel':>10} {'fd_rel':>10}")
    lines = ["index,bessel,bem,fd"]
    for i, ex, b, f in rows:
        ref = ex if ex is not None else b
        rel_b = "-" if ex is None or b is None else f"{(b - ex) / ex:.2e}"
        rel_f = "-" if ref is None else f"{(f - ref) / ref:.2e}"
        print(f"{i:>3} {_cell(ex):>10} {_cell(b):>10} {_cell(f):>10} {rel_b:>10} {rel_f:>10}")
        lines.append(",".join([str(i)] + ["" if v is None else io.fmt(v) for v in (ex, b, f)]))
    out.path("oracle.csv").write_text("\n".join(lines) + "\n")


def run_modes(cfg: RunConfig, out: _Outputs):
    params = ShapeParams(cfg.epsilon, cfg.refractive_index)
    mesh = discretize_boundary(params, cfg.elements)
    modes = bem.find_eigenvalues(mesh, cfg.k_window, cfg.scan_step, cfg.refine_tol,
                                 workers=cfg.workers)
    grid = bem.GridSpec.for_shape(params, cfg.grid_resolution)
    mask = bem.interior_mask(mesh, grid)
    summary = []
    for i, mode in enumerate(modes):
        field = bem.interior_field(mesh, mode, grid, mask)
        rep = report(ProbabilityVector(field.values), cfg.alphas)
        stem = f"mode_{i:02d}"
        io.write_intensity_grid(field, out.path(stem + ".grid"))
        if cfg.emit_heatmaps:
            io.write_heatmap(field, out.path(stem + ".pgm"), cfg.heatmap_gamma)
        entry = {"index": i, "epsilon": cfg.epsilon, "k": mode.k,
                 "sigma_min": mode.sigma_min, "degenerate": mode.degeneracy_flag}
        entry.update(_report_dict(rep))
        summary.append(entry)
        print(f"{stem}: k={mode.k:.9f} sigma={mode.sigma_min:.2e} "
              f"I={rep.ipr:.6g} H_S={rep.shannon:.6g} C={rep.rms_contrast:.6g}"
              + (" (degenerate)" if mode.degeneracy_flag else ""))
    out.path("modes.json").write_text(json.dumps(summary, indent=2) + "\n")


def run_metrics(cfg: RunConfig, out: _Outputs):
    field = io.read_intensity_grid(cfg.input_grid)
    rep = report(ProbabilityVector(field.values), cfg.alphas)
    text = json.dumps(_report_dict(rep), indent=2)
    print(text)
    out.path("report.json").write_text(text + "\n")


def run_sweep(cfg: RunConfig, out: _Outputs):
    result = sweep.run_sweep(cfg.sweep_config())
    io.write_sweep_csv(result, out.path("sweep.csv"))
    print(f"avoided crossing centre epsilon_ac={result.epsilon_ac:.6f}, "
          f"min gap={result.min_gap:.6g}")
    if cfg.emit_heatmaps:
        recs = result.pair.records
        i_ac = int(np.argmin(np.abs(result.pair.epsilons - result.epsilon_ac)))
        for tag, rec in (("start", recs[0]), ("center", recs[i_ac]), ("end", recs[-1])):
            for label in sweep.LABELS:
                io.write_heatmap(rec.field(label), out.path(f"{tag}_{label}.pgm"),
                                 cfg.heatmap_gamma)
    return result


VERBS = {"oracle": run_oracle, "modes": run_modes, "metrics": run_metrics, "sweep": run_sweep}


def run(cfg: RunConfig) -> int:
    out = _Outputs(Path(cfg.output_dir))
    try:
        VERBS[cfg.mode](cfg, out)
    except Exception as exc:
        out.discard()
        _fail(exc)
        return 1
    return 0


def _fail(exc):
    msg = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(msg), file=sys.stderr)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="quadloc", description=__doc__.splitlines()[0])
    ap.add_argument("verb", choices=MODES)
    ap.add_argument("--config", required=True, help="flat YAML/JSON run configuration")
    ap.add_argument("--out", help="output directory (overrides output_dir)")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, mode=args.verb)
    except Exception as exc:
        _fail(exc)
        return 2
    if args.out:
        cfg = cfg.replace(output_dir=args.out)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
