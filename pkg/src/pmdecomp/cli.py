"""Command line front end: validate | decompose | orbit | plotdata."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import cascade, cellgraph, invariants, oracle
from .invariants import ComplexityExceeded
from .pwmap import BULLET, MAPS_DIR, Model, ModelError, load_model
from .ratset import complement_in, format_rational, intersect

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_COMPLEXITY = 3


@dataclass
class RunConfig:
    command: str
    map: str
    delta: Optional[Fraction] = None
    depth: int = 12
    cascade_m: int = 4
    stages: Optional[int] = None
    cascade_depth: Optional[int] = None
    grid: int = 1000
    steps: int = 500
    samples: int = 8
    orbit_steps: int = 4096
    eps_cover: Optional[Fraction] = None
    out: Optional[str] = None
    oracle_csv: Optional[str] = None
    x: Optional[Fraction] = None
    n: int = 10

    def check(self) -> None:
        for name in ("depth", "cascade_m", "grid", "steps", "samples", "orbit_steps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        for name in ("delta", "eps_cover"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if self.stages is not None and not 1 <= self.stages <= self.cascade_m:
            raise ValueError("--stages must lie between 1 and --cascade-m")

    def parameters(self, model: Model) -> dict:
        delta = self.delta if self.delta is not None else cellgraph.default_delta(model)
        eps = self.eps_cover if self.eps_cover is not None else 4 * delta
        return {
            "delta": format_rational(delta),
            "depth": self.depth,
            "cascade_m": self.cascade_m,
            "stages": self.stages or self.cascade_m,
            "cascade_depth": self.cascade_depth,
            "grid": self.grid,
            "steps": self.steps,
            "transitivity_samples": self.samples,
            "transitivity_steps": self.orbit_steps,
            "eps_cover": format_rational(eps),
        }


def resolve_map(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    bundled = MAPS_DIR / (name if name.endswith(".json") else f"{name}.json")
    if bundled.exists():
        return bundled
    raise FileNotFoundError(f"no map config at {name}")


def model_summary(model: Model) -> dict:
    bps = model.breakpoints
    return {
        "valid": True,
        "domain": [format_rational(model.lo), format_rational(model.hi)],
        "pieces": [
            {
                "interval": [format_rational(bps[k]), format_rational(bps[k + 1])],
                "slope": format_rational(a),
                "intercept": format_rational(b),
                "image": [format_rational(y0), format_rational(y1)],
            }
            for k, ((a, b), (y0, y1)) in enumerate(zip(model.pieces, model.piece_images))
        ],
        "S": model.S.to_json(),
        "checks": {
            "strictly_monotone_pieces": True,
            "maps_into_domain": True,
            "S_contains_breakpoints": True,
            "S_finite": True,
        },
    }


def decompose_report(model: Model, cfg: RunConfig) -> dict:
    """Full decomposition report; raises ComplexityExceeded with ``partial`` set."""
    report = {
        "schema_version": SCHEMA_VERSION,
        "status": "ok",
        "model": model.to_json(),
        "S": model.S.to_json(),
        "parameters": cfg.parameters(model),
    }
    try:
        graph = cellgraph.build(model, cfg.delta)
        decomp = cellgraph.minimal_components(
            model,
            depth=cfg.depth,
            graph=graph,
            samples=cfg.samples,
            steps=cfg.orbit_steps,
            eps_cover=cfg.eps_cover,
        )
        report["sigma"] = {
            "set": decomp.sigma.to_json(),
            "status": decomp.cloud_status,
            "depth": cfg.depth,
            "direction": invariants.UNDER,
        }
        lam = invariants.lambda_S(model, cfg.depth)
        zed = intersect(lam.set, complement_in(decomp.sigma, model.domain))
        report["zed"] = {
            "set": zed.to_json(),
            "status": lam.status,
            "depth": lam.depth,
            "direction": invariants.OVER,
        }
        comps = []
        for comp in decomp.components:
            entry = comp.to_json()
            entry["cascade"] = cascade.summarize(
                graph, comp, cfg.cascade_m, cfg.stages, cfg.cascade_depth
            )
            comps.append(entry)
        report["components"] = comps
        report["component_bound"] = {"component_count": len(comps), "bound": len(model.S)}
        report["cell_count"] = len(graph)
        report["witness_clouds"] = decomp.to_json()["witness_clouds"]
        report["notes"] = list(decomp.notes)

        samples = oracle.sweep(model, cfg.grid, cfg.steps)
        verdict = oracle.validate(decomp, samples, model.S)
        cloud = set()
        for cl in decomp.clouds.values():
            cloud.update(cl.points)
        verdict.max_gap, _ = oracle.gap_statistics(cloud, model.lo, model.hi)
        report["oracle"] = verdict.to_json()
        if cfg.oracle_csv:
            oracle.write_csv(cfg.oracle_csv, samples, decomp)
    except ComplexityExceeded as exc:
        report["status"] = "partial"
        report["error"] = {"error": "ComplexityExceeded", "message": str(exc)}
        exc.partial = report
        raise
    return report


def dump(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_validate(cfg: RunConfig) -> int:
    model = load_model(resolve_map(cfg.map))
    _emit(dump(model_summary(model)), cfg.out)
    return EXIT_OK


def cmd_decompose(cfg: RunConfig) -> int:
    model = load_model(resolve_map(cfg.map))
    try:
        report = decompose_report(model, cfg)
    except ComplexityExceeded as exc:
        _emit(dump(exc.partial), cfg.out)
        return EXIT_COMPLEXITY
    _emit(dump(report), cfg.out)
    return EXIT_OK


def orbit_listing(model: Model, x, n: int) -> List[str]:
    out = []
    for y in model.forward_orbit(Fraction(x), n):
        if y is BULLET:
            out.append("BULLET")
            break
        out.append(format_rational(y))
    return out


def cmd_orbit(cfg: RunConfig) -> int:
    if cfg.x is None:
        raise ValueError("orbit needs --x")
    model = load_model(resolve_map(cfg.map))
    _emit(",".join(orbit_listing(model, cfg.x, cfg.n)) + "\n", cfg.out)
    return EXIT_OK


def cmd_plotdata(cfg: RunConfig) -> int:
    model = load_model(resolve_map(cfg.map))
    outdir = Path(cfg.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    graph = cellgraph.build(model, cfg.delta)
    decomp = cellgraph.minimal_components(model, depth=cfg.depth, graph=graph, transitivity=False)
    with open(outdir / "cobweb.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "fx"])
        for i in range(len(graph)):
            lo, hi = graph.cell(i)
            x = (lo + hi) / 2
            w.writerow([format_rational(x), format_rational(model.eval(x))])
    with open(outdir / "regions.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lo", "hi", "label"])
        for k, comp in enumerate(decomp.components):
            for lo, hi in comp.region:
                w.writerow([format_rational(lo), format_rational(hi), f"component_{k}"])
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "decompose": cmd_decompose,
    "orbit": cmd_orbit,
    "plotdata": cmd_plotdata,
}


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", required=True, help="map config path or bundled name")
    common.add_argument("--delta", type=_rational, help="cell resolution, e.g. 1/256")
    common.add_argument("--depth", type=_positive_int, default=12, help="backward cloud / hull depth")
    common.add_argument("--cascade-m", type=_positive_int, default=4)
    common.add_argument("--stages", type=_positive_int, help="stages used for the core (default: m)")
    common.add_argument("--cascade-depth", type=_positive_int, help="stage saturation depth (default: fixed point)")
    common.add_argument("--grid", type=_positive_int, default=1000)
    common.add_argument("--steps", type=_positive_int, default=500)
    common.add_argument("--samples", type=_positive_int, default=8, help="transitivity orbit samples")
    common.add_argument("--orbit-steps", type=_positive_int, default=4096, help="transitivity orbit length")
    common.add_argument("--eps-cover", type=_rational)
    common.add_argument("--out", help="output file (directory for plotdata)")
    common.add_argument("--oracle-csv", help="write per-start oracle fates here")
    common.add_argument("--x", type=_rational, help="orbit start")
    common.add_argument("--n", type=int, default=10, help="orbit length")

    parser = argparse.ArgumentParser(prog="pmdecomp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    try:
        cfg.check()
        return COMMANDS[cfg.command](cfg)
    except ModelError as exc:
        sys.stdout.write(dump({"valid": False, **exc.to_json()}))
        return EXIT_INVALID
    except (FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        sys.stdout.write(dump({"valid": False, "error": type(exc).__name__, "message": str(exc)}))
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
