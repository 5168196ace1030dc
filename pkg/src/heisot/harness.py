"""Suite configuration, the seeded suite runner, and trajectory export.

Runs are deterministic: every property derives its own generator stream from the
global seed and a stable hash of the property name, so results do not depend on
execution order and two runs with the same configuration produce byte-identical
reports.  Properties may be executed concurrently; they share no mutable state.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import jsonio
from .geodesics import GeodesicCurve
from .suites import REGISTRY, PropertyResult, available_suites

__all__ = [
    "SuiteConfig",
    "SuiteReport",
    "DEFAULT_TOLERANCES",
    "load_config",
    "property_rng",
    "run_suite",
    "export_curve",
]

#: Default tolerances per property; a SuiteConfig may override any entry.
DEFAULT_TOLERANCES = {
    "core.left_invariance": 1e-9,
    "core.projection_optimality": 1e-10,
    "core.alignment_additivity": 1e-9,
    "core.dilation_homogeneity": 1e-12,
    "measures.pushforward_mass": 1e-13,
    "measures.jordan_disjoint": 1e-12,
    "transport.triangle_inequality": 1e-8,
    "transport.translation_invariance": 1e-9,
    "transport.permutation_oracle": 1e-10,
    "transport.gluing": 1e-8,
    "geodesics.right_translation_optimal": 1e-8,
    "geodesics.dilation_ray_speed": 1e-8,
    "geodesics.vertical_ray_endpoint": 1e-8,
    "geodesics.unique_midpoint": 1e-9,
    "radon.identification": 1e-6,
    "radon.weight_preservation": 1e-12,
    "radon.hyperplane": 1e-9,
    "lifting.cost_equality": 1e-12,
    "lifting.projection_contraction": 1e-12,
    "lifting.end_to_end": 1e-8,
    "rigidity.projection_parametrization": 1e-10,
    "rigidity.step4": 1e-12,
    "rigidity.vertical_gap": 1e-9,
    "rigidity.exotic_line_metric": 1e-9,
}


@dataclass(frozen=True)
class SuiteConfig:
    """Seed, workload, and tolerance settings for the verification suites."""

    seed: int = 0
    trials: int = 50
    tolerances: Mapping[str, float] = field(default_factory=dict)
    p_values: tuple = (1.0, 1.5, 2.0, 4.0)
    dims: tuple = (1, 2)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if not self.p_values or any(not 1.0 <= p <= 8.0 for p in self.p_values):
            raise ValueError(f"p_values must lie in [1, 8], got {self.p_values}")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError(f"dims must be positive, got {self.dims}")
        for name, value in dict(self.tolerances).items():
            if value <= 0.0:
                raise ValueError(f"tolerance {name} must be positive, got {value}")

    def tolerance(self, name: str, default: float) -> float:
        if name in self.tolerances:
            return float(self.tolerances[name])
        return float(DEFAULT_TOLERANCES.get(name, default))


def load_config(path: str, **overrides) -> SuiteConfig:
    """Read a flat key=value configuration file.

    Recognized keys: seed, trials, p_values (comma list), dims (comma list), and
    tol.<property> entries.  Keyword overrides win over file values.
    """
    values: dict = {"tolerances": {}}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "seed":
                values["seed"] = int(value)
            elif key == "trials":
                values["trials"] = int(value)
            elif key == "p_values":
                values["p_values"] = tuple(float(v) for v in value.split(","))
            elif key == "dims":
                values["dims"] = tuple(int(v) for v in value.split(","))
            elif key.startswith("tol."):
                values["tolerances"][key[4:]] = float(value)
            else:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    return SuiteConfig(**values)


def property_rng(config: SuiteConfig, name: str) -> np.random.Generator:
    """The generator stream owned by one property: seed split by a name hash."""
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return np.random.default_rng([config.seed, int.from_bytes(digest[:8], "big")])


@dataclass(frozen=True)
class SuiteReport:
    seed: int
    trials: int
    results: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_obj(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "results": [r.to_obj() for r in self.results],
        }

    def to_json(self) -> str:
        return jsonio.dumps(self.to_obj())

    def summary_lines(self) -> list[str]:
        lines = []
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            lines.append(
                f"[{status}] {r.name}: max deviation {r.max_deviation:.3e} "
                f"(tol {r.tol:.1e}, trials {r.trials})"
                + (f" - {r.detail}" if r.detail else "")
            )
        return lines


def _select(selector: str) -> list[str]:
    if selector == "all":
        return available_suites()
    if selector in REGISTRY:
        return [selector]
    prefixed = [name for name in available_suites() if name.startswith(selector + ".")]
    if prefixed:
        return prefixed
    raise ValueError(
        f"unknown suite selector {selector!r}; available: all, "
        + ", ".join(available_suites())
    )


def run_suite(config: SuiteConfig, selector: str = "all", jobs: int = 1) -> SuiteReport:
    """Run the selected properties; deterministic for a fixed configuration."""
    names = _select(selector)

    def run_one(name: str) -> PropertyResult:
        return REGISTRY[name](config, property_rng(config, name))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_one, names))
    else:
        results = [run_one(name) for name in names]
    results.sort(key=lambda r: r.name)
    return SuiteReport(seed=config.seed, trials=config.trials, results=tuple(results))


def export_curve(
    curve: GeodesicCurve, t0: float, t1: float, steps: int, fmt: str = "csv"
) -> str:
    """Serialize equally spaced slices of a curve; bit-stable for fixed inputs.

    CSV rows are (t, atom_index, x..., y..., z, w); JSON is a list of
    {"t": ..., "measure": ...} slices.
    """
    if steps < 2:
        raise ValueError(f"need at least 2 steps, got {steps}")
    t0, t1 = float(t0), float(t1)
    if t0 > t1:
        raise ValueError(f"empty parameter range [{t0}, {t1}]")
    if t0 < curve.t_min - 1e-12 or t1 > curve.t_max + 1e-12:
        raise ValueError(
            f"range [{t0}, {t1}] leaves the curve domain "
            f"[{curve.t_min}, {curve.t_max}]"
        )
    ts = np.linspace(t0, t1, steps)
    slices = [(float(t), curve.at(float(t))) for t in ts]
    if fmt == "json":
        return jsonio.dumps(
            [{"t": t, "measure": jsonio.measure_to_obj(mu)} for t, mu in slices]
        )
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}, expected csv or json")
    n = slices[0][1].dim
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = (
        ["t", "atom"]
        + [f"x{i}" for i in range(n)]
        + [f"y{i}" for i in range(n)]
        + ["z", "w"]
    )
    writer.writerow(header)
    for t, mu in slices:
        for i in range(mu.num_atoms):
            row = (
                [repr(t), str(i)]
                + [repr(float(v)) for v in mu.xs[i]]
                + [repr(float(v)) for v in mu.ys[i]]
                + [repr(float(mu.zs[i])), repr(float(mu.ws[i]))]
            )
            writer.writerow(row)
    return buffer.getvalue()
