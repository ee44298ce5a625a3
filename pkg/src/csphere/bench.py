"""Seeded Monte Carlo benchmarking of detector configurations.

An experiment sweeps an SNR grid, drawing fresh (channel, symbols, noise)
triples per trial from per-trial substreams keyed on (master_seed,
snr_index, trial_index). Every detector in a cell sees the identical
instance, so comparisons are paired. Accumulation runs in trial order, so
results are a pure function of the experiment spec: reruns produce
byte-identical output files regardless of the worker count (set via the
CSPHERE_WORKERS environment variable).
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from configparser import ConfigParser

import numpy as np

from . import constellation as cmod
from .channel import make_instance, snr_db_to_sigma2, substream_rng
from .constellation import Constellation
from .engine import DetectorConfig, preprocess, search
from .errors import ConfigError
from .linalg import qr_givens

CSV_HEADER = (
    "detector",
    "snr_db",
    "mean_flops",
    "stderr_flops",
    "ser",
    "mean_ped",
    "mean_cc",
    "mean_restarts",
    "trials",
)

WORKERS_ENV_VAR = "CSPHERE_WORKERS"

DETECTOR_ALIASES = {
    "sd": ("plain-sd", "natural"),
    "plain-sd": ("plain-sd", "natural"),
    "se-sd": ("se-sd", "natural"),
    "sesd": ("se-sd", "natural"),
    "csd": ("csd", "natural"),
    "c-csd": ("c-csd", "natural"),
    "ccsd": ("c-csd", "natural"),
    "pinv-sesd": ("se-sd", "pinv"),
    "pinv-se-sd": ("se-sd", "pinv"),
    "pinv-ccsd": ("c-csd", "pinv"),
    "pac-ccsd": ("c-csd", "pac-full"),
    "mpac-ccsd": ("c-csd", "pac-modified"),
}

_RANK_RESAMPLE_LIMIT = 100


@dataclass(frozen=True)
class ConstellationSpec:
    """Declarative constellation choice, parseable from compact text.

    Accepted forms: ``qam:64``, ``psk:32``, ``star:8,24,32@2,3`` (ring sizes
    then amplitude ratios) and ``file:/path/to/points.txt``.
    """

    kind: str
    order: int = 0
    ring_sizes: tuple[int, ...] = ()
    ring_ratios: tuple[float, ...] = ()
    path: str = ""

    @classmethod
    def parse(cls, text: str) -> "ConstellationSpec":
        text = text.strip()
        if ":" not in text:
            raise ConfigError(f"constellation spec needs 'kind:params', got {text!r}")
        kind, _, rest = text.partition(":")
        kind = kind.strip().lower()
        if kind in ("qam", "psk"):
            try:
                order = int(rest)
            except ValueError:
                raise ConfigError(f"bad {kind} order {rest!r}") from None
            return cls(kind=kind, order=order)
        if kind == "star":
            sizes_txt, _, ratios_txt = rest.partition("@")
            try:
                sizes = tuple(int(s) for s in sizes_txt.split(",") if s.strip())
                ratios = tuple(float(s) for s in ratios_txt.split(",") if s.strip())
            except ValueError:
                raise ConfigError(f"bad star spec {rest!r}") from None
            return cls(kind=kind, ring_sizes=sizes, ring_ratios=ratios)
        if kind == "file":
            return cls(kind=kind, path=rest)
        raise ConfigError(f"unknown constellation kind {kind!r}")

    def build(self) -> Constellation:
        if self.kind == "qam":
            return cmod.make_rect_qam(self.order)
        if self.kind == "psk":
            return cmod.make_psk(self.order)
        if self.kind == "star":
            return cmod.make_star_qam(self.ring_sizes, self.ring_ratios)
        if self.kind == "file":
            return cmod.load_constellation(self.path, normalize_points=True)
        raise ConfigError(f"unknown constellation kind {self.kind!r}")

    def text(self) -> str:
        if self.kind in ("qam", "psk"):
            return f"{self.kind}:{self.order}"
        if self.kind == "star":
            sizes = ",".join(str(s) for s in self.ring_sizes)
            ratios = ",".join(repr(r) for r in self.ring_ratios)
            return f"star:{sizes}@{ratios}"
        return f"file:{self.path}"


@dataclass(frozen=True)
class DetectorSpec:
    """Named detector configuration for one experiment column."""

    name: str
    config: DetectorConfig

    @classmethod
    def parse(cls, text: str) -> "DetectorSpec":
        """Parse an alias ('csd', 'pac-ccsd', ...) or an explicit
        'variant:ordering' pair, optionally suffixed with '@name'."""
        text = text.strip()
        body, _, custom_name = text.partition("@")
        body = body.strip().lower()
        if body in DETECTOR_ALIASES:
            variant, ordering = DETECTOR_ALIASES[body]
        elif ":" in body:
            variant, _, ordering = body.partition(":")
            variant = variant.strip()
            ordering = ordering.strip()
        else:
            raise ConfigError(
                f"unknown detector {text!r}; use an alias "
                f"({', '.join(sorted(DETECTOR_ALIASES))}) or 'variant:ordering'"
            )
        try:
            config = DetectorConfig(variant=variant, ordering=ordering)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return cls(name=custom_name.strip() or body, config=config)


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one benchmark sweep."""

    m: int
    n: int
    constellation: ConstellationSpec
    snr_grid_db: tuple[float, ...]
    trials: int
    master_seed: int
    detectors: tuple[DetectorSpec, ...]
    frozen_radius: bool = False
    epsilon: float = 0.01

    def __post_init__(self):
        if self.m < self.n or self.n < 1:
            raise ConfigError(f"need m >= n >= 1, got m={self.m}, n={self.n}")
        if self.trials < 1:
            raise ConfigError(f"need trials >= 1, got {self.trials}")
        if not self.snr_grid_db:
            raise ConfigError("snr grid must not be empty")
        if not self.detectors:
            raise ConfigError("need at least one detector")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        names = [d.name for d in self.detectors]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate detector names in {names}")


@dataclass(frozen=True)
class ResultRow:
    detector: str
    snr_db: float
    mean_flops: float
    stderr_flops: float
    ser: float
    mean_ped: float
    mean_cc: float
    mean_restarts: float
    trials: int


@dataclass(frozen=True)
class ExperimentResult:
    rows: tuple[ResultRow, ...]
    resampled_channels: int


def read_spec_file(path: str, overrides: dict | None = None) -> ExperimentSpec:
    """Load an experiment spec from a key = value sections file.

    Sections: [system] with m, n, constellation; [experiment] with snr_db,
    trials, seed, epsilon, frozen_radius; [detectors] with list. Any field
    supplied in ``overrides`` (same keys) wins over the file.
    """
    parser = ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"could not read experiment spec {path!r}")
    values: dict = {}
    if parser.has_section("system"):
        sec = parser["system"]
        if "m" in sec:
            values["m"] = sec.getint("m")
        if "n" in sec:
            values["n"] = sec.getint("n")
        if "constellation" in sec:
            values["constellation"] = sec.get("constellation")
    if parser.has_section("experiment"):
        sec = parser["experiment"]
        if "snr_db" in sec:
            values["snr_db"] = sec.get("snr_db")
        if "trials" in sec:
            values["trials"] = sec.getint("trials")
        if "seed" in sec:
            values["seed"] = sec.getint("seed")
        if "epsilon" in sec:
            values["epsilon"] = sec.getfloat("epsilon")
        if "frozen_radius" in sec:
            values["frozen_radius"] = sec.getboolean("frozen_radius")
    if parser.has_section("detectors") and "list" in parser["detectors"]:
        values["detectors"] = parser["detectors"].get("list")
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return build_spec(values)


def build_spec(values: dict) -> ExperimentSpec:
    """Assemble an ExperimentSpec from loosely-typed field values."""
    missing = [k for k in ("m", "n", "constellation", "snr_db", "trials", "seed", "detectors") if k not in values]
    if missing:
        raise ConfigError(f"missing experiment fields: {', '.join(missing)}")
    cspec = values["constellation"]
    if isinstance(cspec, str):
        cspec = ConstellationSpec.parse(cspec)
    snr = values["snr_db"]
    if isinstance(snr, str):
        snr = tuple(float(s) for s in snr.replace(";", ",").split(",") if s.strip())
    else:
        snr = tuple(float(s) for s in snr)
    dets = values["detectors"]
    if isinstance(dets, str):
        dets = tuple(DetectorSpec.parse(d) for d in dets.split(",") if d.strip())
    else:
        dets = tuple(d if isinstance(d, DetectorSpec) else DetectorSpec.parse(d) for d in dets)
    return ExperimentSpec(
        m=int(values["m"]),
        n=int(values["n"]),
        constellation=cspec,
        snr_grid_db=snr,
        trials=int(values["trials"]),
        master_seed=int(values["seed"]),
        detectors=dets,
        frozen_radius=bool(values.get("frozen_radius", False)),
        epsilon=float(values.get("epsilon", 0.01)),
    )


def _draw_instance(spec: ExperimentSpec, c: Constellation, snr_idx: int, trial_idx: int):
    """Per-trial instance from its substream; rank-deficient channel draws
    are resampled from the same stream (and counted)."""
    rng = substream_rng(spec.master_seed, snr_idx, trial_idx)
    sigma2 = snr_db_to_sigma2(spec.snr_grid_db[snr_idx], spec.m)
    resamples = 0
    while True:
        inst = make_instance(c, spec.m, spec.n, sigma2, rng)
        diag = qr_givens(inst.h).r.diagonal().real
        if diag.min() > 1e-10 * diag.max():
            return inst, resamples
        resamples += 1
        if resamples > _RANK_RESAMPLE_LIMIT:
            raise RuntimeError("channel sampling keeps producing rank-deficient draws")


def _trial_outputs(spec: ExperimentSpec, c: Constellation, snr_idx: int, trial_idx: int):
    """Run every detector on one shared instance.

    Returns (per-detector tuples of (flops, symbol_errors, ped, cc,
    restarts), resample count). A frozen-radius search that finds no
    candidate counts all n symbols as errors.
    """
    inst, resamples = _draw_instance(spec, c, snr_idx, trial_idx)
    out = []
    for det in spec.detectors:
        config = replace(
            det.config, epsilon=spec.epsilon, frozen_radius=spec.frozen_radius
        )
        problem = preprocess(inst.h, inst.r, inst.sigma2, c, config)
        s_hat, stats = search(problem, c, config)
        if s_hat is None:
            errors = spec.n
        else:
            errors = int(np.sum(s_hat != inst.s_bar))
        out.append(
            (
                stats.modeled_flops,
                errors,
                int(stats.ped_computations.sum()),
                int(stats.cc_tests.sum()),
                stats.radius_restarts,
            )
        )
    return out, resamples


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV_VAR, "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> ExperimentResult:
    """Run the sweep and aggregate one row per (detector, snr) cell.

    Trials are independent tasks; per-trial outputs are gathered into a
    table indexed by (snr, trial) and reduced in index order, so the worker
    count never changes the numbers.
    """
    c = spec.constellation.build()
    n_snr = len(spec.snr_grid_db)
    cells = [(si, ti) for si in range(n_snr) for ti in range(spec.trials)]
    nworkers = _worker_count(workers)
    results: dict[tuple[int, int], tuple] = {}
    if nworkers == 1:
        for si, ti in cells:
            results[(si, ti)] = _trial_outputs(spec, c, si, ti)
    else:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            chunk = max(1, len(cells) // (nworkers * 8))
            for (si, ti), res in zip(
                cells,
                pool.map(
                    _trial_outputs,
                    (spec for _ in cells),
                    (c for _ in cells),
                    (si for si, _ in cells),
                    (ti for _, ti in cells),
                    chunksize=chunk,
                ),
            ):
                results[(si, ti)] = res

    rows = []
    resampled = 0
    for di, det in enumerate(spec.detectors):
        for si, snr in enumerate(spec.snr_grid_db):
            flops = np.empty(spec.trials, dtype=float)
            errors = 0
            peds = np.empty(spec.trials, dtype=float)
            ccs = np.empty(spec.trials, dtype=float)
            restarts = np.empty(spec.trials, dtype=float)
            for ti in range(spec.trials):
                per_det, _ = results[(si, ti)]
                f, e, p, cc_count, rs = per_det[di]
                flops[ti] = f
                errors += e
                peds[ti] = p
                ccs[ti] = cc_count
                restarts[ti] = rs
            stderr = float(flops.std(ddof=1) / math.sqrt(spec.trials)) if spec.trials > 1 else 0.0
            rows.append(
                ResultRow(
                    detector=det.name,
                    snr_db=float(snr),
                    mean_flops=float(flops.mean()),
                    stderr_flops=stderr,
                    ser=errors / (spec.n * spec.trials),
                    mean_ped=float(peds.mean()),
                    mean_cc=float(ccs.mean()),
                    mean_restarts=float(restarts.mean()),
                    trials=spec.trials,
                )
            )
    for si in range(n_snr):
        for ti in range(spec.trials):
            resampled += results[(si, ti)][1]
    rows.sort(key=lambda row: (row.detector, row.snr_db))
    return ExperimentResult(rows=tuple(rows), resampled_channels=resampled)


def _format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(rows, path) -> None:
    """Write rows under the fixed header in full decimal precision."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([_format_value(getattr(row, field)) for field in CSV_HEADER])


def emit_json(rows, path) -> None:
    """Write the same fields as the CSV, as a JSON list of objects."""
    payload = [asdict(row) for row in rows]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_csv(path) -> tuple[ResultRow, ...]:
    """Read rows written by emit_csv."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(CSV_HEADER):
            raise ConfigError(f"{path}: unexpected columns {reader.fieldnames}")
        for rec in reader:
            rows.append(
                ResultRow(
                    detector=rec["detector"],
                    snr_db=float(rec["snr_db"]),
                    mean_flops=float(rec["mean_flops"]),
                    stderr_flops=float(rec["stderr_flops"]),
                    ser=float(rec["ser"]),
                    mean_ped=float(rec["mean_ped"]),
                    mean_cc=float(rec["mean_cc"]),
                    mean_restarts=float(rec["mean_restarts"]),
                    trials=int(rec["trials"]),
                )
            )
    return tuple(rows)


def reduction_table(rows, baseline: str) -> dict[str, list[tuple[float, float]]]:
    """Percent cost reduction of each detector against the baseline, per
    SNR: 100 * (1 - mean / base). Keys are detector names, values
    (snr_db, reduction) pairs sorted by SNR."""
    by_detector: dict[str, dict[float, float]] = {}
    for row in rows:
        by_detector.setdefault(row.detector, {})[row.snr_db] = row.mean_flops
    if baseline not in by_detector:
        raise ConfigError(
            f"baseline detector {baseline!r} not present; have {sorted(by_detector)}"
        )
    base = by_detector[baseline]
    table: dict[str, list[tuple[float, float]]] = {}
    for name, series in by_detector.items():
        pairs = []
        for snr in sorted(series):
            if snr not in base:
                raise ConfigError(f"baseline has no row at snr {snr} for {name}")
            pairs.append((snr, 100.0 * (1.0 - series[snr] / base[snr])))
        table[name] = pairs
    return table


def compare_report(rows, baseline: str) -> str:
    """Readable percent-reduction table against the baseline detector."""
    table = reduction_table(rows, baseline)
    snrs = sorted({snr for pairs in table.values() for snr, _ in pairs})
    names = sorted(table)
    width = max(12, max(len(n) for n in names) + 2)
    lines = [f"FLOP reduction vs {baseline} (percent)"]
    header = "detector".ljust(width) + "".join(f"{snr:>10.6g}" for snr in snrs)
    lines.append(header)
    for name in names:
        series = dict(table[name])
        cells = "".join(
            f"{series[snr]:>10.2f}" if snr in series else " " * 10 for snr in snrs
        )
        lines.append(name.ljust(width) + cells)
    return "\n".join(lines)
