"""
Command implementations behind the `rrbtrace` CLI.

Each command validates its inputs, writes its artifacts and prints a short
summary. Library errors propagate as RrbError; the entry point turns them into
exit codes.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Generator

from . import __version__
from .config import cell_from_json, load_sim_config
from .dataset import featurize_traces, read_feature_csv, train_test_split, write_cdf_csv, write_feature_csv
from .dci_log import read_dci_log, write_dci_log, write_ground_truth
from .errors import ConfigurationError, LogIntegrityError, OutputError
from .evaluation import MetricsReport, evaluate
from .forest import EnsembleConfig, Variant, fit, model_to_json
from .pipeline import PipelineConfig, empirical_cdf, rolling_normalize
from .profiles import DEFAULT_SESSION_SUBFRAMES, PROFILE_CATALOGUE
from .radio import CellConfig, UeIdentity
from .simulator import run_simulation, synthetic_sim_config
from .sniffer import DEFAULT_BIN_SUBFRAMES, read_trace_csv, reconstruct_throughput, write_trace_csv

logger = logging.getLogger(__name__)

GRANTS_FILE = "dci_log.csv"
RAR_FILE = "rar_events.csv"
TRUTH_FILE = "ground_truth.csv"
MANIFEST_FILE = "manifest.json"
DEFAULT_ITERATIONS = 20


def file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@contextmanager
def writing(path: Path) -> Generator[None, None, None]:
    """Report a failed write to `path` as an OutputError."""
    try:
        yield
    except OSError as error:
        raise OutputError(f"Cannot write '{path}': {error.strerror or error}", context=str(path)) from error


@dataclass
class RunManifest:
    """Provenance of one command run; digests cover artifacts, timings are informational."""
    root: Path
    tool_version: str = __version__
    seeds: dict[str, int] = field(default_factory=dict)
    config_paths: list[str] = field(default_factory=list)
    parameters: dict[str, int] = field(default_factory=dict)
    artifacts: dict[str, str] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def record(self, path: Path) -> None:
        try:
            name = str(path.relative_to(self.root))
        except ValueError:
            name = str(path)
        self.artifacts[name] = file_digest(path)

    @contextmanager
    def stage(self, name: str) -> Generator[None, None, None]:
        start = time.perf_counter()
        yield
        elapsed = time.perf_counter() - start
        self.timings[name] = round(elapsed, 6)
        logger.info("Stage %s took %.3f s", name, elapsed)

    def to_dict(self) -> dict[str, object]:
        return {
            "tool_version": self.tool_version,
            "seeds": dict(sorted(self.seeds.items())),
            "config_paths": self.config_paths,
            "parameters": dict(sorted(self.parameters.items())),
            "artifacts": dict(sorted(self.artifacts.items())),
            "timings": self.timings,
        }

    def write(self) -> Path:
        path = self.root / MANIFEST_FILE
        with writing(path):
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path

    def summary(self) -> str:
        lines = [f"rrbtrace {self.tool_version}"]
        lines.extend(f"  {name}  {digest[:16]}" for name, digest in sorted(self.artifacts.items()))
        return "\n".join(lines)


def cmd_simulate(config_path: Path, out_dir: Path) -> RunManifest:
    config = load_sim_config(config_path)
    manifest = RunManifest(out_dir, seeds={"simulation": config.seed}, config_paths=[str(config_path)],
                           parameters={"duration_subframes": config.duration_subframes})
    with manifest.stage("simulate"):
        log, truth = run_simulation(config)
    with manifest.stage("write"), writing(out_dir):
        write_dci_log(log, out_dir / GRANTS_FILE, out_dir / RAR_FILE)
        write_ground_truth(truth, out_dir / TRUTH_FILE)
    for name in (GRANTS_FILE, RAR_FILE, TRUTH_FILE):
        manifest.record(out_dir / name)
    manifest.write()
    print(manifest.summary())
    return manifest


def logged_duration(log_dir: Path) -> int | None:
    """Simulated duration recorded by `simulate` beside its log, if any."""
    path = log_dir / MANIFEST_FILE
    if not path.is_file():
        return None
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as error:
        raise LogIntegrityError(f"Unreadable manifest: {error}", context=str(path)) from error
    duration = document.get("parameters", {}).get("duration_subframes")
    if duration is None:
        return None
    if not isinstance(duration, int) or duration < 1:
        raise LogIntegrityError(f"Invalid duration_subframes {duration!r}", context=str(path))
    return duration


def cmd_sniff(log_path: Path, rnti: int, bin_subframes: int, out: Path,
              config_path: Path | None = None) -> Path:
    """Reconstruct one victim's trace.

    RAR events are read from the log's sibling file, and the simulated duration
    from the sibling manifest when there is one.
    """
    cell = cell_from_json(config_path) if config_path else CellConfig()
    log = read_dci_log(log_path, log_path.parent / RAR_FILE, cell, logged_duration(log_path.parent))
    trace = reconstruct_throughput(log, UeIdentity(rnti), bin_subframes, cell.subframe_ms)
    with writing(out):
        write_trace_csv(trace, out)
    print(f"C-RNTI {trace.crnti}: {len(trace.ul)} bins, "
          f"{int(trace.ul.values.sum())} UL bytes, {int(trace.dl.values.sum())} DL bytes -> {out}")
    return out


def cmd_dataset(traces_dir: Path, out_csv: Path, average_group: int | None = None,
                cfg: PipelineConfig | None = None) -> int:
    result = featurize_traces(traces_dir, cfg, average_group)
    with writing(out_csv):
        write_feature_csv(result.vectors, out_csv)
    print(f"{result.used} feature rows written to {out_csv} ({result.skipped} trace(s) skipped)")
    return result.used


def cmd_train_eval(dataset_csv: Path, variant: Variant, out_model: Path, out_report: Path,
                   seed: int = 42, estimators: int = 100, train_fraction: float = 0.7,
                   jobs: int = 1) -> MetricsReport:
    dataset = read_feature_csv(dataset_csv)
    train, test = train_test_split(dataset, train_fraction, seed)
    model = fit(train, EnsembleConfig(variant=variant, n_estimators=estimators, seed=seed, n_jobs=jobs))
    report = evaluate(model, test)
    for path, text in ((out_model, model_to_json(model)), (out_report, report.to_json())):
        with writing(path):
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
    print(f"{variant.value}: {len(train)} training rows, {len(test)} test rows")
    print(report.format_table())
    return report


def cmd_cdf(trace_csv: Path, out_dir: Path, normalized: bool = True,
            cfg: PipelineConfig | None = None) -> list[Path]:
    """Write `ul_cdf.csv` and `dl_cdf.csv`, by default over rolling-normalized throughput."""
    trace = read_trace_csv(trace_csv)
    written = []
    for name, series in (("ul", trace.ul), ("dl", trace.dl)):
        source = rolling_normalize(series, cfg) if normalized else series
        path = out_dir / f"{name}_cdf.csv"
        curve = empirical_cdf(source)
        with writing(path):
            write_cdf_csv(curve, path)
        written.append(path)
    print(f"CDFs written to {out_dir}")
    return written


def synthesize_trace(label: str, iteration: int, seed: int, duration: int, out_dir: Path) -> Path:
    """Simulate one catalogue session and sniff its victim into `<out>/<label>/iter_NNN.csv`."""
    config = synthetic_sim_config(label, iteration, seed, duration)
    log, truth = run_simulation(config)
    victim = next(iter(truth.ues.values())).crnti
    trace = reconstruct_throughput(log, victim, DEFAULT_BIN_SUBFRAMES, config.cell.subframe_ms)
    path = out_dir / label / f"iter_{iteration:03d}.csv"
    with writing(path):
        write_trace_csv(trace, path)
    return path


def cmd_synthesize(out_dir: Path, iterations: int = DEFAULT_ITERATIONS,
                   duration: int = DEFAULT_SESSION_SUBFRAMES, seed: int = 42, jobs: int = 1) -> list[Path]:
    if iterations < 1:
        raise ConfigurationError("iterations must be at least 1", context="iterations")
    if jobs < 1:
        raise ConfigurationError("jobs must be at least 1", context="jobs")
    tasks = [(label, i) for label in sorted(PROFILE_CATALOGUE) for i in range(iterations)]
    logger.info("Synthesizing %d traces (%d classes x %d iterations)",
                len(tasks), len(PROFILE_CATALOGUE), iterations)
    if jobs == 1:
        paths = [synthesize_trace(label, i, seed, duration, out_dir) for label, i in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(synthesize_trace, label, i, seed, duration, out_dir) for label, i in tasks]
            paths = [future.result() for future in futures]
    print(f"{len(paths)} traces written under {out_dir}")
    return paths


def cmd_attack(out_dir: Path, seed: int = 42, iterations: int = DEFAULT_ITERATIONS,
               duration: int = DEFAULT_SESSION_SUBFRAMES, estimators: int = 100,
               jobs: int = 1) -> dict[Variant, MetricsReport]:
    """Synthesize traces, featurize them and train/evaluate both ensemble variants."""
    manifest = RunManifest(out_dir, seeds={"top_level": seed})
    traces_dir = out_dir / "traces"
    dataset_csv = out_dir / "dataset.csv"
    with manifest.stage("synthesize"):
        for path in cmd_synthesize(traces_dir, iterations, duration, seed, jobs):
            manifest.record(path)
    with manifest.stage("dataset"):
        cmd_dataset(traces_dir, dataset_csv)
    manifest.record(dataset_csv)

    reports: dict[Variant, MetricsReport] = {}
    for variant in Variant:
        model_path = out_dir / f"model_{variant.value}.json"
        report_path = out_dir / f"report_{variant.value}.json"
        with manifest.stage(f"train_eval_{variant.value}"):
            reports[variant] = cmd_train_eval(dataset_csv, variant, model_path, report_path,
                                              seed=seed, estimators=estimators, jobs=jobs)
        manifest.record(model_path)
        manifest.record(report_path)
    manifest.write()
    print(f"Manifest: {out_dir / MANIFEST_FILE}")
    return reports
