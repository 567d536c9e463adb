"""Experiment harness: resolved configs, deterministic parallel sweeps, and
CSV/manifest emitters for every experiment.

Reproducibility scheme: every random draw comes from a counter-based stream
keyed by (seed, realization index, purpose tag), so results do not depend on
worker scheduling, and aggregation always reduces in realization-index order.
Each experiment writes a JSON manifest with the fully resolved configuration
next to its CSV tables; re-running with the same manifest reproduces the
tables byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import pickle
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, replace
from functools import partial
from pathlib import Path

import numpy as np

from ._version import __version__
from .chain import Envelope, ModelParams, initial_state, output_probs
from .circuits import build_circuit, simulate_circuit
from .errors import ConfigError
from .evolution import (
    IntegratorConfig,
    accepted_substeps,
    eigenphases,
    floquet_unitary,
    propagate_cycle,
)
from .genmodel import draw_model, memory_divergence, sample_dataset, train
from .magnus import fidelity, truncated_evolve
from .stats import (
    Binning,
    ProbSampleSet,
    bin_scaled_probs,
    ensemble_density,
    kl_to_pt,
    pt_bin_masses,
    pt_entropy,
    shannon_entropy,
    spacing_ratios,
)

EXPERIMENTS = ("supremacy", "magnus", "mbl-probe", "phase-diagram", "train", "memory")

# Matched digital/analog clock: one drive cycle costs one gate layer when the
# drive frequency equals this multiple of J (set by the CZ gate time pi/4J).
MATCHED_LAYER_OMEGA = 8.0


def realization_rng(seed: int, realization_index: int, stream_tag: str) -> np.random.Generator:
    """Independent, scheduling-proof random stream for one (realization, purpose)."""
    digest = hashlib.blake2b(stream_tag.encode(), digest_size=16).digest()
    tag_lo = int.from_bytes(digest[:8], "little")
    tag_hi = int.from_bytes(digest[8:], "little")
    key = np.array(
        [
            np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ np.uint64(tag_lo),
            np.uint64(realization_index & 0xFFFFFFFFFFFFFFFF) ^ np.uint64(tag_hi),
        ],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings of one experiment run.

    Field defaults are generic; use default_config() to get the per-experiment
    defaults that reproduce each figure's data at desk scale.
    """

    experiment: str
    L: int = 9
    J: float = 1.0
    F: float = 2.5
    W: float | None = None
    omega: float = 8.0
    D: int = 100
    m: int = 10
    seed: int = 0
    out: str = ""
    envelope: str = "sinusoidal"
    digital: bool = False
    substeps: int = 256
    convergence_tol: float = 1e-9
    auto_substeps: bool = True
    bins: int = 48
    x_max: float = 12.0
    W_list: tuple[float, ...] | None = None
    omega_list: tuple[float, ...] | None = None
    temperature: float = 1.0
    n_samples: int = 3000
    datasets: int = 50
    m_max: int = 500
    shots: int = 0
    m_ref_lo: int = 80
    m_ref_hi: int = 90
    dm_max: int = 10
    workers: int = 0
    checkpoint_every: int = 10

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        try:
            Envelope(self.envelope)
        except ValueError:
            raise ConfigError(f"unknown envelope {self.envelope!r}") from None
        for name in ("D", "m", "datasets", "m_max", "n_samples"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.W is None and self.W_list is None:
            raise ConfigError("either W or W_list must be set")

    def model_params(self, W: float | None = None, omega: float | None = None) -> ModelParams:
        return ModelParams(
            L=self.L,
            W=self.W if W is None else W,
            J=self.J,
            F=self.F,
            omega=self.omega if omega is None else omega,
        )

    @property
    def envelope_kind(self) -> Envelope:
        return Envelope(self.envelope)

    @property
    def binning(self) -> Binning:
        return Binning(bins=self.bins, x_max=self.x_max)

    @property
    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(self.substeps, self.convergence_tol)


EXPERIMENT_DEFAULTS: dict[str, dict] = {
    "supremacy": dict(L=9, W=5.0, D=500, m=10),
    "magnus": dict(L=9, W=2.0, D=500, m=1, omega_list=(2.0, 4.0, 8.0, 16.0, 32.0)),
    "mbl-probe": dict(L=9, D=100, m=10, W_list=(1.5, 5.0, 10.0, 20.0)),
    "phase-diagram": dict(
        L=9, D=50, m=10,
        W_list=(1.5, 3.0, 5.0, 10.0, 20.0),
        omega_list=(2.0, 4.0, 8.0, 16.0, 32.0),
    ),
    "train": dict(L=9, W=20.0, D=140, datasets=50, m_max=500, n_samples=3000),
    "memory": dict(L=9, W=20.0, D=100, m_ref_lo=80, m_ref_hi=90, dm_max=10),
}


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    """Experiment config with figure-caption defaults, then overrides."""
    if experiment not in EXPERIMENT_DEFAULTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")
    fields = dict(EXPERIMENT_DEFAULTS[experiment])
    fields.update(overrides)
    return ExperimentConfig(experiment=experiment, **fields)


def config_digest(config: ExperimentConfig) -> str:
    return hashlib.sha256(
        json.dumps(asdict(config), sort_keys=True, default=str).encode()
    ).hexdigest()


# ---------------------------------------------------------------------------
# sweep engine
# ---------------------------------------------------------------------------

def resolve_workers(requested: int) -> int:
    """Worker count: requested (0 = all cores), capped by SIM_THREADS."""
    n = requested if requested > 0 else (os.cpu_count() or 1)
    cap = os.environ.get("SIM_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def run_indexed(
    task,
    n: int,
    workers: int = 1,
    checkpoint_path: Path | None = None,
    checkpoint_every: int = 10,
    digest: str = "",
):
    """Evaluate task(i) for i in range(n), resumable, results in index order.

    A checkpoint with a stale config digest is discarded.  The checkpoint file
    is removed once the sweep completes.
    """
    results: dict[int, object] = {}
    if checkpoint_path is not None and checkpoint_path.exists():
        try:
            with open(checkpoint_path, "rb") as fh:
                payload = pickle.load(fh)
            if payload.get("digest") == digest:
                results = payload["results"]
        except Exception:
            results = {}

    def save():
        if checkpoint_path is None:
            return
        tmp = checkpoint_path.with_suffix(".tmp")
        with open(tmp, "wb") as fh:
            pickle.dump({"digest": digest, "results": results}, fh)
        os.replace(tmp, checkpoint_path)

    todo = [i for i in range(n) if i not in results]
    if workers <= 1:
        for count, i in enumerate(todo, start=1):
            results[i] = task(i)
            if checkpoint_path is not None and count % checkpoint_every == 0:
                save()
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(task, i): i for i in todo}
            done = 0
            for fut in as_completed(futures):
                results[futures[fut]] = fut.result()
                done += 1
                if checkpoint_path is not None and done % checkpoint_every == 0:
                    save()
    if checkpoint_path is not None and checkpoint_path.exists():
        checkpoint_path.unlink()
    return [results[i] for i in range(n)]


# ---------------------------------------------------------------------------
# shared statistics helpers
# ---------------------------------------------------------------------------

def calibrated_integrator(config: ExperimentConfig, W: float | None = None,
                          omega: float | None = None) -> IntegratorConfig:
    """Integrator accepted for this parameter point (auto-doubled if enabled)."""
    base = config.integrator
    if not config.auto_substeps:
        return base
    params = config.model_params(W=W, omega=omega)
    rng = realization_rng(config.seed, 0, "calibrate")
    return accepted_substeps(params, config.envelope_kind, base, rng)


def grouped_kl(probs: np.ndarray, binning: Binning, groups: int = 10):
    """Pooled KL-to-PT plus batch-means mean and standard error.

    probs has one realization per row; realizations are split into index-order
    groups for the error bar.
    """
    pooled = kl_to_pt(ProbSampleSet(probs), binning)
    g = min(groups, probs.shape[0])
    batches = np.array_split(np.arange(probs.shape[0]), g)
    vals = np.array(
        [kl_to_pt(ProbSampleSet(probs[b]), binning).value for b in batches]
    )
    se = float(vals.std(ddof=1) / np.sqrt(g)) if g > 1 else 0.0
    return pooled, float(vals.mean()), se


def _mean_se(values: np.ndarray):
    values = np.asarray(values, dtype=float)
    se = float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
    return float(values.mean()), se


# ---------------------------------------------------------------------------
# per-realization workers (module level so process pools can pickle them)
# ---------------------------------------------------------------------------

def _analog_probs_worker(i: int, config: ExperimentConfig, integ: IntegratorConfig) -> np.ndarray:
    """Static-disorder cycle-by-cycle output probabilities, shape (m, N)."""
    rng = realization_rng(config.seed, i, "disorder")
    params = config.model_params()
    h = rng.uniform(0.0, params.W, params.L)
    psi = initial_state(params.L)
    out = np.empty((config.m, params.dim))
    for cycle in range(config.m):
        psi = propagate_cycle(psi, params, h, config.envelope_kind, integ)
        out[cycle] = output_probs(psi)
    return out


def _digital_probs_worker(i: int, config: ExperimentConfig) -> np.ndarray:
    """Random-circuit layer-by-layer output probabilities, shape (m, N)."""
    rng = realization_rng(config.seed, i, "circuit")
    circuit = build_circuit(config.L, config.m, rng)
    out = np.empty((config.m, 1 << config.L))
    psi = initial_state(config.L)
    for depth, layer in enumerate(circuit, start=1):
        psi = simulate_circuit([layer], config.L, state=psi)
        out[depth - 1] = output_probs(psi)
    return out


def _spectrum_worker(i: int, config: ExperimentConfig, integ: IntegratorConfig,
                     W: float, omega: float, with_spectrum: bool) -> dict:
    """Level-spacing ratios of the cycle unitary plus probabilities after m cycles."""
    rng = realization_rng(config.seed, i, f"disorder-W{W:g}-om{omega:g}")
    params = config.model_params(W=W, omega=omega)
    h = rng.uniform(0.0, params.W, params.L)
    result: dict = {}
    if with_spectrum:
        U = floquet_unitary(params, h, config.envelope_kind, integ)
        result["ratios"] = spacing_ratios(eigenphases(U))
    psi = initial_state(params.L)
    for _ in range(config.m):
        psi = propagate_cycle(psi, params, h, config.envelope_kind, integ)
    result["probs"] = output_probs(psi)
    return result


def _magnus_worker(i: int, config: ExperimentConfig, integ: IntegratorConfig,
                   omega: float) -> dict:
    """One-cycle truncation fidelities at orders 0 and 2, plus exact probabilities."""
    rng = realization_rng(config.seed, i, f"disorder-om{omega:g}")
    params = config.model_params(omega=omega)
    h = rng.uniform(0.0, params.W, params.L)
    psi0 = initial_state(params.L)
    exact = propagate_cycle(psi0, params, h, config.envelope_kind, integ)
    return {
        "fid0": fidelity(exact, truncated_evolve(psi0, params, h, order=0)),
        "fid2": fidelity(exact, truncated_evolve(psi0, params, h, order=2)),
        "probs": output_probs(exact),
    }


def _train_worker(d: int, config: ExperimentConfig, integ: IntegratorConfig) -> dict:
    params = config.model_params()
    model = draw_model(
        params.L, realization_rng(config.seed, d, "dataset"),
        J=params.J, temperature=config.temperature,
    )
    dataset = sample_dataset(model, config.n_samples, realization_rng(config.seed, d, "samples"))
    trace = train(
        params,
        config.envelope_kind,
        dataset,
        n_candidates=config.D,
        m_max=config.m_max,
        rng=realization_rng(config.seed, d, "train"),
        integrator=integ,
        shots=config.shots,
    )
    return {
        "chosen_index": trace.chosen_index,
        "chosen_cost": trace.chosen_cost,
        "chosen_entropy": trace.entropies[np.arange(trace.cycles), trace.chosen_index],
        "costs": trace.costs,
        "entropies": trace.entropies,
        "target_entropy": shannon_entropy(dataset.empirical_hist),
        "final_cost": float(trace.chosen_cost[-1]),
    }


def _memory_worker(i: int, config: ExperimentConfig, integ: IntegratorConfig) -> dict:
    params = config.model_params()
    curve, final_probs = memory_divergence(
        params,
        config.envelope_kind,
        (config.m_ref_lo, config.m_ref_hi),
        config.dm_max,
        realization_rng(config.seed, i, "quench"),
        integrator=integ,
        return_final_probs=True,
    )
    return {"curve": curve, "final_probs": final_probs}


# ---------------------------------------------------------------------------
# experiment runners (compute only; run_experiment adds the file outputs)
# ---------------------------------------------------------------------------

def _sweep(config: ExperimentConfig, task, n: int, out_dir: Path | None, label: str):
    checkpoint = None
    if out_dir is not None:
        checkpoint = out_dir / f"{label}.checkpoint.pkl"
    return run_indexed(
        task,
        n,
        workers=resolve_workers(config.workers),
        checkpoint_path=checkpoint,
        checkpoint_every=config.checkpoint_every,
        digest=config_digest(config) + ":" + label,
    )


def supremacy_curves(config: ExperimentConfig, out_dir: Path | None = None) -> dict:
    """Analog (and optionally digital) KL-to-PT trajectories versus depth."""
    integ = calibrated_integrator(config)
    rows = _sweep(
        config, partial(_analog_probs_worker, config=config, integ=integ),
        config.D, out_dir, "analog",
    )
    analog = np.stack(rows)  # (D, m, N)
    result = {"integrator": integ, "analog_probs": analog}
    if config.digital:
        rows = _sweep(
            config, partial(_digital_probs_worker, config=config),
            config.D, out_dir, "digital",
        )
        result["digital_probs"] = np.stack(rows)
    return result


def kl_versus_depth(probs: np.ndarray, binning: Binning) -> list[dict]:
    """Per-cycle pooled KL and batch-means error from (D, m, N) probabilities."""
    out = []
    for cycle in range(probs.shape[1]):
        pooled, mean, se = grouped_kl(probs[:, cycle, :], binning)
        out.append(
            {
                "m": cycle + 1,
                "kl_pooled": pooled.value,
                "kl_mean": mean,
                "kl_se": se,
                "undersampled": pooled.undersampled,
            }
        )
    return out


def mbl_probe_point(config: ExperimentConfig, W: float, omega: float | None = None,
                    with_spectrum: bool = True, out_dir: Path | None = None) -> dict:
    """Level statistics and KL-to-PT at one (W, omega) point."""
    omega = config.omega if omega is None else omega
    integ = calibrated_integrator(config, W=W, omega=omega)
    rows = _sweep(
        config,
        partial(_spectrum_worker, config=config, integ=integ, W=W, omega=omega,
                with_spectrum=with_spectrum),
        config.D, out_dir, f"point-W{W:g}-om{omega:g}",
    )
    probs = np.stack([r["probs"] for r in rows])
    pooled, kl_mean, kl_se = grouped_kl(probs, config.binning)
    point = {
        "W": W,
        "omega": omega,
        "kl_pooled": pooled.value,
        "kl_mean": kl_mean,
        "kl_se": kl_se,
        "undersampled": pooled.undersampled,
        "probs": probs,
        "integrator": integ,
    }
    if with_spectrum:
        ratios = np.stack([r["ratios"] for r in rows])
        per_realization = ratios.mean(axis=1)
        r_mean, r_se = _mean_se(per_realization)
        point.update({"r_mean": r_mean, "r_se": r_se, "ratios": ratios})
    return point


def magnus_sweep(config: ExperimentConfig, out_dir: Path | None = None) -> list[dict]:
    """Truncation fidelities and KL-to-PT across the drive-frequency sweep."""
    omegas = config.omega_list or (config.omega,)
    table = []
    for omega in omegas:
        integ = calibrated_integrator(config, omega=omega)
        rows = _sweep(
            config, partial(_magnus_worker, config=config, integ=integ, omega=omega),
            config.D, out_dir, f"omega{omega:g}",
        )
        probs = np.stack([r["probs"] for r in rows])
        pooled, kl_mean, kl_se = grouped_kl(probs, config.binning)
        fid0_mean, fid0_se = _mean_se([r["fid0"] for r in rows])
        fid2_mean, fid2_se = _mean_se([r["fid2"] for r in rows])
        table.append(
            {
                "omega": omega,
                "fid0_mean": fid0_mean,
                "fid0_se": fid0_se,
                "fid2_mean": fid2_mean,
                "fid2_se": fid2_se,
                "kl_pooled": pooled.value,
                "kl_mean": kl_mean,
                "kl_se": kl_se,
                "integrator": integ,
            }
        )
    return table


def train_runs(config: ExperimentConfig, out_dir: Path | None = None) -> list[dict]:
    """Independent training runs, one per dataset realization."""
    integ = calibrated_integrator(config)
    runs = _sweep(
        config, partial(_train_worker, config=config, integ=integ),
        config.datasets, out_dir, "train",
    )
    for run in runs:
        run["integrator"] = integ
    return runs


def memory_curves(config: ExperimentConfig, out_dir: Path | None = None) -> dict:
    """Memory-loss curves of unconditional quenched runs plus final KL-to-PT."""
    integ = calibrated_integrator(config)
    rows = _sweep(
        config, partial(_memory_worker, config=config, integ=integ),
        config.D, out_dir, "memory",
    )
    curves = np.stack([r["curve"] for r in rows])
    probs = np.stack([r["final_probs"] for r in rows])
    pooled, kl_mean, kl_se = grouped_kl(probs, config.binning)
    return {
        "curves": curves,
        "final_m": config.m_ref_hi + config.dm_max,
        "final_kl_pooled": pooled.value,
        "final_kl_mean": kl_mean,
        "final_kl_se": kl_se,
        "undersampled": pooled.undersampled,
        "integrator": integ,
    }


# ---------------------------------------------------------------------------
# file emission
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def write_manifest(path: Path, config: ExperimentConfig, extra: dict) -> Path:
    payload = {
        "code_version": __version__,
        "experiment": config.experiment,
        "seed": config.seed,
        "config": asdict(config),
        "config_digest": config_digest(config),
    }
    payload.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


def _integ_info(integ: IntegratorConfig) -> dict:
    return {
        "substeps_per_cycle": integ.substeps_per_cycle,
        "convergence_tol": integ.convergence_tol,
    }


def run_experiment(config: ExperimentConfig) -> dict[str, Path]:
    """Run one experiment and write its manifest and figure tables."""
    out_dir = Path(config.out) if config.out else Path("results") / config.experiment
    out_dir.mkdir(parents=True, exist_ok=True)
    name = config.experiment
    written: dict[str, Path] = {}
    extra: dict = {}

    if name == "supremacy":
        data = supremacy_curves(config, out_dir)
        header = ["m", "L", "kl_pooled", "kl_mean", "kl_se", "undersampled"]
        rows = [
            (r["m"], config.L, r["kl_pooled"], r["kl_mean"], r["kl_se"], r["undersampled"])
            for r in kl_versus_depth(data["analog_probs"], config.binning)
        ]
        written["analog_kl"] = write_csv(out_dir / "analog_kl_vs_m.csv", header, rows)
        binned = bin_scaled_probs(ProbSampleSet(data["analog_probs"][:, -1, :]), config.binning)
        pt = pt_bin_masses(config.binning)
        written["hist"] = write_csv(
            out_dir / "output_distribution.csv",
            ["x_lo", "x_hi", "mass", "pt_mass"],
            zip(binned.edges[:-1], binned.edges[1:], binned.masses, pt),
        )
        if config.digital:
            rows = [
                (r["m"], config.L, r["kl_pooled"], r["kl_mean"], r["kl_se"], r["undersampled"])
                for r in kl_versus_depth(data["digital_probs"], config.binning)
            ]
            written["digital_kl"] = write_csv(out_dir / "digital_kl_vs_m.csv", header, rows)
        extra["integrator"] = _integ_info(data["integrator"])

    elif name == "magnus":
        table = magnus_sweep(config, out_dir)
        written["sweep"] = write_csv(
            out_dir / "magnus_sweep.csv",
            ["omega", "fid0_mean", "fid0_se", "fid2_mean", "fid2_se",
             "kl_pooled", "kl_mean", "kl_se"],
            [
                (r["omega"], r["fid0_mean"], r["fid0_se"], r["fid2_mean"], r["fid2_se"],
                 r["kl_pooled"], r["kl_mean"], r["kl_se"])
                for r in table
            ],
        )
        extra["integrator_per_omega"] = {
            format(r["omega"], "g"): _integ_info(r["integrator"]) for r in table
        }

    elif name == "mbl-probe":
        W_values = config.W_list if config.W is None else (config.W,)
        points = [mbl_probe_point(config, W, out_dir=out_dir) for W in W_values]
        written["probe"] = write_csv(
            out_dir / "mbl_probe.csv",
            ["W", "r_mean", "r_se", "kl_pooled", "kl_mean", "kl_se", "undersampled"],
            [
                (p["W"], p["r_mean"], p["r_se"], p["kl_pooled"], p["kl_mean"],
                 p["kl_se"], p["undersampled"])
                for p in points
            ],
        )
        edges = np.linspace(0.0, 1.0, 26)
        hist_rows = []
        for p in points:
            density, _ = np.histogram(p["ratios"].reshape(-1), bins=edges, density=True)
            mids = 0.5 * (edges[:-1] + edges[1:])
            for mid, dens in zip(mids, density):
                hist_rows.append(
                    (p["W"], mid, dens, ensemble_density("COE", mid), ensemble_density("POI", mid))
                )
        written["spacing_hist"] = write_csv(
            out_dir / "spacing_histogram.csv",
            ["W", "r_mid", "density", "coe", "poi"],
            hist_rows,
        )
        extra["integrator_per_W"] = {
            format(p["W"], "g"): _integ_info(p["integrator"]) for p in points
        }

    elif name == "phase-diagram":
        W_values = config.W_list or (config.W,)
        omega_values = config.omega_list or (config.omega,)
        rows = []
        extra["integrator_per_point"] = {}
        for W in W_values:
            for omega in omega_values:
                p = mbl_probe_point(config, W, omega=omega, out_dir=out_dir)
                rows.append(
                    (W, omega, p["r_mean"], p["r_se"], p["kl_pooled"], p["kl_mean"], p["kl_se"])
                )
                extra["integrator_per_point"][f"W{W:g}-om{omega:g}"] = _integ_info(p["integrator"])
        written["grid"] = write_csv(
            out_dir / "phase_diagram.csv",
            ["W", "omega", "r_mean", "r_se", "kl_pooled", "kl_mean", "kl_se"],
            rows,
        )

    elif name == "train":
        runs = train_runs(config, out_dir)
        trace_rows = []
        for d, run in enumerate(runs):
            for cycle in range(run["chosen_cost"].size):
                trace_rows.append(
                    (d, cycle + 1, run["chosen_index"][cycle],
                     run["chosen_cost"][cycle], run["chosen_entropy"][cycle])
                )
        written["trace"] = write_csv(
            out_dir / "train_trace.csv",
            ["dataset", "m", "chosen_index", "chosen_cost", "chosen_entropy"],
            trace_rows,
        )
        cand_rows = []
        first = runs[0]
        for cycle in range(first["costs"].shape[0]):
            for j in range(first["costs"].shape[1]):
                cand_rows.append(
                    (cycle + 1, j, first["costs"][cycle, j], first["entropies"][cycle, j])
                )
        written["candidates"] = write_csv(
            out_dir / "train_candidates.csv",
            ["m", "candidate", "cost", "entropy"],
            cand_rows,
        )
        written["final"] = write_csv(
            out_dir / "train_final.csv",
            ["dataset", "final_cost", "target_entropy", "pt_entropy"],
            [
                (d, run["final_cost"], run["target_entropy"], pt_entropy(config.L))
                for d, run in enumerate(runs)
            ],
        )
        extra["integrator"] = _integ_info(runs[0]["integrator"])
        extra["mean_final_cost"] = float(np.mean([r["final_cost"] for r in runs]))

    elif name == "memory":
        data = memory_curves(config, out_dir)
        curves = data["curves"]
        rows = []
        for dm in range(curves.shape[1]):
            mean, se = _mean_se(curves[:, dm])
            rows.append((dm, mean, se))
        written["curve"] = write_csv(
            out_dir / "memory_curve.csv", ["dm", "kl_mean", "kl_se"], rows
        )
        written["final_kl"] = write_csv(
            out_dir / "quenched_final_kl.csv",
            ["m", "kl_pooled", "kl_mean", "kl_se", "undersampled"],
            [(data["final_m"], data["final_kl_pooled"], data["final_kl_mean"],
              data["final_kl_se"], data["undersampled"])],
        )
        extra["integrator"] = _integ_info(data["integrator"])

    written["manifest"] = write_manifest(out_dir / "manifest.json", config, extra)
    return written
