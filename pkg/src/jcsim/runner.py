"""Run a :class:`~jcsim.config.ScenarioConfig` and collect series and metrics."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import protocols
from .config import ScenarioConfig
from .dynamics import block_trajectory, evolve_density, oracle_atom_populations
from .errors import ConfigError, RegimeError
from .hilbert import excitation_number, fidelity_pure, partial_trace
from .model import JCParams, build_jc_hamiltonian, build_rabi_hamiltonian
from .observables import (
    TimeSeries,
    collapse_envelope,
    density_report,
    find_first_revival,
    rabi_spectrum,
    revival_times,
    time_grid,
    weighted_excitation,
)
from .states import (
    FieldState,
    bloch_atom,
    coherent_field,
    default_n_max,
    fock_state,
    poisson_pmf,
    product_state,
    thermal_field,
)

ORACLE_SAMPLES = 16


@dataclass
class ScenarioResult:
    """Outputs of one scenario.

    ``series`` and ``spectrum`` map column names to equal-length arrays, in
    output order; either may be ``None``.
    """

    scenario: str
    series: dict | None
    spectrum: dict | None
    summary: dict


def params_of(cfg: ScenarioConfig) -> JCParams:
    return JCParams(omega=cfg.omega * cfg.g, omega_a=(cfg.omega + cfg.delta) * cfg.g, g=cfg.g)


def resolve_n_max(cfg: ScenarioConfig) -> int:
    if cfg.n_max is not None:
        return cfg.n_max
    return default_n_max(cfg.field, n=cfg.n, alpha=cfg.alpha, mean_n=cfg.mean_n)


def make_field(cfg: ScenarioConfig, n_max: int) -> FieldState:
    if cfg.field == "fock":
        if cfg.n > n_max:
            raise ConfigError(f"n: Fock number {cfg.n} exceeds n_max={n_max}")
        return FieldState(fock_state(cfg.n, n_max), "fock", 0.0, {"n": cfg.n})
    if cfg.field == "coherent":
        return coherent_field(cfg.alpha, n_max, cfg.tail_tol)
    return thermal_field(cfg.mean_n, n_max, cfg.tail_tol)


def make_atom(cfg: ScenarioConfig) -> np.ndarray:
    if cfg.atom == "e":
        return np.array([1.0, 0.0], dtype=complex)
    if cfg.atom == "g":
        return np.array([0.0, 1.0], dtype=complex)
    return bloch_atom(cfg.atom_theta, cfg.atom_phi)


def _oracle_indices(size: int) -> np.ndarray:
    return np.unique(np.linspace(0, size - 1, min(size, ORACLE_SAMPLES)).round().astype(int))


def _populations(cfg: ScenarioConfig):
    """Shared population run: trajectory, conservation, oracle and final-state checks."""
    p = params_of(cfg)
    n_max = resolve_n_max(cfg)
    field = make_field(cfg, n_max)
    atom = make_atom(cfg)
    state = product_state(atom, field.data)
    times = time_grid(cfg.t_max, cfg.samples)

    traj = block_trajectory(state, p, times)
    pe, pg = traj.atom_populations()
    h = build_jc_hamiltonian(p, n_max)
    en = traj.block_expectation(excitation_number(n_max + 1))
    eh = traj.block_expectation(h)

    idx = _oracle_indices(times.size)
    pe_oracle, _ = oracle_atom_populations(h, state, times[idx] / p.g)

    rho = state if state.ndim == 2 else np.outer(state, state.conj())
    rho_t = evolve_density(rho, p, cfg.t_max)
    atom_final = partial_trace(rho_t, "atom")

    metrics = {
        "n_max": n_max,
        "tail_mass": field.tail_mass,
        "N_drift": float(np.max(np.abs(en - en[0]))),
        "H_drift": float(np.max(np.abs(eh - eh[0]))),
        "oracle_max_deviation": float(np.max(np.abs(pe[idx] - pe_oracle))),
        "final_density": density_report(rho_t),
        "final_atom_density": density_report(atom_final),
    }
    if cfg.atom == "e":
        ref = weighted_excitation(field.photon_probabilities(), p, times).values
        metrics["weighted_sum_max_deviation"] = float(np.max(np.abs(pe - ref)))
    series = {"t_gt": times, "Pe": pe, "Pg": pg}
    return p, field, series, metrics


def _window_stats(series: dict, start: float, stop: float) -> dict:
    w = TimeSeries(series["t_gt"], series["Pe"]).window(start, stop)
    if w.size < 2:
        raise RegimeError(f"window [{start}, {stop}] holds fewer than two samples")
    return {"window_start": start, "window_stop": stop,
            "window_mean": float(w.mean()), "collapse_stdev": float(w.std())}


def run_rabi(cfg):
    _, _, series, metrics = _populations(cfg)
    return ScenarioResult(cfg.scenario, series, None, metrics)


def run_vacuum_rabi(cfg):
    if cfg.atom != "e" or cfg.field != "fock" or cfg.n != 0:
        raise ConfigError("scenario: vacuum-rabi needs atom = 'e' and a Fock field with n = 0")
    _, _, series, metrics = _populations(cfg)
    t = series["t_gt"]
    metrics["cos2_max_deviation"] = float(np.max(np.abs(series["Pe"] - np.cos(t) ** 2)))
    return ScenarioResult(cfg.scenario, series, None, metrics)


def run_collapse_thermal(cfg):
    _, _, series, metrics = _populations(cfg)
    metrics.update(_window_stats(series, cfg.window_start, cfg.window_stop))
    return ScenarioResult(cfg.scenario, series, None, metrics)


def run_collapse_revival(cfg):
    _, _, series, metrics = _populations(cfg)
    metrics.update(_window_stats(series, cfg.window_start, cfg.window_stop))
    alpha = cfg.alpha
    try:
        rev = find_first_revival(TimeSeries(series["t_gt"], series["Pe"]))
        metrics.update(revival_time=rev.time, revival_height=rev.height,
                       collapse_time=rev.collapse_time)
    except RegimeError as exc:
        metrics["revival_error"] = str(exc)
    if alpha >= 1:
        pred = revival_times(alpha, 1.0, 1)
        metrics["revival_predicted"] = float(pred.approx[0])
        metrics["revival_predicted_rephasing"] = float(pred.exact[0])
    if cfg.atom == "e" and cfg.field == "coherent" and cfg.delta == 0:
        t = series["t_gt"]
        early = t <= 2.0
        env = collapse_envelope(alpha, 1.0, t[early])
        metrics["envelope_rms_0_2"] = float(np.sqrt(np.mean((series["Pe"][early] - env) ** 2)))
    return ScenarioResult(cfg.scenario, series, None, metrics)


def run_spectrum(cfg):
    _, field, series, metrics = _populations(cfg)
    peaks = rabi_spectrum(TimeSeries(series["t_gt"], series["Pg"]), cfg.threshold)
    photon_estimate = 2.0 * peaks.weights
    spectrum = {
        "frequency_g": peaks.frequencies,
        "ratio": peaks.ratios() if len(peaks) else peaks.frequencies,
        "weight": peaks.weights,
        "photon_estimate": photon_estimate,
    }
    metrics["peak_count"] = len(peaks)
    metrics["peak_ratios"] = [float(r) for r in spectrum["ratio"]]
    if cfg.field == "coherent" and len(peaks):
        pmf = poisson_pmf(cfg.alpha**2, len(peaks) - 1)
        metrics["poisson_max_error"] = float(np.max(np.abs(photon_estimate - pmf)))
    return ScenarioResult(cfg.scenario, series, spectrum, metrics)


def run_swap(cfg):
    atom = make_atom(cfg)
    n_max = cfg.n_max if cfg.n_max is not None else 2
    _, swap_fid = protocols.swap_excitation(atom, n_max)
    _, double_fid = protocols.double_swap(atom, n_max)
    sub = dataclasses.replace(cfg, field="fock", n=0, n_max=n_max, delta=0.0)
    _, _, series, metrics = _populations(sub)
    metrics.update(swap_fidelity=swap_fid, double_swap_fidelity=double_fid)
    return ScenarioResult(cfg.scenario, series, None, metrics)


def run_epr(cfg):
    n_max = cfg.n_max if cfg.n_max is not None else 3
    first = protocols.run_sequence(protocols.EPR_STEPS[:1], n_max, cfg.convention)
    target = np.zeros(2 * (n_max + 1), dtype=complex)
    target[0] = 1.0
    target[n_max + 2] = 1.0 if cfg.convention == "real" else -1j
    target /= math.sqrt(2.0)
    final = protocols.epr_sequence(n_max, cfg.convention)
    metrics = {"n_max": n_max, "convention": cfg.convention,
               "step1_fidelity": fidelity_pure(first.amplitudes, target),
               "norm_error": abs(final.norm() - 1.0)}
    metrics.update(protocols.bell_report(final))
    metrics["pair_density"] = density_report(final.reduced(atoms=[0, 1]))
    return ScenarioResult(cfg.scenario, None, None, metrics)


def run_rwa_check(cfg):
    p, field, series, metrics = _populations(cfg)
    n_max = metrics["n_max"]
    state = product_state(make_atom(cfg), field.data)
    pe_rabi, _ = oracle_atom_populations(build_rabi_hamiltonian(p, n_max), state,
                                         series["t_gt"] / p.g)
    series["Pe_rabi"] = pe_rabi
    metrics["g_over_omega"] = 1.0 / cfg.omega
    metrics["rwa_max_deviation"] = float(np.max(np.abs(series["Pe"] - pe_rabi)))
    return ScenarioResult(cfg.scenario, series, None, metrics)


RUNNERS = {
    "rabi": run_rabi,
    "vacuum-rabi": run_vacuum_rabi,
    "collapse-thermal": run_collapse_thermal,
    "collapse-revival": run_collapse_revival,
    "spectrum": run_spectrum,
    "swap": run_swap,
    "epr": run_epr,
    "rwa-check": run_rwa_check,
}


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    result = RUNNERS[cfg.scenario](cfg)
    result.summary = {"scenario": cfg.scenario, "config": dataclasses.asdict(cfg),
                      "metrics": result.summary}
    return result
