"""Command-line front end: cr-noise-lab <command> --config <path-or-preset>.

Commands
    modes       modal frequencies, labels, quality factors
    budget      thermal + electronic noise budget tables
    simulate    time-domain run, CSV trajectory, steady-state summary
    psd         time-domain run + Welch spectra and band powers
    resolution  readout voltages, output resolution, detection limit
    sweep       repeat modes/budget/resolution over a list of coupling springs

--config takes a file path or a shipped preset name (paper-reference,
uncoupled-demo).  Every emitted file starts with the fully resolved `# key =
value` configuration block, so re-running from that block reproduces the file
byte for byte (stochastic runs require a seed; there is no silent
nondeterminism).  Exit codes: 0 success, 1 invalid configuration (the
offending key is named), 2 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import presets, resolution as reslib, spectral, sysmodel, timesim
from .config import RunConfig, build_run_config, load_config_file, parse_config_text, schema_help
from .errors import ConfigError, NumericalError
from .noisebudget import (
    NoiseBudgetReport,
    analytic_displacement_psd,
    full_noise_budget,
)
from .reports import Row, render_table, write_report, write_rows_csv, write_csv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cr-noise-lab",
        description="Noise floor and resolution analysis for a weakly coupled "
        "two-resonator sensor.",
        epilog="configuration keys:\n" + schema_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, extra in (
        ("modes", cmd_modes, "modal frequencies and labels"),
        ("budget", cmd_budget, "thermal and electronic noise budget"),
        ("simulate", cmd_simulate, "time-domain simulation"),
        ("psd", cmd_psd, "simulation plus Welch spectra"),
        ("resolution", cmd_resolution, "output resolution and detection limit"),
        ("sweep", cmd_sweep, "coupling-strength sweep"),
    ):
        p = sub.add_parser(name, help=extra)
        p.add_argument("--config", default=None,
                       help="config file path or preset name "
                            f"({', '.join(presets.PRESET_NAMES)})")
        p.add_argument("--seed", type=int, default=None,
                       help="override sim.seed")
        p.add_argument("--out", default=None, help="override output.directory")
        p.add_argument("--db-convention", choices=("paper", "power"), default=None,
                       help="override analysis.db_convention")
        if name == "sweep":
            p.add_argument("--kc", default=None,
                           help="comma-separated coupling springs overriding "
                                "sweep.kc_values")
        p.set_defaults(func=func)
    return parser


def _load_run(args) -> RunConfig:
    file_entries = None
    if args.config is not None:
        if args.config in presets.PRESET_NAMES:
            file_entries = parse_config_text(
                presets.preset_text(args.config), source=args.config
            )
        else:
            file_entries = load_config_file(args.config)
    overrides = {}
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("sim.seed: --seed must be >= 0")
        overrides["sim.seed"] = str(args.seed)
    if args.out is not None:
        overrides["output.directory"] = args.out
    if args.db_convention is not None:
        overrides["analysis.db_convention"] = args.db_convention
    if getattr(args, "kc", None) is not None:
        overrides["sweep.kc_values"] = args.kc
    return build_run_config(file_entries, overrides)


def _out_dir(run: RunConfig) -> Path:
    out = Path(run.get("output.directory"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo(run: RunConfig) -> tuple[str, ...]:
    return tuple(run.echo_lines())


def _print(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# --- modes -----------------------------------------------------------------

def _modes_rows(run: RunConfig):
    system = sysmodel.build_system(run.system)
    modes = sysmodel.mode_analysis(system)
    derived = sysmodel.derive_quantities(run.system)
    sens = sysmodel.sensitivity_stiffness(derived.k_eff * 1e-3, derived)
    ar_per_dk = "unbounded (degenerate)" if sens.degenerate else sens.ar_shift / 1e-3
    rows = [
        Row("f1", modes.f1, "Hz", modes.label1),
        Row("f2", modes.f2, "Hz", modes.label2),
        Row("mode_split", modes.split_hz, "Hz", "f2 - f1"),
        Row("kappa", derived.kappa, "-", "kc/k_eff"),
        Row("k_eff", derived.k_eff, "N/m", "km + kc"),
        Row("m_eff", derived.m_eff, "kg", "input"),
        Row("q", derived.q, "-", "sqrt(k_eff*m_eff)/c"),
        Row("modal_q1", modes.modal_q1, "-", "projected damping"),
        Row("modal_q2", modes.modal_q2, "-", "projected damping"),
        Row("ar_sensitivity", ar_per_dk, "1/dk", "1/(2|kappa|)"),
    ]
    return rows, modes


def cmd_modes(run: RunConfig, args) -> int:
    rows, _ = _modes_rows(run)
    out = _out_dir(run)
    write_report(out / "modes.txt", "modal analysis", rows, comments=_echo(run))
    _print(render_table("modal analysis", rows))
    return 0


# --- budget ------------------------------------------------------------------

def _x_psd_inputs(run: RunConfig) -> tuple[tuple[float, float], str]:
    source = run.get("budget.x_psd_source")
    if source == "paper":
        return (
            (run.get("budget.x_psd_mode1"), run.get("budget.x_psd_mode2")),
            "published PSD",
        )
    if source == "analytic":
        psd = analytic_displacement_psd(
            run.system, run.environment, run.get("forcing.noise_target")
        )
        return psd, "|h|^2 * S_F"
    # simulated
    series, modes = _run_thermal_sim(run)
    seg = run.get("analysis.segment_length")
    spectrum = spectral.welch_psd(
        series.x1,
        series.dt,
        None if seg == "auto" else int(seg),
        run.get("analysis.overlap"),
    )
    band = run.environment.bandwidth
    psd = (
        spectral.band_mean_psd(spectrum, modes.f1, band),
        spectral.band_mean_psd(spectrum, modes.f2, band),
    )
    return psd, "simulated spectrum"


def _run_thermal_sim(run: RunConfig):
    system = sysmodel.build_system(run.system)
    modes = sysmodel.mode_analysis(system)
    plan = run.make_plan(modes)
    forcing = run.make_forcing(modes)
    if forcing.stochastic is None:
        raise ConfigError(
            "forcing.noise_psd: stochastic forcing required (set it to auto or > 0)"
        )
    return timesim.simulate(system, forcing, plan), modes


def _budget_report(run: RunConfig) -> tuple[NoiseBudgetReport, str]:
    x_psd, label = _x_psd_inputs(run)
    report = full_noise_budget(
        run.system, run.environment, run.transducer, run.readout, x_psd
    )
    return report, label


def _budget_rows(report: NoiseBudgetReport, x_psd_label: str) -> list[Row]:
    th, el = report.thermal, report.electronic
    rows = [
        Row("f_noise_psd", th.f_noise_psd, "N^2/Hz", "4*kB*T*c"),
        Row("f_noise_avg", th.f_noise_avg, "N^2", "psd * B"),
        Row("f_noise_rms", th.f_noise_rms, "N", "sqrt(avg)"),
        Row("x_avg_mode1", th.x_avg[0], "m^2", x_psd_label + " * B"),
        Row("x_avg_mode2", th.x_avg[1], "m^2", x_psd_label + " * B"),
        Row("x_rms_mode1", th.x_rms[0], "m", "sqrt(avg)"),
        Row("x_rms_mode2", th.x_rms[1], "m", "sqrt(avg)"),
        Row("i_mot_noise_mode1", th.i_mot_noise[0], "A_rms", "eta*omega1*x_rms"),
        Row("i_mot_noise_mode2", th.i_mot_noise[1], "A_rms", "eta*omega2*x_rms"),
        Row("r_x", el.r_x, "ohm", "input"),
        Row("i_rf", el.i_rf, "A_rms", "sqrt(4*kB*T*B/R_f)"),
        Row("i_vn", el.i_vn, "A_rms", "v_n*(1+R_x/R_f)/R_x*sqrt(B)*1.57"),
        Row("i_in", el.i_in, "A_rms", "i_n*sqrt(B)*1.57"),
        Row("i_elec_total_paper", el.i_total_paper, "A", "density RSS (no B)"),
        Row("i_elec_total_integrated", el.i_total_integrated, "A_rms", "RSS of rows"),
        Row("i_system_paper_mode1", report.i_system_paper[0], "A", "RSS of mech and elec"),
        Row("i_system_paper_mode2", report.i_system_paper[1], "A", "RSS of mech and elec"),
        Row("i_system_integrated_mode1", report.i_system_integrated[0], "A_rms", "RSS of mech and elec"),
        Row("i_system_integrated_mode2", report.i_system_integrated[1], "A_rms", "RSS of mech and elec"),
        Row("dominant_source", report.dominant_source, "-", "largest component"),
    ]
    return rows


def _budget_footnotes(report: NoiseBudgetReport) -> tuple[str, ...]:
    th = report.thermal
    implied = tuple(
        i / x if x > 0 else float("nan") for i, x in zip(th.i_mot_noise, th.x_rms)
    )
    return (
        "i_elec_total_paper follows the published final-row convention "
        "(per-rtHz densities, no bandwidth/NEB factors); "
        "i_elec_total_integrated is the internally consistent RSS of the "
        "integrated rows.",
        f"implied eta*omega from the thermal rows: mode1 = {implied[0]:.4g}, "
        f"mode2 = {implied[1]:.4g} A/m.",
    )


def cmd_budget(run: RunConfig, args) -> int:
    report, label = _budget_report(run)
    rows = _budget_rows(report, label)
    notes = _budget_footnotes(report)
    out = _out_dir(run)
    write_report(out / "budget.txt", "noise budget", rows, comments=_echo(run),
                 footnotes=notes)
    write_rows_csv(out / "budget.csv", rows, comments=_echo(run))
    _print(render_table("noise budget", rows, notes))
    return 0


# --- simulate / psd ----------------------------------------------------------

def _run_sim(run: RunConfig):
    system = sysmodel.build_system(run.system)
    modes = sysmodel.mode_analysis(system)
    plan = run.make_plan(modes)
    forcing = run.make_forcing(modes)
    series = timesim.simulate(system, forcing, plan)
    return series, modes, forcing


def cmd_simulate(run: RunConfig, args) -> int:
    series, modes, forcing = _run_sim(run)
    out = _out_dir(run)
    timesim.write_timeseries_csv(series, out / "timeseries.csv", comments=_echo(run))
    rows = [
        Row("samples", float(series.n_samples), "-", "recorded"),
        Row("dt", series.dt, "s", "after decimation"),
        Row("duration", run.get("sim.duration"), "s", "input"),
        Row("x1_rms", float(np.sqrt(np.mean(series.x1**2))), "m", "time average"),
        Row("x2_rms", float(np.sqrt(np.mean(series.x2**2))), "m", "time average"),
    ]
    if forcing.harmonic:
        drive = forcing.harmonic[0]
        steady = timesim.steady_state_amplitude(
            series, drive.frequency, run.get("analysis.window_start_fraction")
        )
        rows += [
            Row("drive_frequency", drive.frequency, "Hz", "input"),
            Row("steady_amp_x1", steady.amp1, "m", "single-bin projection"),
            Row("steady_amp_x2", steady.amp2, "m", "single-bin projection"),
            Row("phase_diff", steady.phase_diff, "rad", "x2 - x1"),
        ]
    write_report(out / "simulate_summary.txt", "simulation summary", rows,
                 comments=_echo(run))
    _print(render_table("simulation summary", rows))
    return 0


def _band_rows(name: str, spectrum: spectral.Spectrum, samples, modes, band: float) -> list[Row]:
    rows = []
    for mode_idx, f_mode in ((1, modes.f1), (2, modes.f2)):
        power = spectral.band_power(spectrum, f_mode, band)
        mean_psd = spectral.band_mean_psd(spectrum, f_mode, band)
        db_paper = spectral.to_db(mean_psd, spectral.DB_PAPER) if mean_psd > 0 else float("-inf")
        db_power = spectral.to_db(mean_psd, spectral.DB_POWER) if mean_psd > 0 else float("-inf")
        rows += [
            Row(f"{name}_band_power_f{mode_idx}", power, "m^2", f"integral over {band:g} Hz"),
            Row(f"{name}_band_psd_f{mode_idx}", mean_psd, "m^2/Hz", "band mean"),
            Row(f"{name}_band_db_paper_f{mode_idx}", db_paper, "dB/Hz", "20*log10(psd)"),
            Row(f"{name}_band_db_power_f{mode_idx}", db_power, "dB/Hz", "10*log10(psd)"),
        ]
    rows.append(
        Row(f"{name}_parseval_ratio", spectral.parseval_ratio(spectrum, samples), "-",
            "integral / mean square")
    )
    return rows


def cmd_psd(run: RunConfig, args) -> int:
    series, modes, _ = _run_sim(run)
    out = _out_dir(run)
    timesim.write_timeseries_csv(series, out / "timeseries.csv", comments=_echo(run))
    seg = run.get("analysis.segment_length")
    seg = None if seg == "auto" else int(seg)
    overlap = run.get("analysis.overlap")
    band = run.environment.bandwidth
    rows = []
    for name, samples in (("x1", series.x1), ("x2", series.x2)):
        spectrum = spectral.welch_psd(samples, series.dt, seg, overlap)
        spectral.write_spectrum_csv(spectrum, out / f"spectrum_{name}.csv", comments=_echo(run))
        rows += _band_rows(name, spectrum, samples, modes, band)
    notes = (
        "db_paper applies 20*log10 to the m^2/Hz value (the published "
        "convention, labeled dB/Hz despite the squared unit); db_power is "
        "the standard 10*log10.",
    )
    write_report(out / "psd_summary.txt", "spectral summary", rows,
                 comments=_echo(run), footnotes=notes)
    _print(render_table("spectral summary", rows, notes))
    return 0


# --- resolution ---------------------------------------------------------------

def _resolution_report(run: RunConfig):
    budget, _ = _budget_report(run)
    r_f = run.readout.r_f

    x_modes = (run.get("resolution.x_mode1"), run.get("resolution.x_mode2"))
    eta_omega = (run.get("resolution.eta_omega_mode1"), run.get("resolution.eta_omega_mode2"))
    i_system = budget.i_system_paper[0]  # best-case (mode 1) mechanical term
    voltages = reslib.compute_readout_voltages(x_modes, eta_omega, r_f, i_system)

    if run.get("resolution.v_out_source") == "paper":
        v_out = (run.get("resolution.v_out_rms_mode1"), run.get("resolution.v_out_rms_mode2"))
    else:
        v_out = tuple(m.v_out_rms for m in voltages.modes)
    if run.get("resolution.v_noise_source") == "paper":
        v_noise = run.get("resolution.v_noise_rms")
    else:
        v_noise = voltages.v_noise_rms

    derived = sysmodel.derive_quantities(run.system)
    source = run.get("resolution.sensitivity_source")
    formula = float("inf") if derived.kappa == 0 else 1.0 / (2.0 * abs(derived.kappa))
    sensitivity = (
        run.get("resolution.sensitivity_paper") if source == "paper_simulated" else formula
    )
    eff = run.get("resolution.effective_resolution")
    eff = None if eff == "auto" else float(eff)
    report = reslib.resolution_report(
        v_out_rms=v_out,
        v_noise_rms=v_noise,
        sensitivity=sensitivity,
        sensitivity_source=source,
        kappa=derived.kappa,
        bandwidth=run.environment.bandwidth,
        k_eff=derived.k_eff,
        effective_resolution=eff,
    )
    return report, voltages, budget


def _resolution_rows(run: RunConfig, report, voltages) -> tuple[list[Row], tuple[str, ...]]:
    v_src = run.get("resolution.v_out_source")
    n_src = run.get("resolution.v_noise_source")
    rows = []
    for m in voltages.modes:
        rows += [
            Row(f"x_mode{m.mode}", m.x_peak, "m_peak", "input"),
            Row(f"i_mot_mode{m.mode}", m.i_mot_peak, "A_peak", "eta*omega*x"),
            Row(f"v_out_peak_mode{m.mode}", m.v_out_peak, "V_peak", "i_mot*R_f"),
            Row(f"v_out_rms_mode{m.mode}", m.v_out_rms, "V_rms", "peak/sqrt(2)"),
        ]
    for i in (0, 1):
        rows.append(Row(f"v_out_used_mode{i+1}", report.v_out_rms[i], "V_rms", v_src))
    rows += [
        Row("v_noise", report.v_noise_rms, "V_rms", n_src),
        Row("amplitude_resolution_mode1", report.amplitude_resolution[0], "-", "v_noise/v_out"),
        Row("amplitude_resolution_mode2", report.amplitude_resolution[1], "-", "v_noise/v_out"),
        Row("ar_resolution_mode1", report.ar_resolution[0], "-", "RSS over resonators"),
        Row("ar_resolution_mode2", report.ar_resolution[1], "-", "RSS over resonators"),
        Row("snr_mode1", report.snr[0], "-", "v_out/v_noise"),
        Row("snr_mode2", report.snr[1], "-", "v_out/v_noise"),
        Row("worst_mode", float(report.worst_mode), "-", "lowest SNR"),
        Row("sensitivity", report.sensitivity, "1/dk", report.sensitivity_source),
        Row("sensitivity_formula", report.sensitivity_formula, "1/dk", "1/(2|kappa|)"),
        Row("effective_resolution", report.effective_resolution, "-", "detection-limit input"),
        Row("min_detectable_stiffness", report.min_detectable.absolute, "N/m*", "res/sens"),
        Row("min_detectable_density", report.min_detectable.density, "N/m*/rtHz", "res/sqrt(B)/sens"),
    ]
    ratio = (
        report.sensitivity_formula / report.sensitivity
        if report.sensitivity > 0 and report.sensitivity_formula != float("inf")
        else float("nan")
    )
    notes = (
        "N/m* follows the published labeling of the normalized detection "
        f"limit; the k_eff-scaled equivalent is "
        f"{report.min_detectable.scaled_by_k_eff:.4g} N/m.",
        f"sensitivity cross-check: formula/sensitivity ratio = {ratio:.3f}.",
    )
    return rows, notes


def cmd_resolution(run: RunConfig, args) -> int:
    report, voltages, _ = _resolution_report(run)
    rows, notes = _resolution_rows(run, report, voltages)
    out = _out_dir(run)
    write_report(out / "resolution.txt", "output resolution", rows,
                 comments=_echo(run), footnotes=notes)
    write_rows_csv(out / "resolution.csv", rows, comments=_echo(run))
    _print(render_table("output resolution", rows, notes))
    return 0


# --- sweep --------------------------------------------------------------------

SWEEP_HEADER = (
    "kc_n_per_m,kappa,f1_hz,f2_hz,split_hz,label1,modal_q1,modal_q2,"
    "ar_sensitivity,x_psd_mode1,x_psd_mode2,i_mot_mode1_a,i_mot_mode2_a,"
    "i_rf_a,i_vn_a,i_in_a,i_elec_paper_a,i_elec_integrated_a,"
    "i_system_paper_mode1_a,i_system_paper_mode2_a,"
    "amp_res_mode1,amp_res_mode2,ar_res_mode1,ar_res_mode2,"
    "min_detectable_norm,min_detectable_density"
)
SWEEP_FLOOR_HEADER = (
    ",floor_x1_f1_psd,floor_x1_f2_psd,floor_x2_f1_psd,floor_x2_f2_psd"
)


def _sweep_point(run: RunConfig, kc: float, index: int, simulate_floor: bool):
    system_cfg = dataclasses.replace(run.system, kc=kc)
    system = sysmodel.build_system(system_cfg)
    modes = sysmodel.mode_analysis(system)
    derived = sysmodel.derive_quantities(system_cfg)

    x_psd = analytic_displacement_psd(
        system_cfg, run.environment, run.get("forcing.noise_target")
    )
    budget = full_noise_budget(
        system_cfg, run.environment, run.transducer, run.readout, x_psd
    )
    sens = float("inf") if derived.kappa == 0 else 1.0 / (2.0 * abs(derived.kappa))

    x_modes = (run.get("resolution.x_mode1"), run.get("resolution.x_mode2"))
    eta_omega = (run.get("resolution.eta_omega_mode1"), run.get("resolution.eta_omega_mode2"))
    voltages = reslib.compute_readout_voltages(
        x_modes, eta_omega, run.readout.r_f, budget.i_system_paper[0]
    )
    report = reslib.resolution_report(
        v_out_rms=tuple(m.v_out_rms for m in voltages.modes),
        v_noise_rms=voltages.v_noise_rms,
        sensitivity=sens,
        sensitivity_source="formula",
        kappa=derived.kappa,
        bandwidth=run.environment.bandwidth,
        k_eff=derived.k_eff,
    )
    row = [
        kc, derived.kappa, modes.f1, modes.f2, modes.split_hz, modes.label1,
        modes.modal_q1, modes.modal_q2, sens,
        x_psd[0], x_psd[1],
        budget.thermal.i_mot_noise[0], budget.thermal.i_mot_noise[1],
        budget.electronic.i_rf, budget.electronic.i_vn, budget.electronic.i_in,
        budget.electronic.i_total_paper, budget.electronic.i_total_integrated,
        budget.i_system_paper[0], budget.i_system_paper[1],
        report.amplitude_resolution[0], report.amplitude_resolution[1],
        report.ar_resolution[0], report.ar_resolution[1],
        report.min_detectable.absolute, report.min_detectable.density,
    ]
    if simulate_floor:
        seed = run.require_seed() + index
        plan = run.make_plan(modes)
        forcing = timesim.Forcing(
            stochastic=timesim.StochasticDrive(
                force_psd=run.noise_psd() if run.is_stochastic
                else 4.0 * run.environment.k_boltzmann * run.environment.temperature * system_cfg.c1,
                seed=seed,
                target=run.get("forcing.noise_target"),
            )
        )
        series = timesim.simulate(system, forcing, plan)
        seg = run.get("analysis.segment_length")
        seg = None if seg == "auto" else int(seg)
        band = run.environment.bandwidth
        for samples in (series.x1, series.x2):
            spectrum = spectral.welch_psd(samples, series.dt, seg, run.get("analysis.overlap"))
            row.append(spectral.band_mean_psd(spectrum, modes.f1, band))
            row.append(spectral.band_mean_psd(spectrum, modes.f2, band))
    return row


def cmd_sweep(run: RunConfig, args) -> int:
    kc_values = run.get("sweep.kc_values")
    simulate_floor = run.get("sweep.simulate_floor")
    rows = [
        _sweep_point(run, kc, i, simulate_floor) for i, kc in enumerate(kc_values)
    ]
    header = SWEEP_HEADER + (SWEEP_FLOOR_HEADER if simulate_floor else "")
    out = _out_dir(run)
    write_csv(out / "sweep.csv", header, rows, comments=_echo(run))
    summary = [
        Row(f"kc={r[0]:g}", r[4], "Hz split", f"ar_sensitivity {r[8]:.4g}")
        for r in rows
    ]
    _print(render_table("coupling sweep", summary))
    return 0


# --- entry point ----------------------------------------------------------------

def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = _load_run(args)
        return args.func(run, args)
    except ConfigError as exc:
        print(f"cr-noise-lab: config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"cr-noise-lab: numerical failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"cr-noise-lab: invalid configuration: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
