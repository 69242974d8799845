"""Noise budget of the transimpedance readout against the mechanical floor.

Reproduces the reference design's published budget arithmetic: the thermal
pipeline down to a motional noise current, the three electronic rows, both
total conventions, and the combined system noise.
"""

from crnoise import (
    Environment,
    electronic_budget,
    full_noise_budget,
    thermal_force_psd,
    total_system_noise,
)
from crnoise.presets import (
    REF_X_PSD_MODE1,
    REF_X_PSD_MODE2,
    reference_readout,
    reference_system,
    reference_transducer,
)

env = Environment(temperature=300.0, bandwidth=10.0)
cfg = reference_system()

print("thermal pipeline (published displacement-noise PSD inputs)")
print(f"  force PSD 4*kB*T*c = {thermal_force_psd(cfg.c1, env):.4e} N^2/Hz")
report = full_noise_budget(
    cfg, env, reference_transducer(), reference_readout(),
    (REF_X_PSD_MODE1, REF_X_PSD_MODE2),
)
thermal = report.thermal
print(f"  force rms over {env.bandwidth:g} Hz = {thermal.f_noise_rms:.4e} N")
for i in (0, 1):
    print(f"  mode {i + 1}: x_rms = {thermal.x_rms[i]:.3e} m -> "
          f"i_mot = {thermal.i_mot_noise[i]:.3e} A rms")

elec = report.electronic
print("\nreadout rows (R_f = 1 Mohm, R_x = 4 Mohm, B = 10 Hz)")
print(f"  feedback resistor : {elec.i_rf:.3e} A rms")
print(f"  voltage noise     : {elec.i_vn:.3e} A rms")
print(f"  current noise     : {elec.i_in:.3e} A rms")
print(f"  total (published convention, per-rtHz densities): {elec.i_total_paper:.3e} A")
print(f"  total (integrated RSS of the rows)              : {elec.i_total_integrated:.3e} A rms")

print(f"\ndominant source: {report.dominant_source}")
total = total_system_noise(thermal.i_mot_noise[0], elec.i_total_paper)
print(f"system total (mode 1 mechanical + readout): {total:.3e} A")
print(f"  the mechanical term moves the total by only "
      f"{(total / elec.i_total_paper - 1) * 100:.3f}% - the readout dominates")

print("\nreadout noise vs motional resistance (halving R_x raises the noise gain):")
for r_x in (8e6, 4e6, 2e6, 1e6):
    b = electronic_budget(reference_readout(), r_x, env)
    print(f"  R_x = {r_x / 1e6:4.1f} Mohm: voltage-noise row {b.i_vn:.3e} A rms")
