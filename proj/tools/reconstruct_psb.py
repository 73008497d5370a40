"""Regenerates data/reference_psb.csv, data/highT_lifetimes.csv and
data/mix_series_example.csv.

All tables are reconstructions, not measurements. The sideband is the
compound-Poisson image of a one-phonon model (acoustic band plus optical
features near 64, 90 and 140 meV) with S0 = 3.49. The lifetimes follow a
Mott-Seitz turn-on with small deterministic offsets. The mixing series is the
two-phonon Raman rate for eta = 44 MHz meV^-3 with 3 % seeded noise.
"""

import argparse
import math
import pathlib

import numpy as np
from scipy import integrate

STEP = 0.25
S0 = 3.49


def gauss(w, mu, sigma):
    g = np.exp(-0.5 * ((w - mu) / sigma) ** 2)
    return g / (g.sum() * STEP)


def one_phonon():
    w = np.arange(0.0, 200.0 + STEP / 2, STEP)
    acoustic = w**3 * np.exp(-((w / 48.0) ** 4))
    acoustic /= acoustic.sum() * STEP
    f = 0.35 * acoustic + 0.40 * gauss(w, 64.0, 5.0) + 0.25 * gauss(w, 90.0, 12.0) + 0.05 * gauss(w, 140.0, 12.0)
    f[0] = 0.0
    return f / (f.sum() * STEP)


def overlap(f, extent=1000.0):
    n = 1 << 16
    spectrum = np.fft.rfft(f * STEP, n)
    F = np.fft.irfft(math.exp(-S0) * np.expm1(S0 * spectrum), n) / STEP
    F = np.clip(F[: int(round(extent / STEP)) + 1], 0.0, None)
    return F


def write_psb(path):
    F = overlap(one_phonon())
    lines = [
        "# Reconstructed low-temperature vibrational overlap function F(omega), meV^-1.",
        "# Compound-Poisson sideband of a model one-phonon density, S0 = 3.49; approximate, not measured.",
        "omega_meV,value",
    ]
    lines += ["%.12g,%.15g" % (i * STEP, v) for i, v in enumerate(F)]
    path.write_text("\n".join(lines) + "\n")


def write_lifetimes(path):
    tau0, gamma_rad, s, barrier = 12.0, 13.2, 5.2e6, 0.94
    kb = 0.08617333
    rows = ["# Reconstructed high-temperature lifetimes (ns); approximate, illustrative.",
            "temperature_K,tau_ns,sigma_ns,spin_class"]
    offsets = [0.15, -0.1, 0.05, -0.2, 0.1, -0.05, 0.2, -0.15, 0.0, 0.1]
    temps = [295, 350, 400, 450, 500, 550, 600, 625, 650, 700]
    for k, t in enumerate(temps):
        rate = 1.0 / tau0 + 2 * math.pi * gamma_rad * 1e-3 * s * math.exp(-barrier * 1000 / (kb * t))
        tau = 1.0 / rate + offsets[k]
        sigma = 0.5 if t < 600 else 0.4
        rows.append("%g,%.3f,%.2f,ms0" % (t, tau, sigma))
    for t, tau, sigma in [(295, 7.8, 0.4), (400, 7.5, 0.4), (500, 7.2, 0.5), (600, 6.6, 0.5), (700, 5.1, 0.6)]:
        rows.append("%g,%.3f,%.2f,ms1" % (t, tau, sigma))
    path.write_text("\n".join(rows) + "\n")


def write_mix_series(path):
    kb, mhz_per_mev, eta = 0.08617333, 241798.92, 44.0
    dxy = 3.9 / 241.79892
    rng = np.random.default_rng(20140101)
    rows = ["# Synthetic two-phonon mixing rates, eta = 44 MHz meV^-3, Delta_xy = 3.9 GHz, 3 % noise.",
            "temperature_K,gamma_mix_MHz,sigma_MHz"]
    for t in range(4, 22, 2):
        kt = kb * t
        xd = dxy / kt
        alpha = integrate.quad(lambda x: x**4 / math.expm1(x) * (1 / math.expm1(x + xd) + 1), 0, 80,
                               epsabs=0, epsrel=1e-13, limit=200)[0]
        g = 64 / math.pi * alpha * (eta / mhz_per_mev) ** 2 * kt**5 * mhz_per_mev
        rows.append("%g,%.6g,%.3g" % (t, g * (1 + 0.03 * rng.standard_normal()), 0.03 * g))
    path.write_text("\n".join(rows) + "\n")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_psb(out / "reference_psb.csv")
    write_lifetimes(out / "highT_lifetimes.csv")
    write_mix_series(out / "mix_series_example.csv")
    (out / "reference_psb.manifest").write_text(
        "# Reconstructed reference sideband\nf0_csv = reference_psb.csv\ns0 = 3.49\nomega_mev = 200\n")


if __name__ == "__main__":
    main()
