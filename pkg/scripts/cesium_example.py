"""Lossy Efimov trimers in physical units for cesium-133 with R_t = 30 nm."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import scipy.constants as const

from efimov import core


@dataclass(frozen=True)
class CesiumConfig:
    eta_star: float = 0.06
    rt_nm: float = 30.0
    mass_amu: float = 133.0
    n_min: int = -1
    n_max: int = 1


def table(cfg: CesiumConfig) -> list[tuple]:
    s = core.channel_exponent()
    units = core.UnitSystem.from_nm_amu(cfg.rt_nm, cfg.mass_amu)
    rows = []
    for n in range(cfg.n_min, cfg.n_max + 1):
        state = core.analytic_state(n, core.ModelParams(cfg.eta_star), s)
        energy_j, gamma_hz, size_m = core.to_physical_units(state, units)
        rows.append((n, energy_j.real / const.k, gamma_hz, size_m * 1e9))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--eta", type=float, default=CesiumConfig.eta_star)
    parser.add_argument("--rt-nm", type=float, default=CesiumConfig.rt_nm)
    args = parser.parse_args()
    cfg = CesiumConfig(eta_star=args.eta, rt_nm=args.rt_nm)
    print(f"eta* = {cfg.eta_star}, loss probability per short-range visit = "
          f"{core.loss_probability(cfg.eta_star):.4f}")
    print(f"{'n':>3} {'Re E / k_B [K]':>16} {'Gamma [1/s]':>14} {'size [nm]':>12}")
    for n, temp, gamma, size in table(cfg):
        print(f"{n:>3d} {temp:>16.6e} {gamma:>14.6e} {size:>12.4f}")


if __name__ == "__main__":
    main()
