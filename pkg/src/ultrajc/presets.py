"""Named experiment presets, one per panel (fig1a ... fig3b).

Frequencies are ratios to ``omega_0``.  Each preset expands to one
:class:`~ultrajc.experiments.ExperimentConfig` per curve or panel.
"""

from __future__ import annotations

from .errors import ConfigError
from .experiments import ExperimentConfig, InitialState, SweepAxis
from .hamiltonians import ModelParams

XI_ZERO = 2.76  # 2 xi = 5.52 sits at the second zero of J_0
G = 0.5

PLUS_COHERENT = InitialState("coherent", "plus", 0.1)
GROUND = InitialState("basis", "g", 0.0, 0)
EXCITED = InitialState("basis", "e", 0.0, 0)

# curve tag -> (omega_c, g, xi, nu)
PRESET_PARAMS = {
    "fig1a": {f"nu{v:g}": (1.0, G, XI_ZERO, v) for v in (0.0, 3.6, 4.0, 5.0)},
    "fig1b": {f"xi{v:g}": (1.0, G, v, 0.1) for v in (0.0, 10.0, 20.0, 40.0)},
    "fig1c": {"grid": (1.0, G, 0.0, 0.0)},
    "fig1d": {
        **{f"high_wc{w:g}": (w, 0.0, XI_ZERO, 5.0) for w in (0.8, 1.0, 1.2)},
        **{f"low_wc{w:g}": (w, 0.0, 30.0, 0.1) for w in (0.8, 1.0, 1.2)},
    },
    "fig2a": {f"nu{v:g}": (1.0, G, XI_ZERO, v) for v in (0.0, 3.6, 4.0, 6.0)},
    "fig2b": {f"xi{v:g}": (1.0, G, v, 0.1) for v in (0.0, 10.0, 30.0, 40.0)},
    "fig2c": {"high": (1.0, G, XI_ZERO, 5.0)},
    "fig2d": {"low": (1.0, G, 40.0, 0.1)},
    "fig3a": {"resonant": (1.0, 0.0, 0.0, 0.0)},
    "fig3b": {"diagram": (1.0, 0.0, 0.0, 0.0)},
}

PRESETS = tuple(PRESET_PARAMS)


def _params(values) -> ModelParams:
    wc, g, xi, nu = values
    return ModelParams(omega_0=1.0, omega_c=wc, g=g, xi=xi, nu=nu)


def preset_configs(name: str, cutoff: int = 20) -> list:
    if name not in PRESET_PARAMS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    curves = PRESET_PARAMS[name]
    out = []
    if name in ("fig1a", "fig1b"):
        for tag, values in curves.items():
            out.append(ExperimentConfig("fidelity_dynamics", _params(values), f"{name}_{tag}", cutoff,
                                        initial=PLUS_COHERENT))
        # inset: F(t_s) against the panel's modulation parameter
        if name == "fig1a":
            axis = SweepAxis("nu", 0.0, 8.0, 81)
            base = _params((1.0, G, XI_ZERO, 0.0))
        else:
            axis = SweepAxis("xi", 0.0, 40.0, 81)
            base = _params((1.0, G, 0.0, 0.1))
        out.append(ExperimentConfig("fidelity_sweep", base, f"{name}_inset", cutoff, initial=PLUS_COHERENT,
                                    sweep=(axis,)))
    elif name == "fig1c":
        out.append(ExperimentConfig("fidelity_sweep", _params(curves["grid"]), "fig1c", cutoff,
                                    initial=PLUS_COHERENT,
                                    sweep=(SweepAxis("nu", 0.0, 8.0, 50), SweepAxis("xi", 0.0, 3.0, 50))))
    elif name == "fig1d":
        for tag, values in curves.items():
            out.append(ExperimentConfig("fidelity_sweep", _params(values), f"fig1d_{tag}", cutoff,
                                        initial=PLUS_COHERENT, sweep=(SweepAxis("g", 0.05, 1.5, 30),), fmt="csv"))
    elif name in ("fig2a", "fig2b"):
        for tag, values in curves.items():
            out.append(ExperimentConfig("population_dynamics", _params(values), f"{name}_{tag}", cutoff,
                                        initial=GROUND, targets=(("g", 0),)))
    elif name in ("fig2c", "fig2d"):
        for tag, values in curves.items():
            out.append(ExperimentConfig("population_dynamics", _params(values), f"{name}_{tag}", cutoff,
                                        initial=EXCITED, targets=(("e", 0), ("g", 1))))
    elif name == "fig3a":
        out.append(ExperimentConfig("spectrum", _params(curves["resonant"]), "fig3a", cutoff,
                                    g_axis=SweepAxis("g", 0.0, 3.0, 301), n_max=8))
    else:
        out.append(ExperimentConfig("phase_diagram", _params(curves["diagram"]), "fig3b", cutoff,
                                    g_axis=SweepAxis("g", 0.0, 3.0, 151), delta_axis=SweepAxis("delta", -0.9, 1.0, 96)))
    return out
