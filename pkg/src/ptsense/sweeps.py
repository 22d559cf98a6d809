"""Parameter sweeps over (gamma/omega, tau, delta) producing flat datasets.

Every grid point is evaluated by pure closed-form calls, so points can be
fanned out to a thread pool; rows are sorted before writing, which makes the
parallel and serial outputs byte-identical.  Floats are serialized with
repr() (shortest round-trip, at most 17 significant digits); non-finite or
failed entries are the literal strings "inf"/"undefined"; complex spectra are
serialized like "-0.6+0.8j".
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import metrology
from .dilation import evolve_enlarged, postselect
from .errors import ConfigError, PtsenseError, WriteError
from .lindblad import analytic_rho_3l, artificial_pt, effective_evolve, liouvillian_matrix, postselect_3l
from .metrology import FdConfig, qfi_two_level
from .params import PtParams
from .pt_system import evolve_density
from .states import bloch_probe, minus_y, plus_y, pure_density

__all__ = ["SweepConfig", "RecordRow", "run", "figure_preset", "QUANTITIES", "SCHEMES", "FIGURE_NAMES"]

QUANTITIES = (
    "population",
    "postselect_rates",
    "population_shift",
    "susceptibility",
    "qfi_single",
    "qfi_weighted",
    "sensitivity_bound",
    "resources",
    "liouvillian_spectrum",
)
SCHEMES = ("pt", "dilation", "lindblad")
CSV_HEADER = "tau,t,gamma_ratio,delta_ratio,quantity,value,scheme,probe"

# gamma/omega grids used by the figure presets: a dynamics set and a denser
# resource set with a near-exceptional-point member each (the exact near-EP
# offsets are recorded in the run summary).
DYNAMICS_GAMMAS = (0.0, 0.5, 0.9, 1.0 - 1e-5)
RESOURCE_GAMMAS = (0.0, 0.3, 0.6, 0.9, 1.0 - 1e-6)


@dataclass(frozen=True)
class SweepConfig:
    quantities: tuple[str, ...]
    schemes: tuple[str, ...]
    gamma_ratios: tuple[float, ...]
    omega: float = 1.0
    delta_ratios: tuple[float, ...] = (0.0,)
    tau_max: float = 4.0 * math.pi
    tau_steps: int = 129
    probe: str = "plus_y"
    probe_theta: float | None = None
    probe_phi: float | None = None
    repetitions: int = 1
    fd_h: float = 1e-6  # relative to omega
    output_path: str = "sweep.csv"
    format: str = "csv"
    threads: int = 0  # 0 = machine parallelism

    def __post_init__(self) -> None:
        for q in self.quantities:
            if q not in QUANTITIES:
                raise ConfigError(f"quantity: unknown value {q!r}")
        if not self.quantities:
            raise ConfigError("quantity: at least one required")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"scheme: unknown value {s!r}")
        if not self.schemes:
            raise ConfigError("scheme: at least one required")
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ConfigError("omega: must be positive")
        if not self.gamma_ratios:
            raise ConfigError("gamma_list: at least one ratio required")
        for g in self.gamma_ratios:
            if not (0.0 <= g <= 1.0):
                raise ConfigError(f"gamma_list: ratio {g!r} outside [0, 1]")
        for d in self.delta_ratios:
            if not (0.0 <= d <= 0.1):
                raise ConfigError(f"delta_list: ratio {d!r} outside [0, 0.1]")
        if self.tau_steps < 2:
            raise ConfigError("tau_steps: must be at least 2")
        if not (math.isfinite(self.tau_max) and self.tau_max > 0):
            raise ConfigError("tau_max: must be positive")
        if self.probe not in ("plus_y", "minus_y", "custom"):
            raise ConfigError(f"probe: unknown value {self.probe!r}")
        if self.probe == "custom" and (self.probe_theta is None or self.probe_phi is None):
            raise ConfigError("probe: custom probe requires probe_theta and probe_phi")
        if self.repetitions < 1:
            raise ConfigError("N: repetitions must be >= 1")
        if not (0.0 < self.fd_h <= 1e-3):
            raise ConfigError("fd_h: relative step must be in (0, 1e-3]")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format: unknown value {self.format!r}")
        if self.threads < 0:
            raise ConfigError("threads: must be >= 0 (0 = machine parallelism)")

    @staticmethod
    def from_mapping(data: dict) -> "SweepConfig":
        """Build from a flat key-value document (the JSON config format)."""
        known = {
            "quantity", "scheme", "omega", "gamma_list", "delta_list", "tau_max",
            "tau_steps", "probe", "probe_theta", "probe_phi", "N", "fd_h",
            "output_path", "format", "threads",
        }
        for key in data:
            if key not in known:
                raise ConfigError(f"{key}: unknown config field")

        def as_tuple(value):
            if isinstance(value, (list, tuple)):
                return tuple(value)
            return (value,)

        kwargs = {}
        if "quantity" in data:
            kwargs["quantities"] = as_tuple(data["quantity"])
        else:
            raise ConfigError("quantity: required field missing")
        if "scheme" in data:
            kwargs["schemes"] = as_tuple(data["scheme"])
        else:
            raise ConfigError("scheme: required field missing")
        if "gamma_list" not in data:
            raise ConfigError("gamma_list: required field missing")
        kwargs["gamma_ratios"] = tuple(float(g) for g in as_tuple(data["gamma_list"]))
        if "delta_list" in data:
            kwargs["delta_ratios"] = tuple(float(d) for d in as_tuple(data["delta_list"]))
        for src, dst, conv in (
            ("omega", "omega", float), ("tau_max", "tau_max", float),
            ("tau_steps", "tau_steps", int), ("probe", "probe", str),
            ("probe_theta", "probe_theta", float), ("probe_phi", "probe_phi", float),
            ("N", "repetitions", int), ("fd_h", "fd_h", float),
            ("output_path", "output_path", str), ("format", "format", str),
            ("threads", "threads", int),
        ):
            if src in data and data[src] is not None:
                try:
                    kwargs[dst] = conv(data[src])
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"{src}: {exc}") from exc
        return SweepConfig(**kwargs)

    def probe_vector(self) -> np.ndarray:
        if self.probe == "plus_y":
            return plus_y()
        if self.probe == "minus_y":
            return minus_y()
        return bloch_probe(self.probe_theta, self.probe_phi)

    def probe_label(self) -> str:
        if self.probe == "custom":
            return f"custom({self.probe_theta!r},{self.probe_phi!r})"
        return self.probe


@dataclass(frozen=True)
class RecordRow:
    tau: float
    t: float
    gamma_ratio: float
    delta_ratio: float
    quantity: str
    value: object  # float, complex, or None for "undefined"
    scheme: str
    probe: str

    def sort_key(self):
        return (self.gamma_ratio, self.delta_ratio, self.tau, self.quantity, self.scheme, self.probe)


def _fmt(value) -> str:
    if value is None:
        return "undefined"
    if isinstance(value, complex):
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            return "undefined"
        return repr(value).strip("()")
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "undefined"
    return repr(v)


def _requires_plus_y(config: SweepConfig, quantity: str) -> None:
    if config.probe != "plus_y":
        raise ConfigError(f"probe: quantity {quantity!r} is defined for the plus_y probe only")


def _evaluate_point(config: SweepConfig, scheme: str, gamma_ratio: float,
                    delta_ratio: float, tau: float) -> list[RecordRow]:
    """All (quantity, value) rows of one grid point; failures become undefined."""
    omega = config.omega
    gamma = gamma_ratio * omega
    delta = delta_ratio * omega
    base = PtParams(omega=omega, gamma=gamma)
    kappa = base.kappa
    probe = config.probe_vector()
    fd = FdConfig(h=config.fd_h * omega)
    n_rep = config.repetitions

    def rows_for(quantity: str) -> list[tuple[str, object]]:
        if quantity == "liouvillian_spectrum":
            if scheme != "lindblad":
                raise ConfigError("quantity: liouvillian_spectrum requires scheme lindblad")
            if tau != 0.0:
                return []  # spectrum is time-independent; emitted once at tau = 0
            _, values = liouvillian_matrix(PtParams(omega=omega + delta, gamma=gamma))
            ordered = sorted(values, key=lambda z: (round(z.imag, 12), round(z.real, 12)))
            return [(f"liouvillian_eig_{i + 1}", complex(z)) for i, z in enumerate(ordered)]

        if kappa == 0.0 and tau > 0.0:
            # exceptional point: finite tau is unreachable (kappa = 0)
            return [(f"{quantity}_undefined", None)]
        t = tau / kappa if tau > 0.0 else 0.0
        op = PtParams(omega=omega + delta, gamma=gamma)  # operating point

        if quantity == "population":
            if scheme == "pt":
                state = evolve_density(pure_density(probe), op, t)
                return [("population_1", state.matrix[0, 0].real),
                        ("population_2", state.matrix[1, 1].real)]
            if scheme == "dilation":
                pops = evolve_enlarged(probe, op, t).populations
                return [(f"population_{i + 1}", float(pops[i])) for i in range(4)]
            _requires_plus_y(config, quantity)
            rho3 = analytic_rho_3l(op, t)
            eff = effective_evolve(probe, op, t)
            out = [(f"population_{i + 1}", float(rho3.populations[i])) for i in range(3)]
            out.append(("population_eff_1", float(eff.matrix[0, 0].real)))
            if op.gamma * t <= 700.0:
                amplified = artificial_pt(op, t, eff)
                out.append(("population_artificial_1", float(amplified.matrix[0, 0].real)))
            else:
                out.append(("population_artificial_1", None))
            return out

        if quantity == "postselect_rates":
            if scheme == "dilation":
                outcome = postselect(evolve_enlarged(probe, op, t))
                rows = [("p_suc", outcome.p_suc), ("p_fail", outcome.p_fail),
                        ("rho_pt_11", outcome.rho_pt.matrix[0, 0].real)]
                rows.append(("rho_a_11", outcome.rho_a.matrix[0, 0].real if outcome.rho_a else None))
                return rows
            if scheme == "lindblad":
                _requires_plus_y(config, quantity)
                outcome = postselect_3l(analytic_rho_3l(op, t))
                return [("p_suc", outcome.p_suc), ("p_fail", outcome.p_fail),
                        ("rho_pt_11", outcome.rho_pt.matrix[0, 0].real)]
            raise ConfigError("quantity: postselect_rates requires scheme dilation or lindblad")

        if quantity == "population_shift":
            _requires_plus_y(config, quantity)
            shift_scheme = {"pt": "pt", "dilation": "enlarged", "lindblad": "eff"}[scheme]
            return [("population_shift_1", metrology.population_shift(shift_scheme, base, delta, t))]

        if quantity == "susceptibility":
            _requires_plus_y(config, quantity)
            if scheme == "pt":
                return [("susceptibility_pt", metrology.susceptibility_pt(op, t, fd)),
                        ("susceptibility_a", metrology.susceptibility_a(op, t, fd))]
            if scheme == "dilation":
                return [("susceptibility_4d_pt", metrology.susceptibility_enlarged(op, t, fd, index=0)),
                        ("susceptibility_4d_a", metrology.susceptibility_enlarged(op, t, fd, index=2))]
            return [("susceptibility_eff", metrology.susceptibility_eff(op, t, fd))]

        if quantity in ("qfi_single", "qfi_weighted", "sensitivity_bound", "resources"):
            if scheme == "pt":
                if quantity in ("qfi_weighted", "resources"):
                    raise ConfigError(f"quantity: {quantity} requires scheme dilation or lindblad")
                f_pt = _qfi_pt_direct(probe, op, t, fd)
                if quantity == "qfi_single":
                    return [("qfi_pt", f_pt)]
                bound = 1.0 / math.sqrt(n_rep * f_pt) if f_pt > 0 else math.inf
                return [("delta_omega_pt", bound)]
            if scheme == "dilation":
                report = metrology.weighted_qfi_scheme1(op, t, fd, probe=probe, n_repetitions=n_rep)
                if quantity == "qfi_single":
                    return [("qfi_pt", report.f_suc), ("qfi_a", report.f_fail),
                            ("qfi_4d", report.f_total)]
                if quantity == "qfi_weighted":
                    return [("i_suc", report.i_suc), ("i_fail", report.i_fail),
                            ("i_subs", report.i_subs), ("i_4d", report.i_total)]
                if quantity == "sensitivity_bound":
                    return [("delta_omega_subs", report.delta_omega_weighted),
                            ("delta_omega_4d", report.delta_omega_total)]
                metrics = metrology.resource_metrics(op, t, fd, probe=probe)
                return [("xi", metrics.xi), ("zeta", metrics.zeta)]
            _requires_plus_y(config, quantity)
            if quantity == "resources":
                raise ConfigError("quantity: resources requires scheme dilation")
            report = metrology.weighted_qfi_scheme2(op, t, fd, n_repetitions=n_rep)
            if quantity == "qfi_single":
                return [("qfi_eff", report.f_total), ("qfi_conditioned", report.f_suc)]
            if quantity == "qfi_weighted":
                return [("i_eff", report.i_total)]
            return [("delta_omega_eff", report.delta_omega_weighted),
                    ("delta_omega_eff_single", report.delta_omega_total)]

        raise ConfigError(f"quantity: unknown value {quantity!r}")

    rows: list[RecordRow] = []
    t_out = tau / kappa if kappa > 0.0 else (0.0 if tau == 0.0 else math.inf)
    for quantity in config.quantities:
        try:
            pairs = rows_for(quantity)
        except ConfigError:
            raise
        except PtsenseError:
            pairs = [(f"{quantity}_undefined", None)]
        for name, value in pairs:
            rows.append(RecordRow(
                tau=tau, t=t_out, gamma_ratio=gamma_ratio, delta_ratio=delta_ratio,
                quantity=name, value=value, scheme=scheme, probe=config.probe_label(),
            ))
    return rows


def _qfi_pt_direct(probe: np.ndarray, p: PtParams, t: float, fd: FdConfig):
    base = evolve_density(pure_density(probe), p, t)
    h = min(fd.h, 0.25 * (p.omega - p.gamma)) if p.gamma > 0 else fd.h

    def family(omega: float) -> np.ndarray:
        return evolve_density(pure_density(probe), p.with_omega(omega), t).matrix

    d_h = (family(p.omega + h) - family(p.omega - h)) / (2.0 * h)
    if fd.richardson:
        d_h2 = (family(p.omega + 0.5 * h) - family(p.omega - 0.5 * h)) / h
        d_h = (4.0 * d_h2 - d_h) / 3.0
    return qfi_two_level(base, d_h)


def _validate_combinations(config: SweepConfig) -> None:
    """Reject scheme/quantity pairs eagerly so bad configs fail before work."""
    for quantity in config.quantities:
        for scheme in config.schemes:
            if quantity in ("postselect_rates", "qfi_weighted") and scheme == "pt":
                raise ConfigError(f"quantity: {quantity} requires scheme dilation or lindblad")
            if quantity == "resources" and scheme != "dilation":
                raise ConfigError("quantity: resources requires scheme dilation")
            if quantity == "liouvillian_spectrum" and scheme != "lindblad":
                raise ConfigError("quantity: liouvillian_spectrum requires scheme lindblad")


def run(config: SweepConfig, output_path: str | None = None, threads: int | None = None) -> Path:
    """Execute the sweep and write the dataset; returns the output path.

    Prints a one-line summary (row count and min/max of the finite values)
    plus the grid parameters, so preset choices are recorded alongside the
    dataset without touching the byte-stable CSV itself.
    """
    _validate_combinations(config)
    path = Path(output_path if output_path is not None else config.output_path)
    n_threads = threads if threads is not None else config.threads
    if n_threads == 0:
        n_threads = os.cpu_count() or 1

    taus = [config.tau_max * i / (config.tau_steps - 1) for i in range(config.tau_steps)]
    points = [
        (scheme, g, d, tau)
        for g in config.gamma_ratios
        for d in config.delta_ratios
        for tau in taus
        for scheme in config.schemes
    ]

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            chunks = list(pool.map(lambda args: _evaluate_point(config, *args), points))
    else:
        chunks = [_evaluate_point(config, *point) for point in points]
    rows = sorted((row for chunk in chunks for row in chunk), key=RecordRow.sort_key)

    try:
        if config.format == "csv":
            lines = [CSV_HEADER]
            for r in rows:
                lines.append(",".join([
                    _fmt(r.tau), _fmt(r.t), _fmt(r.gamma_ratio), _fmt(r.delta_ratio),
                    r.quantity, _fmt(r.value), r.scheme, r.probe,
                ]))
            path.write_text("\n".join(lines) + "\n")
        else:
            payload = []
            for r in rows:
                value = r.value
                if isinstance(value, complex) or value is None or not math.isfinite(float(value)):
                    value = _fmt(r.value)
                else:
                    value = float(value)
                payload.append({
                    "tau": r.tau, "t": r.t if math.isfinite(r.t) else _fmt(r.t),
                    "gamma_ratio": r.gamma_ratio, "delta_ratio": r.delta_ratio,
                    "quantity": r.quantity, "value": value,
                    "scheme": r.scheme, "probe": r.probe,
                })
            path.write_text(json.dumps(payload, separators=(",", ":")) + "\n")
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}") from exc

    finite = [float(r.value) for r in rows
              if isinstance(r.value, (int, float)) and math.isfinite(float(r.value))]
    lo = min(finite) if finite else math.nan
    hi = max(finite) if finite else math.nan
    print(f"wrote {path} rows={len(rows)} value_min={_fmt(lo)} value_max={_fmt(hi)}")
    print(f"grid: omega={config.omega!r} gamma_ratios={list(config.gamma_ratios)!r} "
          f"delta_ratios={list(config.delta_ratios)!r} tau_max={config.tau_max!r} "
          f"tau_steps={config.tau_steps} probe={config.probe_label()} N={config.repetitions}")
    return path


_FIGURE_PRESETS = {
    # population and post-selection dynamics of the enlarged system
    "fig2": dict(quantities=("population", "postselect_rates"), schemes=("dilation",),
                 gamma_ratios=DYNAMICS_GAMMAS),
    # dissipative three-level populations and success rate
    "fig3": dict(quantities=("population", "postselect_rates"), schemes=("lindblad",),
                 gamma_ratios=DYNAMICS_GAMMAS),
    # population response to a coupling perturbation, all three systems
    "fig4": dict(quantities=("population_shift",), schemes=("pt", "dilation", "lindblad"),
                 gamma_ratios=DYNAMICS_GAMMAS, delta_ratios=(0.001, 0.005)),
    # susceptibilities, with and without perturbation offsets
    "fig5": dict(quantities=("susceptibility",), schemes=("pt", "dilation", "lindblad"),
                 gamma_ratios=DYNAMICS_GAMMAS, delta_ratios=(0.0, 0.001, 0.005)),
    # QFI and sensitivity bounds for both schemes
    "fig6": dict(quantities=("qfi_single", "qfi_weighted", "sensitivity_bound", "postselect_rates"),
                 schemes=("dilation", "lindblad"), gamma_ratios=RESOURCE_GAMMAS),
    # information cost and sensitivity loss of post-selection
    "fig7": dict(quantities=("qfi_weighted", "resources"), schemes=("dilation",),
                 gamma_ratios=RESOURCE_GAMMAS),
}

FIGURE_NAMES = tuple(sorted(_FIGURE_PRESETS))


def figure_preset(name: str) -> SweepConfig:
    """Sweep configuration reproducing one of the standard figure datasets."""
    try:
        preset = _FIGURE_PRESETS[name]
    except KeyError:
        raise ConfigError(f"figure: unknown preset {name!r}; pick one of {', '.join(FIGURE_NAMES)}") from None
    return SweepConfig(
        omega=1.0,
        tau_max=4.0 * math.pi,
        tau_steps=129,
        probe="plus_y",
        repetitions=1,
        output_path=f"{name}.csv",
        **preset,
    )
