"""Command-line scenario runner.

Usage::

    modconc <subcommand> --config <path> [--out <path>] [--format csv|json] [--seed N]

Subcommands are ``modular``, ``susy``, ``udw``, ``sweep`` and ``verify``.  The
configuration is a YAML (or JSON) mapping; every section and key is checked
against a fixed schema and unknown keys are rejected.  A run either emits its
whole table or nothing.

Exit codes: 0 success, 1 invariant failure (``verify`` only), 2 configuration
or precondition error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np
import yaml

from .config import Tolerances
from .entanglement import (
    TSIRELSON,
    BellSettings,
    chsh_objective,
    concurrence_pure,
    j_ab_operator,
    max_violation_from_concurrence,
    maximize_chsh,
    wootters_concurrence,
    density,
)
from .errors import ConfigError, ModconcError, TruncationWarning
from .fock import (
    ModeSystem,
    annihilation,
    dephasing_weyl,
    restrict,
    safe_indices,
    vacuum_expectation,
    weyl_relation_residual,
)
from .linalg import AntilinearOperator, antilinear_polar, commutator, hermitian_eig, hermitian_power, op_norm
from .modular import (
    AlgebraBasis,
    random_standard_instance,
    schmidt_vector,
    tomita,
    verify_modular_properties,
)
from .susy import SusyModel, energy, supermultiplet_state, susy_concurrence, verify_intertwining
from .udw import (
    FieldModel,
    GaussianTestFunction,
    UDW_OPTIMAL_SETTINGS,
    UdwScenario,
    chsh_udw,
    chsh_udw_objective,
    default_pair,
    evolved_state_analytic,
    evolved_state_numeric,
    gram_matrix,
    pair_with_norm,
    reduced_detector_density,
    refinement_change,
    three_way_concurrence,
    udw_concurrence,
)

SUBCOMMANDS = ("modular", "susy", "udw", "sweep", "verify")
MIN_CUTOFF = 4
FLOAT_FORMAT = "%.16e"


# --------------------------------------------------------------------------- config

_SCHEMA: dict[str, dict[str, Any]] = {
    "": {"seed": int, "format": str, "tolerances": dict,
         "modular": dict, "susy": dict, "udw": dict, "sweep": dict, "verify": dict},
    "tolerances": {name: float for name in Tolerances.names()},
    "modular": {"case": str, "p": float, "blocks": list, "instances": int,
                "generators": list, "omega": list},
    "susy": {"n_max": int, "hbar_omega": float, "states": list, "alpha_sweep": dict},
    "susy.states": {"k": int, "l": int, "alpha": float, "beta": float},
    "susy.alpha_sweep": {"k": int, "l": int, "points": int},
    "udw": {"r": list, "hh": list, "smearing": dict, "n_max": int, "gap": float, "settings": list},
    "udw.smearing": {"separation": float, "sigma_t": float, "sigma_x": float,
                     "spatial_dim": int, "mass": float},
    "sweep": {"r": float, "separations": list, "sigma_t": float, "sigma_x": float,
              "spatial_dim": int, "mass": float, "time_offset": float, "amplitude": float},
    "verify": {"tolerance": float, "n_max": int, "hh": float, "instances": int, "suites": list},
}


def _check_type(path: str, value, expected) -> None:
    if expected is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif expected is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, expected)
    if not ok:
        raise ConfigError(f"{path}: expected {expected.__name__}, got {type(value).__name__}")


def _validate_mapping(section: str, data: dict) -> None:
    schema = _SCHEMA[section]
    for key, value in data.items():
        path = f"{section}.{key}" if section else key
        if key not in schema:
            raise ConfigError(f"unknown configuration key {path!r}")
        _check_type(path, value, schema[key])
        if path in _SCHEMA:
            sub = path
            if isinstance(value, dict):
                _validate_mapping(sub, value)
            elif isinstance(value, list):
                for i, item in enumerate(value):
                    if not isinstance(item, dict):
                        raise ConfigError(f"{path}[{i}]: expected a mapping")
                    _validate_mapping(sub, item)


@dataclass
class RunConfig:
    """Validated run configuration.

    ``sections`` keeps the raw per-subcommand mappings; ``tolerances`` is the
    merged :class:`Tolerances`.
    """

    subcommand: str
    seed: int = 42
    fmt: str = "csv"
    out: Path | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    sections: dict[str, dict] = field(default_factory=dict)

    def section(self, name: str) -> dict:
        return dict(self.sections.get(name, {}))


def _cutoff(value, where: str) -> int:
    if value < MIN_CUTOFF:
        raise ConfigError(f"{where}: cutoff {value} is below the minimum {MIN_CUTOFF}")
    return int(value)


def load_config(subcommand: str, path: str | Path | None, overrides: dict | None = None) -> RunConfig:
    """Parse and validate a configuration file.

    Raises
    ------
    ConfigError
        On unreadable files, unknown keys, wrong types, non-positive
        tolerances or cutoffs below 4.
    """
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    raw: Any = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        if raw is None:
            raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("top level of the config must be a mapping")
    _validate_mapping("", raw)

    try:
        tol = Tolerances(**{k: float(v) for k, v in raw.get("tolerances", {}).items()})
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    overrides = overrides or {}
    fmt = overrides.get("format") or raw.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    seed = overrides.get("seed")
    seed = raw.get("seed", 42) if seed is None else seed
    out = overrides.get("out")
    sections = {k: raw[k] for k in SUBCOMMANDS if k in raw}
    for name in ("susy", "udw", "verify"):
        if "n_max" in sections.get(name, {}):
            _cutoff(sections[name]["n_max"], f"{name}.n_max")
    vt = sections.get("verify", {}).get("tolerance")
    if vt is not None and not vt > 0:
        raise ConfigError("verify.tolerance must be positive")
    return RunConfig(subcommand, int(seed), fmt, Path(out) if out else None, tol, sections)


# --------------------------------------------------------------------------- output


@dataclass
class ResultTable:
    """Rectangular table with a ``provenance`` column on every row."""

    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    sort_keys: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("column names must be unique")
        if "provenance" not in self.columns:
            self.columns = [*self.columns, "provenance"]

    def add(self, provenance: str, **values) -> None:
        row = {**values, "provenance": provenance}
        if set(row) != set(self.columns):
            missing = set(self.columns) ^ set(row)
            raise ValueError(f"row does not match columns: {sorted(missing)}")
        self.rows.append(row)

    def sorted_rows(self) -> list[dict]:
        if not self.sort_keys:
            return list(self.rows)
        return sorted(self.rows, key=lambda r: tuple(r[k] for k in self.sort_keys))

    def column(self, name: str) -> list:
        return [r[name] for r in self.sorted_rows()]


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FORMAT % float(v)
    return str(v)


def _json_value(v) -> str:
    if isinstance(v, (bool, np.bool_, int, np.integer)):
        return format_value(v)
    if isinstance(v, (float, np.floating)):
        return FLOAT_FORMAT % float(v) if math.isfinite(v) else json.dumps(str(float(v)))
    return json.dumps(str(v), ensure_ascii=False)


def render(table: ResultTable, fmt: str) -> str:
    """Serialise with fixed float formatting so identical runs give identical bytes."""
    rows = table.sorted_rows()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        for row in rows:
            writer.writerow([format_value(row[c]) for c in table.columns])
        return buf.getvalue()
    items = []
    for row in rows:
        body = ", ".join(f"{json.dumps(c)}: {_json_value(row[c])}" for c in table.columns)
        items.append("  {" + body + "}")
    return "[\n" + ",\n".join(items) + "\n]\n" if items else "[]\n"


# --------------------------------------------------------------------------- modular


def _matrix_units(n: int) -> list[np.ndarray]:
    out = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0
            out.append(e)
    return out


def _qubit_algebra() -> AlgebraBasis:
    return AlgebraBasis.from_span([np.kron(e, np.eye(2)) for e in _matrix_units(2)])


BUILTIN_MODULAR_CASES: dict[str, Callable[[dict], tuple[AlgebraBasis, np.ndarray]]] = {
    "bell-phi-plus": lambda sec: (_qubit_algebra(), schmidt_vector(0.5)),
    "bell-psi-plus": lambda sec: (_qubit_algebra(),
                                  np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)),
    "schmidt": lambda sec: (_qubit_algebra(), schmidt_vector(float(sec.get("p", 0.3)))),
}


def _modular_cases(cfg: RunConfig) -> list[tuple[str, AlgebraBasis, np.ndarray]]:
    sec = cfg.section("modular")
    case = sec.get("case", "bell-phi-plus")
    if case in BUILTIN_MODULAR_CASES:
        basis, omega = BUILTIN_MODULAR_CASES[case](sec)
        return [(case, basis, omega)]
    if case == "random":
        blocks = sec.get("blocks", [2, 1])
        if not blocks or not all(isinstance(b, int) and b >= 1 for b in blocks):
            raise ConfigError("modular.blocks must be a list of positive integers")
        rng = np.random.default_rng(cfg.seed)
        count = sec.get("instances", 1)
        out = []
        for i in range(count):
            basis, omega = random_standard_instance(rng, blocks, cfg.tolerances)
            out.append((f"random-{i:03d}", basis, omega))
        return out
    if case == "custom":
        if "generators" not in sec or "omega" not in sec:
            raise ConfigError("custom modular case needs 'generators' and 'omega'")
        try:
            mats = [np.asarray(g, dtype=float) for g in sec["generators"]]
            omega = np.asarray(sec["omega"], dtype=float).astype(complex)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad custom algebra: {exc}") from exc
        from .modular import generate_algebra

        return [("custom", generate_algebra(mats, omega.shape[0]), omega)]
    raise ConfigError(f"unknown modular case {case!r}")


def run_modular(cfg: RunConfig) -> ResultTable:
    """Residuals of every modular relation plus the entries of ``J`` and ``Delta``."""
    table = ResultTable(["case", "quantity", "value"], sort_keys=("case", "quantity"))
    for name, basis, omega in _modular_cases(cfg):
        md = tomita(basis, omega, cfg.tolerances)
        report = verify_modular_properties(md, basis, cfg.tolerances.modular)
        for key, val in report.residuals.items():
            table.add("numeric", case=name, quantity=f"residual:{key}", value=float(val))
        eye = np.eye(basis.dim)
        table.add("numeric", case=name, quantity="Delta_minus_identity",
                  value=op_norm(md.delta - eye))
        if basis.dim == 4:
            table.add("numeric", case=name, quantity="J_minus_J_AB",
                      value=float(np.abs(md.J.matrix - j_ab_operator().matrix).max()))
        for (i, j), v in np.ndenumerate(md.J.matrix):
            table.add("numeric", case=name, quantity=f"J[{i},{j}].re", value=float(v.real))
            table.add("numeric", case=name, quantity=f"J[{i},{j}].im", value=float(v.imag))
    return table


# --------------------------------------------------------------------------- susy


def _susy_states(sec: dict) -> list[tuple[int, int, float, float]]:
    states = [(s.get("k", 0), s.get("l", 1), float(s.get("alpha", 1.0)), float(s.get("beta", 0.0)))
              for s in sec.get("states", [])]
    sweep = sec.get("alpha_sweep")
    if sweep is not None or not states:
        sweep = sweep or {}
        k, l, n = sweep.get("k", 1), sweep.get("l", 2), sweep.get("points", 11)
        if n < 2:
            raise ConfigError("susy.alpha_sweep.points must be >= 2")
        for theta in np.linspace(0.0, np.pi / 2, n):
            states.append((k, l, float(np.cos(theta)), float(np.sin(theta))))
    return states


def run_susy(cfg: RunConfig) -> ResultTable:
    """Concurrence ``|<Phi|J|Phi>|`` against ``2|alpha beta|`` for supermultiplet states."""
    sec = cfg.section("susy")
    model = SusyModel.create(_cutoff(sec.get("n_max", 8), "susy.n_max"), float(sec.get("hbar_omega", 1.0)))
    table = ResultTable(["k", "l", "alpha", "beta", "C_modular", "two_abs_alpha_beta", "residual", "energy_a"],
                        sort_keys=("k", "l", "alpha", "beta"))
    for k, l, alpha, beta in _susy_states(sec):
        state = supermultiplet_state(model, k, l, alpha, beta)
        c = susy_concurrence(model, state)
        ref = 2 * abs(alpha * beta)
        table.add("numeric", k=k, l=l, alpha=alpha, beta=beta, C_modular=c,
                  two_abs_alpha_beta=ref, residual=abs(c - ref), energy_a=energy(model, state, "a"))
    return table


# --------------------------------------------------------------------------- udw


def _float_list(values, where: str) -> list[float]:
    try:
        return [float(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _settings(sec: dict) -> BellSettings:
    raw = sec.get("settings")
    if raw is None:
        return UDW_OPTIMAL_SETTINGS
    vals = _float_list(raw, "udw.settings")
    if len(vals) != 4:
        raise ConfigError("udw.settings needs four angles (alpha, beta, alpha', beta')")
    return BellSettings(*vals)


def _smearing(sec: dict):
    sm = sec.get("smearing", {})
    try:
        model = FieldModel(mass=float(sm.get("mass", 1.0)), spatial_dim=sm.get("spatial_dim", 3))
        sigma_t, sigma_x = float(sm.get("sigma_t", 0.5)), float(sm.get("sigma_x", 0.5))
        f_a, f_b = default_pair(float(sm.get("separation", 4.0)), 1.0, model.spatial_dim)
        f_a = GaussianTestFunction(1.0, f_a.t0, f_a.x0, sigma_t, sigma_x)
        f_b = GaussianTestFunction(1.0, f_b.t0, f_b.x0, sigma_t, sigma_x)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return model, f_a, f_b


def udw_row(r: float, hh: float, settings: BellSettings, scenario: UdwScenario | None, tol: Tolerances):
    """One table row; ``scenario`` selects the numeric cross-check."""
    analytic = evolved_state_analytic(r, hh)
    c = udw_concurrence(r, hh)
    row = {"r": r, "hh": hh, "C_formula": c}
    warned = 0
    if scenario is not None:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", TruncationWarning)
            state = evolved_state_numeric(scenario, tol)
        warned = int(any(issubclass(w.category, TruncationWarning) for w in caught))
        three = three_way_concurrence(state)
        row["C_J_numeric"] = three["j_numeric"]
        row["C_wootters_reduced"] = three["wootters_reduced"]
        rho = reduced_detector_density(state)
    else:
        rho = reduced_detector_density(analytic)
        row["C_wootters_reduced"] = wootters_concurrence(rho, tol)
    _, closed_max = maximize_chsh(chsh_udw_objective(r, hh))
    _, state_max = maximize_chsh(chsh_objective(rho))
    row.update({
        "CHSH_max": closed_max,
        "two_sqrt2_C": TSIRELSON * c,
        "bound": max_violation_from_concurrence(c),
        "CHSH_state_max": state_max,
        "CHSH_at_settings": chsh_udw(r, hh, settings),
    })
    if scenario is not None:
        row["truncation_warning"] = warned
    return row


def run_udw(cfg: RunConfig) -> ResultTable:
    """Grid over ``r`` and ``<h,h>``.

    Without a ``smearing`` block the grid is abstract (closed forms only);
    with one, the default mirror-symmetric Gaussian pair is rescaled to each
    ``<h,h>`` and evolved on a two-mode Fock space.
    """
    sec = cfg.section("udw")
    rs = _float_list(sec.get("r", [0.0, 0.25, 0.5, 0.75, 1.0]), "udw.r")
    hhs = _float_list(sec.get("hh", [0.0, 0.1, 0.2, 0.35, 0.5]), "udw.hh")
    n_max = _cutoff(sec.get("n_max", 16), "udw.n_max")
    settings = _settings(sec)
    gap = float(sec.get("gap", 0.0))
    numeric = "smearing" in sec
    cols = ["r", "hh", "C_formula"]
    if numeric:
        cols.append("C_J_numeric")
    cols += ["C_wootters_reduced", "CHSH_max", "two_sqrt2_C", "bound", "CHSH_state_max", "CHSH_at_settings"]
    if numeric:
        cols.append("truncation_warning")
    table = ResultTable(cols, sort_keys=("r", "hh"))
    if numeric:
        model, f_a, f_b = _smearing(sec)
    for r in rs:
        for hh in hhs:
            if numeric:
                pa, pb = pair_with_norm(model, f_a, f_b, hh) if hh > 0 else (f_a.scaled(0.0), f_b.scaled(0.0))
                scenario = UdwScenario(r, pa, pb, settings=settings, n_max=n_max, model=model, gap=gap)
            else:
                # constructed only for its validation (r >= 0, hh >= 0, gapless)
                UdwScenario(r, hh=hh, settings=settings, n_max=n_max, gap=gap)
                scenario = None
            row = udw_row(r, hh, settings, scenario, cfg.tolerances)
            table.add("numeric" if numeric else "analytic", **row)
    return table


def run_sweep(cfg: RunConfig) -> ResultTable:
    """Separation sweep: smearing overlaps and the resulting concurrence."""
    sec = cfg.section("sweep")
    r = float(sec.get("r", 1.0))
    seps = _float_list(sec.get("separations", [0.5, 1.0, 2.0, 3.0, 5.0]), "sweep.separations")
    try:
        model = FieldModel(mass=float(sec.get("mass", 1.0)), spatial_dim=sec.get("spatial_dim", 3))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    st, sx = float(sec.get("sigma_t", 0.5)), float(sec.get("sigma_x", 0.5))
    tau = float(sec.get("time_offset", 0.0))
    amp = float(sec.get("amplitude", 1.0))
    table = ResultTable(["separation", "re_fA_fB", "im_fA_fB", "hh", "C_formula"], sort_keys=("separation",))
    for d in seps:
        if d < 0:
            raise ConfigError("separations must be non-negative")
        a, b = default_pair(d, 1.0, model.spatial_dim)
        f_a = GaussianTestFunction(amp, 0.0, a.x0, st, sx)
        f_b = GaussianTestFunction(amp, tau, b.x0, st, sx)
        g = gram_matrix(model, f_a, f_b)
        hh = float((g[0, 0] + g[1, 1]).real + 2 * g[0, 1].real)
        table.add("numeric", separation=d, re_fA_fB=float(g[0, 1].real), im_fA_fB=float(g[0, 1].imag),
                  hh=hh, C_formula=udw_concurrence(r, hh))
    return table


# --------------------------------------------------------------------------- verify


@dataclass
class Check:
    suite: str
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


def _suite_linalg(ctx) -> list[tuple[str, float, float]]:
    rng = ctx["rng"]
    x = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    h = x + x.conj().T
    eig = hermitian_eig(h)
    m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    J, delta = antilinear_polar(AntilinearOperator(m))
    half = hermitian_power(delta, 0.5)
    return [
        ("eig_reconstruction", op_norm(eig.reconstruct() - h) / op_norm(h), 1e-12),
        ("polar_reconstruction", op_norm(J.after_linear(half).matrix - m) / op_norm(m), 1e-10),
        ("J_antiunitary", op_norm(J.matrix.conj().T @ J.matrix - np.eye(5)), 1e-10),
    ]


def _suite_fock(ctx):
    n = ctx["n_max"]
    sysm = ModeSystem.create(1, n)
    a = annihilation(sysm, 0)
    ccr = op_norm(restrict(commutator(a, a.conj().T) - np.eye(sysm.dim), safe_indices(sysm, 1)))
    gauss = max(abs(vacuum_expectation(sysm, dephasing_weyl(sysm, [c])) - math.exp(-0.5 * abs(c) ** 2))
                for c in (0.25, 0.5, 1.0, 0.7j))
    res = [weyl_relation_residual(m, [0.7], [0.5j]) for m in (8, 16, 24)]
    decreasing = 0.0 if res[0] > res[1] > res[2] else 1.0
    return [("ccr_safe_subspace", ccr, 1e-12), ("vacuum_gaussianity", gauss, 1e-6),
            ("weyl_truncation_decreasing", decreasing, 0.5)]


def _suite_modular(ctx):
    out = []
    bell = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)
    md = tomita(_qubit_algebra(), bell)
    out.append(("bell_psi_plus_J_equals_J_AB", float(np.abs(md.J.matrix - j_ab_operator().matrix).max()), 1e-10))
    md = tomita(_qubit_algebra(), schmidt_vector(0.5))
    out.append(("bell_phi_plus_Delta_identity", op_norm(md.delta - np.eye(4)), 1e-10))
    worst: dict[str, float] = {}
    rng = ctx["rng"]
    shapes = ([2], [1, 1, 1, 1], [2, 1], [1, 2], [2, 1, 1], [1, 1, 1], [1, 1, 1, 1, 1, 1, 1, 1, 1])
    for i in range(ctx["instances"]):
        basis, omega = random_standard_instance(rng, shapes[i % len(shapes)])
        rep = verify_modular_properties(tomita(basis, omega), basis)
        for k, v in rep.residuals.items():
            worst[k] = max(worst.get(k, 0.0), v)
    out += [(f"random_{k}", v, 1e-9) for k, v in sorted(worst.items())]
    return out


def _suite_entanglement(ctx):
    rng = ctx["rng"]
    gap = 0.0
    for _ in range(20):
        psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        psi /= np.linalg.norm(psi)
        gap = max(gap, abs(concurrence_pure(psi) - wootters_concurrence(density(psi))))
    bell = schmidt_vector(0.5)
    _, v = maximize_chsh(bell)
    return [("pure_vs_wootters", gap, 1e-9), ("bell_concurrence", abs(concurrence_pure(bell) - 1), 1e-12),
            ("bell_tsirelson", abs(v - TSIRELSON), 1e-6)]


def _suite_susy(ctx):
    model = SusyModel.create(8)
    inter = verify_intertwining(model)
    out = [(k, v, 1e-12) for k, v in inter.items() if not k.startswith("control")]
    out.append(("negative_control_large", 0.0 if inter["control:JQaJ-Qa"] > 0.5 else 1.0, 0.5))
    worst = 0.0
    for theta in np.linspace(0, np.pi / 2, 11):
        a, b = math.cos(theta), math.sin(theta)
        worst = max(worst, abs(susy_concurrence(model, supermultiplet_state(model, 1, 2, a, b)) - 2 * abs(a * b)))
    out.append(("concurrence_alpha_sweep", worst, 1e-10))
    deg = 0.0
    for k in range(1, 7):
        for m in (0, 3):
            up = energy(model, model.basis_state(k, m, 0), "a")
            down = energy(model, model.basis_state(k - 1, m, 1), "a")
            deg = max(deg, abs(up - k), abs(down - k))
    out.append(("degeneracy_E_equals_k", deg, 1e-12))
    return out


def _suite_udw(ctx):
    n_max, hh = ctx["n_max"], ctx["hh"]
    model = FieldModel()
    f_a, f_b = default_pair()
    out = [("quadrature_refinement", refinement_change(model, f_a, f_a), 1e-8),
           ("mirror_symplectic", abs(gram_matrix(model, f_a, f_b)[0, 1].imag), 1e-8)]
    worst, chsh_gap, warned = 0.0, 0.0, 0
    for r in (0.5, 1.0):
        pa, pb = pair_with_norm(model, f_a, f_b, hh) if hh > 0 else (f_a.scaled(0), f_b.scaled(0))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", TruncationWarning)
            state = evolved_state_numeric(UdwScenario(r, pa, pb, n_max=n_max, model=model))
        warned += sum(issubclass(w.category, TruncationWarning) for w in caught)
        three = three_way_concurrence(state)
        worst = max(worst, max(three.values()) - min(three.values()))
        _, v = maximize_chsh(chsh_udw_objective(r, hh))
        chsh_gap = max(chsh_gap, abs(v - TSIRELSON * udw_concurrence(r, hh)))
    out += [("three_way_concurrence", worst, 1e-6), ("chsh_closed_form_max", chsh_gap, 1e-4)]
    ctx["warnings"].append(("udw", "truncation_warning", float(warned)))
    return out


VERIFY_SUITES: dict[str, Callable] = {
    "linalg": _suite_linalg,
    "fock": _suite_fock,
    "modular": _suite_modular,
    "entanglement": _suite_entanglement,
    "susy": _suite_susy,
    "udw": _suite_udw,
}


def run_verify(cfg: RunConfig) -> tuple[int, ResultTable]:
    """Run the invariant suites; exit code 0 iff every check passes.

    ``verify.tolerance`` replaces every per-check threshold, which makes a
    deliberately impossible value (say ``1e-16``) a negative control.
    """
    sec = cfg.section("verify")
    names = sec.get("suites", list(VERIFY_SUITES))
    for n in names:
        if n not in VERIFY_SUITES:
            raise ConfigError(f"unknown verify suite {n!r}")
    override = sec.get("tolerance")
    ctx = {"rng": np.random.default_rng(cfg.seed), "n_max": _cutoff(sec.get("n_max", 16), "verify.n_max"),
           "hh": float(sec.get("hh", 0.5)), "instances": int(sec.get("instances", 20)), "warnings": []}
    if ctx["hh"] < 0:
        raise ConfigError("verify.hh must be non-negative")
    checks: list[Check] = []
    for n in names:
        for name, residual, tol in VERIFY_SUITES[n](ctx):
            checks.append(Check(n, name, float(residual), float(override) if override is not None else tol))
    table = ResultTable(["suite", "check", "residual", "tolerance", "status"], sort_keys=("suite", "check"))
    for c in checks:
        table.add("numeric", suite=c.suite, check=c.name, residual=c.residual, tolerance=c.tolerance,
                  status="pass" if c.passed else "FAIL")
    for suite, name, count in ctx["warnings"]:
        if count:
            table.add("numeric", suite=suite, check=name, residual=count, tolerance=0.0, status="warning")
    code = 0 if all(c.passed for c in checks) else 1
    return code, table


# --------------------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modconc", description="Modular-theory concurrence scenario runner")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="YAML or JSON configuration file")
    p.add_argument("--out", help="write the table here instead of standard output")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--seed", type=int, default=None)
    return p


RUNNERS = {"modular": run_modular, "susy": run_susy, "udw": run_udw, "sweep": run_sweep}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = load_config(args.subcommand, args.config,
                          {"format": args.format, "seed": args.seed, "out": args.out})
        if cfg.subcommand == "verify":
            code, table = run_verify(cfg)
            failed = [f"{r['suite']}:{r['check']}" for r in table.sorted_rows() if r["status"] == "FAIL"]
            if failed:
                print("failing checks: " + ", ".join(failed), file=sys.stderr)
        else:
            code, table = 0, RUNNERS[cfg.subcommand](cfg)
        text = render(table, cfg.fmt)
    except (ModconcError, ValueError, NotImplementedError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if cfg.out is not None:
        cfg.out.write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
