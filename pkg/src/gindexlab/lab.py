"""Config-driven experiment runner.

A JSON config describes one G-operator (group, realization, symbol table) and
an experiment kind; ``run`` executes it, grades the result PASS / FAIL /
UNDECIDED against the configured tolerances, and ``emit_reports`` persists
the payloads.  All numeric outputs are deterministic: fixed summation orders,
no threading, seeds only where a config requests randomized symbols.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__ as VERSION
from .circle import PeriodicGrid, grid_for_window, FrequencyWindow
from .errors import GIndexError, IoError, NoHomomorphism, ParseError, SchemaError
from .groups import build_group
from .index_engine import (calibrate_sign, decomposition_check, numerical_index,
                           chi_vanishing_check, winding_index_oracle)
from .problems import GOperatorProblem
from .samples import (annulus_term, egorov_curved_term, egorov_isometry_term,
                      reflection_term, star_consistency_pairs, weyl_test_terms)
from .semiclass import (StarSeries, XiLattice, algebraic_index, egorov_defect,
                        symbol_parametrix_h, tau_g, trace_power_law)
from .symbols import is_elliptic
from .transforms import RealizationFamily

EXPERIMENTS = ("ellipticity", "index", "localized", "algebraic", "egorov",
               "trace_asymptotics", "full_pipeline")

DEFAULT_NUMERICS = {
    "windows": [64, 128, 192],
    "zero_tol": 1e-8,
    "inner_fraction": 0.5,
    "parametrix_order": 4,
    "symbol_grid": 256,
    "lattice_radius": 3.0,
    "lattice_points": 601,
    "eps": 0.5,
    "h_grid": {"hi": 0.05, "lo": 0.005, "n": 8},
    "diag_h_grid": {"hi": 0.2, "lo": 0.02, "n": 8},
    "tolerances": {
        "elliptic": 1e-6,
        "decomposition": 1e-2,
        "drift": 1e-3,
        "chi_vanishing": 1e-3,
        "c0_match": 1e-2,
        "neg_power": 1e-3,
        "egorov_isometry": 1e-9,
        "egorov_slope": [0.9, 1.3],
    },
}

PASS, FAIL, UNDECIDED = "PASS", "FAIL", "UNDECIDED"
_EXIT = {PASS: 0, FAIL: 1, UNDECIDED: 2}


@dataclass
class ExperimentConfig:
    raw: dict
    group_desc: dict
    realization_desc: dict
    symbols: dict            # label -> {"plus": {mode: complex}, "minus": {...}}
    experiment: str
    k_min: int
    unit_fill: bool
    numerics: dict
    out_dir: str | None
    expect: dict
    name: str

    def family(self) -> RealizationFamily:
        group = build_group(self.group_desc)
        kind = self.realization_desc.get("kind", _default_realization(group.kind))
        return RealizationFamily(group, kind, eps=float(self.realization_desc.get("eps", 0.0)))

    def problem(self) -> GOperatorProblem:
        fam = self.family()
        coeffs = {}
        for label, sheets in self.symbols.items():
            g = fam.group.parse(label)
            coeffs[g] = (dict(sheets["plus"]), dict(sheets["minus"]))
        return GOperatorProblem(fam, coeffs, k_min=self.k_min,
                                unit_fill=self.unit_fill, name=self.name)

    def config_hash(self) -> str:
        semantic = {k: v for k, v in self.raw.items() if k != "out_dir"}
        blob = json.dumps(semantic, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _default_realization(group_kind: str) -> str:
    return {"trivial": "trivial", "cyclic": "rotation",
            "dihedral": "dihedral", "integer_shift": "rotation"}[group_kind]


def _parse_coeff_table(obj, where: str) -> dict[int, complex]:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected a mode -> [re, im] table")
    out = {}
    for key, val in obj.items():
        try:
            mode = int(key)
        except ValueError as exc:
            raise SchemaError(f"{where}: bad mode index {key!r}") from exc
        if isinstance(val, (int, float)):
            out[mode] = complex(val)
        elif isinstance(val, list) and len(val) == 2:
            out[mode] = complex(val[0], val[1])
        else:
            raise SchemaError(f"{where}: coefficient must be a number or [re, im]")
    return out


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate an experiment config file, filling defaults."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"config file {path} does not exist")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_config(raw)


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise SchemaError("top level must be an object")
    known = {"name", "seed", "group", "realization", "symbols", "k_min",
             "unit_fill", "experiment", "numerics", "out_dir", "expect"}
    for key in raw:
        if key not in known:
            raise SchemaError(f"unknown config field {key!r}")
    experiment = raw.get("experiment")
    if experiment not in EXPERIMENTS:
        raise SchemaError(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")
    group_desc = raw.get("group", {"kind": "trivial"})
    if "kind" not in group_desc:
        raise SchemaError("group descriptor needs 'kind'")
    try:
        group = build_group(group_desc)
    except GIndexError as exc:
        raise SchemaError(f"group: {exc}") from exc
    realization_desc = raw.get("realization", {"kind": _default_realization(group.kind)})
    try:
        RealizationFamily(group, realization_desc.get("kind", _default_realization(group.kind)),
                          eps=float(realization_desc.get("eps", 0.0)))
    except GIndexError as exc:
        raise SchemaError(f"realization: {exc}") from exc
    symbols = {}
    for label, sheets in raw.get("symbols", {}).items():
        try:
            group.parse(label)
        except GIndexError as exc:
            raise SchemaError(f"symbols: {exc}") from exc
        if not isinstance(sheets, dict) or not {"plus", "minus"} <= set(sheets):
            raise SchemaError(f"symbols[{label!r}] needs 'plus' and 'minus' tables")
        symbols[label] = {
            "plus": _parse_coeff_table(sheets["plus"], f"symbols[{label!r}].plus"),
            "minus": _parse_coeff_table(sheets["minus"], f"symbols[{label!r}].minus"),
        }
    numerics = json.loads(json.dumps(DEFAULT_NUMERICS))
    for key, val in raw.get("numerics", {}).items():
        if key not in DEFAULT_NUMERICS:
            raise SchemaError(f"unknown numerics field {key!r}")
        if key == "tolerances":
            numerics["tolerances"].update(val)
        else:
            numerics[key] = val
    return ExperimentConfig(
        raw=raw,
        group_desc=group_desc,
        realization_desc=realization_desc,
        symbols=symbols,
        experiment=experiment,
        k_min=int(raw.get("k_min", 4)),
        unit_fill=bool(raw.get("unit_fill", False)),
        numerics=numerics,
        out_dir=raw.get("out_dir"),
        expect=raw.get("expect", {}),
        name=raw.get("name", experiment),
    )


# ---------------------------------------------------------------------------
# experiment execution
# ---------------------------------------------------------------------------

@dataclass
class RunRecord:
    config_hash: str
    experiment: str
    payloads: dict
    verdicts: dict
    timings: dict
    version: str = VERSION

    @property
    def worst(self) -> str:
        order = {FAIL: 0, UNDECIDED: 1, PASS: 2}
        if not self.verdicts:
            return PASS
        return min(self.verdicts.values(), key=lambda v: order[v])

    @property
    def exit_code(self) -> int:
        return _EXIT[self.worst]


def _h_grid_from(desc: dict) -> np.ndarray:
    return np.geomspace(float(desc["hi"]), float(desc["lo"]), int(desc["n"]))


def _cx(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def run(config: ExperimentConfig) -> RunRecord:
    """Execute the configured experiment(s) and grade them."""
    payloads: dict = {}
    verdicts: dict = {}
    timings: dict = {}
    steps = [config.experiment]
    if config.experiment == "full_pipeline":
        steps = ["ellipticity", "index", "localized", "algebraic"]
    for step in steps:
        t0 = time.perf_counter()
        fn = _EXPERIMENT_TABLE[step]
        payload, verdict = fn(config)
        payloads[step] = payload
        verdicts[step] = verdict
        timings[step] = time.perf_counter() - t0
    return RunRecord(config.config_hash(), config.experiment, payloads, verdicts, timings)


def _exp_ellipticity(config: ExperimentConfig):
    problem = config.problem()
    grid = PeriodicGrid(int(config.numerics["symbol_grid"]))
    verdict = is_elliptic(problem.symbol(grid),
                          tol=float(config.numerics["tolerances"]["elliptic"]))
    payload = {
        "verdict": verdict.verdict,
        "min_singular_value": verdict.min_singular_value,
        "witness": {"sheet": verdict.witness_sheet, "point": verdict.witness_point},
        "method": verdict.method,
    }
    expected = config.expect.get("verdict")
    if expected is not None:
        grade = PASS if verdict.verdict == expected else FAIL
    else:
        grade = {"elliptic": PASS, "not_elliptic": PASS, "undecided": UNDECIDED}[verdict.verdict]
    return payload, grade


def _exp_index(config: ExperimentConfig):
    problem = config.problem()
    windows = tuple(config.numerics["windows"])
    report = numerical_index(problem, windows,
                             zero_tol=float(config.numerics["zero_tol"]),
                             inner_fraction=float(config.numerics["inner_fraction"]))
    payload = report.as_dict()
    payload["sign_convention"] = calibrate_sign()
    grade = PASS if report.stabilized else FAIL
    if problem.group.kind == "trivial":
        grid = grid_for_window(FrequencyWindow(max(windows)))
        oracle = winding_index_oracle(problem.symbol(grid), calibrate_sign())
        payload["winding_oracle"] = oracle
        grade = PASS if (grade == PASS and oracle == report.index) else FAIL
    expected = config.expect.get("index")
    if expected is not None and report.index != int(expected):
        grade = FAIL
    return payload, grade


def _exp_localized(config: ExperimentConfig):
    problem = config.problem()
    tol = float(config.numerics["tolerances"]["decomposition"])
    report = decomposition_check(
        problem, tuple(config.numerics["windows"]),
        N=int(config.numerics["parametrix_order"]),
        inner_fraction=float(config.numerics["inner_fraction"]),
        drift_tol=float(config.numerics["tolerances"]["drift"]))
    payload = report.as_dict()
    rounded = int(np.rint(report.total.real))
    payload["rounded_total"] = rounded
    grade = PASS if (report.residual < tol and rounded == report.fredholm_index) else FAIL
    if problem.group.has_nonzero_chi:
        vanish = {}
        for g0 in (1, 2):
            try:
                rep = chi_vanishing_check(problem, g0, tuple(config.numerics["windows"]),
                                  N=int(config.numerics["parametrix_order"]),
                                  tol=float(config.numerics["tolerances"]["chi_vanishing"]))
                vanish[problem.group.label(g0)] = {"value": _cx(rep.value), "ok": rep.ok}
                if not rep.ok:
                    grade = FAIL
            except NoHomomorphism:
                pass
        payload["chi_vanishing"] = vanish
    return payload, grade


def _exp_algebraic(config: ExperimentConfig):
    problem = config.problem()
    fam = problem.family
    if not fam.is_isometric:
        raise SchemaError("algebraic experiment needs an isometric realization")
    num = config.numerics
    grid = PeriodicGrid(int(num["symbol_grid"]))
    lattice = XiLattice(float(num["lattice_radius"]), int(num["lattice_points"]))
    eps = float(num["eps"])
    N = int(num["parametrix_order"])
    h_grid = _h_grid_from(num["h_grid"])
    tols = num["tolerances"]
    series = StarSeries.from_crossed(problem.symbol(grid), lattice, eps, unit_fill=True)
    r = symbol_parametrix_h(series, N)
    analytic = decomposition_check(problem, tuple(num["windows"]), N=N)
    classes = (fam.group.conjugacy_classes() if fam.group.is_finite
               else fam.group.conjugacy_classes(support=[0]))
    per_class = {}
    total_c0 = 0.0 + 0.0j
    grade = PASS
    for cls in classes:
        if not all(fam.group.is_torsion(l) for l in cls):
            continue
        label = "<" + fam.group.label(cls[0]) + ">"
        result = algebraic_index(series, cls, N, h_grid, r=r,
                                 neg_tol=float(tols["neg_power"]))
        ind_g = analytic.per_class.get(label, 0.0 + 0.0j)
        match = abs(result.constant_term - ind_g) < float(tols["c0_match"])
        per_class[label] = {
            "fit": result.fit.as_dict(),
            "constant_term": _cx(result.constant_term),
            "negative_power": _cx(result.negative_power),
            "negative_power_ok": result.negative_power_ok,
            "analytic_index": _cx(ind_g),
            "series_h": list(map(float, result.series.h_grid)),
            "series_values": [_cx(v) for v in result.series.values],
            "c0_matches_analytic": match,
        }
        total_c0 += result.constant_term
        if not (match and result.negative_power_ok):
            grade = FAIL
    rounded = int(np.rint(total_c0.real))
    payload = {
        "per_class": per_class,
        "total_constant_term": _cx(total_c0),
        "rounded_total": rounded,
        "fredholm_index": analytic.fredholm_index,
    }
    if rounded != analytic.fredholm_index:
        grade = FAIL
    return payload, grade


def _exp_egorov(config: ExperimentConfig):
    fam = config.family()
    grid = PeriodicGrid(int(config.numerics["symbol_grid"]))
    h_grid = _h_grid_from(config.numerics["diag_h_grid"])
    tols = config.numerics["tolerances"]
    g = fam.group.parse(config.expect.get("element", _first_nontrivial_label(fam)))
    if fam.is_isometric:
        term = egorov_isometry_term(grid)
        rep = egorov_defect(fam, g, term, h_grid)
        ok = rep.max_defect < float(tols["egorov_isometry"])
    else:
        term = egorov_curved_term(grid)
        rep = egorov_defect(fam, g, term, h_grid, window_factor=2.0)
        lo, hi = tols["egorov_slope"]
        ok = rep.slope is not None and lo <= rep.slope <= hi
    payload = rep.as_dict()
    payload["element"] = fam.group.label(g)
    payload["isometric"] = fam.is_isometric
    return payload, PASS if ok else FAIL


def _first_nontrivial_label(fam: RealizationFamily) -> str:
    if fam.group.kind == "integer_shift":
        return "1"
    for g in fam.group.elements():
        if g != fam.group.identity:
            return fam.group.label(g)
    return fam.group.label(fam.group.identity)


def _exp_trace_asymptotics(config: ExperimentConfig):
    fam = config.family()
    grid = PeriodicGrid(int(config.numerics["symbol_grid"]))
    lattice = XiLattice(3.5, 701)
    h_grid = _h_grid_from(config.numerics["diag_h_grid"])
    g = fam.group.parse(config.expect.get("element", _first_nontrivial_label(fam)))
    C = fam.canonical(g)
    e = fam.group.identity
    if g == e:
        term = annulus_term(grid, lattice)
        expected = -1.0
    elif C.sheet_swap:
        term = reflection_term(grid, lattice)
        expected = 0.0
    else:
        term = annulus_term(grid, lattice)
        expected = None            # fixed-point free: rapid decay
    series = StarSeries(fam, grid, lattice, 0.25, {(g, 0): term})
    rep = trace_power_law(series, fam.group.conjugacy_class(g), h_grid)
    payload = rep.as_dict()
    payload["element"] = fam.group.label(g)
    if expected is None:
        idx = int(np.argmin(np.abs(h_grid - 0.05)))
        value = float(np.abs(rep.values[idx]))
        payload["value_at_h05"] = value
        ok = value < 1e-6
        payload["expected"] = "decay"
    else:
        payload["expected"] = expected
        ok = rep.slope is not None and abs(rep.slope - expected) < 0.05
    return payload, PASS if ok else FAIL


_EXPERIMENT_TABLE = {
    "ellipticity": _exp_ellipticity,
    "index": _exp_index,
    "localized": _exp_localized,
    "algebraic": _exp_algebraic,
    "egorov": _exp_egorov,
    "trace_asymptotics": _exp_trace_asymptotics,
}


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def _json_dump(path: Path, obj):
    try:
        path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def emit_reports(record: RunRecord, out_dir: str | Path) -> list[Path]:
    """Write report.json, CSV sweeps, meta.json (and timings.json, which is
    excluded from the byte-for-byte determinism contract)."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out}: {exc}") from exc
    written = []
    meta = {"config_hash": record.config_hash, "version": record.version,
            "experiment": record.experiment}
    _json_dump(out / "meta.json", meta)
    written.append(out / "meta.json")
    if record.payloads:
        report = {"config_hash": record.config_hash,
                  "verdicts": record.verdicts,
                  "payloads": record.payloads}
        _json_dump(out / "report.json", report)
        written.append(out / "report.json")
    for step, payload in record.payloads.items():
        if "stabilization" in payload:
            rows = ["cutoff,index,kernel_dim,cokernel_dim,sv_gap,rounding_residual"]
            for w in payload["stabilization"]:
                rows.append(f"{w['cutoff']},{w['index']},{w['kernel_dim']},"
                            f"{w['cokernel_dim']},{w['sv_gap']!r},{w['rounding_residual']!r}")
            p = out / f"index_{step}.csv"
            p.write_text("\n".join(rows) + "\n")
            written.append(p)
        series_blocks = []
        if "h" in payload and ("abs_values" in payload or "defects" in payload):
            col = payload.get("abs_values", payload.get("defects"))
            series_blocks.append((step, payload["h"], [(v, 0.0) for v in col]))
        if "per_class" in payload and isinstance(payload["per_class"], dict):
            for label, sub in payload["per_class"].items():
                if isinstance(sub, dict) and "series_h" in sub:
                    series_blocks.append((f"{step}_{label.strip('<>')}", sub["series_h"],
                                          [(v[0], v[1]) for v in sub["series_values"]]))
        for name, hcol, vals in series_blocks:
            rows = ["h,re,im"]
            for h, (re, im) in zip(hcol, vals):
                rows.append(f"{h!r},{re!r},{im!r}")
            p = out / f"series_{name}.csv"
            p.write_text("\n".join(rows) + "\n")
            written.append(p)
    _json_dump(out / "timings.json", {"seconds": record.timings})
    return written
