"""Batch command-line surface: JSON configs in, JSON/CSV reports out.

Subcommands: ``balayage``, ``gauss``, ``capacity``, ``solvability``,
``converge-up``, ``converge-down``, ``thinness``, ``verify``.  Each consumes
a JSON config naming exactly one instance source (a geometric ``instance``
spec or a raw ``kernel`` with ``omega`` and ``support``), writes a
deterministic JSON report embedding the config hash, and a CSV where the
operation defines one.  Wall-clock metadata goes to a sidecar ``.meta.json``
so the main report is byte-identical across runs of the same config.

Exit codes: 0 success, 2 violated invariant (certification or verify
failure), 3 solver failure, 4 config error.  The ``BALAYAGE_THREADS``
environment variable caps internal parallelism.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from .balayage import CharacterizationViolated, mass_bound_check, pseudo_balayage, verify_ii1
from .core import (
    KernelMatrix,
    Measure,
    NotNested,
    NotPositiveDefinite,
    SizeMismatchError,
    SupportSet,
    dumps_canonical,
    energy_distance,
)
from .experiments import EmptyIntersection, monotone_up, monotone_down, solvability_scan
from .gauss import capacitary_measure, solvability_check, solve_gauss
from .instances import ChargeOnNode, DuplicatePoints, InstanceSpec, assemble, thinness_series
from .qp import (
    ConeQpProblem,
    MaxIterExceeded,
    SimplexQpProblem,
    brute_force_cone,
    brute_force_simplex,
    solve_cone_qp,
    solve_simplex_qp,
)

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4

CONFIG_SCHEMA = "finpot-config/1"
REPORT_SCHEMA = "finpot-report/1"
FIXTURE_SCHEMA = "finpot-fixture/1"

COMMANDS = (
    "balayage",
    "gauss",
    "capacity",
    "solvability",
    "converge-up",
    "converge-down",
    "thinness",
    "verify",
)

_RESULT_REQUIRED_KEYS = {
    "balayage": {"measure", "value", "mass", "kkt"},
    "gauss": {"gauss", "balayage_mass", "lambda_equals_balayage"},
    "capacity": {"gamma", "capacity", "equilibrium_potential_range"},
    "solvability": set(),  # single outcome or scan table; checked below
    "converge-up": {"direction", "stage_values", "stage_norms", "fund_slack", "final_distance"},
    "converge-down": {"direction", "stage_values", "stage_norms", "fund_slack", "final_distance"},
    "thinness": {"q", "shell_capacities", "partial_sums", "verdict"},
    "verify": {"checks", "passed"},
}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


def validate_report(report: dict) -> None:
    """Schema gate applied to every report before writing and after reading."""
    if report.get("schema") != REPORT_SCHEMA:
        raise ValueError(f"unknown report schema {report.get('schema')!r}")
    for key in ("command", "config_sha256", "result"):
        if key not in report:
            raise ValueError(f"report is missing the {key!r} key")
    command = report["command"]
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r} in report")
    required = _RESULT_REQUIRED_KEYS[command]
    result = report["result"]
    if not isinstance(result, dict):
        raise ValueError("report result must be an object")
    if command == "solvability":
        if not ({"status"} <= set(result) or {"rows", "threshold"} <= set(result)):
            raise ValueError("solvability result must be an outcome or a scan table")
    missing = required - set(result)
    if missing:
        raise ValueError(f"report result is missing keys {sorted(missing)}")


def config_hash(cfg: dict) -> str:
    effective = {k: v for k, v in cfg.items() if k not in ("out",) and not k.startswith("_")}
    return hashlib.sha256(
        json.dumps(effective, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def _read_config(args) -> dict:
    if args.config is None:
        if args.command != "verify":
            raise ConfigError("--config is required")
        cfg: dict = {}
    else:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            cfg = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        schema = cfg.get("schema", CONFIG_SCHEMA)
        if schema != CONFIG_SCHEMA:
            raise ConfigError(f"unsupported config schema {schema!r} (expected {CONFIG_SCHEMA})")
    if args.tol is not None:
        if args.tol <= 0:
            raise ConfigError("--tol must be positive")
        cfg["tol"] = args.tol
    if args.out is not None:
        cfg["out"] = args.out
    cfg["_summary"] = bool(args.summary)
    return cfg


def _load_problem(cfg: dict, need_omega: bool = True):
    """Resolve the single instance source into (kernel, omega, support, h, instance)."""
    has_instance = "instance" in cfg
    has_kernel = "kernel" in cfg
    if has_instance == has_kernel:
        raise ConfigError("exactly one of 'instance' or 'kernel' must be given")
    if has_instance:
        try:
            spec = InstanceSpec.from_json(cfg["instance"])
            inst = assemble(spec)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid instance spec: {exc}") from None
        omega = inst.omega
        scale = cfg.get("omega_scale")
        if scale is not None:
            omega = omega.scaled(float(scale))
        return inst.kernel, omega, inst.support, inst.h, inst
    kobj = cfg["kernel"]
    try:
        if isinstance(kobj, dict) and "csv" in kobj:
            kernel = KernelMatrix.from_csv(kobj["csv"])
        else:
            kernel = KernelMatrix.from_json(kobj)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid kernel: {exc}") from None
    if "omega" not in cfg:
        if not need_omega:
            omega = Measure.zero(kernel.size)
            sup = cfg.get("support", "all")
            try:
                support = SupportSet.full(kernel.size) if sup == "all" else SupportSet(sup)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"invalid support: {exc}") from None
            if support.indices[-1] >= kernel.size:
                raise ConfigError("support indices exceed the kernel size")
            return kernel, omega, support, cfg.get("h"), None
        raise ConfigError("raw-kernel configs need an 'omega' measure")
    try:
        omega = Measure.from_json(cfg["omega"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid omega: {exc}") from None
    scale = cfg.get("omega_scale")
    if scale is not None:
        omega = omega.scaled(float(scale))
    sup = cfg.get("support", "all")
    try:
        support = SupportSet.full(kernel.size) if sup == "all" else SupportSet(sup)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid support: {exc}") from None
    if len(omega) != kernel.size:
        raise ConfigError("omega length does not match the kernel size")
    if support.indices[-1] >= kernel.size:
        raise ConfigError("support indices exceed the kernel size")
    return kernel, omega, support, cfg.get("h"), None


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg.get("out", "."))
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output directory is not writable: {exc}") from None
    return out


def _emit(cfg: dict, command: str, result: dict, csv_rows=None) -> Path:
    out = _out_dir(cfg)
    report = {
        "schema": REPORT_SCHEMA,
        "command": command,
        "config_sha256": config_hash(cfg),
        "result": result,
    }
    validate_report(report)
    path = out / f"{command}-report.json"
    path.write_text(dumps_canonical(report) + "\n")
    meta = {"report": path.name, "written_at_unix": time.time()}
    (out / f"{command}-report.meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    if csv_rows:
        csv_path = out / f"{command}-report.csv"
        with csv_path.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(csv_rows[0].keys()))
            writer.writeheader()
            writer.writerows(csv_rows)
    return path


def _maybe_export_nodes(cfg: dict, command: str, inst) -> None:
    """Instance-based runs export the node cloud, one point per row."""
    if inst is None:
        return
    from .instances import points_to_csv

    points_to_csv(inst.node_points(), _out_dir(cfg) / f"{command}-nodes.csv")


def _chain_from_config(cfg: dict, support: SupportSet, decreasing: bool):
    if "chain" in cfg:
        try:
            stages = [SupportSet(ix) for ix in cfg["chain"]]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid chain: {exc}") from None
        return stages
    stages_n = int(cfg.get("stages", 4))
    if stages_n < 1:
        raise ConfigError("stages must be positive")
    order = list(support.indices)
    sizes = sorted({max(1, round(len(order) * (j + 1) / stages_n)) for j in range(stages_n)})
    chain = [SupportSet(order[:s]) for s in sizes]
    if decreasing:
        chain = chain[::-1]
    return chain


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def _cmd_balayage(cfg: dict) -> int:
    kernel, omega, support, h, inst = _load_problem(cfg)
    tol = float(cfg.get("tol", 1e-8))
    _maybe_export_nodes(cfg, "balayage", inst)
    result = pseudo_balayage(kernel, omega, support, tol=tol, h=h)
    payload = result.to_json()
    payload["mass_bound_check"] = mass_bound_check(result, h, omega).to_json()
    _emit(cfg, "balayage", payload)
    print(
        f"balayage: value={result.value:.6e} mass={result.mass:.6f} "
        f"kkt={max(result.kkt.stationarity_residual, result.kkt.complementarity_residual):.2e} OK"
    )
    if cfg.get("_summary"):
        print(f"  potential dominance on target: residual within {10 * tol:.1e}")
        print(f"  gap integral against the sweep: within {10 * tol:.1e}")
    return EXIT_OK


def _cmd_gauss(cfg: dict) -> int:
    kernel, omega, support, h, inst = _load_problem(cfg)
    tol = float(cfg.get("tol", 1e-8))
    _maybe_export_nodes(cfg, "gauss", inst)
    res = solve_gauss(kernel, omega, support, tol=tol)
    bal = pseudo_balayage(kernel, omega, support, tol=tol, h=h)
    matches = abs(bal.mass - 1.0) <= 100 * tol and energy_distance(
        kernel, res.measure, bal.measure
    ) <= 1e-6
    payload = {
        "gauss": res.to_json(),
        "balayage_mass": bal.mass,
        "lambda_equals_balayage": bool(matches),
    }
    _emit(cfg, "gauss", payload)
    print(
        f"gauss: value={res.value:.6e} constant={res.equilibrium_constant:.6e} "
        f"balayage_mass={bal.mass:.6f} identified={matches}"
    )
    return EXIT_OK


def _cmd_capacity(cfg: dict) -> int:
    kernel, _, support, _, inst = _load_problem(cfg, need_omega=False)
    tol = float(cfg.get("tol", 1e-8))
    _maybe_export_nodes(cfg, "capacity", inst)
    res = capacitary_measure(kernel, support, tol=tol)
    _emit(cfg, "capacity", res.to_json())
    lo, hi = res.equilibrium_potential_range
    print(f"capacity: c={res.capacity:.6f} potential_range=[{lo:.6f}, {hi:.6f}]")
    return EXIT_OK


def _cmd_solvability(cfg: dict) -> int:
    tol = float(cfg.get("tol", 1e-8))
    if "family" in cfg:
        try:
            family = [assemble(InstanceSpec.from_json(obj)) for obj in cfg["family"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid family: {exc}") from None
        scalings = [float(s) for s in cfg.get("scalings", [1.0])]
        table = solvability_scan(family, scalings, tol=tol)
        _emit(cfg, "solvability", table.to_json(), csv_rows=table.csv_rows())
        for row in table.rows:
            print(
                f"solvability: scaling={row.scaling:g} omega_plus={row.omega_plus_mass:.4f} "
                f"verdict={row.verdict}"
            )
        return EXIT_OK
    kernel, omega, support, _, inst = _load_problem(cfg)
    _maybe_export_nodes(cfg, "solvability", inst)
    outcome = solvability_check(
        kernel, omega, support, tol=tol, capacity_finite=bool(cfg.get("capacity_finite", True))
    )
    rows = outcome.diagnostic.csv_rows() if outcome.diagnostic is not None else None
    _emit(cfg, "solvability", outcome.to_json(), csv_rows=rows)
    print(
        f"solvability: status={outcome.status} balayage_mass={outcome.balayage.mass:.6f} "
        f"identified={outcome.lambda_equals_balayage}"
    )
    return EXIT_OK


def _cmd_converge(cfg: dict, direction: str) -> int:
    kernel, omega, support, _, inst = _load_problem(cfg)
    tol = float(cfg.get("tol", 1e-8))
    _maybe_export_nodes(cfg, f"converge-{direction}", inst)
    chain = _chain_from_config(cfg, support, decreasing=(direction == "down"))
    runner = monotone_up if direction == "up" else monotone_down
    report = runner(kernel, omega, chain, tol=tol)
    _emit(cfg, f"converge-{direction}", report.to_json(), csv_rows=report.csv_rows())
    print(
        f"converge-{direction}: stages={len(report.stage_sizes)} "
        f"final_distance={report.final_distance:.3e} "
        f"min_slack={min(report.fund_slack, default=0.0):.3e}"
    )
    if cfg.get("_summary"):
        ok = min(report.fund_slack, default=0.0) >= -10 * tol
        print(f"  strong-Cauchy slack nonnegative: {'pass' if ok else 'fail'}")
        print(f"  final stage reproduces the target sweep: {'pass' if report.final_distance <= 10 * tol else 'fail'}")
    return EXIT_OK


def _cmd_thinness(cfg: dict) -> int:
    if "instance" not in cfg:
        raise ConfigError("thinness needs a shell_union instance spec")
    try:
        spec = InstanceSpec.from_json(cfg["instance"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid instance spec: {exc}") from None
    tol = float(cfg.get("tol", 1e-8))
    try:
        report = thinness_series(spec, tol=tol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _emit(cfg, "thinness", report.to_json(), csv_rows=report.csv_rows())
    print(
        f"thinness: verdict={report.verdict} fitted_exponent={report.fitted_exponent:.3f} "
        f"critical={spec.dimension - spec.kernel.alpha:.3f}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify: bundled-fixture invariant suite
# ---------------------------------------------------------------------------


def _fixture_paths(cfg: dict) -> list[Path]:
    if "fixtures_dir" in cfg:
        root = Path(cfg["fixtures_dir"])
    else:
        root = Path(str(resources.files("finpot") / "fixtures"))
    if not root.is_dir():
        raise ConfigError(f"fixture directory not found: {root}")
    paths = sorted(root.glob("*.json"))
    if not paths:
        raise ConfigError(f"fixture directory is empty: {root}")
    return paths


def _verify_fixture(path: Path, tol_override: float | None) -> list[dict]:
    checks: list[dict] = []

    def record(name: str, passed: bool, detail: str = ""):
        checks.append({"fixture": path.name, "check": name, "passed": bool(passed), "detail": detail})

    try:
        obj = json.loads(path.read_text())
        if obj.get("schema") != FIXTURE_SCHEMA:
            raise ValueError(f"bad fixture schema {obj.get('schema')!r}")
        kernel = KernelMatrix.from_json(obj["kernel"])
        omega = Measure.from_json(obj["omega"])
        support = SupportSet(obj["support"])
        if len(omega) != kernel.size:
            raise ValueError("omega length does not match the kernel size")
        if support.indices[-1] >= kernel.size:
            raise ValueError("support indices exceed the kernel size")
        tol = float(obj.get("tol", 1e-8)) if tol_override is None else tol_override
        h = obj.get("h")
    except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        record("fixture-readable", False, str(exc))
        return checks
    record("fixture-readable", True)

    idx = support.as_array()
    try:
        bal = pseudo_balayage(kernel, omega, support, tol=tol, h=h)
        record("balayage-characterization", True)
    except (CharacterizationViolated, MaxIterExceeded) as exc:
        record("balayage-characterization", False, str(exc))
        return checks
    record("balayage-value-sign", bal.value <= 10 * tol, f"value={bal.value:.3e}")
    m_const = float(np.max((kernel.entries @ omega.total_variation.weights)[idx]))
    bracket = -2.0 * m_const * max(bal.mass, 0.0) - 10 * tol
    record("balayage-value-bracket", bal.value >= bracket, f"value={bal.value:.3e} floor={bracket:.3e}")
    chk = verify_ii1(kernel, omega, support, bal.measure, tol=10 * tol)
    record("two-route-check", chk.ok, f"gap_min={chk.atom_gap_min:.3e} self={chk.self_integral_abs:.3e}")

    try:
        res = solve_gauss(kernel, omega, support, tol=tol)
        record("gauss-equilibrium", True)
        record("value-ordering", bal.value <= res.value + 10 * tol,
               f"swept={bal.value:.3e} constrained={res.value:.3e}")
    except (CharacterizationViolated, MaxIterExceeded) as exc:
        record("gauss-equilibrium", False, str(exc))

    if len(support) <= 12:
        Q = kernel.restrict(support)
        b = (kernel.entries @ omega.weights)[idx]
        cone = ConeQpProblem(Q, b)
        w_solver, _ = solve_cone_qp(cone, tol=tol)
        w_oracle = brute_force_cone(cone)
        record(
            "cone-oracle",
            float(np.max(np.abs(w_solver - w_oracle))) <= 1e-8
            and abs(cone.objective(w_solver) - cone.objective(w_oracle)) <= 1e-10,
        )
        simplex = SimplexQpProblem(Q, -b)
        v_solver, _ = solve_simplex_qp(simplex, tol=tol)
        v_oracle = brute_force_simplex(simplex)
        record(
            "simplex-oracle",
            float(np.max(np.abs(v_solver - v_oracle))) <= 1e-8
            and abs(simplex.objective(v_solver) - simplex.objective(v_oracle)) <= 1e-10,
        )

    if len(support) >= 3:
        order = list(support.indices)
        chain = [SupportSet(order[: max(1, len(order) // 3)]),
                 SupportSet(order[: max(2, (2 * len(order)) // 3)]),
                 support]
        try:
            rep = monotone_up(kernel, omega, chain, tol=tol)
            record("strong-cauchy-chain", min(rep.fund_slack, default=0.0) >= -10 * tol)
        except CharacterizationViolated as exc:
            record("strong-cauchy-chain", False, str(exc))

    if h is not None:
        mb = mass_bound_check(bal, h, omega)
        record("mass-bound", bool(mb.passed), f"mass={mb.mass:.4f} bound={mb.bound:.4f}")
    return checks


def _cmd_verify(cfg: dict) -> int:
    paths = _fixture_paths(cfg)
    tol_override = float(cfg["tol"]) if "tol" in cfg else None
    all_checks: list[dict] = []
    for path in paths:
        all_checks.extend(_verify_fixture(path, tol_override))
    passed = all(c["passed"] for c in all_checks)
    payload = {"checks": all_checks, "passed": passed}
    _emit(cfg, "verify", payload)
    failures = [c for c in all_checks if not c["passed"]]
    if cfg.get("_summary"):
        for c in all_checks:
            print(f"  [{'pass' if c['passed'] else 'FAIL'}] {c['fixture']}: {c['check']} {c['detail']}")
    if failures:
        first = failures[0]
        print(f"verify: FAIL {first['fixture']}:{first['check']} {first['detail']}", file=sys.stderr)
        return EXIT_INVARIANT
    print(f"verify: {len(all_checks)} checks over {len(paths)} fixtures, all passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finpot",
        description="Finite-node potential theory: sweep charges, solve weighted equilibria, run experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="path to the JSON run config")
        p.add_argument("--tol", type=float, default=None, help="override the solver tolerance")
        p.add_argument("--out", default=None, help="output directory for reports")
        p.add_argument("--summary", action="store_true", help="print per-invariant pass/fail lines")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _read_config(args)
        if args.command == "balayage":
            return _cmd_balayage(cfg)
        if args.command == "gauss":
            return _cmd_gauss(cfg)
        if args.command == "capacity":
            return _cmd_capacity(cfg)
        if args.command == "solvability":
            return _cmd_solvability(cfg)
        if args.command == "converge-up":
            return _cmd_converge(cfg, "up")
        if args.command == "converge-down":
            return _cmd_converge(cfg, "down")
        if args.command == "thinness":
            return _cmd_thinness(cfg)
        return _cmd_verify(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotPositiveDefinite, DuplicatePoints, ChargeOnNode, NotNested,
            EmptyIntersection, SizeMismatchError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CharacterizationViolated as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except MaxIterExceeded as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
