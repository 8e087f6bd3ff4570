"""Convergence studies, stability experiments and the ``cnpi`` command line."""

from __future__ import annotations

import argparse
import io
import logging
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ParameterError, SolverError
from .manufactured import ManufacturedCase, make_case
from .mesh import GradedMesh, build_graded_mesh, optimal_grading, validate_mesh_hypotheses
from .operators import SpatialGrid, example1_bundle, example2_bundle, scalar_bundle
from .stepper import SOURCE_RULES, ProblemSpec, energy_sequence, run, to_physical

log = logging.getLogger(__name__)

DEFAULT_N_LIST = {1: (16, 32, 64, 128, 256), 2: (12, 24, 48, 96)}
FLOOR_FACTOR = 10.0
FLOOR_REFERENCE_N = 256


def resolve_gamma(rule, alpha: float) -> float:
    """``uniform`` -> 1, ``optimal`` -> 2/(1+alpha), ``optimal+1``, or an explicit number."""
    if isinstance(rule, (int, float)):
        return float(rule)
    rule = str(rule).strip().lower()
    if rule == "uniform":
        return 1.0
    if rule == "optimal":
        return optimal_grading(alpha)
    if rule in ("optimal+1", "optimalplusone"):
        return optimal_grading(alpha) + 1.0
    try:
        return float(rule)
    except ValueError:
        raise ParameterError(f"unknown grading rule {rule!r}") from None


@dataclass
class StudyConfig:
    example: int = 1
    alphas: tuple = (0.2, 0.8)
    kappa: float = 1.0
    gamma_rule: object = "optimal"
    N_list: tuple = DEFAULT_N_LIST[1]
    M: int = 256
    source_rule: str = "average"
    T: float = 1.0
    L: float = 1.0
    output: str | None = None
    format: str = "csv"
    timing: bool = True
    floor: bool = True

    def __post_init__(self):
        self.alphas = tuple(float(a) for a in self.alphas)
        self.N_list = tuple(int(n) for n in self.N_list)
        if self.example not in (1, 2):
            raise ParameterError(f"example must be 1 or 2, got {self.example!r}")
        if not self.N_list or any(n < 2 for n in self.N_list):
            raise ParameterError("every N must be >= 2")
        if any(b <= a for a, b in zip(self.N_list, self.N_list[1:])):
            raise ParameterError("N list must be strictly increasing")
        if self.M < 2:
            raise ParameterError(f"M must be >= 2, got {self.M}")
        if self.source_rule not in SOURCE_RULES:
            raise ParameterError(f"source rule must be one of {SOURCE_RULES}")
        if self.format not in ("csv", "table"):
            raise ParameterError(f"format must be csv or table, got {self.format!r}")
        self.gamma = resolve_gamma(self.gamma_rule, min(self.alphas))

    def case(self) -> ManufacturedCase:
        return make_case(self.example, self.alphas, self.kappa, self.L)

    def grid(self) -> SpatialGrid:
        return SpatialGrid(self.example, self.M, self.L)


@dataclass
class ConvergenceReport:
    rows: list
    metadata: dict
    floor: float | None = None
    below_floor: list = field(default_factory=list)

    @property
    def errors(self) -> np.ndarray:
        return np.array([r["error"] for r in self.rows])

    @property
    def rates(self) -> np.ndarray:
        return np.array([r["rate"] for r in self.rows[1:]])


def bundle_for(case: ManufacturedCase, grid: SpatialGrid):
    return example1_bundle(grid) if case.dim == 1 else example2_bundle(grid)


def build_problem(case: ManufacturedCase, grid: SpatialGrid, mesh: GradedMesh, source_rule="average"):
    pts = grid.points()
    phi = case.profile(*pts)
    return ProblemSpec(
        kernel=case.kernel,
        bundle=bundle_for(case, grid),
        mesh=mesh,
        g=lambda t: case.source_amplitude(t) * phi,
        u0=case.u0(pts),
        source_rule=source_rule,
    )


def l2_error(numerical, case: ManufacturedCase, mesh: GradedMesh, grid: SpatialGrid) -> float:
    """``max_{1<=n<=N} |U^n - u(t_n)|`` in the discrete grid norm; ``numerical`` holds U^1..U^N."""
    numerical = np.asarray(numerical, dtype=float)
    if numerical.shape != (mesh.N, grid.interior_count):
        raise ValueError(
            f"expected {(mesh.N, grid.interior_count)} numerical values, got {numerical.shape}"
        )
    pts = grid.points()
    return max(
        grid.norm(numerical[n - 1] - case.exact_u(pts, mesh.t[n])) for n in range(1, mesh.N + 1)
    )


def convergence_rate(errors) -> np.ndarray:
    errors = np.asarray(errors, dtype=float)
    if errors.size < 2:
        raise ValueError("need at least two errors")
    if np.any(~(errors > 0)):
        raise ValueError("errors must be positive")
    return np.log2(errors[:-1] / errors[1:])


def solve_case(case: ManufacturedCase, grid: SpatialGrid, mesh: GradedMesh, source_rule="average"):
    """Run the scheme and return physical values ``U^0..U^N``."""
    spec = build_problem(case, grid, mesh, source_rule)
    state = run(spec)
    return to_physical(state, mesh, case.kernel.kappa)


def spatial_error(case: ManufacturedCase, grid: SpatialGrid, gamma: float, T=1.0,
                  source_rule="average", N_ref=FLOOR_REFERENCE_N) -> float:
    """Estimate of the pure spatial error at fixed M.

    The sampled profile is an exact eigenvector of the FD operators, so the
    semi-discrete solution is a scalar amplitude times the profile. Two scalar
    runs on the same fine mesh, one with FD eigenvalues and one with continuum
    eigenvalues, share their temporal error; their difference is the spatial part.
    """
    mesh = build_graded_mesh(N_ref, gamma, T)
    disc = case.discrete_eigen(grid)
    kappa = case.kernel.kappa

    def amplitude(lam_A, lam_B):
        spec = ProblemSpec(
            kernel=case.kernel,
            bundle=scalar_bundle(lam_A, lam_B),
            mesh=mesh,
            g=lambda t: np.array([case.source_amplitude(t)]),
            u0=[case.amplitude(0.0)],
            source_rule=source_rule,
        )
        return to_physical(run(spec), mesh, kappa)[:, 0]

    diff = amplitude(disc["A"], disc["B"]) - amplitude(case.lam_A, case.lam_B)
    return float(np.max(np.abs(diff))) * grid.norm(case.profile(*grid.points()))


def run_study(config: StudyConfig, sink=None) -> ConvergenceReport:
    case, grid = config.case(), config.grid()
    metadata = {k: v for k, v in asdict(config).items() if k not in ("output",)}
    metadata["gamma"] = config.gamma
    metadata["T"] = config.T
    hyp = validate_mesh_hypotheses(build_graded_mesh(config.N_list[-1], config.gamma, config.T))
    metadata["mesh_hypotheses"] = {
        "c_initial": hyp.c_initial,
        "C_step": hyp.C_step,
        "C_ratio": hyp.C_ratio,
        "C_increment": hyp.C_increment,
        "satisfied": hyp.all_satisfied,
    }
    report = ConvergenceReport(rows=[], metadata=metadata)
    if config.floor:
        report.floor = FLOOR_FACTOR * spatial_error(case, grid, config.gamma, config.T, config.source_rule)

    try:
        for N in config.N_list:
            mesh = build_graded_mesh(N, config.gamma, config.T)
            t0 = time.perf_counter()
            U = solve_case(case, grid, mesh, config.source_rule)
            wall_ms = (time.perf_counter() - t0) * 1e3
            err = l2_error(U[1:], case, mesh, grid)
            rate = None
            if report.rows:
                rate = float(convergence_rate([report.rows[-1]["error"], err])[0])
            report.rows.append({"N": N, "error": err, "rate": rate,
                                "wall_ms": wall_ms if config.timing else None})
            if report.floor is not None and err < report.floor:
                report.below_floor.append(N)
            log.info("N=%d error=%.4e rate=%s", N, err, rate)
    except SolverError as exc:
        report.rows.append({"N": N, "error": None, "rate": None, "wall_ms": None, "failure": str(exc)})
        emit(report, config, sink)
        raise
    emit(report, config, sink)
    return report


def emit(report: ConvergenceReport, config: StudyConfig, sink=None):
    text = format_csv(report) if config.format == "csv" else format_table(report)
    if sink is not None:
        sink.write(text)
    elif config.output:
        with open(config.output, "w", newline="") as fh:
            fh.write(text)
    return text


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def format_csv(report: ConvergenceReport) -> str:
    out = io.StringIO()
    for key, val in report.metadata.items():
        if isinstance(val, dict):
            for sub, sv in val.items():
                out.write(f"#{key}.{sub}={_fmt(sv)}\n")
        elif isinstance(val, (tuple, list)):
            out.write(f"#{key}={','.join(_fmt(v) for v in val)}\n")
        else:
            out.write(f"#{key}={_fmt(val)}\n")
    out.write(f"#spatial_floor={_fmt(report.floor)}\n")
    out.write(f"#below_floor={','.join(str(n) for n in report.below_floor)}\n")
    out.write("N,error,rate,wall_ms\n")
    for row in report.rows:
        if "failure" in row:
            out.write(f"{row['N']},ERROR,,\n")
            out.write(f"#failure={row['failure']}\n")
            continue
        wall = "" if row["wall_ms"] is None else f"{row['wall_ms']:.1f}"
        out.write(f"{row['N']},{_fmt(row['error'])},{_fmt(row['rate'])},{wall}\n")
    return out.getvalue()


def format_table(report: ConvergenceReport) -> str:
    md = report.metadata
    head = (f"Example {md['example']}: alphas={md['alphas']} kappa={md['kappa']} "
            f"gamma={md['gamma']:.4f} M={md['M']} source={md['source_rule']}")
    lines = [head, f"{'N':>6} | {'E_CN':>11} | {'rate':>5}", "-" * 30]
    for row in report.rows:
        if "failure" in row:
            lines.append(f"{row['N']:>6} | {'ERROR':>11} |")
            continue
        rate = "*" if row["rate"] is None else f"{row['rate']:.2f}"
        flag = "  (below spatial floor)" if row["N"] in report.below_floor else ""
        lines.append(f"{row['N']:>6} | {row['error']:11.4e} | {rate:>5}{flag}")
    return "\n".join(lines) + "\n"


@dataclass
class StabilityReport:
    t: np.ndarray
    norms: np.ndarray
    energies: np.ndarray
    kappa: float
    nonincreasing: bool | None
    energy_bounded: bool
    energy_deviation: float

    def format_csv(self) -> str:
        out = io.StringIO()
        out.write(f"#kappa={_fmt(self.kappa)}\n")
        out.write(f"#nonincreasing={self.nonincreasing}\n")
        out.write(f"#energy_bounded={self.energy_bounded}\n")
        out.write(f"#energy_deviation={_fmt(self.energy_deviation)}\n")
        out.write("n,t,norm,energy\n")
        for n, (t, v, e) in enumerate(zip(self.t, self.norms, self.energies)):
            out.write(f"{n},{_fmt(t)},{_fmt(v)},{_fmt(e)}\n")
        return out.getvalue()


def stability_from_state(state, mesh, kappa, norm, rtol=1e-12) -> StabilityReport:
    norms = np.array([norm(v) for v in state.V])
    energies = energy_sequence(state, mesh, kappa, norm)
    E0 = energies[0]
    tol = rtol * abs(E0)
    nonincreasing = None
    if kappa == 0:
        nonincreasing = bool(np.all(np.diff(norms) <= rtol * norms[0]))
    return StabilityReport(
        t=np.array(mesh.t[: state.n + 1]),
        norms=norms,
        energies=energies,
        kappa=kappa,
        nonincreasing=nonincreasing,
        energy_bounded=bool(np.all(energies <= E0 + tol)),
        energy_deviation=float(np.max(np.abs(energies - E0))),
    )


def run_stability_experiment(example=1, alphas=(0.2, 0.8), kappa=0.0, gamma_rule="optimal",
                             steps=64, M=64, T=1.0, u0=None) -> StabilityReport:
    """Homogeneous run (f = 0) from the sine profile, or from ``u0`` when given."""
    case = make_case(example, alphas, kappa)
    grid = SpatialGrid(case.dim, M)
    mesh = build_graded_mesh(steps, resolve_gamma(gamma_rule, min(alphas)), T)
    bundle = bundle_for(case, grid)
    start = case.profile(*grid.points()) if u0 is None else np.asarray(u0, dtype=float)
    zero = np.zeros(bundle.size)
    spec = ProblemSpec(case.kernel, bundle, mesh, lambda t: zero, start)
    return stability_from_state(run(spec), mesh, kappa, grid.norm)


def solve_report(config: StudyConfig, N: int) -> str:
    """Per-step error trace for a single run."""
    case, grid = config.case(), config.grid()
    mesh = build_graded_mesh(N, config.gamma, config.T)
    U = solve_case(case, grid, mesh, config.source_rule)
    pts = grid.points()
    errs = [grid.norm(U[n] - case.exact_u(pts, mesh.t[n])) for n in range(N + 1)]
    out = io.StringIO()
    for key, val in asdict(config).items():
        if key not in ("output", "N_list"):
            out.write(f"#{key}={_fmt(val)}\n")
    out.write(f"#gamma={_fmt(config.gamma)}\n#N={N}\n#E_CN={_fmt(max(errs[1:]))}\n")
    out.write("n,t,error\n")
    for n in range(N + 1):
        out.write(f"{n},{_fmt(mesh.t[n])},{_fmt(errs[n])}\n")
    return out.getvalue()


# --- command line -----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(s):
    return tuple(float(v) for v in s.split(","))


def _ints(s):
    return tuple(int(v) for v in s.split(","))


def _common(p, source=True):
    p.add_argument("--example", type=int, choices=(1, 2), default=1)
    p.add_argument("--alphas", type=_floats, default=(0.2, 0.8))
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--gamma", default="optimal", help="uniform | optimal | optimal+1 | number")
    p.add_argument("--M", type=int, default=None)
    if source:
        p.add_argument("--source", choices=SOURCE_RULES, default="average")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "table"), default="csv")


def make_parser():
    parser = _Parser(prog="cnpi", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="single run, per-step errors")
    _common(p)
    p.add_argument("--N", type=int, required=True)

    p = sub.add_parser("study", help="convergence study over an N ladder")
    _common(p)
    p.add_argument("--N-list", dest="N_list", type=_ints, default=None)
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock column (byte-stable output)")
    p.add_argument("--no-floor", action="store_true", help="skip the spatial-floor reference run")

    p = sub.add_parser("stability", help="homogeneous run: norms and energy")
    _common(p, source=False)
    p.add_argument("--steps", type=int, default=64)

    p = sub.add_parser("validate-mesh", help="grading-hypothesis constants")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--T", type=float, default=1.0)
    return parser


def _write(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as exc:  # --help exits 0, usage errors exit 1
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate-mesh":
            rep = validate_mesh_hypotheses(build_graded_mesh(args.N, args.gamma, args.T))
            _write(
                f"c_initial={_fmt(rep.c_initial)}\nC_step={_fmt(rep.C_step)}\nC_ratio={_fmt(rep.C_ratio)}\n"
                f"C_increment={_fmt(rep.C_increment)}\n"
                + "".join(f"satisfied.{k}={v}\n" for k, v in rep.satisfied.items()),
                None,
            )
            return 0 if rep.all_satisfied else 1

        M = args.M if args.M is not None else (256 if args.example == 1 else 70)
        if args.command == "stability":
            rep = run_stability_experiment(args.example, args.alphas, args.kappa, args.gamma,
                                           args.steps, M)
            _write(rep.format_csv(), args.out)
            return 0

        config = StudyConfig(
            example=args.example,
            alphas=args.alphas,
            kappa=args.kappa,
            gamma_rule=args.gamma,
            N_list=getattr(args, "N_list", None) or DEFAULT_N_LIST[args.example],
            M=M,
            source_rule=args.source,
            output=args.out,
            format=args.format,
            timing=not getattr(args, "no_timing", False),
            floor=not getattr(args, "no_floor", False),
        )
        if args.command == "solve":
            _write(solve_report(config, args.N), args.out)
            return 0
        report = run_study(config, sink=None if args.out else sys.stdout)
        if report.below_floor:
            log.warning("errors below the spatial floor %.3e at N=%s", report.floor, report.below_floor)
        return 0
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
