"""Experiment orchestration: frames -> sensing -> isometry constants ->
certificates -> solvers -> audits, with CSV/JSON reporting.

Runs are reproducible byte-for-byte: every random draw comes from a
substream keyed by (config seed, trial index), so the worker count cannot
change results.  A record only asserts its error bound when the isometry
constant was computed exactly and the certificate was applicable -- there is
no silent downgrade.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import drip, frames, guarantees, sensing, solvers
from .errors import ContractViolation, EnumerationLimitError
from .rng import derive_seed, rng_from_seed
from .serialize import format_real

CSV_HEADER = ("trial,n,d,m,s,q,eps,delta_2s,regime,rho,C0,C1,q0,tail,err_l2,"
              "bound,within_bound,iters,status,audit_pass,audit_total")

FRAME_KINDS = ("identity", "dct", "random", "union_dct")
MATRIX_KINDS = ("gaussian", "bernoulli")
SIGNAL_MODES = ("synthesis", "analysis")
PROGRAMS = ("p1", "pq")

STATUS_OK = "ok"
STATUS_NOT_CONVERGED = "not_converged"
STATUS_SURROGATE_GAP = "surrogate_gap"
STATUS_NOT_APPLICABLE = "not_applicable"
STATUS_LOWER_BOUND = "lower_bound_only"


@dataclass(frozen=True)
class FrameSpec:
    kind: str = "random"
    seed: int = 0


@dataclass(frozen=True)
class MatrixSpec:
    kind: str = "gaussian"
    seed: int = 0
    # a number rescales A by that factor; "auto_min" picks the scale that
    # minimizes the order-2s constant; {"target_delta": t} lands it at t
    # exactly when reachable (the constant is recomputed either way)
    scale: object = 1.0


@dataclass(frozen=True)
class SignalSpec:
    mode: str = "synthesis"
    seed: int = 0


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    d: int
    m: int
    s: int
    trials: int = 1
    q: Optional[float] = None
    eps: float = 0.0
    noise_mode: str = "none"
    program: str = "p1"
    frame: FrameSpec = field(default_factory=FrameSpec)
    matrix: MatrixSpec = field(default_factory=MatrixSpec)
    signal: SignalSpec = field(default_factory=SignalSpec)
    noise_seed: int = 0
    solver: solvers.SolverOptions = field(default_factory=solvers.SolverOptions)
    drip_mode: str = "exact"
    drip_trials: int = 2000
    drip_seed: int = 0
    out: Optional[str] = None

    def __post_init__(self):
        if min(self.n, self.d, self.m, self.s) < 1:
            raise ContractViolation("dimensions must be positive")
        if self.trials < 1:
            raise ContractViolation("trials must be >= 1")
        if self.eps < 0:
            raise ContractViolation("eps must be >= 0")
        if self.frame.kind not in FRAME_KINDS:
            raise ContractViolation("unknown frame kind %r" % self.frame.kind)
        if self.matrix.kind not in MATRIX_KINDS:
            raise ContractViolation("unknown matrix kind %r" % self.matrix.kind)
        if self.signal.mode not in SIGNAL_MODES:
            raise ContractViolation("unknown signal mode %r" % self.signal.mode)
        if self.noise_mode not in sensing.NOISE_MODES:
            raise ContractViolation("unknown noise mode %r" % self.noise_mode)
        if self.program not in PROGRAMS:
            raise ContractViolation("program must be one of %s" % (PROGRAMS,))
        if self.program == "pq" and (self.q is None or not 0.0 < self.q < 1.0):
            raise ContractViolation("program 'pq' needs q in (0, 1)")
        if self.drip_mode not in ("exact", "lower"):
            raise ContractViolation("drip_mode must be 'exact' or 'lower'")
        if self.frame.kind in ("identity", "dct") and self.d != self.n:
            raise ContractViolation("%s frame needs d == n" % self.frame.kind)
        if self.frame.kind == "union_dct" and self.d != 2 * self.n:
            raise ContractViolation("union frame needs d == 2 n")
        if self.signal.mode == "analysis" and self.frame.kind not in ("identity", "dct"):
            raise ContractViolation(
                "exact-analysis-sparse signals are only offered for orthobasis frames"
            )

    @classmethod
    def from_dict(cls, raw: Dict) -> "ExperimentConfig":
        raw = dict(raw)
        frame = FrameSpec(**raw.pop("frame", {}))
        matrix = MatrixSpec(**raw.pop("matrix", {}))
        signal = SignalSpec(**raw.pop("signal", {}))
        solver = solvers.SolverOptions(**raw.pop("solver", {}))
        return cls(frame=frame, matrix=matrix, signal=signal, solver=solver, **raw)

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class ExperimentRecord:
    trial: int
    seeds: Dict[str, int]
    n: int
    d: int
    m: int
    s: int
    q: Optional[float]
    eps: float
    delta_2s: float
    drip_method: str
    regime: str
    applicable: bool
    rho: Optional[float]
    C0: Optional[float]
    C1: Optional[float]
    q0: Optional[float]
    tail: float
    err_l2: float
    bound: Optional[float]
    within_bound: Optional[bool]
    iters: int
    status: str
    audit_pass: int
    audit_total: int

    def to_csv_row(self) -> "CsvRow":
        return CsvRow(
            trial=self.trial, n=self.n, d=self.d, m=self.m, s=self.s,
            q=self.q, eps=self.eps, delta_2s=self.delta_2s, regime=self.regime,
            rho=self.rho, C0=self.C0, C1=self.C1, q0=self.q0, tail=self.tail,
            err_l2=self.err_l2, bound=self.bound, within_bound=self.within_bound,
            iters=self.iters, status=self.status, audit_pass=self.audit_pass,
            audit_total=self.audit_total,
        )

    def to_json_dict(self):
        return {
            "trial": self.trial, "seeds": dict(self.seeds), "n": self.n,
            "d": self.d, "m": self.m, "s": self.s, "q": self.q,
            "eps": self.eps, "delta_2s": self.delta_2s,
            "drip_method": self.drip_method, "regime": self.regime,
            "applicable": self.applicable, "rho": self.rho, "C0": self.C0,
            "C1": self.C1, "q0": self.q0, "tail": self.tail,
            "err_l2": self.err_l2, "bound": self.bound,
            "within_bound": self.within_bound, "iters": self.iters,
            "status": self.status, "audit_pass": self.audit_pass,
            "audit_total": self.audit_total,
        }


@dataclass(frozen=True)
class CsvRow:
    """Exactly the fields that appear in the CSV, in column order."""

    trial: int
    n: int
    d: int
    m: int
    s: int
    q: Optional[float]
    eps: float
    delta_2s: float
    regime: str
    rho: Optional[float]
    C0: Optional[float]
    C1: Optional[float]
    q0: Optional[float]
    tail: float
    err_l2: float
    bound: Optional[float]
    within_bound: Optional[bool]
    iters: int
    status: str
    audit_pass: int
    audit_total: int


def build_frame(kind: str, n: int, d: int, seed: int) -> frames.TightFrame:
    if kind == "identity":
        return frames.make_identity_frame(n)
    if kind == "dct":
        return frames.make_dct_frame(n)
    if kind == "union_dct":
        return frames.make_union_frame(np.eye(n), frames.make_dct_frame(n).matrix)
    return frames.make_random_tight_frame(n, d, seed)


def _gen_matrix(kind: str, m: int, n: int, seed: int) -> np.ndarray:
    if kind == "gaussian":
        return sensing.gen_gaussian(m, n, seed)
    return sensing.gen_bernoulli(m, n, seed)


def _resolve_scale(spec_scale, a, frame, order) -> float:
    if isinstance(spec_scale, (int, float)) and not isinstance(spec_scale, bool):
        if spec_scale <= 0:
            raise ContractViolation("matrix scale must be positive")
        return float(spec_scale)
    lo, hi = drip.support_spectrum_range(a, frame, order)
    if isinstance(spec_scale, str) and spec_scale == "auto_min":
        return math.sqrt(2.0 / (hi + lo))
    if isinstance(spec_scale, dict) and "target_delta" in spec_scale:
        t = float(spec_scale["target_delta"])
        if not 0.0 < t < 1.0:
            raise ContractViolation("target_delta must be in (0, 1)")
        d_min = (hi - lo) / (hi + lo)
        if t < d_min:
            # target unreachable; fall back to the achievable minimum
            return math.sqrt(2.0 / (hi + lo))
        return math.sqrt((1.0 + t) / hi)
    raise ContractViolation("bad matrix scale %r" % (spec_scale,))


def _draw_signal(frame, s, seed) -> np.ndarray:
    # synthesis-sparse draw f = D x with x s-sparse; on an orthobasis frame
    # this is also exactly analysis-sparse, which is all the "analysis"
    # signal mode (restricted to orthobasis frames at validation) needs
    rng = rng_from_seed(seed)
    support = rng.choice(frame.d, size=s, replace=False)
    values = rng.standard_normal(s)
    x = np.zeros(frame.d)
    x[support] = values
    return frame.matrix @ x


def run_trial(config: ExperimentConfig, trial: int) -> ExperimentRecord:
    seeds = {
        "frame": derive_seed(config.frame.seed, trial),
        "matrix": derive_seed(config.matrix.seed, trial),
        "signal": derive_seed(config.signal.seed, trial),
        "noise": derive_seed(config.noise_seed, trial),
    }
    frame = build_frame(config.frame.kind, config.n, config.d, seeds["frame"])
    a = _gen_matrix(config.matrix.kind, config.m, config.n, seeds["matrix"])
    a = a * _resolve_scale(config.matrix.scale, a, frame, 2 * config.s)
    f = _draw_signal(frame, config.s, seeds["signal"])
    model = sensing.measure(a, f, mode=config.noise_mode, level=config.eps,
                            seed=seeds["noise"])

    order = 2 * config.s
    if config.drip_mode == "exact":
        try:
            rip = drip.exact_drip(a, frame, order)
        except EnumerationLimitError as err:
            raise EnumerationLimitError(
                "%s -- shrink (d, s) or set \"drip_mode\": \"lower\" (which "
                "disables bound assertions and marks records accordingly)" % err
            ) from err
    else:
        rip = drip.random_lower_bound(a, frame, order, config.drip_trials,
                                      derive_seed(config.drip_seed, trial))
    exact = rip.method == drip.METHOD_EXACT

    q = config.q if config.program == "pq" else None
    certs = {c.regime: c for c in guarantees.certify(rip.delta, config.n, config.s,
                                                     q_opt=q)}
    if config.program == "pq":
        cert = certs[guarantees.REGIME_LQ]
    elif certs[guarantees.REGIME_GENERAL].applicable:
        cert = certs[guarantees.REGIME_GENERAL]
    elif certs[guarantees.REGIME_SPECIAL].applicable:
        cert = certs[guarantees.REGIME_SPECIAL]
    else:
        cert = certs[guarantees.REGIME_GENERAL]

    if config.program == "pq":
        res = solvers.solve_pq(frame, model, config.q, config.solver)
    else:
        res = solvers.solve_p1(frame, model, config.solver)

    coeffs_true = frame.matrix.T @ f
    coeffs_hat = frame.matrix.T @ res.f_hat
    qq = q if q is not None else 1.0
    approx = frames.best_s_term(coeffs_true, config.s, qq)
    tail = approx.tail_l1 if q is None else approx.tail_lq
    err = float(np.linalg.norm(res.f_hat - f))

    if q is None:
        gate = float(np.abs(coeffs_hat).sum()) <= float(np.abs(coeffs_true).sum())
    else:
        gate = float(np.sum(np.abs(coeffs_hat) ** qq)) <= float(np.sum(np.abs(coeffs_true) ** qq))

    bound = None
    within = None
    if not exact:
        status = STATUS_LOWER_BOUND
    elif not res.converged:
        status = STATUS_NOT_CONVERGED
    elif not gate:
        status = STATUS_SURROGATE_GAP
    elif not cert.applicable:
        status = STATUS_NOT_APPLICABLE
    else:
        status = STATUS_OK
        bound = guarantees.error_bound(cert.C0, cert.C1, tail, config.s,
                                       model.epsilon, qq)
        within = err <= bound * (1.0 + 1e-6)

    audit_pass = audit_total = 0
    if exact and res.converged and gate:
        try:
            records = guarantees.audit_lemmas(frame, a, f, res.f_hat, config.s,
                                              qq, model.epsilon, rip.delta,
                                              y=model.y)
            audit_total = len(records)
            audit_pass = sum(1 for r in records if r.holds)
        except ContractViolation:
            audit_pass = audit_total = 0

    return ExperimentRecord(
        trial=trial, seeds=seeds, n=config.n, d=config.d, m=config.m,
        s=config.s, q=q, eps=model.epsilon, delta_2s=rip.delta,
        drip_method=rip.method, regime=cert.regime, applicable=cert.applicable,
        rho=cert.rho, C0=cert.C0, C1=cert.C1, q0=cert.q0, tail=tail,
        err_l2=err, bound=bound, within_bound=within, iters=res.iterations,
        status=status, audit_pass=audit_pass, audit_total=audit_total,
    )


def run_experiment(config: ExperimentConfig, workers: int = 1) -> List[ExperimentRecord]:
    if workers < 1:
        raise ContractViolation("workers must be >= 1")
    indices = range(config.trials)
    if workers == 1:
        return [run_trial(config, t) for t in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: run_trial(config, t), indices))


# ---------------------------------------------------------------------------
# CSV


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_real(value)
    return str(value)


def write_csv(records, path) -> None:
    """CSV with the fixed header, UTF-8, LF endings, 17-digit reals."""
    lines = [CSV_HEADER]
    for rec in records:
        row = rec.to_csv_row() if isinstance(rec, ExperimentRecord) else rec
        lines.append(",".join(_cell(v) for v in (
            row.trial, row.n, row.d, row.m, row.s, row.q, row.eps,
            row.delta_2s, row.regime, row.rho, row.C0, row.C1, row.q0,
            row.tail, row.err_l2, row.bound, row.within_bound, row.iters,
            row.status, row.audit_pass, row.audit_total,
        )))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_opt_float(cell: str) -> Optional[float]:
    return None if cell == "" else float(cell)


def read_csv(path) -> List[CsvRow]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines or lines[0] != CSV_HEADER:
        raise ContractViolation("unexpected CSV header in %s" % path)
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        c = line.split(",")
        if len(c) != 21:
            raise ContractViolation("bad CSV row: %r" % line)
        rows.append(CsvRow(
            trial=int(c[0]), n=int(c[1]), d=int(c[2]), m=int(c[3]), s=int(c[4]),
            q=_parse_opt_float(c[5]), eps=float(c[6]), delta_2s=float(c[7]),
            regime=c[8], rho=_parse_opt_float(c[9]), C0=_parse_opt_float(c[10]),
            C1=_parse_opt_float(c[11]), q0=_parse_opt_float(c[12]),
            tail=float(c[13]), err_l2=float(c[14]), bound=_parse_opt_float(c[15]),
            within_bound=None if c[16] == "" else c[16] == "true",
            iters=int(c[17]), status=c[18], audit_pass=int(c[19]),
            audit_total=int(c[20]),
        ))
    return rows


# ---------------------------------------------------------------------------
# the delta = 1/14 comparison

# constants others have reported for an order-2s constant of 1/14, kept for
# comparison in reports; evaluating the closed forms here gives a different
# pair, so runs emit a discrepancy note instead of asserting either value
REPORTED_PAIR_AT_ONE_FOURTEENTH = (5.06, 10.57)


def compare_reported_constants() -> Dict:
    """Evaluate the general-regime constants at delta = 1/14 and compare with
    the previously reported pair, flagging any >5% discrepancy."""
    delta = 1.0 / 14.0
    c0, c1 = guarantees.constants_general(delta)
    ref_c0, ref_c1 = REPORTED_PAIR_AT_ONE_FOURTEENTH
    rel_c0 = abs(c0 - ref_c0) / ref_c0
    rel_c1 = abs(c1 - ref_c1) / ref_c1
    note = None
    if max(rel_c0, rel_c1) > 0.05:
        note = ("computed constants (%.6g, %.6g) differ from the reported pair "
                "(%.6g, %.6g) by more than 5%%; the reported pair matches an "
                "evaluation near delta ~ 0.2625, not delta = 1/14"
                % (c0, c1, ref_c0, ref_c1))
    return {
        "delta": delta,
        "computed_C0": c0,
        "computed_C1": c1,
        "reported_C0": ref_c0,
        "reported_C1": ref_c1,
        "relative_difference_C0": rel_c0,
        "relative_difference_C1": rel_c1,
        "discrepancy_note": note,
    }
