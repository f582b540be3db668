"""Run an ExperimentConfig: build the sequence, execute tasks, write files and a manifest."""
import datetime as _dt
import json
import os
import shutil
import tempfile
import traceback
from dataclasses import asdict, dataclass, field

import numpy as np

import ppclab
from ppclab.energy import energy_report, watt_ratio
from ppclab.errors import DomainError, PPCError
from ppclab.expcli.config import config_hash
from ppclab.expcli.plots import emit_plot
from ppclab.harmonic import MeasureSpec, mu_sample, sandwich_check
from ppclab.paircorr import PairCorrCurve, r2_curve
from ppclab.sequences import gen_nlog, gen_power, load_sequence
from ppclab.torus import dilate_frac
from ppclab.variance import variance_estimate


@dataclass
class TaskRecord:
    status: str
    files: list = field(default_factory=list)
    error: str = None


@dataclass
class RunManifest:
    config_hash: str
    tool_version: str
    started: str
    finished: str
    out_dir: str
    tasks: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(t.status == "ok" for t in self.tasks.values())

    @property
    def exit_code(self):
        return 0 if self.ok else 2

    def to_dict(self):
        return asdict(self)

    def to_json(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, path):
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        raw["tasks"] = {k: TaskRecord(**v) for k, v in raw["tasks"].items()}
        return cls(**raw)


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def build_sequence(spec, n_max, d=None):
    if spec.family == "power":
        n0 = 1 if spec.n0 is None else spec.n0
        seq = gen_power(spec.theta, n_max, n0=n0)
    elif spec.family == "nlog":
        n0 = 2 if spec.n0 is None else spec.n0
        seq = gen_nlog(spec.A, n_max, n0=n0)
    else:
        seq = load_sequence(spec.path)
        if seq.N < n_max:
            raise DomainError(f"{spec.path} has {seq.N} rows, N_grid needs {n_max}")
        seq = seq.head(n_max)
    if d is not None and seq.d != d:
        raise DomainError(f"sequence has dimension {seq.d}, config says d = {d}")
    return seq


def draw_alphas(alpha, d):
    if alpha.measure == "fixed":
        vals = np.asarray(alpha.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[1] != d:
            raise DomainError(f"alpha.values must be a list of {d}-vectors")
        return vals
    return mu_sample(MeasureSpec.uniform(d, alpha.gamma), alpha.samples, alpha.seed)


def _f(v):
    return repr(float(v))


# -- paircorr table -------------------------------------------------------------

def write_paircorr_table(path, rows, n_alpha):
    """``rows`` are (N, s, reference, [r2 per alpha]); the mean column is computed here."""
    cols = ["N", "s", "reference", "mean"] + [f"alpha_{i:03d}" for i in range(n_alpha)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for N, s, ref, vals in rows:
            mean = float(np.mean(vals))
            fh.write(",".join([str(int(N)), _f(s), _f(ref), _f(mean)] + [_f(v) for v in vals]) + "\n")


def read_paircorr_table(path, d, norm="sup"):
    """Parse a paircorr table back into ``{N: (mean curve, [per-alpha curves])}``."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().split("\n") if ln]
    head = lines[0].split(",")
    if head[:4] != ["N", "s", "reference", "mean"]:
        raise ValueError(f"{path}: unexpected header")
    n_alpha = len(head) - 4
    by_n = {}
    for ln in lines[1:]:
        parts = ln.split(",")
        by_n.setdefault(int(parts[0]), []).append([float(p) for p in parts[1:]])
    out = {}
    for N, rows in by_n.items():
        arr = np.array(rows)
        s, ref, mean = arr[:, 0], arr[:, 1], arr[:, 2]
        per = [PairCorrCurve(s, arr[:, 3 + i], ref, N, d, norm) for i in range(n_alpha)]
        out[N] = (PairCorrCurve(s, mean, ref, N, d, norm), per)
    return out


# -- tasks ------------------------------------------------------------------------

def _task_paircorr(cfg, seq, out, fmt):
    alphas = draw_alphas(cfg.alpha, seq.d)
    rows, files, means = [], [], {}
    for N in cfg.N_grid:
        head = seq.head(N)
        curves = [r2_curve(dilate_frac(head, a), cfg.s_grid, cfg.norm, cfg.method) for a in alphas]
        r2 = np.array([c.r2 for c in curves])
        ref = curves[0].reference
        for i, s in enumerate(cfg.s_grid):
            rows.append((N, s, ref[i], r2[:, i]))
        means[N] = PairCorrCurve(np.asarray(cfg.s_grid, float), r2.mean(axis=0), ref, N, seq.d,
                                 cfg.norm)
    if "csv" in fmt:
        write_paircorr_table(os.path.join(out, "paircorr.csv"), rows, len(alphas))
        with open(os.path.join(out, "alphas.csv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(["index"] + [f"alpha{k + 1}" for k in range(seq.d)]) + "\n")
            for i, a in enumerate(alphas):
                fh.write(",".join([str(i)] + [_f(v) for v in a]) + "\n")
        files += ["paircorr.csv", "alphas.csv"]
    if "json" in fmt:
        summary = {"d": seq.d, "norm": cfg.norm, "method": cfg.method, "samples": len(alphas),
                   "curves": {str(N): {"s": [float(v) for v in c.s_grid],
                                       "mean": [float(v) for v in c.r2],
                                       "reference": [float(v) for v in c.reference]}
                              for N, c in means.items()}}
        _dump_json(os.path.join(out, "paircorr.json"), summary)
        files.append("paircorr.json")
    if "svg" in fmt:
        for N, c in means.items():
            name = f"paircorr_N{N}.svg"
            emit_plot(c, os.path.join(out, name))
            files.append(name)
    return files


def _task_energy(cfg, seq, out, fmt):
    gamma = cfg.gamma if cfg.gamma is not None else [1.0] * seq.d
    if len(gamma) == 1 and seq.d > 1:
        gamma = gamma * seq.d
    rep = energy_report(seq.values, gamma, cfg.N_grid, cfg.subset)
    files = []
    if "csv" in fmt:
        rep.to_csv(os.path.join(out, "energy.csv"))
        files.append("energy.csv")
    if "json" in fmt:
        rep.to_json(os.path.join(out, "energy.json"))
        files.append("energy.json")
    if "svg" in fmt:
        emit_plot(rep, os.path.join(out, "energy.svg"))
        files.append("energy.svg")
    return files


def _task_variance(cfg, seq, out, fmt):
    ests = [variance_estimate(seq.head(N), cfg.variance.s, cfg.r, cfg.alpha.samples, cfg.alpha.seed)
            for N in cfg.N_grid]
    files = []
    if "csv" in fmt:
        with open(os.path.join(out, "variance.csv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("N,var_stat,stderr\n")
            for e in ests:
                fh.write(e.csv_row() + "\n")
        files.append("variance.csv")
    if "json" in fmt:
        _dump_json(os.path.join(out, "variance.json"), [e.to_dict() for e in ests])
        files.append("variance.json")
    return files


def _task_selberg(cfg, seq, out, fmt):
    sc = cfg.selberg
    res = sandwich_check(sc.k, sc.s, sc.scale, sc.grid)
    _dump_json(os.path.join(out, "selberg.json"), res.to_dict())
    if not res.ok:
        raise PPCError(f"sandwich check failed: {res.to_dict()}")
    return ["selberg.json"]


def _task_watt(cfg, seq, out, fmt):
    wc = cfg.watt
    rows = []
    for M in wc.M:
        for delta in wc.delta:
            r = watt_ratio(wc.A, lambda a: float(a) ** wc.exponent, delta, M)
            rows.append({"M": M, "delta": delta, "V": r.V, "scaled_W": r.scaled_W,
                         "ratio": r.ratio, "resolution": r.resolution})
    files = ["watt.json"]
    _dump_json(os.path.join(out, "watt.json"), {"A": wc.A, "exponent": wc.exponent, "rows": rows})
    if "csv" in fmt:
        with open(os.path.join(out, "watt.csv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("M,delta,V,scaled_W,ratio,resolution\n")
            for r in rows:
                fh.write(f"{r['M']},{_f(r['delta'])},{r['V']},{_f(r['scaled_W'])},"
                         f"{_f(r['ratio'])},{r['resolution']}\n")
        files.append("watt.csv")
    return files


_TASKS = {"paircorr": _task_paircorr, "energy": _task_energy, "variance": _task_variance,
          "selberg-check": _task_selberg, "watt-check": _task_watt}
_NEEDS_SEQUENCE = {"paircorr", "energy", "variance"}


def _dump_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_experiment(config, out_dir=None):
    """Execute every task in order; a failing task is recorded and the rest still run.

    Problems with the sequence itself (unreadable file, too few rows, wrong d)
    are raised before any task starts, as is an unwritable output directory.
    """
    seq = None
    if _NEEDS_SEQUENCE & set(config.tasks):
        seq = build_sequence(config.sequence, max(config.N_grid), config.d)
    out = out_dir or config.output.dir
    os.makedirs(out, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")
    fmt = set(config.output.formats)
    manifest = RunManifest(config_hash=config_hash(config), tool_version=ppclab.__version__,
                           started=_now(), finished="", out_dir=os.path.abspath(out))
    for name in config.tasks:
        stage = tempfile.mkdtemp(prefix=".stage-", dir=out)
        try:
            files = _TASKS[name](config, seq, stage, fmt)
            for f in files:
                os.replace(os.path.join(stage, f), os.path.join(out, f))
            manifest.tasks[name] = TaskRecord("ok", files)
        except Exception as err:  # recorded, run continues
            tb = traceback.format_exception_only(type(err), err)[-1].strip()
            manifest.tasks[name] = TaskRecord("failed", [], tb)
        finally:
            shutil.rmtree(stage, ignore_errors=True)
    manifest.finished = _now()
    manifest.to_json(os.path.join(out, "manifest.json"))
    return manifest

