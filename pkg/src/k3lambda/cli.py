"""k3lambda command line: batch verification runs with JSON reports.

Exit status is 0 if every check passes, 1 if any identity fails and 2 on
configuration errors.  Reports are deterministic: keys are sorted and
wall-clock timings are only included with --timings.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

SCHEMA_VERSION = 1
SIDES = ("o1", "o1plus")
COMMANDS = ("elliptic", "frobenius", "indicial", "theta", "s6", "mirror", "master", "lambda-identities")

# default cutoffs: q-weight for the q-series commands, z-degree for frobenius
DEFAULT_N = {"elliptic": 20, "frobenius": 6, "indicial": 3, "theta": 3, "s6": 3,
             "mirror": 3, "master": 3, "lambda-identities": 3}
DUMP_NAMES = tuple(f"T{i}" for i in range(1, 11)) + ("Ttilde", "lambda", "omega0", "z1", "z2", "z3", "z4", "omega0_q2")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    n: Optional[int] = None
    w: int = 3
    sides: Tuple[str, ...] = SIDES
    seed: int = 0
    out: Optional[str] = None
    dump: Optional[str] = None
    search: bool = False
    timings: bool = False

    def validate(self):
        if self.n is not None and self.n < 1:
            raise ConfigError("--n must be at least 1")
        if self.w < 0:
            raise ConfigError("--w must be nonnegative")
        for s in self.sides:
            if s not in SIDES:
                raise ConfigError(f"unknown side {s!r}")
        if self.dump is not None and self.dump not in DUMP_NAMES:
            raise ConfigError(f"unknown series {self.dump!r}")

    def cutoff(self, command: str) -> int:
        return self.n if self.n is not None else DEFAULT_N[command]


# --------------------------------------------------------------------------
# series dumps


def _sorted_terms(series):
    def key(item):
        v = [Fraction(x) for x in item["exp"]]
        w = v[0] + v[1] if len(v) == 4 else v[0]
        return (w, [-x for x in v])
    return sorted(series.to_json(), key=key)


def dump_series(name: str, cfg: RunConfig) -> dict:
    from . import elliptic, lambda_, theta
    N = cfg.cutoff("theta")
    qvars = ["q1", "q2", "q3", "q4"]
    if name in theta.BY_NAME:
        s, names = theta.genus2_theta(name, theta.theta_policy(N, N)), qvars
    elif name == "Ttilde":
        s, names = theta.theta_tilde(theta.theta_policy(max(N, 2), max(N, 2))), qvars
    elif name == "lambda":
        s, names = elliptic.mirror_map(cfg.cutoff("elliptic")), ["q"]
    elif name == "omega0":
        s, names = elliptic.ell_solutions(cfg.cutoff("elliptic")).omega0, ["z"]
    elif name in ("z1", "z2", "z3", "z4", "omega0_q2"):
        side = cfg.sides[0]
        m = lambda_.build_mirror_map(side, N, cfg.w)
        s = lambda_.omega0_of_q(m) if name == "omega0_q2" else m.z_q()[int(name[1]) - 1]
        names = qvars
    else:
        raise ConfigError(f"unknown series {name!r}")
    return {"name": name, "variables": names, "terms": _sorted_terms(s)}


# --------------------------------------------------------------------------
# commands


def run_elliptic(cfg: RunConfig) -> dict:
    from .elliptic import elliptic_report
    return elliptic_report(cfg.cutoff("elliptic"), cfg.seed)


def run_frobenius(cfg: RunConfig) -> dict:
    from . import gkz
    N = cfg.cutoff("frobenius")
    ann = {tag: gkz.verify_annihilation(tag, N=N) for tag in ("o1", "o2", "o1plus", "o2plus", "o3plus")}
    quad = {tag: gkz.verify_quadratic_relation(tag, 2, min(N, 4)) for tag in SIDES}
    wit = gkz.yoshida_laurent_witness(3)
    ok = all(r["pass"] for r in ann.values()) and all(r["pass"] for r in quad.values()) and wit["pass"]
    return {"annihilation": ann, "quadratic_relation": quad, "yoshida_witness": wit, "pass": ok}


def run_indicial(cfg: RunConfig) -> dict:
    from .indicial import indicial_report
    rep = {tag: indicial_report(tag) for tag in SIDES}
    return {"systems": rep, "pass": all(r["pass"] for r in rep.values())}


def run_theta(cfg: RunConfig) -> dict:
    from .theta import theta_report
    N = cfg.cutoff("theta")
    return theta_report(max(N, 2), max(cfg.w, 2))


def run_s6(cfg: RunConfig) -> dict:
    from . import moduli
    sig = list(moduli.CLOSED_FORMS)
    pairs = [(a, b) for a in sig for b in sig]
    res = {
        "closed_forms": moduli.closed_form_check(20, cfg.seed),
        "minor_oracle": moduli.minor_oracle_check(seed=cfg.seed + 1),
        "q_oracle": moduli.q_oracle_check(seed=cfg.seed + 2),
        "torus_invariance": moduli.torus_invariance_check(seed=cfg.seed + 3),
        "antihomomorphism": moduli.antihomomorphism_check(pairs, seed=cfg.seed + 4),
        "cocycle": moduli.cocycle_check(pairs, seed=cfg.seed + 5),
        "o2_alpha": moduli.o2_alpha_check(),
    }
    ok = res["closed_forms"]["pass"] and res["o2_alpha"]["pass"] and all(
        res[k] for k in ("minor_oracle", "q_oracle", "torus_invariance", "antihomomorphism", "cocycle"))
    res["pass"] = ok
    return res


def run_mirror(cfg: RunConfig) -> dict:
    from . import lambda_
    N = cfg.cutoff("mirror")
    rep = {side: lambda_.mirror_report(side, N, cfg.w) for side in cfg.sides}
    tq = lambda_.t_quadratic_check(min(N + 1, 4))
    return {"sides": rep, "t_quadratic": tq, "pass": tq["pass"] and all(r["pass"] for r in rep.values())}


def run_master(cfg: RunConfig) -> dict:
    from . import lambda_
    N = cfg.cutoff("master")
    out, ok = {}, True
    for side in cfg.sides:
        sigma = lambda_.TAU if side == "o1" else lambda_.RHO
        r = lambda_.verify_master_equation(side, sigma, N, cfg.w).to_json()
        entry = {"verify": r}
        ok &= r["pass"]
        if cfg.search:
            n2 = min(N, 2)
            srch = lambda_.permutation_search(side, n2, min(cfg.w, n2) if cfg.w else n2)
            entry["search"] = srch
            ok &= srch["found"] == [list(sigma)]
        out[side] = entry
    return {"sides": out, "pass": ok}


def run_lambda(cfg: RunConfig) -> dict:
    from . import lambda_
    N = cfg.cutoff("lambda-identities")
    rep = {side: lambda_.lambda_theta_identities(side, N, cfg.w) for side in cfg.sides}
    return {"sides": rep, "pass": all(r["pass"] for r in rep.values())}


RUNNERS: Dict[str, Callable[[RunConfig], dict]] = {
    "elliptic": run_elliptic,
    "frobenius": run_frobenius,
    "indicial": run_indicial,
    "theta": run_theta,
    "s6": run_s6,
    "mirror": run_mirror,
    "master": run_master,
    "lambda-identities": run_lambda,
}


def _strip_timings(obj, path="", acc=None):
    """Remove 'seconds' fields (wall-clock) so reports are reproducible."""
    acc = {} if acc is None else acc
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            if k == "seconds":
                acc[path or "."] = v
                continue
            out[k] = _strip_timings(v, f"{path}/{k}", acc)[0]
        return out, acc
    if isinstance(obj, list):
        return [_strip_timings(v, path, acc)[0] for v in obj], acc
    return obj, acc


def _run_one(args) -> Tuple[str, dict, float]:
    name, cfg = args
    t0 = time.perf_counter()
    res = RUNNERS[name](cfg)
    return name, res, time.perf_counter() - t0


def threads() -> int:
    raw = os.environ.get("K3LAMBDA_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"K3LAMBDA_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ConfigError("K3LAMBDA_THREADS must be at least 1")
    return n


def run(command: str, cfg: RunConfig) -> Tuple[int, dict]:
    """Execute one command (or 'all'); return (exit status, report)."""
    cfg.validate()
    names = list(COMMANDS) if command == "all" else [command]
    if command != "all" and command not in RUNNERS:
        raise ConfigError(f"unknown command {command!r}")
    if command == "all" and not cfg.search:
        cfg = RunConfig(**{**asdict(cfg), "search": True})
    jobs = [(n, cfg) for n in names]
    nt = min(threads(), len(jobs))
    if nt > 1:
        with ProcessPoolExecutor(max_workers=nt) as ex:
            done = list(ex.map(_run_one, jobs))
    else:
        done = [_run_one(j) for j in jobs]
    results, timings = {}, {}
    for name, res, secs in sorted(done, key=lambda t: t[0]):
        clean, inner = _strip_timings(res)
        results[name] = clean
        timings[name] = {"total": round(secs, 3), **inner}
    report = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "config": {"n": cfg.n, "w": cfg.w, "sides": list(cfg.sides), "seed": cfg.seed, "search": cfg.search},
        "results": results,
        "pass": all(r.get("pass", False) for r in results.values()),
    }
    if cfg.dump:
        report["dump"] = dump_series(cfg.dump, cfg)
    if cfg.timings:
        report["timings"] = timings
    return (0 if report["pass"] else 1), report


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="k3lambda", description="Exact q-series verification of the K3 lambda functions.")
    p.add_argument("command", choices=COMMANDS + ("all",))
    p.add_argument("--n", type=int, default=None, help="cutoff (q-weight, or z-degree for frobenius)")
    p.add_argument("--w", type=int, default=3, help="Laurent window for q3, q4")
    p.add_argument("--side", choices=SIDES + ("both",), default="both")
    p.add_argument("--seed", type=int, default=0, help="seed for random sample points")
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    p.add_argument("--dump", default=None, metavar="SERIES",
                   help="include a series: T1..T10, Ttilde, lambda, omega0, z1..z4, omega0_q2")
    p.add_argument("--search", action="store_true", help="master: run the search over S6")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings (not reproducible)")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    sides = SIDES if args.side == "both" else (args.side,)
    cfg = RunConfig(args.n, args.w, sides, args.seed, args.out, args.dump, args.search, args.timings)
    try:
        status, report = run(args.command, cfg)
    except ConfigError as e:
        print(f"k3lambda: error: {e}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
