"""Command line: ``toda-whittaker eval`` and ``toda-whittaker verify``.

Records go to stdout as JSON lines (or CSV with ``--csv``); a one-line
summary goes to stderr.  Exit status is 0 when every check passes, 1 when
a check fails and 2 for usage or domain errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import re
import sys
import time
from dataclasses import dataclass, field

from .connection import whittaker_eval
from .cs_confluence import CouplingTriple, coupling_schedule, cs_phi_eval, cs_whittaker_eval
from .errors import TodaWhittakerError
from .hc_series import TruncationPlan, phi_eval
from .univariate import bessel_K_quad, whittaker_M_phi, whittaker_W_Phi
from .verification import SUITES, CheckRecord, run_suite, summarize

log = logging.getLogger("toda_whittaker")

PRECISION_ENV = "TODA_WHITTAKER_PRECISION"
TARGETS = ("phi", "Phi", "cs-phi", "cs-Phi", "M", "W", "K")
FIELDS = ("suite", "check", "anchor", "value_re", "value_im", "bound", "threshold", "pass", "millis")

_COMPLEX = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?([+-](\d+\.?\d*|\.\d+)([eE][+-]?\d+)?i)?$|^[+-]?(\d+\.?\d*|\.\d+)?([eE][+-]?\d+)?i$")


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """'a', 'a+bi', 'a-bi' or 'bi' (no spaces)."""
    s = str(text).strip()
    if not _COMPLEX.match(s):
        raise UsageError(f"cannot read {text!r} as a complex number (use a+bi)")
    if s.endswith("i"):
        body = s[:-1]
        if body in ("", "+", "-"):
            body += "1"
        s = body + "j"
    return complex(s)


def parse_vector(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(parse_complex(v) for v in text)
    return tuple(parse_complex(v) for v in str(text).split(","))


def parse_range(text) -> tuple:
    """'1..3' or '1,2,3'."""
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    s = str(text)
    if ".." in s:
        lo, hi = s.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(v) for v in s.split(","))


@dataclass
class RunConfig:
    n: int | None = None
    g: complex = 0.0
    precision: int = 53
    M: int | None = None
    tol: float | None = None
    eta: float = 1e-9
    seed: int | None = None
    csv: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.precision < 53:
            raise UsageError(f"precision must be at least 53 bits, got {self.precision}")
        if self.tol is not None and not self.tol > 0:
            raise UsageError("tol must be positive")
        if not self.eta > 0:
            raise UsageError("eta must be positive")
        if self.tol is not None and not self.eta < self.tol:
            raise UsageError(f"eta ({self.eta:g}) must be smaller than tol ({self.tol:g})")
        if self.n is not None and self.n < 1:
            raise UsageError("n must be positive")
        if self.M is not None and self.M < 0:
            raise UsageError("M must be nonnegative")

    def plan(self, default_M: int = 30) -> TruncationPlan:
        return TruncationPlan(M=self.M if self.M is not None else default_M, tol=self.tol, eta=self.eta, prec=self.precision)


GLOBAL_KEYS = ("n", "g", "precision", "M", "tol", "eta", "seed", "csv")


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS, allow_abbrev=False)
    p.add_argument("--n", type=int, help="rank (number of particles)")
    p.add_argument("--g", help="boundary coupling, complex a+bi")
    p.add_argument("--precision", type=int, help="working precision in bits (53 = double)")
    p.add_argument("--M", type=int, help="truncation level")
    p.add_argument("--tol", type=float, help="tolerance")
    p.add_argument("--eta", type=float, help="distance below which a denominator counts as zero")
    p.add_argument("--seed", type=int, help="seed for random parameter draws")
    p.add_argument("--config", help="JSON file with default values for any flag")
    p.add_argument("--csv", action="store_true", help="tabular output")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="toda-whittaker", description=__doc__.splitlines()[0], parents=[common], allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", parents=[common], allow_abbrev=False, help="evaluate one function")
    ev.add_argument("target", choices=TARGETS)
    ev.add_argument("--xi", help="spectral point, comma-separated complex entries")
    ev.add_argument("--x", help="position, comma-separated")
    ev.add_argument("--k", help="couplings k0,k1,k2 for cs targets")
    ev.add_argument("--c", type=float, help="confluence shift; couplings follow the schedule unless --k is given")
    ev.add_argument("--gamma", action="store_true", default=None, help="multiply cs-Phi by the gamma factor")
    ev.add_argument("--nu", help="order for K (defaults to the first xi entry)")
    ev.add_argument("--z", help="argument for K (defaults to the first x entry)")

    vf = sub.add_parser("verify", parents=[common], allow_abbrev=False, help="run a verification suite")
    vf.add_argument("suite", choices=SUITES)
    vf.add_argument("--m", help="hyperplane indices for residues, e.g. 1..3")
    return parser


def resolve(args: argparse.Namespace) -> tuple[RunConfig, dict]:
    """Merge defaults < config file < environment (precision) < flags."""
    values = {}
    config = getattr(args, "config", None)
    if config:
        try:
            with open(config) as fh:
                values.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as err:
            raise UsageError(f"cannot read config {config}: {err}") from err
    env = os.environ.get(PRECISION_ENV)
    if env:
        try:
            values["precision"] = int(env)
        except ValueError as err:
            raise UsageError(f"{PRECISION_ENV}={env!r} is not an integer") from err
    for key, val in vars(args).items():
        if val is not None and key not in ("config", "command", "verbose"):
            values[key] = val
    cfg = {k: values.pop(k) for k in GLOBAL_KEYS if k in values}
    if "g" in cfg:
        cfg["g"] = parse_complex(cfg["g"])
    return RunConfig(**cfg, extra=values), values


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def _need(extra, key):
    if extra.get(key) is None:
        raise UsageError(f"--{key} is required for this target")
    return parse_vector(extra[key])


def _couplings(cfg: RunConfig, extra) -> tuple[CouplingTriple, float]:
    shift = float(extra.get("c") or 0.0)
    if extra.get("k") is not None:
        k = parse_vector(extra["k"])
        if len(k) != 3:
            raise UsageError("--k needs three entries k0,k1,k2")
        return CouplingTriple(*k), shift
    if extra.get("c") is None:
        raise UsageError("cs targets need --k or --c")
    return coupling_schedule(shift, cfg.g), shift


def cmd_eval(cfg: RunConfig, extra: dict) -> CheckRecord:
    target = extra["target"]
    plan = cfg.plan()
    t0 = time.perf_counter()
    bound, condition = None, None
    if target == "K":
        nu = parse_complex(extra["nu"]) if extra.get("nu") is not None else _need(extra, "xi")[0]
        z = parse_complex(extra["z"]) if extra.get("z") is not None else _need(extra, "x")[0]
        value, anchor = bessel_K_quad(nu, z), "K_nu(z) = int_0^inf e^{-z cosh t} cosh(nu t) dt"
    else:
        xi, x = _need(extra, "xi"), _need(extra, "x")
        if len(xi) != len(x):
            raise UsageError(f"xi has {len(xi)} entries but x has {len(x)}")
        if cfg.n is not None and cfg.n != len(xi):
            raise UsageError(f"--n {cfg.n} does not match {len(xi)} xi entries")
        if target in ("M", "W"):
            if len(xi) != 1:
                raise UsageError(f"target {target} is rank one")
            fn = whittaker_M_phi if target == "M" else whittaker_W_Phi
            value, anchor = fn(xi[0], x[0], cfg.g), f"rank-one {target} reference"
        elif target in ("phi", "Phi"):
            x = tuple(v.real if v.imag == 0 else v for v in x)
            ev = (phi_eval if target == "phi" else whittaker_eval)(xi, x, cfg.g, plan)
            value, bound, condition = ev.value, ev.tail_bound, ev.condition
            anchor = "Harish-Chandra series" if target == "phi" else "signed-permutation connection sum"
        else:
            k, shift = _couplings(cfg, extra)
            if target == "cs-phi":
                ev = cs_phi_eval(xi, x, k, plan, shift=shift)
            else:
                ev = cs_whittaker_eval(xi, x, k, plan, shift=shift, gamma_normalized=bool(extra.get("gamma")))
            value, bound, condition = ev.value, ev.tail_bound, ev.condition
            anchor = "Calogero-Sutherland " + ("series" if target == "cs-phi" else "connection sum")
    ms = 1e3 * (time.perf_counter() - t0)
    value = complex(value)
    ok = math.isfinite(value.real) and math.isfinite(value.imag)
    rec = CheckRecord("eval", target, anchor, value, None, ok, bound, ms)
    rec.params["condition"] = condition
    return rec


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def suite_overrides(suite: str, cfg: RunConfig, extra: dict) -> dict:
    kw = {}
    if suite == "counts":
        if cfg.n is not None:
            kw["ns"] = (cfg.n,)
        if cfg.M is not None:
            kw["M"] = cfg.M
    elif suite == "pde":
        if cfg.n is not None:
            kw["ns"] = (cfg.n,)
        for key in ("M", "tol", "seed"):
            if getattr(cfg, key) is not None:
                kw[key] = getattr(cfg, key)
    elif suite == "dde":
        if cfg.n is not None:
            kw["cases"] = ((cfg.n, tuple(range(1, cfg.n + 1))),)
        for key in ("M", "tol", "seed"):
            if getattr(cfg, key) is not None:
                kw[key] = getattr(cfg, key)
    elif suite == "univariate":
        if cfg.M is not None:
            kw["M"] = cfg.M
    elif suite == "residues":
        if cfg.n not in (None, 2):
            raise UsageError("the residue suite is defined for n = 2")
        if extra.get("m") is not None:
            kw["ms"] = parse_range(extra["m"])
        kw["prec"] = max(cfg.precision, 128) if cfg.precision == 53 else cfg.precision
        for key in ("M", "tol"):
            if getattr(cfg, key) is not None:
                kw[key] = getattr(cfg, key)
    elif suite == "confluence":
        if cfg.n is not None:
            if cfg.n not in (1, 2):
                raise UsageError("the confluence suite is defined for n = 1 and n = 2")
            kw["ns"] = (cfg.n,)
        if cfg.M is not None:
            kw["M"] = cfg.M
        if cfg.seed is not None:
            kw["seed"] = cfg.seed
    return kw


def emit(records, as_csv: bool, stream=None):
    stream = stream or sys.stdout
    rows = []
    for r in records:
        row = r.to_json()
        if "condition" in r.params:
            row["condition"] = r.params["condition"]
        rows.append(row)
    if as_csv:
        keys = list(FIELDS) + (["condition"] if any("condition" in row for row in rows) else [])
        w = csv.DictWriter(stream, fieldnames=keys, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    else:
        for row in rows:
            stream.write(json.dumps(row, default=str) + "\n")
    stream.flush()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg, extra = resolve(args)
        if args.command == "eval":
            records = [cmd_eval(cfg, extra)]
        else:
            kw = suite_overrides(args.suite, cfg, extra)
            log.info("running suite %s with %s", args.suite, kw)
            records = run_suite(args.suite, **kw)
    except UsageError as err:
        print(f"toda-whittaker: usage error: {err}", file=sys.stderr)
        return 2
    except (TodaWhittakerError, ValueError) as err:
        print(f"toda-whittaker: {type(err).__name__}: {err}", file=sys.stderr)
        return 2
    emit(records, bool(cfg.csv))
    passed, total = summarize(records)
    label = args.target if args.command == "eval" else args.suite
    print(f"{args.command} {label}: {passed}/{total} passed", file=sys.stderr)
    return 0 if passed == total else 1


if __name__ == "__main__":
    sys.exit(main())
