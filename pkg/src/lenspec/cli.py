"""Command-line entry point: `lenspec <subcommand> [options]`."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import coefficients, finite_sl2, spectra, verification
from .arith import DomainError, ResourceGuard, factorize
from .finite_sl2 import GroupSpec, NoClosedForm
from .quad_forms import BoundExceeded, class_number, fundamental_unit, l_value

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_GUARD, EXIT_MISMATCH = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    group: str = "full"
    xmax: int | None = None
    k: int = 2
    shifts: tuple = ()
    modulus: int | None = None
    method: str = "both"
    P: int = 100
    L: int = 6
    M: int = 6
    D: tuple = ()
    suite: str = "all"
    fmt: str | None = None
    output: str | None = None
    threads: int | None = None
    seed: int = verification.DEFAULT_SEED
    brute_cap: int | None = None
    max_cosets: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def spec(self) -> GroupSpec:
        try:
            return GroupSpec.parse(self.group)
        except DomainError as e:
            raise UsageError(str(e)) from None

    def resolved_shifts(self) -> tuple:
        s = self.shifts or (0,) * self.k
        if len(s) != self.k:
            raise UsageError(f"--shifts needs {self.k} entries, got {len(s)}")
        return tuple(s)


def _shifts(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad shift list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=["csv", "json"], default=None)
    common.add_argument("--threads", type=int, default=None, help="worker count (default: all cores)")
    common.add_argument("--seed", type=int, default=verification.DEFAULT_SEED)
    common.add_argument("-o", "--output", default=None, help="output path (default: stdout)")
    common.add_argument("--brute-cap", type=int, default=None, help="largest p^l for brute-force local factors")
    common.add_argument("--max-cosets", type=int, default=None, help="coset enumeration guard")

    grp = argparse.ArgumentParser(add_help=False)
    grp.add_argument("--group", default="full", help="full, gamma0:N or hat:N")

    coef = argparse.ArgumentParser(add_help=False)
    coef.add_argument("-k", type=int, default=2)
    coef.add_argument("--shifts", type=_shifts, default=())
    coef.add_argument("--prime-cutoff", dest="P", type=int, default=100)
    coef.add_argument("--depth", dest="L", type=int, default=6)

    ap = argparse.ArgumentParser(prog="lenspec", description="Length spectra of congruence subgroups.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common, grp], help="m, m-hat and I for 3 <= t < xmax")
    p.add_argument("--xmax", type=int, required=True)

    p = sub.add_parser("trace-count", parents=[common, grp], help="trace distribution in SL2(Z/n)")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--method", choices=["brute", "closed", "both"], default="both")

    sub.add_parser("coefficient", parents=[common, grp, coef], help="Euler product for c^(k)(r)")

    p = sub.add_parser("correlate", parents=[common, grp, coef], help="empirical correlation sum vs prediction")
    p.add_argument("--xmax", type=int, required=True)

    p = sub.add_parser("class-number", parents=[common], help="narrow class numbers and units")
    p.add_argument("-D", dest="D", type=int, nargs="+", required=True)

    p = sub.add_parser("verify", parents=[common], help="run the self-check suites")
    p.add_argument("--suite", choices=["trace", "coeff", "spectra", "all"], default="all")
    return ap


def config_from_args(ns: argparse.Namespace) -> CliConfig:
    cfg = CliConfig(ns.command)
    for name in ("group", "xmax", "k", "shifts", "modulus", "method", "P", "L", "D", "suite",
                 "fmt", "output", "threads", "seed", "brute_cap", "max_cosets"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    if isinstance(cfg.D, list):
        cfg.D = tuple(cfg.D)
    return cfg


# --- rendering ------------------------------------------------------------------

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _frac_fields(x: Fraction | None) -> dict:
    return {} if x is None else {"num": x.numerator, "den": x.denominator}


# --- commands ---------------------------------------------------------------------

def cmd_spectrum(cfg: CliConfig) -> tuple[int, str]:
    if cfg.xmax is None or cfg.xmax < 4:
        raise UsageError("--xmax must be at least 4")
    tab = spectra.spectrum_table(cfg.spec, cfg.xmax, cfg.threads)
    if (cfg.fmt or "csv") == "csv":
        return EXIT_OK, tab.to_csv()
    return EXIT_OK, _json({"spec": str(cfg.spec), "xmax": cfg.xmax, "rows": tab.to_records()})


def _prime_power(n: int) -> tuple[int, int] | None:
    f = factorize(n)
    if len(f) != 1:
        return None
    (p, r), = f.items()
    return p, r


def cmd_trace_count(cfg: CliConfig) -> tuple[int, str]:
    n = cfg.modulus
    if n is None or n < 2:
        raise UsageError("--modulus must be at least 2")
    spec = cfg.spec
    if spec.level > 1 and n % spec.level:
        raise UsageError("modulus must be a multiple of the level")
    want_brute = cfg.method in ("brute", "both")
    want_closed = cfg.method in ("closed", "both")
    pr = _prime_power(n)
    if want_closed and pr is None:
        raise UsageError("closed forms need a prime-power modulus; use --method brute")
    hist = finite_sl2.trace_histogram(spec, n) if want_brute else None
    order = finite_sl2.image_order(spec, n)
    rows = []
    mismatch = False
    for m in range(n):
        b = hist[m] if want_brute else None
        c = finite_sl2.trace_count_closed(spec, pr[0], pr[1], m) if want_closed else None
        d = (c - b) if (b is not None and c is not None) else None
        mismatch |= bool(d)
        rows.append({"m": m, "brute": b, "closed": c, "diff": d})
    code = EXIT_MISMATCH if mismatch else EXIT_OK
    if (cfg.fmt or "csv") == "csv":
        blank = lambda v: "" if v is None else v
        return code, _csv(["m", "brute", "closed", "diff"],
                          [[r["m"], blank(r["brute"]), blank(r["closed"]), blank(r["diff"])] for r in rows])
    return code, _json({"spec": str(spec), "modulus": n, "method": cfg.method, "group_order": order,
                        "rows": rows, "all_equal": not mismatch if cfg.method == "both" else None})


def cmd_coefficient(cfg: CliConfig) -> tuple[int, str]:
    shifts = cfg.resolved_shifts()
    if cfg.k < 1:
        raise UsageError("-k must be positive")
    if cfg.P < 3:
        raise UsageError("--prime-cutoff must be at least 3")
    ep = coefficients.euler_product(cfg.spec, cfg.k, shifts, cfg.P, cfg.L, threads=cfg.threads or 1)
    label = "numeric" if any(shifts) or ep.exact is None else "closed"
    factors = [f.as_dict() for f in ep.factors]
    if cfg.fmt == "csv":
        rows = [[f["p"], f.get("value_num", ""), f.get("value_den", ""), f.get("value_float", ""),
                 f["method"], "" if f["depth"] is None else f["depth"]] for f in factors]
        return EXIT_OK, _csv(["p", "value_num", "value_den", "value_float", "method", "depth"], rows)
    out = {
        "spec": str(cfg.spec), "k": cfg.k, "shifts": list(shifts), "prime_cutoff": cfg.P, "depth": cfg.L,
        "label": label, "c_predicted": ep.value,
        "c_exact": _frac_fields(ep.exact) or None,
        "tail_factor": ep.tail_factor, "c_predicted_tail_bound": ep.tail_bound, "tail_constant": ep.C,
        "local_factors": factors,
    }
    return EXIT_OK, _json(out)


def cmd_correlate(cfg: CliConfig) -> tuple[int, str]:
    shifts = cfg.resolved_shifts()
    if cfg.xmax is None or cfg.xmax < 10:
        raise UsageError("--xmax must be at least 10")
    rep = coefficients.compare_empirical(cfg.spec, cfg.k, shifts, cfg.xmax, cfg.P, cfg.L,
                                         threads=cfg.threads or 1)
    d = rep.as_dict()
    if cfg.fmt == "csv":
        keys = [k for k in d if k != "local_factors"]
        vals = [";".join(map(str, d[k])) if isinstance(d[k], list) else d[k] for k in keys]
        return EXIT_OK, _csv(keys, [vals])
    return EXIT_OK, _json(d)


def cmd_class_number(cfg: CliConfig) -> tuple[int, str]:
    rows = []
    for D in cfg.D:
        try:
            h = class_number(D)
            eps = fundamental_unit(D)
        except DomainError as e:
            raise UsageError(f"D = {D}: {e}") from None
        rows.append({"D": D, "h": h, "eps_t": eps.t, "eps_u": eps.u, "L1": l_value(D)})
    if cfg.fmt == "json":
        return EXIT_OK, _json({"rows": rows})
    return EXIT_OK, _csv(["D", "h", "eps_t", "eps_u", "L1"],
                         [[r["D"], r["h"], r["eps_t"], r["eps_u"], repr(r["L1"])] for r in rows])


def cmd_verify(cfg: CliConfig) -> tuple[int, str]:
    res = verification.run(cfg.suite, cfg.seed, cfg.threads)
    print(res.listing(), file=sys.stderr)
    return (EXIT_OK if res.passed else EXIT_VERIFY), _json(res.as_dict())


COMMANDS = {
    "spectrum": cmd_spectrum,
    "trace-count": cmd_trace_count,
    "coefficient": cmd_coefficient,
    "correlate": cmd_correlate,
    "class-number": cmd_class_number,
    "verify": cmd_verify,
}


def _apply_guards(cfg: CliConfig) -> None:
    if cfg.brute_cap is not None:
        coefficients.BRUTE_MODULUS_CAP = cfg.brute_cap
    if cfg.max_cosets is not None:
        finite_sl2.MAX_COSETS = cfg.max_cosets
    if cfg.threads is not None and cfg.threads < 1:
        raise UsageError("--threads must be positive")
    if cfg.threads is None:
        cfg.threads = os.cpu_count() or 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    cfg = config_from_args(ns)
    try:
        _apply_guards(cfg)
        code, text = COMMANDS[cfg.command](cfg)
    except (UsageError, DomainError, NoClosedForm) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceGuard, BoundExceeded) as e:
        print(f"resource guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
