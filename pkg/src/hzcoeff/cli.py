"""hz-coeff: compute, verify and cross-check Fourier coefficients of omega_m.

Exit codes: 0 success, 1 verification failure, 2 usage error or failed
numerical certification.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .coeffs import DEFAULT_ALPHA_CAP, DIVISOR_NORMS, CertificationError, omega_coefficient
from .divisibility import DEFAULT_DELTA_BOUND, NOT_FOUND, certificate, emit_table, table_row, divisibility_delta
from .quadfield import QuadRat, format_quadrat, is_fundamental_discriminant, parse_quadrat

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2
DEFAULT_PRECISION = 192
RELATION_TOL = 1e-12
COMMANDS = ("table", "coeff", "oracle-compare", "verify", "weilrep-check", "lift")

# the eight rows of the reference table for D = 5, k = 4, m = -1/5
REFERENCE_NUS = (
    "2",
    "2 - 2/5*sqrt(5)",
    "3",
    "3/2 - 3/10*sqrt(5)",
    "3 - 2/5*sqrt(5)",
    "5/2 - 1/10*sqrt(5)",
    "7/2 + 1/2*sqrt(5)",
    "5/2 + 1/2*sqrt(5)",
)
ORACLE_NUS = ("2", "1/2 + 1/2*sqrt(5)")
_VALUE_FLAGS = {"--m", "--nu", "--value", "--base-point"}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    D: int
    k: int
    m: Fraction
    base_point: tuple
    precision_bits: int
    alpha_cap: int
    oracle_radius: int
    oracle_grid: int
    format: str
    assume_trivial_cusp_space: bool
    delta_bound: int
    divisor_norm: str
    oracle_product: Optional[Fraction] = None

    def to_json(self) -> dict:
        d = asdict(self)
        d["m"] = str(self.m)
        d["base_point"] = [str(v) for v in self.base_point]
        d["oracle_product"] = None if self.oracle_product is None else str(self.oracle_product)
        return d


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _base_point(text: str) -> tuple:
    parts = text.strip("() ").split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("base point must be 'y1,y2'")
    return tuple(_fraction(p) for p in parts)


def _default_precision() -> int:
    env = os.environ.get("HZ_PRECISION_BITS")
    if env is None:
        return DEFAULT_PRECISION
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"HZ_PRECISION_BITS must be an integer, got {env!r}")


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn '--m -1/5' into '--m=-1/5' so argparse does not read the value as a flag."""
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--disc", type=int, default=5, help="fundamental discriminant D")
    common.add_argument("--weight", type=int, default=4, help="even weight k >= 4")
    common.add_argument("--m", type=_fraction, default=None, help="negative rational index, default -1/D")
    common.add_argument("--nu", action="append", default=[], help="'x + y*sqrt(D)' or dual coordinates 'u,v'")
    common.add_argument("--base-point", type=_base_point, default=(Fraction(2), Fraction(1)))
    common.add_argument("--precision-bits", type=int, default=None)
    common.add_argument("--alpha-cap", type=int, default=DEFAULT_ALPHA_CAP)
    common.add_argument("--oracle-radius", type=int, default=60)
    common.add_argument("--oracle-grid", type=int, default=64)
    common.add_argument("--oracle-product", type=_fraction, default=None,
                        help="rescale the base point so y1*y2 equals this (default 4|m|)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--assume-trivial-cusp-space", action="store_true")
    common.add_argument("--delta-bound", type=int, default=DEFAULT_DELTA_BOUND)
    common.add_argument("--divisor-norm", choices=DIVISOR_NORMS, default="printed")
    common.add_argument("--value", action="append", default=[], help="claimed coefficient, paired with --nu")
    common.add_argument("--input", default=None, help="JSON q-expansion for 'lift'")
    common.add_argument("--csv-out", default=None, help="oracle grid dump")

    p = argparse.ArgumentParser(prog="hz-coeff", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hz-coeff {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def parse(argv: Optional[Sequence[str]] = None):
    """Return (RunConfig, command, namespace); raises SystemExit(2) on bad input."""
    parser = build_parser()
    ns = parser.parse_args(_join_negative_values(sys.argv[1:] if argv is None else argv))
    try:
        cfg = _config(ns)
    except UsageError as e:
        parser.error(str(e))
    return cfg, ns.command, ns


def _config(ns) -> RunConfig:
    D, k = ns.disc, ns.weight
    if not is_fundamental_discriminant(D) or D <= 1:
        raise UsageError(f"D = {D} is not a positive fundamental discriminant")
    if k < 4 or k % 2:
        raise UsageError(f"k = {k} must be even and at least 4")
    m = ns.m if ns.m is not None else Fraction(-1, D)
    if m >= 0:
        raise UsageError("m must be negative")
    if D % m.denominator:
        raise UsageError(f"denominator of m = {m} must divide D = {D}")
    y1, y2 = ns.base_point
    if y1 <= 0 or y2 <= 0:
        raise UsageError("base point must have positive coordinates")
    prec = ns.precision_bits if ns.precision_bits is not None else _default_precision()
    if prec < 53:
        raise UsageError("precision must be at least 53 bits")
    if ns.oracle_product is not None and ns.oracle_product <= abs(m):
        raise UsageError("oracle product y1*y2 must exceed |m|")
    if ns.alpha_cap < 1 or ns.delta_bound < 1 or ns.oracle_radius < 2:
        raise UsageError("alpha cap and delta bound must be positive, oracle radius at least 2")
    if ns.oracle_grid < 2 or ns.oracle_grid & (ns.oracle_grid - 1):
        raise UsageError("oracle grid must be a power of 2")
    return RunConfig(D, k, m, (y1, y2), prec, ns.alpha_cap, ns.oracle_radius, ns.oracle_grid,
                     ns.format, ns.assume_trivial_cusp_space, ns.delta_bound, ns.divisor_norm,
                     ns.oracle_product)


def _nus(cfg: RunConfig, ns, default=()) -> list[QuadRat]:
    texts = ns.nu or list(default)
    out = []
    for t in texts:
        try:
            out.append(parse_quadrat(t, cfg.D))
        except ValueError as e:
            raise UsageError(str(e))
    return out


def _chamber(cfg: RunConfig):
    from .weyl import OnWallError, chamber_of

    try:
        return chamber_of(cfg.base_point, cfg.m, cfg.D)
    except OnWallError as e:
        raise UsageError(str(e))


def _emit(out, cfg: RunConfig, command: str, payload: dict, text: Optional[str] = None) -> None:
    header = {"command": command, "config": cfg.to_json()}
    if cfg.format == "json":
        out.write(json.dumps({**header, **payload}, indent=2, sort_keys=True) + "\n")
        return
    prefix = "# " if cfg.format == "csv" else ""
    out.write(f"{prefix}hz-coeff {command}\n")
    out.write(f"{prefix}config {json.dumps(header['config'], sort_keys=True)}\n")
    if text is None:
        text = "\n".join(f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(payload.items())) + "\n"
    out.write(text)


def _reference_defaults(cfg: RunConfig):
    if (cfg.D, cfg.k, cfg.m) == (5, 4, Fraction(-1, 5)):
        return REFERENCE_NUS
    return ()


def _coefficient(cfg: RunConfig, nu: QuadRat, chamber):
    return omega_coefficient(nu, cfg.m, cfg.k, chamber, cfg.precision_bits,
                             divisor_norm=cfg.divisor_norm, alpha_cap=cfg.alpha_cap)


def cmd_table(cfg, ns, out) -> int:
    nus = _nus(cfg, ns, _reference_defaults(cfg))
    if not nus:
        raise UsageError("no --nu given and no reference table for these parameters")
    chamber = _chamber(cfg)
    rows, results = [], []
    for nu in nus:
        res = _coefficient(cfg, nu, chamber)
        n = res.integer()
        if n is None:
            raise CertificationError(f"c_nu at {format_quadrat(nu)} not certified to an integer: {res.value_text()}")
        rows.append(table_row(nu, n, cfg.k))
        results.append(res.to_json())
    body = emit_table(rows, "csv" if cfg.format == "csv" else "text") if cfg.format != "json" else None
    _emit(out, cfg, "table", {"rows": rows, "results": results, "chamber": chamber.chamber_id()}, body)
    return EXIT_OK


def cmd_coeff(cfg, ns, out) -> int:
    nus = _nus(cfg, ns)
    if not nus:
        raise UsageError("coeff needs at least one --nu")
    chamber = _chamber(cfg)
    results = []
    for nu in nus:
        res = _coefficient(cfg, nu, chamber)
        d = res.to_json()
        n = res.integer()
        if n is not None and nu:
            d["certificate"] = certificate(nu, n, cfg.D, cfg.k).to_json()
        results.append(d)
    text = "".join(f"{r['nu']}\t{r['branch']}\t{r['value']}\n" for r in results)
    _emit(out, cfg, "coeff", {"results": results, "chamber": chamber.chamber_id()},
          text if cfg.format == "text" else None)
    return EXIT_OK


def cmd_oracle_compare(cfg, ns, out) -> int:
    import math

    from .oracle import TorusGrid, fourier_coefficient_numeric, sample_grid, write_csv

    nus = _nus(cfg, ns, ORACLE_NUS)
    chamber = _chamber(cfg)
    y1, y2 = (float(v) for v in cfg.base_point)
    target = float(cfg.oracle_product) if cfg.oracle_product else 4 * abs(float(cfg.m))
    s = math.sqrt(target / (y1 * y2))
    grid = TorusGrid((y1 * s, y2 * s), cfg.m, cfg.D, cfg.oracle_grid, cfg.oracle_radius)
    samples = sample_grid(grid, cfg.k)
    rows, numeric, ok = [], [], True
    for nu in nus:
        res = _coefficient(cfg, nu, chamber)
        num = fourier_coefficient_numeric(nu, cfg.m, cfg.k, grid, samples)
        numeric.append(num)
        closed = float(res.value)
        if res.exact:
            passed = round(num.real) == closed
            metric = abs(num.real - closed)
        else:
            metric = abs(num.real - closed) / abs(closed)
            passed = metric < 0.02
        ok &= passed
        rows.append({"nu": format_quadrat(nu), "branch": res.branch, "closed_form": res.value_text(),
                     "oracle_re": repr(num.value.real), "oracle_im": repr(num.value.imag),
                     "oracle_error_heuristic": repr(num.error), "discrepancy": repr(metric), "pass": passed})
    if ns.csv_out:
        write_csv(ns.csv_out, samples, numeric)
    payload = {"rows": rows, "grid": {"y": list(grid.y), "N": grid.N, "R": grid.R, "terms": samples.terms}}
    text = "".join(f"{r['nu']}\t{r['branch']}\tclosed={r['closed_form']}\toracle={float(r['oracle_re']):.6g}"
                   f"\t{'PASS' if r['pass'] else 'FAIL'}\n" for r in rows)
    _emit(out, cfg, "oracle-compare", payload, text if cfg.format == "text" else None)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_verify(cfg, ns, out) -> int:
    nus = _nus(cfg, ns, _reference_defaults(cfg))
    if not nus:
        raise UsageError("verify needs --nu")
    if ns.value and len(ns.value) != len(nus):
        raise UsageError("give one --value per --nu")
    values = []
    if ns.value:
        for v in ns.value:
            try:
                values.append(Fraction(v))
            except ValueError:
                raise UsageError(f"not a rational value: {v!r}")
    else:
        chamber = _chamber(cfg)
        for nu in nus:
            res = _coefficient(cfg, nu, chamber)
            n = res.integer()
            if n is None:
                raise CertificationError(f"c_nu at {format_quadrat(nu)} not certified: {res.value_text()}")
            values.append(Fraction(n))
    certs = []
    for nu, v in zip(nus, values):
        if v.denominator != 1:
            certs.append({"nu": format_quadrat(nu), "value": str(v), "ok": False, "reason": "not integral"})
        else:
            certs.append(certificate(nu, int(v), cfg.D, cfg.k).to_json())
    delta = divisibility_delta(list(zip(nus, values)), cfg.D, cfg.k, cfg.delta_bound)
    ok = all(c["ok"] for c in certs) and delta == 1
    payload = {
        "certificates": certs,
        "delta": "NOT_FOUND" if delta is NOT_FOUND else delta,
        "assumptions": {"cusp_space_trivial": cfg.assume_trivial_cusp_space},
        "ok": ok,
    }
    text = "".join(f"{c['nu']}\t{c['value']}\t{'ok' if c['ok'] else 'FAIL'}\n" for c in certs)
    text += f"delta: {payload['delta']}\ncusp space trivial (assumed): {cfg.assume_trivial_cusp_space}\n"
    _emit(out, cfg, "verify", payload, text if cfg.format == "text" else None)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_weilrep_check(cfg, ns, out) -> int:
    from .lattice import lattice_group
    from .weilrep import relations_report

    rep = relations_report(lattice_group(cfg.D), prec=max(cfg.precision_bits, 64))
    checks = {k: v for k, v in rep.items() if k not in ("order", "signature")}
    ok = all(v < RELATION_TOL for v in checks.values())
    payload = {"report": {k: (v if isinstance(v, (int, list)) else f"{v:.3e}") for k, v in rep.items()},
               "tolerance": RELATION_TOL, "ok": ok}
    _emit(out, cfg, "weilrep-check", payload)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_lift(cfg, ns, out) -> int:
    from .lattice import lattice_group
    from .lift import lift_coefficients
    from .qexp import VVQExpansion

    if ns.input is None:
        raise UsageError("lift needs --input with a JSON q-expansion")
    try:
        with open(ns.input) as fh:
            F = VVQExpansion.from_json(fh.read(), lattice_group(cfg.D))
    except (OSError, ValueError, KeyError) as e:
        raise UsageError(f"cannot read {ns.input}: {e}")
    nus = _nus(cfg, ns)
    chamber = _chamber(cfg)
    res = lift_coefficients(F, chamber, nus)
    _emit(out, cfg, "lift", {"lift": json.loads(res.to_json())})
    return EXIT_OK


HANDLERS = {
    "table": cmd_table,
    "coeff": cmd_coeff,
    "oracle-compare": cmd_oracle_compare,
    "verify": cmd_verify,
    "weilrep-check": cmd_weilrep_check,
    "lift": cmd_lift,
}


def execute(command: str, cfg: RunConfig, ns, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        return HANDLERS[command](cfg, ns, out)
    except UsageError as e:
        print(f"hz-coeff: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CertificationError as e:
        print(f"hz-coeff: certification failed: {e}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg, command, ns = parse(argv)
    except UsageError as e:
        print(f"hz-coeff: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return int(e.code or 0)
    return execute(command, cfg, ns)


if __name__ == "__main__":
    sys.exit(main())
