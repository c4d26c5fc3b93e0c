"""Command-line front end.

Exit codes:
    0  success (certify: no perfect strategy certified; verify: witness holds)
    1  verification failed
    2  certify: verdict unknown within the degree bounds
    3  not a mirror game, or not regular
    4  malformed input or invalid options
    5  resource cap exceeded

Every flag can also be set through an environment variable named
``MIRRORCERT_<FLAG>`` (upper case, dashes as underscores); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import __version__
from .algebra import GenSymbol, PolySyntaxError, format_poly, parse_poly
from .game import (
    BudgetExceededError,
    DEFAULT_ENUMERATION_BUDGET,
    GameValidationError,
    classical_value,
    find_mirror_maps,
    load_game,
)
from .ideal import (
    DegreeBoundError,
    GeneratorSet,
    NotMirrorError,
    NotRegularError,
    build_invalid_set,
    build_mirror_ideal_generators,
    build_universal_relations,
    complete,
    default_degree_bound,
    family_alphabet,
    reduce,
)
from .sdp import DEFAULT_ITER_CAP, DEFAULT_TOL, DimensionOverflow
from .sos import DEFAULT_BASIS_CAP, NO_PERFECT, CertifyOptions, certify
from .verify import verify_files

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_UNKNOWN = 2
EXIT_NOT_APPLICABLE = 3
EXIT_INPUT = 4
EXIT_RESOURCE = 5

ENV_PREFIX = "MIRRORCERT_"

log = logging.getLogger("mirrorcert")


@dataclass
class RunConfig:
    input: str
    subcommand: str
    side: str = "1"
    degree_bound: Optional[int] = None
    sos_max_degree: Optional[int] = None
    tol: float = DEFAULT_TOL
    basis_cap: int = DEFAULT_BASIS_CAP
    iter_cap: int = DEFAULT_ITER_CAP
    enum_budget: int = DEFAULT_ENUMERATION_BUDGET
    format: str = "text"
    out: Optional[str] = None

    def validate(self) -> None:
        if self.degree_bound is not None and self.degree_bound < 2:
            raise ValueError("--degree-bound must be at least 2")
        if self.sos_max_degree is not None and self.sos_max_degree < 1:
            raise ValueError("--sos-max-degree must be at least 1")
        if not self.tol > 0:
            raise ValueError("--tol must be positive")
        if self.side not in ("1", "2", "both"):
            raise ValueError("--side must be 1, 2 or both")

    def certify_options(self) -> CertifyOptions:
        return CertifyOptions(
            side="both" if self.side == "both" else int(self.side),
            degree_bound=self.degree_bound,
            sos_max_degree=self.sos_max_degree,
            tol=self.tol,
            basis_cap=self.basis_cap,
            iter_cap=self.iter_cap,
        )


def _env(name: str, default=None, kind=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    return kind(raw)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", default=_env("input"), help="game file (JSON)")
    p.add_argument("--side", choices=["1", "2", "both"], default=_env("side", "1"))
    p.add_argument("--degree-bound", type=int, default=_env("degree-bound", None, int), metavar="D")
    p.add_argument("--sos-max-degree", type=int, default=_env("sos-max-degree", None, int), metavar="d")
    p.add_argument("--tol", type=float, default=_env("tol", DEFAULT_TOL, float))
    p.add_argument("--basis-cap", type=int, default=_env("basis-cap", DEFAULT_BASIS_CAP, int))
    p.add_argument("--iter-cap", type=int, default=_env("iter-cap", DEFAULT_ITER_CAP, int))
    p.add_argument("--enum-budget", type=int, default=_env("enum-budget", DEFAULT_ENUMERATION_BUDGET, int))
    p.add_argument("--format", choices=["text", "json"], default=_env("format", "text"))
    p.add_argument("--out", default=_env("out"), help="write the document here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mirrorcert", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("inspect", help="mirror maps, regularity, classical value, generator counts")
    _add_common(p)
    p = sub.add_parser("certify", help="search for a no-perfect-strategy certificate")
    _add_common(p)
    p = sub.add_parser("verify", help="re-check a certificate against a game file")
    _add_common(p)
    p.add_argument("--certificate", default=_env("certificate"), required=_env("certificate") is None)
    p = sub.add_parser("reduce", help="normal form of a polynomial modulo a game ideal")
    _add_common(p)
    p.add_argument("--ideal", choices=["mirror", "universal", "none"], default=_env("ideal", "mirror"))
    p.add_argument("--exact-degree", action="store_true",
                   help="homogenized completion: zero iff in the degree-D span of the generators")
    p.add_argument("poly", help="polynomial, e.g. 'e1[0,0]*e1[0,0] - 1/2'")
    return parser


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt_map(m) -> str:
    return ", ".join(f"{i}->{v}" for i, v in enumerate(m))


def cmd_inspect(cfg: RunConfig) -> int:
    g = load_game(cfg.input)
    m = find_mirror_maps(g)
    report = {
        "dimensions": {"nx": g.nx, "ny": g.ny, "na": g.na, "nb": g.nb},
        "game_sha256": g.digest(),
        "mirror": m is not None,
        "xi": list(m.xi) if m else None,
        "eta": list(m.eta) if m else None,
        "regular": bool(m and m.regular),
    }
    try:
        report["classical_value"] = str(classical_value(g, cfg.enum_budget))
    except BudgetExceededError as exc:
        report["classical_value"] = None
        log.warning("%s", exc)
    counts = {
        "universal": build_universal_relations(g, "both").counts(),
        "invalid": len(build_invalid_set(g)),
    }
    if m is not None and m.regular:
        for side in (1, 2):
            counts[f"mirror_side{side}"] = build_mirror_ideal_generators(g, m, side).counts()
    report["generator_counts"] = counts

    if cfg.format == "json":
        _emit(cfg, json.dumps(report, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    lines = [
        f"game: nx={g.nx} ny={g.ny} na={g.na} nb={g.nb}",
        f"sha256: {report['game_sha256']}",
        f"mirror: {'yes' if m else 'no'}",
    ]
    if m:
        lines += [f"xi: {_fmt_map(m.xi)}", f"eta: {_fmt_map(m.eta)}", f"regular: {'yes' if m.regular else 'no'}"]
    lines.append(f"classical_value: {report['classical_value'] if report['classical_value'] else 'over budget'}")
    for key, val in counts.items():
        if isinstance(val, dict):
            lines.append(f"generators[{key}]: " + " ".join(f"{k}={v}" for k, v in sorted(val.items())))
        else:
            lines.append(f"generators[{key}]: {val}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_certify(cfg: RunConfig) -> int:
    g = load_game(cfg.input)
    cert = certify(g, cfg.certify_options())
    if cfg.format == "json":
        _emit(cfg, cert.to_json())
    else:
        lines = [f"verdict: {cert.verdict}"]
        if cert.verdict == NO_PERFECT:
            lines.append(f"method: {cert.method}")
            lines.append(f"side: {cert.side}")
            if cert.sos_degree is not None:
                lines.append(f"sos_degree: {cert.sos_degree}")
        lines.append(f"sides_tried: {','.join(map(str, cert.sides_tried))}")
        lines.append(f"degree_bound: {cert.degree_bound}")
        lines.append(f"sos_max_degree: {cert.sos_max_degree}")
        lines.append(f"xi: {_fmt_map(cert.mirror_maps.xi)}")
        lines.append(f"eta: {_fmt_map(cert.mirror_maps.eta)}")
        text = "\n".join(lines) + "\n"
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(cert.to_json())
        sys.stdout.write(text)
    return EXIT_OK if cert.verdict == NO_PERFECT else EXIT_UNKNOWN


def cmd_verify(cfg: RunConfig, certificate: str) -> int:
    result = verify_files(cfg.input, certificate)
    msg = f"{'PASS' if result.ok else 'FAIL'}: {result.reason}\n"
    if cfg.format == "json":
        msg = json.dumps({"ok": result.ok, "reason": result.reason}, sort_keys=True) + "\n"
    _emit(cfg, msg)
    return EXIT_OK if result.ok else EXIT_FAIL


def cmd_reduce(cfg: RunConfig, text: str, ideal: str, exact_degree: bool = False) -> int:
    g = load_game(cfg.input)
    p = parse_poly(text)
    for c in p.symbols():
        s = GenSymbol.from_char(c)
        nq, na = (g.nx, g.na) if s.side == 1 else (g.ny, g.nb)
        if not (s.question < nq and s.answer < na):
            raise ValueError(f"symbol {s} is out of range for this game")
    if cfg.side == "both":
        raise ValueError("reduce needs --side 1 or 2")
    side = int(cfg.side)
    if ideal == "none":
        gens = GeneratorSet()
    elif ideal == "universal":
        gens = build_universal_relations(g, side)
    else:
        m = find_mirror_maps(g)
        if m is None:
            raise NotMirrorError("game has no mirror maps")
        gens = build_mirror_ideal_generators(g, m, side)
    D = cfg.degree_bound if cfg.degree_bound is not None else default_degree_bound(g)
    rs = complete(gens, D, track=False, homogenize=exact_degree, alphabet=family_alphabet(g, side))
    nf = reduce(p, rs)
    if cfg.format == "json":
        _emit(cfg, json.dumps({"normal_form": format_poly(nf), "contains_one": rs.contains_one,
                               "complete_up_to_bound": rs.complete_up_to_bound}, sort_keys=True) + "\n")
    else:
        _emit(cfg, format_poly(nf) + "\n")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    cfg = RunConfig(
        input=args.input,
        subcommand=args.subcommand,
        side=args.side,
        degree_bound=args.degree_bound,
        sos_max_degree=args.sos_max_degree,
        tol=args.tol,
        basis_cap=args.basis_cap,
        iter_cap=args.iter_cap,
        enum_budget=args.enum_budget,
        format=args.format,
        out=args.out,
    )
    try:
        cfg.validate()
        if not cfg.input:
            raise ValueError("--input is required")
        if cfg.subcommand == "inspect":
            return cmd_inspect(cfg)
        if cfg.subcommand == "certify":
            return cmd_certify(cfg)
        if cfg.subcommand == "verify":
            return cmd_verify(cfg, args.certificate)
        return cmd_reduce(cfg, args.poly, args.ideal, args.exact_degree)
    except (NotMirrorError, NotRegularError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    except (GameValidationError, PolySyntaxError, DegreeBoundError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BudgetExceededError, DimensionOverflow, MemoryError) as exc:
        print(f"error: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
