"""Command-line interface: basis/gram/det/verify/nullity with disk caching.

Gram matrices are cached as JSON keyed by (family, n, code version); cache
files carry a checksum and corrupt entries are recomputed with a warning.
Every report records the seed, prime and trial count needed to replay it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .diagrams import BasisFamily, CapExceededError, VALID_TAGS, enumerate_basis, serialize
from .gram import (
    DEFAULT_EXACT_CAP,
    DEFAULT_TRIALS,
    GramMatrix,
    build_gram,
    det_exact,
    det_matches_formula_probabilistic,
)
from .polyring import DEFAULT_PRIME, is_prime
from .verify import (
    DIVISIBILITY_FAMILY,
    EQUALITY_FAMILY,
    FORMULA_TAGS,
    FormulaSpec,
    check_divisibility,
    check_equality,
    check_nullity,
    formula,
)

ENV_CACHE = "SKEINGRAM_CACHE"


@dataclass(frozen=True)
class RunConfig:
    cache_dir: Path
    exact_cap: int = DEFAULT_EXACT_CAP
    prime: int = DEFAULT_PRIME
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    fmt: str = "table"

    def __post_init__(self):
        if self.exact_cap < 1:
            raise ValueError("exact cap must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not is_prime(self.prime) or self.prime <= (1 << 30):
            raise ValueError("--prime must be a prime above 2^30")


# ---------------------------------------------------------------------------
# Matrix cache
# ---------------------------------------------------------------------------

def _canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _cache_key(family: BasisFamily) -> str:
    text = f"{family.tag}:{family.n}:{__version__}"
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _cache_path(cfg: RunConfig, family: BasisFamily) -> Path:
    return cfg.cache_dir / f"gram-{family.tag}-n{family.n}-{_cache_key(family)}.json"


def cached_gram(cfg: RunConfig, family: BasisFamily) -> GramMatrix:
    """Load the family's Gram matrix from cache, or build and store it."""
    path = _cache_path(cfg, family)
    if path.exists():
        try:
            payload = json.loads(path.read_text())
            body = payload["matrix"]
            if payload["checksum"] != hashlib.sha256(
                    _canonical_json(body).encode()).hexdigest():
                raise ValueError("checksum mismatch")
            return GramMatrix.from_json(body)
        except Exception as exc:  # corrupt cache: recompute below
            print(f"warning: ignoring corrupt cache {path}: {exc}", file=sys.stderr)
    g = build_gram(family)
    body = g.to_json()
    payload = {
        "key": _cache_key(family),
        "checksum": hashlib.sha256(_canonical_json(body).encode()).hexdigest(),
        "matrix": body,
    }
    cfg.cache_dir.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload))
    os.replace(tmp, path)
    return g


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------

def _emit(report: dict, cfg: RunConfig, out: str | None, lines: list[str]) -> None:
    """Print human lines or JSON per --format; --out always gets JSON."""
    if cfg.fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)
    if out:
        Path(out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def _cmd_basis(args, cfg: RunConfig) -> int:
    family = BasisFamily(args.family, args.n)
    started = time.perf_counter()
    basis = enumerate_basis(family)
    duration = (time.perf_counter() - started) * 1000.0
    expected = family.expected_size()
    report = {
        "command": "basis",
        "family": family.tag,
        "n": family.n,
        "count": len(basis),
        "expected": expected,
        "seed": cfg.seed,
        "duration_ms": duration,
        "basis": [serialize(b) for b in basis],
    }
    _emit(report, cfg, args.out, [f"{len(basis)} (expected {expected})"])
    return 0


def _cmd_gram(args, cfg: RunConfig) -> int:
    family = BasisFamily(args.family, args.n)
    started = time.perf_counter()
    g = cached_gram(cfg, family)
    duration = (time.perf_counter() - started) * 1000.0
    report = {
        "command": "gram",
        "family": family.tag,
        "n": family.n,
        "side": g.side,
        "seed": cfg.seed,
        "duration_ms": duration,
        "matrix": g.to_json(),
    }
    lines = [f"{g.side}x{g.side} Gram matrix ({family.tag}, n={family.n})"]
    lines += ["  ".join(e.text() for e in row) for row in g.entries]
    _emit(report, cfg, args.out, lines)
    return 0


_FAMILY_FORMULA = {"b": "thm-b", "mb1union": "conj-mb1", "mbfull": "chen-mb"}


def _cmd_det(args, cfg: RunConfig) -> int:
    family = BasisFamily(args.family, args.n)
    g = cached_gram(cfg, family)
    started = time.perf_counter()
    if args.mode == "exact":
        det = det_exact(g, cap=cfg.exact_cap)
        duration = (time.perf_counter() - started) * 1000.0
        report = {
            "command": "det",
            "family": family.tag,
            "n": family.n,
            "mode": "exact",
            "seed": cfg.seed,
            "duration_ms": duration,
            "determinant": det.to_json_terms(),
            "text": det.text(),
        }
        _emit(report, cfg, args.out, [det.text()])
        return 0
    fam_formula = _FAMILY_FORMULA.get(family.tag)
    if fam_formula is None:
        raise ValueError(f"no reference formula for family {family.tag!r}")
    f = formula(FormulaSpec(fam_formula, family.n))
    verdict = det_matches_formula_probabilistic(
        g, f, trials=cfg.trials, seed=cfg.seed, prime=cfg.prime)
    duration = (time.perf_counter() - started) * 1000.0
    report = {
        "command": "det",
        "family": family.tag,
        "n": family.n,
        "mode": "probabilistic",
        "formula": fam_formula,
        "seed": cfg.seed,
        "duration_ms": duration,
        "identity": verdict.to_json(),
    }
    word = "matches" if verdict.passed else "DIFFERS FROM"
    _emit(report, cfg, args.out,
          [f"det({family.tag}, n={family.n}) {word} {fam_formula} "
           f"[{cfg.trials} trials, prime {cfg.prime}, seed {cfg.seed}]"])
    return 0


def _cmd_verify(args, cfg: RunConfig) -> int:
    spec = FormulaSpec(args.spec, args.n)
    if spec.tag in EQUALITY_FAMILY:
        family = BasisFamily(EQUALITY_FAMILY[spec.tag], spec.n)
        report_obj = check_equality(
            family, spec, mode=args.mode, trials=cfg.trials, seed=cfg.seed,
            prime=cfg.prime, exact_cap=cfg.exact_cap,
            gram=cached_gram(cfg, family))
    else:
        family = BasisFamily(DIVISIBILITY_FAMILY[spec.tag], spec.n)
        report_obj = check_divisibility(
            family, spec, mode=args.mode, exact_cap=cfg.exact_cap,
            gram=cached_gram(cfg, family))
    report = {"command": "verify", **report_obj.to_json()}
    _emit(report, cfg, args.out,
          [f"{spec.tag} n={spec.n} [{report_obj.mode}]: {report_obj.verdict} "
           f"({report_obj.duration_ms:.1f} ms)"])
    return 0


def _cmd_nullity(args, cfg: RunConfig) -> int:
    family = BasisFamily("mb1union", args.n)
    report_obj = check_nullity(
        args.n, args.k, trials=cfg.trials, seed=cfg.seed, prime=cfg.prime,
        gram=cached_gram(cfg, family))
    report = {"command": "nullity", **report_obj.to_json()}
    w = report_obj.witness
    _emit(report, cfg, args.out,
          [f"nullity(n={args.n}, k={args.k}): observed {w['observed_nullity']} "
           f">= {w['nullity_bound_tested']} required: {report_obj.verdict} "
           f"[seed {cfg.seed}, prime {cfg.prime}]"])
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skeingram",
        description="Gram matrices and determinants of crossingless-connection "
                    "bases on the annulus and Mobius band.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--cache-dir", default=None,
                        help=f"matrix cache directory (or ${ENV_CACHE})")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    parser.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    parser.add_argument("--exact-cap", type=int, default=DEFAULT_EXACT_CAP)
    parser.add_argument("--format", choices=("table", "json"), default="table")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="enumerate a basis and check its count")
    p.add_argument("--family", required=True, choices=VALID_TAGS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_basis)

    p = sub.add_parser("gram", help="build (or load) a Gram matrix")
    p.add_argument("--family", required=True, choices=VALID_TAGS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_gram)

    p = sub.add_parser("det", help="determinant, exact or probabilistic")
    p.add_argument("--family", required=True, choices=VALID_TAGS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "probabilistic"), default="exact")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_det)

    p = sub.add_parser("verify", help="check a closed formula against a determinant")
    p.add_argument("--spec", required=True, choices=FORMULA_TAGS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "probabilistic"), default="exact")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("nullity", help="Monte Carlo nullity bound after z -> +-T_k(d)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_nullity)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    cache_dir = args.cache_dir or os.environ.get(ENV_CACHE) or ".skeingram-cache"
    try:
        cfg = RunConfig(
            cache_dir=Path(cache_dir),
            exact_cap=args.exact_cap,
            prime=args.prime,
            trials=args.trials,
            seed=args.seed,
            fmt=args.format,
        )
        return args.func(args, cfg)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
