"""Command-line interface: lattice I/O, enumeration, and verification.

Every command writes a single JSON document to standard output (keys
sorted, two-space indent, no timestamps) and diagnostics to standard
error.  Exit codes: 0 success, 1 verification failure or violated
invariant, 2 invalid input or unmet precondition.

The environment variable ``QLAT_PRECISION`` sets the default working
precision k for mod-p^k lifting (default 2); canonical outputs do not
depend on it.  ``QLAT_PURE=1`` forces the pure-Python compute kernels.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import kernels
from .errors import InvariantViolationError, PreconditionError, SizeGuardError
from .fp_quadratic import enumerate_isotropic_lines
from .hecke_k3 import grow_unique, k3_isogeny, shrink_fiber
from .padic_lattice import enumerate_neighbors, reduction
from .quad_lattice import discriminant_group, is_self_dual_at, signature
from .serialize import (
    load_lattice_arg,
    load_matrix_arg,
    load_pair_arg,
    load_plattice_arg,
    plattice_to_dict,
    polarized_to_dict,
    quotient_to_dict,
)
from .verify import SUITES, run_suite

_MAX_POINTS_DEFAULT = 10**7
_MAX_GROUP_DEFAULT = 10**6


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _primes_up_to(bound: int):
    sieve = [True] * (bound + 1)
    for p in range(2, bound + 1):
        if sieve[p]:
            yield p
            for m in range(p * p, bound + 1, p):
                sieve[m] = False


def _cmd_lattice_info(args) -> int:
    L = load_lattice_arg(args.lattice)
    gram = L.gram()
    disc = discriminant_group(L)
    self_dual = [
        p for p in _primes_up_to(args.prime_bound) if is_self_dual_at(L, p)
    ]
    _emit(
        {
            "rank": L.rank,
            "signature": list(signature(L)),
            "det": gram.det(),
            "discriminant_group": quotient_to_dict(disc),
            "self_dual_primes": self_dual,
            "prime_bound": args.prime_bound,
        }
    )
    return 0


def _cmd_quadric_lines(args) -> int:
    L = load_lattice_arg(args.lattice)
    V = reduction(L, args.p)
    lines = enumerate_isotropic_lines(V, args.max_points)
    _emit(
        {
            "p": args.p,
            "count": len(lines),
            "lines": [list(line.generator) for line in lines],
        }
    )
    return 0


def _cmd_neighbors(args) -> int:
    N = load_lattice_arg(args.lattice)
    neighbors = enumerate_neighbors(N, args.p, args.max_points)
    _emit(
        {
            "p": args.p,
            "count": len(neighbors),
            "neighbors": [plattice_to_dict(Nt) for Nt in neighbors],
        }
    )
    return 0


def _cmd_shrink(args) -> int:
    N = load_lattice_arg(args.lattice)
    embedding = load_matrix_arg(args.embedding)
    pair = load_pair_arg(args.pair)
    if args.p is not None and args.p != pair.index:
        raise PreconditionError(
            f"--p {args.p} does not match the pair's index {pair.index}"
        )
    fiber = shrink_fiber(N, embedding, pair, args.max_points)
    _emit(
        {
            "p": pair.index,
            "count": len(fiber),
            "fiber": [plattice_to_dict(Nt) for Nt in fiber],
        }
    )
    return 0


def _cmd_grow(args) -> int:
    Nt = load_plattice_arg(args.lattice)
    embedding = load_matrix_arg(args.embedding)
    if args.p is not None and args.p != Nt.p:
        raise PreconditionError(f"--p {args.p} does not match the lattice prime {Nt.p}")
    grown = grow_unique(Nt, embedding, args.max_points)
    _emit({"p": Nt.p, "lattice": plattice_to_dict(grown)})
    return 0


def _cmd_k3_isogeny(args) -> int:
    pol = k3_isogeny(args.d, args.p)
    doc = polarized_to_dict(pol)
    doc["degree"] = pol.degree
    _emit(doc)
    return 0


def _cmd_verify(args) -> int:
    primes = (args.p,) if args.p is not None else None
    print(f"running suite {args.suite} [backend: {kernels.backend_name()}]", file=sys.stderr)
    report = run_suite(
        args.suite,
        primes=primes,
        max_rank=args.max_rank,
        seed=args.seed,
        max_points=args.max_points,
        max_group=args.max_group,
    )
    _emit(report.to_dict())
    return 0 if report.failures == 0 else 1


def _add_common(parser, group=False) -> None:
    parser.add_argument(
        "--max-points",
        type=int,
        default=_MAX_POINTS_DEFAULT,
        help=f"projective enumeration guard (default {_MAX_POINTS_DEFAULT})",
    )
    if group:
        parser.add_argument(
            "--max-group",
            type=int,
            default=None,
            help=f"group enumeration guard (default {_MAX_GROUP_DEFAULT})",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlat",
        description="Exact quadratic-lattice machinery: neighbors, quadrics, "
        "K3 polarization changes, and verification suites.",
        epilog="Lattice arguments accept a JSON file path, inline JSON, or a "
        "name such as H, H⊥H, E8, K3, rank1(-2).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    lat = sub.add_parser("lattice", help="lattice inspection")
    lat_sub = lat.add_subparsers(dest="subcommand", required=True)
    info = lat_sub.add_parser("info", help="rank, signature, determinant, "
                              "discriminant group, self-dual primes")
    info.add_argument("lattice")
    info.add_argument("--prime-bound", type=int, default=50,
                      help="report self-dual primes up to this bound (default 50)")
    info.set_defaults(func=_cmd_lattice_info)

    quad = sub.add_parser("quadric", help="quadric over F_p")
    quad_sub = quad.add_subparsers(dest="subcommand", required=True)
    lines = quad_sub.add_parser("lines", help="isotropic lines of the reduction mod p")
    lines.add_argument("lattice")
    lines.add_argument("--p", type=int, required=True)
    _add_common(lines)
    lines.set_defaults(func=_cmd_quadric_lines)

    nb = sub.add_parser("neighbors", help="all p-neighbor self-dual lattices")
    nb.add_argument("lattice")
    nb.add_argument("--p", type=int, required=True)
    _add_common(nb)
    nb.set_defaults(func=_cmd_neighbors)

    sh = sub.add_parser(
        "shrink", help="fiber of neighbors realizing a minimal pair inside W"
    )
    sh.add_argument("lattice", help="ambient self-dual lattice N")
    sh.add_argument("embedding", help="matrix whose columns embed the pair into N")
    sh.add_argument("pair", help="minimal pair document")
    sh.add_argument("--p", type=int, default=None,
                    help="cross-check against the pair's index")
    _add_common(sh)
    sh.set_defaults(func=_cmd_shrink)

    gr = sub.add_parser("grow", help="unique neighbor lattice growing W-tilde back to W")
    gr.add_argument("lattice", help="p-power-denominator lattice document")
    gr.add_argument("embedding", help="matrix whose columns span W-tilde")
    gr.add_argument("--p", type=int, default=None,
                    help="cross-check against the lattice's prime")
    _add_common(gr)
    gr.set_defaults(func=_cmd_grow)

    k3 = sub.add_parser("k3-isogeny", help="polarization change of degree p²d on the K3 lattice")
    k3.add_argument("--d", type=int, required=True)
    k3.add_argument("--p", type=int, required=True)
    k3.set_defaults(func=_cmd_k3_isogeny)

    ver = sub.add_parser("verify", help="run a named verification suite")
    ver.add_argument("suite", choices=sorted(SUITES))
    ver.add_argument("--p", type=int, default=None,
                     help="restrict the suite to a single prime")
    ver.add_argument("--max-rank", type=int, default=None)
    ver.add_argument("--seed", type=int, default=0)
    _add_common(ver, group=True)
    ver.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PreconditionError, SizeGuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolationError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
