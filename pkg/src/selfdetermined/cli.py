"""Command-line interface.

Exit codes: 0 success, 1 set is not a community (``verify`` only),
2 invalid input, 3 budget exceeded or solver failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction

from . import generators, io
from .core import (
    BudgetExceeded,
    CommunityParams,
    CommunitySet,
    InvalidInput,
    SolverFailure,
    UnsupportedParameters,
    WeightedSystem,
    verify_community,
)
from .enumerate import EnumConfig, brute_force_oracle, enumerate_quasipoly, enumerate_sizes
from .lifting import LiftConfig, SocialGraph, lift, verify_alpha_beta_cluster, verify_graph_community
from .local import LocalConfig, enumerate_all_local, local_find
from .multifacet import FacetedSystem, MultifacetConfig, enumerate_multifaceted, recover_facets, verify_multifaceted
from .weighted import map_back, reduce

EXIT_OK, EXIT_FALSE, EXIT_INVALID, EXIT_FAILURE = 0, 1, 2, 3


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _member_set(text: str) -> list[int]:
    try:
        members = [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise InvalidInput(f"--set {text!r} must list integer ids") from None
    if not members:
        raise InvalidInput("--set is empty")
    return members


def _sizes(text: str | None, n: int) -> list[int]:
    """``"5"``, ``"3-7"`` or ``"2,4,8"``; default is every size ``1..n``."""
    if not text:
        return list(range(1, n + 1))
    out = set()
    for part in text.split(","):
        lo, dash, hi = part.strip().partition("-")
        try:
            a, b = int(lo), int(hi) if dash else int(lo)
        except ValueError:
            raise InvalidInput(f"bad size specification {text!r}") from None
        if a < 1 or b < a:
            raise InvalidInput(f"bad size range {part!r}")
        out.update(range(a, min(b, n) + 1))
    return sorted(out)


def _params(args) -> CommunityParams:
    return CommunityParams(args.theta, args.alpha, args.beta)


def _add_params(p):
    p.add_argument("--theta", type=_fraction, default=Fraction(1), help="prefix fraction (default 1)")
    p.add_argument("--alpha", type=_fraction, required=True)
    p.add_argument("--beta", type=_fraction, required=True)


def _add_common(p):
    p.add_argument("--rng-seed", type=int, default=0, help="seed for every random choice")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker threads; output does not depend on it")
    p.add_argument("--out", help="output file (default: stdout)")


def _add_system_inputs(p, faceted=False, graph=False):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--ranked", help="ranked system file")
    group.add_argument("--weighted", help="weighted system file")
    if faceted:
        group.add_argument("--faceted", help="faceted system file")
    if graph:
        group.add_argument("--graph", help="graph file")


def _load_system(args):
    if getattr(args, "ranked", None):
        return io.read_ranked(args.ranked)
    if getattr(args, "weighted", None):
        return io.read_weighted(args.weighted)
    if getattr(args, "faceted", None):
        return io.read_faceted(args.faceted)
    return io.read_graph(args.graph)


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    rng = args.rng_seed
    kind = args.kind
    planted_text = None
    if kind == "blob":
        system, planted = generators.gen_blob_instance(args.L, args.b, rng, max_union=args.max_union)
        text = io.write_ranked(system)
        by_params: dict = {}
        for members, params in planted:
            by_params.setdefault(params, []).append(members)
        planted_text = "".join(io.write_communities(sets, p, planted=True) for p, sets in by_params.items())
    elif kind == "overlap-pair":
        system, planted = generators.gen_overlap_pair(args.n)
        text = io.write_ranked(system)
        planted_text = io.write_communities([m for m, _ in planted], planted[0][1], planted=True)
    elif kind == "planted-ranked":
        sizes = [int(x) for x in (args.sizes or "").replace(",", " ").split()]
        system, groups = generators.gen_planted_ranked(args.n, sizes, rng)
        text = io.write_ranked(system)
        planted_text = io.write_communities(groups, CommunityParams(1, 1, Fraction(1, 2)), planted=True)
    elif kind == "gnp":
        text = io.write_graph(generators.gen_gnp(args.n, args.p, args.selfloops, rng))
    else:
        k = args.k
        p = args.p
        if k is None:
            k, p = generators.hidden_clique_setup(args.n, float(args.gamma), float(args.epsilon))
        graph, clique = generators.gen_gnp_planted_clique(args.n, p, k, rng, selfloops=True)
        text = io.write_graph(graph)
        planted_text = io.write_communities([clique], CommunityParams(1, 1, 1 - args.gamma), planted=True)
    _emit(text, args.out)
    if planted_text is not None and args.planted:
        with open(args.planted, "w") as fh:
            fh.write(planted_text)
    return EXIT_OK


def cmd_lift(args) -> int:
    graph = io.read_graph(args.graph)
    config = LiftConfig(method=args.method, teleport=args.teleport)
    _emit(io.write_weighted(lift(graph, config)), args.out)
    return EXIT_OK


def _format_certificate(S, tally, params) -> str:
    t = len(S)
    lines = [f"set {' '.join(map(str, sorted(S)))}  size={t}  {params}",
             f"inside threshold alpha*|S| = {io.format_number(params.alpha * t)}; "
             f"outside bound beta*|S| = {io.format_number(params.beta * t)}"]
    for i in sorted(tally.votes, key=lambda i: (i not in S, i)):
        tag = "in " if i in S else "out"
        lines.append(f"  {tag} {i}: {io.format_number(tally[i])}")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    params = _params(args)
    system = _load_system(args)
    S = _member_set(args.set)
    if isinstance(system, FacetedSystem):
        if not args.psi:
            raise InvalidInput("--psi is required for a faceted system")
        facets = [int(x) for x in args.psi.replace(",", " ").split()]
        if len(facets) != len(set(S)):
            raise InvalidInput("--psi needs one facet per member of --set, in --set order")
        psi = dict(zip(S, facets))
        ok = verify_multifaceted(system, S, psi, params)
        print(f"multi-faceted community: {'yes' if ok else 'no'}")
        return EXIT_OK if ok else EXIT_FALSE
    if isinstance(system, SocialGraph):
        if args.cluster:
            ok = verify_alpha_beta_cluster(system, S, params.alpha, params.beta)
        else:
            ok = verify_graph_community(system, S, params)
        print(f"{'cluster' if args.cluster else 'community'}: {'yes' if ok else 'no'}")
        return EXIT_OK if ok else EXIT_FALSE
    result = verify_community(system, S, params)
    sys.stdout.write(_format_certificate(set(S), result.tally, params))
    print(f"community: {'yes' if result else 'no'}")
    return EXIT_OK if result else EXIT_FALSE


def cmd_enumerate(args) -> int:
    params = _params(args)
    system = _load_system(args)
    sizes = _sizes(args.sizes, system.n)
    if isinstance(system, WeightedSystem):
        if args.method == "quasipoly":
            found = enumerate_quasipoly(system, params, args.k, sizes, args.budget)
        else:
            found = CommunitySet()
            reduced_params = CommunityParams(params.theta, params.alpha - params.gamma / 2, params.beta)
            for t in sizes:
                reduced, blobs = reduce(system, params, t)
                config = EnumConfig(reduced_params, t * blobs.k, delta=args.delta, k1=args.k1, k2=args.k2,
                                    n2=args.n2, rng_seed=args.rng_seed, budget=args.budget)
                hits = enumerate_sizes(reduced, config, [t * blobs.k], workers=args.threads)
                found.update(map_back(hits, blobs, system, params))
    elif args.method == "quasipoly":
        found = enumerate_quasipoly(system, params, args.k, sizes, args.budget)
    else:
        config = EnumConfig(params, 1, delta=args.delta, k1=args.k1, k2=args.k2, n2=args.n2,
                            rng_seed=args.rng_seed, budget=args.budget)
        found = enumerate_sizes(system, config, sizes, workers=args.threads)
    _emit(io.write_communities(found, params), args.out)
    print(f"{len(found)} communities", file=sys.stderr)
    return EXIT_OK


def cmd_local(args) -> int:
    params = _params(args)
    system = io.read_ranked(args.ranked)
    if args.seed_member is None:
        found = enumerate_all_local(system, params, epsilon_override=args.epsilon, rng_seed=args.rng_seed,
                                    max_size=args.max_size, delta=args.delta, workers=args.threads)
        _emit(io.write_communities(found, params), args.out)
        return EXIT_OK
    if args.size is None:
        raise InvalidInput("--size is required with --seed-member")
    config = LocalConfig(params, args.size, delta=args.delta, draws=args.draws,
                         hit_threshold=args.hit_threshold, rng_seed=args.rng_seed)
    community = local_find(system, args.seed_member, config)
    _emit(io.write_communities([community] if community else [], params), args.out)
    print("found" if community else "no community found", file=sys.stderr)
    return EXIT_OK


def cmd_reduce(args) -> int:
    params = _params(args)
    system = io.read_weighted(args.weighted)
    reduced, blobs = reduce(system, params, args.size, args.epsilon)
    _emit(io.write_reduced(reduced, blobs), args.out)
    return EXIT_OK


def cmd_facets(args) -> int:
    params = _params(args)
    system = io.read_faceted(args.faceted)
    if args.set:
        S = sorted(set(_member_set(args.set)))
        psi = recover_facets(system, S, params, rng=generators.make_rng(args.rng_seed))
        if psi is None:
            print("no facet assignment")
            return EXIT_FALSE
        _emit(" ".join(f"{s}/{psi[s]}" for s in S) + "\n", args.out)
        return EXIT_OK
    if args.size is None:
        raise InvalidInput("give --set to recover facets or --size to enumerate")
    config = MultifacetConfig(params, args.size, rng_seed=args.rng_seed)
    found = enumerate_multifaceted(system, config)
    lines = [" ".join(f"{s}/{psi[s]}" for s in S) for S, psi in found]
    _emit(io.params_header(params) + "\n" + "".join(line + "\n" for line in lines), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    params = _params(args)
    system = _load_system(args)
    found = brute_force_oracle(system, params, _sizes(args.sizes, system.n), limit=args.limit)
    _emit(io.write_communities(found, params), args.out)
    return EXIT_OK


def cmd_report(args) -> int:
    ns = [int(x) for x in args.ns.replace(",", " ").split()]
    seeds = range(args.rng_seed, args.rng_seed + args.trials)
    rows = generators.counting_report(ns, args.l, args.epsilon, args.delta, seeds, budget=args.budget)
    fields = ["n", "l", "p", "k", "eps", "delta", "seed", "clusters", "heuristic_mean"]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="selfdetermined", description="Self-determined community tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a seeded fixture")
    p.add_argument("kind", choices=["blob", "overlap-pair", "planted-ranked", "gnp", "gnp-clique"])
    p.add_argument("--L", type=_positive_int, default=4)
    p.add_argument("--b", type=_positive_int, default=4)
    p.add_argument("--max-union", type=_positive_int, default=1)
    p.add_argument("--n", type=_positive_int, default=16)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--k", type=_positive_int)
    p.add_argument("--sizes", help="planted group sizes, e.g. '5 5 3'")
    p.add_argument("--gamma", type=_fraction, default=Fraction(3, 10))
    p.add_argument("--epsilon", type=_fraction, default=Fraction(1, 10))
    p.add_argument("--selfloops", action="store_true")
    p.add_argument("--planted", help="write planted communities here")
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("lift", help="turn a graph into a weighted system")
    p.add_argument("--graph", required=True)
    p.add_argument("--method", choices=["direct", "shortest-path", "ppr", "resistance"], default="direct")
    p.add_argument("--teleport", type=float, default=0.15)
    _add_common(p)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("verify", help="check one set and print its tally")
    _add_system_inputs(p, faceted=True, graph=True)
    p.add_argument("--set", required=True, help="member ids, e.g. '0 1'")
    p.add_argument("--psi", help="facet per member (faceted systems)")
    p.add_argument("--cluster", action="store_true", help="graph only: (alpha, beta)-cluster check")
    _add_params(p)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate", help="list communities")
    _add_system_inputs(p)
    _add_params(p)
    p.add_argument("--sizes", help="sizes to search: '5', '3-7' or '2,4'")
    p.add_argument("--method", choices=["main", "quasipoly"], default="main")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--k1", type=_positive_int)
    p.add_argument("--k2", type=_positive_int)
    p.add_argument("--n2", type=_positive_int)
    p.add_argument("--k", type=_positive_int, help="multiset size for --method quasipoly")
    p.add_argument("--budget", type=_positive_int, default=2_000_000)
    _add_common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("local", help="single-seed search, or all seeds and sizes")
    p.add_argument("--ranked", required=True)
    _add_params(p)
    p.add_argument("--seed-member", type=int)
    p.add_argument("--size", type=_positive_int)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--draws", type=_positive_int)
    p.add_argument("--hit-threshold", type=_positive_int)
    p.add_argument("--epsilon", type=_fraction)
    p.add_argument("--max-size", type=_positive_int)
    _add_common(p)
    p.set_defaults(func=cmd_local)

    p = sub.add_parser("reduce", help="weighted to ranked reduction for one size")
    p.add_argument("--weighted", required=True)
    _add_params(p)
    p.add_argument("--size", type=_positive_int, required=True)
    p.add_argument("--epsilon", type=_fraction)
    _add_common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("facets", help="recover or enumerate multi-faceted communities")
    p.add_argument("--faceted", required=True)
    _add_params(p)
    p.add_argument("--set")
    p.add_argument("--size", type=_positive_int)
    _add_common(p)
    p.set_defaults(func=cmd_facets)

    p = sub.add_parser("oracle", help="brute-force every subset (small n)")
    _add_system_inputs(p)
    _add_params(p)
    p.add_argument("--sizes")
    p.add_argument("--limit", type=_positive_int, default=14)
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("report", help="cluster-counting CSV on G(n, 2^-l)")
    p.add_argument("--ns", default="12 16 20")
    p.add_argument("--l", type=_positive_int, default=1)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--trials", type=_positive_int, default=5)
    p.add_argument("--budget", type=_positive_int, default=5_000_000)
    _add_common(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInput, UnsupportedParameters) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (BudgetExceeded, SolverFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
