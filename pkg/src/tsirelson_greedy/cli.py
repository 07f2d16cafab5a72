"""Command-line front end: one subcommand per experiment.

Every run writes ``<out>/<experiment>.json`` (config, versions, mode flags,
summary, invariant verdicts) and, for tabular experiments, a CSV with one
row per parameter value.  The exit status is 0 exactly when every checked
invariant holds; configuration errors exit with status 2.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import core_spaces as cs
from .descriptors import DescriptorError, parse_dims, parse_space_descriptor
from .dkk import (DKK, biorthogonality_defect, build_ag_basis, imp_estimate_check,
                  loglog_slope, partial_sum_ratios)
from .finvec import FinVec
from .greedy_analysis import (BasisHandle, almost_greedy_gap, cond_params, democracy_ratio,
                              fundamental_function, greedy_gap, greedy_ordering, quasi_greedy_ratio,
                              regularity_fit)
from .haar import dhk_constants, random_spread_spec, spread_equivalence_ratio
from .hierarchy import ContinuumSpec, continuum_phi, first_disagreement
from .reports import Report, format_scalar, make_rng
from .trig import RotatedTrigSum, dirichlet_growth, rotated_witness_ratios
from .tsirelson_norm import tsirelson_norm, tsirelson_norm_bruteforce


class ConfigError(ValueError):
    pass


def _int_range(text: str) -> range:
    """``"8:100"`` -> ``range(8, 101)``."""
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"expected a range like 8:100, got {text!r}") from exc
    if lo < 1 or hi < lo:
        raise ConfigError(f"empty or invalid range {text!r}")
    return range(lo, hi + 1)


def _mode_of(space) -> str:
    return "exact" if space.exact else "float"


def random_rational(rng, n: int, nums=(-9, 9), dens=(1, 6)) -> FinVec:
    a = rng.integers(nums[0], nums[1] + 1, size=n)
    b = rng.integers(dens[0], dens[1] + 1, size=n)
    return FinVec.from_dense([Fraction(int(x), int(y)) for x, y in zip(a, b)])


# -- subcommands ------------------------------------------------------------------

def cmd_norm(args, rep: Report):
    space = parse_space_descriptor(args.space)
    f = FinVec.parse(args.vec)
    value = space.norm(f)
    rep.mode = {"arithmetic": "exact" if isinstance(value, Fraction) else "float"}
    rep.summary = {"value": value, "space": str(space)}
    rep.check("nonnegative", value >= 0)
    print(format_scalar(value))


def cmd_fundfn(args, rep: Report):
    space = parse_space_descriptor(args.space)
    basis = BasisHandle(space)
    ff = fundamental_function(basis, args.mmax, args.window, args.cutoff, make_rng(args.seed))
    rep.mode = {"arithmetic": _mode_of(space),
                "search": "exhaustive" if all(ff.exact) else "exhaustive+lower-bound"}
    rep.header = ["m", "phi", "exact", "argmax"]
    rep.rows = [[m, v, e, " ".join(map(str, a))] for m, (v, e, a) in enumerate(zip(ff.values, ff.exact, ff.argmax), 1)]
    vals = [float(v) for v in ff.values]
    rep.summary = {"phi": ff.values}
    if len(vals) >= 8:
        fit = regularity_fit(vals)
        rep.summary["fit"] = vars(fit)
    rep.check("phi_nondecreasing", all(b >= a for a, b in zip(vals, vals[1:])))
    rep.check("phi_positive", vals[0] > 0)
    if space.unconditional:
        rep.check("doubling", all(vals[2 * m - 1] <= 2 * vals[m - 1] + 1e-12 for m in range(1, len(vals) // 2 + 1)))
    print(f"phi(1..{args.mmax}) = {', '.join(format_scalar(v) for v in ff.values)}")


def cmd_democracy(args, rep: Report):
    space = parse_space_descriptor(args.space)
    res = democracy_ratio(BasisHandle(space), args.mmax, args.window, make_rng(args.seed))
    rep.mode = {"arithmetic": _mode_of(space), "search": "exhaustive" if res.exact else "sampled"}
    rep.header = ["size", "max_norm", "min_norm", "exact"]
    rep.rows = [[s.size, s.max_norm, s.min_norm, s.exact] for s in res.stats]
    rep.summary = {"delta": res.delta}
    rep.check("delta_at_least_one", res.delta >= 1)
    print(f"democracy constant >= {format_scalar(res.delta)}")


def cmd_greedy_consts(args, rep: Report):
    space = parse_space_descriptor(args.space)
    basis = BasisHandle(space)
    rng = make_rng(args.seed)
    samples = [FinVec.from_dense(rng.standard_normal(args.dim)) for _ in range(args.samples)]
    rep.mode = {"arithmetic": "float", "search": "sampled", "greedy_denominator": "coordinate-descent upper bound"}
    rep.header = ["m", "quasi_greedy", "almost_greedy", "greedy"]
    contract_ok, chain_ok = True, True
    for m in range(1, args.dim):
        qg = quasi_greedy_ratio(basis, samples, [m])
        ag = max(almost_greedy_gap(basis, f, m) for f in samples)
        gg = 0.0
        for f in samples[: args.greedy_samples]:
            g, a = greedy_gap(basis, f, m), almost_greedy_gap(basis, f, m)
            chain_ok &= g >= a * (1 - 1e-9)
            gg = max(gg, g)
        rep.rows.append([m, qg, ag, gg])
        if space.unconditional:
            contract_ok &= all(float(basis.norm(f - f.restrict(greedy_ordering(f)[:m]))) <= float(basis.norm(f)) * (1 + 1e-12)
                               for f in samples)
    rep.summary = {"quasi_greedy": max(r[1] for r in rep.rows), "almost_greedy": max(r[2] for r in rep.rows),
                   "greedy": max(r[3] for r in rep.rows)}
    rep.check("ratios_at_least_one", all(r[2] >= 1 - 1e-9 and r[3] >= 1 - 1e-9 for r in rep.rows))
    rep.check("greedy_dominates_almost_greedy", chain_ok)
    if space.unconditional:
        rep.check("unconditional_contraction", contract_ok)
    for k, v in rep.summary.items():
        print(f"{k}: {format_scalar(v)}")


def cmd_cond_params(args, rep: Report):
    space = parse_space_descriptor(args.space)
    basis = BasisHandle(space)
    ms = None
    if args.witness_ms:
        if not isinstance(space, RotatedTrigSum):
            raise ConfigError("--witness-ms applies to rot(...) spaces only")
        ms = list(_int_range(args.witness_ms))
        if 4 * ms[-1] + 2 > space.dim:
            raise ConfigError(f"witness range needs dim >= {4 * ms[-1] + 2}")
    rng = make_rng(args.seed)
    rep.header = ["m", "k_lower", "k_tilde", "exact"]
    for m in range(1, args.mmax + 1):
        r = cond_params(basis, m, args.mode, rng=rng)
        rep.rows.append([m, r.k, r.k_tilde, r.exact])
    rep.mode = {"arithmetic": _mode_of(space), "search": args.mode,
                "engine": "hilbert-eigen" if basis.hilbert else ("unconditional" if basis.unconditional else "witness")}
    rep.check("k_tilde_le_k", all(r[2] <= r[1] + 1e-9 for r in rep.rows))
    if basis.unconditional:
        rep.check("unconditional_k_is_one", all(r[1] == 1 for r in rep.rows))
    rep.summary = {"k": rep.rows[-1][1], "k_tilde": rep.rows[-1][2]}
    if ms is not None:
        ratios = rotated_witness_ratios(space.a, ms, space.tol)
        slope = loglog_slope(ms, ratios)
        rep.summary.update({"witness_ms": ms, "witness_ratios": ratios, "witness_slope": slope})
        rep.check("witness_slope_near_a", abs(slope - space.a) <= args.slope_tol)
        print(f"witness slope {slope:.4f} (target {space.a:g})")
    print(f"k_{args.mmax} >= {format_scalar(rep.summary['k'])}, k~_{args.mmax} = {format_scalar(rep.summary['k_tilde'])}")


def cmd_dirichlet(args, rep: Report):
    lam = args.lam
    if not -1 < lam < 1:
        raise ConfigError("lambda must lie in (-1, 1)")
    slope, ms, norms = dirichlet_growth(lam, args.mmax, args.mmin)
    slope_m = loglog_slope(ms, norms)
    target = (1 - lam) / 2
    rep.mode = {"arithmetic": "float", "quadrature": "gauss-legendre-32"}
    rep.header = ["m", "size", "norm"]
    rep.rows = [[int(m), int(2 * m + 1), float(v)] for m, v in zip(ms, norms)]
    rep.summary = {"slope": slope, "slope_vs_m": slope_m, "target": target}
    rep.check("slope_within_tol", abs(slope - target) <= args.slope_tol)
    print(f"slope {slope:.6f} (target {target:g}; against m: {slope_m:.6f})")


def cmd_dkk_build(args, rep: Report):
    rng = make_rng(args.seed)
    ag = build_ag_basis(args.p, args.a, args.jmax)
    basis = ag.basis
    sigma = ag.sigma
    S = cs.Lp(args.p)
    nblocks = sigma.blocks_covering(max(ag.psi))
    defect = biorthogonality_defect(sigma, S, nblocks)
    # projection estimate on the first DKK block
    space = DKK(RotatedTrigSum(args.a, nblocks), S, sigma)
    dim = sigma.M(nblocks)
    viol = 0
    for _ in range(args.samples):
        f = FinVec.from_dense(rng.standard_normal(dim))
        A = [j for j in range(1, dim + 1) if rng.random() < 0.5]
        viol += not imp_estimate_check(space, f, A).holds
    ps = partial_sum_ratios(BasisHandle(space), dim, args.samples, rng)
    ms = sorted(ps)
    ps_slope = loglog_slope(ms, [max(ps[m], 1e-300) for m in ms]) if len(ms) > 1 else 0.0
    ff = fundamental_function(basis, args.mmax, 2 * args.mmax, rng=rng)
    qg = quasi_greedy_ratio(basis, [FinVec.from_dense(rng.standard_normal(min(ag.dimension, 12))) for _ in range(20)])
    rep.mode = {"arithmetic": "float", "search": "sampled"}
    rep.header = ["m", "partial_sum_ratio"]
    rep.rows = [[m, ps[m]] for m in ms]
    rep.summary = {"dims": ag.dims, "psi": ag.psi, "biorthogonality_defect": float(defect),
                   "imp_violations": viol, "partial_sum_slope": ps_slope, "partial_sum_max": max(ps.values()),
                   "phi": ff.values, "quasi_greedy_sample": qg}
    rep.check("biorthogonal", defect <= 1e-12)
    rep.check("imp_estimate", viol == 0)
    rep.check("partial_sums_bounded", ps_slope < 0.2)
    rep.check("phi_nondecreasing", all(b >= a for a, b in zip(ff.values, ff.values[1:])))
    for k in ("dims", "imp_violations", "partial_sum_slope", "quasi_greedy_sample"):
        print(f"{k}: {rep.summary[k]}")


def cmd_haar_spread(args, rep: Report):
    rng = make_rng(args.seed)
    c1, c2 = dhk_constants(args.u, args.p, args.K)
    rep.header = ["draw", "intervals", "ratio"]
    bad = 0
    for d in range(args.draws):
        spec = random_spread_spec(rng, args.u, args.p)
        coeffs = {I: float(rng.standard_normal() * rng.exponential()) for I in spec.S}
        r = spread_equivalence_ratio(spec, coeffs)
        bad += not (c1.hi <= r <= c2.lo)
        rep.rows.append([d, len(spec.S), r])
    ratios = [r[2] for r in rep.rows]
    rep.mode = {"arithmetic": "float", "search": "sampled", "constants": "certified enclosures"}
    rep.summary = {"C1": [c1.lo, c1.hi], "C2": [c2.lo, c2.hi], "min_ratio": min(ratios), "max_ratio": max(ratios),
                   "violations": bad}
    rep.check("bracket", bad == 0)
    print(f"ratios in [{min(ratios):.6f}, {max(ratios):.6f}], bracket [{c1.hi:.6f}, {c2.lo:.6f}], violations {bad}")


def cmd_continuum(args, rep: Report):
    rng = make_rng(args.seed)
    specs = []
    seen = set()
    while len(specs) < args.prefixes:
        eps = tuple(int(x) for x in rng.integers(1, 3, size=args.jmax))
        if eps not in seen:
            seen.add(eps)
            specs.append(ContinuumSpec(eps))
    tables = [[continuum_phi(s, j) for j in range(1, args.jmax + 1)] for s in specs]
    rep.header = ["prefix", "eps", "j", "phi"]
    for i, (s, t) in enumerate(zip(specs, tables)):
        for j, v in enumerate(t, 1):
            rep.rows.append([i, "".join(map(str, s.eps)), j, v])
    bound_ok = all(v <= 3 ** (j + 1) for t in tables for j, v in enumerate(t, 1))
    incr_ok = all(a < b for t in tables for a, b in zip(t, t[1:]))
    confined = True
    for (s, t), (r, u) in itertools.combinations(zip(specs, tables), 2):
        cut = first_disagreement(s.eps, r.eps)
        pos_u = {v: j for j, v in enumerate(u, 1)}
        for j, v in enumerate(t, 1):
            if v in pos_u and not (pos_u[v] == j and j < cut):
                confined = False
    rep.mode = {"arithmetic": "exact"}
    rep.summary = {"prefixes": len(specs), "jmax": args.jmax}
    rep.check("bound_3_pow_j_plus_1", bound_ok)
    rep.check("increasing", incr_ok)
    rep.check("intersections_confined", confined)
    print(f"{len(specs)} prefixes: bound {bound_ok}, increasing {incr_ok}, confined {confined}")


def square_split_ratios(n: int, samples: int, rng) -> list[float]:
    out = []
    for _ in range(samples):
        f = random_rational(rng, n)
        if not f.support:
            continue
        whole, parts = cs.square_split_norms(f)
        out.append(float(Fraction(whole) / Fraction(parts)))
    return out


def cmd_square_split(args, rep: Report):
    base = None
    if args.baseline:
        try:
            base = float(json.loads(Path(args.baseline).read_text())["constant"])
        except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"unusable baseline file {args.baseline}: {exc}") from exc
    ratios = square_split_ratios(args.n, args.samples, make_rng(args.seed))
    lo, hi = min(ratios), max(ratios)
    const = hi / lo
    rep.mode = {"arithmetic": "exact", "search": "sampled", "square_norm": "max of the two block norms"}
    rep.header = ["sample", "ratio"]
    rep.rows = [[i, r] for i, r in enumerate(ratios, 1)]
    rep.summary = {"min_ratio": lo, "max_ratio": hi, "constant": const}
    rep.check("finite", math.isfinite(const))
    if base is not None:
        rep.summary["baseline"] = base
        rep.check("within_1pct_of_baseline", const <= base * 1.01)
    print(f"ratio range [{lo:.6f}, {hi:.6f}], constant {const:.6f}")


def cmd_iso_ratio(args, rep: Report):
    dims = parse_dims(args.phi)
    rng = make_rng(args.seed)
    ratios = []
    for _ in range(args.samples):
        f = random_rational(rng, args.n)
        if not f.support:
            continue
        a, b = cs.iso_norms(dims, f, args.p)
        ratios.append(cs.ratio(a, b))
    rep.mode = {"arithmetic": "exact" if args.p == 1 else "float", "search": "sampled"}
    rep.summary = {"phi": str(dims), "min_ratio": min(ratios), "max_ratio": max(ratios)}
    rep.check("finite_positive", min(ratios) > 0 and math.isfinite(max(ratios)))
    print(f"ratio range [{min(ratios):.6f}, {max(ratios):.6f}]")


def cmd_oracle_check(args, rep: Report):
    if args.n > 8:
        raise ConfigError("the brute-force oracle supports n <= 8")
    rng = make_rng(args.seed)
    cases = [FinVec.indicator([i + 1 for i in range(args.n) if mask >> i & 1]) for mask in range(1, 1 << args.n)]
    cases += [random_rational(rng, args.n) for _ in range(args.cases)]
    mismatches = []
    for f in cases:
        a, b = tsirelson_norm(f), tsirelson_norm_bruteforce(f)
        if a != b:
            mismatches.append((str(f), str(a), str(b)))
    rep.mode = {"arithmetic": "exact", "search": "exhaustive indicators + seeded random"}
    rep.header = ["vector", "dp", "bruteforce"]
    rep.rows = mismatches
    rep.summary = {"cases": len(cases), "mismatches": len(mismatches)}
    rep.check("dp_equals_bruteforce", not mismatches)
    print(f"{len(cases)} cases, {len(mismatches)} mismatches")


# -- argument handling ----------------------------------------------------------------

COMMANDS = {}


def _sub(subs, name, fn, help_):
    p = subs.add_parser(name, help=help_)
    p.set_defaults(func=fn, experiment=name)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="reports", help="directory for the JSON/CSV reports")
    COMMANDS[name] = p
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsg", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value file mirroring the flags")
    subs = parser.add_subparsers(dest="command", required=True)

    p = _sub(subs, "norm", cmd_norm, "evaluate one norm")
    p.add_argument("--space", default="tsirelson")
    p.add_argument("--vec", required=True, help="JSON dense array, [index,num,den] triples, or CSV row")

    p = _sub(subs, "fundfn", cmd_fundfn, "fundamental function table")
    p.add_argument("--space", default="tsirelson")
    p.add_argument("--mmax", type=int, default=6)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--cutoff", type=int, default=12)

    p = _sub(subs, "democracy", cmd_democracy, "democracy constant")
    p.add_argument("--space", default="tsirelson")
    p.add_argument("--mmax", type=int, default=6)
    p.add_argument("--window", type=int, default=None)

    p = _sub(subs, "greedy-consts", cmd_greedy_consts, "quasi-greedy, almost greedy and greedy ratios")
    p.add_argument("--space", default="tsirelson")
    p.add_argument("--dim", type=int, default=6)
    p.add_argument("--samples", type=int, default=40)
    p.add_argument("--greedy-samples", type=int, default=5)

    p = _sub(subs, "cond-params", cmd_cond_params, "conditionality parameters")
    p.add_argument("--space", default="tsirelson")
    p.add_argument("--mmax", type=int, default=8)
    p.add_argument("--mode", choices=["exhaustive", "witness"], default="exhaustive")
    p.add_argument("--witness-ms", default=None, help="range lo:hi for the signed-indicator witness (rot spaces)")
    p.add_argument("--slope-tol", type=float, default=0.12)

    p = _sub(subs, "dirichlet", cmd_dirichlet, "growth of Dirichlet-kernel coefficient sums")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--mmax", type=int, default=200)
    p.add_argument("--mmin", type=int, default=4)
    p.add_argument("--slope-tol", type=float, default=0.1)

    p = _sub(subs, "dkk-build", cmd_dkk_build, "finite-scale conditional almost greedy basis")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--jmax", type=int, default=3)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--mmax", type=int, default=4)

    p = _sub(subs, "haar-spread", cmd_haar_spread, "spread-out Haar subsystems vs l_p")
    p.add_argument("--u", type=int, default=0)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--draws", type=int, default=500)
    p.add_argument("--K", type=int, default=60)

    p = _sub(subs, "continuum", cmd_continuum, "continuum family of growth functions")
    p.add_argument("--prefixes", type=int, default=50)
    p.add_argument("--jmax", type=int, default=12)

    p = _sub(subs, "square-split", cmd_square_split, "odd/even splitting of Tsirelson vectors")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--baseline", default=None, help="JSON file with a recorded 'constant'")

    p = _sub(subs, "iso-ratio", cmd_iso_ratio, "block reindexing into l_p blocks")
    p.add_argument("--phi", default="fgh(1)", help="block dimensions: fgh(n), id, const(c) or a list")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--samples", type=int, default=200)

    p = _sub(subs, "oracle-check", cmd_oracle_check, "dynamic program vs brute force")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--cases", type=int, default=200)
    return parser


def read_config(path) -> list[str]:
    """Turn ``key = value`` lines into flags; ``command``/``experiment`` names the subcommand."""
    args, command = [], None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key in ("command", "experiment"):
            command = value
        else:
            args += [f"--{key}", value]
    return ([command] if command else []) + args


def _expand(argv: list[str]) -> list[str]:
    argv = list(argv)
    path = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
            del argv[i:i + 2]
            break
        if a.startswith("--config="):
            path = a.split("=", 1)[1]
            del argv[i]
            break
    if path is None:
        return argv
    cfg = read_config(path)
    if cfg and not cfg[0].startswith("--"):
        command, flags = cfg[0], cfg[1:]
        if argv and not argv[0].startswith("-"):
            if argv[0] != command:
                raise ConfigError(f"config names {command!r} but the command line says {argv[0]!r}")
            argv = argv[1:]
        return [command] + flags + argv
    if not argv:
        raise ConfigError("no subcommand given")
    return [argv[0]] + cfg + argv[1:]


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_expand(argv))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command", "config")}
    rep = Report(args.experiment, config)
    try:
        args.func(args, rep)
    except (ConfigError, DescriptorError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rep.write(args.out)
    for name, ok in rep.invariants.items():
        if not ok:
            print(f"invariant violated: {name}", file=sys.stderr)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
