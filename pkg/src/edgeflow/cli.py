"""Command-line interface: ``edgeflow <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from . import io
from .active import select
from .experiments import (SynthConfig, label_count, parse_ratios, pearson,
                          relative_l2, run_sweep, synth_flow)
from .hodge import (arbitrage_gain, pricing_objective, price_arbitrage_free,
                    read_market, triangle_gains)
from .spectral import compute_basis, spectral_ratio, spectrum_rows
from .ssl import METHODS, LabelSet, SSLConfig, infer

log = logging.getLogger("edgeflow")


def _out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def cmd_infer(args):
    net = io.read_graph(args.graph)
    idx, vals = io.read_flows(args.flows, net)
    if args.labels:
        chosen = io.read_labels(args.labels, net.m)
        lookup = dict(zip(idx.tolist(), vals.tolist()))
        missing = [r + 1 for r in chosen if r not in lookup]
        if missing:
            raise SystemExit(f"labeled edges without a measurement: {missing[:10]}")
        labels = LabelSet(net.m, chosen, [lookup[r] for r in chosen])
    else:
        labels = LabelSet(net.m, idx, vals)
    cfg = SSLConfig(lam=args.lam, tol=args.tol, max_iter=args.max_iter)
    pred = infer(args.method, net, labels, cfg)
    if args.out:
        io.write_flows(args.out, net, pred)
    else:
        _print_flows(net, pred)
    summary = f"method={args.method} m={net.m} labeled={labels.indices.size}"
    if idx.size == net.m:
        truth = np.empty(net.m)
        truth[idx] = vals
        scope = labels.unlabeled if args.unlabeled_only else np.arange(net.m)
        try:
            summary += f" rho={pearson(pred[scope], truth[scope])!r}"
        except ValueError as exc:
            summary += f" rho=nan ({exc})"
        summary += f" rel_l2={relative_l2(pred[scope], truth[scope])!r}"
    print(summary, file=sys.stderr if not args.out else sys.stdout)


def _print_flows(net, f):
    ids = net.vertex_ids
    for (i, j), v in zip(net.edges, f):
        print(f"{ids[i]} {ids[j]} {io.format_value(v)}")


def cmd_select(args):
    net = io.read_graph(args.graph)
    budget = args.budget
    if budget is None:
        if args.ratio is None:
            raise SystemExit("give --budget or --ratio")
        budget = label_count(net.m, args.ratio)
    sel = select(args.method, net, budget, seed=args.seed, embed_dim=args.embed_dim)
    fh, own = _out(args.out)
    try:
        for r in sel.indices:
            fh.write(f"{int(r) + 1}\n")
    finally:
        if own:
            fh.close()


def cmd_synth(args):
    net = io.read_graph(args.graph)
    f = synth_flow(compute_basis(net), SynthConfig(b=args.b, eps=args.eps))
    if args.out:
        io.write_flows(args.out, net, f)
    else:
        _print_flows(net, f)


def cmd_eval(args):
    net = io.read_graph(args.graph)
    truth = io.read_full_flow(args.flows, net)
    pred = io.read_full_flow(args.pred, net)
    scope = np.arange(net.m)
    if args.labels and args.unlabeled_only:
        lab = io.read_labels(args.labels, net.m)
        scope = np.setdiff1d(scope, lab)
    print(f"rho={pearson(pred[scope], truth[scope])!r} "
          f"rel_l2={relative_l2(pred[scope], truth[scope])!r}")


def cmd_sweep(args):
    net = io.read_graph(args.graph)
    if args.flows:
        truth = io.read_full_flow(args.flows, net)
    else:
        truth = synth_flow(compute_basis(net), SynthConfig(b=args.b, eps=args.eps))
    cfg = SSLConfig(lam=args.lam, tol=args.tol)
    res = run_sweep(
        net, truth,
        methods=args.methods.split(","),
        selections=args.selections.split(","),
        ratios=parse_ratios(args.ratios),
        trials=args.trials,
        cfg=cfg,
        seeds=range(args.seed, args.seed + args.trials),
        embed_dim=args.embed_dim,
        on_error=lambda cell, exc: log.warning("cell %s failed: %s", cell, exc),
    )
    fh, own = _out(args.out)
    try:
        res.write_csv(fh, timing=args.timing)
    finally:
        if own:
            fh.close()
    if args.summary:
        for (method, selection, ratio), (mean, se, k) in res.summary().items():
            print(f"{method},{selection},{ratio!r},{mean:.6f},{se:.6f},{k}",
                  file=sys.stderr)


def cmd_spectrum(args):
    net = io.read_graph(args.graph)
    basis = compute_basis(net)
    f = io.read_full_flow(args.flows, net)
    fh, own = _out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["percentile", "sigma", "abs_p_normalized"])
        for row in spectrum_rows(basis, f):
            w.writerow([repr(x) for x in row])
    finally:
        if own:
            fh.close()
    if basis.c:
        print(f"spectral_ratio={spectral_ratio(basis, f)!r}", file=sys.stderr)


def cmd_price(args):
    market = read_market(args.market)
    fair = price_arbitrage_free(market, args.lam)
    names = market.currencies
    fh, own = _out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["base", "quote", "bid", "mid", "ask", "fair"])
        for r, (i, j) in enumerate(market.net.edges):
            w.writerow([names[i], names[j]] + [
                repr(float(np.exp(v[r])))
                for v in (market.f_bid, market.f_mid, market.f_ask, fair)])
    finally:
        if own:
            fh.close()
    mid_g = triangle_gains(market)
    fair_g = triangle_gains(market, fair)
    curl_mid = float(np.abs(np.log(mid_g)).max()) if mid_g.size else 0.0
    curl_fair = float(np.abs(np.log(fair_g)).max()) if fair_g.size else 0.0
    rep = sys.stderr if not args.out else sys.stdout
    print(f"objective_mid={pricing_objective(market, market.f_mid, args.lam)!r} "
          f"objective_fair={pricing_objective(market, fair, args.lam)!r}", file=rep)
    print(f"max_abs_curl_mid={curl_mid!r} max_abs_curl_fair={curl_fair!r}", file=rep)
    if args.triangles:
        for (i, j, k), g0, g1 in zip(market.net.triangles, mid_g, fair_g):
            print(f"triangle {names[i]}->{names[j]}->{names[k]} "
                  f"gain_mid={float(g0)!r} gain_fair={float(g1)!r}", file=rep)
    if args.cycle:
        cyc = args.cycle.split(",")
        print(f"cycle {'->'.join(cyc)} gain_mid={arbitrage_gain(market, cyc)!r} "
              f"gain_fair={arbitrage_gain(market, cyc, fair)!r}", file=rep)


def cmd_ingest_seq(args):
    net, flow, tokens = io.ingest_play_sequence(args.plays, args.mode)
    header = "\n".join(f"vertex {vid} {tok}" for vid, tok in zip(net.vertex_ids, tokens))
    io.write_graph(args.out_graph, net, header=header)
    io.write_flows(args.out_flows, net, flow)
    print(f"n={net.n} m={net.m}")


def cmd_ingest_tntp(args):
    flows = io.read_tntp_flows(args.tntp)
    net = io.build_network(sorted(flows), warn_disconnected=True)
    lookup = {v: k for k, v in enumerate(net.vertex_ids)}
    f = np.zeros(net.m)
    for (a, b), val in flows.items():
        r, sign = net.edge_id(lookup[a], lookup[b])
        f[r] = sign * val
    io.write_graph(args.out_graph, net)
    io.write_flows(args.out_flows, net, f)
    print(f"n={net.n} m={net.m}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="edgeflow", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("infer", help="infer unlabeled edge flows")
    s.add_argument("--graph", required=True)
    s.add_argument("--flows", required=True,
                   help="measured flows; a complete file doubles as ground truth")
    s.add_argument("--labels", help="label-index file; default: edges in --flows")
    s.add_argument("--lambda", dest="lam", type=float, default=0.1)
    s.add_argument("--method", choices=sorted(METHODS), default="flowssl")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--max-iter", type=int)
    s.add_argument("--unlabeled-only", action="store_true",
                   help="score only unlabeled edges")
    s.add_argument("--out")
    s.set_defaults(func=cmd_infer)

    s = sub.add_parser("select", help="choose edges to label")
    s.add_argument("--graph", required=True)
    s.add_argument("--budget", type=int)
    s.add_argument("--ratio", type=float)
    s.add_argument("--method", choices=["rrqr", "rb", "random"], default="rrqr")
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--embed-dim", type=int, default=2)
    s.add_argument("--out")
    s.set_defaults(func=cmd_select)

    s = sub.add_parser("synth", help="synthetic flow with damped inverse spectrum")
    s.add_argument("--graph", required=True)
    s.add_argument("--b", type=float, default=0.02)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("eval", help="correlate a predicted flow with ground truth")
    s.add_argument("--graph", required=True)
    s.add_argument("--flows", required=True)
    s.add_argument("--pred", required=True)
    s.add_argument("--labels")
    s.add_argument("--unlabeled-only", action="store_true")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="label-ratio experiment, CSV output")
    s.add_argument("--graph", required=True)
    s.add_argument("--flows", help="ground truth; default: synthetic flow")
    s.add_argument("--ratios", default="0.1:0.1:0.9")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, default=1, help="first seed")
    s.add_argument("--methods", default="flowssl,zerofill,linegraph")
    s.add_argument("--selections", default="random")
    s.add_argument("--lambda", dest="lam", type=float, default=0.1)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--b", type=float, default=0.02)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--embed-dim", type=int, default=2)
    s.add_argument("--timing", action="store_true",
                   help="record wall-clock runtime (output is then not reproducible)")
    s.add_argument("--summary", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("spectrum", help="spectral coefficients of a flow as CSV")
    s.add_argument("--graph", required=True)
    s.add_argument("--flows", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("price", help="arbitrage-free exchange rates")
    s.add_argument("--market", required=True)
    s.add_argument("--lambda", dest="lam", type=float, default=1e-3)
    s.add_argument("--triangles", action="store_true", help="report every triangle")
    s.add_argument("--cycle", help="comma-separated currencies to report a gain for")
    s.add_argument("--out")
    s.set_defaults(func=cmd_price)

    s = sub.add_parser("ingest-seq", help="play sequence -> graph and flow files")
    s.add_argument("--plays", required=True)
    s.add_argument("--mode", choices=["song", "artist"], default="song")
    s.add_argument("--out-graph", required=True)
    s.add_argument("--out-flows", required=True)
    s.set_defaults(func=cmd_ingest_seq)

    s = sub.add_parser("ingest-tntp", help="TNTP flow file -> graph and net flow files")
    s.add_argument("--tntp", required=True)
    s.add_argument("--out-graph", required=True)
    s.add_argument("--out-flows", required=True)
    s.set_defaults(func=cmd_ingest_tntp)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    logging.captureWarnings(True)
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"edgeflow: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
