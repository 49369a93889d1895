"""Hodge decomposition of edge flows and arbitrage-free exchange rates."""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import FlowNetwork, curl_matrix, incidence_matrix
from .solvers import box_qp, lsqr


@dataclass(frozen=True)
class HodgeComponents:
    gradient: np.ndarray
    curl_component: np.ndarray
    harmonic: np.ndarray
    potentials: np.ndarray
    triangle_weights: np.ndarray


def hodge_decompose(net: FlowNetwork, f, tol: float = 1e-12) -> HodgeComponents:
    """Split ``f`` into gradient ``B^T y``, curl ``C w`` and harmonic parts.

    ``y`` and ``w`` come from two least-squares solves; the potentials are
    only defined up to a constant per component.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (net.m,):
        raise ValueError(f"flow has shape {f.shape}, expected ({net.m},)")
    B = incidence_matrix(net)
    y, _ = lsqr(B.T, f, tol=tol)
    grad = B.T @ y
    r = f - grad
    if net.o:
        C = curl_matrix(net)
        w, _ = lsqr(C, r, tol=tol)
        curl_part = C @ w
    else:
        w = np.zeros(0)
        curl_part = np.zeros(net.m)
    return HodgeComponents(grad, curl_part, r - curl_part, y, w)


class MarketError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ExchangeMarket:
    """Bid/mid/ask quotes on a complete currency network.

    Currency ``k`` is vertex ``k`` of ``net``. For edge ``(A, B)`` with ``A``
    listed first, the flows hold ``log`` of the rate ``A/B`` (units of ``B``
    per unit of ``A``).
    """

    currencies: tuple[str, ...]
    net: FlowNetwork
    f_bid: np.ndarray
    f_mid: np.ndarray
    f_ask: np.ndarray

    def flow(self, which: str = "mid") -> np.ndarray:
        return {"bid": self.f_bid, "mid": self.f_mid, "ask": self.f_ask}[which]

    def index(self, name: str) -> int:
        try:
            return self.currencies.index(name)
        except ValueError:
            raise MarketError(f"unknown currency {name!r}") from None


def make_market(quotes, currencies=None, rtol: float = 1e-9) -> ExchangeMarket:
    """Build a market from ``(base, quote, bid, mid, ask)`` tuples of raw rates.

    A quote ``B/A`` for a pair whose canonical direction is ``A/B`` is
    inverted (bid and ask swap). When both directions are quoted the mids
    must agree within ``rtol`` in log space and the tighter bounds win.
    Every pair of currencies must be quoted.
    """
    quotes = list(quotes)
    if currencies is None:
        currencies = []
        for q in quotes:
            for name in q[:2]:
                if name not in currencies:
                    currencies.append(name)
    currencies = tuple(currencies)
    pos = {c: k for k, c in enumerate(currencies)}
    k = len(currencies)
    if k < 2:
        raise MarketError("need at least two currencies")
    net = FlowNetwork(k, tuple(itertools.combinations(range(k), 2)))
    lo = np.full(net.m, -np.inf)
    hi = np.full(net.m, np.inf)
    mid = np.full(net.m, np.nan)
    for base, quote, bid, m_, ask in quotes:
        if base == quote:
            raise MarketError(f"self quote {base}/{quote}")
        if base not in pos or quote not in pos:
            raise MarketError(f"unknown currency in {base}/{quote}")
        bid, m_, ask = float(bid), float(m_), float(ask)
        if min(bid, m_, ask) <= 0:
            raise MarketError(f"non-positive rate for {base}/{quote}")
        r, sign = net.edge_id(pos[base], pos[quote])
        lb, lm, la = math.log(bid), math.log(m_), math.log(ask)
        if sign < 0:
            lb, lm, la = -la, -lm, -lb
        if not np.isnan(mid[r]):
            if abs(mid[r] - lm) > rtol:
                raise MarketError(f"inconsistent mids for {base}/{quote}")
        else:
            mid[r] = lm
        lo[r] = max(lo[r], lb)
        hi[r] = min(hi[r], la)
    missing = np.flatnonzero(np.isnan(mid))
    if missing.size:
        i, j = net.edges[missing[0]]
        raise MarketError(
            f"market is not complete: no quote for {currencies[i]}/{currencies[j]}"
        )
    bad = [net.edges[r] for r in np.flatnonzero(lo > hi)]
    if bad:
        names = ", ".join(f"{currencies[i]}/{currencies[j]}" for i, j in bad)
        raise MarketError(f"bid above ask for {names}")
    outside = [net.edges[r] for r in np.flatnonzero((mid < lo) | (mid > hi))]
    if outside:
        names = ", ".join(f"{currencies[i]}/{currencies[j]}" for i, j in outside)
        raise MarketError(f"mid outside [bid, ask] for {names}")
    return ExchangeMarket(currencies, net, lo, mid, hi)


def read_market(path) -> ExchangeMarket:
    """Read a CSV with header ``base,quote,bid,mid,ask``."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.DictReader(fh)]
    if not rows:
        raise MarketError(f"{path}: no quotes")
    try:
        quotes = [(r["base"].strip(), r["quote"].strip(), r["bid"], r["mid"], r["ask"])
                  for r in rows]
    except KeyError as exc:
        raise MarketError(f"{path}: missing column {exc.args[0]}") from None
    return make_market(quotes)


def pricing_objective(market: ExchangeMarket, f, lam: float) -> float:
    f = np.asarray(f, dtype=float)
    cf = curl_matrix(market.net).T @ f
    d = f - market.f_mid
    return float(cf @ cf + lam**2 * (d @ d))


def price_arbitrage_free(market: ExchangeMarket, lam: float = 1e-3,
                         tol: float = 1e-12) -> np.ndarray:
    """Fair log-rates: minimize ``||C^T f||^2 + lam^2 ||f - f_mid||^2``
    subject to ``f_bid <= f <= f_ask``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    C = curl_matrix(market.net)
    m = market.net.m
    CCt = (C @ C.T).tocsr()
    Q = 2.0 * (CCt + lam**2 * sp.identity(m, format="csr"))
    c = -2.0 * lam**2 * market.f_mid
    return box_qp(spla.aslinearoperator(Q), c, market.f_bid, market.f_ask,
                  tol=tol, x0=market.f_mid)


def arbitrage_gain(market: ExchangeMarket, cycle, f=None) -> float:
    """Product of rates around ``cycle`` (currency names or vertex indices).

    The cycle is closed automatically. 1.0 means no gain.
    """
    f = market.f_mid if f is None else np.asarray(f, dtype=float)
    idx = [market.index(v) if isinstance(v, str) else int(v) for v in cycle]
    if len(idx) < 2:
        raise MarketError("cycle needs at least two currencies")
    total = 0.0
    for a, b in zip(idx, idx[1:] + idx[:1]):
        if a == b:
            raise MarketError("consecutive repeated currency in cycle")
        try:
            r, sign = market.net.edge_id(a, b)
        except KeyError:
            raise MarketError(f"no quote between {a} and {b}") from None
        total += sign * f[r]
    return math.exp(total)


def triangle_gains(market: ExchangeMarket, f=None) -> np.ndarray:
    """Gain around every triangle ``(i, j, k)`` in the direction i->j->k->i."""
    f = market.f_mid if f is None else np.asarray(f, dtype=float)
    return np.exp(curl_matrix(market.net).T @ f)
