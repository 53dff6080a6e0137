"""Expected report for `tickbound analyze two_tick.csv --window 1 --lag 0.5`.

Every statistic is evaluated by brute force in exact rational arithmetic from
the tick list below; nothing is shared with the C++ implementation.
Run from this directory: python3 make_golden.py > two_tick.report.json
"""
import json
from fractions import Fraction as F

TICKS = [(F(1, 4), F(12), F(3)), (F(3, 4), F(2), F(1))]
LAG = F(1, 2)


def mean(xs):
    return sum(xs) / len(xs)


def raw(xs, k):
    return mean([x**k for x in xs])


def var(xs):
    m = mean(xs)
    return mean([(x - m) ** 2 for x in xs])


def cov(a, b):
    return mean([x * y for x, y in zip(a, b)]) - mean(a) * mean(b)


def ratio_stats(num, den, with_weighted):
    q = [n / d for n, d in zip(num, den)]
    w2 = sum(d * d for d in den)
    a1 = sum(num) / sum(den)
    vol = sum((x - a1) ** 2 * d * d for x, d in zip(q, den)) / w2
    out = {"mean": a1, "volatility": vol, "second_moment": vol + a1 * a1, "cv_sq": vol / (a1 * a1)}
    if with_weighted:
        out["weighted_price_m1"] = sum(x * d * d for x, d in zip(q, den)) / w2
        out["weighted_price_m2"] = sum(x * x * d * d for x, d in zip(q, den)) / w2
    return out


def gap(_a, _b):
    return {"second_moment_abs": 0, "second_moment_rel": 0, "volatility_abs": 0, "volatility_rel": 0}


def moments(c, u, u_name):
    return {
        "n": len(c),
        "value_moments": [raw(c, k) for k in range(1, 5)],
        u_name + "_moments": [raw(u, k) for k in range(1, 5)],
        "cross_mean": mean([x * y for x, y in zip(c, u)]),
        "value_volatility": var(c),
        u_name + "_volatility": var(u),
        "covariance": cov(c, u),
    }


def to_json(x):
    if isinstance(x, dict):
        return {k: to_json(v) for k, v in x.items()}
    if isinstance(x, list):
        return [to_json(v) for v in x]
    if isinstance(x, F):
        return float(x)
    return x


def main():
    c = [t[1] for t in TICKS]
    u = [t[2] for t in TICKS]
    price = ratio_stats(c, u, True)

    # Past price: latest tick at or before t - lag.
    lagged = []
    for t, value, volume in TICKS:
        past = [p for p in TICKS if p[0] <= t - LAG]
        if past:
            p = past[-1]
            lagged.append((value, p[1] / p[2] * volume))
    rc = [x[0] for x in lagged]
    ro = [x[1] for x in lagged]
    ret = ratio_stats(rc, ro, False)

    report = {
        "schema": "tickbound.report/1",
        "engine_version": "1.0.0",
        "command": "analyze",
        "provenance": {"source": "external input"},
        "warnings": ["1 tick(s) without a past price at this lag"],
        "window": {"center": F(1, 2), "width": 1, "lo": 0, "hi": 1},
        "moments": moments(c, u, "volume"),
        "price": {"direct": price, "closed_form": price, "path_gap": gap(price, price)},
        "returns": {
            "status": "ok",
            "lag": LAG,
            "resolved": len(lagged),
            "unresolved": len(TICKS) - len(lagged),
            "moments": moments(rc, ro, "past_value"),
            "direct": ret,
            "closed_form": ret,
            "path_gap": gap(ret, ret),
        },
        "gaussian": {
            "price": {"kind": "normal", "mean": price["mean"], "variance": price["volatility"]},
            "return": {"kind": "point_mass", "mean": ret["mean"], "variance": 0, "degenerate": "zero variance"},
        },
    }
    print(json.dumps(to_json(report), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
