"""Command line entry point.

    toroidal trace     --q 101 --kind kl --k 2 --out kl2.csv
    toroidal lvalues   --q 101
    toroidal classify  --a 2 --b 1 --k 1
    toroidal moment    --a 1 --b -1 --k 0 --primes 503,1009,2003
    toroidal nonvanish --a 1 --b 2 --interval 0,3.14159 --primes 1009
    toroidal verify    --suite pierce
    toroidal decay     --a 2 --b -3 --kind eq --primes 503,1009,2003
    toroidal replay    run.manifest.json

Tables go to CSV (``--out`` or stdout) with ``#`` header lines; verdicts go
to JSON.  Each run writes a manifest next to ``--out`` (or to stderr) so it
can be replayed.  Exit codes: 0 ok, 2 bad input, 3 identity residual above
tolerance, 4 resource bound exceeded.  ``TOROIDAL_THREADS`` sets the worker
count for prime ladders; ``--config FILE`` presets options from key=value
lines and explicit flags override it.
"""

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .errors import IdentityBreach, TooLarge, ToroidalError

EXIT_OK, EXIT_INPUT, EXIT_BREACH, EXIT_RESOURCE = 0, 2, 3, 4


def fmt(x):
    return format(float(x), ".17g")


def _ints(text):
    return [int(t) for t in str(text).split(",") if t.strip()]


def _floats(text):
    return [float(t) for t in str(text).split(",") if t.strip()]


def read_config(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ToroidalError(f"config line without '=': {line!r}")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


# ---------------------------------------------------------------- output

class Output:
    """Collects one run's emitted text and writes it with its manifest."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = argv
        self.path = getattr(args, "out", None)
        self.start = time.perf_counter()

    @property
    def manifest_path(self):
        return self.path + ".manifest.json" if self.path else None

    def manifest_ref(self):
        return self.manifest_path.rsplit("/", 1)[-1] if self.path else "stderr"

    def emit(self, text):
        if self.path:
            with open(self.path, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        params = {k: v for k, v in vars(self.args).items() if k != "func"}
        manifest = {
            "command": self.args.command, "params": params, "argv": self.argv,
            "seed": params.get("seed"), "version": __version__,
            "wall_time": time.perf_counter() - self.start,
            "outputs": [self.path] if self.path else ["stdout"],
        }
        text = json.dumps(manifest, indent=2, sort_keys=True, default=str)
        if self.path:
            with open(self.manifest_path, "w") as fh:
                fh.write(text + "\n")
        else:
            sys.stderr.write(text + "\n")


def csv_text(header, columns, rows):
    buf = io.StringIO()
    for k, v in header:
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


# ---------------------------------------------------------------- commands

def cmd_trace(args, out):
    from .ffield import build_context
    from .tracefn import hyp_table, k_ab_table, kl_table
    ctx = build_context(args.q)
    if args.kind == "kl":
        table = kl_table(ctx, args.k, naive=args.naive)
    elif args.kind == "kab":
        table = k_ab_table(ctx, args.a, args.b, args.k, naive=args.naive)
    else:
        table = hyp_table(ctx, _ints(args.chi_indices or ""), _ints(args.theta_indices or ""),
                          naive=args.naive)
    z = table.value_at_zero
    zero = "undefined" if z is None else f"{fmt(complex(z).real)},{fmt(complex(z).imag)}"
    header = [("label", table.label), ("q", ctx.q), ("g", ctx.g),
              ("normalization", table.normalization),
              ("value_at_zero", f"{zero} ({table.zero_flag})"),
              ("weight_bound", table.weight_bound), ("manifest", out.manifest_ref())]
    rows = [(u, float(v.real), float(v.imag)) for u, v in zip(range(1, ctx.q), table.values)]
    out.emit(csv_text(header, ["u", "re", "im"], rows))
    return EXIT_OK


def cmd_lvalues(args, out):
    from .ffield import build_context
    from .lmoments import l_values_half
    tab = l_values_half(build_context(args.q))
    rows = [(j, float(L.real), float(L.imag), float(th), par) for j, L, th, par in tab.rows()]
    header = [("q", args.q), ("g", tab.ctx.g), ("manifest", out.manifest_ref())]
    out.emit(csv_text(header, ["j", "re_L", "im_L", "theta", "parity"], rows))
    return EXIT_OK


def cmd_classify(args, out):
    from .ffield import build_context
    from .sheafclass import classify, smallest_admissible_prime
    q = smallest_admissible_prime(args.a, args.b, args.k) if str(args.q) == "auto" else int(args.q)
    v = classify(build_context(q), args.a, args.b, args.k)
    d = v.to_dict()
    d["g0"] = v.g0_candidates
    d["gallant"] = {"yes": True, "no": False}.get(v.gallant, v.gallant)
    d["fallback_verdict"] = d.pop("fallback")
    d["fallback"] = (f"({','.join(map(str, v.fallback.tuple))})->{v.fallback.g0_label}"
                     if v.fallback else None)
    d["manifest"] = out.manifest_ref()
    out.emit(json.dumps(d, indent=2, sort_keys=True, default=str) + "\n")
    return EXIT_OK


def _parse_mollify(text):
    if not text:
        return None
    parts = str(text).split(",")
    theta = float(parts[0])
    coeffs = [float(c) for c in parts[1].split(":")] if len(parts) > 1 else [0.0, 0.0, 1.0]
    return theta, coeffs


def _xi(args, q):
    if args.l1 is not None or args.l2 is not None:
        l1, l2 = args.l1 or 1, args.l2 or 1
        return pow(l1, args.a, q) * pow(l2, args.b, q) % q
    return args.xi % q


def _ladder(fn, primes):
    from concurrent.futures import ThreadPoolExecutor
    from .lmoments.moments import thread_count
    with ThreadPoolExecutor(thread_count()) as ex:
        return list(ex.map(fn, primes))


def cmd_moment(args, out):
    from numpy.polynomial import Polynomial
    from .ffield import build_context
    from .lmoments import moment, mollified_moment, q4_moment
    primes = _ints(args.primes)
    moll = _parse_mollify(args.mollify)

    def one(q):
        ctx = build_context(q)
        xi = _xi(args, q)
        if moll is None:
            m = moment(ctx, args.a, args.b, args.k, xi)
            return (q, float(m.real), float(m.imag))
        L = q ** moll[0]
        P = Polynomial(moll[1])
        m = mollified_moment(ctx, args.a, args.b, args.k, L, P)
        return (q, float(m.real), float(m.imag), float(L), q4_moment(ctx, args.a, args.b, L, P))

    rows = _ladder(one, primes)
    cols = ["q", "re", "im"] + (["L", "q4"] if moll else [])
    header = [("moment", f"M_{{{args.a},{args.b},{args.k}}}"), ("mollify", args.mollify),
              ("normalization", "(q-1)^-1 sum over non-trivial chi"),
              ("manifest", out.manifest_ref())]
    out.emit(csv_text(header, cols, rows))
    return EXIT_OK


def cmd_nonvanish(args, out):
    from numpy.polynomial import Polynomial
    from .ffield import build_context
    from .lmoments import certificate
    from .lmoments.lvalues import central_values
    lo, hi = _floats(args.interval)
    P = Polynomial(_floats(args.poly))

    def one(q):
        ctx = build_context(q)
        L = q ** args.L
        c = certificate(ctx, args.a, args.b, L, (lo, hi), P, margin=args.margin)
        Lv = central_values(ctx)
        n = q - 1
        j = np.arange(1, n)
        mins = float(min(np.abs(Lv[(args.a * j) % n]).min(), np.abs(Lv[(args.b * j) % n]).min()))
        return (q, lo, hi, float(L), c["E"], c["bound"], c["certificate"],
                float(c["D"].real), float(c["D"].imag), c["Q4"], mins)

    rows = _ladder(one, _ints(args.primes))
    cols = ["q", "lo", "hi", "L", "E", "E_over_q1", "certificate", "D_re", "D_im", "Q4",
            "min_abs_L"]
    header = [("a", args.a), ("b", args.b), ("tau0", "1e-8*sqrt(log q)"),
              ("minorant", f"raised cosine, margin {args.margin}"),
              ("manifest", out.manifest_ref())]
    out.emit(csv_text(header, cols, rows))
    for r in rows:
        if r[6] > r[5] * (1 + 1e-12):
            raise IdentityBreach("certificate", r[6] - r[5], 0.0)
    return EXIT_OK


def cmd_decay(args, out):
    from .bilinear import decay_profile
    rows = decay_profile(args.a, args.b, args.k, args.kind, _ints(args.primes),
                         draws=args.draws, seed=args.seed, divisor=args.divisor)
    header = [("kernel", args.kind), ("a", args.a), ("b", args.b), ("k", args.k),
              ("seed", args.seed), ("draws", args.draws), ("pole_convention", "zero"),
              ("manifest", out.manifest_ref())]
    out.emit(csv_text(header, ["q", "M", "N", "normalized", "fitted", "predicted"],
                      [(r.q, r.M, r.N, r.normalized, r.fitted, r.predicted) for r in rows]))
    return EXIT_OK


def verify_suite(name):
    """Yield (label, residual, tolerance) for one exact-identity suite."""
    from .ffield import build_context
    if name == "hd":
        from .tracefn import hasse_davenport_residual
        for q, N in ((13, 3), (13, 4), (31, 5)):
            yield f"hd q={q} N={N}", hasse_davenport_residual(build_context(q), N)[1], 1e-8
    elif name == "hyp":
        from .tracefn import hyp_identity_residual
        for q in (13, 31):
            for abk in ((2, 3, 1), (2, -3, 1), (2, 3, 2)):
                yield f"hyp q={q} {abk}", hyp_identity_residual(build_context(q), *abk), 1e-8
    elif name == "poisson":
        from .tracefn import poisson_residual
        for abk in ((2, -3, 2), (1, 1, 1), (-1, -1, 2)):
            yield f"poisson q=101 {abk}", poisson_residual(build_context(101), *abk), 1e-8
    elif name == "pierce":
        from .bilinear import pierce_exhaustive
        for q, l, b in ((11, 3, 3), (11, 3, -3)):
            total, bad, _ = pierce_exhaustive(q, l, b)
            yield f"pierce q={q} l={l} b={b} ({total} vectors)", float(bad), 0.5
    elif name == "afe":
        from .lmoments import afe_crosscheck
        for q in (211, 503):
            r = afe_crosscheck(build_context(q), 2, 3, 1)
            yield f"afe q={q} (2,3,1) decomposition={r.residual:.3e}", r.exact_residual, 1e-7
    elif name == "fe-phase":
        from .lmoments import fe_phase_residual, pin_fe_phase
        from .lmoments.lvalues import PHASE_POWER, PHASE_SIGN
        pinned = pin_fe_phase(5)
        yield "fe-phase pin q=5", float(pinned != (PHASE_SIGN, PHASE_POWER)), 0.5
        for q in (101, 1009):
            yield f"fe-phase q={q}", fe_phase_residual(build_context(q)), 1e-8
    else:
        raise ToroidalError(f"unknown suite {name}")


SUITES = ["hd", "hyp", "poisson", "pierce", "afe", "fe-phase"]


def cmd_verify(args, out):
    names = SUITES if args.suite == "all" else [args.suite]
    rows = []
    worst = None
    for name in names:
        for label, res, tol in verify_suite(name):
            ok = res < tol
            rows.append((name, label, float(res), float(tol), "ok" if ok else "BREACH"))
            if not ok and worst is None:
                worst = (label, res, tol)
    out.emit(csv_text([("manifest", out.manifest_ref())],
                      ["suite", "check", "residual", "tol", "status"], rows))
    if worst:
        raise IdentityBreach(*worst)
    return EXIT_OK


def cmd_replay(args, out):
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    return main(manifest["argv"])


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="toroidal", description=__doc__.split("\n")[0])
    p.add_argument("--config", help="key=value file presetting option defaults")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("trace", help="tabulate a trace function")
    t.add_argument("--q", type=int, required=True)
    t.add_argument("--kind", choices=["kl", "kab", "hyp"], default="kl")
    t.add_argument("--a", type=int, default=1)
    t.add_argument("--b", type=int, default=1)
    t.add_argument("--k", type=int, default=2)
    t.add_argument("--chi-indices", dest="chi_indices")
    t.add_argument("--theta-indices", dest="theta_indices")
    t.add_argument("--naive", action="store_true")
    t.add_argument("--out")
    t.set_defaults(func=cmd_trace)

    lv = sub.add_parser("lvalues", help="central values and Gauss-sum angles per character")
    lv.add_argument("--q", type=int, required=True)
    lv.add_argument("--out")
    lv.set_defaults(func=cmd_lvalues)

    c = sub.add_parser("classify", help="monodromy verdict for (a, b, k)")
    c.add_argument("--a", type=int, required=True)
    c.add_argument("--b", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--q", default="auto")
    c.add_argument("--out")
    c.set_defaults(func=cmd_classify)

    m = sub.add_parser("moment", help="prime ladder of twisted moments")
    m.add_argument("--a", type=int, required=True)
    m.add_argument("--b", type=int, required=True)
    m.add_argument("--k", type=int, default=0)
    m.add_argument("--xi", type=int, default=1)
    m.add_argument("--l1", type=int)
    m.add_argument("--l2", type=int)
    m.add_argument("--primes", default="503,1009,2003")
    m.add_argument("--mollify", help="THETA[,c0:c1:...]: L = q^THETA, P coefficients")
    m.add_argument("--out")
    m.set_defaults(func=cmd_moment)

    n = sub.add_parser("nonvanish", help="nonvanishing count and certificate")
    n.add_argument("--a", type=int, required=True)
    n.add_argument("--b", type=int, required=True)
    n.add_argument("--interval", default="0,3.141592653589793")
    n.add_argument("--L", type=float, default=0.1, help="mollifier length exponent")
    n.add_argument("--poly", default="0,0,1")
    n.add_argument("--margin", type=float, default=0.0)
    n.add_argument("--primes", default="1009")
    n.add_argument("--out")
    n.set_defaults(func=cmd_nonvanish)

    v = sub.add_parser("verify", help="run an exact-identity suite")
    v.add_argument("--suite", choices=SUITES + ["all"], default="all")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("decay", help="decay profile of normalized type-I sums")
    d.add_argument("--a", type=int, required=True)
    d.add_argument("--b", type=int, required=True)
    d.add_argument("--k", type=int, default=0)
    d.add_argument("--kind", choices=["eq", "kl", "kab"], default="eq")
    d.add_argument("--primes", default="503,1009,2003")
    d.add_argument("--draws", type=int, default=20)
    d.add_argument("--seed", type=int, default=20240601)
    d.add_argument("--divisor", action="store_true")
    d.add_argument("--out")
    d.set_defaults(func=cmd_decay)

    r = sub.add_parser("replay", help="re-run the command stored in a manifest")
    r.add_argument("manifest")
    r.set_defaults(func=cmd_replay)
    return p, sub


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, sub = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            cfg = read_config(known.config)
            for sp in sub.choices.values():
                for action in sp._actions:
                    if action.dest in cfg:
                        action.required = False
                sp.set_defaults(**{k: v for k, v in cfg.items()
                                   if k in {a.dest for a in sp._actions}})
        args = parser.parse_args(argv)
        if args.command == "replay":
            return cmd_replay(args, None)
        return args.func(args, Output(args, argv))
    except TooLarge as e:
        print(f"TooLarge: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except IdentityBreach as e:
        print(f"IdentityBreach: {e}", file=sys.stderr)
        return EXIT_BREACH
    except ToroidalError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT
