"""Command-line harness: run algorithms on files or generated instances,
verify against the centralized oracles, benchmark round scaling, and query
the complexity planner.

Exit codes: 0 = pass, 1 = verification failure, 2 = usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import random
import sys
from typing import Optional

import numpy as np

from . import __version__, detinv, distprod, graphs, krylov, mm, oracles, planner
from .ff import next_prime_at_least
from .minplus import INF, INF_THRESHOLD, format_entry
from .sim import CliqueWorld

ALGORITHMS = (
    "mm", "distprod", "det", "inverse", "minpol", "solve", "rank",
    "apsp", "apsp-zwick", "diameter", "matching-size", "allowed-edges",
    "gallai-edmonds",
)

ORACLE_SIZE_CAP = {
    "matching-size": 12, "allowed-edges": 12, "gallai-edmonds": 10,
}
DEFAULT_ORACLE_CAP = 64
MONTE_CARLO = {"minpol", "solve", "rank", "apsp-zwick", "matching-size",
               "allowed-edges", "gallai-edmonds"}


class UsageError(ValueError):
    pass


def default_prime(algorithm: str, n: int) -> int:
    if algorithm in ("matching-size", "allowed-edges", "gallai-edmonds"):
        return graphs.matching_prime(n)
    if algorithm in ("minpol", "solve", "rank"):
        return next_prime_at_least(
            max(4 * n * n * max(1, math.ceil(math.log2(max(2, n)))), n + 1))
    return next_prime_at_least(max(101, n + 1))


# ----------------------------------------------------------- instance model

class Instance:
    """One concrete problem instance plus its oracle hooks."""

    def __init__(self, algorithm: str, n: int, descriptor: str, payload: dict):
        self.algorithm = algorithm
        self.n = n
        self.descriptor = descriptor
        self.payload = payload


def parse_gen_spec(spec: str) -> dict:
    parts = spec.split(":")
    kind = parts[0]
    params = {}
    if len(parts) > 1 and parts[1]:
        for item in parts[1].split(","):
            key, _, value = item.partition("=")
            params[key] = value
    return {"kind": kind, **params}


def _rand_matrix(rng: random.Random, rows: int, cols: int, p: int) -> np.ndarray:
    return np.array([[rng.randrange(p) for _ in range(cols)] for _ in range(rows)],
                    dtype=np.int64)


def _rand_invertible(rng: random.Random, n: int, p: int) -> np.ndarray:
    while True:
        mat = _rand_matrix(rng, n, n, p)
        if oracles.det_mod(mat, p) != 0:
            return mat


def _rand_minplus(rng: random.Random, rows: int, cols: int, bound: int,
                  density: float = 0.8) -> np.ndarray:
    out = np.full((rows, cols), INF, dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            if rng.random() < density:
                out[i, j] = rng.randrange(-bound, bound + 1)
    return out


def _rand_graph(rng: random.Random, n: int, prob: float, bound: int,
                directed: bool) -> graphs.WeightedGraph:
    """Random graph; negative directed weights come from node potentials,
    which makes every cycle nonnegative by construction."""
    adj = np.full((n, n), INF, dtype=np.int64)
    np.fill_diagonal(adj, 0)
    if directed and bound >= 1:
        phi = [rng.randrange(bound) for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if i != j and rng.random() < prob:
                    adj[i, j] = rng.randrange(0, 2) + phi[i] - phi[j]
    else:
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < prob:
                    w = rng.randrange(0, bound + 1)
                    adj[i, j] = adj[j, i] = w
    return graphs.WeightedGraph(n, directed, bound, adj)


def build_instance(algorithm: str, gen: Optional[str], input_path: Optional[str],
                   seed: int, field_prime: Optional[int]) -> Instance:
    rng = random.Random(seed ^ 0x5EED)
    if input_path is not None:
        return _instance_from_file(algorithm, input_path, field_prime)
    spec = parse_gen_spec(gen) if gen else {"kind": "default"}
    kind = spec.get("kind", "default")
    n = int(spec.get("n", 8))
    if algorithm == "mm":
        m = int(spec.get("m", n))
        k = int(spec.get("k", 1))
        p = field_prime or default_prime(algorithm, n)
        mats_a = [_rand_matrix(rng, n, m, p) for _ in range(k)]
        mats_b = [_rand_matrix(rng, m, n, p) for _ in range(k)]
        return Instance(algorithm, n, f"gen:mm:n={n},m={m},k={k},p={p}",
                        {"a": mats_a, "b": mats_b, "p": p})
    if algorithm == "distprod":
        m = int(spec.get("m", n))
        bound = int(spec.get("M", 3))
        a = _rand_minplus(rng, n, m, bound)
        b = _rand_minplus(rng, m, n, bound)
        return Instance(algorithm, n, f"gen:minplus:n={n},m={m},M={bound}",
                        {"a": a, "b": b, "M": bound})
    if algorithm in ("det", "inverse", "minpol", "rank", "solve"):
        p = field_prime or default_prime(algorithm, n)
        if algorithm == "inverse" or algorithm == "solve":
            mat = _rand_invertible(rng, n, p)
        elif algorithm == "rank" and kind == "lowrank":
            r = int(spec.get("r", n // 2))
            mat = (_rand_matrix(rng, n, r, p) @ _rand_matrix(rng, r, n, p)) % p
        else:
            mat = _rand_matrix(rng, n, n, p)
        payload = {"mat": mat, "p": p}
        if algorithm == "solve":
            payload["b"] = np.array([rng.randrange(p) for _ in range(n)])
        return Instance(algorithm, n, f"gen:{kind}:n={n},p={p}", payload)
    # graph algorithms
    bound = int(spec.get("M", 1))
    directed = spec.get("directed", "0") not in ("0", "false", "no")
    if algorithm in ("apsp", "apsp-zwick", "diameter"):
        directed = directed or algorithm == "apsp-zwick"
    if kind == "path":
        graph = graphs.WeightedGraph.from_edges(
            n, [(i, i + 1, 1) for i in range(1, n)], directed=False, bound=1)
        desc = f"gen:path:n={n}"
    elif kind == "cycle":
        edges = [(i, i + 1, 1) for i in range(1, n)] + [(n, 1, 1)]
        graph = graphs.WeightedGraph.from_edges(n, edges, directed=False, bound=1)
        desc = f"gen:cycle:n={n}"
    elif kind == "complete":
        edges = [(i, j, 1) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        graph = graphs.WeightedGraph.from_edges(n, edges, directed=False, bound=1)
        desc = f"gen:complete:n={n}"
    else:
        prob = float(spec.get("p", 0.5))
        graph = _rand_graph(rng, n, prob, bound, directed)
        desc = f"gen:gnp:n={n},p={prob},M={bound},directed={int(directed)}"
    return Instance(algorithm, n, desc, {"graph": graph})


def _instance_from_file(algorithm: str, path: str,
                        field_prime: Optional[int]) -> Instance:
    if algorithm in ("mm",):
        raise UsageError("mm accepts generated instances only")
    if algorithm == "distprod":
        from .minplus import read_pair_file
        a, b, bound = read_pair_file(path)
        return Instance(algorithm, a.shape[0], f"file:{path}",
                        {"a": a, "b": b, "M": bound})
    if algorithm in ("det", "inverse", "minpol", "rank", "solve"):
        mat, p, b_vec = load_matrix_file(path)
        payload = {"mat": mat, "p": field_prime or p}
        if algorithm == "solve":
            if b_vec is None:
                raise UsageError("solve input file needs a trailing b row")
            payload["b"] = b_vec
        return Instance(algorithm, mat.shape[0], f"file:{path}", payload)
    graph = graphs.WeightedGraph.load(path)
    return Instance(algorithm, graph.n, f"file:{path}", {"graph": graph})


def load_matrix_file(path):
    """'n n p' header, n integer rows, optional extra row holding b."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    head = lines[0].split()
    if len(head) != 3:
        raise UsageError(f"{path}:1: expected header 'n n p'")
    n, n2, p = (int(x) for x in head)
    if n != n2:
        raise UsageError(f"{path}:1: matrix must be square")
    rows = [ln.split() for ln in lines[1:]]
    if len(rows) not in (n, n + 1):
        raise UsageError(f"{path}: expected {n} rows (plus optional b row)")
    for idx, row in enumerate(rows):
        if len(row) != n:
            raise UsageError(f"{path}:{idx + 2}: expected {n} entries")
    mat = np.array([[int(x) % p for x in row] for row in rows[:n]], dtype=np.int64)
    b_vec = (np.array([int(x) % p for x in rows[n]], dtype=np.int64)
             if len(rows) == n + 1 else None)
    return mat, p, b_vec


# --------------------------------------------------------------- execution

class RunReport:
    def __init__(self, algorithm: str, descriptor: str, seed: int,
                 output_text: str, verdict: str, world: CliqueWorld):
        self.algorithm = algorithm
        self.descriptor = descriptor
        self.seed = seed
        self.output_text = output_text
        self.verdict = verdict
        self.ledger_text = world.ledger.to_text()
        self.rounds = world.ledger.total_rounds
        self.messages = world.ledger.total_messages

    def digest(self) -> str:
        return hashlib.sha256(self.output_text.encode()).hexdigest()

    def render(self) -> str:
        lines = [
            f"algorithm: {self.algorithm}",
            f"input: {self.descriptor}",
            f"seed: {self.seed}",
            f"version: {__version__}",
            f"output-digest: sha256:{self.digest()}",
            f"verdict: {self.verdict}",
            f"rounds: {self.rounds}",
            f"messages: {self.messages}",
            "output:",
            self.output_text.rstrip("\n"),
            "ledger:",
            self.ledger_text.rstrip("\n"),
        ]
        return "\n".join(lines) + "\n"


def _matrix_text(mat: np.ndarray) -> str:
    return "\n".join(" ".join(str(int(v)) for v in row) for row in mat) + "\n"


def _minplus_text(mat: np.ndarray) -> str:
    return "\n".join(" ".join(format_entry(v) for v in row) for row in mat) + "\n"


def execute(instance: Instance, seed: int, kernel: str) -> tuple[str, str, CliqueWorld]:
    """Run one algorithm on a fresh world; returns (output text, verdict)."""
    algorithm = instance.algorithm
    pay = instance.payload
    n = instance.n
    cap = ORACLE_SIZE_CAP.get(algorithm, DEFAULT_ORACLE_CAP)
    world = CliqueWorld(n, seed=seed)
    sub = world.all_nodes()
    verdict = "unchecked"
    if algorithm == "mm":
        p = pay["p"]
        a_dms = [mm.scatter_matrix(world, sub, a, p, has_cols=False) for a in pay["a"]]
        b_dms = [mm.scatter_matrix(world, sub, b, p, has_rows=False) for b in pay["b"]]
        outs = mm.mm_multi(world, sub, a_dms, b_dms, kernel)
        res = [mm.gather_matrix(world, dm) for dm in outs]
        if n <= cap:
            want = [oracles.mat_mult(a, b, p) for a, b in zip(pay["a"], pay["b"])]
            verdict = "pass" if all(np.array_equal(x, y) for x, y in zip(res, want)) else "fail"
        text = "".join(_matrix_text(r) for r in res)
    elif algorithm == "distprod":
        a = distprod.scatter_minplus(world, sub, pay["a"], pay["M"], has_cols=False)
        b = distprod.scatter_minplus(world, sub, pay["b"], pay["M"], has_rows=False)
        strategy = pay.get("strategy", "auto")
        if strategy == "dft":
            out = distprod.dist_prod_dft(world, sub, a, b)
        elif strategy == "semiring":
            out = distprod.dist_prod_semiring(world, sub, a, b)
        else:
            out = distprod.dist_prod(world, sub, a, b)
        res = distprod.gather_minplus(world, out)
        if n <= cap:
            verdict = ("pass" if np.array_equal(
                res, oracles.minplus_product(pay["a"], pay["b"])) else "fail")
        text = _minplus_text(res)
    elif algorithm in ("det", "inverse", "minpol", "rank", "solve"):
        p = pay["p"]
        dm = mm.scatter_matrix(world, sub, pay["mat"], p)
        if algorithm == "det":
            value = detinv.det(world, sub, dm, kernel)
            if n <= cap:
                verdict = "pass" if value == oracles.det_mod(pay["mat"], p) else "fail"
            text = f"{value}\n"
        elif algorithm == "inverse":
            out = detinv.inverse(world, sub, dm, kernel)
            res = mm.gather_matrix(world, out)
            if n <= cap:
                verdict = ("pass" if np.array_equal(
                    res, oracles.inverse_mod(pay["mat"], p)) else "fail")
            text = _matrix_text(res)
        elif algorithm == "minpol":
            poly = krylov.minpol_monte_carlo(world, sub, dm, f"cli-{seed}", kernel)
            if n <= cap:
                verdict = ("pass" if list(poly.coeffs) ==
                           oracles.minpol_mod(pay["mat"], p) else "fail")
            text = " ".join(str(c) for c in poly.coeffs) + "\n"
        elif algorithm == "rank":
            value = krylov.rank_rand(world, sub, dm, f"cli-{seed}", kernel)
            if n <= cap:
                verdict = "pass" if value == oracles.rank_mod(pay["mat"], p) else "fail"
            text = f"{value}\n"
        else:
            x = krylov.solve(world, sub, dm, pay["b"], f"cli-{seed}", kernel)
            check = oracles.mat_mult(pay["mat"], x.reshape(-1, 1), p).ravel()
            verdict = "pass" if np.array_equal(check, pay["b"] % p) else "fail"
            text = " ".join(str(int(v)) for v in x) + "\n"
    elif algorithm in ("apsp", "apsp-zwick"):
        graph = pay["graph"]
        if algorithm == "apsp":
            out = graphs.apsp_minplus_squaring(world, graph, kernel)
        else:
            out = graphs.apsp_zwick(world, graph, kernel=kernel, tag=f"cli-{seed}")
        res = distprod.gather_minplus(world, out)
        if n <= cap:
            verdict = ("pass" if np.array_equal(
                res, oracles.floyd_warshall(graph.adj)) else "fail")
        text = _minplus_text(res)
    elif algorithm == "diameter":
        graph = pay["graph"]
        value = graphs.diameter(world, graph, kernel)
        if n <= cap:
            dist = oracles.floyd_warshall(graph.adj)
            off = dist[~np.eye(n, dtype=bool)]
            want = INF if off.size and bool((off >= INF_THRESHOLD).any()) \
                else (int(off.max()) if off.size else 0)
            verdict = "pass" if value == want else "fail"
        text = format_entry(value) + "\n"
    elif algorithm == "matching-size":
        graph = pay["graph"]
        value = graphs.matching_size(world, graph, tag=f"cli-{seed}", kernel=kernel)
        if n <= cap:
            pairs = [(u - 1, v - 1) for u, v, _ in graph.edges()]
            want = oracles.max_matching_size(oracles.graph_adj_sets(n, pairs))
            verdict = "pass" if value == want else "fail"
        text = f"{value}\n"
    elif algorithm == "allowed-edges":
        graph = pay["graph"]
        edges = graphs.allowed_edges(world, graph, tag=f"cli-{seed}", kernel=kernel)
        listing = sorted(tuple(sorted(e)) for e in edges)
        if n <= cap:
            pairs = [(u - 1, v - 1) for u, v, _ in graph.edges()]
            want = {tuple(sorted(x + 1 for x in e))
                    for e in oracles.allowed_edges_oracle(n, pairs)}
            verdict = "pass" if set(listing) == want else "fail"
        text = "".join(f"{u} {v}\n" for u, v in listing) or "(none)\n"
    elif algorithm == "gallai-edmonds":
        graph = pay["graph"]
        ge = graphs.gallai_edmonds(world, graph, tag=f"cli-{seed}", kernel=kernel)
        if n <= cap:
            pairs = [(u - 1, v - 1) for u, v, _ in graph.edges()]
            dw, kw, cw = oracles.gallai_edmonds_oracle(n, pairs)
            verdict = ("pass" if ge.d_set == frozenset(v + 1 for v in dw)
                       and ge.k_set == frozenset(v + 1 for v in kw) else "fail")
        text = ("D: " + " ".join(str(v) for v in sorted(ge.d_set)) + "\n"
                "K: " + " ".join(str(v) for v in sorted(ge.k_set)) + "\n"
                "C: " + " ".join(str(v) for v in sorted(ge.c_set)) + "\n")
    else:
        raise UsageError(f"unknown algorithm {algorithm!r}")
    return text, verdict, world


# -------------------------------------------------------------- subcommands

def cmd_run(args) -> int:
    if args.algorithm not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {args.algorithm!r}")
    instance = build_instance(args.algorithm, args.gen, args.input, args.seed,
                              args.field_prime)
    if args.algorithm == "distprod" and args.strategy != "auto":
        instance.payload["strategy"] = args.strategy
    text, verdict, world = execute(instance, args.seed, args.kernel)
    report = RunReport(args.algorithm, instance.descriptor, args.seed, text,
                       verdict, world)
    rendered = report.render()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(rendered)
    sys.stdout.write(rendered)
    return 0 if verdict != "fail" else 1


def cmd_verify(args) -> int:
    if args.algorithm not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {args.algorithm!r}")
    passes = 0
    for trial in range(args.trials):
        seed = args.seed + trial
        instance = build_instance(args.algorithm, args.gen, None, seed,
                                  args.field_prime)
        text, verdict, _ = execute(instance, seed, args.kernel)
        if verdict == "unchecked":
            raise UsageError("instance size exceeds the oracle capacity")
        ok = verdict == "pass"
        passes += int(ok)
        print(f"trial {trial}: {'ok' if ok else 'MISMATCH'}")
    threshold = 0.95 * args.trials if args.algorithm in MONTE_CARLO else args.trials
    print(f"{passes}/{args.trials} passed")
    return 0 if passes >= threshold else 1


BENCH_ALGOS = ("mm", "mm-k", "det-deterministic", "inverse-deterministic",
               "minpol", "det-rand", "distprod", "apsp")
PER_LOG = {"minpol", "det-rand"}


def _bench_once(name: str, n: int, k: int, seed: int, kernel: str) -> CliqueWorld:
    rng = random.Random(seed)
    world = CliqueWorld(n, seed=seed)
    sub = world.all_nodes()
    p = next_prime_at_least(max(101, 4 * n * n * max(1, math.ceil(math.log2(max(2, n))))))
    if name in ("mm", "mm-k"):
        a_dms = [mm.scatter_matrix(world, sub, _rand_matrix(rng, n, n, 101), 101,
                                   has_cols=False) for _ in range(k)]
        b_dms = [mm.scatter_matrix(world, sub, _rand_matrix(rng, n, n, 101), 101,
                                   has_rows=False) for _ in range(k)]
        mm.mm_multi(world, sub, a_dms, b_dms, kernel)
    elif name in ("det-deterministic", "inverse-deterministic"):
        p_det = next_prime_at_least(max(101, n + 1))
        mat = _rand_matrix(rng, n, n, p_det)
        dm = mm.scatter_matrix(world, sub, mat, p_det)
        if name == "det-deterministic":
            detinv.det(world, sub, dm, kernel)
        else:
            state = detinv.char_poly(world, sub, dm, kernel)
            if int(state.coeffs[n - 1]) != 0:
                detinv.inverse(world, sub, dm, kernel, state=state)
    elif name == "minpol":
        dm = mm.scatter_matrix(world, sub, _rand_matrix(rng, n, n, p), p)
        krylov.minpol_monte_carlo(world, sub, dm, f"bench-{seed}", kernel)
    elif name == "det-rand":
        dm = mm.scatter_matrix(world, sub, _rand_matrix(rng, n, n, p), p)
        krylov.det_rand(world, sub, dm, f"bench-{seed}", kernel)
    elif name == "distprod":
        a = distprod.scatter_minplus(world, sub, _rand_minplus(rng, n, n, 3), 3,
                                     has_cols=False)
        b = distprod.scatter_minplus(world, sub, _rand_minplus(rng, n, n, 3), 3,
                                     has_rows=False)
        distprod.dist_prod(world, sub, a, b)
    elif name == "apsp":
        graph = _rand_graph(rng, n, 0.3, 3, False)
        graphs.apsp_minplus_squaring(world, graph, kernel)
    else:
        raise UsageError(f"unknown bench target {name!r}")
    return world


def fit_slope(xs, ys) -> float:
    lx = [math.log(x) for x in xs]
    ly = [math.log(max(y, 1e-9)) for y in ys]
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den


def cmd_bench(args) -> int:
    if args.algorithm not in BENCH_ALGOS:
        raise UsageError(f"unknown bench target {args.algorithm!r}; "
                         f"choose from {', '.join(BENCH_ALGOS)}")
    if args.algorithm == "mm-k":
        sweep = [int(x) for x in args.k_list.split(",")]
        shapes = [(args.size, k) for k in sweep]
        xs = sweep
    else:
        sizes = sorted(int(x) for x in args.sizes.split(","))
        shapes = [(n, 1) for n in sizes]
        xs = sizes
    if len(shapes) < 4:
        raise UsageError("need at least 4 sweep points for a slope fit")
    rows = ["n,k,m,kernel,phase,rounds,messages"]
    totals = []
    for n, k in shapes:
        world = _bench_once(args.algorithm, n, k, args.seed, args.kernel)
        for path, rec in world.ledger.leaves():
            rows.append(f"{n},{k},{n},{args.kernel},{path},{rec.rounds},{rec.messages}")
        total = world.ledger.total_rounds
        rows.append(f"{n},{k},{n},{args.kernel},total,{total},{world.ledger.total_messages}")
        totals.append(total)
        print(f"n={n} k={k}: rounds={total} messages={world.ledger.total_messages}")
    ys = [t / math.log2(n) if args.algorithm in PER_LOG else t
          for (n, _), t in zip(shapes, totals)]
    slope = fit_slope(xs, ys)
    label = "rounds/log2(n)" if args.algorithm in PER_LOG else "rounds"
    print(f"fitted log-log slope of {label}: {slope:.4f}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(rows) + "\n")
    return 0


def _load_curve(token: str) -> planner.OmegaCurve:
    if token == "trivial":
        return planner.OmegaCurve.trivial()
    if token == "strassen":
        return planner.OmegaCurve.strassen()
    if token.startswith("omega:"):
        return planner.OmegaCurve.constant(float(token.split(":", 1)[1]))
    return planner.load_curve_file(token)


def cmd_plan(args) -> int:
    if args.query in ("theorem1", "dis"):
        curve = _load_curve(args.curve)
        est = planner.theorem1_exponent(args.a, args.b, curve)
        label = "products" if args.query == "theorem1" else "distance product"
        print(f"{label}: regime={est.regime} gamma={est.gamma:.6f} "
              f"exponent={est.exponent:.6f}")
    elif args.query == "zwick":
        if args.curves:
            left_path, right_path = args.curves.split(",")
            arg = (planner.load_cost_file(left_path), planner.load_cost_file(right_path))
        elif args.curve:
            arg = _load_curve(args.curve)
        else:
            arg = planner.bundled_zwick_curves()
        sigma, exponent = planner.zwick_exponent(arg)
        print(f"zwick: sigma*={sigma:.6f} exponent={exponent:.6f}")
    else:
        raise UsageError(f"unknown plan query {args.query!r}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cliquealg",
        description="Congested-clique algebraic algorithm suite")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one algorithm and emit a report")
    run.add_argument("algorithm")
    run.add_argument("--input", help="instance file")
    run.add_argument("--gen", help="generator spec, e.g. gnp:n=10,p=0.5")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--field-prime", type=int)
    run.add_argument("--kernel", choices=("trivial", "strassen"), default="trivial")
    run.add_argument("--strategy", choices=("auto", "dft", "semiring"),
                     default="auto")
    run.add_argument("--out", help="report output path")
    run.set_defaults(func=cmd_run)

    verify = sub.add_parser("verify", help="compare against oracles over trials")
    verify.add_argument("algorithm")
    verify.add_argument("--trials", type=int, default=20)
    verify.add_argument("--size", type=int, default=8)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--gen")
    verify.add_argument("--field-prime", type=int)
    verify.add_argument("--kernel", choices=("trivial", "strassen"), default="trivial")
    verify.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="round-complexity sweeps")
    bench.add_argument("algorithm")
    bench.add_argument("--sizes", default="16,32,64,128,256")
    bench.add_argument("--size", type=int, default=64, help="fixed n for mm-k")
    bench.add_argument("--k-list", default="1,2,4,8")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--kernel", choices=("trivial", "strassen"), default="trivial")
    bench.add_argument("--out", help="CSV output path")
    bench.set_defaults(func=cmd_bench)

    plan = sub.add_parser("plan", help="evaluate complexity formulas")
    plan.add_argument("query", choices=("theorem1", "dis", "zwick"))
    plan.add_argument("--a", type=float, default=0.0)
    plan.add_argument("--b", type=float, default=1.0)
    plan.add_argument("--curve", help="trivial | strassen | omega:X | FILE")
    plan.add_argument("--curves", help="LEFT,RIGHT sampled cost files (zwick)")
    plan.set_defaults(func=cmd_plan)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.command == "plan" and args.query in ("theorem1", "dis") and not args.curve:
        args.curve = "trivial"
    try:
        if getattr(args, "gen", None) and getattr(args, "input", None):
            raise UsageError("--gen and --input are mutually exclusive")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
