"""Distributed computation of k independent n x m by m x n matrix products.

Input convention: the node playing logical role ell holds row ell of every
left factor and column ell of every right factor.  Outputs are n x n with
both the row and the column of each product delivered to node ell.

Three routes, picked by shape:
  * k > n:            sequential batches of at most n products;
  * m >= n^2/k:       column-block partitioning, one block per worker node;
  * otherwise:        the four-step bilinear-kernel pattern (with the inner
                      dimension padded up to ceil(sqrt(k*n)) when m is small).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import bilinear
from .ff import matmul_mod
from .planner import OmegaCurve, solve_maincond
from .sim import CliqueWorld


@dataclass
class DMat:
    """Descriptor of a matrix distributed over a node subset."""

    name: str
    rows: int
    cols: int
    p: int
    subset: tuple[int, ...]
    has_rows: bool = True
    has_cols: bool = True

    def row_key(self, i0: int) -> str:
        return f"{self.name}:r{i0}"

    def col_key(self, j0: int) -> str:
        return f"{self.name}:c{j0}"


@dataclass
class WideMat:
    """Column-distributed n x L matrix; column j lives at logical node j mod n."""

    name: str
    rows: int
    cols: int
    p: int
    subset: tuple[int, ...]

    def col_key(self, j0: int) -> str:
        return f"{self.name}:c{j0}"

    def owner_pos(self, j0: int) -> int:
        return j0 % len(self.subset)


def scatter_matrix(world: CliqueWorld, subset: Sequence[int], mat: np.ndarray, p: int,
                   name: Optional[str] = None, has_rows: bool = True,
                   has_cols: bool = True) -> DMat:
    """Driver-side initial placement (problem inputs start distributed; free)."""
    mat = np.asarray(mat, dtype=np.int64) % p
    rows, cols = mat.shape
    name = name or world.fresh_name("M")
    dm = DMat(name, rows, cols, p, tuple(subset), has_rows, has_cols)
    for i0 in range(rows):
        if has_rows and i0 < len(subset):
            world.stores[subset[i0]][dm.row_key(i0)] = mat[i0].copy()
    for j0 in range(cols):
        if has_cols and j0 < len(subset):
            world.stores[subset[j0]][dm.col_key(j0)] = mat[:, j0].copy()
    return dm


def gather_matrix(world: CliqueWorld, dm: DMat) -> np.ndarray:
    """Driver-side readout for verification; not part of the protocol."""
    out = np.zeros((dm.rows, dm.cols), dtype=np.int64)
    if dm.has_rows:
        for i0 in range(dm.rows):
            out[i0] = world.stores[dm.subset[i0]][dm.row_key(i0)]
    else:
        for j0 in range(dm.cols):
            out[:, j0] = world.stores[dm.subset[j0]][dm.col_key(j0)]
    return out


def identity_dmat(world: CliqueWorld, subset: Sequence[int], size: int, p: int) -> DMat:
    dm = DMat(world.fresh_name("I"), size, size, p, tuple(subset))

    def build(view):
        pos = subset.index(view.node)
        if pos < size:
            e = np.zeros(size, dtype=np.int64)
            e[pos] = 1 % p
            view.put(dm.row_key(pos), e)
            view.put(dm.col_key(pos), e.copy())

    world.run_local(subset, "identity", build)
    return dm


@dataclass
class MediumPlan:
    """Dimensioning of the four-step pattern, all derived from shape only."""

    n: int
    m: int
    k: int
    gamma: float
    family: str
    d: int
    e: int
    t: int
    q: int
    c: int
    r: int
    alg: bilinear.BilinearAlgorithm = field(repr=False)

    @property
    def X(self) -> int:
        return self.q * self.c

    @property
    def Z(self) -> int:
        return self.q * self.r

    @property
    def n_hat(self) -> int:
        return self.d * self.X

    @property
    def m_hat(self) -> int:
        return self.e * self.Z

    def worker(self, s0: int, u0: int, v0: int) -> int:
        return (s0 * self.q + u0) * self.q + v0

    def mul_node(self, s0: int, mu0: int) -> int:
        return s0 * self.t + mu0

    def slot(self, i0: int, u0: int, xp0: int) -> int:
        return i0 * self.X + u0 * self.c + xp0

    def expected_counts(self) -> dict[str, int]:
        """Per-node received-element counts of the four steps (padded sizes)."""
        return {
            "form": 2 * self.d * self.e * self.c * self.r,
            "gather": 2 * self.X * self.Z,
            "combine": self.t * self.c * self.c,
            "deliver": 2 * self.k * self.n_hat,
        }


def make_medium_plan(n: int, m: int, k: int, family: str, gamma: float) -> MediumPlan:
    budget = max(1, n // k)
    d = bilinear.max_d_for_budget(family, budget, gamma)
    alg = bilinear.algorithm_for(family, d, gamma)
    q = math.isqrt(max(1, n // k))
    c = math.ceil(n / (d * q))
    r = math.ceil(m / (alg.e * q))
    plan = MediumPlan(n, m, k, gamma, family, d, alg.e, alg.t, q, c, r, alg)
    assert k * q * q <= n and k * alg.t <= n
    return plan


def mm_multi(world: CliqueWorld, subset: Sequence[int], a_list: Sequence[DMat],
             b_list: Sequence[DMat], kernel: str = "trivial",
             phase: Optional[str] = None) -> list[DMat]:
    """k independent products; dispatches on (n, m, k) and charges the ledger."""
    subset = tuple(subset)
    n = len(subset)
    k = len(a_list)
    if k == 0 or k != len(b_list):
        raise ValueError("need matching, nonempty factor lists")
    m = a_list[0].cols
    p = a_list[0].p
    for a, b in zip(a_list, b_list):
        if a.rows != n or a.cols != m or b.rows != m or b.cols != n:
            raise ValueError("dimension mismatch with the node subset")
        if a.p != p or b.p != p:
            raise ValueError("field mismatch between factors")
    phase = phase or world.fresh_name("mm")
    with world.ledger.group(phase):
        if k > n:
            out: list[DMat] = []
            for start in range(0, k, n):
                out.extend(
                    mm_multi(world, subset, a_list[start:start + n],
                             b_list[start:start + n], kernel,
                             phase=f"batch{start // n}"))
            return out
        if m * k >= n * n:
            return _mm_large(world, subset, a_list, b_list)
        if m * m <= k * n:
            s = math.isqrt(k * n)
            m_eff = s if s * s == k * n else s + 1
            plan = make_medium_plan(n, m_eff, k, "trivial", 0.0)
            plan.m = m  # real inner size; pad lives in m_hat
            return _mm_medium(world, subset, a_list, b_list, plan)
        if kernel == "strassen":
            gamma = 1.0
        else:
            gamma = solve_maincond(math.log(k) / math.log(n),
                                   math.log(m) / math.log(n),
                                   OmegaCurve.for_kernel(kernel))
        plan = make_medium_plan(n, m, k, kernel, gamma)
        return _mm_medium(world, subset, a_list, b_list, plan)


def _mm_large(world: CliqueWorld, subset: Sequence[int], a_list: Sequence[DMat],
              b_list: Sequence[DMat]) -> list[DMat]:
    n, k = len(subset), len(a_list)
    m = a_list[0].cols
    p = a_list[0].p
    g = max(1, min(n // k, m))
    w = math.ceil(m / g)
    spans = [(t0 * w, min((t0 + 1) * w, m)) for t0 in range(g)]

    def build_gather(view):
        pos = subset.index(view.node)
        if pos >= n:
            return
        for s0 in range(k):
            row = view.get(a_list[s0].row_key(pos))
            col = view.get(b_list[s0].col_key(pos)) if pos < n else None
            for t0, (lo, hi) in enumerate(spans):
                dst = subset[s0 * g + t0]
                if row is not None:
                    yield dst, ("LA", s0, pos), row[lo:hi]
                if col is not None:
                    yield dst, ("LB", s0, pos), col[lo:hi]

    world.route(subset, "blocks", build_gather)

    def compute(view):
        pos = subset.index(view.node)
        if pos >= k * g:
            return
        s0, t0 = divmod(pos, g)
        lo, hi = spans[t0]
        width = hi - lo
        ablk = np.zeros((n, width), dtype=np.int64)
        bblk = np.zeros((width, n), dtype=np.int64)
        for ell in range(n):
            ablk[ell] = view.pop(("LA", s0, ell))
            bblk[:, ell] = view.pop(("LB", s0, ell))
        view.put(("LC", s0), matmul_mod(ablk, bblk, p))

    world.run_local(subset, "block-multiply", compute)

    outs = [DMat(world.fresh_name("C"), n, n, p, tuple(subset)) for _ in range(k)]

    def build_scatter(view):
        pos = subset.index(view.node)
        if pos >= k * g:
            return
        s0, t0 = divmod(pos, g)
        prod = view.get(("LC", s0))
        for ell in range(n):
            yield subset[ell], ("LCr", s0, t0), prod[ell, :]
            yield subset[ell], ("LCc", s0, t0), prod[:, ell]

    world.route(subset, "assemble", build_scatter)

    def finish(view):
        pos = subset.index(view.node)
        for s0 in range(k):
            row = np.zeros(n, dtype=np.int64)
            col = np.zeros(n, dtype=np.int64)
            for t0 in range(g):
                row = (row + view.pop(("LCr", s0, t0))) % p
                col = (col + view.pop(("LCc", s0, t0))) % p
            view.put(outs[s0].row_key(pos), row)
            view.put(outs[s0].col_key(pos), col)

    world.run_local(subset, "sum-blocks", finish)
    # drop worker scratch
    for node in subset:
        store = world.stores[node]
        for key in [key for key in store if isinstance(key, tuple) and key[0] == "LC"]:
            del store[key]
    return outs


def _mm_medium(world: CliqueWorld, subset: Sequence[int], a_list: Sequence[DMat],
               b_list: Sequence[DMat], plan: MediumPlan) -> list[DMat]:
    n, m, k, p = plan.n, plan.m, plan.k, a_list[0].p
    d, e, t, q, c, r = plan.d, plan.e, plan.t, plan.q, plan.c, plan.r
    X, Z, n_hat, m_hat = plan.X, plan.Z, plan.n_hat, plan.m_hat
    alpha = plan.alg.alpha % p
    beta = plan.alg.beta % p
    lam = plan.alg.lam % p

    # index selections: entries of one padded row going to the v-th worker column
    inner_sel = [
        np.add.outer(np.arange(e) * Z, v0 * r + np.arange(r)).ravel()
        for v0 in range(q)
    ]
    # only structurally real positions travel; receivers zero-fill the padding
    inner_mask = [sel < m for sel in inner_sel]
    outer_pos = [
        np.add.outer(np.arange(d) * X, u0 * c + np.arange(c)).ravel()
        for u0 in range(q)
    ]
    outer_mask = [pos_arr < n for pos_arr in outer_pos]

    def build_form(view):
        pos = subset.index(view.node)
        if pos >= n:
            return
        u_own = (pos % X) // c
        for s0 in range(k):
            padded_row = np.zeros(m_hat, dtype=np.int64)
            padded_row[:m] = view.get(a_list[s0].row_key(pos))
            padded_col = np.zeros(m_hat, dtype=np.int64)
            padded_col[:m] = view.get(b_list[s0].col_key(pos))
            for v0 in range(q):
                sel = inner_sel[v0][inner_mask[v0]]
                yield subset[plan.worker(s0, u_own, v0)], ("mA", s0, pos), padded_row[sel]
                yield subset[plan.worker(s0, v0, u_own)], ("mB", s0, pos), padded_col[sel]

    world.route(subset, "form", build_form)

    def local_form(view):
        pos = subset.index(view.node)
        label = _worker_label(plan, pos)
        if label is None:
            return
        s0, u0, v0 = label
        ablk = np.zeros((d, c, e, r), dtype=np.int64)
        bblk = np.zeros((e, r, d, c), dtype=np.int64)
        buf = np.zeros(e * r, dtype=np.int64)
        for i0 in range(d):
            for xp0 in range(c):
                slot = plan.slot(i0, u0, xp0)
                if slot < n:
                    vec = view.pop(("mA", s0, slot), None)
                    if vec is not None:
                        buf[:] = 0
                        buf[inner_mask[v0]] = vec
                        ablk[i0, xp0] = buf.reshape(e, r)
                slot_b = plan.slot(i0, v0, xp0)
                if slot_b < n:
                    vec = view.pop(("mB", s0, slot_b), None)
                    if vec is not None:
                        buf[:] = 0
                        buf[inner_mask[u0]] = vec
                        bblk[:, :, i0, xp0] = buf.reshape(e, r)
        s_all = np.einsum("mij,ixjz->mxz", alpha, ablk) % p
        t_all = np.einsum("mij,jziy->mzy", beta, bblk) % p
        view.put("mS_all", s_all)
        view.put("mT_all", t_all)

    world.run_local(subset, "form-combine", local_form)

    def build_gather(view):
        pos = subset.index(view.node)
        label = _worker_label(plan, pos)
        if label is None:
            return
        s0, u0, v0 = label
        s_all = view.get("mS_all")
        t_all = view.get("mT_all")
        for mu0 in range(t):
            dst = subset[plan.mul_node(s0, mu0)]
            yield dst, ("mS", u0, v0), s_all[mu0]
            yield dst, ("mT", u0, v0), t_all[mu0]

    world.route(subset, "gather", build_gather)

    def local_multiply(view):
        pos = subset.index(view.node)
        if pos >= k * t:
            return
        s0, mu0 = divmod(pos, t)
        s_mat = np.zeros((X, Z), dtype=np.int64)
        t_mat = np.zeros((Z, X), dtype=np.int64)
        for u0 in range(q):
            for v0 in range(q):
                s_mat[u0 * c:(u0 + 1) * c, v0 * r:(v0 + 1) * r] = view.pop(("mS", u0, v0))
                t_mat[u0 * r:(u0 + 1) * r, v0 * c:(v0 + 1) * c] = view.pop(("mT", u0, v0))
        view.put("mP", matmul_mod(s_mat, t_mat, p))

    world.run_local(subset, "multiply", local_multiply)

    def build_combine(view):
        pos = subset.index(view.node)
        if pos >= k * t:
            return
        s0, mu0 = divmod(pos, t)
        prod = view.get("mP")
        for u0 in range(q):
            for v0 in range(q):
                dst = subset[plan.worker(s0, u0, v0)]
                yield dst, ("mPs", mu0), prod[u0 * c:(u0 + 1) * c, v0 * c:(v0 + 1) * c]

    world.route(subset, "combine", build_combine)

    def local_combine(view):
        pos = subset.index(view.node)
        label = _worker_label(plan, pos)
        if label is None:
            return
        p_all = np.stack([view.pop(("mPs", mu0)) for mu0 in range(t)])
        cblk = np.einsum("mij,mxy->ixjy", lam, p_all) % p
        view.put("mC", cblk)

    world.run_local(subset, "combine-local", local_combine)

    outs = [DMat(world.fresh_name("C"), n, n, p, tuple(subset)) for _ in range(k)]

    def build_deliver(view):
        pos = subset.index(view.node)
        label = _worker_label(plan, pos)
        if label is None:
            return
        s0, u0, v0 = label
        cblk = view.get("mC")
        for i0 in range(d):
            for xp0 in range(c):
                slot = plan.slot(i0, u0, xp0)
                if slot < n:
                    yield subset[slot], ("mCr", s0, v0), cblk[i0, xp0].ravel()[outer_mask[v0]]
        for j0 in range(d):
            for yp0 in range(c):
                slot = plan.slot(j0, v0, yp0)
                if slot < n:
                    yield (subset[slot], ("mCc", s0, u0, j0, yp0),
                           cblk[:, :, j0, yp0].ravel()[outer_mask[u0]])

    world.route(subset, "deliver", build_deliver)

    def local_deliver(view):
        pos = subset.index(view.node)
        if pos >= n:
            return
        for s0 in range(k):
            row = np.zeros(n, dtype=np.int64)
            col = np.zeros(n, dtype=np.int64)
            for v0 in range(q):
                vec = view.pop(("mCr", s0, v0), None)
                if vec is not None:
                    row[outer_pos[v0][outer_mask[v0]]] = vec
            for u0 in range(q):
                vec = view.pop(("mCc", s0, u0, pos // X, (pos % X) % c), None)
                if vec is not None:
                    col[outer_pos[u0][outer_mask[u0]]] = vec
            view.put(outs[s0].row_key(pos), row)
            view.put(outs[s0].col_key(pos), col)
        view.pop("mC", None)
        view.pop("mS_all", None)
        view.pop("mT_all", None)
        view.pop("mP", None)

    world.run_local(subset, "deliver-local", local_deliver)
    # scratch cleanup for nodes that held worker state but own no output slot
    for node in subset:
        store = world.stores[node]
        for key in ("mC", "mS_all", "mT_all", "mP"):
            store.pop(key, None)
    return outs


def _worker_label(plan: MediumPlan, pos: int) -> Optional[tuple[int, int, int]]:
    if pos >= plan.k * plan.q * plan.q:
        return None
    s0, rest = divmod(pos, plan.q * plan.q)
    u0, v0 = divmod(rest, plan.q)
    return s0, u0, v0


def mm_square_times_wide(world: CliqueWorld, subset: Sequence[int], lhs: DMat,
                         wide: WideMat, kernel: str = "trivial",
                         phase: Optional[str] = None) -> WideMat:
    """lhs (n x n) times a column-distributed n x L matrix, by n-column chunks."""
    subset = tuple(subset)
    n = len(subset)
    p = lhs.p
    L = wide.cols
    chunks = math.ceil(L / n)
    phase = phase or world.fresh_name("wmm")
    rhs_list = []
    for g in range(chunks):
        rhs = DMat(world.fresh_name("W"), n, n, p, subset, has_rows=False)

        def stage(view, g=g, rhs=rhs):
            pos = subset.index(view.node)
            base = g * n
            col = None
            j0 = base + pos
            if j0 < L:
                col = view.get(wide.col_key(j0))
            if col is None:
                col = np.zeros(n, dtype=np.int64)
            view.put(rhs.col_key(pos), col)

        world.run_local(subset, f"{phase}-stage{g}", stage)
        rhs_list.append(rhs)
    outs = mm_multi(world, subset, [lhs] * chunks, rhs_list, kernel, phase=phase)
    result = WideMat(world.fresh_name("WP"), n, L, p, subset)

    def collect(view):
        pos = subset.index(view.node)
        for g in range(chunks):
            j0 = g * n + pos
            if j0 < L:
                view.put(result.col_key(j0), view.get(outs[g].col_key(pos)))

    world.run_local(subset, f"{phase}-collect", collect)
    return result
