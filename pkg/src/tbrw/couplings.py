"""Coupled constructions of several walks on shared randomness.

Three couplings live here:

* an optimal total-variation coupling of two leaf laws, and paired runs that
  share one tree until the first unequal leaf draw (the split time);
* an interval-labeled "grand" process carrying every Bernoulli parameter in
  [0, 1] at once, from which any single-parameter run can be extracted;
* a monotone pair driving a general leaf law and a Bernoulli floor on one
  shared tree with per-vertex visibility labels, the floor walker advancing
  only when the leading walker moves across commonly visible structure.

Interval endpoints are the sampled uniforms themselves and are only ever
compared, never rounded or averaged, so label membership is exact; the
uniforms are redrawn in the (measure-zero) event of a duplicate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .engine import Trajectory, make_initial, run_arrays
from .schedules import LeafLaw

LABEL_BOTH = 0
LABEL_LEAD_ONLY = 1
LABEL_FLOOR_ONLY = 2


def _child_seed(seed: int, *salt) -> int:
    return int(np.random.SeedSequence([int(seed), *[int(s) for s in salt]])
               .generate_state(1)[0])


# ---------------------------------------------------------------------------
# total-variation coupling


def tv_distance(law_a: LeafLaw, law_b: LeafLaw) -> float:
    """Half the l1 distance between the two pmfs."""
    support = sorted(set(law_a.support) | set(law_b.support))
    return 0.5 * sum(abs(law_a.pmf(k) - law_b.pmf(k)) for k in support)


def _coupling_parts(law_a: LeafLaw, law_b: LeafLaw):
    support = sorted(set(law_a.support) | set(law_b.support))
    pa = np.array([law_a.pmf(k) for k in support])
    pb = np.array([law_b.pmf(k) for k in support])
    overlap = np.minimum(pa, pb)
    omega = overlap.sum()
    return np.asarray(support), pa, pb, overlap, float(omega)


def _draw_from(support: np.ndarray, probs: np.ndarray, u: float) -> int:
    cum = np.cumsum(probs)
    idx = int(np.searchsorted(cum, u * cum[-1], side="right"))
    return int(support[min(idx, len(support) - 1)])


def max_couple(law_a: LeafLaw, law_b: LeafLaw,
               rng: np.random.Generator) -> Tuple[int, int, bool]:
    """One joint draw (x_a, x_b, equal) with exact marginals and
    P(equal) = 1 - tv_distance(law_a, law_b).

    With probability 1 - d both values come from the normalized overlap
    min(a, b); otherwise each side draws from its normalized residual.
    """
    support, pa, pb, overlap, omega = _coupling_parts(law_a, law_b)
    if rng.random() < omega:
        x = _draw_from(support, overlap, rng.random())
        return x, x, True
    xa = _draw_from(support, pa - overlap, rng.random())
    xb = _draw_from(support, pb - overlap, rng.random())
    return xa, xb, False


def sample_coupled_arrays(law_a: LeafLaw, law_b: LeafLaw, n: int,
                          rng: np.random.Generator):
    """Vectorized ``max_couple``: arrays (xi_a, xi_b, equal) of length n."""
    support, pa, pb, overlap, omega = _coupling_parts(law_a, law_b)
    equal = rng.random(n) < omega
    xi_a = np.empty(n, dtype=np.int64)
    xi_b = np.empty(n, dtype=np.int64)
    u = rng.random(n)
    if omega > 0:
        cum = np.cumsum(overlap)
        idx = np.searchsorted(cum, u * cum[-1], side="right")
        shared = support[np.minimum(idx, len(support) - 1)]
        xi_a[equal] = shared[equal]
        xi_b[equal] = shared[equal]
    miss = ~equal
    if miss.any():
        ua, ub = rng.random(n), rng.random(n)
        for arr, probs, uu in ((xi_a, pa - overlap, ua), (xi_b, pb - overlap, ub)):
            tot = probs.sum()
            if tot <= 0:
                continue
            cum = np.cumsum(probs)
            idx = np.searchsorted(cum, uu[miss] * cum[-1], side="right")
            arr[miss] = support[np.minimum(idx, len(support) - 1)]
    return xi_a, xi_b, equal


@dataclass
class CoupledPair:
    traj_a: Trajectory
    traj_b: Trajectory
    split_time: Optional[int]   # first step with unequal leaf draws, None if never
    equal_flags: np.ndarray     # per step 1..horizon

    @property
    def censored(self) -> bool:
        return self.split_time is None


def tv_coupled_run(law_a: LeafLaw, law_b: LeafLaw, horizon: int,
                   seed: int, initial="edge") -> CoupledPair:
    """Run two walks that share every draw until the leaf counts first differ.

    Before the split time the two runs are identical (same tree, same moves);
    from the split on, each continues on its own stream.
    """
    rng = np.random.default_rng(_child_seed(seed, 0))
    xi_a_c, xi_b_c, equal = sample_coupled_arrays(law_a, law_b, horizon, rng)
    unequal = np.flatnonzero(~equal)
    zeta = int(unequal[0]) + 1 if unequal.size else None

    xi_a = np.zeros(horizon + 1, dtype=np.int64)
    xi_b = np.zeros(horizon + 1, dtype=np.int64)
    xi_a[1:], xi_b[1:] = xi_a_c, xi_b_c
    shared_u = rng.random(horizon + 1)
    ju_a, ju_b = shared_u.copy(), shared_u.copy()
    if zeta is not None:
        rng_a = np.random.default_rng(_child_seed(seed, 1))
        rng_b = np.random.default_rng(_child_seed(seed, 2))
        tail = horizon - zeta
        xi_a[zeta + 1:] = law_a.sample(rng_a, tail)
        xi_b[zeta + 1:] = law_b.sample(rng_b, tail)
        ju_a[zeta:] = rng_a.random(tail + 1)
        ju_b[zeta:] = rng_b.random(tail + 1)
    traj_a = run_arrays(initial, xi_a, ju_a, keep_tree=None, seed=seed,
                        schedule={"kind": "tv-coupled", "side": "a",
                                  **law_a.to_json()})
    traj_b = run_arrays(initial, xi_b, ju_b, keep_tree=None, seed=seed,
                        schedule={"kind": "tv-coupled", "side": "b",
                                  **law_b.to_json()})
    return CoupledPair(traj_a=traj_a, traj_b=traj_b, split_time=zeta,
                       equal_flags=equal)


# ---------------------------------------------------------------------------
# interval machinery for the grand process


@dataclass(frozen=True)
class IntervalSet:
    """Disjoint sorted closed subintervals of [0, 1]; all queries are exact
    endpoint comparisons."""

    parts: tuple  # of (lo, hi) pairs

    def __post_init__(self):
        parts = tuple((float(a), float(b)) for a, b in self.parts)
        for a, b in parts:
            if not (0.0 <= a <= b <= 1.0):
                raise ValueError(f"bad interval [{a}, {b}]")
        for (_, b1), (a2, _) in zip(parts, parts[1:]):
            if a2 < b1:
                raise ValueError("intervals must be disjoint and sorted")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def full(cls) -> "IntervalSet":
        return cls(parts=((0.0, 1.0),))

    @property
    def empty(self) -> bool:
        return not self.parts

    def contains_point(self, p: float) -> bool:
        return any(a <= p <= b for a, b in self.parts)

    def contains_interval(self, lo: float, hi: float) -> bool:
        return any(a <= lo and hi <= b for a, b in self.parts)

    def intersect_interval(self, lo: float, hi: float) -> "IntervalSet":
        out = []
        for a, b in self.parts:
            a2, b2 = max(a, lo), min(b, hi)
            if a2 < b2:
                out.append((a2, b2))
        return IntervalSet(parts=tuple(out))

    def to_json(self):
        return [[a, b] for a, b in self.parts]


@dataclass
class GrandBall:
    ball_id: int
    lo: float
    hi: float
    node: int


@dataclass
class GrandRun:
    """Full record of one interval-labeled run: enough to replay any
    single-parameter instance and to check every structural invariant."""

    horizon: int
    seed: int
    initial_size: int
    uniforms: np.ndarray            # U_1..U_horizon
    node_parent: List[int]
    node_birth: List[int]
    node_depth: List[int]
    node_label: List[IntervalSet]
    ball_steps: List[List[Tuple[float, float, int]]]  # (lo, hi, node) per step
    events: List[dict]

    @property
    def n_nodes(self) -> int:
        return len(self.node_parent)

    def ball_holding(self, p: float, step: int) -> Tuple[float, float, int]:
        holders = [b for b in self.ball_steps[step] if b[0] <= p <= b[1]]
        if len(holders) != 1:
            raise ValueError(f"{len(holders)} balls hold {p} at step {step}")
        return holders[0]

    def visible_nodes(self, p: float) -> List[int]:
        return [i for i in range(self.n_nodes) if self.node_label[i].contains_point(p)]

    def write_events_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            for ev in self.events:
                fh.write(json.dumps(ev, sort_keys=True) + "\n")


def grand_run(initial="edge", horizon: int = 100, seed: int = 0) -> GrandRun:
    """Drive the swarm of interval-labeled balls for ``horizon`` steps.

    Each step: draw a fresh uniform U; attach to every occupied vertex one
    vertex labeled [U, 1] intersected with the labels of the balls sitting
    there (skipped when that intersection is empty); split the unique ball
    whose label straddles U; then every ball jumps to a uniformly chosen
    neighbor whose label contains the ball's label.
    """
    state = make_initial(initial)
    rng = np.random.default_rng(seed)
    parent = list(state.tree.parent)
    birth = [0] * len(parent)
    depth = list(state.tree.depth)
    children = [list(c) for c in state.tree.children]
    label: List[IntervalSet] = [IntervalSet.full() for _ in parent]
    balls: List[GrandBall] = [GrandBall(ball_id=0, lo=0.0, hi=1.0,
                                        node=state.position)]
    next_ball = 1
    uniforms: List[float] = []
    seen = set()
    ball_steps = [[(b.lo, b.hi, b.node) for b in balls]]
    events: List[dict] = []

    for n in range(1, horizon + 1):
        u = float(rng.random())
        while u in seen or u == 0.0:
            u = float(rng.random())
        seen.add(u)
        uniforms.append(u)

        by_node: Dict[int, List[GrandBall]] = {}
        for b in balls:
            by_node.setdefault(b.node, []).append(b)
        new_nodes = []
        for v in sorted(by_node):
            union = IntervalSet(parts=tuple(sorted((b.lo, b.hi)
                                                   for b in by_node[v])))
            lab = union.intersect_interval(u, 1.0)
            if lab.empty:
                continue
            node = len(parent)
            parent.append(v)
            birth.append(n)
            depth.append(depth[v] + 1)
            children.append([])
            children[v].append(node)
            label.append(lab)
            new_nodes.append((v, lab.to_json()))

        split_ev = None
        for i, b in enumerate(balls):
            if b.lo < u < b.hi:
                left = GrandBall(ball_id=next_ball, lo=b.lo, hi=u, node=b.node)
                right = GrandBall(ball_id=next_ball + 1, lo=u, hi=b.hi, node=b.node)
                next_ball += 2
                balls[i:i + 1] = [left, right]
                split_ev = [b.ball_id, left.ball_id, right.ball_id]
                break

        moves = []
        for b in balls:
            nbrs = ([parent[b.node]] if parent[b.node] >= 0 else []) \
                + children[b.node]
            eligible = [w for w in nbrs if label[w].contains_interval(b.lo, b.hi)]
            r = int(rng.random() * len(eligible))
            target = eligible[min(r, len(eligible) - 1)]
            moves.append([b.ball_id, b.node, target])
            b.node = target

        ball_steps.append([(b.lo, b.hi, b.node) for b in balls])
        events.append({"step": n, "U": u, "split": split_ev,
                       "new_nodes": new_nodes, "ball_moves": moves})

    return GrandRun(horizon=horizon, seed=seed, initial_size=state.tree.node_count,
                    uniforms=np.asarray(uniforms), node_parent=parent,
                    node_birth=birth, node_depth=depth, node_label=label,
                    ball_steps=ball_steps, events=events)


def check_grand_invariants(grand: GrandRun) -> None:
    """Exact structural checks after every step; raises AssertionError."""
    for step, snapshot in enumerate(grand.ball_steps):
        ends = sorted(snapshot)
        assert ends[0][0] == 0.0 and ends[-1][1] == 1.0, "balls must span [0, 1]"
        for (a1, b1, _), (a2, b2, _) in zip(ends, ends[1:]):
            assert b1 == a2, f"gap or overlap in ball labels at step {step}"
        for lo, hi, node in snapshot:
            assert grand.node_label[node].contains_interval(lo, hi), \
                f"ball [{lo},{hi}] escaped its vertex label at step {step}"
        assert len(snapshot) == 1 + step, "one split per step"


def extract_instance(grand: GrandRun, p: float) -> Trajectory:
    """Rebuild the single-parameter run: its tree is the vertices whose label
    contains p, its walker the unique ball holding p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if any(u == p for u in grand.uniforms):
        raise ValueError(f"p={p} collides with a sampled uniform; "
                         "extraction at split points is undefined")
    visible = grand.visible_nodes(p)
    local = {g: i for i, g in enumerate(visible)}
    vis_child_births: Dict[int, List[int]] = {g: [] for g in visible}
    for g in visible:
        par = grand.node_parent[g]
        if par >= 0:
            vis_child_births[par].append(grand.node_birth[g])
    for v in vis_child_births.values():
        v.sort()

    horizon = grand.horizon
    positions = np.empty(horizon + 1, dtype=np.int64)
    depths = np.empty(horizon + 1, dtype=np.int64)
    xi = np.zeros(horizon + 1, dtype=np.int64)
    flags = np.zeros(horizon + 1, dtype=np.bool_)
    births = np.asarray([grand.node_birth[g] for g in visible])
    for n in range(horizon + 1):
        _, _, node = grand.ball_holding(p, n)
        positions[n] = local[node]
        depths[n] = grand.node_depth[node]
        kids = vis_child_births[node]
        deg = int(np.searchsorted(kids, n, side="right"))
        if grand.node_parent[node] >= 0:
            deg += 1
        flags[n] = deg == 1
    counts = np.bincount(births[births >= 1], minlength=horizon + 1)
    xi[1:] = counts[1:horizon + 1]
    return Trajectory(positions=positions, depths=depths, xi=xi,
                      leaf_at_arrival=flags, initial_tree_size=grand.initial_size,
                      seed=grand.seed,
                      schedule={"kind": "extracted-bernoulli", "p": p},
                      extras={"extracted_p": p})


def vertex_count(grand: GrandRun, p: float, n: int) -> int:
    """Tree size of the p-instance after n steps (initial vertices included)."""
    added = sum(1 for g in range(grand.n_nodes)
                if 1 <= grand.node_birth[g] <= n
                and grand.node_label[g].contains_point(p))
    return grand.initial_size + added


def vertex_count_monotone(grand: GrandRun, p_list: Sequence[float], n: int) -> bool:
    counts = [vertex_count(grand, p, n) for p in sorted(p_list)]
    return all(a <= b for a, b in zip(counts, counts[1:]))


def instances_agree_through(grand: GrandRun, p: float, q: float, n: int) -> bool:
    """True when the p- and q-instances coincide (trees and walker) for every
    step up to n."""
    vis_p = {g for g in range(grand.n_nodes)
             if grand.node_birth[g] <= n and grand.node_label[g].contains_point(p)}
    vis_q = {g for g in range(grand.n_nodes)
             if grand.node_birth[g] <= n and grand.node_label[g].contains_point(q)}
    if vis_p != vis_q:
        return False
    for step in range(n + 1):
        if grand.ball_holding(p, step)[2] != grand.ball_holding(q, step)[2]:
            return False
    return True


def no_uniform_between(grand: GrandRun, p: float, q: float, n: int) -> bool:
    """The sufficient coalescence event: no split point fell strictly between
    the two parameters in the first n steps."""
    lo, hi = min(p, q), max(p, q)
    return not any(lo < u < hi for u in grand.uniforms[:n])


@dataclass(frozen=True)
class CoalescenceEstimate:
    agree_freq: float        # both instances identical through step n
    sufficient_freq: float   # no split point between the two parameters
    sufficient_se: float
    lower_bound: float       # (1 - |p - q|) ** n
    inclusion_ok: bool       # sufficient event implied agreement in every run
    n_runs: int


def coalescence_probability(runs: Sequence[GrandRun], p: float, q: float,
                            n: int) -> CoalescenceEstimate:
    """Empirical probability that the p- and q-instances move together for
    n steps, with the sufficient no-split-between event counted separately."""
    agree = np.array([instances_agree_through(g, p, q, n) for g in runs])
    suff = np.array([no_uniform_between(g, p, q, n) for g in runs])
    se = float(suff.std(ddof=1) / math.sqrt(len(suff))) if len(suff) > 1 else 0.0
    return CoalescenceEstimate(
        agree_freq=float(agree.mean()), sufficient_freq=float(suff.mean()),
        sufficient_se=se, lower_bound=(1.0 - abs(p - q)) ** n,
        inclusion_ok=bool(np.all(agree | ~suff)), n_runs=len(runs))


# ---------------------------------------------------------------------------
# monotone lead/floor pair


@dataclass
class MonotonePairResult:
    traj_lead: Trajectory          # general-law walker, its own full clock
    traj_floor: Trajectory         # Bernoulli floor walker, synced steps then
    # an independent continuation, on its own clock
    sync_times: List[int]          # lead-clock steps where the floor advanced
    n_synced: int
    labels: List[int]              # final per-vertex visibility labels
    label_violations: int          # steps where a walker stood on the other's
    # private vertex; structurally 0
    floor_xi: np.ndarray


def _conditional_positive(law: LeafLaw) -> LeafLaw:
    mass = law.positive_mass
    support = [s for s in law.support if s >= 1]
    probs = [law.pmf(s) / mass for s in support]
    total = sum(probs)
    return LeafLaw(support=tuple(support), probs=tuple(p / total for p in probs))


def _residual_law(law: LeafLaw, floor: float) -> LeafLaw:
    """Law of the lead walker's draw on steps the floor walker adds nothing."""
    plus = law.positive_mass
    coef = (1.0 - floor / plus) / (1.0 - floor)
    support, probs = [], []
    if law.pmf(0) > 0:
        support.append(0)
        probs.append(law.pmf(0) / (1.0 - floor))
    for s in law.support:
        if s >= 1 and coef > 0:
            support.append(s)
            probs.append(law.pmf(s) * coef)
    total = sum(probs)
    return LeafLaw(support=tuple(support), probs=tuple(p / total for p in probs))


def monotone_pair_run(law: LeafLaw, p_floor: float, horizon: int, seed: int,
                      initial="edge") -> MonotonePairResult:
    """Couple a general-law walk with a Bernoulli(p_floor) walk on one tree.

    Per lead step a uniform decides the joint draw: at most p_floor mass maps
    to "both walkers add" (the lead draws from its law conditioned positive,
    one shared leaf visible to both), the rest to a lead-only draw.  The floor
    walker advances exactly when the lead walker moves between two commonly
    visible vertices; leaves created on attempts that wander into lead-only
    territory are demoted to lead-only.  After the lead horizon the floor
    walker finishes its remaining steps on an independent stream, so both
    trajectories have ``horizon`` steps on their own clocks.

    Any vertex of the initial tree reached by the lead walker is reached by
    the floor walker at the corresponding sync, which is the point of the
    construction.
    """
    if p_floor <= 0.0 or p_floor > 1.0:
        raise ValueError("p_floor must lie in (0, 1]")
    if law.positive_mass < p_floor - 1e-12:
        raise ValueError(
            f"law has positive mass {law.positive_mass}, below floor {p_floor}")
    add_law = _conditional_positive(law)
    skip_law = _residual_law(law, p_floor) if p_floor < 1.0 else None

    state = make_initial(initial)
    parent = list(state.tree.parent)
    depth = list(state.tree.depth)
    children = [list(c) for c in state.tree.children]
    labels = [LABEL_BOTH] * len(parent)

    rng = np.random.default_rng(_child_seed(seed, 10))
    lead_pos = state.position
    floor_pos = state.position

    def visible_degree(v: int, hidden: int) -> int:
        d = sum(1 for c in children[v] if labels[c] != hidden)
        if parent[v] >= 0:
            d += 1
        return d

    n0 = len(parent)
    lead_positions = [lead_pos]
    lead_depths = [depth[lead_pos]]
    lead_flags = [visible_degree(lead_pos, LABEL_FLOOR_ONLY) == 1]
    lead_xi = np.zeros(horizon + 1, dtype=np.int64)
    floor_positions = [floor_pos]
    floor_depths = [depth[floor_pos]]
    floor_flags = [visible_degree(floor_pos, LABEL_LEAD_ONLY) == 1]
    floor_xi_list = [0]
    sync_times: List[int] = []
    violations = 0

    for n in range(1, horizon + 1):
        at = lead_pos
        at_common = labels[at] == LABEL_BOTH
        if rng.random() < p_floor:
            k = int(add_law.sample(rng, 1)[0])
            shared = True
        else:
            k = int(skip_law.sample(rng, 1)[0]) if skip_law is not None else 0
            shared = False
        lead_xi[n] = k
        pending = None
        for j in range(k):
            node = len(parent)
            parent.append(at)
            depth.append(depth[at] + 1)
            children.append([])
            children[at].append(node)
            if j == 0 and shared and at_common:
                labels.append(LABEL_BOTH)
                pending = node
            else:
                labels.append(LABEL_LEAD_ONLY)
        nbrs = ([parent[at]] if parent[at] >= 0 else []) + \
            [c for c in children[at] if labels[c] != LABEL_FLOOR_ONLY]
        r = int(rng.random() * len(nbrs))
        lead_pos = nbrs[min(r, len(nbrs) - 1)]
        if at_common and labels[lead_pos] == LABEL_BOTH:
            # the lead walker moved across common structure: floor step
            sync_times.append(n)
            floor_pos = lead_pos
            floor_positions.append(floor_pos)
            floor_depths.append(depth[floor_pos])
            floor_flags.append(visible_degree(floor_pos, LABEL_LEAD_ONLY) == 1)
            floor_xi_list.append(1 if (shared and at_common) else 0)
        elif pending is not None:
            labels[pending] = LABEL_LEAD_ONLY  # failed attempt: demote
        if labels[lead_pos] == LABEL_FLOOR_ONLY:
            violations += 1
        lead_positions.append(lead_pos)
        lead_depths.append(depth[lead_pos])
        lead_flags.append(visible_degree(lead_pos, LABEL_FLOOR_ONLY) == 1)

    n_synced = len(sync_times)
    cont_rng = np.random.default_rng(_child_seed(seed, 11))
    for _ in range(horizon - n_synced):
        if cont_rng.random() < p_floor:
            node = len(parent)
            parent.append(floor_pos)
            depth.append(depth[floor_pos] + 1)
            children.append([])
            children[floor_pos].append(node)
            labels.append(LABEL_FLOOR_ONLY)
            floor_xi_list.append(1)
        else:
            floor_xi_list.append(0)
        nbrs = ([parent[floor_pos]] if parent[floor_pos] >= 0 else []) + \
            [c for c in children[floor_pos] if labels[c] != LABEL_LEAD_ONLY]
        r = int(cont_rng.random() * len(nbrs))
        floor_pos = nbrs[min(r, len(nbrs) - 1)]
        if labels[floor_pos] == LABEL_LEAD_ONLY:
            violations += 1
        floor_positions.append(floor_pos)
        floor_depths.append(depth[floor_pos])
        floor_flags.append(visible_degree(floor_pos, LABEL_LEAD_ONLY) == 1)

    traj_lead = Trajectory(
        positions=np.asarray(lead_positions), depths=np.asarray(lead_depths),
        xi=lead_xi, leaf_at_arrival=np.asarray(lead_flags, dtype=np.bool_),
        initial_tree_size=n0, seed=seed,
        schedule={"kind": "monotone-pair", "side": "lead", **law.to_json()})
    traj_floor = Trajectory(
        positions=np.asarray(floor_positions), depths=np.asarray(floor_depths),
        xi=np.asarray(floor_xi_list, dtype=np.int64),
        leaf_at_arrival=np.asarray(floor_flags, dtype=np.bool_),
        initial_tree_size=n0, seed=seed,
        schedule={"kind": "monotone-pair", "side": "floor", "p": p_floor},
        extras={"n_synced": n_synced})
    return MonotonePairResult(traj_lead=traj_lead, traj_floor=traj_floor,
                              sync_times=sync_times, n_synced=n_synced,
                              labels=labels, label_violations=violations,
                              floor_xi=np.asarray(floor_xi_list, dtype=np.int64))
