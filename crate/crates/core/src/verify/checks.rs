//! Per-graph checks. Each one recomputes its own hypotheses from the
//! definitions and asserts the stated conclusions on every instance.

use std::cell::OnceCell;
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::dag::Dag;
use crate::decompose::{decompose, ActivationWitness, TrailDecomposition};
use crate::dsep::{d_separated, d_separated_by_trails};
use crate::io::QueryDocument;
use crate::nodeset::{NodeId, NodeSet};
use crate::order::{keyed_trails, minimal_by_dominance, minimal_trails};
use crate::search::{enumerate_trails, shortest_constrained_trail, TrailConstraints, Trails};
use crate::structure::{
    decompose_local, dichotomy, find_active_cycles, has_local_relationships,
    has_local_relationships_by_trails, local_after_removal, ActiveCycle,
};
use crate::trail::{chords, Conditioning, Direction, Trail};

/// Knobs shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    /// When false, graphs are never skipped for containing an active
    /// cycle. Used to exhibit the hypothesis is needed.
    pub enforce_hypotheses: bool,
    /// Mixed into the per-graph sampling seed.
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            enforce_hypotheses: true,
            seed: 0,
        }
    }
}

/// What one check found on one graph.
#[derive(Debug, Default)]
pub struct Outcome {
    pub graph_skipped: bool,
    pub instances: u64,
    pub instances_skipped: u64,
    pub failures: Vec<(Value, String)>,
}

impl Outcome {
    fn skipped() -> Outcome {
        Outcome {
            graph_skipped: true,
            ..Default::default()
        }
    }

    fn fail(&mut self, query: &Value, clause: impl Into<String>) {
        self.failures.push((query.clone(), clause.into()));
    }
}

pub struct GraphCtx<'a> {
    pub d: &'a Dag,
    active_cycle: OnceCell<bool>,
}

impl<'a> GraphCtx<'a> {
    pub fn new(d: &'a Dag) -> Self {
        GraphCtx {
            d,
            active_cycle: OnceCell::new(),
        }
    }

    fn has_active_cycle(&self) -> bool {
        *self
            .active_cycle
            .get_or_init(|| !find_active_cycles(self.d, true).is_empty())
    }

    /// Whether a check restricted to active-cycle-free graphs must skip.
    fn outside_hypothesis(&self, cfg: &CheckConfig) -> bool {
        cfg.enforce_hypotheses && self.has_active_cycle()
    }

    /// A generator that depends only on the graph and the configured seed,
    /// so a stored counter-example replays identically.
    fn rng(&self, cfg: &CheckConfig, salt: u64) -> ChaCha8Rng {
        let mut h = DefaultHasher::new();
        self.d.node_count().hash(&mut h);
        for (u, v) in self.d.arcs() {
            (u.0, v.0).hash(&mut h);
        }
        (cfg.seed, salt).hash(&mut h);
        ChaCha8Rng::seed_from_u64(h.finish())
    }
}

pub type CheckFn = fn(&GraphCtx, &CheckConfig) -> Outcome;

/// Exhaustive subset enumeration stops above this many free nodes.
const EXHAUSTIVE_FREE_NODES: usize = 4;
const SAMPLED_SETS: usize = 6;

fn all_subsets(universe: usize, free: &[NodeId]) -> Vec<NodeSet> {
    (0u32..1 << free.len())
        .map(|mask| {
            NodeSet::from_nodes(
                universe,
                free.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v),
            )
        })
        .collect()
}

/// Subsets of `free`: all of them when few, otherwise the empty set, `free`
/// itself, every `free ∖ {v}` and a handful of random ones.
fn subset_family(universe: usize, free: &[NodeId], rng: &mut ChaCha8Rng) -> Vec<NodeSet> {
    if free.len() <= EXHAUSTIVE_FREE_NODES {
        return all_subsets(universe, free);
    }
    let full = NodeSet::from_nodes(universe, free.iter().copied());
    let mut out = vec![NodeSet::empty(universe), full.clone()];
    for &v in free {
        let mut s = full.clone();
        s.remove(v);
        out.push(s);
    }
    for _ in 0..SAMPLED_SETS {
        out.push(NodeSet::from_nodes(
            universe,
            free.iter().copied().filter(|_| rng.gen_bool(0.5)),
        ));
    }
    out.sort_by_key(|s| s.to_vec());
    out.dedup();
    out
}

fn others(d: &Dag, skip: &[NodeId]) -> Vec<NodeId> {
    d.nodes().filter(|v| !skip.contains(v)).collect()
}

fn labels(d: &Dag, s: &NodeSet) -> Vec<String> {
    s.iter().map(|v| d.label(v)).collect()
}

fn query_json(d: &Dag, x: &NodeSet, y: &NodeSet, z: &NodeSet) -> Value {
    serde_json::to_value(QueryDocument::from_sets(d, x, y, z)).expect("query serializes")
}

/// Ordered singleton queries over every admissible `Z`, plus a few sampled
/// queries with two-node `X` or `Y`.
fn xyz_queries(ctx: &GraphCtx, cfg: &CheckConfig, ordered: bool, multi: bool) -> Vec<(NodeSet, NodeSet, NodeSet)> {
    let d = ctx.d;
    let n = d.node_count();
    let mut rng = ctx.rng(cfg, 1);
    let mut out = Vec::new();
    for x in d.nodes() {
        for y in d.nodes() {
            if x == y || (!ordered && y < x) {
                continue;
            }
            for z in subset_family(n, &others(d, &[x, y]), &mut rng) {
                out.push((NodeSet::singleton(n, x), NodeSet::singleton(n, y), z));
            }
        }
    }
    if multi && n >= 3 {
        for _ in 0..4 {
            let mut nodes: Vec<NodeId> = d.nodes().collect();
            rand::seq::SliceRandom::shuffle(nodes.as_mut_slice(), &mut rng);
            let (xs, ys) = if rng.gen_bool(0.5) { (2, 1) } else { (1, 2) };
            let ys = ys.min(n - xs);
            let x = NodeSet::from_nodes(n, nodes[..xs].iter().copied());
            let y = NodeSet::from_nodes(n, nodes[xs..xs + ys].iter().copied());
            let z = NodeSet::from_nodes(
                n,
                nodes[xs + ys..].iter().copied().filter(|_| rng.gen_bool(0.5)),
            );
            out.push((x, y, z));
        }
    }
    out
}

/// Shortest trails from `a` to `b` that are activated by the empty set and
/// meet the interior/direction constraints in `cons`. Activation is tested
/// directly, not through the converging-free characterisation.
fn shortest_activated_by_empty(d: &Dag, a: NodeId, b: NodeId, cons: &TrailConstraints) -> Vec<Trail> {
    let cond = Conditioning::new(d, &NodeSet::empty(d.node_count()));
    for max_nodes in 2..=d.node_count() {
        let found: Vec<Trail> = Trails::bounded(d, a, b, cons.clone(), max_nodes)
            .filter(|t| cond.activates(t))
            .collect();
        if !found.is_empty() {
            return found;
        }
    }
    Vec::new()
}

/// True when no two non-consecutive nodes of the sequence are adjacent.
fn chordless(d: &Dag, nodes: &[NodeId]) -> bool {
    for i in 0..nodes.len() {
        for j in i + 2..nodes.len() {
            if d.adjacent(nodes[i], nodes[j]) {
                return false;
            }
        }
    }
    true
}

fn render_list(d: &Dag, nodes: &[NodeId]) -> String {
    nodes.iter().map(|&v| d.label(v)).collect::<Vec<_>>().join(",")
}

pub fn activation_lemma(ctx: &GraphCtx, _cfg: &CheckConfig) -> Outcome {
    let d = ctx.d;
    let mut out = Outcome::default();
    let cond = Conditioning::new(d, &NodeSet::empty(d.node_count()));
    for a in d.nodes() {
        for b in d.nodes().filter(|&b| b > a) {
            for t in enumerate_trails(d, a, b) {
                out.instances += 1;
                let ns = t.nodes();
                let has_collider = (1..ns.len() - 1)
                    .any(|i| d.has_arc(ns[i - 1], ns[i]) && d.has_arc(ns[i + 1], ns[i]));
                if cond.activates(&t) == has_collider {
                    out.fail(
                        &json!({ "trail": t.render(d) }),
                        "activated by the empty set iff no converging connection",
                    );
                }
            }
        }
    }
    out
}

pub fn no_chords(ctx: &GraphCtx, cfg: &CheckConfig) -> Outcome {
    if ctx.outside_hypothesis(cfg) {
        return Outcome::skipped();
    }
    let d = ctx.d;
    let mut out = Outcome::default();
    for a in d.nodes() {
        for b in d.nodes().filter(|&b| b > a) {
            let shortest = shortest_activated_by_empty(d, a, b, &TrailConstraints::default());
            if shortest.is_empty() {
                out.instances_skipped += 1;
            }
            for t in shortest {
                out.instances += 1;
                if !chords(d, &t).is_empty() {
                    out.fail(
                        &json!({ "trail": t.render(d) }),
                        "shortest trail activated by the empty set has a chord",
                    );
                }
            }
        }
    }
    out
}

pub fn common_children(ctx: &GraphCtx, cfg: &CheckConfig) -> Outcome {
    if ctx.outside_hypothesis(cfg) {
        return Outcome::skipped();
    }
    let d = ctx.d;
    let n = d.node_count();
    let mut rng = ctx.rng(cfg, 2);
    let mut out = Outcome::default();
    for a in d.nodes() {
        for b in d.nodes().filter(|&b| b > a) {
            let common = d.children(a).intersection(&d.children(b));
            for k in subset_family(n, &others(d, &[a, b]), &mut rng) {
                let cons = TrailConstraints::default().within(k.clone());
                let shortest = shortest_activated_by_empty(d, a, b, &cons);
                if shortest.is_empty() {
                    out.instances_skipped += 1;
                }
                for t in shortest {
                    out.instances += 1;
                    let q = json!({ "a": d.label(a), "b": d.label(b), "k": labels(d, &k), "trail": t.render(d) });
                    for &xi in t.interior() {
                        if !common.is_subset(&d.children(xi)) {
                            out.fail(&q, format!("(i) ch(a) ∩ ch(b) ⊄ ch({})", d.label(xi)));
                        }
                        if common.contains(xi) {
                            out.fail(&q, format!("(ii) {} ∈ ch(a) ∩ ch(b)", d.label(xi)));
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn subgraph_theorems(ctx: &GraphCtx, cfg: &CheckConfig) -> Outcome {
    if ctx.outside_hypothesis(cfg) {
        return Outcome::skipped();
    }
    let d = ctx.d;
    let mut out = Outcome::default();

    // v1 -> v2 and a shortest activated trail v1 <- x1 ⇿ ... ⇿ xn ⇿ v2
    for (v1, v2) in d.arcs() {
        let cons = TrailConstraints::default().starting(Direction::Backward);
        let shortest = shortest_activated_by_empty(d, v1, v2, &cons);
        if shortest.is_empty() {
            out.instances_skipped += 1;
        }
        for t in shortest {
            out.instances += 1;
            let q = json!({ "theorem": "arc", "v1": d.label(v1), "v2": d.label(v2), "trail": t.render(d) });
            let ns = t.nodes();
            let m = ns.len() - 2;
            for i in 1..=m {
                if !d.has_arc(ns[i], ns[i + 1]) {
                    out.fail(&q, format!("missing arc {} -> {}", d.label(ns[i]), d.label(ns[i + 1])));
                }
            }
            for &xi in &ns[2..=m] {
                if !d.has_arc(v1, xi) {
                    out.fail(&q, format!("missing arc {} -> {}", d.label(v1), d.label(xi)));
                }
            }
        }
    }

    // v1, v2 ∈ pa(v3) and a shortest activated trail v1 ⇿ ... ⇿ xn -> v2
    // avoiding pa(v3)
    for v3 in d.nodes() {
        let pa = d.parents(v3);
        for v1 in pa.iter() {
            for v2 in pa.iter().filter(|&v2| v2 != v1) {
                let cons = TrailConstraints::default()
                    .within(pa.complement())
                    .ending(Direction::Forward);
                let shortest = shortest_activated_by_empty(d, v1, v2, &cons);
                if shortest.first().is_none_or(|t| t.len() < 3) {
                    out.instances_skipped += 1;
                    continue;
                }
                for t in shortest {
                    out.instances += 1;
                    let q = json!({
                        "theorem": "parents", "v1": d.label(v1), "v2": d.label(v2),
                        "v3": d.label(v3), "trail": t.render(d)
                    });
                    for (a, b) in fan_b_arcs(t.nodes()) {
                        if !d.has_arc(a, b) {
                            out.fail(&q, format!("missing arc {} -> {}", d.label(a), d.label(b)));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Arcs of the fan with `a -> b` between the ends of `a ⇿ t1 ⇿ ... ⇿ tn ⇿ b`:
/// `t1 -> a`, the chain `t1 -> ... -> tn -> b` and `a -> tj` for `j ≥ 2`.
fn fan_a_arcs(ns: &[NodeId]) -> Vec<(NodeId, NodeId)> {
    let (a, b) = (ns[0], ns[ns.len() - 1]);
    let m = ns.len() - 2;
    let mut arcs = vec![(a, b)];
    if m >= 1 {
        arcs.push((ns[1], a));
    }
    for j in 1..=m {
        arcs.push((ns[j], ns[j + 1]));
    }
    arcs.extend(ns.iter().take(m + 1).skip(2).map(|&t| (a, t)));
    arcs
}

/// Arcs of the fan with `b -> a`: `t1 -> a`, the chain
/// `tn -> ... -> t1`, `tn -> b` and `b -> tj` for `j < n`.
fn fan_b_arcs(ns: &[NodeId]) -> Vec<(NodeId, NodeId)> {
    let (a, b) = (ns[0], ns[ns.len() - 1]);
    let m = ns.len() - 2;
    let mut arcs = vec![(b, a)];
    if m >= 1 {
        arcs.push((ns[1], a));
        arcs.push((ns[m], b));
    }
    for j in 1..m {
        arcs.push((ns[j + 1], ns[j]));
    }
    arcs.extend(ns[1..m.max(1)].iter().map(|&t| (b, t)));
    arcs
}

/// Clauses (i) to (v) of the minimal-trail theorem that `t` violates.
pub fn minimal_trail_violations(
    d: &Dag,
    x: &NodeSet,
    y: &NodeSet,
    z: &NodeSet,
    dec: &TrailDecomposition,
) -> Vec<String> {
    let mut bad = Vec::new();
    let xyz = x.union(y).union(z);
    let cc = dec.count();
    let sub = &dec.subtrails;

    // (i)
    for (i, s) in sub.iter().enumerate() {
        if let Some(&v) = s.interior().iter().find(|&&v| xyz.contains(v)) {
            bad.push(format!("(i) subtrail {i} passes through {} ∈ X ∪ Y ∪ Z", d.label(v)));
        }
    }
    for (c, w) in dec.converging.iter().zip(&dec.witnesses) {
        if let ActivationWitness::ViaDescendant(p) = w {
            if let Some(&v) = p.interior.iter().find(|&&v| xyz.contains(v)) {
                bad.push(format!(
                    "(i) descendant path of {} passes through {} ∈ X ∪ Y ∪ Z",
                    d.label(*c),
                    d.label(v)
                ));
            }
        }
    }

    // (ii)
    for (c, w) in dec.converging.iter().zip(&dec.witnesses) {
        if let ActivationWitness::ViaDescendant(p) = w {
            if !chordless(d, &p.nodes()) {
                bad.push(format!("(ii) descendant path of {} has a chord", d.label(*c)));
            }
        }
    }
    for (i, s) in sub.iter().enumerate().skip(1) {
        if !chordless(d, s.interior()) {
            bad.push(format!("(ii) interior of subtrail {i} has a chord"));
        }
    }
    let first = sub[0].nodes();
    if !chordless(d, &first[..first.len() - 1]) {
        bad.push("(ii) first subtrail without its last node has a chord".into());
    }
    if !chordless(d, &sub[cc].nodes()[1..]) {
        bad.push("(ii) last subtrail without its first node has a chord".into());
    }

    // (iii), (iv) between consecutive converging nodes
    for i in 0..cc.saturating_sub(1) {
        let (a, b) = (dec.converging[i], dec.converging[i + 1]);
        if d.has_arc(a, b) && z.contains(b) && !z.contains(a) {
            bad.push(format!("(iii) {} -> {} with only the head in Z", d.label(a), d.label(b)));
        }
        if d.has_arc(b, a) && z.contains(a) && !z.contains(b) {
            bad.push(format!("(iv) {} <- {} with only the head in Z", d.label(a), d.label(b)));
        }
    }

    // (v)
    let outside_z = z.complement();
    for (i, s) in sub.iter().enumerate().skip(1) {
        let mut cons = TrailConstraints::converging_free()
            .within(outside_z.clone())
            .starting(Direction::Backward);
        if i < cc {
            cons = cons.ending(Direction::Forward);
        }
        let best = shortest_constrained_trail(d, s.first(), s.last(), &cons);
        let best_len = best.first().map(Trail::len);
        if best_len != Some(s.len()) {
            bad.push(format!(
                "(v) subtrail {i} has {} nodes, shortest admissible has {:?}",
                s.len(),
                best_len
            ));
        }
    }
    bad
}

pub fn minimal_trail_theorem(ctx: &GraphCtx, cfg: &CheckConfig) -> Outcome {
    if ctx.outside_hypothesis(cfg) {
        return Outcome::skipped();
    }
    let d = ctx.d;
    let mut out = Outcome::default();
    for (x, y, z) in xyz_queries(ctx, cfg, true, true) {
        let m = minimal_trails(d, &x, &y, &z).expect("queries are well formed");
        if m.minimizers.is_empty() {
            out.instances_skipped += 1;
        }
        for t in &m.minimizers {
            out.instances += 1;
            let dec = decompose(d, t, &z).expect("minimizers are activated");
            let mut q = query_json(d, &x, &y, &z);
            q["trail"] = Value::String(t.render(d));
            for clause in minimal_trail_violations(d, &x, &y, &z, &dec) {
                out.fail(&q, clause);
            }
        }
    }
    out
}

/// Clauses of the local-relationship theorem and its corollary that `dec`
/// violates. Requires at least one converging node.
fn local_rel_violations(d: &Dag, y_end: NodeId, z: &NodeSet, dec: &TrailDecomposition) -> Vec<String> {
    let mut bad = Vec::new();
    let c = &dec.converging;
    let cc = c.len();
    let lab = |v: NodeId| d.label(v);

    if !z.contains(c[cc - 1]) {
        bad.push(format!("(i) final converging node {} ∉ Z", lab(c[cc - 1])));
    }
    for i in 0..cc - 1 {
        if !z.contains(c[i]) && !z.contains(c[i + 1]) {
            bad.push(format!("(ii) neither {} nor {} in Z", lab(c[i]), lab(c[i + 1])));
        }
    }
    let mut chain = c.clone();
    chain.push(y_end);
    for i in 0..cc {
        if !d.adjacent(chain[i], chain[i + 1]) {
            bad.push(format!("(iii) {} and {} not adjacent", lab(chain[i]), lab(chain[i + 1])));
        }
    }
    for (i, s) in dec.subtrails.iter().enumerate().skip(1) {
        let ok = |arcs: Vec<(NodeId, NodeId)>| arcs.iter().all(|&(a, b)| d.has_arc(a, b));
        if !ok(fan_a_arcs(s.nodes())) && !ok(fan_b_arcs(s.nodes())) {
            bad.push(format!("(iv) subtrail {i} ({}) matches neither fan", s.render(d)));
        }
    }

    // corollary
    let all_in_z = c.iter().all(|&v| z.contains(v));
    if (0..cc - 1).all(|i| d.has_arc(c[i], c[i + 1])) && !all_in_z {
        bad.push(format!("corollary (i) forward chain {} not inside Z", render_list(d, c)));
    }
    if z.contains(c[0]) && (0..cc - 1).all(|i| d.has_arc(c[i + 1], c[i])) && !all_in_z {
        bad.push(format!("corollary (ii) backward chain {} not inside Z", render_list(d, c)));
    }
    for i in 1..cc.saturating_sub(1) {
        let converging = d.has_arc(c[i - 1], c[i]) && d.has_arc(c[i + 1], c[i]);
        if !converging && !z.contains(c[i]) {
            bad.push(format!("corollary (iii) {} ∉ Z", lab(c[i])));
        }
    }
    bad
}

pub fn local_rel_theorem(ctx: &GraphCtx, cfg: &CheckConfig) -> Outcome {
    if ctx.outside_hypothesis(cfg) {
        return Outcome::skipped();
    }
    let d = ctx.d;
    let mut out = Outcome::default();
    for (x, y, z) in xyz_queries(ctx, cfg, true, true) {
        if !has_local_relationships_by_trails(d, &y.union(&z)) {
            out.instances_skipped += 1;
            continue;
        }
        let m = minimal_trails(d, &x, &y, &z).expect("queries are well formed");
        if m.minimizers.is_empty() {
            out.instances_skipped += 1;
        }
        for t in &m.minimizers {
            let dec = decompose(d, t, &z).expect("minimizers are activated");
            if dec.count() == 0 {
                out.instances_skipped += 1;
                continue;
            }
            out.instances += 1;
            let mut q = query_json(d, &x, &y, &z);
            q["trail"] = Value::String(t.render(d));
            for clause in local_rel_violations(d, t.last(), &z, &dec) {
                out.fail(&q, clause);
            }
        }
    }
    out
}

pub fn dsep_agreement(ctx: &GraphCtx, cfg: &CheckConfig) -> Outcome {
    let d = ctx.d;
    let mut out = Outcome::default();
    for (x, y, z) in xyz_queries(ctx, cfg, true, false) {
        out.instances += 1;
        let fast = d_separated(d, &x, &y, &z);
        let slow = d_separated_by_trails(d, &x, &y, &z);
        if fast != slow {
            out.fail(
                &query_json(d, &x, &y, &z),
                format!("reachability says {fast:?}, trail enumeration says {slow:?}"),
            );
        }
    }
    out
}

pub fn minimal_dominance(ctx: &GraphCtx, cfg: &CheckConfig) -> Outcome {
    let d = ctx.d;
    let mut out = Outcome::default();
    for (x, y, z) in xyz_queries(ctx, cfg, true, true) {
        let keyed = keyed_trails(d, &x, &y, &z).expect("queries are well formed");
        if keyed.is_empty() {
            out.instances_skipped += 1;
            continue;
        }
        out.instances += 1;
        let keys: Vec<_> = keyed.iter().map(|(_, k)| *k).collect();
        let by_dominance: Vec<&Trail> = minimal_by_dominance(&keys)
            .into_iter()
            .map(|i| &keyed[i].0)
            .collect();
        let m = minimal_trails(d, &x, &y, &z).expect("queries are well formed");
        if m.minimizers.iter().collect::<Vec<_>>() != by_dominance {
            out.fail(&query_json(d, &x, &y, &z), "least-key trails differ from undominated trails");
        }
    }
    out
}

pub fn removal_closure(ctx: &GraphCtx, cfg: &CheckConfig) -> Outcome {
    if ctx.outside_hypothesis(cfg) {
        return Outcome::skipped();
    }
    let d = ctx.d;
    let mut out = Outcome::default();
    for v in d.nodes() {
        out.instances += 1;
        let mut keep = NodeSet::full(d.node_count());
        keep.remove(v);
        let (sub, _) = d.induced_subgraph(&keep);
        if let Some(c) = find_active_cycles(&sub, true).first() {
            out.fail(
                &json!({ "removed": d.label(v), "cycle": c.render(&sub) }),
                "deleting a node created an active cycle",
            );
        }
    }
    out
}

pub fn local_structure(ctx: &GraphCtx, cfg: &CheckConfig) -> Outcome {
    let d = ctx.d;
    let n = d.node_count();
    let mut rng = ctx.rng(cfg, 3);
    let mut out = Outcome::default();
    let all: Vec<NodeId> = d.nodes().collect();
    let family = if n <= 5 {
        all_subsets(n, &all)
    } else {
        subset_family(n, &all, &mut rng)
    };
    for k in family.into_iter().filter(|k| !k.is_empty()) {
        out.instances += 1;
        let q = json!({ "k": labels(d, &k) });
        let fast = has_local_relationships(d, &k);
        if fast != has_local_relationships_by_trails(d, &k) {
            out.fail(&q, "reachability and enumeration disagree on local relationships");
            continue;
        }
        if !fast {
            continue;
        }
        let p = decompose_local(d, &k).expect("K has local relationships");
        for v in p.violations(d, &k) {
            out.fail(&q, format!("partition: {v}"));
        }
        let ks = k.to_vec();
        for (i, &a) in ks.iter().enumerate() {
            for &b in &ks[i + 1..] {
                let dich = dichotomy(d, &k, a, b).expect("distinct members of a local set");
                if !dich.connected_in_k && !dich.dseparated_by_empty {
                    out.fail(
                        &q,
                        format!("{} and {} neither connected in K nor d-separated", d.label(a), d.label(b)),
                    );
                }
            }
        }
    }
    for v in d.nodes() {
        out.instances += 1;
        let mut rest = NodeSet::full(n);
        rest.remove(v);
        if local_after_removal(d, v) != has_local_relationships(d, &rest) {
            out.fail(&json!({ "removed": d.label(v) }), "neighbourhood test disagrees with V ∖ {v}");
        }
    }
    out
}

pub fn active_cycle_witness(ctx: &GraphCtx, _cfg: &CheckConfig) -> Outcome {
    let d = ctx.d;
    let mut out = Outcome::default();
    let found = find_active_cycles(d, false);
    for c in &found {
        out.instances += 1;
        if let Err(e) = c.validate(d) {
            out.fail(&json!({ "cycle": c.render(d) }), format!("invalid witness: {e}"));
        }
    }
    // brute force over every parent pair and every converging-free connector
    let mut exists = false;
    'outer: for v in d.nodes() {
        let pa = d.parents_of(v);
        for (i, &w) in pa.iter().enumerate() {
            for &z in &pa[i + 1..] {
                let mut allowed = NodeSet::full(d.node_count());
                allowed.remove(v);
                let cons = TrailConstraints::converging_free().within(allowed);
                for connector in Trails::new(d, w, z, cons) {
                    let c = ActiveCycle {
                        apex: v,
                        left_parent: w,
                        right_parent: z,
                        connector,
                    };
                    if c.validate(d).is_ok() {
                        exists = true;
                        break 'outer;
                    }
                }
            }
        }
    }
    out.instances += 1;
    if exists != !found.is_empty() {
        out.fail(
            &json!({}),
            format!("search reports {} cycles, brute force says exists = {exists}", found.len()),
        );
    }
    out
}
