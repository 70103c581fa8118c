//! Depth-based slicing of propositional formulas: bounded countermodel
//! search over all rooted models up to a node budget, the `a_n` family
//! whose instances populate every slice, and slice membership checks.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{KripkeModel, NodeId, RawFact, RawModel};
use crate::syntax::{Formula, Signature};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KrankError {
    #[error("countermodel search handles propositional formulas only")]
    NotPropositional,
    #[error("search budget must allow at least one node")]
    EmptyBudget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Refuted,
    NotRefutedWithinBudget,
}

/// Outcome of a bounded countermodel search. `exact` records that every
/// model within the budget of smaller depth than `min_depth` forces the
/// formula — the search enumerates the whole budget space, so it is set
/// whenever the search completes.
#[derive(Clone, Debug)]
pub struct CountermodelReport {
    pub formula: Formula,
    pub status: SearchStatus,
    pub witness: Option<(KripkeModel, NodeId)>,
    pub min_depth: Option<usize>,
    pub budget: SearchBudget,
    pub atoms: Vec<String>,
    pub exact: bool,
}

/// Compact rooted propositional model used during enumeration: node 0 is
/// the root, `up[a]` masks the nodes above `a` (inclusive), one mask per
/// atom gives its upward-closed valuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct LightModel {
    pub n: usize,
    pub up: Vec<u64>,
    pub atom_masks: Vec<u64>,
    pub root_depth: usize,
}

impl LightModel {
    fn to_raw(&self, atoms: &[String]) -> RawModel {
        let nodes: Vec<String> = (0..self.n).map(|i| format!("n{i}")).collect();
        let mut edges = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if a != b && self.up[a] >> b & 1 == 1 {
                    // Cover pairs only.
                    let between = (0..self.n).any(|c| {
                        c != a && c != b && self.up[a] >> c & 1 == 1 && self.up[c] >> b & 1 == 1
                    });
                    if !between {
                        edges.push((nodes[a].clone(), nodes[b].clone()));
                    }
                }
            }
        }
        let mut atom_map: BTreeMap<String, Vec<RawFact>> = BTreeMap::new();
        for (ai, mask) in self.atom_masks.iter().enumerate() {
            for (b, node) in nodes.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    atom_map
                        .entry(node.clone())
                        .or_default()
                        .push(RawFact { name: atoms[ai].clone(), args: vec![] });
                }
            }
        }
        RawModel {
            sig: Signature::propositional(atoms.iter().cloned()).unwrap(),
            nodes,
            edges,
            domains: BTreeMap::new(),
            atoms: atom_map,
        }
    }
}

/// Strict partial orders on `k` labeled points embedded in index order
/// (every order is isomorphic to such an embedding), deduplicated up to
/// isomorphism and sorted by canonical code. Bit `i * k + j` means `i < j`.
fn canonical_posets(k: usize) -> Vec<u32> {
    if k == 0 {
        return vec![0];
    }
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let mut seen = BTreeSet::new();
    for choice in 0u32..(1 << pairs.len()) {
        let mut rel = 0u32;
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if choice >> b & 1 == 1 {
                rel |= 1 << (i * k + j);
            }
        }
        let transitive = (0..k).all(|i| {
            (0..k).all(|j| {
                rel >> (i * k + j) & 1 == 0
                    || (0..k).all(|l| rel >> (j * k + l) & 1 == 0 || rel >> (i * k + l) & 1 == 1)
            })
        });
        if !transitive {
            continue;
        }
        seen.insert(canonical_code(rel, k));
    }
    seen.into_iter().collect()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..k).collect();
    permute(&mut items, 0, &mut out);
    out
}

fn permute(items: &mut Vec<usize>, at: usize, out: &mut Vec<Vec<usize>>) {
    if at == items.len() {
        out.push(items.clone());
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, out);
        items.swap(at, i);
    }
}

fn apply_perm(rel: u32, k: usize, perm: &[usize]) -> u32 {
    let mut out = 0u32;
    for i in 0..k {
        for j in 0..k {
            if rel >> (i * k + j) & 1 == 1 {
                out |= 1 << (perm[i] * k + perm[j]);
            }
        }
    }
    out
}

fn canonical_code(rel: u32, k: usize) -> u32 {
    permutations(k).iter().map(|p| apply_perm(rel, k, p)).min().unwrap()
}

/// Streams every rooted model with at most `max_nodes` nodes and a monotone
/// valuation of `n_atoms` atoms, up to isomorphism, in deterministic order
/// (node count, then poset code, then valuation code).
pub(crate) fn for_each_light(n_atoms: usize, max_nodes: usize, mut f: impl FnMut(&LightModel)) {
    for n in 1..=max_nodes {
        let k = n - 1;
        for rel in canonical_posets(k) {
            // Rooted model: node 0 below everything, poset point e -> node e+1.
            let mut up = vec![0u64; n];
            up[0] = (1u64 << n) - 1;
            for e in 0..k {
                let mut mask = 1u64 << (e + 1);
                for fpt in 0..k {
                    if rel >> (e * k.max(1) + fpt) & 1 == 1 {
                        mask |= 1u64 << (fpt + 1);
                    }
                }
                up[e + 1] = mask;
            }
            let root_depth = {
                let mut depth = vec![0usize; n];
                // Nodes indexed so that i < j whenever i strictly below j is
                // not guaranteed here; compute by fixpoint instead.
                let mut changed = true;
                while changed {
                    changed = false;
                    for a in 0..n {
                        for b in 0..n {
                            if a != b && up[a] >> b & 1 == 1 && depth[a] < depth[b] + 1 {
                                depth[a] = depth[b] + 1;
                                changed = true;
                            }
                        }
                    }
                }
                depth[0]
            };

            // Upward-closed atom masks.
            let upsets: Vec<u64> = (0u64..(1 << n))
                .filter(|&s| (0..n).all(|a| s >> a & 1 == 0 || up[a] & !s == 0))
                .collect();
            let auts: Vec<Vec<usize>> = permutations(k)
                .into_iter()
                .filter(|p| apply_perm(rel, k, p) == rel)
                .collect();

            let mut tuple = vec![0usize; n_atoms];
            let mut canon_seen: BTreeSet<Vec<u64>> = BTreeSet::new();
            loop {
                let masks: Vec<u64> = tuple.iter().map(|&i| upsets[i]).collect();
                let canon = auts
                    .iter()
                    .map(|p| {
                        masks
                            .iter()
                            .map(|&mask| {
                                let mut out = 0u64;
                                for b in 0..n {
                                    if mask >> b & 1 == 1 {
                                        let nb = if b == 0 { 0 } else { p[b - 1] + 1 };
                                        out |= 1 << nb;
                                    }
                                }
                                out
                            })
                            .collect::<Vec<u64>>()
                    })
                    .min()
                    .unwrap();
                if canon_seen.insert(canon.clone()) {
                    f(&LightModel { n, up: up.clone(), atom_masks: canon, root_depth });
                }
                // Next tuple in mixed radix.
                let mut pos = 0;
                loop {
                    if pos == n_atoms {
                        break;
                    }
                    tuple[pos] += 1;
                    if tuple[pos] < upsets.len() {
                        break;
                    }
                    tuple[pos] = 0;
                    pos += 1;
                }
                if pos == n_atoms {
                    break;
                }
            }
        }
    }
}

/// All rooted models over the given atoms with at most `max_nodes` nodes,
/// each with a monotone valuation, up to isomorphism, in deterministic
/// order.
pub fn enumerate_models(atoms: &[String], max_nodes: usize) -> Vec<KripkeModel> {
    let mut out = Vec::new();
    for_each_light(atoms.len(), max_nodes, |lm| {
        out.push(KripkeModel::from_raw(&lm.to_raw(atoms)).expect("enumerated models are valid"));
    });
    out
}

/// Forcing of a propositional formula on a light model, one bit per node.
pub(crate) fn force_mask(lm: &LightModel, f: &Formula, atom_of: &BTreeMap<&str, usize>) -> u64 {
    match f {
        Formula::Bot => 0,
        Formula::Atom(name) => lm.atom_masks[atom_of[name.as_str()]],
        Formula::And(a, b) => force_mask(lm, a, atom_of) & force_mask(lm, b, atom_of),
        Formula::Or(a, b) => force_mask(lm, a, atom_of) | force_mask(lm, b, atom_of),
        Formula::Imp(a, b) => {
            let ma = force_mask(lm, a, atom_of);
            let mb = force_mask(lm, b, atom_of);
            let bad = ma & !mb;
            let mut out = 0u64;
            for node in 0..lm.n {
                if lm.up[node] & bad == 0 {
                    out |= 1 << node;
                }
            }
            out
        }
        _ => unreachable!("propositional search"),
    }
}

fn prop_atoms(f: &Formula, out: &mut BTreeSet<String>) -> bool {
    match f {
        Formula::Bot => true,
        Formula::Atom(name) => {
            out.insert(name.clone());
            true
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            prop_atoms(a, out) && prop_atoms(b, out)
        }
        _ => false,
    }
}

/// Bounded search for the least countermodel depth of a propositional
/// formula. Enumerates every rooted model within the node budget over the
/// formula's own atoms; a depth-0 refutation means the formula is
/// classically falsifiable.
pub fn kripke_rank(a: &Formula, budget: SearchBudget) -> Result<CountermodelReport, KrankError> {
    if budget.max_nodes == 0 {
        return Err(KrankError::EmptyBudget);
    }
    let mut atoms = BTreeSet::new();
    if !prop_atoms(a, &mut atoms) {
        return Err(KrankError::NotPropositional);
    }
    let atoms: Vec<String> = atoms.into_iter().collect();
    let atom_of: BTreeMap<&str, usize> =
        atoms.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

    let mut best: Option<(usize, LightModel)> = None;
    for_each_light(atoms.len(), budget.max_nodes, |lm| {
        if force_mask(lm, a, &atom_of) & 1 == 0 {
            let better = match &best {
                None => true,
                Some((d, _)) => lm.root_depth < *d,
            };
            if better {
                best = Some((lm.root_depth, lm.clone()));
            }
        }
    });

    Ok(match best {
        Some((depth, lm)) => {
            let model = KripkeModel::from_raw(&lm.to_raw(&atoms)).expect("witness is valid");
            let root = model.node("n0").unwrap();
            CountermodelReport {
                formula: a.clone(),
                status: SearchStatus::Refuted,
                witness: Some((model, root)),
                min_depth: Some(depth),
                budget,
                atoms,
                exact: true,
            }
        }
        None => CountermodelReport {
            formula: a.clone(),
            status: SearchStatus::NotRefutedWithinBudget,
            witness: None,
            min_depth: None,
            budget,
            atoms,
            exact: true,
        },
    })
}

/// The family `a_0 = _|_`, `a_{n+1} = p_n | (p_n -> a_n)`; `a_n(n)` has a
/// countermodel of depth exactly `n` and none shallower.
pub fn a_n(n: usize) -> Formula {
    let mut f = Formula::Bot;
    for i in 0..n {
        let p = Formula::atom(format!("p{i}"));
        f = p.clone().or(p.imp(f));
    }
    f
}

/// The `(n+1)`-node chain refuting `a_n(n)` (and its excluded-middle
/// instance) at the root: atom `p_i` becomes true at distance `i` from the
/// top.
pub fn chain_witness(n: usize) -> KripkeModel {
    let atoms: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let nodes: Vec<String> = (0..=n).map(|j| format!("l{j}")).collect();
    let edges = nodes.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    let mut atom_map: BTreeMap<String, Vec<RawFact>> = BTreeMap::new();
    for (i, atom) in atoms.iter().enumerate() {
        for (j, node) in nodes.iter().enumerate() {
            if j >= n - i {
                atom_map
                    .entry(node.clone())
                    .or_default()
                    .push(RawFact { name: atom.clone(), args: vec![] });
            }
        }
    }
    KripkeModel::from_raw(&RawModel {
        sig: Signature::propositional(atoms.iter().cloned()).unwrap(),
        nodes,
        edges,
        domains: BTreeMap::new(),
        atoms: atom_map,
    })
    .expect("chain witness is valid")
}

/// Slice membership report for the excluded-middle instance of `a`.
#[derive(Clone, Debug)]
pub struct SliceReport {
    pub instance: Formula,
    pub report: CountermodelReport,
    /// `Some(true)` when the instance's least countermodel depth equals `n`
    /// within budget; `None` when no countermodel was found at all.
    pub in_slice: Option<bool>,
}

pub fn pem_slice_check(a: &Formula, n: usize, budget: SearchBudget) -> Result<SliceReport, KrankError> {
    let instance = a.clone().or(a.clone().neg());
    let report = kripke_rank(&instance, budget)?;
    let in_slice = report.min_depth.map(|d| d == n);
    Ok(SliceReport { instance, report, in_slice })
}
