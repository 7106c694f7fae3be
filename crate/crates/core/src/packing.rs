//! Maximal families of pairwise disjoint translates `i + R` in `Z/m`, with
//! offsets `i` drawn from a candidate set `I`.
//!
//! Two translates `i + R` and `i' + R` meet exactly when `i - i'` lies in the
//! difference set `R - R`, so the problem is maximum independent set in the
//! conflict graph on `I` with edges at those differences.
//!
//! Everything is ordered by ascending residue. The exact solver explores
//! "include the lowest candidate" before "exclude it" and only accepts strictly
//! larger families, so the family it returns is the lexicographically least
//! maximum one, which is also what [`brute_force_packing`] returns.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingInstance {
    modulus: u32,
    shape: Vec<u32>,
    candidates: Vec<u32>,
}

impl PackingInstance {
    /// Reduces everything mod `modulus` and sorts/dedups both sets.
    pub fn new(
        modulus: u32,
        shape: impl IntoIterator<Item = u32>,
        candidates: impl IntoIterator<Item = u32>,
    ) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Domain("packing modulus must be positive".into()));
        }
        let norm = |it: &mut dyn Iterator<Item = u32>| {
            let set: BTreeSet<u32> = it.map(|x| x % modulus).collect();
            set.into_iter().collect::<Vec<_>>()
        };
        Ok(PackingInstance {
            modulus,
            shape: norm(&mut shape.into_iter()),
            candidates: norm(&mut candidates.into_iter()),
        })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn shape(&self) -> &[u32] {
        &self.shape
    }

    pub fn candidates(&self) -> &[u32] {
        &self.candidates
    }

    /// The same instance with every candidate shifted by `c`.
    pub fn shifted(&self, c: u32) -> Self {
        let m = u64::from(self.modulus);
        PackingInstance::new(
            self.modulus,
            self.shape.iter().copied(),
            self.candidates
                .iter()
                .map(|&i| ((u64::from(i) + u64::from(c)) % m) as u32),
        )
        .expect("modulus already validated")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PackingMethod {
    Exact,
    Greedy,
    Brute,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PackingResult {
    pub d: usize,
    /// Offsets of the chosen translates, ascending.
    pub witness: Vec<u32>,
    pub method: PackingMethod,
    /// Whether `d` is proven maximal. A node budget can stop the exact search
    /// early; `d` is then the best family found, still a valid lower bound,
    /// and the witness is no longer guaranteed lexicographically least.
    pub optimal: bool,
    /// An upper bound on the true maximum; equals `d` when `optimal`.
    pub upper_bound: usize,
    pub nodes: u64,
}

/// `R - R` in `Z/m`, ascending.
pub fn conflict_diffs(shape: &[u32], modulus: u32) -> Vec<u32> {
    let m = u64::from(modulus);
    let set: BTreeSet<u32> = shape
        .iter()
        .flat_map(|&a| {
            shape
                .iter()
                .map(move |&b| ((u64::from(a) + m - u64::from(b) % m) % m) as u32)
        })
        .collect();
    set.into_iter().collect()
}

/// Checks pairwise disjointness of `{i + R : i in offsets}` by building the
/// translates, independent of any conflict graph.
pub fn translates_disjoint(modulus: u32, shape: &[u32], offsets: &[u32]) -> bool {
    let m = u64::from(modulus);
    let mut seen = BTreeSet::new();
    let distinct: BTreeSet<u32> = offsets.iter().map(|&i| i % modulus).collect();
    if distinct.len() != offsets.len() && !shape.is_empty() {
        return false;
    }
    for &i in offsets {
        for &r in shape {
            if !seen.insert((u64::from(i) + u64::from(r)) % m) {
                return false;
            }
        }
    }
    true
}

/// Ascending greedy: take each candidate whose translate misses everything
/// taken so far.
pub fn max_disjoint_translates_greedy(inst: &PackingInstance) -> PackingResult {
    let m = inst.modulus as usize;
    let mut occupied = vec![false; m];
    let mut witness = Vec::new();
    for &i in &inst.candidates {
        let pts: Vec<usize> = inst
            .shape
            .iter()
            .map(|&r| ((u64::from(i) + u64::from(r)) % m as u64) as usize)
            .collect();
        if pts.iter().all(|&x| !occupied[x]) {
            for x in pts {
                occupied[x] = true;
            }
            witness.push(i);
        }
    }
    PackingResult {
        d: witness.len(),
        witness,
        method: PackingMethod::Greedy,
        optimal: false,
        upper_bound: inst.candidates.len(),
        nodes: 0,
    }
}

/// Exhaustive oracle over all independent families; refuses `|I| > 20`.
pub fn brute_force_packing(inst: &PackingInstance) -> Result<PackingResult> {
    let n = inst.candidates.len();
    if n > 20 {
        return Err(Error::TooLarge(n));
    }
    let m = u64::from(inst.modulus);
    let translates: Vec<BTreeSet<u64>> = inst
        .candidates
        .iter()
        .map(|&i| {
            inst.shape
                .iter()
                .map(|&r| (u64::from(i) + u64::from(r)) % m)
                .collect()
        })
        .collect();
    let mut conflict = vec![0u32; n];
    for a in 0..n {
        for b in 0..n {
            if a != b && !translates[a].is_disjoint(&translates[b]) {
                conflict[a] |= 1 << b;
            }
        }
    }
    let mut best: Vec<u32> = Vec::new();
    let mut nodes = 0u64;
    let mut stack: Vec<(usize, u32)> = vec![(0, 0)];
    while let Some((next, mask)) = stack.pop() {
        nodes += 1;
        if next == n {
            let family: Vec<u32> = (0..n)
                .filter(|&b| mask & (1 << b) != 0)
                .map(|b| inst.candidates[b])
                .collect();
            if family.len() > best.len() || (family.len() == best.len() && family < best) {
                best = family;
            }
            continue;
        }
        stack.push((next + 1, mask));
        if conflict[next] & mask == 0 {
            stack.push((next + 1, mask | (1 << next)));
        }
    }
    Ok(PackingResult {
        d: best.len(),
        upper_bound: best.len(),
        witness: best,
        method: PackingMethod::Brute,
        optimal: true,
        nodes,
    })
}

/// Exact maximum with no node limit.
pub fn max_disjoint_translates_exact(inst: &PackingInstance) -> PackingResult {
    max_disjoint_translates_budgeted(inst, None)
}

/// Exact branch and bound; gives up after `node_budget` branchings if given,
/// returning the best family found so far with `optimal = false`.
pub fn max_disjoint_translates_budgeted(
    inst: &PackingInstance,
    node_budget: Option<u64>,
) -> PackingResult {
    let mut solver = Solver::new(inst, node_budget);
    let mut all = solver.empty();
    for v in 0..solver.n {
        set(&mut all, v);
    }
    let upper: usize = solver
        .components(&all)
        .iter()
        .map(|c| solver.bound(c))
        .sum();
    let best = solver.solve(&all);
    let witness: Vec<u32> = best.iter().map(|&v| inst.candidates[v]).collect();
    let optimal = !solver.exhausted || witness.len() == upper;
    PackingResult {
        d: witness.len(),
        upper_bound: if optimal { witness.len() } else { upper },
        witness,
        method: PackingMethod::Exact,
        optimal,
        nodes: solver.nodes,
    }
}

type Bits = Vec<u64>;

const MEMO_LIMIT: usize = 1 << 16;

#[inline]
fn lowest(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

#[inline]
fn set(bits: &mut [u64], v: usize) {
    bits[v / 64] |= 1u64 << (v % 64);
}

#[inline]
fn clear(bits: &mut [u64], v: usize) {
    bits[v / 64] &= !(1u64 << (v % 64));
}

fn count(bits: &[u64]) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

fn intersect_count(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

fn meet(a: &[u64], b: &[u64]) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn members(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            (w != 0).then(|| {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                k * 64 + b
            })
        })
    })
}

fn remove(cand: &mut [u64], nbrs: &[u64]) {
    for (c, a) in cand.iter_mut().zip(nbrs) {
        *c &= !a;
    }
}

struct Solver<'a> {
    inst: &'a PackingInstance,
    n: usize,
    words: usize,
    adj: Vec<Bits>,
    stamp: Vec<u32>,
    generation: u32,
    nodes: u64,
    budget: Option<u64>,
    exhausted: bool,
    memo: HashMap<Bits, Vec<usize>>,
}

impl<'a> Solver<'a> {
    fn new(inst: &'a PackingInstance, budget: Option<u64>) -> Self {
        let n = inst.candidates.len();
        let words = n.div_ceil(64).max(1);
        let m = u64::from(inst.modulus);
        let diffs: Vec<u32> = conflict_diffs(&inst.shape, inst.modulus)
            .into_iter()
            .filter(|&d| d != 0)
            .collect();
        let mut adj = vec![vec![0u64; words]; n];
        for (v, &i) in inst.candidates.iter().enumerate() {
            for &d in &diffs {
                let target = ((u64::from(i) + u64::from(d)) % m) as u32;
                if let Ok(w) = inst.candidates.binary_search(&target) {
                    set(&mut adj[v], w);
                    set(&mut adj[w], v);
                }
            }
        }
        Solver {
            inst,
            n,
            words,
            adj,
            stamp: vec![0; inst.modulus as usize],
            generation: 0,
            nodes: 0,
            budget,
            exhausted: false,
            memo: HashMap::new(),
        }
    }

    fn empty(&self) -> Bits {
        vec![0; self.words]
    }

    fn components(&self, cand: &[u64]) -> Vec<Bits> {
        let mut rest = cand.to_vec();
        let mut out = Vec::new();
        while let Some(v) = lowest(&rest) {
            clear(&mut rest, v);
            let mut comp = self.empty();
            let mut frontier = self.empty();
            set(&mut comp, v);
            set(&mut frontier, v);
            while let Some(w) = lowest(&frontier) {
                clear(&mut frontier, w);
                for k in 0..self.words {
                    let new = self.adj[w][k] & rest[k];
                    rest[k] &= !new;
                    comp[k] |= new;
                    frontier[k] |= new;
                }
            }
            out.push(comp);
        }
        out
    }

    /// Points of `Z/m` covered by the translates of `cand`.
    fn coverage(&mut self, cand: &[u64]) -> usize {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        let m = u64::from(self.inst.modulus);
        let mut covered = 0;
        let mut rest = cand.to_vec();
        while let Some(v) = lowest(&rest) {
            clear(&mut rest, v);
            let i = u64::from(self.inst.candidates[v]);
            for &s in &self.inst.shape {
                let x = ((i + u64::from(s)) % m) as usize;
                if self.stamp[x] != self.generation {
                    self.stamp[x] = self.generation;
                    covered += 1;
                }
            }
        }
        covered
    }

    /// Upper bound on the independence number of a connected `cand`.
    fn bound(&mut self, cand: &[u64]) -> usize {
        let mut b = count(cand);
        let r = self.inst.shape.len();
        if r > 1 {
            // disjoint translates of size r inside the covered points
            b = b.min(self.coverage(cand) / r);
        }
        let mut cliques = 0;
        let mut rest = cand.to_vec();
        while let Some(v) = lowest(&rest) {
            clear(&mut rest, v);
            cliques += 1;
            if cliques >= b {
                return b;
            }
            let mut common: Bits = rest.iter().zip(&self.adj[v]).map(|(x, y)| x & y).collect();
            while let Some(w) = lowest(&common) {
                clear(&mut rest, w);
                clear(&mut common, w);
                for (c, a) in common.iter_mut().zip(&self.adj[w]) {
                    *c &= a;
                }
            }
        }
        b.min(cliques)
    }

    /// Takes every isolated vertex, and every pendant vertex lying below its
    /// only neighbour; some lexicographically least maximum family contains
    /// all of them.
    fn force(&self, cand: &mut Bits, chosen: &mut Vec<usize>) {
        loop {
            let mut changed = false;
            let mut scan = cand.clone();
            while let Some(v) = lowest(&scan) {
                clear(&mut scan, v);
                if cand[v / 64] & (1 << (v % 64)) == 0 {
                    continue;
                }
                let take = match intersect_count(cand, &self.adj[v]) {
                    0 => true,
                    1 => {
                        let nbrs: Bits =
                            cand.iter().zip(&self.adj[v]).map(|(c, a)| c & a).collect();
                        lowest(&nbrs).is_some_and(|u| v < u)
                    }
                    _ => false,
                };
                if take {
                    chosen.push(v);
                    clear(cand, v);
                    remove(cand, &self.adj[v]);
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// Lexicographically least maximum independent subset of `cand`.
    fn solve(&mut self, cand: &[u64]) -> Vec<usize> {
        let comps = self.components(cand);
        if comps.len() == 1 {
            return self.solve_connected(&comps[0]);
        }
        let mut out: Vec<usize> = comps.iter().flat_map(|c| self.solve_connected(c)).collect();
        out.sort_unstable();
        out
    }

    /// Minimum-degree greedy on `cand`, ties to the lowest vertex.
    fn min_degree_greedy(&self, cand: &[u64]) -> Vec<usize> {
        let mut live = cand.to_vec();
        let mut deg = vec![0usize; self.n];
        let mut queue = BTreeSet::new();
        for v in members(cand) {
            deg[v] = intersect_count(cand, &self.adj[v]);
            queue.insert((deg[v], v));
        }
        let mut out = Vec::new();
        while let Some((_, v)) = queue.pop_first() {
            out.push(v);
            clear(&mut live, v);
            let nbrs: Vec<usize> = members(&meet(&live, &self.adj[v])).collect();
            for &u in &nbrs {
                queue.remove(&(deg[u], u));
                clear(&mut live, u);
            }
            for u in nbrs {
                for w in members(&meet(&live, &self.adj[u])) {
                    queue.remove(&(deg[w], w));
                    deg[w] -= 1;
                    queue.insert((deg[w], w));
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn solve_connected(&mut self, root: &[u64]) -> Vec<usize> {
        if let Some(hit) = self.memo.get(root) {
            return hit.clone();
        }
        let found = self.search_connected(root);
        if !self.exhausted && self.memo.len() < MEMO_LIMIT {
            self.memo.insert(root.to_vec(), found.clone());
        }
        found
    }

    fn search_connected(&mut self, root: &[u64]) -> Vec<usize> {
        // the include-first leaf is the ascending greedy
        let mut ascending = Vec::new();
        let mut rest = root.to_vec();
        while let Some(v) = lowest(&rest) {
            ascending.push(v);
            clear(&mut rest, v);
            remove(&mut rest, &self.adj[v]);
        }
        let heuristic = self.min_degree_greedy(root);
        // a family of size best_len exists; best is the first leaf reaching it
        let mut best_len = ascending.len().max(heuristic.len());
        let mut best = (ascending.len() == best_len).then_some(ascending);
        let fallback = heuristic;
        let mut chosen: Vec<usize> = Vec::new();
        // pending exclude branches: (candidates, chosen length)
        let mut stack: Vec<(Bits, usize)> = vec![(root.to_vec(), 0)];
        while let Some((mut cand, depth)) = stack.pop() {
            chosen.truncate(depth);
            loop {
                self.force(&mut cand, &mut chosen);
                let Some(v) = lowest(&cand) else {
                    if chosen.len() > best_len || (best.is_none() && chosen.len() == best_len) {
                        best_len = chosen.len();
                        let mut leaf = chosen.clone();
                        leaf.sort_unstable();
                        best = Some(leaf);
                    }
                    break;
                };
                if self.exhausted || self.budget.is_some_and(|b| self.nodes >= b) {
                    self.exhausted = true;
                    return best.unwrap_or(fallback);
                }
                self.nodes += 1;
                let comps = self.components(&cand);
                if comps.len() > 1 {
                    let mut full = chosen.clone();
                    for c in &comps {
                        full.extend(self.solve_connected(c));
                    }
                    if full.len() > best_len || (best.is_none() && full.len() == best_len) {
                        best_len = full.len();
                        full.sort_unstable();
                        best = Some(full);
                    }
                    break;
                }
                let reach = chosen.len() + self.bound(&cand);
                if reach < best_len || (best.is_some() && reach == best_len) {
                    break;
                }
                let mut without = cand.clone();
                clear(&mut without, v);
                stack.push((without, chosen.len()));
                chosen.push(v);
                clear(&mut cand, v);
                remove(&mut cand, &self.adj[v]);
            }
        }
        best.unwrap_or(fallback)
    }
}
