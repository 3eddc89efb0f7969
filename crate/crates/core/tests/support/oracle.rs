//! Brute-force reference for the finite multivalued engine, on graphs with
//! at most 32 states encoded as bitmasks.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use morseflow_core::morse::{
    alpha_limit, check_morse_order, detect_homoclinic, global_attractor, is_dynamically_gradient,
    local_attractors, maximal_weakly_invariant, omega_limit, repeller, reorder_morse,
    InvariantFamily, MultiflowGraph, ReorderOutcome, StateSet,
};

type Mask = u32;

pub struct Oracle {
    n: usize,
    succ: Vec<Mask>,
    pred: Vec<Mask>,
}

fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| m >> i & 1 == 1)
}

fn to_set(m: Mask) -> StateSet {
    bits(m).collect()
}

fn to_mask(s: &StateSet) -> Mask {
    s.iter().fold(0, |m, &x| m | 1 << x)
}

impl Oracle {
    pub fn new(succ: &[Vec<usize>]) -> Self {
        let n = succ.len();
        let succ_m: Vec<Mask> = succ.iter().map(|s| s.iter().fold(0, |m, &y| m | 1 << y)).collect();
        let mut pred = vec![0; n];
        for (x, &s) in succ_m.iter().enumerate() {
            for y in bits(s) {
                pred[y] |= 1 << x;
            }
        }
        Oracle { n, succ: succ_m, pred }
    }

    fn all(&self) -> Mask {
        (1u64.wrapping_shl(self.n as u32) - 1) as Mask
    }

    fn step(rel: &[Mask], s: Mask) -> Mask {
        bits(s).fold(0, |m, x| m | rel[x])
    }

    pub fn exact(&self, t: usize, x: usize) -> Mask {
        (0..t).fold(1 << x, |s, _| Self::step(&self.succ, s))
    }

    /// States met at infinitely many exact times: the union over the
    /// periodic tail of the eventually periodic sequence of exact sets.
    fn recurring(rel: &[Mask], start: Mask) -> Mask {
        let mut seen: HashMap<Mask, usize> = HashMap::new();
        let mut seq = Vec::new();
        let mut s = start;
        loop {
            if let Some(&t0) = seen.get(&s) {
                return seq[t0..].iter().fold(0, |m, &v| m | v);
            }
            seen.insert(s, seq.len());
            seq.push(s);
            s = Self::step(rel, s);
        }
    }

    pub fn omega(&self, x: usize) -> Mask {
        Self::recurring(&self.succ, 1 << x)
    }

    pub fn alpha(&self, x: usize) -> Mask {
        Self::recurring(&self.pred, 1 << x)
    }

    fn closure(rel: &[Mask], s: Mask) -> Mask {
        let mut r = s;
        loop {
            let next = r | Self::step(rel, r);
            if next == r {
                return r;
            }
            r = next;
        }
    }

    pub fn reach(&self, s: Mask) -> Mask {
        Self::closure(&self.succ, s)
    }

    pub fn coreach(&self, s: Mask) -> Mask {
        Self::closure(&self.pred, s)
    }

    pub fn cyclic(&self) -> Mask {
        (0..self.n)
            .filter(|&x| (1..=self.n).any(|t| self.exact(t, x) >> x & 1 == 1))
            .fold(0, |m, x| m | 1 << x)
    }

    /// Union of all subsets of `u` in which every state has a successor and
    /// a predecessor.
    pub fn mwi(&self, u: Mask) -> Mask {
        let mut best = 0;
        let mut m = u;
        loop {
            let ok = bits(m).all(|x| self.succ[x] & m != 0 && self.pred[x] & m != 0);
            if ok {
                best |= m;
            }
            if m == 0 {
                return best;
            }
            m = (m - 1) & u;
        }
    }

    pub fn omega_of(&self, a: Mask) -> Mask {
        bits(a).fold(0, |m, x| m | self.omega(x))
    }

    pub fn attractors(&self) -> BTreeSet<Mask> {
        (1..=self.all())
            .filter(|&a| Self::step(&self.succ, a) & !a == 0 && self.omega_of(a) == a)
            .collect()
    }

    pub fn repeller(&self, a: Mask) -> Mask {
        bits(self.mwi(self.all()))
            .filter(|&x| self.omega(x) & !a != 0)
            .fold(0, |m, x| m | 1 << x)
    }

    /// Quotient edge `i -> j`: a walk from a cyclic state of `i` to a cyclic
    /// state of `j` visiting a state outside both. Searched as reachability
    /// on (state, left-both-sets) pairs.
    pub fn exit_edge(&self, fam: &[Mask], i: usize, j: usize) -> bool {
        let cyc = self.cyclic();
        let inside = fam[i] | fam[j];
        let mut seen = [0 as Mask; 2];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for a in bits(cyc & fam[i]) {
            seen[0] |= 1 << a;
            stack.push((a, 0));
        }
        while let Some((x, f)) = stack.pop() {
            for y in bits(self.succ[x]) {
                let g = f | (inside >> y & 1 == 0) as usize;
                if seen[g] >> y & 1 == 0 {
                    seen[g] |= 1 << y;
                    stack.push((y, g));
                }
            }
        }
        seen[1] & cyc & fam[j] != 0
    }

    pub fn has_homoclinic(&self, fam: &[Mask]) -> bool {
        let k = fam.len();
        let mut r: Vec<Vec<bool>> = (0..k)
            .map(|i| (0..k).map(|j| self.exit_edge(fam, i, j)).collect())
            .collect();
        for m in 0..k {
            for i in 0..k {
                for j in 0..k {
                    if r[i][m] && r[m][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        (0..k).any(|i| r[i][i])
    }

    pub fn covered(&self, fam: &[Mask]) -> bool {
        bits(self.cyclic()).all(|x| {
            let class = self.reach(1 << x) & self.coreach(1 << x);
            fam.iter().any(|&s| class & !s == 0)
        })
    }

    /// Some cyclic state of `i` reaches a cyclic state of `j`.
    pub fn connects(&self, fam: &[Mask], i: usize, j: usize) -> bool {
        let cyc = self.cyclic();
        self.reach(cyc & fam[i]) & cyc & fam[j] != 0
    }
}

fn is_walk(g: &MultiflowGraph, w: &[usize]) -> bool {
    w.windows(2).all(|p| g.successors(p[0]).contains(&p[1]))
}

/// Compares every engine operation on `succ` and `family` against the
/// oracle. Returns whether the family was gradient, and so reordered.
pub fn check_graph(succ: &[Vec<usize>], family: &[StateSet]) -> Result<bool, String> {
    let g = MultiflowGraph::from_successors(succ.to_vec()).map_err(|e| e.to_string())?;
    let o = Oracle::new(succ);
    let n = succ.len();
    let ctx = |what: &str| format!("{what} on {succ:?} with family {family:?}");

    for x in 0..n {
        for t in 0..=2 * n as u64 + 3 {
            if to_mask(&g.reach_exact(t, x).unwrap()) != o.exact(t as usize, x) {
                return Err(ctx(&format!("reach_exact({t}, {x})")));
            }
        }
        if to_mask(&omega_limit(&g, x).unwrap()) != o.omega(x) {
            return Err(ctx(&format!("omega({x})")));
        }
        if to_mask(&alpha_limit(&g, x).unwrap()) != o.alpha(x) {
            return Err(ctx(&format!("alpha({x})")));
        }
    }
    for u in 0..=o.all() {
        if to_mask(&maximal_weakly_invariant(&g, &to_set(u))) != o.mwi(u) {
            return Err(ctx(&format!("mwi({u:#b})")));
        }
    }
    if to_mask(&global_attractor(&g)) != o.mwi(o.all()) {
        return Err(ctx("global attractor"));
    }
    let attractors: BTreeSet<Mask> = local_attractors(&g).iter().map(to_mask).collect();
    if attractors != o.attractors() {
        return Err(ctx(&format!("attractors {attractors:?} vs {:?}", o.attractors())));
    }
    for &a in &attractors {
        let star = to_mask(&repeller(&g, &to_set(a)).unwrap());
        if star != o.repeller(a) {
            return Err(ctx(&format!("repeller({a:#b})")));
        }
        if star & a != 0 || o.mwi(star) != star {
            return Err(ctx(&format!("duality for {a:#b}")));
        }
    }

    let fam = match InvariantFamily::from_sets(&g, family.to_vec()) {
        Ok(f) => f,
        Err(e) => return Err(ctx(&format!("family rejected: {e}"))),
    };
    let masks: Vec<Mask> = family.iter().map(to_mask).collect();
    let homoclinic = o.has_homoclinic(&masks);
    let witness = detect_homoclinic(&g, &fam);
    if witness.is_some() != homoclinic {
        return Err(ctx("homoclinic detection"));
    }
    if let Some(w) = &witness {
        let cyc = o.cyclic();
        let ok = w.sets.len() == w.walks.len() + 1
            && w.sets.first() == w.sets.last()
            && w.sets.windows(2).zip(&w.walks).all(|(p, walk)| {
                let (i, j) = (p[0], p[1]);
                let (a, b) = (walk[0], *walk.last().unwrap());
                is_walk(&g, walk)
                    && (cyc & masks[i]) >> a & 1 == 1
                    && (cyc & masks[j]) >> b & 1 == 1
                    && walk.iter().any(|&z| (masks[i] | masks[j]) >> z & 1 == 0)
            });
        if !ok {
            return Err(ctx(&format!("invalid witness {w:?}")));
        }
    }
    let gradient = o.covered(&masks) && !homoclinic;
    let report = is_dynamically_gradient(&g, &fam);
    if report.holds() != gradient || report.recurrence_covered != o.covered(&masks) {
        return Err(ctx("gradient verdict"));
    }

    if gradient {
        let (order, ordered) = match reorder_morse(&g, &fam).map_err(|e| e.to_string())? {
            ReorderOutcome::Ordered { order, family } => (order, family),
            ReorderOutcome::Failed(f) => return Err(ctx(&format!("reorder failed: {}", f.reason))),
        };
        let om: Vec<Mask> = order.iter().map(|&i| masks[i]).collect();
        for i in 0..om.len() {
            for j in 0..om.len() {
                if i != j && o.connects(&om, i, j) && j > i {
                    return Err(ctx(&format!("order {order:?} has upward connection {i}->{j}")));
                }
            }
        }
        let mut prev_star = o.mwi(o.all());
        let mut union = 0;
        for (k, &s) in om.iter().enumerate() {
            union |= s;
            let a = o.reach(union);
            if !o.attractors().contains(&a) || a & prev_star != s {
                return Err(ctx(&format!("Morse identity at {k} for order {order:?}")));
            }
            prev_star = o.repeller(a);
        }
        if !check_morse_order(&g, &ordered).holds() {
            return Err(ctx("check_morse_order"));
        }
    }
    Ok(gradient)
}

/// Families from a state colouring: colour `c > 0` gathers states into a
/// group whose maximal weakly invariant part becomes a set.
pub fn family_from_colours(succ: &[Vec<usize>], colours: &[usize]) -> Vec<StateSet> {
    let o = Oracle::new(succ);
    let max = colours.iter().copied().max().unwrap_or(0);
    (1..=max)
        .map(|c| {
            let group = colours
                .iter()
                .enumerate()
                .filter(|(_, &k)| k == c)
                .fold(0, |m, (x, _)| m | 1 << x);
            to_set(o.mwi(group))
        })
        .filter(|s| !s.is_empty())
        .collect()
}

/// Every family of pairwise disjoint nonempty weakly invariant sets.
pub fn all_families(succ: &[Vec<usize>]) -> Vec<Vec<StateSet>> {
    let o = Oracle::new(succ);
    let candidates: Vec<Mask> = (1..=o.all()).filter(|&m| o.mwi(m) == m).collect();
    let mut out = Vec::new();
    fn rec(c: &[Mask], start: usize, used: Mask, cur: &mut Vec<Mask>, out: &mut Vec<Vec<StateSet>>) {
        out.push(cur.iter().map(|&m| to_set(m)).collect());
        for k in start..c.len() {
            if c[k] & used == 0 {
                cur.push(c[k]);
                rec(c, k + 1, used | c[k], cur, out);
                cur.pop();
            }
        }
    }
    rec(&candidates, 0, 0, &mut Vec::new(), &mut out);
    out
}

/// All 343 multivalued maps on three states, each against every admissible
/// family. Returns the number of (graph, family) cases checked and how many
/// of them were gradient.
pub fn exhaustive_three() -> Result<(usize, usize), String> {
    let subsets: Vec<Vec<usize>> = (1u32..8).map(|m| bits(m).collect()).collect();
    let (mut cases, mut gradient) = (0, 0);
    for a in &subsets {
        for b in &subsets {
            for c in &subsets {
                let succ = vec![a.clone(), b.clone(), c.clone()];
                for fam in all_families(&succ) {
                    gradient += check_graph(&succ, &fam)? as usize;
                    cases += 1;
                }
            }
        }
    }
    Ok((cases, gradient))
}

/// Successor lists from nonempty bitmasks.
pub fn succ_from_masks(masks: &[u32]) -> Vec<Vec<usize>> {
    masks.iter().map(|&m| bits(m).collect()).collect()
}
