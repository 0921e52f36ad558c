//! Brute-force count of regular-subgroup classes by cyclic extension.
//!
//! This shares nothing with the lifting code beyond the abelian group and its
//! automorphism list. Elements of `Hol(G)` are pairs `(g, α)` numbered
//! `g·|Aut| + α` and multiplied through lookup tables. Subgroups are built
//! bottom-up: every semiregular subgroup `W` of order dividing `|G|` has a
//! normal subgroup `V` of prime index, so `W = ⟨V, x⟩` for a class
//! representative `V` of the previous level and some `x ∈ N(V)` with
//! `x^p ∈ V`. Classes are tracked by the set of all conjugates seen so far.

use std::collections::HashMap;

use rustc_hash::FxHashSet;

use crate::abelian::{aut_elements, aut_order_formula, AbelianGroup};
use crate::error::{Error, Result};
use crate::perm::Perm;

pub const DEFAULT_ORACLE_LIMIT: u64 = 5000;

/// Sorted element ids of a subgroup.
pub type ElementSet = Vec<u32>;

pub struct Oracle {
    n: usize,
    auts: usize,
    /// `aut_map[α·n + x] = α(x)`.
    aut_map: Vec<u32>,
    aut_mul: Vec<u32>,
    aut_inv: Vec<u32>,
    aut_index: HashMap<Vec<u32>, u32>,
    add: Vec<u32>,
    neg: Vec<u32>,
    /// Non-identity elements without fixed points, plus the identity.
    semiregular: Vec<bool>,
    generators: Vec<u32>,
}

/// Result of an oracle run.
#[derive(Clone, Debug)]
pub struct OracleRun {
    /// Orbit-minimal element set of each regular class, sorted.
    pub keys: Vec<ElementSet>,
    /// Classes of semiregular subgroups with `k` prime factors in their order, by `k`.
    pub levels: Vec<usize>,
}

impl Oracle {
    pub fn new(group: &AbelianGroup) -> Result<Self> {
        Self::with_limit(group, DEFAULT_ORACLE_LIMIT)
    }

    /// Fails if `|Hol(G)|` exceeds `limit`.
    pub fn with_limit(group: &AbelianGroup, limit: u64) -> Result<Self> {
        let n = group.order() as usize;
        let hol = aut_order_formula(group) * n as u128;
        if hol > limit as u128 {
            return Err(Error::TooLarge {
                what: "holomorph order for the oracle",
                size: hol,
                bound: limit as u128,
            });
        }
        let maps: Vec<Vec<u32>> = aut_elements(group)?
            .iter()
            .map(|a| a.index_map(group).into_iter().map(|x| x as u32).collect())
            .collect();
        let auts = maps.len();
        let aut_index: HashMap<Vec<u32>, u32> = maps.iter().cloned().zip(0..).collect();
        let mut aut_mul = vec![0u32; auts * auts];
        for a in 0..auts {
            for b in 0..auts {
                let composed: Vec<u32> = (0..n).map(|x| maps[a][maps[b][x] as usize]).collect();
                aut_mul[a * auts + b] = aut_index[&composed];
            }
        }
        let identity_aut = aut_index[&(0..n as u32).collect::<Vec<_>>()];
        let aut_inv = (0..auts)
            .map(|a| (0..auts as u32).find(|&b| aut_mul[a * auts + b as usize] == identity_aut).unwrap())
            .collect();
        let table = group.addition_table();
        let add: Vec<u32> = table.iter().flatten().map(|&x| x as u32).collect();
        let neg = (0..n).map(|x| table[x].iter().position(|&v| v == 0).unwrap() as u32).collect();
        let aut_map: Vec<u32> = maps.concat();

        let mut oracle = Oracle {
            n,
            auts,
            aut_map,
            aut_mul,
            aut_inv,
            aut_index,
            add,
            neg,
            semiregular: Vec::new(),
            generators: Vec::new(),
        };
        let identity = oracle.identity();
        oracle.semiregular = (0..oracle.order() as u32)
            .map(|e| e == identity || (0..n as u32).all(|x| oracle.apply(e, x) != x))
            .collect();
        oracle.generators = oracle.hol_generators(group, identity_aut);
        Ok(oracle)
    }

    pub fn order(&self) -> usize {
        self.n * self.auts
    }

    fn id(&self, g: u32, a: u32) -> u32 {
        g * self.auts as u32 + a
    }

    fn parts(&self, e: u32) -> (u32, u32) {
        (e / self.auts as u32, e % self.auts as u32)
    }

    fn identity(&self) -> u32 {
        let ident: Vec<u32> = (0..self.n as u32).collect();
        self.id(0, self.aut_index[&ident])
    }

    /// `(g,α)(h,β) = (g + α(h), αβ)`.
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        let (g, a) = self.parts(x);
        let (h, b) = self.parts(y);
        let ah = self.aut_map[a as usize * self.n + h as usize];
        let sum = self.add[g as usize * self.n + ah as usize];
        self.id(sum, self.aut_mul[a as usize * self.auts + b as usize])
    }

    pub fn inv(&self, x: u32) -> u32 {
        let (g, a) = self.parts(x);
        let ai = self.aut_inv[a as usize];
        let shifted = self.aut_map[ai as usize * self.n + g as usize];
        self.id(self.neg[shifted as usize], ai)
    }

    /// `(g,α)·x = g + α(x)`.
    pub fn apply(&self, e: u32, x: u32) -> u32 {
        let (g, a) = self.parts(e);
        let ax = self.aut_map[a as usize * self.n + x as usize];
        self.add[g as usize * self.n + ax as usize]
    }

    /// Id of the holomorph element acting as `p`, if any.
    pub fn element_of(&self, p: &Perm) -> Option<u32> {
        if p.degree() != self.n {
            return None;
        }
        let g = p.apply(0) as u32;
        let ng = self.neg[g as usize];
        let map: Vec<u32> = (0..self.n)
            .map(|x| self.add[ng as usize * self.n + p.apply(x)])
            .collect();
        self.aut_index.get(&map).map(|&a| self.id(g, a))
    }

    fn hol_generators(&self, group: &AbelianGroup, identity_aut: u32) -> Vec<u32> {
        let mut gens: Vec<u32> = (0..group.rank())
            .map(|i| self.id(group.index(&group.generator(i)) as u32, identity_aut))
            .collect();
        // automorphisms, greedily, until they generate Aut(G)
        let mut reached = vec![false; self.auts];
        reached[identity_aut as usize] = true;
        let mut chosen: Vec<u32> = Vec::new();
        let mut count = 1;
        for a in 0..self.auts as u32 {
            if count == self.auts {
                break;
            }
            if reached[a as usize] {
                continue;
            }
            chosen.push(a);
            let mut queue: Vec<u32> = (0..self.auts as u32).filter(|&b| reached[b as usize]).collect();
            while let Some(b) = queue.pop() {
                for &c in &chosen {
                    let d = self.aut_mul[b as usize * self.auts + c as usize];
                    if !reached[d as usize] {
                        reached[d as usize] = true;
                        count += 1;
                        queue.push(d);
                    }
                }
            }
        }
        gens.extend(chosen.into_iter().map(|a| self.id(0, a)));
        gens
    }

    fn closure(&self, gens: &[u32]) -> ElementSet {
        let mut set = FxHashSet::default();
        let identity = self.identity();
        set.insert(identity);
        let mut queue = vec![identity];
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    queue.push(y);
                }
            }
        }
        let mut v: ElementSet = set.into_iter().collect();
        v.sort_unstable();
        v
    }

    fn conjugate(&self, set: &[u32], s: u32) -> ElementSet {
        let si = self.inv(s);
        let mut v: ElementSet = set.iter().map(|&x| self.mul(self.mul(s, x), si)).collect();
        v.sort_unstable();
        v
    }

    /// All conjugates of `set` under `Hol(G)`.
    pub fn conjugacy_class(&self, set: ElementSet) -> Vec<ElementSet> {
        let mut seen: FxHashSet<ElementSet> = FxHashSet::default();
        seen.insert(set.clone());
        let mut points = vec![set];
        let mut head = 0;
        while head < points.len() {
            for &s in &self.generators {
                let c = self.conjugate(&points[head], s);
                if seen.insert(c.clone()) {
                    points.push(c);
                }
            }
            head += 1;
        }
        points
    }

    /// Element ids of the subgroup generated by the permutations `gens`.
    pub fn element_set(&self, gens: &[Perm]) -> Result<ElementSet> {
        let ids = gens
            .iter()
            .map(|g| self.element_of(g).ok_or(Error::NotMember))
            .collect::<Result<Vec<u32>>>()?;
        Ok(self.closure(&ids))
    }

    /// Smallest conjugate of the subgroup generated by the permutations `gens`.
    pub fn class_key(&self, gens: &[Perm]) -> Result<ElementSet> {
        let set = self.element_set(gens)?;
        Ok(self.conjugacy_class(set).into_iter().min().unwrap())
    }

    /// Regular subgroups of `Hol(G)` up to conjugacy.
    pub fn run(&self) -> OracleRun {
        let identity = self.identity();
        let mut seen: FxHashSet<ElementSet> = FxHashSet::default();
        seen.insert(vec![identity]);
        // (elements, generators) of each class representative at the current level
        let mut level: Vec<(ElementSet, Vec<u32>)> = vec![(vec![identity], Vec::new())];
        let mut levels = vec![1];
        let mut keys = Vec::new();
        while !level.is_empty() {
            let mut next = Vec::new();
            for (v, v_gens) in &level {
                let mut member = vec![false; self.order()];
                for &x in v {
                    member[x as usize] = true;
                }
                let mut covered = member.clone();
                for x in 0..self.order() as u32 {
                    if covered[x as usize] || !self.semiregular[x as usize] {
                        continue;
                    }
                    let xi = self.inv(x);
                    if !v_gens.iter().all(|&g| member[self.mul(self.mul(x, g), xi) as usize]) {
                        continue;
                    }
                    // smallest k with x^k ∈ V
                    let (mut power, mut k) = (x, 1usize);
                    while !member[power as usize] {
                        power = self.mul(power, x);
                        k += 1;
                    }
                    if !is_prime(k) || self.n % (v.len() * k) != 0 {
                        continue;
                    }
                    let mut w: ElementSet = Vec::with_capacity(v.len() * k);
                    let mut coset_rep = identity;
                    for _ in 0..k {
                        w.extend(v.iter().map(|&y| self.mul(y, coset_rep)));
                        coset_rep = self.mul(coset_rep, x);
                    }
                    for &y in &w {
                        covered[y as usize] = true;
                    }
                    if !w.iter().all(|&y| self.semiregular[y as usize]) {
                        continue;
                    }
                    w.sort_unstable();
                    if seen.contains(&w) {
                        continue;
                    }
                    let class = self.conjugacy_class(w.clone());
                    if w.len() == self.n {
                        keys.push(class.iter().min().unwrap().clone());
                    }
                    seen.extend(class);
                    let mut gens = v_gens.clone();
                    gens.push(x);
                    next.push((w, gens));
                }
            }
            if !next.is_empty() {
                levels.push(next.len());
            }
            level = next;
        }
        keys.sort();
        OracleRun { keys, levels }
    }
}

fn is_prime(k: usize) -> bool {
    k >= 2 && (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0)
}

/// Number of conjugacy classes of regular subgroups of `Hol(G)`.
pub fn regular_class_count(group: &AbelianGroup, limit: u64) -> Result<usize> {
    Ok(Oracle::with_limit(group, limit)?.run().keys.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(desc: &str) -> usize {
        regular_class_count(&AbelianGroup::parse(desc).unwrap(), DEFAULT_ORACLE_LIMIT).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(count("2"), 1);
        assert_eq!(count("3"), 1);
        assert_eq!(count("4"), 2);
        assert_eq!(count("2,2"), 2);
    }

    #[test]
    fn table_arithmetic_is_a_group_action() {
        let g = AbelianGroup::parse("2,4").unwrap();
        let o = Oracle::new(&g).unwrap();
        assert_eq!(o.order(), 64);
        for x in 0..64 {
            assert_eq!(o.mul(x, o.inv(x)), o.identity());
            for y in (0..64).step_by(7) {
                for p in 0..8 {
                    assert_eq!(o.apply(o.mul(x, y), p), o.apply(x, o.apply(y, p)));
                }
            }
        }
    }

    #[test]
    fn generators_generate_the_holomorph() {
        for desc in ["8", "2,2,2", "3,3"] {
            let o = Oracle::new(&AbelianGroup::parse(desc).unwrap()).unwrap();
            assert_eq!(o.closure(&o.generators).len(), o.order());
        }
    }

    #[test]
    fn limit_is_enforced() {
        let g = AbelianGroup::parse("2,2,2,2").unwrap();
        assert!(matches!(Oracle::new(&g), Err(Error::TooLarge { .. })));
    }
}
