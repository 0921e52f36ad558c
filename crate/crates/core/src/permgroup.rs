//! Permutation groups with deterministic stabilizer chains.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::perm::Perm;

#[derive(Clone, Debug)]
struct Level {
    base: usize,
    /// Strong generators fixing every earlier base point.
    gens: Vec<usize>,
    orbit: Vec<usize>,
    /// `transversal[x] = u` with `u(base) = x`, for `x` in the orbit.
    transversal: Vec<Option<Perm>>,
}

/// A permutation group with a base and strong generating set.
///
/// Base points are chosen deterministically (smallest moved point of the
/// generator that forces a new level), so identical generator lists always
/// give identical chains.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    strong: Vec<Perm>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            gens: Vec::new(),
            strong: Vec::new(),
            levels: Vec::new(),
        }
    }

    /// Schreier–Sims on the given generators.
    pub fn new(degree: usize, gens: &[Perm]) -> Self {
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut group = PermGroup {
            degree,
            gens: gens.clone(),
            strong: Vec::new(),
            levels: Vec::new(),
        };
        let mut base: Vec<usize> = Vec::new();
        for g in &gens {
            debug_assert_eq!(g.degree(), degree);
            if base.iter().all(|&b| g.fixes(b)) {
                base.push(first_moved(g));
            }
            group.strong.push(g.clone());
        }
        group.levels = base
            .iter()
            .map(|&b| Level {
                base: b,
                gens: Vec::new(),
                orbit: Vec::new(),
                transversal: Vec::new(),
            })
            .collect();
        for l in 0..group.levels.len() {
            group.rebuild_level(l);
        }
        group.complete();
        group
    }

    fn rebuild_level(&mut self, l: usize) {
        let fixed: Vec<usize> = self.levels[..l].iter().map(|lv| lv.base).collect();
        let gens: Vec<usize> = (0..self.strong.len())
            .filter(|&i| fixed.iter().all(|&b| self.strong[i].fixes(b)))
            .collect();
        let base = self.levels[l].base;
        let mut transversal: Vec<Option<Perm>> = vec![None; self.degree];
        transversal[base] = Some(Perm::identity(self.degree));
        let mut orbit = vec![base];
        let mut head = 0;
        while head < orbit.len() {
            let x = orbit[head];
            head += 1;
            for &gi in &gens {
                let s = &self.strong[gi];
                let y = s.apply(x);
                if transversal[y].is_none() {
                    transversal[y] = Some(s.compose(transversal[x].as_ref().unwrap()));
                    orbit.push(y);
                }
            }
        }
        let level = &mut self.levels[l];
        level.gens = gens;
        level.orbit = orbit;
        level.transversal = transversal;
    }

    /// Sifts `h` through levels `from..`; returns the residue and the level at
    /// which it dropped out (`levels.len()` when it passed every level).
    fn sift_from(&self, mut h: Perm, from: usize) -> (Perm, usize) {
        for l in from..self.levels.len() {
            let level = &self.levels[l];
            let x = h.apply(level.base);
            match &level.transversal[x] {
                Some(u) => h = u.inverse().compose(&h),
                None => return (h, l),
            }
        }
        (h, self.levels.len())
    }

    fn complete(&mut self) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let l = i as usize;
            let mut restart = None;
            'check: for oi in 0..self.levels[l].orbit.len() {
                let delta = self.levels[l].orbit[oi];
                for gk in 0..self.levels[l].gens.len() {
                    let s = &self.strong[self.levels[l].gens[gk]];
                    let level = &self.levels[l];
                    let u_delta = level.transversal[delta].as_ref().unwrap();
                    let u_image = level.transversal[s.apply(delta)].as_ref().unwrap();
                    let schreier = u_image.inverse().compose(s).compose(u_delta);
                    let (residue, j) = self.sift_from(schreier, l + 1);
                    if j < self.levels.len() || !residue.is_identity() {
                        if j == self.levels.len() {
                            self.levels.push(Level {
                                base: first_moved(&residue),
                                gens: Vec::new(),
                                orbit: Vec::new(),
                                transversal: Vec::new(),
                            });
                        }
                        self.strong.push(residue);
                        for m in l + 1..=j {
                            self.rebuild_level(m);
                        }
                        restart = Some(j);
                        break 'check;
                    }
                }
            }
            match restart {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn order(&self) -> u64 {
        self.levels.iter().map(|l| l.orbit.len() as u64).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (residue, j) = self.sift_from(g.clone(), 0);
        j == self.levels.len() && residue.is_identity()
    }

    /// Adds a generator; returns `false` (and leaves the group unchanged) if it
    /// was already a member.
    pub fn add_generator(&mut self, g: &Perm) -> bool {
        if self.contains(g) {
            return false;
        }
        let mut gens = self.gens.clone();
        gens.push(g.clone());
        let mut strong = self.strong.clone();
        strong.push(g.clone());
        let mut rebuilt = PermGroup::new(self.degree, &strong);
        rebuilt.gens = gens;
        *self = rebuilt;
        true
    }

    /// Element of the coset `g·H` whose images of this group's base points are
    /// lexicographically smallest. Equal cosets give equal representatives.
    pub fn canonical_coset_rep(&self, g: &Perm) -> Perm {
        let mut x = g.clone();
        for level in &self.levels {
            let best = level
                .orbit
                .iter()
                .copied()
                .min_by_key(|&d| x.apply(d))
                .unwrap();
            if best != level.base {
                x = x.compose(level.transversal[best].as_ref().unwrap());
            }
        }
        x
    }

    pub fn orbit(&self, point: usize) -> Vec<usize> {
        orbit_of_point(self.degree, &self.gens, point)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbit(0).len() == self.degree
    }

    /// All elements, via products of transversal elements.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![Perm::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &x in &level.orbit {
                let u = level.transversal[x].as_ref().unwrap();
                for h in &out {
                    next.push(u.compose(h));
                }
            }
            out = next;
        }
        out
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.gens.iter().all(|g| other.contains(g))
    }

    /// True if every generator of `ambient` normalizes this group.
    pub fn is_normalized_by(&self, ambient: &[Perm]) -> bool {
        ambient
            .iter()
            .all(|s| self.gens.iter().all(|g| self.contains(&g.conjugate_by(s))))
    }

    /// Smallest subgroup containing `gens` that is normalized by `ambient`.
    pub fn normal_closure(degree: usize, ambient: &[Perm], gens: &[Perm]) -> PermGroup {
        let mut group = PermGroup::new(degree, gens);
        let mut queue: Vec<Perm> = group.gens.clone();
        while let Some(x) = queue.pop() {
            for s in ambient {
                let y = x.conjugate_by(s);
                if group.add_generator(&y) {
                    queue.push(y);
                }
            }
        }
        group
    }

    pub fn derived_subgroup(&self) -> PermGroup {
        let mut comms = Vec::new();
        for (i, a) in self.gens.iter().enumerate() {
            for b in &self.gens[i + 1..] {
                let c = Perm::commutator(a, b);
                if !c.is_identity() {
                    comms.push(c);
                }
            }
        }
        PermGroup::normal_closure(self.degree, &self.gens, &comms)
    }

    /// `[G, G', G'', …, 1]`; fails if the series stalls above the trivial group.
    pub fn derived_series(&self) -> Result<Vec<PermGroup>> {
        let mut series = vec![self.clone()];
        loop {
            let last = series.last().unwrap();
            if last.is_trivial() {
                return Ok(series);
            }
            let next = last.derived_subgroup();
            if next.order() == last.order() {
                return Err(Error::Insoluble(last.order()));
            }
            series.push(next);
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.gens.iter().enumerate().all(|(i, a)| {
            self.gens[i + 1..]
                .iter()
                .all(|b| a.compose(b) == b.compose(a))
        })
    }
}

fn first_moved(g: &Perm) -> usize {
    (0..g.degree()).find(|&x| !g.fixes(x)).unwrap_or(0)
}

pub fn orbit_of_point(degree: usize, gens: &[Perm], point: usize) -> Vec<usize> {
    let mut seen = vec![false; degree];
    seen[point] = true;
    let mut orbit = vec![point];
    let mut head = 0;
    while head < orbit.len() {
        let x = orbit[head];
        head += 1;
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                orbit.push(y);
            }
        }
    }
    orbit
}

/// Orbit of a point of some set acted on by permutations, with a transversal
/// and Schreier generators of the stabilizer.
#[derive(Clone, Debug)]
pub struct Orbit<K> {
    pub points: Vec<K>,
    /// `transversal[i]` maps the start point to `points[i]`.
    pub transversal: Vec<Perm>,
    pub stabilizer_gens: Vec<Perm>,
}

impl<K> Orbit<K> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Breadth-first orbit of `start` under `gens`, for a left action
/// (`act(act(k, a), b) == act(k, b·a)`), e.g. conjugation `U ↦ sUs⁻¹`.
///
/// Schreier generators `t_{g·k}⁻¹ · g · t_k` are returned without deduplication
/// beyond dropping identities; callers reduce them with a subgroup closure.
pub fn conjugation_orbit<K, F>(gens: &[Perm], start: K, mut act: F, cap: usize) -> Result<Orbit<K>>
where
    K: Clone + Eq + Hash,
    F: FnMut(&K, &Perm) -> Result<K>,
{
    let degree = gens.first().map(Perm::degree).unwrap_or(0);
    let mut index: HashMap<K, usize> = HashMap::new();
    index.insert(start.clone(), 0);
    let mut points = vec![start];
    let mut transversal = vec![Perm::identity(degree)];
    let mut stabilizer_gens = Vec::new();
    let mut head = 0;
    while head < points.len() {
        for g in gens {
            let image = act(&points[head], g)?;
            let t = g.compose(&transversal[head]);
            match index.get(&image) {
                Some(&j) => {
                    let s = transversal[j].inverse().compose(&t);
                    if !s.is_identity() {
                        stabilizer_gens.push(s);
                    }
                }
                None => {
                    if points.len() >= cap {
                        return Err(Error::OrbitOverflow(cap));
                    }
                    index.insert(image.clone(), points.len());
                    points.push(image);
                    transversal.push(t);
                }
            }
        }
        head += 1;
    }
    Ok(Orbit {
        points,
        transversal,
        stabilizer_gens,
    })
}

/// Orbit only, no transversal.
pub fn orbit_keys<K, F>(gens: &[Perm], start: K, mut act: F, cap: usize) -> Result<Vec<K>>
where
    K: Clone + Eq + Hash,
    F: FnMut(&K, &Perm) -> Result<K>,
{
    let mut seen: std::collections::HashSet<K> = std::collections::HashSet::new();
    seen.insert(start.clone());
    let mut points = vec![start];
    let mut head = 0;
    while head < points.len() {
        for g in gens {
            let image = act(&points[head], g)?;
            if seen.insert(image.clone()) {
                if points.len() >= cap {
                    return Err(Error::OrbitOverflow(cap));
                }
                points.push(image);
            }
        }
        head += 1;
    }
    Ok(points)
}
