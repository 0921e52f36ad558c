//! Layer-by-layer lifting of conjugacy classes of subgroups.
//!
//! Layer `i` holds one record per `S`-class of subgroups `U` with
//! `N_i ≤ U ≤ S` that survive pruning. A parent `P` at layer `i` lifts to the
//! subgroups `U ≥ N_{i+1}` with `U·N_i = P`:
//!
//! * `P = N_i`: every subspace of `V = N_i/N_{i+1}`, fused under `S`;
//! * `U = P` itself;
//! * `U ∩ N_i = B` for a proper `P`-invariant `B`: complements of `N_i/B` in
//!   `P/B`, found by solving the cocycle equations of a presentation of `P/N_i`.
//!
//! Candidates from one parent are fused under the normalizer `N_S(P)`.

use std::collections::HashSet;

use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::pcgs::Pcgs;
use crate::perm::Perm;
use crate::permgroup::{conjugation_orbit, orbit_keys};
use crate::record::{evaluate_word, Igs, PcPresentation, SubgroupRecord};

/// Which case produced a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    /// The parent itself.
    Parent,
    /// A subgroup of the kernel factor.
    Kernel,
    /// A complement over a proper invariant subspace.
    Complement,
}

/// Per-layer class counts of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LayerStats {
    /// `(layer, classes, jobs)`.
    pub rows: Vec<(usize, usize, usize)>,
}

impl LayerStats {
    pub fn table(&self) -> String {
        let mut out = String::from("layer  classes  jobs\n");
        for (layer, classes, jobs) in &self.rows {
            out.push_str(&format!("{layer:>5}  {classes:>7}  {jobs:>4}\n"));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Run {
    /// Final-layer classes (order `|G|`, transitive), sorted.
    pub classes: Vec<SubgroupRecord>,
    pub stats: LayerStats,
}

/// Exponent code of a vector of `V` placed at positions `start..`.
fn vector_code(pcgs: &Pcgs, start: usize, v: &[u8]) -> u64 {
    v.iter()
        .enumerate()
        .map(|(t, &x)| x as u64 * pcgs.radix(start + t))
        .sum()
}

/// Digits of `code` at positions `start..start+d`.
fn code_vector(pcgs: &Pcgs, start: usize, d: usize, code: u64) -> Vector {
    (0..d).map(|t| pcgs.digit(code, start + t) as u8).collect()
}

/// Matrix of `v ↦ x·v·x⁻¹` on `V = N_i/N_{i+1}`.
fn action_matrix(pcgs: &Pcgs, start: usize, d: usize, x: &Perm) -> Matrix {
    let mut m = vec![vec![0u8; d]; d];
    for c in 0..d {
        let img = pcgs.generator(start + c).conjugate_by(x);
        let v = code_vector(pcgs, start, d, pcgs.code_of_member(&img));
        for r in 0..d {
            m[r][c] = v[r];
        }
    }
    m
}

impl Context {
    /// Layer 0: the whole group.
    pub fn initial_layer(&self) -> Vec<SubgroupRecord> {
        vec![SubgroupRecord::full(self.pcgs())]
    }

    /// Classes of subgroups `N_i ≤ U ≤ N_{i-1}`, i.e. of subspaces of the
    /// factor `i`, that pass pruning at layer `i`. Cached.
    pub fn kernel_classes(&self, i: usize) -> Result<&[SubgroupRecord]> {
        if let Some(v) = self.kernel_cache(i).get() {
            return Ok(v);
        }
        let computed = self.compute_kernel_classes(i)?;
        Ok(self.kernel_cache(i).get_or_init(|| computed))
    }

    fn compute_kernel_classes(&self, i: usize) -> Result<Vec<SubgroupRecord>> {
        let pcgs = self.pcgs();
        let layer = self.layer(i).clone();
        let p = layer.prime as u8;
        let d = layer.rank;
        let t = self.target();
        let mut candidates: Vec<Vec<Vector>> = linalg::subspaces(p, d, |k| {
            let q = layer.prime.pow(k as u32);
            t % q == 0 && t / q <= layer.kernel_order
        });
        let to_record = |basis: &[Vector]| -> SubgroupRecord {
            let mut rows: Vec<u64> = basis.iter().map(|v| vector_code(pcgs, layer.start, v)).collect();
            rows.extend((layer.end..pcgs.len()).map(|j| pcgs.radix(j)));
            SubgroupRecord::parse(&format!(
                "{}:{}",
                rows.len(),
                rows.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
            ))
            .expect("well-formed")
        };
        candidates.retain(|basis| {
            let gens: Vec<Perm> = basis
                .iter()
                .map(|v| pcgs.element(vector_code(pcgs, layer.start, v)))
                .collect();
            self.is_transitive_mod(&gens, i)
        });
        // S acts on V through S/N_{i-1}; N_{i-1} acts trivially.
        let matrices: Vec<Matrix> = (0..layer.start)
            .map(|j| action_matrix(pcgs, layer.start, d, pcgs.generator(j)))
            .collect();
        let mut seen: FxHashSet<Vec<Vector>> = FxHashSet::default();
        let mut reps = Vec::new();
        for basis in candidates {
            if seen.contains(&basis) {
                continue;
            }
            let orbit = linear_orbit(&matrices, basis, p, self.max_orbit())?;
            let rep = orbit.iter().map(|b| to_record(b)).min().unwrap();
            seen.extend(orbit);
            reps.push(rep);
        }
        reps.sort();
        Ok(reps)
    }

    /// Generators of `N_S(P)` modulo `N_{i+1}` for a parent `P ≥ N_i`.
    pub fn normalizer(&self, parent: &SubgroupRecord, i: usize) -> Result<Vec<Perm>> {
        let pcgs = self.pcgs();
        let h2 = pcgs.start(i + 1);
        let mut norm = Igs::from_record(pcgs, &SubgroupRecord::full(pcgs), h2);
        for j in 1..=i {
            let hj = pcgs.start(j);
            let rows = norm.row_elements();
            let codes: Vec<u64> = rows.iter().map(|x| pcgs.code_of_member(x) % pcgs.radix(h2)).collect();
            let acting: Vec<Perm> = rows
                .iter()
                .zip(&codes)
                .filter(|(_, &c)| pcgs.leading(c).unwrap() < hj)
                .map(|(x, _)| x.clone())
                .collect();
            if acting.is_empty() {
                continue;
            }
            let image = parent.truncate(pcgs, hj);
            let orbit = conjugation_orbit(&acting, image, |r, g| Ok(r.conjugate(pcgs, g)), self.max_orbit())?;
            if orbit.len() == 1 {
                continue;
            }
            let target = norm.quotient_order() / orbit.len() as u64;
            let mut next = Igs::new(pcgs, h2);
            for (x, &c) in rows.iter().zip(&codes) {
                if pcgs.leading(c).unwrap() >= hj {
                    next.add_unclosed(x.clone());
                }
            }
            for x in parent.generators(pcgs) {
                if next.quotient_order() == target {
                    break;
                }
                next.add(x);
            }
            for s in orbit.stabilizer_gens {
                if next.quotient_order() == target {
                    break;
                }
                next.add(s);
            }
            if next.quotient_order() != target {
                return Err(Error::Internal(format!(
                    "normalizer order {} does not reach {target}",
                    next.quotient_order()
                )));
            }
            norm = next;
        }
        Ok(norm
            .row_elements()
            .into_iter()
            .filter(|x| pcgs.code_of_member(x) % pcgs.radix(h2) != 0)
            .collect())
    }

    /// Proper subspaces `B` of `V = N_i/N_{i+1}` invariant under the parent's
    /// action, restricted to dimensions the order pruning allows.
    pub fn invariant_subspaces(&self, parent: &SubgroupRecord, i: usize) -> Vec<Vec<Vector>> {
        let pcgs = self.pcgs();
        let layer = self.layer(i + 1);
        let (p, d) = (layer.prime as u8, layer.rank);
        let h = pcgs.start(i);
        let q = parent.quotient_order(pcgs, h);
        let t = self.target();
        let matrices: Vec<Matrix> = parent
            .head(pcgs, h)
            .iter()
            .map(|&r| action_matrix(pcgs, layer.start, d, &pcgs.element(r)))
            .collect();
        linalg::subspaces(p, d, |k| {
            let o = q * layer.prime.pow(k as u32);
            k < d && t % o == 0 && t / o <= layer.kernel_order
        })
        .into_iter()
        .filter(|basis| {
            let mut b = basis.clone();
            let pivots = linalg::rref(&mut b, p);
            matrices.iter().all(|m| linalg::is_invariant(m, &b, &pivots, p))
        })
        .collect()
    }

    /// All `U ≥ N_{i+1}` with `U·N_i = P` and `U ∩ N_i = B` (as preimages).
    pub fn complements(&self, parent: &SubgroupRecord, i: usize, b: &[Vector]) -> Vec<SubgroupRecord> {
        let pres = PcPresentation::new(self.pcgs(), parent, self.pcgs().start(i));
        self.complements_with(&pres, i, b)
    }

    fn complements_with(&self, pres: &PcPresentation, i: usize, b: &[Vector]) -> Vec<SubgroupRecord> {
        let pcgs = self.pcgs();
        let layer = self.layer(i + 1);
        let (p, d, start) = (layer.prime as u8, layer.rank, layer.start);
        let h2 = pcgs.start(i + 1);
        let mut basis = b.to_vec();
        let pivots = linalg::rref(&mut basis, p);
        let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
        let m = pres.len();
        let c = free.len();
        let unknowns = m * c;

        // correction elements n(v) for v supported on the free coordinates
        let correction = |coeffs: &[u8]| -> Perm {
            let mut v = vec![0u8; d];
            for (k, &f) in free.iter().enumerate() {
                v[f] = coeffs[k];
            }
            pcgs.element(vector_code(pcgs, start, &v))
        };
        let lifted = |m_vec: &[u8]| -> Vec<Perm> {
            (0..m)
                .map(|a| {
                    let coeffs = &m_vec[a * c..(a + 1) * c];
                    if coeffs.iter().all(|&x| x == 0) {
                        pres.generators[a].clone()
                    } else {
                        pres.generators[a].compose(&correction(coeffs))
                    }
                })
                .collect()
        };
        // defect of each relation, as coordinates of V/B on the free positions
        let defect = |y: &[Perm]| -> Vector {
            let mut out = Vec::with_capacity((m * (m + 1) / 2) * c);
            let mut push = |lhs: Perm, word: &[u64]| {
                let z = evaluate_word(y, word).inverse().compose(&lhs);
                let code = pcgs.code_of_member(&z);
                debug_assert!(code % pcgs.radix(start) == 0);
                let mut v = code_vector(pcgs, start, d, code);
                linalg::reduce(&mut v, &basis, &pivots, p);
                out.extend(free.iter().map(|&f| v[f]));
            };
            for a in 0..m {
                push(y[a].pow(pres.relative_orders[a]), &pres.powers[a]);
                let y_inv = y[a].inverse();
                for b in a + 1..m {
                    push(y_inv.compose(&y[b]).compose(&y[a]), &pres.conjugates[a][b - a - 1]);
                }
            }
            out
        };
        let zero = vec![0u8; unknowns];
        let f0 = defect(&lifted(&zero));
        let rows_count = f0.len();
        let mut a_mat: Vec<Vector> = vec![vec![0u8; unknowns]; rows_count];
        for u in 0..unknowns {
            let mut e = zero.clone();
            e[u] = 1;
            let fu = defect(&lifted(&e));
            for r in 0..rows_count {
                a_mat[r][u] = (fu[r] + p - f0[r]) % p;
            }
        }
        let rhs: Vector = f0.iter().map(|&x| (p - x) % p).collect();
        let Some((particular, kernel)) = linalg::solve_affine(&a_mat, &rhs, unknowns, p) else {
            return Vec::new();
        };
        let b_elems: Vec<Perm> = basis.iter().map(|v| pcgs.element(vector_code(pcgs, start, v))).collect();
        linalg::affine_span(&particular, &kernel, p)
            .into_iter()
            .map(|sol| {
                let y = lifted(&sol);
                debug_assert!(defect(&y).iter().all(|&x| x == 0));
                let mut igs = Igs::new(pcgs, h2);
                for x in b_elems.iter().chain(&y) {
                    igs.add_unclosed(x.clone());
                }
                debug_assert_eq!(igs.row_elements().len(), basis.len() + m);
                igs.finish()
            })
            .collect()
    }

    /// Candidates for layer `i + 1` from one parent at layer `i`, before fusion.
    pub fn lift_candidates(&self, parent: &SubgroupRecord, i: usize) -> Result<Vec<(SubgroupRecord, Case)>> {
        let pcgs = self.pcgs();
        let h = pcgs.start(i);
        if parent.head(pcgs, h).is_empty() {
            return Ok(self
                .kernel_classes(i + 1)?
                .iter()
                .map(|r| (r.clone(), Case::Kernel))
                .collect());
        }
        let mut out = Vec::new();
        if self.prune_keep(parent, i + 1) {
            out.push((parent.clone(), Case::Parent));
        }
        let subspaces = self.invariant_subspaces(parent, i);
        if !subspaces.is_empty() {
            let pres = PcPresentation::new(pcgs, parent, h);
            for b in &subspaces {
                for u in self.complements_with(&pres, i, b) {
                    if self.prune_keep(&u, i + 1) {
                        out.push((u, Case::Complement));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Class representatives at layer `i + 1` below one parent at layer `i`.
    pub fn lift_parent(&self, parent: &SubgroupRecord, i: usize) -> Result<Vec<SubgroupRecord>> {
        let pcgs = self.pcgs();
        if parent.head(pcgs, pcgs.start(i)).is_empty() {
            return Ok(self.kernel_classes(i + 1)?.to_vec());
        }
        let candidates = self.lift_candidates(parent, i)?;
        if candidates.len() <= 1 {
            return Ok(candidates.into_iter().map(|(r, _)| r).collect());
        }
        let gens = self.normalizer(parent, i)?;
        self.fuse(candidates.into_iter().map(|(r, _)| r).collect(), &gens)
    }

    /// One representative (the smallest record) per orbit of `gens` on the candidates.
    fn fuse(&self, mut candidates: Vec<SubgroupRecord>, gens: &[Perm]) -> Result<Vec<SubgroupRecord>> {
        candidates.sort();
        candidates.dedup();
        let pcgs = self.pcgs();
        let mut seen: HashSet<SubgroupRecord> = HashSet::new();
        let mut reps = Vec::new();
        for c in candidates {
            if seen.contains(&c) {
                continue;
            }
            let orbit = orbit_keys(gens, c, |r, g| Ok(r.conjugate(pcgs, g)), self.max_orbit())?;
            reps.push(orbit.iter().min().unwrap().clone());
            seen.extend(orbit);
        }
        reps.sort();
        Ok(reps)
    }

    /// Lifts a whole layer: concatenation over parents, sorted, duplicates removed.
    pub fn lift_layer(&self, parents: &[SubgroupRecord], i: usize) -> Result<Vec<SubgroupRecord>> {
        let parts: Vec<Vec<SubgroupRecord>> = parents
            .par_iter()
            .map(|p| self.lift_parent(p, i))
            .collect::<Result<_>>()?;
        let mut out: Vec<SubgroupRecord> = parts.into_iter().flatten().collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// All layers in memory. The returned classes are `S`-classes; see
    /// [`Context::fuse_final`] for `Hol(G)`-classes in Sylow mode.
    pub fn run_layers(&self) -> Result<Run> {
        let mut layer = self.initial_layer();
        let mut stats = LayerStats {
            rows: vec![(0, layer.len(), 1)],
        };
        for i in 0..self.layer_count() {
            layer = self.lift_layer(&layer, i)?;
            stats.rows.push((i + 1, layer.len(), 1));
        }
        Ok(Run { classes: layer, stats })
    }

    /// Regular-subgroup classes of `Hol(G)`.
    pub fn regular_classes(&self) -> Result<Run> {
        let run = self.run_layers()?;
        Ok(Run {
            classes: self.fuse_final(&run.classes)?,
            stats: run.stats,
        })
    }
}

fn linear_orbit(matrices: &[Matrix], start: Vec<Vector>, p: u8, cap: usize) -> Result<Vec<Vec<Vector>>> {
    let mut seen: FxHashSet<Vec<Vector>> = FxHashSet::default();
    seen.insert(start.clone());
    let mut points = vec![start];
    let mut head = 0;
    while head < points.len() {
        for m in matrices {
            let image = linalg::image_subspace(m, &points[head], p);
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
