//! Left braces from regular subgroups of the holomorph.
//!
//! A regular subgroup `U ≤ Hol(G)` gives, for each `x ∈ G`, a unique
//! `r_x ∈ U` with `r_x(0) = x`. Setting `x·y = r_x(y)` makes `(G, +, ·)` a
//! left brace.

use std::collections::BTreeMap;

use crate::abelian::{factorize, AbelianGroup};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::permgroup::PermGroup;
use crate::record::SubgroupRecord;

/// True iff `record` has order `|G|`, moves 0 onto every point, and no
/// non-identity element fixes 0.
pub fn is_regular(ctx: &Context, record: &SubgroupRecord) -> bool {
    let n = ctx.target() as usize;
    if record.order(ctx.pcgs()) != n as u64 {
        return false;
    }
    let group = PermGroup::new(ctx.holomorph().degree(), &record.generators(ctx.pcgs()));
    if group.orbit(0).len() != n {
        return false;
    }
    let elems = group.elements();
    elems.len() == n && elems.iter().filter(|e| e.fixes(0)).count() == 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Brace {
    group: AbelianGroup,
    add: Vec<Vec<usize>>,
    mul: Vec<Vec<usize>>,
    origin: String,
}

/// Isomorphism invariants of the multiplicative group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint {
    /// `(element order, count)`, ascending.
    pub order_counts: Vec<(u64, usize)>,
    /// Invariants of the abelianization as ascending prime powers.
    pub abelianization: Vec<u64>,
    pub center_order: usize,
    pub derived_order: usize,
}

impl Fingerprint {
    pub fn exponent(&self) -> u64 {
        self.order_counts.iter().map(|&(o, _)| o).max().unwrap_or(1)
    }

    pub fn is_abelian(&self) -> bool {
        self.derived_order == 1
    }
}

impl Brace {
    /// The brace of a regular subgroup. Fails with [`Error::NotRegular`] or,
    /// if the tables break the brace axiom, [`Error::BraceAxiom`].
    pub fn from_regular(ctx: &Context, record: &SubgroupRecord) -> Result<Self> {
        if !is_regular(ctx, record) {
            return Err(Error::NotRegular);
        }
        let n = ctx.target() as usize;
        let elems = PermGroup::new(ctx.holomorph().degree(), &record.generators(ctx.pcgs())).elements();
        let mut mul = vec![Vec::new(); n];
        for e in &elems {
            mul[e.apply(0)] = e.images().collect();
        }
        let brace = Brace {
            group: ctx.group().clone(),
            add: ctx.group().addition_table(),
            mul,
            origin: record.encode(),
        };
        brace.verify().map_err(|(x, y, z)| Error::BraceAxiom { x, y, z })?;
        Ok(brace)
    }

    /// Builds a brace from explicit tables without checking them.
    pub fn from_tables(group: &AbelianGroup, mul: Vec<Vec<usize>>, origin: &str) -> Self {
        Brace {
            group: group.clone(),
            add: group.addition_table(),
            mul,
            origin: origin.to_string(),
        }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.add.len()
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x][y]
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x][y]
    }

    pub fn mul_table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    /// Encoded record of the subgroup the brace came from.
    pub fn origin(&self) -> &str {
        &self.origin
    }

    /// True iff `x·y = x+y` everywhere.
    pub fn is_trivial(&self) -> bool {
        self.mul == self.add
    }

    /// Checks that both tables are group tables with identity 0 and that
    /// `x(y+z) = xy − x + xz` for all triples. Returns the first failing
    /// triple; group-axiom failures are reported with `z = usize::MAX`.
    pub fn verify(&self) -> std::result::Result<(), (usize, usize, usize)> {
        let n = self.size();
        for table in [&self.add, &self.mul] {
            if table.len() != n {
                return Err((0, 0, usize::MAX));
            }
            for (x, row) in table.iter().enumerate() {
                if row.len() != n || row.iter().any(|&v| v >= n) {
                    return Err((x, 0, usize::MAX));
                }
                if table[0][x] != x || row[0] != x {
                    return Err((x, 0, usize::MAX));
                }
                let mut seen = vec![false; n];
                for (y, &v) in row.iter().enumerate() {
                    if std::mem::replace(&mut seen[v], true) {
                        return Err((x, y, usize::MAX));
                    }
                }
            }
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        if table[table[x][y]][z] != table[x][table[y][z]] {
                            return Err((x, y, usize::MAX));
                        }
                    }
                }
            }
        }
        let neg: Vec<usize> = (0..n)
            .map(|x| self.add[x].iter().position(|&v| v == 0).unwrap())
            .collect();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = self.mul[x][self.add[y][z]];
                    let rhs = self.add[self.add[self.mul[x][y]][neg[x]]][self.mul[x][z]];
                    if lhs != rhs {
                        return Err((x, y, z));
                    }
                }
            }
        }
        Ok(())
    }

    /// Isomorphism invariants of `(G, ·)`.
    pub fn fingerprint(&self) -> Fingerprint {
        table_fingerprint(&self.mul)
    }

    /// Export block: header line, then one line per row of the
    /// multiplicative table.
    pub fn export_block(&self) -> String {
        let mut out = format!("brace {} {}\n", self.group.descriptor(), self.origin);
        for row in &self.mul {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Blocks separated by blank lines.
pub fn export(braces: &[Brace]) -> String {
    braces.iter().map(Brace::export_block).collect::<Vec<_>>().join("\n")
}

/// Parses an export file back into `(descriptor, origin, table)` blocks.
pub fn parse_export(text: &str) -> Result<Vec<(String, String, Vec<Vec<usize>>)>> {
    let mut out = Vec::new();
    for block in text.split("\n\n").filter(|b| !b.trim().is_empty()) {
        let mut lines = block.lines();
        let header = lines.next().unwrap_or_default();
        let parts: Vec<&str> = header.split(' ').collect();
        if parts.len() != 3 || parts[0] != "brace" {
            return Err(Error::Parse(format!("bad brace header {header:?}")));
        }
        let table = lines
            .map(|l| {
                l.split(' ')
                    .map(|v| v.parse().map_err(|_| Error::Parse(format!("bad table entry {v:?}"))))
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        out.push((parts[1].to_string(), parts[2].to_string(), table));
    }
    Ok(out)
}

fn table_fingerprint(mul: &[Vec<usize>]) -> Fingerprint {
    let n = mul.len();
    let orders: Vec<u64> = (0..n).map(|x| element_order(mul, x)).collect();
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &o in &orders {
        *counts.entry(o).or_default() += 1;
    }
    let center_order = (0..n)
        .filter(|&x| (0..n).all(|y| mul[x][y] == mul[y][x]))
        .count();
    let inv: Vec<usize> = (0..n).map(|x| mul[x].iter().position(|&v| v == 0).unwrap()).collect();
    let commutators: Vec<usize> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| mul[mul[inv[x]][inv[y]]][mul[x][y]])
        .collect();
    let derived = closure(mul, &commutators);
    Fingerprint {
        order_counts: counts.into_iter().collect(),
        abelianization: abelianization(mul, &derived),
        center_order,
        derived_order: derived.iter().filter(|&&b| b).count(),
    }
}

fn element_order(mul: &[Vec<usize>], x: usize) -> u64 {
    let (mut y, mut k) = (x, 1);
    while y != 0 {
        y = mul[y][x];
        k += 1;
    }
    k
}

/// Membership vector of the subgroup generated by `gens`.
fn closure(mul: &[Vec<usize>], gens: &[usize]) -> Vec<bool> {
    let mut member = vec![false; mul.len()];
    member[0] = true;
    let mut queue = vec![0];
    let mut gens: Vec<usize> = gens.to_vec();
    gens.sort_unstable();
    gens.dedup();
    while let Some(x) = queue.pop() {
        for &g in &gens {
            let y = mul[x][g];
            if !member[y] {
                member[y] = true;
                queue.push(y);
            }
        }
    }
    member
}

/// Invariants of `M/D` for the normal subgroup `D`, read off from the number
/// of cosets killed by each prime power.
fn abelianization(mul: &[Vec<usize>], derived: &[bool]) -> Vec<u64> {
    let n = mul.len();
    let d: Vec<usize> = (0..n).filter(|&x| derived[x]).collect();
    // coset id = smallest element of x·D
    let coset: Vec<usize> = (0..n).map(|x| d.iter().map(|&k| mul[x][k]).min().unwrap()).collect();
    let reps: Vec<usize> = (0..n).filter(|&x| coset[x] == x).collect();
    let quotient_order = reps.len() as u64;
    // order of xD is the least k with x^k ∈ D
    let coset_order = |x: usize| {
        let (mut y, mut k) = (x, 1u64);
        while !derived[y] {
            y = mul[y][x];
            k += 1;
        }
        k
    };
    let orders: Vec<u64> = reps.iter().map(|&x| coset_order(x)).collect();
    let mut invariants = Vec::new();
    for (p, e) in factorize(quotient_order) {
        // a[k] = log_p #{cosets with order dividing p^k}
        let mut prev = 0u32;
        let mut cols: Vec<u32> = Vec::new();
        for k in 1..=e {
            let pk = p.pow(k);
            let count = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
            let a = log_exact(count, p);
            cols.push(a - prev);
            prev = a;
            if a == e {
                break;
            }
        }
        // cols[k-1] = number of cyclic factors of exponent ≥ k
        for k in 0..cols.len() {
            let next = cols.get(k + 1).copied().unwrap_or(0);
            for _ in 0..cols[k] - next {
                invariants.push(p.pow(k as u32 + 1));
            }
        }
    }
    invariants.sort_unstable();
    invariants
}

fn log_exact(mut x: u64, p: u64) -> u32 {
    let mut k = 0;
    while x > 1 {
        x /= p;
        k += 1;
    }
    k
}

/// Fingerprint of the abelian group `G` itself, for comparison with trivial braces.
pub fn additive_fingerprint(group: &AbelianGroup) -> Fingerprint {
    table_fingerprint(&group.addition_table())
}

/// Permutation `y ↦ x·y` as a [`Perm`].
pub fn left_multiplication(brace: &Brace, x: usize) -> Perm {
    Perm::from_images(&brace.mul[x]).expect("rows of a group table are permutations")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{Endomorphism, GroupElement};
    use crate::holomorph::HolElement;

    fn klein_in_c4(ctx: &Context) -> SubgroupRecord {
        let g = ctx.group();
        let minus = Endomorphism::scalar(g, 3);
        let gens: Vec<Perm> = [
            HolElement::translation(g, GroupElement(vec![2])),
            HolElement { shift: GroupElement(vec![1]), auto: minus },
        ]
        .iter()
        .map(|h| h.to_perm(g))
        .collect();
        SubgroupRecord::generated_by(ctx.pcgs(), &gens)
    }

    fn translations(ctx: &Context) -> SubgroupRecord {
        SubgroupRecord::generated_by(ctx.pcgs(), &ctx.holomorph().translation_generators())
    }

    #[test]
    fn regularity_examples() {
        let ctx = Context::from_descriptor("4").unwrap();
        assert!(is_regular(&ctx, &translations(&ctx)));
        assert!(is_regular(&ctx, &klein_in_c4(&ctx)));
        let auts = SubgroupRecord::generated_by(ctx.pcgs(), ctx.holomorph().automorphism_generators());
        assert!(!is_regular(&ctx, &auts));
        assert!(!is_regular(&ctx, &SubgroupRecord::full(ctx.pcgs())));
    }

    #[test]
    fn trivial_brace_from_translations() {
        for desc in ["4", "2,2", "3,3", "2,4"] {
            let ctx = Context::from_descriptor(desc).unwrap();
            let b = Brace::from_regular(&ctx, &translations(&ctx)).unwrap();
            assert!(b.is_trivial());
            assert_eq!(b.fingerprint(), additive_fingerprint(ctx.group()));
        }
    }

    #[test]
    fn klein_brace_over_c4() {
        let ctx = Context::from_descriptor("4").unwrap();
        let b = Brace::from_regular(&ctx, &klein_in_c4(&ctx)).unwrap();
        assert_eq!(b.mul(1, 1), 0);
        let f = b.fingerprint();
        assert_eq!(f.exponent(), 2);
        assert!(f.is_abelian());
        assert_eq!(f.center_order, 4);
        assert_eq!(f.abelianization, vec![2, 2]);
        assert_eq!(additive_fingerprint(ctx.group()).abelianization, vec![4]);
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let ctx = Context::from_descriptor("2,4").unwrap();
        let b = Brace::from_regular(&ctx, &translations(&ctx)).unwrap();
        assert!(b.verify().is_ok());
        let mut mul = b.mul_table().to_vec();
        mul[3].swap(2, 5);
        assert!(Brace::from_tables(ctx.group(), mul, "x").verify().is_err());
    }

    #[test]
    fn fingerprint_is_conjugation_invariant() {
        let ctx = Context::from_descriptor("8").unwrap();
        let run = ctx.regular_classes().unwrap();
        for r in &run.classes {
            let f = Brace::from_regular(&ctx, r).unwrap().fingerprint();
            for s in ctx.holomorph().generators() {
                let c = r.conjugate(ctx.pcgs(), &s);
                assert_eq!(Brace::from_regular(&ctx, &c).unwrap().fingerprint(), f);
            }
        }
    }

    #[test]
    fn nonabelian_fingerprint() {
        // the dihedral group of order 8 as a table on 0..8: r^i s^j ↦ i + 4j
        let idx = |i: usize, j: usize| i % 4 + 4 * j;
        let mul: Vec<Vec<usize>> = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (i1, j1, i2, j2) = (a % 4, a / 4, b % 4, b / 4);
                        let i = if j1 == 0 { i1 + i2 } else { i1 + 4 - i2 };
                        idx(i, (j1 + j2) % 2)
                    })
                    .collect()
            })
            .collect();
        let f = table_fingerprint(&mul);
        assert_eq!(f.center_order, 2);
        assert_eq!(f.derived_order, 2);
        assert_eq!(f.abelianization, vec![2, 2]);
        assert_eq!(f.order_counts, vec![(1, 1), (2, 5), (4, 2)]);
    }

    #[test]
    fn export_roundtrip() {
        let ctx = Context::from_descriptor("4").unwrap();
        let braces: Vec<Brace> = ctx
            .regular_classes()
            .unwrap()
            .classes
            .iter()
            .map(|r| Brace::from_regular(&ctx, r).unwrap())
            .collect();
        let text = export(&braces);
        let parsed = parse_export(&text).unwrap();
        assert_eq!(parsed.len(), 2);
        for (b, (desc, origin, table)) in braces.iter().zip(parsed) {
            assert_eq!(desc, "4");
            assert_eq!(origin, b.origin());
            assert_eq!(table, b.mul_table());
        }
    }
}
