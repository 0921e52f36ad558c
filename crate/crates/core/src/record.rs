//! Subgroups of `S` stored as canonical induced generating sequences.
//!
//! A record is a list of exponent codes, one per row, with strictly
//! increasing leading positions. Each row has leading exponent 1 and zero
//! exponents at the leading positions of all other rows; this form is unique
//! for the subgroup, so two records are equal exactly when the subgroups are.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::inv_mod;
use crate::pcgs::Pcgs;
use crate::perm::Perm;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubgroupRecord {
    rows: Vec<u64>,
}

impl Ord for SubgroupRecord {
    /// Row count first, then rows lexicographically.
    fn cmp(&self, other: &Self) -> Ordering {
        self.rows
            .len()
            .cmp(&other.rows.len())
            .then_with(|| self.rows.cmp(&other.rows))
    }
}

impl PartialOrd for SubgroupRecord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubgroupRecord {
    /// `n:v_1,…,v_n`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.rows.len())?;
        for (k, v) in self.rows.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl SubgroupRecord {
    pub fn trivial() -> Self {
        SubgroupRecord { rows: Vec::new() }
    }

    /// The whole of `S`.
    pub fn full(pcgs: &Pcgs) -> Self {
        Self::kernel(pcgs, 0)
    }

    /// The subgroup generated by `g_h, …, g_n`.
    pub fn kernel(pcgs: &Pcgs, h: usize) -> Self {
        SubgroupRecord {
            rows: (h..pcgs.len()).map(|j| pcgs.radix(j)).collect(),
        }
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn encode(&self) -> String {
        self.to_string()
    }

    /// Parses `n:v_1,…,v_n` without reference to a pcgs.
    pub fn parse(line: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed record line {line:?}"));
        let (count, body) = line.split_once(':').ok_or_else(bad)?;
        let count: usize = count.parse().map_err(|_| bad())?;
        let rows: Vec<u64> = if body.is_empty() {
            Vec::new()
        } else {
            body.split(',')
                .map(|v| v.parse::<u64>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        if rows.len() != count {
            return Err(bad());
        }
        Ok(SubgroupRecord { rows })
    }

    /// Parses and checks the record is canonical for `pcgs`.
    pub fn decode(line: &str, pcgs: &Pcgs) -> Result<Self> {
        let record = Self::parse(line)?;
        record.validate(pcgs)?;
        Ok(record)
    }

    /// Checks codes fit the radix and the echelon conditions hold. Does not
    /// check closure under multiplication.
    pub fn validate(&self, pcgs: &Pcgs) -> Result<()> {
        let bad = |msg: &str| Err(Error::Parse(format!("record {self}: {msg}")));
        let mut leads = Vec::with_capacity(self.rows.len());
        for &row in &self.rows {
            if row >= pcgs.order() {
                return bad("row exceeds the pcgs radix");
            }
            let Some(j) = pcgs.leading(row) else {
                return bad("zero row");
            };
            if pcgs.digit(row, j) != 1 {
                return bad("leading exponent is not 1");
            }
            if leads.last().is_some_and(|&l| l >= j) {
                return bad("leading positions are not increasing");
            }
            leads.push(j);
        }
        for &row in &self.rows {
            let lead = pcgs.leading(row).unwrap();
            if leads.iter().any(|&l| l != lead && pcgs.digit(row, l) != 0) {
                return bad("row not reduced");
            }
        }
        Ok(())
    }

    pub fn leading_positions<'a>(&'a self, pcgs: &'a Pcgs) -> impl Iterator<Item = usize> + 'a {
        self.rows.iter().map(|&r| pcgs.leading(r).unwrap())
    }

    pub fn order(&self, pcgs: &Pcgs) -> u64 {
        self.leading_positions(pcgs).map(|j| pcgs.relative_order(j)).product()
    }

    /// Rows whose leading position lies before `h`.
    pub fn head(&self, pcgs: &Pcgs, h: usize) -> &[u64] {
        let k = self.rows.iter().take_while(|&&r| pcgs.leading(r).unwrap() < h).count();
        &self.rows[..k]
    }

    /// `|U·N/N|` where `N` is spanned by positions `≥ h`.
    pub fn quotient_order(&self, pcgs: &Pcgs, h: usize) -> u64 {
        self.head(pcgs, h)
            .iter()
            .map(|&r| pcgs.relative_order(pcgs.leading(r).unwrap()))
            .product()
    }

    /// True if every `g_j` with `j ≥ h` is a row, i.e. the subgroup contains that kernel.
    pub fn contains_kernel(&self, pcgs: &Pcgs, h: usize) -> bool {
        let n = pcgs.len();
        self.rows.len() >= n - h && self.rows[self.rows.len() - (n - h)..] == SubgroupRecord::kernel(pcgs, h).rows[..]
    }

    /// Smallest layer boundary `h = start(i)` with `g_h, …, g_n` all rows,
    /// i.e. the deepest series member `N_i` contained in the subgroup.
    pub fn kernel_start(&self, pcgs: &Pcgs) -> usize {
        let mut h = pcgs.len();
        for &r in self.rows.iter().rev() {
            if h > 0 && r == pcgs.radix(h - 1) {
                h -= 1;
            } else {
                break;
            }
        }
        (0..=pcgs.layers())
            .map(|i| pcgs.start(i))
            .find(|&s| s >= h)
            .unwrap()
    }

    /// The image `U·N/N` as a record of the preimage `U·N`.
    pub fn truncate(&self, pcgs: &Pcgs, h: usize) -> SubgroupRecord {
        let mut rows: Vec<u64> = self.head(pcgs, h).iter().map(|&r| r % pcgs.radix(h)).collect();
        rows.extend(SubgroupRecord::kernel(pcgs, h).rows);
        SubgroupRecord { rows }
    }

    pub fn generators(&self, pcgs: &Pcgs) -> Vec<Perm> {
        self.rows.iter().map(|&r| pcgs.element(r)).collect()
    }

    pub fn contains(&self, pcgs: &Pcgs, x: &Perm) -> bool {
        pcgs.contains(x) && Igs::from_record(pcgs, self, pcgs.len()).sift(x).is_none()
    }

    /// `s·U·s⁻¹`.
    pub fn conjugate(&self, pcgs: &Pcgs, s: &Perm) -> SubgroupRecord {
        self.conjugate_with(pcgs, s, &s.inverse())
    }

    pub(crate) fn conjugate_with(&self, pcgs: &Pcgs, s: &Perm, _s_inv: &Perm) -> SubgroupRecord {
        let h = self.kernel_start(pcgs);
        let mut igs = Igs::new(pcgs, h);
        for &r in self.head(pcgs, h) {
            igs.add_unclosed(pcgs.element(r).conjugate_by(s));
        }
        igs.finish()
    }

    /// Subgroup generated by the given members of `S`.
    pub fn generated_by(pcgs: &Pcgs, gens: &[Perm]) -> SubgroupRecord {
        let mut igs = Igs::new(pcgs, pcgs.len());
        for g in gens {
            igs.add(g.clone());
        }
        igs.finish()
    }
}

#[derive(Clone, Debug)]
struct IgsRow {
    elem: Perm,
    /// `inv_powers[e] = u^{-e}`.
    inv_powers: Vec<Perm>,
}

impl IgsRow {
    fn new(elem: Perm, p: u64) -> Self {
        let inv = elem.inverse();
        let mut inv_powers = vec![Perm::identity(elem.degree())];
        for e in 1..p as usize {
            inv_powers.push(inv_powers[e - 1].compose(&inv));
        }
        IgsRow { elem, inv_powers }
    }
}

/// Echelonization of subgroup generators modulo the kernel spanned by
/// positions `≥ h`.
#[derive(Clone, Debug)]
pub struct Igs<'a> {
    pcgs: &'a Pcgs,
    h: usize,
    rows: Vec<Option<IgsRow>>,
}

impl<'a> Igs<'a> {
    pub fn new(pcgs: &'a Pcgs, h: usize) -> Self {
        Igs {
            pcgs,
            h,
            rows: vec![None; h],
        }
    }

    /// Seeds with the rows of `record` before position `h`. The record must
    /// contain the kernel at `h` for the result to describe the same subgroup.
    pub fn from_record(pcgs: &'a Pcgs, record: &SubgroupRecord, h: usize) -> Self {
        let mut igs = Igs::new(pcgs, h);
        for &r in record.head(pcgs, h) {
            let j = pcgs.leading(r).unwrap();
            igs.rows[j] = Some(IgsRow::new(pcgs.element(r), pcgs.relative_order(j)));
        }
        igs
    }

    pub fn truncation(&self) -> usize {
        self.h
    }

    fn truncated_code(&self, x: &Perm) -> u64 {
        self.pcgs.code_of_member(x) % self.pcgs.radix(self.h)
    }

    /// Sifts `x`; returns `None` if it lies in the subgroup, otherwise the
    /// leading position, residue and its leading exponent.
    pub fn sift(&self, x: &Perm) -> Option<(usize, Perm, u64)> {
        let mut x = x.clone();
        loop {
            let code = self.truncated_code(&x);
            let j = self.pcgs.leading(code)?;
            let e = self.pcgs.digit(code, j);
            match &self.rows[j] {
                Some(row) => x = row.inv_powers[e as usize].compose(&x),
                None => return Some((j, x, e)),
            }
        }
    }

    fn insert(&mut self, j: usize, x: Perm, e: u64) -> Perm {
        let p = self.pcgs.relative_order(j);
        let x = if e == 1 {
            x
        } else {
            x.pow(inv_mod(e as u8, p as u8) as u64)
        };
        self.rows[j] = Some(IgsRow::new(x.clone(), p));
        x
    }

    /// Adds `x` and closes under powers and commutators. Returns whether the
    /// subgroup grew.
    pub fn add(&mut self, x: Perm) -> bool {
        let mut queue = vec![x];
        let mut grew = false;
        while let Some(y) = queue.pop() {
            let Some((j, z, e)) = self.sift(&y) else {
                continue;
            };
            if e != 1 {
                // the normalized power may have lost a coprime part of `z`
                queue.push(z.clone());
            }
            let z = self.insert(j, z, e);
            grew = true;
            queue.push(z.pow(self.pcgs.relative_order(j)));
            for (k, row) in self.rows.iter().enumerate() {
                if k != j {
                    if let Some(row) = row {
                        queue.push(Perm::commutator(&z, &row.elem));
                    }
                }
            }
        }
        grew
    }

    /// Adds `x` without closing. Valid when the final row set is known to be
    /// an induced sequence, e.g. conjugates of the rows of a record.
    pub fn add_unclosed(&mut self, x: Perm) -> bool {
        match self.sift(&x) {
            Some((j, z, e)) => {
                self.insert(j, z, e);
                true
            }
            None => false,
        }
    }

    /// Order of the subgroup modulo the kernel at `h`.
    pub fn quotient_order(&self) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_some())
            .map(|(j, _)| self.pcgs.relative_order(j))
            .product()
    }

    /// Row elements in position order.
    pub fn row_elements(&self) -> Vec<Perm> {
        self.rows.iter().flatten().map(|r| r.elem.clone()).collect()
    }

    /// Exponents of `x` relative to the rows (in position order), so that
    /// `x ≡ u_1^{e_1} ⋯ u_m^{e_m}` modulo the kernel. `None` if `x` is not in
    /// the subgroup.
    pub fn relative_exponents(&self, x: &Perm) -> Option<Vec<u64>> {
        let mut x = x.clone();
        let mut exps = Vec::new();
        for (j, row) in self.rows.iter().enumerate() {
            let Some(row) = row else { continue };
            let code = self.truncated_code(&x);
            if let Some(l) = self.pcgs.leading(code) {
                if l < j {
                    return None;
                }
            }
            let e = self.pcgs.digit(code, j);
            if e != 0 {
                x = row.inv_powers[e as usize].compose(&x);
            }
            exps.push(e);
        }
        (self.truncated_code(&x) == 0).then_some(exps)
    }

    /// Canonical record of the subgroup (including the kernel rows).
    pub fn finish(&self) -> SubgroupRecord {
        let pcgs = self.pcgs;
        let positions: Vec<usize> = (0..self.h).filter(|&j| self.rows[j].is_some()).collect();
        let mut rows = Vec::with_capacity(positions.len() + pcgs.len() - self.h);
        for (k, &j) in positions.iter().enumerate() {
            let mut u = self.rows[j].as_ref().unwrap().elem.clone();
            let mut code = self.truncated_code(&u);
            for &l in &positions[k + 1..] {
                let e = pcgs.digit(code, l);
                if e != 0 {
                    u = u.compose(&self.rows[l].as_ref().unwrap().inv_powers[e as usize]);
                    code = self.truncated_code(&u);
                }
            }
            rows.push(code);
        }
        rows.extend((self.h..pcgs.len()).map(|j| pcgs.radix(j)));
        SubgroupRecord { rows }
    }
}

/// Polycyclic presentation of `U/N` for a record `U ≥ N`, `N` the kernel at `h`.
///
/// With `x_1, …, x_m` the rows before `h`: `x_a^{p_a} = w_a` and
/// `x_a⁻¹ x_b x_a = w_{ab}` for `a < b`, each word given by its exponents
/// relative to the `x`'s.
#[derive(Clone, Debug)]
pub struct PcPresentation {
    pub generators: Vec<Perm>,
    pub relative_orders: Vec<u64>,
    pub powers: Vec<Vec<u64>>,
    /// `conjugates[a][b - a - 1]` for `a < b`.
    pub conjugates: Vec<Vec<Vec<u64>>>,
}

impl PcPresentation {
    pub fn new(pcgs: &Pcgs, record: &SubgroupRecord, h: usize) -> Self {
        let igs = Igs::from_record(pcgs, record, h);
        let generators = igs.row_elements();
        let relative_orders: Vec<u64> = record
            .head(pcgs, h)
            .iter()
            .map(|&r| pcgs.relative_order(pcgs.leading(r).unwrap()))
            .collect();
        let m = generators.len();
        let mut powers = Vec::with_capacity(m);
        let mut conjugates = Vec::with_capacity(m);
        for a in 0..m {
            let x = &generators[a];
            powers.push(
                igs.relative_exponents(&x.pow(relative_orders[a]))
                    .expect("record is a subgroup"),
            );
            let x_inv = x.inverse();
            conjugates.push(
                (a + 1..m)
                    .map(|b| {
                        let c = x_inv.compose(&generators[b]).compose(x);
                        igs.relative_exponents(&c).expect("record is a subgroup")
                    })
                    .collect(),
            );
        }
        PcPresentation {
            generators,
            relative_orders,
            powers,
            conjugates,
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// `y_1^{e_1} ⋯ y_m^{e_m}`.
pub fn evaluate_word(gens: &[Perm], exps: &[u64]) -> Perm {
    let degree = gens.first().map_or(0, Perm::degree);
    gens.iter()
        .zip(exps)
        .filter(|(_, &e)| e != 0)
        .fold(Perm::identity(degree), |acc, (g, &e)| acc.compose(&g.pow(e)))
}
