//! Polycyclic generating sequence aligned with a normal series.
//!
//! Every element of `S` is written uniquely as `g_1^{e_1} ⋯ g_n^{e_n}` with
//! `0 ≤ e_j < p_j`, and the exponent vector is packed into the integer
//! `e_1 + p_1·(e_2 + p_2·(…))`. The generators of factor `i` occupy positions
//! `start(i-1)..start(i)`, so reducing a code modulo `radix(start(i))` is the
//! same as working modulo `N_i`.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::permgroup::PermGroup;
use crate::series::NormalSeries;

/// Groups up to this order get a full element table for exponent lookup.
pub const ELEMENT_TABLE_LIMIT: u64 = 1 << 21;

#[derive(Clone, Debug)]
struct ElementTable {
    base: Vec<usize>,
    codes: FxHashMap<u128, u64>,
}

impl ElementTable {
    fn key(&self, x: &Perm) -> u128 {
        let raw = x.raw();
        self.base
            .iter()
            .fold(0u128, |acc, &b| (acc << 8) | raw[b] as u128)
    }
}

#[derive(Clone, Debug)]
pub struct Pcgs {
    degree: usize,
    gens: Vec<Perm>,
    rel_orders: Vec<u64>,
    layer_of: Vec<usize>,
    starts: Vec<usize>,
    radix: Vec<u64>,
    kernels: Vec<PermGroup>,
    /// `layer_elems[i-1][c]` is the product of layer-`i` generator powers with local code `c`.
    layer_elems: Vec<Vec<Perm>>,
    layer_inverses: Vec<Vec<Perm>>,
    coset_tables: Vec<FxHashMap<Box<[u8]>, u64>>,
    table: Option<ElementTable>,
}

impl Pcgs {
    pub fn from_series(series: &NormalSeries) -> Result<Self> {
        Self::build(series, ELEMENT_TABLE_LIMIT)
    }

    /// Builds the pcgs without the element table, so every exponent lookup
    /// goes through the per-layer coset tables.
    pub fn from_series_without_table(series: &NormalSeries) -> Result<Self> {
        Self::build(series, 0)
    }

    fn build(series: &NormalSeries, table_limit: u64) -> Result<Self> {
        let members = series.members();
        let degree = members[0].degree();
        let mut gens = Vec::new();
        let mut rel_orders = Vec::new();
        let mut layer_of = Vec::new();
        let mut starts = vec![0];
        for i in 1..members.len() {
            let (upper, lower) = (&members[i - 1], &members[i]);
            let factor = series.factor(i);
            let mut cur = lower.clone();
            let candidates = upper.generators().iter().chain(upper.strong_generators());
            for g in candidates {
                if cur.order() == upper.order() {
                    break;
                }
                if cur.add_generator(g) {
                    gens.push(g.clone());
                    rel_orders.push(factor.prime);
                    layer_of.push(i);
                }
            }
            if cur.order() != upper.order() {
                return Err(Error::InvalidSeries(format!("could not find a basis of factor {i}")));
            }
            starts.push(gens.len());
        }
        let mut radix = vec![1u64];
        for &p in &rel_orders {
            radix.push(radix.last().unwrap() * p);
        }

        let mut layer_elems = Vec::new();
        let mut layer_inverses = Vec::new();
        let mut coset_tables = Vec::new();
        for i in 1..members.len() {
            let (s, e) = (starts[i - 1], starts[i]);
            let p = series.factor(i).prime;
            let count = p.pow((e - s) as u32);
            let mut elems = Vec::with_capacity(count as usize);
            let mut table = FxHashMap::default();
            for c in 0..count {
                let mut x = Perm::identity(degree);
                let mut rest = c;
                for j in s..e {
                    x = x.compose(&gens[j].pow(rest % p));
                    rest /= p;
                }
                let rep = members[i].canonical_coset_rep(&x);
                if table.insert(rep.raw().into(), c).is_some() {
                    return Err(Error::InvalidSeries(format!("factor {i} generators are dependent")));
                }
                elems.push(x);
            }
            layer_inverses.push(elems.iter().map(Perm::inverse).collect());
            layer_elems.push(elems);
            coset_tables.push(table);
        }

        let mut pcgs = Pcgs {
            degree,
            gens,
            rel_orders,
            layer_of,
            starts,
            radix,
            kernels: members.to_vec(),
            layer_elems,
            layer_inverses,
            coset_tables,
            table: None,
        };
        let base = members[0].base();
        if pcgs.order() <= table_limit && base.len() <= 16 {
            pcgs.table = Some(pcgs.element_table(base));
        }
        Ok(pcgs)
    }

    /// Base images of every element, built from the last position upwards.
    fn element_table(&self, base: Vec<usize>) -> ElementTable {
        let b = base.len();
        if b == 0 {
            // trivial group: the identity is the only element
            let mut codes = FxHashMap::default();
            codes.insert(0, 0);
            return ElementTable { base, codes };
        }
        // images[k*b..(k+1)*b] = base images of the element with code k (restricted to the tail)
        let mut images: Vec<u8> = base.iter().map(|&x| x as u8).collect();
        for j in (0..self.len()).rev() {
            let p = self.rel_orders[j] as usize;
            let tail = images.len() / b;
            let mut next = Vec::with_capacity(images.len() * p);
            // code(g_j^e · y) = e + p_j·code(y)
            let powers: Vec<Perm> = (0..p).map(|e| self.gens[j].pow(e as u64)).collect();
            for k in 0..tail {
                for pw in &powers {
                    next.extend(images[k * b..(k + 1) * b].iter().map(|&x| pw.apply(x as usize) as u8));
                }
            }
            images = next;
        }
        let mut codes = FxHashMap::default();
        codes.reserve(self.order() as usize);
        for (code, chunk) in images.chunks(b).enumerate() {
            let key = chunk.iter().fold(0u128, |acc, &x| (acc << 8) | x as u128);
            codes.insert(key, code as u64);
        }
        ElementTable { base, codes }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Length `n` of the sequence.
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn order(&self) -> u64 {
        self.radix[self.len()]
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn generator(&self, j: usize) -> &Perm {
        &self.gens[j]
    }

    pub fn relative_orders(&self) -> &[u64] {
        &self.rel_orders
    }

    pub fn relative_order(&self, j: usize) -> u64 {
        self.rel_orders[j]
    }

    /// Series factor (1-based) that position `j` belongs to.
    pub fn depth(&self, j: usize) -> usize {
        self.layer_of[j]
    }

    /// Number of series factors.
    pub fn layers(&self) -> usize {
        self.starts.len() - 1
    }

    /// First position belonging to `N_i`, i.e. positions `< start(i)` span `S/N_i`.
    pub fn start(&self, i: usize) -> usize {
        self.starts[i]
    }

    /// `radix(j) = p_1 ⋯ p_j`; `radix(start(i)) = |S/N_i|`.
    pub fn radix(&self, j: usize) -> u64 {
        self.radix[j]
    }

    /// Series member `N_i`.
    pub fn kernel(&self, i: usize) -> &PermGroup {
        &self.kernels[i]
    }

    pub fn has_element_table(&self) -> bool {
        self.table.is_some()
    }

    pub fn digit(&self, code: u64, j: usize) -> u64 {
        (code / self.radix[j]) % self.rel_orders[j]
    }

    pub fn digits(&self, code: u64) -> Vec<u64> {
        (0..self.len()).map(|j| self.digit(code, j)).collect()
    }

    pub fn pack(&self, digits: &[u64]) -> Result<u64> {
        if digits.len() != self.len() {
            return Err(Error::Parse(format!("expected {} exponents, got {}", self.len(), digits.len())));
        }
        let mut code = 0;
        for (j, &e) in digits.iter().enumerate() {
            if e >= self.rel_orders[j] {
                return Err(Error::Parse(format!("exponent {e} at position {j} exceeds relative order")));
            }
            code += e * self.radix[j];
        }
        Ok(code)
    }

    /// First position with a nonzero digit, or `None` for code 0.
    pub fn leading(&self, code: u64) -> Option<usize> {
        (code != 0).then(|| (0..self.len()).find(|&j| self.digit(code, j) != 0).unwrap())
    }

    /// Digits of factor `i` as a local code in `0..p^d`.
    pub fn layer_code(&self, code: u64, i: usize) -> u64 {
        (code % self.radix[self.starts[i]]) / self.radix[self.starts[i - 1]]
    }

    /// The element `g_1^{e_1} ⋯ g_n^{e_n}`.
    pub fn element(&self, code: u64) -> Perm {
        let mut x = Perm::identity(self.degree);
        for i in 1..=self.layers() {
            let c = self.layer_code(code, i);
            if c != 0 {
                x = x.compose(&self.layer_elems[i - 1][c as usize]);
            }
        }
        x
    }

    /// Exponent code of a known member of `S`. Non-members give an arbitrary
    /// value when the element table is in use.
    pub fn code_of_member(&self, x: &Perm) -> u64 {
        match &self.table {
            Some(t) => *t.codes.get(&t.key(x)).expect("element of S"),
            None => self.code_by_cosets(x).expect("element of S"),
        }
    }

    /// Exponent code of `x`, or `NotMember`.
    pub fn code(&self, x: &Perm) -> Result<u64> {
        if x.degree() != self.degree {
            return Err(Error::NotMember);
        }
        match &self.table {
            Some(t) => {
                let code = *t.codes.get(&t.key(x)).ok_or(Error::NotMember)?;
                if self.element(code) == *x {
                    Ok(code)
                } else {
                    Err(Error::NotMember)
                }
            }
            None => self.code_by_cosets(x),
        }
    }

    /// Exponent extraction through the per-layer coset tables only.
    pub fn code_by_cosets(&self, x: &Perm) -> Result<u64> {
        let mut x = x.clone();
        let mut code = 0;
        for i in 1..=self.layers() {
            let rep = self.kernels[i].canonical_coset_rep(&x);
            let c = *self.coset_tables[i - 1].get(rep.raw()).ok_or(Error::NotMember)?;
            code += c * self.radix[self.starts[i - 1]];
            if c != 0 {
                x = self.layer_inverses[i - 1][c as usize].compose(&x);
            }
        }
        if x.is_identity() {
            Ok(code)
        } else {
            Err(Error::NotMember)
        }
    }

    pub fn contains(&self, x: &Perm) -> bool {
        self.code(x).is_ok()
    }
}
