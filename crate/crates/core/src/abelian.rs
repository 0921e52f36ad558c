//! Finite abelian groups given by their primary decomposition.
//!
//! A group is a list of prime-power cyclic orders `m_1, …, m_k`, sorted by
//! prime and then by exponent. Elements are exponent vectors; element indices
//! use the mixed-radix bijection `e_1 + m_1·(e_2 + m_2·(…))`.

use std::fmt;

use crate::error::{Error, Result};

/// Default bound on `|G|` for anything that enumerates `Aut(G)`.
pub const DEFAULT_MAX_GROUP_ORDER: u64 = 64;
/// Default bound on `|Aut(G)|` for brute-force enumeration.
pub const DEFAULT_MAX_AUT_ORDER: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_group_order: u64,
    pub max_aut_order: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_group_order: DEFAULT_MAX_GROUP_ORDER,
            max_aut_order: DEFAULT_MAX_AUT_ORDER,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    factors: Vec<u64>,
    primes: Vec<u64>,
    order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(pub Vec<u64>);

/// Returns `(p, e)` with `n = p^e`, or `None` when `n` is not a prime power.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            break;
        }
        p += 1;
    }
    if n % p != 0 {
        return Some((n, 1));
    }
    let mut m = n;
    let mut e = 0;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

/// Prime factorization as ascending `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl AbelianGroup {
    /// Builds `C_{m_1} × … × C_{m_k}`; every factor must be a prime power.
    pub fn new(factors: &[u64]) -> Result<Self> {
        let mut tagged = Vec::with_capacity(factors.len());
        for &m in factors {
            let (p, e) = prime_power(m).ok_or(Error::InvalidFactor(m))?;
            tagged.push((p, e, m));
        }
        tagged.sort_unstable();
        let order = tagged
            .iter()
            .try_fold(1u64, |acc, &(_, _, m)| acc.checked_mul(m))
            .ok_or(Error::TooLarge {
                what: "group order",
                size: u128::MAX,
                bound: u64::MAX as u128,
            })?;
        Ok(AbelianGroup {
            factors: tagged.iter().map(|t| t.2).collect(),
            primes: tagged.iter().map(|t| t.0).collect(),
            order,
        })
    }

    /// Parses a descriptor such as `"2,2,4,4"`. The empty string is the trivial group.
    pub fn parse(desc: &str) -> Result<Self> {
        let desc = desc.trim();
        if desc.is_empty() || desc == "1" {
            return Self::new(&[]);
        }
        let factors = desc
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad group descriptor {desc:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&factors)
    }

    /// Canonical descriptor, e.g. `"2,2,4,4"`; `"1"` for the trivial group.
    pub fn descriptor(&self) -> String {
        if self.factors.is_empty() {
            return "1".to_string();
        }
        self.factors
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// The prime `p` if the group is a nontrivial p-group.
    pub fn p_group_prime(&self) -> Option<u64> {
        let p = *self.primes.first()?;
        self.primes.iter().all(|&q| q == p).then_some(p)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// The i-th canonical generator.
    pub fn generator(&self, i: usize) -> GroupElement {
        let mut e = vec![0; self.rank()];
        e[i] = 1 % self.factors[i];
        GroupElement(e)
    }

    pub fn is_valid(&self, a: &GroupElement) -> bool {
        a.0.len() == self.rank() && a.0.iter().zip(&self.factors).all(|(&e, &m)| e < m)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        debug_assert!(self.is_valid(a) && self.is_valid(b));
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((&x, &y), &m)| (x + y) % m)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &m)| (m - x) % m)
                .collect(),
        )
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    /// `k·a`.
    pub fn scale(&self, k: u64, a: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &m)| ((x as u128 * k as u128) % m as u128) as u64)
                .collect(),
        )
    }

    pub fn element_order(&self, a: &GroupElement) -> u64 {
        a.0.iter()
            .zip(&self.factors)
            .map(|(&x, &m)| m / crate::perm::gcd(x, m))
            .fold(1, crate::perm::lcm)
    }

    /// Mixed-radix index in `[0, |G|)`.
    pub fn index(&self, a: &GroupElement) -> usize {
        let mut idx = 0u64;
        for (&e, &m) in a.0.iter().zip(&self.factors).rev() {
            idx = idx * m + e;
        }
        idx as usize
    }

    pub fn element(&self, index: usize) -> Result<GroupElement> {
        if index as u64 >= self.order {
            return Err(Error::Parse(format!(
                "element index {index} out of range for group of order {}",
                self.order
            )));
        }
        let mut rest = index as u64;
        Ok(GroupElement(
            self.factors
                .iter()
                .map(|&m| {
                    let e = rest % m;
                    rest /= m;
                    e
                })
                .collect(),
        ))
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order as usize).map(move |i| self.element(i).expect("index in range"))
    }

    /// Addition table over element indices.
    pub fn addition_table(&self) -> Vec<Vec<usize>> {
        let elems: Vec<_> = self.elements().collect();
        elems
            .iter()
            .map(|a| elems.iter().map(|b| self.index(&self.add(a, b))).collect())
            .collect()
    }

    fn check_enumerable(&self, limits: &Limits) -> Result<()> {
        if self.order > limits.max_group_order {
            return Err(Error::TooLarge {
                what: "group order",
                size: self.order as u128,
                bound: limits.max_group_order as u128,
            });
        }
        let aut = aut_order_formula(self);
        if aut > limits.max_aut_order as u128 {
            return Err(Error::TooLarge {
                what: "automorphism group order",
                size: aut,
                bound: limits.max_aut_order as u128,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbelianGroup({})", self.descriptor())
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "C1");
        }
        let parts: Vec<_> = self.factors.iter().map(|m| format!("C{m}")).collect();
        write!(f, "{}", parts.join("×"))
    }
}

/// A homomorphism `G → G`, stored as the images of the canonical generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Endomorphism {
    images: Vec<GroupElement>,
}

impl Endomorphism {
    /// Validates the hom condition `m_i · images[i] = 0`.
    pub fn new(g: &AbelianGroup, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != g.rank() {
            return Err(Error::Parse("endomorphism needs one image per generator".into()));
        }
        for (img, &m) in images.iter().zip(g.factors()) {
            if !g.is_valid(img) || g.scale(m, img) != g.zero() {
                return Err(Error::Parse(format!(
                    "image {img:?} of a generator of order {m} violates the hom condition"
                )));
            }
        }
        Ok(Endomorphism { images })
    }

    pub fn identity(g: &AbelianGroup) -> Self {
        Endomorphism {
            images: (0..g.rank()).map(|i| g.generator(i)).collect(),
        }
    }

    pub fn zero(g: &AbelianGroup) -> Self {
        Endomorphism {
            images: vec![g.zero(); g.rank()],
        }
    }

    /// Multiplication by `k`.
    pub fn scalar(g: &AbelianGroup, k: u64) -> Self {
        Endomorphism {
            images: (0..g.rank()).map(|i| g.scale(k, &g.generator(i))).collect(),
        }
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    /// `Σ e_i · images[i]`.
    pub fn apply(&self, g: &AbelianGroup, a: &GroupElement) -> GroupElement {
        let mut acc = g.zero();
        for (&e, img) in a.0.iter().zip(&self.images) {
            if e != 0 {
                acc = g.add(&acc, &g.scale(e, img));
            }
        }
        acc
    }

    /// `self ∘ other`.
    pub fn compose(&self, g: &AbelianGroup, other: &Endomorphism) -> Endomorphism {
        Endomorphism {
            images: other.images.iter().map(|x| self.apply(g, x)).collect(),
        }
    }

    /// The induced map on element indices.
    pub fn index_map(&self, g: &AbelianGroup) -> Vec<usize> {
        g.elements().map(|a| g.index(&self.apply(g, &a))).collect()
    }

    pub fn is_bijective(&self, g: &AbelianGroup) -> bool {
        let mut seen = vec![false; g.order() as usize];
        for a in g.elements() {
            let i = g.index(&self.apply(g, &a));
            if seen[i] {
                return false;
            }
            seen[i] = true;
        }
        true
    }

    /// Inverse of an automorphism (found by iterating powers).
    pub fn inverse(&self, g: &AbelianGroup) -> Endomorphism {
        let id = Endomorphism::identity(g);
        let mut prev = id.clone();
        let mut cur = self.clone();
        while cur != id {
            prev = cur.clone();
            cur = self.compose(g, &cur);
        }
        prev
    }
}

/// All automorphisms of `G`, by brute force over generator images.
///
/// The image of generator `i` ranges over the elements whose order divides `m_i`;
/// a tuple is kept iff the induced map is a bijection.
pub fn aut_elements(g: &AbelianGroup) -> Result<Vec<Endomorphism>> {
    aut_elements_with(g, &Limits::default())
}

pub fn aut_elements_with(g: &AbelianGroup, limits: &Limits) -> Result<Vec<Endomorphism>> {
    g.check_enumerable(limits)?;
    let n = g.order() as usize;
    let elems: Vec<GroupElement> = g.elements().collect();
    let add = g.addition_table();
    let candidates: Vec<Vec<usize>> = g
        .factors()
        .iter()
        .map(|&m| {
            (0..n)
                .filter(|&i| m % g.element_order(&elems[i]) == 0)
                .collect()
        })
        .collect();

    let k = g.rank();
    let mut result = Vec::new();
    let mut choice = vec![0usize; k];
    let mut seen = vec![0u32; n];
    let mut stamp = 0u32;
    let mut image_of = vec![0usize; n];
    'outer: loop {
        if k == 0 || candidates.iter().all(|c| !c.is_empty()) {
            stamp += 1;
            let imgs: Vec<usize> = (0..k).map(|i| candidates[i][choice[i]]).collect();
            // idx = prev + e_j where j is the lowest nonzero coordinate of idx,
            // so images follow from earlier ones with one table lookup each.
            let mut ok = true;
            for idx in 0..n {
                let img = if idx == 0 {
                    0
                } else {
                    let mut j = 0;
                    let mut stride = 1usize;
                    while (idx / stride) % g.factors()[j] as usize == 0 {
                        stride *= g.factors()[j] as usize;
                        j += 1;
                    }
                    add[image_of[idx - stride]][imgs[j]]
                };
                if seen[img] == stamp {
                    ok = false;
                    break;
                }
                seen[img] = stamp;
                image_of[idx] = img;
            }
            if ok {
                result.push(Endomorphism {
                    images: imgs.iter().map(|&i| elems[i].clone()).collect(),
                });
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                break 'outer;
            }
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
    Ok(result)
}

/// `|Aut(G)|` from the closed-form order of automorphism groups of abelian
/// p-groups, multiplied over the primes of `G`.
pub fn aut_order_formula(g: &AbelianGroup) -> u128 {
    let mut total: u128 = 1;
    let mut i = 0;
    let factors = g.factors();
    let primes = g.primes();
    while i < factors.len() {
        let p = primes[i];
        let mut exps = Vec::new();
        while i < factors.len() && primes[i] == p {
            exps.push(prime_power(factors[i]).unwrap().1);
            i += 1;
        }
        total *= aut_order_p_group(p as u128, &exps);
    }
    total
}

/// Exponents must be ascending.
fn aut_order_p_group(p: u128, exps: &[u32]) -> u128 {
    let n = exps.len();
    // 1-based d_k = max{l : e_l = e_k}, c_k = min{l : e_l = e_k}
    let d: Vec<u32> = (0..n)
        .map(|k| (0..n).rev().find(|&l| exps[l] == exps[k]).unwrap() as u32 + 1)
        .collect();
    let c: Vec<u32> = (0..n)
        .map(|k| (0..n).find(|&l| exps[l] == exps[k]).unwrap() as u32 + 1)
        .collect();
    let mut order: u128 = 1;
    for k in 0..n {
        order *= p.pow(d[k]) - p.pow(k as u32);
    }
    for j in 0..n {
        order *= p.pow(exps[j]).pow(n as u32 - d[j]);
    }
    for i in 0..n {
        order *= p.pow(exps[i] - 1).pow(n as u32 - c[i] + 1);
    }
    order
}
