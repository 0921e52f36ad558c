//! Normal series with elementary abelian factors.

use crate::abelian::{factorize, prime_power};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::permgroup::PermGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesFactor {
    pub prime: u64,
    pub rank: usize,
}

impl SeriesFactor {
    pub fn order(&self) -> u64 {
        self.prime.pow(self.rank as u32)
    }
}

/// How the default series is refined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SeriesStrategy {
    /// Derived series, each factor split by primes and then by p-power layers.
    #[default]
    DerivedPowers,
    /// As `DerivedPowers`, then each factor further split along `[M,S] ≥ [M,S,S] ≥ …`,
    /// with central steps cut down to order-p steps.
    Central,
}

/// `S = N_0 ≥ N_1 ≥ … ≥ N_r = 1`, every `N_i` normal in `S` and every
/// `N_{i-1}/N_i` elementary abelian.
#[derive(Clone, Debug)]
pub struct NormalSeries {
    members: Vec<PermGroup>,
    factors: Vec<SeriesFactor>,
}

impl NormalSeries {
    pub fn members(&self) -> &[PermGroup] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &PermGroup {
        &self.members[i]
    }

    /// Factor `N_{i-1}/N_i` for `i` in `1..=len()`.
    pub fn factor(&self, i: usize) -> SeriesFactor {
        self.factors[i - 1]
    }

    pub fn factors(&self) -> &[SeriesFactor] {
        &self.factors
    }

    /// Number of factors `r`.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn top(&self) -> &PermGroup {
        &self.members[0]
    }

    /// Builds a series from explicit members `N_0 ≥ … ≥ N_r` and checks every
    /// invariant instead of trusting the input.
    pub fn from_members(members: Vec<PermGroup>) -> Result<Self> {
        let factors = check_series(&members)?;
        Ok(NormalSeries { members, factors })
    }

    /// Series for `S` from user-supplied generator sets of `N_1, …, N_{r-1}`.
    pub fn from_generator_sets(s: &PermGroup, inner: &[Vec<Perm>]) -> Result<Self> {
        let degree = s.degree();
        let mut members = vec![s.clone()];
        for gens in inner {
            if gens.iter().any(|g| g.degree() != degree) {
                return Err(Error::InvalidSeries("generator degree mismatch".into()));
            }
            members.push(PermGroup::new(degree, gens));
        }
        if !members.last().unwrap().is_trivial() {
            members.push(PermGroup::trivial(degree));
        }
        Self::from_members(members)
    }
}

/// Validates a candidate series and returns its factor data.
pub fn check_series(members: &[PermGroup]) -> Result<Vec<SeriesFactor>> {
    let fail = |msg: String| Err(Error::InvalidSeries(msg));
    let Some(s) = members.first() else {
        return fail("empty series".into());
    };
    if !members.last().unwrap().is_trivial() {
        return fail("series does not end in the trivial group".into());
    }
    let ambient = s.generators();
    let mut factors = Vec::new();
    for i in 1..members.len() {
        let (upper, lower) = (&members[i - 1], &members[i]);
        if !lower.is_subgroup_of(upper) {
            return fail(format!("member {i} is not contained in member {}", i - 1));
        }
        if !lower.is_normalized_by(ambient) {
            return fail(format!("member {i} is not normal"));
        }
        let index = upper.order() / lower.order();
        let Some((p, d)) = prime_power(index) else {
            return fail(format!("factor {i} has order {index}, not a prime power > 1"));
        };
        for (j, a) in upper.generators().iter().enumerate() {
            if !lower.contains(&a.pow(p)) {
                return fail(format!("factor {i} is not of exponent {p}"));
            }
            for b in &upper.generators()[j + 1..] {
                if !lower.contains(&Perm::commutator(a, b)) {
                    return fail(format!("factor {i} is not abelian"));
                }
            }
        }
        factors.push(SeriesFactor {
            prime: p,
            rank: d as usize,
        });
    }
    Ok(factors)
}

/// Derived series of `S`, refined so every factor is elementary abelian.
///
/// Each abelian factor `A = D_k/D_{k+1}` is split by ascending primes and, per
/// prime, along `A ≥ pA ≥ p²A ≥ …`; the members are `⟨D_{k+1}, g^m⟩` for the
/// generators `g` of `D_k`, which are characteristic in `D_k`.
pub fn elementary_abelian_series(s: &PermGroup) -> Result<NormalSeries> {
    elementary_abelian_series_with(s, SeriesStrategy::DerivedPowers)
}

pub fn elementary_abelian_series_with(s: &PermGroup, strategy: SeriesStrategy) -> Result<NormalSeries> {
    let derived = s.derived_series()?;
    let degree = s.degree();
    let mut members = vec![s.clone()];
    for pair in derived.windows(2) {
        let (top, bottom) = (&pair[0], &pair[1]);
        let index = top.order() / bottom.order();
        let mut multiplier = 1u64;
        for (p, a) in factorize(index) {
            let mut m = multiplier;
            for _ in 0..a {
                m *= p;
                let mut gens: Vec<Perm> = bottom.generators().to_vec();
                gens.extend(top.generators().iter().map(|g| g.pow(m)));
                let x = PermGroup::new(degree, &gens);
                if x.order() == bottom.order() {
                    break;
                }
                if x.order() < members.last().unwrap().order() {
                    members.push(x);
                }
            }
            multiplier *= p.pow(a);
        }
        members.push(bottom.clone());
    }
    if strategy == SeriesStrategy::Central {
        members = refine_central(s, &members);
    }
    NormalSeries::from_members(members)
}

/// Splits every factor `X/Y` along `X ≥ [X,S]Y ≥ [X,S,S]Y ≥ …`, and every
/// central step into order-p steps.
fn refine_central(s: &PermGroup, members: &[PermGroup]) -> Vec<PermGroup> {
    let degree = s.degree();
    let ambient = s.generators();
    let mut out = vec![members[0].clone()];
    for pair in members.windows(2) {
        let (top, bottom) = (&pair[0], &pair[1]);
        let mut chain = vec![top.clone()];
        loop {
            let cur = chain.last().unwrap();
            if cur.order() == bottom.order() {
                break;
            }
            let mut comms: Vec<Perm> = bottom.generators().to_vec();
            for x in cur.generators() {
                for g in ambient {
                    comms.push(Perm::commutator(x, g));
                }
            }
            let next = PermGroup::normal_closure(degree, ambient, &comms);
            if next.order() == cur.order() {
                break;
            }
            chain.push(next);
        }
        if chain.last().unwrap().order() != bottom.order() {
            chain.push(bottom.clone());
        }
        for step in chain.windows(2) {
            let (x, y) = (&step[0], &step[1]);
            let central = x
                .generators()
                .iter()
                .all(|a| ambient.iter().all(|g| y.contains(&Perm::commutator(a, g))));
            if central {
                // Any subgroup between Y and X is normal; peel generators off one at a time.
                let mut intermediates = Vec::new();
                let mut cur = y.clone();
                for a in x.generators() {
                    if cur.add_generator(a) && cur.order() < x.order() {
                        intermediates.push(cur.clone());
                    }
                }
                out.extend(intermediates.into_iter().rev());
            }
            out.push(y.clone());
        }
    }
    out
}
