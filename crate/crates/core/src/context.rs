//! Everything the lifting needs about one group: the ambient group `S`, its
//! series and pcgs, per-layer kernel data, and the series fingerprint.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::abelian::{AbelianGroup, Limits};
use crate::error::{Error, Result};
use crate::holomorph::Holomorph;
use crate::pcgs::Pcgs;
use crate::perm::Perm;
use crate::permgroup::{orbit_keys, PermGroup};
use crate::record::SubgroupRecord;
use crate::series::{elementary_abelian_series_with, NormalSeries, SeriesStrategy};

pub const DEFAULT_MAX_ORBIT: usize = 65536;

/// Largest holomorph whose elements are enumerated to find a Sylow subgroup.
const SYLOW_SEARCH_LIMIT: u64 = 1 << 22;

/// Orbit cap from `HOLOBRACE_MAX_ORBIT`, or the default.
pub fn max_orbit_from_env() -> usize {
    std::env::var("HOLOBRACE_MAX_ORBIT")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_ORBIT)
}

/// Which group the lifting runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `S = Hol(G)`, which must be soluble.
    Full,
    /// `G` is a `p`-group with insoluble holomorph: lift inside a Sylow
    /// `p`-subgroup of `Hol(G)` containing the translations, then fuse the
    /// final classes under all of `Hol(G)`.
    Sylow(u64),
}

impl Mode {
    pub fn name(&self) -> String {
        match self {
            Mode::Full => "full".into(),
            Mode::Sylow(p) => format!("sylow{p}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "full" {
            return Ok(Mode::Full);
        }
        s.strip_prefix("sylow")
            .and_then(|p| p.parse().ok())
            .map(Mode::Sylow)
            .ok_or_else(|| Error::Parse(format!("unknown mode {s:?}")))
    }
}

#[derive(Clone, Debug, Default)]
pub struct ContextOptions {
    pub limits: Limits,
    pub strategy: SeriesStrategy,
    /// Generator sets of `N_1, …, N_{r-1}` replacing the computed series.
    pub series: Option<Vec<Vec<Perm>>>,
    pub max_orbit: Option<usize>,
}

/// Data for factor `i` (`N_{i-1}/N_i`).
#[derive(Clone, Debug)]
pub struct LayerData {
    pub prime: u64,
    pub rank: usize,
    /// Positions `start..end` of the pcgs.
    pub start: usize,
    pub end: usize,
    /// `|N_i|`.
    pub kernel_order: u64,
}

#[derive(Debug)]
pub struct Context {
    group: AbelianGroup,
    hol: Holomorph,
    mode: Mode,
    ambient: PermGroup,
    series: NormalSeries,
    pcgs: Pcgs,
    layers: Vec<LayerData>,
    /// `orbit_ids[i][x]`: smallest point in the `N_i`-orbit of `x`.
    orbit_ids: Vec<Vec<usize>>,
    fingerprint: String,
    max_orbit: usize,
    kernel_cache: Vec<OnceLock<Vec<SubgroupRecord>>>,
}

impl Context {
    pub fn new(group: &AbelianGroup) -> Result<Self> {
        Self::with_options(group, &ContextOptions::default())
    }

    pub fn from_descriptor(desc: &str) -> Result<Self> {
        Self::new(&AbelianGroup::parse(desc)?)
    }

    pub fn with_options(group: &AbelianGroup, options: &ContextOptions) -> Result<Self> {
        let hol = Holomorph::with_limits(group, &options.limits)?;
        let full = hol.perm_group();
        let (mode, ambient) = match full.derived_series() {
            Ok(_) => (Mode::Full, full),
            Err(Error::Insoluble(order)) => {
                let p = group.p_group_prime().ok_or(Error::Insoluble(order))?;
                (Mode::Sylow(p), sylow_containing_translations(&hol, p)?)
            }
            Err(e) => return Err(e),
        };
        let series = match &options.series {
            Some(inner) => NormalSeries::from_generator_sets(&ambient, inner)?,
            None => elementary_abelian_series_with(&ambient, options.strategy)?,
        };
        Self::assemble(group, hol, mode, ambient, series, options.max_orbit)
    }

    fn assemble(
        group: &AbelianGroup,
        hol: Holomorph,
        mode: Mode,
        ambient: PermGroup,
        series: NormalSeries,
        max_orbit: Option<usize>,
    ) -> Result<Self> {
        let pcgs = Pcgs::from_series(&series)?;
        let degree = hol.degree();
        let layers = (1..=series.len())
            .map(|i| LayerData {
                prime: series.factor(i).prime,
                rank: series.factor(i).rank,
                start: pcgs.start(i - 1),
                end: pcgs.start(i),
                kernel_order: series.member(i).order(),
            })
            .collect();
        let orbit_ids = series
            .members()
            .iter()
            .map(|m| orbit_ids(degree, m.generators()))
            .collect();
        let fingerprint = fingerprint(group, mode, &series, &pcgs);
        let kernel_cache = (0..=series.len()).map(|_| OnceLock::new()).collect();
        Ok(Context {
            group: group.clone(),
            hol,
            mode,
            ambient,
            series,
            pcgs,
            layers,
            orbit_ids,
            fingerprint,
            max_orbit: max_orbit.unwrap_or_else(max_orbit_from_env),
            kernel_cache,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn descriptor(&self) -> String {
        self.group.descriptor()
    }

    pub fn holomorph(&self) -> &Holomorph {
        &self.hol
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The group `S` the series lives in.
    pub fn ambient(&self) -> &PermGroup {
        &self.ambient
    }

    pub fn series(&self) -> &NormalSeries {
        &self.series
    }

    pub fn pcgs(&self) -> &Pcgs {
        &self.pcgs
    }

    /// Order of the regular subgroups sought.
    pub fn target(&self) -> u64 {
        self.group.order()
    }

    /// Number of series factors `r`; layers run `0..=r`.
    pub fn layer_count(&self) -> usize {
        self.series.len()
    }

    /// Factor data for `N_{i-1}/N_i`, `1 ≤ i ≤ r`.
    pub fn layer(&self, i: usize) -> &LayerData {
        &self.layers[i - 1]
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn max_orbit(&self) -> usize {
        self.max_orbit
    }

    pub fn set_max_orbit(&mut self, cap: usize) {
        self.max_orbit = cap;
    }

    /// Pcgs position where `N_i` begins.
    pub fn kernel_start(&self, i: usize) -> usize {
        self.pcgs.start(i)
    }

    /// Record of `N_i`.
    pub fn kernel_record(&self, i: usize) -> SubgroupRecord {
        SubgroupRecord::kernel(&self.pcgs, self.pcgs.start(i))
    }

    /// True if `U·N_i` (given by generators of `U` modulo `N_i`) is transitive.
    pub fn is_transitive_mod(&self, gens: &[Perm], i: usize) -> bool {
        let ids = &self.orbit_ids[i];
        let n = ids.len();
        let mut parent: Vec<usize> = ids.clone();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = (0..n).filter(|&x| ids[x] == x).count();
        for g in gens {
            for x in 0..n {
                let (a, b) = (find(&mut parent, x), find(&mut parent, g.apply(x)));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                    components -= 1;
                    if components == 1 {
                        return true;
                    }
                }
            }
        }
        components == 1
    }

    /// The three necessary conditions for a record `U ≥ N_i` at layer `i` to
    /// lead to a regular subgroup: `|U/N_i|` divides `|G|`, the rest of the
    /// order still fits in `N_i`, and `U` is transitive.
    pub fn prune_keep(&self, record: &SubgroupRecord, i: usize) -> bool {
        let h = self.pcgs.start(i);
        let q = record.quotient_order(&self.pcgs, h);
        let gens: Vec<Perm> = record
            .head(&self.pcgs, h)
            .iter()
            .map(|&r| self.pcgs.element(r))
            .collect();
        self.order_allows(q, i) && self.is_transitive_mod(&gens, i)
    }

    /// Conditions (a) and (b) for a quotient order `q = |U/N_i|`.
    pub fn order_allows(&self, q: u64, i: usize) -> bool {
        let t = self.target();
        let kernel = self.series.member(i).order();
        t % q == 0 && t / q <= kernel
    }

    pub(crate) fn kernel_cache(&self, i: usize) -> &OnceLock<Vec<SubgroupRecord>> {
        &self.kernel_cache[i]
    }

    /// Installs precomputed kernel classes for factor `i` (e.g. read from a
    /// context directory). Ignored if already computed.
    pub fn preload_kernel_classes(&self, i: usize, classes: Vec<SubgroupRecord>) {
        let _ = self.kernel_cache[i].set(classes);
    }

    /// Final classes as `Hol(G)`-classes. In full mode this is the identity;
    /// in Sylow mode, classes of `S` that are conjugate in `Hol(G)` are merged,
    /// keeping the smallest record of each.
    pub fn fuse_final(&self, records: &[SubgroupRecord]) -> Result<Vec<SubgroupRecord>> {
        if self.mode == Mode::Full {
            return Ok(records.to_vec());
        }
        let gens = self.hol.generators();
        let mut best: BTreeMap<Vec<Vec<u8>>, SubgroupRecord> = BTreeMap::new();
        for r in records {
            let key = self.conjugacy_key(r, &gens)?;
            best.entry(key)
                .and_modify(|cur| {
                    if r < cur {
                        *cur = r.clone();
                    }
                })
                .or_insert_with(|| r.clone());
        }
        let mut out: Vec<SubgroupRecord> = best.into_values().collect();
        out.sort();
        Ok(out)
    }

    /// Smallest element-set (sorted image lists) in the conjugacy class of `U` under `gens`.
    fn conjugacy_key(&self, record: &SubgroupRecord, gens: &[Perm]) -> Result<Vec<Vec<u8>>> {
        let elems = PermGroup::new(self.hol.degree(), &record.generators(&self.pcgs)).elements();
        let start = element_set(&elems);
        let orbit = orbit_keys(
            gens,
            start,
            |set, g| {
                let conj: Vec<Perm> = set
                    .iter()
                    .map(|imgs| {
                        let p = Perm::from_fn(imgs.len(), |x| imgs[x] as usize);
                        p.conjugate_by(g)
                    })
                    .collect();
                Ok(element_set(&conj))
            },
            self.max_orbit,
        )?;
        Ok(orbit.into_iter().min().unwrap())
    }
}

fn element_set(elems: &[Perm]) -> Vec<Vec<u8>> {
    let mut set: Vec<Vec<u8>> = elems.iter().map(|p| p.raw().to_vec()).collect();
    set.sort();
    set
}

fn orbit_ids(degree: usize, gens: &[Perm]) -> Vec<usize> {
    let mut ids = vec![usize::MAX; degree];
    for x in 0..degree {
        if ids[x] == usize::MAX {
            for y in crate::permgroup::orbit_of_point(degree, gens, x) {
                ids[y] = x;
            }
        }
    }
    ids
}

/// Hash over the group, mode, pcgs and series members, used to tie shard
/// files to the context that produced them.
fn fingerprint(group: &AbelianGroup, mode: Mode, series: &NormalSeries, pcgs: &Pcgs) -> String {
    let mut h = Sha256::new();
    h.update(format!("{}\n{}\n", group.descriptor(), mode.name()));
    for g in pcgs.generators() {
        h.update(g.raw());
    }
    h.update(format!("{:?}\n", pcgs.relative_orders()));
    for member in series.members() {
        let record = SubgroupRecord::generated_by(pcgs, member.generators());
        h.update(record.encode());
        h.update("\n");
    }
    let digest = h.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// A Sylow `p`-subgroup of `Hol(G)` containing the translations, grown one
/// normalizing element at a time in a fixed element order.
pub fn sylow_containing_translations(hol: &Holomorph, p: u64) -> Result<PermGroup> {
    let order = hol.order();
    if order > SYLOW_SEARCH_LIMIT {
        return Err(Error::TooLarge {
            what: "holomorph order for the Sylow search",
            size: order as u128,
            bound: SYLOW_SEARCH_LIMIT as u128,
        });
    }
    let mut p_part = 1;
    while order % (p_part * p) == 0 {
        p_part *= p;
    }
    let degree = hol.degree();
    let elements = hol.perm_group().elements();
    let mut sylow = PermGroup::new(degree, &hol.translation_generators());
    'grow: while sylow.order() < p_part {
        for x in &elements {
            if !sylow.contains(x)
                && sylow.contains(&x.pow(p))
                && sylow.is_normalized_by(std::slice::from_ref(x))
            {
                sylow.add_generator(x);
                continue 'grow;
            }
        }
        return Err(Error::Internal("Sylow search stalled".into()));
    }
    Ok(sylow)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c2_cubed_uses_a_sylow_subgroup() {
        let ctx = Context::from_descriptor("2,2,2").unwrap();
        assert_eq!(ctx.mode(), Mode::Sylow(2));
        assert_eq!(ctx.ambient().order(), 64);
        assert!(ctx.ambient().is_subgroup_of(&ctx.holomorph().perm_group()));
    }

    #[test]
    fn soluble_holomorphs_use_full_mode() {
        let ctx = Context::from_descriptor("2,4").unwrap();
        assert_eq!(ctx.mode(), Mode::Full);
        assert_eq!(ctx.ambient().order(), 64);
        assert_eq!(ctx.fingerprint().len(), 16);
        assert_eq!(ctx.fingerprint(), Context::from_descriptor("2,4").unwrap().fingerprint());
        assert_ne!(ctx.fingerprint(), Context::from_descriptor("8").unwrap().fingerprint());
    }

    #[test]
    fn prune_examples() {
        let ctx = Context::from_descriptor("4").unwrap();
        // |U/N_i| = 3 never divides 4
        assert!(!ctx.order_allows(3, 0));
        let r = ctx.layer_count();
        // at the last layer the kernel is trivial, so only order 4 fits
        assert!(ctx.order_allows(4, r));
        assert!(!ctx.order_allows(2, r));
        // the point stabilizer (automorphisms) is intransitive
        let auts = ctx.holomorph().automorphism_generators().to_vec();
        assert!(!ctx.is_transitive_mod(&auts, r));
        assert!(ctx.is_transitive_mod(&ctx.holomorph().translation_generators(), r));
    }

    #[test]
    fn mode_names_roundtrip() {
        for m in [Mode::Full, Mode::Sylow(2), Mode::Sylow(3)] {
            assert_eq!(Mode::parse(&m.name()).unwrap(), m);
        }
        assert!(Mode::parse("half").is_err());
    }
}
