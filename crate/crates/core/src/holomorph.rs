//! The holomorph `Hol(G) = G ⋊ Aut(G)` acting on the element indices of `G`.
//!
//! `(g, α)` sends `x` to `g + α(x)`. The permutation form is what all group
//! computations use; the symbolic form is kept for brace extraction and
//! printing. Index 0 (the zero element) is the base point throughout.

use crate::abelian::{aut_elements_with, AbelianGroup, Endomorphism, GroupElement, Limits};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::permgroup::PermGroup;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HolElement {
    pub shift: GroupElement,
    pub auto: Endomorphism,
}

impl HolElement {
    pub fn identity(g: &AbelianGroup) -> Self {
        HolElement {
            shift: g.zero(),
            auto: Endomorphism::identity(g),
        }
    }

    pub fn translation(g: &AbelianGroup, shift: GroupElement) -> Self {
        HolElement {
            shift,
            auto: Endomorphism::identity(g),
        }
    }

    /// `(g,α)(h,β) = (g + α(h), α∘β)`.
    pub fn mul(&self, g: &AbelianGroup, other: &HolElement) -> HolElement {
        HolElement {
            shift: g.add(&self.shift, &self.auto.apply(g, &other.shift)),
            auto: self.auto.compose(g, &other.auto),
        }
    }

    /// `(g,α)⁻¹ = (−α⁻¹(g), α⁻¹)`.
    pub fn inv(&self, g: &AbelianGroup) -> HolElement {
        let a_inv = self.auto.inverse(g);
        HolElement {
            shift: g.neg(&a_inv.apply(g, &self.shift)),
            auto: a_inv,
        }
    }

    /// Image of the element with index `x`.
    pub fn act(&self, g: &AbelianGroup, x: usize) -> usize {
        let a = g.element(x).expect("index in range");
        g.index(&g.add(&self.shift, &self.auto.apply(g, &a)))
    }

    pub fn to_perm(&self, g: &AbelianGroup) -> Perm {
        Perm::from_fn(g.order() as usize, |x| self.act(g, x))
    }
}

#[derive(Clone, Debug)]
pub struct Holomorph {
    group: AbelianGroup,
    auts: Vec<Endomorphism>,
    aut_perms: Vec<Perm>,
    aut_gens: Vec<Perm>,
}

impl Holomorph {
    pub fn new(group: &AbelianGroup) -> Result<Self> {
        Self::with_limits(group, &Limits::default())
    }

    pub fn with_limits(group: &AbelianGroup, limits: &Limits) -> Result<Self> {
        if group.order() as usize > crate::perm::MAX_DEGREE {
            return Err(Error::TooLarge {
                what: "group order (permutation degree)",
                size: group.order() as u128,
                bound: crate::perm::MAX_DEGREE as u128,
            });
        }
        let auts = aut_elements_with(group, limits)?;
        let degree = group.order() as usize;
        let aut_perms: Vec<Perm> = auts
            .iter()
            .map(|a| Perm::from_fn(degree, |x| group.index(&a.apply(group, &group.element(x).unwrap()))))
            .collect();
        // Greedy generating set for Aut(G): keep each automorphism not already generated.
        let mut aut_group = PermGroup::trivial(degree);
        let mut aut_gens = Vec::new();
        for a in &aut_perms {
            if aut_group.order() as usize == aut_perms.len() {
                break;
            }
            if aut_group.add_generator(a) {
                aut_gens.push(a.clone());
            }
        }
        Ok(Holomorph {
            group: group.clone(),
            auts,
            aut_perms,
            aut_gens,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.group.order() as usize
    }

    pub fn order(&self) -> u64 {
        self.group.order() * self.auts.len() as u64
    }

    pub fn automorphisms(&self) -> &[Endomorphism] {
        &self.auts
    }

    /// Automorphisms as permutations of element indices, in enumeration order.
    pub fn automorphism_perms(&self) -> &[Perm] {
        &self.aut_perms
    }

    pub fn translation(&self, shift: &GroupElement) -> Perm {
        let g = &self.group;
        Perm::from_fn(self.degree(), |x| g.index(&g.add(shift, &g.element(x).unwrap())))
    }

    /// Translations by the canonical generators of `G`.
    pub fn translation_generators(&self) -> Vec<Perm> {
        (0..self.group.rank())
            .map(|i| self.translation(&self.group.generator(i)))
            .collect()
    }

    pub fn automorphism_generators(&self) -> &[Perm] {
        &self.aut_gens
    }

    /// Translations by generators of `G` followed by a generating set of `Aut(G)`.
    pub fn generators(&self) -> Vec<Perm> {
        let mut gens = self.translation_generators();
        gens.extend(self.aut_gens.iter().cloned());
        gens
    }

    pub fn perm_group(&self) -> PermGroup {
        PermGroup::new(self.degree(), &self.generators())
    }

    /// Recovers `(g, α)` from a permutation: `g` is the image of 0 and
    /// `α(e_i) = π(e_i) − g`. Returns `None` if the result is not in `Hol(G)`.
    pub fn element_from_perm(&self, p: &Perm) -> Option<HolElement> {
        let g = &self.group;
        let shift = g.element(p.apply(0)).ok()?;
        let images = (0..g.rank())
            .map(|i| {
                let e = g.index(&g.generator(i));
                g.sub(&g.element(p.apply(e)).unwrap(), &shift)
            })
            .collect();
        let auto = Endomorphism::new(g, images).ok()?;
        let h = HolElement { shift, auto };
        (h.to_perm(g) == *p && h.auto.is_bijective(g)).then_some(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hol(desc: &str) -> Holomorph {
        Holomorph::new(&AbelianGroup::parse(desc).unwrap()).unwrap()
    }

    #[test]
    fn translation_in_c4_is_a_four_cycle() {
        let h = hol("4");
        let t = &h.translation_generators()[0];
        assert_eq!(t.images().collect::<Vec<_>>(), vec![1, 2, 3, 0]);
    }

    #[test]
    fn holomorph_orders() {
        assert_eq!(hol("4").perm_group().order(), 8);
        assert_eq!(hol("2,2").perm_group().order(), 24);
        assert_eq!(hol("64").perm_group().order(), 2048);
        assert_eq!(hol("3,3").perm_group().order(), 9 * 48);
        for d in ["8", "2,4", "9", "2,2,2"] {
            let h = hol(d);
            assert_eq!(h.perm_group().order(), h.order());
        }
    }

    #[test]
    fn identity_and_translation_action() {
        let g = AbelianGroup::parse("2,4").unwrap();
        let id = HolElement::identity(&g);
        assert!((0..8).all(|x| id.act(&g, x) == x));
        for a in g.elements() {
            let t = HolElement::translation(&g, a.clone());
            assert_eq!(t.act(&g, 0), g.index(&a));
        }
    }

    #[test]
    fn multiplication_matches_composition() {
        let h = hol("2,8");
        let g = h.group().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = g.order() as usize;
        let random = |rng: &mut ChaCha8Rng| HolElement {
            shift: g.element(rng.gen_range(0..n)).unwrap(),
            auto: h.automorphisms()[rng.gen_range(0..h.automorphisms().len())].clone(),
        };
        for _ in 0..1000 {
            let a = random(&mut rng);
            let b = random(&mut rng);
            let ab = a.mul(&g, &b);
            for x in 0..n {
                assert_eq!(ab.act(&g, x), a.act(&g, b.act(&g, x)));
            }
            assert_eq!(ab.to_perm(&g), a.to_perm(&g).compose(&b.to_perm(&g)));
            let ai = a.inv(&g);
            assert_eq!(a.mul(&g, &ai), HolElement::identity(&g));
            assert_eq!(h.element_from_perm(&a.to_perm(&g)), Some(a));
        }
    }

    #[test]
    fn stabilizer_of_zero_is_the_automorphism_part() {
        let h = hol("2,4");
        let g = h.group().clone();
        let elements = h.perm_group().elements();
        let mut fixing = 0;
        for p in &elements {
            let e = h.element_from_perm(p).unwrap();
            assert_eq!(p.fixes(0), e.shift == g.zero());
            if p.fixes(0) {
                fixing += 1;
            }
            // faithful action
            assert_eq!(p.is_identity(), e == HolElement::identity(&g));
        }
        assert_eq!(fixing, h.automorphisms().len());
    }
}
