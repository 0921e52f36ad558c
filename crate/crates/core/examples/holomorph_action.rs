//! The holomorph Hol(G) = G ⋊ Aut(G) acting on G by x ↦ g + α(x).
//!
//!     cargo run --example holomorph_action -- 4

use holobrace::{AbelianGroup, HolElement, Holomorph};

fn main() -> holobrace::Result<()> {
    let desc = std::env::args().nth(1).unwrap_or_else(|| "4".into());
    let g = AbelianGroup::parse(&desc)?;
    let hol = Holomorph::new(&g)?;
    println!("Hol({g}) has order {} and acts on {} points", hol.order(), hol.degree());

    println!("translations:");
    for p in hol.translation_generators() {
        println!("  {p}");
    }
    println!("automorphism generators:");
    for p in hol.automorphism_generators() {
        println!("  {p}");
    }

    // (g,α)(h,β) = (g + α(h), αβ), and the permutations compose the same way
    let a = HolElement { shift: g.generator(0), auto: hol.automorphisms()[hol.automorphisms().len() - 1].clone() };
    let b = HolElement::translation(&g, g.generator(0));
    let ab = a.mul(&g, &b);
    assert_eq!(ab.to_perm(&g), a.to_perm(&g).compose(&b.to_perm(&g)));
    println!("a = {}, b = {}, ab = {}", a.to_perm(&g), b.to_perm(&g), ab.to_perm(&g));
    println!("a⁻¹ = {}", a.inv(&g).to_perm(&g));

    let group = hol.perm_group();
    println!("as a permutation group: order {}, transitive {}", group.order(), group.is_transitive());
    Ok(())
}
