//! Subgroups as canonical induced generating sequences, encoded as integers.
//!
//!     cargo run --example subgroup_records -- 2,4

use holobrace::record::Igs;
use holobrace::{Context, SubgroupRecord};

fn main() -> holobrace::Result<()> {
    let desc = std::env::args().nth(1).unwrap_or_else(|| "2,4".into());
    let ctx = Context::from_descriptor(&desc)?;
    let pcgs = ctx.pcgs();
    println!("pcgs relative orders {:?}", pcgs.relative_orders());

    let translations = SubgroupRecord::generated_by(pcgs, &ctx.holomorph().translation_generators());
    println!("translations  {translations}  order {}", translations.order(pcgs));
    let auts = SubgroupRecord::generated_by(pcgs, ctx.holomorph().automorphism_generators());
    println!("Aut(G)        {auts}  order {}", auts.order(pcgs));
    println!("whole group   {}", SubgroupRecord::full(pcgs));
    println!("trivial       {}", SubgroupRecord::trivial());

    // the record does not depend on the generating set
    let mut igs = Igs::new(pcgs, pcgs.len());
    for g in ctx.holomorph().translation_generators().iter().rev() {
        igs.add(g.compose(g).compose(g));
        igs.add(g.clone());
    }
    assert_eq!(igs.finish(), translations);

    let line = translations.encode();
    let back = SubgroupRecord::decode(&line, pcgs)?;
    assert_eq!(back, translations);
    println!("roundtrip of {line:?} ok");

    // exponent vectors pack as e_1 + p_1·(e_2 + p_2·(…))
    let x = &translations.generators(pcgs)[0];
    let code = pcgs.code(x)?;
    println!("first translation row has exponents {:?} (code {code})", pcgs.digits(code));
    Ok(())
}
