//! Automorphism group orders of abelian groups: brute-force enumeration
//! against the closed formula.
//!
//!     cargo run --example abelian_automorphisms -- 4,16 2,2,4

use holobrace::abelian::{aut_elements, aut_order_formula};
use holobrace::AbelianGroup;

fn main() -> holobrace::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let descs = if args.is_empty() {
        vec!["4".into(), "2,2".into(), "2,4".into(), "2,2,2".into(), "3,9".into(), "4,16".into()]
    } else {
        args
    };
    println!("{:<10} {:>6} {:>12} {:>12}", "group", "|G|", "|Aut| enum", "|Aut| formula");
    for desc in descs {
        let g = AbelianGroup::parse(&desc)?;
        let formula = aut_order_formula(&g);
        let counted = match aut_elements(&g) {
            Ok(auts) => auts.len().to_string(),
            Err(_) => "-".into(),
        };
        println!("{:<10} {:>6} {:>12} {:>12}", g.to_string(), g.order(), counted, formula);
    }
    Ok(())
}
