use std::sync::OnceLock;

use holobrace::brace::Brace;
use holobrace::oracle::Oracle;
use holobrace::{AbelianGroup, Context, SubgroupRecord};
use proptest::prelude::*;

struct Fixture {
    ctx: Context,
    oracle: Oracle,
    classes: Vec<SubgroupRecord>,
}

fn fixture(desc: &'static str) -> &'static Fixture {
    static FIXTURES: OnceLock<Vec<Fixture>> = OnceLock::new();
    let all = FIXTURES.get_or_init(|| {
        ["2,4", "2,8", "3,9", "2,2,2"]
            .iter()
            .map(|d| {
                let ctx = Context::from_descriptor(d).unwrap();
                let classes = ctx.regular_classes().unwrap().classes;
                let oracle = Oracle::new(&AbelianGroup::parse(d).unwrap()).unwrap();
                Fixture { ctx, oracle, classes }
            })
            .collect()
    });
    let idx = ["2,4", "2,8", "3,9", "2,2,2"].iter().position(|d| *d == desc).unwrap();
    &all[idx]
}

fn group_strategy() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["2,4", "2,8", "3,9", "2,2,2"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_subgroup_records_roundtrip(desc in group_strategy(), codes in prop::collection::vec(any::<u64>(), 0..4)) {
        let f = fixture(desc);
        let pcgs = f.ctx.pcgs();
        let gens: Vec<_> = codes.iter().map(|c| pcgs.element(c % pcgs.order())).collect();
        let r = SubgroupRecord::generated_by(pcgs, &gens);
        prop_assert_eq!(SubgroupRecord::decode(&r.encode(), pcgs).unwrap(), r.clone());
        for g in &gens {
            prop_assert!(r.contains(pcgs, g));
        }
        // generating set independence
        let mut shuffled = gens.clone();
        shuffled.reverse();
        shuffled.extend(gens.iter().map(|g| g.compose(g)));
        prop_assert_eq!(SubgroupRecord::generated_by(pcgs, &shuffled), r);
    }

    #[test]
    fn codes_and_elements_agree(desc in group_strategy(), code in any::<u64>()) {
        let pcgs = fixture(desc).ctx.pcgs();
        let code = code % pcgs.order();
        let x = pcgs.element(code);
        prop_assert_eq!(pcgs.code(&x).unwrap(), code);
        prop_assert_eq!(pcgs.code_by_cosets(&x).unwrap(), code);
    }

    #[test]
    fn conjugates_of_a_class_share_key_and_fingerprint(desc in group_strategy(), pick in any::<usize>(), code in any::<u64>()) {
        let f = fixture(desc);
        let pcgs = f.ctx.pcgs();
        let r = &f.classes[pick % f.classes.len()];
        // an arbitrary holomorph element: a word in the generators
        let gens = f.ctx.holomorph().generators();
        let mut s = gens[0].compose(&gens[0].inverse());
        let mut c = code;
        for _ in 0..6 {
            s = s.compose(&gens[(c % gens.len() as u64) as usize]);
            c /= gens.len() as u64;
        }
        if !pcgs.contains(&s) {
            // Sylow mode: s may leave the ambient group
            return Ok(());
        }
        let conj = r.conjugate(pcgs, &s);
        prop_assert_eq!(
            f.oracle.class_key(&conj.generators(pcgs)).unwrap(),
            f.oracle.class_key(&r.generators(pcgs)).unwrap()
        );
        prop_assert_eq!(
            Brace::from_regular(&f.ctx, &conj).unwrap().fingerprint(),
            Brace::from_regular(&f.ctx, r).unwrap().fingerprint()
        );
    }
}

#[test]
fn regular_labeling_is_bijective() {
    for desc in ["2,4", "2,8", "3,9", "2,2,2"] {
        let f = fixture(desc);
        for r in &f.classes {
            let b = Brace::from_regular(&f.ctx, r).unwrap();
            let mut firsts: Vec<usize> = b.mul_table().iter().map(|row| row[0]).collect();
            firsts.sort_unstable();
            assert_eq!(firsts, (0..b.size()).collect::<Vec<_>>());
        }
    }
}
