use erglab::fberg::{cesaro_limit_scalar, furstenberg_joining, nonconventional_average, period};
use erglab::json::{
    canonical, coupling_from_json, coupling_to_json, parse, system_from_json, system_to_json, At,
};
use erglab::measure::{conditional_expectation, Partition, SimpleFunction};
use erglab::removal::{check_structure_hypotheses, random_structure, CouplingKind};
use erglab::zd::random::random_system;
use erglab::{Rational, RationalSystem, Scalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn masks(n: usize, bits: &[u32]) -> Vec<Vec<bool>> {
    bits.iter().map(|b| (0..n).map(|x| b >> (x % 32) & 1 == 1).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn averages_are_periodic_and_converge(seed in any::<u64>(), d in 1usize..=3, vals in prop::collection::vec(-3i64..4, 36)) {
        let sys: RationalSystem = random_system(seed, 8, d);
        let n = sys.len();
        let fs: Vec<SimpleFunction<Rational>> = (0..d).map(|i| SimpleFunction::new((0..n).map(|x| q(vals[(i * 12 + x) % 36], 2)).collect())).collect();
        let l = period(&sys) as usize;
        let all: Vec<usize> = (0..d).collect();
        let fj = furstenberg_joining(&sys, &all).unwrap();
        // ∫ ∏ f_i(x_i) dμ^F
        let want: Rational = fj.coupling().mass().iter().map(|(t, m)| {
            t.iter().zip(&fs).fold(m.clone(), |acc, (&x, f)| acc * f.value(x).clone())
        }).sum();
        for m in 1..=3 {
            let avg = nonconventional_average(&sys, &fs, m * l).unwrap();
            prop_assert_eq!(avg.integral(sys.space()).unwrap(), want.clone());
        }
        // partial sums repeat with period L: S(N + L) = S(N) + S(L)
        let sum = |k: usize| -> Vec<Rational> {
            nonconventional_average(&sys, &fs, k).unwrap().values().iter().map(|v| v.clone() * Rational::from_count(k)).collect()
        };
        let one = sum(l);
        for k in 1..=l {
            let lhs = sum(k + l);
            let rhs: Vec<Rational> = sum(k).iter().zip(&one).map(|(a, b)| a.clone() + b.clone()).collect();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn fberg_mass_dominates_the_diagonal_term(seed in any::<u64>(), d in 1usize..=3, bits in prop::collection::vec(any::<u32>(), 3)) {
        let sys: RationalSystem = random_system(seed, 10, d);
        let sets = masks(sys.len(), &bits[..d]);
        let all: Vec<usize> = (0..d).collect();
        let fj = furstenberg_joining(&sys, &all).unwrap();
        let meet: Vec<bool> = (0..sys.len()).map(|x| sets.iter().all(|s| s[x])).collect();
        let bound = sys.space().measure(&meet) / Rational::from_count(fj.period() as usize);
        prop_assert!(fj.coupling().product_mass(&sets) >= bound);
        prop_assert_eq!(fj.coupling().product_mass(&sets), cesaro_limit_scalar(&sys, &sets).unwrap());
    }

    #[test]
    fn level_set_keeps_almost_all_of_a(seed in any::<u64>(), bits in any::<u32>(), labels in prop::collection::vec(0usize..4, 12)) {
        let sys: RationalSystem = random_system(seed, 12, 1);
        let n = sys.len();
        let a = masks(n, &[bits]).remove(0);
        let p = Partition::from_labels(&labels[..n]);
        let e = conditional_expectation(&SimpleFunction::indicator(&a), &p, sys.space()).unwrap();
        let lost: Vec<bool> = (0..n).map(|x| a[x] && e.value(x).is_null()).collect();
        prop_assert!(sys.space().measure(&lost).is_null());
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), d in 1usize..=3) {
        let sys: RationalSystem = random_system(seed, 9, d);
        let text = canonical(&system_to_json(&sys));
        let back = system_from_json(&At::root(&parse(&text).unwrap())).unwrap();
        prop_assert_eq!(canonical(&system_to_json(&back)), text);
        prop_assert_eq!(&back, &sys);

        let all: Vec<usize> = (0..d).collect();
        let c = furstenberg_joining(&sys, &all).unwrap().coupling().clone();
        let text = canonical(&coupling_to_json(&c));
        let back = coupling_from_json(&At::root(&parse(&text).unwrap()), vec![sys.space().clone(); d]).unwrap();
        prop_assert_eq!(back.mass(), c.mass());
    }

    #[test]
    fn compatible_psi_makes_pullbacks_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (space, lambda, psi) = random_structure(&mut rng, 5, 3, &CouplingKind::ALL);
        let h = check_structure_hypotheses(&space, &lambda, &psi).unwrap();
        prop_assume!(h.ii);
        let full = psi[&0b111].clone();
        // every Ψ_[d]-measurable A has λ-a.e. equal pullbacks
        for a in full.measurable_sets() {
            let disagree: Rational = lambda
                .mass()
                .iter()
                .filter(|(t, _)| t.iter().any(|&x| a[x] != a[t[0]]))
                .map(|(_, m)| m.clone())
                .sum();
            prop_assert!(disagree.is_null());
        }
    }
}

#[test]
fn malformed_inputs_name_their_path() {
    let v = parse(r#"{"space":{"weights":["1/2","1/2"]},"generators":[[0,1],[1,"x"]]}"#).unwrap();
    let err = system_from_json(&At::root(&v)).unwrap_err();
    assert_eq!(err.to_string(), "malformed input at $.generators[1][1]: expected a nonnegative integer");

    let v = parse(r#"{"space":{"weights":["1/2","1/3"]},"generators":[[0,1]]}"#).unwrap();
    let err = system_from_json(&At::root(&v)).unwrap_err();
    assert!(err.to_string().contains("$.space"));
}
