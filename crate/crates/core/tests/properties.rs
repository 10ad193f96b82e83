//! Property-based invariants over random exact inputs.

use itertools::Itertools;
use proptest::prelude::*;
use v19_core::bruteforce::{partition_bruteforce, partition_monodromy, BoundaryKind, BoundarySpec};
use v19_core::field::{format_rational, parse_rational, rat, Field, Rational};
use v19_core::modular::{CrtAccumulator, Fp};
use v19_core::monodromy::{compute_f, compute_fbar, compute_z};
use v19_core::structure::verify_structure;
use v19_core::weights::{check_ybe, weight, WeightName};
use v19_core::zh::coeffs::{w_closed_form, zh_coeffs};
use v19_core::zh::{AnsatzFunction, AnsatzLayout};
use v19_core::{make_context, Model, ModelContext};

const P61: u64 = 2305843009213693951;
const PRIMES: [u64; 3] = [P61, 4611686018427387847, 1_000_000_007];

fn nonzero() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| rat(n, d))
}

fn model() -> impl Strategy<Value = Model> {
    prop_oneof![Just(Model::Ik), Just(Model::Fz)]
}

fn context(size: usize) -> impl Strategy<Value = ModelContext> {
    (model(), nonzero(), prop::collection::vec(nonzero(), size))
        .prop_filter_map("degenerate context", |(model, p, m)| {
            make_context(model, p, m).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn yang_baxter_holds(ctx in context(1), x12 in nonzero(), x13 in nonzero()) {
        prop_assert!(check_ybe(&ctx, &x12, &x13).unwrap());
    }

    #[test]
    fn reduction_is_a_homomorphism(a in nonzero(), b in nonzero(), ctx in context(1)) {
        for prime in PRIMES {
            let red = |r: &Rational| Fp::from_rational(r, prime).unwrap();
            prop_assert_eq!(red(&(a.clone() + &b)), red(&a) + red(&b));
            prop_assert_eq!(red(&(a.clone() * &b)), red(&a) * red(&b));
            prop_assert_eq!(red(&a.recip()), red(&a).inverse().unwrap());
            let Some(small) = ctx.reduce(prime) else { continue };
            for name in WeightName::all() {
                let exact = weight(&ctx, name, &a).unwrap();
                prop_assert_eq!(red(&exact), weight(&small, name, &red(&a)).unwrap());
            }
        }
    }

    #[test]
    fn rational_text_round_trip(a in nonzero(), b in -40i64..40) {
        let r = a * Rational::from_integer(b.into());
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn crt_recovers_small_rationals(values in prop::collection::vec(nonzero(), 1..6)) {
        let mut acc = CrtAccumulator::new(values.len());
        for prime in &PRIMES[..2] {
            let images: Vec<Fp> =
                values.iter().map(|v| Fp::from_rational(v, *prime).unwrap()).collect();
            acc.push(&images);
        }
        prop_assert_eq!(acc.reconstruct().unwrap(), values);
    }

    #[test]
    fn monodromy_matches_configuration_sum(
        size in 1usize..=3,
        seed in prop::collection::vec(nonzero(), 9),
        ctx_pick in context(3),
    ) {
        let ctx = ctx_pick
            .with_inhomogeneities(ctx_pick.inhomogeneities()[..size].to_vec())
            .unwrap();
        for kind in [BoundaryKind::Z, BoundaryKind::F, BoundaryKind::Fbar] {
            let rows = match kind {
                BoundaryKind::Z => size,
                _ => size + 1,
            };
            let xs = &seed[..rows];
            let spec = BoundarySpec::preset(kind, size).unwrap();
            prop_assert_eq!(
                partition_bruteforce(&ctx, &spec, xs).unwrap(),
                partition_monodromy(&ctx, kind, xs).unwrap()
            );
        }
    }

    #[test]
    fn z_is_symmetric(ctx in context(3), xs in prop::collection::vec(nonzero(), 3)) {
        let z = compute_z(&ctx, &xs).unwrap();
        for perm in xs.iter().cloned().permutations(3) {
            prop_assert_eq!(compute_z(&ctx, &perm).unwrap(), z.clone());
        }
    }

    #[test]
    fn f_vanishes_on_its_zero_set(ctx in context(2), u in nonzero(), y in nonzero()) {
        for m in ctx.inhomogeneities() {
            let root = m.clone() * ctx.zeta();
            prop_assert!(compute_f(&ctx, std::slice::from_ref(&u), &root, &y).unwrap().is_zero_elem());
            prop_assert!(compute_fbar(&ctx, &y, m, std::slice::from_ref(&u)).unwrap().is_zero_elem());
        }
    }

    #[test]
    fn w_determinant_matches_closed_form(ctx in context(1), x0 in nonzero(), x1 in nonzero()) {
        // Degenerate points make either side undefined; both must then agree on failing.
        if let (Ok(set), Ok(closed)) = (zh_coeffs(&ctx, &x0, &x1), w_closed_form(&ctx, &x0, &x1)) {
            prop_assert_eq!(set.w, closed);
        }
    }

    #[test]
    fn symmetric_ansatz_is_symmetric(
        coeffs in prop::collection::vec(-9i64..=9, 378),
        args in prop::collection::vec(nonzero(), 4),
    ) {
        let layout = AnsatzLayout::new(3, true);
        let coeffs: Vec<Rational> = coeffs.into_iter().map(|c| rat(c, 1)).collect();
        let h = &coeffs[..layout.h_len()];
        let base = layout.evaluate(AnsatzFunction::H, h, &args);
        // H(u1, u2 | v1, v2) is symmetric in the two lattice slots only.
        for perm in args[..2].iter().cloned().permutations(2) {
            let moved: Vec<Rational> = perm.into_iter().chain(args[2..].iter().cloned()).collect();
            prop_assert_eq!(layout.evaluate(AnsatzFunction::H, h, &moved), base.clone());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn degree_bounds_hold(ctx in context(2), seed in any::<u64>()) {
        let report = verify_structure(&ctx, seed).unwrap();
        for check in report.checks.iter().filter(|c| c.name.ends_with("_bound")) {
            prop_assert!(check.pass, "{:?}", check);
        }
        prop_assert!(report.check("deg_y1_F").unwrap().pass);
        prop_assert!(report.check("deg_y1_H").unwrap().pass);
    }
}
