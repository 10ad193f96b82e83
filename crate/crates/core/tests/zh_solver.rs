//! Integration tests for the ansatz solver against the transfer-matrix
//! evaluation of H and H̄.

use std::time::Instant;

use v19_core::field::{int, rat, Rational};
use v19_core::modular::random_prime_62;
use v19_core::monodromy::{compute_h, compute_hbar};
use v19_core::sampling::{distinct_rationals, rng_from_seed};
use v19_core::zh::solve::nullspace_modular;
use v19_core::zh::system::{default_samples, ResidueSamples};
use v19_core::zh::{assemble_system, compare_backend_ranks, solve_zh, AnsatzLayout, SolveOptions};
use v19_core::{make_context, Model, ModelContext};

fn modular_kernel_dim(ctx: &ModelContext, size: usize, seed: u64) -> (usize, usize) {
    let layout = AnsatzLayout::new(size, size >= 3);
    let mut rng = rng_from_seed(seed);
    let prime = random_prime_62(&mut rng);
    let small = ctx.reduce(prime).expect("context reduces");
    let sys = assemble_system(
        &small,
        &layout,
        default_samples(&layout),
        &ResidueSamples(prime),
        &mut rng,
    )
    .unwrap();
    let (ech, kernel) = nullspace_modular(&sys, prime);
    (ech.rank(), kernel.len())
}

#[test]
fn solution_is_proportional_to_transfer_matrix_h() {
    for model in Model::ALL {
        let ctx = make_context(model, rat(7, 5), vec![rat(2, 3), int(3)]).unwrap();
        let sol = solve_zh(&ctx, 2, &SolveOptions::default()).unwrap();
        assert!(sol.pass, "{:?}", sol.checks);
        let mut rng = rng_from_seed(17);
        let mut ratio: Option<Rational> = None;
        for _ in 0..4 {
            let pts = distinct_rationals(&mut rng, 3, 30, 7);
            let (us, y1, y2) = (&pts[..1], &pts[1], &pts[2]);
            for (fit, exact) in [
                (sol.h(us, y1, y2), compute_h(&ctx, us, y1, y2).unwrap()),
                (
                    sol.hbar(y1, y2, us),
                    compute_hbar(&ctx, y1, y2, us).unwrap(),
                ),
            ] {
                let r = fit / exact;
                assert_eq!(ratio.get_or_insert_with(|| r.clone()), &r, "{model}");
            }
        }
    }
}

#[test]
fn duplicated_rows_keep_the_rank() {
    let ctx = make_context(Model::Ik, rat(3, 2), vec![int(1), int(1)]).unwrap();
    let layout = AnsatzLayout::new(2, false);
    let mut rng = rng_from_seed(5);
    let prime = random_prime_62(&mut rng);
    let small = ctx.reduce(prime).unwrap();
    let mut sys = assemble_system(&small, &layout, 40, &ResidueSamples(prime), &mut rng).unwrap();
    let rank = nullspace_modular(&sys, prime).0.rank();
    let copy = sys.rows.clone();
    sys.rows.extend(copy);
    let copy = sys.families.clone();
    sys.families.extend(copy);
    assert_eq!(nullspace_modular(&sys, prime).0.rank(), rank);
}

#[test]
fn kernel_is_one_dimensional_for_small_lattices() {
    for model in Model::ALL {
        for p in [rat(3, 2), rat(5, 3), rat(-7, 4)] {
            for size in 1..=2 {
                for m in [
                    vec![int(1); size],
                    vec![rat(2, 5), int(-3)][..size].to_vec(),
                ] {
                    let ctx = make_context(model, p.clone(), m).unwrap();
                    let (rank, dim) = modular_kernel_dim(&ctx, size, 3);
                    assert_eq!(dim, 1, "{model} p={p} L={size} rank={rank}");
                }
            }
        }
    }
}

#[test]
fn kernel_is_one_dimensional_at_three_sites() {
    let start = Instant::now();
    for model in Model::ALL {
        for p in [rat(3, 2), rat(5, 3), rat(-7, 4)] {
            let ctx = make_context(model, p.clone(), vec![int(1); 3]).unwrap();
            assert_eq!(modular_kernel_dim(&ctx, 3, 11), (755, 1), "{model} p={p}");
        }
        let ctx = make_context(model, rat(7, 5), vec![rat(2, 5), int(-3), rat(4, 3)]).unwrap();
        assert_eq!(
            modular_kernel_dim(&ctx, 3, 13),
            (755, 1),
            "{model} generic m"
        );
    }
    eprintln!("three-site kernels in {:.1?}", start.elapsed());
}

#[test]
fn backends_agree_on_three_site_rank() {
    let ctx = make_context(Model::Ik, rat(3, 2), vec![int(1); 3]).unwrap();
    let layout = AnsatzLayout::new(3, true);
    let cmp = compare_backend_ranks(&ctx, &layout, 20, 7).unwrap();
    assert!(cmp.agree, "{cmp:?}");
    assert_eq!(cmp.rows, 40);
}
