//! Acceptance suite. Runs every criterion sequentially, prints one
//! PASS/FAIL line each and exits nonzero if any criterion fails.
//!
//! All comparisons are exact; the only tolerances are the sample counts and
//! wall-clock budgets pinned below.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use v19_core::algebra::{hhb_redundancy, verify_relation_sampled, RelationId};
use v19_core::bruteforce::{partition_bruteforce, partition_monodromy, BoundaryKind, BoundarySpec};
use v19_core::field::{int, rat};
use v19_core::monodromy::compute_z;
use v19_core::sampling::{distinct_rationals, random_context, random_rational, rng_from_seed};
use v19_core::structure::verify_structure;
use v19_core::weights::check_ybe;
use v19_core::zh::solve::{solve_zh, Backend, SolveOptions};
use v19_core::zh::tables::table_sweep;
use v19_core::zh::{w_closed_form, zh_coeffs};
use v19_core::{make_context, Error, Model, Result};

const SEED: u64 = 20_240_601;

const YBE_SAMPLES: usize = 20;
const COMMUTATION_SAMPLES: usize = 5;
const HIGHER_SAMPLES: usize = 5;
const ORACLE_POINTS: usize = 10;
const STRUCTURE_MAX_L: usize = 4;
const TABLE_Q_SAMPLES: usize = 5;
const L3_CHECK_POINTS: usize = 10;
const L3_MIN_PRIMES: usize = 2;
const W_SAMPLES: usize = 50;
const PHI_SAMPLES: usize = 3;

const BUDGET_YBE: Duration = Duration::from_secs(1);
const BUDGET_COMMUTATION: Duration = Duration::from_secs(30);
const BUDGET_HIGHER: Duration = Duration::from_secs(60);
const BUDGET_ORACLE: Duration = Duration::from_secs(60);
const BUDGET_STRUCTURE: Duration = Duration::from_secs(120);
const BUDGET_TABLES_PER_Q: Duration = Duration::from_secs(120);
const BUDGET_L3: Duration = Duration::from_secs(15 * 60);
const BUDGET_W: Duration = Duration::from_secs(1);
const BUDGET_PHI: Duration = Duration::from_secs(120);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        ok,
        detail: detail.into(),
    })
}

fn ybe() -> Result<Outcome> {
    let mut rng = rng_from_seed(SEED);
    let mut checked = 0;
    for model in Model::ALL {
        for _ in 0..YBE_SAMPLES {
            let ctx = random_context(&mut rng, model, 1);
            let x12 = random_rational(&mut rng, 40, 9);
            let x13 = random_rational(&mut rng, 40, 9);
            if !check_ybe(&ctx, &x12, &x13)? {
                return outcome(false, format!("{model} p={} fails", ctx.p()));
            }
            checked += 1;
        }
    }
    outcome(true, format!("{checked} samples"))
}

fn relations(rels: &[(RelationId, &[usize])], samples: usize) -> Result<Outcome> {
    let mut checked = 0;
    for model in Model::ALL {
        for (i, &(rel, sizes)) in rels.iter().enumerate() {
            for &size in sizes {
                let seed = SEED + 100 * i as u64 + size as u64;
                let res =
                    verify_relation_sampled(model, rel, size, rel.arity(size), samples, seed)?;
                if let Some(bad) = res.iter().find(|r| !r.operator_norm_zero) {
                    return outcome(
                        false,
                        format!("{model} {rel:?} L={size} at {:?}", bad.sample),
                    );
                }
                checked += res.len();
            }
        }
    }
    outcome(true, format!("{checked} relation samples"))
}

fn commutation() -> Result<Outcome> {
    let rels: Vec<_> = RelationId::COMMUTATION
        .iter()
        .map(|&r| (r, &[1usize, 2, 3][..]))
        .collect();
    relations(&rels, COMMUTATION_SAMPLES)
}

fn higher() -> Result<Outcome> {
    let rels = [
        (RelationId::AE, &[1usize, 2, 3][..]),
        (RelationId::EA, &[1, 2, 3][..]),
        (RelationId::AEL, &[2, 3][..]),
        (RelationId::EAL, &[2, 3][..]),
        // n = L - 1, so n runs over {1, 2}.
        (RelationId::FFb, &[2, 3][..]),
        (RelationId::FbF, &[2, 3][..]),
    ];
    relations(&rels, HIGHER_SAMPLES)
}

fn oracle() -> Result<Outcome> {
    let mut rng = rng_from_seed(SEED + 4);
    let mut checked = 0;
    for model in Model::ALL {
        for size in 1..=3 {
            for kind in [BoundaryKind::Z, BoundaryKind::F, BoundaryKind::Fbar] {
                let bnd = BoundarySpec::preset(kind, size)?;
                for _ in 0..ORACLE_POINTS {
                    let ctx = random_context(&mut rng, model, size);
                    let xs = distinct_rationals(&mut rng, bnd.rows, 30, 7);
                    let brute = partition_bruteforce(&ctx, &bnd, &xs)?;
                    if brute != partition_monodromy(&ctx, kind, &xs)? {
                        return outcome(false, format!("{model} {kind:?} L={size}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    outcome(true, format!("{checked} points"))
}

fn structure() -> Result<Outcome> {
    let mut rng = rng_from_seed(SEED + 5);
    let mut checks = 0;
    let mut failures = Vec::new();
    for model in Model::ALL {
        for size in 1..=STRUCTURE_MAX_L {
            let ctx = random_context(&mut rng, model, size);
            let report = verify_structure(&ctx, SEED + size as u64)?;
            for bad in report.checks.iter().filter(|c| !c.pass) {
                failures.push(format!(
                    "{model} L={size} {} expected {} measured {}",
                    bad.name, bad.expected, bad.measured
                ));
            }
            checks += report.checks.len();
        }
    }
    if failures.is_empty() {
        outcome(true, format!("{checks} checks, L up to {STRUCTURE_MAX_L}"))
    } else {
        outcome(
            false,
            format!(
                "{} of {checks} checks failed: {}",
                failures.len(),
                failures.join("; ")
            ),
        )
    }
}

fn tables() -> Result<Outcome> {
    let mut detail = Vec::new();
    for model in Model::ALL {
        let start = Instant::now();
        let opts = SolveOptions {
            seed: SEED + 6,
            ..SolveOptions::default()
        };
        let reports = table_sweep(model, TABLE_Q_SAMPLES, &opts)?;
        let per_q = start.elapsed() / TABLE_Q_SAMPLES as u32;
        let matched: usize = reports.iter().map(|r| r.matched).sum();
        let zeros: usize = reports.iter().map(|r| r.zeros_matched).sum();
        detail.push(format!(
            "{model}: {} q, {matched} entries, {zeros} zeros, {per_q:.1?}/q",
            reports.len()
        ));
        let zeros_ok = model != Model::Fz || reports.iter().all(|r| r.zeros_matched == 16);
        if reports.len() < TABLE_Q_SAMPLES
            || !reports.iter().all(|r| r.pass)
            || !zeros_ok
            || per_q > BUDGET_TABLES_PER_Q
        {
            return outcome(false, detail.join("; "));
        }
    }
    outcome(true, detail.join("; "))
}

fn three_sites() -> Result<Outcome> {
    let mut detail = Vec::new();
    for (model, p) in [(Model::Ik, rat(3, 2)), (Model::Fz, rat(5, 3))] {
        let ctx = make_context(model, p, vec![int(1); 3])?;
        let opts = SolveOptions {
            backend: Backend::Modular,
            seed: SEED + 7,
            min_primes: L3_MIN_PRIMES,
            check_points: L3_CHECK_POINTS,
            ..SolveOptions::default()
        };
        let sol = solve_zh(&ctx, 3, &opts)?;
        let z_check = sol
            .check("z_matches_monodromy")
            .is_some_and(|c| c.pass && c.points == L3_CHECK_POINTS);
        // Independent recheck at points the solver never saw.
        let mut rng = rng_from_seed(SEED + 77);
        let mut fresh = 0;
        let mut independent = true;
        while fresh < L3_CHECK_POINTS {
            let pt = distinct_rationals(&mut rng, 4, 50, 13);
            match sol.z(&ctx, &pt[0], &pt[1..]) {
                Ok(z) => independent &= z == compute_z(&ctx, &pt[1..])?,
                Err(Error::DegenerateSample(_)) => continue,
                Err(e) => return Err(e),
            }
            fresh += 1;
        }
        detail.push(format!(
            "{model}: kernel {} rank {}/{} primes {}",
            sol.kernel_dim,
            sol.rank,
            sol.unknowns,
            sol.primes.len()
        ));
        if sol.kernel_dim != 1
            || sol.primes.len() < L3_MIN_PRIMES
            || !z_check
            || !independent
            || !sol.pass
        {
            return outcome(false, detail.join("; "));
        }
    }
    outcome(true, detail.join("; "))
}

fn w_identity() -> Result<Outcome> {
    let mut rng = rng_from_seed(SEED + 8);
    for model in Model::ALL {
        let mut done = 0;
        while done < W_SAMPLES {
            let size = rng.gen_range(1..=3);
            let ctx = random_context(&mut rng, model, size);
            let xs = distinct_rationals(&mut rng, 2, 40, 9);
            let set = match zh_coeffs(&ctx, &xs[0], &xs[1]) {
                Ok(s) => s,
                Err(Error::DegenerateSample(_)) => continue,
                Err(e) => return Err(e),
            };
            if set.w != w_closed_form(&ctx, &xs[0], &xs[1])? {
                return outcome(false, format!("{model} at {xs:?}"));
            }
            done += 1;
        }
    }
    outcome(true, format!("{} samples", 2 * W_SAMPLES))
}

fn phi_closure() -> Result<Outcome> {
    let rels: Vec<_> = RelationId::SCALAR
        .iter()
        .map(|&r| (r, &[1usize, 2, 3][..]))
        .collect();
    let lemmas = relations(&rels, PHI_SAMPLES)?;
    if !lemmas.ok {
        return Ok(lemmas);
    }
    let mut rng = rng_from_seed(SEED + 9);
    let mut redundancy = 0;
    for model in Model::ALL {
        for size in 1..=3 {
            loop {
                let ctx = random_context(&mut rng, model, size);
                let xs = distinct_rationals(&mut rng, size + 1, 30, 7);
                match hhb_redundancy(&ctx, &xs, SEED) {
                    Ok(true) => break,
                    Ok(false) => return outcome(false, format!("hhb redundancy {model} L={size}")),
                    Err(Error::DegenerateSample(_) | Error::OmegaZero) => continue,
                    Err(e) => return Err(e),
                }
            }
            redundancy += 1;
        }
    }
    outcome(
        true,
        format!("{}; redundancy at {redundancy} points", lemmas.detail),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);
    let criteria: [Criterion; 9] = [
        ("1 ybe", ybe, BUDGET_YBE),
        ("2 commutation relations", commutation, BUDGET_COMMUTATION),
        ("3 higher relations", higher, BUDGET_HIGHER),
        ("4 oracle equivalence", oracle, BUDGET_ORACLE),
        ("5 structural lemmas", structure, BUDGET_STRUCTURE),
        (
            "6 table reproduction",
            tables,
            BUDGET_TABLES_PER_Q.saturating_mul(2 * TABLE_Q_SAMPLES as u32),
        ),
        ("7 three-site consistency", three_sites, BUDGET_L3),
        ("8 W identity", w_identity, BUDGET_W),
        ("9 phi-lemma closure", phi_closure, BUDGET_PHI),
    ];
    let mut failures = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(o) => (o.ok, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_budget = elapsed <= budget;
        let pass = ok && in_budget;
        failures += usize::from(!pass);
        println!(
            "{} criterion {name}: {detail} [{elapsed:.2?} of {budget:.0?}{}]",
            if pass { "PASS" } else { "FAIL" },
            if in_budget { "" } else { ", over budget" }
        );
    }
    if failures == 0 {
        println!("all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
