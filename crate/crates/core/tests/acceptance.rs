//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use herd_core::criteria::{
    check_cluster_leader_criterion, check_split_leader_criterion, check_tree_depth1_criterion,
    check_tree_depth2_criterion, check_tree_layer_sign_criterion, ImpliedVerdict,
};
use herd_core::design::{minimal_herdable_leader_sets, minimal_herdable_leader_sets_with, DesignOptions};
use herd_core::fixtures::{example2, example2_matrix, star, star_matrix};
use herd_core::generators::{ClusterSpec, InstanceGenerator};
use herd_core::positivity::{
    direct_verdict, is_unisigned, strictly_positive_in_image, verify_dual, verify_primal, Certificate,
};
use herd_core::rational::{int, Sign};
use herd_core::reductions::{diagonal_pair_herdability, leader_block_reduction};
use herd_core::synthesis::{herding_input, simulate, Synthesis};
use herd_core::system::controllability_matrix;
use herd_core::{RationalMatrix, SystemPair};
use rand::Rng;

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        summary: summary.into(),
    }
}

fn example2_reproduction() -> Outcome {
    let values = [-3, -2, -1, 1, 2, 3];
    let start = Instant::now();
    let mut agree = 0;
    let mut total = 0;
    for &a in &values {
        for &b in &values {
            for &c in &values {
                total += 1;
                if direct_verdict(&example2(a, b, c)).herdable == (b * c > 0) {
                    agree += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        agree == 216 && total == 216 && elapsed < Duration::from_secs(10),
        format!("{agree}/{total} verdicts match bc > 0 in {:.2}s", elapsed.as_secs_f64()),
    )
}

fn depth1_exactness() -> Outcome {
    let mut agree = 0;
    let mut total = 0;
    for leaves in 2..=6usize {
        for pattern in 0..(1u32 << leaves) {
            let weights: Vec<_> = (0..leaves)
                .map(|k| if pattern >> k & 1 == 1 { int(-1) } else { int(1) })
                .collect();
            let pair = star(&weights);
            let implied = check_tree_depth1_criterion(&pair)
                .ok()
                .and_then(|r| r.implied_verdict);
            total += 1;
            if implied == Some(ImpliedVerdict::from_bool(direct_verdict(&pair).herdable)) {
                agree += 1;
            }
        }
    }
    outcome(agree == total, format!("{agree}/{total} star sign patterns agree"))
}

fn depth2_exactness() -> Outcome {
    let mut g = InstanceGenerator::new(0xD2);
    let mut agree = 0;
    let mut herdable = 0;
    for _ in 0..500 {
        let n = g.rng().gen_range(3..=9);
        let profile = g.profile(2, n);
        let pair = SystemPair::with_leaders(g.layered_tree(&profile, &[]), &[0]).unwrap();
        let direct = direct_verdict(&pair).herdable;
        herdable += usize::from(direct);
        let implied = check_tree_depth2_criterion(&pair)
            .ok()
            .and_then(|r| r.implied_verdict);
        if implied == Some(ImpliedVerdict::from_bool(direct)) {
            agree += 1;
        }
    }
    outcome(
        agree == 500,
        format!("{agree}/500 depth-2 trees agree ({herdable} herdable)"),
    )
}

fn vandermonde_exactness() -> Outcome {
    let mut g = InstanceGenerator::new(0x7A);
    let mut agree = 0;
    let mut duals = 0;
    let mut duals_ok = 0;
    for _ in 0..500 {
        let n = g.rng().gen_range(1..=7);
        let (lambda, gamma) = g.diagonal_pair(n);
        let pair = SystemPair::new(lambda.clone(), RationalMatrix::column_vector(&gamma)).unwrap();
        let direct = direct_verdict(&pair).herdable;
        let Ok(verdict) = diagonal_pair_herdability(&lambda, &gamma) else {
            continue;
        };
        if verdict.herdable == direct {
            agree += 1;
        }
        if let Certificate::Dual(y) = &verdict.certificate {
            duals += 1;
            let r = controllability_matrix(&pair);
            if verify_dual(&r, y) && is_unisigned(y) {
                duals_ok += 1;
            }
        }
    }
    outcome(
        agree == 500 && duals_ok == duals,
        format!("{agree}/500 diagonal pairs agree, {duals_ok}/{duals} dual certificates verify"),
    )
}

fn reduction_equivalence() -> Outcome {
    let mut g = InstanceGenerator::new(0x5E);
    let mut block_mismatch = 0;
    for _ in 0..300 {
        let n = g.rng().gen_range(2..=7);
        let m = g.rng().gen_range(1..=3);
        let r = g.rng().gen_range(1..=m.min(n));
        let pair = g.block_input_pair(n, r, m, 0.4);
        let reduced = leader_block_reduction(&pair).expect("block form reduces");
        if reduced.verdict().herdable != direct_verdict(&pair).herdable {
            block_mismatch += 1;
        }
    }
    let mut t_mismatch = 0;
    for _ in 0..300 {
        let n = g.rng().gen_range(1..=7);
        let m = g.rng().gen_range(1..=3);
        let pair = g.random_pair(n, m, 0.4);
        let t = g.nonsingular(m);
        let changed = SystemPair::new(pair.a().clone(), pair.b().mul(&t).unwrap()).unwrap();
        if direct_verdict(&changed).herdable != direct_verdict(&pair).herdable {
            t_mismatch += 1;
        }
    }
    outcome(
        block_mismatch == 0 && t_mismatch == 0,
        format!("{block_mismatch} block-reduction and {t_mismatch} input-change mismatches over 300 + 300 pairs"),
    )
}

/// Draws instances until `wanted` satisfy the criterion's hypotheses and
/// counts how many of those are herdable.
fn sound(
    wanted: usize,
    mut draw: impl FnMut() -> SystemPair,
    check: fn(&SystemPair) -> herd_core::Result<herd_core::criteria::CriterionReport>,
) -> (usize, usize, usize) {
    let (mut hits, mut herdable, mut attempts) = (0, 0, 0);
    while hits < wanted && attempts < 200 * wanted {
        attempts += 1;
        let pair = draw();
        let holds = check(&pair).is_ok_and(|r| r.implied_verdict == Some(ImpliedVerdict::Herdable));
        if holds {
            hits += 1;
            herdable += usize::from(direct_verdict(&pair).herdable);
        }
    }
    (hits, herdable, attempts)
}

fn sufficient_soundness() -> Outcome {
    let mut g = InstanceGenerator::new(0x6C);
    let cluster = sound(
        200,
        || {
            let k = g.rng().gen_range(2..=4);
            let sizes = (0..k).map(|_| g.rng().gen_range(1..=3)).collect();
            let spec = ClusterSpec {
                sizes,
                intra_density: 0.5,
                inter_density: 0.3,
            };
            let (a, clusters) = g.clustered_graph(&spec);
            SystemPair::with_leaders(a, &clusters[0]).unwrap()
        },
        check_cluster_leader_criterion,
    );

    let mut g = InstanceGenerator::new(0x6D);
    let split = sound(
        200,
        || {
            let sizes = vec![g.rng().gen_range(2..=4), g.rng().gen_range(2..=4)];
            let spec = ClusterSpec {
                sizes,
                intra_density: 0.5,
                inter_density: 0.3,
            };
            let (a, clusters) = g.clustered_graph(&spec);
            let mut leaders = Vec::new();
            for c in &clusters {
                let size = g.rng().gen_range(1..c.len());
                let picks = g.subset(c.len(), size);
                leaders.extend(picks.into_iter().map(|i| c[i]));
            }
            leaders.sort_unstable();
            SystemPair::with_leaders(a, &leaders).unwrap()
        },
        check_split_leader_criterion,
    );

    let mut g = InstanceGenerator::new(0x6E);
    let layers = sound(
        200,
        || {
            let depth = g.rng().gen_range(1..=4);
            let profile = g.profile(depth, 10);
            let signs: Vec<Option<Sign>> = (0..depth).map(|_| Some(g.sign())).collect();
            SystemPair::with_leaders(g.layered_tree(&profile, &signs), &[0]).unwrap()
        },
        check_tree_layer_sign_criterion,
    );

    let parts = [("cluster", cluster), ("split", split), ("layer-sign", layers)];
    let passed = parts.iter().all(|(_, (hits, herdable, _))| *hits == 200 && herdable == hits);
    let summary = parts
        .iter()
        .map(|(name, (hits, herdable, attempts))| {
            format!("{name} {herdable}/{hits} herdable ({attempts} drawn)")
        })
        .collect::<Vec<_>>()
        .join(", ");
    outcome(passed, summary)
}

fn certificate_alternative() -> Outcome {
    let mut g = InstanceGenerator::new(0xCA);
    let mut ok = 0;
    let mut primal = 0;
    for _ in 0..500 {
        let rows = g.rng().gen_range(1..=7);
        let cols = g.rng().gen_range(1..=7);
        let density = g.rng().gen_range(0.1..0.9);
        let m = g.sparse_matrix(rows, cols, density);
        let verdict = strictly_positive_in_image(&m);
        let good = match &verdict.certificate {
            Certificate::Primal(u) => {
                primal += 1;
                verdict.herdable && verify_primal(&m, u)
            }
            Certificate::Dual(y) => !verdict.herdable && verify_dual(&m, y),
        };
        ok += usize::from(good);
    }
    outcome(
        ok == 500,
        format!("{ok}/500 certificates verify ({primal} primal, {} dual)", 500 - primal),
    )
}

fn synthesis_round_trip() -> Outcome {
    let mut g = InstanceGenerator::new(0x88);
    let h = int(1);
    let mut ok = 0;
    let mut done = 0;
    while done < 100 {
        let n = g.rng().gen_range(1..=6);
        let m = g.rng().gen_range(1..=n.min(3));
        let pair = g.random_pair(n, m, 0.4);
        if !direct_verdict(&pair).herdable {
            continue;
        }
        done += 1;
        let x0 = g.int_vector(n, -10, 10);
        if let Ok(Synthesis::Plan(plan)) = herding_input(&pair, &x0, &h) {
            let states = simulate(&pair, &x0, &plan.inputs).unwrap();
            let last = states.last().unwrap();
            if states.len() == n + 1 && last.iter().all(|x| *x >= h) {
                ok += 1;
            }
        }
    }
    outcome(ok == 100, format!("{ok}/100 herdable pairs reach h = 1 in n steps"))
}

fn leader_design() -> Outcome {
    let star_a = star_matrix(&[int(1), int(1), int(1), int(1)]);
    let star_ok = minimal_herdable_leader_sets(&star_a, 2)
        .is_ok_and(|r| r.minimal_sets.iter().any(|s| s.leaders == [0]));
    let ex2_ok = minimal_herdable_leader_sets(&example2_matrix(1, 1, 1), 2)
        .is_ok_and(|r| r.minimal_sets.iter().any(|s| s.leaders == [0]));

    let mut g = InstanceGenerator::new(0xDE);
    let mut agree = 0;
    let trials = 40;
    for _ in 0..trials {
        let n = g.rng().gen_range(1..=6);
        let density = g.rng().gen_range(0.2..0.6);
        let a = g.sparse_matrix(n, n, density);
        let pruned = minimal_herdable_leader_sets_with(
            &a,
            n,
            DesignOptions {
                prune: true,
                verify_prunes: true,
            },
        );
        let full = minimal_herdable_leader_sets_with(
            &a,
            n,
            DesignOptions {
                prune: false,
                verify_prunes: false,
            },
        );
        if let (Ok(p), Ok(f)) = (pruned, full) {
            let sets = |r: &herd_core::design::DesignResult| {
                r.minimal_sets.iter().map(|s| s.leaders.clone()).collect::<Vec<_>>()
            };
            if sets(&p) == sets(&f) {
                agree += 1;
            }
        }
    }
    outcome(
        star_ok && ex2_ok && agree == trials,
        format!(
            "star {{1}} minimal: {star_ok}, example 2 {{1}} minimal: {ex2_ok}, pruned = unpruned on {agree}/{trials}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("example-2 reproduction", example2_reproduction),
        ("depth-1 iff exactness", depth1_exactness),
        ("depth-2 iff exactness", depth2_exactness),
        ("vandermonde exactness", vandermonde_exactness),
        ("reduction equivalence", reduction_equivalence),
        ("sufficient-criteria soundness", sufficient_soundness),
        ("certificate alternative", certificate_alternative),
        ("synthesis round-trip", synthesis_round_trip),
        ("leader design", leader_design),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        let status = if result.passed { "PASS" } else { "FAIL" };
        failures += usize::from(!result.passed);
        println!("[{status}] criterion {}: {name}: {}", k + 1, result.summary);
    }
    println!("acceptance: {}/9 criteria passed", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
