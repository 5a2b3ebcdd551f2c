mod common;

use atomshuttle::cost::{cost_general, cost_simple, lift_simple_to_general, plan_metrics};
use atomshuttle::decompose::{
    canonical_grid_target, grid_column_finalize, plan_three_step, plan_two_step, row_balance, PlanOptions,
    Strategy, StrategyChoice, StrategyFailure,
};
use atomshuttle::gale_ryser::{construct_geometry, gale_ryser_check, DegreeSpec};
use atomshuttle::instance::{generate_instance, Goal, ProblemInstance, ProblemKind};
use atomshuttle::rng::InstanceRng;
use atomshuttle::shuttle::{left_aligned_of, peephole_prune, plan_left_alignment, plan_rightward_delivery};
use atomshuttle::{apply_op, apply_plan, plan, solve_1d, verify_grid, Axis, CostModel, CostParams, Direction, Geometry, Plan, ShiftOp, ShuttleOptions};
use common::*;

fn random_op(rng: &mut InstanceRng, n: usize) -> ShiftOp {
    let dir = [Direction::Left, Direction::Right, Direction::Up, Direction::Down][rng.below(4) as usize];
    let pick = |rng: &mut InstanceRng| (0..n).filter(|_| rng.below(2) == 0).collect::<Vec<_>>();
    let rows = pick(rng);
    ShiftOp::new(dir, rows, pick(rng)).unwrap()
}

#[test]
fn single_ops_match_cell_simulator() {
    let mut rng = InstanceRng::new(1);
    for _ in 0..20_000 {
        let n = 1 + rng.below(7) as usize;
        let g = random_geometry(&mut rng, n, 0.4);
        let op = random_op(&mut rng, n);
        match (apply_op(&g, &op), brute_apply(&to_grid(&g), &op)) {
            (Ok(a), Ok(b)) => {
                assert_eq!(to_grid(&a), b);
                assert_eq!(a.atom_count(), g.atom_count());
            }
            (Err(e), Err(f)) => {
                // both report a boundary fault ahead of any collision
                let same = matches!(
                    (&e, &f),
                    (atomshuttle::MoveError::Boundary { .. }, Fault::Boundary)
                        | (atomshuttle::MoveError::Collision { .. }, Fault::Collision)
                );
                assert!(same, "{e:?} vs {f:?}");
            }
            (a, b) => panic!("disagreement on {op} over\n{g}: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn random_plans_match_replay() {
    let mut rng = InstanceRng::new(2);
    let mut replayed = 0;
    while replayed < 500 {
        let g = random_geometry(&mut rng, 6, 0.3);
        let plan: Plan = (0..5).map(|_| random_op(&mut rng, 6)).collect();
        let fast = apply_plan(&g, &plan);
        let slow = brute_replay(&to_grid(&g), &plan);
        assert_eq!(fast.is_ok(), slow.is_ok());
        match (fast, slow) {
            (Ok(a), Ok(b)) => {
                assert_eq!(to_grid(&a), b);
                replayed += 1;
            }
            (Err(e), Err((k, _))) => assert_eq!(e.index, k),
            _ => unreachable!(),
        }
    }
}

#[test]
fn grid_verifier_matches_anchor_scan() {
    let mut rng = InstanceRng::new(3);
    for _ in 0..5_000 {
        let n = 1 + rng.below(6) as usize;
        let g = { let alpha = 0.3 + 0.6 * rng.unit(); random_geometry(&mut rng, n, alpha) };
        let atoms = rng.below((n * n + 1) as u64) as usize;
        assert_eq!(verify_grid(&g, atoms), naive_has_block(&to_grid(&g), isqrt(atoms)));
    }
}

#[test]
fn inverse_shift_restores_geometry() {
    let mut rng = InstanceRng::new(4);
    let mut checked = 0;
    while checked < 2_000 {
        let n = 2 + rng.below(6) as usize;
        let g = random_geometry(&mut rng, n, 0.5);
        let op = random_op(&mut rng, n);
        if op.direction() != Direction::Left {
            continue;
        }
        let Ok(moved) = apply_op(&g, &op) else { continue };
        let cols: Vec<usize> = op.cols().iter().filter(|&&j| j > 0).map(|j| j - 1).collect();
        let back = ShiftOp::new(Direction::Right, op.rows().to_vec(), cols).unwrap();
        // An atom sitting just left of a selected block stays put, and the
        // reverse shift would then pick it up. Only without such atoms is
        // the reverse shift an inverse.
        let stays_beside_block = op.rows().iter().any(|&i| {
            op.cols().iter().any(|&j| j > 0 && !op.cols().contains(&(j - 1)) && g.get(i, j - 1))
        });
        let restored = apply_op(&moved, &back).map_or(false, |b| b == g);
        assert_eq!(restored, !stays_beside_block, "{op}\n{g}");
        checked += 1;
    }
}

#[test]
fn rotation_duality_for_column_tasks() {
    let mut rng = InstanceRng::new(5);
    for _ in 0..500 {
        let n = 2 + rng.below(9) as usize;
        let a = random_geometry(&mut rng, n, 0.5);
        // same column sums: shuffle each column independently
        let b = Geometry::from_fn(n, |i, j| a.get((i + j * 7 + 3) % n, j)).unwrap();
        let opts = ShuttleOptions::default();
        let direct = solve_1d(&a, &b, Axis::ColumnWise, opts).unwrap();
        let via = solve_1d(&a.rotate90(), &b.rotate90(), Axis::RowWise, opts).unwrap().unrotate(n);
        assert_eq!(direct, via);
        assert_eq!(apply_plan(&a, &direct).unwrap(), b);
        let slow = brute_replay(&to_grid(&a), &direct).unwrap();
        assert_eq!(slow, to_grid(&b));
        assert_eq!(a.rotate90().rotate90().rotate90().rotate90(), a);
    }
}

#[test]
fn alignment_and_delivery_oracles() {
    let mut rng = InstanceRng::new(6);
    for n in [4usize, 8, 16] {
        for _ in 0..100 {
            let a = { let alpha = rng.unit(); random_geometry(&mut rng, n, alpha) };
            let plan = plan_left_alignment(&a);
            assert_eq!(plan.len(), n - 1);
            let packed = apply_plan(&a, &plan).unwrap();
            assert_eq!(to_grid(&packed), pack_rows(&to_grid(&a)));
            assert!(packed.is_left_aligned());
            assert_eq!(&packed, left_aligned_of(&a).base());

            let deliver = plan_rightward_delivery(&a);
            assert_eq!(deliver.len(), n - 1);
            assert_eq!(apply_plan(&packed, &deliver).unwrap(), a);
            let pruned = peephole_prune(&deliver, &a).unwrap();
            assert!(pruned.len() <= deliver.len());
            assert_eq!(apply_plan(&packed, &pruned).unwrap(), a);
        }
    }
}

#[test]
fn solve_1d_plan_length() {
    let mut rng = InstanceRng::new(7);
    for _ in 0..300 {
        let n = 2 + rng.below(15) as usize;
        let a = random_geometry(&mut rng, n, 0.5);
        let b = Geometry::from_fn(n, |i, j| a.get(i, (j + i + 1) % n)).unwrap();
        let unpruned = ShuttleOptions { peephole: false, drop_empty: false };
        let plan = solve_1d(&a, &b, Axis::RowWise, unpruned).unwrap();
        assert_eq!(plan.len(), 2 * (n - 1));
        assert_eq!(apply_plan(&a, &plan).unwrap(), b);
        let lean = ShuttleOptions { peephole: true, drop_empty: true };
        let plan = solve_1d(&a, &b, Axis::RowWise, lean).unwrap();
        assert!(plan.ops().iter().all(|op| !op.is_vacuous()));
        assert_eq!(apply_plan(&a, &plan).unwrap(), b);
        // identity task
        let same = solve_1d(&a, &a, Axis::RowWise, ShuttleOptions::default()).unwrap();
        assert_eq!(apply_plan(&a, &same).unwrap(), a);
    }
}

fn brute_realizable(n: usize) -> std::collections::HashSet<(Vec<usize>, Vec<usize>)> {
    (0u32..1 << (n * n))
        .map(|mask| {
            let g = Geometry::from_fn(n, |i, j| mask >> (i * n + j) & 1 == 1).unwrap();
            (g.row_sums(), g.col_sums())
        })
        .collect()
}

fn all_sequences(n: usize) -> Vec<Vec<usize>> {
    (0..(n + 1).pow(n as u32))
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let d = k % (n + 1);
                    k /= n + 1;
                    d
                })
                .collect()
        })
        .collect()
}

#[test]
fn gale_ryser_exhaustive_small() {
    for n in 1..=3 {
        let real = brute_realizable(n);
        let seqs = all_sequences(n);
        for r in &seqs {
            for c in &seqs {
                let spec = DegreeSpec::new(r.clone(), c.clone()).unwrap();
                let expected = real.contains(&(r.clone(), c.clone()));
                assert_eq!(gale_ryser_check(&spec), expected, "R={r:?} C={c:?}");
                if expected {
                    let g = construct_geometry(&spec).unwrap();
                    assert_eq!((&g.row_sums(), &g.col_sums()), (r, c));
                }
            }
        }
    }
}

#[test]
fn construction_reproduces_sampled_sums() {
    let mut rng = InstanceRng::new(8);
    for _ in 0..1_000 {
        let n = 1 + rng.below(20) as usize;
        let g = { let alpha = rng.unit(); random_geometry(&mut rng, n, alpha) };
        let spec = DegreeSpec::of(&g);
        assert!(gale_ryser_check(&spec));
        let built = construct_geometry(&spec).unwrap();
        assert_eq!(built.row_sums(), g.row_sums());
        assert_eq!(built.col_sums(), g.col_sums());
        // permuting C keeps feasibility
        let mut cols = spec.cols().to_vec();
        cols.reverse();
        assert!(gale_ryser_check(&DegreeSpec::new(spec.rows().to_vec(), cols).unwrap()));
    }
}

#[test]
fn balanced_rows_realize_any_columns() {
    let mut rng = InstanceRng::new(9);
    for _ in 0..10_000 {
        let n = 1 + rng.below(16) as usize;
        let a = { let alpha = rng.unit(); random_geometry(&mut rng, n, alpha) };
        let rbal = row_balance(&a);
        assert_eq!(rbal.col_sums(), a.col_sums());
        let sums = rbal.row_sums();
        assert!(sums.iter().max().unwrap() - sums.iter().min().unwrap() <= 1);
        // random column sums with the same total
        let mut cols = vec![0usize; n];
        let mut left = a.atom_count();
        while left > 0 {
            let j = rng.below(n as u64) as usize;
            if cols[j] < n {
                cols[j] += 1;
                left -= 1;
            }
        }
        assert!(gale_ryser_check(&DegreeSpec::new(sums, cols).unwrap()));
    }
}

#[test]
fn column_finalize_fills_first_columns_evenly() {
    let mut rng = InstanceRng::new(10);
    for _ in 0..50 {
        let a = random_geometry(&mut rng, 32, 0.5);
        let side = isqrt(a.atom_count());
        let cfin = grid_column_finalize(&a, side).unwrap();
        assert_eq!(cfin.row_sums(), a.row_sums());
        let sums = cfin.col_sums();
        assert!(sums[..side].iter().all(|&c| c >= side));
        assert!(sums[..side].iter().max().unwrap() - sums[..side].iter().min().unwrap() <= 1);
    }
    let one_row = Geometry::parse_rows(&["1111", "0000", "0000", "0000"]).unwrap();
    assert!(matches!(grid_column_finalize(&one_row, 2), Err(StrategyFailure::InsufficientAtoms { .. })));
}

fn two_step_counterexample() -> (Geometry, Geometry) {
    let a = construct_geometry(&DegreeSpec::new(vec![4, 3, 1, 1], vec![4, 2, 2, 1]).unwrap()).unwrap();
    let t = construct_geometry(&DegreeSpec::new(vec![3, 3, 3, 0], vec![3, 3, 3, 0]).unwrap()).unwrap();
    (a, t)
}

#[test]
fn two_step_counterexample_needs_three_steps() {
    let (a, t) = two_step_counterexample();
    let mut tried = Vec::new();
    assert_eq!(
        plan_two_step(&a, &t, ShuttleOptions::default(), &mut tried).unwrap_err(),
        StrategyFailure::NoFinalizedIntermediate
    );
    let out = plan_three_step(&a, &t, ShuttleOptions::default()).unwrap();
    assert!(out.plan.len() <= 18);
    assert_eq!(apply_plan(&a, &out.plan).unwrap(), t);

    let inst = ProblemInstance::new(a, Goal::Arbitrary(t.clone()), 0.5, 0).unwrap();
    let planned = plan(&inst, &PlanOptions::default()).unwrap();
    assert_eq!(
        planned.report.fallbacks_tried,
        [Strategy::TwoStepCfin, Strategy::TwoStepRfin, Strategy::ThreeStep]
    );
    assert!(inst.accepts(&apply_plan(inst.initial(), &planned.plan).unwrap()));
}

#[test]
fn grid_fallback_and_forced_strategies() {
    // every atom in one row: the first L columns can take only L of them
    let a = Geometry::from_fn(6, |i, _| i == 2).unwrap();
    let inst = ProblemInstance::new(a, Goal::Grid, 0.5, 0).unwrap();
    let planned = plan(&inst, &PlanOptions::default()).unwrap();
    assert_eq!(planned.report.fallbacks_tried, [Strategy::GridFormation, Strategy::ThreeStep]);
    assert_eq!(planned.target, canonical_grid_target(6, 6));
    assert!(inst.accepts(&apply_plan(inst.initial(), &planned.plan).unwrap()));

    let forced = PlanOptions { strategy: StrategyChoice::Grid, ..Default::default() };
    assert!(matches!(plan(&inst, &forced), Err(StrategyFailure::InsufficientAtoms { .. })));

    let three = PlanOptions { strategy: StrategyChoice::ThreeStep, ..Default::default() };
    let g = generate_instance(8, 0.5, 1, ProblemKind::Arbitrary).unwrap();
    let out = plan(&g, &three).unwrap();
    assert_eq!(out.report.fallbacks_tried, [Strategy::ThreeStep]);
    assert!(g.accepts(&apply_plan(g.initial(), &out.plan).unwrap()));
}

#[test]
fn solved_grid_stays_solved() {
    let a = Geometry::from_fn(8, |i, j| i < 3 && j < 3).unwrap();
    let inst = ProblemInstance::new(a, Goal::Grid, 0.5, 0).unwrap();
    let planned = plan(&inst, &PlanOptions::default()).unwrap();
    assert_eq!(planned.report.strategy_used, Strategy::GridFormation);
    assert!(inst.accepts(&apply_plan(inst.initial(), &planned.plan).unwrap()));
}

#[test]
fn end_to_end_pipeline_small() {
    let params = CostParams::default();
    for kind in [ProblemKind::Grid, ProblemKind::Arbitrary] {
        for seed in 0..200 {
            let n = 2 + (seed as usize % 15);
            let inst = generate_instance(n, 0.5, seed, kind).unwrap();
            let planned = plan(&inst, &PlanOptions::default()).unwrap();
            let report = &planned.report;
            assert_eq!(Some(&report.strategy_used), report.fallbacks_tried.last());
            assert!(planned.plan.len() <= 6 * (n - 1));
            let slow = brute_replay(&to_grid(inst.initial()), &planned.plan).unwrap();
            assert_eq!(slow, to_grid(&planned.target));
            assert!(inst.accepts(&planned.target));

            let m = plan_metrics(inst.initial(), &planned.plan, params).unwrap();
            assert_eq!(m.op_count, planned.plan.len());
            let atoms = inst.atom_count() as f64;
            assert_eq!(m.atom_moves as f64, (m.avg_distance_per_atom * atoms).round());
            let lifted = lift_simple_to_general(&planned.plan);
            let simple = cost_simple(&planned.plan, params);
            for model in [CostModel::Linear, CostModel::Sqrt] {
                let general = cost_general(&lifted, params, model, Some(inst.initial())).unwrap();
                assert_eq!(general, simple);
            }
        }
    }
}

#[test]
fn ops_per_atom_grows_with_side() {
    let mean = |n: usize| {
        let total: f64 = (0..20)
            .map(|seed| {
                let inst = generate_instance(n, 0.5, seed, ProblemKind::Grid).unwrap();
                let p = plan(&inst, &PlanOptions::default()).unwrap();
                plan_metrics(inst.initial(), &p.plan, CostParams::default()).unwrap().avg_ops_per_atom
            })
            .sum();
        total / 20.0
    };
    let (a, b, c) = (mean(16), mean(32), mean(64));
    assert!(a < b && b < c, "{a} {b} {c}");
    // roughly doubles with n
    assert!((1.5..2.6).contains(&(c / b)), "{b} -> {c}");
}
