use proptest::prelude::*;
use sketchls::generators::{gen_gaussian_input, gen_illcond_input, gen_rhs, IllCondSpectrum, RhsRecipe};
use sketchls::sketch::make_sketch;
use sketchls::solver::{relative_residual, sketch_and_solve, solve_exact};
use sketchls::{rng, DenseMatrix, LlspProblem, SketchKind, SketchOperator, Vector};

fn gaussian_problem(m: usize, d: usize, seed: u64) -> LlspProblem {
    let a = gen_gaussian_input(m, d, seed).unwrap();
    let b = gen_rhs(&a, &RhsRecipe::default(), seed ^ 0x5eed).unwrap();
    LlspProblem::new(a, b).unwrap()
}

fn illcond_problem(m: usize, d: usize, seed: u64) -> LlspProblem {
    let a = gen_illcond_input(m, d, &IllCondSpectrum::standard(d), seed).unwrap();
    let b = gen_rhs(&a, &RhsRecipe::default(), seed ^ 0x5eed).unwrap();
    LlspProblem::new(a, b).unwrap()
}

fn rel(p: &LlspProblem, kind: SketchKind, h: usize, seed: u64) -> f64 {
    let exact = solve_exact(p).unwrap();
    let op = make_sketch(kind, p.d() * h, p.m(), seed).unwrap();
    sketch_and_solve(p, &op, Some(&exact))
        .unwrap()
        .relative_residual
        .unwrap()
}

#[test]
fn no_sketch_beats_the_exact_solution() {
    for (i, p) in [gaussian_problem(512, 8, 1), illcond_problem(512, 8, 2)]
        .iter()
        .enumerate()
    {
        for kind in SketchKind::ALL {
            for h in 2..=6 {
                for seed in 0..5 {
                    let r = rel(p, kind, h, seed);
                    assert!(r >= 1.0 - 1e-9, "instance {i} {kind} h={h} seed={seed}: {r}");
                }
            }
        }
    }
}

#[test]
fn identity_sketch_matches_exact_solve() {
    for k in 0..100u64 {
        let p = gaussian_problem(256, 8, 1000 + k);
        let exact = solve_exact(&p).unwrap();
        let op = SketchOperator::perm_submatrix((0..256).collect(), 256).unwrap();
        let sol = sketch_and_solve(&p, &op, Some(&exact)).unwrap();
        let diff = sol.x.sub(&exact.x).unwrap().norm();
        assert!(diff <= 1e-10 * exact.x.norm(), "problem {k}: {diff}");
        assert!((sol.relative_residual.unwrap() - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn relative_residual_is_invariant_to_problem_scaling() {
    let p = gaussian_problem(400, 6, 7);
    for kind in SketchKind::ALL {
        let base = rel(&p, kind, 4, 11);
        for alpha in [0.1, 1.0, 7.3, 10.0] {
            let q = LlspProblem::new(p.a().scaled(alpha), p.b().scaled(alpha)).unwrap();
            let r = rel(&q, kind, 4, 11);
            assert!(
                (r - base).abs() <= 1e-9 * base,
                "{kind} alpha={alpha}: {r} vs {base}"
            );
        }
    }
}

#[test]
fn relative_residual_is_invariant_to_sketch_scaling() {
    let p = gaussian_problem(400, 6, 8);
    let exact = solve_exact(&p).unwrap();
    for kind in SketchKind::ALL {
        let op = make_sketch(kind, 24, 400, 3).unwrap();
        let base = sketch_and_solve(&p, &op, Some(&exact))
            .unwrap()
            .relative_residual
            .unwrap();
        for a in [0.1, 10.0] {
            let scaled = op.clone().with_scale(a).unwrap();
            let r = sketch_and_solve(&p, &scaled, Some(&exact))
                .unwrap()
                .relative_residual
                .unwrap();
            assert!((r - base).abs() <= 1e-9 * base, "{kind} a={a}: {r} vs {base}");
        }
    }
}

fn mean_rel(p: &LlspProblem, kind: SketchKind, h: usize, seeds: u64) -> f64 {
    (0..seeds).map(|s| rel(p, kind, h, s)).sum::<f64>() / seeds as f64
}

#[test]
fn larger_sketches_do_not_hurt_on_average() {
    let p = gaussian_problem(1024, 16, 21);
    for kind in SketchKind::ALL {
        let (m2, m6) = (mean_rel(&p, kind, 2, 20), mean_rel(&p, kind, 6, 20));
        assert!(m6 <= m2 + 0.02, "{kind}: h=6 mean {m6} vs h=2 mean {m2}");
    }
}

#[test]
fn conditioning_does_not_move_the_mean() {
    let (g, ill) = (gaussian_problem(1024, 16, 31), illcond_problem(1024, 16, 32));
    for kind in SketchKind::ALL {
        for h in [2, 6] {
            let (a, b) = (mean_rel(&g, kind, h, 20), mean_rel(&ill, kind, h, 20));
            assert!((a - b).abs() <= 0.1, "{kind} h={h}: gaussian {a} illcond {b}");
        }
    }
}

#[test]
fn perm_submatrix_at_h6_is_near_optimal() {
    let p = gaussian_problem(1024, 16, 41);
    let m = mean_rel(&p, SketchKind::PermSubmatrix, 6, 20);
    assert!((1.0..=1.3).contains(&m), "mean {m}");
}

#[test]
fn gaussian_sketch_at_h4_is_bounded() {
    let p = gaussian_problem(1024, 16, 51);
    for seed in 0..10 {
        let r = rel(&p, SketchKind::Gaussian, 4, seed);
        assert!((1.0..=1.5).contains(&r), "seed {seed}: {r}");
    }
}

#[test]
fn consistent_system_reports_unit_ratio() {
    let a = gen_gaussian_input(200, 4, 3).unwrap();
    let w = Vector::new(vec![1.0, -2.0, 0.5, 3.0]).unwrap();
    let b = a.mul_vec(&w).unwrap();
    let p = LlspProblem::new(a, b).unwrap();
    let exact = solve_exact(&p).unwrap();
    for kind in SketchKind::ALL {
        let op = make_sketch(kind, 16, 200, 2).unwrap();
        let sol = sketch_and_solve(&p, &op, Some(&exact)).unwrap();
        assert_eq!(sol.relative_residual, Some(1.0), "{kind}");
        assert_eq!(relative_residual(&p, &sol.x, &exact).unwrap(), 1.0);
    }
}

#[test]
fn sketched_solution_residual_matches_definition() {
    let p = gaussian_problem(300, 5, 61);
    let exact = solve_exact(&p).unwrap();
    let op = make_sketch(SketchKind::Asph, 15, 300, 4).unwrap();
    let sol = sketch_and_solve(&p, &op, Some(&exact)).unwrap();
    let direct = p.a().mul_vec(&sol.x).unwrap().sub(p.b()).unwrap().norm();
    assert!((sol.residual - direct).abs() <= 1e-14 * direct.max(1.0));
    let meta = sol.sketch.unwrap();
    assert_eq!((meta.kind, meta.s, meta.seed), (SketchKind::Asph, 15, 4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn optimality_holds_for_random_shapes(
        d in 1usize..6,
        extra in 8usize..80,
        h in 2usize..5,
        kind_idx in 0usize..4,
        seed in any::<u64>(),
    ) {
        let m = d * h + extra;
        let mut r = rng::stream(seed);
        let a = DenseMatrix::new(m, d, rng::gaussian_vec(&mut r, m * d)).unwrap();
        let b = Vector::new(rng::gaussian_vec(&mut r, m)).unwrap();
        let p = LlspProblem::new(a, b).unwrap();
        let exact = solve_exact(&p).unwrap();
        let kind = SketchKind::ALL[kind_idx];
        let op = make_sketch(kind, d * h, m, seed).unwrap();
        if let Ok(sol) = sketch_and_solve(&p, &op, Some(&exact)) {
            prop_assert!(sol.relative_residual.unwrap() >= 1.0 - 1e-9);
        }
    }
}
