mod common;

use common::{pulse_samples, relative_error, rng};
use grassmann_rom::bicitsgm::{bi_build, bi_query, BiConfig};
use grassmann_rom::ga::{
    crossover_blend, mutate_gaussian, reduced_fitness, run_ga, select_tournament, Fitness, GaConfig, Individual,
};
use grassmann_rom::interp::TangentInterpolator;
use grassmann_rom::toyflow::{generate_snapshots, ToyFamily};
use grassmann_rom::Error;

fn evaluated(genes: &[f64], fitness: f64) -> Individual {
    Individual { genes: genes.to_vec(), fitness: Some(fitness) }
}

/// Arg-max of `f` on a uniform grid with spacing `h`.
fn grid_argmax(f: impl Fn(f64) -> f64, lo: f64, hi: f64, h: f64) -> f64 {
    let n = ((hi - lo) / h).round() as usize;
    (0..=n).map(|i| lo + i as f64 * h).max_by(|a, b| f(*a).total_cmp(&f(*b))).unwrap()
}

#[test]
fn quadratic_optimum_is_found() {
    let f = |g: f64| -(g - 0.5).powi(2);
    let oracle = grid_argmax(f, 0.0, 1.0, 1e-4);
    let mut config = GaConfig::new(vec![(0.0, 1.0)]);
    config.population_size = 40;
    config.generations = 60;
    config.rng_seed = 7;
    let (best, trace) = run_ga(&config, &|g: &[f64]| f(g[0])).unwrap();
    assert!((best.genes[0] - oracle).abs() <= 1e-3, "{}", best.genes[0]);
    assert!(trace.evaluations <= 40 * 60);
}

#[test]
fn sphere_optimum_is_found() {
    let target = [0.3, 0.7];
    let f = |g: &[f64]| -((g[0] - target[0]).powi(2) + (g[1] - target[1]).powi(2));
    let (gx, gy) = (
        grid_argmax(|x| -(x - target[0]).powi(2), 0.0, 1.0, 1e-3),
        grid_argmax(|y| -(y - target[1]).powi(2), 0.0, 1.0, 1e-3),
    );
    let config = GaConfig::new(vec![(0.0, 1.0), (0.0, 1.0)]);
    let (best, _) = run_ga(&config, &f).unwrap();
    let d = ((best.genes[0] - gx).powi(2) + (best.genes[1] - gy).powi(2)).sqrt();
    assert!(d <= 5e-3, "{:?}", best.genes);
}

#[test]
fn constant_fitness_gives_a_flat_trace() {
    let (best, trace) = run_ga(&GaConfig::new(vec![(-1.0, 1.0)]), &|_: &[f64]| 3.0).unwrap();
    assert_eq!(best.fitness, Some(3.0));
    assert!(trace.records.iter().all(|r| r.best_fitness == 3.0));
}

#[test]
fn binary_tournament_frequency() {
    let pop = vec![evaluated(&[0.0], 0.0), evaluated(&[1.0], 1.0)];
    let mut r = rng(61);
    let trials = 100_000;
    let wins = (0..trials).filter(|_| select_tournament(&pop, 2, &mut r).fitness == Some(1.0)).count();
    let freq = wins as f64 / trials as f64;
    assert!((freq - 0.75).abs() <= 0.01, "{freq}");
}

#[test]
fn blend_crossover_is_uniform_on_the_extended_interval() {
    let a = evaluated(&[0.4], 0.0);
    let b = evaluated(&[0.6], 0.0);
    let (alpha, lo, hi) = (0.5, 0.3, 0.7);
    let bounds = [(0.0, 1.0)];
    let mut r = rng(62);
    let mut draws: Vec<f64> = (0..50_000)
        .flat_map(|_| {
            let (c1, c2) = crossover_blend(&a, &b, alpha, &bounds, &mut r);
            [c1.genes[0], c2.genes[0]]
        })
        .collect();
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    // Kolmogorov–Smirnov statistic against U(lo, hi).
    let ks = draws
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = (x - lo) / (hi - lo);
            (cdf - i as f64 / n).abs().max(((i + 1) as f64 / n - cdf).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.01, "KS {ks}");
}

#[test]
fn mutation_frequency_matches_the_rate() {
    let x = evaluated(&[0.5, 0.5, 0.5], 0.0);
    let bounds = [(0.0, 1.0); 3];
    let mut r = rng(63);
    let trials = 100_000;
    let mut moved = 0usize;
    for _ in 0..trials {
        let y = mutate_gaussian(&x, 0.2, 0.05, &bounds, &mut r);
        moved += y.genes.iter().filter(|&&g| g != 0.5).count();
    }
    let freq = moved as f64 / (3 * trials) as f64;
    assert!((freq - 0.2).abs() <= 0.01, "{freq}");
}

#[test]
fn same_seed_same_trace() {
    let f = |g: &[f64]| -(g[0] - 0.2).abs() - (g[1] + 0.4).powi(2);
    let mut config = GaConfig::new(vec![(-1.0, 1.0), (-1.0, 1.0)]);
    config.rng_seed = 99;
    let (b1, t1) = run_ga(&config, &f).unwrap();
    let (b2, t2) = run_ga(&config, &f).unwrap();
    assert_eq!(b1, b2);
    assert_eq!(t1, t2);
    assert_eq!(t1.to_csv(), t2.to_csv());
    config.rng_seed = 100;
    assert_ne!(run_ga(&config, &f).unwrap().1, t1);
}

#[test]
fn elitism_keeps_the_best_and_bounds_hold() {
    let f = |g: &[f64]| (5.0 * g[0]).sin() * (3.0 * g[1]).cos();
    let mut config = GaConfig::new(vec![(-2.0, 1.0), (0.5, 3.0)]);
    config.mutation_rate = 0.5;
    config.mutation_sigma = 0.5;
    config.blend_alpha = 1.0;
    let (_, trace) = run_ga(&config, &f).unwrap();
    assert!(trace.records.windows(2).all(|w| w[1].best_fitness >= w[0].best_fitness));
    for r in &trace.records {
        assert!((-2.0..=1.0).contains(&r.best_genes[0]) && (0.5..=3.0).contains(&r.best_genes[1]));
    }
    // Every evaluated point, not just the leaders, stays in the box.
    let inside = |g: &[f64]| {
        assert!((-2.0..=1.0).contains(&g[0]) && (0.5..=3.0).contains(&g[1]), "{g:?}");
        f(g)
    };
    run_ga(&config, &inside).unwrap();
}

#[test]
fn stagnation_stops_early() {
    let mut config = GaConfig::new(vec![(0.0, 1.0)]);
    config.generations = 200;
    config.stagnation = Some(15);
    let (_, trace) = run_ga(&config, &|_: &[f64]| 1.0).unwrap();
    assert!(trace.stopped_early);
    assert_eq!(trace.records.len(), 16);
}

#[test]
fn nan_fitness_names_the_genes() {
    let f = |g: &[f64]| if g[0] > 0.5 { f64::NAN } else { 0.0 };
    match run_ga(&GaConfig::new(vec![(0.0, 1.0)]), &f) {
        Err(Error::NanFitness { genes }) => assert!(genes[0] > 0.5),
        other => panic!("{other:?}"),
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let mut c = GaConfig::new(vec![(0.0, 1.0)]);
    c.elitism_count = c.population_size;
    assert!(run_ga(&c, &|_: &[f64]| 0.0).is_err());
    let mut c = GaConfig::new(vec![(1.0, 1.0)]);
    c.tournament_size = 3;
    assert!(run_ga(&c, &|_: &[f64]| 0.0).is_err());
    let mut c = GaConfig::new(vec![(0.0, 1.0)]);
    c.tournament_size = 1;
    assert!(run_ga(&c, &|_: &[f64]| 0.0).is_err());
}

fn pulse_model() -> (ToyFamily, grassmann_rom::bicitsgm::BiRomModel) {
    let family = ToyFamily::pulse(256, 64, 0.2).unwrap();
    let samples = pulse_samples(&family, &[0.2, 0.35, 0.5, 0.65, 0.8], 8);
    (family, bi_build(samples, BiConfig::default()).unwrap())
}

#[test]
fn reduced_misfit_equals_the_full_field_misfit() {
    let (family, model) = pulse_model();
    let target = generate_snapshots(&family, 0.57).unwrap();
    let fit = reduced_fitness(&model, &target, TangentInterpolator::Lagrange).unwrap();
    for g in [0.25, 0.41, 0.6, 0.77] {
        let rec = bi_query(&model, &[g], &TangentInterpolator::Lagrange).unwrap();
        let full = relative_error(&rec.field, &target).powi(2);
        assert!((fit.misfit(&[g]).unwrap() - full).abs() <= 1e-10, "{g}");
    }
}

#[test]
fn perfect_match_has_zero_misfit() {
    let (_, model) = pulse_model();
    let target = bi_query(&model, &[0.47], &TangentInterpolator::Lagrange).unwrap().field;
    let fit = reduced_fitness(&model, &target, TangentInterpolator::Lagrange).unwrap();
    assert!(fit.evaluate(&[0.47]).abs() <= 1e-12);
    assert!(fit.evaluate(&[0.3]) < -1e-4);
}

#[test]
fn reduced_ga_recovers_a_trained_parameter() {
    let (_, model) = pulse_model();
    let target = model.samples().triples()[3].field();
    let fit = reduced_fitness(&model, &target, TangentInterpolator::Lagrange).unwrap();
    let mut config = GaConfig::new(vec![(0.2, 0.8)]);
    config.population_size = 30;
    config.generations = 40;
    let (best, _) = run_ga(&config, &fit).unwrap();
    assert!((best.genes[0] - 0.65).abs() <= 0.01 * 0.6, "{}", best.genes[0]);
}

#[test]
fn reduced_ga_recovers_an_untrained_parameter() {
    let (family, model) = pulse_model();
    let target = generate_snapshots(&family, 0.6).unwrap();
    let fit = reduced_fitness(&model, &target, TangentInterpolator::Lagrange).unwrap();
    let (lo, hi) = family.gamma_range();
    let mut config = GaConfig::new(vec![(lo, hi)]);
    config.population_size = 30;
    config.generations = 40;
    let (best, trace) = run_ga(&config, &fit).unwrap();
    assert!((best.genes[0] - 0.6).abs() <= 0.02 * (hi - lo), "{}", best.genes[0]);
    // Bounds wider than the samples: some individuals were extrapolated.
    assert!(trace.records.iter().any(|r| r.extrapolated > 0));
}

#[test]
fn reduced_fitness_checks_the_target() {
    let (_, model) = pulse_model();
    let wrong = grassmann_rom::linalg::Matrix::zeros(3, 3);
    assert!(reduced_fitness(&model, &wrong, TangentInterpolator::Lagrange).is_err());
    let zero = grassmann_rom::linalg::Matrix::zeros(256, 64);
    assert!(reduced_fitness(&model, &zero, TangentInterpolator::Lagrange).is_err());
}
