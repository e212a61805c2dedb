//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use grassmann_rom::bicitsgm::{
    bi_build, bi_query, bi_query_from_scratch, online_cost_report, procrustes_align, BiConfig,
};
use grassmann_rom::ga::{reduced_fitness, run_ga, GaConfig};
use grassmann_rom::grassmann::{exp_map, geodesic_distance, log_map, principal_angles, OrthonormalBasis};
use grassmann_rom::interp::{RbfKernel, TangentInterpolator};
use grassmann_rom::itsgm::{itsgm_interpolate, RefPolicy, SampleSet, SvdTriple};
use grassmann_rom::linalg::{qr_orthonormalize, thin_svd, Matrix};
use grassmann_rom::pod::{compute_pod, TruncationRule};
use grassmann_rom::toyflow::{exact_subspace, generate_snapshots, ToyFamily};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rows: usize, cols: usize, r: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(r))
}

fn random_orthogonal(q: usize, r: &mut ChaCha8Rng) -> Matrix {
    qr_orthonormalize(&gaussian(q, q, r)).unwrap()
}

fn random_basis(n: usize, q: usize, r: &mut ChaCha8Rng) -> OrthonormalBasis {
    OrthonormalBasis::new(qr_orthonormalize(&gaussian(n, q, r)).unwrap()).unwrap()
}

/// Span of `x cos θ + h sin θ` for a random horizontal direction `h`, with
/// principal angles drawn below `max_angle`.
fn nearby_basis(x: &OrthonormalBasis, max_angle: f64, r: &mut ChaCha8Rng) -> OrthonormalBasis {
    let (n, q) = x.shape();
    let phi = x.matrix();
    let g = gaussian(n, q, r);
    let h = &g - &phi.matmul(&phi.tr_matmul(&g));
    let svd = thin_svd(&h).unwrap();
    let angles: Vec<f64> = (0..q).map(|_| r.random_range(0.0..max_angle)).collect();
    let cos: Vec<f64> = angles.iter().map(|a| a.cos()).collect();
    let sin: Vec<f64> = angles.iter().map(|a| a.sin()).collect();
    let mut y = phi.matmul(&svd.v.scale_columns(&cos));
    y.add_scaled(1.0, &svd.u.scale_columns(&sin));
    OrthonormalBasis::new(qr_orthonormalize(&y).unwrap()).unwrap()
}

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn relative_error(a: &Matrix, truth: &Matrix) -> f64 {
    (a - truth).frobenius_norm() / truth.frobenius_norm()
}

fn pulse_samples(family: &ToyFamily, gammas: &[f64], q: usize) -> SampleSet {
    let triples = gammas
        .iter()
        .map(|&g| {
            let pod = compute_pod(&generate_snapshots(family, g).unwrap(), TruncationRule::Rank(q)).unwrap();
            SvdTriple::new(pod.modes, pod.singular_values, OrthonormalBasis::new(pod.temporal).unwrap()).unwrap()
        })
        .collect();
    SampleSet::new(gammas.iter().map(|&g| vec![g]).collect(), triples).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: f64, detail: String) -> Outcome {
    let s = elapsed.as_secs_f64();
    if s < limit {
        Ok(detail)
    } else {
        Err(format!("{detail}, took {s:.2} s > {limit} s"))
    }
}

fn geometry_roundtrip() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let x = random_basis(100, 5, &mut r);
        let y = nearby_basis(&x, 0.99 * std::f64::consts::FRAC_PI_3, &mut r);
        let widest = principal_angles(&x, &y).map_err(|e| e.to_string())?.max();
        if widest >= std::f64::consts::FRAC_PI_3 {
            return Err(format!("generated pair has angle {widest}"));
        }
        let v = log_map(&x, &y).map_err(|e| e.to_string())?;
        let back = exp_map(&x, &v).map_err(|e| e.to_string())?;
        worst = worst.max(geodesic_distance(&back, &y).map_err(|e| e.to_string())?);
    }
    check(worst <= 1e-9, format!("max distance {worst:.2e}")).and_then(|d| within(start.elapsed(), 5.0, d))
}

fn distance_invariance() -> Outcome {
    let mut r = rng(2);
    let x = random_basis(40, 4, &mut r);
    let y = nearby_basis(&x, 1.2, &mut r);
    let d = geodesic_distance(&x, &y).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let xq = x.rotated(&random_orthogonal(4, &mut r)).map_err(|e| e.to_string())?;
        let yq = y.rotated(&random_orthogonal(4, &mut r)).map_err(|e| e.to_string())?;
        worst = worst.max((geodesic_distance(&xq, &yq).map_err(|e| e.to_string())? - d).abs());
    }
    check(worst <= 1e-10, format!("max deviation {worst:.2e}"))
}

fn svd_oracle() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (m, n) = (r.random_range(1..=8), r.random_range(1..=8));
        let a = gaussian(m, n, &mut r);
        let svd = thin_svd(&a).map_err(|e| e.to_string())?;
        let ata = to_na(&a).transpose() * to_na(&a);
        let mut oracle: Vec<f64> = SymmetricEigen::new(ata).eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        let scale = oracle[0];
        for (s, o) in svd.sigma.iter().zip(&oracle) {
            worst = worst.max((s - o).abs() / scale);
        }
    }
    check(worst <= 1e-8, format!("max relative deviation {worst:.2e}"))
}

fn pod_optimality() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for q in [1, 3, 5, 10, 15] {
        let s = gaussian(50, 20, &mut r);
        let pod = compute_pod(&s, TruncationRule::Rank(q)).map_err(|e| e.to_string())?;
        let mut oracle: Vec<f64> = to_na(&s).singular_values().iter().copied().collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        let tail: f64 = oracle[q..].iter().map(|x| x * x).sum();
        let residual = (&s - &pod.reconstruct()).frobenius_norm().powi(2);
        worst = worst.max((residual - tail).abs() / tail);
    }
    check(worst <= 1e-8, format!("max relative deviation {worst:.2e}"))
}

fn sample_exactness() -> Outcome {
    let mut r = rng(5);
    let params = [0.0, 0.3, 0.55, 0.8, 1.0];
    let center = random_basis(60, 4, &mut r);
    let bases = params.iter().map(|_| nearby_basis(&center, 0.5, &mut r)).collect();
    let samples = SampleSet::from_scalar_bases(&params, bases).map_err(|e| e.to_string())?;
    let methods = [
        TangentInterpolator::Lagrange,
        TangentInterpolator::rbf(RbfKernel::Gaussian),
        TangentInterpolator::rbf(RbfKernel::ThinPlate),
        TangentInterpolator::Idw { power: 2.0 },
    ];
    let mut worst = 0.0f64;
    for method in &methods {
        for reference in 0..params.len() {
            for (j, g) in params.iter().enumerate() {
                let y = itsgm_interpolate(&samples, &[*g], RefPolicy::Fixed(reference), method)
                    .map_err(|e| e.to_string())?;
                worst = worst.max(geodesic_distance(&y, &samples.triples()[j].spatial).map_err(|e| e.to_string())?);
            }
        }
    }
    check(worst <= 1e-8, format!("max distance {worst:.2e} over {} methods", methods.len()))
}

fn geodesic_family() -> Outcome {
    let family = ToyFamily::rotating(30, 3).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for params in [vec![-0.6, 0.6], vec![-0.6, -0.2, 0.3, 0.7]] {
        let bases = params.iter().map(|&g| exact_subspace(&family, g).unwrap()).collect();
        let samples = SampleSet::from_scalar_bases(&params, bases).map_err(|e| e.to_string())?;
        for w in params.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let y = itsgm_interpolate(&samples, &[mid], RefPolicy::Nearest, &TangentInterpolator::Lagrange)
                .map_err(|e| e.to_string())?;
            let truth = exact_subspace(&family, mid).map_err(|e| e.to_string())?;
            worst = worst.max(geodesic_distance(&y, &truth).map_err(|e| e.to_string())?);
        }
    }
    check(worst <= 1e-8, format!("max midpoint distance {worst:.2e}"))
}

fn pulse_reconstruction() -> Outcome {
    let start = Instant::now();
    let family = ToyFamily::pulse(512, 128, 0.2).map_err(|e| e.to_string())?;
    let model = bi_build(pulse_samples(&family, &[0.2, 0.35, 0.5, 0.65, 0.8], 8), BiConfig::default())
        .map_err(|e| e.to_string())?;
    let rec = bi_query(&model, &[0.425], &TangentInterpolator::Lagrange).map_err(|e| e.to_string())?;
    let truth = generate_snapshots(&family, 0.425).map_err(|e| e.to_string())?;
    let err = relative_error(&rec.field, &truth);
    check(err <= 5e-2, format!("relative field error {err:.3e} at 0.425"))
        .and_then(|d| within(start.elapsed(), 10.0, d))
}

fn hyper_split() -> Outcome {
    let family = ToyFamily::pulse(2000, 200, 0.2).map_err(|e| e.to_string())?;
    let model = bi_build(pulse_samples(&family, &[0.2, 0.35, 0.5, 0.65, 0.8], 10), BiConfig::default())
        .map_err(|e| e.to_string())?;
    let method = TangentInterpolator::Lagrange;
    let fixed = BiConfig { reference: RefPolicy::Fixed(model.ref_index()), ..*model.config() };
    let mut worst = 0.0f64;
    for g in [0.27, 0.425, 0.6, 0.74] {
        let online = bi_query(&model, &[g], &method).map_err(|e| e.to_string())?;
        let scratch = bi_query_from_scratch(model.samples(), &[g], &method, &fixed).map_err(|e| e.to_string())?;
        worst = worst.max(relative_error(&online.field, &scratch.field));
    }
    let mut speedups: Vec<f64> = (0..3)
        .map(|_| online_cost_report(&model, 8, &method).map(|c| c.speedup))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    speedups.sort_by(f64::total_cmp);
    let speedup = speedups[1];
    check(speedup >= 5.0 && worst <= 1e-12, format!("median speedup {speedup:.2}x, online vs scratch {worst:.2e}"))
}

fn procrustes_optimality() -> Outcome {
    let mut r = rng(9);
    let mut worst = f64::NEG_INFINITY;
    for instance in 0..20 {
        let q = 1 + instance % 4;
        let moving = random_basis(12, q, &mut r);
        let target = random_basis(12, q, &mut r);
        let rot = procrustes_align(&moving, &target).map_err(|e| e.to_string())?;
        let objective = (&moving.matrix().matmul(&rot) - target.matrix()).frobenius_norm();
        let brute = (0..10_000)
            .map(|_| (&moving.matrix().matmul(&random_orthogonal(q, &mut r)) - target.matrix()).frobenius_norm())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(objective - brute);
    }
    check(worst <= 1e-9, format!("largest margin of search over solver {worst:.2e}"))
}

fn canonical_ga() -> Outcome {
    let start = Instant::now();
    let f = |g: f64| -(g - 0.5).powi(2);
    let oracle = (0..=10_000).map(|i| i as f64 * 1e-4).max_by(|a, b| f(*a).total_cmp(&f(*b))).unwrap();
    let mut config = GaConfig::new(vec![(0.0, 1.0)]);
    config.population_size = 40;
    config.generations = 60;
    config.rng_seed = 7;
    let (best, _) = run_ga(&config, &|g: &[f64]| f(g[0])).map_err(|e| e.to_string())?;
    let miss = (best.genes[0] - oracle).abs();
    check(miss <= 1e-3, format!("best {:.6}, grid oracle {oracle:.4}", best.genes[0]))
        .and_then(|d| within(start.elapsed(), 2.0, d))
}

fn reduced_ga() -> Outcome {
    let start = Instant::now();
    let family = ToyFamily::pulse(512, 128, 0.2).map_err(|e| e.to_string())?;
    let model = bi_build(pulse_samples(&family, &[0.2, 0.35, 0.5, 0.65, 0.8], 8), BiConfig::default())
        .map_err(|e| e.to_string())?;
    let target = generate_snapshots(&family, 0.6).map_err(|e| e.to_string())?;
    let fitness = reduced_fitness(&model, &target, TangentInterpolator::Lagrange).map_err(|e| e.to_string())?;
    let (lo, hi) = family.gamma_range();
    let mut config = GaConfig::new(vec![(lo, hi)]);
    config.population_size = 30;
    config.generations = 40;
    config.rng_seed = 7;
    let (best, _) = run_ga(&config, &fitness).map_err(|e| e.to_string())?;
    let miss = (best.genes[0] - 0.6).abs() / (hi - lo);
    check(miss <= 0.02, format!("best {:.4} for 0.6, {:.2}% of range", best.genes[0], 100.0 * miss))
        .and_then(|d| within(start.elapsed(), 10.0, d))
}

fn grom(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out =
        Command::new(env!("CARGO_BIN_EXE_grom")).args(args).current_dir(dir).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("grom {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr).trim()))
    }
}

/// Contents of every file under `dir` except wall-clock timings.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().is_some_and(|n| n != "bench_timing.txt") {
                let key = path.strip_prefix(dir).unwrap().display().to_string();
                files.insert(key, fs::read(&path).unwrap());
            }
        }
    }
    files
}

fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    fs::write(
        dir.join("small.conf"),
        "[family]\nkind = pulse\ngrid_points = 160\ntimesteps = 40\n\n[samples]\ngammas = 0.2, 0.35, 0.5, 0.65, 0.8\n\n\
         [pod]\nrule = rank:6\n\n[ga]\npopulation_size = 16\ngenerations = 10\ntarget_gamma = 0.55\n\n[bench]\nqueries = 2\n",
    )
    .map_err(|e| e.to_string())?;
    let runs: [&[&str]; 7] = [
        &["--out", "gen", "gen"],
        &["--out", "pod", "pod", "gen/snap_002.bin", "--rule", "energy:0.999"],
        &["--out", "interp", "interp", "gen/manifest.txt", "--gamma", "0.42"],
        &["--out", "bi", "interp", "gen/manifest.txt", "--gamma", "0.42", "--bi"],
        &["--out", "ga", "--seed", "11", "ga"],
        &["--out", "bench", "bench"],
        &["--out", "rot", "gen", "--family", "rotating", "--gammas", "-0.5,0,0.5"],
    ];
    let run_all = || -> Result<BTreeMap<String, Vec<u8>>, String> {
        for args in runs {
            let mut full = vec!["--config", "small.conf"];
            full.extend_from_slice(args);
            grom(dir, &full)?;
        }
        Ok(snapshot(dir))
    };
    let first = run_all()?;
    let second = run_all()?;
    let differing: Vec<&String> = first.keys().filter(|k| first.get(*k) != second.get(*k)).collect();
    check(
        differing.is_empty() && first.len() == second.len(),
        format!("{} files compared, differing: {differing:?}", first.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("geometry roundtrip", geometry_roundtrip),
        ("distance invariance", distance_invariance),
        ("svd oracle equivalence", svd_oracle),
        ("pod optimality", pod_optimality),
        ("sample exactness", sample_exactness),
        ("geodesic family exactness", geodesic_family),
        ("bi-calibrated reconstruction", pulse_reconstruction),
        ("offline/online split", hyper_split),
        ("procrustes optimality", procrustes_optimality),
        ("canonical ga", canonical_ga),
        ("reduced ga inverse problem", reduced_ga),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail} ({secs:.2} s)", i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
