use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use grassmann_rom::bicitsgm::{bi_build, bi_query, online_cost_report};
use grassmann_rom::ga::{reduced_fitness, run_ga};
use grassmann_rom::grassmann::{geodesic_distance, OrthonormalBasis};
use grassmann_rom::io::{read_matrix, write_matrix};
use grassmann_rom::itsgm::{itsgm_offline, itsgm_online, SampleSet, SvdTriple};
use grassmann_rom::linalg::Matrix;
use grassmann_rom::manifest::{format_manifest, load_samples, ManifestEntry, SampleSource};
use grassmann_rom::pod::{compute_pod, compute_pod_with, TruncationRule};
use grassmann_rom::toyflow::generate_snapshots;

use crate::config::{format_list, RunConfig};
use crate::error::{CliError, CliResult};

pub const CONFIG_ECHO: &str = "grom-config.txt";

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn prepare_out(cfg: &RunConfig) -> CliResult<()> {
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))
}

/// Writes the resolved configuration, headed by the command that used it.
fn echo_config(cfg: &RunConfig, command: &str) -> CliResult<()> {
    let text = format!("# grom {command}\n{}", cfg.to_text());
    write_text(&cfg.out.join(CONFIG_ECHO), &text)
}

/// Samples from the configured manifest, or POD of the configured family at
/// the configured parameters.
fn samples_from_config(cfg: &RunConfig) -> CliResult<SampleSet> {
    if let Some(m) = &cfg.samples.manifest {
        return Ok(load_samples(m, &cfg.pod)?);
    }
    let family = cfg.family.build()?;
    let triples = cfg
        .samples
        .gammas
        .iter()
        .map(|&g| {
            let pod = compute_pod_with(&generate_snapshots(&family, g)?, &cfg.pod)?;
            SvdTriple::new(pod.modes, pod.singular_values, OrthonormalBasis::new(pod.temporal)?)
        })
        .collect::<grassmann_rom::Result<Vec<_>>>()?;
    Ok(SampleSet::new(cfg.samples.gammas.iter().map(|&g| vec![g]).collect(), triples)?)
}

pub fn gen(cfg: &RunConfig) -> CliResult<()> {
    if cfg.samples.gammas.is_empty() {
        return Err(CliError::Usage("gen needs at least one parameter value".into()));
    }
    let family = cfg.family.build()?;
    prepare_out(cfg)?;
    let mut entries = Vec::new();
    for (i, &g) in cfg.samples.gammas.iter().enumerate() {
        let path = cfg.out.join(format!("snap_{i:03}.bin"));
        write_matrix(&path, &generate_snapshots(&family, g)?)?;
        entries.push(ManifestEntry { params: vec![g], source: SampleSource::Snapshots(path) });
    }
    write_text(&cfg.out.join("manifest.txt"), &format_manifest(&entries, &cfg.out))?;
    echo_config(cfg, "gen")?;
    println!("wrote {} snapshot matrices to {}", entries.len(), cfg.out.display());
    Ok(())
}

pub fn pod(cfg: &RunConfig, input: &Path, prefix: Option<&str>) -> CliResult<()> {
    let snapshots = read_matrix(input)?;
    let result = compute_pod_with(&snapshots, &cfg.pod)?;
    prepare_out(cfg)?;
    let stem = match prefix {
        Some(p) => p.to_owned(),
        None => input.file_stem().map_or_else(|| "pod".to_owned(), |s| s.to_string_lossy().into_owned()),
    };
    let out = |suffix: &str| cfg.out.join(format!("{stem}.{suffix}"));
    write_matrix(out("modes"), result.modes.matrix())?;
    write_matrix(out("sv"), &Matrix::from_row_major(result.rank(), 1, result.singular_values.clone())?)?;
    write_matrix(out("temporal"), &result.temporal)?;
    echo_config(cfg, &format!("pod {}", input.display()))?;
    if result.rank() < result.requested_rank {
        log::warn!("pod: requested {} modes, {} are above the null threshold", result.requested_rank, result.rank());
    }
    println!("rank {} energy {}", result.rank(), result.energy_fraction);
    Ok(())
}

pub struct InterpArgs<'a> {
    pub manifest: &'a Path,
    pub gamma: &'a [f64],
    pub bi: bool,
    pub truth: Option<&'a Path>,
}

/// Truth basis from a file holding either an orthonormal basis or
/// snapshots, whose leading `q` left singular vectors are used.
fn truth_basis(m: Matrix, q: usize) -> CliResult<OrthonormalBasis> {
    if m.cols() == q {
        if let Ok(b) = OrthonormalBasis::new(m.clone()) {
            return Ok(b);
        }
    }
    Ok(compute_pod(&m, TruncationRule::Rank(q))?.modes)
}

pub fn interp(cfg: &RunConfig, args: &InterpArgs) -> CliResult<()> {
    let samples = load_samples(args.manifest, &cfg.pod)?;
    let method = &cfg.interpolator.method;
    let gamma = args.gamma;
    prepare_out(cfg)?;
    let mut report = format!("gamma {}", format_list(gamma));

    let seconds = if args.bi {
        let model = bi_build(samples, cfg.interpolator.bi)?;
        let start = Instant::now();
        let rec = bi_query(&model, gamma, method)?;
        let seconds = start.elapsed().as_secs_f64();
        write_matrix(cfg.out.join("field.bin"), &rec.field)?;
        if rec.extrapolated {
            report.push_str(" extrapolated");
        }
        if let Some(t) = args.truth {
            let truth = read_matrix(t)?;
            if truth.shape() != rec.field.shape() {
                return Err(CliError::Usage(format!(
                    "truth field {} is {:?}, reconstruction is {:?}",
                    t.display(),
                    truth.shape(),
                    rec.field.shape()
                )));
            }
            let err = (&rec.field - &truth).frobenius_norm() / truth.frobenius_norm();
            let _ = write!(report, " field_error {err:e}");
        }
        seconds
    } else {
        let r = cfg.interpolator.bi.reference.resolve(&samples, gamma)?;
        let cache = itsgm_offline(&samples, r)?;
        let start = Instant::now();
        let basis = itsgm_online(&cache, &samples, gamma, method)?;
        let seconds = start.elapsed().as_secs_f64();
        write_matrix(cfg.out.join("basis.bin"), basis.matrix())?;
        let _ = write!(report, " reference {r}");
        if let Some(t) = args.truth {
            let truth = truth_basis(read_matrix(t)?, samples.rank())?;
            let _ = write!(report, " geodesic_distance {:e}", geodesic_distance(&basis, &truth)?);
        }
        seconds
    };
    write_text(&cfg.out.join("interp.txt"), &format!("{report}\n"))?;
    let mode = if args.bi { " --bi" } else { "" };
    echo_config(cfg, &format!("interp {} --gamma {}{mode}", args.manifest.display(), format_list(gamma)))?;
    println!("{report} online_seconds {seconds:.3e}");
    Ok(())
}

fn ga_target(cfg: &RunConfig) -> CliResult<Matrix> {
    match (&cfg.ga.target, cfg.ga.target_gamma) {
        (Some(path), _) => Ok(read_matrix(path)?),
        (None, Some(g)) => Ok(generate_snapshots(&cfg.family.build()?, g)?),
        (None, None) => Err(CliError::Usage("ga needs a target field: set [ga] target or target_gamma".into())),
    }
}

pub fn ga(cfg: &RunConfig) -> CliResult<()> {
    let start = Instant::now();
    let samples = samples_from_config(cfg)?;
    let target = ga_target(cfg)?;
    let model = bi_build(samples, cfg.interpolator.bi)?;
    let fitness = reduced_fitness(&model, &target, cfg.interpolator.method)?;

    let mut params = cfg.ga.params.clone();
    params.bounds = if cfg.ga.bounds.is_empty() {
        vec![cfg.family.build()?.gamma_range(); model.samples().param_dim()]
    } else {
        cfg.ga.bounds.clone()
    };
    let (best, trace) = run_ga(&params, &fitness)?;
    let seconds = start.elapsed().as_secs_f64();

    prepare_out(cfg)?;
    write_text(&cfg.out.join("ga_trace.csv"), &trace.to_csv())?;
    let mut summary = String::new();
    let _ = writeln!(summary, "genes = {}", format_list(&best.genes));
    let _ = writeln!(summary, "fitness = {}", best.fitness.unwrap_or(f64::NAN));
    let _ = writeln!(summary, "evaluations = {}", trace.evaluations);
    let _ = writeln!(summary, "generations = {}", trace.records.len());
    let _ = writeln!(summary, "stopped_early = {}", trace.stopped_early);
    write_text(&cfg.out.join("ga_best.txt"), &summary)?;
    echo_config(cfg, "ga")?;
    println!(
        "best {} fitness {:e} ({} evaluations, {seconds:.2} s)",
        format_list(&best.genes),
        best.fitness.unwrap_or(f64::NAN),
        trace.evaluations
    );
    Ok(())
}

pub fn bench(cfg: &RunConfig) -> CliResult<()> {
    let samples = samples_from_config(cfg)?;
    let (n, nt, q, np) = (samples.spatial_dim(), samples.temporal_dim(), samples.rank(), samples.len());
    let model = bi_build(samples, cfg.interpolator.bi)?;
    let report = online_cost_report(&model, cfg.bench_queries, &cfg.interpolator.method)?;

    prepare_out(cfg)?;
    let (fu, fv) = model.frame_dims();
    let mut counts = String::new();
    let _ = writeln!(counts, "N = {n}\nN_t = {nt}\nq = {q}\nN_p = {np}");
    let _ = writeln!(counts, "frame_dims = {fu}, {fv}");
    let _ = writeln!(counts, "queries = {}", report.queries);
    let _ = writeln!(counts, "online_flops = {}", report.online_flops);
    let _ = writeln!(counts, "scratch_flops = {}", report.scratch_flops);
    let _ = writeln!(counts, "online_max_svd_dim = {}", report.online_max_svd_dim);
    let _ = writeln!(counts, "scratch_max_svd_dim = {}", report.scratch_max_svd_dim);
    write_text(&cfg.out.join("bench_counts.txt"), &counts)?;
    let table = report.table();
    write_text(&cfg.out.join("bench_timing.txt"), &table)?;
    echo_config(cfg, "bench")?;
    print!("N={n} N_t={nt} q={q} N_p={np}\n{table}");
    Ok(())
}
