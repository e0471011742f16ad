//! Command-line harness: bound sweeps, codebook construction, decoding
//! simulations, and concatenated-code experiments, all with reproducible
//! seeds and config echoed into every output file.

mod config;

use clap::{Args, Parser, Subcommand};
use netecc_core::algebra::FieldContext;
use netecc_core::bounds::{sweep_bounds, uniform_grid, BoundParams};
use netecc_core::concat::{gmd_experiment, ConcatCode, ExperimentMode};
use netecc_core::error::Error;
use netecc_core::gvcodes::{
    adversarial_noise, certify_min_distance, gv_construct_coherent, gv_construct_noncoherent,
    linear_gv_construct, AdversarialStrategy, Codebook, Construction, MdDecoder, TransferFamily,
    TransferMember,
};
use netecc_core::network::{
    derive_transfer_matrices, enumerate_noise, randomize_code, spread_pattern, NetworkInstance,
    RepairPolicy, Topology,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;

const VERSION: &str = env!("CARGO_PKG_VERSION");

// Exit codes: 0 success, 2 bad config, 3 cap exceeded, 4 guarantee
// violation, 5 decode failure.
const EXIT_BAD_CONFIG: u8 = 2;
const EXIT_CAP_EXCEEDED: u8 = 3;
const EXIT_GUARANTEE_VIOLATION: u8 = 4;
const EXIT_DECODE_FAILURE: u8 = 5;

#[derive(Parser)]
#[command(
    name = "netecc",
    version,
    about = "end-to-end error correction for networks with worst-case bit flips"
)]
struct Cli {
    /// Optional key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate all rate bounds over a p grid and write a CSV.
    Bounds(BoundsArgs),
    /// Construct a codebook on a topology and certify its distance.
    Construct(ConstructArgs),
    /// Run transmit/decode experiments against a codebook file.
    Simulate(SimulateArgs),
    /// Build a concatenated code and run GMD decoding experiments.
    Concat(ConcatArgs),
}

#[derive(Args, Default)]
pub struct BoundsArgs {
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    e: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Finite block length; omit for the asymptotic variants.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Shorthand for the classical point-to-point channel C=E=m=1.
    #[arg(long, default_value_t = false)]
    classical: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
pub struct ConstructArgs {
    #[arg(long)]
    topology: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// coherent-greedy | noncoherent-greedy | linear
    #[arg(long)]
    construction: Option<String>,
    /// Seed for the construction itself.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed for the random network code on the topology.
    #[arg(long)]
    network_seed: Option<u64>,
    /// Splice in super-source/super-sink when degrees differ from the mincut.
    #[arg(long, default_value_t = false)]
    repair: bool,
    /// Non-coherent: sample this many certified instances instead of
    /// enumerating all transfer matrices.
    #[arg(long)]
    sampling: Option<usize>,
    /// Linear construction: rate margin epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Linear construction: redraw attempts.
    #[arg(long)]
    attempts: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
pub struct SimulateArgs {
    #[arg(long)]
    topology: Option<PathBuf>,
    #[arg(long)]
    codebook: Option<PathBuf>,
    #[arg(long)]
    network_seed: Option<u64>,
    /// exhaustive | random | adversarial
    #[arg(long)]
    noise: Option<String>,
    /// Noise budget; defaults to the unique-decoding radius (d-1)/2.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// concentrated | spread | greedy-confusion
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = false)]
    repair: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
pub struct ConcatArgs {
    #[arg(long)]
    topology: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    /// Inner block width (columns per chunk).
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    n_out: Option<usize>,
    #[arg(long)]
    k_out: Option<usize>,
    /// Inner-code error fraction; sets the inner distance.
    #[arg(long)]
    p_inner: Option<f64>,
    /// Cap on message columns per chunk.
    #[arg(long)]
    w_max: Option<usize>,
    /// natural | randomized | sweep
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Hamming noise budget per trial; defaults to floor((d_out*d_in-1)/2).
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    network_seed: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = false)]
    repair: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds(args) => cmd_bounds(args, cli.config.as_deref()),
        Command::Construct(args) => cmd_construct(args, cli.config.as_deref()),
        Command::Simulate(args) => cmd_simulate(args, cli.config.as_deref()),
        Command::Concat(args) => cmd_concat(args, cli.config.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::CapExceeded(_) => EXIT_CAP_EXCEEDED,
        Error::CertificationFailure(_) => EXIT_GUARANTEE_VIOLATION,
        Error::DecodeFailure(_) | Error::Ambiguous(_, _) | Error::AttemptsExhausted(_) => {
            EXIT_DECODE_FAILURE
        }
        _ => EXIT_BAD_CONFIG,
    }
}

fn write_output(path: Option<&PathBuf>, content: &str) -> netecc_core::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_topology(path: &PathBuf, repair: bool) -> netecc_core::Result<Topology> {
    let text = std::fs::read_to_string(path)?;
    let policy = if repair { RepairPolicy::SuperNodes } else { RepairPolicy::Reject };
    Topology::parse(&text, policy)
}

fn derive_instance(
    topo: &Topology,
    m: usize,
    network_seed: u64,
) -> netecc_core::Result<NetworkInstance> {
    let ctx = FieldContext::new(m as u32)?;
    let code = randomize_code(topo, &ctx, network_seed);
    let mut inst = derive_transfer_matrices(topo, &ctx, &code)?;
    inst.certify_mds()?;
    Ok(inst)
}

fn cmd_bounds(mut args: BoundsArgs, config: Option<&std::path::Path>) -> netecc_core::Result<()> {
    config::merge_bounds(&mut args, config)?;
    if args.classical {
        args.c.get_or_insert(1);
        args.e.get_or_insert(1);
        args.m.get_or_insert(1);
    }
    let c = args.c.ok_or_else(|| Error::BadParams("--c is required".into()))?;
    let e = args.e.ok_or_else(|| Error::BadParams("--e is required".into()))?;
    let m = args.m.ok_or_else(|| Error::BadParams("--m is required".into()))?;
    let p_max = args.p_max.unwrap_or(0.25);
    let steps = args.steps.unwrap_or(100);
    if steps < 2 {
        return Err(Error::BadParams("--steps must be at least 2".into()));
    }
    if !(0.0..0.5).contains(&p_max) {
        return Err(Error::BadParams("--p-max must lie in [0, 0.5)".into()));
    }
    let base = BoundParams::new(c, e, m, args.n, 0.0)?;
    let grid = uniform_grid(p_max, steps);
    let curve = sweep_bounds(&base, &grid)?;
    let mut out = String::new();
    out.push_str(&format!("# netecc {VERSION} bounds\n"));
    out.push_str(&format!("# c={c} e={e} m={m}\n"));
    out.push_str(&format!(
        "# mode={}\n",
        args.n.map_or("asymptotic".to_string(), |n| format!("finite n={n}"))
    ));
    out.push_str(&format!("# p_max={p_max} steps={steps}\n"));
    out.push_str("# benchmark rates are normalized by C onto the [0,1] rate axis\n");
    out.push_str(&curve.to_csv());
    write_output(args.out.as_ref(), &out)
}

fn cmd_construct(
    mut args: ConstructArgs,
    config: Option<&std::path::Path>,
) -> netecc_core::Result<()> {
    config::merge_construct(&mut args, config)?;
    let topo_path =
        args.topology.clone().ok_or_else(|| Error::BadParams("--topology is required".into()))?;
    let m = args.m.ok_or_else(|| Error::BadParams("--m is required".into()))?;
    let n = args.n.ok_or_else(|| Error::BadParams("--n is required".into()))?;
    let p = args.p.ok_or_else(|| Error::BadParams("--p is required".into()))?;
    let construction: Construction = args
        .construction
        .as_deref()
        .ok_or_else(|| Error::BadParams("--construction is required".into()))?
        .parse()?;
    let seed = args.seed.unwrap_or(0);
    let network_seed = args.network_seed.unwrap_or(0);
    let epsilon = args.epsilon.unwrap_or(0.2);
    let attempts = args.attempts.unwrap_or(100);
    let topo = load_topology(&topo_path, args.repair)?;
    let instance = derive_instance(&topo, m, network_seed)?;
    if instance.mds_certified() != Some(true) {
        return Err(Error::CertificationFailure(format!(
            "network code with seed {network_seed} is not MDS-certified; try another --network-seed"
        )));
    }
    let ctx = instance.ctx().clone();

    let (book, family) = match construction {
        Construction::CoherentGreedy => {
            let family = TransferFamily::coherent(&instance)?;
            (gv_construct_coherent(&instance, p, n, seed)?, family)
        }
        Construction::NoncoherentGreedy => {
            let family = match args.sampling {
                Some(count) => TransferFamily::sample(&topo, &ctx, count, network_seed)?,
                None => TransferFamily::exhaustive(
                    &ctx,
                    topo.mincut(),
                    topo.edge_count(),
                    topo.source_edges(),
                )?,
            };
            (gv_construct_noncoherent(&family, p, n, seed)?, family)
        }
        Construction::Linear => {
            let code = linear_gv_construct(&instance, p, n, epsilon, seed, attempts)?;
            let family = TransferFamily::coherent(&instance)?;
            let mut book = code.expand_codebook(&ctx, &instance)?;
            book.p = p;
            (book, family)
        }
    };
    let measured = certify_min_distance(&book, &family)?;
    if measured < book.design_distance {
        return Err(Error::CertificationFailure(format!(
            "measured distance {measured} below design {}",
            book.design_distance
        )));
    }
    let measured_text =
        if measured == u64::MAX { "inf".to_string() } else { measured.to_string() };
    let mut out = String::new();
    out.push_str(&format!("# netecc {VERSION} codebook\n"));
    out.push_str(&format!("# topology={}\n", topo_path.display()));
    out.push_str(&format!("# network_seed={network_seed}\n"));
    out.push_str(&format!("# repair={}\n", args.repair));
    out.push_str(&format!(
        "# certified: size={} design_distance={} measured_distance={}\n",
        book.codewords.len(),
        book.design_distance,
        measured_text
    ));
    out.push_str(&book.to_text());
    write_output(args.out.as_ref(), &out)?;
    eprintln!(
        "constructed {} codewords, certificate d >= {} (measured {})",
        book.codewords.len(),
        book.design_distance,
        measured_text
    );
    Ok(())
}

fn cmd_simulate(
    mut args: SimulateArgs,
    config: Option<&std::path::Path>,
) -> netecc_core::Result<()> {
    config::merge_simulate(&mut args, config)?;
    let topo_path =
        args.topology.clone().ok_or_else(|| Error::BadParams("--topology is required".into()))?;
    let book_path =
        args.codebook.clone().ok_or_else(|| Error::BadParams("--codebook is required".into()))?;
    let noise_mode =
        args.noise.clone().ok_or_else(|| Error::BadParams("--noise is required".into()))?;
    let trials = args.trials.unwrap_or(1000);
    let seed = args.seed.unwrap_or(0);
    let book = Codebook::from_text(&std::fs::read_to_string(&book_path)?)?;
    let topo = load_topology(&topo_path, args.repair)?;
    let network_seed = args.network_seed.unwrap_or(0);
    let instance = derive_instance(&topo, book.m, network_seed)?;
    let family = TransferFamily::coherent(&instance)?;
    if family.hash() != book.family_hash && book.construction == Construction::CoherentGreedy {
        return Err(Error::BadParams(
            "codebook family hash does not match the derived instance; \
             check --network-seed and the topology file"
                .into(),
        ));
    }
    let decoder = MdDecoder::new(&book, &family)?;
    let em = instance.edge_count() * instance.m();
    let radius = ((book.design_distance - 1) / 2) as usize;
    let budget = args.budget.unwrap_or(radius);
    let mut out = String::new();
    out.push_str(&format!("# netecc {VERSION} simulate\n"));
    out.push_str(&format!("# topology={}\n", topo_path.display()));
    out.push_str(&format!("# codebook={}\n", book_path.display()));
    out.push_str(&format!("# network_seed={network_seed} seed={seed}\n"));
    out.push_str(&format!("# noise={noise_mode} budget={budget} trials={trials}\n"));

    let (mut successes, mut ambiguities, mut failures) = (0u64, 0u64, 0u64);
    let mut total = 0u64;
    let record = |out: &mut String, trial: u64, codeword: usize, weight: usize, tag: &str| {
        out.push_str(&format!(
            "trial={trial} codeword={codeword} weight={weight} outcome={tag}\n"
        ));
    };
    match noise_mode.as_str() {
        "exhaustive" => {
            for (i, x) in book.codewords.iter().enumerate() {
                for z in enumerate_noise(budget, em, book.n)? {
                    total += 1;
                    let y = instance.transmit(x, &z)?;
                    match decoder.decode(&y) {
                        Ok(idx) if idx == i => successes += 1,
                        Ok(_) => failures += 1,
                        Err(Error::Ambiguous(_, _)) => ambiguities += 1,
                        Err(_) => failures += 1,
                    }
                }
            }
        }
        "random" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for t in 0..trials {
                total += 1;
                let i = t % book.codewords.len();
                let z = spread_pattern(em, book.n, budget, &mut rng);
                let y = instance.transmit(&book.codewords[i], &z)?;
                let tag = match decoder.decode(&y) {
                    Ok(idx) if idx == i => {
                        successes += 1;
                        "success"
                    }
                    Ok(_) => {
                        failures += 1;
                        "wrong"
                    }
                    Err(Error::Ambiguous(_, _)) => {
                        ambiguities += 1;
                        "ambiguous"
                    }
                    Err(_) => {
                        failures += 1;
                        "failure"
                    }
                };
                record(&mut out, t as u64, i, z.weight(), tag);
            }
        }
        "adversarial" => {
            let strategy: AdversarialStrategy =
                args.strategy.as_deref().unwrap_or("spread").parse()?;
            let member = TransferMember::from_instance(&instance)?;
            for t in 0..trials {
                total += 1;
                let i = t % book.codewords.len();
                let z = adversarial_noise(
                    &instance,
                    &book,
                    &member.table,
                    i,
                    strategy,
                    budget,
                    seed.wrapping_add(t as u64),
                )?;
                let y = instance.transmit(&book.codewords[i], &z)?;
                let tag = match decoder.decode(&y) {
                    Ok(idx) if idx == i => {
                        successes += 1;
                        "success"
                    }
                    Ok(_) => {
                        failures += 1;
                        "wrong"
                    }
                    Err(Error::Ambiguous(_, _)) => {
                        ambiguities += 1;
                        "ambiguous"
                    }
                    Err(_) => {
                        failures += 1;
                        "failure"
                    }
                };
                record(&mut out, t as u64, i, z.weight(), tag);
            }
        }
        other => return Err(Error::BadParams(format!("unknown noise mode '{other}'"))),
    }
    out.push_str(&format!(
        "summary total={total} successes={successes} ambiguities={ambiguities} failures={failures}\n"
    ));
    let within_guarantee = budget <= radius;
    if noise_mode == "exhaustive" && within_guarantee && (failures > 0 || ambiguities > 0) {
        out.push_str("result=FAIL\n");
        write_output(args.out.as_ref(), &out)?;
        return Err(Error::CertificationFailure(format!(
            "{failures} failures and {ambiguities} ambiguities inside the guarantee radius {radius}"
        )));
    }
    out.push_str("result=PASS\n");
    write_output(args.out.as_ref(), &out)?;
    eprintln!("simulate: {successes}/{total} correct, {ambiguities} ambiguous, {failures} failed");
    Ok(())
}

fn cmd_concat(mut args: ConcatArgs, config: Option<&std::path::Path>) -> netecc_core::Result<()> {
    config::merge_concat(&mut args, config)?;
    let topo_path =
        args.topology.clone().ok_or_else(|| Error::BadParams("--topology is required".into()))?;
    let m = args.m.ok_or_else(|| Error::BadParams("--m is required".into()))?;
    let b = args.b.ok_or_else(|| Error::BadParams("--b is required".into()))?;
    let n_out = args.n_out.ok_or_else(|| Error::BadParams("--n-out is required".into()))?;
    let k_out = args.k_out.ok_or_else(|| Error::BadParams("--k-out is required".into()))?;
    let p_inner = args.p_inner.ok_or_else(|| Error::BadParams("--p-inner is required".into()))?;
    let mode: ExperimentMode = args.mode.as_deref().unwrap_or("sweep").parse()?;
    let trials = args.trials.unwrap_or(1000);
    let seed = args.seed.unwrap_or(0);
    let network_seed = args.network_seed.unwrap_or(0);
    let topo = load_topology(&topo_path, args.repair)?;
    let instance = derive_instance(&topo, m, network_seed)?;
    if instance.mds_certified() != Some(true) {
        return Err(Error::CertificationFailure(format!(
            "network code with seed {network_seed} is not MDS-certified; try another --network-seed"
        )));
    }
    let code = ConcatCode::build(&instance, b, n_out, k_out, p_inner, args.w_max, seed)?;
    let d_product = code.params.d_out() as u64 * code.d_in;
    let budget = args.budget.unwrap_or(((d_product - 1) / 2) as usize);
    let summary = gmd_experiment(&code, &instance, trials, budget, mode, seed)?;
    let mode_name = args.mode.as_deref().unwrap_or("sweep");
    let mut out = String::new();
    out.push_str(&format!("# netecc {VERSION} concat\n"));
    out.push_str(&format!("# topology={}\n", topo_path.display()));
    out.push_str(&format!("# m={m} b={b} n_out={n_out} k_out={k_out} p_inner={p_inner}\n"));
    out.push_str(&format!("# w={} rate={:.6}\n", code.params.w, code.rate()));
    out.push_str(&format!(
        "# d_in={} d_out={} distance_product={d_product}\n",
        code.d_in,
        code.params.d_out()
    ));
    out.push_str(&format!(
        "# mode={mode_name} trials={trials} budget={budget} seed={seed} network_seed={network_seed}\n"
    ));
    for r in &summary.records {
        out.push_str(&format!(
            "seed={} noise_weight={} transform_noise={} mode={mode_name} erasures={} outer_errors={} success={}\n",
            r.seed, r.noise_weight, r.transform_noise, r.erasures, r.outer_errors, r.success
        ));
    }
    out.push_str(&format!(
        "summary mean_2e_plus_s={:.6} d_out={} success_rate={:.6}\n",
        summary.mean_two_e_plus_s, summary.d_out, summary.success_rate
    ));
    let expectation_ok = summary.mean_two_e_plus_s < summary.d_out as f64;
    out.push_str(&format!("expectation_check={}\n", if expectation_ok { "PASS" } else { "FAIL" }));
    write_output(args.out.as_ref(), &out)?;
    eprintln!(
        "concat: success rate {:.4}, mean(2e+s) = {:.4} vs d_out = {}",
        summary.success_rate, summary.mean_two_e_plus_s, summary.d_out
    );
    if mode == ExperimentMode::Randomized && !expectation_ok && (budget as u64) * 2 < d_product {
        return Err(Error::DecodeFailure(format!(
            "mean(2e+s) = {:.4} is not below d_out = {}",
            summary.mean_two_e_plus_s, summary.d_out
        )));
    }
    Ok(())
}
