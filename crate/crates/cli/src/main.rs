//! `corners`: command-line surface for the corners finite-field laboratory.
//!
//! Every randomized subcommand takes an explicit `--seed`; identical flags
//! and seed produce byte-identical output, so scans can be golden-file
//! tested. CSV schemas carry a versioned header comment line.
//!
//! Exit codes: 1 invalid input, 2 bad prime (reduction degenerates),
//! 3 invariant violation, 4 numerical-health failure.

use clap::{Args, Parser, Subcommand};
use corners_core::counting::{
    corner_census, corner_operator, degree_lowering_trace, dual_function, main_term,
    two_term_operator, validate_inequality_chain, CountReport, DualKind,
};
use corners_core::gowers::{box_norm, u2_inverse, Coordinate, DirectionSpec, Subgroup};
use corners_core::grid::{generate, norm, GridFn, Generator, NormKind};
use corners_core::jacobian::{nonvanishing_witness, verify_identity, IdentityId, WitnessId};
use corners_core::kernel::{bombieri_check, check_invariants, kernel_table, KernelTable};
use corners_core::ratfun::{
    is_linearly_independent_with_one, parse_ratfun, reduce_mod_p, IndependenceCertificate,
    RatFunFp, RatFunQ,
};
use corners_core::tol;
use corners_core::varieties::{
    dimension_scan, roth_count_brute, roth_count_charsum, roth_count_structured,
    signed_sum_histogram, zprime_count, BruteFilter, EIGHT_SIGNS,
};
use num_complex::Complex64;
use serde::Deserialize;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_INVALID: u8 = 1;
const EXIT_BAD_PRIME: u8 = 2;
const EXIT_INVARIANT: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

/// Terminal failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn bad_prime(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_BAD_PRIME,
            message: message.into(),
        }
    }

    fn invariant(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVARIANT,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

type CliResult = Result<(), Failure>;

/// Defaults file accepted via `--config`; explicit flags win.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(rename = "P")]
    p_expr: Option<String>,
    #[serde(rename = "Q")]
    q_expr: Option<String>,
    prime: Option<u64>,
    primes: Option<Vec<u64>>,
    seed: Option<u64>,
    generator: Option<String>,
    method: Option<String>,
    trials: Option<u64>,
    budget: Option<u64>,
    out: Option<PathBuf>,
    allow_dependent: Option<bool>,
}

#[derive(Parser)]
#[command(name = "corners", version, about = "Corner-counting laboratory over prime fields")]
struct Cli {
    /// JSON file supplying defaults for the common flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct FunArgs {
    /// Rational function P, e.g. "t" or "t^2/(t-1)".
    #[arg(long = "P")]
    p_expr: Option<String>,
    /// Rational function Q.
    #[arg(long = "Q")]
    q_expr: Option<String>,
    /// Permit pairs where {1,P,Q} are linearly dependent (negative controls).
    #[arg(long)]
    allow_dependent: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the counting operator and main term on generated inputs.
    CountCorners {
        #[command(flatten)]
        funs: FunArgs,
        #[arg(long)]
        p: Option<u64>,
        /// Generator for all three inputs: const[:re,im], char:a,b,
        /// unimodular, bounded, indicator:density.
        #[arg(long)]
        gen: Option<String>,
        /// Per-slot overrides of --gen.
        #[arg(long)]
        f0: Option<String>,
        #[arg(long)]
        f1: Option<String>,
        #[arg(long)]
        f2: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV scan of |lambda|, |main|, error and error·√p across primes/seeds.
    ErrorScan {
        #[command(flatten)]
        funs: FunArgs,
        /// Comma-separated primes.
        #[arg(long)]
        primes: Option<String>,
        /// Seeds per prime (seed, seed+1, …).
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        gen: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count corners inside a random indicator set.
    CornerCensus {
        #[command(flatten)]
        funs: FunArgs,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Box norm of a generated input along a subgroup list.
    GowersNorm {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        gen: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated subgroups: axis1, axis2, full.
        #[arg(long, default_value = "axis1,axis2")]
        subgroups: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Constructive U² inverse along one coordinate.
    InverseU2 {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        gen: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "first")]
        coordinate: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the kernel table, check its invariants, optionally dump binary.
    KernelTable {
        #[command(flatten)]
        funs: FunArgs,
        #[arg(long)]
        p: Option<u64>,
        /// Binary dump target (little-endian).
        #[arg(long)]
        binary: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV scan of sup|K| off the origin and its √p normalization.
    BombieriScan {
        #[command(flatten)]
        funs: FunArgs,
        #[arg(long)]
        primes: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count the Roth variety by one or all methods.
    RothCount {
        #[command(flatten)]
        funs: FunArgs,
        #[arg(long)]
        p: Option<u64>,
        /// brute | structured | charsum | all
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV scan of the dimension ratios |Y|/p⁶, |Z′|/p⁵, sup|X|/p³, sup|W|/p⁴.
    VarietyScan {
        #[command(flatten)]
        funs: FunArgs,
        #[arg(long)]
        primes: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact |Z′(F_p)| by the meet-in-the-middle join.
    ZprimeCount {
        #[command(flatten)]
        funs: FunArgs,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Signed-sum histogram N(a,b); reports the origin and supremum.
    Histogram {
        #[command(flatten)]
        funs: FunArgs,
        #[arg(long)]
        p: Option<u64>,
        /// Sign string over the variables, e.g. "+--+-++-".
        #[arg(long)]
        signs: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized check of a determinant identity over the 61-bit prime.
    JacobianVerify {
        #[command(flatten)]
        funs: FunArgs,
        /// prop_jac | jzprime_factorization | s_log_derivative | all
        #[arg(long, default_value = "all")]
        identity: String,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search a non-vanishing witness for D, J_X, J_W or the pair Wronskian.
    Nonvanishing {
        #[command(flatten)]
        funs: FunArgs,
        /// d | jx | jw | pair_wronskian
        #[arg(long)]
        id: String,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate the full inequality chain on seeded random triples.
    ChainValidate {
        #[command(flatten)]
        funs: FunArgs,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 10)]
        triples: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute the degree-lowering pipeline and report the step trace.
    DegreeLoweringTrace {
        #[command(flatten)]
        funs: FunArgs,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        gen: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the cross-method and invariant suite; nonzero exit on violation.
    Selftest,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are success; real parse errors are
            // invalid input.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let config = match load_config(&cli.config) {
        Ok(c) => c,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    match dispatch(cli.cmd, &config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, Failure> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::invalid(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::invalid(format!("bad config {}: {e}", path.display())))
}

fn pick<T>(flag: Option<T>, cfg: Option<T>, name: &str) -> Result<T, Failure> {
    flag.or(cfg)
        .ok_or_else(|| Failure::invalid(format!("missing required value: {name}")))
}

fn pick_or<T>(flag: Option<T>, cfg: Option<T>, default: T) -> T {
    flag.or(cfg).unwrap_or(default)
}

/// Parse P,Q and enforce the independence precondition.
fn parse_pair(funs: &FunArgs, config: &RunConfig) -> Result<(RatFunQ, RatFunQ), Failure> {
    let ptext = pick(funs.p_expr.clone(), config.p_expr.clone(), "--P")?;
    let qtext = pick(funs.q_expr.clone(), config.q_expr.clone(), "--Q")?;
    let pfun = parse_ratfun(&ptext).map_err(|e| Failure::invalid(format!("bad P: {e}")))?;
    let qfun = parse_ratfun(&qtext).map_err(|e| Failure::invalid(format!("bad Q: {e}")))?;
    let allow = funs.allow_dependent || config.allow_dependent.unwrap_or(false);
    if !allow {
        if let IndependenceCertificate::Dependent { alpha, beta, gamma } =
            is_linearly_independent_with_one(&pfun, &qfun)
        {
            return Err(Failure::invalid(format!(
                "{alpha}*P + {beta}*Q + {gamma} = 0: {{1,P,Q}} are dependent \
                 (pass --allow-dependent for negative controls)"
            )));
        }
    }
    Ok((pfun, qfun))
}

fn reduce_pair(pfun: &RatFunQ, qfun: &RatFunQ, p: u64) -> Result<(RatFunFp, RatFunFp), Failure> {
    let rp = reduce_mod_p(pfun, p).map_err(|e| Failure::bad_prime(format!("P at p={p}: {e}")))?;
    let rq = reduce_mod_p(qfun, p).map_err(|e| Failure::bad_prime(format!("Q at p={p}: {e}")))?;
    Ok((rp, rq))
}

fn parse_generator(text: &str) -> Result<Generator, Failure> {
    let bad = || Failure::invalid(format!("bad generator descriptor: {text}"));
    let (head, tail) = match text.split_once(':') {
        Some((h, t)) => (h, Some(t)),
        None => (text, None),
    };
    match (head, tail) {
        ("const", None) => Ok(Generator::Constant(Complex64::ONE)),
        ("const", Some(t)) => {
            let (re, im) = t.split_once(',').ok_or_else(bad)?;
            Ok(Generator::Constant(Complex64::new(
                re.parse().map_err(|_| bad())?,
                im.parse().map_err(|_| bad())?,
            )))
        }
        ("char", Some(t)) => {
            let (a, b) = t.split_once(',').ok_or_else(bad)?;
            Ok(Generator::Character(
                a.parse().map_err(|_| bad())?,
                b.parse().map_err(|_| bad())?,
            ))
        }
        ("unimodular", None) => Ok(Generator::RandomUnimodular),
        ("bounded", None) => Ok(Generator::RandomBounded),
        ("indicator", Some(t)) => Ok(Generator::IndicatorRandomSet(
            t.parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn make_grid(descriptor: &str, p: u64, seed: u64) -> Result<GridFn, Failure> {
    let gen = parse_generator(descriptor)?;
    generate(&gen, p, seed).map_err(|e| Failure::invalid(format!("generator failed: {e}")))
}

fn parse_primes(text: &str) -> Result<Vec<u64>, Failure> {
    let mut out: Vec<u64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Failure::invalid(format!("bad prime list entry: {s}")))
        })
        .collect::<Result<_, _>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn parse_coordinate(text: &str) -> Result<Coordinate, Failure> {
    match text {
        "first" => Ok(Coordinate::First),
        "second" => Ok(Coordinate::Second),
        _ => Err(Failure::invalid(format!(
            "coordinate must be first|second, got {text}"
        ))),
    }
}

fn parse_subgroups(text: &str) -> Result<DirectionSpec, Failure> {
    let dirs = text
        .split(',')
        .map(|s| match s.trim() {
            "axis1" => Ok(Subgroup::Axis1),
            "axis2" => Ok(Subgroup::Axis2),
            "full" => Ok(Subgroup::Full),
            other => Err(Failure::invalid(format!("bad subgroup: {other}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DirectionSpec(dirs))
}

fn parse_signs(text: &str) -> Result<Vec<i8>, Failure> {
    text.chars()
        .map(|c| match c {
            '+' => Ok(1i8),
            '-' => Ok(-1i8),
            other => Err(Failure::invalid(format!("bad sign character: {other}"))),
        })
        .collect()
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}

fn dispatch(cmd: Cmd, config: &RunConfig) -> CliResult {
    match cmd {
        Cmd::CountCorners {
            funs,
            p,
            gen,
            f0,
            f1,
            f2,
            seed,
            out,
        } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let prime = pick(p, config.prime, "--p")?;
            let (rp, rq) = reduce_pair(&pq, &qq, prime)?;
            let base = pick_or(gen, config.generator.clone(), "const".to_string());
            let seed = pick_or(seed, config.seed, 0);
            let g0 = make_grid(f0.as_deref().unwrap_or(&base), prime, seed)?;
            let g1 = make_grid(f1.as_deref().unwrap_or(&base), prime, seed.wrapping_add(1))?;
            let g2 = make_grid(f2.as_deref().unwrap_or(&base), prime, seed.wrapping_add(2))?;
            let lambda = corner_operator(&g0, &g1, &g2, &rp, &rq)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            let main = main_term(&g0, &g1, &g2).map_err(|e| Failure::invalid(e.to_string()))?;
            let mut report = CountReport::new(prime, lambda, main, true);
            report.metadata = serde_json::json!({
                "P": pq.to_string(),
                "Q": qq.to_string(),
                "generator": base,
                "seed": seed,
            });
            emit(&out.or_else(|| config.out.clone()), &to_json(&report))
        }
        Cmd::ErrorScan {
            funs,
            primes,
            seeds,
            seed,
            gen,
            out,
        } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let primes = match (primes, &config.primes) {
                (Some(text), _) => parse_primes(&text)?,
                (None, Some(list)) => list.clone(),
                (None, None) => return Err(Failure::invalid("missing required value: --primes")),
            };
            let base_seed = pick_or(seed, config.seed, 0);
            let descriptor = pick_or(gen, config.generator.clone(), "bounded".to_string());
            let mut csv = String::from("# corners error-scan v1\n");
            csv.push_str("p,seed,lambda_abs,main_abs,error,error_sqrt_p\n");
            for &prime in &primes {
                let (rp, rq) = match reduce_pair(&pq, &qq, prime) {
                    Ok(pair) => pair,
                    Err(f) => {
                        eprintln!("skipping p={prime}: {}", f.message);
                        continue;
                    }
                };
                for k in 0..seeds {
                    let s = base_seed.wrapping_add(3 * k);
                    let g0 = make_grid(&descriptor, prime, s)?;
                    let g1 = make_grid(&descriptor, prime, s.wrapping_add(1))?;
                    let g2 = make_grid(&descriptor, prime, s.wrapping_add(2))?;
                    let lambda = corner_operator(&g0, &g1, &g2, &rp, &rq)
                        .map_err(|e| Failure::invalid(e.to_string()))?;
                    let main =
                        main_term(&g0, &g1, &g2).map_err(|e| Failure::invalid(e.to_string()))?;
                    let error = (lambda - main).norm();
                    csv.push_str(&format!(
                        "{prime},{s},{},{},{error},{}\n",
                        lambda.norm(),
                        main.norm(),
                        error * (prime as f64).sqrt()
                    ));
                }
            }
            emit(&out.or_else(|| config.out.clone()), csv.trim_end())
        }
        Cmd::CornerCensus {
            funs,
            p,
            density,
            seed,
            out,
        } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let prime = pick(p, config.prime, "--p")?;
            let (rp, rq) = reduce_pair(&pq, &qq, prime)?;
            let seed = pick(seed, config.seed, "--seed")?;
            if !(0.0..=1.0).contains(&density) {
                return Err(Failure::invalid("density must lie in [0,1]"));
            }
            let set = make_grid(&format!("indicator:{density}"), prime, seed)?;
            let report =
                corner_census(&set, &rp, &rq).map_err(|e| Failure::invalid(e.to_string()))?;
            emit(&out.or_else(|| config.out.clone()), &to_json(&report))
        }
        Cmd::GowersNorm {
            p,
            gen,
            seed,
            subgroups,
            out,
        } => {
            let prime = pick(p, config.prime, "--p")?;
            let descriptor = pick_or(gen, config.generator.clone(), "const".to_string());
            let seed = pick_or(seed, config.seed, 0);
            let f = make_grid(&descriptor, prime, seed)?;
            let dirs = parse_subgroups(&subgroups)?;
            let value = box_norm(&f, &dirs).map_err(|e| Failure::invalid(e.to_string()))?;
            emit(
                &out,
                &to_json(&serde_json::json!({
                    "p": prime,
                    "subgroups": subgroups,
                    "degree": dirs.degree(),
                    "norm": value,
                })),
            )
        }
        Cmd::InverseU2 {
            p,
            gen,
            seed,
            coordinate,
            out,
        } => {
            let prime = pick(p, config.prime, "--p")?;
            let descriptor = pick_or(gen, config.generator.clone(), "bounded".to_string());
            let seed = pick(seed, config.seed, "--seed")?;
            let f = make_grid(&descriptor, prime, seed)?;
            let coord = parse_coordinate(&coordinate)?;
            let u2 = box_norm(&f, &DirectionSpec::u2(coord.u2_direction()))
                .map_err(|e| Failure::invalid(e.to_string()))?;
            let (chi, corr) = u2_inverse(&f, coord);
            let fourth = u2.powi(4);
            if corr < fourth - tol::INEQ_SLACK {
                return Err(Failure::invariant(format!(
                    "inverse correlation {corr} below ‖f‖⁴ = {fourth}"
                )));
            }
            emit(
                &out,
                &to_json(&serde_json::json!({
                    "p": prime,
                    "coordinate": coordinate,
                    "u2_norm": u2,
                    "u2_fourth": fourth,
                    "correlation": corr,
                    "slack": corr - fourth,
                    "eigenfunction": chi,
                })),
            )
        }
        Cmd::KernelTable {
            funs,
            p,
            binary,
            out,
        } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let prime = pick(p, config.prime, "--p")?;
            let (rp, rq) = reduce_pair(&pq, &qq, prime)?;
            let k = kernel_table(&rp, &rq);
            let worst = check_invariants(&k).map_err(Failure::invariant)?;
            if let Some(path) = &binary {
                let mut buf = Vec::new();
                k.write_binary(&mut buf).expect("in-memory write");
                fs::write(path, buf).map_err(|e| {
                    Failure::invalid(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            let (sup, normalized) = bombieri_check(&k);
            emit(
                &out,
                &to_json(&serde_json::json!({
                    "p": prime,
                    "pole_count": k.pole_count(),
                    "origin": k.at(0, 0).re,
                    "sup_off_origin": sup,
                    "sup_sqrt_p": normalized,
                    "worst_invariant_discrepancy": worst,
                })),
            )
        }
        Cmd::BombieriScan { funs, primes, out } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let primes = match (primes, &config.primes) {
                (Some(text), _) => parse_primes(&text)?,
                (None, Some(list)) => list.clone(),
                (None, None) => return Err(Failure::invalid("missing required value: --primes")),
            };
            let mut csv = String::from("# corners bombieri-scan v1\n");
            csv.push_str("p,pole_count,sup,sup_sqrt_p\n");
            for &prime in &primes {
                let (rp, rq) = match reduce_pair(&pq, &qq, prime) {
                    Ok(pair) => pair,
                    Err(f) => {
                        eprintln!("skipping p={prime}: {}", f.message);
                        continue;
                    }
                };
                let k = kernel_table(&rp, &rq);
                check_invariants(&k).map_err(Failure::invariant)?;
                let (sup, normalized) = bombieri_check(&k);
                csv.push_str(&format!("{prime},{},{sup},{normalized}\n", k.pole_count()));
            }
            emit(&out.or_else(|| config.out.clone()), csv.trim_end())
        }
        Cmd::RothCount {
            funs,
            p,
            method,
            out,
        } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let prime = pick(p, config.prime, "--p")?;
            let (rp, rq) = reduce_pair(&pq, &qq, prime)?;
            let method = pick_or(method, config.method.clone(), "charsum".to_string());
            let reports = roth_reports(&rp, &rq, &method)?;
            let counts: Vec<u64> = reports.iter().map(|r| r.count).collect();
            if counts.windows(2).any(|w| w[0] != w[1]) {
                return Err(Failure::invariant(format!(
                    "methods disagree at p={prime}: {counts:?}"
                )));
            }
            emit(&out.or_else(|| config.out.clone()), &to_json(&reports))
        }
        Cmd::VarietyScan { funs, primes, out } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let primes = match (primes, &config.primes) {
                (Some(text), _) => parse_primes(&text)?,
                (None, Some(list)) => list.clone(),
                (None, None) => return Err(Failure::invalid("missing required value: --primes")),
            };
            let (rows, skipped) = dimension_scan(&pq, &qq, &primes);
            for (prime, reason) in &skipped {
                eprintln!("skipping p={prime}: {reason}");
            }
            let mut csv = String::from("# corners variety-scan v1\n");
            csv.push_str("p,variety,count,exponent,ratio,method,residual,seconds\n");
            for row in &rows {
                let method = serde_json::to_value(row.method).unwrap();
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{:.3}\n",
                    row.p,
                    row.variety,
                    row.count,
                    row.exponent,
                    row.ratio,
                    method.as_str().unwrap(),
                    row.residual.map_or(String::new(), |r| r.to_string()),
                    row.seconds,
                ));
            }
            emit(&out.or_else(|| config.out.clone()), csv.trim_end())
        }
        Cmd::ZprimeCount { funs, p, out } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let prime = pick(p, config.prime, "--p")?;
            let (rp, rq) = reduce_pair(&pq, &qq, prime)?;
            let report = zprime_count(&rp, &rq).map_err(variety_failure)?;
            emit(&out.or_else(|| config.out.clone()), &to_json(&report))
        }
        Cmd::Histogram {
            funs,
            p,
            signs,
            out,
        } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let prime = pick(p, config.prime, "--p")?;
            let (rp, rq) = reduce_pair(&pq, &qq, prime)?;
            let signs = match signs {
                Some(text) => parse_signs(&text)?,
                None => EIGHT_SIGNS.to_vec(),
            };
            if signs.is_empty() || signs.len() > 8 {
                return Err(Failure::invalid("sign string must have 1..=8 entries"));
            }
            let table = signed_sum_histogram(&rp, &rq, &signs);
            let origin = table[0];
            let sup = *table.iter().max().unwrap();
            let total: u64 = table.iter().sum();
            emit(
                &out,
                &to_json(&serde_json::json!({
                    "p": prime,
                    "k": signs.len(),
                    "origin": origin,
                    "sup": sup,
                    "total": total,
                })),
            )
        }
        Cmd::JacobianVerify {
            funs,
            identity,
            trials,
            seed,
            out,
        } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let trials = pick_or(trials, config.trials, 200);
            let seed = pick(seed, config.seed, "--seed")?;
            let ids: Vec<IdentityId> = match identity.as_str() {
                "prop_jac" => vec![IdentityId::PropJac],
                "jzprime_factorization" => vec![IdentityId::JzprimeFactorization],
                "s_log_derivative" => vec![IdentityId::SLogDerivative],
                "all" => vec![
                    IdentityId::PropJac,
                    IdentityId::JzprimeFactorization,
                    IdentityId::SLogDerivative,
                ],
                other => return Err(Failure::invalid(format!("unknown identity: {other}"))),
            };
            let mut reports = Vec::new();
            for id in ids {
                let report = verify_identity(id, &pq, &qq, trials, seed)
                    .map_err(|e| Failure::bad_prime(e.to_string()))?;
                if report.failures > 0 {
                    return Err(Failure::invariant(format!(
                        "{id:?}: {} of {} trials failed",
                        report.failures, report.trials
                    )));
                }
                reports.push(report);
            }
            emit(&out.or_else(|| config.out.clone()), &to_json(&reports))
        }
        Cmd::Nonvanishing {
            funs,
            id,
            budget,
            seed,
            out,
        } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let budget = pick_or(budget, config.budget, 1000);
            let seed = pick(seed, config.seed, "--seed")?;
            let id = match id.as_str() {
                "d" => WitnessId::D,
                "jx" => WitnessId::JX,
                "jw" => WitnessId::JW,
                "pair_wronskian" => WitnessId::PairWronskian,
                other => return Err(Failure::invalid(format!("unknown witness id: {other}"))),
            };
            let outcome = nonvanishing_witness(id, &pq, &qq, budget, seed)
                .map_err(|e| Failure::bad_prime(e.to_string()))?;
            emit(&out.or_else(|| config.out.clone()), &to_json(&outcome))
        }
        Cmd::ChainValidate {
            funs,
            p,
            triples,
            seed,
            out,
        } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let prime = pick(p, config.prime, "--p")?;
            let (rp, rq) = reduce_pair(&pq, &qq, prime)?;
            let seed = pick(seed, config.seed, "--seed")?;
            let ratio = roth_ratio(&rp, &rq)?;
            let mut worst = f64::INFINITY;
            let mut reports = Vec::new();
            for k in 0..triples {
                let s = seed.wrapping_add(3 * k);
                let f0 = make_grid("bounded", prime, s)?;
                let f1 = make_grid("bounded", prime, s.wrapping_add(1))?;
                let f2 = make_grid("bounded", prime, s.wrapping_add(2))?;
                let report = validate_inequality_chain(&f0, &f1, &f2, &rp, &rq, ratio)
                    .map_err(|e| Failure::invalid(e.to_string()))?;
                worst = worst.min(report.min_slack());
                reports.push(report);
            }
            if worst < -tol::INEQ_SLACK {
                return Err(Failure::invariant(format!(
                    "inequality chain violated: min slack {worst}"
                )));
            }
            emit(
                &out,
                &to_json(&serde_json::json!({
                    "p": prime,
                    "roth_ratio": ratio,
                    "triples": triples,
                    "min_slack": worst,
                    "reports": reports,
                })),
            )
        }
        Cmd::DegreeLoweringTrace {
            funs,
            p,
            gen,
            seed,
            out,
        } => {
            let (pq, qq) = parse_pair(&funs, config)?;
            let prime = pick(p, config.prime, "--p")?;
            let (rp, rq) = reduce_pair(&pq, &qq, prime)?;
            let descriptor = pick_or(gen, config.generator.clone(), "bounded".to_string());
            let seed = pick(seed, config.seed, "--seed")?;
            let f0 = make_grid(&descriptor, prime, seed)?;
            let f1 = make_grid(&descriptor, prime, seed.wrapping_add(1))?;
            let f2 = make_grid(&descriptor, prime, seed.wrapping_add(2))?;
            let trace = degree_lowering_trace(&f0, &f1, &f2, &rp, &rq)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            trace.check_strict().map_err(Failure::invariant)?;
            emit(&out.or_else(|| config.out.clone()), &to_json(&trace))
        }
        Cmd::Selftest => selftest(),
    }
}

/// Prime-size limits are user errors; derivative degeneration is a bad prime.
fn variety_failure(e: corners_core::varieties::VarietyError) -> Failure {
    use corners_core::varieties::VarietyError;
    match e {
        VarietyError::PrimeTooLarge { .. } => Failure::invalid(e.to_string()),
        VarietyError::Derivative(_) => Failure::bad_prime(e.to_string()),
    }
}

/// Kernel for the pair at a prime (shared by roth paths).
fn kernel_for(rp: &RatFunFp, rq: &RatFunFp) -> KernelTable {
    kernel_table(rp, rq)
}

fn roth_reports(
    rp: &RatFunFp,
    rq: &RatFunFp,
    method: &str,
) -> Result<Vec<corners_core::varieties::VarietyCountReport>, Failure> {
    use corners_core::varieties::{CountMethod, VarietyCountReport};
    use std::time::Instant;
    let p = rp.prime();
    let exact = |count: u64, method: CountMethod, secs: f64| VarietyCountReport {
        variety: "Y".to_string(),
        p,
        count,
        exponent: 6,
        ratio: count as f64 / (p as f64).powi(6),
        method,
        residual: None,
        reliable: true,
        seconds: secs,
    };
    let run_brute = || -> Result<_, Failure> {
        let t = Instant::now();
        let count = roth_count_brute(rp, rq, BruteFilter::All).map_err(variety_failure)?;
        Ok(exact(count, CountMethod::Brute, t.elapsed().as_secs_f64()))
    };
    let run_structured = || -> Result<_, Failure> {
        let t = Instant::now();
        let count = roth_count_structured(rp, rq).map_err(variety_failure)?;
        Ok(exact(count, CountMethod::Structured, t.elapsed().as_secs_f64()))
    };
    let run_charsum = || -> Result<_, Failure> {
        let report = roth_count_charsum(&kernel_for(rp, rq));
        if !report.reliable {
            return Err(Failure::numerical(format!(
                "charsum residual {} exceeds tolerance at p={p}",
                report.residual.unwrap_or(f64::NAN)
            )));
        }
        Ok(report)
    };
    match method {
        "brute" => Ok(vec![run_brute()?]),
        "structured" => Ok(vec![run_structured()?]),
        "charsum" => Ok(vec![run_charsum()?]),
        "all" => {
            let mut reports = Vec::new();
            if roth_count_brute(rp, rq, BruteFilter::All).is_ok() {
                reports.push(run_brute()?);
            }
            if roth_count_structured(rp, rq).is_ok() {
                reports.push(run_structured()?);
            }
            reports.push(run_charsum()?);
            Ok(reports)
        }
        other => Err(Failure::invalid(format!("unknown method: {other}"))),
    }
}

/// `|Y(F_p)|/p⁶` by the cheapest reliable route.
fn roth_ratio(rp: &RatFunFp, rq: &RatFunFp) -> Result<f64, Failure> {
    let p = rp.prime();
    if let Ok(count) = roth_count_structured(rp, rq) {
        return Ok(count as f64 / (p as f64).powi(6));
    }
    let report = roth_count_charsum(&kernel_for(rp, rq));
    if !report.reliable {
        return Err(Failure::numerical(format!(
            "charsum residual {} exceeds tolerance at p={p}",
            report.residual.unwrap_or(f64::NAN)
        )));
    }
    Ok(report.ratio)
}

fn selftest() -> CliResult {
    let mut checks = 0u32;
    let mut pass = |name: &str| {
        checks += 1;
        println!("ok {checks} - {name}");
    };

    let pair = |ptext: &str, qtext: &str, p: u64| -> Result<(RatFunFp, RatFunFp), Failure> {
        let pq = parse_ratfun(ptext).map_err(|e| Failure::invalid(e.to_string()))?;
        let qq = parse_ratfun(qtext).map_err(|e| Failure::invalid(e.to_string()))?;
        reduce_pair(&pq, &qq, p)
    };

    // Cross-method Roth counts.
    {
        let (rp, rq) = pair("t", "t^2", 3)?;
        let reports = roth_reports(&rp, &rq, "all")?;
        let counts: Vec<u64> = reports.iter().map(|r| r.count).collect();
        if counts.windows(2).any(|w| w[0] != w[1]) {
            return Err(Failure::invariant(format!("roth methods disagree: {counts:?}")));
        }
        pass("roth cross-method agreement at p=3");
        for p in [5u64, 7] {
            let (rp, rq) = pair("t", "t^2", p)?;
            let exact = roth_count_structured(&rp, &rq)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            let cs = roth_count_charsum(&kernel_for(&rp, &rq));
            if !cs.reliable {
                return Err(Failure::numerical(format!("charsum unreliable at p={p}")));
            }
            if cs.count != exact {
                return Err(Failure::invariant(format!(
                    "charsum {} vs structured {exact} at p={p}",
                    cs.count
                )));
            }
        }
        pass("structured = charsum at p in {5,7}");
    }

    // Kernel invariants and the Gauss-sum normalization.
    {
        for (ptext, qtext, p) in [("t", "t^2", 11), ("1/t", "t^2", 7), ("t^2/(t-1)", "t^3", 13)] {
            let (rp, rq) = pair(ptext, qtext, p)?;
            let k = kernel_for(&rp, &rq);
            check_invariants(&k).map_err(Failure::invariant)?;
        }
        let (rp, rq) = pair("t", "t^2", 31)?;
        let (_, normalized) = bombieri_check(&kernel_for(&rp, &rq));
        if (normalized - 1.0).abs() > 1e-9 {
            return Err(Failure::invariant(format!(
                "Gauss normalization {normalized} != 1 at p=31"
            )));
        }
        pass("kernel invariants and Gauss normalization");
    }

    // Duality and inequality chain on random triples.
    {
        let (rp, rq) = pair("t", "t^2", 11)?;
        let ratio = roth_ratio(&rp, &rq)?;
        for seed in 0..5u64 {
            let f0 = make_grid("bounded", 11, seed)?;
            let f1 = make_grid("bounded", 11, seed + 40)?;
            let f2 = make_grid("bounded", 11, seed + 80)?;
            let lam = corner_operator(&f0, &f1, &f2, &rp, &rq)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            let dual = dual_function(&f0, &f2, &rp, &rq, DualKind::F1)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            let mut acc = Complex64::ZERO;
            for (a, b) in f1.values().iter().zip(dual.values()) {
                acc += a * b;
            }
            acc /= 121.0;
            if (lam - acc).norm() > tol::IDENTITY {
                return Err(Failure::invariant(format!(
                    "duality residue {} at seed {seed}",
                    (lam - acc).norm()
                )));
            }
            let report = validate_inequality_chain(&f0, &f1, &f2, &rp, &rq, ratio)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            if report.min_slack() < -tol::INEQ_SLACK {
                return Err(Failure::invariant(format!(
                    "chain slack {} at seed {seed}",
                    report.min_slack()
                )));
            }
        }
        pass("duality and inequality chain at p=11");
    }

    // Two-term operator exactness for linear P.
    {
        let rp = reduce_mod_p(&parse_ratfun("t").unwrap(), 11)
            .map_err(|e| Failure::bad_prime(e.to_string()))?;
        let f0 = make_grid("bounded", 11, 1)?;
        let f1 = make_grid("bounded", 11, 2)?;
        let report = two_term_operator(&f0, &f1, &rp, Coordinate::First)
            .map_err(|e| Failure::invalid(e.to_string()))?;
        if report.error > tol::IDENTITY {
            return Err(Failure::invariant(format!(
                "two-term error {} for P=t",
                report.error
            )));
        }
        pass("two-term operator exact for P=t");
    }

    // U² inverse correlation bound, both coordinates.
    {
        for seed in 0..5u64 {
            let f = make_grid("bounded", 13, seed)?;
            for coord in [Coordinate::First, Coordinate::Second] {
                let u2 = box_norm(&f, &DirectionSpec::u2(coord.u2_direction()))
                    .map_err(|e| Failure::invalid(e.to_string()))?;
                let (_, corr) = u2_inverse(&f, coord);
                if corr < u2.powi(4) - tol::INEQ_SLACK {
                    return Err(Failure::invariant(format!(
                        "inverse correlation {corr} < {} at seed {seed}",
                        u2.powi(4)
                    )));
                }
            }
        }
        pass("U2 inverse correlation bound at p=13");
    }

    // Parseval on random inputs.
    {
        for seed in 0..5u64 {
            let f = make_grid("bounded", 13, seed + 7)?;
            let l2 = norm(&f, NormKind::Averaged, 2.0);
            let hat = corners_core::grid::dft2(&f);
            let spectral: f64 = hat.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if (l2 - spectral).abs() > tol::IDENTITY {
                return Err(Failure::invariant(format!(
                    "Parseval residue {} at seed {seed}",
                    (l2 - spectral).abs()
                )));
            }
        }
        pass("Parseval at p=13");
    }

    // Degree-lowering trace strict steps.
    {
        let (rp, rq) = pair("t", "t^2", 7)?;
        for seed in 0..3u64 {
            let f0 = make_grid("bounded", 7, seed)?;
            let f1 = make_grid("bounded", 7, seed + 11)?;
            let f2 = make_grid("bounded", 7, seed + 22)?;
            let trace = degree_lowering_trace(&f0, &f1, &f2, &rp, &rq)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            trace.check_strict().map_err(Failure::invariant)?;
        }
        pass("degree-lowering strict steps at p=7");
    }

    // Jacobian identities and witness searches.
    {
        let pq = parse_ratfun("t").unwrap();
        let qq = parse_ratfun("t^3").unwrap();
        for id in [
            IdentityId::PropJac,
            IdentityId::JzprimeFactorization,
            IdentityId::SLogDerivative,
        ] {
            let report = verify_identity(id, &pq, &qq, 50, 1)
                .map_err(|e| Failure::bad_prime(e.to_string()))?;
            if report.failures > 0 {
                return Err(Failure::invariant(format!("{id:?} failed")));
            }
        }
        for id in [WitnessId::D, WitnessId::JX, WitnessId::JW] {
            match nonvanishing_witness(id, &pq, &qq, 50, 2)
                .map_err(|e| Failure::bad_prime(e.to_string()))?
            {
                corners_core::jacobian::WitnessOutcome::Found { .. } => {}
                corners_core::jacobian::WitnessOutcome::Exhausted { .. } => {
                    return Err(Failure::invariant(format!("{id:?} witness not found")))
                }
            }
        }
        let dep_q = parse_ratfun("3*t+5").unwrap();
        match nonvanishing_witness(WitnessId::PairWronskian, &pq, &dep_q, 50, 3)
            .map_err(|e| Failure::bad_prime(e.to_string()))?
        {
            corners_core::jacobian::WitnessOutcome::Exhausted { .. } => {}
            corners_core::jacobian::WitnessOutcome::Found { point, .. } => {
                return Err(Failure::invariant(format!(
                    "dependent pair produced witness {point:?}"
                )))
            }
        }
        pass("jacobian identities and witnesses");
    }

    println!("selftest: {checks} checks passed");
    Ok(())
}
