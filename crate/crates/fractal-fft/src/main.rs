//! Command-line front end: point tables, forward/inverse transforms on
//! signal files, identity verification, operation-count benchmarks and the
//! frequency-translation search.

use std::path::PathBuf;
use std::process;
use std::time::Instant;

use num_complex::Complex64;

use fractal_fft::config::{read_signal, write_signal};
use fractal_fft::linalg::{inf_norm, max_abs_diff_vec, LuDecomposition};
use fractal_fft::{
    base_digits, dense_op_count, plan_op_count_bound, search_frequencies, Error, FractalSystem,
    M1Class, OpCounter, Ordering, PointKind, Result, SystemConfig,
};

const USAGE: &str = "fractal-fft — fast exponential transforms on IFS point sets

USAGE:
    fractal-fft <COMMAND> [FLAGS]

COMMANDS:
    points     print the K^N orbit points of S_N or T_N
    forward    apply the level-N transform to a signal file
    inverse    apply the level-N inverse transform to a signal file
    verify     check block identities, diagonal recurrences and round trips
    bench      CSV of measured operation counts vs the closed-form bound
    search     find frequency translations c making M1 invertible/Hadamard

FLAGS:
    --config PATH                  system configuration (JSON)
    --level N                      transform level (K^N points)
    --ordering obverse|reverse     composition ordering (default obverse)
    --kind spatial|frequency       point set kind for `points` (default spatial)
    --signal PATH                  input signal, one \"re,im\" per line
    --out PATH                     output path (signal or searched config)
    --oracle dense                 cross-check against the dense matrix
    --target invertible|hadamard   search target (default: config m1_class)
    --bound INT                    search box half-width (default 50)

EXIT CODES:
    0 success, 1 validation failure, 2 verification failure, 3 resource cap
";

#[derive(Debug, Default)]
struct Flags {
    config: Option<PathBuf>,
    level: Option<u32>,
    ordering: Option<Ordering>,
    kind: Option<PointKind>,
    signal: Option<PathBuf>,
    out: Option<PathBuf>,
    oracle: bool,
    target: Option<M1Class>,
    bound: Option<i64>,
}

fn parse_flags(args: &[String]) -> Result<Flags> {
    let mut flags = Flags::default();
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let mut value = |name: &str| -> Result<String> {
            it.next()
                .cloned()
                .ok_or_else(|| Error::Validation(format!("flag {name} requires a value")))
        };
        match flag.as_str() {
            "--config" => flags.config = Some(PathBuf::from(value("--config")?)),
            "--level" => {
                let raw = value("--level")?;
                flags.level = Some(raw.parse().map_err(|_| {
                    Error::Validation(format!("--level expects a positive integer, got {raw:?}"))
                })?);
            }
            "--ordering" => flags.ordering = Some(Ordering::parse(&value("--ordering")?)?),
            "--kind" => flags.kind = Some(PointKind::parse(&value("--kind")?)?),
            "--signal" => flags.signal = Some(PathBuf::from(value("--signal")?)),
            "--out" => flags.out = Some(PathBuf::from(value("--out")?)),
            "--oracle" => {
                let raw = value("--oracle")?;
                if raw != "dense" {
                    return Err(Error::Validation(format!(
                        "--oracle supports only \"dense\", got {raw:?}"
                    )));
                }
                flags.oracle = true;
            }
            "--target" => flags.target = Some(M1Class::parse(&value("--target")?)?),
            "--bound" => {
                let raw = value("--bound")?;
                flags.bound = Some(raw.parse().map_err(|_| {
                    Error::Validation(format!("--bound expects an integer, got {raw:?}"))
                })?);
            }
            other => {
                return Err(Error::Validation(format!("unknown flag {other:?}")));
            }
        }
    }
    Ok(flags)
}

fn require_config(flags: &Flags) -> Result<SystemConfig> {
    let path = flags
        .config
        .as_ref()
        .ok_or_else(|| Error::Validation("--config is required".into()))?;
    SystemConfig::from_path(path)
}

fn require_level(flags: &Flags) -> Result<u32> {
    let level = flags
        .level
        .ok_or_else(|| Error::Validation("--level is required".into()))?;
    if level == 0 {
        return Err(Error::Validation("--level must be at least 1".into()));
    }
    Ok(level)
}

fn load_system(config: &SystemConfig) -> Result<FractalSystem> {
    let system = config.to_system()?;
    if !system.spatial().is_contraction() {
        eprintln!(
            "warning: operator 2-norm of A is {:.6} >= 1; the spatial maps are not contractions",
            system.spatial().spectral_norm()
        );
    }
    Ok(system)
}

struct Lcg(u64);

impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    fn vec(&mut self, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(self.next_f64(), self.next_f64()))
            .collect()
    }
}

fn cmd_points(flags: &Flags) -> Result<()> {
    let config = require_config(flags)?;
    let level = require_level(flags)?;
    let system = load_system(&config)?;
    let kind = flags.kind.unwrap_or(PointKind::Spatial);
    let ordering = flags.ordering.unwrap_or(Ordering::Obverse);
    let set = system.generate_point_set(kind, ordering, level)?;
    if set.has_duplicates() {
        eprintln!("warning: {} point set contains duplicate points", kind);
    }
    let k = system.branch_count();
    println!("# index\tdigits\tpoint\tapprox");
    for (j, point) in set.points().iter().enumerate() {
        let digits = if k >= 2 {
            base_digits(j, k, level)?
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        } else {
            vec!["0"; level as usize].join(",")
        };
        let approx = point
            .to_f64_vec()
            .iter()
            .map(|x| format!("{x:.9}"))
            .collect::<Vec<_>>()
            .join(",");
        println!("{j}\t{digits}\t{point}\t{approx}");
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Direction {
    Forward,
    Inverse,
}

fn cmd_transform(flags: &Flags, direction: Direction) -> Result<()> {
    let config = require_config(flags)?;
    let level = require_level(flags)?;
    let ordering = flags.ordering.unwrap_or(Ordering::Obverse);
    let signal_path = flags
        .signal
        .as_ref()
        .ok_or_else(|| Error::Validation("--signal is required".into()))?;
    let out_path = flags
        .out
        .as_ref()
        .ok_or_else(|| Error::Validation("--out is required".into()))?;

    let system = load_system(&config)?;
    let plan = system.build_plan(level, ordering)?;
    let samples = read_signal(signal_path)?;
    if samples.len() != plan.len() {
        return Err(Error::ShapeMismatch {
            expected: plan.len(),
            actual: samples.len(),
        });
    }

    let mut counter = OpCounter::new();
    let start = Instant::now();
    let result = match direction {
        Direction::Forward => plan.forward(&samples, &mut counter)?,
        Direction::Inverse => plan.inverse(&samples, &mut counter)?,
    };
    let elapsed = start.elapsed();

    write_signal(out_path, &result)?;
    println!("samples: {}", samples.len());
    println!("multiplications: {}", counter.multiplications);
    println!("additions: {}", counter.additions);
    println!("operations: {}", counter.total());
    println!("elapsed_ms: {:.3}", elapsed.as_secs_f64() * 1e3);

    if flags.oracle {
        let dense = system.dense_matrix(level, ordering)?;
        let expected = match direction {
            Direction::Forward => dense.mul_vec(&samples),
            Direction::Inverse => LuDecomposition::new(&dense)?.solve(&samples),
        };
        let deviation = max_abs_diff_vec(&result, &expected);
        println!("oracle_max_deviation: {deviation:.3e}");
        if deviation > 1e-9 {
            return Err(Error::Verification(format!(
                "fast result deviates from the dense oracle by {deviation:.3e} > 1e-9"
            )));
        }
    }
    Ok(())
}

fn cmd_verify(flags: &Flags) -> Result<()> {
    let config = require_config(flags)?;
    let level_max = require_level(flags)?;
    let system = load_system(&config)?;
    let k = system.branch_count();
    let mut failures = 0usize;
    let mut check = |label: String, ok: bool| {
        println!("{} {label}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    let mut rng = Lcg(0x5eed);
    for level in 1..=level_max {
        let report = system.verify_block_identities(level)?;
        check(
            format!(
                "block identities N={level}: permutation={:.3e} theorem1={:.3e} theorem2={:.3e}",
                report.permutation_deviation,
                report.obverse_assembly_deviation,
                report.reverse_assembly_deviation
            ),
            report.max_deviation() < 1e-10,
        );

        for ordering in [Ordering::Obverse, Ordering::Reverse] {
            let plan = system.build_plan(level, ordering)?;
            let exact = plan.verify_diagonal_recurrence()?;
            check(
                format!("diagonal recurrence N={level} {ordering}: exact={exact}"),
                exact,
            );

            let v = rng.vec(plan.len());
            let mut counter = OpCounter::new();
            let round = plan.inverse(&plan.forward(&v, &mut counter)?, &mut counter)?;
            let dev = max_abs_diff_vec(&round, &v);
            let tol = 1e-8 * inf_norm(&v);
            check(
                format!("round trip N={level} {ordering}: deviation={dev:.3e}"),
                dev < tol,
            );

            if system.m1_class() == M1Class::Hadamard {
                let scale = (k as f64).powi(level as i32);
                let w = plan.forward(&v, &mut counter)?;
                let z = plan.adjoint(&w, &mut counter)?;
                let dev = z
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * scale).norm())
                    .fold(0.0f64, f64::max);
                let tol = 1e-8 * scale * inf_norm(&v);
                check(
                    format!("Hadamard identity N={level} {ordering}: deviation={dev:.3e}"),
                    dev < tol,
                );
            }
        }
    }

    if failures > 0 {
        return Err(Error::Verification(format!("{failures} check(s) failed")));
    }
    println!("verify: all checks passed up to N={level_max}");
    Ok(())
}

fn cmd_bench(flags: &Flags) -> Result<()> {
    let config = require_config(flags)?;
    let level_max = require_level(flags)?;
    let ordering = flags.ordering.unwrap_or(Ordering::Obverse);
    let system = load_system(&config)?;
    let k = system.branch_count() as u64;
    let p1 = 2 * k * k - k;

    println!("N,measured,bound,ratio,dense_ops");
    let mut rng = Lcg(0xbe7c);
    for level in 1..=level_max {
        let plan = system.build_plan(level, ordering)?;
        let v = rng.vec(plan.len());
        let mut counter = OpCounter::new();
        plan.forward(&v, &mut counter)?;
        let measured = counter.total();
        let bound = plan_op_count_bound(k, level, p1);
        let ratio = measured as f64 / (level as f64 * k.pow(level) as f64);
        let dense = dense_op_count(k, level);
        println!("{level},{measured},{bound},{ratio:.4},{dense}");
        if measured > bound {
            return Err(Error::Verification(format!(
                "measured count {measured} exceeds bound {bound} at N={level}"
            )));
        }
    }
    Ok(())
}

fn cmd_search(flags: &Flags) -> Result<()> {
    let config = require_config(flags)?;
    let spatial = config.spatial()?;
    if !spatial.is_contraction() {
        eprintln!(
            "warning: operator 2-norm of A is {:.6} >= 1; the spatial maps are not contractions",
            spatial.spectral_norm()
        );
    }
    let target = flags.target.unwrap_or(config.m1_class);
    let bound = flags.bound.unwrap_or(50);
    let report = search_frequencies(&spatial, target, bound)?;
    if !report.hypothesis_holds {
        eprintln!(
            "warning: some A(b_j - b_k) is an integer vector; \
             the coset construction carries no guarantee for this system"
        );
    }
    match report.translations {
        Some(c) => {
            let full = SystemConfig {
                dim: config.dim,
                k: config.k,
                a_inverse: config.a_inverse.clone(),
                b: config.b.clone(),
                c: Some(c),
                m1_class: target,
            };
            let json = full.to_json_pretty();
            println!("{json}");
            if let Some(out) = &flags.out {
                std::fs::write(out, format!("{json}\n"))?;
            }
            Ok(())
        }
        None => Err(Error::Verification(format!(
            "search exhausted bound {bound} without finding a {target} system \
             (not a proof that none exists)"
        ))),
    }
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "help" || args[0] == "--help" || args[0] == "-h" {
        print!("{USAGE}");
        return;
    }
    let command = args[0].clone();
    let run = || -> Result<()> {
        let flags = parse_flags(&args[1..])?;
        match command.as_str() {
            "points" => cmd_points(&flags),
            "forward" => cmd_transform(&flags, Direction::Forward),
            "inverse" => cmd_transform(&flags, Direction::Inverse),
            "verify" => cmd_verify(&flags),
            "bench" => cmd_bench(&flags),
            "search" => cmd_search(&flags),
            other => Err(Error::Validation(format!(
                "unknown command {other:?}; run `fractal-fft --help`"
            ))),
        }
    };
    if let Err(err) = run() {
        eprintln!("error: {err}");
        process::exit(err.exit_code());
    }
}
