//! Command-line front-end: config ingestion and deterministic table and
//! report emission for the subshift/Gibbs toolkit.

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gibbsworks::config::{parse_potential, parse_space, parse_spec, LoadedPotential, LoadedSpec};
use gibbsworks::entropy::{
    block_entropy_rates, chain_rule_residual, conditional_entropy, entropy, is_finer,
};
use gibbsworks::equilibrium1d::{equilibrium_markov_from, PairEnergy, TransferMatrix};
use gibbsworks::gibbs::{
    cocycle, cocycle_bound, cocycle_tail, consistency_residual, dlr_residual, kernel,
    kernel_distance, kernel_from_interaction, kernel_truncated, CylinderMeasure, KernelTable,
};
use gibbsworks::homoclinic::{
    decompose_block_automorphism, default_collar_depth, orbit_decompose, CompatibilityClassing,
    FinitePermutation,
};
use gibbsworks::lattice::{ball, LatticeBox};
use gibbsworks::potentials::{sv_norm, variation, variation_profile};
use gibbsworks::shiftspace::{
    Alphabet, FramedConfiguration, Pattern, PeriodicBackground, SubshiftSpec,
};
use gibbsworks::Error as CoreError;
use serde_json::json;
use std::fmt::Write as _;

#[derive(Parser)]
#[command(
    name = "gibbsworks",
    version,
    about = "Finite-volume toolkit for Gibbs measures on subshifts"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Enumeration cap (defaults to the GIBBSWORKS_CAP environment
    /// variable, then 2^20).
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct SpecArg {
    /// Path to the subshift spec config.
    #[arg(long)]
    spec: std::path::PathBuf,
}

#[derive(Args)]
struct PotentialArg {
    /// Path to the potential config.
    #[arg(long)]
    potential: std::path::PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// List the admissible patterns on a volume.
    Patterns {
        #[command(flatten)]
        spec: SpecArg,
        /// Volume as per-axis ranges, e.g. "0..2" or "-1..1,0..1".
        #[arg(long, allow_hyphen_values = true)]
        volume: String,
    },
    /// Variation sequence and summable-variation norm of a potential.
    Variation {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        potential: PotentialArg,
        /// Largest radius to report.
        #[arg(long, default_value_t = 4)]
        n_max: u64,
    },
    /// Lattice-summed energy difference between two configurations.
    Cocycle {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        potential: PotentialArg,
        /// First configuration as PATTERN@BOX over the background.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Second configuration as PATTERN@BOX over the background.
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Specification kernel table on a volume.
    Kernel {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, allow_hyphen_values = true)]
        volume: String,
        /// Boundary condition as PATTERN@BOX glued over the background.
        #[arg(long, allow_hyphen_values = true)]
        boundary: Option<String>,
        /// Use the interaction (Boltzmann) form instead of the site form.
        #[arg(long)]
        interaction: bool,
        /// Also evaluate the truncated energy sum at this radius and
        /// verify it against the closed form within the tail bound.
        #[arg(long)]
        limit_check: Option<u64>,
    },
    /// Kernel consistency residual on nested volumes.
    Consistency {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, allow_hyphen_values = true)]
        volume: String,
        #[arg(long, allow_hyphen_values = true)]
        outer: String,
        #[arg(long, allow_hyphen_values = true)]
        boundary: Option<String>,
        /// Failure threshold for the residual.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// DLR residual of a cylinder measure against the kernel.
    DlrCheck {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, allow_hyphen_values = true)]
        volume: String,
        #[arg(long, allow_hyphen_values = true)]
        outer: String,
        /// Measure: "bernoulli:w0,w1,...", "equilibrium", or "gibbs:BOX".
        #[arg(long, allow_hyphen_values = true)]
        measure: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Entropy of partitions on a weighted space, or block entropy rates
    /// of a measure.
    Entropy {
        /// Weighted-space config (outcomes, weights, partitions).
        #[arg(long)]
        space: Option<std::path::PathBuf>,
        #[arg(long)]
        spec: Option<std::path::PathBuf>,
        /// Measure for block rates: "bernoulli:w0,w1,..." or
        /// "equilibrium" (needs --potential).
        #[arg(long)]
        measure: Option<String>,
        #[arg(long)]
        potential: Option<std::path::PathBuf>,
        #[arg(long, default_value_t = 5)]
        n_max: u64,
        /// Report in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Pressure of a 1D spec and pair potential via the Perron eigenvalue.
    Pressure {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        potential: PotentialArg,
    },
    /// Equilibrium Markov measure of a 1D spec and pair potential.
    Equilibrium {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        potential: PotentialArg,
    },
    /// Decompose a permutation into transpositions, or a block
    /// automorphism into swap involutions when a spec and radius are
    /// given.
    Decompose {
        /// Permutation as a comma-separated image list, e.g. "1,0,2".
        #[arg(long)]
        images: Option<String>,
        /// Permutation in cycle notation, e.g. "(0 1 2)(3 4)"; needs --n.
        #[arg(long)]
        cycles: Option<String>,
        /// Domain size for cycle notation.
        #[arg(long)]
        n: Option<usize>,
        /// Interpret the permutation as acting on the admissible patterns
        /// of the closed ball of --radius under this spec.
        #[arg(long)]
        spec: Option<std::path::PathBuf>,
        #[arg(long)]
        radius: Option<u64>,
    },
    /// Compatibility classes of the admissible patterns on a closed ball.
    Compat {
        #[command(flatten)]
        spec: SpecArg,
        /// Ball radius N (the region is all sites with sup-norm <= N).
        #[arg(long)]
        radius: u64,
        /// Collar depth override (defaults to the rule window span).
        #[arg(long)]
        depth: Option<u64>,
    },
}

/// 15 significant digits, deterministic across runs.
fn fmt_f64(v: f64) -> String {
    format!("{v:.14e}")
}

fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::Parse(_)) => 2,
        Some(CoreError::CapExceeded { .. }) => 3,
        Some(CoreError::EmptySubshift) => 4,
        Some(
            CoreError::DimensionMismatch { .. }
            | CoreError::WindowTooWide(_)
            | CoreError::BoundaryTooThin(_)
            | CoreError::IncompatiblePatterns
            | CoreError::ClassBreaking(_)
            | CoreError::ReducibleMatrix
            | CoreError::OverlappingDomains(_)
            | CoreError::BackgroundMismatch,
        ) => 5,
        _ => 1,
    }
}

fn main() {
    let cli = Cli::parse();
    let cap = cli.cap.unwrap_or_else(|| {
        std::env::var("GIBBSWORKS_CAP")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(gibbsworks::DEFAULT_CAP)
    });
    match run(cli, cap) {
        Ok(report) => {
            print!("{report}");
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(exit_code(&err));
        }
    }
}

fn load_spec(path: &std::path::Path) -> anyhow::Result<LoadedSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading spec {}", path.display()))?;
    Ok(parse_spec(&text)?)
}

fn load_potential(path: &std::path::Path, spec: &SubshiftSpec) -> anyhow::Result<LoadedPotential> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading potential {}", path.display()))?;
    Ok(parse_potential(&text, spec)?)
}

/// Background from the spec file, defaulting to the constant first-symbol
/// configuration (validated against the rule).
fn resolve_background(loaded: &LoadedSpec) -> anyhow::Result<PeriodicBackground> {
    if let Some(bg) = &loaded.background {
        return Ok(bg.clone());
    }
    let bg = PeriodicBackground::uniform(loaded.spec.dimension(), 0);
    bg.validate(&loaded.spec).map_err(|_| {
        anyhow!(CoreError::Invalid(
            "no background in the spec file and the all-first-symbol default is inadmissible"
                .into()
        ))
    })?;
    Ok(bg)
}

/// "a..b" per axis joined by commas.
fn parse_box(text: &str, dimension: usize) -> anyhow::Result<LatticeBox> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != dimension {
        bail!(CoreError::Parse(format!(
            "volume {text:?} has {} axes, spec has dimension {dimension}",
            parts.len()
        )));
    }
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in parts {
        let (a, b) = part
            .split_once("..")
            .ok_or_else(|| CoreError::Parse(format!("range {part:?} is not of the form a..b")))?;
        lo.push(
            a.trim()
                .parse::<i64>()
                .map_err(|e| CoreError::Parse(format!("bad range start {a:?}: {e}")))?,
        );
        hi.push(
            b.trim()
                .parse::<i64>()
                .map_err(|e| CoreError::Parse(format!("bad range end {b:?}: {e}")))?,
        );
    }
    Ok(LatticeBox::rect(&lo, &hi)?)
}

fn parse_symbols(text: &str, alphabet: &Alphabet) -> anyhow::Result<Vec<usize>> {
    let single = alphabet.symbols().iter().all(|s| s.chars().count() == 1);
    let names: Vec<String> = if text.contains(';') {
        text.split(';').map(|s| s.trim().to_string()).collect()
    } else if alphabet.index_of(text).is_some() {
        vec![text.to_string()]
    } else if single {
        text.chars().map(|c| c.to_string()).collect()
    } else {
        return Err(anyhow!(CoreError::Parse(
            "multi-character symbols must be separated by ';'".into()
        )));
    };
    names
        .iter()
        .map(|n| {
            alphabet
                .index_of(n)
                .ok_or_else(|| anyhow!(CoreError::Parse(format!("unknown symbol {n:?}"))))
        })
        .collect()
}

/// "PATTERN@BOX": symbol string over a box in lexicographic point order.
fn parse_pattern_at(text: &str, spec: &SubshiftSpec) -> anyhow::Result<Pattern> {
    let (vals, bx) = text
        .split_once('@')
        .ok_or_else(|| CoreError::Parse(format!("{text:?} is not of the form PATTERN@BOX")))?;
    let domain = parse_box(bx, spec.dimension())?;
    let values = parse_symbols(vals, spec.alphabet())?;
    if values.len() != domain.len() {
        bail!(CoreError::Parse(format!(
            "pattern {vals:?} has {} symbols for a {}-site box",
            values.len(),
            domain.len()
        )));
    }
    Ok(Pattern::new(domain, values)?)
}

fn framed(
    pattern: Option<&str>,
    spec: &SubshiftSpec,
    background: &PeriodicBackground,
) -> anyhow::Result<FramedConfiguration> {
    let x = match pattern {
        None => FramedConfiguration::background_only(background.clone()),
        Some(text) => {
            let p = parse_pattern_at(text, spec)?;
            FramedConfiguration::new(p, background.clone())?
        }
    };
    if !spec.is_point(&x) {
        bail!(CoreError::Inadmissible(
            "configuration is not a point of the subshift".into()
        ));
    }
    Ok(x)
}

fn pair_energy(potential: &LoadedPotential) -> anyhow::Result<PairEnergy> {
    if let Some((j, h)) = potential.ising_params {
        return Ok(PairEnergy::ising(j, h));
    }
    Ok(PairEnergy::from_local(&potential.local)?)
}

fn parse_measure(
    text: &str,
    spec: &SubshiftSpec,
    potential: Option<&LoadedPotential>,
    background: &PeriodicBackground,
    cap: u64,
) -> anyhow::Result<CylinderMeasure> {
    if let Some(rest) = text.strip_prefix("bernoulli:") {
        let weights = rest
            .split(',')
            .map(|w| {
                w.trim()
                    .parse::<f64>()
                    .map_err(|e| anyhow!(CoreError::Parse(format!("bad weight {w:?}: {e}"))))
            })
            .collect::<anyhow::Result<Vec<f64>>>()?;
        if weights.len() != spec.alphabet().len() {
            bail!(CoreError::Parse(format!(
                "{} weights for a {}-symbol alphabet",
                weights.len(),
                spec.alphabet().len()
            )));
        }
        return Ok(CylinderMeasure::bernoulli(weights)?);
    }
    if text == "equilibrium" {
        let potential = potential.ok_or_else(|| {
            anyhow!(CoreError::Parse(
                "the equilibrium measure needs --potential".into()
            ))
        })?;
        let matrix = TransferMatrix::new(spec, &pair_energy(potential)?)?;
        let perron = matrix.perron()?;
        return Ok(CylinderMeasure::Markov1d(equilibrium_markov_from(
            &matrix, &perron,
        )?));
    }
    if let Some(rest) = text.strip_prefix("gibbs:") {
        let potential = potential.ok_or_else(|| {
            anyhow!(CoreError::Parse(
                "the finite-volume Gibbs measure needs --potential".into()
            ))
        })?;
        let volume = parse_box(rest, spec.dimension())?;
        let boundary = FramedConfiguration::background_only(background.clone());
        let table = kernel(&potential.local, spec, &volume, &boundary, cap)?;
        return Ok(CylinderMeasure::FiniteVolumeGibbs(table));
    }
    bail!(CoreError::Parse(format!(
        "unknown measure {text:?}; use bernoulli:..., equilibrium, or gibbs:BOX"
    )))
}

fn kernel_report(table: &KernelTable, alphabet: &Alphabet, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => {
            let _ = writeln!(out, "volume sites: {}", table.volume().len());
            let _ = writeln!(out, "log partition: {}", fmt_f64(table.log_partition()));
            for e in table.entries() {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}",
                    e.pattern.display(alphabet),
                    fmt_f64(e.score - table.log_partition()),
                    fmt_f64(e.prob)
                );
            }
        }
        Format::Json => {
            for e in table.entries() {
                let _ = writeln!(
                    out,
                    "{}",
                    json!({
                        "pattern": e.pattern.display(alphabet),
                        "log_weight": e.score - table.log_partition(),
                        "prob": e.prob,
                    })
                );
            }
        }
    }
    out
}

fn run(cli: Cli, cap: u64) -> anyhow::Result<String> {
    let format = cli.format;
    let mut out = String::new();
    match cli.command {
        Command::Patterns { spec, volume } => {
            let loaded = load_spec(&spec.spec)?;
            let region = parse_box(&volume, loaded.spec.dimension())?;
            let patterns = loaded.spec.enumerate_patterns(&region, cap)?;
            for p in &patterns {
                match format {
                    Format::Text => {
                        let _ = writeln!(out, "{}", p.display(loaded.spec.alphabet()));
                    }
                    Format::Json => {
                        let _ = writeln!(
                            out,
                            "{}",
                            json!({ "pattern": p.display(loaded.spec.alphabet()) })
                        );
                    }
                }
            }
            if format == Format::Text {
                let _ = writeln!(out, "count: {}", patterns.len());
            }
        }
        Command::Variation {
            spec,
            potential,
            n_max,
        } => {
            let loaded = load_spec(&spec.spec)?;
            let pot = load_potential(&potential.potential, &loaded.spec)?;
            let norm = sv_norm(&pot.local, &loaded.spec, cap)?;
            let profile = variation_profile(&pot.local, &loaded.spec, cap)?;
            for n in 1..=n_max {
                let v = variation(&pot.local, n, &loaded.spec, cap)?;
                match format {
                    Format::Text => {
                        let _ = writeln!(out, "{n}\t{}", fmt_f64(v));
                    }
                    Format::Json => {
                        let _ = writeln!(out, "{}", json!({ "n": n, "variation": v }));
                    }
                }
            }
            match format {
                Format::Text => {
                    let _ = writeln!(out, "sup_norm: {}", fmt_f64(profile.sup_norm));
                    let _ = writeln!(out, "sv_norm: {}", fmt_f64(norm));
                }
                Format::Json => {
                    let _ = writeln!(
                        out,
                        "{}",
                        json!({ "sup_norm": profile.sup_norm, "sv_norm": norm })
                    );
                }
            }
        }
        Command::Cocycle {
            spec,
            potential,
            x,
            y,
        } => {
            let loaded = load_spec(&spec.spec)?;
            let background = resolve_background(&loaded)?;
            let pot = load_potential(&potential.potential, &loaded.spec)?;
            let cx = framed(Some(&x), &loaded.spec, &background)?;
            let cy = framed(Some(&y), &loaded.spec, &background)?;
            let v = cocycle(&pot.local, &cx, &cy)?;
            // certified bound from the agreement radius of the pair
            let m = cx
                .differing_sites(&cy)?
                .iter()
                .map(|p| p.sup_norm())
                .max()
                .map(|r| r + 1)
                .unwrap_or(0);
            let profile = variation_profile(&pot.local, &loaded.spec, cap)?;
            let bound = cocycle_bound(&profile, m);
            match format {
                Format::Text => {
                    let _ = writeln!(out, "cocycle: {}", fmt_f64(v));
                    let _ = writeln!(out, "bound: {}", fmt_f64(bound));
                }
                Format::Json => {
                    let _ = writeln!(out, "{}", json!({ "cocycle": v, "bound": bound }));
                }
            }
        }
        Command::Kernel {
            spec,
            potential,
            volume,
            boundary,
            interaction,
            limit_check,
        } => {
            let loaded = load_spec(&spec.spec)?;
            let background = resolve_background(&loaded)?;
            let pot = load_potential(&potential.potential, &loaded.spec)?;
            let region = parse_box(&volume, loaded.spec.dimension())?;
            let x = framed(boundary.as_deref(), &loaded.spec, &background)?;
            let table = if interaction {
                let phi = pot.interaction.as_ref().ok_or_else(|| {
                    anyhow!(CoreError::Invalid(
                        "--interaction needs an ising or interaction potential".into()
                    ))
                })?;
                kernel_from_interaction(phi, &loaded.spec, &region, &x, cap)?
            } else {
                kernel(&pot.local, &loaded.spec, &region, &x, cap)?
            };
            out.push_str(&kernel_report(&table, loaded.spec.alphabet(), format));
            if let Some(n) = limit_check {
                let truncated = kernel_truncated(&pot.local, &loaded.spec, &region, &x, n, cap)?;
                let diff = kernel_distance(&table, &truncated);
                let profile = variation_profile(&pot.local, &loaded.spec, cap)?;
                let m = region.radius() + 1;
                let eps = if n > m {
                    cocycle_tail(&profile, m, n - m + 1)
                } else {
                    cocycle_bound(&profile, m)
                };
                let allowed = (2.0 * eps).exp_m1() + 1e-12;
                let ok = diff <= allowed;
                match format {
                    Format::Text => {
                        let _ = writeln!(
                            out,
                            "limit-check n={n}: diff {} tail-bound {} {}",
                            fmt_f64(diff),
                            fmt_f64(allowed),
                            if ok { "PASS" } else { "FAIL" }
                        );
                    }
                    Format::Json => {
                        let _ = writeln!(
                            out,
                            "{}",
                            json!({ "limit_check_n": n, "diff": diff, "allowed": allowed, "pass": ok })
                        );
                    }
                }
                if !ok {
                    bail!(CoreError::Invalid(format!(
                        "limit check failed: diff {diff} exceeds {allowed}"
                    )));
                }
            }
        }
        Command::Consistency {
            spec,
            potential,
            volume,
            outer,
            boundary,
            tol,
        } => {
            let loaded = load_spec(&spec.spec)?;
            let background = resolve_background(&loaded)?;
            let pot = load_potential(&potential.potential, &loaded.spec)?;
            let inner = parse_box(&volume, loaded.spec.dimension())?;
            let outer = parse_box(&outer, loaded.spec.dimension())?;
            let x = framed(boundary.as_deref(), &loaded.spec, &background)?;
            let r = consistency_residual(&pot.local, &loaded.spec, &inner, &outer, &x, cap)?;
            let ok = r <= tol;
            match format {
                Format::Text => {
                    let _ = writeln!(
                        out,
                        "consistency residual: {} tol {} {}",
                        fmt_f64(r),
                        fmt_f64(tol),
                        if ok { "PASS" } else { "FAIL" }
                    );
                }
                Format::Json => {
                    let _ = writeln!(out, "{}", json!({ "residual": r, "tol": tol, "pass": ok }));
                }
            }
            if !ok {
                bail!(CoreError::Invalid(format!(
                    "consistency residual {r} exceeds {tol}"
                )));
            }
        }
        Command::DlrCheck {
            spec,
            potential,
            volume,
            outer,
            measure,
            tol,
        } => {
            let loaded = load_spec(&spec.spec)?;
            let background = resolve_background(&loaded)?;
            let pot = load_potential(&potential.potential, &loaded.spec)?;
            let inner = parse_box(&volume, loaded.spec.dimension())?;
            let outer = parse_box(&outer, loaded.spec.dimension())?;
            let mu = parse_measure(&measure, &loaded.spec, Some(&pot), &background, cap)?;
            let report = dlr_residual(
                &mu,
                &pot.local,
                &loaded.spec,
                &inner,
                &outer,
                &background,
                cap,
            )?;
            let ok = report.max_residual <= tol;
            let argmax = report
                .argmax_boundary
                .as_ref()
                .zip(report.argmax_interior.as_ref())
                .map(|(b, i)| {
                    format!(
                        "{}|{}",
                        i.display(loaded.spec.alphabet()),
                        b.display(loaded.spec.alphabet())
                    )
                })
                .unwrap_or_else(|| "-".into());
            match format {
                Format::Text => {
                    let _ = writeln!(
                        out,
                        "dlr residual: {} argmax {} skipped {} checked {} {}",
                        fmt_f64(report.max_residual),
                        argmax,
                        report.skipped_boundaries,
                        report.checked_boundaries,
                        if ok { "PASS" } else { "FAIL" }
                    );
                }
                Format::Json => {
                    let _ = writeln!(
                        out,
                        "{}",
                        json!({
                            "residual": report.max_residual,
                            "argmax": argmax,
                            "skipped": report.skipped_boundaries,
                            "checked": report.checked_boundaries,
                            "pass": ok,
                        })
                    );
                }
            }
            if !ok {
                bail!(CoreError::Invalid(format!(
                    "dlr residual {} exceeds {tol}",
                    report.max_residual
                )));
            }
        }
        Command::Entropy {
            space,
            spec,
            measure,
            potential,
            n_max,
            bits,
        } => {
            let scale = if bits { 1.0 / 2.0f64.ln() } else { 1.0 };
            match (space, spec, measure) {
                (Some(path), None, None) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading space {}", path.display()))?;
                    let loaded = parse_space(&text)?;
                    for (name, alpha) in &loaded.partitions {
                        let h = entropy(&loaded.space, alpha)? * scale;
                        match format {
                            Format::Text => {
                                let _ = writeln!(out, "H({name}) = {}", fmt_f64(h));
                            }
                            Format::Json => {
                                let _ = writeln!(
                                    out,
                                    "{}",
                                    json!({ "partition": name, "entropy": h })
                                );
                            }
                        }
                    }
                    for (na, alpha) in &loaded.partitions {
                        for (nb, beta) in &loaded.partitions {
                            if na == nb {
                                continue;
                            }
                            let h = conditional_entropy(&loaded.space, alpha, beta)? * scale;
                            let chain = chain_rule_residual(&loaded.space, alpha, beta)?;
                            let finer = is_finer(&loaded.space, beta, alpha)?;
                            match format {
                                Format::Text => {
                                    let _ = writeln!(
                                        out,
                                        "H({na}|{nb}) = {} chain-residual {} finer {}",
                                        fmt_f64(h),
                                        fmt_f64(chain),
                                        finer
                                    );
                                }
                                Format::Json => {
                                    let _ = writeln!(
                                        out,
                                        "{}",
                                        json!({
                                            "alpha": na,
                                            "beta": nb,
                                            "conditional_entropy": h,
                                            "chain_residual": chain,
                                            "finer": finer,
                                        })
                                    );
                                }
                            }
                        }
                    }
                }
                (None, Some(spec_path), Some(measure)) => {
                    let loaded = load_spec(&spec_path)?;
                    let background = resolve_background(&loaded)?;
                    let pot = match &potential {
                        Some(p) => Some(load_potential(p, &loaded.spec)?),
                        None => None,
                    };
                    let mu = parse_measure(&measure, &loaded.spec, pot.as_ref(), &background, cap)?;
                    let rates = block_entropy_rates(&mu, &loaded.spec, n_max, cap)?;
                    for (i, r) in rates.iter().enumerate() {
                        let n = i + 1;
                        let v = r * scale;
                        match format {
                            Format::Text => {
                                let _ = writeln!(out, "{n}\t{}", fmt_f64(v));
                            }
                            Format::Json => {
                                let _ = writeln!(out, "{}", json!({ "n": n, "rate": v }));
                            }
                        }
                    }
                    // the sequence is nonincreasing toward the limit; the
                    // running minimum is the certified upper bound
                    let min = rates.iter().cloned().fold(f64::INFINITY, f64::min) * scale;
                    match format {
                        Format::Text => {
                            let _ = writeln!(out, "upper-bound: {}", fmt_f64(min));
                        }
                        Format::Json => {
                            let _ = writeln!(out, "{}", json!({ "upper_bound": min }));
                        }
                    }
                }
                _ => bail!(CoreError::Parse(
                    "use either --space FILE or --spec FILE --measure M".into()
                )),
            }
        }
        Command::Pressure { spec, potential } => {
            let loaded = load_spec(&spec.spec)?;
            let pot = load_potential(&potential.potential, &loaded.spec)?;
            let matrix = TransferMatrix::new(&loaded.spec, &pair_energy(&pot)?)?;
            let perron = matrix.perron()?;
            match format {
                Format::Text => {
                    let _ = writeln!(out, "lambda: {}", fmt_f64(perron.log_lambda.exp()));
                    let _ = writeln!(out, "log_lambda: {}", fmt_f64(perron.log_lambda));
                    let _ = writeln!(out, "iterations: {}", perron.iterations);
                }
                Format::Json => {
                    let _ = writeln!(
                        out,
                        "{}",
                        json!({
                            "lambda": perron.log_lambda.exp(),
                            "log_lambda": perron.log_lambda,
                            "iterations": perron.iterations,
                        })
                    );
                }
            }
        }
        Command::Equilibrium { spec, potential } => {
            let loaded = load_spec(&spec.spec)?;
            let pot = load_potential(&potential.potential, &loaded.spec)?;
            let g = pair_energy(&pot)?;
            let matrix = TransferMatrix::new(&loaded.spec, &g)?;
            let perron = matrix.perron()?;
            let mu = equilibrium_markov_from(&matrix, &perron)?;
            let gap = gibbsworks::equilibrium1d::variational_gap(&mu, &g, perron.log_lambda);
            match format {
                Format::Text => {
                    let _ = writeln!(out, "log_lambda: {}", fmt_f64(perron.log_lambda));
                    let pi: Vec<String> = mu.initial().iter().map(|&p| fmt_f64(p)).collect();
                    let _ = writeln!(out, "pi: {}", pi.join(" "));
                    for (a, row) in mu.rows().iter().enumerate() {
                        let r: Vec<String> = row.iter().map(|&p| fmt_f64(p)).collect();
                        let _ = writeln!(
                            out,
                            "P[{}]: {}",
                            loaded.spec.alphabet().symbol(a),
                            r.join(" ")
                        );
                    }
                    let _ = writeln!(out, "gap: {}", fmt_f64(gap));
                }
                Format::Json => {
                    let _ = writeln!(
                        out,
                        "{}",
                        json!({
                            "log_lambda": perron.log_lambda,
                            "pi": mu.initial(),
                            "rows": mu.rows(),
                            "gap": gap,
                        })
                    );
                }
            }
        }
        Command::Decompose {
            images,
            cycles,
            n,
            spec,
            radius,
        } => {
            let pi = match (&images, &cycles) {
                (Some(list), None) => {
                    let image = list
                        .split(',')
                        .map(|v| {
                            v.trim().parse::<usize>().map_err(|e| {
                                anyhow!(CoreError::Parse(format!("bad index {v:?}: {e}")))
                            })
                        })
                        .collect::<anyhow::Result<Vec<usize>>>()?;
                    FinitePermutation::from_image(image)?
                }
                (None, Some(text)) => {
                    let n = n.ok_or_else(|| {
                        anyhow!(CoreError::Parse("cycle notation needs --n".into()))
                    })?;
                    let cycles = parse_cycles(text)?;
                    FinitePermutation::from_cycles(n, &cycles)?
                }
                _ => bail!(CoreError::Parse(
                    "give exactly one of --images or --cycles".into()
                )),
            };
            match (&spec, radius) {
                (Some(spec_path), Some(r)) => {
                    let loaded = load_spec(spec_path)?;
                    let depth = default_collar_depth(&loaded.spec);
                    let region = ball(r, loaded.spec.dimension());
                    let classing = CompatibilityClassing::new(&loaded.spec, &region, depth, cap)?;
                    let gens = decompose_block_automorphism(&pi, &classing)?;
                    for g in &gens {
                        let (a, b) = g.pair();
                        match format {
                            Format::Text => {
                                let _ = writeln!(
                                    out,
                                    "({}, {})",
                                    a.display(loaded.spec.alphabet()),
                                    b.display(loaded.spec.alphabet())
                                );
                            }
                            Format::Json => {
                                let _ = writeln!(
                                    out,
                                    "{}",
                                    json!({
                                        "a": a.display(loaded.spec.alphabet()),
                                        "b": b.display(loaded.spec.alphabet()),
                                    })
                                );
                            }
                        }
                    }
                    if format == Format::Text {
                        let _ = writeln!(out, "involutions: {}", gens.len());
                    }
                }
                (None, None) => {
                    let ts = orbit_decompose(&pi);
                    for t in &ts {
                        match format {
                            Format::Text => {
                                let _ = writeln!(out, "({}, {})", t.rep, t.other);
                            }
                            Format::Json => {
                                let _ = writeln!(out, "{}", json!({ "a": t.rep, "b": t.other }));
                            }
                        }
                    }
                    if format == Format::Text {
                        let _ = writeln!(out, "transpositions: {}", ts.len());
                    }
                }
                _ => bail!(CoreError::Parse("--spec and --radius go together".into())),
            }
        }
        Command::Compat { spec, radius, depth } => {
            let loaded = load_spec(&spec.spec)?;
            let depth = depth.unwrap_or_else(|| default_collar_depth(&loaded.spec));
            let region = ball(radius, loaded.spec.dimension());
            let classing = CompatibilityClassing::new(&loaded.spec, &region, depth, cap)?;
            for (c, members) in classing.classes().iter().enumerate() {
                let names: Vec<String> = members
                    .iter()
                    .map(|&i| classing.patterns()[i].display(loaded.spec.alphabet()))
                    .collect();
                match format {
                    Format::Text => {
                        let _ = writeln!(out, "class {c}: {}", names.join(" "));
                    }
                    Format::Json => {
                        let _ = writeln!(out, "{}", json!({ "class": c, "patterns": names }));
                    }
                }
            }
            if format == Format::Text {
                let _ = writeln!(
                    out,
                    "patterns: {} classes: {} class-preserving permutations: {}",
                    classing.patterns().len(),
                    classing.classes().len(),
                    classing.class_preserving_count()
                );
            }
        }
    }
    Ok(out)
}

fn parse_cycles(text: &str) -> anyhow::Result<Vec<Vec<usize>>> {
    let mut cycles = Vec::new();
    for chunk in text.split(')') {
        let chunk = chunk.trim().trim_start_matches('(').trim();
        if chunk.is_empty() {
            continue;
        }
        let cycle = chunk
            .split_whitespace()
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|e| anyhow!(CoreError::Parse(format!("bad cycle element {v:?}: {e}"))))
            })
            .collect::<anyhow::Result<Vec<usize>>>()?;
        cycles.push(cycle);
    }
    Ok(cycles)
}
