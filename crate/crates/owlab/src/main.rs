use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use owlab::error::Error;
use owlab::filling::TilingMode;
use owlab::folner::FolnerKind;
use owlab::subadditive::Certificate;
use owlab::textio::{
    parse_h, parse_rational, parse_semigroup, parse_set, render_ratio, render_real, render_set,
    render_string,
};
use owlab::{
    alpha, boundary, builtin_folner, filling_theorem_run, folner_report, greedy_filling, interior,
    ow_certificate, ow_estimate, FillingPattern, TilingResult,
};

/// Boundary calculus, ε-filling patterns, quasi-tilings, and
/// Ornstein–Weiss convergence tables on concrete cancellative semigroups.
///
/// Grammars: semigroups are `zd:<d>`, `nat:<d>`, `heis`, `table:<path>`;
/// sets are `box:<lo>:<hi>` (half-open, comma-separated coordinates) or
/// `list:<path.json>`; rationals are `num/den`; set functions are
/// `card:<c>`, `invmax`, `sft:<full2|golden|hardsq|path>`,
/// `bernoulli:<p,...>`, `markov:<path>`, `cmd:<shell command>`.
/// `OWLAB_BUDGET` caps pattern-count work.
#[derive(Parser)]
#[command(name = "owlab", version)]
struct Cli {
    /// Write output here instead of standard output
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    /// Worker threads for row evaluation (accepted for interface
    /// stability; evaluation is currently sequential)
    #[arg(long, global = true, default_value_t = 1)]
    #[allow(dead_code)]
    jobs: usize,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct SetArgs {
    /// Semigroup: zd:<d> | nat:<d> | heis | table:<path>
    #[arg(long)]
    semigroup: String,
    /// The set A: box:<lo>:<hi> | list:<path>
    #[arg(long)]
    set: String,
    /// The test window K
    #[arg(long = "K")]
    k: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Interior, boundary and amenability constant of a set.
    /// JSON: {"interior":[...],"boundary":[...],"alpha":{"num":p,"den":q}}
    Boundary(SetArgs),
    /// Amenability constant only. JSON: {"alpha":{"num":p,"den":q}}
    Alpha(SetArgs),
    /// Følner diagnostics over chosen indices.
    /// CSV: n,card,alpha_num,alpha_den,max_defect_num,max_defect_den
    FolnerReport {
        #[arg(long)]
        semigroup: String,
        /// boxes | heis_boxes | shifted_boxes
        #[arg(long)]
        kind: String,
        #[arg(long = "K")]
        k: String,
        /// Comma-separated indices, e.g. 5,10,20,40
        #[arg(long)]
        indices: String,
    },
    /// Greedy (ε,K)-filling pattern for Ω. JSON FillingPattern
    Fill {
        #[arg(long)]
        semigroup: String,
        #[arg(long)]
        omega: String,
        #[arg(long = "K")]
        k: String,
        /// ε as an exact rational in (0,1], e.g. 1/2
        #[arg(long)]
        eps: String,
    },
    /// Iterated filling (quasi-tiling) of D by tiles K_1..K_n.
    /// JSON TilingResult with the |D_k| transcript
    Tile {
        #[arg(long)]
        semigroup: String,
        /// The set to tile
        #[arg(long = "D")]
        d: String,
        /// Tiles, repeat once per K_j (order K_1..K_n)
        #[arg(long = "K")]
        k: Vec<String>,
        #[arg(long)]
        eps: String,
        /// strict enforces n ≥ n₀(ε) and the α hypotheses
        #[arg(long, value_enum, default_value_t = ModeArg::BestEffort)]
        mode: ModeArg,
        /// Cross-check: expected number of tiles
        #[arg(long)]
        n: Option<usize>,
    },
    /// Ornstein–Weiss convergence table for h along a Følner sequence.
    /// CSV n,card,h,ratio, then a JSON summary line
    Ow {
        #[arg(long)]
        semigroup: String,
        /// boxes | heis_boxes | shifted_boxes
        #[arg(long)]
        folner: String,
        /// Set function: card:<c> | invmax | sft:<...> | bernoulli:<...> | markov:<path> | cmd:<command>
        #[arg(long)]
        h: String,
        #[arg(long)]
        max: u64,
        #[arg(long, default_value_t = 5)]
        window: usize,
    },
    /// Shorthand for `ow` with an SFT entropy h; the semigroup is the
    /// SFT's own lattice
    Entropy {
        /// full2 | golden | hardsq | <path.json>
        #[arg(long)]
        sft: String,
        #[arg(long, default_value = "boxes")]
        folner: String,
        #[arg(long)]
        max: u64,
        #[arg(long, default_value_t = 5)]
        window: usize,
    },
    /// Run a tiling, then evaluate the full certificate chain for
    /// h(D)/|D| ≤ (λ+ε)/(1−ε) + Mε. JSON certificate
    Certify {
        #[arg(long)]
        semigroup: String,
        #[arg(long = "D")]
        d: String,
        #[arg(long = "K")]
        k: Vec<String>,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        h: String,
        /// λ̂ from a prior `ow` run
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::BestEffort)]
        mode: ModeArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    BestEffort,
}

impl From<ModeArg> for TilingMode {
    fn from(m: ModeArg) -> TilingMode {
        match m {
            ModeArg::Strict => TilingMode::Strict,
            ModeArg::BestEffort => TilingMode::BestEffort,
        }
    }
}

fn budget() -> Result<u64, Error> {
    match std::env::var("OWLAB_BUDGET") {
        Ok(v) => v
            .parse()
            .map_err(|_| Error::Config(format!("OWLAB_BUDGET must be an integer, got `{v}`"))),
        Err(_) => Ok(owlab::dynamics::DEFAULT_BUDGET),
    }
}

fn render_filling(p: &FillingPattern, eps: &num_rational::BigRational) -> String {
    format!(
        "{{\"pattern\":{},\"tile\":{},\"omega_card\":{},\"coverage\":{},\"coverage_card\":{},\"omega_alpha\":{},\"eps\":{},\"coverage_bound_holds\":{}}}",
        render_set(&p.pattern),
        render_set(&p.tile),
        p.omega.len(),
        render_set(&p.coverage),
        p.coverage.len(),
        render_ratio(&p.omega_alpha),
        owlab::textio::render_rational(eps),
        p.coverage_bound_holds(),
    )
}

fn render_tiling(t: &TilingResult) -> String {
    let patterns: Vec<String> = t
        .patterns
        .iter()
        .enumerate()
        .map(|(j, p)| {
            format!(
                "{{\"tile_index\":{},\"pattern\":{},\"coverage_card\":{}}}",
                j + 1,
                render_set(&p.pattern),
                p.coverage.len()
            )
        })
        .collect();
    let transcript: Vec<String> = t.transcript.iter().map(u64::to_string).collect();
    let hypotheses: Vec<String> = t
        .hypothesis_report
        .iter()
        .map(|h| {
            format!(
                "{{\"description\":{},\"alpha\":{},\"bound\":{},\"ok\":{}}}",
                render_string(&h.description),
                render_ratio(&h.alpha),
                owlab::textio::render_rational(&h.bound),
                h.ok
            )
        })
        .collect();
    format!(
        "{{\"mode\":{},\"eps\":{},\"domain_card\":{},\"patterns\":[{}],\"residual\":{},\"residual_card\":{},\"transcript\":[{}],\"hypotheses\":[{}],\"residual_bound_holds\":{}}}",
        render_string(match t.mode {
            TilingMode::Strict => "strict",
            TilingMode::BestEffort => "best-effort",
        }),
        owlab::textio::render_rational(&t.eps),
        t.domain.len(),
        patterns.join(","),
        render_set(&t.residual),
        t.residual.len(),
        transcript.join(","),
        hypotheses.join(","),
        t.residual_bound_holds(),
    )
}

fn render_certificate(c: &Certificate) -> String {
    let links: Vec<String> = c
        .links
        .iter()
        .map(|l| {
            format!(
                "{{\"name\":{},\"lhs\":{},\"rhs\":{},\"pass\":{}}}",
                render_string(&l.name),
                render_real(l.lhs),
                render_real(l.rhs),
                l.pass
            )
        })
        .collect();
    format!(
        "{{\"links\":[{}],\"ratio\":{},\"final_bound\":{},\"pass\":{}}}",
        links.join(","),
        render_real(c.ratio),
        render_real(c.final_bound),
        c.pass
    )
}

fn run(cli: &Cli) -> Result<String, Error> {
    match &cli.command {
        Cmd::Boundary(args) => {
            let sg = parse_semigroup(&args.semigroup)?;
            let a = parse_set(&sg, &args.set)?;
            let k = parse_set(&sg, &args.k)?;
            let int = interior(&sg, &a, &k)?;
            let bnd = boundary(&sg, &a, &k)?;
            let al = alpha(&sg, &a, &k)?;
            Ok(format!(
                "{{\"interior\":{},\"boundary\":{},\"alpha\":{}}}\n",
                render_set(&int),
                render_set(&bnd),
                render_ratio(&al)
            ))
        }
        Cmd::Alpha(args) => {
            let sg = parse_semigroup(&args.semigroup)?;
            let a = parse_set(&sg, &args.set)?;
            let k = parse_set(&sg, &args.k)?;
            Ok(format!("{{\"alpha\":{}}}\n", render_ratio(&alpha(&sg, &a, &k)?)))
        }
        Cmd::FolnerReport {
            semigroup,
            kind,
            k,
            indices,
        } => {
            let sg = parse_semigroup(semigroup)?;
            let seq = builtin_folner(&sg, FolnerKind::parse(kind)?)?;
            let k = parse_set(&sg, k)?;
            let indices: Vec<u64> = indices
                .split(',')
                .map(|i| {
                    i.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad index `{i}` in --indices")))
                })
                .collect::<Result<_, _>>()?;
            let rows = folner_report(&seq, &k, &indices)?;
            let mut out = String::from("n,card,alpha_num,alpha_den,max_defect_num,max_defect_den\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.index, r.card, r.alpha.num, r.alpha.den, r.max_defect.num, r.max_defect.den
                ));
            }
            Ok(out)
        }
        Cmd::Fill {
            semigroup,
            omega,
            k,
            eps,
        } => {
            let sg = parse_semigroup(semigroup)?;
            let omega = parse_set(&sg, omega)?;
            let k = parse_set(&sg, k)?;
            let eps = parse_rational(eps)?;
            let p = greedy_filling(&sg, &omega, &k, &eps)?;
            Ok(format!("{}\n", render_filling(&p, &eps)))
        }
        Cmd::Tile {
            semigroup,
            d,
            k,
            eps,
            mode,
            n,
        } => {
            let sg = parse_semigroup(semigroup)?;
            let d = parse_set(&sg, d)?;
            let tiles: Vec<_> = k
                .iter()
                .map(|t| parse_set(&sg, t))
                .collect::<Result<_, _>>()?;
            if let Some(n) = n {
                if *n != tiles.len() {
                    return Err(Error::Config(format!(
                        "--n {n} does not match the {} tiles given via --K",
                        tiles.len()
                    )));
                }
            }
            let eps = parse_rational(eps)?;
            let t = filling_theorem_run(&sg, &d, &tiles, &eps, (*mode).into())?;
            Ok(format!("{}\n", render_tiling(&t)))
        }
        Cmd::Ow {
            semigroup,
            folner,
            h,
            max,
            window,
        } => {
            let sg = parse_semigroup(semigroup)?;
            let seq = builtin_folner(&sg, FolnerKind::parse(folner)?)?;
            let h = parse_h(h, budget()?)?;
            ow_table(&h, &seq, *max, *window)
        }
        Cmd::Entropy {
            sft,
            folner,
            max,
            window,
        } => {
            let h = parse_h(&format!("sft:{sft}"), budget()?)?;
            // the h name carries no dimension, so recover it from the spec
            let dim = match sft.as_str() {
                "full2" | "golden" => 1,
                "hardsq" => 2,
                _ => {
                    return Err(Error::Config(
                        "entropy with a custom SFT file: use `ow --h sft:<path>` with an explicit --semigroup".into(),
                    ))
                }
            };
            let sg = owlab::Semigroup::int_lattice(dim)?;
            let seq = builtin_folner(&sg, FolnerKind::parse(folner)?)?;
            ow_table(&h, &seq, *max, *window)
        }
        Cmd::Certify {
            semigroup,
            d,
            k,
            eps,
            h,
            lambda,
            mode,
        } => {
            let sg = parse_semigroup(semigroup)?;
            let d = parse_set(&sg, d)?;
            let tiles: Vec<_> = k
                .iter()
                .map(|t| parse_set(&sg, t))
                .collect::<Result<_, _>>()?;
            let eps = parse_rational(eps)?;
            let h = parse_h(h, budget()?)?;
            let tiling = filling_theorem_run(&sg, &d, &tiles, &eps, (*mode).into())?;
            let cert = ow_certificate(&h, &tiling, *lambda, &eps)?;
            Ok(format!("{}\n", render_certificate(&cert)))
        }
    }
}

fn ow_table(
    h: &owlab::SetFunction,
    seq: &owlab::FolnerSequence,
    max: u64,
    window: usize,
) -> Result<String, Error> {
    let est = ow_estimate(h, seq, max, window)?;
    let mut out = String::from("n,card,h,ratio\n");
    for r in &est.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.index,
            r.card,
            render_real(r.value),
            render_real(r.ratio)
        ));
    }
    let warnings: Vec<String> = est.warnings.iter().map(|w| render_string(w)).collect();
    out.push_str(&format!(
        "{{\"lambda_hat\":{},\"cauchy_gap\":{},\"window\":{},\"warnings\":[{}]}}\n",
        render_real(est.lambda_hat),
        render_real(est.cauchy_gap),
        est.window,
        warnings.join(",")
    ));
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are successes, not config errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(text) => {
            let ok = match &cli.output {
                Some(path) => std::fs::write(path, &text).map_err(Error::from),
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(Error::from),
            };
            if let Err(e) = ok {
                eprintln!("owlab: {e}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("owlab: {e}");
            let code = match e {
                Error::Config(_) | Error::Io(_) | Error::Json(_) => 1,
                Error::Resource { .. } => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
