//! Batch front door for the workbench: parse models and instances, run
//! transforms, decompositions, and theorem suites, emit reports.
//!
//! Exit codes: 0 all pass, 1 any failed check, 2 configuration error,
//! 3 budget exhausted (bound-only rows present).

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tmlab_core::certs;
use tmlab_core::classify::classify;
use tmlab_core::decomp::{decompose_proper, decompose_signed};
use tmlab_core::error::Error as CoreError;
use tmlab_core::instances::{enumerate_dtms, parse_instance, parse_setfn_file, Instance};
use tmlab_core::report::{exit_code, to_csv, ReportRow};
use tmlab_core::search::{packing_search, tilde_search, PackingOutcome};
use tmlab_core::setfn::{CompactSource, SearchParams, SetFunction};
use tmlab_core::space::{grid_axiom_check, DyadicGrid, FiniteLattice, Model, ModelKind};
use tmlab_core::suites::{convergence, convergence_csv, run_check, RunConfig, SUITE_NAMES};
use tmlab_core::transforms::radon_part;
use tmlab_core::value::ExtValue;

#[derive(Parser)]
#[command(name = "tmlab", about = "exact workbench for topological-measure decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// `grid:<k>` or a path to a lattice/grid spec file
    #[arg(long)]
    model: String,
    /// deterministic seed for sampled checks
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// search/sampling budget (nodes, probes); default from TMLAB_BUDGET
    #[arg(long)]
    budget: Option<u64>,
}

impl Common {
    fn budget(&self) -> u64 {
        self.budget
            .or_else(|| {
                std::env::var("TMLAB_BUDGET")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(20_000)
    }

    fn params(&self) -> SearchParams {
        SearchParams {
            exact_cells: 16,
            budget: self.budget(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Structural validation of a model (lattice closure, normality,
    /// splitting, interpolation)
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Classify an instance against the measure/TM/DTM axioms
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        instance: String,
    },
    /// Variation / cover-infimum / Radon-part transforms with certificates
    Transform {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        instance: String,
        /// plus | minus | abs | tilde | radon
        #[arg(long)]
        op: String,
        /// region (defaults to X); grid syntax `cells[r:c0-c1;...]`
        #[arg(long)]
        region: Option<String>,
        /// fail instead of reporting bounds when exactness is lost
        #[arg(long, default_value_t = false)]
        exact: bool,
        /// write the certificate block here
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
    },
    /// Radon/proper decomposition of an instance
    Decompose {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        instance: String,
    },
    /// Run theorem suites over instances, emitting CSV rows
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long = "instance", required = true)]
        instances: Vec<String>,
        /// nutil | propdec | proper | order | modularity | structure (repeatable; default all)
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// fill the wall_ms column (breaks byte-reproducibility)
        #[arg(long, default_value_t = false)]
        timings: bool,
    },
    /// Enumerate all DTM value tables over a lattice from a value grid
    Enumerate {
        #[command(flatten)]
        common: Common,
        /// comma-separated rational values, e.g. `0,1/2,1`
        #[arg(long)]
        values: String,
    },
    /// Decomposition quantities for an instance family across resolutions
    Convergence {
        /// registry family name (lebesgue, aarnes, mix:..., ...)
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 2)]
        k_min: u32,
        #[arg(long, default_value_t = 3)]
        k_max: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Re-validate an emitted certificate block
    CheckCertificate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        certificate: PathBuf,
        /// instance override (defaults to the one recorded in the block)
        #[arg(long)]
        instance: Option<String>,
    },
}

fn load_model(spec: &str) -> anyhow::Result<Model> {
    if let Some(k) = spec.strip_prefix("grid:") {
        let k: u32 = k.parse().context("bad grid resolution")?;
        return Ok(Model::grid(DyadicGrid::new(k)?));
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("reading model `{spec}`"))?;
    let trimmed = text.trim_start();
    if trimmed.starts_with("grid") {
        Ok(Model::grid(DyadicGrid::parse_spec(&text)?))
    } else {
        Ok(Model::lattice(FiniteLattice::parse_file(&text)?))
    }
}

fn load_instance(model: &Model, spec: &str) -> anyhow::Result<Instance> {
    if let Some(path) = spec.strip_prefix("file:") {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading instance `{path}`"))?;
        let name = PathBuf::from(path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "file-instance".into());
        return Ok(Instance::Plain(parse_setfn_file(model, &text, &name)?));
    }
    Ok(parse_instance(model, spec)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // configuration / parse problems exit 2; budget exhaustion 3
            let code = match e.downcast_ref::<CoreError>() {
                Some(CoreError::SearchBudgetExceeded { .. }) => 3,
                Some(CoreError::BudgetExceeded(_)) => 3,
                _ => 2,
            };
            ExitCode::from(code as u8)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Validate { common } => {
            let model = load_model(&common.model)?;
            let rep = match model.kind() {
                ModelKind::Lattice(l) => l.validate()?,
                ModelKind::Grid(g) => grid_axiom_check(g, common.budget(), common.seed),
            };
            println!("model: {}", model.describe());
            println!("lattice-closed: {}", rep.lattice_closed);
            println!("connected: {}", rep.connected);
            println!("normal: {}", rep.normal);
            println!("splitting: {}", rep.splitting);
            println!("interpolating: {}", rep.interpolating);
            for n in &rep.notes {
                println!("note: {n}");
            }
            for c in &rep.counterexamples {
                println!("counterexample: {c}");
            }
            let ok = rep.lattice_closed && rep.splitting && rep.interpolating;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Classify { common, instance } => {
            let model = load_model(&common.model)?;
            let inst = load_instance(&model, &instance)?;
            let f = match &inst {
                Instance::Plain(f) => f.clone(),
                Instance::Signed(p) => p.combined()?,
            };
            let rep = classify(&f, common.seed, (common.budget() as usize).min(20_000))?;
            println!("instance: {}", rep.name);
            println!("is_measure_restriction: {}", rep.flags.is_measure_restriction);
            println!("is_radon_surrogate: {}", rep.flags.is_radon_surrogate);
            println!("is_tm: {}", rep.flags.is_tm);
            println!("is_dtm: {}", rep.flags.is_dtm);
            println!("is_stm: {}", rep.flags.is_stm);
            println!("is_sdtm: {}", rep.flags.is_sdtm);
            println!("compact_finite: {}", rep.fin.compact_finite);
            println!("singleton_finite: {}", rep.fin.singleton_finite);
            println!("locally_finite: {}", rep.fin.locally_finite);
            println!("simple: {}", rep.fin.simple);
            println!("finite: {}", rep.fin.finite);
            println!("norm: {}{}", rep.norm, if rep.norm_exact { "" } else { " (bound)" });
            println!("tested_regions: {}", rep.tested_regions);
            if let Some(w) = &rep.atom_weights {
                let parts: Vec<String> =
                    w.iter().map(|(a, wt)| format!("{a}={wt}")).collect();
                println!("atom_weights: {}", parts.join(" "));
            }
            for v in &rep.violations {
                println!("violation[{}]: {}", v.axiom, v.detail);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Transform {
            common,
            instance,
            op,
            region,
            exact,
            emit_certificate,
        } => {
            let model = load_model(&common.model)?;
            let inst = load_instance(&model, &instance)?;
            let params = common.params();
            let mask = match &region {
                Some(r) => model.parse_mask(r)?,
                None => model.x_mask(),
            };
            let src = match &inst {
                Instance::Plain(f) => CompactSource::Restrict(f.clone()),
                Instance::Signed(p) => p.source(),
            };
            match op.as_str() {
                "plus" | "minus" => {
                    let s = if op == "plus" { src } else { src.negated() };
                    let f = SetFunction::pos_var(s, params);
                    let v = f.on_open(&mask)?;
                    println!("{op}({instance}) on open {} = {v}", model.format_mask(&mask));
                }
                "abs" => {
                    let out: PackingOutcome = packing_search(&src, &mask, params)?;
                    match out.exact_value() {
                        Some(v) => println!("|{instance}| on {} = {v}", model.format_mask(&mask)),
                        None if exact => {
                            return Err(anyhow!(CoreError::SearchBudgetExceeded {
                                context: "total variation".into(),
                                lo: out.lo.to_string(),
                                hi: out.hi.to_string(),
                            }))
                        }
                        None => println!(
                            "|{instance}| on {} in [{}, {}] (bounds)",
                            model.format_mask(&mask),
                            out.lo,
                            out.hi
                        ),
                    }
                    if let Some(path) = emit_certificate {
                        let cert = tmlab_core::search::PackingCertificate {
                            host: mask.clone(),
                            pieces: out.pieces.clone(),
                            total: out.lo.clone(),
                            optimal: out.optimal,
                        };
                        std::fs::write(&path, certs::packing_to_text(&model, &instance, &cert))?;
                        println!("certificate written to {}", path.display());
                    }
                    return Ok(ExitCode::SUCCESS);
                }
                "tilde" | "radon" => {
                    let f = match &inst {
                        Instance::Plain(f) => f.clone(),
                        Instance::Signed(_) => {
                            return Err(anyhow!("tilde/radon need a plain nonnegative instance"))
                        }
                    };
                    if op == "tilde" {
                        let out = tilde_search(&f, &mask, params)?;
                        match out.exact_value() {
                            Some(v) => {
                                println!("tilde({instance}) at {} = {v}", model.format_mask(&mask))
                            }
                            None if exact => {
                                return Err(anyhow!(CoreError::SearchBudgetExceeded {
                                    context: "cover infimum".into(),
                                    lo: out.lo.to_string(),
                                    hi: out.hi.to_string(),
                                }))
                            }
                            None => println!(
                                "tilde({instance}) at {} in [{}, {}] (bounds)",
                                model.format_mask(&mask),
                                out.lo,
                                out.hi
                            ),
                        }
                        println!("cover pieces: {}", out.pieces.len());
                        if let Some(path) = emit_certificate {
                            let cert = tmlab_core::search::CoverCertificate {
                                target: mask.clone(),
                                pieces: out.pieces.clone(),
                                total: out.hi.clone(),
                                optimal: out.optimal,
                            };
                            std::fs::write(&path, certs::cover_to_text(&model, &instance, &cert))?;
                            println!("certificate written to {}", path.display());
                        }
                    } else {
                        let (m, diag) = radon_part(&f, params, common.seed)?;
                        let v = m.on_compact(&mask)?;
                        println!("radon({instance}) at {} = {v}", model.format_mask(&mask));
                        println!("below input: {}", diag.below_input);
                        println!("subadditive on opens: {}", diag.subadditive_on_opens);
                        println!("measure restriction: {}", diag.measure_restriction);
                    }
                }
                other => return Err(anyhow!("unknown op `{other}` (plus|minus|abs|tilde|radon)")),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose { common, instance } => {
            let model = load_model(&common.model)?;
            let inst = load_instance(&model, &instance)?;
            let params = common.params();
            match inst {
                Instance::Plain(f) => {
                    let d = decompose_proper(&f, params, common.seed)?;
                    let x = model.x_mask();
                    println!("instance: {}", d.input);
                    println!("radon part at X: {}", d.radon.on_compact(&x)?);
                    println!("proper part at X: {}", d.proper.on_compact(&x)?);
                    println!("radon below input: {}", d.radon_below_input);
                    println!("remainder proper: {}", d.proper_verdict.proper);
                    println!("reconstruction: {}", d.reconstruction_ok);
                    println!(
                        "uniqueness: {} ({})",
                        d.uniqueness.unique_in_family, d.uniqueness.note
                    );
                    if let Some(cert) = &d.proper_verdict.zero_cover {
                        println!(
                            "zero-cover certificate: {} pieces, total {}",
                            cert.pieces.len(),
                            cert.total
                        );
                    }
                    let ok = d.reconstruction_ok && d.radon_below_input && d.proper_verdict.proper;
                    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
                }
                Instance::Signed(pair) => {
                    let d = decompose_signed(&pair, params, common.seed)?;
                    let x = model.x_mask();
                    println!("instance: {}", d.input);
                    println!(
                        "signed radon part at X: {}",
                        d.radon.combined()?.on_compact(&x)?
                    );
                    println!(
                        "signed proper part at X: {}",
                        d.proper.combined()?.on_compact(&x)?
                    );
                    println!("reconstruction: {}", d.reconstruction_ok);
                    println!("norms finite: {}", d.norms_finite);
                    println!("remainder proper: {}", d.proper_is_proper);
                    println!("uniqueness: {}", d.uniqueness_note);
                    let ok = d.reconstruction_ok && d.proper_is_proper;
                    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
                }
            }
        }
        Command::Check {
            common,
            instances,
            suites,
            out,
            threads,
            timings,
        } => {
            let model = load_model(&common.model)?;
            let mut parsed = Vec::new();
            for spec in &instances {
                parsed.push(load_instance(&model, spec)?);
            }
            let suites = if suites.is_empty() {
                SUITE_NAMES.iter().map(|s| s.to_string()).collect()
            } else {
                suites
            };
            let cfg = RunConfig {
                model,
                instances: parsed,
                suites,
                seed: common.seed,
                budget: common.budget(),
                threads,
            };
            let started = std::time::Instant::now();
            let mut rows: Vec<ReportRow> = run_check(&cfg)?;
            if timings {
                let total = started.elapsed().as_millis();
                for r in rows.iter_mut() {
                    r.wall_ms = Some(total);
                }
            }
            let csv = to_csv(&rows);
            match out {
                Some(path) => std::fs::write(&path, &csv)?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::from(exit_code(&rows) as u8))
        }
        Command::Enumerate { common, values } => {
            let model = load_model(&common.model)?;
            let mut grid = Vec::new();
            for v in values.split(',') {
                grid.push(ExtValue::parse(v.trim())?);
            }
            let found = enumerate_dtms(&model, &grid, common.budget().max(100_000), common.seed)?;
            println!("found {} deficient topological measures", found.len());
            for (f, rep) in &found {
                let kind = if rep.flags.is_measure_restriction {
                    "measure"
                } else if rep.flags.is_tm {
                    "tm"
                } else {
                    "dtm"
                };
                println!("{}: {kind}, norm {}", f.name(), rep.norm);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Convergence {
            family,
            k_min,
            k_max,
            seed,
            budget,
        } => {
            if k_min > k_max {
                return Err(anyhow!("k_min above k_max"));
            }
            let rows = convergence(&family, k_min..=k_max, seed, budget.unwrap_or(20_000))?;
            print!("{}", convergence_csv(&rows));
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckCertificate {
            common,
            certificate,
            instance,
        } => {
            let model = load_model(&common.model)?;
            let text = std::fs::read_to_string(&certificate)
                .with_context(|| format!("reading {}", certificate.display()))?;
            let (cert, recorded) = certs::parse_certificate(&model, &text)?;
            let name = instance.unwrap_or(recorded);
            let inst = load_instance(&model, &name)?;
            let f = match &inst {
                Instance::Plain(f) => f.clone(),
                Instance::Signed(p) => p.combined()?,
            };
            match certs::revalidate(&cert, &f, common.params()) {
                Ok(log) => {
                    for l in log {
                        println!("{l}");
                    }
                    println!("certificate valid");
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    println!("certificate INVALID: {e}");
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}
