use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use dmax_core::directions::{DirectionKind, DirectionSet};
use dmax_core::dyadic::{cww_profile, random_dyadic_martingale, CwwProfile};
use dmax_core::norm_lab::{
    fit_log, growth_curve, lower_bound_experiment, write_lower_bound_csv, FamilySpec,
    LowerBoundConfig, MaximalOperator,
};
use dmax_core::sectors::{
    cluster_decompose, kappa_classes, make_sectors, sectors_to_json, split_by_grid,
};
use dmax_core::spectral::io::{read_grid, read_grid_csv, write_grid, MAGIC};
use dmax_core::spectral::multiplier::apply_directional_multiplier;
use dmax_core::{GridFunction, Symbol1D};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{self, Command, Experiment, Sectors};
use crate::meta::{write_sidecar, Metadata};
use crate::plot::{render_svg, Model};
use crate::verify::{format_table, run_suite};
use crate::CliError;

pub fn dispatch(command: Command, deterministic: bool) -> Result<i32, CliError> {
    match command {
        Command::GenDirections(a) => gen_directions(&a, deterministic),
        Command::Apply(a) => apply(&a, deterministic),
        Command::Maximal(a) => maximal(&a, deterministic),
        Command::Experiment(Experiment::Growth(a)) => growth(&a, deterministic),
        Command::Experiment(Experiment::LowerBound(a)) => lower_bound(&a, deterministic),
        Command::Experiment(Experiment::Cww(a)) => cww(&a, deterministic),
        Command::Verify(a) => verify(&a),
        Command::Sectors(Sectors::Dump(a)) => sectors_dump(&a, deterministic),
        Command::Plot(a) => plot(&a, deterministic),
        Command::Rerun(a) => rerun(&a, deterministic),
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn direction_kind(s: &str) -> Result<DirectionKind, CliError> {
    s.parse::<DirectionKind>().map_err(usage)
}

/// Writes a JSON document; with a path, the metadata goes to the sidecar.
fn emit_json(text: &str, out: Option<&Path>, meta: &Metadata) -> Result<(), CliError> {
    let mut w = output(out)?;
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    if let Some(p) = out {
        write_sidecar(p, meta)?;
    }
    Ok(())
}

fn read_input(path: &Path, side: f64) -> Result<GridFunction, CliError> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(MAGIC) {
        Ok(read_grid(&mut &bytes[..])?)
    } else {
        Ok(read_grid_csv(&bytes[..], side)?)
    }
}

fn gen_directions(a: &args::GenDirections, deterministic: bool) -> Result<i32, CliError> {
    let set = DirectionSet::make(direction_kind(&a.kind)?, a.n, a.seed).map_err(usage)?;
    let meta = Metadata::new("gen-directions", a, a.seed, deterministic);
    emit_json(&set.to_json()?, a.out.as_deref(), &meta)?;
    Ok(0)
}

fn apply(a: &args::Apply, deterministic: bool) -> Result<i32, CliError> {
    let v = args::parse_vector(&a.v).map_err(usage)?;
    let m = Symbol1D::from_id(&a.symbol).map_err(usage)?;
    let f = read_input(&a.input, a.side)?;
    let out = apply_directional_multiplier(&f, &m, v)?;
    let mut w = BufWriter::new(File::create(&a.out)?);
    write_grid(&mut w, &out)?;
    w.flush()?;
    write_sidecar(&a.out, &Metadata::new("apply", a, 0, deterministic))?;
    Ok(0)
}

fn maximal(a: &args::Maximal, deterministic: bool) -> Result<i32, CliError> {
    let op = MaximalOperator::from_id(&a.op).map_err(usage)?;
    let set = match &a.directions {
        Some(p) => DirectionSet::from_json(&std::fs::read_to_string(p)?)?,
        None => DirectionSet::make(direction_kind(&a.kind)?, a.n, a.seed).map_err(usage)?,
    };
    let f = read_input(&a.input, a.side)?;
    let out = op
        .apply(std::slice::from_ref(&f), &set)?
        .pop()
        .expect("one input, one output");
    let mut w = BufWriter::new(File::create(&a.out)?);
    out.write_dmax(&mut w)?;
    w.flush()?;
    let mut config = serde_json::to_value(a)?;
    if a.directions.is_some() {
        config["directions"] = serde_json::to_value(&set)?;
    }
    write_sidecar(
        &a.out,
        &Metadata::new("maximal", &config, a.seed, deterministic),
    )?;
    Ok(0)
}

fn growth(a: &args::Growth, deterministic: bool) -> Result<i32, CliError> {
    let n_list = args::parse_n_list(&a.n).map_err(usage)?;
    let op = MaximalOperator::from_id(&a.op).map_err(usage)?;
    let family = FamilySpec {
        greedy_rounds: a.greedy_rounds,
        ..FamilySpec::new(a.level, a.side)
    };
    let (curve, _) = growth_curve(&op, &n_list, &family, a.seed)?;
    let mut w = output(a.out.as_deref())?;
    Metadata::new("experiment growth", a, a.seed, deterministic).write_header(&mut w)?;
    curve.write_csv(&mut w)?;
    w.flush()?;
    eprintln!(
        "estimate/√log N spread {:.3}; fits: √log c = {:.4} (rms {:.4}), N^0.1 c = {:.4} (rms {:.4}), log c = {:.4} (rms {:.4})",
        curve.sqrt_log_spread(),
        curve.fit_sqrt.c,
        curve.fit_sqrt.rms_relative,
        curve.fit_power.c,
        curve.fit_power.rms_relative,
        curve.fit_log.c,
        curve.fit_log.rms_relative,
    );
    Ok(0)
}

fn lower_bound(a: &args::LowerBound, deterministic: bool) -> Result<i32, CliError> {
    let cfg = LowerBoundConfig {
        n_list: args::parse_n_list(&a.n).map_err(usage)?,
        r0: a.r0,
        c0: a.c0,
        radii_per_octave: a.radii_per_octave,
        angles: a.angles,
        ..LowerBoundConfig::default()
    };
    let rows = lower_bound_experiment(&cfg)?;
    let mut w = output(a.out.as_deref())?;
    Metadata::new("experiment lower-bound", a, a.seed, deterministic).write_header(&mut w)?;
    write_lower_bound_csv(&rows, &mut w)?;
    w.flush()?;
    let fit = fit_log(&rows);
    eprintln!(
        "c·log N fit: c = {:.4}, max relative residual {:.4}",
        fit.c, fit.max_relative
    );
    Ok(0)
}

fn cww(a: &args::Cww, deterministic: bool) -> Result<i32, CliError> {
    let profiles: Vec<CwwProfile> = (0..a.count)
        .into_par_iter()
        .map(|k| {
            let f = random_dyadic_martingale(a.level, 1.0, a.seed + k);
            cww_profile(&f, &a.lambdas, &a.epsilons)
        })
        .collect::<Result<_, _>>()?;
    let meta = Metadata::new("experiment cww", a, a.seed, deterministic);
    let mut w = output(a.out.as_deref())?;
    meta.write_header(&mut w)?;
    let mut table = csv::Writer::from_writer(&mut w);
    let csv_err = |e: csv::Error| CliError::Failed(e.to_string());
    table
        .write_record(["seed", "fitted_c1", "fitted_c2", "violations", "holds"])
        .map_err(csv_err)?;
    for (k, p) in profiles.iter().enumerate() {
        table
            .write_record(&[
                (a.seed + k as u64).to_string(),
                p.fitted_c1.to_string(),
                p.fitted_c2.to_string(),
                p.violations.to_string(),
                p.holds().to_string(),
            ])
            .map_err(csv_err)?;
    }
    table.flush()?;
    drop(table);
    w.flush()?;
    if let Some(worst) = profiles
        .iter()
        .min_by(|x, y| x.fitted_c1.total_cmp(&y.fitted_c1))
    {
        if let Some(p) = &a.profile_out {
            let mut pw = BufWriter::new(File::create(p)?);
            meta.write_header(&mut pw)?;
            worst.write_csv(&mut pw)?;
            pw.flush()?;
        }
        let violations: usize = profiles.iter().map(|p| p.violations).sum();
        eprintln!(
            "smallest fitted c1 {:.2}, {violations} violations",
            worst.fitted_c1
        );
    }
    Ok(0)
}

fn verify(a: &args::Verify) -> Result<i32, CliError> {
    if !(6..=10).contains(&a.level) {
        return Err(usage(format!(
            "verify runs at levels 6..=10, not {}",
            a.level
        )));
    }
    let results = run_suite(a.level, a.seed);
    print!("{}", format_table(&results));
    Ok(if results.iter().all(|r| r.passed) {
        0
    } else {
        1
    })
}

fn sectors_dump(a: &args::SectorsDump, deterministic: bool) -> Result<i32, CliError> {
    let sectors = make_sectors(a.n).map_err(usage)?;
    let mut doc = json!({ "sectors": serde_json::from_str::<Value>(&sectors_to_json(&sectors)?)? });
    if let Some(count) = a.clusters {
        let set = DirectionSet::make(direction_kind(&a.kind)?, count, a.seed).map_err(usage)?;
        let mut sets = Vec::new();
        for (&kappa, members) in &kappa_classes(&sectors, &set) {
            for part in split_by_grid(&sectors, members) {
                if !part.is_empty() {
                    let cs = cluster_decompose(&sectors, &part, kappa)?;
                    sets.push(serde_json::from_str::<Value>(&cs.to_json()?)?);
                }
            }
        }
        doc["clusters"] = Value::Array(sets);
    }
    let meta = Metadata::new("sectors dump", a, a.seed, deterministic);
    emit_json(
        &serde_json::to_string_pretty(&doc)?,
        a.out.as_deref(),
        &meta,
    )?;
    Ok(0)
}

fn plot(a: &args::Plot, deterministic: bool) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&a.input)?;
    let svg = render_svg(&text, Model::parse(&a.model)?)?;
    let meta = Metadata::new("plot", a, 0, deterministic);
    let mut w = output(a.out.as_deref())?;
    writeln!(w, "<!--")?;
    for line in meta.header_lines() {
        writeln!(w, "{}", line.replace("--", "- -"))?;
    }
    writeln!(w, "-->")?;
    w.write_all(svg.as_bytes())?;
    w.flush()?;
    Ok(0)
}

fn from_config<T: serde::de::DeserializeOwned>(meta: &Metadata) -> Result<T, CliError> {
    serde_json::from_value(meta.config.clone())
        .map_err(|e| usage(format!("config of `{}` does not parse: {e}", meta.command)))
}

/// Reads the metadata of an artifact and re-runs its command with the same
/// config. Without a recorded timestamp the rerun is deterministic too.
fn rerun(a: &args::Rerun, deterministic: bool) -> Result<i32, CliError> {
    let meta = if a.from.to_string_lossy().ends_with(".meta.json") {
        serde_json::from_str::<Metadata>(&std::fs::read_to_string(&a.from)?)?
    } else {
        Metadata::from_csv_header(BufReader::new(File::open(&a.from)?))?
    };
    let deterministic = deterministic || meta.timestamp.is_none();
    let out: Option<PathBuf> = a.out.clone();
    match meta.command.as_str() {
        "gen-directions" => gen_directions(
            &args::GenDirections {
                out,
                ..from_config(&meta)?
            },
            deterministic,
        ),
        "experiment growth" => growth(
            &args::Growth {
                out,
                ..from_config(&meta)?
            },
            deterministic,
        ),
        "experiment lower-bound" => lower_bound(
            &args::LowerBound {
                out,
                ..from_config(&meta)?
            },
            deterministic,
        ),
        "experiment cww" => cww(
            &args::Cww {
                out,
                profile_out: None,
                ..from_config(&meta)?
            },
            deterministic,
        ),
        "sectors dump" => sectors_dump(
            &args::SectorsDump {
                out,
                ..from_config(&meta)?
            },
            deterministic,
        ),
        other => Err(usage(format!(
            "`{other}` artifacts depend on input files and cannot be re-run"
        ))),
    }
}
