//! Command-line front end for the toric cohomology library.
//!
//! Exit codes: 0 success, 2 input error, 3 verification mismatch (oracle
//! disagreement, box failure, region-table mismatch), 4 negative verdict
//! from a collection check.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use toricoh::cohomology::CohomologyEngine;
use toricoh::collections::{
    bondal_classes, buchsbaum_rim_classes, ext_table, is_strongly_exceptional, BundleClass,
    ExceptionalVerdict, Provenance, Quiver,
};
use toricoh::fan::ClassLattice;
use toricoh::regions::RegionTable;
use toricoh::strata::FacetSet;
use toricoh::weights::{total_cohomology_in, total_cohomology_with, weight_box_with};
use toricoh::{Fan, TorusDivisor};

const EXIT_INPUT: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_VERDICT: u8 = 4;

#[derive(Parser)]
#[command(name = "toricoh", version, about = "Line bundle cohomology on complete toric varieties")]
struct Cli {
    /// Number of worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Oracle {
    Cech,
    Order,
}

#[derive(Args)]
struct DivisorArg {
    /// Divisor coefficients, one per ray: `--divisor "(-1,1,0,0,0,1,-1)"`.
    #[arg(long, value_name = "COEFFS", allow_hyphen_values = true)]
    divisor: Option<String>,

    /// JSON file with `{"coeffs": [...]}`.
    #[arg(long, value_name = "PATH", conflicts_with = "divisor")]
    divisor_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a fan and report its class group.
    Info {
        fan: PathBuf,
    },
    /// Total cohomology of a line bundle.
    Cohomology {
        fan: PathBuf,
        #[command(flatten)]
        divisor: DivisorArg,
        /// List the contributing weights.
        #[arg(long)]
        per_weight: bool,
        /// Recompute every box weight with an independent oracle and
        /// compare (exit 3 on mismatch).
        #[arg(long, value_enum)]
        oracle: Option<Oracle>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Reduced Betti numbers of every facet union of a fan.
    ClassifyZ {
        fan: PathBuf,
        /// Refuse fans with more rays than this (the table has 2^rays rows).
        #[arg(long, default_value_t = 16)]
        max_rays: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Bondal's collection of line bundles from torus multiplication maps.
    Bondal {
        fan: PathBuf,
        /// Denominators to sample, e.g. `1..10` or `1,2,6`.
        #[arg(long, default_value = "1..10")]
        denominators: String,
        /// Ray indices whose classes form the Picard basis for canonical
        /// representatives (default: chosen automatically).
        #[arg(long, value_delimiter = ',')]
        basis: Option<Vec<usize>>,
    },
    /// Universal bundles of a quiver plus the Buchsbaum-Rim extension.
    BuchsbaumRim {
        fan: PathBuf,
        quiver: PathBuf,
        /// Base vertex receiving the trivial class (default: first vertex).
        #[arg(long)]
        base: Option<String>,
        #[arg(long, value_delimiter = ',')]
        basis: Option<Vec<usize>>,
    },
    /// Check a collection of line bundles for strong exceptionality.
    CheckCollection {
        fan: PathBuf,
        /// Classes file as produced by `bondal`/`buchsbaum-rim`; `-` reads
        /// from standard input.
        classes: PathBuf,
        #[arg(long, value_delimiter = ',')]
        basis: Option<Vec<usize>>,
    },
    /// Verify a nonvanishing region table over a coefficient range.
    RegionScan {
        fan: PathBuf,
        regions: PathBuf,
        /// Inclusive coefficient range, e.g. `-5..5`.
        #[arg(long, default_value = "-5..5", allow_hyphen_values = true)]
        range: String,
        /// Also rescan every divisor with a doubled weight box and require
        /// identical totals.
        #[arg(long)]
        doubled_check: bool,
    },
}

#[derive(Serialize, Deserialize)]
struct ClassEntry {
    label: String,
    divisor: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct ClassesFile {
    classes: Vec<ClassEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stabilized: Option<bool>,
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    let text = if path == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).context("reading standard input")?;
        buf
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {what} from {}", path.display()))
}

fn parse_coeff_list(s: &str) -> anyhow::Result<Vec<i64>> {
    let trimmed = s
        .trim()
        .trim_start_matches("d=")
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    trimmed
        .split(',')
        .map(|x| {
            x.trim()
                .replace('\u{2212}', "-")
                .parse::<i64>()
                .map_err(|e| anyhow!("bad coefficient {x:?}: {e}"))
        })
        .collect()
}

fn parse_range(s: &str) -> anyhow::Result<(i64, i64)> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| anyhow!("range must look like -5..5"))?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

fn parse_denominators(s: &str) -> anyhow::Result<Vec<u64>> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u64 = lo.trim().parse()?;
        let hi: u64 = hi.trim().parse()?;
        if lo == 0 || hi < lo {
            return Err(anyhow!("bad denominator range {s:?}"));
        }
        Ok((lo..=hi).collect())
    } else {
        s.split(',').map(|x| Ok(x.trim().parse::<u64>()?)).collect()
    }
}

fn load_divisor(fan: &Fan, arg: &DivisorArg) -> anyhow::Result<TorusDivisor> {
    let d = if let Some(spec) = &arg.divisor {
        TorusDivisor::new(parse_coeff_list(spec)?)
    } else if let Some(path) = &arg.divisor_file {
        load_json::<TorusDivisor>(path, "divisor")?
    } else {
        return Err(anyhow!("a divisor is required (--divisor or --divisor-file)"));
    };
    fan.check_divisor(&d)?;
    Ok(d)
}

fn build_lattice(fan: &Fan, basis: &Option<Vec<usize>>) -> anyhow::Result<ClassLattice> {
    Ok(match basis {
        Some(rays) => ClassLattice::with_basis(fan, rays)?,
        None => ClassLattice::new(fan)?,
    })
}

fn print_classes(classes: &[BundleClass], stabilized: Option<bool>) -> anyhow::Result<()> {
    let file = ClassesFile {
        classes: classes
            .iter()
            .map(|c| ClassEntry {
                label: c.provenance.label(),
                divisor: c.class.representative().coeffs().to_vec(),
            })
            .collect(),
        stabilized,
    };
    println!("{}", serde_json::to_string_pretty(&file)?);
    Ok(())
}

fn cmd_info(fan_path: &Path) -> anyhow::Result<u8> {
    let fan: Fan = load_json(fan_path, "fan")?;
    let report = fan.validate()?;
    let lattice = ClassLattice::new(&fan)?;
    println!("rays:       {}", fan.ray_count());
    println!("dimension:  {}", fan.dim());
    println!("max cones:  {}", fan.max_cones().len());
    println!("complete:   {}", report.complete);
    println!("simplicial: {}", report.simplicial);
    println!("smooth:     {}", report.smooth);
    println!("class group: rank {}{}", lattice.free_rank(), {
        let t = lattice.torsion();
        if t.is_empty() {
            String::new()
        } else {
            format!(" + torsion {t:?}")
        }
    });
    if let Some(basis) = lattice.basis() {
        println!("class basis rays: {basis:?}");
    }
    Ok(0)
}

fn render_totals(totals: &[u64], format: Format) -> String {
    match format {
        Format::Csv => {
            let header: Vec<String> = (0..totals.len()).map(|p| format!("h{p}")).collect();
            let values: Vec<String> = totals.iter().map(u64::to_string).collect();
            format!("{}\n{}", header.join(","), values.join(","))
        }
        _ => totals
            .iter()
            .enumerate()
            .map(|(p, v)| format!("h^{p} = {v}"))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn cmd_cohomology(
    fan_path: &Path,
    divisor: &DivisorArg,
    per_weight: bool,
    oracle: Option<Oracle>,
    format: Format,
) -> anyhow::Result<u8> {
    let fan: Fan = load_json(fan_path, "fan")?;
    fan.validate()?;
    let d = load_divisor(&fan, divisor)?;
    let engine = CohomologyEngine::new(&fan);
    let table = total_cohomology_with(&engine, &d)?;

    if let Some(oracle) = oracle {
        let b = table.weight_box.clone();
        let mut m = b.lo().to_vec();
        loop {
            let reference = engine.weight_cohomology(&d, &m)?;
            let other = match oracle {
                Oracle::Cech => engine.cech_weight_cohomology(&d, &m)?,
                Oracle::Order => engine.order_weight_cohomology(&d, &m)?,
            };
            if reference.h != other.h {
                eprintln!(
                    "oracle mismatch at weight {m:?}: nerve {:?} vs oracle {:?}",
                    reference.h, other.h
                );
                return Ok(EXIT_MISMATCH);
            }
            let mut k = m.len();
            let mut done = true;
            while k > 0 {
                k -= 1;
                m[k] += 1;
                if m[k] <= b.hi()[k] {
                    done = false;
                    break;
                }
                m[k] = b.lo()[k];
            }
            if done {
                break;
            }
        }
        eprintln!("oracle agreement verified on {} weights", b.point_count());
    }

    match format {
        Format::Json => {
            let mut out = serde_json::to_value(&table)?;
            if !per_weight {
                out.as_object_mut().unwrap().remove("weights");
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        _ => {
            println!("{}", render_totals(&table.totals, format));
            if per_weight {
                for w in &table.weights {
                    println!("m = {:?}  J = {:?}  h = {:?}", w.weight, w.facets.indices(), w.h);
                }
            }
        }
    }
    Ok(0)
}

fn cmd_classify_z(fan_path: &Path, max_rays: usize, format: Format) -> anyhow::Result<u8> {
    let fan: Fan = load_json(fan_path, "fan")?;
    fan.validate()?;
    let r = fan.ray_count();
    if r > max_rays {
        return Err(toricoh::Error::ClassifyCap { cap: max_rays, got: r }.into());
    }
    let engine = CohomologyEngine::new(&fan);
    if format == Format::Csv {
        println!("facets,empty,betti");
    }
    for bits in 0..1u64 << r {
        let j = FacetSet::from_bits(bits);
        let betti = engine.betti_for_facet_set(j)?;
        let b = betti.padded(fan.dim());
        match format {
            Format::Csv => {
                println!("\"{:?}\",{},\"{:?}\"", j.indices(), betti.is_empty_complex(), b)
            }
            _ => println!(
                "J = {:<24} {} betti = {:?}",
                format!("{:?}", j.indices()),
                if betti.is_empty_complex() { "empty " } else { "      " },
                b
            ),
        }
    }
    Ok(0)
}

fn cmd_bondal(
    fan_path: &Path,
    denominators: &str,
    basis: &Option<Vec<usize>>,
) -> anyhow::Result<u8> {
    let fan: Fan = load_json(fan_path, "fan")?;
    fan.validate()?;
    let lattice = build_lattice(&fan, basis)?;
    let dens = parse_denominators(denominators)?;
    let collection = bondal_classes(&lattice, &fan, &dens)?;
    eprintln!("{} classes, stabilized: {}", collection.classes.len(), collection.stabilized);
    print_classes(&collection.classes, Some(collection.stabilized))?;
    Ok(0)
}

fn cmd_buchsbaum_rim(
    fan_path: &Path,
    quiver_path: &Path,
    base: &Option<String>,
    basis: &Option<Vec<usize>>,
) -> anyhow::Result<u8> {
    let fan: Fan = load_json(fan_path, "fan")?;
    fan.validate()?;
    let quiver: Quiver = load_json(quiver_path, "quiver")?;
    let lattice = build_lattice(&fan, basis)?;
    let base_vertex = match base {
        Some(id) => quiver
            .vertex_index(id)
            .ok_or_else(|| anyhow!("no vertex named {id:?} in the quiver"))?,
        None => 0,
    };
    let collection = buchsbaum_rim_classes(&lattice, &quiver, base_vertex)?;
    eprintln!("{} classes", collection.len());
    print_classes(&collection, None)?;
    Ok(0)
}

fn cmd_check_collection(
    fan_path: &Path,
    classes_path: &Path,
    basis: &Option<Vec<usize>>,
) -> anyhow::Result<u8> {
    let fan: Fan = load_json(fan_path, "fan")?;
    fan.validate()?;
    let lattice = build_lattice(&fan, basis)?;
    let file: ClassesFile = load_json(classes_path, "classes")?;
    if file.classes.is_empty() {
        return Err(anyhow!("empty collection"));
    }
    let classes: Vec<BundleClass> = file
        .classes
        .iter()
        .map(|entry| {
            let d = TorusDivisor::new(entry.divisor.clone());
            fan.check_divisor(&d)?;
            Ok(BundleClass {
                class: lattice.class_of(&d)?,
                provenance: Provenance::Input { label: entry.label.clone() },
            })
        })
        .collect::<toricoh::Result<_>>()?;
    let engine = CohomologyEngine::new(&fan);
    let table = ext_table(&engine, &lattice, &classes)?;
    match is_strongly_exceptional(&engine, &lattice, &classes)? {
        ExceptionalVerdict::StronglyExceptional { hom_acyclic } => {
            println!(
                "strongly exceptional: {} bundles, hom-acyclic: {hom_acyclic}",
                classes.len()
            );
            Ok(0)
        }
        ExceptionalVerdict::Witness { p, q, degree } => {
            println!(
                "NOT strongly exceptional: Ext^{degree}({}, {}) has dimension {}",
                table.labels[p],
                table.labels[q],
                table.entry(p, q)[degree]
            );
            Ok(EXIT_VERDICT)
        }
    }
}

fn cmd_region_scan(
    fan_path: &Path,
    regions_path: &Path,
    range: &str,
    doubled_check: bool,
) -> anyhow::Result<u8> {
    use rayon::prelude::*;

    let fan: Fan = load_json(fan_path, "fan")?;
    fan.validate()?;
    let table: RegionTable = load_json(regions_path, "region table")?;
    let (lo, hi) = parse_range(range)?;
    let vars = table.vary_rays.len();
    if table.vary_rays.iter().any(|&r| r >= fan.ray_count()) {
        return Err(anyhow!("region table references rays outside the fan"));
    }

    let mut points: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..vars {
        points = points
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }

    let engine = CohomologyEngine::new(&fan);
    let max_degree = table.max_degree();
    let mismatches: Vec<String> = points
        .par_iter()
        .map(|x| -> anyhow::Result<Option<String>> {
            let d = table.divisor(fan.ray_count(), x);
            let b = weight_box_with(&engine, &d)?;
            let t = total_cohomology_in(&engine, &d, &b)?;
            if doubled_check {
                let doubled = total_cohomology_in(&engine, &d, &b.doubled())?;
                if doubled.totals != t.totals {
                    return Ok(Some(format!("{x:?}: totals changed under box doubling")));
                }
            }
            let predicted = table.nonvanishing(x);
            for degree in 0..=max_degree.max(fan.dim()) {
                let actual = t.totals.get(degree).copied().unwrap_or(0) != 0;
                let expect = predicted.get(degree).copied().unwrap_or(false);
                if actual != expect {
                    return Ok(Some(format!(
                        "{x:?}: degree {degree} computed {actual} but table predicts {expect}"
                    )));
                }
            }
            Ok(None)
        })
        .collect::<anyhow::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    if mismatches.is_empty() {
        println!(
            "region table verified on {} points in [{lo},{hi}]^{vars}{}",
            points.len(),
            if doubled_check { " (with doubled boxes)" } else { "" }
        );
        Ok(0)
    } else {
        for m in mismatches.iter().take(20) {
            eprintln!("mismatch: {m}");
        }
        eprintln!("{} mismatches total", mismatches.len());
        Ok(EXIT_MISMATCH)
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<u8> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().ok();
    }
    match &cli.command {
        Command::Info { fan } => cmd_info(fan),
        Command::Cohomology { fan, divisor, per_weight, oracle, format } => {
            cmd_cohomology(fan, divisor, *per_weight, *oracle, *format)
        }
        Command::ClassifyZ { fan, max_rays, format } => cmd_classify_z(fan, *max_rays, *format),
        Command::Bondal { fan, denominators, basis } => cmd_bondal(fan, denominators, basis),
        Command::BuchsbaumRim { fan, quiver, base, basis } => {
            cmd_buchsbaum_rim(fan, quiver, base, basis)
        }
        Command::CheckCollection { fan, classes, basis } => {
            cmd_check_collection(fan, classes, basis)
        }
        Command::RegionScan { fan, regions, range, doubled_check } => {
            cmd_region_scan(fan, regions, range, *doubled_check)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<toricoh::Error>() {
                Some(toricoh::Error::OracleMismatch(_))
                | Some(toricoh::Error::BoxVerification { .. }) => EXIT_MISMATCH,
                _ => EXIT_INPUT,
            };
            ExitCode::from(code)
        }
    }
}
