//! One function per subcommand. Each returns the text for standard output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use exodromy::exit::{check_conservative_over_p, Localization, LocalizeOptions};
use exodromy::homlin::Field;
use exodromy::poset::MonotoneMapJson;
use exodromy::rep::{count_reps, count_reps_category, recollement_decompose, CountOptions, CountResult, Representation};
use exodromy::{Coefficients, ExitPresentation, FinCategory, LocalizationReport, MonotoneMap};

use crate::error::CliError;
use crate::input::{Kind, Source};

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values serialize");
    s.push('\n');
    s
}

fn plural(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

fn counts_line(pres: &ExitPresentation) -> String {
    let f = pres.finiteness();
    format!("{}, {}, {} marked", plural(f.shape, "element"), plural(f.hasse, "Hasse edge"), f.marks)
}

/// Writes `pres` as JSON to `out`, or returns the JSON when `out` is absent.
fn emit_presentation(pres: &ExitPresentation, out: Option<&Path>, dot: Option<&Path>) -> Result<String, CliError> {
    if let Some(path) = dot {
        write_file(path, &pres.shape_dot())?;
    }
    let json = pretty(&pres.to_json());
    match out {
        Some(path) => {
            write_file(path, &json)?;
            Ok(format!("wrote {}: {}\n", path.display(), counts_line(pres)))
        }
        None => Ok(json),
    }
}

pub fn build(input: &Path, out: Option<&Path>, dot: Option<&Path>) -> Result<String, CliError> {
    let src = Source::read(input)?;
    if src.kind()? != Kind::Complex {
        return Err(src.invalid("expected a stratified complex (`vertices` + `faces`, or `cells`)"));
    }
    let pres = ExitPresentation::presentation_of(&src.complex()?);
    emit_presentation(&pres, out, dot)
}

pub fn restrict(input: &Path, to: &str, out: Option<&Path>) -> Result<String, CliError> {
    let src = Source::read(input)?;
    let pres = src.presentation()?;
    let names = split_list(to);
    let spec = pres.base().classify_named(&names).map_err(|e| CliError::Validation(e.to_string()))?;
    emit_presentation(&pres.restrict(&spec)?, out, None)
}

/// `map` is either inline `p=c,…` pairs (target ordered by the images of the
/// base relations) or a path to a monotone-map JSON file.
pub fn coarsen(input: &Path, map: &str, out: Option<&Path>) -> Result<String, CliError> {
    let src = Source::read(input)?;
    let pres = src.presentation()?;
    let base = pres.base().clone();
    let psi = if Path::new(map).is_file() {
        let map_src = Source::read(Path::new(map))?;
        let json: MonotoneMapJson = map_src.parse()?;
        MonotoneMap::from_json(&base, &json).map_err(|e| map_src.invalid(e))?
    } else {
        let pairs = parse_pairs(map)?;
        MonotoneMap::onto_induced_order(base, pairs).map_err(|e| CliError::Validation(e.to_string()))?
    };
    emit_presentation(&pres.coarsen(&psi)?, out, None)
}

pub fn product(a: &Path, b: &Path, out: Option<&Path>) -> Result<String, CliError> {
    let pa = Source::read(a)?.presentation()?;
    let pb = Source::read(b)?.presentation()?;
    emit_presentation(&pa.product(&pb), out, None)
}

fn hocat_summary(report: &LocalizationReport) -> String {
    let skeleton = report.skeleton();
    let mut parts = vec![plural(skeleton.objects().len(), "skeletal object")];
    let big: Vec<String> = skeleton
        .hom_sizes()
        .iter()
        .filter(|(_, &n)| n > 1)
        .map(|((x, y), n)| format!("hom({x}→{y})={n}"))
        .collect();
    if big.is_empty() {
        parts.push("all hom-sets of size ≤ 1".into());
    } else {
        parts.extend(big);
    }
    parts.push(if report.certified {
        "certified".into()
    } else if report.truncated {
        format!("uncertified (word budget reached before depth {})", report.search_depth)
    } else {
        format!("uncertified at depth {} (classes still changing)", report.search_depth)
    });
    parts.join("; ")
}

fn hocat_text(report: &LocalizationReport) -> String {
    let cat = &report.category;
    let mut out = hocat_summary(report);
    out.push('\n');
    let reps = cat.iso_representatives();
    let mut classes: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for (x, &r) in reps.iter().enumerate() {
        classes.entry(r).or_default().push(&cat.objects()[x]);
    }
    for members in classes.values().filter(|m| m.len() > 1) {
        let _ = writeln!(out, "isomorphic: {}", members.join(" ≅ "));
    }
    let counts: Vec<String> = report.class_counts.iter().map(usize::to_string).collect();
    let _ = writeln!(
        out,
        "depth {}: {} zigzags; classes by length: {}",
        report.search_depth,
        report.words_enumerated,
        counts.join(", ")
    );
    out.push_str("hom-sets:\n");
    for x in 0..cat.objects().len() {
        for y in 0..cat.objects().len() {
            let n = cat.hom(x, y).len();
            if n > 0 {
                let _ = writeln!(out, "  {}→{}: {n}", cat.objects()[x], cat.objects()[y]);
            }
        }
    }
    out
}

pub struct HocatArgs<'a> {
    pub depth: usize,
    pub require_certified: bool,
    pub dot: Option<&'a Path>,
    pub json: bool,
}

pub fn hocat(input: &Path, args: HocatArgs<'_>) -> Result<String, CliError> {
    let pres = Source::read(input)?.presentation()?;
    let report = Localization::new(&pres, LocalizeOptions { depth: args.depth, ..Default::default() })?.into_report();
    if let Some(path) = args.dot {
        write_file(path, &report.category.to_dot("hocat"))?;
    }
    let output = if args.json { pretty(&report) } else { hocat_text(&report) };
    if args.require_certified && !report.certified {
        return Err(CliError::Uncertified { message: hocat_summary(&report), output });
    }
    Ok(output)
}

pub fn parse_field(text: &str) -> Result<Coefficients, CliError> {
    match text {
        "Z" | "z" => Ok(Coefficients::Integers),
        "Q" | "q" | "0" => Ok(Coefficients::Field(Field::Rationals)),
        p => {
            let p: u64 = p
                .trim_start_matches(['F', 'f'])
                .parse()
                .map_err(|_| CliError::Validation(format!("unknown field `{text}` (use Z, Q or a prime)")))?;
            Field::prime(p).map(Coefficients::Field).map_err(|e| CliError::Validation(e.to_string()))
        }
    }
}

pub fn invariants(input: &Path, coefficients: Coefficients, depth: usize) -> Result<String, CliError> {
    let pres = Source::read(input)?.presentation()?;
    let f = pres.finiteness();
    let mut out = String::new();
    let _ = writeln!(out, "shape: {}; finite: {}", counts_line(&pres), if f.finite { "yes" } else { "no" });
    let _ = writeln!(out, "env homology ({coefficients}): {}", pres.env_homology(coefficients));
    out.push_str("fibers:\n");
    for p in pres.base().names() {
        let fiber = pres.fiber(p)?;
        let h = fiber.env_homology(coefficients);
        let acyclic = h.degrees.len() == 1 && h.degree(0).rank == 1 && h.degree(0).torsion.is_empty();
        let _ = writeln!(
            out,
            "  {p}: {}; {}{}",
            plural(fiber.shape().len(), "element"),
            h,
            if acyclic { "; acyclic" } else { "" }
        );
    }
    let report = Localization::new(&pres, LocalizeOptions { depth, ..Default::default() })?.into_report();
    let verdict = if !report.certified {
        format!("unknown (localization uncertified at depth {depth})")
    } else if check_conservative_over_p(&report, &pres) {
        "yes".into()
    } else {
        "no".into()
    };
    let _ = writeln!(out, "conservative: {verdict}");
    Ok(out)
}

fn dims_line(rep: &Representation) -> String {
    let shape = rep.pres().shape();
    let parts: Vec<String> = (0..shape.len()).map(|i| format!("{}={}", shape.name(i), rep.dims()[i])).collect();
    parts.join(" ")
}

/// `files` is `[representation]` or `[presentation, representation]`; in the
/// latter case the representation is read against the given presentation.
pub fn check_rep(files: &[&Path], recollement: Option<&str>) -> Result<String, CliError> {
    let (pres_path, rep_path) = match files {
        [r] => (None, *r),
        [p, r] => (Some(*p), *r),
        _ => return Err(CliError::Validation("expected one or two input files".into())),
    };
    let src = Source::read(rep_path)?;
    let json = src.parse()?;
    let mut rep = Representation::from_json(&json).map_err(|e| match CliError::from(e) {
        CliError::Validation(m) => src.invalid(m),
        other => other,
    })?;
    if let Some(p) = pres_path {
        let pres = Source::read(p)?.presentation()?;
        rep = rep.with_presentation(&pres)?;
    }
    let mut out = String::new();
    let _ = writeln!(out, "field: {}; dims: {}", rep.field(), dims_line(&rep));
    let verdict = rep.is_p_constructible();
    if verdict.constructible {
        out.push_str("constructible: yes\n");
    } else {
        let offenders: Vec<String> = verdict.offenders.iter().map(|[a, b]| format!("{a}→{b}")).collect();
        let _ = writeln!(out, "constructible: no; marked edges not inverted: {}", offenders.join(", "));
    }
    if let Some(open) = recollement {
        let names = split_list(open);
        let spec = rep
            .pres()
            .base()
            .classify_named(&names)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        if !spec.is_open() {
            return Err(CliError::Validation(format!("`{open}` is not an open subset of the strata")));
        }
        let data = recollement_decompose(&rep, &spec)?;
        let _ = writeln!(out, "open part ({}): {}", spec.member_names().join(","), dims_line(&data.open_part));
        let _ = writeln!(out, "closed part: {}", dims_line(&data.closed_part));
        let shape = data.closed_part.pres().shape();
        for (i, g) in data.gluing.iter().enumerate() {
            let _ = writeln!(out, "  gluing at {}: {}×{} of rank {}", shape.name(i), g.rows(), g.cols(), g.rank());
        }
        out.push_str("reassembly: exact\n");
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Parses `1,1,1` (object order) or `k=1,b=2` (missing objects get 0).
pub fn parse_dims(text: &str, objects: &[String]) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Validation(format!("cannot read dimensions `{text}`"));
    let items = split_list(text);
    if items.iter().any(|s| s.contains('=')) {
        let mut dims = vec![0; objects.len()];
        for (name, value) in parse_pairs(text)? {
            let i = objects
                .iter()
                .position(|o| *o == name)
                .ok_or_else(|| CliError::Validation(format!("unknown object `{name}` in `{text}`")))?;
            dims[i] = value.parse().map_err(|_| bad())?;
        }
        Ok(dims)
    } else {
        let dims: Vec<usize> = items.iter().map(|s| s.parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        if dims.len() != objects.len() {
            return Err(CliError::Validation(format!(
                "`{text}` gives {} dimensions for {} objects ({})",
                dims.len(),
                objects.len(),
                objects.join(", ")
            )));
        }
        Ok(dims)
    }
}

pub fn count(input: &Path, q: u64, dims: &[String], budget: u64, format: Format) -> Result<String, CliError> {
    let src = Source::read(input)?;
    let options = CountOptions { q, budget };
    let results: Vec<CountResult> = if src.kind()? == Kind::Category {
        let cat: FinCategory = src.category()?;
        dims.iter()
            .map(|d| Ok(count_reps_category(&cat, &parse_dims(d, cat.objects())?, options)?))
            .collect::<Result<_, CliError>>()?
    } else {
        let pres = src.presentation()?;
        dims.iter()
            .map(|d| Ok(count_reps(&pres, &parse_dims(d, pres.shape().names())?, options)?))
            .collect::<Result<_, CliError>>()?
    };
    match format {
        Format::Json => Ok(pretty(&results)),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["dims", "q", "functors", "classes", "cardinality", "group_order"])
                .map_err(|e| CliError::Internal(e.to_string()))?;
            for r in &results {
                let d: Vec<String> = r.dims.iter().map(|(o, n)| format!("{o}={n}")).collect();
                w.write_record([
                    d.join(" "),
                    r.q.to_string(),
                    r.functors.to_string(),
                    r.classes.to_string(),
                    r.cardinality.to_string(),
                    r.group_order.to_string(),
                ])
                .map_err(|e| CliError::Internal(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv of strings is utf-8"))
        }
    }
}

fn split_list(text: &str) -> Vec<String> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned).collect()
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, CliError> {
    split_list(text)
        .into_iter()
        .map(|item| match item.split_once('=') {
            Some((k, v)) => Ok((k.trim().to_owned(), v.trim().to_owned())),
            None => Err(CliError::Validation(format!("expected `name=value`, got `{item}`"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_by_position_and_by_name() {
        let objs: Vec<String> = ["b", "k", "r"].iter().map(|s| s.to_string()).collect();
        assert_eq!(parse_dims("1,2,3", &objs).unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_dims("k=2, r=1", &objs).unwrap(), vec![0, 2, 1]);
        assert!(parse_dims("1,2", &objs).is_err());
        assert!(parse_dims("z=1", &objs).is_err());
    }

    #[test]
    fn fields() {
        assert_eq!(parse_field("Z").unwrap(), Coefficients::Integers);
        assert_eq!(parse_field("F2").unwrap(), Coefficients::Field(Field::Prime(2)));
        assert_eq!(parse_field("Q").unwrap(), Coefficients::Field(Field::Rationals));
        assert!(parse_field("4").is_err());
    }
}
