//! Command-line front end: JSON covers in, canonical JSON certificates and
//! CSV profiles out.
//!
//! Exit codes: 0 success, 1 verification or oracle disagreement, 2 invalid
//! input, 3 internal invariant violation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::circle_sets::CircleSet;
use crate::correlation;
use crate::error::{Error, Result};
use crate::geometric_partition::GeometricPartition;
use crate::oracle::{self, OracleReport};
use crate::raimi_circle::{self, CircleCover, RaimiCertificate};
use crate::rational::Rational;
use crate::torus::{self, AxisBox, BoxSet, TorusCertificate, TorusCover};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

/// Name of the environment variable that keeps full step records.
pub const TRACE_ENV: &str = "RAIMI_TRACE";

#[derive(Debug, Parser)]
#[command(name = "raimi", version, about = "Unavoidable partitions of the circle and torus, with exact certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Print the geometric partition for (r, t).
    Partition {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a cover and write its certificate.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate against a cover.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correlation profile of two circle sets as CSV.
    Profile {
        /// Inline JSON array of [lo, hi] pairs, or a path to one.
        #[arg(long = "E")]
        e: String,
        #[arg(long = "F")]
        f: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Independent lattice check (and, on the circle, exhaustive search).
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub emit_trace: bool,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Self {
        RunConfig {
            command: cli.command,
            emit_trace: std::env::var(TRACE_ENV).is_ok_and(|v| v == "1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cover {
    Circle(CircleCover),
    Torus(TorusCover),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedCover {
    pub names: Vec<String>,
    pub cover: Cover,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Circle(RaimiCertificate),
    Torus(TorusCertificate),
}

impl Certificate {
    pub fn verified(&self) -> bool {
        match self {
            Certificate::Circle(c) => c.verified,
            Certificate::Torus(c) => c.verified,
        }
    }

    pub fn compact(&self) -> Certificate {
        match self {
            Certificate::Circle(c) => Certificate::Circle(c.compact()),
            Certificate::Torus(c) => Certificate::Torus(c.compact()),
        }
    }

    fn to_value(&self) -> Result<Value> {
        Ok(match self {
            Certificate::Circle(c) => serde_json::to_value(c)?,
            Certificate::Torus(c) => serde_json::to_value(c)?,
        })
    }
}

#[derive(Deserialize, Serialize)]
struct CoverDoc {
    dim: usize,
    cover: Vec<SetDoc>,
}

#[derive(Deserialize, Serialize)]
struct SetDoc {
    #[serde(default)]
    name: Option<String>,
    boxes: Vec<Vec<(Rational, Rational)>>,
}

/// Ranges of one coordinate after reading `lo > hi` as a wrapping arc.
fn axis_ranges(lo: &Rational, hi: &Rational) -> Result<Vec<(Rational, Rational)>> {
    for x in [lo, hi] {
        if x.is_negative() || *x > 1 {
            return Err(Error::InvalidRange {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
    }
    Ok(CircleSet::normalize(&[(lo.clone(), hi.clone())])?
        .intervals()
        .to_vec())
}

fn expand_box(b: &[(Rational, Rational)]) -> Result<Vec<AxisBox>> {
    let mut out: Vec<AxisBox> = vec![Vec::new()];
    for (lo, hi) in b {
        let ranges = axis_ranges(lo, hi)?;
        out = out
            .into_iter()
            .flat_map(|prefix| {
                ranges.iter().map(move |range| {
                    let mut next = prefix.clone();
                    next.push(range.clone());
                    next
                })
            })
            .collect();
    }
    Ok(out)
}

/// Reads a cover document; `dim = 1` yields a circle cover.
pub fn parse_cover(text: &str) -> Result<NamedCover> {
    let doc: CoverDoc = serde_json::from_str(text)?;
    if doc.dim == 0 {
        return Err(Error::InvalidParameter("dim must be at least 1".into()));
    }
    let names = doc
        .cover
        .iter()
        .enumerate()
        .map(|(i, s)| s.name.clone().unwrap_or_else(|| format!("F{}", i + 1)))
        .collect();
    let mut sets = Vec::with_capacity(doc.cover.len());
    for set in &doc.cover {
        let mut raw = Vec::new();
        for b in &set.boxes {
            if b.len() != doc.dim {
                return Err(Error::DimensionMismatch {
                    expected: doc.dim,
                    found: b.len(),
                });
            }
            raw.extend(expand_box(b)?);
        }
        sets.push(BoxSet::disjointify(&raw, doc.dim)?);
    }
    let cover = if doc.dim == 1 {
        let circle = sets
            .iter()
            .map(BoxSet::to_circle_set)
            .collect::<Result<Vec<_>>>()?;
        Cover::Circle(CircleCover::new(circle)?)
    } else {
        Cover::Torus(TorusCover::new(sets)?)
    };
    Ok(NamedCover { names, cover })
}

/// Canonical JSON: sorted keys, two-space indent, trailing LF.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let value = serde_json::to_value(value)?;
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

pub fn emit_cover(cover: &NamedCover) -> Result<String> {
    let (dim, sets): (usize, Vec<BoxSet>) = match &cover.cover {
        Cover::Circle(c) => (1, c.sets().iter().map(BoxSet::from_circle_set).collect()),
        Cover::Torus(c) => (c.dim(), c.sets().to_vec()),
    };
    let doc = CoverDoc {
        dim,
        cover: cover
            .names
            .iter()
            .zip(&sets)
            .map(|(name, set)| SetDoc {
                name: Some(name.clone()),
                boxes: set.boxes(),
            })
            .collect(),
    };
    canonical_json(&doc)
}

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let value: Value = serde_json::from_str(text)?;
    if value.get("circle").is_some() {
        Ok(Certificate::Torus(serde_json::from_value(value)?))
    } else {
        Ok(Certificate::Circle(serde_json::from_value(value)?))
    }
}

pub fn certificate_json(cert: &Certificate) -> Result<String> {
    canonical_json(&cert.to_value()?)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn emit_certificate(cert: &Certificate, out: Option<&Path>) -> Result<()> {
    write_output(out, &certificate_json(cert)?)
}

pub fn profile_csv(e: &CircleSet, f: &CircleSet) -> String {
    let profile = correlation::build_profile(e, f);
    let mut text = String::from("theta,f\n");
    for (theta, value) in profile.breakpoints().iter().zip(profile.values()) {
        text.push_str(&format!("{theta},{value}\n"));
    }
    text
}

pub fn emit_profile_csv(e: &CircleSet, f: &CircleSet, out: Option<&Path>) -> Result<()> {
    write_output(out, &profile_csv(e, f))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn circle_set_arg(arg: &str) -> Result<CircleSet> {
    let text = if arg.trim_start().starts_with('[') {
        arg.to_string()
    } else {
        read(Path::new(arg))?
    };
    Ok(serde_json::from_str(&text)?)
}

fn solve_cover(cover: &Cover, r: u32, k: Option<u64>) -> Result<Certificate> {
    Ok(match cover {
        Cover::Circle(c) => Certificate::Circle(raimi_circle::solve(r, c, k)?),
        Cover::Torus(c) => Certificate::Torus(torus::solve_torus(r, c, k)?),
    })
}

#[derive(Serialize)]
struct VerifyReport {
    verified: bool,
    failures: Vec<String>,
}

fn check(cert: &Certificate, cover: &Cover) -> Result<Vec<String>> {
    let outcome = match (cert, cover) {
        (Certificate::Circle(c), Cover::Circle(cv)) => raimi_circle::check(c, cv),
        (Certificate::Torus(c), Cover::Torus(cv)) => torus::check_torus(c, cv),
        _ => Err(Error::StructuralMismatch(
            "certificate and cover live on different spaces".into(),
        )),
    };
    match outcome {
        Err(Error::StructuralMismatch(msg)) => Ok(vec![msg]),
        other => other,
    }
}

fn oracle_report(cover: &Cover, cert: &Certificate, r: u32) -> Result<OracleReport> {
    match (cert, cover) {
        (Certificate::Circle(c), Cover::Circle(cv)) => {
            oracle::exhaustive_witness(r, c.k, cv, c, oracle::CANDIDATE_LIMIT)
        }
        (Certificate::Torus(c), Cover::Torus(cv)) => Ok(oracle::cross_validate_torus(c, cv)),
        _ => Err(Error::StructuralMismatch(
            "certificate and cover live on different spaces".into(),
        )),
    }
}

/// Runs one command; `Ok(false)` means a verification or agreement failure.
pub fn run(config: &RunConfig) -> Result<bool> {
    match &config.command {
        Command::Partition { r, t, k, out } => {
            let partition = GeometricPartition::build(*r, *t, *k)?;
            write_output(out.as_deref(), &canonical_json(&partition)?)?;
            Ok(true)
        }
        Command::Solve { input, r, k, out } => {
            let cover = parse_cover(&read(input)?)?;
            let cert = solve_cover(&cover.cover, *r, *k)?;
            let cert = if config.emit_trace { cert } else { cert.compact() };
            emit_certificate(&cert, out.as_deref())?;
            Ok(cert.verified())
        }
        Command::Verify { input, cert, out } => {
            let cover = parse_cover(&read(input)?)?;
            let cert = parse_certificate(&read(cert)?)?;
            let failures = check(&cert, &cover.cover)?;
            let report = VerifyReport {
                verified: failures.is_empty(),
                failures,
            };
            write_output(out.as_deref(), &canonical_json(&report)?)?;
            Ok(report.verified)
        }
        Command::Profile { e, f, out } => {
            let (e, f) = (circle_set_arg(e)?, circle_set_arg(f)?);
            emit_profile_csv(&e, &f, out.as_deref())?;
            Ok(true)
        }
        Command::Oracle { input, r, cert, out } => {
            let cover = parse_cover(&read(input)?)?;
            let cert = match cert {
                Some(path) => parse_certificate(&read(path)?)?,
                None => solve_cover(&cover.cover, *r, None)?,
            };
            let report = oracle_report(&cover.cover, &cert, *r)?;
            write_output(out.as_deref(), &canonical_json(&report)?)?;
            Ok(report.agreement || report.skipped)
        }
    }
}

pub fn exit_code(outcome: &Result<bool>) -> u8 {
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) if e.is_internal() => EXIT_INTERNAL,
        Err(_) => EXIT_INVALID,
    }
}

/// Prints an error, with the partial rotation trace for internal failures.
pub fn report_error(err: &Error) {
    eprintln!("error: {err}");
    if let Error::Invariant { trace: Some(trace), .. } = err {
        if let Ok(text) = canonical_json(trace.as_ref()) {
            eprint!("{text}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    const HALVES: &str = r#"{"dim":1,"cover":[{"name":"F1","boxes":[[["0","1/2"]]]},{"name":"F2","boxes":[[["1/2","1"]]]}]}"#;

    #[test]
    fn parse_cover_examples() {
        let parsed = parse_cover(HALVES).unwrap();
        match &parsed.cover {
            Cover::Circle(c) => assert_eq!(c.t(), 2),
            other => panic!("unexpected {other:?}"),
        }

        let gap = HALVES.replace(r#"["1/2","1"]"#, r#"["1/2","3/4"]"#);
        match parse_cover(&gap).unwrap_err() {
            Error::NotACover { gap, measure } => {
                assert_eq!(gap, "{[3/4,1)}");
                assert_eq!(measure, "3/4");
            }
            other => panic!("unexpected {other:?}"),
        }

        let torus = r#"{"dim":2,"cover":[{"name":"L","boxes":[[["0","1/2"],["0","1"]]]},{"name":"R","boxes":[[["1/2","1"],["0","1"]]]}]}"#;
        assert!(matches!(parse_cover(torus).unwrap().cover, Cover::Torus(_)));
    }

    #[test]
    fn parse_cover_errors() {
        assert!(matches!(
            parse_cover(&HALVES.replace("1/2", "1/0")),
            Err(Error::MalformedRational(_)) | Err(Error::Parse(_))
        ));
        let bad_dim = HALVES.replace(r#"[["0","1/2"]]"#, r#"[["0","1/2"],["0","1"]]"#);
        assert!(matches!(parse_cover(&bad_dim), Err(Error::DimensionMismatch { .. })));
        let degenerate = HALVES.replace(r#"["1/2","1"]"#, r#"["1/2","1/2"]"#);
        assert!(matches!(parse_cover(&degenerate), Err(Error::DegenerateArc { .. })));
    }

    #[test]
    fn wrapping_boxes() {
        let text = r#"{"dim":2,"cover":[{"boxes":[[["3/4","1/4"],["0","1"]]]},{"boxes":[[["1/4","3/4"],["0","1"]]]}]}"#;
        let parsed = parse_cover(text).unwrap();
        assert_eq!(parsed.names, vec!["F1", "F2"]);
        let Cover::Torus(c) = parsed.cover else { panic!() };
        assert_eq!(c.set(1).measure(), q("1/2"));
        assert!(c.set(1).contains(&[q("0"), q("1/2")]));
    }

    #[test]
    fn cover_round_trip() {
        for text in [
            HALVES,
            r#"{"dim":2,"cover":[{"name":"A","boxes":[[["0","1/2"],["0","1/2"]],[["1/4","3/4"],["1/4","3/4"]]]},{"name":"B","boxes":[[["0","1"],["0","1"]]]}]}"#,
        ] {
            let parsed = parse_cover(text).unwrap();
            let emitted = emit_cover(&parsed).unwrap();
            assert_eq!(parse_cover(&emitted).unwrap(), parsed);
            assert_eq!(emit_cover(&parse_cover(&emitted).unwrap()).unwrap(), emitted);
        }
    }

    #[test]
    fn certificate_json_examples() {
        let Cover::Circle(cover) = parse_cover(HALVES).unwrap().cover else { panic!() };
        let cert = Certificate::Circle(raimi_circle::solve(2, &cover, None).unwrap());
        let text = certificate_json(&cert).unwrap();
        assert!(text.contains(r#""theta": "65/131""#));
        assert!(text.contains(r#""verified": true"#));
        assert!(text.ends_with('\n') && !text.contains('\r'));
        assert_eq!(parse_certificate(&text).unwrap(), cert);
        assert_eq!(certificate_json(&parse_certificate(&text).unwrap()).unwrap(), text);
    }

    #[test]
    fn torus_certificate_round_trip() {
        let text = r#"{"dim":2,"cover":[{"boxes":[[["0","1/2"],["0","1"]]]},{"boxes":[[["1/2","1"],["0","1"]]]}]}"#;
        let cover = parse_cover(text).unwrap().cover;
        let cert = solve_cover(&cover, 2, None).unwrap();
        let json = certificate_json(&cert).unwrap();
        assert_eq!(parse_certificate(&json).unwrap(), cert);
        assert!(check(&cert, &cover).unwrap().is_empty());
    }

    #[test]
    fn profile_csv_example() {
        let half = CircleSet::interval(q("0"), q("1/2")).unwrap();
        assert_eq!(profile_csv(&half, &half), "theta,f\n0,1/2\n1/2,0\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Ok(true)), 0);
        assert_eq!(exit_code(&Ok(false)), 1);
        assert_eq!(exit_code(&Err(Error::Parse("x".into()))), 2);
        assert_eq!(exit_code(&Err(Error::invariant("x"))), 3);
    }
}
