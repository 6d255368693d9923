use std::fmt::Write as _;
use std::path::Path;

use kleinhilb::character::{extended_character, weight_multiplicity};
use kleinhilb::cyclotomic::CyclotomicInteger;
use kleinhilb::lattice_theta::residue_shells;
use kleinhilb::lie_data::{cartan_matrix, DynkinType};
use kleinhilb::oracle::typea_series_oracle;
use kleinhilb::zeta_series::{local_series_with, surface_series_with, LocalOptions, SurfaceSpec};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cache::{cache_key, Cache};
use crate::config::Settings;
use crate::error::{CliError, EXIT_INTEGRALITY, EXIT_MISMATCH, EXIT_OK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

/// Text for stdout plus the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub code: u8,
}

impl Report {
    fn new(text: String, ok: bool, failure_code: u8) -> Self {
        Report {
            text,
            code: if ok { EXIT_OK } else { failure_code },
        }
    }
}

pub struct Context {
    pub settings: Settings,
    pub cache: Option<Cache>,
    pub format: Format,
}

impl Context {
    pub fn new(settings: Settings, format: Format) -> Result<Self, CliError> {
        let cache = settings.cache_dir.as_deref().map(Cache::open).transpose()?;
        Ok(Context {
            settings,
            cache,
            format,
        })
    }

    fn options(&self, fault: Option<usize>) -> LocalOptions {
        LocalOptions {
            budget: self.settings.budget(),
            inject_fault_at: fault,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficients {
    Integer(Vec<String>),
    /// Emitted only when the integrality certificate fails.
    Cyclotomic(Vec<CyclotomicInteger>),
}

impl Coefficients {
    fn strings(&self) -> Vec<String> {
        match self {
            Coefficients::Integer(v) => v.clone(),
            Coefficients::Cyclotomic(v) => v.iter().map(ToString::to_string).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Integrality {
    pub ok: bool,
    pub first_failure_degree: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDoc {
    pub input: serde_json::Value,
    pub truncation: usize,
    pub series: Coefficients,
    pub integrality: Integrality,
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn render_series(doc: &SeriesDoc, format: Format) -> String {
    match format {
        Format::Json => pretty(doc),
        Format::Csv => {
            let mut out = String::from("degree,coefficient\n");
            for (k, c) in doc.series.strings().iter().enumerate() {
                writeln!(out, "{k},{}", csv_field(c)).unwrap();
            }
            out
        }
        Format::Plain => {
            let mut out = String::new();
            for (k, c) in doc.series.strings().iter().enumerate() {
                writeln!(out, "q^{k}: {c}").unwrap();
            }
            match doc.integrality.first_failure_degree {
                None => out.push_str("integrality: ok\n"),
                Some(d) => writeln!(out, "integrality: FAILED at q^{d}").unwrap(),
            }
            out
        }
    }
}

pub fn series_doc(
    ctx: &Context,
    t: DynkinType,
    n: usize,
    fault: Option<usize>,
) -> Result<SeriesDoc, CliError> {
    let mut input = json!({"command": "series", "type": t});
    if let Some(d) = fault {
        input["inject_integrality_fault"] = json!(d);
    }
    let key = cache_key(&input, n);
    Cache::get_or_compute(ctx.cache.as_ref(), &key, || {
        let r = local_series_with(t, n, &ctx.options(fault))?;
        let series = match &r.series {
            Some(s) => Coefficients::Integer(s.coeffs().iter().map(ToString::to_string).collect()),
            None => Coefficients::Cyclotomic(r.cyclotomic.coeffs().to_vec()),
        };
        Ok(SeriesDoc {
            input,
            truncation: n,
            series,
            integrality: Integrality {
                ok: r.certificate.ok,
                first_failure_degree: r.certificate.first_failure_degree,
            },
        })
    })
}

pub fn cmd_series(
    ctx: &Context,
    t: DynkinType,
    n: usize,
    fault: Option<usize>,
    shells_csv: Option<&Path>,
) -> Result<Report, CliError> {
    if let Some(path) = shells_csv {
        let shells = residue_shells(&cartan_matrix(t), n, 1)
            .map_err(kleinhilb::zeta_series::ZetaError::from)?;
        std::fs::write(path, shells.to_csv())
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    }
    let doc = series_doc(ctx, t, n, fault)?;
    Ok(Report::new(
        render_series(&doc, ctx.format),
        doc.integrality.ok,
        EXIT_INTEGRALITY,
    ))
}

pub fn cmd_surface(
    ctx: &Context,
    spec: &SurfaceSpec,
    n: usize,
    fault: Option<usize>,
) -> Result<Report, CliError> {
    let mut input = json!({
        "command": "surface",
        "chi0": spec.chi_smooth,
        "sing": spec.singularities,
    });
    if let Some(d) = fault {
        input["inject_integrality_fault"] = json!(d);
    }
    let key = cache_key(&input, n);
    let doc: SeriesDoc = Cache::get_or_compute(ctx.cache.as_ref(), &key, || {
        let s = surface_series_with(spec, n, &ctx.options(fault))?;
        Ok(SeriesDoc {
            input,
            truncation: n,
            series: Coefficients::Integer(s.coeffs().iter().map(ToString::to_string).collect()),
            integrality: Integrality {
                ok: true,
                first_failure_degree: None,
            },
        })
    })?;
    Ok(Report::new(
        render_series(&doc, ctx.format),
        true,
        EXIT_INTEGRALITY,
    ))
}

pub enum CharacterQuery {
    Multiplicity { beta: Vec<i32>, degree: usize },
    CheckSpecialization,
    Dump,
}

pub fn cmd_character(
    ctx: &Context,
    t: DynkinType,
    n: usize,
    query: CharacterQuery,
) -> Result<Report, CliError> {
    let budget = ctx.settings.budget();
    match query {
        CharacterQuery::Multiplicity { beta, degree } => {
            let mult = weight_multiplicity(t, &beta, degree, &budget)?.to_string();
            let text = match ctx.format {
                Format::Json => pretty(&json!({
                    "input": {"command": "character", "type": t, "beta": beta, "degree": degree},
                    "multiplicity": mult,
                })),
                Format::Csv => {
                    let b: Vec<String> = beta.iter().map(ToString::to_string).collect();
                    format!(
                        "beta,degree,multiplicity\n{},{degree},{mult}\n",
                        b.join(";")
                    )
                }
                Format::Plain => format!("{mult}\n"),
            };
            Ok(Report::new(text, true, EXIT_OK))
        }
        CharacterQuery::CheckSpecialization => {
            let special = extended_character(t, n, &budget)?.specialize_at_zeta();
            let local = local_series_with(t, n, &ctx.options(None))?;
            let pairs: Vec<(&CyclotomicInteger, &CyclotomicInteger)> = special
                .coeffs()
                .iter()
                .zip(local.cyclotomic.coeffs())
                .collect();
            let first_mismatch = pairs.iter().position(|(a, b)| a != b);
            let ok = first_mismatch.is_none();
            let text = match ctx.format {
                Format::Json => pretty(&json!({
                    "input": {"command": "character", "type": t, "check_specialization": true},
                    "truncation": n,
                    "specialization": {"ok": ok, "first_mismatch_degree": first_mismatch},
                })),
                Format::Csv => {
                    let mut out = String::from("degree,character,local,match\n");
                    for (k, (a, b)) in pairs.iter().enumerate() {
                        writeln!(
                            out,
                            "{k},{},{},{}",
                            csv_field(&a.to_string()),
                            csv_field(&b.to_string()),
                            a == b
                        )
                        .unwrap();
                    }
                    out
                }
                Format::Plain => match first_mismatch {
                    None => "PASS\n".to_string(),
                    Some(d) => format!("FAIL at q^{d}\n"),
                },
            };
            Ok(Report::new(text, ok, EXIT_MISMATCH))
        }
        CharacterQuery::Dump => {
            let c = extended_character(t, n, &budget)?;
            let text = match ctx.format {
                Format::Json => pretty(&json!({
                    "input": {"command": "character", "type": t},
                    "truncation": n,
                    "character": c.to_json(),
                })),
                Format::Csv | Format::Plain => {
                    let mut out = String::new();
                    if ctx.format == Format::Csv {
                        out.push_str("degree,beta,multiplicity\n");
                    }
                    for d in 0..=n {
                        for (beta, mult) in c.coefficient(d)?.iter() {
                            let b: Vec<String> = beta.iter().map(ToString::to_string).collect();
                            if ctx.format == Format::Csv {
                                writeln!(out, "{d},{},{mult}", b.join(";")).unwrap();
                            } else {
                                writeln!(out, "q^{d} [{}] {mult}", b.join(",")).unwrap();
                            }
                        }
                    }
                    out
                }
            };
            Ok(Report::new(text, true, EXIT_OK))
        }
    }
}

#[derive(Debug, Serialize)]
struct VerifyRow {
    r: u32,
    degree: usize,
    formula: String,
    oracle: String,
    #[serde(rename = "match")]
    matches: bool,
}

pub fn cmd_verify(ctx: &Context, r_max: u32, m_max: usize) -> Result<Report, CliError> {
    if r_max < 2 {
        return Err(CliError::Usage(format!(
            "--rmax must be at least 2, got {r_max}"
        )));
    }
    let mut rows = Vec::new();
    for r in 2..=r_max {
        let t = ctx.settings.dynkin_type(&format!("A{}", r - 1))?;
        let doc = series_doc(ctx, t, m_max, None)?;
        let oracle = typea_series_oracle(r, m_max)?;
        let formula = doc.series.strings();
        for (degree, (f, o)) in formula.iter().zip(oracle.coeffs()).enumerate() {
            let o = o.to_string();
            rows.push(VerifyRow {
                r,
                degree,
                matches: *f == o,
                formula: f.clone(),
                oracle: o,
            });
        }
    }
    let ok = rows.iter().all(|row| row.matches);
    let text = match ctx.format {
        Format::Json => pretty(&json!({
            "input": {"command": "verify", "rmax": r_max, "mmax": m_max},
            "rows": rows,
            "ok": ok,
        })),
        Format::Csv | Format::Plain => {
            let mut out = String::from("r,degree,formula,oracle,match\n");
            for row in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    row.r, row.degree, row.formula, row.oracle, row.matches
                )
                .unwrap();
            }
            if ctx.format == Format::Plain {
                out = out.replace(',', "\t");
                out.push_str(if ok {
                    "all coefficients match\n"
                } else {
                    "MISMATCH\n"
                });
            }
            out
        }
    };
    Ok(Report::new(text, ok, EXIT_MISMATCH))
}

pub const DEFAULT_INTEGRALITY_TYPES: &str = "A1,A2,A3,A4,A5,A6,A7,A8,D4,D5,D6,D7,D8,E6,E7,E8";

#[derive(Debug, Serialize)]
struct IntegralityRow {
    #[serde(rename = "type")]
    dynkin_type: DynkinType,
    ok: bool,
    first_failure_degree: Option<usize>,
}

pub fn cmd_integrality(
    ctx: &Context,
    types: &[DynkinType],
    n: usize,
    fault: Option<usize>,
) -> Result<Report, CliError> {
    let mut rows = Vec::new();
    for &t in types {
        let doc = series_doc(ctx, t, n, fault)?;
        rows.push(IntegralityRow {
            dynkin_type: t,
            ok: doc.integrality.ok,
            first_failure_degree: doc.integrality.first_failure_degree,
        });
    }
    let ok = rows.iter().all(|r| r.ok);
    let text = match ctx.format {
        Format::Json => pretty(&json!({
            "input": {"command": "integrality", "types": types},
            "truncation": n,
            "results": rows,
            "ok": ok,
        })),
        Format::Csv => {
            let mut out = String::from("type,ok,first_failure_degree\n");
            for r in &rows {
                let d = r
                    .first_failure_degree
                    .map(|d| d.to_string())
                    .unwrap_or_default();
                writeln!(out, "{},{},{d}", r.dynkin_type, r.ok).unwrap();
            }
            out
        }
        Format::Plain => {
            let mut out = String::new();
            for r in &rows {
                match r.first_failure_degree {
                    None => writeln!(out, "{}: integral to q^{n}", r.dynkin_type).unwrap(),
                    Some(d) => writeln!(out, "{}: NOT integral at q^{d}", r.dynkin_type).unwrap(),
                }
            }
            out
        }
    };
    Ok(Report::new(text, ok, EXIT_INTEGRALITY))
}

pub fn parse_types(ctx: &Context, list: &str) -> Result<Vec<DynkinType>, CliError> {
    let types = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| ctx.settings.dynkin_type(s))
        .collect::<Result<Vec<_>, _>>()?;
    if types.is_empty() {
        return Err(CliError::Usage("empty type list".into()));
    }
    Ok(types)
}

pub fn parse_surface(ctx: &Context, chi0: i64, sing: &str) -> Result<SurfaceSpec, CliError> {
    let singularities = sing
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| ctx.settings.dynkin_type(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SurfaceSpec::new(chi0, singularities))
}

#[derive(Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub ok: bool,
}

pub fn render_checks(checks: &[CheckOutcome], format: Format) -> Report {
    let ok = checks.iter().all(|c| c.ok);
    let text = match format {
        Format::Json => pretty(&json!({"checks": checks, "ok": ok})),
        Format::Csv => {
            let mut out = String::from("check,ok\n");
            for c in checks {
                writeln!(out, "{},{}", csv_field(&c.name), c.ok).unwrap();
            }
            out
        }
        Format::Plain => {
            let mut out = String::new();
            for c in checks {
                writeln!(out, "{} {}", if c.ok { "PASS" } else { "FAIL" }, c.name).unwrap();
            }
            out
        }
    };
    Report::new(text, ok, EXIT_MISMATCH)
}
