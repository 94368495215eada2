//! Command-line front end. Every subcommand emits a report of named checks
//! as JSON or CSV and maps the outcome to an exit code: 0 when every check
//! passes, 1 when a mathematical check fails, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::expansion::{expand, gram_matrix, quad_cap, ExpansionReport, Target};
use crate::operator::{
    apply_t_polynomial, f_condition_residuals, f_space_dimension, greens_residual, in_f_space,
    sesquilinear_limit, Jet,
};
use crate::polyalg::{format_rational, parse_rational, Polynomial, RatPoly, Rational, Scalar};
use crate::real::DoubleDouble;
use crate::spectral::{
    boundary_case, classify_endpoint, deficiency_index, gap_certificate, h_bracket_at_one, indicial_roots,
    Endpoint,
};
use crate::xjacobi::{clause_report, exceptional_poly_in, validate_params, ExceptionalFamily};

#[derive(Debug, Parser)]
#[command(name = "xjacobi", version, about = "Exceptional Jacobi polynomials and their spectral checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F64,
    Dd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Eigen,
    Ortho,
    Greens,
    Fspace,
    Gap,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("not a rational or decimal number: {s:?}"))
}

fn target_arg(s: &str) -> Result<Target, String> {
    Target::parse(s).ok_or_else(|| format!("unknown target {s:?} (exp, runge, abs-shift, poly:c0,c1,..., member:n)"))
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// alpha, as p/q, an integer or a decimal
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub alpha: Rational,
    /// beta, as p/q, an integer or a decimal
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub beta: Rational,
    /// codimension m >= 1
    #[arg(long)]
    pub m: u32,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "json")]
    pub output: Output,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the admissibility conditions clause by clause
    Validate(Common),
    /// Tabulate the family members with eigenvalues and coefficients
    Table {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_max: Option<u32>,
    },
    /// Run a verification suite
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_max: Option<u32>,
    },
    /// Endpoint classification, deficiency index and boundary conditions
    Classify(Common),
    /// Expand a target function in the family and report residual decay
    Expand {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = target_arg, default_value = "exp")]
        target: Target,
        /// highest degree M of the expansion
        #[arg(long, default_value_t = 30)]
        max_degree: u32,
        #[arg(long, value_enum, default_value = "f64")]
        precision: Precision,
    },
}

/// One named check in a report.
#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub pass: bool,
    pub residual: Option<f64>,
    pub details: Value,
}

impl CaseResult {
    fn new(name: impl Into<String>, pass: bool, residual: Option<f64>, details: Value) -> Self {
        Self {
            name: name.into(),
            pass,
            residual,
            details,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: Value,
    pub results: Vec<CaseResult>,
    pub summary: Summary,
}

impl Report {
    fn new(config: Value, results: Vec<CaseResult>) -> Self {
        let passed = results.iter().filter(|r| r.pass).count();
        let failed = results.len() - passed;
        Self {
            config,
            results,
            summary: Summary { passed, failed },
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.summary.failed == 0 {
            0
        } else {
            1
        }
    }
}

/// CSV layout for a report.
enum CsvShape {
    Generic,
    Table,
    Residuals,
}

fn config_json(c: &Common, command: &str, extra: Value) -> Value {
    let mut v = json!({
        "command": command,
        "alpha": format_rational(&c.alpha),
        "beta": format_rational(&c.beta),
        "m": c.m,
        "mode": c.mode,
        "output": c.output,
        "quad_cap": quad_cap(),
    });
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    v
}

fn coeff_strings<S: Scalar>(p: &Polynomial<S>, exact: impl Fn(&S) -> String) -> Vec<String> {
    p.coeffs().iter().map(exact).collect()
}

fn rat_coeffs(p: &RatPoly) -> Vec<String> {
    coeff_strings(p, format_rational)
}

fn family(c: &Common) -> Result<ExceptionalFamily, Error> {
    ExceptionalFamily::from_params(c.alpha.clone(), c.beta.clone(), c.m)
}

fn invalid_report(c: &Common, command: &str, err: &Error) -> Report {
    let mut results: Vec<CaseResult> = clause_report(&c.alpha, &c.beta, c.m)
        .into_iter()
        .map(|cl| CaseResult::new(cl.clause, cl.pass, None, json!(cl.detail)))
        .collect();
    results.push(CaseResult::new("family", false, None, json!(err.to_string())));
    Report::new(config_json(c, command, json!({})), results)
}

fn cmd_validate(c: &Common) -> Report {
    let mut results: Vec<CaseResult> = clause_report(&c.alpha, &c.beta, c.m)
        .into_iter()
        .map(|cl| CaseResult::new(cl.clause, cl.pass, None, json!(cl.detail)))
        .collect();
    if validate_params(c.alpha.clone(), c.beta.clone(), c.m).is_ok() {
        let (pass, detail) = match family(c) {
            Ok(f) => (
                true,
                json!({
                    "denominator": rat_coeffs(f.denominator()),
                    "roots": f.denominator_roots().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                }),
            ),
            Err(e) => (false, json!(e.to_string())),
        };
        results.push(CaseResult::new("denominator-roots", pass, None, detail));
    }
    Report::new(config_json(c, "validate", json!({})), results)
}

fn cmd_table(c: &Common, n_max: u32) -> Result<Report, Error> {
    let fam = family(c)?;
    let mut results = Vec::new();
    for n in c.m..=n_max {
        let lambda = fam.eigenvalue(n)?;
        let (degree, coeffs) = match c.mode {
            Mode::Exact => {
                let p = fam.exceptional_poly(n)?;
                (p.signed_degree(), rat_coeffs(&p))
            }
            Mode::Float => {
                let p = exceptional_poly_in::<f64>(fam.params(), n)?;
                (p.signed_degree(), coeff_strings(&p, |v| format!("{v:e}")))
            }
        };
        results.push(CaseResult::new(
            format!("n={n}"),
            degree == n as i64,
            None,
            json!({
                "n": n,
                "degree": degree,
                "eigenvalue": format_rational(&lambda),
                "coefficients": coeffs,
            }),
        ));
    }
    Ok(Report::new(config_json(c, "table", json!({ "n_max": n_max })), results))
}

fn verify_eigen(c: &Common, fam: &ExceptionalFamily, n_max: u32) -> Result<Vec<CaseResult>, Error> {
    let mut out = Vec::new();
    for n in c.m..=n_max {
        let lambda = fam.eigenvalue(n)?;
        let (pass, residual) = match c.mode {
            Mode::Exact => {
                let y = fam.exceptional_poly(n)?;
                let ty = apply_t_polynomial(fam, &y)?;
                let diff = &ty - &y.scale(&lambda);
                (diff.is_zero(), diff.max_coeff_diff(&RatPoly::zero()))
            }
            Mode::Float => {
                let y = exceptional_poly_in::<f64>(fam.params(), n)?;
                let ty = apply_t_polynomial(fam, &y)?;
                let ly = y.scale(&lambda.to_f64());
                (ty.approx_eq(&ly), ty.max_coeff_diff(&ly))
            }
        };
        out.push(CaseResult::new(
            format!("eigen n={n}"),
            pass,
            Some(residual),
            json!({ "eigenvalue": format_rational(&lambda) }),
        ));
    }
    Ok(out)
}

fn verify_ortho(fam: &ExceptionalFamily, n_max: u32) -> Result<Vec<CaseResult>, Error> {
    let g = gram_matrix::<f64>(fam, n_max)?;
    let ratio = g.max_offdiag_ratio();
    Ok(vec![CaseResult::new(
        "gram",
        ratio < 1e-10 && g.is_symmetric() && g.diagonal_positive(),
        Some(ratio),
        json!({
            "degrees": g.degrees,
            "quad_order": g.quad_order,
            "diagonal": (0..g.entries.len()).map(|i| g.entries[i][i]).collect::<Vec<_>>(),
        }),
    )])
}

/// Six smooth functions on `[-1, 1]`; their boundary functionals vanish at
/// every endpoint, so they satisfy any row of the boundary table.
pub fn smooth_battery(fam: &ExceptionalFamily) -> Result<Vec<(String, Jet<'static>)>, Error> {
    let member = fam.exceptional_poly(fam.m() + 2)?;
    let quad = Polynomial::new(vec![
        crate::polyalg::int(1),
        crate::polyalg::ratio(-1, 2),
        crate::polyalg::int(1),
    ]);
    Ok(vec![
        ("one".into(), Jet::new(|_| 1.0, |_| 0.0, |_| 0.0)),
        ("x^2-x/2+1".into(), Jet::polynomial(&quad)),
        (format!("member:{}", fam.m() + 2), Jet::polynomial(&member)),
        ("exp".into(), Jet::new(f64::exp, f64::exp, f64::exp)),
        (
            "sin(2x)".into(),
            Jet::new(|x| (2.0 * x).sin(), |x| 2.0 * (2.0 * x).cos(), |x| -4.0 * (2.0 * x).sin()),
        ),
        (
            "1/(3-x)".into(),
            Jet::new(|x| 1.0 / (3.0 - x), |x| (3.0 - x).powi(-2), |x| 2.0 * (3.0 - x).powi(-3)),
        ),
    ])
}

fn verify_greens(fam: &ExceptionalFamily) -> Result<Vec<CaseResult>, Error> {
    let battery = smooth_battery(fam)?;
    let mut out = Vec::new();
    for i in 0..battery.len() {
        for j in i..battery.len() {
            let (nf, f) = &battery[i];
            let (ng, g) = &battery[j];
            let r = greens_residual(fam, f, g, 16)?;
            out.push(CaseResult::new(
                format!("greens {nf} / {ng}"),
                r.residual < 1e-8,
                Some(r.residual),
                json!({ "lhs": r.lhs, "rhs_integral": r.rhs_integral, "boundary": r.boundary, "quad_order": r.quad_order }),
            ));
        }
    }
    Ok(out)
}

fn verify_fspace(fam: &ExceptionalFamily, top: u32) -> Result<Vec<CaseResult>, Error> {
    let m = fam.m();
    let mut out = Vec::new();
    let mut top_degree = 2 * m;
    while top_degree <= top {
        let worst = (m..=top_degree)
            .map(|j| fam.exceptional_poly(j))
            .collect::<Result<Vec<_>, _>>()?;
        let all_exact = worst.iter().all(|p| in_f_space(fam, p));
        let max_float = worst
            .iter()
            .flat_map(|p| f_condition_residuals(fam, p))
            .fold(0.0f64, f64::max);
        let dim = f_space_dimension(fam, top_degree as usize);
        let count = (top_degree - m + 1) as usize;
        out.push(CaseResult::new(
            format!("fspace degree<={top_degree}"),
            all_exact && max_float < 1e-10 && dim == count,
            Some(max_float),
            json!({ "members_in_f": all_exact, "dim_f": dim, "member_count": count }),
        ));
        top_degree += 1;
    }
    Ok(out)
}

fn verify_gap(fam: &ExceptionalFamily) -> Vec<CaseResult> {
    (0..=fam.m() as usize)
        .map(|d| {
            let cert = gap_certificate(fam, d);
            let expected = d < fam.m() as usize;
            let witness = cert
                .witness
                .as_ref()
                .map(|(l, y)| json!({ "eigenvalue": format_rational(l), "coefficients": rat_coeffs(y) }));
            CaseResult::new(
                format!("gap d={d}"),
                cert.certified == expected,
                None,
                json!({ "certified": cert.certified, "expected": expected, "dim_f": cert.f_dimension, "witness": witness }),
            )
        })
        .collect()
}

fn cmd_verify(c: &Common, suite: Suite, n_max: Option<u32>) -> Result<Report, Error> {
    let fam = family(c)?;
    let results = match suite {
        Suite::Eigen => verify_eigen(c, &fam, n_max.unwrap_or(c.m + 4))?,
        Suite::Ortho => verify_ortho(&fam, n_max.unwrap_or(c.m + 8))?,
        Suite::Greens => verify_greens(&fam)?,
        Suite::Fspace => verify_fspace(&fam, n_max.unwrap_or(12))?,
        Suite::Gap => verify_gap(&fam),
    };
    Ok(Report::new(
        config_json(c, "verify", json!({ "suite": suite, "n_max": n_max })),
        results,
    ))
}

fn cmd_classify(c: &Common) -> Result<Report, Error> {
    let fam = family(c)?;
    let p = fam.params();
    let mut results = Vec::new();
    for e in Endpoint::both() {
        let d = indicial_roots(p, e);
        results.push(CaseResult::new(
            format!("endpoint {e}"),
            true,
            None,
            json!({
                "indicial": d,
                "class": classify_endpoint(p, e),
            }),
        ));
    }
    let index = deficiency_index(p);
    let case = boundary_case(p);
    results.push(CaseResult::new(
        "deficiency",
        case.functionals.len() as u32 == index.n_plus,
        None,
        json!({ "index": index.to_string(), "n_plus": index.n_plus, "n_minus": index.n_minus }),
    ));
    results.push(CaseResult::new(
        "boundary-case",
        true,
        None,
        json!({ "case": case.id, "functionals": case.functionals, "domain": case.describe() }),
    ));

    let d1 = fam.denominator_at_one();
    let (coef, exp2) = h_bracket_at_one(&fam);
    let exact = coef.to_f64() * 2f64.powf(exp2.to_f64());
    let alpha = p.alpha_f64();
    let h = Jet::new(
        move |x| (1.0 - x).powf(-alpha),
        move |x| alpha * (1.0 - x).powf(-alpha - 1.0),
        move |x| alpha * (alpha + 1.0) * (1.0 - x).powf(-alpha - 2.0),
    );
    let one = Jet::new(|_| 1.0, |_| 0.0, |_| 0.0);
    let (pass, residual, numeric) = match sesquilinear_limit(&fam, &h, &one, Endpoint::Plus) {
        Ok(est) => {
            let rel = (est.value - exact).abs() / exact.abs();
            (exact != 0.0 && rel < 1e-8, Some(rel), json!(est.value))
        }
        Err(e) => (false, None, json!(e.to_string())),
    };
    results.push(CaseResult::new(
        "bracket-h-one",
        pass,
        residual,
        json!({
            "denominator_at_one": format_rational(&d1),
            "exact": exact,
            "numeric": numeric,
        }),
    ));
    Ok(Report::new(config_json(c, "classify", json!({})), results))
}

fn cmd_expand(c: &Common, target: &Target, max_degree: u32, precision: Precision) -> Result<Report, Error> {
    let fam = family(c)?;
    let rep: ExpansionReport = match precision {
        Precision::F64 => expand::<f64>(&fam, &|x| target.eval(&fam, x), max_degree)?,
        Precision::Dd => expand::<DoubleDouble>(&fam, &|x| target.eval(&fam, x), max_degree)?,
    };
    let mut results: Vec<CaseResult> = rep
        .degrees
        .iter()
        .zip(&rep.coefficients)
        .zip(&rep.residual_norms)
        .map(|((n, coef), r)| {
            CaseResult::new(format!("M={n}"), true, Some(*r), json!({ "M": n, "coefficient": coef }))
        })
        .collect();
    results.push(CaseResult::new(
        "monotone",
        rep.is_monotone(1e-9),
        Some(rep.final_residual()),
        json!({
            "strictly_decreasing": rep.is_strictly_decreasing(),
            "f_norm": rep.f_norm,
            "quad_order": rep.quad_order,
            "precision": rep.precision,
            "bessel_gap_error": rep.bessel_gap_error(),
        }),
    ));
    Ok(Report::new(
        config_json(
            c,
            "expand",
            json!({ "target": target.name(), "max_degree": max_degree, "precision": precision }),
        ),
        results,
    ))
}

fn write_csv(report: &Report, shape: CsvShape, out: &mut dyn Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match shape {
        CsvShape::Generic => {
            w.write_record(["name", "pass", "residual", "details"])?;
            for r in &report.results {
                w.write_record([
                    r.name.clone(),
                    r.pass.to_string(),
                    r.residual.map(|v| format!("{v:e}")).unwrap_or_default(),
                    match &r.details {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    },
                ])?;
            }
        }
        CsvShape::Table => {
            w.write_record(["n", "degree", "eigenvalue", "coefficients"])?;
            for r in &report.results {
                let d = &r.details;
                let coeffs: Vec<String> = d["coefficients"]
                    .as_array()
                    .map(|a| a.iter().filter_map(|v| v.as_str().map(str::to_owned)).collect())
                    .unwrap_or_default();
                w.write_record([
                    d["n"].to_string(),
                    d["degree"].to_string(),
                    d["eigenvalue"].as_str().unwrap_or_default().to_owned(),
                    coeffs.join(" "),
                ])?;
            }
        }
        CsvShape::Residuals => {
            w.write_record(["M", "residual"])?;
            for r in report.results.iter().filter(|r| r.details.get("M").is_some()) {
                w.write_record([
                    r.details["M"].to_string(),
                    r.residual.map(|v| format!("{v:e}")).unwrap_or_default(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn emit(report: &Report, output: Output, shape: CsvShape, out: &mut dyn Write) -> std::io::Result<()> {
    match output {
        Output::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)
        }
        Output::Csv => write_csv(report, shape, out).map_err(std::io::Error::other),
    }
}

/// Parses `args`, runs the command, writes the report to `out` and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    let (common, command_name) = match &cli.command {
        Command::Validate(c) => (c, "validate"),
        Command::Table { common, .. } => (common, "table"),
        Command::Verify { common, .. } => (common, "verify"),
        Command::Classify(c) => (c, "classify"),
        Command::Expand { common, .. } => (common, "expand"),
    };
    let (result, shape) = match &cli.command {
        Command::Validate(c) => (Ok(cmd_validate(c)), CsvShape::Generic),
        Command::Table { common, n_max } => (
            cmd_table(common, n_max.unwrap_or(common.m + 3)),
            CsvShape::Table,
        ),
        Command::Verify { suite, common, n_max } => (cmd_verify(common, *suite, *n_max), CsvShape::Generic),
        Command::Classify(c) => (cmd_classify(c), CsvShape::Generic),
        Command::Expand {
            common,
            target,
            max_degree,
            precision,
        } => (
            cmd_expand(common, target, *max_degree, *precision),
            CsvShape::Residuals,
        ),
    };
    let report = match result {
        Ok(r) => r,
        Err(e @ (Error::Param(_) | Error::DegenerateDenominator { .. } | Error::RootInInterval { .. } | Error::RepeatedRoot { .. })) => {
            invalid_report(common, command_name, &e)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Report::new(
                config_json(common, command_name, json!({})),
                vec![CaseResult::new("error", false, None, json!(e.to_string()))],
            )
        }
    };
    let shape = if report.results.iter().any(|r| r.name == "family" || r.name == "error") {
        CsvShape::Generic
    } else {
        shape
    };
    if emit(&report, common.output, shape, out).is_err() {
        return 2;
    }
    report.exit_code()
}
