use std::collections::BTreeMap;
use std::path::PathBuf;

use polycycle_core::asymptotic::tail_certificate;
use polycycle_core::lie::{
    extend_automorphism, hall_basis, is_quasiunipotent, var_check, QuasiUnipotence,
};
use polycycle_core::quadrature::{iterated_quadrature, saddle_path, PlanarForm};
use polycycle_core::rational::to_f64;
use polycycle_core::{
    certify_zero_free, decompose, elementary_mellin, evaluate, partial_sum, AlgebraElement,
    EdgeIntegral, ElementarySymbol, Piece, ZeroCertificate,
};
use serde::Serialize;

use crate::config::{Config, Job};
use crate::output::{float, rational, write_csv, write_json};
use crate::CliError;

pub struct Context {
    pub cfg: Config,
    pub out_dir: PathBuf,
}

impl Context {
    fn main_job(&self) -> Result<&Job, CliError> {
        self.cfg
            .main
            .as_ref()
            .ok_or_else(|| CliError::Input("config has no [chart] and [[forms]]".into()))
    }

    fn element(&self, job: &Job) -> Result<AlgebraElement, CliError> {
        let truncation = self
            .cfg
            .engine
            .truncation
            .unwrap_or_else(|| job.default_truncation());
        element(job, truncation)
    }

    /// User levels paired with the chart-normalised ones.
    fn levels(&self, job: &Job) -> Result<Vec<(f64, f64)>, CliError> {
        if self.cfg.engine.t.is_empty() {
            return Err(CliError::Input("empty t grid".into()));
        }
        self.cfg
            .engine
            .t
            .iter()
            .map(|&t| {
                let tn = job.chart.normalize_level(t);
                if tn > 0.0 && tn <= 1.0 {
                    Ok((t, tn))
                } else {
                    Err(CliError::Input(format!(
                        "level t = {t} maps outside (0, 1] for chart scale {}",
                        job.chart.scale()
                    )))
                }
            })
            .collect()
    }
}

/// The integral as an element of the Mellin algebra: the elementary integral
/// over the saddle arc, or the Chen expansion over the configured path.
fn element(job: &Job, truncation: u32) -> Result<AlgebraElement, CliError> {
    let saddle = |start: usize, end: usize| -> Result<AlgebraElement, CliError> {
        let series = elementary_mellin(&job.forms[start - 1..end], &job.chart, truncation)?;
        Ok(AlgebraElement::from_mellin_series(&series))
    };
    let Some(path) = &job.path else {
        return saddle(1, job.forms.len());
    };
    let pieces = path.descriptor.pieces();
    let poly = decompose(job.forms.len(), pieces.len());
    let mut values: BTreeMap<ElementarySymbol, AlgebraElement> = BTreeMap::new();
    for symbol in poly.symbols() {
        let value = match &pieces[symbol.piece - 1] {
            Piece::Saddle { .. } => saddle(symbol.start, symbol.end)?,
            Piece::Edge { .. } => {
                let Some(edge) = path.edges.iter().find(|e| {
                    (e.piece, e.start, e.end) == (symbol.piece, symbol.start, symbol.end)
                }) else {
                    return Err(CliError::Input(format!(
                        "[path]: no edge data for {symbol}; add a [[path.edges]] entry"
                    )));
                };
                AlgebraElement::from_edge(&EdgeIntegral::supplied(
                    edge.series.clone(),
                    symbol.len(),
                ))
            }
        };
        values.insert(symbol, value);
    }
    Ok(evaluate(&poly, |s| values.get(s).cloned())?)
}

fn planar(job: &Job) -> Vec<PlanarForm> {
    let triples = |map: &BTreeMap<(i64, i64), polycycle_core::Rational>| -> Vec<(i64, i64, f64)> {
        map.iter().map(|(&(m, n), c)| (m, n, to_f64(c))).collect()
    };
    job.forms
        .iter()
        .map(|f| PlanarForm::from_terms(&triples(f.dx()), &triples(f.dy())))
        .collect()
}

pub fn mellin(ctx: &Context) -> Result<String, CliError> {
    let job = ctx.main_job()?;
    let f = ctx.element(job)?;
    let rows: Vec<Vec<String>> = f
        .kept()
        .terms()
        .map(|(a, k, c)| {
            vec![
                rational(&-a.clone()),
                k.to_string(),
                c.numer().to_string(),
                c.denom().to_string(),
            ]
        })
        .collect();
    let path = ctx.out_dir.join("mellin.csv");
    write_csv(
        &path,
        &["pole", "multiplicity", "coefficient_num", "coefficient_den"],
        &rows,
    )?;
    Ok(format!("{} partial-fraction terms -> {}", rows.len(), path.display()))
}

#[derive(Serialize)]
struct CertificateReport {
    p: u32,
    s_p: String,
    s_p_value: f64,
    rho: String,
    #[serde(rename = "C_total")]
    c_total: f64,
    d: u32,
    rigorous: bool,
}

pub fn expand(ctx: &Context) -> Result<String, CliError> {
    let job = ctx.main_job()?;
    let f = ctx.element(job)?;
    let p = ctx.cfg.engine.order;
    let sum = partial_sum(&f, p)?;
    let cert = tail_certificate(&f, p)?;
    let rows: Vec<Vec<String>> = sum
        .terms()
        .map(|(mu, j, c)| {
            vec![
                mu.numer().to_string(),
                mu.denom().to_string(),
                j.to_string(),
                float(to_f64(c)),
            ]
        })
        .collect();
    let csv = ctx.out_dir.join("expansion.csv");
    write_csv(&csv, &["mu_num", "mu_den", "log_power", "coefficient"], &rows)?;
    let json = ctx.out_dir.join("certificate.json");
    write_json(
        &json,
        &CertificateReport {
            p,
            s_p: rational(&cert.s_p),
            s_p_value: to_f64(&cert.s_p),
            rho: rational(&cert.rho),
            c_total: cert.c_total,
            d: cert.d,
            rigorous: cert.rigorous,
        },
    )?;
    Ok(format!(
        "{} terms below s_p = {} -> {}, {}",
        rows.len(),
        rational(&cert.s_p),
        csv.display(),
        json.display()
    ))
}

pub fn eval(ctx: &Context) -> Result<String, CliError> {
    let job = ctx.main_job()?;
    let f = ctx.element(job)?;
    let p = ctx.cfg.engine.order;
    let sum = partial_sum(&f, p)?;
    let cert = tail_certificate(&f, p)?;
    let rows: Vec<Vec<String>> = ctx
        .levels(job)?
        .into_iter()
        .map(|(t, tn)| {
            vec![
                float(t),
                float(sum.eval_with(tn, ctx.cfg.engine.precision)),
                float(cert.bound(tn)),
            ]
        })
        .collect();
    let path = ctx.out_dir.join("eval.csv");
    write_csv(&path, &["t", "partial_sum", "tail_bound"], &rows)?;
    Ok(format!("{} levels -> {}", rows.len(), path.display()))
}

struct CaseOutcome {
    name: String,
    rows: usize,
    failed: usize,
    max_rel_err: f64,
}

fn verify_job(ctx: &Context, job: &Job) -> Result<CaseOutcome, CliError> {
    if job.path.as_ref().is_some_and(|p| p.descriptor.piece_count() > 1) {
        return Err(CliError::Input(
            "verify compares a single saddle piece against quadrature; remove [path]".into(),
        ));
    }
    let engine = &ctx.cfg.engine;
    let f = ctx.element(job)?;
    let expansion = f.expansion();
    let forms = planar(job);
    let mut rows = Vec::new();
    let mut failed = 0;
    let mut max_rel_err: f64 = 0.0;
    for (t, tn) in ctx.levels(job)? {
        let symbolic = expansion.eval_with(tn, engine.precision);
        let oracle = iterated_quadrature(&forms, &saddle_path(&job.chart, tn)?, engine.quad_tol)
            .map_err(|e| CliError::Failure(format!("case {}, t = {t}: {e}", job.name)))?;
        let abs_err = (symbolic - oracle.value).abs();
        let rel_err = if oracle.value == 0.0 {
            abs_err
        } else {
            abs_err / oracle.value.abs()
        };
        let allowed = (engine.tol * oracle.value.abs()).max(1e-12)
            + f.residual().eval(tn)
            + oracle.error;
        let pass = abs_err <= allowed;
        if !pass {
            failed += 1;
        }
        max_rel_err = max_rel_err.max(rel_err);
        rows.push(vec![
            float(t),
            float(symbolic),
            float(oracle.value),
            float(abs_err),
            float(rel_err),
            pass.to_string(),
        ]);
    }
    let file = if job.name == "main" {
        "verify.csv".to_string()
    } else {
        format!("verify_{}.csv", job.name)
    };
    write_csv(
        &ctx.out_dir.join(file),
        &["t", "symbolic", "oracle", "abs_err", "rel_err", "pass"],
        &rows,
    )?;
    Ok(CaseOutcome {
        name: job.name.clone(),
        rows: rows.len(),
        failed,
        max_rel_err,
    })
}

pub fn verify(ctx: &Context) -> Result<String, CliError> {
    let jobs: Vec<&Job> = ctx.cfg.main.iter().chain(&ctx.cfg.corpus).collect();
    if jobs.is_empty() {
        return Err(CliError::Input("config has no job to verify".into()));
    }
    let mut lines = Vec::new();
    let mut failed = 0;
    for job in jobs {
        let outcome = verify_job(ctx, job)?;
        failed += outcome.failed;
        lines.push(format!(
            "{:<24} rows {:>3}  failed {:>3}  max_rel_err {}",
            outcome.name,
            outcome.rows,
            outcome.failed,
            float(outcome.max_rel_err)
        ));
    }
    let report = lines.join("\n");
    if failed > 0 {
        Err(CliError::Failure(format!("{report}\n{failed} rows failed")))
    } else {
        Ok(report)
    }
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
enum ZeroReport {
    ZeroFree {
        t_star: f64,
        leading_exponent: String,
        leading_log_poly: Vec<String>,
        p: u32,
        s_p: String,
    },
    ZeroToOrder {
        order: u32,
        residual_bound: f64,
    },
    Inconclusive {
        reason: String,
    },
}

pub fn zeros(ctx: &Context) -> Result<String, CliError> {
    let job = ctx.main_job()?;
    let f = ctx.element(job)?;
    let engine = &ctx.cfg.engine;
    let t_max = job.chart.normalize_level(engine.t_max).min(1.0);
    let report = match certify_zero_free(&f, engine.order, t_max) {
        ZeroCertificate::ZeroFree {
            mu,
            poly,
            t_star,
            p,
            s_p,
        } => ZeroReport::ZeroFree {
            t_star: t_star * job.chart.scale(),
            leading_exponent: rational(&mu),
            leading_log_poly: poly.iter().map(rational).collect(),
            p,
            s_p: rational(&s_p),
        },
        ZeroCertificate::ZeroToOrder {
            order,
            residual_bound,
        } => ZeroReport::ZeroToOrder {
            order,
            residual_bound,
        },
        ZeroCertificate::Inconclusive { reason } => ZeroReport::Inconclusive { reason },
    };
    let path = ctx.out_dir.join("zeros.json");
    write_json(&path, &report)?;
    match report {
        ZeroReport::ZeroFree { t_star, .. } => {
            Ok(format!("zero-free on (0, {}) -> {}", float(t_star), path.display()))
        }
        ZeroReport::ZeroToOrder { order, .. } => Ok(format!(
            "expansion vanishes to order {order} -> {}",
            path.display()
        )),
        ZeroReport::Inconclusive { reason } => Err(CliError::Failure(format!(
            "inconclusive: {reason} -> {}",
            path.display()
        ))),
    }
}

pub fn lie(ctx: &Context) -> Result<String, CliError> {
    let job = ctx
        .cfg
        .lie
        .as_ref()
        .ok_or_else(|| CliError::Input("config has no [lie] section".into()))?;
    let n = job.matrix.rows();
    let alg = hall_basis(n, job.max_degree)?;
    let auto = extend_automorphism(&alg, &job.matrix)?;
    let mut rows = Vec::new();
    let mut all_hold = true;
    let mut degree_one = None;
    for k in 1..=job.max_degree {
        let verdict = is_quasiunipotent(auto.degree(k))?;
        let (holds, certificate) = match &verdict {
            QuasiUnipotence::Yes { annihilator, .. } => (true, annihilator.to_string()),
            QuasiUnipotence::No { witness, .. } => (false, witness.to_string()),
        };
        all_hold &= holds;
        rows.push(vec![
            k.to_string(),
            alg.dim(k).to_string(),
            holds.to_string(),
            certificate,
        ]);
        if k == 1 {
            degree_one = Some(verdict);
        }
    }
    let path = ctx.out_dir.join("lie.csv");
    write_csv(&path, &["degree", "dim", "quasi_unipotent", "certificate"], &rows)?;

    // Var = A^p - id with (A^p - id)^q = 0 on degree one; defaults come from
    // the degree-one annihilator (z^m - 1)^n.
    let pq = match (&degree_one, job.p, job.q) {
        (_, Some(p), Some(q)) => Some((p, q)),
        (Some(QuasiUnipotence::Yes { annihilator, .. }), p, q) => Some((
            p.unwrap_or(annihilator.m as u32),
            q.unwrap_or(annihilator.n),
        )),
        _ => None,
    };
    let mut summary = format!("{} degrees -> {}", rows.len(), path.display());
    if let Some((p, q)) = pq {
        let report = var_check(&alg, &job.matrix, p, q, job.checks, job.seed)?;
        let var_rows: Vec<Vec<String>> = report
            .nilpotency
            .iter()
            .zip(&report.bounds)
            .enumerate()
            .map(|(i, (order, bound))| {
                vec![
                    (i + 1).to_string(),
                    order.map_or("none".into(), |r| r.to_string()),
                    bound.to_string(),
                ]
            })
            .collect();
        let var_path = ctx.out_dir.join("lie_var.csv");
        write_csv(&var_path, &["degree", "nilpotency", "bound"], &var_rows)?;
        summary.push_str(&format!(
            "\nVar = A^{p} - id: precondition {}, identity {} on {} pairs -> {}",
            report.precondition,
            report.identity_holds,
            report.identity_checks,
            var_path.display()
        ));
        all_hold &= report.passed();
    }
    if all_hold {
        Ok(summary)
    } else {
        Err(CliError::Failure(format!("{summary}\nquasi-unipotence fails")))
    }
}
