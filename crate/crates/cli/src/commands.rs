use std::sync::Arc;

use anyhow::Result;
use roughform::distribution::regularity_fit;
use roughform::fit::fit_line;
use roughform::geometry::{
    besov_criterion, box_dimension_estimate, BoxCounts, BoxTarget, Domain, DomainSpec, GridDomain, DEFAULT_SUBSAMPLES,
};
use roughform::pairing::{integrate_over_domain, DomainOptions};
use roughform::par::Execution;
use roughform::sewing::zust_integral;
use roughform::wavelets::build_basis;
use roughform::{DistributionConfig, DistributionRep, Error, SewingConfig};
use serde::Serialize;

use crate::config::{require, Form, RunConfig};
use crate::report::{emit, Table};

const CASCADE_LEVEL: u32 = 10;

fn execution(cfg: &RunConfig) -> Execution {
    if cfg.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn form(cfg: &RunConfig) -> Result<Form> {
    Ok(require(cfg.spec.as_ref(), "--spec")?.build()?)
}

fn domain(cfg: &RunConfig) -> Result<&DomainSpec> {
    require(cfg.domain.as_ref(), "--domain")
}

fn distribution(cfg: &RunConfig, form: Form) -> Result<DistributionRep> {
    let basis = Arc::new(build_basis(cfg.basis_order, CASCADE_LEVEL)?);
    let dc = DistributionConfig {
        tolerance: cfg.tol,
        execution: execution(cfg),
        ..Default::default()
    };
    Ok(DistributionRep::new(form.f, form.g, basis, dc)?)
}

pub fn integrate_rect(cfg: &RunConfig) -> Result<()> {
    let form = form(cfg)?;
    let sc = SewingConfig {
        max_level: cfg.max_level,
        tolerance: cfg.tol,
        execution: execution(cfg),
        ..Default::default()
    };
    match zust_integral(&form.f, &form.g, &form.rect, &sc) {
        Ok(r) => emit(cfg, &r, &[]),
        Err(Error::BudgetExceeded { what, partial }) => {
            if let Some(p) = &partial {
                emit(cfg, p, &[])?;
            }
            Err(Error::BudgetExceeded { what, partial }.into())
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct StudyRow {
    #[serde(rename = "J")]
    j: u32,
    value: f64,
    gap: Option<f64>,
}

#[derive(Serialize)]
struct Study {
    rows: Vec<StudyRow>,
    /// Slope of `log₂ gap` against `J` over the level window.
    gap_slope: Option<f64>,
    /// `−(α + Σβ − d)` from the declared exponents.
    predicted_slope: f64,
    warnings: Vec<String>,
}

pub fn convergence_study(cfg: &RunConfig) -> Result<()> {
    let form = form(cfg)?;
    let sc = SewingConfig {
        max_level: cfg.levels.max.max(1),
        tolerance: f64::MIN_POSITIVE,
        execution: execution(cfg),
        ..Default::default()
    };
    let r = zust_integral(&form.f, &form.g, &form.rect, &sc)?;
    let rows: Vec<StudyRow> = r
        .history
        .iter()
        .map(|h| StudyRow {
            j: h.level,
            value: h.value,
            gap: h.gap,
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = r
        .gaps()
        .into_iter()
        .filter(|&(l, g)| (cfg.levels.min..=cfg.levels.max).contains(&l) && g > 0.0)
        .map(|(l, g)| (l as f64, g.log2()))
        .unzip();
    let gap_slope = if xs.len() >= 2 { Some(fit_line(&xs, &ys)?.slope) } else { None };
    let d = form.g.len() as f64;
    let exps: f64 = form.f.declared_exponent() + form.g.iter().map(|g| g.declared_exponent()).sum::<f64>();
    let table = Table::build("convergence", |w| {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["J", "value", "gap"])?;
        for row in &rows {
            let gap = row.gap.map(|g| format!("{g:e}")).unwrap_or_default();
            wr.write_record([row.j.to_string(), format!("{:e}", row.value), gap])?;
        }
        wr.flush()?;
        Ok(())
    })?;
    let study = Study {
        rows,
        gap_slope,
        predicted_slope: -(exps - d),
        warnings: r.warnings,
    };
    emit(cfg, &study, &[table])
}

#[derive(Serialize)]
struct LevelSummary {
    j: u32,
    count: usize,
    max_abs: f64,
    l1: f64,
}

#[derive(Serialize)]
struct CoeffSummary {
    d: usize,
    basis_order: u32,
    scaling_count: usize,
    levels: Vec<LevelSummary>,
    regularity_slope: Option<f64>,
    warnings: Vec<String>,
}

pub fn coeffs(cfg: &RunConfig) -> Result<()> {
    let form = form(cfg)?;
    let region = form.rect.clone();
    let dist = distribution(cfg, form)?;
    let field = dist.coeff_sweep(cfg.levels.max, &region)?;
    let levels = (0..=cfg.levels.max)
        .map(|j| LevelSummary {
            j,
            count: field.detail_count(j),
            max_abs: field.level_max_abs(j),
            l1: field.level_l1(j),
        })
        .collect();
    let mut warnings: Vec<String> = dist.warnings().to_vec();
    let regularity_slope = match regularity_fit(&field, cfg.levels.min, cfg.levels.max) {
        Ok(fit) => Some(fit.slope),
        Err(e) => {
            warnings.push(format!("no regularity fit: {e}"));
            None
        }
    };
    let table = Table::build("coeffs", |w| field.write_csv(w))?;
    let summary = CoeffSummary {
        d: dist.dim(),
        basis_order: cfg.basis_order,
        scaling_count: field.scaling.len(),
        levels,
        regularity_slope,
        warnings,
    };
    emit(cfg, &summary, &[table])
}

#[derive(Serialize)]
struct DomainIntegral<T: Serialize> {
    #[serde(flatten)]
    pairing: T,
    error_bound: f64,
}

pub fn integrate_domain(cfg: &RunConfig) -> Result<()> {
    let spec = domain(cfg)?.clone();
    let form = form(cfg)?;
    let dist = distribution(cfg, form)?;
    let opts = DomainOptions {
        execution: execution(cfg),
        ..Default::default()
    };
    let r = integrate_over_domain(&dist, &spec, cfg.max_level, opts)?;
    let table = Table::build("per_level", |w| {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["j", "value", "h_l1"])?;
        for t in &r.per_level {
            let j = t.j.map(|j| j.to_string()).unwrap_or_else(|| "scaling".into());
            wr.write_record([j, format!("{:e}", t.value), format!("{:e}", t.h_l1)])?;
        }
        wr.flush()?;
        Ok(())
    })?;
    let out = DomainIntegral {
        error_bound: r.error_bound(),
        pairing: r,
    };
    emit(cfg, &out, &[table])
}

/// Box counts of the boundary of a domain: exact where a closed form
/// exists (the graph part for epigraphs), grid Lebesgue boundary otherwise.
fn boundary_counts(cfg: &RunConfig) -> Result<(BoxCounts, &'static str)> {
    let (dom, bounding) = domain(cfg)?.build()?;
    let (lo, hi) = (cfg.levels.min, cfg.levels.max);
    let target = match dom {
        Domain::Rectangle { rect, .. } => BoxTarget::RectBoundary(rect),
        Domain::Disk { center, radius } => BoxTarget::Sphere { center, radius },
        Domain::Epigraph(h) => BoxTarget::Graph(h),
        other => {
            let grid = GridDomain::build(&other, &bounding, hi, DEFAULT_SUBSAMPLES, execution(cfg))?;
            return Ok((grid.lebesgue_boundary().counts(lo, hi), "lebesgue-boundary"));
        }
    };
    let name = match target {
        BoxTarget::Graph(_) => "graph",
        _ => "boundary",
    };
    Ok((BoxCounts::measure(&target, lo, hi), name))
}

#[derive(Serialize)]
struct BoxDim {
    counted: &'static str,
    counts: BoxCounts,
    dimension: f64,
}

pub fn boxdim(cfg: &RunConfig) -> Result<()> {
    let (counts, counted) = boundary_counts(cfg)?;
    let dimension = box_dimension_estimate(&counts, cfg.levels.min, cfg.levels.max)?;
    let table = Table::build("boxcounts", |w| counts.write_csv(w))?;
    emit(
        cfg,
        &BoxDim {
            counted,
            counts,
            dimension,
        },
        &[table],
    )
}

pub fn besov_check(cfg: &RunConfig) -> Result<()> {
    let beta = require(cfg.beta, "--beta")?;
    let (counts, _) = boundary_counts(cfg)?;
    let report = besov_criterion(&counts, beta, cfg.levels.max)?;
    let table = Table::build("besov_terms", |w| {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["j", "term", "partial_sum"])?;
        for ((j, t), (_, s)) in report.terms.iter().zip(&report.partial_sums) {
            wr.write_record([j.to_string(), format!("{t:e}"), format!("{s:e}")])?;
        }
        wr.flush()?;
        Ok(())
    })?;
    emit(cfg, &report, &[table])
}
