use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use dirac_enclosure::bs::lemma2_bound;
use dirac_enclosure::gridfile::{format_f64, write_grid};
use dirac_enclosure::validation::{run_all, CheckOptions};
use dirac_enclosure::{
    bs_norm_estimate, build_bs, certify as certify_point, constants, lemma1_bound, raster as raster_grid, BsScheme, Complex64,
    DiracBasis, Error, GridSpec, NormValue, PowerIteration, Representation, ResolvedNorms, Result, SpectralPoint,
};
use log::info;

use crate::{Common, Scheme};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_NOT_CERTIFIED: u8 = 3;

fn check_mass(m: f64) -> Result<()> {
    if m >= 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("mass must be finite and nonnegative, got {m}")))
    }
}

/// Declared norms take precedence; anything missing comes from the potential.
fn resolve_norms(common: &Common, need_norm32: bool) -> Result<ResolvedNorms> {
    match (&common.potential, common.norm3) {
        (Some(v), _) => {
            let v = v.clone().with_declared_norms(common.norm3, common.norm32)?;
            info!("computing norms of {} at tolerance {:e}", v.name(), common.tol);
            v.resolve_norms(common.tol, need_norm32)
        }
        (None, Some(n3)) => ResolvedNorms::declared(n3, common.norm32),
        (None, None) => Err(Error::Config("give --norm3 (and optionally --norm32) or --potential".into())),
    }
}

fn describe(label: &str, n: &NormValue) -> String {
    format!("{label} = {} ({})", format_f64(n.value), n.describe())
}

pub fn certify<W: Write>(lambda: Complex64, common: &Common, out: &mut W) -> Result<u8> {
    check_mass(common.m)?;
    let norms = resolve_norms(common, true)?;
    let n32 = norms.norm32.map(|n| n.value).filter(|v| v.is_finite());
    let report = certify_point(lambda, common.m, norms.norm3.value, n32);
    writeln!(out, "lambda      {} {:+}i", lambda.re, lambda.im)?;
    writeln!(out, "m           {}", common.m)?;
    writeln!(out, "norms       {}", describe("L3", &norms.norm3))?;
    if let Some(n) = &norms.norm32 {
        writeln!(out, "            {}", describe("L3/2", n))?;
    }
    writeln!(out, "f           {}", format_f64(report.f_value))?;
    writeln!(out, "thm1_lhs    {}  certified={}", format_f64(report.thm1_lhs), report.thm1_certified)?;
    match report.thm2_lhs {
        Some(l) => writeln!(out, "thm2_lhs    {}  certified={}", format_f64(l), l < 1.0)?,
        None => writeln!(out, "thm2_lhs    na")?,
    }
    for r in report.reasons() {
        writeln!(out, "reason      {r}")?;
    }
    writeln!(out, "verdict     {}", if report.certified { "certified" } else { "not certified" })?;
    Ok(if report.certified { EXIT_OK } else { EXIT_NOT_CERTIFIED })
}

pub fn raster<W: Write>(spec: &GridSpec, path: Option<&Path>, common: &Common, stdout: &mut W) -> Result<u8> {
    check_mass(common.m)?;
    let norms = resolve_norms(common, common.potential.is_some() || common.norm32.is_some())?;
    let n32 = norms.norm32.map(|n| n.value).filter(|v| v.is_finite());
    let grid = raster_grid(spec, common.m, norms.norm3.value, n32)?;
    let mut notes = vec!["command raster".to_string(), format!("source of norm3: {}", norms.norm3.describe())];
    if let Some(n) = &norms.norm32 {
        notes.push(format!("source of norm32: {}", n.describe()));
    }
    if let Some(v) = &common.potential {
        notes.push(format!("potential {}", v.name()));
    }
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            write_grid(&grid, &notes, &mut w)?;
            w.flush()?;
            let certified = grid.cells.iter().filter(|c| c.certified).count();
            writeln!(stdout, "wrote {} rows to {} ({certified} certified)", grid.cells.len(), p.display())?;
        }
        None => write_grid(&grid, &notes, stdout)?,
    }
    Ok(EXIT_OK)
}

fn tensor_per_axis(nodes: usize) -> Result<usize> {
    let k = (nodes as f64).cbrt().round() as usize;
    if k.pow(3) == nodes && k > 0 {
        Ok(k)
    } else {
        Err(Error::Config(format!("the tensor scheme needs a perfect cube node count, got {nodes}")))
    }
}

pub fn bsnorm<W: Write>(
    lambda: Complex64,
    nodes: usize,
    scheme: Scheme,
    half_width: Option<f64>,
    seed: u64,
    common: &Common,
    out: &mut W,
) -> Result<u8> {
    check_mass(common.m)?;
    let potential =
        common.potential.clone().ok_or_else(|| Error::Config("bsnorm needs --potential".into()))?;
    let point = SpectralPoint::new(lambda, common.m)?;
    if !point.is_resolvent_point() {
        return Err(Error::Unsupported(format!(
            "z = {lambda} lies on the essential spectrum (-inf, -{m}] U [{m}, inf); the Birman-Schwinger operator is only defined off it",
            m = common.m
        )));
    }
    let scheme = match scheme {
        Scheme::Gauss => BsScheme::TensorGauss {
            per_axis: tensor_per_axis(nodes)?,
            half_width: half_width.unwrap_or(2.5 * potential.length_scale()),
        },
        Scheme::Mc => BsScheme::MonteCarlo { nodes, seed },
    };
    let disc = build_bs(point, &potential, scheme, &DiracBasis::new(Representation::Standard))?;
    let est = bs_norm_estimate(&disc, &PowerIteration { seed, ..Default::default() });
    let norms = resolve_norms(common, true)?;
    let n3 = norms.norm3.value;
    let n32 = norms.norm32.map_or(f64::INFINITY, |n| n.value);
    let l1 = lemma1_bound(&point, n3);
    let l2 = lemma2_bound(&point, n3, n32);
    writeln!(out, "z           {} {:+}i", lambda.re, lambda.im)?;
    writeln!(out, "m           {}", common.m)?;
    writeln!(out, "scheme      {scheme:?}")?;
    writeln!(out, "nodes       {}", est.node_count)?;
    writeln!(out, "seed        {}", est.seed)?;
    writeln!(out, "iterations  {}  converged={}", est.estimator_iterations, est.converged)?;
    writeln!(out, "estimate    {}", format_f64(est.value))?;
    writeln!(out, "lemma1      {}  dominates={}", format_f64(l1), est.value <= l1)?;
    writeln!(out, "lemma2      {}  dominates={}", format_f64(l2), est.value <= l2)?;
    Ok(EXIT_OK)
}

pub fn check<W: Write>(seed: u64, corrupt_basis: bool, out: &mut W) -> Result<u8> {
    let suites = run_all(&CheckOptions { seed, corrupt_basis });
    for (name, literal, runtime) in constants::table() {
        writeln!(out, "constant {name:<14} {literal:.12}  recomputed {runtime:.12}")?;
    }
    let mut ok = true;
    for s in &suites {
        writeln!(
            out,
            "{:<5} {:<16} {} checks, {} failures",
            if s.passed() { "PASS" } else { "FAIL" },
            s.name,
            s.checks,
            s.failures
        )?;
        for d in &s.details {
            writeln!(out, "      {d}")?;
        }
        ok &= s.passed();
    }
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}
