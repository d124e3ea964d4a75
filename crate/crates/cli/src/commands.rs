use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use momentcone::io::{
    measure_to_json, moments_to_json, read_measure, read_moments, read_polynomial, to_json_string,
};
use momentcone::numeric::format_significant;
use momentcone::{
    box_from_weight, box_sos_approx, check_localizing, check_quadratic_module, coefficientwise_report,
    dual_norm_of_moments, eval_sequence_norm, moments_of_measure, recover_measure, sqrt_square_approx,
    weighted_norm, BoxSosConfig, BoxSpec, Error, MomentSequence, Perturbation, Polynomial, RecoveryConfig,
    SosConfig, WeightSpec,
};

use crate::{Output, Verdict, WeightArgs};

/// Printed significant digits for scalar results.
const DIGITS: usize = 13;

fn verdict(pass: bool) -> Verdict {
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(output: &Output, value: &T) -> Result<()> {
    emit(output, &to_json_string(value)?)
}

fn weight(args: &WeightArgs, n: usize) -> Result<WeightSpec> {
    let r = args.r.clone().unwrap_or_else(|| vec![1.0; n]);
    if r.len() != n {
        anyhow::bail!("--r has {} entries but the data has {n} variables", r.len());
    }
    Ok(WeightSpec::new(args.p, r)?)
}

fn polynomial(path: &Path) -> Result<Polynomial> {
    read_polynomial(path).with_context(|| format!("reading polynomial {}", path.display()))
}

fn moments_file(path: &Path) -> Result<MomentSequence> {
    read_moments(path).with_context(|| format!("reading moments {}", path.display()))
}

fn generators(paths: &[PathBuf], n: usize) -> Result<Vec<Polynomial>> {
    paths
        .iter()
        .map(|p| {
            let g = polynomial(p)?;
            if g.dim() != n {
                anyhow::bail!(
                    "generator {} has {} variables, moments have {n}",
                    p.display(),
                    g.dim()
                );
            }
            Ok(g)
        })
        .collect()
}

fn box_json(k: &BoxSpec) -> Value {
    json!({ "lower": k.lower, "upper": k.upper })
}

pub fn norm(f: &Path, args: &WeightArgs, output: &Output) -> Result<Verdict> {
    let f = polynomial(f)?;
    let w = weight(args, f.dim())?;
    let value = weighted_norm(&f, &w)?;
    emit(output, &format!("{}\n", format_significant(value, DIGITS)))?;
    Ok(Verdict::Pass)
}

pub fn eval_cont(x: &[f64], args: &WeightArgs, output: &Output) -> Result<Verdict> {
    let w = weight(args, x.len())?;
    let dual = eval_sequence_norm(x, &w)?;
    let continuous = dual.is_finite();
    let label = if continuous {
        "continuous"
    } else {
        "not continuous"
    };
    emit(
        output,
        &format!("{label}, dual_norm={}\n", format_significant(dual, DIGITS)),
    )?;
    Ok(verdict(continuous))
}

fn default_degree(s: &MomentSequence, d: Option<usize>) -> usize {
    d.unwrap_or(s.max_degree() / 2)
}

pub fn psd_check(moments: &Path, d: Option<usize>, tol: Option<f64>, output: &Output) -> Result<Verdict> {
    let s = moments_file(moments)?;
    let report = check_localizing(&s, &[], default_degree(&s, d), tol)?;
    emit_json(output, &report)?;
    Ok(verdict(report.pass))
}

pub fn qm_check(
    moments: &Path,
    g: &[PathBuf],
    big_n: f64,
    d: usize,
    tol: Option<f64>,
    output: &Output,
) -> Result<Verdict> {
    let s = moments_file(moments)?;
    let gens = generators(g, s.dim())?;
    let report = check_quadratic_module(&s, &gens, big_n, d, tol)?;
    emit_json(output, &report)?;
    Ok(verdict(report.pass))
}

pub fn sqrt_approx(f: &Path, i: usize, output: &Output) -> Result<Verdict> {
    let f = polynomial(f)?;
    let h = sqrt_square_approx(&f, i)?;
    let table = coefficientwise_report(&f, i)?;
    emit_json(output, &json!({ "i": i, "h": h, "errors": table.entries }))?;
    Ok(Verdict::Pass)
}

pub struct SosOptions {
    pub eps: f64,
    pub dmax: usize,
    pub perturbation: Perturbation,
    pub tol: f64,
    pub seed: u64,
}

pub fn sos_approx(f: &Path, args: &WeightArgs, options: SosOptions, output: &Output) -> Result<Verdict> {
    let f = polynomial(f)?;
    let w = weight(args, f.dim())?;
    let config = BoxSosConfig {
        sos: SosConfig {
            tol: options.tol,
            ..SosConfig::default()
        },
        perturbation: options.perturbation,
        seed: options.seed,
        ..BoxSosConfig::default()
    };
    match box_sos_approx(&f, &w, options.eps, options.dmax, &config) {
        Ok(a) => {
            emit_json(
                output,
                &json!({
                    "certified": true,
                    "D": a.degree,
                    "eps": a.epsilon,
                    "distance": a.distance,
                    "unit_box_distance": a.unit_box_distance,
                    "gram_mineig": a.certificate.gram_min_eigenvalue,
                    "residual": a.certificate.residual,
                    "iterations": a.certificate.iterations,
                    "box": box_json(&box_from_weight(&w)),
                    "factors": a.factors,
                    "approximant": a.approximant,
                }),
            )?;
            Ok(Verdict::Pass)
        }
        Err(e @ (Error::ApproxInconclusive { .. } | Error::PreconditionViolated { .. })) => {
            emit_json(
                output,
                &json!({ "certified": false, "eps": options.eps, "dmax": options.dmax, "reason": e.to_string() }),
            )?;
            Ok(Verdict::Fail)
        }
        Err(e) => Err(e.into()),
    }
}

fn recovery_json(s: &MomentSequence, k: &BoxSpec, config: &RecoveryConfig) -> Result<(Value, bool)> {
    match recover_measure(s, k, config) {
        Ok(rec) => {
            let measure = measure_to_json(&rec.measure);
            Ok((
                json!({
                    "recovered": true,
                    "atoms": measure["atoms"],
                    "weights": measure["weights"],
                    "residual": rec.residual,
                    "box": box_json(k),
                }),
                true,
            ))
        }
        Err(Error::RecoveryFailed { residual, .. }) => Ok((
            json!({ "recovered": false, "residual": residual, "box": box_json(k) }),
            false,
        )),
        Err(e) => Err(e.into()),
    }
}

pub fn recover(moments: &Path, args: &WeightArgs, grid: usize, tol: f64, output: &Output) -> Result<Verdict> {
    let s = moments_file(moments)?;
    let w = weight(args, s.dim())?;
    let config = RecoveryConfig {
        grid_per_axis: grid,
        tol,
        ..RecoveryConfig::default()
    };
    let (report, pass) = recovery_json(&s, &box_from_weight(&w), &config)?;
    emit_json(output, &report)?;
    Ok(verdict(pass))
}

fn stage_error(e: impl std::fmt::Display) -> (Value, bool) {
    (json!({ "error": e.to_string() }), false)
}

pub fn pipeline(
    moments: &Path,
    g: &[PathBuf],
    args: &WeightArgs,
    d: Option<usize>,
    grid: usize,
    tol: f64,
    output: &Output,
) -> Result<Verdict> {
    let s = moments_file(moments)?;
    let w = weight(args, s.dim())?;
    let gens = generators(g, s.dim())?;

    let (hypothesis, bounded) = match dual_norm_of_moments(&s, &w) {
        Ok(r) => {
            let bounded = r.value.is_finite() && !r.growing;
            (json!({ "bounded": bounded, "report": r }), bounded)
        }
        Err(e) => stage_error(e),
    };
    let (psd, psd_pass) = match check_localizing(&s, &gens, default_degree(&s, d), None) {
        Ok(r) => {
            let pass = r.pass;
            (serde_json::to_value(r)?, pass)
        }
        Err(e) => stage_error(e),
    };
    let config = RecoveryConfig {
        grid_per_axis: grid,
        tol,
        ..RecoveryConfig::default()
    };
    let (recovery, recovered) = match recovery_json(&s, &box_from_weight(&w), &config) {
        Ok(pair) => pair,
        Err(e) => stage_error(e),
    };
    let pass = bounded && psd_pass && recovered;
    emit_json(
        output,
        &json!({
            "weight": w,
            "hypothesis": hypothesis,
            "psd": psd,
            "recovery": recovery,
            "pass": pass,
        }),
    )?;
    Ok(verdict(pass))
}

pub fn moments(measure: &Path, degree: usize, output: &Output) -> Result<Verdict> {
    let mu = read_measure(measure).with_context(|| format!("reading measure {}", measure.display()))?;
    emit_json(output, &moments_to_json(&moments_of_measure(&mu, degree)))?;
    Ok(Verdict::Pass)
}
