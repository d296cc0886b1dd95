use std::fmt::Write as _;

use serde_json::json;

use super::Report;
use crate::algorithms::{Algorithm, Path};
use crate::cocycle::{accelerate as run_acceleration, nu_sample, path_matrix, DecimalCoords, OrbitRecord, ReturnRule};
use crate::error::Result;
use crate::galois::{pinching_certificate, search_certificate_pairs, twisting_from, PinchingCertificate};
use crate::lyapunov::{abramov_ratio_check, approximation_exponent, lyapunov_spectrum_with, SpectrumConfig};
use crate::measures::{
    cylinder_table, cylinder_table_csv, log_integrability_cutoff, log_integrability_partial_sum, telescoping_sum,
    CHART_NORMALIZATION, CYLINDER_SECTOR,
};
use crate::numeric::{Scalar, SimplexPoint};
use crate::sampling::{rng_from_seed, uniform_float_point};

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn csv_of(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn factors_text(c: &PinchingCertificate) -> String {
    match &c.discriminant_factors {
        Some(f) if !f.is_empty() => f.iter().map(u64::to_string).collect::<Vec<_>>().join(" * "),
        Some(_) => "1".into(),
        None => "?".into(),
    }
}

pub(crate) fn certify(g1: &Path, g2: &Path) -> Report {
    let certs = [g1, g2].map(|g| pinching_certificate(&path_matrix(g)));
    let loops: Vec<serde_json::Value> = [g1, g2]
        .iter()
        .zip(&certs)
        .map(|(g, c)| {
            json!({
                "path": g.to_string(),
                "length": g.len(),
                "is_loop": g.is_loop(),
                "positive": c.matrix.is_positive(),
                "certificate": c,
            })
        })
        .collect();
    let twisting = twisting_from(certs[0].clone(), certs[1].clone());
    let mut text = String::new();
    for (i, (g, c)) in [g1, g2].iter().zip(&certs).enumerate() {
        let _ = writeln!(text, "gamma{}  {g}  (loop {}, positive {})", i + 1, yes(g.is_loop()), yes(c.matrix.is_positive()));
        let _ = writeln!(text, "  matrix        {}", c.matrix);
        let _ = writeln!(text, "  char poly     {}", c.poly);
        let _ = writeln!(text, "  discriminant  {} = {}", c.discriminant, factors_text(c));
        let _ = writeln!(
            text,
            "  irreducible {}, positive {}, non-square {}  => pinching {}",
            yes(c.irreducible),
            yes(c.disc_positive),
            yes(c.disc_nonsquare),
            yes(c.verdict)
        );
    }
    let _ = writeln!(
        text,
        "gcd({}, {}) = {}  => twisting {}",
        certs[0].discriminant,
        certs[1].discriminant,
        twisting.gcd_of_discriminants,
        yes(twisting.verdict)
    );
    let csv = csv_of(
        &["path", "char_poly", "discriminant", "factors", "irreducible", "pinching", "twisting"],
        [g1, g2].iter().zip(&certs).map(|(g, c)| {
            vec![
                g.to_string(),
                c.poly.to_string(),
                c.discriminant.to_string(),
                factors_text(c),
                c.irreducible.to_string(),
                c.verdict.to_string(),
                twisting.verdict.to_string(),
            ]
        }),
    );
    Report {
        json: json!({
            "loops": loops,
            "gcd_of_discriminants": twisting.gcd_of_discriminants.to_string(),
            "verdict": twisting.verdict,
        }),
        text,
        csv,
        ok: twisting.verdict,
    }
}

pub(crate) fn lyapunov(algorithm: Algorithm, config: &SpectrumConfig) -> Result<Report> {
    let est = lyapunov_spectrum_with(algorithm, config)?;
    let exponent = approximation_exponent(&est).ok();
    let simple = est.is_simple(5.0);
    let sum_within = est.sum().abs() < 5.0 * est.combined_stderr();
    let gaps = [est.gap(0), est.gap(1)];
    let mut text = format!(
        "{algorithm}: {} trials x {} steps, seed {}\n",
        est.trials, est.steps, est.seed
    );
    for i in 0..3 {
        let _ = writeln!(text, "  lambda{}  {:+.6} +- {:.6}", i + 1, est.lambda[i], est.stderr[i]);
    }
    let _ = writeln!(text, "  sum      {:+.2e} (combined error {:.2e})", est.sum(), est.combined_stderr());
    for (i, (d, e)) in gaps.iter().enumerate() {
        let _ = writeln!(text, "  gap{}     {:.6} = {:.1} errors", i + 1, d, d / e);
    }
    let _ = writeln!(text, "  simple at 5 errors: {}", yes(simple));
    if let Some(x) = &exponent {
        let _ = writeln!(text, "  eta*     {:.5} +- {:.5}", x.eta_star, x.stderr);
    }
    if est.redraws > 0 {
        let _ = writeln!(text, "  redraws  {} ({} quotient overflows)", est.redraws, est.quotient_overflows);
    }
    Ok(Report {
        json: json!({
            "estimate": est,
            "exponent": exponent,
            "gaps": gaps,
            "simple": simple,
            "sum_within": sum_within,
        }),
        csv: est.to_csv(),
        text,
        ok: true,
    })
}

pub(crate) fn nu(algorithm: Algorithm, samples: u64, cap: usize, seed: u64) -> Report {
    let stats = nu_sample(algorithm, samples, cap, seed);
    let mut text = format!("{algorithm}: nu over {samples} points, cap {cap}, seed {seed}\n");
    let show = |v: Option<usize>| v.map_or("-".to_string(), |m| m.to_string());
    let _ = writeln!(text, "  max {}  (reversed order {})", show(stats.max), show(stats.reversed_max));
    let _ = writeln!(text, "  mean {:.3}", stats.mean);
    let _ = writeln!(
        text,
        "  beyond cap {}  (reversed {}), orders disagree on {}",
        stats.exceeded_cap, stats.reversed_exceeded_cap, stats.disagreements
    );
    let _ = writeln!(text, "  nu    count  reversed");
    let keys: std::collections::BTreeSet<usize> =
        stats.histogram.keys().chain(stats.reversed_histogram.keys()).copied().collect();
    let count = |m: &std::collections::BTreeMap<usize, u64>, k| m.get(&k).copied().unwrap_or(0);
    for &k in keys.iter().take(30) {
        let _ = writeln!(
            text,
            "  {k:<5} {:<6} {}",
            count(&stats.histogram, k),
            count(&stats.reversed_histogram, k)
        );
    }
    if keys.len() > 30 {
        let _ = writeln!(text, "  ... {} more values", keys.len() - 30);
    }
    let csv = csv_of(
        &["nu", "count", "reversed_count"],
        keys.iter().map(|&k| {
            vec![
                k.to_string(),
                count(&stats.histogram, k).to_string(),
                count(&stats.reversed_histogram, k).to_string(),
            ]
        }),
    );
    Report {
        json: json!({ "stats": stats }),
        text,
        csv,
        ok: true,
    }
}

pub(crate) fn cylinders(max_b: u64) -> Result<Report> {
    let rows = cylinder_table(max_b)?;
    let (partial, tail) = log_integrability_partial_sum(max_b);
    let cutoff = log_integrability_cutoff(1e-6);
    let tele = telescoping_sum(max_b);
    let sector = format!("({},{},{})", CYLINDER_SECTOR[0], CYLINDER_SECTOR[1], CYLINDER_SECTOR[2]);
    let mut text = format!("depth-1 triangle cylinders in the sector {sector}, chart (x1, x3)\n");
    let _ = writeln!(text, "  b     measure          norm  partial sum");
    for r in &rows {
        let _ = writeln!(text, "  {:<5} {:<16} {:<5} {:.8}", r.b, r.measure.to_string(), r.norm, r.partial_sum);
    }
    let _ = writeln!(text, "sum 1/((b+3)(b+4)) up to {max_b} = {tele}");
    let _ = writeln!(text, "log-integrability: partial {partial:.8}, tail bound {tail:.3e}");
    let _ = writeln!(text, "tail bound below 1e-6 from B = {cutoff}");
    Ok(Report {
        csv: cylinder_table_csv(&rows),
        json: json!({
            "sector": sector,
            "chart_normalization": CHART_NORMALIZATION,
            "rows": rows,
            "telescoping_sum": tele.to_string(),
            "log_integrability": { "partial": partial, "tail_bound": tail, "cutoff_1e-6": cutoff },
        }),
        text,
        ok: true,
    })
}

pub(crate) fn accelerate(algorithm: Algorithm, gamma: &Path, config: &SpectrumConfig, show: usize) -> Result<Report> {
    let report = abramov_ratio_check(algorithm, gamma, config)?;
    let mut rng = rng_from_seed(config.seed);
    let theta = uniform_float_point(&mut rng);
    let sample = run_acceleration(algorithm, gamma, &theta, show, config.steps as usize, ReturnRule::AfterBlock)?;
    let mut text = format!(
        "{algorithm}, returns to {gamma}: mu = {:.6} +- {:.6} (mean return time {:.2})\n",
        report.mu_hat, report.mu_hat_stderr, report.mean_return_time
    );
    let _ = writeln!(text, "  i  lambda        accelerated   scaled        within 3 errors");
    for i in 0..3 {
        let _ = writeln!(
            text,
            "  {}  {:+.6}    {:+.6}    {:+.6}    {}",
            i + 1,
            report.base.lambda[i],
            report.accelerated_lambda[i],
            report.scaled[i],
            yes(report.scaled_within[i])
        );
    }
    let _ = writeln!(
        text,
        "  lambda1/lambda2: base {:.4} +- {:.4}, accelerated {:.4} +- {:.4}  ({})",
        report.ratio_base,
        report.ratio_base_stderr,
        report.ratio_accelerated,
        report.ratio_accelerated_stderr,
        if report.ratio_within { "agree" } else { "differ" }
    );
    let _ = writeln!(
        text,
        "  induced segments {}, not positive {}",
        report.induced_segments, report.non_positive_segments
    );
    for (t, m) in sample.return_times.iter().zip(&sample.induced_matrices) {
        let _ = writeln!(text, "  return after {t:>3}: {m}");
    }
    let _ = writeln!(text, "passed: {}", yes(report.passed));
    let csv = csv_of(
        &["i", "lambda", "stderr", "accelerated", "accelerated_stderr", "scaled", "scaled_stderr", "within"],
        (0..3).map(|i| {
            vec![
                (i + 1).to_string(),
                report.base.lambda[i].to_string(),
                report.base.stderr[i].to_string(),
                report.accelerated_lambda[i].to_string(),
                report.accelerated_stderr[i].to_string(),
                report.scaled[i].to_string(),
                report.scaled_stderr[i].to_string(),
                report.scaled_within[i].to_string(),
            ]
        }),
    );
    Ok(Report {
        ok: report.passed,
        json: json!({ "abramov": report, "sample": sample }),
        text,
        csv,
    })
}

pub(crate) fn search(algorithm: Algorithm, max_len: usize, max_b: u64, max_pairs: usize) -> Result<Report> {
    let r = search_certificate_pairs(algorithm, max_len, max_b, max_pairs)?;
    let mut text = format!(
        "{algorithm} loops up to length {max_len}: {} loops, {} positive, {} pinching, {} twisting pairs{}\n",
        r.loops_enumerated,
        r.positive_loops,
        r.pinching_loops,
        r.pairs.len(),
        if r.truncated { " (truncated)" } else { "" }
    );
    for p in &r.pairs {
        let _ = writeln!(
            text,
            "  {}  {}  discriminants {}, {}",
            p.gamma1, p.gamma2, p.certificate.cert1.discriminant, p.certificate.cert2.discriminant
        );
    }
    let csv = csv_of(
        &["gamma1", "gamma2", "discriminant1", "discriminant2", "gcd"],
        r.pairs.iter().map(|p| {
            vec![
                p.gamma1.to_string(),
                p.gamma2.to_string(),
                p.certificate.cert1.discriminant.to_string(),
                p.certificate.cert2.discriminant.to_string(),
                p.certificate.gcd_of_discriminants.to_string(),
            ]
        }),
    );
    Ok(Report {
        json: serde_json::to_value(&r).expect("serializable"),
        text,
        csv,
        ok: true,
    })
}

pub(crate) fn orbit<S: Scalar>(rec: &OrbitRecord<S>, digits: usize) -> Report
where
    SimplexPoint<S>: DecimalCoords,
{
    let mut text = format!("{} orbit, {} steps\n", rec.algorithm, rec.steps());
    let mut rows = Vec::new();
    for (k, p) in rec.points.iter().enumerate() {
        let label = rec.labels.get(k).map_or(String::new(), ToString::to_string);
        let c = p.decimal_coords(digits);
        let _ = writeln!(text, "  {k:>4}  {:<14} ({}, {}, {})", label, c[0], c[1], c[2]);
        rows.push(vec![k.to_string(), label, c[0].clone(), c[1].clone(), c[2].clone()]);
    }
    if let Some(m) = &rec.cumulative_product {
        let _ = writeln!(text, "product {m}");
    }
    if let Some(t) = &rec.truncated {
        let _ = writeln!(text, "stopped at step {}: {}", t.step, t.error);
    }
    Report {
        json: rec.to_json(digits),
        text,
        csv: csv_of(&["step", "label", "x1", "x2", "x3"], rows),
        ok: true,
    }
}
