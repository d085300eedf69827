use std::fs;
use std::path::{Path, PathBuf};

use super::run::{BandReport, ExperimentReport};
use crate::error::Result;

/// `%g`-style formatting with six significant digits.
pub fn fmt_sig6(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.5e}", v);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let e: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&e) {
        let decimals = (5 - e).max(0) as usize;
        trim(format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}{:02}", trim(mant.to_string()), if e < 0 { '-' } else { '+' }, e.abs())
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn summary_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("example,estimator,n,mode,split,mse_mean,mse_sd,runs,failures\n");
    for c in &report.cells {
        for (split, m, s) in [("S", c.mse_s_mean, c.mse_s_sd), ("D", c.mse_d_mean, c.mse_d_sd)] {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                report.example,
                c.estimator,
                c.n,
                c.mode,
                split,
                fmt_sig6(m),
                fmt_sig6(s),
                c.runs,
                c.failures
            ));
        }
    }
    out
}

pub fn band_csv(band: &BandReport) -> String {
    let mut out = String::from("x,lower,mean,upper,truth\n");
    for i in 0..band.x.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_sig6(band.x[i]),
            fmt_sig6(band.lower[i]),
            fmt_sig6(band.mean[i]),
            fmt_sig6(band.upper[i]),
            fmt_sig6(band.truth[i])
        ));
    }
    out
}

pub fn runs_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("example,estimator,n,mode,run,mse_S,mse_D\n");
    for c in &report.cells {
        for &(run, s, d) in &c.per_run {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                report.example,
                c.estimator,
                c.n,
                c.mode,
                run,
                fmt_sig6(s),
                fmt_sig6(d)
            ));
        }
    }
    out
}

/// Writes `summary.csv`, `runs.csv` and one band file per cell into `dir`.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    put("summary.csv".into(), summary_csv(report))?;
    put("runs.csv".into(), runs_csv(report))?;
    for b in &report.bands {
        put(
            format!("band_{}_{}_n{}_{}.csv", report.example, b.estimator, b.n, b.mode),
            band_csv(&b.band),
        )?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::fmt_sig6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig6(30.9312345), "30.9312");
        assert_eq!(fmt_sig6(0.0123456789), "0.0123457");
        assert_eq!(fmt_sig6(2.0), "2");
        assert_eq!(fmt_sig6(1234567.0), "1.23457e+06");
        assert_eq!(fmt_sig6(-0.000001234), "-1.234e-06");
        assert_eq!(fmt_sig6(0.0), "0");
    }
}
