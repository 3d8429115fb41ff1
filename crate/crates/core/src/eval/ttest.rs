use std::io::BufRead;

use statrs::distribution::{ContinuousCDF, StudentsT};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TTest {
    Value { t: f64, df: f64, p: f64 },
    /// A sample has fewer than two values, or both samples are constant so
    /// the standard error is zero.
    Degenerate,
}

impl TTest {
    pub fn t(&self) -> Option<f64> {
        match *self {
            TTest::Value { t, .. } => Some(t),
            TTest::Degenerate => None,
        }
    }

    pub fn p(&self) -> Option<f64> {
        match *self {
            TTest::Value { p, .. } => Some(p),
            TTest::Degenerate => None,
        }
    }
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Welch's unequal-variance two-sample t-test with Welch-Satterthwaite
/// degrees of freedom and a two-sided p value.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> TTest {
    if a.len() < 2 || b.len() < 2 {
        return TTest::Degenerate;
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if !(se2 > 0.0) || !se2.is_finite() {
        return TTest::Degenerate;
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    TTest::Value { t, df, p }
}

/// One number per line; blank lines and `#` comments are skipped.
pub fn parse_samples<R: BufRead>(reader: R) -> Result<Vec<f64>, Box<dyn std::error::Error + Send + Sync>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let v: f64 = text.parse().map_err(|_| EvalError::Sample {
            line: i + 1,
            text: text.to_string(),
        })?;
        if !v.is_finite() {
            return Err(EvalError::Sample {
                line: i + 1,
                text: text.to_string(),
            }
            .into());
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(r: TTest) -> (f64, f64, f64) {
        match r {
            TTest::Value { t, df, p } => (t, df, p),
            TTest::Degenerate => panic!("degenerate"),
        }
    }

    #[test]
    fn small_fixture() {
        // Means 2 and 2.5, variances 1 and 5/3: se^2 = 3/4, t = -1/sqrt(3),
        // df = (3/4)^2 / ((1/3)^2/2 + (5/12)^2/3) = 243/49.
        let (t, df, p) = value(welch_t_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]));
        assert!((t - (-1.0 / 3f64.sqrt())).abs() < 1e-12);
        assert!((df - 243.0 / 49.0).abs() < 1e-12);
        assert!((t - -0.5773502691896258).abs() < 1e-9);
        assert!((df - 4.959183673469387).abs() < 1e-9);
        assert!((p - 0.5889215492858255).abs() < 1e-9);
    }

    #[test]
    fn identical_samples() {
        let a = [91.2, 91.5, 90.9];
        let (t, _, p) = value(welch_t_test(&a, &a));
        assert_eq!(t, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn separated_samples() {
        let (t, df, p) = value(welch_t_test(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0001]));
        assert!(p < 0.001);
        assert!((df - 2.0).abs() < 1e-9);
        assert!((t / -30001.000000003303 - 1.0).abs() < 1e-9);
        assert!((p / 1.1110370388887264e-09 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn degenerate_cases() {
        assert_eq!(welch_t_test(&[1.0], &[1.0, 2.0]), TTest::Degenerate);
        assert_eq!(welch_t_test(&[1.0, 1.0], &[2.0, 2.0]), TTest::Degenerate);
    }

    #[test]
    fn parses_sample_files() {
        let s = parse_samples("92.1\n\n# run 2\n 91.8 \n".as_bytes()).unwrap();
        assert_eq!(s, vec![92.1, 91.8]);
        assert!(parse_samples("92.1\nabc\n".as_bytes()).is_err());
    }
}
