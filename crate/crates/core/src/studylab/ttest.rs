use serde::{Deserialize, Serialize};

use super::special::{student_t_two_sided, student_t_upper};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Tail {
    #[default]
    TwoSided,
    /// H1: mean(a - b) > 0
    Greater,
    /// H1: mean(a - b) < 0
    Less,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TTestResult {
    pub t: f64,
    pub df: usize,
    pub p: f64,
    pub n: usize,
    pub mean_difference: f64,
    pub tail: Tail,
    /// The differences have zero variance; `t` is 0 or infinite.
    pub degenerate: bool,
}

/// Paired t-test on `a[i] - b[i]`, using the sample standard deviation.
pub fn paired_t_test(a: &[f64], b: &[f64], tail: Tail) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(Error::Statistics(format!(
            "paired samples differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::Statistics(
            "paired t-test needs at least two pairs".into(),
        ));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    let df = n - 1;
    let (t, degenerate) = if var == 0.0 {
        let t = if mean == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(mean)
        };
        (t, true)
    } else {
        (mean / (var.sqrt() / (n as f64).sqrt()), false)
    };
    let p = match tail {
        Tail::TwoSided => student_t_two_sided(t, df as f64),
        Tail::Greater => student_t_upper(t, df as f64),
        Tail::Less => student_t_upper(-t, df as f64),
    };
    Ok(TTestResult {
        t,
        df,
        p,
        n,
        mean_difference: mean,
        tail,
        degenerate,
    })
}
