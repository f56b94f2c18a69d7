//! Sample Pearson correlation with a two-sided p-value from the
//! t-distribution transform.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{Error, Result};

/// Returns `(r, p)` for paired samples. Requires equal lengths of at least
/// 3 and nonzero variance on both sides.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::Precondition(format!(
            "pearson needs equal-length inputs, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Precondition("pearson needs at least 3 pairs".into()));
    }
    let mean_x = x.iter().sum::<f64>() / n as f64;
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(Error::Precondition("pearson is undefined for zero-variance input".into()));
    }
    let r = (cov / (var_x.sqrt() * var_y.sqrt())).clamp(-1.0, 1.0);

    // t = r sqrt((n-2)/(1-r^2)); p from the two-sided tail of t_{n-2}.
    let df = (n - 2) as f64;
    let p = if (1.0 - r * r) <= f64::EPSILON {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df)
            .map_err(|e| Error::Precondition(format!("t-distribution: {e}")))?;
        2.0 * (1.0 - dist.cdf(t.abs()))
    };
    Ok((r, p.clamp(0.0, 1.0)))
}
