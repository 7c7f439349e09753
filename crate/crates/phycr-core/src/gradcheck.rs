//! Central finite-difference gradient checking.
//!
//! The checker never touches recorded gradients: it re-runs the provided
//! forward closure on perturbed copies of the inputs, so it stays an
//! independent reference for the reverse-mode engine.

/// Gradient of `f` w.r.t. every entry of every input, by central differences
/// with step `eps` (scaled by `max(1, |x|)` per entry).
pub fn central_diff<F>(mut f: F, inputs: &[Vec<f64>], eps: f64) -> Vec<Vec<f64>>
where
    F: FnMut(&[Vec<f64>]) -> f64,
{
    let mut work: Vec<Vec<f64>> = inputs.to_vec();
    let mut grads: Vec<Vec<f64>> = inputs.iter().map(|v| vec![0.0; v.len()]).collect();
    for i in 0..inputs.len() {
        for k in 0..inputs[i].len() {
            let x0 = inputs[i][k];
            let h = eps * x0.abs().max(1.0);
            work[i][k] = x0 + h;
            let fp = f(&work);
            work[i][k] = x0 - h;
            let fm = f(&work);
            work[i][k] = x0;
            grads[i][k] = (fp - fm) / (2.0 * h);
        }
    }
    grads
}

/// As [`central_diff`], but only for the listed `(input, entry)` pairs.
/// Returns the numeric gradient per pair, in order.
pub fn central_diff_at<F>(mut f: F, inputs: &[Vec<f64>], entries: &[(usize, usize)], eps: f64) -> Vec<f64>
where
    F: FnMut(&[Vec<f64>]) -> f64,
{
    let mut work: Vec<Vec<f64>> = inputs.to_vec();
    let mut out = Vec::with_capacity(entries.len());
    for &(i, k) in entries {
        let x0 = inputs[i][k];
        let h = eps * x0.abs().max(1.0);
        work[i][k] = x0 + h;
        let fp = f(&work);
        work[i][k] = x0 - h;
        let fm = f(&work);
        work[i][k] = x0;
        out.push((fp - fm) / (2.0 * h));
    }
    out
}

/// Max-norm relative difference between an analytic and a numeric gradient:
/// `||a - n||_inf / max(floor, ||n||_inf)`.
pub fn max_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len(), "gradient lengths differ");
    let scale = numeric.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-10);
    analytic
        .iter()
        .zip(numeric)
        .fold(0.0f64, |m, (a, n)| m.max((a - n).abs()))
        / scale
}
