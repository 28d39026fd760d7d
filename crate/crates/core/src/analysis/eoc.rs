use std::collections::BTreeMap;

/// One level of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub level: usize,
    pub h: f64,
    pub n_vertices: usize,
    pub n_cells: usize,
    pub n_dofs: usize,
    /// The error tracked by the study.
    pub error: f64,
    /// Observed order against the previous record; `None` on the first
    /// record or when an error is not positive.
    pub eoc: Option<f64>,
    /// Secondary quantities reported alongside the error.
    pub extras: BTreeMap<String, f64>,
}

/// Pairwise orders `log(e_{k−1}/e_k) / log(h_{k−1}/h_k)`, one per consecutive pair.
pub fn estimate_eoc(records: &[(f64, f64)]) -> Vec<Option<f64>> {
    records
        .windows(2)
        .map(|w| {
            let ((h0, e0), (h1, e1)) = (w[0], w[1]);
            if e0 > 0.0 && e1 > 0.0 && h0 > h1 {
                Some((e0 / e1).ln() / (h0 / h1).ln())
            } else {
                None
            }
        })
        .collect()
}

/// Least-squares slope of `log e` against `log h`.
pub fn least_squares_order(records: &[(f64, f64)]) -> Option<f64> {
    if records.len() < 2 || records.iter().any(|&(h, e)| !(h > 0.0 && e > 0.0)) {
        return None;
    }
    let n = records.len() as f64;
    let xs: Vec<f64> = records.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
