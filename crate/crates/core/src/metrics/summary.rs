use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl Summary {
    pub fn range(&self) -> f64 {
        self.max - self.min
    }
}

/// Statistics of `values[from..to]`; `None` for an empty window.
pub fn summarize(values: &[f64], from: usize, to: usize) -> Option<Summary> {
    assert!(
        from <= to && to <= values.len(),
        "window {from}..{to} outside series of {}",
        values.len()
    );
    let window = &values[from..to];
    if window.is_empty() {
        return None;
    }
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let var = window.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Some(Summary {
        count: window.len(),
        mean,
        min: window.iter().copied().fold(f64::INFINITY, f64::min),
        max: window.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        std: var.max(0.0).sqrt(),
    })
}
