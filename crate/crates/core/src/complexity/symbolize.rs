use super::ComplexityError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binning {
    /// Edges at empirical quantiles; equal occupancy for distinct values.
    Quantile,
    /// Equal-width bins between the minimum and maximum.
    Uniform,
}

impl Binning {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Quantile => "quantile",
            Self::Uniform => "uniform",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "quantile" => Some(Self::Quantile),
            "uniform" => Some(Self::Uniform),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolizedSeries {
    pub symbols: Vec<usize>,
    pub k: usize,
    pub binning: Binning,
    /// Input was constant; every symbol is 0.
    pub degenerate: bool,
}

impl SymbolizedSeries {
    /// Wraps an existing symbol sequence over an alphabet of size `k`.
    pub fn from_symbols(symbols: Vec<usize>, k: usize) -> Result<Self, ComplexityError> {
        if k < 2 {
            return Err(ComplexityError::InvalidInput(format!("alphabet size {k} < 2")));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >= k) {
            return Err(ComplexityError::InvalidInput(format!("symbol {s} outside alphabet of {k}")));
        }
        let degenerate = symbols.windows(2).all(|w| w[0] == w[1]);
        Ok(Self { symbols, k, binning: Binning::Quantile, degenerate })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Relative frequency of each symbol.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut c = vec![0usize; self.k];
        for &s in &self.symbols {
            c[s] += 1;
        }
        let n = self.symbols.len().max(1) as f64;
        c.into_iter().map(|v| v as f64 / n).collect()
    }
}

/// Maps a real signal onto `k` symbols.
///
/// Quantile edges sit at the sorted values with ranks `⌊j·n/k⌋`; a value
/// equal to an edge goes to the upper bin. Constant input yields all zeros
/// with `degenerate` set.
pub fn symbolize(signal: &[f64], k: usize, binning: Binning) -> Result<SymbolizedSeries, ComplexityError> {
    if k < 2 {
        return Err(ComplexityError::InvalidInput(format!("alphabet size {k} < 2")));
    }
    if signal.len() < k {
        return Err(ComplexityError::InvalidInput(format!("{} samples for {k} symbols", signal.len())));
    }
    if signal.iter().any(|v| !v.is_finite()) {
        return Err(ComplexityError::InvalidInput("non-finite sample".into()));
    }
    let (lo, hi) = signal.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if lo == hi {
        return Ok(SymbolizedSeries { symbols: vec![0; signal.len()], k, binning, degenerate: true });
    }
    let symbols = match binning {
        Binning::Quantile => {
            let mut sorted = signal.to_vec();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len();
            let edges: Vec<f64> = (1..k).map(|j| sorted[j * n / k]).collect();
            signal.iter().map(|&v| edges.partition_point(|&e| e <= v)).collect()
        }
        Binning::Uniform => {
            let w = (hi - lo) / k as f64;
            signal.iter().map(|&v| (((v - lo) / w).floor() as usize).min(k - 1)).collect()
        }
    };
    Ok(SymbolizedSeries { symbols, k, binning, degenerate: false })
}
