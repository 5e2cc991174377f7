use std::fmt::Write as _;

use super::{
    block_entropy, excess_from_blocks, lmc_complexity, lyapunov_max, neural_complexity, shannon_entropy, symbolize,
    Binning, ComplexityError, LyapunovConfig, NeuralOptions,
};
use crate::fmt::sig9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisSettings {
    /// Alphabet size.
    pub k: usize,
    pub binning: Binning,
    pub l_max: usize,
    /// Channel used for the single-signal metrics.
    pub channel: usize,
    pub neural: NeuralOptions,
    /// `None` skips the Lyapunov estimate.
    pub lyapunov: Option<LyapunovConfig>,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            k: 4,
            binning: Binning::Quantile,
            l_max: 8,
            channel: 0,
            neural: NeuralOptions::default(),
            lyapunov: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityReport {
    pub shannon_bits: f64,
    /// `H(L)` for `L = 1..=l_max`.
    pub block_entropies: Vec<f64>,
    /// Block lengths whose estimate lacks data (`n < 10·k^L`).
    pub insufficient_lengths: Vec<usize>,
    pub entropy_rate_bits: f64,
    pub excess_entropy_bits: f64,
    pub lmc: f64,
    pub neural_complexity_bits: Option<f64>,
    pub lyapunov_per_s: Option<f64>,
    pub degenerate: bool,
    pub samples: usize,
    pub channels: usize,
    pub step: f64,
    pub settings: AnalysisSettings,
}

/// Runs every estimator on `channels` sampled every `step` seconds.
pub fn analyze(
    channels: &[Vec<f64>],
    step: f64,
    settings: &AnalysisSettings,
) -> Result<ComplexityReport, ComplexityError> {
    let signal = channels
        .get(settings.channel)
        .ok_or_else(|| ComplexityError::InvalidInput(format!("no channel {}", settings.channel)))?;
    let s = symbolize(signal, settings.k, settings.binning)?;
    let blocks = block_entropy(&s, settings.l_max);
    let ex = excess_from_blocks(&blocks);
    let neural = if channels.len() >= 2 { Some(neural_complexity(channels, &settings.neural)?.bits) } else { None };
    let lyapunov = match &settings.lyapunov {
        Some(cfg) => Some(lyapunov_max(signal, step, cfg)?.per_second),
        None => None,
    };
    Ok(ComplexityReport {
        shannon_bits: shannon_entropy(&s),
        insufficient_lengths: (1..=settings.l_max).filter(|&l| blocks.insufficient[l - 1]).collect(),
        block_entropies: blocks.bits,
        entropy_rate_bits: ex.rate_bits,
        excess_entropy_bits: ex.excess_bits,
        lmc: lmc_complexity(&s),
        neural_complexity_bits: neural,
        lyapunov_per_s: lyapunov,
        degenerate: s.degenerate,
        samples: signal.len(),
        channels: channels.len(),
        step,
        settings: *settings,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(sig9).unwrap_or_else(|| "none".into())
}

impl ComplexityReport {
    fn fields(&self) -> Vec<(String, String)> {
        let s = &self.settings;
        let mut f = vec![
            ("samples".into(), self.samples.to_string()),
            ("channels".into(), self.channels.to_string()),
            ("shannon_bits".into(), sig9(self.shannon_bits)),
        ];
        for (l, h) in self.block_entropies.iter().enumerate() {
            f.push((format!("block_entropy_{}", l + 1), sig9(*h)));
        }
        let insufficient: Vec<String> = self.insufficient_lengths.iter().map(|l| l.to_string()).collect();
        f.extend([
            ("insufficient_lengths".into(), insufficient.join(";")),
            ("entropy_rate_bits".into(), sig9(self.entropy_rate_bits)),
            ("excess_entropy_bits".into(), sig9(self.excess_entropy_bits)),
            ("lmc".into(), sig9(self.lmc)),
            ("neural_complexity_bits".into(), opt(self.neural_complexity_bits)),
            ("lyapunov_per_s".into(), opt(self.lyapunov_per_s)),
            ("degenerate".into(), self.degenerate.to_string()),
            ("param.k".into(), s.k.to_string()),
            ("param.binning".into(), s.binning.as_str().into()),
            ("param.l_max".into(), s.l_max.to_string()),
            ("param.channel".into(), s.channel.to_string()),
            ("param.step".into(), sig9(self.step)),
            ("param.neural_max_exact_n".into(), s.neural.max_exact_n.to_string()),
            ("param.neural_subset_samples".into(), s.neural.subset_samples.to_string()),
            ("param.covariance_jitter".into(), sig9(super::COVARIANCE_JITTER)),
        ]);
        if let Some(l) = &s.lyapunov {
            f.extend([
                ("param.lyapunov_dim".into(), l.dim.to_string()),
                ("param.lyapunov_lag".into(), l.lag.to_string()),
                ("param.lyapunov_theiler".into(), l.theiler.to_string()),
                ("param.lyapunov_fit".into(), format!("{}..{}", l.fit.0, l.fit.1)),
            ]);
        }
        f
    }

    /// One `key=value` line per field.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.fields() {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    /// Header line and one data row.
    pub fn to_csv(&self) -> String {
        let (keys, values): (Vec<String>, Vec<String>) = self.fields().into_iter().unzip();
        format!("{}\n{}\n", keys.join(","), values.join(","))
    }
}
