use super::DynamicsError;

/// Circuit constants of one Mackey-Glass delay-feedback node.
///
/// Defaults reproduce the reference two-node experiment: `G = 0.7`,
/// `alpha = 2`, `mu = 1`, `x_hat = 0.4 V`, `kappa_f = 0.4`,
/// `tau_f = 18 ms` and `rc = R4·C1 = 1 kΩ · 1 µF = 1 ms`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    /// Nonlinearity gain `G`.
    pub gain: f64,
    /// Shape exponent `alpha`.
    pub alpha: f64,
    /// Shape parameter `mu`.
    pub mu: f64,
    /// Voltage scale `x_hat` (V).
    pub x_hat: f64,
    /// Self-feedback gain.
    pub kappa_f: f64,
    /// Self-feedback delay (s).
    pub tau_f: f64,
    /// Low-pass filter time constant (s).
    pub rc: f64,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self { gain: 0.7, alpha: 2.0, mu: 1.0, x_hat: 0.4, kappa_f: 0.4, tau_f: 0.018, rc: 1e-3 }
    }
}

impl OscillatorParams {
    /// Returns every violated invariant, one message per field.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let positive =
            [("alpha", self.alpha), ("mu", self.mu), ("x_hat", self.x_hat), ("tau_f", self.tau_f), ("rc", self.rc)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                out.push(format!("{name} must be > 0"));
            }
        }
        if !self.gain.is_finite() {
            out.push("gain must be finite".into());
        }
        if !self.kappa_f.is_finite() {
            out.push("kappa_f must be finite".into());
        }
        // x^(alpha*mu - 1) blows up at the origin otherwise.
        if self.alpha > 0.0 && self.mu > 0.0 && self.alpha * self.mu < 1.0 {
            out.push("alpha*mu must be >= 1".into());
        }
        out
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some(msg) => Err(DynamicsError::InvalidParams(msg)),
        }
    }
}
