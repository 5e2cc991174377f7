use statrs::function::gamma::gamma;

use super::OscillatorParams;

/// Gamma-density shaped feedback nonlinearity
///
/// `f(x) = G · α·µ^µ·x^(αµ−1) / (Γ(µ)·x̂^(αµ)) · exp(−µ·(x/x̂)^α)`,
/// with `f(x) = 0` for negative inputs.
///
/// The constant prefactor is computed once; evaluation is on the hot path of
/// every integrator stage.
#[derive(Debug, Clone, Copy)]
pub struct MackeyGlassFn {
    coef: f64,
    power: f64,
    alpha: f64,
    mu: f64,
    inv_x_hat: f64,
}

impl MackeyGlassFn {
    pub fn new(p: &OscillatorParams) -> Self {
        let am = p.alpha * p.mu;
        let coef = p.gain * p.alpha * p.mu.powf(p.mu) / (gamma(p.mu) * p.x_hat.powf(am));
        Self { coef, power: am - 1.0, alpha: p.alpha, mu: p.mu, inv_x_hat: 1.0 / p.x_hat }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let algebraic = if self.power == 0.0 {
            1.0
        } else if self.power == 1.0 {
            x
        } else {
            x.powf(self.power)
        };
        let r = x * self.inv_x_hat;
        let shape = if self.alpha == 2.0 { r * r } else { r.powf(self.alpha) };
        self.coef * algebraic * (-self.mu * shape).exp()
    }
}

/// Evaluates the nonlinearity for a single input.
pub fn nonlinearity(x: f64, p: &OscillatorParams) -> f64 {
    MackeyGlassFn::new(p).eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_gives_zero() {
        assert_eq!(nonlinearity(0.0, &OscillatorParams::default()), 0.0);
    }

    #[test]
    fn negative_input_is_clamped() {
        let p = OscillatorParams::default();
        assert_eq!(nonlinearity(-0.3, &p), 0.0);
        assert_eq!(nonlinearity(-1e-300, &p), 0.0);
    }

    #[test]
    fn value_at_scale() {
        // 3.5 * e^-1
        let v = nonlinearity(0.4, &OscillatorParams::default());
        assert!((v - 3.5 * (-1.0f64).exp()).abs() < 1e-12, "{v}");
        assert!((v - 1.28758).abs() < 1e-5);
    }

    #[test]
    fn non_integer_shape() {
        // mu = 2.5 exercises Gamma and the powf paths.
        let p = OscillatorParams { mu: 2.5, alpha: 1.5, ..Default::default() };
        let x: f64 = 0.3;
        let am = 3.75;
        let direct = 0.7 * 1.5 * 2.5f64.powf(2.5) * x.powf(am - 1.0) / (gamma(2.5) * 0.4f64.powf(am))
            * (-2.5 * (x / 0.4).powf(1.5)).exp();
        let got = nonlinearity(x, &p);
        assert!(((got - direct) / direct).abs() < 1e-12);
        // Gamma(2.5) = 3/4 sqrt(pi)
        assert!((gamma(2.5) - 0.75 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn decays_far_out() {
        let p = OscillatorParams::default();
        for i in 0..=1000 {
            let x = i as f64 * 0.04;
            let v = nonlinearity(x, &p);
            assert!(v >= 0.0 && v.is_finite());
        }
        assert!(nonlinearity(40.0, &p) < 1e-300);
    }
}
