use super::DynamicsError;

/// Fixed-capacity ring of past states with their time derivatives.
///
/// Lookups between grid points use cubic Hermite interpolation on the stored
/// values and slopes. Lag 0 is the newest sample. A sample may carry
/// different one-sided slopes, which keeps the kink where a prescribed
/// history meets the integrated solution.
#[derive(Debug, Clone)]
pub struct HistoryBuffer {
    values: Vec<f64>,
    slopes: Vec<f64>,
    left_slopes: Vec<f64>,
    newest: usize,
    step: f64,
}

/// A lag pre-resolved into a whole-sample offset and a fractional part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ResolvedLag {
    back: usize,
    frac: f64,
}

impl ResolvedLag {
    pub(crate) fn new(lag: f64, step: f64) -> Self {
        let p = lag / step;
        let nearest = p.round();
        let p = if (p - nearest).abs() < 1e-9 { nearest } else { p };
        let back = p.floor();
        Self { back: back as usize, frac: p - back }
    }

    /// Samples that must be retained for this lookup to succeed.
    pub(crate) fn span(&self) -> usize {
        if self.frac > 0.0 {
            self.back + 2
        } else {
            self.back + 1
        }
    }
}

impl HistoryBuffer {
    /// Buffer covering `max_delay` seconds, filled with a constant history.
    pub fn constant(value: f64, step: f64, max_delay: f64) -> Self {
        let capacity = (max_delay / step).ceil() as usize + 3;
        Self {
            values: vec![value; capacity],
            slopes: vec![0.0; capacity],
            left_slopes: vec![0.0; capacity],
            newest: capacity - 1,
            step,
        }
    }

    pub fn capacity(&self) -> usize {
        self.values.len()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Longest lag (seconds) that is guaranteed to resolve.
    pub fn max_lag(&self) -> f64 {
        (self.capacity() - 2) as f64 * self.step
    }

    pub fn newest(&self) -> f64 {
        self.values[self.newest]
    }

    pub fn push(&mut self, value: f64, slope: f64) {
        self.newest = (self.newest + 1) % self.values.len();
        self.values[self.newest] = value;
        self.slopes[self.newest] = slope;
        self.left_slopes[self.newest] = slope;
    }

    pub(crate) fn set_newest_slope(&mut self, slope: f64) {
        self.slopes[self.newest] = slope;
        self.left_slopes[self.newest] = slope;
    }

    /// Slope used only for interpolation after the newest sample.
    pub(crate) fn set_newest_right_slope(&mut self, slope: f64) {
        self.slopes[self.newest] = slope;
    }

    #[inline]
    fn index(&self, back: usize) -> usize {
        let cap = self.values.len();
        (self.newest + cap - back) % cap
    }

    /// State `lag` seconds before the newest sample.
    pub fn at_lag(&self, lag: f64) -> Result<f64, DynamicsError> {
        if !(lag >= 0.0) {
            return Err(DynamicsError::DelayUnresolvable { delay: lag, capacity: self.max_lag() });
        }
        let r = ResolvedLag::new(lag, self.step);
        if r.span() > self.capacity() {
            return Err(DynamicsError::DelayUnresolvable { delay: lag, capacity: self.max_lag() });
        }
        Ok(self.resolved(r))
    }

    #[inline]
    pub(crate) fn resolved(&self, r: ResolvedLag) -> f64 {
        let later = self.index(r.back);
        if r.frac == 0.0 {
            return self.values[later];
        }
        let earlier = self.index(r.back + 1);
        hermite(
            self.values[earlier],
            self.slopes[earlier],
            self.values[later],
            self.left_slopes[later],
            self.step,
            1.0 - r.frac,
        )
    }
}

/// Cubic Hermite interpolation on `[0, h]` at `u·h`.
#[inline]
pub(crate) fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, u: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}
