use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use super::{
    channel_apply, demodulate, modulate, replica, BufferedChips, ChannelSpec, ChipKind, ChipStream, LogisticChips,
    ModemError, Scheme, SignChips,
};
use crate::fmt::sig9;
use crate::rng::{self, derive_seed};

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;
/// Smallest Monte-Carlo run per point.
pub const MIN_BITS_PER_POINT: u64 = 10_000;
/// Error count below which a point is flagged as under-sampled.
pub const MIN_ERRORS: u64 = 10;
const BLOCK_BITS: u64 = 4096;
/// Chips generated once and cycled when the delay oscillator feeds a sweep.
const MACKEY_GLASS_POOL: usize = 1 << 16;

/// Gaussian tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Wilson score interval for `errors` successes in `n` trials.
pub fn wilson_interval(errors: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (centre - half).max(0.0) };
    (lo, (centre + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub bit_errors: u64,
    pub bits: u64,
    pub ber: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Fewer than [`MIN_ERRORS`] errors observed.
    pub under_sampled: bool,
}

impl BerPoint {
    fn new(ebn0_db: f64, bit_errors: u64, bits: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(bit_errors, bits, WILSON_Z);
        Self {
            ebn0_db,
            bit_errors,
            bits,
            ber: bit_errors as f64 / bits as f64,
            ci_lo,
            ci_hi,
            under_sampled: bit_errors < MIN_ERRORS,
        }
    }

    /// Wilson half-width divided by the 95% quantile.
    pub fn standard_error(&self) -> f64 {
        (self.ci_hi - self.ci_lo) / (2.0 * WILSON_Z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub scheme: Scheme,
    pub channel: ChannelSpec,
    pub spreading: usize,
    pub chips: ChipKind,
    pub seed: u64,
    pub points: Vec<BerPoint>,
}

impl BerCurve {
    pub const CSV_HEADER: &'static str = "scheme,channel,ebn0_db,bits,errors,ber,ci_lo,ci_hi";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        self.append_rows(&mut out);
        out
    }

    /// Data rows without the header.
    pub fn append_rows(&self, out: &mut String) {
        let label = self.channel.label();
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.scheme,
                label,
                p.ebn0_db,
                p.bits,
                p.bit_errors,
                sig9(p.ber),
                sig9(p.ci_lo),
                sig9(p.ci_hi)
            );
        }
    }

    pub fn point(&self, ebn0_db: f64) -> Option<&BerPoint> {
        self.points.iter().find(|p| p.ebn0_db == ebn0_db)
    }
}

/// Monte-Carlo BER run description.
#[derive(Debug, Clone, PartialEq)]
pub struct BerSweep {
    pub scheme: Scheme,
    /// Channel template; its `ebn0_db` is replaced by each grid value.
    pub channel: ChannelSpec,
    pub ebn0_grid: Vec<f64>,
    pub spreading: usize,
    pub bits_per_point: u64,
    pub seed: u64,
    /// Chaotic chip source for CSK and DCSK. BPSK always uses a random ±1 code.
    pub chips: ChipKind,
}

impl BerSweep {
    pub fn validate(&self) -> Result<(), ModemError> {
        self.scheme.check_spreading(self.spreading)?;
        if self.ebn0_grid.is_empty() {
            return Err(ModemError::EmptyGrid);
        }
        if self.bits_per_point < MIN_BITS_PER_POINT {
            return Err(ModemError::TooFewBits { got: self.bits_per_point, min: MIN_BITS_PER_POINT });
        }
        for &db in &self.ebn0_grid {
            self.channel.with_ebn0(db).validate(self.scheme, self.spreading)?;
        }
        Ok(())
    }

    fn chip_stream(&self, seed: u64) -> Box<dyn ChipStream> {
        match (self.scheme, self.chips) {
            (Scheme::Bpsk, _) => Box::new(SignChips::new(seed)),
            (_, ChipKind::Logistic) => Box::new(LogisticChips::new(seed)),
            (_, ChipKind::MackeyGlass) => {
                Box::new(BufferedChips::new(super::chip_source(ChipKind::MackeyGlass, MACKEY_GLASS_POOL, seed)))
            }
        }
    }

    fn run_point(&self, index: usize) -> BerPoint {
        let db = self.ebn0_grid[index];
        let point_seed = derive_seed(self.seed, index as u64);
        let channel = self.channel.with_ebn0(db);
        let mut bit_rng = rng::stream(point_seed, 0);
        let mut chips = self.chip_stream(derive_seed(point_seed, 1));
        let mut errors = 0u64;
        let mut done = 0u64;
        let mut block = 0u64;
        while done < self.bits_per_point {
            let n = BLOCK_BITS.min(self.bits_per_point - done) as usize;
            let bits: Vec<bool> = (0..n).map(|_| bit_rng.random()).collect();
            let frames = modulate(&bits, self.scheme, self.spreading, chips.as_mut()).expect("validated spreading");
            let y = channel_apply(&frames, &channel, derive_seed(point_seed, 2 + block));
            let reference = match self.scheme {
                Scheme::Dcsk => None,
                _ => Some(replica(&frames)),
            };
            let out = demodulate(&y, self.scheme, self.spreading, reference.as_deref()).expect("validated frames");
            errors += bits.iter().zip(&out).filter(|(a, b)| a != b).count() as u64;
            done += n as u64;
            block += 1;
        }
        BerPoint::new(db, errors, done)
    }

    /// Runs every grid point in parallel; each point has its own derived seed.
    pub fn run(&self) -> Result<BerCurve, ModemError> {
        self.validate()?;
        let points = (0..self.ebn0_grid.len()).into_par_iter().map(|i| self.run_point(i)).collect();
        Ok(BerCurve {
            scheme: self.scheme,
            channel: self.channel,
            spreading: self.spreading,
            chips: self.chips,
            seed: self.seed,
            points,
        })
    }
}

/// [`BerSweep::run`] with logistic-map chips.
pub fn ber_sweep(
    scheme: Scheme,
    channel: &ChannelSpec,
    ebn0_grid: &[f64],
    spreading: usize,
    bits_per_point: u64,
    seed: u64,
) -> Result<BerCurve, ModemError> {
    BerSweep {
        scheme,
        channel: *channel,
        ebn0_grid: ebn0_grid.to_vec(),
        spreading,
        bits_per_point,
        seed,
        chips: ChipKind::Logistic,
    }
    .run()
}
