use super::{ChipStream, ModemError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Bpsk,
    Csk,
    Dcsk,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Bpsk => "bpsk",
            Self::Csk => "csk",
            Self::Dcsk => "dcsk",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bpsk" => Some(Self::Bpsk),
            "csk" => Some(Self::Csk),
            "dcsk" => Some(Self::Dcsk),
            _ => None,
        }
    }

    pub(crate) fn check_spreading(self, spreading: usize) -> Result<(), ModemError> {
        if spreading == 0 {
            return Err(ModemError::ZeroSpreading);
        }
        if self == Self::Dcsk && !spreading.is_multiple_of(2) {
            return Err(ModemError::OddSpreading(spreading));
        }
        Ok(())
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One transmitted bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub chips: Vec<f64>,
    pub bit: bool,
    pub scheme: Scheme,
}

impl SymbolFrame {
    pub fn spreading(&self) -> usize {
        self.chips.len()
    }
}

/// Bit energy in units of the spreading factor (1 for every scheme).
pub fn frame_energy(frame: &SymbolFrame) -> f64 {
    frame.chips.iter().map(|c| c * c).sum::<f64>() / frame.spreading() as f64
}

fn unit_energy(mut seg: Vec<f64>) -> Vec<f64> {
    let e = seg.iter().map(|c| c * c).sum::<f64>() / seg.len() as f64;
    if e > 0.0 {
        let s = 1.0 / e.sqrt();
        seg.iter_mut().for_each(|c| *c *= s);
    }
    seg
}

fn sign(b: bool) -> f64 {
    if b {
        1.0
    } else {
        -1.0
    }
}

/// Maps bits onto chip frames.
///
/// BPSK uses the signs of the source chips as a ±1 spreading code, CSK sends
/// the energy-normalized segment `c` or `−c`, and DCSK sends a normalized
/// reference `r` followed by `±r`.
pub fn modulate(
    bits: &[bool],
    scheme: Scheme,
    spreading: usize,
    source: &mut dyn ChipStream,
) -> Result<Vec<SymbolFrame>, ModemError> {
    scheme.check_spreading(spreading)?;
    Ok(bits
        .iter()
        .map(|&bit| {
            let s = sign(bit);
            let chips = match scheme {
                Scheme::Bpsk => source.segment(spreading).into_iter().map(|c| if c < 0.0 { -s } else { s }).collect(),
                Scheme::Csk => unit_energy(source.segment(spreading)).into_iter().map(|c| s * c).collect(),
                Scheme::Dcsk => {
                    let r = unit_energy(source.segment(spreading / 2));
                    let mut chips = r.clone();
                    chips.extend(r.iter().map(|c| s * c));
                    chips
                }
            };
            SymbolFrame { chips, bit, scheme }
        })
        .collect())
}

/// Chips a coherent receiver correlates against (the frames with the data
/// sign removed).
pub fn replica(frames: &[SymbolFrame]) -> Vec<f64> {
    frames
        .iter()
        .flat_map(|f| {
            let s = sign(f.bit);
            f.chips.iter().map(move |c| s * c)
        })
        .collect()
}

/// Recovers bits from a received chip stream.
///
/// BPSK and CSK decide on the sign of the correlation with `reference`
/// (BPSK without one assumes an all-ones code). DCSK needs no reference and
/// decides on `Σ y_k · y_{k+β}` over each frame's halves.
pub fn demodulate(
    received: &[f64],
    scheme: Scheme,
    spreading: usize,
    reference: Option<&[f64]>,
) -> Result<Vec<bool>, ModemError> {
    scheme.check_spreading(spreading)?;
    if !received.len().is_multiple_of(spreading) {
        return Err(ModemError::LengthMismatch {
            what: "received stream",
            got: received.len(),
            expected: received.len().div_ceil(spreading) * spreading,
        });
    }
    if let Some(r) = reference {
        if r.len() != received.len() {
            return Err(ModemError::LengthMismatch { what: "reference", got: r.len(), expected: received.len() });
        }
    }
    let frames = received.chunks_exact(spreading);
    match scheme {
        Scheme::Dcsk => {
            let beta = spreading / 2;
            Ok(frames.map(|y| y[..beta].iter().zip(&y[beta..]).map(|(a, b)| a * b).sum::<f64>() > 0.0).collect())
        }
        Scheme::Csk | Scheme::Bpsk => match reference {
            Some(r) => Ok(frames
                .zip(r.chunks_exact(spreading))
                .map(|(y, c)| y.iter().zip(c).map(|(a, b)| a * b).sum::<f64>() > 0.0)
                .collect()),
            None if scheme == Scheme::Bpsk => Ok(frames.map(|y| y.iter().sum::<f64>() > 0.0).collect()),
            None => Err(ModemError::MissingReference),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::{BufferedChips, LogisticChips};

    #[test]
    fn dcsk_frames_repeat_reference() {
        let r = vec![0.5, -1.0, 2.0, 0.25];
        let frames = modulate(&[true, false], Scheme::Dcsk, 8, &mut BufferedChips::new(r.clone())).unwrap();
        let e = (r.iter().map(|c| c * c).sum::<f64>() / 4.0).sqrt();
        let rn: Vec<f64> = r.iter().map(|c| c / e).collect();
        for (k, c) in rn.iter().enumerate() {
            assert!((frames[0].chips[k] - c).abs() < 1e-15);
            assert_eq!(frames[0].chips[k + 4], frames[0].chips[k]);
            assert_eq!(frames[1].chips[k + 4], -frames[1].chips[k]);
        }
    }

    #[test]
    fn csk_is_antipodal() {
        let c = vec![0.3, -0.7, 1.1];
        let mut a = BufferedChips::new(c.clone());
        let f1 = modulate(&[true], Scheme::Csk, 3, &mut a).unwrap();
        let mut b = BufferedChips::new(c);
        let f0 = modulate(&[false], Scheme::Csk, 3, &mut b).unwrap();
        for (x, y) in f1[0].chips.iter().zip(&f0[0].chips) {
            assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn odd_spreading_rejected() {
        let mut s = LogisticChips::new(0);
        assert_eq!(modulate(&[true], Scheme::Dcsk, 7, &mut s), Err(ModemError::OddSpreading(7)));
        assert_eq!(demodulate(&[0.0; 7], Scheme::Dcsk, 7, None), Err(ModemError::OddSpreading(7)));
        assert!(modulate(&[true], Scheme::Csk, 7, &mut s).is_ok());
    }

    #[test]
    fn unit_energy_per_bit() {
        let bits: Vec<bool> = (0..50).map(|i| i % 3 == 0).collect();
        for scheme in [Scheme::Bpsk, Scheme::Csk, Scheme::Dcsk] {
            let frames = modulate(&bits, scheme, 128, &mut LogisticChips::new(4)).unwrap();
            for f in &frames {
                assert!((frame_energy(f) - 1.0).abs() < 1e-9, "{scheme}");
            }
        }
    }

    #[test]
    fn noiseless_loopback() {
        let bits: Vec<bool> = (0..200).map(|i| (i * 7) % 5 < 2).collect();
        for scheme in [Scheme::Bpsk, Scheme::Csk, Scheme::Dcsk] {
            let frames = modulate(&bits, scheme, 16, &mut LogisticChips::new(1)).unwrap();
            let tx: Vec<f64> = frames.iter().flat_map(|f| f.chips.clone()).collect();
            let reference = replica(&frames);
            let out = demodulate(&tx, scheme, 16, Some(&reference)).unwrap();
            assert_eq!(out, bits, "{scheme}");
        }
    }

    #[test]
    fn csk_needs_reference() {
        assert_eq!(demodulate(&[1.0; 4], Scheme::Csk, 4, None), Err(ModemError::MissingReference));
        assert_eq!(demodulate(&[1.0; 4], Scheme::Bpsk, 4, None), Ok(vec![true]));
    }

    #[test]
    fn length_checks() {
        assert!(matches!(demodulate(&[1.0; 5], Scheme::Bpsk, 4, None), Err(ModemError::LengthMismatch { .. })));
        assert!(matches!(
            demodulate(&[1.0; 4], Scheme::Csk, 4, Some(&[1.0; 3])),
            Err(ModemError::LengthMismatch { .. })
        ));
    }
}
