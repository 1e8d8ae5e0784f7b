//! Signed 8-bit MAC accumulator built from four GROs.
//!
//! Sign handling uses two oscillator pairs: products with positive sign
//! accumulate on one pair, negative products on the other, and the final
//! value is a digital subtraction at readout. Within each pair the 7-bit
//! weight magnitude is split across a 3b-MSB and a 4b-LSB oscillator, so no
//! single ring needs 7-bit-linear frequency control; the readout recombines
//! them with a 4-bit left shift.

use core::fmt;

use crate::gro::{dtc_pulse, GroError, GroState, SaturationMode};

/// Largest operand magnitude after sign-magnitude conversion.
pub const MAG_FULL_SCALE: u32 = 127;
/// Worst-case inverter transitions for a single MAC: 127 * (7 + 15).
pub const MAX_TRANSITIONS_PER_MAC: u64 = 2794;

/// Which of the four oscillators an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroId {
    PosMsb,
    PosLsb,
    NegMsb,
    NegLsb,
}

impl fmt::Display for GroId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GroId::PosMsb => "pos_msb",
            GroId::PosLsb => "pos_lsb",
            GroId::NegMsb => "neg_msb",
            GroId::NegLsb => "neg_lsb",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PmacError {
    /// A constituent GRO would overflow its wrap counter.
    Saturated {
        gro: GroId,
    },
    /// Weight magnitude outside [0, 127].
    WeightOutOfRange(u32),
    /// Operand vectors of different lengths.
    LengthMismatch {
        lhs: usize,
        rhs: usize,
    },
    Gro(GroError),
}

impl fmt::Display for PmacError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PmacError::Saturated { gro } => write!(f, "GRO {gro} saturated; readout required"),
            PmacError::WeightOutOfRange(w) => {
                write!(f, "weight magnitude {w} outside [0, {MAG_FULL_SCALE}]")
            }
            PmacError::LengthMismatch { lhs, rhs } => {
                write!(f, "operand length mismatch: {lhs} vs {rhs}")
            }
            PmacError::Gro(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PmacError {}

impl From<GroError> for PmacError {
    fn from(e: GroError) -> Self {
        PmacError::Gro(e)
    }
}

/// Ring size and counter width shared by all four oscillators of a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PmacConfig {
    pub num_stages: u32,
    pub counter_bits: u32,
    pub mode: SaturationMode,
}

impl Default for PmacConfig {
    /// 5-stage rings with 20-bit counters: enough headroom for the 400-input
    /// layers of the reference model at full-scale magnitudes.
    fn default() -> Self {
        Self {
            num_stages: 5,
            counter_bits: 20,
            mode: SaturationMode::Strict,
        }
    }
}

/// Sign-magnitude form of an 8-bit operand.
///
/// Zero carries a positive sign; -128 clamps to magnitude 127 so magnitudes
/// always fit 7 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignMag {
    pub negative: bool,
    pub mag: u8,
}

impl SignMag {
    pub fn sign(&self) -> i32 {
        if self.negative {
            -1
        } else {
            1
        }
    }
}

/// Convert a two's-complement int8 to sign + 7-bit magnitude.
pub fn to_sign_mag(v: i8) -> SignMag {
    if v >= 0 {
        SignMag {
            negative: false,
            mag: v as u8,
        }
    } else {
        let mag = if v == i8::MIN { 127 } else { (-v) as u8 };
        SignMag {
            negative: true,
            mag,
        }
    }
}

/// Mirror of the datapath clamp for reference arithmetic: -128 -> -127.
#[inline]
pub fn sat_i8(v: i8) -> i32 {
    if v == i8::MIN {
        -127
    } else {
        v as i32
    }
}

/// Split a 7-bit weight magnitude into the 3b-MSB / 4b-LSB GRO drive fields.
pub fn split_weight(w_mag: u32) -> Result<(u32, u32), PmacError> {
    if w_mag > MAG_FULL_SCALE {
        return Err(PmacError::WeightOutOfRange(w_mag));
    }
    Ok((w_mag / 16, w_mag % 16))
}

/// Exact signed dot product with the datapath's -128 clamp.
///
/// Independent of the oscillator path on purpose: this is the oracle the
/// phase-domain pipeline is checked against.
pub fn ref_dot(d: &[i8], w: &[i8]) -> Result<i64, PmacError> {
    if d.len() != w.len() {
        return Err(PmacError::LengthMismatch {
            lhs: d.len(),
            rhs: w.len(),
        });
    }
    Ok(d.iter()
        .zip(w)
        .map(|(&a, &b)| sat_i8(a) as i64 * sat_i8(b) as i64)
        .sum())
}

/// One signed 8-bit MAC accumulator: four GROs plus an op counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmacUnit {
    pos_msb: GroState,
    pos_lsb: GroState,
    neg_msb: GroState,
    neg_lsb: GroState,
    ops_count: u64,
}

impl PmacUnit {
    pub fn new(cfg: PmacConfig) -> Result<Self, PmacError> {
        let gro = GroState::with_mode(cfg.num_stages, cfg.counter_bits, cfg.mode)?;
        Ok(Self {
            pos_msb: gro.clone(),
            pos_lsb: gro.clone(),
            neg_msb: gro.clone(),
            neg_lsb: gro,
            ops_count: 0,
        })
    }

    pub fn ops_count(&self) -> u64 {
        self.ops_count
    }

    pub fn gro(&self, id: GroId) -> &GroState {
        match id {
            GroId::PosMsb => &self.pos_msb,
            GroId::PosLsb => &self.pos_lsb,
            GroId::NegMsb => &self.neg_msb,
            GroId::NegLsb => &self.neg_lsb,
        }
    }

    /// First saturated constituent, if any (lenient mode only).
    pub fn saturated_gro(&self) -> Option<GroId> {
        [GroId::PosMsb, GroId::PosLsb, GroId::NegMsb, GroId::NegLsb]
            .into_iter()
            .find(|&id| self.gro(id).is_saturated())
    }

    /// Accumulate one product d*w.
    ///
    /// The DTC pulse gates both oscillators of the sign-selected pair for
    /// |d| ticks while their frequencies are set by the weight's MSB/LSB
    /// fields, so the pair advances |d|*w_msb and |d|*w_lsb transitions.
    /// Returns the inverter transitions spent (for the energy ledger).
    /// Fails without touching any oscillator if either target would
    /// saturate, naming the offending GRO.
    pub fn mac(&mut self, d: i8, w: i8) -> Result<u64, PmacError> {
        let din = to_sign_mag(d);
        let weight = to_sign_mag(w);
        let (w_msb, w_lsb) = split_weight(weight.mag as u32)?;
        let pulse = dtc_pulse(din.mag as u32)? as u64;
        let t_msb = pulse * w_msb as u64;
        let t_lsb = pulse * w_lsb as u64;

        // SIGN is the XNOR of the operand signs: equal signs drive the
        // positive pair, unequal the negative pair.
        let positive = din.negative == weight.negative;
        let (msb_id, lsb_id) = if positive {
            (GroId::PosMsb, GroId::PosLsb)
        } else {
            (GroId::NegMsb, GroId::NegLsb)
        };
        let (msb, lsb) = if positive {
            (&mut self.pos_msb, &mut self.pos_lsb)
        } else {
            (&mut self.neg_msb, &mut self.neg_lsb)
        };

        // Both advances commit atomically: check first, then apply. In
        // lenient mode advance never fails (counters pin instead).
        if matches!(msb.mode(), SaturationMode::Strict) {
            if !msb.can_advance(t_msb) {
                return Err(PmacError::Saturated { gro: msb_id });
            }
            if !lsb.can_advance(t_lsb) {
                return Err(PmacError::Saturated { gro: lsb_id });
            }
        }
        msb.advance(t_msb)?;
        lsb.advance(t_lsb)?;
        self.ops_count += 1;
        Ok(t_msb + t_lsb)
    }

    /// MAC output: shift-and-add each pair, then subtract in the digital
    /// domain. Optionally re-arms all four oscillators and the op counter.
    pub fn readout(&mut self, reset_after: bool) -> i64 {
        let pos = self.pos_msb.read_raw() as i64 * 16 + self.pos_lsb.read_raw() as i64;
        let neg = self.neg_msb.read_raw() as i64 * 16 + self.neg_lsb.read_raw() as i64;
        if reset_after {
            self.pos_msb.reset();
            self.pos_lsb.reset();
            self.neg_msb.reset();
            self.neg_lsb.reset();
            self.ops_count = 0;
        }
        pos - neg
    }
}
