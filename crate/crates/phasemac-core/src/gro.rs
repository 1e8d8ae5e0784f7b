//! Single gated ring oscillator: phase-domain accumulation, wrap counting,
//! and phase-code encode/decode.
//!
//! The oscillator is a ring of an odd number of inverters behind a power
//! gating switch. While gated on it advances one phase step per inverter
//! transition (pi/num_stages radians); gating off freezes the phase. A wrap
//! counter catches every return to phase 0, so counter and instantaneous
//! phase together read out the total transition count: counter holds the
//! MSBs, phase the LSBs.

use alloc::vec::Vec;
use core::fmt;

/// Inclusive upper bound on ring size (keeps `read_raw` inside u64).
pub const MAX_STAGES: u32 = 63;
/// Inclusive upper bound on counter width (keeps `read_raw` inside u64).
pub const MAX_COUNTER_BITS: u32 = 57;

/// Full-scale DTC input magnitude (7-bit).
pub const DTC_FULL_SCALE: u32 = 127;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroError {
    /// Ring size must be odd (even rings do not oscillate) and in [3, 63].
    InvalidStageCount(u32),
    /// Counter width must be in [1, 57].
    InvalidCounterBits(u32),
    /// Phase index outside [0, 2*num_stages).
    PhaseOutOfRange { phase: u32, period: u32 },
    /// Code length does not match the ring size.
    CodeLengthMismatch { len: usize, num_stages: u32 },
    /// Snapshot is not one of the 2*num_stages reachable ring states.
    InvalidPhaseCode,
    /// DTC input magnitude outside [0, 127].
    DtcOutOfRange(u32),
    /// The wrap counter would overflow; a readout is required first.
    Saturated,
}

impl fmt::Display for GroError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroError::InvalidStageCount(n) => {
                write!(
                    f,
                    "ring must have an odd stage count in [3, {MAX_STAGES}], got {n}"
                )
            }
            GroError::InvalidCounterBits(b) => {
                write!(
                    f,
                    "counter width must be in [1, {MAX_COUNTER_BITS}], got {b}"
                )
            }
            GroError::PhaseOutOfRange { phase, period } => {
                write!(f, "phase index {phase} outside [0, {period})")
            }
            GroError::CodeLengthMismatch { len, num_stages } => {
                write!(f, "phase code has {len} bits, ring has {num_stages} stages")
            }
            GroError::InvalidPhaseCode => write!(f, "unreachable inverter snapshot"),
            GroError::DtcOutOfRange(m) => {
                write!(f, "DTC magnitude {m} outside [0, {DTC_FULL_SCALE}]")
            }
            GroError::Saturated => write!(f, "wrap counter saturated; readout required"),
        }
    }
}

impl core::error::Error for GroError {}

fn validate_stages(num_stages: u32) -> Result<(), GroError> {
    if !(3..=MAX_STAGES).contains(&num_stages) || num_stages.is_multiple_of(2) {
        return Err(GroError::InvalidStageCount(num_stages));
    }
    Ok(())
}

/// What to do when the wrap counter runs out of range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SaturationMode {
    /// `advance` fails and leaves the state untouched.
    #[default]
    Strict,
    /// The counter pins at its maximum and a sticky flag is raised;
    /// readouts are then lower bounds.
    Lenient,
}

/// One gated ring oscillator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroState {
    num_stages: u32,
    phase_index: u32,
    wrap_counter: u64,
    counter_bits: u32,
    saturated: bool,
    mode: SaturationMode,
}

impl Default for GroState {
    /// The fabricated configuration: 5-stage ring, 20-bit counter, strict.
    fn default() -> Self {
        Self::new(5, 20).expect("default configuration is valid")
    }
}

impl GroState {
    pub fn new(num_stages: u32, counter_bits: u32) -> Result<Self, GroError> {
        Self::with_mode(num_stages, counter_bits, SaturationMode::Strict)
    }

    pub fn with_mode(
        num_stages: u32,
        counter_bits: u32,
        mode: SaturationMode,
    ) -> Result<Self, GroError> {
        validate_stages(num_stages)?;
        if counter_bits == 0 || counter_bits > MAX_COUNTER_BITS {
            return Err(GroError::InvalidCounterBits(counter_bits));
        }
        Ok(Self {
            num_stages,
            phase_index: 0,
            wrap_counter: 0,
            counter_bits,
            saturated: false,
            mode,
        })
    }

    pub fn num_stages(&self) -> u32 {
        self.num_stages
    }

    pub fn counter_bits(&self) -> u32 {
        self.counter_bits
    }

    pub fn phase_index(&self) -> u32 {
        self.phase_index
    }

    pub fn wrap_counter(&self) -> u64 {
        self.wrap_counter
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn mode(&self) -> SaturationMode {
        self.mode
    }

    /// Phase states per full 2*pi rotation (one per inverter transition).
    pub fn period(&self) -> u32 {
        2 * self.num_stages
    }

    /// Current phase in radians: one transition is pi/num_stages.
    pub fn phase_radians(&self) -> f64 {
        self.phase_index as f64 * core::f64::consts::PI / self.num_stages as f64
    }

    /// Total transitions the counter can absorb before saturating.
    pub fn capacity(&self) -> u64 {
        (1u64 << self.counter_bits) * self.period() as u64
    }

    /// Run the oscillator for `transitions` inverter transitions.
    ///
    /// Phase accumulates modulo the period; every 2*pi rotation bumps the
    /// wrap counter. In strict mode a counter overflow fails without touching
    /// the state; in lenient mode the counter pins and the sticky
    /// saturation flag is set.
    pub fn advance(&mut self, transitions: u64) -> Result<(), GroError> {
        let period = self.period() as u128;
        let total = self.phase_index as u128 + transitions as u128;
        let new_phase = (total % period) as u32;
        let new_wraps = self.wrap_counter as u128 + total / period;
        let cap = 1u128 << self.counter_bits;
        if new_wraps >= cap {
            match self.mode {
                SaturationMode::Strict => return Err(GroError::Saturated),
                SaturationMode::Lenient => {
                    self.wrap_counter = (cap - 1) as u64;
                    self.phase_index = new_phase;
                    self.saturated = true;
                    return Ok(());
                }
            }
        }
        self.wrap_counter = new_wraps as u64;
        self.phase_index = new_phase;
        Ok(())
    }

    /// True if `advance(transitions)` would succeed without saturating.
    pub fn can_advance(&self, transitions: u64) -> bool {
        if self.saturated {
            return false;
        }
        let period = self.period() as u128;
        let total = self.phase_index as u128 + transitions as u128;
        self.wrap_counter as u128 + total / period < (1u128 << self.counter_bits)
    }

    /// Sample counter (MSBs) and phase (LSBs) as one number.
    ///
    /// Equals the total transitions applied since reset; once the saturation
    /// flag is set the value is only a lower bound.
    pub fn read_raw(&self) -> u64 {
        self.wrap_counter * self.period() as u64 + self.phase_index as u64
    }

    /// Re-arm after a readout: phase 0, counter 0, flag cleared.
    pub fn reset(&mut self) {
        self.phase_index = 0;
        self.wrap_counter = 0;
        self.saturated = false;
    }

    /// Latch the inverter outputs at the current phase.
    pub fn phase_code(&self) -> PhaseCode {
        encode_phase(self.phase_index, self.num_stages).expect("own phase index is always in range")
    }
}

/// Snapshot of every inverter output, taken by latching the ring.
///
/// Exactly one stage of a valid snapshot is "unstable" (its output equals
/// its input — the stage that fires next), so only 2*num_stages of the
/// 2^num_stages bit patterns are reachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseCode {
    bits: Vec<bool>,
}

impl PhaseCode {
    pub fn from_bits(bits: &[bool]) -> Self {
        Self {
            bits: bits.to_vec(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Reference ring state for phase 0: alternating outputs starting at 0, with
/// the unstable stage pinned at index num_stages-1.
fn phase_zero_bits(num_stages: u32) -> Vec<bool> {
    let n = num_stages as usize;
    let mut bits: Vec<bool> = (0..n).map(|i| i % 2 == 1).collect();
    bits[n - 1] = true; // equals bits[n-2]: the unstable stage
    bits
}

/// Inverter snapshot after `phase_index` transitions from the phase-0 state.
///
/// Transition t flips the output of stage (num_stages-1+t) mod num_stages:
/// each firing stage hands instability to its successor around the ring.
pub fn encode_phase(phase_index: u32, num_stages: u32) -> Result<PhaseCode, GroError> {
    validate_stages(num_stages)?;
    let period = 2 * num_stages;
    if phase_index >= period {
        return Err(GroError::PhaseOutOfRange {
            phase: phase_index,
            period,
        });
    }
    let n = num_stages as usize;
    let mut bits = phase_zero_bits(num_stages);
    for t in 0..phase_index as usize {
        let idx = (n - 1 + t) % n;
        bits[idx] = !bits[idx];
    }
    Ok(PhaseCode { bits })
}

/// Recover the phase index from an inverter snapshot.
///
/// Rejects any code without exactly one unstable stage; the remaining
/// ambiguity (a ring state and its complement share the unstable index) is
/// settled by direct comparison.
pub fn decode_phase(code: &PhaseCode, num_stages: u32) -> Result<u32, GroError> {
    validate_stages(num_stages)?;
    let n = num_stages as usize;
    if code.bits.len() != n {
        return Err(GroError::CodeLengthMismatch {
            len: code.bits.len(),
            num_stages,
        });
    }
    let mut unstable = None;
    for i in 0..n {
        let input = code.bits[(i + n - 1) % n];
        if code.bits[i] == input {
            if unstable.is_some() {
                return Err(GroError::InvalidPhaseCode);
            }
            unstable = Some(i);
        }
    }
    let u = unstable.ok_or(GroError::InvalidPhaseCode)?;
    let candidate = (u as u32 + 1) % num_stages;
    for p in [candidate, candidate + num_stages] {
        if encode_phase(p, num_stages)?.bits == code.bits {
            return Ok(p);
        }
    }
    Err(GroError::InvalidPhaseCode)
}

/// Digital-to-time conversion: pulse width in inverter-delay ticks is the
/// input magnitude itself (1 tick = t_inv, the inverter delay at W=1).
pub fn dtc_pulse(d_mag: u32) -> Result<u32, GroError> {
    if d_mag > DTC_FULL_SCALE {
        return Err(GroError::DtcOutOfRange(d_mag));
    }
    Ok(d_mag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn construction_validates_ring() {
        assert!(GroState::new(5, 20).is_ok());
        assert!(GroState::new(7, 8).is_ok());
        assert!(matches!(
            GroState::new(4, 20),
            Err(GroError::InvalidStageCount(4))
        ));
        assert!(matches!(
            GroState::new(1, 20),
            Err(GroError::InvalidStageCount(1))
        ));
        assert!(matches!(
            GroState::new(5, 0),
            Err(GroError::InvalidCounterBits(0))
        ));
        assert!(matches!(
            GroState::new(5, 58),
            Err(GroError::InvalidCounterBits(58))
        ));
        let g = GroState::new(7, 8).unwrap();
        assert_eq!(g.num_stages(), 7);
        assert_eq!(g.phase_index(), 0);
        assert_eq!(g.wrap_counter(), 0);
        assert!(!g.is_saturated());
    }

    #[test]
    fn phase_trace_advance_three_then_seven() {
        // Din=3, W=1: the ring advances 3 inverter cells, i.e. 0.6*pi.
        let mut g = GroState::default();
        g.advance(3).unwrap();
        assert_eq!(g.phase_index(), 3);
        assert_eq!(g.wrap_counter(), 0);
        assert!((g.phase_radians() - 0.6 * core::f64::consts::PI).abs() < 1e-15);
        assert_eq!(g.read_raw(), 3);
        // Crossing 2*pi bumps the counter and returns the phase to 0.
        g.advance(7).unwrap();
        assert_eq!(g.phase_index(), 0);
        assert_eq!(g.wrap_counter(), 1);
        assert_eq!(g.read_raw(), 10);
    }

    #[test]
    fn advance_is_modular() {
        // (7 + 5) = 12 = 1*10 + 2 on a 5-stage ring.
        let mut g = GroState::default();
        g.advance(7).unwrap();
        g.advance(5).unwrap();
        assert_eq!(g.phase_index(), 2);
        assert_eq!(g.wrap_counter(), 1);

        let mut h = GroState::default();
        h.advance(4).unwrap();
        h.advance(0).unwrap();
        assert_eq!(h.phase_index(), 4);
        assert_eq!(h.wrap_counter(), 0);
    }

    #[test]
    fn read_raw_composes_counter_and_phase() {
        let mut g = GroState::default();
        g.advance(7 * 10 + 9).unwrap();
        assert_eq!(g.wrap_counter(), 7);
        assert_eq!(g.phase_index(), 9);
        assert_eq!(g.read_raw(), 79);
    }

    #[test]
    fn reset_rearms() {
        let mut g = GroState::default();
        g.advance(79).unwrap();
        g.reset();
        assert_eq!(g.read_raw(), 0);
        g.reset(); // idempotent
        assert_eq!(g.read_raw(), 0);
        g.advance(3).unwrap();
        assert_eq!(g.read_raw(), 3);
    }

    #[test]
    fn saturation_boundary_is_exact() {
        // capacity = 2^2 wraps * 6 states = 24 transitions for (3 stages, 2 bits).
        let mut g = GroState::new(3, 2).unwrap();
        g.advance(23).unwrap();
        assert!(!g.is_saturated());
        assert_eq!(g.read_raw(), 23);
        let before = g.clone();
        assert_eq!(g.advance(1), Err(GroError::Saturated));
        assert_eq!(g, before, "failed advance must not move the state");
        g.reset();
        g.advance(24 - 1).unwrap();
        assert!(!g.can_advance(1));
        assert!(g.can_advance(0));
    }

    #[test]
    fn lenient_mode_pins_and_flags() {
        let mut g = GroState::with_mode(3, 2, SaturationMode::Lenient).unwrap();
        g.advance(100).unwrap();
        assert!(g.is_saturated());
        // Counter pinned at 3 wraps; readout is a lower bound.
        assert_eq!(g.wrap_counter(), 3);
        assert!(g.read_raw() <= 100);
        g.advance(5).unwrap(); // still accepted, flag stays
        assert!(g.is_saturated());
        g.reset();
        assert!(!g.is_saturated());
    }

    #[test]
    fn accumulator_exactness_over_sequences() {
        let mut g = GroState::default();
        let seq = [3u64, 0, 7, 12, 1, 9, 55, 2];
        let mut total = 0u64;
        for &a in &seq {
            g.advance(a).unwrap();
            total += a;
        }
        assert_eq!(g.read_raw(), total);
    }

    #[test]
    fn phase_zero_code_matches_reference() {
        let code = encode_phase(0, 5).unwrap();
        assert_eq!(code.bits(), &[false, true, false, true, true]);
        // Stage 4 is the unique unstable stage of the reference state.
        assert_eq!(decode_phase(&code, 5).unwrap(), 0);
    }

    #[test]
    fn phase_one_flips_the_unstable_stage() {
        let code = encode_phase(1, 5).unwrap();
        assert_eq!(code.bits(), &[false, true, false, true, false]);
    }

    #[test]
    fn encode_rejects_out_of_range_phase() {
        assert!(matches!(
            encode_phase(10, 5),
            Err(GroError::PhaseOutOfRange {
                phase: 10,
                period: 10
            })
        ));
    }

    #[test]
    fn all_ones_is_invalid() {
        let code = PhaseCode::from_bits(&[true; 5]);
        assert_eq!(decode_phase(&code, 5), Err(GroError::InvalidPhaseCode));
    }

    #[test]
    fn code_length_must_match_ring() {
        let code = PhaseCode::from_bits(&[false, true, false]);
        assert!(matches!(
            decode_phase(&code, 5),
            Err(GroError::CodeLengthMismatch {
                len: 3,
                num_stages: 5
            })
        ));
    }

    #[test]
    fn bijection_on_exactly_two_n_codes() {
        for stages in [3u32, 5, 7] {
            let period = 2 * stages;
            let mut seen = vec![];
            for p in 0..period {
                let code = encode_phase(p, stages).unwrap();
                assert_eq!(decode_phase(&code, stages).unwrap(), p);
                assert!(!seen.contains(&code.bits().to_vec()));
                seen.push(code.bits().to_vec());
            }
            // Every other bit pattern must be rejected.
            let mut invalid = 0;
            for raw in 0..(1u32 << stages) {
                let bits: Vec<bool> = (0..stages).map(|i| raw >> i & 1 == 1).collect();
                let code = PhaseCode::from_bits(&bits);
                if decode_phase(&code, stages).is_err() {
                    invalid += 1;
                }
            }
            assert_eq!(invalid, (1u32 << stages) - period);
        }
    }

    #[test]
    fn state_snapshot_tracks_the_phase() {
        let mut g = GroState::default();
        g.advance(13).unwrap(); // phase 3 after one wrap
        assert_eq!(g.phase_code(), encode_phase(3, 5).unwrap());
    }

    #[test]
    fn dtc_pulse_is_identity_on_range() {
        assert_eq!(dtc_pulse(3).unwrap(), 3);
        assert_eq!(dtc_pulse(0).unwrap(), 0);
        assert_eq!(dtc_pulse(127).unwrap(), 127);
        assert_eq!(dtc_pulse(128), Err(GroError::DtcOutOfRange(128)));
    }
}
