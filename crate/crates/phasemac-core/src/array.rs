//! Batched matrix products over PMAC units, with the event counting that
//! feeds the energy model.
//!
//! The array abstraction is one unit per output row, reused across batch
//! columns with a readout+reset in between. Weights are read from memory
//! once per matrix and broadcast across the whole batch, which is exactly
//! the accounting the batch-size/energy tradeoff rests on.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::pmac::{GroId, PmacConfig, PmacError, PmacUnit};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrayError {
    DimMismatch {
        rows: usize,
        cols: usize,
        len: usize,
    },
    /// Worst-case accumulation for this dot length could overflow a counter.
    CapacityExceeded { len: usize, max_safe: usize },
    /// A unit saturated mid-product (possible only below the worst-case
    /// precheck bound when counters are undersized at runtime).
    Saturated { row: usize, gro: GroId },
    Ragged {
        row: usize,
        expected: usize,
        got: usize,
    },
}

impl fmt::Display for ArrayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrayError::DimMismatch { rows, cols, len } => {
                write!(f, "matrix is {rows}x{cols} but vector has length {len}")
            }
            ArrayError::CapacityExceeded { len, max_safe } => write!(
                f,
                "dot length {len} exceeds counter capacity; max safe length is {max_safe}"
            ),
            ArrayError::Saturated { row, gro } => {
                write!(f, "row {row}: GRO {gro} saturated")
            }
            ArrayError::Ragged { row, expected, got } => {
                write!(f, "row {row} has {got} elements, expected {expected}")
            }
        }
    }
}

impl core::error::Error for ArrayError {}

/// Event counters accumulated while driving the hardware model.
///
/// Pure bookkeeping: every field is monotone during a run, and two ledgers
/// merge by addition (order never matters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnergyLedger {
    pub inverter_transitions: u64,
    pub mac_ops: u64,
    pub weight_reads: u64,
    pub output_writes: u64,
}

impl EnergyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn merge(&mut self, other: &EnergyLedger) {
        self.inverter_transitions += other.inverter_transitions;
        self.mac_ops += other.mac_ops;
        self.weight_reads += other.weight_reads;
        self.output_writes += other.output_writes;
    }
}

impl core::ops::Add for EnergyLedger {
    type Output = EnergyLedger;

    fn add(mut self, rhs: EnergyLedger) -> EnergyLedger {
        self.merge(&rhs);
        self
    }
}

/// Row-major int8 matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Int8Matrix {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

impl Int8Matrix {
    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self, ArrayError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(ArrayError::Ragged {
                    row: i,
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<i8>) -> Result<Self, ArrayError> {
        if data.len() != rows * cols {
            return Err(ArrayError::DimMismatch {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.data[i * self.cols + j]
    }

    pub fn col(&self, j: usize) -> Vec<i8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[i8] {
        &self.data
    }
}

/// Row-major wide-integer matrix for MAC outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WideMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl WideMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

/// Largest dot length guaranteed not to saturate any counter, assuming
/// worst-case full-scale operands: N * 127 * 15 transitions land on one LSB
/// GRO, against a capacity of 2^counter_bits * 2 * num_stages.
pub fn max_safe_dot_length(counter_bits: u32, num_stages: u32) -> usize {
    let capacity = (1u128 << counter_bits) * 2 * num_stages as u128;
    let worst_per_op = 127u128 * 15;
    ((capacity - 1) / worst_per_op) as usize
}

/// A bank of PMAC units with shared configuration and an event ledger.
#[derive(Debug, Clone)]
pub struct PmacArray {
    cfg: PmacConfig,
    ledger: EnergyLedger,
}

impl PmacArray {
    pub fn new(cfg: PmacConfig) -> Self {
        Self {
            cfg,
            ledger: EnergyLedger::new(),
        }
    }

    pub fn config(&self) -> PmacConfig {
        self.cfg
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    pub fn take_ledger(&mut self) -> EnergyLedger {
        core::mem::take(&mut self.ledger)
    }

    pub fn max_safe_dot_length(&self) -> usize {
        max_safe_dot_length(self.cfg.counter_bits, self.cfg.num_stages)
    }

    fn precheck(&self, w: &Int8Matrix, len: usize) -> Result<(), ArrayError> {
        if w.cols() != len {
            return Err(ArrayError::DimMismatch {
                rows: w.rows(),
                cols: w.cols(),
                len,
            });
        }
        let max_safe = self.max_safe_dot_length();
        if len > max_safe {
            return Err(ArrayError::CapacityExceeded { len, max_safe });
        }
        Ok(())
    }

    /// y = W x over one unit per row; counts M*N weight reads, M*N MACs and
    /// M output writes into the ledger.
    pub fn matvec(&mut self, w: &Int8Matrix, x: &[i8]) -> Result<Vec<i64>, ArrayError> {
        self.precheck(w, x.len())?;
        let mut y = Vec::with_capacity(w.rows());
        for i in 0..w.rows() {
            let mut unit = PmacUnit::new(self.cfg).expect("validated config");
            for (j, &xj) in x.iter().enumerate() {
                match unit.mac(xj, w.get(i, j)) {
                    Ok(t) => self.ledger.inverter_transitions += t,
                    Err(PmacError::Saturated { gro }) => {
                        return Err(ArrayError::Saturated { row: i, gro })
                    }
                    Err(_) => unreachable!("mac inputs are int8 by construction"),
                }
                self.ledger.mac_ops += 1;
            }
            y.push(unit.readout(true));
        }
        self.ledger.weight_reads += (w.rows() * w.cols()) as u64;
        self.ledger.output_writes += w.rows() as u64;
        Ok(y)
    }

    /// Y = W X for an N x b activation block.
    ///
    /// Column j of the result is matvec(W, X[:, j]), but the weight matrix is
    /// fetched once for the whole batch: weight_reads grows by M*N while
    /// mac_ops grows by M*N*b.
    pub fn batched_matmul(
        &mut self,
        w: &Int8Matrix,
        x: &Int8Matrix,
    ) -> Result<WideMatrix, ArrayError> {
        self.precheck(w, x.rows())?;
        let batch = x.cols();
        let mut y = WideMatrix::zeros(w.rows(), batch);
        for i in 0..w.rows() {
            let mut unit = PmacUnit::new(self.cfg).expect("validated config");
            for j in 0..batch {
                for k in 0..w.cols() {
                    match unit.mac(x.get(k, j), w.get(i, k)) {
                        Ok(t) => self.ledger.inverter_transitions += t,
                        Err(PmacError::Saturated { gro }) => {
                            return Err(ArrayError::Saturated { row: i, gro })
                        }
                        Err(_) => unreachable!("mac inputs are int8 by construction"),
                    }
                    self.ledger.mac_ops += 1;
                }
                y.set(i, j, unit.readout(true));
            }
        }
        self.ledger.weight_reads += (w.rows() * w.cols()) as u64;
        self.ledger.output_writes += (w.rows() * batch) as u64;
        Ok(y)
    }
}
