//! Exact dense statevector over the four-gate basis `{H, X, Z, CNOT}`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;

use super::layout::RegisterLayout;
use super::sample_index;
use crate::error::{Error, Result};

/// Default cap on dense width.
pub const DENSE_QUBIT_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    H,
    X,
    Z,
    /// Targets are `[control, target]`.
    Cnot,
}

impl Gate {
    fn arity(self) -> usize {
        match self {
            Gate::Cnot => 2,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::X => "X",
            Gate::Z => "Z",
            Gate::Cnot => "CNOT",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    amps: Vec<Complex64>,
    layout: RegisterLayout,
}

impl DenseState {
    /// `|0..0>` over the layout.
    pub fn zero(layout: RegisterLayout) -> Result<Self> {
        Self::basis(layout, 0)
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        check_width(layout.width(), DENSE_QUBIT_CAP)?;
        let dim = 1usize << layout.width();
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, size: dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(DenseState { amps, layout })
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        check_width(layout.width(), DENSE_QUBIT_CAP)?;
        if amps.len() != 1usize << layout.width() {
            return Err(Error::Layout(format!(
                "{} amplitudes for a {}-qubit layout",
                amps.len(),
                layout.width()
            )));
        }
        Ok(DenseState { amps, layout })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn width(&self) -> usize {
        self.layout.width()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_gate(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        if targets.len() != gate.arity() {
            return Err(Error::GateArity {
                gate: gate.name(),
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        for &q in targets {
            if q >= self.width() {
                return Err(Error::InvalidQubit {
                    qubit: q,
                    width: self.width(),
                });
            }
        }
        match gate {
            Gate::H => self.single(targets[0], |a, b| {
                (
                    (a + b) * FRAC_1_SQRT_2,
                    (a - b) * FRAC_1_SQRT_2,
                )
            }),
            Gate::X => self.single(targets[0], |a, b| (b, a)),
            Gate::Z => self.single(targets[0], |a, b| (a, -b)),
            Gate::Cnot => {
                let (c, t) = (targets[0], targets[1]);
                if c == t {
                    return Err(Error::DuplicateTarget);
                }
                let (cbit, tbit) = (1usize << c, 1usize << t);
                for i in 0..self.amps.len() {
                    if i & cbit != 0 && i & tbit == 0 {
                        self.amps.swap(i, i | tbit);
                    }
                }
            }
        }
        Ok(())
    }

    fn single(&mut self, q: usize, f: impl Fn(Complex64, Complex64) -> (Complex64, Complex64)) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = f(self.amps[i], self.amps[i | bit]);
                self.amps[i] = a;
                self.amps[i | bit] = b;
            }
        }
    }

    /// Applies `gate` to every qubit of a register.
    pub fn apply_to_register(&mut self, gate: Gate, reg: usize) -> Result<()> {
        for bit in 0..self.layout.register_width(reg) {
            self.apply_gate(gate, &[self.layout.qubit(reg, bit)])?;
        }
        Ok(())
    }

    /// Reversible classical oracle `|x>|y> -> |x>|y xor f(x)>` on one target
    /// qubit. `f` must not depend on the target bit.
    pub fn xor_predicate(&mut self, target: usize, f: impl Fn(usize) -> bool) -> Result<()> {
        if target >= self.width() {
            return Err(Error::InvalidQubit {
                qubit: target,
                width: self.width(),
            });
        }
        let bit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & bit == 0 && f(i) {
                self.amps.swap(i, i | bit);
            }
        }
        Ok(())
    }

    /// Multiplies amplitude of every basis state where `f` holds by -1.
    pub fn phase_flip(&mut self, f: impl Fn(usize) -> bool) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if f(i) {
                *a = -*a;
            }
        }
    }

    /// Reflection `2|u><u| - I` on the index register `index` and the data
    /// registers bound to it, with `|u> = 2^(-w/2) sum_a |a>|f_1(a)>..|f_k(a)>`;
    /// acts as the identity on every other register. Without bindings this is
    /// the usual inversion about the mean of the index amplitudes.
    pub fn reflect_about_bound_uniform(&mut self, index: usize, bindings: &[(usize, &[u64])]) {
        let layout = &self.layout;
        let size = 1usize << layout.register_width(index);
        let scale = 1.0 / (size as f64).sqrt();
        let mut bound_mask = layout.mask(index);
        for &(reg, _) in bindings {
            bound_mask |= layout.mask(reg);
        }
        let manifold: Vec<usize> = (0..size)
            .map(|a| {
                bindings.iter().fold(layout.place(index, a as u64), |acc, &(reg, values)| {
                    acc | layout.place(reg, values[a])
                })
            })
            .collect();
        let overlaps: Vec<(usize, Complex64)> = (0..self.amps.len())
            .filter(|spectator| spectator & bound_mask == 0)
            .map(|spectator| {
                let overlap: Complex64 = manifold.iter().map(|&b| self.amps[spectator | b]).sum();
                (spectator, overlap * scale)
            })
            .collect();
        for a in &mut self.amps {
            *a = -*a;
        }
        for (spectator, overlap) in overlaps {
            for &b in &manifold {
                self.amps[spectator | b] += overlap * (2.0 * scale);
            }
        }
    }

    /// Marginal distribution of one register, indexed by register value.
    pub fn register_probabilities(&self, reg: usize) -> Vec<f64> {
        let mut probs = vec![0.0; 1usize << self.layout.register_width(reg)];
        for (i, a) in self.amps.iter().enumerate() {
            probs[self.layout.extract(i, reg) as usize] += a.norm_sqr();
        }
        probs
    }

    /// Born-rule measurement of one register; the state collapses.
    pub fn measure_register<R: Rng + ?Sized>(&mut self, reg: usize, rng: &mut R) -> u64 {
        let outcome = sample_index(&self.register_probabilities(reg), rng) as u64;
        self.collapse(reg, outcome);
        outcome
    }

    /// Projects onto `reg = value` and renormalises.
    pub fn collapse(&mut self, reg: usize, value: u64) {
        let layout = &self.layout;
        let mut norm = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if layout.extract(i, reg) != value {
                *a = Complex64::new(0.0, 0.0);
            } else {
                norm += a.norm_sqr();
            }
        }
        let scale = 1.0 / norm.sqrt();
        for a in &mut self.amps {
            *a *= scale;
        }
    }

    /// Measures every register, in layout order.
    pub fn measure<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<u64> {
        (0..self.layout.registers().len())
            .map(|reg| self.measure_register(reg, rng))
            .collect()
    }

    /// `basis_index,re,im` per line.
    pub fn dump(&self, mut out: impl Write) -> Result<()> {
        for (i, a) in self.amps.iter().enumerate() {
            writeln!(out, "{i},{:.17e},{:.17e}", a.re, a.im)?;
        }
        Ok(())
    }
}

pub(crate) fn check_width(width: usize, cap: usize) -> Result<()> {
    if width > cap {
        return Err(Error::WidthCap { width, cap });
    }
    Ok(())
}
