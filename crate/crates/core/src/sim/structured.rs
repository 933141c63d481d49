//! Amplitudes over the index register only. Every other register is a
//! deterministic function of the index, so a state `sum_a c_a |a>|f(a)>` is
//! stored as the vector `c` plus the tables `f`.

use num_complex::Complex64;
use rand::Rng;

use super::dense::{check_width, DenseState};
use super::layout::{Register, RegisterLayout};
use super::sample_index;
use crate::error::{Error, Result};

/// A data register bound to the index: `values[a]` is its content on `|a>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub name: String,
    pub width: usize,
    pub values: Vec<u64>,
}

impl Binding {
    pub fn new(name: &str, width: usize, values: Vec<u64>) -> Self {
        Binding {
            name: name.into(),
            width,
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuredState {
    amps: Vec<Complex64>,
    index_width: usize,
    bindings: Vec<Binding>,
}

impl StructuredState {
    /// Uniform superposition over `2^index_width` indices.
    pub fn uniform(index_width: usize, bindings: Vec<Binding>) -> Result<Self> {
        let size = 1usize << index_width;
        let amp = Complex64::new(1.0 / (size as f64).sqrt(), 0.0);
        Self::from_amplitudes(index_width, vec![amp; size], bindings)
    }

    pub fn from_amplitudes(
        index_width: usize,
        amps: Vec<Complex64>,
        bindings: Vec<Binding>,
    ) -> Result<Self> {
        let size = 1usize << index_width;
        if amps.len() != size {
            return Err(Error::Layout(format!(
                "{} amplitudes for an index register of {index_width} qubits",
                amps.len()
            )));
        }
        for b in &bindings {
            if b.values.len() != size {
                return Err(Error::Layout(format!(
                    "binding `{}` is not total over {size} indices",
                    b.name
                )));
            }
            if b.width == 0 || b.values.iter().any(|&v| v >> b.width != 0) {
                return Err(Error::Layout(format!(
                    "binding `{}` does not fit {} qubits",
                    b.name, b.width
                )));
            }
        }
        Ok(StructuredState {
            amps,
            index_width,
            bindings,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn index_width(&self) -> usize {
        self.index_width
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.bindings
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Data register contents on index `a`.
    pub fn data(&self, a: usize) -> Vec<u64> {
        self.bindings.iter().map(|b| b.values[a]).collect()
    }

    /// Index register followed by one register per binding.
    pub fn layout(&self) -> RegisterLayout {
        let mut regs = vec![Register::index("index", self.index_width)];
        regs.extend(
            self.bindings
                .iter()
                .map(|b| Register::data(&b.name, b.width, "index")),
        );
        RegisterLayout::new(regs).expect("binding names are unique")
    }

    /// Amplitude `c_a` on `|a>|f_1(a)>..|f_k(a)>`, zero elsewhere.
    pub fn expand(&self, cap: usize) -> Result<DenseState> {
        let layout = self.layout();
        check_width(layout.width(), cap)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << layout.width()];
        for (a, &c) in self.amps.iter().enumerate() {
            let basis = self
                .bindings
                .iter()
                .enumerate()
                .fold(layout.place(0, a as u64), |acc, (k, b)| {
                    acc | layout.place(k + 1, b.values[a])
                });
            amps[basis] = c;
        }
        DenseState::from_amplitudes(layout, amps)
    }

    /// `c_a -> (-1)^{marked(a, f(a))} c_a`.
    pub fn phase_oracle(&mut self, marked: impl Fn(usize, &[u64]) -> bool) {
        let mut data = vec![0u64; self.bindings.len()];
        for a in 0..self.amps.len() {
            for (slot, b) in data.iter_mut().zip(&self.bindings) {
                *slot = b.values[a];
            }
            if marked(a, &data) {
                self.amps[a] = -self.amps[a];
            }
        }
    }

    /// Inversion about the mean, `c_a -> 2 mean - c_a`.
    pub fn diffusion(&mut self) {
        let mean = self.amps.iter().sum::<Complex64>() / self.amps.len() as f64;
        for a in &mut self.amps {
            *a = mean * 2.0 - *a;
        }
    }

    pub fn index_probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Measures the index (and with it every bound register).
    pub fn measure<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let outcome = sample_index(&self.index_probabilities(), rng);
        for (a, amp) in self.amps.iter_mut().enumerate() {
            *amp = if a == outcome {
                *amp / amp.norm()
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        outcome
    }
}
