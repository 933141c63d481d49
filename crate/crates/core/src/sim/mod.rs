//! State backends and the copy abstraction the algorithms drive.
//!
//! Every quantum state the algorithms use has the shape
//! `sum_a c_a |a> |f_1(a)> .. |f_k(a)>`: an index register in superposition
//! with data registers that are classical functions of the index. A
//! [`CopySpec`] describes one such state; [`CopyState`] holds it in either
//! backend and exposes the few operations Grover search needs.

pub mod dense;
pub mod layout;
pub mod structured;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

pub use dense::{DenseState, Gate, DENSE_QUBIT_CAP};
pub use layout::{Register, RegisterLayout, Role};
pub use structured::{Binding, StructuredState};

use crate::error::{Error, Result};

/// Inverse-CDF sample from a discrete distribution using exactly one
/// uniform draw. Both backends measure through this, so equal
/// distributions consume the rng identically.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let x = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = i;
        }
        acc += p;
        if x < acc {
            return i;
        }
    }
    last_nonzero
}

/// `H` on every qubit of `reg`, starting from `|0..0>`.
pub fn prepare_uniform(layout: RegisterLayout, reg: usize) -> Result<DenseState> {
    if layout.registers().get(reg).map(|r| &r.role) != Some(&Role::Index) {
        return Err(Error::Layout(format!("register {reg} is not an index register")));
    }
    let mut state = DenseState::zero(layout)?;
    state.apply_to_register(Gate::H, reg)?;
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Dense,
    Structured,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Dense => "dense",
            Backend::Structured => "structured",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Backend::Dense),
            "structured" => Ok(Backend::Structured),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode `{other}` (expected dense or structured)"
            ))),
        }
    }
}

/// One uniform index superposition over a padded domain with its bound
/// data registers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopySpec {
    index_width: usize,
    domain: usize,
    bindings: Vec<Binding>,
}

impl CopySpec {
    /// `domain` real indices, padded to `2^ceil(log2 domain)`; every binding
    /// must already cover the padded range.
    pub fn new(domain: usize, bindings: Vec<Binding>) -> Result<Self> {
        if domain == 0 {
            return Err(Error::InvalidParameter("empty search domain".into()));
        }
        let index_width = crate::math::ceil_log2(domain as u64);
        let padded = 1usize << index_width;
        for b in &bindings {
            if b.values.len() != padded {
                return Err(Error::Layout(format!(
                    "binding `{}` has {} values for a padded domain of {padded}",
                    b.name,
                    b.values.len()
                )));
            }
        }
        Ok(CopySpec {
            index_width,
            domain,
            bindings,
        })
    }

    pub fn index_width(&self) -> usize {
        self.index_width
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn padded(&self) -> usize {
        1 << self.index_width
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.bindings
    }

    /// Index plus data qubits.
    pub fn width(&self) -> usize {
        self.index_width + self.bindings.iter().map(|b| b.width).sum::<usize>()
    }

    /// Qubits held jointly by the dense backend (adds the kickback ancilla).
    pub fn dense_width(&self) -> usize {
        self.width() + 1
    }

    /// Classical lookup of the bound data at index `a`.
    pub fn data(&self, a: usize) -> Vec<u64> {
        self.bindings.iter().map(|b| b.values[a]).collect()
    }

    pub fn prepare(&self, backend: Backend) -> Result<CopyState> {
        match backend {
            Backend::Structured => Ok(CopyState::Structured(StructuredState::uniform(
                self.index_width,
                self.bindings.clone(),
            )?)),
            Backend::Dense => DenseCopy::prepare(self).map(CopyState::Dense),
        }
    }
}

/// Dense realisation: `H` on the index, data loaded by reversible XOR
/// oracles, and a kickback ancilla in `(|0> - |1>)/sqrt 2`.
#[derive(Debug, Clone)]
pub struct DenseCopy {
    state: DenseState,
    bindings: Vec<Binding>,
    kick: usize,
}

const INDEX: usize = 0;

impl DenseCopy {
    fn prepare(spec: &CopySpec) -> Result<Self> {
        let mut regs = vec![Register::index("index", spec.index_width)];
        for b in &spec.bindings {
            regs.push(Register::data(&b.name, b.width, "index"));
        }
        regs.push(Register::ancilla("kickback", 1));
        let layout = RegisterLayout::new(regs)?;
        let kick = layout.registers().len() - 1;
        let mut state = prepare_uniform(layout, INDEX)?;
        for (k, b) in spec.bindings.iter().enumerate() {
            let reg = k + 1;
            for bit in 0..b.width {
                let target = state.layout().qubit(reg, bit);
                let layout = state.layout().clone();
                state.xor_predicate(target, |basis| {
                    let a = layout.extract(basis, INDEX) as usize;
                    b.values[a] >> bit & 1 == 1
                })?;
            }
        }
        let q = state.layout().qubit(kick, 0);
        state.apply_gate(Gate::X, &[q])?;
        state.apply_gate(Gate::H, &[q])?;
        Ok(DenseCopy {
            state,
            bindings: spec.bindings.clone(),
            kick,
        })
    }

    pub fn state(&self) -> &DenseState {
        &self.state
    }

    fn manifold_basis(&self, a: usize) -> usize {
        let layout = self.state.layout();
        self.bindings
            .iter()
            .enumerate()
            .fold(layout.place(INDEX, a as u64), |acc, (k, b)| {
                acc | layout.place(k + 1, b.values[a])
            })
    }

    /// Index amplitudes with the kickback factored out, plus the norm of
    /// everything outside `|a>|f(a)>|->`.
    pub fn view(&self) -> (Vec<Complex64>, f64) {
        let layout = self.state.layout();
        let kick_bit = layout.place(self.kick, 1);
        let amps = self.state.amplitudes();
        let size = 1usize << layout.register_width(INDEX);
        let mut out = Vec::with_capacity(size);
        let mut on_manifold = vec![false; amps.len()];
        let mut residual = 0.0;
        for a in 0..size {
            let b = self.manifold_basis(a);
            let (a0, a1) = (amps[b], amps[b | kick_bit]);
            let x = (a0 - a1) * std::f64::consts::FRAC_1_SQRT_2;
            // the component along |+> on the kickback is off-manifold
            residual += ((a0 + a1) * std::f64::consts::FRAC_1_SQRT_2).norm_sqr();
            on_manifold[b] = true;
            on_manifold[b | kick_bit] = true;
            out.push(x);
        }
        residual += amps
            .iter()
            .zip(&on_manifold)
            .filter(|(_, &on)| !on)
            .map(|(amp, _)| amp.norm_sqr())
            .sum::<f64>();
        (out, residual.sqrt())
    }
}

#[derive(Debug, Clone)]
pub enum CopyState {
    Dense(DenseCopy),
    Structured(StructuredState),
}

impl CopyState {
    pub fn backend(&self) -> Backend {
        match self {
            CopyState::Dense(_) => Backend::Dense,
            CopyState::Structured(_) => Backend::Structured,
        }
    }

    pub fn index_width(&self) -> usize {
        match self {
            CopyState::Dense(d) => d.state.layout().register_width(INDEX),
            CopyState::Structured(s) => s.index_width(),
        }
    }

    pub fn padded(&self) -> usize {
        1 << self.index_width()
    }

    /// `|a>|f(a)> -> (-1)^{marked(a, f(a))} |a>|f(a)>`. The dense backend
    /// evaluates `marked` on the register contents of each basis state and
    /// XORs it into the kickback ancilla.
    pub fn phase_oracle(&mut self, marked: &dyn Fn(usize, &[u64]) -> bool) -> Result<()> {
        match self {
            CopyState::Structured(s) => {
                s.phase_oracle(marked);
                Ok(())
            }
            CopyState::Dense(d) => {
                let layout = d.state.layout().clone();
                let data_regs = d.bindings.len();
                let target = layout.qubit(d.kick, 0);
                d.state.xor_predicate(target, |basis| {
                    let a = layout.extract(basis, INDEX) as usize;
                    let data: Vec<u64> =
                        (1..=data_regs).map(|r| layout.extract(basis, r)).collect();
                    marked(a, &data)
                })
            }
        }
    }

    /// Reflection about the prepared state.
    pub fn diffusion(&mut self) {
        match self {
            CopyState::Structured(s) => s.diffusion(),
            CopyState::Dense(d) => {
                let bound: Vec<(usize, &[u64])> = d
                    .bindings
                    .iter()
                    .enumerate()
                    .map(|(k, b)| (k + 1, b.values.as_slice()))
                    .collect();
                d.state.reflect_about_bound_uniform(INDEX, &bound);
            }
        }
    }

    pub fn index_probabilities(&self) -> Vec<f64> {
        match self {
            CopyState::Structured(s) => s.index_probabilities(),
            CopyState::Dense(d) => d.state.register_probabilities(INDEX),
        }
    }

    /// Measures the index register (one rng draw).
    pub fn measure_index<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        match self {
            CopyState::Structured(s) => s.measure(rng),
            CopyState::Dense(d) => d.state.measure_register(INDEX, rng) as usize,
        }
    }

    /// Bound data at index `i`. The dense backend relabels `i` to `0` with
    /// `X` gates on the index bits set in `i`, reads the data registers of
    /// the index-zero branch, and undoes the relabelling; the state is left
    /// unchanged.
    pub fn access(&mut self, i: usize) -> Result<Vec<u64>> {
        let size = self.padded();
        if i >= size {
            return Err(Error::IndexOutOfRange { index: i, size });
        }
        match self {
            CopyState::Structured(s) => Ok(s.data(i)),
            CopyState::Dense(d) => {
                let flip: Vec<usize> = (0..d.state.layout().register_width(INDEX))
                    .filter(|bit| i >> bit & 1 == 1)
                    .map(|bit| d.state.layout().qubit(INDEX, bit))
                    .collect();
                for &q in &flip {
                    d.state.apply_gate(Gate::X, &[q])?;
                }
                let layout = d.state.layout();
                let basis = d
                    .state
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .find(|(b, amp)| layout.extract(*b, INDEX) == 0 && amp.norm_sqr() > 1e-20)
                    .map(|(b, _)| b)
                    .ok_or_else(|| Error::Layout(format!("index {i} carries no amplitude")))?;
                let data = (1..=d.bindings.len())
                    .map(|r| layout.extract(basis, r))
                    .collect();
                for &q in &flip {
                    d.state.apply_gate(Gate::X, &[q])?;
                }
                Ok(data)
            }
        }
    }

    /// Index-register amplitudes and the off-manifold residual (always 0
    /// for the structured backend).
    pub fn snapshot(&self) -> (Vec<Complex64>, f64) {
        match self {
            CopyState::Structured(s) => (s.amplitudes().to_vec(), 0.0),
            CopyState::Dense(d) => d.view(),
        }
    }

    pub fn as_dense(&self) -> Option<&DenseState> {
        match self {
            CopyState::Dense(d) => Some(&d.state),
            CopyState::Structured(_) => None,
        }
    }
}

/// Hands out at most `capacity` fresh copies of one state.
#[derive(Debug, Clone)]
pub struct StateFactory {
    spec: CopySpec,
    backend: Backend,
    capacity: usize,
    used: usize,
}

impl StateFactory {
    pub fn new(spec: CopySpec, backend: Backend, capacity: usize) -> Self {
        StateFactory {
            spec,
            backend,
            capacity,
            used: 0,
        }
    }

    pub fn spec(&self) -> &CopySpec {
        &self.spec
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn remaining(&self) -> usize {
        self.capacity - self.used
    }

    pub fn next_copy(&mut self) -> Result<CopyState> {
        if self.used == self.capacity {
            return Err(Error::StateExhausted(self.capacity));
        }
        self.used += 1;
        self.spec.prepare(self.backend)
    }
}
