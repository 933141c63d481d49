use crate::error::{Error, Result};

/// What a register holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Role {
    /// Search index; prepared in uniform superposition.
    Index,
    /// Classical function of the named index register.
    Data { source: String },
    Ancilla,
    Flag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub width: usize,
    pub role: Role,
}

impl Register {
    pub fn index(name: &str, width: usize) -> Self {
        Register {
            name: name.into(),
            width,
            role: Role::Index,
        }
    }

    pub fn data(name: &str, width: usize, source: &str) -> Self {
        Register {
            name: name.into(),
            width,
            role: Role::Data {
                source: source.into(),
            },
        }
    }

    pub fn ancilla(name: &str, width: usize) -> Self {
        Register {
            name: name.into(),
            width,
            role: Role::Ancilla,
        }
    }
}

/// Registers packed from qubit 0 upwards; qubit 0 of every register is its
/// least significant bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    offsets: Vec<usize>,
    width: usize,
}

impl RegisterLayout {
    /// Index registers may be zero qubits wide (a one-element domain); all
    /// other registers need at least one qubit.
    pub fn new(registers: Vec<Register>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(registers.len());
        let mut width = 0;
        for (k, reg) in registers.iter().enumerate() {
            if reg.width == 0 && reg.role != Role::Index {
                return Err(Error::Layout(format!("register `{}` has zero width", reg.name)));
            }
            if registers[..k].iter().any(|r| r.name == reg.name) {
                return Err(Error::Layout(format!("duplicate register `{}`", reg.name)));
            }
            if let Role::Data { source } = &reg.role {
                let ok = registers
                    .iter()
                    .any(|r| &r.name == source && r.role == Role::Index);
                if !ok {
                    return Err(Error::Layout(format!(
                        "data register `{}` depends on unknown index register `{source}`",
                        reg.name
                    )));
                }
            }
            offsets.push(width);
            width += reg.width;
        }
        Ok(RegisterLayout {
            registers,
            offsets,
            width,
        })
    }

    /// Total qubits.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.registers.iter().position(|r| r.name == name)
    }

    pub fn offset(&self, reg: usize) -> usize {
        self.offsets[reg]
    }

    pub fn register_width(&self, reg: usize) -> usize {
        self.registers[reg].width
    }

    /// Bit mask of the register within a basis index.
    pub fn mask(&self, reg: usize) -> usize {
        ((1usize << self.registers[reg].width) - 1) << self.offsets[reg]
    }

    /// Value of a register in a basis state.
    pub fn extract(&self, basis: usize, reg: usize) -> u64 {
        ((basis & self.mask(reg)) >> self.offsets[reg]) as u64
    }

    /// Basis index with only `reg` set to `value`.
    pub fn place(&self, reg: usize, value: u64) -> usize {
        debug_assert!(value < (1u64 << self.registers[reg].width));
        (value as usize) << self.offsets[reg]
    }

    /// Global qubit index of bit `bit` of register `reg`.
    pub fn qubit(&self, reg: usize, bit: usize) -> usize {
        self.offsets[reg] + bit
    }
}
