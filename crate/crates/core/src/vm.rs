//! The reference prefix machine: a loop-free bytecode over 3-bit opcodes.
//!
//! A program is a sequence of opcodes terminated by exactly one `HALT`.
//! Fixed-width opcodes plus a single terminator make the set of valid
//! programs prefix-free. Execution builds an output register starting from
//! Λ; the data string is readable only through `COPYDATA`.

use std::fmt;

use crate::bits::BitString;

pub const OPCODE_WIDTH: usize = 3;
pub const DEFAULT_STEP_BUDGET: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Opcode {
    Append0,
    Append1,
    CopyData,
    Dup,
    DropLast,
    Flip,
    Invalid,
    Halt,
}

impl Opcode {
    pub const ALL: [Opcode; 8] = [
        Opcode::Append0,
        Opcode::Append1,
        Opcode::CopyData,
        Opcode::Dup,
        Opcode::DropLast,
        Opcode::Flip,
        Opcode::Invalid,
        Opcode::Halt,
    ];

    /// Opcodes that may appear before the terminating `HALT`, in code order.
    pub const BODY: [Opcode; 6] = [
        Opcode::Append0,
        Opcode::Append1,
        Opcode::CopyData,
        Opcode::Dup,
        Opcode::DropLast,
        Opcode::Flip,
    ];

    pub fn from_code(code: u8) -> Opcode {
        Self::ALL[(code & 0b111) as usize]
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Opcode::Append0 => "APPEND0",
            Opcode::Append1 => "APPEND1",
            Opcode::CopyData => "COPYDATA",
            Opcode::Dup => "DUP",
            Opcode::DropLast => "DROPLAST",
            Opcode::Flip => "FLIP",
            Opcode::Invalid => "INVALID",
            Opcode::Halt => "HALT",
        }
    }
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, thiserror::Error)]
pub enum Undefined {
    #[error("program does not decode")]
    BadDecode,
    #[error("runtime fault")]
    RuntimeFault,
    #[error("step budget exceeded")]
    BudgetExceeded,
    #[error("no such program")]
    NoSuchProgram,
    #[error("unknown computer")]
    UnknownComputer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Defined(BitString),
    Undefined(Undefined),
}

impl RunOutcome {
    pub fn output(&self) -> Option<&BitString> {
        match self {
            RunOutcome::Defined(out) => Some(out),
            RunOutcome::Undefined(_) => None,
        }
    }
}

pub fn decode(bits: &BitString) -> Result<Vec<Opcode>, Undefined> {
    if bits.is_empty() || bits.len() % OPCODE_WIDTH != 0 {
        return Err(Undefined::BadDecode);
    }
    let n = bits.len() / OPCODE_WIDTH;
    let mut ops = Vec::with_capacity(n);
    for i in 0..n {
        let code = (0..OPCODE_WIDTH).fold(0u8, |acc, j| {
            acc << 1 | bits.get(i * OPCODE_WIDTH + j).unwrap() as u8
        });
        let op = Opcode::from_code(code);
        let last = i + 1 == n;
        match op {
            Opcode::Invalid => return Err(Undefined::BadDecode),
            Opcode::Halt if !last => return Err(Undefined::BadDecode),
            op if last && op != Opcode::Halt => return Err(Undefined::BadDecode),
            _ => ops.push(op),
        }
    }
    Ok(ops)
}

pub fn encode(ops: &[Opcode]) -> BitString {
    let mut out = BitString::empty();
    for op in ops {
        let code = op.code();
        for j in (0..OPCODE_WIDTH).rev() {
            out.push(code >> j & 1 == 1);
        }
    }
    out
}

/// A bit string known to decode to a valid program.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProgramBits(BitString);

impl ProgramBits {
    pub fn new(bits: BitString) -> Result<Self, Undefined> {
        decode(&bits)?;
        Ok(ProgramBits(bits))
    }

    pub fn from_ops(ops: &[Opcode]) -> Result<Self, Undefined> {
        Self::new(encode(ops))
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ops(&self) -> Vec<Opcode> {
        decode(&self.0).expect("ProgramBits always decodes")
    }

    pub fn into_bits(self) -> BitString {
        self.0
    }
}

impl fmt::Display for ProgramBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Identity of the reference machine, written into every artifact header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineSpec {
    pub machine_id: String,
    pub opcode_width: u32,
    pub step_budget_default: u64,
}

impl Default for MachineSpec {
    fn default() -> Self {
        MachineSpec {
            machine_id: "slp3-v1".to_string(),
            opcode_width: OPCODE_WIDTH as u32,
            step_budget_default: DEFAULT_STEP_BUDGET,
        }
    }
}

impl MachineSpec {
    pub fn header_fields(&self) -> String {
        format!(
            "machine_id={} opcode_width={}",
            self.machine_id, self.opcode_width
        )
    }
}

/// Executes an already-decoded program.
///
/// Every opcode costs `max(1, bits written or removed)` steps.
pub fn execute(ops: &[Opcode], data: &BitString, budget: u64) -> RunOutcome {
    let mut reg = BitString::empty();
    let mut steps: u64 = 0;
    for &op in ops {
        let cost = match op {
            Opcode::CopyData => data.len(),
            Opcode::Dup | Opcode::Flip => reg.len(),
            _ => 1,
        }
        .max(1) as u64;
        steps += cost;
        if steps > budget {
            return RunOutcome::Undefined(Undefined::BudgetExceeded);
        }
        match op {
            Opcode::Append0 => reg.push(false),
            Opcode::Append1 => reg.push(true),
            Opcode::CopyData => reg.extend_from(data),
            Opcode::Dup => reg.double(),
            Opcode::DropLast => {
                if reg.pop().is_none() {
                    return RunOutcome::Undefined(Undefined::RuntimeFault);
                }
            }
            Opcode::Flip => reg.flip(),
            Opcode::Halt => return RunOutcome::Defined(reg),
            Opcode::Invalid => return RunOutcome::Undefined(Undefined::BadDecode),
        }
    }
    // decoded programs always end in HALT
    RunOutcome::Undefined(Undefined::BadDecode)
}

pub fn run(program: &ProgramBits, data: &BitString, budget: u64) -> RunOutcome {
    execute(&program.ops(), data, budget)
}

/// Decodes and runs raw bits; `BadDecode` when they are not a program.
pub fn run_bits(bits: &BitString, data: &BitString, budget: u64) -> RunOutcome {
    match decode(bits) {
        Ok(ops) => execute(&ops, data, budget),
        Err(e) => RunOutcome::Undefined(e),
    }
}

/// Number of valid programs of bit-length at most `max_len_bits`.
pub fn program_count(max_len_bits: usize) -> u64 {
    let k = max_len_bits / OPCODE_WIDTH;
    (0..k as u32).map(|i| 6u64.pow(i)).sum()
}

/// Valid programs of bit-length ≤ `max_len_bits`, shortest first and
/// lexicographic within a length.
pub fn enumerate(max_len_bits: usize) -> impl Iterator<Item = ProgramBits> {
    let max_ops = max_len_bits / OPCODE_WIDTH;
    (1..=max_ops).flat_map(|n| {
        let body = n - 1;
        (0..6u64.pow(body as u32)).map(move |mut counter| {
            let mut ops = vec![Opcode::Halt; n];
            for slot in (0..body).rev() {
                ops[slot] = Opcode::BODY[(counter % 6) as usize];
                counter /= 6;
            }
            ProgramBits(encode(&ops))
        })
    })
}
