//! Exhaustive halting index and exact conditional complexity tables.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::bits::{pair, unpair, BitString, SimpleSet};
use crate::vm::{self, execute, MachineSpec, ProgramBits, RunOutcome};

/// Budgets and identity under which an index or table was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexParams {
    pub machine_id: String,
    pub max_len: usize,
    pub steps: u64,
    pub delta: u32,
}

#[derive(Clone, Debug)]
struct RawRecord {
    program: u32,
    data: u32,
    output: BitString,
}

/// One halting computation U(p, d) = z.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HaltingRecord<'a> {
    pub program: &'a ProgramBits,
    pub data: &'a BitString,
    pub output: &'a BitString,
}

impl HaltingRecord<'_> {
    /// `(r, s)` with `pair(r, s)` equal to the output.
    pub fn halves(&self) -> (BitString, BitString) {
        unpair(self.output)
    }
}

/// Every defined run of every valid program of length ≤ `max_len` on every
/// data string, in (program, data) order.
#[derive(Clone, Debug)]
pub struct HaltingIndex {
    params: IndexParams,
    programs: Vec<ProgramBits>,
    data: Vec<BitString>,
    records: Vec<RawRecord>,
}

impl HaltingIndex {
    pub fn params(&self) -> &IndexParams {
        &self.params
    }

    pub fn programs(&self) -> &[ProgramBits] {
        &self.programs
    }

    pub fn data_set(&self) -> &[BitString] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = HaltingRecord<'_>> + '_ {
        self.records.iter().map(move |r| HaltingRecord {
            program: &self.programs[r.program as usize],
            data: &self.data[r.data as usize],
            output: &r.output,
        })
    }

    /// Rebuilds an index from stored `(program, data, output)` rows, which
    /// must already be in canonical order.
    pub fn from_rows(
        params: IndexParams,
        rows: impl IntoIterator<Item = (ProgramBits, BitString, BitString)>,
    ) -> HaltingIndex {
        let mut programs: Vec<ProgramBits> = Vec::new();
        let mut data_ids: BTreeMap<BitString, u32> = BTreeMap::new();
        let mut data: Vec<BitString> = Vec::new();
        let mut records = Vec::new();
        for (p, d, z) in rows {
            if programs.last() != Some(&p) {
                programs.push(p);
            }
            let did = *data_ids.entry(d.clone()).or_insert_with(|| {
                data.push(d);
                (data.len() - 1) as u32
            });
            records.push(RawRecord {
                program: (programs.len() - 1) as u32,
                data: did,
                output: z,
            });
        }
        HaltingIndex {
            params,
            programs,
            data,
            records,
        }
    }
}

/// Data strings a lab run conditions on: S_δ and every ⟨γ, d⟩ for γ, d ∈ S_δ.
pub fn conditioning_data(simple: &SimpleSet) -> Vec<BitString> {
    let mut set: BTreeSet<BitString> = simple.members().iter().cloned().collect();
    for g in simple.members() {
        for d in simple.members() {
            set.insert(pair(g, d));
        }
    }
    set.into_iter().collect()
}

pub fn build_index(
    machine: &MachineSpec,
    data_set: &[BitString],
    max_len: usize,
    steps: u64,
    delta: u32,
) -> HaltingIndex {
    let data: Vec<BitString> = data_set
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let programs: Vec<ProgramBits> = vm::enumerate(max_len).collect();
    let per_program: Vec<Vec<RawRecord>> = programs
        .par_iter()
        .enumerate()
        .map(|(pi, p)| {
            let ops = p.ops();
            data.iter()
                .enumerate()
                .filter_map(|(di, d)| match execute(&ops, d, steps) {
                    RunOutcome::Defined(output) => Some(RawRecord {
                        program: pi as u32,
                        data: di as u32,
                        output,
                    }),
                    RunOutcome::Undefined(_) => None,
                })
                .collect()
        })
        .collect();
    HaltingIndex {
        params: IndexParams {
            machine_id: machine.machine_id.clone(),
            max_len,
            steps,
            delta,
        },
        programs,
        data,
        records: per_program.into_iter().flatten().collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KEntry {
    pub k: u32,
    pub witness: ProgramBits,
}

/// Exact K_U(x|d) for every (x, d) that occurs in an index, with the
/// shortest-then-lexicographically-least witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityTable {
    params: IndexParams,
    entries: BTreeMap<(BitString, BitString), KEntry>,
}

impl ComplexityTable {
    pub fn from_entries(
        params: IndexParams,
        entries: BTreeMap<(BitString, BitString), KEntry>,
    ) -> Self {
        ComplexityTable { params, entries }
    }

    pub fn params(&self) -> &IndexParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries keyed by `(x, d)` in shortlex order.
    pub fn entries(&self) -> &BTreeMap<(BitString, BitString), KEntry> {
        &self.entries
    }

    pub fn entry(&self, x: &BitString, d: &BitString) -> Option<&KEntry> {
        self.entries.get(&(x.clone(), d.clone()))
    }

    /// K_U(x|d); `None` means infinite within the table's budgets.
    pub fn k(&self, x: &BitString, d: &BitString) -> Option<u32> {
        self.entry(x, d).map(|e| e.k)
    }

    /// K_U(⟨x, y⟩ | d).
    pub fn k_joint(&self, x: &BitString, y: &BitString, d: &BitString) -> Option<u32> {
        self.k(&pair(x, y), d)
    }
}

pub fn build_k_table(index: &HaltingIndex) -> ComplexityTable {
    let mut entries: BTreeMap<(BitString, BitString), KEntry> = BTreeMap::new();
    // records arrive in canonical program order, so the first hit is the witness
    for rec in index.records() {
        entries
            .entry((rec.output.clone(), rec.data.clone()))
            .or_insert_with(|| KEntry {
                k: rec.program.len() as u32,
                witness: rec.program.clone(),
            });
    }
    ComplexityTable {
        params: index.params.clone(),
        entries,
    }
}

/// Δ = K(⟨α,γ⟩|β) − K(α|⟨γ,β⟩) − K(γ|β) for one triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDefect {
    pub alpha: BitString,
    pub gamma: BitString,
    pub beta: BitString,
    pub delta_value: i64,
}

/// `None` when any of the three terms is infinite.
pub fn chain_defect(
    table: &ComplexityTable,
    alpha: &BitString,
    gamma: &BitString,
    beta: &BitString,
) -> Option<ChainDefect> {
    let joint = table.k_joint(alpha, gamma, beta)? as i64;
    let cond = table.k(alpha, &pair(gamma, beta))? as i64;
    let marginal = table.k(gamma, beta)? as i64;
    Some(ChainDefect {
        alpha: alpha.clone(),
        gamma: gamma.clone(),
        beta: beta.clone(),
        delta_value: joint - cond - marginal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{bs, build_simple_set};

    fn machine() -> MachineSpec {
        MachineSpec::default()
    }

    #[test]
    fn index_examples() {
        let idx = build_index(&machine(), &[BitString::empty()], 3, 10_000, 1);
        let recs: Vec<_> = idx.records().collect();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].program.to_string(), "111");
        assert!(recs[0].output.is_empty());
        assert_eq!(recs[0].halves(), (BitString::empty(), BitString::empty()));

        let idx = build_index(&machine(), &[bs("11")], 6, 10_000, 8);
        let progs: Vec<String> = idx.records().map(|r| r.program.to_string()).collect();
        assert_eq!(progs.len(), 6);
        assert!(!progs.contains(&"100111".to_string()));
    }

    #[test]
    fn k_table_examples() {
        let data = vec![BitString::empty(), bs("11"), bs("0")];
        let idx = build_index(&machine(), &data, 12, 10_000, 8);
        let t = build_k_table(&idx);
        for d in &data {
            let e = t.entry(&BitString::empty(), d).unwrap();
            assert_eq!((e.k, e.witness.to_string().as_str()), (3, "111"));
        }
        let e = t.entry(&bs("11"), &bs("11")).unwrap();
        assert_eq!((e.k, e.witness.to_string().as_str()), (6, "010111"));
        // APPEND0 DUP HALT only reaches "00"; "0000" needs a fourth opcode
        assert_eq!(
            vm::run(&ProgramBits::new(bs("000011111")).unwrap(), &BitString::empty(), 100),
            RunOutcome::Defined(bs("00"))
        );
        let e = t.entry(&bs("0000"), &BitString::empty()).unwrap();
        assert_eq!((e.k, e.witness.to_string().as_str()), (12, "000000011111"));
        let brute = vm::enumerate(12)
            .find(|p| vm::run(p, &BitString::empty(), 100).output() == Some(&bs("0000")))
            .unwrap();
        assert_eq!(brute, e.witness);
        assert_eq!(t.k(&bs("11"), &bs("11")), Some(6));
        let fifty: BitString = (0..50).map(|i| i % 7 == 0).collect();
        assert_eq!(t.k(&fifty, &BitString::empty()), None);
        assert_eq!(t.k_joint(&BitString::empty(), &BitString::empty(), &bs("0")), Some(3));
        assert_eq!(t.k_joint(&bs("0"), &bs("1"), &BitString::empty()), t.k(&bs("001"), &BitString::empty()));
    }

    #[test]
    fn chain_defect_of_empty_triple() {
        let s = build_simple_set(1);
        let idx = build_index(&machine(), &conditioning_data(&s), 21, 10_000, 1);
        let t = build_k_table(&idx);
        let e = BitString::empty();
        assert_eq!(chain_defect(&t, &e, &e, &e).unwrap().delta_value, -3);
        // a data string missing from the index makes every term infinite
        assert_eq!(chain_defect(&t, &e, &e, &bs("0101")), None);
    }

    #[test]
    fn conditioning_data_contains_pairs() {
        let s = build_simple_set(8);
        let data = conditioning_data(&s);
        for g in s.members() {
            for d in s.members() {
                assert!(data.contains(&pair(g, d)));
                assert!(data.contains(d));
            }
        }
        assert!(data.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn from_rows_roundtrip() {
        let idx = build_index(&machine(), &[bs("1"), bs("01")], 9, 10_000, 8);
        let rows: Vec<_> = idx
            .records()
            .map(|r| (r.program.clone(), r.data.clone(), r.output.clone()))
            .collect();
        let back = HaltingIndex::from_rows(idx.params().clone(), rows.clone());
        let again: Vec<_> = back
            .records()
            .map(|r| (r.program.clone(), r.data.clone(), r.output.clone()))
            .collect();
        assert_eq!(rows, again);
        assert_eq!(build_k_table(&back), build_k_table(&idx));
    }
}
