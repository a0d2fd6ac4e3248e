//! Requirement lists, the uniform constant κ, and the restricted computers
//! W_s together with the dispatcher W.
//!
//! For an inner string s ≠ Λ and data d ∈ S_δ, every halting run
//! U(p_k, d) = ⟨r_k, s⟩ with r_k ∈ S_δ requests one codeword of length
//! |p_k| − K_U(s|d) + κ for result r_k. Codewords are assigned canonically,
//! so the i-th codeword of a list stands for the i-th source program.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bits::{unpair, BitString, SimpleSet};
use crate::kengine::{ComplexityTable, HaltingIndex};
use crate::kraft::{assign_codewords, CodeError, KraftSum};
use crate::vm::{run_bits, ProgramBits, RunOutcome, Undefined};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChaitinError {
    #[error("K_U({s}|{d}) is infinite within the build budgets")]
    InfiniteComplexity { s: BitString, d: BitString },
    #[error("{0} is not a member of the simple set")]
    NotSimple(BitString),
    #[error("inner string must not be empty")]
    EmptyInner,
    #[error("kappa {kappa} is below the minimum {required} for ({s}, {d})")]
    KappaTooSmall {
        s: BitString,
        d: BitString,
        kappa: u32,
        required: u32,
    },
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Requirement {
    pub result: BitString,
    pub length: usize,
    pub source_program: ProgramBits,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequirementList {
    pub s: BitString,
    pub d: BitString,
    pub kappa: u32,
    pub items: Vec<Requirement>,
}

impl RequirementList {
    pub fn lengths(&self) -> Vec<usize> {
        self.items.iter().map(|r| r.length).collect()
    }

    pub fn kraft_sum(&self) -> KraftSum {
        KraftSum::of(self.items.iter().map(|r| r.length))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaBudget {
    pub kappa: u32,
    pub per_pair: BTreeMap<(BitString, BitString), u32>,
}

/// A source program p_k together with the result half r_k of its output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qualifying {
    pub program: ProgramBits,
    pub result: BitString,
}

/// Index records that feed requirement lists, grouped by (s, d): data in
/// S_δ, output ⟨r, s⟩ with r ∈ S_δ and s ∈ S_δ \ {Λ}. Program order is
/// preserved within each group.
#[derive(Clone, Debug)]
pub struct QualifyingRecords {
    simple: SimpleSet,
    groups: BTreeMap<(BitString, BitString), Vec<Qualifying>>,
}

impl QualifyingRecords {
    pub fn collect(index: &HaltingIndex, simple: &SimpleSet) -> Self {
        let mut groups: BTreeMap<(BitString, BitString), Vec<Qualifying>> = BTreeMap::new();
        let bound = simple.max_pair_len();
        for rec in index.records() {
            // ⟨r, s⟩ of two members is never longer than the longest member pair
            if simple.is_empty() || rec.output.len() > bound || !simple.contains(rec.data) {
                continue;
            }
            let (r, s) = rec.halves();
            if s.is_empty() || !simple.contains(&s) || !simple.contains(&r) {
                continue;
            }
            groups
                .entry((s, rec.data.clone()))
                .or_default()
                .push(Qualifying {
                    program: rec.program.clone(),
                    result: r,
                });
        }
        QualifyingRecords {
            simple: simple.clone(),
            groups,
        }
    }

    pub fn simple(&self) -> &SimpleSet {
        &self.simple
    }

    pub fn get(&self, s: &BitString, d: &BitString) -> &[Qualifying] {
        self.groups
            .get(&(s.clone(), d.clone()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    fn inner_k(&self, ktable: &ComplexityTable, s: &BitString, d: &BitString) -> Result<u32, ChaitinError> {
        ktable.k(s, d).ok_or_else(|| ChaitinError::InfiniteComplexity {
            s: s.clone(),
            d: d.clone(),
        })
    }

    /// Least natural κ' making every length ≥ 1 and the Kraft sum ≤ 1.
    pub fn minimal_kappa_for(
        &self,
        ktable: &ComplexityTable,
        s: &BitString,
        d: &BitString,
    ) -> Result<u32, ChaitinError> {
        let k_inner = self.inner_k(ktable, s, d)? as i64;
        let recs = self.get(s, d);
        let Some(shortest) = recs.iter().map(|q| q.program.len()).min() else {
            return Ok(1);
        };
        let mut kappa = (1 + k_inner - shortest as i64).max(0);
        let lengths_at = |kappa: i64| {
            recs.iter()
                .map(move |q| (q.program.len() as i64 - k_inner + kappa) as usize)
        };
        while !KraftSum::of(lengths_at(kappa)).is_feasible() {
            kappa += 1;
        }
        Ok(kappa as u32)
    }

    pub fn minimal_kappa(&self, ktable: &ComplexityTable) -> Result<KappaBudget, ChaitinError> {
        let mut per_pair = BTreeMap::new();
        for s in self.simple.non_empty_members() {
            for d in self.simple.members() {
                per_pair.insert((s.clone(), d.clone()), self.minimal_kappa_for(ktable, s, d)?);
            }
        }
        let kappa = per_pair.values().copied().max().unwrap_or(1);
        Ok(KappaBudget { kappa, per_pair })
    }

    pub fn requirements(
        &self,
        ktable: &ComplexityTable,
        s: &BitString,
        d: &BitString,
        kappa: u32,
    ) -> Result<RequirementList, ChaitinError> {
        if s.is_empty() {
            return Err(ChaitinError::EmptyInner);
        }
        for x in [s, d] {
            if !self.simple.contains(x) {
                return Err(ChaitinError::NotSimple(x.clone()));
            }
        }
        let k_inner = self.inner_k(ktable, s, d)? as i64;
        let mut items = Vec::new();
        for q in self.get(s, d) {
            let length = q.program.len() as i64 - k_inner + kappa as i64;
            if length < 1 {
                return Err(self.too_small(ktable, s, d, kappa));
            }
            items.push(Requirement {
                result: q.result.clone(),
                length: length as usize,
                source_program: q.program.clone(),
            });
        }
        let list = RequirementList {
            s: s.clone(),
            d: d.clone(),
            kappa,
            items,
        };
        if !list.kraft_sum().is_feasible() {
            return Err(self.too_small(ktable, s, d, kappa));
        }
        Ok(list)
    }

    fn too_small(&self, ktable: &ComplexityTable, s: &BitString, d: &BitString, kappa: u32) -> ChaitinError {
        match self.minimal_kappa_for(ktable, s, d) {
            Ok(required) => ChaitinError::KappaTooSmall {
                s: s.clone(),
                d: d.clone(),
                kappa,
                required,
            },
            Err(e) => e,
        }
    }

    pub fn build_ws(
        &self,
        ktable: &ComplexityTable,
        s: &BitString,
        kappa: u32,
    ) -> Result<RestrictedComputerTable, ChaitinError> {
        let mut table = RestrictedComputerTable::new(s.clone());
        for d in self.simple.members() {
            let list = self.requirements(ktable, s, d, kappa)?;
            let codes = assign_codewords(&list.lengths())?;
            for (code, req) in codes.into_iter().zip(list.items) {
                table.insert(
                    d.clone(),
                    code,
                    WRow {
                        result: req.result,
                        source_program: req.source_program,
                    },
                );
            }
        }
        Ok(table)
    }

    pub fn build_w(
        &self,
        ktable: Arc<ComplexityTable>,
        kappa: u32,
    ) -> Result<WComputer, ChaitinError> {
        let mut family = BTreeMap::new();
        for s in self.simple.non_empty_members() {
            family.insert(s.clone(), self.build_ws(&ktable, s, kappa)?);
        }
        Ok(WComputer::new(self.simple.clone(), family, ktable, kappa))
    }
}

pub fn minimal_kappa(
    index: &HaltingIndex,
    ktable: &ComplexityTable,
    simple: &SimpleSet,
) -> Result<KappaBudget, ChaitinError> {
    QualifyingRecords::collect(index, simple).minimal_kappa(ktable)
}

pub fn build_requirements(
    index: &HaltingIndex,
    ktable: &ComplexityTable,
    simple: &SimpleSet,
    s: &BitString,
    d: &BitString,
    kappa: u32,
) -> Result<RequirementList, ChaitinError> {
    QualifyingRecords::collect(index, simple).requirements(ktable, s, d, kappa)
}

pub fn build_ws(
    index: &HaltingIndex,
    ktable: &ComplexityTable,
    s: &BitString,
    simple: &SimpleSet,
    kappa: u32,
) -> Result<RestrictedComputerTable, ChaitinError> {
    QualifyingRecords::collect(index, simple).build_ws(ktable, s, kappa)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WRow {
    pub result: BitString,
    pub source_program: ProgramBits,
}

/// The finite extension of one W_s: (codeword, data) → result, with the
/// source program each codeword was derived from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedComputerTable {
    s: BitString,
    rows: BTreeMap<BitString, BTreeMap<BitString, WRow>>,
}

impl RestrictedComputerTable {
    pub fn new(s: BitString) -> Self {
        RestrictedComputerTable {
            s,
            rows: BTreeMap::new(),
        }
    }

    pub fn s(&self) -> &BitString {
        &self.s
    }

    /// Returns the previous row when the codeword was already present.
    pub fn insert(&mut self, d: BitString, codeword: BitString, row: WRow) -> Option<WRow> {
        self.rows.entry(d).or_default().insert(codeword, row)
    }

    pub fn lookup(&self, codeword: &BitString, d: &BitString) -> Option<&WRow> {
        self.rows.get(d)?.get(codeword)
    }

    /// Rows for one data string, keyed by codeword.
    pub fn rows_for(&self, d: &BitString) -> Option<&BTreeMap<BitString, WRow>> {
        self.rows.get(d)
    }

    /// All rows as (d, codeword, row) in canonical order.
    pub fn rows(&self) -> impl Iterator<Item = (&BitString, &BitString, &WRow)> {
        self.rows
            .iter()
            .flat_map(|(d, m)| m.iter().map(move |(c, r)| (d, c, r)))
    }

    pub fn len(&self) -> usize {
        self.rows.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Shortest codeword producing `result` on `d`.
    pub fn shortest(&self, result: &BitString, d: &BitString) -> Option<&BitString> {
        self.rows
            .get(d)?
            .iter()
            .filter(|(_, row)| &row.result == result)
            .map(|(c, _)| c)
            .min_by_key(|c| c.len())
    }
}

/// The dispatcher W(p, ⟨s, d⟩) = W_s(p, d), with W_Λ = U.
#[derive(Clone, Debug)]
pub struct WComputer {
    simple: SimpleSet,
    family: BTreeMap<BitString, RestrictedComputerTable>,
    base: Arc<ComplexityTable>,
    kappa: u32,
}

impl WComputer {
    pub fn new(
        simple: SimpleSet,
        family: BTreeMap<BitString, RestrictedComputerTable>,
        base: Arc<ComplexityTable>,
        kappa: u32,
    ) -> Self {
        WComputer {
            simple,
            family,
            base,
            kappa,
        }
    }

    pub fn simple(&self) -> &SimpleSet {
        &self.simple
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// U's complexity table, standing in for W_Λ.
    pub fn base(&self) -> &ComplexityTable {
        &self.base
    }

    pub fn family(&self) -> &BTreeMap<BitString, RestrictedComputerTable> {
        &self.family
    }

    pub fn computer(&self, s: &BitString) -> Option<&RestrictedComputerTable> {
        self.family.get(s)
    }

    pub fn eval(&self, program: &BitString, data: &BitString, steps: u64) -> RunOutcome {
        let (s, d) = unpair(data);
        if s.is_empty() {
            return run_bits(program, &d, steps);
        }
        let Some(ws) = self.family.get(&s).filter(|_| self.simple.contains(&s)) else {
            return RunOutcome::Undefined(Undefined::UnknownComputer);
        };
        match ws.lookup(program, &d) {
            Some(row) => RunOutcome::Defined(row.result.clone()),
            None => RunOutcome::Undefined(Undefined::NoSuchProgram),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{bs, build_simple_set, pair};
    use crate::kengine::{build_index, build_k_table, IndexParams, KEntry};
    use crate::vm::MachineSpec;

    fn params() -> IndexParams {
        IndexParams {
            machine_id: "slp3-v1".into(),
            max_len: 21,
            steps: 10_000,
            delta: 8,
        }
    }

    fn prog(s: &str) -> ProgramBits {
        ProgramBits::new(bs(s)).unwrap()
    }

    /// A hand-made table where K_U(s|d) = k_inner for s = "0", d = Λ.
    fn table_with(k_inner: u32) -> ComplexityTable {
        let mut entries = BTreeMap::new();
        entries.insert(
            (bs("0"), BitString::empty()),
            KEntry {
                k: k_inner,
                witness: prog("000111"),
            },
        );
        ComplexityTable::from_entries(params(), entries)
    }

    fn records(programs: &[&str], r: &BitString) -> QualifyingRecords {
        let s = bs("0");
        let mut groups = BTreeMap::new();
        groups.insert(
            (s, BitString::empty()),
            programs
                .iter()
                .map(|p| Qualifying {
                    program: prog(p),
                    result: r.clone(),
                })
                .collect(),
        );
        QualifyingRecords {
            simple: build_simple_set(8),
            groups,
        }
    }

    #[test]
    fn single_record_at_k_needs_kappa_one() {
        let q = records(&["000111"], &BitString::empty());
        let t = table_with(6);
        assert_eq!(q.minimal_kappa_for(&t, &bs("0"), &BitString::empty()), Ok(1));
    }

    #[test]
    fn two_records_fill_kraft_exactly() {
        let q = records(&["000111", "001111"], &BitString::empty());
        let t = table_with(6);
        assert_eq!(q.minimal_kappa_for(&t, &bs("0"), &BitString::empty()), Ok(1));
        let list = q.requirements(&t, &bs("0"), &BitString::empty(), 1).unwrap();
        assert_eq!(list.lengths(), vec![1, 1]);
        assert!(list.kraft_sum().is_exactly_one());
        // three such records no longer fit at κ = 1
        let q3 = records(&["000111", "001111", "010111"], &BitString::empty());
        assert_eq!(q3.minimal_kappa_for(&t, &bs("0"), &BitString::empty()), Ok(2));
        assert!(matches!(
            q3.requirements(&t, &bs("0"), &BitString::empty(), 1),
            Err(ChaitinError::KappaTooSmall { required: 2, .. })
        ));
    }

    #[test]
    fn empty_group_contributes_one() {
        let q = records(&[], &BitString::empty());
        let t = table_with(6);
        assert_eq!(q.minimal_kappa_for(&t, &bs("0"), &BitString::empty()), Ok(1));
        assert!(q
            .requirements(&t, &bs("0"), &BitString::empty(), 3)
            .unwrap()
            .items
            .is_empty());
    }

    #[test]
    fn requirement_length_arithmetic() {
        // |p_k| = K + 2 gives length 2 + κ
        let q = records(&["000000111"], &bs("1"));
        let t = table_with(7);
        let list = q.requirements(&t, &bs("0"), &BitString::empty(), 4).unwrap();
        assert_eq!(list.lengths(), vec![6]);
        assert_eq!(list.items[0].result, bs("1"));
    }

    #[test]
    fn missing_inner_complexity_is_an_error() {
        let q = records(&["000111"], &BitString::empty());
        let t = ComplexityTable::from_entries(params(), BTreeMap::new());
        assert_eq!(
            q.minimal_kappa_for(&t, &bs("0"), &BitString::empty()),
            Err(ChaitinError::InfiniteComplexity {
                s: bs("0"),
                d: BitString::empty()
            })
        );
    }

    #[test]
    fn small_family_end_to_end() {
        // δ = 5: S = {Λ, 0, 1}
        let simple = build_simple_set(5);
        assert_eq!(simple.len(), 3);
        let data = crate::kengine::conditioning_data(&simple);
        let idx = build_index(&MachineSpec::default(), &data, 12, 10_000, 5);
        let kt = Arc::new(build_k_table(&idx));
        let budget = minimal_kappa(&idx, &kt, &simple).unwrap();
        assert_eq!(budget.per_pair.len(), 2 * 3);
        assert_eq!(budget.kappa, *budget.per_pair.values().max().unwrap());
        let q = QualifyingRecords::collect(&idx, &simple);
        let w = q.build_w(kt.clone(), budget.kappa).unwrap();
        for (s, ws) in w.family() {
            for (d, code, row) in ws.rows() {
                let k_inner = kt.k(s, d).unwrap() as usize;
                assert_eq!(code.len() + k_inner, row.source_program.len() + budget.kappa as usize);
                assert_eq!(
                    w.eval(code, &pair(s, d), 10_000),
                    RunOutcome::Defined(row.result.clone())
                );
            }
        }
        // W_Λ = U
        let p = prog("001111");
        for d in simple.members() {
            assert_eq!(
                w.eval(p.bits(), &pair(&BitString::empty(), d), 10_000),
                crate::vm::run(&p, d, 10_000)
            );
        }
        // an inner string outside S_δ names no computer
        assert_eq!(
            w.eval(&bs("0"), &pair(&bs("010"), &BitString::empty()), 10_000),
            RunOutcome::Undefined(Undefined::UnknownComputer)
        );
        assert_eq!(
            w.eval(&bs("1111111111111111111"), &pair(&bs("0"), &BitString::empty()), 10_000),
            RunOutcome::Undefined(Undefined::NoSuchProgram)
        );
        assert!(matches!(
            build_requirements(&idx, &kt, &simple, &BitString::empty(), &BitString::empty(), 5),
            Err(ChaitinError::EmptyInner)
        ));
        assert!(matches!(
            build_requirements(&idx, &kt, &simple, &bs("00"), &BitString::empty(), 5),
            Err(ChaitinError::NotSimple(_))
        ));
    }
}
