//! Lab configuration and the build → κ → construct → verify pipeline, both
//! in memory ([`Lab`]) and through the artifact files in an output
//! directory (the `step_*` functions).

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::artifacts::{self as art, ArtifactError, Header};
use crate::bits::{build_simple_set, BitString, SimpleSet};
use crate::chaitin::{ChaitinError, KappaBudget, QualifyingRecords, WComputer};
use crate::kengine::{build_index, build_k_table, conditioning_data, ComplexityTable, HaltingIndex, IndexParams, KEntry};
use crate::kraft::{is_prefix_free, KraftSum};
use crate::theorem::{defect_survey, k_w, verify_theorem, DefectSurvey, TheoremError, TheoremReport};
use crate::vm::{self, MachineSpec, DEFAULT_STEP_BUDGET};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabConfig {
    pub delta: u32,
    pub max_len: usize,
    pub steps: u64,
    pub out_dir: PathBuf,
    pub machine: MachineSpec,
    /// Permit `max_len` below the finiteness guarantee.
    pub allow_partial: bool,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig {
            delta: 8,
            max_len: 21,
            steps: DEFAULT_STEP_BUDGET,
            out_dir: PathBuf::from("lab-out"),
            machine: MachineSpec::default(),
            allow_partial: false,
        }
    }
}

impl LabConfig {
    /// Config for `delta` with the smallest guarantee-satisfying `max_len`.
    pub fn with_delta(delta: u32) -> Self {
        LabConfig {
            delta,
            max_len: required_max_len(&build_simple_set(delta)),
            ..Default::default()
        }
    }

    pub fn simple_set(&self) -> SimpleSet {
        build_simple_set(self.delta)
    }

    pub fn index_params(&self) -> IndexParams {
        IndexParams {
            machine_id: self.machine.machine_id.clone(),
            max_len: self.max_len,
            steps: self.steps,
            delta: self.delta,
        }
    }

    pub fn header(&self) -> Header {
        Header::for_build(&self.machine, &self.index_params())
    }

    pub fn validate(&self) -> Result<SimpleSet, LabError> {
        if self.delta == 0 {
            return Err(LabError::Config("--delta must be at least 1".into()));
        }
        if self.max_len < vm::OPCODE_WIDTH {
            return Err(LabError::Config("--max-len must be at least 3".into()));
        }
        let simple = self.simple_set();
        let required = required_max_len(&simple);
        if self.max_len < required && !self.allow_partial {
            return Err(LabError::Budget(format!(
                "L_max={} is below the finiteness guarantee {required} for delta={}; \
                 pass --allow-partial to build anyway",
                self.max_len, self.delta
            )));
        }
        Ok(simple)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

/// Smallest L_max for which every theorem term is guaranteed finite: the
/// literal program for the longest member pair.
pub fn required_max_len(simple: &SimpleSet) -> usize {
    3 * simple.max_pair_len() + 3
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("budget too small: {0}")]
    Budget(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Artifact(#[from] ArtifactError),
}

impl LabError {
    /// Process exit code: 1 verification, 2 usage/config/IO, 3 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Verification(_) | LabError::Internal(_) => 1,
            LabError::Config(_) | LabError::Artifact(_) => 2,
            LabError::Budget(_) => 3,
        }
    }
}

impl From<ChaitinError> for LabError {
    fn from(e: ChaitinError) -> Self {
        match e {
            ChaitinError::InfiniteComplexity { .. } => LabError::Budget(e.to_string()),
            other => LabError::Internal(other.to_string()),
        }
    }
}

impl From<TheoremError> for LabError {
    fn from(e: TheoremError) -> Self {
        LabError::Budget(e.to_string())
    }
}

/// A fully built lab held in memory.
#[derive(Clone, Debug)]
pub struct Lab {
    pub config: LabConfig,
    pub simple: SimpleSet,
    pub index: HaltingIndex,
    pub ktable: Arc<ComplexityTable>,
    pub kappa: KappaBudget,
    pub w: WComputer,
}

impl Lab {
    pub fn build(config: &LabConfig) -> Result<Lab, LabError> {
        let simple = config.validate()?;
        let index = build_index(
            &config.machine,
            &conditioning_data(&simple),
            config.max_len,
            config.steps,
            config.delta,
        );
        let ktable = Arc::new(build_k_table(&index));
        let q = QualifyingRecords::collect(&index, &simple);
        let kappa = q.minimal_kappa(&ktable)?;
        let w = q.build_w(ktable.clone(), kappa.kappa)?;
        Ok(Lab {
            config: config.clone(),
            simple,
            index,
            ktable,
            kappa,
            w,
        })
    }

    pub fn w_base(&self) -> Arc<ComplexityTable> {
        self.ktable.clone()
    }

    pub fn verify(&self) -> Result<TheoremReport, TheoremError> {
        verify_theorem(&self.w, &self.ktable, &self.simple, self.kappa.kappa)
    }

    pub fn survey(&self) -> DefectSurvey {
        defect_survey(&self.ktable, &self.simple)
    }
}

/// Checks every per-(s, d) code of W: prefix-free and Kraft sum ≤ 1.
pub fn check_codes(w: &WComputer) -> Result<(), String> {
    for (s, ws) in w.family() {
        for d in w.simple().members() {
            let codes: Vec<BitString> = ws
                .rows_for(d)
                .map(|m| m.keys().cloned().collect())
                .unwrap_or_default();
            if !is_prefix_free(&codes) {
                return Err(format!("codewords of W_{s} on d={d} are not prefix-free"));
            }
            if !KraftSum::of(codes.iter().map(BitString::len)).is_feasible() {
                return Err(format!("codewords of W_{s} on d={d} violate Kraft"));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildSummary {
    pub programs: usize,
    pub data: usize,
    pub records: usize,
    pub entries: usize,
}

impl std::fmt::Display for BuildSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "programs={} data={} records={} entries={}",
            self.programs, self.data, self.records, self.entries
        )
    }
}

fn ensure_out_dir(dir: &Path) -> Result<(), LabError> {
    std::fs::create_dir_all(dir).map_err(|source| {
        LabError::Artifact(ArtifactError::Io {
            path: dir.to_path_buf(),
            source,
        })
    })
}

/// Writes `index.tsv` and `ktable.tsv`.
pub fn step_build(config: &LabConfig) -> Result<BuildSummary, LabError> {
    let simple = config.validate()?;
    ensure_out_dir(&config.out_dir)?;
    let index = build_index(
        &config.machine,
        &conditioning_data(&simple),
        config.max_len,
        config.steps,
        config.delta,
    );
    let ktable = build_k_table(&index);
    let header = config.header();
    art::write_index(&config.path(art::INDEX_FILE), &header, &index)?;
    art::write_ktable(&config.path(art::KTABLE_FILE), &header, &ktable)?;
    Ok(BuildSummary {
        programs: index.programs().len(),
        data: index.data_set().len(),
        records: index.len(),
        entries: ktable.len(),
    })
}

fn load_qualifying(config: &LabConfig, simple: &SimpleSet) -> Result<(ComplexityTable, QualifyingRecords), LabError> {
    let header = config.header();
    let ktable = art::read_ktable(&config.path(art::KTABLE_FILE), &header)?;
    let index = art::read_index_filtered(
        &config.path(art::INDEX_FILE),
        &header,
        simple,
        simple.max_pair_len(),
    )?;
    Ok((ktable, QualifyingRecords::collect(&index, simple)))
}

/// Writes `kappa.tsv`.
pub fn step_kappa(config: &LabConfig) -> Result<KappaBudget, LabError> {
    let simple = config.validate()?;
    let (ktable, q) = load_qualifying(config, &simple)?;
    let budget = q.minimal_kappa(&ktable)?;
    art::write_kappa(&config.path(art::KAPPA_FILE), &config.header(), &budget)?;
    Ok(budget)
}

/// Writes `wtable.tsv`; returns the number of rows.
pub fn step_construct(config: &LabConfig) -> Result<(u32, usize), LabError> {
    let simple = config.validate()?;
    let budget = art::read_kappa(&config.path(art::KAPPA_FILE), &config.header())?;
    let (ktable, q) = load_qualifying(config, &simple)?;
    let w = q.build_w(Arc::new(ktable), budget.kappa)?;
    check_codes(&w).map_err(LabError::Internal)?;
    art::write_wtable(&config.path(art::WTABLE_FILE), &config.header(), &w)?;
    Ok((budget.kappa, w.family().values().map(|t| t.len()).sum()))
}

fn load_w(config: &LabConfig, simple: &SimpleSet) -> Result<(WComputer, u32), LabError> {
    let header = config.header();
    let ktable = Arc::new(art::read_ktable(&config.path(art::KTABLE_FILE), &header)?);
    let budget = art::read_kappa(&config.path(art::KAPPA_FILE), &header)?;
    let family = art::read_wtable(
        &config.path(art::WTABLE_FILE),
        &header.clone().with("kappa", budget.kappa),
    )?;
    if let Some(s) = family.keys().find(|s| s.is_empty() || !simple.contains(s)) {
        return Err(LabError::Verification(format!("wtable names a computer outside S_delta: {s}")));
    }
    Ok((WComputer::new(simple.clone(), family, ktable, budget.kappa), budget.kappa))
}

/// Writes `theorem.tsv`. A report with nonzero residuals is returned, not
/// turned into an error; callers decide the exit status from `all_exact`.
pub fn step_verify(config: &LabConfig) -> Result<TheoremReport, LabError> {
    let simple = config.validate()?;
    let (w, kappa) = load_w(config, &simple)?;
    let report = verify_theorem(&w, w.base(), &simple, kappa)?;
    art::write_theorem(&config.path(art::THEOREM_FILE), &config.header(), &report)?;
    Ok(report)
}

/// Writes `delta_survey.tsv`.
pub fn step_delta_report(config: &LabConfig) -> Result<DefectSurvey, LabError> {
    let simple = config.validate()?;
    let ktable = art::read_ktable(&config.path(art::KTABLE_FILE), &config.header())?;
    let survey = defect_survey(&ktable, &simple);
    art::write_survey(&config.path(art::SURVEY_FILE), &config.header(), &survey)?;
    Ok(survey)
}

/// K_U(x|d) and its witness from the stored table.
pub fn query_ku(config: &LabConfig, x: &BitString, d: &BitString) -> Result<Option<KEntry>, LabError> {
    config.validate()?;
    let ktable = art::read_ktable(&config.path(art::KTABLE_FILE), &config.header())?;
    Ok(ktable.entry(x, d).cloned())
}

/// K_W(α | ⟨γ, d⟩) with a shortest program: a codeword of W_γ, or U's
/// witness when γ = Λ.
pub fn query_kw(
    config: &LabConfig,
    alpha: &BitString,
    gamma: &BitString,
    d: &BitString,
) -> Result<Option<(u32, BitString)>, LabError> {
    let simple = config.validate()?;
    let (w, _) = load_w(config, &simple)?;
    if gamma.is_empty() {
        return Ok(w.base().entry(alpha, d).map(|e| (e.k, e.witness.bits().clone())));
    }
    let Some(k) = k_w(&w, alpha, gamma, d) else {
        return Ok(None);
    };
    let code = w
        .computer(gamma)
        .and_then(|t| t.shortest(alpha, d))
        .cloned()
        .ok_or_else(|| LabError::Internal("k_W finite without a codeword".into()))?;
    Ok(Some((k, code)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guarantee_values() {
        assert_eq!(required_max_len(&build_simple_set(8)), 21);
        assert_eq!(required_max_len(&build_simple_set(1)), 3);
        assert_eq!(LabConfig::with_delta(10).max_len, 27);
    }

    #[test]
    fn config_validation() {
        let bad = LabConfig {
            max_len: 15,
            ..Default::default()
        };
        assert_eq!(bad.validate().unwrap_err().exit_code(), 3);
        let ok = LabConfig {
            allow_partial: true,
            ..bad
        };
        assert!(ok.validate().is_ok());
        let zero = LabConfig {
            delta: 0,
            ..Default::default()
        };
        assert_eq!(zero.validate().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn file_pipeline_matches_memory_pipeline() {
        let dir = tempfile::tempdir().unwrap();
        let config = LabConfig {
            out_dir: dir.path().to_path_buf(),
            ..LabConfig::with_delta(5)
        };
        let lab = Lab::build(&config).unwrap();
        let summary = step_build(&config).unwrap();
        assert_eq!(summary.records, lab.index.len());
        let budget = step_kappa(&config).unwrap();
        assert_eq!(budget, lab.kappa);
        let (kappa, rows) = step_construct(&config).unwrap();
        assert_eq!(kappa, lab.kappa.kappa);
        assert_eq!(rows, lab.w.family().values().map(|t| t.len()).sum::<usize>());
        let report = step_verify(&config).unwrap();
        assert_eq!(report, lab.verify().unwrap());
        assert!(report.all_exact);
        let survey = step_delta_report(&config).unwrap();
        assert_eq!(survey, lab.survey());
        let e = BitString::empty();
        assert_eq!(query_ku(&config, &e, &e).unwrap().unwrap().k, 3);
        let g = crate::bits::bs("1");
        let (k, _) = query_kw(&config, &e, &g, &e).unwrap().unwrap();
        assert_eq!(Some(k), k_w(&lab.w, &e, &g, &e));
    }

    #[test]
    fn mismatched_artifacts_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let config = LabConfig {
            out_dir: dir.path().to_path_buf(),
            ..LabConfig::with_delta(5)
        };
        step_build(&config).unwrap();
        let other = LabConfig {
            steps: 9_999,
            ..config.clone()
        };
        let err = step_kappa(&other).unwrap_err();
        assert!(matches!(err, LabError::Artifact(ArtifactError::HeaderMismatch { .. })), "{err}");
        // kappa before build in an empty directory
        let empty = tempfile::tempdir().unwrap();
        let fresh = LabConfig {
            out_dir: empty.path().to_path_buf(),
            ..config
        };
        assert!(matches!(
            step_kappa(&fresh).unwrap_err(),
            LabError::Artifact(ArtifactError::Missing(_))
        ));
    }
}
