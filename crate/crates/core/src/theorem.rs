//! Complexity relative to W, the exact chain identity it satisfies, and the
//! chain-rule defect of U for contrast.

use std::collections::BTreeMap;

use crate::bits::{pair, BitString, SimpleSet};
use crate::chaitin::WComputer;
use crate::kengine::{chain_defect, ChainDefect, ComplexityTable};

/// K_W(α | ⟨s, d⟩). For s = Λ this is K_U(α|d); `None` means no program.
pub fn k_w(w: &WComputer, alpha: &BitString, s: &BitString, d: &BitString) -> Option<u32> {
    if s.is_empty() {
        return w.base().k(alpha, d);
    }
    w.computer(s)?.shortest(alpha, d).map(|c| c.len() as u32)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportParams {
    pub machine_id: String,
    pub delta: u32,
    pub max_len: usize,
    pub steps: u64,
    pub kappa: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremRow {
    pub alpha: BitString,
    pub gamma: BitString,
    pub d: BitString,
    /// K_W(α | ⟨γ, d⟩)
    pub lhs: i64,
    /// K_W(⟨α,γ⟩ | ⟨Λ, d⟩) − K_W(γ | ⟨Λ, d⟩) + κ
    pub rhs: i64,
    pub residual: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremReport {
    pub params: ReportParams,
    pub rows: Vec<TheoremRow>,
    pub all_exact: bool,
}

impl TheoremReport {
    pub fn first_failure(&self) -> Option<&TheoremRow> {
        self.rows.iter().find(|r| r.residual != 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoremError {
    #[error("a term for (alpha={alpha}, gamma={gamma}, d={d}) is infinite; raise L_max or T")]
    BudgetTooSmall {
        alpha: BitString,
        gamma: BitString,
        d: BitString,
    },
}

pub fn verify_theorem(
    w: &WComputer,
    ktable: &ComplexityTable,
    simple: &SimpleSet,
    kappa: u32,
) -> Result<TheoremReport, TheoremError> {
    let lambda = BitString::empty();
    let mut rows = Vec::new();
    for alpha in simple.members() {
        for gamma in simple.non_empty_members() {
            for d in simple.members() {
                let too_small = || TheoremError::BudgetTooSmall {
                    alpha: alpha.clone(),
                    gamma: gamma.clone(),
                    d: d.clone(),
                };
                let lhs = k_w(w, alpha, gamma, d).ok_or_else(too_small)? as i64;
                let joint = k_w(w, &pair(alpha, gamma), &lambda, d).ok_or_else(too_small)? as i64;
                let marginal = k_w(w, gamma, &lambda, d).ok_or_else(too_small)? as i64;
                let rhs = joint - marginal + kappa as i64;
                rows.push(TheoremRow {
                    alpha: alpha.clone(),
                    gamma: gamma.clone(),
                    d: d.clone(),
                    lhs,
                    rhs,
                    residual: lhs - rhs,
                });
            }
        }
    }
    let p = ktable.params();
    Ok(TheoremReport {
        params: ReportParams {
            machine_id: p.machine_id.clone(),
            delta: simple.delta(),
            max_len: p.max_len,
            steps: p.steps,
            kappa,
        },
        all_exact: rows.iter().all(|r| r.residual == 0),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectSurvey {
    pub histogram: BTreeMap<i64, u64>,
    /// First triples (in α, γ, β order) attaining the minimum and maximum Δ.
    pub extremes: Option<(ChainDefect, ChainDefect)>,
    pub finite: u64,
    pub infinite: u64,
}

pub fn defect_survey(ktable: &ComplexityTable, simple: &SimpleSet) -> DefectSurvey {
    let mut histogram = BTreeMap::new();
    let mut extremes: Option<(ChainDefect, ChainDefect)> = None;
    let (mut finite, mut infinite) = (0, 0);
    for alpha in simple.members() {
        for gamma in simple.members() {
            for beta in simple.members() {
                let Some(cd) = chain_defect(ktable, alpha, gamma, beta) else {
                    infinite += 1;
                    continue;
                };
                finite += 1;
                *histogram.entry(cd.delta_value).or_insert(0) += 1;
                extremes = Some(match extremes.take() {
                    None => (cd.clone(), cd),
                    Some((lo, hi)) => {
                        let lo = if cd.delta_value < lo.delta_value { cd.clone() } else { lo };
                        let hi = if cd.delta_value > hi.delta_value { cd } else { hi };
                        (lo, hi)
                    }
                });
            }
        }
    }
    DefectSurvey {
        histogram,
        extremes,
        finite,
        infinite,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{Lab, LabConfig};

    #[test]
    fn trivial_delta_gives_empty_report() {
        let lab = Lab::build(&LabConfig::with_delta(1)).unwrap();
        let report = verify_theorem(&lab.w, &lab.ktable, &lab.simple, lab.kappa.kappa).unwrap();
        assert!(report.rows.is_empty());
        assert!(report.all_exact);
        let survey = defect_survey(&lab.ktable, &lab.simple);
        assert_eq!(survey.histogram, BTreeMap::from([(-3, 1)]));
        assert_eq!(survey.finite, 1);
    }

    #[test]
    fn small_lab_is_exact() {
        let lab = Lab::build(&LabConfig::with_delta(5)).unwrap();
        let report = verify_theorem(&lab.w, &lab.ktable, &lab.simple, lab.kappa.kappa).unwrap();
        assert_eq!(report.rows.len(), 3 * 2 * 3);
        assert!(report.all_exact, "{:?}", report.first_failure());
        for a in lab.simple.members() {
            for d in lab.simple.members() {
                assert_eq!(k_w(&lab.w, a, &BitString::empty(), d), lab.ktable.k(a, d));
            }
        }
    }

    #[test]
    fn tampered_family_breaks_exactness() {
        let lab = Lab::build(&LabConfig::with_delta(5)).unwrap();
        let mut family = lab.w.family().clone();
        let ws = family.values_mut().next().unwrap();
        let (d, target) = ws
            .rows()
            .next()
            .map(|(d, _, r)| (d.clone(), r.result.clone()))
            .unwrap();
        // lengthen every codeword for one (d, result) so its minimum moves
        let mut rebuilt = crate::chaitin::RestrictedComputerTable::new(ws.s().clone());
        for (dd, cc, rr) in ws.rows() {
            let mut code = cc.clone();
            if dd == &d && rr.result == target {
                code.push(true);
                code.push(true);
            }
            rebuilt.insert(dd.clone(), code, rr.clone());
        }
        *ws = rebuilt;
        let w = WComputer::new(lab.simple.clone(), family, lab.w_base(), lab.kappa.kappa);
        let report = verify_theorem(&w, &lab.ktable, &lab.simple, lab.kappa.kappa).unwrap();
        assert!(!report.all_exact);
    }
}
