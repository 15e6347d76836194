//! Classifying how many lost particles a state survives, and turning the
//! pattern of entangled marginals back into a link polynomial.

use serde_json::json;
use thiserror::Error;

use crate::linkpoly::{subsets_of_size, LinkError, LinkPolynomial};
use crate::qstate::{DensityOperator, QstateError, SparseKet};
use crate::septest::{full_verdict, SepError, ToleranceConfig, Verdict};

#[derive(Debug, Error)]
pub enum ResistError {
    #[error(transparent)]
    State(#[from] QstateError),
    #[error(transparent)]
    Sep(#[from] SepError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error("separability of the marginal on sites {0:?} could not be decided")]
    UndecidedMarginal(Vec<usize>),
}

/// A pure state on its sites, or an unnormalized mixture presented as
/// pure terms carrying one extra environment site at the end.
#[derive(Debug, Clone)]
pub enum StateSource {
    Pure(SparseKet),
    Mixture {
        terms: Vec<SparseKet>,
        system_sites: usize,
    },
}

impl StateSource {
    pub fn system_sites(&self) -> usize {
        match self {
            StateSource::Pure(k) => k.site_count(),
            StateSource::Mixture { system_sites, .. } => *system_sites,
        }
    }

    /// Marginal on the given system sites; mixtures always trace their
    /// environment site as well.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityOperator, QstateError> {
        match self {
            StateSource::Pure(k) => DensityOperator::reduce(k, keep),
            StateSource::Mixture { terms, .. } => DensityOperator::reduce_mixture(terms, keep),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// Every loss of up to m sites leaves entanglement and every loss of
    /// m+1 sites destroys it.
    Resistant(usize),
    /// No single m fits the observed verdicts, or a marginal could not
    /// be decided.
    Undetermined(String),
}

#[derive(Debug, Clone)]
pub struct LevelReport {
    pub lost: usize,
    /// (kept sites, verdict) for every marginal examined at this level.
    pub verdicts: Vec<(Vec<usize>, Verdict)>,
}

#[derive(Debug, Clone)]
pub struct ResistanceProfile {
    pub levels: Vec<LevelReport>,
    pub classification: Classification,
}

impl ResistanceProfile {
    pub fn to_json(&self) -> serde_json::Value {
        let levels: Vec<serde_json::Value> = self
            .levels
            .iter()
            .map(|lvl| {
                let verdicts: Vec<serde_json::Value> = lvl
                    .verdicts
                    .iter()
                    .map(|(kept, v)| json!({"kept": kept, "verdict": v}))
                    .collect();
                json!({"lost": lvl.lost, "marginals": verdicts})
            })
            .collect();
        let classification = match &self.classification {
            Classification::Resistant(m) => json!({"resistant": m}),
            Classification::Undetermined(reason) => json!({"undetermined": reason}),
        };
        json!({"levels": levels, "classification": classification})
    }
}

fn mask_to_sites(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&s| mask & (1 << s) != 0).collect()
}

fn subset_seed(root: u64, mask: u32) -> u64 {
    // splitmix64 step so nearby masks get unrelated streams
    let mut z = root.wrapping_add(mask as u64).wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Work upward through loss levels until one is fully separable.
///
/// At each level every marginal must agree: a level mixing entangled and
/// separable marginals (or leaving one undecided) rules out a uniform
/// resistance number. With `symmetric` set, only the first subset of each
/// level is examined, which is exact for permutation-symmetric states.
pub fn resistance_profile(
    source: &StateSource,
    cfg: &ToleranceConfig,
    seed: u64,
    symmetric: bool,
) -> Result<ResistanceProfile, ResistError> {
    let n = source.system_sites();
    let mut levels = Vec::new();
    for lost in 0..n {
        let keep_size = n - lost;
        let mut keep_masks = subsets_of_size(n, keep_size);
        if symmetric {
            keep_masks.truncate(1);
        }
        let mut verdicts = Vec::with_capacity(keep_masks.len());
        for mask in keep_masks {
            let kept = mask_to_sites(mask, n);
            let rho = source.reduce(&kept)?;
            let v = full_verdict(&rho, cfg, subset_seed(seed, mask))?;
            verdicts.push((kept, v));
        }
        let entangled = verdicts.iter().filter(|(_, v)| *v == Verdict::Entangled).count();
        let separable = verdicts.iter().filter(|(_, v)| *v == Verdict::Separable).count();
        let total = verdicts.len();
        levels.push(LevelReport { lost, verdicts });
        if separable == total {
            let classification = if lost == 0 {
                Classification::Undetermined("the full state is already separable".into())
            } else {
                Classification::Resistant(lost - 1)
            };
            return Ok(ResistanceProfile { levels, classification });
        }
        if entangled != total {
            let reason = if entangled + separable == total {
                format!("level {lost} mixes entangled and separable marginals")
            } else {
                format!("a marginal at level {lost} could not be decided")
            };
            return Ok(ResistanceProfile {
                levels,
                classification: Classification::Undetermined(reason),
            });
        }
    }
    // unreachable for n >= 1: single-site marginals are always separable
    Ok(ResistanceProfile {
        levels,
        classification: Classification::Undetermined("no separable level found".into()),
    })
}

/// Convenience wrapper returning just the resistance number.
pub fn classify(
    source: &StateSource,
    cfg: &ToleranceConfig,
    seed: u64,
    symmetric: bool,
) -> Result<Classification, ResistError> {
    Ok(resistance_profile(source, cfg, seed, symmetric)?.classification)
}

/// One monomial per subset of two or more sites whose marginal is
/// entangled, canonicalized. An undecidable marginal is an error because
/// it would silently change the polynomial.
pub fn state_to_link_polynomial(
    source: &StateSource,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<LinkPolynomial, ResistError> {
    let n = source.system_sites();
    let mut monomials = Vec::new();
    for size in 2..=n {
        for mask in subsets_of_size(n, size) {
            let kept = mask_to_sites(mask, n);
            let rho = source.reduce(&kept)?;
            match full_verdict(&rho, cfg, subset_seed(seed, mask))? {
                Verdict::Entangled => monomials.push(mask),
                Verdict::Separable => {}
                Verdict::Inconclusive => return Err(ResistError::UndecidedMarginal(kept)),
            }
        }
    }
    Ok(LinkPolynomial::new(n, monomials)?.canonicalize())
}
