//! Admission control: who gets in when the size budget cannot fit everyone.
//!
//! Every admitted user consumes its size Φ* of the shared budget ΣΦ* < 1,
//! and the total equilibrium utility of an admitted set is
//!
//!   u_T = (B·f*/(σ²·γ*)) · (1 − Σ_i Φ_i) · Σ_ℓ h_ℓ/(1 − Φ_ℓ).
//!
//! The access point's problem is to pick the subset maximizing u_T. This
//! module provides the budget predicate, an exact exhaustive solver for
//! small heterogeneous pools, and the closed forms for the class-level
//! problem with equal mean gains: L identical users of size Φ yield a
//! normalized objective (L − L²Φ)/(1 − Φ), maximized near L = 1/(2Φ), and
//! with several classes only the smallest-size class is worth admitting.
//! A loss table quantifies how much any other allocation gives up.

use crate::error::{Error, Result};
use crate::game::SystemParams;

/// Pools beyond this size are refused by [`optimal_subset_exhaustive`]
/// (2^25 subset evaluations is the budget ceiling; larger instances must
/// use the class-level solvers).
pub const MAX_EXHAUSTIVE_POOL: usize = 25;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// A QoS class: a (source rate, delay bound) pair shared by a population
/// of users, with its resulting size.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSpec {
    label: String,
    source_rate_bps: f64,
    max_avg_delay_s: f64,
    size_phi: f64,
    population: Option<u64>,
}

impl ClassSpec {
    /// Requires a nonempty label, r ≥ 0, D > 0, and Φ ∈ (0, 1).
    /// `population` of `None` means an unlimited supply of users.
    pub fn new(
        label: impl Into<String>,
        source_rate_bps: f64,
        max_avg_delay_s: f64,
        size_phi: f64,
        population: Option<u64>,
    ) -> Result<Self> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::Domain("class label must be nonempty".into()));
        }
        if !source_rate_bps.is_finite() || source_rate_bps < 0.0 {
            return Err(Error::Domain(format!(
                "source rate must be finite and nonnegative, got {source_rate_bps}"
            )));
        }
        if !max_avg_delay_s.is_finite() || max_avg_delay_s <= 0.0 {
            return Err(Error::Domain(format!(
                "delay bound must be finite and positive, got {max_avg_delay_s}"
            )));
        }
        if !(size_phi > 0.0 && size_phi < 1.0) {
            return Err(Error::Domain(format!(
                "class size must lie in (0, 1), got {size_phi}"
            )));
        }
        Ok(Self {
            label,
            source_rate_bps,
            max_avg_delay_s,
            size_phi,
            population,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// r, bits/second.
    pub fn source_rate_bps(&self) -> f64 {
        self.source_rate_bps
    }

    /// D, seconds.
    pub fn max_avg_delay_s(&self) -> f64 {
        self.max_avg_delay_s
    }

    /// Φ*, dimensionless.
    pub fn size_phi(&self) -> f64 {
        self.size_phi
    }

    /// Available user count; `None` when unlimited.
    pub fn population(&self) -> Option<u64> {
        self.population
    }
}

/// One user offered to the exhaustive subset solver: its size and gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    /// Φ* ∈ (0, 1).
    pub size_phi: f64,
    /// h > 0.
    pub channel_gain: f64,
}

/// What the access point admitted.
#[derive(Debug, Clone, PartialEq)]
pub enum Admitted {
    /// Candidate indices, ascending (subset solver).
    Users(Vec<usize>),
    /// Per-class user counts, aligned with the input classes.
    ClassCounts(Vec<u64>),
}

/// An admission outcome: the selection, its budget use, and its objective.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissionDecision {
    pub admitted: Admitted,
    /// Σ Φ over the admitted users, strictly below 1.
    pub total_size: f64,
    /// The achieved objective: bits/joule for per-user decisions, the
    /// equal-gain normalized objective (1 − ΣΦ)·Σ 1/(1−Φ) for class-level
    /// decisions.
    pub total_utility: f64,
    /// Fractional shortfall versus the best known allocation; zero for
    /// decisions produced by the optimizers themselves.
    pub loss_vs_optimal: f64,
}

// ---------------------------------------------------------------------------
// Budget and capacity
// ---------------------------------------------------------------------------

/// The size-budget check: true iff Σ Φ < 1 strictly.
pub fn budget_feasible(sizes: &[f64]) -> Result<bool> {
    for &phi in sizes {
        if !(phi > 0.0 && phi < 1.0) {
            return Err(Error::Domain(format!("user size must lie in (0, 1), got {phi}")));
        }
    }
    Ok(sizes.iter().sum::<f64>() < 1.0)
}

/// The largest K with K·Φ < 1: how many identical users of size Φ fit at
/// all.
pub fn network_capacity(phi: f64) -> Result<u64> {
    check_phi(phi)?;
    let mut k = (1.0 / phi).floor() as i64;
    while k > 0 && k as f64 * phi >= 1.0 {
        k -= 1;
    }
    while (k + 1) as f64 * phi < 1.0 {
        k += 1;
    }
    Ok(k as u64)
}

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

/// Total equilibrium utility of an admitted set, bits/joule:
/// (B·f*/(σ²·γ*))·(1 − ΣΦ)·Σ_ℓ h_ℓ/(1 − Φ_ℓ). Equals the per-user
/// equilibrium utilities summed.
pub fn total_utility_objective(
    sizes: &[f64],
    gains: &[f64],
    params: &SystemParams,
    f_star: f64,
    gamma_star: f64,
) -> Result<f64> {
    if sizes.len() != gains.len() {
        return Err(Error::Domain(format!(
            "sizes/gains lengths disagree: {}/{}",
            sizes.len(),
            gains.len()
        )));
    }
    for &h in gains {
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::Domain(format!("channel gain must be positive, got {h}")));
        }
    }
    if !budget_feasible(sizes)? {
        return Err(Error::InfeasibleSet {
            total_size: sizes.iter().sum(),
        });
    }
    let total: f64 = sizes.iter().sum();
    let weighted: f64 = sizes
        .iter()
        .zip(gains)
        .map(|(&phi, &h)| h / (1.0 - phi))
        .sum();
    Ok(params.bandwidth_hz() * f_star / (params.noise_power_w() * gamma_star)
        * (1.0 - total)
        * weighted)
}

/// The equal-gain normalized class objective for a per-class allocation:
/// (1 − Σ_c L_c·Φ_c)·Σ_c L_c/(1 − Φ_c). This is the total utility with
/// Σ h_ℓ replaced by L·E{h} and the constant B·f*·E{h}/(σ²·γ*) dropped.
pub fn allocation_objective(counts: &[u64], classes: &[ClassSpec]) -> Result<f64> {
    if counts.len() != classes.len() {
        return Err(Error::Domain(format!(
            "allocation has {} entries for {} classes",
            counts.len(),
            classes.len()
        )));
    }
    let total: f64 = counts
        .iter()
        .zip(classes)
        .map(|(&l, c)| l as f64 * c.size_phi)
        .sum();
    if total >= 1.0 {
        return Err(Error::InfeasibleSet { total_size: total });
    }
    let weighted: f64 = counts
        .iter()
        .zip(classes)
        .map(|(&l, c)| l as f64 / (1.0 - c.size_phi))
        .sum();
    Ok((1.0 - total) * weighted)
}

/// Fractional utility loss of `allocation` relative to `baseline`:
/// 1 − u_T(allocation)/u_T(baseline), both under the equal-gain
/// normalized objective. Allocations beyond a class population are
/// rejected.
pub fn utility_loss(allocation: &[u64], classes: &[ClassSpec], baseline: &[u64]) -> Result<f64> {
    for (counts, what) in [(allocation, "allocation"), (baseline, "baseline")] {
        for (&l, c) in counts.iter().zip(classes) {
            if let Some(pop) = c.population {
                if l > pop {
                    return Err(Error::Domain(format!(
                        "{what} admits {l} users from class {} but only {pop} exist",
                        c.label
                    )));
                }
            }
        }
    }
    let achieved = allocation_objective(allocation, classes)?;
    let best = allocation_objective(baseline, classes)?;
    if best <= 0.0 {
        return Err(Error::Domain(
            "baseline allocation has no utility to lose against".into(),
        ));
    }
    Ok(1.0 - achieved / best)
}

// ---------------------------------------------------------------------------
// Optimizers
// ---------------------------------------------------------------------------

/// Exact maximizer of [`total_utility_objective`] over all feasible
/// subsets of a heterogeneous candidate pool, by depth-first enumeration
/// with budget pruning.
///
/// Ties (identical candidates) resolve to the lexicographically smallest
/// admitted index set, independent of enumeration order. Pools larger
/// than [`MAX_EXHAUSTIVE_POOL`] are refused; use the class-level solvers
/// for those.
pub fn optimal_subset_exhaustive(
    candidates: &[Candidate],
    params: &SystemParams,
    f_star: f64,
    gamma_star: f64,
) -> Result<AdmissionDecision> {
    if candidates.len() > MAX_EXHAUSTIVE_POOL {
        return Err(Error::PoolTooLarge {
            size: candidates.len(),
            max: MAX_EXHAUSTIVE_POOL,
        });
    }
    for c in candidates {
        check_phi(c.size_phi)?;
        if !c.channel_gain.is_finite() || c.channel_gain <= 0.0 {
            return Err(Error::Domain(format!(
                "channel gain must be positive, got {}",
                c.channel_gain
            )));
        }
    }

    let mut search = SubsetSearch {
        candidates,
        best_objective: 0.0,
        best_set: Vec::new(),
        best_size: 0.0,
        chosen: Vec::new(),
    };
    search.run(0, 0.0, 0.0);

    let scale = params.bandwidth_hz() * f_star / (params.noise_power_w() * gamma_star);
    Ok(AdmissionDecision {
        admitted: Admitted::Users(search.best_set),
        total_size: search.best_size,
        total_utility: scale * search.best_objective,
        loss_vs_optimal: 0.0,
    })
}

struct SubsetSearch<'a> {
    candidates: &'a [Candidate],
    best_objective: f64,
    best_set: Vec<usize>,
    best_size: f64,
    chosen: Vec<usize>,
}

impl SubsetSearch<'_> {
    /// `weighted` accumulates Σ h/(1−Φ) over `chosen`; the normalized
    /// objective of a complete subset is (1 − ΣΦ)·weighted.
    fn run(&mut self, i: usize, total_size: f64, weighted: f64) {
        if i == self.candidates.len() {
            let objective = (1.0 - total_size) * weighted;
            let better = objective > self.best_objective
                || (objective == self.best_objective && self.chosen < self.best_set);
            if better {
                self.best_objective = objective;
                self.best_set = self.chosen.clone();
                self.best_size = total_size;
            }
            return;
        }
        let c = &self.candidates[i];
        if total_size + c.size_phi < 1.0 {
            self.chosen.push(i);
            self.run(
                i + 1,
                total_size + c.size_phi,
                weighted + c.channel_gain / (1.0 - c.size_phi),
            );
            self.chosen.pop();
        }
        self.run(i + 1, total_size, weighted);
    }
}

/// The best number of identical users of size Φ to admit: the integer
/// maximizer of the normalized objective (L − L²Φ)/(1 − Φ), i.e. the
/// nearest integer to 1/(2Φ) with exact halves settled by evaluating both
/// neighbors, clamped to the network capacity.
pub fn symmetric_optimal_count(phi: f64) -> Result<u64> {
    check_phi(phi)?;
    let capacity = network_capacity(phi)?;
    let lo = ((1.0 / (2.0 * phi)).floor() as u64).min(capacity);
    let hi = (lo + 1).min(capacity);
    let objective = |l: u64| l as f64 - (l as f64) * (l as f64) * phi;
    // On an exact half the two neighbors tie and the upper one wins
    // (half-up).
    Ok(if objective(hi) >= objective(lo) { hi } else { lo })
}

/// The optimal equal-mean-gain multiclass admission: fill from the
/// smallest-size class only, taking [`symmetric_optimal_count`] users
/// (fewer if the class population runs out — the closed form has no
/// backfill rule, so none is invented). Size ties between classes break
/// by label order.
pub fn multiclass_optimal(classes: &[ClassSpec]) -> Result<AdmissionDecision> {
    if classes.is_empty() {
        return Err(Error::Domain("admission needs at least one class".into()));
    }
    let mut best = 0;
    for (i, c) in classes.iter().enumerate().skip(1) {
        let b = &classes[best];
        if c.size_phi < b.size_phi || (c.size_phi == b.size_phi && c.label < b.label) {
            best = i;
        }
    }

    let mut count = symmetric_optimal_count(classes[best].size_phi)?;
    if let Some(pop) = classes[best].population {
        count = count.min(pop);
    }
    let mut counts = vec![0u64; classes.len()];
    counts[best] = count;
    let total_utility = allocation_objective(&counts, classes)?;
    Ok(AdmissionDecision {
        admitted: Admitted::ClassCounts(counts),
        total_size: count as f64 * classes[best].size_phi,
        total_utility,
        loss_vs_optimal: 0.0,
    })
}

fn check_phi(phi: f64) -> Result<()> {
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::Domain(format!("user size must lie in (0, 1), got {phi}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::equilibrium_utility;
    use proptest::prelude::*;

    // Class sizes for the reference three-class system (B = 5 MHz,
    // M = 100), frozen from the size closed form.
    const PHI_A: f64 = 0.019_847_610_718_6;
    const PHI_B: f64 = 0.071_759_590_336_8;
    const PHI_C: f64 = 0.184_830_115_032;

    fn reference_classes() -> Vec<ClassSpec> {
        vec![
            ClassSpec::new("A", 5_000.0, 0.010, PHI_A, None).unwrap(),
            ClassSpec::new("B", 50_000.0, 0.050, PHI_B, None).unwrap(),
            ClassSpec::new("C", 150_000.0, 1.0, PHI_C, None).unwrap(),
        ]
    }

    /// Brute force over all allocation vectors up to each class's network
    /// capacity (and population), for use as an oracle against the
    /// closed-form solvers.
    fn best_allocation_exhaustive(classes: &[ClassSpec]) -> (Vec<u64>, f64) {
        let limits: Vec<u64> = classes
            .iter()
            .map(|c| {
                let cap = network_capacity(c.size_phi()).unwrap();
                c.population().map_or(cap, |p| p.min(cap))
            })
            .collect();
        let mut best = (vec![0; classes.len()], 0.0_f64);
        let mut counts = vec![0u64; classes.len()];
        loop {
            if let Ok(obj) = allocation_objective(&counts, classes) {
                if obj > best.1 {
                    best = (counts.clone(), obj);
                }
            }
            // Odometer increment.
            let mut i = 0;
            loop {
                if i == counts.len() {
                    return best;
                }
                counts[i] += 1;
                if counts[i] <= limits[i] {
                    break;
                }
                counts[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn budget_examples() {
        assert!(budget_feasible(&vec![0.0198; 25]).unwrap());
        assert!(budget_feasible(&[]).unwrap());
        assert!(!budget_feasible(&[0.5, 0.5]).unwrap());
        assert!(budget_feasible(&[1.5]).is_err());
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(network_capacity(0.0198).unwrap(), 50);
        assert_eq!(network_capacity(0.5).unwrap(), 1);
        assert_eq!(network_capacity(0.1848).unwrap(), 5);
        assert_eq!(network_capacity(PHI_A).unwrap(), 50);
        assert_eq!(network_capacity(PHI_B).unwrap(), 13);
        assert_eq!(network_capacity(PHI_C).unwrap(), 5);
    }

    #[test]
    fn objective_matches_summed_equilibrium_utilities() {
        let params = SystemParams::new(5e6, 5e-15, 100).unwrap();
        let (f_star, gamma_star) = (0.856_988_708_725_891_2, 6.474_600_379_589_358);
        let sizes = [PHI_A, PHI_B, PHI_C, PHI_A];
        let gains = [1.0, 0.4, 0.07, 0.9];
        let total = total_utility_objective(&sizes, &gains, &params, f_star, gamma_star).unwrap();
        let summed: f64 = (0..sizes.len())
            .map(|k| equilibrium_utility(k, &sizes, &gains, &params, f_star, gamma_star).unwrap())
            .sum();
        assert!((total - summed).abs() / summed < 1e-12);
    }

    #[test]
    fn objective_rejects_overfull_selection() {
        let params = SystemParams::new(5e6, 5e-15, 100).unwrap();
        assert!(matches!(
            total_utility_objective(&[0.6, 0.4], &[1.0, 1.0], &params, 0.857, 6.47),
            Err(Error::InfeasibleSet { .. })
        ));
    }

    #[test]
    fn reference_allocation_objective_frozen() {
        let classes = reference_classes();
        let obj = allocation_objective(&[25, 0, 0], &classes).unwrap();
        assert!((obj - 12.850_290_87).abs() < 1e-6, "objective = {obj}");
    }

    #[test]
    fn loss_table_reproduction() {
        // Published loss table: percentage losses for hand-picked
        // allocations against the optimal (25, 0, 0), rounded to integer
        // points in the source.
        let classes = reference_classes();
        let baseline = [25, 0, 0];
        let cases: [([u64; 3], f64, f64); 5] = [
            ([23, 1, 0], 10.0, 9.900_34),
            ([20, 0, 1], 30.0, 29.598_7),
            ([18, 1, 1], 38.0, 37.890_7),
            ([0, 7, 0], 71.0, 70.793_6),
            ([0, 0, 3], 87.0, 87.241_0),
        ];
        for (allocation, published_pct, frozen_pct) in cases {
            let loss = utility_loss(&allocation, &classes, &baseline).unwrap() * 100.0;
            assert!(
                (loss - published_pct).abs() <= 1.0,
                "{allocation:?}: loss {loss} vs published {published_pct}"
            );
            assert!((loss - frozen_pct).abs() < 1e-3);
        }
    }

    #[test]
    fn loss_rejects_infeasible_allocation() {
        let classes = reference_classes();
        // 14 class-B users: 14·0.0718 > 1.
        assert!(matches!(
            utility_loss(&[0, 14, 0], &classes, &[25, 0, 0]),
            Err(Error::InfeasibleSet { .. })
        ));
    }

    #[test]
    fn loss_respects_population() {
        let mut classes = reference_classes();
        classes[0] = ClassSpec::new("A", 5_000.0, 0.010, PHI_A, Some(10)).unwrap();
        assert!(utility_loss(&[11, 0, 0], &classes, &[10, 0, 0]).is_err());
        assert!(utility_loss(&[9, 0, 0], &classes, &[10, 0, 0]).is_ok());
    }

    #[test]
    fn symmetric_count_published_values() {
        assert_eq!(symmetric_optimal_count(0.0198).unwrap(), 25);
        assert_eq!(symmetric_optimal_count(PHI_A).unwrap(), 25);
        assert_eq!(symmetric_optimal_count(PHI_B).unwrap(), 7);
        assert_eq!(symmetric_optimal_count(PHI_C).unwrap(), 3);
    }

    #[test]
    fn symmetric_count_capacity_clamp_and_ties() {
        // Φ = 0.5: continuous optimum at 1, capacity 1.
        assert_eq!(symmetric_optimal_count(0.5).unwrap(), 1);
        // Φ = 0.3: 1/(2Φ) = 1.667; the objective prefers 2.
        assert_eq!(symmetric_optimal_count(0.3).unwrap(), 2);
        // Exact half at Φ = 0.25 · 4/3: 1/(2Φ) = 1.5; both neighbors tie
        // up to rounding and the evaluation settles it.
        let phi = 1.0 / 3.0;
        let l = symmetric_optimal_count(phi).unwrap();
        let objective = |l: u64| l as f64 - (l as f64).powi(2) * phi;
        assert!(objective(l) >= objective(1));
        assert!(objective(l) >= objective(2));
    }

    #[test]
    fn symmetric_count_is_discrete_argmax() {
        for phi in [0.01, 0.037, PHI_A, PHI_B, PHI_C, 0.26, 0.49] {
            let l = symmetric_optimal_count(phi).unwrap();
            let cap = network_capacity(phi).unwrap();
            let objective = |l: u64| l as f64 - (l as f64) * (l as f64) * phi;
            for other in 0..=cap {
                assert!(
                    objective(l) >= objective(other),
                    "phi={phi}: L={l} beaten by {other}"
                );
            }
        }
    }

    #[test]
    fn multiclass_picks_smallest_class_only() {
        let decision = multiclass_optimal(&reference_classes()).unwrap();
        assert_eq!(decision.admitted, Admitted::ClassCounts(vec![25, 0, 0]));
        assert!((decision.total_size - 25.0 * PHI_A).abs() < 1e-12);
        assert!((decision.total_utility - 12.850_290_87).abs() < 1e-6);
    }

    #[test]
    fn multiclass_single_class_reduces_to_symmetric() {
        let only = vec![ClassSpec::new("B", 50_000.0, 0.050, PHI_B, None).unwrap()];
        let decision = multiclass_optimal(&only).unwrap();
        assert_eq!(decision.admitted, Admitted::ClassCounts(vec![7]));
    }

    #[test]
    fn multiclass_breaks_size_ties_by_label() {
        let classes = vec![
            ClassSpec::new("zeta", 1000.0, 0.1, 0.1, None).unwrap(),
            ClassSpec::new("alpha", 2000.0, 0.2, 0.1, None).unwrap(),
        ];
        let decision = multiclass_optimal(&classes).unwrap();
        assert_eq!(decision.admitted, Admitted::ClassCounts(vec![0, 5]));
    }

    #[test]
    fn multiclass_respects_population() {
        let classes = vec![
            ClassSpec::new("A", 5_000.0, 0.010, PHI_A, Some(4)).unwrap(),
            ClassSpec::new("C", 150_000.0, 1.0, PHI_C, None).unwrap(),
        ];
        let decision = multiclass_optimal(&classes).unwrap();
        assert_eq!(decision.admitted, Admitted::ClassCounts(vec![4, 0]));
    }

    #[test]
    fn multiclass_matches_allocation_oracle() {
        let systems = vec![
            reference_classes(),
            vec![
                ClassSpec::new("x", 1000.0, 0.1, 0.1, None).unwrap(),
                ClassSpec::new("y", 1000.0, 0.1, 0.1, None).unwrap(),
            ],
            vec![
                ClassSpec::new("p", 1000.0, 0.1, 0.09, None).unwrap(),
                ClassSpec::new("q", 1000.0, 0.1, 0.15, None).unwrap(),
                ClassSpec::new("r", 1000.0, 0.1, 0.3, None).unwrap(),
            ],
            vec![
                ClassSpec::new("s", 1000.0, 0.1, 0.45, None).unwrap(),
                ClassSpec::new("t", 1000.0, 0.1, 0.48, None).unwrap(),
            ],
        ];
        for classes in systems {
            let decision = multiclass_optimal(&classes).unwrap();
            let (_, oracle_obj) = best_allocation_exhaustive(&classes);
            assert!(
                (decision.total_utility - oracle_obj).abs() <= 1e-12 * oracle_obj.max(1.0),
                "closed form {} vs oracle {oracle_obj}",
                decision.total_utility
            );
        }
    }

    #[test]
    fn adding_a_user_to_the_optimum_never_helps() {
        let classes = reference_classes();
        let decision = multiclass_optimal(&classes).unwrap();
        let Admitted::ClassCounts(counts) = &decision.admitted else {
            panic!("class decision expected")
        };
        for c in 0..classes.len() {
            let mut bumped = counts.clone();
            bumped[c] += 1;
            if let Ok(obj) = allocation_objective(&bumped, &classes) {
                assert!(obj <= decision.total_utility, "extra class-{c} user helped");
            }
        }
    }

    #[test]
    fn subset_search_three_identical_users() {
        let params = SystemParams::new(5e6, 5e-15, 100).unwrap();
        let pool = vec![
            Candidate {
                size_phi: 0.3,
                channel_gain: 1.0,
            };
            3
        ];
        let decision = optimal_subset_exhaustive(&pool, &params, 0.857, 6.47).unwrap();
        // Two users are optimal, and the tie among equal pairs resolves to
        // the smallest index set.
        assert_eq!(decision.admitted, Admitted::Users(vec![0, 1]));
        assert!((decision.total_size - 0.6).abs() < 1e-15);
    }

    #[test]
    fn subset_search_single_candidate_is_admitted() {
        let params = SystemParams::new(5e6, 5e-15, 100).unwrap();
        let pool = [Candidate {
            size_phi: 0.7,
            channel_gain: 0.2,
        }];
        let decision = optimal_subset_exhaustive(&pool, &params, 0.857, 6.47).unwrap();
        assert_eq!(decision.admitted, Admitted::Users(vec![0]));
    }

    #[test]
    fn subset_search_beats_greedy_heuristics() {
        let params = SystemParams::new(5e6, 5e-15, 100).unwrap();
        let (f_star, gamma_star) = (0.856_988_708_725_891_2, 6.474_600_379_589_358);
        // A mixed pool drawn from the three reference classes with varied
        // gains.
        let pool: Vec<Candidate> = [
            (PHI_A, 1.0),
            (PHI_A, 0.2),
            (PHI_A, 0.05),
            (PHI_B, 0.9),
            (PHI_B, 0.5),
            (PHI_B, 0.1),
            (PHI_C, 1.0),
            (PHI_C, 0.6),
            (PHI_C, 0.02),
            (PHI_A, 0.45),
            (PHI_B, 0.33),
            (PHI_C, 0.21),
        ]
        .into_iter()
        .map(|(size_phi, channel_gain)| Candidate {
            size_phi,
            channel_gain,
        })
        .collect();
        let exact = optimal_subset_exhaustive(&pool, &params, f_star, gamma_star).unwrap();

        let objective_of = |chosen: &[usize]| {
            let sizes: Vec<f64> = chosen.iter().map(|&i| pool[i].size_phi).collect();
            let gains: Vec<f64> = chosen.iter().map(|&i| pool[i].channel_gain).collect();
            total_utility_objective(&sizes, &gains, &params, f_star, gamma_star).unwrap_or(0.0)
        };

        // Greedy by ascending size and by descending gain, with best-prefix
        // selection.
        for key in [
            |c: &Candidate| c.size_phi,
            |c: &Candidate| -c.channel_gain,
            |c: &Candidate| c.size_phi / c.channel_gain,
        ] {
            let mut order: Vec<usize> = (0..pool.len()).collect();
            order.sort_by(|&a, &b| key(&pool[a]).partial_cmp(&key(&pool[b])).unwrap());
            let greedy_best = (0..=order.len())
                .map(|n| objective_of(&order[..n]))
                .fold(0.0_f64, f64::max);
            assert!(
                exact.total_utility >= greedy_best - 1e-9 * greedy_best.abs(),
                "greedy beat the exhaustive search"
            );
        }
    }

    #[test]
    fn subset_search_refuses_large_pools() {
        let params = SystemParams::new(5e6, 5e-15, 100).unwrap();
        let pool = vec![
            Candidate {
                size_phi: 0.01,
                channel_gain: 1.0
            };
            26
        ];
        assert!(matches!(
            optimal_subset_exhaustive(&pool, &params, 0.857, 6.47),
            Err(Error::PoolTooLarge { size: 26, max: 25 })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn quadratic_structure_of_identical_users(
            phi in 0.01f64..0.5,
            l in 0u64..20,
        ) {
            let class = ClassSpec::new("only", 1000.0, 0.1, phi, None).unwrap();
            prop_assume!(l as f64 * phi < 1.0);
            let obj = allocation_objective(&[l], &[class]).unwrap();
            let quadratic = (l as f64 - (l as f64).powi(2) * phi) / (1.0 - phi);
            prop_assert!((obj - quadratic).abs() <= 1e-12 * quadratic.abs().max(1.0));
        }

        #[test]
        fn multiclass_never_loses_to_random_allocations(
            phis in proptest::collection::vec(0.05f64..0.45, 1..4),
            seed in 0u64..1000,
        ) {
            let classes: Vec<ClassSpec> = phis
                .iter()
                .enumerate()
                .map(|(i, &phi)| ClassSpec::new(format!("c{i}"), 1000.0, 0.1, phi, None).unwrap())
                .collect();
            let decision = multiclass_optimal(&classes).unwrap();
            // A cheap deterministic probe allocation from the seed.
            let mut counts = vec![0u64; classes.len()];
            let mut s = seed;
            for c in counts.iter_mut() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                *c = (s >> 60) % 8;
            }
            if let Ok(obj) = allocation_objective(&counts, &classes) {
                prop_assert!(decision.total_utility >= obj - 1e-12);
            }
        }
    }
}
