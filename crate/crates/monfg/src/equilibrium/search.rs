//! Simplex-constrained search: best responses, epsilon-NE verification and
//! small-game mixed equilibrium search.
//!
//! ESR best responses are exact (the criterion is linear in the player's own
//! strategy, so a vertex attains the optimum). SER best responses combine a
//! regular simplex grid with derivative-free local refinement; their values
//! are lower bounds on the true best-response value.

use crate::criteria::{value, BlendedAssignment, Criterion};
use crate::game::{MixedStrategy, Monfg, StrategyProfile};
use crate::utility::UtilityExpr;

use super::EquilibriumError;

/// Step size below which local refinement stops.
const MIN_REFINEMENT_STEP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Subdivisions per simplex dimension for the SER grid scan.
    pub grid: usize,
    /// Number of best grid points used as refinement starts.
    pub restarts: usize,
    /// Total function-evaluation budget for local refinement.
    pub budget: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid: 50,
            restarts: 8,
            budget: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchMetadata {
    pub grid: usize,
    pub restarts: usize,
    pub refinement_evals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseResult {
    pub strategy: MixedStrategy,
    pub value: f64,
    pub metadata: SearchMetadata,
}

/// All points of the regular grid on the probability simplex with `g`
/// subdivisions per dimension, in lexicographic order of the underlying
/// integer compositions. Includes every vertex.
pub fn simplex_grid(num_actions: usize, g: usize) -> Vec<Vec<f64>> {
    fn recurse(remaining: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=remaining {
            prefix.push(k);
            recurse(remaining - k, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut compositions = Vec::new();
    recurse(g, num_actions, &mut Vec::new(), &mut compositions);
    compositions
        .into_iter()
        .map(|c| c.into_iter().map(|k| k as f64 / g as f64).collect())
        .collect()
}

/// Maximizes `f` over the simplex by coordinate mass moves with a shrinking
/// step, starting from `start`. Every iterate stays exactly on the simplex.
/// Returns the best point found, its value and the evaluations spent.
fn refine_on_simplex(
    f: &mut dyn FnMut(&[f64]) -> f64,
    start: &[f64],
    start_value: f64,
    initial_step: f64,
    budget: usize,
) -> (Vec<f64>, f64, usize) {
    let m = start.len();
    let mut best = start.to_vec();
    let mut best_value = start_value;
    let mut step = initial_step;
    let mut evals = 0;
    while step >= MIN_REFINEMENT_STEP && evals < budget {
        let mut improved = false;
        'moves: for from in 0..m {
            for to in 0..m {
                if from == to || best[from] == 0.0 {
                    continue;
                }
                let shift = step.min(best[from]);
                let mut candidate = best.clone();
                candidate[from] -= shift;
                candidate[to] += shift;
                if evals >= budget {
                    break 'moves;
                }
                let candidate_value = f(&candidate);
                evals += 1;
                if candidate_value > best_value {
                    best = candidate;
                    best_value = candidate_value;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (best, best_value, evals)
}

/// Best response of player `i` to the other players' strategies in `profile`
/// (player `i`'s own entry is ignored).
///
/// Under ESR the optimum is a pure action and is returned exactly, ties
/// broken by lowest index. Under SER the returned value is a lower bound on
/// the true best-response value.
pub fn best_response(
    game: &Monfg,
    u: &UtilityExpr,
    i: usize,
    profile: &StrategyProfile,
    criterion: Criterion,
    cfg: &SearchConfig,
) -> Result<BestResponseResult, EquilibriumError> {
    let m = game.num_actions(i);
    let metadata = |evals| SearchMetadata {
        grid: cfg.grid,
        restarts: cfg.restarts,
        refinement_evals: evals,
    };
    if m == 1 {
        let strategy = MixedStrategy::pure(0, 1);
        let v = value(game, u, &profile.with_player(i, strategy.clone()), i, criterion)?;
        return Ok(BestResponseResult {
            strategy,
            value: v,
            metadata: metadata(0),
        });
    }

    match criterion {
        Criterion::Esr => {
            let mut best_action = 0;
            let mut best_value = f64::NEG_INFINITY;
            for a in 0..m {
                let candidate = profile.with_player(i, MixedStrategy::pure(a, m));
                let v = value(game, u, &candidate, i, Criterion::Esr)?;
                if v > best_value {
                    best_value = v;
                    best_action = a;
                }
            }
            Ok(BestResponseResult {
                strategy: MixedStrategy::pure(best_action, m),
                value: best_value,
                metadata: metadata(0),
            })
        }
        Criterion::Ser => {
            // Validate shapes once; the inner closure then works on raw
            // probability vectors.
            value(game, u, profile, i, Criterion::Ser)?;
            let mut objective = |probs: &[f64]| -> f64 {
                let strategy = MixedStrategy::new(probs.to_vec()).expect("search stays on simplex");
                value(game, u, &profile.with_player(i, strategy), i, Criterion::Ser)
                    .expect("shapes validated before search")
            };

            let grid = simplex_grid(m, cfg.grid.max(2));
            let mut scored: Vec<(usize, f64)> = grid
                .iter()
                .enumerate()
                .map(|(index, point)| (index, objective(point)))
                .collect();
            scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));

            let restarts = cfg.restarts.max(1).min(scored.len());
            let per_start_budget = cfg.budget / restarts;
            let initial_step = 1.0 / cfg.grid.max(2) as f64;
            let mut best: Option<(Vec<f64>, f64)> = None;
            let mut total_evals = 0;
            for &(index, grid_value) in scored.iter().take(restarts) {
                let (point, point_value, evals) = refine_on_simplex(
                    &mut objective,
                    &grid[index],
                    grid_value,
                    initial_step,
                    per_start_budget,
                );
                total_evals += evals;
                if best.as_ref().is_none_or(|(_, v)| point_value > *v) {
                    best = Some((point, point_value));
                }
            }
            let (point, point_value) = best.expect("at least one restart");
            Ok(BestResponseResult {
                strategy: MixedStrategy::new(point).expect("search stays on simplex"),
                value: point_value,
                metadata: metadata(total_evals),
            })
        }
    }
}

/// Per-player exploitability of a strategy profile under a criterion
/// assignment.
///
/// SER exploitabilities are computed from search-based best responses and
/// are therefore lower bounds: a "not an epsilon-NE" verdict is sound, an
/// "is an epsilon-NE" verdict is sound up to search quality. The
/// `ser_lower_bound` flag records this asymmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub exploitability: Vec<f64>,
    pub values: Vec<f64>,
    pub best_response_values: Vec<f64>,
    pub is_epsilon_ne: bool,
    pub epsilon: f64,
    pub assignment: BlendedAssignment,
    /// True when at least one player was checked under SER, whose
    /// exploitability is a search lower bound.
    pub ser_lower_bound: bool,
}

/// Checks whether `s` is an epsilon-NE under the given per-player criterion
/// assignment.
pub fn verify_ne(
    game: &Monfg,
    utilities: &[UtilityExpr],
    s: &StrategyProfile,
    assignment: &BlendedAssignment,
    epsilon: f64,
    cfg: &SearchConfig,
) -> Result<VerificationReport, EquilibriumError> {
    if utilities.len() != game.num_players() {
        return Err(EquilibriumError::UtilityArityMismatch {
            got: utilities.len(),
            expected: game.num_players(),
        });
    }
    if assignment.num_players() != game.num_players() {
        return Err(EquilibriumError::UtilityArityMismatch {
            got: assignment.num_players(),
            expected: game.num_players(),
        });
    }
    let mut values = Vec::new();
    let mut best_response_values = Vec::new();
    let mut exploitability = Vec::new();
    for i in 0..game.num_players() {
        let criterion = assignment.player(i);
        let current = value(game, &utilities[i], s, i, criterion)?;
        let br = best_response(game, &utilities[i], i, s, criterion, cfg)?;
        values.push(current);
        best_response_values.push(br.value);
        // A search-based best response can come out marginally below the
        // profile's own value; clamp at zero.
        exploitability.push((br.value - current).max(0.0));
    }
    let is_epsilon_ne = exploitability.iter().all(|&e| e <= epsilon);
    Ok(VerificationReport {
        exploitability,
        values,
        best_response_values,
        is_epsilon_ne,
        epsilon,
        assignment: assignment.clone(),
        ser_lower_bound: assignment.criteria().contains(&Criterion::Ser),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedSearchConfig {
    /// Subdivisions per player simplex for the profile scan.
    pub grid: usize,
    /// Profiles within this L-infinity distance are merged, keeping the one
    /// with lower exploitability.
    pub dedup_radius: f64,
    /// Certification threshold.
    pub epsilon: f64,
    /// Best-response search used for the final certification and during
    /// candidate refinement.
    pub search: SearchConfig,
    /// Exploitability evaluations spent refining each candidate.
    pub refine_budget: usize,
    /// Candidates kept for refinement, lowest scan exploitability first.
    pub max_candidates: usize,
}

impl Default for MixedSearchConfig {
    fn default() -> Self {
        Self {
            grid: 20,
            dedup_radius: 0.05,
            epsilon: 1e-6,
            search: SearchConfig::default(),
            refine_budget: 150,
            max_candidates: 24,
        }
    }
}

fn profile_distance(a: &StrategyProfile, b: &StrategyProfile) -> f64 {
    a.strategies()
        .iter()
        .zip(b.strategies())
        .flat_map(|(x, y)| x.probs().iter().zip(y.probs()))
        .map(|(&p, &q)| (p - q).abs())
        .fold(0.0, f64::max)
}

/// Grid scan plus local refinement for mixed epsilon-NE in 2-player games.
///
/// Returns certified profiles with their verification reports, deduplicated
/// and lexicographically sorted. The list is a certified subset: absence of
/// a profile never demonstrates non-existence.
pub fn search_mixed_ne_2p(
    game: &Monfg,
    utilities: &[UtilityExpr],
    assignment: &BlendedAssignment,
    cfg: &MixedSearchConfig,
) -> Result<Vec<(StrategyProfile, VerificationReport)>, EquilibriumError> {
    if game.num_players() != 2 {
        return Err(EquilibriumError::Unsupported(format!(
            "mixed search supports exactly 2 players, game has {}",
            game.num_players()
        )));
    }
    if game.action_counts().iter().any(|&m| m > 4) {
        return Err(EquilibriumError::Unsupported(format!(
            "mixed search supports at most 4 actions per player, game has {:?}",
            game.action_counts()
        )));
    }
    if utilities.len() != 2 {
        return Err(EquilibriumError::UtilityArityMismatch {
            got: utilities.len(),
            expected: 2,
        });
    }

    // Cheap grid-only best responses during the scan; full-quality search
    // only for refinement and final certification.
    let scan_search = SearchConfig {
        budget: 0,
        restarts: 1,
        ..cfg.search.clone()
    };
    let max_exploitability =
        |s: &StrategyProfile, search: &SearchConfig| -> Result<f64, EquilibriumError> {
            let mut worst = 0.0_f64;
            for i in 0..2 {
                let criterion = assignment.player(i);
                let current = value(game, &utilities[i], s, i, criterion)?;
                let br = best_response(game, &utilities[i], i, s, criterion, search)?;
                worst = worst.max(br.value - current);
            }
            Ok(worst)
        };

    let grids: Vec<Vec<Vec<f64>>> = (0..2)
        .map(|i| simplex_grid(game.num_actions(i), cfg.grid.max(1)))
        .collect();
    let mut scanned: Vec<(StrategyProfile, f64)> = Vec::new();
    for row in &grids[0] {
        for col in &grids[1] {
            let s = StrategyProfile::new(vec![
                MixedStrategy::new(row.clone()).expect("grid point is on the simplex"),
                MixedStrategy::new(col.clone()).expect("grid point is on the simplex"),
            ]);
            let exploitability = max_exploitability(&s, &scan_search)?;
            scanned.push((s, exploitability));
        }
    }
    scanned.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());

    // Deduplicate before capping so one basin does not crowd out another.
    let mut candidates: Vec<(StrategyProfile, f64)> = Vec::new();
    for (s, e) in scanned {
        if candidates.len() >= cfg.max_candidates {
            break;
        }
        if candidates
            .iter()
            .all(|(kept, _)| profile_distance(kept, &s) > cfg.dedup_radius)
        {
            candidates.push((s, e));
        }
    }

    let mut certified: Vec<(StrategyProfile, VerificationReport)> = Vec::new();
    for (start, _) in candidates {
        let refined = refine_profile(game, start, cfg, &max_exploitability)?;
        let report = verify_ne(game, utilities, &refined, assignment, cfg.epsilon, &cfg.search)?;
        if !report.is_epsilon_ne {
            continue;
        }
        let worst = report
            .exploitability
            .iter()
            .cloned()
            .fold(0.0_f64, f64::max);
        match certified
            .iter()
            .position(|(kept, _)| profile_distance(kept, &refined) <= cfg.dedup_radius)
        {
            Some(at) => {
                let kept_worst = certified[at]
                    .1
                    .exploitability
                    .iter()
                    .cloned()
                    .fold(0.0_f64, f64::max);
                if worst < kept_worst {
                    certified[at] = (refined, report);
                }
            }
            None => certified.push((refined, report)),
        }
    }
    certified.sort_by(|a, b| {
        let flat = |s: &StrategyProfile| -> Vec<f64> {
            s.strategies()
                .iter()
                .flat_map(|m| m.probs().iter().copied())
                .collect()
        };
        flat(&a.0).partial_cmp(&flat(&b.0)).unwrap()
    });
    Ok(certified)
}

/// Pattern search over the product of simplices minimizing the (full-search)
/// maximum exploitability.
fn refine_profile(
    game: &Monfg,
    start: StrategyProfile,
    cfg: &MixedSearchConfig,
    max_exploitability: &dyn Fn(&StrategyProfile, &SearchConfig) -> Result<f64, EquilibriumError>,
) -> Result<StrategyProfile, EquilibriumError> {
    let mut best = start;
    let mut best_value = max_exploitability(&best, &cfg.search)?;
    let mut step = 1.0 / cfg.grid.max(1) as f64;
    let mut evals = 0;
    while step >= MIN_REFINEMENT_STEP && evals < cfg.refine_budget && best_value > 0.0 {
        let mut improved = false;
        'moves: for player in 0..2 {
            let m = game.num_actions(player);
            for from in 0..m {
                for to in 0..m {
                    if from == to || best.player(player).probs()[from] == 0.0 {
                        continue;
                    }
                    let mut probs = best.player(player).probs().to_vec();
                    let shift = step.min(probs[from]);
                    probs[from] -= shift;
                    probs[to] += shift;
                    let candidate = best.with_player(
                        player,
                        MixedStrategy::new(probs).expect("refinement stays on simplex"),
                    );
                    if evals >= cfg.refine_budget {
                        break 'moves;
                    }
                    let candidate_value = max_exploitability(&candidate, &cfg.search)?;
                    evals += 1;
                    if candidate_value < best_value {
                        best = candidate;
                        best_value = candidate_value;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(best)
}
