//! File ingestion, command implementations and machine-readable reports.
//!
//! Games travel as JSON documents (see [`GameFile`]); every command emits a
//! [`ReportDocument`] whose serialization is byte-stable for identical inputs
//! and configuration.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::criteria::{BlendedAssignment, Criterion, DEFAULT_TOL};
use crate::equilibrium::{
    best_response, psne_monfg, reduce_monfg, search_mixed_ne_2p, verify_ne, EquilibriumError,
    MixedSearchConfig, PsneConfig, PsneMode, SearchConfig,
};
use crate::game::{GameError, MixedStrategy, Monfg, StrategyProfile};
use crate::utility::{
    check_shape_violation, falsify_shape, parse_utility, BoxDomain, Shape, ShapeCounterexample,
    UtilityError, UtilityExpr,
};

/// Environment variable overriding the default comparison tolerance.
pub const TOL_ENV_VAR: &str = "MONFG_DEFAULT_TOL";

/// Exit code 2: usage or parse errors; 3: shape or validation errors;
/// 4: structurally unsupported inputs.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Unsupported(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Unsupported(_) => 4,
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<UtilityError> for CliError {
    fn from(e: UtilityError) -> Self {
        match e {
            UtilityError::Parse { .. } => CliError::Parse(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<EquilibriumError> for CliError {
    fn from(e: EquilibriumError) -> Self {
        match e {
            EquilibriumError::Unsupported(m) => CliError::Unsupported(m),
            EquilibriumError::Game(e) => e.into(),
            EquilibriumError::Utility(e) => e.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// The default scalar comparison tolerance, overridable through
/// [`TOL_ENV_VAR`].
pub fn default_tol() -> f64 {
    std::env::var(TOL_ENV_VAR)
        .ok()
        .and_then(|v| v.parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(DEFAULT_TOL)
}

/// On-disk JSON representation of a game.
///
/// `payoffs[i]` lists player i's payoff vectors for every joint action in
/// row-major order (the last player's action index varies fastest); each
/// entry is a length-`objectives` array of numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub players: usize,
    pub actions: Vec<usize>,
    pub objectives: usize,
    pub payoffs: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utilities: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
}

/// A loaded game file together with its content digest.
#[derive(Debug)]
pub struct LoadedGame {
    pub file: GameFile,
    pub digest: String,
    pub game: Monfg,
}

impl LoadedGame {
    pub fn utilities(&self) -> Result<Option<Vec<UtilityExpr>>, CliError> {
        match &self.file.utilities {
            None => Ok(None),
            Some(texts) => {
                if texts.len() != self.game.num_players() {
                    return Err(CliError::Validation(format!(
                        "game file lists {} utilities for {} players",
                        texts.len(),
                        self.game.num_players()
                    )));
                }
                let mut parsed = Vec::new();
                for (i, text) in texts.iter().enumerate() {
                    let u = parse_utility(text)
                        .map_err(|e| CliError::Parse(format!("utility for player {i}: {e}")))?;
                    if u.min_dimension() > self.game.num_objectives() {
                        return Err(CliError::Validation(format!(
                            "utility for player {i} references objective p{} but the game has {} objectives",
                            u.min_dimension(),
                            self.game.num_objectives()
                        )));
                    }
                    parsed.push(u);
                }
                Ok(Some(parsed))
            }
        }
    }

    pub fn required_utilities(&self) -> Result<Vec<UtilityExpr>, CliError> {
        self.utilities()?.ok_or_else(|| {
            CliError::Usage("this command requires \"utilities\" in the game file".into())
        })
    }

    pub fn assignment(&self) -> Result<Option<BlendedAssignment>, CliError> {
        match &self.file.criteria {
            None => Ok(None),
            Some(names) => {
                if names.len() != self.game.num_players() {
                    return Err(CliError::Validation(format!(
                        "game file lists {} criteria for {} players",
                        names.len(),
                        self.game.num_players()
                    )));
                }
                Ok(Some(parse_assignment_names(names)?))
            }
        }
    }

    fn profile_labels(&self, indices: &[usize]) -> Option<Vec<String>> {
        let labels = self.file.labels.as_ref()?;
        indices
            .iter()
            .enumerate()
            .map(|(player, &a)| labels.get(player)?.get(a).cloned())
            .collect()
    }
}

/// Reads, digests and validates a game file.
pub fn load_game(path: &Path) -> Result<LoadedGame, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let digest = format!("{:x}", Sha256::digest(&bytes));
    let file: GameFile = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if file.players != file.actions.len() {
        return Err(CliError::Validation(format!(
            "\"players\" is {} but \"actions\" has {} entries",
            file.players,
            file.actions.len()
        )));
    }
    if let Some(labels) = &file.labels {
        let shape_ok = labels.len() == file.actions.len()
            && labels.iter().zip(&file.actions).all(|(l, &m)| l.len() == m);
        if !shape_ok {
            return Err(CliError::Validation(
                "\"labels\" must list one name per action per player".into(),
            ));
        }
    }
    if let Some(names) = &file.criteria {
        for name in names {
            if Criterion::from_name(name).is_none() {
                return Err(CliError::Validation(format!(
                    "unknown criterion \"{name}\" (expected ESR or SER)"
                )));
            }
        }
    }
    let game = Monfg::new(file.actions.clone(), file.objectives, file.payoffs.clone())?;
    Ok(LoadedGame { file, digest, game })
}

/// Machine-readable command output. Timestamps are deliberately omitted so
/// identical inputs and configuration reproduce the document byte for byte.
#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub command: String,
    #[serde(rename = "inputs-digest")]
    pub inputs_digest: String,
    pub results: Value,
    pub warnings: Vec<Value>,
    pub config: Value,
}

impl ReportDocument {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Parses a strategy profile string: players separated by `;`, per-action
/// probabilities by `,` — for example `0.55,0.45;1,0`.
pub fn parse_profile(text: &str, game: &Monfg) -> Result<StrategyProfile, CliError> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != game.num_players() {
        return Err(CliError::Usage(format!(
            "profile has {} player section(s), game has {} players",
            parts.len(),
            game.num_players()
        )));
    }
    let mut strategies = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let mut probs = Vec::new();
        for token in part.split(',') {
            let p = token.trim().parse::<f64>().map_err(|_| {
                CliError::Usage(format!("profile token `{token}` is not a number"))
            })?;
            probs.push(p);
        }
        if probs.len() != game.num_actions(i) {
            return Err(CliError::Usage(format!(
                "player {i} has {} actions but the profile lists {} probabilities",
                game.num_actions(i),
                probs.len()
            )));
        }
        strategies.push(MixedStrategy::new(probs).map_err(|e| {
            CliError::Validation(format!("player {i} strategy invalid: {e}"))
        })?);
    }
    Ok(StrategyProfile::new(strategies))
}

fn parse_assignment_names(names: &[String]) -> Result<BlendedAssignment, CliError> {
    let mut criteria = Vec::new();
    for name in names {
        criteria.push(Criterion::from_name(name.trim()).ok_or_else(|| {
            CliError::Usage(format!("unknown criterion \"{name}\" (expected ESR or SER)"))
        })?);
    }
    Ok(BlendedAssignment::new(criteria))
}

/// Parses `ESR,SER,...` into a per-player assignment.
pub fn parse_assignment(text: &str, game: &Monfg) -> Result<BlendedAssignment, CliError> {
    let names: Vec<String> = text.split(',').map(|s| s.to_string()).collect();
    if names.len() != game.num_players() {
        return Err(CliError::Usage(format!(
            "assignment lists {} criteria for {} players",
            names.len(),
            game.num_players()
        )));
    }
    parse_assignment_names(&names)
}

/// Parses a box domain string `lo,hi;lo,hi;...`.
pub fn parse_box(text: &str) -> Result<BoxDomain, CliError> {
    let mut intervals = Vec::new();
    for part in text.split(';') {
        let bounds: Vec<&str> = part.split(',').collect();
        let [lo, hi] = bounds.as_slice() else {
            return Err(CliError::Usage(format!(
                "box section `{part}` must be `lo,hi`"
            )));
        };
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("box token `{t}` is not a number")))
        };
        intervals.push((parse(lo)?, parse(hi)?));
    }
    BoxDomain::new(intervals)
        .ok_or_else(|| CliError::Validation("box intervals must be finite with lo <= hi".into()))
}

fn counterexample_json(c: &ShapeCounterexample) -> Value {
    json!({
        "x1": c.x1,
        "x2": c.x2,
        "lambda": c.lambda,
        "lhs": c.lhs,
        "rhs": c.rhs,
        "violation-margin": c.violation_margin,
    })
}

fn profile_json(s: &StrategyProfile) -> Value {
    json!(s
        .strategies()
        .iter()
        .map(|m| m.probs().to_vec())
        .collect::<Vec<_>>())
}

/// Composes each player's utility with their payoffs and writes the induced
/// scalar game to `output`.
pub fn cmd_reduce(game_path: &Path, output: &Path) -> Result<ReportDocument, CliError> {
    let loaded = load_game(game_path)?;
    let utilities = loaded.required_utilities()?;
    let reduced = reduce_monfg(&loaded.game, &utilities)?;
    let nfg = reduced.nfg();
    let out_file = GameFile {
        players: nfg.num_players(),
        actions: nfg.action_counts().to_vec(),
        objectives: 1,
        payoffs: (0..nfg.num_players())
            .map(|i| nfg.payoff_tensor(i).to_vec())
            .collect(),
        utilities: None,
        criteria: None,
        labels: loaded.file.labels.clone(),
    };
    let text = serde_json::to_string_pretty(&out_file).expect("game file serializes");
    fs::write(output, text.as_bytes())
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", output.display())))?;
    Ok(ReportDocument {
        command: "reduce".into(),
        inputs_digest: loaded.digest,
        results: json!({
            "output": output.display().to_string(),
            "payoffs": out_file.payoffs,
        }),
        warnings: vec![],
        config: json!({}),
    })
}

/// PSNE of the trade-off game, optionally filtered by an all-SER
/// verification pass.
pub fn cmd_psne(
    game_path: &Path,
    mode: PsneMode,
    epsilon: f64,
    seed: u64,
    shape_trials: usize,
) -> Result<ReportDocument, CliError> {
    let loaded = load_game(game_path)?;
    let tol = default_tol();
    // Scalar games need no utilities; the identity scalarisation applies.
    let utilities = match loaded.utilities()? {
        Some(us) => us,
        None if loaded.game.num_objectives() == 1 => {
            vec![UtilityExpr::Var(0); loaded.game.num_players()]
        }
        None => {
            return Err(CliError::Usage(
                "a multi-objective game needs \"utilities\" in the game file".into(),
            ))
        }
    };
    let cfg = PsneConfig {
        tol,
        epsilon,
        shape_trials,
        seed,
        search: SearchConfig::default(),
    };
    let analysis = psne_monfg(&loaded.game, &utilities, mode, &cfg)?;
    let mode_name = match mode {
        PsneMode::TrustedQuasiconvex => "trusted",
        PsneMode::VerifiedSer => "verified",
    };
    let profiles: Vec<Value> = analysis
        .psne
        .profiles
        .iter()
        .map(|a| {
            json!({
                "indices": a.actions(),
                "labels": loaded.profile_labels(a.actions()),
            })
        })
        .collect();
    let mut warnings: Vec<Value> = analysis
        .warnings
        .iter()
        .map(|w| {
            json!({
                "kind": "not-quasiconvex",
                "player": w.player,
                "counterexample": counterexample_json(&w.counterexample),
                "note": "trade-off PSNE remain valid for ESR; validity for SER and blended assignments is not implied",
            })
        })
        .collect();
    if mode == PsneMode::VerifiedSer && profiles.is_empty() {
        warnings.push(json!({
            "kind": "empty-verified-set",
            "note": "no trade-off PSNE survived the all-SER deviation check; SER deviations are search lower bounds",
        }));
    }
    Ok(ReportDocument {
        command: "psne".into(),
        inputs_digest: loaded.digest,
        results: json!({
            "mode": mode_name,
            "psne": profiles,
            "count": analysis.psne.profiles.len(),
        }),
        warnings,
        config: json!({
            "tol": tol,
            "epsilon": epsilon,
            "seed": seed,
            "shape-trials": shape_trials,
        }),
    })
}

/// Epsilon-NE verification of an explicit profile under a criterion
/// assignment.
pub fn cmd_verify(
    game_path: &Path,
    profile_text: &str,
    assignment_text: Option<&str>,
    epsilon: f64,
) -> Result<ReportDocument, CliError> {
    let loaded = load_game(game_path)?;
    let utilities = loaded.required_utilities()?;
    let s = parse_profile(profile_text, &loaded.game)?;
    let assignment = match assignment_text {
        Some(text) => parse_assignment(text, &loaded.game)?,
        None => loaded.assignment()?.ok_or_else(|| {
            CliError::Usage(
                "no --assignment given and the game file has no \"criteria\"".into(),
            )
        })?,
    };
    let cfg = SearchConfig::default();
    let report = verify_ne(&loaded.game, &utilities, &s, &assignment, epsilon, &cfg)?;
    Ok(ReportDocument {
        command: "verify".into(),
        inputs_digest: loaded.digest,
        results: json!({
            "is-epsilon-ne": report.is_epsilon_ne,
            "epsilon": report.epsilon,
            "assignment": assignment.criteria().iter().map(|c| c.name()).collect::<Vec<_>>(),
            "values": report.values,
            "best-response-values": report.best_response_values,
            "exploitability": report.exploitability,
            "ser-exploitability-is-lower-bound": report.ser_lower_bound,
        }),
        warnings: vec![],
        config: json!({
            "grid": cfg.grid,
            "restarts": cfg.restarts,
            "budget": cfg.budget,
        }),
    })
}

/// Best response for one player against fixed opponent strategies.
#[allow(clippy::too_many_arguments)]
pub fn cmd_best_response(
    game_path: &Path,
    player: usize,
    opponent_text: &str,
    criterion: Criterion,
    grid: usize,
    restarts: usize,
    budget: usize,
) -> Result<ReportDocument, CliError> {
    let loaded = load_game(game_path)?;
    let utilities = loaded.required_utilities()?;
    if player >= loaded.game.num_players() {
        return Err(CliError::Usage(format!(
            "player {player} out of range for a {}-player game",
            loaded.game.num_players()
        )));
    }
    // The opponent string lists the other players' strategies in player
    // order; the focal player's slot is filled with a placeholder.
    let sections: Vec<&str> = if opponent_text.is_empty() {
        vec![]
    } else {
        opponent_text.split(';').collect()
    };
    if sections.len() != loaded.game.num_players() - 1 {
        return Err(CliError::Usage(format!(
            "--opponent must list {} strategy section(s), got {}",
            loaded.game.num_players() - 1,
            sections.len()
        )));
    }
    let mut full_sections = Vec::new();
    let mut others = sections.iter();
    for j in 0..loaded.game.num_players() {
        if j == player {
            let m = loaded.game.num_actions(j);
            full_sections.push(
                (0..m)
                    .map(|k| if k == 0 { "1".to_string() } else { "0".to_string() })
                    .collect::<Vec<_>>()
                    .join(","),
            );
        } else {
            full_sections.push(others.next().unwrap().to_string());
        }
    }
    let s = parse_profile(&full_sections.join(";"), &loaded.game)?;
    let cfg = SearchConfig {
        grid,
        restarts,
        budget,
    };
    let result = best_response(&loaded.game, &utilities[player], player, &s, criterion, &cfg)?;
    Ok(ReportDocument {
        command: "best-response".into(),
        inputs_digest: loaded.digest,
        results: json!({
            "player": player,
            "criterion": criterion.name(),
            "strategy": result.strategy.probs(),
            "value": result.value,
            "value-is-lower-bound": criterion == Criterion::Ser,
            "refinement-evals": result.metadata.refinement_evals,
        }),
        warnings: vec![],
        config: json!({
            "grid": grid,
            "restarts": restarts,
            "budget": budget,
        }),
    })
}

/// Grid-and-refine search for mixed epsilon-NE in 2-player games.
pub fn cmd_search_mixed(
    game_path: &Path,
    assignment_text: Option<&str>,
    epsilon: f64,
    grid: usize,
    dedup_radius: f64,
) -> Result<ReportDocument, CliError> {
    let loaded = load_game(game_path)?;
    let utilities = loaded.required_utilities()?;
    let assignment = match assignment_text {
        Some(text) => parse_assignment(text, &loaded.game)?,
        None => loaded.assignment()?.ok_or_else(|| {
            CliError::Usage(
                "no --assignment given and the game file has no \"criteria\"".into(),
            )
        })?,
    };
    let cfg = MixedSearchConfig {
        grid,
        dedup_radius,
        epsilon,
        ..MixedSearchConfig::default()
    };
    let found = search_mixed_ne_2p(&loaded.game, &utilities, &assignment, &cfg)?;
    let equilibria: Vec<Value> = found
        .iter()
        .map(|(s, report)| {
            json!({
                "profile": profile_json(s),
                "exploitability": report.exploitability,
                "values": report.values,
            })
        })
        .collect();
    Ok(ReportDocument {
        command: "search-mixed".into(),
        inputs_digest: loaded.digest,
        results: json!({
            "equilibria": equilibria,
            "count": found.len(),
            "note": "certified subset: equilibria not found within budget may still exist",
        }),
        warnings: vec![],
        config: json!({
            "grid": grid,
            "dedup-radius": dedup_radius,
            "epsilon": epsilon,
        }),
    })
}

/// Randomized falsification of a convexity class for a utility expression.
pub fn cmd_classify_utility(
    expr_text: &str,
    shape: Shape,
    box_text: Option<&str>,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<ReportDocument, CliError> {
    let u = parse_utility(expr_text)?;
    let domain = match box_text {
        Some(text) => parse_box(text)?,
        None => {
            let d = u.min_dimension().max(1);
            BoxDomain::new(vec![(-10.0, 10.0); d]).expect("static box is valid")
        }
    };
    let found = falsify_shape(&u, shape, &domain, trials, seed, tol)?;
    if let Some(c) = &found {
        // Reported counterexamples must re-validate.
        let recheck = check_shape_violation(&u, shape, &c.x1, &c.x2, c.lambda, tol)?;
        debug_assert!(recheck.is_some());
    }
    let digest = format!("{:x}", Sha256::digest(expr_text.as_bytes()));
    Ok(ReportDocument {
        command: "classify-utility".into(),
        inputs_digest: digest,
        results: json!({
            "utility": u.to_string(),
            "shape": shape.name(),
            "counterexample": found.as_ref().map(counterexample_json),
            "note": "falsification only: absence of a counterexample is not a certificate of membership",
        }),
        warnings: vec![],
        config: json!({
            "box": domain.intervals(),
            "trials": trials,
            "seed": seed,
            "tol": tol,
        }),
    })
}
