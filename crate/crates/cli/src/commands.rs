//! Command implementations shared by both arithmetic modes.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use endnet_core::analytics::{
    complete_graph_conditions, empty_graph_stable, natural_cliques, status_cstar,
    status_max_cliques, ThresholdReport,
};
use endnet_core::dynamics::{simulate_revision, uncoordinated_search, RevisionConfig};
use endnet_core::equilibrium::{finite_nash, lq_nash_on_graph};
use endnet_core::games::{
    make_nonexistence_example, GroupMatchGame, LqPeerGame, StatusGame, TableGame,
};
use endnet_core::model::{payoff_vector, LinkFn};
use endnet_core::stability::{check, enumerate_stable_with, Concept};
use endnet_core::structure::{
    derive_orders, find_overlapping_clique_order, game_taxonomy, is_nested_split_graph,
    verify_stable_structure, ActionLink, OrderRelation, SpilloverSign,
};
use endnet_core::{ActionProfile, Error as CoreError, GameSpec, Graph, Outcome, Ratio64, Rational};

use crate::config::{CommandKind, DynamicsKind, FamilyConfig, GraphSpec, Mode, RunConfig};
use crate::export::{edge_list, graph_dot, players_csv, PlayerLabels};
use crate::report::{config_hash, pretty_all, value_tuple, Report, ReportScalar};

/// Failure modes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad input or configuration: exit 2.
    Validation(String),
    /// Problem too large for the guarded algorithms: exit 3.
    SizeGuard(String),
    /// Filesystem trouble: exit 1.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::SizeGuard(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::SizeGuard(m) | CliError::Io(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::SizeGuard(m) => CliError::SizeGuard(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn io_err(e: std::io::Error, path: &Path) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub struct RunContext {
    pub command: CommandKind,
    pub config: RunConfig,
    pub config_text: String,
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub jobs: usize,
}

/// Runs the command and returns the rendered report (also written to
/// `report.txt` in the output directory).
pub fn run(ctx: &RunContext) -> Result<String, CliError> {
    match ctx.config.mode {
        Mode::Exact => run_typed::<Rational>(ctx),
        Mode::Tolerance => run_typed::<f64>(ctx),
    }
}

/// Everything the commands need about the constructed game.
struct Built<T: ReportScalar> {
    spec: GameSpec<T>,
    lq: Option<LqPeerGame<T>>,
    status: Option<StatusGame<T>>,
    group: Option<GroupMatchGame<T>>,
    /// Per-player incentive annotations for exports, when the family has
    /// them.
    b_labels: Option<Vec<String>>,
}

fn build_game<T: ReportScalar>(family: &FamilyConfig) -> Result<Built<T>, CliError> {
    match family {
        FamilyConfig::Lq { b, alpha } => {
            let lq = LqPeerGame::<T>::from_ratios(b, *alpha)?;
            let labels = b.iter().map(|r| r.to_string()).collect();
            Ok(Built {
                spec: lq.game_spec(),
                lq: Some(lq),
                status: None,
                group: None,
                b_labels: Some(labels),
            })
        }
        FamilyConfig::Status { n, b, delta } => {
            let status = StatusGame::<T>::new(*n, *b, *delta)?;
            let labels = vec![b.to_string(); *n];
            Ok(Built {
                spec: status.game_spec(),
                lq: None,
                status: Some(status),
                group: None,
                b_labels: Some(labels),
            })
        }
        FamilyConfig::Table { grid, v, g } => {
            let to_vec = |rows: &Vec<Vec<Ratio64>>| -> Vec<Vec<T>> {
                rows.iter()
                    .map(|row| row.iter().map(Ratio64::to_scalar).collect())
                    .collect()
            };
            let table = TableGame::new(
                grid.iter().map(Ratio64::to_scalar).collect(),
                to_vec(v),
                to_vec(g),
            )?;
            Ok(Built {
                spec: table.game_spec(),
                lq: None,
                status: None,
                group: None,
                b_labels: None,
            })
        }
        FamilyConfig::Nonexistence => Ok(Built {
            spec: make_nonexistence_example::<T>(),
            lq: None,
            status: None,
            group: None,
            b_labels: None,
        }),
        FamilyConfig::GroupMatch {
            types,
            theta,
            alpha,
            interval,
        } => {
            let thetas: Vec<T> = theta.iter().map(Ratio64::to_scalar).collect();
            let alpha_t: T = alpha.to_scalar();
            let v = {
                let thetas = thetas.clone();
                Arc::new(move |x: &T, t: usize| thetas[t].clone() * x.clone() - x.sq().half())
            };
            let g: LinkFn<T> = {
                let alpha_t = alpha_t.clone();
                Arc::new(move |x: &T, y: &T| {
                    alpha_t.clone() * x.clone() * y.clone() - x.sq().half()
                })
            };
            let group = GroupMatchGame::new(
                types.clone(),
                v,
                g,
                (interval.0.to_scalar(), interval.1.to_scalar()),
            )?;
            let labels = types.iter().map(|&t| theta[t].to_string()).collect();
            Ok(Built {
                spec: group.game_spec(),
                lq: None,
                status: None,
                group: Some(group),
                b_labels: Some(labels),
            })
        }
    }
}

fn build_graph(spec: &Option<GraphSpec>, n: usize) -> Result<Option<Graph>, CliError> {
    Ok(match spec {
        None => None,
        Some(GraphSpec::Empty) => Some(Graph::empty(n)?),
        Some(GraphSpec::Complete) => Some(Graph::complete(n)?),
        Some(GraphSpec::Edges(edges)) => Some(Graph::from_edges(n, edges)?),
    })
}

fn graph_summary(graph: &Graph) -> String {
    if graph.is_complete() && graph.n() > 1 {
        format!("complete ({} edges)", graph.edge_count())
    } else if graph.is_empty_graph() {
        "empty".into()
    } else {
        graph
            .edges()
            .iter()
            .map(|(i, j)| format!("{}-{}", i + 1, j + 1))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn write_out(ctx: &RunContext, name: &str, contents: &str) -> Result<(), CliError> {
    let path = ctx.out_dir.join(name);
    fs::write(&path, contents).map_err(|e| io_err(e, &path))
}

fn header(ctx: &RunContext, report: &mut Report) {
    report.push("# endnet report");
    report.push(format!("version = {}", env!("CARGO_PKG_VERSION")));
    report.push(format!("config = {}", ctx.config_path.display()));
    report.push(format!(
        "config-hash = {:016x}",
        config_hash(&ctx.config_text)
    ));
    report.push(format!("command = {}", ctx.command.name()));
    report.push(format!("family = {}", ctx.config.family.name()));
    report.push(format!(
        "mode = {}",
        if matches!(ctx.config.mode, Mode::Exact) {
            "exact"
        } else {
            "tolerance"
        }
    ));
    report.push(format!("concept = {}", concept_name(ctx.config.concept)));
    if let Some(seed) = ctx.config.seed {
        report.push(format!("seed = {seed}"));
    }
    report.push(format!("jobs = {}", ctx.jobs));
    report.blank();
}

fn concept_name(concept: Concept) -> &'static str {
    match concept {
        Concept::Pairwise => "pairwise",
        Concept::StrictPairwise => "strict",
        Concept::PairwiseNash => "pns",
    }
}

fn labels_for<T: ReportScalar>(built: &Built<T>, outcome: &Outcome<T>) -> PlayerLabels {
    PlayerLabels {
        b: built.b_labels.clone(),
        actions: Some(pretty_all(outcome.profile().values())),
        payoffs: Some(pretty_all(&payoff_vector(&built.spec, outcome))),
    }
}

fn run_typed<T: ReportScalar>(ctx: &RunContext) -> Result<String, CliError> {
    fs::create_dir_all(&ctx.out_dir).map_err(|e| io_err(e, &ctx.out_dir))?;
    let built = build_game::<T>(&ctx.config.family)?;
    let mut report = Report::new();
    header(ctx, &mut report);
    match ctx.command {
        CommandKind::Solve => solve(ctx, &built, &mut report)?,
        CommandKind::Enumerate => enumerate(ctx, &built, &mut report)?,
        CommandKind::Classify => classify(ctx, &built, &mut report)?,
        CommandKind::Dynamics => dynamics(ctx, &built, &mut report)?,
        CommandKind::Thresholds => thresholds(ctx, &built, &mut report)?,
    }
    let text = report.text();
    write_out(ctx, "report.txt", &text)?;
    Ok(text)
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn solve<T: ReportScalar>(
    ctx: &RunContext,
    built: &Built<T>,
    report: &mut Report,
) -> Result<(), CliError> {
    let n = built.spec.n();
    let graph = build_graph(&ctx.config.graph, n)?
        .ok_or_else(|| CliError::Validation("solve needs `graph` or `edges`".into()))?;
    let outcomes: Vec<Outcome<T>> = if let Some(lq) = &built.lq {
        vec![Outcome::new(graph, lq_nash_on_graph(lq, &graph)?)?]
    } else if built.spec.grid().is_some() {
        finite_nash(&built.spec, &graph)?
            .into_iter()
            .map(|p| Outcome::new(graph, p))
            .collect::<Result<_, _>>()?
    } else {
        return Err(CliError::Validation(
            "solve supports linear-quadratic and grid games".into(),
        ));
    };
    report.push(format!("graph = {}", graph_summary(&graph)));
    report.push(format!("equilibria = {}", outcomes.len()));
    for (k, outcome) in outcomes.iter().enumerate() {
        report.push(format!(
            "equilibrium {}: s = {}",
            k + 1,
            value_tuple(outcome.profile().values())
        ));
        report.push(format!(
            "  u = {}",
            value_tuple(&payoff_vector(&built.spec, outcome))
        ));
    }
    if let Some(first) = outcomes.first() {
        let labels = labels_for(built, first);
        write_out(ctx, "graph.dot", &graph_dot(&graph, &labels))?;
        write_out(ctx, "edges.txt", &edge_list(&graph))?;
        write_out(ctx, "players.csv", &players_csv(&graph, &labels))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------

fn enumerate<T: ReportScalar>(
    ctx: &RunContext,
    built: &Built<T>,
    report: &mut Report,
) -> Result<(), CliError> {
    let outcomes = enumerate_stable_with(&built.spec, ctx.config.concept, ctx.jobs)?;
    report.push(format!("stable outcomes = {}", outcomes.len()));
    let mut csv = String::from("outcome,graph,actions,payoffs\n");
    for (k, outcome) in outcomes.iter().enumerate() {
        let payoffs = payoff_vector(&built.spec, outcome);
        report.blank();
        report.push(format!(
            "outcome {}: graph = {}",
            k + 1,
            graph_summary(outcome.graph())
        ));
        report.push(format!("  s = {}", value_tuple(outcome.profile().values())));
        report.push(format!("  u = {}", value_tuple(&payoffs)));
        csv.push_str(&format!(
            "{},{},{},{}\n",
            k + 1,
            outcome
                .graph()
                .edges()
                .iter()
                .map(|(i, j)| format!("{}-{}", i + 1, j + 1))
                .collect::<Vec<_>>()
                .join(";"),
            pretty_all(outcome.profile().values()).join(";"),
            pretty_all(&payoffs).join(";"),
        ));
        let labels = labels_for(built, outcome);
        write_out(
            ctx,
            &format!("graph-{}.dot", k + 1),
            &graph_dot(outcome.graph(), &labels),
        )?;
    }
    write_out(ctx, "outcomes.csv", &csv)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

fn classify_outcome<T: ReportScalar>(
    ctx: &RunContext,
    built: &Built<T>,
) -> Result<Outcome<T>, CliError> {
    let n = built.spec.n();
    if let (Some(status), Some(partition)) = (&built.status, &ctx.config.partition) {
        return Ok(status.max_equilibrium(partition)?);
    }
    let graph = build_graph(&ctx.config.graph, n)?.ok_or_else(|| {
        CliError::Validation("classify needs `graph`/`edges` or a status `partition`".into())
    })?;
    let profile = match (&ctx.config.actions, &built.lq) {
        (Some(actions), _) => {
            if actions.len() != n {
                return Err(CliError::Validation(format!(
                    "expected {n} actions, found {}",
                    actions.len()
                )));
            }
            let values: Vec<T> = actions.iter().map(Ratio64::to_scalar).collect();
            match built.spec.grid() {
                Some(grid) => {
                    let indices = values
                        .iter()
                        .map(|v| {
                            grid.iter().position(|x| x == v).ok_or_else(|| {
                                CliError::Validation(format!("action {} is not a grid point", v))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    ActionProfile::on_grid(grid, indices)?
                }
                None => ActionProfile::continuous(values)?,
            }
        }
        (None, Some(lq)) => lq_nash_on_graph(lq, &graph)?,
        (None, None) => {
            return Err(CliError::Validation(
                "classify needs explicit `actions` for this family".into(),
            ))
        }
    };
    Ok(Outcome::new(graph, profile)?)
}

fn classify<T: ReportScalar>(
    ctx: &RunContext,
    built: &Built<T>,
    report: &mut Report,
) -> Result<(), CliError> {
    let outcome = classify_outcome(ctx, built)?;
    report.push(format!("graph = {}", graph_summary(outcome.graph())));
    report.push(format!("s = {}", value_tuple(outcome.profile().values())));
    report.blank();

    for concept in [
        Concept::Pairwise,
        Concept::StrictPairwise,
        Concept::PairwiseNash,
    ] {
        let verdict = check(&built.spec, &outcome, concept)?;
        report.push(format!(
            "{}: {}",
            concept_name(concept),
            if verdict.stable() {
                "stable".to_string()
            } else {
                format!("unstable ({} witnesses)", verdict.witnesses().len())
            }
        ));
    }
    report.blank();

    let nsg = is_nested_split_graph(outcome.graph());
    report.push(format!("nested split graph: {}", nsg.is_nsg));
    match find_overlapping_clique_order(outcome.graph()) {
        Ok(Some(order)) => {
            let printable: Vec<String> = order.iter().map(|p| (p + 1).to_string()).collect();
            report.push(format!(
                "ordered overlapping cliques: yes (order {})",
                printable.join(" ")
            ));
        }
        Ok(None) => report.push("ordered overlapping cliques: no"),
        Err(CoreError::SizeGuard(_)) => {
            report.push("ordered overlapping cliques: not determined (size guard)")
        }
        Err(e) => return Err(e.into()),
    }
    if let Some(class) = game_taxonomy(&built.spec) {
        report.push(format!(
            "taxonomy: {} / {}{}",
            match class.cell.action_link {
                ActionLink::Complements => "action-link complements",
                ActionLink::Substitutes => "action-link substitutes",
                ActionLink::Neither => "no single crossing in own action",
            },
            match class.cell.spillovers {
                SpilloverSign::Positive => "positive spillovers",
                SpilloverSign::Negative => "negative spillovers",
                SpilloverSign::Neither => "no single crossing in partner action",
            },
            if class.degenerate {
                " (degenerate)"
            } else {
                ""
            },
        ));
    }
    match derive_orders(&built.spec, &outcome) {
        Ok(orders) => report.push(format!(
            "in/out orders: {}",
            match orders.relation() {
                OrderRelation::Identical => "identical",
                OrderRelation::Opposed => "opposed",
                OrderRelation::Undetermined => "undetermined (ties)",
            }
        )),
        Err(e) => report.push(format!("in/out orders: unavailable ({e})")),
    }

    match verify_stable_structure(&built.spec, &outcome) {
        Ok(result) => {
            report.blank();
            for (name, ok) in &result.checks {
                report.push(format!(
                    "check {}: {}",
                    name,
                    if *ok { "ok" } else { "FAILED" }
                ));
            }
            if let Some(order) = &result.clique_order {
                let printable: Vec<String> = order.iter().map(|p| (p + 1).to_string()).collect();
                report.push(format!(
                    "structure: ordered overlapping cliques; order = action order ({})",
                    printable.join(" ")
                ));
            } else if result.passed() {
                report.push("structure: nested split graph; degrees monotone in the shared order");
            }
        }
        Err(CoreError::PreconditionFailed(m)) => {
            report.blank();
            report.push(format!("structure: not applicable ({m})"));
        }
        Err(e) => return Err(e.into()),
    }

    let labels = labels_for(built, &outcome);
    write_out(ctx, "graph.dot", &graph_dot(outcome.graph(), &labels))?;
    write_out(ctx, "edges.txt", &edge_list(outcome.graph()))?;
    write_out(ctx, "players.csv", &players_csv(outcome.graph(), &labels))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// dynamics
// ---------------------------------------------------------------------------

fn dynamics<T: ReportScalar>(
    ctx: &RunContext,
    built: &Built<T>,
    report: &mut Report,
) -> Result<(), CliError> {
    match ctx.config.kind {
        Some(DynamicsKind::Uncoordinated) => {
            let lq = built.lq.as_ref().ok_or_else(|| {
                CliError::Validation("uncoordinated dynamics applies to the lq family".into())
            })?;
            let result = uncoordinated_search(lq)?;
            report.push(format!(
                "uncoordinated stable outcomes = {}",
                result.outcomes.len()
            ));
            for (k, (outcome, path)) in result.outcomes.iter().zip(&result.paths).enumerate() {
                report.blank();
                report.push(format!(
                    "outcome {}: graph = {}",
                    k + 1,
                    graph_summary(outcome.graph())
                ));
                report.push(format!("  s = {}", value_tuple(outcome.profile().values())));
                let steps: Vec<String> = path
                    .steps
                    .iter()
                    .map(|s| format!("+{}-{}", s.added.0 + 1, s.added.1 + 1))
                    .collect();
                report.push(format!(
                    "  path from empty: {}",
                    if steps.is_empty() {
                        "(already stable)".into()
                    } else {
                        steps.join(" ")
                    }
                ));
                let labels = labels_for(built, outcome);
                write_out(
                    ctx,
                    &format!("graph-{}.dot", k + 1),
                    &graph_dot(outcome.graph(), &labels),
                )?;
            }
        }
        Some(DynamicsKind::Revision) => {
            let seed = ctx.config.seed.ok_or_else(|| {
                CliError::Validation("randomized command requires an explicit seed".into())
            })?;
            let cfg = RevisionConfig {
                lambda: ctx.config.lambda.map_or(1.0, |r| r.to_scalar::<f64>()),
                max_events: ctx.config.horizon.unwrap_or(10_000),
                seed,
                discount: ctx.config.discount.map_or(0.9, |r| r.to_scalar::<f64>()),
            };
            if cfg.lambda <= 0.0 {
                return Err(CliError::Validation("lambda must be positive".into()));
            }
            let start = default_start(built)?;
            let trace = simulate_revision(&built.spec, &start, &cfg)?;
            let mut log = Vec::new();
            trace
                .write_lines(&mut log)
                .map_err(|e| CliError::Io(e.to_string()))?;
            write_out(ctx, "trace.log", &String::from_utf8_lossy(&log))?;
            report.push(format!("events = {}", trace.events.len()));
            match &trace.absorbed {
                Some(outcome) => {
                    report.push(format!(
                        "absorbed: graph = {}, s = {}",
                        graph_summary(outcome.graph()),
                        value_tuple(outcome.profile().values())
                    ));
                }
                None => report.push("absorbed: no (horizon reached)"),
            }
            report.push(format!(
                "final state: graph = {}, s = {}",
                graph_summary(trace.final_state.graph()),
                value_tuple(trace.final_state.profile().values())
            ));
            let labels = labels_for(built, &trace.final_state);
            write_out(
                ctx,
                "graph-final.dot",
                &graph_dot(trace.final_state.graph(), &labels),
            )?;
        }
        None => {
            return Err(CliError::Validation(
                "dynamics needs `kind = uncoordinated | revision`".into(),
            ))
        }
    }
    Ok(())
}

fn default_start<T: ReportScalar>(built: &Built<T>) -> Result<Outcome<T>, CliError> {
    let n = built.spec.n();
    let empty = Graph::empty(n)?;
    let profile = if let Some(lq) = &built.lq {
        lq_nash_on_graph(lq, &empty)?
    } else if let Some(grid) = built.spec.grid() {
        ActionProfile::on_grid(grid, vec![0; n])?
    } else {
        return Err(CliError::Validation(
            "revision dynamics supports linear-quadratic and grid games".into(),
        ));
    };
    Ok(Outcome::new(empty, profile)?)
}

// ---------------------------------------------------------------------------
// thresholds
// ---------------------------------------------------------------------------

fn push_threshold<T: ReportScalar>(report: &mut Report, t: &ThresholdReport<T>) {
    report.push(format!(
        "{:<26} left = {:<12} right = {:<12} holds = {}",
        t.condition,
        t.left.pretty(),
        t.right.pretty(),
        if t.holds { "yes" } else { "no" }
    ));
}

fn thresholds<T: ReportScalar>(
    ctx: &RunContext,
    built: &Built<T>,
    report: &mut Report,
) -> Result<(), CliError> {
    match &ctx.config.family {
        FamilyConfig::Lq { .. } => {
            let lq = built.lq.as_ref().expect("family is lq");
            let empty = empty_graph_stable(lq.b(), lq.alpha())?;
            push_threshold(report, &empty.threshold);
            report.push(format!(
                "  incentives all distinct = {}; spillover floor above one half = {}",
                empty.all_b_distinct,
                empty.alpha_floor_exceeds_half()
            ));
            if lq.n() >= 2 {
                let complete = complete_graph_conditions(lq.b(), lq.alpha())?;
                push_threshold(report, &complete.exists);
                push_threshold(report, &complete.unique);
                push_threshold(report, &complete.impossible);
            }
        }
        FamilyConfig::Status { n, delta, .. } => {
            let status = built.status.as_ref().expect("family is status");
            let cstar = status_cstar(status.delta())?;
            report.push(format!("clique size gap threshold = {cstar}"));
            report.push(format!(
                "link viability: actions may differ by at most 1/delta = {}",
                (T::one() / status.delta().clone()).pretty()
            ));
            if delta.to_scalar::<f64>() >= 1.0 {
                report.push(format!(
                    "max cliques in a stable partition = {}",
                    status_max_cliques(*n, status.delta())?
                ));
            } else {
                report.push("max cliques: needs delta >= 1");
            }
        }
        FamilyConfig::GroupMatch { theta, .. } => {
            let group = built.group.as_ref().expect("family is groupmatch");
            match natural_cliques(group)? {
                Some(cliques) => {
                    report.push(format!("natural cliques = {}", cliques.blocks.len()));
                    for (k, block) in cliques.blocks.iter().enumerate() {
                        let ids: Vec<String> = block.iter().map(|t| (t + 1).to_string()).collect();
                        let optima: Vec<String> = block
                            .iter()
                            .map(|&t| {
                                let v: T = theta[t].to_scalar();
                                v.pretty()
                            })
                            .collect();
                        report.push(format!(
                            "block {}: types [{}] with private optima [{}]",
                            k + 1,
                            ids.join(", "),
                            optima.join(", ")
                        ));
                    }
                }
                None => report.push("natural cliques: none"),
            }
        }
        FamilyConfig::Table { g, .. } => {
            let table: Vec<Vec<T>> = g
                .iter()
                .map(|row| row.iter().map(Ratio64::to_scalar).collect())
                .collect();
            let class = endnet_core::structure::classify_single_crossing(&table)?;
            report.push(format!(
                "taxonomy cell: {:?} / {:?}",
                class.cell.action_link, class.cell.spillovers
            ));
        }
        FamilyConfig::Nonexistence => {
            return Err(CliError::Validation(
                "no threshold conditions for this family".into(),
            ))
        }
    }
    Ok(())
}
