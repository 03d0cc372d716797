//! The three subcommands. Each returns a human-readable report and a CSV
//! table; both are deterministic functions of the configuration.

use std::fmt::Write as _;

use avwc_core::capacity::{
    inner_max_eve, secrecy_capacity_multi_letter_bound, secrecy_capacity_single_letter,
    CapacityOptions, CapacityResult, JammerMode, PrefixSpec,
};
use avwc_core::channel::{
    closure_vertices, find_best_eavesdropper_channel, is_degraded, is_strongly_degraded, AvwcPair,
    ClosureElement, ClosureKind, ClosureWeights, DEFAULT_GRID_RESOLUTION, DEFAULT_VERTEX_CAP,
};
use avwc_core::sim::{simulate, CellMode, SimConfig, SimRecord};
use avwc_core::{Distribution, StochasticMatrix};

use crate::config::{mode_for, CapacityArgs, Command, PrefixKind, RunConfig, SimulateArgs};
use crate::spec::{load_channel, parse_distribution, ChannelSpecFile};
use crate::CliError;

/// Slack allowed when reporting the mode ordering.
pub const ORDERING_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub csv: String,
}

pub fn run(config: &RunConfig) -> Result<Output, CliError> {
    config.validate()?;
    let spec = load_channel(&config.channel)?;
    run_on(&spec, config)
}

/// Like [`run`] but with an already loaded channel file.
pub fn run_on(spec: &ChannelSpecFile, config: &RunConfig) -> Result<Output, CliError> {
    config.validate()?;
    let pair = spec.to_pair()?;
    match &config.command {
        Command::Analyze => cmd_analyze(spec, &pair, config),
        Command::Capacity(args) => cmd_capacity(spec, &pair, config, args),
        Command::Simulate(args) => cmd_simulate(spec, &pair, config, args),
    }
}

fn header(cmd: &str, spec: &ChannelSpecFile) -> String {
    format!(
        "avwc {cmd} | channel {} (|X|={} |Y|={} |Z|={} |S|={})\n",
        spec.label(),
        spec.x,
        spec.y,
        spec.z,
        spec.s
    )
}

fn text_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|p| format!("{p:.6}")).collect();
    format!("({})", parts.join(", "))
}

/// Shortest round-trip form, `;`-separated.
fn csv_vec(v: &[f64]) -> String {
    v.iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn text_matrix(m: &StochasticMatrix, indent: &str) -> String {
    m.rows()
        .map(|r| format!("{indent}{}\n", text_vec(r)))
        .collect()
}

fn weights_text(e: &ClosureElement) -> String {
    match &e.weights {
        ClosureWeights::Convex(p) => format!("q(s) = {}", text_vec(p.probs())),
        ClosureWeights::RowConvex(t) => {
            let rows: Vec<String> = t.rows().map(text_vec).collect();
            format!("theta(s|x) = [{}]", rows.join(", "))
        }
    }
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn cmd_analyze(
    spec: &ChannelSpecFile,
    pair: &AvwcPair,
    config: &RunConfig,
) -> Result<Output, CliError> {
    let grid = config.grid.unwrap_or(DEFAULT_GRID_RESOLUTION);
    let mut text = header("analyze", spec);
    let mut rows: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: String| rows.push((k.to_string(), v));
    writeln!(text, "grid 1/{grid}, tolerance {:e}", config.tol).unwrap();

    let count = |f, kind| closure_vertices(f, kind, DEFAULT_VERTEX_CAP).map(|v| v.len());
    let counts = [
        count(pair.legit(), ClosureKind::Convex)?,
        count(pair.legit(), ClosureKind::RowConvex)?,
        count(pair.eve(), ClosureKind::Convex)?,
        count(pair.eve(), ClosureKind::RowConvex)?,
    ];
    writeln!(
        text,
        "closure vertices: W convex {}, row-convex {}; V convex {}, row-convex {}",
        counts[0], counts[1], counts[2], counts[3]
    )
    .unwrap();
    for (k, c) in [
        "w_convex_vertices",
        "w_row_convex_vertices",
        "v_convex_vertices",
        "v_row_convex_vertices",
    ]
    .iter()
    .zip(counts)
    {
        put(k, c.to_string());
    }

    for s in 0..pair.n_states() {
        let cert = is_degraded(pair.legit().state(s), pair.eve().state(s), config.tol)?;
        writeln!(
            text,
            "state {s}: V_s degraded with respect to W_s: {}",
            yes_no(cert.feasible)
        )
        .unwrap();
        put(&format!("state{s}_degraded"), cert.feasible.to_string());
    }

    let sd = is_strongly_degraded(pair, grid, config.tol)?;
    writeln!(
        text,
        "strongly degraded: {} ({} at 1/{}; {} vertex pairs, {} grid pairs checked)",
        yes_no(sd.holds),
        sd.status,
        sd.grid_resolution,
        sd.vertex_pairs_checked,
        sd.grid_pairs_checked
    )
    .unwrap();
    put("strongly_degraded", sd.holds.to_string());
    put("status", sd.status.to_string());
    put("grid_resolution", sd.grid_resolution.to_string());
    put("vertex_pairs_checked", sd.vertex_pairs_checked.to_string());
    put("grid_pairs_checked", sd.grid_pairs_checked.to_string());
    match &sd.first_failure {
        Some(f) => {
            writeln!(text, "  first failure (LP residual {:.3e}):", f.residual).unwrap();
            let rows_of =
                |t: &StochasticMatrix| t.rows().map(text_vec).collect::<Vec<_>>().join(", ");
            writeln!(text, "    Bob theta(s|x) = [{}]", rows_of(&f.theta_legit)).unwrap();
            writeln!(text, "    Eve theta(s|x) = [{}]", rows_of(&f.theta_eve)).unwrap();
            put("failure_residual", f.residual.to_string());
            put("failure_theta_legit", csv_vec(f.theta_legit.as_slice()));
            put("failure_theta_eve", csv_vec(f.theta_eve.as_slice()));
        }
        None => {
            put("failure_residual", String::new());
            put("failure_theta_legit", String::new());
            put("failure_theta_eve", String::new());
        }
    }

    let best = find_best_eavesdropper_channel(pair, grid, config.tol)?;
    match &best {
        Some(b) => {
            writeln!(text, "best eavesdropper channel: {}", weights_text(b)).unwrap();
            text.push_str(&text_matrix(&b.effective, "    "));
            put("best_eve_found", "true".into());
            put("best_eve_theta", csv_vec(&b.weight_vector()));
            put("best_eve_effective", csv_vec(b.effective.as_slice()));
        }
        None => {
            writeln!(text, "best eavesdropper channel: none").unwrap();
            put("best_eve_found", "false".into());
            put("best_eve_theta", String::new());
            put("best_eve_effective", String::new());
        }
    }

    let rows: Vec<Vec<String>> = rows.into_iter().map(|(k, v)| vec![k, v]).collect();
    Ok(Output {
        text,
        csv: csv_string(&["key", "value"], &rows)?,
    })
}

fn capacity_options(config: &RunConfig) -> CapacityOptions {
    CapacityOptions {
        grid_resolution: config.grid,
        tol: config.tol,
        ..CapacityOptions::default()
    }
}

fn prefix_spec(args: &CapacityArgs, n_inputs: usize) -> PrefixSpec {
    match args.prefix.unwrap_or(PrefixKind::Optimized) {
        PrefixKind::Identity => PrefixSpec::identity(args.k, n_inputs),
        PrefixKind::Optimized => {
            let mut spec = PrefixSpec::optimized(args.k, n_inputs);
            if let Some(psi) = args.psi {
                spec.psi_card = psi;
            }
            spec
        }
    }
}

/// Capacity results in the order of `args.modes`. Hypotheses describe the
/// pair, not the mode, so they are checked once.
pub fn capacities(
    pair: &AvwcPair,
    config: &RunConfig,
    args: &CapacityArgs,
) -> Result<Vec<CapacityResult>, CliError> {
    let base = capacity_options(config);
    let mut out: Vec<CapacityResult> = Vec::with_capacity(args.modes.len());
    for (i, &mode) in args.modes.iter().enumerate() {
        let opts = CapacityOptions {
            check_hypotheses: i == 0 && base.check_hypotheses,
            ..base.clone()
        };
        let mut res = if args.multi_letter() {
            secrecy_capacity_multi_letter_bound(
                pair,
                &prefix_spec(args, pair.n_inputs()),
                mode,
                &opts,
            )?
        } else {
            secrecy_capacity_single_letter(pair, mode, &opts)?
        };
        if let Some(first) = out.first() {
            res.hypotheses = first.hypotheses.clone();
        }
        out.push(res);
    }
    Ok(out)
}

pub fn cmd_capacity(
    spec: &ChannelSpecFile,
    pair: &AvwcPair,
    config: &RunConfig,
    args: &CapacityArgs,
) -> Result<Output, CliError> {
    let results = capacities(pair, config, args)?;
    let mut text = header("capacity", spec);
    let grid = config.grid.map_or("auto".to_string(), |g| g.to_string());
    if args.multi_letter() {
        let p = prefix_spec(args, pair.n_inputs());
        let kind = if p.rho.is_some() {
            "identity"
        } else {
            "optimized"
        };
        writeln!(
            text,
            "{kind} prefix, k = {}, |Psi| = {}, grid {grid}",
            p.k, p.psi_card
        )
        .unwrap();
    } else {
        writeln!(text, "single-letter formula, grid {grid}").unwrap();
    }

    let mut rows = Vec::new();
    for r in &results {
        writeln!(text, "\nmode {}: {:.6} bits/use", r.mode, r.value).unwrap();
        writeln!(
            text,
            "  min I(P;W) = {:.6}   max I(P;V) = {:.6}   difference = {:.6}",
            r.legit_value, r.eve_value, r.raw_difference
        )
        .unwrap();
        writeln!(text, "  input P = {}", text_vec(r.opt_input.probs())).unwrap();
        writeln!(
            text,
            "  worst Bob channel: {}",
            weights_text(&r.worst_legit)
        )
        .unwrap();
        writeln!(text, "  best Eve channel: {}", weights_text(&r.best_eve)).unwrap();
        let d = &r.diagnostics;
        writeln!(
            text,
            "  grid 1/{} ({} points), bracket [{:.6}, {:.6}]",
            d.grid_resolution, d.grid_points, d.bracket.0, d.bracket.1
        )
        .unwrap();
        if let Some(p) = &r.prefix {
            writeln!(text, "  prefix channel rho:").unwrap();
            text.push_str(&text_matrix(&p.rho, "    "));
        }
        writeln!(text, "  {}", r.hypotheses.label).unwrap();
        for f in &d.flags {
            writeln!(text, "  note: {f}").unwrap();
        }
        let opt = |b: Option<bool>| b.map_or(String::new(), |b| b.to_string());
        rows.push(vec![
            r.mode.to_string(),
            r.value.to_string(),
            r.raw_difference.to_string(),
            r.legit_value.to_string(),
            r.eve_value.to_string(),
            csv_vec(r.opt_input.probs()),
            csv_vec(&r.worst_legit.weight_vector()),
            csv_vec(&r.best_eve.weight_vector()),
            csv_vec(r.best_eve.effective.as_slice()),
            d.grid_resolution.to_string(),
            r.prefix.as_ref().map_or(1, |p| p.k).to_string(),
            r.prefix
                .as_ref()
                .map_or(String::new(), |p| p.psi_card.to_string()),
            opt(r.hypotheses.strongly_degraded),
            opt(r.hypotheses.best_eve_found),
            r.hypotheses.label.clone(),
            d.flags.join("; "),
        ]);
    }
    if let (Some(none), Some(input)) = (
        results.iter().find(|r| r.mode == JammerMode::NoSideInfo),
        results.iter().find(|r| r.mode == JammerMode::InputKnown),
    ) {
        let holds = none.value >= input.value - ORDERING_TOL;
        writeln!(
            text,
            "\nordering: C(none) = {:.6} >= C(input-known) = {:.6}: {}",
            none.value,
            input.value,
            if holds { "holds" } else { "VIOLATED" }
        )
        .unwrap();
    }
    let csv = csv_string(
        &[
            "mode",
            "value",
            "raw_difference",
            "legit_value",
            "eve_value",
            "opt_input",
            "worst_legit_weights",
            "best_eve_weights",
            "best_eve_effective",
            "grid_resolution",
            "k",
            "psi",
            "strongly_degraded",
            "best_eve_found",
            "hypotheses",
            "flags",
        ],
        &rows,
    )?;
    Ok(Output { text, csv })
}

fn cell_mode_name(m: CellMode) -> &'static str {
    match m {
        CellMode::Disjoint => "disjoint",
        CellMode::DisjointRepeating => "disjoint-repeating",
        CellMode::Shared => "shared",
    }
}

fn opt_num<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

/// Input law and Eve's channel for a simulation run.
fn simulation_input(
    pair: &AvwcPair,
    config: &RunConfig,
    args: &SimulateArgs,
) -> Result<(Distribution, StochasticMatrix, String), CliError> {
    let mode = mode_for(&args.jammer);
    if let Some(text) = &args.input {
        let p = parse_distribution(text, pair.n_inputs())?;
        let (_, best) = inner_max_eve(&p, pair.eve(), mode.closure_kind())?;
        return Ok((p, best.effective, "given".into()));
    }
    let opts = CapacityOptions {
        check_hypotheses: false,
        ..capacity_options(config)
    };
    let c = secrecy_capacity_single_letter(pair, mode, &opts)?;
    let origin = format!("optimizer for mode {mode}, C_s = {:.6}", c.value);
    Ok((c.opt_input, c.best_eve.effective, origin))
}

pub fn cmd_simulate(
    spec: &ChannelSpecFile,
    pair: &AvwcPair,
    config: &RunConfig,
    args: &SimulateArgs,
) -> Result<Output, CliError> {
    let (input, eve, origin) = simulation_input(pair, config, args)?;
    let sim = SimConfig {
        j: args.j,
        l: args.l,
        u: args.u,
        delta: args.delta,
        tau: args.tau,
        noise_samples: args.noise_samples,
        force_sampling: args.force_sampling,
        ..SimConfig::new(args.rate, args.jammer, args.trials, args.seed)
    };
    let report = simulate(pair, &input, &eve, &args.ns, &sim)?;

    let mut text = header("simulate", spec);
    let ns: Vec<String> = args.ns.iter().map(|n| n.to_string()).collect();
    writeln!(
        text,
        "config: n = [{}], rate = {}, jammer = {}, trials = {}, seed = {}, delta = {}, U = {}, J = {}, L = {}, tau = {}, noise samples = {}{}, grid = {}, tol = {:e}",
        ns.join(", "),
        args.rate,
        args.jammer.label(),
        args.trials,
        args.seed,
        args.delta.map_or("auto".into(), |d| d.to_string()),
        args.u,
        args.j.map_or("auto".into(), |j| j.to_string()),
        args.l.map_or("auto".into(), |l| l.to_string()),
        args.tau,
        args.noise_samples,
        if args.force_sampling { " (forced)" } else { "" },
        config.grid.map_or("auto".into(), |g| g.to_string()),
        config.tol,
    )
    .unwrap();
    writeln!(
        text,
        "input P = {} ({origin})",
        text_vec(report.input.probs())
    )
    .unwrap();
    writeln!(text, "Eve channel, I(P;V) = {:.6}:", report.eve_information).unwrap();
    text.push_str(&text_matrix(&report.eve_channel, "    "));

    let mut rows = Vec::new();
    for r in &report.records {
        write_record(&mut text, r);
        rows.push(csv_row(r));
    }
    let csv = csv_string(
        &[
            "n",
            "rate",
            "jammer",
            "J",
            "L",
            "U",
            "delta",
            "seed",
            "trials",
            "cell_mode",
            "exact_channel",
            "error_mean",
            "error_median",
            "error_half_width",
            "leakage_mean",
            "leakage_half_width",
            "errors",
            "leakages",
        ],
        &rows,
    )?;
    Ok(Output { text, csv })
}

fn write_record(text: &mut String, r: &SimRecord) {
    writeln!(
        text,
        "\nn = {}: J = {}, L = {}, U = {}, delta = {:.4}, cells {}, {} error evaluation",
        r.n,
        r.j,
        r.l,
        r.u,
        r.delta,
        cell_mode_name(r.cell_mode),
        if r.exact_channel { "exact" } else { "sampled" }
    )
    .unwrap();
    writeln!(
        text,
        "  max error: mean {:.4} ± {:.4}, median {:.4} over {} codes",
        r.error_mean,
        r.error_half_width,
        r.error_median,
        r.errors.len()
    )
    .unwrap();
    match (r.leakage_mean, r.leakage_half_width) {
        (Some(m), Some(h)) => {
            writeln!(text, "  leakage I(J;Z^n): mean {m:.4} ± {h:.4} bits").unwrap()
        }
        _ => writeln!(text, "  leakage: not computed").unwrap(),
    }
    writeln!(text, "  {}", r.note).unwrap();
}

fn csv_row(r: &SimRecord) -> Vec<String> {
    vec![
        r.n.to_string(),
        r.rate.to_string(),
        r.policy.label().to_string(),
        r.j.to_string(),
        r.l.to_string(),
        r.u.to_string(),
        r.delta.to_string(),
        r.seed.to_string(),
        r.errors.len().to_string(),
        cell_mode_name(r.cell_mode).to_string(),
        r.exact_channel.to_string(),
        r.error_mean.to_string(),
        r.error_median.to_string(),
        r.error_half_width.to_string(),
        opt_num(r.leakage_mean),
        opt_num(r.leakage_half_width),
        csv_vec(&r.errors),
        r.leakages.as_deref().map_or(String::new(), csv_vec),
    ]
}
