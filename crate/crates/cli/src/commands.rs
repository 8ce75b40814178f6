use crate::args::*;
use crate::corpus::{load_set, takagi_family_for};
use crate::criteria::Faults;
use crate::output::{read_table, sink, write_json, Table};
use crate::suite::{pipeline_paper_suite, SuiteOptions};
use anyhow::{anyhow, bail, Context, Result};
use lipwidth_core::carl::{
    carl_index, check_carl_consistency, entropy_upper_from_nn_error, entropy_upper_from_width, nn_lower_bound_deep,
    nn_lower_bound_shallow, nn_lower_rate_deep, nn_lower_rate_shallow,
};
use lipwidth_core::entropy::entropy_profile;
use lipwidth_core::lipbounds::{deep_bound_for, empirical_lipschitz, shallow_bound};
use lipwidth_core::spaces::{tensor_nodes, uniform_nodes};
use lipwidth_core::takagi::{build_takagi_network, hat, tail_bound};
use lipwidth_core::widths::{linear_family, polyline_family, width_upper};
use lipwidth_core::{
    ActKind, Activation, ActivationSpec, BoundFamily, EmbeddingConstant, EntropyBracket, EntropyProfile, Layout,
    Method, NetRegime, RateFunction, RateKind, SolveMode, SolverConfig, TakagiSpec, WidthRecord,
};
use serde::Deserialize;
use serde_json::json;
use std::io::Write;

/// What a successful run found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A consistency check or the suite reported failures.
    Violations,
}

pub fn run(cli: &Cli) -> Result<Status> {
    let mut out = sink(cli.out.as_deref())?;
    let status = match &cli.command {
        Command::Lipbound(a) => lipbound(a, cli.seed, &mut *out),
        Command::Entropy(a) => entropy(a, cli.format, &mut *out),
        Command::Width(a) => width(a, cli.format, &mut *out),
        Command::Carl { command } => carl(command, &mut *out),
        Command::Takagi(a) => takagi(a, &mut *out),
        Command::Suite(a) => suite(a, &mut *out),
    }?;
    out.flush()?;
    Ok(status)
}

fn lipbound(a: &LipboundArgs, seed: u64, out: &mut dyn Write) -> Result<Status> {
    let act = match a.act {
        ActArg::Relu => Activation::Relu,
        ActArg::Sigmoidal => Activation::sigmoidal(a.lipschitz)?,
    };
    let (cert, depth) = match a.regime {
        RegimeArg::Deep => (deep_bound_for(a.d, a.width, act, a.w, a.n)?, a.n),
        RegimeArg::Shallow => {
            let kind = if act == Activation::Relu { ActKind::Relu } else { ActKind::Sigmoidal };
            (shallow_bound(a.d, a.width, act.lipschitz(), a.w, kind, EmbeddingConstant(a.c0))?, 1)
        }
    };
    let axis = uniform_nodes(a.grid);
    let grid = tensor_nodes(&vec![axis; a.d]);
    let layout = Layout::new(a.d, a.width, depth)?;
    let emp = empirical_lipschitz(layout, &ActivationSpec::Uniform(act), a.w, a.trials, &grid, seed)?;
    let report = json!({
        "regime": cert.regime,
        "params": {
            "d": a.d, "W": a.width, "n": depth, "w": a.w, "L": act.lipschitz(), "c0": a.c0,
            "trials": a.trials, "grid": a.grid, "seed": seed,
        },
        "L_recursion": cert.value,
        "L_closed_form": cert.closed_form,
        "L_empirical": emp,
        "recursion_trace": cert.recursion_trace,
    });
    write_json(&report, out)?;
    Ok(Status::Ok)
}

fn entropy(a: &EntropyArgs, format: Format, out: &mut dyn Write) -> Result<Status> {
    let set = load_set(&a.set)?;
    let mode = match a.mode {
        ModeArg::Auto => SolveMode::Auto,
        ModeArg::Exact => SolveMode::Exact,
        ModeArg::Greedy => SolveMode::Greedy,
    };
    let cfg = SolverConfig { exact_cap: a.exact_cap, greedy_cap: a.greedy_cap, tol: a.tol };
    let prof = entropy_profile(&set, a.n_max, mode, &cfg)?;
    match format {
        Format::Json => write_json(&prof, out)?,
        Format::Csv => {
            let mut t = Table::new(
                format!(
                    "entropy numbers of {} (|K| = {}) in its own norm; lower <= eps_n <= upper, 2^n balls, free centers",
                    set.label(),
                    set.len()
                ),
                &["n", "lower", "upper", "method"],
            );
            for e in prof.entries() {
                t.push(vec![(e.n as u64).into(), e.lower.into(), e.upper.into(), e.method_tag().into()]);
            }
            t.write_to(out)?;
        }
    }
    Ok(Status::Ok)
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CustomFamily {
    Linear { offset: Vec<f64>, columns: Vec<Vec<f64>> },
    Polyline { vertices: Vec<Vec<f64>> },
}

fn width(a: &WidthArgs, format: Format, out: &mut dyn Write) -> Result<Status> {
    let set = load_set(&a.set)?;
    let pars = match a.family {
        FamilyArg::Takagi => a.m.iter().map(|&m| takagi_family_for(&set, m)).collect::<Result<Vec<_>>>()?,
        FamilyArg::CustomJson => {
            let path = a.family_file.as_ref().ok_or_else(|| anyhow!("--family custom-json needs --family-file"))?;
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let fam: CustomFamily = serde_json::from_str(&text).context("bad family json")?;
            let norm = set.norm().clone();
            vec![match fam {
                CustomFamily::Linear { offset, columns } => linear_family(offset, columns, norm)?,
                CustomFamily::Polyline { vertices } => polyline_family(vertices, norm)?,
            }]
        }
    };
    if let Some(g) = a.gamma {
        if let Some(p) = pars.iter().find(|p| p.constant() > g) {
            return Err(lipwidth_core::Error::Domain(format!(
                "{} has Lipschitz constant {} above --gamma {g}",
                p.description(),
                p.constant()
            ))
            .into());
        }
    }
    let estimates = pars.iter().map(|p| width_upper(&set, p, a.grid_delta)).collect::<lipwidth_core::Result<Vec<_>>>()?;
    match format {
        Format::Json => write_json(&estimates, out)?,
        Format::Csv => {
            let mut t = Table::new(
                format!(
                    "Lipschitz-width upper bounds d_n^gamma({}) <= upper, lattice half-spacing delta, norm of the set",
                    set.label()
                ),
                &["n", "gamma", "upper", "delta"],
            );
            for e in &estimates {
                t.push(vec![e.n.into(), e.gamma.into(), e.upper.into(), e.delta.into()]);
            }
            t.write_to(out)?;
        }
    }
    Ok(Status::Ok)
}

fn parse_rate(text: &str) -> Result<RateFunction> {
    let kind: RateKind = serde_json::from_str(text).context("bad rate json")?;
    Ok(match kind {
        RateKind::PolyLog { alpha, beta } => RateFunction::polylog(alpha, beta)?,
        RateKind::LogInv { alpha } => RateFunction::loginv(alpha)?,
        RateKind::Expo { c, a, log_power } => RateFunction::expo_log(c, a, log_power)?,
    })
}

fn parse_wfam(text: &str) -> Result<BoundFamily> {
    let fam: BoundFamily = serde_json::from_str(text).context("bad bound-family json")?;
    Ok(match fam {
        BoundFamily::Constant { c } => BoundFamily::constant(c)?,
        BoundFamily::Polynomial { c, delta } => BoundFamily::polynomial(c, delta)?,
        BoundFamily::Exponential { c, rate, nu } => BoundFamily::exponential(c, rate, nu)?,
    })
}

fn regime(r: RegimeArg) -> NetRegime {
    match r {
        RegimeArg::Deep => NetRegime::Deep,
        RegimeArg::Shallow => NetRegime::Shallow,
    }
}

fn carl(cmd: &CarlCommand, out: &mut dyn Write) -> Result<Status> {
    match cmd {
        CarlCommand::Index { m, gamma, delta } => write_json(&carl_index(*m, *gamma, *delta)?, out)?,
        CarlCommand::LowerDeep { rate, wfam, n, lw } => {
            let (r, f) = (parse_rate(rate)?, parse_wfam(wfam)?);
            let value = nn_lower_bound_deep(&r, &f, *n, *lw)?;
            write_json(&json!({ "rate": nn_lower_rate_deep(&r, &f)?, "n": n, "value": value }), out)?;
        }
        CarlCommand::LowerShallow { rate, wfam, width } => {
            let (r, f) = (parse_rate(rate)?, parse_wfam(wfam)?);
            let value = nn_lower_bound_shallow(&r, &f, *width)?;
            write_json(&json!({ "rate": nn_lower_rate_shallow(&r, &f)?, "W": width, "value": value }), out)?;
        }
        CarlCommand::EntropyFromWidth { rate, p, q } => {
            write_json(&entropy_upper_from_width(&parse_rate(rate)?, *p, *q)?, out)?;
        }
        CarlCommand::EntropyFromNn { rate, wfam, regime: r } => {
            write_json(&entropy_upper_from_nn_error(&parse_rate(rate)?, &parse_wfam(wfam)?, regime(*r))?, out)?;
        }
        CarlCommand::Consistency { entropy, widths, cardinality } => {
            let profile = read_profile(entropy, *cardinality)?;
            let records = read_widths(widths)?;
            let report = check_carl_consistency(&profile, &records);
            write_json(&report, out)?;
            if !report.is_clean() {
                return Ok(Status::Violations);
            }
        }
    }
    Ok(Status::Ok)
}

fn column(header: &[String], name: &str) -> Result<usize> {
    header.iter().position(|h| h == name).ok_or_else(|| anyhow!("missing column {name}"))
}

fn real(s: &str) -> Result<f64> {
    s.parse::<f64>().with_context(|| format!("not a number: {s}"))
}

fn parse_methods(tag: &str) -> Result<(Method, Method)> {
    let (lo, hi) = tag.split_once('/').unwrap_or((tag, tag));
    let parse = |s: &str| Method::parse(s).ok_or_else(|| anyhow!("unknown method {s}"));
    Ok((parse(lo)?, parse(hi)?))
}

pub fn read_profile(path: &std::path::Path, cardinality: Option<usize>) -> Result<EntropyProfile> {
    let (header, rows) = read_table(path)?;
    let (n, lo, hi, me) = (column(&header, "n")?, column(&header, "lower")?, column(&header, "upper")?, column(&header, "method")?);
    let mut entries = Vec::with_capacity(rows.len());
    for r in &rows {
        let (lower_method, upper_method) = parse_methods(&r[me])?;
        entries.push(EntropyBracket {
            n: r[n].parse().with_context(|| format!("bad index {}", r[n]))?,
            lower: real(&r[lo])?,
            upper: real(&r[hi])?,
            lower_method,
            upper_method,
        });
    }
    Ok(EntropyProfile::new(entries, cardinality)?)
}

pub fn read_widths(path: &std::path::Path) -> Result<Vec<WidthRecord>> {
    let (header, rows) = read_table(path)?;
    let (n, g, u) = (column(&header, "n")?, column(&header, "gamma")?, column(&header, "upper")?);
    rows.iter()
        .map(|r| {
            Ok(WidthRecord {
                m: r[n].parse().with_context(|| format!("bad dimension {}", r[n]))?,
                gamma: real(&r[g])?,
                upper: real(&r[u])?,
            })
        })
        .collect()
}

fn takagi(a: &TakagiArgs, out: &mut dyn Write) -> Result<Status> {
    let spec = TakagiSpec::from_lambda(a.lambda, a.n)?;
    if a.grid < 2 {
        bail!(lipwidth_core::Error::Input("--grid needs at least 2 nodes".into()));
    }
    let nodes = uniform_nodes(a.grid);
    match a.emit {
        EmitArg::Net => writeln!(out, "{}", build_takagi_network(&spec)?.net.to_json())?,
        EmitArg::Values => {
            let net = build_takagi_network(&spec)?;
            let mut t = Table::new(
                format!("psi_n(t) = sum_(k<=n) lambda^-k H^k(t), lambda = {}, n = {}; network = width-3 depth-n net", a.lambda, a.n),
                &["t", "psi", "network"],
            );
            let mut g: Vec<f64> = nodes.clone();
            let mut sums = vec![0.0; nodes.len()];
            for c in spec.coefficients() {
                for (s, v) in sums.iter_mut().zip(g.iter_mut()) {
                    *v = hat(*v);
                    *s += c * *v;
                }
            }
            for (t_i, s) in nodes.iter().zip(&sums) {
                t.push(vec![(*t_i).into(), (*s).into(), net.net.evaluate(&[*t_i])?.into()]);
            }
            t.write_to(out)?;
        }
        EmitArg::ErrorCurve => {
            // a reference sum of n + 64 terms; the measured error is the partial tail
            let total = a.n + 64;
            let reference = TakagiSpec::from_lambda(a.lambda, total)?;
            let c = reference.coefficients();
            let mut tails = vec![vec![0.0; nodes.len()]; total + 1];
            let mut iterates = vec![nodes.clone()];
            for k in 1..=total {
                let prev = &iterates[k - 1];
                iterates.push(prev.iter().map(|&v| hat(v)).collect());
            }
            for k in (1..=total).rev() {
                let (head, rest) = tails.split_at_mut(k);
                for i in 0..nodes.len() {
                    head[k - 1][i] = rest[0][i] + c[k - 1] * iterates[k][i];
                }
            }
            let mut t = Table::new(
                format!("sup over {} nodes of |f_lambda - psi_n|, lambda = {}; tail_bound = |lambda|^-n/(|lambda|-1)", a.grid, a.lambda),
                &["n", "sup_error", "tail_bound"],
            );
            for n in 1..=a.n {
                let err = tails[n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
                t.push(vec![n.into(), err.into(), tail_bound(a.lambda, n)?.into()]);
            }
            t.write_to(out)?;
        }
    }
    Ok(Status::Ok)
}

fn suite(a: &SuiteArgs, out: &mut dyn Write) -> Result<Status> {
    let opts = SuiteOptions { quick: a.quick, faults: Faults { corrupt_takagi: a.inject_fault == Some(FaultArg::Takagi) } };
    let report = pipeline_paper_suite(opts, |o, elapsed| {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        eprintln!("[{tag}] {:>2} {} ({:.2} s): {}", o.id, o.name, elapsed.as_secs_f64(), o.detail);
    });
    write_json(&report, out)?;
    Ok(if report.passed { Status::Ok } else { Status::Violations })
}
