//! One runner per subcommand. Each returns the result file contents and a
//! short human summary; failed checks come back as `CliError::Verification`
//! after the result file has been written.

use std::fmt::Write as _;

use gifc_core::bounds::{subchannel_bound, triple_bound, BoundReport};
use gifc_core::multilevel::{
    exhaustive_zero_error, parse_scheme, scheme_dof, search_alphabets, user_rates, validate_scheme,
    LevelScheme, SearchCaps,
};
use gifc_core::sumset::suite::{run_suite, SuiteConfig, CSV_HEADER};
use gifc_core::{halfk_upper, parse_matrix, GainMatrix};
use serde_json::json;

use crate::config::{Command, ExperimentConfig, Format};
use crate::error::CliError;
use crate::output::{csv, emit, json_num, num, pretty_json, read};
use crate::sweep::{run_sweep, simulate_grid};

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub contents: String,
    pub summary: String,
    /// Written next to the result when requested (sweep only).
    pub metadata: Option<String>,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(contents: String, summary: String) -> Self {
        Self { contents, summary, metadata: None, failure: None }
    }
}

pub fn load_matrix(cfg: &ExperimentConfig) -> Result<GainMatrix, CliError> {
    let path = cfg.matrix_path.as_ref().ok_or_else(|| CliError::Usage("missing --matrix".into()))?;
    let text = read(path)?;
    parse_matrix(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Runs the configured command without touching the output file.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::LatticeSim => lattice_sim(cfg),
        Command::Sweep => sweep(cfg),
        Command::Bounds => bounds(cfg),
        Command::Multilevel => multilevel(cfg),
        Command::SumsetVerify => sumset_verify(cfg),
    }
}

/// Runs the command, writes its result and returns the summary.
pub fn run(cfg: &ExperimentConfig, metadata_path: Option<&std::path::Path>) -> Result<String, CliError> {
    let outcome = execute(cfg)?;
    emit(cfg.output_path.as_deref(), &outcome.contents)?;
    if let (Some(path), Some(meta)) = (metadata_path, &outcome.metadata) {
        emit(Some(path), meta)?;
    }
    match outcome.failure {
        Some(f) => Err(CliError::Verification(f)),
        None => Ok(outcome.summary),
    }
}

pub const LATTICE_HEADER: &str = "P,epsilon,user,cardinality,min_gap,p_eps_threshold,separation_ok,\
empirical_error,analytic_error_bound,fano_rate,rate_ratio";

fn lattice_sim(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let h = load_matrix(cfg)?;
    let points = simulate_grid(&h, cfg)?;
    let mut rows = Vec::new();
    let mut summary = String::new();
    for pt in &points {
        let r = &pt.report;
        for u in &r.users {
            rows.push(json!({
                "P": json_num(pt.power),
                "epsilon": json_num(cfg.epsilon),
                "user": u.user + 1,
                "cardinality": r.lattice.cardinality(),
                "min_gap": json_num(u.separation.min_gap),
                "p_eps_threshold": json_num(u.separation.threshold),
                "separation_ok": u.separation.satisfied,
                "empirical_error": json_num(u.empirical_error),
                "analytic_error_bound": json_num(r.analytic_error_bound),
                "fano_rate": json_num(u.fano_rate),
                "rate_ratio": json_num(u.rate_ratio),
            }));
        }
        let worst = r.users.iter().map(|u| u.empirical_error).fold(0.0, f64::max);
        let _ = writeln!(
            summary,
            "P={}: |C|={}, worst empirical error {} (bound {}), sum rate {} bits",
            num(pt.power),
            r.lattice.cardinality(),
            num(worst),
            num(r.analytic_error_bound),
            num(r.sum_rate())
        );
    }
    let contents = match cfg.format {
        Format::Json => pretty_json(&serde_json::Value::Array(rows)),
        Format::Csv => csv(
            LATTICE_HEADER,
            rows.iter().map(|row| {
                LATTICE_HEADER
                    .split(',')
                    .map(|k| cell(&row[k]))
                    .collect::<Vec<_>>()
                    .join(",")
            }),
        ),
    };
    Ok(Outcome::ok(contents, summary))
}

fn cell(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => num(f),
            _ => n.to_string(),
        },
        serde_json::Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn sweep(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let h = load_matrix(cfg)?;
    let result = run_sweep(&h, cfg)?;
    let mut summary = String::new();
    for r in &result.rows {
        let _ = writeln!(
            summary,
            "P={}: sum rate {} bits, ratio to ½log₂P {}",
            num(r.power),
            num(r.sum_rate),
            num(r.dof_ratio)
        );
    }
    if let Some(fit) = &result.fit {
        let _ = writeln!(summary, "fitted DoF slope {}", num(fit.slope));
    }
    Ok(Outcome {
        contents: result.render(cfg.format),
        summary,
        metadata: Some(result.metadata_json()),
        failure: None,
    })
}

pub fn bound_json(report: &BoundReport) -> serde_json::Value {
    let triples: Vec<_> = report
        .trace
        .iter()
        .map(|t| {
            json!({
                "users": t.users.map(|u| u + 1),
                "p": t.gains.p,
                "q": t.gains.q,
                "d": t.exponent,
                "rule": t.rule.name(),
                "epsilon": t.epsilon.to_string(),
            })
        })
        .collect();
    let decimal = report.decimal();
    json!({
        "users": report.users,
        "triples": triples,
        "d": report.exponent,
        "epsilon": report.epsilon.to_string(),
        "dof_upper": report.dof_upper.to_string(),
        "dof_upper_decimal": json_num(decimal.parse().expect("decimal string")),
        "half_k": halfk_upper(report.users).to_string(),
    })
}

fn bounds(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let h = load_matrix(cfg)?;
    let report = match cfg.triple {
        Some(t) => {
            if let Some(&u) = t.iter().find(|&&u| u > h.k()) {
                return Err(CliError::Usage(format!("--triple names user {u} but the matrix has {} users", h.k())));
            }
            triple_bound(&h, t.map(|u| u - 1))?
        }
        None => subchannel_bound(&h)?,
    };
    let summary = format!(
        "DoF ≤ {} = {} (d = {}, ε = {}, {} triple(s))\n",
        report.dof_upper,
        report.decimal(),
        report.exponent,
        report.epsilon,
        report.trace.len()
    );
    Ok(Outcome::ok(pretty_json(&bound_json(&report)), summary))
}

pub const MULTILEVEL_HEADER: &str =
    "levels,base,p,q,A1,A2,A3,valid,tuples,failures,zero_error,scheme_dof,sum_rate_bits";

fn multilevel(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let scheme = match &cfg.scheme_path {
        None => LevelScheme::default_scheme(cfg.levels)?,
        Some(p) => parse_scheme(&read(p)?, cfg.levels).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
    };
    let validation = validate_scheme(&scheme);
    let check = if cfg.exhaustive { Some(exhaustive_zero_error(&scheme)?) } else { None };
    let dof = scheme_dof(&scheme);
    let rates = user_rates(&scheme);
    let alphabet = |i: usize| {
        scheme.alphabet(i).iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
    };
    let row = format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        scheme.levels(),
        scheme.base(),
        scheme.gains().p,
        scheme.gains().q,
        alphabet(0),
        alphabet(1),
        alphabet(2),
        validation.valid,
        check.as_ref().map_or(String::new(), |c| c.tuples.to_string()),
        check.as_ref().map_or(String::new(), |c| c.failures.to_string()),
        check.as_ref().map_or(String::new(), |c| c.zero_error().to_string()),
        num(dof),
        num(rates.iter().sum())
    );

    let mut summary = format!("scheme {scheme}\nscheme DoF {dof:.9}\n");
    if let Some(c) = &check {
        let _ = writeln!(summary, "exhaustive check: {} tuples, {} decoding failures", c.tuples, c.failures);
    }
    if let Some(max_base) = cfg.search_max_base {
        let caps = SearchCaps { max_base, gains: scheme.gains() };
        let found = search_alphabets(caps)?;
        match &found.best {
            Some(best) => {
                let _ = writeln!(
                    summary,
                    "alphabet search (Q ≤ {max_base}, {} schemes): best DoF {:.6} with {best} (reference 1.194987)",
                    found.schemes_checked, found.best_dof
                );
            }
            None => {
                let _ = writeln!(summary, "alphabet search (Q ≤ {max_base}): no valid scheme");
            }
        }
    }

    let mut failure = None;
    if !validation.valid {
        failure = Some(format!("invalid scheme: {}", validation.diagnostics.join("; ")));
    }
    if let Some(f) = check.as_ref().and_then(|c| c.first_failure.as_ref()) {
        failure = Some(format!(
            "{} decoding failure(s); first: message {:?}, receiver {} decoded {:?}",
            check.as_ref().map_or(0, |c| c.failures),
            f.message.digits,
            f.receiver,
            f.decoded
        ));
    }
    Ok(Outcome {
        contents: csv(MULTILEVEL_HEADER, [row]),
        summary,
        metadata: None,
        failure,
    })
}

fn sumset_verify(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let lemma = cfg.lemma.ok_or_else(|| CliError::Usage("missing --lemma".into()))?;
    let suite = SuiteConfig {
        lemma,
        trials: usize::try_from(cfg.trials).map_err(|_| CliError::Usage("too many trials".into()))?,
        max_card: cfg.max_card,
        seed: cfg.seed,
    };
    let rows = run_suite(&suite)?;
    let violations = rows.iter().filter(|r| !r.pass).count();
    let summary = format!("{lemma}: {} trials, {violations} violation(s)\n", rows.len());
    let failure = (violations > 0).then(|| {
        let first = rows.iter().find(|r| !r.pass).expect("a failing row");
        format!("{lemma}: {violations} violation(s), first at trial {}", first.trial)
    });
    Ok(Outcome {
        contents: csv(CSV_HEADER, rows.iter().map(|r| r.csv_line())),
        summary,
        metadata: None,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, Overrides};

    #[test]
    fn multilevel_default_passes() {
        let f = Overrides { levels: Some(2), exhaustive: Some(true), ..Overrides::default() };
        let cfg = parse_config(Command::Multilevel, None, &f).unwrap();
        let out = execute(&cfg).unwrap();
        assert!(out.failure.is_none());
        assert!(out.contents.starts_with(MULTILEVEL_HEADER));
        assert!(out.contents.contains(",true,144,0,true,"));
    }

    #[test]
    fn sumset_rows() {
        let f = Overrides {
            lemma: Some(gifc_core::sumset::suite::Lemma::Setsum),
            trials: Some(20),
            max_card: Some(10),
            ..Overrides::default()
        };
        let cfg = parse_config(Command::SumsetVerify, None, &f).unwrap();
        let out = execute(&cfg).unwrap();
        assert_eq!(out.contents.lines().count(), 21);
        assert!(out.failure.is_none());
    }

    #[test]
    fn csv_cells_from_json() {
        assert_eq!(cell(&json!(3)), "3");
        assert_eq!(cell(&json_num(4.6e-14)), "4.6e-14");
        assert_eq!(cell(&json!(true)), "true");
        assert_eq!(cell(&serde_json::Value::Null), "");
    }
}
