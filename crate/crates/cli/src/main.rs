//! Command-line front end for the six-state key-distribution toolkit.
//!
//! Subcommands cover the main workflows: tabulating the information
//! curves over a disturbance grid (`curves`), locating the critical
//! disturbances (`intersect`), Monte-Carlo session simulation
//! (`simulate`), chained Bell analysis (`bell`), running the constrained
//! probe search at a single disturbance (`optimize`), and sanity checks
//! of the closed-form probe constructions (`attack-verify`).
//!
//! All numeric output is printed with nine significant digits, reports
//! go to stdout as `key=value` lines, and every command is deterministic
//! for fixed flags.  Errors go to stderr with a nonzero exit status.

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use sixstate::attack::{
    build_one_bit_probe, build_optimal_probe, check_constraints, eve_conditional_states,
    to_isometry, ProbeSpec,
};
use sixstate::bell::bell_report;
use sixstate::info::{binary_entropy, i_ab, i_ae_one_bit, i_ae_two_bit};
use sixstate::optimize::{find_intersection, maximize_iae, ConstraintSet};
use sixstate::protocol::{run_session, AttackKind, SessionConfig, StateCount};
use sixstate::quantum::Basis;

#[derive(Parser)]
#[command(
    name = "sixstate",
    version,
    about = "Six-state key distribution under optimal eavesdropping: \
             curves, simulations, and Bell analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the information curves over a disturbance grid as CSV.
    Curves {
        /// Smallest disturbance in the grid.
        #[arg(long, default_value_t = 0.0)]
        d_min: f64,
        /// Largest disturbance in the grid.
        #[arg(long, default_value_t = 0.5)]
        d_max: f64,
        /// Number of grid rows (evenly spaced, endpoints included).
        #[arg(long, default_value_t = 11)]
        steps: usize,
        /// Seed for the four-state column's numerical search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the table to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate the disturbances where the defender's advantage vanishes.
    Intersect,
    /// Simulate one key-distribution session.
    Simulate {
        /// Number of transmitted signals.
        #[arg(long, default_value_t = 10_000)]
        signals: u64,
        /// Number of signal states: 4 (Z, X) or 6 (Z, X, Y).
        #[arg(long, default_value_t = 6)]
        bases: u8,
        /// Channel disturbance induced by the attack.
        #[arg(long, default_value_t = 0.0)]
        d: f64,
        /// Eavesdropping strategy.
        #[arg(long, value_enum, default_value_t = AttackArg::None)]
        attack: AttackArg,
        /// Session seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Chained Bell analysis of the attacked pair at one disturbance.
    Bell {
        /// Measurement settings per side (at least 2).
        #[arg(long, default_value_t = 2)]
        settings: usize,
        /// Channel disturbance.
        #[arg(long, default_value_t = 0.0)]
        d: f64,
        /// Seed for the direction search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the constrained probe-state search at one disturbance.
    Optimize {
        /// Channel disturbance, in (0, 0.5].
        #[arg(long)]
        d: f64,
        /// Seed for the multi-start search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verify the closed-form probe constructions at one disturbance.
    AttackVerify {
        /// Channel disturbance.
        #[arg(long, default_value_t = 0.1)]
        d: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AttackArg {
    /// Clean channel.
    None,
    /// Optimal single-qubit probe.
    Opt1,
    /// Optimal two-qubit probe.
    Opt2,
}

impl AttackArg {
    fn kind(self) -> AttackKind {
        match self {
            AttackArg::None => AttackKind::None,
            AttackArg::Opt1 => AttackKind::OptimalOneBit,
            AttackArg::Opt2 => AttackKind::OptimalTwoBit,
        }
    }

    fn label(self) -> &'static str {
        match self {
            AttackArg::None => "none",
            AttackArg::Opt1 => "opt1",
            AttackArg::Opt2 => "opt2",
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(stdout) => print!("{stdout}"),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn run(command: Command) -> anyhow::Result<String> {
    match command {
        Command::Curves {
            d_min,
            d_max,
            steps,
            seed,
            out,
        } => cmd_curves(d_min, d_max, steps, seed, out),
        Command::Intersect => cmd_intersect(),
        Command::Simulate {
            signals,
            bases,
            d,
            attack,
            seed,
        } => cmd_simulate(signals, bases, d, attack, seed),
        Command::Bell { settings, d, seed } => cmd_bell(settings, d, seed),
        Command::Optimize { d, seed } => cmd_optimize(d, seed),
        Command::AttackVerify { d } => cmd_attack_verify(d),
    }
}

/// Formats a float with nine significant digits, trimming trailing
/// zeros, in plain decimal where the magnitude allows and scientific
/// notation otherwise.  Parsing the result back gives exactly the value
/// rounded to nine significant digits.
fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let epos = sci.find('e').expect("scientific format has an exponent");
    let exp: i32 = sci[epos + 1..].parse().expect("valid exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let plain = format!("{x:.decimals$}");
        if plain.contains('.') {
            plain.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            plain
        }
    } else {
        let mantissa = sci[..epos].trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    }
}

/// Rounds a value to what nine significant digits can represent, so
/// that formatting and re-parsing is an exact round trip.
fn round_sig9(x: f64) -> f64 {
    format_sig9(x).parse().expect("formatter output is parseable")
}

/// Tabulated information curves: one row per disturbance, with the
/// values already rounded to the output precision so that the CSV
/// representation round-trips exactly.
struct CurveTable {
    rows: Vec<[f64; 5]>,
}

impl CurveTable {
    const HEADER: &'static str = "D,I_AB,I_AE_2bit,I_AE_1bit,I_AE_bb84_numeric";

    fn to_csv(&self) -> String {
        let mut text = String::from(Self::HEADER);
        text.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|v| format_sig9(*v)).collect();
            text.push_str(&fields.join(","));
            text.push('\n');
        }
        text
    }

    #[cfg(test)]
    fn from_csv(text: &str) -> anyhow::Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().context("empty table")?;
        anyhow::ensure!(
            header == Self::HEADER,
            "unexpected header line: {header:?}"
        );
        let mut rows = Vec::new();
        for (index, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            anyhow::ensure!(
                fields.len() == 5,
                "row {index} has {} fields, expected 5",
                fields.len()
            );
            let mut row = [0.0; 5];
            for (slot, field) in row.iter_mut().zip(&fields) {
                *slot = field
                    .parse()
                    .with_context(|| format!("bad number {field:?} in row {index}"))?;
            }
            rows.push(row);
        }
        Ok(CurveTable { rows })
    }
}

/// `key=value` report accumulated line by line.
#[derive(Default)]
struct Report(String);

impl Report {
    fn float(&mut self, key: &str, value: f64) {
        writeln!(self.0, "{key}={}", format_sig9(value)).expect("string write");
    }

    fn integer(&mut self, key: &str, value: u64) {
        writeln!(self.0, "{key}={value}").expect("string write");
    }

    fn text(&mut self, key: &str, value: &str) {
        writeln!(self.0, "{key}={value}").expect("string write");
    }

    fn optional(&mut self, key: &str, value: Option<f64>) {
        match value {
            Some(v) => self.float(key, v),
            None => self.text(key, "NA"),
        }
    }
}

/// Closed-form ceiling for the four-state readout information, used as
/// the printed reference next to the numerical search.
fn four_state_reference(d: f64) -> f64 {
    1.0 - binary_entropy(0.5 + (d * (1.0 - d)).sqrt())
}

fn cmd_curves(
    d_min: f64,
    d_max: f64,
    steps: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> anyhow::Result<String> {
    anyhow::ensure!(steps >= 1, "steps must be at least 1");
    anyhow::ensure!(
        d_min.is_finite() && d_max.is_finite() && d_min <= d_max,
        "invalid disturbance range [{d_min}, {d_max}]"
    );
    anyhow::ensure!(
        steps >= 2 || d_min == d_max,
        "a single-row table needs d-min equal to d-max"
    );

    let grid: Vec<f64> = if steps == 1 {
        vec![d_min]
    } else {
        (0..steps)
            .map(|i| d_min + (d_max - d_min) * i as f64 / (steps - 1) as f64)
            .collect()
    };

    // The four-state column comes from the numerical search, which is
    // the expensive part; identical grid values are computed once.
    let mut four_state_cache: BTreeMap<u64, f64> = BTreeMap::new();
    let mut rows = Vec::with_capacity(grid.len());
    for &d in &grid {
        let four_state = if d == 0.0 {
            0.0
        } else {
            match four_state_cache.get(&d.to_bits()) {
                Some(&v) => v,
                None => {
                    let result = maximize_iae(d, &ConstraintSet::bb84(), seed)
                        .with_context(|| format!("four-state search failed at d={d}"))?;
                    four_state_cache.insert(d.to_bits(), result.best_value);
                    result.best_value
                }
            }
        };
        rows.push([
            round_sig9(d),
            round_sig9(i_ab(d)?),
            round_sig9(i_ae_two_bit(d)?),
            round_sig9(i_ae_one_bit(d)?),
            round_sig9(four_state),
        ]);
    }

    let table = CurveTable { rows };
    let csv = table.to_csv();
    match out {
        Some(path) => {
            std::fs::write(&path, csv)
                .with_context(|| format!("cannot write {}", path.display()))?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

fn cmd_intersect() -> anyhow::Result<String> {
    let d_star = find_intersection(i_ab, i_ae_two_bit, 0.05, 0.45)?;
    let mut report = Report::default();
    report.float("d_star", d_star);
    report.float("bb84_reference", 0.5 * (1.0 - std::f64::consts::FRAC_1_SQRT_2));
    report.float("chsh_dc", sixstate::bell::critical_disturbance(2)?);
    Ok(report.0)
}

fn cmd_simulate(
    signals: u64,
    bases: u8,
    d: f64,
    attack: AttackArg,
    seed: u64,
) -> anyhow::Result<String> {
    let config = SessionConfig {
        n_signals: signals,
        states: StateCount::from_states(bases)?,
        disturbance: d,
        attack: attack.kind(),
        seed,
    };
    let stats = run_session(&config)?;

    let mut report = Report::default();
    report.integer("signals", signals);
    report.integer("bases", u64::from(bases));
    report.float("d", d);
    report.text("attack", attack.label());
    report.integer("seed", seed);
    report.integer("sifted_count", stats.sifted_count);
    report.float("sift_rate", stats.sift_rate);
    report.float("qber", stats.qber);
    for (basis, qber) in &stats.per_basis_qber {
        let key = match basis {
            Basis::Z => "qber_z",
            Basis::X => "qber_x",
            Basis::Y => "qber_y",
        };
        report.float(key, *qber);
    }
    report.optional("empirical_i_ab", stats.empirical_i_ab);
    report.optional("empirical_i_ae", stats.empirical_i_ae);
    Ok(report.0)
}

fn cmd_bell(settings: usize, d: f64, seed: u64) -> anyhow::Result<String> {
    let result = bell_report(d, settings, seed)?;
    let mut report = Report::default();
    report.integer("settings", settings as u64);
    report.float("d", d);
    report.float("s_q", result.s_q);
    report.float("s", result.s);
    report.float("s_c", result.s_c);
    report.float("ratio", result.s_q / result.s_c);
    report.float("d_c", result.d_c);
    Ok(report.0)
}

fn cmd_optimize(d: f64, seed: u64) -> anyhow::Result<String> {
    let six = maximize_iae(d, &ConstraintSet::six_state(), seed)?;
    let four = maximize_iae(d, &ConstraintSet::bb84(), seed)?;
    let max_residual = |residuals: &[f64]| residuals.iter().cloned().fold(0.0, f64::max);

    let mut report = Report::default();
    report.float("d", d);
    report.float("six_state_value", six.best_value);
    report.float("six_state_reference", i_ae_two_bit(d)?);
    report.float("six_state_max_residual", max_residual(&six.residuals));
    report.integer("six_state_iterations", six.iterations as u64);
    report.float("bb84_value", four.best_value);
    report.float("bb84_reference", four_state_reference(d));
    report.float("bb84_max_residual", max_residual(&four.residuals));
    report.integer("bb84_iterations", four.iterations as u64);
    Ok(report.0)
}

fn cmd_attack_verify(d: f64) -> anyhow::Result<String> {
    let two_bit = build_optimal_probe(d)?;
    let one_bit = build_one_bit_probe(d)?;

    let fidelity_error = |probe: &ProbeSpec| -> anyhow::Result<f64> {
        let mut worst: f64 = 0.0;
        for basis in Basis::ALL {
            let branches = eve_conditional_states(probe, basis)?;
            for (bit, row) in branches.iter().enumerate() {
                worst = worst.max((row[bit].probability - (1.0 - d)).abs());
            }
        }
        Ok(worst)
    };
    let isometry_deviation = |probe: &ProbeSpec| -> anyhow::Result<f64> {
        let v = to_isometry(probe)?;
        let gram = v.matrix().adjoint() * v.matrix();
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)].re - expected).abs());
                worst = worst.max(gram[(i, j)].im.abs());
            }
        }
        Ok(worst)
    };

    let checks = [
        ("two_bit_max_residual", check_constraints(&two_bit).max(), 1e-10),
        ("two_bit_fidelity_error", fidelity_error(&two_bit)?, 1e-9),
        ("two_bit_isometry_deviation", isometry_deviation(&two_bit)?, 1e-10),
        ("one_bit_max_residual", check_constraints(&one_bit).max(), 1e-10),
        ("one_bit_fidelity_error", fidelity_error(&one_bit)?, 1e-9),
        ("one_bit_isometry_deviation", isometry_deviation(&one_bit)?, 1e-10),
    ];

    let mut report = Report::default();
    report.float("d", d);
    for (key, value, threshold) in checks {
        anyhow::ensure!(
            value < threshold,
            "{key} = {value:.3e} exceeds its threshold {threshold:.1e}"
        );
        report.float(key, value);
    }
    report.text("status", "ok");
    Ok(report.0)
}
