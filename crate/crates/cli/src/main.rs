//! `tiqm`: command-line front end for the interaction-free measurement
//! simulator: echo reports, wave traces, probe ledgers, Monte Carlo tallies,
//! and closed-form sweeps, all reproducible from their flag sets.

use std::fmt::Write as _;
use std::process::ExitCode;

use tiqm_core::report::{sig12, trace_line};
use tiqm_core::{
    build_ev, build_zeno, echo_report, monte_carlo, parse_named, probe_report, run_handshake,
    serialize, sweep_csv, tally_csv, to_network, EngineConfig, Handshake, OpticalNetwork,
    PolarizedAmplitude,
};

const USAGE: &str = "\
usage: tiqm <command> [<scenario>] [flags]

commands:
  run        print the echo report table for a scenario
  trace      print every offer and confirmation path with amplitudes
  probe      print the two-sided object probe ledger
  mc         run Monte Carlo transaction selections, print the tally CSV
  sweep-zeno print the closed-form efficiency sweep CSV (no scenario)

scenarios:
  built-ins: ev-open, ev-blocked, zeno-open:N, zeno-blocked:N
  anything else is read as a scenario file path

flags:
  --trials K   Monte Carlo trial count (default 100000)
  --seed S     Monte Carlo seed (default 0)
  --n N        cycle count for zeno built-ins without the :N suffix
  --n-max N    largest cycle count for sweep-zeno (default 20)
  --out PATH   write output to PATH instead of standard output
  --emit-dsl   print the resolved scenario as DSL text instead of running
";

/// Failure classes mapped onto exit codes 1, 2, and 3.
enum CliError {
    Usage(String),
    Input(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    Run,
    Trace,
    Probe,
    Mc,
    SweepZeno,
}

struct RunConfig {
    command: Command,
    scenario: Option<String>,
    trials: u64,
    seed: u64,
    n: Option<u32>,
    n_max: u32,
    out: Option<String>,
    emit_dsl: bool,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        print!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    match parse_args(&args).and_then(execute) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("tiqm: error: {}", error.message());
            if matches!(error, CliError::Usage(_)) {
                eprint!("{USAGE}");
            }
            ExitCode::from(error.code())
        }
    }
}

fn parse_args(args: &[String]) -> Result<RunConfig, CliError> {
    let mut words = args.iter();
    let command = match words.next().map(String::as_str) {
        Some("run") => Command::Run,
        Some("trace") => Command::Trace,
        Some("probe") => Command::Probe,
        Some("mc") => Command::Mc,
        Some("sweep-zeno") => Command::SweepZeno,
        Some(other) => {
            return Err(CliError::Usage(format!("unknown command `{other}`")));
        }
        None => return Err(CliError::Usage("missing command".to_string())),
    };
    let mut config = RunConfig {
        command,
        scenario: None,
        trials: 100_000,
        seed: 0,
        n: None,
        n_max: 20,
        out: None,
        emit_dsl: false,
    };
    fn take_value(
        flag: &str,
        words: &mut std::slice::Iter<String>,
    ) -> Result<String, CliError> {
        words
            .next()
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("flag `{flag}` needs a value")))
    }
    while let Some(word) = words.next() {
        match word.as_str() {
            "--trials" => {
                let value = take_value("--trials", &mut words)?;
                config.trials = parse_number(&value, "--trials")?;
                if config.trials == 0 {
                    return Err(CliError::Usage("--trials must be at least 1".to_string()));
                }
            }
            "--seed" => {
                let value = take_value("--seed", &mut words)?;
                config.seed = parse_number(&value, "--seed")?;
            }
            "--n" => {
                let value = take_value("--n", &mut words)?;
                config.n = Some(parse_number(&value, "--n")?);
            }
            "--n-max" => {
                let value = take_value("--n-max", &mut words)?;
                config.n_max = parse_number(&value, "--n-max")?;
                if config.n_max == 0 {
                    return Err(CliError::Usage("--n-max must be at least 1".to_string()));
                }
            }
            "--out" => {
                config.out = Some(take_value("--out", &mut words)?);
            }
            "--emit-dsl" => config.emit_dsl = true,
            flag if flag.starts_with("--") => {
                return Err(CliError::Usage(format!("unknown flag `{flag}`")));
            }
            positional => {
                if config.scenario.is_some() {
                    return Err(CliError::Usage(format!(
                        "unexpected extra argument `{positional}`"
                    )));
                }
                config.scenario = Some(positional.to_string());
            }
        }
    }
    if config.scenario.is_none() && config.command != Command::SweepZeno {
        return Err(CliError::Usage("missing scenario".to_string()));
    }
    Ok(config)
}

fn parse_number<T: core::str::FromStr>(value: &str, flag: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("`{value}` is not a valid value for {flag}")))
}

fn execute(config: RunConfig) -> Result<(), CliError> {
    let output = match config.command {
        Command::SweepZeno if !config.emit_dsl => {
            sweep_csv(config.n_max).map_err(|e| CliError::Internal(e.to_string()))?
        }
        _ => {
            let scenario = config
                .scenario
                .as_deref()
                .ok_or_else(|| CliError::Usage("this command needs a scenario".to_string()))?;
            let (net, name) = resolve_scenario(scenario, config.n)?;
            if config.emit_dsl {
                serialize(&net)
            } else {
                match config.command {
                    Command::Run => cmd_run(&net, &name)?,
                    Command::Trace => cmd_trace(&net, &name)?,
                    Command::Probe => cmd_probe(&net, &name)?,
                    Command::Mc => cmd_mc(&net, config.trials, config.seed)?,
                    Command::SweepZeno => unreachable!("handled above"),
                }
            }
        }
    };
    match &config.out {
        Some(path) => std::fs::write(path, output)
            .map_err(|e| CliError::Input(format!("cannot write `{path}`: {e}"))),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

/// Resolves a built-in name or reads and converts a scenario file.
fn resolve_scenario(scenario: &str, n: Option<u32>) -> Result<(OpticalNetwork, String), CliError> {
    let zeno_cycles = |rest: Option<&str>| -> Result<u32, CliError> {
        match (rest, n) {
            (Some(suffix), _) => suffix
                .parse()
                .map_err(|_| CliError::Input(format!("`{suffix}` is not a valid cycle count"))),
            (None, Some(n)) => Ok(n),
            (None, None) => Err(CliError::Input(
                "zeno scenarios need a cycle count: use `zeno-open:N` or `--n N`".to_string(),
            )),
        }
    };
    match scenario {
        "ev-open" => Ok((build_ev(false), scenario.to_string())),
        "ev-blocked" => Ok((build_ev(true), scenario.to_string())),
        s if s == "zeno-open" || s.starts_with("zeno-open:") => {
            let cycles = zeno_cycles(s.strip_prefix("zeno-open:"))?;
            let net = build_zeno(cycles, false).map_err(|e| CliError::Input(e.to_string()))?;
            Ok((net, format!("zeno-open:{cycles}")))
        }
        s if s == "zeno-blocked" || s.starts_with("zeno-blocked:") => {
            let cycles = zeno_cycles(s.strip_prefix("zeno-blocked:"))?;
            let net = build_zeno(cycles, true).map_err(|e| CliError::Input(e.to_string()))?;
            Ok((net, format!("zeno-blocked:{cycles}")))
        }
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read `{path}`: {e}")))?;
            let name = std::path::Path::new(path)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or(path)
                .to_string();
            let source = parse_named(&name, path, &text).map_err(|errors| {
                let mut message = format!("`{path}` has {} parse error(s):", errors.len());
                for error in errors {
                    let _ = write!(message, "\n  {error}");
                }
                CliError::Input(message)
            })?;
            let net =
                to_network(&source).map_err(|e| CliError::Input(format!("`{path}`: {e}")))?;
            Ok((net, name))
        }
    }
}

fn handshake(net: &OpticalNetwork, config: &EngineConfig) -> Result<Handshake, CliError> {
    run_handshake(net, PolarizedAmplitude::horizontal(), config)
        .map_err(|e| CliError::Internal(e.to_string()))
}

/// Echo report table: sink, offer strength, echo, selection probability.
fn cmd_run(net: &OpticalNetwork, name: &str) -> Result<String, CliError> {
    let shake = handshake(net, &EngineConfig::amplitudes_only())?;
    let report = echo_report(&shake);
    let mut rows: Vec<[String; 5]> = Vec::new();
    for (sink, echo) in report.entries() {
        let offer = shake
            .offer
            .primary_arrival(sink)
            .map(|a| a.amplitude.norm_sqr())
            .unwrap_or(0.0);
        let probability = if report.total() > 0.0 {
            echo / report.total()
        } else {
            0.0
        };
        rows.push([
            sink.to_string(),
            sig12(offer),
            sig12(*echo),
            sig12(probability),
            format!("{probability:.4}"),
        ]);
    }
    rows.push([
        "total".to_string(),
        sig12(shake.offer.total_norm_sqr()),
        sig12(report.total()),
        String::new(),
        String::new(),
    ]);

    let mut out = format!("scenario: {name}\n");
    let header: [String; 5] = [
        "sink".to_string(),
        "offer|psi|^2".to_string(),
        "echo".to_string(),
        "probability".to_string(),
        "p(4)".to_string(),
    ];
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in &rows {
        for (width, cell) in widths.iter_mut().zip(row.iter()) {
            *width = (*width).max(cell.len());
        }
    }
    let render_row = |cells: &[String; 5]| -> String {
        let mut line = String::new();
        for (cell, width) in cells.iter().zip(&widths) {
            let _ = write!(line, "{cell:<width$}  ");
        }
        line.trim_end().to_string()
    };
    out.push_str(&render_row(&header));
    out.push('\n');
    for row in &rows {
        out.push_str(&render_row(row));
        out.push('\n');
    }
    Ok(out)
}

/// Every offer and confirmation path in Dirac rendering, grouped by sink.
fn cmd_trace(net: &OpticalNetwork, name: &str) -> Result<String, CliError> {
    let shake = handshake(net, &EngineConfig::default())?;
    let render =
        |record| trace_line(record).map_err(|e: tiqm_core::Error| CliError::Internal(e.to_string()));
    let mut out = format!("scenario: {name}\n\noffer waves:\n");
    for arrival in &shake.offer.arrivals {
        let _ = writeln!(
            out,
            "  sink {}.{} |psi|^2={}:",
            arrival.sink,
            arrival.port,
            sig12(arrival.amplitude.norm_sqr())
        );
        for record in &arrival.paths {
            let _ = writeln!(out, "    {}", render(record)?);
        }
        if arrival.paths_truncated {
            let _ = writeln!(out, "    ... record cap reached, list truncated");
        }
    }
    out.push_str("\nconfirmation waves:\n");
    for confirmation in &shake.confirmations {
        let _ = writeln!(
            out,
            "  from {} echo={}:",
            confirmation.origin,
            sig12(confirmation.echo_at_source)
        );
        for record in &confirmation.source_paths {
            let _ = writeln!(out, "    {}", render(record)?);
        }
        for component in &confirmation.aborted {
            for record in &component.paths {
                let _ = writeln!(
                    out,
                    "    {} ABORTED at {}.{}",
                    render(record)?,
                    component.terminal,
                    component.port
                );
            }
        }
        if confirmation.enumeration_truncated {
            let _ = writeln!(out, "    ... record cap reached, list truncated");
        }
    }
    Ok(out)
}

/// Two-sided probe ledger for every object.
fn cmd_probe(net: &OpticalNetwork, name: &str) -> Result<String, CliError> {
    let shake = handshake(net, &EngineConfig::amplitudes_only())?;
    let probe = probe_report(net, &shake.offer, &shake.confirmations);
    let mut out = format!("scenario: {name}\n");
    if probe.objects.is_empty() {
        out.push_str("no objects present\n");
        return Ok(out);
    }
    for object in &probe.objects {
        let _ = writeln!(out, "object {}:", object.object);
        let _ = writeln!(
            out,
            "  front offer |psi|^2 = {}",
            sig12(object.front_offer.norm_sqr())
        );
        if object.back_hits.is_empty() {
            let _ = writeln!(out, "  no back-side confirmation components");
        } else {
            let _ = writeln!(out, "  back-side aborted confirmations:");
            for (origin, amplitude) in &object.back_hits {
                let _ = writeln!(
                    out,
                    "    from {origin}: |psi|^2 = {}",
                    sig12(amplitude.norm_sqr())
                );
            }
        }
    }
    Ok(out)
}

/// Monte Carlo tally in CSV form; identical flags give identical bytes.
fn cmd_mc(net: &OpticalNetwork, trials: u64, seed: u64) -> Result<String, CliError> {
    let tally = monte_carlo(net, trials, seed).map_err(|e| CliError::Internal(e.to_string()))?;
    let shake = handshake(net, &EngineConfig::amplitudes_only())?;
    Ok(tally_csv(&tally, &echo_report(&shake)))
}
