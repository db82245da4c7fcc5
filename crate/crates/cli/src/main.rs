mod args;
mod classify;
mod config;
mod error;
mod output;
mod portrait;
mod sweep;

use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use welander::continuation::{
    codim3_landmarks, continue_equilibrium, epsilon_slices, epsilon_sweep, equilibria_all, smooth_diagram,
    solve_equilibrium, FreeParam, DEFAULT_EPSILON_RANGE,
};
use welander::{pws_diagram, State};

use args::{Cli, Command, FreeArg, Format};
use config::{resolve, Resolved};
use output::{emit, json};

const SWEEP_STEP: f64 = 0.005;
const SWEEP_COUNT: usize = 31;
const SWEEP_SEED: f64 = 0.1;
const SMOOTH_EPSILON: f64 = 0.1;

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn write(r: &Resolved, text: String) -> anyhow::Result<()> {
    emit(&text, r.out.as_deref())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Classify { mu, eta, mut common } => {
            common.mu = mu.or(common.mu);
            common.eta = eta.or(common.eta);
            let r = resolve(&common, 0.0)?;
            if r.params.epsilon != 0.0 {
                warn("classify works on the PWS limit; epsilon is ignored");
            }
            let report = classify::classify(&r.params, &r.integration)?;
            if let Some(b) = &report.boundary {
                warn(&format!("({}, {}) lies on the bifurcation segment {b}", r.params.mu, r.params.eta));
            }
            let text = match r.format {
                None => report.to_text(),
                Some(Format::Csv) => report.to_csv(),
                Some(Format::Json) => json(&report)?,
            };
            write(&r, text)
        }
        Command::Portrait { common, n_ic, duration } => {
            let r = resolve(&common, 0.0)?;
            let n_ic = n_ic.or(r.scenario.grid.n_ic).unwrap_or(portrait::DEFAULT_N_IC);
            let duration = duration.or(r.scenario.duration).unwrap_or(portrait::DEFAULT_DURATION);
            let data = portrait::portrait(&r.params, &r.integration, r.initial_conditions(), n_ic, duration)?;
            for (i, o) in data.orbits.iter().enumerate() {
                if let Some(e) = &o.error {
                    warn(&format!("orbit {i} from ({}, {}): {e}", o.initial.x, o.initial.y));
                }
            }
            let text = match r.format {
                Some(Format::Json) => json(&data)?,
                _ => data.to_csv(),
            };
            write(&r, text)
        }
        Command::Diagram { common, sweep, samples } => {
            let r = resolve(&common, 0.0)?;
            let json_out = r.format == Some(Format::Json);
            let w = r.window;
            let text = if sweep {
                let s = &r.scenario.sweep;
                let slices = epsilon_slices(s.step.unwrap_or(SWEEP_STEP), s.count.unwrap_or(SWEEP_COUNT));
                let range = s.epsilon_range.unwrap_or(DEFAULT_EPSILON_RANGE);
                let seed = s.seed_epsilon.unwrap_or(SWEEP_SEED);
                let d = epsilon_sweep(&r.params, &slices, seed, w, range, &r.pal)?;
                for f in d.slices.iter().flat_map(|s| s.failures.iter()).chain(&d.landmarks.failures) {
                    warn(f);
                }
                if json_out { d.to_json()? } else { d.to_csv() }
            } else if r.params.is_pws() {
                let d = pws_diagram(&r.params, w.mu, w.eta, samples)?;
                if json_out { d.to_json()? } else { d.to_csv() }
            } else {
                let d = smooth_diagram(&r.params, w, &r.pal)?;
                for f in &d.failures {
                    warn(f);
                }
                if json_out { d.to_json()? } else { d.to_csv() }
            };
            write(&r, text)
        }
        Command::Sweep { common, n_mu, n_eta, n_ic } => {
            let r = resolve(&common, 0.0)?;
            let g = &r.scenario.grid;
            let rows = sweep::sweep(
                &r.params,
                r.window,
                n_mu.or(g.n_mu).unwrap_or(sweep::DEFAULT_N),
                n_eta.or(g.n_eta).unwrap_or(sweep::DEFAULT_N),
                n_ic.or(g.n_ic).unwrap_or(sweep::DEFAULT_N_IC),
                &r.integration,
            )?;
            let text = match r.format {
                Some(Format::Json) => json(&rows)?,
                _ => sweep::to_csv(&rows),
            };
            write(&r, text)
        }
        Command::ContinueEq { common, free, from, to, backward } => {
            let r = resolve(&common, SMOOTH_EPSILON)?;
            let c = &r.scenario.continuation;
            let free = match free {
                Some(FreeArg::Mu) => FreeParam::Mu,
                Some(FreeArg::Eta) => FreeParam::Eta,
                None => c.free.unwrap_or(FreeParam::Mu),
            };
            let dflt = match free {
                FreeParam::Mu => r.window.mu,
                FreeParam::Eta => r.window.eta,
            };
            let range = c.range.unwrap_or(dflt);
            let range = (from.unwrap_or(range.0), to.unwrap_or(range.1));
            let start = match c.guess {
                Some([x, y]) => solve_equilibrium(&r.params, State::new(x, y))?.state,
                None => {
                    let eqs = equilibria_all(&r.params)?;
                    let first = eqs.first().context("no equilibrium found at the starting parameters")
                        .map_err(|e| welander::Error::NotFound(e.to_string()))?;
                    if eqs.len() > 1 {
                        warn(&format!("{} equilibria; continuing the one at ({}, {})", eqs.len(), first.state.x, first.state.y));
                    }
                    first.state
                }
            };
            let forward = !(backward || c.backward.unwrap_or(false));
            let b = continue_equilibrium(&r.params, start, free, range, forward, &r.pal)?;
            let text = match r.format {
                Some(Format::Json) => json(&b)?,
                _ => b.to_csv(),
            };
            write(&r, text)
        }
        Command::BtLocate { common } => {
            let r = resolve(&common, SMOOTH_EPSILON)?;
            let range = r.scenario.sweep.epsilon_range.unwrap_or(DEFAULT_EPSILON_RANGE);
            let l = codim3_landmarks(&r.params, r.window, range, &r.pal)?;
            for f in &l.failures {
                warn(f);
            }
            let text = match r.format {
                Some(Format::Json) => l.to_json()?,
                _ => l.to_csv(),
            };
            write(&r, text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => error::report(&e),
    }
}
