use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::eos::{ConservedVector, MultiplierVector};
use crate::error::{Error, Result};
use crate::euler::{self, Closure, MacroGrid, RunOptions};
use crate::ldp::{rate_i_truncated, rate_scan};
use crate::micro::{assumption_checks, gibbs_gaussian, sample_field, write_fields_csv, Lattice};

use super::checks::{run_checks, CheckReport};
use super::config::{ExperimentConfig, ExperimentKind};
use super::coupling::{build_closure, build_table};
use super::hydro::{entropy_track_into, hydro_compare_into, ConvergenceReport, EntropySeries};
use super::manifest::{Manifest, OutputSink};

/// Result of one CLI-level run.
pub struct Outcome {
    pub manifest: Manifest,
    /// False when a property check failed (the run itself completed).
    pub passed: bool,
    pub checks: Option<CheckReport>,
}

fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn tag(t: f64) -> String {
    format!("{t:.6}")
}

/// Runs one experiment, writing CSV/JSON outputs and `manifest.json` into
/// `out_dir`. `config_text` is hashed into the manifest.
pub fn execute(kind: ExperimentKind, cfg: &ExperimentConfig, config_text: &str, out_dir: &Path) -> Result<Outcome> {
    let mut sink = OutputSink::new(out_dir)?;
    sink.record_input(config_text.as_bytes());
    let mut notes = Vec::new();
    let mut passed = true;
    let mut checks = None;
    let summary = match kind {
        ExperimentKind::HydroCompare => {
            let mut report = ConvergenceReport::default();
            let res = hydro_compare_into(cfg, &mut report);
            // flush whatever was computed before propagating a failure
            sink.write("errors.csv", &csv_bytes(&report.errors)?)?;
            sink.write("slopes.csv", &csv_bytes(&report.slopes)?)?;
            sink.write("trends.json", serde_json::to_string_pretty(&report.trends)?.as_bytes())?;
            res?;
            notes.extend(report.notes.iter().cloned());
            let at_zero: Vec<_> = report.trends.iter().filter(|t| t.time == 0.0 && t.form == "matched").collect();
            json!({
                "t0_matched_all_decreasing": at_zero.iter().all(|t| t.strictly_decreasing),
                "shock_times": report.shock_times,
            })
        }
        ExperimentKind::EntropyTrack => {
            let mut series = EntropySeries::default();
            let res = entropy_track_into(cfg, &mut series);
            sink.write("entropy.csv", &csv_bytes(&series.rows)?)?;
            res?;
            notes.extend(series.notes.iter().cloned());
            let first: Vec<_> = series.rows.iter().filter(|r| r.time == 0.0).collect();
            json!({
                "s0_exactly_zero": first.iter().all(|r| r.total == 0.0),
                "max_production_at_zero": first.iter().map(|r| r.production.abs()).fold(0.0, f64::max),
            })
        }
        ExperimentKind::Checks => {
            let report = run_checks(cfg);
            sink.write("checks.json", serde_json::to_string_pretty(&report)?.as_bytes())?;
            sink.write("checks.csv", &csv_bytes(&report.items)?)?;
            passed = report.passed;
            let summary = json!({
                "passed": report.passed,
                "failures": report.items.iter().filter(|i| !i.pass).map(|i| &i.name).collect::<Vec<_>>(),
            });
            checks = Some(report);
            summary
        }
        ExperimentKind::EosTable => {
            let model = cfg.eos.model();
            let tc = &cfg.euler.table;
            if tc.path.is_none() && (tc.rho_range.is_none() || (tc.eint_range.is_none() && tc.excess_range.is_none())) {
                return Err(Error::Config("eos-table needs euler.table.rho_range and an energy range".into()));
            }
            let (table, loaded) = build_table(&model, tc, &[])?;
            if let Some(b) = loaded {
                sink.record_input(&b);
            }
            let mut bin = Vec::new();
            table.write_to(&mut bin)?;
            sink.write("eos_table.bin", &bin)?;
            let mut preview = Vec::new();
            table.write_csv_preview(&mut preview)?;
            sink.write("eos_table_preview.csv", &preview)?;
            json!({ "axis": format!("{:?}", table.axis), "resolution": [table.n_rho, table.n_e] })
        }
        ExperimentKind::EulerRun => {
            let model = cfg.eos.model();
            let grid = MacroGrid::new(cfg.euler.cells.unwrap_or(256))?;
            let q0 = euler::initial_field(&cfg.profile, grid, &model)?;
            let (closure, loaded) = build_closure(cfg, &q0)?;
            if let Some(b) = loaded {
                sink.record_input(&b);
            }
            let t_final = cfg.times.iter().copied().fold(cfg.euler.t_final, f64::max);
            let opts = RunOptions { t_final, snapshots: cfg.times.clone(), cfl: cfg.euler.cfl };
            let traj = euler::run(&q0, grid, &closure, &opts)?;
            for snap in &traj.snapshots {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["X", "rho", "mom", "e", "P"])?;
                for (j, c) in snap.q.iter().enumerate() {
                    let p = closure.pressure(c.rho, c.internal_energy())?;
                    w.write_record([grid.center::<f64>(j), c.rho, c.mom[0], c.e, p].map(|v| format!("{v:.17e}")))?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
                sink.write(&format!("euler_T{}.csv", tag(snap.time)), &bytes)?;
            }
            if let Some(t) = traj.shock_time {
                notes.push(format!("density gradient blew up at T = {t}; later snapshots are not smooth solutions"));
            }
            let (a, b) = (traj.snapshots[0].totals(), traj.last().totals());
            json!({ "steps": traj.steps, "shock_time": traj.shock_time, "totals_initial": a, "totals_final": b })
        }
        ExperimentKind::MicroRun => {
            let mut assumptions = Vec::new();
            for &size in &cfg.sizes {
                let lat = Lattice::new(size, cfg.spacing)?;
                let gamma0 = gibbs_gaussian(&lat, &sample_field(&lat, |x| cfg.profile.lambda_at(x)))?;
                let report = assumption_checks(&gamma0, cfg.cutoff.c, cfg.cutoff.m)?;
                assumptions.push(json!({
                    "size": size,
                    "maxwellian_moment": report.moment.as_ref().ok(),
                    "moment_error": report.moment.as_ref().err(),
                    "cutoff_scale": report.cutoff_scale,
                    "current_ratio": report.current_bound.ratio,
                }));
                for &t_macro in &cfg.times {
                    let st = gamma0.evolve(t_macro / lat.epsilon());
                    let mut fields = Vec::new();
                    write_fields_csv(&lat, &st.densities(), &st.currents(None), &mut fields)?;
                    sink.write(&format!("fields_L{size}_T{}.csv", tag(t_macro)), &fields)?;
                    let mut snap = Vec::new();
                    st.write_snapshot(&mut snap)?;
                    sink.write(&format!("state_L{size}_T{}.snap", tag(t_macro)), &snap)?;
                }
            }
            sink.write("assumptions.json", serde_json::to_string_pretty(&assumptions)?.as_bytes())?;
            json!({ "sizes": cfg.sizes })
        }
        ExperimentKind::RateScan => {
            let rc = &cfg.rate;
            let model = cfg.eos.model();
            let d = model.dim;
            let lam = MultiplierVector::from_physical(d, rc.beta, &vec![rc.alpha; d], rc.mu);
            let grid = |(a, b, n): (f64, f64, usize)| -> Vec<f64> {
                (0..n).map(|i| if n > 1 { a + (b - a) * i as f64 / (n - 1) as f64 } else { a }).collect()
            };
            let (rho, e) = (grid(rc.rho), grid(rc.e));
            let rows = rate_scan(&model, &lam, &rho, &e)?;
            let q0 = model.dual_q(&lam)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["rho", "e", "rate", "rate_truncated"])?;
            let fmt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
            let mut outside = 0usize;
            for (r, en, v) in rows {
                let trunc = match (v, rc.eta) {
                    (Some(_), Some(eta)) => {
                        let q = ConservedVector { rho: r, e: en, ..q0 };
                        Some(rate_i_truncated(&model, &q, &lam, eta)?.rate)
                    }
                    _ => None,
                };
                outside += v.is_none() as usize;
                w.write_record([format!("{r:.17e}"), format!("{en:.17e}"), fmt(v), fmt(trunc)])?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            sink.write("rate_scan.csv", &bytes)?;
            json!({ "points": rho.len() * e.len(), "outside_domain": outside })
        }
    };
    let manifest = sink.finish(cfg, kind, notes, summary)?;
    Ok(Outcome { manifest, passed, checks })
}

/// Convenience for callers that only need the summary line.
pub fn describe(outcome: &Outcome, mut w: impl Write) -> Result<()> {
    writeln!(w, "{}: {} output file(s), input hash {}", outcome.manifest.kind, outcome.manifest.outputs.len(), outcome.manifest.input_hash)?;
    for o in &outcome.manifest.outputs {
        writeln!(w, "  {}  {}", o.sha256, o.file)?;
    }
    Ok(())
}
