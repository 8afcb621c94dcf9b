use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use strichartz::dmnls::STABILITY_SHIFT_GRID;
use strichartz::{
    a_functional, decomposition, evolve_dmnls, g_functional, ground_state_from_maximizer, maximize_w, orbit_distance,
    stability_experiment, strichartz_w, threshold_b, AscentConfig, FourierVector, PeriodicField,
};

use crate::args::*;
use crate::output::{to_json, Artifacts};
use crate::CliError;

/// What a command produced: the report echoed on stdout and the files that
/// go under `--out`.
pub struct Outcome {
    pub report: Value,
    pub artifacts: Artifacts,
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_vector(path: &Path) -> Result<FourierVector, CliError> {
    serde_json::from_value(read_json(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A coefficient file as a field of period `--L`, or of the file's own `"L"`.
fn read_field(path: &Path, period: Option<f64>) -> Result<PeriodicField, CliError> {
    let value = read_json(path)?;
    let period = match (period, value.get("L")) {
        (Some(l), _) => l,
        (None, Some(l)) => l
            .as_f64()
            .ok_or_else(|| CliError::Input(format!("{}: \"L\" must be a number", path.display())))?,
        (None, None) => {
            return Err(CliError::Input(format!(
                "{}: no \"L\" in file and no --L given",
                path.display()
            )))
        }
    };
    let coeffs: FourierVector =
        serde_json::from_value(value).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(PeriodicField::new(period, coeffs)?)
}

fn report<T: Serialize>(name: &str, value: &T, artifacts: &mut Artifacts) -> Value {
    artifacts.add(name, to_json(value));
    serde_json::to_value(value).expect("report types serialize")
}

pub fn eval(a: &EvalArgs) -> Result<Outcome, CliError> {
    let u = read_vector(&a.input)?;
    let r = json!({
        "B": a.b,
        "W": strichartz_w(&u, a.b)?,
        "decomposition": decomposition(&u, a.b)?,
        "A": a_functional(&u, a.b)?,
        "G": g_functional(&u, a.b)?,
    });
    let mut artifacts = Artifacts::default();
    let report = report("eval.json", &r, &mut artifacts);
    Ok(Outcome { report, artifacts })
}

pub fn threshold(a: &ThresholdArgs) -> Result<Outcome, CliError> {
    let cfg = AscentConfig {
        restarts: a.restarts,
        seed: a.seed,
        ..AscentConfig::default()
    };
    let scan = threshold_b(a.family, &cfg, a.scan_step)?;
    let mut artifacts = Artifacts::default();
    let arity = scan.argmax.len();
    let mut header = vec!["B".to_string(), "family_id".to_string(), "max_A".to_string()];
    header.extend((1..=arity).map(|k| format!("param_{k}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    artifacts.add_csv(
        "sweep.csv",
        &header,
        scan.sweep.iter().map(|row| {
            let mut rec = vec![row.b.to_string(), row.family_id.to_string(), row.max_a.to_string()];
            rec.extend(row.argmax.iter().map(f64::to_string));
            rec
        }),
    );
    let r = json!({
        "family_id": a.family,
        "threshold": scan.threshold,
        "argmax": scan.argmax,
        "anomalies": scan.anomalies,
    });
    let report = report("threshold.json", &r, &mut artifacts);
    Ok(Outcome { report, artifacts })
}

pub fn optimize(a: &OptimizeArgs) -> Result<Outcome, CliError> {
    let cfg = AscentConfig {
        restarts: a.restarts,
        seed: a.seed,
        max_iters: a.max_iters,
        ..AscentConfig::default()
    };
    let best = maximize_w(a.b, a.halfwidth, &cfg)?;
    let mut artifacts = Artifacts::default();
    artifacts.add_csv(
        "trace.csv",
        &["iteration", "value"],
        best.trace.iter().map(|(i, v)| vec![i.to_string(), v.to_string()]),
    );
    let r = json!({
        "B": a.b,
        "halfwidth": a.halfwidth,
        "value": best.value,
        "converged": best.converged,
        "iterations": best.iterations,
        "argmax": best.argmax.canonicalize(),
    });
    let report = report("optimize.json", &r, &mut artifacts);
    Ok(Outcome { report, artifacts })
}

pub fn simulate(a: &SimulateArgs) -> Result<Outcome, CliError> {
    let u0 = read_field(&a.init, a.period)?;
    let reference = match &a.reference {
        Some(p) => Some(read_field(p, Some(u0.period()))?),
        None => None,
    };
    let traj = evolve_dmnls(&u0, a.dt, a.horizon)?;
    if let Some(w) = &traj.warning {
        if a.strict {
            return Err(CliError::Strict(w.clone()));
        }
        eprintln!("warning: {w}");
    }
    let mut artifacts = Artifacts::default();
    let mut header = vec!["t", "H", "P"];
    let mut rows = Vec::with_capacity(traj.times.len());
    if reference.is_some() {
        header.push("orbit_distance");
    }
    for ((t, (h, p)), state) in traj.times.iter().zip(&traj.ledger).zip(&traj.states) {
        let mut rec = vec![t.to_string(), h.to_string(), p.to_string()];
        if let Some(phi) = &reference {
            rec.push(orbit_distance(state, phi, STABILITY_SHIFT_GRID)?.to_string());
        }
        rows.push(rec);
    }
    artifacts.add_csv("trajectory.csv", &header, rows);
    artifacts.add("final_state.json", to_json(traj.final_state()));
    if a.snapshot_stride > 0 {
        let snaps: Vec<Value> = traj
            .times
            .iter()
            .zip(&traj.states)
            .step_by(a.snapshot_stride)
            .map(|(t, s)| json!({ "t": t, "state": s }))
            .collect();
        artifacts.add("snapshots.json", to_json(&snaps));
    }
    let (dh, dp) = traj.conserved_drift();
    let r = json!({
        "L": u0.period(),
        "dt": a.dt,
        "horizon": a.horizon,
        "steps": traj.times.len() - 1,
        "conserved_drift": { "H": dh, "P": dp },
        "warning": traj.warning,
        "final_state": traj.final_state(),
    });
    let report = report("simulate.json", &r, &mut artifacts);
    Ok(Outcome { report, artifacts })
}

pub fn stability(a: &StabilityArgs) -> Result<Outcome, CliError> {
    let mut phi = read_field(&a.ground_state, a.period)?;
    if let Some(lambda) = a.lambda {
        phi = ground_state_from_maximizer(phi.coeffs(), phi.period(), lambda)?;
    }
    let r = stability_experiment(&phi, a.epsilon, a.horizon, a.dt, &phi.quadrature(), a.seed)?;
    let mut artifacts = Artifacts::default();
    artifacts.add_csv(
        "orbit_distance.csv",
        &["t", "orbit_distance"],
        r.samples.iter().map(|(t, d)| vec![t.to_string(), d.to_string()]),
    );
    let report = report("stability.json", &r, &mut artifacts);
    Ok(Outcome { report, artifacts })
}
