//! The three subcommand drivers. Each writes its artifacts into the
//! output directory and returns the exit code; all file content is
//! deterministic for a fixed config and seed.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use gqmech_core::exec::ExecMode;
use gqmech_core::poisson::{frame_hamiltonian, frame_split, FrameConnection, PhaseFunction};
use gqmech_core::quantize::QuantizationMap;
use gqmech_core::suite::{
    dirac_suite, evolution_identity_suite, frame_compare, run_evolution, DiracTrial,
    EvolutionSetup,
};

use crate::config::HamiltonianSpec;
use crate::{fmt_f64, CliError, ExitCode};

fn write_out(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), content)?;
    Ok(())
}

fn log_timing(label: &str, started: Instant) {
    eprintln!("# {label}: {:.3}s", started.elapsed().as_secs_f64());
}

/// `check-dirac`: exact symbolic verification suites. Writes `report.txt`
/// and `dirac_trials.csv`; exit 0 when every defect vanishes.
pub fn run_check_dirac(
    spec: &HamiltonianSpec,
    out: &Path,
    trials: u64,
    degree: u32,
    seed: u64,
    mode: ExecMode,
) -> Result<ExitCode, CliError> {
    let started = Instant::now();
    let dim = spec.dim;
    let suites: Vec<(&str, Vec<DiracTrial>)> = vec![
        (
            "prequant-t",
            dirac_suite(QuantizationMap::PrequantT, dim, degree, trials, seed, mode)?,
        ),
        (
            "prequant-v",
            dirac_suite(QuantizationMap::PrequantV, dim, degree, trials, seed, mode)?,
        ),
        (
            "schrodinger-affine",
            dirac_suite(QuantizationMap::Schrodinger, dim, degree, trials, seed, mode)?,
        ),
        (
            "evolution-identity",
            evolution_identity_suite(dim, degree.max(4), trials, seed, mode)?,
        ),
    ];

    let mut report = String::new();
    writeln!(
        report,
        "check-dirac dim={dim} trials={trials} degree={degree} seed={seed}"
    )
    .unwrap();
    let mut csv = String::from("suite,trial,f,g,defect_is_zero,defect_terms,defect_order\n");
    let mut all_pass = true;
    for (name, results) in &suites {
        let nonzero: Vec<&DiracTrial> = results.iter().filter(|t| !t.defect_is_zero).collect();
        let pass = nonzero.is_empty();
        all_pass &= pass;
        if pass {
            writeln!(report, "{name}: pass trials={} nonzero=0", results.len()).unwrap();
        } else {
            let first = nonzero[0];
            writeln!(
                report,
                "{name}: FAIL trials={} nonzero={} first: trial={} f=\"{}\" g=\"{}\" defect_terms={} defect_order={}",
                results.len(),
                nonzero.len(),
                first.index,
                first.f,
                first.g,
                first.defect_terms,
                first.defect_order
            )
            .unwrap();
        }
        for t in results {
            writeln!(
                csv,
                "{name},{},\"{}\",\"{}\",{},{},{}",
                t.index, t.f, t.g, t.defect_is_zero, t.defect_terms, t.defect_order
            )
            .unwrap();
        }
    }
    writeln!(report, "result: {}", if all_pass { "pass" } else { "FAIL" }).unwrap();
    write_out(out, "report.txt", &report)?;
    write_out(out, "dirac_trials.csv", &csv)?;
    print!("{report}");
    log_timing("check-dirac", started);
    Ok(if all_pass {
        ExitCode::Ok
    } else {
        ExitCode::CheckFailed
    })
}

/// `evolve`: quantum Crank–Nicolson run next to the classical trajectory.
/// Writes `classical.csv` and `quantum.csv`.
pub fn run_evolve(spec: &HamiltonianSpec, out: &Path, mode: ExecMode) -> Result<ExitCode, CliError> {
    let started = Instant::now();
    let setup = EvolutionSetup {
        hamiltonian: spec.hamiltonian.clone(),
        spec: spec.grid.clone(),
        q0: spec.center_q.clone(),
        p0: spec.center_p.clone(),
        sigma: spec.width.clone(),
        dt: spec.dt,
        steps: spec.steps,
        record_every: 1,
        mode,
    };
    let observables: Vec<_> = spec.observables.iter().map(|(_, p)| p.clone()).collect();
    let run = run_evolution(&setup, &observables).map_err(|e| CliError {
        code: ExitCode::RuntimeError,
        message: format!("evolution failed: {e}"),
    })?;

    // classical.csv: t, q^k, p_k — reconstructed from the recorded samples
    // is not enough (samples carry observable values), so rerun the flow
    // explicitly for the exact per-step phase-space point.
    let flow = gqmech_core::evolve::ClassicalFlow::new(&spec.hamiltonian)?;
    let mut cls = gqmech_core::evolve::ClassicalState {
        time: 0.0,
        q: spec.center_q.clone(),
        p: spec.center_p.clone(),
    };
    let mut classical_csv = String::from("t");
    for k in 1..=spec.dim {
        write!(classical_csv, ",q{k}").unwrap();
    }
    for k in 1..=spec.dim {
        write!(classical_csv, ",p{k}").unwrap();
    }
    classical_csv.push('\n');
    let write_cls = |s: &gqmech_core::evolve::ClassicalState, buf: &mut String| {
        buf.push_str(&fmt_f64(s.time));
        for v in s.q.iter().chain(s.p.iter()) {
            buf.push(',');
            buf.push_str(&fmt_f64(*v));
        }
        buf.push('\n');
    };
    write_cls(&cls, &mut classical_csv);
    for _ in 0..spec.steps {
        cls = flow.step_rk4(&cls, spec.dt)?;
        write_cls(&cls, &mut classical_csv);
    }

    // quantum.csv: t, Re/Im expectation per observable, norm
    let mut quantum_csv = String::from("t");
    for (name, _) in &spec.observables {
        write!(quantum_csv, ",re[{name}],im[{name}]").unwrap();
    }
    quantum_csv.push_str(",norm\n");
    for s in &run.samples {
        quantum_csv.push_str(&fmt_f64(s.time));
        for (i, _) in spec.observables.iter().enumerate() {
            write!(
                quantum_csv,
                ",{},{}",
                fmt_f64(s.quantum[i]),
                fmt_f64(s.quantum_im[i])
            )
            .unwrap();
        }
        quantum_csv.push(',');
        quantum_csv.push_str(&fmt_f64(s.norm));
        quantum_csv.push('\n');
    }

    write_out(out, "classical.csv", &classical_csv)?;
    write_out(out, "quantum.csv", &quantum_csv)?;
    println!(
        "evolve: {} steps to t={}, norm drift {:.3e}",
        spec.steps,
        run.final_state.time,
        (run.samples.last().unwrap().norm - 1.0).abs()
    );
    log_timing("evolve", started);
    Ok(ExitCode::Ok)
}

/// `frame-compare`: rest-frame vs moving-frame evolution plus the exact
/// symbolic frame-splitting check. Writes `report.txt` and
/// `frame_compare.csv`; exit 0 when the deviations stay within `1e-4` and
/// the symbolic reassembly is exact.
pub fn run_frame_compare(
    spec: &HamiltonianSpec,
    out: &Path,
    mode: ExecMode,
) -> Result<ExitCode, CliError> {
    let started = Instant::now();
    let setup = EvolutionSetup {
        hamiltonian: spec.hamiltonian.clone(),
        spec: spec.grid.clone(),
        q0: spec.center_q.clone(),
        p0: spec.center_p.clone(),
        sigma: spec.width.clone(),
        dt: spec.dt,
        steps: spec.steps,
        record_every: 0,
        mode,
    };
    let report_data = frame_compare(&setup, &spec.velocity).map_err(|e| CliError {
        code: ExitCode::RuntimeError,
        message: format!("frame comparison failed: {e}"),
    })?;

    // symbolic reassembly H = p_k Gamma^k + ~H_Gamma, exact
    let frame = FrameConnection::constant_velocity(spec.dim, &spec.velocity)?;
    let tilde = frame_split(&spec.hamiltonian, &frame)?;
    let reassembled = &frame_hamiltonian(spec.dim, &frame).poly().clone() + tilde.poly();
    let symbolic_ok = reassembled == *spec.hamiltonian.poly();

    let tol = 1e-4;
    let mut max_dq = 0.0f64;
    let mut max_dp = 0.0f64;
    let mut csv = String::from("axis,q_rest,q_transported,p_rest,p_transported\n");
    for k in 0..spec.dim {
        let dq = (report_data.q_rest[k] - report_data.q_transported[k]).abs();
        let dp = (report_data.p_rest[k] - report_data.p_transported[k]).abs();
        max_dq = max_dq.max(dq);
        max_dp = max_dp.max(dp);
        writeln!(
            csv,
            "{},{},{},{},{}",
            k + 1,
            fmt_f64(report_data.q_rest[k]),
            fmt_f64(report_data.q_transported[k]),
            fmt_f64(report_data.p_rest[k]),
            fmt_f64(report_data.p_transported[k])
        )
        .unwrap();
    }
    let numeric_ok = max_dq <= tol && max_dp <= tol;

    let mut report = String::new();
    writeln!(
        report,
        "frame-compare dim={} steps={} dt={} final_t={}",
        spec.dim,
        spec.steps,
        fmt_f64(spec.dt),
        fmt_f64(report_data.final_time)
    )
    .unwrap();
    writeln!(report, "max_dq={} max_dp={}", fmt_f64(max_dq), fmt_f64(max_dp)).unwrap();
    writeln!(report, "l2_difference={}", fmt_f64(report_data.l2_difference)).unwrap();
    writeln!(
        report,
        "norm_rest={} norm_transported={}",
        fmt_f64(report_data.norm_rest),
        fmt_f64(report_data.norm_transported)
    )
    .unwrap();
    writeln!(
        report,
        "observables: {}",
        if numeric_ok { "pass" } else { "FAIL" }
    )
    .unwrap();
    writeln!(
        report,
        "symbolic-reassembly: {}",
        if symbolic_ok { "pass" } else { "FAIL" }
    )
    .unwrap();
    let all_ok = numeric_ok && symbolic_ok;
    writeln!(report, "result: {}", if all_ok { "pass" } else { "FAIL" }).unwrap();

    write_out(out, "report.txt", &report)?;
    write_out(out, "frame_compare.csv", &csv)?;
    print!("{report}");
    log_timing("frame-compare", started);
    Ok(if all_ok {
        ExitCode::Ok
    } else {
        ExitCode::CheckFailed
    })
}

/// Quantizability guard shared by the drivers: every configured observable
/// must route through the Schrödinger map.
pub fn validate_observables(spec: &HamiltonianSpec) -> Result<(), CliError> {
    for (name, poly) in &spec.observables {
        let pf = PhaseFunction::on_vq(poly.clone())
            .map_err(|e| CliError::config(format!("observable `{name}`: {e}")))?;
        gqmech_core::quantize::schrodinger_route(&pf)
            .map_err(|e| CliError::config(format!("observable `{name}`: {e}")))?;
    }
    Ok(())
}
