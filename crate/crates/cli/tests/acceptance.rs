//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line. Criteria 1–9 exercise the library directly; criterion
//! 10 runs the installed binary twice and byte-compares its outputs.

use std::time::Instant;

use gqmech_core::evolve::{moving_frame_hamiltonian, ClassicalFlow, ClassicalState};
use gqmech_core::exec::ExecMode;
use gqmech_core::grid::GridSpec;
use gqmech_core::operator::{DiffOperator, VarSet};
use gqmech_core::parse::poly_parse;
use gqmech_core::poisson::{
    evolution_identity_defect, frame_hamiltonian, frame_split, FrameConnection, PhaseFunction,
};
use gqmech_core::poly::{Polynomial, Var};
use gqmech_core::quantize::{
    dirac_defect, drop_p0_direction, heisenberg_derivative, prequantize_t, prequantize_v,
    quantize_quadratic, schrodinger_quantize, QuantizationMap,
};
use gqmech_core::sample::{
    random_config_poly, random_poly, random_quadratic, random_vertical_affine,
};
use gqmech_core::suite::{run_evolution, EvolutionSample, EvolutionSetup};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODE: ExecMode = ExecMode::Parallel;

fn vq(text: &str, dim: usize) -> PhaseFunction {
    PhaseFunction::on_vq(poly_parse(text, dim).unwrap()).unwrap()
}

fn pass(n: u32, what: &str) {
    println!("acceptance criterion {n:02} ({what}): pass");
}

#[test]
fn criterion_01_prequantum_dirac_condition() {
    let started = Instant::now();
    for dim in [1usize, 2] {
        let mut rng = ChaCha8Rng::seed_from_u64(101 + dim as u64);
        for trial in 0..200 {
            let ft = PhaseFunction::on_tq(random_poly(&mut rng, dim, 3, true));
            let gt = PhaseFunction::on_tq(random_poly(&mut rng, dim, 3, true));
            let d = dirac_defect(&ft, &gt, QuantizationMap::PrequantT).unwrap();
            assert!(d.is_zero(), "T*Q defect at dim={dim} trial={trial}");
            let fv = PhaseFunction::on_vq(random_poly(&mut rng, dim, 3, false)).unwrap();
            let gv = PhaseFunction::on_vq(random_poly(&mut rng, dim, 3, false)).unwrap();
            let d = dirac_defect(&fv, &gv, QuantizationMap::PrequantV).unwrap();
            assert!(d.is_zero(), "V*Q defect at dim={dim} trial={trial}");
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "criterion 1 took {elapsed:.1}s, budget 10s");
    pass(1, "exact Dirac condition, prequantum maps");
}

#[test]
fn criterion_02_schrodinger_dirac_condition() {
    let started = Instant::now();
    for dim in [1usize, 2] {
        let mut rng = ChaCha8Rng::seed_from_u64(201 + dim as u64);
        for trial in 0..200 {
            let f = PhaseFunction::on_vq(random_vertical_affine(&mut rng, dim, 2)).unwrap();
            let g = PhaseFunction::on_vq(random_vertical_affine(&mut rng, dim, 2)).unwrap();
            let d = dirac_defect(&f, &g, QuantizationMap::Schrodinger).unwrap();
            assert!(d.is_zero(), "affine defect at dim={dim} trial={trial}");
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "criterion 2 took {elapsed:.1}s, budget 5s");
    pass(2, "exact Dirac condition, Schrödinger map on affine pairs");
}

#[test]
fn criterion_03_evolution_identity() {
    let started = Instant::now();
    for dim in [1usize, 2] {
        let mut rng = ChaCha8Rng::seed_from_u64(301 + dim as u64);
        for trial in 0..200 {
            let f = PhaseFunction::on_vq(random_poly(&mut rng, dim, 4, false)).unwrap();
            let h = PhaseFunction::on_vq(random_poly(&mut rng, dim, 4, false)).unwrap();
            let d = evolution_identity_defect(&f, &h).unwrap();
            assert!(d.is_zero(), "identity defect at dim={dim} trial={trial}");
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "criterion 3 took {elapsed:.1}s, budget 10s");
    pass(3, "exact classical evolution identity");
}

#[test]
fn criterion_04_self_adjointness_and_compatibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    for _ in 0..100 {
        let f = PhaseFunction::on_vq(random_vertical_affine(&mut rng, 2, 2)).unwrap();
        let fh = schrodinger_quantize(&f).unwrap();
        assert_eq!(fh.formal_adjoint().unwrap(), fh, "affine f = {f}");
        let h = PhaseFunction::on_vq(random_quadratic(&mut rng, 2, 2)).unwrap();
        let hh = quantize_quadratic(&h).unwrap();
        assert_eq!(hh.formal_adjoint().unwrap(), hh, "quadratic H = {h}");
    }
    for dim in [1usize, 2] {
        for _ in 0..100 {
            let f = PhaseFunction::on_vq(random_poly(&mut rng, dim, 3, false)).unwrap();
            let on_v = prequantize_v(&f).unwrap();
            let via_t = drop_p0_direction(&prequantize_t(&f.lift_to_tq())).unwrap();
            assert_eq!(on_v, via_t, "prequantization mismatch for f = {f}");
        }
    }
    pass(4, "exact self-adjointness and prequantization compatibility");
}

#[test]
fn criterion_05_instantwise_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    let t0 = gqmech_core::coeff::coeff_rat(7, 4);
    for _ in 0..100 {
        let f = PhaseFunction::on_vq(random_vertical_affine(&mut rng, 1, 2)).unwrap();
        let fh = schrodinger_quantize(&f).unwrap();
        // quantize-then-restrict equals restrict-then-quantize
        let mut map = Polynomial::identity_map(1);
        map[0] = Polynomial::constant(1, t0.clone());
        let f_at =
            PhaseFunction::on_vq(f.poly().substitute_affine(&map).unwrap()).unwrap();
        assert_eq!(
            schrodinger_quantize(&f_at).unwrap(),
            fh.at_time(&t0).unwrap(),
            "restriction mismatch for f = {f}"
        );
        // multiplication by functions of time alone commutes with the map
        let r = {
            let raw = random_config_poly(&mut rng, 1, 2);
            let mut m = Polynomial::identity_map(1);
            m[1] = Polynomial::zero(1);
            raw.substitute_affine(&m).unwrap()
        };
        let rf = PhaseFunction::on_vq(&r * f.poly()).unwrap();
        assert_eq!(
            schrodinger_quantize(&rf).unwrap(),
            fh.premultiply(&r).unwrap(),
            "time-function linearity mismatch for f = {f}"
        );
    }
    pass(5, "instantwise structure and linearity over functions of time");
}

fn oscillator_run(n: usize, dt: f64, steps: usize, record_every: usize) -> Vec<EvolutionSample> {
    let setup = EvolutionSetup {
        hamiltonian: vq("0.5*p1^2 + 0.5*q1^2", 1),
        spec: GridSpec::new(vec![-5.0], vec![5.0], vec![n]).unwrap(),
        q0: vec![1.0],
        p0: vec![0.0],
        sigma: vec![0.7],
        dt,
        steps,
        record_every,
        mode: MODE,
    };
    let obs = vec![
        poly_parse("q1", 1).unwrap(),
        poly_parse("p1", 1).unwrap(),
        poly_parse("0.5*p1^2 + 0.5*q1^2", 1).unwrap(),
    ];
    run_evolution(&setup, &obs).unwrap().samples
}

#[test]
fn criterion_06_oscillator_ehrenfest() {
    let started = Instant::now();
    let samples = oscillator_run(1024, 1e-3, 6284, 1);
    let mut err_q = 0.0f64;
    let mut err_p = 0.0f64;
    let mut norm_drift = 0.0f64;
    let mut energy_drift = 0.0f64;
    let e0 = samples[0].quantum[2];
    for s in &samples {
        // closed-form classical oracle: q = cos t, p = -sin t
        err_q = err_q.max((s.quantum[0] - s.time.cos()).abs());
        err_p = err_p.max((s.quantum[1] + s.time.sin()).abs());
        norm_drift = norm_drift.max((s.norm - 1.0).abs());
        energy_drift = energy_drift.max((s.quantum[2] - e0).abs());
    }
    assert!(err_q <= 1e-4, "max |<q> - cos t| = {err_q:.3e}");
    assert!(err_p <= 1e-4, "max |<p> + sin t| = {err_p:.3e}");
    assert!(norm_drift <= 1e-8, "norm drift {norm_drift:.3e}");
    assert!(energy_drift <= 1e-6, "energy drift {energy_drift:.3e}");
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "criterion 6 took {elapsed:.1}s, budget 60s");
    pass(6, "oscillator Ehrenfest experiment within tolerances");
}

#[test]
fn criterion_07_convergence_orders() {
    // The discretization error has independent O(h^2) and O(dt^2)
    // components; each is isolated against a much finer reference so the
    // other component cancels in the difference.
    let max_diff = |a: &[EvolutionSample], b: &[EvolutionSample]| -> f64 {
        assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .map(|(x, y)| (x.quantum[0] - y.quantum[0]).abs())
            .fold(0.0f64, f64::max)
    };

    // spatial: n = 1024 and 2048 against an n = 8192 reference, fixed dt
    let reference = oscillator_run(8192, 1e-3, 1000, 10);
    let coarse = oscillator_run(1024, 1e-3, 1000, 10);
    let fine = oscillator_run(2048, 1e-3, 1000, 10);
    let ratio_n = max_diff(&coarse, &reference) / max_diff(&fine, &reference);
    assert!(
        (3.5..=4.5).contains(&ratio_n),
        "spatial error ratio {ratio_n:.2} outside 3.5..4.5"
    );

    // temporal: dt = 1e-3 and 5e-4 against a dt = 1e-4 reference, fixed n
    let reference = oscillator_run(1024, 1e-4, 10000, 100);
    let coarse = oscillator_run(1024, 1e-3, 1000, 10);
    let fine = oscillator_run(1024, 5e-4, 2000, 20);
    let ratio_t = max_diff(&coarse, &reference) / max_diff(&fine, &reference);
    assert!(
        (3.5..=4.5).contains(&ratio_t),
        "temporal error ratio {ratio_t:.2} outside 3.5..4.5"
    );
    pass(7, "second-order convergence in both grid spacing and time step");
}

#[test]
fn criterion_08_frame_covariance() {
    // numeric: free particle, v = 1, one time unit
    let setup = EvolutionSetup {
        hamiltonian: vq("0.5*p1^2", 1),
        spec: GridSpec::new(vec![-8.0], vec![8.0], vec![2048]).unwrap(),
        q0: vec![0.0],
        p0: vec![0.0],
        sigma: vec![0.7],
        dt: 1e-3,
        steps: 1000,
        record_every: 0,
        mode: MODE,
    };
    let v = vec![Polynomial::one(1)];
    let report = gqmech_core::suite::frame_compare(&setup, &v).unwrap();
    let dq = (report.q_rest[0] - report.q_transported[0]).abs();
    let dp = (report.p_rest[0] - report.p_transported[0]).abs();
    assert!(dq <= 1e-4, "frame <q> deviation {dq:.3e}");
    assert!(dp <= 1e-4, "frame <p> deviation {dp:.3e}");

    // symbolic: H = p_k Gamma^k + ~H_Gamma exactly, and the free particle
    // is form-invariant under the boost
    let h = vq("0.5*p1^2 + 0.5*q1^2", 1);
    let frame = FrameConnection::constant_velocity(1, &[poly_parse("3/2", 1).unwrap()]).unwrap();
    let tilde = frame_split(&h, &frame).unwrap();
    let back = &frame_hamiltonian(1, &frame).poly().clone() + tilde.poly();
    assert_eq!(back, *h.poly(), "frame splitting must reassemble exactly");
    let free = vq("0.5*p1^2", 1);
    assert_eq!(moving_frame_hamiltonian(&free, &v).unwrap(), free);
    pass(8, "frame covariance, numeric and symbolic");
}

#[test]
fn criterion_09_heisenberg_operator_checks() {
    let qhat = schrodinger_quantize(&vq("q1", 1)).unwrap();
    let phat = schrodinger_quantize(&vq("p1", 1)).unwrap();
    for v_text in ["0", "q1^2", "q1^3 - 2*q1", "q1^4 + q1", "t*q1^2"] {
        let h = if v_text == "0" {
            vq("0.5*p1^2", 1)
        } else {
            vq(&format!("0.5*p1^2 + {v_text}"), 1)
        };
        assert_eq!(
            heisenberg_derivative(&qhat, &h).unwrap(),
            phat,
            "nabla q^ != p^ for V = {v_text}"
        );
        let v = poly_parse(v_text, 1).unwrap();
        let force = PhaseFunction::on_vq(-&v.diff(Var::Q(1))).unwrap();
        assert_eq!(
            heisenberg_derivative(&phat, &h).unwrap(),
            schrodinger_quantize(&force).unwrap(),
            "nabla p^ != (-dV)^ for V = {v_text}"
        );
    }
    // sanity: the identity is parallel, q^ itself is not
    let id = DiffOperator::identity(1, VarSet::ConfigSpace);
    let h = vq("0.5*p1^2 + 0.5*q1^2", 1);
    assert!(heisenberg_derivative(&id, &h).unwrap().is_zero());
    assert!(!heisenberg_derivative(&qhat, &h).unwrap().is_zero());
    pass(9, "operator-level Heisenberg evolution is exact");
}

#[test]
fn criterion_10_cli_determinism() {
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_gqmech");
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("model.cfg");
    std::fs::write(
        &cfg,
        r#"
[model] dim=1 hamiltonian="0.5*p1^2"
[frame] velocity="1"
[grid] min=-8 max=8 points=1024
[initial] center_q=0.0 center_p=0.0 width=0.7
[evolve] dt=0.0005 steps=200 observables="q1,p1,t"
"#,
    )
    .unwrap();
    for sub in ["check-dirac", "evolve", "frame-compare"] {
        let mut outputs: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{sub}-{run}"));
            let status = Command::new(bin)
                .args([
                    sub,
                    "--config",
                    cfg.to_str().unwrap(),
                    "--out",
                    out.to_str().unwrap(),
                    "--seed",
                    "42",
                    "--trials",
                    "50",
                ])
                .status()
                .unwrap();
            assert!(status.success(), "{sub} run {run} exited {status}");
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (
                        e.file_name().to_string_lossy().into_owned(),
                        std::fs::read(e.path()).unwrap(),
                    )
                })
                .collect();
            files.sort();
            assert!(!files.is_empty(), "{sub} produced no output files");
            outputs.push(files);
        }
        let names: Vec<&String> = outputs[0].iter().map(|(n, _)| n).collect();
        assert_eq!(
            names,
            outputs[1].iter().map(|(n, _)| n).collect::<Vec<_>>(),
            "{sub}: differing file sets"
        );
        for ((name, a), (_, b)) in outputs[0].iter().zip(&outputs[1]) {
            assert_eq!(a, b, "{sub}: {name} differs between identical runs");
        }
    }
    pass(10, "CLI outputs are byte-identical across repeated seeded runs");
}

#[test]
fn classical_oscillator_closed_form_sanity() {
    // Supporting check for criterion 6's oracle: the RK4 flow reproduces
    // the closed form to far better than the quantum tolerances.
    let flow = ClassicalFlow::new(&vq("0.5*p1^2 + 0.5*q1^2", 1)).unwrap();
    let mut s = ClassicalState {
        time: 0.0,
        q: vec![1.0],
        p: vec![0.0],
    };
    for _ in 0..6284 {
        s = flow.step_rk4(&s, 1e-3).unwrap();
    }
    assert!((s.q[0] - s.time.cos()).abs() < 1e-10);
    assert!((s.p[0] + s.time.sin()).abs() < 1e-10);
}
