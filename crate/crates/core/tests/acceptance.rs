//! Acceptance criteria. Runs as a plain binary so every PASS/FAIL line is
//! printed regardless of test-output capture; exits nonzero on any FAIL.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use fockport::elements::apply_ideal_beam_splitter;
use fockport::formulas::{self, ConditionalCoefficients, PsiSign};
use fockport::stations::{
    alice_analyzer_field, bell_state_statistics, teleported_fidelity, BellLabel, Classification,
};
use fockport::{
    bob_correct, build_quantum_channel, fidelity, partial_trace, run_protocol, BeamSplitterParams,
    CrossKerrParams, DetectorParams, FockStateVector, InputStateSpec, ModeId, ModeRegistry,
    NoiseProfile, OpticalElement, PhasePlateParams,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<Vec<String>, String>;

fn m(label: u8) -> ModeId {
    ModeId::system(label)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<String, String> {
    let took = start.elapsed();
    ensure(took < budget, || {
        format!("took {took:?}, budget {budget:?}")
    })?;
    Ok(format!("runtime {took:.2?} (budget {budget:?})"))
}

fn random_spec(rng: &mut StdRng) -> InputStateSpec {
    InputStateSpec::from_angles(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI))
}

fn heralded(
    spec: &InputStateSpec,
    noise: &NoiseProfile,
    pattern: [u8; 4],
) -> Result<(f64, FockStateVector), String> {
    let o = run_protocol(spec, noise)
        .map_err(|e| e.to_string())?
        .into_iter()
        .find(|o| o.pattern == pattern)
        .ok_or("pattern never occurs")?;
    Ok((o.probability, o.conditional_state))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let ideal = NoiseProfile::ideal();
    let mut worst_p = 0.0f64;
    let mut worst_f = 0.0f64;
    for _ in 0..50 {
        let spec = random_spec(&mut rng);
        let outcomes = run_protocol(&spec, &ideal).map_err(|e| e.to_string())?;
        let mut seen: Vec<[u8; 4]> = outcomes
            .iter()
            .filter(|o| o.probability > 1e-12)
            .map(|o| o.pattern)
            .collect();
        seen.sort();
        let mut want: Vec<[u8; 4]> = BellLabel::ALL.iter().map(|l| l.pattern()).collect();
        want.sort();
        ensure(seen == want, || format!("patterns {seen:?}"))?;
        for o in outcomes
            .iter()
            .filter(|o| o.classification != Classification::Rejected)
        {
            worst_p = worst_p.max((o.probability - 0.25).abs());
            let corrected = bob_correct(o, &ideal).map_err(|e| e.to_string())?;
            let f = teleported_fidelity(&corrected, &spec).map_err(|e| e.to_string())?;
            worst_f = worst_f.max((f - 1.0).abs());
        }
    }
    ensure(worst_p <= 1e-12, || format!("max |P - 1/4| = {worst_p:e}"))?;
    ensure(worst_f <= 1e-12, || format!("max |F - 1| = {worst_f:e}"))?;
    Ok(vec![
        format!("50 inputs: max |P - 1/4| = {worst_p:.2e}, max |F - 1| = {worst_f:.2e}"),
        within_budget(start, Duration::from_secs(1))?,
    ])
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let closed = formulas::channel_fidelity(0.98, 0.98).map_err(|e| e.to_string())?;
    let sim = build_quantum_channel(&NoiseProfile::default()).map_err(|e| e.to_string())?;
    let rho = partial_trace(&sim, &[m(3), m(4), m(5), m(6)]).map_err(|e| e.to_string())?;
    let i = Complex64::new(0.0, FRAC_1_SQRT_2);
    let target = FockStateVector::from_terms(
        ModeRegistry::with_system_modes(3..=6),
        [(vec![0, 1, 1, 0], i), (vec![1, 0, 0, 1], i)],
    )
    .map_err(|e| e.to_string())?;
    let simulated = fidelity(&rho, &target).map_err(|e| e.to_string())?;
    ensure((0.915..=0.925).contains(&closed), || {
        format!("closed form {closed}")
    })?;
    ensure((closed - simulated).abs() <= 1e-10, || {
        format!("closed {closed} vs simulated {simulated}")
    })?;
    Ok(vec![
        format!(
            "closed {closed:.10}, simulated {simulated:.10}, diff {:.1e}",
            (closed - simulated).abs()
        ),
        within_budget(start, Duration::from_secs(1))?,
    ])
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let spec = InputStateSpec::from_angles(FRAC_PI_4, 0.0);
    let mut notes = Vec::new();
    for (eps, expect) in [(1.0, 0.22), (0.7, 0.11)] {
        let closed = formulas::detection_probability_0110(&spec, 0.98, 0.98, eps)
            .map_err(|e| e.to_string())?;
        let noise = NoiseProfile {
            epsilon: eps,
            ..NoiseProfile::default()
        };
        let (sim, _) = heralded(&spec, &noise, [0, 1, 1, 0])?;
        ensure((closed - expect).abs() <= 0.005, || {
            format!("eps={eps}: closed {closed} vs {expect}")
        })?;
        ensure((closed - sim).abs() <= 1e-10, || {
            format!("eps={eps}: closed {closed} vs simulated {sim}")
        })?;
        let lit = ConditionalCoefficients::literal(&spec, 0.98, 0.98).map_err(|e| e.to_string())?;
        let n = formulas::normalization(&lit, 0.98, 0.98).map_err(|e| e.to_string())?;
        notes.push(format!(
            "eps={eps}: closed {closed:.10}, simulated {sim:.10}; published-coefficient value {:.10} (differs via e,f)",
            eps * eps / (n * n)
        ));
    }
    notes.push(within_budget(start, Duration::from_secs(1))?);
    Ok(notes)
}

fn criterion_4() -> Check {
    let noise = NoiseProfile {
        epsilon: 1.0,
        ..NoiseProfile::default()
    };
    let mut notes = Vec::new();
    for (label, sign, main) in [
        (BellLabel::PsiPlus, PsiSign::Plus, [0u8, 1, 1, 0]),
        (BellLabel::PsiMinus, PsiSign::Minus, [1u8, 0, 1, 0]),
    ] {
        let field = alice_analyzer_field(&label.state(), &noise).map_err(|e| e.to_string())?;
        let width = field.registry().len();
        let amp = |p: [u8; 4]| {
            let mut c = p.to_vec();
            c.resize(width, 0);
            field.amplitude(&c)
        };
        let branches =
            formulas::analyzer_bell_branches(sign, 0.98, 0.98).map_err(|e| e.to_string())?;
        let closed_main = branches
            .iter()
            .find(|(p, _)| *p == main)
            .expect("main branch")
            .1;
        // Remove the global phase using the heralding amplitude.
        let sim_phase = amp(main) / amp(main).norm();
        let closed_phase = closed_main / closed_main.norm();
        let mut line = format!("{label}:");
        for (pattern, closed) in branches {
            let got = amp(pattern) / sim_phase;
            // Published values: 0.9604 on the heralding pattern and 0.0049 on
            // two cross patterns; the fourth is O(1e-6).
            let expected = if pattern == main {
                0.9604
            } else if closed.norm() > 1e-3 {
                0.0049
            } else {
                closed.norm()
            };
            ensure((got.norm() - expected).abs() <= 1e-4, || {
                format!("{label} {pattern:?}: |amp| {} vs {expected}", got.norm())
            })?;
            ensure((got - closed / closed_phase).norm() <= 1e-12, || {
                format!(
                    "{label} {pattern:?}: relative phase {got} vs {}",
                    closed / closed_phase
                )
            })?;
            line.push_str(&format!(
                " {}{}{}{}={:.4}",
                pattern[0],
                pattern[1],
                pattern[2],
                pattern[3],
                got.norm()
            ));
        }
        notes.push(line);
    }
    for label in BellLabel::ALL {
        let stats =
            bell_state_statistics(label, &NoiseProfile::ideal()).map_err(|e| e.to_string())?;
        for (pattern, p) in stats {
            let want = if pattern == label.pattern() { 1.0 } else { 0.0 };
            ensure((p - want).abs() <= 1e-12, || {
                format!("ideal {label} -> {pattern:?}: {p}")
            })?;
        }
    }
    notes.push("ideal: each Bell input lands on its own pattern with probability 1".into());
    Ok(notes)
}

/// Coefficients a..f read off the simulated heralded state.
fn simulated_coefficients(p: f64, state: &FockStateVector, noise: &NoiseProfile) -> [Complex64; 6] {
    let (kappa, eta, eps) = (noise.kappa, noise.eta, noise.epsilon);
    let reg = state.registry();
    let scale = p.sqrt() / eps;
    let one = |id: ModeId| -> Complex64 {
        let mut c = vec![0u8; reg.len()];
        c[reg.position(id).expect("mode present")] = 1;
        state.amplitude(&c) * scale
    };
    let env = |el: &str, port: u8| {
        reg.find_environment(el, m(port))
            .expect("environment present")
    };
    let (g, l) = ((1.0 - kappa).sqrt(), (1.0 - eta).sqrt());
    [
        one(m(6)),
        one(m(5)),
        one(env("BS2", 5)) / g,
        one(env("BS3", 6)) / g,
        one(env("KM1", 6)) / l,
        one(env("BS3", 5)) / g,
    ]
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let noise_axis = [0.9, 0.95, 0.98];
    let mut worst = 0.0f64;
    let mut worst_literal_f = 0.0f64;
    let mut coeff_gap = [0.0f64; 6];
    let mut points = 0;
    for gi in 0..10 {
        let gamma = PI * gi as f64 / 9.0;
        for li in 0..10 {
            let lambda = 2.0 * PI * li as f64 / 10.0;
            let spec = InputStateSpec::from_angles(gamma, lambda);
            for kappa in noise_axis {
                for eta in noise_axis {
                    let noise = NoiseProfile {
                        kappa,
                        eta,
                        ..NoiseProfile::default()
                    };
                    let (p, state) = heralded(&spec, &noise, [0, 1, 1, 0])?;
                    let sim = teleported_fidelity(&state, &spec).map_err(|e| e.to_string())?;
                    let closed = formulas::teleport_fidelity(&spec, kappa, eta)
                        .map_err(|e| e.to_string())?;
                    worst = worst.max((sim - closed).abs());
                    let lit = ConditionalCoefficients::literal(&spec, kappa, eta)
                        .map_err(|e| e.to_string())?;
                    let f_lit = formulas::teleport_fidelity_with(&lit, &spec, kappa, eta)
                        .map_err(|e| e.to_string())?;
                    worst_literal_f = worst_literal_f.max((sim - f_lit).abs());
                    let measured = simulated_coefficients(p, &state, &noise);
                    for (k, (_, value)) in lit.named().iter().enumerate() {
                        coeff_gap[k] = coeff_gap[k].max((measured[k] - value).norm());
                    }
                    points += 1;
                }
            }
        }
    }
    ensure(points == 900, || format!("{points} grid points"))?;
    ensure(worst <= 1e-10, || {
        format!("max |F_sim - F_closed| = {worst:e}")
    })?;
    let gaps = ["a", "b", "c", "d", "e", "f"]
        .iter()
        .zip(coeff_gap)
        .map(|(n, g)| format!("{n}:{g:.1e}"))
        .collect::<Vec<_>>()
        .join(" ");
    Ok(vec![
        format!("900 points: max |F_sim - F_closed| = {worst:.2e} (reconciled e = i f, f with (1+eta))"),
        format!("published coefficients: max |F_sim - F_published| = {worst_literal_f:.2e}; max |coef_sim - coef_published| {gaps}"),
        within_budget(start, Duration::from_secs(30))?,
    ])
}

fn criterion_6() -> Check {
    let f = |gamma: f64, lambda: f64| {
        formulas::teleport_fidelity(&InputStateSpec::from_angles(gamma, lambda), 0.98, 0.98)
    };
    let lambdas: Vec<f64> = (0..72).map(|i| 2.0 * PI * i as f64 / 72.0).collect();
    let spread = |gamma: f64| -> Result<f64, String> {
        let vals = lambdas
            .iter()
            .map(|&l| f(gamma, l))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let max = vals.iter().copied().fold(f64::MIN, f64::max);
        let min = vals.iter().copied().fold(f64::MAX, f64::min);
        Ok(max - min)
    };
    let f0 = f(0.0, 0.0).map_err(|e| e.to_string())?;
    let f90 = f(FRAC_PI_2, 0.0).map_err(|e| e.to_string())?;
    ensure(f90 > f0, || format!("F(pi/2) = {f90} <= F(0) = {f0}"))?;
    let (s0, s90, s45) = (spread(0.0)?, spread(FRAC_PI_2)?, spread(FRAC_PI_4)?);
    ensure(s0 < 1e-12 && s90 < 1e-12, || {
        format!("lambda spread at 0: {s0:e}, at pi/2: {s90:e}")
    })?;
    ensure(s45 > 1e-4, || format!("lambda spread at pi/4: {s45:e}"))?;
    // Spot check the surface against the simulator.
    let (_, state) = heralded(
        &InputStateSpec::from_angles(FRAC_PI_4, 1.0),
        &NoiseProfile::default(),
        [0, 1, 1, 0],
    )?;
    let sim = teleported_fidelity(&state, &InputStateSpec::from_angles(FRAC_PI_4, 1.0))
        .map_err(|e| e.to_string())?;
    let closed = f(FRAC_PI_4, 1.0).map_err(|e| e.to_string())?;
    ensure((sim - closed).abs() < 1e-10, || {
        format!("surface point: sim {sim} vs closed {closed}")
    })?;
    Ok(vec![format!(
        "F(0) = {f0:.8}, F(pi/2) = {f90:.8}; lambda spread at 0: {s0:.1e}, pi/2: {s90:.1e}, pi/4: {s45:.4}"
    )])
}

fn random_circuit(rng: &mut StdRng, lossless: bool) -> Vec<OpticalElement> {
    let len = rng.gen_range(1..10);
    (0..len)
        .map(|i| {
            let label = format!("E{i}");
            let a = rng.gen_range(1..=6u8);
            let b = loop {
                let b = rng.gen_range(1..=6u8);
                if b != a {
                    break b;
                }
            };
            let (a, b) = (m(a), m(b));
            let angle = rng.gen_range(-PI..PI);
            let s = if lossless {
                1.0
            } else {
                rng.gen_range(0.05..=1.0)
            };
            match rng.gen_range(0..4) {
                0 => OpticalElement::BeamSplitter {
                    label,
                    a,
                    b,
                    params: BeamSplitterParams::new(angle, s).unwrap(),
                },
                1 => OpticalElement::CrossKerr {
                    label,
                    a,
                    b,
                    params: CrossKerrParams::new(angle, s).unwrap(),
                },
                2 => OpticalElement::PhasePlate {
                    label,
                    mode: a,
                    params: PhasePlateParams::new(angle, s).unwrap(),
                },
                _ => OpticalElement::Detector {
                    label,
                    mode: a,
                    params: DetectorParams::new(s).unwrap(),
                },
            }
        })
        .collect()
}

fn random_state(rng: &mut StdRng) -> FockStateVector {
    let photons = rng.gen_range(1..=3);
    let terms = (0..rng.gen_range(1..5)).map(|_| {
        let mut counts = vec![0u8; 6];
        for _ in 0..photons {
            counts[rng.gen_range(0..6)] += 1;
        }
        (
            counts,
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
    });
    let mut s = FockStateVector::from_terms(ModeRegistry::new(), terms).unwrap();
    s.normalize().unwrap();
    s
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(7);
    let system: Vec<ModeId> = (1..=6).map(m).collect();
    let (mut worst_norm, mut worst_herm, mut worst_trace, mut min_eig) =
        (0.0f64, 0.0f64, 0.0f64, f64::MAX);
    for case in 0..200 {
        let lossless = case % 4 == 0;
        let circuit = random_circuit(&mut rng, lossless);
        let mut s = random_state(&mut rng);
        let photons = s.total_photons().expect("fixed photon number");
        let mut vacuum = FockStateVector::vacuum(ModeRegistry::new());
        for el in &circuit {
            el.apply(&mut s).map_err(|e| e.to_string())?;
            el.apply(&mut vacuum).map_err(|e| e.to_string())?;
            worst_norm = worst_norm.max((s.norm_sqr() - 1.0).abs());
            ensure(s.total_photons() == Some(photons), || {
                format!("case {case}: photon number changed")
            })?;
        }
        let width = vacuum.registry().len();
        ensure(
            vacuum.len() == 1 && vacuum.amplitude(&vec![0; width]) == Complex64::new(1.0, 0.0),
            || format!("case {case}: vacuum moved"),
        )?;
        let keep: Vec<ModeId> = system
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let keep = if keep.is_empty() { vec![m(1)] } else { keep };
        let rho = partial_trace(&s, &keep).map_err(|e| e.to_string())?;
        worst_herm = worst_herm.max(rho.hermiticity_defect());
        worst_trace = worst_trace.max((rho.trace() - 1.0).norm());
        min_eig = min_eig.min(rho.eigenvalues().first().copied().unwrap_or(0.0));
        if lossless {
            let env_silent = s.terms().all(|(o, _)| o.0[6..].iter().all(|&n| n == 0));
            ensure(env_silent, || {
                format!("case {case}: lossless circuit excited an environment")
            })?;
        }
    }
    ensure(worst_norm <= 1e-12, || format!("norm drift {worst_norm:e}"))?;
    ensure(worst_herm <= 1e-12, || {
        format!("hermiticity defect {worst_herm:e}")
    })?;
    ensure(worst_trace <= 1e-12, || {
        format!("trace defect {worst_trace:e}")
    })?;
    ensure(min_eig >= -1e-10, || format!("eigenvalue {min_eig:e}"))?;

    let mut hom = FockStateVector::from_terms(
        ModeRegistry::with_system_modes([1, 2]),
        [(vec![1, 1], Complex64::new(1.0, 0.0))],
    )
    .unwrap();
    apply_ideal_beam_splitter(&mut hom, m(1), m(2), FRAC_PI_4).map_err(|e| e.to_string())?;
    let i = Complex64::new(0.0, FRAC_1_SQRT_2);
    let hom_err = (hom.amplitude(&[2, 0]) - i).norm()
        + (hom.amplitude(&[0, 2]) - i).norm()
        + hom.amplitude(&[1, 1]).norm();
    ensure(hom_err < 1e-15, || format!("HOM error {hom_err:e}"))?;

    // Protocol-level vacuum: no photons in, no photons out.
    let mut empty = FockStateVector::vacuum(ModeRegistry::new());
    empty = fockport::stations::alice_premeasure(&empty, &NoiseProfile::default())
        .map_err(|e| e.to_string())?;
    ensure(empty.len() == 1, || {
        "vacuum through Alice's station acquired terms".into()
    })?;

    Ok(vec![
        format!(
            "200 circuits: norm drift {worst_norm:.1e}, hermiticity {worst_herm:.1e}, trace {worst_trace:.1e}, min eigenvalue {min_eig:.1e}, HOM error {hom_err:.1e}"
        ),
        within_budget(start, Duration::from_secs(10))?,
    ])
}

fn criterion_8() -> Check {
    let mut rng = StdRng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut rejected_patterns = 0;
    for _ in 0..20 {
        let noise = NoiseProfile::new(
            rng.gen_range(0.5..=1.0),
            rng.gen_range(0.5..=1.0),
            rng.gen_range(0.3..=1.0),
            rng.gen_range(0.5..=1.0),
        )
        .map_err(|e| e.to_string())?;
        let spec = random_spec(&mut rng);
        let outcomes = run_protocol(&spec, &noise).map_err(|e| e.to_string())?;
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        worst = worst.max((total - 1.0).abs());
        for o in &outcomes {
            let one_one = o.pattern[0] + o.pattern[1] == 1 && o.pattern[2] + o.pattern[3] == 1;
            if o.classification == Classification::Rejected {
                rejected_patterns += 1;
                ensure(!one_one, || {
                    format!("rejected pattern {:?} obeys the rule", o.pattern)
                })?;
            } else {
                ensure(one_one, || {
                    format!("accepted pattern {:?} breaks the rule", o.pattern)
                })?;
            }
        }
    }
    ensure(worst <= 1e-12, || {
        format!("probability sum off by {worst:e}")
    })?;
    Ok(vec![format!("20 configurations, {rejected_patterns} rejected patterns checked, max |sum - 1| = {worst:.1e}")])
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 8] = [
        ("ideal protocol exactness", criterion_1),
        ("channel fidelity", criterion_2),
        ("detection probability", criterion_3),
        ("Bell-state analyzer amplitudes", criterion_4),
        ("closed-form fidelity sweep", criterion_5),
        ("fidelity surface shape", criterion_6),
        ("invariant suite", criterion_7),
        ("post-selection soundness", criterion_8),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(notes) => {
                println!("PASS criterion {} ({name})", n + 1);
                for note in notes {
                    println!("    {note}");
                }
            }
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why}", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
