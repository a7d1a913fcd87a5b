//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::{PI, TAU};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use povm_core::cli::{
    convergence, dilemma_report, line, oracle_check, ConvergenceConfig, DilemmaConfig, LineConfig,
    OracleConfig, PacketSpec,
};
use povm_core::interval_sets::{CircleSet, RealSet};
use povm_core::linalg::{operator_norm, psd_certify, HermitianOperator, StateVector};
use povm_core::line_povm::{
    nonuniqueness_witness, variance_additivity_check, DensityKind, DensityProfile, LineGrid,
    SmearedPositionPovm,
};
use povm_core::moments::{moment_operator, noise_operator, recover_gram};
use povm_core::phase_povm::{
    preset_grams, seeded_grams, GeneratorSpec, GramMatrix, Indexing, PhasePovm,
};
use povm_core::spectral::{spectral_measure, variance_report_with};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn random_set(rng: &mut impl Rng) -> CircleSet {
    let a: f64 = rng.random_range(0.0..TAU);
    let b: f64 = rng.random_range(0.0..TAU);
    CircleSet::interval(a.min(b), a.max(b)).expect("valid interval")
}

/// Presets plus 50 seeded grams.
fn gram_family(ix: Indexing) -> Vec<(String, GramMatrix)> {
    let mut out: Vec<(String, GramMatrix)> = preset_grams(ix)
        .unwrap()
        .into_iter()
        .map(|(n, g)| (n.to_string(), g))
        .collect();
    for (i, g) in seeded_grams(ix, 50, 1000).unwrap().into_iter().enumerate() {
        out.push((format!("seeded#{i}"), g));
    }
    out
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_oracle() -> Outcome {
    let r = oracle_check(&OracleConfig {
        max_k: 6,
        max_d: 64,
    })
    .map_err(|e| e.to_string())?;
    ensure(r.max_abs_error <= 1e-11, || {
        format!("max error {:e} at {:?}", r.max_abs_error, r.worst)
    })?;
    Ok(format!(
        "max |closed - quadrature| = {:.2e} over {} coefficients",
        r.max_abs_error,
        r.rows.len()
    ))
}

fn c2_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut norm_worst, mut add_worst, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    for dim in [2, 8, 32] {
        let ix = Indexing::Nat { dim };
        for (name, g) in gram_family(ix) {
            let p = PhasePovm::new(g);
            let full = p.value(&CircleSet::full());
            norm_worst = norm_worst.max(
                full.sub(&HermitianOperator::identity(dim))
                    .unwrap()
                    .matrix()
                    .max_abs_entry(),
            );
            for _ in 0..20 {
                let x = random_set(&mut rng);
                let f = p.value(&x);
                let cert = psd_certify(&f, 1e-10).unwrap();
                min_eig = min_eig.min(cert.min_eig);
                ensure(cert.is_psd, || {
                    format!("{name} d={dim}: min eig {:e}", cert.min_eig)
                })?;
                let (lo, hi) = x.intervals()[0];
                let cut = rng.random_range(lo..=hi);
                let parts = p
                    .value(&CircleSet::interval(lo, cut).unwrap())
                    .add(&p.value(&CircleSet::interval(cut, hi).unwrap()))
                    .unwrap();
                add_worst = add_worst.max(f.sub(&parts).unwrap().matrix().max_abs_entry());
            }
        }
    }
    ensure(norm_worst <= 1e-12, || {
        format!("normalization defect {norm_worst:e}")
    })?;
    ensure(min_eig >= -1e-10, || format!("min eig {min_eig:e}"))?;
    ensure(add_worst <= 1e-12, || {
        format!("additivity defect {add_worst:e}")
    })?;
    Ok(format!(
        "normalization {norm_worst:.1e}, additivity {add_worst:.1e}, min eig {min_eig:.1e}"
    ))
}

fn c3_covariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let ix = if i % 2 == 0 {
            Indexing::Nat { dim: 12 }
        } else {
            Indexing::Int { half_width: 5 }
        };
        let spec = GeneratorSpec::Random {
            seed: 300 + i,
            t: rng.random_range(0.0..1.0),
        };
        let p = PhasePovm::from_spec(&spec, ix).unwrap();
        let x = random_set(&mut rng);
        let shift: f64 = rng.random_range(-20.0..20.0);
        worst = worst.max(p.covariance_defect(&x, shift).unwrap());
    }
    ensure(worst <= 1e-12, || format!("defect {worst:e}"))?;
    Ok(format!(
        "max covariance defect {worst:.2e} over 100 triples"
    ))
}

fn c4_round_trip() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for ix in [
        Indexing::Nat { dim: 8 },
        Indexing::Nat { dim: 32 },
        Indexing::Int { half_width: 6 },
    ] {
        for (name, g) in gram_family(ix) {
            let p = PhasePovm::new(g);
            let back =
                recover_gram(&moment_operator(&p, 1), ix).map_err(|e| format!("{name}: {e}"))?;
            worst = worst.max(
                back.matrix()
                    .sub(p.gram().matrix())
                    .unwrap()
                    .matrix()
                    .max_abs_entry(),
            );
            count += 1;
        }
    }
    ensure(worst <= 1e-12, || format!("residual {worst:e}"))?;
    Ok(format!(
        "max entrywise residual {worst:.2e} over {count} grams"
    ))
}

fn c5_noise() -> Outcome {
    let mut min_eig = f64::INFINITY;
    let mut min_norm = f64::INFINITY;
    for ix in [
        Indexing::Nat { dim: 1 },
        Indexing::Nat { dim: 8 },
        Indexing::Nat { dim: 24 },
    ] {
        for (name, g) in gram_family(ix) {
            let noise = noise_operator(&PhasePovm::new(g)).unwrap();
            let cert = psd_certify(&noise, 1e-10).unwrap();
            min_eig = min_eig.min(cert.min_eig);
            ensure(cert.is_psd, || {
                format!("{name}: noise min eig {:e}", cert.min_eig)
            })?;
            min_norm = min_norm.min(operator_norm(&noise).unwrap());
        }
    }
    ensure(min_norm > 1e-6, || format!("noise norm {min_norm:e}"))?;
    let orth = noise_operator(
        &PhasePovm::from_spec(&GeneratorSpec::Orthogonal, Indexing::Nat { dim: 16 }).unwrap(),
    )
    .unwrap();
    let dev = orth
        .sub(&HermitianOperator::identity(16).scale(PI * PI / 3.0))
        .unwrap()
        .matrix()
        .max_abs_entry();
    ensure(dev <= 1e-10, || {
        format!("orthogonal noise deviates by {dev:e}")
    })?;
    Ok(format!(
        "noise min eig {min_eig:.2e}, min norm {min_norm:.3}, orthogonal deviation {dev:.1e}"
    ))
}

fn c6_commutativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let sets: Vec<CircleSet> = (0..8).map(|_| random_set(&mut rng)).collect();
    let orth = PhasePovm::from_spec(&GeneratorSpec::Orthogonal, Indexing::Nat { dim: 10 }).unwrap();
    let (mut orth_comm, mut scalar_dev) = (0.0f64, 0.0f64);
    for x in &sets {
        let expect = HermitianOperator::identity(10).scale(x.measure() / TAU);
        scalar_dev = scalar_dev.max(orth.value(x).sub(&expect).unwrap().matrix().max_abs_entry());
        for y in &sets {
            orth_comm = orth_comm.max(orth.commutator_norm(x, y).unwrap());
        }
    }
    ensure(orth_comm <= 1e-12, || {
        format!("orthogonal commutator {orth_comm:e}")
    })?;
    ensure(scalar_dev <= 1e-12, || {
        format!("scalar measure deviation {scalar_dev:e}")
    })?;
    let can = PhasePovm::from_spec(&GeneratorSpec::Constant, Indexing::Nat { dim: 10 }).unwrap();
    let x = CircleSet::interval(0.0, PI).unwrap();
    let y = CircleSet::interval(0.5 * PI, 1.5 * PI).unwrap();
    let witnessed = can.commutator_norm(&x, &y).unwrap();
    ensure(witnessed > 1e-3, || {
        format!("canonical commutator {witnessed:e}")
    })?;
    let mut mult = 0.0f64;
    for ix in [Indexing::Nat { dim: 10 }, Indexing::Int { half_width: 4 }] {
        for (_, g) in gram_family(ix).into_iter().step_by(5) {
            let e = spectral_measure(&moment_operator(&PhasePovm::new(g), 1)).unwrap();
            for _ in 0..4 {
                let a = random_set(&mut rng).to_real_set();
                let b = random_set(&mut rng).to_real_set();
                mult = mult.max(e.multiplicativity_defect(&a, &b).unwrap());
            }
        }
    }
    ensure(mult <= 1e-10, || {
        format!("multiplicativity defect {mult:e}")
    })?;
    Ok(format!("orthogonal commutator {orth_comm:.1e}, canonical commutator {witnessed:.4}, spectral multiplicativity {mult:.1e}"))
}

/// Witness pair for the spectral pushforward defect, found by sweeping the
/// dilemma report's default sets and shifts.
const WITNESS_SET: (f64, f64) = (0.0, PI);
const WITNESS_SHIFT: f64 = 1.0;

fn c7_covariance_contrast() -> Outcome {
    let ix = Indexing::Nat { dim: 16 };
    let p = PhasePovm::from_spec(&GeneratorSpec::Constant, ix).unwrap();
    let x = CircleSet::interval(WITNESS_SET.0, WITNESS_SET.1).unwrap();
    let povm = p.covariance_defect(&x, WITNESS_SHIFT).unwrap();
    let spectral = spectral_measure(&moment_operator(&p, 1))
        .unwrap()
        .covariance_defect(ix, &x, WITNESS_SHIFT)
        .unwrap();
    ensure(povm <= 1e-12, || format!("POVM defect {povm:e}"))?;
    ensure(spectral > 1e-2, || format!("spectral defect {spectral:e}"))?;
    Ok(format!(
        "POVM defect {povm:.1e}, spectral defect {spectral:.4}"
    ))
}

fn c8_convergence() -> Outcome {
    let r = convergence(&ConvergenceConfig::default()).map_err(|e| e.to_string())?;
    ensure(r.nat_spectrum_widening, || {
        "nat spectrum does not widen strictly".into()
    })?;
    ensure(r.int_defect_decreasing, || {
        "int window defect does not decrease strictly".into()
    })?;
    ensure(r.nat_min_full_window_defect > 0.05, || {
        format!("nat full-window defect {:e}", r.nat_min_full_window_defect)
    })?;
    let int: Vec<String> = r
        .rows
        .iter()
        .filter(|row| row.indexing == "int")
        .map(|row| format!("{:.2e}", row.idempotence_defect))
        .collect();
    Ok(format!(
        "int window defects [{}], nat full-window min {:.3}",
        int.join(", "),
        r.nat_min_full_window_defect
    ))
}

fn c9_statistics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let povms = [
        PhasePovm::from_spec(&GeneratorSpec::Constant, Indexing::Nat { dim: 12 }).unwrap(),
        PhasePovm::from_spec(
            &GeneratorSpec::Random { seed: 91, t: 0.6 },
            Indexing::Nat { dim: 12 },
        )
        .unwrap(),
        PhasePovm::from_spec(&GeneratorSpec::Constant, Indexing::Int { half_width: 5 }).unwrap(),
        PhasePovm::new(preset_grams(Indexing::Nat { dim: 12 }).unwrap().remove(2).1),
    ];
    let spectra: Vec<_> = povms
        .iter()
        .map(|p| spectral_measure(&moment_operator(p, 1)).unwrap())
        .collect();
    let (mut mean_gap, mut var_gap, mut residual) = (0.0f64, f64::INFINITY, 0.0f64);
    for i in 0..100 {
        let (p, e) = (&povms[i % 4], &spectra[i % 4]);
        let phi = StateVector::random(p.dim(), &mut rng).unwrap();
        let r = variance_report_with(p, e, &phi).unwrap();
        mean_gap = mean_gap.max((r.mean - r.mean_spectral).abs());
        var_gap = var_gap.min(r.var_povm - r.var_spectral);
        residual = residual.max(r.residual().abs());
    }
    ensure(mean_gap <= 1e-10, || format!("mean gap {mean_gap:e}"))?;
    ensure(var_gap >= -1e-10, || {
        format!("var_povm - var_spectral = {var_gap:e}")
    })?;
    ensure(residual <= 1e-9, || {
        format!("decomposition residual {residual:e}")
    })?;
    Ok(format!(
        "mean gap {mean_gap:.1e}, min variance excess {var_gap:.3}, residual {residual:.1e}"
    ))
}

fn c10_line() -> Outcome {
    let report = line(&LineConfig::default()).map_err(|e| e.to_string())?;
    let moment = report
        .densities
        .iter()
        .map(|d| d.first_moment_error)
        .fold(0.0, f64::max);
    ensure(moment <= 1e-8, || format!("first moment error {moment:e}"))?;

    let state = PacketSpec {
        center: 0.0,
        width: 0.5,
    };
    let mut slopes = Vec::new();
    let mut at_finest = 0.0f64;
    for kind in [
        DensityKind::Uniform {
            half_width: 1.0,
            center: 0.0,
        },
        DensityKind::Gaussian {
            sigma: 0.5,
            center: 0.0,
        },
    ] {
        let mut residuals = Vec::new();
        for h in [0.04, 0.02, 0.01] {
            let grid = LineGrid::symmetric(7.0, h).unwrap();
            let povm = SmearedPositionPovm::new(DensityProfile::new(grid, kind.clone()).unwrap());
            let phi = grid.gaussian_state(state.center, state.width).unwrap();
            residuals.push(
                variance_additivity_check(&povm, &phi)
                    .map_err(|e| e.to_string())?
                    .residual,
            );
        }
        at_finest = at_finest.max(residuals[2]);
        let slope = (residuals[0] / residuals[2]).log2() / 2.0;
        slopes.push(slope);
    }
    ensure(at_finest <= 1e-4, || {
        format!("residual {at_finest:e} at spacing 0.01")
    })?;
    ensure(slopes.iter().all(|s| (1.8..=2.2).contains(s)), || {
        format!("convergence orders {slopes:?}")
    })?;

    let w = nonuniqueness_witness(&LineGrid::symmetric(6.0, 0.01).unwrap())
        .map_err(|e| e.to_string())?;
    ensure(w.moment_gap <= 1e-8, || {
        format!("moment gap {:e}", w.moment_gap)
    })?;
    ensure(w.measure_gap > 0.1, || {
        format!("measure gap {}", w.measure_gap)
    })?;
    let half = RealSet::interval(0.0, 0.5).unwrap();
    let e1 = SmearedPositionPovm::new(w.f1.clone()).value(&half).operator;
    let e2 = SmearedPositionPovm::new(w.f2.clone()).value(&half).operator;
    Ok(format!(
        "moment error {moment:.1e}, residual {at_finest:.2e} at 0.01, orders {:.2}/{:.2}, gaps {:.1e}/{:.3} ([0,0.5): {:.3})",
        slopes[0],
        slopes[1],
        w.moment_gap,
        w.measure_gap,
        e1.distance(&e2)
    ))
}

fn c11_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("povm-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let config = dir.join("dilemma.json");
    std::fs::write(&config, r#"{"generator":{"kind":"random","seed":11,"t":0.4},"indexing":{"kind":"nat","dim":16},"random_states":6}"#)
        .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.join(format!("run{run}"));
        let status = Command::new(env!("CARGO_BIN_EXE_povm"))
            .args(["dilemma-report", "--seed", "7", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || {
            String::from_utf8_lossy(&status.stderr).into_owned()
        })?;
        outputs.push(std::fs::read(out.join("dilemma_report.json")).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure(outputs[0] == outputs[1], || "reports differ".into())?;
    // the in-process report must agree with what the binary wrote
    let cfg: DilemmaConfig = serde_json::from_str(
        r#"{"generator":{"kind":"random","seed":11,"t":0.4},"indexing":{"kind":"nat","dim":16},"random_states":6,"seed":7}"#,
    )
    .unwrap();
    let r = dilemma_report(&cfg).map_err(|e| e.to_string())?;
    let written: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap();
    ensure(
        written["result"]["round_trip_residual"].as_f64() == Some(r.round_trip_residual),
        || "report mismatch".into(),
    )?;
    Ok(format!("{} identical bytes", outputs[0].len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("coefficient oracle equivalence", 5, c1_oracle),
        ("POVM axioms at truncation", 30, c2_axioms),
        ("exact covariance", 10, c3_covariance),
        ("first-moment round trip", 10, c4_round_trip),
        ("moment ordering and strictness", 10, c5_noise),
        ("commutativity dichotomy", 20, c6_commutativity),
        ("covariance contrast", 10, c7_covariance_contrast),
        ("convergence sweeps", 60, c8_convergence),
        ("statistical contrast", 20, c9_statistics),
        ("line contrast", 30, c10_line),
        ("determinism", 10, c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(*limit) => Err(format!(
                "{detail}; took {:.2}s, limit {limit}s",
                elapsed.as_secs_f64()
            )),
            other => other,
        };
        match outcome {
            Ok(detail) => println!(
                "PASS {:>2} {name}: {detail} [{:.2}s]",
                i + 1,
                elapsed.as_secs_f64()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL {:>2} {name}: {why} [{:.2}s]",
                    i + 1,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
