//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use cylrad::cylindrical::{CylindricalLevy, JumpLaw, LevyDriver};
use cylrad::operators::LinearOperator;
use cylrad::regularize::Radonifier;
use cylrad::space::{gram_schmidt_onb, hs_inclusion_norm_for_system, HilbertianSeminorm, ModelVector, OrthonormalSystem};
use cylrad::verify::{
    band_constant, check_cadlag, check_levy_increments, check_moment_bound, check_qwiener_covariance, check_version,
    default_covariance_probes, default_increment_probes, double_band_constant, probability_band_diagnostic,
    sazonov_certificate, MCConfig,
};

const SEED: u64 = 20_241_015;
const HORIZON: f64 = 1.0;
const GRID: usize = 256;

// pinned tolerances
const VERSION_TOL: f64 = 1e-10;
const VERSION_RUNTIME: Duration = Duration::from_secs(10);
const COVARIANCE_RUNTIME: Duration = Duration::from_secs(120);
const K_STDERR: f64 = 5.0;
const ALPHA: f64 = 0.01;
const STRUCTURE_TOL: f64 = 1e-12;
const CERTIFICATE_REF_C: f64 = 2.0;
const CONSTANT_TOL: f64 = 1e-5;
const PRINTED_BAND: f64 = 2.54149;
const PRINTED_DOUBLE_BAND: f64 = 5.08299;
const BIORTH_TOL: f64 = 1e-10;
const HS_INVARIANCE_RTOL: f64 = 1e-8;
const UNIT_RUNTIME: Duration = Duration::from_secs(5);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn wiener(n: usize) -> CylindricalLevy {
    CylindricalLevy::iid("wiener", LevyDriver::wiener(), n).unwrap()
}

fn reference(m: usize) -> Radonifier {
    let n = 50;
    Radonifier::new(wiener(n), LinearOperator::power_decay(n, 1.0).unwrap(), &HilbertianSeminorm::identity(n), m).unwrap()
}

fn compound_poisson() -> Radonifier {
    let n = 20;
    let x = CylindricalLevy::iid(
        "cpoisson",
        LevyDriver::compound_poisson(0.5, JumpLaw::Normal { mean: 0.0, std: 1.0 }).unwrap(),
        n,
    )
    .unwrap();
    Radonifier::new(x, LinearOperator::power_decay(n, 1.0).unwrap(), &HilbertianSeminorm::identity(n), n).unwrap()
}

fn cfg(replicas: usize) -> MCConfig {
    MCConfig { replicas, seed: SEED, grid_resolution: GRID, alpha: ALPHA, k: K_STDERR }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = check_version(&reference(50), HORIZON, false, &cfg(100)).unwrap();
    let elapsed = start.elapsed();
    outcome(
        r.pass && r.statistic <= VERSION_TOL && elapsed < VERSION_RUNTIME,
        format!("max deviation {:.3e} <= {VERSION_TOL:e}, {:.2?} < {VERSION_RUNTIME:?}", r.statistic, elapsed),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let rad = reference(50);
    let c = cfg(10_000);
    let probes = default_covariance_probes(&rad, HORIZON, &c);
    let r = check_qwiener_covariance(&rad, HORIZON, &probes, &c).unwrap();
    let elapsed = start.elapsed();
    outcome(
        r.pass && probes.len() == 20 && elapsed < COVARIANCE_RUNTIME,
        format!("worst z-score {:.3} <= {K_STDERR} on {} probes, {:.2?}", r.statistic, probes.len(), elapsed),
    )
}

fn criterion_3() -> Outcome {
    let m = check_moment_bound(&reference(10), HORIZON, 2.0, &cfg(10_000)).unwrap();
    let oracle = 4.0 * (11..=50).map(|j| 1.0 / (j * j) as f64).sum::<f64>();
    let bound = m.bound.unwrap_or(f64::NAN);
    let pass = m.upper == 20 && (bound - oracle).abs() <= 1e-12 * oracle && m.estimate <= oracle + K_STDERR * m.stderr;
    outcome(
        pass,
        format!("E sup q'(Y^20 - Y^10)^2 = {:.5} ± {:.1e} <= 4·Σ_{{j=11}}^{{50}} 1/j² = {oracle:.5}", m.estimate, m.stderr),
    )
}

fn criterion_4() -> Outcome {
    let c = cfg(10_000);
    let mut pass = true;
    let mut detail = String::new();
    for (label, rad) in [("cpoisson", compound_poisson()), ("wiener", reference(50))] {
        let r = check_levy_increments(&rad, HORIZON, &default_increment_probes(&rad, &c), &c).unwrap();
        pass &= r.pass;
        let summary: Vec<&str> = r.details.lines().collect();
        detail.push_str(&format!("[{label}: {}] ", summary.join("; ")));
    }
    outcome(pass, detail)
}

fn criterion_5() -> Outcome {
    let cp = check_cadlag(&compound_poisson(), HORIZON, &cfg(2_000)).unwrap();
    let w = check_cadlag(&reference(50), HORIZON, &cfg(2_000)).unwrap();
    outcome(
        cp.pass && cp.statistic <= STRUCTURE_TOL && w.pass,
        format!("[cpoisson: {}] [wiener: {}]", cp.details, w.details),
    )
}

fn criterion_6() -> Outcome {
    let reference = sazonov_certificate(&reference(50), HORIZON, 0.1, 10.0, &cfg(4_000)).unwrap();
    let n = 200;
    let identity = Radonifier::new(wiener(n), LinearOperator::identity(n), &HilbertianSeminorm::identity(n), n).unwrap();
    let contrast = sazonov_certificate(&identity, HORIZON, 0.01, 10.0, &cfg(1_000)).unwrap();
    let ref_c = reference.scale.unwrap_or(f64::INFINITY);
    let ref_cost = reference.hs_cost.unwrap_or(f64::INFINITY);
    let blow_up = match contrast.hs_cost {
        None => true,
        Some(cost) => cost >= 10.0 * ref_cost,
    };
    let pass = reference.pass && ref_c <= CERTIFICATE_REF_C && blow_up;
    outcome(
        pass,
        format!(
            "diag(1/j), eps=0.1: c = {ref_c:.4} (c·‖S‖_HS = {ref_cost:.4}); identity N=200, eps=0.01: {}",
            match (contrast.scale, contrast.hs_cost) {
                (Some(c), Some(cost)) => format!("c = {c:.4} (c·‖S‖_HS = {cost:.2}, {:.1}x reference)", cost / ref_cost),
                _ => format!("no admissible c <= {}", contrast.c_max),
            }
        ),
    )
}

fn criterion_7() -> Outcome {
    let d = probability_band_diagnostic(&reference(50), HORIZON, &[0.1], &cylrad::verify::default_radii(), &cfg(10_000)).unwrap();
    let constants_ok = (band_constant() - PRINTED_BAND).abs() <= CONSTANT_TOL
        && (double_band_constant() - PRINTED_DOUBLE_BAND).abs() <= CONSTANT_TOL;
    let crossing = d.levels[0].crossing;
    outcome(
        constants_ok && crossing.is_some() && d.pass,
        format!(
            "constants {:.6}/{:.6}; P(sup Σ c_j² > R) < {:.4} first at R = {crossing:?}",
            band_constant(),
            double_band_constant(),
            d.levels[0].band
        ),
    )
}

fn read_payloads(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "meta.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

fn criterion_8() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("run.toml");
    fs::write(
        &config,
        "dim = 8\nhorizon = 1.0\ngrid_resolution = 32\nseed = 11\nreplicas = 120\n\
         [driver]\nkind = \"cpoisson\"\nrate = 2.0\nvariance = 1.0\njump = { kind = \"normal\", mean = 0.0, std = 0.5 }\n\
         [operator]\ndecay = 1.0\n[truncation]\ntol = 0.5\n",
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_cylrad");
    let commands: [&[&str]; 4] = [
        &["simulate"],
        &["radonify"],
        &["verify", "--checks", "version,cadlag,moment,band"],
        &["certificate"],
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for cmd in commands {
        let mut runs = Vec::new();
        for rep in 0..2 {
            let out = tmp.path().join(format!("{}-{rep}", cmd[0]));
            let status = Command::new(bin)
                .args(cmd)
                .arg("--config")
                .arg(&config)
                .arg("--out")
                .arg(&out)
                .env_remove("CYLRAD_SEED")
                .output()
                .unwrap();
            if status.status.code().is_none_or(|c| c == 2) {
                pass = false;
                detail.push(format!("{} errored: {}", cmd[0], String::from_utf8_lossy(&status.stderr)));
            }
            runs.push(read_payloads(&out));
        }
        let same = !runs[0].is_empty() && runs[0] == runs[1];
        pass &= same;
        detail.push(format!("{}: {} files identical={same}", cmd[0], runs[0].len()));
    }
    outcome(pass, detail.join(", "))
}

fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> HilbertianSeminorm {
    let a = DMatrix::from_fn(n, rank, |_, _| rng.sample::<f64, _>(StandardNormal));
    HilbertianSeminorm::dense("q", &a * a.transpose()).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> ModelVector {
    ModelVector::new((0..n).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_par = 0.0f64;
    let mut worst_bi = 0.0f64;
    let mut worst_hs = 0.0f64;
    let mut schatten_ok = true;
    for trial in 0..50 {
        let n = 3 + trial % 6;
        let q = random_psd(&mut rng, n, 1 + trial % n);
        for _ in 0..20 {
            let x = random_vec(&mut rng, n);
            let y = random_vec(&mut rng, n);
            let lhs = q.eval(&(&x + &y)).unwrap().powi(2) + q.eval(&(&x - &y)).unwrap().powi(2);
            let rhs = 2.0 * q.eval(&x).unwrap().powi(2) + 2.0 * q.eval(&y).unwrap().powi(2);
            worst_par = worst_par.max((lhs - rhs).abs() / (1.0 + rhs));
        }
        let inputs: Vec<ModelVector> = (0..n + 2).map(|_| random_vec(&mut rng, n)).collect();
        let sys = gram_schmidt_onb(&q, &inputs, 1e-10).unwrap();
        for (i, f) in sys.duals().iter().enumerate() {
            for (j, phi) in sys.vectors().iter().enumerate() {
                worst_bi = worst_bi.max((f.dot(phi) - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        // p = ‖A·‖ with A vanishing on ker(q), so p is dominated by a multiple of q
        let b = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let gq = q.gram_matrix();
        let p = HilbertianSeminorm::dense("p", &gq * b.transpose() * &b * &gq).unwrap();
        let base = hs_inclusion_norm_for_system(&p, &sys).unwrap().hs_value;
        let other = OrthonormalSystem::from_standard_basis(&q, 1e-10).unwrap();
        let k = sys.len();
        let g = DMatrix::from_fn(k, k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let rot = g.qr().q();
        for alt in [other, sys.rotated(&rot).unwrap()] {
            let v = hs_inclusion_norm_for_system(&p, &alt).unwrap().hs_value;
            worst_hs = worst_hs.max((v - base).abs() / base.max(1e-300));
        }
        let s = LinearOperator::dense(DMatrix::from_fn(n, n + 1, |_, _| rng.sample::<f64, _>(StandardNormal))).unwrap();
        let norms: Vec<f64> = [1.0, 1.5, 2.0, 3.0, 4.0, 8.0].iter().map(|&r| s.schatten_norm(r).unwrap()).collect();
        schatten_ok &= norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    }
    let elapsed = start.elapsed();
    let pass = worst_par <= 1e-10 && worst_bi <= BIORTH_TOL && worst_hs <= HS_INVARIANCE_RTOL && schatten_ok && elapsed < UNIT_RUNTIME;
    outcome(
        pass,
        format!(
            "parallelogram {worst_par:.1e}, biorthogonality {worst_bi:.1e}, hs invariance {worst_hs:.1e}, schatten monotone {schatten_ok}, {elapsed:.2?}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("version property", criterion_1),
        ("Q-Wiener covariance", criterion_2),
        ("truncation bound", criterion_3),
        ("Lévy increments", criterion_4),
        ("càdlàg structure", criterion_5),
        ("Sazonov certificate", criterion_6),
        ("probability band", criterion_7),
        ("determinism", criterion_8),
        ("space/operator properties", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{name}]: {verdict} ({:.1?}) {}", i + 1, start.elapsed(), o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
