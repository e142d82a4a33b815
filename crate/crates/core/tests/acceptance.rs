//! Acceptance checks. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nclass::filters::{
    appendix_family, appendix_family_with_damping, autocorrelate, decay_proxy, disc_overlap,
    filter_from_witness, verify_filter_conditions, ConditionConfig, FilterFamily, FilterKernel,
    FilterTransform, KernelQuad, WitnessCharFn,
};
use nclass::fock::WignerMap;
use nclass::nfp::nfp_point;
use nclass::witness::{
    expectation, first_order_char_test, mandel_q, min_quadrature_variance, polar_grid, scan_width,
    witness_coherent_closed_form, witness_diag_table, witness_trace, WidthScan, WitnessSpec,
};
use nclass::{ComplexPoint, DensityMatrix, FockSpace, QuadConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SPATS_ETA: f64 = 0.5;
const SPATS_NBARS: [f64; 3] = [0.8, 1.0, 1.2];
const SPATS_DIM: usize = 256;
const W_TOL: f64 = 1e-4;

const BLIND_TOL: f64 = 1e-9;
const WIGNER_FLOOR: f64 = -1e-6;
const TRACE_TOL: f64 = 1e-2;
const ROUTE_TOL: f64 = 1e-6;
const CLASSICAL_FLOOR: f64 = -1e-9;
const CLOSED_FORM_TOL: f64 = 1e-8;
const FOCK_ROOT_TOL: f64 = 1e-3;
const APPENDIX_ORIGIN_TOL: f64 = 1e-12;
const TRANSFORM_FLOOR: f64 = -1e-8;
const LENS_TOL: f64 = 1e-8;
const PARSEVAL_TOL: f64 = 1e-8;

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn point(re: f64, im: f64) -> ComplexPoint {
    ComplexPoint { re, im }
}

fn random_disc_point(rng: &mut ChaCha8Rng, radius: f64) -> ComplexPoint {
    let r = radius * rng.gen::<f64>().sqrt();
    let t = 2.0 * PI * rng.gen::<f64>();
    point(r * t.cos(), r * t.sin())
}

fn width_grid() -> Vec<f64> {
    (0..=55).map(|k| 0.5 + 0.1 * k as f64).collect()
}

fn spats_scans() -> Vec<(f64, WidthScan)> {
    let space = FockSpace::new(SPATS_DIM).unwrap();
    SPATS_NBARS
        .iter()
        .map(|&nbar| {
            let rho = space.spats(nbar, SPATS_ETA).unwrap();
            (
                nbar,
                scan_width(&rho, ComplexPoint::ZERO, &width_grid(), W_TOL).unwrap(),
            )
        })
        .collect()
}

fn criterion_1(scans: &[(f64, WidthScan)]) -> Outcome {
    let mut detail = Vec::new();
    let mut each = true;
    let mut stars = Vec::new();
    let mut minima = Vec::new();
    for (nbar, scan) in scans {
        let first = scan.points[0].1;
        let starts_positive = first.certified && first.value > 0.0;
        let w_star = scan.w_star();
        each &= starts_positive && w_star.is_some_and(f64::is_finite);
        let (min_w, min_v) = scan.min().unwrap();
        stars.push(w_star.unwrap_or(f64::NAN));
        minima.push(min_v);
        detail.push(format!(
            "nbar={nbar}: W(0.5)={:.4e} w*={} min={min_v:.4e}@{min_w:.1}",
            first.value,
            w_star.map_or("none".into(), |w| format!("{w:.4}")),
        ));
    }
    let increasing = stars.windows(2).all(|p| p[0] < p[1]);
    let deepest = minima.iter().all(|m| minima[0] <= *m);
    detail.push(format!(
        "each crosses: {each}; w* increasing in nbar: {increasing}; deepest minimum at nbar=0.8: {deepest}"
    ));
    outcome(each && increasing && deepest, detail.join("; "))
}

fn criterion_2(scans: &[(f64, WidthScan)]) -> Outcome {
    let rho = FockSpace::new(SPATS_DIM).unwrap().spats(0.8, SPATS_ETA).unwrap();
    let q = mandel_q(&rho).unwrap();
    let (var, _) = min_quadrature_variance(&rho, 180).unwrap();
    let first = first_order_char_test(&rho, &polar_grid(3.0, 30, 32)).unwrap();
    let wigner = WignerMap::new(&rho, &QuadConfig::default()).unwrap();
    let w_min = polar_grid(3.0, 12, 24)
        .into_iter()
        .chain(std::iter::once(ComplexPoint::ZERO))
        .map(|a| wigner.eval(a).unwrap())
        .fold(f64::INFINITY, f64::min);
    let detected = scans[0].1.w_star().is_some();
    let pass = q >= 0.0
        && var >= 1.0 - BLIND_TOL
        && first.max_modulus <= 1.0 + BLIND_TOL
        && w_min >= WIGNER_FLOOR
        && detected;
    outcome(
        pass,
        format!(
            "Q={q:.4e} var_min={var:.6} max|Phi|={:.12} wigner_min={w_min:.3e} witness detection={detected}",
            first.max_modulus
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for w in [1.0, 2.0, 3.0] {
        let coarse = (witness_trace(w, 2_500).unwrap() - 1.0 / PI).abs();
        let fine = (witness_trace(w, 10_000).unwrap() - 1.0 / PI).abs();
        pass &= fine < TRACE_TOL && fine < coarse;
        detail.push(format!("w={w}: |err| {coarse:.3e} (2500) -> {fine:.3e} (10000)"));
    }
    outcome(pass, detail.join("; "))
}

fn random_state(rng: &mut ChaCha8Rng, space: &FockSpace) -> DensityMatrix {
    let count = rng.gen_range(1..=3);
    let parts: Vec<DensityMatrix> = (0..count)
        .map(|_| match rng.gen_range(0..4) {
            0 => space.coherent(random_disc_point(rng, 1.5)).unwrap(),
            1 => space.thermal(rng.gen_range(0.05..1.0)).unwrap(),
            2 => space.fock(rng.gen_range(0..5)).unwrap(),
            _ => space
                .spats(rng.gen_range(0.1..1.2), rng.gen_range(0.3..1.0))
                .unwrap(),
        })
        .collect();
    let weights: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mix: Vec<(f64, &DensityMatrix)> = weights.iter().map(|w| w / total).zip(&parts).collect();
    DensityMatrix::mixture(&mix).unwrap()
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let space = FockSpace::new(64).unwrap();
    let disc = FilterFamily::disc();
    let cfg = QuadConfig::default();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let rho = random_state(&mut rng, &space);
        let w = rng.gen_range(0.3..5.0);
        let alpha = random_disc_point(&mut rng, 2.0);
        let fock = expectation(&rho, &WitnessSpec::new(w, alpha).unwrap())
            .unwrap()
            .value;
        let quad = nfp_point(&rho, &disc, w, alpha, &cfg).unwrap();
        worst = worst.max((fock - quad).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < ROUTE_TOL && secs < 60.0,
        format!("20 states: max |fock - quadrature| = {worst:.3e} in {secs:.1}s"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let space = FockSpace::new(128).unwrap();
    let mut lowest = f64::INFINITY;
    for _ in 0..200 {
        let count = rng.gen_range(1..=5);
        let parts: Vec<DensityMatrix> = (0..count)
            .map(|_| space.coherent(random_disc_point(&mut rng, 3.0)).unwrap())
            .collect();
        let weights: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let mix: Vec<(f64, &DensityMatrix)> = weights.iter().map(|w| w / total).zip(&parts).collect();
        let rho = DensityMatrix::mixture(&mix).unwrap();
        let w = rng.gen_range(0.1..6.0);
        let alpha = random_disc_point(&mut rng, 3.0);
        let v = expectation(&rho, &WitnessSpec::new(w, alpha).unwrap())
            .unwrap()
            .value;
        lowest = lowest.min(v);
    }
    outcome(
        lowest >= CLASSICAL_FLOOR,
        format!("200 coherent mixtures: lowest expectation {lowest:.3e}"),
    )
}

fn poisson(mean: f64, len: usize) -> Vec<f64> {
    let mut p = vec![0.0; len];
    p[0] = (-mean).exp();
    for n in 1..len {
        p[n] = p[n - 1] * mean / n as f64;
    }
    p
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    for w in [1.0, 2.0, 3.0, 4.0, 5.0] {
        let table = witness_diag_table(120, w).unwrap();
        for j in 1..=10 {
            let r = 0.3 * j as f64;
            let series: f64 = poisson(r * r, 120).iter().zip(&table).map(|(p, t)| p * t).sum();
            let closed = witness_coherent_closed_form(r, w).unwrap();
            worst = worst.max((series - closed).abs());
        }
    }
    let fock1 = FockSpace::new(8).unwrap().fock(1).unwrap();
    let scan = scan_width(&fock1, ComplexPoint::ZERO, &width_grid(), W_TOL).unwrap();
    let root = scan.w_star().unwrap_or(f64::NAN);
    let pass = worst < CLOSED_FORM_TOL && (root - 2.0).abs() < FOCK_ROOT_TOL;
    outcome(
        pass,
        format!("50 points: max |poisson sum - closed form| = {worst:.3e}; Fock 1 root at w = {root:.6}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let phi = WitnessCharFn::disc(1.0).unwrap();
    let reference = FilterFamily::reference();
    let mut origin_err = 0.0f64;
    for _ in 0..50 {
        let beta = random_disc_point(&mut rng, 1.2);
        let built = filter_from_witness(&phi, &reference, 1.0, beta).unwrap();
        origin_err = origin_err.max((built - phi.eval(beta)).norm());
    }
    let family = appendix_family(&phi, &reference);
    let widths = [1.0, 1.5, 2.0, 4.0];
    let report = verify_filter_conditions(&family, &widths, &ConditionConfig::default()).unwrap();
    let transform_min = report
        .widths
        .iter()
        .map(|r| r.c2.min_value)
        .fold(f64::INFINITY, f64::min);
    let decays = report.widths.iter().all(|r| r.c1.pass);
    // a Gaussian witness with no damping grows like e^{(1 - 1/w²)|β|²/2}
    let gaussian = WitnessCharFn::gaussian(2.0).unwrap();
    let undamped = appendix_family_with_damping(&gaussian, &reference, |_| 0.0);
    let damped = appendix_family(&gaussian, &reference);
    let cfg = ConditionConfig::default();
    let contrast = widths
        .iter()
        .filter(|&&w| w > 1.5)
        .all(|&w| decay_proxy(&damped, w, &cfg).pass && !decay_proxy(&undamped, w, &cfg).pass);
    let pass = origin_err < APPENDIX_ORIGIN_TOL && transform_min >= TRANSFORM_FLOOR && decays && contrast;
    outcome(
        pass,
        format!(
            "max |Omega_1 - Phi_Q| = {origin_err:.2e}; min transform = {transform_min:.3e}; \
             decay proxy passes: {decays}; undamped Gaussian rejected, damped accepted: {contrast}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let kernel = FilterKernel::disc();
    let quad = KernelQuad::default();
    let mut lens_err = 0.0f64;
    for _ in 0..100 {
        let beta = random_disc_point(&mut rng, 1.05);
        let numeric = autocorrelate(&kernel, beta, &quad).unwrap();
        lens_err = lens_err.max((numeric - disc_overlap(beta.norm())).abs());
    }
    let transform = FilterTransform::new(&FilterFamily::disc(), 1.0, &QuadConfig::default());
    let integral = transform.eval(ComplexPoint::ZERO).unwrap().re * PI * PI;
    let parseval_err = (integral - PI * PI / 16.0).abs();
    outcome(
        lens_err < LENS_TOL && parseval_err < PARSEVAL_TOL,
        format!("100 separations: max lens error {lens_err:.2e}; |integral - pi^2/16| = {parseval_err:.2e}"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let scans = spats_scans();
    let criteria: Vec<(&str, Check)> = vec![
        ("SPATS width scans", Box::new(|| criterion_1(&scans))),
        ("standard tests blind", Box::new(|| criterion_2(&scans))),
        ("trace identity", Box::new(criterion_3)),
        ("route equivalence", Box::new(criterion_4)),
        ("classical nonnegativity", Box::new(criterion_5)),
        ("closed-form consistency", Box::new(criterion_6)),
        ("witness-to-filter construction", Box::new(criterion_7)),
        ("filter algebra", Box::new(criterion_8)),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        failures += usize::from(!o.pass);
        println!(
            "criterion {} {}: {} [{:.1}s] {}",
            k + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
