//! End-to-end acceptance gate. Each test prints a single pass/fail line with
//! the measured numbers so CI logs double as a report.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fourbody::action::{action_quadrature_oracle, polyline_action, PolylinePath};
use fourbody::bounds::{case_bound, total_collision_bound, CaseId};
use fourbody::extension::{
    c1_junction_check, classify_period, newton_residual, Extender, PeriodClass, ENDPOINT_TOL,
};
use fourbody::geometry::{boundary_rows_unrotated, rotation, BoundarySide, Configuration, RotationAngle};
use fourbody::minimizer::{
    discrete_action, discrete_action_gradient, first_variation_residual, minimize, refine,
    DiscretePathVariable, MinimizeOptions, MinimizeResult,
};
use fourbody::testpaths::{build_test_path, certificate_sweep, Frac, Variant};

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:2}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Random COM-projected polyline with min pair separation >= 0.1.
fn random_polyline(rng: &mut ChaCha8Rng) -> PolylinePath {
    'outer: loop {
        let nseg = rng.gen_range(2..=5);
        let mut nodes = Vec::with_capacity(nseg + 1);
        for _ in 0..=nseg {
            let mut bodies = [[0.0f64; 2]; 4];
            let mut cx = 0.0;
            let mut cy = 0.0;
            for b in bodies.iter_mut() {
                b[0] = rng.gen_range(-2.0..2.0);
                b[1] = rng.gen_range(-2.0..2.0);
                cx += b[0];
                cy += b[1];
            }
            for b in bodies.iter_mut() {
                b[0] -= cx / 4.0;
                b[1] -= cy / 4.0;
            }
            nodes.push(Configuration { bodies });
        }
        let times = (0..=nseg).map(|i| i as f64 / nseg as f64).collect();
        let path = PolylinePath::new(times, nodes).unwrap();
        if path.min_pair_distance() < 0.1 {
            continue 'outer;
        }
        return path;
    }
}

#[test]
fn criterion_01_closed_form_vs_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let path = random_polyline(&mut rng);
        let closed = polyline_action(&path).unwrap().total;
        let oracle = action_quadrature_oracle(&path, 1e-10).unwrap();
        worst = worst.max((closed - oracle).abs());
    }
    let dt = t0.elapsed();
    report(
        1,
        worst <= 1e-8 && dt.as_secs() < 30,
        &format!("1000 random polylines, max |closed - oracle| = {worst:.3e} in {dt:.2?}"),
    );
}

#[test]
fn criterion_02_total_collision_bound() {
    let v = total_collision_bound();
    report(2, (12.16..=12.17).contains(&v), &format!("bound = {v:.6}"));
}

fn certificate_criterion(criterion: u32, variant: Variant) {
    let t0 = Instant::now();
    let rep = certificate_sweep(variant, Frac { p: 1, q: 10000 }, None);
    let dt = t0.elapsed();
    report(
        criterion,
        rep.overall_pass && dt.as_secs() < 60,
        &format!(
            "{} angles, min margin {:.6} at {}/{} pi in {:.2?}",
            rep.records.len(),
            rep.min_margin,
            rep.min_margin_theta.p,
            rep.min_margin_theta.q,
            dt
        ),
    );
}

#[test]
fn criterion_03_e1_certificate() {
    certificate_criterion(3, Variant::E1);
}

#[test]
fn criterion_04_e2_certificate() {
    certificate_criterion(4, Variant::E2);
}

#[test]
fn criterion_05_bound_minimum_property() {
    let hi = std::f64::consts::PI / 10.0;
    let mut worst_g1 = 0.0f64;
    let mut worst_g2_eq = 0.0f64;
    let mut g2_dominated = true;
    for k in 1..=1000 {
        let th = hi * k as f64 / 1000.0;
        let g1 = fourbody::g1(th).unwrap();
        let e1_min = [
            CaseId::E1Case1,
            CaseId::E1Case2,
            CaseId::E1Case3,
            CaseId::E1Case4,
            CaseId::E1Case5,
        ]
        .iter()
        .map(|&c| case_bound(c, th).unwrap())
        .fold(f64::INFINITY, f64::min);
        worst_g1 = worst_g1.max((g1 - e1_min).abs() / g1);

        let g2 = fourbody::g2(th).unwrap();
        for (case, equality) in [
            (CaseId::E2Case1, true),
            (CaseId::E2Case2, false),
            (CaseId::E2Case3, true),
            (CaseId::E2Case4, false),
        ] {
            let b = case_bound(case, th).unwrap();
            if g2 > b * (1.0 + 1e-12) {
                g2_dominated = false;
            }
            if equality {
                worst_g2_eq = worst_g2_eq.max((g2 - b).abs() / g2);
            }
        }
    }
    report(
        5,
        worst_g1 <= 1e-12 && g2_dominated && worst_g2_eq <= 1e-12,
        &format!(
            "1000-point grid: |g1 - min(E1 cases)| <= {worst_g1:.2e} rel, g2 dominated = {g2_dominated}, equality residual {worst_g2_eq:.2e}"
        ),
    );
}

#[test]
fn criterion_06_feasible_seed_dominance() {
    let cases = [
        (Variant::E1, Frac { p: 1, q: 100 }),
        (Variant::E1, Frac { p: 3, q: 100 }),
        (Variant::E1, Frac { p: 539, q: 10000 }),
        (Variant::E2, Frac { p: 1, q: 100 }),
        (Variant::E2, Frac { p: 3, q: 100 }),
        (Variant::E2, Frac { p: 83, q: 1250 }),
    ];
    let opts = MinimizeOptions {
        restarts: 1, // the test-path seed only
        ..MinimizeOptions::default()
    };
    let mut pass = true;
    let mut lines = Vec::new();
    for (variant, f) in cases {
        let theta = RotationAngle::rational(f.p, f.q).unwrap();
        let a_test = polyline_action(&build_test_path(variant, theta).unwrap())
            .unwrap()
            .total;
        let t0 = Instant::now();
        let res = minimize(variant, theta, 80, &opts).unwrap();
        let dt = t0.elapsed();
        let ok = res.action <= a_test + 1e-9 && res.min_pair_distance >= 0.05 && dt.as_secs() < 300;
        pass &= ok;
        lines.push(format!(
            "{variant:?} {}/{}pi: A = {:.6} <= A_test = {:.6}, min sep {:.3}, {:.1?}",
            f.p, f.q, res.action, a_test, res.min_pair_distance, dt
        ));
    }
    report(6, pass, &lines.join("; "));
}

fn residual_triplet(res: &MinimizeResult, n: usize, variant: Variant, theta: RotationAngle) -> (f64, f64, f64) {
    let fv = first_variation_residual(&res.path);
    let ext = Extender::new(res.path.to_polyline(), variant, theta, ENDPOINT_TOL).unwrap();
    let juncs = ext.junctions(0.0, ext.block_len());
    let c1 = c1_junction_check(&ext, &juncs, 1.0 / n as f64, f64::INFINITY);
    let nr = newton_residual(&ext, 0.0, 1.0, n + 1);
    (fv.start.max(fv.end), c1.max_jump, nr.rms)
}

#[test]
fn criterion_07_critical_point_residuals() {
    // Second-order convergence is the floor: the boundary relations are
    // symmetry conditions, so the h^2 stencil truncation term (proportional
    // to the third time derivative, which satisfies the same relations)
    // cancels and the observed shrink per N doubling is ~8, not ~4.
    let theta = RotationAngle::rational(1, 20).unwrap();
    let opts = MinimizeOptions {
        restarts: 1,
        seed: 7,
        max_iterations: 20000,
        gradient_tolerance: 1e-10,
    };
    let mut pass = true;
    let mut lines = Vec::new();
    for variant in [Variant::E1, Variant::E2] {
        let coarse = minimize(variant, theta, 80, &opts).unwrap();
        let fine = refine(&coarse.path.prolong(160), &opts).unwrap();
        let (fv0, c10, nr0) = residual_triplet(&coarse, 80, variant, theta);
        let (fv1, c11, nr1) = residual_triplet(&fine, 160, variant, theta);
        let (rf, rc, rn) = (fv0 / fv1, c10 / c11, nr0 / nr1);
        let ok = rf >= 3.0 && rc >= 3.0 && rn >= 3.0;
        pass &= ok;
        lines.push(format!(
            "{variant:?} shrink factors 80->160: first-variation {rf:.2}, C1 jump {rc:.2}, Newton RMS {rn:.2}"
        ));
    }
    report(7, pass, &lines.join("; "));
}

/// E1 base path at theta with exact family endpoints and a smooth interior.
fn synthetic_e1_base(theta: RotationAngle) -> PolylinePath {
    let n = 10;
    let start = [2.0, 0.7, 1.0];
    let end = [0.5, 2.5, 1.5];
    let first = boundary_rows_unrotated(BoundarySide::Start, start[0], start[1], start[2]);
    let last_un = boundary_rows_unrotated(BoundarySide::EndE1, end[0], end[1], end[2]);
    let r = rotation(theta);
    let last: [[f64; 2]; 4] = std::array::from_fn(|i| {
        [
            last_un[i][0] * r[0][0] + last_un[i][1] * r[1][0],
            last_un[i][0] * r[0][1] + last_un[i][1] * r[1][1],
        ]
    });
    let interior = (1..n)
        .map(|j| {
            let u = j as f64 / n as f64;
            let bump = 0.05 * u * (1.0 - u);
            std::array::from_fn(|b| {
                [
                    first[b][0] + u * (last[b][0] - first[b][0]) + bump,
                    first[b][1] + u * (last[b][1] - first[b][1]),
                ]
            })
        })
        .map(|bodies: [[f64; 2]; 3]| bodies)
        .collect();
    DiscretePathVariable {
        variant: Variant::E1,
        theta,
        n,
        start,
        end,
        interior,
    }
    .to_polyline()
}

#[test]
fn criterion_08_period_classification() {
    let theta = RotationAngle::rational(1, 20).unwrap();
    let e1 = classify_period(Variant::E1, theta);
    let e2 = classify_period(Variant::E2, theta);
    let periods_ok = e1 == PeriodClass::Periodic { period: 160.0 }
        && e2 == PeriodClass::Periodic { period: 80.0 };

    let base = synthetic_e1_base(RotationAngle::zero());
    let ext = Extender::new(base, Variant::E1, RotationAngle::zero(), ENDPOINT_TOL).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let t = rng.gen_range(-20.0..20.0);
        let a = ext.eval(t);
        let b = ext.eval(t + 8.0);
        for i in 0..4 {
            worst = worst
                .max((a.bodies[i][0] - b.bodies[i][0]).abs())
                .max((a.bodies[i][1] - b.bodies[i][1]).abs());
        }
    }
    report(
        8,
        periods_ok && worst <= 1e-10,
        &format!(
            "E1 pi/20 -> {e1:?}, E2 pi/20 -> {e2:?}, theta = 0 max |q(t+8) - q(t)| = {worst:.2e}"
        ),
    );
}

#[test]
fn criterion_09_gradient_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    while checked < 100 {
        let variant = if rng.gen_bool(0.5) { Variant::E1 } else { Variant::E2 };
        let theta = RotationAngle::rational(rng.gen_range(1..=7), 100).unwrap();
        let n = rng.gen_range(4..=8);
        let mut var = match DiscretePathVariable::from_test_path(variant, theta, n) {
            Ok(v) => v,
            Err(_) => continue,
        };
        for node in &mut var.interior {
            for b in node.iter_mut() {
                b[0] += rng.gen_range(-0.05..0.05);
                b[1] += rng.gen_range(-0.05..0.05);
            }
        }
        if var.to_polyline().min_pair_distance() < 0.05 {
            continue;
        }
        let grad = discrete_action_gradient(&var).unwrap();
        let x = var.pack();
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let h = 1e-6 * scale;
        // every boundary scalar plus a stride of interior coordinates
        for k in (0..x.len()).step_by(5) {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let fp = discrete_action(&var.unpack(&xp)).unwrap();
            let fm = discrete_action(&var.unpack(&xm)).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            let rel = (grad[k] - fd).abs() / grad[k].abs().max(fd.abs()).max(1.0);
            worst = worst.max(rel);
        }
        checked += 1;
    }
    report(
        9,
        worst <= 1e-5,
        &format!("100 random feasible points, max relative gradient error {worst:.3e}"),
    );
}

fn unrotate(row: [f64; 2], theta: RotationAngle) -> [f64; 2] {
    let r = rotation(RotationAngle::irrational(-theta.radians()));
    [
        row[0] * r[0][0] + row[1] * r[1][0],
        row[0] * r[0][1] + row[1] * r[1][1],
    ]
}

/// Max deviation of a start row from the Q_S pattern.
fn start_family_residual(c: &Configuration) -> f64 {
    let q = &c.bodies;
    [
        q[0][1],
        q[1][1],
        q[2][0] - q[3][0],
        q[2][1] + q[3][1],
        q[2][0] + (q[0][0] + q[1][0]) / 2.0,
    ]
    .into_iter()
    .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Max deviation of an end row (unrotated by theta) from the Q_E pattern.
fn end_family_residual(c: &Configuration, variant: Variant, theta: RotationAngle) -> f64 {
    let u: Vec<[f64; 2]> = c.bodies.iter().map(|&b| unrotate(b, theta)).collect();
    let rel = match variant {
        // (-b, -a), (-c, a), (c, a), (b, -a)
        Variant::E1 => vec![
            u[1][1] - u[2][1],
            u[0][1] + u[1][1],
            u[3][1] + u[2][1],
            u[1][0] + u[2][0],
            u[0][0] + u[3][0],
        ],
        // (-a, -b), (-a, b), (a, c), (a, -c)
        Variant::E2 => vec![
            u[0][0] - u[1][0],
            u[2][0] - u[3][0],
            u[0][0] + u[2][0],
            u[0][1] + u[1][1],
            u[2][1] + u[3][1],
        ],
    };
    rel.into_iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Total signed polar angle swept by a body along the path nodes.
fn winding(path: &PolylinePath, body: usize) -> f64 {
    let mut total = 0.0;
    let nodes = path.nodes();
    for w in nodes.windows(2) {
        let [x0, y0] = w[0].bodies[body];
        let [x1, y1] = w[1].bodies[body];
        total += (x0 * y1 - y0 * x1).atan2(x0 * x1 + y0 * y1);
    }
    total
}

#[test]
fn criterion_10_boundary_membership_and_winding() {
    let theta = RotationAngle::rational(1, 20).unwrap();
    let opts = MinimizeOptions {
        restarts: 1,
        ..MinimizeOptions::default()
    };
    let mut pass = true;
    let mut lines = Vec::new();
    for variant in [Variant::E1, Variant::E2] {
        let res = minimize(variant, theta, 40, &opts).unwrap();
        let path = res.path.to_polyline();
        let nodes = path.nodes();
        let sr = start_family_residual(&nodes[0]);
        let er = end_family_residual(&nodes[nodes.len() - 1], variant, theta);
        // qualitative: each body traverses a short arc, no full revolution
        let max_wind = (0..4)
            .map(|b| winding(&path, b).abs())
            .fold(0.0f64, f64::max);
        let ok = sr <= 1e-6 && er <= 1e-6 && max_wind < 2.0 * std::f64::consts::PI;
        pass &= ok;
        lines.push(format!(
            "{variant:?}: start family residual {sr:.2e}, end family residual {er:.2e}, max |winding| {max_wind:.2} rad"
        ));
    }
    report(10, pass, &lines.join("; "));
}
