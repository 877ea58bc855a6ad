use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use realsmooth::config::Config;
use realsmooth::critical::{critical_points_perturbed, critical_points_unperturbed};
use realsmooth::io::{parse_input_str, serialize, serialize_json};
use realsmooth::polar_defl::{deflation_step, minor_g, DeflationConfig};
use realsmooth::poly::{parse_polynomial, Polynomial, PolySystem, Vars, C64};
use realsmooth::realdim::{real_dimension, RealDimOptions};
use realsmooth::reduce::{embed_bounded, lift_inequalities, SemiAlgebraicInput};
use realsmooth::solve::{numerical_rank, solve_square, PathStatus};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(r: &mut ChaCha8Rng) -> f64 {
    r.sample(StandardNormal)
}

fn random_poly(vars: &Vars, deg: u32, r: &mut ChaCha8Rng) -> Polynomial {
    // sparse: keep roughly half the monomials
    let dense = Polynomial::dense(vars, deg, || C64::new(normal(r), normal(r)));
    let terms: Vec<(Vec<u32>, C64)> =
        dense.terms().filter(|_| r.random_bool(0.5)).map(|(m, c)| (m.exponents().to_vec(), *c)).collect();
    Polynomial::from_terms(vars, terms)
}

fn polydisk_point(n: usize, r: &mut ChaCha8Rng) -> Vec<C64> {
    (0..n).map(|_| C64::from_polar(r.random_range(0.0..1.0), r.random_range(0.0..std::f64::consts::TAU))).collect()
}

fn xyz() -> Vars {
    Vars::new(["x", "y", "z"])
}

fn sys(vars: &[&str], eqs: &[&str]) -> PolySystem {
    let v = Vars::new(vars.iter().copied());
    PolySystem::new(&v, eqs.iter().map(|e| parse_polynomial(e, &v).unwrap()).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_a_ring_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = xyz();
        let p = random_poly(&v, 3, &mut r);
        let q = random_poly(&v, 3, &mut r);
        let z = polydisk_point(3, &mut r);
        let (pz, qz) = (p.eval(&z).unwrap(), q.eval(&z).unwrap());
        let scale = 1.0 + pz.norm() + qz.norm();
        prop_assert!(((&p + &q).eval(&z).unwrap() - (pz + qz)).norm() <= 1e-12 * scale);
        prop_assert!(((&p * &q).eval(&z).unwrap() - pz * qz).norm() <= 1e-12 * scale * scale);
    }

    #[test]
    fn euler_identity_on_homogeneous(seed in any::<u64>(), d in 1u32..5) {
        let mut r = rng(seed);
        let v = xyz();
        let terms: Vec<(Vec<u32>, C64)> = Polynomial::dense(&v, d, || C64::new(normal(&mut r), 0.0))
            .terms()
            .filter(|(m, _)| m.degree() == d as u64)
            .map(|(m, c)| (m.exponents().to_vec(), *c))
            .collect();
        let p = Polynomial::from_terms(&v, terms);
        let mut lhs = Polynomial::zero(&v);
        for i in 0..3 {
            lhs = &lhs + &(&Polynomial::var(&v, i) * &p.diff(i));
        }
        prop_assert_eq!(lhs, p.scale(d as f64));
    }

    #[test]
    fn jacobian_matches_central_differences(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = xyz();
        let s = PolySystem::new(&v, (0..2).map(|_| random_poly(&v, 4, &mut r)).collect()).unwrap();
        let z = polydisk_point(3, &mut r);
        let jac = s.jacobian(&z).unwrap();
        let h = 1e-6;
        for k in 0..3 {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[k] += h;
            zm[k] -= h;
            let fp = s.eval(&zp).unwrap();
            let fm = s.eval(&zm).unwrap();
            for i in 0..2 {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                prop_assert!((fd - jac[(i, k)]).norm() <= 1e-6 * jac[(i, k)].norm().max(1.0));
            }
        }
    }

    #[test]
    fn bounded_embedding_lifts_points(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = Vars::new(["x", "y"]);
        // a random real curve through a chosen point p
        let p = [normal(&mut r), normal(&mut r)];
        let f = Polynomial::dense(&v, 2, || C64::new(normal(&mut r), 0.0));
        let f = &f - &Polynomial::constant(&v, f.eval_real(&p).unwrap());
        let q = [normal(&mut r), normal(&mut r)];
        let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
        let delta = d2 + r.random_range(0.1..4.0);
        let s = PolySystem::new(&v, vec![f]).unwrap();
        let b = embed_bounded(&s, &q, delta).unwrap();
        prop_assert_eq!(b.nvars(), 3);
        let lifted = [C64::new(p[0], 0.0), C64::new(p[1], 0.0), C64::new((delta - d2).sqrt(), 0.0)];
        prop_assert!(b.residual(&lifted).unwrap() <= 1e-12 * (1.0 + delta));
    }

    #[test]
    fn lifted_inequalities_are_positive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = Vars::new(["x", "y"]);
        let qs: Vec<Polynomial> = (0..2).map(|_| Polynomial::dense(&v, 2, || C64::new(normal(&mut r), 0.0))).collect();
        let input = SemiAlgebraicInput { vars: v.clone(), equations: vec![], inequalities: qs.clone() };
        let lifted = lift_inequalities(&input).unwrap();
        let x = [normal(&mut r), normal(&mut r)];
        // wherever every q_j > 0 there is a real lift, and each lift forces q_j = 1/z_j^2 > 0
        let vals: Vec<f64> = qs.iter().map(|q| q.eval_real(&x).unwrap().re).collect();
        if vals.iter().all(|&q| q > 0.0) {
            let mut pt: Vec<C64> = x.iter().map(|&c| C64::new(c, 0.0)).collect();
            pt.extend(vals.iter().map(|q| C64::new(1.0 / q.sqrt(), 0.0)));
            prop_assert!(lifted.residual(&pt).unwrap() <= 1e-10);
            for (j, q) in vals.iter().enumerate() {
                let z = pt[2 + j].re;
                prop_assert!(*q >= 1.0 / (z * z) * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn text_and_json_round_trip(seed in any::<u64>(), neq in 0usize..3, nineq in 0usize..3) {
        let mut r = rng(seed);
        let v = xyz();
        let input = SemiAlgebraicInput {
            vars: v.clone(),
            equations: (0..neq).map(|_| random_poly(&v, 3, &mut r)).collect(),
            inequalities: (0..nineq).map(|_| random_poly(&v, 2, &mut r)).collect(),
        };
        prop_assert_eq!(&parse_input_str(&serialize(&input)).unwrap(), &input);
        prop_assert_eq!(&parse_input_str(&serialize_json(&input)).unwrap(), &input);
    }

    #[test]
    fn deflation_anchor_stays_a_root(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = xyz();
        // every polynomial vanishes at the anchor a, to first or second order
        let a: Vec<C64> = (0..3).map(|_| C64::new(normal(&mut r), 0.0)).collect();
        let shift = |i: usize| &Polynomial::var(&v, i) - &Polynomial::constant(&v, a[i]);
        let l1 = &shift(0).scale(normal(&mut r)) + &shift(1).scale(normal(&mut r));
        let l2 = &shift(1).scale(normal(&mut r)) + &shift(2).scale(normal(&mut r));
        let s = PolySystem::new(&v, vec![&l1 * &l1, &l1 * &l2, l2.clone()]).unwrap();
        let cfg = DeflationConfig { rank_tol: 1e-10, ..Default::default() };
        let step = deflation_step(&s, &a, &cfg);
        prop_assert!(step.system.residual(&a).unwrap() <= 1e-8);
        prop_assert!(step.system.len() >= s.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gamma_invariance_and_path_accounting(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = Vars::new(["x", "y"]);
        let s = PolySystem::new(&v, (0..2).map(|_| Polynomial::dense(&v, 2, || C64::new(normal(&mut r), normal(&mut r)))).collect()).unwrap();
        let bezout: u64 = s.degrees().iter().product();
        let cfg = Config::default();
        let a = solve_square(&s, seed, &cfg.solver).unwrap();
        let b = solve_square(&s, seed ^ 0xdead_beef, &cfg.solver).unwrap();
        for out in [&a, &b] {
            let counted = out.paths.iter().filter(|p| matches!(p.status, PathStatus::Converged | PathStatus::Diverged | PathStatus::PathFailure)).count();
            prop_assert_eq!(counted, out.start_count);
            let mult: usize = out.roots.iter().map(|r| r.multiplicity).sum();
            prop_assert!(mult as u64 <= bezout);
        }
        let finite = |o: &realsmooth::solve::SquareSolve| -> Vec<Vec<C64>> {
            o.roots.iter().filter(|r| !r.singular).map(|r| r.point.clone()).collect()
        };
        let (pa, pb) = (finite(&a), finite(&b));
        prop_assert_eq!(pa.len(), pb.len());
        for p in &pa {
            let d = pb.iter().map(|q| p.iter().zip(q).map(|(u, w)| (u - w).norm_sqr()).sum::<f64>().sqrt()).fold(f64::INFINITY, f64::min);
            prop_assert!(d <= 1e-8 * (1.0 + p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()));
        }
    }

    #[test]
    fn circle_points_pass_independent_certificate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = sys(&["x", "y"], &["x^2 + y^2 - 1"]);
        let (a, b) = (normal(&mut r), normal(&mut r));
        let g = &Polynomial::var(s.vars(), 0).scale(a) + &Polynomial::var(s.vars(), 1).scale(b);
        let cfg = Config::default();
        let rep = critical_points_unperturbed(&s, &g, seed, &cfg).unwrap();
        prop_assert_eq!(rep.points.len(), 2);
        for p in &rep.points {
            let (x, y) = (p.x[0], p.x[1]);
            prop_assert!((x * x + y * y - 1.0).abs() <= 1e-8);
            // gradient (2x, 2y) is nonzero, so rank 1 = n - d
            prop_assert!((2.0 * x).hypot(2.0 * y) > 1.0);
            prop_assert!((a * x + b * y).abs() > cfg.tol.g_zero_tol);
        }
    }
}

#[test]
fn minor_objective_vanishes_where_rank_drops() {
    // cone x^2 + y^2 - z^2: rank drops only at the origin
    let s = sys(&["x", "y", "z"], &["x^2 + y^2 - z^2"]);
    let anchor = [C64::new(3.0, 0.0), C64::new(4.0, 0.0), C64::new(5.0, 0.0)];
    let g = minor_g(&s, &anchor, 1).unwrap();
    assert!(g.eval(&anchor).unwrap().norm() > 1e-10);
    assert!(g.eval(&[C64::default(); 3]).unwrap().norm() <= 1e-8);
    assert_eq!(numerical_rank(&s.jacobian(&[C64::default(); 3]).unwrap(), 1e-8), 0);
}

#[test]
fn perturbation_direction_keeps_sign_pattern() {
    let cfg = Config::default();
    for (vars, eq, g) in [(["x", "y"], "x^2 + y^2 - 1", "x"), (["x", "y"], "y^2 - (x^3 - x^2)^2", "x*(x - 1)")] {
        let s = sys(&vars, &[eq]);
        let g = parse_polynomial(g, s.vars()).unwrap();
        let signs = |a: f64| {
            let rep = critical_points_perturbed(&s, &g, Some(&[a]), 3, &cfg).unwrap();
            let pos = rep.points.iter().filter(|p| p.g_value > 0.0).count();
            (pos, rep.points.len() - pos)
        };
        assert_eq!(signs(1.0), signs(-1.0), "{eq}");
    }
}

#[test]
fn real_dimension_ignores_the_rotation() {
    let s = sys(&["x", "y"], &["x^2 + y^2 - 1"]);
    let cfg = Config::default();
    let dims: Vec<i64> = (0..3)
        .map(|seed| real_dimension(&s, None, seed, &cfg, &RealDimOptions::default()).unwrap().dimension)
        .collect();
    assert_eq!(dims, vec![1, 1, 1]);
    // the answer is the complex dimension here, since a smooth real point exists
    let run = real_dimension(&s, None, 9, &cfg, &RealDimOptions::default()).unwrap();
    assert_eq!(run.complex_dimension, Some(1));
    // no level above the answer produced points
    assert!(run.trace.iter().all(|l| l.i as i64 - 1 <= run.dimension || l.smooth_points == 0));
}

#[test]
fn same_seed_replays_endpoints() {
    let s = sys(&["x", "y"], &["x^2 - 2*y + 1", "x*y^2 - 3"]);
    let cfg = Config::default();
    let a = solve_square(&s, 42, &cfg.solver).unwrap();
    let b = solve_square(&s, 42, &cfg.solver).unwrap();
    assert_eq!(a.gamma, b.gamma);
    for (p, q) in a.paths.iter().zip(&b.paths) {
        let d: f64 = p.endpoint.iter().zip(&q.endpoint).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(d <= 1e-12);
    }
}
