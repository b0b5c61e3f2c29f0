mod common;

use common::{banded_to_na, fd_jacobian_check, norm_inf};
use degpar::porous::{
    barenblatt, barenblatt_model, error_vs_exact, integrate, step, support_radius, DiffusivitySpec,
    Dimension, Dirichlet, Grid, IntegrationPlan, PorousModel, PorousState, BARENBLATT_ELAPSED,
};
use degpar::solver::{Scheme, SolverConfig};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PME: DiffusivitySpec = DiffusivitySpec::PorousMedium { m: 4.0 };

fn boundary_data(x: &[f64]) -> f64 {
    0.2 + 0.1 * x.iter().sum::<f64>().sin()
}

fn model(
    dimension: Dimension,
    n: usize,
    spec: DiffusivitySpec,
    g: fn(&[f64]) -> f64,
) -> PorousModel {
    let grid = Grid::new(dimension, -1.0, 2.0, n).unwrap();
    PorousModel::new(grid, Dirichlet::from_fn(&grid, g), spec).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(0.05..1.0)).collect()
}

/// Stencil arms written out from the grid geometry: `(neighbour index or
/// boundary coordinates)` for left, right and, in 2D, down, up.
fn arms(dimension: Dimension, n: usize, a: f64, h: f64, k: usize) -> Vec<Result<usize, Vec<f64>>> {
    let x = |i: isize| a + (i + 1) as f64 * h;
    match dimension {
        Dimension::One => {
            let i = k as isize;
            [i - 1, i + 1]
                .into_iter()
                .map(|j| {
                    if (0..n as isize).contains(&j) {
                        Ok(j as usize)
                    } else {
                        Err(vec![x(j)])
                    }
                })
                .collect()
        }
        Dimension::Two => {
            let (i, j) = ((k % n) as isize, (k / n) as isize);
            [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]
                .into_iter()
                .map(|(p, q)| {
                    if (0..n as isize).contains(&p) && (0..n as isize).contains(&q) {
                        Ok(q as usize * n + p as usize)
                    } else {
                        Err(vec![x(p), x(q)])
                    }
                })
                .collect()
        }
    }
}

/// Dense `L_D` and Dirichlet vector `g` from the face-average definition.
fn l_d_oracle(m: &PorousModel, u: &[f64], g: fn(&[f64]) -> f64) -> (DMatrix<f64>, Vec<f64>) {
    let (a, _) = m.grid.bounds();
    let (h, n, len) = (m.grid.h(), m.grid.n(), u.len());
    let d = |v: f64| m.diffusivity.eval(v);
    let mut l = DMatrix::zeros(len, len);
    let mut rhs = vec![0.0; len];
    for k in 0..len {
        for arm in arms(m.grid.dimension(), n, a, h, k) {
            match arm {
                Ok(j) => {
                    let f = (d(u[k]) + d(u[j])) / 2.0;
                    l[(k, j)] += f;
                    l[(k, k)] -= f;
                }
                Err(x) => {
                    let b = g(&x);
                    let f = (d(u[k]) + d(b)) / 2.0;
                    l[(k, k)] -= f;
                    rhs[k] += f * b;
                }
            }
        }
    }
    (l, rhs)
}

fn t_n_oracle(m: &PorousModel, u: &[f64], g: fn(&[f64]) -> f64) -> DMatrix<f64> {
    let (a, _) = m.grid.bounds();
    let (h, n, len) = (m.grid.h(), m.grid.n(), u.len());
    let mut t = DMatrix::zeros(len, len);
    for k in 0..len {
        for arm in arms(m.grid.dimension(), n, a, h, k) {
            let v = match arm {
                Ok(j) => {
                    t[(k, j)] = u[j] - u[k];
                    u[j]
                }
                Err(x) => g(&x),
            };
            t[(k, k)] += v - u[k];
        }
    }
    t
}

fn assert_close(got: &DMatrix<f64>, want: &DMatrix<f64>, rel: f64) {
    let scale = want.amax().max(1e-300);
    assert!(
        (got - want).amax() <= rel * scale,
        "{}",
        (got - want).amax()
    );
}

#[test]
fn l_d_matches_face_average_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (dim, n) in [
        (Dimension::One, 16),
        (Dimension::One, 33),
        (Dimension::Two, 7),
    ] {
        let m = model(dim, n, PME, boundary_data);
        let u = random_state(&mut rng, m.dim());
        let (l, g) = m.assemble_l_d(&u).unwrap();
        let (want, want_g) = l_d_oracle(&m, &u, boundary_data);
        assert_close(&banded_to_na(&l), &want, 1e-14);
        for k in 0..u.len() {
            assert!((g[k] - want_g[k]).abs() <= 1e-14 * (1.0 + want_g[k].abs()));
        }
        let direct = m.diffusion(&u).unwrap();
        let via_matrix = &want * DVector::from_column_slice(&u);
        for k in 0..u.len() {
            assert!((direct[k] - via_matrix[k] - want_g[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn t_n_matches_difference_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (dim, n) in [(Dimension::One, 16), (Dimension::Two, 6)] {
        let m = model(dim, n, PME, boundary_data);
        let u = random_state(&mut rng, m.dim());
        assert_close(
            &banded_to_na(&m.assemble_t_n(&u).unwrap()),
            &t_n_oracle(&m, &u, boundary_data),
            1e-14,
        );
    }
    let m = model(Dimension::One, 3, PME, |_| 0.0);
    let t = banded_to_na(&m.assemble_t_n(&[1.0, 2.0, 3.0]).unwrap());
    assert_eq!((t[(1, 0)], t[(1, 1)], t[(1, 2)]), (-1.0, 0.0, 1.0));
    let m = model(Dimension::Two, 4, PME, |_| 0.5);
    assert_eq!(
        banded_to_na(&m.assemble_t_n(&[0.5; 16]).unwrap()).amax(),
        0.0
    );
}

#[test]
fn l_d_is_symmetric_and_negative_semidefinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (dim, n) in [
        (Dimension::One, 64),
        (Dimension::One, 17),
        (Dimension::Two, 8),
    ] {
        for spec in [PME, DiffusivitySpec::PowerLaw { m: 2.0 }] {
            let m = model(dim, n, spec, boundary_data);
            // some zeros exercise the degenerate faces
            let u: Vec<f64> = (0..m.dim())
                .map(|_| rng.gen_range(-0.2..1.0_f64).max(0.0))
                .collect();
            let (l, _) = m.assemble_l_d(&u).unwrap();
            assert!(l.is_symmetric(0.0));
            let ev = banded_to_na(&l).symmetric_eigen().eigenvalues;
            assert!(ev.max() <= 1e-12 * l.max_abs(), "{}", ev.max());
        }
    }
}

#[test]
fn interior_rows_of_l_d_sum_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (dim, n) in [(Dimension::One, 20), (Dimension::Two, 9)] {
        let m = model(dim, n, PME, boundary_data);
        let u = random_state(&mut rng, m.dim());
        let (l, _) = m.assemble_l_d(&u).unwrap();
        let (a, _) = m.grid.bounds();
        for k in 0..u.len() {
            if arms(dim, n, a, m.grid.h(), k).iter().all(|x| x.is_ok()) {
                let mut sum = 0.0;
                l.for_each_in_row(k, |_, v| sum += v);
                assert!(sum.abs() <= 1e-15 * l.max_abs(), "row {k}: {sum}");
            }
        }
    }
}

#[test]
fn unit_diffusivity_in_two_dimensions_is_the_five_point_laplacian() {
    let n = 6;
    let m = model(
        Dimension::Two,
        n,
        DiffusivitySpec::Constant { kappa: 1.0 },
        |_| 0.0,
    );
    let (l, _) = m.assemble_l_d(&vec![0.3; n * n]).unwrap();
    let t = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => -2.0,
        1 => 1.0,
        _ => 0.0,
    });
    let eye = DMatrix::identity(n, n);
    let want = t.kronecker(&eye) + eye.kronecker(&t);
    assert_eq!(banded_to_na(&l), want);
}

#[test]
fn residual_trivial_limits() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = model(Dimension::One, 12, PME, boundary_data);
    let u = random_state(&mut rng, 12);
    let up = random_state(&mut rng, 12);
    for scheme in [Scheme::CrankNicolson, Scheme::ImplicitEuler] {
        let f = m.residual(&u, &up, 0.0, scheme).unwrap();
        for k in 0..12 {
            assert_eq!(f[k], u[k] - up[k]);
        }
        let frozen = model(
            Dimension::One,
            12,
            DiffusivitySpec::Constant { kappa: 0.0 },
            boundary_data,
        );
        assert!(frozen
            .residual(&u, &u, 0.3, scheme)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
    }
}

/// With constant `D` the Crank-Nicolson step is the linear system
/// `(I - r/2 L) u = (I + r/2 L) u_prev + r g`, solved densely.
#[test]
fn constant_diffusivity_crank_nicolson_step_solves_the_linear_system() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let kappa = 0.7;
    for (dim, n) in [(Dimension::One, 30), (Dimension::Two, 7)] {
        let m = model(dim, n, DiffusivitySpec::Constant { kappa }, boundary_data);
        let up = random_state(&mut rng, m.dim());
        let (l, g) = l_d_oracle(&m, &up, boundary_data);
        let r = m.ratio(0.05);
        let eye = DMatrix::identity(up.len(), up.len());
        let rhs =
            (&eye + &l * (r / 2.0)) * DVector::from_column_slice(&up) + DVector::from_vec(g) * r;
        let u = (&eye - &l * (r / 2.0)).lu().solve(&rhs).unwrap();
        let f = m
            .residual(u.as_slice(), &up, 0.05, Scheme::CrankNicolson)
            .unwrap();
        assert!(norm_inf(&f) <= 1e-12, "{}", norm_inf(&f));
    }
}

#[test]
fn jacobian_trivial_limits() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = model(
        Dimension::Two,
        5,
        DiffusivitySpec::Constant { kappa: 2.0 },
        boundary_data,
    );
    let u = random_state(&mut rng, 25);
    assert_eq!(
        m.y_n(&u, 0.1, Scheme::CrankNicolson).unwrap().max_abs(),
        0.0
    );
    let m = model(Dimension::One, 9, PME, boundary_data);
    let u = random_state(&mut rng, 9);
    for scheme in [Scheme::CrankNicolson, Scheme::ImplicitEuler] {
        assert_eq!(
            banded_to_na(&m.jacobian(&u, 0.0, scheme).unwrap()),
            DMatrix::identity(9, 9)
        );
    }
}

#[test]
fn implicit_euler_jacobian_doubles_the_crank_nicolson_correction() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let m = model(Dimension::One, 15, PME, boundary_data);
    let u = random_state(&mut rng, 15);
    let eye = DMatrix::identity(15, 15);
    let cn = banded_to_na(&m.jacobian(&u, 0.1, Scheme::CrankNicolson).unwrap()) - &eye;
    let ie = banded_to_na(&m.jacobian(&u, 0.1, Scheme::ImplicitEuler).unwrap()) - &eye;
    assert_close(&ie, &(cn * 2.0), 1e-15);
}

fn check_porous_jacobian(
    dim: Dimension,
    n: usize,
    scheme: Scheme,
    seed: u64,
    barenblatt_state: bool,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = model(dim, n, PME, boundary_data);
    let u: Vec<f64> = if barenblatt_state {
        (0..m.dim())
            .map(|k| {
                let x: Vec<f64> = m.grid.point(k).iter().map(|v| 4.0 * (v - 0.5)).collect();
                barenblatt(1.0, &x, 4.0).unwrap() + rng.gen_range(0.0..0.05)
            })
            .collect()
    } else {
        random_state(&mut rng, m.dim())
    };
    let up = random_state(&mut rng, m.dim());
    let dt = m.grid.h();
    let j = banded_to_na(&m.jacobian(&u, dt, scheme).unwrap());
    let worst = fd_jacobian_check(|v| m.residual(v, &up, dt, scheme).unwrap(), &j, &u);
    assert!(worst <= 1.0, "{dim:?} {scheme:?} worst ratio {worst}");
    // random directions
    for _ in 0..4 {
        let v: Vec<f64> = (0..u.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let eps = 1e-7 * (1.0 + norm_inf(&u));
        let shifted: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + eps * b).collect();
        let f0 = m.residual(&u, &up, dt, scheme).unwrap();
        let f1 = m.residual(&shifted, &up, dt, scheme).unwrap();
        let jv = &j * DVector::from_vec(v);
        let err = (0..u.len())
            .map(|k| ((f1[k] - f0[k]) / eps - jv[k]).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-5 * (1.0 + jv.amax()), "{err}");
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    for scheme in [Scheme::CrankNicolson, Scheme::ImplicitEuler] {
        check_porous_jacobian(Dimension::One, 64, scheme, 11, true);
        check_porous_jacobian(Dimension::Two, 8, scheme, 12, true);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn jacobian_matches_finite_differences_at_random_states(seed in any::<u64>(), two_d in any::<bool>(), cn in any::<bool>()) {
        let scheme = if cn { Scheme::CrankNicolson } else { Scheme::ImplicitEuler };
        if two_d {
            check_porous_jacobian(Dimension::Two, 6, scheme, seed, false);
        } else {
            check_porous_jacobian(Dimension::One, 32, scheme, seed, false);
        }
    }
}

#[test]
fn barenblatt_satisfies_the_equation_pointwise() {
    let m = 4.0;
    let (t, e) = (1.3, 1e-3);
    let u = |t: f64, x: &[f64]| barenblatt(t, x, m).unwrap();
    let um = |t: f64, x: &[f64]| u(t, x).powf(m);
    for x in [vec![0.4], vec![-1.7], vec![0.3, -0.6], vec![1.1, 0.9]] {
        let ut = (u(t + e, &x) - u(t - e, &x)) / (2.0 * e);
        let mut lap = 0.0;
        for axis in 0..x.len() {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[axis] += e;
            xm[axis] -= e;
            lap += (um(t, &xp) - 2.0 * um(t, &x) + um(t, &xm)) / (e * e);
        }
        assert!(
            (ut - lap).abs() <= 1e-5 * ut.abs().max(1.0),
            "{x:?}: {ut} vs {lap}"
        );
    }
}

#[test]
fn barenblatt_mass_is_constant_and_support_matches_radius() {
    let m = 4.0;
    let mass = |t: f64| {
        let k = 200_000;
        let h = 12.0 / k as f64;
        (0..=k)
            .map(|i| barenblatt(t, &[-6.0 + i as f64 * h], m).unwrap())
            .sum::<f64>()
            * h
    };
    let (m1, m2) = (mass(1.0), mass(1.625));
    assert!((m1 - m2).abs() <= 1e-5 * m1, "{m1} {m2}");
    let r = support_radius(1.625, m, 1);
    assert!(barenblatt(1.625, &[r * 0.999], m).unwrap() > 0.0);
    assert_eq!(barenblatt(1.625, &[r * 1.001], m).unwrap(), 0.0);
    assert!(r < 6.0);
}

#[test]
fn error_norm_definitions() {
    let model = barenblatt_model(Dimension::Two, 15, 4.0).unwrap();
    let mut state = PorousState::barenblatt(&model, 4.0, 1.2).unwrap();
    let (l1, linf) = error_vs_exact(&state, 4.0, &model).unwrap();
    assert!(l1 <= 1e-15 && linf <= 1e-15);
    let delta = 0.125;
    state.u.iter_mut().for_each(|v| *v += delta);
    let (l1, linf) = error_vs_exact(&state, 4.0, &model).unwrap();
    assert!((linf - delta).abs() <= 1e-15);
    let h = model.grid.h();
    assert!((l1 - delta * h * h * 225.0).abs() <= 1e-12);
}

#[test]
fn frozen_diffusion_step_is_identity() {
    let m = model(
        Dimension::One,
        10,
        DiffusivitySpec::Constant { kappa: 0.0 },
        |_| 0.0,
    );
    let state = PorousState {
        t: 2.0,
        u: (0..10).map(|i| i as f64 * 0.1).collect(),
    };
    let (next, rep) = step(
        &m,
        &state,
        0.1,
        Scheme::CrankNicolson,
        &SolverConfig::default(),
    )
    .unwrap();
    assert_eq!(next.u, state.u);
    assert_eq!(next.t, 2.1);
    assert_eq!(rep.iterations, 1);
}

#[test]
fn newton_increments_decrease_on_the_first_step() {
    for (dim, n) in [(Dimension::One, 128), (Dimension::Two, 31)] {
        let model = barenblatt_model(dim, n, 4.0).unwrap();
        let state = PorousState::barenblatt(&model, 4.0, 1.0).unwrap();
        let (_, rep) = step(
            &model,
            &state,
            model.grid.h(),
            Scheme::CrankNicolson,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(rep.converged);
        let inc = &rep.increment_norms;
        assert_eq!(inc.len(), rep.iterations);
        assert!(inc.last().unwrap() < inc.first().unwrap(), "{inc:?}");
    }
}

#[test]
fn crank_nicolson_conserves_mass_and_positivity_while_support_is_interior() {
    let model = barenblatt_model(Dimension::One, 128, 4.0).unwrap();
    let initial = PorousState::barenblatt(&model, 4.0, 1.0).unwrap();
    let m0 = initial.mass(&model);
    let plan = IntegrationPlan {
        elapsed: BARENBLATT_ELAPSED,
        lambda: 1.0,
        scheme: Scheme::CrankNicolson,
        reference_m: None,
    };
    let (end, records) = integrate(&model, initial, &plan, &SolverConfig::default()).unwrap();
    assert!(!records.is_empty());
    let drift = (end.mass(&model) - m0).abs();
    assert!(drift <= 1e-8, "mass drift {drift}");
    let min = end.u.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min >= -1e-8, "min {min}");
}

#[test]
fn crank_nicolson_beats_implicit_euler() {
    for n in [64, 128] {
        let model = barenblatt_model(Dimension::One, n, 4.0).unwrap();
        let err = |scheme| {
            let initial = PorousState::barenblatt(&model, 4.0, 1.0).unwrap();
            let plan = IntegrationPlan {
                elapsed: BARENBLATT_ELAPSED,
                lambda: 1.0,
                scheme,
                reference_m: Some(4.0),
            };
            let (end, records) =
                integrate(&model, initial, &plan, &SolverConfig::default()).unwrap();
            let (l1, _) = error_vs_exact(&end, 4.0, &model).unwrap();
            assert_eq!(records.last().unwrap().l1_error, Some(l1));
            l1
        };
        let (cn, ie) = (err(Scheme::CrankNicolson), err(Scheme::ImplicitEuler));
        assert!(cn < ie, "n={n}: {cn} vs {ie}");
    }
}
