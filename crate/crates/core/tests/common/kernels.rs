use super::*;
use descfact::grcf::assign::{theta_matrix, FullRankGain};
use descfact::grcf::{assign_pair_full, closed_loop_eigenvalues, BlockProblem};
use descfact::linalg::{cholesky_update, sqrt_lyapunov};

pub fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| gauss(rng))
}

fn sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

pub fn upper_e(rng: &mut ChaCha8Rng, k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(k, k, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => gauss(rng),
        std::cmp::Ordering::Equal => rng.random_range(0.5..2.0) * sign(rng),
        std::cmp::Ordering::Greater => 0.0,
    })
}

/// `A = E·T` where `T` has its eigenvalues outside the stability region of `domain`.
pub fn antistable_block(
    rng: &mut ChaCha8Rng,
    domain: Domain,
    k: usize,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let e = upper_e(rng, k);
    let t = if k == 1 {
        let v = match domain {
            Domain::Continuous => rng.random_range(0.05..4.0),
            Domain::Discrete => rng.random_range(1.05..4.0) * sign(rng),
        };
        DMatrix::from_element(1, 1, v)
    } else {
        let z = match domain {
            Domain::Continuous => C::new(rng.random_range(0.05..4.0), rng.random_range(0.1..4.0)),
            Domain::Discrete => {
                C::from_polar(rng.random_range(1.05..4.0), rng.random_range(0.1..3.0))
            }
        };
        let s = rng.random_range(0.3..3.0);
        let core = mat(2, 2, &[z.re, z.im * s, -z.im / s, z.re]);
        let u = random_orthogonal(rng, 2);
        &u * core * u.transpose()
    };
    let a = &e * t;
    (a, e)
}

/// `‖op(SSᵀ) − BBᵀ‖ / (‖BBᵀ‖ + 2‖A‖·max(‖A‖, ‖E‖)·‖SSᵀ‖)`.
pub fn lyapunov_relative_residual(
    a: &DMatrix<f64>,
    e: &DMatrix<f64>,
    b: &DMatrix<f64>,
    s: &DMatrix<f64>,
    domain: Domain,
) -> f64 {
    let y = s * s.transpose();
    let bbt = b * b.transpose();
    let lhs = match domain {
        Domain::Continuous => a * &y * e.transpose() + e * &y * a.transpose(),
        Domain::Discrete => a * &y * a.transpose() - e * &y * e.transpose(),
    };
    (lhs - &bbt).norm() / (bbt.norm() + 2.0 * a.norm() * a.norm().max(e.norm()) * y.norm())
}

/// Worst relative residual of the square-root solver over `trials` random antistable blocks,
/// alternating domain and block size.
pub fn lyapunov_worst(seed: u64, trials: usize) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let domain = if trial % 2 == 0 {
            Domain::Continuous
        } else {
            Domain::Discrete
        };
        let k = 1 + (trial / 2) % 2;
        let (a, e) = antistable_block(&mut rng, domain, k);
        let m = rng.random_range(1..=3);
        let b = gaussian(&mut rng, k, m);
        let s = sqrt_lyapunov(&a, &e, &b, domain).map_err(|err| format!("trial {trial}: {err}"))?;
        if k == 2 && s[(1, 0)] != 0.0 {
            return Err(format!("trial {trial}: S is not upper triangular"));
        }
        worst = worst.max(lyapunov_relative_residual(&a, &e, &b, &s, domain));
    }
    Ok(worst)
}

/// Worst `‖R'ᵀR' − RᵀR − XᵀX‖ / (‖R‖² + ‖X‖²)` over random updates.
pub fn cholesky_worst(seed: u64, trials: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let n = rng.random_range(1..=8);
        let k = rng.random_range(1..=4);
        let r = gaussian(&mut rng, n, n).upper_triangle();
        let x = gaussian(&mut rng, k, n);
        let r2 = cholesky_update(&r, &x);
        let below = (0..n).flat_map(|j| (j + 1..n).map(move |i| (i, j)));
        if below.clone().any(|(i, j)| r2[(i, j)] != 0.0) {
            return f64::INFINITY;
        }
        let want = r.transpose() * &r + x.transpose() * &x;
        let scale = r.norm_squared() + x.norm_squared();
        worst = worst.max((r2.transpose() * &r2 - want).norm() / scale);
    }
    worst
}

/// Smallest `‖F2‖_F` over a 101×101 grid of `(θ1, θ2)`, skipping `θ2 = 0`.
pub fn grid_minimum(gain: &FullRankGain, pair: [C; 2]) -> f64 {
    let center = 0.5 * (pair[0] + pair[1]).re;
    let width = 4.0 * (1.0 + pair[0].norm().max(pair[1].norm()));
    let mut best = f64::INFINITY;
    for i in 0..101 {
        let t1 = center - width + 2.0 * width * i as f64 / 100.0;
        for j in 0..101 {
            let t2 = -width + 2.0 * width * j as f64 / 100.0;
            if t2 == 0.0 {
                continue;
            }
            let v = gain.norm(&theta_matrix(pair, t1, t2));
            if v.is_finite() {
                best = best.min(v);
            }
        }
    }
    best
}

/// `‖F2‖ / grid minimum` for a seeded rank-2 pair problem, after checking the assigned poles.
pub fn pair_gain_ratio(seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let m = rng.random_range(2..=3);
    let block = BlockProblem::new(
        gaussian(&mut rng, 2, 2),
        upper_e(&mut rng, 2),
        gaussian(&mut rng, 2, m),
    )
    .map_err(|e| e.to_string())?;
    let pair = if seed.is_multiple_of(3) {
        [
            C::new(-rng.random_range(0.5..3.0), 0.0),
            C::new(-rng.random_range(0.5..3.0), 0.0),
        ]
    } else {
        let z = C::new(-rng.random_range(0.2..3.0), rng.random_range(0.2..3.0));
        [z, z.conj()]
    };
    let res = assign_pair_full(&block, pair);
    let closed = &block.a22 + &block.b2 * &res.f2;
    let eig = closed_loop_eigenvalues(&closed, &block.e22);
    if multiset_distance(&eig, &pair) > 1e-9 {
        return Err(format!("seed {seed}: poles {eig:?}, wanted {pair:?}"));
    }
    Ok(res.f2.norm() / grid_minimum(&FullRankGain::new(&block), pair))
}
