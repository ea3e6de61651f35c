#![allow(dead_code)]

use descfact::{DescriptorSystem, Domain};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C = Complex64;

pub fn mat(r: usize, c: usize, v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(r, c, v)
}

pub fn cmat(r: usize, c: usize, v: &[C]) -> DMatrix<C> {
    DMatrix::from_row_slice(r, c, v)
}

/// `G(s) = [[s², s/(s+1)], [0, 1/s]]`.
pub fn example1() -> DescriptorSystem {
    let mut a = DMatrix::identity(5, 5);
    a[(3, 3)] = -1.0;
    a[(4, 4)] = 0.0;
    let mut e = DMatrix::zeros(5, 5);
    e[(0, 1)] = 1.0;
    e[(1, 2)] = 1.0;
    e[(3, 3)] = 1.0;
    e[(4, 4)] = 1.0;
    DescriptorSystem::new(
        a,
        Some(e),
        mat(5, 2, &[0., 0., 0., 0., -1., 0., 0., 1., 0., 1.]),
        mat(2, 5, &[1., 0., 0., -1., 0., 0., 0., 0., 0., 1.]),
        mat(2, 2, &[0., 1., 0., 0.]),
        Domain::Continuous,
    )
    .unwrap()
}

pub fn example1_g(s: C) -> DMatrix<C> {
    let z = C::new(0.0, 0.0);
    cmat(2, 2, &[s * s, s / (s + 1.0), z, 1.0 / s])
}

pub fn example1_n(s: C) -> DMatrix<C> {
    let z = C::new(0.0, 0.0);
    cmat(
        2,
        2,
        &[
            -s * s / ((s + 1.0) * (s + 2.0)),
            s * s / ((s + 1.0) * (s + 3.0)),
            z,
            1.0 / (s + 3.0),
        ],
    )
}

pub fn example1_m(s: C) -> DMatrix<C> {
    let z = C::new(0.0, 0.0);
    cmat(2, 2, &[-1.0 / ((s + 1.0) * (s + 2.0)), z, z, s / (s + 3.0)])
}

/// `G(z) = [[z², z/(z−2)], [0, 1/z]]`.
pub fn example2() -> DescriptorSystem {
    let mut a = DMatrix::identity(5, 5);
    a[(3, 3)] = 2.0;
    a[(4, 4)] = 0.0;
    let mut e = DMatrix::zeros(5, 5);
    e[(0, 1)] = 1.0;
    e[(1, 2)] = 1.0;
    e[(3, 3)] = 1.0;
    e[(4, 4)] = 1.0;
    DescriptorSystem::new(
        a,
        Some(e),
        mat(5, 2, &[0., 0., 0., 0., -1., 0., 0., 2., 0., 1.]),
        mat(2, 5, &[1., 0., 0., 1., 0., 0., 0., 0., 0., 1.]),
        mat(2, 2, &[0., 1., 0., 0.]),
        Domain::Discrete,
    )
    .unwrap()
}

pub fn example2_g(z: C) -> DMatrix<C> {
    let o = C::new(0.0, 0.0);
    cmat(2, 2, &[z * z, z / (z - 2.0), o, 1.0 / z])
}

pub fn example2_n(z: C) -> DMatrix<C> {
    let o = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    cmat(
        2,
        2,
        &[
            one,
            z / (2.0 * z - 1.0),
            o,
            (z - 2.0) / (z * (2.0 * z - 1.0)),
        ],
    )
}

pub fn example2_m(z: C) -> DMatrix<C> {
    let o = C::new(0.0, 0.0);
    cmat(2, 2, &[1.0 / (z * z), o, o, (z - 2.0) / (2.0 * z - 1.0)])
}

/// `‖x − y‖ / max(1, ‖y‖)`.
pub fn rel_err(x: &DMatrix<C>, y: &DMatrix<C>) -> f64 {
    (x - y).norm() / y.norm().max(1.0)
}

use descfact::RegionSpec;

pub mod kernels;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct GenOptions {
    pub domain: Domain,
    pub max_n: usize,
    pub max_io: usize,
    /// `E = I`.
    pub standard: bool,
    /// Allow infinite chains longer than one.
    pub improper: bool,
    pub uncontrollable: bool,
    pub unobservable: bool,
    /// Use an assignment region with a random target set.
    pub assign: bool,
}

impl GenOptions {
    pub fn new(domain: Domain) -> Self {
        Self {
            domain,
            max_n: 12,
            max_io: 4,
            standard: false,
            improper: true,
            uncontrollable: false,
            unobservable: false,
            assign: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Role {
    Normal,
    Uncontrollable,
    Unobservable,
}

#[derive(Debug, Clone)]
pub struct RandomSystem {
    pub sys: DescriptorSystem,
    pub region: RegionSpec,
    /// Finite eigenvalues with their role.
    pub finite: Vec<(C, Role)>,
    /// Lengths of the nilpotent chains (one simple infinite eigenvalue per chain).
    pub chains: Vec<usize>,
    pub a0: DMatrix<f64>,
    pub e0: DMatrix<f64>,
}

impl RandomSystem {
    /// Controllable finite eigenvalues outside the good region plus higher-order infinite ones.
    pub fn n_bad(&self) -> usize {
        let fin = self
            .finite
            .iter()
            .filter(|(l, r)| *r != Role::Uncontrollable && !self.region.contains(*l, 0.0))
            .count();
        fin + self.chains.iter().map(|k| k - 1).sum::<usize>()
    }

    pub fn bad_controllable(&self) -> Vec<C> {
        self.finite
            .iter()
            .filter(|(l, r)| *r != Role::Uncontrollable && !self.region.contains(*l, 0.0))
            .map(|(l, _)| *l)
            .collect()
    }
}

fn far_from(z: C, others: &[C], d: f64) -> bool {
    others
        .iter()
        .all(|o| (z - o).norm() > d && (z - o.conj()).norm() > d)
}

fn admissible(domain: Domain, alpha: f64, z: C) -> bool {
    match domain {
        Domain::Continuous => (z.re - alpha).abs() > 0.1 && z.re.abs() > 0.1,
        Domain::Discrete => (z.norm() - alpha).abs() > 0.1 && (z.norm() - 1.0).abs() > 0.1,
    }
}

fn draw_eigenvalue(rng: &mut ChaCha8Rng, domain: Domain, complex: bool) -> C {
    match domain {
        Domain::Continuous => {
            let re = rng.random_range(-3.0..3.0);
            let im = if complex {
                rng.random_range(0.3..3.0)
            } else {
                0.0
            };
            C::new(re, im)
        }
        Domain::Discrete => {
            let r = rng.random_range(0.05..2.5);
            if complex {
                C::from_polar(r, rng.random_range(0.3..2.8))
            } else if rng.random_bool(0.5) {
                C::new(r, 0.0)
            } else {
                C::new(-r, 0.0)
            }
        }
    }
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| gauss(rng));
    g.qr().q()
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn random_targets(rng: &mut ChaCha8Rng, domain: Domain, alpha: f64) -> Vec<C> {
    let mut out = Vec::new();
    for _ in 0..rng.random_range(1..=3) {
        let complex = rng.random_bool(0.4);
        let z = match domain {
            Domain::Continuous => C::new(
                alpha - rng.random_range(0.2..3.0),
                if complex {
                    rng.random_range(0.3..2.0)
                } else {
                    0.0
                },
            ),
            Domain::Discrete => {
                let r = rng.random_range(0.0..alpha.max(0.05) * 0.9);
                if complex {
                    C::from_polar(r, rng.random_range(0.3..2.8))
                } else {
                    C::new(r, 0.0)
                }
            }
        };
        out.push(z);
        if complex {
            out.push(z.conj());
        }
    }
    out
}

/// A descriptor system with exactly known eigenstructure, hidden by orthogonal
/// transformations.
pub fn random_system(seed: u64, opts: GenOptions) -> RandomSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = opts.domain;
    let alpha = match domain {
        Domain::Continuous => [-0.05, -0.5, -1.0][rng.random_range(0..3)],
        Domain::Discrete => [0.95, 0.5, 0.3][rng.random_range(0..3)],
    };
    let region = if opts.assign {
        RegionSpec::assign(domain, alpha, random_targets(&mut rng, domain, alpha)).unwrap()
    } else {
        RegionSpec::stabilize(domain, alpha).unwrap()
    };
    let n = rng.random_range(1..=opts.max_n);
    let m = rng.random_range(1..=opts.max_io);
    let p = rng.random_range(1..=opts.max_io);

    let mut chains = Vec::new();
    if !opts.standard {
        let mut used = 0;
        for _ in 0..rng.random_range(0..=m.min(p).min(3)) {
            let k = if opts.improper {
                rng.random_range(1..=3)
            } else {
                1
            };
            if used + k < n {
                chains.push(k);
                used += k;
            }
        }
    }
    let n_inf: usize = chains.iter().sum();

    // Finite diagonal blocks: (eigenvalue, size, role).
    let mut blocks: Vec<(C, usize, Role)> = Vec::new();
    let mut values: Vec<C> = Vec::new();
    let mut left = n - n_inf;
    while left > 0 {
        let complex = left >= 2 && rng.random_bool(0.4);
        let z = loop {
            let z = draw_eigenvalue(&mut rng, domain, complex);
            if admissible(domain, alpha, z) && far_from(z, &values, 0.1) {
                break z;
            }
        };
        values.push(z);
        let role = if opts.uncontrollable && rng.random_bool(0.2) {
            Role::Uncontrollable
        } else if opts.unobservable && rng.random_bool(0.2) {
            Role::Unobservable
        } else {
            Role::Normal
        };
        let k = if complex { 2 } else { 1 };
        blocks.push((z, k, role));
        left -= k;
    }
    let rank = |r: Role| match r {
        Role::Unobservable => 0,
        Role::Normal => 1,
        Role::Uncontrollable => 3,
    };
    blocks.sort_by_key(|b| rank(b.2));
    let split = blocks
        .iter()
        .position(|b| b.2 == Role::Uncontrollable)
        .unwrap_or(blocks.len());

    let mut a0 = DMatrix::zeros(n, n);
    let mut e0 = DMatrix::zeros(n, n);
    let mut b0 = DMatrix::from_fn(n, m, |_, _| gauss(&mut rng));
    let mut c0 = DMatrix::from_fn(p, n, |_, _| gauss(&mut rng));
    // (start, size) of each diagonal block; the chains form one block.
    let mut starts: Vec<(usize, usize)> = Vec::new();
    let mut finite = Vec::new();
    let mut pos = 0;
    let mut place_finite = |a0: &mut DMatrix<f64>,
                            e0: &mut DMatrix<f64>,
                            b0: &mut DMatrix<f64>,
                            c0: &mut DMatrix<f64>,
                            rng: &mut ChaCha8Rng,
                            pos: &mut usize,
                            (z, k, role): (C, usize, Role)| {
        let j = *pos;
        if k == 1 {
            let e = if opts.standard {
                1.0
            } else {
                rng.random_range(0.5..2.0)
            };
            a0[(j, j)] = z.re * e;
            e0[(j, j)] = e;
            finite.push((z, role));
        } else {
            let s = rng.random_range(0.5..2.0);
            a0[(j, j)] = z.re;
            a0[(j + 1, j + 1)] = z.re;
            a0[(j, j + 1)] = z.im * s;
            a0[(j + 1, j)] = -z.im / s;
            e0[(j, j)] = 1.0;
            e0[(j + 1, j + 1)] = 1.0;
            finite.push((z, role));
            finite.push((z.conj(), role));
        }
        match role {
            Role::Uncontrollable => b0.rows_mut(j, k).fill(0.0),
            Role::Unobservable => c0.columns_mut(j, k).fill(0.0),
            Role::Normal => {}
        }
        *pos += k;
        (j, k)
    };
    for &blk in &blocks[..split] {
        let s = place_finite(&mut a0, &mut e0, &mut b0, &mut c0, &mut rng, &mut pos, blk);
        starts.push(s);
    }
    if n_inf > 0 {
        let j0 = pos;
        for &k in &chains {
            for i in 0..k {
                a0[(pos + i, pos + i)] = 1.0;
                if i + 1 < k {
                    e0[(pos + i, pos + i + 1)] = 1.0;
                }
            }
            pos += k;
        }
        starts.push((j0, n_inf));
    }
    for &blk in &blocks[split..] {
        let s = place_finite(&mut a0, &mut e0, &mut b0, &mut c0, &mut rng, &mut pos, blk);
        starts.push(s);
    }
    // Coupling above the block diagonal keeps the eigenstructure.
    for (bi, &(r0, rk)) in starts.iter().enumerate() {
        for &(c0_, ck) in &starts[bi + 1..] {
            for i in r0..r0 + rk {
                for j in c0_..c0_ + ck {
                    a0[(i, j)] = 0.5 * gauss(&mut rng);
                    if !opts.standard {
                        e0[(i, j)] = 0.5 * gauss(&mut rng);
                    }
                }
            }
        }
    }
    let d = DMatrix::from_fn(p, m, |_, _| gauss(&mut rng));
    let u = random_orthogonal(&mut rng, n);
    let sys = if opts.standard {
        DescriptorSystem::standard(
            &u * &a0 * u.transpose(),
            &u * &b0,
            &c0 * u.transpose(),
            d,
            domain,
        )
        .unwrap()
    } else {
        let v = random_orthogonal(&mut rng, n);
        DescriptorSystem::new(
            &u * &a0 * &v,
            Some(&u * &e0 * &v),
            &u * &b0,
            &c0 * &v,
            d,
            domain,
        )
        .unwrap()
    };
    RandomSystem {
        sys,
        region,
        finite,
        chains,
        a0,
        e0,
    }
}

/// Finite roots of `det(A − λE)` from interpolation on a circle and a companion matrix;
/// `degree` is the number of finite eigenvalues.
pub fn det_roots(a: &DMatrix<f64>, e: &DMatrix<f64>, degree: usize, radius: f64) -> Vec<C> {
    let n = a.nrows();
    let npts = n + 1;
    let ac = a.map(|x| C::new(x, 0.0));
    let ec = e.map(|x| C::new(x, 0.0));
    let w = |j: usize| C::from_polar(1.0, std::f64::consts::TAU * j as f64 / npts as f64);
    let vals: Vec<C> = (0..npts)
        .map(|j| (&ac - &ec * (w(j) * radius)).determinant())
        .collect();
    let coef: Vec<f64> = (0..npts)
        .map(|k| {
            let s: C = (0..npts).map(|j| vals[j] * w(j * k).conj()).sum();
            (s / (npts as f64 * radius.powi(k as i32))).re
        })
        .collect();
    if degree == 0 {
        return Vec::new();
    }
    let lead = coef[degree];
    let mut comp = DMatrix::zeros(degree, degree);
    for i in 1..degree {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        comp[(i, degree - 1)] = -coef[i] / lead;
    }
    comp.complex_eigenvalues().iter().copied().collect()
}

/// Largest distance in a greedy nearest matching of two multisets (∞ on size mismatch).
pub fn multiset_distance(x: &[C], y: &[C]) -> f64 {
    if x.len() != y.len() {
        return f64::INFINITY;
    }
    let mut rest: Vec<C> = y.to_vec();
    let mut worst: f64 = 0.0;
    for a in x {
        let (i, d) = rest
            .iter()
            .enumerate()
            .map(|(i, b)| (i, (a - b).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        worst = worst.max(d);
        rest.swap_remove(i);
    }
    worst
}

/// Generator options for seed `seed` of the mixed property suite.
pub fn mixed_options(seed: u64) -> GenOptions {
    let domain = if seed.is_multiple_of(2) {
        Domain::Continuous
    } else {
        Domain::Discrete
    };
    let mut o = GenOptions::new(domain);
    o.standard = seed.is_multiple_of(5);
    o.uncontrollable = seed.is_multiple_of(3);
    o.unobservable = seed % 4 == 1;
    o.assign = seed % 7 < 2;
    o
}

/// Runs the proper factorization on one generated system and checks every quality measure.
pub fn proper_case(seed: u64) -> Result<(), String> {
    use descfact::*;
    let rs = random_system(seed, mixed_options(seed));
    let tol = Tolerances::for_system(&rs.sys);
    let (f, _) = grcf(&rs.sys, &rs.region, &tol).map_err(|e| format!("seed {seed}: {e}"))?;
    let r =
        check_rcf(&rs.sys, &f, &rs.region, &tol, 16).map_err(|e| format!("seed {seed}: {e}"))?;
    let report = pole_report(&rs.sys, &rs.region, &tol).map_err(|e| format!("seed {seed}: {e}"))?;
    let den = minimal_denominator(&f, tol.rank_tol).map_err(|e| format!("seed {seed}: {e}"))?;
    let fail = |what: String| Err(format!("seed {seed}: {what}"));
    if r.max_error > 1e-6 {
        return fail(format!("reconstruction error {:e}", r.max_error));
    }
    if !r.region_violations.is_empty() {
        return fail(format!(
            "factor poles outside C_g: {:?}",
            r.region_violations
        ));
    }
    if r.improper_excess != 0 {
        return fail(format!(
            "{} higher-order infinite factor poles",
            r.improper_excess
        ));
    }
    if r.min_stacked_sv.is_some_and(|s| s < 1e-8) {
        return fail(format!("stacked factor loses rank: {:?}", r.min_stacked_sv));
    }
    if den.order() != report.n_bad {
        return fail(format!(
            "denominator order {} but n_b = {}",
            den.order(),
            report.n_bad
        ));
    }
    if report.n_bad != rs.n_bad() {
        return fail(format!(
            "pole report n_b = {} but generator n_b = {}",
            report.n_bad,
            rs.n_bad()
        ));
    }
    Ok(())
}

/// Options of the inner-denominator suite: no boundary poles, proper in continuous time.
pub fn inner_options(seed: u64) -> GenOptions {
    let domain = if seed.is_multiple_of(2) {
        Domain::Continuous
    } else {
        Domain::Discrete
    };
    let mut o = GenOptions::new(domain);
    o.standard = seed.is_multiple_of(5);
    o.uncontrollable = seed.is_multiple_of(3);
    o.unobservable = seed % 4 == 1;
    o.improper = domain == Domain::Discrete;
    o
}

/// Poles of a reflected inner denominator: controllable bad finite poles mirrored across
/// the boundary and, in discrete time, one pole at the origin per higher-order infinite pole.
pub fn reflected_poles(rs: &RandomSystem) -> Vec<C> {
    let domain = rs.sys.domain();
    let inner = RegionSpec::inner(domain);
    let mut out: Vec<C> = rs
        .finite
        .iter()
        .filter(|(l, r)| *r != Role::Uncontrollable && !inner.contains(*l, 0.0))
        .map(|(l, _)| match domain {
            Domain::Continuous => -l.conj(),
            Domain::Discrete => 1.0 / l.conj(),
        })
        .collect();
    if domain == Domain::Discrete {
        let k: usize = rs.chains.iter().map(|k| k - 1).sum();
        out.extend(std::iter::repeat_n(C::new(0.0, 0.0), k));
    }
    out
}

pub fn inner_case(seed: u64) -> Result<(), String> {
    use descfact::verify::finite_eigenvalues;
    use descfact::*;
    let rs = random_system(seed, inner_options(seed));
    let tol = Tolerances::for_system(&rs.sys);
    let region = RegionSpec::inner(rs.sys.domain());
    let (f, _) = grcfid(&rs.sys, &tol).map_err(|e| format!("seed {seed}: {e}"))?;
    let den = minimal_denominator(&f, tol.rank_tol).map_err(|e| format!("seed {seed}: {e}"))?;
    let fail = |what: String| Err(format!("seed {seed}: {what}"));
    let expected = reflected_poles(&rs);
    let got = finite_eigenvalues(den.a(), &den.e());
    let dist = multiset_distance(&got, &expected);
    if dist > 1e-7 {
        return fail(format!("denominator poles {got:?}, expected {expected:?}"));
    }
    let inner_err = check_inner(&f.denominator().map_err(|e| e.to_string())?, 64)
        .map_err(|e| format!("seed {seed}: {e}"))?;
    if inner_err > 1e-7 {
        return fail(format!("innerness error {inner_err:e}"));
    }
    let r = check_rcf(&rs.sys, &f, &region, &tol, 16).map_err(|e| format!("seed {seed}: {e}"))?;
    if r.max_error > 1e-6 {
        return fail(format!("reconstruction error {:e}", r.max_error));
    }
    Ok(())
}

/// Continuous-time system with a controllable higher-order infinite pole.
pub fn continuous_improper(seed: u64) -> DescriptorSystem {
    let mut o = GenOptions::new(Domain::Continuous);
    let mut s = seed;
    loop {
        o.max_io = 3;
        let rs = random_system(s, o);
        if rs.chains.iter().any(|&k| k > 1) {
            return rs.sys;
        }
        s += 1_000_003;
    }
}

/// Dense Gaussian pencil of order `n` with `m` inputs and outputs, shifted so that about
/// `bad_fraction` of its poles lie right of `α = −0.05`.
pub fn dense_system(seed: u64, n: usize, m: usize, bad_fraction: f64) -> DescriptorSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let a = DMatrix::from_fn(n, n, |_, _| 3.0 * scale * gauss(&mut rng));
    let e = DMatrix::identity(n, n) + DMatrix::from_fn(n, n, |_, _| 0.2 * scale * gauss(&mut rng));
    let b = DMatrix::from_fn(n, m, |_, _| gauss(&mut rng));
    let c = DMatrix::from_fn(m, n, |_, _| gauss(&mut rng));
    let mut re: Vec<f64> = descfact::verify::finite_eigenvalues(&a, &e)
        .iter()
        .map(|z| z.re)
        .collect();
    re.sort_by(|x, y| y.total_cmp(x));
    let mut k = ((bad_fraction * n as f64).round() as usize).clamp(1, n - 1);
    while k < n - 1 && re[k - 1] - re[k] < 1e-6 {
        k += 1;
    }
    let shift = 0.5 * (re[k - 1] + re[k]) + 0.05;
    let a = a - &e * shift;
    DescriptorSystem::new(a, Some(e), b, c, DMatrix::zeros(m, m), Domain::Continuous).unwrap()
}

/// Eigenvalues of the `1×1` or `2×2` diagonal block of `(A, E)` starting at `j`.
pub fn diagonal_block_eigenvalues(
    a: &DMatrix<f64>,
    e: &DMatrix<f64>,
    j: usize,
    k: usize,
) -> Vec<C> {
    if k == 1 {
        return vec![C::new(a[(j, j)] / e[(j, j)], 0.0)];
    }
    let ab = a.view((j, j), (2, 2)).clone_owned();
    let eb = e.view((j, j), (2, 2)).clone_owned();
    let m = eb.try_inverse().expect("singular E block") * ab;
    let tr = m.trace();
    let det = m.determinant();
    let disc = C::new(tr * tr - 4.0 * det, 0.0).sqrt();
    vec![(tr + disc) / 2.0, (tr - disc) / 2.0]
}

/// Checks the ordered Schur form of one generated system.
pub fn gsorsf_case(seed: u64, max_n: usize) -> Result<(), String> {
    use descfact::gsorsf::gsorsf;
    use descfact::linalg::orthogonality_error;
    use descfact::Tolerances;
    let mut o = mixed_options(seed);
    o.max_n = max_n;
    let rs = random_system(seed, o);
    let sys = &rs.sys;
    let n = sys.order();
    let tol = Tolerances::for_system(sys);
    let g = gsorsf(sys, &rs.region, &tol).map_err(|e| format!("seed {seed}: {e}"))?;
    let fail = |what: String| Err(format!("seed {seed}: {what}"));
    let d = g.dims;

    let orth = orthogonality_error(&g.q).max(orthogonality_error(&g.z));
    if orth > 10.0 * n as f64 * f64::EPSILON {
        return fail(format!("orthogonality error {orth:e}"));
    }
    let e0 = sys.e();
    let scale = sys.a().norm().max(e0.norm());
    let back = (&g.q.transpose() * &g.a * g.z.transpose() - sys.a()).norm()
        + (&g.q.transpose() * &g.e * g.z.transpose() - &e0).norm();
    if back > 1e3 * f64::EPSILON * scale.max(1.0) {
        return fail(format!("backward error {back:e}"));
    }

    if d.total() != n || g.blocks.iter().sum::<usize>() != n {
        return fail(format!("dimensions {d:?}, blocks {:?}", g.blocks));
    }
    if d.n_inf_simple != rs.chains.len() {
        return fail(format!(
            "{} simple infinite, generator has {}",
            d.n_inf_simple,
            rs.chains.len()
        ));
    }
    let higher: usize = rs.chains.iter().map(|k| k - 1).sum();
    if d.n_bad_infinite != higher {
        return fail(format!(
            "{} higher infinite, generator has {higher}",
            d.n_bad_infinite
        ));
    }

    // Structural zeros: quasi-triangular A, triangular E.
    let mut start = 0;
    for &k in &g.blocks {
        for j in start..start + k {
            for i in start + k..n {
                if g.a[(i, j)] != 0.0 {
                    return fail(format!("A[{i},{j}] = {:e}", g.a[(i, j)]));
                }
            }
            for i in j + 1..n {
                if g.e[(i, j)] != 0.0 {
                    return fail(format!("E[{i},{j}] = {:e}", g.e[(i, j)]));
                }
            }
        }
        start += k;
    }
    if g.e.columns(0, d.n_inf_simple).iter().any(|&x| x != 0.0) {
        return fail("E has nonzeros in the simple infinite columns".into());
    }
    let nf = d.n_good + d.n_bad_finite;
    let fin_end = d.n_inf_simple + nf;
    if (fin_end..n).any(|j| g.e[(j, j)] != 0.0) {
        return fail("E has a nonzero diagonal in the higher infinite part".into());
    }
    if (0..d.n_inf_simple)
        .chain(fin_end..n)
        .any(|j| g.a[(j, j)] == 0.0)
    {
        return fail("A has a zero diagonal entry in an infinite block".into());
    }

    let mut got = Vec::new();
    let mut start = 0;
    for &k in &g.blocks {
        if start >= d.n_inf_simple && start < fin_end {
            let ev = diagonal_block_eigenvalues(&g.a, &g.e, start, k);
            let good = start < d.bad_start();
            if ev.iter().any(|&z| rs.region.contains(z, 0.0) != good) {
                return fail(format!("block at {start} with {ev:?} misclassified"));
            }
            got.extend(ev);
        }
        start += k;
    }
    let expected: Vec<C> = rs.finite.iter().map(|(z, _)| *z).collect();
    let dist = multiset_distance(&got, &expected);
    if dist > 1e-8 {
        return fail(format!("eigenvalues {got:?} vs generator {expected:?}"));
    }
    let radius = expected.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let oracle = det_roots(sys.a(), &e0, nf, radius);
    let dist = multiset_distance(&got, &oracle);
    if dist > 1e-8 {
        return fail(format!(
            "eigenvalues {got:?} vs determinant roots {oracle:?}"
        ));
    }
    Ok(())
}
