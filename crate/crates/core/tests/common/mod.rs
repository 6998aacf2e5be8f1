//! Random instances and worst-case property measurements shared by the
//! integration targets.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use singular_cones::linalg::SymMatrix;
use singular_cones::operators::{
    pucci_minus, pucci_oracle, pucci_plus, EllipticityParams, IsaacsFamily, OperatorSpec,
};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_sym(rng: &mut TestRng, n: usize, scale: f64) -> SymMatrix {
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.set(i, j, scale * rng.gen_range(-1.0..1.0));
        }
    }
    m
}

pub fn random_vec(rng: &mut TestRng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
}

/// A nonzero point with `0.5 ≤ |x| ≤ 2`.
pub fn random_point(rng: &mut TestRng, n: usize) -> Vec<f64> {
    loop {
        let v = random_vec(rng, n, 1.0);
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if r > 0.1 {
            let target = rng.gen_range(0.5..2.0);
            return v.iter().map(|a| a * target / r).collect();
        }
    }
}

/// Columns of a random orthogonal matrix by Gram–Schmidt.
pub fn random_orthogonal(rng: &mut TestRng, n: usize) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = random_vec(rng, n, 1.0);
        for c in &cols {
            let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(c).for_each(|(a, b)| *a -= d * b);
        }
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if r > 1e-3 {
            cols.push(v.into_iter().map(|a| a / r).collect());
        }
    }
    cols
}

/// `Uᵀ M U` for `U` with the given columns.
pub fn conjugate(m: &SymMatrix, u: &[Vec<f64>]) -> SymMatrix {
    let n = m.dim();
    SymMatrix::from_fn(n, |i, j| {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += u[i][a] * m.get(a, b) * u[j][b];
            }
        }
        s
    })
}

/// A positive semidefinite `B Bᵀ`.
pub fn random_psd(rng: &mut TestRng, n: usize) -> SymMatrix {
    let b: Vec<Vec<f64>> = (0..n).map(|_| random_vec(rng, n, 1.0)).collect();
    SymMatrix::from_fn(n, |i, j| (0..n).map(|k| b[i][k] * b[j][k]).sum())
}

/// `Q diag(a) Qᵀ` with `a` uniform in `[λ, Λ]`.
pub fn random_admissible(rng: &mut TestRng, n: usize, p: &EllipticityParams) -> SymMatrix {
    let q = random_orthogonal(rng, n);
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(p.lambda..=p.big_lambda)).collect();
    SymMatrix::from_fn(n, |i, j| (0..n).map(|k| q[k][i] * a[k] * q[k][j]).sum())
}

pub fn random_params(rng: &mut TestRng) -> EllipticityParams {
    let lambda = rng.gen_range(0.2..1.5);
    let big = lambda * rng.gen_range(1.0..4.0);
    EllipticityParams::new(lambda, big, rng.gen_range(0.0..2.0)).unwrap()
}

/// One operator of every variant in dimension `n`.
pub fn all_specs(rng: &mut TestRng, n: usize) -> Vec<OperatorSpec> {
    let p = random_params(rng);
    let a: Vec<Vec<SymMatrix>> = (0..2)
        .map(|_| (0..3).map(|_| random_admissible(rng, n, &p)).collect())
        .collect();
    let b: Vec<Vec<f64>> = (0..2)
        .map(|_| (0..3).map(|_| rng.gen_range(0.0..=p.mu)).collect())
        .collect();
    let isaacs = OperatorSpec::IsaacsFamily(IsaacsFamily::new(a, b, p).unwrap());
    let pucci = OperatorSpec::pucci_minus(p.lambda, p.big_lambda).unwrap();
    vec![
        OperatorSpec::Laplacian,
        OperatorSpec::pucci_plus(p.lambda, p.big_lambda).unwrap(),
        pucci.clone(),
        OperatorSpec::extremal_plus(p.lambda, p.big_lambda, p.mu).unwrap(),
        OperatorSpec::extremal_minus(p.lambda, p.big_lambda, p.mu).unwrap(),
        isaacs.clone(),
        isaacs.dual(),
        pucci.invert(),
        isaacs.invert(),
    ]
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dim(rng: &mut TestRng) -> usize {
    rng.gen_range(2..=5)
}

/// Smallest slack of `P⁻(M)+P⁻(N) ≤ P⁻(M+N) ≤ P⁻(M)+P⁺(N) ≤ P⁺(M+N) ≤ P⁺(M)+P⁺(N)`.
pub fn chain_slack(instances: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..instances {
        let n = dim(&mut rng);
        let p = random_params(&mut rng);
        let (m, k) = (random_sym(&mut rng, n, 1.0), random_sym(&mut rng, n, 1.0));
        let s = SymMatrix::from_fn(n, |i, j| m.get(i, j) + k.get(i, j));
        let chain = [
            pucci_minus(&m, &p) + pucci_minus(&k, &p),
            pucci_minus(&s, &p),
            pucci_minus(&m, &p) + pucci_plus(&k, &p),
            pucci_plus(&s, &p),
            pucci_plus(&m, &p) + pucci_plus(&k, &p),
        ];
        for w in chain.windows(2) {
            worst = worst.min(w[1] - w[0]);
        }
    }
    worst
}

/// Largest `|P±(UᵀMU) - P±(M)|`.
pub fn rotation_defect(instances: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let n = dim(&mut rng);
        let p = random_params(&mut rng);
        let m = random_sym(&mut rng, n, 1.0);
        let u = random_orthogonal(&mut rng, n);
        let r = conjugate(&m, &u);
        worst = worst
            .max((pucci_plus(&r, &p) - pucci_plus(&m, &p)).abs())
            .max((pucci_minus(&r, &p) - pucci_minus(&m, &p)).abs());
    }
    worst
}

/// Smallest `F(M) - F(M + P)` over `P ⪰ 0` and every variant.
pub fn ellipticity_slack(instances: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..instances {
        let n = dim(&mut rng);
        for spec in all_specs(&mut rng, n) {
            let m = random_sym(&mut rng, n, 1.0);
            let psd = random_psd(&mut rng, n);
            let big = SymMatrix::from_fn(n, |i, j| m.get(i, j) + psd.get(i, j));
            let (p, x) = (random_vec(&mut rng, n, 1.0), random_point(&mut rng, n));
            let lo = spec.evaluate(&m, &p, &x).unwrap();
            let hi = spec.evaluate(&big, &p, &x).unwrap();
            worst = worst.min(lo - hi);
        }
    }
    worst
}

/// Largest `|F(tM, tp, x) - t F(M, p, x)| / (1 + |t F|)` for `t ∈ {0, ½, 2, 10}`.
pub fn homogeneity_defect(instances: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let n = dim(&mut rng);
        for spec in all_specs(&mut rng, n) {
            let m = random_sym(&mut rng, n, 1.0);
            let (p, x) = (random_vec(&mut rng, n, 1.0), random_point(&mut rng, n));
            let base = spec.evaluate(&m, &p, &x).unwrap();
            for t in [0.0, 0.5, 2.0, 10.0] {
                let tp: Vec<f64> = p.iter().map(|a| t * a).collect();
                let v = spec.evaluate(&m.scaled(t), &tp, &x).unwrap();
                worst = worst.max((v - t * base).abs() / (1.0 + (t * base).abs()));
            }
        }
    }
    worst
}

/// Largest `|F(r²M, rp, x) - r² F(M, p, rx)| / (1 + r²|F|)`.
pub fn dilation_defect(instances: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let n = dim(&mut rng);
        for spec in all_specs(&mut rng, n) {
            let r: f64 = rng.gen_range(0.3..3.0);
            let m = random_sym(&mut rng, n, 1.0);
            let (p, x) = (random_vec(&mut rng, n, 1.0), random_point(&mut rng, n));
            let rp: Vec<f64> = p.iter().map(|a| r * a).collect();
            let rx: Vec<f64> = x.iter().map(|a| r * a).collect();
            let lhs = spec.evaluate(&m.scaled(r * r), &rp, &x).unwrap();
            let rhs = r * r * spec.evaluate(&m, &p, &rx).unwrap();
            worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
        }
    }
    worst
}

/// Smallest slack of
/// `P⁻(M-N) - μ|p-q|/|x| ≤ F(M,p,x) - F(N,q,x) ≤ P⁺(M-N) + μ|p-q|/|x|`
/// with each variant's own constants.
pub fn sandwich_slack(instances: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..instances {
        let n = dim(&mut rng);
        for spec in all_specs(&mut rng, n) {
            let e = spec.ellipticity(n);
            let (m, k) = (random_sym(&mut rng, n, 1.0), random_sym(&mut rng, n, 1.0));
            let (p, q) = (random_vec(&mut rng, n, 1.0), random_vec(&mut rng, n, 1.0));
            let x = random_point(&mut rng, n);
            let diff = spec.evaluate(&m, &p, &x).unwrap() - spec.evaluate(&k, &q, &x).unwrap();
            let d = SymMatrix::from_fn(n, |i, j| m.get(i, j) - k.get(i, j));
            let pq: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a - b).collect();
            let drift = e.mu * norm(&pq) / norm(&x);
            worst = worst
                .min(diff - (pucci_minus(&d, &e) - drift))
                .min(pucci_plus(&d, &e) + drift - diff);
        }
    }
    worst
}

/// Largest of `|F̃(M,p,x) + F(-M,-p,x)|` and `|F̃̃ - F|`.
pub fn dual_defect(instances: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let n = dim(&mut rng);
        for spec in all_specs(&mut rng, n) {
            let m = random_sym(&mut rng, n, 1.0);
            let (p, x) = (random_vec(&mut rng, n, 1.0), random_point(&mut rng, n));
            let np: Vec<f64> = p.iter().map(|a| -a).collect();
            let f = spec.evaluate(&m, &p, &x).unwrap();
            let dual = spec.dual().evaluate(&m, &p, &x).unwrap();
            let minus = spec.evaluate(&m.scaled(-1.0), &np, &x).unwrap();
            let twice = spec.dual().dual().evaluate(&m, &p, &x).unwrap();
            worst = worst.max((dual + minus).abs()).max((twice - f).abs());
        }
    }
    worst
}

/// Largest `|F**(M,p,x) - F(M,p,x)|`.
pub fn involution_defect(instances: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let n = dim(&mut rng);
        for spec in all_specs(&mut rng, n) {
            let m = random_sym(&mut rng, n, 1.0);
            let (p, x) = (random_vec(&mut rng, n, 1.0), random_point(&mut rng, n));
            let f = spec.evaluate(&m, &p, &x).unwrap();
            let back = spec.invert().invert().evaluate(&m, &p, &x).unwrap();
            worst = worst.max((back - f).abs() / (1.0 + f.abs()));
        }
    }
    worst
}

/// Largest `oracle(M) - P⁺(M)`; never positive when the oracle is a valid
/// lower estimate of the supremum.
pub fn oracle_excess(instances: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst = f64::NEG_INFINITY;
    for s in 0..instances {
        let n = dim(&mut rng);
        let p = random_params(&mut rng);
        let m = random_sym(&mut rng, n, 1.0);
        worst = worst.max(pucci_oracle(&m, &p, samples, seed ^ s as u64) - pucci_plus(&m, &p));
    }
    worst
}

/// Largest violation of `P⁻(M) ≤ -tr(AM) ≤ P⁺(M)` over admissible `A` drawn
/// here, independently of the library's oracle.
pub fn linear_family_excess(instances: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..instances {
        let n = dim(&mut rng);
        let p = random_params(&mut rng);
        let m = random_sym(&mut rng, n, 1.0);
        let a = random_admissible(&mut rng, n, &p);
        let v = -a.trace_product(&m);
        worst = worst.max(v - pucci_plus(&m, &p)).max(pucci_minus(&m, &p) - v);
    }
    worst
}

/// One argument list per CLI command and output format, sized to run in well
/// under a second each.
pub fn cli_cases() -> Vec<Vec<&'static str>> {
    let pm = ["--op", "pucci-minus", "--lambda", "1", "--Lambda", "2"];
    let with = |head: &[&'static str], tail: &[&'static str]| -> Vec<&'static str> {
        head.iter().chain(pm.iter()).chain(tail.iter()).copied().collect()
    };
    vec![
        with(&["exponents"], &["--sweep", "0.5,0.8,1.2", "--format", "csv"]),
        vec!["exponents", "--op", "laplacian", "--theta0", "60", "--degrees"],
        vec!["profile", "--op", "extremal-minus", "--lambda", "1", "--Lambda", "2", "--mu", "1", "--format", "csv"],
        with(&["profile"], &["--branch", "minus"]),
        vec!["bounds", "--op", "extremal-plus", "--lambda", "1", "--Lambda", "2", "--mu", "0.5", "--dim", "3"],
        with(&["bounds"], &["--format", "csv"]),
        with(&["verify-barrier"], &["--which", "super", "--samples", "2000", "--seed", "7"]),
        with(&["verify-barrier"], &["--which", "sub", "--samples", "2000"]),
        with(&["solve"], &["--nr", "24", "--ntheta", "24"]),
        vec!["ratios", "--op", "laplacian", "--r0", "1", "--r1", "20", "--nr", "40", "--ntheta", "20", "--format", "csv"],
        vec!["experiment", "--kind", "manufactured", "--sizes", "16,24"],
        vec!["experiment", "--kind", "harnack", "--sizes", "16", "--r0", "1", "--r1", "4"],
        vec!["experiment", "--kind", "singularity", "--r0", "0.01", "--nr", "40", "--ntheta", "17", "--mode", "bounded", "--value", "0"],
        with(&["experiment", "--kind", "hopf"], &["--r0", "0.01", "--nr", "40", "--ntheta", "17", "--theta0", "1.0", "--scheme", "central"]),
        vec!["experiment", "--kind", "ratios", "--r1", "20", "--nr", "40", "--ntheta", "17", "--format", "csv"],
    ]
}
