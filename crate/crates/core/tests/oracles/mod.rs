//! Independent reference implementations used only by tests.
//!
//! Nothing here calls into the library's numeric code paths.
#![allow(dead_code)]

use rand::Rng;

/// Dense symmetric weight matrix over `n` nodes.
#[derive(Debug, Clone)]
pub struct DenseGraph {
    pub n: usize,
    pub weights: Vec<Vec<u64>>,
}

impl DenseGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            weights: vec![vec![0; n]; n],
        }
    }

    pub fn add(&mut self, u: usize, v: usize, w: u64) {
        assert_ne!(u, v);
        self.weights[u][v] += w;
        self.weights[v][u] += w;
    }

    pub fn edges(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.weights[u][v] > 0 {
                    out.push((u, v, self.weights[u][v]));
                }
            }
        }
        out
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in (u + 1)..n {
                g.add(u, v, 1);
            }
        }
        g
    }

    pub fn ring(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            g.add(u, (u + 1) % n, 1);
        }
        g
    }

    pub fn star(n: usize) -> Self {
        let mut g = Self::new(n);
        for leaf in 1..n {
            g.add(0, leaf, 1);
        }
        g
    }

    /// Random graph with `n` nodes, edge probability 0.4 and weights in 1..=10.
    /// At least one edge is always present.
    pub fn random<R: Rng>(rng: &mut R, n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random_bool(0.4) {
                    g.add(u, v, rng.random_range(1..=10));
                }
            }
        }
        if g.edges().is_empty() {
            let u = rng.random_range(0..n);
            let v = (u + 1 + rng.random_range(0..n - 1)) % n;
            g.add(u, v, rng.random_range(1..=10));
        }
        g
    }
}

/// Entropy in bits via natural logs, skipping zeros.
pub fn entropy_bits(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &x in p {
        if x != 0.0 {
            h -= x * x.ln();
        }
    }
    h / std::f64::consts::LN_2
}

fn rows(g: &DenseGraph) -> Vec<Option<Vec<f64>>> {
    (0..g.n)
        .map(|i| {
            let s: u64 = g.weights[i].iter().sum();
            (s > 0).then(|| g.weights[i].iter().map(|w| *w as f64 / s as f64).collect())
        })
        .collect()
}

/// `(determinism, degeneracy)` straight from the definitions, isolated nodes dropped.
pub fn det_deg(g: &DenseGraph) -> (f64, f64) {
    let rows = rows(g);
    let active: Vec<&Vec<f64>> = rows.iter().flatten().collect();
    let n = active.len() as f64;
    let mean_row_entropy = active.iter().map(|r| entropy_bits(r)).sum::<f64>() / n;
    let mut avg = vec![0.0; g.n];
    for r in &active {
        for (j, p) in r.iter().enumerate() {
            avg[j] += p / n;
        }
    }
    (n.log2() - mean_row_entropy, n.log2() - entropy_bits(&avg))
}

/// Solves `A x = b` by Gauss-Jordan elimination with partial pivoting and
/// returns `(x, A^-1)`.
pub fn gauss_jordan(a: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let p = a.len();
    let mut aug: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..p).map(|j| if i == j { 1.0 } else { 0.0 }));
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&x, &y| aug[x][col].abs().partial_cmp(&aug[y][col].abs()).unwrap())
            .unwrap();
        aug.swap(col, pivot);
        let d = aug[col][col];
        assert!(d.abs() > 1e-300, "singular system");
        for v in aug[col].iter_mut() {
            *v /= d;
        }
        for r in 0..p {
            if r != col {
                let f = aug[r][col];
                if f != 0.0 {
                    for c in 0..(2 * p + 1) {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
    }
    let x = aug.iter().map(|row| row[2 * p]).collect();
    let inv = aug.iter().map(|row| row[p..2 * p].to_vec()).collect();
    (x, inv)
}

pub struct NormalEquationsFit {
    pub beta: Vec<f64>,
    pub se: Vec<f64>,
    pub rss: f64,
}

/// OLS with intercept via explicit normal equations; `x` holds predictor columns.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> NormalEquationsFit {
    let n = y.len();
    let mut design: Vec<Vec<f64>> = vec![vec![1.0; n]];
    design.extend(x.iter().cloned());
    let p = design.len();
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for i in 0..p {
        for j in 0..p {
            for r in 0..n {
                xtx[i][j] += design[i][r] * design[j][r];
            }
        }
        for r in 0..n {
            xty[i] += design[i][r] * y[r];
        }
    }
    let (beta, inv) = gauss_jordan(&xtx, &xty);
    let mut rss = 0.0;
    for r in 0..n {
        let fit: f64 = (0..p).map(|j| design[j][r] * beta[j]).sum();
        rss += (y[r] - fit).powi(2);
    }
    let s2 = rss / (n - p) as f64;
    let se = (0..p).map(|j| (s2 * inv[j][j]).sqrt()).collect();
    NormalEquationsFit { beta, se, rss }
}

/// `ln Γ(x)` for positive integers and half-integers, from exact recurrences.
pub fn ln_gamma_half_integer(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    assert!((2.0 * x - twice).abs() < 1e-12 && x > 0.0, "half-integer expected, got {x}");
    let twice = twice as u64;
    if twice.is_multiple_of(2) {
        // Γ(k) = (k-1)!
        (1..twice / 2).map(|i| (i as f64).ln()).sum()
    } else {
        // Γ(k + 1/2) = Γ(1/2) * prod_{i=0}^{k-1} (i + 1/2)
        let k = twice / 2;
        0.5 * std::f64::consts::PI.ln() + (0..k).map(|i| (i as f64 + 0.5).ln()).sum::<f64>()
    }
}

/// `I_x(a, b)` by the hypergeometric power series with compensated summation,
/// reflecting to `1 - I_{1-x}(b, a)` above `x = 1/2`. Half-integer `a`, `b` only.
pub fn inc_beta_series(a: f64, b: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    if x > 0.5 {
        return 1.0 - inc_beta_series(b, a, 1.0 - x);
    }
    let ln_b = ln_gamma_half_integer(a) + ln_gamma_half_integer(b) - ln_gamma_half_integer(a + b);
    let prefix = (a * x.ln() + b * (1.0 - x).ln() - ln_b).exp() / a;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut term = 1.0f64;
    let mut k = 0.0;
    loop {
        let yk = term - comp;
        let t = sum + yk;
        comp = (t - sum) - yk;
        sum = t;
        term *= (a + b + k) / (a + 1.0 + k) * x;
        k += 1.0;
        if term < 1e-20 * sum && k > 5.0 {
            break;
        }
        assert!(k < 100_000.0, "series did not converge");
    }
    prefix * sum
}
