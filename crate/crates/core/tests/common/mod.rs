//! Independent reference computations shared by the integration tests.
#![allow(dead_code, clippy::excessive_precision)]

use std::f64::consts::PI;

// Kronrod 15-point nodes on [-1, 1] (non-negative half) with Kronrod and
// embedded 7-point Gauss weights.
const XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod estimate, Gauss estimate and `∫|f|` on `[a, b]`.
fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(mid);
    let (mut k, mut g, mut abs) = (WK[7] * fc, WG[3] * fc, WK[7] * fc.abs());
    for i in 0..7 {
        let (f1, f2) = (f(mid - half * XK[i]), f(mid + half * XK[i]));
        k += WK[i] * (f1 + f2);
        abs += WK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    (k * half, g * half, abs * half)
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, g, abs) = kronrod(f, a, b);
    if depth == 0 || (k - g).abs() <= tol.max(50.0 * f64::EPSILON * abs) {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, tol / 2.0, depth - 1) + adapt(f, m, b, tol / 2.0, depth - 1)
}

/// Adaptive Gauss-Kronrod (7/15) quadrature with absolute tolerance `tol`,
/// floored at the round-off level of `∫|f|`.
pub fn adaptive_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let panels = 8;
    let h = (b - a) / panels as f64;
    (0..panels).map(|k| adapt(&f, a + k as f64 * h, a + (k + 1) as f64 * h, tol / panels as f64, 30)).sum()
}

/// `∫_0^1 f(x) 2^{α+β} (1-x)^α x^β dx` for `α, β ∈ {-1/2, 0, 1/2, 1, 3/2, ...}`.
///
/// Substituting `x = sin²θ` turns the weight into
/// `2 sin^{2β+1}θ cos^{2α+1}θ`, which is smooth for these exponents.
pub fn weighted_integral<F: Fn(f64) -> f64>(alpha: f64, beta: f64, f: F) -> f64 {
    let scale = 2f64.powf(alpha + beta);
    let g = |theta: f64| {
        let (s, c) = theta.sin_cos();
        f(s * s) * 2.0 * s.powf(2.0 * beta + 1.0) * c.powf(2.0 * alpha + 1.0)
    };
    scale * adaptive_integral(g, 0.0, PI / 2.0, 1e-15)
}

/// `Γ(x)` for positive integers and half-integers, from
/// `Γ(1) = 1`, `Γ(1/2) = √π` and `Γ(x+1) = xΓ(x)`.
pub fn gamma_half(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    assert!(twice >= 1.0 && (2.0 * x - twice).abs() < 1e-12, "not a positive half-integer: {x}");
    let (mut g, mut y) = if twice as i64 % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while y < x - 0.25 {
        g *= y;
        y += 1.0;
    }
    g
}

/// `∫_0^1 x^k 2^{α+β}(1-x)^α x^β dx = 2^{α+β} B(k+β+1, α+1)` for half-integer `α, β`.
pub fn weighted_moment(alpha: f64, beta: f64, k: usize) -> f64 {
    let (p, q) = (k as f64 + beta + 1.0, alpha + 1.0);
    2f64.powf(alpha + beta) * gamma_half(p) * gamma_half(q) / gamma_half(p + q)
}

/// Rooted tree as its sorted list of subtrees.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Tree(pub Vec<Tree>);

impl Tree {
    pub fn order(&self) -> usize {
        1 + self.0.iter().map(Tree::order).sum::<usize>()
    }

    /// Density `γ(t) = |t| Π γ(children)`.
    pub fn density(&self) -> f64 {
        self.order() as f64 * self.0.iter().map(Tree::density).product::<f64>()
    }

    /// Stage vector `Φ_i(t) = Π_children (A Φ(child))_i`.
    pub fn stage_weights(&self, a: &[Vec<f64>]) -> Vec<f64> {
        let s = a.len();
        let mut out = vec![1.0; s];
        for child in &self.0 {
            let inner = child.stage_weights(a);
            for i in 0..s {
                out[i] *= (0..s).map(|j| a[i][j] * inner[j]).sum::<f64>();
            }
        }
        out
    }

    pub fn residual(&self, b: &[f64], a: &[Vec<f64>]) -> f64 {
        let phi = self.stage_weights(a);
        let value: f64 = b.iter().zip(&phi).map(|(x, y)| x * y).sum();
        (value - 1.0 / self.density()).abs()
    }
}

/// All rooted trees with exactly `n` vertices, each listed once.
pub fn trees_of_order(n: usize) -> Vec<Tree> {
    fn forests(total: usize, max: Option<&Tree>, cache: &dyn Fn(usize) -> Vec<Tree>) -> Vec<Vec<Tree>> {
        if total == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first_order in 1..=total {
            for t in cache(first_order) {
                if max.is_some_and(|m| &t > m) {
                    continue;
                }
                for mut rest in forests(total - first_order, Some(&t), cache) {
                    rest.insert(0, t.clone());
                    out.push(rest);
                }
            }
        }
        out
    }
    fn build(n: usize) -> Vec<Tree> {
        if n == 0 {
            return vec![];
        }
        let mut trees: Vec<Tree> = forests(n - 1, None, &build)
            .into_iter()
            .map(|mut children| {
                children.sort();
                Tree(children)
            })
            .collect();
        trees.sort();
        trees.dedup();
        trees
    }
    build(n)
}
