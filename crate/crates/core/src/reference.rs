//! Published symplectic tableaux and coefficient values used as golden data.
//!
//! The three-stage Chebyshev III/IV methods are given in closed form through
//! `cos(kπ/7)`; the five-stage methods only to 14 printed digits.

use std::f64::consts::PI;

use crate::tableau::{ButcherTableau, Provenance};

fn tagged(c: Vec<f64>, b: Vec<f64>, a: Vec<Vec<f64>>, order: usize, source: &str) -> ButcherTableau {
    let mut t = ButcherTableau::new(c, b, a, order).expect("reference tableaux are well formed");
    t.provenance = Provenance { source: Some(source.to_string()), ..Provenance::default() };
    t
}

/// One-parameter family of 3-stage order-4 methods from Chebyshev
/// polynomials of the first kind.
pub fn chebyshev1_family(gamma: f64) -> ButcherTableau {
    let r3 = 3f64.sqrt();
    let c = vec![(2.0 - r3) / 4.0, 0.5, (2.0 + r3) / 4.0];
    let b = vec![2.0 / 9.0, 5.0 / 9.0, 2.0 / 9.0];
    let a = vec![
        vec![1.0 / 9.0, (10.0 - 5.0 * r3) / 36.0 + 5.0 * gamma, (1.0 - r3) / 9.0 - 5.0 * gamma],
        vec![(2.0 + r3) / 18.0 - 2.0 * gamma, 5.0 / 18.0, (2.0 - r3) / 18.0 + 2.0 * gamma],
        vec![(1.0 + r3) / 9.0 + 5.0 * gamma, (10.0 + 5.0 * r3) / 36.0 - 5.0 * gamma, 1.0 / 9.0],
    ];
    tagged(c, b, a, 4, &format!("chebyshev1-family(gamma={gamma})"))
}

/// One-parameter family of 3-stage order-4 methods from Chebyshev
/// polynomials of the second kind.
pub fn chebyshev2_family(gamma: f64) -> ButcherTableau {
    let r2 = 2f64.sqrt();
    let c = vec![(2.0 - r2) / 4.0, 0.5, (2.0 + r2) / 4.0];
    let b = vec![1.0 / 3.0; 3];
    let a = vec![
        vec![1.0 / 6.0, (2.0 - r2) / 12.0 + gamma, (1.0 - r2) / 6.0 - gamma],
        vec![(2.0 + r2) / 12.0 - gamma, 1.0 / 6.0, (2.0 - r2) / 12.0 + gamma],
        vec![(1.0 + r2) / 6.0 + gamma, (2.0 + r2) / 12.0 - gamma, 1.0 / 6.0],
    ];
    tagged(c, b, a, 4, &format!("chebyshev2-family(gamma={gamma})"))
}

fn cos7() -> (f64, f64, f64) {
    ((PI / 7.0).cos(), (2.0 * PI / 7.0).cos(), (3.0 * PI / 7.0).cos())
}

fn shared_weights() -> Vec<f64> {
    let (c1, c2, c3) = cos7();
    vec![(-4.0 * c2 + 2.0 * c3 + 6.0) / 21.0, (4.0 * c1 - 2.0 * c2 + 6.0) / 21.0, (4.0 * c3 + 2.0 * c1 + 6.0) / 21.0]
}

/// 3-stage order-3 Chebyshev III method (`μ = 0`), nodes in descending order.
pub fn chebyshev3_order3() -> ButcherTableau {
    let (c1, c2, c3) = cos7();
    let c = [1.0, 3.0, 5.0].iter().map(|k| (k * PI / 14.0).cos().powi(2)).collect();
    let a = vec![
        vec![
            (-2.0 * c2 + c3 + 3.0) / 21.0,
            (-5.0 * c3 + 10.0 * c1 - 3.0 * c2 + 8.0) / 42.0,
            (7.0 * c2 + 3.0 * c3 + 11.0 * c1 + 7.0) / 42.0,
        ],
        vec![
            (-7.0 * c1 - 3.0 * c2 + 11.0 * c3 + 7.0) / 42.0,
            (2.0 * c1 - c2 + 3.0) / 21.0,
            (5.0 * c2 + 10.0 * c3 + 3.0 * c1 + 8.0) / 42.0,
        ],
        vec![
            (-5.0 * c1 - 10.0 * c2 + 3.0 * c3 + 8.0) / 42.0,
            (-7.0 * c3 + 3.0 * c1 - 11.0 * c2 + 7.0) / 42.0,
            (2.0 * c3 + c1 + 3.0) / 21.0,
        ],
    ];
    tagged(c, shared_weights(), a, 3, "chebyshev3-order3")
}

/// 3-stage order-3 Chebyshev IV method (`μ = 0`), nodes in ascending order.
pub fn chebyshev4_order3() -> ButcherTableau {
    let (c1, c2, c3) = cos7();
    let c = [1.0, 3.0, 5.0].iter().map(|k| (k * PI / 14.0).sin().powi(2)).collect();
    let a = vec![
        vec![
            (c3 - 2.0 * c2 + 3.0) / 21.0,
            (5.0 * c3 - 2.0 * c1 - c2 + 4.0) / 42.0,
            (-7.0 * c2 + 5.0 * c3 - 7.0 * c1 + 5.0) / 42.0,
        ],
        vec![
            (7.0 * c1 - 5.0 * c2 - 7.0 * c3 + 5.0) / 42.0,
            (-c2 + 2.0 * c1 + 3.0) / 21.0,
            (-5.0 * c2 - 2.0 * c3 + c1 + 4.0) / 42.0,
        ],
        vec![
            (5.0 * c1 + 2.0 * c2 + c3 + 4.0) / 42.0,
            (7.0 * c3 + 5.0 * c1 + 7.0 * c2 + 5.0) / 42.0,
            (c1 + 2.0 * c3 + 3.0) / 21.0,
        ],
    ];
    tagged(c, shared_weights(), a, 3, "chebyshev4-order3")
}

const ORDER5_B: [f64; 5] = [0.07495247467278, 0.20722290049644, 0.30153945299780, 0.23405425960613, 0.18223091222685];

/// 5-stage order-5 Chebyshev III method as printed (descending nodes).
pub fn chebyshev3_order5() -> ButcherTableau {
    let c = vec![0.97974648680725, 0.82743036697264, 0.57115741913664, 0.29229249349906, 0.07937323358441];
    let a = vec![
        vec![0.03747623733639, 0.18070507027578, 0.36081394100538, 0.26217935275342, 0.13857188543628],
        vec![0.00959149299247, 0.10361145024822, 0.27748715725495, 0.25379422455134, 0.18294604192566],
        vec![-0.01473362612077, 0.01652913553394, 0.15076972649890, 0.20914334136652, 0.20944884185805],
        vec![-0.00900665228370, -0.01747702775642, 0.03209351828198, 0.11702712980307, 0.16965552545413],
        vec![0.01795717345521, -0.00081320588592, -0.04503780128426, 0.01615161118596, 0.09111545611343],
    ];
    tagged(c, ORDER5_B.to_vec(), a, 5, "chebyshev3-order5")
}

/// 5-stage order-5 Chebyshev IV method as printed (ascending nodes).
pub fn chebyshev4_order5() -> ButcherTableau {
    let c = vec![0.02025351319275, 0.17256963302736, 0.42884258086336, 0.70770750650094, 0.92062676641559];
    let a = vec![
        vec![0.03747623733639, 0.02651783022066, -0.05927448800758, -0.02812509314729, 0.04365902679057],
        vec![0.06536098168031, 0.10361145024822, 0.02405229574285, -0.01973996494521, -0.00071512969881],
        vec![0.08968610079355, 0.19069376496250, 0.15076972649890, 0.02491091823961, -0.02721792963119],
        vec![0.08395912695648, 0.22469992825286, 0.26944593471582, 0.11702712980307, 0.01257538677272],
        vec![0.05699530121757, 0.20803610638236, 0.34657725428206, 0.21790264842018, 0.09111545611343],
    ];
    tagged(c, ORDER5_B.to_vec(), a, 5, "chebyshev4-order5")
}

/// Known values of the skew-symmetric coefficients `α_(i,j)`, `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaReference {
    pub name: String,
    pub alpha: f64,
    pub beta: f64,
    pub xi: usize,
    pub eta: usize,
    pub rho: usize,
    /// Values for the free unknowns, when the solution is not unique.
    pub free: Vec<f64>,
    pub values: Vec<((usize, usize), f64)>,
}

/// Chebyshev III (`α = -1/2, β = 1/2`) and IV (`α = 1/2, β = -1/2`) cases at
/// `(ξ, η, ρ) = (2, 1, 1), (3, 1, 2), (5, 2, 2)`. The one-parameter family
/// at `(3, 1, 2)` is pinned at `α_(1,2) = 0`.
pub fn alpha_references() -> Vec<AlphaReference> {
    let mut out = Vec::new();
    for (kind, alpha, beta, sign) in [("chebyshev3", -0.5, 0.5, 1.0), ("chebyshev4", 0.5, -0.5, -1.0)] {
        let base =
            AlphaReference { name: String::new(), alpha, beta, xi: 0, eta: 0, rho: 0, free: vec![], values: vec![] };
        out.push(AlphaReference {
            name: format!("{kind}-2-1-1"),
            xi: 2,
            eta: 1,
            rho: 1,
            values: vec![((0, 1), -PI / 8.0)],
            ..base.clone()
        });
        out.push(AlphaReference {
            name: format!("{kind}-3-1-2"),
            xi: 3,
            eta: 1,
            rho: 2,
            free: vec![0.0],
            values: vec![((0, 1), -PI / 8.0), ((0, 2), 0.0), ((1, 2), 0.0)],
            ..base.clone()
        });
        out.push(AlphaReference {
            name: format!("{kind}-5-2-2"),
            xi: 5,
            eta: 2,
            rho: 2,
            values: vec![((0, 1), -9.0 * PI / 64.0), ((0, 2), -sign * 3.0 * PI / 64.0), ((1, 2), -3.0 * PI / 64.0)],
            ..base
        });
    }
    out
}

/// One-parameter relations at `(ξ, η, ρ) = (3, 1, 2)` with `μ = α_(1,2)`:
/// returns `(α_(0,1), α_(0,2))`.
pub fn family_relation(chebyshev_kind: u8, mu: f64) -> (f64, f64) {
    let a01 = mu / 3.0 - PI / 8.0;
    match chebyshev_kind {
        3 => (a01, mu),
        _ => (a01, -mu),
    }
}
