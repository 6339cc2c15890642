//! Dense complex matrix helpers: scaling-and-squaring exponential with Padé
//! approximants (Higham 2005) and an LU solve for the Padé denominator.

use ndarray::{Array1, Array2, ArrayView1, Zip};
use num_complex::Complex64;

pub type CMatrix = Array2<Complex64>;
pub type CVector = Array1<Complex64>;

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [17_297_280.0, 8_648_640.0, 1_995_840.0, 277_200.0, 25_200.0, 1512.0, 56.0, 1.0];
const PADE_9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

pub fn one_norm(a: &CMatrix) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

fn identity(n: usize) -> CMatrix {
    Array2::from_diag_elem(n, Complex64::new(1.0, 0.0))
}

fn add_scaled(acc: &mut CMatrix, c: f64, m: &CMatrix) {
    acc.scaled_add(Complex64::new(c, 0.0), m);
}

fn add_identity(acc: &mut CMatrix, c: f64) {
    for i in 0..acc.nrows() {
        acc[[i, i]] += c;
    }
}

/// Matrix exponential `e^A`.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return CMatrix::zeros((0, 0));
    }
    let norm = one_norm(a);
    for &(m, theta) in &THETA {
        if norm <= theta {
            return pade_low(a, m);
        }
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.mapv(|z| z * 0.5f64.powi(s));
    let mut r = pade_13(&scaled);
    for _ in 0..s {
        r = r.dot(&r);
    }
    r
}

fn pade_low(a: &CMatrix, m: usize) -> CMatrix {
    let b: &[f64] = match m {
        3 => &PADE_3,
        5 => &PADE_5,
        7 => &PADE_7,
        _ => &PADE_9,
    };
    let n = a.nrows();
    let a2 = a.dot(a);
    // powers A^0, A^2, A^4, ...
    let mut evens = vec![identity(n), a2.clone()];
    while evens.len() < m.div_ceil(2) {
        let next = evens.last().unwrap().dot(&a2);
        evens.push(next);
    }
    let mut u_inner = CMatrix::zeros((n, n));
    let mut v = CMatrix::zeros((n, n));
    for (k, p) in evens.iter().enumerate() {
        add_scaled(&mut u_inner, b[2 * k + 1], p);
        add_scaled(&mut v, b[2 * k], p);
    }
    let u = a.dot(&u_inner);
    pade_ratio(u, v)
}

fn pade_13(a: &CMatrix) -> CMatrix {
    let b = &PADE_13;
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);

    let mut w1 = CMatrix::zeros(a.raw_dim());
    add_scaled(&mut w1, b[13], &a6);
    add_scaled(&mut w1, b[11], &a4);
    add_scaled(&mut w1, b[9], &a2);
    let mut w = a6.dot(&w1);
    add_scaled(&mut w, b[7], &a6);
    add_scaled(&mut w, b[5], &a4);
    add_scaled(&mut w, b[3], &a2);
    add_identity(&mut w, b[1]);
    let u = a.dot(&w);

    let mut z1 = CMatrix::zeros(a.raw_dim());
    add_scaled(&mut z1, b[12], &a6);
    add_scaled(&mut z1, b[10], &a4);
    add_scaled(&mut z1, b[8], &a2);
    let mut v = a6.dot(&z1);
    add_scaled(&mut v, b[6], &a6);
    add_scaled(&mut v, b[4], &a4);
    add_scaled(&mut v, b[2], &a2);
    add_identity(&mut v, b[0]);
    pade_ratio(u, v)
}

/// `(V − U)⁻¹ (V + U)`.
fn pade_ratio(u: CMatrix, v: CMatrix) -> CMatrix {
    let p = &v + &u;
    let q = &v - &u;
    lu_solve(q, p)
}

/// Solves `A X = B` by LU with partial pivoting; consumes both operands.
pub fn lu_solve(mut a: CMatrix, mut b: CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.nrows());
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[[i, k]].norm().total_cmp(&a[[j, k]].norm()))
            .unwrap();
        if pivot != k {
            for j in 0..n {
                a.swap([k, j], [pivot, j]);
            }
            for j in 0..b.ncols() {
                b.swap([k, j], [pivot, j]);
            }
        }
        let d = a[[k, k]];
        assert!(d.norm() > 0.0, "singular matrix in lu_solve");
        for i in k + 1..n {
            let f = a[[i, k]] / d;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            a[[i, k]] = f;
            for j in k + 1..n {
                let t = a[[k, j]];
                a[[i, j]] -= f * t;
            }
            for j in 0..b.ncols() {
                let t = b[[k, j]];
                b[[i, j]] -= f * t;
            }
        }
    }
    // back substitution, row by row
    for k in (0..n).rev() {
        let d = a[[k, k]];
        for j in 0..b.ncols() {
            let mut acc = b[[k, j]];
            for i in k + 1..n {
                acc -= a[[k, i]] * b[[i, j]];
            }
            b[[k, j]] = acc / d;
        }
    }
    b
}

pub fn inner(a: ArrayView1<Complex64>, b: ArrayView1<Complex64>) -> Complex64 {
    Zip::from(a).and(b).fold(Complex64::new(0.0, 0.0), |acc, x, y| acc + x.conj() * y)
}

pub fn norm_sqr(a: ArrayView1<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn taylor(a: &CMatrix, terms: usize) -> CMatrix {
        let n = a.nrows();
        let mut out = identity(n);
        let mut term = identity(n);
        for k in 1..terms {
            term = term.dot(a).mapv(|z| z / k as f64);
            out += &term;
        }
        out
    }

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn matches_taylor_for_every_pade_degree() {
        let base = CMatrix::from_shape_fn((5, 5), |(i, j)| c(((i * 3 + j) % 5) as f64 - 2.0, (i as f64 - j as f64) * 0.3));
        let base_norm = one_norm(&base);
        for &scale in &[1e-3, 0.04, 0.15, 0.4, 1.0, 3.0] {
            let a = base.mapv(|z| z * scale / base_norm * 4.0);
            let want = taylor(&a, 80);
            let got = expm(&a);
            assert!(max_diff(&got, &want) < 1e-11 * (1.0 + one_norm(&want)), "scale {scale}");
        }
    }

    #[test]
    fn pauli_rotation() {
        // exp(−iθσ_x) = cos θ I − i sin θ σ_x
        let theta = 7.3;
        let a = CMatrix::from_shape_vec((2, 2), vec![c(0.0, 0.0), c(0.0, -theta), c(0.0, -theta), c(0.0, 0.0)]).unwrap();
        let u = expm(&a);
        assert!((u[[0, 0]] - c(theta.cos(), 0.0)).norm() < 1e-13);
        assert!((u[[0, 1]] - c(0.0, -theta.sin())).norm() < 1e-13);
    }

    #[test]
    fn anti_hermitian_gives_unitary() {
        let n = 30;
        let h = CMatrix::from_shape_fn((n, n), |(i, j)| {
            let (lo, hi) = (i.min(j) as f64, i.max(j) as f64);
            let re = (lo + 2.0 * hi).sin();
            let im = if i == j { 0.0 } else { (lo * hi).cos() * (j as f64 - i as f64).signum() };
            c(re, im)
        });
        assert!(hermiticity_defect(&h) < 1e-15);
        let u = expm(&h.mapv(|z| z * c(0.0, -3.0)));
        let uu = u.t().mapv(|z| z.conj()).dot(&u);
        assert!(max_diff(&uu, &identity(n)) < 1e-11);
    }

    #[test]
    fn lu_solve_recovers_solution() {
        let a = CMatrix::from_shape_fn((6, 6), |(i, j)| c(1.0 / (1.0 + i as f64 + j as f64), if i == j { 2.0 } else { 0.1 }));
        let x = CMatrix::from_shape_fn((6, 2), |(i, j)| c(i as f64 - j as f64, 0.5));
        let b = a.dot(&x);
        let got = lu_solve(a, b);
        assert!(max_diff(&got, &x) < 1e-12);
    }
}
