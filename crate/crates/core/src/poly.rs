//! Univariate polynomial arithmetic over [`Fq`], plus the factor-extraction
//! routine the module chopper needs: given a polynomial with a root structure
//! coming from a matrix, produce one irreducible factor (squarefree part,
//! then distinct-degree splitting, then seeded equal-degree splitting).
//!
//! Polynomials are coefficient vectors in ascending order with no trailing
//! zeros; the zero polynomial is the empty vector.

use crate::fq::Fq;
use crate::mat::Mat;
use crate::ring::Ring;
use crate::rng::SplitMix64;

pub type Poly = Vec<u64>;

pub fn trim(mut f: Poly) -> Poly {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

pub fn deg(f: &[u64]) -> Option<usize> {
    if f.is_empty() {
        None
    } else {
        Some(f.len() - 1)
    }
}

pub fn add(field: &Fq, f: &[u64], g: &[u64]) -> Poly {
    let n = f.len().max(g.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let a = f.get(i).copied().unwrap_or(0);
        let b = g.get(i).copied().unwrap_or(0);
        *o = field.add(a, b);
    }
    trim(out)
}

pub fn sub(field: &Fq, f: &[u64], g: &[u64]) -> Poly {
    let n = f.len().max(g.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let a = f.get(i).copied().unwrap_or(0);
        let b = g.get(i).copied().unwrap_or(0);
        *o = field.sub(a, b);
    }
    trim(out)
}

pub fn mul(field: &Fq, f: &[u64], g: &[u64]) -> Poly {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(a, b));
        }
    }
    trim(out)
}

pub fn scale(field: &Fq, f: &[u64], c: u64) -> Poly {
    trim(f.iter().map(|&a| field.mul(a, c)).collect())
}

/// Quotient and remainder of `f / g`; `g` must be nonzero.
pub fn divrem(field: &Fq, f: &[u64], g: &[u64]) -> (Poly, Poly) {
    let dg = deg(g).expect("division by zero polynomial");
    let lead_inv = field.inv(g[dg]).unwrap();
    let mut r = f.to_vec();
    let mut q = vec![0u64; f.len().saturating_sub(dg)];
    while let Some(dr) = deg(&r) {
        if dr < dg {
            break;
        }
        let c = field.mul(r[dr], lead_inv);
        let shift = dr - dg;
        q[shift] = c;
        for (j, &gj) in g.iter().enumerate() {
            r[shift + j] = field.sub(r[shift + j], field.mul(c, gj));
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(field: &Fq, f: &[u64], g: &[u64]) -> Poly {
    divrem(field, f, g).1
}

pub fn monic(field: &Fq, f: &[u64]) -> Poly {
    match deg(f) {
        None => Vec::new(),
        Some(d) => {
            let inv = field.inv(f[d]).unwrap();
            scale(field, f, inv)
        }
    }
}

pub fn gcd(field: &Fq, f: &[u64], g: &[u64]) -> Poly {
    let (mut a, mut b) = (f.to_vec(), g.to_vec());
    while !b.is_empty() {
        let r = rem(field, &a, &b);
        a = b;
        b = r;
    }
    monic(field, &a)
}

/// Formal derivative.
pub fn derivative(field: &Fq, f: &[u64]) -> Poly {
    if f.len() <= 1 {
        return Vec::new();
    }
    let mut out = vec![0u64; f.len() - 1];
    for (i, o) in out.iter_mut().enumerate() {
        let k = field.encode((i + 1) as i64);
        *o = field.mul(k, f[i + 1]);
    }
    trim(out)
}

/// `base^e mod m`.
pub fn powmod(field: &Fq, base: &[u64], mut e: u128, m: &[u64]) -> Poly {
    let mut b = rem(field, base, m);
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(field, &mul(field, &acc, &b), m);
        }
        b = rem(field, &mul(field, &b, &b), m);
        e >>= 1;
    }
    acc
}

/// Minimal polynomial of `a` relative to the vector `v`: the monic generator
/// of the dependencies among `v, a v, a^2 v, ...`. Always divides the minimal
/// polynomial of `a`.
pub fn min_poly_rel(a: &Mat<Fq>, v: &[u64]) -> Poly {
    let field = a.ring().clone();
    let dim = a.rows();
    assert!(a.is_square());
    // Incremental echelon basis of the Krylov vectors, with the expression of
    // each reduced vector in terms of the power index.
    let mut echelon: Vec<(usize, Vec<u64>, Vec<u64>)> = Vec::new(); // (pivot, vector, coeffs)
    let mut cur = v.to_vec();
    for k in 0..=dim {
        let mut vec_red = cur.clone();
        let mut coeffs = vec![0u64; k + 1];
        coeffs[k] = 1;
        for (pivot, bvec, bc) in &echelon {
            let f = vec_red[*pivot];
            if f != 0 {
                for (x, &y) in vec_red.iter_mut().zip(bvec) {
                    *x = field.sub(*x, field.mul(f, y));
                }
                for (i, &c) in bc.iter().enumerate() {
                    coeffs[i] = field.sub(coeffs[i], field.mul(f, c));
                }
            }
        }
        match vec_red.iter().position(|&x| x != 0) {
            None => return monic(&field, &trim(coeffs)),
            Some(pivot) => {
                let inv = field.inv(vec_red[pivot]).unwrap();
                for x in vec_red.iter_mut() {
                    *x = field.mul(*x, inv);
                }
                let coeffs = coeffs.iter().map(|&c| field.mul(c, inv)).collect();
                echelon.push((pivot, vec_red, coeffs));
            }
        }
        cur = a.apply(&cur);
    }
    unreachable!("a Krylov dependency must appear within dim+1 steps");
}

/// Evaluates `f` at a square matrix.
pub fn eval_at_matrix(field: &Fq, f: &[u64], a: &Mat<Fq>) -> Mat<Fq> {
    let n = a.rows();
    let mut acc = Mat::zero(field.clone(), n, n);
    for &c in f.iter().rev() {
        acc = acc.mul(a);
        if c != 0 {
            for i in 0..n {
                let cur = acc.get(i, i);
                acc.set(i, i, field.add(cur, c));
            }
        }
    }
    acc
}

/// One monic irreducible factor of `f` (any nonconstant `f`), found by
/// squarefree reduction, distinct-degree splitting, and seeded equal-degree
/// splitting. Deterministic for a given seed state.
pub fn irreducible_factor(field: &Fq, f: &[u64], rng: &mut SplitMix64) -> Poly {
    let f = monic(field, f);
    let d = deg(&f).expect("nonzero polynomial required");
    assert!(d >= 1);
    if d == 1 {
        return f;
    }

    // Squarefree part: f / gcd(f, f'). A vanishing derivative means f is a
    // p-th power composed with Frobenius twists; root extraction is not
    // needed here because gcd(f, f') then strictly divides f and we recurse.
    let df = derivative(field, &f);
    if df.is_empty() {
        // f = g(x^p) with g recoverable coefficient-wise.
        let p = field.p() as usize;
        let mut g = Vec::with_capacity(d / p + 1);
        for i in (0..f.len()).step_by(p) {
            // Coefficients live in F_q; taking p-th roots is the inverse
            // Frobenius, a bijection.
            g.push(frobenius_inv(field, f[i]));
        }
        return irreducible_factor(field, &trim(g), rng);
    }
    let g = gcd(field, &f, &df);
    if deg(&g).unwrap_or(0) >= 1 {
        return irreducible_factor(field, &g, rng);
    }

    // f squarefree. Distinct-degree: find the least e with a degree-e factor.
    let q = field.card() as u128;
    let x = vec![0u64, 1u64];
    let mut h = x.clone(); // x^(q^e) mod f, computed incrementally
    let rest = f.clone();
    for e in 1..=deg(&rest).unwrap() {
        if deg(&rest).unwrap() < 2 * e {
            // rest itself is irreducible
            return rest;
        }
        h = powmod(field, &h, q, &rest);
        let diff = sub(field, &h, &x);
        let ge = gcd(field, &diff, &rest);
        let dge = deg(&ge).unwrap_or(0);
        if dge == 0 {
            continue;
        }
        if dge == e {
            return ge;
        }
        // ge is a product of >= 2 irreducible factors of degree e.
        return equal_degree_split(field, &ge, e, rng);
    }
    rest
}

fn frobenius_inv(field: &Fq, a: u64) -> u64 {
    // a^(p^(deg-1)) inverts x -> x^p on F_{p^deg}.
    let e = (field.p() as u128).pow(field.deg() - 1);
    field.pow(a, e)
}

/// Cantor–Zassenhaus: splits a product of distinct irreducible factors of the
/// same degree `e` down to a single factor.
fn equal_degree_split(field: &Fq, f: &[u64], e: usize, rng: &mut SplitMix64) -> Poly {
    let d = deg(f).unwrap();
    if d == e {
        return monic(field, f);
    }
    let q = field.card();
    loop {
        // Random polynomial of degree < d.
        let r: Poly = trim((0..d).map(|_| rng.below(q)).collect());
        if deg(&r).unwrap_or(0) < 1 && r.is_empty() {
            continue;
        }
        let split = if field.p() == 2 {
            // Trace map over F_2: T(r) = r + r^2 + r^4 + ... (e * deg(field) terms).
            let terms = (e as u32) * field.deg();
            let mut t = Vec::new();
            let mut cur = rem(field, &r, f);
            for _ in 0..terms {
                t = add(field, &t, &cur);
                cur = rem(field, &mul(field, &cur, &cur), f);
            }
            gcd(field, &t, f)
        } else {
            let exp = ((q as u128).pow(e as u32) - 1) / 2;
            let s = powmod(field, &r, exp, f);
            let s1 = sub(field, &s, &[1]);
            gcd(field, &s1, f)
        };
        let ds = deg(&split).unwrap_or(0);
        if ds > 0 && ds < d {
            let keep = if ds <= d - ds {
                split
            } else {
                divrem(field, f, &split).0
            };
            return equal_degree_split(field, &keep, e, rng);
        }
    }
}
