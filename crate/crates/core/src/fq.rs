//! Small finite fields `F_{p^m}` with canonically encoded elements.
//!
//! An element is a polynomial residue mod a monic irreducible modulus; its
//! code is the base-`p` packing of the coefficient vector (constant digit
//! first). The default modulus for each `(p, m)` is the least monic
//! irreducible polynomial in code order, so all derived data is
//! deterministic.

use crate::error::CoreError;
use crate::mat::Mat;
use crate::ring::Ring;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fq {
    p: u64,
    deg: u32,
    /// Monic modulus, ascending coefficients, length `deg + 1`, last = 1.
    modulus: Vec<u64>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Fq {
    /// Field with an explicit modulus polynomial (ascending coefficients,
    /// monic, degree `m`). Irreducibility is checked exhaustively.
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Self, CoreError> {
        if !is_prime(p) {
            return Err(CoreError::NotPrime(p));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(CoreError::NotIrreducible(format!(
                "{modulus:?} is not monic"
            )));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(CoreError::NotIrreducible(format!(
                "{modulus:?} has coefficients outside F_{p}"
            )));
        }
        let deg = (modulus.len() - 1) as u32;
        if p.checked_pow(deg).is_none_or(|q| q > 1 << 20) {
            return Err(CoreError::Config(format!("field F_{p}^{deg} is too large")));
        }
        if !poly_irreducible(p, &modulus) {
            return Err(CoreError::NotIrreducible(format!("{modulus:?} over F_{p}")));
        }
        Ok(Fq { p, deg, modulus })
    }

    /// The prime field `F_p` (modulus `x`).
    pub fn prime(p: u64) -> Result<Self, CoreError> {
        Fq::new(p, vec![0, 1])
    }

    /// Field with the default (least-in-code-order) irreducible modulus.
    pub fn with_default_modulus(p: u64, deg: u32) -> Result<Self, CoreError> {
        if !is_prime(p) {
            return Err(CoreError::NotPrime(p));
        }
        if deg == 0 {
            return Err(CoreError::Config("extension degree must be >= 1".into()));
        }
        let modulus = default_modulus(p, deg).ok_or_else(|| {
            CoreError::Config(format!("no irreducible modulus found for F_{p}^{deg}"))
        })?;
        Fq::new(p, modulus)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn deg(&self) -> u32 {
        self.deg
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn decode(&self, code: u64) -> Vec<u64> {
        let mut c = code;
        let mut out = vec![0u64; self.deg as usize];
        for digit in out.iter_mut() {
            *digit = c % self.p;
            c /= self.p;
        }
        debug_assert_eq!(c, 0);
        out
    }

    pub fn encode_coeffs(&self, coeffs: &[u64]) -> u64 {
        debug_assert!(coeffs.len() <= self.deg as usize);
        let mut code = 0u64;
        for &c in coeffs.iter().rev() {
            debug_assert!(c < self.p);
            code = code * self.p + c;
        }
        code
    }

    /// The generator element `x` (only meaningful for `deg >= 2`).
    pub fn gen_element(&self) -> u64 {
        if self.deg == 1 {
            // x reduces to the constant -c_0 mod (x + c_0).
            (self.p - self.modulus[0]) % self.p
        } else {
            self.p
        }
    }

    pub fn pow(&self, a: u64, mut e: u128) -> u64 {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: u64) -> u64 {
        self.pow(a, self.p as u128)
    }

    /// Evaluates a polynomial (ascending coefficients in this field) at `a`.
    pub fn eval_poly(&self, coeffs: &[u64], a: u64) -> u64 {
        let mut acc = self.zero();
        for &c in coeffs.iter().rev() {
            acc = self.add(self.mul(acc, a), c);
        }
        acc
    }
}

impl Ring for Fq {
    fn one(&self) -> u64 {
        1
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        // Digit-wise addition mod p.
        let (mut a, mut b) = (a, b);
        let mut code = 0u64;
        let mut mult = 1u64;
        for _ in 0..self.deg {
            code += ((a % self.p + b % self.p) % self.p) * mult;
            a /= self.p;
            b /= self.p;
            mult *= self.p;
        }
        code
    }

    fn neg(&self, a: u64) -> u64 {
        let mut a = a;
        let mut code = 0u64;
        let mut mult = 1u64;
        for _ in 0..self.deg {
            let d = a % self.p;
            code += (if d == 0 { 0 } else { self.p - d }) * mult;
            a /= self.p;
            mult *= self.p;
        }
        code
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.deg == 1 {
            return (a * b) % self.p;
        }
        let ca = self.decode(a);
        let cb = self.decode(b);
        let d = self.deg as usize;
        // Schoolbook product then reduction by the monic modulus.
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for k in (d..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            // x^k = x^(k-d) * (x^d) = -x^(k-d) * (lower part of modulus)
            for (j, &mj) in self.modulus.iter().take(d).enumerate() {
                let sub = (c * mj) % self.p;
                prod[k - d + j] = (prod[k - d + j] + self.p - sub) % self.p;
            }
        }
        self.encode_coeffs(&prod[..d])
    }

    fn is_unit(&self, a: u64) -> bool {
        a != 0
    }

    fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        Some(self.pow(a, (self.card() - 2) as u128))
    }

    fn card(&self) -> u64 {
        self.p.pow(self.deg)
    }

    fn encode(&self, raw: i64) -> u64 {
        let m = self.p as i64;
        (((raw % m) + m) % m) as u64
    }

    fn name(&self) -> String {
        if self.deg == 1 {
            format!("F_{}", self.p)
        } else {
            format!("F_{}^{}", self.p, self.deg)
        }
    }
}

/// Least monic irreducible polynomial of the given degree, in code order.
fn default_modulus(p: u64, deg: u32) -> Option<Vec<u64>> {
    if deg == 1 {
        return Some(vec![0, 1]); // x itself
    }
    let d = deg as usize;
    let count = p.pow(deg);
    for code in 0..count {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut c = code;
        for _ in 0..d {
            coeffs.push(c % p);
            c /= p;
        }
        coeffs.push(1);
        if poly_irreducible(p, &coeffs) {
            return Some(coeffs);
        }
    }
    None
}

/// Exhaustive irreducibility check over `F_p`: trial division by every monic
/// polynomial of degree up to `deg/2`.
fn poly_irreducible(p: u64, f: &[u64]) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                g.push(c % p);
                c /= p;
            }
            g.push(1);
            if poly_divides(p, &g, f) {
                return false;
            }
        }
    }
    true
}

fn poly_divides(p: u64, g: &[u64], f: &[u64]) -> bool {
    // Remainder of monic division f mod g, over F_p.
    let mut r: Vec<u64> = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let shift = r.len() - 1 - dg;
            for (j, &gj) in g.iter().enumerate() {
                let sub = (lead * gj) % p;
                r[shift + j] = (r[shift + j] + p - sub) % p;
            }
        }
        r.pop();
    }
    r.iter().all(|&x| x == 0)
}

/// Canonical embedding of `F_{p^m}` into `F_{p^(m*d)}`; the image of the
/// source generator is the least root of the source modulus in the target.
#[derive(Debug, Clone)]
pub struct FieldEmbedding {
    src: Fq,
    dst: Fq,
    root: u64,
}

impl FieldEmbedding {
    pub fn canonical(src: &Fq, d: u32) -> Result<Self, CoreError> {
        if d == 0 {
            return Err(CoreError::Config("extension degree must be >= 1".into()));
        }
        if d == 1 {
            let root = src.gen_element();
            return Ok(FieldEmbedding {
                src: src.clone(),
                dst: src.clone(),
                root,
            });
        }
        let dst = Fq::with_default_modulus(src.p(), src.deg() * d)?;
        FieldEmbedding::into_field(src, &dst)
    }

    /// Embedding into an explicitly supplied target field.
    pub fn into_field(src: &Fq, dst: &Fq) -> Result<Self, CoreError> {
        if src.p() != dst.p() || !dst.deg().is_multiple_of(src.deg()) {
            return Err(CoreError::MissingEmbedding {
                from: src.name(),
                to: dst.name(),
            });
        }
        let root = (0..dst.card())
            .find(|&r| {
                dst.eval_poly(
                    &src.modulus()
                        .iter()
                        .map(|&c| c % dst.p())
                        .collect::<Vec<_>>(),
                    r,
                ) == 0
            })
            .ok_or_else(|| CoreError::MissingEmbedding {
                from: src.name(),
                to: dst.name(),
            })?;
        Ok(FieldEmbedding {
            src: src.clone(),
            dst: dst.clone(),
            root,
        })
    }

    pub fn src(&self) -> &Fq {
        &self.src
    }

    pub fn dst(&self) -> &Fq {
        &self.dst
    }

    pub fn map(&self, a: u64) -> u64 {
        if self.src == self.dst {
            return a;
        }
        let coeffs = self.src.decode(a);
        self.dst.eval_poly(&coeffs, self.root)
    }

    pub fn map_mat(&self, m: &Mat<Fq>) -> Mat<Fq> {
        m.map_ring(self.dst.clone(), |x| self.map(x))
    }
}

/// Re-interprets matrices over `F_q` as matrices over `F_{q^d}` via the
/// canonical embedding; algebra structure constants are preserved because
/// the embedding is a ring homomorphism.
pub fn scalar_extend(mats: &[Mat<Fq>], d: u32) -> Result<Vec<Mat<Fq>>, CoreError> {
    if mats.is_empty() {
        return Ok(Vec::new());
    }
    if d > 4 {
        return Err(CoreError::Config(format!(
            "extension degree {d} exceeds the supported 4"
        )));
    }
    let src = mats[0].ring().clone();
    for m in mats {
        m.checked_same_ring(&mats[0])?;
    }
    let emb = FieldEmbedding::canonical(&src, d)?;
    Ok(mats.iter().map(|m| emb.map_mat(m)).collect())
}

// ---------------------------------------------------------------------------
// Row reduction over F_q
// ---------------------------------------------------------------------------

/// Reduced row echelon form with zero rows dropped; canonical for the span.
pub fn rref(m: &Mat<Fq>) -> Mat<Fq> {
    let ring = m.ring().clone();
    let mut rows: Vec<Vec<u64>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let cols = m.cols();
    let mut pivot_row = 0usize;
    let mut pivot_cols: Vec<usize> = Vec::new();
    for col in 0..cols {
        let Some(sel) = (pivot_row..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(pivot_row, sel);
        let inv = ring.inv(rows[pivot_row][col]).unwrap();
        for x in rows[pivot_row].iter_mut() {
            *x = ring.mul(*x, inv);
        }
        let prow = rows[pivot_row].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != pivot_row && row[col] != 0 {
                let f = row[col];
                for (x, &y) in row.iter_mut().zip(&prow) {
                    *x = ring.sub(*x, ring.mul(f, y));
                }
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    Mat::from_rows(ring, cols, &rows)
}

pub fn rank(m: &Mat<Fq>) -> usize {
    rref(m).rows()
}

/// Residue of `v` after reduction against an rref basis; zero iff `v` is in
/// the row span.
pub fn reduce_vector(h: &Mat<Fq>, v: &[u64]) -> Vec<u64> {
    let ring = h.ring();
    let mut v = v.to_vec();
    for i in 0..h.rows() {
        let row = h.row(i);
        let c = row
            .iter()
            .position(|&x| x != 0)
            .expect("no zero rows in rref");
        if v[c] != 0 {
            let f = v[c];
            for (x, &y) in v.iter_mut().zip(row) {
                *x = ring.sub(*x, ring.mul(f, y));
            }
        }
    }
    v
}

pub fn span_contains(h: &Mat<Fq>, v: &[u64]) -> bool {
    reduce_vector(h, v).iter().all(|&x| x == 0)
}

/// Basis (as rows) of the right kernel `{ x : m * x = 0 }`, canonical.
pub fn right_kernel(m: &Mat<Fq>) -> Mat<Fq> {
    let ring = m.ring().clone();
    let h = rref(m);
    let cols = m.cols();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    for i in 0..h.rows() {
        let c = h.row(i).iter().position(|&x| x != 0).unwrap();
        pivot_of_col[c] = Some(i);
    }
    let mut basis: Vec<Vec<u64>> = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![0u64; cols];
        v[free] = ring.one();
        for (c, p) in pivot_of_col.iter().enumerate() {
            if let Some(i) = p {
                v[c] = ring.neg(h.get(*i, free));
            }
        }
        basis.push(v);
    }
    Mat::from_rows(ring, cols, &basis)
}
