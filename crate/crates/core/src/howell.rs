//! Howell canonical form for row-span modules over `Z/p^M`.
//!
//! The Howell form is the canonical echelon form for submodules of
//! `(Z/p^M)^n`: two generating sets span the same module if and only if their
//! Howell forms are bit-identical. This is what makes deduplication of
//! lattice classes exact everywhere else in the crate.
//!
//! Normalization conventions (fixed so output is canonical):
//! * pivots are `p^v` (unit parts scaled away), in strictly increasing columns;
//! * entries above a pivot are reduced modulo the pivot;
//! * zero rows are dropped.
//!
//! The Howell property proper — every span element supported on columns
//! `>= j` is generated by the rows with pivots in columns `>= j` — is
//! maintained by appending, for each pivot row with pivot `p^v`, its
//! annihilator multiple `p^(M-v) * row` to the unprocessed rows.

use crate::mat::Mat;
use crate::ring::{ModulusRing, Ring};

fn row_is_zero(r: &[u64]) -> bool {
    r.iter().all(|&x| x == 0)
}

fn row_scale(ring: &ModulusRing, r: &mut [u64], c: u64) {
    for x in r.iter_mut() {
        *x = ring.mul(*x, c);
    }
}

/// `r -= q * s`.
fn row_submul(ring: &ModulusRing, r: &mut [u64], q: u64, s: &[u64]) {
    if q == 0 {
        return;
    }
    for (x, &y) in r.iter_mut().zip(s) {
        *x = ring.sub(*x, ring.mul(q, y));
    }
}

/// Computes the Howell form of the row span of `m`.
pub fn howell_form(m: &Mat<ModulusRing>) -> Mat<ModulusRing> {
    let ring = m.ring().clone();
    let n = m.cols();
    let prec = ring.precision();

    let mut work: Vec<Vec<u64>> = (0..m.rows())
        .map(|i| m.row(i).to_vec())
        .filter(|r| !row_is_zero(r))
        .collect();
    let mut result: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<(usize, u32)> = Vec::new(); // (column, valuation)

    for col in 0..n {
        let best = work
            .iter()
            .enumerate()
            .filter(|(_, r)| r[col] != 0)
            .min_by_key(|(_, r)| ring.val(r[col]))
            .map(|(i, _)| i);
        let Some(bi) = best else { continue };

        let mut pivot_row = work.swap_remove(bi);
        let (v, u) = ring.val_unit(pivot_row[col]);
        let u_inv = ring.inv(u).expect("unit part is invertible");
        row_scale(&ring, &mut pivot_row, u_inv);
        let pivot = ring.pi_pow(v);
        debug_assert_eq!(pivot_row[col], pivot);

        for r in work.iter_mut() {
            if r[col] != 0 {
                // val(r[col]) >= v, so the division is exact on canonical reps.
                let q = r[col] / pivot;
                row_submul(&ring, r, q, &pivot_row);
                debug_assert_eq!(r[col], 0);
            }
        }

        // The annihilator multiple keeps the Howell property: it generates
        // the span elements that live strictly to the right of this pivot.
        if v > 0 {
            let ann_scale = ring.pi_pow(prec - v);
            let ann: Vec<u64> = pivot_row.iter().map(|&x| ring.mul(x, ann_scale)).collect();
            if !row_is_zero(&ann) {
                work.push(ann);
            }
        }
        work.retain(|r| !row_is_zero(r));

        result.push(pivot_row);
        pivots.push((col, v));
    }
    debug_assert!(work.is_empty());

    // Back-reduction: entries above each pivot are reduced mod the pivot.
    // Ascending pivot order, so fix-ups from earlier steps are re-reduced.
    for k in 0..result.len() {
        let (c, v) = pivots[k];
        let pivot = ring.pi_pow(v);
        let row_k = result[k].clone();
        for row in result.iter_mut().take(k) {
            let q = row[c] / pivot;
            row_submul(&ring, row, q, &row_k);
        }
    }

    Mat::from_rows(ring, n, &result)
}

/// Whether `m` is already in Howell form (bit-exact idempotence check).
pub fn is_howell(m: &Mat<ModulusRing>) -> bool {
    howell_form(m) == *m
}

/// [`span_size`] with the Howell precondition actually verified.
pub fn span_size_checked(h: &Mat<ModulusRing>) -> Result<u128, crate::error::CoreError> {
    if !is_howell(h) {
        return Err(crate::error::CoreError::NotHowell);
    }
    Ok(span_size(h))
}

/// Number of elements of the row span; input must be in Howell form.
pub fn span_size(h: &Mat<ModulusRing>) -> u128 {
    let ring = h.ring();
    let mut size: u128 = 1;
    for i in 0..h.rows() {
        let c = h
            .row(i)
            .iter()
            .position(|&x| x != 0)
            .expect("no zero rows in Howell form");
        let v = ring.val(h.get(i, c));
        size *= (ring.p() as u128).pow(ring.precision() - v);
    }
    size
}

/// Reduces `v` against a Howell-form basis; the result is the canonical
/// residue of `v` modulo the span (zero exactly when `v` lies in the span).
pub fn reduce_vector(h: &Mat<ModulusRing>, v: &[u64]) -> Vec<u64> {
    let ring = h.ring();
    assert_eq!(h.cols(), v.len());
    let mut v = v.to_vec();
    for i in 0..h.rows() {
        let row = h.row(i);
        let c = row
            .iter()
            .position(|&x| x != 0)
            .expect("no zero rows in Howell form");
        if v[c] != 0 {
            let q = v[c] / row[c];
            row_submul(ring, &mut v, q, row);
        }
    }
    v
}

pub fn span_contains(h: &Mat<ModulusRing>, v: &[u64]) -> bool {
    row_is_zero(&reduce_vector(h, v))
}

/// Howell form of the union of two spans.
pub fn span_union(a: &Mat<ModulusRing>, b: &Mat<ModulusRing>) -> Mat<ModulusRing> {
    howell_form(&a.vstack(b))
}

/// Basis of the left kernel `{ x : x * a = 0 }`, in Howell form.
///
/// Runs Howell reduction on `[a | I]`; rows whose `a`-part vanished are
/// exactly the span elements supported on the identity columns, i.e. the
/// kernel relations — completeness is the Howell property itself.
pub fn left_kernel(a: &Mat<ModulusRing>) -> Mat<ModulusRing> {
    let ring = a.ring().clone();
    let r = a.rows();
    let n = a.cols();
    let mut aug = Mat::zero(ring.clone(), r, n + r);
    for i in 0..r {
        for j in 0..n {
            aug.set(i, j, a.get(i, j));
        }
        aug.set(i, n + i, ring.one());
    }
    let h = howell_form(&aug);
    let mut kernel_rows: Vec<Vec<u64>> = Vec::new();
    for i in 0..h.rows() {
        if h.row(i)[..n].iter().all(|&x| x == 0) {
            kernel_rows.push(h.row(i)[n..].to_vec());
        }
    }
    howell_form(&Mat::from_rows(ring, r, &kernel_rows))
}
