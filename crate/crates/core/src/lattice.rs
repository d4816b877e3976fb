//! Lattices `p^M O^n ⊆ Λ ⊆ O^n` as submodules of `(Z/p^M)^n`.
//!
//! Every lattice in that window is identified with its image in the finite
//! module, held as a Howell-form basis so equality and deduplication are
//! bit-exact. The colength of the lattice in `O^n`, reduced mod `n`, is the
//! distance class between the corresponding maximal orders.

use std::collections::BTreeSet;

use crate::error::CoreError;
use crate::howell::{howell_form, left_kernel, span_contains, span_size};
use crate::mat::Mat;
use crate::ring::{ModulusRing, Ring};

/// Residue class in `Z/nZ` measuring lattice distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DistanceClass {
    pub modulus: u64,
    pub value: u64,
}

impl DistanceClass {
    pub fn new(modulus: u64, value: u64) -> Self {
        DistanceClass {
            modulus,
            value: value % modulus,
        }
    }
}

/// A submodule of `(Z/p^M)^n`, canonically presented.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Submodule {
    dim: usize,
    ring: ModulusRing,
    basis: Mat<ModulusRing>, // Howell form, zero rows dropped
}

impl Submodule {
    pub fn from_rows(ring: ModulusRing, dim: usize, rows: &[Vec<u64>]) -> Self {
        let m = Mat::from_rows(ring.clone(), dim, rows);
        Submodule {
            dim,
            ring,
            basis: howell_form(&m),
        }
    }

    pub fn from_basis_mat(m: &Mat<ModulusRing>) -> Self {
        Submodule {
            dim: m.cols(),
            ring: m.ring().clone(),
            basis: howell_form(m),
        }
    }

    pub fn zero(ring: ModulusRing, dim: usize) -> Self {
        let basis = Mat::zero(ring.clone(), 0, dim);
        Submodule { dim, ring, basis }
    }

    pub fn full(ring: ModulusRing, dim: usize) -> Self {
        let basis = Mat::identity(ring.clone(), dim);
        Submodule { dim, ring, basis }
    }

    pub fn from_vector(ring: ModulusRing, v: &[u64]) -> Self {
        Submodule::from_rows(ring, v.len(), &[v.to_vec()])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ring(&self) -> &ModulusRing {
        &self.ring
    }

    pub fn basis(&self) -> &Mat<ModulusRing> {
        &self.basis
    }

    /// Number of Howell basis rows.
    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.rows() == 0
    }

    pub fn is_full(&self) -> bool {
        self.size() == (self.ring.card() as u128).pow(self.dim as u32)
    }

    pub fn size(&self) -> u128 {
        span_size(&self.basis)
    }

    /// `log_p` of the index of the lattice in `O^n`.
    pub fn colength(&self) -> u32 {
        let ring = &self.ring;
        let mut log_size = 0u32;
        for i in 0..self.basis.rows() {
            let c = self.basis.row(i).iter().position(|&x| x != 0).unwrap();
            log_size += ring.precision() - ring.val(self.basis.get(i, c));
        }
        self.dim as u32 * ring.precision() - log_size
    }

    /// Colength reduced mod the ambient dimension: the distance class of the
    /// lattice, stable under homothety.
    pub fn colength_class(&self) -> DistanceClass {
        DistanceClass::new(self.dim as u64, self.colength() as u64)
    }

    pub fn contains_vec(&self, v: &[u64]) -> bool {
        span_contains(&self.basis, v)
    }

    pub fn contains(&self, other: &Submodule) -> bool {
        (0..other.basis.rows()).all(|i| self.contains_vec(other.basis.row(i)))
    }

    pub fn checked_same_ambient(&self, other: &Submodule) -> Result<(), CoreError> {
        self.basis.checked_same_ring(&other.basis)?;
        if self.dim != other.dim {
            return Err(CoreError::DimensionMismatch {
                expected: format!("ambient dimension {}", self.dim),
                found: format!("{}", other.dim),
            });
        }
        Ok(())
    }

    /// Smallest submodule containing both (Howell form of stacked bases).
    pub fn join(&self, other: &Submodule) -> Result<Submodule, CoreError> {
        self.checked_same_ambient(other)?;
        let stacked = self.basis.vstack(&other.basis);
        Ok(Submodule {
            dim: self.dim,
            ring: self.ring.clone(),
            basis: howell_form(&stacked),
        })
    }

    /// Intersection, computed through the left kernel of the stacked bases.
    pub fn meet(&self, other: &Submodule) -> Result<Submodule, CoreError> {
        self.checked_same_ambient(other)?;
        let r1 = self.basis.rows();
        let stacked = self.basis.vstack(&other.basis);
        let kernel = left_kernel(&stacked);
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for i in 0..kernel.rows() {
            // (a | b) with a*B1 + b*B2 = 0, so a*B1 = -(b*B2) lies in both.
            let a = &kernel.row(i)[..r1];
            let mut w = vec![0u64; self.dim];
            for (l, &coef) in a.iter().enumerate() {
                if coef != 0 {
                    for (x, &y) in w.iter_mut().zip(self.basis.row(l)) {
                        *x = self.ring.add(*x, self.ring.mul(coef, y));
                    }
                }
            }
            rows.push(w);
        }
        Ok(Submodule::from_rows(self.ring.clone(), self.dim, &rows))
    }

    /// Image of the lattice scaled by `p` (only meaningful when the scaled
    /// lattice still lies in the window, i.e. this one contains
    /// `p^(M-1) O^n`).
    pub fn scaled_by_p(&self) -> Submodule {
        let p = self.ring.p();
        let scaled = self.basis.scale(p % self.ring.modulus());
        Submodule {
            dim: self.dim,
            ring: self.ring.clone(),
            basis: howell_form(&scaled),
        }
    }

    /// Canonical dedup key.
    fn key(&self) -> Vec<u64> {
        let mut k = Vec::with_capacity(1 + self.basis.data().len());
        k.push(self.basis.rows() as u64);
        k.extend_from_slice(self.basis.data());
        k
    }
}

/// Least submodule containing `v` and closed under the left action of every
/// generator: the fixpoint of alternating span/act steps.
pub fn spin(gens: &[Mat<ModulusRing>], v: &[u64]) -> Submodule {
    let ring = gens[0].ring().clone();
    let dim = gens[0].cols();
    assert!(
        gens.iter().all(|g| g.rows() == dim && g.cols() == dim),
        "generators must be square of equal size"
    );
    assert_eq!(v.len(), dim);
    let mut sub = Submodule::from_vector(ring, v);
    loop {
        let mut new_rows: Vec<Vec<u64>> = Vec::new();
        for g in gens {
            for i in 0..sub.basis.rows() {
                let w = g.apply(sub.basis.row(i));
                if !sub.contains_vec(&w) {
                    new_rows.push(w);
                }
            }
        }
        if new_rows.is_empty() {
            return sub;
        }
        let mut rows: Vec<Vec<u64>> = (0..sub.basis.rows())
            .map(|i| sub.basis.row(i).to_vec())
            .collect();
        rows.append(&mut new_rows);
        sub = Submodule::from_rows(sub.ring.clone(), dim, &rows);
    }
}

pub fn is_invariant(gens: &[Mat<ModulusRing>], sub: &Submodule) -> bool {
    gens.iter()
        .all(|g| (0..sub.basis().rows()).all(|i| sub.contains_vec(&g.apply(sub.basis().row(i)))))
}

/// Hard limit on materialized lattice sets, independent of the vector cap.
const MAX_LATTICES: usize = 1 << 20;

fn decode_vector(card: u64, dim: usize, mut idx: u128) -> Vec<u64> {
    let mut v = vec![0u64; dim];
    for x in v.iter_mut() {
        *x = (idx % card as u128) as u64;
        idx /= card as u128;
    }
    v
}

/// All submodules invariant under every generator.
///
/// Spins of all nonzero vectors are the join-irreducible invariant
/// submodules; closing them under join yields the complete set. The closure
/// only ever joins against original spins, which reaches every finite join.
pub fn invariant_submodules(
    gens: &[Mat<ModulusRing>],
    cap: u64,
) -> Result<Vec<Submodule>, CoreError> {
    let ring = gens[0].ring().clone();
    let dim = gens[0].cols();
    let total = (ring.card() as u128).pow(dim as u32);
    if total > cap as u128 {
        return Err(CoreError::Resource {
            cap,
            needed: total.min(u64::MAX as u128) as u64,
            what: "ambient vector enumeration",
        });
    }

    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut spins: Vec<Submodule> = Vec::new();
    for idx in 1..total {
        let v = decode_vector(ring.card(), dim, idx);
        let s = spin(gens, &v);
        if seen.insert(s.key()) {
            spins.push(s);
        }
    }

    let mut result: Vec<Submodule> = spins.clone();
    let mut queue: Vec<Submodule> = spins.clone();
    while let Some(x) = queue.pop() {
        for s in &spins {
            let z = x.join(s)?;
            if seen.insert(z.key()) {
                result.push(z.clone());
                queue.push(z);
                if result.len() > MAX_LATTICES {
                    return Err(CoreError::Resource {
                        cap: MAX_LATTICES as u64,
                        needed: result.len() as u64,
                        what: "invariant lattice set",
                    });
                }
            }
        }
    }
    result.push(Submodule::zero(ring, dim));

    result.sort_by(|a, b| {
        a.colength()
            .cmp(&b.colength())
            .then_with(|| a.key().cmp(&b.key()))
    });
    Ok(result)
}

/// Every submodule of `(Z/p^M)^n`; exhaustive, for oracle use at small sizes.
pub fn all_submodules(
    ring: &ModulusRing,
    dim: usize,
    cap: u64,
) -> Result<Vec<Submodule>, CoreError> {
    let total = (ring.card() as u128).pow(dim as u32);
    if total > cap as u128 {
        return Err(CoreError::Resource {
            cap,
            needed: total.min(u64::MAX as u128) as u64,
            what: "ambient vector enumeration",
        });
    }
    let vectors: Vec<Vec<u64>> = (1..total)
        .map(|i| decode_vector(ring.card(), dim, i))
        .collect();
    let zero = Submodule::zero(ring.clone(), dim);
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    seen.insert(zero.key());
    let mut result = vec![zero.clone()];
    let mut queue = vec![zero];
    while let Some(l) = queue.pop() {
        for v in &vectors {
            if l.contains_vec(v) {
                continue;
            }
            let bigger = l.join(&Submodule::from_vector(ring.clone(), v))?;
            if seen.insert(bigger.key()) {
                result.push(bigger.clone());
                queue.push(bigger);
                if result.len() > MAX_LATTICES {
                    return Err(CoreError::Resource {
                        cap: MAX_LATTICES as u64,
                        needed: result.len() as u64,
                        what: "submodule enumeration",
                    });
                }
            }
        }
    }
    result.sort_by(|a, b| {
        a.colength()
            .cmp(&b.colength())
            .then_with(|| a.key().cmp(&b.key()))
    });
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn ring(p: u64, m: u32) -> ModulusRing {
        ModulusRing::new(p, m).unwrap()
    }

    fn unit_vec(dim: usize, i: usize) -> Vec<u64> {
        let mut v = vec![0u64; dim];
        v[i] = 1;
        v
    }

    #[test]
    fn colength_class_window_cases() {
        // Window (Z/2)^4 with n = 4.
        let r = ring(2, 1);
        let full = Submodule::full(r.clone(), 4);
        assert_eq!(full.colength_class(), DistanceClass::new(4, 0));

        let plane = Submodule::from_rows(r.clone(), 4, &[unit_vec(4, 0), unit_vec(4, 1)]);
        assert_eq!(plane.colength_class(), DistanceClass::new(4, 2));

        let line = Submodule::from_vector(r.clone(), &unit_vec(4, 0));
        assert_eq!(line.colength_class(), DistanceClass::new(4, 3));

        let zero = Submodule::zero(r, 4);
        assert_eq!(zero.colength_class(), DistanceClass::new(4, 0));
    }

    #[test]
    fn homothety_stability() {
        let mut rng = SplitMix64::new(13);
        let r = ring(2, 2);
        for _ in 0..40 {
            let rows: Vec<Vec<u64>> = (0..2)
                .map(|_| (0..3).map(|_| rng.below(4)).collect())
                .collect();
            let l = Submodule::from_rows(r.clone(), 3, &rows);
            // Ensure the lattice contains p^(M-1) O^n so p*L stays in window.
            let deep =
                Submodule::from_rows(r.clone(), 3, &[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]);
            let l = l.join(&deep).unwrap();
            let scaled = l.scaled_by_p();
            assert_eq!(scaled.colength_class(), l.colength_class());
            assert_eq!(scaled.colength(), l.colength() + 3);
        }
    }

    #[test]
    fn spin_of_zero_is_zero() {
        let r = ring(2, 1);
        let gens = vec![Mat::identity(r.clone(), 3)];
        let s = spin(&gens, &[0, 0, 0]);
        assert!(s.is_zero());
    }

    #[test]
    fn full_matrix_algebra_spins_everything() {
        let r = ring(2, 1);
        let mut gens = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                gens.push(Mat::unit(r.clone(), 4, i, j, 1));
            }
        }
        let s = spin(&gens, &unit_vec(4, 0));
        assert!(s.is_full());
        let inv = invariant_submodules(&gens, 4096).unwrap();
        assert_eq!(inv.len(), 2); // zero and full only
    }

    #[test]
    fn join_meet_identities() {
        let r = ring(2, 2);
        let l = Submodule::from_rows(r.clone(), 3, &[vec![1, 2, 0], vec![0, 2, 2]]);
        let zero = Submodule::zero(r.clone(), 3);
        let full = Submodule::full(r.clone(), 3);
        assert_eq!(l.join(&zero).unwrap(), l);
        assert_eq!(l.meet(&full).unwrap(), l);
        assert_eq!(l.join(&full).unwrap(), full);
        assert_eq!(l.meet(&zero).unwrap(), zero);
    }

    #[test]
    fn join_meet_against_elementwise_oracle() {
        // (Z/4)^3 has 64 vectors; compare against exhaustive element sets.
        let mut rng = SplitMix64::new(23);
        let r = ring(2, 2);
        let elements = |s: &Submodule| -> BTreeSet<Vec<u64>> {
            let mut out = BTreeSet::new();
            for idx in 0..64u128 {
                let v = decode_vector(4, 3, idx);
                if s.contains_vec(&v) {
                    out.insert(v);
                }
            }
            out
        };
        for _ in 0..25 {
            let rows1: Vec<Vec<u64>> = (0..2)
                .map(|_| (0..3).map(|_| rng.below(4)).collect())
                .collect();
            let rows2: Vec<Vec<u64>> = (0..2)
                .map(|_| (0..3).map(|_| rng.below(4)).collect())
                .collect();
            let a = Submodule::from_rows(r.clone(), 3, &rows1);
            let b = Submodule::from_rows(r.clone(), 3, &rows2);
            let meet = a.meet(&b).unwrap();
            let join = a.join(&b).unwrap();

            let ea = elements(&a);
            let eb = elements(&b);
            let emeet: BTreeSet<_> = ea.intersection(&eb).cloned().collect();
            assert_eq!(elements(&meet), emeet, "meet mismatch");

            // Join oracle: closure of the union under addition.
            let mut ejoin: BTreeSet<Vec<u64>> = ea.union(&eb).cloned().collect();
            loop {
                let mut added = false;
                let cur: Vec<Vec<u64>> = ejoin.iter().cloned().collect();
                for x in &cur {
                    for y in &cur {
                        let s: Vec<u64> = x.iter().zip(y).map(|(&a, &b)| r.add(a, b)).collect();
                        if ejoin.insert(s) {
                            added = true;
                        }
                    }
                }
                if !added {
                    break;
                }
            }
            assert_eq!(elements(&join), ejoin, "join mismatch");
        }
    }

    #[test]
    fn invariant_enumeration_matches_brute_filter() {
        let mut rng = SplitMix64::new(47);
        for trial in 0..30 {
            let (r, dim) = match trial % 3 {
                0 => (ring(2, 1), 4),
                1 => (ring(2, 2), 2),
                _ => (ring(3, 1), 3),
            };
            let mut gens = vec![Mat::identity(r.clone(), dim)];
            for _ in 0..2 {
                let data: Vec<u64> = (0..dim * dim).map(|_| rng.below(r.card())).collect();
                gens.push(Mat::from_codes(r.clone(), dim, dim, data));
            }
            let fast = invariant_submodules(&gens, 4096).unwrap();
            let brute: Vec<Submodule> = all_submodules(&r, dim, 4096)
                .unwrap()
                .into_iter()
                .filter(|s| is_invariant(&gens, s))
                .collect();
            assert_eq!(fast, brute, "trial {trial}");
            // Spot-check invariance and spin minimality.
            for s in &fast {
                assert!(is_invariant(&gens, s));
            }
        }
    }

    #[test]
    fn spin_minimality() {
        let mut rng = SplitMix64::new(3);
        let r = ring(2, 2);
        let dim = 2;
        let mut gens = vec![Mat::identity(r.clone(), dim)];
        let data: Vec<u64> = (0..4).map(|_| rng.below(4)).collect();
        gens.push(Mat::from_codes(r.clone(), dim, dim, data));
        let inv = invariant_submodules(&gens, 4096).unwrap();
        for idx in 1..16u128 {
            let v = decode_vector(4, dim, idx);
            let s = spin(&gens, &v);
            for l in &inv {
                if l.contains_vec(&v) {
                    assert!(l.contains(&s), "spin not minimal at {v:?}");
                }
            }
        }
    }

    #[test]
    fn lattice_laws_on_sampled_triples() {
        let mut rng = SplitMix64::new(61);
        let r = ring(2, 2);
        for _ in 0..30 {
            let mut rand_sub = || {
                let rows: Vec<Vec<u64>> = (0..2)
                    .map(|_| (0..3).map(|_| rng.below(4)).collect())
                    .collect();
                Submodule::from_rows(r.clone(), 3, &rows)
            };
            let (a, b, c) = (rand_sub(), rand_sub(), rand_sub());
            // Idempotence, commutativity, associativity.
            assert_eq!(a.join(&a).unwrap(), a);
            assert_eq!(a.meet(&a).unwrap(), a);
            assert_eq!(a.join(&b).unwrap(), b.join(&a).unwrap());
            assert_eq!(a.meet(&b).unwrap(), b.meet(&a).unwrap());
            assert_eq!(
                a.join(&b).unwrap().join(&c).unwrap(),
                a.join(&b.join(&c).unwrap()).unwrap()
            );
            assert_eq!(
                a.meet(&b).unwrap().meet(&c).unwrap(),
                a.meet(&b.meet(&c).unwrap()).unwrap()
            );
            // Absorption.
            assert_eq!(a.join(&a.meet(&b).unwrap()).unwrap(), a);
            assert_eq!(a.meet(&a.join(&b).unwrap()).unwrap(), a);
            // Modular law: a <= c implies a v (b ^ c) = (a v b) ^ c.
            let a_in_c = a.meet(&c).unwrap(); // force a <= c
            let lhs = a_in_c.join(&b.meet(&c).unwrap()).unwrap();
            let rhs = a_in_c.join(&b).unwrap().meet(&c).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn enumeration_contains_zero_and_full() {
        let r = ring(2, 2);
        let gens = vec![Mat::identity(r.clone(), 2)];
        let inv = invariant_submodules(&gens, 4096).unwrap();
        assert!(inv.iter().any(|s| s.is_zero()));
        assert!(inv.iter().any(|s| s.is_full()));
    }

    #[test]
    fn cap_violation_is_reported() {
        let r = ring(2, 2);
        let gens = vec![Mat::identity(r, 4)];
        let err = invariant_submodules(&gens, 100).unwrap_err();
        match err {
            CoreError::Resource { cap, needed, .. } => {
                assert_eq!(cap, 100);
                assert_eq!(needed, 256);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
