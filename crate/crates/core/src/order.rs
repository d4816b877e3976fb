//! Local orders in `M_n(Z/p^M)`: multiplicatively closed module spans
//! containing the identity, with canonical span bases for exact equality.
//!
//! The ambient maximal order is always `M_n(O)` in the standard basis. Each
//! named construction used by the verification suites lives here, together
//! with the primitivity certificate that makes window-limited lattice
//! enumeration provably complete.

use crate::error::CoreError;
use crate::howell::{howell_form, span_contains};
use crate::lattice::{spin, Submodule};
use crate::mat::Mat;
use crate::ring::{ModulusRing, Ring};

/// An order in `M_n` over `Z/p^M`, stored as the Howell-canonical basis of
/// its `n^2`-column flattened span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalOrder {
    n: usize,
    ring: ModulusRing,
    basis: Vec<Mat<ModulusRing>>,
    closed: bool,
}

impl LocalOrder {
    /// Smallest multiplicatively closed module span containing the
    /// generators and the identity.
    pub fn close(
        ring: ModulusRing,
        n: usize,
        gens: &[Mat<ModulusRing>],
    ) -> Result<Self, CoreError> {
        for g in gens {
            if g.rows() != n || g.cols() != n {
                return Err(CoreError::DimensionMismatch {
                    expected: format!("{n}x{n} matrix"),
                    found: format!("{}x{}", g.rows(), g.cols()),
                });
            }
            if *g.ring() != ring {
                return Err(CoreError::RingMismatch {
                    left: ring.name(),
                    right: g.ring().name(),
                });
            }
        }
        let mut rows: Vec<Vec<u64>> = vec![Mat::identity(ring.clone(), n).flatten_row()];
        rows.extend(gens.iter().map(|g| g.flatten_row()));
        let mut span = howell_form(&Mat::from_rows(ring.clone(), n * n, &rows));
        loop {
            let mats: Vec<Mat<ModulusRing>> = (0..span.rows())
                .map(|i| Mat::from_flat(ring.clone(), n, span.row(i)))
                .collect();
            let mut new_rows: Vec<Vec<u64>> = Vec::new();
            for a in &mats {
                for b in &mats {
                    let prod = a.mul(b).flatten_row();
                    if !span_contains(&span, &prod) {
                        new_rows.push(prod);
                    }
                }
            }
            if new_rows.is_empty() {
                let basis = mats;
                return Ok(LocalOrder {
                    n,
                    ring,
                    basis,
                    closed: true,
                });
            }
            let mut all: Vec<Vec<u64>> = (0..span.rows()).map(|i| span.row(i).to_vec()).collect();
            all.append(&mut new_rows);
            span = howell_form(&Mat::from_rows(ring.clone(), n * n, &all));
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &ModulusRing {
        &self.ring
    }

    /// Canonical span basis (unflattened Howell rows).
    pub fn basis(&self) -> &[Mat<ModulusRing>] {
        &self.basis
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Module rank of the order as an `O`-lattice: the number of invariant
    /// factors of the flattened span, `log_p(|H| / |pH|)`. Unlike the raw
    /// Howell row count this is invariant under conjugation.
    pub fn rank(&self) -> usize {
        let span = self.span_submodule();
        let ratio = span.size() / span.scaled_by_p().size();
        let p = self.ring.p() as u128;
        let mut rank = 0usize;
        let mut r = ratio;
        while r > 1 {
            debug_assert_eq!(r % p, 0);
            r /= p;
            rank += 1;
        }
        rank
    }

    pub fn span_submodule(&self) -> Submodule {
        let rows: Vec<Vec<u64>> = self.basis.iter().map(|m| m.flatten_row()).collect();
        Submodule::from_rows(self.ring.clone(), self.n * self.n, &rows)
    }

    pub fn contains(&self, m: &Mat<ModulusRing>) -> bool {
        let rows: Vec<Vec<u64>> = self.basis.iter().map(|b| b.flatten_row()).collect();
        let span = Mat::from_rows(self.ring.clone(), self.n * self.n, &rows);
        span_contains(&span, &m.flatten_row())
    }

    pub fn span_eq(&self, other: &LocalOrder) -> bool {
        self.n == other.n && self.ring == other.ring && self.basis == other.basis
    }

    /// The same order with all data truncated to a lower precision.
    pub fn truncated(&self, precision: u32) -> Result<LocalOrder, CoreError> {
        let ring = self.ring.truncated(precision)?;
        let gens: Vec<Mat<ModulusRing>> = self
            .basis
            .iter()
            .map(|m| m.truncated(precision))
            .collect::<Result<_, _>>()?;
        // Reduction is a ring map, so the reduced span is already closed;
        // re-closing just recanonicalizes the basis.
        LocalOrder::close(ring, self.n, &gens)
    }

    /// Generator images mod p: a canonical basis of the reduced span.
    pub fn residual_generators(&self) -> Vec<Mat<ModulusRing>> {
        self.truncated(1).expect("precision >= 1").basis.to_vec()
    }
}

/// Data of the integral embedding `M_n(O_E) -> M_2n(O_k)` for the unramified
/// quadratic extension `E/k`: the generator `ω` of `O_E = O_k[ω]` acts as the
/// companion matrix of its (lifted) minimal quadratic.
#[derive(Debug, Clone)]
pub struct UnramifiedEmbedding {
    ring: ModulusRing,
    n: usize,
    /// `x^2 + c1 x + c0`, the integer lift of the least irreducible monic
    /// quadratic over `F_p`.
    c0: u64,
    c1: u64,
}

/// Least irreducible monic quadratic over F_p, by (c0, c1) code order.
fn least_irreducible_quadratic(p: u64) -> (u64, u64) {
    for code in 0..p * p {
        let c0 = code % p;
        let c1 = code / p;
        // Irreducible over F_p iff no roots.
        let has_root = (0..p).any(|x| (x * x + c1 * x + c0).is_multiple_of(p));
        if !has_root {
            return (c0, c1);
        }
    }
    unreachable!("irreducible quadratics exist over every prime field");
}

impl UnramifiedEmbedding {
    pub fn new(n: usize, ring: ModulusRing) -> Self {
        let (c0, c1) = least_irreducible_quadratic(ring.p());
        UnramifiedEmbedding { ring, n, c0, c1 }
    }

    pub fn ring(&self) -> &ModulusRing {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Companion matrix of the defining quadratic: the image of `ω`.
    pub fn companion(&self) -> Mat<ModulusRing> {
        let r = &self.ring;
        Mat::from_ints(
            r.clone(),
            2,
            2,
            &[0, -(self.c0 as i64), 1, -(self.c1 as i64)],
        )
    }

    /// Embeds the `E`-matrix `a + b ω` (entrywise pair of `n x n` integer
    /// parts) as a `2n x 2n` matrix over `O_k`.
    pub fn embed(&self, a: &Mat<ModulusRing>, b: &Mat<ModulusRing>) -> Mat<ModulusRing> {
        assert_eq!(a.rows(), self.n);
        assert_eq!(b.rows(), self.n);
        let r = &self.ring;
        let comp = self.companion();
        let mut out = Mat::zero(r.clone(), 2 * self.n, 2 * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let av = a.get(i, j);
                let bv = b.get(i, j);
                for di in 0..2 {
                    for dj in 0..2 {
                        let mut v = r.mul(bv, comp.get(di, dj));
                        if di == dj {
                            v = r.add(v, av);
                        }
                        out.set(2 * i + di, 2 * j + dj, v);
                    }
                }
            }
        }
        out
    }

    /// Product of `E`-matrices: `(a1 + b1 ω)(a2 + b2 ω)` with
    /// `ω^2 = -c0 - c1 ω`.
    pub fn emul(
        &self,
        x: (&Mat<ModulusRing>, &Mat<ModulusRing>),
        y: (&Mat<ModulusRing>, &Mat<ModulusRing>),
    ) -> (Mat<ModulusRing>, Mat<ModulusRing>) {
        let r = &self.ring;
        let (a1, b1) = x;
        let (a2, b2) = y;
        let bb = b1.mul(b2);
        let a = a1.mul(a2).sub(&bb.scale(r.encode(self.c0 as i64)));
        let b = a1
            .mul(b2)
            .add(&b1.mul(a2))
            .sub(&bb.scale(r.encode(self.c1 as i64)));
        (a, b)
    }

    /// Images of the `O_k`-basis `{E_ij, ω E_ij}` of `M_n(O_E)`.
    pub fn basis_images(&self) -> Vec<Mat<ModulusRing>> {
        let r = &self.ring;
        let zero = Mat::zero(r.clone(), self.n, self.n);
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let e = Mat::unit(r.clone(), self.n, i, j, r.one());
                out.push(self.embed(&e, &zero));
                out.push(self.embed(&zero, &e));
            }
        }
        out
    }
}

/// The maximal order `M_n(O)`.
pub fn build_maximal(ring: ModulusRing, n: usize) -> LocalOrder {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            gens.push(Mat::unit(ring.clone(), n, i, j, ring.one()));
        }
    }
    LocalOrder::close(ring, n, &gens).expect("matrix units are well-formed")
}

/// The rank-8 order in `M_4(O_k)`: block matrices over the unramified
/// quadratic extension with scalar upper-left entry, zero lower-left entry,
/// plus `p` times everything — embedded integrally.
pub fn build_mord(ring: ModulusRing) -> LocalOrder {
    let emb = UnramifiedEmbedding::new(2, ring.clone());
    let zero = Mat::zero(ring.clone(), 2, 2);
    let unit = |i, j| Mat::unit(ring.clone(), 2, i, j, ring.one());
    let p = ring.p() % ring.modulus();
    let mut gens: Vec<Mat<ModulusRing>> = Vec::new();
    // (1,1): scalars O_k * 1_E only.
    gens.push(emb.embed(&unit(0, 0), &zero));
    // (1,2) and (2,2): all of O_E.
    for (i, j) in [(0usize, 1usize), (1, 1)] {
        gens.push(emb.embed(&unit(i, j), &zero));
        gens.push(emb.embed(&zero, &unit(i, j)));
    }
    // p * M_2(O_E).
    for i in 0..2 {
        for j in 0..2 {
            gens.push(emb.embed(&unit(i, j), &zero).scale(p));
            gens.push(emb.embed(&zero, &unit(i, j)).scale(p));
        }
    }
    LocalOrder::close(ring, 4, &gens).expect("generators are well-formed")
}

/// Preimage in `M_n(O)` of a residual algebra: the lift of the residual span
/// plus `p M_n(O)`, built at the precision of `ring`.
pub fn build_residual_preimage(
    ring: ModulusRing,
    n: usize,
    residual_gens: &[Mat<ModulusRing>],
) -> Result<LocalOrder, CoreError> {
    let res_ring = ModulusRing::new(ring.p(), 1)?;
    let mut rows: Vec<Vec<u64>> = vec![Mat::identity(res_ring.clone(), n).flatten_row()];
    for g in residual_gens {
        if *g.ring() != res_ring {
            return Err(CoreError::RingMismatch {
                left: res_ring.name(),
                right: g.ring().name(),
            });
        }
        if g.rows() != n || g.cols() != n {
            return Err(CoreError::DimensionMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", g.rows(), g.cols()),
            });
        }
        rows.push(g.flatten_row());
    }
    // Precondition: the input spans a unital algebra over F_p.
    let span = howell_form(&Mat::from_rows(res_ring.clone(), n * n, &rows[1..]));
    if !span_contains(&span, &Mat::identity(res_ring.clone(), n).flatten_row()) {
        return Err(CoreError::NotUnital);
    }
    for i in 0..span.rows() {
        for j in 0..span.rows() {
            let a = Mat::from_flat(res_ring.clone(), n, span.row(i));
            let b = Mat::from_flat(res_ring.clone(), n, span.row(j));
            if !span_contains(&span, &a.mul(&b).flatten_row()) {
                return Err(CoreError::Config(
                    "residual generators do not span a multiplicatively closed algebra".into(),
                ));
            }
        }
    }

    let p = ring.p() % ring.modulus();
    let mut gens: Vec<Mat<ModulusRing>> = residual_gens
        .iter()
        .map(|g| g.map_ring(ring.clone(), |x| x)) // codes < p are canonical at full precision
        .collect();
    for i in 0..n {
        for j in 0..n {
            gens.push(Mat::unit(ring.clone(), n, i, j, p));
        }
    }
    LocalOrder::close(ring, n, &gens)
}

/// Block-upper-triangular order: diagonal blocks are the given component
/// orders, the block above diagonal pair `(i, j)` is
/// `p^(depth + t_j - t_i) * (full rectangular module)`, and blocks below the
/// diagonal are zero.
pub fn build_block_triangular(
    components: &[LocalOrder],
    exponents: &[u32],
    depth: u32,
) -> Result<LocalOrder, CoreError> {
    if components.is_empty() {
        return Err(CoreError::Config(
            "at least one component is required".into(),
        ));
    }
    if exponents.len() != components.len() {
        return Err(CoreError::Config(format!(
            "expected {} exponents, found {}",
            components.len(),
            exponents.len()
        )));
    }
    let ring = components[0].ring().clone();
    for c in components {
        if *c.ring() != ring {
            return Err(CoreError::RingMismatch {
                left: ring.name(),
                right: c.ring().name(),
            });
        }
    }
    if exponents.windows(2).any(|w| w[0] > w[1]) {
        return Err(CoreError::Config("exponents must be nondecreasing".into()));
    }
    let m = ring.precision();
    if let Some(&t) = exponents.iter().find(|&&t| t >= m) {
        return Err(CoreError::Resource {
            cap: m as u64,
            needed: t as u64,
            what: "block exponent vs ambient precision",
        });
    }
    if depth > m {
        return Err(CoreError::Config(format!(
            "depth {depth} exceeds precision {m}"
        )));
    }

    let n: usize = components.iter().map(|c| c.n()).sum();
    let offsets: Vec<usize> = components
        .iter()
        .scan(0usize, |acc, c| {
            let o = *acc;
            *acc += c.n();
            Some(o)
        })
        .collect();

    let mut gens: Vec<Mat<ModulusRing>> = Vec::new();
    for (ci, comp) in components.iter().enumerate() {
        let o = offsets[ci];
        for g in comp.basis() {
            let mut big = Mat::zero(ring.clone(), n, n);
            for a in 0..comp.n() {
                for b in 0..comp.n() {
                    big.set(o + a, o + b, g.get(a, b));
                }
            }
            gens.push(big);
        }
    }
    for i in 0..components.len() {
        for j in (i + 1)..components.len() {
            let e = depth + (exponents[j] - exponents[i]);
            let scale = ring.pi_pow(e);
            if scale == 0 {
                continue;
            }
            for a in 0..components[i].n() {
                for b in 0..components[j].n() {
                    gens.push(Mat::unit(
                        ring.clone(),
                        n,
                        offsets[i] + a,
                        offsets[j] + b,
                        scale,
                    ));
                }
            }
        }
    }
    LocalOrder::close(ring, n, &gens)
}

/// `H + p^N M_n(O)`.
pub fn deep_lift(h: &LocalOrder, depth: u32) -> Result<LocalOrder, CoreError> {
    let ring = h.ring().clone();
    if depth > ring.precision() {
        return Err(CoreError::Config(format!(
            "lift depth {depth} exceeds precision {}",
            ring.precision()
        )));
    }
    let scale = ring.pi_pow(depth);
    let mut gens = h.basis().to_vec();
    if scale != 0 {
        for i in 0..h.n() {
            for j in 0..h.n() {
                gens.push(Mat::unit(ring.clone(), h.n(), i, j, scale));
            }
        }
    }
    LocalOrder::close(ring, h.n(), &gens)
}

/// Witness that window-limited enumeration is complete: verified means every
/// vector with a unit coordinate mod `p^(depth+1)` spins, under the order, to
/// a module containing `p^depth (Z/p^(depth+1))^n`. Every invariant lattice
/// class is then realized in the window of this depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitivityCertificate {
    pub depth: u32,
    pub verified: bool,
    pub failing_vector: Option<Vec<u64>>,
}

pub fn primitivity_certificate(
    h: &LocalOrder,
    depth: u32,
    cap: u64,
) -> Result<PrimitivityCertificate, CoreError> {
    let ring = h.ring();
    if depth + 1 > ring.precision() {
        return Err(CoreError::Config(format!(
            "certificate depth {depth} needs precision {} but the order has {}",
            depth + 1,
            ring.precision()
        )));
    }
    let window = h.truncated(depth + 1)?;
    let wring = window.ring().clone();
    let n = h.n();
    let total = (wring.card() as u128).pow(n as u32);
    if total > cap as u128 {
        return Err(CoreError::Resource {
            cap,
            needed: total.min(u64::MAX as u128) as u64,
            what: "certificate vector enumeration",
        });
    }
    let target = {
        let scale = wring.pi_pow(depth);
        Submodule::from_basis_mat(&Mat::identity(wring.clone(), n).scale(scale))
    };
    let gens = window.basis().to_vec();
    let card = wring.card();
    for idx in 1..total {
        let mut v = vec![0u64; n];
        let mut rem = idx;
        for x in v.iter_mut() {
            *x = (rem % card as u128) as u64;
            rem /= card as u128;
        }
        if !v.iter().any(|&x| wring.is_unit(x)) {
            continue;
        }
        let s = spin(&gens, &v);
        if !s.contains(&target) {
            return Ok(PrimitivityCertificate {
                depth,
                verified: false,
                failing_vector: Some(v),
            });
        }
    }
    Ok(PrimitivityCertificate {
        depth,
        verified: true,
        failing_vector: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::invariant_submodules;

    fn ring(p: u64, m: u32) -> ModulusRing {
        ModulusRing::new(p, m).unwrap()
    }

    #[test]
    fn close_of_identity_is_scalars() {
        let r = ring(2, 3);
        let h = LocalOrder::close(r.clone(), 3, &[]).unwrap();
        assert_eq!(h.rank(), 1);
        assert!(h.contains(&Mat::identity(r.clone(), 3).scale(5)));
        assert!(!h.contains(&Mat::unit(r, 3, 0, 1, 1)));
    }

    #[test]
    fn close_is_idempotent() {
        let r = ring(2, 2);
        let gens = vec![Mat::from_ints(r.clone(), 2, 2, &[1, 1, 0, 1])];
        let h1 = LocalOrder::close(r.clone(), 2, &gens).unwrap();
        let h2 = LocalOrder::close(r, 2, h1.basis()).unwrap();
        assert!(h1.span_eq(&h2));
    }

    #[test]
    fn maximal_order_has_full_rank() {
        let h = build_maximal(ring(2, 2), 3);
        assert_eq!(h.rank(), 9);
    }

    #[test]
    fn embedding_is_multiplicative_on_basis_pairs() {
        for p in [2u64, 3, 5] {
            let r = ring(p, 3);
            let emb = UnramifiedEmbedding::new(2, r.clone());
            let zero = Mat::zero(r.clone(), 2, 2);
            // phi(1) = identity
            let one = emb.embed(&Mat::identity(r.clone(), 2), &zero);
            assert_eq!(one, Mat::identity(r.clone(), 4));
            // All O_E-basis pairs {E_ij, w E_ij}.
            let mut basis: Vec<(Mat<ModulusRing>, Mat<ModulusRing>)> = Vec::new();
            for i in 0..2 {
                for j in 0..2 {
                    let e = Mat::unit(r.clone(), 2, i, j, 1);
                    basis.push((e.clone(), zero.clone()));
                    basis.push((zero.clone(), e));
                }
            }
            for x in &basis {
                for y in &basis {
                    let lhs = emb.embed(&x.0, &x.1).mul(&emb.embed(&y.0, &y.1));
                    let (pa, pb) = emb.emul((&x.0, &x.1), (&y.0, &y.1));
                    let rhs = emb.embed(&pa, &pb);
                    assert_eq!(lhs, rhs, "p={p}");
                }
            }
        }
    }

    #[test]
    fn embedding_is_injective_on_basis() {
        let r = ring(3, 2);
        let emb = UnramifiedEmbedding::new(2, r.clone());
        let zero = Mat::zero(r.clone(), 2, 2);
        let mut images = std::collections::BTreeSet::new();
        for i in 0..2 {
            for j in 0..2 {
                let e = Mat::unit(r.clone(), 2, i, j, 1);
                images.insert(emb.embed(&e, &zero).flatten_row());
                images.insert(emb.embed(&zero, &e).flatten_row());
            }
        }
        assert_eq!(images.len(), 8);
    }

    #[test]
    fn embedded_quadratic_integers_act_irreducibly() {
        // n = 1, p = 2: O_E mod 2 is F_4 acting on (Z/2)^2.
        let r = ring(2, 1);
        let emb = UnramifiedEmbedding::new(1, r.clone());
        let one = Mat::identity(r.clone(), 1);
        let zero = Mat::zero(r.clone(), 1, 1);
        let gens = vec![emb.embed(&one, &zero), emb.embed(&zero, &one)];
        let inv = invariant_submodules(&gens, 4096).unwrap();
        assert_eq!(inv.len(), 2);
    }

    #[test]
    fn mord_rank_and_membership() {
        for p in [2u64, 3] {
            let r = ring(p, 4);
            let h = build_mord(r.clone());
            assert_eq!(h.rank(), 8, "p={p}");
            assert!(h.is_closed());

            let emb = UnramifiedEmbedding::new(2, r.clone());
            let zero = Mat::zero(r.clone(), 2, 2);
            let e21 = Mat::unit(r.clone(), 2, 1, 0, 1);
            let lower = emb.embed(&e21, &zero);
            assert!(
                h.contains(&lower.scale(p)),
                "p*E21 block must lie in the span"
            );
            assert!(!h.contains(&lower), "E21 block must not lie in the span");
        }
    }

    #[test]
    fn mord_residual_dimension_is_five() {
        for p in [2u64, 3] {
            let h = build_mord(ring(p, 4));
            assert_eq!(h.residual_generators().len(), 5, "p={p}");
        }
    }

    #[test]
    fn mord_spin_of_lower_basis_vector_is_full() {
        let h = build_mord(ring(2, 4));
        let res = h.residual_generators();
        let s = spin(&res, &[0, 0, 1, 0]);
        assert!(s.is_full());
    }

    #[test]
    fn residual_preimage_shapes() {
        let r = ring(2, 4);
        let res_ring = ring(2, 1);
        // Full M_3(F_2) -> maximal order.
        let mut full = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                full.push(Mat::unit(res_ring.clone(), 3, i, j, 1));
            }
        }
        let h = build_residual_preimage(r.clone(), 3, &full).unwrap();
        assert!(h.span_eq(&build_maximal(r.clone(), 3)));

        // Scalars -> O*I + p M_3(O), rank 1 + ... = 9 at precision >= 2.
        let h =
            build_residual_preimage(r.clone(), 3, &[Mat::identity(res_ring.clone(), 3)]).unwrap();
        assert_eq!(h.rank(), 9);
        assert_eq!(h.residual_generators().len(), 1);

        // Upper-left corner shape (a, b; 0, C) in M_3: residual dimension 7.
        let mut shape = vec![Mat::unit(res_ring.clone(), 3, 0, 0, 1)];
        for j in 1..3 {
            shape.push(Mat::unit(res_ring.clone(), 3, 0, j, 1));
        }
        for i in 1..3 {
            for j in 1..3 {
                shape.push(Mat::unit(res_ring.clone(), 3, i, j, 1));
            }
        }
        let h = build_residual_preimage(r, 3, &shape).unwrap();
        assert_eq!(h.residual_generators().len(), 7);
    }

    #[test]
    fn residual_preimage_rejects_non_unital() {
        let r = ring(2, 3);
        let res_ring = ring(2, 1);
        let gens = vec![Mat::unit(res_ring, 2, 0, 0, 1)]; // E11 spans a non-unital algebra in M_2
        assert_eq!(
            build_residual_preimage(r, 2, &gens).unwrap_err(),
            CoreError::NotUnital
        );
    }

    #[test]
    fn block_triangular_basics() {
        let r = ring(2, 2);
        let scalar = LocalOrder::close(r.clone(), 1, &[]).unwrap();
        // Two scalar components, depth = M: off-diagonal vanishes.
        let h = build_block_triangular(&[scalar.clone(), scalar.clone()], &[0, 0], 2).unwrap();
        assert_eq!(h.rank(), 2);
        // One component: the component itself.
        let single = build_block_triangular(std::slice::from_ref(&scalar), &[0], 1).unwrap();
        assert!(single.span_eq(&scalar));
        // Exponent at precision limit errors out.
        let err = build_block_triangular(&[scalar.clone(), scalar], &[0, 2], 1).unwrap_err();
        assert!(matches!(err, CoreError::Resource { .. }));
    }

    #[test]
    fn block_triangular_invariant_count_matches_oracle() {
        // Two scalar components in M_2 at depth 1, p = 2, window mod 2.
        let r = ring(2, 2);
        let scalar = LocalOrder::close(r.clone(), 1, &[]).unwrap();
        let h = build_block_triangular(&[scalar.clone(), scalar], &[0, 0], 1).unwrap();
        let w = h.truncated(1).unwrap();
        let inv = invariant_submodules(w.basis(), 4096).unwrap();
        let brute: Vec<_> = crate::lattice::all_submodules(w.ring(), 2, 4096)
            .unwrap()
            .into_iter()
            .filter(|s| crate::lattice::is_invariant(w.basis(), s))
            .collect();
        assert_eq!(inv, brute);
        // At window mod 2 the depth-1 coupling vanishes: diagonal algebra.
        assert_eq!(inv.len(), 4); // zero, span(e1), span(e2), full

        // Depth 0 keeps the coupling: upper-triangular residual.
        let scalar = LocalOrder::close(r.clone(), 1, &[]).unwrap();
        let h0 = build_block_triangular(&[scalar.clone(), scalar], &[0, 0], 0).unwrap();
        let w0 = h0.truncated(1).unwrap();
        let inv0 = invariant_submodules(w0.basis(), 4096).unwrap();
        let brute0: Vec<_> = crate::lattice::all_submodules(w0.ring(), 2, 4096)
            .unwrap()
            .into_iter()
            .filter(|s| crate::lattice::is_invariant(w0.basis(), s))
            .collect();
        assert_eq!(inv0, brute0);
        assert_eq!(inv0.len(), 3); // zero, span(e1), full
    }

    #[test]
    fn deep_lift_cases() {
        let r = ring(2, 4);
        // depth 0 absorbs everything.
        let h = build_mord(r.clone());
        let lifted = deep_lift(&h, 0).unwrap();
        assert!(lifted.span_eq(&build_maximal(r.clone(), 4)));

        // The full residual preimage already contains p M_n(O).
        let res_ring = ring(2, 1);
        let mut shape = vec![Mat::unit(res_ring.clone(), 3, 0, 0, 1)];
        for j in 1..3 {
            shape.push(Mat::unit(res_ring.clone(), 3, 0, j, 1));
        }
        for i in 1..3 {
            for j in 1..3 {
                shape.push(Mat::unit(res_ring.clone(), 3, i, j, 1));
            }
        }
        let pre = build_residual_preimage(r, 3, &shape).unwrap();
        assert!(deep_lift(&pre, 1).unwrap().span_eq(&pre));

        // At precision M = 2, lifting at depth 2 adds nothing.
        let r2 = ring(2, 2);
        let scalar = LocalOrder::close(r2.clone(), 1, &[]).unwrap();
        let block = build_block_triangular(&[scalar.clone(), scalar], &[0, 0], 2).unwrap();
        assert!(deep_lift(&block, 2).unwrap().span_eq(&block));
    }

    #[test]
    fn deep_lift_preserves_residual() {
        let r = ring(2, 4);
        let h = build_mord(r);
        for depth in 1..=3 {
            let lifted = deep_lift(&h, depth).unwrap();
            assert_eq!(lifted.residual_generators(), h.residual_generators());
        }
    }

    #[test]
    fn certificate_maximal_and_scalar() {
        let r = ring(2, 4);
        let maximal = build_maximal(r.clone(), 3);
        assert!(primitivity_certificate(&maximal, 0, 4096).unwrap().verified);
        assert!(primitivity_certificate(&maximal, 1, 4096).unwrap().verified);

        let scalar = LocalOrder::close(r, 3, &[]).unwrap();
        for depth in [0, 1] {
            let cert = primitivity_certificate(&scalar, depth, 4096).unwrap();
            assert!(!cert.verified);
            assert_eq!(cert.failing_vector, Some(vec![1, 0, 0]));
        }
    }

    #[test]
    fn certificate_mord_depth_one() {
        let h = build_mord(ring(2, 4));
        let cert = primitivity_certificate(&h, 1, 4096).unwrap();
        assert!(cert.verified);
    }

    #[test]
    fn certificate_cap_exceeded() {
        let h = build_maximal(ring(3, 4), 4);
        let err = primitivity_certificate(&h, 1, 4096).unwrap_err();
        assert!(matches!(err, CoreError::Resource { needed: 6561, .. }));
    }
}
