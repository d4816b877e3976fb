//! Residual algebras mod `p` and the dimensions of their irreducible
//! representations.
//!
//! The chopper splits a module over a finite-dimensional `F_q`-algebra into
//! composition factors: random algebra elements supply singular operators
//! through irreducible factors of relative minimal polynomials, kernel
//! vectors are spun to find proper submodules, and a Norton-style two-sided
//! spin check certifies irreducibility when the nullity is minimal. All
//! randomness is seeded, so runs are reproducible.

use std::collections::BTreeSet;

use crate::error::CoreError;
use crate::fq::{self, right_kernel, rref, scalar_extend, Fq};
use crate::lattice;
use crate::mat::Mat;
use crate::order::LocalOrder;
use crate::poly::{self, eval_at_matrix, irreducible_factor, min_poly_rel};
use crate::ring::{ModulusRing, Ring};
use crate::rng::SplitMix64;

/// A unital, multiplicatively closed matrix algebra over `F_q`, presented by
/// a canonical echelon basis of its flattened span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualAlgebra {
    field: Fq,
    n: usize,
    basis: Vec<Mat<Fq>>,
}

impl ResidualAlgebra {
    /// Image of a local order in `M_n(F_p)`: generators reduced mod `p`.
    pub fn from_order(h: &LocalOrder) -> Self {
        let field = Fq::prime(h.ring().p()).expect("order ring has prime base");
        let basis = h
            .residual_generators()
            .iter()
            .map(|m| m.map_ring(field.clone(), |x| x))
            .collect();
        ResidualAlgebra {
            field,
            n: h.n(),
            basis,
        }
    }

    /// Validates that `gens` span a unital, multiplicatively closed algebra.
    pub fn from_basis(field: Fq, n: usize, gens: &[Mat<Fq>]) -> Result<Self, CoreError> {
        let rows: Vec<Vec<u64>> = gens.iter().map(|g| g.flatten_row()).collect();
        let span = rref(&Mat::from_rows(field.clone(), n * n, &rows));
        let id = Mat::identity(field.clone(), n).flatten_row();
        if !fq::span_contains(&span, &id) {
            return Err(CoreError::NotUnital);
        }
        let basis: Vec<Mat<Fq>> = (0..span.rows())
            .map(|i| Mat::from_flat(field.clone(), n, span.row(i)))
            .collect();
        for a in &basis {
            for b in &basis {
                if !fq::span_contains(&span, &a.mul(b).flatten_row()) {
                    return Err(CoreError::Config(
                        "generators do not span a multiplicatively closed algebra".into(),
                    ));
                }
            }
        }
        Ok(ResidualAlgebra { field, n, basis })
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn ambient_size(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Mat<Fq>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The same algebra with scalars extended to `F_{q^d}`.
    pub fn scalar_extended(&self, d: u32) -> Result<ResidualAlgebra, CoreError> {
        if d == 1 {
            return Ok(self.clone());
        }
        let extended = scalar_extend(&self.basis, d)?;
        let field = extended[0].ring().clone();
        // The embedded basis stays independent and closed; recanonicalize.
        ResidualAlgebra::from_basis(field, self.n, &extended)
    }

    /// The natural module `F_q^n` with the basis matrices acting.
    pub fn natural_module(&self) -> Module {
        Module {
            field: self.field.clone(),
            dim: self.n,
            actions: self.basis.clone(),
        }
    }

    /// The left regular module: the algebra acting on itself.
    pub fn regular_module(&self) -> Module {
        let k = self.dim();
        let span_rows: Vec<Vec<u64>> = self.basis.iter().map(|b| b.flatten_row()).collect();
        let span = Mat::from_rows(self.field.clone(), self.n * self.n, &span_rows);
        let pivots: Vec<usize> = (0..span.rows())
            .map(|i| span.row(i).iter().position(|&x| x != 0).unwrap())
            .collect();
        let coords = |v: &[u64]| -> Vec<u64> {
            // The basis is in echelon form with unit pivots, so coordinates
            // are read off at the pivot columns.
            pivots.iter().map(|&c| v[c]).collect()
        };
        let mut actions = Vec::with_capacity(k);
        for a in &self.basis {
            let mut act = Mat::zero(self.field.clone(), k, k);
            for (j, b) in self.basis.iter().enumerate() {
                let prod = a.mul(b).flatten_row();
                debug_assert!(fq::span_contains(&rref(&span), &prod));
                for (i, c) in coords(&prod).iter().enumerate() {
                    act.set(i, j, *c);
                }
            }
            actions.push(act);
        }
        Module {
            field: self.field.clone(),
            dim: k,
            actions,
        }
    }
}

/// A finite-dimensional module over an algebra, given by the acting images
/// of a fixed list of algebra basis elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Module {
    field: Fq,
    dim: usize,
    actions: Vec<Mat<Fq>>,
}

impl Module {
    pub fn new(field: Fq, dim: usize, actions: Vec<Mat<Fq>>) -> Self {
        debug_assert!(actions.iter().all(|a| a.rows() == dim && a.cols() == dim));
        Module {
            field,
            dim,
            actions,
        }
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn actions(&self) -> &[Mat<Fq>] {
        &self.actions
    }

    /// Smallest invariant subspace containing `v`, as an rref basis.
    pub fn spin(&self, v: &[u64]) -> Mat<Fq> {
        let mut basis = rref(&Mat::from_rows(self.field.clone(), self.dim, &[v.to_vec()]));
        loop {
            let mut new_rows = Vec::new();
            for a in &self.actions {
                for i in 0..basis.rows() {
                    let w = a.apply(basis.row(i));
                    if !fq::span_contains(&basis, &w) {
                        new_rows.push(w);
                    }
                }
            }
            if new_rows.is_empty() {
                return basis;
            }
            let mut rows: Vec<Vec<u64>> =
                (0..basis.rows()).map(|i| basis.row(i).to_vec()).collect();
            rows.append(&mut new_rows);
            basis = rref(&Mat::from_rows(self.field.clone(), self.dim, &rows));
        }
    }

    /// Module structure on an invariant subspace (rref basis rows).
    fn restricted(&self, basis: &Mat<Fq>) -> Module {
        let w = basis.rows();
        let pivots: Vec<usize> = (0..w)
            .map(|i| basis.row(i).iter().position(|&x| x != 0).unwrap())
            .collect();
        let mut actions = Vec::with_capacity(self.actions.len());
        for a in &self.actions {
            let mut act = Mat::zero(self.field.clone(), w, w);
            for j in 0..w {
                let img = a.apply(basis.row(j));
                debug_assert!(fq::span_contains(basis, &img), "subspace not invariant");
                // Coordinates read at pivot columns of the rref basis.
                for (i, &c) in pivots.iter().enumerate() {
                    act.set(i, j, img[c]);
                }
            }
            actions.push(act);
        }
        Module {
            field: self.field.clone(),
            dim: w,
            actions,
        }
    }

    /// Module structure on the quotient by an invariant subspace.
    fn quotient(&self, basis: &Mat<Fq>) -> Module {
        let pivot_set: BTreeSet<usize> = (0..basis.rows())
            .map(|i| basis.row(i).iter().position(|&x| x != 0).unwrap())
            .collect();
        let free: Vec<usize> = (0..self.dim).filter(|c| !pivot_set.contains(c)).collect();
        let q = free.len();
        let mut actions = Vec::with_capacity(self.actions.len());
        for a in &self.actions {
            let mut act = Mat::zero(self.field.clone(), q, q);
            for (j, &cj) in free.iter().enumerate() {
                let mut e = vec![0u64; self.dim];
                e[cj] = 1;
                let img = fq::reduce_vector(basis, &a.apply(&e));
                for (i, &ci) in free.iter().enumerate() {
                    act.set(i, j, img[ci]);
                }
            }
            actions.push(act);
        }
        Module {
            field: self.field.clone(),
            dim: q,
            actions,
        }
    }

    fn transposed(&self) -> Module {
        Module {
            field: self.field.clone(),
            dim: self.dim,
            actions: self.actions.iter().map(|a| a.transpose()).collect(),
        }
    }
}

/// One composition factor, with isomorphic occurrences merged.
#[derive(Debug, Clone)]
pub struct Factor {
    pub module: Module,
    pub multiplicity: usize,
}

impl Factor {
    pub fn dim(&self) -> usize {
        self.module.dim()
    }
}

/// Whether two modules over the same indexed algebra basis are isomorphic:
/// solves the intertwiner system `X g_i = h_i X` and checks a solution is
/// invertible. For irreducible modules any nonzero solution is invertible.
pub fn modules_isomorphic(a: &Module, b: &Module) -> bool {
    if a.dim() != b.dim() || a.field() != b.field() || a.actions.len() != b.actions.len() {
        return false;
    }
    let field = a.field().clone();
    let d = a.dim();
    if d == 0 {
        return true;
    }
    // Unknown X (d x d), row-major; equations h X - X g = 0 per action pair.
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for (g, h) in a.actions.iter().zip(&b.actions) {
        for r in 0..d {
            for c in 0..d {
                let mut eq = vec![0u64; d * d];
                for k in 0..d {
                    // h[r,k] X[k,c]
                    let idx = k * d + c;
                    eq[idx] = field.add(eq[idx], h.get(r, k));
                    // - X[r,k] g[k,c]
                    let idx = r * d + k;
                    eq[idx] = field.sub(eq[idx], g.get(k, c));
                }
                rows.push(eq);
            }
        }
    }
    let system = Mat::from_rows(field.clone(), d * d, &rows);
    let kernel = right_kernel(&system);
    for i in 0..kernel.rows() {
        let x = Mat::from_codes(field.clone(), d, d, kernel.row(i).to_vec());
        if fq::rank(&x) == d {
            return true;
        }
    }
    // Between irreducibles a nonzero intertwiner is invertible, so reaching
    // here with a nonzero kernel would mean the inputs were not irreducible.
    debug_assert_eq!(kernel.rows(), 0, "nonzero non-invertible intertwiner");
    false
}

const CHOP_ATTEMPTS: usize = 2000;

/// Composition factors of `module`, isomorphic factors merged, deterministic
/// for a fixed seed.
pub fn chop(module: &Module, seed: u64) -> Vec<Factor> {
    let mut rng = SplitMix64::new(seed);
    let mut leaves: Vec<Module> = Vec::new();
    chop_rec(module.clone(), &mut rng, &mut leaves);
    let mut factors: Vec<Factor> = Vec::new();
    for leaf in leaves {
        if let Some(f) = factors
            .iter_mut()
            .find(|f| modules_isomorphic(&f.module, &leaf))
        {
            f.multiplicity += 1;
        } else {
            factors.push(Factor {
                module: leaf,
                multiplicity: 1,
            });
        }
    }
    factors.sort_by_key(|f| f.dim());
    factors
}

fn chop_rec(module: Module, rng: &mut SplitMix64, out: &mut Vec<Module>) {
    if module.dim() == 0 {
        return;
    }
    if module.dim() == 1 {
        out.push(module);
        return;
    }
    match find_split_or_certify(&module, rng) {
        Some(sub_basis) => {
            let sub = module.restricted(&sub_basis);
            let quot = module.quotient(&sub_basis);
            chop_rec(sub, rng, out);
            chop_rec(quot, rng, out);
        }
        None => out.push(module), // certified irreducible
    }
}

/// Random search: returns a proper invariant subspace basis, or `None` once
/// irreducibility is certified.
fn find_split_or_certify(module: &Module, rng: &mut SplitMix64) -> Option<Mat<Fq>> {
    let field = module.field().clone();
    let d = module.dim();
    let q = field.card();
    for attempt in 0..CHOP_ATTEMPTS {
        // Random algebra element: combination of the actions, with an
        // occasional product term to escape thin spans.
        let mut theta = Mat::zero(field.clone(), d, d);
        for a in &module.actions {
            let c = rng.below(q);
            if c != 0 {
                theta = theta.add(&a.scale(c));
            }
        }
        if attempt % 3 == 2 && module.actions.len() >= 2 {
            let i = rng.below(module.actions.len() as u64) as usize;
            let j = rng.below(module.actions.len() as u64) as usize;
            theta = theta.add(&module.actions[i].mul(&module.actions[j]));
        }

        let v0: Vec<u64> = (0..d).map(|_| rng.below(q)).collect();
        if v0.iter().all(|&x| x == 0) {
            continue;
        }
        let mp = min_poly_rel(&theta, &v0);
        if poly::deg(&mp).unwrap_or(0) == 0 {
            continue;
        }
        let f = irreducible_factor(&field, &mp, rng);
        let f_theta = eval_at_matrix(&field, &f, &theta);
        let kernel = right_kernel(&f_theta);
        if kernel.rows() == 0 {
            continue;
        }
        let mut all_full = true;
        for i in 0..kernel.rows() {
            let w = module.spin(kernel.row(i));
            if w.rows() < d {
                return Some(w);
            }
            if w.rows() != d {
                all_full = false;
            }
        }
        // Norton-style certificate: minimal nullity means the kernel is one
        // line over F_q[x]/(f), so the spins above cover every kernel vector;
        // one dual spin then covers the transpose side.
        if all_full && kernel.rows() == poly::deg(&f).unwrap() {
            let dual = module.transposed();
            let f_theta_t = f_theta.transpose();
            let dual_kernel = right_kernel(&f_theta_t);
            debug_assert_eq!(dual_kernel.rows(), kernel.rows());
            let w = dual.spin(dual_kernel.row(0));
            if w.rows() == d {
                return None; // irreducible, certified
            }
            // The dual submodule's annihilator is a proper submodule.
            let ann = right_kernel(&w);
            let ann_rows: Vec<Vec<u64>> = (0..ann.rows()).map(|i| ann.row(i).to_vec()).collect();
            let ann_basis = rref(&Mat::from_rows(field.clone(), d, &ann_rows));
            debug_assert!(ann_basis.rows() > 0 && ann_basis.rows() < d);
            return Some(ann_basis);
        }
    }
    panic!(
        "chop failed to split or certify a {d}-dimensional module after {CHOP_ATTEMPTS} attempts"
    );
}

/// JSON report for a residual profile, with fixed field order.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ProfileReport {
    pub n: u64,
    pub p: u64,
    pub ext_degree: u32,
    pub dims: Vec<usize>,
    pub t: usize,
    pub uniform: bool,
}

/// Distinct-irreducible dimension data of a local order's residual algebra
/// after scalar extension: the t-invariant input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrreducibleProfile {
    /// Dimensions of the distinct irreducible representations (a multiset:
    /// non-isomorphic irreducibles of equal dimension repeat).
    pub dims: Vec<usize>,
    /// gcd of `dims`.
    pub t: usize,
    /// Whether all irreducibles share one dimension.
    pub uniform: bool,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl IrreducibleProfile {
    pub fn from_dims(mut dims: Vec<usize>) -> Self {
        dims.sort_unstable();
        let t = dims.iter().copied().fold(0, gcd);
        let uniform = dims.windows(2).all(|w| w[0] == w[1]);
        IrreducibleProfile { dims, t, uniform }
    }
}

/// Chops the regular module of the (scalar-extended) residual algebra and
/// collects the distinct irreducible dimensions.
pub fn irreducible_profile(
    h: &LocalOrder,
    ext_degree: u32,
    seed: u64,
) -> Result<IrreducibleProfile, CoreError> {
    if ext_degree < 1 {
        return Err(CoreError::Config("extension degree must be >= 1".into()));
    }
    let algebra = ResidualAlgebra::from_order(h).scalar_extended(ext_degree)?;
    let regular = algebra.regular_module();
    if regular.dim() > 64 {
        return Err(CoreError::Resource {
            cap: 64,
            needed: regular.dim() as u64,
            what: "regular module dimension",
        });
    }
    let factors = chop(&regular, seed);
    Ok(IrreducibleProfile::from_dims(
        factors.iter().map(|f| f.dim()).collect(),
    ))
}

/// Independent oracle: Jordan–Hölder dimension multiset of a module over a
/// prime field, read off a maximal chain of the exhaustively enumerated
/// invariant-subspace lattice. Usable only for prime fields and small
/// modules, which is exactly the oracle regime.
pub fn composition_dims_by_lattice(module: &Module, cap: u64) -> Result<Vec<usize>, CoreError> {
    let field = module.field();
    if field.deg() != 1 {
        return Err(CoreError::Config(
            "lattice oracle requires a prime field".into(),
        ));
    }
    let ring = ModulusRing::new(field.p(), 1)?;
    let actions: Vec<Mat<ModulusRing>> = module
        .actions()
        .iter()
        .map(|a| a.map_ring(ring.clone(), |x| x))
        .collect();
    let mut lat = lattice::invariant_submodules(&actions, cap)?;
    lat.sort_by_key(|s| s.size());
    let log_p = |s: &lattice::Submodule| -> u32 {
        let mut k = 0u32;
        let mut size = s.size();
        while size > 1 {
            size /= field.p() as u128;
            k += 1;
        }
        k
    };
    let mut dims = Vec::new();
    let mut current = lat
        .last()
        .expect("lattice contains the full module")
        .clone();
    while !current.is_zero() {
        let next = lat
            .iter()
            .filter(|s| s.size() < current.size() && current.contains(s))
            .max_by_key(|s| s.size())
            .expect("zero module is below everything")
            .clone();
        dims.push((log_p(&current) - log_p(&next)) as usize);
        current = next;
    }
    dims.sort_unstable();
    Ok(dims)
}
