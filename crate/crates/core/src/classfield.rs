//! Abstract global layer: a finite abelian group standing for the Galois
//! group of the spinor class field, per-place Frobenius elements, and
//! per-place class data. Global fields are never constructed; scenarios
//! verify the Galois-side computation, which is the checkable content.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::CoreError;
use crate::spinor::SpinorImage;

pub type GroupElem = Vec<u64>;

/// Finite abelian group in invariant-factor form `Z/d1 x ... x Z/dr` with
/// `d1 | d2 | ... | dr`; elements are residue tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

const MAX_GROUP_ORDER: u64 = 1 << 16;

impl AbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self, CoreError> {
        if factors.is_empty() {
            return Err(CoreError::Config(
                "group needs at least one invariant factor".into(),
            ));
        }
        if factors.contains(&0) {
            return Err(CoreError::Config("invariant factors must be >= 1".into()));
        }
        for w in factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(CoreError::Config(format!(
                    "invariant factors must divide in order: {} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        let order: u64 = factors.iter().product();
        if order > MAX_GROUP_ORDER {
            return Err(CoreError::Resource {
                cap: MAX_GROUP_ORDER,
                needed: order,
                what: "abelian group order",
            });
        }
        Ok(AbelianGroup { factors })
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn zero(&self) -> GroupElem {
        vec![0; self.factors.len()]
    }

    pub fn reduce(&self, raw: &[i64]) -> Result<GroupElem, CoreError> {
        if raw.len() != self.factors.len() {
            return Err(CoreError::DimensionMismatch {
                expected: format!("{} components", self.factors.len()),
                found: format!("{}", raw.len()),
            });
        }
        Ok(raw
            .iter()
            .zip(&self.factors)
            .map(|(&x, &d)| (((x % d as i64) + d as i64) % d as i64) as u64)
            .collect())
    }

    pub fn add(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        a.iter()
            .zip(b)
            .zip(&self.factors)
            .map(|((&x, &y), &d)| (x + y) % d)
            .collect()
    }

    pub fn neg(&self, a: &GroupElem) -> GroupElem {
        a.iter()
            .zip(&self.factors)
            .map(|(&x, &d)| (d - x % d) % d)
            .collect()
    }

    pub fn scalar_mul(&self, k: u64, a: &GroupElem) -> GroupElem {
        a.iter()
            .zip(&self.factors)
            .map(|(&x, &d)| (x % d).wrapping_mul(k % d) % d)
            .collect()
    }

    pub fn elements(&self) -> Vec<GroupElem> {
        let mut out = vec![self.zero()];
        for (i, &d) in self.factors.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for v in 0..d {
                    let mut e2 = e.clone();
                    e2[i] = v;
                    next.push(e2);
                }
            }
            out = next;
        }
        out
    }

    /// Closure of a generating set under addition: the generated subgroup.
    pub fn subgroup_closure(&self, gens: &[GroupElem]) -> BTreeSet<GroupElem> {
        let mut set: BTreeSet<GroupElem> = BTreeSet::new();
        set.insert(self.zero());
        let mut queue: Vec<GroupElem> = vec![self.zero()];
        while let Some(x) = queue.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if set.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        set
    }

    /// Invariant factors (> 1, ascending divisibility) of the quotient by the
    /// subgroup generated by `gens`, via Smith normal form of the relation
    /// matrix.
    pub fn quotient_invariants(&self, gens: &[GroupElem]) -> Vec<u64> {
        let r = self.factors.len();
        let mut rows: Vec<Vec<i64>> = Vec::with_capacity(r + gens.len());
        for (i, &d) in self.factors.iter().enumerate() {
            let mut row = vec![0i64; r];
            row[i] = d as i64;
            rows.push(row);
        }
        for g in gens {
            rows.push(g.iter().map(|&x| x as i64).collect());
        }
        let diag = smith_diagonal(rows, r);
        let invariants: Vec<u64> = diag
            .into_iter()
            .map(|d| d.unsigned_abs())
            .filter(|&d| d > 1)
            .collect();
        // |G/T| = product of invariants.
        let t = self.subgroup_closure(gens).len() as u64;
        debug_assert_eq!(invariants.iter().product::<u64>() * t, self.order());
        invariants
    }
}

/// Diagonal of the Smith normal form of an integer matrix with `cols`
/// columns; entries returned in divisibility order.
fn smith_diagonal(mut m: Vec<Vec<i64>>, cols: usize) -> Vec<i64> {
    let rows = m.len();
    let mut diag = Vec::new();
    let mut t = 0usize;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the trailing submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 && pivot.is_none_or(|(pi, pj)| m[i][j].abs() < m[pi][pj].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = false;
        while !clean {
            clean = true;
            for i in (t + 1)..rows {
                let q = m[i][t] / m[t][t];
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    // Remainder smaller than pivot: swap up and restart.
                    m.swap(t, i);
                    clean = false;
                }
            }
            for j in (t + 1)..cols {
                let q = m[t][j] / m[t][t];
                if q != 0 {
                    for row in m.iter_mut() {
                        row[j] -= q * row[t];
                    }
                }
                if m[t][j] != 0 {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    clean = false;
                }
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    while diag.len() < cols {
        diag.push(0);
    }
    // Enforce the divisibility chain d1 | d2 | ... by gcd/lcm fixups.
    for i in 0..diag.len() {
        for j in (i + 1)..diag.len() {
            let (a, b) = (diag[i], diag[j]);
            if a != 0 && (b == 0 || b % a != 0) {
                let g = gcd_i64(a, b);
                let l = if g == 0 { 0 } else { a / g * b };
                diag[i] = g;
                diag[j] = l;
            } else if a == 0 && b != 0 {
                diag[i] = b;
                diag[j] = 0;
            }
        }
    }
    diag
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Per-place data: a Frobenius element and either a class set mod `n` or a
/// bare t-invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlacePayload {
    Classes {
        modulus: u64,
        classes: BTreeSet<u64>,
    },
    TInvariant(u64),
}

impl PlacePayload {
    pub fn from_image(image: &SpinorImage) -> Self {
        PlacePayload::Classes {
            modulus: image.modulus(),
            classes: image.classes().clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub label: String,
    pub frobenius: GroupElem,
    pub payload: PlacePayload,
}

/// A finite abelian stand-in for the Galois group of the spinor class field,
/// with finitely many nontrivial places; omitted places contribute `{0}`.
#[derive(Debug, Clone)]
pub struct GaloisScenario {
    pub group: AbelianGroup,
    /// Ambient algebra degree: class sets must live mod this.
    pub degree: u64,
    pub places: Vec<Place>,
}

impl GaloisScenario {
    pub fn new(group: AbelianGroup, degree: u64, places: Vec<Place>) -> Result<Self, CoreError> {
        if places.is_empty() {
            return Err(CoreError::Config(
                "scenario needs at least one place".into(),
            ));
        }
        for p in &places {
            if p.frobenius.len() != group.rank() {
                return Err(CoreError::Config(format!(
                    "place {}: frobenius has {} components, group rank is {}",
                    p.label,
                    p.frobenius.len(),
                    group.rank()
                )));
            }
            if let PlacePayload::Classes { modulus, .. } = &p.payload {
                if *modulus != degree {
                    return Err(CoreError::Config(format!(
                        "place {}: class modulus {} differs from ambient degree {}",
                        p.label, modulus, degree
                    )));
                }
            }
        }
        Ok(GaloisScenario {
            group,
            degree,
            places,
        })
    }

    fn class_places(&self) -> Result<Vec<(&GroupElem, &BTreeSet<u64>)>, CoreError> {
        self.places
            .iter()
            .map(|p| match &p.payload {
                PlacePayload::Classes { classes, .. } => Ok((&p.frobenius, classes)),
                PlacePayload::TInvariant(_) => Err(CoreError::Config(format!(
                    "place {} carries a t-invariant, not a class set",
                    p.label
                ))),
            })
            .collect()
    }

    /// `T = { sum over places of s * frobenius : s in classes }`.
    pub fn global_image_set(&self) -> Result<BTreeSet<GroupElem>, CoreError> {
        let places = self.class_places()?;
        let mut acc: BTreeSet<GroupElem> = BTreeSet::new();
        acc.insert(self.group.zero());
        for (frob, classes) in places {
            let mut next = BTreeSet::new();
            for t in &acc {
                for &s in classes {
                    next.insert(self.group.add(t, &self.group.scalar_mul(s, frob)));
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// Subgroup generated by the global image set.
    pub fn lower_field_subgroup(&self) -> Result<BTreeSet<GroupElem>, CoreError> {
        let t: Vec<GroupElem> = self.global_image_set()?.into_iter().collect();
        Ok(self.group.subgroup_closure(&t))
    }

    /// Translation stabilizer `{ g : g + T = T }` of the global image set.
    pub fn upper_field_subgroup(&self) -> Result<BTreeSet<GroupElem>, CoreError> {
        let t = self.global_image_set()?;
        let mut stab = BTreeSet::new();
        for g in self.group.elements() {
            if t.iter().all(|x| t.contains(&self.group.add(x, &g))) {
                stab.insert(g);
            }
        }
        Ok(stab)
    }

    /// Subgroup generated by `{ t * frobenius }` when every place carries a
    /// t-invariant; its fixed field is the maximal one whose inertia degrees
    /// divide every `t`.
    pub fn lower_field_from_t(&self) -> Result<BTreeSet<GroupElem>, CoreError> {
        let gens: Vec<GroupElem> = self
            .places
            .iter()
            .map(|p| match &p.payload {
                PlacePayload::TInvariant(t) => Ok(self.group.scalar_mul(*t, &p.frobenius)),
                PlacePayload::Classes { .. } => Err(CoreError::Config(format!(
                    "place {} carries a class set, not a t-invariant",
                    p.label
                ))),
            })
            .collect::<Result<_, _>>()?;
        Ok(self.group.subgroup_closure(&gens))
    }

    pub fn evaluate(&self) -> Result<ScenarioVerdict, CoreError> {
        let image = self.global_image_set()?;
        let lower = self.lower_field_subgroup()?;
        let upper = self.upper_field_subgroup()?;
        let image_is_subgroup = {
            let mut ok = true;
            'outer: for a in &image {
                for b in &image {
                    if !image.contains(&self.group.add(a, b)) {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            ok
        };
        let defined = lower == upper;
        debug_assert_eq!(defined, image_is_subgroup);

        let lower_gens: Vec<GroupElem> = lower.iter().cloned().collect();
        let upper_gens: Vec<GroupElem> = upper.iter().cloned().collect();
        Ok(ScenarioVerdict {
            group: self.group.factors().to_vec(),
            degree: self.degree,
            image: image.into_iter().collect(),
            defined,
            lower_subgroup: lower.into_iter().collect(),
            upper_subgroup: upper.into_iter().collect(),
            lower_field: self.group.quotient_invariants(&lower_gens),
            upper_field: self.group.quotient_invariants(&upper_gens),
        })
    }
}

/// JSON verdict with fixed field order. Fixed fields are reported as the
/// invariant factors of the corresponding quotient group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioVerdict {
    pub group: Vec<u64>,
    pub degree: u64,
    pub image: Vec<GroupElem>,
    pub defined: bool,
    pub lower_subgroup: Vec<GroupElem>,
    pub upper_subgroup: Vec<GroupElem>,
    pub lower_field: Vec<u64>,
    pub upper_field: Vec<u64>,
}
