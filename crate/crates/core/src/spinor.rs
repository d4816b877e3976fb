//! Local spinor images as subsets of `Z/nZ`.
//!
//! The image of an order is computed through its invariant lattices: the set
//! of colength classes of all invariant lattices in a window, escalating the
//! window depth until a primitivity certificate holds or the class set
//! stabilizes between consecutive depths. Uncertified results are first-class
//! values with explicit flags, never silently presented as complete.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::CoreError;
use crate::lattice::invariant_submodules;
use crate::order::{primitivity_certificate, LocalOrder};

/// A subgroup of `Z/nZ`, canonically `d Z/nZ` for a divisor `d` of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubgroupZn {
    modulus: u64,
    generator: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl SubgroupZn {
    /// Subgroup generated by arbitrary elements.
    pub fn generated_by(modulus: u64, elements: impl IntoIterator<Item = u64>) -> Self {
        let mut g = modulus;
        for e in elements {
            g = gcd(g, e % modulus);
        }
        SubgroupZn {
            modulus,
            generator: g,
        }
    }

    pub fn trivial(modulus: u64) -> Self {
        SubgroupZn {
            modulus,
            generator: modulus,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Canonical generator `d` with the subgroup equal to `d Z/nZ`; `d = n`
    /// for the trivial subgroup.
    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn order(&self) -> u64 {
        self.modulus / self.generator
    }

    pub fn contains(&self, x: u64) -> bool {
        (x % self.modulus).is_multiple_of(self.generator)
    }

    pub fn elements(&self) -> Vec<u64> {
        (0..self.modulus)
            .step_by(self.generator.max(1) as usize)
            .collect()
    }
}

/// Subset of `Z/nZ` containing 0: the local spinor image in distance
/// classes, with provenance flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinorImage {
    modulus: u64,
    classes: BTreeSet<u64>,
    /// A primitivity certificate held at `depth`.
    pub certified: bool,
    /// Classes agreed between depths `depth - 1` and `depth`.
    pub stabilized: bool,
    /// Window depth of the reported classes.
    pub depth: u32,
}

impl SpinorImage {
    pub fn from_classes(
        modulus: u64,
        classes: impl IntoIterator<Item = u64>,
        certified: bool,
        stabilized: bool,
        depth: u32,
    ) -> Self {
        let mut set: BTreeSet<u64> = classes.into_iter().map(|c| c % modulus).collect();
        set.insert(0);
        SpinorImage {
            modulus,
            classes: set,
            certified,
            stabilized,
            depth,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn classes(&self) -> &BTreeSet<u64> {
        &self.classes
    }

    pub fn class_vec(&self) -> Vec<u64> {
        self.classes.iter().copied().collect()
    }

    /// Closed under addition mod n. For a finite set containing 0 this is
    /// the full subgroup condition.
    pub fn is_group(&self) -> bool {
        for &a in &self.classes {
            for &b in &self.classes {
                if !self.classes.contains(&((a + b) % self.modulus)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn generated_subgroup(&self) -> SubgroupZn {
        SubgroupZn::generated_by(self.modulus, self.classes.iter().copied())
    }

    /// `{ d : d + classes = classes }`, always a subgroup.
    pub fn translation_stabilizer(&self) -> SubgroupZn {
        let stab: Vec<u64> = (0..self.modulus)
            .filter(|&d| {
                self.classes
                    .iter()
                    .all(|&c| self.classes.contains(&((c + d) % self.modulus)))
            })
            .collect();
        SubgroupZn::generated_by(self.modulus, stab)
    }

    pub fn sumset(&self, other: &SpinorImage) -> Result<SpinorImage, CoreError> {
        if self.modulus != other.modulus {
            return Err(CoreError::DimensionMismatch {
                expected: format!("class modulus {}", self.modulus),
                found: format!("{}", other.modulus),
            });
        }
        let mut classes = BTreeSet::new();
        for &a in &self.classes {
            for &b in &other.classes {
                classes.insert((a + b) % self.modulus);
            }
        }
        Ok(SpinorImage {
            modulus: self.modulus,
            classes,
            certified: self.certified && other.certified,
            stabilized: self.stabilized && other.stabilized,
            depth: self.depth.max(other.depth),
        })
    }

    /// Preimage of the class set under `Z/mZ -> Z/nZ` for `n | m`: how a
    /// component image sits inside the composite algebra's classes.
    pub fn lift_to(&self, modulus: u64) -> Result<SpinorImage, CoreError> {
        if !modulus.is_multiple_of(self.modulus) {
            return Err(CoreError::DimensionMismatch {
                expected: format!("a multiple of {}", self.modulus),
                found: format!("{modulus}"),
            });
        }
        let mut classes = BTreeSet::new();
        for &c in &self.classes {
            let mut x = c;
            while x < modulus {
                classes.insert(x);
                x += self.modulus;
            }
        }
        Ok(SpinorImage {
            modulus,
            classes,
            certified: self.certified,
            stabilized: self.stabilized,
            depth: self.depth,
        })
    }

    pub fn negated(&self) -> SpinorImage {
        let classes = self
            .classes
            .iter()
            .map(|&c| (self.modulus - c) % self.modulus)
            .collect();
        SpinorImage {
            classes,
            ..self.clone()
        }
    }
}

/// Knobs for the image computation.
#[derive(Debug, Clone)]
pub struct SpinorOptions {
    /// Deepest window to enumerate (schedule is 1, 2, ..., max_depth).
    pub max_depth: u32,
    /// Enumeration cap on ambient vector counts.
    pub cap: u64,
}

impl Default for SpinorOptions {
    fn default() -> Self {
        SpinorOptions {
            max_depth: 3,
            cap: 4096,
        }
    }
}

fn window_vectors(h: &LocalOrder, depth: u32) -> u128 {
    (h.ring().p() as u128).pow(depth * h.n() as u32)
}

/// Colength classes of all invariant lattices, with depth escalation.
///
/// At each depth the full invariant lattice set is enumerated and a
/// primitivity certificate is attempted; a verified certificate ends the
/// escalation with a certified image. Otherwise the class sets of
/// consecutive depths are compared and equality is reported as (heuristic)
/// stabilization. Results that are neither certified nor stabilized keep
/// both flags down.
pub fn spinor_image(h: &LocalOrder, opts: &SpinorOptions) -> Result<SpinorImage, CoreError> {
    let n = h.n() as u64;
    let ring = h.ring();
    let mut prev: Option<BTreeSet<u64>> = None;
    let mut last: Option<(BTreeSet<u64>, u32)> = None;

    for depth in 1..=opts.max_depth.min(ring.precision()) {
        if window_vectors(h, depth) > opts.cap as u128 {
            if last.is_none() {
                return Err(CoreError::Resource {
                    cap: opts.cap,
                    needed: window_vectors(h, depth).min(u64::MAX as u128) as u64,
                    what: "window vector enumeration",
                });
            }
            break;
        }
        let window = h.truncated(depth)?;
        let lattices = match invariant_submodules(window.basis(), opts.cap) {
            Ok(l) => l,
            Err(CoreError::Resource { .. }) if last.is_some() => break,
            Err(e) => return Err(e),
        };
        let classes: BTreeSet<u64> = lattices.iter().map(|l| l.colength_class().value).collect();
        if let Some(p) = &prev {
            debug_assert!(classes.is_superset(p), "image must grow with depth");
        }

        // Monotonicity makes a full class set final regardless of depth.
        if classes.len() as u64 == n {
            return Ok(SpinorImage::from_classes(n, classes, false, true, depth));
        }
        if prev.as_ref() == Some(&classes) {
            return Ok(SpinorImage::from_classes(n, classes, false, true, depth));
        }
        let cert_feasible =
            depth < ring.precision() && window_vectors(h, depth + 1) <= opts.cap as u128;
        if cert_feasible && primitivity_certificate(h, depth, opts.cap)?.verified {
            return Ok(SpinorImage::from_classes(n, classes, true, true, depth));
        }
        prev = Some(classes.clone());
        last = Some((classes, depth));
    }

    let (classes, depth) = last.expect("depth schedule is nonempty");
    Ok(SpinorImage::from_classes(n, classes, false, false, depth))
}

/// Definedness bundle for a local order.
#[derive(Debug, Clone)]
pub struct LocalDefinedReport {
    pub n: usize,
    pub image: SpinorImage,
    pub defined: bool,
    pub generated: SubgroupZn,
    pub stabilizer: SubgroupZn,
}

pub fn local_defined(
    h: &LocalOrder,
    opts: &SpinorOptions,
) -> Result<LocalDefinedReport, CoreError> {
    let image = spinor_image(h, opts)?;
    let defined = image.is_group();
    let generated = image.generated_subgroup();
    let stabilizer = image.translation_stabilizer();
    // The three definedness readings agree: the image is a group iff it
    // equals its generated subgroup iff generator and stabilizer coincide.
    debug_assert_eq!(defined, generated.generator() == stabilizer.generator());
    debug_assert_eq!(defined, image.class_vec() == generated.elements());
    Ok(LocalDefinedReport {
        n: h.n(),
        image,
        defined,
        generated,
        stabilizer,
    })
}

/// JSON report with a fixed field set and ordering.
#[derive(Debug, Clone, Serialize)]
pub struct ImageReport {
    pub n: u64,
    pub modulus: u64,
    pub classes: Vec<u64>,
    pub is_group: bool,
    pub generated: Vec<u64>,
    pub stabilizer: Vec<u64>,
    pub certified: bool,
    pub depth: u32,
}

impl LocalDefinedReport {
    pub fn to_report(&self) -> ImageReport {
        ImageReport {
            n: self.n as u64,
            modulus: self.image.modulus(),
            classes: self.image.class_vec(),
            is_group: self.defined,
            generated: self.generated.elements(),
            stabilizer: self.stabilizer.elements(),
            certified: self.image.certified,
            depth: self.image.depth,
        }
    }
}
