//! Entry classification of pseudometrics and the reference N=6 skeletons.
//!
//! Canonical bases are unique only up to adding later elements to earlier
//! ones: `P^k + sum_{j>k} d_j P^j` keeps the first-row echelon shape. A
//! reference skeleton is therefore matched either directly or through such a
//! shift, see [`match_skeleton`].

use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::commutant::{HermitianMatrix, PseudometricBasis};
use crate::error::{Error, Result};
use crate::linalg::{least_squares_with_null, RMatrix};

pub const DEFAULT_PATTERN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryClass {
    Zero,
    One,
    Real,
    Imaginary,
    Complex,
}

impl EntryClass {
    pub fn classify(z: Complex64, tol: f64) -> Self {
        if z.norm() <= tol {
            EntryClass::Zero
        } else if (z - 1.0).norm() <= tol {
            EntryClass::One
        } else if z.im.abs() <= tol {
            EntryClass::Real
        } else if z.re.abs() <= tol {
            EntryClass::Imaginary
        } else {
            EntryClass::Complex
        }
    }

    pub fn symbol(self) -> char {
        match self {
            EntryClass::Zero => '.',
            EntryClass::One => '1',
            EntryClass::Real => 'R',
            EntryClass::Imaginary => 'I',
            EntryClass::Complex => 'C',
        }
    }

    pub fn is_zero(self) -> bool {
        self == EntryClass::Zero
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryPattern {
    pub cells: Vec<Vec<EntryClass>>,
    pub tol: f64,
}

impl EntryPattern {
    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize) -> EntryClass {
        self.cells[i][j]
    }

    pub fn rows(&self) -> Vec<String> {
        self.cells
            .iter()
            .map(|r| r.iter().map(|c| c.symbol()).collect())
            .collect()
    }

    pub fn nonzero_mask(&self) -> Vec<Vec<bool>> {
        self.cells
            .iter()
            .map(|r| r.iter().map(|c| !c.is_zero()).collect())
            .collect()
    }
}

impl fmt::Display for EntryPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

pub fn classify_pattern(p: &HermitianMatrix, tol: f64) -> EntryPattern {
    let n = p.dim();
    EntryPattern {
        cells: (0..n)
            .map(|i| (0..n).map(|j| EntryClass::classify(p.get(i, j), tol)).collect())
            .collect(),
        tol,
    }
}

/// One cell of a reference skeleton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RefCell {
    Zero,
    One,
    Real,
    Imaginary,
    /// Nonzero, class not asserted.
    Nonzero,
}

impl RefCell {
    fn parse(c: char) -> Option<Self> {
        Some(match c {
            '.' => RefCell::Zero,
            '1' => RefCell::One,
            'R' => RefCell::Real,
            'I' => RefCell::Imaginary,
            '*' => RefCell::Nonzero,
            _ => return None,
        })
    }

    pub fn is_zero(self) -> bool {
        self == RefCell::Zero
    }

    /// Whether a computed class agrees with the asserted one.
    pub fn accepts(self, class: EntryClass) -> bool {
        match self {
            RefCell::Zero => class == EntryClass::Zero,
            RefCell::One => class == EntryClass::One,
            RefCell::Real => matches!(class, EntryClass::Real | EntryClass::One),
            RefCell::Imaginary => class == EntryClass::Imaginary,
            RefCell::Nonzero => class != EntryClass::Zero,
        }
    }
}

/// Expected skeleton of one basis element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferencePattern {
    pub cells: Vec<Vec<RefCell>>,
}

impl ReferencePattern {
    /// Parse whitespace-separated rows over the alphabet `. 1 R I *`.
    pub fn parse(rows: &str) -> Result<Self> {
        let cells: Vec<Vec<RefCell>> = rows
            .split_whitespace()
            .map(|r| {
                r.chars()
                    .map(|c| {
                        RefCell::parse(c)
                            .ok_or_else(|| Error::InvalidInput(format!("bad pattern symbol {c:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let n = cells.len();
        if n == 0 || cells.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("pattern must be square".into()));
        }
        Ok(Self { cells })
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn nonzero_mask(&self) -> Vec<Vec<bool>> {
        self.cells
            .iter()
            .map(|r| r.iter().map(|c| !c.is_zero()).collect())
            .collect()
    }
}

/// Which family of N=6 Hamiltonians a reference set describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceModel {
    /// All three couplings independent and nonzero.
    General,
    /// Only the innermost coupling nonzero.
    SingleInner,
    /// Couplings `(a, -a, a)`.
    Alternating,
}

const GENERAL_6: [&str; 6] = [
    "1IRIRI I1IRIR RI1IRI IRI1IR RIRI1I IRIRI1",
    ".1IRIR 1.1IRI I1.1IR RI1.1I IRI1.1 RIRI1.",
    "..1IRI .1I*IR 1I*I*I I*I*I1 RI*I1. IRI1..",
    "...1IR ..1I*I .1I*I1 1I*I1. I*I1.. RI1...",
    "....1I ...1I1 ..1I1. .1I1.. 1I1... I1....",
    ".....1 ....1. ...1.. ..1... .1.... 1.....",
];

const SINGLE_INNER_6: [&str; 6] = [
    "1....I .1..I. ..1I.. ..I1.. .I..1. I....1",
    ".1..I. 1.1I.I .1.*I. .I*.1. I.I1.1 .I..1.",
    "..1IR. .1.1IR 1.1I1I I1I1.1 RI1.1. .RI1..",
    "...1.R ..1I*. .1.1I1 1I1.1. .*I1.. R.1...",
    "....1. ...1.1 ..1I1. .1I1.. 1.1... .1....",
    ".....1 ....1. ...1.. ..1... .1.... 1.....",
];

const ALTERNATING_6: [&str; 6] = [
    "1I.I.I I1.... ..1I.I I.I1.. ....1I I.I.I1",
    ".1.... 1.1... .1.1.. ..1.1. ...1.1 ....1.",
    "..1I.I .1I1.. 1I1.1I I1.1I1 ..1I1. I.I1..",
    "...1.. ..1.1. .1.1.1 1.1.1. .1.1.. ..1...",
    "....1I ...1I1 ..1I1. .1I1.. 1I1... I1....",
    ".....1 ....1. ...1.. ..1... .1.... 1.....",
];

/// Reference skeletons of the six canonical pseudometrics at N=6.
pub fn reference_patterns(model: ReferenceModel) -> Vec<ReferencePattern> {
    let rows = match model {
        ReferenceModel::General => GENERAL_6,
        ReferenceModel::SingleInner => SINGLE_INNER_6,
        ReferenceModel::Alternating => ALTERNATING_6,
    };
    rows.iter()
        .map(|r| ReferencePattern::parse(r).expect("built-in pattern is well formed"))
        .collect()
}

/// Outcome of matching one basis element against a reference skeleton.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkeletonMatch {
    /// 1-based element index.
    pub element: usize,
    /// Zero/nonzero skeleton equal without any shift.
    pub direct: bool,
    /// Skeleton reproduced by `P^k + sum_{j>k} d_j P^j`; `d` listed for `j = k+1..N`.
    pub shift: Option<Vec<f64>>,
    /// Cells whose asserted class disagrees with the matched matrix, 1-based.
    pub class_mismatches: Vec<(usize, usize)>,
}

impl SkeletonMatch {
    pub fn matched(&self) -> bool {
        self.direct || self.shift.is_some()
    }
}

fn skeleton_equal(p: &HermitianMatrix, r: &ReferencePattern, tol: f64) -> bool {
    let pat = classify_pattern(p, tol);
    pat.nonzero_mask() == r.nonzero_mask()
}

fn class_mismatches(p: &HermitianMatrix, r: &ReferencePattern, tol: f64) -> Vec<(usize, usize)> {
    let pat = classify_pattern(p, tol);
    let n = r.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if !r.cells[i][j].accepts(pat.get(i, j)) {
                out.push((i + 1, j + 1));
            }
        }
    }
    out
}

/// Match element `k` (1-based) of `basis` against `reference`.
///
/// First the element itself is compared. Otherwise the shift coefficients are
/// found by least squares on the reference's zero cells, and a generic point
/// of the remaining freedom (fixed seed) must leave every other cell nonzero.
pub fn match_skeleton(
    basis: &PseudometricBasis,
    k: usize,
    reference: &ReferencePattern,
    tol: f64,
) -> Result<SkeletonMatch> {
    let n = basis.dim;
    if reference.dim() != n {
        return Err(Error::Dimension(format!(
            "reference is {}x{}, basis is {n}x{n}",
            reference.dim(),
            reference.dim()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("element index {k} outside 1..={n}")));
    }
    let pk = basis.element(k);
    if skeleton_equal(pk, reference, tol) {
        return Ok(SkeletonMatch {
            element: k,
            direct: true,
            shift: None,
            class_mismatches: class_mismatches(pk, reference, tol),
        });
    }
    let later: Vec<&HermitianMatrix> = ((k + 1)..=n).map(|j| basis.element(j)).collect();
    if later.is_empty() {
        return Ok(SkeletonMatch {
            element: k,
            direct: false,
            shift: None,
            class_mismatches: class_mismatches(pk, reference, tol),
        });
    }
    // Real equations Re = 0, Im = 0 on the upper triangle of zero cells.
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for i in 0..n {
        for j in i..n {
            if !reference.cells[i][j].is_zero() {
                continue;
            }
            rows.push(later.iter().map(|p| p.get(i, j).re).collect());
            rhs.push(-pk.get(i, j).re);
            if i != j {
                rows.push(later.iter().map(|p| p.get(i, j).im).collect());
                rhs.push(-pk.get(i, j).im);
            }
        }
    }
    let m = later.len();
    let a = RMatrix::from_fn(rows.len(), m, |r, c| rows[r][c]);
    let b = DVector::from_vec(rhs);
    let (x, null) = least_squares_with_null(&a, &b, 1e-10);
    let shifted_by = |d: &DVector<f64>| -> Result<HermitianMatrix> {
        let mut coeffs = vec![1.0];
        coeffs.extend(d.iter().copied());
        let mut elems = vec![pk.clone()];
        elems.extend(later.iter().map(|p| (*p).clone()));
        HermitianMatrix::combine(&elems, &coeffs)
    };
    // The minimum-norm shift usually suffices; otherwise move to a generic
    // point of the remaining freedom so no nonzero cell vanishes by accident.
    let mut d = x.clone();
    let mut shifted = shifted_by(&d)?;
    if !skeleton_equal(&shifted, reference, tol) && null.ncols() > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_6001 + k as u64);
        for c in 0..null.ncols() {
            let w: f64 = rng.random_range(-1.0..1.0);
            d += null.column(c) * w;
        }
        shifted = shifted_by(&d)?;
    }
    let ok = skeleton_equal(&shifted, reference, tol);
    Ok(SkeletonMatch {
        element: k,
        direct: false,
        shift: ok.then(|| d.iter().copied().collect()),
        class_mismatches: class_mismatches(if ok { &shifted } else { pk }, reference, tol),
    })
}

/// Match every element of `basis` against the corresponding reference skeleton.
pub fn match_all(
    basis: &PseudometricBasis,
    references: &[ReferencePattern],
    tol: f64,
) -> Result<Vec<SkeletonMatch>> {
    if references.len() != basis.dim {
        return Err(Error::BasisSize {
            got: references.len(),
            expected: basis.dim,
        });
    }
    references
        .iter()
        .enumerate()
        .map(|(idx, r)| match_skeleton(basis, idx + 1, r, tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commutant::laplacian_pseudometrics;

    #[test]
    fn classify_follows_tolerance_rules() {
        let t = 1e-9;
        assert_eq!(EntryClass::classify(Complex64::new(0.0, 1e-12), t), EntryClass::Zero);
        assert_eq!(EntryClass::classify(Complex64::new(1.0 + 1e-12, 0.0), t), EntryClass::One);
        assert_eq!(EntryClass::classify(Complex64::new(-0.5, 0.0), t), EntryClass::Real);
        assert_eq!(EntryClass::classify(Complex64::new(0.0, -0.5), t), EntryClass::Imaginary);
        assert_eq!(EntryClass::classify(Complex64::new(0.3, 0.5), t), EntryClass::Complex);
    }

    #[test]
    fn parity_pattern_is_anti_identity() {
        let b = laplacian_pseudometrics(4).unwrap();
        let pat = classify_pattern(b.element(4), DEFAULT_PATTERN_TOL);
        assert_eq!(pat.rows(), vec!["...1", "..1.", ".1..", "1..."]);
    }

    #[test]
    fn reference_sets_parse() {
        for model in [ReferenceModel::General, ReferenceModel::SingleInner, ReferenceModel::Alternating] {
            let refs = reference_patterns(model);
            assert_eq!(refs.len(), 6);
            // Last element is always the parity matrix.
            assert_eq!(refs[5].nonzero_mask(), ReferencePattern::parse(".....1 ....1. ...1.. ..1... .1.... 1.....").unwrap().nonzero_mask());
        }
        assert!(ReferencePattern::parse("1x 11").is_err());
        assert!(ReferencePattern::parse("11 1").is_err());
    }

    #[test]
    fn laplacian_matches_its_own_skeleton_directly() {
        let b = laplacian_pseudometrics(6).unwrap();
        for k in 1..=6 {
            let rows: Vec<String> = classify_pattern(b.element(k), DEFAULT_PATTERN_TOL).rows();
            let r = ReferencePattern::parse(&rows.join(" ")).unwrap();
            let m = match_skeleton(&b, k, &r, DEFAULT_PATTERN_TOL).unwrap();
            assert!(m.direct && m.class_mismatches.is_empty());
        }
    }

    #[test]
    fn shift_recovers_mixed_element() {
        // Reference for P^2 of the free chain, matched against the basis
        // where P^2 was replaced by P^2 + P^4: the shift d_4 = -1 restores it.
        let mut b = laplacian_pseudometrics(6).unwrap();
        let rows = classify_pattern(b.element(2), DEFAULT_PATTERN_TOL).rows().join(" ");
        let r = ReferencePattern::parse(&rows).unwrap();
        b.elements[1] = HermitianMatrix::combine(&[b.elements[1].clone(), b.elements[3].clone()], &[1.0, 1.0]).unwrap();
        let m = match_skeleton(&b, 2, &r, DEFAULT_PATTERN_TOL).unwrap();
        assert!(!m.direct);
        let d = m.shift.expect("shift exists");
        assert!((d[1] + 1.0).abs() < 1e-9, "{d:?}");
    }
}
