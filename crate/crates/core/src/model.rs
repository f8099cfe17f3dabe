//! Coefficient laws of the recursion `x ↦ a x + b`: affine maps, finitely supported
//! measures on the affine group, their linear projections, and atom sampling.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Matrix};
use crate::scalar::Real;

/// Absolute tolerance on `Σ weights = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Absolute tolerance when comparing per-atom fixed points.
pub const FIXED_POINT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("measure has no atoms")]
    Empty,
    #[error("atom {index} has non-positive weight {weight}")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("weights sum to {sum}, not 1 (tolerance {WEIGHT_SUM_TOL:e})")]
    WeightsNotNormalized { sum: f64 },
    #[error("atom {index}: {what}")]
    DimensionMismatch { index: usize, what: String },
    #[error("atom {index} has a singular linear part (det = {det:e})")]
    SingularMatrix { index: usize, det: f64 },
    #[error("all atoms share the fixed point {point:?}")]
    DegenerateFixedPoint { point: Vec<f64> },
    #[error("invalid measure document: {0}")]
    Parse(String),
    #[error("cannot read measure file: {0}")]
    Io(String),
}

impl ModelError {
    /// Machine-readable diagnostic code.
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::Empty => "EmptyMeasure",
            ModelError::NonPositiveWeight { .. } => "NonPositiveWeight",
            ModelError::WeightsNotNormalized { .. } => "WeightsNotNormalized",
            ModelError::DimensionMismatch { .. } => "DimensionMismatch",
            ModelError::SingularMatrix { .. } => "SingularMatrix",
            ModelError::DegenerateFixedPoint { .. } => "DegenerateFixedPoint",
            ModelError::Parse(_) => "ParseError",
            ModelError::Io(_) => "IoError",
        }
    }
}

/// `x ↦ a x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap<T> {
    pub a: Matrix<T>,
    pub b: Vec<T>,
}

impl<T: Real> AffineMap<T> {
    pub fn new(a: Matrix<T>, b: Vec<T>) -> Self {
        Self { a, b }
    }

    pub fn linear(a: Matrix<T>) -> Self {
        let d = a.dim();
        Self {
            a,
            b: vec![T::zero(); d],
        }
    }

    pub fn scalar(a: T, b: T) -> Self {
        Self {
            a: Matrix::scalar(a),
            b: vec![b],
        }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = self.a.mul_vec(x);
        y.iter_mut().zip(&self.b).for_each(|(y, &b)| *y += b);
        y
    }

    /// `self ∘ inner`: `x ↦ a(a' x + b') + b`.
    pub fn compose(&self, inner: &Self) -> Self {
        let a = self.a.mul(&inner.a);
        let mut b = self.a.mul_vec(&inner.b);
        b.iter_mut().zip(&self.b).for_each(|(x, &c)| *x += c);
        Self { a, b }
    }

    /// Solution of `(I − a) x = b`, if `I − a` is invertible.
    pub fn fixed_point(&self) -> Option<Vec<T>> {
        let d = self.dim();
        let mut m = self.a.scaled(-T::one());
        for i in 0..d {
            m[(i, i)] += T::one();
        }
        m.solve(&self.b).ok().filter(|x| x.iter().all(|v| v.is_finite()))
    }

    /// `‖a x + b − x‖`.
    pub fn fixed_point_residual(&self, x: &[T]) -> T {
        linalg::distance(&self.apply(x), x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T> {
    pub weight: T,
    pub map: AffineMap<T>,
}

/// Access to the linear parts and weights of a finitely supported law.
pub trait CoefficientLaw<T: Real>: Sync {
    fn dim(&self) -> usize;
    fn len(&self) -> usize;
    fn weight(&self, i: usize) -> T;
    fn linear(&self, i: usize) -> &Matrix<T>;
    fn cumulative(&self) -> &[f64];

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of atom `i` with probability `weight_i`.
    fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let c = self.cumulative();
        c.partition_point(|&x| x <= u).min(c.len() - 1)
    }
}

fn cumulative_weights<T: Real>(weights: impl Iterator<Item = T>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w.to_f64_lossy();
            acc
        })
        .collect()
}

fn check_weights<T: Real>(weights: &[T]) -> Result<(), ModelError> {
    if weights.is_empty() {
        return Err(ModelError::Empty);
    }
    for (index, w) in weights.iter().enumerate() {
        let w = w.to_f64_lossy();
        if !(w > 0.0) || !w.is_finite() {
            return Err(ModelError::NonPositiveWeight { index, weight: w });
        }
    }
    let sum: f64 = weights.iter().map(|w| w.to_f64_lossy()).sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(ModelError::WeightsNotNormalized { sum });
    }
    Ok(())
}

fn check_matrix<T: Real>(index: usize, d: usize, a: &Matrix<T>) -> Result<(), ModelError> {
    if a.dim() != d {
        return Err(ModelError::DimensionMismatch {
            index,
            what: format!("matrix is {}×{}, expected {d}×{d}", a.dim(), a.dim()),
        });
    }
    if a.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(ModelError::Parse(format!("atom {index}: non-finite matrix entry")));
    }
    if d > 1 {
        let det = a.determinant();
        let scale = a.max_abs().powi(d as i32);
        if det == T::zero() || det.abs() <= T::of(1e-14) * scale {
            return Err(ModelError::SingularMatrix {
                index,
                det: det.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// Finitely supported probability measure η on the affine group.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMeasure<T> {
    dim: usize,
    atoms: Vec<Atom<T>>,
    cumulative: Vec<f64>,
}

impl<T: Real> AffineMeasure<T> {
    /// Checks the structural invariants: positive weights summing to one, matching
    /// dimensions, and invertible linear parts when `d > 1`.
    pub fn new(dim: usize, atoms: Vec<Atom<T>>) -> Result<Self, ModelError> {
        if dim == 0 {
            return Err(ModelError::DimensionMismatch {
                index: 0,
                what: "ambient dimension must be at least 1".into(),
            });
        }
        let weights: Vec<T> = atoms.iter().map(|a| a.weight).collect();
        check_weights(&weights)?;
        for (index, atom) in atoms.iter().enumerate() {
            check_matrix(index, dim, &atom.map.a)?;
            if atom.map.b.len() != dim {
                return Err(ModelError::DimensionMismatch {
                    index,
                    what: format!("translation has length {}, expected {dim}", atom.map.b.len()),
                });
            }
            if atom.map.b.iter().any(|x| !x.is_finite()) {
                return Err(ModelError::Parse(format!("atom {index}: non-finite translation")));
            }
        }
        let cumulative = cumulative_weights(weights.into_iter());
        Ok(Self {
            dim,
            atoms,
            cumulative,
        })
    }

    /// Convenience constructor from `(weight, a, b)` triples for `d = 1`.
    pub fn scalar(atoms: &[(f64, f64, f64)]) -> Result<Self, ModelError> {
        Self::new(
            1,
            atoms
                .iter()
                .map(|&(w, a, b)| Atom {
                    weight: T::of(w),
                    map: AffineMap::scalar(T::of(a), T::of(b)),
                })
                .collect(),
        )
    }

    pub fn from_maps(dim: usize, atoms: Vec<(T, AffineMap<T>)>) -> Result<Self, ModelError> {
        Self::new(
            dim,
            atoms
                .into_iter()
                .map(|(weight, map)| Atom { weight, map })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom<T> {
        &self.atoms[i]
    }

    /// `max_i ‖b_i‖`.
    pub fn max_translation_norm(&self) -> T {
        self.atoms
            .iter()
            .map(|a| linalg::norm(&a.map.b))
            .fold(T::zero(), T::max)
    }

    /// A point fixed by every atom, if one exists (within [`FIXED_POINT_TOL`]).
    pub fn common_fixed_point(&self) -> Option<Vec<T>> {
        let tol = T::of(FIXED_POINT_TOL);
        let candidates: Vec<Vec<T>> = self
            .atoms
            .iter()
            .filter_map(|a| a.map.fixed_point())
            .collect();
        let candidate = match candidates.first() {
            Some(c) => c.clone(),
            // no atom has an isolated fixed point: only the all-translation-free case
            // shares a fixed point we can name (the origin)
            None => {
                let origin = vec![T::zero(); self.dim];
                return self
                    .atoms
                    .iter()
                    .all(|a| a.map.fixed_point_residual(&origin) <= tol)
                    .then_some(origin);
            }
        };
        let pairwise = candidates
            .iter()
            .all(|c| c.iter().zip(&candidate).all(|(&x, &y)| (x - y).abs() <= tol));
        let scale = T::one() + linalg::norm(&candidate);
        let residuals = self
            .atoms
            .iter()
            .all(|a| a.map.fixed_point_residual(&candidate) <= tol * scale);
        (pairwise && residuals).then_some(candidate)
    }

    /// Reports a violation of the no-common-fixed-point hypothesis as an error.
    pub fn validate(&self) -> Result<&Self, ModelError> {
        match self.common_fixed_point() {
            Some(p) => Err(ModelError::DegenerateFixedPoint {
                point: p.iter().map(|x| x.to_f64_lossy()).collect(),
            }),
            None => Ok(self),
        }
    }

    /// Same weights, translation parts dropped.
    pub fn linear_projection(&self) -> LinearMeasure<T> {
        LinearMeasure {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| (a.weight, a.map.a.clone()))
                .collect(),
            cumulative: self.cumulative.clone(),
        }
    }

    /// Draws one atom.
    pub fn sample_atom<R: Rng + ?Sized>(&self, rng: &mut R) -> &AffineMap<T> {
        &self.atoms[self.sample_index(rng)].map
    }

    /// Applies `f` to every matrix and translation (used for conjugations and rescalings).
    pub fn map_atoms(&self, f: impl Fn(&AffineMap<T>) -> AffineMap<T>) -> Result<Self, ModelError> {
        Self::new(
            self.dim,
            self.atoms
                .iter()
                .map(|a| Atom {
                    weight: a.weight,
                    map: f(&a.map),
                })
                .collect(),
        )
    }

    pub fn from_json_str(s: &str) -> Result<Self, ModelError> {
        let doc: MeasureDoc<T> = serde_json::from_str(s).map_err(|e| ModelError::Parse(e.to_string()))?;
        doc.into_measure()
    }

    pub fn from_json_file(path: &Path) -> Result<Self, ModelError> {
        let s = std::fs::read_to_string(path).map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&s)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&MeasureDoc::from_measure(self)).expect("measure documents always serialize")
    }
}

impl<T: Real> CoefficientLaw<T> for AffineMeasure<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        self.atoms.len()
    }
    fn weight(&self, i: usize) -> T {
        self.atoms[i].weight
    }
    fn linear(&self, i: usize) -> &Matrix<T> {
        &self.atoms[i].map.a
    }
    fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}

/// Finitely supported probability measure μ on matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMeasure<T> {
    dim: usize,
    atoms: Vec<(T, Matrix<T>)>,
    cumulative: Vec<f64>,
}

impl<T: Real> LinearMeasure<T> {
    pub fn new(dim: usize, atoms: Vec<(T, Matrix<T>)>) -> Result<Self, ModelError> {
        let weights: Vec<T> = atoms.iter().map(|a| a.0).collect();
        check_weights(&weights)?;
        for (index, (_, a)) in atoms.iter().enumerate() {
            check_matrix(index, dim, a)?;
        }
        let cumulative = cumulative_weights(weights.into_iter());
        Ok(Self {
            dim,
            atoms,
            cumulative,
        })
    }

    pub fn scalar(atoms: &[(f64, f64)]) -> Result<Self, ModelError> {
        Self::new(
            1,
            atoms
                .iter()
                .map(|&(w, a)| (T::of(w), Matrix::scalar(T::of(a))))
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[(T, Matrix<T>)] {
        &self.atoms
    }

    pub fn sample_matrix<R: Rng + ?Sized>(&self, rng: &mut R) -> &Matrix<T> {
        &self.atoms[self.sample_index(rng)].1
    }

    /// Lifts to the affine measure with zero translations.
    pub fn as_affine(&self) -> AffineMeasure<T> {
        AffineMeasure {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|(w, a)| Atom {
                    weight: *w,
                    map: AffineMap::linear(a.clone()),
                })
                .collect(),
            cumulative: self.cumulative.clone(),
        }
    }

    pub fn map_matrices(&self, f: impl Fn(&Matrix<T>) -> Matrix<T>) -> Result<Self, ModelError> {
        Self::new(self.dim, self.atoms.iter().map(|(w, a)| (*w, f(a))).collect())
    }
}

impl<T: Real> CoefficientLaw<T> for LinearMeasure<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        self.atoms.len()
    }
    fn weight(&self, i: usize) -> T {
        self.atoms[i].0
    }
    fn linear(&self, i: usize) -> &Matrix<T> {
        &self.atoms[i].1
    }
    fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}

/// JSON document: `{ "d": 2, "atoms": [ { "p": 0.5, "a": [[..],[..]], "b": [..] } ] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc<T> {
    pub d: usize,
    pub atoms: Vec<AtomDoc<T>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc<T> {
    pub p: T,
    pub a: MatrixDoc<T>,
    pub b: VectorDoc<T>,
}

/// Matrices are row lists; a bare number is accepted for `d = 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixDoc<T> {
    Rows(Vec<Vec<T>>),
    Scalar(T),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorDoc<T> {
    Vector(Vec<T>),
    Scalar(T),
}

impl<T: Real> MeasureDoc<T> {
    pub fn into_measure(self) -> Result<AffineMeasure<T>, ModelError> {
        let d = self.d;
        let atoms = self
            .atoms
            .into_iter()
            .enumerate()
            .map(|(index, atom)| {
                let a = match atom.a {
                    MatrixDoc::Rows(rows) => Matrix::from_rows(&rows).ok_or_else(|| ModelError::DimensionMismatch {
                        index,
                        what: "matrix rows are not square".into(),
                    })?,
                    MatrixDoc::Scalar(x) => Matrix::scalar(x),
                };
                let b = match atom.b {
                    VectorDoc::Vector(v) => v,
                    VectorDoc::Scalar(x) => vec![x],
                };
                Ok(Atom {
                    weight: atom.p,
                    map: AffineMap::new(a, b),
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        AffineMeasure::new(d, atoms)
    }

    pub fn from_measure(m: &AffineMeasure<T>) -> Self {
        Self {
            d: m.dim,
            atoms: m
                .atoms
                .iter()
                .map(|a| AtomDoc {
                    p: a.weight,
                    a: MatrixDoc::Rows(a.map.a.rows()),
                    b: VectorDoc::Vector(a.map.b.clone()),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Seed, StreamOp};

    #[test]
    fn single_contracting_atom_is_degenerate() {
        let m = AffineMeasure::<f64>::scalar(&[(1.0, 0.5, 1.0)]).unwrap();
        match m.validate() {
            Err(ModelError::DegenerateFixedPoint { point }) => assert!((point[0] - 2.0).abs() < 1e-12),
            other => panic!("expected degenerate, got {other:?}"),
        }
    }

    #[test]
    fn distinct_fixed_points_are_not_degenerate() {
        // fixed points 1/(1-1/3) = 1.5 and 1/(1-2) = -1
        let m = AffineMeasure::<f64>::scalar(&[(0.5, 1.0 / 3.0, 1.0), (0.5, 2.0, 1.0)]).unwrap();
        assert!(m.validate().is_ok());
        assert!((m.atom(0).map.fixed_point().unwrap()[0] - 1.5).abs() < 1e-12);
        assert!((m.atom(1).map.fixed_point().unwrap()[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn shared_fixed_point_across_atoms() {
        // both fix 2: 0.5*2+1 = 2, 0.25*2+1.5 = 2
        let m = AffineMeasure::<f64>::scalar(&[(0.5, 0.5, 1.0), (0.5, 0.25, 1.5)]).unwrap();
        assert!(matches!(m.validate(), Err(ModelError::DegenerateFixedPoint { .. })));
    }

    #[test]
    fn identity_atoms_without_translation_fix_origin() {
        let m = AffineMeasure::<f64>::scalar(&[(1.0, 1.0, 0.0)]).unwrap();
        assert!(matches!(m.validate(), Err(ModelError::DegenerateFixedPoint { .. })));
        let pure_shift = AffineMeasure::<f64>::scalar(&[(1.0, 1.0, 1.0)]).unwrap();
        assert!(pure_shift.validate().is_ok());
    }

    #[test]
    fn weight_errors() {
        let e = AffineMeasure::<f64>::scalar(&[(0.5, 0.5, 1.0), (0.6, 2.0, 1.0)]).unwrap_err();
        assert_eq!(e.code(), "WeightsNotNormalized");
        let e = AffineMeasure::<f64>::scalar(&[(1.5, 0.5, 1.0), (-0.5, 2.0, 1.0)]).unwrap_err();
        assert_eq!(e.code(), "NonPositiveWeight");
        let e = AffineMeasure::<f64>::new(1, vec![]).unwrap_err();
        assert_eq!(e, ModelError::Empty);
    }

    #[test]
    fn singular_matrix_rejected_only_above_dimension_one() {
        let m = AffineMeasure::<f64>::from_json_str(r#"{"d":2,"atoms":[{"p":1,"a":[[1,2],[2,4]],"b":[1,0]}]}"#);
        assert_eq!(m.unwrap_err().code(), "SingularMatrix");
        assert!(AffineMeasure::<f64>::scalar(&[(0.5, 0.0, 1.0), (0.5, 2.0, 1.0)]).is_ok());
    }

    #[test]
    fn dimension_mismatch() {
        let m = AffineMeasure::<f64>::from_json_str(r#"{"d":2,"atoms":[{"p":1,"a":[[1,0],[0,1]],"b":[1]}]}"#);
        assert_eq!(m.unwrap_err().code(), "DimensionMismatch");
    }

    #[test]
    fn projection_keeps_weights() {
        let m = AffineMeasure::<f64>::scalar(&[(0.25, 1.0 / 3.0, 1.0), (0.75, 2.0, 1.0)]).unwrap();
        let mu = m.linear_projection();
        assert_eq!(mu.atoms()[0].0, 0.25);
        assert_eq!(mu.atoms()[1].0, 0.75);
        assert_eq!(mu.atoms()[1].1, Matrix::scalar(2.0));
    }

    #[test]
    fn sampling_single_atom_and_determinism() {
        let m = AffineMeasure::<f64>::scalar(&[(1.0, 0.5, 1.0)]).unwrap();
        let mut rng = Seed(3).stream(StreamOp::AtomDraws, 0, 0);
        assert!((0..100).all(|_| m.sample_index(&mut rng) == 0));
        let two = AffineMeasure::<f64>::scalar(&[(0.5, 0.5, 1.0), (0.5, 2.0, 1.0)]).unwrap();
        let draw = |s| {
            let mut rng = Seed(s).stream(StreamOp::AtomDraws, 5, 9);
            (0..64).map(|_| two.sample_index(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
    }

    #[test]
    fn scalar_shorthand_in_json() {
        let m = AffineMeasure::<f64>::from_json_str(r#"{"d":1,"atoms":[{"p":0.5,"a":0.5,"b":1},{"p":0.5,"a":[[2]],"b":[1]}]}"#)
            .unwrap();
        assert_eq!(m.atom(0).map.a, Matrix::scalar(0.5));
    }
}
