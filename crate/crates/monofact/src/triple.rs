//! The triple calculus: state `(A, B, v, w)` with `A` nonnegative unimodular,
//! `B = A^{-1}` cached, `v` positive valuation values, and `w = B v` positive.
//! Elementary operations transform triples; permissibility keeps every
//! invariant intact.
//!
//! All public indices are 1-based, matching the operation names `C_ij`,
//! `R_ji`, `T_ij`. Storage is 0-based.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::scalar::{Sign, Valuation};

/// Elementary operation on a triple. 1-based indices, `i != j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum ElementaryOp {
    /// `C_ij`: column `i` gains column `j`. Permissible iff `w_j - w_i > 0`;
    /// afterwards `w_j` loses `w_i`, `v` is unchanged.
    ColAdd { i: usize, j: usize },
    /// `R_ji`: row `j` loses row `i`. Permissible iff row `j` dominates row
    /// `i` entrywise; afterwards `v_j` loses `v_i`, `w` is unchanged.
    RowSub { j: usize, i: usize },
    /// `T_ij`: rows `i` and `j` interchange, as do `v_i` and `v_j`. Always
    /// permissible; `w` is unchanged.
    RowSwap { i: usize, j: usize },
    /// Column subtraction: column `i` loses column `j`. Permissible iff the
    /// result stays entrywise nonnegative; afterwards `w_j` gains `w_i`.
    ColSub { i: usize, j: usize },
}

impl ElementaryOp {
    pub fn col_add(i: usize, j: usize) -> Self {
        ElementaryOp::ColAdd { i, j }
    }
    pub fn row_sub(j: usize, i: usize) -> Self {
        ElementaryOp::RowSub { j, i }
    }
    pub fn row_swap(i: usize, j: usize) -> Self {
        ElementaryOp::RowSwap { i, j }
    }
    pub fn col_sub(i: usize, j: usize) -> Self {
        ElementaryOp::ColSub { i, j }
    }

    pub fn indices(&self) -> (usize, usize) {
        match *self {
            ElementaryOp::ColAdd { i, j }
            | ElementaryOp::RowSwap { i, j }
            | ElementaryOp::ColSub { i, j } => (i, j),
            ElementaryOp::RowSub { j, i } => (j, i),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let (x, y) = self.indices();
        for idx in [x, y] {
            if idx == 0 || idx > n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        if x == y {
            return Err(Error::EqualIndices);
        }
        Ok(())
    }

    pub fn is_phase1(&self) -> bool {
        matches!(
            self,
            ElementaryOp::ColAdd { .. } | ElementaryOp::RowSwap { .. }
        )
    }
}

impl fmt::Display for ElementaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ElementaryOp::ColAdd { i, j } => write!(f, "C[{i},{j}]"),
            ElementaryOp::RowSub { j, i } => write!(f, "R[{j},{i}]"),
            ElementaryOp::RowSwap { i, j } => write!(f, "T[{i},{j}]"),
            ElementaryOp::ColSub { i, j } => write!(f, "S[{i},{j}]"),
        }
    }
}

/// Which homogeneous operation kind phase 2 carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase2Kind {
    RowSub,
    ColSub,
}

/// Two-phase operation script: column additions and row interchanges first,
/// then row subtractions (or column subtractions for the converted variant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpScript {
    pub phase1: Vec<ElementaryOp>,
    pub phase2: Vec<ElementaryOp>,
    pub phase2_kind: Phase2Kind,
    /// Optional per-step diagnostic: `max_k |b_k1|` after each op, across
    /// both phases.
    pub diagnostics: Option<Vec<BigUint>>,
}

impl OpScript {
    pub fn empty() -> Self {
        OpScript {
            phase1: Vec::new(),
            phase2: Vec::new(),
            phase2_kind: Phase2Kind::RowSub,
            diagnostics: None,
        }
    }

    pub fn new(phase1: Vec<ElementaryOp>, phase2: Vec<ElementaryOp>) -> Self {
        OpScript {
            phase1,
            phase2,
            phase2_kind: Phase2Kind::RowSub,
            diagnostics: None,
        }
    }

    pub fn len(&self) -> usize {
        self.phase1.len() + self.phase2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter_all(&self) -> impl Iterator<Item = &ElementaryOp> {
        self.phase1.iter().chain(self.phase2.iter())
    }

    /// Phase grammar: phase 1 holds only `ColAdd`/`RowSwap`; phase 2 is
    /// homogeneous in the declared kind. Step indices are 1-based over the
    /// concatenated script.
    pub fn validate_grammar(&self) -> Result<()> {
        for (idx, op) in self.phase1.iter().enumerate() {
            if !op.is_phase1() {
                return Err(Error::PhaseViolation {
                    step: idx + 1,
                    what: format!("{op} is not a column addition or row interchange"),
                });
            }
        }
        for (idx, op) in self.phase2.iter().enumerate() {
            let ok = match self.phase2_kind {
                Phase2Kind::RowSub => matches!(op, ElementaryOp::RowSub { .. }),
                Phase2Kind::ColSub => matches!(op, ElementaryOp::ColSub { .. }),
            };
            if !ok {
                return Err(Error::PhaseViolation {
                    step: self.phase1.len() + idx + 1,
                    what: format!("{op} does not match phase-2 kind {:?}", self.phase2_kind),
                });
            }
        }
        Ok(())
    }
}

/// The central state object: `A` nonnegative unimodular, `B = A^{-1}`
/// maintained incrementally, `v > 0`, `w = B v > 0`. Values are immutable;
/// `apply` returns a fresh triple.
#[derive(Clone, PartialEq)]
pub struct Triple<S: Valuation> {
    a: IntMatrix,
    b: IntMatrix,
    det: i8,
    v: Vec<S>,
    w: Vec<S>,
}

impl<S: Valuation> Triple<S> {
    /// Validate `A` (nonnegative, determinant a unit), compute `B` by exact
    /// elimination and `w = B v`, and check positivity of `v` and `w`.
    pub fn build(a: IntMatrix, v: Vec<S>) -> Result<Self> {
        let n = a.n();
        if v.len() != n {
            return Err(Error::NotSquare {
                rows: n,
                cols: v.len(),
            });
        }
        a.entries_nonnegative()?;
        let (b, det) = a.unimodular_inverse()?;
        for (idx, vi) in v.iter().enumerate() {
            if vi.try_sign()? != Sign::Plus {
                return Err(Error::NonPositiveValuation(idx + 1));
            }
        }
        let w = mat_vec(&b, &v)?;
        for (idx, wi) in w.iter().enumerate() {
            if wi.try_sign()? != Sign::Plus {
                return Err(Error::NotDominated(idx + 1));
            }
        }
        Ok(Triple { a, b, det, v, w })
    }

    /// Identity triple: `A = I`, `w = v`.
    pub fn identity(v: Vec<S>) -> Result<Self> {
        Self::build(IntMatrix::identity(v.len()), v)
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn det(&self) -> i8 {
        self.det
    }

    pub fn v(&self) -> &[S] {
        &self.v
    }

    pub fn w(&self) -> &[S] {
        &self.w
    }

    /// `a_{row,col}` with 1-based labels.
    pub fn a_entry(&self, row: usize, col: usize) -> &BigInt {
        &self.a[(row - 1, col - 1)]
    }

    /// `b_{row,col}` with 1-based labels. Note rows of `B` are indexed by
    /// column labels of `A`.
    pub fn b_entry(&self, row: usize, col: usize) -> &BigInt {
        &self.b[(row - 1, col - 1)]
    }

    /// `beta = max_k |b_k1|`.
    pub fn beta(&self) -> BigUint {
        self.beta_in_col(1)
    }

    /// `max_k |b_{k,col}|` for a general pivot column of `B`.
    pub fn beta_in_col(&self, col: usize) -> BigUint {
        (0..self.n())
            .map(|k| self.b[(k, col - 1)].abs())
            .max()
            .unwrap_or_else(BigInt::zero)
            .to_biguint()
            .unwrap()
    }

    /// Permissibility of `op`. Strict sign tests that come back exactly zero
    /// (possible only when rational independence is violated) are refused.
    pub fn is_permissible(&self, op: &ElementaryOp) -> Result<bool> {
        op.validate(self.n())?;
        match *op {
            ElementaryOp::ColAdd { i, j } => {
                let diff = self.w[j - 1].sub(&self.w[i - 1]);
                match diff.try_sign()? {
                    Sign::Plus => Ok(true),
                    Sign::Minus => Ok(false),
                    Sign::Zero => Err(Error::IndependenceViolation(format!(
                        "w[{j}] - w[{i}] is exactly zero"
                    ))),
                }
            }
            ElementaryOp::RowSub { j, i } => {
                let n = self.n();
                Ok((0..n).all(|k| self.a[(j - 1, k)] >= self.a[(i - 1, k)]))
            }
            ElementaryOp::RowSwap { .. } => Ok(true),
            ElementaryOp::ColSub { i, j } => {
                let n = self.n();
                Ok((0..n).all(|k| self.a[(k, i - 1)] >= self.a[(k, j - 1)]))
            }
        }
    }

    /// Apply a permissible operation, returning the transformed triple.
    pub fn apply(&self, op: &ElementaryOp) -> Result<Self> {
        let mut next = self.clone();
        next.apply_mut(op)?;
        Ok(next)
    }

    /// In-place variant of [`Triple::apply`]; the hot path for long replays.
    pub fn apply_mut(&mut self, op: &ElementaryOp) -> Result<()> {
        if !self.is_permissible(op)? {
            return Err(Error::NotPermissible { step: None });
        }
        self.apply_unchecked(op)
    }

    fn apply_unchecked(&mut self, op: &ElementaryOp) -> Result<()> {
        match *op {
            ElementaryOp::ColAdd { i, j } => {
                // A <- A (I + e_j e_i^T), B <- (I - e_j e_i^T) B
                self.a.col_addmul(i - 1, j - 1, 1);
                self.b.row_addmul(j - 1, i - 1, -1);
                self.w[j - 1] = self.w[j - 1].sub(&self.w[i - 1]);
            }
            ElementaryOp::RowSub { j, i } => {
                // A <- (I - e_j e_i^T) A, B <- B (I + e_j e_i^T)
                self.a.row_addmul(j - 1, i - 1, -1);
                self.b.col_addmul(i - 1, j - 1, 1);
                self.v[j - 1] = self.v[j - 1].sub(&self.v[i - 1]);
            }
            ElementaryOp::RowSwap { i, j } => {
                self.a.swap_rows(i - 1, j - 1);
                self.b.swap_cols(i - 1, j - 1);
                self.v.swap(i - 1, j - 1);
                self.det = -self.det;
            }
            ElementaryOp::ColSub { i, j } => {
                // A <- A (I - e_j e_i^T), B <- (I + e_j e_i^T) B; w is
                // recomputed from the updated inverse rather than patched,
                // and rechecked against A w = v below.
                self.a.col_addmul(i - 1, j - 1, -1);
                self.b.row_addmul(j - 1, i - 1, 1);
                self.w = mat_vec(&self.b, &self.v)?;
                debug_assert!(mat_vec(&self.a, &self.w)
                    .map(|av| av == self.v)
                    .unwrap_or(false));
            }
        }
        Ok(())
    }

    /// Inverse of a row subtraction: row `j` gains row `i`. Always valid and
    /// always invertible inside the two-phase alphabet, which is what makes
    /// it the scrambling move of the instance generator.
    pub fn apply_inverse_row_sub(&self, j: usize, i: usize) -> Result<Self> {
        ElementaryOp::row_sub(j, i).validate(self.n())?;
        let mut next = self.clone();
        next.a.row_addmul(j - 1, i - 1, 1);
        next.b.col_addmul(i - 1, j - 1, -1);
        next.v[j - 1] = next.v[j - 1].add(&next.v[i - 1]);
        Ok(next)
    }

    /// Full recomputation audit: every cached piece is rebuilt from scratch
    /// and compared. `Ok(())` means all triple invariants hold exactly.
    pub fn check_invariants(&self) -> Result<()> {
        self.a.entries_nonnegative()?;
        let (b, det) = self.a.unimodular_inverse()?;
        if b != self.b {
            return Err(Error::Integrity(
                "cached inverse differs from recomputed inverse".into(),
            ));
        }
        if det != self.det {
            return Err(Error::Integrity(
                "cached determinant differs from recomputed determinant".into(),
            ));
        }
        if !self.a.mul(&self.b).is_identity() {
            return Err(Error::Integrity("A * B is not the identity".into()));
        }
        let w = mat_vec(&self.b, &self.v)?;
        if w != self.w {
            return Err(Error::Integrity("w differs from B v".into()));
        }
        let av = mat_vec(&self.a, &self.w)?;
        if av != self.v {
            return Err(Error::Integrity("A w differs from v".into()));
        }
        for (idx, vi) in self.v.iter().enumerate() {
            if vi.try_sign()? != Sign::Plus {
                return Err(Error::NonPositiveValuation(idx + 1));
            }
        }
        for (idx, wi) in self.w.iter().enumerate() {
            if wi.try_sign()? != Sign::Plus {
                return Err(Error::NotDominated(idx + 1));
            }
        }
        Ok(())
    }
}

impl<S: Valuation> fmt::Debug for Triple<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "A =")?;
        writeln!(f, "{:?}", self.a)?;
        write!(f, "v = [")?;
        for (k, x) in self.v.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        writeln!(f, "]")?;
        write!(f, "w = [")?;
        for (k, x) in self.w.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// `m * v` over the scalar type, exactly.
pub fn mat_vec<S: Valuation>(m: &IntMatrix, v: &[S]) -> Result<Vec<S>> {
    (0..m.n())
        .map(|i| S::combine(m.row(i), v))
        .collect::<Result<Vec<_>>>()
}

/// `beta` of a standalone matrix: validates unimodularity, inverts, and takes
/// `max_k |b_k1|`.
pub fn beta_of(a: &IntMatrix) -> Result<BigUint> {
    let (b, _) = a.unimodular_inverse()?;
    Ok((0..a.n())
        .map(|k| b[(k, 0)].abs())
        .max()
        .unwrap_or_else(BigInt::zero)
        .to_biguint()
        .unwrap())
}

/// Replay a script against a starting triple, asserting the phase grammar
/// and per-step permissibility. Step indices in errors are 1-based over the
/// concatenated script.
pub fn replay<S: Valuation>(t0: &Triple<S>, script: &OpScript) -> Result<Triple<S>> {
    script.validate_grammar()?;
    let mut cur = t0.clone();
    for (idx, op) in script.iter_all().enumerate() {
        cur.apply_mut(op).map_err(|e| match e {
            Error::NotPermissible { .. } => Error::NotPermissible {
                step: Some(idx + 1),
            },
            other => other,
        })?;
    }
    Ok(cur)
}

/// Replay collecting `(state before op, op)` pairs plus the final state.
#[allow(clippy::type_complexity)]
pub fn replay_trace<S: Valuation>(
    t0: &Triple<S>,
    script: &OpScript,
) -> Result<(Vec<(Triple<S>, ElementaryOp)>, Triple<S>)> {
    script.validate_grammar()?;
    let mut cur = t0.clone();
    let mut trace = Vec::with_capacity(script.len());
    for (idx, op) in script.iter_all().enumerate() {
        let next = cur.apply(op).map_err(|e| match e {
            Error::NotPermissible { .. } => Error::NotPermissible {
                step: Some(idx + 1),
            },
            other => other,
        })?;
        trace.push((cur, *op));
        cur = next;
    }
    Ok((trace, cur))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::RadicalScalar;

    fn sqrt(d: u64) -> RadicalScalar {
        RadicalScalar::sqrt(d).unwrap()
    }

    fn shear() -> IntMatrix {
        IntMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]).unwrap()
    }

    #[test]
    fn build_identity_triple() {
        let t = Triple::identity(vec![sqrt(2), sqrt(3)]).unwrap();
        assert!(t.a().is_identity());
        assert!(t.b().is_identity());
        assert_eq!(t.w(), &[sqrt(2), sqrt(3)]);
    }

    #[test]
    fn build_shear_triple() {
        // A = [[1,1],[0,1]], v = (sqrt3 + sqrt2, sqrt2) -> w = (sqrt3, sqrt2)
        let v = vec![sqrt(3) + sqrt(2), sqrt(2)];
        let t = Triple::build(shear(), v.clone()).unwrap();
        assert_eq!(t.w(), &[sqrt(3), sqrt(2)]);
        // A w = v exactly
        let av = mat_vec(t.a(), t.w()).unwrap();
        assert_eq!(av, v);
    }

    #[test]
    fn build_rejects_undominated() {
        // w_1 = sqrt2 - sqrt3 < 0
        let r = Triple::build(shear(), vec![sqrt(2), sqrt(3)]);
        assert!(matches!(r, Err(Error::NotDominated(1))));
    }

    #[test]
    fn build_rejects_negative_entry_and_nonunit_det() {
        let m = IntMatrix::from_i64_rows(&[&[1, -1], &[0, 1]]).unwrap();
        assert!(matches!(
            Triple::build(m, vec![sqrt(2), sqrt(3)]),
            Err(Error::NegativeEntry { .. })
        ));
        let m = IntMatrix::from_i64_rows(&[&[2, 0], &[0, 2]]).unwrap();
        assert!(matches!(
            Triple::build(m, vec![sqrt(2), sqrt(3)]),
            Err(Error::DetNotUnit(_))
        ));
    }

    #[test]
    fn permissibility_examples() {
        let t = Triple::identity(vec![sqrt(2), sqrt(3)]).unwrap();
        // w_2 - w_1 = sqrt3 - sqrt2 > 0
        assert!(t.is_permissible(&ElementaryOp::col_add(1, 2)).unwrap());
        assert!(!t.is_permissible(&ElementaryOp::col_add(2, 1)).unwrap());

        let t = Triple::build(shear(), vec![sqrt(3) + sqrt(2), sqrt(2)]).unwrap();
        assert!(t.is_permissible(&ElementaryOp::row_sub(1, 2)).unwrap());
        assert!(!t.is_permissible(&ElementaryOp::row_sub(2, 1)).unwrap());
    }

    #[test]
    fn apply_col_add() {
        let t = Triple::build(shear(), vec![sqrt(3) + sqrt(2), sqrt(2)]).unwrap();
        let t2 = t.apply(&ElementaryOp::col_add(2, 1)).unwrap();
        let expect_a = IntMatrix::from_i64_rows(&[&[1, 2], &[0, 1]]).unwrap();
        assert_eq!(*t2.a(), expect_a);
        assert_eq!(t2.w(), &[sqrt(3) - sqrt(2), sqrt(2)]);
        assert_eq!(t2.v(), t.v());
        let av = mat_vec(t2.a(), t2.w()).unwrap();
        assert_eq!(av, t2.v().to_vec());
        t2.check_invariants().unwrap();
    }

    #[test]
    fn apply_row_sub() {
        let t = Triple::build(shear(), vec![sqrt(3) + sqrt(2), sqrt(2)]).unwrap();
        let t2 = t.apply(&ElementaryOp::row_sub(1, 2)).unwrap();
        assert!(t2.a().is_identity());
        assert_eq!(t2.v(), &[sqrt(3), sqrt(2)]);
        assert_eq!(t2.w(), t.w());
        t2.check_invariants().unwrap();
    }

    #[test]
    fn apply_row_swap() {
        let t = Triple::identity(vec![sqrt(2), sqrt(3)]).unwrap();
        let t2 = t.apply(&ElementaryOp::row_swap(1, 2)).unwrap();
        let expect_a = IntMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(*t2.a(), expect_a);
        assert_eq!(t2.v(), &[sqrt(3), sqrt(2)]);
        assert_eq!(t2.w(), t.w());
        assert_eq!(t2.det(), -1);
        t2.check_invariants().unwrap();
    }

    #[test]
    fn apply_col_sub_updates_w_by_recomputation() {
        // A = [[1,1],[0,1]]: subtracting column 1 from column 2 reaches the
        // identity and w_1 gains w_2.
        let t = Triple::build(shear(), vec![sqrt(3) + sqrt(2), sqrt(2)]).unwrap();
        let t2 = t.apply(&ElementaryOp::col_sub(2, 1)).unwrap();
        assert!(t2.a().is_identity());
        assert_eq!(t2.w(), &[sqrt(3) + sqrt(2), sqrt(2)]);
        assert_eq!(t2.v(), t.v());
        t2.check_invariants().unwrap();
    }

    #[test]
    fn impermissible_apply_fails() {
        let t = Triple::identity(vec![sqrt(2), sqrt(3)]).unwrap();
        let r = t.apply(&ElementaryOp::col_add(2, 1));
        assert!(matches!(r, Err(Error::NotPermissible { step: None })));
        let r = t.apply(&ElementaryOp::col_add(1, 1));
        assert!(matches!(r, Err(Error::EqualIndices)));
        let r = t.apply(&ElementaryOp::col_add(1, 3));
        assert!(matches!(r, Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_of(&IntMatrix::identity(4)).unwrap(), BigUint::from(1u32));
        assert_eq!(beta_of(&shear()).unwrap(), BigUint::from(1u32));
        let m = IntMatrix::from_i64_rows(&[&[2, 1, 1], &[0, 1, 2], &[1, 1, 1]]).unwrap();
        // first column of the inverse is (1, -2, 1): A (1,-2,1)^t = e_1
        assert_eq!(beta_of(&m).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn replay_examples() {
        let t = Triple::build(shear(), vec![sqrt(3) + sqrt(2), sqrt(2)]).unwrap();
        assert_eq!(replay(&t, &OpScript::empty()).unwrap(), t);

        let script = OpScript::new(vec![], vec![ElementaryOp::row_sub(1, 2)]);
        let end = replay(&t, &script).unwrap();
        assert!(end.a().is_identity());
    }

    #[test]
    fn replay_rejects_phase_violation() {
        let t = Triple::build(shear(), vec![sqrt(3) + sqrt(2), sqrt(2)]).unwrap();
        let script = OpScript::new(vec![ElementaryOp::row_sub(1, 2)], vec![]);
        assert!(matches!(
            replay(&t, &script),
            Err(Error::PhaseViolation { step: 1, .. })
        ));
        let mut script = OpScript::new(vec![], vec![ElementaryOp::col_sub(2, 1)]);
        script.phase2_kind = Phase2Kind::RowSub;
        assert!(matches!(
            replay(&t, &script),
            Err(Error::PhaseViolation { step: 1, .. })
        ));
    }

    #[test]
    fn replay_reports_impermissible_step() {
        let t = Triple::identity(vec![sqrt(2), sqrt(3)]).unwrap();
        let script = OpScript::new(
            vec![ElementaryOp::col_add(1, 2), ElementaryOp::col_add(1, 2)],
            vec![],
        );
        // first one is permissible (consumes the gap), second one is not:
        // after C_12, w = (sqrt2, sqrt3 - sqrt2) and w_2 - w_1 < 0
        assert!(matches!(
            replay(&t, &script),
            Err(Error::NotPermissible { step: Some(2) })
        ));
    }

    #[test]
    fn inverse_row_sub_roundtrip() {
        let t = Triple::identity(vec![sqrt(2), sqrt(3), sqrt(5)]).unwrap();
        let t2 = t.apply_inverse_row_sub(1, 3).unwrap();
        t2.check_invariants().unwrap();
        let back = t2.apply(&ElementaryOp::row_sub(1, 3)).unwrap();
        assert_eq!(back, t);
    }
}
