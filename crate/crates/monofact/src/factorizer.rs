//! Constructive reduction of a triple to the identity matrix.
//!
//! The recursion works on standalone triples. At each level some row serves
//! as the pivot: its column of `B` is collapsed to a `{+1, -1}` pair, which
//! exhibits column `k` as column `p` minus a standard basis vector. Deleting
//! the pivot row and pivot column gives an (n-1)-triple; its factorization is
//! lifted back through the quadruple correspondence, a cleanup pass of row
//! subtractions empties the pivot row, and the residual permutation is
//! discharged by row interchanges appended to phase 1 with the phase-2 row
//! subtractions conjugated to match.
//!
//! Any live row is a legal pivot, and the choice drives the size of the
//! entries the construction passes through, which in turn decides how many
//! single-step subtractions the later phases emit. `factorize` therefore
//! searches pivot orders cheapest-first under an entry/op budget, backtracks
//! out of orders that blow up, and escalates the budget only when no order
//! fits; abandoned attempts never reach the emitted script.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::scalar::Valuation;
use crate::triple::{replay, ElementaryOp, OpScript, Phase2Kind, Triple};

/// Ordered live row and column labels of the submatrix a recursion level
/// works on. The first live row is the pivot row: its `B`-column drives
/// allowability. Realizes "without loss of generality" relabelings without
/// physically permuting columns, which the operation alphabet cannot do.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveIndexFrame {
    live_rows: Vec<usize>,
    live_cols: Vec<usize>,
}

impl ActiveIndexFrame {
    pub fn full(n: usize) -> Self {
        ActiveIndexFrame {
            live_rows: (1..=n).collect(),
            live_cols: (1..=n).collect(),
        }
    }

    pub fn new(live_rows: Vec<usize>, live_cols: Vec<usize>) -> Result<Self> {
        if live_rows.is_empty() || live_rows.len() != live_cols.len() {
            return Err(Error::PreconditionViolation(
                "frame needs equally many live rows and columns, at least one each".into(),
            ));
        }
        Ok(ActiveIndexFrame {
            live_rows,
            live_cols,
        })
    }

    /// The row label whose `B`-column the current level eliminates.
    pub fn pivot_row(&self) -> usize {
        self.live_rows[0]
    }

    pub fn live_rows(&self) -> &[usize] {
        &self.live_rows
    }

    pub fn live_cols(&self) -> &[usize] {
        &self.live_cols
    }
}

/// A triple together with labels `(p, r, k)` such that column `k` equals
/// column `p` minus the `r`-th standard basis column.
#[derive(Debug, Clone)]
pub struct Quadruple<S: Valuation> {
    pub triple: Triple<S>,
    pub pivot_col: usize,
    pub pivot_row: usize,
    pub unit_col: usize,
}

impl<S: Valuation> Quadruple<S> {
    pub fn new(
        triple: Triple<S>,
        pivot_col: usize,
        pivot_row: usize,
        unit_col: usize,
    ) -> Result<Self> {
        let n = triple.n();
        for label in [pivot_col, pivot_row, unit_col] {
            if label == 0 || label > n {
                return Err(Error::IndexOutOfRange { index: label, n });
            }
        }
        if unit_col == pivot_col {
            return Err(Error::EqualIndices);
        }
        for row in 1..=n {
            let expected = triple.a_entry(row, pivot_col)
                - BigInt::from(if row == pivot_row { 1 } else { 0 });
            if *triple.a_entry(row, unit_col) != expected {
                return Err(Error::PreconditionViolation(format!(
                    "column {unit_col} is not column {pivot_col} minus e_{pivot_row}"
                )));
            }
        }
        Ok(Quadruple {
            triple,
            pivot_col,
            pivot_row,
            unit_col,
        })
    }
}

/// How a column addition relates to the pivot column of `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarClass {
    /// Both inverse entries nonzero with the same sign.
    Allowable,
    /// At least one inverse entry is zero.
    ZeroTouch,
    /// Nonzero entries of opposite sign: not star-allowable.
    Opposed,
}

/// Classify `ColAdd{i,j}` against column `pivot` of the inverse.
pub fn col_add_star_class<S: Valuation>(
    t: &Triple<S>,
    i: usize,
    j: usize,
    pivot: usize,
) -> StarClass {
    let bi = t.b_entry(i, pivot);
    let bj = t.b_entry(j, pivot);
    if bi.is_zero() || bj.is_zero() {
        StarClass::ZeroTouch
    } else if bi.sign() == bj.sign() {
        StarClass::Allowable
    } else {
        StarClass::Opposed
    }
}

fn beta_live<S: Valuation>(t: &Triple<S>, pivot: usize, live_cols: &[usize]) -> BigUint {
    live_cols
        .iter()
        .map(|&c| t.b_entry(c, pivot).abs())
        .max()
        .unwrap_or_else(BigInt::zero)
        .to_biguint()
        .unwrap()
}

/// Label with the largest w among the candidates. Strictness comes from
/// rational independence; an exact tie is refused.
fn max_w_label<S: Valuation>(
    t: &Triple<S>,
    candidates: impl Iterator<Item = usize>,
) -> Result<usize> {
    let mut best: Option<usize> = None;
    for c in candidates {
        best = Some(match best {
            None => c,
            Some(b) => match t.w()[c - 1].try_cmp(&t.w()[b - 1])? {
                std::cmp::Ordering::Greater => c,
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Equal => {
                    return Err(Error::IndependenceViolation(format!(
                        "w[{c}] equals w[{b}] exactly"
                    )))
                }
            },
        });
    }
    best.ok_or_else(|| Error::Integrity("no candidate labels".into()))
}

/// Budget for one whole construction attempt: a ceiling on matrix entries
/// and a global countdown of operations, shared across every stage and every
/// explored branch of that attempt.
#[derive(Debug)]
struct Limits {
    max_entry: BigInt,
    remaining_ops: std::cell::Cell<usize>,
}

impl Limits {
    /// One unit of emitted work; false once the attempt's budget is gone.
    fn charge(&self) -> bool {
        let left = self.remaining_ops.get();
        if left == 0 {
            return false;
        }
        self.remaining_ops.set(left - 1);
        true
    }
}

/// Outcome of a budgeted attempt: finished, or abandoned over budget.
enum Attempt<T> {
    Done(T),
    Over,
}

macro_rules! attempt {
    ($e:expr) => {
        match $e? {
            Attempt::Done(v) => v,
            Attempt::Over => return Ok(Attempt::Over),
        }
    };
}

/// Apply a star-allowable column addition, checking the bookkeeping facts the
/// construction relies on: the op really is star-allowable, `beta` over the
/// live columns does not increase, and when the touched pair keeps its sign
/// its entry strictly shrinks. Signals `Over` when the budget is exhausted.
fn apply_star_checked<S: Valuation>(
    cur: &Triple<S>,
    op: ElementaryOp,
    pivot: usize,
    live_cols: &[usize],
    ops: &mut Vec<ElementaryOp>,
    lim: Option<&Limits>,
) -> Result<Attempt<Triple<S>>> {
    let ElementaryOp::ColAdd { i, j } = op else {
        return Err(Error::Integrity(format!("{op} is not a column addition")));
    };
    if col_add_star_class(cur, i, j, pivot) == StarClass::Opposed {
        return Err(Error::Integrity(format!(
            "{op} is not star-allowable for pivot column {pivot}"
        )));
    }
    let beta_before = beta_live(cur, pivot, live_cols);
    let b_target = cur.b_entry(i, pivot).clone();
    let b_source = cur.b_entry(j, pivot).clone();
    let next = cur.apply(&op).map_err(|e| match e {
        Error::NotPermissible { .. } => {
            Error::Integrity(format!("constructed op {op} is not permissible"))
        }
        other => other,
    })?;
    let beta_after = beta_live(&next, pivot, live_cols);
    if beta_after > beta_before {
        return Err(Error::Integrity(format!(
            "beta increased from {beta_before} to {beta_after} across {op}"
        )));
    }
    let b_source_new = next.b_entry(j, pivot);
    if !b_target.is_zero()
        && !b_source.is_zero()
        && b_source_new.sign() == b_source.sign()
        && b_source_new.abs() >= b_source.abs()
    {
        return Err(Error::Integrity(format!(
            "pair measure did not decrease across {op}"
        )));
    }
    if let Some(lim) = lim {
        if !lim.charge() || next.a().max_abs_entry() > lim.max_entry {
            return Ok(Attempt::Over);
        }
    }
    ops.push(op);
    Ok(Attempt::Done(next))
}

fn signed_tokens<S: Valuation>(
    t: &Triple<S>,
    pivot: usize,
    live_cols: &[usize],
) -> (Vec<usize>, Vec<usize>) {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for &c in live_cols {
        match t.b_entry(c, pivot).sign() {
            num_bigint::Sign::Plus => pos.push(c),
            num_bigint::Sign::Minus => neg.push(c),
            num_bigint::Sign::NoSign => {}
        }
    }
    (pos, neg)
}

/// Allowable column additions until the pivot column of `B`, restricted to
/// the live columns, has at most one positive and at most one negative entry.
///
/// Strategy: among same-sign pairs, perform the addition whose updated entry
/// comes out smallest in absolute value, breaking ties toward the smallest
/// column growth. The direction per pair is forced by which `w` is larger.
/// Each op is allowable and keeps `beta` from growing; the pair measure
/// strictly decreases while a pair keeps its sign.
pub fn collapse_first_column<S: Valuation>(
    t: &Triple<S>,
    frame: &ActiveIndexFrame,
) -> Result<(Vec<ElementaryOp>, Triple<S>)> {
    let mut ops = Vec::new();
    match collapse_core(t, frame, &mut ops, None)? {
        Attempt::Done(end) => Ok((ops, end)),
        Attempt::Over => unreachable!("no budget was set"),
    }
}

fn collapse_core<S: Valuation>(
    t: &Triple<S>,
    frame: &ActiveIndexFrame,
    ops: &mut Vec<ElementaryOp>,
    lim: Option<&Limits>,
) -> Result<Attempt<Triple<S>>> {
    let pivot = frame.pivot_row();
    let live = frame.live_cols();
    let mut cur = t.clone();
    loop {
        let (pos, neg) = signed_tokens(&cur, pivot, live);
        if pos.len() <= 1 && neg.len() <= 1 {
            break;
        }
        let col_weight = |c: usize| -> BigInt {
            (0..cur.a().n()).map(|r| cur.a()[(r, c - 1)].clone()).sum()
        };
        let mut best: Option<(BigInt, BigInt, usize, usize)> = None;
        for class in [&pos, &neg] {
            if class.len() < 2 {
                continue;
            }
            for (a, &x) in class.iter().enumerate() {
                for &y in &class[a + 1..] {
                    let (target, source) = match cur.w()[x - 1].try_cmp(&cur.w()[y - 1])? {
                        std::cmp::Ordering::Greater => (y, x),
                        std::cmp::Ordering::Less => (x, y),
                        std::cmp::Ordering::Equal => {
                            return Err(Error::IndependenceViolation(format!(
                                "w[{x}] equals w[{y}] exactly"
                            )))
                        }
                    };
                    let outcome =
                        (cur.b_entry(source, pivot) - cur.b_entry(target, pivot)).abs();
                    let growth = col_weight(target) + col_weight(source);
                    let candidate = (outcome, growth, target, source);
                    if best.as_ref().map(|b| candidate < *b).unwrap_or(true) {
                        best = Some(candidate);
                    }
                }
            }
        }
        let (_, _, target, source) = best.expect("a same-sign pair exists");
        cur = attempt!(apply_star_checked(
            &cur,
            ElementaryOp::col_add(target, source),
            pivot,
            live,
            ops,
            lim,
        ));
    }
    Ok(Attempt::Done(cur))
}

/// One strict decrease of `beta = max |b_{k,pivot}|`, given that the pivot
/// column of `B` holds exactly one positive and one negative entry and
/// `beta > 1`. Star-allowable column additions among the heavy token, the
/// light token, and one zero token; the count of additions targeting the
/// heavy column is bounded by `floor((w_light + w_zero) / w_heavy) + 1`.
pub fn reduce_beta_once<S: Valuation>(
    t: &Triple<S>,
    frame: &ActiveIndexFrame,
    pos_tok: usize,
    neg_tok: usize,
) -> Result<(Vec<ElementaryOp>, Triple<S>)> {
    let mut ops = Vec::new();
    match reduce_beta_core(t, frame, pos_tok, neg_tok, &mut ops, None)? {
        Attempt::Done(end) => Ok((ops, end)),
        Attempt::Over => unreachable!("no budget was set"),
    }
}

fn reduce_beta_core<S: Valuation>(
    t: &Triple<S>,
    frame: &ActiveIndexFrame,
    pos_tok: usize,
    neg_tok: usize,
    ops: &mut Vec<ElementaryOp>,
    lim: Option<&Limits>,
) -> Result<Attempt<Triple<S>>> {
    let pivot = frame.pivot_row();
    let live = frame.live_cols();
    if live.len() < 3 {
        return Err(Error::PreconditionViolation(
            "beta reduction needs at least 3 live columns".into(),
        ));
    }
    let b_pos = t.b_entry(pos_tok, pivot).clone();
    let b_neg = t.b_entry(neg_tok, pivot).clone();
    if !b_pos.is_positive() || !b_neg.is_negative() {
        return Err(Error::PreconditionViolation(
            "expected a positive and a negative pivot-column entry".into(),
        ));
    }
    for &c in live {
        if c != pos_tok && c != neg_tok && !t.b_entry(c, pivot).is_zero() {
            return Err(Error::PreconditionViolation(
                "pivot column must have exactly two nonzero entries".into(),
            ));
        }
    }
    let beta0 = beta_live(t, pivot, live);
    if beta0 <= BigUint::one() {
        return Err(Error::PreconditionViolation(
            "beta reduction requires beta > 1".into(),
        ));
    }
    if b_pos.abs() == b_neg.abs() {
        return Err(Error::Integrity(
            "both pivot entries share the maximum magnitude".into(),
        ));
    }
    let (heavy, light) = if b_pos.abs() > b_neg.abs() {
        (pos_tok, neg_tok)
    } else {
        (neg_tok, pos_tok)
    };
    // The largest-w zero token keeps the permissibility-massage loops short.
    let zero_tok = max_w_label(
        t,
        live.iter().copied().filter(|&c| c != heavy && c != light),
    )?;

    let mut cur = t.clone();

    // w of the heavy column is untouched until the final drop, so the budget
    // is evaluated once, up front.
    let partner_sum = cur.w()[light - 1].add(&cur.w()[zero_tok - 1]);
    let budget = partner_sum.floor_quotient(&cur.w()[heavy - 1])? + BigUint::one();
    let mut heavy_target_count = BigUint::zero();

    let heavy_sign = cur.b_entry(heavy, pivot).sign();
    loop {
        if beta_live(&cur, pivot, live) < beta0 {
            break;
        }
        let b1 = cur.b_entry(light, pivot).clone();
        let b2 = cur.b_entry(zero_tok, pivot).clone();
        match (b1.is_zero(), b2.is_zero()) {
            (true, true) => {
                return Err(Error::Integrity(
                    "both partner entries vanished while beta is above 1".into(),
                ))
            }
            (false, false) if b1.sign() == b2.sign() => {
                // Partner session: allowable ops inside the pair until it
                // stops being same-signed. Step count is bounded by the sum
                // of magnitudes.
                let mut fuel = (b1.abs() + b2.abs()).to_biguint().unwrap();
                loop {
                    let c1 = cur.b_entry(light, pivot).clone();
                    let c2 = cur.b_entry(zero_tok, pivot).clone();
                    if c1.is_zero() || c2.is_zero() || c1.sign() != c2.sign() {
                        break;
                    }
                    if fuel.is_zero() {
                        return Err(Error::Integrity(
                            "partner session exceeded its step bound".into(),
                        ));
                    }
                    fuel -= BigUint::one();
                    let (target, source) =
                        match cur.w()[light - 1].try_cmp(&cur.w()[zero_tok - 1])? {
                            std::cmp::Ordering::Greater => (zero_tok, light),
                            std::cmp::Ordering::Less => (light, zero_tok),
                            std::cmp::Ordering::Equal => {
                                return Err(Error::IndependenceViolation(
                                    "equal w values in partner session".into(),
                                ))
                            }
                        };
                    cur = attempt!(apply_star_checked(
                        &cur,
                        ElementaryOp::col_add(target, source),
                        pivot,
                        live,
                        ops,
                        lim,
                    ));
                }
            }
            _ => {
                // Find a partner sharing the heavy sign, manufacturing one
                // from the zero entry when necessary.
                let partner = if !b1.is_zero() && b1.sign() == heavy_sign {
                    Some(light)
                } else if !b2.is_zero() && b2.sign() == heavy_sign {
                    Some(zero_tok)
                } else {
                    None
                };
                match partner {
                    Some(u) => {
                        // Heavy step: the direction decides between dropping
                        // beta now and flipping the partner at the cost of
                        // one budgeted addition.
                        match cur.w()[u - 1].try_cmp(&cur.w()[heavy - 1])? {
                            std::cmp::Ordering::Less => {
                                cur = attempt!(apply_star_checked(
                                    &cur,
                                    ElementaryOp::col_add(u, heavy),
                                    pivot,
                                    live,
                                    ops,
                                    lim,
                                ));
                                // b_heavy shrank strictly: loop head exits.
                            }
                            std::cmp::Ordering::Greater => {
                                heavy_target_count += BigUint::one();
                                if heavy_target_count > budget {
                                    return Err(Error::Integrity(
                                        "heavy-target additions exceeded the quotient bound"
                                            .into(),
                                    ));
                                }
                                cur = attempt!(apply_star_checked(
                                    &cur,
                                    ElementaryOp::col_add(heavy, u),
                                    pivot,
                                    live,
                                    ops,
                                    lim,
                                ));
                            }
                            std::cmp::Ordering::Equal => {
                                return Err(Error::IndependenceViolation(
                                    "equal w values in heavy step".into(),
                                ))
                            }
                        }
                    }
                    None => {
                        // One partner is zero and the other opposes the heavy
                        // sign: copy the nonzero entry onto the zero token,
                        // negated, after making that addition permissible.
                        let (x, z) = if b1.is_zero() {
                            (zero_tok, light)
                        } else {
                            (light, zero_tok)
                        };
                        let mut fuel =
                            cur.w()[x - 1].floor_quotient(&cur.w()[z - 1])? + BigUint::one();
                        while cur.w()[x - 1].try_cmp(&cur.w()[z - 1])?
                            == std::cmp::Ordering::Greater
                        {
                            if fuel.is_zero() {
                                return Err(Error::Integrity(
                                    "permissibility massage exceeded its bound".into(),
                                ));
                            }
                            fuel -= BigUint::one();
                            cur = attempt!(apply_star_checked(
                                &cur,
                                ElementaryOp::col_add(z, x),
                                pivot,
                                live,
                                ops,
                                lim,
                            ));
                        }
                        cur = attempt!(apply_star_checked(
                            &cur,
                            ElementaryOp::col_add(x, z),
                            pivot,
                            live,
                            ops,
                            lim,
                        ));
                    }
                }
            }
        }
    }
    debug_assert!(beta_live(&cur, pivot, live) < beta0);
    Ok(Attempt::Done(cur))
}

/// Star-allowable column additions until the pivot column of `B` is exactly
/// `+1` at one label and `-1` at another, zero elsewhere. Returns the two
/// labels: the positive one is the pivot column of the quadruple, the
/// negative one its unit column.
pub fn make_unit_pair<S: Valuation>(
    t: &Triple<S>,
    frame: &ActiveIndexFrame,
) -> Result<(Vec<ElementaryOp>, Triple<S>, usize, usize)> {
    match make_unit_pair_core(t, frame, None)? {
        Attempt::Done(v) => Ok(v),
        Attempt::Over => unreachable!("no budget was set"),
    }
}

#[allow(clippy::type_complexity)]
fn make_unit_pair_core<S: Valuation>(
    t: &Triple<S>,
    frame: &ActiveIndexFrame,
    lim: Option<&Limits>,
) -> Result<Attempt<(Vec<ElementaryOp>, Triple<S>, usize, usize)>> {
    let pivot = frame.pivot_row();
    let live = frame.live_cols();
    if live.len() < 2 {
        return Err(Error::PreconditionViolation(
            "unit pair needs at least 2 live columns".into(),
        ));
    }
    let mut cur = t.clone();
    let mut ops = Vec::new();
    loop {
        cur = attempt!(collapse_core(&cur, frame, &mut ops, lim));
        let nonzero: Vec<(usize, BigInt)> = live
            .iter()
            .filter_map(|&c| {
                let b = cur.b_entry(c, pivot).clone();
                (!b.is_zero()).then_some((c, b))
            })
            .collect();
        match nonzero.len() {
            0 => {
                return Err(Error::Integrity(
                    "pivot column of the inverse vanished".into(),
                ))
            }
            1 => {
                let (i, b) = &nonzero[0];
                let i = *i;
                if *b != BigInt::one() {
                    return Err(Error::Integrity(format!(
                        "single pivot entry is {b}, expected exactly 1"
                    )));
                }
                // Column i is the r-th basis column. Pick the partner with
                // the largest w (fewest additions needed to bring w_i below
                // it), lower w_i if necessary, then one addition targeting i
                // puts -1 at the partner.
                let j = max_w_label(&cur, live.iter().copied().filter(|&c| c != i))?;
                loop {
                    match cur.w()[i - 1].try_cmp(&cur.w()[j - 1])? {
                        std::cmp::Ordering::Greater => {
                            cur = attempt!(apply_star_checked(
                                &cur,
                                ElementaryOp::col_add(j, i),
                                pivot,
                                live,
                                &mut ops,
                                lim,
                            ));
                        }
                        std::cmp::Ordering::Less => break,
                        std::cmp::Ordering::Equal => {
                            return Err(Error::IndependenceViolation(
                                "equal w values while forming the unit pair".into(),
                            ))
                        }
                    }
                }
                cur = attempt!(apply_star_checked(
                    &cur,
                    ElementaryOp::col_add(i, j),
                    pivot,
                    live,
                    &mut ops,
                    lim,
                ));
                check_unit_pair(&cur, pivot, live, i, j)?;
                return Ok(Attempt::Done((ops, cur, i, j)));
            }
            2 => {
                let (x, bx) = &nonzero[0];
                let (y, by) = &nonzero[1];
                if bx.sign() == by.sign() {
                    return Err(Error::Integrity(
                        "two same-signed entries survived the collapse".into(),
                    ));
                }
                let (pos, neg) = if bx.is_positive() { (*x, *y) } else { (*y, *x) };
                let beta = beta_live(&cur, pivot, live);
                if beta == BigUint::one() {
                    check_unit_pair(&cur, pivot, live, pos, neg)?;
                    return Ok(Attempt::Done((ops, cur, pos, neg)));
                }
                let beta_before = beta;
                cur = attempt!(reduce_beta_core(&cur, frame, pos, neg, &mut ops, lim));
                if beta_live(&cur, pivot, live) >= beta_before {
                    return Err(Error::Integrity(
                        "beta failed to decrease across a reduction round".into(),
                    ));
                }
            }
            _ => {
                return Err(Error::Integrity(
                    "collapse endpoint left more than two nonzero entries".into(),
                ))
            }
        }
    }
}

fn check_unit_pair<S: Valuation>(
    t: &Triple<S>,
    pivot: usize,
    live: &[usize],
    pos: usize,
    neg: usize,
) -> Result<()> {
    for &c in live {
        let b = t.b_entry(c, pivot);
        let expect = if c == pos {
            BigInt::one()
        } else if c == neg {
            -BigInt::one()
        } else {
            BigInt::zero()
        };
        if *b != expect {
            return Err(Error::Integrity(format!(
                "pivot column entry at {c} is {b}, expected {expect}"
            )));
        }
    }
    Ok(())
}

/// Sub-position (0-based) to full 1-based label maps for a projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexTranslation {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl IndexTranslation {
    pub fn full_row(&self, sub_label: usize) -> usize {
        self.rows[sub_label - 1]
    }
    pub fn full_col(&self, sub_label: usize) -> usize {
        self.cols[sub_label - 1]
    }
}

/// Delete the pivot row and pivot column of a quadruple, producing the
/// (n-1)-triple of the recursion along with the label translation. The
/// deleted-minor determinant picks up the sign `(-1)^(p+r)`, so the two
/// leading live rows are enumerated swapped when `p + r` is odd; with that
/// ordering the sub-determinant equals the parent determinant exactly. The
/// sub-values satisfy, exactly: `w~` at the unit column equals
/// `w_pivot + w_unit`, and `w~` elsewhere equals the parent `w`.
pub fn project_quadruple<S: Valuation>(
    q: &Quadruple<S>,
) -> Result<(Triple<S>, IndexTranslation)> {
    let n = q.triple.n();
    let (p, r, k) = (q.pivot_col, q.pivot_row, q.unit_col);
    let mut rows: Vec<usize> = (1..=n).filter(|&x| x != r).collect();
    let cols: Vec<usize> = (1..=n).filter(|&x| x != p).collect();
    if rows.len() >= 2 && (p + r) % 2 == 1 {
        rows.swap(0, 1);
    }
    let m = rows.len();
    let mut a_sub = IntMatrix::zero(m);
    for (ti, &row) in rows.iter().enumerate() {
        for (tj, &col) in cols.iter().enumerate() {
            a_sub[(ti, tj)] = q.triple.a_entry(row, col).clone();
        }
    }
    let v_sub: Vec<S> = rows
        .iter()
        .map(|&row| q.triple.v()[row - 1].clone())
        .collect();
    let sub = Triple::build(a_sub, v_sub).map_err(|e| match e {
        Error::IndependenceViolation(msg) => Error::IndependenceViolation(msg),
        other => Error::Integrity(format!("projected triple failed validation: {other}")),
    })?;
    if m >= 2 && sub.det() != q.triple.det() {
        return Err(Error::Integrity(format!(
            "sub-determinant {} differs from parent determinant {}",
            sub.det(),
            q.triple.det()
        )));
    }
    // Exact identities between the sub-values and the parent values.
    let w = q.triple.w();
    for (tj, &col) in cols.iter().enumerate() {
        let expected = if col == k {
            w[p - 1].add(&w[k - 1])
        } else {
            w[col - 1].clone()
        };
        if sub.w()[tj] != expected {
            return Err(Error::Integrity(format!(
                "projected w at column {col} is {}, expected {expected}",
                sub.w()[tj]
            )));
        }
    }
    Ok((sub, IndexTranslation { rows, cols }))
}

/// Replays a sub-level phase-1 script on the full triple, translating each
/// operation through the quadruple correspondence. Operations touching the
/// unit column expand to two column additions; one case reassigns the unit
/// column.
#[derive(Debug, Clone)]
pub struct QuadrupleLifter<S: Valuation> {
    state: Triple<S>,
    sub_state: Triple<S>,
    map: IndexTranslation,
    pivot_col: usize,
    pivot_row: usize,
    unit_col: usize,
}

impl<S: Valuation> QuadrupleLifter<S> {
    pub fn new(q: Quadruple<S>, sub: Triple<S>, map: IndexTranslation) -> Self {
        QuadrupleLifter {
            state: q.triple,
            sub_state: sub,
            map,
            pivot_col: q.pivot_col,
            pivot_row: q.pivot_row,
            unit_col: q.unit_col,
        }
    }

    pub fn state(&self) -> &Triple<S> {
        &self.state
    }

    pub fn unit_col(&self) -> usize {
        self.unit_col
    }

    /// Translate one phase-1 sub-level operation into 1 or 2 operations on
    /// the full triple, apply them, and verify the correspondence still
    /// holds. Phase-2 row subtractions lift by bare row relabeling and are
    /// handled by the recursion directly.
    pub fn lift_sub_op(&mut self, sub_op: &ElementaryOp) -> Result<Vec<ElementaryOp>> {
        let (ops, new_unit) = match *sub_op {
            ElementaryOp::RowSwap { i, j } => (
                vec![ElementaryOp::row_swap(
                    self.map.full_row(i),
                    self.map.full_row(j),
                )],
                self.unit_col,
            ),
            ElementaryOp::ColAdd { i, j } => {
                let fi = self.map.full_col(i);
                let fj = self.map.full_col(j);
                let k = self.unit_col;
                let p = self.pivot_col;
                if fi != k && fj != k {
                    (vec![ElementaryOp::col_add(fi, fj)], k)
                } else if fi == k {
                    // Target is the unit column: both it and the pivot
                    // column gain the source, preserving their difference.
                    (
                        vec![ElementaryOp::col_add(k, fj), ElementaryOp::col_add(p, fj)],
                        k,
                    )
                } else {
                    // Source is the unit column. Whether w_p or w_fi is
                    // larger decides between borrowing from the pivot column
                    // directly and rebasing the unit column onto fi.
                    match self.state.w()[p - 1].try_cmp(&self.state.w()[fi - 1])? {
                        std::cmp::Ordering::Greater => {
                            (vec![ElementaryOp::col_add(fi, p)], k)
                        }
                        std::cmp::Ordering::Less => (
                            vec![ElementaryOp::col_add(p, fi), ElementaryOp::col_add(fi, k)],
                            fi,
                        ),
                        std::cmp::Ordering::Equal => {
                            return Err(Error::IndependenceViolation(
                                "equal w values while lifting".into(),
                            ))
                        }
                    }
                }
            }
            ElementaryOp::RowSub { .. } | ElementaryOp::ColSub { .. } => {
                return Err(Error::PreconditionViolation(
                    "only phase-1 operations pass through the lifter".into(),
                ))
            }
        };
        for op in &ops {
            self.state.apply_mut(op).map_err(|e| match e {
                Error::NotPermissible { .. } => {
                    Error::Integrity(format!("lifted op {op} is not permissible"))
                }
                other => other,
            })?;
        }
        self.unit_col = new_unit;
        self.sub_state.apply_mut(sub_op).map_err(|e| match e {
            Error::NotPermissible { .. } => {
                Error::Integrity(format!("sub op {sub_op} is not permissible"))
            }
            other => other,
        })?;
        self.verify_alignment()?;
        Ok(ops)
    }

    /// The sub-state must equal the full state restricted through the maps,
    /// the quadruple relation must hold for the current unit column, and the
    /// projected values must satisfy their exact identities.
    fn verify_alignment(&self) -> Result<()> {
        let m = self.sub_state.n();
        for t in 1..=m {
            for u in 1..=m {
                let full = self
                    .state
                    .a_entry(self.map.full_row(t), self.map.full_col(u));
                if full != self.sub_state.a_entry(t, u) {
                    return Err(Error::Integrity(format!(
                        "sub-matrix alignment broke at ({t}, {u})"
                    )));
                }
            }
            if self.sub_state.v()[t - 1] != self.state.v()[self.map.full_row(t) - 1] {
                return Err(Error::Integrity(format!("sub-v alignment broke at {t}")));
            }
        }
        let n = self.state.n();
        for row in 1..=n {
            let expected = self.state.a_entry(row, self.pivot_col)
                - BigInt::from(if row == self.pivot_row { 1 } else { 0 });
            if *self.state.a_entry(row, self.unit_col) != expected {
                return Err(Error::Integrity(
                    "quadruple relation broke during lifting".into(),
                ));
            }
        }
        let w = self.state.w();
        for (tj, &col) in self.map.cols.iter().enumerate() {
            let expected = if col == self.unit_col {
                w[self.pivot_col - 1].add(&w[self.unit_col - 1])
            } else {
                w[col - 1].clone()
            };
            if self.sub_state.w()[tj] != expected {
                return Err(Error::Integrity(format!(
                    "sub-w identity broke at column {col}"
                )));
            }
        }
        Ok(())
    }
}

/// With the off-pivot block reduced to basis rows, empty the pivot row by
/// single-step row subtractions and finish by clearing the unit row's borrow
/// from the pivot column. Afterwards the matrix is a permutation pattern.
pub fn cleanup_rows<S: Valuation>(
    t: &Triple<S>,
    unit_col: usize,
    pivot_col: usize,
    pivot_row: usize,
) -> Result<(Vec<ElementaryOp>, Triple<S>)> {
    match cleanup_rows_core(t, unit_col, pivot_col, pivot_row, None)? {
        Attempt::Done(v) => Ok(v),
        Attempt::Over => unreachable!("no budget was set"),
    }
}

#[allow(clippy::type_complexity)]
fn cleanup_rows_core<S: Valuation>(
    t: &Triple<S>,
    unit_col: usize,
    pivot_col: usize,
    pivot_row: usize,
    lim: Option<&Limits>,
) -> Result<Attempt<(Vec<ElementaryOp>, Triple<S>)>> {
    if t.a().is_identity() {
        return Ok(Attempt::Done((Vec::new(), t.clone())));
    }
    let n = t.n();
    let (p, r, k) = (pivot_col, pivot_row, unit_col);
    // Correspondence: every non-pivot row must be a basis vector on the
    // non-pivot columns, with its pivot-column entry mirroring the unit
    // column.
    let mut col_of_row: BTreeMap<usize, usize> = BTreeMap::new();
    let mut seen = vec![false; n + 1];
    for row in 1..=n {
        if row == r {
            continue;
        }
        let mut hit = None;
        for col in 1..=n {
            if col == p {
                continue;
            }
            let e = t.a_entry(row, col);
            if e.is_zero() {
                continue;
            }
            if *e != BigInt::one() || hit.is_some() {
                return Err(Error::Integrity(format!(
                    "row {row} is not a basis vector on the live columns"
                )));
            }
            hit = Some(col);
        }
        let col = hit
            .ok_or_else(|| Error::Integrity(format!("row {row} vanished on the live columns")))?;
        let expect_pivot = BigInt::from(if col == k { 1 } else { 0 });
        if *t.a_entry(row, p) != expect_pivot {
            return Err(Error::Integrity(format!(
                "pivot-column entry of row {row} does not mirror the unit column"
            )));
        }
        if seen[col] {
            return Err(Error::Integrity(format!("column {col} hit twice")));
        }
        seen[col] = true;
        col_of_row.insert(row, col);
    }
    let kappa = col_of_row
        .iter()
        .find(|(_, &c)| c == k)
        .map(|(&row, _)| row)
        .ok_or_else(|| Error::Integrity("no row carries the unit column".into()))?;

    let mut cur = t.clone();
    let mut ops = Vec::new();
    fn push<S: Valuation>(
        cur: &mut Triple<S>,
        op: ElementaryOp,
        ops: &mut Vec<ElementaryOp>,
        lim: Option<&Limits>,
    ) -> Result<Attempt<()>> {
        if let Some(lim) = lim {
            if !lim.charge() {
                return Ok(Attempt::Over);
            }
        }
        cur.apply_mut(&op).map_err(|e| match e {
            Error::NotPermissible { .. } => {
                Error::Integrity(format!("cleanup op {op} is not permissible"))
            }
            other => other,
        })?;
        ops.push(op);
        Ok(Attempt::Done(()))
    }
    // a_{r,p} - 1 subtractions of the unit-carrying row.
    while *cur.a_entry(r, p) > BigInt::one() {
        attempt!(push(&mut cur, ElementaryOp::row_sub(r, kappa), &mut ops, lim));
    }
    // Clear the remaining pivot-row entries, one subtraction per unit.
    for (&row, &col) in &col_of_row {
        if col == k {
            continue;
        }
        while !cur.a_entry(r, col).is_zero() {
            attempt!(push(&mut cur, ElementaryOp::row_sub(r, row), &mut ops, lim));
        }
    }
    // The pivot row is now the p-th basis vector; clear the borrow.
    attempt!(push(&mut cur, ElementaryOp::row_sub(kappa, r), &mut ops, lim));
    permutation_of(cur.a())
        .map_err(|_| Error::Integrity("cleanup did not reach a permutation pattern".into()))?;
    Ok(Attempt::Done((ops, cur)))
}

/// Direct reduction of a 2x2 triple: an antidiagonal pattern forces one row
/// interchange (equivalently, determinant -1), after which entrywise
/// incomparable rows are impossible outside the identity and repeated
/// dominant-row subtractions terminate there.
pub fn base_case_2x2<S: Valuation>(t: &Triple<S>) -> Result<OpScript> {
    let level = match base_case_2x2_core(t, None)? {
        Attempt::Done(level) => level,
        Attempt::Over => unreachable!("no budget was set"),
    };
    Ok(OpScript::new(level.phase1, level.phase2))
}

fn base_case_2x2_core<S: Valuation>(
    t: &Triple<S>,
    lim: Option<&Limits>,
) -> Result<Attempt<LevelResult<S>>> {
    if t.n() != 2 {
        return Err(Error::PreconditionViolation(
            "base case requires exactly 2 live labels".into(),
        ));
    }
    let mut cur = t.clone();
    let mut phase1 = Vec::new();
    if cur.det() == -1 {
        let op = ElementaryOp::row_swap(1, 2);
        cur.apply_mut(&op)?;
        phase1.push(op);
    }
    let mut phase2 = Vec::new();
    while !cur.a().is_identity() {
        if let Some(lim) = lim {
            if !lim.charge() {
                return Ok(Attempt::Over);
            }
        }
        let row1_dominates = (0..2).all(|c| cur.a()[(0, c)] >= cur.a()[(1, c)]);
        let row2_dominates = (0..2).all(|c| cur.a()[(1, c)] >= cur.a()[(0, c)]);
        let op = if row1_dominates && !row2_dominates {
            ElementaryOp::row_sub(1, 2)
        } else if row2_dominates && !row1_dominates {
            ElementaryOp::row_sub(2, 1)
        } else {
            return Err(Error::Integrity(
                "2x2 state is neither dominated nor the identity".into(),
            ));
        };
        cur.apply_mut(&op).map_err(|e| match e {
            Error::NotPermissible { .. } => {
                Error::Integrity(format!("base-case op {op} is not permissible"))
            }
            other => other,
        })?;
        phase2.push(op);
    }
    Ok(Attempt::Done(LevelResult {
        phase1,
        phase2,
        end: cur,
    }))
}

/// Read a permutation off a 0/1 matrix: `sigma[i]` is the column holding the
/// 1 of row `i` (1-based). Fails unless the matrix is exactly a permutation
/// pattern.
pub fn permutation_of(a: &IntMatrix) -> Result<Vec<usize>> {
    let n = a.n();
    let mut sigma = vec![0usize; n + 1];
    let mut used = vec![false; n + 1];
    for i in 0..n {
        let mut hit = None;
        for j in 0..n {
            let e = &a[(i, j)];
            if e.is_zero() {
                continue;
            }
            if *e != BigInt::one() || hit.is_some() {
                return Err(Error::Integrity("not a permutation matrix".into()));
            }
            hit = Some(j + 1);
        }
        let j = hit.ok_or_else(|| Error::Integrity("zero row in permutation".into()))?;
        if used[j] {
            return Err(Error::Integrity("repeated column in permutation".into()));
        }
        used[j] = true;
        sigma[i + 1] = j;
    }
    Ok(sigma)
}

/// Row interchanges turning the permutation pattern `sigma` into the
/// identity, in emission order.
fn swaps_to_identity(sigma: &[usize]) -> Vec<ElementaryOp> {
    let n = sigma.len() - 1;
    let mut cur = sigma.to_vec();
    let mut swaps = Vec::new();
    for pos in 1..=n {
        if cur[pos] == pos {
            continue;
        }
        let other = (pos + 1..=n)
            .find(|&q| cur[q] == pos)
            .expect("permutation carries every column");
        swaps.push(ElementaryOp::row_swap(pos, other));
        cur.swap(pos, other);
    }
    swaps
}

/// One recursion level's output: the level's two phases plus the state its
/// script ends at (identity matrix, final values).
struct LevelResult<S: Valuation> {
    phase1: Vec<ElementaryOp>,
    phase2: Vec<ElementaryOp>,
    end: Triple<S>,
}

/// Factor a triple into a two-phase script whose replay ends at the identity
/// matrix. Every emitted operation is permissible at its application point;
/// the script is re-verified by a full replay before being returned.
pub fn factorize<S: Valuation>(t: &Triple<S>) -> Result<OpScript> {
    // Budget ladder: each rung is one whole search attempt with a global op
    // countdown and an entry ceiling; both escalate per rung and the final
    // rung is unbounded, recovering the plain cheapest-first order.
    let base = t.a().max_abs_entry().max(BigInt::from(16));
    let mut ladder: Vec<Option<Limits>> = Vec::new();
    let mut entry = &base * &base;
    let mut ops = 20_000usize;
    for _ in 0..4 {
        ladder.push(Some(Limits {
            max_entry: entry.clone().max(BigInt::from(ops / 16)),
            remaining_ops: std::cell::Cell::new(ops),
        }));
        entry = &entry * &entry;
        ops = ops.saturating_mul(32);
    }
    ladder.push(None);

    let mut level = None;
    for lim in &ladder {
        if let Attempt::Done(found) = factorize_search(t, lim.as_ref())? {
            level = Some(found);
            break;
        }
    }
    let level = level.ok_or_else(|| {
        Error::Integrity("unbounded construction attempt did not finish".into())
    })?;
    let script = OpScript::new(level.phase1, level.phase2);
    script.validate_grammar()?;
    let end = replay(t, &script).map_err(|e| match e {
        Error::NotPermissible { step } => Error::Integrity(format!(
            "constructed script has an impermissible op at step {step:?}"
        )),
        Error::PhaseViolation { step, what } => {
            Error::Integrity(format!("phase grammar broke at step {step}: {what}"))
        }
        other => other,
    })?;
    if !end.a().is_identity() {
        return Err(Error::Integrity(
            "factorization replay did not end at the identity".into(),
        ));
    }
    if end != level.end {
        return Err(Error::Integrity(
            "replayed end state differs from the constructed end state".into(),
        ));
    }
    Ok(script)
}

fn factorize_search<S: Valuation>(
    t: &Triple<S>,
    lim: Option<&Limits>,
) -> Result<Attempt<LevelResult<S>>> {
    if t.a().is_identity() {
        return Ok(Attempt::Done(LevelResult {
            phase1: Vec::new(),
            phase2: Vec::new(),
            end: t.clone(),
        }));
    }
    let n = t.n();
    if n == 1 {
        // A 1x1 nonnegative unimodular matrix is the identity.
        return Err(Error::Integrity("non-identity 1x1 unimodular matrix".into()));
    }
    if n == 2 {
        return base_case_2x2_core(t, lim);
    }
    // Candidate pivot rows, cheapest inverse column first. Rows whose column
    // already carries beta = 1 skip the reduction dance entirely.
    let mut candidates: Vec<usize> = (1..=n).collect();
    candidates.sort_by_key(|&r| {
        let beta = t.beta_in_col(r);
        let nonzeros = (1..=n).filter(|&c| !t.b_entry(c, r).is_zero()).count();
        (beta, nonzeros, r)
    });
    for pivot_row in candidates {
        match try_level(t, pivot_row, lim)? {
            Attempt::Done(level) => return Ok(Attempt::Done(level)),
            Attempt::Over => continue,
        }
    }
    Ok(Attempt::Over)
}

fn try_level<S: Valuation>(
    t: &Triple<S>,
    pivot_row: usize,
    lim: Option<&Limits>,
) -> Result<Attempt<LevelResult<S>>> {
    let n = t.n();
    let mut live_rows = vec![pivot_row];
    live_rows.extend((1..=n).filter(|&x| x != pivot_row));
    let frame = ActiveIndexFrame::new(live_rows, (1..=n).collect())?;
    let (mut phase1, after_unit, pivot_col, unit_col) =
        attempt!(make_unit_pair_core(t, &frame, lim));
    let quad = Quadruple::new(after_unit, pivot_col, pivot_row, unit_col)?;
    let (sub, map) = project_quadruple(&quad)?;
    let sub_level = attempt!(factorize_search(&sub, lim));
    let mut lifter = QuadrupleLifter::new(quad, sub, map.clone());
    for op in &sub_level.phase1 {
        phase1.extend(lifter.lift_sub_op(op)?);
    }
    // Phase-2 row subtractions lift by bare row relabeling: live rows and
    // columns restrict identically, and the pivot column mirrors the unit
    // column away from the pivot row, so sub-permissibility transfers. The
    // final replay in `factorize` re-checks every one of them.
    let mut phase2: Vec<ElementaryOp> = sub_level
        .phase2
        .iter()
        .map(|op| match *op {
            ElementaryOp::RowSub { j, i } => {
                ElementaryOp::row_sub(map.full_row(j), map.full_row(i))
            }
            other => other,
        })
        .collect();
    // State after those subtractions, derived rather than replayed: the live
    // block is the identity pattern of the projection maps, the pivot row is
    // untouched by phase 2, the pivot column mirrors the unit column, and
    // the live values are the sub-problem's final values.
    let state1 = lifter.state();
    let k_final = lifter.unit_col();
    let state2 = reconstruct_after_sub_phase2(
        state1,
        &map,
        sub_level.end.v(),
        pivot_col,
        pivot_row,
        k_final,
    )?;
    let (frag, after_cleanup) =
        attempt!(cleanup_rows_core(&state2, k_final, pivot_col, pivot_row, lim));
    phase2.extend(frag);
    // The recursion's virtual labels leave a permutation pattern; discharge
    // it with row interchanges at the end of phase 1 and conjugate the
    // phase-2 subtractions to match.
    let sigma = permutation_of(after_cleanup.a())?;
    if (1..sigma.len()).any(|i| sigma[i] != i) {
        phase1.extend(swaps_to_identity(&sigma));
        for op in &mut phase2 {
            if let ElementaryOp::RowSub { j, i } = op {
                *op = ElementaryOp::row_sub(sigma[*j], sigma[*i]);
            }
        }
    }
    // At the identity, values and dual values agree: the level ends on the
    // phase-1 w, which phase 2 never moves.
    let end = Triple::identity(state1.w().to_vec())
        .map_err(|e| Error::Integrity(format!("level end state failed validation: {e}")))?;
    Ok(Attempt::Done(LevelResult {
        phase1,
        phase2,
        end,
    }))
}

/// Rebuild the full state after the lifted sub-problem subtractions from
/// structure alone, and cross-check it against the phase-1 state through the
/// unchanged w.
fn reconstruct_after_sub_phase2<S: Valuation>(
    state1: &Triple<S>,
    map: &IndexTranslation,
    sub_end_v: &[S],
    pivot_col: usize,
    pivot_row: usize,
    unit_col: usize,
) -> Result<Triple<S>> {
    let n = state1.n();
    let mut a = IntMatrix::zero(n);
    for c in 1..=n {
        a[(pivot_row - 1, c - 1)] = state1.a_entry(pivot_row, c).clone();
    }
    for (pos, &row) in map.rows.iter().enumerate() {
        let col = map.cols[pos];
        a[(row - 1, col - 1)] = BigInt::one();
        if col == unit_col {
            a[(row - 1, pivot_col - 1)] = BigInt::one();
        }
    }
    let mut v = state1.v().to_vec();
    for (pos, &row) in map.rows.iter().enumerate() {
        v[row - 1] = sub_end_v[pos].clone();
    }
    let state2 = Triple::build(a, v).map_err(|e| match e {
        Error::IndependenceViolation(msg) => Error::IndependenceViolation(msg),
        other => Error::Integrity(format!(
            "reconstructed post-subproblem state failed validation: {other}"
        )),
    })?;
    if state2.w() != state1.w() {
        return Err(Error::Integrity(
            "w drifted across the lifted subtractions".into(),
        ));
    }
    Ok(state2)
}

/// Rewrite the row-subtraction phase of a terminal script as reversed column
/// subtractions: `R_ji` acting on the left corresponds to subtracting column
/// `j` from column `i` on the right, and the reversed order makes every
/// partial product a product of nonnegative factors, so each step stays
/// permissible.
pub fn to_column_subtraction_script<S: Valuation>(
    t: &Triple<S>,
    script: &OpScript,
) -> Result<OpScript> {
    script.validate_grammar()?;
    if script.phase2_kind != Phase2Kind::RowSub {
        return Err(Error::PreconditionViolation(
            "conversion expects a row-subtraction phase 2".into(),
        ));
    }
    let phase2: Vec<ElementaryOp> = script
        .phase2
        .iter()
        .rev()
        .map(|op| match *op {
            ElementaryOp::RowSub { j, i } => ElementaryOp::col_sub(i, j),
            _ => unreachable!("grammar validated"),
        })
        .collect();
    let converted = OpScript {
        phase1: script.phase1.clone(),
        phase2,
        phase2_kind: Phase2Kind::ColSub,
        diagnostics: None,
    };
    let end = replay(t, &converted).map_err(|_| Error::ConversionCheckFailed)?;
    if !end.a().is_identity() {
        return Err(Error::ConversionCheckFailed);
    }
    Ok(converted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::RadicalScalar;
    use num_rational::BigRational;

    fn sqrt(d: u64) -> RadicalScalar {
        RadicalScalar::sqrt(d).unwrap()
    }

    fn nsqrt(n: i64, d: u64) -> RadicalScalar {
        sqrt(d).scale(&BigRational::from_integer(BigInt::from(n)))
    }

    fn triple(rows: &[&[i64]], v: Vec<RadicalScalar>) -> Triple<RadicalScalar> {
        Triple::build(IntMatrix::from_i64_rows(rows).unwrap(), v).unwrap()
    }

    /// 3x3 with inverse first column (1, -2, 1): two same-signed entries.
    fn beta_two_instance() -> Triple<RadicalScalar> {
        triple(
            &[&[2, 1, 1], &[0, 1, 2], &[1, 1, 1]],
            vec![nsqrt(3, 2), sqrt(3), nsqrt(2, 2)],
        )
    }

    #[test]
    fn collapse_no_op_cases() {
        // B first column (1, 0, 0): identity triple.
        let t = Triple::identity(vec![sqrt(2), sqrt(3), sqrt(5)]).unwrap();
        let frame = ActiveIndexFrame::full(3);
        let (ops, out) = collapse_first_column(&t, &frame).unwrap();
        assert!(ops.is_empty());
        assert_eq!(out, t);

        // B first column (1, -1, 0): shear.
        let t = triple(
            &[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]],
            vec![sqrt(2), sqrt(2) + sqrt(3), sqrt(5)],
        );
        assert_eq!(t.b_entry(2, 1), &BigInt::from(-1));
        let (ops, _) = collapse_first_column(&t, &frame).unwrap();
        assert!(ops.is_empty());
    }

    #[test]
    fn collapse_same_sign_pair() {
        let t = beta_two_instance();
        // entries 1 and 3 of the inverse's first column share a sign
        assert_eq!(t.b_entry(1, 1), &BigInt::from(1));
        assert_eq!(t.b_entry(3, 1), &BigInt::from(1));
        let frame = ActiveIndexFrame::full(3);
        let (ops, out) = collapse_first_column(&t, &frame).unwrap();
        assert!(!ops.is_empty());
        let (pos, neg) = signed_tokens(&out, 1, frame.live_cols());
        assert!(pos.len() <= 1 && neg.len() <= 1);
        // replay the fragment independently
        let replayed = replay(&t, &OpScript::new(ops, vec![])).unwrap();
        assert_eq!(replayed, out);
    }

    #[test]
    fn reduce_beta_guards() {
        // beta = 1 input: identity-ish shear has (1, -1) in the pivot column.
        let t = triple(
            &[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]],
            vec![sqrt(2), sqrt(2) + sqrt(3), sqrt(5)],
        );
        let frame = ActiveIndexFrame::full(3);
        let r = reduce_beta_once(&t, &frame, 1, 2);
        assert!(matches!(r, Err(Error::PreconditionViolation(_))));
    }

    #[test]
    fn reduce_beta_strictly_decreases() {
        // B first column (2, -1, 0), beta = 2.
        let t = triple(
            &[&[1, 1, 0], &[1, 2, 0], &[1, 2, 1]],
            vec![sqrt(2), sqrt(3), nsqrt(2, 5)],
        );
        assert_eq!(t.b_entry(1, 1), &BigInt::from(2));
        assert_eq!(t.b_entry(2, 1), &BigInt::from(-1));
        assert_eq!(t.beta(), BigUint::from(2u32));
        let frame = ActiveIndexFrame::full(3);
        let (ops, out) = reduce_beta_once(&t, &frame, 1, 2).unwrap();
        assert!(out.beta() < BigUint::from(2u32));
        let replayed = replay(&t, &OpScript::new(ops, vec![])).unwrap();
        assert_eq!(replayed, out);
    }

    #[test]
    fn unit_pair_already_there() {
        let t = triple(
            &[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]],
            vec![sqrt(2), sqrt(2) + sqrt(3), sqrt(5)],
        );
        let frame = ActiveIndexFrame::full(3);
        let (ops, out, pos, neg) = make_unit_pair(&t, &frame).unwrap();
        assert!(ops.is_empty());
        assert_eq!(out, t);
        assert_eq!((pos, neg), (1, 2));
    }

    #[test]
    fn unit_pair_from_single_nonzero() {
        // Identity 2x2: B first column (1, 0).
        let t = Triple::identity(vec![sqrt(2), sqrt(3)]).unwrap();
        let frame = ActiveIndexFrame::full(2);
        let (ops, out, pos, neg) = make_unit_pair(&t, &frame).unwrap();
        assert!(!ops.is_empty());
        assert_eq!(out.b_entry(pos, 1), &BigInt::one());
        assert_eq!(out.b_entry(neg, 1), &BigInt::from(-1));
        let replayed = replay(&t, &OpScript::new(ops, vec![])).unwrap();
        assert_eq!(replayed, out);
    }

    #[test]
    fn unit_pair_through_beta_reduction() {
        let t = beta_two_instance();
        let frame = ActiveIndexFrame::full(3);
        let beta0 = t.beta();
        assert_eq!(beta0, BigUint::from(2u32));
        let (ops, out, pos, neg) = make_unit_pair(&t, &frame).unwrap();
        check_unit_pair(&out, 1, frame.live_cols(), pos, neg).unwrap();
        // beta is non-increasing across every star-allowable op in the trace
        let mut cur = t.clone();
        for op in &ops {
            if let ElementaryOp::ColAdd { i, j } = op {
                let class = col_add_star_class(&cur, *i, *j, 1);
                let before = cur.beta();
                let next = cur.apply(op).unwrap();
                if class != StarClass::Opposed {
                    assert!(next.beta() <= before);
                }
                cur = next;
            }
        }
        assert_eq!(cur, out);
    }

    #[test]
    fn quadruple_validation() {
        // A = [[2,1,0],[1,1,0],[1,1,1]]: column 2 = column 1 - e_1.
        let t = triple(
            &[&[2, 1, 0], &[1, 1, 0], &[1, 1, 1]],
            vec![sqrt(5), sqrt(3), nsqrt(3, 2)],
        );
        assert!(Quadruple::new(t.clone(), 1, 1, 2).is_ok());
        assert!(Quadruple::new(t, 1, 1, 3).is_err());
        // The identity has no unit column at all.
        let id = Triple::identity(vec![sqrt(2), sqrt(3), sqrt(5)]).unwrap();
        for k in 2..=3 {
            assert!(Quadruple::new(id.clone(), 1, 1, k).is_err());
        }
    }

    #[test]
    fn projection_identities() {
        let t = triple(
            &[&[2, 1, 0], &[1, 1, 0], &[1, 1, 1]],
            vec![sqrt(5), sqrt(3), nsqrt(3, 2)],
        );
        // w = (sqrt5 - sqrt3, 2 sqrt3 - sqrt5, 3 sqrt2 - sqrt3)
        assert_eq!(t.w()[0], sqrt(5) - sqrt(3));
        assert_eq!(t.w()[1], nsqrt(2, 3) - sqrt(5));
        assert_eq!(t.w()[2], nsqrt(3, 2) - sqrt(3));
        let q = Quadruple::new(t.clone(), 1, 1, 2).unwrap();
        let (sub, map) = project_quadruple(&q).unwrap();
        // p + r = 2 even: live rows stay ascending
        assert_eq!(map.rows, vec![2, 3]);
        assert_eq!(map.cols, vec![2, 3]);
        let expect_a = IntMatrix::from_i64_rows(&[&[1, 0], &[1, 1]]).unwrap();
        assert_eq!(*sub.a(), expect_a);
        // w~ at the unit column is w_1 + w_2 = sqrt3; w~ elsewhere matches w
        assert_eq!(sub.w()[0], sqrt(3));
        assert_eq!(sub.w()[1], nsqrt(3, 2) - sqrt(3));
        assert_eq!(sub.det(), t.det());
    }

    #[test]
    fn projection_parity_fix() {
        // Unit pair with pivot column 2: p + r = 3 odd, so the first two
        // live rows are enumerated swapped and the determinant is preserved.
        // A = [[1,2,0],[0,1,0],[0,1,1]]: column 1 = column 2 - e_1 means
        // p = 2, k = 1 ... check: C_1 = (1,0,0), C_2 = (2,1,1).
        // C_1 = C_2 - e_1 requires (1,0,0) = (1,1,1): no. Build one directly:
        // want C_k = C_p - e_r with p = 2, r = 1, k = 3:
        // C_2 = (1,1,0), C_3 = (0,1,0), e_1 = (1,0,0). Set C_1 = (1,0,1).
        let t = triple(
            &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 0]],
            vec![sqrt(2) + sqrt(3), sqrt(3) + sqrt(5), sqrt(2)],
        );
        let q = Quadruple::new(t.clone(), 2, 1, 3).unwrap();
        let (sub, map) = project_quadruple(&q).unwrap();
        assert_eq!(map.rows, vec![3, 2]);
        assert_eq!(map.cols, vec![1, 3]);
        assert_eq!(sub.det(), t.det());
    }

    #[test]
    fn cleanup_example() {
        let t = triple(
            &[&[3, 2, 4], &[1, 1, 0], &[0, 0, 1]],
            vec![
                nsqrt(3, 2) + nsqrt(2, 3) + nsqrt(4, 5),
                sqrt(2) + sqrt(3),
                sqrt(5),
            ],
        );
        let (ops, out) = cleanup_rows(&t, 2, 1, 1).unwrap();
        assert!(out.a().is_identity());
        let expect = vec![
            ElementaryOp::row_sub(1, 2),
            ElementaryOp::row_sub(1, 2),
            ElementaryOp::row_sub(1, 3),
            ElementaryOp::row_sub(1, 3),
            ElementaryOp::row_sub(1, 3),
            ElementaryOp::row_sub(1, 3),
            ElementaryOp::row_sub(2, 1),
        ];
        assert_eq!(ops, expect);
    }

    #[test]
    fn cleanup_identity_is_empty() {
        let t = Triple::identity(vec![sqrt(2), sqrt(3)]).unwrap();
        let (ops, out) = cleanup_rows(&t, 2, 1, 1).unwrap();
        assert!(ops.is_empty());
        assert_eq!(out, t);
    }

    #[test]
    fn cleanup_two_by_two_shape() {
        // A = [[2,1],[1,1]], k = 2: [R_12, R_21] reaches the identity.
        let t = triple(
            &[&[2, 1], &[1, 1]],
            vec![nsqrt(2, 2) + sqrt(3), sqrt(2) + sqrt(3)],
        );
        let (ops, out) = cleanup_rows(&t, 2, 1, 1).unwrap();
        assert!(out.a().is_identity());
        assert_eq!(
            ops,
            vec![ElementaryOp::row_sub(1, 2), ElementaryOp::row_sub(2, 1)]
        );
    }

    #[test]
    fn base_case_examples() {
        // permutation: one interchange
        let t = triple(&[&[0, 1], &[1, 0]], vec![sqrt(3), sqrt(2)]);
        let s = base_case_2x2(&t).unwrap();
        assert_eq!(s.phase1, vec![ElementaryOp::row_swap(1, 2)]);
        assert!(s.phase2.is_empty());

        // subtractive euclid
        let t = triple(
            &[&[2, 1], &[1, 1]],
            vec![nsqrt(2, 2) + sqrt(3), sqrt(2) + sqrt(3)],
        );
        let s = base_case_2x2(&t).unwrap();
        assert!(s.phase1.is_empty());
        assert_eq!(
            s.phase2,
            vec![ElementaryOp::row_sub(1, 2), ElementaryOp::row_sub(2, 1)]
        );

        // identity: empty
        let t = Triple::identity(vec![sqrt(2), sqrt(3)]).unwrap();
        let s = base_case_2x2(&t).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn factorize_identity_is_empty() {
        let t = Triple::identity(vec![sqrt(2), sqrt(3), sqrt(5)]).unwrap();
        let s = factorize(&t).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn factorize_shear() {
        let t = triple(&[&[1, 1], &[0, 1]], vec![sqrt(3) + sqrt(2), sqrt(2)]);
        let s = factorize(&t).unwrap();
        assert_eq!(s.phase2, vec![ElementaryOp::row_sub(1, 2)]);
        let end = replay(&t, &s).unwrap();
        assert!(end.a().is_identity());
    }

    #[test]
    fn factorize_three_by_three() {
        let t = triple(
            &[&[2, 1, 0], &[1, 1, 0], &[1, 1, 1]],
            vec![sqrt(5), sqrt(3), nsqrt(3, 2)],
        );
        let s = factorize(&t).unwrap();
        let end = replay(&t, &s).unwrap();
        assert!(end.a().is_identity());
    }

    #[test]
    fn factorize_beta_two() {
        let t = beta_two_instance();
        let s = factorize(&t).unwrap();
        let end = replay(&t, &s).unwrap();
        assert!(end.a().is_identity());
    }

    #[test]
    fn column_subtraction_conversion() {
        let t = triple(&[&[1, 1], &[0, 1]], vec![sqrt(3) + sqrt(2), sqrt(2)]);
        let s = factorize(&t).unwrap();
        let c = to_column_subtraction_script(&t, &s).unwrap();
        assert_eq!(c.phase1, s.phase1);
        assert_eq!(c.phase2, vec![ElementaryOp::col_sub(2, 1)]);
        assert_eq!(c.phase2_kind, Phase2Kind::ColSub);
        let end = replay(&t, &c).unwrap();
        assert!(end.a().is_identity());

        // empty phase 2 converts to empty phase 2
        let id = Triple::identity(vec![sqrt(2), sqrt(3)]).unwrap();
        let c = to_column_subtraction_script(&id, &factorize(&id).unwrap()).unwrap();
        assert!(c.phase2.is_empty());
    }
}
