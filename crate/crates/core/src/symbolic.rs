//! Exact polynomial algebra in `Q[s, tau][q, p]` (`p` stands for `q'`),
//! differentiation along Painlevé II, multilinear coefficient solves and the
//! beta = 2 to beta = 1, 4 coefficient transfer for `j = 1, 2`.
//!
//! Nothing here uses floating point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Exponents of `(s, tau, q, p)`.
pub type Exponent = [u32; 4];

pub const S: usize = 0;
pub const TAU: usize = 1;
pub const Q: usize = 2;
pub const P: usize = 3;

/// Largest tower order supported by [`logderiv_tower`].
pub const MAX_TOWER_ORDER: usize = 10;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Sparse polynomial with exact rational coefficients; zero terms are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct QPoly {
    terms: BTreeMap<Exponent, Rational>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly::default()
    }

    pub fn one() -> Self {
        QPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        QPoly::monomial([0; 4], c)
    }

    pub fn int(n: i64) -> Self {
        QPoly::constant(rat(n, 1))
    }

    pub fn monomial(exp: Exponent, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        QPoly { terms }
    }

    fn var(index: usize) -> Self {
        let mut e = [0; 4];
        e[index] = 1;
        QPoly::monomial(e, Rational::one())
    }

    pub fn s() -> Self {
        QPoly::var(S)
    }

    pub fn tau() -> Self {
        QPoly::var(TAU)
    }

    pub fn q() -> Self {
        QPoly::var(Q)
    }

    pub fn p() -> Self {
        QPoly::var(P)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &Exponent) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Add `c * monomial(exp)` in place.
    pub fn add_term(&mut self, exp: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn scale(&self, c: &Rational) -> QPoly {
        if c.is_zero() {
            return QPoly::zero();
        }
        QPoly {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> QPoly {
        (0..k).fold(QPoly::one(), |acc, _| &acc * self)
    }

    /// True when no `q` or `p` appears.
    pub fn is_st_only(&self) -> bool {
        self.terms.keys().all(|e| e[Q] == 0 && e[P] == 0)
    }

    /// Degree in the given variable.
    pub fn degree(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Total degree in `(s, tau)`.
    pub fn st_degree(&self) -> u32 {
        self.terms.keys().map(|e| e[S] + e[TAU]).max().unwrap_or(0)
    }

    /// The `(q, p)` exponents present.
    pub fn qp_support(&self) -> BTreeSet<(u32, u32)> {
        self.terms.keys().map(|e| (e[Q], e[P])).collect()
    }

    /// Coefficients (in `Q[s, tau]`) of each `(q, p)` monomial.
    pub fn split_qp(&self) -> BTreeMap<(u32, u32), QPoly> {
        let mut out: BTreeMap<(u32, u32), QPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            out.entry((e[Q], e[P]))
                .or_default()
                .add_term([e[S], e[TAU], 0, 0], c.clone());
        }
        out
    }

    /// Partial derivative in `s` only.
    pub fn partial_s(&self) -> QPoly {
        let mut out = QPoly::zero();
        for (e, c) in &self.terms {
            if e[S] > 0 {
                let mut f = *e;
                f[S] -= 1;
                out.add_term(f, c * Rational::from_integer(BigInt::from(e[S])));
            }
        }
        out
    }

    /// Substitute exact values for `s` and `tau`.
    pub fn substitute_st(&self, s: &Rational, tau: &Rational) -> QPoly {
        let mut out = QPoly::zero();
        for (e, c) in &self.terms {
            let v = c * rat_pow(s, e[S]) * rat_pow(tau, e[TAU]);
            out.add_term([0, 0, e[Q], e[P]], v);
        }
        out
    }
}

fn rat_pow(x: &Rational, k: u32) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * x)
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &QPoly {
    type Output = QPoly;
    fn sub(self, rhs: &QPoly) -> QPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        let mut out = QPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let e = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
                out.add_term(e, x * y);
            }
        }
        out
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        const NAMES: [&str; 4] = ["s", "tau", "q", "p"];
        // Highest (q, p) degree first reads most naturally.
        let mut order: Vec<(&Exponent, &Rational)> = self.terms.iter().collect();
        order.sort_by_key(|(e, _)| std::cmp::Reverse((e[Q] + e[P], e[P], e[S] + e[TAU], e[S])));
        for (i, (e, c)) in order.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let vars: Vec<String> = (0..4)
                .filter(|&v| e[v] > 0)
                .map(|v| match e[v] {
                    1 => NAMES[v].to_string(),
                    k => format!("{}^{}", NAMES[v], k),
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// `d/ds` with `s' = 1`, `tau' = 0`, `q' = p` and `p' = s q + 2 q^3`.
pub fn pii_derive(poly: &QPoly) -> QPoly {
    let mut out = QPoly::zero();
    for (e, c) in poly.terms() {
        if e[S] > 0 {
            let mut f = *e;
            f[S] -= 1;
            out.add_term(f, c * Rational::from_integer(BigInt::from(e[S])));
        }
        if e[Q] > 0 {
            let mut f = *e;
            f[Q] -= 1;
            f[P] += 1;
            out.add_term(f, c * Rational::from_integer(BigInt::from(e[Q])));
        }
        if e[P] > 0 {
            let k = Rational::from_integer(BigInt::from(e[P]));
            let mut f = *e;
            f[P] -= 1;
            f[S] += 1;
            f[Q] += 1;
            out.add_term(f, c * &k);
            let mut g = *e;
            g[P] -= 1;
            g[Q] += 3;
            out.add_term(g, c * k * rat(2, 1));
        }
    }
    out
}

/// Which limit law a log-derivative tower belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TowerBase {
    F2,
    FPlus,
    FMinus,
}

/// First log-derivative `F'/F` as a polynomial in `s, q, p`.
pub fn first_logderiv(base: TowerBase) -> QPoly {
    let (s, q, p) = (QPoly::s(), QPoly::q(), QPoly::p());
    let p2 = &p * &p;
    let q2 = &q * &q;
    let q4 = &q2 * &q2;
    let sq2 = &s * &q2;
    match base {
        TowerBase::F2 => &(&p2 - &sq2) - &q4,
        TowerBase::FPlus | TowerBase::FMinus => {
            let half = rat(1, 2);
            let common = (&(&p2 - &q4) - &sq2).scale(&half);
            let lin = q.scale(&half);
            if base == TowerBase::FPlus {
                &common + &lin
            } else {
                &common - &lin
            }
        }
    }
}

/// `[F'/F, F''/F, ..., F^(kmax)/F]` via `r_{k+1} = r_k' + r_1 r_k`.
pub fn logderiv_tower(base: TowerBase, kmax: usize) -> Result<Vec<QPoly>> {
    if kmax > MAX_TOWER_ORDER {
        return Err(Error::IndexOutOfRange {
            index: kmax,
            max: MAX_TOWER_ORDER,
        });
    }
    let r1 = first_logderiv(base);
    let mut out: Vec<QPoly> = Vec::with_capacity(kmax);
    if kmax == 0 {
        return Ok(out);
    }
    out.push(r1.clone());
    for k in 1..kmax {
        let prev = &out[k - 1];
        let next = &pii_derive(prev) + &(&r1 * prev);
        out.push(next);
    }
    Ok(out)
}

/// Default bound on the `(s, tau)` degree of unknown coefficients at order `j`.
pub fn default_degree_bound(j: u32) -> u32 {
    (3 * j).max(1)
}

/// Outcome of an exact linear solve.
#[derive(Debug, Clone, PartialEq)]
enum LinearOutcome {
    Unique(Vec<Rational>),
    Inconsistent,
    Underdetermined(usize),
}

/// Gauss–Jordan elimination over the rationals on `rows` of `[a | b]`.
fn solve_exact(mut rows: Vec<Vec<Rational>>, ncols: usize) -> LinearOutcome {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if rows[r..].iter().any(|row| !row[ncols].is_zero()) {
        return LinearOutcome::Inconsistent;
    }
    if pivots.len() < ncols {
        return LinearOutcome::Underdetermined(ncols - pivots.len());
    }
    let mut x = vec![Rational::zero(); ncols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i][ncols].clone();
    }
    LinearOutcome::Unique(x)
}

/// Solve `target = sum_k c_k basis_k` with each `c_k` in `Q[s, tau]` of total
/// degree at most `degree`, by comparing coefficients of every monomial.
fn solve_at_degree(target: &QPoly, basis: &[QPoly], degree: u32) -> LinearOutcome {
    let st: Vec<(u32, u32)> = (0..=degree)
        .flat_map(|d| (0..=d).map(move |b| (d - b, b)))
        .collect();
    let ncols = basis.len() * st.len();
    let mut index: BTreeMap<Exponent, usize> = BTreeMap::new();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut row_of = |e: Exponent, rows: &mut Vec<Vec<Rational>>| -> usize {
        *index.entry(e).or_insert_with(|| {
            rows.push(vec![Rational::zero(); ncols + 1]);
            rows.len() - 1
        })
    };
    for (k, b) in basis.iter().enumerate() {
        for (m, &(a, t)) in st.iter().enumerate() {
            for (e, c) in b.terms() {
                let f = [e[S] + a, e[TAU] + t, e[Q], e[P]];
                let i = row_of(f, &mut rows);
                rows[i][k * st.len() + m] += c;
            }
        }
    }
    for (e, c) in target.terms() {
        let i = row_of(*e, &mut rows);
        rows[i][ncols] += c;
    }
    if rows.is_empty() {
        return if ncols == 0 {
            LinearOutcome::Unique(Vec::new())
        } else {
            LinearOutcome::Underdetermined(ncols)
        };
    }
    match solve_exact(rows, ncols) {
        LinearOutcome::Unique(x) => {
            let coeffs = basis
                .iter()
                .enumerate()
                .flat_map(|(k, _)| st.iter().enumerate().map(move |(m, _)| (k, m)))
                .map(|(k, m)| x[k * st.len() + m].clone())
                .collect();
            LinearOutcome::Unique(coeffs)
        }
        other => other,
    }
}

fn assemble(basis_len: usize, degree: u32, x: &[Rational]) -> Vec<QPoly> {
    let st: Vec<(u32, u32)> = (0..=degree)
        .flat_map(|d| (0..=d).map(move |b| (d - b, b)))
        .collect();
    (0..basis_len)
        .map(|k| {
            let mut c = QPoly::zero();
            for (m, &(a, t)) in st.iter().enumerate() {
                c.add_term([a, t, 0, 0], x[k * st.len() + m].clone());
            }
            c
        })
        .collect()
}

/// Exact multilinear solve: find `c_k` in `Q[s, tau]` with
/// `target = sum_k c_k basis_k`.
///
/// Starts at `degree_bound`, doubles once, then reports. A system that is
/// inconsistent even at a fixed rational `(s, tau)` is `Infeasible`; one that
/// is only inconsistent for polynomial coefficients of the tried degree is a
/// `DegreeBound` error. A consistent but rank-deficient system is `NonUnique`.
pub fn solve_multilinear(target: &QPoly, basis: &[QPoly], degree_bound: u32) -> Result<Vec<QPoly>> {
    for degree in [degree_bound, 2 * degree_bound] {
        match solve_at_degree(target, basis, degree) {
            LinearOutcome::Unique(x) => return Ok(assemble(basis.len(), degree, &x)),
            LinearOutcome::Underdetermined(n) => return Err(Error::NonUnique(n)),
            LinearOutcome::Inconsistent => {}
        }
    }
    // Pointwise test at a generic rational (s, tau).
    let (s0, t0) = (rat(7, 3), rat(5, 11));
    let t = target.substitute_st(&s0, &t0);
    let b: Vec<QPoly> = basis.iter().map(|b| b.substitute_st(&s0, &t0)).collect();
    match solve_at_degree(&t, &b, 0) {
        LinearOutcome::Inconsistent => Err(Error::Infeasible(format!(
            "no coefficients over Q(s, tau) reproduce the target ({} basis polynomials)",
            basis.len()
        ))),
        _ => Err(Error::DegreeBound(2 * degree_bound)),
    }
}

/// Union of the `(q, p)` supports of a system, excluding the constant.
pub fn system_support(target: &QPoly, basis: &[QPoly]) -> BTreeSet<(u32, u32)> {
    let mut out = target.qp_support();
    for b in basis {
        out.extend(b.qp_support());
    }
    out.remove(&(0, 0));
    out
}

/// Target and basis `[r1+, r2+, r1-, r2-]` of the j = 1 transfer system:
/// `G_21 = F+ G_-1 + G_+1 F- + (F+ F-'' - 2 F+' F-' + F+'' F-)/2`, divided by `F_2`.
pub fn j1_system(p211: &QPoly, p212: &QPoly) -> Result<(QPoly, Vec<QPoly>)> {
    let t2 = logderiv_tower(TowerBase::F2, 2)?;
    let tp = logderiv_tower(TowerBase::FPlus, 2)?;
    let tm = logderiv_tower(TowerBase::FMinus, 2)?;
    let lhs = &(p211 * &t2[0]) + &(p212 * &t2[1]);
    let cross = &(&tm[1] + &tp[1]) - &(&tp[0] * &tm[0]).scale(&rat(2, 1));
    let target = &lhs - &cross.scale(&rat(1, 2));
    let basis = vec![tp[0].clone(), tp[1].clone(), tm[0].clone(), tm[1].clone()];
    Ok((target, basis))
}

/// beta = 1 (and 4) coefficients `(P_{1,1,1}, P_{1,1,2})` from the beta = 2 row.
pub fn transfer_j1(p211: &QPoly, p212: &QPoly) -> Result<(QPoly, QPoly)> {
    for p in [p211, p212] {
        if !p.is_st_only() {
            return Err(Error::Table("transfer inputs must lie in Q[s, tau]".into()));
        }
    }
    let (target, basis) = j1_system(p211, p212)?;
    let bound = default_degree_bound(1)
        .max(p211.st_degree())
        .max(p212.st_degree());
    let c = solve_multilinear(&target, &basis, bound)?;
    if c[0] != c[2] || c[1] != c[3] {
        return Err(Error::Infeasible(
            "j = 1 transfer depends on the sign of F+-".into(),
        ));
    }
    Ok((c[0].clone(), c[1].clone()))
}

/// Inputs of the j = 2 transfer: `P_{2,1,1..2}` and `P_{2,2,1..4}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BetaTwoRow {
    pub p11: QPoly,
    pub p12: QPoly,
    pub p21: QPoly,
    pub p22: QPoly,
    pub p23: QPoly,
    pub p24: QPoly,
}

/// `P_{1,2,1..4}` from the closed-form j = 2 relations.
pub fn transfer_j2(row: &BetaTwoRow) -> [QPoly; 4] {
    let two = rat(2, 1);
    let half = rat(1, 2);
    let d2 = |p: &QPoly| p.partial_s().partial_s();
    let p21 = &(&(&(&row.p21 + &row.p24.scale(&two)) - &d2(&row.p11).scale(&half)) + &row.p12)
        + &QPoly::constant(rat(-1, 4));
    let p22 = &(&row.p22.scale(&two) - &(&row.p11 * &row.p11).scale(&half)) - &d2(&row.p12);
    let p23 = &row.p23.scale(&rat(4, 1)) - &(&row.p11 * &row.p12).scale(&two);
    let p24 = &row.p24.scale(&rat(8, 1)) - &(&row.p12 * &row.p12).scale(&two);
    [p21, p22, p23, p24]
}

/// How a table entry was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// From an exact relation applied to other entries.
    PaperRelation,
    /// Fitted to finite-n data and rounded to a rational.
    DerivedNumeric,
    /// Fitted, but the rounded rational failed its residual check.
    DerivedNumericUnrounded,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::PaperRelation => "paper-relation",
            Provenance::DerivedNumeric => "derived-numeric",
            Provenance::DerivedNumericUnrounded => "derived-numeric-unrounded",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "paper-relation" => Ok(Provenance::PaperRelation),
            "derived-numeric" => Ok(Provenance::DerivedNumeric),
            "derived-numeric-unrounded" => Ok(Provenance::DerivedNumericUnrounded),
            other => Err(Error::Table(format!("unknown provenance tag {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub poly: QPoly,
    pub provenance: Provenance,
    /// Post-rounding residual of the fit, when the entry was fitted.
    pub certificate: Option<f64>,
}

/// `P_{beta,j,k}(s, tau)` keyed by `(beta, j, k)`, `1 <= k <= 2j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoefficientTable {
    entries: BTreeMap<(u32, u32, u32), TableEntry>,
}

impl CoefficientTable {
    pub fn new() -> Self {
        CoefficientTable::default()
    }

    pub fn insert(&mut self, beta: u32, j: u32, k: u32, entry: TableEntry) -> Result<()> {
        if ![1, 2, 4].contains(&beta) {
            return Err(Error::InvalidBeta(beta));
        }
        if j == 0 || k == 0 || k > 2 * j {
            return Err(Error::Table(format!("k = {k} outside 1..=2j for j = {j}")));
        }
        if !entry.poly.is_st_only() {
            return Err(Error::Table(
                "table polynomials must lie in Q[s, tau]".into(),
            ));
        }
        self.entries.insert((beta, j, k), entry);
        Ok(())
    }

    pub fn get(&self, beta: u32, j: u32, k: u32) -> Option<&TableEntry> {
        self.entries.get(&(beta, j, k))
    }

    pub fn poly(&self, beta: u32, j: u32, k: u32) -> Result<&QPoly> {
        self.get(beta, j, k)
            .map(|e| &e.poly)
            .ok_or(Error::MissingEntry { beta, j, k })
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u32, u32, u32), &TableEntry)> {
        self.entries.iter()
    }

    /// Largest `j` with all of `k = 1..=2j` present for every order up to it.
    pub fn max_order(&self, beta: u32) -> u32 {
        let mut j = 0;
        while (1..=2 * (j + 1)).all(|k| self.entries.contains_key(&(beta, j + 1, k))) {
            j += 1;
        }
        j
    }

    /// Entries present for both beta = 1 and beta = 4 must coincide.
    pub fn check_duality(&self) -> Result<()> {
        for (&(beta, j, k), e) in &self.entries {
            if beta == 1 {
                if let Some(other) = self.entries.get(&(4, j, k)) {
                    if other.poly != e.poly {
                        return Err(Error::Table(format!(
                            "duality violated at j = {j}, k = {k}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Fill beta = 1 and beta = 4 rows for `j = 1, 2` from the beta = 2 rows.
    pub fn derive_beta_one_four(&mut self) -> Result<()> {
        let get = |t: &Self, j, k| t.poly(2, j, k).cloned();
        let p11 = get(self, 1, 1)?;
        let p12 = get(self, 1, 2)?;
        let (a, b) = transfer_j1(&p11, &p12)?;
        let mut derived: Vec<(u32, u32, QPoly)> = vec![(1, 1, a), (1, 2, b)];
        if self.max_order(2) >= 2 {
            let row = BetaTwoRow {
                p11,
                p12,
                p21: get(self, 2, 1)?,
                p22: get(self, 2, 2)?,
                p23: get(self, 2, 3)?,
                p24: get(self, 2, 4)?,
            };
            for (i, p) in transfer_j2(&row).into_iter().enumerate() {
                derived.push((2, i as u32 + 1, p));
            }
        }
        // Inherited certificate: worst beta = 2 input of the same or lower order.
        let inherited = |t: &Self, j: u32| {
            t.entries()
                .filter(|(&(b, jj, _), _)| b == 2 && jj <= j)
                .filter_map(|(_, e)| e.certificate)
                .reduce(f64::max)
        };
        for (j, k, poly) in derived {
            let certificate = inherited(self, j);
            for beta in [1, 4] {
                self.insert(
                    beta,
                    j,
                    k,
                    TableEntry {
                        poly: poly.clone(),
                        provenance: Provenance::PaperRelation,
                        certificate,
                    },
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse_terms(list: &[(i64, i64, [u32; 4])]) -> QPoly {
        let mut p = QPoly::zero();
        for &(n, d, e) in list {
            p.add_term(e, rat(n, d));
        }
        p
    }

    #[test]
    fn derive_examples() {
        assert_eq!(pii_derive(&QPoly::q()), QPoly::p());
        assert_eq!(pii_derive(&(&QPoly::s() * &QPoly::tau())), QPoly::tau());
        let u00 = first_logderiv(TowerBase::F2);
        assert_eq!(pii_derive(&u00), -&(&QPoly::q() * &QPoly::q()));
    }

    #[test]
    fn f2_second_logderiv() {
        let t = logderiv_tower(TowerBase::F2, 2).unwrap();
        assert_eq!(t[0], first_logderiv(TowerBase::F2));
        // -2q^4p^2 - 2sq^2p^2 + p^4 + s^2q^4 + q^8 + 2sq^6 - q^2
        let want = parse_terms(&[
            (-2, 1, [0, 0, 4, 2]),
            (-2, 1, [1, 0, 2, 2]),
            (1, 1, [0, 0, 0, 4]),
            (1, 1, [2, 0, 4, 0]),
            (1, 1, [0, 0, 8, 0]),
            (2, 1, [1, 0, 6, 0]),
            (-1, 1, [0, 0, 2, 0]),
        ]);
        assert_eq!(t[1], want);
    }

    #[test]
    fn fpm_second_logderiv() {
        for (base, sg) in [(TowerBase::FPlus, 1), (TowerBase::FMinus, -1)] {
            let t = logderiv_tower(base, 2).unwrap();
            let want = parse_terms(&[
                (-1, 2, [0, 0, 4, 2]),
                (-1, 2, [1, 0, 2, 2]),
                (sg, 2, [0, 0, 1, 2]),
                (1, 4, [0, 0, 0, 4]),
                (sg, 2, [0, 0, 0, 1]),
                (1, 4, [2, 0, 4, 0]),
                (1, 4, [0, 0, 8, 0]),
                (1, 2, [1, 0, 6, 0]),
                (-sg, 2, [0, 0, 5, 0]),
                (-sg, 2, [1, 0, 3, 0]),
                (-1, 4, [0, 0, 2, 0]),
            ]);
            assert_eq!(t[1], want, "{base:?}");
        }
    }

    #[test]
    fn tower_recurrence_holds() {
        for base in [TowerBase::F2, TowerBase::FPlus, TowerBase::FMinus] {
            let t = logderiv_tower(base, MAX_TOWER_ORDER).unwrap();
            for k in 0..MAX_TOWER_ORDER - 1 {
                let r = &(&t[k + 1] - &pii_derive(&t[k])) - &(&t[0] * &t[k]);
                assert!(r.is_zero());
            }
        }
        assert!(logderiv_tower(TowerBase::F2, 11).is_err());
    }

    fn poly_strategy() -> impl Strategy<Value = QPoly> {
        prop::collection::vec(
            ((-5i64..=5), (1i64..=4), prop::array::uniform4(0u32..3)),
            0..6,
        )
        .prop_map(|v| {
            let mut p = QPoly::zero();
            for (n, d, e) in v {
                p.add_term(e, rat(n, d));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn derive_is_a_derivation(f in poly_strategy(), g in poly_strategy()) {
            let lhs = pii_derive(&(&f * &g));
            let rhs = &(&pii_derive(&f) * &g) + &(&f * &pii_derive(&g));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn multilinear_identity() {
        let r1 = first_logderiv(TowerBase::F2);
        let c = solve_multilinear(&r1, std::slice::from_ref(&r1), 3).unwrap();
        assert_eq!(c, vec![QPoly::one()]);
    }

    #[test]
    fn multilinear_with_polynomial_coefficients() {
        let t = logderiv_tower(TowerBase::F2, 2).unwrap();
        let a = parse_terms(&[(1, 3, [1, 0, 0, 0]), (-2, 5, [0, 1, 0, 0])]);
        let b = parse_terms(&[(3, 7, [2, 1, 0, 0]), (1, 1, [0, 0, 0, 0])]);
        let target = &(&a * &t[0]) + &(&b * &t[1]);
        let c = solve_multilinear(&target, &t, 3).unwrap();
        assert_eq!(c, vec![a, b]);
    }

    #[test]
    fn multilinear_reports_failures() {
        let t = logderiv_tower(TowerBase::F2, 2).unwrap();
        let mut bad = t[0].clone();
        bad.add_term([0, 0, 1, 0], rat(1, 1));
        assert!(matches!(
            solve_multilinear(&bad, &t, 3),
            Err(Error::Infeasible(_))
        ));
        // Needs degree 8 in s: beyond 3 and 6.
        let high = &QPoly::s().pow(8) * &t[0];
        assert!(matches!(
            solve_multilinear(&high, &t, 3),
            Err(Error::DegreeBound(6))
        ));
        let dup = vec![t[0].clone(), t[0].clone()];
        assert!(matches!(
            solve_multilinear(&t[0], &dup, 1),
            Err(Error::NonUnique(_))
        ));
    }

    #[test]
    fn j1_transfer() {
        let p11 = parse_terms(&[(-3, 10, [2, 0, 0, 0]), (1, 5, [0, 1, 0, 0])]);
        let p12 = parse_terms(&[(1, 10, [1, 0, 0, 0]), (7, 9, [1, 1, 0, 0])]);
        let (a, b) = transfer_j1(&p11, &p12).unwrap();
        assert_eq!(a, p11);
        assert_eq!(b, p12.scale(&rat(2, 1)));
        let (z1, z2) = transfer_j1(&QPoly::zero(), &QPoly::zero()).unwrap();
        assert!(z1.is_zero() && z2.is_zero());
    }

    #[test]
    fn j1_support_is_thirteen_monomials() {
        let (target, basis) = j1_system(&QPoly::s(), &QPoly::one()).unwrap();
        let support = system_support(&target, &basis);
        let want: BTreeSet<(u32, u32)> = [
            (1, 0),
            (2, 0),
            (3, 0),
            (4, 0),
            (5, 0),
            (6, 0),
            (8, 0),
            (0, 1),
            (0, 2),
            (0, 4),
            (1, 2),
            (2, 2),
            (4, 2),
        ]
        .into_iter()
        .collect();
        assert_eq!(support, want);
    }

    #[test]
    fn j2_transfer_examples() {
        let zero = transfer_j2(&BetaTwoRow::default());
        assert_eq!(zero[0], QPoly::constant(rat(-1, 4)));
        assert!(zero[1..].iter().all(|p| p.is_zero()));

        let row = BetaTwoRow {
            p12: QPoly::constant(rat(3, 5)),
            ..Default::default()
        };
        let out = transfer_j2(&row);
        assert_eq!(out[3], QPoly::constant(rat(-18, 25)));

        let lin = parse_terms(&[(2, 1, [1, 0, 0, 0]), (1, 3, [0, 0, 0, 0])]);
        let row = BetaTwoRow {
            p11: lin.clone(),
            ..Default::default()
        };
        let out = transfer_j2(&row);
        assert_eq!(out[0], QPoly::constant(rat(-1, 4)));
        assert_eq!(out[1], (&lin * &lin).scale(&rat(-1, 2)));
    }

    #[test]
    fn table_rules() {
        let mut t = CoefficientTable::new();
        let e = |p: QPoly| TableEntry {
            poly: p,
            provenance: Provenance::DerivedNumeric,
            certificate: Some(0.0),
        };
        assert!(t.insert(2, 1, 3, e(QPoly::one())).is_err());
        assert!(t.insert(3, 1, 1, e(QPoly::one())).is_err());
        assert!(t.insert(2, 1, 1, e(QPoly::q())).is_err());
        t.insert(2, 1, 1, e(QPoly::s())).unwrap();
        t.insert(2, 1, 2, e(QPoly::one())).unwrap();
        assert_eq!(t.max_order(2), 1);
        t.derive_beta_one_four().unwrap();
        assert_eq!(t.poly(1, 1, 2).unwrap(), &QPoly::int(2));
        assert_eq!(t.max_order(4), 1);
        t.check_duality().unwrap();
        t.insert(4, 1, 1, e(QPoly::zero())).unwrap();
        assert!(t.check_duality().is_err());
        for tag in [
            "paper-relation",
            "derived-numeric",
            "derived-numeric-unrounded",
        ] {
            assert_eq!(Provenance::from_tag(tag).unwrap().tag(), tag);
        }
    }

    #[test]
    fn display_is_readable() {
        let t = logderiv_tower(TowerBase::F2, 1).unwrap();
        assert_eq!(t[0].to_string(), "-q^4 + p^2 - s*q^2");
        assert_eq!(QPoly::constant(rat(-1, 4)).to_string(), "-1/4");
    }
}
