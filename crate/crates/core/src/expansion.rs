//! Asymptotic expansions in the soft-edge parameter `h`:
//!
//! `E_{beta,n}(mu + sigma s; xi) = F_beta(s; xi) + sum_j G_{beta,j}(s, tau; xi) h^j`,
//! `G_{beta,j} = sum_{k=1}^{2j} P_{beta,j,k}(s, tau) F_beta^(k)(s; xi)`,
//!
//! with all parameters taken at the shifted index `n'`. Linearly induced
//! quantities (gap probabilities, k-th largest level CDFs) expand the same way
//! with `F_beta` replaced by the induced limit function, since the
//! polynomials do not depend on xi.
//!
//! Also owns the coefficient-table file format, the extraction of `G_{2,j}`
//! from exact finite-n data and the rational reconstruction of `P_{2,j,k}`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{scaling, Beta, EffectiveIndex, EnsembleSpec, Family, ScalingParams};
use crate::error::{Error, Result};
use crate::finiten::{gram, unitary_scaling};
use crate::fredholm::{limit_jet_unchecked, LimitTarget, S_WINDOW};
use crate::painleve::{solve_q, PIISolution, DEFAULT_L_MINUS, DEFAULT_L_PLUS};
use crate::quadrature::{cheb_coefficients, cheb_derivative_coefficients, cheb_eval, cheb_points};
use crate::symbolic::{
    logderiv_tower, CoefficientTable, Provenance, QPoly, Rational, TableEntry, TowerBase, P, Q, S,
    TAU,
};

/// Denominators of reconstructed rationals must divide `2^8 3^4 5^2 7^2`.
pub const DENOMINATOR_BOUND: u64 = 256 * 81 * 25 * 49;
/// Acceptance bound on the post-rounding residual of a reconstruction.
pub const CERTIFICATE_TOL: f64 = 1e-5;
/// Chebyshev degree of the limit-function curves.
pub const CURVE_DEGREE: usize = 160;
/// Margin added on both sides of a requested s-range before interpolating.
pub const CURVE_MARGIN: f64 = 2.0;

const TABLE_FORMAT: u32 = 1;
const SHIPPED_TABLE: &str = include_str!("../data/coefficients.toml");

// ---------------------------------------------------------------------------
// Floating-point evaluation of table polynomials.

fn to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

/// `poly(s, tau, q, p)` in floating point.
pub fn eval_poly(poly: &QPoly, s: f64, tau: f64, q: f64, p: f64) -> f64 {
    poly.terms()
        .map(|(e, c)| {
            to_f64(c)
                * s.powi(e[S] as i32)
                * tau.powi(e[TAU] as i32)
                * q.powi(e[Q] as i32)
                * p.powi(e[P] as i32)
        })
        .sum()
}

/// `poly(s, tau)` for a table polynomial.
pub fn eval_st(poly: &QPoly, s: f64, tau: f64) -> f64 {
    eval_poly(poly, s, tau, 0.0, 0.0)
}

// ---------------------------------------------------------------------------
// Coefficient-table files.

#[derive(Debug, Serialize, Deserialize)]
struct TableFile {
    format: u32,
    #[serde(default)]
    commit: String,
    #[serde(default)]
    generator: String,
    #[serde(default)]
    provenance: Vec<String>,
    #[serde(default)]
    entry: Vec<EntryRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryRecord {
    beta: u32,
    j: u32,
    k: u32,
    provenance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<f64>,
    /// `(deg_s, deg_tau, numerator, denominator)`.
    terms: Vec<(u32, u32, i64, i64)>,
}

/// Metadata written into a table header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TableHeader {
    pub commit: String,
    pub generator: String,
}

/// Serialize a table. Polynomials are lists of `(deg_s, deg_tau, num, den)`.
pub fn write_table(table: &CoefficientTable, header: &TableHeader) -> Result<String> {
    let mut tags: Vec<String> = table
        .entries()
        .map(|(_, e)| e.provenance.tag().to_string())
        .collect();
    tags.sort();
    tags.dedup();
    let mut entry = Vec::new();
    for (&(beta, j, k), e) in table.entries() {
        let mut terms = Vec::new();
        for (exp, c) in e.poly.terms() {
            let num = c
                .numer()
                .to_i64()
                .ok_or_else(|| Error::Format("numerator exceeds 64 bits".into()))?;
            let den = c
                .denom()
                .to_i64()
                .ok_or_else(|| Error::Format("denominator exceeds 64 bits".into()))?;
            terms.push((exp[S], exp[TAU], num, den));
        }
        entry.push(EntryRecord {
            beta,
            j,
            k,
            provenance: e.provenance.tag().to_string(),
            certificate: e.certificate,
            terms,
        });
    }
    let file = TableFile {
        format: TABLE_FORMAT,
        commit: header.commit.clone(),
        generator: header.generator.clone(),
        provenance: tags,
        entry,
    };
    let body = toml::to_string(&file).map_err(|e| Error::Format(e.to_string()))?;
    Ok(format!(
        "# softedge coefficient table P_(beta,j,k)(s, tau)\n{body}"
    ))
}

pub fn read_table(text: &str) -> Result<(CoefficientTable, TableHeader)> {
    let file: TableFile = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if file.format != TABLE_FORMAT {
        return Err(Error::Format(format!(
            "unsupported table format {}",
            file.format
        )));
    }
    let mut table = CoefficientTable::new();
    for r in file.entry {
        let mut poly = QPoly::zero();
        for (ds, dt, num, den) in r.terms {
            if den == 0 {
                return Err(Error::Format("zero denominator".into()));
            }
            poly.add_term(
                [ds, dt, 0, 0],
                Rational::new(BigInt::from(num), BigInt::from(den)),
            );
        }
        table.insert(
            r.beta,
            r.j,
            r.k,
            TableEntry {
                poly,
                provenance: Provenance::from_tag(&r.provenance)?,
                certificate: r.certificate,
            },
        )?;
    }
    table.check_duality()?;
    Ok((
        table,
        TableHeader {
            commit: file.commit,
            generator: file.generator,
        },
    ))
}

/// The shipped `j <= 2` table.
pub fn shipped_table() -> &'static CoefficientTable {
    static TABLE: OnceLock<CoefficientTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        read_table(SHIPPED_TABLE)
            .expect("shipped coefficient table parses")
            .0
    })
}

// ---------------------------------------------------------------------------
// Limit functions and their s-derivatives.

/// A quantity linear in `E(x; xi)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    /// `E(x; xi)` itself.
    Generating { xi: f64 },
    /// `P(x_(n-k) <= x)`, `k = 0` the largest level.
    KthLargest { k: usize },
    /// `sum_i w_i d^i/dxi^i E(x; xi)` at `xi_star`.
    Induced {
        xi_star: f64,
        ops: Vec<(usize, f64)>,
    },
}

impl Quantity {
    fn validate(&self) -> Result<()> {
        let xi = match self {
            Quantity::Generating { xi } => *xi,
            Quantity::KthLargest { .. } => 1.0,
            Quantity::Induced { xi_star, .. } => *xi_star,
        };
        if (0.0..=1.0).contains(&xi) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                value: xi,
                lo: 0.0,
                hi: 1.0,
            })
        }
    }

    /// The limit function `s -> (quantity applied to F_beta)(s)`.
    pub fn limit_value(&self, beta: Beta, s: f64) -> Result<f64> {
        let target = LimitTarget::Beta(beta);
        match self {
            Quantity::Generating { xi } => {
                if *xi == 0.0 {
                    return Ok(1.0);
                }
                Ok(limit_jet_unchecked(target, s, *xi, 0)?.value())
            }
            Quantity::KthLargest { k } => {
                let jet = limit_jet_unchecked(target, s, 1.0, *k)?;
                Ok(crate::fredholm::induced_from_jet(&jet, *k))
            }
            Quantity::Induced { xi_star, ops } => {
                let order = ops.iter().map(|o| o.0).max().unwrap_or(0);
                let jet = limit_jet_unchecked(target, s, *xi_star, order)?;
                Ok(ops.iter().map(|&(i, w)| w * jet.derivative(i)).sum())
            }
        }
    }
}

/// Chebyshev interpolant of a smooth function on `[lo, hi]` with its derivatives.
#[derive(Debug, Clone)]
pub struct LimitCurve {
    pub lo: f64,
    pub hi: f64,
    series: Vec<Vec<f64>>,
}

impl LimitCurve {
    pub fn build<F>(f: F, lo: f64, hi: f64, degree: usize, kmax: usize) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        if !(hi > lo) {
            return Err(Error::OutOfRange {
                value: hi,
                lo,
                hi: f64::INFINITY,
            });
        }
        let half = 0.5 * (hi - lo);
        let values = cheb_points(degree)
            .par_iter()
            .map(|&t| f(lo + half * (t + 1.0)))
            .collect::<Result<Vec<f64>>>()?;
        let mut c = cheb_coefficients(&values);
        // Drop the rounding-noise plateau so that derivatives stay clean.
        let big = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        while c.len() > 1
            && c.last()
                .is_some_and(|v| v.abs() <= 64.0 * f64::EPSILON * big)
        {
            c.pop();
        }
        let mut series = Vec::with_capacity(kmax + 1);
        let mut factor = 1.0;
        for _ in 0..=kmax {
            series.push(c.iter().map(|v| v * factor).collect::<Vec<f64>>());
            c = cheb_derivative_coefficients(&c);
            factor /= half;
        }
        Ok(LimitCurve { lo, hi, series })
    }

    pub fn max_order(&self) -> usize {
        self.series.len() - 1
    }

    /// `f^(k)(s)`.
    pub fn derivative(&self, k: usize, s: f64) -> f64 {
        let t = (2.0 * s - self.lo - self.hi) / (self.hi - self.lo);
        cheb_eval(&self.series[k], t)
    }

    /// `f^(k)(s)` for `k = 0..=kmax`.
    pub fn derivatives(&self, s: f64, kmax: usize) -> Vec<f64> {
        (0..=kmax).map(|k| self.derivative(k, s)).collect()
    }
}

// ---------------------------------------------------------------------------
// Evaluation.

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionRequest {
    pub spec: EnsembleSpec,
    pub s: f64,
    pub quantity: Quantity,
    /// Correction order.
    pub m: u32,
}

/// The `m`-term expansion of one quantity on an s-range.
#[derive(Debug, Clone)]
pub struct ExpansionCurve {
    pub spec: EnsembleSpec,
    pub scaling: ScalingParams,
    pub m: u32,
    pub curve: LimitCurve,
    /// `polys[j - 1][k - 1] = P_{beta,j,k}` and its s-derivative.
    polys: Vec<Vec<(QPoly, QPoly)>>,
}

fn table_rows(table: &CoefficientTable, beta: u32, m: u32) -> Result<Vec<Vec<(QPoly, QPoly)>>> {
    (1..=m)
        .map(|j| {
            (1..=2 * j)
                .map(|k| {
                    let p = table.poly(beta, j, k)?.clone();
                    let dp = p.partial_s();
                    Ok((p, dp))
                })
                .collect()
        })
        .collect()
}

impl ExpansionCurve {
    /// Expansion of `quantity` for `spec` through order `m`, valid on `[lo, hi]`.
    pub fn new(
        table: &CoefficientTable,
        spec: &EnsembleSpec,
        quantity: &Quantity,
        m: u32,
        (lo, hi): (f64, f64),
    ) -> Result<Self> {
        spec.validate()?;
        quantity.validate()?;
        for s in [lo, hi] {
            if !(S_WINDOW.0..=S_WINDOW.1).contains(&s) {
                return Err(Error::WindowCoverage(format!(
                    "s = {s} outside the working window [{}, {}]",
                    S_WINDOW.0, S_WINDOW.1
                )));
            }
        }
        let beta = spec.beta;
        let polys = table_rows(table, beta.value(), m)?;
        let scaling = spec.expansion_scaling()?;
        let kmax = 2 * m as usize + 1;
        let q = quantity.clone();
        let curve = LimitCurve::build(
            move |s| q.limit_value(beta, s),
            lo - CURVE_MARGIN,
            hi + CURVE_MARGIN,
            CURVE_DEGREE,
            kmax,
        )?;
        Ok(ExpansionCurve {
            spec: *spec,
            scaling,
            m,
            curve,
            polys,
        })
    }

    fn check(&self, s: f64) -> Result<()> {
        if s >= self.curve.lo + CURVE_MARGIN - 1e-12 && s <= self.curve.hi - CURVE_MARGIN + 1e-12 {
            Ok(())
        } else {
            Err(Error::WindowCoverage(format!(
                "s = {s} outside the curve range [{}, {}]",
                self.curve.lo + CURVE_MARGIN,
                self.curve.hi - CURVE_MARGIN
            )))
        }
    }

    /// `[F, h G_1, ..., h^m G_m]` at `s`.
    pub fn terms(&self, s: f64) -> Result<Vec<f64>> {
        self.check(s)?;
        let tau = self.scaling.tau;
        let d = self.curve.derivatives(s, 2 * self.m as usize);
        let mut out = vec![d[0]];
        let mut hj = 1.0;
        for row in &self.polys {
            hj *= self.scaling.h;
            let g: f64 = row
                .iter()
                .enumerate()
                .map(|(i, (p, _))| eval_st(p, s, tau) * d[i + 1])
                .sum();
            out.push(hj * g);
        }
        Ok(out)
    }

    /// s-derivatives of the terms; the density of a CDF expansion.
    pub fn density_terms(&self, s: f64) -> Result<Vec<f64>> {
        self.check(s)?;
        let tau = self.scaling.tau;
        let d = self.curve.derivatives(s, 2 * self.m as usize + 1);
        let mut out = vec![d[1]];
        let mut hj = 1.0;
        for row in &self.polys {
            hj *= self.scaling.h;
            let g: f64 = row
                .iter()
                .enumerate()
                .map(|(i, (p, dp))| eval_st(dp, s, tau) * d[i + 1] + eval_st(p, s, tau) * d[i + 2])
                .sum();
            out.push(hj * g);
        }
        Ok(out)
    }

    /// Partial sums for `m = 0..=self.m`.
    pub fn partial_sums(&self, s: f64) -> Result<Vec<f64>> {
        Ok(cumulative(&self.terms(s)?))
    }

    pub fn density_partial_sums(&self, s: f64) -> Result<Vec<f64>> {
        Ok(cumulative(&self.density_terms(s)?))
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        Ok(self.terms(s)?.iter().sum())
    }
}

fn cumulative(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Value of the `m`-term expansion at one point.
pub fn evaluate(table: &CoefficientTable, req: &ExpansionRequest) -> Result<f64> {
    let half = 1.0;
    let lo = (req.s - half).max(S_WINDOW.0);
    let hi = (req.s + half).min(S_WINDOW.1);
    if !(req.s >= S_WINDOW.0 && req.s <= S_WINDOW.1) {
        return Err(Error::WindowCoverage(format!(
            "s = {} outside the working window [{}, {}]",
            req.s, S_WINDOW.0, S_WINDOW.1
        )));
    }
    ExpansionCurve::new(table, &req.spec, &req.quantity, req.m, (lo, hi))?.value(req.s)
}

// ---------------------------------------------------------------------------
// beta = 2 derivatives through Painlevé II.

/// `F_2^(k)(s; xi)`, `k = 0..=kmax`, from `F_2^(k) / F_2 = r_k(s, q, q')`.
pub struct UnitaryBasis {
    pub solution: PIISolution,
    tower: Vec<QPoly>,
}

impl UnitaryBasis {
    pub fn new(xi: f64, kmax: usize) -> Result<Self> {
        let solution = solve_q(xi, DEFAULT_L_MINUS, DEFAULT_L_PLUS)?;
        let tower = if kmax == 0 {
            Vec::new()
        } else {
            logderiv_tower(TowerBase::F2, kmax)?
        };
        Ok(UnitaryBasis { solution, tower })
    }

    pub fn derivatives(&self, s: f64) -> Result<Vec<f64>> {
        let f = self.solution.log_f2(s)?.exp();
        let q = self.solution.q(s)?;
        let p = self.solution.q_prime(s)?;
        let mut out = vec![f];
        out.extend(self.tower.iter().map(|r| f * eval_poly(r, s, 0.0, q, p)));
        Ok(out)
    }
}

/// `G_{2,j}(s, tau; xi)` assembled from table rows and a derivative list.
fn assemble_g(row: &[QPoly], s: f64, tau: f64, d: &[f64]) -> f64 {
    row.iter()
        .enumerate()
        .map(|(i, p)| eval_st(p, s, tau) * d[i + 1])
        .sum()
}

// ---------------------------------------------------------------------------
// Extraction of G_{2,j} from exact finite-n values.

/// Indices of the finite-n ladder and the number of h-powers fitted.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    pub ns: Vec<usize>,
    pub terms: usize,
}

impl Default for Ladder {
    fn default() -> Self {
        Ladder {
            ns: (0..30)
                .map(|i| (12.0 * 1.12f64.powi(i)).round() as usize)
                .collect(),
            terms: 8,
        }
    }
}

/// An empirical correction curve `G_{2,j}(s, tau; xi)` on an s-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionCurve {
    pub family: Family,
    /// `p / n` along the ladder (Laguerre).
    pub ratio: Option<f64>,
    pub tau: f64,
    pub xi: f64,
    pub j: u32,
    pub s: Vec<f64>,
    pub values: Vec<f64>,
    /// Change of each value when one fewer h-power is fitted.
    pub uncertainty: Vec<f64>,
}

fn ladder_spec(family: Family, ratio: Option<f64>, n: usize) -> Result<EnsembleSpec> {
    match family {
        Family::Gaussian => EnsembleSpec::gaussian(Beta::Unitary, n),
        Family::Laguerre => {
            let r = ratio.ok_or_else(|| {
                Error::InvalidEnsemble("Laguerre ladder needs a ratio p / n".into())
            })?;
            EnsembleSpec::laguerre(Beta::Unitary, n, r * n as f64)
        }
    }
}

/// `tau` of a ladder (constant along it).
pub fn ladder_tau(family: Family, ratio: Option<f64>) -> Result<f64> {
    match family {
        Family::Gaussian => Ok(0.0),
        Family::Laguerre => {
            let r = ratio.ok_or_else(|| {
                Error::InvalidEnsemble("Laguerre ladder needs a ratio p / n".into())
            })?;
            Ok(scaling(&EffectiveIndex::laguerre(1.0, r))?.tau)
        }
    }
}

/// Rows `1..=j` of the beta = 2 table, when complete.
fn known_rows(prior: &CoefficientTable, upto: u32) -> Result<Vec<Vec<QPoly>>> {
    (1..=upto)
        .map(|j| (1..=2 * j).map(|k| prior.poly(2, j, k).cloned()).collect())
        .collect()
}

/// Empirical `G_{2,1..=j_max}` on `s_grid`.
///
/// `D(n, s) = E_{2,n}(mu_n + sigma_n s; xi) - F_2(s; xi)` is evaluated along the
/// ladder; orders already present in `prior` are subtracted exactly before
/// the next one is isolated by a least-squares fit in powers of `h_n`.
pub fn extract_corrections(
    family: Family,
    ratio: Option<f64>,
    j_max: u32,
    s_grid: &[f64],
    xi: f64,
    prior: &CoefficientTable,
    ladder: &Ladder,
) -> Result<Vec<CorrectionCurve>> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::OutOfRange {
            value: xi,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let known = prior.max_order(2).min(j_max.saturating_sub(1));
    let free = (j_max - known) as usize;
    if j_max == 0 || ladder.terms < free + 2 || ladder.ns.len() < ladder.terms + 2 {
        return Err(Error::LadderTooShort {
            have: ladder.ns.len(),
            j_max: j_max as usize,
        });
    }
    let tau = ladder_tau(family, ratio)?;
    let rows = known_rows(prior, known)?;
    let basis = UnitaryBasis::new(xi, 2 * known as usize)?;
    let specs = ladder
        .ns
        .iter()
        .map(|&n| {
            let spec = ladder_spec(family, ratio, n)?;
            Ok((spec, unitary_scaling(&spec)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let per_s = s_grid
        .par_iter()
        .map(|&s| -> Result<Vec<(f64, f64)>> {
            let d = basis.derivatives(s)?;
            let known_g: Vec<f64> = rows.iter().map(|r| assemble_g(r, s, tau, &d)).collect();
            let m = specs.len();
            let mut a = DMatrix::zeros(m, ladder.terms);
            let mut b = DVector::zeros(m);
            for (i, (spec, sc)) in specs.iter().enumerate() {
                let e = gram(spec, sc.level(s), None)?.e2n(xi);
                let mut r = e - d[0];
                let mut hp = 1.0;
                for g in &known_g {
                    hp *= sc.h;
                    r -= hp * g;
                }
                hp *= sc.h;
                b[i] = r / hp;
                for c in 0..ladder.terms {
                    a[(i, c)] = sc.h.powi(c as i32);
                }
            }
            let fit = |skip: usize, cols: usize| -> Result<DVector<f64>> {
                a.view((skip, 0), (m - skip, cols))
                    .into_owned()
                    .svd(true, true)
                    .solve(&b.rows(skip, m - skip).into_owned(), 0.0)
                    .map_err(|e| Error::Format(e.to_string()))
            };
            // Spread over perturbed fits serves as the noise estimate.
            let full = fit(0, ladder.terms)?;
            let others = [fit(0, ladder.terms - 1)?, fit(m / 4, ladder.terms)?];
            let mut out: Vec<(f64, f64)> = known_g.into_iter().map(|g| (g, 0.0)).collect();
            out.extend((0..free).map(|i| {
                let spread = others
                    .iter()
                    .map(|o| (o[i] - full[i]).abs())
                    .fold(0.0, f64::max);
                (full[i], spread)
            }));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok((1..=j_max)
        .map(|j| CorrectionCurve {
            family,
            ratio,
            tau,
            xi,
            j,
            s: s_grid.to_vec(),
            values: per_s.iter().map(|v| v[j as usize - 1].0).collect(),
            uncertainty: per_s.iter().map(|v| v[j as usize - 1].1).collect(),
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Rational reconstruction.

fn divisors() -> &'static [u64] {
    static DIVS: OnceLock<Vec<u64>> = OnceLock::new();
    DIVS.get_or_init(|| {
        let mut d = vec![1u64];
        for (prime, power) in [(2u64, 8u32), (3, 4), (5, 2), (7, 2)] {
            d = d
                .iter()
                .flat_map(|&x| (0..=power).map(move |e| x * prime.pow(e)))
                .collect();
        }
        d.sort_unstable();
        d
    })
}

/// Rational of smallest admissible denominator within `tol` of `x`.
pub fn round_rational(x: f64, tol: f64) -> Option<Rational> {
    for &d in divisors() {
        let n = (x * d as f64).round();
        if (n / d as f64 - x).abs() <= tol && n.abs() < 9e15 {
            return Some(Rational::new(BigInt::from(n as i64), BigInt::from(d)));
        }
    }
    None
}

/// Result of a reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub j: u32,
    /// `P_{2,j,k}`, `k = 1..=2j`.
    pub polys: Vec<QPoly>,
    /// Max absolute residual of the rounded polynomials over all input curves.
    pub certificate: f64,
    /// Whether every coefficient was rounded and the certificate is below tolerance.
    pub rounded: bool,
    pub degree_bound: u32,
}

impl Reconstruction {
    pub fn provenance(&self) -> Provenance {
        if self.rounded {
            Provenance::DerivedNumeric
        } else {
            Provenance::DerivedNumericUnrounded
        }
    }
}

/// Exponential part of order j: the `h^j` coefficient of `exp(sum_{i<j} h^i L_i)`
/// applied to `F`, where `L_i = sum_k P_{2,i,k} d^k/ds^k`. Only `j <= 2` is used.
pub fn exponential_prior(prior: &CoefficientTable, j: u32) -> Result<Vec<QPoly>> {
    let width = 2 * j as usize;
    let mut out = vec![QPoly::zero(); width];
    if j == 2 && prior.max_order(2) >= 1 {
        let a = prior.poly(2, 1, 1)?;
        let b = prior.poly(2, 1, 2)?;
        let (da, db) = (a.partial_s(), b.partial_s());
        let (dda, ddb) = (da.partial_s(), db.partial_s());
        let half = crate::symbolic::rat(1, 2);
        // L^2 F = (a a' + b a'') F' + (a^2 + a b' + 2 b a' + b b'') F''
        //       + 2 (a b + b b') F''' + b^2 F''''.
        out[0] = (&(a * &da) + &(b * &dda)).scale(&half);
        out[1] = (&(&(&(a * a) + &(a * &db)) + &(b * &da).scale(&crate::symbolic::rat(2, 1)))
            + &(b * &ddb))
            .scale(&half);
        out[2] = &(a * b) + &(b * &db);
        out[3] = (b * b).scale(&half);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct Column {
    k: usize,
    ds: u32,
    dt: u32,
}

/// Least-squares fit of the curves by `sum_k P_k(s, tau) F_2^(k)` followed by
/// coefficient-by-coefficient rational rounding.
///
/// The unknown polynomials have `s`-degree and total degree at most the degree
/// bound (default `3j`) and contain only monomials `s^d` with `d - k = j (mod 3)`;
/// the `tau`-degree is capped by `j` and by the number of distinct `tau` values
/// minus one. Rounding fixes the best-determined coefficient first
/// and refits the rest. With `prior` holding lower orders the fit is taken
/// relative to [`exponential_prior`].
pub fn reconstruct_polynomials(
    curves: &[CorrectionCurve],
    degree_bound: Option<u32>,
    prior: &CoefficientTable,
) -> Result<Reconstruction> {
    let first = curves
        .first()
        .ok_or_else(|| Error::Table("no correction curves".into()))?;
    let j = first.j;
    if curves.iter().any(|c| c.j != j) {
        return Err(Error::Table("curves of different orders".into()));
    }
    let mut taus: Vec<f64> = curves.iter().map(|c| c.tau).collect();
    taus.sort_by(|a, b| a.total_cmp(b));
    taus.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    if taus.len() == 1 && taus[0] != 0.0 {
        return Err(Error::Table(
            "tau dependence needs a tau grid or the Gaussian (tau = 0) curve".into(),
        ));
    }
    let bound = degree_bound.unwrap_or(3 * j);
    let tau_bound = (taus.len() as u32 - 1).min(j);
    let width = 2 * j as usize;
    let base = exponential_prior(prior, j)?;

    let mut columns = Vec::new();
    for k in 0..width {
        // Airy scaling grading: s^d d^k h^j appears only for d - k = j (mod 3).
        for ds in (0..=bound).filter(|&d| (d as i64 - k as i64 - 1 - j as i64).rem_euclid(3) == 0) {
            for dt in 0..=tau_bound.min(bound - ds) {
                columns.push(Column { k, ds, dt });
            }
        }
    }

    // Design rows over all curves.
    let mut xis: Vec<f64> = curves.iter().map(|c| c.xi).collect();
    xis.sort_by(|a, b| a.total_cmp(b));
    xis.dedup();
    let bases = xis
        .par_iter()
        .map(|&xi| Ok((xi.to_bits(), UnitaryBasis::new(xi, width)?)))
        .collect::<Result<BTreeMap<u64, UnitaryBasis>>>()?;
    let mut rows: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    for c in curves {
        let basis = &bases[&c.xi.to_bits()];
        // Pointwise spreads are erratic; one level per curve is more honest.
        let noise = c.uncertainty.iter().fold(
            NOISE_FLOOR * c.values.iter().fold(0.0f64, |a, v| a.max(v.abs())),
            |a, &v| a.max(v),
        );
        for (&s, &g) in c.s.iter().zip(&c.values) {
            let d = basis.derivatives(s)?;
            let target = g - assemble_g(&base, s, c.tau, &d);
            let row: Vec<f64> = columns
                .iter()
                .map(|col| s.powi(col.ds as i32) * c.tau.powi(col.dt as i32) * d[col.k + 1])
                .collect();
            rows.push((row, target, noise.max(f64::MIN_POSITIVE)));
        }
    }
    let design = DMatrix::from_fn(rows.len(), columns.len(), |i, c| rows[i].0[c]);
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let noise = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.2));

    let fit = RoundingFit::new(&design, &y, &noise);
    // Highest degrees first, then highest derivative order.
    let mut prune: Vec<usize> = (0..columns.len()).collect();
    prune.sort_by_key(|&i| {
        let c = columns[i];
        std::cmp::Reverse((c.ds + c.dt, c.k))
    });
    let base_lcm = base
        .iter()
        .flat_map(|q| q.terms().map(|(_, r)| r.denom().clone()))
        .fold(BigInt::from(1), |l, d| l.lcm(&d));
    let (fixed, values, chi, threshold) = fit.run(&prune, base_lcm);
    let rounded_all = fixed.iter().all(Option::is_some);
    let mut polys = base;
    let mut coef = DVector::zeros(columns.len());
    for (i, col) in columns.iter().enumerate() {
        coef[i] = values[i];
        if let Some(r) = &fixed[i] {
            if !r.is_zero() {
                polys[col.k].add_term([col.ds, col.dt, 0, 0], r.clone());
            }
        }
    }
    let certificate = (&design * &coef - &y).amax();
    Ok(Reconstruction {
        j,
        polys,
        certificate,
        rounded: rounded_all && chi <= threshold && certificate < CERTIFICATE_TOL,
        degree_bound: bound,
    })
}

/// Relative floor on the per-point noise of a correction curve.
const NOISE_FLOOR: f64 = 1e-10;
/// A rounding is accepted while the max noise-normalized residual stays below
/// this value (or twice that of the unrounded fit, if larger).
const CHI_ACCEPT: f64 = 10.0;
/// Bound on `window * d^2` for a candidate of denominator `d`.
const PLAUSIBILITY: f64 = 0.1;
/// Relative floor on the rounding window.
const WINDOW_FLOOR: f64 = 1e-7;

/// Weighted least squares with coefficient-by-coefficient rational rounding.
struct RoundingFit<'a> {
    design: &'a DMatrix<f64>,
    y: &'a DVector<f64>,
    weights: DVector<f64>,
}

impl<'a> RoundingFit<'a> {
    fn new(design: &'a DMatrix<f64>, y: &'a DVector<f64>, noise: &DVector<f64>) -> Self {
        RoundingFit {
            design,
            y,
            weights: noise.map(|v| 1.0 / v),
        }
    }

    /// Fit the free unknowns with the others held at `values`; returns the
    /// full value vector, per-unknown standard errors and the max normalized residual.
    fn solve(&self, fixed: &[Option<Rational>], values: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let p = self.design.ncols();
        let free: Vec<usize> = (0..p).filter(|&i| fixed[i].is_none()).collect();
        let mut rhs = self.y.clone();
        for i in 0..p {
            if fixed[i].is_some() {
                rhs -= self.design.column(i) * values[i];
            }
        }
        rhs.component_mul_assign(&self.weights);
        let mut out = values.to_vec();
        let mut se = vec![0.0; p];
        let resid = if free.is_empty() {
            rhs
        } else {
            let norms: Vec<f64> = free
                .iter()
                .map(|&i| {
                    self.design
                        .column(i)
                        .component_mul(&self.weights)
                        .norm()
                        .max(f64::MIN_POSITIVE)
                })
                .collect();
            let sub = DMatrix::from_fn(self.design.nrows(), free.len(), |r, c| {
                self.design[(r, free[c])] * self.weights[r] / norms[c]
            });
            let svd = sub.clone().svd(true, true);
            let sol = svd
                .solve(&rhs, 0.0)
                .unwrap_or_else(|_| DVector::zeros(free.len()));
            let v_t = svd.v_t.as_ref().expect("svd computed with V");
            for (c, &i) in free.iter().enumerate() {
                out[i] = sol[c] / norms[c];
                let var: f64 = svd
                    .singular_values
                    .iter()
                    .enumerate()
                    .map(|(k, &sv)| {
                        if sv > 0.0 {
                            (v_t[(k, c)] / sv).powi(2)
                        } else {
                            f64::INFINITY
                        }
                    })
                    .sum();
                se[i] = var.sqrt() / norms[c];
            }
            &sub * &sol - &rhs
        };
        (out, se, resid.amax())
    }

    /// Phase one fixes unknowns to zero in the given order while the data
    /// allow it; phase two rounds the rest, best-determined first.
    fn run(
        &self,
        prune_order: &[usize],
        base_lcm: BigInt,
    ) -> (Vec<Option<Rational>>, Vec<f64>, f64, f64) {
        let p = self.design.ncols();
        let mut fixed: Vec<Option<Rational>> = vec![None; p];
        let (mut values, _, chi0) = self.solve(&fixed, &vec![0.0; p]);
        let threshold = CHI_ACCEPT.max(2.0 * chi0);
        let mut chi = chi0;
        for &i in prune_order {
            fixed[i] = Some(Rational::zero());
            let mut trial = values.clone();
            trial[i] = 0.0;
            let (vals, _, x) = self.solve(&fixed, &trial);
            if x <= threshold {
                values = vals;
                chi = x;
            } else {
                fixed[i] = None;
            }
        }
        loop {
            let (vals, se, _) = self.solve(&fixed, &values);
            values = vals;
            let mut order: Vec<usize> = (0..p).filter(|&i| fixed[i].is_none()).collect();
            if order.is_empty() {
                break;
            }
            order.sort_by(|&a, &b| se[a].total_cmp(&se[b]));
            let mut accepted = false;
            'outer: for i in order {
                let c = values[i];
                let window = (30.0 * se[i]).max(WINDOW_FLOOR * c.abs().max(1.0));
                for &d in divisors() {
                    let n = (c * d as f64).round();
                    let cand = n / d as f64;
                    // Large denominators are only plausible for well-determined values.
                    let df = d as f64;
                    if (cand - c).abs() > window
                        || (d > 1 && window * df * df > PLAUSIBILITY)
                        || n.abs() > 9e15
                    {
                        continue;
                    }
                    fixed[i] = Some(Rational::new(BigInt::from(n as i64), BigInt::from(d)));
                    let mut trial = values.clone();
                    trial[i] = cand;
                    let (vals, _, x) = self.solve(&fixed, &trial);
                    if x <= threshold {
                        values = vals;
                        chi = x;
                        accepted = true;
                        break 'outer;
                    }
                    fixed[i] = None;
                }
            }
            if !accepted {
                break;
            }
        }
        self.common_denominator_pass(&mut fixed, &mut values, &mut chi, threshold, base_lcm);
        (fixed, values, chi, threshold)
    }

    /// Coefficients of one order share a denominator. Leftovers are snapped to
    /// the lattice spanned by the lcm of the accepted and prior denominators when that
    /// lattice is coarse enough to leave a single candidate in the window.
    fn common_denominator_pass(
        &self,
        fixed: &mut [Option<Rational>],
        values: &mut Vec<f64>,
        chi: &mut f64,
        threshold: f64,
        base_lcm: BigInt,
    ) {
        let lcm = fixed
            .iter()
            .flatten()
            .filter(|r| !r.is_zero())
            .fold(base_lcm, |l, r| l.lcm(r.denom()));
        let Some(l) = lcm.to_f64().filter(|&l| l > 1.0) else {
            return;
        };
        loop {
            let (vals, se, _) = self.solve(fixed, values);
            *values = vals;
            let mut order: Vec<usize> = (0..fixed.len()).filter(|&i| fixed[i].is_none()).collect();
            order.sort_by(|&a, &b| se[a].total_cmp(&se[b]));
            let mut accepted = false;
            for i in order {
                let window = 30.0 * se[i];
                let n = (values[i] * l).round();
                let cand = n / l;
                if window * l >= 0.5 || (cand - values[i]).abs() > window {
                    continue;
                }
                fixed[i] = Some(Rational::new(BigInt::from(n as i64), lcm.clone()));
                let mut trial = values.clone();
                trial[i] = cand;
                let (vals, _, x) = self.solve(fixed, &trial);
                if x <= threshold {
                    *values = vals;
                    *chi = x;
                    accepted = true;
                    break;
                }
                fixed[i] = None;
            }
            if !accepted {
                return;
            }
        }
    }
}

/// Settings of a full derivation run.
#[derive(Debug, Clone, PartialEq)]
pub struct DeriveConfig {
    pub j_max: u32,
    /// Values of xi whose curves are fitted jointly.
    pub xis: Vec<f64>,
    /// Laguerre ratios `p / n`; the Gaussian ladder is always included.
    pub ratios: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub ladder: Ladder,
}

impl Default for DeriveConfig {
    fn default() -> Self {
        DeriveConfig {
            j_max: 2,
            xis: vec![0.5],
            ratios: vec![4.0, 9.0, 16.0, 36.0],
            s_grid: (0..=40).map(|i| -5.0 + 0.175 * i as f64).collect(),
            ladder: Ladder::default(),
        }
    }
}

/// Derives the beta = 2 rows order by order, each fitted relative to the
/// previous ones, then completes beta = 1, 4 from the transfer relations.
pub fn derive_table(cfg: &DeriveConfig) -> Result<(CoefficientTable, Vec<Reconstruction>)> {
    if !(1..=2).contains(&cfg.j_max) {
        return Err(Error::Table("derivation supports orders 1 and 2".into()));
    }
    let mut ladders: Vec<(Family, Option<f64>)> = vec![(Family::Gaussian, None)];
    ladders.extend(cfg.ratios.iter().map(|&r| (Family::Laguerre, Some(r))));
    let mut table = CoefficientTable::new();
    let mut recs = Vec::new();
    for j in 1..=cfg.j_max {
        let mut curves = Vec::new();
        for &xi in &cfg.xis {
            for &(family, ratio) in &ladders {
                let c =
                    extract_corrections(family, ratio, j, &cfg.s_grid, xi, &table, &cfg.ladder)?;
                curves.push(c[j as usize - 1].clone());
            }
        }
        let rec = reconstruct_polynomials(&curves, None, &table)?;
        insert_reconstruction(&mut table, &rec)?;
        recs.push(rec);
    }
    table.derive_beta_one_four()?;
    Ok((table, recs))
}

/// Store a reconstruction as `beta = 2` entries.
pub fn insert_reconstruction(table: &mut CoefficientTable, rec: &Reconstruction) -> Result<()> {
    for (i, p) in rec.polys.iter().enumerate() {
        table.insert(
            2,
            rec.j,
            i as u32 + 1,
            TableEntry {
                poly: p.clone(),
                provenance: rec.provenance(),
                certificate: Some(rec.certificate),
            },
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finiten::e2n_scaled;
    use crate::fredholm::limit_f_beta;
    use crate::symbolic::rat;

    fn poly(terms: &[(u32, u32, i64, i64)]) -> QPoly {
        let mut p = QPoly::zero();
        for &(ds, dt, n, d) in terms {
            p.add_term([ds, dt, 0, 0], rat(n, d));
        }
        p
    }

    fn gue(n: usize) -> EnsembleSpec {
        EnsembleSpec::gaussian(Beta::Unitary, n).unwrap()
    }

    #[test]
    fn shipped_table_has_two_orders_and_duality() {
        let t = shipped_table();
        for beta in [1, 2, 4] {
            assert_eq!(t.max_order(beta), 2);
        }
        t.check_duality().unwrap();
        assert_eq!(
            t.poly(2, 1, 1).unwrap(),
            &poly(&[(2, 0, 1, 5), (2, 1, -2, 5)])
        );
        assert_eq!(
            t.poly(2, 1, 2).unwrap(),
            &poly(&[(0, 0, -3, 10), (0, 1, 1, 10)])
        );
        for (_, e) in t.entries() {
            assert!(e.certificate.is_some_and(|c| c < CERTIFICATE_TOL));
        }
    }

    #[test]
    fn table_roundtrip() {
        let header = TableHeader {
            commit: "abc".into(),
            generator: "test".into(),
        };
        let text = write_table(shipped_table(), &header).unwrap();
        let (back, h) = read_table(&text).unwrap();
        assert_eq!(&back, shipped_table());
        assert_eq!(h, header);
    }

    #[test]
    fn transferred_first_order_relations() {
        let t = shipped_table();
        assert_eq!(t.poly(1, 1, 1).unwrap(), t.poly(2, 1, 1).unwrap());
        assert_eq!(
            t.poly(1, 1, 2).unwrap(),
            &t.poly(2, 1, 2).unwrap().scale(&rat(2, 1))
        );
    }

    #[test]
    fn order_zero_is_the_limit_law() {
        for beta in [Beta::Orthogonal, Beta::Unitary, Beta::Symplectic] {
            let spec = EnsembleSpec::gaussian(beta, 10).unwrap();
            for s in [-2.0, 0.0, 1.5] {
                let req = ExpansionRequest {
                    spec,
                    s,
                    quantity: Quantity::Generating { xi: 0.7 },
                    m: 0,
                };
                let v = evaluate(shipped_table(), &req).unwrap();
                assert!((v - limit_f_beta(beta, s, 0.7).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn xi_zero_gives_one() {
        let spec = EnsembleSpec::laguerre(Beta::Orthogonal, 8, 20.0).unwrap();
        for m in 0..=2 {
            let req = ExpansionRequest {
                spec,
                s: -1.0,
                quantity: Quantity::Generating { xi: 0.0 },
                m,
            };
            assert_eq!(evaluate(shipped_table(), &req).unwrap(), 1.0);
        }
    }

    #[test]
    fn missing_order_and_window_are_errors() {
        let req = ExpansionRequest {
            spec: gue(10),
            s: 0.0,
            quantity: Quantity::Generating { xi: 1.0 },
            m: 3,
        };
        assert!(evaluate(shipped_table(), &req).is_err());
        let req = ExpansionRequest {
            s: 9.0,
            m: 1,
            ..req
        };
        assert!(evaluate(shipped_table(), &req).is_err());
    }

    #[test]
    fn first_order_error_scales_like_h_squared() {
        let c: Vec<f64> = [40, 80, 160]
            .iter()
            .map(|&n| {
                let spec = gue(n);
                let req = ExpansionRequest {
                    spec,
                    s: 0.0,
                    quantity: Quantity::Generating { xi: 1.0 },
                    m: 1,
                };
                let err =
                    evaluate(shipped_table(), &req).unwrap() - e2n_scaled(&spec, 0.0, 1.0).unwrap();
                let h = spec.expansion_scaling().unwrap().h;
                err.abs() / (h * h)
            })
            .collect();
        let (lo, hi) = c
            .iter()
            .fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi < 1.0 && hi / lo < 1.5, "C estimates {c:?}");
    }

    #[test]
    fn interlacing_duality_n5_k1() {
        let se = EnsembleSpec::gaussian(Beta::Symplectic, 5).unwrap();
        let oe = EnsembleSpec::gaussian(Beta::Orthogonal, 11).unwrap();
        for m in 0..=2 {
            let a = ExpansionCurve::new(
                shipped_table(),
                &se,
                &Quantity::KthLargest { k: 1 },
                m,
                (-2.0, 2.0),
            )
            .unwrap();
            let b = ExpansionCurve::new(
                shipped_table(),
                &oe,
                &Quantity::KthLargest { k: 3 },
                m,
                (-2.0, 2.0),
            )
            .unwrap();
            for s in [-2.0, 0.0, 2.0] {
                let (x, y) = (a.value(s).unwrap(), b.value(s).unwrap());
                assert!((x - y).abs() < 1e-9, "m={m} s={s}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn density_terms_match_finite_differences() {
        let curve = ExpansionCurve::new(
            shipped_table(),
            &EnsembleSpec::gaussian(Beta::Orthogonal, 10).unwrap(),
            &Quantity::KthLargest { k: 3 },
            2,
            (-4.0, 2.0),
        )
        .unwrap();
        let eps = 1e-4;
        for s in [-3.0, -1.0, 1.0] {
            let d = curve.density_partial_sums(s).unwrap();
            let (a, b) = (
                curve.partial_sums(s + eps).unwrap(),
                curve.partial_sums(s - eps).unwrap(),
            );
            for m in 0..3 {
                assert!((d[m] - (a[m] - b[m]) / (2.0 * eps)).abs() < 1e-6);
            }
        }
    }

    fn planted_curve(
        polys: &[QPoly],
        prior: &[QPoly],
        tau: f64,
        xi: f64,
        j: u32,
    ) -> CorrectionCurve {
        let basis = UnitaryBasis::new(xi, 2 * j as usize).unwrap();
        let s: Vec<f64> = (0..=30).map(|i| -5.0 + 0.23 * i as f64).collect();
        let values = s
            .iter()
            .map(|&x| {
                let d = basis.derivatives(x).unwrap();
                let mut full = vec![QPoly::zero(); polys.len()];
                for (k, p) in polys.iter().enumerate() {
                    full[k] = p + prior.get(k).unwrap_or(&QPoly::zero());
                }
                assemble_g(&full, x, tau, &d)
            })
            .collect();
        CorrectionCurve {
            family: if tau == 0.0 {
                Family::Gaussian
            } else {
                Family::Laguerre
            },
            ratio: None,
            tau,
            xi,
            j,
            uncertainty: vec![0.0; s.len()],
            s,
            values,
        }
    }

    #[test]
    fn planted_first_order_is_recovered() {
        let planted = [
            poly(&[(2, 0, 3, 7), (2, 1, -1, 9)]),
            poly(&[(0, 0, -5, 12), (0, 1, 1, 4), (3, 0, 1, 16)]),
        ];
        let curves: Vec<CorrectionCurve> = [0.0, 0.4, 0.7]
            .iter()
            .map(|&tau| planted_curve(&planted, &[], tau, 0.5, 1))
            .collect();
        let rec = reconstruct_polynomials(&curves, None, &CoefficientTable::new()).unwrap();
        assert!(rec.rounded);
        assert_eq!(rec.polys, planted.to_vec());
    }

    #[test]
    fn planted_second_order_is_recovered_relative_to_prior() {
        let mut prior = CoefficientTable::new();
        let first = [poly(&[(2, 0, 1, 5)]), poly(&[(0, 0, -3, 10)])];
        for (k, p) in first.iter().enumerate() {
            prior
                .insert(
                    2,
                    1,
                    k as u32 + 1,
                    TableEntry {
                        poly: p.clone(),
                        provenance: Provenance::DerivedNumeric,
                        certificate: None,
                    },
                )
                .unwrap();
        }
        let base = exponential_prior(&prior, 2).unwrap();
        let extra = [
            poly(&[(3, 0, -3, 35), (0, 0, -12, 35)]),
            poly(&[(1, 0, 12, 35)]),
            QPoly::zero(),
            QPoly::zero(),
        ];
        let curve = planted_curve(&extra, &base, 0.0, 0.5, 2);
        let rec = reconstruct_polynomials(&[curve], None, &prior).unwrap();
        assert!(rec.rounded);
        let expected: Vec<QPoly> = base.iter().zip(&extra).map(|(a, b)| a + b).collect();
        assert_eq!(rec.polys, expected);
        assert_eq!(&expected[3], &poly(&[(0, 0, 9, 200)]));
    }

    #[test]
    fn round_rational_respects_bound() {
        assert_eq!(round_rational(0.6, 1e-12), Some(rat(3, 5)));
        assert_eq!(round_rational(-141.0 / 350.0, 1e-12), Some(rat(-141, 350)));
        assert_eq!(round_rational(1.0 / 11.0, 1e-12), None);
    }
}
