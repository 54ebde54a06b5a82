//! Monte Carlo samplers for the Gaussian and Laguerre beta-ensembles and the
//! statistical checks built on them.
//!
//! Gaussian draws use the symmetric tridiagonal model, whose eigenvalue
//! density is `|Delta|^beta exp(-sum x^2 / 2)`; Laguerre draws use the
//! bidiagonal model `B B^T` with density `|Delta|^beta prod x^alpha exp(-x/2)`.
//! Levels are then rescaled to the weights `exp(-c x^2)` and `x^alpha exp(-c x)`
//! with `c = 1/2` for beta = 1 and `c = 1` for beta = 2, 4.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;

use crate::ensemble::{Beta, EnsembleSpec, Family};
use crate::error::{Error, Result};
use crate::expansion::{ExpansionCurve, Quantity};
use crate::fredholm::S_WINDOW;
use crate::quadrature::{cheb_barycentric, cheb_points};
use crate::symbolic::CoefficientTable;
use crate::tridiag::tridiagonal_eigenvalues;

/// Sorted spectra of independent draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub spec: EnsembleSpec,
    pub seed: u64,
    pub count: usize,
    pub workers: usize,
    /// One ascending spectrum per draw.
    pub spectra: Vec<Vec<f64>>,
}

impl SampleBatch {
    /// The `k`-th largest level of each draw (`k = 0` is the largest).
    pub fn kth_largest(&self, k: usize) -> Result<Vec<f64>> {
        let n = self.spec.n;
        if k >= n {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: n - 1,
            });
        }
        Ok(self.spectra.iter().map(|s| s[n - 1 - k]).collect())
    }
}

/// Default worker count: the rayon pool size.
pub fn default_workers() -> usize {
    rayon::current_num_threads().max(1)
}

/// `count` draws with the default worker count.
pub fn sample(spec: &EnsembleSpec, count: usize, seed: u64) -> Result<SampleBatch> {
    sample_with_workers(spec, count, seed, default_workers())
}

/// `count` draws split into `workers` contiguous blocks, block `w` drawn
/// from ChaCha8 stream `w` of `seed`.
pub fn sample_with_workers(
    spec: &EnsembleSpec,
    count: usize,
    seed: u64,
    workers: usize,
) -> Result<SampleBatch> {
    spec.validate()?;
    let workers = workers.max(1);
    let blocks = split_blocks(count, workers);
    let spectra: Vec<Vec<Vec<f64>>> = blocks
        .par_iter()
        .enumerate()
        .map(|(w, &len)| {
            let mut rng = worker_rng(seed, w);
            (0..len).map(|_| draw(spec, &mut rng)).collect()
        })
        .collect();
    Ok(SampleBatch {
        spec: *spec,
        seed,
        count,
        workers,
        spectra: spectra.into_iter().flatten().collect(),
    })
}

fn split_blocks(count: usize, workers: usize) -> Vec<usize> {
    let base = count / workers;
    let extra = count % workers;
    (0..workers)
        .map(|w| base + usize::from(w < extra))
        .collect()
}

/// Independent stream per worker.
pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

fn chi<R: Rng>(rng: &mut R, dof: f64) -> f64 {
    ChiSquared::new(dof)
        .expect("positive degrees of freedom")
        .sample(rng)
        .sqrt()
}

/// One ascending spectrum in the weight convention of the module docs.
pub fn draw<R: Rng>(spec: &EnsembleSpec, rng: &mut R) -> Vec<f64> {
    let n = spec.n;
    let beta = spec.beta.value() as f64;
    match spec.family {
        Family::Gaussian => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let d: Vec<f64> = (0..n)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    z * std::f64::consts::SQRT_2 * s
                })
                .collect();
            let e: Vec<f64> = (1..n)
                .map(|i| chi(rng, beta * (n - i) as f64) * s)
                .collect();
            let scale = gaussian_scale(spec.beta);
            tridiagonal_eigenvalues(&d, &e)
                .into_iter()
                .map(|x| x * scale)
                .collect()
        }
        Family::Laguerre => {
            let p = spec.p.unwrap_or(n as f64);
            let a = beta * p / 2.0;
            // Lower bidiagonal B: diagonal chi_{2a - beta i}, subdiagonal chi_{beta (n-1-i)}.
            let x: Vec<f64> = (0..n)
                .map(|i| chi(rng, 2.0 * a - beta * i as f64))
                .collect();
            let y: Vec<f64> = (0..n.saturating_sub(1))
                .map(|i| chi(rng, beta * (n - 1 - i) as f64))
                .collect();
            let d: Vec<f64> = (0..n)
                .map(|i| x[i] * x[i] + if i > 0 { y[i - 1] * y[i - 1] } else { 0.0 })
                .collect();
            let e: Vec<f64> = (0..n.saturating_sub(1)).map(|i| y[i] * x[i]).collect();
            let scale = laguerre_scale(spec.beta);
            let mut vals: Vec<f64> = tridiagonal_eigenvalues(&d, &e)
                .into_iter()
                .map(|v| v.max(0.0) * scale)
                .collect();
            vals.sort_by(|a, b| a.total_cmp(b));
            vals
        }
    }
}

/// Maps `exp(-x^2/2)` to `exp(-c x^2)`.
fn gaussian_scale(beta: Beta) -> f64 {
    match beta {
        Beta::Orthogonal => 1.0,
        _ => std::f64::consts::FRAC_1_SQRT_2,
    }
}

/// Maps `exp(-x/2)` to `exp(-c x)`.
fn laguerre_scale(beta: Beta) -> f64 {
    match beta {
        Beta::Orthogonal => 1.0,
        _ => 0.5,
    }
}

/// Asymptotic Kolmogorov survival function `P(K > lambda)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov statistic against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (f - lo).abs().max((hi - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Critical value of the one-sample statistic at level 5% or 1%.
pub fn ks_critical(count: usize, level: f64) -> f64 {
    let c = if level <= 0.01 { 1.628 } else { 1.358 };
    c / (count as f64).sqrt()
}

/// Two-sample KS statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    if a.is_empty() || b.is_empty() {
        return (0.0, 1.0);
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| p.total_cmp(q));
    y.sort_by(|p, q| p.total_cmp(q));
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    (d, kolmogorov_survival(lambda))
}

/// A smooth CDF tabulated at Chebyshev points and interpolated barycentrically.
pub struct TabulatedCdf {
    lo: f64,
    hi: f64,
    points: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedCdf {
    pub fn new<F: Fn(f64) -> Result<f64> + Sync>(
        lo: f64,
        hi: f64,
        degree: usize,
        f: F,
    ) -> Result<Self> {
        let points = cheb_points(degree);
        let values = points
            .par_iter()
            .map(|&t| f(lo + 0.5 * (hi - lo) * (t + 1.0)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(TabulatedCdf {
            lo,
            hi,
            points,
            values,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * (x - self.lo) / (self.hi - self.lo) - 1.0).clamp(-1.0, 1.0);
        cheb_barycentric(&self.points, &self.values, t).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsEntry {
    pub label: String,
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample KS checks of the decimation relations
/// `UE_n = even(OE_n u OE_{n+1})` and `SE_n = even(OE_{2n+1})`
/// for the largest and second-largest levels.
pub fn superposition_decimation_check(n: usize, count: usize, seed: u64) -> Result<Vec<KsEntry>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let goe = |m| EnsembleSpec::gaussian(Beta::Orthogonal, m);
    let a = sample(&goe(n)?, count, seed)?;
    let b = sample(&goe(n + 1)?, count, seed.wrapping_add(1))?;
    let gue = sample(
        &EnsembleSpec::gaussian(Beta::Unitary, n)?,
        count,
        seed.wrapping_add(2),
    )?;
    let big = sample(&goe(2 * n + 1)?, count, seed.wrapping_add(3))?;
    let gse = sample(
        &EnsembleSpec::gaussian(Beta::Symplectic, n)?,
        count,
        seed.wrapping_add(4),
    )?;

    let merged: Vec<Vec<f64>> = a
        .spectra
        .iter()
        .zip(&b.spectra)
        .map(|(x, y)| {
            let mut all: Vec<f64> = x.iter().chain(y).copied().collect();
            all.sort_by(|p, q| p.total_cmp(q));
            even_levels(&all)
        })
        .collect();
    let decimated: Vec<Vec<f64>> = big.spectra.iter().map(|s| even_levels(s)).collect();

    let mut out = Vec::new();
    for k in 0..2.min(n) {
        let top =
            |v: &Vec<Vec<f64>>| -> Vec<f64> { v.iter().map(|s| s[s.len() - 1 - k]).collect() };
        let (d, p) = ks_two_sample(&top(&merged), &gue.kth_largest(k)?);
        out.push(KsEntry {
            label: format!("even(OE_{n} + OE_{}) vs UE_{n}, k = {k}", n + 1),
            statistic: d,
            p_value: p,
        });
        let (d, p) = ks_two_sample(&top(&decimated), &gse.kth_largest(k)?);
        out.push(KsEntry {
            label: format!("even(OE_{}) vs SE_{n}, k = {k}", 2 * n + 1),
            statistic: d,
            p_value: p,
        });
    }
    Ok(out)
}

/// Levels at even 1-based ascending positions.
fn even_levels(sorted: &[f64]) -> Vec<f64> {
    sorted.iter().skip(1).step_by(2).copied().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThinningPoint {
    pub x: f64,
    pub empirical: f64,
    pub reference: f64,
    pub std_error: f64,
}

impl ThinningPoint {
    /// Deviation in binomial standard errors (floored at one count).
    pub fn z(&self, count: usize) -> f64 {
        let se = self.std_error.max(1.0 / count as f64);
        (self.empirical - self.reference).abs() / se
    }
}

/// Empirical CDF of the maximum of a xi-thinning against a reference.
pub fn thinning_check<F: Fn(f64) -> Result<f64>>(
    batch: &SampleBatch,
    xi: f64,
    x_grid: &[f64],
    seed: u64,
    reference: F,
) -> Result<Vec<ThinningPoint>> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::OutOfRange {
            value: xi,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let mut rng = worker_rng(seed, usize::MAX >> 1);
    let maxima: Vec<f64> = batch
        .spectra
        .iter()
        .map(|s| {
            s.iter()
                .filter(|_| rng.random::<f64>() < xi)
                .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
        })
        .collect();
    let count = maxima.len().max(1) as f64;
    x_grid
        .iter()
        .map(|&x| {
            let p = maxima.iter().filter(|&&m| m <= x).count() as f64 / count;
            Ok(ThinningPoint {
                x,
                empirical: p,
                reference: reference(x)?,
                std_error: (p * (1.0 - p) / count).sqrt(),
            })
        })
        .collect()
}

/// Histogram of a scaled order statistic against bin-averaged expansion densities.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Report {
    pub spec: EnsembleSpec,
    /// 0-based from the top.
    pub k: usize,
    pub count: usize,
    pub seed: u64,
    /// Freedman–Diaconis bin edges in the scaled variable.
    pub edges: Vec<f64>,
    /// Empirical density per bin.
    pub histogram: Vec<f64>,
    /// `densities[m][i]`: bin average of the `m`-term expansion density.
    pub densities: Vec<Vec<f64>>,
    /// L-infinity histogram-density distance per `m`.
    pub distances: Vec<f64>,
    /// Largest binomial standard error of the histogram.
    pub noise_floor: f64,
}

impl Figure1Report {
    /// Whether each distance drops below the previous by more than `factor`
    /// noise floors.
    pub fn improves(&self, factor: f64) -> bool {
        self.distances
            .windows(2)
            .all(|w| w[0] - w[1] > factor * self.noise_floor)
    }
}

/// Freedman–Diaconis edges spanning the sorted data, clamped to `[lo, hi]`.
pub fn freedman_diaconis_edges(sorted: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    let n = sorted.len();
    if n < 4 {
        return Err(Error::Input("histogram needs at least four values".into()));
    }
    let quantile = |q: f64| sorted[((n - 1) as f64 * q).round() as usize];
    let iqr = quantile(0.75) - quantile(0.25);
    let width = 2.0 * iqr / (n as f64).cbrt();
    let (a, b) = (sorted[0].max(lo), sorted[n - 1].min(hi));
    if !(width > 0.0 && b > a) {
        return Err(Error::Input("degenerate sample for binning".into()));
    }
    let bins = ((b - a) / width).ceil().max(1.0) as usize;
    Ok((0..=bins)
        .map(|i| a + (b - a) * i as f64 / bins as f64)
        .collect())
}

/// Histogram of `(x_(n-k) - mu) / sigma` at the shifted index against the
/// expansions of its CDF for `m = 0..=m_max`. Densities are not clipped.
pub fn figure1_harness(
    table: &CoefficientTable,
    spec: &EnsembleSpec,
    k: usize,
    m_max: u32,
    count: usize,
    seed: u64,
) -> Result<Figure1Report> {
    if table.max_order(spec.beta.value()) < m_max {
        return Err(Error::Table(format!(
            "coefficients for beta = {} available through order {}, {} requested",
            spec.beta.value(),
            table.max_order(spec.beta.value()),
            m_max
        )));
    }
    let batch = sample(spec, count, seed)?;
    let sc = spec.expansion_scaling()?;
    let mut scaled: Vec<f64> = batch
        .kth_largest(k)?
        .into_iter()
        .map(|x| sc.scaled(x))
        .collect();
    scaled.sort_by(|a, b| a.total_cmp(b));
    let edges = freedman_diaconis_edges(&scaled, S_WINDOW.0 + 2.0, S_WINDOW.1 - 2.0)?;
    let bins = edges.len() - 1;
    let total = scaled.len() as f64;
    let mut counts = vec![0usize; bins];
    for &x in &scaled {
        if x >= edges[0] && x <= edges[bins] {
            let width = edges[1] - edges[0];
            let i = (((x - edges[0]) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
    }
    let widths: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
    let histogram: Vec<f64> = counts
        .iter()
        .zip(&widths)
        .map(|(&c, w)| c as f64 / total / w)
        .collect();
    let noise_floor = counts
        .iter()
        .zip(&widths)
        .map(|(&c, w)| {
            let p = c as f64 / total;
            (p * (1.0 - p) / total).sqrt() / w
        })
        .fold(0.0, f64::max);

    let curve = ExpansionCurve::new(
        table,
        spec,
        &Quantity::KthLargest { k },
        m_max,
        (edges[0], edges[bins]),
    )?;
    let cdfs = edges
        .iter()
        .map(|&s| curve.partial_sums(s))
        .collect::<Result<Vec<_>>>()?;
    let densities: Vec<Vec<f64>> = (0..=m_max as usize)
        .map(|m| {
            (0..bins)
                .map(|i| (cdfs[i + 1][m] - cdfs[i][m]) / widths[i])
                .collect()
        })
        .collect();
    let distances = densities
        .iter()
        .map(|d| {
            d.iter()
                .zip(&histogram)
                .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
        })
        .collect();
    Ok(Figure1Report {
        spec: *spec,
        k,
        count,
        seed,
        edges,
        histogram,
        densities,
        distances,
        noise_floor,
    })
}

const MAGIC: &[u8; 4] = b"SEMC";
const VERSION: u32 = 1;

/// CSV export: `#` header lines echo the configuration, then one row per draw.
pub fn write_csv<W: Write>(batch: &SampleBatch, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    writeln!(out, "# softedge samples v{VERSION}").map_err(io)?;
    writeln!(
        out,
        "# family={:?} beta={} n={} p={} seed={} count={} workers={}",
        batch.spec.family,
        batch.spec.beta.value(),
        batch.spec.n,
        batch.spec.p.map_or("none".to_string(), |p| p.to_string()),
        batch.seed,
        batch.count,
        batch.workers
    )
    .map_err(io)?;
    let header: Vec<String> = (1..=batch.spec.n).map(|i| format!("x{i}")).collect();
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for s in &batch.spectra {
        let row: Vec<String> = s.iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(out, "{}", row.join(",")).map_err(io)?;
    }
    Ok(())
}

/// Binary export. Header (little endian): magic `SEMC`, version u32, family u8
/// (0 Gaussian, 1 Laguerre), beta u8, n u64, p f64 (NaN when absent), seed u64,
/// count u64, workers u64; then `count * n` f64 levels, draw by draw.
pub fn write_binary<W: Write>(batch: &SampleBatch, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    out.write_all(MAGIC).map_err(io)?;
    out.write_all(&VERSION.to_le_bytes()).map_err(io)?;
    let fam = match batch.spec.family {
        Family::Gaussian => 0u8,
        Family::Laguerre => 1u8,
    };
    out.write_all(&[fam, batch.spec.beta.value() as u8])
        .map_err(io)?;
    out.write_all(&(batch.spec.n as u64).to_le_bytes())
        .map_err(io)?;
    out.write_all(&batch.spec.p.unwrap_or(f64::NAN).to_le_bytes())
        .map_err(io)?;
    for v in [batch.seed, batch.count as u64, batch.workers as u64] {
        out.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    for s in &batch.spectra {
        for v in s {
            out.write_all(&v.to_le_bytes()).map_err(io)?;
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<SampleBatch> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a sample file".into()));
    }
    let mut u32b = [0u8; 4];
    let mut u64b = [0u8; 8];
    input.read_exact(&mut u32b).map_err(io)?;
    if u32::from_le_bytes(u32b) != VERSION {
        return Err(Error::Format("unsupported sample file version".into()));
    }
    let mut two = [0u8; 2];
    input.read_exact(&mut two).map_err(io)?;
    let mut next_u64 = |input: &mut R| -> Result<u64> {
        input.read_exact(&mut u64b).map_err(io)?;
        Ok(u64::from_le_bytes(u64b))
    };
    let n = next_u64(&mut input)? as usize;
    let p = f64::from_bits(next_u64(&mut input)?);
    let seed = next_u64(&mut input)?;
    let count = next_u64(&mut input)? as usize;
    let workers = next_u64(&mut input)? as usize;
    let beta = Beta::new(two[1] as u32)?;
    let spec = match two[0] {
        0 => EnsembleSpec::gaussian(beta, n)?,
        1 => EnsembleSpec::laguerre(beta, n, p)?,
        _ => return Err(Error::Format("unknown family".into())),
    };
    let mut spectra = Vec::with_capacity(count);
    let mut buf = [0u8; 8];
    for _ in 0..count {
        let mut s = Vec::with_capacity(n);
        for _ in 0..n {
            input.read_exact(&mut buf).map_err(io)?;
            s.push(f64::from_le_bytes(buf));
        }
        spectra.push(s);
    }
    Ok(SampleBatch {
        spec,
        seed,
        count,
        workers,
        spectra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finiten::{gram, kth_largest_finite_cdf, unitary_scaling};

    #[test]
    fn deterministic_per_seed_and_workers() {
        let spec = EnsembleSpec::gaussian(Beta::Orthogonal, 7).unwrap();
        let a = sample_with_workers(&spec, 101, 42, 3).unwrap();
        let b = sample_with_workers(&spec, 101, 42, 3).unwrap();
        assert_eq!(a, b);
        let c = sample_with_workers(&spec, 101, 43, 3).unwrap();
        assert_ne!(a.spectra, c.spectra);
        assert!(a.spectra.iter().all(|s| s.windows(2).all(|w| w[0] <= w[1])));
        assert_eq!(a.spectra.len(), 101);
    }

    #[test]
    fn binary_and_csv_roundtrip() {
        let spec = EnsembleSpec::laguerre(Beta::Symplectic, 4, 6.5).unwrap();
        let a = sample_with_workers(&spec, 9, 7, 2).unwrap();
        let mut buf = Vec::new();
        write_binary(&a, &mut buf).unwrap();
        assert_eq!(read_binary(buf.as_slice()).unwrap(), a);
        let mut csv = Vec::new();
        write_csv(&a, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 3 + 9);
        assert!(read_binary(&b"XXXX"[..]).is_err());
    }

    #[test]
    fn kolmogorov_tail() {
        assert!((kolmogorov_survival(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.628) - 0.01).abs() < 1e-3);
        let (d, p) = ks_two_sample(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        assert_eq!(d, 0.0);
        assert_eq!(p, 1.0);
    }

    fn ks_against_exact(spec: EnsembleSpec, count: usize, seed: u64) -> f64 {
        let batch = sample(&spec, count, seed).unwrap();
        let top = batch.kth_largest(0).unwrap();
        let sc = unitary_scaling(&spec).unwrap();
        let cdf = TabulatedCdf::new(sc.level(-9.0), sc.level(6.0), 160, |x| {
            kth_largest_finite_cdf(&spec, 0, x)
        })
        .unwrap();
        ks_statistic(&top, |x| cdf.eval(x))
    }

    #[test]
    fn unitary_samplers_match_exact() {
        let count = 20_000;
        let gue = EnsembleSpec::gaussian(Beta::Unitary, 20).unwrap();
        assert!(ks_against_exact(gue, count, 1) < ks_critical(count, 0.01));
        let lue = EnsembleSpec::laguerre(Beta::Unitary, 12, 24.0).unwrap();
        assert!(ks_against_exact(lue, count, 2) < ks_critical(count, 0.01));
    }

    #[test]
    fn mean_count_matches_trace() {
        let spec = EnsembleSpec::gaussian(Beta::Unitary, 12).unwrap();
        let sc = unitary_scaling(&spec).unwrap();
        let count = 20_000;
        let batch = sample(&spec, count, 5).unwrap();
        let counts: Vec<f64> = batch
            .spectra
            .iter()
            .map(|s| s.iter().filter(|&&v| v > sc.mu).count() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / count as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        let exact = gram(&spec, sc.mu, None).unwrap().expected_count();
        assert!((mean - exact).abs() < 3.0 * (var / count as f64).sqrt());
    }

    #[test]
    fn decimation_relations() {
        assert!(superposition_decimation_check(3, 0, 1).unwrap().is_empty());
        let report = superposition_decimation_check(3, 20_000, 11).unwrap();
        assert_eq!(report.len(), 4);
        for e in &report {
            assert!(e.p_value > 0.001, "{e:?}");
        }
    }

    #[test]
    fn thinning_matches_generating_function() {
        let spec = EnsembleSpec::gaussian(Beta::Unitary, 10).unwrap();
        let sc = unitary_scaling(&spec).unwrap();
        let count = 20_000;
        let batch = sample(&spec, count, 9).unwrap();
        let grid: Vec<f64> = (0..15).map(|i| sc.level(-5.0 + 0.5 * i as f64)).collect();
        for xi in [0.5, 1.0] {
            let pts = thinning_check(&batch, xi, &grid, 3, |x| Ok(gram(&spec, x, None)?.e2n(xi)))
                .unwrap();
            assert!(pts.iter().all(|p| p.z(count) < 4.5), "xi={xi}");
        }
        // Small xi: E ~ 1 - xi E N(x, inf).
        let xi = 0.05;
        for &x in &grid {
            let c = gram(&spec, x, None).unwrap();
            assert!((c.e2n(xi) - (1.0 - xi * c.expected_count())).abs() < xi * xi * 10.0);
        }
    }
}
