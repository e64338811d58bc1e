//! Architectures of polynomial neural networks with power activation, the
//! parameter map into coefficient vectors, and the dimension counts that
//! depend only on the widths.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::poly::{monomial_count, poly_linear_combination};
use crate::algebra::{FieldElement, HomPoly, MonomialBasis, Prime, Scalar};
use crate::error::{Error, Result};

/// Architectures with a larger ambient space are rejected before any
/// polynomial is allocated.
pub const DEFAULT_AMBIENT_CAP: u64 = 1_000_000;

/// A width sequence `(d0, ..., dL)` together with the activation exponent `r`.
///
/// The network computes `x -> W_L σ W_{L-1} σ ... σ W_1 x` with
/// `σ(z)_j = z_j^r`, so every output coordinate is a homogeneous polynomial
/// of degree `r^(L-1)` in `d0` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Architecture {
    widths: Vec<usize>,
    r: u32,
}

impl Architecture {
    pub fn new(widths: Vec<usize>, r: u32) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::InvalidArchitecture(format!(
                "need at least an input and an output width, got {widths:?}"
            )));
        }
        if widths.contains(&0) {
            return Err(Error::InvalidArchitecture(format!(
                "widths must be positive, got {}",
                format_widths(&widths)
            )));
        }
        if r == 0 {
            return Err(Error::ZeroExponent);
        }
        Ok(Architecture { widths, r })
    }

    /// Parses the hyphen-separated form, e.g. `2-3-4-5-4-6-4-1`.
    pub fn parse(s: &str, r: u32) -> Result<Self> {
        let widths = s
            .trim()
            .split('-')
            .map(|part| {
                part.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidArchitecture(format!("cannot parse width `{part}` in `{s}`"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Architecture::new(widths, r)
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Number of weight matrices `L`.
    pub fn depth(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn input_width(&self) -> usize {
        self.widths[0]
    }

    pub fn output_width(&self) -> usize {
        self.widths[self.depth()]
    }

    pub fn hidden(&self) -> &[usize] {
        &self.widths[1..self.depth()]
    }

    /// Hyphen-separated widths; `r` is never part of the label.
    pub fn label(&self) -> String {
        format_widths(&self.widths)
    }

    /// `r^(L-1)`, the degree of every output polynomial.
    pub fn output_degree(&self) -> Result<u64> {
        u64::from(self.r)
            .checked_pow((self.depth() - 1) as u32)
            .ok_or_else(|| Error::DegreeOverflow(self.label()))
    }

    /// `dL * binom(d0 + D - 1, D)` with `D = r^(L-1)`.
    pub fn ambient_dim(&self) -> Result<u64> {
        let degree = self.output_degree()?;
        monomial_count(self.input_width(), degree)
            .and_then(|m| m.checked_mul(self.output_width() as u64))
            .ok_or_else(|| Error::DegreeOverflow(self.label()))
    }

    /// Fails with [`Error::AmbientTooLarge`] when the ambient space exceeds `cap`.
    pub fn check_ambient_cap(&self, cap: u64) -> Result<u64> {
        let dim = self.ambient_dim()?;
        if dim > cap {
            return Err(Error::AmbientTooLarge {
                arch: self.label(),
                dim,
                cap,
            });
        }
        Ok(dim)
    }

    /// `Σ d_i d_{i-1}`, the number of weights.
    pub fn param_count(&self) -> u64 {
        self.widths
            .windows(2)
            .map(|w| (w[0] * w[1]) as u64)
            .sum()
    }

    /// Parameter count minus the hidden widths, one per neuron rescaling.
    pub fn param_bound(&self) -> u64 {
        self.param_count() - self.hidden().iter().map(|&w| w as u64).sum::<u64>()
    }

    /// `min(ambient, param_bound)`.
    pub fn expected_dim(&self) -> Result<u64> {
        Ok(self.ambient_dim()?.min(self.param_bound()))
    }

    pub fn is_unimodal(&self) -> bool {
        is_unimodal(&self.widths)
    }

    /// Copy with width `index` replaced.
    pub fn with_width(&self, index: usize, width: usize) -> Result<Self> {
        let mut widths = self.widths.clone();
        widths[index] = width;
        Architecture::new(widths, self.r)
    }

    /// The contiguous sub-network `(d_from, ..., d_to)`.
    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        if from >= to || to > self.depth() {
            return Err(Error::InvalidArchitecture(format!(
                "slice {from}..={to} of {}",
                self.label()
            )));
        }
        Architecture::new(self.widths[from..=to].to_vec(), self.r)
    }

    /// Layer shapes `(rows, cols) = (d_i, d_{i-1})` for `i = 1..=L`.
    pub fn layer_shapes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.widths.windows(2).map(|w| (w[1], w[0]))
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn format_widths(widths: &[usize]) -> String {
    widths
        .iter()
        .map(|w| w.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

/// Weakly increasing up to some peak, weakly decreasing afterwards.
pub fn is_unimodal(widths: &[usize]) -> bool {
    let mut i = 0;
    while i + 1 < widths.len() && widths[i] <= widths[i + 1] {
        i += 1;
    }
    widths[i..].windows(2).all(|w| w[0] >= w[1])
}

/// A dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_rows(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeError(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn entries_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }
}

/// The weights `W_1, ..., W_L`, with `W_i` of shape `d_i x d_{i-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightAssignment<S> {
    matrices: Vec<Matrix<S>>,
}

impl<S: Scalar> WeightAssignment<S> {
    pub fn new(matrices: Vec<Matrix<S>>) -> Self {
        WeightAssignment { matrices }
    }

    /// Builds weights from a flat parameter vector in layer-major,
    /// row-major order.
    pub fn from_flat(arch: &Architecture, params: &[S]) -> Result<Self> {
        if params.len() as u64 != arch.param_count() {
            return Err(Error::ShapeError(format!(
                "{} parameters for {} which has {}",
                params.len(),
                arch.label(),
                arch.param_count()
            )));
        }
        let mut offset = 0;
        let matrices = arch
            .layer_shapes()
            .map(|(rows, cols)| {
                let m = Matrix::from_rows(rows, cols, params[offset..offset + rows * cols].to_vec());
                offset += rows * cols;
                m
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightAssignment { matrices })
    }

    pub fn matrices(&self) -> &[Matrix<S>] {
        &self.matrices
    }

    pub fn flatten(&self) -> Vec<S> {
        self.matrices
            .iter()
            .flat_map(|m| m.entries().iter().copied())
            .collect()
    }

    pub fn check_shapes(&self, arch: &Architecture) -> Result<()> {
        if self.matrices.len() != arch.depth() {
            return Err(Error::ShapeError(format!(
                "{} weight matrices for depth {}",
                self.matrices.len(),
                arch.depth()
            )));
        }
        for (i, (m, (rows, cols))) in self.matrices.iter().zip(arch.layer_shapes()).enumerate() {
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::ShapeError(format!(
                    "W_{} is {}x{}, expected {rows}x{cols}",
                    i + 1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(())
    }
}

impl WeightAssignment<FieldElement> {
    /// Uniform weights in `[0, p)`; an all-zero matrix is resampled.
    pub fn random<R: Rng + ?Sized>(arch: &Architecture, prime: Prime, rng: &mut R) -> Self {
        let matrices = arch
            .layer_shapes()
            .map(|(rows, cols)| loop {
                let data: Vec<_> = (0..rows * cols)
                    .map(|_| FieldElement::new(u64::from(rng.gen_range(0..prime.get())), prime))
                    .collect();
                if data.iter().any(|x| !x.is_zero()) {
                    break Matrix { rows, cols, data };
                }
            })
            .collect();
        WeightAssignment { matrices }
    }
}

/// One homogeneous polynomial per output channel.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector<S> {
    channels: Vec<HomPoly<S>>,
}

impl<S: Scalar> CoefficientVector<S> {
    pub fn channels(&self) -> &[HomPoly<S>] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.iter().map(|c| c.coeffs().len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Channel-major: all coefficients of channel 0, then channel 1, ...
    pub fn flatten(&self) -> Vec<S> {
        self.channels
            .iter()
            .flat_map(|c| c.coeffs().iter().copied())
            .collect()
    }
}

/// The d0 coordinate functions `x_1, ..., x_{d0}`.
pub(crate) fn input_layer<S: Scalar>(d0: usize, prime: Prime) -> Vec<HomPoly<S>> {
    (0..d0)
        .map(|i| HomPoly::variable(d0, i, prime).expect("index below d0"))
        .collect()
}

/// `W h` for a list of polynomials `h` sharing one basis.
pub(crate) fn apply_matrix<S: Scalar>(w: &Matrix<S>, h: &[HomPoly<S>]) -> Vec<HomPoly<S>> {
    (0..w.rows())
        .map(|i| poly_linear_combination(h, w.row(i)).expect("layer outputs share a basis"))
        .collect()
}

/// The parameter map: evaluates the network symbolically in `x`.
///
/// Starts from the coordinate polynomials, then alternates matrix
/// application and the entrywise power; no activation follows `W_L`.
pub fn forward<S: Scalar>(
    arch: &Architecture,
    weights: &WeightAssignment<S>,
) -> Result<CoefficientVector<S>> {
    weights.check_shapes(arch)?;
    arch.output_degree()?;
    let prime = weights.matrices[0].get(0, 0).prime();
    let mut h = input_layer::<S>(arch.input_width(), prime);
    let last = arch.depth() - 1;
    for (layer, w) in weights.matrices().iter().enumerate() {
        let z = apply_matrix(w, &h);
        if layer == last {
            return Ok(CoefficientVector { channels: z });
        }
        h = z
            .iter()
            .map(|p| p.pow(u64::from(arch.r())))
            .collect::<Result<Vec<_>>>()?;
    }
    unreachable!("depth is at least one")
}

/// Basis of the output polynomials of `arch`.
pub fn output_basis(arch: &Architecture) -> Result<MonomialBasis> {
    MonomialBasis::new(arch.input_width(), arch.output_degree()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DualElement;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn arch(s: &str) -> Architecture {
        Architecture::parse(s, 2).unwrap()
    }

    fn fe(v: u64) -> FieldElement {
        FieldElement::new(v, Prime::mersenne31())
    }

    #[test]
    fn ambient_examples() {
        assert_eq!(arch("2-3-4-5-4-6-4-1").ambient_dim().unwrap(), 65);
        assert_eq!(arch("4-6-4-1").ambient_dim().unwrap(), 35);
        assert_eq!(arch("2-2-1").ambient_dim().unwrap(), 3);
        assert_eq!(arch("2-3-4-4-10-17-11-12-4-2").ambient_dim().unwrap(), 514);
    }

    #[test]
    fn degree_overflow() {
        let deep = Architecture::new(vec![2; 70], 2).unwrap();
        assert!(matches!(deep.ambient_dim(), Err(Error::DegreeOverflow(_))));
        let wide = Architecture::new(vec![10, 10, 10, 10, 10], 3).unwrap();
        assert!(matches!(
            wide.check_ambient_cap(DEFAULT_AMBIENT_CAP),
            Err(Error::AmbientTooLarge { .. })
        ));
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(arch("2-2-1").param_bound(), 4);
        assert_eq!(arch("2-3-4-5-4-6-4-1").param_count(), 110);
        assert_eq!(arch("2-3-4-5-4-6-4-1").param_bound(), 84);
        for (m, n) in [(1, 1), (4, 5), (6, 3)] {
            let a = Architecture::new(vec![m, n], 3).unwrap();
            assert_eq!(a.param_count(), (m * n) as u64);
            assert_eq!(a.param_bound(), (m * n) as u64);
        }
    }

    #[test]
    fn expected_dimension() {
        assert_eq!(arch("2-2-1").expected_dim().unwrap(), 3);
        assert_eq!(arch("2-3-4-5-4-6-4-1").expected_dim().unwrap(), 65);
        assert_eq!(arch("2-2-4-5-4-6-4-1").param_bound(), 79);
        assert_eq!(arch("2-2-4-5-4-6-4-1").expected_dim().unwrap(), 65);
    }

    #[test]
    fn unimodality_examples() {
        assert!(!arch("2-3-4-5-4-6-4-1").is_unimodal());
        assert!(arch("2-3-3-4-4-2-1").is_unimodal());
        assert!(is_unimodal(&[5]));
        assert!(arch("1-1-1").is_unimodal());
        assert!(!arch("3-1-4").is_unimodal());
    }

    #[test]
    fn unimodality_matches_split_point_search() {
        fn brute(w: &[usize]) -> bool {
            (0..w.len()).any(|i| {
                w[..=i].windows(2).all(|p| p[0] <= p[1]) && w[i..].windows(2).all(|p| p[0] >= p[1])
            })
        }
        for len in 1..=8u32 {
            for code in 0..4usize.pow(len) {
                let w: Vec<usize> = (0..len).map(|k| 1 + code / 4usize.pow(k) % 4).collect();
                assert_eq!(is_unimodal(&w), brute(&w), "{w:?}");
            }
        }
    }

    #[test]
    fn parse_and_format() {
        let a = arch("2-3-4-5-4-6-4-1");
        assert_eq!(a.label(), "2-3-4-5-4-6-4-1");
        assert_eq!(a.depth(), 7);
        assert_eq!(a.hidden(), &[3, 4, 5, 4, 6, 4]);
        assert!(Architecture::parse("2-0-1", 2).is_err());
        assert!(Architecture::parse("2", 2).is_err());
        assert!(Architecture::parse("2-x-1", 2).is_err());
        assert!(Architecture::parse("2-2-1", 0).is_err());
    }

    #[test]
    fn forward_example() {
        let a = arch("2-2-1");
        let w = WeightAssignment::from_flat(&a, &[fe(1), fe(1), fe(1), fe(2), fe(1), fe(1)]).unwrap();
        let out = forward(&a, &w).unwrap();
        // (x1+x2)^2 + (x1+2x2)^2
        assert_eq!(out.channels()[0].values(), vec![2, 6, 5]);
    }

    #[test]
    fn forward_linear_case_is_identity() {
        let a = Architecture::new(vec![3, 2], 5).unwrap();
        let params: Vec<_> = (1..=6).map(fe).collect();
        let w = WeightAssignment::from_flat(&a, &params).unwrap();
        assert_eq!(forward(&a, &w).unwrap().flatten(), params);
    }

    #[test]
    fn forward_shape_errors() {
        let a = arch("2-2-1");
        let w = WeightAssignment::from_flat(&arch("2-1-1"), &[fe(1), fe(1), fe(1)]).unwrap();
        assert!(matches!(forward(&a, &w), Err(Error::ShapeError(_))));
        assert!(WeightAssignment::from_flat(&a, &[fe(1)]).is_err());
    }

    #[test]
    fn forward_over_dual_numbers_agrees_with_real_part() {
        let a = arch("2-3-2");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = WeightAssignment::random(&a, Prime::mersenne31(), &mut rng);
        let dual = WeightAssignment::new(w.matrices().iter().map(|m| m.map(DualElement::constant)).collect());
        let real: Vec<_> = forward(&a, &dual).unwrap().flatten().iter().map(|d| d.real).collect();
        assert_eq!(real, forward(&a, &w).unwrap().flatten());
    }

    fn small_arch() -> impl Strategy<Value = Architecture> {
        (1usize..=4, proptest::collection::vec(1usize..=3, 2..=5), 1u32..=3).prop_map(|(l, ws, r)| {
            let mut widths = ws;
            widths.truncate(l + 1);
            if widths.len() < 2 {
                widths.push(1);
            }
            widths[0] = widths[0].min(3);
            Architecture::new(widths, r).unwrap()
        })
    }

    proptest! {
        #[test]
        fn homogeneity_and_length(a in small_arch(), seed in any::<u64>(), c in 2u64..1000) {
            let p = Prime::mersenne31();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = WeightAssignment::random(&a, p, &mut rng);
            let out = forward(&a, &w).unwrap();
            let degree = a.output_degree().unwrap();
            prop_assert!(out.channels().iter().all(|ch| ch.degree() == degree));
            prop_assert_eq!(out.len() as u64, a.ambient_dim().unwrap());

            // scaling W1 by c scales every output by c^(r^(L-1))
            let mut scaled = w.matrices().to_vec();
            scaled[0] = scaled[0].map(|x| x * fe(c));
            let out_scaled = forward(&a, &WeightAssignment::new(scaled)).unwrap().flatten();
            let factor = fe(c).pow(degree);
            let expect: Vec<_> = out.flatten().iter().map(|&x| x * factor).collect();
            prop_assert_eq!(out_scaled, expect);

            // the last layer enters linearly
            let mut last = w.matrices().to_vec();
            let l = last.len() - 1;
            last[l] = last[l].map(|x| x * fe(c));
            let out_last = forward(&a, &WeightAssignment::new(last)).unwrap().flatten();
            let expect: Vec<_> = out.flatten().iter().map(|&x| x * fe(c)).collect();
            prop_assert_eq!(out_last, expect);
        }
    }
}
