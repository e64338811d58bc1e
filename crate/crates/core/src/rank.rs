//! Jacobian of the parameter map over `F_p` and its generic rank.
//!
//! The rank of the Jacobian at a random point over `F_p` never exceeds the
//! generic rank over the rationals, which equals the dimension of the
//! neurovariety. A rank equal to the ambient dimension therefore certifies
//! that the architecture is filling; a smaller rank is only a lower bound.

use serde::{Deserialize, Serialize};

use crate::algebra::{DualElement, FieldElement, HomPoly, Prime};
use crate::error::{Error, Result};
use crate::pnn::{
    apply_matrix, forward, input_layer, Architecture, Matrix, WeightAssignment, DEFAULT_AMBIENT_CAP,
};
use crate::rng::{stream, Purpose};

/// `∂(coefficients) / ∂(parameters)`.
///
/// Rows follow the channel-major coefficient flattening, columns the
/// layer-major, row-major parameter order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobianMatrix {
    rows: usize,
    cols: usize,
    // column-major: column k is contiguous
    columns: Vec<FieldElement>,
    prime: Prime,
}

impl JacobianMatrix {
    fn from_columns(rows: usize, columns: Vec<Vec<FieldElement>>, prime: Prime) -> Self {
        let cols = columns.len();
        debug_assert!(columns.iter().all(|c| c.len() == rows));
        JacobianMatrix {
            rows,
            cols,
            columns: columns.into_iter().flatten().collect(),
            prime,
        }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[FieldElement], prime: Prime) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeError(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let columns = (0..cols)
            .map(|j| (0..rows).map(|i| entries[i * cols + j]).collect())
            .collect();
        Ok(JacobianMatrix::from_columns(rows, columns, prime))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn get(&self, row: usize, col: usize) -> FieldElement {
        self.columns[col * self.rows + row]
    }

    pub fn column(&self, col: usize) -> &[FieldElement] {
        &self.columns[col * self.rows..(col + 1) * self.rows]
    }

    pub fn row(&self, row: usize) -> Vec<FieldElement> {
        (0..self.cols).map(|c| self.get(row, c)).collect()
    }
}

/// Rank over `F_p` by Gaussian elimination.
pub fn matrix_rank(m: &JacobianMatrix) -> usize {
    let vectors: Vec<Vec<u64>> = (0..m.cols)
        .map(|c| m.column(c).iter().map(|x| u64::from(x.value())).collect())
        .collect();
    rank_of_vectors(vectors, m.rows, m.prime)
}

/// Rank of the span of `vectors`, each of length `len`.
fn rank_of_vectors(mut vectors: Vec<Vec<u64>>, len: usize, prime: Prime) -> usize {
    let p = u64::from(prime.get());
    let full = vectors.len().min(len);
    let mut rank = 0;
    for pos in 0..len {
        if rank == full {
            break;
        }
        let Some(pivot) = (rank..vectors.len()).find(|&k| vectors[k][pos] != 0) else {
            continue;
        };
        vectors.swap(rank, pivot);
        let (head, tail) = vectors.split_at_mut(rank + 1);
        let pivot_row = &mut head[rank];
        let inv = FieldElement::new(pivot_row[pos], prime)
            .inv()
            .expect("pivot is nonzero")
            .value();
        for x in pivot_row[pos..].iter_mut() {
            *x = *x * u64::from(inv) % p;
        }
        for row in tail.iter_mut() {
            let f = row[pos];
            if f == 0 {
                continue;
            }
            let neg = p - f;
            for (x, &y) in row[pos..].iter_mut().zip(&pivot_row[pos..]) {
                *x = (*x + neg * y) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// Cached forward pass: layer inputs and activation derivatives.
struct PrimalTrace {
    // inputs[l] feeds W_{l+1}; inputs[0] are the coordinates
    inputs: Vec<Vec<HomPoly<FieldElement>>>,
    // slopes[l][i] = r * z_{l+1,i}^(r-1) for hidden layers
    slopes: Vec<Vec<HomPoly<FieldElement>>>,
}

fn primal_trace(arch: &Architecture, weights: &WeightAssignment<FieldElement>, prime: Prime) -> PrimalTrace {
    let r = u64::from(arch.r());
    let r_elem = FieldElement::new(r, prime);
    let mut inputs = vec![input_layer::<FieldElement>(arch.input_width(), prime)];
    let mut slopes = Vec::new();
    for w in &weights.matrices()[..arch.depth() - 1] {
        let z = apply_matrix(w, inputs.last().expect("input layer present"));
        slopes.push(z.iter().map(|p| p.pow_unchecked(r - 1).scale(r_elem)).collect());
        inputs.push(z.iter().map(|p| p.pow_unchecked(r)).collect());
    }
    PrimalTrace { inputs, slopes }
}

/// Jacobian of the parameter map at `weights`.
///
/// Column `k` is the infinitesimal part of the forward pass with parameter
/// `k` seeded as `w_k + ε`. The primal values are shared by all columns, so
/// only the tangent is propagated: through the hidden layer that owns the
/// parameter the tangent is confined to one neuron, afterwards it is dense.
pub fn jacobian_at(arch: &Architecture, weights: &WeightAssignment<FieldElement>) -> Result<JacobianMatrix> {
    weights.check_shapes(arch)?;
    let ambient = arch.ambient_dim()? as usize;
    let prime = weights.matrices()[0].get(0, 0).prime();
    let trace = primal_trace(arch, weights, prime);
    let last = arch.depth() - 1;
    let out_basis = crate::pnn::output_basis(arch)?;
    let mut columns = Vec::with_capacity(arch.param_count() as usize);

    for (layer, w) in weights.matrices().iter().enumerate() {
        for i in 0..w.rows() {
            for j in 0..w.cols() {
                let source = &trace.inputs[layer][j];
                let mut col = vec![FieldElement::zero(prime); ambient];
                if layer == last {
                    let offset = i * out_basis.len();
                    col[offset..offset + out_basis.len()].copy_from_slice(source.coeffs());
                    columns.push(col);
                    continue;
                }
                // tangent of neuron i after activation
                let dh = trace.slopes[layer][i].mul(source)?;
                let next = &weights.matrices()[layer + 1];
                let mut tangent: Vec<HomPoly<FieldElement>> =
                    (0..next.rows()).map(|k| dh.scale(next.get(k, i))).collect();
                for (m, w_m) in weights.matrices().iter().enumerate().skip(layer + 1) {
                    if m > layer + 1 {
                        tangent = apply_matrix(w_m, &tangent);
                    }
                    if m == last {
                        break;
                    }
                    tangent = tangent
                        .iter()
                        .zip(&trace.slopes[m])
                        .map(|(dz, g)| g.mul(dz))
                        .collect::<Result<_>>()?;
                }
                for (c, poly) in tangent.iter().enumerate() {
                    let offset = c * out_basis.len();
                    col[offset..offset + out_basis.len()].copy_from_slice(poly.coeffs());
                }
                columns.push(col);
            }
        }
    }
    Ok(JacobianMatrix::from_columns(ambient, columns, prime))
}

/// Jacobian by one full dual-number forward pass per parameter.
///
/// Slower than [`jacobian_at`] but follows the definition literally; kept as
/// a cross-check.
pub fn jacobian_at_dual(arch: &Architecture, weights: &WeightAssignment<FieldElement>) -> Result<JacobianMatrix> {
    weights.check_shapes(arch)?;
    let ambient = arch.ambient_dim()? as usize;
    let prime = weights.matrices()[0].get(0, 0).prime();
    let params = weights.flatten();
    let mut columns = Vec::with_capacity(params.len());
    for k in 0..params.len() {
        let seeded: Vec<DualElement> = params
            .iter()
            .enumerate()
            .map(|(q, &w)| {
                if q == k {
                    DualElement::variable(w)
                } else {
                    DualElement::constant(w)
                }
            })
            .collect();
        let dual_weights = WeightAssignment::from_flat(arch, &seeded)?;
        let out = forward(arch, &dual_weights)?;
        columns.push(out.flatten().iter().map(|d| d.infinitesimal).collect());
    }
    Ok(JacobianMatrix::from_columns(ambient, columns, prime))
}

/// Modulus, number of random points, and seed for rank estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankConfig {
    pub prime: Prime,
    pub trials: u32,
    pub seed: u64,
    pub ambient_cap: u64,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig {
            prime: Prime::mersenne31(),
            trials: 3,
            seed: 0,
            ambient_cap: DEFAULT_AMBIENT_CAP,
        }
    }
}

impl RankConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        RankConfig { seed, ..self }
    }
}

/// Maximum Jacobian rank over a few random points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEstimate {
    pub arch: String,
    pub r: u32,
    pub prime: Prime,
    pub trials: u32,
    pub seed: u64,
    pub ambient_dim: u64,
    pub rank_lower: u64,
    pub certified_filling: bool,
}

/// Estimates the generic Jacobian rank of `arch`.
///
/// Trial `t` draws its weights from a stream determined by `(seed, t)`.
/// Trials stop early once the rank reaches `min(ambient, param_bound)`,
/// which no later trial could exceed.
pub fn generic_rank(arch: &Architecture, config: &RankConfig) -> Result<RankEstimate> {
    if config.trials == 0 {
        return Err(Error::InvalidConfig("at least one trial is required".into()));
    }
    if u64::from(config.prime.get()) <= u64::from(arch.r()) {
        return Err(Error::InvalidConfig(format!(
            "prime {} must exceed the activation exponent {}",
            config.prime,
            arch.r()
        )));
    }
    let ambient = arch.check_ambient_cap(config.ambient_cap)?;
    let degree = arch.output_degree()?;
    if config.prime.is_small_for_degree(degree) {
        log::warn!(
            "prime {} does not exceed the output degree {degree} of {}; ranks may undershoot",
            config.prime,
            arch
        );
    }
    let ceiling = ambient.min(arch.param_bound());
    let mut best = 0;
    for t in 0..config.trials {
        let mut rng = stream(config.seed, Purpose::RankTrial, u64::from(t));
        let weights = WeightAssignment::random(arch, config.prime, &mut rng);
        let rank = matrix_rank(&jacobian_at(arch, &weights)?) as u64;
        best = best.max(rank);
        if best >= ceiling {
            break;
        }
    }
    assert!(
        best <= ceiling,
        "rank {best} of {arch} exceeds min(ambient, param_bound) = {ceiling}"
    );
    Ok(RankEstimate {
        arch: arch.label(),
        r: arch.r(),
        prime: config.prime,
        trials: config.trials,
        seed: config.seed,
        ambient_dim: ambient,
        rank_lower: best,
        certified_filling: best == ambient,
    })
}

/// Weights from integer values in layer-major, row-major order.
pub fn weights_from_values(arch: &Architecture, values: &[u64], prime: Prime) -> Result<WeightAssignment<FieldElement>> {
    let params: Vec<FieldElement> = values.iter().map(|&v| FieldElement::new(v, prime)).collect();
    WeightAssignment::from_flat(arch, &params)
}

/// The all-zero point, where every Jacobian column vanishes for `r > 1`.
pub fn zero_weights(arch: &Architecture, prime: Prime) -> WeightAssignment<FieldElement> {
    WeightAssignment::new(
        arch.layer_shapes()
            .map(|(r, c)| Matrix::from_rows(r, c, vec![FieldElement::zero(prime); r * c]).expect("shape"))
            .collect(),
    )
}
