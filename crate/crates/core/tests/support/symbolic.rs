//! Exact symbolic Jacobians over the rationals.

use std::collections::BTreeMap;

use neurovariety::algebra::{MonomialBasis, Prime};
use neurovariety::pnn::Architecture;
use neurovariety::rank::JacobianMatrix;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};

/// Sparse polynomial: exponent vector (inputs first, then weights) to
/// coefficient.
#[derive(Clone, Debug)]
struct Sparse {
    vars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Sparse {
    fn zero(vars: usize) -> Self {
        Sparse { vars, terms: BTreeMap::new() }
    }

    fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        let mut p = Sparse::zero(vars);
        p.terms.insert(e, BigRational::one());
        p
    }

    fn one(vars: usize) -> Self {
        let mut p = Sparse::zero(vars);
        p.terms.insert(vec![0; vars], BigRational::one());
        p
    }

    fn add(&self, other: &Sparse) -> Sparse {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let entry = out.terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                out.terms.remove(e);
            }
        }
        out
    }

    fn mul(&self, other: &Sparse) -> Sparse {
        let mut out = Sparse::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let entry = out.terms.entry(e).or_insert_with(BigRational::zero);
                *entry += ca * cb;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    fn pow(&self, k: u32) -> Sparse {
        (0..k).fold(Sparse::one(self.vars), |acc, _| acc.mul(self))
    }

    fn derivative(&self, i: usize) -> Sparse {
        let mut out = Sparse::zero(self.vars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut d = e.clone();
                d[i] -= 1;
                out.terms.insert(d, c * BigRational::from_integer(BigInt::from(e[i])));
            }
        }
        out
    }

    /// Substitutes `values` for variables `from..` and groups the result by
    /// the remaining exponents.
    fn evaluate_tail(&self, from: usize, values: &[BigRational]) -> BTreeMap<Vec<u32>, BigRational> {
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (k, &x) in e[from..].iter().enumerate() {
                for _ in 0..x {
                    v *= &values[k];
                }
            }
            *out.entry(e[..from].to_vec()).or_insert_with(BigRational::zero) += v;
        }
        out
    }
}

fn reduce(q: &BigRational, p: u64) -> u64 {
    let p_big = BigInt::from(p);
    let num = ((q.numer() % &p_big) + &p_big) % &p_big;
    let den = ((q.denom() % &p_big) + &p_big) % &p_big;
    let den_inv = den.modpow(&(&p_big - 2), &p_big);
    (num * den_inv % &p_big).to_u64().unwrap()
}

/// Symbolic output polynomials, one per output channel.
fn symbolic_outputs(arch: &Architecture) -> Vec<Sparse> {
    let d0 = arch.input_width();
    let vars = d0 + arch.param_count() as usize;
    let mut layer: Vec<Sparse> = (0..d0).map(|i| Sparse::var(vars, i)).collect();
    let mut next_param = d0;
    let depth = arch.depth();
    for (l, (rows, cols)) in arch.layer_shapes().enumerate() {
        let mut out = Vec::with_capacity(rows);
        for _ in 0..rows {
            let mut acc = Sparse::zero(vars);
            for prev in layer.iter().take(cols) {
                acc = acc.add(&Sparse::var(vars, next_param).mul(prev));
                next_param += 1;
            }
            out.push(acc);
        }
        layer = if l + 1 < depth {
            out.iter().map(|p| p.pow(arch.r())).collect()
        } else {
            out
        };
    }
    layer
}

pub fn oracle_jacobian(arch: &Architecture, values: &[u64], prime: Prime) -> Vec<Vec<u64>> {
    let d0 = arch.input_width();
    let basis = MonomialBasis::new(d0, arch.output_degree().unwrap()).unwrap();
    let point: Vec<BigRational> = values.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect();
    let outputs = symbolic_outputs(arch);
    let mut columns = Vec::new();
    for k in 0..values.len() {
        let mut col = vec![0u64; outputs.len() * basis.len()];
        for (c, out) in outputs.iter().enumerate() {
            for (exps, coeff) in out.derivative(d0 + k).evaluate_tail(d0, &point) {
                let exps: Vec<u64> = exps.iter().map(|&e| u64::from(e)).collect();
                col[c * basis.len() + basis.index_of(&exps).unwrap()] = reduce(&coeff, u64::from(prime));
            }
        }
        columns.push(col);
    }
    columns
}

pub fn columns_of(j: &JacobianMatrix) -> Vec<Vec<u64>> {
    (0..j.cols()).map(|c| j.column(c).iter().map(|x| u64::from(x.value())).collect()).collect()
}

/// Every width sequence with at most `max_params` weights.
pub fn small_architectures(max_params: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() >= 2 {
            out.push(prefix.clone());
        }
        let last = *prefix.last().unwrap();
        for w in 1.. {
            if used + last * w > max {
                break;
            }
            prefix.push(w);
            extend(prefix, used + last * w, max, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for d0 in 1..=max_params {
        extend(&mut vec![d0], 0, max_params, &mut out);
    }
    out
}
