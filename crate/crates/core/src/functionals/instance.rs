use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CMat, ComplexMatrix, ContractionTuple, Hermitian, MatrixJson, MatrixList, PositiveDefinite};
use crate::scalar::Real;

/// Per-block arguments of a k-variable instance: positive-definite `A_i` for
/// the concave trace functional, Hermitian `B_i` for the exponential bound.
#[derive(Clone, Debug, PartialEq)]
pub enum Arguments<T: Real> {
    Positive(Vec<PositiveDefinite<T>>),
    Hermitian(Vec<Hermitian<T>>),
}

impl<T: Real> Arguments<T> {
    pub fn len(&self) -> usize {
        match self {
            Arguments::Positive(v) => v.len(),
            Arguments::Hermitian(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn dims(&self) -> Vec<usize> {
        match self {
            Arguments::Positive(v) => v.iter().map(|a| a.dim()).collect(),
            Arguments::Hermitian(v) => v.iter().map(|b| b.dim()).collect(),
        }
    }
}

/// `(L, (H_1..H_k), (A_1..A_k))` with `L` `n x n`, each `H_i` `m x n` and
/// each argument `m x m`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiInstance<T: Real> {
    l: Hermitian<T>,
    h: ContractionTuple<T>,
    args: Arguments<T>,
}

impl<T: Real> MultiInstance<T> {
    pub fn new(l: Hermitian<T>, h: ContractionTuple<T>, args: Arguments<T>) -> Result<Self> {
        if l.dim() != h.n() {
            return Err(Error::Dimension(format!(
                "L is {0}x{0} but the blocks have {1} columns",
                l.dim(),
                h.n()
            )));
        }
        if args.len() != h.k() {
            return Err(Error::Dimension(format!(
                "{} arguments for {} blocks",
                args.len(),
                h.k()
            )));
        }
        if let Some(d) = args.dims().into_iter().find(|&d| d != h.m()) {
            return Err(Error::Dimension(format!(
                "argument is {d}x{d} but the blocks have {} rows",
                h.m()
            )));
        }
        Ok(Self { l, h, args })
    }

    pub fn positive(l: Hermitian<T>, h: ContractionTuple<T>, a: Vec<PositiveDefinite<T>>) -> Result<Self> {
        Self::new(l, h, Arguments::Positive(a))
    }

    pub fn hermitian(l: Hermitian<T>, h: ContractionTuple<T>, b: Vec<Hermitian<T>>) -> Result<Self> {
        Self::new(l, h, Arguments::Hermitian(b))
    }

    pub fn l(&self) -> &Hermitian<T> {
        &self.l
    }

    pub fn h(&self) -> &ContractionTuple<T> {
        &self.h
    }

    pub fn args(&self) -> &Arguments<T> {
        &self.args
    }

    pub fn k(&self) -> usize {
        self.h.k()
    }

    pub fn a_list(&self) -> Result<&[PositiveDefinite<T>]> {
        match &self.args {
            Arguments::Positive(v) => Ok(v),
            Arguments::Hermitian(_) => Err(Error::InvalidArgument("instance carries B matrices, not A".into())),
        }
    }

    pub fn b_list(&self) -> Result<&[Hermitian<T>]> {
        match &self.args {
            Arguments::Hermitian(v) => Ok(v),
            Arguments::Positive(_) => Err(Error::InvalidArgument("instance carries A matrices, not B".into())),
        }
    }

    /// Same `L` and blocks with new arguments.
    pub fn with_args(&self, args: Arguments<T>) -> Result<Self> {
        Self::new(self.l.clone(), self.h.clone(), args)
    }
}

/// Single-variable embedding of a k-variable instance: `A_hat` is block
/// diagonal in the `A_i`, `L_hat` carries `L` in its leading block, and
/// `H_hat` stacks the `H_i` in its first block column.
#[derive(Clone, Debug)]
pub struct BlockLift<T: Real> {
    pub a_hat: PositiveDefinite<T>,
    pub l_hat: Hermitian<T>,
    pub h_hat: ComplexMatrix<T>,
    k: usize,
    n: usize,
}

impl<T: Real> BlockLift<T> {
    pub fn from_instance(inst: &MultiInstance<T>) -> Result<Self> {
        let a = inst.a_list()?;
        let (k, m, n) = (inst.k(), inst.h.m(), inst.h.n());

        let mut a_hat = CMat::<T>::zeros(k * m, k * m);
        for (i, ai) in a.iter().enumerate() {
            a_hat.view_mut((i * m, i * m), (m, m)).copy_from(ai.as_matrix());
        }
        let mut l_hat = CMat::<T>::zeros(k * n, k * n);
        l_hat.view_mut((0, 0), (n, n)).copy_from(inst.l.as_matrix());
        let mut h_hat = CMat::<T>::zeros(k * m, k * n);
        for (i, hi) in inst.h.blocks().iter().enumerate() {
            h_hat.view_mut((i * m, 0), (m, n)).copy_from(hi.as_matrix());
        }

        Ok(Self {
            a_hat: PositiveDefinite::new(Hermitian::new(ComplexMatrix::new(a_hat)?)?)?,
            l_hat: Hermitian::new(ComplexMatrix::new(l_hat)?)?,
            h_hat: ComplexMatrix::new(h_hat)?,
            k,
            n,
        })
    }

    /// `Tr exp(L_hat + H_hat* log(A_hat) H_hat)`.
    pub fn trace_exp(&self) -> Result<T> {
        super::trace_exp_functional(&self.a_hat, &self.l_hat, &self.h_hat)
    }

    /// `(k - 1) n`: the contribution of the zero blocks, each exponentiating
    /// to the identity.
    pub fn offset(&self) -> T {
        T::lit(((self.k - 1) * self.n) as f64)
    }
}

/// On-disk instance: any subset of the named matrices used by the functionals.
/// `A`, `B` and `H` may each be a single matrix or a list.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<MatrixJson>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<MatrixList>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<MatrixList>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<MatrixList>,
    #[serde(rename = "X", default, skip_serializing_if = "Option::is_none")]
    pub x: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum_is_identity: Option<bool>,
}

fn missing(field: &str) -> Error {
    Error::Parse(format!("instance is missing field \"{field}\""))
}

impl InstanceFile {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance JSON serializes")
    }

    pub fn from_multi<T: Real>(inst: &MultiInstance<T>) -> Self {
        let mut file = InstanceFile {
            l: Some(inst.l().into()),
            h: Some(MatrixList::Many(
                inst.h().blocks().iter().map(MatrixJson::from).collect(),
            )),
            sum_is_identity: Some(inst.h().sum_is_identity()),
            ..Default::default()
        };
        match inst.args() {
            Arguments::Positive(v) => file.a = Some(MatrixList::Many(v.iter().map(MatrixJson::from).collect())),
            Arguments::Hermitian(v) => file.b = Some(MatrixList::Many(v.iter().map(MatrixJson::from).collect())),
        }
        file
    }

    pub fn matrix_a<T: Real>(&self) -> Result<PositiveDefinite<T>> {
        self.a.as_ref().ok_or_else(|| missing("A"))?.single()?.to_pd()
    }

    pub fn matrix_b<T: Real>(&self) -> Result<PositiveDefinite<T>> {
        self.b.as_ref().ok_or_else(|| missing("B"))?.single()?.to_pd()
    }

    pub fn matrix_x<T: Real>(&self) -> Result<PositiveDefinite<T>> {
        self.x.as_ref().ok_or_else(|| missing("X"))?.to_pd()
    }

    pub fn matrix_l<T: Real>(&self) -> Result<Hermitian<T>> {
        self.l.as_ref().ok_or_else(|| missing("L"))?.to_hermitian()
    }

    /// The single contraction `H`; identity of size `dim` when absent.
    pub fn matrix_h_or_identity<T: Real>(&self, dim: usize) -> Result<ComplexMatrix<T>> {
        match &self.h {
            Some(h) => h.single()?.to_complex(),
            None => Ok(ComplexMatrix::identity(dim)),
        }
    }

    pub fn power(&self) -> Result<f64> {
        self.p.ok_or_else(|| missing("p"))
    }

    pub fn contraction_tuple<T: Real>(&self) -> Result<ContractionTuple<T>> {
        let blocks = self
            .h
            .as_ref()
            .ok_or_else(|| missing("H"))?
            .as_slice()
            .iter()
            .map(MatrixJson::to_complex)
            .collect::<Result<Vec<_>>>()?;
        ContractionTuple::new(blocks, self.sum_is_identity.unwrap_or(false))
    }

    /// Multi-variable instance with positive-definite `A` list.
    pub fn multi_positive<T: Real>(&self) -> Result<MultiInstance<T>> {
        let a = self
            .a
            .as_ref()
            .ok_or_else(|| missing("A"))?
            .as_slice()
            .iter()
            .map(MatrixJson::to_pd)
            .collect::<Result<Vec<_>>>()?;
        MultiInstance::positive(self.matrix_l()?, self.contraction_tuple()?, a)
    }

    /// Multi-variable instance with Hermitian `B` list.
    pub fn multi_hermitian<T: Real>(&self) -> Result<MultiInstance<T>> {
        let b = self
            .b
            .as_ref()
            .ok_or_else(|| missing("B"))?
            .as_slice()
            .iter()
            .map(MatrixJson::to_hermitian)
            .collect::<Result<Vec<_>>>()?;
        MultiInstance::hermitian(self.matrix_l()?, self.contraction_tuple()?, b)
    }
}

#[cfg(test)]
pub(crate) fn block_is_zero<T: Real>(m: &CMat<T>) -> bool {
    m.iter().all(|z| z.re == T::zero() && z.im == T::zero())
}
