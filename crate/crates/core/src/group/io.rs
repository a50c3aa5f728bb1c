use serde::{Deserialize, Serialize};

use super::{FiniteGroup, GroupAlgebra, TwoCocycle};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// `{"order", "cayley", "cocycle_re"?, "cocycle_im"?}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub cayley: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle_re: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle_im: Option<Vec<Vec<f64>>>,
}

impl GroupFile {
    pub fn from_algebra(alg: &GroupAlgebra) -> Self {
        let table = alg.cocycle().table();
        let twisted = !alg.cocycle().is_trivial();
        GroupFile {
            order: alg.order(),
            cayley: alg.group().cayley().to_vec(),
            cocycle_re: twisted.then(|| table.iter().map(|r| r.iter().map(|z| z.re).collect()).collect()),
            cocycle_im: twisted.then(|| table.iter().map(|r| r.iter().map(|z| z.im).collect()).collect()),
        }
    }

    pub fn build(&self) -> Result<GroupAlgebra> {
        if self.cayley.len() != self.order {
            return Err(Error::InvalidGroup(format!("order {} but {} table rows", self.order, self.cayley.len())));
        }
        let group = FiniteGroup::from_cayley(self.cayley.clone())?;
        let n = self.order;
        let cocycle = match (&self.cocycle_re, &self.cocycle_im) {
            (None, None) => TwoCocycle::trivial(n),
            (re, im) => {
                let zero = vec![vec![0.0; n]; n];
                let re = re.as_ref().unwrap_or(&zero);
                let im = im.as_ref().unwrap_or(&zero);
                if re.len() != n || im.len() != n || re.iter().chain(im).any(|r| r.len() != n) {
                    return Err(Error::InvalidCocycle(format!("cocycle tables must be {n}x{n}")));
                }
                let table = (0..n).map(|s| (0..n).map(|t| C64::new(re[s][t], im[s][t])).collect()).collect();
                TwoCocycle::new(&group, table)?
            }
        };
        GroupAlgebra::new(group, cocycle)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum FourierValues {
    Real(Vec<f64>),
    Complex { re: Vec<f64>, im: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "lowercase")]
enum SymbolFile {
    Fourier(FourierValues),
    Schur(ComplexMatrix),
}

/// Symbol of a Fourier multiplier (one value per group element) or a Schur multiplier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolFile", into = "SymbolFile")]
pub enum MultiplierSymbol {
    Fourier(Vec<C64>),
    Schur(ComplexMatrix),
}

impl TryFrom<SymbolFile> for MultiplierSymbol {
    type Error = Error;
    fn try_from(f: SymbolFile) -> Result<Self> {
        match f {
            SymbolFile::Schur(a) => Ok(MultiplierSymbol::Schur(a)),
            SymbolFile::Fourier(FourierValues::Real(v)) => {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Invalid("non-finite symbol value".into()));
                }
                Ok(MultiplierSymbol::Fourier(v.into_iter().map(|x| C64::new(x, 0.0)).collect()))
            }
            SymbolFile::Fourier(FourierValues::Complex { re, im }) => {
                if re.len() != im.len() {
                    return Err(Error::DimensionMismatch("symbol re/im lengths differ".into()));
                }
                if re.iter().chain(&im).any(|x| !x.is_finite()) {
                    return Err(Error::Invalid("non-finite symbol value".into()));
                }
                Ok(MultiplierSymbol::Fourier(re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect()))
            }
        }
    }
}

impl From<MultiplierSymbol> for SymbolFile {
    fn from(s: MultiplierSymbol) -> Self {
        match s {
            MultiplierSymbol::Schur(a) => SymbolFile::Schur(a),
            MultiplierSymbol::Fourier(v) => SymbolFile::Fourier(FourierValues::Complex {
                re: v.iter().map(|z| z.re).collect(),
                im: v.iter().map(|z| z.im).collect(),
            }),
        }
    }
}
