//! JSON interchange for algebras, products and linear maps.
//!
//! Basis indices are 0-based positions in the algebra's basis order.
//! Rationals are always strings (`"p/q"` or `"p"`); omitted entries are zero.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half_deriv::LinearMap;
use crate::lie::{AlgebraKind, BasisLabel, LieAlgebra};
use crate::linalg::ExactMatrix;
use crate::product::{check_commutative, BilinearProduct};
use crate::rational::{self, Rational};

/// One nonzero basis pair with its sparse value `{k: "p/q"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEntry {
    pub i: usize,
    pub j: usize,
    pub coeffs: BTreeMap<usize, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<PairEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductJson {
    pub dim: usize,
    #[serde(default)]
    pub products: Vec<PairEntry>,
}

/// `columns[j]` is the image of the `j`-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearMapJson {
    pub dim: usize,
    pub columns: Vec<Vec<String>>,
}

fn sparse(v: &[Rational]) -> BTreeMap<usize, String> {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k, rational::format(c))).collect()
}

fn check_index(index: usize, dim: usize) -> Result<()> {
    if index >= dim {
        return Err(Error::Parse(format!("basis index {index} out of range for dimension {dim}")));
    }
    Ok(())
}

/// Writes the sparse value of one entry into the dense tensor at `(i, j)`.
fn fill(d: &mut [Rational], dim: usize, i: usize, j: usize, coeffs: &BTreeMap<usize, String>) -> Result<()> {
    for (&k, c) in coeffs {
        check_index(k, dim)?;
        d[(i * dim + j) * dim + k] = rational::parse(c)?;
    }
    Ok(())
}

pub fn algebra_to_json(l: &LieAlgebra) -> AlgebraJson {
    let dim = l.dim();
    let mut brackets = Vec::new();
    for i in 0..dim {
        for j in (i + 1)..dim {
            let coeffs = sparse(l.bracket_basis(i, j));
            if !coeffs.is_empty() {
                brackets.push(PairEntry { i, j, coeffs });
            }
        }
    }
    AlgebraJson { dim, labels: l.labels().iter().map(ToString::to_string).collect(), brackets }
}

/// Builds an abstract algebra; rejects `i >= j` entries, duplicates and
/// structure constants failing the Jacobi identity.
pub fn algebra_from_json(json: &AlgebraJson) -> Result<LieAlgebra> {
    let dim = json.dim;
    let labels = if json.labels.is_empty() {
        (0..dim).map(BasisLabel::Abstract).collect()
    } else {
        if json.labels.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: json.labels.len() });
        }
        json.labels.iter().map(|s| s.parse()).collect::<Result<Vec<BasisLabel>>>()?
    };
    let mut d = vec![Rational::zero(); dim * dim * dim];
    let mut seen = std::collections::BTreeSet::new();
    for e in &json.brackets {
        check_index(e.i, dim)?;
        check_index(e.j, dim)?;
        if e.i >= e.j {
            return Err(Error::Parse(format!("bracket entry ({}, {}) must have i < j", e.i, e.j)));
        }
        if !seen.insert((e.i, e.j)) {
            return Err(Error::Parse(format!("duplicate bracket entry ({}, {})", e.i, e.j)));
        }
        fill(&mut d, dim, e.i, e.j, &e.coeffs)?;
        for k in 0..dim {
            d[(e.j * dim + e.i) * dim + k] = -d[(e.i * dim + e.j) * dim + k].clone();
        }
    }
    let l = LieAlgebra::from_structure_constants(labels, d, AlgebraKind::Abstract)?;
    if let Err((i, j, k)) = l.check_jacobi() {
        return Err(Error::Parse(format!("Jacobi identity fails at ({i}, {j}, {k})")));
    }
    Ok(l)
}

pub fn product_to_json(p: &BilinearProduct) -> ProductJson {
    let dim = p.dim();
    let mut products = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            let coeffs = sparse(p.basis_product(i, j));
            if !coeffs.is_empty() {
                products.push(PairEntry { i, j, coeffs });
            }
        }
    }
    ProductJson { dim, products }
}

/// Reads the full tensor: an `(i, j)` entry with `i <= j` also sets `(j, i)`,
/// an explicit `i > j` entry overrides its mirror, and the result must be
/// symmetric.
pub fn product_from_json(json: &ProductJson) -> Result<BilinearProduct> {
    let dim = json.dim;
    let mut d = vec![Rational::zero(); dim * dim * dim];
    let mut seen = std::collections::BTreeSet::new();
    let (lower, upper): (Vec<_>, Vec<_>) = json.products.iter().partition(|e| e.i > e.j);
    for e in upper.into_iter().chain(lower) {
        check_index(e.i, dim)?;
        check_index(e.j, dim)?;
        if !seen.insert((e.i, e.j)) {
            return Err(Error::Parse(format!("duplicate product entry ({}, {})", e.i, e.j)));
        }
        fill(&mut d, dim, e.i, e.j, &e.coeffs)?;
        if e.i <= e.j {
            fill(&mut d, dim, e.j, e.i, &e.coeffs)?;
        }
    }
    check_commutative(dim, &d)?;
    BilinearProduct::from_tensor(dim, d)
}

pub fn linear_map_to_json(m: &LinearMap) -> LinearMapJson {
    let dim = m.dim();
    LinearMapJson { dim, columns: (0..dim).map(|j| m.image(j).iter().map(rational::format).collect()).collect() }
}

pub fn linear_map_from_json(json: &LinearMapJson) -> Result<LinearMap> {
    if json.columns.len() != json.dim {
        return Err(Error::DimensionMismatch { expected: json.dim, found: json.columns.len() });
    }
    let columns = json
        .columns
        .iter()
        .map(|c| {
            if c.len() != json.dim {
                return Err(Error::DimensionMismatch { expected: json.dim, found: c.len() });
            }
            c.iter().map(|s| rational::parse(s)).collect()
        })
        .collect::<Result<Vec<Vec<Rational>>>>()?;
    LinearMap::new(ExactMatrix::from_columns(json.dim, &columns)?)
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_algebra(text: &str) -> Result<LieAlgebra> {
    algebra_from_json(&parse_json(text)?)
}

pub fn parse_product(text: &str) -> Result<BilinearProduct> {
    product_from_json(&parse_json(text)?)
}

pub fn parse_linear_map(text: &str) -> Result<LinearMap> {
    linear_map_from_json(&parse_json(text)?)
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::{catalog, CatalogEntry, T2Structure};
    use crate::rational::{frac, int};

    #[test]
    fn algebra_round_trip() {
        for l in [
            LieAlgebra::upper_triangular(3).unwrap(),
            LieAlgebra::full_matrix(2).unwrap(),
            LieAlgebra::special_linear(3).unwrap(),
        ] {
            let text = to_pretty(&algebra_to_json(&l));
            let back = parse_algebra(&text).unwrap();
            assert_eq!(back.labels(), l.labels());
            assert_eq!(back.structure_constants(), l.structure_constants());
        }
    }

    #[test]
    fn algebra_rejects_bad_input() {
        let lower = r#"{"dim": 2, "brackets": [{"i": 1, "j": 0, "coeffs": {"1": "1"}}]}"#;
        assert!(matches!(parse_algebra(lower), Err(Error::Parse(_))));
        let jacobi = r#"{"dim": 3, "brackets": [
            {"i": 0, "j": 1, "coeffs": {"2": "1"}},
            {"i": 0, "j": 2, "coeffs": {"0": "1"}}]}"#;
        assert!(matches!(parse_algebra(jacobi), Err(Error::Parse(m)) if m.contains("Jacobi")));
        let range = r#"{"dim": 2, "brackets": [{"i": 0, "j": 1, "coeffs": {"5": "1"}}]}"#;
        assert!(parse_algebra(range).is_err());
        assert!(parse_algebra("{not json").is_err());
    }

    #[test]
    fn product_round_trip() {
        let p = catalog(&CatalogEntry::T2 { structure: T2Structure::T19C, c: Some(frac(-2, 3)) }).unwrap();
        let back = parse_product(&to_pretty(&product_to_json(&p))).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn product_symmetry_is_checked() {
        let ok = r#"{"dim": 2, "products": [{"i": 0, "j": 1, "coeffs": {"1": "1/2"}}]}"#;
        let p = parse_product(ok).unwrap();
        assert_eq!(p.entry(1, 0, 1), &frac(1, 2));
        let asym = r#"{"dim": 2, "products": [
            {"i": 0, "j": 1, "coeffs": {"1": "1"}},
            {"i": 1, "j": 0, "coeffs": {"1": "2"}}]}"#;
        assert_eq!(parse_product(asym), Err(Error::NotCommutative(0, 1, 1)));
        let mirror = r#"{"dim": 2, "products": [
            {"i": 0, "j": 1, "coeffs": {"1": "1"}},
            {"i": 1, "j": 0, "coeffs": {"1": "1"}}]}"#;
        assert!(parse_product(mirror).is_ok());
        let bad = r#"{"dim": 2, "products": [{"i": 0, "j": 0, "coeffs": {"0": "1/0"}}]}"#;
        assert!(matches!(parse_product(bad), Err(Error::Parse(_))));
    }

    #[test]
    fn linear_map_round_trip() {
        let m = LinearMap::from_columns(&[vec![int(1), frac(1, 2)], vec![int(0), int(-3)]]).unwrap();
        let json = linear_map_to_json(&m);
        assert_eq!(json.columns[0], vec!["1".to_string(), "1/2".to_string()]);
        assert_eq!(parse_linear_map(&to_pretty(&json)).unwrap(), m);
    }
}
