//! Sparse multivariate polynomials over the rationals, used for the linear and
//! quadratic constraints on parametrized products.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational};

/// A monomial as a sorted list of variable indices (`[]` is the constant).
pub type Monomial = Vec<usize>;

/// A linear form `sum_v c_v x_v` with sorted, nonzero terms.
pub type LinearForm = Vec<(usize, Rational)>;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(v: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![v], Rational::one());
        p
    }

    pub fn from_linear(form: &[(usize, Rational)]) -> Self {
        let mut p = Self::zero();
        for (v, c) in form {
            p.add_term(vec![*v], c.clone());
        }
        p
    }

    /// `s * f * g` added into `self`, for linear forms `f`, `g`.
    pub fn add_product(&mut self, s: &Rational, f: &[(usize, Rational)], g: &[(usize, Rational)]) {
        for (a, ca) in f {
            for (b, cb) in g {
                let m = if a <= b { vec![*a, *b] } else { vec![*b, *a] };
                self.add_term(m, s * ca * cb);
            }
        }
    }

    pub fn add_term(&mut self, mut m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        m.sort_unstable();
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree, with the zero polynomial at 0.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms.keys().flatten().copied().collect()
    }

    pub fn eval(&self, values: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in m {
                t *= &values[*v];
            }
            acc += t;
        }
        acc
    }

    /// Substitutes the assigned variables.
    pub fn partial_eval(&self, values: &[Option<Rational>]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            let mut rest = Vec::new();
            for v in m {
                match &values[*v] {
                    Some(x) => t *= x,
                    None => rest.push(*v),
                }
            }
            out.add_term(rest, t);
        }
        out
    }

    /// Scales so the leading coefficient (largest monomial) is 1; the zero
    /// polynomial is returned unchanged.
    pub fn normalized(&self) -> Poly {
        match self.terms.iter().next_back() {
            Some((_, lead)) => self.scale(&(Rational::one() / lead)),
            None => self.clone(),
        }
    }

    /// Human-readable rendering with the given variable names.
    pub fn display(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let vars: Vec<&str> = m.iter().map(|v| names[*v].as_str()).collect();
            if vars.is_empty() {
                s.push_str(&rational::format(&abs));
            } else {
                if !abs.is_one() {
                    let _ = write!(s, "{}*", rational::format(&abs));
                }
                s.push_str(&vars.join("*"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn arithmetic_and_cancellation() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let p = x.add(&y).mul(&x.sub(&y));
        let q = x.mul(&x).sub(&y.mul(&y));
        assert_eq!(p, q);
        assert_eq!(p.degree(), 2);
        assert!(p.sub(&q).is_zero());
        assert_eq!(p.eval(&[int(3), int(2)]), int(5));
    }

    #[test]
    fn products_of_linear_forms() {
        let mut p = Poly::zero();
        p.add_product(&int(2), &[(0, int(1)), (1, int(1))], &[(1, int(1))]);
        // 2(x0 + x1) x1
        assert_eq!(p.eval(&[int(1), int(2)]), int(12));
        assert_eq!(p.variables().into_iter().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn partial_evaluation() {
        let mut p = Poly::zero();
        p.add_product(&int(1), &[(0, int(1))], &[(1, int(1))]);
        p.add_term(vec![2], int(-1));
        let q = p.partial_eval(&[Some(int(2)), None, Some(int(4))]);
        assert_eq!(q, Poly::var(1).scale(&int(2)).add(&Poly::constant(int(-4))));
    }

    #[test]
    fn normalization_and_display() {
        let p = Poly::var(0).scale(&int(-2)).add(&Poly::var(1).scale(&int(4)));
        let n = p.normalized();
        assert_eq!(n.eval(&[int(0), int(1)]), int(1));
        assert_eq!(n.eval(&[int(1), int(0)]), frac(-1, 2));
        let names = vec!["a".to_string(), "b".to_string()];
        assert_eq!(p.display(&names), "4*b - 2*a");
        assert_eq!(Poly::zero().display(&names), "0");
    }
}
