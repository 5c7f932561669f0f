//! Fixed primitive positive definitions between library relations.
//!
//! Formulas use the library symbols `T3`, `X`, `Rmix`, `Rmi`, `Rmin_le`,
//! `<`, `<=` and `!=`; callers rename symbols to match a structure.

use crate::error::{Error, Result};
use crate::pp::PPFormula;
use crate::relation::{rmix_n_relation, TemporalRelation};

fn build(free: &[&str], bound: &[&str], atoms: &[(&str, &[&str])]) -> PPFormula {
    PPFormula::build(free, bound, atoms).expect("fixed construction is well formed")
}

/// `x ≤ y` as `∃z. T3(x,y,z)`.
pub fn le_from_t3() -> PPFormula {
    build(&["x", "y"], &["z"], &[("T3", &["x", "y", "z"])])
}

/// `x ≠ y` as `∃z. T3(z,x,y)`.
pub fn neq_from_t3() -> PPFormula {
    build(&["x", "y"], &["z"], &[("T3", &["z", "x", "y"])])
}

/// `x < y` as `x ≠ y ∧ x ≤ y`.
pub fn lt_from_neq_le() -> PPFormula {
    build(&["x", "y"], &[], &[("!=", &["x", "y"]), ("<=", &["x", "y"])])
}

/// `R^min_≤(x,y,z)` as `∃u,v,w (T3(u,v,w) ∧ u ≤ x ∧ y ≤ v ∧ z ≤ w)`.
pub fn rmin_le_from_t3() -> PPFormula {
    build(
        &["x", "y", "z"],
        &["u", "v", "w"],
        &[
            ("T3", &["u", "v", "w"]),
            ("<=", &["u", "x"]),
            ("<=", &["y", "v"]),
            ("<=", &["z", "w"]),
        ],
    )
}

/// `S^mi(x,y,z)` as `∃u,v (T3(x,u,v) ∧ u ≠ y ∧ z ≤ v)`.
pub fn smi_from_t3() -> PPFormula {
    build(
        &["x", "y", "z"],
        &["u", "v"],
        &[("T3", &["x", "u", "v"]), ("!=", &["u", "y"]), ("<=", &["z", "v"])],
    )
}

/// `R^mi(x,y,z)` as `∃h (R^min_≤(x,h,y) ∧ z < h)`.
pub fn rmi_from_rmin_le() -> PPFormula {
    build(
        &["x", "y", "z"],
        &["h"],
        &[("Rmin_le", &["x", "h", "y"]), ("<", &["z", "h"])],
    )
}

/// `R^mix(x,y,z)` as `R^mi(x,y,z) ∧ R^mi(y,x,z)`.
pub fn rmix_from_rmi() -> PPFormula {
    build(
        &["x", "y", "z"],
        &[],
        &[("Rmi", &["x", "y", "z"]), ("Rmi", &["y", "x", "z"])],
    )
}

/// `R^mix(x,y,z)` as `∃h (X(z,z,h) ∧ X(x,y,h))`.
pub fn rmix_from_x() -> PPFormula {
    build(
        &["x", "y", "z"],
        &["h"],
        &[("X", &["z", "z", "h"]), ("X", &["x", "y", "h"])],
    )
}

/// Substitutes the T3-definitions of `≤` and `≠` into `phi`.
pub fn over_t3(phi: &PPFormula) -> Result<PPFormula> {
    phi.substitute("<=", &le_from_t3())?.substitute("!=", &neq_from_t3())
}

/// The n-ary mix relation.
pub fn rmix_n(n: usize) -> Result<TemporalRelation> {
    rmix_n_relation(n, crate::relation::DEFAULT_ARITY_CAP)
}

/// Inductive definition of the n-ary mix relation over `Rmix`:
/// `R_n(x1..xn) = ∃h (R_{n-1}(x1,h,x3..x_{n-1}) ∧ Rmix(h,x2,xn))`.
pub fn rmix_n_inductive(n: usize) -> Result<PPFormula> {
    if n < 3 {
        return Err(Error::InvalidArity(n));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let free: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    if n == 3 {
        return PPFormula::build(&free, &[], &[("Rmix", &free)]);
    }
    let mut inner: Vec<&str> = vec![free[0], "h"];
    inner.extend(&free[2..n - 1]);
    let outer = PPFormula::build(&free, &["h"], &[("Rprev", &inner), ("Rmix", &["h", free[1], free[n - 1]])])?;
    outer.substitute("Rprev", &rmix_n_inductive(n - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inductive_formula_shapes() {
        assert_eq!(rmix_n_inductive(3).unwrap().to_string(), "Rmix(x1,x2,x3)");
        let f4 = rmix_n_inductive(4).unwrap();
        assert_eq!(f4.bound_count(), 1);
        assert_eq!(f4.atoms().len(), 2);
        assert_eq!(rmix_n_inductive(6).unwrap().bound_count(), 3);
        assert!(rmix_n_inductive(2).is_err());
    }

    #[test]
    fn x_route_text() {
        assert_eq!(rmix_from_x().to_string(), "∃h (X(z,z,h) ∧ X(x,y,h))");
    }
}
