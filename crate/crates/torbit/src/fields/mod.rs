//! Totally real fields of degree 2 and 3, their orders, unit groups and
//! regulators.
//!
//! Field elements are rational coordinate vectors over the power basis
//! `1, a, ..., a^(n-1)` of the defining root `a`. Orders and ideals are row
//! lattices in those coordinates.

mod arith;
mod enumerate;
mod maximal;
pub mod quadratic;
mod units;

use std::sync::{Arc, OnceLock};

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dynamics::EmbeddedLattice;
use crate::linalg::{hnf_q, inverse_q, qz, vec_mul_q, MatQ, Q, Z};
use crate::poly::{count_real_roots, interval_width_bits, q_to_f64, real_root_intervals, IntPoly};
use crate::{Error, Result};

pub(crate) use arith::PolyArith;
pub use enumerate::{enumerate_totally_real_fields, is_isomorphic, monogenic_cubics};
pub use units::{unit_group, UnitData, UnitGroup};

/// Power-basis coordinates of a field element.
pub type Element = Vec<Q>;

pub const DEFAULT_PRECISION_BITS: u32 = 80;

/// Bits of root precision needed before anything is rounded to `f64`.
pub const F64_BITS: u32 = 60;

#[derive(Debug)]
pub struct TotallyRealField {
    pub degree: usize,
    pub min_poly: IntPoly,
    /// Ascending real roots; `roots[i]` defines the embedding `sigma_i`.
    pub roots: Vec<f64>,
    pub root_intervals: Vec<(Q, Q)>,
    pub precision_bits: u32,
    pub field_disc: Z,
    pub(crate) arith: PolyArith,
    maximal_basis: MatQ,
}

impl TotallyRealField {
    pub fn new(poly: IntPoly) -> Result<Arc<Self>> {
        Self::with_precision(poly, DEFAULT_PRECISION_BITS)
    }

    pub fn from_coeffs(c: &[i64]) -> Result<Arc<Self>> {
        Self::new(IntPoly::from_i64(c))
    }

    pub fn with_precision(poly: IntPoly, precision_bits: u32) -> Result<Arc<Self>> {
        let n = poly.degree();
        if !(2..=3).contains(&n) {
            return Err(Error::DegreeUnsupported(n));
        }
        if !poly.is_monic() {
            return Err(Error::Invalid("defining polynomial must be monic".into()));
        }
        if !poly.is_irreducible() {
            return Err(Error::ReducibleInput);
        }
        if count_real_roots(&poly) != n {
            return Err(Error::NotTotallyReal);
        }
        let arith = PolyArith::new(&poly);
        let maximal_basis = maximal::maximal_basis(&arith)?;
        let field_disc = arith.gram_det(&maximal_basis).to_integer();
        let root_intervals = real_root_intervals(&poly, precision_bits);
        let roots = root_intervals
            .iter()
            .map(|(a, b)| q_to_f64(&((a + b) / Q::from_integer(Z::from(2)))))
            .collect();
        Ok(Arc::new(TotallyRealField {
            degree: n,
            min_poly: poly,
            roots,
            root_intervals,
            precision_bits,
            field_disc,
            arith,
            maximal_basis,
        }))
    }

    pub fn maximal_order(self: &Arc<Self>) -> Order {
        Order::from_rows(self, &self.maximal_basis).expect("maximal basis is an order")
    }

    /// `Z[a]` for the defining root `a`.
    pub fn equation_order(self: &Arc<Self>) -> Order {
        Order::from_rows(self, &crate::linalg::identity_q(self.degree)).expect("Z[a] is an order")
    }

    /// Width of the certified root intervals, as `2^-bits`.
    pub fn certified_bits(&self) -> u32 {
        self.root_intervals
            .iter()
            .map(|(a, b)| interval_width_bits(a, b))
            .min()
            .unwrap_or(0)
    }

    pub fn one(&self) -> Element {
        let mut e = vec![Q::zero(); self.degree];
        e[0] = Q::one();
        e
    }

    pub fn from_int(&self, k: i64) -> Element {
        let mut e = vec![Q::zero(); self.degree];
        e[0] = Q::from_integer(Z::from(k));
        e
    }

    pub fn mul(&self, a: &[Q], b: &[Q]) -> Element {
        self.arith.mul(a, b)
    }

    pub fn inv(&self, a: &[Q]) -> Option<Element> {
        self.arith.inverse(a)
    }

    pub fn pow(&self, a: &[Q], e: i64) -> Option<Element> {
        let base = if e < 0 { self.inv(a)? } else { a.to_vec() };
        let mut k = e.unsigned_abs();
        let mut acc = self.one();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            k >>= 1;
            if k > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        Some(acc)
    }

    pub fn norm(&self, a: &[Q]) -> Q {
        self.arith.norm(a)
    }

    pub fn trace(&self, a: &[Q]) -> Q {
        self.arith.trace(a)
    }

    pub fn is_integral(&self, a: &[Q]) -> bool {
        self.arith.is_integral(a)
    }

    /// `(sigma_1(a), ..., sigma_n(a))` in `f64`.
    pub fn embed(&self, a: &[Q]) -> Vec<f64> {
        let c: Vec<f64> = a.iter().map(q_to_f64).collect();
        self.roots
            .iter()
            .map(|&r| c.iter().rev().fold(0.0, |acc, x| acc * r + x))
            .collect()
    }
}

/// A finite-index subring of the maximal order.
#[derive(Clone, Debug)]
pub struct Order {
    pub field: Arc<TotallyRealField>,
    /// HNF rows over the power basis; row 0 is `1`.
    pub basis: MatQ,
    pub disc: Z,
    basis_inv: MatQ,
    /// `table[i][j]` are the order coordinates of `w_i w_j`.
    table: Vec<Vec<Vec<Z>>>,
    table_i64: Option<Vec<Vec<Vec<i64>>>>,
    units: Arc<OnceLock<Result<UnitData>>>,
}

impl PartialEq for Order {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.field, &other.field) && self.basis == other.basis
    }
}

impl Order {
    /// The order spanned by the given power-basis rows, which must contain
    /// `1` and be closed under multiplication.
    pub fn from_rows(field: &Arc<TotallyRealField>, rows: &[Vec<Q>]) -> Result<Order> {
        let n = field.degree;
        let (h, d) =
            hnf_q(rows, n).ok_or_else(|| Error::InvalidLattice("rank deficient".into()))?;
        let basis: MatQ = h
            .iter()
            .map(|r| r.iter().map(|x| Q::new(x.clone(), d.clone())).collect())
            .collect();
        let basis_inv = inverse_q(&basis).ok_or(Error::Singular)?;
        let to_coords = |x: &[Q]| vec_mul_q(x, &basis_inv);
        let one = to_coords(&field.one());
        if one.iter().any(|c| !c.is_integer()) {
            return Err(Error::InvalidLattice("module does not contain 1".into()));
        }
        let mut table = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let c = to_coords(&field.mul(&basis[i], &basis[j]));
                if c.iter().any(|x| !x.is_integer()) {
                    return Err(Error::InvalidLattice(
                        "module is not closed under multiplication".into(),
                    ));
                }
                table[i][j] = c.into_iter().map(|x| x.to_integer()).collect();
            }
        }
        let table_i64 = table
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| c.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
                    .collect()
            })
            .collect::<Option<Vec<Vec<Vec<i64>>>>>();
        let disc = field.arith.gram_det(&basis).to_integer();
        Ok(Order {
            field: field.clone(),
            basis,
            disc,
            basis_inv,
            table,
            table_i64,
            units: Arc::new(OnceLock::new()),
        })
    }

    pub fn degree(&self) -> usize {
        self.field.degree
    }

    /// Fundamental units and regulators, computed once per order.
    pub fn unit_data(&self) -> Result<&UnitData> {
        self.units
            .get_or_init(|| units::compute_unit_data(self))
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// Power-basis element with the given order coordinates.
    pub fn element(&self, z: &[Z]) -> Element {
        let zq: Vec<Q> = z.iter().map(qz).collect();
        vec_mul_q(&zq, &self.basis)
    }

    pub fn element_i64(&self, z: &[i64]) -> Element {
        let zz: Vec<Z> = z.iter().map(|&x| Z::from(x)).collect();
        self.element(&zz)
    }

    /// Order coordinates of a field element (rational in general).
    pub fn coords(&self, x: &[Q]) -> Vec<Q> {
        vec_mul_q(x, &self.basis_inv)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.coords(x).iter().all(|c| c.is_integer())
    }

    /// Integer coordinates of `w_i w_j`.
    pub fn mult_table(&self) -> &Vec<Vec<Vec<Z>>> {
        &self.table
    }

    /// Matrix of multiplication by `sum z_i w_i` on the order basis (row
    /// convention: row `j` holds the coordinates of `x w_j`).
    pub fn mult_matrix(&self, z: &[Z]) -> Vec<Vec<Z>> {
        let n = self.degree();
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| (0..n).fold(Z::zero(), |acc, i| acc + &z[i] * &self.table[i][j][k]))
                    .collect()
            })
            .collect()
    }

    /// Exact norm of the element with integer order coordinates `z`.
    pub fn norm_of(&self, z: &[i64]) -> Z {
        if let Some(t) = &self.table_i64 {
            if let Some(v) = norm_i128(t, z) {
                return Z::from(v);
            }
        }
        let zz: Vec<Z> = z.iter().map(|&x| Z::from(x)).collect();
        crate::linalg::det_z(&self.mult_matrix(&zz))
    }

    pub fn trace_gram(&self) -> MatQ {
        self.field.arith.gram(&self.basis)
    }

    /// Rows `theta(w_i)`.
    pub fn embedding_rows(&self) -> Vec<Vec<f64>> {
        self.basis.iter().map(|b| self.field.embed(b)).collect()
    }

    /// `[O_K : O]`.
    pub fn index(&self) -> Z {
        let r = &self.disc / &self.field.field_disc;
        num_integer::Roots::sqrt(&r)
    }

    pub fn is_maximal(&self) -> bool {
        self.disc == self.field.field_disc
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.degree();
        let rec = OrderRecord {
            degree: n,
            min_poly: self.field.min_poly.coeffs[..n]
                .iter()
                .map(|c| c.to_string())
                .collect(),
            order_basis: self
                .basis
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect(),
            disc: self.disc.to_string(),
        };
        serde_json::to_value(rec).expect("plain record")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Order> {
        let rec: OrderRecord =
            serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        let parse_z = |s: &str| s.parse::<Z>().map_err(|e| Error::Invalid(e.to_string()));
        let parse_q = |s: &str| s.parse::<Q>().map_err(|e| Error::Invalid(e.to_string()));
        let mut coeffs = rec
            .min_poly
            .iter()
            .map(|s| parse_z(s))
            .collect::<Result<Vec<_>>>()?;
        coeffs.push(Z::one());
        if coeffs.len() != rec.degree + 1 {
            return Err(Error::Invalid(
                "min_poly length does not match degree".into(),
            ));
        }
        let field = TotallyRealField::new(IntPoly::new(coeffs))?;
        let rows = rec
            .order_basis
            .iter()
            .map(|r| r.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let o = Order::from_rows(&field, &rows)?;
        if o.disc.to_string() != rec.disc {
            return Err(Error::Invalid(
                "recorded discriminant does not match the basis".into(),
            ));
        }
        Ok(o)
    }
}

fn norm_i128(t: &[Vec<Vec<i64>>], z: &[i64]) -> Option<i128> {
    let n = z.len();
    let mut m = [[0i128; 3]; 3];
    for (j, row) in m.iter_mut().enumerate().take(n) {
        for (k, e) in row.iter_mut().enumerate().take(n) {
            let mut s = 0i128;
            for i in 0..n {
                s = s.checked_add((z[i] as i128).checked_mul(t[i][j][k] as i128)?)?;
            }
            *e = s;
        }
    }
    match n {
        2 => m[0][0]
            .checked_mul(m[1][1])?
            .checked_sub(m[0][1].checked_mul(m[1][0])?),
        3 => {
            let minor = |a: usize, b: usize, c: usize, d: usize| -> Option<i128> {
                m[1][a]
                    .checked_mul(m[2][b])?
                    .checked_sub(m[1][c].checked_mul(m[2][d])?)
            };
            let t0 = m[0][0].checked_mul(minor(1, 2, 2, 1)?)?;
            let t1 = m[0][1].checked_mul(minor(0, 2, 2, 0)?)?;
            let t2 = m[0][2].checked_mul(minor(0, 1, 1, 0)?)?;
            t0.checked_sub(t1)?.checked_add(t2)
        }
        _ => None,
    }
}

#[derive(Serialize, Deserialize)]
struct OrderRecord {
    degree: usize,
    min_poly: Vec<String>,
    order_basis: Vec<Vec<String>>,
    disc: String,
}

pub fn order_discriminant(o: &Order) -> Z {
    o.disc.clone()
}

/// Anything with a rank-`n` row basis inside a field.
pub trait Embeddable {
    fn field(&self) -> &Arc<TotallyRealField>;
    fn power_basis_rows(&self) -> MatQ;
}

impl Embeddable for Order {
    fn field(&self) -> &Arc<TotallyRealField> {
        &self.field
    }
    fn power_basis_rows(&self) -> MatQ {
        self.basis.clone()
    }
}

/// The lattice `theta(L)` with rows `theta(b_i)`.
pub fn minkowski_embedding<E: Embeddable>(x: &E) -> Result<EmbeddedLattice> {
    let field = x.field();
    let have = field.certified_bits();
    if have < F64_BITS {
        return Err(Error::PrecisionInsufficient {
            have,
            need: F64_BITS,
        });
    }
    let rows: Vec<Vec<f64>> = x
        .power_basis_rows()
        .iter()
        .map(|b| field.embed(b))
        .collect();
    EmbeddedLattice::new(rows)
}

/// The order of discriminant `d` in `Q(sqrt d)`: the equation order of
/// `x^2 - d/4` or `x^2 - x - (d - 1)/4`.
pub fn quadratic_order(d: i64) -> Result<Order> {
    quadratic::check_disc(d)?;
    let c = if d % 4 == 0 {
        vec![-d / 4, 0, 1]
    } else {
        vec![-(d - 1) / 4, -1, 1]
    };
    Ok(TotallyRealField::from_coeffs(&c)?.equation_order())
}

/// `x^3 - a x^2 - (a + 3) x - 1`.
pub fn simplest_cubic(a: i64) -> Result<Arc<TotallyRealField>> {
    if a < -1 {
        return Err(Error::Invalid(format!("simplest cubic parameter {a} < -1")));
    }
    TotallyRealField::from_coeffs(&[-1, -(a + 3), -a, 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_discriminants() {
        let k = TotallyRealField::from_coeffs(&[-2, 0, 1]).unwrap();
        assert_eq!(k.field_disc, Z::from(8));
        let k = TotallyRealField::from_coeffs(&[-5, 0, 1]).unwrap();
        assert_eq!(k.field_disc, Z::from(5));
        assert_eq!(k.equation_order().disc, Z::from(20));
        assert_eq!(k.equation_order().index(), Z::from(2));
    }

    #[test]
    fn cubic_maximal_orders() {
        for (c, d) in [
            ([-1i64, -2, 1, 1], 49),
            ([-1, -3, 0, 1], 81),
            ([-1, -4, -1, 1], 169),
        ] {
            assert_eq!(
                TotallyRealField::from_coeffs(&c).unwrap().field_disc,
                Z::from(d)
            );
        }
        // x^3 - 12: not totally real
        assert_eq!(
            TotallyRealField::from_coeffs(&[-12, 0, 0, 1]).unwrap_err(),
            Error::NotTotallyReal
        );
        // index 2 equation order: x^3 - x^2 - 10x + 8 has disc 4 * 1957? check via maximal order
        let k = TotallyRealField::from_coeffs(&[8, -10, -1, 1]).unwrap();
        let o = k.equation_order();
        assert_eq!(&o.disc % &k.field_disc, Z::zero());
    }

    #[test]
    fn json_roundtrip() {
        let k = TotallyRealField::from_coeffs(&[-1, -2, 1, 1]).unwrap();
        let o = k.maximal_order();
        let v = o.to_json();
        let back = Order::from_json(&v).unwrap();
        assert_eq!(back.basis, o.basis);
        assert_eq!(back.disc, o.disc);
    }
}
