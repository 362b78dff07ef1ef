//! Elements `u(t) + x(t) F` of the quaternion algebra over `F_q(t)` with
//! `Z^2 = c`, `F^2 = t`, `ZF = -FZ`; `u`, `x` are polynomials in `t` with
//! coefficients in `F_q[Z]`. This is the exact oracle behind every square
//! relation of a quaternionic datum.

use thiserror::Error;

use crate::ffield::{FieldSpec, Fq2Elem, FqElem, QuadExt};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuatError {
    #[error("coefficient {0:?} does not belong to the field of this algebra")]
    ForeignCoefficient(Fq2Elem),
    #[error("proportionality is undefined when both arguments are zero")]
    BothZero,
}

/// A polynomial in `t`, low-to-high, with no trailing zeros.
pub type TPoly = Vec<Fq2Elem>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatElem {
    pub u: TPoly,
    pub x: TPoly,
}

#[derive(Copy, Clone, Debug)]
pub struct QuatAlgebra<'a> {
    ext: QuadExt<'a>,
}

impl<'a> QuatAlgebra<'a> {
    pub fn new(field: &'a FieldSpec) -> Self {
        QuatAlgebra { ext: field.ext() }
    }

    pub fn ext(&self) -> QuadExt<'a> {
        self.ext
    }

    fn trim(&self, mut p: TPoly) -> TPoly {
        while p.last() == Some(&self.ext.zero()) {
            p.pop();
        }
        p
    }

    pub fn elem(&self, u: TPoly, x: TPoly) -> QuatElem {
        QuatElem {
            u: self.trim(u),
            x: self.trim(x),
        }
    }

    pub fn one(&self) -> QuatElem {
        self.elem(vec![self.ext.one()], vec![])
    }

    /// `1 + alpha F`.
    pub fn one_plus(&self, alpha: Fq2Elem) -> QuatElem {
        self.elem(vec![self.ext.one()], vec![alpha])
    }

    /// Multiplies every coefficient by a constant of `F_q[Z]` on the left.
    pub fn scale(&self, s: Fq2Elem, g: &QuatElem) -> QuatElem {
        let m = |p: &TPoly| p.iter().map(|&c| self.ext.mul(s, c)).collect();
        self.elem(m(&g.u), m(&g.x))
    }

    fn check(&self, g: &QuatElem) -> Result<(), QuatError> {
        match g.u.iter().chain(&g.x).find(|&&c| !self.ext.is_valid(c)) {
            Some(&c) => Err(QuatError::ForeignCoefficient(c)),
            None => Ok(()),
        }
    }

    fn padd(&self, a: &TPoly, b: &TPoly) -> TPoly {
        let n = a.len().max(b.len());
        let zero = self.ext.zero();
        let out = (0..n)
            .map(|i| {
                self.ext
                    .add(*a.get(i).unwrap_or(&zero), *b.get(i).unwrap_or(&zero))
            })
            .collect();
        self.trim(out)
    }

    fn pmul(&self, a: &TPoly, b: &TPoly) -> TPoly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![self.ext.zero(); a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.ext.add(out[i + j], self.ext.mul(x, y));
            }
        }
        self.trim(out)
    }

    fn pconj(&self, a: &TPoly) -> TPoly {
        a.iter().map(|&c| self.ext.conj(c)).collect()
    }

    fn shift_t(&self, a: &TPoly) -> TPoly {
        if a.is_empty() {
            return vec![];
        }
        let mut out = vec![self.ext.zero()];
        out.extend_from_slice(a);
        out
    }

    /// `(u1 + x1 F)(u2 + x2 F) = (u1 u2 + t x1 conj(x2)) + (u1 x2 + x1 conj(u2)) F`.
    pub fn mul(&self, g1: &QuatElem, g2: &QuatElem) -> Result<QuatElem, QuatError> {
        self.check(g1)?;
        self.check(g2)?;
        let scalar = self.padd(
            &self.pmul(&g1.u, &g2.u),
            &self.shift_t(&self.pmul(&g1.x, &self.pconj(&g2.x))),
        );
        let f_part = self.padd(
            &self.pmul(&g1.u, &g2.x),
            &self.pmul(&g1.x, &self.pconj(&g2.u)),
        );
        Ok(QuatElem {
            u: scalar,
            x: f_part,
        })
    }

    /// `Nrd(u + xF) = N(u) - t N(x)`, a polynomial over `F_q`.
    pub fn reduced_norm(&self, g: &QuatElem) -> Vec<FqElem> {
        let nu = self.pmul(&g.u, &self.pconj(&g.u));
        let nx = self.pmul(&g.x, &self.pconj(&g.x));
        let diff = self.padd(
            &nu,
            &self.shift_t(&nx).iter().map(|&c| self.ext.neg(c)).collect(),
        );
        debug_assert!(diff.iter().all(|c| c.v == self.ext.base().zero()));
        diff.into_iter().map(|c| c.u).collect()
    }

    /// The four `F_q[t]` components `(Re u, Im u, Re x, Im x)`.
    fn components(&self, g: &QuatElem) -> [Vec<FqElem>; 4] {
        let re = |p: &TPoly| p.iter().map(|c| c.u).collect::<Vec<_>>();
        let im = |p: &TPoly| p.iter().map(|c| c.v).collect::<Vec<_>>();
        [re(&g.u), im(&g.u), re(&g.x), im(&g.x)]
    }

    fn fq_poly_mul_sub_is_zero(
        &self,
        a: &[FqElem],
        b: &[FqElem],
        c: &[FqElem],
        d: &[FqElem],
    ) -> bool {
        // a*b - c*d == 0 over F_q[t]
        let f = self.ext.base();
        let len = (a.len() + b.len()).max(c.len() + d.len());
        let mut acc = vec![f.zero(); len];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                acc[i + j] = f.add(acc[i + j], f.mul(x, y));
            }
        }
        for (i, &x) in c.iter().enumerate() {
            for (j, &y) in d.iter().enumerate() {
                acc[i + j] = f.sub(acc[i + j], f.mul(x, y));
            }
        }
        acc.iter().all(|&x| x == f.zero())
    }

    /// True iff `g2 = s g1` for some nonzero central scalar `s` in `F_q(t)`,
    /// i.e. every 2x2 minor of the component matrix vanishes.
    pub fn proportional(&self, g1: &QuatElem, g2: &QuatElem) -> Result<bool, QuatError> {
        self.check(g1)?;
        self.check(g2)?;
        let z1 = g1.u.is_empty() && g1.x.is_empty();
        let z2 = g2.u.is_empty() && g2.x.is_empty();
        match (z1, z2) {
            (true, true) => return Err(QuatError::BothZero),
            (true, false) | (false, true) => return Ok(false),
            _ => {}
        }
        let c1 = self.components(g1);
        let c2 = self.components(g2);
        for i in 0..4 {
            for j in i + 1..4 {
                if !self.fq_poly_mul_sub_is_zero(&c1[i], &c2[j], &c1[j], &c2[i]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// True iff `g` lies in the center `F_q[t]`.
    pub fn is_scalar(&self, g: &QuatElem) -> bool {
        g.x.is_empty() && g.u.iter().all(|c| c.v == self.ext.base().zero())
    }

    /// Renders `u(t) + x(t)·F` with coefficients written `a+bZ`.
    pub fn format(&self, g: &QuatElem) -> String {
        let poly = |p: &TPoly| {
            let terms: Vec<String> = p
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != self.ext.zero())
                .map(|(i, &c)| {
                    let s = self.ext.format(c);
                    let s = if i > 0 && s.contains('+') {
                        format!("({s})")
                    } else {
                        s
                    };
                    match i {
                        0 => s,
                        1 if s == "1" => "t".to_string(),
                        1 => format!("{s}t"),
                        _ if s == "1" => format!("t^{i}"),
                        _ => format!("{s}t^{i}"),
                    }
                })
                .collect();
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            }
        };
        format!("({}) + ({})·F", poly(&g.u), poly(&g.x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> FieldSpec {
        FieldSpec::new(3, 1).unwrap()
    }

    #[test]
    fn one_plus_f_times_one_minus_f() {
        let f = setup();
        let h = QuatAlgebra::new(&f);
        let x = f.ext();
        let a = h.one_plus(x.one());
        let b = h.one_plus(x.neg(x.one()));
        let prod = h.mul(&a, &b).unwrap();
        // 1 - t
        assert_eq!(prod, h.elem(vec![x.one(), x.neg(x.one())], vec![]));
        assert!(h.is_scalar(&prod));
    }

    #[test]
    fn symbolic_product_q3() {
        let f = setup();
        let h = QuatAlgebra::new(&f);
        let x = f.ext();
        let prod = h
            .mul(&h.one_plus(x.one()), &h.one_plus(x.from_ints(1, 1)))
            .unwrap();
        // (1 + (1+2Z) t) + (2+Z) F
        assert_eq!(
            prod,
            h.elem(vec![x.one(), x.from_ints(1, 2)], vec![x.from_ints(2, 1)])
        );
        assert_eq!(h.format(&prod), "(1 + (1+2Z)t) + (2+Z)·F");
        assert_eq!(h.mul(&prod, &h.one()).unwrap(), prod);
    }

    #[test]
    fn square_relation_corrected_row() {
        let f = setup();
        let h = QuatAlgebra::new(&f);
        let x = f.ext();
        let lhs = h
            .mul(&h.one_plus(x.one()), &h.one_plus(x.from_ints(1, 1)))
            .unwrap();
        let rhs_ok = h
            .mul(
                &h.one_plus(x.from_ints(2, 2)),
                &h.one_plus(x.from_ints(0, 2)),
            )
            .unwrap();
        let rhs_printed = h
            .mul(
                &h.one_plus(x.from_ints(2, 2)),
                &h.one_plus(x.from_ints(2, 0)),
            )
            .unwrap();
        assert!(h.proportional(&lhs, &rhs_ok).unwrap());
        assert!(!h.proportional(&lhs, &rhs_printed).unwrap());
    }

    #[test]
    fn proportionality_edge_cases() {
        let f = setup();
        let h = QuatAlgebra::new(&f);
        let x = f.ext();
        let g = h
            .mul(&h.one_plus(x.from_ints(1, 1)), &h.one_plus(x.z()))
            .unwrap();
        assert!(h.proportional(&g, &h.scale(x.from_ints(2, 0), &g)).unwrap());
        // Z·g is proportional over F_q[Z](t) but not over the center
        assert!(!h.proportional(&g, &h.scale(x.z(), &g)).unwrap());
        let zero = h.elem(vec![], vec![]);
        assert_eq!(h.proportional(&zero, &zero), Err(QuatError::BothZero));
        assert!(!h.proportional(&zero, &g).unwrap());
    }

    #[test]
    fn foreign_coefficients_rejected() {
        let f = setup();
        let h = QuatAlgebra::new(&f);
        let bogus = Fq2Elem::new(
            f.from_int(1),
            FieldSpec::new(5, 1).unwrap().elem(4).unwrap(),
        );
        let g = h.one_plus(bogus);
        assert!(matches!(
            h.mul(&g, &h.one()),
            Err(QuatError::ForeignCoefficient(_))
        ));
    }

    #[test]
    fn nrd_of_one_plus_alpha_f() {
        for p in [3, 5, 7] {
            let f = FieldSpec::new(p, 1).unwrap();
            let h = QuatAlgebra::new(&f);
            let x = f.ext();
            for alpha in x.elements() {
                let n = x.norm(alpha);
                let expected = if n == f.zero() {
                    vec![f.one()]
                } else {
                    vec![f.one(), f.neg(n)]
                };
                assert_eq!(h.reduced_norm(&h.one_plus(alpha)), expected);
                let inv_rel = h
                    .mul(&h.one_plus(alpha), &h.one_plus(x.neg(alpha)))
                    .unwrap();
                assert!(h.is_scalar(&inv_rel));
            }
        }
    }
}
