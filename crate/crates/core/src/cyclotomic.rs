//! Exact arithmetic in the cyclotomic field Q(zeta_M).
//!
//! Elements are polynomials in zeta with rational coefficients, reduced
//! modulo the M-th cyclotomic polynomial. Only small M occur here
//! (phi(M) <= 6), so dense coefficient vectors with `BigRational` entries
//! are plenty fast for the antipode systems and the twisted group algebra
//! oracle.

use num::{BigInt, BigRational, One, Zero};

/// Coefficients of the M-th cyclotomic polynomial (monic, integer).
pub fn cyclotomic_polynomial(m: u64) -> Vec<BigInt> {
    // (x^m - 1) / prod_{d | m, d < m} Phi_d, by exact polynomial division
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            num = poly_div_exact(&num, &phi_d);
        }
    }
    num
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dn = den.len() - 1;
    let lead = den[dn].clone();
    assert!(lead.is_one());
    let qn = rem.len() - 1 - dn;
    let mut q = vec![BigInt::zero(); qn + 1];
    for k in (0..=qn).rev() {
        let c = rem[k + dn].clone();
        q[k] = c.clone();
        for i in 0..=dn {
            let sub = &den[i] * &c;
            rem[k + i] -= sub;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    q
}

/// Shared modulus data for a fixed M.
#[derive(Clone, Debug)]
pub struct CycField {
    pub m: u64,
    /// phi(M): degree of the field over Q
    pub degree: usize,
    /// Phi_M coefficients (length degree + 1, monic)
    phi: Vec<BigRational>,
    /// zeta^k for k in 0..M, reduced
    root_powers: Vec<Vec<BigRational>>,
}

impl CycField {
    pub fn new(m: u64) -> Self {
        assert!(m >= 1);
        let phi_int = cyclotomic_polynomial(m.max(1));
        let degree = phi_int.len() - 1;
        let phi: Vec<BigRational> = phi_int
            .into_iter()
            .map(|c| BigRational::from_integer(c))
            .collect();
        let mut field = CycField {
            m,
            degree,
            phi,
            root_powers: Vec::new(),
        };
        let mut powers = Vec::with_capacity(m as usize);
        let mut acc = field.one();
        for _ in 0..m {
            powers.push(acc.clone());
            acc = field.mul_by_root(&acc);
        }
        field.root_powers = powers;
        field
    }

    pub fn zero(&self) -> Vec<BigRational> {
        vec![BigRational::zero(); self.degree.max(1)]
    }

    pub fn one(&self) -> Vec<BigRational> {
        let mut v = self.zero();
        v[0] = BigRational::one();
        v
    }

    /// zeta^e (e taken mod M).
    pub fn root(&self, e: u64) -> Vec<BigRational> {
        self.root_powers[(e % self.m) as usize].clone()
    }

    fn mul_by_root(&self, a: &[BigRational]) -> Vec<BigRational> {
        // multiply by x, reduce mod Phi
        let d = self.degree.max(1);
        let mut out = vec![BigRational::zero(); d];
        for i in 0..d - 1 {
            out[i + 1] = a[i].clone();
        }
        let top = a[d - 1].clone();
        if !top.is_zero() {
            for i in 0..d {
                out[i] -= &top * &self.phi[i];
            }
        }
        out
    }

    pub fn add(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn neg(&self, a: &[BigRational]) -> Vec<BigRational> {
        a.iter().map(|x| -x).collect()
    }

    pub fn mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let d = self.degree.max(1);
        let mut wide = vec![BigRational::zero(); 2 * d];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                wide[i + j] += x * y;
            }
        }
        // reduce degrees >= d
        for k in (d..2 * d).rev() {
            let c = wide[k].clone();
            if c.is_zero() {
                continue;
            }
            wide[k] = BigRational::zero();
            for i in 0..d {
                let sub = &c * &self.phi[i];
                wide[k - d + i] -= sub;
            }
        }
        wide.truncate(d);
        wide
    }

    pub fn is_zero(&self, a: &[BigRational]) -> bool {
        a.iter().all(|x| x.is_zero())
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x].
    pub fn inv(&self, a: &[BigRational]) -> Option<Vec<BigRational>> {
        if self.is_zero(a) {
            return None;
        }
        if self.degree == 0 {
            // Q itself
            return Some(vec![a[0].recip()]);
        }
        // gcd(a, Phi) = 1 in Q[x]; track s with s*a = 1 mod Phi
        let mut r0: Vec<BigRational> = self.phi.clone();
        let mut r1: Vec<BigRational> = a.to_vec();
        trim(&mut r1);
        let mut s0 = vec![BigRational::zero()];
        let mut s1 = vec![BigRational::one()];
        while !poly_is_zero(&r1) {
            let (q, r) = poly_divmod(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is the gcd, a nonzero constant
        if r0.len() != 1 {
            return None;
        }
        let c = r0[0].recip();
        let mut out = self.zero();
        for (i, x) in s0.iter().enumerate() {
            if i < out.len() {
                out[i] = x * &c;
            }
        }
        // s0 may exceed degree; reduce properly via mul with one
        Some(self.mul(&out, &self.one()))
    }
}

fn trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_is_zero(p: &[BigRational]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    let mut out = out;
    trim(&mut out);
    out
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem: Vec<BigRational> = a.to_vec();
    trim(&mut rem);
    let mut b = b.to_vec();
    trim(&mut b);
    let db = b.len() - 1;
    if rem.len() <= db && !(rem.len() == b.len()) {
        return (vec![BigRational::zero()], rem);
    }
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); rem.len().saturating_sub(db)];
    while rem.len() > db || (rem.len() == b.len() && !poly_is_zero(&rem)) {
        let da = rem.len() - 1;
        if da < db {
            break;
        }
        let c = &rem[da] / &lead;
        q[da - db] = c.clone();
        for i in 0..=db {
            let sub = &b[i] * &c;
            rem[da - db + i] -= sub;
        }
        trim(&mut rem);
        if poly_is_zero(&rem) {
            break;
        }
    }
    trim(&mut q);
    (q, rem)
}

/// Solve the square sparse system A x = rhs over Q(zeta_M); entries of A
/// are given as (row, col, value) triples. Returns None if singular or
/// inconsistent.
pub fn solve_sparse(
    field: &CycField,
    n: usize,
    entries: Vec<(usize, usize, Vec<BigRational>)>,
    rhs: Vec<Vec<BigRational>>,
) -> Option<Vec<Vec<BigRational>>> {
    use std::collections::BTreeMap;
    let mut rows: Vec<BTreeMap<usize, Vec<BigRational>>> = vec![BTreeMap::new(); n];
    for (r, c, v) in entries {
        if field.is_zero(&v) {
            continue;
        }
        let slot = rows[r].entry(c).or_insert_with(|| field.zero());
        *slot = field.add(slot, &v);
        if field.is_zero(slot) {
            rows[r].remove(&c);
        }
    }
    let mut b = rhs;
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row_used = vec![false; n];
    for col in 0..n {
        // minimal-support row containing col
        let pick = (0..n)
            .filter(|&r| !row_used[r] && rows[r].contains_key(&col))
            .min_by_key(|&r| rows[r].len());
        let piv = match pick {
            Some(r) => r,
            None => continue,
        };
        row_used[piv] = true;
        pivot_of_col[col] = Some(piv);
        let inv = field.inv(&rows[piv][&col])?;
        // normalize pivot row
        let cols: Vec<usize> = rows[piv].keys().copied().collect();
        for c in cols {
            let v = field.mul(&rows[piv][&c], &inv);
            rows[piv].insert(c, v);
        }
        b[piv] = field.mul(&b[piv], &inv);
        // eliminate from all other rows containing col
        let prow: Vec<(usize, Vec<BigRational>)> =
            rows[piv].iter().map(|(c, v)| (*c, v.clone())).collect();
        let pb = b[piv].clone();
        for r in 0..n {
            if r == piv || !rows[r].contains_key(&col) {
                continue;
            }
            let factor = rows[r][&col].clone();
            for (c, v) in &prow {
                let sub = field.mul(&factor, v);
                let slot = rows[r].entry(*c).or_insert_with(|| field.zero());
                *slot = field.sub(slot, &sub);
                if field.is_zero(slot) {
                    rows[r].remove(c);
                }
            }
            let sub = field.mul(&factor, &pb);
            b[r] = field.sub(&b[r], &sub);
        }
    }
    // check consistency and read off solution
    for r in 0..n {
        if !row_used[r] && (!rows[r].is_empty() || !field.is_zero(&b[r])) {
            if rows[r].is_empty() {
                return None;
            }
        }
    }
    let mut x = vec![field.zero(); n];
    for col in 0..n {
        if let Some(r) = pivot_of_col[col] {
            x[col] = b[r].clone();
        } else {
            return None; // singular: no pivot for this column
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_polynomials() {
        let as_i64 = |v: Vec<BigInt>| -> Vec<i64> {
            v.into_iter().map(|c| i64::try_from(c).unwrap()).collect()
        };
        assert_eq!(as_i64(cyclotomic_polynomial(1)), vec![-1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(2)), vec![1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(3)), vec![1, 1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(4)), vec![1, 0, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(6)), vec![1, -1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(12)), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn root_powers_cycle() {
        for m in [1u64, 2, 3, 4, 5, 6, 12] {
            let f = CycField::new(m);
            // zeta^m = 1
            let mut acc = f.one();
            for _ in 0..m {
                acc = f.mul(&acc, &f.root(1));
            }
            assert_eq!(acc, f.one(), "m={m}");
            // sum over all m-th roots is zero for m > 1
            if m > 1 {
                let mut s = f.zero();
                for e in 0..m {
                    s = f.add(&s, &f.root(e));
                }
                assert!(f.is_zero(&s), "m={m}");
            }
        }
    }

    #[test]
    fn inverse_of_roots_and_sums() {
        let f = CycField::new(5);
        for e in 0..5 {
            let inv = f.inv(&f.root(e)).unwrap();
            assert_eq!(f.mul(&inv, &f.root(e)), f.one());
        }
        // 1 + zeta is invertible in Q(zeta_5)
        let a = f.add(&f.one(), &f.root(1));
        let inv = f.inv(&a).unwrap();
        assert_eq!(f.mul(&inv, &a), f.one());
    }

    #[test]
    fn sparse_solver_roundtrip() {
        let f = CycField::new(4);
        // [[zeta, 1], [0, 2]] x = [1 + zeta, 2]  =>  x = (1, 1 - ... )
        let entries = vec![
            (0, 0, f.root(1)),
            (0, 1, f.one()),
            (1, 1, f.add(&f.one(), &f.one())),
        ];
        let rhs = vec![f.add(&f.one(), &f.root(1)), f.add(&f.one(), &f.one())];
        let x = solve_sparse(&f, 2, entries, rhs).unwrap();
        assert_eq!(x[1], f.one());
        // zeta * x0 + 1 = 1 + zeta  =>  x0 = 1
        assert_eq!(x[0], f.one());
    }
}
