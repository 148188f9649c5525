//! Exact linear algebra over Z/M.
//!
//! Everything downstream (coboundary solving, H^2 computation, antipode
//! systems) reduces to questions about column spans of integer matrices
//! modulo M. The workhorse is [`ColumnSpace`], a Howell-style column
//! echelon over Z/p^k with combination tracking, so a single elimination
//! answers both "is c in the span, and with which witness?" and "what is
//! the kernel of the map?". General moduli are handled by CRT over prime
//! powers.

/// Reduce `x` into `0..m`.
#[inline]
pub fn umod(x: i64, m: u64) -> u64 {
    let m = m as i64;
    (((x % m) + m) % m) as u64
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g.
pub fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = egcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of `a` modulo `m`; `a` must be a unit.
pub fn inv_mod(a: u64, m: u64) -> u64 {
    let (g, x, _) = egcd(a as i64, m as i64);
    assert_eq!(g, 1, "inv_mod: {a} is not a unit mod {m}");
    umod(x, m)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Prime-power factorization of `m`, smallest prime first.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            let mut k = 0;
            while m % d == 0 {
                m /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// CRT-combine residues `(r_i, m_i)` with pairwise coprime moduli.
pub fn crt(parts: &[(u64, u64)]) -> u64 {
    let mut r: i64 = 0;
    let mut m: i64 = 1;
    for &(ri, mi) in parts {
        let (g, x, _) = egcd(m, mi as i64);
        debug_assert_eq!(g, 1);
        let l = m * mi as i64;
        let diff = umod(ri as i64 - r, mi) as i64;
        r = ((r + m * ((diff * umod(x, mi) as i64) % mi as i64)) % l + l) % l;
        m = l;
    }
    r as u64
}

/// p-adic valuation (capped at k) and unit part of x mod p^k.
#[inline]
fn val_unit(x: u64, p: u64, k: u32) -> (u32, u64) {
    if x == 0 {
        return (k, 0);
    }
    let mut v = 0;
    let mut u = x;
    while u % p == 0 {
        u /= p;
        v += 1;
    }
    (v, u)
}

/// Howell-style column echelon over Z/p^k with combination tracking.
///
/// Columns are inserted one at a time; the structure maintains a staircase
/// by topmost nonzero row with each leading entry normalized to p^v, and
/// inserts annihilator columns (p^(k-v) times a pivot column) so that
/// greedy top-down reduction is a sound and complete membership test.
/// Columns that reduce to zero yield kernel combinations as a by-product.
pub struct ColumnSpace {
    p: u64,
    k: u32,
    modulus: u64,
    ncombo: usize,
    cols: Vec<PivotCol>,
    kernel: Vec<Vec<u64>>,
}

struct PivotCol {
    lead: usize,
    val: u32,
    vec: Vec<u64>,
    combo: Vec<u64>,
}

impl ColumnSpace {
    /// `ncombo` is the number of generator columns that will be inserted.
    pub fn new(p: u64, k: u32, ncombo: usize) -> Self {
        ColumnSpace {
            p,
            k,
            modulus: p.pow(k),
            ncombo,
            cols: Vec::new(),
            kernel: Vec::new(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Insert the `idx`-th generator column (entries already reduced mod p^k).
    pub fn insert(&mut self, idx: usize, vec: Vec<u64>) {
        debug_assert!(idx < self.ncombo);
        let mut combo = vec![0u64; self.ncombo];
        combo[idx] = 1;
        self.push(vec, combo);
    }

    fn find(&self, lead: usize) -> Result<usize, usize> {
        self.cols.binary_search_by_key(&lead, |c| c.lead)
    }

    fn push(&mut self, vec: Vec<u64>, combo: Vec<u64>) {
        let m = self.modulus;
        let p = self.p;
        let mut queue = vec![(vec, combo)];
        while let Some((mut vec, mut combo)) = queue.pop() {
            let mut lead = match vec.iter().position(|&x| x != 0) {
                None => {
                    if combo.iter().any(|&c| c != 0) {
                        self.kernel.push(combo);
                    }
                    continue;
                }
                Some(i) => i,
            };
            loop {
                let (v, u) = val_unit(vec[lead], p, self.k);
                match self.find(lead) {
                    Ok(t) => {
                        if v >= self.cols[t].val {
                            let q = vec[lead] / p.pow(self.cols[t].val);
                            sub_scaled(&mut vec, &self.cols[t].vec, q, m);
                            sub_scaled(&mut combo, &self.cols[t].combo, q, m);
                            match vec.iter().skip(lead).position(|&x| x != 0) {
                                None => {
                                    if combo.iter().any(|&c| c != 0) {
                                        self.kernel.push(combo);
                                    }
                                    break;
                                }
                                Some(off) => lead += off,
                            }
                        } else {
                            // strictly better pivot: normalize and swap in
                            let ui = inv_mod(u, m);
                            scale(&mut vec, ui, m);
                            scale(&mut combo, ui, m);
                            std::mem::swap(&mut self.cols[t].vec, &mut vec);
                            std::mem::swap(&mut self.cols[t].combo, &mut combo);
                            self.cols[t].val = v;
                            if v > 0 {
                                queue.push(self.annihilator(t));
                            }
                            // displaced column keeps reducing
                            match vec.iter().position(|&x| x != 0) {
                                None => {
                                    if combo.iter().any(|&c| c != 0) {
                                        self.kernel.push(combo);
                                    }
                                    break;
                                }
                                Some(i) => lead = i,
                            }
                        }
                    }
                    Err(pos) => {
                        let ui = inv_mod(u, m);
                        scale(&mut vec, ui, m);
                        scale(&mut combo, ui, m);
                        self.cols.insert(
                            pos,
                            PivotCol {
                                lead,
                                val: v,
                                vec,
                                combo,
                            },
                        );
                        if v > 0 {
                            queue.push(self.annihilator(pos));
                        }
                        break;
                    }
                }
            }
        }
    }

    fn annihilator(&self, t: usize) -> (Vec<u64>, Vec<u64>) {
        let s = self.p.pow(self.k - self.cols[t].val);
        let m = self.modulus;
        let vec = self.cols[t].vec.iter().map(|&x| x * s % m).collect();
        let combo = self.cols[t].combo.iter().map(|&x| x * s % m).collect();
        (vec, combo)
    }

    /// Is `c` in the span? Returns the witness combination over the
    /// original generator columns if so.
    pub fn solve(&self, c: &[u64]) -> Option<Vec<u64>> {
        let m = self.modulus;
        let p = self.p;
        let mut c: Vec<u64> = c.iter().map(|&x| x % m).collect();
        let mut combo = vec![0u64; self.ncombo];
        let mut row = 0;
        while row < c.len() {
            match c.iter().skip(row).position(|&x| x != 0) {
                None => break,
                Some(off) => row += off,
            }
            let t = self.find(row).ok()?;
            let pv = p.pow(self.cols[t].val);
            if c[row] % pv != 0 {
                return None;
            }
            let q = c[row] / pv;
            sub_scaled(&mut c, &self.cols[t].vec, q, m);
            add_scaled(&mut combo, &self.cols[t].combo, q, m);
            row += 1;
        }
        if c.iter().any(|&x| x != 0) {
            None
        } else {
            Some(combo)
        }
    }

    pub fn kernel(&self) -> &[Vec<u64>] {
        &self.kernel
    }
}

#[inline]
fn sub_scaled(dst: &mut [u64], src: &[u64], q: u64, m: u64) {
    let q = q % m;
    if q == 0 {
        return;
    }
    let qn = m - q;
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = (*d + qn * s) % m;
    }
}

#[inline]
fn add_scaled(dst: &mut [u64], src: &[u64], q: u64, m: u64) {
    let q = q % m;
    if q == 0 {
        return;
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = (*d + q * s) % m;
    }
}

#[inline]
fn scale(v: &mut [u64], q: u64, m: u64) {
    for x in v.iter_mut() {
        *x = *x * q % m;
    }
}

/// Sparse column: (row, signed coefficient) pairs.
pub type SparseCol = Vec<(usize, i64)>;

/// Exact solver for A w = c over Z/M, with A given by sparse columns.
///
/// One elimination per (matrix, modulus); `solve` answers repeated
/// right-hand sides cheaply. Kernel generators come for free.
pub struct LinearSystem {
    parts: Vec<ColumnSpace>,
    moduli: Vec<u64>,
    pub ncols: usize,
}

impl LinearSystem {
    pub fn new(nrows: usize, cols: &[SparseCol], modulus: u64) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        let mut parts = Vec::new();
        let mut moduli = Vec::new();
        for (p, k) in factorize(modulus) {
            let m = p.pow(k);
            let mut cs = ColumnSpace::new(p, k, cols.len());
            for (j, col) in cols.iter().enumerate() {
                let mut dense = vec![0u64; nrows];
                for &(i, x) in col {
                    dense[i] = (dense[i] + umod(x, m)) % m;
                }
                cs.insert(j, dense);
            }
            parts.push(cs);
            moduli.push(m);
        }
        LinearSystem {
            parts,
            moduli,
            ncols: cols.len(),
        }
    }

    /// Solve A w = c mod M; returns w if consistent.
    pub fn solve(&self, c: &[u64]) -> Option<Vec<u64>> {
        let mut per: Vec<Vec<u64>> = Vec::new();
        for (cs, &m) in self.parts.iter().zip(&self.moduli) {
            let cm: Vec<u64> = c.iter().map(|&x| x % m).collect();
            per.push(cs.solve(&cm)?);
        }
        Some(self.recombine(&per))
    }

    /// Kernel generators of A mod M.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        for i in 0..self.parts.len() {
            for g in self.parts[i].kernel() {
                let per: Vec<Vec<u64>> = (0..self.parts.len())
                    .map(|j| {
                        if j == i {
                            g.clone()
                        } else {
                            vec![0u64; self.ncols]
                        }
                    })
                    .collect();
                let v = self.recombine(&per);
                if v.iter().any(|&x| x != 0) {
                    out.push(v);
                }
            }
        }
        out
    }

    fn recombine(&self, per: &[Vec<u64>]) -> Vec<u64> {
        (0..self.ncols)
            .map(|j| {
                let parts: Vec<(u64, u64)> = per
                    .iter()
                    .zip(&self.moduli)
                    .map(|(w, &m)| (w[j] % m, m))
                    .collect();
                crt(&parts)
            })
            .collect()
    }

    pub fn modulus(&self) -> u64 {
        self.moduli.iter().product()
    }
}

/// Classic integer Smith normal form for small dense matrices.
/// Returns the nonzero diagonal invariant factors. Kept as an
/// independent oracle for the elimination-based routes.
pub fn smith_normal_form(mat: &[Vec<i64>]) -> Vec<i64> {
    let rows = mat.len();
    if rows == 0 {
        return vec![];
    }
    let cols = mat[0].len();
    let mut a: Vec<Vec<i128>> = mat
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let n = rows.min(cols);
    let mut diag = Vec::new();
    let mut top = 0;
    while top < n {
        let mut pivot: Option<(usize, usize)> = None;
        for i in top..rows {
            for j in top..cols {
                if a[i][j] != 0 && pivot.map_or(true, |(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let (pi, pj) = match pivot {
            None => break,
            Some(p) => p,
        };
        a.swap(top, pi);
        for row in a.iter_mut() {
            row.swap(top, pj);
        }
        let mut clean = true;
        for i in top + 1..rows {
            let q = a[i][top] / a[top][top];
            if q != 0 {
                for j in top..cols {
                    a[i][j] -= q * a[top][j];
                }
            }
            if a[i][top] != 0 {
                clean = false;
            }
        }
        for j in top + 1..cols {
            let q = a[top][j] / a[top][top];
            if q != 0 {
                for i in top..rows {
                    a[i][j] -= q * a[i][top];
                }
            }
            if a[top][j] != 0 {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        let d = a[top][top].abs();
        let mut fixed = true;
        'outer: for i in top + 1..rows {
            for j in top + 1..cols {
                if a[i][j] % d != 0 {
                    for jj in top..cols {
                        a[top][jj] += a[i][jj];
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        diag.push(d as i64);
        top += 1;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat_vec(cols: &[SparseCol], w: &[u64], nrows: usize, m: u64) -> Vec<u64> {
        let mut out = vec![0u64; nrows];
        for (j, col) in cols.iter().enumerate() {
            for &(i, x) in col {
                out[i] = (out[i] + umod(x, m) * (w[j] % m)) % m;
            }
        }
        out
    }

    #[test]
    fn crt_roundtrip() {
        assert_eq!(crt(&[(2, 3), (3, 5)]), 8);
        assert_eq!(crt(&[(1, 2), (2, 3), (3, 5)]), 23);
    }

    #[test]
    fn solve_unit_and_valuation_pivots() {
        // [3 1] w = [1] mod 9 has the solution w = (0,1)
        let cols: Vec<SparseCol> = vec![vec![(0, 3)], vec![(0, 1)]];
        let sys = LinearSystem::new(1, &cols, 9);
        let w = sys.solve(&[1]).expect("solvable");
        assert_eq!(mat_vec(&cols, &w, 1, 9), vec![1]);
        // [3] w = [1] mod 9 is inconsistent, [3] w = [6] is not
        let cols2: Vec<SparseCol> = vec![vec![(0, 3)]];
        let sys2 = LinearSystem::new(1, &cols2, 9);
        assert!(sys2.solve(&[1]).is_none());
        assert!(sys2.solve(&[6]).is_some());
    }

    proptest! {
        #[test]
        fn solver_agrees_with_brute_force(
            modulus in prop::sample::select(vec![2u64, 3, 4, 5, 6, 8, 9, 12]),
            entries in prop::collection::vec(0i64..12, 12),
            rhs in prop::collection::vec(0i64..12, 4),
        ) {
            let nrows = 4;
            let ncols = 3;
            let cols: Vec<SparseCol> = (0..ncols)
                .map(|j| (0..nrows).map(|i| (i, entries[i * ncols + j])).collect())
                .collect();
            let sys = LinearSystem::new(nrows, &cols, modulus);
            let c: Vec<u64> = rhs.iter().map(|&x| umod(x, modulus)).collect();
            let got = sys.solve(&c);
            let mut exists = false;
            let mut w = vec![0u64; ncols];
            'outer: loop {
                if mat_vec(&cols, &w, nrows, modulus) == c {
                    exists = true;
                    break;
                }
                for j in 0..ncols {
                    w[j] += 1;
                    if w[j] < modulus {
                        continue 'outer;
                    }
                    w[j] = 0;
                }
                break;
            }
            prop_assert_eq!(got.is_some(), exists);
            if let Some(w) = got {
                prop_assert_eq!(mat_vec(&cols, &w, nrows, modulus), c);
            }
        }

        #[test]
        fn kernel_is_complete(
            modulus in prop::sample::select(vec![2u64, 3, 4, 5, 8, 9]),
            entries in prop::collection::vec(0i64..9, 6),
        ) {
            let nrows = 2;
            let ncols = 3;
            let cols: Vec<SparseCol> = (0..ncols)
                .map(|j| (0..nrows).map(|i| (i, entries[i * ncols + j])).collect())
                .collect();
            let sys = LinearSystem::new(nrows, &cols, modulus);
            let gens = sys.kernel();
            for g in &gens {
                prop_assert!(mat_vec(&cols, g, nrows, modulus).iter().all(|&x| x == 0));
            }
            let mut span = std::collections::HashSet::new();
            span.insert(vec![0u64; ncols]);
            let mut frontier: Vec<Vec<u64>> = vec![vec![0u64; ncols]];
            while let Some(x) = frontier.pop() {
                for g in &gens {
                    let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % modulus).collect();
                    if span.insert(y.clone()) {
                        frontier.push(y);
                    }
                }
            }
            let mut w = vec![0u64; ncols];
            'outer: loop {
                if mat_vec(&cols, &w, nrows, modulus).iter().all(|&x| x == 0) {
                    prop_assert!(span.contains(&w), "missing kernel element {:?}", w);
                }
                for j in 0..ncols {
                    w[j] += 1;
                    if w[j] < modulus {
                        continue 'outer;
                    }
                    w[j] = 0;
                }
                break;
            }
        }
    }

    #[test]
    fn snf_small() {
        let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]];
        let d = smith_normal_form(&m);
        assert_eq!(d, vec![2, 2, 156]);
    }
}
