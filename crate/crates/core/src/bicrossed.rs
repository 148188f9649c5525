//! Matched pairs of finite groups, cocycle pairs, and the bicrossed
//! product Hopf algebra k^Gamma tau#_sigma kF.
//!
//! Scalars in structure constants are exponents of a fixed primitive M-th
//! root of unity; a product of two basis elements is a root of unity
//! times one basis element, and a coproduct has exactly |Gamma| monomial
//! terms, so every bialgebra axiom is checked by exact exponent
//! arithmetic. Only the antipode (a convolution-inverse linear solve)
//! needs the cyclotomic field.

use std::sync::Arc;

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::cochain::Cochain;
use crate::cyclotomic::{solve_sparse, CycField};
use crate::error::Error;
use crate::group::{Elt, FiniteGroup, GroupAction, Subgroup};
use crate::modular::umod;

/// Two groups with mutual actions: rhd is Gamma acting on F on the left,
/// lhd is F acting on Gamma on the right.
#[derive(Clone, Debug)]
pub struct MatchedPair {
    pub f: Arc<FiniteGroup>,
    pub gamma: Arc<FiniteGroup>,
    pub rhd: GroupAction,
    pub lhd: GroupAction,
}

impl MatchedPair {
    pub fn new(
        f: Arc<FiniteGroup>,
        gamma: Arc<FiniteGroup>,
        rhd: GroupAction,
        lhd: GroupAction,
    ) -> Result<Self, Error> {
        if !Arc::ptr_eq(&rhd.actor, &gamma)
            || !Arc::ptr_eq(&rhd.space, &f)
            || !Arc::ptr_eq(&lhd.actor, &f)
            || !Arc::ptr_eq(&lhd.space, &gamma)
            || rhd.right
            || !lhd.right
        {
            return Err(Error::Group("matched pair actions have wrong shape".into()));
        }
        let mp = MatchedPair { f, gamma, rhd, lhd };
        mp.verify()?;
        Ok(mp)
    }

    #[inline]
    pub fn rhd(&self, s: Elt, x: Elt) -> Elt {
        self.rhd.apply(s, x)
    }

    #[inline]
    pub fn lhd(&self, s: Elt, x: Elt) -> Elt {
        self.lhd.apply(x, s)
    }

    /// Both compatibility identities, exhaustively.
    pub fn verify(&self) -> Result<(), Error> {
        let (f, gamma) = (&self.f, &self.gamma);
        for s in gamma.elements() {
            if self.rhd(s, f.identity()) != f.identity() {
                return Err(Error::Verification(format!(
                    "s > 1 != 1 at s = {}",
                    gamma.label(s)
                )));
            }
        }
        for x in f.elements() {
            if self.lhd(gamma.identity(), x) != gamma.identity() {
                return Err(Error::Verification(format!(
                    "1 < x != 1 at x = {}",
                    f.label(x)
                )));
            }
        }
        for s in gamma.elements() {
            for x in f.elements() {
                for y in f.elements() {
                    // s > (xy) = (s > x)((s < x) > y)
                    let lhs = self.rhd(s, f.mul(x, y));
                    let rhs = f.mul(self.rhd(s, x), self.rhd(self.lhd(s, x), y));
                    if lhs != rhs {
                        return Err(Error::Verification(format!(
                            "first matched-pair identity fails at (s, x, y) = ({}, {}, {})",
                            gamma.label(s),
                            f.label(x),
                            f.label(y)
                        )));
                    }
                }
                for t in gamma.elements() {
                    // (st) < x = (s < (t > x))(t < x)
                    let lhs = self.lhd(gamma.mul(s, t), x);
                    let rhs = gamma.mul(self.lhd(s, self.rhd(t, x)), self.lhd(t, x));
                    if lhs != rhs {
                        return Err(Error::Verification(format!(
                            "second matched-pair identity fails at (s, t, x) = ({}, {}, {})",
                            gamma.label(s),
                            gamma.label(t),
                            f.label(x)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The group F |><| Gamma on F x Gamma with
    /// (x, s)(y, t) = (x (s > y), (s < y) t), together with the embedded
    /// images of F and Gamma (which form an exact factorization).
    pub fn double_group(&self) -> Result<DoubleGroup, Error> {
        let (f, gamma) = (&self.f, &self.gamma);
        let (nf, ng) = (f.order(), gamma.order());
        let n = nf * ng;
        let idx = |x: Elt, s: Elt| x as usize * ng + s as usize;
        let mut mul = vec![0 as Elt; n * n];
        for x in f.elements() {
            for s in gamma.elements() {
                for y in f.elements() {
                    for t in gamma.elements() {
                        let xf = f.mul(x, self.rhd(s, y));
                        let sg = gamma.mul(self.lhd(s, y), t);
                        mul[idx(x, s) * n + idx(y, t)] = idx(xf, sg) as Elt;
                    }
                }
            }
        }
        let mut labels = vec![String::new(); n];
        for x in f.elements() {
            for s in gamma.elements() {
                let lx = f.label(x);
                let ls = gamma.label(s);
                labels[idx(x, s)] = match (lx == "e", ls == "e") {
                    (true, true) => "e".to_string(),
                    (true, false) => ls.to_string(),
                    (false, true) => lx.to_string(),
                    (false, false) => format!("{lx} {ls}"),
                };
            }
        }
        let group = Arc::new(FiniteGroup::from_table(mul, labels, None)?);
        let f_image = Subgroup::new(
            group.clone(),
            f.elements().map(|x| idx(x, gamma.identity()) as Elt).collect(),
        )?;
        let gamma_image = Subgroup::new(
            group.clone(),
            gamma.elements().map(|s| idx(s0(), s) as Elt).collect(),
        )?;
        fn s0() -> Elt {
            0
        }
        // identity of F must be index 0 for the gamma embedding above
        debug_assert_eq!(self.f.identity(), 0);
        Ok(DoubleGroup {
            group,
            f_image,
            gamma_image,
            nf,
            ng,
        })
    }

    /// The transpose matched pair (Gamma, F): u >' s = s < u and
    /// u <' s = s > u. The matched-pair identities swap into each other,
    /// and the dual bicrossed product lives on this pair with the roles
    /// of sigma and tau reversed.
    pub fn mirror(&self) -> Result<MatchedPair, Error> {
        let (f, gamma) = (&self.f, &self.gamma);
        let ng = gamma.order();
        let nf = f.order();
        // rhd_m: Gamma_m = F acts on F_m = Gamma
        let mut rhd_m = vec![0 as Elt; nf * ng];
        // lhd_m: right action of F_m = Gamma on Gamma_m = F
        let mut lhd_m = vec![0 as Elt; ng * nf];
        for u in f.elements() {
            for s in gamma.elements() {
                rhd_m[u as usize * ng + s as usize] = self.lhd(s, u);
                lhd_m[s as usize * nf + u as usize] = self.rhd(s, u);
            }
        }
        MatchedPair::new(
            gamma.clone(),
            f.clone(),
            GroupAction::new(f.clone(), gamma.clone(), rhd_m, false)?,
            GroupAction::new(gamma.clone(), f.clone(), lhd_m, true)?,
        )
    }
}

/// double_group output: the group with the two embedded factors.
#[derive(Clone, Debug)]
pub struct DoubleGroup {
    pub group: Arc<FiniteGroup>,
    pub f_image: Subgroup,
    pub gamma_image: Subgroup,
    nf: usize,
    ng: usize,
}

impl DoubleGroup {
    /// Decompose a group element as (x, s) with g = x.s.
    #[inline]
    pub fn parts(&self, g: Elt) -> (Elt, Elt) {
        ((g as usize / self.ng) as Elt, (g as usize % self.ng) as Elt)
    }

    #[inline]
    pub fn compose(&self, x: Elt, s: Elt) -> Elt {
        (x as usize * self.ng + s as usize) as Elt
    }
}

/// The pair (sigma, tau): sigma_s(x, y) and tau_x(s, t) as exponent
/// tables mod M.
#[derive(Clone, Debug)]
pub struct CocyclePair {
    pub modulus: u64,
    nf: usize,
    ng: usize,
    /// sigma[(s * nf + x) * nf + y]
    sigma: Vec<u64>,
    /// tau[(x * ng + s) * ng + t]
    tau: Vec<u64>,
}

impl CocyclePair {
    pub fn trivial(mp: &MatchedPair, modulus: u64) -> Self {
        let (nf, ng) = (mp.f.order(), mp.gamma.order());
        CocyclePair {
            modulus,
            nf,
            ng,
            sigma: vec![0; ng * nf * nf],
            tau: vec![0; nf * ng * ng],
        }
    }

    pub fn from_fns<FS, FT>(mp: &MatchedPair, modulus: u64, sigma: FS, tau: FT) -> Self
    where
        FS: Fn(Elt, Elt, Elt) -> i64,
        FT: Fn(Elt, Elt, Elt) -> i64,
    {
        let mut cp = CocyclePair::trivial(mp, modulus);
        for s in mp.gamma.elements() {
            for x in mp.f.elements() {
                for y in mp.f.elements() {
                    let v = if s == mp.gamma.identity()
                        || x == mp.f.identity()
                        || y == mp.f.identity()
                    {
                        0
                    } else {
                        umod(sigma(s, x, y), modulus)
                    };
                    cp.sigma[(s as usize * cp.nf + x as usize) * cp.nf + y as usize] = v;
                }
            }
        }
        for x in mp.f.elements() {
            for s in mp.gamma.elements() {
                for t in mp.gamma.elements() {
                    let v = if x == mp.f.identity()
                        || s == mp.gamma.identity()
                        || t == mp.gamma.identity()
                    {
                        0
                    } else {
                        umod(tau(x, s, t), modulus)
                    };
                    cp.tau[(x as usize * cp.ng + s as usize) * cp.ng + t as usize] = v;
                }
            }
        }
        cp
    }

    #[inline]
    pub fn sigma(&self, s: Elt, x: Elt, y: Elt) -> u64 {
        self.sigma[(s as usize * self.nf + x as usize) * self.nf + y as usize]
    }

    #[inline]
    pub fn tau(&self, x: Elt, s: Elt, t: Elt) -> u64 {
        self.tau[(x as usize * self.ng + s as usize) * self.ng + t as usize]
    }

    pub fn set_sigma(&mut self, s: Elt, x: Elt, y: Elt, v: u64) {
        self.sigma[(s as usize * self.nf + x as usize) * self.nf + y as usize] =
            v % self.modulus;
    }

    pub fn set_tau(&mut self, x: Elt, s: Elt, t: Elt, v: u64) {
        self.tau[(x as usize * self.ng + s as usize) * self.ng + t as usize] = v % self.modulus;
    }

    /// The swapped pair for the mirror matched pair: sigma and tau trade
    /// roles (dual realization).
    pub fn mirror(&self, mp: &MatchedPair) -> CocyclePair {
        // mirror pair has F_m = gamma, Gamma_m = f
        let _ = mp;
        CocyclePair {
            modulus: self.modulus,
            nf: self.ng,
            ng: self.nf,
            sigma: {
                // sigma_m indexed [s_m in Gamma_m = F][x_m, y_m in F_m = Gamma]
                let mut v = vec![0u64; self.nf * self.ng * self.ng];
                for s in 0..self.nf {
                    for x in 0..self.ng {
                        for y in 0..self.ng {
                            v[(s * self.ng + x) * self.ng + y] =
                                self.tau(s as Elt, x as Elt, y as Elt);
                        }
                    }
                }
                v
            },
            tau: {
                let mut v = vec![0u64; self.ng * self.nf * self.nf];
                for x in 0..self.ng {
                    for s in 0..self.nf {
                        for t in 0..self.nf {
                            v[(x * self.nf + s) * self.nf + t] =
                                self.sigma(x as Elt, s as Elt, t as Elt);
                        }
                    }
                }
                v
            },
        }
    }
}

/// Result of checking the five cocycle-pair conditions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleReport {
    pub conditions: Vec<ConditionResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionResult {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

impl CocycleReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }
}

/// Check the five conditions making the bicrossed product a Hopf algebra:
/// the sigma 2-cocycle identity, sigma normalization, the tau 2-cocycle
/// identity, tau normalization, and the compatibility condition.
pub fn verify_cocycle_pair(mp: &MatchedPair, cp: &CocyclePair) -> CocycleReport {
    let (f, gamma) = (&mp.f, &mp.gamma);
    let m = cp.modulus;
    let mut conditions = Vec::new();

    // sigma cocycle: sigma_{s<x}(y,z) + sigma_s(x,yz) = sigma_s(xy,z) + sigma_s(x,y)
    let mut witness = None;
    'a: for s in gamma.elements() {
        for x in f.elements() {
            for y in f.elements() {
                for z in f.elements() {
                    let lhs = (cp.sigma(mp.lhd(s, x), y, z) + cp.sigma(s, x, f.mul(y, z))) % m;
                    let rhs = (cp.sigma(s, f.mul(x, y), z) + cp.sigma(s, x, y)) % m;
                    if lhs != rhs {
                        witness = Some(format!(
                            "(s, x, y, z) = ({}, {}, {}, {})",
                            gamma.label(s),
                            f.label(x),
                            f.label(y),
                            f.label(z)
                        ));
                        break 'a;
                    }
                }
            }
        }
    }
    conditions.push(ConditionResult {
        name: "sigma-cocycle".into(),
        passed: witness.is_none(),
        witness,
    });

    // sigma normalized: zero whenever s = 1, x = 1 or y = 1
    let mut witness = None;
    'b: for s in gamma.elements() {
        for x in f.elements() {
            for y in f.elements() {
                if s != gamma.identity() && x != f.identity() && y != f.identity() {
                    continue;
                }
                if cp.sigma(s, x, y) != 0 {
                    witness = Some(format!(
                        "sigma not normalized at ({}, {}, {})",
                        gamma.label(s),
                        f.label(x),
                        f.label(y)
                    ));
                    break 'b;
                }
            }
        }
    }
    conditions.push(ConditionResult {
        name: "sigma-normalized".into(),
        passed: witness.is_none(),
        witness,
    });

    // tau cocycle: tau_x(st,u) + tau_{u>x}(s,t) = tau_x(s,tu) + tau_x(t,u)
    let mut witness = None;
    'c: for x in f.elements() {
        for s in gamma.elements() {
            for t in gamma.elements() {
                for u in gamma.elements() {
                    let lhs = (cp.tau(x, gamma.mul(s, t), u) + cp.tau(mp.rhd(u, x), s, t)) % m;
                    let rhs = (cp.tau(x, s, gamma.mul(t, u)) + cp.tau(x, t, u)) % m;
                    if lhs != rhs {
                        witness = Some(format!(
                            "(x, s, t, u) = ({}, {}, {}, {})",
                            f.label(x),
                            gamma.label(s),
                            gamma.label(t),
                            gamma.label(u)
                        ));
                        break 'c;
                    }
                }
            }
        }
    }
    conditions.push(ConditionResult {
        name: "tau-cocycle".into(),
        passed: witness.is_none(),
        witness,
    });

    // tau normalized: zero whenever x = 1, s = 1 or t = 1
    let mut witness = None;
    'd: for x in f.elements() {
        for s in gamma.elements() {
            for t in gamma.elements() {
                if x != f.identity() && s != gamma.identity() && t != gamma.identity() {
                    continue;
                }
                if cp.tau(x, s, t) != 0 {
                    witness = Some(format!(
                        "tau not normalized at ({}, {}, {})",
                        f.label(x),
                        gamma.label(s),
                        gamma.label(t)
                    ));
                    break 'd;
                }
            }
        }
    }
    conditions.push(ConditionResult {
        name: "tau-normalized".into(),
        passed: witness.is_none(),
        witness,
    });

    // compatibility
    let mut witness = None;
    'e: for s in gamma.elements() {
        for t in gamma.elements() {
            for x in f.elements() {
                for y in f.elements() {
                    let lhs = (cp.sigma(gamma.mul(s, t), x, y) + cp.tau(f.mul(x, y), s, t)) % m;
                    let tx = mp.rhd(t, x);
                    let rhs = (cp.sigma(s, tx, mp.rhd(mp.lhd(t, x), y))
                        + cp.sigma(t, x, y)
                        + cp.tau(x, s, t)
                        + cp.tau(y, mp.lhd(s, tx), mp.lhd(t, x)))
                        % m;
                    if lhs != rhs {
                        witness = Some(format!(
                            "(s, t, x, y) = ({}, {}, {}, {})",
                            gamma.label(s),
                            gamma.label(t),
                            f.label(x),
                            f.label(y)
                        ));
                        break 'e;
                    }
                }
            }
        }
    }
    conditions.push(ConditionResult {
        name: "compatibility".into(),
        passed: witness.is_none(),
        witness,
    });

    CocycleReport { conditions }
}

/// Basis-indexed structure constants of k^Gamma tau#_sigma kF.
pub struct BicrossedProduct {
    pub mp: MatchedPair,
    pub cp: CocyclePair,
    pub dim: usize,
    /// basis label strings e_s # x
    pub basis_labels: Vec<String>,
    /// mult[b1 * dim + b2]: the product is zero or a monomial
    mult: Vec<Option<(u64, u32)>>,
    /// comult[b]: |Gamma| terms (exponent, left basis, right basis)
    comult: Vec<Vec<(u64, u32, u32)>>,
}

impl BicrossedProduct {
    /// basis index of e_s # x
    #[inline]
    pub fn basis(&self, s: Elt, x: Elt) -> u32 {
        (s as usize * self.mp.f.order() + x as usize) as u32
    }

    #[inline]
    pub fn basis_parts(&self, b: u32) -> (Elt, Elt) {
        let nf = self.mp.f.order();
        ((b as usize / nf) as Elt, (b as usize % nf) as Elt)
    }

    #[inline]
    pub fn product(&self, b1: u32, b2: u32) -> Option<(u64, u32)> {
        self.mult[b1 as usize * self.dim + b2 as usize]
    }

    pub fn coproduct(&self, b: u32) -> &[(u64, u32, u32)] {
        &self.comult[b as usize]
    }

    pub fn counit(&self, b: u32) -> bool {
        let (s, _) = self.basis_parts(b);
        s == self.mp.gamma.identity()
    }

    pub fn modulus(&self) -> u64 {
        self.cp.modulus
    }
}

/// Build the bicrossed product; the matched pair and cocycle pair are
/// verified first and the violating condition aborts the build.
pub fn build_bicrossed(mp: &MatchedPair, cp: &CocyclePair) -> Result<BicrossedProduct, Error> {
    mp.verify()?;
    let report = verify_cocycle_pair(mp, cp);
    if !report.all_passed() {
        let failed: Vec<String> = report
            .conditions
            .iter()
            .filter(|c| !c.passed)
            .map(|c| {
                format!(
                    "{} ({})",
                    c.name,
                    c.witness.clone().unwrap_or_default()
                )
            })
            .collect();
        return Err(Error::Verification(format!(
            "cocycle pair conditions failed: {}",
            failed.join("; ")
        )));
    }
    let (f, gamma) = (&mp.f, &mp.gamma);
    let (nf, ng) = (f.order(), gamma.order());
    let dim = nf * ng;
    let basisq = |s: Elt, x: Elt| (s as usize * nf + x as usize) as u32;
    let mut mult = vec![None; dim * dim];
    for g in gamma.elements() {
        for x in f.elements() {
            for h in gamma.elements() {
                for y in f.elements() {
                    // (e_g # x)(e_h # y) = [g < x = h] sigma_g(x, y) e_g # xy
                    if mp.lhd(g, x) == h {
                        let e = cp.sigma(g, x, y);
                        mult[basisq(g, x) as usize * dim + basisq(h, y) as usize] =
                            Some((e, basisq(g, f.mul(x, y))));
                    }
                }
            }
        }
    }
    let mut comult = vec![Vec::new(); dim];
    for g in gamma.elements() {
        for x in f.elements() {
            let mut terms = Vec::with_capacity(ng);
            for s in gamma.elements() {
                // t with st = g
                let t = gamma.mul(gamma.inv(s), g);
                terms.push((cp.tau(x, s, t), basisq(s, mp.rhd(t, x)), basisq(t, x)));
            }
            comult[basisq(g, x) as usize] = terms;
        }
    }
    let mut basis_labels = vec![String::new(); dim];
    for s in gamma.elements() {
        for x in f.elements() {
            basis_labels[basisq(s, x) as usize] =
                format!("e_{{{}}} # {}", gamma.label(s), f.label(x));
        }
    }
    Ok(BicrossedProduct {
        mp: mp.clone(),
        cp: cp.clone(),
        dim,
        basis_labels,
        mult,
        comult,
    })
}

/// The image of the extension class in H^3 of the double group:
/// omega(x s, y t, z u) = sigma_s(y, t > z) + tau_z(s < y, t).
pub fn kac_omega(mp: &MatchedPair, cp: &CocyclePair, dg: &DoubleGroup) -> Cochain {
    Cochain::from_fn(dg.group.clone(), 3, cp.modulus, |args| {
        let (_, s1) = dg.parts(args[0]);
        let (x2, s2) = dg.parts(args[1]);
        let (x3, _) = dg.parts(args[2]);
        (cp.sigma(s1, x2, mp.rhd(s2, x3)) + cp.tau(x3, mp.lhd(s1, x2), s2)) as i64
    })
}

// ---------------------------------------------------------------------
// Hopf verification
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopfReport {
    pub associative: ConditionResult,
    pub unit: ConditionResult,
    pub coassociative: ConditionResult,
    pub counit: ConditionResult,
    pub counit_algebra_map: ConditionResult,
    pub comult_multiplicative: ConditionResult,
    pub antipode: AntipodeStatus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum AntipodeStatus {
    /// Found and verified two-sided; the matrix is in cyclotomic
    /// coordinate form, S(basis j) = sum_i entries[j][i] basis i.
    Found { matrix: Vec<Vec<Vec<String>>> },
    /// Dimension exceeded the configured cap; bialgebra axioms only.
    SkippedByCap { dim: usize, cap: usize },
    NotFound { reason: String },
}

impl HopfReport {
    pub fn bialgebra_ok(&self) -> bool {
        self.associative.passed
            && self.unit.passed
            && self.coassociative.passed
            && self.counit.passed
            && self.counit_algebra_map.passed
            && self.comult_multiplicative.passed
    }

    pub fn antipode_ok(&self) -> bool {
        matches!(self.antipode, AntipodeStatus::Found { .. })
    }
}

fn pass(name: &str) -> ConditionResult {
    ConditionResult {
        name: name.into(),
        passed: true,
        witness: None,
    }
}

fn fail(name: &str, witness: String) -> ConditionResult {
    ConditionResult {
        name: name.into(),
        passed: false,
        witness: Some(witness),
    }
}

/// Check associativity, unit, coassociativity, counit laws, bialgebra
/// compatibility, and compute the antipode as the two-sided convolution
/// inverse of the identity by exact linear solving (dim <= cap).
pub fn verify_hopf(b: &BicrossedProduct, antipode_cap: usize) -> HopfReport {
    let dim = b.dim as u32;
    let m = b.modulus();

    // associativity on all basis triples
    let mut assoc = pass("associative");
    'assoc: for x in 0..dim {
        for y in 0..dim {
            for z in 0..dim {
                let lhs = b
                    .product(x, y)
                    .and_then(|(e1, xy)| b.product(xy, z).map(|(e2, r)| ((e1 + e2) % m, r)));
                let rhs = b
                    .product(y, z)
                    .and_then(|(e1, yz)| b.product(x, yz).map(|(e2, r)| ((e1 + e2) % m, r)));
                if lhs != rhs {
                    assoc = fail(
                        "associative",
                        format!(
                            "({}, {}, {})",
                            b.basis_labels[x as usize],
                            b.basis_labels[y as usize],
                            b.basis_labels[z as usize]
                        ),
                    );
                    break 'assoc;
                }
            }
        }
    }

    // two-sided unit: 1 = sum_s e_s # 1
    let mut unit = pass("unit");
    let f_id = b.mp.f.identity();
    'unit: for y in 0..dim {
        // 1 * e_y: sum over s of (e_s#1)(b_y): exactly one nonzero term
        let mut left: Vec<(u64, u32)> = Vec::new();
        let mut right: Vec<(u64, u32)> = Vec::new();
        for s in b.mp.gamma.elements() {
            let one_b = b.basis(s, f_id);
            if let Some(t) = b.product(one_b, y) {
                left.push(t);
            }
            if let Some(t) = b.product(y, one_b) {
                right.push(t);
            }
        }
        if left != vec![(0, y)] || right != vec![(0, y)] {
            unit = fail("unit", b.basis_labels[y as usize].clone());
            break 'unit;
        }
    }

    // coassociativity: term-by-term comparison of basis-triple maps
    let mut coassoc = pass("coassociative");
    'coassoc: for x in 0..dim {
        let mut lhs: std::collections::BTreeMap<(u32, u32, u32), u64> = Default::default();
        let mut rhs = lhs.clone();
        for &(e1, l, r) in b.coproduct(x) {
            for &(e2, ll, lr) in b.coproduct(l) {
                *lhs.entry((ll, lr, r)).or_insert(0) += e1 + e2;
            }
            for &(e2, rl, rr) in b.coproduct(r) {
                *rhs.entry((l, rl, rr)).or_insert(0) += e1 + e2;
            }
        }
        let norm = |map: std::collections::BTreeMap<(u32, u32, u32), u64>| {
            map.into_iter().map(|(k, v)| (k, v % m)).collect::<Vec<_>>()
        };
        if norm(lhs) != norm(rhs) {
            coassoc = fail("coassociative", b.basis_labels[x as usize].clone());
            break 'coassoc;
        }
    }

    // counit laws: (eps x id) Delta = id = (id x eps) Delta
    let mut counit = pass("counit");
    'counit: for x in 0..dim {
        let mut left: Vec<(u64, u32)> = Vec::new();
        let mut right: Vec<(u64, u32)> = Vec::new();
        for &(e, l, r) in b.coproduct(x) {
            if b.counit(l) {
                left.push((e % m, r));
            }
            if b.counit(r) {
                right.push((e % m, l));
            }
        }
        if left != vec![(0, x)] || right != vec![(0, x)] {
            counit = fail("counit", b.basis_labels[x as usize].clone());
            break 'counit;
        }
    }

    // eps is an algebra map
    let mut counit_alg = pass("counit-algebra-map");
    'calg: for x in 0..dim {
        for y in 0..dim {
            let lhs = match b.product(x, y) {
                Some((e, r)) if b.counit(r) => Some(e % m),
                _ => None,
            };
            let rhs = if b.counit(x) && b.counit(y) {
                Some(0)
            } else {
                None
            };
            if lhs != rhs {
                counit_alg = fail(
                    "counit-algebra-map",
                    format!(
                        "({}, {})",
                        b.basis_labels[x as usize], b.basis_labels[y as usize]
                    ),
                );
                break 'calg;
            }
        }
    }

    // Delta is an algebra map: Delta(xy) = Delta(x) Delta(y); both sides
    // are monomial-indexed by the output basis pair
    let mut comult_mult = pass("comult-multiplicative");
    'cmul: for x in 0..dim {
        for y in 0..dim {
            let mut lhs: std::collections::BTreeMap<(u32, u32), u64> = Default::default();
            if let Some((e, xy)) = b.product(x, y) {
                for &(e2, l, r) in b.coproduct(xy) {
                    *lhs.entry((l, r)).or_insert(0) += (e + e2) % m;
                }
            }
            let mut rhs: std::collections::BTreeMap<(u32, u32), u64> = Default::default();
            for &(e1, l1, r1) in b.coproduct(x) {
                for &(e2, l2, r2) in b.coproduct(y) {
                    if let (Some((el, l)), Some((er, r))) =
                        (b.product(l1, l2), b.product(r1, r2))
                    {
                        *rhs.entry((l, r)).or_insert(0) += (e1 + e2 + el + er) % m;
                    }
                }
            }
            let norm = |map: std::collections::BTreeMap<(u32, u32), u64>| {
                map.into_iter()
                    .map(|(k, v)| (k, v % m))
                    .collect::<Vec<_>>()
            };
            if norm(lhs) != norm(rhs) {
                comult_mult = fail(
                    "comult-multiplicative",
                    format!(
                        "({}, {})",
                        b.basis_labels[x as usize], b.basis_labels[y as usize]
                    ),
                );
                break 'cmul;
            }
        }
    }

    let antipode = if b.dim > antipode_cap {
        AntipodeStatus::SkippedByCap {
            dim: b.dim,
            cap: antipode_cap,
        }
    } else {
        compute_antipode(b)
    };

    HopfReport {
        associative: assoc,
        unit,
        coassociative: coassoc,
        counit,
        counit_algebra_map: counit_alg,
        comult_multiplicative: comult_mult,
        antipode,
    }
}

/// Solve m (id x S) Delta = u eps for S by exact linear algebra over
/// Q(zeta_M) and verify both antipode axioms; nothing about the shape of
/// S is assumed.
fn compute_antipode(b: &BicrossedProduct) -> AntipodeStatus {
    let field = CycField::new(b.modulus());
    let dim = b.dim;
    let ng = b.mp.gamma.order();
    let nf = b.mp.f.order();
    // unknowns grouped by the F-part x of the argument: S(e_t # x)
    let mut s_matrix: Vec<Vec<Vec<BigRational>>> = vec![vec![field.zero(); dim]; dim];
    for x in b.mp.f.elements() {
        // unknowns: (t, h) -> coefficient of basis h in S(e_t # x)
        let n = ng * dim;
        let unk = |t: Elt, h: u32| t as usize * dim + h as usize;
        let mut entries: Vec<(usize, usize, Vec<BigRational>)> = Vec::new();
        let mut rhs = vec![field.zero(); n];
        // equations: for g in Gamma and output basis c:
        //   sum_{st=g} tau_x(s,t) (e_s # (t>x)) S(e_t # x) = [g=1][x' = 1] 1
        for g in b.mp.gamma.elements() {
            for s in b.mp.gamma.elements() {
                let t = b.mp.gamma.mul(b.mp.gamma.inv(s), g);
                let tau = b.cp.tau(x, s, t);
                let left = b.basis(s, b.mp.rhd(t, x));
                // (e_s # w) e_h # y = [s<w = h] sigma_s(w,y) e_s # (w y):
                // contributes to rows (g, output basis)
                for h in 0..dim as u32 {
                    if let Some((e, out)) = b.product(left, h) {
                        let row = g as usize * dim + out as usize;
                        entries.push((row, unk(t, h), field.root((tau + e) % b.modulus())));
                    }
                }
            }
            if g == b.mp.gamma.identity() {
                // unit element: sum_h e_h # 1
                for s2 in b.mp.gamma.elements() {
                    let one_b = b.basis(s2, b.mp.f.identity());
                    let row = g as usize * dim + one_b as usize;
                    rhs[row] = field.one();
                }
            }
        }
        let sol = match solve_sparse(&field, n, entries, rhs) {
            Some(s) => s,
            None => {
                return AntipodeStatus::NotFound {
                    reason: format!(
                        "convolution-inverse system is singular on the x = {} block",
                        b.mp.f.label(x)
                    ),
                }
            }
        };
        for t in b.mp.gamma.elements() {
            let col = b.basis(t, x) as usize;
            for h in 0..dim {
                s_matrix[col][h] = sol[unk(t, h as u32)].clone();
            }
        }
        let _ = nf;
    }
    // verify both axioms: sum S(x1) x2 = eps(x) 1 = sum x1 S(x2)
    let one_vec = {
        let mut v = vec![field.zero(); dim];
        for s in b.mp.gamma.elements() {
            v[b.basis(s, b.mp.f.identity()) as usize] = field.one();
        }
        v
    };
    for bb in 0..dim as u32 {
        let mut left = vec![field.zero(); dim];
        let mut right = vec![field.zero(); dim];
        for &(e, l, r) in b.coproduct(bb) {
            // S(l) * r
            for h in 0..dim {
                if field.is_zero(&s_matrix[l as usize][h]) {
                    continue;
                }
                if let Some((e2, out)) = b.product(h as u32, r) {
                    let c = field.mul(&s_matrix[l as usize][h], &field.root((e + e2) % b.modulus()));
                    left[out as usize] = field.add(&left[out as usize], &c);
                }
            }
            // l * S(r)
            for h in 0..dim {
                if field.is_zero(&s_matrix[r as usize][h]) {
                    continue;
                }
                if let Some((e2, out)) = b.product(l, h as u32) {
                    let c = field.mul(&s_matrix[r as usize][h], &field.root((e + e2) % b.modulus()));
                    right[out as usize] = field.add(&right[out as usize], &c);
                }
            }
        }
        let expect: Vec<_> = if b.counit(bb) {
            one_vec.clone()
        } else {
            vec![field.zero(); dim]
        };
        for h in 0..dim {
            if !field.is_zero(&field.sub(&left[h], &expect[h]))
                || !field.is_zero(&field.sub(&right[h], &expect[h]))
            {
                return AntipodeStatus::NotFound {
                    reason: format!(
                        "candidate antipode violates an axiom at {}",
                        b.basis_labels[bb as usize]
                    ),
                };
            }
        }
    }
    let matrix = s_matrix
        .iter()
        .map(|col| {
            col.iter()
                .map(|c| c.iter().map(|q| q.to_string()).collect())
                .collect()
        })
        .collect();
    AntipodeStatus::Found { matrix }
}

/// Anti-homomorphism spot checks for a found antipode (sampled basis
/// pairs): S(ab) = S(b)S(a) and Delta(S(b)) = (S x S)(flip Delta(b)).
pub fn antipode_spot_checks(b: &BicrossedProduct, report: &HopfReport, samples: usize) -> bool {
    let matrix = match &report.antipode {
        AntipodeStatus::Found { matrix } => matrix,
        _ => return false,
    };
    let field = CycField::new(b.modulus());
    let dim = b.dim;
    let parse: Vec<Vec<Vec<BigRational>>> = matrix
        .iter()
        .map(|col| {
            col.iter()
                .map(|c| {
                    c.iter()
                        .map(|s| s.parse::<BigRational>().expect("rational"))
                        .collect()
                })
                .collect()
        })
        .collect();
    let s_apply = |v: &[Vec<BigRational>]| -> Vec<Vec<BigRational>> {
        let mut out = vec![field.zero(); dim];
        for (j, c) in v.iter().enumerate() {
            if field.is_zero(c) {
                continue;
            }
            for h in 0..dim {
                if field.is_zero(&parse[j][h]) {
                    continue;
                }
                let t = field.mul(c, &parse[j][h]);
                out[h] = field.add(&out[h], &t);
            }
        }
        out
    };
    let mul_vec = |a: &[Vec<BigRational>], c: &[Vec<BigRational>]| -> Vec<Vec<BigRational>> {
        let mut out = vec![field.zero(); dim];
        for (i, x) in a.iter().enumerate() {
            if field.is_zero(x) {
                continue;
            }
            for (j, y) in c.iter().enumerate() {
                if field.is_zero(y) {
                    continue;
                }
                if let Some((e, r)) = b.product(i as u32, j as u32) {
                    let t = field.mul(&field.mul(x, y), &field.root(e));
                    out[r as usize] = field.add(&out[r as usize], &t);
                }
            }
        }
        out
    };
    let basis_vec = |i: u32| -> Vec<Vec<BigRational>> {
        let mut v = vec![field.zero(); dim];
        v[i as usize] = field.one();
        v
    };
    let mut state = 0x243f6a8885a308d3u64;
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 33) as usize % dim) as u32
    };
    for _ in 0..samples {
        let (i, j) = (next(), next());
        // S(ab) = S(b) S(a)
        let lhs = match b.product(i, j) {
            Some((e, r)) => {
                let v = s_apply(&basis_vec(r));
                v.iter().map(|c| field.mul(c, &field.root(e))).collect::<Vec<_>>()
            }
            None => vec![field.zero(); dim],
        };
        let rhs = mul_vec(&s_apply(&basis_vec(j)), &s_apply(&basis_vec(i)));
        for h in 0..dim {
            if !field.is_zero(&field.sub(&lhs[h], &rhs[h])) {
                return false;
            }
        }
        // Delta(S(b)) = (S x S)(flip Delta(b)) on basis i
        let sb = s_apply(&basis_vec(i));
        let mut lhs: std::collections::BTreeMap<(u32, u32), Vec<BigRational>> = Default::default();
        for (k, c) in sb.iter().enumerate() {
            if field.is_zero(c) {
                continue;
            }
            for &(e, l, r) in b.coproduct(k as u32) {
                let t = field.mul(c, &field.root(e));
                let slot = lhs.entry((l, r)).or_insert_with(|| field.zero());
                *slot = field.add(slot, &t);
            }
        }
        let mut rhs: std::collections::BTreeMap<(u32, u32), Vec<BigRational>> = Default::default();
        for &(e, l, r) in b.coproduct(i) {
            let sl = s_apply(&basis_vec(l));
            let sr = s_apply(&basis_vec(r));
            for (a, ca) in sr.iter().enumerate() {
                if field.is_zero(ca) {
                    continue;
                }
                for (c, cc) in sl.iter().enumerate() {
                    if field.is_zero(cc) {
                        continue;
                    }
                    let t = field.mul(&field.mul(ca, cc), &field.root(e));
                    let slot = rhs.entry((a as u32, c as u32)).or_insert_with(|| field.zero());
                    *slot = field.add(slot, &t);
                }
            }
        }
        let keys: std::collections::BTreeSet<(u32, u32)> =
            lhs.keys().chain(rhs.keys()).copied().collect();
        for k in keys {
            let zero = field.zero();
            let a = lhs.get(&k).unwrap_or(&zero);
            let c = rhs.get(&k).unwrap_or(&zero);
            if !field.is_zero(&field.sub(a, c)) {
                return false;
            }
        }
    }
    true
}

/// JSON form of the structure constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BicrossedJson {
    pub dimension: usize,
    pub modulus: u64,
    pub basis_labels: Vec<String>,
    /// (i, j, k, exponent): e_i e_j = zeta^exponent e_k
    pub mult: Vec<(u32, u32, u32, u64)>,
    /// (i, left, right, exponent) terms of Delta(e_i)
    pub comult: Vec<(u32, u32, u32, u64)>,
    pub counit: Vec<u8>,
    pub antipode: Option<Vec<Vec<Vec<String>>>>,
}

impl BicrossedJson {
    pub fn from_product(b: &BicrossedProduct, antipode: Option<&HopfReport>) -> Self {
        let mut mult = Vec::new();
        for i in 0..b.dim as u32 {
            for j in 0..b.dim as u32 {
                if let Some((e, k)) = b.product(i, j) {
                    mult.push((i, j, k, e));
                }
            }
        }
        let mut comult = Vec::new();
        for i in 0..b.dim as u32 {
            for &(e, l, r) in b.coproduct(i) {
                comult.push((i, l, r, e));
            }
        }
        BicrossedJson {
            dimension: b.dim,
            modulus: b.modulus(),
            basis_labels: b.basis_labels.clone(),
            mult,
            comult,
            counit: (0..b.dim as u32).map(|i| b.counit(i) as u8).collect(),
            antipode: antipode.and_then(|r| match &r.antipode {
                AntipodeStatus::Found { matrix } => Some(matrix.clone()),
                _ => None,
            }),
        }
    }
}
