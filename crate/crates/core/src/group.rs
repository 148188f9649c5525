//! Exact finite-group arithmetic on dense Cayley tables.
//!
//! Groups are immutable after construction and shared via `Arc`. Every
//! group built here has order at most a few hundred, so the order^2 table
//! keeps all operations exact and allocation-free.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::modular::{inv_mod, is_prime, lcm};

pub type Elt = u16;

#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<Elt>,
    inv: Vec<Elt>,
    identity: Elt,
    labels: Vec<String>,
    spec: Option<String>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FiniteGroup(order={}, spec={:?})",
            self.order,
            self.spec.as_deref().unwrap_or("custom")
        )
    }
}

impl FiniteGroup {
    /// Build from a raw multiplication table. Checks all axioms
    /// (exhaustively up to order 512, by sampling above).
    pub fn from_table(mul: Vec<Elt>, labels: Vec<String>, spec: Option<String>) -> Result<Self, Error> {
        let order = labels.len();
        if mul.len() != order * order || order == 0 || order > Elt::MAX as usize {
            return Err(Error::Group("malformed multiplication table".into()));
        }
        // locate a two-sided identity
        let identity = (0..order)
            .find(|&e| {
                (0..order).all(|g| {
                    mul[e * order + g] == g as Elt && mul[g * order + e] == g as Elt
                })
            })
            .ok_or_else(|| Error::Group("no identity element".into()))? as Elt;
        let mut inv = vec![Elt::MAX; order];
        for g in 0..order {
            let gi = (0..order)
                .find(|&h| mul[g * order + h] == identity && mul[h * order + g] == identity)
                .ok_or_else(|| Error::Group(format!("element {g} has no two-sided inverse")))?;
            inv[g] = gi as Elt;
        }
        let g = FiniteGroup {
            order,
            mul,
            inv,
            identity,
            labels,
            spec,
        };
        g.check_associativity()?;
        Ok(g)
    }

    fn check_associativity(&self) -> Result<(), Error> {
        let n = self.order;
        if n <= 512 {
            for a in 0..n as Elt {
                for b in 0..n as Elt {
                    let ab = self.mul(a, b);
                    for c in 0..n as Elt {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(Error::Group(format!(
                                "multiplication not associative at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut state = 0x9e3779b97f4a7c15u64;
            for _ in 0..200_000 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a = (state >> 33) as usize % n;
                let b = (state >> 17) as usize % n;
                let c = state as usize % n;
                let (a, b, c) = (a as Elt, b as Elt, c as Elt);
                if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                    return Err(Error::Group("multiplication not associative".into()));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> Elt {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elt) -> Elt {
        self.inv[a as usize]
    }

    pub fn conj(&self, g: Elt, a: Elt) -> Elt {
        self.mul(self.mul(g, a), self.inv(g))
    }

    pub fn pow(&self, a: Elt, mut n: i64) -> Elt {
        let mut base = if n < 0 {
            n = -n;
            self.inv(a)
        } else {
            a
        };
        let mut acc = self.identity;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: Elt) -> u64 {
        let mut acc = a;
        let mut k = 1;
        while acc != self.identity {
            acc = self.mul(acc, a);
            k += 1;
        }
        k
    }

    /// lcm of the element orders.
    pub fn exponent(&self) -> u64 {
        (0..self.order as Elt).fold(1, |acc, g| lcm(acc, self.element_order(g)))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order as Elt)
            .all(|a| (0..self.order as Elt).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn label(&self, g: Elt) -> &str {
        &self.labels[g as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn spec(&self) -> Option<&str> {
        self.spec.as_deref()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elt> {
        0..self.order as Elt
    }

    /// The set {z : zg = gz for all g} as a subgroup.
    pub fn center(self: &Arc<Self>) -> Subgroup {
        let elems: Vec<Elt> = self
            .elements()
            .filter(|&z| self.elements().all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect();
        Subgroup::new(self.clone(), elems).expect("center is a subgroup")
    }

    /// Closure of a generating set.
    pub fn generated_subgroup(self: &Arc<Self>, gens: &[Elt]) -> Subgroup {
        let mut seen = vec![false; self.order];
        seen[self.identity as usize] = true;
        let mut elems = vec![self.identity];
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(x, self.inv(g))] {
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        elems.push(y);
                        frontier.push(y);
                    }
                }
            }
        }
        elems.sort_unstable();
        Subgroup::new(self.clone(), elems).expect("closure is a subgroup")
    }

    /// All subgroups, by closing every 1- and 2-element generating set and
    /// then saturating products of found subgroups until no new ones
    /// appear (breadth-first lattice completion).
    pub fn subgroups(self: &Arc<Self>, order_filter: Option<usize>) -> Vec<Subgroup> {
        let mut found: BTreeSet<Vec<Elt>> = BTreeSet::new();
        found.insert(vec![self.identity]);
        for a in self.elements() {
            found.insert(self.generated_subgroup(&[a]).elements().to_vec());
            for b in self.elements() {
                if b > a {
                    found.insert(self.generated_subgroup(&[a, b]).elements().to_vec());
                }
            }
        }
        // lattice completion: join pairs until stable
        loop {
            let snapshot: Vec<Vec<Elt>> = found.iter().cloned().collect();
            let before = found.len();
            for i in 0..snapshot.len() {
                for j in i + 1..snapshot.len() {
                    let mut gens = snapshot[i].clone();
                    gens.extend_from_slice(&snapshot[j]);
                    found.insert(self.generated_subgroup(&gens).elements().to_vec());
                }
            }
            if found.len() == before {
                break;
            }
        }
        found
            .into_iter()
            .filter(|e| order_filter.map_or(true, |k| e.len() == k))
            .map(|e| Subgroup::new(self.clone(), e).expect("closed set"))
            .collect()
    }
}

/// A subgroup given by its sorted element set.
#[derive(Clone)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    elements: Vec<Elt>,
    position: Vec<Option<u16>>,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order={}, gens~{:?})", self.order(), self.generator_labels())
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) && self.elements == other.elements
    }
}
impl Eq for Subgroup {}

impl Subgroup {
    pub fn new(parent: Arc<FiniteGroup>, mut elements: Vec<Elt>) -> Result<Self, Error> {
        elements.sort_unstable();
        elements.dedup();
        let mut position = vec![None; parent.order()];
        for (i, &e) in elements.iter().enumerate() {
            position[e as usize] = Some(i as u16);
        }
        // closure, identity, inverses
        if position[parent.identity() as usize].is_none() {
            return Err(Error::Group("subgroup misses the identity".into()));
        }
        for &a in &elements {
            if position[parent.inv(a) as usize].is_none() {
                return Err(Error::Group("subgroup not closed under inverse".into()));
            }
            for &b in &elements {
                if position[parent.mul(a, b) as usize].is_none() {
                    return Err(Error::Group("subgroup not closed under product".into()));
                }
            }
        }
        Ok(Subgroup {
            parent,
            elements,
            position,
        })
    }

    pub fn whole(parent: &Arc<FiniteGroup>) -> Subgroup {
        Subgroup::new(parent.clone(), parent.elements().collect()).unwrap()
    }

    pub fn trivial(parent: &Arc<FiniteGroup>) -> Subgroup {
        Subgroup::new(parent.clone(), vec![parent.identity()]).unwrap()
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Elt] {
        &self.elements
    }

    pub fn contains(&self, g: Elt) -> bool {
        self.position[g as usize].is_some()
    }

    /// Index of `g` within the subgroup's element list.
    pub fn index_of(&self, g: Elt) -> Option<u16> {
        self.position[g as usize]
    }

    pub fn is_abelian(&self) -> bool {
        self.elements.iter().all(|&a| {
            self.elements
                .iter()
                .all(|&b| self.parent.mul(a, b) == self.parent.mul(b, a))
        })
    }

    /// The subgroup as a standalone group with inherited labels.
    pub fn as_group(&self) -> Result<Arc<FiniteGroup>, Error> {
        let n = self.order();
        let mut mul = vec![0 as Elt; n * n];
        for (i, &a) in self.elements.iter().enumerate() {
            for (j, &b) in self.elements.iter().enumerate() {
                mul[i * n + j] = self.position[self.parent.mul(a, b) as usize].unwrap();
            }
        }
        let labels = self
            .elements
            .iter()
            .map(|&e| self.parent.label(e).to_string())
            .collect();
        Ok(Arc::new(FiniteGroup::from_table(mul, labels, None)?))
    }

    pub fn conjugate_by(&self, g: Elt) -> Subgroup {
        let elems: Vec<Elt> = self
            .elements
            .iter()
            .map(|&a| self.parent.conj(g, a))
            .collect();
        Subgroup::new(self.parent.clone(), elems).expect("conjugate of a subgroup")
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let elems: Vec<Elt> = self
            .elements
            .iter()
            .copied()
            .filter(|&e| other.contains(e))
            .collect();
        Subgroup::new(self.parent.clone(), elems).expect("intersection")
    }

    /// |A.B| where A.B is the element-set product.
    pub fn product_set_size(&self, other: &Subgroup) -> usize {
        let mut seen = vec![false; self.parent.order()];
        let mut count = 0;
        for &a in &self.elements {
            for &b in other.elements() {
                let ab = self.parent.mul(a, b) as usize;
                if !seen[ab] {
                    seen[ab] = true;
                    count += 1;
                }
            }
        }
        count
    }

    /// A small generating set (greedy).
    pub fn generators(&self) -> Vec<Elt> {
        let mut gens: Vec<Elt> = Vec::new();
        let mut current = vec![self.parent.identity()];
        while current.len() < self.order() {
            let next = self
                .elements
                .iter()
                .copied()
                .find(|e| !current.contains(e))
                .expect("not yet generated");
            gens.push(next);
            current = self
                .parent
                .generated_subgroup(&gens)
                .elements()
                .to_vec();
        }
        gens
    }

    pub fn generator_labels(&self) -> Vec<String> {
        self.generators()
            .iter()
            .map(|&g| self.parent.label(g).to_string())
            .collect()
    }

    /// Invariant-factor decomposition of an abelian subgroup: returns
    /// (basis elements, their orders) with orders d_1 | d_2 | ...
    /// merged across Sylow components.
    pub fn abelian_decomposition(&self) -> Result<(Vec<Elt>, Vec<u64>), Error> {
        if !self.is_abelian() {
            return Err(Error::Domain("abelian decomposition of a non-abelian subgroup".into()));
        }
        let g = &self.parent;
        let n = self.order() as u64;
        // per-prime bases
        let mut per_prime: Vec<Vec<(Elt, u64)>> = Vec::new();
        for (p, _) in crate::modular::factorize(n) {
            let sylow: Vec<Elt> = self
                .elements
                .iter()
                .copied()
                .filter(|&e| {
                    let o = g.element_order(e);
                    o == 1 || crate::modular::factorize(o).iter().all(|&(q, _)| q == p)
                })
                .collect();
            per_prime.push(p_group_basis(g, &sylow, p));
        }
        // merge: pair off largest with largest across primes
        let max_len = per_prime.iter().map(|b| b.len()).max().unwrap_or(0);
        let mut basis = Vec::new();
        let mut orders = Vec::new();
        for slot in 0..max_len {
            let mut elt = g.identity();
            let mut ord = 1u64;
            for pb in &per_prime {
                if slot < pb.len() {
                    let (e, o) = pb[slot];
                    elt = g.mul(elt, e);
                    ord *= o;
                }
            }
            basis.push(elt);
            orders.push(ord);
        }
        basis.reverse();
        orders.reverse();
        debug_assert_eq!(orders.iter().product::<u64>(), n);
        Ok((basis, orders))
    }
}

/// Basis of an abelian p-group given by its element list.
fn p_group_basis(g: &Arc<FiniteGroup>, elems: &[Elt], _p: u64) -> Vec<(Elt, u64)> {
    let mut basis: Vec<(Elt, u64)> = Vec::new();
    let mut span = vec![g.identity()];
    let total = elems.len();
    while span.len() < total {
        // element of maximal order not in the current span... choose the
        // one whose power first leaves the span (standard p-group peeling:
        // a maximal-order element generates a direct factor)
        let mut best: Option<(Elt, u64)> = None;
        for &e in elems {
            if span.contains(&e) {
                continue;
            }
            let o = g.element_order(e);
            if best.map_or(true, |(_, bo)| o > bo) {
                best = Some((e, o));
            }
        }
        let (mut e, mut o) = best.expect("span not complete but no new element");
        // adjust e so that <e> intersects the span trivially
        'adjust: loop {
            let mut acc = e;
            let mut k = 1u64;
            while k < o {
                if span.contains(&acc) {
                    // acc = e^k in span with k minimal; k must divide o
                    // and e^k = s. Replace e by e * t^{-1} where t^k = s,
                    // if a k-th root of s exists in the span.
                    let s = acc;
                    let root = span
                        .iter()
                        .copied()
                        .find(|&t| g.pow(t, k as i64) == s);
                    match root {
                        Some(t) => {
                            e = g.mul(e, g.inv(t));
                            o = g.element_order(e);
                            if o == 1 {
                                // e collapsed into the span; pick another
                                break 'adjust;
                            }
                            continue 'adjust;
                        }
                        None => {
                            // no root: direct-factor property failed, which
                            // cannot happen when peeling maximal order
                            panic!("p-group peeling: missing root");
                        }
                    }
                }
                acc = g.mul(acc, e);
                k += 1;
            }
            // <e> now meets span trivially
            basis.push((e, o));
            let old = span.clone();
            for k in 1..o {
                let ek = g.pow(e, k as i64);
                for &s in &old {
                    let x = g.mul(s, ek);
                    if !span.contains(&x) {
                        span.push(x);
                    }
                }
            }
            break;
        }
    }
    // largest order first
    basis.sort_by(|a, b| b.1.cmp(&a.1));
    basis
}

/// An action of `actor` on the elements of `space` by permutations.
#[derive(Clone, Debug)]
pub struct GroupAction {
    pub actor: Arc<FiniteGroup>,
    pub space: Arc<FiniteGroup>,
    /// actor.order x space.order table of space elements
    pub table: Vec<Elt>,
    /// left action: (ab).x = a.(b.x); right action: x.(ab) = (x.a).b
    pub right: bool,
}

impl GroupAction {
    pub fn new(
        actor: Arc<FiniteGroup>,
        space: Arc<FiniteGroup>,
        table: Vec<Elt>,
        right: bool,
    ) -> Result<Self, Error> {
        let a = GroupAction {
            actor,
            space,
            table,
            right,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn trivial(actor: Arc<FiniteGroup>, space: Arc<FiniteGroup>, right: bool) -> Self {
        let table = (0..actor.order())
            .flat_map(|_| 0..space.order() as Elt)
            .collect();
        GroupAction {
            actor,
            space,
            table,
            right,
        }
    }

    #[inline]
    pub fn apply(&self, actor: Elt, x: Elt) -> Elt {
        self.table[actor as usize * self.space.order() + x as usize]
    }

    fn validate(&self) -> Result<(), Error> {
        let n = self.space.order();
        if self.table.len() != self.actor.order() * n {
            return Err(Error::Group("action table has wrong size".into()));
        }
        for a in self.actor.elements() {
            let mut seen = vec![false; n];
            for x in self.space.elements() {
                let y = self.apply(a, x) as usize;
                if y >= n || seen[y] {
                    return Err(Error::Group(format!(
                        "actor {a} does not act as a permutation"
                    )));
                }
                seen[y] = true;
            }
        }
        let e = self.actor.identity();
        for x in self.space.elements() {
            if self.apply(e, x) != x {
                return Err(Error::Group("identity does not act trivially".into()));
            }
        }
        for a in self.actor.elements() {
            for b in self.actor.elements() {
                for x in self.space.elements() {
                    let lhs = self.apply(self.actor.mul(a, b), x);
                    let rhs = if self.right {
                        self.apply(b, self.apply(a, x))
                    } else {
                        self.apply(a, self.apply(b, x))
                    };
                    if lhs != rhs {
                        return Err(Error::Group(
                            "action incompatible with actor multiplication".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A conjugacy class of subgroups: representative plus, for each member,
/// a witness g with g * rep * g^-1 = member.
#[derive(Clone, Debug)]
pub struct SubgroupClass {
    pub representative: Subgroup,
    pub members: Vec<(Subgroup, Elt)>,
}

/// Partition `candidates` into G-conjugacy classes.
///
/// The representative of each class is the member with the
/// lexicographically smallest element set.
pub fn conjugacy_classes_of_subgroups(
    g: &Arc<FiniteGroup>,
    candidates: &[Subgroup],
) -> Vec<SubgroupClass> {
    let mut classes: Vec<SubgroupClass> = Vec::new();
    let mut assigned: Vec<bool> = vec![false; candidates.len()];
    let index_of = |elems: &[Elt]| -> Option<usize> {
        candidates.iter().position(|c| c.elements() == elems)
    };
    for i in 0..candidates.len() {
        if assigned[i] {
            continue;
        }
        // full orbit of candidate i
        let mut members: Vec<(Vec<Elt>, Elt)> = Vec::new();
        for h in g.elements() {
            let conj = candidates[i].conjugate_by(h);
            if !members.iter().any(|(e, _)| e == conj.elements()) {
                members.push((conj.elements().to_vec(), h));
            }
        }
        members.sort();
        let (rep_elems, to_rep) = members[0].clone();
        // witness for member m: m = h * cand_i * h^-1 and rep = r * cand_i * r^-1,
        // so m = (h r^-1) rep (h r^-1)^-1
        let rep = Subgroup::new(g.clone(), rep_elems).unwrap();
        let mut class_members = Vec::new();
        for (elems, h) in &members {
            if let Some(j) = index_of(elems) {
                assigned[j] = true;
                let witness = g.mul(*h, g.inv(to_rep));
                class_members.push((candidates[j].clone(), witness));
            }
        }
        if class_members.is_empty() {
            // none of the orbit members besides conjugates are in the
            // candidate list; still record the original
            class_members.push((candidates[i].clone(), g.mul(members[0].1, g.inv(to_rep))));
            assigned[i] = true;
        }
        classes.push(SubgroupClass {
            representative: rep,
            members: class_members,
        });
    }
    classes.sort_by(|a, b| a.representative.elements().cmp(b.representative.elements()));
    classes
}

/// true iff |A||B| = |G| and A meets B trivially.
pub fn is_exact_factorization(g: &Arc<FiniteGroup>, a: &Subgroup, b: &Subgroup) -> bool {
    a.order() * b.order() == g.order() && a.intersect(b).order() == 1
}

/// Search for a multiplication-preserving bijection between two groups
/// of equal order (generator-image backtracking; desk scale only).
pub fn find_isomorphism(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> Option<Vec<Elt>> {
    if a.order() != b.order() {
        return None;
    }
    let gens = Subgroup::whole(a).generators();
    let mut images = vec![0 as Elt; gens.len()];
    fn extend(
        a: &Arc<FiniteGroup>,
        b: &Arc<FiniteGroup>,
        gens: &[Elt],
        images: &mut Vec<Elt>,
        k: usize,
    ) -> Option<Vec<Elt>> {
        if k == gens.len() {
            // build the homomorphism by closing words
            let mut map = vec![Elt::MAX; a.order()];
            map[a.identity() as usize] = b.identity();
            let mut frontier = vec![a.identity()];
            while let Some(x) = frontier.pop() {
                for (i, &g) in gens.iter().enumerate() {
                    let y = a.mul(x, g);
                    let img = b.mul(map[x as usize], images[i]);
                    if map[y as usize] == Elt::MAX {
                        map[y as usize] = img;
                        frontier.push(y);
                    } else if map[y as usize] != img {
                        return None;
                    }
                }
            }
            if map.iter().any(|&m| m == Elt::MAX) {
                return None;
            }
            // bijectivity + homomorphism over all pairs
            let mut seen = vec![false; b.order()];
            for &m in &map {
                if seen[m as usize] {
                    return None;
                }
                seen[m as usize] = true;
            }
            for x in a.elements() {
                for y in a.elements() {
                    if map[a.mul(x, y) as usize] != b.mul(map[x as usize], map[y as usize]) {
                        return None;
                    }
                }
            }
            return Some(map);
        }
        let target_order = a.element_order(gens[k]);
        for cand in b.elements() {
            if b.element_order(cand) == target_order {
                images[k] = cand;
                if let Some(m) = extend(a, b, gens, images, k + 1) {
                    return Some(m);
                }
            }
        }
        None
    }
    extend(a, b, &gens, &mut images, 0)
}

// ---------------------------------------------------------------------
// group constructions
// ---------------------------------------------------------------------

fn label_power(gen: &str, e: u64) -> String {
    match e {
        0 => String::new(),
        1 => gen.to_string(),
        _ => format!("{gen}^{e}"),
    }
}

fn join_labels(parts: &[String]) -> String {
    let s: Vec<&str> = parts.iter().map(|p| p.as_str()).filter(|p| !p.is_empty()).collect();
    if s.is_empty() {
        "e".to_string()
    } else {
        s.join(" ")
    }
}

pub fn cyclic(n: u64, gen_name: &str) -> Arc<FiniteGroup> {
    let n = n as usize;
    let mut mul = vec![0 as Elt; n * n];
    for a in 0..n {
        for b in 0..n {
            mul[a * n + b] = ((a + b) % n) as Elt;
        }
    }
    let labels = (0..n as u64)
        .map(|e| join_labels(&[label_power(gen_name, e)]))
        .collect();
    Arc::new(FiniteGroup::from_table(mul, labels, Some(format!("cyclic:{n}"))).unwrap())
}

pub fn direct_product(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> Arc<FiniteGroup> {
    let (na, nb) = (a.order(), b.order());
    let n = na * nb;
    let mut mul = vec![0 as Elt; n * n];
    let idx = |x: usize, y: usize| x * nb + y;
    for x1 in 0..na {
        for y1 in 0..nb {
            for x2 in 0..na {
                for y2 in 0..nb {
                    let px = a.mul(x1 as Elt, x2 as Elt) as usize;
                    let py = b.mul(y1 as Elt, y2 as Elt) as usize;
                    mul[idx(x1, y1) * n + idx(x2, y2)] = idx(px, py) as Elt;
                }
            }
        }
    }
    let mut labels = Vec::with_capacity(n);
    for x in 0..na {
        for y in 0..nb {
            let la = a.label(x as Elt);
            let lb = b.label(y as Elt);
            labels.push(join_labels(&[
                if la == "e" { String::new() } else { la.to_string() },
                if lb == "e" { String::new() } else { lb.to_string() },
            ]));
        }
    }
    let spec = match (a.spec(), b.spec()) {
        (Some(sa), Some(sb)) => Some(format!("product:{sa};{sb}")),
        _ => None,
    };
    Arc::new(FiniteGroup::from_table(mul, labels, spec).unwrap())
}

/// Unipotent upper triangular 3x3 matrices over F_p, presented on the
/// coordinates a^i b^j x^n with x^n (a^i b^j) x^-n = a^(i+nj) b^j;
/// a is central.
pub fn unitriangular3(p: u64) -> Result<Arc<FiniteGroup>, Error> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("ut3: {p} is not prime")));
    }
    let pu = p as usize;
    let n = pu * pu * pu;
    let idx = |i: u64, j: u64, m: u64| ((i % p) * p * p + (j % p) * p + (m % p)) as usize;
    let mut mul = vec![0 as Elt; n * n];
    for i1 in 0..p {
        for j1 in 0..p {
            for n1 in 0..p {
                for i2 in 0..p {
                    for j2 in 0..p {
                        for n2 in 0..p {
                            // (a^i1 b^j1 x^n1)(a^i2 b^j2 x^n2)
                            //   = a^(i1+i2+n1*j2) b^(j1+j2) x^(n1+n2)
                            let t = idx(i1 + i2 + n1 * j2, j1 + j2, n1 + n2);
                            mul[idx(i1, j1, n1) * n + idx(i2, j2, n2)] = t as Elt;
                        }
                    }
                }
            }
        }
    }
    let mut labels = vec![String::new(); n];
    for i in 0..p {
        for j in 0..p {
            for m in 0..p {
                labels[idx(i, j, m)] = join_labels(&[
                    label_power("a", i),
                    label_power("b", j),
                    label_power("x", m),
                ]);
            }
        }
    }
    Ok(Arc::new(FiniteGroup::from_table(
        mul,
        labels,
        Some(format!("ut3:{p}")),
    )?))
}

/// Coordinates of an element of ut3:p as (i, j, n) with g = a^i b^j x^n.
pub fn ut3_coords(p: u64, g: Elt) -> (u64, u64, u64) {
    let g = g as u64;
    (g / (p * p), (g / p) % p, g % p)
}

pub fn ut3_elt(p: u64, i: u64, j: u64, n: u64) -> Elt {
    ((i % p) * p * p + (j % p) * p + (n % p)) as Elt
}

/// The nonabelian group of order p^3 and exponent p^2:
/// y^(p^2) = z^p = 1 with z y z^-1 = y^(1+p).
pub fn modular_p3(p: u64) -> Result<Arc<FiniteGroup>, Error> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("t: {p} is not prime")));
    }
    let p2 = p * p;
    let n = (p2 * p) as usize;
    let idx = |i: u64, j: u64| ((i % p2) * p + (j % p)) as usize;
    let mut mul = vec![0 as Elt; n * n];
    // z^j y z^-j = y^((1+p)^j)
    let mut twist = vec![1u64; p as usize];
    for j in 1..p as usize {
        twist[j] = twist[j - 1] * (1 + p) % p2;
    }
    for i1 in 0..p2 {
        for j1 in 0..p {
            for i2 in 0..p2 {
                for j2 in 0..p {
                    // y^i1 z^j1 y^i2 z^j2 = y^(i1 + i2*(1+p)^j1) z^(j1+j2)
                    let t = idx(i1 + i2 * twist[j1 as usize] % p2, j1 + j2);
                    mul[idx(i1, j1) * n + idx(i2, j2)] = t as Elt;
                }
            }
        }
    }
    let mut labels = vec![String::new(); n];
    for i in 0..p2 {
        for j in 0..p {
            labels[idx(i, j)] = join_labels(&[label_power("y", i), label_power("z", j)]);
        }
    }
    Ok(Arc::new(FiniteGroup::from_table(
        mul,
        labels,
        Some(format!("t:{p}")),
    )?))
}

/// Dihedral group of order n (n even): r^(n/2) = s^2 = 1, s r s = r^-1.
pub fn dihedral(n: u64) -> Result<Arc<FiniteGroup>, Error> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Domain(format!("dihedral: order {n} must be even and >= 2")));
    }
    let m = n / 2;
    let nu = n as usize;
    let idx = |r: u64, s: u64| ((r % m) * 2 + (s % 2)) as usize;
    let mut mul = vec![0 as Elt; nu * nu];
    for r1 in 0..m {
        for s1 in 0..2u64 {
            for r2 in 0..m {
                for s2 in 0..2u64 {
                    // r^r1 s^s1 r^r2 s^s2 = r^(r1 + r2*(-1)^s1) s^(s1+s2)
                    let rr = if s1 == 1 { (m + m - r2) % m } else { r2 };
                    let t = idx(r1 + rr, s1 + s2);
                    mul[idx(r1, s1) * nu + idx(r2, s2)] = t as Elt;
                }
            }
        }
    }
    let mut labels = vec![String::new(); nu];
    for r in 0..m {
        for s in 0..2u64 {
            labels[idx(r, s)] = join_labels(&[label_power("r", r), label_power("s", s)]);
        }
    }
    Ok(Arc::new(FiniteGroup::from_table(
        mul,
        labels,
        Some(format!("dihedral:{n}")),
    )?))
}

/// Multiplicative order of m modulo q.
pub fn mult_order(m: u64, q: u64) -> u64 {
    let mut acc = m % q;
    let mut k = 1;
    while acc != 1 {
        acc = acc * m % q;
        k += 1;
        assert!(k <= q, "mult_order: {m} not a unit mod {q}");
    }
    k
}

/// The semidirect product Z_p ⋉ (Z_q x Z_q) where a generator g of Z_p
/// acts by a ◁ g = a^m, b ◁ g = b^(m^λ). Elements g^k a^i b^j.
///
/// The action is the inverse-parameter presentation of Eq-style data
/// written with a ◁ g^-1 = a^m: replacing g by g^-1 is an isomorphism of
/// the pair, and this orientation is the one compatible with the
/// bicrossed-product conventions used throughout.
pub fn bgroup(p: u64, q: u64, m: u64, lambda: u64) -> Result<Arc<FiniteGroup>, Error> {
    validate_bgroup(p, q, m, lambda)?;
    let n = (p * q * q) as usize;
    let idx = |k: u64, i: u64, j: u64| ((k % p) * q * q + (i % q) * q + (j % q)) as usize;
    let mlam = {
        let mut acc = 1u64;
        for _ in 0..lambda {
            acc = acc * m % q;
        }
        acc
    };
    let mut apow = vec![1u64; p as usize]; // a ◁ g^k = a^(m^k)
    let mut bpow = vec![1u64; p as usize];
    for k in 1..p as usize {
        apow[k] = apow[k - 1] * (m % q) % q;
        bpow[k] = bpow[k - 1] * mlam % q;
    }
    let mut mul = vec![0 as Elt; n * n];
    for k1 in 0..p {
        for i1 in 0..q {
            for j1 in 0..q {
                for k2 in 0..p {
                    for i2 in 0..q {
                        for j2 in 0..q {
                            // (g^k1 a^i1 b^j1)(g^k2 a^i2 b^j2)
                            //  = g^(k1+k2) (a^i1 b^j1 ◁ g^k2) a^i2 b^j2
                            let i = i1 * apow[k2 as usize] % q + i2;
                            let j = j1 * bpow[k2 as usize] % q + j2;
                            mul[idx(k1, i1, j1) * n + idx(k2, i2, j2)] =
                                idx(k1 + k2, i, j) as Elt;
                        }
                    }
                }
            }
        }
    }
    let mut labels = vec![String::new(); n];
    for k in 0..p {
        for i in 0..q {
            for j in 0..q {
                labels[idx(k, i, j)] = join_labels(&[
                    label_power("g", k),
                    label_power("a", i),
                    label_power("b", j),
                ]);
            }
        }
    }
    Ok(Arc::new(FiniteGroup::from_table(
        mul,
        labels,
        Some(format!("bgroup:{p},{q},{m},{lambda}")),
    )?))
}

pub fn validate_bgroup(p: u64, q: u64, m: u64, lambda: u64) -> Result<(), Error> {
    if !is_prime(p) || !is_prime(q) || p == q {
        return Err(Error::Domain(format!("bgroup: p={p}, q={q} must be distinct primes")));
    }
    if q % p != 1 {
        return Err(Error::Domain(format!("bgroup: q={q} must be 1 mod p={p}")));
    }
    if m % q <= 1 || mult_order(m % q, q) != p {
        return Err(Error::Domain(format!(
            "bgroup: m={m} must have multiplicative order exactly p={p} mod q={q}"
        )));
    }
    if lambda % p == p - 1 {
        return Err(Error::Domain(format!("bgroup: lambda={lambda} must not be -1 mod p={p}")));
    }
    Ok(())
}

/// g^k a^i b^j coordinates in bgroup:p,q.
pub fn bgroup_coords(p: u64, q: u64, g: Elt) -> (u64, u64, u64) {
    let g = g as u64;
    let _ = p;
    (g / (q * q), (g / q) % q, g % q)
}

pub fn bgroup_elt(p: u64, q: u64, k: u64, i: u64, j: u64) -> Elt {
    ((k % p) * q * q + (i % q) * q + (j % q)) as Elt
}

/// The semidirect product Z_q ⋉ (Z_p ⋊ Z_q): Γ' = <a, b : a^q = b^p = 1,
/// a b a^-1 = b^t>, F' = <g : g^q = 1>, with b ◁ g = b^h, a ◁ g = a.
/// Elements g^n b^j a^i.
pub fn agroup(p: u64, q: u64, t: u64, h: u64) -> Result<Arc<FiniteGroup>, Error> {
    validate_agroup(p, q, t, h)?;
    let n = (q * p * q) as usize;
    let idx = |nn: u64, j: u64, i: u64| ((nn % q) * p * q + (j % p) * q + (i % q)) as usize;
    // powers of t and h mod p
    let powmod = |base: u64, e: u64, md: u64| -> u64 {
        let mut acc = 1u64;
        for _ in 0..e {
            acc = acc * base % md;
        }
        acc
    };
    let mut mul = vec![0 as Elt; n * n];
    for n1 in 0..q {
        for j1 in 0..p {
            for i1 in 0..q {
                for n2 in 0..q {
                    for j2 in 0..p {
                        for i2 in 0..q {
                            // (g^n1 b^j1 a^i1)(g^n2 b^j2 a^i2):
                            // (b^j1 a^i1) ◁ g^n2 = b^(j1 h^n2) a^i1,
                            // then (b^J a^i1)(b^j2 a^i2) = b^(J + j2 t^i1) a^(i1+i2)
                            let jj = j1 * powmod(h, n2, p) % p;
                            let j = (jj + j2 * powmod(t, i1, p)) % p;
                            mul[idx(n1, j1, i1) * n + idx(n2, j2, i2)] =
                                idx(n1 + n2, j, i1 + i2) as Elt;
                        }
                    }
                }
            }
        }
    }
    let mut labels = vec![String::new(); n];
    for nn in 0..q {
        for j in 0..p {
            for i in 0..q {
                labels[idx(nn, j, i)] = join_labels(&[
                    label_power("g", nn),
                    label_power("b", j),
                    label_power("a", i),
                ]);
            }
        }
    }
    Ok(Arc::new(FiniteGroup::from_table(
        mul,
        labels,
        Some(format!("agroup:{p},{q},{t},{h}")),
    )?))
}

pub fn validate_agroup(p: u64, q: u64, t: u64, h: u64) -> Result<(), Error> {
    if !is_prime(p) || !is_prime(q) || p == q {
        return Err(Error::Domain(format!("agroup: p={p}, q={q} must be distinct primes")));
    }
    if p % q != 1 {
        return Err(Error::Domain(format!("agroup: p={p} must be 1 mod q={q}")));
    }
    for (name, x) in [("t", t), ("h", h)] {
        if x % p <= 1 || mult_order(x % p, p) != q {
            return Err(Error::Domain(format!(
                "agroup: {name}={x} must have multiplicative order exactly q={q} mod p={p}"
            )));
        }
    }
    Ok(())
}

/// g^n b^j a^i coordinates in agroup:p,q.
pub fn agroup_coords(p: u64, q: u64, g: Elt) -> (u64, u64, u64) {
    let g = g as u64;
    (g / (p * q), (g / q) % p, g % q)
}

pub fn agroup_elt(p: u64, q: u64, n: u64, j: u64, i: u64) -> Elt {
    ((n % q) * p * q + (j % p) * q + (i % q)) as Elt
}

/// Parse the group-spec grammar shared with the CLI:
/// `cyclic:N`, `product:<spec>;<spec>`, `ut3:<p>`, `t:<p>`,
/// `dihedral:<n>`, `bgroup:<p>,<q>,<m>,<lambda>`, `agroup:<p>,<q>,<t>,<h>`.
pub fn build_group(spec: &str) -> Result<Arc<FiniteGroup>, Error> {
    let (g, rest) = parse_spec(spec.trim())?;
    if !rest.is_empty() {
        return Err(Error::Parse(format!("trailing input {rest:?} after group spec")));
    }
    Ok(g)
}

fn parse_spec(s: &str) -> Result<(Arc<FiniteGroup>, &str), Error> {
    let bad = |s: &str| Error::Parse(format!("malformed group spec {s:?}"));
    if let Some(rest) = s.strip_prefix("product:") {
        let (a, rest) = parse_spec(rest)?;
        let rest = rest.strip_prefix(';').ok_or_else(|| bad(s))?;
        let (b, rest) = parse_spec(rest)?;
        return Ok((direct_product(&a, &b), rest));
    }
    let (head, rest) = match s.find(';') {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    let (op, args) = head.split_once(':').ok_or_else(|| bad(s))?;
    let nums: Result<Vec<u64>, _> = args.split(',').map(|t| t.trim().parse::<u64>()).collect();
    let nums = nums.map_err(|_| bad(s))?;
    let g = match (op, nums.as_slice()) {
        ("cyclic", [n]) if *n >= 1 => cyclic(*n, "c"),
        ("ut3", [p]) => unitriangular3(*p)?,
        ("t", [p]) => modular_p3(*p)?,
        ("dihedral", [n]) => dihedral(*n)?,
        ("bgroup", [p, q, m, l]) => bgroup(*p, *q, *m, *l)?,
        ("agroup", [p, q, t, h]) => agroup(*p, *q, *t, *h)?,
        _ => return Err(bad(s)),
    };
    Ok((g, rest))
}

/// JSON-facing description of a group (spec string when available, else
/// the order and labels).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupRef {
    pub spec: Option<String>,
    pub order: usize,
}

impl From<&FiniteGroup> for GroupRef {
    fn from(g: &FiniteGroup) -> Self {
        GroupRef {
            spec: g.spec().map(|s| s.to_string()),
            order: g.order(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_basics() {
        let g = build_group("cyclic:1").unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.exponent(), 1);
        let g = build_group("cyclic:7").unwrap();
        assert_eq!(g.exponent(), 7);
        assert_eq!(g.center().order(), 7);
        assert_eq!(g.subgroups(Some(7)).len(), 1);
    }

    #[test]
    fn ut3_exponent_and_center() {
        let g = build_group("ut3:3").unwrap();
        assert_eq!(g.order(), 27);
        assert_eq!(g.exponent(), 3);
        let z = g.center();
        assert_eq!(z.order(), 3);
        // the center is <a>
        assert!(z.contains(ut3_elt(3, 1, 0, 0)));
        let t = build_group("t:3").unwrap();
        assert_eq!(t.order(), 27);
        assert_eq!(t.exponent(), 9);
    }

    #[test]
    fn ut3_5_exponent() {
        assert_eq!(build_group("ut3:5").unwrap().exponent(), 5);
        assert_eq!(build_group("t:5").unwrap().exponent(), 25);
    }

    #[test]
    fn dihedral8_center() {
        let g = build_group("dihedral:8").unwrap();
        assert_eq!(g.center().order(), 2);
    }

    #[test]
    fn product_subgroups_of_order_3() {
        let g = build_group("product:cyclic:3;cyclic:3").unwrap();
        assert_eq!(g.subgroups(Some(3)).len(), 4);
    }

    #[test]
    fn ut3_subgroup_census() {
        let g = build_group("ut3:3").unwrap();
        let subs = g.subgroups(None);
        let count = |k: usize| subs.iter().filter(|s| s.order() == k).count();
        assert_eq!(count(1), 1);
        assert_eq!(count(3), 13);
        assert_eq!(count(9), 4);
        assert_eq!(count(27), 1);
        assert_eq!(subs.len(), 19);
        // closure under conjugation
        for s in &subs {
            for h in g.elements() {
                let c = s.conjugate_by(h);
                assert!(subs.iter().any(|t| t.elements() == c.elements()));
            }
        }
    }

    #[test]
    fn conjugacy_of_order_p_subgroups_in_ut3() {
        // the subgroups L_j = <b^j x> for j = 0..p-1 are pairwise
        // non-conjugate in ut3:5
        let p = 5u64;
        let g = build_group("ut3:5").unwrap();
        let candidates: Vec<Subgroup> = (0..p)
            .map(|j| g.generated_subgroup(&[ut3_elt(p, 0, j, 1)]))
            .collect();
        let classes = conjugacy_classes_of_subgroups(&g, &candidates);
        assert_eq!(classes.len(), 5);
        // witnesses check out
        for class in &classes {
            for (member, w) in &class.members {
                let conj = class.representative.conjugate_by(*w);
                assert_eq!(conj.elements(), member.elements());
            }
        }
    }

    #[test]
    fn exact_factorization_in_ut3() {
        let p = 3u64;
        let g = build_group("ut3:3").unwrap();
        let f = g.generated_subgroup(&[ut3_elt(p, 1, 0, 0), ut3_elt(p, 0, 1, 0)]);
        let l1 = g.generated_subgroup(&[ut3_elt(p, 0, 1, 1)]);
        assert!(is_exact_factorization(&g, &f, &l1));
        assert!(!is_exact_factorization(&g, &f, &f));
    }

    #[test]
    fn powers_formula_in_ut3() {
        // (b^j x)^n = a^(C(n,2) j) b^(jn) x^n
        for p in [3u64, 5, 7] {
            let g = build_group(&format!("ut3:{p}")).unwrap();
            for j in 0..p {
                let bjx = ut3_elt(p, 0, j, 1);
                for n in 0..p {
                    let lhs = g.pow(bjx, n as i64);
                    let binom = n * n.wrapping_sub(1) / 2;
                    let rhs = ut3_elt(p, binom % p * j % p, j * n % p, n);
                    assert_eq!(lhs, rhs, "p={p} j={j} n={n}");
                }
            }
        }
    }

    #[test]
    fn bgroup_and_agroup_build() {
        let g = build_group("bgroup:2,3,2,0").unwrap();
        assert_eq!(g.order(), 18);
        // λ = 0 leaves b fixed, so the center is <b>
        assert_eq!(g.center().order(), 3);
        let g = build_group("agroup:3,2,2,2").unwrap();
        assert_eq!(g.order(), 12);
        assert!(build_group("bgroup:2,3,1,0").is_err());
        assert!(build_group("bgroup:3,5,2,0").is_err()); // 5 != 1 mod 3
        assert!(build_group("ut3:4").is_err());
    }

    #[test]
    fn abelian_decomposition_shapes() {
        let g = build_group("product:cyclic:3;cyclic:9").unwrap();
        let s = Subgroup::whole(&g);
        let (_, orders) = s.abelian_decomposition().unwrap();
        assert_eq!(orders, vec![3, 9]);
        let g = build_group("product:cyclic:2;cyclic:6").unwrap();
        let (_, orders) = Subgroup::whole(&g).abelian_decomposition().unwrap();
        assert_eq!(orders, vec![2, 6]);
    }

    #[test]
    fn iso_search_direct_products() {
        let a = build_group("product:cyclic:2;cyclic:3").unwrap();
        let b = build_group("cyclic:6").unwrap();
        assert!(find_isomorphism(&a, &b).is_some());
        let c = build_group("product:cyclic:2;cyclic:2").unwrap();
        let d = build_group("cyclic:4").unwrap();
        assert!(find_isomorphism(&c, &d).is_none());
    }
}
