//! The G2 root system, its Weyl group, the parabolics Q1 (Levi root beta)
//! and Q2 (Levi root alpha), symbolic characters of F^x and torus
//! characters, and the rewriting of induced representations into
//! Langlands-quotient form.
//!
//! Weights are m*alpha + k*beta with alpha short. Torus coordinates are
//! t1 = e1(t), t2 = e2(t) with e1 = 2alpha+beta, e2 = alpha+beta, so
//! alpha = e1 - e2 and beta = 2e2 - e1.

use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;
use std::collections::{HashSet, VecDeque};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Weight {
    pub m: i64,
    pub k: i64,
}

pub const ALPHA: Weight = Weight { m: 1, k: 0 };
pub const BETA: Weight = Weight { m: 0, k: 1 };
pub const E1: Weight = Weight { m: 2, k: 1 };
pub const E2: Weight = Weight { m: 1, k: 1 };

impl Weight {
    pub const fn new(m: i64, k: i64) -> Self {
        Self { m, k }
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.m + o.m, self.k + o.k)
    }

    pub fn neg(self) -> Self {
        Self::new(-self.m, -self.k)
    }

    pub fn scale(self, c: i64) -> Self {
        Self::new(c * self.m, c * self.k)
    }

    /// Coordinates (x, y) with weight = x e1 + y e2.
    pub fn e_coords(self) -> (i64, i64) {
        (self.m - self.k, 2 * self.k - self.m)
    }

    pub fn from_e_coords(x: i64, y: i64) -> Self {
        Self::new(2 * x + y, x + y)
    }

    pub fn pair_alpha_coroot(self) -> i64 {
        2 * self.m - 3 * self.k
    }

    pub fn pair_beta_coroot(self) -> i64 {
        -self.m + 2 * self.k
    }

    /// W-invariant form normalised so short roots have length 2.
    pub fn form(self, o: Self) -> i64 {
        2 * self.m * o.m - 3 * (self.m * o.k + self.k * o.m) + 6 * self.k * o.k
    }

    pub fn is_zero(self) -> bool {
        self.m == 0 && self.k == 0
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |c: i64, s: &str| -> String {
            match c {
                0 => String::new(),
                1 => s.to_string(),
                -1 => format!("-{s}"),
                _ => format!("{c}{s}"),
            }
        };
        let a = term(self.m, "a");
        let b = term(self.k, "b");
        match (a.is_empty(), b.is_empty()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{a}"),
            (true, false) => write!(f, "{b}"),
            (false, false) => {
                if b.starts_with('-') {
                    write!(f, "{a}{b}")
                } else {
                    write!(f, "{a}+{b}")
                }
            }
        }
    }
}

pub fn positive_roots() -> Vec<Weight> {
    [(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2)].iter().map(|&(m, k)| Weight::new(m, k)).collect()
}

pub fn roots() -> Vec<Weight> {
    let mut r = positive_roots();
    r.extend(positive_roots().into_iter().map(Weight::neg));
    r
}

pub fn is_short(w: Weight) -> bool {
    w.form(w) == 2
}

/// Weyl group element: images of (alpha, beta) as columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WeylElt {
    pub cols: [[i64; 2]; 2],
    pub word: String,
}

impl WeylElt {
    pub fn identity() -> Self {
        Self { cols: [[1, 0], [0, 1]], word: String::new() }
    }

    pub fn s_alpha() -> Self {
        Self { cols: [[-1, 0], [3, 1]], word: "a".into() }
    }

    pub fn s_beta() -> Self {
        Self { cols: [[1, 1], [0, -1]], word: "b".into() }
    }

    pub fn act(&self, w: Weight) -> Weight {
        Weight::new(w.m * self.cols[0][0] + w.k * self.cols[1][0], w.m * self.cols[0][1] + w.k * self.cols[1][1])
    }

    /// self * o (apply o first).
    pub fn compose(&self, o: &Self) -> Self {
        let a = self.act(Weight::new(o.cols[0][0], o.cols[0][1]));
        let b = self.act(Weight::new(o.cols[1][0], o.cols[1][1]));
        Self { cols: [[a.m, a.k], [b.m, b.k]], word: format!("{}{}", self.word, o.word) }
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn same_element(&self, o: &Self) -> bool {
        self.cols == o.cols
    }

    pub fn inverse(&self) -> Self {
        let w: String = self.word.chars().rev().collect();
        word_to_elt(&w)
    }
}

fn word_to_elt(w: &str) -> WeylElt {
    let mut e = WeylElt::identity();
    for c in w.chars() {
        let g = if c == 'a' { WeylElt::s_alpha() } else { WeylElt::s_beta() };
        e = e.compose(&g);
    }
    e
}

/// All 12 elements with shortest words, in breadth-first order.
pub fn weyl_group() -> Vec<WeylElt> {
    let mut out = vec![WeylElt::identity()];
    let mut seen: HashSet<[[i64; 2]; 2]> = HashSet::new();
    seen.insert(WeylElt::identity().cols);
    let mut queue = VecDeque::from([WeylElt::identity()]);
    while let Some(w) = queue.pop_front() {
        for g in [WeylElt::s_alpha(), WeylElt::s_beta()] {
            let n = w.compose(&g);
            if seen.insert(n.cols) {
                out.push(n.clone());
                queue.push_back(n);
            }
        }
    }
    out
}

/// Minimal-length representatives of W_L2 \ W / W_L2, with W_L2 = {1, s_alpha}.
pub fn bruhat_double_cosets_q2() -> Vec<WeylElt> {
    let w = weyl_group();
    let levi = [WeylElt::identity(), WeylElt::s_alpha()];
    let mut assigned: Vec<Option<usize>> = vec![None; w.len()];
    let mut reps: Vec<WeylElt> = vec![];
    for (i, x) in w.iter().enumerate() {
        if assigned[i].is_some() {
            continue;
        }
        let idx = reps.len();
        let mut best = x.clone();
        for l in &levi {
            for r in &levi {
                let y = l.compose(x).compose(r);
                let j = w.iter().position(|z| z.same_element(&y)).expect("closed");
                assigned[j] = Some(idx);
                if w[j].length() < best.length() {
                    best = w[j].clone();
                }
            }
        }
        reps.push(best);
    }
    reps.sort_by_key(|r| r.length());
    reps
}

/// The 7-dimensional representation's weights: short roots and 0.
pub fn seven_dim_weights() -> Vec<Weight> {
    let mut w: Vec<Weight> = roots().into_iter().filter(|&r| is_short(r)).collect();
    w.push(Weight::new(0, 0));
    w
}

/// Weights of the 7-dim representation under the commuting SL2's of the
/// short root alpha and the long root 3alpha+2beta, as (h_short, h_long).
pub fn seven_dim_bigrading() -> Vec<(i64, i64)> {
    let long = Weight::new(3, 2);
    seven_dim_weights()
        .into_iter()
        .map(|w| (w.pair_alpha_coroot(), 2 * w.form(long) / long.form(long)))
        .collect()
}

/// Weights of the dual group's 7-dim representation as cocharacters of T:
/// the coroots of the long roots and 0, each as (<e1, c>, <e2, c>).
pub fn dual_seven_dim_cocharacters() -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = roots()
        .into_iter()
        .filter(|&r| !is_short(r))
        .map(|g| {
            let n = g.form(g);
            (2 * E1.form(g) / n, 2 * E2.form(g) / n)
        })
        .collect();
    out.push((0, 0));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Parabolic {
    Q1,
    Q2,
    B,
}

impl Parabolic {
    pub fn levi_root(self) -> Option<Weight> {
        match self {
            Self::Q1 => Some(BETA),
            Self::Q2 => Some(ALPHA),
            Self::B => None,
        }
    }

    pub fn radical_roots(self) -> Vec<Weight> {
        let l = self.levi_root();
        positive_roots().into_iter().filter(|r| Some(*r) != l).collect()
    }

    /// |.| exponents (on t1, t2) of the modulus character.
    pub fn modulus_exponents(self) -> (i64, i64) {
        let s = self.radical_roots().into_iter().fold(Weight::new(0, 0), Weight::add);
        s.e_coords()
    }

    /// Weights the two GL2 entries attach to.
    pub fn levi_weights(self) -> Option<(Weight, Weight)> {
        match self {
            Self::Q1 => Some((E2, ALPHA)),
            Self::Q2 => Some((E1, E2)),
            Self::B => None,
        }
    }
}

/// Presented abelian group of character symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharAlgebra {
    names: Vec<String>,
    hnf: Vec<Vec<i64>>,
}

impl CharAlgebra {
    /// Relations are exponent vectors r meaning prod g_i^{r_i} = 1.
    pub fn new(names: Vec<String>, relations: Vec<Vec<i64>>) -> Result<Self> {
        for r in &relations {
            if r.len() != names.len() {
                return Err(Error::Parse("relation length does not match the alphabet".into()));
            }
        }
        Ok(Self { hnf: hermite(relations, names.len()), names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn relation_rows(&self) -> &[Vec<i64>] {
        &self.hnf
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn one(&self) -> FCharExpr {
        FCharExpr { exps: vec![0; self.names.len()], s: Ratio::zero() }
    }

    pub fn abs(&self, s: Ratio<i64>) -> FCharExpr {
        FCharExpr { exps: vec![0; self.names.len()], s }
    }

    pub fn sym(&self, name: &str) -> Result<FCharExpr> {
        let i = self.index(name).ok_or_else(|| Error::Parse(format!("unknown symbol `{name}`")))?;
        let mut e = self.one();
        e.exps[i] = 1;
        Ok(e)
    }

    pub fn normalize(&self, e: &FCharExpr) -> FCharExpr {
        let mut v = e.exps.clone();
        for row in &self.hnf {
            let c = row.iter().position(|&x| x != 0).expect("nonzero row");
            let d = row[c];
            let q = v[c].div_euclid(d);
            if q != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= q * r;
                }
            }
        }
        FCharExpr { exps: v, s: e.s }
    }

    pub fn eq(&self, a: &FCharExpr, b: &FCharExpr) -> bool {
        self.normalize(a) == self.normalize(b)
    }

    pub fn is_unitary(&self, a: &FCharExpr) -> bool {
        a.s.is_zero()
    }

    pub fn is_trivial(&self, a: &FCharExpr) -> bool {
        self.eq(a, &self.one())
    }

    /// a / b == |.|^{+-1}.
    pub fn ratio_is_abs_pm1(&self, a: &FCharExpr, b: &FCharExpr) -> bool {
        let r = a.mul(&b.inv());
        let unit = FCharExpr { exps: r.exps.clone(), s: Ratio::zero() };
        self.is_trivial(&unit) && (r.s == Ratio::from_integer(1) || r.s == Ratio::from_integer(-1))
    }

    pub fn render(&self, e: &FCharExpr) -> String {
        let n = self.normalize(e);
        let mut parts = vec![];
        for (name, &x) in self.names.iter().zip(&n.exps) {
            match x {
                0 => {}
                1 => parts.push(name.clone()),
                _ => parts.push(format!("{name}^{x}")),
            }
        }
        if !n.s.is_zero() {
            parts.push(format!("|.|^{}", crate::charlib::fmt_ratio(&n.s)));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn render_torus(&self, t: &TorusChar) -> String {
        format!("({}, {})", self.render(&t.0), self.render(&t.1))
    }
}

/// Echelon form over Z with positive pivots, zero rows dropped.
fn hermite(mut rows: Vec<Vec<i64>>, n: usize) -> Vec<Vec<i64>> {
    let mut out = vec![];
    for col in 0..n {
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| rows[i][col].abs()).expect("nonempty");
            for &i in &nz {
                if i != piv {
                    let q = rows[i][col] / rows[piv][col];
                    let pr = rows[piv].clone();
                    for (x, y) in rows[i].iter_mut().zip(&pr) {
                        *x -= q * y;
                    }
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| rows[i][col] != 0) {
            let mut r = rows.remove(i);
            if r[col] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            out.push(r);
        }
    }
    // reduce entries above pivots
    for i in 0..out.len() {
        let c = out[i].iter().position(|&x| x != 0).expect("pivot");
        let d = out[i][c];
        for j in 0..i {
            let q = out[j][c].div_euclid(d);
            if q != 0 {
                let pr = out[i].clone();
                for (x, y) in out[j].iter_mut().zip(&pr) {
                    *x -= q * y;
                }
            }
        }
    }
    out
}

/// A symbolic character prod g_i^{e_i} * |.|^s.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FCharExpr {
    pub exps: Vec<i64>,
    pub s: Ratio<i64>,
}

impl FCharExpr {
    pub fn mul(&self, o: &Self) -> Self {
        Self { exps: self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect(), s: self.s + o.s }
    }

    pub fn inv(&self) -> Self {
        Self { exps: self.exps.iter().map(|a| -a).collect(), s: -self.s }
    }

    pub fn pow(&self, k: i64) -> Self {
        Self { exps: self.exps.iter().map(|a| a * k).collect(), s: self.s * k }
    }

    pub fn twist(&self, s: Ratio<i64>) -> Self {
        Self { exps: self.exps.clone(), s: self.s + s }
    }
}

/// t -> eta1(t1) eta2(t2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusChar(pub FCharExpr, pub FCharExpr);

impl TorusChar {
    pub fn trivial(alg: &CharAlgebra) -> Self {
        Self(alg.one(), alg.one())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self(self.0.mul(&o.0), self.1.mul(&o.1))
    }

    pub fn normalize(&self, alg: &CharAlgebra) -> Self {
        Self(alg.normalize(&self.0), alg.normalize(&self.1))
    }
}

/// eta o lambda as a torus character.
pub fn attach(eta: &FCharExpr, w: Weight) -> TorusChar {
    let (x, y) = w.e_coords();
    TorusChar(eta.pow(x), eta.pow(y))
}

/// Action of w on eta1 (x) e1 + eta2 (x) e2.
pub fn weyl_act(w: &WeylElt, c: &TorusChar) -> TorusChar {
    attach(&c.0, w.act(E1)).mul(&attach(&c.1, w.act(E2)))
}

pub fn torus_char_equal(alg: &CharAlgebra, a: &TorusChar, b: &TorusChar) -> bool {
    a.normalize(alg) == b.normalize(alg)
}

/// First Weyl element (in breadth-first order) carrying a to b.
pub fn weyl_equivalent(alg: &CharAlgebra, a: &TorusChar, b: &TorusChar) -> Option<WeylElt> {
    weyl_group().into_iter().find(|w| torus_char_equal(alg, &weyl_act(w, a), b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuotientTag {
    FullInduced,
    UniqueIrreducibleQuotient,
    IrreducibleInduced,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeviData {
    Pair(FCharExpr, FCharExpr),
    Torus(TorusChar),
    /// A one-dimensional character eta o det of the Levi.
    Det(FCharExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedDescriptor {
    pub source: Parabolic,
    pub levi: LeviData,
    pub tag: QuotientTag,
}

/// Torus character of a parabolic's Levi pair (transitivity of induction).
pub fn induce_to_borel(d: &InducedDescriptor) -> Result<TorusChar> {
    match (&d.source, &d.levi) {
        (Parabolic::B, LeviData::Torus(t)) => Ok(t.clone()),
        (q, LeviData::Pair(a, b)) if *q != Parabolic::B => {
            let (wa, wb) = q.levi_weights().expect("GL2 Levi");
            Ok(attach(a, wa).mul(&attach(b, wb)))
        }
        _ => Err(Error::Precondition("malformed Levi data".into())),
    }
}

/// Read a torus character as a Levi pair of Q1 or Q2.
pub fn read_pair(q: Parabolic, t: &TorusChar) -> (FCharExpr, FCharExpr) {
    match q {
        Parabolic::Q2 => (t.0.clone(), t.1.clone()),
        // eta_a at alpha+beta, eta_b at alpha: t = (eta_b, eta_a eta_b^-1)
        Parabolic::Q1 => (t.0.mul(&t.1), t.0.clone()),
        Parabolic::B => unreachable!("no GL2 Levi"),
    }
}

fn swap_elt(q: Parabolic) -> WeylElt {
    match q {
        Parabolic::Q1 => WeylElt::s_beta(),
        Parabolic::Q2 => WeylElt::s_alpha(),
        Parabolic::B => unreachable!(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RewriteStep {
    pub step: usize,
    pub action: String,
    pub before: String,
    pub after: String,
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct RewriteResult {
    pub result: InducedDescriptor,
    pub steps: Vec<RewriteStep>,
    pub tags: Vec<QuotientTag>,
}

impl RewriteResult {
    pub fn all_verified(&self) -> bool {
        self.steps.iter().all(|s| s.verified)
    }
}

/// Terminal reading: a GL2 pair (eta|.|^{1/2}, eta|.|^{-1/2}) in Q2 or Q1.
fn terminal(alg: &CharAlgebra, t: &TorusChar) -> Option<(Parabolic, FCharExpr)> {
    for q in [Parabolic::Q2, Parabolic::Q1] {
        let (a, b) = read_pair(q, t);
        let r = a.mul(&b.inv());
        let unit = FCharExpr { exps: r.exps.clone(), s: Ratio::zero() };
        if alg.is_trivial(&unit) && r.s == Ratio::from_integer(1) {
            return Some((q, alg.normalize(&a.twist(Ratio::new(-1, 2)))));
        }
    }
    None
}

/// Rewrite an induced representation from Q1 or Q2 into the form of its
/// Langlands quotient, logging each step with an equality check.
pub fn langlands_rewrite(alg: &CharAlgebra, d: &InducedDescriptor) -> Result<RewriteResult> {
    let (a, b) = match &d.levi {
        LeviData::Pair(a, b) if d.source != Parabolic::B => (a.clone(), b.clone()),
        _ => return Err(Error::Precondition("rewrite needs a GL2 Levi pair from Q1 or Q2".into())),
    };
    let start = induce_to_borel(d)?.normalize(alg);
    let (ra, rb) = read_pair(d.source, &start);
    let mut steps = vec![RewriteStep {
        step: 0,
        action: format!("induce {:?} pair to the Borel", d.source),
        before: format!("{:?}({}, {})", d.source, alg.render(&a), alg.render(&b)),
        after: alg.render_torus(&start),
        verified: alg.eq(&ra, &a) && alg.eq(&rb, &b),
    }];
    // breadth-first search, parent links for the path
    let mut nodes: Vec<(TorusChar, Option<(usize, Parabolic)>)> = vec![(start.clone(), None)];
    let mut queue = VecDeque::from([0usize]);
    let mut found = None;
    while let Some(i) = queue.pop_front() {
        let t = nodes[i].0.clone();
        if let Some(hit) = terminal(alg, &t) {
            found = Some((i, hit));
            break;
        }
        for q in [Parabolic::Q2, Parabolic::Q1] {
            let (x, y) = read_pair(q, &t);
            if alg.ratio_is_abs_pm1(&x, &y) {
                continue;
            }
            let n = weyl_act(&swap_elt(q), &t).normalize(alg);
            if nodes.iter().any(|(m, _)| *m == n) {
                continue;
            }
            nodes.push((n, Some((i, q))));
            queue.push_back(nodes.len() - 1);
        }
    }
    let Some((end, (q, eta))) = found else {
        steps.push(RewriteStep {
            step: 1,
            action: format!("searched {} Weyl-conjugate parameters; no quotient pattern", nodes.len()),
            before: alg.render_torus(&start),
            after: alg.render_torus(&start),
            verified: true,
        });
        return Ok(RewriteResult { result: d.clone(), steps, tags: vec![QuotientTag::FullInduced] });
    };
    let mut path = vec![end];
    while let Some((p, _)) = nodes[*path.last().expect("nonempty")].1 {
        path.push(p);
    }
    path.reverse();
    for w in path.windows(2) {
        let (from, to) = (&nodes[w[0]].0, &nodes[w[1]].0);
        let q = nodes[w[1]].1.expect("child").1;
        let (x, y) = read_pair(q, from);
        let (x2, y2) = read_pair(q, to);
        let ok = torus_char_equal(alg, &weyl_act(&swap_elt(q), from), to)
            && alg.eq(&x, &y2)
            && alg.eq(&y, &x2)
            && !alg.ratio_is_abs_pm1(&x, &y);
        steps.push(RewriteStep {
            step: steps.len(),
            action: format!(
                "read as {q:?}({}, {}); GL2 induction irreducible, swap to {q:?}({}, {})",
                alg.render(&x),
                alg.render(&y),
                alg.render(&x2),
                alg.render(&y2)
            ),
            before: alg.render_torus(from),
            after: alg.render_torus(to),
            verified: ok,
        });
    }
    let last = &nodes[end].0;
    let (x, y) = read_pair(q, last);
    let ok = alg.eq(&x, &eta.twist(Ratio::new(1, 2))) && alg.eq(&y, &eta.twist(Ratio::new(-1, 2)));
    steps.push(RewriteStep {
        step: steps.len(),
        action: format!(
            "read as {q:?}({}, {}) = ({e}|.|^1/2, {e}|.|^-1/2); unique irreducible quotient i_{q:?}({e} o det)",
            alg.render(&x),
            alg.render(&y),
            e = alg.render(&eta)
        ),
        before: alg.render_torus(last),
        after: format!("i_{q:?}({} o det)", alg.render(&eta)),
        verified: ok,
    });
    let mut tags = vec![QuotientTag::UniqueIrreducibleQuotient];
    if alg.is_unitary(&eta) && !alg.is_trivial(&eta.pow(2)) {
        tags.push(QuotientTag::IrreducibleInduced);
        steps.push(RewriteStep {
            step: steps.len(),
            action: format!("{} unitary with nontrivial square: i_{q:?}({} o det) is irreducible", alg.render(&eta), alg.render(&eta)),
            before: format!("i_{q:?}({} o det)", alg.render(&eta)),
            after: format!("i_{q:?}({} o det)", alg.render(&eta)),
            verified: true,
        });
    }
    let tag = *tags.last().expect("nonempty");
    Ok(RewriteResult { result: InducedDescriptor { source: q, levi: LeviData::Det(eta), tag }, steps, tags })
}

/// Torus-level identity i_Q2(chi^-1|.|^1/2, chi^2) = i_Q1(chi|.|^1/2, chi^-1|.|^1/2).
pub fn split_rewrite_check(alg: &CharAlgebra, chi: &FCharExpr) -> Result<bool> {
    let h = Ratio::new(1, 2);
    let q1 = InducedDescriptor {
        source: Parabolic::Q1,
        levi: LeviData::Pair(chi.twist(h), chi.inv().twist(h)),
        tag: QuotientTag::FullInduced,
    };
    let q2 = InducedDescriptor {
        source: Parabolic::Q2,
        levi: LeviData::Pair(chi.inv().twist(h), chi.pow(2)),
        tag: QuotientTag::FullInduced,
    };
    Ok(torus_char_equal(alg, &induce_to_borel(&q1)?, &induce_to_borel(&q2)?))
}

// ---- s-expression input for the CLI ----

#[derive(Clone, Debug, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(s: &str) -> Vec<String> {
    s.replace('(', " ( ").replace(')', " ) ").split_whitespace().map(String::from).collect()
}

fn parse_sexp(tokens: &[String], pos: &mut usize) -> Result<Sexp> {
    let t = tokens.get(*pos).ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
    *pos += 1;
    match t.as_str() {
        "(" => {
            let mut items = vec![];
            loop {
                match tokens.get(*pos) {
                    None => return Err(Error::Parse("unbalanced parentheses".into())),
                    Some(x) if x == ")" => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    _ => items.push(parse_sexp(tokens, pos)?),
                }
            }
        }
        ")" => Err(Error::Parse("unexpected `)`".into())),
        _ => Ok(Sexp::Atom(t.clone())),
    }
}

fn collect_symbols(e: &Sexp, out: &mut Vec<String>) {
    match e {
        Sexp::Atom(a) => {
            let head = ["rewrite", "rel", "=", "*", "inv", "^", "Q1", "Q2", "1"];
            if !head.contains(&a.as_str()) && !a.starts_with("abs") && a.parse::<i64>().is_err() && !out.contains(a) {
                out.push(a.clone());
            }
        }
        Sexp::List(xs) => {
            for (i, x) in xs.iter().enumerate() {
                // the exponent slot of (^ e n) is a number
                if i == 2 && matches!(&xs[0], Sexp::Atom(h) if h == "^") {
                    continue;
                }
                collect_symbols(x, out);
            }
        }
    }
}

fn eval_expr(alg: &CharAlgebra, e: &Sexp) -> Result<FCharExpr> {
    match e {
        Sexp::Atom(a) if a == "1" => Ok(alg.one()),
        Sexp::Atom(a) if a.starts_with("abs") => {
            let s = a.strip_prefix("abs^").ok_or_else(|| Error::Parse(format!("expected abs^<q>, got `{a}`")))?;
            Ok(alg.abs(crate::charlib::parse_ratio(s)?))
        }
        Sexp::Atom(a) => alg.sym(a),
        Sexp::List(xs) => {
            let head = match xs.first() {
                Some(Sexp::Atom(h)) => h.as_str(),
                _ => return Err(Error::Parse("expression list needs an operator".into())),
            };
            match head {
                "*" => xs[1..].iter().try_fold(alg.one(), |acc, x| Ok(acc.mul(&eval_expr(alg, x)?))),
                "inv" if xs.len() == 2 => Ok(eval_expr(alg, &xs[1])?.inv()),
                "^" if xs.len() == 3 => {
                    let n = match &xs[2] {
                        Sexp::Atom(n) => n.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent `{n}`")))?,
                        _ => return Err(Error::Parse("exponent must be an integer".into())),
                    };
                    Ok(eval_expr(alg, &xs[1])?.pow(n))
                }
                _ => Err(Error::Parse(format!("unknown operator `{head}`"))),
            }
        }
    }
}

/// Parsed rewrite request.
#[derive(Clone, Debug)]
pub struct RewriteInput {
    pub algebra: CharAlgebra,
    pub descriptor: InducedDescriptor,
}

pub const DEFAULT_REWRITE_INPUT: &str =
    "(rewrite (rel (= (^ mu 2) omega)) (rel (= (^ omega 2) 1)) (Q1 (* mu abs^1/2) (* (inv mu) abs^1/2)))";

/// Grammar: (rewrite (rel (= E E))* (Q1|Q2 E E)) with
/// E := symbol | 1 | abs^<q> | (* E ...) | (inv E) | (^ E n).
pub fn parse_rewrite_input(s: &str) -> Result<RewriteInput> {
    let tokens = tokenize(s);
    let mut pos = 0;
    let tree = parse_sexp(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::Parse("trailing input after the rewrite form".into()));
    }
    let items = match &tree {
        Sexp::List(xs) if matches!(xs.first(), Some(Sexp::Atom(h)) if h == "rewrite") => &xs[1..],
        _ => return Err(Error::Parse("input must be (rewrite ...)".into())),
    };
    let mut names = vec![];
    collect_symbols(&tree, &mut names);
    let probe = CharAlgebra::new(names.clone(), vec![])?;
    let mut rels = vec![];
    let mut target = None;
    for it in items {
        let Sexp::List(xs) = it else { return Err(Error::Parse("expected a list".into())) };
        match xs.first() {
            Some(Sexp::Atom(h)) if h == "rel" => {
                let eq = match xs.get(1) {
                    Some(Sexp::List(e)) if e.len() == 3 && e[0] == Sexp::Atom("=".into()) => e,
                    _ => return Err(Error::Parse("relation must be (rel (= lhs rhs))".into())),
                };
                let l = eval_expr(&probe, &eq[1])?;
                let r = eval_expr(&probe, &eq[2])?;
                let d = l.mul(&r.inv());
                if !d.s.is_zero() {
                    return Err(Error::Parse("relations may not involve |.|".into()));
                }
                rels.push(d.exps);
            }
            Some(Sexp::Atom(h)) if h == "Q1" || h == "Q2" => {
                if xs.len() != 3 {
                    return Err(Error::Parse("a Levi pair needs two characters".into()));
                }
                let q = if h == "Q1" { Parabolic::Q1 } else { Parabolic::Q2 };
                target = Some((q, xs[1].clone(), xs[2].clone()));
            }
            _ => return Err(Error::Parse("expected (rel ...) or (Q1|Q2 ...)".into())),
        }
    }
    let algebra = CharAlgebra::new(names, rels)?;
    let (q, a, b) = target.ok_or_else(|| Error::Parse("missing (Q1 ...) or (Q2 ...) pair".into()))?;
    let descriptor = InducedDescriptor {
        source: q,
        levi: LeviData::Pair(eval_expr(&algebra, &a)?, eval_expr(&algebra, &b)?),
        tag: QuotientTag::FullInduced,
    };
    Ok(RewriteInput { algebra, descriptor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mu_alg() -> CharAlgebra {
        CharAlgebra::new(vec!["mu".into(), "omega".into()], vec![vec![2, -1], vec![0, 2]]).unwrap()
    }

    #[test]
    fn weyl_structure() {
        let w = weyl_group();
        assert_eq!(w.len(), 12);
        let sa = WeylElt::s_alpha();
        let sb = WeylElt::s_beta();
        assert!(sa.compose(&sa).same_element(&WeylElt::identity()));
        assert!(sb.compose(&sb).same_element(&WeylElt::identity()));
        let c = sa.compose(&sb);
        let mut x = WeylElt::identity();
        for i in 1..=6 {
            x = x.compose(&c);
            assert_eq!(x.same_element(&WeylElt::identity()), i == 6);
        }
        assert_eq!(sa.act(ALPHA), ALPHA.neg());
        assert_eq!(sa.act(BETA), Weight::new(3, 1));
        for g in &w {
            let mut img: Vec<Weight> = roots().into_iter().map(|r| g.act(r)).collect();
            img.sort();
            let mut r = roots();
            r.sort();
            assert_eq!(img, r);
        }
    }

    #[test]
    fn moduli_and_cosets() {
        assert_eq!(Parabolic::Q1.modulus_exponents(), (5, 0));
        assert_eq!(Parabolic::Q2.modulus_exponents(), (3, 3));
        assert_eq!(Parabolic::B.modulus_exponents(), (4, 2));
        let reps = bruhat_double_cosets_q2();
        let lens: Vec<usize> = reps.iter().map(|r| r.length()).collect();
        assert_eq!(lens, vec![0, 1, 3, 5]);
        assert_eq!(reps[1].word, "b");
        assert_eq!(reps[2].word, "bab");
        assert_eq!(reps[3].word, "babab");
    }

    #[test]
    fn seven_dim() {
        let mut w = seven_dim_weights();
        w.sort();
        let mut want = vec![Weight::new(0, 0)];
        for r in [ALPHA, E2, E1] {
            want.push(r);
            want.push(r.neg());
        }
        want.sort();
        assert_eq!(w, want);
        let mut g = seven_dim_bigrading();
        g.sort();
        assert_eq!(g, vec![(-2, 0), (-1, -1), (-1, 1), (0, 0), (1, -1), (1, 1), (2, 0)]);
    }

    #[test]
    fn dual_weights() {
        let mut c = dual_seven_dim_cocharacters();
        c.sort();
        assert_eq!(c, vec![(-1, -1), (-1, 0), (0, -1), (0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn relations_normal_form() {
        let a = mu_alg();
        let mu = a.sym("mu").unwrap();
        assert!(a.is_trivial(&mu.pow(4)));
        assert!(a.eq(&mu.pow(2), &a.sym("omega").unwrap()));
        assert!(!a.is_trivial(&mu.pow(2)));
        assert!(torus_char_equal(&a, &attach(&mu.pow(4), E1), &TorusChar::trivial(&a)));
    }

    #[test]
    fn borel_examples() {
        let a = mu_alg();
        let mu = a.sym("mu").unwrap();
        let h = Ratio::new(1, 2);
        let d = InducedDescriptor { source: Parabolic::Q1, levi: LeviData::Pair(mu.twist(h), mu.inv().twist(h)), tag: QuotientTag::FullInduced };
        let t = induce_to_borel(&d).unwrap();
        assert!(torus_char_equal(&a, &t, &TorusChar(mu.inv().twist(h), mu.pow(2))));
        let d2 = InducedDescriptor { source: Parabolic::Q2, levi: LeviData::Pair(mu.inv().twist(h), mu.pow(2)), tag: QuotientTag::FullInduced };
        assert!(torus_char_equal(&a, &induce_to_borel(&d2).unwrap(), &t));
        let w = WeylElt::s_beta().compose(&WeylElt::s_alpha());
        assert!(weyl_equivalent(&a, &t, &weyl_act(&w, &t)).is_some());
        assert!(split_rewrite_check(&a, &mu).unwrap());
    }

    #[test]
    fn chain_reproduced() {
        let inp = parse_rewrite_input(DEFAULT_REWRITE_INPUT).unwrap();
        let r = langlands_rewrite(&inp.algebra, &inp.descriptor).unwrap();
        assert!(r.all_verified());
        assert_eq!(r.tags, vec![QuotientTag::UniqueIrreducibleQuotient, QuotientTag::IrreducibleInduced]);
        assert_eq!(r.result.source, Parabolic::Q2);
        let LeviData::Det(eta) = &r.result.levi else { panic!() };
        assert!(inp.algebra.eq(eta, &inp.algebra.sym("mu").unwrap()));
        // start, Q2 swap, Q1 swap, quotient, irreducibility
        assert_eq!(r.steps.len(), 5);
    }

    #[test]
    fn immediate_and_generic() {
        let a = CharAlgebra::new(vec!["eta".into(), "nu".into()], vec![]).unwrap();
        let eta = a.sym("eta").unwrap();
        let h = Ratio::new(1, 2);
        let d = InducedDescriptor { source: Parabolic::Q2, levi: LeviData::Pair(eta.twist(h), eta.twist(-h)), tag: QuotientTag::FullInduced };
        let r = langlands_rewrite(&a, &d).unwrap();
        assert_eq!(r.steps.len(), 3);
        let nu = a.sym("nu").unwrap();
        let g = InducedDescriptor { source: Parabolic::Q1, levi: LeviData::Pair(eta.clone(), nu), tag: QuotientTag::FullInduced };
        let r = langlands_rewrite(&a, &g).unwrap();
        assert_eq!(r.tags, vec![QuotientTag::FullInduced]);
        assert_eq!(r.result, g);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_rewrite_input("(rewrite (Q1 mu)").is_err());
        assert!(parse_rewrite_input("(foo)").is_err());
        assert!(parse_rewrite_input("(rewrite (rel (= mu abs^1)) (Q1 mu mu))").is_err());
    }

    proptest! {
        #[test]
        fn coordinates_consistent(m in -6i64..6, k in -6i64..6, e in -3i64..4) {
            let a = mu_alg();
            let eta = a.sym("mu").unwrap().pow(e);
            let w = Weight::new(m, k);
            let (x, y) = w.e_coords();
            prop_assert_eq!(Weight::from_e_coords(x, y), w);
            // alpha = e1 - e2, beta = 2e2 - e1 evaluated additively
            let via = attach(&eta, ALPHA).0.pow(m).mul(&attach(&eta, BETA).0.pow(k));
            prop_assert!(a.eq(&attach(&eta, w).0, &via));
        }

        #[test]
        fn weyl_action_is_linear(i in 0usize..12, x in -3i64..3, y in -3i64..3) {
            let a = mu_alg();
            let w = &weyl_group()[i];
            let mu = a.sym("mu").unwrap();
            let t = TorusChar(mu.pow(x), mu.pow(y));
            let back = weyl_act(&w.inverse(), &weyl_act(w, &t));
            prop_assert!(torus_char_equal(&a, &back, &t));
        }
    }
}
