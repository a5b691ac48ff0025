//! Subgroups of `V×V` as Goursat data `(A, B, C, D, φ)`.
//!
//! A subgroup `𝒰` is stored as a subspace of `(F2)^{2n}` with the first
//! factor in the low `n` bits. Its data are
//!
//! * `A`, `C`: the projections on the first and second factor,
//! * `B = {a : (a, 0) ∈ 𝒰}`, `D = {c : (0, c) ∈ 𝒰}`,
//! * `φ : A → C` with `𝒰 = {(a, φ(a) + d)}`, stored on the echelon basis of
//!   `A` with every image reduced modulo `D`.
//!
//! Both halves are read off canonical echelon forms: in the stored form the
//! basis vectors whose pivot lies in the low half span `B × {0}`, and in the
//! form with the factors swapped they span `{0} × D` while the remaining
//! vectors give the basis of `A` together with the reduced values of `φ`.

use crate::error::{Error, Result};
use crate::f2lin::{check_table, enumerate_subspaces, mask, Subspace, Word};
use serde::{Deserialize, Serialize};

/// A subgroup of `V×V`, `V = (F2)^n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairSubgroup {
    n: u32,
    space: Subspace,
}

impl PairSubgroup {
    pub fn new(n: u32, space: Subspace) -> Result<Self> {
        if n == 0 || n > 16 {
            return Err(Error::WidthOutOfRange(n));
        }
        if space.width() != 2 * n {
            return Err(Error::WidthMismatch {
                expected: 2 * n,
                found: space.width(),
            });
        }
        Ok(PairSubgroup { n, space })
    }

    /// Span of the given packed pairs.
    pub fn span<I: IntoIterator<Item = Word>>(n: u32, words: I) -> Result<Self> {
        Self::new(n, Subspace::try_span(2 * n, words)?)
    }

    /// `A × D`.
    pub fn product(a: &Subspace, d: &Subspace) -> Result<Self> {
        if a.width() != d.width() {
            return Err(Error::WidthMismatch {
                expected: a.width(),
                found: d.width(),
            });
        }
        let n = a.width();
        let words = a
            .basis()
            .iter()
            .copied()
            .chain(d.basis().iter().map(|&c| c << n));
        Self::new(n, Subspace::span(2 * n, words))
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn into_space(self) -> Subspace {
        self.space
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.space.dim()
    }

    pub fn is_proper_nontrivial(&self) -> bool {
        self.space.is_proper_nontrivial()
    }

    /// Whether `𝒰 = A × D`, i.e. `B = A`.
    pub fn is_product(&self) -> bool {
        let t = decompose(self);
        t.a == t.b
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GoursatTriple {
    pub a: Subspace,
    pub b: Subspace,
    pub c: Subspace,
    pub d: Subspace,
    /// `φ` on the echelon basis of `a`, in basis order.
    pub phi: Vec<Word>,
}

impl GoursatTriple {
    pub fn n(&self) -> u32 {
        self.a.width()
    }

    /// `φ(x)` for `x ∈ A`.
    pub fn apply_phi(&self, x: Word) -> Word {
        let coords = self.a.coordinates(x);
        self.phi
            .iter()
            .enumerate()
            .filter(|(i, _)| (coords >> i) & 1 == 1)
            .fold(0, |acc, (_, &y)| acc ^ y)
    }

    /// `ker φ` for the stored `φ`.
    pub fn phi_kernel(&self) -> Subspace {
        // kernel of the coordinate matrix, mapped back through A's basis
        let n = self.n();
        let k = self.a.dim();
        let graph = Subspace::span(
            k + n,
            (0..k).map(|i| (self.phi[i as usize] << k) | (1 << i)),
        );
        let coords = graph.basis().iter().filter(|&&w| w >> k == 0).copied();
        Subspace::span(n, coords.map(|c| self.a.element(c as u64)))
    }
}

/// `Word` for the pair `(x1, x2)`.
#[inline]
pub fn pack(n: u32, x1: Word, x2: Word) -> Word {
    x1 | (x2 << n)
}

/// `(x1, x2)` from a packed pair.
#[inline]
pub fn unpack(n: u32, x: Word) -> (Word, Word) {
    (x & mask(n), x >> n)
}

#[inline]
fn swap_halves(n: u32, x: Word) -> Word {
    let (x1, x2) = unpack(n, x);
    pack(n, x2, x1)
}

/// Canonical Goursat data of a subgroup.
pub fn decompose(u: &PairSubgroup) -> GoursatTriple {
    let n = u.n;
    let low_pivot = |w: &&Word| **w >> n == 0;
    let b = Subspace::span(n, u.space.basis().iter().filter(low_pivot).copied());
    let c = Subspace::span(
        n,
        u.space
            .basis()
            .iter()
            .filter(|w| !low_pivot(w))
            .map(|&w| w >> n),
    );
    let swapped = u.space.image(2 * n, |x| swap_halves(n, x));
    let d = Subspace::span(n, swapped.basis().iter().filter(low_pivot).copied());
    let (a_basis, phi): (Vec<Word>, Vec<Word>) = swapped
        .basis()
        .iter()
        .filter(|w| !low_pivot(w))
        .map(|&w| (w >> n, w & mask(n)))
        .unzip();
    let a = Subspace::span(n, a_basis.iter().copied());
    debug_assert_eq!(a.basis(), &a_basis[..]);
    GoursatTriple { a, b, c, d, phi }
}

/// `{(a, φ(a) + d) : a ∈ A, d ∈ D}`, after checking that `(A, B, C, D, φ)`
/// is consistent.
pub fn subgroup_from_triple(t: &GoursatTriple) -> Result<PairSubgroup> {
    let n = t.a.width();
    for (name, s) in [("B", &t.b), ("C", &t.c), ("D", &t.d)] {
        if s.width() != n {
            return Err(Error::InvalidTriple(format!(
                "{name} has width {}, A has width {n}",
                s.width()
            )));
        }
    }
    if t.phi.len() != t.a.dim() as usize {
        return Err(Error::InvalidTriple(format!(
            "phi has {} images for dim A = {}",
            t.phi.len(),
            t.a.dim()
        )));
    }
    if let Some(&bad) = t.phi.iter().find(|&&y| y & !mask(n) != 0) {
        return Err(Error::InvalidTriple(format!(
            "phi image {bad:#x} exceeds {n} bits"
        )));
    }
    if !t.b.is_subspace_of(&t.a) {
        return Err(Error::InvalidTriple("B is not contained in A".into()));
    }
    if !t.d.is_subspace_of(&t.c) {
        return Err(Error::InvalidTriple("D is not contained in C".into()));
    }
    if t.a.dim() - t.b.dim() != t.c.dim() - t.d.dim() {
        return Err(Error::InvalidTriple(
            "A/B and C/D have different orders".into(),
        ));
    }
    let words =
        t.a.basis()
            .iter()
            .zip(&t.phi)
            .map(|(&a, &y)| pack(n, a, y))
            .chain(t.d.basis().iter().map(|&d| pack(n, 0, d)));
    let u = PairSubgroup::new(n, Subspace::span(2 * n, words))?;
    let back = decompose(&u);
    if back.c != t.c {
        return Err(Error::InvalidTriple("phi(A) + D differs from C".into()));
    }
    if back.b != t.b {
        return Err(Error::InvalidTriple(
            "phi does not induce an isomorphism A/B -> C/D".into(),
        ));
    }
    if back.d != t.d || back.a != t.a {
        return Err(Error::Internal("Goursat round trip changed A or D".into()));
    }
    Ok(u)
}

/// Outcome of the necessary conditions for `𝒰₁ρ̄ = 𝒰₂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `ker φ₁ ≤ D₂`.
    pub kernel_in_d2: bool,
    /// `D₂ ≤ A₁`.
    pub d2_in_a1: bool,
    /// `A₂ = A₁φ₁ + D₁`.
    pub a2_is_image: bool,
    /// `D₂φ₁ ≤ D₁`.
    pub d2_phi_in_d1: bool,
    /// When `D₁ = D₂ = {0}`: `ρ` is linear on `A₂`.
    pub linear_on_a2: Option<bool>,
    /// When both subgroups are products: `D₁ = A₂` and `D₂ = A₁`.
    pub product_swap: Option<bool>,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.kernel_in_d2
            && self.d2_in_a1
            && self.a2_is_image
            && self.d2_phi_in_d1
            && self.linear_on_a2 != Some(false)
            && self.product_swap != Some(false)
    }
}

/// Whether `f` is additive on the subspace `u`.
pub fn is_linear_on(f: &[Word], u: &Subspace) -> bool {
    let images: Vec<Word> = u.basis().iter().map(|&b| f[b as usize]).collect();
    let f0 = f[0];
    (0..u.size()).all(|c| {
        let x = u.element(c);
        let y = images
            .iter()
            .enumerate()
            .filter(|(i, _)| (c >> i) & 1 == 1)
            .fold(0, |acc, (_, &v)| acc ^ v);
        f[x as usize] == y && f0 == 0
    })
}

/// Evaluates the four conditions and the two clauses on a propagating pair.
/// `rho` is a table on `V` with `rho[0] = 0`.
pub fn check_propagation_conditions(
    rho: &[Word],
    u1: &PairSubgroup,
    u2: &PairSubgroup,
) -> Result<ConditionReport> {
    let n = u1.n;
    if u2.n != n {
        return Err(Error::WidthMismatch {
            expected: n,
            found: u2.n,
        });
    }
    check_table(rho, n)?;
    if rho[0] != 0 {
        return Err(Error::Precondition("rho must fix 0".into()));
    }
    let maps = u1.dim() == u2.dim()
        && u1
            .space
            .elements()
            .all(|x| u2.space.contains(crate::feistel::rho_bar(rho, n, x)));
    if !maps {
        return Err(Error::Precondition(
            "U1 is not mapped onto U2 by the Feistel operator".into(),
        ));
    }
    let t1 = decompose(u1);
    let t2 = decompose(u2);
    let zero = Subspace::zero(n);
    let a1phi_d1 = Subspace::span(n, t1.phi.iter().copied()).sum(&t1.d);
    let d2_in_a1 = t2.d.is_subspace_of(&t1.a);
    let d2_phi_in_d1 = d2_in_a1 && t2.d.basis().iter().all(|&d| t1.d.contains(t1.apply_phi(d)));
    let linear_on_a2 = (t1.d == zero && t2.d == zero).then(|| is_linear_on(rho, &t2.a));
    let product_swap = (t1.a == t1.b && t2.a == t2.b).then(|| t1.d == t2.a && t2.d == t1.a);
    Ok(ConditionReport {
        kernel_in_d2: t1.phi_kernel().is_subspace_of(&t2.d),
        d2_in_a1,
        a2_is_image: t2.a == a1phi_d1,
        d2_phi_in_d1,
        linear_on_a2,
        product_swap,
    })
}

/// Bounds for [`enumerate_triples`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TripleConstraints {
    pub a_dims: Option<Vec<u32>>,
    pub d_dims: Option<Vec<u32>>,
    /// Source subgroup `𝒰₁`: only candidates `𝒰₂` with `A₂ = A₁φ₁ + D₁`,
    /// `D₂ ≤ A₁`, `ker φ₁ ≤ D₂` and `D₂φ₁ ≤ D₁` are produced.
    pub source: Option<GoursatTriple>,
}

/// Largest `n` accepted by [`enumerate_triples`].
pub const MAX_TRIPLE_WIDTH: u32 = 6;

/// Streams the canonical triple of every subgroup of `V×V` allowed by
/// `constraints`, each exactly once.
pub fn enumerate_triples(n: u32, constraints: &TripleConstraints) -> Result<TripleIter> {
    if n == 0 || n > MAX_TRIPLE_WIDTH {
        return Err(Error::Parameter(format!(
            "triple enumeration needs 1 <= n <= {MAX_TRIPLE_WIDTH}, got {n}"
        )));
    }
    let constrained = constraints.a_dims.is_some()
        || constraints.d_dims.is_some()
        || constraints.source.is_some();
    if n >= 5 && !constrained {
        return Err(Error::SearchTooLarge(format!(
            "unconstrained subgroup enumeration of V×V at n={n}"
        )));
    }
    let all = |dims: &Option<Vec<u32>>| -> Result<Vec<Subspace>> {
        Ok(enumerate_subspaces(n, dims.as_deref())?.collect())
    };
    let (a_list, d_list) = match &constraints.source {
        Some(src) => {
            if src.n() != n {
                return Err(Error::WidthMismatch {
                    expected: n,
                    found: src.n(),
                });
            }
            let a2 = Subspace::span(n, src.phi.iter().copied()).sum(&src.d);
            let a_list = if constraints
                .a_dims
                .as_ref()
                .is_none_or(|d| d.contains(&a2.dim()))
            {
                vec![a2]
            } else {
                vec![]
            };
            let ker = src.phi_kernel();
            let d_list = all(&constraints.d_dims)?
                .into_iter()
                .filter(|d2| {
                    d2.is_subspace_of(&src.a)
                        && ker.is_subspace_of(d2)
                        && d2.basis().iter().all(|&x| src.d.contains(src.apply_phi(x)))
                })
                .collect();
            (a_list, d_list)
        }
        None => (all(&constraints.a_dims)?, all(&constraints.d_dims)?),
    };
    Ok(TripleIter {
        n,
        a_list,
        d_list,
        ai: 0,
        di: 0,
        phi_index: 0,
        reps: None,
    })
}

pub struct TripleIter {
    n: u32,
    a_list: Vec<Subspace>,
    d_list: Vec<Subspace>,
    ai: usize,
    di: usize,
    phi_index: u64,
    reps: Option<(Vec<u32>, u64)>,
}

impl Iterator for TripleIter {
    type Item = GoursatTriple;

    fn next(&mut self) -> Option<GoursatTriple> {
        loop {
            let a = self.a_list.get(self.ai)?;
            let Some(d) = self.d_list.get(self.di) else {
                self.ai += 1;
                self.di = 0;
                continue;
            };
            let (free, total) = self.reps.get_or_insert_with(|| {
                let free: Vec<u32> = (0..self.n)
                    .filter(|&i| (d.pivot_mask() >> i) & 1 == 0)
                    .collect();
                let total = 1u64 << (free.len() as u32 * a.dim());
                (free, total)
            });
            if self.phi_index >= *total {
                self.di += 1;
                self.phi_index = 0;
                self.reps = None;
                continue;
            }
            let k = free.len();
            let mut c = self.phi_index;
            let phi: Vec<Word> = (0..a.dim())
                .map(|_| {
                    let part = c & ((1u64 << k) - 1);
                    c = c.checked_shr(k as u32).unwrap_or(0);
                    crate::f2lin::deposit_bits(part, free)
                })
                .collect();
            self.phi_index += 1;
            let n = self.n;
            let c_space = Subspace::span(n, phi.iter().copied()).sum(d);
            let t = GoursatTriple {
                a: a.clone(),
                b: Subspace::zero(n),
                c: c_space,
                d: d.clone(),
                phi,
            };
            let b = t.phi_kernel_mod_d();
            return Some(GoursatTriple { b, ..t });
        }
    }
}

impl GoursatTriple {
    /// `{a ∈ A : φ(a) ∈ D}`.
    fn phi_kernel_mod_d(&self) -> Subspace {
        let n = self.n();
        let k = self.a.dim();
        let graph = Subspace::span(
            k + n,
            (0..k).map(|i| (self.d.reduce(self.phi[i as usize]) << k) | (1 << i)),
        )
        .sum(&Subspace::span(
            k + n,
            self.d.basis().iter().map(|&x| x << k),
        ));
        let coords = graph.basis().iter().filter(|&&w| w >> k == 0).copied();
        Subspace::span(n, coords.map(|c| self.a.element(c as u64)))
    }
}
