//! Pair weight functions `W`, the product eigenvector they generate, and
//! exact eigen-verification of lattice Hamiltonians.
//!
//! The built-in weight is the q-exchangeable one,
//! `W(eta, eta') = q^(c * sum_{i<j} eta_i * eta'_j)` with `c = 2` by default.
//! A table weight allows arbitrary (including zero) entries, which is how
//! the factorization assumptions are exercised negatively.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::linop::{SparseOperator, VectorOnBasis, WeightPreservation};
use crate::scalar::LaurentScalar;
use crate::statespace::{
    content, enumerate_basis, enumerate_full, multi_index, MultiConfig, SectorLabel, SiteConfig,
};

/// Full-basis vectors are materialized only up to this many components;
/// beyond it, eigen-verification walks sectors with on-demand coefficients.
pub const MATERIALIZE_CAP: usize = 1_000_000;

/// A parameterized weight function on pairs of site configurations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightSpec {
    /// `W(eta, eta') = q^(c * sum_{i<j} eta_i * eta'_j)`; everywhere a
    /// nonzero monomial.
    QExchangeable { n: usize, j: u32, c: i64 },
    /// Explicit table on `B_J x B_J`; absent pairs are zero.
    Table {
        n: usize,
        j: u32,
        table: BTreeMap<(SiteConfig, SiteConfig), LaurentScalar>,
    },
}

impl WeightSpec {
    pub fn q_exchangeable(n: usize, j: u32) -> Self {
        WeightSpec::QExchangeable { n, j, c: 2 }
    }

    pub fn n(&self) -> usize {
        match self {
            WeightSpec::QExchangeable { n, .. } | WeightSpec::Table { n, .. } => *n,
        }
    }

    pub fn j(&self) -> u32 {
        match self {
            WeightSpec::QExchangeable { j, .. } | WeightSpec::Table { j, .. } => *j,
        }
    }

    /// A table copy of a spec, so single entries can be perturbed.
    pub fn to_table(&self) -> Self {
        let basis = enumerate_basis(self.n(), self.j());
        let mut table = BTreeMap::new();
        for a in &basis {
            for b in &basis {
                let w = eval_w(self, a, b);
                if !w.is_zero() {
                    table.insert((a.clone(), b.clone()), w);
                }
            }
        }
        WeightSpec::Table {
            n: self.n(),
            j: self.j(),
            table,
        }
    }

    pub fn override_entry(&mut self, a: SiteConfig, b: SiteConfig, value: LaurentScalar) {
        if let WeightSpec::Table { table, .. } = self {
            if value.is_zero() {
                table.remove(&(a, b));
            } else {
                table.insert((a, b), value);
            }
        } else {
            let mut t = self.to_table();
            t.override_entry(a, b, value);
            *self = t;
        }
    }
}

/// Evaluates `W(eta, eta')`.
pub fn eval_w(spec: &WeightSpec, eta: &SiteConfig, eta_p: &SiteConfig) -> LaurentScalar {
    match spec {
        WeightSpec::QExchangeable { c, .. } => {
            let mut exp = 0i64;
            for (i, &ei) in eta.entries().iter().enumerate() {
                for (j, &ej) in eta_p.entries().iter().enumerate() {
                    if i < j {
                        exp += ei as i64 * ej as i64;
                    }
                }
            }
            LaurentScalar::q_power(c * exp)
        }
        WeightSpec::Table { table, .. } => table
            .get(&(eta.clone(), eta_p.clone()))
            .cloned()
            .unwrap_or_default(),
    }
}

/// The coefficient `W^L(eta^1, ..., eta^L) = prod_{k<l} W(eta^k, eta^l)`.
pub fn w_coefficient(spec: &WeightSpec, sites: &[SiteConfig]) -> LaurentScalar {
    let mut acc = LaurentScalar::one();
    for k in 0..sites.len() {
        for l in (k + 1)..sites.len() {
            acc = &acc * &eval_w(spec, &sites[k], &sites[l]);
            if acc.is_zero() {
                return acc;
            }
        }
    }
    acc
}

/// The product eigenvector over the full `L`-site basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductEigenvector {
    pub l: usize,
    pub coeffs: VectorOnBasis,
}

/// Builds the product eigenvector coefficients over the full basis.
///
/// Panics if the full basis exceeds [`MATERIALIZE_CAP`]; large volumes are
/// handled per sector by [`verify_eigen`] instead.
pub fn build_w_l(spec: &WeightSpec, l: usize) -> ProductEigenvector {
    let basis = enumerate_basis(spec.n(), spec.j());
    let dim = basis.len().pow(l as u32);
    assert!(dim <= MATERIALIZE_CAP, "full basis too large to materialize");
    let mut coeffs = VectorOnBasis::zero(dim);
    for (idx, cfg) in enumerate_full(&basis, l).iter().enumerate() {
        coeffs.set(idx, w_coefficient(spec, cfg.sites()));
    }
    ProductEigenvector { l, coeffs }
}

/// Outcome of the brute-force check of the two factorization conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssumptionOutcome {
    Holds,
    /// Two tuples with the same grouped key but different product values.
    Violated {
        condition: AssumptionCondition,
        tuple_a: MultiConfig,
        value_a: LaurentScalar,
        tuple_b: MultiConfig,
        value_b: LaurentScalar,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssumptionCondition {
    /// `prod_{k<L+1} W(eta^k, eta^{L+1})` depends only on
    /// `(eta^1 + .. + eta^L, eta^{L+1})`.
    TailProduct,
    /// `prod_{k<=L-1} W(eta^k, eta^L) W(eta^k, eta^{L+1})` depends only on
    /// `(eta^1 + .. + eta^{L-1}, eta^L + eta^{L+1})`.
    PairTailProduct,
}

impl AssumptionOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, AssumptionOutcome::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssumptionReport {
    pub tail_product: AssumptionOutcome,
    pub pair_tail_product: AssumptionOutcome,
}

impl AssumptionReport {
    pub fn holds(&self) -> bool {
        self.tail_product.holds() && self.pair_tail_product.holds()
    }
}

/// Verifies both factorization conditions exhaustively over all tuples of
/// `L + 1` site configurations; reports the first counterexample pair.
pub fn check_assumption_products(spec: &WeightSpec, l: usize) -> AssumptionReport {
    assert!(l >= 2, "conditions are stated for L >= 2");
    let basis = enumerate_basis(spec.n(), spec.j());
    let tuples = enumerate_full(&basis, l + 1);

    let sum_sites = |sites: &[SiteConfig]| -> SectorLabel { content(&MultiConfig(sites.to_vec())) };

    let check = |condition: AssumptionCondition| -> AssumptionOutcome {
        let mut seen: BTreeMap<Vec<u32>, (MultiConfig, LaurentScalar)> = BTreeMap::new();
        for tup in &tuples {
            let sites = tup.sites();
            let (key, value) = match condition {
                AssumptionCondition::TailProduct => {
                    let head = sum_sites(&sites[..l]);
                    let tail = &sites[l];
                    let mut v = LaurentScalar::one();
                    for k in 0..l {
                        v = &v * &eval_w(spec, &sites[k], tail);
                    }
                    let mut key = head.0;
                    key.extend_from_slice(tail.entries());
                    (key, v)
                }
                AssumptionCondition::PairTailProduct => {
                    let head = sum_sites(&sites[..l - 1]);
                    let pair_sum: Vec<u32> = sites[l - 1]
                        .entries()
                        .iter()
                        .zip(sites[l].entries())
                        .map(|(a, b)| a + b)
                        .collect();
                    let mut v = LaurentScalar::one();
                    for k in 0..(l - 1) {
                        v = &v * &eval_w(spec, &sites[k], &sites[l - 1]);
                        v = &v * &eval_w(spec, &sites[k], &sites[l]);
                    }
                    let mut key = head.0;
                    key.extend_from_slice(&pair_sum);
                    (key, v)
                }
            };
            match seen.get(&key) {
                None => {
                    seen.insert(key, (tup.clone(), value));
                }
                Some((first_tup, first_val)) => {
                    if *first_val != value {
                        return AssumptionOutcome::Violated {
                            condition,
                            tuple_a: first_tup.clone(),
                            value_a: first_val.clone(),
                            tuple_b: tup.clone(),
                            value_b: value,
                        };
                    }
                }
            }
        }
        AssumptionOutcome::Holds
    };

    AssumptionReport {
        tail_product: check(AssumptionCondition::TailProduct),
        pair_tail_product: check(AssumptionCondition::PairTailProduct),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EigenError {
    #[error("local Hamiltonian is not weight-preserving at entry ({row},{col})")]
    NotWeightPreserving { row: usize, col: usize },
    #[error("eigenvector entry at index {index} is zero or not a monomial")]
    NonInvertibleEntry { index: usize },
    #[error("eigenvector is identically zero")]
    ZeroEigenvector,
    #[error("w is not a local eigenvector: mismatch at two-site index {index}")]
    LocalMismatch { index: usize },
    #[error("global eigen-relation fails at L={l}, index {index}")]
    GlobalMismatch { l: usize, index: usize },
}

/// Result of a successful eigen-verification: the local eigenvalue `a`,
/// so the global eigenvalue is `(L - 1) * a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenReport {
    pub l: usize,
    pub local_eigenvalue: LaurentScalar,
}

/// Verifies `H w = a w` on two sites (extracting `a` by first-nonzero
/// ratio), then verifies the global relation on `L` sites exactly.
pub fn verify_eigen(
    h: &SparseOperator,
    spec: &WeightSpec,
    l: usize,
) -> Result<EigenReport, EigenError> {
    let basis = enumerate_basis(spec.n(), spec.j());
    match h.is_weight_preserving(&basis) {
        WeightPreservation::Preserving => {}
        WeightPreservation::Violated { row, col, .. } => {
            return Err(EigenError::NotWeightPreserving { row, col })
        }
    }

    // local case: extract a from the first nonzero coefficient of w
    let w2 = build_w_l(spec, 2);
    let hw2 = h.apply(&w2.coeffs).expect("dims agree by construction");
    let (first_idx, first_val) = w2
        .coeffs
        .iter()
        .next()
        .ok_or(EigenError::ZeroEigenvector)?;
    let inv = first_val
        .invert_monomial()
        .map_err(|_| EigenError::NonInvertibleEntry { index: first_idx })?;
    let a = &hw2.get(first_idx) * &inv;
    let residual = hw2.sub(&w2.coeffs.scale(&a));
    if let Some((index, _)) = residual.iter().next() {
        return Err(EigenError::LocalMismatch { index });
    }

    // global case
    let dim = basis.len().pow(l as u32);
    let global_eigenvalue = &LaurentScalar::from_int((l as i64) - 1) * &a;
    if dim <= MATERIALIZE_CAP {
        let global = global_hamiltonian(h, l).expect("two-leg operator");
        let wl = build_w_l(spec, l);
        let hw = global.apply(&wl.coeffs).expect("dims agree");
        let residual = hw.sub(&wl.coeffs.scale(&global_eigenvalue));
        let first = residual.iter().next().map(|(index, _)| index);
        if let Some(index) = first {
            return Err(EigenError::GlobalMismatch { l, index });
        }
    } else {
        verify_global_per_sector(h, spec, l, &global_eigenvalue)?;
    }
    Ok(EigenReport {
        l,
        local_eigenvalue: a,
    })
}

/// The global Hamiltonian `sum_i embed(H, (i, i+1), L)`.
pub fn global_hamiltonian(h: &SparseOperator, l: usize) -> Result<SparseOperator, crate::linop::LinopError> {
    let d = h.dims()[0];
    let mut acc = SparseOperator::zero(vec![d; l]);
    for i in 1..l {
        acc = acc.add(&h.embed_pair((i, i + 1), l)?)?;
    }
    Ok(acc)
}

/// Sector-walking global check that never materializes the full vector:
/// for each state `x`, `(Hw)(x)` is accumulated from local H rows with
/// on-demand product coefficients.
fn verify_global_per_sector(
    h: &SparseOperator,
    spec: &WeightSpec,
    l: usize,
    global_eigenvalue: &LaurentScalar,
) -> Result<(), EigenError> {
    let basis = enumerate_basis(spec.n(), spec.j());
    let d = basis.len();
    // rows of the local H grouped by row index
    let mut h_rows: BTreeMap<usize, Vec<(usize, LaurentScalar)>> = BTreeMap::new();
    for (r, c, v) in h.iter() {
        h_rows.entry(r).or_default().push((c, v.clone()));
    }
    let sectors = all_sectors(spec.n(), spec.j(), l);
    for sector in sectors {
        let states = crate::statespace::enumerate_sector(spec.n(), spec.j(), l, &sector)
            .expect("consistent sector");
        for x in &states {
            let mut lhs = LaurentScalar::zero();
            for i in 0..(l - 1) {
                let row = multi_index(&basis, &MultiConfig(vec![x.sites()[i].clone(), x.sites()[i + 1].clone()]))
                    .expect("pair index");
                if let Some(cols) = h_rows.get(&row) {
                    for (c, v) in cols {
                        let (a_idx, b_idx) = (c / d, c % d);
                        let mut y = x.sites().to_vec();
                        y[i] = basis[a_idx].clone();
                        y[i + 1] = basis[b_idx].clone();
                        lhs = &lhs + &(v * &w_coefficient(spec, &y));
                    }
                }
            }
            let rhs = global_eigenvalue * &w_coefficient(spec, x.sites());
            if lhs != rhs {
                let index = multi_index(&basis, x).expect("state index");
                return Err(EigenError::GlobalMismatch { l, index });
            }
        }
    }
    Ok(())
}

/// All sector labels realized by `L` sites over `B_J`.
pub fn all_sectors(n: usize, j: u32, l: usize) -> Vec<SectorLabel> {
    let mut labels: Vec<SectorLabel> = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    let total = l as u32 * j;
    fn rec(prefix: &mut Vec<u32>, rem: u32, slots: usize, out: &mut Vec<SectorLabel>) {
        if slots == 1 {
            prefix.push(rem);
            out.push(SectorLabel(prefix.clone()));
            prefix.pop();
            return;
        }
        for v in 0..=rem {
            prefix.push(v);
            rec(prefix, rem - v, slots - 1, out);
            prefix.pop();
        }
    }
    rec(&mut prefix, total, n, &mut labels);
    // keep only labels realizable by L sites with per-site cap J... all
    // compositions of L*J are realizable only if each sector is non-empty;
    // empty sectors are harmless (they contribute no states).
    labels
}

/// The built-in two-species exclusion block: on the basis
/// `[(0,1), (1,0)]` the only nonzero entries sit on the swap block of
/// `|10,01>` and `|01,10>`, with column-as-source rates `q^-1`
/// (particle right) and `q` (particle left) and matching diagonal losses.
pub fn asep_local_h() -> SparseOperator {
    let mut h = SparseOperator::zero(vec![2, 2]);
    let q = LaurentScalar::q();
    let q_inv = LaurentScalar::q_power(-1);
    // basis index 0 = (0,1) "hole", 1 = (1,0) "particle"
    let right_source = 2; // |10,01>
    let left_source = 1; // |01,10>
    h.set(left_source, right_source, q_inv.clone());
    h.set(right_source, right_source, -&q_inv);
    h.set(right_source, left_source, q.clone());
    h.set(left_source, left_source, -&q);
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::SiteConfig;

    fn sc(v: &[u32]) -> SiteConfig {
        SiteConfig(v.to_vec())
    }

    fn ls(s: &str) -> LaurentScalar {
        s.parse().unwrap()
    }

    #[test]
    fn eval_w_two_species() {
        let spec = WeightSpec::q_exchangeable(2, 1);
        assert!(eval_w(&spec, &sc(&[0, 1]), &sc(&[1, 0])).is_one());
        assert_eq!(eval_w(&spec, &sc(&[1, 0]), &sc(&[0, 1])), ls("q^2"));
        let spec22 = WeightSpec::q_exchangeable(2, 2);
        assert_eq!(eval_w(&spec22, &sc(&[1, 1]), &sc(&[1, 1])), ls("q^2"));
    }

    #[test]
    fn assumption_holds_for_q_exchangeable() {
        let spec = WeightSpec::q_exchangeable(2, 1);
        assert!(check_assumption_products(&spec, 3).holds());
    }

    #[test]
    fn assumption_is_insensitive_to_tables_when_content_pins_the_multiset() {
        // with J = 1 each site is a basis vector, so the head content
        // determines the head multiset and any table passes both conditions
        let mut spec = WeightSpec::q_exchangeable(2, 1).to_table();
        spec.override_entry(sc(&[1, 0]), sc(&[0, 1]), ls("q^3"));
        assert!(check_assumption_products(&spec, 3).holds());
    }

    #[test]
    fn assumption_fails_for_lopsided_table() {
        // at J = 2 the content (2,2) comes from {(0,2),(2,0)} or
        // {(1,1),(1,1)}; perturbing W((1,1),(0,2)) from q^4 to q^5
        // separates the two head products for tail (0,2)
        let mut spec = WeightSpec::q_exchangeable(2, 2).to_table();
        spec.override_entry(sc(&[1, 1]), sc(&[0, 2]), ls("q^5"));
        let report = check_assumption_products(&spec, 2);
        assert!(!report.holds());
        match &report.tail_product {
            AssumptionOutcome::Violated { value_a, value_b, .. } => assert_ne!(value_a, value_b),
            AssumptionOutcome::Holds => panic!("expected a tail-product counterexample"),
        }
    }

    #[test]
    fn w_l_small_cases() {
        let spec = WeightSpec::q_exchangeable(2, 1);
        // L = 2: coefficient of |eta,eta'> is W(eta,eta')
        let w2 = build_w_l(&spec, 2);
        assert_eq!(w2.coeffs.get(2), ls("q^2")); // |10,01>
        assert!(w2.coeffs.get(1).is_one()); // |01,10>
        // ((1,0),(0,1),(1,0)) -> q^2 * 1 * 1
        let coeff = w_coefficient(&spec, &[sc(&[1, 0]), sc(&[0, 1]), sc(&[1, 0])]);
        assert_eq!(coeff, ls("q^2"));
        // all-equal sites have coefficient 1
        let coeff = w_coefficient(&spec, &[sc(&[0, 1]), sc(&[0, 1]), sc(&[0, 1])]);
        assert!(coeff.is_one());
    }

    #[test]
    fn recursion_invariant_of_product_coefficients() {
        // W^{L+1}(eta^1..eta^{L+1}) = W^L(eta^1..eta^L) * prod_k W(eta^k, eta^{L+1})
        for (n, j) in [(2usize, 1u32), (2, 2)] {
            let spec = WeightSpec::q_exchangeable(n, j);
            let basis = enumerate_basis(n, j);
            for l in 2..=4usize {
                if basis.len().pow((l + 1) as u32) > 3000 {
                    continue;
                }
                for tup in enumerate_full(&basis, l + 1) {
                    let sites = tup.sites();
                    let full = w_coefficient(&spec, sites);
                    let head = w_coefficient(&spec, &sites[..l]);
                    let mut tail = LaurentScalar::one();
                    for k in 0..l {
                        tail = &tail * &eval_w(&spec, &sites[k], &sites[l]);
                    }
                    assert_eq!(full, &head * &tail);
                }
            }
        }
    }

    #[test]
    fn adjacent_swap_multiplies_by_q_power() {
        // swapping adjacent sites scales W^L by q^{+-c} or leaves it fixed
        let spec = WeightSpec::q_exchangeable(2, 1);
        let basis = enumerate_basis(2, 1);
        for tup in enumerate_full(&basis, 4) {
            for i in 0..3usize {
                let mut swapped = tup.sites().to_vec();
                swapped.swap(i, i + 1);
                let before = w_coefficient(&spec, tup.sites());
                let after = w_coefficient(&spec, &swapped);
                let ratios = [ls("q^2"), ls("q^-2"), ls("1")];
                assert!(
                    ratios.iter().any(|r| after == &before * r),
                    "swap must scale by q^{{+-2}} or 1"
                );
            }
        }
    }

    #[test]
    fn asep_eigenvalue_is_zero() {
        let spec = WeightSpec::q_exchangeable(2, 1);
        let h = asep_local_h();
        for l in 2..=4usize {
            let report = verify_eigen(&h, &spec, l).unwrap();
            assert!(report.local_eigenvalue.is_zero(), "a = 0 at L = {l}");
        }
    }

    #[test]
    fn identity_has_eigenvalue_one() {
        let spec = WeightSpec::q_exchangeable(2, 1);
        let id = SparseOperator::identity(vec![2, 2]);
        let report = verify_eigen(&id, &spec, 3).unwrap();
        assert!(report.local_eigenvalue.is_one());
    }

    #[test]
    fn eigen_rejects_non_weight_preserving() {
        let spec = WeightSpec::q_exchangeable(2, 1);
        let mut bad = asep_local_h();
        bad.set(2, 0, ls("1"));
        assert!(matches!(
            verify_eigen(&bad, &spec, 2),
            Err(EigenError::NotWeightPreserving { .. })
        ));
    }

    #[test]
    fn eigen_detects_non_eigenvector() {
        // a weight-preserving H that does not fix the product vector: the
        // symmetric swap block with unequal rates against the asymmetric W
        let spec = WeightSpec::q_exchangeable(2, 1);
        let mut h = SparseOperator::zero(vec![2, 2]);
        h.set(1, 2, ls("1"));
        h.set(2, 2, ls("-1"));
        h.set(2, 1, ls("1"));
        h.set(1, 1, ls("-1"));
        assert!(matches!(
            verify_eigen(&h, &spec, 2),
            Err(EigenError::LocalMismatch { .. })
        ));
    }

    #[test]
    fn sector_walking_route_agrees_with_materialized_route() {
        let spec = WeightSpec::q_exchangeable(2, 1);
        let h = asep_local_h();
        let zero = LaurentScalar::zero();
        // L = 4: run the sector route directly and compare to the
        // materialized global product
        verify_global_per_sector(&h, &spec, 4, &zero).unwrap();
        let global = global_hamiltonian(&h, 4).unwrap();
        let w = build_w_l(&spec, 4);
        assert!(global.apply(&w.coeffs).unwrap().is_zero());
    }
}
