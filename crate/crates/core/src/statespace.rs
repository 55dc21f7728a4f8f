//! Configuration bases for one or several lattice sites.
//!
//! A single site holds `mu = (mu_1, ..., mu_n)` particles of `n` species;
//! the basis `B_J` collects all `mu` with `|mu| = J`. A multi-site
//! configuration is one site configuration per lattice site, and its
//! componentwise total over sites is the conserved sector label.
//!
//! Ordering conventions are fixed once and for all so that serialized
//! operators are bit-stable: single-site bases are in ascending
//! lexicographic order, and multi-site enumerations are row-major with
//! site 1 most significant.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StateError {
    #[error("configuration {0:?} is not a member of the basis")]
    NotInBasis(Vec<u32>),
    #[error("sector totals sum to {got}, expected L*J = {expected}")]
    SectorSumMismatch { got: u64, expected: u64 },
    #[error("species count n must be at least 1")]
    EmptySpecies,
}

/// One lattice site's particle content: `n` non-negative species counts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteConfig(pub Vec<u32>);

impl SiteConfig {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Total particle count `|mu|`.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }
}

/// A configuration of `L` lattice sites sharing the same `(n, J)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiConfig(pub Vec<SiteConfig>);

impl MultiConfig {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sites(&self) -> &[SiteConfig] {
        &self.0
    }
}

/// Componentwise total of a multi-site configuration; the conserved quantity
/// of weight-preserving dynamics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SectorLabel(pub Vec<u32>);

/// All compositions of `J` into `n` parts, ascending lexicographic.
///
/// The length is always `binomial(J + n - 1, n - 1)`.
pub fn enumerate_basis(n: usize, j: u32) -> Vec<SiteConfig> {
    assert!(n >= 1, "need at least one species");
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    fill_compositions(&mut prefix, j, n, &mut out);
    out
}

fn fill_compositions(prefix: &mut Vec<u32>, rem: u32, slots: usize, out: &mut Vec<SiteConfig>) {
    if slots == 1 {
        prefix.push(rem);
        out.push(SiteConfig(prefix.clone()));
        prefix.pop();
        return;
    }
    for v in 0..=rem {
        prefix.push(v);
        fill_compositions(prefix, rem - v, slots - 1, out);
        prefix.pop();
    }
}

/// Position of `mu` in the fixed basis ordering.
pub fn index_of(basis: &[SiteConfig], mu: &SiteConfig) -> Result<usize, StateError> {
    basis
        .binary_search(mu)
        .map_err(|_| StateError::NotInBasis(mu.0.clone()))
}

/// Componentwise vector sum over sites.
pub fn content(c: &MultiConfig) -> SectorLabel {
    let n = c.sites().first().map(|s| s.n()).unwrap_or(0);
    let mut totals = vec![0u32; n];
    for site in c.sites() {
        for (t, v) in totals.iter_mut().zip(site.entries()) {
            *t += v;
        }
    }
    SectorLabel(totals)
}

/// All `L`-site configurations over `B_J` with the given content, row-major
/// with site 1 most significant. An empty sector yields an empty list.
pub fn enumerate_sector(
    n: usize,
    j: u32,
    l: usize,
    sector: &SectorLabel,
) -> Result<Vec<MultiConfig>, StateError> {
    if n == 0 {
        return Err(StateError::EmptySpecies);
    }
    let got: u64 = sector.0.iter().map(|&v| v as u64).sum();
    let expected = l as u64 * j as u64;
    if got != expected {
        return Err(StateError::SectorSumMismatch { got, expected });
    }
    let basis = enumerate_basis(n, j);
    let mut out = Vec::new();
    let mut remaining = sector.0.clone();
    let mut prefix: Vec<SiteConfig> = Vec::with_capacity(l);
    fill_sector(&basis, l, &mut remaining, &mut prefix, &mut out);
    Ok(out)
}

fn fill_sector(
    basis: &[SiteConfig],
    slots: usize,
    remaining: &mut [u32],
    prefix: &mut Vec<SiteConfig>,
    out: &mut Vec<MultiConfig>,
) {
    if slots == 0 {
        if remaining.iter().all(|&v| v == 0) {
            out.push(MultiConfig(prefix.clone()));
        }
        return;
    }
    for cfg in basis {
        if cfg.entries().iter().zip(remaining.iter()).any(|(c, r)| c > r) {
            continue;
        }
        for (r, c) in remaining.iter_mut().zip(cfg.entries()) {
            *r -= c;
        }
        prefix.push(cfg.clone());
        fill_sector(basis, slots - 1, remaining, prefix, out);
        prefix.pop();
        for (r, c) in remaining.iter_mut().zip(cfg.entries()) {
            *r += c;
        }
    }
}

/// Enumerates the full `L`-site product basis in the global row-major order.
pub fn enumerate_full(basis: &[SiteConfig], l: usize) -> Vec<MultiConfig> {
    let mut out = Vec::with_capacity(basis.len().pow(l as u32));
    let mut prefix = Vec::with_capacity(l);
    fill_full(basis, l, &mut prefix, &mut out);
    out
}

fn fill_full(basis: &[SiteConfig], slots: usize, prefix: &mut Vec<SiteConfig>, out: &mut Vec<MultiConfig>) {
    if slots == 0 {
        out.push(MultiConfig(prefix.clone()));
        return;
    }
    for cfg in basis {
        prefix.push(cfg.clone());
        fill_full(basis, slots - 1, prefix, out);
        prefix.pop();
    }
}

/// Global row-major index of a multi-site configuration (site 1 most
/// significant).
pub fn multi_index(basis: &[SiteConfig], c: &MultiConfig) -> Result<usize, StateError> {
    let mut idx = 0usize;
    for site in c.sites() {
        idx = idx * basis.len() + index_of(basis, site)?;
    }
    Ok(idx)
}

/// Inverse of [`multi_index`].
pub fn config_at(basis: &[SiteConfig], l: usize, mut idx: usize) -> MultiConfig {
    let mut digits = vec![0usize; l];
    for d in digits.iter_mut().rev() {
        *d = idx % basis.len();
        idx /= basis.len();
    }
    MultiConfig(digits.into_iter().map(|d| basis[d].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(v: &[u32]) -> SiteConfig {
        SiteConfig(v.to_vec())
    }

    fn binomial(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn basis_singleton() {
        assert_eq!(enumerate_basis(1, 5), vec![sc(&[5])]);
    }

    #[test]
    fn basis_two_species_one_particle() {
        assert_eq!(enumerate_basis(2, 1), vec![sc(&[0, 1]), sc(&[1, 0])]);
    }

    #[test]
    fn basis_counts_are_stars_and_bars() {
        assert_eq!(enumerate_basis(3, 2).len(), 6);
        for n in 1..=5usize {
            for j in 0..=5u32 {
                let expect = binomial(j as u64 + n as u64 - 1, n as u64 - 1);
                assert_eq!(enumerate_basis(n, j).len() as u64, expect, "n={n} J={j}");
            }
        }
    }

    #[test]
    fn index_of_roundtrip() {
        let basis = enumerate_basis(2, 1);
        assert_eq!(index_of(&basis, &sc(&[0, 1])).unwrap(), 0);
        assert_eq!(index_of(&basis, &sc(&[1, 0])).unwrap(), 1);
        assert!(index_of(&basis, &sc(&[2, 0])).is_err());
        for (i, mu) in enumerate_basis(4, 3).iter().enumerate() {
            assert_eq!(index_of(&enumerate_basis(4, 3), mu).unwrap(), i);
        }
    }

    #[test]
    fn content_sums_sites() {
        let l = 3;
        let c = MultiConfig(vec![sc(&[0, 1]); l]);
        assert_eq!(content(&c), SectorLabel(vec![0, l as u32]));
        assert_eq!(
            content(&MultiConfig(vec![sc(&[1, 0]), sc(&[0, 1])])),
            SectorLabel(vec![1, 1])
        );
        assert_eq!(
            content(&MultiConfig(vec![sc(&[1, 1]), sc(&[2, 0])])),
            SectorLabel(vec![3, 1])
        );
    }

    #[test]
    fn sector_enumeration_small() {
        let got = enumerate_sector(2, 1, 2, &SectorLabel(vec![1, 1])).unwrap();
        assert_eq!(
            got,
            vec![
                MultiConfig(vec![sc(&[0, 1]), sc(&[1, 0])]),
                MultiConfig(vec![sc(&[1, 0]), sc(&[0, 1])]),
            ]
        );
        let six = enumerate_sector(2, 1, 4, &SectorLabel(vec![2, 2])).unwrap();
        assert_eq!(six.len(), 6);
    }

    #[test]
    fn sector_sum_mismatch_is_an_error() {
        let err = enumerate_sector(2, 1, 2, &SectorLabel(vec![3, 0])).unwrap_err();
        assert!(matches!(err, StateError::SectorSumMismatch { got: 3, expected: 2 }));
    }

    #[test]
    fn sectors_partition_the_full_basis() {
        for (n, j, l) in [(2usize, 1u32, 3usize), (2, 2, 2), (3, 1, 2)] {
            let basis = enumerate_basis(n, j);
            let full = enumerate_full(&basis, l);
            let mut sector_total = 0usize;
            let mut labels: Vec<SectorLabel> = full.iter().map(content).collect();
            labels.sort();
            labels.dedup();
            for label in &labels {
                sector_total += enumerate_sector(n, j, l, label).unwrap().len();
            }
            assert_eq!(sector_total, basis.len().pow(l as u32));
        }
    }

    #[test]
    fn multi_index_matches_enumeration_order() {
        let basis = enumerate_basis(2, 1);
        let full = enumerate_full(&basis, 3);
        for (i, c) in full.iter().enumerate() {
            assert_eq!(multi_index(&basis, c).unwrap(), i);
            assert_eq!(&config_at(&basis, 3, i), c);
        }
    }
}
