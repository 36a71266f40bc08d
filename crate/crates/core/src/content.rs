//! File library, popularity, and the two halves of a caching design: which
//! files are cached versus fetched over the backhaul, and with what
//! probability each BS stores each cached file.
//!
//! Files are identified by 1-based index sorted by popularity, so file 1 is
//! the most requested.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when checking `Σ t ≤ C` and `Σ q = 1`.
pub const FEASIBILITY_TOL: f64 = 1e-9;

pub type FileId = usize;

/// `q_f = f^-γ / Σ_i i^-γ` for `f = 1..=F`.
pub fn zipf_popularity(num_files: usize, gamma: f64) -> Result<Vec<f64>> {
    if num_files == 0 {
        return Err(Error::domain("file library must contain at least one file"));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!(
            "Zipf exponent must be finite and non-negative, got {gamma}"
        )));
    }
    let weights: Vec<f64> = (1..=num_files).map(|f| (f as f64).powf(-gamma)).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentParams {
    pub num_files: usize,
    pub zipf: f64,
    pub cache_size: usize,
    pub backhaul: usize,
    /// Popularity of file `f` stored at index `f - 1`.
    pub popularity: Vec<f64>,
}

impl ContentParams {
    /// Library of `num_files` files with Zipf(`zipf`) popularity.
    pub fn zipf(num_files: usize, zipf: f64, cache_size: usize, backhaul: usize) -> Result<Self> {
        let params = ContentParams {
            num_files,
            zipf,
            cache_size,
            backhaul,
            popularity: zipf_popularity(num_files, zipf)?,
        };
        params.check()?;
        Ok(params)
    }

    pub fn check(&self) -> Result<()> {
        let q = &self.popularity;
        if q.len() != self.num_files || self.num_files == 0 {
            return Err(Error::domain(format!(
                "popularity vector has {} entries for {} files",
                q.len(),
                self.num_files
            )));
        }
        if self.backhaul + self.cache_size > self.num_files {
            return Err(Error::domain(format!(
                "resource limit violated: B + C = {} exceeds F = {}",
                self.backhaul + self.cache_size,
                self.num_files
            )));
        }
        if q.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::domain("every file popularity must be positive"));
        }
        if q.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12)) {
            return Err(Error::domain(
                "popularity must be non-increasing in file index",
            ));
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > FEASIBILITY_TOL {
            return Err(Error::domain(format!("popularity sums to {total}, not 1")));
        }
        Ok(())
    }

    pub fn popularity_of(&self, file: FileId) -> f64 {
        self.popularity[file - 1]
    }

    pub fn files(&self) -> impl Iterator<Item = FileId> {
        1..=self.num_files
    }
}

/// Partition of the library into the cached set `F_c` and the backhaul set
/// `F_b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FileAllocation {
    pub cached: BTreeSet<FileId>,
    pub backhaul: BTreeSet<FileId>,
}

impl FileAllocation {
    pub fn new(
        cached: impl IntoIterator<Item = FileId>,
        backhaul: impl IntoIterator<Item = FileId>,
    ) -> Self {
        FileAllocation {
            cached: cached.into_iter().collect(),
            backhaul: backhaul.into_iter().collect(),
        }
    }

    /// Cache exactly `cached`; every other file of `1..=num_files` goes to the
    /// backhaul.
    pub fn from_cached(num_files: usize, cached: impl IntoIterator<Item = FileId>) -> Self {
        let cached: BTreeSet<FileId> = cached.into_iter().collect();
        let backhaul = (1..=num_files).filter(|f| !cached.contains(f)).collect();
        FileAllocation { cached, backhaul }
    }

    /// Backhaul the `b` most popular files and cache the rest.
    pub fn top_backhaul(num_files: usize, b: usize) -> Self {
        Self::from_cached(num_files, (b.min(num_files) + 1)..=num_files)
    }

    pub fn is_cached(&self, file: FileId) -> bool {
        self.cached.contains(&file)
    }
}

/// Per-BS caching probability `t_f` of every cached file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CachePlacement {
    pub probs: BTreeMap<FileId, f64>,
}

impl CachePlacement {
    pub fn new(entries: impl IntoIterator<Item = (FileId, f64)>) -> Self {
        CachePlacement {
            probs: entries.into_iter().collect(),
        }
    }

    /// Pair the files of `alloc.cached` (ascending) with `values`.
    pub fn for_allocation(alloc: &FileAllocation, values: &[f64]) -> Self {
        debug_assert_eq!(alloc.cached.len(), values.len());
        Self::new(alloc.cached.iter().copied().zip(values.iter().copied()))
    }

    pub fn prob(&self, file: FileId) -> f64 {
        self.probs.get(&file).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn values(&self) -> Vec<f64> {
        self.probs.values().copied().collect()
    }
}

/// A single violated constraint of the caching design.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A file appears in both sets.
    Overlap(FileId),
    /// A library file appears in neither set.
    Unassigned(FileId),
    /// A set names a file outside `1..=F`.
    UnknownFile(FileId),
    /// `t_f` lies outside `[0, 1]`.
    ProbabilityOutOfRange { file: FileId, value: f64 },
    /// The placement assigns a probability to a file that is not cached.
    PlacementOutsideCachedSet(FileId),
    /// `Σ t_f` exceeds the cache size.
    CacheBudget { total: f64, cache_size: usize },
}

/// Every constraint the design violates; empty iff it is feasible.
pub fn validate(
    alloc: &FileAllocation,
    placement: &CachePlacement,
    params: &ContentParams,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let f_max = params.num_files;
    for &f in alloc.cached.union(&alloc.backhaul) {
        if f == 0 || f > f_max {
            out.push(Violation::UnknownFile(f));
        }
    }
    for &f in alloc.cached.intersection(&alloc.backhaul) {
        out.push(Violation::Overlap(f));
    }
    for f in 1..=f_max {
        if !alloc.cached.contains(&f) && !alloc.backhaul.contains(&f) {
            out.push(Violation::Unassigned(f));
        }
    }
    for (&f, &t) in &placement.probs {
        if !alloc.cached.contains(&f) {
            out.push(Violation::PlacementOutsideCachedSet(f));
        }
        if !(0.0..=1.0).contains(&t) {
            out.push(Violation::ProbabilityOutOfRange { file: f, value: t });
        }
    }
    let total = placement.total();
    if total > params.cache_size as f64 + FEASIBILITY_TOL {
        out.push(Violation::CacheBudget {
            total,
            cache_size: params.cache_size,
        });
    }
    out
}

/// `validate` as a `Result`, for callers that need a feasible design.
pub fn ensure_feasible(
    alloc: &FileAllocation,
    placement: &CachePlacement,
    params: &ContentParams,
) -> Result<()> {
    let violations = validate(alloc, placement, params);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Infeasible(format!("{violations:?}")))
    }
}

/// Everything a BS needs to fill its cache: the allocation, the per-file
/// marginals and how many slots the marginals may occupy.
///
/// Optimized designs use the `C` cache slots. The random-selection baselines
/// spread `B + C` slots over the whole library with no backhaul set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachingPolicy {
    pub alloc: FileAllocation,
    pub placement: CachePlacement,
    pub slots: usize,
}

impl CachingPolicy {
    pub fn design(
        alloc: FileAllocation,
        placement: CachePlacement,
        params: &ContentParams,
    ) -> Result<Self> {
        ensure_feasible(&alloc, &placement, params)?;
        Ok(CachingPolicy {
            alloc,
            placement,
            slots: params.cache_size,
        })
    }

    /// Every file is cache-served; file `f` is held with probability
    /// `marginals[f - 1]`.
    pub fn random_selection(marginals: &[f64], slots: usize) -> Result<Self> {
        let placement = CachePlacement::new(marginals.iter().enumerate().map(|(i, &t)| (i + 1, t)));
        if let Some((&f, &t)) = placement
            .probs
            .iter()
            .find(|(_, t)| !(0.0..=1.0).contains(*t))
        {
            return Err(Error::domain(format!(
                "selection probability of file {f} is {t}, outside [0, 1]"
            )));
        }
        if placement.total() > slots as f64 + FEASIBILITY_TOL {
            return Err(Error::domain(format!(
                "selection probabilities sum to {}, above {slots} slots",
                placement.total()
            )));
        }
        Ok(CachingPolicy {
            alloc: FileAllocation::from_cached(marginals.len(), 1..=marginals.len()),
            placement,
            slots,
        })
    }

    /// Cache contents of one BS for the uniform draw `u`.
    pub fn sample(&self, u: f64) -> Result<Vec<FileId>> {
        sample_cache_contents(&self.placement, self.slots, u)
    }
}

/// Systematic sampling of one BS cache from the marginals `t`.
///
/// The segments `[s_f, s_f + t_f)` are laid end to end on `[0, Σ t)` and the
/// points `u, u + 1, u + 2, ...` select the files whose segment they hit.
/// Since every segment is at most one unit long each file is selected with
/// probability exactly `t_f`, no file is selected twice, and at most
/// `⌈Σ t⌉ ≤ C` files are returned. Output is in ascending segment order.
pub fn sample_cache_contents(
    placement: &CachePlacement,
    cache_size: usize,
    u: f64,
) -> Result<Vec<FileId>> {
    let total = placement.total();
    if total > cache_size as f64 + FEASIBILITY_TOL {
        return Err(Error::domain(format!(
            "placement total {total} exceeds cache size {cache_size}"
        )));
    }
    if let Some((&f, &t)) = placement
        .probs
        .iter()
        .find(|(_, t)| !(0.0..=1.0).contains(*t))
    {
        return Err(Error::domain(format!(
            "caching probability of file {f} is {t}, outside [0, 1]"
        )));
    }
    if !(0.0..1.0).contains(&u) {
        return Err(Error::domain(format!(
            "uniform draw must lie in [0, 1), got {u}"
        )));
    }
    Ok(systematic_select(
        placement.probs.iter().map(|(&f, &t)| (f, t)),
        cache_size,
        u,
    ))
}

/// Core of [`sample_cache_contents`] without validation; `marginals` must
/// already lie in `[0, 1]` and sum to at most `max_items` (up to rounding).
pub(crate) fn systematic_select(
    marginals: impl Iterator<Item = (FileId, f64)>,
    max_items: usize,
    u: f64,
) -> Vec<FileId> {
    let mut chosen = Vec::new();
    let mut next_point = u;
    let mut start = 0.0;
    for (f, t) in marginals {
        if chosen.len() == max_items {
            break;
        }
        let end = start + t;
        if t > 0.0 && next_point >= start && next_point < end {
            chosen.push(f);
            next_point += 1.0;
        }
        start = end;
    }
    chosen
}

/// Whether a BS holding files by systematic sampling with draw `u` holds the
/// file whose segment is `[start, start + t)`.
pub(crate) fn systematic_contains(start: f64, t: f64, u: f64) -> bool {
    if t <= 0.0 {
        return false;
    }
    // Smallest sampling point u + k that is >= start.
    let k = (start - u).ceil().max(0.0);
    let point = u + k;
    point < start + t
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zipf_examples() {
        assert_eq!(zipf_popularity(4, 0.0).unwrap(), vec![0.25; 4]);
        let q = zipf_popularity(8, 1.0).unwrap();
        assert_relative_eq!(q[0], 280.0 / 761.0, max_relative = 1e-12);
        let q = zipf_popularity(2, 2.0).unwrap();
        assert_relative_eq!(q[0], 0.8, max_relative = 1e-12);
        assert_relative_eq!(q[1], 0.2, max_relative = 1e-12);
        assert!(zipf_popularity(0, 1.0).is_err());
        assert!(zipf_popularity(3, -0.1).is_err());
    }

    #[test]
    fn zipf_shape() {
        let q = zipf_popularity(50, 0.8).unwrap();
        assert!(q.windows(2).all(|w| w[1] < w[0]));
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn content_params_resource_limit() {
        assert!(ContentParams::zipf(4, 1.0, 2, 2).is_ok());
        assert!(ContentParams::zipf(4, 1.0, 3, 2).is_err());
        let mut p = ContentParams::zipf(4, 1.0, 1, 1).unwrap();
        p.popularity = vec![0.1, 0.2, 0.3, 0.4];
        assert!(p.check().is_err());
    }

    #[test]
    fn validate_examples() {
        let params = ContentParams::zipf(4, 1.0, 2, 2).unwrap();
        let alloc = FileAllocation::new([3, 4], [1, 2]);
        let placement = CachePlacement::new([(3, 1.0), (4, 1.0)]);
        assert!(validate(&alloc, &placement, &params).is_empty());

        let alloc = FileAllocation::new([3, 4], [1, 3]);
        let v = validate(&alloc, &placement, &params);
        assert!(v.contains(&Violation::Overlap(3)));
        assert!(v.contains(&Violation::Unassigned(2)));

        let alloc = FileAllocation::new([2, 3, 4], [1]);
        let placement = CachePlacement::new([(2, 1.0), (3, 1.0), (4, 0.5)]);
        let v = validate(&alloc, &placement, &params);
        assert_eq!(
            v,
            vec![Violation::CacheBudget {
                total: 2.5,
                cache_size: 2
            }]
        );
    }

    #[test]
    fn validate_flags_bad_probabilities() {
        let params = ContentParams::zipf(3, 1.0, 1, 1).unwrap();
        let alloc = FileAllocation::new([2, 3], [1]);
        let placement = CachePlacement::new([(2, -0.1), (1, 0.5)]);
        let v = validate(&alloc, &placement, &params);
        assert!(v.contains(&Violation::ProbabilityOutOfRange {
            file: 2,
            value: -0.1
        }));
        assert!(v.contains(&Violation::PlacementOutsideCachedSet(1)));
    }

    #[test]
    fn sampling_all_ones_is_deterministic() {
        let placement = CachePlacement::new([(5, 1.0), (6, 1.0)]);
        for u in [0.0, 0.3, 0.999] {
            assert_eq!(sample_cache_contents(&placement, 2, u).unwrap(), vec![5, 6]);
        }
    }

    #[test]
    fn sampling_rejects_infeasible() {
        let placement = CachePlacement::new([(1, 1.0), (2, 0.6)]);
        assert!(sample_cache_contents(&placement, 1, 0.5).is_err());
        let placement = CachePlacement::new([(1, 1.2)]);
        assert!(sample_cache_contents(&placement, 2, 0.5).is_err());
        let placement = CachePlacement::new([(1, 0.2)]);
        assert!(sample_cache_contents(&placement, 2, 1.0).is_err());
    }

    #[test]
    fn contains_matches_select() {
        let t = [0.8, 0.6, 0.4, 0.2];
        for i in 0..1000 {
            let u = i as f64 / 1000.0;
            let chosen = systematic_select(t.iter().enumerate().map(|(i, &t)| (i + 1, t)), 2, u);
            let mut start = 0.0;
            for (i, &ti) in t.iter().enumerate() {
                assert_eq!(chosen.contains(&(i + 1)), systematic_contains(start, ti, u));
                start += ti;
            }
        }
    }
}
