//! Synthetic benchmark generator: spherical Gaussian clusters of mixed
//! density, plus uniform noise features appended after the informative block.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Matrix};
use crate::error::{MwkError, Result};
use crate::seed::{self, derive_seed, Rng};

/// Minimum number of points generated per cluster.
pub const MIN_CLUSTER_SIZE: usize = 20;

/// The twelve benchmark configurations, `{n}x{m}-{k} +{q}NF`.
pub const TABLE2_CONFIGS: [&str; 12] = [
    "1000x4-3 +2NF",
    "1000x4-5 +2NF",
    "1000x4-10 +2NF",
    "1000x10-3 +5NF",
    "1000x10-5 +5NF",
    "1000x10-10 +5NF",
    "2000x20-5 +10NF",
    "2000x20-10 +10NF",
    "2000x20-20 +10NF",
    "2000x30-5 +15NF",
    "2000x30-10 +15NF",
    "2000x30-20 +15NF",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSpec {
    pub n_points: usize,
    pub m_informative: usize,
    pub k_clusters: usize,
    pub n_noise: usize,
    pub seed: u64,
}

impl ConfigSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 || self.m_informative == 0 || self.k_clusters == 0 {
            return Err(MwkError::input("n, m and k must all be >= 1"));
        }
        if self.n_points < MIN_CLUSTER_SIZE * self.k_clusters {
            return Err(MwkError::input(format!(
                "n={} cannot hold {} clusters of at least {MIN_CLUSTER_SIZE} points",
                self.n_points, self.k_clusters
            )));
        }
        Ok(())
    }

    /// Canonical `{n}x{m}-{k} +{q}NF` name.
    pub fn name(&self) -> String {
        format!("{}x{}-{} +{}NF", self.n_points, self.m_informative, self.k_clusters, self.n_noise)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        ConfigSpec { seed, ..self }
    }
}

/// Parse `{n}x{m}-{k} +{q}NF`; whitespace is ignored. The seed is left at 0.
pub fn parse_config_name(name: &str) -> Result<ConfigSpec> {
    let bad = || MwkError::ConfigName(name.to_string());
    let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    let (shape, noise) = compact.split_once('+').ok_or_else(bad)?;
    let (n, rest) = shape.split_once('x').ok_or_else(bad)?;
    let (m, k) = rest.split_once('-').ok_or_else(bad)?;
    let q = noise.strip_suffix("NF").ok_or_else(bad)?;
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    Ok(ConfigSpec { n_points: num(n)?, m_informative: num(m)?, k_clusters: num(k)?, n_noise: num(q)?, seed: 0 })
}

/// Cluster sizes: a uniformly random composition of `n - 20k` into `k`
/// non-negative parts (stars and bars), each part plus 20.
fn cluster_sizes(n: usize, k: usize, rng: &mut Rng) -> Vec<usize> {
    let free = n - MIN_CLUSTER_SIZE * k;
    let slots = free + k - 1;
    let mut bars = rand::seq::index::sample(rng, slots, k - 1).into_vec();
    bars.sort_unstable();
    let mut sizes = Vec::with_capacity(k);
    let mut prev = 0usize;
    for (j, &b) in bars.iter().enumerate() {
        // Stars before bar j, minus those already counted.
        let stars_before = b - j;
        sizes.push(stars_before - prev + MIN_CLUSTER_SIZE);
        prev = stars_before;
    }
    sizes.push(free - prev + MIN_CLUSTER_SIZE);
    sizes
}

/// Generate one dataset with labels and informative mask.
pub fn generate(spec: &ConfigSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = seed::rng(spec.seed);
    let (n, mi, k, q) = (spec.n_points, spec.m_informative, spec.k_clusters, spec.n_noise);
    let m = mi + q;

    let centers: Vec<Vec<f64>> =
        (0..k).map(|_| (0..mi).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()).collect();
    let variances: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..=1.5)).collect();
    let sizes = cluster_sizes(n, k, &mut rng);

    let mut values = Matrix::zeros(n, m);
    let mut labels = Vec::with_capacity(n);
    let mut i = 0;
    for l in 0..k {
        let sd = variances[l].sqrt();
        for _ in 0..sizes[l] {
            let row = values.row_mut(i);
            for v in 0..mi {
                row[v] = centers[l][v] + sd * rng.sample::<f64, _>(StandardNormal);
            }
            labels.push(l);
            i += 1;
        }
    }

    if q > 0 {
        let (lo, hi) = (0..n)
            .flat_map(|i| values.row(i)[..mi].to_vec())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        for i in 0..n {
            let row = values.row_mut(i);
            for slot in &mut row[mi..] {
                *slot = rng.random_range(lo..hi);
            }
        }
    }

    let names = (0..m).map(|v| format!("f{v}")).collect();
    Dataset::new(values)?
        .with_feature_names(names)?
        .with_labels(labels)?
        .with_informative((0..m).map(|v| v < mi).collect())
}

/// Seed of dataset `index` of configuration `config_index` in a suite.
pub fn suite_seed(base_seed: u64, config_index: usize, index: usize) -> u64 {
    derive_seed(base_seed, &[config_index as u64, index as u64])
}

/// Every benchmark configuration with `datasets_per_config` datasets each.
pub fn table2_suite(datasets_per_config: usize, base_seed: u64) -> Result<Vec<(String, Vec<Dataset>)>> {
    if datasets_per_config == 0 {
        return Err(MwkError::input("datasets_per_config must be >= 1"));
    }
    TABLE2_CONFIGS
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let spec = parse_config_name(name)?;
            let sets = (0..datasets_per_config)
                .map(|d| generate(&spec.with_seed(suite_seed(base_seed, c, d))))
                .collect::<Result<Vec<_>>>()?;
            Ok((name.to_string(), sets))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, m: usize, k: usize, q: usize, seed: u64) -> ConfigSpec {
        ConfigSpec { n_points: n, m_informative: m, k_clusters: k, n_noise: q, seed }
    }

    #[test]
    fn parses_names() {
        let s = parse_config_name("2000x20-10 +10NF").unwrap();
        assert_eq!((s.n_points, s.m_informative, s.k_clusters, s.n_noise), (2000, 20, 10, 10));
        let s = parse_config_name("1000x4-3 +2NF").unwrap();
        assert_eq!((s.n_points, s.m_informative, s.k_clusters, s.n_noise), (1000, 4, 3, 2));
        let s = parse_config_name("10x2-2 +0NF").unwrap();
        assert_eq!((s.n_points, s.m_informative, s.k_clusters, s.n_noise), (10, 2, 2, 0));
        assert_eq!(parse_config_name("1000x4-10  +2NF").unwrap().name(), "1000x4-10 +2NF");
        for bad in ["1000x4-3", "1000-4x3 +2NF", "ax4-3 +2NF", "1000x4-3 +2", ""] {
            assert!(matches!(parse_config_name(bad), Err(MwkError::ConfigName(_))), "{bad}");
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for name in TABLE2_CONFIGS {
            assert_eq!(parse_config_name(name).unwrap().name(), name);
        }
    }

    #[test]
    fn shape_labels_and_mask() {
        let d = generate(&spec(1000, 4, 5, 2, 1)).unwrap();
        assert_eq!((d.n(), d.m()), (1000, 6));
        assert!(d.labels().unwrap().iter().all(|&l| l < 5));
        assert_eq!(d.informative().unwrap(), &[true, true, true, true, false, false]);
        let d = generate(&spec(100, 3, 2, 0, 1)).unwrap();
        assert!(d.informative().unwrap().iter().all(|&b| b));
        assert!(generate(&spec(99, 3, 5, 0, 1)).is_err());
    }

    #[test]
    fn minimum_cluster_size_holds() {
        for s in 0..100 {
            let d = generate(&spec(1000, 2, 10, 1, s)).unwrap();
            let mut counts = [0usize; 10];
            d.labels().unwrap().iter().for_each(|&l| counts[l] += 1);
            assert!(counts.iter().all(|&c| c >= MIN_CLUSTER_SIZE), "seed {s}: {counts:?}");
            assert_eq!(counts.iter().sum::<usize>(), 1000);
        }
        // Tight case: exactly 20 each.
        let d = generate(&spec(60, 1, 3, 0, 4)).unwrap();
        let mut counts = [0usize; 3];
        d.labels().unwrap().iter().for_each(|&l| counts[l] += 1);
        assert_eq!(counts, [20, 20, 20]);
    }

    #[test]
    fn composition_is_uniform_for_two_clusters() {
        // With k = 2 the free mass split is uniform on {0..=free}.
        let mut rng = seed::rng(8);
        let mut counts = [0usize; 5];
        for _ in 0..10_000 {
            let s = cluster_sizes(44, 2, &mut rng);
            assert_eq!(s.iter().sum::<usize>(), 44);
            counts[s[0] - 20] += 1;
        }
        assert!(counts.iter().all(|&c| (1800..=2200).contains(&c)), "{counts:?}");
    }

    #[test]
    fn regeneration_is_bitwise_identical_and_seeds_separate() {
        let a = generate(&spec(200, 3, 2, 2, 42)).unwrap();
        assert_eq!(a, generate(&spec(200, 3, 2, 2, 42)).unwrap());
        assert_ne!(a.values(), generate(&spec(200, 3, 2, 2, 43)).unwrap().values());
    }

    #[test]
    fn cluster_variance_concentrates() {
        // Recover each cluster's variance from the generator's own stream.
        let sp = spec(2000, 6, 4, 0, 12);
        let d = generate(&sp).unwrap();
        let mut rng = seed::rng(sp.seed);
        for _ in 0..(4 * 6) {
            let _: f64 = rng.sample(StandardNormal);
        }
        let variances: Vec<f64> = (0..4).map(|_| rng.random_range(0.5..=1.5)).collect();
        let labels = d.labels().unwrap();
        for l in 0..4 {
            let idx: Vec<usize> = (0..d.n()).filter(|&i| labels[i] == l).collect();
            if idx.len() < 100 {
                continue;
            }
            let nl = idx.len() as f64;
            for v in 0..6 {
                let xs: Vec<f64> = idx.iter().map(|&i| d.row(i)[v]).collect();
                let mu = xs.iter().sum::<f64>() / nl;
                let s2 = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (nl - 1.0);
                let se = variances[l] * (2.0 / (nl - 1.0)).sqrt();
                assert!((s2 - variances[l]).abs() <= 3.0 * se, "cluster {l} feature {v}: {s2} vs {}", variances[l]);
            }
        }
    }

    #[test]
    fn noise_is_uncorrelated_with_labels() {
        let d = generate(&spec(2000, 4, 3, 3, 5)).unwrap();
        let labels = d.labels().unwrap();
        for v in 4..7 {
            let x = d.column(v);
            for l in 0..3 {
                let y: Vec<f64> = labels.iter().map(|&c| if c == l { 1.0 } else { 0.0 }).collect();
                let n = x.len() as f64;
                let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
                let cov: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
                let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
                let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
                let r = cov / (vx * vy).sqrt();
                assert!(r.abs() < 0.1, "feature {v} cluster {l}: r = {r}");
            }
        }
    }

    #[test]
    fn suite_has_every_configuration() {
        let suite = table2_suite(1, 3).unwrap();
        assert_eq!(suite.len(), 12);
        for ((name, sets), want) in suite.iter().zip(TABLE2_CONFIGS) {
            assert_eq!(name, want);
            assert_eq!(sets.len(), 1);
        }
        assert!(table2_suite(0, 3).is_err());
    }
}
