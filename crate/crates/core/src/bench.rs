//! Measurements behind two claims: lightmap lookups cost the same at any
//! environment resolution while brute-force shading grows with texel count,
//! and the MLS field is continuous where the nearest-triangle field jumps.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baker::{bake_all_with_threads, Lobe, Oracle, DEFAULT_SHININESS};
use crate::color::Rgb;
use crate::envmap::{sun_and_sky, Direction};
use crate::error::{Error, Result};
use crate::mls::fixtures::{bend_probe_segment, displacement_profile, max_adjacent_jump};
use crate::mls::{ControlSet, MlsField, SurfaceField, DEFAULT_ALPHA};
use crate::{par, Vec3};

pub const DEFAULT_ENV_RESOLUTIONS: [(usize, usize); 4] =
    [(32, 16), (64, 32), (128, 64), (256, 128)];
pub const DEFAULT_QUERIES: usize = 10_000;
pub const DEFAULT_LIGHTMAP_RESOLUTION: (usize, usize) = (64, 32);
/// Probe sample counts: 100 points, then the spacing halved three times.
pub const DEFAULT_CONTINUITY_SAMPLES: [usize; 4] = [100, 199, 397, 793];
const MIN_QUERIES: usize = 10_000;
const REPETITIONS: usize = 5;
const MIN_TICKS: f64 = 10.0;
/// Lookups are cheap, so each timed run repeats the query set this many
/// times to lift it well above timer and scheduler noise.
pub const LOOKUP_PASSES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadingConfig {
    pub queries: usize,
    pub lightmap_resolution: (usize, usize),
    pub seed: u64,
    /// `None` times a single thread; `Some(n)` splits the queries over `n`
    /// workers and reports wall-clock throughput.
    pub threads: Option<usize>,
}

impl Default for ShadingConfig {
    fn default() -> Self {
        ShadingConfig {
            queries: DEFAULT_QUERIES,
            lightmap_resolution: DEFAULT_LIGHTMAP_RESOLUTION,
            seed: 0,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadingReport {
    pub queries: usize,
    pub seed: u64,
    pub threads: usize,
    pub shininess: Vec<u32>,
    pub lightmap_resolution: (usize, usize),
    pub env_resolutions: Vec<(usize, usize)>,
    pub env_texel_counts: Vec<usize>,
    pub oracle_ns_per_query: Vec<f64>,
    pub lookup_ns_per_query: Vec<f64>,
    pub speedup: Vec<f64>,
    pub timer_tick_ns: f64,
    /// Set when some median spans fewer than ten timer ticks.
    pub unreliable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub alpha: f64,
    pub segment: (Vec3, Vec3),
    pub samples: Vec<usize>,
    pub mls_max_jump: Vec<f64>,
    pub sf_max_jump: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shading: Option<ShadingReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub continuity: Option<ContinuityReport>,
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn uniform_direction(rng: &mut impl Rng) -> Direction {
    let y: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi: f64 = std::f64::consts::TAU * rng.random::<f64>();
    let s = (1.0 - y * y).max(0.0).sqrt();
    Direction::normalize(Vec3::new(s * phi.cos(), y, s * phi.sin())).expect("unit")
}

/// `count` uniformly distributed `(normal, reflected)` direction pairs.
pub fn random_queries(count: usize, seed: u64) -> Vec<(Direction, Direction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (uniform_direction(&mut rng), uniform_direction(&mut rng)))
        .collect()
}

/// Smallest observable step of the monotonic clock.
fn timer_tick() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..1000 {
        let a = Instant::now();
        let mut b = Instant::now();
        while b == a {
            b = Instant::now();
        }
        best = best.min(b - a);
    }
    best
}

/// Median wall time of `REPETITIONS` runs after one discarded warmup.
fn median_time(mut run: impl FnMut()) -> Duration {
    run();
    let mut times: Vec<Duration> = (0..REPETITIONS)
        .map(|_| {
            let t = Instant::now();
            run();
            t.elapsed()
        })
        .collect();
    times.sort();
    times[REPETITIONS / 2]
}

fn run_queries<F>(queries: &[(Direction, Direction)], threads: Option<usize>, f: F) -> Rgb
where
    F: Fn(Direction, Direction) -> Rgb + Sync + Send,
{
    match threads {
        None => queries
            .iter()
            .fold(Rgb::BLACK, |acc, &(n, r)| acc + f(n, r)),
        Some(_) => par::map_indexed(queries.len(), threads, |i| f(queries[i].0, queries[i].1))
            .into_iter()
            .fold(Rgb::BLACK, |a, b| a + b),
    }
}

/// Times brute-force shading against lightmap lookups on the
/// [`sun_and_sky`] environment at each resolution. Both paths evaluate the
/// diffuse lobe plus every default specular lobe per query.
pub fn bench_shading(
    env_resolutions: &[(usize, usize)],
    config: &ShadingConfig,
) -> Result<ShadingReport> {
    if config.queries < MIN_QUERIES {
        return Err(Error::invalid(format!(
            "{} queries requested, at least {MIN_QUERIES} needed",
            config.queries
        )));
    }
    if env_resolutions.is_empty() {
        return Err(Error::invalid("no environment resolutions"));
    }
    let counts: Vec<usize> = env_resolutions.iter().map(|&(w, h)| w * h).collect();
    if counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("environment resolutions must be ascending"));
    }

    let shininess = DEFAULT_SHININESS.to_vec();
    let queries = random_queries(config.queries, config.seed);
    let tick = timer_tick();
    let mut report = ShadingReport {
        queries: config.queries,
        seed: config.seed,
        threads: config.threads.unwrap_or(1),
        shininess: shininess.clone(),
        lightmap_resolution: config.lightmap_resolution,
        env_resolutions: env_resolutions.to_vec(),
        env_texel_counts: counts,
        oracle_ns_per_query: Vec::new(),
        lookup_ns_per_query: Vec::new(),
        speedup: Vec::new(),
        timer_tick_ns: tick.as_secs_f64() * 1e9,
        unreliable: false,
    };

    for &(w, h) in env_resolutions {
        let env = sun_and_sky(w, h)?;
        let oracle = Oracle::new(&env);
        let lights =
            bake_all_with_threads(&env, &shininess, config.lightmap_resolution, config.threads)?;
        let maps: Vec<_> = std::iter::once(Lobe::Diffuse)
            .chain(shininess.iter().map(|&k| Lobe::Specular(k)))
            .map(|lobe| lights.map(lobe).cloned())
            .collect::<Result<_>>()?;

        let oracle_time = median_time(|| {
            black_box(run_queries(&queries, config.threads, |n, r| {
                let mut acc = oracle.diffuse(n);
                for &k in &shininess {
                    acc += oracle.specular(k, r);
                }
                acc
            }));
        });
        let lookup_time = median_time(|| {
            for _ in 0..LOOKUP_PASSES {
                black_box(run_queries(&queries, config.threads, |n, r| {
                    let mut acc = maps[0].sample(n);
                    for m in &maps[1..] {
                        acc += m.sample(r);
                    }
                    acc
                }));
            }
        }) / LOOKUP_PASSES as u32;

        for t in [oracle_time, lookup_time] {
            if t.as_secs_f64() < MIN_TICKS * tick.as_secs_f64() {
                report.unreliable = true;
            }
        }
        let per = |t: Duration| t.as_secs_f64() * 1e9 / config.queries as f64;
        let (o, l) = (
            per(oracle_time).max(f64::MIN_POSITIVE),
            per(lookup_time).max(f64::MIN_POSITIVE),
        );
        report.oracle_ns_per_query.push(o);
        report.lookup_ns_per_query.push(l);
        report.speedup.push(o / l);
    }
    Ok(report)
}

impl ShadingReport {
    /// Lookup spread, oracle growth, top-resolution speedup and speedup
    /// monotonicity, against the given thresholds.
    pub fn checks(
        &self,
        max_lookup_spread: f64,
        min_oracle_growth: f64,
        min_speedup: f64,
    ) -> Vec<Check> {
        let lk = &self.lookup_ns_per_query;
        let or = &self.oracle_ns_per_query;
        let spread = lk.iter().cloned().fold(0.0, f64::max)
            / lk.iter().cloned().fold(f64::INFINITY, f64::min);
        let growth = or[or.len() - 1] / or[0];
        let top = *self.speedup.last().unwrap_or(&0.0);
        let monotone = self.speedup.windows(2).all(|w| w[1] >= w[0]);
        vec![
            Check::new(
                "lookup time spread",
                spread < max_lookup_spread,
                format!("{spread:.2}× (limit {max_lookup_spread}×)"),
            ),
            Check::new(
                "oracle time growth",
                growth >= min_oracle_growth,
                format!("{growth:.1}× (need ≥ {min_oracle_growth}×)"),
            ),
            Check::new(
                "top-resolution speedup",
                top > min_speedup,
                format!("{top:.1}× (need > {min_speedup}×)"),
            ),
            Check::new(
                "speedup nondecreasing",
                monotone,
                format!(
                    "{:?}",
                    self.speedup
                        .iter()
                        .map(|s| (s * 10.0).round() / 10.0)
                        .collect::<Vec<_>>()
                ),
            ),
            Check::new(
                "timer resolution",
                !self.unreliable,
                format!("tick {:.0} ns", self.timer_tick_ns),
            ),
        ]
    }
}

/// Samples MLS and nearest-triangle displacements along the bend probe
/// segment at each sample count and records the largest adjacent jump.
pub fn bench_continuity(
    fixture: &ControlSet,
    samples: &[usize],
    alpha: f64,
) -> Result<ContinuityReport> {
    if samples.iter().any(|&n| n < 2) || samples.is_empty() {
        return Err(Error::invalid("each probe needs at least two samples"));
    }
    let mls = MlsField::new(fixture.clone(), alpha)?;
    let sf = SurfaceField::new(fixture)?;
    let (a, b) = bend_probe_segment();
    let mut report = ContinuityReport {
        alpha,
        segment: (a, b),
        samples: samples.to_vec(),
        mls_max_jump: Vec::new(),
        sf_max_jump: Vec::new(),
    };
    for &n in samples {
        let m = displacement_profile(|p| mls.transform(p), a, b, n)?;
        let s = displacement_profile(|p| Ok(sf.transform(p)), a, b, n)?;
        report.mls_max_jump.push(max_adjacent_jump(&m));
        report.sf_max_jump.push(max_adjacent_jump(&s));
    }
    Ok(report)
}

/// Convenience wrapper with the default fall-off exponent.
pub fn bench_continuity_default(fixture: &ControlSet) -> Result<ContinuityReport> {
    bench_continuity(fixture, &DEFAULT_CONTINUITY_SAMPLES, DEFAULT_ALPHA)
}

impl ContinuityReport {
    /// SF/MLS jump ratio at the first sample count, MLS jump ratio per
    /// halving of the spacing, and SF jump drift per halving.
    pub fn checks(&self, min_ratio: f64, max_halving: f64, max_sf_drift: f64) -> Vec<Check> {
        let ratio = self.sf_max_jump[0] / self.mls_max_jump[0];
        let halvings: Vec<f64> = self.mls_max_jump.windows(2).map(|w| w[1] / w[0]).collect();
        let drift: Vec<f64> = self
            .sf_max_jump
            .windows(2)
            .map(|w| (w[1] / w[0] - 1.0).abs())
            .collect();
        let round = |v: &[f64]| {
            v.iter()
                .map(|x| (x * 1e3).round() / 1e3)
                .collect::<Vec<_>>()
        };
        vec![
            Check::new(
                "SF/MLS jump ratio",
                ratio >= min_ratio,
                format!(
                    "{ratio:.1} at {} samples (need ≥ {min_ratio})",
                    self.samples[0]
                ),
            ),
            Check::new(
                "MLS jump halves with spacing",
                halvings.iter().all(|&h| h <= max_halving),
                format!("ratios {:?} (limit {max_halving})", round(&halvings)),
            ),
            Check::new(
                "SF jump persists",
                drift.iter().all(|&d| d <= max_sf_drift),
                format!("relative drift {:?} (limit {max_sf_drift})", round(&drift)),
            ),
        ]
    }
}

impl BenchReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Tab-separated rows for plotting, one block per section.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        if let Some(s) = &self.shading {
            out.push_str("env_width\tenv_height\tenv_texels\toracle_ns\tlookup_ns\tspeedup\n");
            for i in 0..s.env_texel_counts.len() {
                let (w, h) = s.env_resolutions[i];
                let _ = writeln!(
                    out,
                    "{w}\t{h}\t{}\t{:.3}\t{:.3}\t{:.3}",
                    s.env_texel_counts[i],
                    s.oracle_ns_per_query[i],
                    s.lookup_ns_per_query[i],
                    s.speedup[i]
                );
            }
        }
        if let Some(c) = &self.continuity {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str("samples\tspacing\tmls_max_jump\tsf_max_jump\n");
            let len = (c.segment.1 - c.segment.0).norm();
            for i in 0..c.samples.len() {
                let _ = writeln!(
                    out,
                    "{}\t{:.6e}\t{:.6e}\t{:.6e}",
                    c.samples[i],
                    len / (c.samples[i] - 1) as f64,
                    c.mls_max_jump[i],
                    c.sf_max_jump[i]
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mls::fixtures::{bend_fixture, identity_fixture};

    #[test]
    fn rejects_bad_shading_input() {
        let few = ShadingConfig {
            queries: 0,
            ..Default::default()
        };
        assert!(bench_shading(&[(32, 16)], &few).is_err());
        let cfg = ShadingConfig::default();
        assert!(bench_shading(&[(64, 32), (32, 16)], &cfg).is_err());
        assert!(bench_shading(&[], &cfg).is_err());
    }

    #[test]
    fn queries_are_seeded() {
        let a = random_queries(50, 7);
        assert_eq!(a, random_queries(50, 7));
        assert_ne!(a, random_queries(50, 8));
        for (n, r) in &a {
            assert!((n.as_vec().norm() - 1.0).abs() < 1e-12);
            assert!((r.as_vec().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_resolution_speedup() {
        let cfg = ShadingConfig {
            lightmap_resolution: (16, 8),
            ..Default::default()
        };
        let r = bench_shading(&[(32, 16)], &cfg).unwrap();
        assert!(r.speedup[0] > 1.0, "{r:?}");
        assert!(r.oracle_ns_per_query[0] > 0.0 && r.lookup_ns_per_query[0] > 0.0);
    }

    #[test]
    fn identity_fixture_has_no_jumps() {
        let r = bench_continuity(&identity_fixture(), &[100], 1.0).unwrap();
        assert!(r.mls_max_jump[0] < 1e-9 && r.sf_max_jump[0] < 1e-9, "{r:?}");
    }

    #[test]
    fn continuity_is_deterministic() {
        let a = bench_continuity(&bend_fixture(), &[100, 199], 1.0).unwrap();
        let b = bench_continuity(&bend_fixture(), &[100, 199], 1.0).unwrap();
        assert_eq!(a, b);
        let report = BenchReport {
            shading: None,
            continuity: Some(a),
        };
        let back: BenchReport = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        assert_eq!(back, report);
        assert_eq!(report.to_tsv().lines().count(), 3);
    }
}
