//! Per-phase timing of Supersonic OT and of the Naor-Pinkas base OT.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::base_ot::{np_gen_query, np_gen_res, np_retrieve};
use crate::error::{OtError, Result};
use crate::group::gen_group;
use crate::primitives::ByteString;
use crate::supersonic::{sup_gen_query, sup_gen_res, sup_obl_filter, sup_retrieve, sup_setup};

/// Published single-invocation and 10^7-invocation Supersonic timings, in
/// milliseconds, printed as reference points only.
pub const REFERENCE_SINGLE_MS: f64 = 0.35;
pub const REFERENCE_TEN_MILLION_MS: f64 = 6_610.0;

#[derive(Clone, Debug)]
pub struct PhaseStat {
    pub name: &'static str,
    pub total: Duration,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub protocol: String,
    pub iterations: u64,
    /// Wall time of the whole measured loop.
    pub total: Duration,
    pub phases: Vec<PhaseStat>,
    pub machine_note: String,
}

impl BenchReport {
    pub fn mean(&self) -> Duration {
        self.total.div_f64(self.iterations as f64)
    }

    pub fn mean_ms(&self) -> f64 {
        self.mean().as_secs_f64() * 1e3
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "protocol     {}", self.protocol);
        let _ = writeln!(out, "iterations   {}", self.iterations);
        let _ = writeln!(out, "total        {:.3} ms", self.total.as_secs_f64() * 1e3);
        let _ = writeln!(out, "mean         {:.6} ms", self.mean_ms());
        let _ = writeln!(out, "phases (mean per invocation)");
        for p in &self.phases {
            let mean = p.total.as_secs_f64() * 1e3 / self.iterations as f64;
            let _ = writeln!(out, "  {:<10} {:.6} ms", p.name, mean);
        }
        let _ = writeln!(out, "machine      {}", self.machine_note);
        out
    }
}

pub fn machine_note() -> String {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!("{} {} ({} hardware threads)", std::env::consts::OS, std::env::consts::ARCH, threads)
}

struct PhaseClock {
    names: Vec<&'static str>,
    totals: Vec<Duration>,
}

impl PhaseClock {
    fn new(names: &[&'static str]) -> Self {
        PhaseClock { names: names.to_vec(), totals: vec![Duration::ZERO; names.len()] }
    }

    fn time<T>(&mut self, index: usize, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.totals[index] += start.elapsed();
        out
    }

    fn into_stats(self) -> Vec<PhaseStat> {
        self.names.into_iter().zip(self.totals).map(|(name, total)| PhaseStat { name, total }).collect()
    }
}

fn check_iters(iterations: u64) -> Result<()> {
    if iterations == 0 {
        return Err(OtError::InvalidParameter("iterations must be at least 1".into()));
    }
    Ok(())
}

/// `iterations` full Supersonic invocations with fresh keys and shares each
/// time; messages are drawn once.
pub fn bench_supersonic(iterations: u64, sigma_bits: usize, seed: u64) -> Result<BenchReport> {
    check_iters(iterations)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    sup_setup(sigma_bits, &mut rng)?;
    let m0 = ByteString::random(sigma_bits / 8, &mut rng);
    let m1 = ByteString::random(sigma_bits / 8, &mut rng);
    let mut clock = PhaseClock::new(&["setup", "query", "response", "filter", "retrieve"]);
    let start = Instant::now();
    for i in 0..iterations {
        let s = i % 2 == 1;
        let keys = clock.time(0, || sup_setup(sigma_bits, &mut rng))?;
        let (q1, q2) = clock.time(1, || sup_gen_query(s, &mut rng));
        let e = clock.time(2, || sup_gen_res(&m0, &m1, &keys, q1))?;
        let c = clock.time(3, || sup_obl_filter(e, q2));
        let out = clock.time(4, || sup_retrieve(&c, keys, s))?;
        if &out != if s { &m1 } else { &m0 } {
            return Err(OtError::Flow("supersonic benchmark produced a wrong output".into()));
        }
    }
    Ok(BenchReport {
        protocol: "supersonic".into(),
        iterations,
        total: start.elapsed(),
        phases: clock.into_stats(),
        machine_note: machine_note(),
    })
}

/// `iterations` Naor-Pinkas invocations over one group with a
/// `group_bits`-bit subgroup order; group generation is not timed.
pub fn bench_np(iterations: u64, sigma_bits: usize, group_bits: u64, seed: u64) -> Result<BenchReport> {
    check_iters(iterations)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let pk = gen_group(group_bits, &mut rng)?;
    let m0 = ByteString::random(sigma_bits / 8, &mut rng);
    let m1 = ByteString::random(sigma_bits / 8, &mut rng);
    let mut clock = PhaseClock::new(&["query", "response", "retrieve"]);
    let start = Instant::now();
    for i in 0..iterations {
        let s = i % 2 == 1;
        let (query, secret) = clock.time(0, || np_gen_query(&pk, s, &mut rng));
        let res = clock.time(1, || np_gen_res(&m0, &m1, &pk, &query, &mut rng))?;
        let out = clock.time(2, || np_retrieve(&res, &secret, &pk))?;
        if &out != if s { &m1 } else { &m0 } {
            return Err(OtError::Flow("Naor-Pinkas benchmark produced a wrong output".into()));
        }
    }
    Ok(BenchReport {
        protocol: format!("np-ot ({group_bits}-bit q)"),
        iterations,
        total: start.elapsed(),
        phases: clock.into_stats(),
        machine_note: machine_note(),
    })
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub supersonic: BenchReport,
    pub np: BenchReport,
}

impl Comparison {
    /// Naor-Pinkas mean over Supersonic mean.
    pub fn speedup(&self) -> f64 {
        self.np.mean().as_secs_f64() / self.supersonic.mean().as_secs_f64()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.supersonic.render());
        out.push('\n');
        out.push_str(&self.np.render());
        let _ = writeln!(out, "\nspeedup      {:.1}x (np-ot mean / supersonic mean)", self.speedup());
        out
    }
}

pub fn bench_compare(
    supersonic_iterations: u64,
    np_iterations: u64,
    sigma_bits: usize,
    group_bits: u64,
    seed: u64,
) -> Result<Comparison> {
    Ok(Comparison {
        supersonic: bench_supersonic(supersonic_iterations, sigma_bits, seed)?,
        np: bench_np(np_iterations, sigma_bits, group_bits, seed)?,
    })
}

/// Footer with the published reference timings.
pub fn reference_footer() -> String {
    format!(
        "reference    published Supersonic figures: {REFERENCE_SINGLE_MS} ms single invocation, \
         {REFERENCE_TEN_MILLION_MS} ms for 10^7 invocations"
    )
}
