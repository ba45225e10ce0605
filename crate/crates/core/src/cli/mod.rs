//! Command-line front end: run a benchmark model once or sweep sizes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use crate::analysis::{memory_estimate, scaling_constant, MemoryBreakdown, RateMeter, SpikeRaster};
use crate::engine::{ExecMode, SetupTimings, SimConfig, Simulation};
use crate::error::{Error, Result};
use crate::models::{Bench, BenchParams, ModelKind, PingPong};
use crate::network::NetworkDesc;
use crate::{Brunel32, BrunelPlus32, Vogels32};

/// Simulate a spiking neural network benchmark model.
#[derive(Parser, Debug, Clone)]
#[command(name = "snnq", version)]
pub struct Args {
    /// pingpong, vogels, brunel or brunel+
    #[arg(long, default_value = "brunel")]
    pub model: String,
    /// Network size in neurons.
    #[arg(long, conflicts_with_all = ["synapses", "sweep"])]
    pub neurons: Option<usize>,
    /// Target synapse count; the neuron count is solved from the model's
    /// connection densities.
    #[arg(long, conflicts_with = "sweep")]
    pub synapses: Option<f64>,
    /// Simulated time in seconds.
    #[arg(long, default_value_t = 1.0)]
    pub duration: f64,
    /// Timestep in ms (defaults to the model's).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Synaptic delay in steps (defaults to the model's).
    #[arg(long)]
    pub delay: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel mode (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Sequential, bit-reproducible execution.
    #[arg(long)]
    pub deterministic: bool,
    /// Write the spike raster here.
    #[arg(long)]
    pub raster: Option<PathBuf>,
    /// Write the key=value statistics here instead of standard output.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Override a model parameter, e.g. brunel.w_exc=0.12. Repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Parameter file replacing the shipped defaults.
    #[arg(long)]
    pub defaults: Option<PathBuf>,
    /// Comma-separated synapse counts; emits CSV instead of a single run.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Vec<f64>,
    /// Where to write the sweep CSV (default: standard output).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Size {
    Neurons(usize),
    Synapses(f64),
}

/// Everything needed to reproduce one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: ModelKind,
    pub size: Size,
    /// Simulated seconds.
    pub duration: f64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub deterministic: bool,
    pub raster: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    /// Defaults with all overrides (including dt and delay) applied.
    pub params: BenchParams,
}

impl RunConfig {
    pub fn from_args(args: &Args) -> Result<Self> {
        let model: ModelKind = args.model.parse()?;
        let mut params = match &args.defaults {
            Some(path) => std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?.parse()?,
            None => BenchParams::default(),
        };
        for p in &args.params {
            params.apply(p)?;
        }
        let section = match model {
            ModelKind::Vogels => Some("vogels"),
            ModelKind::Brunel | ModelKind::BrunelPlus => Some("brunel"),
            ModelKind::PingPong => None,
        };
        match (section, args.dt, args.delay) {
            (Some(s), dt, delay) => {
                if let Some(dt) = dt {
                    params.set(&format!("{s}.dt"), dt)?;
                }
                if let Some(d) = delay {
                    params.set(&format!("{s}.delay"), d as f64)?;
                }
            }
            (None, None, None) => {}
            (None, _, _) => return Err(Error::Config("pingpong has fixed dt and delay".into())),
        }
        let size = match (args.neurons, args.synapses, model) {
            (Some(_), Some(_), _) => return Err(Error::Config("give either --neurons or --synapses".into())),
            (Some(n), None, _) => Size::Neurons(n),
            (None, Some(s), _) => Size::Synapses(s),
            (None, None, ModelKind::PingPong) => Size::Neurons(200),
            (None, None, _) if !args.sweep.is_empty() => Size::Synapses(args.sweep[0]),
            (None, None, _) => return Err(Error::Config("give --neurons or --synapses".into())),
        };
        let config = RunConfig {
            model,
            size,
            duration: args.duration,
            seed: args.seed,
            threads: args.threads,
            deterministic: args.deterministic,
            raster: args.raster.clone(),
            stats: args.stats.clone(),
            params,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::Config(format!("duration must be > 0, got {}", self.duration)));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("--threads must be ≥ 1".into()));
        }
        Ok(())
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig::default().seed(self.seed).mode(if self.deterministic {
            ExecMode::Deterministic
        } else {
            ExecMode::Parallel
        })
    }
}

/// Outcome of one run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub model: ModelKind,
    pub seed: u64,
    pub neurons: usize,
    pub synapses: u64,
    pub dt: f64,
    pub delay: usize,
    pub steps: u64,
    pub threads: usize,
    pub deterministic: bool,
    pub scaling_constant: Option<f64>,
    pub setup: SetupTimings,
    pub sim_s: f64,
    pub spikes: u64,
    pub warmup_steps: u64,
    pub firing_rate: f64,
    pub memory: MemoryBreakdown,
    pub estimate: Option<MemoryBreakdown>,
}

impl RunReport {
    pub fn write_stats<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "model={}", self.model)?;
        writeln!(w, "seed={}", self.seed)?;
        writeln!(w, "neurons={}", self.neurons)?;
        writeln!(w, "synapses={}", self.synapses)?;
        writeln!(w, "dt={}", self.dt)?;
        writeln!(w, "delay={}", self.delay)?;
        writeln!(w, "steps={}", self.steps)?;
        writeln!(w, "threads={}", self.threads)?;
        writeln!(w, "deterministic={}", self.deterministic)?;
        if let Some(c) = self.scaling_constant {
            writeln!(w, "scaling_constant={c}")?;
        }
        writeln!(w, "setup_construct_s={:.6}", self.setup.construct.as_secs_f64())?;
        writeln!(w, "setup_neurons_s={:.6}", self.setup.neurons.as_secs_f64())?;
        writeln!(w, "setup_synapses_s={:.6}", self.setup.synapses.as_secs_f64())?;
        writeln!(w, "setup_s={:.6}", self.setup.total().as_secs_f64())?;
        writeln!(w, "sim_s={:.6}", self.sim_s)?;
        writeln!(w, "steps_per_s={:.1}", self.steps as f64 / self.sim_s.max(1e-9))?;
        writeln!(w, "spikes={}", self.spikes)?;
        writeln!(w, "warmup_steps={}", self.warmup_steps)?;
        writeln!(w, "firing_rate={}", self.firing_rate)?;
        write_memory(&mut w, "memory", &self.memory)?;
        if let Some(e) = &self.estimate {
            write_memory(&mut w, "estimate", e)?;
        }
        Ok(())
    }
}

fn write_memory<W: Write>(w: &mut W, prefix: &str, m: &MemoryBreakdown) -> io::Result<()> {
    for (c, b) in &m.per_neuron {
        writeln!(w, "{prefix}.neuron.{c}={b}")?;
    }
    for (c, b) in &m.per_synapse {
        writeln!(w, "{prefix}.synapse.{c}={b}")?;
    }
    writeln!(w, "{prefix}.per_neuron={}", m.per_neuron_total())?;
    writeln!(w, "{prefix}.per_synapse={}", m.per_synapse_total())?;
    writeln!(w, "{prefix}.bytes={}", m.total_bytes().round())
}

fn build_desc(kind: ModelKind, neurons: usize, params: &BenchParams) -> Result<NetworkDesc> {
    Ok(match kind {
        ModelKind::PingPong => <PingPong as Bench>::build(neurons, params)?.0,
        ModelKind::Vogels => Vogels32::build(neurons, params)?.0,
        ModelKind::Brunel => Brunel32::build(neurons, params)?.0,
        ModelKind::BrunelPlus => BrunelPlus32::build(neurons, params)?.0,
    })
}

/// Neuron count whose expected synapse count is closest to `target`.
pub fn neurons_for_synapses(kind: ModelKind, params: &BenchParams, target: f64) -> Result<usize> {
    if kind == ModelKind::PingPong {
        return Err(Error::Config("pingpong has a fixed size".into()));
    }
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::Config(format!("synapse target must be > 0, got {target}")));
    }
    // Expected synapses grow as K·N², up to rounding of population sizes.
    let probe = 100_000;
    let density = build_desc(kind, probe, params)?.expected_synapses() / (probe as f64 * probe as f64);
    if density <= 0.0 {
        return Err(Error::Config(format!("{kind} has no connections")));
    }
    let guess = (target / density).sqrt().round().max(1.0) as usize;
    let mut best: Option<(f64, usize)> = None;
    for n in guess.saturating_sub(2).max(1)..=guess + 2 {
        if let Ok(desc) = build_desc(kind, n, params) {
            let err = (desc.expected_synapses() - target).abs();
            if best.is_none_or(|(e, _)| err < e) {
                best = Some((err, n));
            }
        }
    }
    best.map(|(_, n)| n)
        .ok_or_else(|| Error::Config(format!("no {kind} network has about {target} synapses")))
}

/// Builds and runs the configured network, writing any requested
/// artifacts.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let neurons = match config.size {
        Size::Neurons(n) => n,
        Size::Synapses(s) => neurons_for_synapses(config.model, &config.params, s)?,
    };
    let pool = pool(config.threads)?;
    let report = pool.install(|| match config.model {
        ModelKind::PingPong => run_model::<PingPong>(config, neurons),
        ModelKind::Vogels => run_model::<Vogels32>(config, neurons),
        ModelKind::Brunel => run_model::<Brunel32>(config, neurons),
        ModelKind::BrunelPlus => run_model::<BrunelPlus32>(config, neurons),
    })?;
    match &config.stats {
        Some(path) => File::create(path)
            .and_then(|f| report.write_stats(BufWriter::new(f)))
            .map_err(|e| Error::io(path, e))?,
        None => report
            .write_stats(io::stdout().lock())
            .map_err(|e| Error::io("<stdout>", e))?,
    }
    Ok(report)
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Config(e.to_string()))
}

fn run_model<M: Bench>(config: &RunConfig, neurons: usize) -> Result<RunReport> {
    let (desc, model) = M::build(neurons, &config.params)?;
    let counted = if config.params.get("analysis.count_stimulus")? != 0.0 {
        0..neurons as u32
    } else {
        let s = model.stimulus();
        s.end..neurons as u32
    };
    let (dt, delay) = (desc.dt, desc.delay);
    let steps = (config.duration * 1000.0 / dt).round() as u64;
    if steps == 0 {
        return Err(Error::Config("duration is shorter than one step".into()));
    }
    let warmup = (config.params.get("analysis.warmup")? / dt).round() as u64;
    let warmup = if warmup < steps { warmup } else { 0 };

    let mut sim = Simulation::new(desc, model, config.sim_config())?;
    let mut meter = RateMeter::new(counted, warmup);
    let mut raster = config.raster.as_ref().map(|_| SpikeRaster::new(dt, neurons));
    let mut spikes = 0u64;
    let start = Instant::now();
    sim.run(steps, |t, frame| {
        spikes += frame.len() as u64;
        meter.record(t, frame);
        if let Some(r) = raster.as_mut() {
            r.push_frame(t, frame);
        }
    });
    let sim_s = start.elapsed().as_secs_f64();
    if let (Some(r), Some(path)) = (&raster, &config.raster) {
        r.save(path)?;
    }
    let synapses = sim.adjacency().synapses();
    Ok(RunReport {
        model: M::KIND,
        seed: config.seed,
        neurons,
        synapses,
        dt,
        delay,
        steps,
        threads: rayon::current_num_threads(),
        deterministic: config.deterministic,
        scaling_constant: scaling_constant(M::KIND, neurons).ok(),
        setup: sim.timings(),
        sim_s,
        spikes,
        warmup_steps: warmup,
        firing_rate: meter.rate(),
        memory: sim.memory(),
        estimate: memory_estimate(M::KIND, neurons as u64, synapses).ok(),
    })
}

/// Runs `sizes` (synapse counts) one after another and writes one CSV row
/// per run: actual synapse count, setup and simulation seconds, and the
/// estimated footprint of the reference layout in bytes.
pub fn sweep<W: Write>(base: &RunConfig, sizes: &[f64], out: W) -> Result<Vec<RunReport>> {
    if sizes.len() < 2 {
        return Err(Error::Config("a sweep needs at least two sizes".into()));
    }
    let mut out = BufWriter::new(out);
    let io_err = |e| Error::io("<csv>", e);
    writeln!(out, "synapses,setup_s,sim_s,bytes").map_err(io_err)?;
    out.flush().map_err(io_err)?;
    let mut reports = Vec::new();
    for &s in sizes {
        let config = RunConfig {
            size: Size::Synapses(s),
            raster: None,
            stats: None,
            ..base.clone()
        };
        let report = run_quiet(&config)?;
        let bytes = report.estimate.as_ref().unwrap_or(&report.memory).total_bytes();
        writeln!(
            out,
            "{},{:.6},{:.6},{}",
            report.synapses,
            report.setup.total().as_secs_f64(),
            report.sim_s,
            bytes.round()
        )
        .map_err(io_err)?;
        out.flush().map_err(io_err)?;
        reports.push(report);
    }
    Ok(reports)
}

/// Like [`run`] but never writes statistics.
fn run_quiet(config: &RunConfig) -> Result<RunReport> {
    let neurons = match config.size {
        Size::Neurons(n) => n,
        Size::Synapses(s) => neurons_for_synapses(config.model, &config.params, s)?,
    };
    pool(config.threads)?.install(|| match config.model {
        ModelKind::PingPong => run_model::<PingPong>(config, neurons),
        ModelKind::Vogels => run_model::<Vogels32>(config, neurons),
        ModelKind::Brunel => run_model::<Brunel32>(config, neurons),
        ModelKind::BrunelPlus => run_model::<BrunelPlus32>(config, neurons),
    })
}

/// Entry point shared by the binary: parses nothing, just dispatches.
pub fn main_with(args: &Args) -> Result<()> {
    let config = RunConfig::from_args(args)?;
    if args.sweep.is_empty() {
        run(&config)?;
        return Ok(());
    }
    match &args.csv {
        Some(path) => sweep(
            &config,
            &args.sweep,
            File::create(path).map_err(|e| Error::io(path, e))?,
        )?,
        None => sweep(&config, &args.sweep, io::stdout().lock())?,
    };
    Ok(())
}
