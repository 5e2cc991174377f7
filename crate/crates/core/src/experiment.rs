//! Turns a validated [`Config`] into experiment runs and their output files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;

use crate::complexity::{analyze, AnalysisSettings, Binning, LyapunovConfig, NeuralOptions};
use crate::config::{Config, Diagnostic, Value};
use crate::dynamics::{DriveSignal, OscillatorParams, Simulation, Trajectory};
use crate::fmt::{parse_numeric_csv, sig9};
use crate::modem::{BerCurve, BerSweep, ChannelSpec, ChipKind, Scheme};
use crate::network::{
    all_to_all_adjacency, bidirectional, directional, external_driving, network_coupling, ring_adjacency, CouplingSpec,
};
use crate::rng;
use crate::svg::{Plot, Series};
use crate::sync::{bit_error_rate, lagged_pearson, mask_recover, mask_transmit, sync_report_nodes, MaskingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Simulate,
    SyncScan,
    Mask,
    Ber,
    Complexity,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::SyncScan => "sync-scan",
            Self::Mask => "mask",
            Self::Ber => "ber",
            Self::Complexity => "complexity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Simulate, Self::SyncScan, Self::Mask, Self::Ber, Self::Complexity].into_iter().find(|k| k.as_str() == s)
    }
}

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// One line per experiment.
    pub summary: String,
    pub artifacts: Vec<Artifact>,
}

/// A configuration that passed every semantic check.
#[derive(Debug, Clone)]
pub struct Experiment {
    cfg: Config,
    kind: ExperimentKind,
}

fn set_param(p: &mut OscillatorParams, name: &str, v: f64) {
    match name {
        "gain" => p.gain = v,
        "alpha" => p.alpha = v,
        "mu" => p.mu = v,
        "x_hat" => p.x_hat = v,
        "kappa_f" => p.kappa_f = v,
        "tau_f" => p.tau_f = v,
        "rc" => p.rc = v,
        _ => panic!("unknown oscillator parameter {name}"),
    }
}

/// Field name at the start of a parameter violation message.
fn violation_field(msg: &str) -> &str {
    msg.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).next().unwrap_or(msg)
}

impl Experiment {
    /// Semantic validation on top of [`Config::parse`].
    pub fn new(cfg: Config) -> Result<Self, Vec<Diagnostic>> {
        let kind = ExperimentKind::parse(cfg.text("experiment")).expect("schema restricts experiment");
        let e = Self { cfg, kind };
        let d = e.diagnostics();
        if d.is_empty() {
            Ok(e)
        } else {
            Err(d)
        }
    }

    pub fn kind(&self) -> ExperimentKind {
        self.kind
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    pub fn seed(&self) -> u64 {
        self.cfg.int("seed")
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.cfg.text("out.dir"))
    }

    pub fn svg(&self) -> bool {
        self.cfg.bool("out.svg")
    }

    fn diag(&self, key: &str, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::new(self.cfg.line(key), Some(key), msg)
    }

    fn node_count(&self) -> usize {
        self.cfg.int("topology.nodes") as usize
    }

    fn base_params(&self) -> OscillatorParams {
        let c = &self.cfg;
        OscillatorParams {
            gain: c.float("node.gain"),
            alpha: c.float("node.alpha"),
            mu: c.float("node.mu"),
            x_hat: c.float("node.x_hat"),
            kappa_f: c.float("node.kappa_f"),
            tau_f: c.float("node.tau_f"),
            rc: c.float("node.rc"),
        }
    }

    /// Parameters of node `i` with its overrides applied.
    pub fn node_params(&self, i: usize) -> OscillatorParams {
        let mut p = self.base_params();
        for (n, name, v) in self.cfg.overrides() {
            if n == i {
                set_param(&mut p, name, v);
            }
        }
        p
    }

    fn all_params(&self) -> Vec<OscillatorParams> {
        (0..self.node_count()).map(|i| self.node_params(i)).collect()
    }

    fn diagnostics(&self) -> Vec<Diagnostic> {
        let c = &self.cfg;
        let mut d = Vec::new();
        let n = self.node_count();
        let kind = c.text("topology.kind");

        for m in self.base_params().violations() {
            d.push(self.diag(&format!("node.{}", violation_field(&m)), m));
        }
        let mask_nodes = if self.kind == ExperimentKind::Mask { 2 } else { 0 };
        for (i, name, _) in c.overrides() {
            let key = format!("node{i}.{name}");
            if i >= n.max(mask_nodes) {
                d.push(self.diag(&key, format!("node {i} does not exist ({n} nodes)")));
            }
        }
        for i in 0..n.max(mask_nodes) {
            if c.overrides().any(|(k, _, _)| k == i) {
                for m in self.node_params(i).violations() {
                    d.push(self.diag(&format!("node{i}.{}", violation_field(&m)), m));
                }
            }
        }

        if n == 0 {
            d.push(self.diag("topology.nodes", "need at least 1 node"));
        }
        if matches!(kind, "bidirectional" | "directional" | "ring" | "all_to_all") && n < 2 {
            d.push(self.diag("topology.nodes", format!("{kind} coupling needs at least 2 nodes")));
        }
        if !(c.float("topology.tau_c") > 0.0) {
            d.push(self.diag("topology.tau_c", "tau_c must be > 0"));
        }
        if !(c.float("topology.drive_frequency_hz") >= 0.0) {
            d.push(self.diag("topology.drive_frequency_hz", "drive frequency must be >= 0"));
        }

        let step = c.float("sim.step");
        let duration = c.float("sim.duration");
        let transient = c.float("sim.transient");
        if !(step > 0.0) {
            d.push(self.diag("sim.step", "step must be > 0"));
        } else {
            let rc_min = (0..n.max(1)).map(|i| self.node_params(i).rc).fold(f64::INFINITY, f64::min);
            if step > rc_min / 50.0 {
                d.push(self.diag("sim.step", format!("step must be <= rc/50 = {}", rc_min / 50.0)));
            }
            if c.float("topology.tau_c") < step {
                d.push(self.diag("topology.tau_c", "tau_c must be at least one step"));
            }
        }
        if !(duration > 0.0) {
            d.push(self.diag("sim.duration", "duration must be > 0"));
        }
        if !(transient >= 0.0 && transient < duration) {
            d.push(self.diag("sim.transient", "transient must be in [0, duration)"));
        }
        if c.int("sim.csv_every") == 0 {
            d.push(self.diag("sim.csv_every", "csv_every must be >= 1"));
        }
        if !(c.float("sim.max_lag") >= 0.0) {
            d.push(self.diag("sim.max_lag", "max_lag must be >= 0"));
        }

        if c.int("scan.points") < 2 {
            d.push(self.diag("scan.points", "need at least 2 scan points"));
        }
        let scan_node = c.int("scan.node") as usize;
        if self.kind == ExperimentKind::SyncScan {
            if scan_node >= n {
                d.push(self.diag("scan.node", format!("node {scan_node} does not exist ({n} nodes)")));
            } else {
                for key in ["scan.from", "scan.to"] {
                    let mut p = self.node_params(scan_node);
                    set_param(&mut p, c.text("scan.param"), c.float(key));
                    for m in p.violations() {
                        d.push(self.diag(key, m));
                    }
                }
            }
            if n < 2 {
                d.push(self.diag("topology.nodes", "sync-scan needs at least 2 nodes"));
            }
        }

        if self.kind == ExperimentKind::Mask && step > 0.0 {
            for m in self.masking().violations(&self.node_params(0)) {
                let key = if m.starts_with("epsilon") {
                    "mask.epsilon"
                } else if m.starts_with("bit_duration") {
                    "mask.bit_duration"
                } else {
                    "sim.step"
                };
                d.push(self.diag(key, m));
            }
        }
        if c.int("mask.bits") == 0 {
            d.push(self.diag("mask.bits", "need at least 1 bit"));
        }

        if c.int("ber.beta") == 0 {
            d.push(self.diag("ber.beta", "beta must be >= 1"));
        }
        if c.int("ber.bpsk_spreading") == 0 {
            d.push(self.diag("ber.bpsk_spreading", "spreading must be >= 1"));
        }
        if self.kind == ExperimentKind::Ber {
            for s in self.ber_sweeps() {
                if let Err(e) = s.validate() {
                    let key = match e {
                        crate::modem::ModemError::TooFewBits { .. } => "ber.bits_per_point",
                        crate::modem::ModemError::InvalidChannel(_) => "ber.ray2_delay_chips",
                        _ => "ber.beta",
                    };
                    d.push(self.diag(key, format!("{}: {e}", s.scheme)));
                }
            }
        }

        if c.int("complexity.k") < 2 {
            d.push(self.diag("complexity.k", "alphabet size must be >= 2"));
        }
        if c.int("complexity.l_max") == 0 {
            d.push(self.diag("complexity.l_max", "l_max must be >= 1"));
        }
        if c.int("complexity.embed_dim") == 0 {
            d.push(self.diag("complexity.embed_dim", "embedding dimension must be >= 1"));
        }
        let fit_end = c.int("complexity.fit_end");
        if fit_end != 0 && fit_end <= c.int("complexity.fit_start") {
            d.push(self.diag("complexity.fit_end", "fit_end must exceed fit_start (or be 0 for automatic)"));
        }
        if c.int("complexity.neural_subset_samples") == 0 {
            d.push(self.diag("complexity.neural_subset_samples", "need at least 1 subset sample"));
        }
        d
    }

    fn coupling(&self) -> Result<CouplingSpec, String> {
        let c = &self.cfg;
        let n = self.node_count();
        let kappa = c.float("topology.kappa_c");
        let tau = c.float("topology.tau_c");
        let spec = match c.text("topology.kind") {
            "bidirectional" => bidirectional(0, 1, kappa, tau).map(|s| s.with_node_count(n)),
            "directional" => directional(0, 1, kappa, tau).map(|s| s.with_node_count(n)),
            "external" => {
                let drive = DriveSignal::Sine {
                    amplitude: c.float("topology.drive_amplitude"),
                    frequency_hz: c.float("topology.drive_frequency_hz"),
                    offset: 0.0,
                };
                external_driving(n, &(0..n).collect::<Vec<_>>(), drive)
            }
            "ring" => network_coupling(n, &ring_adjacency(n, kappa), tau),
            "all_to_all" => network_coupling(n, &all_to_all_adjacency(n, kappa), tau),
            _ => CouplingSpec::uncoupled(n),
        };
        spec.map_err(|e| e.to_string())
    }

    fn simulation(&self, params: Vec<OscillatorParams>) -> Result<Simulation, String> {
        let c = &self.cfg;
        Ok(Simulation::new(params, self.coupling()?)
            .duration(c.float("sim.duration"))
            .step(c.float("sim.step"))
            .transient(c.float("sim.transient"))
            .seed(self.seed()))
    }

    fn masking(&self) -> MaskingConfig {
        let c = &self.cfg;
        MaskingConfig {
            epsilon: c.float("mask.epsilon"),
            bit_duration: c.float("mask.bit_duration"),
            kappa_c: c.float("topology.kappa_c"),
            tau_c: c.float("topology.tau_c"),
            step: c.float("sim.step"),
            transient: c.float("sim.transient"),
        }
    }

    fn channel(&self) -> ChannelSpec {
        let c = &self.cfg;
        match c.text("ber.channel") {
            "awgn" => ChannelSpec::awgn(0.0),
            "severe" => ChannelSpec::severe(0.0),
            "negligible" => ChannelSpec::negligible(0.0),
            _ => ChannelSpec::two_ray(0.0, c.float("ber.ray2_power_db"), c.int("ber.ray2_delay_chips") as usize),
        }
    }

    /// One sweep per configured scheme. CSK and DCSK use `2·beta` chips per
    /// bit; BPSK uses `ber.bpsk_spreading`.
    pub fn ber_sweeps(&self) -> Vec<BerSweep> {
        let c = &self.cfg;
        let beta = c.int("ber.beta") as usize;
        c.list("ber.schemes")
            .iter()
            .map(|s| {
                let scheme = Scheme::parse(s).expect("schema restricts schemes");
                BerSweep {
                    scheme,
                    channel: self.channel(),
                    ebn0_grid: c.floats("ber.ebn0_db").to_vec(),
                    spreading: if scheme == Scheme::Bpsk { c.int("ber.bpsk_spreading") as usize } else { 2 * beta },
                    bits_per_point: c.int("ber.bits_per_point"),
                    seed: self.seed(),
                    chips: ChipKind::parse(c.text("ber.chips")).expect("schema restricts chip kinds"),
                }
            })
            .collect()
    }

    pub fn run(&self) -> Result<Outcome, String> {
        match self.kind {
            ExperimentKind::Simulate => self.run_simulate(),
            ExperimentKind::SyncScan => self.run_sync_scan(),
            ExperimentKind::Mask => self.run_mask(),
            ExperimentKind::Ber => self.run_ber(),
            ExperimentKind::Complexity => self.run_complexity(),
        }
    }

    fn run_simulate(&self) -> Result<Outcome, String> {
        let traj = self.simulation(self.all_params())?.run().map_err(|e| e.to_string())?;
        let max_lag = self.cfg.float("sim.max_lag");
        let mut csv = String::from("node_a,node_b,pearson,lag_s,classification,window_start_s,window_end_s\n");
        let mut summary = format!("simulate: {} nodes, {} s", traj.node_count(), self.cfg.float("sim.duration"));
        for j in 1..traj.node_count() {
            let r = sync_report_nodes(&traj, 0, j, max_lag).map_err(|e| e.to_string())?;
            let _ = writeln!(
                csv,
                "0,{j},{},{},{},{},{}",
                sig9(r.pearson),
                sig9(r.lag),
                r.classification,
                sig9(r.window.0),
                sig9(r.window.1)
            );
            let _ = write!(summary, "; node0-node{j} pearson {:.5} lag {} s {}", r.pearson, r.lag, r.classification);
        }
        let every = self.cfg.int("sim.csv_every") as usize;
        let out = decimate(&traj, every);
        let mut artifacts = vec![
            Artifact { name: "trajectory.csv".into(), contents: out.to_csv_string() },
            Artifact { name: "sync.csv".into(), contents: csv },
        ];
        if self.svg() {
            artifacts.push(Artifact { name: "trajectory.svg".into(), contents: trajectory_svg(&traj) });
        }
        Ok(Outcome { summary, artifacts })
    }

    fn run_sync_scan(&self) -> Result<Outcome, String> {
        let c = &self.cfg;
        let points = c.int("scan.points") as usize;
        let (from, to) = (c.float("scan.from"), c.float("scan.to"));
        let node = c.int("scan.node") as usize;
        let param = c.text("scan.param");
        let other = if node == 0 { 1 } else { 0 };
        let base = {
            let p = self.node_params(node);
            match param {
                "gain" => p.gain,
                "alpha" => p.alpha,
                "mu" => p.mu,
                "x_hat" => p.x_hat,
                "kappa_f" => p.kappa_f,
                "tau_f" => p.tau_f,
                _ => p.rc,
            }
        };
        let values: Vec<f64> = (0..points).map(|i| from + (to - from) * i as f64 / (points - 1) as f64).collect();
        let max_lag = c.float("sim.max_lag");
        let rows: Vec<Result<(f64, f64, crate::sync::SyncReport), String>> = values
            .par_iter()
            .map(|&v| {
                let mut params = self.all_params();
                set_param(&mut params[node], param, v);
                let traj = self.simulation(params)?.run().map_err(|e| e.to_string())?;
                let zero = lagged_pearson(traj.post_transient(other), traj.post_transient(node), 0);
                let r = sync_report_nodes(&traj, other, node, max_lag).map_err(|e| e.to_string())?;
                Ok((v, zero, r))
            })
            .collect();
        let mut csv = String::from("param,value,mismatch,zero_lag_pearson,peak_pearson,lag_s,classification\n");
        let mut peaks = Vec::new();
        for row in rows {
            let (v, zero, r) = row?;
            let mismatch = if base != 0.0 { v / base - 1.0 } else { v - base };
            let _ = writeln!(
                csv,
                "{param},{},{},{},{},{},{}",
                sig9(v),
                sig9(mismatch),
                sig9(zero),
                sig9(r.pearson),
                sig9(r.lag),
                r.classification
            );
            peaks.push(r.pearson);
        }
        let summary = format!(
            "sync-scan: node{node}.{param} over {points} values in [{from}, {to}]; peak correlation {:.4}..{:.4}",
            peaks.iter().cloned().fold(f64::INFINITY, f64::min),
            peaks.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        );
        let mut artifacts = vec![Artifact { name: "sync_scan.csv".into(), contents: csv }];
        if self.svg() {
            let plot = Plot {
                title: "Peak cross-correlation",
                x_label: param,
                y_label: "peak Pearson",
                log_y: false,
                series: vec![Series { label: "peak", x: &values, y: &peaks }],
            };
            artifacts.push(Artifact { name: "sync_scan.svg".into(), contents: plot.render() });
        }
        Ok(Outcome { summary, artifacts })
    }

    fn run_mask(&self) -> Result<Outcome, String> {
        let c = &self.cfg;
        let cfg = self.masking();
        let mut rng = rng::stream(self.seed(), 0x6d61736b);
        let bits: Vec<bool> = (0..c.int("mask.bits")).map(|_| rng.random()).collect();
        let carrier = self.node_params(0);
        let receiver = self.node_params(1);
        let tx = mask_transmit(&carrier, &bits, &cfg, self.seed()).map_err(|e| e.to_string())?;
        let rec =
            mask_recover(&tx.tx, &receiver, cfg.kappa_c, cfg.tau_c, &cfg, self.seed()).map_err(|e| e.to_string())?;
        let ber = bit_error_rate(&bits, &rec.bits);

        let mut bit_csv = String::from("bit,sent,received\n");
        for (k, (a, b)) in bits.iter().zip(&rec.bits).enumerate() {
            let _ = writeln!(bit_csv, "{k},{},{}", *a as u8, *b as u8);
        }
        let every = c.int("sim.csv_every") as usize;
        let mut wave = String::from("t,tx,carrier,receiver,residual,message\n");
        let carrier_x = tx.truth.node(0);
        for k in (0..tx.tx.len()).step_by(every) {
            let _ = writeln!(
                wave,
                "{},{},{},{},{},{}",
                sig9(k as f64 * cfg.step),
                sig9(tx.tx[k]),
                sig9(carrier_x[k]),
                sig9(rec.receiver[k]),
                sig9(rec.residual[k]),
                sig9(tx.message[k])
            );
        }
        let report = format!(
            "bits={}\nbit_errors={}\nber={}\ncorrelation={}\nlag_s={}\nundecidable={}\namplitude={}\nreference_rms={}\n",
            bits.len(),
            bits.iter().zip(&rec.bits).filter(|(a, b)| a != b).count(),
            sig9(ber),
            sig9(rec.correlation),
            sig9(rec.lag),
            rec.undecidable,
            sig9(tx.amplitude),
            sig9(tx.reference_rms)
        );
        let summary = format!(
            "mask: {} bits, epsilon {}, BER {ber}, line-receiver correlation {:.4}{}",
            bits.len(),
            cfg.epsilon,
            rec.correlation,
            if rec.undecidable { ", undecidable" } else { "" }
        );
        let mut artifacts = vec![
            Artifact { name: "mask_bits.csv".into(), contents: bit_csv },
            Artifact { name: "mask_waveform.csv".into(), contents: wave },
            Artifact { name: "mask.txt".into(), contents: report },
        ];
        if self.svg() {
            let t: Vec<f64> = (0..tx.tx.len()).step_by(every).map(|k| k as f64 * cfg.step).collect();
            let res: Vec<f64> = (0..tx.tx.len()).step_by(every).map(|k| rec.residual[k]).collect();
            let msg: Vec<f64> = (0..tx.tx.len()).step_by(every).map(|k| tx.message[k]).collect();
            let plot = Plot {
                title: "Recovered residual",
                x_label: "t (s)",
                y_label: "V",
                log_y: false,
                series: vec![Series { label: "residual", x: &t, y: &res }, Series { label: "message", x: &t, y: &msg }],
            };
            artifacts.push(Artifact { name: "mask.svg".into(), contents: plot.render() });
        }
        Ok(Outcome { summary, artifacts })
    }

    fn run_ber(&self) -> Result<Outcome, String> {
        let curves: Vec<BerCurve> =
            self.ber_sweeps().iter().map(|s| s.run().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
        let mut csv = format!("{}\n", BerCurve::CSV_HEADER);
        for c in &curves {
            c.append_rows(&mut csv);
        }
        let summary = format!(
            "ber: {} over {}; {}",
            curves.iter().map(|c| c.scheme.as_str()).collect::<Vec<_>>().join("/"),
            self.channel().label(),
            curves
                .iter()
                .map(|c| {
                    let p = c.points.last().expect("non-empty grid");
                    format!("{} {} at {} dB", c.scheme, sig9(p.ber), p.ebn0_db)
                })
                .collect::<Vec<_>>()
                .join(", ")
        );
        let mut artifacts = vec![Artifact { name: "ber.csv".into(), contents: csv }];
        if self.svg() {
            let data: Vec<(String, Vec<f64>, Vec<f64>)> = curves
                .iter()
                .map(|c| {
                    (
                        c.scheme.to_string(),
                        c.points.iter().map(|p| p.ebn0_db).collect(),
                        c.points.iter().map(|p| p.ber).collect(),
                    )
                })
                .collect();
            let plot = Plot {
                title: "Bit error rate",
                x_label: "Eb/N0 (dB)",
                y_label: "BER",
                log_y: true,
                series: data.iter().map(|(l, x, y)| Series { label: l, x, y }).collect(),
            };
            artifacts.push(Artifact { name: "ber.svg".into(), contents: plot.render() });
        }
        Ok(Outcome { summary, artifacts })
    }

    /// Channel names, channel data and sample spacing.
    fn complexity_input(&self) -> Result<ComplexityInput, String> {
        let c = &self.cfg;
        let path = c.text("complexity.input");
        if path.is_empty() {
            let traj = self.simulation(self.all_params())?.run().map_err(|e| e.to_string())?;
            let names = (0..traj.node_count()).map(|i| format!("node{i}")).collect();
            let data = (0..traj.node_count()).map(|i| traj.post_transient(i).to_vec()).collect();
            return Ok((names, data, traj.step()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        let table = parse_numeric_csv(&text).map_err(|e| format!("{path}: {e}"))?;
        let step = match table.column("t") {
            Some(t) if t.len() >= 2 && t[1] > t[0] => t[1] - t[0],
            _ => 1.0,
        };
        let wanted: Vec<String> = if c.text("complexity.columns").is_empty() {
            table.header.iter().filter(|h| h.as_str() != "t").cloned().collect()
        } else {
            c.text("complexity.columns").split(',').map(|s| s.trim().to_string()).collect()
        };
        let data = wanted
            .iter()
            .map(|w| table.column(w).ok_or_else(|| format!("{path}: no column `{w}`")))
            .collect::<Result<Vec<_>, _>>()?;
        if data.is_empty() {
            return Err(format!("{path}: no data columns"));
        }
        Ok((wanted, data, step))
    }

    /// Estimator settings; automatic Lyapunov values derive from `node.tau_f`.
    pub fn analysis_settings(&self, step: f64) -> AnalysisSettings {
        let c = &self.cfg;
        let auto = LyapunovConfig::for_delay(c.float("node.tau_f"), step);
        let pick = |key: &str, fallback: usize| match c.int(key) {
            0 => fallback,
            v => v as usize,
        };
        let lyapunov = c.bool("complexity.lyapunov").then(|| LyapunovConfig {
            dim: c.int("complexity.embed_dim") as usize,
            lag: pick("complexity.embed_lag", auto.lag),
            theiler: pick("complexity.theiler", auto.theiler),
            fit: (c.int("complexity.fit_start") as usize, pick("complexity.fit_end", auto.fit.1)),
            reference_stride: 0,
        });
        AnalysisSettings {
            k: c.int("complexity.k") as usize,
            binning: Binning::parse(c.text("complexity.binning")).expect("schema restricts binning"),
            l_max: c.int("complexity.l_max") as usize,
            channel: c.int("complexity.channel") as usize,
            neural: NeuralOptions {
                max_exact_n: c.int("complexity.neural_max_exact_n") as usize,
                subset_samples: c.int("complexity.neural_subset_samples") as usize,
                seed: self.seed(),
            },
            lyapunov,
        }
    }

    fn run_complexity(&self) -> Result<Outcome, String> {
        let (names, data, step) = self.complexity_input()?;
        let settings = self.analysis_settings(step);
        let report = analyze(&data, step, &settings).map_err(|e| e.to_string())?;
        let summary = format!(
            "complexity: {} ({} samples, {} channels); H1 {:.4} bits, E {:.4} bits, LMC {:.4}, C_N {}, lambda {}",
            names.get(settings.channel).map(String::as_str).unwrap_or("?"),
            report.samples,
            report.channels,
            report.shannon_bits,
            report.excess_entropy_bits,
            report.lmc,
            report.neural_complexity_bits.map(|v| format!("{v:.4} bits")).unwrap_or_else(|| "n/a".into()),
            report.lyapunov_per_s.map(|v| format!("{v:.4} 1/s")).unwrap_or_else(|| "n/a".into()),
        );
        Ok(Outcome {
            summary,
            artifacts: vec![
                Artifact { name: "complexity.txt".into(), contents: report.to_key_value() },
                Artifact { name: "complexity.csv".into(), contents: report.to_csv() },
            ],
        })
    }
}

type ComplexityInput = (Vec<String>, Vec<Vec<f64>>, f64);

fn decimate(traj: &Trajectory, every: usize) -> Trajectory {
    let data = traj.nodes().iter().map(|n| n.iter().step_by(every).copied().collect()).collect();
    Trajectory::new(traj.step() * every as f64, traj.transient_end().div_ceil(every), data)
}

fn trajectory_svg(traj: &Trajectory) -> String {
    // 0.2 s of post-transient signal
    let start = traj.transient_end();
    let end = (start + (0.2 / traj.step()).round() as usize).min(traj.len());
    let every = ((end - start) / 2000).max(1);
    let idx: Vec<usize> = (start..end).step_by(every).collect();
    let t: Vec<f64> = idx.iter().map(|&k| traj.time(k)).collect();
    let ys: Vec<Vec<f64>> = (0..traj.node_count()).map(|i| idx.iter().map(|&k| traj.node(i)[k]).collect()).collect();
    let labels: Vec<String> = (0..traj.node_count()).map(|i| format!("node{i}")).collect();
    Plot {
        title: "Node outputs",
        x_label: "t (s)",
        y_label: "x (V)",
        log_y: false,
        series: ys.iter().zip(&labels).map(|(y, l)| Series { label: l, x: &t, y }).collect(),
    }
    .render()
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}

/// Applies command-line overrides to a parsed config.
pub fn apply_overrides(cfg: &mut Config, seed: Option<u64>, out: Option<&Path>, svg: bool) {
    if let Some(s) = seed {
        cfg.set("seed", Value::Int(s));
    }
    if let Some(o) = out {
        cfg.set("out.dir", Value::Text(o.to_string_lossy().into_owned()));
    }
    if svg {
        cfg.set("out.svg", Value::Bool(true));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(text: &str) -> Result<Experiment, Vec<Diagnostic>> {
        Experiment::new(Config::parse(text)?)
    }

    #[test]
    fn alpha_diagnostic() {
        let e = exp("experiment = simulate\nnode.alpha = -1\n").unwrap_err();
        assert!(e.iter().any(|d| d.to_string() == "line 2: node.alpha: alpha must be > 0"), "{e:?}");
    }

    #[test]
    fn overrides_apply_per_node() {
        let e = exp("experiment = simulate\nnode1.tau_f = 0.015\n").unwrap();
        assert_eq!(e.node_params(0).tau_f, 0.018);
        assert_eq!(e.node_params(1).tau_f, 0.015);
        assert!(exp("experiment = simulate\nnode5.tau_f = 0.015\n").is_err());
    }

    #[test]
    fn step_limit_checked() {
        let e = exp("experiment = simulate\nsim.step = 0.0001\n").unwrap_err();
        assert!(e[0].to_string().contains("rc/50"));
    }

    #[test]
    fn ber_sweep_settings() {
        let e = exp("experiment = ber\n").unwrap();
        let s = e.ber_sweeps();
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].spreading, 1);
        assert_eq!(s[2].spreading, 128);
        let bad = exp("experiment = ber\nber.bits_per_point = 10\n").unwrap_err();
        assert_eq!(bad[0].key.as_deref(), Some("ber.bits_per_point"));
    }

    #[test]
    fn mask_bounds_checked() {
        let e = exp("experiment = mask\nmask.epsilon = 0.5\n").unwrap_err();
        assert_eq!(e[0].key.as_deref(), Some("mask.epsilon"));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_atomic(&p, "one\n").unwrap();
        write_atomic(&p, "two\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
