use std::sync::Arc;

use rand::Rng;

use super::history::ResolvedLag;
use super::{DriveSignal, DynamicsError, HistoryBuffer, MackeyGlassFn, OscillatorParams, Trajectory};
use crate::network::{CouplingSpec, Edge};
use crate::rng;

/// Default integration step (s).
pub const DEFAULT_STEP: f64 = 1e-5;
/// Leading span excluded from every statistic (s).
pub const DEFAULT_TRANSIENT: f64 = 1.0;
/// Range of the seeded constant initial history (V).
pub const HISTORY_RANGE: (f64, f64) = (0.1, 0.9);
/// Largest admissible step as a fraction of `rc`.
pub const MAX_STEP_FRACTION: f64 = 1.0 / 50.0;

/// How each node's history before `t = 0` is set.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialHistory {
    /// Node `i` gets the constant [`seeded_history`]`(seed, i)`.
    Seeded(u64),
    /// Explicit constant per node.
    Constant(Vec<f64>),
}

/// Constant history value of node `node` for a run seeded with `seed`.
pub fn seeded_history(seed: u64, node: usize) -> f64 {
    rng::stream(seed, node as u64).random_range(HISTORY_RANGE.0..HISTORY_RANGE.1)
}

/// A fully described integration run.
///
/// Node `i` obeys
/// `rc·dx_i/dt = −x_i + κ_f·f(x_i(t−τ_f)) + Σ κ_c·f(line_j(t−τ_c)) + d_i(t)`,
/// integrated with classical RK4 at a fixed step; delayed states come from
/// [`HistoryBuffer`] lookups. The coupling term of an edge passes through the
/// receiving node's nonlinearity.
#[derive(Debug, Clone)]
pub struct Simulation {
    params: Vec<OscillatorParams>,
    coupling: CouplingSpec,
    drives: Vec<DriveSignal>,
    duration: f64,
    step: f64,
    transient: f64,
    history: InitialHistory,
    record_every: usize,
    // Edges allowed to close on their own node (a transmitter reading its
    // own line).
    loopbacks: Vec<Edge>,
    // Added to a node's output as seen through coupling edges.
    line_offsets: Vec<DriveSignal>,
    // Nodes whose state is prescribed sample-by-sample instead of integrated.
    replay: Vec<Option<Arc<[f64]>>>,
}

impl Simulation {
    pub fn new(params: Vec<OscillatorParams>, coupling: CouplingSpec) -> Self {
        let n = coupling.node_count();
        Self {
            params,
            coupling,
            drives: vec![DriveSignal::Zero; n],
            duration: 2.0,
            step: DEFAULT_STEP,
            transient: DEFAULT_TRANSIENT,
            history: InitialHistory::Seeded(0),
            record_every: 1,
            loopbacks: Vec::new(),
            line_offsets: vec![DriveSignal::Zero; n],
            replay: vec![None; n],
        }
    }

    pub fn duration(mut self, seconds: f64) -> Self {
        self.duration = seconds;
        self
    }

    pub fn step(mut self, seconds: f64) -> Self {
        self.step = seconds;
        self
    }

    pub fn transient(mut self, seconds: f64) -> Self {
        self.transient = seconds;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.history = InitialHistory::Seeded(seed);
        self
    }

    pub fn history(mut self, history: InitialHistory) -> Self {
        self.history = history;
        self
    }

    /// Keep every `k`-th sample in the output.
    pub fn record_every(mut self, k: usize) -> Self {
        self.record_every = k.max(1);
        self
    }

    /// Per-node additive input signals.
    pub fn drives(mut self, drives: Vec<DriveSignal>) -> Self {
        self.drives = drives;
        self
    }

    pub(crate) fn loopback(mut self, node: usize, kappa_c: f64, tau_c: f64) -> Self {
        self.loopbacks.push(Edge { src: node, dst: node, kappa_c, tau_c });
        self
    }

    pub(crate) fn line_offset(mut self, node: usize, signal: DriveSignal) -> Self {
        self.line_offsets[node] = signal;
        self
    }

    pub(crate) fn replay(mut self, node: usize, samples: Arc<[f64]>) -> Self {
        self.replay[node] = Some(samples);
        self
    }

    fn initial_values(&self) -> Result<Vec<f64>, DynamicsError> {
        let n = self.coupling.node_count();
        match &self.history {
            InitialHistory::Seeded(seed) => Ok((0..n).map(|i| seeded_history(*seed, i)).collect()),
            InitialHistory::Constant(v) if v.len() == n => Ok(v.clone()),
            InitialHistory::Constant(v) => {
                Err(DynamicsError::NodeCountMismatch { what: "initial history", got: v.len(), expected: n })
            }
        }
    }

    fn check(&self) -> Result<(), DynamicsError> {
        let n = self.coupling.node_count();
        for (what, got) in [("params", self.params.len()), ("drives", self.drives.len())] {
            if got != n {
                return Err(DynamicsError::NodeCountMismatch { what, got, expected: n });
            }
        }
        if !(self.step > 0.0) || !(self.duration > 0.0) {
            return Err(DynamicsError::InvalidRun("step and duration must be > 0".into()));
        }
        if !(self.transient >= 0.0) || self.transient > self.duration {
            return Err(DynamicsError::InvalidRun(format!(
                "duration {} s is shorter than the transient window {} s",
                self.duration, self.transient
            )));
        }
        for p in &self.params {
            p.validate()?;
            let limit = p.rc * MAX_STEP_FRACTION;
            if self.step > limit * (1.0 + 1e-12) {
                return Err(DynamicsError::StepTooLarge { step: self.step, limit });
            }
        }
        let delays = self
            .params
            .iter()
            .map(|p| p.tau_f)
            .chain(self.coupling.edges().iter().chain(&self.loopbacks).map(|e| e.tau_c));
        for d in delays {
            // The newest stage of an RK4 step looks back tau - step.
            if d < self.step * (1.0 - 1e-9) {
                return Err(DynamicsError::DelayUnresolvable { delay: d, capacity: self.step });
            }
        }
        Ok(())
    }

    pub fn run(&self) -> Result<Trajectory, DynamicsError> {
        self.check()?;
        let n = self.coupling.node_count();
        let h = self.step;
        let steps = (self.duration / h).round() as usize;
        let init = self.initial_values()?;

        let max_delay = self
            .params
            .iter()
            .map(|p| p.tau_f)
            .chain(self.coupling.edges().iter().chain(&self.loopbacks).map(|e| e.tau_c))
            .fold(0.0, f64::max);

        let stage_lag = |tau: f64| -> [ResolvedLag; 3] {
            [ResolvedLag::new(tau, h), ResolvedLag::new(tau - 0.5 * h, h), ResolvedLag::new(tau - h, h)]
        };

        let nodes: Vec<NodeWiring> = (0..n)
            .map(|i| {
                let mut inputs: Vec<Input> = self
                    .coupling
                    .edges()
                    .iter()
                    .chain(&self.loopbacks)
                    .filter(|e| e.dst == i)
                    .map(|e| Input { src: e.src, kappa: e.kappa_c, tau: e.tau_c, lags: stage_lag(e.tau_c) })
                    .collect();
                inputs.shrink_to_fit();
                let mut drive = self.drives[i].clone();
                if let Some(ext) = self.coupling.external() {
                    if ext.nodes.contains(&i) && !ext.signal.is_zero() {
                        drive = sum_drive(drive, ext.signal.clone());
                    }
                }
                NodeWiring {
                    f: MackeyGlassFn::new(&self.params[i]),
                    kappa_f: self.params[i].kappa_f,
                    inv_rc: 1.0 / self.params[i].rc,
                    self_lags: stage_lag(self.params[i].tau_f),
                    inputs,
                    drive: (!drive.is_zero()).then_some(drive),
                }
            })
            .collect();

        let mut hist: Vec<HistoryBuffer> = (0..n)
            .map(|i| {
                let v0 = match &self.replay[i] {
                    Some(s) => s.first().copied().unwrap_or(0.0),
                    None => init[i],
                };
                HistoryBuffer::constant(v0, h, max_delay)
            })
            .collect();
        let line: Vec<Option<&DriveSignal>> = self.line_offsets.iter().map(|d| (!d.is_zero()).then_some(d)).collect();

        let rec = self.record_every;
        let out_len = steps / rec + 1;
        let mut out: Vec<Vec<f64>> = (0..n).map(|_| Vec::with_capacity(out_len)).collect();
        let mut y: Vec<f64> = hist.iter().map(HistoryBuffer::newest).collect();
        for (o, &v) in out.iter_mut().zip(&y) {
            o.push(v);
        }

        let mut k = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut stage_state = vec![0.0; n];
        let integrated: Vec<bool> = self.replay.iter().map(Option::is_none).collect();

        // Replay nodes carry centered-difference slopes.
        for i in 0..n {
            if let Some(s) = &self.replay[i] {
                hist[i].set_newest_slope(replay_slope(s, 0, h));
            }
        }

        for step_index in 0..steps {
            let t = step_index as f64 * h;
            for (stage, (c, weight_state)) in [(0.0, 0.0), (0.5, 0.5), (0.5, 0.5), (1.0, 1.0)].into_iter().enumerate() {
                let lag_slot = match stage {
                    0 => 0,
                    1 | 2 => 1,
                    _ => 2,
                };
                let ts = t + c * h;
                for i in 0..n {
                    if !integrated[i] {
                        continue;
                    }
                    stage_state[i] = if stage == 0 { y[i] } else { y[i] + weight_state * h * k[stage - 1][i] };
                }
                for i in 0..n {
                    if !integrated[i] {
                        continue;
                    }
                    let w = &nodes[i];
                    let mut input = w.kappa_f * w.f.eval(hist[i].resolved(w.self_lags[lag_slot]));
                    for e in &w.inputs {
                        let mut src = hist[e.src].resolved(e.lags[lag_slot]);
                        if let Some(off) = line[e.src] {
                            src += off.value_at(ts - e.tau);
                        }
                        input += e.kappa * w.f.eval(src);
                    }
                    if let Some(d) = &w.drive {
                        input += d.value_at(ts);
                    }
                    k[stage][i] = (input - stage_state[i]) * w.inv_rc;
                }
                if stage == 0 {
                    for i in 0..n {
                        if integrated[i] {
                            if step_index == 0 {
                                hist[i].set_newest_right_slope(k[0][i]);
                            } else {
                                hist[i].set_newest_slope(k[0][i]);
                            }
                        }
                    }
                }
            }
            for i in 0..n {
                match &self.replay[i] {
                    None => {
                        y[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
                        hist[i].push(y[i], 0.0);
                    }
                    Some(s) => {
                        y[i] = replay_value(s, step_index + 1);
                        hist[i].push(y[i], replay_slope(s, step_index + 1, h));
                    }
                }
            }
            if (step_index + 1) % rec == 0 {
                for (o, &v) in out.iter_mut().zip(&y) {
                    o.push(v);
                }
            }
        }

        let rec_step = h * rec as f64;
        let len = out[0].len();
        let transient_end = ((self.transient / rec_step) - 1e-9).ceil().max(0.0) as usize;
        Ok(Trajectory::new(rec_step, transient_end.min(len), out))
    }
}

#[derive(Debug, Clone)]
struct Input {
    src: usize,
    kappa: f64,
    tau: f64,
    lags: [ResolvedLag; 3],
}

#[derive(Debug, Clone)]
struct NodeWiring {
    f: MackeyGlassFn,
    kappa_f: f64,
    inv_rc: f64,
    self_lags: [ResolvedLag; 3],
    inputs: Vec<Input>,
    drive: Option<DriveSignal>,
}

fn sum_drive(a: DriveSignal, b: DriveSignal) -> DriveSignal {
    if a.is_zero() {
        return b;
    }
    DriveSignal::Sum(Box::new(a), Box::new(b))
}

fn replay_value(s: &[f64], i: usize) -> f64 {
    s.get(i).or(s.last()).copied().unwrap_or(0.0)
}

fn replay_slope(s: &[f64], i: usize, h: f64) -> f64 {
    if s.len() < 2 || i >= s.len() {
        return 0.0;
    }
    if i == 0 {
        (s[1] - s[0]) / h
    } else if i + 1 == s.len() {
        (s[i] - s[i - 1]) / h
    } else {
        (s[i + 1] - s[i - 1]) / (2.0 * h)
    }
}

/// Integrates `params.len()` nodes wired by `coupling` for `duration`
/// seconds with seeded constant histories. The first
/// [`DEFAULT_TRANSIENT`] seconds are marked transient.
pub fn integrate(
    params: &[OscillatorParams],
    coupling: &CouplingSpec,
    drive: Option<&[DriveSignal]>,
    duration: f64,
    step: f64,
    seed: u64,
) -> Result<Trajectory, DynamicsError> {
    let mut sim = Simulation::new(params.to_vec(), coupling.clone()).duration(duration).step(step).seed(seed);
    if let Some(d) = drive {
        sim = sim.drives(d.to_vec());
    }
    sim.run()
}
