//! Closed-loop leaking-water-tank simulation.
//!
//! Plant model: `dh/dt = (c1*v - c2*sqrt(h)) / (rho * area)`, integrated with
//! explicit Euler and floored at an empty tank. The divisor is the
//! mass-balance normalization: the valve and leak coefficients are mass
//! flows (kg/s), so dividing by density times cross-section turns them into
//! a level rate. The tank area defaults to 1 m².
//!
//! The controller sees the error triple `e = h - s`, `ei = integral of e`
//! (rectangle rule including the current sample), `ed = backward difference`
//! (zero on the first step), and can be the unquantized PID law, its
//! quantized counterpart, or a compiled compression pipeline. Compression is
//! transparent to the loop: FC trajectories are bit-exact replicas of their
//! quantized references because the channels are noiseless.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pipeline::{quantized_pid_reference, CompiledPipeline, PipelineConfig};
use crate::target::{eval_pid, PidGains};

/// Calibrated default range of the proportional error `e`, frozen from the
/// reference run (see [`reference_ranges`]).
pub const DEFAULT_E_RANGE: (f64, f64) = (-11.3, 1.3);
/// Calibrated default range of the integral error `ei`.
pub const DEFAULT_EI_RANGE: (f64, f64) = (-12.4, 0.3);
/// Calibrated default range of the derivative error `ed`.
pub const DEFAULT_ED_RANGE: (f64, f64) = (-0.7, 5.7);

/// Physical and run parameters of the tank scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TankParams {
    /// Valve coefficient, kg/s per % open.
    pub c1: f64,
    /// Leak coefficient, kg/s.
    pub c2: f64,
    /// Water density, kg/m³.
    pub rho: f64,
    /// Tank cross-section, m².
    pub area: f64,
    /// Desired level, m.
    pub setpoint: f64,
    /// Euler step, s.
    pub dt: f64,
    /// Number of simulated steps.
    pub steps: usize,
    /// Initial level, m.
    pub h0: f64,
}

impl Default for TankParams {
    fn default() -> Self {
        Self {
            c1: 50.0,
            c2: 1.0,
            rho: 1000.0,
            area: 1.0,
            setpoint: 10.0,
            dt: 0.1,
            steps: 80,
            h0: 0.0,
        }
    }
}

/// One explicit-Euler step of the tank level.
pub fn step_tank(h: f64, valve: f64, p: &TankParams) -> f64 {
    let dh = (p.c1 * valve - p.c2 * h.sqrt()) / (p.rho * p.area);
    (h + p.dt * dh).max(0.0)
}

/// Mutable loop state carried across steps.
#[derive(Debug, Clone, Copy)]
pub struct LoopState {
    pub h: f64,
    pub integral: f64,
    pub prev_e: f64,
}

impl LoopState {
    /// Initial state: `prev_e` starts at the initial error so the first
    /// derivative sample is zero.
    pub fn new(h0: f64, setpoint: f64) -> Self {
        Self {
            h: h0,
            integral: 0.0,
            prev_e: h0 - setpoint,
        }
    }
}

/// Compute `(e, ei, ed)` for the current level and update the state.
pub fn compute_errors(state: &mut LoopState, setpoint: f64, dt: f64) -> (f64, f64, f64) {
    let e = state.h - setpoint;
    state.integral += e * dt;
    let ei = state.integral;
    let ed = (e - state.prev_e) / dt;
    state.prev_e = e;
    (e, ei, ed)
}

/// How the valve command is produced each step.
#[derive(Debug, Clone, Copy)]
pub enum ControlDriver<'a> {
    /// Unquantized PID law.
    Direct { gains: PidGains },
    /// PID law on quantized signals, no compression.
    DirectQuantized { config: &'a PipelineConfig },
    /// A compiled compression pipeline (simple or cascaded).
    Pipeline(&'a CompiledPipeline),
}

impl ControlDriver<'_> {
    fn actuate(&self, e: f64, ei: f64, ed: f64) -> (f64, u32) {
        match self {
            ControlDriver::Direct { gains } => (eval_pid(*gains, e, ei, ed), 0),
            ControlDriver::DirectQuantized { config } => {
                (quantized_pid_reference(config, e, ei, ed).valve, 0)
            }
            ControlDriver::Pipeline(p) => {
                let s = p.run_sample(e, ei, ed);
                (s.valve, s.bits_on_wire)
            }
        }
    }
}

/// One recorded step of a closed-loop run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub h: f64,
    pub e: f64,
    pub ei: f64,
    pub ed: f64,
    pub valve: f64,
    pub bits: u32,
}

/// Time series of a closed-loop run, `steps + 1` records including the
/// initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_level(&self) -> f64 {
        self.records.last().map(|r| r.h).unwrap_or(0.0)
    }

    /// Largest `|h - setpoint|` over the final `fraction` of the records.
    pub fn tail_deviation(&self, setpoint: f64, fraction: f64) -> f64 {
        let n = self.records.len();
        let start = ((n as f64) * (1.0 - fraction)).ceil() as usize;
        self.records[start.min(n)..]
            .iter()
            .map(|r| (r.h - setpoint).abs())
            .fold(0.0, f64::max)
    }

    /// Total bits transmitted over the run.
    pub fn total_bits(&self) -> u64 {
        self.records.iter().map(|r| r.bits as u64).sum()
    }

    /// CSV export with the `t,h,e,ei,ed,valve,bits` schema.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,h,e,ei,ed,valve,bits\n");
        for r in &self.records {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.t, r.h, r.e, r.ei, r.ed, r.valve, r.bits
            ));
        }
        s
    }
}

/// Run the closed loop: each step measures the level, forms the error
/// triple, asks the driver for a valve command, records, and advances the
/// tank. The trajectory has `steps + 1` records; the tank is advanced
/// `steps` times.
pub fn run_closed_loop(tank: &TankParams, driver: ControlDriver<'_>) -> Trajectory {
    let mut state = LoopState::new(tank.h0, tank.setpoint);
    let mut records = Vec::with_capacity(tank.steps + 1);
    for k in 0..=tank.steps {
        let (e, ei, ed) = compute_errors(&mut state, tank.setpoint, tank.dt);
        let (valve, bits) = driver.actuate(e, ei, ed);
        records.push(StepRecord {
            t: k as f64 * tank.dt,
            h: state.h,
            e,
            ei,
            ed,
            valve,
            bits,
        });
        if k < tank.steps {
            state.h = step_tank(state.h, valve, tank);
        }
    }
    Trajectory { records }
}

/// Per-signal ranges derived from a reference run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalRanges {
    pub e: (f64, f64),
    pub ei: (f64, f64),
    pub ed: (f64, f64),
}

fn widen_and_round(min: f64, max: f64) -> (f64, f64) {
    let width = max - min;
    let pad = if width > 0.0 { 0.125 * width } else { 0.5 };
    let lo = ((min - pad) * 10.0).floor() / 10.0;
    let hi = ((max + pad) * 10.0).ceil() / 10.0;
    if lo < hi {
        (lo, hi)
    } else {
        (lo - 0.1, hi + 0.1)
    }
}

/// Calibration rule for quantizer ranges: take the min/max of each error
/// signal over a trajectory, widen the interval by 25% (12.5% each side),
/// and round outward to one decimal.
pub fn calibrate_ranges(traj: &Trajectory) -> SignalRanges {
    let fold = |get: fn(&StepRecord) -> f64| {
        traj.records.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY),
            |(lo, hi), r| {
                let v = get(r);
                (lo.min(v), hi.max(v))
            },
        )
    };
    let (e_min, e_max) = fold(|r| r.e);
    let (ei_min, ei_max) = fold(|r| r.ei);
    let (ed_min, ed_max) = fold(|r| r.ed);
    SignalRanges {
        e: widen_and_round(e_min, e_max),
        ei: widen_and_round(ei_min, ei_max),
        ed: widen_and_round(ed_min, ed_max),
    }
}

/// Run the unquantized reference loop and calibrate the signal ranges from
/// it. The frozen `DEFAULT_*_RANGE` constants are this function's output for
/// the default tank and gains.
pub fn reference_ranges(tank: &TankParams, gains: PidGains) -> SignalRanges {
    let traj = run_closed_loop(tank, ControlDriver::Direct { gains });
    calibrate_ranges(&traj)
}

/// Convenience selector mirroring the CLI's controller choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    Direct,
    DirectQuantized,
    SimpleFc,
    CascadedFc,
}

impl ControllerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ControllerKind::Direct => "direct",
            ControllerKind::DirectQuantized => "direct_quantized",
            ControllerKind::SimpleFc => "simple_fc",
            ControllerKind::CascadedFc => "cascaded_fc",
        }
    }
}

/// Run the loop for a controller kind, compiling a pipeline when needed.
pub fn run_controller(
    tank: &TankParams,
    kind: ControllerKind,
    config: &PipelineConfig,
) -> Result<Trajectory> {
    use crate::pipeline::{compile_cascaded, compile_simple};
    Ok(match kind {
        ControllerKind::Direct => run_closed_loop(
            tank,
            ControlDriver::Direct {
                gains: config.gains,
            },
        ),
        ControllerKind::DirectQuantized => {
            run_closed_loop(tank, ControlDriver::DirectQuantized { config })
        }
        ControllerKind::SimpleFc => {
            let mut cfg = *config;
            cfg.topology = crate::pipeline::Topology::Simple;
            let p = compile_simple(&cfg)?;
            run_closed_loop(tank, ControlDriver::Pipeline(&p))
        }
        ControllerKind::CascadedFc => {
            let mut cfg = *config;
            cfg.topology = crate::pipeline::Topology::Cascaded;
            let p = compile_cascaded(&cfg)?;
            run_closed_loop(tank, ControlDriver::Pipeline(&p))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::Topology;

    #[test]
    fn tank_step_hand_values() {
        let p = TankParams {
            dt: 1.0,
            ..TankParams::default()
        };
        let h1 = step_tank(10.0, 0.0, &p);
        assert!((h1 - (10.0 - 10.0f64.sqrt() / 1000.0)).abs() < 1e-12);
        assert_eq!(step_tank(0.0, 0.0, &p), 0.0);
        assert_eq!(step_tank(0.0, 100.0, &p), 5.0);
    }

    #[test]
    fn error_definitions() {
        let mut state = LoopState::new(8.0, 10.0);
        let dt = 0.1;
        let (e, ei, ed) = compute_errors(&mut state, 10.0, dt);
        assert_eq!(e, -2.0);
        assert_eq!(ei, -0.2);
        assert_eq!(ed, 0.0); // first step

        // Constant error accumulates linearly; derivative stays zero.
        let mut state = LoopState::new(8.0, 10.0);
        for k in 1..=5 {
            let (e, ei, ed) = compute_errors(&mut state, 10.0, dt);
            assert_eq!(e, -2.0);
            assert!((ei - k as f64 * -2.0 * dt).abs() < 1e-12);
            assert_eq!(ed, 0.0);
        }
    }

    #[test]
    fn direct_loop_reaches_and_holds_setpoint() {
        let tank = TankParams::default();
        let traj = run_closed_loop(
            &tank,
            ControlDriver::Direct {
                gains: PidGains::default(),
            },
        );
        assert_eq!(traj.len(), 81);
        assert!(traj.tail_deviation(tank.setpoint, 0.25) <= 0.5);
        for r in &traj.records {
            assert!(r.h >= 0.0);
            assert!((0.0..=100.0).contains(&r.valve));
            assert_eq!(r.bits, 0);
        }
    }

    #[test]
    fn zero_gains_keep_empty_tank_empty() {
        let tank = TankParams::default();
        let traj = run_closed_loop(
            &tank,
            ControlDriver::Direct {
                gains: PidGains::new(0.0, 0.0, 0.0),
            },
        );
        assert!(traj.records.iter().all(|r| r.h == 0.0 && r.valve == 0.0));
    }

    #[test]
    fn halving_dt_barely_moves_the_final_level() {
        let tank = TankParams::default();
        let fine = TankParams {
            dt: tank.dt / 2.0,
            steps: tank.steps * 2,
            ..tank
        };
        let gains = PidGains::default();
        let a = run_closed_loop(&tank, ControlDriver::Direct { gains }).final_level();
        let b = run_closed_loop(&fine, ControlDriver::Direct { gains }).final_level();
        assert!((a - b).abs() / a.abs() < 0.01, "{a} vs {b}");
    }

    #[test]
    fn frozen_ranges_match_calibration_procedure() {
        let derived = reference_ranges(&TankParams::default(), PidGains::default());
        let close = |a: (f64, f64), b: (f64, f64)| {
            (a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9
        };
        assert!(close(derived.e, DEFAULT_E_RANGE), "e: {:?}", derived.e);
        assert!(close(derived.ei, DEFAULT_EI_RANGE), "ei: {:?}", derived.ei);
        assert!(close(derived.ed, DEFAULT_ED_RANGE), "ed: {:?}", derived.ed);
    }

    #[test]
    fn fc_trajectory_is_bit_exact_vs_quantized_reference() {
        let tank = TankParams::default();
        let config = PipelineConfig::default_for_bits(Topology::Simple, 5).unwrap();
        let quantized = run_controller(&tank, ControllerKind::DirectQuantized, &config).unwrap();
        let fc = run_controller(&tank, ControllerKind::SimpleFc, &config).unwrap();
        assert_eq!(quantized.len(), fc.len());
        // Identical except the bits column (0 for the uncompressed mode).
        for (a, b) in quantized.records.iter().zip(&fc.records) {
            assert_eq!(a.h, b.h);
            assert_eq!(a.e, b.e);
            assert_eq!(a.ei, b.ei);
            assert_eq!(a.ed, b.ed);
            assert_eq!(a.valve, b.valve);
        }
        assert!(fc.records.iter().all(|r| r.bits > 0));
    }

    #[test]
    fn cascaded_fc_matches_a_two_stage_reference_loop() {
        use crate::pipeline::{compile_cascaded, two_stage_pid_reference};
        let tank = TankParams::default();
        let config = PipelineConfig::default_for_bits(Topology::Cascaded, 5).unwrap();
        let fc = run_controller(&tank, ControllerKind::CascadedFc, &config).unwrap();

        // Replay the loop with the two-stage quantized arithmetic in place
        // of the coded pipeline; the trajectories must agree exactly.
        let m_q = *compile_cascaded(&config).unwrap().intermediate_quantizer().unwrap();
        let mut state = LoopState::new(tank.h0, tank.setpoint);
        for (k, rec) in fc.records.iter().enumerate() {
            let (e, ei, ed) = compute_errors(&mut state, tank.setpoint, tank.dt);
            let valve = two_stage_pid_reference(&config, &m_q, e, ei, ed).valve;
            assert_eq!(rec.h, state.h, "step {k}");
            assert_eq!(rec.valve, valve, "step {k}");
            if k < tank.steps {
                state.h = step_tank(state.h, valve, &tank);
            }
        }
    }

    #[test]
    fn csv_has_header_and_all_rows() {
        let tank = TankParams {
            steps: 3,
            ..TankParams::default()
        };
        let traj = run_closed_loop(
            &tank,
            ControlDriver::Direct {
                gains: PidGains::default(),
            },
        );
        let csv = traj.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,h,e,ei,ed,valve,bits");
        assert_eq!(lines.len(), 5);
    }
}
