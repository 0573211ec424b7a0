//! Time-domain oracle: integrates the coherent cavity amplitude with RK4 and
//! reads the outputs off the input–output relation.
//!
//! This path shares nothing with [`crate::scattering`] or
//! [`crate::wavepacket`] beyond [`RouterParams`]: pulses are the analytic
//! Fourier transforms of the Gaussian spectra, and mean numbers are time
//! integrals of `|o_in(t) - i sqrt(gamma_j) c(t)|^2`.
//!
//! Internally everything runs in a frame rotating at the first packet's
//! center frequency, so the step only has to resolve the decay rates and the
//! pulse envelope.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, RouterError};
use crate::quadrature::{integrate_uniform, Rule};
use crate::router::{Channel, OutputReport, PerChannel, RouterParams, WavePacket};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pulse envelopes must extend this many `1/Omega` on each side of the peak.
pub const PULSE_COVERAGE: f64 = 12.0;
/// Largest step allowed, as a fraction of `1 / (gamma1 + gamma2 + gamma_c)`.
pub const MAX_STEP_FRACTION: f64 = 0.01;
pub const MIN_STEPS: usize = 1000;
/// Cavity amplitude left at the end of the window, relative to its peak.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Uniform time grid. The step actually used is `span / steps` with `steps`
/// the smallest even count not coarser than the requested `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, dt: f64) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite() && dt.is_finite()) || t_end <= t_start || dt <= 0.0 {
            return Err(RouterError::GridTooCoarse(format!(
                "need finite t_start < t_end and dt > 0, got [{t_start}, {t_end}] with dt = {dt}"
            )));
        }
        Ok(TimeGrid { t_start, t_end, dt })
    }

    /// A grid centered on `t_peak` that holds every packet and lets the
    /// cavity ring down afterwards.
    pub fn for_packets(params: &RouterParams, packets: &[WavePacket], t_peak: f64) -> Result<Self> {
        let decay = params.total_decay();
        let narrowest = packets.iter().map(|p| p.bandwidth).fold(f64::INFINITY, f64::min);
        let widest = packets.iter().map(|p| p.bandwidth).fold(0.0, f64::max);
        let coverage = if narrowest.is_finite() {
            PULSE_COVERAGE / narrowest
        } else {
            1.0 / decay
        };
        // ring-down to below RESIDUAL_TOLERANCE: ln(1e8) < 20
        let settle = 20.0 / decay;
        let dt = MAX_STEP_FRACTION / decay.max(widest);
        let span = 2.0 * coverage + settle;
        let dt = dt.min(span / (2 * MIN_STEPS) as f64);
        TimeGrid::new(t_peak - coverage, t_peak + coverage + settle, dt)
    }

    /// Number of steps (even).
    pub fn steps(&self) -> usize {
        let n = ((self.t_end - self.t_start) / self.dt * (1.0 - 1e-12)).ceil() as usize;
        let n = n.max(2);
        n + n % 2
    }

    /// Step actually taken.
    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / self.steps() as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.step()
    }

    /// Halve the step over the same window.
    pub fn refined(&self) -> Self {
        TimeGrid {
            dt: self.step() / 2.0,
            ..*self
        }
    }
}

/// Packets injected simultaneously, all peaking at `t_peak`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrain {
    pub packets: Vec<WavePacket>,
    pub t_peak: f64,
}

impl PulseTrain {
    pub fn new(packets: Vec<WavePacket>, t_peak: f64) -> Self {
        PulseTrain { packets, t_peak }
    }

    pub fn mean_n(&self) -> f64 {
        self.packets.iter().map(|p| p.mean_n).sum()
    }

    fn frame_frequency(&self, params: &RouterParams) -> f64 {
        self.packets.first().map_or(params.omega_c, |p| p.omega0)
    }

    /// Input amplitude of `packet` in a frame rotating at `frame`.
    fn pulse_in_frame(&self, packet: &WavePacket, t: f64, frame: f64) -> Complex64 {
        let tau = t - self.t_peak;
        envelope(packet, tau) * Complex64::from_polar(1.0, packet.phase - (packet.omega0 - frame) * tau)
    }
}

fn envelope(packet: &WavePacket, tau: f64) -> f64 {
    let w = packet.bandwidth;
    packet.mean_n.sqrt() * (2.0 * w * w / PI).powf(0.25) * (-w * w * tau * tau).exp()
}

/// Input field expectation `<o_in(t)>` of a Gaussian packet peaking at `t_peak`.
pub fn time_pulse(packet: &WavePacket, t: f64, t_peak: f64) -> Complex64 {
    let tau = t - t_peak;
    envelope(packet, tau) * Complex64::from_polar(1.0, packet.phase - packet.omega0 * tau)
}

/// Classical fourth-order Runge–Kutta for a complex scalar ODE `y' = f(t, y)`.
///
/// Returns `steps + 1` samples including the initial value.
pub fn rk4<F>(f: F, y0: Complex64, t0: f64, h: f64, steps: usize) -> Vec<Complex64>
where
    F: Fn(f64, Complex64) -> Complex64,
{
    let mut ys = Vec::with_capacity(steps + 1);
    let mut y = y0;
    ys.push(y);
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let k1 = f(t, y);
        let k2 = f(t + 0.5 * h, y + k1 * (0.5 * h));
        let k3 = f(t + 0.5 * h, y + k2 * (0.5 * h));
        let k4 = f(t + h, y + k3 * h);
        y += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
        ys.push(y);
    }
    ys
}

/// Cavity amplitude sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct CavityTrajectory {
    pub grid: TimeGrid,
    /// Rotation frequency of the stored samples.
    pub frame: f64,
    t_peak: f64,
    samples: Vec<Complex64>,
}

impl CavityTrajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Lab-frame `(t, c(t))` pairs.
    pub fn lab_frame(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.samples.iter().enumerate().map(move |(k, &c)| {
            let t = self.grid.time(k);
            (t, c * Complex64::from_polar(1.0, -self.frame * (t - self.t_peak)))
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

fn check_grid(params: &RouterParams, pulses: &PulseTrain, grid: &TimeGrid) -> Result<()> {
    let steps = grid.steps();
    if steps < MIN_STEPS {
        return Err(RouterError::GridTooCoarse(format!(
            "{steps} steps, need at least {MIN_STEPS}"
        )));
    }
    let limit = MAX_STEP_FRACTION / params.total_decay();
    if grid.step() > limit * (1.0 + 1e-9) {
        return Err(RouterError::GridTooCoarse(format!(
            "step {} exceeds {limit} = {MAX_STEP_FRACTION}/(gamma1 + gamma2 + gamma_c)",
            grid.step()
        )));
    }
    for p in &pulses.packets {
        let need = PULSE_COVERAGE / p.bandwidth * (1.0 - 1e-9);
        if pulses.t_peak - grid.t_start < need || grid.t_end - pulses.t_peak < need {
            return Err(RouterError::PulseNotContained(format!(
                "packet on {} needs {need} on both sides of t = {}, window is [{}, {}]",
                p.channel, pulses.t_peak, grid.t_start, grid.t_end
            )));
        }
    }
    Ok(())
}

/// Integrate the cavity amplitude from vacuum at `grid.t_start`.
pub fn integrate_cavity(params: &RouterParams, pulses: &PulseTrain, grid: &TimeGrid) -> Result<CavityTrajectory> {
    params.validate()?;
    for p in &pulses.packets {
        p.validate()?;
    }
    check_grid(params, pulses, grid)?;

    let frame = pulses.frame_frequency(params);
    let rate = Complex64::new(-params.total_decay(), -(params.omega_c - frame));
    let couplings: Vec<(f64, &WavePacket)> = pulses.packets.iter().map(|p| (params.coupling(p.channel), p)).collect();
    let rhs = |t: f64, c: Complex64| {
        let drive: Complex64 = couplings
            .iter()
            .map(|&(g, p)| g * pulses.pulse_in_frame(p, t, frame))
            .sum();
        rate * c - I * drive
    };
    let samples = rk4(rhs, Complex64::new(0.0, 0.0), grid.t_start, grid.step(), grid.steps());

    let traj = CavityTrajectory {
        grid: *grid,
        frame,
        t_peak: pulses.t_peak,
        samples,
    };
    let peak = traj.max_abs();
    let residual = traj.samples.last().map_or(0.0, |c| c.norm());
    if residual > RESIDUAL_TOLERANCE * peak {
        return Err(RouterError::PulseNotContained(format!(
            "cavity amplitude {residual:e} at window end exceeds {RESIDUAL_TOLERANCE:e} of its peak {peak:e}"
        )));
    }
    Ok(traj)
}

/// Mean output numbers `int |o_in(t) - i sqrt(gamma_j) c(t)|^2 dt` per channel.
pub fn output_flux(params: &RouterParams, pulses: &PulseTrain, trajectory: &CavityTrajectory) -> Result<OutputReport> {
    params.validate()?;
    check_grid(params, pulses, &trajectory.grid)?;
    let grid = &trajectory.grid;
    let frame = trajectory.frame;
    let mut integrands: PerChannel<Vec<f64>> = PerChannel::from_fn(|_| Vec::with_capacity(trajectory.len()));
    for (k, &c) in trajectory.samples.iter().enumerate() {
        let t = grid.time(k);
        let mut inputs = PerChannel::from_fn(|_| Complex64::new(0.0, 0.0));
        for p in &pulses.packets {
            inputs[p.channel] += pulses.pulse_in_frame(p, t, frame);
        }
        for ch in Channel::ALL {
            let out = inputs[ch] - I * params.coupling(ch) * c;
            integrands[ch].push(out.norm_sqr());
        }
    }
    let h = grid.step();
    let n_out = integrands.map(|v| integrate_uniform(v, h, Rule::Simpson));
    Ok(OutputReport::new(n_out, pulses.mean_n()))
}

/// Integrate and read out in one go, on a grid sized for the packets.
pub fn simulate(params: &RouterParams, pulses: &PulseTrain) -> Result<OutputReport> {
    let grid = TimeGrid::for_packets(params, &pulses.packets, pulses.t_peak)?;
    let traj = integrate_cavity(params, pulses, &grid)?;
    output_flux(params, pulses, &traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{cavity_amplitude, single_input_amplitudes};
    use crate::wavepacket::two_input_packets;

    fn packet(mean_n: f64, bandwidth: f64) -> WavePacket {
        WavePacket::new(Channel::R1, mean_n, 0.4, bandwidth, 0.0)
    }

    #[test]
    fn pulse_normalization() {
        let p = packet(1.0, 0.3);
        let half = PULSE_COVERAGE / 0.3;
        let n = 20_000;
        let h = 2.0 * half / n as f64;
        let v: Vec<f64> = (0..=n)
            .map(|k| time_pulse(&p, -half + k as f64 * h, 0.0).norm_sqr())
            .collect();
        assert!((integrate_uniform(&v, h, Rule::Simpson) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pulse_envelope_ratio_and_carrier() {
        let p = packet(1.0, 0.25);
        let peak = time_pulse(&p, 3.0, 3.0).norm();
        for t in [3.0 + 4.0, 3.0 - 4.0] {
            let r = time_pulse(&p, t, 3.0).norm() / peak;
            assert!((r - (-1.0f64).exp()).abs() < 1e-14);
        }
        // carrier e^{-i w0 (t - t_peak)}
        let z = time_pulse(&p, 3.5, 3.0);
        assert!((z.arg() + 0.4 * 0.5).abs() < 1e-14);
        assert_eq!(time_pulse(&packet(0.0, 0.3), 3.0, 3.0).norm(), 0.0);
    }

    #[test]
    fn grid_rounds_to_even_steps() {
        let g = TimeGrid::new(0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.steps(), 4);
        assert!((g.step() - 0.25).abs() < 1e-15);
        assert!(TimeGrid::new(1.0, 0.0, 0.1).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn coarse_grid_rejected() {
        let p = RouterParams::symmetric();
        let pulses = PulseTrain::new(vec![packet(1.0, 0.3)], 0.0);
        let g = TimeGrid::new(-50.0, 50.0, 0.01).unwrap();
        assert!(matches!(
            integrate_cavity(&p, &pulses, &g),
            Err(RouterError::GridTooCoarse(_))
        ));
        let g = TimeGrid::new(-0.5, 0.5, 1e-4).unwrap();
        assert!(matches!(
            integrate_cavity(
                &p,
                &PulseTrain::new(vec![], 0.0),
                &TimeGrid::new(0.0, 1.0, 0.004).unwrap()
            ),
            Err(RouterError::GridTooCoarse(_))
        ));
        assert!(matches!(
            integrate_cavity(&p, &pulses, &g),
            Err(RouterError::PulseNotContained(_))
        ));
    }

    #[test]
    fn undriven_cavity_stays_empty() {
        let p = RouterParams::symmetric();
        let pulses = PulseTrain::new(vec![], 0.0);
        let g = TimeGrid::new(0.0, 10.0, 0.004).unwrap();
        let traj = integrate_cavity(&p, &pulses, &g).unwrap();
        assert!(traj.lab_frame().all(|(_, c)| c.norm() == 0.0));
        let r = output_flux(&p, &pulses, &traj).unwrap();
        assert_eq!(r.n_total, 0.0);
    }

    #[test]
    fn antiphase_drives_leave_cavity_empty() {
        let p = RouterParams::new(1.0, 1.0, 0.1, 0.0);
        let pulses = PulseTrain::new(two_input_packets(&p, 1.0, 0.0, 0.3, PI), 0.0);
        let grid = TimeGrid::for_packets(&p, &pulses.packets, 0.0).unwrap();
        let traj = integrate_cavity(&p, &pulses, &grid).unwrap();
        assert!(traj.max_abs() < 1e-12);
    }

    #[test]
    fn narrow_band_plateau_matches_steady_state() {
        let p = RouterParams::new(1.0, 0.6, 0.0, 0.0);
        let delta = 0.5;
        let pk = WavePacket::new(Channel::R1, 1.0, p.omega_c - delta, 0.003, 0.0);
        let pulses = PulseTrain::new(vec![pk], 0.0);
        let grid = TimeGrid::for_packets(&p, &pulses.packets, 0.0).unwrap();
        let traj = integrate_cavity(&p, &pulses, &grid).unwrap();
        let (k_peak, _) = (0..=grid.steps())
            .map(|k| (k, (grid.time(k)).abs()))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let c_peak = traj.lab_frame().nth(k_peak).unwrap().1;
        // steady state for the instantaneous drive amplitude at the pulse peak
        let amp = time_pulse(&pk, 0.0, 0.0).norm_sqr();
        let expected = cavity_amplitude(&p, &single_input_amplitudes(amp), delta).norm_sqr();
        let ratio = c_peak.norm_sqr() / expected;
        assert!((ratio - 1.0).abs() < 1e-4, "{ratio}");
    }

    #[test]
    fn rk4_is_fourth_order() {
        // y' = (-1 + 2i) y + exp(-t^2), compared against a fine reference
        let f = |t: f64, y: Complex64| Complex64::new(-1.0, 2.0) * y + (-(t - 1.0) * (t - 1.0)).exp();
        let steps = 40;
        let h = 4.0 / steps as f64;
        let coarse = rk4(f, Complex64::new(0.0, 0.0), 0.0, h, steps);
        let half = rk4(f, Complex64::new(0.0, 0.0), 0.0, h / 2.0, 2 * steps);
        let fine = rk4(f, Complex64::new(0.0, 0.0), 0.0, h / 32.0, 32 * steps);
        let e1 = (coarse[steps] - fine[32 * steps]).norm();
        let e2 = (half[2 * steps] - fine[32 * steps]).norm();
        let order = (e1 / e2).log2();
        assert!(order > 3.8 && order < 4.2, "order {order}");
    }

    #[test]
    fn linear_in_intensity() {
        let p = RouterParams::new(1.0, 0.6, 0.1, 0.0);
        let base = two_input_packets(&p, 1.0, 0.5, 0.3, 1.1);
        let scaled = two_input_packets(&p, 4.0, 0.5, 0.3, 1.1);
        let a = simulate(&p, &PulseTrain::new(base, 2.0)).unwrap();
        let b = simulate(&p, &PulseTrain::new(scaled, 2.0)).unwrap();
        for ch in Channel::ALL {
            assert!((b.n_out[ch] - 4.0 * a.n_out[ch]).abs() <= 1e-12 * b.n_out[ch].abs());
        }
    }
}
