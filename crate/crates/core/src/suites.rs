//! Invariant suites run by `route verify`.
//!
//! Each suite compares independent routes to the same quantity (closed form
//! against general scattering, frequency domain against the time-domain
//! oracle) or checks a conservation law, and reports the largest deviation
//! seen for every check. Random draws use a fixed-seed ChaCha stream so a
//! run is reproducible.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::{self, PulseTrain, TimeGrid};
use crate::quadrature::Rule;
use crate::router::{
    channel_of_input_port, port_of_output_channel, relative_deviation, Channel, ChannelAmplitudes, OutputReport,
    RouterParams,
};
use crate::scattering::{
    mean_output_single, mean_output_three, mean_output_two, scatter_report, single_input_amplitudes,
    three_input_amplitudes, two_input_amplitudes, two_port_reduction,
};
use crate::wavepacket::{packet_output_numbers, packet_output_numbers_fixed, two_input_packets, QuadratureSpec};
use crate::Result;

pub const DEFAULT_SEED: u64 = 0x5eed_2015;
pub const RANDOM_DRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// `value <= bound`
    AtMost,
    /// `value >= bound`
    AtLeast,
    /// `value < bound`
    Below,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub comparison: Comparison,
}

impl CheckOutcome {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            value,
            bound,
            comparison: Comparison::AtMost,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            value,
            bound,
            comparison: Comparison::AtLeast,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            value,
            bound,
            comparison: Comparison::Below,
        }
    }

    pub fn passed(&self) -> bool {
        match self.comparison {
            Comparison::AtMost => self.value <= self.bound,
            Comparison::AtLeast => self.value >= self.bound,
            Comparison::Below => self.value < self.bound,
        }
    }

    fn failed(name: impl Into<String>, err: crate::RouterError) -> Self {
        CheckOutcome::at_most(format!("{} ({err})", name.into()), f64::INFINITY, 0.0)
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::Below => "<",
        };
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status}  {}: {:.3e} {op} {:.3e}", self.name, self.value, self.bound)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    /// Largest value among the deviation-type (`AtMost`) checks.
    pub fn max_deviation(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.comparison == Comparison::AtMost)
            .map(|c| c.value)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Core,
    Scattering,
    Wavepacket,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Core, Suite::Scattering, Suite::Wavepacket, Suite::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Scattering => "scattering",
            Suite::Wavepacket => "wavepacket",
            Suite::Oracle => "oracle",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn run(self, seed: u64) -> SuiteReport {
        let checks = match self {
            Suite::Core => core_checks(),
            Suite::Scattering => scattering_checks(seed),
            Suite::Wavepacket => wavepacket_checks(),
            Suite::Oracle => oracle_checks(),
        };
        SuiteReport { suite: self, checks }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A random lossless scenario: `gamma2/gamma1` in `[0, 5]`, `delta` in
/// `[-10, 10]`, phases in `[0, 2 pi)`, `|alpha|^2` in `(0, 3]`.
#[derive(Debug, Clone, Copy)]
pub struct RandomScenario {
    pub params: RouterParams,
    pub delta: f64,
    pub mean_n: f64,
    pub phases: [f64; 2],
}

impl RandomScenario {
    pub fn draw(rng: &mut impl Rng) -> Self {
        let gamma1 = rng.gen_range(0.2..5.0);
        let gamma2 = gamma1 * rng.gen_range(0.0..=5.0);
        RandomScenario {
            params: RouterParams::new(gamma1, gamma2, 0.0, rng.gen_range(-3.0..3.0)),
            delta: gamma1 * rng.gen_range(-10.0..=10.0),
            mean_n: rng.gen_range(1e-3..=3.0),
            phases: [rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)],
        }
    }
}

/// Arbitrary complex amplitudes on all four channels.
pub fn random_amplitudes(rng: &mut impl Rng) -> ChannelAmplitudes {
    ChannelAmplitudes::from_fn(|_| Complex64::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(0.0..TAU)))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn max_dev(a: &OutputReport, b: &OutputReport) -> f64 {
    a.max_relative_deviation(b).1
}

fn total_dev(r: &OutputReport) -> f64 {
    relative_deviation(r.n_total, r.n_in, r.n_in)
}

fn core_checks() -> Vec<CheckOutcome> {
    let table_ok = [
        (Channel::R1, 1, 2),
        (Channel::L1, 2, 1),
        (Channel::R2, 3, 4),
        (Channel::L2, 4, 3),
    ]
    .iter()
    .all(|&(ch, input, output)| channel_of_input_port(input) == Ok(ch) && port_of_output_channel(ch) == output);
    let validation_ok = RouterParams::new(1.0, 1.0, 0.0, 0.0).validate().is_ok()
        && RouterParams::new(1.0, -0.1, 0.0, 0.0).validate().is_err()
        && RouterParams::new(0.0, 1.0, 0.0, 0.0).validate().is_err()
        && RouterParams::new(1.0, 1.0, f64::NAN, 0.0).validate().is_err();
    vec![
        CheckOutcome::at_most("port/channel table mismatches", f64::from(u8::from(!table_ok)), 0.0),
        CheckOutcome::at_most(
            "parameter validation mismatches",
            f64::from(u8::from(!validation_ok)),
            0.0,
        ),
    ]
}

fn scattering_checks(seed: u64) -> Vec<CheckOutcome> {
    let mut rng = seeded_rng(seed);
    let mut conservation: f64 = 0.0;
    let mut eq_single: f64 = 0.0;
    let mut eq_two: f64 = 0.0;
    let mut eq_three: f64 = 0.0;
    let mut eq_reduction: f64 = 0.0;
    let mut periodicity: f64 = 0.0;
    let mut symmetry: f64 = 0.0;
    let mut null: f64 = 0.0;
    let mut scaling: f64 = 0.0;
    let mut phase_free: f64 = 0.0;

    for _ in 0..RANDOM_DRAWS {
        let s = RandomScenario::draw(&mut rng);
        let (p, d, n) = (s.params, s.delta, s.mean_n);
        let [a, b] = s.phases;
        let (Ok(one), Ok(two), Ok(three)) = (
            mean_output_single(&p, n, d),
            mean_output_two(&p, n, d, a),
            mean_output_three(&p, n, d, a, b),
        ) else {
            return vec![CheckOutcome::at_most("closed forms accept lossless draws", 1.0, 0.0)];
        };
        let four = scatter_report(&p, &random_amplitudes(&mut rng), d);
        for r in [&one, &two, &three, &four] {
            conservation = conservation.max(total_dev(r));
        }

        eq_single = eq_single.max(max_dev(&one, &scatter_report(&p, &single_input_amplitudes(n), d)));
        eq_two = eq_two.max(max_dev(&two, &scatter_report(&p, &two_input_amplitudes(n, a), d)));
        eq_three = eq_three.max(max_dev(
            &three,
            &scatter_report(&p, &three_input_amplitudes(n, a, b), d),
        ));

        let decoupled = RouterParams::new(p.gamma1, 0.0, 0.0, p.omega_c);
        if let (Ok((r1, l1)), Ok(full)) = (
            two_port_reduction(p.gamma1, n, d, a),
            mean_output_two(&decoupled, n, d, a),
        ) {
            eq_reduction = eq_reduction.max((r1 - full.n_r1()).abs()).max((l1 - full.n_l1()).abs());
        }

        if let (Ok(two_shift), Ok(three_shift)) = (
            mean_output_two(&p, n, d, a + TAU),
            mean_output_three(&p, n, d, a + TAU, b - TAU),
        ) {
            for (shifted, base) in [(&two_shift, &two), (&three_shift, &three)] {
                for ch in Channel::ALL {
                    periodicity = periodicity.max((shifted.n_out[ch] - base.n_out[ch]).abs() / base.n_in);
                }
            }
        }

        symmetry = symmetry
            .max((one.n_r2() - one.n_l2()).abs())
            .max((two.n_r2() - two.n_l2()).abs());

        if let Ok(r) = mean_output_two(&p, n, d, PI) {
            null = null.max(r.n_r2().abs()).max(r.n_l2().abs());
        }

        if let Ok(r) = mean_output_three(&p, 2.5 * n, d, a, b) {
            let scaled = OutputReport::new(three.n_out.map(|x| 2.5 * x), 2.5 * three.n_in);
            scaling = scaling.max(max_dev(&r, &scaled));
        }

        let mut rotated = single_input_amplitudes(n);
        rotated[Channel::R1] *= Complex64::from_polar(1.0, b);
        phase_free = phase_free.max(max_dev(&scatter_report(&p, &rotated, d), &one));
    }

    // ports 1 and 3 with gamma1 = gamma2 reproduce the ports 1 and 2 result
    let mut cross_waveguide: f64 = 0.0;
    for &(delta, phi) in &[(0.0, 0.0), (0.0, PI), (0.7, 1.3), (-2.0, 4.4)] {
        let p = RouterParams::symmetric();
        let mut amps = ChannelAmplitudes::zeros();
        amps[Channel::R1] = Complex64::new(1.0, 0.0);
        amps[Channel::R2] = Complex64::from_polar(1.0, phi);
        let r = scatter_report(&p, &amps, delta);
        if let Ok(two) = mean_output_two(&p, 1.0, delta, phi) {
            // the roles of (wg1, left) and (wg2, right) swap
            let pairs = [
                (Channel::R1, Channel::R1),
                (Channel::L1, Channel::R2),
                (Channel::R2, Channel::L1),
                (Channel::L2, Channel::L2),
            ];
            for (a, b) in pairs {
                cross_waveguide = cross_waveguide.max((two.n_out[a] - r.n_out[b]).abs());
            }
        }
    }

    vec![
        CheckOutcome::at_most("flux conservation (1000 lossless draws, rel)", conservation, 1e-12),
        CheckOutcome::at_most("single input closed form vs scatter (rel)", eq_single, 1e-10),
        CheckOutcome::at_most("two inputs closed form vs scatter (rel)", eq_two, 1e-10),
        CheckOutcome::at_most("three inputs closed form vs scatter (rel)", eq_three, 1e-10),
        CheckOutcome::at_most("two-port reduction vs gamma2 = 0 (abs)", eq_reduction, 1e-12),
        CheckOutcome::at_most("2 pi phase periodicity (abs / N_in)", periodicity, 1e-12),
        CheckOutcome::at_most("N_r2 = N_l2 for one and two inputs (abs)", symmetry, 0.0),
        CheckOutcome::at_most("phi = pi empties waveguide 2 (abs)", null, 0.0),
        CheckOutcome::at_most("linear in mean photon number (rel)", scaling, 1e-12),
        CheckOutcome::at_most("single input independent of global phase (rel)", phase_free, 1e-12),
        CheckOutcome::at_most(
            "ports 1&3 equal ports 1&2 at gamma1 = gamma2 (abs)",
            cross_waveguide,
            1e-12,
        ),
    ]
}

fn lossy_broadband_params() -> RouterParams {
    RouterParams::new(1.0, 1.0, 0.1, 0.0)
}

fn wavepacket_checks() -> Vec<CheckOutcome> {
    let quad = QuadratureSpec::default();
    let mut checks = Vec::new();
    let run = |p: &RouterParams, detuning: f64, bandwidth: f64, phi: f64| -> Result<OutputReport> {
        packet_output_numbers(p, &two_input_packets(p, 1.0, detuning, bandwidth, phi), &quad)
    };

    // lossless conservation over a few packet sets
    let mut conservation: Result<f64> = Ok(0.0);
    for &(g2, detuning, bandwidth, phi) in &[
        (1.0, 0.0, 0.3, 0.0),
        (0.6, 0.5, 0.3, 2.0),
        (0.0, 1.0, 0.1, 4.0),
        (3.0, -2.0, 1.0, 1.0),
    ] {
        let p = RouterParams::new(1.0, g2, 0.0, 0.0);
        conservation = conservation.and_then(|m| Ok(m.max(total_dev(&run(&p, detuning, bandwidth, phi)?))));
    }
    checks.push(match conservation {
        Ok(v) => CheckOutcome::at_most("lossless packet conservation (rel)", v, 1e-6),
        Err(e) => CheckOutcome::failed("lossless packet conservation", e),
    });

    // lossy broadband anchors
    match (
        run(&lossy_broadband_params(), 0.0, 0.3, PI),
        run(&lossy_broadband_params(), 0.0, 0.3, 0.0),
    ) {
        (Ok(destructive), Ok(constructive)) => {
            checks.push(CheckOutcome::at_most(
                "N_out(phi = pi) = 2|alpha|^2 with loss (abs)",
                (destructive.n_total - 2.0).abs(),
                1e-6,
            ));
            checks.push(CheckOutcome::at_least(
                "loss at phi = 0 (|alpha|^2 units)",
                2.0 - constructive.n_total,
                0.05,
            ));
        }
        (Err(e), _) | (_, Err(e)) => checks.push(CheckOutcome::failed("lossy broadband anchors", e)),
    }

    // loss bounded and monotone on gamma_c in [0, 0.9]
    let mut totals = Vec::new();
    let mut bound_violation: f64 = 0.0;
    for k in 0..10 {
        let p = RouterParams::new(1.0, 1.0, 0.1 * k as f64, 0.0);
        match run(&p, 0.5, 0.3, 0.4) {
            Ok(r) => {
                bound_violation = bound_violation.max(-r.n_total).max(r.n_total - r.n_in - 1e-9);
                totals.push(r.n_total);
            }
            Err(e) => {
                checks.push(CheckOutcome::failed("gamma_c monotonicity", e));
                break;
            }
        }
    }
    if totals.len() == 10 {
        let increase = totals.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        checks.push(CheckOutcome::at_most(
            "0 <= N_out <= N_in violation",
            bound_violation,
            0.0,
        ));
        checks.push(CheckOutcome::at_most(
            "N_out increase along gamma_c grid",
            increase,
            0.0,
        ));
    }

    // narrow-band convergence toward the closed form
    let p = RouterParams::new(1.0, 0.6, 0.0, 0.0);
    let mono = mean_output_two(&p, 1.0, 0.5, 1.0);
    let mut errors = Vec::new();
    for bandwidth in [0.3, 0.1, 0.03, 0.01] {
        match run(&p, 0.5, bandwidth, 1.0).and_then(|r| Ok(max_dev(&r, mono.as_ref().map_err(Clone::clone)?))) {
            Ok(e) => errors.push(e),
            Err(e) => {
                checks.push(CheckOutcome::failed("narrow-band convergence", e));
                break;
            }
        }
    }
    if errors.len() == 4 {
        let worst_ratio = errors.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        checks.push(CheckOutcome::below(
            "narrow-band error ratio per step",
            worst_ratio,
            1.0,
        ));
    }

    // Simpson vs trapezoid, and step halving
    let packets = two_input_packets(&lossy_broadband_params(), 1.0, 0.5, 0.3, 1.0);
    let trapezoid = QuadratureSpec {
        rule: Rule::Trapezoid,
        ..quad
    };
    match (
        packet_output_numbers_fixed(&lossy_broadband_params(), &packets, &quad),
        packet_output_numbers_fixed(&lossy_broadband_params(), &packets, &trapezoid),
        packet_output_numbers_fixed(&lossy_broadband_params(), &packets, &quad.refined()),
    ) {
        (Ok(s), Ok(t), Ok(h)) => {
            checks.push(CheckOutcome::at_most(
                "Simpson vs trapezoid (rel)",
                max_dev(&t, &s),
                1e-6,
            ));
            checks.push(CheckOutcome::at_most(
                "step halving change (rel)",
                max_dev(&s, &h),
                1e-6,
            ));
        }
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => checks.push(CheckOutcome::failed("quadrature rules", e)),
    }

    // bandwidth lowers the N_r2 ceiling but not N_r1 at phi = pi
    let mut peak_r2: f64 = 0.0;
    let mut r1_at_pi = f64::NAN;
    for k in 0..=64 {
        let phi = TAU * k as f64 / 64.0;
        match run(&lossy_broadband_params(), 0.0, 0.3, phi) {
            Ok(r) => {
                peak_r2 = peak_r2.max(r.n_r2());
                if k == 32 {
                    r1_at_pi = r.n_r1();
                }
            }
            Err(e) => {
                checks.push(CheckOutcome::failed("lossy broadband phase sweep", e));
                return checks;
            }
        }
    }
    checks.push(CheckOutcome::below("max N_r2 over phi", peak_r2, 1.0));
    checks.push(CheckOutcome::at_least("N_r1 at phi = pi", r1_at_pi, 0.98));
    checks
}

/// Largest channel deviation between the oracle and the frequency-domain result.
pub fn oracle_vs_frequency(params: &RouterParams, pulses: &PulseTrain) -> Result<f64> {
    let time = oracle::simulate(params, pulses)?;
    let freq = packet_output_numbers(params, &pulses.packets, &QuadratureSpec::default())?;
    Ok(max_dev(&time, &freq))
}

/// Observed RK4 order from step halving on a smooth driven-cavity problem.
pub fn rk4_observed_order() -> f64 {
    let rate = Complex64::new(-2.1, -0.5);
    let f = |t: f64, c: Complex64| rate * c - Complex64::new(0.0, 1.0) * (-(t - 4.0) * (t - 4.0)).exp();
    let steps = 64;
    let h = 8.0 / steps as f64;
    let zero = Complex64::new(0.0, 0.0);
    let coarse = oracle::rk4(f, zero, 0.0, h, steps);
    let half = oracle::rk4(f, zero, 0.0, h / 2.0, 2 * steps);
    let reference = oracle::rk4(f, zero, 0.0, h / 64.0, 64 * steps);
    let err = |ys: &[Complex64], stride: usize, ref_stride: usize| {
        (0..=steps)
            .map(|k| (ys[k * stride] - reference[k * ref_stride]).norm())
            .fold(0.0, f64::max)
    };
    (err(&coarse, 1, 64) / err(&half, 2, 64)).log2()
}

fn oracle_checks() -> Vec<CheckOutcome> {
    let mut checks = Vec::new();

    // narrow-band packets against the closed form
    let p = RouterParams::symmetric();
    let mut narrow: Result<f64> = Ok(0.0);
    for phi in [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2] {
        narrow = narrow.and_then(|m| {
            let pulses = PulseTrain::new(two_input_packets(&p, 1.0, 0.0, 0.01, phi), 0.0);
            let time = oracle::simulate(&p, &pulses)?;
            let mono = mean_output_two(&p, 1.0, 0.0, phi)?;
            Ok(m.max(max_dev(&time, &mono)))
        });
    }
    checks.push(match narrow {
        Ok(v) => CheckOutcome::at_most("narrow-band oracle vs closed form (rel)", v, 1e-3),
        Err(e) => CheckOutcome::failed("narrow-band oracle", e),
    });

    // broadband, lossy: time domain vs frequency domain
    let mut broad: Result<f64> = Ok(0.0);
    for &(g2, detuning, phi) in &[(1.0, 0.0, 0.0), (1.0, 0.0, 2.0), (0.6, 0.5, 1.0), (0.0, 1.0, 4.0)] {
        let p = RouterParams::new(1.0, g2, 0.1, 0.0);
        let pulses = PulseTrain::new(two_input_packets(&p, 1.0, detuning, 0.3, phi), 0.0);
        broad = broad.and_then(|m| Ok(m.max(oracle_vs_frequency(&p, &pulses)?)));
    }
    checks.push(match broad {
        Ok(v) => CheckOutcome::at_most("broadband oracle vs frequency domain (rel)", v, 1e-4),
        Err(e) => CheckOutcome::failed("broadband oracle", e),
    });

    // lossless conservation in the time domain
    let p = RouterParams::new(1.0, 0.6, 0.0, 0.0);
    let pulses = PulseTrain::new(two_input_packets(&p, 1.0, 0.5, 0.3, 1.0), 0.0);
    checks.push(match oracle::simulate(&p, &pulses) {
        Ok(r) => CheckOutcome::at_most("time-domain conservation (rel)", total_dev(&r), 1e-6),
        Err(e) => CheckOutcome::failed("time-domain conservation", e),
    });

    checks.push(CheckOutcome::at_least("RK4 observed order", rk4_observed_order(), 3.8));

    // step-halving check on the oracle grid itself
    let p = lossy_broadband_params();
    let pulses = PulseTrain::new(two_input_packets(&p, 1.0, 0.0, 0.3, 1.0), 0.0);
    let grid = TimeGrid::for_packets(&p, &pulses.packets, 0.0);
    let refined = grid.and_then(|g| {
        let a = oracle::output_flux(&p, &pulses, &oracle::integrate_cavity(&p, &pulses, &g)?)?;
        let fine = g.refined();
        let b = oracle::output_flux(&p, &pulses, &oracle::integrate_cavity(&p, &pulses, &fine)?)?;
        Ok(max_dev(&a, &b))
    });
    checks.push(match refined {
        Ok(v) => CheckOutcome::at_most("oracle step halving change (rel)", v, 1e-6),
        Err(e) => CheckOutcome::failed("oracle step halving", e),
    });
    checks
}
