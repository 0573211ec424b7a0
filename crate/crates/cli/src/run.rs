//! Scenario evaluation, sweeps and CSV output.

use std::io::Write;

use photon_router::oracle::{self, PulseTrain};
use photon_router::scattering::{
    mean_output_single, mean_output_three, mean_output_two, scatter_report, single_input_amplitudes,
    three_input_amplitudes, two_input_amplitudes,
};
use photon_router::wavepacket::{packet_output_numbers, packets_on, QuadratureSpec};
use photon_router::{Channel, OutputReport, RouterError, RouterParams, WavePacket};
use rayon::prelude::*;

use crate::config::{Axis, Inputs, Method, Scenario, SweepVar};
use crate::error::CliError;

pub const CSV_HEADER: [&str; 16] = [
    "case",
    "gamma1",
    "gamma2",
    "gamma_c",
    "delta",
    "phi",
    "theta",
    "theta_prime",
    "Omega",
    "mean_n",
    "N_r1",
    "N_l1",
    "N_r2",
    "N_l2",
    "N_total",
    "loss",
];

pub const THREADS_ENV: &str = "ROUTER_SIM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Mono(Inputs),
    Packet(Inputs, Method),
}

impl Case {
    pub fn label(self) -> String {
        match self {
            Case::Mono(inputs) => inputs.name().to_string(),
            Case::Packet(inputs, _) => format!("packet_{}", inputs.name()),
        }
    }

    fn inputs(self) -> Inputs {
        match self {
            Case::Mono(i) | Case::Packet(i, _) => i,
        }
    }

    /// Whether sweeping `var` changes anything for this case.
    pub fn accepts(self, var: SweepVar) -> bool {
        match var {
            SweepVar::Phi => self.inputs() == Inputs::Two,
            SweepVar::Theta | SweepVar::ThetaPrime => self.inputs() == Inputs::Three,
            SweepVar::Omega => matches!(self, Case::Packet(..)),
            SweepVar::Delta | SweepVar::Gamma2 | SweepVar::GammaC => true,
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub case: Case,
    pub scenario: Scenario,
    pub report: OutputReport,
}

fn params_of(s: &Scenario) -> RouterParams {
    RouterParams::new(s.gamma1, s.gamma2, s.gamma_c, 0.0)
}

/// Packets for a scenario, peaking together; the cavity sits at `omega_c = 0`.
pub fn scenario_packets(s: &Scenario, inputs: Inputs) -> Vec<WavePacket> {
    let phases: Vec<(Channel, f64)> = match inputs {
        Inputs::Single => vec![(Channel::R1, 0.0)],
        Inputs::Two => vec![(Channel::R1, 0.0), (Channel::L1, s.phi)],
        Inputs::Three => vec![(Channel::R1, 0.0), (Channel::R2, s.theta), (Channel::L2, s.theta_prime)],
    };
    packets_on(&params_of(s), s.mean_n, s.center_detuning(), s.bandwidth, &phases)
}

pub fn evaluate(case: Case, s: &Scenario) -> Result<Row, RouterError> {
    let params = params_of(s);
    params.validate()?;
    if !(s.mean_n.is_finite() && s.mean_n >= 0.0) {
        return Err(RouterError::InvalidMeanNumber(s.mean_n));
    }
    let report = match case {
        Case::Mono(inputs) if params.is_lossless() => match inputs {
            Inputs::Single => mean_output_single(&params, s.mean_n, s.delta)?,
            Inputs::Two => mean_output_two(&params, s.mean_n, s.delta, s.phi)?,
            Inputs::Three => mean_output_three(&params, s.mean_n, s.delta, s.theta, s.theta_prime)?,
        },
        Case::Mono(inputs) => {
            let amps = match inputs {
                Inputs::Single => single_input_amplitudes(s.mean_n),
                Inputs::Two => two_input_amplitudes(s.mean_n, s.phi),
                Inputs::Three => three_input_amplitudes(s.mean_n, s.theta, s.theta_prime),
            };
            scatter_report(&params, &amps, s.delta)
        }
        Case::Packet(inputs, Method::Freq) => {
            let quad = QuadratureSpec::with_points(s.points);
            packet_output_numbers(&params, &scenario_packets(s, inputs), &quad)?
        }
        Case::Packet(inputs, Method::Time) => {
            oracle::simulate(&params, &PulseTrain::new(scenario_packets(s, inputs), 0.0))?
        }
    };
    Ok(Row {
        case,
        scenario: *s,
        report,
    })
}

/// Evaluate every grid point, in parallel, returning rows in grid order
/// (first axis outermost).
pub fn sweep(case: Case, base: &Scenario, axis: &Axis, axis2: Option<&Axis>) -> Result<Vec<Row>, CliError> {
    for a in std::iter::once(axis).chain(axis2) {
        a.validate()?;
        if !case.accepts(a.var) {
            return Err(CliError::usage(format!(
                "cannot sweep {} for case {}",
                a.var,
                case.label()
            )));
        }
    }
    if let Some(a2) = axis2 {
        if a2.var == axis.var {
            return Err(CliError::usage(format!(
                "sweep variables must differ, got {} twice",
                a2.var
            )));
        }
    }
    let inner = axis2.map_or(1, |a| a.count);
    let total = axis
        .count
        .checked_mul(inner)
        .filter(|&n| n <= crate::config::MAX_SWEEP_COUNT)
        .ok_or_else(|| CliError::usage("sweep grid exceeds 1000000 points"))?;

    let point = |k: usize| {
        let mut s = *base;
        s.apply(axis.var, axis.value(k / inner));
        if let Some(a2) = axis2 {
            s.apply(a2.var, a2.value(k % inner));
        }
        evaluate(case, &s)
    };
    let rows: Result<Vec<Row>, RouterError> = with_thread_cap(|| (0..total).into_par_iter().map(point).collect())?;
    Ok(rows?)
}

fn with_thread_cap<T: Send>(job: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(value) => {
            let threads: usize =
                value.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                    CliError::usage(format!("{THREADS_ENV} must be a positive integer, got '{value}'"))
                })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::usage(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(job))
        }
        Err(_) => Ok(job()),
    }
}

/// Shortest round-trip decimal, `.` separator, independent of locale.
pub fn format_float(x: f64) -> String {
    format!("{x}")
}

fn optional(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

impl Row {
    pub fn record(&self) -> Vec<String> {
        let s = &self.scenario;
        let inputs = self.case.inputs();
        let (phi, theta, theta_prime) = match inputs {
            Inputs::Single => (None, None, None),
            Inputs::Two => (Some(s.phi), None, None),
            Inputs::Three => (None, Some(s.theta), Some(s.theta_prime)),
        };
        let (delta, omega) = match self.case {
            Case::Mono(_) => (s.delta, None),
            Case::Packet(..) => (s.center_detuning(), Some(s.bandwidth)),
        };
        let r = &self.report;
        let mut out = vec![
            self.case.label(),
            format_float(s.gamma1),
            format_float(s.gamma2),
            format_float(s.gamma_c),
            format_float(delta),
            optional(phi),
            optional(theta),
            optional(theta_prime),
            optional(omega),
            format_float(s.mean_n),
        ];
        out.extend(r.n_out.as_array().iter().map(|&x| format_float(x)));
        out.push(format_float(r.n_total));
        out.push(format_float(r.loss));
        out
    }
}

pub fn write_rows(out: impl Write, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Cavity trajectory dump: `t,re_c,im_c,abs2_c`.
pub fn write_trajectory(out: impl Write, trajectory: &oracle::CavityTrajectory) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "re_c", "im_c", "abs2_c"])?;
    for (t, c) in trajectory.lab_frame() {
        w.write_record([
            format_float(t),
            format_float(c.re),
            format_float(c.im),
            format_float(c.norm_sqr()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Settings;
    use std::f64::consts::PI;

    fn base() -> Scenario {
        Settings::default().scenario()
    }

    #[test]
    fn two_input_destructive_row() {
        let s = Scenario { phi: PI, ..base() };
        let row = evaluate(Case::Mono(Inputs::Two), &s).unwrap();
        let rec = row.record();
        assert_eq!(rec[0], "two");
        assert_eq!(rec[5], format_float(PI));
        assert_eq!(rec[6], "");
        assert_eq!(rec[8], "");
        assert_eq!(&rec[10..14], &["1", "1", "0", "0"]);
        assert_eq!(rec[14], "2");
    }

    #[test]
    fn lossy_mono_goes_through_scatter() {
        let s = Scenario { gamma_c: 0.1, ..base() };
        let row = evaluate(Case::Mono(Inputs::Two), &s).unwrap();
        assert!(row.report.loss > 0.1);
    }

    #[test]
    fn packet_row_fills_omega() {
        let s = Scenario {
            phi: PI,
            gamma_c: 0.1,
            ..base()
        };
        let row = evaluate(Case::Packet(Inputs::Two, Method::Freq), &s).unwrap();
        let rec = row.record();
        assert_eq!(rec[0], "packet_two");
        assert_eq!(rec[8], "0.3");
        assert!((row.report.n_total - 2.0).abs() < 1e-6);
    }

    #[test]
    fn invalid_params_rejected() {
        let s = Scenario { gamma2: -1.0, ..base() };
        assert!(evaluate(Case::Mono(Inputs::Single), &s).is_err());
        let s = Scenario {
            mean_n: -1.0,
            gamma_c: 0.2,
            ..base()
        };
        assert!(evaluate(Case::Mono(Inputs::Single), &s).is_err());
    }

    #[test]
    fn sweep_checks_variable_applicability() {
        let axis = Axis {
            var: SweepVar::Omega,
            start: 0.1,
            stop: 0.3,
            count: 3,
        };
        let err = sweep(Case::Mono(Inputs::Two), &base(), &axis, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let phi = Axis {
            var: SweepVar::Phi,
            start: 0.0,
            stop: 1.0,
            count: 3,
        };
        assert!(sweep(Case::Mono(Inputs::Two), &base(), &phi, Some(&phi)).is_err());
    }

    #[test]
    fn sweep_orders_rows() {
        let theta = Axis {
            var: SweepVar::Theta,
            start: 0.0,
            stop: 1.0,
            count: 3,
        };
        let theta_prime = Axis {
            var: SweepVar::ThetaPrime,
            start: 0.0,
            stop: 2.0,
            count: 2,
        };
        let rows = sweep(Case::Mono(Inputs::Three), &base(), &theta, Some(&theta_prime)).unwrap();
        let pairs: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r.scenario.theta, r.scenario.theta_prime))
            .collect();
        assert_eq!(
            pairs,
            vec![(0.0, 0.0), (0.0, 2.0), (0.5, 0.0), (0.5, 2.0), (1.0, 0.0), (1.0, 2.0)]
        );
    }
}
