//! One module per subcommand.

pub mod gamma;
pub mod region;
pub mod section;
pub mod simulate;
pub mod verify;

use boltzmann_core::billiard::{reflect, tangent_angle, CollisionEvent, InvariantReport};
use boltzmann_core::kepler::osculating_elements;
use boltzmann_core::{CartesianState, Params};

use crate::output::{num, Csv};

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub checks_failed: bool,
}

impl Outcome {
    pub const OK: Outcome = Outcome {
        checks_failed: false,
    };

    pub fn exit_code(self) -> i32 {
        if self.checks_failed {
            1
        } else {
            0
        }
    }
}

pub const EVENT_COLUMNS: [&str; 15] = [
    "n",
    "t",
    "x_impact",
    "r",
    "lambda",
    "A",
    "a_pre",
    "a_post",
    "theta0_pre",
    "theta0_post",
    "R_eq16",
    "R0",
    "R_eq17",
    "residual_identity",
    "bounds_ok",
];

pub fn events_csv(
    events: &[CollisionEvent],
    reports: &[InvariantReport],
    twice_energy: &[f64],
) -> Csv {
    let mut csv = Csv::new(&EVENT_COLUMNS);
    for ((ev, rep), a) in events.iter().zip(reports).zip(twice_energy) {
        csv.row(&[
            ev.n.to_string(),
            num(ev.t),
            num(ev.x_impact),
            num(ev.r),
            num(ev.lambda),
            num(*a),
            num(ev.pre.angular_momentum),
            num(ev.post.angular_momentum),
            num(ev.pre.theta0),
            num(ev.post.theta0),
            num(rep.r_eq16),
            num(rep.r0),
            num(rep.r_eq17),
            num(rep.residual_identity),
            rep.bounds_ok.to_string(),
        ]);
    }
    csv
}

pub fn trajectory_csv(samples: &[CartesianState]) -> Csv {
    let mut csv = Csv::new(&["t", "x", "y", "px", "py"]);
    for s in samples {
        csv.row(&[num(s.t), num(s.x), num(s.y), num(s.px), num(s.py)]);
    }
    csv
}

/// Collision record rebuilt from an integrated impact, using osculating
/// Kepler elements on both sides of the reflection.
pub fn event_from_impact(
    n: usize,
    hit: &CartesianState,
    p: &Params,
) -> boltzmann_core::Result<CollisionEvent> {
    let pre = osculating_elements(hit, p.alpha)?;
    let after = reflect(hit, p)?;
    let post = osculating_elements(&after, p.alpha)?;
    Ok(CollisionEvent {
        n,
        t: hit.t,
        x_impact: hit.x,
        r: hit.r(),
        lambda: tangent_angle(hit.px, hit.py, pre.sense()),
        lambda_post: tangent_angle(after.px, after.py, post.sense()),
        pre,
        post,
    })
}
