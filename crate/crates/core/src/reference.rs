//! Closed-form detection probabilities for highly symmetric cases.
//!
//! These are the targets the Monte Carlo estimates are checked against. All
//! of them refer to the symmetric group `U^(x)n`, one measurement basis and
//! pure states.

use std::f64::consts::PI;

use serde::Serialize;

/// Complete elliptic integral of the first kind in the parameter convention,
/// `K(m) = int_0^{pi/2} dt / sqrt(1 - m sin^2 t)`, for `m < 1`.
pub fn elliptic_k(m: f64) -> f64 {
    quarter_period(|s| 1.0 / (1.0 - m * s).sqrt())
}

/// Complete elliptic integral of the third kind,
/// `Pi(n, m) = int_0^{pi/2} dt / ((1 - n sin^2 t) sqrt(1 - m sin^2 t))`,
/// for `n < 1`, `m < 1`.
pub fn elliptic_pi(n: f64, m: f64) -> f64 {
    quarter_period(|s| 1.0 / ((1.0 - n * s) * (1.0 - m * s).sqrt()))
}

/// Trapezoid rule over `[0, pi/2]` for integrands of `sin^2 t`. Such
/// integrands are smooth, even and pi-periodic, so the rule converges
/// geometrically.
fn quarter_period(f: impl Fn(f64) -> f64) -> f64 {
    const STEPS: usize = 512;
    let h = PI / 2.0 / STEPS as f64;
    let inner: f64 = (1..STEPS).map(|i| f((i as f64 * h).sin().powi(2))).sum();
    h * (inner + 0.5 * (f(0.0) + f(1.0)))
}

/// GHZ_3, criterion Q0.
pub fn ghz3_q0() -> f64 {
    1.0 + 3.0 * 2f64.sqrt() * (2.0 * elliptic_k(-0.125) - 3.0 * elliptic_pi(-0.5, -0.125)) / (2.0 * PI)
}

/// W_n, criterion Q1, for `n >= 3`.
pub fn w_q1(n: usize) -> f64 {
    assert!(n >= 3, "defined for n >= 3");
    let n = n as f64;
    (1.0 + ((n - 1.0) / (n - 2.0)).sqrt() - 2.0 * ((n - 1.0) / n).sqrt()) / n
}

/// W_n, criterion Q0, for `n >= 3`.
pub fn w_q0(n: usize) -> f64 {
    assert!(n >= 3, "defined for n >= 3");
    if n == 3 {
        1.0 / 3f64.sqrt()
    } else {
        0.0
    }
}

pub fn dicke42_q0() -> f64 {
    1.0 / (3.0 + 6f64.sqrt()).sqrt()
}

pub fn dicke42_q1() -> f64 {
    (2f64.sqrt() - 1.0) / 2.0
}

pub fn dicke42_q2() -> f64 {
    1.0 - (8.0 - 2.0 * 3f64.sqrt()).sqrt() / 3.0
}

/// D_4^2 with Q0, Q1 and Q2 combined.
pub fn dicke42_q012() -> f64 {
    let s = f64::sqrt;
    (3.0 + 3.0 * s(2.0) + 2.0 * s(3.0 * (3.0 - s(6.0))) - 2.0 * s(4.0 + s(13.0))) / 6.0
}

#[derive(Clone, Debug, Serialize)]
pub struct ReferenceValue {
    pub key: String,
    pub state: String,
    pub criteria: String,
    pub closed_form: String,
    pub value: f64,
}

fn entry(key: &str, state: &str, criteria: &str, closed_form: &str, value: f64) -> ReferenceValue {
    ReferenceValue {
        key: key.into(),
        state: state.into(),
        criteria: criteria.into(),
        closed_form: closed_form.into(),
        value,
    }
}

/// All closed-form targets, symmetric group, single basis.
pub fn reference_table() -> Vec<ReferenceValue> {
    let mut t = vec![entry(
        "ghz3_q0",
        "ghz n=3",
        "q0",
        "1 + 3 sqrt(2) (2 K(-1/8) - 3 Pi(-1/2, -1/8)) / (2 pi)",
        ghz3_q0(),
    )];
    for n in 3..=6 {
        t.push(entry(
            &format!("w{n}_q1"),
            &format!("w n={n}"),
            "q1",
            "(1 + sqrt((n-1)/(n-2)) - 2 sqrt((n-1)/n)) / n",
            w_q1(n),
        ));
    }
    t.push(entry("w3_q0", "w n=3", "q0", "1/sqrt(3)", w_q0(3)));
    t.push(entry("w4_q0", "w n>3", "q0", "0", w_q0(4)));
    t.push(entry("d42_q0", "dicke n=4 m=2", "q0", "1/sqrt(3 + sqrt(6))", dicke42_q0()));
    t.push(entry("d42_q1", "dicke n=4 m=2", "q1", "(sqrt(2) - 1) / 2", dicke42_q1()));
    t.push(entry("d42_q2", "dicke n=4 m=2", "q2", "1 - sqrt(8 - 2 sqrt(3)) / 3", dicke42_q2()));
    t.push(entry(
        "d42_q012",
        "dicke n=4 m=2",
        "q0+q1+q2",
        "(3 + 3 sqrt(2) + 2 sqrt(3 (3 - sqrt(6))) - 2 sqrt(4 + sqrt(13))) / 6",
        dicke42_q012(),
    ));
    t
}
