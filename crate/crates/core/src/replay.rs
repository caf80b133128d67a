//! Recomputes the worked examples and the Iris given-input sample from
//! scratch and compares each number with its published value.

use std::fmt;

use serde::Serialize;

use crate::baselines::{deng_fuse, dst_fuse, murphy_fuse, BpaDistance};
use crate::error::Result;
use crate::frame::Frame;
use crate::fri::{self, contribution, source_reliability, source_weights};
use crate::ifs::confidence_vector;
use crate::mass::MassFunction;
use crate::tfn::{bpa_from_memberships, TriangularFuzzyNumber};

/// Tolerance for values printed as exact decimals.
pub const EXACT: f64 = 1e-12;
/// Tolerance for values rounded to two or three decimals.
pub const ROUNDED: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub group: &'static str,
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<12} {:<30} computed {:>9.4}  expected {:>9.4}  tol {:e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.group,
            self.name,
            self.computed,
            self.expected,
            self.tolerance
        )
    }
}

#[derive(Debug, Default, Clone, Serialize)]
pub struct ReplayReport {
    pub checks: Vec<Check>,
}

impl ReplayReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn group(&self, group: &str) -> impl Iterator<Item = &Check> {
        let group = group.to_owned();
        self.checks.iter().filter(move |c| c.group == group)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn push(&mut self, group: &'static str, name: impl Into<String>, computed: f64, expected: f64, tolerance: f64) {
        let pass = (computed - expected).abs() <= tolerance;
        self.checks.push(Check {
            group,
            name: name.into(),
            computed,
            expected,
            tolerance,
            pass,
        });
    }

    fn push_mass(
        &mut self,
        group: &'static str,
        prefix: &str,
        m: &MassFunction<f64>,
        expected: &[(&[&str], f64)],
        tolerance: f64,
    ) -> Result<()> {
        let frame = m.frame();
        for (labels, value) in expected {
            let s = frame.subset_of(labels)?;
            self.push(group, format!("{prefix} m({})", frame.format_subset(s)), m.mass(s), *value, tolerance);
        }
        // anything the expectation leaves out must carry no mass
        let mut listed = 0.0;
        for (labels, _) in expected {
            listed += m.mass(frame.subset_of(labels)?);
        }
        self.push(group, format!("{prefix} unlisted mass"), 1.0 - listed, 0.0, tolerance);
        Ok(())
    }
}

/// TFN memberships and the BPAs generated from them.
///
/// BPAs are generated from the published membership vectors. For x = 0.5 the
/// published vector (0.5, 0, 0) does not follow from the TFNs, which give
/// (0, 0.5, 0); that case is checked both ways.
pub fn example_tfn_bpas(report: &mut ReplayReport) -> Result<()> {
    let frame = Frame::new(["A", "B", "C"])?;
    let tfns = [
        TriangularFuzzyNumber::new(1.0, 2.0, 4.0)?,
        TriangularFuzzyNumber::new(0.0, 1.0, 3.0)?,
        TriangularFuzzyNumber::new(1.0, 3.0, 5.0)?,
    ];
    type Case<'a> = (f64, [f64; 3], &'a [(&'a [&'a str], f64)]);
    let cases: [Case; 4] = [
        (0.5, [0.5, 0.0, 0.0], &[(&["A"], 1.0)]),
        (1.5, [0.5, 0.75, 0.25], &[(&["A"], 0.33), (&["B"], 0.50), (&["A", "B", "C"], 0.17)]),
        (2.0, [1.0, 0.5, 0.5], &[(&["A"], 0.5), (&["A", "B", "C"], 0.5)]),
        (3.5, [0.25, 0.0, 0.75], &[(&["C"], 0.75), (&["A", "C"], 0.25)]),
    ];
    for (x, mu, expected) in cases {
        if x != 0.5 {
            for (k, t) in tfns.iter().enumerate() {
                report.push("tfn-bpa", format!("x={x} mu({})", frame.label(k)), t.membership(x), mu[k], EXACT);
            }
        }
        let m = bpa_from_memberships(&frame, &mu);
        report.push_mass("tfn-bpa", &format!("x={x}"), &m, expected, ROUNDED)?;
    }
    let mu: Vec<f64> = tfns.iter().map(|t| t.membership(0.5)).collect();
    let m = bpa_from_memberships(&frame, &mu);
    report.push_mass("tfn-bpa", "x=0.5 from TFNs", &m, &[(&["B"], 1.0)], EXACT)?;
    Ok(())
}

/// The four sources of the Bel/Pl and decision-confidence example.
pub fn example_sources() -> Result<(Frame, Vec<MassFunction<f64>>)> {
    let f = Frame::new(["A", "B", "C"])?;
    let m = |a: &[(&[&str], f64)]| MassFunction::from_labels(&f, a);
    let sources = vec![
        m(&[(&["A"], 0.4), (&["B"], 0.2), (&["C"], 0.2), (&["B", "C"], 0.2)])?,
        m(&[(&["A"], 0.1), (&["B"], 0.5), (&["C"], 0.1), (&["A", "C"], 0.3)])?,
        m(&[(&["A"], 0.15), (&["B"], 0.55), (&["A", "C"], 0.2), (&["A", "B", "C"], 0.1)])?,
        m(&[(&["A"], 0.3), (&["B"], 0.3), (&["C"], 0.3), (&["A", "B", "C"], 0.1)])?,
    ];
    Ok((f, sources))
}

/// Bel/Pl intervals, decision confidence, and contributions with B true.
pub fn example_confidence(report: &mut ReplayReport) -> Result<()> {
    let (frame, sources) = example_sources()?;
    let bel_pl = [
        [(0.4, 0.4), (0.2, 0.4), (0.2, 0.4)],
        [(0.1, 0.4), (0.5, 0.5), (0.1, 0.4)],
        [(0.15, 0.45), (0.55, 0.65), (0.0, 0.3)],
        [(0.3, 0.4), (0.3, 0.4), (0.3, 0.4)],
    ];
    let dc = [
        [-0.2, -0.4, -0.4],
        [-0.5, 0.0, -0.5],
        [-0.4, 0.2, -0.7],
        [-0.3, -0.3, -0.3],
    ];
    let contributions = [-0.1, 0.5, 0.75, 0.0];
    let truth = frame.singleton("B")?;
    for (j, m) in sources.iter().enumerate() {
        let conf = confidence_vector(m);
        for (k, class) in frame.singletons().enumerate() {
            let label = frame.label(k);
            let (bel, pl) = bel_pl[j][k];
            report.push("confidence", format!("S{} Bel({label})", j + 1), m.belief(class), bel, EXACT);
            report.push("confidence", format!("S{} Pl({label})", j + 1), m.plausibility(class), pl, EXACT);
            report.push("confidence", format!("S{} dc({label})", j + 1), conf[k], dc[j][k], EXACT);
        }
        report.push("confidence", format!("C{}1", j + 1), contribution(m, truth)?, contributions[j], EXACT);
    }
    Ok(())
}

/// Reliability and min-max weights from a fixed contribution matrix.
pub fn example_weights(report: &mut ReplayReport) {
    let c = [[0.5, 0.6, 0.3], [0.2, -0.25, -0.15], [0.25, 0.4, 0.1]];
    let r: Vec<f64> = c.iter().map(|row| source_reliability(row)).collect();
    let w = source_weights(&r);
    for (j, (expected_r, expected_w)) in [(1.4, 1.0), (-0.2, 0.0), (0.75, 0.59375)].into_iter().enumerate() {
        report.push("weights", format!("R{}", j + 1), r[j], expected_r, EXACT);
        report.push("weights", format!("W{}", j + 1), w[j], expected_w, EXACT);
    }
}

/// The published per-feature BPAs of the Iris sample [6.3, 3.3, 4.7, 1.6].
pub fn iris_sample_bpas() -> Result<(Frame, Vec<MassFunction<f64>>)> {
    let f = Frame::new(["Se", "Ve", "Vi"])?;
    let m = |a: &[(&[&str], f64)]| MassFunction::from_labels(&f, a);
    let bpas = vec![
        m(&[(&["Vi"], 0.558), (&["Ve", "Vi"], 0.442)])?,
        m(&[(&["Se"], 0.537), (&["Vi"], 0.367), (&["Se", "Ve", "Vi"], 0.096)])?,
        m(&[(&["Ve"], 0.715), (&["Ve", "Vi"], 0.285)])?,
        m(&[(&["Ve"], 0.569), (&["Ve", "Vi"], 0.431)])?,
    ];
    Ok((f, bpas))
}

/// Published weights for the Iris sources, in feature order.
pub const IRIS_WEIGHTS: [f64; 4] = [0.33, 0.0, 1.0, 0.90];

/// Pignistic outputs of each method on the Iris sample.
pub fn iris_sample(report: &mut ReplayReport) -> Result<()> {
    let (frame, bpas) = iris_sample_bpas()?;
    let rows: [(&'static str, [f64; 3], f64); 4] = [
        ("iris-fri", [0.0, 0.9022, 0.0978], ROUNDED),
        ("iris-dst", [0.0, 0.4237, 0.5763], ROUNDED),
        ("iris-murphy", [0.0026, 0.6523, 0.3451], 0.01),
        ("iris-deng", [0.0006, 0.7656, 0.2337], 0.05),
    ];

    let fri = fri::classify_weighted(&IRIS_WEIGHTS, &bpas)?;
    let discounted = &fri.discounted[0];
    let m1 = [(&["Vi"][..], 0.182), (&["Ve", "Vi"][..], 0.144), (&["Se", "Ve", "Vi"][..], 0.674)];
    for (labels, v) in m1 {
        let s = frame.subset_of(labels)?;
        report.push("iris-fri", format!("discounted m1({})", frame.format_subset(s)), discounted.mass(s), v, 0.01);
    }
    report.push(
        "iris-fri",
        "decision is Ve",
        fri.decision.class as f64,
        frame.index_of("Ve").unwrap_or(usize::MAX) as f64,
        0.0,
    );

    let fused = [
        fri.fused,
        dst_fuse(&bpas)?,
        murphy_fuse(&bpas)?,
        deng_fuse(&bpas, BpaDistance::default())?.fused,
    ];
    for ((group, expected, tol), m) in rows.into_iter().zip(&fused) {
        let p = m.pignistic();
        for (k, e) in expected.iter().enumerate() {
            report.push(group, format!("BetP({})", frame.label(k)), p.prob(k), *e, tol);
        }
    }
    Ok(())
}

/// Every replay group in order.
pub fn replay_all() -> Result<ReplayReport> {
    let mut report = ReplayReport::default();
    example_tfn_bpas(&mut report)?;
    example_confidence(&mut report)?;
    example_weights(&mut report);
    iris_sample(&mut report)?;
    Ok(report)
}
