// Strategies and property bodies shared by the proptest suite and the
// acceptance runner. Frames have at most four labels.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::sync::OnceLock;

use fri_core::fri::{self, contribution, source_weights, LabeledBpaSet};
use fri_core::ifs::{decision_confidence, ifv_from_mass};
use fri_core::{Frame, IntuitionisticFuzzyValue, MassFunction, SubsetId, TriangularFuzzyNumber};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Mass = MassFunction<f64>;
pub type Check = Result<(), TestCaseError>;

pub fn frame(k: usize) -> Frame {
    static FRAMES: OnceLock<Vec<Frame>> = OnceLock::new();
    FRAMES.get_or_init(|| {
        let labels = ["a", "b", "c", "d"];
        (1..=4).map(|k| Frame::new(labels[..k].iter().copied()).unwrap()).collect()
    })[k - 1]
        .clone()
}

/// A random mass function on the k-label frame. Masses stay away from zero
/// so that near-total conflict is not confused with rounding.
pub fn mass_on(k: usize) -> impl Strategy<Value = Mass> {
    prop::collection::vec((1u32..(1 << k), 0.01f64..1.0), 1..=6).prop_map(move |v| {
        let total: f64 = v.iter().map(|(_, w)| w).sum();
        Mass::new(&frame(k), v.iter().map(|(b, w)| (SubsetId::from_bits(*b), w / total))).unwrap()
    })
}

/// A Bayesian mass function (singletons only) on the k-label frame.
pub fn bayesian_on(k: usize) -> impl Strategy<Value = Mass> {
    prop::collection::vec(0.01f64..1.0, k).prop_map(move |v| {
        let total: f64 = v.iter().sum();
        Mass::new(&frame(k), v.iter().enumerate().map(|(i, w)| (SubsetId::singleton(i), w / total))).unwrap()
    })
}

pub fn any_mass() -> impl Strategy<Value = Mass> {
    (1usize..=4).prop_flat_map(mass_on)
}

pub fn mass_pair() -> impl Strategy<Value = (Mass, Mass)> {
    (1usize..=4).prop_flat_map(|k| (mass_on(k), mass_on(k)))
}

pub fn mass_triple() -> impl Strategy<Value = (Mass, Mass, Mass)> {
    (1usize..=4).prop_flat_map(|k| (mass_on(k), mass_on(k), mass_on(k)))
}

/// A mass function on a frame of 2..=4 labels with a class index.
pub fn mass_and_class() -> impl Strategy<Value = (Mass, usize)> {
    (2usize..=4).prop_flat_map(|k| (mass_on(k), 0..k))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn same_mass(a: &Mass, b: &Mass, tol: f64) -> Check {
    for s in a.frame().subsets() {
        prop_assert!(
            close(a.mass(s), b.mass(s), tol),
            "m({:?}) differs: {} vs {}\n{:?}\n{:?}",
            s,
            a.mass(s),
            b.mass(s),
            a,
            b
        );
    }
    Ok(())
}

// (a) belief and plausibility

pub fn bel_le_pl(m: Mass) -> Check {
    let f = m.frame().clone();
    for s in f.subsets() {
        let (bel, pl) = (m.belief(s), m.plausibility(s));
        prop_assert!(bel <= pl + 1e-12, "Bel {bel} > Pl {pl} on {s:?}");
        prop_assert!(close(pl, 1.0 - m.belief(f.complement(s)), 1e-12));
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&bel));
    }
    prop_assert!(close(m.belief(f.theta()), 1.0, 1e-12));
    Ok(())
}

// (b) Dempster's rule

pub fn dempster_commutative((m1, m2): (Mass, Mass)) -> Check {
    match (m1.combine(&m2), m2.combine(&m1)) {
        (Ok(a), Ok(b)) => same_mass(&a, &b, 1e-9),
        (Err(_), Err(_)) => Ok(()),
        (a, b) => Err(TestCaseError::fail(format!("one order failed: {a:?} / {b:?}"))),
    }
}

pub fn dempster_associative((m1, m2, m3): (Mass, Mass, Mass)) -> Check {
    let left = m1.combine(&m2).and_then(|m| m.combine(&m3));
    let right = m2.combine(&m3).and_then(|m| m1.combine(&m));
    match (left, right) {
        (Ok(a), Ok(b)) => same_mass(&a, &b, 1e-9),
        (Err(_), Err(_)) => Ok(()),
        (a, b) => Err(TestCaseError::fail(format!("one grouping failed: {a:?} / {b:?}"))),
    }
}

pub fn vacuous_identity(m: Mass) -> Check {
    let vac = Mass::vacuous(m.frame());
    same_mass(&m.combine(&vac).unwrap(), &m, 1e-12)?;
    same_mass(&vac.combine(&m).unwrap(), &m, 1e-12)
}

/// Dense Dempster over every pair of subsets, straight from the definition.
fn dempster_oracle(m1: &Mass, m2: &Mass) -> Option<Vec<f64>> {
    let n = 1usize << m1.frame().len();
    let mut out = vec![0.0; n];
    let mut conflict = 0.0;
    for b in 1..n {
        for c in 1..n {
            let p = m1.mass(SubsetId::from_bits(b as u32)) * m2.mass(SubsetId::from_bits(c as u32));
            if b & c == 0 {
                conflict += p;
            } else {
                out[b & c] += p;
            }
        }
    }
    if 1.0 - conflict < 1e-12 {
        return None;
    }
    Some(out.iter().map(|v| v / (1.0 - conflict)).collect())
}

pub fn dempster_matches_oracle((m1, m2): (Mass, Mass)) -> Check {
    match (m1.combine(&m2), dempster_oracle(&m1, &m2)) {
        (Ok(m), Some(dense)) => {
            for (bits, expected) in dense.iter().enumerate().skip(1) {
                let got = m.mass(SubsetId::from_bits(bits as u32));
                prop_assert!(close(got, *expected, 1e-12), "bits {bits}: {got} vs {expected}");
            }
            let k = m1.conflict(&m2).unwrap();
            let raw: f64 = m1
                .focal()
                .iter()
                .flat_map(|(b, x)| m2.focal().iter().map(move |(c, y)| (b.intersect(*c).is_empty(), x * y)))
                .filter(|(empty, _)| *empty)
                .map(|(_, p)| p)
                .sum();
            prop_assert!(close(k, raw, 1e-12));
            Ok(())
        }
        (Err(_), None) => Ok(()),
        (a, b) => Err(TestCaseError::fail(format!("combine {a:?} but oracle {b:?}"))),
    }
}

// (c) discounting

pub fn discount_identities((m, lambda): (Mass, f64)) -> Check {
    same_mass(&m.discount(1.0).unwrap(), &m, 1e-12)?;
    prop_assert!(m.discount(0.0).unwrap().is_vacuous());
    let d = m.discount(lambda).unwrap();
    let total: f64 = d.focal().iter().map(|(_, v)| v).sum();
    prop_assert!(close(total, 1.0, 1e-12));
    for s in m.frame().subsets() {
        if s != m.frame().theta() {
            prop_assert!(close(d.mass(s), lambda * m.mass(s), 1e-12));
        }
    }
    Ok(())
}

pub fn discount_composes((m, a, b): (Mass, f64, f64)) -> Check {
    let twice = m.discount(a).unwrap().discount(b).unwrap();
    same_mass(&twice, &m.discount(a * b).unwrap(), 1e-12)
}

// (d) pignistic transformation

pub fn pignistic_is_probability(m: Mass) -> Check {
    let p = m.pignistic();
    prop_assert!(close(p.probs().iter().sum::<f64>(), 1.0, 1e-12));
    for (i, s) in m.frame().singletons().enumerate() {
        prop_assert!(m.belief(s) <= p.prob(i) + 1e-12);
        prop_assert!(p.prob(i) <= m.plausibility(s) + 1e-12);
    }
    Ok(())
}

pub fn pignistic_fixed_point(m: Mass) -> Check {
    let p = m.pignistic();
    for (i, s) in m.frame().singletons().enumerate() {
        prop_assert!(close(p.prob(i), m.mass(s), 1e-12));
    }
    Ok(())
}

// (e) contribution

pub fn contribution_bounds((m, class): (Mass, usize)) -> Check {
    let truth = SubsetId::singleton(class);
    let c = contribution(&m, truth).unwrap();
    prop_assert!((-2.0 - 1e-12..=2.0 + 1e-12).contains(&c), "C = {c}");
    let f = m.frame();
    prop_assert!(close(contribution(&Mass::vacuous(f), truth).unwrap(), 0.0, 1e-12));
    prop_assert!(close(contribution(&Mass::certain(f, truth).unwrap(), truth).unwrap(), 2.0, 1e-12));
    Ok(())
}

// (f) min-max weights

pub fn reliabilities() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 1..8)
}

pub fn weights_affine_invariant((r, scale, shift): (Vec<f64>, f64, f64)) -> Check {
    let w = source_weights(&r);
    let moved: Vec<f64> = r.iter().map(|x| x * scale + shift).collect();
    let w2 = source_weights(&moved);
    for (a, b) in w.iter().zip(&w2) {
        prop_assert!(close(*a, *b, 1e-9), "{w:?} vs {w2:?}");
    }
    Ok(())
}

pub fn weights_monotone(r: Vec<f64>) -> Check {
    let w = source_weights(&r);
    for i in 0..r.len() {
        prop_assert!((0.0..=1.0).contains(&w[i]));
        for j in 0..r.len() {
            if r[i] <= r[j] {
                prop_assert!(w[i] <= w[j]);
            }
        }
    }
    let max = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax = r.iter().position(|x| *x == max).unwrap();
    prop_assert_eq!(w[argmax], 1.0);
    Ok(())
}

// IFS bridge

pub fn ifv_bridge((m, class): (Mass, usize)) -> Check {
    let s = SubsetId::singleton(class);
    let v = ifv_from_mass(&m, s);
    prop_assert!(v.membership() >= 0.0 && v.non_membership() >= 0.0);
    prop_assert!(v.membership() + v.non_membership() <= 1.0 + 1e-12);
    prop_assert!(close(decision_confidence(&m, s).unwrap(), v.score(), 1e-12));
    Ok(())
}

pub fn ifv() -> impl Strategy<Value = IntuitionisticFuzzyValue<f64>> {
    // a coarse grid so that ties in score and accuracy actually occur
    (0u32..=10, 0u32..=10)
        .prop_filter("mu + nu <= 1", |(a, b)| a + b <= 10)
        .prop_map(|(a, b)| IntuitionisticFuzzyValue::new(a as f64 / 10.0, b as f64 / 10.0).unwrap())
}

pub fn rank_is_total_preorder((x, y, z): (IntuitionisticFuzzyValue<f64>, IntuitionisticFuzzyValue<f64>, IntuitionisticFuzzyValue<f64>)) -> Check {
    prop_assert_eq!(x.rank(&x), Ordering::Equal);
    prop_assert_eq!(x.rank(&y), y.rank(&x).reverse());
    if x.rank(&y) != Ordering::Less && y.rank(&z) != Ordering::Less {
        prop_assert!(x.rank(&z) != Ordering::Less);
    }
    Ok(())
}

// training and classification

/// Labelled training objects: `sources` BPAs each on a 2..=4 label frame.
pub fn training_set() -> impl Strategy<Value = Vec<LabeledBpaSet<f64>>> {
    (2usize..=4, 1usize..=4).prop_flat_map(|(k, sources)| {
        prop::collection::vec((prop::collection::vec(mass_on(k), sources), 0..k), 1..12).prop_map(|objs| {
            objs.into_iter()
                .enumerate()
                .map(|(n, (bpas, class))| LabeledBpaSet {
                    object_id: n,
                    bpas,
                    truth: SubsetId::singleton(class),
                })
                .collect()
        })
    })
}

pub fn train_order_independent((data, seed): (Vec<LabeledBpaSet<f64>>, u64)) -> Check {
    let names: Vec<String> = (0..data[0].bpas.len()).map(|j| format!("s{j}")).collect();
    let a = fri::train(&names, &data, false).unwrap();
    let mut shuffled = data.clone();
    // deterministic rotation plus reversal keyed off the seed
    let len = shuffled.len();
    shuffled.rotate_left(seed as usize % len);
    if seed % 2 == 1 {
        shuffled.reverse();
    }
    let b = fri::train(&names, &shuffled, false).unwrap();
    for (x, y) in a.sources.iter().zip(&b.sources) {
        prop_assert!(close(x.reliability, y.reliability, 1e-9));
        prop_assert!(close(x.weight, y.weight, 1e-9));
    }
    Ok(())
}

/// A source with weight 0 is discounted to the vacuous mass, the identity of
/// Dempster's rule, so dropping it changes nothing.
pub fn zero_weight_source_is_inert((bpas, weights, extra): (Vec<Mass>, Vec<f64>, Mass)) -> Check {
    let without = fri::classify_weighted(&weights, &bpas);
    let mut with_bpas = bpas.clone();
    with_bpas.push(extra);
    let mut with_w = weights.clone();
    with_w.push(0.0);
    let with = fri::classify_weighted(&with_w, &with_bpas);
    match (without, with) {
        (Ok(a), Ok(b)) => {
            same_mass(&a.fused, &b.fused, 1e-12)?;
            prop_assert_eq!(a.decision, b.decision);
            Ok(())
        }
        (Err(_), Err(_)) => Ok(()),
        (a, b) => Err(TestCaseError::fail(format!("{:?} / {:?}", a.err(), b.err()))),
    }
}

pub fn weighted_sources() -> impl Strategy<Value = (Vec<Mass>, Vec<f64>, Mass)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(k, n)| {
        (
            prop::collection::vec(mass_on(k), n),
            prop::collection::vec(0.0f64..=1.0, n),
            mass_on(k),
        )
    })
}

// TFN

/// `(a, b - a, c - b)`, a position in `[a - 1, c + 1]` as a fraction, and an
/// affine map `x -> x * scale + shift`.
pub fn tfn_case() -> impl Strategy<Value = ((f64, f64, f64), f64, f64, f64)> {
    ((-10.0f64..10.0, 0.1f64..5.0, 0.1f64..5.0), -0.2f64..1.2, 0.1f64..10.0, -100.0f64..100.0)
}

pub fn tfn_scale_invariant(((a, g1, g2), pos, scale, shift): ((f64, f64, f64), f64, f64, f64)) -> Check {
    let (b, c) = (a + g1, a + g1 + g2);
    let x = a + pos * (c - a);
    let t = TriangularFuzzyNumber::new(a, b, c).unwrap();
    let map = |v: f64| v * scale + shift;
    let u = TriangularFuzzyNumber::new(map(a), map(b), map(c)).unwrap();
    let (m1, m2) = (t.membership(x), u.membership(map(x)));
    prop_assert!((0.0..=1.0).contains(&m1));
    prop_assert!(close(m1, m2, 1e-6), "{m1} vs {m2}");
    Ok(())
}
