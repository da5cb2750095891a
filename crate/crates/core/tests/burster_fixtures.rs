//! Regimes located by scanning c at delta = 0.08, mu_slow = 0.002, I = 0.8.

use funnel_lab::burster::{classify_regime, AttractorLabel, BursterParams, ExponentPattern, RegimeLabel, RegimeOptions, SectionTopology};

fn classify(c: f64) -> funnel_lab::burster::RegimeReport {
    classify_regime(&BursterParams::with_c(c), &RegimeOptions::default()).unwrap()
}

#[test]
fn quiescent_below_the_hopf_point() {
    let r = classify(-1.46);
    assert_eq!(r.label, RegimeLabel::Quiescent);
    assert_eq!(r.spikes.count, 0);
    assert_eq!(r.attractor.unwrap().label, AttractorLabel::Equilibrium);
}

#[test]
fn bursting_in_the_middle() {
    let r = classify(-1.3);
    assert_eq!(r.label, RegimeLabel::Bursting);
    assert!(r.spikes.gaps > 0);
    assert!(r.spikes.spikes_per_burst > 1.0);
}

#[test]
fn tonic_spiking_at_the_top() {
    let r = classify(-1.0);
    assert_eq!(r.label, RegimeLabel::TonicSpiking);
    assert!(r.spikes.isi_cv < 0.05);
}

#[test]
fn stable_periodic_orbit_with_two_clusters() {
    let r = classify(-1.1);
    assert_eq!(r.label, RegimeLabel::TonicSpiking);
    let a = r.attractor.unwrap();
    assert_eq!(a.label, AttractorLabel::PeriodicOrbit);
    assert!(ExponentPattern::Periodic.matches(&a.exponents.unwrap()));
    match a.topology {
        SectionTopology::Clusters { centers, .. } => assert_eq!(centers.len(), 2),
        t => panic!("expected clusters, got {t:?}"),
    }
}
