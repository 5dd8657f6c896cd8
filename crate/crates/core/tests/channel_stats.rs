use anytime::channel::{apply_pattern, ChannelConfig, ChannelSymbol};
use anytime::gf2::BitVec;

#[test]
fn erasure_rate_within_four_sigma() {
    for &eps in &[0.05, 0.3, 0.5, 0.9] {
        let ch = ChannelConfig::new(eps, 77).unwrap();
        let total = 200_000u64;
        let erased = (0..total).filter(|&i| ch.erased(i / 15, (i % 15) as usize)).count();
        let sigma = (eps * (1.0 - eps) / total as f64).sqrt();
        let rate = erased as f64 / total as f64;
        assert!((rate - eps).abs() < 4.0 * sigma, "ε = {eps}: rate {rate}");
    }
}

#[test]
fn neighbouring_positions_are_uncorrelated() {
    let ch = ChannelConfig::new(0.3, 5).unwrap();
    let t_max = 50_000u64;
    let both = (0..t_max).filter(|&t| ch.erased(t, 0) && ch.erased(t, 1)).count() as f64;
    let across = (0..t_max).filter(|&t| ch.erased(t, 0) && ch.erased(t + 1, 0)).count() as f64;
    let expect = 0.09 * t_max as f64;
    let sigma = (0.09 * 0.91 * t_max as f64).sqrt();
    assert!((both - expect).abs() < 4.0 * sigma);
    assert!((across - expect).abs() < 4.0 * sigma);
}

#[test]
fn transmit_is_deterministic_and_preserves_bits() {
    let ch = ChannelConfig::new(0.4, 3).unwrap();
    let c = BitVec::from_u8s(&[1, 0, 1, 1, 0, 0, 1, 0]);
    let a = ch.transmit(&c, 12);
    assert_eq!(a, ch.transmit(&c, 12));
    for (i, s) in a.iter().enumerate() {
        if let Some(b) = s.bit() {
            assert_eq!(b, c.get(i));
        }
    }
    assert!(ChannelConfig::new(0.0, 3).unwrap().transmit(&c, 1).iter().all(|s| !s.is_erased()));
    assert!(ChannelConfig::new(1.0, 3).unwrap().transmit(&c, 1).iter().all(|s| s.is_erased()));
}

#[test]
fn patterns_and_validation() {
    let c = BitVec::from_u8s(&[1, 0]);
    let s = apply_pattern(&c, &[false, true]).unwrap();
    assert_eq!(s, vec![ChannelSymbol::One, ChannelSymbol::Erased]);
    assert!(apply_pattern(&c, &[true]).is_err());
    assert!(ChannelConfig::new(-0.1, 0).is_err());
    assert!(ChannelConfig::new(1.1, 0).is_err());
}
