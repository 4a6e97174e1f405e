//! Cache file format roundtrips and corruption handling.

use std::fs;

use hecke2_cli::cache::{read_series, series_path, theta_f_cached, write_series};
use hecke2_core::series::BitSeries;

#[test]
fn roundtrip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let s = BitSeries::theta_f(4096);
    let p1 = dir.path().join("a.fps2");
    let p2 = dir.path().join("b.fps2");
    write_series(&p1, &s).unwrap();
    write_series(&p2, &s).unwrap();
    assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    let back = read_series(&p1).unwrap();
    assert_eq!(back.prec(), s.prec());
    assert_eq!(back.words(), s.words());
}

#[test]
fn header_fields() {
    let dir = tempfile::tempdir().unwrap();
    let s = BitSeries::theta_f(100);
    let p = dir.path().join("h.fps2");
    write_series(&p, &s).unwrap();
    let data = fs::read(&p).unwrap();
    assert_eq!(&data[0..4], b"FPS2");
    assert_eq!(u32::from_le_bytes(data[4..8].try_into().unwrap()), 1);
    assert_eq!(u64::from_le_bytes(data[8..16].try_into().unwrap()), 100);
    assert_eq!(u64::from_le_bytes(data[16..24].try_into().unwrap()), 2);
    assert_eq!(data.len(), 24 + 16);
}

#[test]
fn corruption_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let s = BitSeries::theta_f(4096);
    let p = dir.path().join("c.fps2");

    write_series(&p, &s).unwrap();
    let mut data = fs::read(&p).unwrap();
    data.truncate(data.len() - 8);
    fs::write(&p, &data).unwrap();
    let err = read_series(&p).unwrap_err().to_string();
    assert!(err.contains("corrupt cache file"), "{err}");
    assert!(err.contains(p.to_str().unwrap()), "{err}");
    assert!(err.contains("payload length mismatch"), "{err}");

    write_series(&p, &s).unwrap();
    let mut data = fs::read(&p).unwrap();
    data[0] = b'X';
    fs::write(&p, &data).unwrap();
    let err = read_series(&p).unwrap_err().to_string();
    assert!(err.contains("bad magic"), "{err}");

    // A set bit beyond the declared precision is rejected, not truncated.
    write_series(&p, &BitSeries::theta_f(100)).unwrap();
    let mut data = fs::read(&p).unwrap();
    let last = data.len() - 1;
    data[last] |= 0x80;
    fs::write(&p, &data).unwrap();
    let err = read_series(&p).unwrap_err().to_string();
    assert!(err.contains("set bit beyond declared precision"), "{err}");
}

#[test]
fn cached_theta_hits_on_second_read() {
    let dir = tempfile::tempdir().unwrap();
    let (s1, hit1) = theta_f_cached(Some(dir.path()), 4096).unwrap();
    assert!(!hit1);
    assert!(series_path(dir.path(), "theta_f", 4096).exists());
    let (s2, hit2) = theta_f_cached(Some(dir.path()), 4096).unwrap();
    assert!(hit2);
    assert_eq!(s1.words(), s2.words());
    assert!(s1.agree(&BitSeries::theta_f(4096)));
}
