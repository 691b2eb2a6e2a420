use wigner_chaos::io::{read_kernel, write_kernel};
use wigner_chaos::{ChaosError, GridSpec, Kernel64, Preset};

#[test]
fn kernel_file_round_trip() {
    let path = std::env::temp_dir().join(format!("wigner-chaos-io-{}.json", std::process::id()));
    let grid = GridSpec::new(3, 0.25).unwrap();
    let f: Kernel64 = "random_mirror:3:5".parse::<Preset>().unwrap().build(grid).unwrap();
    write_kernel(&f, &path).unwrap();
    let back: Kernel64 = read_kernel(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(back, f);
}

#[test]
fn missing_file_is_an_io_error() {
    let err = read_kernel::<f64>("/nonexistent/kernel.json").unwrap_err();
    assert!(matches!(err, ChaosError::Io(_)));
}

#[test]
fn preset_names_round_trip() {
    for spec in ["basis_power:2", "diagonal_family:16", "random_mirror:3:7"] {
        let p: Preset = spec.parse().unwrap();
        assert_eq!(p.to_string(), spec);
    }
    assert_eq!("diagonal:4".parse::<Preset>().unwrap(), Preset::DiagonalFamily { k: 4 });
    assert!(matches!("hermite:2".parse::<Preset>(), Err(ChaosError::UnknownPreset(_))));
    assert!("diagonal:x".parse::<Preset>().is_err());
    assert!("diagonal".parse::<Preset>().is_err());
}

#[test]
fn presets_need_enough_cells() {
    let p: Preset = "diagonal:8".parse().unwrap();
    assert_eq!(p.min_cells(), 8);
    assert!(p.build::<f64>(GridSpec::unit(4).unwrap()).is_err());
    assert!(p.build::<f64>(GridSpec::unit(8).unwrap()).is_ok());
}
