use std::io::Write;

use metaspin::numerics::Precision;
use metaspin_cli::config::{CommonArgs, Format, PrecisionArg, RunConfig};
use metaspin_cli::output::{Cell, Report};

#[test]
fn defaults_validate() {
    let c = RunConfig::resolve(&CommonArgs::default()).unwrap();
    assert_eq!(c.omega, 0.25);
    assert_eq!(c.gamma_grid().len(), 19);
    assert_eq!(*c.gamma_grid().last().unwrap(), 10.0);
}

#[test]
fn empty_gamma_grid_is_rejected() {
    let a = CommonArgs { gamma_min: Some(5.0), gamma_max: Some(4.0), ..Default::default() };
    let e = RunConfig::resolve(&a).unwrap_err().to_string();
    assert!(e.contains("empty"), "{e}");
    let a = CommonArgs { gamma_step: Some(0.0), ..Default::default() };
    assert!(RunConfig::resolve(&a).is_err());
}

#[test]
fn spin_values_must_be_half_integers() {
    let a = CommonArgs { spin_j: vec![3.3], ..Default::default() };
    assert!(RunConfig::resolve(&a).is_err());
    let a = CommonArgs { spin_j: vec![3.5, 4.0], ..Default::default() };
    assert_eq!(RunConfig::resolve(&a).unwrap().spin_j, vec![3.5, 4.0]);
}

#[test]
fn tolerances_must_be_positive() {
    for a in [
        CommonArgs { rtol: Some(0.0), ..Default::default() },
        CommonArgs { ds: Some(-1e-3), ..Default::default() },
        CommonArgs { jobs: Some(0), ..Default::default() },
    ] {
        assert!(RunConfig::resolve(&a).is_err());
    }
}

#[test]
fn flags_override_config_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "omega = 0.5\ngamma_min = 3.0\nspin_j = [40.0, 44.0, 48.0]\nprecision = \"extended\"\nformat = \"json\"").unwrap();
    let a = CommonArgs { config: Some(f.path().into()), omega: Some(0.3), ..Default::default() };
    let c = RunConfig::resolve(&a).unwrap();
    assert_eq!(c.omega, 0.3);
    assert_eq!(c.gamma_min, 3.0);
    assert_eq!(c.spin_j, vec![40.0, 44.0, 48.0]);
    assert_eq!(c.precision, Precision::Extended);
    assert_eq!(c.format, Format::Json);
    let a = CommonArgs { config: Some(f.path().into()), precision: Some(PrecisionArg::Double), ..Default::default() };
    assert_eq!(RunConfig::resolve(&a).unwrap().precision, Precision::Double);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "omgea = 0.5").unwrap();
    let a = CommonArgs { config: Some(f.path().into()), ..Default::default() };
    assert!(RunConfig::resolve(&a).is_err());
}

#[test]
fn csv_has_header_and_lf_endings() {
    let mut r = Report::new(&["a", "b", "c"]);
    r.push(vec![Cell::Num(1.5), Cell::Empty, "x,y".into()]);
    r.push(vec![Cell::Num(1e-20), Cell::Int(3), "z".into()]);
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let s = String::from_utf8(buf).unwrap();
    assert_eq!(s, "a,b,c\n1.5,,\"x,y\"\n1e-20,3,z\n");
    assert!(!s.contains('\r'));
}

#[test]
fn json_mirrors_rows_in_column_order() {
    let mut r = Report::new(&["z", "a"]);
    r.push(vec![Cell::Num(2.0), Cell::Empty]);
    r.note("k", 1);
    let v = r.to_json();
    let row = v["rows"][0].as_object().unwrap();
    assert_eq!(row.keys().collect::<Vec<_>>(), ["z", "a"]);
    assert!(row["a"].is_null());
    assert_eq!(v["summary"]["k"], 1);
}
