use greedylab_web::{envelope, norm_table, parse_dense, phi_curve, MAX_ENTRIES};
use serde_json::Value;

fn parsed(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

fn row<'a>(table: &'a Value, name: &str) -> &'a Value {
    table["rows"].as_array().unwrap().iter().find(|r| r["name"] == name).unwrap()
}

#[test]
fn norm_table_values() {
    let table = parsed(norm_table("3, 1 2").unwrap());
    assert_eq!(row(&table, "B")["exact"], "6");
    assert_eq!(row(&table, "l1")["exact"], "6");
    assert_eq!(row(&table, "linf")["exact"], "3");

    let table = parsed(norm_table("4 -3 2 -1").unwrap());
    assert_eq!(row(&table, "A")["exact"], "2");
    assert_eq!(row(&table, "B-comb")["exact"], "6");
    assert_eq!(row(&table, "sigma_g")["exact"], "2");

    let table = parsed(norm_table("2 1").unwrap());
    assert_eq!(row(&table, "lorentz:2")["exact"], "6 ^(1/2)");
    assert!((row(&table, "lorentz:2")["approx"].as_f64().unwrap() - 6f64.sqrt()).abs() < 1e-12);
}

#[test]
fn norm_table_rejects_bad_input() {
    assert!(norm_table("1, x").is_err());
    assert!(norm_table("1/0").is_err());
    assert!(parse_dense(&"1 ".repeat(MAX_ENTRIES + 1)).is_err());
    assert_eq!(parse_dense(" ,, ").unwrap().support_len(), 0);
}

#[test]
fn phi_curve_jumps_at_one() {
    let curve = parsed(phi_curve(32, 4).unwrap());
    let points = curve["points"].as_array().unwrap();
    assert_eq!(points.len(), 5);
    let a = curve["tail_mass"]["approx"].as_f64().unwrap();
    for p in &points[..4] {
        let t = p["t"].as_f64().unwrap();
        assert!((p["approx"].as_f64().unwrap() - (1.0 + a - t)).abs() < 1e-9);
    }
    let last = points[4]["approx"].as_f64().unwrap();
    assert!((last - (1.0 + a)).abs() < 1e-9);
    assert!(phi_curve(32, 0).is_err());
    assert!(phi_curve(3, 4).is_err());
}

#[test]
fn envelope_intervals() {
    let e = parsed(envelope(8, false).unwrap());
    assert_eq!((e["lower"]["exact"].as_str(), e["upper"]["exact"].as_str()), (Some("8"), Some("8")));
    let e = parsed(envelope(4, true).unwrap());
    assert_eq!((e["lower"]["exact"].as_str(), e["upper"]["exact"].as_str()), (Some("1"), Some("2")));
    assert!(envelope(0, false).is_err());
    assert!(envelope(33, true).is_err());
}
