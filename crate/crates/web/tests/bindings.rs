use qchannel_web::{capacity_curve_json, ghz_teleport_table_json, teleclone_state_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn capacity_curves_match_the_closed_form() {
    let v = parse(&capacity_curve_json(4, 11).unwrap());
    let curves = v.as_array().unwrap();
    assert_eq!(curves.len(), 3);
    for curve in curves {
        let n = curve["n"].as_f64().unwrap();
        assert_eq!(curve["c"].as_array().unwrap().len(), 11);
        assert!(curve["max_abs_diff"].as_f64().unwrap() < 1e-9);
        // maximal entanglement at the midpoint: 1 + 1/(N − 1)
        let mid = curve["c"][5].as_f64().unwrap();
        assert!((mid - (1.0 + 1.0 / (n - 1.0))).abs() < 1e-9);
        assert!((curve["c"][0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn capacity_rejects_out_of_range_arguments() {
    assert!(capacity_curve_json(1, 11).is_err());
    assert!(capacity_curve_json(7, 11).is_err());
    assert!(capacity_curve_json(3, 1).is_err());
}

#[test]
fn ghz_table_has_eight_perfect_branches() {
    let v = parse(&ghz_teleport_table_json(0.7, 1.3).unwrap());
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 8);
    let labels: Vec<&str> = rows.iter().map(|r| r["element"].as_str().unwrap()).collect();
    assert_eq!(labels, ["π+ Φ+", "π+ Φ−", "π− Φ+", "π− Φ−", "π+ Ψ+", "π+ Ψ−", "π− Ψ+", "π− Ψ−"]);
    for r in rows {
        assert!((r["probability"].as_f64().unwrap() - 0.125).abs() < 1e-10);
        assert!((r["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
    assert!(ghz_teleport_table_json(f64::NAN, 0.0).is_err());
}

#[test]
fn teleclone_copies_are_the_input() {
    let v = parse(&teleclone_state_json(0.3).unwrap());
    for key in ["rho_b_diagonal", "rho_c_diagonal"] {
        let d = v[key].as_array().unwrap();
        assert!((d[0].as_f64().unwrap() - 0.3).abs() < 1e-10);
        assert!((d[1].as_f64().unwrap() - 0.7).abs() < 1e-10);
    }
    let bc: Vec<f64> = v["rho_bc_diagonal"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (got, want) in bc.iter().zip([0.3, 0.0, 0.0, 0.7]) {
        assert!((got - want).abs() < 1e-10);
    }
    assert!(v["max_off_diagonal"].as_f64().unwrap() < 1e-10);
    assert!(teleclone_state_json(-0.1).is_err());
}
