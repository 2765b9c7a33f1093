use bplab_web::{class_group_info, plancherel_grid, sugano_expand};
use serde_json::Value;

#[test]
fn class_group_payload() {
    let v: Value = serde_json::from_str(&class_group_info(23, "2, 3").unwrap()).unwrap();
    assert_eq!(v["result"]["class_number"], 3);
    assert_eq!(v["result"]["characters"][0]["lambda_p"][0]["lambda"], 2.0);
    assert!(class_group_info(5, "").unwrap_err().contains("fundamental"));
}

#[test]
fn sugano_payload() {
    let v: Value = serde_json::from_str(&sugano_expand(4, 0, 5, 0, 0).unwrap()).unwrap();
    assert_eq!(v["result"]["polynomial"]["0,0"][0], "1");
    assert!(sugano_expand(4, 9, 5, 1, 0).is_err());
}

#[test]
fn density_grid_integrates_to_two() {
    // the ordered-region density, unfolded onto the square, has mass 2
    let n = 120;
    let grid = plancherel_grid(4, 0, 5, n).unwrap();
    let h = std::f64::consts::PI / n as f64;
    let mass: f64 = grid.iter().sum::<f64>() * h * h;
    assert!((mass - 2.0).abs() < 1e-3, "{mass}");
    assert!(grid.iter().all(|&x| x >= 0.0));
    assert!(plancherel_grid(4, 0, 5, 1).is_err());
}
