use proptest::prelude::*;

use shadowlab::core::{ErrorModel, MapSpec, Monomial, Point, Point2, Pseudotrajectory, ScalingConfig, ScalingRow};
use shadowlab::io::{read_scaling_csv, read_trajectory_csv, write_scaling_csv, write_trajectory_csv};

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3f64, -1e-8..1e-8f64, Just(0.0), Just(-0.0)]
}

proptest! {
    #[test]
    fn planar_trajectory_csv_is_bit_exact(
        pts in prop::collection::vec((finite(), finite()), 1..40),
        d in 1e-9..1e-1f64,
        seed in any::<u64>(),
    ) {
        let points: Vec<Point> = pts.iter().map(|&(x, y)| Point::Two(Point2::new(x, y))).collect();
        let mut traj = Pseudotrajectory::from_points(points, ErrorModel::Weighted { d }).unwrap();
        traj.seed = Some(seed);
        let spec = MapSpec::PlanarSaddle { n: 1, m: 2, x_terms: vec![], y_terms: vec![Monomial::new(0.5, 2, 1)] };
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, Some(&spec), &traj).unwrap();
        let (header, back) = read_trajectory_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(header.spec, Some(spec));
        prop_assert_eq!(header.seed, Some(seed));
        prop_assert_eq!(back.model, traj.model);
        for (a, b) in back.points.iter().zip(&traj.points) {
            let (Point::Two(a), Point::Two(b)) = (a, b) else { panic!("dimension changed") };
            prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
            prop_assert_eq!(a.y.to_bits(), b.y.to_bits());
        }
        prop_assert_eq!(back.len(), traj.len());
    }

    #[test]
    fn scalar_trajectory_csv_is_bit_exact(xs in prop::collection::vec(finite(), 1..40)) {
        let traj = Pseudotrajectory::from_points(xs.iter().map(|&x| Point::One(x)).collect(), ErrorModel::Exact).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, None, &traj).unwrap();
        let (header, back) = read_trajectory_csv(buf.as_slice()).unwrap();
        prop_assert!(header.spec.is_none());
        let got: Vec<u64> = back.scalar_points().unwrap().iter().map(|x| x.to_bits()).collect();
        let want: Vec<u64> = xs.iter().map(|x| x.to_bits()).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn scaling_csv_roundtrips(rows in prop::collection::vec((1e-4..1.0f64, 1e-12..1.0f64, 0.0..=1.0f64), 0..12)) {
        let rows: Vec<ScalingRow> = rows.into_iter().map(|(eps, d_max, success_rate)| ScalingRow { eps, d_max, success_rate }).collect();
        let mut buf = Vec::new();
        write_scaling_csv(&mut buf, &rows).unwrap();
        prop_assert_eq!(read_scaling_csv(buf.as_slice()).unwrap(), rows);
    }
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in
        ["expanding_n1.json", "expanding_n1_quartic.json", "saddle_n1_m1.json", "saddle_n1_m2.json", "skew.json"]
    {
        let spec = shadowlab::io::read_spec(&dir.join(name)).unwrap();
        spec.validate().unwrap();
    }
    for name in ["scaling_cubic.json", "scaling_saddle_n1_m2.json"] {
        let config: ScalingConfig = shadowlab::io::read_json(&dir.join(name)).unwrap();
        config.validate().unwrap();
    }
}

#[test]
fn malformed_csv_reports_the_line() {
    let text = "# {\"model\":{\"kind\":\"exact\"}}\nk,x\n0,0.1\n1,not-a-number\n";
    let err = read_trajectory_csv(text.as_bytes()).unwrap_err().to_string();
    assert!(err.starts_with("line 4"), "{err}");
    assert!(read_trajectory_csv("k,x\n0,0.1\n".as_bytes()).is_err());
    assert!(read_scaling_csv("eps,d_max\n".as_bytes()).is_err());
}
