use gvi_core::{FeasibleSet, Vector};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn vec_of(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, dim)
}

fn dot(a: &Vector<f64>, b: &Vector<f64>) -> f64 {
    a.dot(b)
}

/// A set together with points to project and a feasible point.
fn set_and_points() -> impl Strategy<Value = (FeasibleSet<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..6).prop_flat_map(|dim| {
        let boxed = (vec_of(dim), prop::collection::vec(0.0..5.0f64, dim)).prop_map(|(lo, w)| {
            let hi: Vec<f64> = lo.iter().zip(&w).map(|(l, w)| l + w).collect();
            FeasibleSet::boxed(Vector::new(lo).unwrap(), Vector::new(hi).unwrap()).unwrap()
        });
        let ball = (vec_of(dim), 0.01..5.0f64)
            .prop_map(|(c, r)| FeasibleSet::ball(Vector::new(c).unwrap(), r).unwrap());
        let sub = prop::collection::vec(any::<bool>(), dim).prop_map(move |free| {
            let idx: Vec<usize> = free.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| i).collect();
            FeasibleSet::coordinate_subspace(dim, &idx).unwrap()
        });
        (prop_oneof![boxed, ball, sub], vec_of(dim), vec_of(dim), vec_of(dim))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn firmly_nonexpansive((set, x, y, _) in set_and_points()) {
        let (x, y) = (Vector::new(x).unwrap(), Vector::new(y).unwrap());
        let (px, py) = (set.project(&x).unwrap(), set.project(&y).unwrap());
        let dp = px.sub(&py).unwrap();
        let dx = x.sub(&y).unwrap();
        prop_assert!(dot(&dp, &dx) >= dot(&dp, &dp) - TOL);
        prop_assert!(dp.norm() <= dx.norm() + TOL);
    }

    #[test]
    fn variational_characterization((set, x, _, y) in set_and_points()) {
        let x = Vector::new(x).unwrap();
        let z = set.project(&x).unwrap();
        // Any projected point is feasible.
        let y = set.project(&Vector::new(y).unwrap()).unwrap();
        prop_assert!(dot(&x.sub(&z).unwrap(), &y.sub(&z).unwrap()) <= TOL);
        prop_assert!(set.contains(&z, 1e-12));
    }

    #[test]
    fn idempotent((set, x, _, _) in set_and_points()) {
        let x = Vector::new(x).unwrap();
        let once = set.project(&x).unwrap();
        let twice = set.project(&once).unwrap();
        match set {
            FeasibleSet::Ball { .. } => prop_assert!(once.distance(&twice) <= 1e-15 * (1.0 + once.norm())),
            _ => prop_assert_eq!(once, twice),
        }
    }
}

#[test]
fn descriptor_round_trip() {
    for text in ["box:lower=-1,-2;upper=1,2", "ball:center=0,0,0;radius=1", "subspace:dim=5;free=3,4,5"] {
        let set: FeasibleSet<f64> = text.parse().unwrap();
        assert_eq!(set.to_string().parse::<FeasibleSet<f64>>().unwrap(), set);
    }
}
