use masterfield::loop_model::{
    figure_eight, maximally_winding, parse_loop_spec, random_loop, trefoil_projection, write_loop_spec, CombinatorialLoop,
    FaceAreaVector,
};
use masterfield::master::MasterField;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spread(p: usize, t: f64) -> FaceAreaVector {
    let raw: Vec<f64> = (0..p).map(|i| 1.0 + 0.25 * ((3 * i) % 4) as f64).collect();
    let s: f64 = raw.iter().sum();
    FaceAreaVector::new(raw.iter().map(|x| x * t / s).collect()).unwrap()
}

fn corpus() -> Vec<CombinatorialLoop> {
    let mut v = vec![figure_eight(), trefoil_projection(), maximally_winding(3).unwrap(), maximally_winding(4).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    while v.len() < 12 {
        let l = random_loop(&mut rng, 3);
        if l.n_self() >= 2 {
            v.push(l);
        }
    }
    v
}

#[test]
fn values_are_bounded_and_satisfy_the_mm_equations() {
    for t in [1.0, 12.0] {
        let mf = MasterField::new(t).unwrap();
        for l in corpus() {
            let a = spread(l.face_count(), t);
            let v = mf.value(&l, &a).unwrap();
            assert!(v.value.abs() <= 1.0 + v.err_est, "T={t}: {}", v.value);
            for &x in l.intersections() {
                let r = mf.mm_residual(&l, &a, x, 1e-3).unwrap();
                assert!(r <= 1e-4, "T={t} vertex {x}: residual {r:e}");
            }
        }
    }
}

#[test]
fn value_survives_the_text_format() {
    let mf = MasterField::new(2.0).unwrap();
    for l in corpus() {
        let a = spread(l.face_count(), 2.0);
        let text = write_loop_spec(&l, &a);
        let (back, areas) = parse_loop_spec(&text).unwrap();
        assert_eq!(mf.value(&l, &a).unwrap().value, mf.value(&back, &areas).unwrap().value);
    }
}

#[test]
fn nested_loops_decrease_with_winding() {
    // equal areas on the innermost and outermost face, nothing in between
    let mf = MasterField::new(1.0).unwrap();
    let mut last = f64::INFINITY;
    for n in 1..=4 {
        let l = maximally_winding(n).unwrap();
        let mut a = vec![0.0; n + 1];
        a[0] = 0.5;
        a[n] = 0.5;
        let v = mf.value(&l, &FaceAreaVector::new(a).unwrap()).unwrap().value;
        assert!(v < last);
        last = v;
    }
}
