use super::*;
use crate::gradcheck::{central_diff, max_rel_err};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn rand_vec(rng: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn identity_kernel_conv_is_identity() {
    let mut tape = Tape::new();
    let x = tape.leaf(&[1, 3, 3], (1..=9).map(|v| v as f64).collect(), false).unwrap();
    let k = tape.constant(&[1, 1, 1, 1], vec![1.0]).unwrap();
    let b = tape.constant(&[1], vec![0.0]).unwrap();
    let y = tape.conv2d(x, k, Some(b), 1, Padding::None).unwrap();
    assert_eq!(tape.value(y), tape.value(x));
}

#[test]
fn circular_pad_picks_left_neighbor() {
    // row [1,2,3], kernel [1,0,0] over pad-1 wrap selects the left neighbor.
    let mut tape = Tape::new();
    let x = tape.leaf(&[1, 1, 3], vec![1.0, 2.0, 3.0], false).unwrap();
    let k = tape.constant(&[1, 1, 1, 3], vec![1.0, 0.0, 0.0]).unwrap();
    let y = tape.conv2d(x, k, None, 1, Padding::Circular { rows: 0, cols: 1 }).unwrap();
    assert_eq!(tape.value(y), &[3.0, 1.0, 2.0]);
}

#[test]
fn conv2d_gradients_match_finite_differences() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let xv = rand_vec(&mut rng, 2 * 8 * 8);
    let kv = rand_vec(&mut rng, 4 * 2 * 3 * 3);
    let bv = rand_vec(&mut rng, 4);

    let forward = |inp: &[Vec<f64>]| -> f64 {
        let mut t = Tape::new();
        let x = t.leaf(&[2, 8, 8], inp[0].clone(), false).unwrap();
        let k = t.leaf(&[4, 2, 3, 3], inp[1].clone(), false).unwrap();
        let b = t.leaf(&[4], inp[2].clone(), false).unwrap();
        let y = t.conv2d(x, k, Some(b), 1, Padding::Circular { rows: 1, cols: 1 }).unwrap();
        let s = t.sum(y);
        t.value(s)[0]
    };
    let inputs = vec![xv.clone(), kv.clone(), bv.clone()];
    let numeric = central_diff(forward, &inputs, 1e-6);

    let mut t = Tape::new();
    let x = t.leaf(&[2, 8, 8], xv, true).unwrap();
    let k = t.leaf(&[4, 2, 3, 3], kv, true).unwrap();
    let b = t.leaf(&[4], bv, true).unwrap();
    let y = t.conv2d(x, k, Some(b), 1, Padding::Circular { rows: 1, cols: 1 }).unwrap();
    let s = t.sum(y);
    t.backward(s).unwrap();

    for (id, num) in [x, k, b].into_iter().zip(&numeric) {
        assert!(max_rel_err(t.grad(id).unwrap(), num) < 1e-6);
    }
}

#[test]
fn strided_conv_gradients_match_finite_differences() {
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    let xv = rand_vec(&mut rng, 2 * 8 * 8);
    let kv = rand_vec(&mut rng, 3 * 2 * 4 * 4);
    let forward = |inp: &[Vec<f64>]| -> f64 {
        let mut t = Tape::new();
        let x = t.leaf(&[2, 8, 8], inp[0].clone(), false).unwrap();
        let k = t.leaf(&[3, 2, 4, 4], inp[1].clone(), false).unwrap();
        let y = t.conv2d(x, k, None, 2, Padding::Circular { rows: 1, cols: 1 }).unwrap();
        // cube the outputs so input gradients are nontrivial
        let y3 = t.powi(y, 3);
        let s = t.sum(y3);
        t.value(s)[0]
    };
    let inputs = vec![xv.clone(), kv.clone()];
    let numeric = central_diff(forward, &inputs, 1e-6);

    let mut t = Tape::new();
    let x = t.leaf(&[2, 8, 8], xv, true).unwrap();
    let k = t.leaf(&[3, 2, 4, 4], kv, true).unwrap();
    let y = t.conv2d(x, k, None, 2, Padding::Circular { rows: 1, cols: 1 }).unwrap();
    let y3 = t.powi(y, 3);
    let s = t.sum(y3);
    t.backward(s).unwrap();
    assert_eq!(tape_shape(&t, y), &[3, 4, 4]);
    assert!(max_rel_err(t.grad(x).unwrap(), &numeric[0]) < 1e-6);
    assert!(max_rel_err(t.grad(k).unwrap(), &numeric[1]) < 1e-6);
}

fn tape_shape<'t>(t: &'t Tape, id: TensorId) -> &'t [usize] {
    t.shape(id)
}

#[test]
fn sigmoid_and_tanh_values_and_gradients_at_zero() {
    let mut t = Tape::new();
    let x = t.leaf(&[1], vec![0.0], true).unwrap();
    let s = t.sigmoid(x);
    assert_eq!(t.value(s), &[0.5]);
    let total = t.sum(s);
    t.backward(total).unwrap();
    assert!((t.grad(x).unwrap()[0] - 0.25).abs() < 1e-15);

    let mut t = Tape::new();
    let x = t.leaf(&[1], vec![0.0], true).unwrap();
    let y = t.tanh(x);
    assert_eq!(t.value(y), &[0.0]);
    let total = t.sum(y);
    t.backward(total).unwrap();
    assert!((t.grad(x).unwrap()[0] - 1.0).abs() < 1e-15);
}

#[test]
fn hadamard_gradient_is_other_operand() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let xv = rand_vec(&mut rng, 9);
    let yv = rand_vec(&mut rng, 9);
    let mut t = Tape::new();
    let x = t.leaf(&[3, 3], xv.clone(), true).unwrap();
    let y = t.leaf(&[3, 3], yv.clone(), true).unwrap();
    let p = t.mul(x, y).unwrap();
    let s = t.sum(p);
    t.backward(s).unwrap();
    assert!(max_rel_err(t.grad(x).unwrap(), &yv) < 1e-12);
    assert!(max_rel_err(t.grad(y).unwrap(), &xv) < 1e-12);

    let numeric = central_diff(
        |inp: &[Vec<f64>]| inp[0].iter().zip(&inp[1]).map(|(a, b)| a * b).sum(),
        &[xv, yv],
        1e-6,
    );
    assert!(max_rel_err(t.grad(x).unwrap(), &numeric[0]) < 1e-6);
}

#[test]
fn elementwise_primitive_gradients_match_finite_differences() {
    // Three shapes per primitive, per the gradient-correctness property.
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for shape in [vec![5], vec![2, 7], vec![3, 2, 4]] {
        let n: usize = shape.iter().product();
        let xv = rand_vec(&mut rng, n);
        let yv = rand_vec(&mut rng, n);
        type BuildFn = fn(&mut Tape, TensorId, TensorId) -> TensorId;
        let builders: Vec<(&str, BuildFn)> = vec![
            ("add", |t, a, b| t.add(a, b).unwrap()),
            ("sub", |t, a, b| t.sub(a, b).unwrap()),
            ("mul", |t, a, b| t.mul(a, b).unwrap()),
            ("tanh", |t, a, _| t.tanh(a)),
            ("sigmoid", |t, a, _| t.sigmoid(a)),
            ("relu", |t, a, _| t.relu(a)),
            ("scale", |t, a, _| t.scale(a, -2.5)),
            ("powi", |t, a, _| t.powi(a, 3)),
        ];
        for (name, build) in builders {
            let forward = |inp: &[Vec<f64>]| -> f64 {
                let mut t = Tape::new();
                let a = t.leaf(&shape, inp[0].clone(), false).unwrap();
                let b = t.leaf(&shape, inp[1].clone(), false).unwrap();
                let y = build(&mut t, a, b);
                let s = t.sum(y);
                t.value(s)[0]
            };
            let numeric = central_diff(forward, &[xv.clone(), yv.clone()], 1e-6);
            let mut t = Tape::new();
            let a = t.leaf(&shape, xv.clone(), true).unwrap();
            let b = t.leaf(&shape, yv.clone(), true).unwrap();
            let y = build(&mut t, a, b);
            let s = t.sum(y);
            t.backward(s).unwrap();
            assert!(
                max_rel_err(t.grad(a).unwrap(), &numeric[0]) < 1e-6,
                "{name} input-a gradient mismatch on shape {shape:?}"
            );
            if let Some(gb) = t.grad(b) {
                assert!(max_rel_err(gb, &numeric[1]) < 1e-6, "{name} input-b gradient mismatch");
            }
        }
    }
}

#[test]
fn backward_of_sum_is_all_ones_and_accumulates() {
    let mut t = Tape::new();
    let x = t.leaf(&[4], vec![1.0, 2.0, 3.0, 4.0], true).unwrap();
    let s = t.sum(x);
    t.backward(s).unwrap();
    assert_eq!(t.grad(x).unwrap(), &[1.0; 4]);
    t.backward(s).unwrap();
    assert_eq!(t.grad(x).unwrap(), &[2.0; 4], "repeated backward accumulates");
}

#[test]
fn backward_of_sum_of_squares_is_analytic() {
    let mut t = Tape::new();
    let x = t.leaf(&[2], vec![1.0, -2.0], true).unwrap();
    let sq = t.mul(x, x).unwrap();
    let s = t.sum(sq);
    t.backward(s).unwrap();
    assert_eq!(t.grad(x).unwrap(), &[2.0, -4.0]);
}

#[test]
fn backward_rejects_non_scalar_loss() {
    let mut t = Tape::new();
    let x = t.leaf(&[2], vec![1.0, 2.0], true).unwrap();
    let y = t.scale(x, 2.0);
    assert!(matches!(t.backward(y), Err(crate::error::Error::Contract(_))));
}

#[test]
fn no_grad_leaf_never_accumulates() {
    let mut t = Tape::new();
    let x = t.leaf(&[3], vec![1.0, 2.0, 3.0], false).unwrap();
    let y = t.powi(x, 2);
    let s = t.sum(y);
    t.backward(s).unwrap();
    assert!(t.grad(x).is_none());
    assert!(t.grad(y).is_none());
}

#[test]
fn gradients_are_bit_identical_across_passes() {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let xv = rand_vec(&mut rng, 2 * 6 * 6);
    let kv = rand_vec(&mut rng, 2 * 2 * 3 * 3);
    let run = || -> Vec<f64> {
        let mut t = Tape::new();
        let x = t.leaf(&[2, 6, 6], xv.clone(), true).unwrap();
        let k = t.leaf(&[2, 2, 3, 3], kv.clone(), true).unwrap();
        let y = t.conv2d(x, k, None, 1, Padding::Circular { rows: 1, cols: 1 }).unwrap();
        let a = t.tanh(y);
        let sq = t.mul(a, a).unwrap();
        let s = t.sum(sq);
        t.backward(s).unwrap();
        let mut g = t.grad(x).unwrap().to_vec();
        g.extend_from_slice(t.grad(k).unwrap());
        g
    };
    let g1 = run();
    let g2 = run();
    assert!(g1.iter().zip(&g2).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn conv2d_circular_shift_equivariance() {
    let mut rng = ChaCha20Rng::seed_from_u64(21);
    let xv = rand_vec(&mut rng, 3 * 8 * 8);
    let kv = rand_vec(&mut rng, 2 * 3 * 3 * 3);
    let conv = |input: Vec<f64>| -> Vec<f64> {
        let mut t = Tape::new();
        let x = t.leaf(&[3, 8, 8], input, false).unwrap();
        let k = t.leaf(&[2, 3, 3, 3], kv.clone(), false).unwrap();
        let y = t.conv2d(x, k, None, 1, Padding::Circular { rows: 1, cols: 1 }).unwrap();
        t.value(y).to_vec()
    };
    let base = conv(xv.clone());
    for (s1, s2) in [(1usize, 0usize), (0, 3), (5, 2)] {
        let shifted_in = shift_chw(&xv, 3, 8, 8, s1, s2);
        let out = conv(shifted_in);
        let expect = shift_chw(&base, 2, 8, 8, s1, s2);
        let dev = out.iter().zip(&expect).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(dev < 1e-12, "shift ({s1},{s2}) deviation {dev}");
    }
}

fn shift_chw(data: &[f64], c: usize, h: usize, w: usize, si: usize, sj: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for ch in 0..c {
        for i in 0..h {
            for j in 0..w {
                out[(ch * h + (i + si) % h) * w + (j + sj) % w] = data[(ch * h + i) * w + j];
            }
        }
    }
    out
}

#[test]
fn weight_norm_identity_and_scale_invariance() {
    let mut rng = ChaCha20Rng::seed_from_u64(30);
    let v = rand_vec(&mut rng, 2 * 1 * 3 * 3);
    let norms: Vec<f64> = (0..2)
        .map(|o| v[o * 9..(o + 1) * 9].iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();

    // gain = ||v|| per channel reproduces the direction exactly
    let mut t = Tape::new();
    let vd = t.leaf(&[2, 1, 3, 3], v.clone(), false).unwrap();
    let g = t.leaf(&[2], norms.clone(), false).unwrap();
    let w = t.weight_norm(vd, g).unwrap();
    assert!(max_rel_err(t.value(w), &v) < 1e-14);

    // scaling the direction by 7 leaves the effective kernel unchanged
    let mut t2 = Tape::new();
    let v7: Vec<f64> = v.iter().map(|x| 7.0 * x).collect();
    let vd7 = t2.leaf(&[2, 1, 3, 3], v7, false).unwrap();
    let g2 = t2.leaf(&[2], norms, false).unwrap();
    let w7 = t2.weight_norm(vd7, g2).unwrap();
    let dev = t.value(w).iter().zip(t2.value(w7)).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(dev < 1e-13);
}

#[test]
fn weight_norm_gradients_match_finite_differences() {
    let mut rng = ChaCha20Rng::seed_from_u64(31);
    let v = rand_vec(&mut rng, 2 * 1 * 3 * 3);
    let g = vec![1.3, -0.4];
    let forward = |inp: &[Vec<f64>]| -> f64 {
        let mut t = Tape::new();
        let vd = t.leaf(&[2, 1, 3, 3], inp[0].clone(), false).unwrap();
        let gn = t.leaf(&[2], inp[1].clone(), false).unwrap();
        let w = t.weight_norm(vd, gn).unwrap();
        // weight the entries asymmetrically so the check is not fooled by symmetry
        let w3 = t.powi(w, 3);
        let s = t.sum(w3);
        t.value(s)[0]
    };
    let numeric = central_diff(forward, &[v.clone(), g.clone()], 1e-6);

    let mut t = Tape::new();
    let vd = t.leaf(&[2, 1, 3, 3], v, true).unwrap();
    let gn = t.leaf(&[2], g, true).unwrap();
    let w = t.weight_norm(vd, gn).unwrap();
    let w3 = t.powi(w, 3);
    let s = t.sum(w3);
    t.backward(s).unwrap();
    assert!(max_rel_err(t.grad(vd).unwrap(), &numeric[0]) < 1e-6);
    assert!(max_rel_err(t.grad(gn).unwrap(), &numeric[1]) < 1e-6);
}

#[test]
fn weight_norm_zero_direction_errors() {
    let mut t = Tape::new();
    let vd = t.leaf(&[1, 1, 2, 2], vec![0.0; 4], false).unwrap();
    let g = t.leaf(&[1], vec![1.0], false).unwrap();
    assert!(matches!(t.weight_norm(vd, g), Err(crate::error::Error::Numeric(_))));
}

#[test]
fn concat_narrow_roundtrip_and_gradients() {
    let mut t = Tape::new();
    let a = t.leaf(&[1, 2, 2], vec![1.0, 2.0, 3.0, 4.0], true).unwrap();
    let b = t.leaf(&[2, 2, 2], (5..=12).map(f64::from).collect(), true).unwrap();
    let c = t.concat0(&[a, b]).unwrap();
    assert_eq!(t.shape(c), &[3, 2, 2]);
    let back = t.narrow0(c, 1, 2).unwrap();
    assert_eq!(t.value(back), t.value(b));

    let sq = t.mul(back, back).unwrap();
    let s = t.sum(sq);
    t.backward(s).unwrap();
    let gb: Vec<f64> = t.value(b).iter().map(|x| 2.0 * x).collect();
    assert!(max_rel_err(t.grad(b).unwrap(), &gb) < 1e-12);
    assert_eq!(t.grad(a).unwrap(), &[0.0; 4], "untouched slice gets zero gradient");
}

#[test]
fn shape_mismatch_reports_dimension_error() {
    let mut t = Tape::new();
    let a = t.leaf(&[2, 2], vec![0.0; 4], false).unwrap();
    let b = t.leaf(&[4], vec![0.0; 4], false).unwrap();
    assert!(matches!(t.add(a, b), Err(crate::error::Error::Dimension(_))));
}

#[test]
fn conv_stride_zero_is_config_error() {
    let mut t = Tape::new();
    let x = t.leaf(&[1, 4, 4], vec![0.0; 16], false).unwrap();
    let k = t.leaf(&[1, 1, 3, 3], vec![0.0; 9], false).unwrap();
    assert!(matches!(t.conv2d(x, k, None, 0, Padding::None), Err(crate::error::Error::Config(_))));
}

mod adam_tests {
    use super::*;

    #[test]
    fn first_step_moves_by_lr_against_gradient_sign() {
        let lr = 0.01;
        let mut params = vec![vec![1.0, -2.0, 0.5]];
        let grads = vec![vec![3.0, -0.7, 0.0001]];
        let mut state = AdamState::new(&[3]);
        adam_step(&mut params, &grads, &mut state, lr).unwrap();
        for (p0, (p, g)) in [1.0, -2.0, 0.5].iter().zip(params[0].iter().zip(&grads[0])) {
            let update = p - p0;
            assert!(update.signum() == -g.signum());
            assert!(update.abs() <= lr && update.abs() >= lr * (1.0 - 1e-6), "|update| = {}", update.abs());
        }
        assert_eq!(state.step, 1);
    }

    #[test]
    fn zero_gradient_is_a_noop() {
        let mut params = vec![vec![0.3, -0.1]];
        let grads = vec![vec![0.0, 0.0]];
        let mut state = AdamState::new(&[2]);
        adam_step(&mut params, &grads, &mut state, 0.1).unwrap();
        assert_eq!(params[0], vec![0.3, -0.1]);
        assert!(state.m[0].iter().all(|&x| x == 0.0));
        assert!(state.v[0].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn nan_gradient_aborts_without_touching_state() {
        let mut params = vec![vec![1.0]];
        let grads = vec![vec![f64::NAN]];
        let mut state = AdamState::new(&[1]);
        let before = state.clone();
        assert!(matches!(
            adam_step(&mut params, &grads, &mut state, 0.1),
            Err(crate::error::Error::Numeric(_))
        ));
        assert_eq!(params[0], vec![1.0]);
        assert_eq!(state, before);
    }

    /// Independent scalar Adam, coded directly from the update equations.
    fn scalar_adam_reference(mut w: f64, lr: f64, steps: usize) -> Vec<f64> {
        let (b1, b2, eps) = (0.9, 0.999, 1e-8);
        let (mut m, mut v) = (0.0, 0.0);
        let mut path = Vec::with_capacity(steps);
        for t in 1..=steps {
            let g = 2.0 * w; // d/dw w^2
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let mh = m / (1.0 - b1.powi(t as i32));
            let vh = v / (1.0 - b2.powi(t as i32));
            w -= lr * mh / (vh.sqrt() + eps);
            path.push(w);
        }
        path
    }

    #[test]
    fn quadratic_descent_matches_scalar_reference() {
        let reference = scalar_adam_reference(1.0, 0.1, 100);
        let mut params = vec![vec![1.0]];
        let mut state = AdamState::new(&[1]);
        let mut path = Vec::new();
        for _ in 0..100 {
            let grads = vec![vec![2.0 * params[0][0]]];
            adam_step(&mut params, &grads, &mut state, 0.1).unwrap();
            path.push(params[0][0]);
        }
        assert!(params[0][0].abs() < 0.5);
        for (a, b) in path.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
