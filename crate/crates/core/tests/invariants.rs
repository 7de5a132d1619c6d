use std::f64::consts::PI;

use dfsforge::collective::{apply_stabilizer, dfs_basis};
use dfsforge::encoding::{encode, LogicalFrame};
use dfsforge::ftmeas::{binomial_tail, exact_vote_distribution, majority_vote};
use dfsforge::gates::{
    compile_single_qubit, euler_synthesize, gate_fidelity, lie_product, logical_action, trotter_sum, ExchangePair,
    PulseSchedule,
};
use dfsforge::hilbert::fidelity;
use dfsforge::linalg::{hermitian_expm, ComplexMatrix, HermitianMatrix, C64};
use dfsforge::noise::apply_collective;
use proptest::prelude::*;

fn hermitian(entries: &[f64], n: usize) -> HermitianMatrix {
    let mut m = vec![C64::new(0.0, 0.0); n * n];
    let mut it = entries.iter().copied();
    for r in 0..n {
        m[r * n + r] = C64::new(it.next().unwrap(), 0.0);
        for c in r + 1..n {
            let z = C64::new(it.next().unwrap(), it.next().unwrap());
            m[r * n + c] = z;
            m[c * n + r] = z.conj();
        }
    }
    HermitianMatrix::new(ComplexMatrix::from_row_major(n, n, m).unwrap()).unwrap()
}

fn qubit_unitary(g: &[f64]) -> ComplexMatrix {
    hermitian_expm(&hermitian(g, 2), 1.0).unwrap()
}

fn amplitudes(re_im: &[f64]) -> Vec<C64> {
    let v: Vec<C64> = re_im.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn pulses(n: usize) -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    prop::collection::vec((1..=n, 1..=n, -10.0f64..10.0), 0..12)
        .prop_map(|v| v.into_iter().filter(|(i, j, _)| i != j).collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn schedule_json_roundtrip(n in 2usize..=12, ps in pulses(12)) {
        let mut s = PulseSchedule::new(n).unwrap();
        for (i, j, angle) in ps.into_iter().filter(|(i, j, _)| *i <= n && *j <= n) {
            s.push(ExchangePair::new(i, j).unwrap(), angle).unwrap();
        }
        let back = PulseSchedule::from_json(&s.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn exchange_schedules_are_unitary_and_stay_in_dfs(ps in pulses(4), re_im in prop::collection::vec(-1.0f64..1.0, 4)) {
        let mut s = PulseSchedule::new(4).unwrap();
        for (i, j, angle) in ps {
            s.push(ExchangePair::new(i, j).unwrap(), angle).unwrap();
        }
        let u = s.unitary().unwrap();
        prop_assert!(u.unitarity_residual() < 1e-12);
        prop_assume!(re_im.iter().any(|x| x.abs() > 1e-3));
        let frame = LogicalFrame::new(1).unwrap();
        let psi = encode(&amplitudes(&re_im), 1).unwrap();
        prop_assert!(frame.leakage(s.apply(&psi).unwrap().amplitudes()) < 1e-12);
        for mid in s.interior_states(&psi, 3).unwrap() {
            prop_assert!(frame.leakage(mid.amplitudes()) < 1e-12);
        }
    }

    #[test]
    fn trotter_outputs_are_unitary(a in prop::collection::vec(-1.0f64..1.0, 16), b in prop::collection::vec(-1.0f64..1.0, 16),
                                   alpha in -2.0f64..2.0, beta in -2.0f64..2.0, n in 1usize..40) {
        let (a, b) = (hermitian(&a, 4), hermitian(&b, 4));
        prop_assert!(trotter_sum(&a, &b, alpha, beta, n).unwrap().unitarity_residual() < 1e-10);
        prop_assert!(lie_product(&a, &b, n).unwrap().unitarity_residual() < 1e-10);
    }

    #[test]
    fn collective_rotations_fix_encoded_states(v in prop::array::uniform3(-3.0f64..3.0), re_im in prop::collection::vec(-1.0f64..1.0, 4)) {
        prop_assume!(re_im.iter().any(|x| x.abs() > 1e-3));
        let psi = encode(&amplitudes(&re_im), 1).unwrap();
        let out = apply_collective(&psi, v, 4).unwrap();
        prop_assert!(1.0 - fidelity(&psi, &out).unwrap() < 1e-12);
        prop_assert!(out.distance(&psi) < 1e-12);
    }

    #[test]
    fn stabilizer_fixes_eight_qubit_dfs(v in prop::array::uniform3(-3.0f64..3.0), seed in any::<u64>()) {
        use rand::SeedableRng;
        let basis = dfs_basis(8).unwrap();
        let psi = basis.random_state(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(apply_stabilizer(&psi, v).unwrap().distance(&psi) < 1e-11);
    }

    #[test]
    fn euler_and_exchange_compilation_reach_any_gate(g in prop::collection::vec(-4.0f64..4.0, 4)) {
        let target = qubit_unitary(&g);
        let frame = LogicalFrame::new(1).unwrap();
        let euler = euler_synthesize(&target).unwrap();
        let euler_act = logical_action(&euler.unitary().unwrap(), &frame).unwrap();
        prop_assert!(1.0 - gate_fidelity(&euler_act.matrix, &target) < 1e-10);
        let sched = compile_single_qubit(&target, 0, 4).unwrap();
        let act = logical_action(&sched.unitary().unwrap(), &frame).unwrap();
        prop_assert!(1.0 - gate_fidelity(&act.matrix, &target) < 1e-10);
        prop_assert!(act.residual_leakage < 1e-12);
        prop_assert!(sched.pulses().iter().all(|p| p.pair.i() <= 3 && p.pair.j() <= 3));
    }

    #[test]
    fn gate_fidelity_is_bounded_and_symmetric(g in prop::collection::vec(-4.0f64..4.0, 4), h in prop::collection::vec(-4.0f64..4.0, 4), phase in -PI..PI) {
        let (a, b) = (qubit_unitary(&g), qubit_unitary(&h));
        let f = gate_fidelity(&a, &b);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - gate_fidelity(&b, &a)).abs() < 1e-12);
        prop_assert!((gate_fidelity(&a, &a.scale(C64::from_polar(1.0, phase))) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn majority_vote_counts(bits in prop::collection::vec(0u8..=1, 0..16)) {
        if bits.len() % 2 == 0 {
            prop_assert!(majority_vote(&bits).is_err());
        } else {
            let ones = bits.iter().filter(|&&b| b == 1).count();
            prop_assert_eq!(majority_vote(&bits).unwrap(), u8::from(ones > bits.len() / 2));
        }
    }

    #[test]
    fn exact_vote_distribution_is_the_binomial_tail(p in 0.0f64..0.49, r in prop::sample::select(vec![1usize, 3, 5, 7])) {
        let zero = exact_vote_distribution(&dfsforge::encoding::logical_zero(), r, p).unwrap();
        let one = exact_vote_distribution(&dfsforge::encoding::logical_one(), r, p).unwrap();
        let tail: f64 = (r / 2 + 1..=r)
            .map(|k| {
                let c = (0..k).fold(1.0, |acc, i| acc * (r - i) as f64 / (i + 1) as f64);
                c * p.powi(k as i32) * (1.0 - p).powi((r - k) as i32)
            })
            .sum();
        prop_assert!((zero[1] - tail).abs() < 1e-12);
        prop_assert!((one[0] - tail).abs() < 1e-12);
        prop_assert!((binomial_tail(r, p) - tail).abs() < 1e-12);
        prop_assert!((zero[0] + zero[1] - 1.0).abs() < 1e-12);
    }
}
