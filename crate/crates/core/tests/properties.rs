use lattice_dgs::combine::parity_label;
use lattice_dgs::lattice::linalg::{int_det, rat};
use lattice_dgs::lattice::{dual_basis, reduce_basis, Basis, Quotient, Rational, ReductionProfile};
use lattice_dgs::oracle::coset_weights;
use lattice_dgs::reductions::{grid_covers, svp_grid};
use lattice_dgs::resample::{square_sample, ElementStream};
use lattice_dgs::ProbVector;
use num::{BigInt, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn square_int_matrix(max_d: usize, range: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_d).prop_flat_map(move |d| prop::collection::vec(prop::collection::vec(-range..=range, d), d))
}

fn nonsingular(rows: &[Vec<i64>]) -> bool {
    let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    !int_det(&big).is_zero()
}

fn full_rank_basis(max_d: usize) -> impl Strategy<Value = Basis> {
    square_int_matrix(max_d, 5)
        .prop_filter("singular", |m| nonsingular(m))
        .prop_map(|m| Basis::from_integer_rows(&m).unwrap())
}

fn basis_with_sublattice(max_d: usize) -> impl Strategy<Value = (Basis, Basis, Vec<Vec<i64>>)> {
    (1..=max_d).prop_flat_map(|d| {
        let m = prop::collection::vec(prop::collection::vec(-4i64..=4, d), d).prop_filter("singular", |m| nonsingular(m));
        let t = prop::collection::vec(prop::collection::vec(-3i64..=3, d), d).prop_filter("singular", |m| nonsingular(m));
        (m, t).prop_map(|(m, t)| {
            let l = Basis::from_integer_rows(&m).unwrap();
            let rows: Vec<Vec<i64>> = t
                .iter()
                .map(|tr| (0..m.len()).map(|j| tr.iter().zip(&m).map(|(a, r)| a * r[j]).sum()).collect())
                .collect();
            (l, Basis::from_integer_rows(&rows).unwrap(), t)
        })
    })
}

proptest! {
    #[test]
    fn probability_vectors_are_normalized(w in prop::collection::vec(0.0f64..10.0, 1..12)) {
        prop_assume!(w.iter().sum::<f64>() > 1e-6);
        let p = ProbVector::from_weights(&w).unwrap();
        for q in [&p, &p.squared(), &p.sqrt()] {
            prop_assert!((q.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(q.max_ratio() >= 1.0);
        }
        let back = p.sqrt().squared();
        for (a, b) in back.probs.iter().zip(&p.probs) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_of_dual_is_the_basis(b in full_rank_basis(3)) {
        let dd = dual_basis(&dual_basis(&b));
        prop_assert_eq!(&dd, &b);
        let dual = dual_basis(&b);
        for (i, bi) in b.rows().iter().enumerate() {
            for (j, dj) in dual.rows().iter().enumerate() {
                let ip: Rational = bi.iter().zip(dj).map(|(x, y)| x * y).sum();
                prop_assert_eq!(ip, rat(i64::from(i == j)));
            }
        }
    }

    #[test]
    fn reduction_is_unimodular(b in full_rank_basis(4)) {
        for profile in [ReductionProfile::Lll, ReductionProfile::Exact] {
            let red = reduce_basis(&b, profile);
            prop_assert_eq!(int_det(&red.transform).abs(), BigInt::from(1));
            prop_assert!(red.basis.same_lattice(&b));
            for (row, t) in red.basis.rows().iter().zip(&red.transform) {
                let coeffs: Vec<i64> = t.iter().map(|x| x.try_into().unwrap()).collect();
                prop_assert_eq!(&b.ambient(&coeffs), row);
            }
        }
    }

    #[test]
    fn coset_labels_respect_the_sublattice(
        (l, lsub, t) in basis_with_sublattice(3),
        c in prop::collection::vec(-20i64..=20, 3),
        z in prop::collection::vec(-5i64..=5, 3),
    ) {
        let d = l.rank();
        let (c, z) = (&c[..d], &z[..d]);
        let q = Quotient::new(&l, &lsub).unwrap();
        let det: i64 = int_det(&t.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect::<Vec<_>>())
            .abs()
            .try_into()
            .unwrap();
        prop_assert_eq!(q.index(), det as u64);
        let shift = q.from_sub_coords(z);
        prop_assert_eq!(q.to_sub_coords(&shift), Some(z.to_vec()));
        let moved: Vec<i64> = c.iter().zip(&shift).map(|(a, b)| a + b).collect();
        prop_assert_eq!(q.label_index(&moved), q.label_index(c));
        let idx = q.label_index(c);
        prop_assert!(idx < q.index() as usize);
        prop_assert_eq!(q.encode(&q.decode(idx)), idx);
        prop_assert_eq!(q.to_sub_coords(c).is_some(), q.label_index(c) == q.label_index(&vec![0; d]));
    }

    #[test]
    fn text_form_round_trips(
        rows in square_int_matrix(4, 50),
        num in 1i64..=9,
        den in 1i64..=9,
    ) {
        prop_assume!(nonsingular(&rows));
        let b = Basis::from_integer_rows(&rows).unwrap().scaled(&Rational::new(num.into(), den.into()));
        let text = b.to_text();
        prop_assert_eq!(&Basis::parse(&text).unwrap(), &b);
        prop_assert_eq!(Basis::parse(&text).unwrap().to_text(), text);
    }

    #[test]
    fn parity_label_depends_only_on_parity(
        c in prop::collection::vec(-1000i64..=1000, 1..6),
        z in prop::collection::vec(-1000i64..=1000, 6),
    ) {
        let shifted: Vec<i64> = c.iter().zip(&z).map(|(a, b)| a + 2 * b).collect();
        prop_assert_eq!(parity_label(&c), parity_label(&shifted));
        prop_assert!(parity_label(&c) < 1 << c.len());
        let odd: Vec<i64> = c.iter().map(|x| x.rem_euclid(2)).collect();
        prop_assert_eq!(parity_label(&c), parity_label(&odd));
    }

    #[test]
    fn svp_grid_descends_and_covers(d in 0.5f64..50.0, n in 1usize..=12, u in 0.0f64..1.0) {
        let g = svp_grid(d, n);
        prop_assert!(g.windows(2).all(|w| w[1] < w[0]));
        prop_assert!(g.contains(&d));
        let (lo, hi) = (*g.last().unwrap(), g[0]);
        let target = lo * (hi / lo).powf(u);
        prop_assert!(grid_covers(d, n, target));
        prop_assert!(!grid_covers(d, n, hi * 1.03));
    }

    #[test]
    fn stream_reads_are_contiguous(
        items in prop::collection::vec(0usize..5, 0..100),
        takes in prop::collection::vec(0usize..40, 0..10),
    ) {
        let mut s = ElementStream::new(&items, 5);
        let mut pos = 0;
        for r in takes {
            match s.take(r) {
                Some(chunk) => {
                    prop_assert_eq!(chunk, &items[pos..pos + r]);
                    pos += r;
                }
                None => prop_assert!(pos + r > items.len()),
            }
            prop_assert_eq!(s.cursor(), pos);
            prop_assert_eq!(s.remaining(), items.len() - pos);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coset_masses_add_up(
        (l, lsub, _) in basis_with_sublattice(2),
        s in 0.5f64..3.0,
    ) {
        let shortest = l.rows_f64().iter().map(|r| r.iter().map(|x| x * x).sum::<f64>()).fold(f64::INFINITY, f64::min);
        prop_assume!(s * s < 50.0 * shortest);
        match coset_weights(&l, &lsub, s) {
            Ok(w) => {
                prop_assert_eq!(w.masses.len() as u64, w.quotient.index());
                prop_assert!((w.masses.iter().sum::<f64>() - w.total).abs() <= 1e-12 * w.total);
                let zero = w.quotient.label_index(&vec![0; l.rank()]);
                prop_assert!(w.weights.probs[zero] >= w.weights.p_max * (1.0 - 1e-9));
            }
            Err(e) => prop_assert!(matches!(e, lattice_dgs::Error::IndexTooLarge { .. }), "{e:?}"),
        }
    }

    #[test]
    fn squaring_spends_two_inputs_per_output(
        w in prop::collection::vec(1.0f64..4.0, 1..5),
        seed in any::<u64>(),
    ) {
        let p = ProbVector::from_weights(&w).unwrap();
        let mut r = ChaCha20Rng::seed_from_u64(seed);
        let items = p.sampler().stream(20_000, &mut r);
        if let Ok(out) = square_sample(30.0, &items, w.len(), &mut r) {
            for i in 0..w.len() {
                let inp = items.iter().filter(|&&x| x == i).count();
                let o = out.items.iter().filter(|&&x| x == i).count();
                prop_assert!(2 * o <= inp, "{} outputs from {} inputs", o, inp);
            }
            prop_assert!(out.items.len() <= items.len() / 6);
        }
    }
}

#[test]
fn scaled_grid_endpoints() {
    let g = svp_grid(1.0, 4);
    assert!((g.last().unwrap() - 1.01f64.powi(-400)).abs() < 1e-15);
}
