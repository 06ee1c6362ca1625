use exodromy::homlin::{smith_normal_form, Coefficients, Field, FieldMatrix, IntMatrix, VectorDiagram};
use exodromy::random::{random_complex, random_poset, random_representation};
use exodromy::ExitPresentation;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn int_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-6i64..=6, c), r))
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    if m.is_empty() {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for (j, x) in m[0].iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = x * det(&minor);
        total = if j % 2 == 0 { total + term } else { total - term };
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

/// gcd of all k×k minors.
fn determinantal_divisor(m: &[Vec<i64>], k: usize) -> BigInt {
    let (r, c) = (m.len(), m[0].len());
    let mut g = BigInt::zero();
    for rows in subsets(r, k) {
        for cols in subsets(c, k) {
            let minor: Vec<Vec<BigInt>> = rows.iter().map(|&i| cols.iter().map(|&j| BigInt::from(m[i][j])).collect()).collect();
            g = g.gcd(&det(&minor));
        }
    }
    g
}

fn as_rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].clone()).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(rows in int_matrix()) {
        let m = IntMatrix::from_rows(&rows).unwrap();
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
        prop_assert!(det(&as_rows(&s.u)).abs().is_one());
        prop_assert!(det(&as_rows(&s.v)).abs().is_one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                let expected = if i == j && i < s.rank() { s.invariants[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(&s.d[(i, j)], &expected);
            }
        }
        for w in s.invariants.windows(2) {
            prop_assert!(w[0].is_positive() && (&w[1] % &w[0]).is_zero());
        }
        // d₁⋯d_k is the gcd of the k×k minors
        let mut prod = BigInt::one();
        for k in 1..=rows.len().min(rows[0].len()) {
            let expected = determinantal_divisor(&rows, k);
            if k <= s.rank() {
                prod *= &s.invariants[k - 1];
                prop_assert_eq!(&prod, &expected);
            } else {
                prop_assert!(expected.is_zero());
            }
        }
    }

    #[test]
    fn universal_coefficients(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let k = random_complex(&mut r, 7, 3, 5);
        let z = k.homology(Coefficients::Integers);
        for p in [2u64, 3, 5] {
            let hp = k.homology(Coefficients::Field(Field::Prime(p)));
            let top = z.degrees.len() + 1;
            for n in 0..top {
                let tor = |g: &exodromy::homlin::HomologyGroup| {
                    g.torsion.iter().filter(|t| (*t % p).is_zero()).count()
                };
                let expected = z.degree(n).rank
                    + tor(&z.degree(n))
                    + if n > 0 { tor(&z.degree(n - 1)) } else { 0 };
                prop_assert_eq!(hp.degree(n).rank, expected, "degree {} over F{}", n, p);
            }
        }
        let euler_faces: i64 = k.count_by_dim().iter().enumerate().map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) }).sum();
        let euler_betti: i64 = z.betti().iter().enumerate().map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        prop_assert_eq!(euler_faces, euler_betti);
    }

    #[test]
    fn limits_and_colimits_over_f2_match_enumeration(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + (seed % 4) as usize;
        let shape = random_poset(&mut r, n, 0.5);
        let rep = random_representation(&mut r, &ExitPresentation::unmarked(&shape), 2, 2);
        let field = Field::Prime(2);
        let edges: Vec<(usize, usize, FieldMatrix)> = shape
            .hasse()
            .iter()
            .zip(rep.edge_matrices())
            .map(|(&(s, t), m)| (s, t, m.clone()))
            .collect();
        let diagram = VectorDiagram { field, dims: rep.dims().to_vec(), edges: edges.clone() };
        let dims = rep.dims();
        let total: usize = dims.iter().sum();
        let mut offsets = vec![0];
        for d in dims {
            offsets.push(offsets.last().unwrap() + d);
        }
        let bits = |code: u32, u: usize| -> FieldMatrix {
            let data = (0..dims[u]).map(|i| field.from_i64(i64::from(code >> (offsets[u] + i) & 1))).collect();
            FieldMatrix::from_entries(field, dims[u], 1, data)
        };
        let limit = diagram.limit().unwrap();
        let colimit = diagram.colimit().unwrap();
        let mut cones = 0u32;
        let mut cocones = 0u32;
        for code in 0u32..(1 << total) {
            let legs: Vec<FieldMatrix> = (0..n).map(|u| bits(code, u)).collect();
            if edges.iter().all(|(s, t, m)| m.mul(&legs[*s]) == legs[*t]) {
                cones += 1;
                let x = limit.factor(field, &legs).expect("compatible cones factor");
                for u in 0..n {
                    prop_assert_eq!(&limit.projections[u].mul(&x), &legs[u]);
                }
            }
            let co: Vec<FieldMatrix> = legs.iter().map(FieldMatrix::transpose).collect();
            if edges.iter().all(|(s, t, m)| co[*t].mul(m) == co[*s]) {
                cocones += 1;
                let y = colimit.factor(field, &co).expect("compatible cocones factor");
                for u in 0..n {
                    prop_assert_eq!(&y.mul(&colimit.injections[u]), &co[u]);
                }
            }
        }
        prop_assert_eq!(cones, 1 << limit.dim);
        prop_assert_eq!(cocones, 1 << colimit.dim);
    }
}
