//! Random instances for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::complex::{Cells, SimplicialComplex, StratifiedComplex};
use crate::exit::ExitPresentation;
use crate::poset::{MonotoneMap, Poset};
use crate::rep::{count::first_rep_in_order, Representation};

/// A complex on `1..=max_vertices` vertices named `v0, v1, …` built from a
/// few random facets of dimension at most `max_dim`.
pub fn random_complex<R: Rng>(rng: &mut R, max_vertices: usize, max_dim: usize, max_facets: usize) -> SimplicialComplex {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let k = rng.gen_range(1..=max_facets.max(1));
    let mut facets: Vec<Vec<String>> = Vec::new();
    for _ in 0..k {
        let size = rng.gen_range(1..=(max_dim + 1).min(n));
        let mut pick = names.clone();
        pick.shuffle(rng);
        pick.truncate(size);
        facets.push(pick);
    }
    SimplicialComplex::from_facets(names, facets).expect("generated facets use known vertices")
}

/// A random linear extension of `p`, cut into `blocks` consecutive nonempty
/// pieces; the block index is a monotone surjection onto a chain.
pub fn random_chain_quotient<R: Rng>(rng: &mut R, p: &Poset, blocks: usize, prefix: &str) -> MonotoneMap {
    let n = p.len();
    let blocks = blocks.clamp(1, n.max(1));
    let mut indeg: Vec<usize> = (0..n).map(|i| p.covered_by(i).len()).collect();
    let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while !ready.is_empty() {
        let k = rng.gen_range(0..ready.len());
        let v = ready.swap_remove(k);
        order.push(v);
        for &w in p.covers_of(v) {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(w);
            }
        }
    }
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    cuts.truncate(blocks - 1);
    cuts.sort_unstable();
    let mut block_of = vec![0; n];
    let mut b = 0;
    for (pos, &v) in order.iter().enumerate() {
        if b < cuts.len() && pos == cuts[b] {
            b += 1;
        }
        block_of[v] = b;
    }
    let chain = Poset::new(
        (0..blocks).map(|i| format!("{prefix}{i}")),
        (1..blocks).map(|i| (format!("{prefix}{}", i - 1), format!("{prefix}{i}"))),
    )
    .expect("chains are posets");
    // element order is by name, so `c10` may precede `c2`: assign by name
    let pairs = (0..n).map(|v| (p.name(v).to_owned(), format!("{prefix}{}", block_of[v])));
    MonotoneMap::from_names(p.clone(), chain, pairs).expect("linear extension blocks are monotone")
}

/// Either the identity stratification or a chain quotient of the face poset.
pub fn random_stratification<R: Rng>(rng: &mut R, complex: &SimplicialComplex) -> StratifiedComplex {
    let cells = Cells::Simplicial(complex.clone());
    if rng.gen_bool(0.25) {
        return StratifiedComplex::identity(cells);
    }
    let faces = complex.face_poset();
    let blocks = rng.gen_range(1..=faces.len().min(5));
    let phi = random_chain_quotient(rng, &faces, blocks, "s");
    StratifiedComplex::with_map(cells, phi).expect("chain quotients are surjective")
}

/// A random coarsening of the base of `pres`.
pub fn random_coarsening<R: Rng>(rng: &mut R, pres: &ExitPresentation) -> MonotoneMap {
    let base = pres.base();
    let blocks = rng.gen_range(1..=base.len());
    random_chain_quotient(rng, base, blocks, "c")
}

/// A random poset on `n` elements named `e0, e1, …`; each pair `i < j` of a
/// random ordering is related with probability `density`.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, density: f64) -> Poset {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges.push((names[perm[i]].clone(), names[perm[j]].clone()));
            }
        }
    }
    Poset::new(names.clone(), edges).expect("edges follow a fixed order")
}

/// A random shape with a random chain quotient (or the identity).
pub fn random_presentation<R: Rng>(rng: &mut R, max_elements: usize) -> ExitPresentation {
    let n = rng.gen_range(1..=max_elements.max(1));
    let shape = random_poset(rng, n, 0.45);
    if rng.gen_bool(0.2) {
        return ExitPresentation::unmarked(&shape);
    }
    let blocks = rng.gen_range(1..=n);
    ExitPresentation::new(random_chain_quotient(rng, &shape, blocks, "p")).expect("chain quotients are surjective")
}

/// A random functor on the shape of `pres` over `F_q` with dimensions at most
/// `max_dim`, ignoring the marks.
pub fn random_representation<R: Rng>(rng: &mut R, pres: &ExitPresentation, q: u64, max_dim: usize) -> Representation {
    let dims: Vec<usize> = (0..pres.shape().len()).map(|_| rng.gen_range(0..=max_dim)).collect();
    let unmarked = ExitPresentation::unmarked(pres.shape());
    let rep = first_rep_in_order(&unmarked, &dims, q, &mut |n| {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        order
    })
    .expect("q is prime")
    .expect("the zero maps always form a functor");
    rep.with_presentation(pres).expect("same shape")
}

/// A random functor that inverts every mark: equal dimensions along marks
/// and a search restricted to invertible matrices there.
pub fn random_constructible<R: Rng>(rng: &mut R, pres: &ExitPresentation, q: u64, max_dim: usize) -> Representation {
    let shape = pres.shape();
    let mut comp: Vec<usize> = (0..shape.len()).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        if c[x] != x {
            c[x] = find(c, c[x]);
        }
        c[x]
    }
    for (a, b) in pres.marks() {
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        comp[ra] = rb;
    }
    let per_root: Vec<usize> = (0..shape.len()).map(|_| rng.gen_range(0..=max_dim)).collect();
    let dims: Vec<usize> = (0..shape.len()).map(|x| per_root[find(&mut comp, x)]).collect();
    first_rep_in_order(pres, &dims, q, &mut |n| {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        order
    })
    .expect("q is prime")
    .expect("identity-like functors exist when dimensions agree along marks")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn chain_quotients_with_many_blocks_are_monotone() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(0);
        let p = Poset::chain(14);
        for _ in 0..20 {
            let f = random_chain_quotient(&mut rng, &p, 15, "c");
            assert!(f.is_surjective());
            for (a, b) in p.strict_relations() {
                assert!(f.target().leq(f.apply(a), f.apply(b)));
            }
        }
    }
}
