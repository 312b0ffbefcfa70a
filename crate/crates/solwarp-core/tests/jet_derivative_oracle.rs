//! Independent check of the jet arithmetic: random expression trees up to
//! depth 6 are evaluated both as jets and as plain f64 compositions; the
//! jet gradient and Hessian must agree with central finite differences of
//! the plain values.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solwarp_core::jets::Jet2;

/// Expression tree with a plain-f64 evaluator, structurally independent
/// of the jet propagation it checks.
#[derive(Clone, Debug)]
enum Node {
    Var(usize),
    Const(f64),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Exp(Box<Node>),
    Log(Box<Node>),
    Sqrt(Box<Node>),
    Sin(Box<Node>),
    Cos(Box<Node>),
    Powi(Box<Node>, i32),
}

impl Node {
    fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            Node::Var(i) => x[*i],
            Node::Const(c) => *c,
            Node::Add(a, b) => a.eval_f64(x) + b.eval_f64(x),
            Node::Sub(a, b) => a.eval_f64(x) - b.eval_f64(x),
            Node::Mul(a, b) => a.eval_f64(x) * b.eval_f64(x),
            Node::Div(a, b) => a.eval_f64(x) / b.eval_f64(x),
            Node::Exp(a) => a.eval_f64(x).exp(),
            Node::Log(a) => a.eval_f64(x).ln(),
            Node::Sqrt(a) => a.eval_f64(x).sqrt(),
            Node::Sin(a) => a.eval_f64(x).sin(),
            Node::Cos(a) => a.eval_f64(x).cos(),
            Node::Powi(a, k) => a.eval_f64(x).powi(*k),
        }
    }

    fn eval_jet(&self, seeds: &[Jet2]) -> Jet2 {
        match self {
            Node::Var(i) => seeds[*i],
            Node::Const(c) => Jet2::constant(*c, seeds[0].dim()),
            Node::Add(a, b) => a.eval_jet(seeds) + b.eval_jet(seeds),
            Node::Sub(a, b) => a.eval_jet(seeds) - b.eval_jet(seeds),
            Node::Mul(a, b) => a.eval_jet(seeds) * b.eval_jet(seeds),
            Node::Div(a, b) => a.eval_jet(seeds) / b.eval_jet(seeds),
            Node::Exp(a) => a.eval_jet(seeds).exp(),
            Node::Log(a) => a.eval_jet(seeds).log(),
            Node::Sqrt(a) => a.eval_jet(seeds).sqrt(),
            Node::Sin(a) => a.eval_jet(seeds).sin(),
            Node::Cos(a) => a.eval_jet(seeds).cos(),
            Node::Powi(a, k) => a.eval_jet(seeds).powi(*k),
        }
    }
}

/// Random tree whose every subexpression stays in safe domains: log and
/// sqrt see arguments in [1, 2], divisors stay in [1.5, 2.5].
fn random_tree(rng: &mut ChaCha8Rng, dim: usize, depth: usize) -> Node {
    if depth == 0 {
        return if rng.random_range(0..4) == 0 {
            Node::Const(rng.random_range(-2.0..2.0))
        } else {
            Node::Var(rng.random_range(0..dim))
        };
    }
    let bounded = |n: Node| {
        Node::Add(
            Box::new(Node::Const(1.5)),
            Box::new(Node::Mul(
                Box::new(Node::Const(0.5)),
                Box::new(Node::Sin(Box::new(n))),
            )),
        )
    };
    match rng.random_range(0..10) {
        0 => Node::Add(
            Box::new(random_tree(rng, dim, depth - 1)),
            Box::new(random_tree(rng, dim, depth - 1)),
        ),
        1 => Node::Sub(
            Box::new(random_tree(rng, dim, depth - 1)),
            Box::new(random_tree(rng, dim, depth - 1)),
        ),
        2 => Node::Mul(
            Box::new(random_tree(rng, dim, depth - 1)),
            Box::new(random_tree(rng, dim, depth - 1)),
        ),
        3 => Node::Div(
            Box::new(random_tree(rng, dim, depth - 1)),
            Box::new(bounded(random_tree(rng, dim, depth - 1))),
        ),
        4 => Node::Exp(Box::new(Node::Mul(
            Box::new(Node::Const(0.5)),
            Box::new(Node::Sin(Box::new(random_tree(rng, dim, depth - 1)))),
        ))),
        5 => Node::Log(Box::new(bounded(random_tree(rng, dim, depth - 1)))),
        6 => Node::Sqrt(Box::new(bounded(random_tree(rng, dim, depth - 1)))),
        7 => Node::Sin(Box::new(random_tree(rng, dim, depth - 1))),
        8 => Node::Cos(Box::new(random_tree(rng, dim, depth - 1))),
        _ => Node::Powi(
            Box::new(Node::Sin(Box::new(random_tree(rng, dim, depth - 1)))),
            rng.random_range(2..4),
        ),
    }
}

fn fd_gradient(tree: &Node, x: &[f64], i: usize) -> f64 {
    const H: f64 = 1e-4;
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[i] += H;
    xm[i] -= H;
    (tree.eval_f64(&xp) - tree.eval_f64(&xm)) / (2.0 * H)
}

fn fd_hessian(tree: &Node, x: &[f64], i: usize, j: usize) -> f64 {
    const H: f64 = 1e-3;
    if i == j {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += H;
        xm[i] -= H;
        (tree.eval_f64(&xp) - 2.0 * tree.eval_f64(x) + tree.eval_f64(&xm)) / (H * H)
    } else {
        let mut pp = x.to_vec();
        let mut pm = x.to_vec();
        let mut mp = x.to_vec();
        let mut mm = x.to_vec();
        pp[i] += H;
        pp[j] += H;
        pm[i] += H;
        pm[j] -= H;
        mp[i] -= H;
        mp[j] += H;
        mm[i] -= H;
        mm[j] -= H;
        (tree.eval_f64(&pp) - tree.eval_f64(&pm) - tree.eval_f64(&mp) + tree.eval_f64(&mm))
            / (4.0 * H * H)
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn jets_match_finite_differences_on_random_compositions() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    while checked < 100 {
        let dim = rng.random_range(1..4usize);
        let depth = rng.random_range(1..7usize);
        let tree = random_tree(&mut rng, dim, depth);
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();

        let plain = tree.eval_f64(&x);
        if !plain.is_finite() {
            continue;
        }
        let seeds = Jet2::seed_point(&x).unwrap();
        let jet = tree.eval_jet(&seeds);
        let jet = match jet.into_result(&x) {
            Ok(j) => j,
            Err(_) => continue,
        };

        assert!(
            rel_close(jet.value(), plain, 1e-12),
            "value mismatch: jet {} vs plain {plain} for {tree:?} at {x:?}",
            jet.value()
        );
        for i in 0..dim {
            let fd = fd_gradient(&tree, &x, i);
            assert!(
                rel_close(jet.grad(i), fd, 1e-6),
                "grad[{i}]: jet {} vs fd {fd} for {tree:?} at {x:?}",
                jet.grad(i)
            );
            for j in i..dim {
                let fd = fd_hessian(&tree, &x, i, j);
                assert!(
                    rel_close(jet.hess(i, j), fd, 1e-4),
                    "hess[{i},{j}]: jet {} vs fd {fd} for {tree:?} at {x:?}",
                    jet.hess(i, j)
                );
            }
        }
        checked += 1;
    }
}

#[test]
fn jet_hessian_is_exactly_symmetric_through_deep_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let dim = rng.random_range(2..4usize);
        let tree = random_tree(&mut rng, dim, 5);
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let seeds = Jet2::seed_point(&x).unwrap();
        let jet = tree.eval_jet(&seeds);
        if jet.fault().is_some() {
            continue;
        }
        for i in 0..dim {
            for j in 0..dim {
                assert_eq!(jet.hess(i, j), jet.hess(j, i));
            }
        }
    }
}

mod polynomial_oracle {
    use super::*;

    /// Bivariate polynomial with analytically differentiated gradient and
    /// Hessian, as an exact oracle for the jet path.
    struct Poly {
        // coefficient of x^i y^j at [i][j], degrees <= 3
        c: [[f64; 4]; 4],
    }

    impl Poly {
        fn eval(&self, x: f64, y: f64) -> f64 {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    s += self.c[i][j] * x.powi(i as i32) * y.powi(j as i32);
                }
            }
            s
        }
        fn dx(&self, x: f64, y: f64) -> f64 {
            let mut s = 0.0;
            for i in 1..4 {
                for j in 0..4 {
                    s += self.c[i][j] * i as f64 * x.powi(i as i32 - 1) * y.powi(j as i32);
                }
            }
            s
        }
        fn dxx(&self, x: f64, y: f64) -> f64 {
            let mut s = 0.0;
            for i in 2..4 {
                for j in 0..4 {
                    s += self.c[i][j]
                        * (i * (i - 1)) as f64
                        * x.powi(i as i32 - 2)
                        * y.powi(j as i32);
                }
            }
            s
        }
        fn dxy(&self, x: f64, y: f64) -> f64 {
            let mut s = 0.0;
            for i in 1..4 {
                for j in 1..4 {
                    s +=
                        self.c[i][j] * (i * j) as f64 * x.powi(i as i32 - 1) * y.powi(j as i32 - 1);
                }
            }
            s
        }
    }

    #[test]
    fn jet_derivatives_of_random_polynomials_are_analytic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let mut p = Poly { c: [[0.0; 4]; 4] };
            for i in 0..4 {
                for j in 0..4 {
                    if i + j <= 3 {
                        p.c[i][j] = rng.random_range(-1.0..1.0);
                    }
                }
            }
            let (x, y) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let seeds = Jet2::seed_point(&[x, y]).unwrap();
            let mut jet = Jet2::constant(0.0, 2);
            for i in 0..4 {
                for j in 0..4 {
                    if p.c[i][j] != 0.0 {
                        jet = jet + seeds[0].powi(i as i32) * seeds[1].powi(j as i32) * p.c[i][j];
                    }
                }
            }
            let tol = 1e-12;
            assert!((jet.value() - p.eval(x, y)).abs() < tol);
            assert!((jet.grad(0) - p.dx(x, y)).abs() < tol);
            assert!((jet.hess(0, 0) - p.dxx(x, y)).abs() < tol);
            assert!((jet.hess(0, 1) - p.dxy(x, y)).abs() < tol);
        }
    }
}
