//! Picard iteration for `u = L f + N_k(u, ..., u)`: the homogeneous iterates
//! `A_n`, the contraction solve, and homogeneity / Lipschitz diagnostics.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{config, usage, DlabError, Result};
use crate::evolution::Evolution;
use crate::lattice::{Field, Grid, Profile, ProfileDomain};
use crate::norms::{cth_norm, hs_norm};
use crate::report::RatioReport;

/// Minimal linear structure needed by the iteration.
pub trait VectorSpace: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn add_assign(&mut self, other: &Self);
    fn scale(&self, alpha: f64) -> Self;

    fn sub(&self, other: &Self) -> Self {
        let mut out = other.scale(-1.0);
        out.add_assign(self);
        out
    }
}

impl VectorSpace for Field {
    fn zero_like(&self) -> Self {
        Field::zeros(self.grid(), self.repr())
    }
    fn add_assign(&mut self, other: &Self) {
        Field::add_assign(self, other).expect("fields share a grid")
    }
    fn scale(&self, alpha: f64) -> Self {
        self.scaled(Complex64::new(alpha, 0.0))
    }
}

impl VectorSpace for Vec<f64> {
    fn zero_like(&self) -> Self {
        vec![0.0; self.len()]
    }
    fn add_assign(&mut self, other: &Self) {
        self.iter_mut().zip(other).for_each(|(a, b)| *a += b);
    }
    fn scale(&self, alpha: f64) -> Self {
        self.iter().map(|a| a * alpha).collect()
    }
}

/// An abstract equation `u = L f + N_k(u, ..., u)`.
pub trait IterationProblem: Sync {
    type Data: Clone + Send + Sync;
    type Solution: VectorSpace;

    /// Multilinearity degree `k >= 2`.
    fn degree(&self) -> usize;
    fn linear(&self, f: &Self::Data) -> Result<Self::Solution>;
    /// `N_k(args[0], ..., args[k-1])`.
    fn multilinear(&self, args: &[&Self::Solution]) -> Result<Self::Solution>;
    fn data_norm(&self, f: &Self::Data) -> f64;
    fn solution_norm(&self, u: &Self::Solution) -> f64;
    fn scale_data(&self, f: &Self::Data, lambda: f64) -> Self::Data;
    fn data_sub(&self, f: &Self::Data, g: &Self::Data) -> Self::Data;
}

#[derive(Debug, Clone, Copy)]
pub struct ContractionConfig {
    pub c0: f64,
    pub eps0: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for ContractionConfig {
    fn default() -> Self {
        ContractionConfig { c0: 2.0, eps0: 1e-2, max_iter: 50, tol: 1e-10 }
    }
}

impl ContractionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0 && self.eps0 > 0.0 && self.tol > 0.0 && self.max_iter > 0) {
            return config("contraction constants must be positive");
        }
        Ok(())
    }
}

/// Ordered compositions `n = n_1 + ... + n_k` with every part `>= 1`.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(k - 1) {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `A_1, ..., A_n` (index 0 holds `A_1`), each computed once from the
/// recursion `A_n = sum_{n_1 + ... + n_k = n} N_k(A_{n_1}, ..., A_{n_k})`.
pub fn iterate_a<P: IterationProblem>(problem: &P, f: &P::Data, n: usize) -> Result<Vec<P::Solution>> {
    if n == 0 {
        return usage("iterate index must be >= 1");
    }
    let k = problem.degree();
    if k < 2 {
        return config(format!("multilinearity degree must be >= 2, got {k}"));
    }
    let mut memo: Vec<P::Solution> = vec![problem.linear(f)?];
    for m in 2..=n {
        let terms: Vec<Result<P::Solution>> = compositions(m, k)
            .into_par_iter()
            .map(|parts| {
                let args: Vec<&P::Solution> = parts.iter().map(|&p| &memo[p - 1]).collect();
                problem.multilinear(&args)
            })
            .collect();
        let mut acc = memo[0].zero_like();
        for t in terms {
            acc.add_assign(&t?);
        }
        memo.push(acc);
    }
    Ok(memo)
}

/// A `k`-ary composition tree: leaves are `L f`, nodes apply `N_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Leaf,
    Node(Vec<Tree>),
}

impl Tree {
    pub fn leaves(&self) -> usize {
        match self {
            Tree::Leaf => 1,
            Tree::Node(children) => children.iter().map(Tree::leaves).sum(),
        }
    }

    /// Every `k`-ary tree with exactly `n` leaves.
    pub fn enumerate(n: usize, k: usize) -> Vec<Tree> {
        if n == 1 {
            return vec![Tree::Leaf];
        }
        let mut out = Vec::new();
        for parts in compositions(n, k) {
            let mut partial: Vec<Vec<Tree>> = vec![vec![]];
            for &p in &parts {
                let subs = Tree::enumerate(p, k);
                partial = partial
                    .into_iter()
                    .flat_map(|prefix| {
                        subs.iter().map(move |s| {
                            let mut v = prefix.clone();
                            v.push(s.clone());
                            v
                        })
                    })
                    .collect();
            }
            out.extend(partial.into_iter().map(Tree::Node));
        }
        out
    }

    /// Evaluates the tree from scratch, with no sharing of subtrees.
    pub fn evaluate<P: IterationProblem>(&self, problem: &P, f: &P::Data) -> Result<P::Solution> {
        match self {
            Tree::Leaf => problem.linear(f),
            Tree::Node(children) => {
                let vals = children.iter().map(|c| c.evaluate(problem, f)).collect::<Result<Vec<_>>>()?;
                let refs: Vec<&P::Solution> = vals.iter().collect();
                problem.multilinear(&refs)
            }
        }
    }
}

/// Relative defect `||A_n(lambda f) - lambda^n A_n(f)|| / ||lambda^n A_n(f)||`.
/// When the denominator vanishes the absolute defect is returned and the
/// flag is set.
pub fn homogeneity_defect<P: IterationProblem>(problem: &P, f: &P::Data, lambda: f64, n: usize) -> Result<(f64, bool)> {
    let scaled = iterate_a(problem, &problem.scale_data(f, lambda), n)?.pop().unwrap();
    let base = iterate_a(problem, f, n)?.pop().unwrap().scale(lambda.powi(n as i32));
    let diff = problem.solution_norm(&scaled.sub(&base));
    let denom = problem.solution_norm(&base);
    Ok(if denom == 0.0 { (diff, true) } else { (diff / denom, false) })
}

/// Empirical `C_1^n = ||A_n f - A_n g|| / (||f - g|| (||f|| + ||g||)^{n-1})`.
pub fn lipschitz_probe<P: IterationProblem>(problem: &P, f: &P::Data, g: &P::Data, n: usize) -> Result<RatioReport> {
    let d = problem.data_norm(&problem.data_sub(f, g));
    let name = format!("lipschitz-n{n}");
    if d == 0.0 {
        return Ok(RatioReport::single(name, 0.0));
    }
    let af = iterate_a(problem, f, n)?.pop().unwrap();
    let ag = iterate_a(problem, g, n)?.pop().unwrap();
    let lhs = problem.solution_norm(&af.sub(&ag));
    let rhs = d * (problem.data_norm(f) + problem.data_norm(g)).powi(n as i32 - 1);
    Ok(RatioReport::single(name, lhs / rhs).with_param("n", n))
}

#[derive(Debug, Clone)]
pub struct ContractionOutcome<S> {
    pub solution: S,
    /// `||u_{m+1} - u_m||` per step.
    pub diffs: Vec<f64>,
    /// `||u - L f - N_k(u, ..., u)||` at the returned solution.
    pub residual: f64,
    /// `(||A_n||, ||u_K - u||)` for `K = n = 1, 2, ...`.
    pub partial_sums: Vec<(f64, f64)>,
}

/// Fixed-point iteration from `u = 0`, followed by the partial sums
/// `u_K = sum_{n <= K} A_n(f)` for `K <= partial_terms`.
pub fn contraction_solve<P: IterationProblem>(
    problem: &P,
    f: &P::Data,
    cfg: &ContractionConfig,
    partial_terms: usize,
) -> Result<ContractionOutcome<P::Solution>> {
    cfg.validate()?;
    let nf = problem.data_norm(f);
    if nf >= cfg.eps0 {
        return config(format!("data norm {nf:e} is not below eps0 = {:e}", cfg.eps0));
    }
    let lf = problem.linear(f)?;
    let k = problem.degree();
    let step = |u: &P::Solution| -> Result<P::Solution> {
        let args: Vec<&P::Solution> = std::iter::repeat(u).take(k).collect();
        let mut next = problem.multilinear(&args)?;
        next.add_assign(&lf);
        Ok(next)
    };
    let mut u = lf.zero_like();
    let mut diffs = Vec::new();
    let mut rising = 0;
    loop {
        let next = step(&u)?;
        let diff = problem.solution_norm(&next.sub(&u));
        if let Some(&prev) = diffs.last() {
            rising = if diff > prev { rising + 1 } else { 0 };
        }
        diffs.push(diff);
        u = next;
        if rising >= 3 {
            return Err(DlabError::Divergence(format!(
                "successive differences rose three times in a row (last {diff:e})"
            )));
        }
        if diff <= cfg.tol || diffs.len() >= cfg.max_iter {
            break;
        }
    }
    let residual = problem.solution_norm(&step(&u)?.sub(&u));
    if !residual.is_finite() {
        return Err(DlabError::Divergence("iteration produced non-finite values".into()));
    }
    let mut partial_sums = Vec::new();
    if partial_terms > 0 {
        let iterates = iterate_a(problem, f, partial_terms)?;
        let mut acc = lf.zero_like();
        for a in &iterates {
            acc.add_assign(a);
            partial_sums.push((problem.solution_norm(a), problem.solution_norm(&acc.sub(&u))));
        }
    }
    Ok(ContractionOutcome { solution: u, diffs, residual, partial_sums })
}

/// The quadratic Schrödinger instance: data in `H^s`, solutions as mode
/// fields measured in discrete `C^0_t H^s` over the whole time window.
#[derive(Debug, Clone)]
pub struct NlsProblem {
    pub evolution: Evolution,
    pub grid: Arc<Grid>,
    /// Regularity of both norms (default `-1`).
    pub s: f64,
}

impl NlsProblem {
    pub fn new(grid: Arc<Grid>) -> Self {
        NlsProblem { evolution: Evolution::default(), grid, s: -1.0 }
    }
}

impl IterationProblem for NlsProblem {
    type Data = Profile;
    type Solution = Field;

    fn degree(&self) -> usize {
        2
    }
    fn linear(&self, f: &Profile) -> Result<Field> {
        self.evolution.apply_l(f)
    }
    fn multilinear(&self, args: &[&Field]) -> Result<Field> {
        self.evolution.apply_n2(args[0], args[1])
    }
    fn data_norm(&self, f: &Profile) -> f64 {
        hs_norm(f, self.s)
    }
    fn solution_norm(&self, u: &Field) -> f64 {
        let t = self.grid.t();
        cth_norm(u, self.s, (t[0], t[t.len() - 1])).unwrap_or(0.0)
    }
    fn scale_data(&self, f: &Profile, lambda: f64) -> Profile {
        f.scaled(Complex64::new(lambda, 0.0))
    }
    fn data_sub(&self, f: &Profile, g: &Profile) -> Profile {
        f.with_values(ProfileDomain::Frequency, f.values().iter().zip(g.values()).map(|(a, b)| a - b).collect())
    }
}
