use crate::error::{invalid, Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Upper limit on the number of row-to-column labellings an exact oracle
/// may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_patterns: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self { max_patterns: Self::DEFAULT_MAX }
    }
}

impl EnumerationBudget {
    pub const DEFAULT_MAX: u64 = 10_000_000;

    pub fn new(max_patterns: u64) -> Self {
        Self { max_patterns }
    }

    /// `(r + 1)^n`, saturating.
    pub fn required(n: usize, r: usize) -> u128 {
        let base = (r as u128) + 1;
        (0..n).fold(1u128, |acc, _| acc.saturating_mul(base))
    }

    pub fn allows(&self, n: usize, r: usize) -> bool {
        Self::required(n, r) <= u128::from(self.max_patterns)
    }

    pub(crate) fn check(&self, n: usize, r: usize) -> Result<()> {
        let required = Self::required(n, r);
        if required > u128::from(self.max_patterns) {
            return Err(Error::BudgetExceeded { required, max_patterns: self.max_patterns });
        }
        Ok(())
    }
}

/// Running statistics of one column's support.
#[derive(Clone, Copy)]
struct ColumnAcc<T> {
    count: usize,
    pos_sq: T,
    max: T,
}

struct Search<'a, T: Scalar> {
    v: &'a DenseMatrix<T>,
    labels: Vec<usize>,
    acc: Vec<ColumnAcc<T>>,
    best: Option<(T, Vec<usize>)>,
}

impl<T: Scalar> Search<'_, T> {
    fn score(&self) -> Option<T> {
        let mut total = T::zero();
        for a in &self.acc {
            if a.count == 0 {
                return None;
            }
            total = total + if a.pos_sq > T::zero() { a.pos_sq.sqrt() } else { a.max };
        }
        Some(total)
    }

    // Label 0 leaves the row unassigned, label j + 1 puts it in column j.
    fn dfs(&mut self, row: usize) {
        let n = self.v.rows();
        if row == n {
            if let Some(s) = self.score() {
                if self.best.as_ref().is_none_or(|(b, _)| s > *b) {
                    self.best = Some((s, self.labels.clone()));
                }
            }
            return;
        }
        // Columns still empty must be fillable by the remaining rows.
        let empty = self.acc.iter().filter(|a| a.count == 0).count();
        if empty > n - row {
            return;
        }
        for label in 0..=self.acc.len() {
            self.labels[row] = label;
            if label == 0 {
                self.dfs(row + 1);
                continue;
            }
            let j = label - 1;
            let val = self.v.get(row, j);
            let saved = self.acc[j];
            let a = &mut self.acc[j];
            a.max = if a.count == 0 { val } else { a.max.max(val) };
            a.count += 1;
            if val > T::zero() {
                a.pos_sq = a.pos_sq + val * val;
            }
            self.dfs(row + 1);
            self.acc[j] = saved;
        }
        self.labels[row] = 0;
    }
}

/// Maximises `Σ_j ⟨v^j, u^j⟩` over `U ∈ St^{n,r}_+` by enumerating which
/// column (if any) owns each row. Ties keep the lexicographically smallest
/// labelling.
pub(crate) fn max_alignment<T: Scalar>(
    v: &DenseMatrix<T>,
    budget: EnumerationBudget,
) -> Result<DenseMatrix<T>> {
    let (n, r) = v.shape();
    if r > n {
        return invalid(format!("need cols <= rows, got {n}x{r}"));
    }
    budget.check(n, r)?;
    let mut search = Search {
        v,
        labels: vec![0; n],
        acc: vec![ColumnAcc { count: 0, pos_sq: T::zero(), max: T::zero() }; r],
        best: None,
    };
    search.dfs(0);
    let (_, labels) = search.best.ok_or_else(|| Error::Internal("no labelling found".into()))?;

    let mut u = DenseMatrix::zeros(n, r);
    for j in 0..r {
        let support: Vec<usize> = (0..n).filter(|&i| labels[i] == j + 1).collect();
        let pos: Vec<T> = support.iter().map(|&i| v.get(i, j).max(T::zero())).collect();
        let nrm = crate::linalg::norm2(&pos);
        if nrm > T::zero() {
            for (&i, &p) in support.iter().zip(&pos) {
                u.set(i, j, p / nrm);
            }
        } else {
            let mut best = support[0];
            for &i in &support[1..] {
                if v.get(i, j) > v.get(best, j) {
                    best = i;
                }
            }
            u.set(best, j, T::one());
        }
    }
    Ok(u)
}

/// Exact nearest point of `St^{n,r}_+` and the distance to it.
pub fn exact_project_nonneg_stiefel<T: Scalar>(
    x: &DenseMatrix<T>,
    budget: EnumerationBudget,
) -> Result<(DenseMatrix<T>, T)> {
    let u = max_alignment(x, budget)?;
    let d = (x - &u).frobenius_norm();
    Ok((u, d))
}

/// `min ⟨C, X⟩` over `X ∈ St^{n,r}_+`, returning a minimiser and the value.
pub fn min_linear_nonneg_stiefel<T: Scalar>(
    c: &DenseMatrix<T>,
    budget: EnumerationBudget,
) -> Result<(DenseMatrix<T>, T)> {
    let u = max_alignment(&c.map(|v| -v), budget)?;
    let val = c.inner(&u);
    Ok((u, val))
}
