//! Implicit flow matrix over active/deleted halves, with fast products,
//! exact materialization and the two potentials.
//!
//! Index `u` is the active half of vertex `u`, index `n + u` its deleted half.

use crate::error::{Error, Result};
use crate::rational::BigQ;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Largest vertex count accepted by the exact materialization.
pub const EXACT_LIMIT: usize = 24;

/// Sparse linear map stored as (row, col, num, den) terms.
type Terms = Vec<(usize, usize, i128, i128)>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundOps {
    pub d_prev: Vec<i64>,
    pub d_new: Vec<i64>,
    /// Matching entries (u, v, x): x routed from v to u.
    pub entries: Vec<(usize, usize, i64)>,
    pub rowsum: Vec<i64>,
    pub colsum: Vec<i64>,
    #[serde(skip)]
    rows: Terms,
    #[serde(skip)]
    cols: Terms,
}

fn reduce(a: i128, b: i128) -> (i128, i128) {
    let g = num_integer::gcd(a, b);
    if g == 0 {
        (0, 1)
    } else {
        (a / g, b / g)
    }
}

fn mul3(a: i128, b: i128, c: i128) -> Result<i128> {
    a.checked_mul(b)
        .and_then(|x| x.checked_mul(c))
        .ok_or_else(|| Error::Contract("matching split coefficient overflows i128".into()))
}

impl RoundOps {
    /// Builds the update from d_{t-1}, d_t and the matching entries.
    pub fn new(
        d_prev: Vec<i64>,
        d_new: Vec<i64>,
        entries: Vec<(usize, usize, i64)>,
    ) -> Result<Self> {
        let n = d_prev.len();
        let mut rowsum = vec![0i64; n];
        let mut colsum = vec![0i64; n];
        for &(u, v, x) in &entries {
            if d_prev[u] == 0 || d_prev[v] == 0 || x < 0 {
                return Err(Error::Contract(
                    "matching entry outside the active set".into(),
                ));
            }
            rowsum[u] += x;
            colsum[v] += x;
        }
        for u in 0..n {
            if d_new[u] > d_prev[u] || d_new[u] < 0 {
                return Err(Error::Contract(format!("active weight grew at {u}")));
            }
            if d_prev[u] > 0 && (rowsum[u] < d_new[u] || colsum[u] < d_new[u]) {
                return Err(Error::Contract(format!(
                    "matching at {u} smaller than its new weight"
                )));
            }
            if rowsum[u] > d_prev[u] || colsum[u] > d_prev[u] {
                return Err(Error::Contract(format!(
                    "matching at {u} exceeds its weight"
                )));
            }
        }
        let mut r = RoundOps {
            d_prev,
            d_new,
            entries,
            rowsum,
            colsum,
            rows: Vec::new(),
            cols: Vec::new(),
        };
        r.build_terms()?;
        Ok(r)
    }

    fn build_terms(&mut self) -> Result<()> {
        let n = self.d_prev.len();
        let (mut rows, mut cols) = (Vec::new(), Vec::new());
        for u in 0..n {
            let (o, x) = (u, n + u);
            if self.d_prev[u] > 0 {
                let (p, q) = (self.d_new[u] as i128, self.d_prev[u] as i128);
                let (a, b) = reduce(p, q);
                let (c, d) = reduce(q - p, q);
                rows.push((o, o, a, b));
                rows.push((x, x, 1, 1));
                rows.push((x, o, c, d));
                cols.push((o, o, a, b));
                cols.push((o, x, c, d));
                cols.push((x, x, 1, 1));
            } else {
                rows.push((o, o, 1, 1));
                rows.push((x, x, 1, 1));
                cols.push((o, o, 1, 1));
                cols.push((x, x, 1, 1));
            }
        }
        for (a, b, num, den) in self.split_entries()? {
            // entry (a, b): b takes a share of the active row of vertex(a), a gives it up
            let y = a % n;
            let den2 = den.checked_mul(2 * self.d_prev[y] as i128).ok_or_else(|| {
                Error::Contract("matching split coefficient overflows i128".into())
            })?;
            let (p, q) = reduce(num, den2);
            rows.push((b, y, p, q));
            rows.push((a, y, -p, q));
        }
        self.rows = rows;
        self.cols = cols;
        Ok(())
    }

    /// Split matching entries over halves as (row, col, num, den).
    pub fn split_entries(&self) -> Result<Vec<(usize, usize, i128, i128)>> {
        let n = self.d_prev.len();
        let mut out = Vec::new();
        for &(u, v, x) in &self.entries {
            if x == 0 {
                continue;
            }
            let (rs, cs) = (self.rowsum[u] as i128, self.colsum[v] as i128);
            let (du, dv) = (self.d_new[u] as i128, self.d_new[v] as i128);
            for (ra, na) in [(u, du), (n + u, rs - du)] {
                for (cb, nb) in [(v, dv), (n + v, cs - dv)] {
                    if na == 0 || nb == 0 {
                        continue;
                    }
                    let num = mul3(x as i128, na, nb)?;
                    let (p, q) = reduce(num, rs * cs);
                    out.push((ra, cb, p, q));
                }
            }
        }
        Ok(out)
    }

    fn ensure_terms(&mut self) -> Result<()> {
        if self.rows.is_empty() {
            self.build_terms()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FlowMatrixImplicit {
    pub d0: Vec<i64>,
    pub rounds: Vec<RoundOps>,
}

fn apply(terms: &Terms, x: &[f64], transpose: bool) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for &(i, j, a, b) in terms {
        let c = a as f64 / b as f64;
        if transpose {
            y[j] += c * x[i];
        } else {
            y[i] += c * x[j];
        }
    }
    y
}

impl FlowMatrixImplicit {
    pub fn new(d0: Vec<i64>) -> Self {
        FlowMatrixImplicit {
            d0,
            rounds: Vec::new(),
        }
    }
    pub fn n(&self) -> usize {
        self.d0.len()
    }
    pub fn len(&self) -> usize {
        self.rounds.len()
    }
    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }
    pub fn push(&mut self, r: RoundOps) {
        self.rounds.push(r);
    }

    /// Active weights after round `t`.
    pub fn weights(&self, t: usize) -> &[i64] {
        if t == 0 {
            &self.d0
        } else {
            &self.rounds[t - 1].d_new
        }
    }

    /// F_t x.
    pub fn mul_right(&self, t: usize, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.len(), 2 * n);
        let mut y = x.to_vec();
        for r in self.rounds[..t].iter().rev() {
            y = apply(&r.cols, &y, false);
        }
        for v in 0..n {
            y[v] *= self.d0[v] as f64;
            y[n + v] = 0.0;
        }
        for r in &self.rounds[..t] {
            y = apply(&r.rows, &y, false);
        }
        y
    }

    /// xᵀ F_t.
    pub fn mul_left(&self, t: usize, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.len(), 2 * n);
        let mut y = x.to_vec();
        for r in self.rounds[..t].iter().rev() {
            y = apply(&r.rows, &y, true);
        }
        for v in 0..n {
            y[v] *= self.d0[v] as f64;
            y[n + v] = 0.0;
        }
        for r in &self.rounds[..t] {
            y = apply(&r.cols, &y, true);
        }
        y
    }

    /// Calls `visit(t, F_t)` for t = 0..=upto with exact matrices.
    pub fn materialize_each(
        &mut self,
        upto: usize,
        mut visit: impl FnMut(usize, &ExactMatrix),
    ) -> Result<()> {
        let n = self.n();
        if n > EXACT_LIMIT {
            return Err(Error::Contract(format!(
                "exact materialization limited to {EXACT_LIMIT} vertices"
            )));
        }
        if upto > self.rounds.len() {
            return Err(Error::Contract(
                "materialization past the last round".into(),
            ));
        }
        let mut f = ExactMatrix::zero(2 * n);
        for v in 0..n {
            f.a[v][v] = BigQ::from_integer(BigInt::from(self.d0[v]));
        }
        visit(0, &f);
        for t in 1..=upto {
            let r = &mut self.rounds[t - 1];
            r.ensure_terms()?;
            // F' = F C
            let mut fp = ExactMatrix::zero(2 * n);
            for &(k, j, a, b) in &r.cols {
                let c = BigQ::new(BigInt::from(a), BigInt::from(b));
                for i in 0..2 * n {
                    if !f.a[i][k].is_zero() {
                        let add = &f.a[i][k] * &c;
                        fp.a[i][j] += add;
                    }
                }
            }
            // F_t = R F'
            let mut nf = ExactMatrix::zero(2 * n);
            for &(i, j, a, b) in &r.rows {
                let c = BigQ::new(BigInt::from(a), BigInt::from(b));
                for k in 0..2 * n {
                    if !fp.a[j][k].is_zero() {
                        let add = &fp.a[j][k] * &c;
                        nf.a[i][k] += add;
                    }
                }
            }
            f = nf;
            visit(t, &f);
        }
        Ok(())
    }

    /// Exact F_t.
    pub fn materialize(&mut self, t: usize) -> Result<ExactMatrix> {
        let mut out = None;
        self.materialize_each(t, |s, f| {
            if s == t {
                out = Some(f.clone());
            }
        })?;
        Ok(out.expect("visited"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactMatrix {
    pub a: Vec<Vec<BigQ>>,
}

impl ExactMatrix {
    pub fn zero(k: usize) -> Self {
        ExactMatrix {
            a: vec![vec![BigQ::zero(); k]; k],
        }
    }
    pub fn dim(&self) -> usize {
        self.a.len()
    }
    pub fn row_sum(&self, i: usize) -> BigQ {
        self.a[i].iter().fold(BigQ::zero(), |s, x| s + x)
    }
    pub fn col_sum(&self, j: usize) -> BigQ {
        self.a.iter().fold(BigQ::zero(), |s, r| s + &r[j])
    }
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        self.a
            .iter()
            .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }
}

/// Row potential (`columns = false`) or column potential of F_t restricted to
/// the active halves of the support of `d`.
pub fn potential(f: &ExactMatrix, d: &[i64], columns: bool) -> BigQ {
    let act: Vec<usize> = (0..d.len()).filter(|&v| d[v] > 0).collect();
    if act.is_empty() {
        return BigQ::zero();
    }
    let entry = |u: usize, v: usize| if columns { &f.a[v][u] } else { &f.a[u][v] };
    let total: i64 = act.iter().map(|&v| d[v]).sum();
    let total = BigQ::from_integer(BigInt::from(total));
    let mu: Vec<BigQ> = act
        .iter()
        .map(|&v| act.iter().fold(BigQ::zero(), |s, &u| s + entry(u, v)) / &total)
        .collect();
    let mut psi = BigQ::zero();
    for &u in &act {
        let du = BigQ::from_integer(BigInt::from(d[u]));
        let mut inner = BigQ::zero();
        for (k, &v) in act.iter().enumerate() {
            let diff = entry(u, v) / &du - &mu[k];
            inner += &diff * &diff / BigQ::from_integer(BigInt::from(d[v]));
        }
        psi += du * inner;
    }
    psi
}

/// Float version of [`potential`] on a dense matrix.
pub fn potential_f64(f: &[Vec<f64>], d: &[i64], columns: bool) -> f64 {
    let act: Vec<usize> = (0..d.len()).filter(|&v| d[v] > 0).collect();
    if act.is_empty() {
        return 0.0;
    }
    let entry = |u: usize, v: usize| if columns { f[v][u] } else { f[u][v] };
    let total: f64 = act.iter().map(|&v| d[v] as f64).sum();
    let mu: Vec<f64> = act
        .iter()
        .map(|&v| act.iter().map(|&u| entry(u, v)).sum::<f64>() / total)
        .collect();
    let mut psi = 0.0;
    for &u in &act {
        let du = d[u] as f64;
        let mut inner = 0.0;
        for (k, &v) in act.iter().enumerate() {
            let diff = entry(u, v) / du - mu[k];
            inner += diff * diff / d[v] as f64;
        }
        psi += du * inner;
    }
    psi
}

/// Dense F_t in floating point via 2n products; any size.
pub fn dense_f64(fm: &FlowMatrixImplicit, t: usize) -> Vec<Vec<f64>> {
    let k = 2 * fm.n();
    let mut cols = vec![vec![0.0; k]; k];
    for j in 0..k {
        let mut e = vec![0.0; k];
        e[j] = 1.0;
        let c = fm.mul_right(t, &e);
        for i in 0..k {
            cols[i][j] = c[i];
        }
    }
    cols
}

pub fn one() -> BigQ {
    BigQ::one()
}
