//! Vertex budget of the dyadic ladder.
//!
//! Starting from a graph on `2N` vertices, the parity partition yields a
//! 2-modular witness on `N` vertices; the first lift costs a factor `C0` and
//! the lift from `2^j` to `2^(j+1)` a factor `C·2^(ja)`. Reaching a
//! `2^r`-modular witness of exactly `2^r` vertices therefore needs at most
//! `2·C0·(∏_{j=2}^{r-1} C·2^(ja))·2^r` vertices.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderBudget {
    pub c: f64,
    pub a: f64,
    pub c0: f64,
    pub r: u32,
    /// `None` when the value overflows an `f64`.
    pub vertices: Option<f64>,
    pub log2_vertices: f64,
}

pub fn ladder_budget(c: f64, a: f64, c0: f64, r: u32) -> Result<LadderBudget, String> {
    if !(c > 0.0 && c0 > 0.0 && c.is_finite() && c0.is_finite()) {
        return Err("C and C0 must be positive".into());
    }
    if !(a >= 0.0 && a.is_finite()) {
        return Err("a must be nonnegative".into());
    }
    if r == 0 {
        return Err("r must be at least 1".into());
    }
    let steps: f64 = (2..r).map(|j| c.log2() + a * f64::from(j)).sum();
    let log2 = 1.0 + c0.log2() + steps + f64::from(r);
    let value = log2.exp2();
    Ok(LadderBudget {
        c,
        a,
        c0,
        r,
        vertices: value.is_finite().then_some(value),
        log2_vertices: log2,
    })
}
