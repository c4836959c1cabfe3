//! Leading constants of the fixed-budget distance intervals for RLS_1, RLS_3
//! and RLS_5 on OneMax.
//!
//! The first `4n` generations are cut into periods of `n/20` steps. Writing
//! the interval `[ℓ_i, u_i]` for the distance at the end of period `i` as
//! `[c_ℓ·n, c_u·n]` and dropping lower-order terms gives, starting from
//! `c = 1/2`,
//!
//! ```text
//! c_ℓ[i] = c_ℓ[i-1] − g_k(c_ℓ[i-1]) / 20
//! c_u[i] = c_u[i-1] − g_k(c_ℓ[i])   / 20
//! ```
//!
//! with `g_1(c) = c`, `g_3(c) = 3c²` and `g_5(c) = 10c³`, the leading terms
//! of `Δ_k(c·n)`.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Parameter values tabulated, in column order.
pub const TABLE_K: [u32; 3] = [1, 3, 5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceRow {
    pub period: u32,
    /// `c_ℓ` for k = 1, 3, 5.
    pub lower: [f64; 3],
    /// `c_u` for k = 1, 3, 5.
    pub upper: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceTable {
    pub rows: Vec<RecurrenceRow>,
}

impl RecurrenceTable {
    pub fn periods(&self) -> u32 {
        self.rows.len() as u32 - 1
    }

    /// `(c_ℓ, c_u)` at period `i` for `k ∈ {1, 3, 5}`.
    pub fn interval(&self, i: usize, k: u32) -> Option<(f64, f64)> {
        let col = TABLE_K.iter().position(|&x| x == k)?;
        self.rows.get(i).map(|r| (r.lower[col], r.upper[col]))
    }

    /// CSV in the column layout `i, c_l_1, c_u_1, c_l_3, c_u_3, c_l_5, c_u_5`
    /// with shortest round-trip decimal formatting.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "c_l_1", "c_u_1", "c_l_3", "c_u_3", "c_l_5", "c_u_5"])?;
        for r in &self.rows {
            let mut rec = vec![r.period.to_string()];
            for c in 0..3 {
                rec.push(format!("{:?}", r.lower[c]));
                rec.push(format!("{:?}", r.upper[c]));
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|source| crate::Error::Io {
            path: "<table>".into(),
            source,
        })?;
        Ok(())
    }
}

#[inline]
fn lead(k: u32, c: f64) -> f64 {
    match k {
        1 => c,
        3 => 3.0 * c * c,
        5 => 10.0 * c * c * c,
        _ => unreachable!(),
    }
}

/// Iterates the six recurrences for `periods` periods in double precision.
pub fn recurrence_table(periods: u32) -> RecurrenceTable {
    let mut lower = [0.5; 3];
    let mut upper = [0.5; 3];
    let mut rows = Vec::with_capacity(periods as usize + 1);
    rows.push(RecurrenceRow {
        period: 0,
        lower,
        upper,
    });
    for i in 1..=periods {
        for (col, &k) in TABLE_K.iter().enumerate() {
            lower[col] -= lead(k, lower[col]) / 20.0;
            upper[col] -= lead(k, lower[col]) / 20.0;
        }
        rows.push(RecurrenceRow {
            period: i,
            lower,
            upper,
        });
    }
    RecurrenceTable { rows }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactRecurrenceRow {
    pub period: u32,
    pub lower: [BigRational; 3],
    pub upper: [BigRational; 3],
}

/// The same recurrences in exact rational arithmetic. Denominators grow
/// geometrically (cubically per period for k = 5), so this is only practical
/// for a handful of periods.
pub fn recurrence_table_exact(periods: u32) -> Vec<ExactRecurrenceRow> {
    let half = BigRational::new(1.into(), 2.into());
    let twentieth = BigRational::new(1.into(), 20.into());
    let lead = |k: u32, c: &BigRational| -> BigRational {
        match k {
            1 => c.clone(),
            3 => BigRational::from_integer(3.into()) * c * c,
            5 => BigRational::from_integer(10.into()) * c * c * c,
            _ => unreachable!(),
        }
    };
    let mut lower: [BigRational; 3] = std::array::from_fn(|_| half.clone());
    let mut upper = lower.clone();
    let mut rows = vec![ExactRecurrenceRow {
        period: 0,
        lower: lower.clone(),
        upper: upper.clone(),
    }];
    for i in 1..=periods {
        for (col, &k) in TABLE_K.iter().enumerate() {
            lower[col] = &lower[col] - lead(k, &lower[col]) * &twentieth;
            upper[col] = &upper[col] - lead(k, &lower[col]) * &twentieth;
        }
        rows.push(ExactRecurrenceRow {
            period: i,
            lower: lower.clone(),
            upper: upper.clone(),
        });
    }
    rows
}
