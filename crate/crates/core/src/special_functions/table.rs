use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{
    chi_series, factor_series, integrate_factor_log, integrate_factor_sqrt, inverse_upper_bound,
    weizsacker_factor_unchecked, SERIES_LIMIT,
};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Environment variable naming a directory where the table is cached.
pub const CACHE_DIR_ENV: &str = "RTFW_CACHE_DIR";

const SCHEMA: &str = "rtfw.special-function-table/1";
const CACHE_FILE: &str = "special_function_table_v1.json";

/// Layout of the tabulation: `log_nodes` log-spaced abscissae on
/// `[SERIES_LIMIT, max_node]`, preceded by the node `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub log_nodes: usize,
    pub max_node: f64,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            log_nodes: 4096,
            max_node: 1e8,
        }
    }
}

/// Tabulated `F` with exact slopes `F' = f` at every node; evaluated by
/// cubic Hermite interpolation between nodes, by its power series below the
/// first positive node, and by quadrature of the tail beyond `max_node`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecialFunctionTable {
    schema: String,
    config: TableConfig,
    /// `nodes[0] = 0`, then log-spaced.
    nodes: Vec<f64>,
    /// `F(nodes[i])`.
    values: Vec<f64>,
    /// `f(nodes[i])`.
    slopes: Vec<f64>,
    interpolation_order: u32,
    #[serde(skip)]
    log_lo: f64,
    #[serde(skip)]
    log_step: f64,
}

impl SpecialFunctionTable {
    pub fn build(config: TableConfig) -> Result<Self> {
        if config.log_nodes < 2 || !(config.max_node > SERIES_LIMIT) {
            return Err(crate::error::domain(
                "SpecialFunctionTable::build",
                format!("invalid layout {config:?}"),
            ));
        }
        let n = config.log_nodes;
        let step = (config.max_node / SERIES_LIMIT).ln() / (n - 1) as f64;
        let mut nodes = Vec::with_capacity(n + 1);
        nodes.push(0.0);
        for i in 0..n {
            nodes.push(if i + 1 == n {
                config.max_node
            } else {
                SERIES_LIMIT * (step * i as f64).exp()
            });
        }
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-15,
            max_intervals: 200,
        };
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        values.push(integrate_factor_sqrt(0.0, SERIES_LIMIT)?);
        for w in nodes[1..].windows(2) {
            let seg = integrate(weizsacker_factor_unchecked, w[0], w[1], opts)?.value;
            values.push(values.last().copied().unwrap_or(0.0) + seg);
        }
        let slopes = nodes.iter().map(|&t| weizsacker_factor_unchecked(t)).collect();
        let mut table = Self {
            schema: SCHEMA.to_string(),
            config,
            nodes,
            values,
            slopes,
            interpolation_order: 3,
            log_lo: 0.0,
            log_step: 0.0,
        };
        table.finish()?;
        Ok(table)
    }

    fn finish(&mut self) -> Result<()> {
        let n = self.config.log_nodes;
        if self.schema != SCHEMA
            || self.nodes.len() != n + 1
            || self.values.len() != n + 1
            || self.slopes.len() != n + 1
        {
            return Err(Error::Cache("table layout does not match its schema".into()));
        }
        if self.values[0] != 0.0 || self.values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Cache("tabulated F is not strictly increasing from 0".into()));
        }
        self.log_lo = SERIES_LIMIT.ln();
        self.log_step = (self.config.max_node / SERIES_LIMIT).ln() / (n - 1) as f64;
        Ok(())
    }

    pub fn config(&self) -> TableConfig {
        self.config
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation_order(&self) -> u32 {
        self.interpolation_order
    }

    pub fn max_node(&self) -> f64 {
        self.config.max_node
    }

    fn segment(&self, t: f64) -> usize {
        let last = self.nodes.len() - 2;
        let mut k = (((t.ln() - self.log_lo) / self.log_step).floor() as isize + 1).clamp(1, last as isize) as usize;
        while k > 1 && t < self.nodes[k] {
            k -= 1;
        }
        while k < last && t > self.nodes[k + 1] {
            k += 1;
        }
        k
    }

    /// `F(t)`. `t` must be finite and nonnegative.
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_with_derivative(t).0
    }

    /// `(F(t), F'(t))`, with `F'` the derivative of the interpolant.
    pub fn eval_with_derivative(&self, t: f64) -> (f64, f64) {
        if t <= SERIES_LIMIT {
            return (chi_series(t), factor_series(t));
        }
        let max = self.config.max_node;
        if t >= max {
            let tail = integrate_factor_log(max, t).unwrap_or(f64::NAN);
            return (self.values[self.values.len() - 1] + tail, weizsacker_factor_unchecked(t));
        }
        let k = self.segment(t);
        let (x0, x1) = (self.nodes[k], self.nodes[k + 1]);
        let h = x1 - x0;
        let tau = (t - x0) / h;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let om = 1.0 - tau;
        let value = (1.0 + 2.0 * tau) * om * om * y0
            + tau * om * om * m0
            + tau * tau * (3.0 - 2.0 * tau) * y1
            - tau * tau * om * m1;
        let dvalue = (6.0 * tau * (tau - 1.0) * (y0 - y1)
            + (3.0 * tau * tau - 4.0 * tau + 1.0) * m0
            + (3.0 * tau * tau - 2.0 * tau) * m1)
            / h;
        (value, dvalue)
    }

    /// `F⁻¹(y)` by Newton's method safeguarded with the bracket
    /// `[0, 2y^{2/3}(y+1)^{1/3}]`; falls back to bisection whenever a Newton
    /// step leaves the current bracket.
    pub fn inverse(&self, y: f64) -> f64 {
        self.inverse_with_guess(y, (1.5 * y).powf(2.0 / 3.0))
    }

    /// As [`Self::inverse`], starting Newton's method from `guess`.
    pub fn inverse_with_guess(&self, y: f64, guess: f64) -> f64 {
        if y == 0.0 {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = inverse_upper_bound(y);
        let mut t = if guess > 0.0 && guess < hi { guess } else { (1.5 * y).powf(2.0 / 3.0).min(hi) };
        for _ in 0..200 {
            let (value, slope) = self.eval_with_derivative(t);
            let r = value - y;
            if r == 0.0 {
                return t;
            }
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - r / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 2.0 * f64::EPSILON * t || hi - lo <= 2.0 * f64::EPSILON * hi {
                return next;
            }
            t = next;
        }
        t
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Cache(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut table: Self = serde_json::from_str(text).map_err(|e| Error::Cache(e.to_string()))?;
        table.finish()?;
        Ok(table)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

fn cache_path() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV).map(|dir| PathBuf::from(dir).join(CACHE_FILE))
}

fn load_or_build() -> SpecialFunctionTable {
    let config = TableConfig::default();
    if let Some(path) = cache_path() {
        if let Ok(table) = SpecialFunctionTable::load_json(&path) {
            if table.config() == config {
                return table;
            }
        }
        let table = SpecialFunctionTable::build(config).expect("default table layout is valid");
        if let Some(dir) = path.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        // A failed cache write only costs a rebuild next time.
        let _ = table.save_json(&path);
        return table;
    }
    SpecialFunctionTable::build(config).expect("default table layout is valid")
}

/// The process-wide table, built (or loaded from `$RTFW_CACHE_DIR`) on first use.
pub fn table() -> &'static SpecialFunctionTable {
    static TABLE: OnceLock<SpecialFunctionTable> = OnceLock::new();
    TABLE.get_or_init(load_or_build)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::chi_of_p_direct;

    #[test]
    fn interpolation_matches_quadrature_off_nodes() {
        let table = table();
        let nodes = table.nodes();
        let mut worst: f64 = 0.0;
        for k in (1..nodes.len() - 1).step_by(37) {
            for frac in [0.31, 0.5, 0.77] {
                let t = nodes[k] + frac * (nodes[k + 1] - nodes[k]);
                let direct = chi_of_p_direct(t).unwrap();
                worst = worst.max(((table.eval(t) - direct) / direct).abs());
            }
        }
        assert!(worst <= 1e-10, "worst relative error {worst:e}");
    }

    #[test]
    fn tail_beyond_max_node() {
        let t = 3.7e9;
        let direct = chi_of_p_direct(t).unwrap();
        assert!(((table().eval(t) - direct) / direct).abs() < 1e-11);
    }

    #[test]
    fn invariants_of_default_table() {
        let table = table();
        assert_eq!(table.values()[0], 0.0);
        assert!(table.values().windows(2).all(|w| w[1] > w[0]));
        for (&t, &v) in table.nodes().iter().zip(table.values()).skip(1) {
            let lower = t * t.asinh().sqrt() / 2.0;
            let upper = t * weizsacker_factor_unchecked(t);
            assert!(lower < v && v <= upper, "sandwich fails at t = {t}");
        }
    }

    #[test]
    fn json_round_trip_preserves_values() {
        let small = SpecialFunctionTable::build(TableConfig {
            log_nodes: 64,
            max_node: 10.0,
        })
        .unwrap();
        let back = SpecialFunctionTable::from_json(&small.to_json().unwrap()).unwrap();
        assert_eq!(small.values(), back.values());
        assert_eq!(small.eval(3.3), back.eval(3.3));
    }

    #[test]
    fn corrupted_json_is_rejected() {
        let small = SpecialFunctionTable::build(TableConfig {
            log_nodes: 16,
            max_node: 2.0,
        })
        .unwrap();
        let text = small.to_json().unwrap().replace(SCHEMA, "other/9");
        assert!(matches!(SpecialFunctionTable::from_json(&text), Err(Error::Cache(_))));
    }

    #[test]
    fn derivative_of_interpolant_tracks_factor() {
        let table = table();
        for t in [2e-4, 0.013, 0.9, 47.0, 2.2e5] {
            let (_, d) = table.eval_with_derivative(t);
            let f = weizsacker_factor_unchecked(t);
            assert!(((d - f) / f).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn inverse_round_trip_across_range() {
        let table = table();
        for &t in &[1e-9, 3e-5, 1e-4, 0.2, 1.0, 2.5, 333.0, 1e7, 5e8] {
            let back = table.inverse(table.eval(t));
            assert!((back - t).abs() <= 1e-9 * t.max(1.0), "t = {t}, back = {back}");
        }
    }

    #[test]
    fn guessed_inverse_agrees_with_default_start() {
        let table = table();
        for &t in &[2e-6, 0.05, 1.7, 900.0] {
            let y = table.eval(t);
            for guess in [0.0, 0.5 * t, 1.001 * t, 1e12] {
                let back = table.inverse_with_guess(y, guess);
                assert!((back - t).abs() <= 1e-12 * t.max(1e-3), "t = {t}, guess = {guess}");
            }
        }
    }
}
