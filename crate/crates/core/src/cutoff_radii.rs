//! Cutoff radii: minimizers of the convex one-dimensional objectives
//! `F_β(r) = 1/(r·arsinh(r)³) + r/β` and its piecewise companion `F̃_{α,β}`.

use serde::{Deserialize, Serialize};

use crate::error::{check_pos, Error, Result};
use crate::solve1d::brent_root;

const BRACKET_LO: f64 = 1e-12;
const BRACKET_HI: f64 = 1e12;

/// Minimizer and minimum of one of the cutoff objectives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffResult {
    pub beta: f64,
    /// Equals `beta` for the plain `R_β` problem.
    pub alpha: f64,
    pub r_min: f64,
    pub value: f64,
}

/// Which piece of `F̃` holds the minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TildeBranch {
    /// `r > R_β`, objective `1/(r·arsinh(R_β)³) + r/α`.
    Outer,
    /// `r < R_β`, objective `(R_β/arsinh R_β)³/r⁴ + r/α`.
    Inner,
    /// The minimizer sits on the kink `r = R_β`.
    Kink,
}

/// `F_β(r) = 1/(r·arsinh(r)³) + r/β`.
pub fn f_beta(r: f64, beta: f64) -> Result<f64> {
    check_pos("f_beta", r)?;
    check_pos("f_beta", beta)?;
    Ok(f_beta_unchecked(r, beta))
}

fn f_beta_unchecked(r: f64, beta: f64) -> f64 {
    let a = r.asinh();
    1.0 / (r * a * a * a) + r / beta
}

/// `F_β'(r) = −1/(r²·arsinh(r)³) − 3/(r·arsinh(r)⁴·√(1+r²)) + 1/β`.
pub fn f_beta_derivative(r: f64, beta: f64) -> Result<f64> {
    check_pos("f_beta_derivative", r)?;
    check_pos("f_beta_derivative", beta)?;
    Ok(1.0 / beta - barrier_slope(r))
}

/// `−d/dr [1/(r·arsinh(r)³)]`, positive and strictly decreasing.
fn barrier_slope(r: f64) -> f64 {
    let a = r.asinh();
    let a3 = a * a * a;
    1.0 / (r * r * a3) + 3.0 / (r * a3 * a * r.hypot(1.0))
}

/// `ln(1/β) − ln(barrier_slope(r))`: same sign as `F_β'(r)`, well scaled over
/// the whole bracket.
fn log_stationarity(r: f64, beta: f64) -> f64 {
    let a = r.asinh();
    // barrier_slope = (1 + 3r/(a√(1+r²))) / (r²a³)
    (r * r * a * a * a).ln() - (3.0 * r / (a * r.hypot(1.0))).ln_1p() - beta.ln()
}

/// `R_β`, the unique minimizer of `F_β`, by Brent's method in `ln r`.
pub fn r_of_beta(beta: f64) -> Result<CutoffResult> {
    check_pos("r_of_beta", beta)?;
    let g = |u: f64| log_stationarity(u.exp(), beta);
    let (mut lo, mut hi) = (BRACKET_LO.ln(), BRACKET_HI.ln());
    let mut expansions = 0;
    while g(lo) > 0.0 || g(hi) < 0.0 {
        expansions += 1;
        if expansions > 60 {
            return Err(Error::NoBracket {
                func: "r_of_beta",
                msg: format!("no sign change of F_beta' for beta = {beta:e}"),
            });
        }
        lo -= 10.0;
        hi += 10.0;
    }
    let u = brent_root(g, lo, hi, 1e-13, 300)?;
    let r = u.exp();
    Ok(CutoffResult {
        beta,
        alpha: beta,
        r_min: r,
        value: f_beta_unchecked(r, beta),
    })
}

/// `F̃_{α,β}` with `R_β` already computed; lets callers evaluate the
/// objective many times without repeating the root find.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TildeObjective {
    pub alpha: f64,
    pub beta: f64,
    pub r_beta: f64,
    arsinh_r_beta: f64,
}

impl TildeObjective {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_pos("TildeObjective::new", alpha)?;
        let r_beta = r_of_beta(beta)?.r_min;
        Ok(Self {
            alpha,
            beta,
            r_beta,
            arsinh_r_beta: r_beta.asinh(),
        })
    }

    /// `F̃_{α,β}(r)`; exactly at `r = R_β` the outer piece is used.
    pub fn eval(&self, r: f64) -> f64 {
        let a3 = self.arsinh_r_beta.powi(3);
        if r >= self.r_beta {
            1.0 / (r * a3) + r / self.alpha
        } else {
            let ratio = self.r_beta / self.arsinh_r_beta;
            ratio * ratio * ratio / r.powi(4) + r / self.alpha
        }
    }

    /// Minimizer of `F̃_{α,β}` from the stationary points of the two pieces.
    pub fn minimize(&self) -> Result<(CutoffResult, TildeBranch)> {
        let a = self.arsinh_r_beta;
        let rb = self.r_beta;
        let outer = self.alpha.sqrt() / a.powf(1.5);
        let inner = (4.0 * self.alpha * (rb / a).powi(3)).powf(0.2);
        let (r, branch) = if outer >= rb {
            (outer, TildeBranch::Outer)
        } else if inner < rb {
            (inner, TildeBranch::Inner)
        } else {
            (rb, TildeBranch::Kink)
        };
        // The two stationary points can only both be admissible if the
        // one-sided derivatives at the kink have the wrong order.
        if outer >= rb && inner < rb {
            return Err(Error::Internal {
                func: "R_tilde",
                msg: format!("both branches admissible at alpha = {}, beta = {}", self.alpha, self.beta),
            });
        }
        Ok((
            CutoffResult {
                beta: self.beta,
                alpha: self.alpha,
                r_min: r,
                value: self.eval(r),
            },
            branch,
        ))
    }

    /// One-sided derivatives `(F̃'(R_β⁻), F̃'(R_β⁺))`.
    pub fn kink_derivatives(&self) -> (f64, f64) {
        let rb = self.r_beta;
        let a3 = self.arsinh_r_beta.powi(3);
        let left = -4.0 / (rb * rb * a3) + 1.0 / self.alpha;
        let right = -1.0 / (rb * rb * a3) + 1.0 / self.alpha;
        (left, right)
    }
}

/// `F̃_{α,β}(r)`, the piecewise objective with branch point `R_β`.
pub fn f_tilde(r: f64, alpha: f64, beta: f64) -> Result<f64> {
    check_pos("f_tilde", r)?;
    Ok(TildeObjective::new(alpha, beta)?.eval(r))
}

/// `R̃_{α,β}`, the unique minimizer of `F̃_{α,β}`.
pub fn r_tilde(alpha: f64, beta: f64) -> Result<CutoffResult> {
    Ok(TildeObjective::new(alpha, beta)?.minimize()?.0)
}

/// Size of the derivative jump of `F̃` at `R_β` (right minus left),
/// `3/(R_β²·arsinh(R_β)³)`.
pub fn derivative_jump(r_beta: f64) -> f64 {
    3.0 / (r_beta * r_beta * r_beta.asinh().powi(3))
}
