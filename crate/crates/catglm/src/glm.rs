//! Maximum-likelihood fitting of logit and log-link GLMs by iteratively
//! reweighted least squares, plus prediction and scoring.

use serde::{Deserialize, Serialize};

use crate::data::ResponseType;
use crate::design::{Column, DesignMatrix};
use crate::error::{Error, Result};

const MU_EPS: f64 = 1e-10;
const MAX_HALVINGS: u32 = 30;

/// Response family with its canonical link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    BernoulliLogit,
    PoissonLog,
}

impl Family {
    /// The family canonically paired with a response type.
    pub fn for_response(rt: ResponseType) -> Family {
        match rt {
            ResponseType::Binary => Family::BernoulliLogit,
            ResponseType::Count => Family::PoissonLog,
        }
    }

    /// Mean function G(eta).
    pub fn inverse_link(self, eta: f64) -> f64 {
        match self {
            Family::BernoulliLogit => 1.0 / (1.0 + (-eta).exp()),
            Family::PoissonLog => eta.min(700.0).exp(),
        }
    }

    /// Mean clamped to the family's open support, used inside the fit.
    fn clamped_mean(self, eta: f64) -> f64 {
        match self {
            Family::BernoulliLogit => self.inverse_link(eta).clamp(MU_EPS, 1.0 - MU_EPS),
            Family::PoissonLog => self.inverse_link(eta).max(MU_EPS),
        }
    }

    /// Variance function, which is also the IRLS weight under the canonical
    /// link.
    fn weight(self, mu: f64) -> f64 {
        match self {
            Family::BernoulliLogit => mu * (1.0 - mu),
            Family::PoissonLog => mu,
        }
    }

    /// Unit deviance summed over observations; non-negative, zero only for a
    /// saturated fit.
    pub fn deviance(self, y: &[f64], mu: &[f64]) -> f64 {
        let mut dev = 0.0;
        match self {
            Family::BernoulliLogit => {
                for (&yi, &mui) in y.iter().zip(mu) {
                    if yi > 0.5 {
                        dev += -2.0 * mui.ln();
                    } else {
                        dev += -2.0 * (1.0 - mui).ln();
                    }
                }
            }
            Family::PoissonLog => {
                for (&yi, &mui) in y.iter().zip(mu) {
                    if yi > 0.0 {
                        dev += 2.0 * (yi * (yi / mui).ln() - (yi - mui));
                    } else {
                        dev += 2.0 * mui;
                    }
                }
            }
        }
        // non-negative by definition; rounding near saturation can dip below
        dev.max(0.0)
    }

    /// Log-likelihood kernel as a function of the linear predictor
    /// (constants in y dropped).
    pub fn log_likelihood(self, y: &[f64], eta: &[f64]) -> f64 {
        let mut ll = 0.0;
        match self {
            Family::BernoulliLogit => {
                for (&yi, &ei) in y.iter().zip(eta) {
                    // y*eta - softplus(eta), numerically stable
                    let softplus = if ei > 0.0 {
                        ei + (-ei).exp().ln_1p()
                    } else {
                        ei.exp().ln_1p()
                    };
                    ll += yi * ei - softplus;
                }
            }
            Family::PoissonLog => {
                for (&yi, &ei) in y.iter().zip(eta) {
                    ll += yi * ei - ei.min(700.0).exp();
                }
            }
        }
        ll
    }

    fn check_response(self, y: &[f64]) -> Result<()> {
        match self {
            Family::BernoulliLogit => {
                if y.iter().any(|&v| v != 0.0 && v != 1.0) {
                    return Err(Error::Fit(
                        "bernoulli response must contain only 0 and 1".into(),
                    ));
                }
            }
            Family::PoissonLog => {
                if y.iter().any(|&v| !v.is_finite() || v < 0.0) {
                    return Err(Error::Fit(
                        "poisson response must be finite and non-negative".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn initial_intercept(self, y_mean: f64) -> f64 {
        match self {
            Family::BernoulliLogit => {
                let p = y_mean.clamp(1e-3, 1.0 - 1e-3);
                (p / (1.0 - p)).ln()
            }
            Family::PoissonLog => y_mean.max(1e-3).ln(),
        }
    }
}

/// Knobs for the IRLS loop.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_iterations: usize,
    /// Relative deviance change below which the fit is converged.
    pub tolerance: f64,
    /// Ridge added to the normal-equation diagonal. Zero for plain ML.
    pub ridge: f64,
    /// Refit with ridge 1e-4 once the coefficient sup-norm exceeds this.
    pub divergence_guard: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iterations: 100,
            tolerance: 1e-8,
            ridge: 0.0,
            divergence_guard: 1e4,
        }
    }
}

/// Conditions encountered during a fit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitFlags {
    /// The normal equations were rank-deficient; a 1e-8 ridge was added.
    pub rank_deficient: bool,
    /// The coefficients diverged (separation); the fit was redone with a
    /// 1e-4 ridge.
    pub separation_refit: bool,
}

/// A fitted GLM: one coefficient per design column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedGlm {
    pub columns: Vec<Column>,
    pub coefficients: Vec<f64>,
    pub converged: bool,
    pub n_iterations: usize,
    pub deviance: f64,
    pub family: Family,
    pub flags: FitFlags,
    /// The ridge actually applied (0 for plain maximum likelihood).
    pub ridge: f64,
}

impl FittedGlm {
    pub fn linear_predictor(&self, design: &DesignMatrix) -> Result<Vec<f64>> {
        if design.columns != self.columns {
            let diffs: Vec<String> = self
                .columns
                .iter()
                .map(|c| c.to_string())
                .zip_longest_describe(&design.columns);
            return Err(Error::Fit(format!(
                "design columns do not match the fitted model: {}",
                diffs.join("; ")
            )));
        }
        Ok(matvec(design, &self.coefficients))
    }
}

// Small helper for readable mismatch messages.
trait ZipLongestDescribe {
    fn zip_longest_describe(self, other: &[Column]) -> Vec<String>;
}

impl<I: Iterator<Item = String>> ZipLongestDescribe for I {
    fn zip_longest_describe(self, other: &[Column]) -> Vec<String> {
        let mine: Vec<String> = self.collect();
        let theirs: Vec<String> = other.iter().map(|c| c.to_string()).collect();
        let mut diffs = Vec::new();
        let max = mine.len().max(theirs.len());
        for i in 0..max {
            let a = mine.get(i).map(String::as_str).unwrap_or("<none>");
            let b = theirs.get(i).map(String::as_str).unwrap_or("<none>");
            if a != b {
                diffs.push(format!("column {i}: model has {a}, design has {b}"));
            }
            if diffs.len() == 4 {
                diffs.push("...".into());
                break;
            }
        }
        diffs
    }
}

fn matvec(design: &DesignMatrix, beta: &[f64]) -> Vec<f64> {
    let n = design.n_rows();
    let p = design.n_cols();
    let xs = design.values.as_slice().expect("design is row-major");
    let mut eta = vec![0.0; n];
    for i in 0..n {
        let row = &xs[i * p..(i + 1) * p];
        let mut acc = 0.0;
        for a in 0..p {
            acc += row[a] * beta[a];
        }
        eta[i] = acc;
    }
    eta
}

/// Cholesky factor/solve of a symmetric positive-definite system given the
/// upper triangle in a dense p x p buffer. Returns None when a pivot is not
/// positive (rank deficiency).
fn cholesky_solve(upper: &mut [f64], p: usize, rhs: &[f64]) -> Option<Vec<f64>> {
    // Factor A = U^T U in place (upper triangle).
    for i in 0..p {
        let mut d = upper[i * p + i];
        for k in 0..i {
            let uki = upper[k * p + i];
            d -= uki * uki;
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let uii = d.sqrt();
        upper[i * p + i] = uii;
        for j in (i + 1)..p {
            let mut s = upper[i * p + j];
            for k in 0..i {
                s -= upper[k * p + i] * upper[k * p + j];
            }
            upper[i * p + j] = s / uii;
        }
    }
    // Forward solve U^T c = rhs.
    let mut c = vec![0.0; p];
    for i in 0..p {
        let mut s = rhs[i];
        for k in 0..i {
            s -= upper[k * p + i] * c[k];
        }
        c[i] = s / upper[i * p + i];
    }
    // Back solve U beta = c.
    let mut beta = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = c[i];
        for j in (i + 1)..p {
            s -= upper[i * p + j] * beta[j];
        }
        beta[i] = s / upper[i * p + i];
    }
    Some(beta)
}

/// Accumulates the weighted normal equations X'WX (upper triangle) and X'Wz.
/// Rows with zero entries (dummies) are skipped cheaply.
fn weighted_normal_equations(
    design: &DesignMatrix,
    w: &[f64],
    z: &[f64],
    xtwx: &mut [f64],
    xtwz: &mut [f64],
) {
    let n = design.n_rows();
    let p = design.n_cols();
    let xs = design.values.as_slice().expect("design is row-major");
    xtwx.iter_mut().for_each(|v| *v = 0.0);
    xtwz.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..n {
        let row = &xs[i * p..(i + 1) * p];
        let wi = w[i];
        let wzi = wi * z[i];
        for a in 0..p {
            let xa = row[a];
            if xa == 0.0 {
                continue;
            }
            let wxa = wi * xa;
            xtwz[a] += xa * wzi;
            let dst = &mut xtwx[a * p + a..a * p + p];
            let src = &row[a..p];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += wxa * s;
            }
        }
    }
}

struct IrlsOutcome {
    beta: Vec<f64>,
    converged: bool,
    n_iterations: usize,
    deviance: f64,
    diverged: bool,
    rank_deficient: bool,
}

fn irls_loop(
    design: &DesignMatrix,
    y: &[f64],
    family: Family,
    config: &FitConfig,
    ridge: f64,
) -> Result<IrlsOutcome> {
    let n = design.n_rows();
    let p = design.n_cols();
    let intercept_idx = design
        .columns
        .iter()
        .position(|c| matches!(c, Column::Intercept))
        .ok_or_else(|| Error::Fit("design has no intercept column".into()))?;

    let y_mean = y.iter().sum::<f64>() / n as f64;
    let mut beta = vec![0.0; p];
    beta[intercept_idx] = family.initial_intercept(y_mean);

    let mut eta = matvec(design, &beta);
    let mut mu: Vec<f64> = eta.iter().map(|&e| family.clamped_mean(e)).collect();
    let mut deviance = family.deviance(y, &mu);

    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut xtwx = vec![0.0; p * p];
    let mut xtwz = vec![0.0; p];

    let mut converged = false;
    let mut rank_deficient = false;
    let mut n_iterations = 0;

    for _ in 0..config.max_iterations {
        for i in 0..n {
            let wi = family.weight(mu[i]).max(MU_EPS);
            w[i] = wi;
            z[i] = eta[i] + (y[i] - mu[i]) / wi;
        }
        weighted_normal_equations(design, &w, &z, &mut xtwx, &mut xtwz);
        if ridge > 0.0 {
            for a in 0..p {
                xtwx[a * p + a] += ridge;
            }
        }
        let mut factor = xtwx.clone();
        let mut solution = cholesky_solve(&mut factor, p, &xtwz);
        if solution.is_none() && ridge == 0.0 {
            // Rank-deficient normal equations: jitter the diagonal and flag.
            rank_deficient = true;
            let mut jittered = xtwx.clone();
            for a in 0..p {
                jittered[a * p + a] += 1e-8;
            }
            solution = cholesky_solve(&mut jittered, p, &xtwz);
        }
        let proposal = solution
            .ok_or_else(|| Error::Fit("normal equations are numerically singular".into()))?;

        // Step halving: shrink toward the current beta until the deviance
        // does not increase.
        let mut step = 1.0;
        let mut accepted = false;
        let mut new_beta = proposal.clone();
        let mut new_eta: Vec<f64>;
        let mut new_mu: Vec<f64>;
        let mut new_dev = f64::INFINITY;
        for _ in 0..=MAX_HALVINGS {
            if step < 1.0 {
                for a in 0..p {
                    new_beta[a] = beta[a] + step * (proposal[a] - beta[a]);
                }
            }
            new_eta = matvec(design, &new_beta);
            new_mu = new_eta.iter().map(|&e| family.clamped_mean(e)).collect();
            new_dev = family.deviance(y, &new_mu);
            if new_dev.is_finite() && new_dev <= deviance * (1.0 + 1e-12) + 1e-12 {
                eta = new_eta;
                mu = new_mu;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break; // no improving step exists; report the last accepted state
        }
        beta = new_beta;
        n_iterations += 1;

        if beta.iter().any(|&b| b.abs() > config.divergence_guard) {
            return Ok(IrlsOutcome {
                beta,
                converged: false,
                n_iterations,
                deviance: new_dev,
                diverged: true,
                rank_deficient,
            });
        }

        // Regularized relative change, so saturated fits (deviance near 0)
        // terminate instead of spinning until max_iterations.
        let rel_change = (deviance - new_dev).abs() / (deviance.abs() + 0.1);
        deviance = new_dev;
        if rel_change < config.tolerance {
            converged = true;
            break;
        }
    }

    Ok(IrlsOutcome {
        beta,
        converged,
        n_iterations,
        deviance,
        diverged: false,
        rank_deficient,
    })
}

/// Fits the GLM by Fisher scoring with step halving. Rank-deficient normal
/// equations get a 1e-8 diagonal ridge and a flag; divergence (separation)
/// triggers a single refit with ridge 1e-4 and a flag.
pub fn fit_irls(
    design: &DesignMatrix,
    y: &[f64],
    family: Family,
    config: &FitConfig,
) -> Result<FittedGlm> {
    let n = design.n_rows();
    if n == 0 {
        return Err(Error::Fit("cannot fit on zero rows".into()));
    }
    if y.len() != n {
        return Err(Error::Fit(format!(
            "design has {n} rows but the response has {}",
            y.len()
        )));
    }
    family.check_response(y)?;

    // Constant bernoulli response with an intercept-only design: the
    // (clamped) closed form, since the likelihood has no interior maximum.
    if family == Family::BernoulliLogit
        && design.n_cols() == 1
        && matches!(design.columns[0], Column::Intercept)
    {
        let y_mean = y.iter().sum::<f64>() / n as f64;
        if y_mean == 0.0 || y_mean == 1.0 {
            let beta0 = family.initial_intercept(y_mean);
            let mu = family.clamped_mean(beta0);
            return Ok(FittedGlm {
                columns: design.columns.clone(),
                coefficients: vec![beta0],
                converged: true,
                n_iterations: 0,
                deviance: family.deviance(y, &vec![mu; n]),
                family,
                flags: FitFlags::default(),
                ridge: 0.0,
            });
        }
    }

    let first = irls_loop(design, y, family, config, config.ridge)?;
    let (outcome, flags, ridge) = if first.diverged && config.ridge < 1e-4 {
        let refit = irls_loop(design, y, family, config, 1e-4)?;
        let flags = FitFlags {
            rank_deficient: refit.rank_deficient,
            separation_refit: true,
        };
        (refit, flags, 1e-4)
    } else {
        let flags = FitFlags {
            rank_deficient: first.rank_deficient,
            separation_refit: false,
        };
        let ridge = if first.rank_deficient && config.ridge == 0.0 {
            1e-8
        } else {
            config.ridge
        };
        (first, flags, ridge)
    };

    Ok(FittedGlm {
        columns: design.columns.clone(),
        coefficients: outcome.beta,
        converged: outcome.converged && !outcome.diverged,
        n_iterations: outcome.n_iterations,
        deviance: outcome.deviance,
        family,
        flags,
        ridge,
    })
}

/// Mean response per row. Logistic means are clamped to
/// [1e-10, 1 - 1e-10]; the design must carry exactly the model's columns.
pub fn predict_mean(model: &FittedGlm, design: &DesignMatrix) -> Result<Vec<f64>> {
    let eta = model.linear_predictor(design)?;
    Ok(match model.family {
        Family::BernoulliLogit => eta
            .iter()
            .map(|&e| model.family.inverse_link(e).clamp(MU_EPS, 1.0 - MU_EPS))
            .collect(),
        Family::PoissonLog => eta.iter().map(|&e| model.family.inverse_link(e)).collect(),
    })
}

/// Correct classification rate at threshold 0.5; a mean of exactly 0.5
/// classifies as 1.
pub fn ccr(predicted_means: &[f64], y: &[u8]) -> Result<f64> {
    if predicted_means.is_empty() || predicted_means.len() != y.len() {
        return Err(Error::Fit(format!(
            "ccr needs equal, non-empty columns (got {} and {})",
            predicted_means.len(),
            y.len()
        )));
    }
    let hits = predicted_means
        .iter()
        .zip(y)
        .filter(|(&m, &yi)| u8::from(m >= 0.5) == yi)
        .count();
    Ok(hits as f64 / y.len() as f64)
}

/// Root mean square error.
pub fn rmse(predicted_means: &[f64], y: &[f64]) -> Result<f64> {
    if predicted_means.is_empty() || predicted_means.len() != y.len() {
        return Err(Error::Fit(format!(
            "rmse needs equal, non-empty columns (got {} and {})",
            predicted_means.len(),
            y.len()
        )));
    }
    let ss: f64 = predicted_means
        .iter()
        .zip(y)
        .map(|(&m, &yi)| (m - yi) * (m - yi))
        .sum();
    Ok((ss / y.len() as f64).sqrt())
}

/// Sup-norm of the score X'(y - mu); zero at an exact (unridged) maximum of
/// the likelihood under the canonical link.
pub fn score_residual_inf_norm(design: &DesignMatrix, y: &[f64], mu: &[f64]) -> f64 {
    let n = design.n_rows();
    let p = design.n_cols();
    let xs = design.values.as_slice().expect("design is row-major");
    let mut score = vec![0.0; p];
    for i in 0..n {
        let resid = y[i] - mu[i];
        let row = &xs[i * p..(i + 1) * p];
        for a in 0..p {
            score[a] += row[a] * resid;
        }
    }
    score.iter().fold(0.0, |m, &v| m.max(v.abs()))
}
