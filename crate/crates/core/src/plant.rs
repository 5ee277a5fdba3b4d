//! Incubator thermal dynamics.
//!
//! Two lumped nodes exchange heat by Newton's law of cooling: the heater
//! (capacity `c_heater`) receives `V·I` watts while switched on and leaks into
//! the box air through `g_heater`; the box air (capacity `c_air`) leaks into the
//! room through `g_box`:
//!
//! ```text
//! dT_heater/dt = (on·V·I − g_heater·(T_heater − T_box)) / c_heater
//! dT_box/dt    = (g_heater·(T_heater − T_box) − g_box·(T_box − T_room)) / c_air
//! ```
//!
//! [`step_gt`] integrates the nominal equations with RK4 and is the synthetic
//! measurand. [`step_dt`] is the digital twin: forward Euler on the means plus a
//! linearised variance update carrying state, parameter and truncation
//! uncertainty.

use crate::error::{Error, Result};
use crate::uncertain::UncertainReal;

/// Physical parameters of the incubator, each with its standard uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantParams {
    /// Heat capacity of the box air (J/°C).
    pub c_air: UncertainReal,
    /// Box to room heat transfer coefficient (W/°C).
    pub g_box: UncertainReal,
    /// Heat capacity of the heater (J/°C).
    pub c_heater: UncertainReal,
    /// Heater to air heat transfer coefficient (W/°C).
    pub g_heater: UncertainReal,
    /// Heater supply voltage (V).
    pub v_heater: UncertainReal,
    /// Heater supply current (A).
    pub i_heater: UncertainReal,
    /// Room temperature (°C). Constant over a run.
    pub t_room: UncertainReal,
}

impl Default for PlantParams {
    fn default() -> Self {
        PlantParams {
            c_air: UncertainReal::new(145.697_824_02, 4.370_934_720_6),
            g_box: UncertainReal::new(0.791_541_06, 0.023_746_231_8),
            c_heater: UncertainReal::new(227.762_285_12, 6.832_868_553_6),
            g_heater: UncertainReal::new(1.923_432_77, 0.057_702_983_1),
            v_heater: UncertainReal::new(12.0, 0.12),
            i_heater: UncertainReal::new(3.0, 0.06),
            t_room: UncertainReal::crisp(21.0),
        }
    }
}

impl PlantParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("c_air", self.c_air),
            ("g_box", self.g_box),
            ("c_heater", self.c_heater),
            ("g_heater", self.g_heater),
            ("v_heater", self.v_heater),
            ("i_heater", self.i_heater),
        ];
        for (name, p) in named {
            if !(p.mean() > 0.0) || !p.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "plant.{name} must have a positive finite nominal value, got {p}"
                )));
            }
        }
        if !self.t_room.is_finite() {
            return Err(Error::InvalidConfig("plant.t_room must be finite".into()));
        }
        Ok(())
    }

    /// Nominal heater power while switched on (W).
    pub fn heater_power(&self) -> f64 {
        self.v_heater.mean() * self.i_heater.mean()
    }

    /// Same parameters with every uncertainty removed.
    pub fn crisp(&self) -> PlantParams {
        let c = |u: UncertainReal| UncertainReal::crisp(u.mean());
        PlantParams {
            c_air: c(self.c_air),
            g_box: c(self.g_box),
            c_heater: c(self.c_heater),
            g_heater: c(self.g_heater),
            v_heater: c(self.v_heater),
            i_heater: c(self.i_heater),
            t_room: c(self.t_room),
        }
    }

    /// Box insulation degraded by `factor` (lid opening, box breakage).
    pub fn with_g_box_factor(&self, factor: f64) -> PlantParams {
        PlantParams {
            g_box: self.g_box.scale(factor),
            ..*self
        }
    }

    /// Jacobian of `(dT_box/dt, dT_heater/dt)` with respect to `(T_box, T_heater)`.
    /// The model is linear so it does not depend on the state.
    pub fn jacobian(&self) -> [[f64; 2]; 2] {
        let (ca, gb, ch, gh) = (
            self.c_air.mean(),
            self.g_box.mean(),
            self.c_heater.mean(),
            self.g_heater.mean(),
        );
        [[-(gh + gb) / ca, gh / ca], [gh / ch, -gh / ch]]
    }

    /// Eigenvalues of the Jacobian. Both are real and negative for positive parameters.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let [[a, b], [c, d]] = self.jacobian();
        let tr = a + d;
        let det = a * d - b * c;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        (tr / 2.0 - disc, tr / 2.0 + disc)
    }

    /// Largest forward Euler step for which the linear dynamics stay stable,
    /// i.e. `|1 + h·λ| < 1` for every eigenvalue λ.
    pub fn euler_stability_bound(&self) -> f64 {
        let (fast, slow) = self.eigenvalues();
        2.0 / fast.abs().max(slow.abs())
    }

    /// Analytic fixed point `(T_box, T_heater)` for a constant heater command.
    pub fn steady_state(&self, heater_on: bool) -> (f64, f64) {
        let p = if heater_on { self.heater_power() } else { 0.0 };
        let t_box = self.t_room.mean() + p / self.g_box.mean();
        (t_box, t_box + p / self.g_heater.mean())
    }
}

/// Thermal state of the incubator at a point in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState {
    pub t_box: UncertainReal,
    pub t_heater: UncertainReal,
    /// Seconds since the start of the run.
    pub time: f64,
}

impl PlantState {
    /// Deterministic state with both nodes at `temperature`.
    pub fn at_temperature(temperature: f64) -> Self {
        PlantState {
            t_box: UncertainReal::crisp(temperature),
            t_heater: UncertainReal::crisp(temperature),
            time: 0.0,
        }
    }

    pub fn is_crisp(&self) -> bool {
        self.t_box.is_crisp() && self.t_heater.is_crisp()
    }
}

/// Digital twin solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Euler step size (s).
    pub h: f64,
    /// Truncation uncertainty coefficient: each step adds `k_num·h²` (°C) in quadrature.
    pub k_num: f64,
    /// Standard uncertainty of both state variables at the first step (°C).
    pub sigma_init: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            h: 0.1,
            k_num: 1.828_813_122_585_415_8,
            sigma_init: 0.005,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidConfig(format!("solver.h must be positive, got {}", self.h)));
        }
        if !(self.k_num >= 0.0 && self.k_num.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "solver.k_num must be non-negative, got {}",
                self.k_num
            )));
        }
        if !(self.sigma_init >= 0.0 && self.sigma_init.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "solver.sigma_init must be non-negative, got {}",
                self.sigma_init
            )));
        }
        Ok(())
    }

    /// Standard uncertainty added by a single step's truncation error.
    pub fn step_truncation_std(&self) -> f64 {
        self.k_num * self.h * self.h
    }
}

fn rates(t_box: f64, t_heater: f64, heater_on: bool, p: &PlantParams) -> (f64, f64) {
    let power = if heater_on { p.heater_power() } else { 0.0 };
    let to_air = p.g_heater.mean() * (t_heater - t_box);
    let to_room = p.g_box.mean() * (t_box - p.t_room.mean());
    ((to_air - to_room) / p.c_air.mean(), (power - to_air) / p.c_heater.mean())
}

/// `(dT_box/dt, dT_heater/dt)` at the state means with nominal parameters.
pub fn derivatives(state: &PlantState, heater_on: bool, params: &PlantParams) -> (f64, f64) {
    rates(state.t_box.mean(), state.t_heater.mean(), heater_on, params)
}

/// One RK4 step of the nominal equations. The result is crisp.
pub fn step_gt(state: &PlantState, heater_on: bool, params: &PlantParams, h: f64) -> PlantState {
    let (b0, h0) = (state.t_box.mean(), state.t_heater.mean());
    let (kb1, kh1) = rates(b0, h0, heater_on, params);
    let (kb2, kh2) = rates(b0 + 0.5 * h * kb1, h0 + 0.5 * h * kh1, heater_on, params);
    let (kb3, kh3) = rates(b0 + 0.5 * h * kb2, h0 + 0.5 * h * kh2, heater_on, params);
    let (kb4, kh4) = rates(b0 + h * kb3, h0 + h * kh3, heater_on, params);
    PlantState {
        t_box: UncertainReal::crisp(b0 + h / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4)),
        t_heater: UncertainReal::crisp(h0 + h / 6.0 * (kh1 + 2.0 * kh2 + 2.0 * kh3 + kh4)),
        time: state.time + h,
    }
}

/// One forward Euler step of the digital twin.
///
/// Means follow `x + h·f(x)`. Variances follow the first-order update
/// `σ'² = (1 + h·∂f/∂x)²σ² + (h·∂f/∂y)²σ_y² + Σ (h·∂f/∂θ)²σ_θ² + (k_num·h²)²`
/// where `y` is the other state variable and `θ` ranges over the uncertain
/// parameters. The two state variables are propagated independently.
pub fn step_dt(
    state: &PlantState,
    heater_on: bool,
    params: &PlantParams,
    solver: &SolverConfig,
) -> Result<PlantState> {
    let h = solver.h;
    let (tb, th) = (state.t_box.mean(), state.t_heater.mean());
    let (fb, fh) = rates(tb, th, heater_on, params);
    let [[jbb, jbh], [jhb, jhh]] = params.jacobian();

    let ca = params.c_air.mean();
    let ch = params.c_heater.mean();
    let gap = th - tb;
    let lift = tb - params.t_room.mean();

    let sq = |x: f64| x * x;
    let on = if heater_on { 1.0 } else { 0.0 };

    let box_params = sq(gap / ca * params.g_heater.std())
        + sq(lift / ca * params.g_box.std())
        + sq(fb / ca * params.c_air.std())
        + sq(params.g_box.mean() / ca * params.t_room.std());
    let heater_params = sq(on * params.i_heater.mean() / ch * params.v_heater.std())
        + sq(on * params.v_heater.mean() / ch * params.i_heater.std())
        + sq(gap / ch * params.g_heater.std())
        + sq(fh / ch * params.c_heater.std());
    let truncation = sq(solver.step_truncation_std());

    let var_box = sq(1.0 + h * jbb) * state.t_box.variance()
        + sq(h * jbh) * state.t_heater.variance()
        + h * h * box_params
        + truncation;
    let var_heater = sq(1.0 + h * jhh) * state.t_heater.variance()
        + sq(h * jhb) * state.t_box.variance()
        + h * h * heater_params
        + truncation;

    let next_box = tb + h * fb;
    let next_heater = th + h * fh;
    let time = state.time + h;

    let t_box = UncertainReal::try_new(next_box, var_box.sqrt()).map_err(|_| Error::SimulationFault {
        time,
        detail: format!("non-finite box temperature {next_box} ± {}", var_box.sqrt()),
    })?;
    let t_heater =
        UncertainReal::try_new(next_heater, var_heater.sqrt()).map_err(|_| Error::SimulationFault {
            time,
            detail: format!("non-finite heater temperature {next_heater} ± {}", var_heater.sqrt()),
        })?;
    Ok(PlantState { t_box, t_heater, time })
}

/// Replace the box temperature with a more certain estimate.
pub fn reset_state(state: &PlantState, new_t_box: UncertainReal) -> Result<PlantState> {
    if new_t_box.std() > state.t_box.std() {
        return Err(Error::ResetIncreasesUncertainty {
            current: state.t_box.std(),
            requested: new_t_box.std(),
        });
    }
    Ok(PlantState {
        t_box: new_t_box,
        ..*state
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> PlantParams {
        PlantParams::default()
    }

    #[test]
    fn equilibrium_has_zero_derivatives() {
        let p = params();
        let s = PlantState::at_temperature(p.t_room.mean());
        assert_eq!(derivatives(&s, false, &p), (0.0, 0.0));
    }

    #[test]
    fn heater_power_enters_heater_node() {
        let p = params();
        let s = PlantState::at_temperature(p.t_room.mean());
        let (db, dh) = derivatives(&s, true, &p);
        assert_eq!(db, 0.0);
        assert!((dh - 36.0 / 227.762_285_12).abs() < 1e-15);
        assert!(dh > 0.0);
    }

    #[test]
    fn derivatives_by_hand() {
        let p = params();
        let s = PlantState {
            t_box: UncertainReal::crisp(25.0),
            t_heater: UncertainReal::crisp(45.0),
            time: 0.0,
        };
        let (db, dh) = derivatives(&s, false, &p);
        // (1.92343277·20 − 0.79154106·4) / 145.69782402
        let expected_box = (38.468_655_4 - 3.166_164_24) / 145.697_824_02;
        // −1.92343277·20 / 227.76228512
        let expected_heater = -38.468_655_4 / 227.762_285_12;
        assert!((db - expected_box).abs() < 1e-12);
        assert!((dh - expected_heater).abs() < 1e-12);
    }

    #[test]
    fn gt_step_at_equilibrium_only_advances_time() {
        let p = params();
        let s = PlantState::at_temperature(21.0);
        let n = step_gt(&s, false, &p, 0.1);
        assert_eq!(n.t_box, s.t_box);
        assert_eq!(n.t_heater, s.t_heater);
        assert!((n.time - 0.1).abs() < 1e-15);
    }

    #[test]
    fn gt_step_is_a_pure_function() {
        let p = params();
        let s = PlantState {
            t_box: UncertainReal::crisp(30.0),
            t_heater: UncertainReal::crisp(50.0),
            time: 12.0,
        };
        let a = step_gt(&step_gt(&s, true, &p, 0.1), true, &p, 0.1);
        let b = step_gt(&step_gt(&s, true, &p, 0.1), true, &p, 0.1);
        assert_eq!(a, b);
        assert!(a.is_crisp());
    }

    #[test]
    fn dt_degenerates_to_crisp_euler() {
        let p = params().crisp();
        let solver = SolverConfig {
            h: 0.1,
            k_num: 0.0,
            sigma_init: 0.0,
        };
        let mut s = PlantState::at_temperature(21.0);
        let (mut b, mut hh) = (21.0f64, 21.0f64);
        for k in 0..5000 {
            let on = (k / 700) % 2 == 0;
            s = step_dt(&s, on, &p, &solver).unwrap();
            let (fb, fh) = rates(b, hh, on, &p);
            b += 0.1 * fb;
            hh += 0.1 * fh;
            assert_eq!(s.t_box.std(), 0.0);
            assert_eq!(s.t_heater.std(), 0.0);
        }
        assert_eq!(s.t_box.mean().to_bits(), b.to_bits());
        assert_eq!(s.t_heater.mean().to_bits(), hh.to_bits());
    }

    #[test]
    fn truncation_term_grows_uncertainty() {
        let p = params();
        let solver = SolverConfig {
            h: 0.1,
            k_num: 2.0,
            sigma_init: 0.005,
        };
        let s = PlantState {
            t_box: UncertainReal::new(37.0, 0.005),
            t_heater: UncertainReal::new(45.0, 0.005),
            time: 0.0,
        };
        let n = step_dt(&s, true, &p, &solver).unwrap();
        assert!(n.t_box.std() > s.t_box.std());
    }

    #[test]
    fn dt_rejects_non_finite_state() {
        let p = params();
        let s = PlantState {
            t_box: UncertainReal::crisp(f64::MAX),
            t_heater: UncertainReal::crisp(-f64::MAX),
            time: 3.0,
        };
        let err = step_dt(&s, true, &p, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::SimulationFault { .. }));
    }

    #[test]
    fn reset_cases() {
        let s = PlantState {
            t_box: UncertainReal::new(37.0, 0.29),
            t_heater: UncertainReal::new(50.0, 0.4),
            time: 99.0,
        };
        assert_eq!(reset_state(&s, s.t_box).unwrap(), s);

        let r = reset_state(&s, UncertainReal::new(37.3, 0.09)).unwrap();
        assert_eq!(r.t_box, UncertainReal::new(37.3, 0.09));
        assert_eq!(r.t_heater, s.t_heater);
        assert_eq!(r.time, s.time);

        assert!(matches!(
            reset_state(&s, UncertainReal::new(37.0, 0.3)),
            Err(Error::ResetIncreasesUncertainty { .. })
        ));
    }

    #[test]
    fn steady_state_fixed_point_is_stationary() {
        let p = params();
        let (tb, th) = p.steady_state(true);
        let s = PlantState {
            t_box: UncertainReal::crisp(tb),
            t_heater: UncertainReal::crisp(th),
            time: 0.0,
        };
        let (db, dh) = derivatives(&s, true, &p);
        assert!(db.abs() < 1e-12 && dh.abs() < 1e-12);
    }

    #[test]
    fn stability_bound_matches_eigenvalues() {
        let p = params();
        let bound = p.euler_stability_bound();
        let (fast, _) = p.eigenvalues();
        assert!((1.0 + bound * fast).abs() - 1.0 < 1e-12);
        let [[a, b], [c, d]] = p.jacobian();
        let (l1, l2) = p.eigenvalues();
        assert!(((l1 + l2) - (a + d)).abs() < 1e-15);
        assert!((l1 * l2 - (a * d - b * c)).abs() < 1e-15);
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = params();
        p.g_box = UncertainReal::crisp(0.0);
        assert!(p.validate().is_err());
        assert!(params().validate().is_ok());
    }
}
