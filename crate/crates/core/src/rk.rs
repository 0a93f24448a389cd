//! Dormand–Prince 5(4) with first-same-as-last and an external step cap.

/// Why a right-hand side evaluation could not be completed.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct StageFailure(pub String);

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum StopReason {
    /// The state left the admissible set and shrinking the step did not help.
    Halted { t: f64, reason: String },
    /// Error control drove the step below the floor.
    Underflow { t: f64, dt: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive integrator state carried between output intervals. The system is autonomous.
pub(crate) struct DormandPrince {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Suggested next step.
    pub h: f64,
    pub stats: StepStats,
    k: Vec<Vec<f64>>,
    /// `k[0]` holds the derivative at the current state, with its step cap.
    fsal: Option<f64>,
    stage: Vec<f64>,
    y_new: Vec<f64>,
}

impl DormandPrince {
    pub fn new(dim: usize, rel_tol: f64, abs_tol: f64, h0: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            h: h0,
            stats: StepStats::default(),
            k: vec![vec![0.0; dim]; 7],
            fsal: None,
            stage: vec![0.0; dim],
            y_new: vec![0.0; dim],
        }
    }

    /// Advances `y` from `t` to exactly `t_end`. The right-hand side writes the
    /// derivative and returns the largest step it allows at that state.
    pub fn advance<F>(&mut self, rhs: &mut F, t: &mut f64, y: &mut [f64], t_end: f64) -> Result<(), StopReason>
    where
        F: FnMut(&[f64], &mut [f64]) -> Result<f64, StageFailure>,
    {
        let h_floor = 1e-13 * t_end.abs().max(1.0);
        while *t < t_end {
            let cap = match self.fsal {
                Some(cap) => cap,
                None => {
                    let cap = rhs(y, &mut self.k[0]).map_err(|f| StopReason::Halted { t: *t, reason: f.0 })?;
                    self.fsal = Some(cap);
                    cap
                }
            };
            let remaining = t_end - *t;
            let mut h = self.h.min(cap);
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }

            match self.try_step(rhs, y, h) {
                Ok((err, cap_new)) if err <= 1.0 => {
                    y.copy_from_slice(&self.y_new);
                    self.k.swap(0, 6);
                    self.fsal = Some(cap_new);
                    *t = if last { t_end } else { *t + h };
                    self.stats.accepted += 1;
                    let grow = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
                    // Keep the controller's suggestion when the step was shortened to hit t_end.
                    if !last {
                        self.h = h * grow.clamp(0.2, 5.0);
                    }
                }
                Ok((err, _)) => {
                    self.stats.rejected += 1;
                    self.h = h * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                    if self.h < h_floor {
                        return Err(StopReason::Underflow { t: *t, dt: self.h });
                    }
                }
                Err(failure) => {
                    self.stats.rejected += 1;
                    self.h = h * 0.25;
                    if self.h < h_floor {
                        return Err(StopReason::Halted { t: *t, reason: failure.0 });
                    }
                }
            }
        }
        Ok(())
    }

    /// One trial step; returns the scaled error norm and the cap at the new state.
    fn try_step<F>(&mut self, rhs: &mut F, y: &[f64], h: f64) -> Result<(f64, f64), StageFailure>
    where
        F: FnMut(&[f64], &mut [f64]) -> Result<f64, StageFailure>,
    {
        let dim = y.len();
        let mut cap_new = f64::INFINITY;
        for s in 1..7 {
            let out = if s == 6 { &mut self.y_new } else { &mut self.stage };
            for i in 0..dim {
                let mut acc = 0.0;
                for (q, a) in A[s].iter().enumerate().take(s) {
                    acc += a * self.k[q][i];
                }
                out[i] = y[i] + h * acc;
            }
            let (_, tail) = self.k.split_at_mut(s);
            let src = if s == 6 { &self.y_new } else { &self.stage };
            let cap = rhs(src, &mut tail[0])?;
            if s == 6 {
                cap_new = cap;
            }
        }

        let mut sum = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for (q, w) in E.iter().enumerate() {
                e += w * self.k[q][i];
            }
            let sc = self.abs_tol + self.rel_tol * y[i].abs().max(self.y_new[i].abs());
            sum += (h * e / sc).powi(2);
        }
        Ok(((sum / dim as f64).sqrt(), cap_new))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_to_tolerance() {
        let mut rk = DormandPrince::new(1, 1e-10, 1e-12, 0.1);
        let mut rhs = |y: &[f64], dy: &mut [f64]| {
            dy[0] = 0.5 * y[0];
            Ok(f64::INFINITY)
        };
        let mut y = [4.0];
        let mut t = 0.0;
        rk.advance(&mut rhs, &mut t, &mut y, 2.0).unwrap();
        assert_eq!(t, 2.0);
        assert!((y[0] - 4.0 * 1f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn fifth_order_on_oscillator() {
        // Fixed steps through the cap; halving h should cut the error by ~32.
        let run = |h: f64| {
            let mut rk = DormandPrince::new(2, 1.0, 1.0, h);
            let mut rhs = |y: &[f64], dy: &mut [f64]| {
                dy[0] = y[1];
                dy[1] = -y[0];
                Ok(h)
            };
            let mut y = [1.0, 0.0];
            let mut t = 0.0;
            rk.advance(&mut rhs, &mut t, &mut y, 1.0).unwrap();
            (y[0] - 1f64.cos()).abs()
        };
        let order = (run(0.1) / run(0.05)).log2();
        assert!(order > 4.5, "observed order {order}");
    }

    #[test]
    fn persistent_stage_failure_halts() {
        let mut rk = DormandPrince::new(1, 1e-8, 1e-8, 0.1);
        let mut rhs = |y: &[f64], dy: &mut [f64]| {
            if y[0] > 1.5 {
                return Err(StageFailure("too big".into()));
            }
            dy[0] = 1.0;
            Ok(f64::INFINITY)
        };
        let mut y = [1.0];
        let mut t = 0.0;
        let stop = rk.advance(&mut rhs, &mut t, &mut y, 2.0).unwrap_err();
        assert!(matches!(stop, StopReason::Halted { .. }));
        assert!(y[0] <= 1.5);
    }
}
