//! Dormand–Prince 5(4) tableau, one trial step, and the continuous
//! extension of order 4 (Hairer, Nørsett & Wanner, "Solving ODEs I").

pub(crate) type State = [f64; 2];

// Nodes. The field is autonomous, so only the tableau test reads them.
#[cfg(test)]
const C2: f64 = 1.0 / 5.0;
#[cfg(test)]
const C3: f64 = 3.0 / 10.0;
#[cfg(test)]
const C4: f64 = 4.0 / 5.0;
#[cfg(test)]
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[inline]
fn axpy(y: State, h: f64, terms: &[(f64, State)]) -> State {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Stages of one trial step from `y0` with step `h`.
pub(crate) struct Trial {
    pub y1: State,
    pub k: [State; 7],
    pub err: State,
}

/// Attempt a step. `f` returns `None` when a stage leaves the domain or
/// produces non-finite values; the caller then shrinks `h`.
pub(crate) fn try_step<F>(f: &F, y0: State, k1: State, h: f64) -> Option<Trial>
where
    F: Fn(State) -> Option<State>,
{
    let k2 = f(axpy(y0, h, &[(A21, k1)]))?;
    let k3 = f(axpy(y0, h, &[(A31, k1), (A32, k2)]))?;
    let k4 = f(axpy(y0, h, &[(A41, k1), (A42, k2), (A43, k3)]))?;
    let k5 = f(axpy(y0, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]))?;
    let k6 = f(axpy(
        y0,
        h,
        &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
    ))?;
    let y1 = axpy(
        y0,
        h,
        &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)],
    );
    let k7 = f(y1)?;
    let err = axpy(
        [0.0, 0.0],
        h,
        &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)],
    );
    Some(Trial {
        y1,
        k: [k1, k2, k3, k4, k5, k6, k7],
        err,
    })
}

/// Scaled RMS norm used by the step controller.
pub(crate) fn error_norm(err: State, y0: State, y1: State, atol: f64, rtol: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        let sc = atol + rtol * y0[i].abs().max(y1[i].abs());
        s += (err[i] / sc).powi(2);
    }
    (s / 2.0).sqrt()
}

/// Continuous extension over one accepted step, in the step fraction θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseStep {
    /// Time at θ = 0.
    pub t0: f64,
    /// Signed time increment (negative for backward integration).
    pub dt: f64,
    r: [State; 5],
}

impl DenseStep {
    pub(crate) fn new(t0: f64, dt: f64, h: f64, y0: State, trial: &Trial) -> Self {
        let [k1, _, k3, k4, k5, k6, k7] = trial.k;
        let mut r = [[0.0; 2]; 5];
        for i in 0..2 {
            let ydiff = trial.y1[i] - y0[i];
            let bspl = h * k1[i] - ydiff;
            r[0][i] = y0[i];
            r[1][i] = ydiff;
            r[2][i] = bspl;
            r[3][i] = ydiff - h * k7[i] - bspl;
            r[4][i] =
                h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        Self { t0, dt, r }
    }

    /// Interpolated `(x, y)` at fraction `theta` of the step.
    pub fn state(&self, theta: f64) -> State {
        let t1 = 1.0 - theta;
        let r = &self.r;
        let mut out = [0.0; 2];
        for (i, o) in out.iter_mut().enumerate() {
            *o = r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
        }
        out
    }

    /// d(x, y)/dθ of the interpolant.
    pub fn dstate(&self, theta: f64) -> State {
        let t1 = 1.0 - theta;
        let r = &self.r;
        let mut out = [0.0; 2];
        for (i, o) in out.iter_mut().enumerate() {
            let a = r[3][i] + t1 * r[4][i];
            let da = -r[4][i];
            let b = r[2][i] + theta * a;
            let db = a + theta * da;
            let c = r[1][i] + t1 * b;
            let dc = -b + t1 * db;
            *o = c + theta * dc;
        }
        out
    }

    pub fn time(&self, theta: f64) -> f64 {
        self.t0 + theta * self.dt
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_row_sums_match_nodes() {
        assert!((A21 - C2).abs() < 1e-16);
        assert!((A31 + A32 - C3).abs() < 1e-16);
        assert!((A41 + A42 + A43 - C4).abs() < 1e-15);
        assert!((A51 + A52 + A53 + A54 - C5).abs() < 1e-14);
        assert!((A61 + A62 + A63 + A64 + A65 - 1.0).abs() < 1e-14);
        assert!((A71 + A73 + A74 + A75 + A76 - 1.0).abs() < 1e-15);
        assert!((E1 + E3 + E4 + E5 + E6 + E7).abs() < 1e-16);
    }

    #[test]
    fn dense_output_interpolates_endpoints_and_slopes() {
        // Harmonic oscillator x' = y, y' = -x.
        let f = |s: State| Some([s[1], -s[0]]);
        let y0 = [0.3, 0.8];
        let h = 0.2;
        let trial = try_step(&f, y0, f(y0).unwrap(), h).unwrap();
        let d = DenseStep::new(0.0, h, h, y0, &trial);
        assert_eq!(d.state(0.0), y0);
        let e = d.state(1.0);
        assert!((e[0] - trial.y1[0]).abs() < 1e-16 && (e[1] - trial.y1[1]).abs() < 1e-16);
        // Slopes at the ends equal h·f.
        let s0 = d.dstate(0.0);
        let s1 = d.dstate(1.0);
        assert!((s0[0] - h * 0.8).abs() < 1e-15);
        assert!((s1[1] + h * trial.y1[0]).abs() < 1e-15);
    }

    #[test]
    fn dense_output_is_fourth_order() {
        // Local interpolation error at θ = 1/2 shrinks like h⁵.
        let f = |s: State| Some([s[1], -s[0]]);
        let y0 = [0.3, 0.8];
        let mid_err = |h: f64| {
            let trial = try_step(&f, y0, f(y0).unwrap(), h).unwrap();
            let d = DenseStep::new(0.0, h, h, y0, &trial);
            let (c, s) = ((0.5 * h).cos(), (0.5 * h).sin());
            let exact = [y0[0] * c + y0[1] * s, -y0[0] * s + y0[1] * c];
            let m = d.state(0.5);
            (m[0] - exact[0]).hypot(m[1] - exact[1])
        };
        let ratio = mid_err(0.4) / mid_err(0.2);
        assert!(ratio > 24.0 && ratio < 40.0, "ratio {ratio}");
        assert!(mid_err(0.05) < 1e-9);
    }
}
