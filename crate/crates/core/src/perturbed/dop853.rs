//! Dormand–Prince 8(5,3) embedded Runge–Kutta step for a four-dimensional
//! autonomous system.

#![allow(clippy::excessive_precision)]

pub(crate) type Vec4 = [f64; 4];

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;

const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;

const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

#[inline]
fn axpy(y: &Vec4, terms: &[(f64, &Vec4)], h: f64) -> Vec4 {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Result of one trial step of size `h` from `y` with `k1 = f(y)`.
pub(crate) struct Trial {
    pub y: Vec4,
    /// Scaled error norm; the step is acceptable when `err <= 1`.
    pub err: f64,
}

pub(crate) fn trial<F: Fn(&Vec4) -> Vec4>(
    f: &F,
    y: &Vec4,
    k1: &Vec4,
    h: f64,
    atol: f64,
    rtol: f64,
) -> Trial {
    let k2 = f(&axpy(y, &[(A21, k1)], h));
    let k3 = f(&axpy(y, &[(A31, k1), (A32, &k2)], h));
    let k4 = f(&axpy(y, &[(A41, k1), (A43, &k3)], h));
    let k5 = f(&axpy(y, &[(A51, k1), (A53, &k3), (A54, &k4)], h));
    let k6 = f(&axpy(y, &[(A61, k1), (A64, &k4), (A65, &k5)], h));
    let k7 = f(&axpy(
        y,
        &[(A71, k1), (A74, &k4), (A75, &k5), (A76, &k6)],
        h,
    ));
    let k8 = f(&axpy(
        y,
        &[(A81, k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)],
        h,
    ));
    let k9 = f(&axpy(
        y,
        &[
            (A91, k1),
            (A94, &k4),
            (A95, &k5),
            (A96, &k6),
            (A97, &k7),
            (A98, &k8),
        ],
        h,
    ));
    let k10 = f(&axpy(
        y,
        &[
            (A101, k1),
            (A104, &k4),
            (A105, &k5),
            (A106, &k6),
            (A107, &k7),
            (A108, &k8),
            (A109, &k9),
        ],
        h,
    ));
    let k11 = f(&axpy(
        y,
        &[
            (A111, k1),
            (A114, &k4),
            (A115, &k5),
            (A116, &k6),
            (A117, &k7),
            (A118, &k8),
            (A119, &k9),
            (A1110, &k10),
        ],
        h,
    ));
    let k12 = f(&axpy(
        y,
        &[
            (A121, k1),
            (A124, &k4),
            (A125, &k5),
            (A126, &k6),
            (A127, &k7),
            (A128, &k8),
            (A129, &k9),
            (A1210, &k10),
            (A1211, &k11),
        ],
        h,
    ));
    let mut slope = [0.0; 4];
    for i in 0..4 {
        slope[i] = B1 * k1[i]
            + B6 * k6[i]
            + B7 * k7[i]
            + B8 * k8[i]
            + B9 * k9[i]
            + B10 * k10[i]
            + B11 * k11[i]
            + B12 * k12[i];
    }
    let y_new = axpy(y, &[(1.0, &slope)], h);
    let (mut err, mut err2) = (0.0, 0.0);
    for i in 0..4 {
        let sk = atol + rtol * y[i].abs().max(y_new[i].abs());
        let e3 = slope[i] - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
        err2 += (e3 / sk).powi(2);
        let e5 = ER1 * k1[i]
            + ER6 * k6[i]
            + ER7 * k7[i]
            + ER8 * k8[i]
            + ER9 * k9[i]
            + ER10 * k10[i]
            + ER11 * k11[i]
            + ER12 * k12[i];
        err += (e5 / sk).powi(2);
    }
    let mut deno = err + 0.01 * err2;
    if deno <= 0.0 {
        deno = 1.0;
    }
    Trial {
        y: y_new,
        err: h.abs() * err * (1.0 / (deno * 4.0)).sqrt(),
    }
}

/// Step-size controller with the standard DOP853 constants.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Controller {
    facold: f64,
}

impl Controller {
    const SAFE: f64 = 0.9;
    const FAC_MIN: f64 = 1.0 / 3.0;
    const FAC_MAX: f64 = 6.0;

    pub fn new() -> Self {
        Self { facold: 1e-4 }
    }

    /// Next step size after a trial with error `err`.
    pub fn next(&mut self, h: f64, err: f64, rejected_before: bool) -> f64 {
        let fac11 = err.powf(0.125);
        if err <= 1.0 {
            self.facold = err.max(1e-4);
            let fac = (fac11 / Self::SAFE).clamp(1.0 / Self::FAC_MAX, 1.0 / Self::FAC_MIN);
            let h_new = h / fac;
            if rejected_before {
                h_new.abs().min(h.abs()).copysign(h)
            } else {
                h_new
            }
        } else {
            h / (1.0 / Self::FAC_MIN).min(fac11 / Self::SAFE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        // x'' = -x, y'' = -4y
        let f = |s: &Vec4| [s[2], s[3], -s[0], -4.0 * s[1]];
        let mut y = [1.0, 0.0, 0.0, 2.0];
        let mut t = 0.0;
        let mut h: f64 = 0.01;
        let mut ctl = Controller::new();
        let period = std::f64::consts::TAU;
        let mut rejected = false;
        while t < period {
            let h_try = h.min(period - t);
            let tr = trial(&f, &y, &f(&y), h_try, 1e-13, 1e-13);
            if tr.err <= 1.0 {
                t += h_try;
                y = tr.y;
                h = ctl.next(h_try, tr.err, rejected);
                rejected = false;
            } else {
                h = ctl.next(h_try, tr.err, rejected);
                rejected = true;
            }
        }
        assert!((y[0] - 1.0).abs() < 1e-11);
        assert!(y[1].abs() < 1e-11);
        assert!(y[2].abs() < 1e-11);
        assert!((y[3] - 2.0).abs() < 1e-11);
    }

    #[test]
    fn eighth_order_convergence() {
        // fixed steps on x' = y, y' = -x over one unit of time
        let f = |s: &Vec4| [s[1], -s[0], 0.0, 0.0];
        let error = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = [1.0, 0.0, 0.0, 0.0];
            for _ in 0..n {
                y = trial(&f, &y, &f(&y), h, 1.0, 1.0).y;
            }
            (y[0] - 1.0_f64.cos()).abs()
        };
        let ratio = error(4) / error(8);
        assert!(ratio > 2f64.powi(7), "ratio {ratio}");
    }
}
