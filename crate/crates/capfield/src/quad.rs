//! Adaptive 1-D quadrature: 15-point Gauss–Kronrod panels refined by a
//! worst-error-first interval heap. Panels can be seeded with breakpoints so
//! that integrands peaked near a known location start resolved.

use std::collections::BinaryHeap;

// QUADPACK qk15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    err
}

fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let abs_h = h.abs();

    let f_center = f(c);
    let mut res_gauss = WG[3] * f_center;
    let mut res_kronrod = WGK[7] * f_center;
    let mut res_abs = WGK[7] * f_center.abs();
    let mut samples = [0.0_f64; 15];
    samples[7] = f_center;

    for j in 0..3 {
        let x = h * XGK[2 * j + 1];
        let f1 = f(c - x);
        let f2 = f(c + x);
        samples[2 * j + 1] = f1;
        samples[14 - (2 * j + 1)] = f2;
        res_gauss += WG[j] * (f1 + f2);
        res_kronrod += WGK[2 * j + 1] * (f1 + f2);
        res_abs += WGK[2 * j + 1] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let x = h * XGK[2 * j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        samples[2 * j] = f1;
        samples[14 - 2 * j] = f2;
        res_kronrod += WGK[2 * j] * (f1 + f2);
        res_abs += WGK[2 * j] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = 0.0;
    for (i, s) in samples.iter().enumerate() {
        let w = if i <= 7 { WGK[i] } else { WGK[14 - i] };
        res_asc += w * (s - mean).abs();
    }

    let value = res_kronrod * h;
    let raw_err = (res_kronrod - res_gauss) * h;
    let err = rescale_error(raw_err, res_abs * abs_h, res_asc * abs_h);
    (value, err)
}

/// Accuracy targets for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_panels: 4000,
        }
    }
}

/// Integrate f over [a, b] with interior breakpoints seeding the initial
/// panels. Refinement stops once the summed panel errors drop below
/// max(abs_tol, rel_tol·|value|) or the panel budget is exhausted.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadConfig,
) -> QuadResult {
    let QuadConfig {
        abs_tol,
        rel_tol,
        max_panels,
    } = *cfg;
    if a == b {
        return QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let mut edges: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    for &p in breakpoints {
        if p > a && p < b {
            edges.push(p);
        }
    }
    edges.push(b);
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evals = 0;
    for w in edges.windows(2) {
        let (v, e) = qk15(&f, w[0], w[1]);
        evals += 15;
        value += v;
        error += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }

    while error > abs_tol.max(rel_tol * value.abs()) && heap.len() < max_panels {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; put it back and stop
            heap.push(worst);
            break;
        }
        let (v1, e1) = qk15(&f, worst.a, mid);
        let (v2, e2) = qk15(&f, mid, worst.b);
        evals += 30;
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    // recompute sums from the heap to shed accumulated cancellation
    let mut v_sum = 0.0;
    let mut e_sum = 0.0;
    for p in heap.iter() {
        v_sum += p.value;
        e_sum += p.error;
    }
    let converged = e_sum <= abs_tol.max(rel_tol * v_sum.abs());
    QuadResult {
        value: v_sum,
        abs_error: e_sum,
        evaluations: evals,
        converged,
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> QuadResult {
    integrate_with_breakpoints(f, a, b, &[], cfg)
}

/// Breakpoints anchor ± scale·2^j (j ≥ 0) clipped to (a, b), for integrands
/// peaked at `anchor` with an intrinsic width of order `scale`.
pub fn geometric_breakpoints(anchor: f64, scale: f64, a: f64, b: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    if scale <= 0.0 || !(a..=b).contains(&anchor) && (anchor < a - (b - a) || anchor > b + (b - a))
    {
        return pts;
    }
    pts.push(anchor);
    let span = b - a;
    let mut w = scale;
    while w < span {
        pts.push(anchor - w);
        pts.push(anchor + w);
        w *= 2.0;
    }
    pts.retain(|&p| p > a && p < b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}
