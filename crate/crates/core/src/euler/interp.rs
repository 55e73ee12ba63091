use crate::scalar::Real;

/// Trigonometric interpolant of cell-centre samples `values[j]` at
/// `X_j = (j + ½)/N`, evaluated at arbitrary points of the unit torus. The
/// Nyquist mode (even `N`) is split evenly between `±N/2` so the interpolant
/// stays real.
pub fn periodic_interpolate<T: Real>(values: &[T], xs: &[T]) -> Vec<T> {
    let n = values.len();
    if n == 0 {
        return vec![T::zero(); xs.len()];
    }
    let two_pi = T::two_pi();
    let inv_n = T::one() / T::of_usize(n);
    let kmax = (n / 2) as i64;
    let even = n % 2 == 0;
    // coefficients c_k = (1/N) Σ f_j e^{−2πik X_j} for k = 0..=kmax as (re, im)
    let coef: Vec<(T, T, T)> = (0..=kmax)
        .map(|k| {
            let (mut re, mut im) = (T::zero(), T::zero());
            for (j, &f) in values.iter().enumerate() {
                let x = (T::of_usize(j) + T::of(0.5)) * inv_n;
                let ph = two_pi * T::of(k as f64) * x;
                re += f * ph.cos();
                im -= f * ph.sin();
            }
            let w = if k == 0 {
                T::one()
            } else if even && k == kmax {
                T::one() // ½ from each of ±N/2, doubled by the real part below
            } else {
                T::of(2.0)
            };
            (re * inv_n, im * inv_n, w)
        })
        .collect();
    xs.iter()
        .map(|&x| {
            let mut s = T::zero();
            for (k, &(re, im, w)) in coef.iter().enumerate() {
                let ph = two_pi * T::of_usize(k) * x;
                s += w * (re * ph.cos() - im * ph.sin());
            }
            s
        })
        .collect()
}
