//! Double well `W(u) = ¼(1−u²)²`.

use crate::Order;

pub fn w(u: f64) -> f64 {
    let a = 1.0 - u * u;
    0.25 * a * a
}

pub fn w1(u: f64) -> f64 {
    u * u * u - u
}

pub fn w2(u: f64) -> f64 {
    3.0 * u * u - 1.0
}

pub fn w3(u: f64) -> f64 {
    6.0 * u
}

pub fn potential_eval(u: f64, order: Order) -> f64 {
    match order {
        Order::Value => w(u),
        Order::First => w1(u),
        Order::Second => w2(u),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_values() {
        assert_eq!(potential_eval(0.0, Order::Value), 0.25);
        assert_eq!(potential_eval(1.0, Order::First), 0.0);
        assert_eq!(potential_eval(1.0, Order::Second), 2.0);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-5;
        for k in 0..=400 {
            let u = -2.0 + 0.01 * k as f64;
            let d1 = (w(u + h) - w(u - h)) / (2.0 * h);
            let d2 = (w1(u + h) - w1(u - h)) / (2.0 * h);
            let d3 = (w2(u + h) - w2(u - h)) / (2.0 * h);
            assert!((d1 - w1(u)).abs() <= 1e-8, "u={u}");
            assert!((d2 - w2(u)).abs() <= 1e-8, "u={u}");
            assert!((d3 - w3(u)).abs() <= 1e-8, "u={u}");
        }
    }

    #[test]
    fn well_shape() {
        assert_eq!(w(1.0), 0.0);
        assert_eq!(w(-1.0), 0.0);
        for k in 0..100 {
            let u = -3.0 + 0.06 * k as f64;
            assert!(w(u) >= 0.0);
            assert_eq!(w(u), w(-u));
        }
    }
}
