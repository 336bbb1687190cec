//! First-order forward-mode dual numbers over the three state variables.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: [f64; 3],
}

impl Dual {
    pub fn variable(var: usize, at: f64) -> Dual {
        let mut d = [0.0; 3];
        d[var] = 1.0;
        Dual { v: at, d }
    }
}

impl Add for Dual {
    type Output = Dual;
    #[inline]
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, d: [self.d[0] + o.d[0], self.d[1] + o.d[1], self.d[2] + o.d[2]] }
    }
}

impl Sub for Dual {
    type Output = Dual;
    #[inline]
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, d: [self.d[0] - o.d[0], self.d[1] - o.d[1], self.d[2] - o.d[2]] }
    }
}

impl Mul for Dual {
    type Output = Dual;
    #[inline]
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: [0, 1, 2].map(|i| self.d[i] * o.v + self.v * o.d[i]),
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    #[inline]
    fn div(self, o: Dual) -> Dual {
        let inv = 1.0 / o.v;
        let q = self.v * inv;
        Dual { v: q, d: [0, 1, 2].map(|i| (self.d[i] - q * o.d[i]) * inv) }
    }
}

impl Neg for Dual {
    type Output = Dual;
    #[inline]
    fn neg(self) -> Dual {
        Dual { v: -self.v, d: self.d.map(|x| -x) }
    }
}

impl Scalar for Dual {
    fn cst(value: f64) -> Self {
        Dual { v: value, d: [0.0; 3] }
    }

    fn value(&self) -> f64 {
        self.v
    }
}
