/// Box constraints `lower ≤ q ≤ upper`; either side may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> crate::Result<Self> {
        if !(lower < upper) {
            return Err(crate::Error::Precondition(format!(
                "bounds require a < b, got [{lower}, {upper}]"
            )));
        }
        Ok(Bounds { lower, upper })
    }

    pub fn symmetric(b: f64) -> Self {
        Bounds { lower: -b, upper: b }
    }

    pub fn unbounded() -> Self {
        Bounds {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }

    pub fn project(&self, v: f64) -> f64 {
        project_interval(v, self.lower, self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// `min(b, max(a, v))`, defined for infinite `v` and infinite bounds.
pub fn project_interval(v: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    if v < a {
        a
    } else if v > b {
        b
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_values() {
        assert_eq!(project_interval(0.5, -1.0, 1.0), 0.5);
        assert_eq!(project_interval(2.0, -1.0, 1.0), 1.0);
        assert_eq!(project_interval(f64::NEG_INFINITY, -0.2, 0.2), -0.2);
        assert_eq!(project_interval(f64::INFINITY, -0.2, 0.2), 0.2);
        assert_eq!(Bounds::unbounded().project(-3.0), -3.0);
    }

    #[test]
    fn bounds_must_be_ordered() {
        assert!(Bounds::new(1.0, 1.0).is_err());
        assert!(Bounds::new(f64::NEG_INFINITY, 0.0).is_ok());
    }
}
