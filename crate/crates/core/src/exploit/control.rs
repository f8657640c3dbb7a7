//! Error-driven control of intensity and window size.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowPolicy {
    Fixed(usize),
    /// `(1 − ε)·ω_max`, at least 1.
    DynamicShrink(usize),
    /// The error monitor's own adaptive width.
    AdwinDriven,
}

impl WindowPolicy {
    pub fn describe(&self) -> String {
        match self {
            WindowPolicy::Fixed(n) => format!("fixed({n})"),
            WindowPolicy::DynamicShrink(n) => format!("dynamic({n})"),
            WindowPolicy::AdwinDriven => "adwin".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntensityController {
    pub lambda_max: usize,
    pub dynamic: bool,
}

impl IntensityController {
    pub fn intensity(&self, error: f64) -> usize {
        if self.dynamic {
            effective_intensity(error, self.lambda_max)
        } else {
            self.lambda_max
        }
    }
}

/// `round(ε·λ_max)`, halves rounded away from zero.
pub fn effective_intensity(error: f64, lambda_max: usize) -> usize {
    (error.clamp(0.0, 1.0) * lambda_max as f64).round() as usize
}

pub fn effective_window_cap(policy: WindowPolicy, error: f64, adwin_width: u64) -> usize {
    match policy {
        WindowPolicy::Fixed(cap) => cap.max(1),
        WindowPolicy::DynamicShrink(cap) => {
            // Tolerance keeps decimal inputs such as ε = 0.3 from flooring one short.
            let shrunk = (1.0 - error.clamp(0.0, 1.0)) * cap as f64;
            ((shrunk + 1e-9).floor() as usize).max(1)
        }
        WindowPolicy::AdwinDriven => (adwin_width as usize).max(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intensity_examples() {
        assert_eq!(effective_intensity(0.0, 100), 0);
        assert_eq!(effective_intensity(1.0, 1000), 1000);
        assert_eq!(effective_intensity(0.25, 10), 3);
        let fixed = IntensityController {
            lambda_max: 7,
            dynamic: false,
        };
        assert_eq!(fixed.intensity(0.1), 7);
    }

    #[test]
    fn window_cap_examples() {
        assert_eq!(
            effective_window_cap(WindowPolicy::DynamicShrink(1000), 0.3, 0),
            700
        );
        assert_eq!(
            effective_window_cap(WindowPolicy::DynamicShrink(1000), 1.0, 0),
            1
        );
        assert_eq!(
            effective_window_cap(WindowPolicy::AdwinDriven, 0.5, 4211),
            4211
        );
        assert_eq!(effective_window_cap(WindowPolicy::AdwinDriven, 0.5, 0), 1);
        assert_eq!(effective_window_cap(WindowPolicy::Fixed(50), 0.9, 3), 50);
    }
}
