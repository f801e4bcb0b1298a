use std::fmt;

/// A list of violations; empty means the checked object is well-formed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport<V> {
    pub violations: Vec<V>,
}

impl<V> Default for ValidationReport<V> {
    fn default() -> Self {
        Self { violations: Vec::new() }
    }
}

impl<V> ValidationReport<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: V) {
        self.violations.push(v);
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl<V: fmt::Display> fmt::Display for ValidationReport<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "OK");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Serializes a value through its `Display` form; used for big integers.
pub fn as_display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}
