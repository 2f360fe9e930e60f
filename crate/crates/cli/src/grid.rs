use std::str::FromStr;

/// Inclusive range `a:b` of orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub start: u64,
    pub end: u64,
}

impl NRange {
    pub fn values(&self) -> Vec<u64> {
        (self.start..=self.end).collect()
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
        let start: u64 = a.trim().parse().map_err(|e| format!("bad range start {a:?}: {e}"))?;
        let end: u64 = b.trim().parse().map_err(|e| format!("bad range end {b:?}: {e}"))?;
        if start == 0 || end < start {
            return Err(format!("need 1 <= a <= b, got {start}:{end}"));
        }
        Ok(Self { start, end })
    }
}

/// `start:stop:count` with `count` points from `start`, `stop` excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl XGrid {
    pub fn values(&self) -> Vec<f64> {
        let h = (self.stop - self.start) / self.count as f64;
        (0..self.count).map(|i| self.start + i as f64 * h).collect()
    }
}

impl FromStr for XGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts[..] else {
            return Err(format!("expected start:stop:count, got {s:?}"));
        };
        let start: f64 = a.trim().parse().map_err(|e| format!("bad grid start {a:?}: {e}"))?;
        let stop: f64 = b.trim().parse().map_err(|e| format!("bad grid stop {b:?}: {e}"))?;
        let count: usize = c.trim().parse().map_err(|e| format!("bad grid count {c:?}: {e}"))?;
        if !(start.is_finite() && stop.is_finite()) || count == 0 {
            return Err(format!("grid needs finite ends and count >= 1, got {s:?}"));
        }
        Ok(Self { start, stop, count })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_excludes_stop() {
        let g: XGrid = "0:1:4".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75]);
        assert!("0:1".parse::<XGrid>().is_err());
        assert!("0:1:0".parse::<XGrid>().is_err());
    }

    #[test]
    fn range_is_inclusive() {
        let r: NRange = "3:5".parse().unwrap();
        assert_eq!(r.values(), vec![3, 4, 5]);
        assert!("0:2".parse::<NRange>().is_err());
        assert!("5:3".parse::<NRange>().is_err());
    }
}
