use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub episodes: usize,
    pub success_rate: f64,
}

/// Success rate at training checkpoints.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub points: Vec<CurvePoint>,
}

impl LearningCurve {
    pub fn push(&mut self, episodes: usize, success_rate: f64) {
        self.points.push(CurvePoint { episodes, success_rate });
    }

    pub fn first(&self) -> Option<f64> {
        self.points.first().map(|p| p.success_rate)
    }

    pub fn last(&self) -> Option<f64> {
        self.points.last().map(|p| p.success_rate)
    }

    /// Two-column whitespace table with a header line.
    pub fn to_table(&self) -> String {
        let mut out = String::from("episodes success_rate\n");
        for p in &self.points {
            out.push_str(&format!("{} {:.6}\n", p.episodes, p.success_rate));
        }
        out
    }

    pub fn from_table(text: &str) -> Option<LearningCurve> {
        let mut curve = LearningCurve::default();
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let mut cols = line.split_whitespace();
            let episodes = cols.next()?.parse().ok()?;
            let rate = cols.next()?.parse().ok()?;
            curve.push(episodes, rate);
        }
        Some(curve)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape() {
        let mut c = LearningCurve::default();
        c.push(0, 0.5);
        c.push(100, 0.75);
        let t = c.to_table();
        assert_eq!(t, "episodes success_rate\n0 0.500000\n100 0.750000\n");
        assert_eq!(t.lines().count(), c.points.len() + 1);
        assert_eq!(LearningCurve::from_table(&t).unwrap(), c);
    }
}
