use std::io::{self, Write};

use crate::fmt::sig9;

/// Uniformly sampled multi-node voltage record.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    step: f64,
    transient_end: usize,
    data: Vec<Vec<f64>>,
}

impl Trajectory {
    /// Panics if the node sequences differ in length, `step <= 0`, or the
    /// transient marker lies past the end.
    pub fn new(step: f64, transient_end: usize, data: Vec<Vec<f64>>) -> Self {
        assert!(step > 0.0, "trajectory step must be positive");
        let len = data.first().map_or(0, Vec::len);
        assert!(data.iter().all(|d| d.len() == len), "node sequences differ in length");
        assert!(transient_end <= len, "transient marker past end of data");
        Self { step, transient_end, data }
    }

    pub fn node_count(&self) -> usize {
        self.data.len()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn transient_end(&self) -> usize {
        self.transient_end
    }

    pub fn time(&self, index: usize) -> f64 {
        index as f64 * self.step
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.data[i]
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.data
    }

    /// Samples of node `i` after the transient marker.
    pub fn post_transient(&self, i: usize) -> &[f64] {
        &self.data[i][self.transient_end..]
    }

    pub fn into_nodes(self) -> Vec<Vec<f64>> {
        self.data
    }

    /// Writes `t,node0,node1,...` CSV with nine significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<String> = (0..self.node_count()).map(|i| format!("node{i}")).collect();
        writeln!(w, "t,{}", header.join(","))?;
        for k in 0..self.len() {
            write!(w, "{}", sig9(self.time(k)))?;
            for node in &self.data {
                write!(w, ",{}", sig9(node[k]))?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }

    /// Parses the CSV layout produced by [`Trajectory::write_csv`]. The step
    /// is taken from the first two time stamps; no transient is marked.
    pub fn from_csv(text: &str) -> Result<Self, String> {
        let table = crate::fmt::parse_numeric_csv(text)?;
        if table.header.first().map(String::as_str) != Some("t") {
            return Err("first column must be `t`".into());
        }
        if table.rows.len() < 2 {
            return Err("need at least two rows".into());
        }
        let step = table.rows[1][0] - table.rows[0][0];
        if !(step > 0.0) {
            return Err("time column must be increasing".into());
        }
        let data = (1..table.header.len()).map(|c| table.rows.iter().map(|r| r[c]).collect()).collect();
        Ok(Self::new(step, 0, data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let t = Trajectory::new(1e-5, 1, vec![vec![0.1, 0.25], vec![1.0, 2.0 / 3.0]]);
        let s = t.to_csv_string();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "t,node0,node1");
        assert_eq!(lines[1], "0.00000000e0,1.00000000e-1,1.00000000e0");
        assert_eq!(lines[2], "1.00000000e-5,2.50000000e-1,6.66666667e-1");
        assert!(!s.contains('\r'));
        let back = Trajectory::from_csv(&s).unwrap();
        assert_eq!(back.node_count(), 2);
        assert!((back.step() - 1e-5).abs() < 1e-15);
        assert!((back.node(1)[1] - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    #[should_panic]
    fn ragged_nodes_rejected() {
        Trajectory::new(1.0, 0, vec![vec![1.0], vec![1.0, 2.0]]);
    }
}
