//! Number formatting and CSV parsing shared by the file formats.

/// Nine significant digits in scientific notation, `.` decimal separator.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        // avoid "-0.00000000e0"
        return "0.00000000e0".to_string();
    }
    format!("{v:.8e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl NumericTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }
}

/// Parses a headered CSV whose body is entirely numeric.
pub fn parse_numeric_csv(text: &str) -> Result<NumericTable, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines.next().ok_or("empty csv")?.split(',').map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| format!("row {}: {e}", i + 2))?;
        if row.len() != header.len() {
            return Err(format!("row {}: expected {} fields, got {}", i + 2, header.len(), row.len()));
        }
        rows.push(row);
    }
    Ok(NumericTable { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_digits() {
        assert_eq!(sig9(1.0), "1.00000000e0");
        assert_eq!(sig9(-0.0), "0.00000000e0");
        assert_eq!(sig9(0.018), "1.80000000e-2");
        assert_eq!(sig9(123456789.4), "1.23456789e8");
    }

    #[test]
    fn parse_rejects_ragged() {
        assert!(parse_numeric_csv("a,b\n1,2\n3\n").is_err());
        let t = parse_numeric_csv("a,b\n1,2\n3,4\n").unwrap();
        assert_eq!(t.column("b").unwrap(), vec![2.0, 4.0]);
    }
}
