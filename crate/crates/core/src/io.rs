//! JSON files: systems, factor realizations, and `a+bi` complex strings.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::factors::{DislocationLog, LeftFactorRealization, StackedFactorRealization};
use crate::region::{PoleMode, RegionSpec};
use crate::system::{DescriptorSystem, Domain};

/// `a+bi` with the shortest decimal forms that round-trip.
pub fn format_complex(z: Complex64) -> String {
    let mut s = String::new();
    // Adding zero maps −0 to +0.
    let _ = write!(s, "{}", z.re + 0.0);
    if z.im.is_sign_negative() {
        let _ = write!(s, "-{}i", -z.im);
    } else {
        let _ = write!(s, "+{}i", z.im);
    }
    s
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (whitespace ignored, `j` accepted for `i`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::DimensionMismatch(format!("cannot parse complex number {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, imag(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Comma-separated list of complex numbers.
pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_complex)
        .collect()
}

pub fn serialize_complex<S: Serializer>(
    z: &Complex64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_complex(*z))
}

pub fn serialize_complex_vec<S: Serializer>(
    v: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| format_complex(*z)))
}

/// Serde adapter for `Vec<Complex64>` as a list of `a+bi` strings.
pub mod complex_list {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        super::serialize_complex_vec(v, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|t| super::parse_complex(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

type Rows = Vec<Vec<f64>>;

fn to_rows(m: &DMatrix<f64>) -> Rows {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn from_rows(name: &str, rows: &Rows, nrows: usize, ncols: usize) -> Result<DMatrix<f64>> {
    if rows.len() != nrows {
        return Err(Error::DimensionMismatch(format!(
            "{name} has {} rows, expected {nrows}",
            rows.len()
        )));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch(format!(
            "row {i} of {name} has {} entries, expected {ncols}",
            rows[i].len()
        )));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn width(rows: &Rows) -> Option<usize> {
    rows.first().map(Vec::len)
}

/// On-disk form of a descriptor system; `E = null` means identity, `D = null` zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct SystemFile {
    pub domain: Domain,
    pub A: Rows,
    #[serde(default)]
    pub E: Option<Rows>,
    pub B: Rows,
    pub C: Rows,
    #[serde(default)]
    pub D: Option<Rows>,
}

impl SystemFile {
    pub fn from_system(sys: &DescriptorSystem) -> Self {
        Self {
            domain: sys.domain(),
            A: to_rows(sys.a()),
            E: sys.e_explicit().map(to_rows),
            B: to_rows(sys.b()),
            C: to_rows(sys.c()),
            D: Some(to_rows(sys.d())),
        }
    }

    pub fn to_system(&self) -> Result<DescriptorSystem> {
        let n = self.A.len();
        let d_rows = self.D.as_ref();
        let m = if n > 0 { width(&self.B) } else { None }
            .or_else(|| d_rows.and_then(width))
            .unwrap_or(0);
        let p = if self.C.is_empty() {
            d_rows.map_or(0, Vec::len)
        } else {
            self.C.len()
        };
        let a = from_rows("A", &self.A, n, n)?;
        let e = self
            .E
            .as_ref()
            .map(|e| from_rows("E", e, n, n))
            .transpose()?;
        let b = if self.B.is_empty() && n == 0 {
            DMatrix::zeros(0, m)
        } else {
            from_rows("B", &self.B, n, m)?
        };
        let c = if self.C.is_empty() {
            DMatrix::zeros(p, n)
        } else {
            from_rows("C", &self.C, p, n)?
        };
        let d = match d_rows {
            Some(rows) => from_rows("D", rows, p, m)?,
            None => DMatrix::zeros(p, m),
        };
        DescriptorSystem::new(a, e, b, c, d, self.domain)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct RightFactorFile {
    pub domain: Domain,
    pub A: Rows,
    pub E: Rows,
    pub B: Rows,
    pub CN: Rows,
    pub DN: Rows,
    pub CM: Rows,
    pub DM: Rows,
    pub n_nondynamic: usize,
    pub den_degree: usize,
}

impl RightFactorFile {
    pub fn from_factors(f: &StackedFactorRealization) -> Self {
        Self {
            domain: f.domain,
            A: to_rows(&f.a),
            E: to_rows(&f.e),
            B: to_rows(&f.b),
            CN: to_rows(&f.cn),
            DN: to_rows(&f.dn),
            CM: to_rows(&f.cm),
            DM: to_rows(&f.dm),
            n_nondynamic: f.n_nondynamic,
            den_degree: f.den_degree,
        }
    }

    pub fn to_factors(&self) -> Result<StackedFactorRealization> {
        let n = self.A.len();
        let m = width(&self.DM).unwrap_or(0);
        let p = self.DN.len();
        Ok(StackedFactorRealization {
            a: from_rows("A", &self.A, n, n)?,
            e: from_rows("E", &self.E, n, n)?,
            b: from_rows_or_empty("B", &self.B, n, m)?,
            cn: from_rows_or_empty("CN", &self.CN, p, n)?,
            dn: from_rows_or_empty("DN", &self.DN, p, m)?,
            cm: from_rows_or_empty("CM", &self.CM, m, n)?,
            dm: from_rows("DM", &self.DM, m, m)?,
            domain: self.domain,
            n_nondynamic: self.n_nondynamic,
            den_degree: self.den_degree,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct LeftFactorFile {
    pub domain: Domain,
    pub A: Rows,
    pub E: Rows,
    pub BN: Rows,
    pub BM: Rows,
    pub C: Rows,
    pub DN: Rows,
    pub DM: Rows,
    pub n_nondynamic: usize,
    pub den_degree: usize,
}

impl LeftFactorFile {
    pub fn from_factors(f: &LeftFactorRealization) -> Self {
        Self {
            domain: f.domain,
            A: to_rows(&f.a),
            E: to_rows(&f.e),
            BN: to_rows(&f.bn),
            BM: to_rows(&f.bm),
            C: to_rows(&f.c),
            DN: to_rows(&f.dn),
            DM: to_rows(&f.dm),
            n_nondynamic: f.n_nondynamic,
            den_degree: f.den_degree,
        }
    }

    pub fn to_factors(&self) -> Result<LeftFactorRealization> {
        let n = self.A.len();
        let p = self.DM.len();
        let m = width(&self.DN).unwrap_or(0);
        Ok(LeftFactorRealization {
            a: from_rows("A", &self.A, n, n)?,
            e: from_rows("E", &self.E, n, n)?,
            bn: from_rows_or_empty("BN", &self.BN, n, m)?,
            bm: from_rows_or_empty("BM", &self.BM, n, p)?,
            c: from_rows_or_empty("C", &self.C, p, n)?,
            dn: from_rows_or_empty("DN", &self.DN, p, m)?,
            dm: from_rows("DM", &self.DM, p, p)?,
            domain: self.domain,
            n_nondynamic: self.n_nondynamic,
            den_degree: self.den_degree,
        })
    }
}

/// Accepts `[]` for matrices with no rows or no columns.
fn from_rows_or_empty(name: &str, rows: &Rows, nrows: usize, ncols: usize) -> Result<DMatrix<f64>> {
    if rows.is_empty() && (nrows == 0 || ncols == 0) {
        return Ok(DMatrix::zeros(nrows, ncols));
    }
    from_rows(name, rows, nrows, ncols)
}

/// The good region a factorization was computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFile {
    pub mode: PoleMode,
    pub alpha: f64,
    #[serde(with = "complex_list", default)]
    pub poles: Vec<Complex64>,
}

impl RegionFile {
    pub fn from_region(region: &RegionSpec) -> Self {
        Self {
            mode: region.mode(),
            alpha: region.alpha(),
            poles: region.gamma_set().to_vec(),
        }
    }

    pub fn to_region(&self, domain: Domain) -> Result<RegionSpec> {
        match self.mode {
            PoleMode::Stabilize => RegionSpec::stabilize(domain, self.alpha),
            PoleMode::Assign => RegionSpec::assign(domain, self.alpha, self.poles.clone()),
            PoleMode::Inner => Ok(RegionSpec::inner(domain)),
        }
    }
}

/// Output of the factorization commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FactorFile {
    Right {
        region: RegionFile,
        realization: RightFactorFile,
        minimal_denominator: SystemFile,
        log: DislocationLog,
    },
    Left {
        region: RegionFile,
        realization: LeftFactorFile,
        minimal_denominator: SystemFile,
        log: DislocationLog,
    },
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::DimensionMismatch(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::DimensionMismatch(format!("cannot parse {}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn read_system(path: &Path) -> Result<DescriptorSystem> {
    read_json::<SystemFile>(path)?.to_system()
}

pub fn write_system(path: &Path, sys: &DescriptorSystem) -> Result<()> {
    std::fs::write(path, to_json(&SystemFile::from_system(sys)))
        .map_err(|e| Error::DimensionMismatch(format!("cannot write {}: {e}", path.display())))
}
