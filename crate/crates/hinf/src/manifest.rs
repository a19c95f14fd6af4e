//! JSON system manifests pointing at Matrix Market files.

use std::path::{Path, PathBuf};

use hinf_core::{CMat, Domain, Operator, StateSpaceSystem};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mtx::{read_mtx, write_mtx, MtxMatrix};

/// `{"name", "domain", "A", "B", "C", "D", "E"?}`; matrix paths are relative
/// to the manifest's directory. A missing `E` means the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemManifest {
    pub name: String,
    pub domain: String,
    #[serde(rename = "A")]
    pub a: PathBuf,
    #[serde(rename = "B")]
    pub b: PathBuf,
    #[serde(rename = "C")]
    pub c: PathBuf,
    #[serde(rename = "D")]
    pub d: PathBuf,
    #[serde(rename = "E", default, skip_serializing_if = "Option::is_none")]
    pub e: Option<PathBuf>,
}

pub fn parse_domain(s: &str) -> Result<Domain> {
    match s {
        "continuous" => Ok(Domain::Continuous),
        "discrete" => Ok(Domain::Discrete),
        other => Err(Error::Invalid(format!("unknown domain `{other}` (expected continuous or discrete)"))),
    }
}

pub fn domain_name(d: Domain) -> &'static str {
    match d {
        Domain::Continuous => "continuous",
        Domain::Discrete => "discrete",
    }
}

pub fn read_manifest(path: &Path) -> Result<SystemManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse { origin: path.display().to_string(), line: e.line(), msg: e.to_string() })
}

/// Reads a manifest and its matrices. `A` in coordinate format gives a
/// sparse system (and `E` is converted to match); `B`, `C`, `D` are dense.
pub fn load_system(path: &Path) -> Result<(SystemManifest, StateSpaceSystem)> {
    let manifest = read_manifest(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let domain = parse_domain(&manifest.domain)?;
    let read = |p: &Path| read_mtx(&dir.join(p));
    let a = read(&manifest.a)?;
    let (b, c, d) = (read(&manifest.b)?.into_dense(), read(&manifest.c)?.into_dense(), read(&manifest.d)?.into_dense());
    let e = manifest.e.as_deref().map(read).transpose()?;
    let (a, e) = match a {
        MtxMatrix::Dense(a) => (Operator::Dense(a), e.map(|e| Operator::Dense(e.into_dense()))),
        MtxMatrix::Sparse(a) => (Operator::Sparse(a), e.map(|e| Operator::Sparse(e.into_sparse()))),
    };
    let sys = hinf_core::system::validate_system(a, b, c, d, e, domain).map_err(|err| Error::Invalid(format!("{}: {err}", path.display())))?;
    Ok((manifest, sys))
}

/// Writes `<name>.json` and `<name>_{A,B,C,D,E}.mtx` into `dir`; returns the
/// manifest path.
pub fn write_system(dir: &Path, name: &str, sys: &StateSpaceSystem) -> Result<PathBuf> {
    let file = |m: &str| PathBuf::from(format!("{name}_{m}.mtx"));
    let op = |o: &Operator| match o {
        Operator::Dense(m) => MtxMatrix::Dense(m.clone()),
        Operator::Sparse(m) => MtxMatrix::Sparse(m.clone()),
    };
    let dense = |m: &CMat| MtxMatrix::Dense(m.clone());
    write_mtx(&dir.join(file("A")), &op(sys.a()))?;
    write_mtx(&dir.join(file("B")), &dense(sys.b()))?;
    write_mtx(&dir.join(file("C")), &dense(sys.c()))?;
    write_mtx(&dir.join(file("D")), &dense(sys.d()))?;
    if let Some(e) = sys.e() {
        write_mtx(&dir.join(file("E")), &op(e))?;
    }
    let manifest = SystemManifest {
        name: name.to_string(),
        domain: domain_name(sys.domain()).to_string(),
        a: file("A"),
        b: file("B"),
        c: file("C"),
        d: file("D"),
        e: sys.e().map(|_| file("E")),
    };
    let path = dir.join(format!("{name}.json"));
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_systems, RandomSpec};

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        for (k, spec) in [
            RandomSpec::dense(5, 2, 3, Domain::Continuous),
            RandomSpec { descriptor: true, ..RandomSpec::dense(4, 1, 1, Domain::Discrete) },
            RandomSpec { sparse: true, density: 0.3, descriptor: true, ..RandomSpec::dense(9, 2, 1, Domain::Continuous) },
        ]
        .iter()
        .enumerate()
        {
            let sys = random_systems(k as u64, 1, spec).unwrap().remove(0);
            let path = write_system(dir.path(), &format!("sys{k}"), &sys).unwrap();
            let (m, back) = load_system(&path).unwrap();
            assert_eq!(m.name, format!("sys{k}"));
            assert_eq!(back, sys);
        }
    }

    #[test]
    fn complex_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let z = |re: f64, im: f64| hinf_core::C64::new(re, im);
        let a = CMat::from_rows(&[vec![z(-1.0, 0.1), z(0.3, -0.0)], vec![z(0.0, 0.0), z(-2.0, 1.0 / 7.0)]]);
        let sys = StateSpaceSystem::new(a, CMat::from_rows(&[vec![z(1.0, 0.0)], vec![z(0.0, 1.0)]]), CMat::from_rows(&[vec![z(1.0, 0.0), z(2.0, 0.0)]]), CMat::from_rows(&[vec![z(0.0, 0.0)]]), None, Domain::Continuous).unwrap();
        let path = write_system(dir.path(), "cx", &sys).unwrap();
        assert_eq!(load_system(&path).unwrap().1, sys);
    }

    #[test]
    fn missing_file_and_bad_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let sys = StateSpaceSystem::from_real(&[&[-1.0]], &[&[1.0]], &[&[1.0]], &[&[0.0]], Domain::Continuous).unwrap();
        let path = write_system(dir.path(), "s", &sys).unwrap();
        std::fs::remove_file(dir.path().join("s_B.mtx")).unwrap();
        assert!(matches!(load_system(&path), Err(Error::Io { .. })));
        std::fs::write(&path, "{\"name\": 1}").unwrap();
        assert!(matches!(load_system(&path), Err(Error::Parse { .. })));
    }
}
