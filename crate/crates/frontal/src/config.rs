//! Run configuration: problem source, pipeline and parameters.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use frontal_core::krylov::GmresOptions;
use frontal_core::problems::MeshSpec;
use frontal_core::{FactorMode, MfParams};
use serde::Serialize;

use crate::error::{Error, Result};

/// Built-in test problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GenSpec {
    Poisson {
        nx: usize,
        ny: usize,
        nz: usize,
    },
    Elasticity {
        nx: usize,
        ny: usize,
        nz: usize,
        lambda: f64,
        mu: f64,
    },
}

impl GenSpec {
    pub fn mesh(&self) -> Option<MeshSpec> {
        match *self {
            GenSpec::Elasticity { nx, ny, nz, lambda, mu } => Some(MeshSpec {
                nx,
                ny,
                nz,
                lame_lambda: lambda,
                lame_mu: mu,
            }),
            GenSpec::Poisson { .. } => None,
        }
    }
}

/// `poisson:NX,NY,NZ` or `elasticity:NX,NY,NZ[,LAMBDA,MU]`.
impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad generator spec {s:?}"));
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        let dims = |a: &[&str]| -> Result<(usize, usize, usize)> {
            let v: Vec<usize> = a
                .iter()
                .map(|x| x.parse::<usize>().ok().filter(|&d| d > 0).ok_or_else(bad))
                .collect::<Result<_>>()?;
            Ok((v[0], v[1], v[2]))
        };
        match (kind.trim().to_ascii_lowercase().as_str(), args.len()) {
            ("poisson", 3) => {
                let (nx, ny, nz) = dims(&args)?;
                Ok(GenSpec::Poisson { nx, ny, nz })
            }
            ("elasticity", 3 | 5) => {
                let (nx, ny, nz) = dims(&args[..3])?;
                let (lambda, mu) = if args.len() == 5 {
                    let f = |x: &str| x.parse::<f64>().map_err(|_| bad());
                    (f(args[3])?, f(args[4])?)
                } else {
                    (1.0, 1.0)
                };
                let g = GenSpec::Elasticity { nx, ny, nz, lambda, mu };
                g.mesh().unwrap().validate()?;
                Ok(g)
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GenSpec::Poisson { nx, ny, nz } => write!(f, "poisson:{nx},{ny},{nz}"),
            GenSpec::Elasticity { nx, ny, nz, lambda, mu } => {
                write!(f, "elasticity:{nx},{ny},{nz},{lambda},{mu}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSource {
    File(PathBuf),
    Gen(GenSpec),
}

impl fmt::Display for ProblemSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSource::File(p) => write!(f, "{}", p.display()),
            ProblemSource::Gen(g) => g.fmt(f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrecondKind {
    None,
    Diag,
    Ilut,
    Amf,
}

impl PrecondKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PrecondKind::None => "none",
            PrecondKind::Diag => "diag",
            PrecondKind::Ilut => "ilut",
            PrecondKind::Amf => "amf",
        }
    }
}

/// Which pipeline a run executes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverMode {
    /// Multifrontal factorization used as a direct solver.
    Direct(FactorMode),
    /// Right-preconditioned GMRES.
    Gmres(PrecondKind),
}

impl SolverMode {
    pub fn label(self) -> String {
        match self {
            SolverMode::Direct(FactorMode::Conventional) => "mf".into(),
            SolverMode::Direct(FactorMode::Accelerated) => "amf".into(),
            SolverMode::Gmres(p) => format!("gmres+{}", p.as_str()),
        }
    }
}

/// Numeric parameters shared by all pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RunParams {
    pub n_c: usize,
    pub eps: f64,
    pub d: usize,
    pub n_leaf: usize,
    /// Cap on off-diagonal ranks; `None` is unlimited.
    pub max_rank: Option<usize>,
    /// Nested-dissection leaf size.
    pub nd_leaf: usize,
    pub k: usize,
    pub drop_tol: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
}

impl Default for RunParams {
    fn default() -> Self {
        let mf = MfParams::default();
        let gm = GmresOptions::default();
        Self {
            n_c: mf.n_c,
            eps: mf.eps,
            d: mf.d,
            n_leaf: mf.n_leaf,
            max_rank: None,
            nd_leaf: frontal_core::ordering::DEFAULT_LEAF_SIZE,
            k: 1,
            drop_tol: 1e-4,
            tol: gm.tol,
            max_iter: gm.max_iter,
            restart: gm.restart,
        }
    }
}

impl RunParams {
    pub fn mf_params(&self) -> MfParams {
        MfParams {
            n_c: self.n_c,
            eps: self.eps,
            d: self.d,
            n_leaf: self.n_leaf,
            max_rank: self.max_rank.unwrap_or(usize::MAX),
            ..MfParams::default()
        }
    }

    pub fn gmres_options(&self) -> GmresOptions {
        GmresOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            restart: self.restart,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mf_params().validate()?;
        if self.nd_leaf == 0 {
            return Err(Error::Config("nested-dissection leaf size must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.drop_tol >= 0.0 && self.drop_tol.is_finite()) {
            return Err(Error::Config("drop tolerance must be a non-negative number".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if self.restart == 0 {
            return Err(Error::Config("restart must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub source: ProblemSource,
    pub mode: SolverMode,
    pub params: RunParams,
    pub scale_rows: bool,
    /// Directory receiving the report files.
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(source: ProblemSource, mode: SolverMode) -> Self {
        Self {
            source,
            mode,
            params: RunParams::default(),
            scale_rows: false,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_generators() {
        assert_eq!(
            "poisson:4,5,6".parse::<GenSpec>().unwrap(),
            GenSpec::Poisson { nx: 4, ny: 5, nz: 6 }
        );
        let e: GenSpec = "elasticity:2,3,4,0.5,2".parse().unwrap();
        assert_eq!(e.mesh().unwrap().lame_mu, 2.0);
        assert_eq!(e.to_string(), "elasticity:2,3,4,0.5,2");
        let e: GenSpec = "elasticity:2,2,2".parse().unwrap();
        assert_eq!(e.mesh().unwrap(), MeshSpec::new(2, 2, 2));
        for bad in [
            "poisson:4,4",
            "poisson:0,1,1",
            "cube:1,1,1",
            "elasticity:1,1,1,1,0",
            "poisson",
        ] {
            assert!(bad.parse::<GenSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn defaults_validate() {
        let p = RunParams::default();
        p.validate().unwrap();
        assert_eq!((p.tol, p.max_iter, p.restart, p.k), (1e-6, 4000, 100, 1));
        assert!(RunParams { restart: 0, ..p }.validate().is_err());
        assert!(RunParams { eps: 0.0, ..p }.validate().is_err());
    }
}
