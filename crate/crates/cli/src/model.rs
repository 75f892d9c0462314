//! Model selectors: `sdof:<case>`, `rod:<nx>x<ny>`, `lamb:<ne>`,
//! `random:<n>` and `files` (MatrixMarket M, K and optional C).

use std::fs;
use std::path::PathBuf;

use padestep::linalg::{load_matrix_market, SparseMatrix};
use padestep::models::{
    build_lamb_reduced, build_rod, random_system, sdof_analytic, sdof_system, SdofCase, ROD_OBSERVATION,
};
use padestep::system::Force;
use padestep::{Error, Result, SecondOrderSystem, Signal};

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Sdof(usize),
    Rod(usize, usize),
    Lamb(usize),
    Random(usize),
    Files,
}

impl ModelSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown model '{s}'"));
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let num = |a: &str| a.trim().parse::<usize>().map_err(|_| bad());
        match kind.trim() {
            "sdof" => Ok(Self::Sdof(num(arg)?)),
            "rod" => {
                let (nx, ny) = match arg.split_once('x') {
                    Some((a, b)) => (num(a)?, num(b)?),
                    None => {
                        let nx = num(arg)?;
                        (nx, nx / 5)
                    }
                };
                Ok(Self::Rod(nx, ny))
            }
            "lamb" => Ok(Self::Lamb(num(arg)?)),
            "random" => Ok(Self::Random(num(arg)?)),
            "files" => Ok(Self::Files),
            _ => Err(bad()),
        }
    }
}

/// Extra inputs for the `random` and `files` models.
#[derive(Debug, Clone, Default)]
pub struct ModelInputs {
    pub seed: u64,
    pub damped: bool,
    pub mass: Option<PathBuf>,
    pub stiffness: Option<PathBuf>,
    pub damping: Option<PathBuf>,
    pub load: Option<PathBuf>,
    pub signal: Option<String>,
}

/// A built model with its default observation dof and natural time scale.
pub struct Model {
    pub sys: SecondOrderSystem,
    pub observe: usize,
    pub default_t_sim: f64,
    /// Natural period for SDOF cases.
    pub period: Option<f64>,
    pub sdof: Option<SdofCase>,
    pub notes: Vec<(String, String)>,
}

impl Model {
    /// Closed-form displacement where one exists.
    pub fn analytic(&self) -> Option<impl Fn(f64) -> f64 + Sync + '_> {
        self.sdof.as_ref().map(|c| move |t| sdof_analytic(c, t).0)
    }
}

fn read_vector(path: &PathBuf) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    text.split_whitespace()
        .map(|w| w.parse::<f64>().map_err(|_| Error::Parse(format!("{}: bad number '{w}'", path.display()))))
        .collect()
}

pub fn build(spec: &ModelSpec, inputs: &ModelInputs) -> Result<Model> {
    match *spec {
        ModelSpec::Sdof(id) => {
            let case = SdofCase::table(id)?;
            Ok(Model {
                sys: sdof_system(&case)?,
                observe: 0,
                default_t_sim: 10.0 * case.period(),
                period: Some(case.period()),
                sdof: Some(case),
                notes: vec![],
            })
        }
        ModelSpec::Rod(nx, ny) => {
            let fe = build_rod(nx, ny)?;
            let (dof, at) = fe.nearest_dof(ROD_OBSERVATION[0], ROD_OBSERVATION[1], 0)?;
            Ok(Model {
                notes: vec![
                    ("n_dof".into(), fe.n_dof_total().to_string()),
                    ("n_free".into(), fe.n_free().to_string()),
                    ("observe_at".into(), format!("{:?};{:?}", at[0], at[1])),
                ],
                sys: fe.sys,
                observe: dof,
                default_t_sim: 1.0,
                period: None,
                sdof: None,
            })
        }
        ModelSpec::Lamb(ne) => {
            let fe = build_lamb_reduced(ne)?;
            let (dof, at) = fe.nearest_dof(0.0, fe.ly, 1)?;
            Ok(Model {
                notes: vec![
                    ("n_free".into(), fe.n_free().to_string()),
                    ("observe_at".into(), format!("{:?};{:?}", at[0], at[1])),
                ],
                sys: fe.sys,
                observe: dof,
                default_t_sim: 1.0,
                period: None,
                sdof: None,
            })
        }
        ModelSpec::Random(n) => {
            let mut sys = random_system(n, inputs.damped, inputs.seed)?;
            if let Some(name) = &inputs.signal {
                let mut load = vec![0.0; n];
                load[0] = 1.0;
                sys.force = Force::Separable { load, signal: Signal::by_name(name)? };
            }
            Ok(Model {
                sys,
                observe: 0,
                default_t_sim: 10.0,
                period: None,
                sdof: None,
                notes: vec![("seed".into(), inputs.seed.to_string())],
            })
        }
        ModelSpec::Files => {
            let need = |p: &Option<PathBuf>, what: &str| {
                p.clone().ok_or_else(|| Error::Invalid(format!("files model needs --{what}")))
            };
            let m = load_matrix_market(&need(&inputs.mass, "mass")?)?;
            let k = load_matrix_market(&need(&inputs.stiffness, "stiffness")?)?;
            let n = m.dim();
            let c = match &inputs.damping {
                Some(p) => load_matrix_market(p)?,
                None => SparseMatrix::zeros(n),
            };
            let force = match (&inputs.load, &inputs.signal) {
                (Some(p), Some(s)) => Force::Separable { load: read_vector(p)?, signal: Signal::by_name(s)? },
                (None, None) => Force::None,
                _ => return Err(Error::Invalid("--load and --signal go together".into())),
            };
            let sys = SecondOrderSystem::new(m, c, k, force, vec![0.0; n], vec![0.0; n])?;
            Ok(Model { sys, observe: 0, default_t_sim: 1.0, period: None, sdof: None, notes: vec![] })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_selectors() {
        assert_eq!(ModelSpec::parse("sdof:3").unwrap(), ModelSpec::Sdof(3));
        assert_eq!(ModelSpec::parse("rod:80x16").unwrap(), ModelSpec::Rod(80, 16));
        assert_eq!(ModelSpec::parse("rod:10").unwrap(), ModelSpec::Rod(10, 2));
        assert_eq!(ModelSpec::parse("files").unwrap(), ModelSpec::Files);
        assert!(ModelSpec::parse("beam:3").is_err());
        assert!(ModelSpec::parse("sdof:x").is_err());
    }
}
