//! Experiment configuration and mesh families.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use super::problems::Problem;
use super::HarnessError;
use crate::mesh::{
    generate_hexa_dual, generate_ncvx, generate_triangle_mesh, generate_voro_dual, generate_voronoi, hexa_cell_count, MeshError, MeshFile,
    TriangleMeshKind,
};
use crate::schemes::SchemeKind;
use crate::vem::StabChoice;

/// Lloyd sweeps used for the optimized Voronoi family.
pub const OPTI_LLOYD_ITERS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFamily {
    /// Criss-cross right triangles.
    Tri,
    /// Near-equilateral triangles.
    TriEquilateral,
    HexaDual,
    VoroDual,
    Voro,
    Opti,
    Ncvx,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 7] = [
        MeshFamily::Tri,
        MeshFamily::TriEquilateral,
        MeshFamily::HexaDual,
        MeshFamily::VoroDual,
        MeshFamily::Voro,
        MeshFamily::Opti,
        MeshFamily::Ncvx,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MeshFamily::Tri => "tri",
            MeshFamily::TriEquilateral => "tri-equilateral",
            MeshFamily::HexaDual => "hexa-dual",
            MeshFamily::VoroDual => "voro-dual",
            MeshFamily::Voro => "voro",
            MeshFamily::Opti => "opti",
            MeshFamily::Ncvx => "ncvx",
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, MeshFamily::VoroDual | MeshFamily::Voro | MeshFamily::Opti)
    }

    pub fn has_dual(&self) -> bool {
        matches!(self, MeshFamily::HexaDual | MeshFamily::VoroDual)
    }

    /// Generator argument for nominal spacing `h = 1/resolution`.
    ///
    /// Triangles and `ncvx` use `resolution` subdivisions. On the hexagonal
    /// families `h` is the hexagon side, so the seed spacing is `√3 h`;
    /// `voro-dual` asks for as many cells as `hexa-dual` has. `voro` and
    /// `opti` use `resolution²` seeds.
    pub fn generator_size(&self, resolution: usize) -> usize {
        match self {
            MeshFamily::HexaDual => hexa_resolution(resolution),
            MeshFamily::VoroDual => hexa_cell_count(hexa_resolution(resolution)),
            MeshFamily::Voro | MeshFamily::Opti => resolution * resolution,
            _ => resolution,
        }
    }

    /// Runs the family's generator with its native size argument `n`.
    pub fn generate(&self, n: usize, seed: u64) -> Result<MeshFile, MeshError> {
        Ok(match self {
            MeshFamily::Tri => generate_triangle_mesh(n, TriangleMeshKind::UniformRight)?.into(),
            MeshFamily::TriEquilateral => generate_triangle_mesh(n, TriangleMeshKind::Equilateral)?.into(),
            MeshFamily::HexaDual => generate_hexa_dual(n)?.into(),
            MeshFamily::VoroDual => generate_voro_dual(n, seed)?.into(),
            MeshFamily::Voro => generate_voronoi(n, 0, seed)?.into(),
            MeshFamily::Opti => generate_voronoi(n, OPTI_LLOYD_ITERS, seed)?.into(),
            MeshFamily::Ncvx => generate_ncvx(n)?.into(),
        })
    }

    /// Mesh with nominal spacing `1/resolution`.
    pub fn at_resolution(&self, resolution: usize, seed: u64) -> Result<MeshFile, MeshError> {
        self.generate(self.generator_size(resolution), seed)
    }
}

/// Hexagonal subdivision whose hexagon side is closest to `1/resolution`.
fn hexa_resolution(resolution: usize) -> usize {
    ((resolution as f64 / 3f64.sqrt() - 0.5).round() as usize).max(2)
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tri-uniform" | "uniform-right" => return Ok(MeshFamily::Tri),
            "equilateral" => return Ok(MeshFamily::TriEquilateral),
            _ => {}
        }
        MeshFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown mesh family '{s}'"))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scheme: String,
    family: String,
    resolutions: Vec<usize>,
    #[serde(default = "default_epsilons")]
    epsilons: Vec<f64>,
    stab: Option<String>,
    #[serde(default = "default_problem")]
    problem: String,
    output_dir: Option<PathBuf>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    timings: bool,
    #[serde(default)]
    projection_error: bool,
}

fn default_epsilons() -> Vec<f64> {
    vec![1e-2]
}

fn default_problem() -> String {
    "boundary-layer".into()
}

/// One refinement study: a scheme on a mesh family over increasing
/// resolutions, repeated for every `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: SchemeKind,
    pub family: MeshFamily,
    /// Nominal `1/h` per level, strictly increasing.
    pub resolutions: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub problem: Problem,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    /// Record wall-clock times; off keeps the CSV byte-reproducible.
    pub timings: bool,
    /// Also compute `‖∇u − ∇Π∇u_h‖` per level.
    pub projection_error: bool,
}

impl ExperimentConfig {
    pub fn new(scheme: SchemeKind, family: MeshFamily, resolutions: Vec<usize>, epsilons: Vec<f64>) -> Self {
        Self {
            scheme,
            family,
            resolutions,
            epsilons,
            problem: Problem::default(),
            output_dir: None,
            seed: 0,
            timings: false,
            projection_error: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_problem(mut self, problem: Problem) -> Self {
        self.problem = problem;
        self
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let mut scheme: SchemeKind = raw.scheme.parse().map_err(HarnessError::Config)?;
        if let Some(stab) = raw.stab {
            let stab: StabChoice = stab.parse().map_err(HarnessError::Config)?;
            scheme = match scheme {
                SchemeKind::Eave(_) if stab == StabChoice::None => {
                    return Err(HarnessError::Config("EAVE needs stab = \"sv\" or \"se\"".into()))
                }
                SchemeKind::Eave(_) => SchemeKind::Eave(stab),
                other => other,
            };
        }
        let cfg = Self {
            scheme,
            family: raw.family.parse().map_err(HarnessError::Config)?,
            resolutions: raw.resolutions,
            epsilons: raw.epsilons,
            problem: raw.problem.parse().map_err(HarnessError::Config)?,
            output_dir: raw.output_dir,
            seed: raw.seed,
            timings: raw.timings,
            projection_error: raw.projection_error,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.resolutions.is_empty() {
            return bad("no resolutions given".into());
        }
        if self.resolutions.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("resolutions must be strictly increasing, got {:?}", self.resolutions));
        }
        let min = if self.family == MeshFamily::Tri || self.family == MeshFamily::TriEquilateral { 1 } else { 2 };
        if self.resolutions[0] < min {
            return bad(format!("{} needs resolution ≥ {min}", self.family));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return bad(format!("epsilons must be positive, got {:?}", self.epsilons));
        }
        if self.scheme.requires_triangles() && !matches!(self.family, MeshFamily::Tri | MeshFamily::TriEquilateral) {
            return bad(format!("{} needs a triangle family, got {}", self.scheme, self.family));
        }
        if self.scheme == SchemeKind::Meave && !self.family.has_dual() {
            return bad(format!("meave needs hexa-dual or voro-dual, got {}", self.family));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for f in MeshFamily::ALL {
            assert_eq!(f.name().parse::<MeshFamily>().unwrap(), f);
        }
    }

    #[test]
    fn parses_full_config() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
            scheme = "eave"
            stab = "se"
            family = "ncvx"
            resolutions = [4, 8, 16]
            epsilons = [1e-2, 1e-3]
            seed = 7
            output_dir = "out"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.scheme, SchemeKind::Eave(StabChoice::EdgeDiff));
        assert_eq!(cfg.family, MeshFamily::Ncvx);
        assert_eq!(cfg.epsilons, vec![1e-2, 1e-3]);
        assert_eq!(cfg.output_dir, Some(PathBuf::from("out")));
        assert!(!cfg.timings);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "scheme = \"meave\"\nfamily = \"hexa-dual\"\nresolutions = [8, 8]",
            "scheme = \"meave\"\nfamily = \"hexa-dual\"\nresolutions = [8]\nepsilons = [0.0]",
            "scheme = \"fe\"\nfamily = \"voro\"\nresolutions = [8]",
            "scheme = \"meave\"\nfamily = \"ncvx\"\nresolutions = [8]",
            "scheme = \"eave\"\nstab = \"none\"\nfamily = \"ncvx\"\nresolutions = [8]",
            "scheme = \"eave\"\nfamily = \"ncvx\"\nresolutions = [8]\ncolour = 1",
            "scheme = \"eave\"\nfamily = \"ncvx\"",
        ] {
            assert!(matches!(ExperimentConfig::from_toml_str(text), Err(HarnessError::Config(_))), "{text}");
        }
    }

    #[test]
    fn random_families_scale_cell_count() {
        assert_eq!(MeshFamily::Voro.generator_size(8), 64);
        assert_eq!(MeshFamily::Ncvx.generator_size(8), 8);
        let n: Vec<usize> = [8, 16, 32, 64].map(|r| MeshFamily::HexaDual.generator_size(r)).to_vec();
        assert_eq!(n, vec![4, 9, 18, 36]);
        assert_eq!(MeshFamily::VoroDual.generator_size(16), hexa_cell_count(9));
    }
}
