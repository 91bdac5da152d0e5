//! Command-line front end: argument parsing, input loading, dispatch and
//! output formatting. The `balcov` binary is a thin wrapper over [`run`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::applications::{self, InstanceSpec, KkmsInstance};
use crate::balanced::{self, PointConfig, SimplicialComplex};
use crate::degree::{self, CoverSpec};
use crate::error::{Error, Result};
use crate::index_field::{self, GridSpec};
use crate::simplicial::{self, OrientedTriangulation};

pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "balcov",
    version,
    about = "Balanced subsets, non-balanced complexes and degrees of covers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimal balanced subsets of a configuration.
    Balanced {
        #[arg(long)]
        config: PathBuf,
    },
    /// Facets of the non-balanced complex.
    Complex {
        #[arg(long)]
        config: PathBuf,
    },
    /// Reduced homology of the non-balanced complex or of an explicit complex.
    Homology {
        #[arg(long, required_unless_present = "complex", conflicts_with = "complex")]
        config: Option<PathBuf>,
        #[arg(long)]
        complex: Option<PathBuf>,
    },
    /// BS-equivalence of two configurations.
    Equiv {
        #[arg(long, num_args = 1, required = true)]
        config: Vec<PathBuf>,
        #[arg(long)]
        up_to_permutation: bool,
    },
    /// Degree of a cover on a closed oriented triangulation.
    Degree {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        triangulation: PathBuf,
        #[arg(long)]
        cover: PathBuf,
    },
    /// Colored cycle of prescribed degree around a planar configuration.
    MakeCircle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
    /// Sperner check and rainbow search.
    Sperner {
        #[arg(long)]
        instance: PathBuf,
    },
    /// KKM witness: a facet met by every set.
    Kkm {
        #[arg(long)]
        instance: PathBuf,
    },
    /// KKMS witness and boundary degree.
    Kkms {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Boundary degree of a cover on a ball and a balanced facet if it is nonzero.
    TheoremB {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        triangulation: PathBuf,
        #[arg(long)]
        cover: PathBuf,
    },
    /// Balanced components of a grid cover, their indices and additivity.
    Index {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        emit_svg: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Balanced { .. } => "balanced",
            Command::Complex { .. } => "complex",
            Command::Homology { .. } => "homology",
            Command::Equiv { .. } => "equiv",
            Command::Degree { .. } => "degree",
            Command::MakeCircle { .. } => "make-circle",
            Command::Sperner { .. } => "sperner",
            Command::Kkm { .. } => "kkm",
            Command::Kkms { .. } => "kkms",
            Command::TheoremB { .. } => "theorem-b",
            Command::Index { .. } => "index",
        }
    }
}

/// Outcome of one invocation: exit code plus what goes to each stream.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Reads inputs and records their digests for the manifest.
struct Inputs {
    digests: BTreeMap<String, Value>,
}

impl Inputs {
    fn read(&mut self, flag: &str, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        let digest = hex(&Sha256::digest(text.as_bytes()));
        match self.digests.get_mut(flag) {
            Some(Value::Array(list)) => list.push(json!(digest)),
            Some(prev) => *prev = json!([prev.clone(), digest]),
            None => {
                self.digests.insert(flag.to_string(), json!(digest));
            }
        }
        Ok(text)
    }

    fn json<T: serde::de::DeserializeOwned>(&mut self, flag: &str, path: &Path) -> Result<T> {
        let text = self.read(flag, path)?;
        serde_json::from_str(&text).map_err(|e| {
            // validation errors raised inside deserialization already carry the kind
            let msg = e.to_string().replace("input error: ", "");
            Error::Input(format!("{}: {msg}", path.display()))
        })
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn one_based(sets: &[Vec<usize>]) -> Value {
    json!(balanced::to_one_based(sets))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComplex {
    vertex_count: usize,
    facets: Vec<Vec<usize>>,
}

fn load_complex(inputs: &mut Inputs, path: &Path) -> Result<SimplicialComplex> {
    let raw: RawComplex = inputs.json("complex", path)?;
    let facets = raw
        .facets
        .iter()
        .map(|f| {
            f.iter()
                .map(|&v| v.checked_sub(1).ok_or_else(|| Error::input("vertex ids are 1-based")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SimplicialComplex::from_faces(raw.vertex_count, facets)
}

fn homology_json(h: &simplicial::HomologyResult) -> Value {
    json!(h.groups)
}

fn execute(cli: &Cli, inputs: &mut Inputs, notes: &mut Vec<String>) -> Result<Value> {
    let seed = cli.seed;
    match &cli.command {
        Command::Balanced { config } => {
            let cfg: PointConfig = inputs.json("config", config)?;
            let profile = balanced::enumerate_minimal_balanced(&cfg)?;
            Ok(json!({
                "m": cfg.len(),
                "dim": cfg.dim(),
                "rank": cfg.rank(),
                "r_in_relative_interior": cfg.base_in_relint(),
                "minimal_balanced": one_based(profile.minimal_balanced()),
            }))
        }
        Command::Complex { config } => {
            let cfg: PointConfig = inputs.json("config", config)?;
            let k = balanced::nonbalanced_complex(&cfg)?;
            Ok(json!({
                "vertex_count": k.vertex_count(),
                "dimension": k.dimension(),
                "facets": one_based(k.facets()),
                "cone_apex": simplicial::cone_apex_detect(&k).map(|v| v + 1),
            }))
        }
        Command::Homology { config, complex } => {
            if let Some(path) = complex {
                let k = load_complex(inputs, path)?;
                let h = simplicial::reduced_homology(&k)?;
                return Ok(json!({
                    "homology": homology_json(&h),
                    "euler_characteristic": simplicial::euler_characteristic(&k)?,
                    "cone_apex": simplicial::cone_apex_detect(&k).map(|v| v + 1),
                }));
            }
            let path = config.as_ref().expect("clap enforces one input");
            let cfg: PointConfig = inputs.json("config", path)?;
            let k = balanced::nonbalanced_complex(&cfg)?;
            let h = simplicial::reduced_homology(&k)?;
            let relint = cfg.base_in_relint();
            let mut out = json!({
                "homology": homology_json(&h),
                "rank": cfg.rank(),
                "r_in_relative_interior": relint,
                "cone_apex": simplicial::cone_apex_detect(&k).map(|v| v + 1),
            });
            if relint {
                let sphere = cfg.rank() as isize - 1;
                let ok = simplicial::homology_is_sphere(&h, sphere);
                out["sphere_dimension"] = json!(sphere);
                out["sphere"] = json!(ok);
                out["summary"] = json!(format!("sphere S^{sphere}: {ok}"));
            } else {
                out["contractible_homology"] = json!(h.is_trivial());
                out["summary"] = json!(format!("trivial reduced homology: {}", h.is_trivial()));
            }
            Ok(out)
        }
        Command::Equiv {
            config,
            up_to_permutation,
        } => {
            if config.len() != 2 {
                return Err(Error::input("equiv needs exactly two --config files"));
            }
            let a: PointConfig = inputs.json("config", &config[0])?;
            let b: PointConfig = inputs.json("config", &config[1])?;
            if *up_to_permutation {
                let perm = balanced::bs_equivalent_up_to_permutation(&a, &b)?;
                Ok(json!({
                    "equivalent": perm.is_some(),
                    "up_to_permutation": true,
                    "permutation": perm.map(|p| p.iter().map(|i| i + 1).collect::<Vec<_>>()),
                }))
            } else {
                Ok(json!({
                    "equivalent": balanced::bs_equivalent(&a, &b)?,
                    "up_to_permutation": false,
                }))
            }
        }
        Command::Degree {
            config,
            triangulation,
            cover,
        } => {
            let cfg: PointConfig = inputs.json("config", config)?;
            let tri: OrientedTriangulation = inputs.json("triangulation", triangulation)?;
            let spec: CoverSpec = inputs.json("cover", cover)?;
            let cov = spec.into_cover(cfg.len())?;
            Ok(degree::degree(&tri, &cov, &cfg, seed)?.to_json())
        }
        Command::MakeCircle { config, k } => {
            let cfg: PointConfig = inputs.json("config", config)?;
            let (tri, cov) = degree::construct_degree_k_circle(&cfg, *k)?;
            let check = degree::degree(&tri, &cov, &cfg, seed)?;
            Ok(json!({
                "k": k,
                "triangulation": tri,
                "cover": cov,
                "degree": check.degree(),
            }))
        }
        Command::Sperner { instance } => {
            let spec: InstanceSpec = inputs.json("instance", instance)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let labeled = spec.subdivision(&mut rng)?;
            let n = labeled.n();
            let colors = match spec.coloring.as_ref() {
                Some(c) => c
                    .iter()
                    .map(|&x| x.checked_sub(1).ok_or_else(|| Error::input("colors are 1-based")))
                    .collect::<Result<Vec<_>>>()?,
                None => applications::random_sperner_coloring(&labeled, &mut rng),
            };
            if !applications::check_sperner(&labeled, &colors) {
                return Err(Error::input("coloring is not a Sperner coloring of the subdivision"));
            }
            let rainbow = applications::find_rainbow(labeled.tri(), &colors, n)?;
            let cover = degree::WeightedCover::from_coloring(n, &colors)?;
            let cfg = applications::kkm_config(n);
            let boundary = degree::degree(labeled.boundary(), &cover, &cfg, seed)?;
            Ok(json!({
                "n": n,
                "facets": labeled.tri().len(),
                "sperner": true,
                "rainbow_facets": rainbow.facets.iter().map(|f| f + 1).collect::<Vec<_>>(),
                "rainbow_count": rainbow.facets.len(),
                "signed_count": rainbow.signed_count,
                "boundary_degree": boundary.degree(),
                "coloring": colors.iter().map(|c| c + 1).collect::<Vec<_>>(),
            }))
        }
        Command::Kkm { instance } => {
            let spec: InstanceSpec = inputs.json("instance", instance)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let labeled = spec.subdivision(&mut rng)?;
            let n = labeled.n();
            let cover = match spec.explicit_cover(n)? {
                Some(c) => c,
                None => {
                    degree::WeightedCover::from_coloring(n, &applications::random_sperner_coloring(&labeled, &mut rng))?
                }
            };
            let (facet, support) = applications::kkm_witness(&labeled, &cover)?;
            Ok(json!({
                "n": n,
                "facet": facet + 1,
                "vertices": labeled.tri().facets()[facet].iter().map(|v| v + 1).collect::<Vec<_>>(),
                "support": support.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "cover": cover,
            }))
        }
        Command::Kkms { instance } => {
            let spec: InstanceSpec = inputs.json("instance", instance)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let labeled = spec.subdivision(&mut rng)?;
            let m = applications::kkms_subsets(labeled.n()).len();
            let cover = match spec.explicit_cover(m)? {
                Some(c) => c,
                None => applications::random_kkms_cover(&labeled, &mut rng),
            };
            let inst = KkmsInstance::new(labeled, cover)?;
            let (facet, family) = applications::kkms_witness(&inst)?;
            let boundary = applications::kkms_boundary_degree(&inst, seed)?;
            Ok(json!({
                "n": inst.labeled().n(),
                "facet": facet + 1,
                "vertices": inst.labeled().tri().facets()[facet].iter().map(|v| v + 1).collect::<Vec<_>>(),
                "balanced_family": one_based(&family),
                "boundary_degree": boundary.degree(),
                "subsets": one_based(inst.subsets()),
            }))
        }
        Command::TheoremB {
            config,
            triangulation,
            cover,
        } => {
            let cfg: PointConfig = inputs.json("config", config)?;
            let tri: OrientedTriangulation = inputs.json("triangulation", triangulation)?;
            let spec: CoverSpec = inputs.json("cover", cover)?;
            let cov = spec.into_cover(cfg.len())?;
            Ok(applications::theorem_b_check(&tri, &cov, &cfg, seed)?.to_json())
        }
        Command::Index { grid, config, emit_svg } => {
            let cfg: PointConfig = inputs.json("config", config)?;
            let spec: GridSpec = inputs.json("grid", grid)?;
            let g = spec.build(&cfg)?;
            let report = index_field::additivity_check(&g, &cfg, seed)?;
            if !report.image_discrepancies.is_empty() {
                notes.push(format!(
                    "{} singular facets have images that miss r",
                    report.image_discrepancies.len()
                ));
            }
            if let Some(path) = emit_svg {
                let comps: Vec<_> = report.components.iter().map(|c| c.component.clone()).collect();
                std::fs::write(path, index_field::render_svg(&g, &comps)?)
                    .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
            }
            Ok(report.to_json())
        }
    }
}

fn manifest(cli: &Cli, inputs: &Inputs) -> Value {
    json!({
        "tool": "balcov",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": cli.command.name(),
        "inputs": inputs.digests,
        "seed": cli.seed,
    })
}

/// Array field that becomes the CSV table for each command.
fn table_key(cmd: &str) -> Option<&'static str> {
    match cmd {
        "balanced" => Some("minimal_balanced"),
        "complex" => Some("facets"),
        "homology" => Some("homology"),
        "degree" => Some("crossings"),
        "index" => Some("components"),
        _ => None,
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn to_csv(cmd: &str, manifest: &Value, result: &Value) -> Result<String> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Input(format!("csv: {e}"));
    let rows = table_key(cmd).and_then(|k| result.get(k)).and_then(Value::as_array);
    match rows {
        Some(items) if items.first().is_some_and(Value::is_object) => {
            let headers: Vec<String> = items[0].as_object().unwrap().keys().cloned().collect();
            w.write_record(&headers).map_err(csv_err)?;
            for item in items {
                w.write_record(headers.iter().map(|h| cell(&item[h])))
                    .map_err(csv_err)?;
            }
        }
        Some(items) => {
            w.write_record(["row", "value"]).map_err(csv_err)?;
            for (i, item) in items.iter().enumerate() {
                w.write_record([(i + 1).to_string(), cell(item)]).map_err(csv_err)?;
            }
        }
        None => {
            w.write_record(["key", "value"]).map_err(csv_err)?;
            if let Some(obj) = result.as_object() {
                for (k, v) in obj {
                    w.write_record([k.as_str(), &cell(v)]).map_err(csv_err)?;
                }
            }
        }
    }
    let body =
        String::from_utf8(w.into_inner().map_err(|e| Error::Input(e.to_string()))?).expect("csv output is UTF-8");
    let mut out = String::new();
    for (k, v) in manifest.as_object().unwrap() {
        out.push_str(&format!(
            "# {k}: {}\n",
            if v.is_string() { cell(v) } else { v.to_string() }
        ));
    }
    out.push_str(&body);
    Ok(out)
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let started = Instant::now();
    let mut inputs = Inputs {
        digests: BTreeMap::new(),
    };
    let mut notes = Vec::new();
    let result = execute(&cli, &mut inputs, &mut notes);
    let manifest = manifest(&cli, &inputs);
    let mut stderr = String::new();
    for n in &notes {
        stderr.push_str(&format!("note: {n}\n"));
    }
    let (code, payload) = match result {
        Ok(result) => (0, result),
        Err(e) => {
            stderr.push_str(&format!("error: {e}\n"));
            (
                e.exit_code(),
                json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } }),
            )
        }
    };
    stderr.push_str(&format!(
        "{} finished in {} ms\n",
        cli.command.name(),
        started.elapsed().as_millis()
    ));
    let stdout = if code == 0 && cli.format == Format::Csv {
        match to_csv(cli.command.name(), &manifest, &payload) {
            Ok(s) => s,
            Err(e) => {
                return Outcome {
                    code: e.exit_code(),
                    stdout: String::new(),
                    stderr: format!("error: {e}\n"),
                }
            }
        }
    } else {
        let mut doc = Map::new();
        doc.insert("manifest".into(), manifest);
        let key = if code == 0 { "result" } else { "failure" };
        doc.insert(key.into(), payload);
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
        s.push('\n');
        s
    };
    Outcome { code, stdout, stderr }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Input(_) | Error::Json(_) | Error::Io(_) => "input",
        Error::Capacity(_) => "capacity",
        Error::Mismatch(_) => "mismatch",
        Error::Genericity { .. } => "genericity",
        Error::Oracle(_) => "oracle",
        Error::TheoremViolation(_) => "theorem_violation",
        Error::BoundaryContact(_) => "boundary_contact",
    }
}
