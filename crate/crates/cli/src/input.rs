//! File loading: relation CSVs, query text, models, entities, distributions
//! and run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use attriscore::circuit::{Circuit, CircuitJson, DecisionTree, TreeJson};
use attriscore::mlscore::{Distribution, Entity, FeatureSpace};
use attriscore::rational::RationalJson;
use attriscore::relcore::{
    parse_constraints, parse_queries, BooleanQuery, DenialConstraint, InstanceBuilder, RelationalInstance, Schema,
    TupleId, Value,
};
use attriscore::{Caps, Rational};
use indexmap::IndexMap;
use num_traits::Zero;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), msg: e.to_string() })
}

pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Json { path: origin.to_string(), msg: e.to_string() })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    parse_json(&read(path)?, &path.display().to_string())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreak {
    #[default]
    Lexicographic,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub caps: Caps,
    pub format: Format,
    /// Only lexicographic tie-breaking exists; the key is accepted so that
    /// configs can state it.
    pub tie_break: TieBreak,
    pub seed: Option<u64>,
}

pub fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let cfg: RunConfig = read_json(path).map_err(|e| match e {
        CliError::Json { msg, .. } => CliError::Config(msg),
        other => other,
    })?;
    cfg.caps.validate()?;
    Ok(cfg)
}

// ------------------------------------------------------------------ relations

/// Builds an instance from `(predicate, csv text)` pairs.
///
/// The header row names the attributes. A first column named `#id` holds
/// tuple ids; without it ids default to `pred:n`. The cell `NULL` is the
/// null constant.
pub fn instance_from_csv(files: &[(String, String)], caps: &Caps) -> Result<RelationalInstance, CliError> {
    let mut schema = Schema::new();
    let mut rows = Vec::new();
    for (pred, text) in files {
        let origin = format!("{pred}.csv");
        let csv_err = |e: csv::Error| CliError::Csv { path: origin.clone(), msg: e.to_string() };
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let has_id = header.first().is_some_and(|h| h == "#id");
        let attrs: Vec<String> = header[usize::from(has_id)..].to_vec();
        schema.add(pred, attrs.len(), Some(attrs))?;
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            let mut cells = rec.iter();
            let id = if has_id { cells.next().map(TupleId::new) } else { None };
            rows.push((id, pred.clone(), cells.map(Value::parse).collect::<Vec<_>>()));
        }
    }
    if rows.len() > caps.max_tuples {
        return Err(CliError::TooManyTuples { found: rows.len(), cap: caps.max_tuples });
    }
    let mut b = InstanceBuilder::with_schema(schema);
    for (id, pred, values) in rows {
        b.push(id, &pred, values);
    }
    Ok(b.build()?)
}

/// Every `*.csv` in `dir`, by file name.
pub fn load_instance(dir: &Path, caps: &Caps) -> Result<RelationalInstance, CliError> {
    let io = |e: std::io::Error| CliError::Io { path: dir.display().to_string(), msg: e.to_string() };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "csv"));
    paths.sort();
    let files = paths
        .iter()
        .map(|p| {
            let stem = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok((stem, read(p)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    instance_from_csv(&files, caps)
}

pub fn single_query(text: &str, schema: &Schema) -> Result<BooleanQuery, CliError> {
    let mut qs = parse_queries(text, schema)?;
    if qs.len() != 1 {
        return Err(CliError::QueryCount(qs.len()));
    }
    Ok(qs.remove(0))
}

pub fn queries(text: &str, schema: &Schema) -> Result<Vec<BooleanQuery>, CliError> {
    Ok(parse_queries(text, schema)?)
}

pub fn constraints(text: &str, schema: &Schema) -> Result<Vec<DenialConstraint>, CliError> {
    Ok(parse_constraints(text, schema)?)
}

// --------------------------------------------------------------------- models

pub fn circuit_from_text(text: &str, origin: &str) -> Result<Circuit, CliError> {
    let j: CircuitJson = parse_json(text, origin)?;
    Ok(Circuit::from_json(&j)?)
}

pub fn tree_from_text(text: &str, origin: &str) -> Result<DecisionTree, CliError> {
    let j: TreeJson = parse_json(text, origin)?;
    Ok(DecisionTree::from_json(&j)?)
}

// ------------------------------------------------------------------- entities

/// Rows of an entity CSV whose header names the features.
pub fn entities_from_csv(text: &str, origin: &str, space: &FeatureSpace) -> Result<Vec<Entity>, CliError> {
    let csv_err = |e: csv::Error| CliError::Csv { path: origin.to_string(), msg: e.to_string() };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            Ok(space.entity(header.iter().map(String::as_str).zip(rec.iter()))?)
        })
        .collect()
}

/// `name=value,...` pairs, or bare values in feature order.
pub fn entity_inline(spec: &str, space: &FeatureSpace) -> Result<Entity, CliError> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if spec.contains('=') {
        let pairs = parts
            .iter()
            .map(|p| p.split_once('=').map(|(k, v)| (k.trim(), v.trim())))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| CliError::Entity(format!("cannot read `{spec}` as name=value pairs")))?;
        Ok(space.entity(pairs)?)
    } else {
        if parts.len() != space.len() {
            return Err(CliError::Entity(format!(
                "`{spec}` has {} values for {} features",
                parts.len(),
                space.len()
            )));
        }
        Ok(space.entity(space.names().iter().map(String::as_str).zip(parts))?)
    }
}

// -------------------------------------------------------------- distributions

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum DistJson {
    Uniform,
    Product {
        marginals: IndexMap<String, IndexMap<String, RationalJson>>,
    },
    Empirical {
        sample: PathBuf,
        #[serde(default)]
        weights: Option<Vec<RationalJson>>,
    },
}

fn rational(j: RationalJson) -> Result<Rational, CliError> {
    Rational::try_from(j).map_err(CliError::Distribution)
}

/// Product marginals may omit features (uniform over their domain) and
/// values (probability 0). Empirical sample paths are relative to `base`.
pub fn distribution_from_text(
    text: &str,
    origin: &str,
    base: &Path,
    space: &FeatureSpace,
) -> Result<Distribution, CliError> {
    match parse_json::<DistJson>(text, origin)? {
        DistJson::Uniform => Ok(Distribution::Uniform),
        DistJson::Product { marginals } => {
            let mut table: Vec<Option<Vec<Rational>>> = vec![None; space.len()];
            for (name, values) in marginals {
                let f = space.index(&name)?;
                let mut row = vec![Rational::zero(); space.domain(f).len()];
                for (v, p) in values {
                    row[space.value_index(f, &v)?] = rational(p)?;
                }
                table[f] = Some(row);
            }
            let marg = table
                .into_iter()
                .enumerate()
                .map(|(f, row)| {
                    row.unwrap_or_else(|| {
                        let k = space.domain(f).len() as i64;
                        vec![Rational::new(1.into(), k.into()); k as usize]
                    })
                })
                .collect();
            Ok(Distribution::product(space, marg)?)
        }
        DistJson::Empirical { sample, weights } => {
            let path = base.join(sample);
            let rows = entities_from_csv(&read(&path)?, &path.display().to_string(), space)?;
            match weights {
                None => Ok(Distribution::empirical_uniform(space, rows)?),
                Some(w) => {
                    if w.len() != rows.len() {
                        return Err(CliError::Distribution(format!(
                            "{} weights for {} sample rows",
                            w.len(),
                            rows.len()
                        )));
                    }
                    let w = w.into_iter().map(rational).collect::<Result<Vec<_>, _>>()?;
                    Ok(Distribution::empirical(space, rows.into_iter().zip(w).collect())?)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_ids_and_nulls() {
        let files = vec![
            ("R".to_string(), "#id,A,B\nr1,a,NULL\nr2,b,c\n".to_string()),
            ("S".to_string(), "A\na\nb\n".to_string()),
        ];
        let d = instance_from_csv(&files, &Caps::default()).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.id(0).as_str(), "r1");
        assert_eq!(d.tuple(0).values[1], Value::Null);
        assert_eq!(d.id(3).as_str(), "S:2");
    }

    #[test]
    fn tuple_cap() {
        let files = vec![("S".to_string(), "A\na\nb\nc\n".to_string())];
        let caps = Caps { max_tuples: 2, ..Caps::default() };
        assert!(matches!(instance_from_csv(&files, &caps), Err(CliError::TooManyTuples { found: 3, cap: 2 })));
    }

    #[test]
    fn inline_entities() {
        let s = FeatureSpace::boolean(["x1", "x2"]).unwrap();
        assert_eq!(entity_inline("1,0", &s).unwrap(), Entity(vec![1, 0]));
        assert_eq!(entity_inline("x2=1, x1=0", &s).unwrap(), Entity(vec![0, 1]));
        assert!(entity_inline("1", &s).is_err());
        assert!(entity_inline("x1=2,x2=0", &s).is_err());
    }

    #[test]
    fn product_defaults() {
        let s = FeatureSpace::boolean(["x1", "x2"]).unwrap();
        let text = r#"{"kind":"product","marginals":{"x1":{"1":{"num":1,"den":1}}}}"#;
        let d = distribution_from_text(text, "d.json", Path::new("."), &s).unwrap();
        assert_eq!(d.marginal(&s, 0), vec![Rational::zero(), Rational::from_integer(1.into())]);
        assert_eq!(d.marginal(&s, 1)[0], Rational::new(1.into(), 2.into()));
        let bad = r#"{"kind":"product","marginals":{"x9":{}}}"#;
        assert!(distribution_from_text(bad, "d.json", Path::new("."), &s).is_err());
        assert!(distribution_from_text(r#"{"kind":"normal"}"#, "d.json", Path::new("."), &s).is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let r: Result<RunConfig, _> = serde_json::from_str(r#"{"capz": {}}"#);
        assert!(r.is_err());
        let c: RunConfig = serde_json::from_str(r#"{"format": "table", "caps": {"max_contingency": 2}}"#).unwrap();
        assert_eq!(c.format, Format::Table);
        assert_eq!(c.caps.max_contingency, 2);
    }
}
