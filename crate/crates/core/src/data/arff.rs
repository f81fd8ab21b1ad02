//! ARFF subset reader/writer: `@relation`, `@attribute <name> numeric|{...}`,
//! `@data` with comma rows. `%` comment lines are ignored, `?` is missing,
//! the last attribute is the class and must be nominal. Sparse rows are not
//! supported.

use std::path::Path;

use crate::data::{Cell, Dataset, FeatureKind, FeatureSpec, Instance, InstanceId};
use crate::error::{Error, Result};

fn unquote(token: &str) -> &str {
    let t = token.trim();
    if t.len() >= 2 {
        let bytes = t.as_bytes();
        if (bytes[0] == b'\'' && bytes[t.len() - 1] == b'\'')
            || (bytes[0] == b'"' && bytes[t.len() - 1] == b'"')
        {
            return &t[1..t.len() - 1];
        }
    }
    t
}

pub fn load_arff(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(&display, e))?;

    let mut relation: Option<String> = None;
    let mut attributes: Vec<FeatureSpec> = Vec::new();
    let mut in_data = false;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();

    for (lineno, raw_line) in content.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = line.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                relation = Some(unquote(line["@relation".len()..].trim()).to_string());
            } else if lower.starts_with("@attribute") {
                attributes.push(parse_attribute(&display, lineno + 1, line)?);
            } else if lower.starts_with("@data") {
                if relation.is_none() {
                    return Err(Error::parse(&display, Some(lineno + 1), "missing @relation"));
                }
                if attributes.len() < 2 {
                    return Err(Error::parse(
                        &display,
                        Some(lineno + 1),
                        "need at least one feature attribute and a class attribute",
                    ));
                }
                in_data = true;
            } else {
                return Err(Error::parse(
                    &display,
                    Some(lineno + 1),
                    format!("unexpected header line '{line}'"),
                ));
            }
        } else {
            if line.starts_with('{') {
                return Err(Error::parse(
                    &display,
                    Some(lineno + 1),
                    "sparse ARFF rows are not supported",
                ));
            }
            let cells: Vec<String> = line
                .split(',')
                .map(|c| unquote(c).to_string())
                .collect();
            if cells.len() != attributes.len() {
                return Err(Error::parse(
                    &display,
                    Some(lineno + 1),
                    format!(
                        "row has {} cells, header declares {} attributes",
                        cells.len(),
                        attributes.len()
                    ),
                ));
            }
            rows.push((lineno + 1, cells));
        }
    }

    if !in_data {
        return Err(Error::parse(&display, None, "missing @data section"));
    }
    let relation = relation.expect("checked above");

    let class_attr = attributes.pop().expect("checked above");
    let classes = match class_attr.kind {
        FeatureKind::Nominal(cats) => cats,
        FeatureKind::Numeric => {
            return Err(Error::parse(
                &display,
                None,
                "no class attribute: the last attribute must be nominal",
            ));
        }
    };
    if classes.len() < 2 {
        return Err(Error::InvalidDataset(format!(
            "{display}: class attribute declares fewer than 2 values"
        )));
    }

    let mut instances = Vec::with_capacity(rows.len());
    for (i, (lineno, cells)) in rows.iter().enumerate() {
        let mut values = Vec::with_capacity(attributes.len());
        for (spec, raw) in attributes.iter().zip(cells.iter()) {
            let cell = if raw == "?" {
                Cell::Missing
            } else {
                match &spec.kind {
                    FeatureKind::Numeric => {
                        Cell::Numeric(raw.parse::<f64>().map_err(|_| {
                            Error::parse(
                                &display,
                                Some(*lineno),
                                format!("non-numeric value '{raw}' in numeric attribute '{}'", spec.name),
                            )
                        })?)
                    }
                    FeatureKind::Nominal(cats) => Cell::Category(
                        cats.iter().position(|c| c == raw).ok_or_else(|| {
                            Error::parse(
                                &display,
                                Some(*lineno),
                                format!("undeclared value '{raw}' for attribute '{}'", spec.name),
                            )
                        })?,
                    ),
                }
            };
            values.push(cell);
        }
        let raw_label = cells.last().expect("non-empty row");
        if raw_label == "?" {
            return Err(Error::parse(&display, Some(*lineno), "missing class label"));
        }
        let label = classes.iter().position(|c| c == raw_label).ok_or_else(|| {
            Error::parse(
                &display,
                Some(*lineno),
                format!("undeclared class '{raw_label}'"),
            )
        })?;
        instances.push(Instance {
            id: InstanceId(i as u32),
            values,
            label,
        });
    }

    Dataset::new(relation, attributes, classes, instances)
}

fn parse_attribute(path: &str, lineno: usize, line: &str) -> Result<FeatureSpec> {
    let rest = line["@attribute".len()..].trim();
    // Name is either quoted or the first whitespace-delimited token.
    let (name, type_part) = if rest.starts_with('\'') || rest.starts_with('"') {
        let quote = rest.chars().next().unwrap();
        let end = rest[1..]
            .find(quote)
            .ok_or_else(|| Error::parse(path, Some(lineno), "unterminated attribute name"))?;
        (rest[1..=end].to_string(), rest[end + 2..].trim())
    } else {
        let mut split = rest.splitn(2, char::is_whitespace);
        let name = split
            .next()
            .filter(|n| !n.is_empty())
            .ok_or_else(|| Error::parse(path, Some(lineno), "attribute without a name"))?;
        (name.to_string(), split.next().unwrap_or("").trim())
    };
    if type_part.is_empty() {
        return Err(Error::parse(path, Some(lineno), "attribute without a type"));
    }

    if type_part.starts_with('{') {
        let inner = type_part
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::parse(path, Some(lineno), "malformed nominal specification"))?;
        let cats: Vec<String> = inner
            .split(',')
            .map(|c| unquote(c).to_string())
            .filter(|c| !c.is_empty())
            .collect();
        if cats.is_empty() {
            return Err(Error::parse(path, Some(lineno), "empty nominal specification"));
        }
        FeatureSpec::nominal(name, cats)
    } else {
        match type_part.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => Ok(FeatureSpec::numeric(name)),
            other => Err(Error::parse(
                path,
                Some(lineno),
                format!("unsupported attribute type '{other}'"),
            )),
        }
    }
}

fn needs_quoting(token: &str) -> bool {
    token.is_empty() || token.contains([' ', ',', '{', '}', '\'', '"', '%'])
}

fn quoted(token: &str) -> String {
    if needs_quoting(token) {
        format!("'{token}'")
    } else {
        token.to_string()
    }
}

/// Write the dataset in the ARFF subset accepted by [`load_arff`].
pub fn write_arff(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let mut out = String::new();
    out.push_str(&format!("@relation {}\n\n", quoted(&dataset.name)));
    for feature in &dataset.features {
        match &feature.kind {
            FeatureKind::Numeric => {
                out.push_str(&format!("@attribute {} numeric\n", quoted(&feature.name)));
            }
            FeatureKind::Nominal(cats) => {
                let cats: Vec<String> = cats.iter().map(|c| quoted(c)).collect();
                out.push_str(&format!(
                    "@attribute {} {{{}}}\n",
                    quoted(&feature.name),
                    cats.join(",")
                ));
            }
        }
    }
    let classes: Vec<String> = dataset.classes.iter().map(|c| quoted(c)).collect();
    out.push_str(&format!("@attribute class {{{}}}\n\n@data\n", classes.join(",")));
    for inst in &dataset.instances {
        let mut cells: Vec<String> = Vec::with_capacity(inst.values.len() + 1);
        for (cell, feature) in inst.values.iter().zip(&dataset.features) {
            cells.push(match cell {
                Cell::Missing => "?".to_string(),
                Cell::Numeric(v) => format!("{v}"),
                Cell::Category(c) => quoted(&feature.kind.categories()[*c]),
            });
        }
        cells.push(quoted(&dataset.classes[inst.label]));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(&display, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    const SMALL: &str = "\
% toy file
@relation demo
@attribute a numeric
@attribute b {x,y}
@attribute class {p,q}
@data
1.0,x,p
2.5,y,q
0.0,x,p
";

    #[test]
    fn parses_header_and_rows() {
        let f = write_temp(SMALL);
        let data = load_arff(f.path()).unwrap();
        assert_eq!(data.name, "demo");
        assert_eq!(data.features.len(), 2);
        assert_eq!(data.classes, vec!["p", "q"]);
        assert_eq!(data.len(), 3);
        assert_eq!(data.instances[1].values[1], Cell::Category(1));
    }

    #[test]
    fn question_mark_becomes_missing() {
        let f = write_temp("@relation r\n@attribute a numeric\n@attribute b {x,y}\n@attribute class {p,q}\n@data\n?,x,p\n1,y,q\n");
        let data = load_arff(f.path()).unwrap();
        assert_eq!(data.instances[0].values[0], Cell::Missing);
    }

    #[test]
    fn undeclared_nominal_value_is_an_error() {
        let f = write_temp("@relation r\n@attribute a numeric\n@attribute b {x,y}\n@attribute class {p,q}\n@data\n1.0,z,p\n");
        let err = load_arff(f.path()).unwrap_err();
        assert!(err.to_string().contains("undeclared"));
    }

    #[test]
    fn numeric_class_attribute_is_an_error() {
        let f = write_temp("@relation r\n@attribute a numeric\n@attribute class numeric\n@data\n1.0,2.0\n");
        let err = load_arff(f.path()).unwrap_err();
        assert!(err.to_string().contains("class"));
    }

    #[test]
    fn missing_data_section_is_an_error() {
        let f = write_temp("@relation r\n@attribute a numeric\n@attribute class {p,q}\n");
        assert!(load_arff(f.path()).is_err());
    }

    #[test]
    fn sparse_rows_are_rejected() {
        let f = write_temp("@relation r\n@attribute a numeric\n@attribute class {p,q}\n@data\n{0 1.0}\n");
        assert!(load_arff(f.path()).is_err());
    }

    #[test]
    fn round_trip_preserves_everything() {
        let f = write_temp(SMALL);
        let data = load_arff(f.path()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_arff(&data, out.path()).unwrap();
        let back = load_arff(out.path()).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn round_trip_keeps_missing_and_precision() {
        let f = write_temp(
            "@relation prec\n@attribute a numeric\n@attribute class {p,q}\n@data\n0.1234567890123456,p\n?,q\n",
        );
        let data = load_arff(f.path()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_arff(&data, out.path()).unwrap();
        let back = load_arff(out.path()).unwrap();
        for (a, b) in back.instances.iter().zip(&data.instances) {
            for (ca, cb) in a.values.iter().zip(&b.values) {
                match (ca, cb) {
                    (Cell::Numeric(x), Cell::Numeric(y)) => assert!((x - y).abs() <= 1e-12),
                    _ => assert_eq!(ca, cb),
                }
            }
        }
    }
}
