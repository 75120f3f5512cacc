//! Line-oriented JSON rules files.
//!
//! The first non-blank line is a header declaring the attribute-value universe in index
//! order; every following non-blank line is one rule:
//!
//! ```text
//! {"item": "Samsung TL225", "attributes": ["Resolution=12.2mp", "Optical Zoom=4.6x"]}
//! {"tag": "blurry pictures", "sentiment": "-", "p": 0.12, "attrs": ["Resolution=12.2mp"]}
//! ```

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_instance, AttrId, Instance, Rule, Sentiment};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    #[serde(default)]
    item: String,
    attributes: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleLine {
    tag: String,
    sentiment: String,
    p: f64,
    attrs: Vec<String>,
}

/// Parsed contents of a rules file.
#[derive(Clone, Debug, PartialEq)]
pub struct RulesFile {
    pub item_id: String,
    pub attributes: Vec<String>,
    pub rules: Vec<Rule>,
}

fn parse_sentiment(s: &str) -> Option<Sentiment> {
    match s {
        "+" => Some(Sentiment::Positive),
        "-" | "\u{2212}" => Some(Sentiment::Negative),
        _ => None,
    }
}

impl RulesFile {
    pub fn read<R: BufRead>(reader: R) -> Result<RulesFile> {
        let mut header: Option<(Header, HashMap<String, usize>)> = None;
        let mut rules = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            match &header {
                None => {
                    let h: Header =
                        serde_json::from_str(text).map_err(|e| err(format!("expected header object: {e}")))?;
                    if h.attributes.is_empty() {
                        return Err(err("header declares no attribute values".into()));
                    }
                    let mut index = HashMap::with_capacity(h.attributes.len());
                    for (i, name) in h.attributes.iter().enumerate() {
                        if index.insert(name.clone(), i).is_some() {
                            return Err(err(format!("duplicate attribute value {name:?}")));
                        }
                    }
                    header = Some((h, index));
                }
                Some((_, index)) => {
                    let r: RuleLine = serde_json::from_str(text).map_err(|e| err(format!("malformed rule: {e}")))?;
                    let sentiment = parse_sentiment(&r.sentiment)
                        .ok_or_else(|| err(format!("sentiment must be \"+\" or \"-\", got {:?}", r.sentiment)))?;
                    if !(0.0..=1.0).contains(&r.p) {
                        return Err(err(format!("p = {} outside [0, 1]", r.p)));
                    }
                    if r.attrs.is_empty() {
                        return Err(err(format!("rule for {:?} has no attributes", r.tag)));
                    }
                    let antecedent = r
                        .attrs
                        .iter()
                        .map(|a| {
                            index
                                .get(a)
                                .map(|&i| AttrId(i))
                                .ok_or_else(|| err(format!("attribute value {a:?} not declared in header")))
                        })
                        .collect::<Result<_>>()?;
                    rules.push(Rule {
                        antecedent,
                        tag_label: r.tag,
                        sentiment,
                        probability: r.p,
                    });
                }
            }
        }
        let (h, _) = header.ok_or(Error::Parse {
            line: 0,
            message: "file is empty, expected a header line".into(),
        })?;
        Ok(RulesFile {
            item_id: h.item,
            attributes: h.attributes,
            rules,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RulesFile> {
        let file = fs::File::open(path)?;
        RulesFile::read(BufReader::new(file))
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        let header = Header {
            item: self.item_id.clone(),
            attributes: self.attributes.clone(),
        };
        writeln!(w, "{}", serde_json::to_string(&header).expect("header serializes"))?;
        for rule in &self.rules {
            let line = RuleLine {
                tag: rule.tag_label.clone(),
                sentiment: rule.sentiment.ascii().to_string(),
                p: rule.probability,
                attrs: rule.antecedent.iter().map(|a| self.attributes[a.0].clone()).collect(),
            };
            writeln!(w, "{}", serde_json::to_string(&line).expect("rule serializes"))?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = std::io::BufWriter::new(fs::File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Builds the solver instance, carrying over the item id and attribute names.
    pub fn to_instance(&self) -> Result<Instance> {
        build_instance(&self.rules, self.attributes.len())?
            .with_item_id(self.item_id.clone())
            .with_attr_names(self.attributes.clone())
    }
}

/// The six camera rules used throughout the documentation, as a rules file.
pub fn camera_example() -> RulesFile {
    let attributes = [
        "Resolution=12.2mp",
        "Optical Zoom=4.6x",
        "Color=Red",
        "Front LCD=1.5\"",
        "Back LCD=3.5\"",
        "Shutter Speed=8-1/2000",
        "Touchscreen=true",
        "Gesture Control=true",
    ]
    .map(String::from)
    .to_vec();
    let rules = vec![
        Rule::new([3, 6, 7], "super cool", Sentiment::Positive, 0.3),
        Rule::new([2, 3, 6, 7], "stylish", Sentiment::Positive, 0.2),
        Rule::new([0, 1, 4], "lightweight", Sentiment::Positive, 0.1),
        Rule::new([3, 6, 7], "poor battery life", Sentiment::Negative, 0.13),
        Rule::new([0, 1, 5], "blurry pictures", Sentiment::Negative, 0.12),
        Rule::new([4, 6, 7], "gimmicky touchscreen", Sentiment::Negative, 0.15),
    ];
    RulesFile {
        item_id: "Samsung TL225".into(),
        attributes,
        rules,
    }
}
