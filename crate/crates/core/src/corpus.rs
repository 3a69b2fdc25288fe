//! Articles, publishers and the nine-label scheme, with JSONL ingestion.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    FakeNews,
    Sensations,
    HateSpeech,
    Conspiracies,
    AntiDemocratic,
    ProAuthoritarian,
    Defamation,
    Delusion,
    NonToxic,
}

impl Label {
    pub const COUNT: usize = 9;

    pub const ALL: [Label; Label::COUNT] = [
        Label::FakeNews,
        Label::Sensations,
        Label::HateSpeech,
        Label::Conspiracies,
        Label::AntiDemocratic,
        Label::ProAuthoritarian,
        Label::Defamation,
        Label::Delusion,
        Label::NonToxic,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Label::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::FakeNews => "fake_news",
            Label::Sensations => "sensations",
            Label::HateSpeech => "hate_speech",
            Label::Conspiracies => "conspiracies",
            Label::AntiDemocratic => "anti_democratic",
            Label::ProAuthoritarian => "pro_authoritarian",
            Label::Defamation => "defamation",
            Label::Delusion => "delusion",
            Label::NonToxic => "non_toxic",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Label::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Article {
    pub id: String,
    pub title: String,
    pub body: String,
    #[serde(default)]
    pub title_en: Option<String>,
    #[serde(default)]
    pub body_en: Option<String>,
    pub labels: Vec<Label>,
    pub medium_id: String,
}

impl Article {
    /// The class used for single-label training and evaluation: the first listed label.
    pub fn primary_label(&self) -> Label {
        self.labels[0]
    }

    pub fn has_translation(&self) -> bool {
        self.title_en.is_some() && self.body_en.is_some()
    }

    fn validate(&self) -> Result<()> {
        if self.title.trim().is_empty() || self.body.trim().is_empty() {
            return Err(Error::EmptyText(self.id.clone()));
        }
        if self.labels.is_empty() {
            return Err(self.invalid("no labels"));
        }
        if self.labels.contains(&Label::NonToxic) && self.labels.len() > 1 {
            return Err(self.invalid("non_toxic cannot be combined with other labels"));
        }
        Ok(())
    }

    fn invalid(&self, message: &str) -> Error {
        Error::InvalidRecord {
            id: self.id.clone(),
            message: message.to_string(),
        }
    }
}

/// Upper bound on publisher creation dates; also the default reference date
/// for the age feature.
pub fn reference_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2019, 1, 1).expect("valid date")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Medium {
    pub id: String,
    pub has_editor: bool,
    pub has_responsible_person: bool,
    pub bg_server: bool,
    pub alexa_rank: Option<u64>,
    pub has_domain_person: bool,
    pub created_date: NaiveDate,
}

impl Medium {
    fn validate(&self) -> Result<()> {
        let invalid = |message: &str| Error::InvalidRecord {
            id: self.id.clone(),
            message: message.to_string(),
        };
        if self.created_date > reference_date() {
            return Err(invalid("created_date is after 2019-01-01"));
        }
        if self.alexa_rank == Some(0) {
            return Err(invalid("alexa_rank must be >= 1"));
        }
        Ok(())
    }
}

/// A validated, immutable corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    articles: Vec<Article>,
    media: BTreeMap<String, Medium>,
}

impl Dataset {
    pub fn new(articles: Vec<Article>, media: Vec<Medium>) -> Result<Self> {
        let mut by_id = BTreeMap::new();
        for m in media {
            m.validate()?;
            if by_id.contains_key(&m.id) {
                return Err(Error::DuplicateId(m.id));
            }
            by_id.insert(m.id.clone(), m);
        }
        let mut seen = HashSet::new();
        for a in &articles {
            a.validate()?;
            if !seen.insert(a.id.as_str()) {
                return Err(Error::DuplicateId(a.id.clone()));
            }
        }
        let unresolved: Vec<String> = articles
            .iter()
            .filter(|a| !by_id.contains_key(&a.medium_id))
            .map(|a| a.id.clone())
            .collect();
        if !unresolved.is_empty() {
            return Err(Error::UnresolvedMedium {
                article_ids: unresolved,
            });
        }
        if articles.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(Dataset {
            articles,
            media: by_id,
        })
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    pub fn media(&self) -> &BTreeMap<String, Medium> {
        &self.media
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn medium_of(&self, article: &Article) -> &Medium {
        &self.media[&article.medium_id]
    }

    pub fn ids(&self) -> Vec<String> {
        self.articles.iter().map(|a| a.id.clone()).collect()
    }

    /// Primary-label class indices in article order.
    pub fn targets(&self) -> Vec<usize> {
        self.articles.iter().map(|a| a.primary_label().index()).collect()
    }

    pub fn index_of(&self) -> HashMap<&str, usize> {
        self.articles
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.as_str(), i))
            .collect()
    }

    pub fn save(&self, articles_path: &Path, media_path: &Path) -> Result<()> {
        write_jsonl(articles_path, &self.articles)?;
        write_jsonl(media_path, self.media.values())
    }
}

pub fn load_dataset(articles_path: &Path, media_path: &Path) -> Result<Dataset> {
    let media: Vec<Medium> = read_jsonl(media_path)?;
    let articles: Vec<Article> = read_jsonl(articles_path)?;
    Dataset::new(articles, media)
}

/// Counts keyed by primary label; every label is present, possibly with 0.
pub fn label_distribution(d: &Dataset) -> BTreeMap<Label, usize> {
    let mut counts: BTreeMap<Label, usize> = Label::ALL.iter().map(|&l| (l, 0)).collect();
    for a in d.articles() {
        *counts.get_mut(&a.primary_label()).expect("all labels present") += 1;
    }
    counts
}

pub(crate) fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

pub(crate) fn write_jsonl<'a, T, I>(path: &Path, records: I) -> Result<()>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        std::fs::File::create(&p)
            .unwrap()
            .write_all(body.as_bytes())
            .unwrap();
        p
    }

    const MEDIUM: &str = r#"{"id":"m1","has_editor":true,"has_responsible_person":false,"bg_server":true,"alexa_rank":100,"has_domain_person":false,"created_date":"2005-01-01"}"#;

    #[test]
    fn loads_minimal_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let arts = write(
            dir.path(),
            "a.jsonl",
            "{\"id\":\"a1\",\"title\":\"Заглавие\",\"body\":\"Текст.\",\"title_en\":null,\"body_en\":null,\"labels\":[\"fake_news\",\"conspiracies\"],\"medium_id\":\"m1\"}\n\
             {\"id\":\"a2\",\"title\":\"T\",\"body\":\"B\",\"title_en\":\"T\",\"body_en\":\"B\",\"labels\":[\"non_toxic\"],\"medium_id\":\"m1\"}\n",
        );
        let media = write(dir.path(), "m.jsonl", &format!("{MEDIUM}\n"));
        let d = load_dataset(&arts, &media).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.media().len(), 1);
        assert_eq!(d.articles()[0].primary_label(), Label::FakeNews);
        assert_eq!(d.articles()[0].title, "Заглавие");
    }

    #[test]
    fn unresolved_medium_names_article() {
        let dir = tempfile::tempdir().unwrap();
        let arts = write(
            dir.path(),
            "a.jsonl",
            r#"{"id":"orphan","title":"t","body":"b","labels":["delusion"],"medium_id":"nope"}"#,
        );
        let media = write(dir.path(), "m.jsonl", MEDIUM);
        match load_dataset(&arts, &media) {
            Err(Error::UnresolvedMedium { article_ids }) => assert_eq!(article_ids, vec!["orphan"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_error_carries_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let arts = write(
            dir.path(),
            "a.jsonl",
            "{\"id\":\"a\",\"title\":\"t\",\"body\":\"b\",\"labels\":[\"delusion\"],\"medium_id\":\"m1\"}\n{broken\n",
        );
        let media = write(dir.path(), "m.jsonl", MEDIUM);
        match load_dataset(&arts, &media) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicates_empty_text_and_bad_labels() {
        let m: Medium = serde_json::from_str(MEDIUM).unwrap();
        let art = |id: &str, title: &str, labels: Vec<Label>| Article {
            id: id.into(),
            title: title.into(),
            body: "body".into(),
            title_en: None,
            body_en: None,
            labels,
            medium_id: "m1".into(),
        };
        let dup = Dataset::new(
            vec![art("x", "t", vec![Label::Delusion]), art("x", "t", vec![Label::Delusion])],
            vec![m.clone()],
        );
        assert!(matches!(dup, Err(Error::DuplicateId(id)) if id == "x"));
        let empty = Dataset::new(vec![art("e", "   ", vec![Label::Delusion])], vec![m.clone()]);
        assert!(matches!(empty, Err(Error::EmptyText(id)) if id == "e"));
        let mixed = Dataset::new(
            vec![art("n", "t", vec![Label::NonToxic, Label::FakeNews])],
            vec![m.clone()],
        );
        assert!(matches!(mixed, Err(Error::InvalidRecord { .. })));
        let none = Dataset::new(vec![art("n", "t", vec![])], vec![m]);
        assert!(matches!(none, Err(Error::InvalidRecord { .. })));
    }

    #[test]
    fn rejects_late_media_and_zero_rank() {
        let mut m: Medium = serde_json::from_str(MEDIUM).unwrap();
        m.created_date = NaiveDate::from_ymd_opt(2019, 1, 2).unwrap();
        assert!(m.validate().is_err());
        m.created_date = reference_date();
        m.alexa_rank = Some(0);
        assert!(m.validate().is_err());
    }

    #[test]
    fn label_strings_are_bijective() {
        for l in Label::ALL {
            let json = serde_json::to_string(&l).unwrap();
            assert_eq!(json, format!("\"{}\"", l.as_str()));
            assert_eq!(l.as_str().parse::<Label>().unwrap(), l);
            assert_eq!(Label::from_index(l.index()), Some(l));
        }
        assert!("toxic".parse::<Label>().is_err());
    }

    #[test]
    fn distribution_single_and_symmetric() {
        let m: Medium = serde_json::from_str(MEDIUM).unwrap();
        let mk = |i: usize, l: Label| Article {
            id: format!("a{i}"),
            title: "t".into(),
            body: "b".into(),
            title_en: None,
            body_en: None,
            labels: vec![l],
            medium_id: "m1".into(),
        };
        let one = Dataset::new(vec![mk(0, Label::NonToxic)], vec![m.clone()]).unwrap();
        let dist = label_distribution(&one);
        assert_eq!(dist[&Label::NonToxic], 1);
        assert_eq!(dist.values().sum::<usize>(), 1);
        let nine = Dataset::new(
            Label::ALL.iter().enumerate().map(|(i, &l)| mk(i, l)).collect(),
            vec![m],
        )
        .unwrap();
        assert!(label_distribution(&nine).values().all(|&c| c == 1));
    }
}
