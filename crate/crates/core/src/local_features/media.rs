use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::Medium;
use crate::error::{Error, Result};

pub const MEDIA_DIM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediaVector {
    pub editor: f64,
    pub responsible_person: f64,
    pub bg_server: f64,
    /// 1 / Alexa rank, or 0 when the rank is unknown.
    pub popularity: f64,
    pub domain_person: f64,
    /// log10 of the publisher's age in days at the reference date (0 for age 0).
    pub days_existing_log: f64,
}

impl MediaVector {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.editor,
            self.responsible_person,
            self.bg_server,
            self.popularity,
            self.domain_person,
            self.days_existing_log,
        ]
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn media_features(m: &Medium, reference_date: NaiveDate) -> Result<MediaVector> {
    let days = (reference_date - m.created_date).num_days();
    if days < 0 {
        return Err(Error::InvalidRecord {
            id: m.id.clone(),
            message: format!("created_date {} is after {reference_date}", m.created_date),
        });
    }
    Ok(MediaVector {
        editor: indicator(m.has_editor),
        responsible_person: indicator(m.has_responsible_person),
        bg_server: indicator(m.bg_server),
        popularity: m.alexa_rank.map_or(0.0, |r| 1.0 / r as f64),
        domain_person: indicator(m.has_domain_person),
        days_existing_log: if days == 0 { 0.0 } else { (days as f64).log10() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::reference_date;

    fn medium(created: NaiveDate, rank: Option<u64>, flags: bool) -> Medium {
        Medium {
            id: "m".into(),
            has_editor: flags,
            has_responsible_person: flags,
            bg_server: flags,
            alexa_rank: rank,
            has_domain_person: flags,
            created_date: created,
        }
    }

    #[test]
    fn age_of_a_2005_medium() {
        let created = NaiveDate::from_ymd_opt(2005, 1, 1).unwrap();
        assert_eq!((reference_date() - created).num_days(), 5113);
        let v = media_features(&medium(created, None, true), reference_date()).unwrap();
        assert!((v.days_existing_log - 3.7087).abs() < 1e-4);
        assert_eq!(v.editor, 1.0);
    }

    #[test]
    fn popularity_is_reciprocal_rank() {
        let v = media_features(&medium(reference_date(), Some(100), false), reference_date()).unwrap();
        assert_eq!(v.popularity, 0.01);
    }

    #[test]
    fn zero_case() {
        let v = media_features(&medium(reference_date(), None, false), reference_date()).unwrap();
        assert_eq!(v.to_vec(), vec![0.0; MEDIA_DIM]);
    }

    #[test]
    fn future_creation_is_rejected() {
        let created = NaiveDate::from_ymd_opt(2020, 5, 1).unwrap();
        assert!(media_features(&medium(created, None, false), reference_date()).is_err());
    }
}
