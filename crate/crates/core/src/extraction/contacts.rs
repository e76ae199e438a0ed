use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContactKind {
    Phone,
    Email,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contact {
    #[serde(rename = "type")]
    pub kind: ContactKind,
    pub value: String,
}

static EMAIL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[a-zA-Z0-9]?[a-zA-Z0-9_.]+[@][a-zA-Z0-9_.]+[.](?:com|net|edu|in|org|en)\b").unwrap());
static PHONE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[+]?[0]?[1-9][0-9\s]*[-]?[0-9\s]+").unwrap());

const MIN_PHONE_DIGITS: usize = 7;

/// Emails first, then phone numbers in the remaining text. Phone matches
/// with fewer than seven digits are dropped as noise.
pub fn extract_contacts(clean_text: &str) -> Vec<Contact> {
    let mut found: Vec<(usize, Contact)> = Vec::new();
    let mut masked = clean_text.to_string();
    for m in EMAIL.find_iter(clean_text) {
        found.push((
            m.start(),
            Contact {
                kind: ContactKind::Email,
                value: m.as_str().to_string(),
            },
        ));
        masked.replace_range(m.range(), &" ".repeat(m.len()));
    }
    for m in PHONE.find_iter(&masked) {
        let value = m.as_str().trim();
        if value.chars().filter(char::is_ascii_digit).count() >= MIN_PHONE_DIGITS {
            found.push((
                m.start(),
                Contact {
                    kind: ContactKind::Phone,
                    value: value.to_string(),
                },
            ));
        }
    }
    found.sort_by_key(|(pos, _)| *pos);
    found.into_iter().map(|(_, c)| c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(text: &str) -> Vec<(ContactKind, String)> {
        extract_contacts(text).into_iter().map(|c| (c.kind, c.value)).collect()
    }

    #[test]
    fn hyphenated_phone() {
        assert_eq!(
            values("Please call Dr Manita at 98412-34567"),
            vec![(ContactKind::Phone, "98412-34567".to_string())]
        );
    }

    #[test]
    fn spaced_phone() {
        assert_eq!(
            values("for emergencies call 800 123 456"),
            vec![(ContactKind::Phone, "800 123 456".to_string())]
        );
    }

    #[test]
    fn email() {
        assert_eq!(
            values("write to help@relief.org"),
            vec![(ContactKind::Email, "help@relief.org".to_string())]
        );
    }

    #[test]
    fn short_numbers_are_not_phones() {
        assert!(values("200 tents and 600 blankets on 25 April 2015").is_empty());
    }

    #[test]
    fn email_digits_are_not_phones() {
        let got = values("mail relief2015@aid.org or +91 98412 34567");
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].0, ContactKind::Email);
        assert_eq!(got[1], (ContactKind::Phone, "+91 98412 34567".to_string()));
    }
}
