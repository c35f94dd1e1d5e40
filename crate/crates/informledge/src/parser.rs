//! Assertion DSL parsing and the relation table.
//!
//! Statements are chains of concept units joined by named relations:
//!
//! ```text
//! Africa CONTAINS lion
//! lion HAS_PROPERTY strong
//! "New York" PART_OF USA
//! ```
//!
//! A unit is a bare token or a double-quoted string (quoting admits
//! spaces); a relation name matches `[A-Z][A-Z0-9_]*`. Corpus files add two
//! line forms: `# comment` and `@domain NAME`, which switches the domain
//! every following statement is embedded under.
//!
//! The relation table is the rulebook that keeps nodes from linking
//! arbitrarily: it maps each relation name to the performance-strand values
//! (inclusivity, additivity) every link built from that relation carries.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::model::{Additivity, Inclusivity};

/// A parsed assertion: alternating units and relations, plus the domain it
/// will be embedded under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub domain: String,
    /// Unit labels, in statement order (length >= 2).
    pub units: Vec<String>,
    /// Relation names; always one fewer than `units`.
    pub relations: Vec<String>,
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, unit) in self.units.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", self.relations[i - 1])?;
            }
            if unit.chars().any(char::is_whitespace) {
                write!(f, "\"{unit}\"")?;
            } else {
                f.write_str(unit)?;
            }
        }
        Ok(())
    }
}

/// A statement paired with the corpus line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusStatement {
    /// 1-based line number in the corpus file.
    pub line: usize,
    pub statement: Statement,
}

/// Performance-strand values a relation assigns to its links.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationProperties {
    pub inclusivity: Inclusivity,
    pub additivity: Additivity,
}

/// Map from relation name to the performance strands its links carry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationTable {
    entries: BTreeMap<String, RelationProperties>,
}

impl RelationTable {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, relation: &str) -> Option<RelationProperties> {
        self.entries.get(relation).copied()
    }

    pub fn contains(&self, relation: &str) -> bool {
        self.entries.contains_key(relation)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Relation names in sorted order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn insert(&mut self, name: String, properties: RelationProperties) -> Result<(), ParseError> {
        if self.entries.contains_key(&name) {
            return Err(ParseError::DuplicateRelation(name));
        }
        self.entries.insert(name, properties);
        Ok(())
    }
}

impl Default for RelationTable {
    /// The built-in table used when no relation file is supplied.
    ///
    /// `HAS_PROPERTY` is subtractive so that property links terminate the
    /// threads that cross them; `SYNONYM_OF` is the reserved relation for
    /// synonym statements.
    fn default() -> Self {
        let mut table = Self::empty();
        for (name, inclusivity, additivity) in [
            ("IS_A", Inclusivity::Inclusive, Additivity::Additive),
            ("CONTAINS", Inclusivity::Inclusive, Additivity::Additive),
            ("HAS_PROPERTY", Inclusivity::Inclusive, Additivity::Subtractive),
            ("SYNONYM_OF", Inclusivity::Inclusive, Additivity::Additive),
        ] {
            table
                .insert(
                    name.to_string(),
                    RelationProperties {
                        inclusivity,
                        additivity,
                    },
                )
                .expect("built-in relation names are distinct");
        }
        table
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("empty statement")]
    EmptyStatement,
    #[error("duplicate relation {0}")]
    DuplicateRelation(String),
    #[error("bad relation-table value: {0}")]
    BadValue(String),
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("statement before any @domain directive")]
    MissingDomain,
}

/// A parse error located at a corpus line.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {error}")]
pub struct CorpusError {
    pub line: usize,
    pub error: ParseError,
}

fn is_relation_name(token: &str) -> bool {
    let mut chars = token.chars();
    matches!(chars.next(), Some('A'..='Z'))
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

#[derive(Debug, PartialEq, Eq)]
enum Token {
    Bare(String),
    Quoted(String),
}

fn tokenize(line: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut text = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) if ch.is_control() => {
                        return Err(ParseError::Syntax(
                            "control character inside quoted unit".into(),
                        ))
                    }
                    Some(ch) => text.push(ch),
                    None => return Err(ParseError::Syntax("unterminated quote".into())),
                }
            }
            tokens.push(Token::Quoted(text));
        } else {
            let mut text = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() {
                    break;
                }
                if ch.is_control() {
                    return Err(ParseError::Syntax("control character in token".into()));
                }
                text.push(ch);
                chars.next();
            }
            tokens.push(Token::Bare(text));
        }
    }
    Ok(tokens)
}

/// Parses one statement line under the given domain context.
///
/// Tokens alternate unit, relation, unit, ... — units at even positions
/// (bare or quoted), relation names at odd ones. Quoted units are trimmed
/// of surrounding whitespace and must be non-empty afterwards.
pub fn parse_statement(line: &str, current_domain: &str) -> Result<Statement, ParseError> {
    debug_assert!(!current_domain.trim().is_empty());
    let tokens = tokenize(line)?;
    if tokens.is_empty() {
        return Err(ParseError::EmptyStatement);
    }
    if tokens.len() == 1 {
        return Err(ParseError::Syntax("statement needs at least two units".into()));
    }
    if tokens.len() % 2 == 0 {
        return Err(ParseError::Syntax("trailing relation".into()));
    }

    let mut units = Vec::with_capacity(tokens.len() / 2 + 1);
    let mut relations = Vec::with_capacity(tokens.len() / 2);
    for (position, token) in tokens.into_iter().enumerate() {
        if position % 2 == 0 {
            let label = match token {
                Token::Bare(text) | Token::Quoted(text) => text.trim().to_string(),
            };
            if label.is_empty() {
                return Err(ParseError::Syntax("empty unit".into()));
            }
            units.push(label);
        } else {
            match token {
                Token::Bare(text) if is_relation_name(&text) => relations.push(text),
                Token::Bare(text) => {
                    return Err(ParseError::Syntax(format!(
                        "expected relation name, found `{text}`"
                    )))
                }
                Token::Quoted(_) => {
                    return Err(ParseError::Syntax(
                        "expected relation name, found quoted unit".into(),
                    ))
                }
            }
        }
    }

    Ok(Statement {
        domain: current_domain.to_string(),
        units,
        relations,
    })
}

/// Loads a relation table from tab-separated text: one
/// `NAME<TAB>inclusive|exclusive<TAB>additive|subtractive` entry per
/// non-comment line.
pub fn load_relation_table(text: &str) -> Result<RelationTable, ParseError> {
    let mut table = RelationTable::empty();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 3 {
            return Err(ParseError::BadValue(format!(
                "expected 3 tab-separated fields, found {} in `{trimmed}`",
                fields.len()
            )));
        }
        let name = fields[0];
        if !is_relation_name(name) {
            return Err(ParseError::BadValue(format!(
                "relation name `{name}` is not an uppercase identifier"
            )));
        }
        let inclusivity = match fields[1] {
            "inclusive" => Inclusivity::Inclusive,
            "exclusive" => Inclusivity::Exclusive,
            other => {
                return Err(ParseError::BadValue(format!(
                    "inclusivity must be inclusive|exclusive, found `{other}`"
                )))
            }
        };
        let additivity = match fields[2] {
            "additive" => Additivity::Additive,
            "subtractive" => Additivity::Subtractive,
            other => {
                return Err(ParseError::BadValue(format!(
                    "additivity must be additive|subtractive, found `{other}`"
                )))
            }
        };
        table.insert(
            name.to_string(),
            RelationProperties {
                inclusivity,
                additivity,
            },
        )?;
    }
    Ok(table)
}

/// Checks that every relation the statement uses exists in the table.
pub fn validate_statement(stmt: &Statement, table: &RelationTable) -> Result<(), ParseError> {
    for relation in &stmt.relations {
        if !table.contains(relation) {
            return Err(ParseError::UnknownRelation(relation.clone()));
        }
    }
    Ok(())
}

/// Parses a whole corpus: `#` comments and blank lines are skipped,
/// `@domain NAME` switches the embedding context, every other line is a
/// statement validated against `table`.
pub fn parse_corpus(
    text: &str,
    initial_domain: Option<&str>,
    table: &RelationTable,
) -> Result<Vec<CorpusStatement>, CorpusError> {
    let mut domain: Option<String> = initial_domain.map(str::to_string);
    let mut statements = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("@domain") {
            let name = rest.trim();
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(CorpusError {
                    line: line_no,
                    error: ParseError::Syntax("@domain takes exactly one name".into()),
                });
            }
            domain = Some(name.to_string());
            continue;
        }
        let current = domain.as_deref().ok_or(CorpusError {
            line: line_no,
            error: ParseError::MissingDomain,
        })?;
        let statement = parse_statement(line, current).map_err(|error| CorpusError {
            line: line_no,
            error,
        })?;
        validate_statement(&statement, table).map_err(|error| CorpusError {
            line: line_no,
            error,
        })?;
        statements.push(CorpusStatement {
            line: line_no,
            statement,
        });
    }
    Ok(statements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_two_unit_statement() {
        let stmt = parse_statement("Africa CONTAINS lion", "geo").unwrap();
        assert_eq!(stmt.domain, "geo");
        assert_eq!(stmt.units, vec!["Africa", "lion"]);
        assert_eq!(stmt.relations, vec!["CONTAINS"]);
    }

    #[test]
    fn parses_property_statement() {
        let stmt = parse_statement("lion HAS_PROPERTY strong", "geo").unwrap();
        assert_eq!(stmt.units, vec!["lion", "strong"]);
        assert_eq!(stmt.relations, vec!["HAS_PROPERTY"]);
    }

    #[test]
    fn parses_quoted_units_with_spaces() {
        let stmt = parse_statement("\"New York\" PART_OF USA", "geo").unwrap();
        assert_eq!(stmt.units, vec!["New York", "USA"]);
        assert_eq!(stmt.relations, vec!["PART_OF"]);
    }

    #[test]
    fn rejects_trailing_relation() {
        assert_eq!(
            parse_statement("apple IS_A", "food"),
            Err(ParseError::Syntax("trailing relation".into()))
        );
    }

    #[test]
    fn rejects_empty_line() {
        assert_eq!(parse_statement("   ", "geo"), Err(ParseError::EmptyStatement));
    }

    #[test]
    fn rejects_single_unit() {
        assert!(matches!(
            parse_statement("lion", "geo"),
            Err(ParseError::Syntax(_))
        ));
    }

    #[test]
    fn rejects_lowercase_relation_token() {
        assert!(matches!(
            parse_statement("lion eats meat", "geo"),
            Err(ParseError::Syntax(_))
        ));
    }

    #[test]
    fn rejects_unterminated_quote() {
        assert!(matches!(
            parse_statement("\"New York PART_OF USA", "geo"),
            Err(ParseError::Syntax(_))
        ));
    }

    #[test]
    fn rejects_empty_quoted_unit() {
        assert_eq!(
            parse_statement("\"  \" IS_A place", "geo"),
            Err(ParseError::Syntax("empty unit".into()))
        );
    }

    #[test]
    fn loads_single_entry_table() {
        let table = load_relation_table("IS_A\tinclusive\tadditive").unwrap();
        assert_eq!(
            table.get("IS_A"),
            Some(RelationProperties {
                inclusivity: Inclusivity::Inclusive,
                additivity: Additivity::Additive,
            })
        );
    }

    #[test]
    fn loads_subtractive_relation() {
        let table = load_relation_table("HAS_PROPERTY\tinclusive\tsubtractive").unwrap();
        assert_eq!(
            table.get("HAS_PROPERTY").unwrap().additivity,
            Additivity::Subtractive
        );
    }

    #[test]
    fn rejects_duplicate_relation() {
        let text = "IS_A\tinclusive\tadditive\nIS_A\texclusive\tadditive";
        assert_eq!(
            load_relation_table(text),
            Err(ParseError::DuplicateRelation("IS_A".into()))
        );
    }

    #[test]
    fn rejects_bad_table_value() {
        assert!(matches!(
            load_relation_table("IS_A\tinclusive\tweird"),
            Err(ParseError::BadValue(_))
        ));
        assert!(matches!(
            load_relation_table("is_a\tinclusive\tadditive"),
            Err(ParseError::BadValue(_))
        ));
        assert!(matches!(
            load_relation_table("IS_A\tinclusive"),
            Err(ParseError::BadValue(_))
        ));
    }

    #[test]
    fn table_skips_comments_and_blanks() {
        let table = load_relation_table("# rules\n\nIS_A\tinclusive\tadditive\n").unwrap();
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn validates_known_relations() {
        let table = RelationTable::default();
        let stmt = parse_statement("Africa CONTAINS lion", "geo").unwrap();
        assert_eq!(validate_statement(&stmt, &table), Ok(()));
    }

    #[test]
    fn reports_unknown_relation() {
        let table = RelationTable::default();
        let stmt = parse_statement("cat LIKES milk", "pets").unwrap();
        assert_eq!(
            validate_statement(&stmt, &table),
            Err(ParseError::UnknownRelation("LIKES".into()))
        );
    }

    #[test]
    fn accepts_multi_hop_chain() {
        let table = RelationTable::default();
        let stmt = parse_statement("A IS_A B HAS_PROPERTY c", "x").unwrap();
        assert_eq!(stmt.units.len(), 3);
        assert_eq!(stmt.relations.len(), 2);
        assert_eq!(validate_statement(&stmt, &table), Ok(()));
    }

    #[test]
    fn corpus_tracks_domain_directives() {
        let table = RelationTable::default();
        let text = "# corpus\n@domain geo\nAfrica CONTAINS lion\n\n@domain tech\nserver IS_A computer\n";
        let statements = parse_corpus(text, None, &table).unwrap();
        assert_eq!(statements.len(), 2);
        assert_eq!(statements[0].statement.domain, "geo");
        assert_eq!(statements[0].line, 3);
        assert_eq!(statements[1].statement.domain, "tech");
        assert_eq!(statements[1].line, 6);
    }

    #[test]
    fn corpus_requires_domain_context() {
        let table = RelationTable::default();
        let err = parse_corpus("Africa CONTAINS lion", None, &table).unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.error, ParseError::MissingDomain);
    }

    #[test]
    fn corpus_accepts_initial_domain() {
        let table = RelationTable::default();
        let statements = parse_corpus("Africa CONTAINS lion", Some("geo"), &table).unwrap();
        assert_eq!(statements[0].statement.domain, "geo");
    }

    #[test]
    fn corpus_reports_unknown_relation_line() {
        let table = RelationTable::default();
        let text = "@domain geo\nAfrica CONTAINS lion\nlion LIKES meat\n";
        let err = parse_corpus(text, None, &table).unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.error, ParseError::UnknownRelation("LIKES".into()));
    }

    #[test]
    fn relation_count_matches_unit_count() {
        let stmt = parse_statement("a IS_A b IS_A c IS_A d", "x").unwrap();
        assert_eq!(stmt.relations.len(), stmt.units.len() - 1);
    }

    fn unit_strategy() -> impl Strategy<Value = String> {
        prop_oneof![
            "[a-z][a-z0-9]{0,6}",
            "[A-Za-z][A-Za-z0-9 ]{0,8}[A-Za-z0-9]",
        ]
    }

    proptest! {
        // Render-then-parse returns the same units and relations.
        #[test]
        fn statement_round_trips_through_display(
            units in proptest::collection::vec(unit_strategy(), 2..6),
            relation in "[A-Z][A-Z0-9_]{0,5}",
        ) {
            let statement = Statement {
                domain: "geo".to_string(),
                units: units.clone(),
                relations: vec![relation; units.len() - 1],
            };
            let reparsed = parse_statement(&statement.to_string(), "geo").unwrap();
            prop_assert_eq!(reparsed, statement);
        }
    }
}
