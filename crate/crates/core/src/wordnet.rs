//! WordNet-format noun lexicon: parsing, relation queries, fixture writing.
//!
//! Reads the classic two-file database layout (`index.noun` + `data.noun`).
//! Only the relations substitution needs are kept: synonymy via synset
//! membership, hypernym/hyponym edges, lexical antonyms, and co-hyponyms
//! derived on the fly from shared hypernyms. Everything else in the pointer
//! zoo is skipped.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

/// Synset offset used as an opaque key. Kept as the exact string from the
/// database files so real and synthetic lexica behave identically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId(pub String);

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SynsetId {
    fn from(s: &str) -> Self {
        SynsetId(s.to_string())
    }
}

/// Lexical relation a substitution can draw candidates from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelationKind {
    Synonym,
    Antonym,
    Hypernym,
    Hyponym,
    CoHyponym,
}

impl RelationKind {
    pub const ALL: [RelationKind; 5] = [
        RelationKind::Synonym,
        RelationKind::Antonym,
        RelationKind::Hypernym,
        RelationKind::Hyponym,
        RelationKind::CoHyponym,
    ];
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RelationKind::Synonym => "synonym",
            RelationKind::Antonym => "antonym",
            RelationKind::Hypernym => "hypernym",
            RelationKind::Hyponym => "hyponym",
            RelationKind::CoHyponym => "co-hyponym",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{file}:{line}: malformed line: {reason}")]
    MalformedLine {
        file: &'static str,
        line: usize,
        reason: String,
    },
    #[error("pointer to missing synset {target} (from {origin})")]
    DanglingPointer { origin: String, target: SynsetId },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One noun synset with the resolved edges substitution cares about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synset {
    pub id: SynsetId,
    /// Lemmas in database order, lowercased. Multi-word lemmas keep their
    /// underscores; candidate queries filter them out.
    pub lemmas: Vec<String>,
    pub hypernyms: Vec<SynsetId>,
    pub hyponyms: Vec<SynsetId>,
    /// Lexical antonyms: own lemma to the antonym lemmas of other synsets.
    pub antonym_lemmas: BTreeMap<String, Vec<String>>,
}

/// Parsed noun lexicon with case-insensitive lemma lookup.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Lexicon {
    synsets: BTreeMap<SynsetId, Synset>,
    /// Lowercased lemma to synset ids in the index file's sense order.
    lemma_index: HashMap<String, Vec<SynsetId>>,
}

impl Lexicon {
    /// Parses `index.noun` and `data.noun` from a database directory.
    pub fn load_dir(dir: &Path) -> Result<Lexicon, LexiconError> {
        let index = BufReader::new(fs::File::open(dir.join("index.noun"))?);
        let data = BufReader::new(fs::File::open(dir.join("data.noun"))?);
        parse_lexicon(index, data)
    }

    pub fn synset(&self, id: &SynsetId) -> Option<&Synset> {
        self.synsets.get(id)
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    pub fn synset_count(&self) -> usize {
        self.synsets.len()
    }

    pub fn lemma_count(&self) -> usize {
        self.lemma_index.len()
    }

    /// True when the word has at least one noun sense.
    pub fn is_noun(&self, word: &str) -> bool {
        self.lemma_index.contains_key(&word.to_lowercase())
    }

    /// Synset of the word's first-listed noun sense.
    pub fn first_sense(&self, word: &str) -> Option<&Synset> {
        let ids = self.lemma_index.get(&word.to_lowercase())?;
        self.synsets.get(ids.first()?)
    }

    /// Substitution candidates for `word` under one relation, drawn from the
    /// first-listed sense only. The result never contains the query word or
    /// multi-word lemmas, is deduplicated, and preserves database order.
    /// Unknown words yield an empty list.
    pub fn candidates(&self, word: &str, kind: RelationKind) -> Vec<String> {
        let query = word.to_lowercase();
        let Some(synset) = self.first_sense(&query) else {
            return Vec::new();
        };
        let mut raw: Vec<&str> = Vec::new();
        match kind {
            RelationKind::Synonym => {
                raw.extend(synset.lemmas.iter().map(String::as_str));
            }
            RelationKind::Antonym => {
                if let Some(ants) = synset.antonym_lemmas.get(&query) {
                    raw.extend(ants.iter().map(String::as_str));
                }
            }
            RelationKind::Hypernym => {
                for id in &synset.hypernyms {
                    raw.extend(self.synsets[id].lemmas.iter().map(String::as_str));
                }
            }
            RelationKind::Hyponym => {
                for id in &synset.hyponyms {
                    raw.extend(self.synsets[id].lemmas.iter().map(String::as_str));
                }
            }
            RelationKind::CoHyponym => {
                for parent in &synset.hypernyms {
                    for sibling in &self.synsets[parent].hyponyms {
                        if sibling != &synset.id {
                            raw.extend(self.synsets[sibling].lemmas.iter().map(String::as_str));
                        }
                    }
                }
            }
        }
        let mut out: Vec<String> = Vec::new();
        for lemma in raw {
            if lemma == query || lemma.contains('_') {
                continue;
            }
            if !out.iter().any(|seen| seen == lemma) {
                out.push(lemma.to_string());
            }
        }
        out
    }

    /// Counts hypernym/hyponym edges whose mirror edge is missing. The parser
    /// symmetrizes while resolving pointers, so a nonzero count means the
    /// lexicon was built some other way.
    pub fn edge_violations(&self) -> usize {
        let mut violations = 0;
        for synset in self.synsets.values() {
            for parent in &synset.hypernyms {
                if !self.synsets[parent].hyponyms.contains(&synset.id) {
                    violations += 1;
                }
            }
            for child in &synset.hyponyms {
                if !self.synsets[child].hypernyms.contains(&synset.id) {
                    violations += 1;
                }
            }
        }
        violations
    }
}

struct RawPointer {
    symbol: String,
    target: SynsetId,
    src_word: usize,
    tgt_word: usize,
}

struct RawSynset {
    id: SynsetId,
    lemmas: Vec<String>,
    pointers: Vec<RawPointer>,
    line: usize,
}

fn malformed(file: &'static str, line: usize, reason: impl Into<String>) -> LexiconError {
    LexiconError::MalformedLine {
        file,
        line,
        reason: reason.into(),
    }
}

/// True for copyright/header lines, which start with whitespace.
fn is_header(line: &str) -> bool {
    line.starts_with(' ') || line.starts_with('\t')
}

/// Parses the two database streams into a lexicon. Hypernym/hyponym pointers
/// are resolved to ids and symmetrized: a single `@` edge in the data also
/// yields the mirror hyponym edge, so mutual consistency holds by
/// construction. Identical byte streams always yield identical lexica.
pub fn parse_lexicon(index: impl BufRead, data: impl BufRead) -> Result<Lexicon, LexiconError> {
    let mut lemma_index: HashMap<String, Vec<SynsetId>> = HashMap::new();
    for (no, line) in index.lines().enumerate() {
        let line = line?;
        if is_header(&line) || line.trim().is_empty() {
            continue;
        }
        if let Some((lemma, offsets)) = parse_index_line(&line, no + 1)? {
            lemma_index.insert(lemma, offsets);
        }
    }

    let mut raw: Vec<RawSynset> = Vec::new();
    for (no, line) in data.lines().enumerate() {
        let line = line?;
        if is_header(&line) || line.trim().is_empty() {
            continue;
        }
        if let Some(synset) = parse_data_line(&line, no + 1)? {
            raw.push(synset);
        }
    }

    let mut synsets: BTreeMap<SynsetId, Synset> = BTreeMap::new();
    for r in &raw {
        let previous = synsets.insert(
            r.id.clone(),
            Synset {
                id: r.id.clone(),
                lemmas: r.lemmas.clone(),
                hypernyms: Vec::new(),
                hyponyms: Vec::new(),
                antonym_lemmas: BTreeMap::new(),
            },
        );
        if previous.is_some() {
            return Err(malformed(
                "data.noun",
                r.line,
                format!("duplicate synset offset {}", r.id),
            ));
        }
    }

    for r in &raw {
        for p in &r.pointers {
            match p.symbol.as_str() {
                // Instance pointers are folded into their plain forms.
                "@" | "@i" => {
                    ensure_exists(&synsets, &r.id, &p.target)?;
                    add_hyper_edge(&mut synsets, &r.id, &p.target);
                }
                "~" | "~i" => {
                    ensure_exists(&synsets, &r.id, &p.target)?;
                    add_hyper_edge(&mut synsets, &p.target, &r.id);
                }
                "!" => {
                    ensure_exists(&synsets, &r.id, &p.target)?;
                    add_antonym(&mut synsets, r, p)?;
                }
                _ => {}
            }
        }
    }

    for (lemma, ids) in &lemma_index {
        for id in ids {
            if !synsets.contains_key(id) {
                return Err(LexiconError::DanglingPointer {
                    origin: format!("index entry '{lemma}'"),
                    target: id.clone(),
                });
            }
        }
    }

    Ok(Lexicon {
        synsets,
        lemma_index,
    })
}

fn ensure_exists(
    synsets: &BTreeMap<SynsetId, Synset>,
    origin: &SynsetId,
    target: &SynsetId,
) -> Result<(), LexiconError> {
    if synsets.contains_key(target) {
        Ok(())
    } else {
        Err(LexiconError::DanglingPointer {
            origin: format!("synset {origin}"),
            target: target.clone(),
        })
    }
}

/// Adds child -> parent and the mirror parent -> child edge, skipping
/// duplicates while preserving first-encounter order.
fn add_hyper_edge(synsets: &mut BTreeMap<SynsetId, Synset>, child: &SynsetId, parent: &SynsetId) {
    let c = synsets.get_mut(child).expect("child synset exists");
    if !c.hypernyms.contains(parent) {
        c.hypernyms.push(parent.clone());
    }
    let p = synsets.get_mut(parent).expect("parent synset exists");
    if !p.hyponyms.contains(child) {
        p.hyponyms.push(child.clone());
    }
}

fn add_antonym(
    synsets: &mut BTreeMap<SynsetId, Synset>,
    r: &RawSynset,
    p: &RawPointer,
) -> Result<(), LexiconError> {
    let pick = |lemmas: &[String], word_no: usize| -> Result<Vec<String>, LexiconError> {
        if word_no == 0 {
            // Semantic form: applies to the whole synset.
            Ok(lemmas.to_vec())
        } else {
            lemmas
                .get(word_no - 1)
                .map(|l| vec![l.clone()])
                .ok_or_else(|| {
                    malformed(
                        "data.noun",
                        r.line,
                        format!("antonym word number {word_no} out of range"),
                    )
                })
        }
    };
    let sources = pick(&r.lemmas, p.src_word)?;
    let targets = pick(&synsets[&p.target].lemmas, p.tgt_word)?;
    let own = synsets.get_mut(&r.id).expect("source synset exists");
    for src in sources {
        let entry = own.antonym_lemmas.entry(src).or_default();
        for tgt in &targets {
            if !entry.contains(tgt) {
                entry.push(tgt.clone());
            }
        }
    }
    Ok(())
}

/// `lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt tagsense_cnt offset...`
fn parse_index_line(
    line: &str,
    no: usize,
) -> Result<Option<(String, Vec<SynsetId>)>, LexiconError> {
    let t: Vec<&str> = line.split_ascii_whitespace().collect();
    if t.len() < 6 {
        return Err(malformed("index.noun", no, "expected at least 6 fields"));
    }
    if t[1] != "n" {
        return Ok(None);
    }
    let lemma = t[0].to_lowercase();
    let synset_cnt: usize = t[2]
        .parse()
        .map_err(|_| malformed("index.noun", no, "synset count is not a number"))?;
    if synset_cnt == 0 {
        return Err(malformed("index.noun", no, "zero synset count"));
    }
    let p_cnt: usize = t[3]
        .parse()
        .map_err(|_| malformed("index.noun", no, "pointer count is not a number"))?;
    let offsets_at = 4 + p_cnt + 2;
    if t.len() < offsets_at + synset_cnt {
        return Err(malformed("index.noun", no, "truncated offset list"));
    }
    let offsets = t[offsets_at..offsets_at + synset_cnt]
        .iter()
        .map(|s| SynsetId(s.to_string()))
        .collect();
    Ok(Some((lemma, offsets)))
}

/// `offset lex_filenum ss_type w_cnt word lex_id [word lex_id...] p_cnt [ptr...] | gloss`
/// with `w_cnt` and pointer source/target fields in hex, `p_cnt` in decimal.
fn parse_data_line(line: &str, no: usize) -> Result<Option<RawSynset>, LexiconError> {
    let head = match line.split_once('|') {
        Some((head, _gloss)) => head,
        None => line,
    };
    let t: Vec<&str> = head.split_ascii_whitespace().collect();
    if t.len() < 6 {
        return Err(malformed("data.noun", no, "expected at least 6 fields"));
    }
    if t[2] != "n" {
        return Ok(None);
    }
    let id = SynsetId(t[0].to_string());
    let w_cnt = usize::from_str_radix(t[3], 16)
        .map_err(|_| malformed("data.noun", no, "word count is not hex"))?;
    if w_cnt == 0 {
        return Err(malformed("data.noun", no, "empty word list"));
    }
    let p_cnt_at = 4 + 2 * w_cnt;
    if t.len() < p_cnt_at + 1 {
        return Err(malformed("data.noun", no, "truncated word list"));
    }
    let mut lemmas = Vec::with_capacity(w_cnt);
    for i in 0..w_cnt {
        lemmas.push(t[4 + 2 * i].to_lowercase());
        let lex_id = t[4 + 2 * i + 1];
        if u32::from_str_radix(lex_id, 16).is_err() {
            return Err(malformed("data.noun", no, format!("bad lex id '{lex_id}'")));
        }
    }
    let p_cnt: usize = t[p_cnt_at]
        .parse()
        .map_err(|_| malformed("data.noun", no, "pointer count is not a number"))?;
    if t.len() < p_cnt_at + 1 + 4 * p_cnt {
        return Err(malformed("data.noun", no, "truncated pointer list"));
    }
    let mut pointers = Vec::with_capacity(p_cnt);
    for j in 0..p_cnt {
        let base = p_cnt_at + 1 + 4 * j;
        let st = u16::from_str_radix(t[base + 3], 16)
            .map_err(|_| malformed("data.noun", no, "pointer source/target is not hex"))?;
        pointers.push(RawPointer {
            symbol: t[base].to_string(),
            target: SynsetId(t[base + 1].to_string()),
            src_word: (st >> 8) as usize,
            tgt_word: (st & 0xff) as usize,
        });
    }
    Ok(Some(RawSynset {
        id,
        lemmas,
        pointers,
        line: no,
    }))
}

/// Specification of one synset for [`render_wndb`]. Hypernym edges are
/// mirrored automatically, so children never list their `~` pointers here.
#[derive(Clone, Debug)]
pub struct SynsetDef {
    pub id: String,
    pub lemmas: Vec<String>,
    /// Parent synset ids.
    pub hypernyms: Vec<String>,
    /// Lexical antonyms: (own word number, target id, target word number),
    /// word numbers 1-based. Callers emit both directions explicitly.
    pub antonyms: Vec<(usize, String, usize)>,
    pub gloss: String,
}

impl SynsetDef {
    pub fn new(id: &str, lemmas: &[&str]) -> Self {
        SynsetDef {
            id: id.to_string(),
            lemmas: lemmas.iter().map(|l| l.to_string()).collect(),
            hypernyms: Vec::new(),
            antonyms: Vec::new(),
            gloss: format!("fixture synset {id}"),
        }
    }

    pub fn under(mut self, parent: &str) -> Self {
        self.hypernyms.push(parent.to_string());
        self
    }

    pub fn antonym(mut self, own_word: usize, target: &str, target_word: usize) -> Self {
        self.antonyms
            .push((own_word, target.to_string(), target_word));
        self
    }
}

/// Renders synset definitions as (`index.noun`, `data.noun`) file contents in
/// the database format the parser reads. Deterministic: same definitions in,
/// same bytes out.
pub fn render_wndb(defs: &[SynsetDef]) -> (String, String) {
    let header = |what: &str| {
        format!(
            "  1 Generated fixture lexicon ({what}); lines starting with\n  2 whitespace are headers and must be skipped by parsers.\n"
        )
    };

    // Children per parent, in definition order, for the mirror `~` pointers.
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for def in defs {
        for parent in &def.hypernyms {
            children
                .entry(parent.as_str())
                .or_default()
                .push(def.id.as_str());
        }
    }

    let mut data = header("data.noun");
    for def in defs {
        let mut pointers: Vec<String> = Vec::new();
        for parent in &def.hypernyms {
            pointers.push(format!("@ {parent} n 0000"));
        }
        for child in children.get(def.id.as_str()).map_or(&[][..], |v| &v[..]) {
            pointers.push(format!("~ {child} n 0000"));
        }
        for (own, target, theirs) in &def.antonyms {
            pointers.push(format!("! {target} n {own:02x}{theirs:02x}"));
        }
        let words = def
            .lemmas
            .iter()
            .map(|l| format!("{l} 0"))
            .collect::<Vec<_>>()
            .join(" ");
        let ptr_part = if pointers.is_empty() {
            String::new()
        } else {
            format!(" {}", pointers.join(" "))
        };
        data.push_str(&format!(
            "{} 03 n {:02x} {} {:03}{} | {}\n",
            def.id,
            def.lemmas.len(),
            words,
            pointers.len(),
            ptr_part,
            def.gloss
        ));
    }

    // Lemma -> synsets in definition order; definition order is sense order.
    let mut senses: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut symbols: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for def in defs {
        let mut syms: Vec<&str> = Vec::new();
        if !def.hypernyms.is_empty() {
            syms.push("@");
        }
        if children.contains_key(def.id.as_str()) {
            syms.push("~");
        }
        if !def.antonyms.is_empty() {
            syms.push("!");
        }
        for lemma in &def.lemmas {
            senses.entry(lemma.as_str()).or_default().push(&def.id);
            let entry = symbols.entry(lemma.as_str()).or_default();
            for s in &syms {
                if !entry.contains(s) {
                    entry.push(s);
                }
            }
        }
    }

    let mut index = header("index.noun");
    for (lemma, ids) in &senses {
        let syms = &symbols[lemma];
        let sym_part = if syms.is_empty() {
            String::new()
        } else {
            format!(" {}", syms.join(" "))
        };
        index.push_str(&format!(
            "{lemma} n {} {}{} {} 0 {}\n",
            ids.len(),
            syms.len(),
            sym_part,
            ids.len(),
            ids.join(" ")
        ));
    }

    (index, data)
}

/// Writes rendered fixture files into a directory.
pub fn write_wndb_dir(defs: &[SynsetDef], dir: &Path) -> std::io::Result<()> {
    let (index, data) = render_wndb(defs);
    fs::create_dir_all(dir)?;
    fs::write(dir.join("index.noun"), index)?;
    fs::write(dir.join("data.noun"), data)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(index: &str, data: &str) -> Result<Lexicon, LexiconError> {
        parse_lexicon(Cursor::new(index), Cursor::new(data))
    }

    #[test]
    fn single_hypernym_pointer_is_symmetrized() {
        let index = "dog n 1 1 @ 1 0 00000001\ncanine n 1 1 ~ 1 0 00000002\n";
        let data = "00000001 03 n 01 dog 0 001 @ 00000002 n 0000 | a dog\n\
                    00000002 03 n 01 canine 0 000 | a canine\n";
        let lex = parse(index, data).unwrap();
        let dog = lex.first_sense("dog").unwrap();
        assert_eq!(dog.hypernyms, vec![SynsetId::from("00000002")]);
        let canine = lex.synset(&SynsetId::from("00000002")).unwrap();
        assert_eq!(canine.hyponyms, vec![SynsetId::from("00000001")]);
        assert_eq!(lex.edge_violations(), 0);
    }

    #[test]
    fn header_lines_are_skipped() {
        let index = "  1 header line, must be ignored\ndog n 1 0 1 0 00000001\n";
        let data = "  1 header line, must be ignored\n00000001 03 n 01 dog 0 000 | a dog\n";
        let lex = parse(index, data).unwrap();
        assert!(lex.is_noun("dog"));
        assert_eq!(lex.synset_count(), 1);
    }

    #[test]
    fn dangling_pointer_is_reported() {
        let index = "dog n 1 1 @ 1 0 00000001\n";
        let data = "00000001 03 n 01 dog 0 001 @ 00000099 n 0000 | a dog\n";
        let err = parse(index, data).unwrap_err();
        match err {
            LexiconError::DanglingPointer { target, .. } => {
                assert_eq!(target, SynsetId::from("00000099"));
            }
            other => panic!("expected dangling pointer, got {other:?}"),
        }
    }

    #[test]
    fn malformed_data_line_carries_line_number() {
        let index = "dog n 1 0 1 0 00000001\n";
        let data = "00000001 03 n 01 dog 0 000 | ok\n00000002 03 n zz dog 0 000 | bad\n";
        let err = parse(index, data).unwrap_err();
        match err {
            LexiconError::MalformedLine { file, line, .. } => {
                assert_eq!(file, "data.noun");
                assert_eq!(line, 2);
            }
            other => panic!("expected malformed line, got {other:?}"),
        }
    }

    #[test]
    fn unknown_word_has_no_candidates() {
        let index = "dog n 1 0 1 0 00000001\n";
        let data = "00000001 03 n 01 dog 0 000 | a dog\n";
        let lex = parse(index, data).unwrap();
        assert!(lex.candidates("unicorn", RelationKind::Synonym).is_empty());
        assert!(!lex.is_noun("unicorn"));
    }

    #[test]
    fn lookup_is_case_insensitive_and_query_word_is_excluded() {
        let index = "dog n 1 0 1 0 00000001\ndoggy n 1 0 1 0 00000001\n";
        let data = "00000001 03 n 02 dog 0 doggy 0 000 | a dog\n";
        let lex = parse(index, data).unwrap();
        assert_eq!(lex.candidates("Dog", RelationKind::Synonym), vec!["doggy"]);
        assert!(lex.is_noun("DOG"));
    }

    #[test]
    fn multi_word_lemmas_are_filtered_from_candidates() {
        let index = "dog n 1 0 1 0 00000001\n";
        let data = "00000001 03 n 03 dog 0 doggy 0 domestic_dog 0 000 | a dog\n";
        let lex = parse(index, data).unwrap();
        assert_eq!(lex.candidates("dog", RelationKind::Synonym), vec!["doggy"]);
    }

    #[test]
    fn lexical_antonyms_resolve_word_numbers() {
        let index = "day n 1 1 ! 1 0 00000001\nnight n 1 1 ! 1 0 00000002\n";
        let data = "00000001 03 n 02 day 0 daytime 0 001 ! 00000002 n 0101 | light hours\n\
                    00000002 03 n 02 night 0 nighttime 0 001 ! 00000001 n 0101 | dark hours\n";
        let lex = parse(index, data).unwrap();
        assert_eq!(lex.candidates("day", RelationKind::Antonym), vec!["night"]);
        assert_eq!(lex.candidates("night", RelationKind::Antonym), vec!["day"]);
        // daytime carries no antonym link of its own
        assert!(lex.candidates("daytime", RelationKind::Antonym).is_empty());
    }

    #[test]
    fn first_listed_sense_wins() {
        // "bass" as fish first, instrument second; hypernym queries follow sense 1
        let index = "bass n 2 1 @ 2 0 00000001 00000003\nfish n 1 1 ~ 1 0 00000002\n\
                     instrument n 1 1 ~ 1 0 00000004\n";
        let data = "00000001 03 n 01 bass 0 001 @ 00000002 n 0000 | a fish\n\
                    00000002 03 n 01 fish 0 000 | aquatic animal\n\
                    00000003 03 n 01 bass 0 001 @ 00000004 n 0000 | an instrument\n\
                    00000004 03 n 01 instrument 0 000 | a device\n";
        let lex = parse(index, data).unwrap();
        assert_eq!(lex.candidates("bass", RelationKind::Hypernym), vec!["fish"]);
    }

    #[test]
    fn parse_is_deterministic() {
        let index = "dog n 1 1 @ 1 0 00000001\ncanine n 1 1 ~ 1 0 00000002\n";
        let data = "00000001 03 n 01 dog 0 001 @ 00000002 n 0000 | a dog\n\
                    00000002 03 n 01 canine 0 000 | a canine\n";
        let a = parse(index, data).unwrap();
        let b = parse(index, data).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rendered_fixture_round_trips() {
        let defs = vec![
            SynsetDef::new("00000001", &["canine"]),
            SynsetDef::new("00000002", &["dog", "doggy"]).under("00000001"),
            SynsetDef::new("00000003", &["wolf"]).under("00000001"),
        ];
        let (index, data) = render_wndb(&defs);
        let lex = parse(&index, &data).unwrap();
        assert_eq!(lex.synset_count(), 3);
        assert_eq!(lex.candidates("dog", RelationKind::CoHyponym), vec!["wolf"]);
        assert_eq!(
            lex.candidates("dog", RelationKind::Hypernym),
            vec!["canine"]
        );
        assert_eq!(lex.edge_violations(), 0);
        // writer determinism
        let again = render_wndb(&defs);
        assert_eq!((index, data), again);
    }
}
