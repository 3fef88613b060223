//! Letters, words, and the finite truncated alphabets moulds are tabulated on.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::scalar::MultiplierVector;

/// A degree vector `n` in `Z^nu` with total degree `|n| >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(Vec<i32>);

impl Letter {
    pub fn new(deg: Vec<i32>) -> Result<Self> {
        if deg.iter().sum::<i32>() < 1 {
            return Err(Error::InvalidLetter(fmt_vec(&deg)));
        }
        Ok(Letter(deg))
    }

    pub fn deg(&self) -> &[i32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|n|`.
    pub fn weight(&self) -> u32 {
        self.0.iter().sum::<i32>() as u32
    }

    /// Degrees of homogeneous derivations: every component `>= -1`, at most
    /// one equal to `-1`.
    pub fn is_derivation_degree(&self) -> bool {
        self.0.iter().all(|&c| c >= -1) && self.0.iter().filter(|&&c| c == -1).count() <= 1
    }

    pub fn add(&self, other: &Letter) -> Letter {
        Letter(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_vec(&self.0))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) fn fmt_vec<T: fmt::Display>(v: &[T]) -> String {
    format!("({})", v.iter().join(","))
}

pub(crate) fn parse_vec(s: &str) -> Result<Vec<i32>> {
    let t = s.trim().replace('\u{2212}', "-");
    let inner = t
        .strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .ok_or_else(|| Error::parse(s, "expected a parenthesized integer vector"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<i32>()
                .map_err(|_| Error::parse(s, "expected integer components"))
        })
        .collect()
}

impl FromStr for Letter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Letter::new(parse_vec(s)?)
    }
}

/// A finite sequence of letters. The empty word is the unit of concatenation.
///
/// Words are ordered by weight, then length, then lexicographically on the
/// letters' degree vectors.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn single(letter: Letter) -> Self {
        Word(vec![letter])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the letters' total degrees.
    pub fn weight(&self) -> u32 {
        weight_of(&self.0)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `||w||`: componentwise sum of the letters; the zero vector for `()`.
    pub fn norm(&self, nu: usize) -> Vec<i32> {
        norm_of(&self.0, nu)
    }
}

pub(crate) fn weight_of(letters: &[Letter]) -> u32 {
    letters.iter().map(Letter::weight).sum()
}

pub(crate) fn norm_of(letters: &[Letter], nu: usize) -> Vec<i32> {
    let mut acc = vec![0; nu];
    for l in letters {
        for (a, c) in acc.iter_mut().zip(l.deg()) {
            *a += c;
        }
    }
    acc
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then(self.len().cmp(&other.len()))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Letters joined by `.`, e.g. `(1,0).(-1,2)`; the empty word is `()`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("()");
        }
        f.write_str(&self.0.iter().join("."))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "()" {
            return Ok(Word::empty());
        }
        t.split('.')
            .map(str::parse::<Letter>)
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

/// Every word over `letters` of weight at most `max_weight`, each exactly
/// once, in canonical word order.
pub fn enumerate_words(letters: &[Letter], max_weight: u32) -> Vec<Word> {
    let letters: Vec<&Letter> = letters
        .iter()
        .filter(|l| l.weight() <= max_weight)
        .unique()
        .collect();
    let mut out = vec![Word::empty()];
    let mut frontier = vec![(Vec::<Letter>::new(), 0u32)];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, wt) in &frontier {
            for l in &letters {
                let nw = wt + l.weight();
                if nw <= max_weight {
                    let mut v = w.clone();
                    v.push((*l).clone());
                    out.push(Word(v.clone()));
                    next.push((v, nw));
                }
            }
        }
        frontier = next;
    }
    out.sort();
    out
}

/// All splittings of `w` into `k` consecutive nonempty factors, ordered by
/// their cut positions. Empty when `k` is out of `1..=len(w)`.
pub fn partitions(w: &Word, k: usize) -> impl Iterator<Item = Vec<Word>> + '_ {
    let l = w.len();
    let valid = k >= 1 && k <= l;
    (1..l.max(1))
        .combinations(if valid { k - 1 } else { 0 })
        .filter(move |_| valid)
        .map(move |cuts| {
            let mut bounds = Vec::with_capacity(k + 1);
            bounds.push(0);
            bounds.extend(cuts);
            bounds.push(l);
            bounds
                .windows(2)
                .map(|b| Word(w.0[b[0]..b[1]].to_vec()))
                .collect()
        })
}

/// One way of cutting a word into consecutive nonempty blocks, recorded as
/// indices into the owning context's word table.
#[derive(Clone, Debug)]
pub struct Cut {
    /// Index of the word of block norms `||a^1|| ... ||a^k||`.
    pub norms: usize,
    /// Indices of the blocks `a^1, ..., a^k`.
    pub blocks: Vec<usize>,
}

/// A finite truncation of an alphabet: dimension, multipliers, a weight
/// bound, and a letter set closed under addition up to that bound.
///
/// All words over the letters with weight at most `max_weight` are
/// enumerated once; moulds on the context are dense tables over that list.
pub struct TruncationContext {
    mu: MultiplierVector,
    max_weight: u32,
    letters: Vec<Letter>,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    splits: OnceLock<Vec<Vec<(usize, usize)>>>,
    cuts: OnceLock<Vec<Vec<Cut>>>,
    resonant: Vec<bool>,
}

impl TruncationContext {
    /// Builds the context generated by `generators`: the letters are every
    /// sum of generators with weight at most `max_weight`.
    pub fn new(mu: MultiplierVector, max_weight: u32, generators: &[Letter]) -> Result<Self> {
        let nu = mu.dim();
        if let Some(bad) = generators.iter().find(|l| l.dim() != nu) {
            return Err(Error::LengthMismatch {
                expected: nu,
                got: bad.dim(),
            });
        }
        let mut set: BTreeSet<Letter> = generators
            .iter()
            .filter(|l| l.weight() <= max_weight)
            .cloned()
            .collect();
        loop {
            let snapshot: Vec<Letter> = set.iter().cloned().collect();
            let mut grew = false;
            for a in &snapshot {
                for b in &snapshot {
                    if a.weight() + b.weight() <= max_weight && set.insert(a.add(b)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let letters: Vec<Letter> = set.into_iter().collect();
        let words = enumerate_words(&letters, max_weight);
        let index = words
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, w)| (w, i))
            .collect();
        let resonant = words
            .iter()
            .map(|w| mu.is_resonant(&w.norm(nu)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TruncationContext {
            mu,
            max_weight,
            letters,
            words,
            index,
            splits: OnceLock::new(),
            cuts: OnceLock::new(),
            resonant,
        })
    }

    pub fn nu(&self) -> usize {
        self.mu.dim()
    }

    pub fn mu(&self) -> &MultiplierVector {
        &self.mu
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub(crate) fn index_of_slice(&self, letters: &[Letter]) -> Option<usize> {
        // Word hashes exactly like its letter vector.
        self.index.get(&Word(letters.to_vec())).copied()
    }

    /// Whether `mu^d = 1`.
    pub fn is_resonant(&self, d: &[i32]) -> Result<bool> {
        self.mu.is_resonant(d)
    }

    /// Resonance of the norm of the word at `idx`.
    pub fn word_is_resonant(&self, idx: usize) -> bool {
        self.resonant[idx]
    }

    /// For each word, the index pairs `(prefix, suffix)` of its `len + 1`
    /// concatenation splittings, empty factors included.
    pub fn splits(&self) -> &[Vec<(usize, usize)>] {
        self.splits.get_or_init(|| {
            self.words
                .iter()
                .map(|w| {
                    (0..=w.len())
                        .map(|i| {
                            (
                                self.index_of_slice(&w.0[..i]).expect("prefix in context"),
                                self.index_of_slice(&w.0[i..]).expect("suffix in context"),
                            )
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// For each word, all cuts into nonempty consecutive blocks.
    pub fn cuts(&self) -> &[Vec<Cut>] {
        self.cuts.get_or_init(|| {
            let nu = self.nu();
            self.words
                .iter()
                .map(|w| {
                    let l = w.len();
                    if l == 0 {
                        return Vec::new();
                    }
                    let mut out = Vec::with_capacity(1 << (l - 1));
                    for mask in 0u32..(1 << (l - 1)) {
                        let mut bounds = vec![0];
                        bounds.extend((1..l).filter(|c| mask & (1 << (c - 1)) != 0));
                        bounds.push(l);
                        let mut norm_letters = Vec::with_capacity(bounds.len() - 1);
                        let mut blocks = Vec::with_capacity(bounds.len() - 1);
                        for b in bounds.windows(2) {
                            let block = &w.0[b[0]..b[1]];
                            norm_letters.push(Letter(norm_of(block, nu)));
                            blocks.push(self.index_of_slice(block).expect("block in context"));
                        }
                        let norms = self
                            .index_of_slice(&norm_letters)
                            .expect("letter set is closed under addition");
                        out.push(Cut { norms, blocks });
                    }
                    out
                })
                .collect()
        })
    }

    pub fn same_as(&self, other: &TruncationContext) -> bool {
        std::ptr::eq(self, other)
            || (self.mu == other.mu
                && self.max_weight == other.max_weight
                && self.letters == other.letters)
    }
}

impl fmt::Debug for TruncationContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncationContext")
            .field("mu", &self.mu)
            .field("max_weight", &self.max_weight)
            .field("letters", &self.letters)
            .field("words", &self.words.len())
            .finish()
    }
}
